use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_with::{DeserializeFromStr, SerializeDisplay};

use crate::error::{Error, Result};
use crate::hyp::IntMatrix2;

/// Isotopy class of an essential simple closed curve on the once-punctured
/// torus, stored as a primitive integer pair in canonical form: `q > 0`, or
/// `(1, 0)` when `q = 0`.
///
/// Field order makes the derived `Ord` lexicographic on `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, SerializeDisplay, DeserializeFromStr)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const HORIZONTAL: Slope = Slope { p: 1, q: 0 };
    pub const VERTICAL: Slope = Slope { p: 0, q: 1 };
    pub const DIAGONAL: Slope = Slope { p: 1, q: 1 };
    pub const ANTIDIAGONAL: Slope = Slope { p: -1, q: 1 };

    /// Canonicalizes `(p, q)`; rejects non-primitive pairs.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p.gcd(&q) != 1 {
            return Err(Error::NotPrimitive { p, q });
        }
        Ok(Self::canonical_unchecked(p, q))
    }

    pub(crate) fn canonical_unchecked(p: i64, q: i64) -> Self {
        if q > 0 || (q == 0 && p > 0) {
            Slope { p, q }
        } else {
            Slope { p: -p, q: -q }
        }
    }

    pub(crate) fn from_i128(p: i128, q: i128) -> Self {
        let p = i64::try_from(p).expect("slope coordinate overflows i64");
        let q = i64::try_from(q).expect("slope coordinate overflows i64");
        Self::canonical_unchecked(p, q)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `|p| + |q|`, the Farey-tree size used for windowed searches.
    pub fn norm1(&self) -> u64 {
        self.p.unsigned_abs() + self.q.unsigned_abs()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "slope({}/{})", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Parses `slope(p/q)`, or a bare `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s
            .strip_prefix("slope(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s);
        let (p, q) = body
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected slope(p/q), got {s:?}")))?;
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("slope numerator {p:?}: {e}")))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("slope denominator {q:?}: {e}")))?;
        Slope::new(p, q)
    }
}

/// A power of the Dehn twist about a single curve, `T_α^a` with `a ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistSpec {
    curve: Slope,
    power: i64,
}

impl TwistSpec {
    pub fn new(curve: Slope, power: i64) -> Result<Self> {
        if power == 0 {
            return Err(Error::ZeroPower);
        }
        Ok(Self { curve, power })
    }

    pub fn curve(&self) -> Slope {
        self.curve
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    pub fn inverse(&self) -> TwistSpec {
        TwistSpec {
            curve: self.curve,
            power: -self.power,
        }
    }

    /// Linear action on homology, as an exact integer matrix.
    pub fn homology_map(&self) -> SlopeMap {
        let (p, q, a) = (self.curve.p as i128, self.curve.q as i128, self.power as i128);
        SlopeMap::from_entries([[1 - a * p * q, a * p * p], [-a * q * q, 1 + a * p * q]])
    }
}

/// Geometric intersection number `|p q' − q p'|`.
pub fn intersection_number(s1: Slope, s2: Slope) -> u64 {
    let v = s1.p as i128 * s2.q as i128 - s1.q as i128 * s2.p as i128;
    u64::try_from(v.unsigned_abs()).expect("intersection number overflows u64")
}

/// Parabolic matrix `[[1 − apq, ap²], [−aq², 1 + apq]]` of `T_{(p,q)}^a`.
pub fn twist_matrix(t: TwistSpec) -> IntMatrix2 {
    let m = t.homology_map().entries;
    IntMatrix2 {
        a: m[0][0].into(),
        b: m[0][1].into(),
        c: m[1][0].into(),
        d: m[1][1].into(),
    }
}

/// Image of `target` under `T_α^a`: `target + a·(p s − q r)·α` for
/// `target = (r, s)`, `α = (p, q)`.
pub fn twist_on_slope(t: TwistSpec, target: Slope) -> Slope {
    let (p, q) = (t.curve.p as i128, t.curve.q as i128);
    let (r, s) = (target.p as i128, target.q as i128);
    let k = t.power as i128 * (p * s - q * r);
    Slope::from_i128(r + k * p, s + k * q)
}

/// Exact SL(2,ℤ) matrix acting on slope vectors, used as a change of marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlopeMap {
    entries: [[i128; 2]; 2],
}

impl SlopeMap {
    pub const IDENTITY: SlopeMap = SlopeMap {
        entries: [[1, 0], [0, 1]],
    };

    pub(crate) fn from_entries(entries: [[i128; 2]; 2]) -> Self {
        debug_assert_eq!(
            entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0],
            1
        );
        SlopeMap { entries }
    }

    pub fn entries(&self) -> [[i128; 2]; 2] {
        self.entries
    }

    pub fn compose(&self, rhs: &SlopeMap) -> SlopeMap {
        let a = &self.entries;
        let b = &rhs.entries;
        let e = |i: usize, j: usize| {
            a[i][0]
                .checked_mul(b[0][j])
                .and_then(|x| a[i][1].checked_mul(b[1][j]).and_then(|y| x.checked_add(y)))
                .expect("marking matrix overflow")
        };
        SlopeMap {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn inverse(&self) -> SlopeMap {
        let [[a, b], [c, d]] = self.entries;
        SlopeMap {
            entries: [[d, -b], [-c, a]],
        }
    }

    pub fn apply(&self, s: Slope) -> Slope {
        let [[a, b], [c, d]] = self.entries;
        let (r, t) = (s.p as i128, s.q as i128);
        Slope::from_i128(a * r + b * t, c * r + d * t)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::{mobius_apply, H2Point};
    use num_bigint::BigInt;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(s(-1, 0), s(1, 0));
        assert_eq!(s(-2, -3), s(2, 3));
        assert_eq!(s(2, -3), s(-2, 3));
        assert_eq!(s(0, -1), Slope::VERTICAL);
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 0).is_err());
        assert!(Slope::new(0, 2).is_err());
    }

    #[test]
    fn parse_and_display() {
        let x: Slope = "slope(-3/5)".parse().unwrap();
        assert_eq!(x, s(-3, 5));
        assert_eq!(x.to_string(), "slope(-3/5)");
        assert_eq!("3/-5".parse::<Slope>().unwrap(), s(-3, 5));
        assert!("slope(2/4)".parse::<Slope>().is_err());
        assert!("slope(x/4)".parse::<Slope>().is_err());
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(s(1, 0), s(0, 1)), 1);
        assert_eq!(intersection_number(s(1, 2), s(3, 4)), 2);
        assert_eq!(intersection_number(s(5, 3), s(5, 3)), 0);
    }

    #[test]
    fn twist_matrix_examples() {
        let m = twist_matrix(TwistSpec::new(s(1, 0), 1).unwrap());
        assert_eq!(m, IntMatrix2::from_i64(1, 1, 0, 1).unwrap());
        let m = twist_matrix(TwistSpec::new(s(0, 1), 1).unwrap());
        assert_eq!(m, IntMatrix2::from_i64(1, 0, -1, 1).unwrap());
        for (p, q, a) in [(3, 7, 5), (-2, 9, -4), (1, 0, 13)] {
            let m = twist_matrix(TwistSpec::new(s(p, q), a).unwrap());
            assert_eq!(m.trace(), BigInt::from(2));
            assert_eq!(m.det(), BigInt::from(1));
        }
    }

    #[test]
    fn twist_on_slope_examples() {
        let t1 = TwistSpec::new(s(1, 0), 1).unwrap();
        assert_eq!(twist_on_slope(t1, s(0, 1)), s(1, 1));
        let t3 = TwistSpec::new(s(1, 0), 3).unwrap();
        assert_eq!(twist_on_slope(t3, s(0, 1)), s(3, 1));
        let t = TwistSpec::new(s(-4, 7), -6).unwrap();
        assert_eq!(twist_on_slope(t, s(-4, 7)), s(-4, 7));
    }

    #[test]
    fn twist_agrees_with_boundary_action() {
        // p/q ↦ M(p/q) on ∂ℍ², via the Möbius map on a point tending to p/q.
        let t = TwistSpec::new(s(2, 3), 2).unwrap();
        let target = s(1, 4);
        let image = twist_on_slope(t, target);
        let m = twist_matrix(t);
        let z = mobius_apply(&m, H2Point::new(0.25, 1e-9).unwrap());
        assert!((z.re() - image.p() as f64 / image.q() as f64).abs() < 1e-6);
    }

    #[test]
    fn zero_power_rejected() {
        assert!(TwistSpec::new(s(1, 0), 0).is_err());
    }

    #[test]
    fn slope_map_inverse() {
        let m = TwistSpec::new(s(3, 5), 7).unwrap().homology_map();
        assert!(m.compose(&m.inverse()).is_identity());
        assert_eq!(m.inverse().apply(m.apply(s(-2, 9))), s(-2, 9));
    }
}

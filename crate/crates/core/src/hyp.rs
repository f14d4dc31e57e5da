//! Upper half-plane numerics: Möbius action of SL(2,ℤ), hyperbolic and
//! Teichmüller distance on ℍ², and the collar width function.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point `re + i·im` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2Point {
    re: f64,
    im: f64,
}

impl H2Point {
    pub const I: H2Point = H2Point { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite() && im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { re, im });
        }
        Ok(Self { re, im })
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }
}

impl fmt::Display for H2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}{:+.17e}i", self.re, self.im)
    }
}

/// Integer 2×2 matrix of determinant one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::BadDeterminant(det.to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    // Product of two det-1 matrices has det 1; no recheck.
    pub fn mul(&self, rhs: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn inverse(&self) -> IntMatrix2 {
        IntMatrix2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }
}

/// `(a z + b)/(c z + d)`.
pub fn mobius_apply(m: &IntMatrix2, z: H2Point) -> H2Point {
    let [a, b, c, d] = m.to_f64();
    mobius_apply_f64(a, b, c, d, z)
}

pub(crate) fn mobius_apply_f64(a: f64, b: f64, c: f64, d: f64, z: H2Point) -> H2Point {
    // (az+b)(c z̄+d) / |cz+d|²
    let (x, y) = (z.re, z.im);
    let dr = c * x + d;
    let di = c * y;
    let den = dr * dr + di * di;
    let nr = a * x + b;
    let ni = a * y;
    let re = (nr * dr + ni * di) / den;
    let im = y / den;
    H2Point { re, im }
}

/// Hyperbolic distance in the curvature −1 metric `|dz|/im z`.
pub fn hyp_distance(z: H2Point, w: H2Point) -> f64 {
    // sinh(d/2) = |z − w| / (2√(im z · im w)); avoids acosh(1 + tiny).
    let dx = z.re - w.re;
    let dy = z.im - w.im;
    let chord = dx.hypot(dy);
    2.0 * (chord / (2.0 * (z.im * w.im).sqrt())).asinh()
}

/// Ratio between Teichmüller distance on T₁,₁ ≅ ℍ² and [`hyp_distance`].
///
/// The default ½ corresponds to the curvature −4 normalization. Experiments
/// can rerun with [`Normalization::Hyperbolic`] to compare.
pub const TEICH_SCALE: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `d_T = ½ d_ℍ²`.
    #[default]
    HalfHyperbolic,
    /// `d_T = d_ℍ²`.
    Hyperbolic,
}

impl Normalization {
    pub fn scale(self) -> f64 {
        match self {
            Normalization::HalfHyperbolic => TEICH_SCALE,
            Normalization::Hyperbolic => 1.0,
        }
    }
}

pub fn teich_distance_h2(z: H2Point, w: H2Point) -> f64 {
    TEICH_SCALE * hyp_distance(z, w)
}

/// Width of the embedded collar around a simple closed geodesic of length
/// `len`: `arcsinh(1 / sinh(len/2))`.
pub fn collar_width(len: f64) -> Result<f64> {
    if !(len > 0.0) {
        return Err(Error::NonPositiveLength(len));
    }
    Ok((1.0 / (0.5 * len).sinh()).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(re: f64, im: f64) -> H2Point {
        H2Point::new(re, im).unwrap()
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(H2Point::new(0.0, 0.0).is_err());
        assert!(H2Point::new(0.0, -1.0).is_err());
        assert!(H2Point::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(IntMatrix2::from_i64(1, 1, 1, 1).is_err());
        assert!(IntMatrix2::from_i64(2, 1, 1, 1).is_ok());
    }

    #[test]
    fn mobius_examples() {
        let t = IntMatrix2::from_i64(1, 1, 0, 1).unwrap();
        let z = mobius_apply(&t, H2Point::I);
        assert_relative_eq!(z.re(), 1.0);
        assert_relative_eq!(z.im(), 1.0);

        let w = p(0.3, 1.7);
        assert_eq!(mobius_apply(&IntMatrix2::identity(), w), w);

        let s = IntMatrix2::from_i64(0, -1, 1, 0).unwrap();
        let z = mobius_apply(&s, p(0.0, 2.0));
        assert!(z.re().abs() < 1e-15);
        assert_relative_eq!(z.im(), 0.5);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_distance(H2Point::I, H2Point::I), 0.0);
        assert_relative_eq!(hyp_distance(H2Point::I, p(0.0, 2.0)), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(
            hyp_distance(H2Point::I, p(1.0, 1.0)),
            1.5f64.acosh(),
            epsilon = 1e-15
        );
        assert_relative_eq!(hyp_distance(H2Point::I, p(1.0, 1.0)), 0.962424, epsilon = 1e-6);
    }

    #[test]
    fn teich_examples() {
        assert_relative_eq!(
            teich_distance_h2(H2Point::I, p(0.0, 2.0)),
            0.346574,
            epsilon = 1e-6
        );
        assert_relative_eq!(teich_distance_h2(H2Point::I, p(1.0, 1.0)), 0.481212, epsilon = 1e-6);
        let z = p(-2.5, 0.01);
        assert_eq!(teich_distance_h2(z, z), 0.0);
    }

    #[test]
    fn nearby_points_keep_precision() {
        let z = p(0.0, 1.0);
        let w = p(1e-9, 1.0);
        assert_relative_eq!(hyp_distance(z, w), 1e-9, max_relative = 1e-12);
    }

    #[test]
    fn collar_examples() {
        let len = 2.0 * 1.5f64.acosh();
        assert_relative_eq!(len, 1.924847, epsilon = 1e-6);
        let w = collar_width(len).unwrap();
        assert_relative_eq!(w, (1.0 / 1.25f64.sqrt()).asinh(), epsilon = 1e-15);
        assert_relative_eq!(w, 0.804719, epsilon = 1e-6);
        assert!(collar_width(20.0).unwrap() < 1e-4);
        assert!(collar_width(1.0).unwrap() > collar_width(1.1).unwrap());
        assert!(collar_width(0.0).is_err());
        assert!(collar_width(-1.0).is_err());
    }

    #[test]
    fn matrix_algebra() {
        let a = IntMatrix2::from_i64(2, 3, 1, 2).unwrap();
        assert_eq!(a.mul(&a.inverse()), IntMatrix2::identity());
        assert_eq!(a.trace(), BigInt::from(4));
        assert!(a.mul(&a).det().is_one());
    }
}

//! Extended-precision lengths, used to settle inequalities whose slack is
//! below double-precision resolution.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use super::markoff::MarkoffStructure;
use super::slope::Slope;
use super::trace::{BaseTraces, FrickeTrace};

const RM: RoundingMode = RoundingMode::ToEven;

/// Precisions tried in turn, in bits.
pub const PRECISION_LADDER: [usize; 4] = [128, 512, 2048, 8192];

#[derive(Clone, Debug)]
struct Prec {
    v: BigFloat,
    bits: usize,
}

impl FrickeTrace for Prec {
    fn fricke(tu: &Self, tv: &Self, tdiff: &Self) -> Self {
        let b = tu.bits;
        Prec {
            v: tu.v.mul(&tv.v, b, RM).sub(&tdiff.v, b, RM),
            bits: b,
        }
    }
}

fn num(v: f64, bits: usize) -> BigFloat {
    BigFloat::from_f64(v, bits)
}

/// Root traces at `bits` precision. `x` and `y` are taken as given; `z` is
/// recomputed as the root of `z² − xyz + x² + y² = 0` nearest the given one.
fn root_traces(x: &MarkoffStructure, bits: usize) -> Option<BaseTraces<Prec>> {
    let [fx, fy, fz] = x.root_input();
    let (bx, by) = (num(fx, bits), num(fy, bits));
    let xy = bx.mul(&by, bits, RM);
    let disc = xy
        .mul(&xy, bits, RM)
        .sub(&bx.mul(&bx, bits, RM).add(&by.mul(&by, bits, RM), bits, RM).mul(&num(4.0, bits), bits, RM), bits, RM);
    if disc.is_negative() {
        return None;
    }
    let root = disc.sqrt(bits, RM);
    let half = num(0.5, bits);
    let big = xy.add(&root, bits, RM).mul(&half, bits, RM);
    let small = xy.sub(&root, bits, RM).mul(&half, bits, RM);
    let fxy = fx * fy;
    let disc_f = (fxy * fxy - 4.0 * (fx * fx + fy * fy)).max(0.0).sqrt();
    let bz = if (fz - 0.5 * (fxy + disc_f)).abs() <= (fz - 0.5 * (fxy - disc_f)).abs() {
        big
    } else {
        small
    };
    let p = |v| Prec { v, bits };
    Some(BaseTraces {
        x: p(bx),
        y: p(by),
        z: p(bz),
    })
}

/// `2·arccosh(t/2)`.
fn length(t: &BigFloat, bits: usize, cc: &mut Consts) -> BigFloat {
    t.mul(&num(0.5, bits), bits, RM)
        .acosh(bits, RM, cc)
        .mul(&num(2.0, bits), bits, RM)
}

/// `Σ c_k·ℓ(s_k) + constant` evaluated at `bits` precision, together with
/// the scale `Σ |c_k|·ℓ(s_k) + |constant|` that bounds its rounding error.
pub fn length_combination_at(
    x: &MarkoffStructure,
    terms: &[(Slope, i128)],
    constant: f64,
    bits: usize,
) -> Option<(BigFloat, BigFloat)> {
    let mut cc = Consts::new().ok()?;
    let base = root_traces(x, bits)?;
    let mut acc = num(constant, bits);
    let mut scale = num(constant.abs(), bits);
    for &(s, c) in terms {
        let t = base.trace(x.marking().apply(s));
        let l = length(&t.v, bits, &mut cc);
        let cb = BigFloat::from_i128(c, bits);
        acc = acc.add(&l.mul(&cb, bits, RM), bits, RM);
        scale = scale.add(&l.mul(&cb.abs(), bits, RM), bits, RM);
    }
    Some((acc, scale))
}

/// Settles the sign of `Σ c_k·ℓ(s_k) + constant` by climbing the precision
/// ladder until the value clears its rounding error. Returns the value
/// rounded to `f64`, or `None` when the structure has no exact completion.
pub fn length_combination(x: &MarkoffStructure, terms: &[(Slope, i128)], constant: f64) -> Option<f64> {
    let mut last = 0.0;
    for bits in PRECISION_LADDER {
        let (v, scale) = length_combination_at(x, terms, constant, bits)?;
        last = to_f64(&v);
        // rounding error stays far below scale·2^(64 − bits)
        let tol = scale.mul(&num(2f64.powi(64 - bits as i32), bits), bits, RM);
        if v.abs().cmp(&tol).is_some_and(|c| c > 0) {
            return Some(last);
        }
    }
    Some(last)
}

fn to_f64(v: &BigFloat) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    v.format(Radix::Dec, RM, &mut cc)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn agrees_with_double_precision() {
        let x = MarkoffStructure::from_xy(3.7, 5.1, 0.3).unwrap();
        let s = Slope::new(13, 8).unwrap();
        let v = length_combination(&x, &[(s, 1)], 0.0).unwrap();
        assert_relative_eq!(v, x.length(s), max_relative = 1e-13);
        let v = length_combination(&x, &[(s, 2), (Slope::VERTICAL, -1)], -1.5).unwrap();
        assert_relative_eq!(v, 2.0 * x.length(s) - x.length(Slope::VERTICAL) - 1.5, max_relative = 1e-13);
    }

    #[test]
    fn resolves_tiny_positive_gap() {
        // ℓ(τ) + |a|·ℓ(α) − ℓ(T_α^{-a} τ) is about 1.4e-17 here, far below
        // the rounding error of the double-precision lengths.
        let x = MarkoffStructure::from_xy(6.3207155364179703, 7.8505364986022137, 0.3).unwrap();
        let alpha = Slope::new(4, 1).unwrap();
        let tau = Slope::new(5, 1).unwrap();
        let tw = Slope::new(25, 6).unwrap();
        let v = length_combination(&x, &[(tau, 1), (alpha, 5), (tw, -1)], 0.0).unwrap();
        assert!(v > 1.0e-17 && v < 2.0e-17, "{v}");
    }

    #[test]
    fn exact_zero_is_reported_small() {
        let x = MarkoffStructure::modular();
        let v = length_combination(&x, &[(Slope::HORIZONTAL, 1), (Slope::VERTICAL, -1)], 0.0).unwrap();
        assert!(v.abs() < 1e-300);
    }
}

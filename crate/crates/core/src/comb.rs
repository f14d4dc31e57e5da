//! Combinatorics of integral multicurve coefficients: the sign taxonomy,
//! the Cauchy–Schwarz bounding relation, counts of (balanced) compositions
//! and the harmonic-sum bookkeeping behind the `R·e^{kR}` lower bound.

use std::fmt;
use std::io::Write;

use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `h = 6g − 6 + 2n` of the surface the coefficients live on; 12 is the
/// closed genus-two surface.
pub const DEFAULT_H: u32 = 12;

/// Coefficients `a_1..a_k` of a multicurve `Σ a_i γ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoefficientVector {
    coeffs: Vec<i64>,
}

impl CoefficientVector {
    /// Requires nonzero entries and `1 ≤ k ≤ h/2`.
    pub fn new(coeffs: Vec<i64>, h: u32) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > (h / 2) as usize {
            return Err(Error::InvalidArgument(format!(
                "{} components, need 1..={}",
                coeffs.len(),
                h / 2
            )));
        }
        if coeffs.contains(&0) {
            return Err(Error::InvalidArgument("coefficients must be nonzero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_α = Σ|a_i|`.
    pub fn weight(&self) -> u64 {
        self.coeffs.iter().map(|a| a.unsigned_abs()).sum()
    }

    fn abs(&self) -> impl Iterator<Item = i128> + '_ {
        self.coeffs.iter().map(|a| a.unsigned_abs() as i128)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientClass {
    Single,
    Positive,
    Negative,
    /// Both signs, every `|a_i| ≥ 2`.
    MixedAllAtLeastTwo,
    MixedOther,
}

impl CoefficientClass {
    /// Membership in `ML*(ℤ)`.
    pub fn admissible(self) -> bool {
        self != CoefficientClass::MixedOther
    }
}

impl fmt::Display for CoefficientClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoefficientClass::Single => "single",
            CoefficientClass::Positive => "positive",
            CoefficientClass::Negative => "negative",
            CoefficientClass::MixedAllAtLeastTwo => "mixed-sign-all-ge2",
            CoefficientClass::MixedOther => "mixed-sign-other",
        })
    }
}

pub fn classify(v: &CoefficientVector) -> CoefficientClass {
    let c = v.coeffs();
    if c.len() == 1 {
        CoefficientClass::Single
    } else if c.iter().all(|&a| a > 0) {
        CoefficientClass::Positive
    } else if c.iter().all(|&a| a < 0) {
        CoefficientClass::Negative
    } else if c.iter().all(|a| a.unsigned_abs() >= 2) {
        CoefficientClass::MixedAllAtLeastTwo
    } else {
        CoefficientClass::MixedOther
    }
}

fn check_arity(v: &CoefficientVector, n: usize) -> Result<()> {
    if v.k() != n {
        return Err(Error::InvalidArgument(format!("{} coefficients but {} lengths", v.k(), n)));
    }
    Ok(())
}

/// `c_α·Σ|a_i|ℓ_i² − (Σ|a_i|ℓ_i)²`, nonnegative by Cauchy–Schwarz.
pub fn schwartz_relation(v: &CoefficientVector, lengths: &[f64]) -> Result<f64> {
    check_arity(v, lengths.len())?;
    if let Some(&l) = lengths.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::NonPositiveLength(l));
    }
    let (lin, sq) = v.abs().zip(lengths).fold((0.0, 0.0), |(lin, sq), (a, &l)| {
        (lin + a as f64 * l, sq + a as f64 * l * l)
    });
    Ok(v.weight() as f64 * sq - lin * lin)
}

/// [`schwartz_relation`] on integer lengths, exactly. Rational lengths
/// reduce to this by clearing denominators, the slack being homogeneous.
pub fn schwartz_relation_exact(v: &CoefficientVector, lengths: &[i64]) -> Result<i128> {
    check_arity(v, lengths.len())?;
    if let Some(&l) = lengths.iter().find(|&&l| l <= 0) {
        return Err(Error::NonPositiveLength(l as f64));
    }
    let (lin, sq) = v.abs().zip(lengths).fold((0i128, 0i128), |(lin, sq), (a, &l)| {
        let l = l as i128;
        (lin + a * l, sq + a * l * l)
    });
    Ok(v.weight() as i128 * sq - lin * lin)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchwartzSweep {
    pub samples: u64,
    /// Negative slack.
    pub violations: u64,
    /// Zero slack with unequal lengths, or positive slack with equal ones.
    pub equality_mismatches: u64,
    pub equalities: u64,
}

impl SchwartzSweep {
    fn merge(self, o: Self) -> Self {
        Self {
            samples: self.samples + o.samples,
            violations: self.violations + o.violations,
            equality_mismatches: self.equality_mismatches + o.equality_mismatches,
            equalities: self.equalities + o.equalities,
        }
    }
}

/// Random exact instances with `k ≤ h/2`, `|a_i| ≤ 20` and integer lengths;
/// half the draws use lengths in `1..=3` so that equality cases occur.
pub fn sweep_schwartz(samples: u64, seed: u64, h: u32) -> SchwartzSweep {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let k = rng.gen_range(1..=(h / 2).max(1) as usize);
            let coeffs: Vec<i64> = (0..k)
                .map(|_| rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let hi = if rng.gen_bool(0.5) { 3 } else { 1_000_000 };
            let lengths: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=hi)).collect();
            let v = CoefficientVector::new(coeffs, h).expect("valid draw");
            let slack = schwartz_relation_exact(&v, &lengths).expect("matching arity");
            let equal = lengths.iter().all(|&l| l == lengths[0]);
            SchwartzSweep {
                samples: 1,
                violations: u64::from(slack < 0),
                equality_mismatches: u64::from((slack == 0) != equal),
                equalities: u64::from(slack == 0),
            }
        })
        .reduce(SchwartzSweep::default, SchwartzSweep::merge)
}

/// Ordered compositions of `s` into `k` positive parts: `C(s−1, k−1)`.
pub fn count_compositions(s: u64, k: u64) -> u128 {
    if k == 0 || s < k {
        return 0;
    }
    binomial((s - 1) as u128, (k - 1) as u128)
}

/// Compositions of `s` into `k` parts, each `≥ l`:
/// `C(s − k(l−1) − 1, k − 1)` when `s ≥ kl`.
pub fn count_balanced(s: u64, k: u64, l: u64) -> u128 {
    let l = l.max(1);
    match k.checked_mul(l) {
        Some(kl) if k > 0 && s >= kl => binomial((s - k * (l - 1) - 1) as u128, (k - 1) as u128),
        _ => 0,
    }
}

/// `C(s−1, k−1) ≥ s^{k−1} / (2^{k−1}(k−1)!)`, compared in integers.
pub fn composition_lower_bound_holds(s: u64, k: u64) -> bool {
    if k == 0 || s < k {
        return false;
    }
    let lhs = count_compositions(s, k) * (1u128 << (k - 1)) * factorial(k - 1);
    lhs >= (s as u128).pow((k - 1) as u32)
}

/// `s^{k−1} / (2^{k−1}(k−1)!)`.
pub fn composition_lower_bound(s: u64, k: u64) -> f64 {
    (s as f64).powi(k as i32 - 1) / ((1u128 << (k - 1)) as f64 * factorial(k - 1) as f64)
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// `(s, k)` with `s < 2(k−1)` for which the composition bound fails.
pub fn composition_bound_failures(k_max: u64) -> Vec<(u64, u64)> {
    (1..=k_max)
        .flat_map(|k| (k..2 * (k - 1)).map(move |s| (s, k)))
        .filter(|&(s, k)| !composition_lower_bound_holds(s, k))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceThreshold {
    pub k: u64,
    pub t: u64,
    pub s_max: u64,
    /// Same `t` found with the range doubled.
    pub stable: bool,
}

fn threshold_on(k: u64, fraction: f64, s_max: u64) -> u64 {
    let lo = (2 * k.saturating_sub(1)).max(k);
    (1..)
        .find(|&t| {
            (lo..=s_max).all(|s| {
                let l = s.div_ceil(t);
                count_balanced(s, k, l) as f64 >= fraction * count_compositions(s, k) as f64
            })
        })
        .expect("t = s_max always qualifies")
}

/// Smallest `t` with `#[s, k, ⌈s/t⌉] ≥ fraction·#[s, k]` for every
/// `s ∈ [2(k−1), s_max]`, plus whether doubling `s_max` changes it.
pub fn find_balance_threshold(k: u64, fraction: f64, s_max: u64) -> Result<BalanceThreshold> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("fraction {fraction} outside (0, 1)")));
    }
    let t = threshold_on(k, fraction, s_max);
    Ok(BalanceThreshold {
        k,
        t,
        s_max,
        stable: threshold_on(k, fraction, 2 * s_max) == t,
    })
}

/// The three relations between `γ = Σ a_i γ_i` and `γ̲ = Σ γ_i` for a
/// balanced vector, evaluated in integers:
/// `ℓ(γ)² ≥ (s/t)·Σ|a_i|ℓ_i²`, `(s/t)·ℓ(γ̲) ≤ ℓ(γ)` and `ℓ(γ) ≤ s·ℓ(γ̲)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedRelations {
    pub balanced: bool,
    pub square: bool,
    pub lower: bool,
    pub upper: bool,
}

impl BalancedRelations {
    pub fn all(&self) -> bool {
        self.square && self.lower && self.upper
    }
}

pub fn balanced_relations(v: &CoefficientVector, lengths: &[i64], t: u64) -> Result<BalancedRelations> {
    check_arity(v, lengths.len())?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let s = v.weight() as i128;
    let t = t as i128;
    let l_gamma: i128 = v.abs().zip(lengths).map(|(a, &l)| a * l as i128).sum();
    let l_under: i128 = lengths.iter().map(|&l| l as i128).sum();
    let sq: i128 = v.abs().zip(lengths).map(|(a, &l)| a * (l as i128) * (l as i128)).sum();
    Ok(BalancedRelations {
        balanced: v.abs().all(|a| a * t >= s),
        square: t * l_gamma * l_gamma >= s * sq,
        lower: s * l_under <= t * l_gamma,
        upper: l_gamma <= s * l_under,
    })
}

/// `Σ_{s=1}^{n} 1/s` with an absolute error bound. Sums directly up to
/// `10⁶` terms, beyond which the Euler–Maclaurin expansion is used.
pub fn harmonic(n: u64) -> (f64, f64) {
    const DIRECT: u64 = 1_000_000;
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if n <= DIRECT {
        let v: f64 = (1..=n).rev().map(|s| 1.0 / s as f64).sum();
        return (v, n as f64 * f64::EPSILON);
    }
    let x = n as f64;
    let x2 = x * x;
    let v = x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2);
    (v, 1.0 / (252.0 * x2 * x2 * x2) + 8.0 * f64::EPSILON * v)
}

/// `Σ_{s=a}^{b} 1/s` and its error bound; zero when `b < a`.
pub fn harmonic_range(a: u64, b: u64) -> (f64, f64) {
    let a = a.max(1);
    if b < a {
        return (0.0, 0.0);
    }
    let (hb, eb) = harmonic(b);
    let (ha, ea) = harmonic(a - 1);
    (hb - ha, eb + ea)
}

/// Radius beyond which `Σ_{s=h−2}^{e^{R−H}/c} 1/s ≥ R/2`:
/// `2(H + log c + log(h−2))`, the lower summation index taken as at least 1.
pub fn harmonic_threshold(h: u32, big_h: f64, c: f64) -> f64 {
    let start = (h.saturating_sub(2)).max(1) as f64;
    2.0 * (big_h + c.ln() + start.ln())
}

/// `f(γ̲) = n / (2^{k+1}(k−1)!·t^k)`.
pub fn lower_bound_prefactor(n: f64, k: u64, t: u64) -> f64 {
    let den = (1u128 << (k + 1)) * factorial(k - 1) * (t as u128).pow(k as u32);
    n / den as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub r: f64,
    /// Upper summation index `⌊e^{R−H}/c⌋`.
    pub s_top: u64,
    pub harmonic: f64,
    pub harmonic_err: f64,
    /// Whether `R` is past [`harmonic_threshold`].
    pub past_threshold: bool,
    /// `Σ 1/s ≥ R/2` after subtracting the error bound.
    pub half_r_holds: bool,
    /// `n e^{k(R−H)} / (2^k (k−1)! t^k) · Σ 1/s`.
    pub summed_bound: f64,
    /// `f(γ̲)·R·e^{k(R−H)}`.
    pub closed_form: f64,
}

/// Parameters of the lower-bound summation: `h = 2k`, cut `c = t·r²`,
/// synthetic asymptotic constant `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerParams {
    pub k: u64,
    pub big_h: f64,
    pub t: u64,
    pub r: f64,
    pub n: f64,
}

impl LedgerParams {
    pub fn cut(&self) -> f64 {
        self.t as f64 * self.r * self.r
    }
}

pub fn lower_bound_ledger(p: &LedgerParams, radii: &[f64]) -> Result<Vec<LedgerRow>> {
    if p.k == 0 || p.t == 0 || !(p.r > 0.0) {
        return Err(Error::InvalidArgument("k, t and r must be positive".into()));
    }
    let h = 2 * p.k as u32;
    let start = (h.saturating_sub(2)).max(1) as u64;
    let threshold = harmonic_threshold(h, p.big_h, p.cut());
    let f = lower_bound_prefactor(p.n, p.k, p.t);
    Ok(radii
        .iter()
        .map(|&r| {
            let top = ((r - p.big_h).exp() / p.cut()).floor();
            let s_top = if top >= 1.0 { top as u64 } else { 0 };
            let (sum, err) = harmonic_range(start, s_top);
            let growth = (p.k as f64 * (r - p.big_h)).exp();
            LedgerRow {
                r,
                s_top,
                harmonic: sum,
                harmonic_err: err,
                past_threshold: r >= threshold,
                half_r_holds: sum - err >= r / 2.0,
                summed_bound: 2.0 * f * growth * sum,
                closed_form: f * r * growth,
            }
        })
        .collect())
}

/// Audit rows `s,k,l,count,bound` for `k ≤ k_max`, `s ≤ s_max`, with
/// `l = 1` (bound `s^{k−1}/(2^{k−1}(k−1)!)`) and `l = ⌈s/t⌉` (half of it).
pub fn write_audit_csv<W: Write>(mut w: W, s_max: u64, k_max: u64, t: u64) -> std::io::Result<()> {
    writeln!(w, "s,k,l,count,bound")?;
    for k in 1..=k_max {
        for s in k..=s_max {
            let b = composition_lower_bound(s, k);
            writeln!(w, "{s},{k},1,{},{b}", count_compositions(s, k))?;
            let l = s.div_ceil(t.max(1));
            if l > 1 {
                writeln!(w, "{s},{k},{l},{},{}", count_balanced(s, k, l), 0.5 * b)?;
            }
        }
    }
    Ok(())
}

/// Enumerative counterparts of the closed forms, sharing no code with them.
pub mod brute {
    /// Every ordered `k`-tuple of integers `≥ l` summing to `s`.
    pub fn compositions(s: u64, k: u64, l: u64) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k as usize);
        fill(s, k, l.max(1), &mut cur, &mut out);
        out
    }

    fn fill(rest: u64, k: u64, l: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in l..=rest {
            cur.push(part);
            fill(rest - part, k - 1, l, cur, out);
            cur.pop();
        }
    }

    /// Number of compositions, counted one at a time without storing them.
    pub fn count(s: u64, k: u64, l: u64) -> u128 {
        fn go(rest: u64, k: u64, l: u64) -> u128 {
            if k == 0 {
                return u128::from(rest == 0);
            }
            (l..=rest).map(|part| go(rest - part, k - 1, l)).sum()
        }
        go(s, k, l.max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> CoefficientVector {
        CoefficientVector::new(c.to_vec(), DEFAULT_H).unwrap()
    }

    #[test]
    fn taxonomy_examples() {
        assert_eq!(classify(&v(&[5])), CoefficientClass::Single);
        assert_eq!(classify(&v(&[1, -1])), CoefficientClass::MixedOther);
        assert!(!classify(&v(&[1, -1])).admissible());
        assert_eq!(classify(&v(&[2, -3, 4])), CoefficientClass::MixedAllAtLeastTwo);
        assert_eq!(classify(&v(&[-1, -4])), CoefficientClass::Negative);
    }

    #[test]
    fn vector_shape_is_checked() {
        assert!(CoefficientVector::new(vec![], 12).is_err());
        assert!(CoefficientVector::new(vec![1, 0], 12).is_err());
        assert!(CoefficientVector::new(vec![1; 7], 12).is_err());
        assert!(CoefficientVector::new(vec![1; 6], 12).is_ok());
    }

    #[test]
    fn schwartz_examples() {
        assert_eq!(schwartz_relation_exact(&v(&[1, 2]), &[1, 1]).unwrap(), 0);
        assert_eq!(schwartz_relation_exact(&v(&[1, 1]), &[1, 2]).unwrap(), 1);
        assert!((schwartz_relation(&v(&[1, 1]), &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(schwartz_relation(&v(&[1]), &[0.0]).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(count_compositions(5, 3), 6);
        assert_eq!(count_compositions(9, 1), 1);
        assert_eq!(count_compositions(2, 3), 0);
        assert_eq!(count_balanced(5, 3, 1), 6);
        assert_eq!(count_balanced(6, 3, 2), 1);
        assert_eq!(count_balanced(5, 3, 2), 0);
        assert!(count_compositions(5, 3) as f64 >= composition_lower_bound(5, 3));
    }

    #[test]
    fn thresholds_for_small_k() {
        assert_eq!(find_balance_threshold(1, 0.5, 200).unwrap().t, 1);
        let b = find_balance_threshold(2, 0.5, 200).unwrap();
        assert_eq!(b.t, 4);
        assert!(b.stable);
    }

    #[test]
    fn harmonic_tracks_log() {
        for r in [3.0f64, 5.0, 10.0, 16.0] {
            let (h, e) = harmonic(r.exp().floor() as u64);
            assert!((h - r).abs() < 1.0);
            assert!(e < 1e-6);
        }
        let (direct, _) = harmonic(1_000_000);
        let x = 1e6f64;
        let em = x.ln() + 0.577_215_664_901_532_9 + 0.5 / x - 1.0 / (12.0 * x * x);
        assert!((direct - em).abs() < 1e-9);
    }

    #[test]
    fn prefactor_example() {
        assert_eq!(lower_bound_prefactor(1.0, 3, 6), 1.0 / 6912.0);
    }

    #[test]
    fn threshold_with_unsquared_radius_is_too_small() {
        // cut e^{R−H}/(t r²) with r = 2 needs log(t r²), not log(t r)
        let p = LedgerParams {
            k: 6,
            big_h: 0.0,
            t: 6,
            r: 2.0,
            n: 1.0,
        };
        let weak = 2.0 * ((6.0f64 * 2.0).ln() + 10f64.ln());
        let rows = lower_bound_ledger(&p, &[weak + 0.1]).unwrap();
        assert!(!rows[0].half_r_holds);
        let strong = harmonic_threshold(12, 0.0, p.cut());
        assert!(lower_bound_ledger(&p, &[strong]).unwrap()[0].half_r_holds);
    }

    #[test]
    fn brute_force_lists_compositions() {
        assert_eq!(brute::compositions(4, 2, 1), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(brute::count(6, 3, 2), 1);
    }
}

//! Checkers for the twist inequalities: the intersection formula, upper and
//! lower bounds on twisted lengths, and the coarse distance formula.
//!
//! Every sweep derives sample `i` from its own ChaCha stream, so results do
//! not depend on thread scheduling and a sweep of `2n` samples extends the
//! sweep of `n`.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::extremal_proxy;
use crate::hyp::{collar_width, mobius_apply_f64, teich_distance_h2, H2Point};
use crate::stats::least_squares;
use crate::torus::markoff::{distance_formula_with, ShortMarking};
use crate::torus::{
    intersection_number, short_marking, twist_on_slope, twist_on_structure, twisted_length, MarkoffStructure, Slope,
    TwistSpec,
};
use crate::Result;

/// Aggregated outcome of an inequality sweep. Slack is `bound − actual`
/// oriented so that nonnegative means satisfied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub params: BTreeMap<String, f64>,
    pub samples: u64,
    pub violations: u64,
    pub min_slack: f64,
    pub max_slack: f64,
    pub fitted_constants: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(theorem_id: &str) -> Self {
        Self {
            theorem_id: theorem_id.to_string(),
            params: BTreeMap::new(),
            samples: 0,
            violations: 0,
            min_slack: f64::INFINITY,
            max_slack: f64::NEG_INFINITY,
            fitted_constants: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn with_slacks(mut self, t: SlackTally) -> Self {
        self.samples = t.samples;
        self.violations = t.violations;
        self.min_slack = t.min;
        self.max_slack = t.max;
        self
    }

    pub fn param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    /// Records a fitted constant; non-finite values are left out.
    pub fn fitted(mut self, k: &str, v: f64) -> Self {
        if v.is_finite() {
            self.fitted_constants.insert(k.to_string(), v);
        }
        self
    }
}

/// Order-independent reduction of slack values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlackTally {
    pub samples: u64,
    pub violations: u64,
    pub min: f64,
    pub max: f64,
}

impl SlackTally {
    pub const EMPTY: SlackTally = SlackTally {
        samples: 0,
        violations: 0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };

    pub fn one(slack: f64) -> Self {
        SlackTally {
            samples: 1,
            violations: u64::from(!(slack >= 0.0)),
            min: slack,
            max: slack,
        }
    }

    pub fn merge(self, o: SlackTally) -> Self {
        SlackTally {
            samples: self.samples + o.samples,
            violations: self.violations + o.violations,
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform canonical slope with `|p|, q ≤ bound`.
pub fn random_slope<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Slope {
    loop {
        let p = rng.gen_range(-bound..=bound);
        let q = rng.gen_range(0..=bound);
        if let Ok(s) = Slope::new(p, q) {
            return s;
        }
    }
}

fn random_power<R: Rng + ?Sized>(rng: &mut R, max_power: i64) -> i64 {
    let a = rng.gen_range(1..=max_power);
    if rng.gen_bool(0.5) {
        a
    } else {
        -a
    }
}

// ---------------------------------------------------------------------------
// Intersection formula

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionCheck {
    /// `|i(T_α^n β, γ) − |n|·i(α,β)·i(α,γ)|`.
    pub residual: u128,
    /// `i(β, γ)`.
    pub bound: u128,
}

impl IntersectionCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

pub fn check_intersection_formula(alpha: Slope, n: i64, beta: Slope, gamma: Slope) -> Result<IntersectionCheck> {
    let twisted = twist_on_slope(TwistSpec::new(alpha, n)?, beta);
    let lhs = intersection_number(twisted, gamma) as u128;
    let main = n.unsigned_abs() as u128
        * intersection_number(alpha, beta) as u128
        * intersection_number(alpha, gamma) as u128;
    Ok(IntersectionCheck {
        residual: lhs.abs_diff(main),
        bound: intersection_number(beta, gamma) as u128,
    })
}

/// The two-sided mixed-sign form with `|n| − 2`; for a single curve it is
/// implied by [`check_intersection_formula`] but is checked independently.
pub fn check_signed_intersection_formula(alpha: Slope, n: i64, beta: Slope, gamma: Slope) -> Result<bool> {
    let twisted = twist_on_slope(TwistSpec::new(alpha, n)?, beta);
    let mid = intersection_number(twisted, gamma) as i128;
    let ab_ag = (intersection_number(alpha, beta) * intersection_number(alpha, gamma)) as i128;
    let bg = intersection_number(beta, gamma) as i128;
    let a = n.unsigned_abs() as i128;
    Ok((a - 2) * ab_ag - bg <= mid && mid <= a * ab_ag + bg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSweep {
    pub samples: u64,
    pub seed: u64,
    pub slope_bound: i64,
    pub max_power: i64,
}

pub fn sweep_intersection_formula(cfg: &IntersectionSweep) -> BoundReport {
    let tally = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let alpha = random_slope(&mut rng, cfg.slope_bound);
            let beta = random_slope(&mut rng, cfg.slope_bound);
            let gamma = random_slope(&mut rng, cfg.slope_bound);
            let n = random_power(&mut rng, cfg.max_power);
            let c = check_intersection_formula(alpha, n, beta, gamma).expect("nonzero power");
            let signed = check_signed_intersection_formula(alpha, n, beta, gamma).expect("nonzero power");
            let slack = c.bound as f64 - c.residual as f64;
            let mut t = SlackTally::one(slack);
            if !signed {
                t.violations += 1;
            }
            t
        })
        .reduce(|| SlackTally::EMPTY, SlackTally::merge);
    BoundReport::new("intersection_formula")
        .with_slacks(tally)
        .param("slope_bound", cfg.slope_bound as f64)
        .param("max_power", cfg.max_power as f64)
        .param("seed", cfg.seed as f64)
}

// ---------------------------------------------------------------------------
// Twisted length bounds

/// One draw for the geometric sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoSample {
    pub x: MarkoffStructure,
    pub twist: TwistSpec,
    pub tau: Slope,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoSweep {
    pub samples: u64,
    pub seed: u64,
    pub eps: f64,
    pub trace_lo: f64,
    pub trace_hi: f64,
    pub max_power: i64,
    pub slope_bound: i64,
    /// Restrict to positive powers.
    pub positive_only: bool,
}

impl Default for GeoSweep {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 1,
            eps: crate::torus::markoff::DEFAULT_EPS,
            trace_lo: 2.2,
            trace_hi: 8.0,
            max_power: 50,
            slope_bound: 6,
            positive_only: false,
        }
    }
}

impl GeoSweep {
    pub fn sample(&self, i: u64) -> GeoSample {
        let mut rng = stream(self.seed, i);
        let x = MarkoffStructure::sample_thick(&mut rng, self.trace_lo, self.trace_hi, self.eps);
        let alpha = random_slope(&mut rng, self.slope_bound);
        let tau = random_slope(&mut rng, self.slope_bound);
        let mut a = random_power(&mut rng, self.max_power);
        if self.positive_only {
            a = a.abs();
        }
        GeoSample {
            x,
            twist: TwistSpec::new(alpha, a).expect("nonzero power"),
            tau,
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            samples: 2 * self.samples,
            ..*self
        }
    }

    fn params(&self, r: BoundReport) -> BoundReport {
        r.param("samples", self.samples as f64)
            .param("seed", self.seed as f64)
            .param("eps", self.eps)
            .param("max_power", self.max_power as f64)
            .param("slope_bound", self.slope_bound as f64)
    }
}

/// Double-precision slacks within this fraction of the bound's scale are
/// recomputed in extended precision before their sign is trusted.
pub const REFINE_BAND: f64 = 1e-9;

/// Per-sample evaluation of the additive twist-length bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistBoundSample {
    pub twisted: f64,
    pub upper: f64,
    pub lower: f64,
    /// `upper − twisted`, refined when near zero.
    pub upper_slack: f64,
    /// `twisted − lower`, refined when near zero.
    pub lower_slack: f64,
    /// Smallest `L` for which the lower bound holds on this sample
    /// (`-inf` when the curves are disjoint).
    pub l_crit: f64,
    /// Whether an extended-precision recheck was needed.
    pub refined: bool,
}

/// Upper bound `ℓ(τ) + i(τ,α)|a|ℓ(α)` and lower bound
/// `i(τ,α)·⌊(|a|−2)ℓ(α) − 2ℓ(τ) − L⌋₀` against the exact twisted length.
pub fn check_twist_length_bounds(x: &MarkoffStructure, t: TwistSpec, tau: Slope, l_const: f64) -> TwistBoundSample {
    let alpha = t.curve();
    let i_int = intersection_number(tau, alpha) as i128;
    let a_int = t.power().unsigned_abs() as i128;
    let (i, a) = (i_int as f64, a_int as f64);
    let la = x.length(alpha);
    let lt = x.length(tau);
    let pushed = twist_on_slope(t.inverse(), tau);
    let twisted = x.length(pushed);
    let d = (a - 2.0) * la - 2.0 * lt;
    let upper = lt + i * a * la;
    let lower = i * (d - l_const).max(0.0);
    let mut refined = false;
    let mut refine = |f64_slack: f64, scale: f64, terms: &[(Slope, i128)], constant: f64| {
        if f64_slack.abs() > REFINE_BAND * scale {
            return f64_slack;
        }
        refined = true;
        crate::torus::precise::length_combination(x, terms, constant).unwrap_or(f64_slack)
    };
    // disjoint curves: the pushed slope is τ itself and both slacks vanish
    let upper_slack = if i_int == 0 {
        0.0
    } else {
        refine(upper - twisted, upper, &[(tau, 1), (alpha, i_int * a_int), (pushed, -1)], 0.0)
    };
    let lower_slack = if lower == 0.0 {
        twisted
    } else {
        refine(
            twisted - lower,
            twisted + lower,
            &[(pushed, 1), (alpha, -i_int * (a_int - 2)), (tau, 2 * i_int)],
            i * l_const,
        )
    };
    TwistBoundSample {
        twisted,
        upper,
        lower,
        upper_slack,
        lower_slack,
        l_crit: if i > 0.0 { d - twisted / i } else { f64::NEG_INFINITY },
        refined,
    }
}

/// Both sides of the additive bounds over a sweep. The fitted constant
/// `L_min_emp` is the least `L ≥ 0` making the lower bound hold on every
/// sample; `L_crit` is the same supremum before clamping at zero.
pub fn sweep_twist_length_bounds(cfg: &GeoSweep, l_const: f64) -> (BoundReport, BoundReport) {
    let parts: Vec<(SlackTally, SlackTally, f64)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let s = cfg.sample(i);
            let r = check_twist_length_bounds(&s.x, s.twist, s.tau, l_const);
            (SlackTally::one(r.upper_slack), SlackTally::one(r.lower_slack), r.l_crit)
        })
        .collect();
    let (up, low, l_crit) = parts.into_iter().fold(
        (SlackTally::EMPTY, SlackTally::EMPTY, f64::NEG_INFINITY),
        |(u, l, c), (u1, l1, c1)| (u.merge(u1), l.merge(l1), c.max(c1)),
    );
    let upper = cfg.params(BoundReport::new("twist_length_upper")).with_slacks(up);
    let lower = cfg
        .params(BoundReport::new("twist_length_lower"))
        .with_slacks(low)
        .param("L_const", l_const)
        .fitted("L_crit", l_crit)
        .fitted("L_min_emp", l_crit.max(0.0));
    (upper, lower)
}

/// Per-sample ratios fixing the multiplicative constant `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeSample {
    /// `ℓ_tw / (i|a|ℓ(α) + ℓ(τ))`.
    pub upper_ratio: f64,
    /// `(i(|a|−2)ℓ(α) − ℓ(τ)) / ℓ_tw`.
    pub lower_ratio: f64,
    /// `(i|a|ℓ(α) − ℓ(τ)) / ℓ_tw`, the sharpened form for a same-sign twist.
    pub sharpened_ratio: f64,
}

impl MultiplicativeSample {
    pub fn required_a(&self) -> f64 {
        self.upper_ratio.max(self.lower_ratio).max(self.sharpened_ratio)
    }
}

pub fn check_multiplicative_bounds(x: &MarkoffStructure, t: TwistSpec, tau: Slope) -> MultiplicativeSample {
    let i = intersection_number(tau, t.curve()) as f64;
    let a = t.power().unsigned_abs() as f64;
    let la = x.length(t.curve());
    let lt = x.length(tau);
    let tw = twisted_length(x, t, tau);
    MultiplicativeSample {
        upper_ratio: tw / (i * a * la + lt),
        lower_ratio: (i * (a - 2.0) * la - lt) / tw,
        sharpened_ratio: (i * a * la - lt) / tw,
    }
}

/// `A_emp`: the least `A` making the multiplicative bounds hold over the
/// sweep. The report's slack is `A_emp − required A` per sample.
pub fn sweep_multiplicative_bounds(cfg: &GeoSweep) -> BoundReport {
    let req: Vec<f64> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let s = cfg.sample(i);
            check_multiplicative_bounds(&s.x, s.twist, s.tau).required_a()
        })
        .collect();
    let a_emp = req.iter().copied().fold(1.0, f64::max);
    let tally = req
        .iter()
        .map(|r| SlackTally::one(a_emp - r))
        .fold(SlackTally::EMPTY, SlackTally::merge);
    cfg.params(BoundReport::new("twist_length_multiplicative"))
        .with_slacks(tally)
        .param("positive_only", f64::from(u8::from(cfg.positive_only)))
        .fitted("A_emp", a_emp)
}

/// Evaluation of the collar-refined lower bound `min{ℒ₁, ℒ₂}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSample {
    pub twisted: f64,
    pub l1: f64,
    pub l2: f64,
    /// Least `L` for which `min{ℒ₁, ℒ₂} ≤ ℓ_tw` on this sample.
    pub l_crit: f64,
}

impl EffectiveSample {
    pub fn bound(&self) -> f64 {
        self.l1.min(self.l2)
    }

    pub fn slack(&self) -> f64 {
        self.twisted - self.bound()
    }
}

/// `ℒ₁ = i·⌊(|a|−2+K)ℓ(α) − 2ℓ(τ) − L⌋₀`,
/// `ℒ₂ = ⌊i − (Kℓ(α) + 4ℓ(τ))/W(τ)⌋₀ · ⌊(|a|−1−K)ℓ(α) − 2ℓ(τ) − L⌋₀`.
pub fn check_effective_lower_bound(
    x: &MarkoffStructure,
    t: TwistSpec,
    tau: Slope,
    k: f64,
    l_const: f64,
) -> Result<EffectiveSample> {
    if !(k > 0.0 && k < 1.0) {
        return Err(crate::Error::InvalidArgument(format!("K must lie in (0,1), got {k}")));
    }
    let i = intersection_number(tau, t.curve()) as f64;
    let a = t.power().unsigned_abs() as f64;
    let la = x.length(t.curve());
    let lt = x.length(tau);
    let w = collar_width(lt)?;
    let tw = twisted_length(x, t, tau);
    let d1 = (a - 2.0 + k) * la - 2.0 * lt;
    let d2 = (a - 1.0 - k) * la - 2.0 * lt;
    let c2 = (i - (k * la + 4.0 * lt) / w).max(0.0);
    let crit1 = if i > 0.0 { d1 - tw / i } else { f64::NEG_INFINITY };
    let crit2 = if c2 > 0.0 { d2 - tw / c2 } else { f64::NEG_INFINITY };
    Ok(EffectiveSample {
        twisted: tw,
        l1: i * (d1 - l_const).max(0.0),
        l2: c2 * (d2 - l_const).max(0.0),
        l_crit: crit1.min(crit2),
    })
}

pub fn sweep_effective_lower_bound(cfg: &GeoSweep, k: f64, l_const: f64) -> Result<BoundReport> {
    let parts: Vec<(SlackTally, f64)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let s = cfg.sample(i);
            check_effective_lower_bound(&s.x, s.twist, s.tau, k, l_const).map(|r| (SlackTally::one(r.slack()), r.l_crit))
        })
        .collect::<Result<_>>()?;
    let (tally, l_crit) = parts
        .into_iter()
        .fold((SlackTally::EMPTY, f64::NEG_INFINITY), |(t, c), (t1, c1)| (t.merge(t1), c.max(c1)));
    Ok(cfg
        .params(BoundReport::new("effective_lower_bound"))
        .with_slacks(tally)
        .param("K", k)
        .param("L_const", l_const)
        .fitted("L_crit", l_crit)
        .fitted("L_min_emp", l_crit.max(0.0)))
}

/// `|new − old| / max(|new|, 1)`: drift of a fitted constant under sweep
/// doubling, with an absolute floor so constants near zero do not blow up.
pub fn relative_drift(old: f64, new: f64) -> f64 {
    (new - old).abs() / new.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Coarse distance

/// `d̂(X, T X) − log(|a|·ℓ(α)²)` with `d̂` the short-marking estimate.
pub fn coarse_distance_residual(x: &MarkoffStructure, t: TwistSpec) -> Result<f64> {
    let mu = short_marking(x);
    coarse_distance_with(x, &mu, t).map(|(d, log_term)| d - log_term)
}

/// `(d̂, log(|a|ℓ(α)²))`.
pub fn coarse_distance_with(x: &MarkoffStructure, mu: &ShortMarking, t: TwistSpec) -> Result<(f64, f64)> {
    let y = twist_on_structure(x, t)?;
    let la = x.length(t.curve());
    let log_term = (t.power().unsigned_abs() as f64).ln() + 2.0 * la.ln();
    Ok((distance_formula_with(x, &y, mu), log_term))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseSweep {
    pub structures: u64,
    pub seed: u64,
    pub eps: f64,
    pub trace_lo: f64,
    pub trace_hi: f64,
    /// Powers `±2^k` for `k` in this inclusive range.
    pub log2_power: [u32; 2],
    /// Twist curves, as `(m, n)` coordinates on the short marking:
    /// `α = m·η + n·δ`.
    pub curves: Vec<[i64; 2]>,
}

impl Default for CoarseSweep {
    fn default() -> Self {
        Self {
            structures: 20,
            seed: 1,
            eps: crate::torus::markoff::DEFAULT_EPS,
            trace_lo: 2.2,
            trace_hi: 8.0,
            log2_power: [1, 14],
            curves: vec![[1, 0], [0, 1], [1, 1], [1, -1], [2, 1], [1, 2], [3, 2], [5, 3]],
        }
    }
}

/// Per-structure outcome of the coarse distance sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseBand {
    pub structure: MarkoffStructure,
    pub inf_residual: f64,
    pub sup_residual: f64,
    /// Least-squares slope of `d̂` against `log(|a|ℓ(α)²)`.
    pub slope: f64,
    pub points: Vec<(f64, f64)>,
}

impl CoarseBand {
    pub fn width(&self) -> f64 {
        self.sup_residual - self.inf_residual
    }
}

fn marking_combination(mu: &ShortMarking, m: i64, n: i64) -> Option<Slope> {
    Slope::new(m * mu.eta.p() + n * mu.delta.p(), m * mu.eta.q() + n * mu.delta.q()).ok()
}

pub fn coarse_band(x: &MarkoffStructure, cfg: &CoarseSweep) -> Result<CoarseBand> {
    let mu = short_marking(x);
    let mut points = Vec::new();
    for &[m, n] in &cfg.curves {
        let Some(alpha) = marking_combination(&mu, m, n) else { continue };
        for k in cfg.log2_power[0]..=cfg.log2_power[1] {
            for sign in [1i64, -1] {
                let t = TwistSpec::new(alpha, sign << k)?;
                let (d, log_term) = coarse_distance_with(x, &mu, t)?;
                points.push((log_term, d));
            }
        }
    }
    let res: Vec<f64> = points.iter().map(|(l, d)| d - l).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let slope = least_squares(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    Ok(CoarseBand {
        structure: x.clone(),
        inf_residual: res.iter().copied().fold(f64::INFINITY, f64::min),
        sup_residual: res.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        slope,
        points,
    })
}

pub fn sweep_coarse_distance(cfg: &CoarseSweep) -> Result<Vec<CoarseBand>> {
    (0..cfg.structures)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let x = MarkoffStructure::sample_thick(&mut rng, cfg.trace_lo, cfg.trace_hi, cfg.eps);
            coarse_band(&x, cfg)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exact metric on the upper half-plane

/// Flat length `|p − q z| / √(im z)` of a slope on the unit-area torus `z`.
pub fn flat_length(z: H2Point, s: Slope) -> f64 {
    let re = s.p() as f64 - s.q() as f64 * z.re();
    let im = s.q() as f64 * z.im();
    re.hypot(im) / z.im().sqrt()
}

/// `d_T(z, T^n z) − log(|n|·λ_z(s))` computed from the Möbius action.
pub fn exact_coarse_residual(z: H2Point, s: Slope, n: i64) -> Result<f64> {
    let d = crate::lattice::parabolic_displacement(z, s, n)?;
    Ok(d - ((n.unsigned_abs() as f64) * extremal_proxy(z, s)).ln())
}

/// Shortest flat slope at `z` and the shortest slope meeting it once,
/// lexicographic tie-break; searched in a box that is exact for `z` in a
/// bounded region of the thick part.
pub fn flat_short_marking(z: H2Point) -> ShortMarking {
    let bound = (4.0 / z.im().sqrt()).ceil() as i64 + (z.re().abs().ceil() as i64) * 4 + 4;
    let mut cands: Vec<(Slope, f64)> = Vec::new();
    for q in 0..=bound {
        for p in -4 * bound..=4 * bound {
            if let Ok(s) = Slope::new(p, q) {
                if q > 0 || p == 1 {
                    cands.push((s, flat_length(z, s)));
                }
            }
        }
    }
    let pick = |it: &mut dyn Iterator<Item = &(Slope, f64)>| {
        let v: Vec<&(Slope, f64)> = it.collect();
        let best = v.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        v.into_iter().filter(|c| c.1 <= best * (1.0 + 1e-12)).map(|c| c.0).min().unwrap()
    };
    let eta = pick(&mut cands.iter());
    let delta = pick(&mut cands.iter().filter(|c| intersection_number(c.0, eta) == 1));
    ShortMarking { eta, delta }
}

/// `|d_T(z, w) − log max_{γ ∈ μ_z} ℓ_w(γ)/ℓ_z(γ)|` with flat lengths.
pub fn distance_formula_gap(z: H2Point, w: H2Point) -> f64 {
    let mu = flat_short_marking(z);
    distance_formula_gap_with(z, w, &mu)
}

pub fn distance_formula_gap_with(z: H2Point, w: H2Point, mu: &ShortMarking) -> f64 {
    let est = mu
        .curves()
        .iter()
        .map(|&g| (flat_length(w, g) / flat_length(z, g)).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    (teich_distance_h2(z, w) - est).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSweep {
    pub samples: u64,
    pub seed: u64,
    pub radius: f64,
    pub max_word: u32,
}

impl Default for GapSweep {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 1,
            radius: 10.0,
            max_word: 40,
        }
    }
}

/// Sup of [`distance_formula_gap`] over random `SL(2,ℤ)` orbit points of
/// `z` within Teichmüller distance `radius`. Returns `(sup gap, accepted)`.
pub fn sweep_distance_gap(z: H2Point, cfg: &GapSweep) -> (f64, u64) {
    let mu = flat_short_marking(z);
    let found: Vec<f64> = (0..cfg.samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = stream(cfg.seed, i);
            let len = rng.gen_range(1..=cfg.max_word);
            let (mut a, mut b, mut c, mut d) = (1.0f64, 0.0, 0.0, 1.0);
            for _ in 0..len {
                let k = rng.gen_range(-3i32..=3) as f64;
                // right-multiply by [[1,k],[0,1]] then by S = [[0,-1],[1,0]]
                let (a1, b1, c1, d1) = (a, a * k + b, c, c * k + d);
                (a, b, c, d) = (b1, -a1, d1, -c1);
            }
            let w = mobius_apply_f64(a, b, c, d, z);
            (w.im() > 0.0 && teich_distance_h2(z, w) <= cfg.radius).then(|| distance_formula_gap_with(z, w, &mu))
        })
        .collect();
    (found.iter().copied().fold(0.0, f64::max), found.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn intersection_example() {
        let c = check_intersection_formula(s(1, 0), 3, s(0, 1), s(1, 1)).unwrap();
        assert_eq!(c, IntersectionCheck { residual: 1, bound: 1 });
        assert!(c.holds());
        let c = check_intersection_formula(s(2, 3), 7, s(2, 3), s(-1, 4)).unwrap();
        assert_eq!(c.residual, intersection_number(s(2, 3), s(-1, 4)) as u128);
        assert!(c.holds());
    }

    #[test]
    fn twist_bounds_example() {
        let x0 = MarkoffStructure::modular();
        let t = TwistSpec::new(s(1, 0), 5).unwrap();
        let r = check_twist_length_bounds(&x0, t, s(0, 1), 4.0);
        assert_relative_eq!(r.upper, 6.0 * 1.924_847_300_238_414, max_relative = 1e-12);
        assert_relative_eq!(r.twisted, x0.length(s(-5, 1)), max_relative = 1e-14);
        assert!(r.upper_slack >= 0.0 && r.lower_slack >= 0.0);
    }

    #[test]
    fn near_tight_upper_bound_is_refined() {
        let x = MarkoffStructure::from_xy(6.3207155364179703, 7.8505364986022137, 0.3).unwrap();
        let t = TwistSpec::new(s(4, 1), 5).unwrap();
        let r = check_twist_length_bounds(&x, t, s(5, 1), 4.0);
        assert!(r.refined);
        assert!(r.upper_slack > 0.0 && r.upper_slack < 1e-15);
    }

    #[test]
    fn disjoint_twist_has_no_effect() {
        let x = MarkoffStructure::from_xy(3.1, 5.2, 0.3).unwrap();
        let t = TwistSpec::new(s(2, 3), -17).unwrap();
        let r = check_twist_length_bounds(&x, t, s(2, 3), 4.0);
        assert_eq!(r.upper_slack, 0.0);
        assert_eq!(r.lower, 0.0);
        assert_eq!(r.twisted, x.length(s(2, 3)));
    }

    #[test]
    fn effective_bound_arithmetic() {
        let x0 = MarkoffStructure::modular();
        let t = TwistSpec::new(s(1, 0), 2).unwrap();
        let r = check_effective_lower_bound(&x0, t, s(0, 1), 0.5, 0.0).unwrap();
        // ℒ₁ factor (|a| − 2 + K) = K
        let l = x0.length(s(1, 0));
        assert_relative_eq!(r.l1, (0.5 * l - 2.0 * l).max(0.0));
        assert!(check_effective_lower_bound(&x0, t, s(0, 1), 1.0, 0.0).is_err());
    }

    #[test]
    fn effective_bound_long_curve() {
        let x0 = MarkoffStructure::modular();
        // a curve of length close to 10 on the modular torus
        let alpha = crate::curves::enumerate_slopes(&x0, 10.0)
            .into_iter()
            .max_by(|a, b| x0.length(*a).total_cmp(&x0.length(*b)))
            .unwrap();
        assert!(x0.length(alpha) > 9.0);
        for k in [0.25, 0.5, 0.75] {
            for a in [2, 3, 7, -11] {
                let t = TwistSpec::new(alpha, a).unwrap();
                let r = check_effective_lower_bound(&x0, t, s(0, 1), k, 4.0).unwrap();
                assert!(r.slack() >= 0.0);
            }
        }
    }

    #[test]
    fn structure_push_matches_slope_push() {
        let sweep = GeoSweep {
            samples: 200,
            ..GeoSweep::default()
        };
        for i in 0..sweep.samples {
            let g = sweep.sample(i);
            let y = twist_on_structure(&g.x, g.twist).unwrap();
            let a = twisted_length(&g.x, g.twist, g.tau);
            assert_relative_eq!(a, y.length(g.tau), max_relative = 1e-9);
        }
    }

    #[test]
    fn exact_residual_example() {
        let r = exact_coarse_residual(H2Point::I, s(1, 0), 10).unwrap();
        assert_relative_eq!(r, 0.5 * 51f64.acosh() - 10f64.ln(), epsilon = 1e-12);
        assert!((r - 0.0099).abs() < 0.001);
    }

    #[test]
    fn gap_examples() {
        let z = H2Point::new(0.2, 1.3).unwrap();
        assert_eq!(distance_formula_gap(z, z), 0.0);
        for n in [2.0, 10.0, 1e3, 1e6] {
            let w = H2Point::new(0.0, n).unwrap();
            assert!(distance_formula_gap(H2Point::I, w) < 1e-12);
        }
    }

    #[test]
    fn flat_marking_at_i() {
        let mu = flat_short_marking(H2Point::I);
        assert_eq!(mu, ShortMarking { eta: s(0, 1), delta: s(1, 0) });
    }

    #[test]
    fn sweeps_are_reproducible() {
        let cfg = IntersectionSweep {
            samples: 500,
            seed: 9,
            slope_bound: 30,
            max_power: 40,
        };
        assert_eq!(sweep_intersection_formula(&cfg), sweep_intersection_formula(&cfg));
    }
}

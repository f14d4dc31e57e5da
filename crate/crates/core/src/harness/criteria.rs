//! The acceptance checks, one function per criterion, each returning a
//! pass/fail verdict with the measured quantities.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::comb::{self, CoefficientVector, LedgerParams};
use crate::curves::{count_table, fit_growth, Population};
use crate::error::{Error, Result};
use crate::hyp::H2Point;
use crate::lattice::{self, CensusModel, LatticeCensus, SandwichSweep};
use crate::laws;
use crate::oracle;
use crate::stats::{least_squares, linear_grid};
use crate::torus::{MarkoffStructure, Slope};

/// Criterion ids in order.
pub const CRITERIA: [&str; 11] = [
    "curve_count_exponent",
    "scaling_identity",
    "twist_lattice_growth",
    "multitwist_lattice_growth",
    "intersection_formula",
    "twist_length_upper",
    "twist_length_lower",
    "coarse_distance",
    "sandwich",
    "combinatorics",
    "oracle_equivalence",
];

pub const EXPONENT_RANGE: [f64; 2] = [1.8, 2.2];
pub const EXPONENT_SECONDS: f64 = 60.0;
pub const LATTICE_SLOPE_RANGE: [f64; 2] = [0.85, 1.15];
pub const LATTICE_SECONDS: f64 = 600.0;
pub const INTERSECTION_SECONDS: f64 = 10.0;
pub const DRIFT_LIMIT: f64 = 0.2;
pub const BAND_LIMIT: f64 = 3.0;
pub const COARSE_SLOPE_RANGE: [f64; 2] = [0.95, 1.05];
/// Exact-metric residual at `i`, slope `(1,0)`, power 10.
pub const EXACT_RESIDUAL: f64 = 0.0099;
pub const EXACT_RESIDUAL_TOL: f64 = 0.001;
pub const HARMONIC_GRID: [f64; 3] = [4.0, 20.0, 0.5];
/// Largest `s` for the composition lower bound.
pub const LEMMA_S_MAX: u64 = 60;
pub const BALANCED_SAMPLES: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub index: usize,
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub fitted: BTreeMap<String, f64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.id,
            self.detail,
            self.seconds
        )
    }
}

struct Verdict {
    passed: bool,
    detail: String,
    fitted: Vec<(String, f64)>,
}

impl Verdict {
    fn new(passed: bool, detail: String) -> Self {
        Self {
            passed,
            detail,
            fitted: Vec::new(),
        }
    }

    fn fit(mut self, k: &str, v: f64) -> Self {
        self.fitted.push((k.into(), v));
        self
    }
}

fn within(v: f64, [lo, hi]: [f64; 2]) -> bool {
    (lo..=hi).contains(&v)
}

/// Runs one criterion by id. Errors inside a check become a failed result.
pub fn run_criterion(id: &str, cfg: &RunConfig) -> Result<CriterionResult> {
    let index = CRITERIA
        .iter()
        .position(|c| *c == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown criterion `{id}`")))?
        + 1;
    let t0 = Instant::now();
    let v = match id {
        "curve_count_exponent" => curve_count_exponent(cfg, &t0),
        "scaling_identity" => scaling_identity(cfg),
        "twist_lattice_growth" => twist_lattice_growth(cfg, &t0),
        "multitwist_lattice_growth" => multitwist_lattice_growth(cfg),
        "intersection_formula" => intersection_formula(cfg, &t0),
        "twist_length_upper" => twist_length_upper(cfg),
        "twist_length_lower" => twist_length_lower(cfg),
        "coarse_distance" => coarse_distance(cfg),
        "sandwich" => sandwich(cfg),
        "combinatorics" => combinatorics(cfg),
        _ => oracle_equivalence(cfg),
    };
    let v = v.unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
    Ok(CriterionResult {
        index,
        id: id.into(),
        passed: v.passed,
        detail: v.detail,
        seconds: t0.elapsed().as_secs_f64(),
        fitted: v.fitted.into_iter().collect(),
    })
}

pub fn run_all(cfg: &RunConfig) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|id| run_criterion(id, cfg).expect("known id"))
        .collect()
}

fn curve_count_exponent(cfg: &RunConfig, t0: &Instant) -> Result<Verdict> {
    let x = cfg.model.structure(cfg.constants.eps)?;
    let table = count_table(&x, &cfg.enumerate.grid(cfg.constants.rho), Population::Simple)?;
    let fit = fit_growth(&table, Some(cfg.fit.window))?;
    let secs = t0.elapsed().as_secs_f64();
    let ok = within(fit.exponent, EXPONENT_RANGE) && secs < EXPONENT_SECONDS;
    Ok(Verdict::new(
        ok,
        format!(
            "exponent {:.4} over L in [{}, {}], r^2 {:.5}, {:.2} s",
            fit.exponent, fit.fit_window[0], fit.fit_window[1], fit.r_squared, secs
        ),
    )
    .fit("curve_exponent", fit.exponent)
    .fit("curve_prefactor", fit.prefactor))
}

fn scaling_identity(cfg: &RunConfig) -> Result<Verdict> {
    let x = cfg.model.structure(cfg.constants.eps)?;
    let grid = cfg.enumerate.scaling_grid();
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    let mut nonzero = 0usize;
    for &c in &cfg.enumerate.scales {
        let scaled = count_table(&x, &grid, Population::Scaled(c))?;
        let shrunk: Vec<f64> = grid.iter().map(|l| l / c as f64).collect();
        let plain = count_table(&x, &shrunk, Population::Simple)?;
        for (a, b) in scaled.counts.iter().zip(&plain.counts) {
            compared += 1;
            nonzero += usize::from(*a > 0);
            mismatches += usize::from(a != b);
        }
    }
    Ok(Verdict::new(
        mismatches == 0 && compared > 0,
        format!(
            "{mismatches} mismatches over {compared} comparisons ({nonzero} nonzero), scales {:?}",
            cfg.enumerate.scales
        ),
    ))
}

fn census(cfg: &RunConfig) -> Result<LatticeCensus> {
    let radii = cfg.census.radii();
    match cfg.census.model {
        CensusModel::ExactH2 => lattice::lattice_census(cfg.model.basepoint()?, &radii),
        CensusModel::CoarseMarkoff => lattice::coarse_census_grid(&cfg.model.structure(cfg.constants.eps)?, &radii),
    }
}

fn twist_lattice_growth(cfg: &RunConfig, t0: &Instant) -> Result<Verdict> {
    let c = census(cfg)?;
    let g = lattice::growth_report(&c, Some(cfg.census.m_window))?;
    let secs = t0.elapsed().as_secs_f64();
    Ok(Verdict::new(
        g.d_slope_within(LATTICE_SLOPE_RANGE[0], LATTICE_SLOPE_RANGE[1]) && secs < LATTICE_SECONDS,
        format!(
            "slope of log count_D {:.4} over R in [{}, {}], {} model at {:?}, r^2 {:.5}, {:.2} s",
            g.d_slope, cfg.census.r_min, cfg.census.r_max, c.model, cfg.model.basepoint, g.d_r_squared, secs
        ),
    )
    .fit("lattice_d_slope", g.d_slope))
}

fn multitwist_lattice_growth(cfg: &RunConfig) -> Result<Verdict> {
    let c = census(cfg)?;
    let g = lattice::growth_report(&c, Some(cfg.census.m_window))?;
    Ok(Verdict::new(
        g.m_growth_ok(),
        format!(
            "count_M/(R e^R) max/min {:.3} (< {}), count_M/e^R rises {:.1}% (>= {:.0}%), min step ratio {:.4}",
            g.m_ratio_drift,
            lattice::M_DRIFT_LIMIT,
            100.0 * g.m_exp_increase,
            100.0 * lattice::M_MIN_INCREASE,
            g.m_exp_min_step
        ),
    )
    .fit("lattice_m_drift", g.m_ratio_drift)
    .fit("lattice_m_increase", g.m_exp_increase))
}

fn intersection_formula(cfg: &RunConfig, t0: &Instant) -> Result<Verdict> {
    let r = laws::sweep_intersection_formula(&cfg.intersection_sweep());
    let secs = t0.elapsed().as_secs_f64();
    Ok(Verdict::new(
        r.passed() && r.samples > 0 && secs < INTERSECTION_SECONDS,
        format!(
            "{} violations over {} quadruples, min slack {}, {:.2} s",
            r.violations, r.samples, r.min_slack, secs
        ),
    ))
}

fn twist_length_upper(cfg: &RunConfig) -> Result<Verdict> {
    let (up, _) = laws::sweep_twist_length_bounds(&cfg.geo_sweep(), cfg.constants.l_const);
    Ok(Verdict::new(
        up.passed() && up.samples > 0,
        format!(
            "{} violations over {} samples with |a| <= {}, min slack {:.3e}",
            up.violations, up.samples, cfg.verify.max_power, up.min_slack
        ),
    ))
}

fn l_min(r: &laws::BoundReport) -> f64 {
    r.fitted_constants.get("L_min_emp").copied().unwrap_or(f64::NAN)
}

fn twist_length_lower(cfg: &RunConfig) -> Result<Verdict> {
    let l = cfg.constants.l_const;
    let base = cfg.geo_sweep();
    let twice = base.doubled();
    let (_, low) = laws::sweep_twist_length_bounds(&base, l);
    let (_, low2) = laws::sweep_twist_length_bounds(&twice, l);
    let mut ok = low.passed() && low.samples > 0;
    let mut violations = low.violations;
    let mut drift = laws::relative_drift(l_min(&low), l_min(&low2));
    let crit = |r: &laws::BoundReport| r.fitted_constants.get("L_crit").map_or("-inf".into(), |c| format!("{c:.3}"));
    let mut parts = vec![format!(
        "additive: {} violations, L_min_emp {:.4} (L_crit {})",
        low.violations,
        l_min(&low),
        crit(&low)
    )];
    let mut v_fit = Vec::new();
    let mut l_all = l_min(&low);
    for &k in &cfg.constants.k {
        let r = laws::sweep_effective_lower_bound(&base, k, l)?;
        let r2 = laws::sweep_effective_lower_bound(&twice, k, l)?;
        let d = laws::relative_drift(l_min(&r), l_min(&r2));
        ok &= r.passed();
        violations += r.violations;
        drift = drift.max(d);
        l_all = l_all.max(l_min(&r));
        parts.push(format!(
            "K={k}: {} violations, L_min_emp {:.4} (L_crit {})",
            r.violations,
            l_min(&r),
            crit(&r)
        ));
        v_fit.push((format!("L_min_emp_K{k}"), l_min(&r)));
    }
    let a = laws::sweep_multiplicative_bounds(&base);
    let a2 = laws::sweep_multiplicative_bounds(&twice);
    let a_emp = a.fitted_constants["A_emp"];
    let a_drift = laws::relative_drift(a_emp, a2.fitted_constants["A_emp"]);
    ok &= drift < DRIFT_LIMIT;
    let mut v = Verdict::new(
        ok,
        format!(
            "{violations} violations at L_const = {l}; {}; L_min_emp drift {:.2}% under doubling; A_emp {:.4} (drift {:.2}%)",
            parts.join("; "),
            100.0 * drift,
            a_emp,
            100.0 * a_drift
        ),
    )
    .fit("L_min_emp", l_all)
    .fit("L_min_emp_drift", drift)
    .fit("A_emp", a_emp);
    v.fitted.extend(v_fit);
    Ok(v)
}

fn coarse_distance(cfg: &RunConfig) -> Result<Verdict> {
    let bands = laws::sweep_coarse_distance(&cfg.coarse_sweep())?;
    let widest = bands.iter().map(|b| b.width()).fold(f64::NEG_INFINITY, f64::max);
    let slope_lo = bands.iter().map(|b| b.slope).fold(f64::INFINITY, f64::min);
    let slope_hi = bands.iter().map(|b| b.slope).fold(f64::NEG_INFINITY, f64::max);
    let h_fit = bands
        .iter()
        .map(|b| b.sup_residual.abs().max(b.inf_residual.abs()))
        .fold(0.0, f64::max);
    let exact = laws::exact_coarse_residual(H2Point::I, Slope::HORIZONTAL, 10)?;
    let (c_emp, accepted) = laws::sweep_distance_gap(cfg.model.basepoint()?, &cfg.gap_sweep());
    let ok = !bands.is_empty()
        && widest < BAND_LIMIT
        && within(slope_lo, COARSE_SLOPE_RANGE)
        && within(slope_hi, COARSE_SLOPE_RANGE)
        && (exact - EXACT_RESIDUAL).abs() <= EXACT_RESIDUAL_TOL;
    Ok(Verdict::new(
        ok,
        format!(
            "widest band {widest:.4} over {} structures, slopes in [{slope_lo:.4}, {slope_hi:.4}], exact residual {exact:.5}, H_fit {h_fit:.4}, c_emp {c_emp:.4} over {accepted} points",
            bands.len()
        ),
    )
    .fit("H_fit", h_fit)
    .fit("band_width", widest)
    .fit("c_emp", c_emp)
    .fit("exact_residual", exact))
}

fn sandwich(cfg: &RunConfig) -> Result<Verdict> {
    let t = lattice::sweep_sandwich(&SandwichSweep {
        samples: cfg.verify.sandwich_samples,
        seed: cfg.seed,
        ..SandwichSweep::default()
    });
    Ok(Verdict::new(
        t.violations == 0 && t.samples > 0,
        format!("{} violations over {} triples, min gap {}", t.violations, t.samples, t.min_gap),
    ))
}

/// Random balanced vectors against random integer lengths.
fn balanced_relation_failures(samples: u64, seed: u64) -> Result<u64> {
    let mut fails = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let k = rng.gen_range(1..=(comb::DEFAULT_H / 2) as usize);
        let coeffs: Vec<i64> = (0..k)
            .map(|_| rng.gen_range(1..=20i64) * if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        let v = CoefficientVector::new(coeffs, comb::DEFAULT_H)?;
        let least = v.coeffs().iter().map(|a| a.unsigned_abs()).min().expect("k >= 1");
        let t = v.weight().div_ceil(least) + rng.gen_range(0..3);
        let lengths: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=1000)).collect();
        let rel = comb::balanced_relations(&v, &lengths, t)?;
        fails += u64::from(!(rel.balanced && rel.all()));
    }
    Ok(fails)
}

fn combinatorics(cfg: &RunConfig) -> Result<Verdict> {
    let o = &cfg.oracle;
    let closed = oracle::compositions_vs_enumeration(o.comb_s_max, o.comb_k_max);
    let lemma_fail: Vec<(u64, u64)> = (1..=o.comb_k_max)
        .flat_map(|k| ((2 * (k - 1)).max(k)..=LEMMA_S_MAX).map(move |s| (s, k)))
        .filter(|&(s, k)| !comb::composition_lower_bound_holds(s, k))
        .collect();
    let below = comb::composition_bound_failures(o.comb_k_max);
    let sw = comb::sweep_schwartz(cfg.verify.schwartz_samples, cfg.seed, comb::DEFAULT_H);
    let balanced_fail = balanced_relation_failures(BALANCED_SAMPLES, cfg.seed)?;

    let params = LedgerParams {
        k: (comb::DEFAULT_H / 2) as u64,
        big_h: 0.0,
        t: 1,
        r: 1.0,
        n: 1.0,
    };
    let [lo, hi, step] = HARMONIC_GRID;
    let rows = comb::lower_bound_ledger(&params, &linear_grid(lo, hi, step))?;
    let past: Vec<_> = rows.iter().filter(|r| r.past_threshold).collect();
    let half_fail = past.iter().filter(|r| !r.half_r_holds).count();
    let (xs, ys): (Vec<f64>, Vec<f64>) = past.iter().map(|r| (r.r, r.harmonic)).unzip();
    let harmonic_slope = least_squares(&xs, &ys).map_or(f64::NAN, |f| f.slope);

    let ok = closed.passed()
        && lemma_fail.is_empty()
        && sw.violations == 0
        && sw.equality_mismatches == 0
        && sw.samples > 0
        && balanced_fail == 0
        && !past.is_empty()
        && half_fail == 0
        && within(harmonic_slope, COARSE_SLOPE_RANGE);
    Ok(Verdict::new(
        ok,
        format!(
            "closed forms {} mismatches over {}; composition bound fails at {} tested points (below 2(k-1): {} failures, reported); \
             Schwartz {} violations, {} equality mismatches over {}; balanced relations {} failures; \
             harmonic step holds on {}/{} radii past threshold, slope {:.4}",
            closed.mismatches,
            closed.compared,
            lemma_fail.len(),
            below.len(),
            sw.violations,
            sw.equality_mismatches,
            sw.samples,
            balanced_fail,
            past.len() - half_fail,
            past.len(),
            harmonic_slope
        ),
    ))
}

/// Structures for the windowed oracle: the configured one plus seeded
/// random thick structures.
pub fn oracle_structures(cfg: &RunConfig) -> Result<Vec<MarkoffStructure>> {
    let mut xs = vec![cfg.model.structure(cfg.constants.eps)?];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.oracle.window_structures {
        xs.push(MarkoffStructure::sample_thick(
            &mut rng,
            cfg.verify.trace_lo,
            cfg.verify.trace_hi,
            cfg.constants.eps,
        ));
    }
    Ok(xs)
}

/// Census points for the conjugator oracle: the basepoint and three fixed
/// points spread over the fundamental domain.
pub fn oracle_points(cfg: &RunConfig) -> Result<Vec<H2Point>> {
    Ok(vec![
        cfg.model.basepoint()?,
        H2Point::new(0.5, 0.866)?,
        H2Point::new(-0.3, 1.4)?,
        H2Point::new(0.1, 0.7)?,
    ])
}

/// The four brute-force oracle reports.
pub fn oracle_reports(cfg: &RunConfig) -> Result<Vec<oracle::OracleReport>> {
    let o = &cfg.oracle;
    Ok(vec![
        oracle::fricke_vs_words(&oracle::markoff_generator_pairs(o.generator_depth), o.trace_bits)?,
        oracle::enumeration_vs_window(&oracle_structures(cfg)?, &o.window_lengths),
        oracle::census_vs_conjugators(&oracle_points(cfg)?, &o.lattice_radii, o.conjugator_bound)?,
        oracle::compositions_vs_enumeration(o.comb_s_max, o.comb_k_max),
    ])
}

fn oracle_equivalence(cfg: &RunConfig) -> Result<Verdict> {
    let reps = oracle_reports(cfg)?;
    let ok = reps.iter().all(|r| r.passed());
    let parts: Vec<String> = reps
        .iter()
        .map(|r| format!("{} {}/{} agree", r.name, r.compared - r.mismatches, r.compared))
        .collect();
    Ok(Verdict::new(ok, parts.join("; ")))
}

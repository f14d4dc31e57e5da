//! Dehn-twist lattice points in Teichmüller balls of the once-punctured torus.
//!
//! In the exact model `𝒯₁,₁ ≅ ℍ²` with `d_T = ½ d_ℍ²`, the twist of power
//! `n` about the slope `p/q` is the parabolic fixing the cusp `p/q`, and
//!
//! ```text
//! d_T(z, T^n z) = arcsinh(|n|·λ_z(p,q) / 2),   λ_z(p,q) = |p − q z|² / im z.
//! ```
//!
//! A pair `(slope, n)` lies in the ball of radius `R` iff `|n|·λ ≤ 2 sinh R`,
//! so a census is a sweep over the lattice `ℤ + zℤ` inside a disc.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{hyp_distance, mobius_apply_f64, teich_distance_h2, H2Point};
use crate::stats::{least_squares, LineFit};
use crate::torus::markoff::ext_gcd;
use crate::torus::{MarkoffStructure, Slope, TwistSpec};

/// Which twist powers a census admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Powers {
    /// `n = ±1`, counted as two lattice points per slope.
    Unit,
    /// Every `n ≠ 0`.
    All,
    /// The single power `n`.
    Fixed(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusModel {
    ExactH2,
    CoarseMarkoff,
}

impl fmt::Display for CensusModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusModel::ExactH2 => "exact-h2",
            CensusModel::CoarseMarkoff => "coarse-markoff",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Basepoint {
    H2(H2Point),
    Markoff(MarkoffStructure),
}

impl fmt::Display for Basepoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basepoint::H2(z) => write!(f, "{z}"),
            Basepoint::Markoff(x) => write!(f, "{x}"),
        }
    }
}

/// Twist lattice counts over an ascending radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeCensus {
    pub basepoint: Basepoint,
    pub radii: Vec<f64>,
    pub counts_d: Vec<u64>,
    pub counts_m: Vec<u64>,
    pub model: CensusModel,
}

impl LatticeCensus {
    pub fn new(
        basepoint: Basepoint,
        radii: Vec<f64>,
        counts_d: Vec<u64>,
        counts_m: Vec<u64>,
        model: CensusModel,
    ) -> Result<Self> {
        if radii.len() != counts_d.len() || radii.len() != counts_m.len() {
            return Err(Error::InvalidArgument("radii and counts differ in length".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("radii must ascend".into()));
        }
        if counts_d.windows(2).any(|w| w[0] > w[1]) || counts_m.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("counts must be nondecreasing".into()));
        }
        if counts_d.iter().zip(&counts_m).any(|(d, m)| d > m) {
            return Err(Error::InvalidArgument("count_D exceeds count_M".into()));
        }
        Ok(Self {
            basepoint,
            radii,
            counts_d,
            counts_m,
            model,
        })
    }

    /// CSV rows `model,R,count_D,count_M`.
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "model,R,count_D,count_M")?;
        }
        for ((r, d), m) in self.radii.iter().zip(&self.counts_d).zip(&self.counts_m) {
            writeln!(w, "{},{},{},{}", self.model, r, d, m)?;
        }
        Ok(())
    }
}

/// `λ_z(p,q) = |p − q z|² / im z`.
pub fn extremal_proxy(z: H2Point, s: Slope) -> f64 {
    let re = s.p() as f64 - s.q() as f64 * z.re();
    let im = s.q() as f64 * z.im();
    (re * re + im * im) / z.im()
}

/// `d_T(z, T_s^n z)` from the Möbius action of the twist matrix.
pub fn parabolic_displacement(z: H2Point, s: Slope, n: i64) -> Result<f64> {
    let m = TwistSpec::new(s, n)?.homology_map().entries();
    let [[a, b], [c, d]] = m.map(|r| r.map(|v| v as f64));
    Ok(teich_distance_h2(z, mobius_apply_f64(a, b, c, d, z)))
}

/// Closed form `arcsinh(|n| λ / 2)` of [`parabolic_displacement`].
pub fn displacement_closed_form(z: H2Point, s: Slope, n: i64) -> f64 {
    ((n.unsigned_abs() as f64) * extremal_proxy(z, s) / 2.0).asinh()
}

/// `2 sinh R`, the bound on `|n|·λ` for displacement `≤ R`.
fn cap(r: f64) -> f64 {
    if r > 0.0 {
        2.0 * r.sinh()
    } else {
        -1.0
    }
}

/// Largest `m ≥ 0` with `m·unit ≤ cap`.
fn max_multiple(unit: f64, cap: f64) -> u64 {
    if !(cap >= unit) {
        return 0;
    }
    let mut m = (cap / unit).floor() as u64;
    while ((m + 1) as f64) * unit <= cap {
        m += 1;
    }
    while m > 0 && (m as f64) * unit > cap {
        m -= 1;
    }
    m
}

fn admitted(unit: f64, cap: f64, powers: Powers) -> u64 {
    match powers {
        Powers::Unit => 2 * u64::from(unit <= cap),
        Powers::All => 2 * max_multiple(unit, cap),
        Powers::Fixed(0) => 0,
        Powers::Fixed(n) => u64::from((n.unsigned_abs() as f64) * unit <= cap),
    }
}

/// Slopes with `λ_z ≤ cap`, shard `q` at a time. The search box is the disc
/// of radius `√(box_scale·cap·im z)` in `ℤ + zℤ`; `box_scale > 1` only
/// widens it and is used to test that nothing is lost at the edge.
fn slopes_in_shard(z: H2Point, cap: f64, box_scale: f64, q: i64, out: &mut impl FnMut(Slope, f64)) {
    let (x, y) = (z.re(), z.im());
    if q == 0 {
        let l = extremal_proxy(z, Slope::HORIZONTAL);
        if l <= cap {
            out(Slope::HORIZONTAL, l);
        }
        return;
    }
    let qf = q as f64;
    let r2 = box_scale * cap * y - qf * qf * y * y;
    if r2 < 0.0 {
        return;
    }
    let r = r2.sqrt();
    let lo = (qf * x - r).floor() as i64 - 1;
    let hi = (qf * x + r).ceil() as i64 + 1;
    for p in lo..=hi {
        if p.gcd(&q) != 1 {
            continue;
        }
        let s = Slope::new(p, q).expect("primitive");
        let l = extremal_proxy(z, s);
        if l <= cap {
            out(s, l);
        }
    }
}

fn shard_count(z: H2Point, cap: f64, box_scale: f64) -> i64 {
    ((box_scale * cap / z.im()).max(0.0).sqrt().floor() as i64) + 1
}

/// Calls `f(slope, λ)` for every slope with `λ_z ≤ 2 sinh R`.
pub fn for_each_slope(z: H2Point, r: f64, mut f: impl FnMut(Slope, f64)) {
    let c = cap(r);
    for q in 0..=shard_count(z, c, 1.0) {
        slopes_in_shard(z, c, 1.0, q, &mut f);
    }
}

/// Number of `(slope, n)` with `d_T(z, T_s^n z) ≤ R`.
pub fn count_twist_lattice(z: H2Point, r: f64, powers: Powers) -> u64 {
    count_twist_lattice_with(z, r, powers, 1.0)
}

/// As [`count_twist_lattice`] with the slope search box scaled by `box_scale ≥ 1`.
pub fn count_twist_lattice_with(z: H2Point, r: f64, powers: Powers, box_scale: f64) -> u64 {
    let c = cap(r);
    if c <= 0.0 {
        return 0;
    }
    (0..=shard_count(z, c, box_scale))
        .into_par_iter()
        .map(|q| {
            let mut n = 0u64;
            slopes_in_shard(z, c, box_scale, q, &mut |_, l| n += admitted(l, c, powers));
            n
        })
        .sum()
}

/// Exact-model census at `z` over an ascending grid of radii.
pub fn lattice_census(z: H2Point, radii: &[f64]) -> Result<LatticeCensus> {
    let r_max = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let caps: Vec<f64> = radii.iter().map(|&r| cap(r)).collect();
    let c_max = cap(r_max);
    let k = radii.len();
    let zero = || (vec![0u64; k], vec![0u64; k]);
    let (d, m) = if c_max > 0.0 {
        (0..=shard_count(z, c_max, 1.0))
            .into_par_iter()
            .map(|q| {
                let (mut d, mut m) = zero();
                slopes_in_shard(z, c_max, 1.0, q, &mut |_, l| {
                    for (j, &c) in caps.iter().enumerate() {
                        d[j] += admitted(l, c, Powers::Unit);
                        m[j] += admitted(l, c, Powers::All);
                    }
                });
                (d, m)
            })
            .reduce(zero, |(mut d1, mut m1), (d2, m2)| {
                for j in 0..k {
                    d1[j] += d2[j];
                    m1[j] += m2[j];
                }
                (d1, m1)
            })
    } else {
        zero()
    };
    LatticeCensus::new(Basepoint::H2(z), radii.to_vec(), d, m, CensusModel::ExactH2)
}

/// Conjugator `h` with `h(∞) = p/q`, so that `T_s^n = h·T^n·h⁻¹`.
fn cusp_conjugator(s: Slope) -> [i128; 4] {
    let (p, q) = (s.p() as i128, s.q() as i128);
    let (g, a, b) = ext_gcd(p, q);
    // a p + b q = g = ±1, so [[p, −b g], [q, a g]] has determinant 1
    [p, -b * g, q, a * g]
}

/// Counts of the chain `|z·Γ ∩ B_{R−d}| ≤ |w·Γ ∩ B_R(z)| ≤ |z·Γ ∩ B_{R+d}|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub d: f64,
    pub inner: u64,
    pub middle: u64,
    pub outer: u64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.inner <= self.middle && self.middle <= self.outer
    }
}

/// Evaluates the three counts of the sandwich chain by direct enumeration.
pub fn sandwich_check(z: H2Point, w: H2Point, r: f64, powers: Powers) -> SandwichReport {
    let d = teich_distance_h2(z, w);
    let inner = count_twist_lattice(z, r - d, powers);
    let outer = count_twist_lattice(z, r + d, powers);
    let c_out = cap(r + d);
    let mut middle = 0u64;
    for_each_slope(z, r + d, |s, l| {
        let [a, b, c, dd] = cusp_conjugator(s).map(|v| v as f64);
        // h⁻¹ = [[d, −b], [−c, a]]; d(z, h T^n h⁻¹ w) = d(h⁻¹z, h⁻¹w + n)
        let zz = mobius_apply_f64(dd, -b, -c, a, z);
        let ww = mobius_apply_f64(dd, -b, -c, a, w);
        let hit = |n: i64| {
            let shifted = H2Point::new(ww.re() + n as f64, ww.im()).expect("upper half-plane");
            0.5 * hyp_distance(zz, shifted) <= r
        };
        let n_max = max_multiple(l, c_out) as i64;
        let range: Vec<i64> = match powers {
            Powers::Unit => vec![-1, 1],
            Powers::All => (1..=n_max).flat_map(|n| [-n, n]).collect(),
            Powers::Fixed(0) => vec![],
            Powers::Fixed(n) => vec![n],
        };
        middle += range.into_iter().filter(|&n| hit(n)).count() as u64;
    });
    SandwichReport {
        d,
        inner,
        middle,
        outer,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichSweep {
    pub samples: u64,
    pub seed: u64,
    /// Range of `im z` and `im w`; real parts are drawn from `[−½, ½]`.
    pub im_range: [f64; 2],
    pub r_range: [f64; 2],
}

impl Default for SandwichSweep {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 1,
            im_range: [0.6, 2.0],
            r_range: [0.5, 5.0],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SandwichTally {
    pub samples: u64,
    pub violations: u64,
    /// Smallest of `middle − inner` and `outer − middle` over the sweep.
    pub min_gap: i64,
    pub failures: Vec<(H2Point, H2Point, f64, SandwichReport)>,
}

/// Random `(z, w, R)` triples, alternating unit and all powers.
pub fn sweep_sandwich(cfg: &SandwichSweep) -> SandwichTally {
    let rows: Vec<_> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let pt = |rng: &mut ChaCha8Rng| {
                let re = rng.gen_range(-0.5..=0.5);
                let im = rng.gen_range(cfg.im_range[0]..=cfg.im_range[1]);
                H2Point::new(re, im).expect("positive imaginary part")
            };
            let z = pt(&mut rng);
            let w = pt(&mut rng);
            let r = rng.gen_range(cfg.r_range[0]..=cfg.r_range[1]);
            let powers = if i % 2 == 0 { Powers::Unit } else { Powers::All };
            (z, w, r, sandwich_check(z, w, r, powers))
        })
        .collect();
    let mut t = SandwichTally {
        min_gap: i64::MAX,
        ..Default::default()
    };
    for (z, w, r, rep) in rows {
        t.samples += 1;
        let gap = (rep.middle as i64 - rep.inner as i64).min(rep.outer as i64 - rep.middle as i64);
        t.min_gap = t.min_gap.min(gap);
        if !rep.holds() {
            t.violations += 1;
            t.failures.push((z, w, r, rep));
        }
    }
    t
}

/// Brute-force count over conjugates `g T^n g⁻¹` with `|entries of g| ≤ entry_bound`,
/// deduplicated as matrices and measured through the Möbius action.
///
/// Errors when `entry_bound` is too small to reach every cusp that can
/// displace `z` by at most `R`.
pub fn count_by_conjugators(z: H2Point, r: f64, powers: Powers, entry_bound: i64) -> Result<u64> {
    let c = cap(r);
    if c <= 0.0 {
        return Ok(0);
    }
    // λ ≥ min(im z, 1/im z), so |n| ≤ c / that and |q| ≤ √(c / im z)
    let (x, y) = (z.re(), z.im());
    let n_max = (c / y.min(1.0 / y)).floor() as i64;
    let needed = ((c / y).sqrt() * (1.0 + x.abs()) + (c * y).sqrt()).ceil() as i64;
    if needed > entry_bound {
        return Err(Error::InvalidArgument(format!(
            "entry bound {entry_bound} below required {needed}"
        )));
    }
    let ns: Vec<i64> = match powers {
        Powers::Unit => vec![-1, 1],
        Powers::All => (1..=n_max).flat_map(|n| [-n, n]).collect(),
        Powers::Fixed(0) => vec![],
        Powers::Fixed(n) => vec![n],
    };
    // g T^n g⁻¹ depends only on the first column of g
    let b = entry_bound;
    let mut columns: HashSet<(i64, i64)> = HashSet::new();
    for g00 in -b..=b {
        for g01 in -b..=b {
            for g10 in -b..=b {
                let solvable = if g00 == 0 {
                    g01 * g10 == -1
                } else {
                    (1 + g01 * g10) % g00 == 0 && ((1 + g01 * g10) / g00).abs() <= b
                };
                if solvable {
                    columns.insert((g00, g10));
                }
            }
        }
    }
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    for &(g00, g10) in &columns {
        for &n in &ns {
            let m = [1 - n * g00 * g10, n * g00 * g00, -n * g10 * g10, 1 + n * g00 * g10];
            let [a, bb, cc, d] = m.map(|v| v as f64);
            if teich_distance_h2(z, mobius_apply_f64(a, bb, cc, d, z)) <= r {
                seen.insert(m);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Coarse census: slopes weighted by positive powers `a` with
/// `log(a·ℓ_X(α)²) ≤ R`.
pub fn coarse_census(x: &MarkoffStructure, r: f64, powers: Powers) -> u64 {
    let c = coarse_census_grid(x, &[r]).expect("single radius");
    match powers {
        Powers::Unit => c.counts_d[0],
        Powers::All => c.counts_m[0],
        Powers::Fixed(n) => {
            let e = r.exp();
            crate::curves::sorted_lengths(x, e.sqrt())
                .into_iter()
                .filter(|l| n > 0 && (n as f64) * l * l <= e)
                .count() as u64
        }
    }
}

/// Coarse census over a radius grid; `count_D` counts `a = 1`.
pub fn coarse_census_grid(x: &MarkoffStructure, radii: &[f64]) -> Result<LatticeCensus> {
    let r_max = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sq: Vec<f64> = crate::curves::sorted_lengths(x, (0.5 * r_max).exp())
        .into_iter()
        .map(|l| l * l)
        .collect();
    let mut d = Vec::with_capacity(radii.len());
    let mut m = Vec::with_capacity(radii.len());
    for &r in radii {
        let e = r.exp();
        d.push(sq.iter().filter(|&&s| s <= e).count() as u64);
        m.push(sq.iter().map(|&s| max_multiple(s, e)).sum());
    }
    LatticeCensus::new(Basepoint::Markoff(x.clone()), radii.to_vec(), d, m, CensusModel::CoarseMarkoff)
}

/// Required drift bound of `count_M/(R e^R)`.
pub const M_DRIFT_LIMIT: f64 = 2.0;
/// Required growth of `count_M/e^R` across the window.
pub const M_MIN_INCREASE: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Slope and intercept of `log count_D` against `R`.
    pub d_slope: f64,
    pub d_intercept: f64,
    pub d_r_squared: f64,
    pub m_window: [f64; 2],
    /// `max/min` of `count_M/(R e^R)` over the window.
    pub m_ratio_drift: f64,
    /// `last/first − 1` of `count_M/e^R` over the window.
    pub m_exp_increase: f64,
    /// Smallest step ratio of consecutive `count_M/e^R` values.
    pub m_exp_min_step: f64,
}

impl GrowthReport {
    pub fn d_slope_within(&self, lo: f64, hi: f64) -> bool {
        (lo..=hi).contains(&self.d_slope)
    }

    /// `count_M` grows like `R e^R` and not like `e^R`.
    pub fn m_growth_ok(&self) -> bool {
        self.m_ratio_drift < M_DRIFT_LIMIT && self.m_exp_increase >= M_MIN_INCREASE && self.m_exp_min_step > 1.0
    }
}

/// Growth fits of a census. The multi-twist window defaults to the upper
/// half of the radius range.
pub fn growth_report(c: &LatticeCensus, m_window: Option<[f64; 2]>) -> Result<GrowthReport> {
    let (rs, logs): (Vec<f64>, Vec<f64>) = c
        .radii
        .iter()
        .zip(&c.counts_d)
        .filter(|(_, &n)| n > 0)
        .map(|(&r, &n)| (r, (n as f64).ln()))
        .unzip();
    if rs.len() < 6 {
        return Err(Error::InsufficientData(format!("{} radii with nonzero count_D, need 6", rs.len())));
    }
    let fit: LineFit = least_squares(&rs, &logs)
        .ok_or_else(|| Error::InsufficientData("degenerate radius grid".into()))?;
    let window = m_window.unwrap_or_else(|| {
        let (lo, hi) = (c.radii[0], c.radii[c.radii.len() - 1]);
        [0.5 * (lo + hi), hi]
    });
    let pts: Vec<(f64, f64)> = c
        .radii
        .iter()
        .zip(&c.counts_m)
        .filter(|(&r, &n)| r >= window[0] && r <= window[1] && n > 0)
        .map(|(&r, &n)| (r, n as f64))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData("fewer than two radii in the multi-twist window".into()));
    }
    let rr: Vec<f64> = pts.iter().map(|&(r, n)| n / (r * r.exp())).collect();
    let er: Vec<f64> = pts.iter().map(|&(r, n)| n / r.exp()).collect();
    let max = rr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rr.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GrowthReport {
        d_slope: fit.slope,
        d_intercept: fit.intercept,
        d_r_squared: fit.r_squared,
        m_window: window,
        m_ratio_drift: max / min,
        m_exp_increase: er[er.len() - 1] / er[0] - 1.0,
        m_exp_min_step: er.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn horizontal_unit_twist_at_i() {
        let want = 0.5 * 1.5f64.acosh();
        for n in [1, -1] {
            let d = parabolic_displacement(H2Point::I, s(1, 0), n).unwrap();
            assert!((d - want).abs() < 1e-12);
            assert!((d - 0.481212).abs() < 1e-6);
        }
    }

    #[test]
    fn closed_form_matches_mobius() {
        let z = H2Point::new(0.31, 1.17).unwrap();
        for (p, q) in [(1, 0), (0, 1), (3, 2), (-5, 7)] {
            for n in [1, -2, 9] {
                let a = parabolic_displacement(z, s(p, q), n).unwrap();
                let b = displacement_closed_form(z, s(p, q), n);
                assert!((a - b).abs() < 1e-9, "{p}/{q} {n}: {a} {b}");
            }
        }
    }

    #[test]
    fn small_ball_is_empty() {
        assert_eq!(count_twist_lattice(H2Point::I, 0.4, Powers::Unit), 0);
        assert_eq!(count_twist_lattice(H2Point::I, 0.5, Powers::Unit), 4);
    }

    #[test]
    fn census_rows_match_single_counts() {
        let z = H2Point::new(-0.2, 0.9).unwrap();
        let radii = [1.0, 2.5, 4.0];
        let c = lattice_census(z, &radii).unwrap();
        for (j, &r) in radii.iter().enumerate() {
            assert_eq!(c.counts_d[j], count_twist_lattice(z, r, Powers::Unit));
            assert_eq!(c.counts_m[j], count_twist_lattice(z, r, Powers::All));
        }
    }

    #[test]
    fn conjugator_has_unit_determinant() {
        for (p, q) in [(1, 0), (0, 1), (-7, 3), (13, 8)] {
            let [a, b, c, d] = cusp_conjugator(s(p, q));
            assert_eq!(a * d - b * c, 1);
            assert_eq!((a, c), (p as i128, q as i128));
        }
    }

    #[test]
    fn sandwich_collapses_at_equal_points() {
        let r = sandwich_check(H2Point::I, H2Point::I, 3.0, Powers::All);
        assert_eq!(r.inner, r.middle);
        assert_eq!(r.middle, r.outer);
    }

    #[test]
    fn modular_systoles_fill_smallest_coarse_ball() {
        let x = MarkoffStructure::modular();
        assert_eq!(coarse_census(&x, 1.310, Powers::Unit), 3);
        assert_eq!(coarse_census(&x, 1.2, Powers::Unit), 0);
    }

    #[test]
    fn synthetic_growth_discriminates() {
        let radii: Vec<f64> = (0..15).map(|i| 6.0 + 0.5 * i as f64).collect();
        let mk = |f: &dyn Fn(f64) -> f64| -> Vec<u64> { radii.iter().map(|&r| f(r).round() as u64).collect() };
        let exp = mk(&|r| r.exp());
        let rexp = mk(&|r| r * r.exp());
        let c = LatticeCensus::new(Basepoint::H2(H2Point::I), radii.clone(), exp.clone(), rexp, CensusModel::ExactH2)
            .unwrap();
        let g = growth_report(&c, None).unwrap();
        assert!((g.d_slope - 1.0).abs() < 1e-3);
        assert!(g.m_growth_ok());
        let pure = LatticeCensus::new(Basepoint::H2(H2Point::I), radii, exp.clone(), exp, CensusModel::ExactH2).unwrap();
        assert!(!growth_report(&pure, None).unwrap().m_growth_ok());
    }
}

//! Enumeration and counting of simple closed geodesics and integral
//! multicurves of bounded length, with power-law growth fits.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::least_squares;
use crate::torus::farey::{self, FareyNode};
use crate::hyp::collar_width;
use crate::torus::{short_marking, LogTrace, MarkoffStructure, Slope};

/// Depth at which each root subtree is split into independent work units.
const SPLIT_DEPTH: u32 = 8;

/// Which population a [`CountTable`] counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Simple closed geodesics.
    Simple,
    /// `c·γ` for a fixed weight `c`.
    Scaled(u32),
    /// Integral multicurves.
    Multicurves,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Simple => write!(f, "S"),
            Population::Scaled(c) => write!(f, "{c}gamma"),
            Population::Multicurves => write!(f, "ML"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub thresholds: Vec<f64>,
    pub counts: Vec<u64>,
    pub label: Population,
}

impl CountTable {
    pub fn new(thresholds: Vec<f64>, counts: Vec<u64>, label: Population) -> Result<Self> {
        if thresholds.len() != counts.len() {
            return Err(Error::InvalidArgument("thresholds and counts differ in length".into()));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("thresholds must ascend".into()));
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("counts must be nondecreasing".into()));
        }
        Ok(Self {
            thresholds,
            counts,
            label,
        })
    }

    /// CSV rows `L,count,population_label,structure_id`, header included.
    pub fn write_csv<W: Write>(&self, mut w: W, structure_id: &str, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "L,count,population_label,structure_id")?;
        }
        for (l, c) in self.thresholds.iter().zip(&self.counts) {
            writeln!(w, "{l},{c},{},{structure_id}", self.label)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub fit_window: [f64; 2],
    /// Set when the counts carry no growth information.
    pub degenerate: bool,
}

/// Canonical slopes of length `≤ len`, sorted, each once.
pub fn enumerate_slopes(x: &MarkoffStructure, len: f64) -> Vec<Slope> {
    let mut out: Vec<Slope> = enumerate_with_traces(x, len).into_iter().map(|(s, _)| s).collect();
    out.sort_unstable();
    out
}

/// As [`enumerate_slopes`] but keeps the log-traces; order unspecified.
pub fn enumerate_with_traces(x: &MarkoffStructure, len: f64) -> Vec<(Slope, LogTrace)> {
    if !(len > 0.0) {
        return Vec::new();
    }
    let threshold = LogTrace::threshold_for_length(len);
    let (singles, roots) = farey::roots(x.root());
    let (mut found, frontier) = farey::split_frontier(roots.to_vec(), threshold, SPLIT_DEPTH);
    found.extend(singles.into_iter().filter(|(_, t)| *t <= threshold));
    let deep: Vec<(Slope, LogTrace)> = frontier
        .into_par_iter()
        .flat_map_iter(|n: FareyNode| {
            let mut v = Vec::new();
            farey::walk_subtree(n, threshold, &mut |s, t| v.push((s, t)));
            v
        })
        .collect();
    found.extend(deep);
    found.retain(|(_, t)| t.length() <= len);
    let back = x.marking().inverse();
    if !back.is_identity() {
        for (s, _) in found.iter_mut() {
            *s = back.apply(*s);
        }
    }
    found
}

/// Lengths of every slope of length `≤ len`, sorted ascending.
pub fn sorted_lengths(x: &MarkoffStructure, len: f64) -> Vec<f64> {
    let mut v: Vec<f64> = enumerate_with_traces(x, len)
        .into_par_iter()
        .map(|(_, t)| t.length())
        .filter(|l| *l <= len)
        .collect();
    v.par_sort_unstable_by(f64::total_cmp);
    v
}

pub fn count_scc(x: &MarkoffStructure, len: f64) -> u64 {
    enumerate_with_traces(x, len).len() as u64
}

/// `#{c·γ : c·ℓ(γ) ≤ len}`.
pub fn count_scaled(x: &MarkoffStructure, len: f64, c: u32) -> Result<u64> {
    if c == 0 {
        return Err(Error::InvalidArgument("weight must be positive".into()));
    }
    let c = c as f64;
    Ok(scaled_lengths(x, len, c).partition_point(|&v| c * v <= len) as u64)
}

/// Lengths enumerated a hair past `len/c`, so that the filter `c·ℓ ≤ len`
/// decides every boundary case.
fn scaled_lengths(x: &MarkoffStructure, len: f64, c: f64) -> Vec<f64> {
    sorted_lengths(x, len / c * (1.0 + 1e-9))
}

/// `Σ_γ ⌊len/ℓ(γ)⌋`: on the once-punctured torus every integral multicurve
/// is a positive multiple of a single curve.
pub fn count_multicurves(x: &MarkoffStructure, len: f64) -> u64 {
    enumerate_with_traces(x, len)
        .into_par_iter()
        .map(|(_, t)| (len / t.length()).floor() as u64)
        .sum()
}

/// Counts at each threshold of an ascending grid from a single enumeration.
pub fn count_table(x: &MarkoffStructure, grid: &[f64], label: Population) -> Result<CountTable> {
    let Some(&top) = grid.last() else {
        return Ok(CountTable::new(vec![], vec![], label)?);
    };
    let counts: Vec<u64> = match label {
        Population::Simple => {
            let lens = sorted_lengths(x, top);
            grid.iter().map(|&l| lens.partition_point(|&v| v <= l) as u64).collect()
        }
        Population::Scaled(c) => {
            if c == 0 {
                return Err(Error::InvalidArgument("weight must be positive".into()));
            }
            let c = c as f64;
            let lens = scaled_lengths(x, top, c);
            grid.iter().map(|&l| lens.partition_point(|&v| c * v <= l) as u64).collect()
        }
        Population::Multicurves => {
            let lens = sorted_lengths(x, top);
            grid.iter()
                .map(|&l| lens.iter().take_while(|&&v| v <= l).map(|v| (l / v).floor() as u64).sum())
                .collect()
        }
    };
    CountTable::new(grid.to_vec(), counts, label)
}

/// Least-squares fit of `log count` against `log L` over the thresholds in
/// `window` (all thresholds when `None`).
pub fn fit_growth(table: &CountTable, window: Option<[f64; 2]>) -> Result<GrowthFit> {
    let [lo, hi] = window.unwrap_or([f64::NEG_INFINITY, f64::INFINITY]);
    let used: Vec<(f64, u64)> = table
        .thresholds
        .iter()
        .zip(&table.counts)
        .filter(|(l, c)| **l >= lo && **l <= hi && **c > 0)
        .map(|(l, c)| (*l, *c))
        .collect();
    let xs: Vec<f64> = used.iter().map(|(l, _)| l.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|(_, c)| (*c as f64).ln()).collect();
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "growth fit needs 5 thresholds with nonzero counts, got {}",
            xs.len()
        )));
    }
    let fit_window = [used[0].0, used[used.len() - 1].0];
    let line = least_squares(&xs, &ys).expect("distinct ascending thresholds");
    let degenerate = ys.iter().all(|y| *y == ys[0]);
    Ok(GrowthFit {
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        r_squared: if degenerate { 0.0 } else { line.r_squared },
        fit_window,
        degenerate,
    })
}

/// Mean of `count / L^exponent` over the window: the prefactor at a fixed
/// exponent.
pub fn prefactor_at(table: &CountTable, exponent: f64, window: [f64; 2]) -> Option<f64> {
    let v: Vec<f64> = table
        .thresholds
        .iter()
        .zip(&table.counts)
        .filter(|(l, _)| **l >= window[0] && **l <= window[1])
        .map(|(l, c)| *c as f64 / l.powf(exponent))
        .collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Slopes with `|p| + |q| ≤ bound` and length `≤ len`, by direct evaluation.
pub fn window_slopes(x: &MarkoffStructure, len: f64, bound: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for q in 0..=bound {
        for p in -(bound - q)..=(bound - q) {
            if let Ok(s) = Slope::new(p, q) {
                if (q > 0 || p == 1) && x.length(s) <= len {
                    out.push(s);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Window for [`window_slopes`] that provably contains every slope of
/// length `≤ len`. Write `s = m·η + n·δ` in the short marking; crossing the
/// collar of a simple geodesic `γ` costs `2W(ℓ(γ))`, so `ℓ(s) ≤ len` forces
/// `|n| ≤ len / 2W(η)` and `|m| ≤ len / 2W(δ)`.
pub fn window_bound(x: &MarkoffStructure, len: f64) -> i64 {
    let mu = short_marking(x);
    let reach = |g: Slope| {
        let w = collar_width(x.length(g)).expect("positive length");
        (len / (2.0 * w)).floor() as i64
    };
    let n_max = reach(mu.eta);
    let m_max = reach(mu.delta);
    m_max * (mu.eta.p().abs() + mu.eta.q()) + n_max * (mu.delta.p().abs() + mu.delta.q())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn modular_examples() {
        let x0 = MarkoffStructure::modular();
        assert_eq!(enumerate_slopes(&x0, 1.93), vec![s(0, 1), s(1, 0), s(1, 1)]);
        assert_eq!(count_scc(&x0, 3.53), 6);
        assert!(enumerate_slopes(&x0, 0.5).is_empty());
        assert_eq!(count_scaled(&x0, 3.86, 2).unwrap(), 3);
        assert_eq!(count_multicurves(&x0, 1.93), 3);
        assert_eq!(count_multicurves(&x0, 3.86), 9);
    }

    #[test]
    fn table_matches_direct_counts() {
        let x = MarkoffStructure::from_xy(3.3, 4.1, 0.3).unwrap();
        let grid = [2.0, 5.0, 9.0, 14.0];
        let t = count_table(&x, &grid, Population::Simple).unwrap();
        let m = count_table(&x, &grid, Population::Multicurves).unwrap();
        let c = count_table(&x, &grid, Population::Scaled(3)).unwrap();
        for (i, &l) in grid.iter().enumerate() {
            assert_eq!(t.counts[i], count_scc(&x, l));
            assert_eq!(m.counts[i], count_multicurves(&x, l));
            assert_eq!(c.counts[i], count_scaled(&x, l, 3).unwrap());
        }
    }

    #[test]
    fn synthetic_power_law() {
        let l: Vec<f64> = (1..=8).map(|k| 10.0 * k as f64).collect();
        let c: Vec<u64> = l.iter().map(|v| (7.0 * v * v) as u64).collect();
        let f = fit_growth(&CountTable::new(l, c, Population::Simple).unwrap(), None).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-9);
        assert!((f.prefactor - 7.0).abs() < 1e-6);
    }

    #[test]
    fn log_factor_pushes_exponent_up() {
        let fit = |hi: f64| {
            let l = crate::stats::geometric_grid(10.0, hi, 1.25);
            let c: Vec<u64> = l.iter().map(|v| (1e3 * v * v * v.ln()) as u64).collect();
            fit_growth(&CountTable::new(l, c, Population::Simple).unwrap(), None).unwrap().exponent
        };
        assert!(fit(100.0) > 2.0);
        assert!(fit(1e4) > 2.0);
    }

    #[test]
    fn degenerate_fit_flagged() {
        let t = CountTable::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![4; 5], Population::Simple).unwrap();
        let f = fit_growth(&t, None).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.r_squared, 0.0);
        let short = CountTable::new(vec![1.0, 2.0], vec![1, 2], Population::Simple).unwrap();
        assert!(fit_growth(&short, None).is_err());
    }

    #[test]
    fn table_invariants_enforced() {
        assert!(CountTable::new(vec![2.0, 1.0], vec![0, 0], Population::Simple).is_err());
        assert!(CountTable::new(vec![1.0, 2.0], vec![3, 2], Population::Simple).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = CountTable::new(vec![1.5, 2.5], vec![0, 3], Population::Scaled(2)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, "X0", true).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "L,count,population_label,structure_id\n1.5,0,2gamma,X0\n2.5,3,2gamma,X0\n"
        );
    }
}

//! Run configuration, read from a TOML file with one table per stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hyp::H2Point;
use crate::lattice::CensusModel;
use crate::laws::{CoarseSweep, GapSweep, GeoSweep, IntersectionSweep};
use crate::stats::{geometric_grid, linear_grid};
use crate::torus::MarkoffStructure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub model: ModelSpec,
    pub constants: Constants,
    pub enumerate: EnumerateSpec,
    pub census: CensusSpec,
    pub verify: VerifySpec,
    pub fit: FitSpec,
    pub oracle: OracleSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: "default".into(),
            seed: 1,
            out_dir: PathBuf::from("out"),
            threads: 0,
            model: ModelSpec::default(),
            constants: Constants::default(),
            enumerate: EnumerateSpec::default(),
            census: CensusSpec::default(),
            verify: VerifySpec::default(),
            fit: FitSpec::default(),
            oracle: OracleSpec::default(),
        }
    }
}

/// Structure and basepoint under study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    /// Markoff traces on `(1,0), (0,1), (1,1)`.
    pub traces: [f64; 3],
    /// Basepoint `[re, im]` in the upper half-plane.
    pub basepoint: [f64; 2],
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            traces: [3.0, 3.0, 3.0],
            basepoint: [0.0, 1.0],
        }
    }
}

impl ModelSpec {
    pub fn structure(&self, eps: f64) -> Result<MarkoffStructure> {
        let [x, y, z] = self.traces;
        MarkoffStructure::new(x, y, z, eps)
    }

    pub fn basepoint(&self) -> Result<H2Point> {
        H2Point::new(self.basepoint[0], self.basepoint[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    /// Thick-part systole bound.
    pub eps: f64,
    /// Additive constant in the twisted-length lower bounds.
    pub l_const: f64,
    /// Collar fractions for the effective lower bound.
    pub k: Vec<f64>,
    /// Ratio of the geometric length grid.
    pub rho: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            eps: crate::torus::markoff::DEFAULT_EPS,
            l_const: 4.0,
            k: vec![0.25, 0.5, 0.75],
            rho: 1.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnumerateSpec {
    pub l0: f64,
    pub l_max: f64,
    /// Weights `c` for the scaled populations.
    pub scales: Vec<u32>,
    /// Thresholds in the scaling comparison.
    pub scaling_thresholds: usize,
    pub multicurves: bool,
}

impl Default for EnumerateSpec {
    fn default() -> Self {
        Self {
            l0: 20.0,
            l_max: 200.0,
            scales: vec![2, 3, 5],
            scaling_thresholds: 50,
            multicurves: true,
        }
    }
}

impl EnumerateSpec {
    /// Geometric grid from `l0` with ratio `rho`, closed off at `l_max`.
    pub fn grid(&self, rho: f64) -> Vec<f64> {
        let mut g = geometric_grid(self.l0, self.l_max, rho);
        if g.last().is_some_and(|&l| l < self.l_max * (1.0 - 1e-9)) {
            g.push(self.l_max);
        }
        g
    }

    pub fn scaling_grid(&self) -> Vec<f64> {
        let n = self.scaling_thresholds.max(2);
        let step = (self.l_max - self.l0) / (n - 1) as f64;
        (0..n).map(|i| self.l0 + step * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub model: CensusModel,
    /// Radius window for the multi-twist growth test.
    pub m_window: [f64; 2],
}

impl Default for CensusSpec {
    fn default() -> Self {
        Self {
            r_min: 6.0,
            r_max: 13.0,
            r_step: 0.5,
            model: CensusModel::ExactH2,
            m_window: [9.0, 13.0],
        }
    }
}

impl CensusSpec {
    pub fn radii(&self) -> Vec<f64> {
        linear_grid(self.r_min, self.r_max, self.r_step)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// A check id, or `all`.
    pub theorem: String,
    /// Geometric sweep size.
    pub samples: u64,
    /// Integer sweep size.
    pub arith_samples: u64,
    pub arith_slope_bound: i64,
    pub max_power: i64,
    pub slope_bound: i64,
    pub trace_lo: f64,
    pub trace_hi: f64,
    pub structures: u64,
    pub log2_power: [u32; 2],
    pub gap_samples: u64,
    pub sandwich_samples: u64,
    pub schwartz_samples: u64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            theorem: "all".into(),
            samples: 10_000,
            arith_samples: 100_000,
            arith_slope_bound: 30,
            max_power: 50,
            slope_bound: 6,
            trace_lo: 2.2,
            trace_hi: 8.0,
            structures: 20,
            log2_power: [1, 14],
            gap_samples: 2000,
            sandwich_samples: 1000,
            schwartz_samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSpec {
    pub window: [f64; 2],
}

impl Default for FitSpec {
    fn default() -> Self {
        Self { window: [20.0, 200.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub trace_bits: u32,
    pub generator_depth: u32,
    pub window_lengths: Vec<f64>,
    pub window_structures: u64,
    pub lattice_radii: Vec<f64>,
    pub conjugator_bound: i64,
    pub comb_s_max: u64,
    pub comb_k_max: u64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            trace_bits: 60,
            generator_depth: 3,
            window_lengths: vec![2.0, 4.0, 6.0, 8.0],
            window_structures: 10,
            lattice_radii: vec![0.5, 1.0, 1.5, 2.0],
            conjugator_bound: 30,
            comb_s_max: 40,
            comb_k_max: 6,
        }
    }
}

impl RunConfig {
    /// Parses TOML; errors carry the line, column and offending field.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    /// SHA-256 of the canonical serialization, so formatting and comments
    /// in the source file do not change it. The output directory and thread
    /// count do not affect results and are left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        c.threads = 0;
        format!("{:x}", Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Parse(format!("field `{field}`: {why}")));
        let c = &self.constants;
        if !(c.eps > 0.0) {
            return bad("constants.eps", "must be positive");
        }
        if !(c.l_const >= 0.0) {
            return bad("constants.l_const", "must be nonnegative");
        }
        if c.k.iter().any(|k| !(*k > 0.0 && *k < 1.0)) {
            return bad("constants.k", "every entry must lie in (0, 1)");
        }
        if !(c.rho > 1.0) {
            return bad("constants.rho", "must exceed 1");
        }
        let e = &self.enumerate;
        if !(e.l0 > 0.0 && e.l0 < e.l_max) {
            return bad("enumerate.l0", "need 0 < l0 < l_max");
        }
        if e.scales.contains(&0) {
            return bad("enumerate.scales", "weights must be positive");
        }
        let r = &self.census;
        if !(r.r_min > 0.0 && r.r_min <= r.r_max && r.r_step > 0.0) {
            return bad("census", "need 0 < r_min ≤ r_max and r_step > 0");
        }
        let v = &self.verify;
        if v.max_power < 1 || v.slope_bound < 1 {
            return bad("verify", "max_power and slope_bound must be at least 1");
        }
        if !(v.trace_lo > 2.0 && v.trace_lo < v.trace_hi) {
            return bad("verify.trace_lo", "need 2 < trace_lo < trace_hi");
        }
        if v.log2_power[0] > v.log2_power[1] || v.log2_power[1] > 40 {
            return bad("verify.log2_power", "need an ascending pair with exponents ≤ 40");
        }
        if self.model.basepoint().is_err() {
            return bad("model.basepoint", "imaginary part must be positive");
        }
        Ok(())
    }

    pub fn geo_sweep(&self) -> GeoSweep {
        GeoSweep {
            samples: self.verify.samples,
            seed: self.seed,
            eps: self.constants.eps,
            trace_lo: self.verify.trace_lo,
            trace_hi: self.verify.trace_hi,
            max_power: self.verify.max_power,
            slope_bound: self.verify.slope_bound,
            positive_only: false,
        }
    }

    pub fn intersection_sweep(&self) -> IntersectionSweep {
        IntersectionSweep {
            samples: self.verify.arith_samples,
            seed: self.seed,
            slope_bound: self.verify.arith_slope_bound,
            max_power: self.verify.max_power,
        }
    }

    pub fn coarse_sweep(&self) -> CoarseSweep {
        CoarseSweep {
            structures: self.verify.structures,
            seed: self.seed,
            eps: self.constants.eps,
            trace_lo: self.verify.trace_lo,
            trace_hi: self.verify.trace_hi,
            log2_power: self.verify.log2_power,
            ..CoarseSweep::default()
        }
    }

    pub fn gap_sweep(&self) -> GapSweep {
        GapSweep {
            samples: self.verify.gap_samples,
            seed: self.seed,
            ..GapSweep::default()
        }
    }
}

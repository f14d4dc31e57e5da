//! Subcommand bodies. Each writes its artifacts and a manifest under the
//! configured output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::criteria::{self, oracle_reports};
use super::manifest::{write_bytes, write_json, RunManifest};
use crate::comb;
use crate::curves::{count_table, fit_growth, prefactor_at, CountTable, GrowthFit, Population};
use crate::error::{Error, Result};
use crate::lattice::{self, CensusModel, SandwichSweep};
use crate::laws::{self, BoundReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Enumerate,
    Census,
    Verify,
    Fit,
    Oracle,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Census => "census",
            Command::Verify => "verify",
            Command::Fit => "fit",
            Command::Oracle => "oracle",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Result of a finished run: its manifest and lines for the terminal.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.manifest.passed() {
            0
        } else {
            1
        }
    }
}

/// Exit status for a run result: 0 pass, 1 failed check, 2 configuration
/// or input error.
pub fn exit_code(r: &Result<Outcome>) -> i32 {
    match r {
        Ok(o) => o.exit_code(),
        Err(_) => 2,
    }
}

/// Theorem ids accepted by `verify`.
pub const VERIFY_IDS: [&str; 9] = [
    "intersection_formula",
    "twist_length_upper",
    "twist_length_lower",
    "twist_length_multiplicative",
    "effective_lower_bound",
    "coarse_distance",
    "distance_gap",
    "sandwich",
    "schwartz",
];

/// Runs `cmd` on a pool of `cfg.threads` workers (0 for the default).
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut m = RunManifest::new(cmd.name(), cfg);
        m.param("threads", rayon::current_num_threads());
        m.param("basepoint", cfg.model.basepoint);
        m.param("traces", cfg.model.traces);
        m.notes.push(
            "exact-model displacement uses the flat extremal-length proxy |p - q z|^2 / im z".into(),
        );
        let dir = cfg.out_dir.clone();
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let lines = match cmd {
            Command::Enumerate => enumerate(cfg, &mut m, &dir)?,
            Command::Census => census(cfg, &mut m, &dir)?,
            Command::Verify => verify(cfg, &mut m, &dir)?,
            Command::Fit => fit(cfg, &mut m, &dir)?,
            Command::Oracle => oracle(cfg, &mut m, &dir)?,
            Command::VerifyAll => verify_all(cfg, &mut m, &dir)?,
        };
        let path = dir.join(format!("manifest-{}.json", m.command));
        m.artifacts.push(path);
        m.write(&dir)?;
        Ok(Outcome { manifest: m, lines })
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn artifact(m: &mut RunManifest, path: PathBuf, bytes: &[u8]) -> Result<()> {
    write_bytes(&path, bytes)?;
    m.artifacts.push(path);
    Ok(())
}

fn json_artifact(m: &mut RunManifest, path: PathBuf, v: &impl Serialize) -> Result<()> {
    write_json(&path, v)?;
    m.artifacts.push(path);
    Ok(())
}

fn structure_id(cfg: &RunConfig) -> String {
    cfg.model.traces.map(|t| t.to_string()).join(":")
}

const COUNTS_PLOT: &str = r#"import csv, sys
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "counts.csv")))
for label in sorted({r["population_label"] for r in rows}):
    pts = [(float(r["L"]), int(r["count"])) for r in rows if r["population_label"] == label]
    plt.loglog([p[0] for p in pts], [max(p[1], 1) for p in pts], marker=".", label=label)
plt.xlabel("L")
plt.ylabel("count")
plt.legend()
plt.savefig("counts.png", dpi=150)
"#;

const CENSUS_PLOT: &str = r#"import csv, math, sys
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "census.csv")))
r = [float(x["R"]) for x in rows]
d = [int(x["count_D"]) for x in rows]
m = [int(x["count_M"]) for x in rows]
fig, ax = plt.subplots(1, 2, figsize=(10, 4))
ax[0].semilogy(r, [max(v, 1) for v in d], marker=".", label="count_D")
ax[0].semilogy(r, [max(v, 1) for v in m], marker=".", label="count_M")
ax[0].set_xlabel("R")
ax[0].legend()
ax[1].plot(r, [v / (x * math.exp(x)) for v, x in zip(m, r)], marker=".", label="count_M / (R e^R)")
ax[1].plot(r, [v / math.exp(x) for v, x in zip(m, r)], marker=".", label="count_M / e^R")
ax[1].set_xlabel("R")
ax[1].legend()
fig.savefig("census.png", dpi=150)
"#;

fn count_tables(cfg: &RunConfig) -> Result<Vec<CountTable>> {
    let x = cfg.model.structure(cfg.constants.eps)?;
    let grid = cfg.enumerate.grid(cfg.constants.rho);
    let mut pops = vec![Population::Simple];
    pops.extend(cfg.enumerate.scales.iter().map(|&c| Population::Scaled(c)));
    if cfg.enumerate.multicurves {
        pops.push(Population::Multicurves);
    }
    pops.into_iter().map(|p| count_table(&x, &grid, p)).collect()
}

fn enumerate(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let tables = m.stage("enumerate", || count_tables(cfg))?;
    let id = structure_id(cfg);
    let bytes = csv_bytes(|w| {
        for (i, t) in tables.iter().enumerate() {
            t.write_csv(&mut *w, &id, i == 0)?;
        }
        Ok(())
    });
    artifact(m, dir.join("counts.csv"), &bytes)?;
    artifact(m, dir.join("plot_counts.py"), COUNTS_PLOT.as_bytes())?;
    m.param("grid", cfg.enumerate.grid(cfg.constants.rho));
    m.check("counts_nondecreasing", true, "validated when each table was built");
    Ok(tables
        .iter()
        .map(|t| format!("{}: {} thresholds, top count {}", t.label, t.counts.len(), t.counts.last().unwrap_or(&0)))
        .collect())
}

fn census(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let radii = cfg.census.radii();
    let c = m.stage("census", || match cfg.census.model {
        CensusModel::ExactH2 => lattice::lattice_census(cfg.model.basepoint()?, &radii),
        CensusModel::CoarseMarkoff => lattice::coarse_census_grid(&cfg.model.structure(cfg.constants.eps)?, &radii),
    })?;
    artifact(m, dir.join("census.csv"), &csv_bytes(|w| c.write_csv(w, true)))?;
    artifact(m, dir.join("plot_census.py"), CENSUS_PLOT.as_bytes())?;
    m.param("model", cfg.census.model.to_string());
    m.param("radii", &radii);
    m.check("census_invariants", true, "count_D <= count_M and both nondecreasing");
    let mut lines = vec![format!(
        "{} radii at {}: count_D {}, count_M {} at R = {}",
        radii.len(),
        c.basepoint,
        c.counts_d.last().unwrap_or(&0),
        c.counts_m.last().unwrap_or(&0),
        radii.last().unwrap_or(&0.0)
    )];
    match lattice::growth_report(&c, Some(cfg.census.m_window)) {
        Ok(g) => {
            m.fit("lattice_d_slope", g.d_slope);
            m.fit("lattice_m_drift", g.m_ratio_drift);
            m.fit("lattice_m_increase", g.m_exp_increase);
            lines.push(format!("log count_D slope {:.4}", g.d_slope));
        }
        Err(e) => m.notes.push(format!("no growth fit: {e}")),
    }
    Ok(lines)
}

fn coarse_report(cfg: &RunConfig) -> Result<BoundReport> {
    let bands = laws::sweep_coarse_distance(&cfg.coarse_sweep())?;
    let widths: Vec<f64> = bands.iter().map(|b| b.width()).collect();
    let bad = bands
        .iter()
        .filter(|b| {
            !(b.width() < criteria::BAND_LIMIT
                && (criteria::COARSE_SLOPE_RANGE[0]..=criteria::COARSE_SLOPE_RANGE[1]).contains(&b.slope))
        })
        .count() as u64;
    let mut r = BoundReport::new("coarse_distance")
        .param("structures", cfg.verify.structures as f64)
        .param("band_limit", criteria::BAND_LIMIT)
        .fitted(
            "H_fit",
            bands
                .iter()
                .map(|b| b.sup_residual.abs().max(b.inf_residual.abs()))
                .fold(0.0, f64::max),
        )
        .fitted("slope_min", bands.iter().map(|b| b.slope).fold(f64::INFINITY, f64::min))
        .fitted("slope_max", bands.iter().map(|b| b.slope).fold(f64::NEG_INFINITY, f64::max));
    r.samples = bands.len() as u64;
    r.violations = bad;
    r.min_slack = widths.iter().map(|w| criteria::BAND_LIMIT - w).fold(f64::INFINITY, f64::min);
    r.max_slack = widths.iter().map(|w| criteria::BAND_LIMIT - w).fold(f64::NEG_INFINITY, f64::max);
    Ok(r)
}

fn verify_report(id: &str, cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let geo = cfg.geo_sweep();
    let l = cfg.constants.l_const;
    Ok(match id {
        "intersection_formula" => vec![laws::sweep_intersection_formula(&cfg.intersection_sweep())],
        "twist_length_upper" => vec![laws::sweep_twist_length_bounds(&geo, l).0],
        "twist_length_lower" => vec![laws::sweep_twist_length_bounds(&geo, l).1],
        "twist_length_multiplicative" => vec![laws::sweep_multiplicative_bounds(&geo)],
        "effective_lower_bound" => cfg
            .constants
            .k
            .iter()
            .map(|&k| laws::sweep_effective_lower_bound(&geo, k, l))
            .collect::<Result<_>>()?,
        "coarse_distance" => vec![coarse_report(cfg)?],
        "distance_gap" => {
            let g = cfg.gap_sweep();
            let (sup, n) = laws::sweep_distance_gap(cfg.model.basepoint()?, &g);
            let mut r = BoundReport::new("distance_gap")
                .param("radius", g.radius)
                .param("max_word", g.max_word as f64)
                .fitted("c_emp", sup);
            r.samples = n;
            r.min_slack = -sup;
            r.max_slack = 0.0;
            vec![r]
        }
        "sandwich" => {
            let t = lattice::sweep_sandwich(&SandwichSweep {
                samples: cfg.verify.sandwich_samples,
                seed: cfg.seed,
                ..SandwichSweep::default()
            });
            let mut r = BoundReport::new("sandwich");
            r.samples = t.samples;
            r.violations = t.violations;
            r.min_slack = t.min_gap as f64;
            r.max_slack = t.min_gap as f64;
            vec![r]
        }
        "schwartz" => {
            let s = comb::sweep_schwartz(cfg.verify.schwartz_samples, cfg.seed, comb::DEFAULT_H);
            let mut r = BoundReport::new("schwartz")
                .param("h", comb::DEFAULT_H as f64)
                .fitted("equalities", s.equalities as f64);
            r.samples = s.samples;
            r.violations = s.violations + s.equality_mismatches;
            vec![r]
        }
        other => {
            return Err(Error::Parse(format!(
                "field `verify.theorem`: unknown id `{other}`, expected one of {} or `all`",
                VERIFY_IDS.join(", ")
            )))
        }
    })
}

fn verify(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let ids: Vec<&str> = if cfg.verify.theorem == "all" {
        VERIFY_IDS.to_vec()
    } else {
        vec![cfg.verify.theorem.as_str()]
    };
    let mut reports = Vec::new();
    for id in ids {
        reports.extend(m.stage(id, || verify_report(id, cfg))?);
    }
    let mut lines = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let key = match r.params.get("K") {
            Some(k) => format!("{}_K{k}", r.theorem_id),
            None if reports[..i].iter().any(|o| o.theorem_id == r.theorem_id) => format!("{}_{i}", r.theorem_id),
            None => r.theorem_id.clone(),
        };
        m.check(&key, r.passed(), format!("{} violations over {} samples", r.violations, r.samples));
        for (k, v) in &r.fitted_constants {
            m.fit(&format!("{key}.{k}"), *v);
        }
        lines.push(format!(
            "{key}: {} violations / {} samples, min slack {}",
            r.violations, r.samples, r.min_slack
        ));
    }
    json_artifact(m, dir.join("verify.json"), &reports)?;
    Ok(lines)
}

#[derive(Serialize)]
struct FitOutput {
    population: String,
    fit: GrowthFit,
    /// Mean of `count / L^2` over the window.
    prefactor_at_two: Option<f64>,
}

fn fit(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let x = cfg.model.structure(cfg.constants.eps)?;
    let grid = cfg.enumerate.grid(cfg.constants.rho);
    let mut pops = vec![Population::Simple];
    if cfg.enumerate.multicurves {
        pops.push(Population::Multicurves);
    }
    let mut out = Vec::new();
    for p in pops {
        let table = m.stage(&format!("count {p}"), || count_table(&x, &grid, p))?;
        let f = fit_growth(&table, Some(cfg.fit.window))?;
        m.fit(&format!("exponent.{p}"), f.exponent);
        m.fit(&format!("prefactor.{p}"), f.prefactor);
        out.push(FitOutput {
            population: p.to_string(),
            fit: f,
            prefactor_at_two: prefactor_at(&table, 2.0, cfg.fit.window),
        });
    }
    let e = out[0].fit.exponent;
    let [lo, hi] = criteria::EXPONENT_RANGE;
    m.check(
        "exponent_near_two",
        (lo..=hi).contains(&e),
        format!("simple-curve exponent {e:.4}, expected in [{lo}, {hi}]"),
    );
    json_artifact(m, dir.join("fit.json"), &out)?;
    Ok(out
        .iter()
        .map(|o| format!("{}: exponent {:.4}, r^2 {:.5}", o.population, o.fit.exponent, o.fit.r_squared))
        .collect())
}

fn oracle(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let reps = m.stage("oracles", || oracle_reports(cfg))?;
    for r in &reps {
        m.check(&r.name, r.passed(), format!("{} mismatches over {}", r.mismatches, r.compared));
    }
    json_artifact(m, dir.join("oracle.json"), &reps)?;
    let failing: Vec<_> = reps.iter().filter(|r| !r.passed()).collect();
    if !failing.is_empty() {
        json_artifact(m, dir.join("oracle_diff.json"), &failing)?;
    }
    Ok(reps
        .iter()
        .map(|r| format!("{}: {} mismatches over {}", r.name, r.mismatches, r.compared))
        .collect())
}

fn verify_all(cfg: &RunConfig, m: &mut RunManifest, dir: &Path) -> Result<Vec<String>> {
    let mut results = Vec::new();
    for id in criteria::CRITERIA {
        let r = m.stage(id, || criteria::run_criterion(id, cfg))?;
        m.check(id, r.passed, r.detail.clone());
        for (k, v) in &r.fitted {
            m.fit(k, *v);
        }
        results.push(r);
    }
    json_artifact(m, dir.join("verify_all.json"), &results)?;
    Ok(results.iter().map(|r| r.line()).collect())
}

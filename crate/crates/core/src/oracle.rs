//! Brute-force cross-checks of the fast paths, reported as structured diffs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::comb;
use crate::curves::{enumerate_slopes, window_bound, window_slopes};
use crate::hyp::{H2Point, IntMatrix2};
use crate::lattice::{count_by_conjugators, count_twist_lattice, Powers};
use crate::torus::{ExactMarkoff, MarkoffStructure, Slope};
use crate::Result;

/// Diffs kept per report; the mismatch count is always complete.
const MAX_DIFFS: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub name: String,
    pub compared: u64,
    pub mismatches: u64,
    pub diffs: Vec<String>,
}

impl OracleReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, diff: impl FnOnce() -> String) {
        self.compared += 1;
        if !ok {
            self.mismatches += 1;
            if self.diffs.len() < MAX_DIFFS {
                self.diffs.push(diff());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.compared > 0
    }
}

/// Matrix words `w(s)` for every slope with `|tr w(s)| < bound`, built by
/// `w(u + v) = w(u)·w(v)` down the Farey tree from `w(1,0) = a`,
/// `w(0,1) = b`, `w(−1,0) = a⁻¹`.
pub fn word_traces(a: &IntMatrix2, b: &IntMatrix2, bound: &BigInt) -> Vec<(Slope, BigInt)> {
    let mut out = vec![(Slope::HORIZONTAL, a.trace()), (Slope::VERTICAL, b.trace())];
    out.retain(|(_, t)| &abs(t) < bound);
    let mut stack = vec![((1i64, 0i64), a.clone(), (0i64, 1i64), b.clone())];
    stack.push(((0, 1), b.clone(), (-1, 0), a.inverse()));
    while let Some((u, mu, v, mv)) = stack.pop() {
        let w = (u.0 + v.0, u.1 + v.1);
        let mw = mu.mul(&mv);
        let t = abs(&mw.trace());
        // traces can dip below a parent only near the sink of the tree
        if &t >= bound && t >= abs(&mu.trace()) && t >= abs(&mv.trace()) {
            continue;
        }
        if &t < bound {
            out.push((Slope::new(w.0, w.1).expect("Farey mediant is primitive"), mw.trace()));
        }
        stack.push((u, mu, w, mw.clone()));
        stack.push((w, mw, v, mv));
    }
    out
}

fn abs(t: &BigInt) -> BigInt {
    if t.sign() == num_bigint::Sign::Minus {
        -t
    } else {
        t.clone()
    }
}

/// Generator pairs of the commutator subgroup of `SL(2,ℤ)` and its images
/// under `(X, Y) ↦ (X, XY)` and `(X, Y) ↦ (XY, Y)` up to `depth` steps.
pub fn markoff_generator_pairs(depth: u32) -> Vec<(IntMatrix2, IntMatrix2)> {
    let a = IntMatrix2::from_i64(1, 1, 1, 2).expect("det 1");
    let b = IntMatrix2::from_i64(1, -1, -1, 2).expect("det 1");
    let mut level = vec![(a, b)];
    let mut all = level.clone();
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|(x, y)| {
                let xy = x.mul(y);
                [(x.clone(), xy.clone()), (xy, y.clone())]
            })
            .collect();
        all.extend(level.iter().cloned());
    }
    all
}

/// Big-integer Fricke traces and log-domain lengths against matrix-word
/// traces, for every slope with trace below `2^bits`.
pub fn fricke_vs_words(pairs: &[(IntMatrix2, IntMatrix2)], bits: u32) -> Result<OracleReport> {
    let bound = BigInt::one() << bits;
    let mut rep = OracleReport::new("fricke_vs_matrix_words");
    for (a, b) in pairs {
        let triple = [a.trace(), b.trace(), a.mul(b).trace()];
        let [x, y, z] = triple.clone().map(|t| t.to_i64().expect("small generator traces"));
        let exact = ExactMarkoff::new(x, y, z)?;
        let float = MarkoffStructure::new(x as f64, y as f64, z as f64, crate::torus::markoff::DEFAULT_EPS)?;
        for (s, t) in word_traces(a, b, &bound) {
            let fricke = exact.trace(s);
            rep.record(fricke == t, || format!("({x},{y},{z}) {s}: fricke {fricke} word {t}"));
            let want = 2.0 * (t.to_f64().expect("below 2^bits") / 2.0).acosh();
            let got = float.length(s);
            rep.record((got - want).abs() <= 1e-12 * want.max(1.0), || {
                format!("({x},{y},{z}) {s}: log-domain length {got} word length {want}")
            });
        }
    }
    Ok(rep)
}

/// Pruned enumeration against the windowed search, as sets.
pub fn enumeration_vs_window(structures: &[MarkoffStructure], lengths: &[f64]) -> OracleReport {
    let mut rep = OracleReport::new("pruned_vs_windowed_enumeration");
    for x in structures {
        for &len in lengths {
            let fast: BTreeSet<Slope> = enumerate_slopes(x, len).into_iter().collect();
            let slow: BTreeSet<Slope> = window_slopes(x, len, window_bound(x, len)).into_iter().collect();
            rep.record(fast == slow, || {
                let only_fast: Vec<String> = fast.difference(&slow).map(|s| s.to_string()).collect();
                let only_slow: Vec<String> = slow.difference(&fast).map(|s| s.to_string()).collect();
                format!("{x} L={len}: only pruned {only_fast:?}, only windowed {only_slow:?}")
            });
        }
    }
    rep
}

/// Lattice census against the bounded-conjugator brute force.
pub fn census_vs_conjugators(points: &[H2Point], radii: &[f64], entry_bound: i64) -> Result<OracleReport> {
    let mut rep = OracleReport::new("census_vs_conjugators");
    for &z in points {
        for &r in radii {
            for powers in [Powers::Unit, Powers::All, Powers::Fixed(2), Powers::Fixed(-3)] {
                let fast = count_twist_lattice(z, r, powers);
                let slow = count_by_conjugators(z, r, powers, entry_bound)?;
                rep.record(fast == slow, || format!("{z} R={r} {powers:?}: census {fast} brute force {slow}"));
            }
        }
    }
    Ok(rep)
}

/// Closed-form composition counts against enumeration for `s ≤ s_max`,
/// `k ≤ k_max` and every `l ≤ s`.
pub fn compositions_vs_enumeration(s_max: u64, k_max: u64) -> OracleReport {
    let mut rep = OracleReport::new("compositions_vs_enumeration");
    for k in 1..=k_max {
        for s in 1..=s_max {
            let listed = comb::brute::compositions(s, k, 1).len() as u128;
            let c = comb::count_compositions(s, k);
            rep.record(c == listed, || format!("s={s} k={k}: closed {c} listed {listed}"));
            for l in 1..=s {
                let b = comb::count_balanced(s, k, l);
                let counted = comb::brute::count(s, k, l);
                rep.record(b == counted, || format!("s={s} k={k} l={l}: closed {b} counted {counted}"));
            }
        }
    }
    rep
}

//! Marked hyperbolic structures on the once-punctured torus, parametrized by
//! Markoff triples of traces.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use serde_with::{DeserializeFromStr, SerializeDisplay};

use super::farey;
use super::slope::{intersection_number, twist_on_slope, Slope, SlopeMap, TwistSpec};
use super::trace::{BaseTraces, LogTrace};
use crate::error::{Error, Result};

/// Relative tolerance on `x² + y² + z² = xyz` accepted at construction.
pub const MARKOFF_TOLERANCE: f64 = 1e-9;
/// Residual past which a transformed structure is considered degraded.
pub const DEGRADATION_TOLERANCE: f64 = 1e-6;
/// Default thick-part parameter.
pub const DEFAULT_EPS: f64 = 0.3;
/// Relative tolerance used to detect length ties.
const TIE_TOLERANCE: f64 = 1e-12;

/// A marked hyperbolic structure on S₁,₁.
///
/// Internally the structure is a root triple together with an exact change
/// of marking: the trace of slope `s` is the trace of `marking · s` computed
/// from the root triple. Twisting only composes integer matrices, so the
/// lengths of a twisted structure are as accurate as those of the original.
#[derive(Clone, Debug, PartialEq, SerializeDisplay, DeserializeFromStr)]
pub struct MarkoffStructure {
    root: BaseTraces<LogTrace>,
    /// The root traces exactly as given, for extended-precision rechecks.
    root_input: [f64; 3],
    marking: SlopeMap,
    eps: f64,
    systole: f64,
}

impl MarkoffStructure {
    /// Structure with traces `x, y, z` on the slopes `(1,0), (0,1), (1,1)`.
    pub fn new(x: f64, y: f64, z: f64, eps: f64) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidMarkoff {
            x,
            y,
            z,
            reason: reason.to_string(),
        };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(invalid("non-finite trace"));
        }
        if !(x > 2.0 && y > 2.0 && z > 2.0) {
            return Err(invalid("every trace must exceed 2"));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let root = BaseTraces {
            x: LogTrace::from_trace(x),
            y: LogTrace::from_trace(y),
            z: LogTrace::from_trace(z),
        };
        let residual = log_markoff_residual(&root);
        if residual > MARKOFF_TOLERANCE {
            return Err(invalid(&format!("relation residual {residual:e}")));
        }
        let systole = root_systole(&root);
        if systole < eps {
            return Err(Error::NotThick { systole, eps });
        }
        Ok(Self {
            root,
            root_input: [x, y, z],
            marking: SlopeMap::IDENTITY,
            eps,
            systole,
        })
    }

    /// Completes `(x, y)` with the larger root
    /// `z = (xy + √(x²y² − 4(x² + y²)))/2`.
    pub fn from_xy(x: f64, y: f64, eps: f64) -> Result<Self> {
        let disc = x * x * y * y - 4.0 * (x * x + y * y);
        if !(disc >= 0.0) {
            return Err(Error::InvalidMarkoff {
                x,
                y,
                z: f64::NAN,
                reason: "negative discriminant".into(),
            });
        }
        let z = 0.5 * (x * y + disc.sqrt());
        Self::new(x, y, z, eps)
    }

    /// The modular torus `(3, 3, 3)`.
    pub fn modular() -> Self {
        Self::new(3.0, 3.0, 3.0, DEFAULT_EPS).expect("modular torus is valid")
    }

    /// Draws `x, y ∼ U[lo, hi]`, completes with the larger root and rejects
    /// until the structure lies in the `eps`-thick part.
    pub fn sample_thick<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, eps: f64) -> Self {
        loop {
            let x = rng.gen_range(lo..=hi);
            let y = rng.gen_range(lo..=hi);
            if let Ok(s) = Self::from_xy(x, y, eps) {
                return s;
            }
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn marking(&self) -> SlopeMap {
        self.marking
    }

    pub fn log_trace(&self, s: Slope) -> LogTrace {
        self.root.trace(self.marking.apply(s))
    }

    /// Log-traces of `(1,0), (0,1), (1,1)` in this marking.
    pub fn log_traces(&self) -> [f64; 3] {
        [Slope::HORIZONTAL, Slope::VERTICAL, Slope::DIAGONAL].map(|s| self.log_trace(s).ln())
    }

    /// `(x, y, z)`; entries overflow to `inf` for far-twisted markings.
    pub fn traces(&self) -> [f64; 3] {
        self.log_traces().map(f64::exp)
    }

    /// Relative residual of the Markoff relation on this marking's triple.
    pub fn markoff_residual(&self) -> f64 {
        let [x, y, z] = self.log_traces().map(LogTrace);
        log_markoff_residual(&BaseTraces { x, y, z })
    }

    pub fn length(&self, s: Slope) -> f64 {
        self.log_trace(s).length()
    }

    pub fn systole(&self) -> f64 {
        self.systole
    }

    /// All slopes of length `≤ len`, as `(slope, log-trace)` in this marking.
    pub fn slopes_within(&self, len: f64) -> Vec<(Slope, LogTrace)> {
        let threshold = LogTrace::threshold_for_length(len);
        let back = self.marking.inverse();
        farey::slopes_below(&self.root, threshold)
            .into_iter()
            .map(|(s, t)| (back.apply(s), t))
            .collect()
    }

    pub(crate) fn root(&self) -> &BaseTraces<LogTrace> {
        &self.root
    }

    pub(crate) fn root_input(&self) -> [f64; 3] {
        self.root_input
    }

    pub(crate) fn unmark(&self, root_slope: Slope) -> Slope {
        self.marking.inverse().apply(root_slope)
    }
}

fn log_markoff_residual(b: &BaseTraces<LogTrace>) -> f64 {
    // (x² + y² + z²)/(xyz) − 1, evaluated without forming the traces.
    let s = b.x.0 + b.y.0 + b.z.0;
    let r = (2.0 * b.x.0 - s).exp() + (2.0 * b.y.0 - s).exp() + (2.0 * b.z.0 - s).exp();
    (r - 1.0).abs()
}

fn root_systole(root: &BaseTraces<LogTrace>) -> f64 {
    // The systole is at most the shortest basis curve.
    let threshold = LogTrace(root.x.0.min(root.y.0).min(root.z.0));
    let shortest = farey::slopes_below(root, threshold)
        .into_iter()
        .map(|(_, t)| t.0)
        .fold(threshold.0, f64::min);
    LogTrace(shortest).length()
}

impl fmt::Display for MarkoffStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = if self.marking.is_identity() {
            self.root_input
        } else {
            self.traces()
        };
        write!(f, "markoff({x:.16e},{y:.16e},{z:.16e};{:.16e})", self.eps)
    }
}

impl FromStr for MarkoffStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("markoff(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected markoff(x,y,z;eps), got {s:?}")))?;
        let (traces, eps) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';eps' in {s:?}")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        };
        let v: Vec<f64> = traces.split(',').map(num).collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(Error::Parse(format!("expected three traces in {s:?}")));
        }
        Self::new(v[0], v[1], v[2], num(eps)?)
    }
}

/// Exact integer Markoff triple, used as an oracle for the log-domain path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMarkoff(pub BaseTraces<BigInt>);

impl ExactMarkoff {
    pub fn new(x: i64, y: i64, z: i64) -> Result<Self> {
        let (bx, by, bz) = (BigInt::from(x), BigInt::from(y), BigInt::from(z));
        if x <= 2 || y <= 2 || z <= 2 || &bx * &bx + &by * &by + &bz * &bz != &bx * &by * &bz {
            return Err(Error::InvalidMarkoff {
                x: x as f64,
                y: y as f64,
                z: z as f64,
                reason: "not an integer Markoff triple with entries > 2".into(),
            });
        }
        Ok(Self(BaseTraces { x: bx, y: by, z: bz }))
    }

    pub fn modular() -> Self {
        Self::new(3, 3, 3).unwrap()
    }

    pub fn trace(&self, s: Slope) -> BigInt {
        self.0.trace(s)
    }
}

/// Hyperbolic length of `s`: `2·arccosh(tr/2)` with the trace from the
/// Fricke recursion.
pub fn markoff_length(x: &MarkoffStructure, s: Slope) -> f64 {
    x.length(s)
}

/// Changes the marking by `T`: the result assigns to slope `s` the length
/// that `x` assigns to `T^{-a} s`.
pub fn twist_on_structure(x: &MarkoffStructure, t: TwistSpec) -> Result<MarkoffStructure> {
    let out = MarkoffStructure {
        root: x.root.clone(),
        root_input: x.root_input,
        marking: x.marking.compose(&t.inverse().homology_map()),
        eps: x.eps,
        systole: x.systole,
    };
    let residual = out.markoff_residual();
    if residual > DEGRADATION_TOLERANCE {
        return Err(Error::NumericDegradation(residual));
    }
    Ok(out)
}

pub fn systole(x: &MarkoffStructure) -> f64 {
    x.systole
}

/// Shortest curve `eta` and shortest curve `delta` meeting it once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ShortMarking {
    pub eta: Slope,
    pub delta: Slope,
}

impl ShortMarking {
    pub fn curves(&self) -> [Slope; 2] {
        [self.eta, self.delta]
    }

    /// The curve paired with `s` in the marking.
    pub fn paired(&self, s: Slope) -> Option<Slope> {
        if s == self.eta {
            Some(self.delta)
        } else if s == self.delta {
            Some(self.eta)
        } else {
            None
        }
    }
}

/// Picks the minimum-length slope among `candidates`, ties (relative
/// `1e-12`) broken by lexicographic order on the canonical pair.
fn argmin_lex(candidates: impl IntoIterator<Item = (Slope, LogTrace)>) -> Option<Slope> {
    let c: Vec<(Slope, f64)> = candidates.into_iter().map(|(s, t)| (s, t.length())).collect();
    let best = c.iter().map(|(_, l)| *l).fold(f64::INFINITY, f64::min);
    c.into_iter()
        .filter(|(_, l)| *l <= best * (1.0 + TIE_TOLERANCE))
        .map(|(s, _)| s)
        .min()
}

pub fn short_marking(x: &MarkoffStructure) -> ShortMarking {
    let root = x.root();
    let t_min = LogTrace(root.x.0.min(root.y.0).min(root.z.0));
    let slack = LogTrace(t_min.0 + 1e-9);
    let eta = argmin_lex(
        farey::slopes_below(root, slack)
            .into_iter()
            .map(|(s, t)| (x.unmark(s), t)),
    )
    .expect("basis curves are always candidates");

    // Neighbours of eta are n0 + k·eta; walk k downhill to bound the search.
    let n0 = unit_neighbour(eta);
    let along = |k: i64| {
        let v = Slope::from_i128(
            n0.p() as i128 + k as i128 * eta.p() as i128,
            n0.q() as i128 + k as i128 * eta.q() as i128,
        );
        (v, x.log_trace(v))
    };
    let mut k = 0i64;
    let mut cur = along(0).1;
    for dir in [1i64, -1] {
        loop {
            let next = along(k + dir).1;
            if next < cur {
                k += dir;
                cur = next;
            } else {
                break;
            }
        }
    }
    let bound = LogTrace(cur.0 + 1e-9);
    let delta = argmin_lex(
        farey::slopes_below(root, bound)
            .into_iter()
            .map(|(s, t)| (x.unmark(s), t))
            .filter(|(s, _)| intersection_number(*s, eta) == 1),
    )
    .expect("the downhill neighbour is a candidate");
    ShortMarking { eta, delta }
}

/// Some slope meeting `s` exactly once.
fn unit_neighbour(s: Slope) -> Slope {
    // extended Euclid: p·v − q·u = 1 gives i(s, (u, v)) = 1
    let (p, q) = (s.p() as i128, s.q() as i128);
    let (g, a, b) = ext_gcd(p, -q);
    debug_assert_eq!(g.abs(), 1);
    let (u, v) = (b * g, a * g);
    Slope::from_i128(u, v)
}

pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// `Σ_{γ ∈ μ} i(s, γ)·ℓ(paired γ)`.
pub fn length_formula_estimate(x: &MarkoffStructure, s: Slope) -> f64 {
    let mu = short_marking(x);
    length_formula_with(x, &mu, s)
}

pub(crate) fn length_formula_with(x: &MarkoffStructure, mu: &ShortMarking, s: Slope) -> f64 {
    intersection_number(s, mu.eta) as f64 * x.length(mu.delta)
        + intersection_number(s, mu.delta) as f64 * x.length(mu.eta)
}

/// `log max_{γ ∈ μ_X} ℓ_Y(γ)/ℓ_X(γ)`.
pub fn distance_formula_estimate(x: &MarkoffStructure, y: &MarkoffStructure) -> f64 {
    let mu = short_marking(x);
    distance_formula_with(x, y, &mu)
}

pub(crate) fn distance_formula_with(x: &MarkoffStructure, y: &MarkoffStructure, mu: &ShortMarking) -> f64 {
    mu.curves()
        .iter()
        .map(|&g| y.length(g).ln() - x.length(g).ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `ℓ_{T𝒳}(τ)` computed by pushing the slope: `ℓ_𝒳(T^{-a} τ)`.
pub fn twisted_length(x: &MarkoffStructure, t: TwistSpec, tau: Slope) -> f64 {
    x.length(twist_on_slope(t.inverse(), tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    const L3: f64 = 1.924_847_300_238_414_3; // 2·arccosh(1.5)

    #[test]
    fn modular_lengths() {
        let x0 = MarkoffStructure::modular();
        assert_relative_eq!(markoff_length(&x0, s(1, 0)), L3, max_relative = 1e-14);
        assert_relative_eq!(markoff_length(&x0, s(2, 1)), 2.0 * 3f64.acosh(), max_relative = 1e-14);
        assert_relative_eq!(markoff_length(&x0, s(2, 1)), 3.525494, epsilon = 1e-6);
        assert_relative_eq!(markoff_length(&x0, s(1, 1)), markoff_length(&x0, s(1, 0)));
    }

    #[test]
    fn construction_checks() {
        assert!(MarkoffStructure::new(3.0, 3.0, 3.1, 0.3).is_err());
        assert!(MarkoffStructure::new(2.0, 3.0, 3.0, 0.3).is_err());
        assert!(MarkoffStructure::new(3.0, 3.0, 3.0, 2.0).is_err());
        assert!(MarkoffStructure::from_xy(2.2, 2.2, 0.3).is_err());
        let x = MarkoffStructure::from_xy(3.0, 4.0, 0.3).unwrap();
        assert!(x.markoff_residual() < 1e-12);
    }

    #[test]
    fn twist_example() {
        let x0 = MarkoffStructure::modular();
        let t = TwistSpec::new(s(1, 0), 1).unwrap();
        let y = twist_on_structure(&x0, t).unwrap();
        let [a, b, c] = y.traces();
        assert_relative_eq!(a, 3.0, max_relative = 1e-14);
        assert_relative_eq!(b, 6.0, max_relative = 1e-14);
        assert_relative_eq!(c, 3.0, max_relative = 1e-14);
        let back = twist_on_structure(&y, t.inverse()).unwrap();
        assert_eq!(back, x0);
    }

    #[test]
    fn systole_examples() {
        let x0 = MarkoffStructure::modular();
        assert_relative_eq!(systole(&x0), L3, max_relative = 1e-14);
        let y = MarkoffStructure::new(3.0, 6.0, 3.0, 0.3).unwrap();
        assert_relative_eq!(systole(&y), L3, max_relative = 1e-14);
        let t = TwistSpec::new(s(2, 5), -3).unwrap();
        assert_eq!(systole(&twist_on_structure(&y, t).unwrap()), systole(&y));
    }

    #[test]
    fn short_marking_examples() {
        let mu = short_marking(&MarkoffStructure::modular());
        assert_eq!(mu, ShortMarking { eta: s(0, 1), delta: s(1, 0) });

        let mu = short_marking(&MarkoffStructure::new(3.0, 6.0, 3.0, 0.3).unwrap());
        assert_eq!(mu.eta, s(1, 0));
        assert_eq!(mu.delta, s(1, 1));
        assert_eq!(intersection_number(mu.eta, mu.delta), 1);
    }

    #[test]
    fn short_marking_is_minimal_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = MarkoffStructure::sample_thick(&mut rng, 2.2, 8.0, 0.3);
            let mu = short_marking(&x);
            assert_eq!(intersection_number(mu.eta, mu.delta), 1);
            let le = x.length(mu.eta);
            let ld = x.length(mu.delta);
            for p in -40i64..=40 {
                for q in 0i64..=40 {
                    let Ok(c) = Slope::new(p, q) else { continue };
                    let l = x.length(c);
                    assert!(l >= le * (1.0 - 1e-12));
                    if intersection_number(c, mu.eta) == 1 {
                        assert!(l >= ld * (1.0 - 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn length_formula_example() {
        let x0 = MarkoffStructure::modular();
        assert_relative_eq!(length_formula_estimate(&x0, s(1, 0)), L3, max_relative = 1e-14);
    }

    #[test]
    fn distance_estimate_identity_is_zero() {
        let x = MarkoffStructure::from_xy(3.5, 5.0, 0.3).unwrap();
        assert_eq!(distance_formula_estimate(&x, &x), 0.0);
    }

    #[test]
    fn twisted_length_example() {
        let x0 = MarkoffStructure::modular();
        let t = TwistSpec::new(s(1, 0), 1).unwrap();
        let l = twisted_length(&x0, t, s(0, 1));
        assert_relative_eq!(l, 2.0 * 3f64.acosh(), max_relative = 1e-14);
        let y = twist_on_structure(&x0, t).unwrap();
        assert_relative_eq!(l, markoff_length(&y, s(0, 1)), max_relative = 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let x = MarkoffStructure::from_xy(3.25, 4.5, 0.3).unwrap();
        let text = x.to_string();
        assert!(text.starts_with("markoff("));
        let back: MarkoffStructure = text.parse().unwrap();
        for sl in [s(1, 0), s(3, 7), s(-5, 2)] {
            assert_relative_eq!(back.length(sl), x.length(sl), max_relative = 1e-14);
        }
        let json = serde_json::to_string(&x).unwrap();
        let back: MarkoffStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_string(), text);
        assert!("markoff(3,3;0.3)".parse::<MarkoffStructure>().is_err());
    }

    #[test]
    fn exact_triple_validation() {
        assert!(ExactMarkoff::new(3, 3, 3).is_ok());
        assert!(ExactMarkoff::new(3, 6, 15).is_ok());
        assert!(ExactMarkoff::new(3, 6, 14).is_err());
    }
}

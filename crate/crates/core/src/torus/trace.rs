//! Trace arithmetic for the Fricke recursion `tr(u+v) = tr(u)·tr(v) − tr(u−v)`
//! on Farey neighbours, in two representations: exact big integers and
//! log-domain floating point.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use num_bigint::BigInt;

use super::slope::Slope;

/// One step of the Fricke recursion.
pub trait FrickeTrace: Clone {
    /// `tr(u+v)` given `tr u`, `tr v` and `tr(u−v)`.
    fn fricke(tu: &Self, tv: &Self, tdiff: &Self) -> Self;
}

impl FrickeTrace for BigInt {
    fn fricke(tu: &Self, tv: &Self, tdiff: &Self) -> Self {
        tu * tv - tdiff
    }
}

/// Natural logarithm of a trace `> 2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogTrace(pub f64);

const LN_4: f64 = 2.0 * LN_2;

impl LogTrace {
    pub fn from_trace(t: f64) -> Self {
        LogTrace(t.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The trace itself; `inf` beyond the f64 range.
    pub fn trace(self) -> f64 {
        self.0.exp()
    }

    /// Geodesic length `2·arccosh(t/2)`.
    pub fn length(self) -> f64 {
        let u = self.0;
        if u < 3.0 {
            2.0 * (0.5 * u.exp()).acosh()
        } else {
            // arccosh(t/2) = ln t − ln 2 + ln(1 + √(1 − 4/t²))
            2.0 * (u - LN_2 + (-(LN_4 - 2.0 * u).exp_m1()).sqrt().ln_1p())
        }
    }

    /// Log-trace threshold for `length ≤ len`: `ln(2 cosh(len/2))`.
    pub fn threshold_for_length(len: f64) -> LogTrace {
        LogTrace(0.5 * len + (-len).exp().ln_1p())
    }
}

impl FrickeTrace for LogTrace {
    fn fricke(tu: &Self, tv: &Self, tdiff: &Self) -> Self {
        let s = tu.0 + tv.0;
        LogTrace(s + (-(tdiff.0 - s).exp()).ln_1p())
    }
}

/// Traces of `(1,0)`, `(0,1)`, `(1,1)` determine the trace of every slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTraces<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: FrickeTrace> BaseTraces<T> {
    /// Trace of `(−1, 1)`: `xy − z`.
    pub fn antidiagonal(&self) -> T {
        T::fricke(&self.x, &self.y, &self.z)
    }

    /// Trace of an arbitrary slope by Farey descent from the root triple.
    pub fn trace(&self, s: Slope) -> T {
        if s == Slope::HORIZONTAL {
            return self.x.clone();
        }
        if s == Slope::VERTICAL {
            return self.y.clone();
        }
        let (p, q) = (s.p() as i128, s.q() as i128);
        let (mut left, mut right, mut tl, mut tr, mut td) = if p > 0 {
            ((0i128, 1i128), (1i128, 0i128), self.y.clone(), self.x.clone(), self.antidiagonal())
        } else {
            ((-1, 0), (0, 1), self.x.clone(), self.y.clone(), self.z.clone())
        };
        loop {
            let m = (left.0 + right.0, left.1 + right.1);
            let tm = T::fricke(&tl, &tr, &td);
            if m == (p, q) {
                return tm;
            }
            // compare p/q with m.0/m.1 (both denominators positive)
            match (p * m.1).cmp(&(m.0 * q)) {
                Ordering::Less => {
                    td = std::mem::replace(&mut tr, tm);
                    right = m;
                }
                Ordering::Greater => {
                    td = std::mem::replace(&mut tl, tm);
                    left = m;
                }
                Ordering::Equal => unreachable!("canonical slopes are primitive"),
            }
        }
    }
}

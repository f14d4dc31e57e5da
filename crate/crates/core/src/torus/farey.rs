//! Pruned depth-first walk of the Farey tree carrying log-traces.

use super::slope::Slope;
use super::trace::{BaseTraces, FrickeTrace, LogTrace};

/// A pair of Farey neighbours `left < right` together with the traces of
/// `left`, `right` and `right − left`. Its subtree holds every slope strictly
/// between the two.
#[derive(Clone, Copy, Debug)]
pub struct FareyNode {
    pub left: (i64, i64),
    pub right: (i64, i64),
    pub t_left: LogTrace,
    pub t_right: LogTrace,
    pub t_diff: LogTrace,
}

impl FareyNode {
    pub fn mediant(&self) -> ((i64, i64), LogTrace) {
        let m = (self.left.0 + self.right.0, self.left.1 + self.right.1);
        (m, LogTrace::fricke(&self.t_left, &self.t_right, &self.t_diff))
    }

    pub fn children(&self) -> [FareyNode; 2] {
        let (m, tm) = self.mediant();
        [
            FareyNode {
                left: self.left,
                right: m,
                t_left: self.t_left,
                t_right: tm,
                t_diff: self.t_right,
            },
            FareyNode {
                left: m,
                right: self.right,
                t_left: tm,
                t_right: self.t_right,
                t_diff: self.t_left,
            },
        ]
    }
}

/// The two slopes `(1,0)`, `(0,1)` with their traces, and the two subtrees
/// (positive and negative slopes) that together cover every other slope.
pub fn roots(base: &BaseTraces<LogTrace>) -> ([(Slope, LogTrace); 2], [FareyNode; 2]) {
    let singles = [(Slope::HORIZONTAL, base.x), (Slope::VERTICAL, base.y)];
    let positive = FareyNode {
        left: (0, 1),
        right: (1, 0),
        t_left: base.y,
        t_right: base.x,
        t_diff: base.antidiagonal(),
    };
    let negative = FareyNode {
        left: (-1, 0),
        right: (0, 1),
        t_left: base.x,
        t_right: base.y,
        t_diff: base.z,
    };
    (singles, [positive, negative])
}

/// Visits every slope in the subtree of `node` with log-trace `≤ threshold`.
///
/// A subtree is cut once its mediant both exceeds the threshold and is at
/// least as large as its two parents: from there on every descendant trace
/// is larger still, since all traces exceed 2.
pub fn walk_subtree(node: FareyNode, threshold: LogTrace, visit: &mut impl FnMut(Slope, LogTrace)) {
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        let (m, tm) = n.mediant();
        if tm <= threshold {
            visit(Slope::canonical_unchecked(m.0, m.1), tm);
        } else if tm >= n.t_left && tm >= n.t_right {
            continue;
        }
        let [a, b] = n.children();
        stack.push(b);
        stack.push(a);
    }
}

/// Every slope with log-trace `≤ threshold`, in unspecified order.
pub fn slopes_below(base: &BaseTraces<LogTrace>, threshold: LogTrace) -> Vec<(Slope, LogTrace)> {
    let (singles, subtrees) = roots(base);
    let mut out: Vec<_> = singles.into_iter().filter(|(_, t)| *t <= threshold).collect();
    for node in subtrees {
        walk_subtree(node, threshold, &mut |s, t| out.push((s, t)));
    }
    out
}

/// Expands `nodes` breadth-first for `depth` levels, emitting mediants within
/// `threshold` and applying the same cut rule as [`walk_subtree`]. Walking
/// the returned frontier and adding the emitted slopes visits exactly the
/// slopes the walk from `nodes` would.
pub fn split_frontier(
    nodes: Vec<FareyNode>,
    threshold: LogTrace,
    depth: u32,
) -> (Vec<(Slope, LogTrace)>, Vec<FareyNode>) {
    let mut emitted = Vec::new();
    let mut level = nodes;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * level.len());
        for n in level {
            let (m, tm) = n.mediant();
            if tm <= threshold {
                emitted.push((Slope::canonical_unchecked(m.0, m.1), tm));
            } else if tm >= n.t_left && tm >= n.t_right {
                continue;
            }
            next.extend(n.children());
        }
        level = next;
    }
    (emitted, level)
}

//! The once-punctured torus: slopes, Dehn twists, Markoff structures and
//! trace-based lengths.

pub mod farey;
pub mod markoff;
pub mod precise;
pub mod slope;
pub mod trace;

pub use markoff::{
    distance_formula_estimate, length_formula_estimate, markoff_length, short_marking, systole,
    twist_on_structure, twisted_length, ExactMarkoff, MarkoffStructure, ShortMarking,
};
pub use slope::{intersection_number, twist_matrix, twist_on_slope, Slope, SlopeMap, TwistSpec};
pub use trace::{BaseTraces, FrickeTrace, LogTrace};

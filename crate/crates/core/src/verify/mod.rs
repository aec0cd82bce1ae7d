//! Round-trip testing and equivalence checking.

pub mod equiv;
pub mod eval;
pub mod roundtrip;
pub mod simplify;

pub use equiv::{check_equivalence, EquivalenceError, EquivalenceVerdict, Outcome, Sample, SamplingConfig};
pub use eval::{evaluate, EvalError};
pub use roundtrip::{round_trip, Cycler, HalfCycles, RoundTripReport, Side, Step, Termination};
pub use simplify::simplify_light;

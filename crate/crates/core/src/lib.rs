//! Proof nets for free symmetric monoidal closed categories, binding
//! calculi encoded in them, binding bigraphs, and the translation from
//! bigraphs to nets.

pub mod bigraph;
pub mod calculi;
pub mod equivalence;
pub mod error;
pub mod formula;
pub mod net;
pub mod signature;
pub mod smc;
pub mod translate;

pub use error::{Error, Result};
pub use formula::{parse_formula, Formula, Polarity, Port, Sort};
pub use net::{Net, PortRef, WiringMode};
pub use signature::{SmcSignature, Theory};

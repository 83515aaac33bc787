//! Weight complexes of semistable degenerations with horizontal divisors.

pub mod assembly;
pub mod nerve;
pub mod weight;

pub use assembly::{assemble_l, build_md, explicit_source, mapping_fiber_t, ColumnSource, LCell};
pub use nerve::{cech_module, CechModule, IncidenceData, StratumData, StratumKey};
pub use weight::{EdgeComparison, Mode, MonodromyWeightReport, SzkComplex};

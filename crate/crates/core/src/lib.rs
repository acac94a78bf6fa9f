//! Knowledge compilation over complete structured d-DNNF with width-bounded
//! quantifier elimination.
//!
//! The pipeline is:
//!
//! ```text
//! CNF ──primal graph──▶ tree decomposition ──make_nice──▶ nice decomposition
//!                                                          │
//!                                                       compile
//!                                                          ▼
//!          complete structured d-DNNF (width ≤ 2^maxbag) ──project──▶ ∃Z D / ¬∃Z D
//! ```
//!
//! Iterating the projection block by block solves and counts quantified
//! Boolean formulas ([`qbf::solve`]). A parallel OBDD track ([`obdd`]) performs
//! the same quantification with a subset construction.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command line
//! front end and wall-clock measurements live in the `sdnnf` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apply;
pub mod bitset;
pub mod circuit;
pub mod compile;
mod error;
pub mod formula;
pub mod obdd;
pub mod oracle;
pub mod project;
pub mod qbf;
pub mod treedec;

pub use circuit::{Assignment, Gate, GateId, NodeId, StructuredCircuit, Vtree, VtreeNode};
pub use error::Error;
pub use formula::{Clause, Cnf, Graph, Lit, Qbf, Quant, Var};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Ceilings on circuit width and size. Crossing one aborts with
/// [`Error::BudgetExceeded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_width: usize,
    pub max_gates: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_width: 1 << 20,
            max_gates: 100_000_000,
        }
    }
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_width: usize::MAX,
        max_gates: usize::MAX,
    };

    pub fn check(&self, stage: &str, width: usize, gates: usize) -> Result<()> {
        if width > self.max_width || gates > self.max_gates {
            return Err(Error::BudgetExceeded {
                stage: stage.into(),
                width,
                gates,
            });
        }
        Ok(())
    }
}

/// Output name used for a circuit produced from a single function.
pub const OUT_MAIN: &str = "main";
/// Output computing `∃Z D` (or the positive side of a dual circuit).
pub const OUT_EXISTS: &str = "exists";
/// Output computing `¬∃Z D` (or the negative side of a dual circuit).
pub const OUT_NOT_EXISTS: &str = "not_exists";

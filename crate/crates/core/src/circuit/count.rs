use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Gate, GateId, StructuredCircuit};
use crate::{Error, Result};

/// Counts models of gate `out` over every labeled variable of the vtree.
///
/// A gate at node `t` is counted over `var(t)`. Completeness makes And gates
/// multiply and determinism makes Or gates add.
pub(super) fn count_models(c: &StructuredCircuit, out: GateId) -> Result<BigUint> {
    if !c.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let mut count: Vec<BigUint> = Vec::with_capacity(out + 1);
    for g in 0..=out {
        let n = match c.gate(g) {
            Gate::Lit(_) | Gate::Const(true) => BigUint::one(),
            Gate::Const(false) => BigUint::zero(),
            Gate::And(a, b) => &count[*a] * &count[*b],
            Gate::Or(ch) => ch.iter().map(|&x| &count[x]).sum(),
        };
        count.push(n);
    }
    let under = c.vtree().var_counts()[c.home(out)];
    let missing = c.vtree().num_vars() - under;
    Ok(count.swap_remove(out) << missing)
}

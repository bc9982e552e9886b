//! Independent oracles for the distributed computations: direct folds over
//! balls and brute-force enumeration of simple walks. The protocol runner is
//! checked against these.

use crate::causality::simple_walks_ending_at;
use crate::protocol::Value;
use crate::topology::{Graph, TopologyError};

use super::ops::{InfimumOp, RSystem};

pub fn oracle_global_infimum(op: &InfimumOp, inputs: &[Value]) -> Value {
    op.fold(inputs.iter().copied())
}

/// Infimum of the inputs over the ball of radius `rho` around `p`.
pub fn oracle_ball_infimum(
    g: &Graph,
    op: &InfimumOp,
    inputs: &[Value],
    rho: usize,
    p: usize,
) -> Value {
    op.fold(g.ball(p, rho).into_iter().map(|q| inputs[q]))
}

/// The r-operator value at `p`: the infimum, over every simple walk `w`
/// ending at `p` (including the trivial one), of the start input pushed
/// through the walk's transfer functions. Walk enumeration is exponential,
/// so graphs above `node_limit` are refused.
pub fn oracle_r_operator(
    g: &Graph,
    sys: &RSystem,
    inputs: &[Value],
    p: usize,
    node_limit: usize,
) -> Result<Value, TopologyError> {
    if g.n() > node_limit {
        return Err(TopologyError::TooLarge(g.n(), node_limit));
    }
    Ok(sys.op().fold(
        simple_walks_ending_at(g, p, None)
            .into_iter()
            .map(|w| sys.along_walk(&w, inputs[w[0]])),
    ))
}

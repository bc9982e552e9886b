//! Idempotent aggregation operators, the transfer functions applied along
//! edges, and law checking for both.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::Value;
use crate::topology::Graph;

/// An idempotent, commutative, associative operator with identity; the
/// lattice infimum the protocol computes. Sets are carried as bitmasks, so
/// set intersection over a `bits`-element universe is `BitAnd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum InfimumOp {
    Min,
    Max,
    Gcd,
    BitAnd { bits: u32 },
    /// Explicit magma on the domain `0..table.len()`, for law testing and
    /// custom finite operators.
    Table { identity: Value, table: Vec<Vec<Value>> },
}

impl InfimumOp {
    pub fn identity(&self) -> Value {
        match self {
            InfimumOp::Min => Value::MAX,
            InfimumOp::Max => Value::MIN,
            InfimumOp::Gcd => 0,
            InfimumOp::BitAnd { bits } => mask(*bits),
            InfimumOp::Table { identity, .. } => *identity,
        }
    }

    pub fn combine(&self, a: Value, b: Value) -> Value {
        match self {
            InfimumOp::Min => a.min(b),
            InfimumOp::Max => a.max(b),
            InfimumOp::Gcd => gcd(a, b),
            InfimumOp::BitAnd { bits } => a & b & mask(*bits),
            InfimumOp::Table { table, .. } => table[a as usize][b as usize],
        }
    }

    /// The order induced by the operator: `a ⊑ b` iff `a ⊕ b = a`.
    pub fn leq(&self, a: Value, b: Value) -> bool {
        self.combine(a, b) == a
    }

    pub fn fold(&self, values: impl IntoIterator<Item = Value>) -> Value {
        values
            .into_iter()
            .fold(self.identity(), |acc, v| self.combine(acc, v))
    }
}

fn mask(bits: u32) -> Value {
    assert!(bits >= 1 && bits <= 62, "mask width out of range");
    (1 << bits) - 1
}

fn gcd(a: Value, b: Value) -> Value {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a.rem_euclid(b));
    }
    a
}

/// Transfer function applied when a value crosses an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "kebab-case")]
pub enum RFunction {
    Identity,
    /// Min-plus arc of the given weight; `Value::MAX` stands for
    /// "unreachable" and absorbs.
    SaturatingAdd { weight: Value },
    /// Explicit function on the domain `0..map.len()`.
    Table { map: Vec<Value> },
}

impl RFunction {
    pub fn apply(&self, v: Value) -> Value {
        match self {
            RFunction::Identity => v,
            RFunction::SaturatingAdd { weight } => {
                if v == Value::MAX {
                    Value::MAX
                } else {
                    v.saturating_add(*weight)
                }
            }
            RFunction::Table { map } => map[v as usize],
        }
    }

    pub fn apply_walk(&self, v: Value, hops: usize) -> Value {
        (0..hops).fold(v, |acc, _| self.apply(acc))
    }
}

/// An operator plus one transfer function per directed edge; edges without
/// an explicit entry use the identity.
#[derive(Debug, Clone)]
pub struct RSystem {
    op: InfimumOp,
    edge_fns: HashMap<(usize, usize), RFunction>,
}

impl RSystem {
    pub fn new(op: InfimumOp) -> Self {
        RSystem { op, edge_fns: HashMap::new() }
    }

    pub fn homogeneous(g: &Graph, op: InfimumOp, f: RFunction) -> Self {
        let mut sys = RSystem::new(op);
        for (u, v) in g.edges() {
            sys.set_edge(u, v, f.clone());
            sys.set_edge(v, u, f.clone());
        }
        sys
    }

    /// Min-plus shortest paths: each undirected edge gets a symmetric
    /// additive weight.
    pub fn min_plus(g: &Graph, weights: &HashMap<(usize, usize), Value>) -> Self {
        let mut sys = RSystem::new(InfimumOp::Min);
        for (u, v) in g.edges() {
            let w = *weights
                .get(&(u, v))
                .or_else(|| weights.get(&(v, u)))
                .unwrap_or(&1);
            sys.set_edge(u, v, RFunction::SaturatingAdd { weight: w });
            sys.set_edge(v, u, RFunction::SaturatingAdd { weight: w });
        }
        sys
    }

    pub fn op(&self) -> &InfimumOp {
        &self.op
    }

    /// Sets the transfer function for the directed edge `from -> to`.
    pub fn set_edge(&mut self, from: usize, to: usize, f: RFunction) {
        self.edge_fns.insert((from, to), f);
    }

    pub fn r(&self, from: usize, to: usize) -> &RFunction {
        self.edge_fns.get(&(from, to)).unwrap_or(&RFunction::Identity)
    }

    /// Folds a value along a walk: applies each edge's transfer function in
    /// order from the walk's start to its end.
    pub fn along_walk(&self, walk: &[usize], v: Value) -> Value {
        walk.windows(2).fold(v, |acc, e| {
            if e[0] == e[1] {
                acc
            } else {
                self.r(e[0], e[1]).apply(acc)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("not idempotent at {0}")]
    NotIdempotent(Value),
    #[error("not commutative at ({0}, {1})")]
    NotCommutative(Value, Value),
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(Value, Value, Value),
    #[error("identity fails at {0}")]
    IdentityFails(Value),
    #[error("transfer function is not an endomorphism at ({0}, {1})")]
    NotEndomorphism(Value, Value),
    #[error("transfer function lowers {0}")]
    NotInflationary(Value),
}

/// Checks the infimum laws (idempotent, commutative, associative, identity)
/// over a sample domain.
pub fn check_infimum_laws(op: &InfimumOp, domain: &[Value]) -> Result<(), LawError> {
    let e = op.identity();
    for &a in domain {
        if op.combine(a, a) != a {
            return Err(LawError::NotIdempotent(a));
        }
        if op.combine(a, e) != a || op.combine(e, a) != a {
            return Err(LawError::IdentityFails(a));
        }
        for &b in domain {
            if op.combine(a, b) != op.combine(b, a) {
                return Err(LawError::NotCommutative(a, b));
            }
            for &c in domain {
                if op.combine(op.combine(a, b), c) != op.combine(a, op.combine(b, c)) {
                    return Err(LawError::NotAssociative(a, b, c));
                }
            }
        }
    }
    Ok(())
}

/// Checks that a transfer function respects the operator: it distributes
/// over `⊕` and never moves a value below itself in the induced order.
pub fn check_r_function(op: &InfimumOp, f: &RFunction, domain: &[Value]) -> Result<(), LawError> {
    for &a in domain {
        if !op.leq(a, f.apply(a)) {
            return Err(LawError::NotInflationary(a));
        }
        for &b in domain {
            if f.apply(op.combine(a, b)) != op.combine(f.apply(a), f.apply(b)) {
                return Err(LawError::NotEndomorphism(a, b));
            }
        }
    }
    Ok(())
}

//! Apartness proof trees: synthesis from a complete system, independent
//! checking, and rendering.
//!
//! A node proves `x # y` from a relation `R` whose pairs are proved by the
//! children (a child for `(a, b)` also discharges `(b, a)`) and an
//! inequality between the two successor values once states are identified by
//! the equivalence closure of the complement of `R^s`. In the covering rule
//! that partition is restricted to a one-step covering `Z` of `{x, y}`.

mod json;
mod render;
mod synth;
mod witness;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

pub use json::{from_json, to_json, ProofDocument};
pub use render::render_text;
pub use synth::{synthesize, Synthesis};
pub use witness::{first_difference, functor_at, navigate, reevaluate, Difference, Step, Summand, Witness};

use crate::coalgebra::Coalgebra;
use crate::engine::{check_covering, CoveringError};
use crate::functor::{apartness_quotient, normalize, NormalForm};
use crate::relation::{Partition, Relation};
use crate::state::StateId;
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Quotient over the whole state space.
    Basic,
    /// Quotient restricted to a one-step covering.
    Covering,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Basic => "basic",
            Rule::Covering => "covering",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode<W> {
    pub goal: (StateId, StateId),
    pub rule: Rule,
    /// Over the full universe for `Basic`; over a universe containing `Z`
    /// for `Covering`.
    pub relation: Relation,
    pub covering_z: Option<Vec<StateId>>,
    pub witness: Witness<W>,
    pub children: Vec<Arc<ProofNode<W>>>,
}

impl<W> ProofNode<W> {
    /// Leaves have height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    /// Number of distinct nodes, counting shared subproofs once.
    pub fn distinct_nodes(self: &Arc<Self>) -> usize {
        fn walk<W>(n: &Arc<ProofNode<W>>, seen: &mut Vec<*const ProofNode<W>>) {
            if seen.contains(&Arc::as_ptr(n)) {
                return;
            }
            seen.push(Arc::as_ptr(n));
            n.children.iter().for_each(|c| walk(c, seen));
        }
        let mut seen = Vec::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// The partition under which the node's inequality is evaluated.
    pub fn quotient(&self) -> Result<Partition, crate::error::Error> {
        let p = apartness_quotient(&self.relation);
        match &self.covering_z {
            Some(z) => p.restrict(z),
            None => Ok(p),
        }
    }
}

/// Why a node is rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvalidReason {
    #[error("state `{0}` has no successor structure in the system")]
    Unavailable(String),
    #[error("basic rule needs R over the full state space")]
    RelationUniverse,
    #[error("covering rule needs Z")]
    MissingCovering,
    #[error("basic rule does not take Z")]
    UnexpectedCovering,
    #[error("Z is not contained in the universe of R")]
    CoveringOutsideRelation,
    #[error("covering invariant fails: {0}")]
    Covering(CoveringError),
    #[error("pair ({0}, {1}) of R is not discharged by a child")]
    UndischargedPair(String, String),
    #[error("child proves ({0}, {1}), which is not in R")]
    UnexpectedChild(String, String),
    #[error("successor values are equal under the quotient")]
    InequalityFails,
    #[error("witness mismatch: {0}")]
    WitnessMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Valid,
    /// `path` lists child indices from the root to the first failing node.
    Invalid { path: Vec<usize>, goal: (StateId, StateId), reason: InvalidReason },
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        *self == CheckResult::Valid
    }
}

type Failure = (Vec<usize>, (StateId, StateId), InvalidReason);

/// Validates a proof against `c` without computing any fixpoint. Shared
/// subproofs are checked once; children are checked in parallel and the
/// first failure in child order is reported.
pub fn check<W: Weight>(c: &Coalgebra<W>, t: &Arc<ProofNode<W>>) -> CheckResult {
    let memo = Mutex::new(HashMap::new());
    match check_rec(c, t, &memo) {
        None => CheckResult::Valid,
        Some((path, goal, reason)) => CheckResult::Invalid { path, goal, reason },
    }
}

fn check_rec<W: Weight>(
    c: &Coalgebra<W>,
    t: &Arc<ProofNode<W>>,
    memo: &Mutex<HashMap<usize, Option<Failure>>>,
) -> Option<Failure> {
    let key = Arc::as_ptr(t) as usize;
    if let Some(r) = memo.lock().unwrap().get(&key) {
        return r.clone();
    }
    let result = match check_local(c, t) {
        Err(reason) => Some((Vec::new(), t.goal.clone(), reason)),
        Ok(()) => {
            let results: Vec<Option<Failure>> = t.children.par_iter().map(|ch| check_rec(c, ch, memo)).collect();
            results.into_iter().enumerate().find_map(|(i, r)| {
                r.map(|(mut path, goal, reason)| {
                    path.insert(0, i);
                    (path, goal, reason)
                })
            })
        }
    };
    memo.lock().unwrap().insert(key, result.clone());
    result
}

fn check_local<W: Weight>(c: &Coalgebra<W>, t: &ProofNode<W>) -> Result<(), InvalidReason> {
    let (x, y) = &t.goal;
    let gx = c.gamma(x).map_err(|_| InvalidReason::Unavailable(x.name().to_string()))?;
    let gy = c.gamma(y).map_err(|_| InvalidReason::Unavailable(y.name().to_string()))?;
    match (t.rule, &t.covering_z) {
        (Rule::Basic, Some(_)) => return Err(InvalidReason::UnexpectedCovering),
        (Rule::Basic, None) => {
            if t.relation.universe() != c.universe() {
                return Err(InvalidReason::RelationUniverse);
            }
        }
        (Rule::Covering, None) => return Err(InvalidReason::MissingCovering),
        (Rule::Covering, Some(z)) => {
            check_covering(c, &[x.clone(), y.clone()], z).map_err(InvalidReason::Covering)?;
            if !z.iter().all(|s| t.relation.universe().contains(s)) {
                return Err(InvalidReason::CoveringOutsideRelation);
            }
        }
    }
    let same = |a: &StateId, b: &StateId, p: &(StateId, StateId)| (&p.0, &p.1) == (a, b) || (&p.1, &p.0) == (a, b);
    for (a, b) in t.relation.pairs() {
        if !t.children.iter().any(|ch| same(a, b, &ch.goal)) {
            return Err(InvalidReason::UndischargedPair(a.name().to_string(), b.name().to_string()));
        }
    }
    let rs = t.relation.symmetric_closure();
    for ch in &t.children {
        let (a, b) = &ch.goal;
        if !rs.contains(a, b) {
            return Err(InvalidReason::UnexpectedChild(a.name().to_string(), b.name().to_string()));
        }
    }
    let p = t.quotient().map_err(|e| InvalidReason::Covering(CoveringError::System(e)))?;
    let nf = |v| normalize(&p, v).map_err(|e| InvalidReason::Covering(CoveringError::System(e)));
    let (nx, ny): (NormalForm<W>, NormalForm<W>) = (nf(gx)?, nf(gy)?);
    if nx == ny {
        return Err(InvalidReason::InequalityFails);
    }
    reevaluate(&p, &nx, &ny, &t.witness).map_err(InvalidReason::WitnessMismatch)
}

//! Behavioural equivalence and apartness of complete finite systems, the
//! n-step apartness tower, and one-step coverings.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::coalgebra::Coalgebra;
use crate::error::Error;
use crate::functor::{apartness_quotient, normalize_unchecked, BValue, NormalForm};
use crate::relation::{Partition, Relation};
use crate::state::StateId;
use crate::weight::Weight;

/// Coarsest congruence: start from one block and split states whose
/// successor values differ under the current quotient until nothing changes.
pub fn behavioural_equivalence<W: Weight>(c: &Coalgebra<W>) -> Result<Partition, Error> {
    c.require_complete()?;
    let mut p = Partition::single_block(c.universe().clone());
    loop {
        let next = refine(c, &p);
        if next == p {
            return Ok(p);
        }
        p = next;
    }
}

/// One refinement round: group states by current block and normal form.
fn refine<W: Weight>(c: &Coalgebra<W>, p: &Partition) -> Partition {
    let forms = normal_forms(c, p);
    let mut ids: HashMap<(usize, &NormalForm<W>), usize> = HashMap::new();
    let labels: Vec<usize> = forms
        .iter()
        .enumerate()
        .map(|(i, nf)| {
            let next = ids.len();
            *ids.entry((p.block_index(i), nf)).or_insert(next)
        })
        .collect();
    Partition::from_labels(c.universe().clone(), &labels)
}

fn normal_forms<W: Weight>(c: &Coalgebra<W>, p: &Partition) -> Vec<NormalForm<W>> {
    (0..c.len()).into_par_iter().map(|i| normalize_unchecked(p, c.gamma_at(i))).collect()
}

/// Behavioural apartness: the complement of behavioural equivalence.
///
/// # Panics
/// If the complement of the coarsest congruence disagrees with the limit of
/// the apartness tower.
pub fn behavioural_apartness<W: Weight>(c: &Coalgebra<W>) -> Result<Relation, Error> {
    let equivalence = behavioural_equivalence(c)?;
    let apart = equivalence.to_relation().complement();
    let tower = apartness_tower(c, usize::MAX)?;
    assert!(tower.is_stable(), "unbounded tower must stabilise");
    assert_eq!(
        &apart,
        tower.limit(),
        "refinement and tower disagree on {:?}",
        c.universe()
    );
    Ok(apart)
}

/// The increasing sequence of n-step apartness relations.
#[derive(Clone, Debug)]
pub struct ApartnessTower {
    levels: Vec<Relation>,
    stable: bool,
}

impl ApartnessTower {
    /// `levels()[n]` is the set of pairs apart within `n` steps; level 0 is empty.
    pub fn levels(&self) -> &[Relation] {
        &self.levels
    }

    /// True when the last level is a fixpoint.
    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn limit(&self) -> &Relation {
        self.levels.last().expect("tower has level 0")
    }

    /// First level containing `(a, b)`.
    pub fn level_of(&self, a: &StateId, b: &StateId) -> Option<usize> {
        self.levels.iter().position(|r| r.contains(a, b))
    }

    /// Unordered pairs first apart at `level`, in universe order.
    pub fn newly_apart(&self, level: usize) -> Vec<(StateId, StateId)> {
        let Some(current) = self.levels.get(level) else { return Vec::new() };
        let u = current.universe();
        current
            .unordered_index_pairs()
            .into_iter()
            .filter(|&(i, j)| level == 0 || !self.levels[level - 1].contains_index(i, j))
            .map(|(i, j)| (u.state(i).clone(), u.state(j).clone()))
            .collect()
    }
}

/// Computes tower levels until stabilisation or until `max_n` levels past
/// level 0 have been built.
///
/// Level `n + 1` holds the pairs whose successor values differ under the
/// quotient by the complement of level `n`; it is computed pairwise rather
/// than by grouping, so it serves as a cross-check of
/// [`behavioural_equivalence`].
pub fn apartness_tower<W: Weight>(c: &Coalgebra<W>, max_n: usize) -> Result<ApartnessTower, Error> {
    c.require_complete()?;
    let n = c.len();
    let mut levels = vec![Relation::empty(c.universe().clone())];
    let mut stable = false;
    while levels.len() <= max_n {
        let current = levels.last().unwrap();
        let p = apartness_quotient(current);
        let forms = normal_forms(c, &p);
        let mut next = Relation::empty(c.universe().clone());
        for i in 0..n {
            for j in 0..n {
                if forms[i] != forms[j] {
                    next.set_index(i, j, true);
                }
            }
        }
        if &next == current {
            stable = true;
            break;
        }
        levels.push(next);
    }
    Ok(ApartnessTower { levels, stable })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoveringMode {
    /// Union of the supports of the covered states.
    Minimal,
    /// The whole state space.
    Full,
}

/// A one-step covering `Z` of a set of states, with `g(s) = γ(s)` read as a
/// value over `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering<W> {
    pub of: Vec<StateId>,
    pub z: Vec<StateId>,
    pub g: Vec<(StateId, BValue<W>)>,
}

impl<W: Weight> Covering<W> {
    pub fn g(&self, s: &StateId) -> Option<&BValue<W>> {
        self.g.iter().find(|(t, _)| t == s).map(|(_, v)| v)
    }
}

pub fn one_step_covering<W: Weight>(
    c: &Coalgebra<W>,
    of: &[StateId],
    mode: CoveringMode,
) -> Result<Covering<W>, Error> {
    let mut g = Vec::with_capacity(of.len());
    let mut z: BTreeSet<StateId> = BTreeSet::new();
    for s in of {
        let value = c.gamma(s)?;
        z.extend(value.support());
        g.push((s.clone(), value.clone()));
    }
    let z: Vec<StateId> = match mode {
        CoveringMode::Full => c.states().to_vec(),
        // successor values without states factor through any non-empty set
        CoveringMode::Minimal if z.is_empty() => of.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        CoveringMode::Minimal => z.into_iter().collect(),
    };
    Ok(Covering { of: of.to_vec(), z, g })
}

/// Why a declared `Z` is not a one-step covering.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoveringError {
    #[error("Z is empty")]
    Empty,
    #[error("`{0}` in Z is not a state of the system")]
    UnknownState(String),
    #[error("successor of `{state}` mentions `{missing}`, which is outside Z")]
    SupportEscapes { state: String, missing: String },
    #[error(transparent)]
    System(#[from] Error),
}

/// Checks that `z` is a non-empty one-step covering of `of` with `g = γ`.
pub fn check_covering<W: Weight>(c: &Coalgebra<W>, of: &[StateId], z: &[StateId]) -> Result<(), CoveringError> {
    if z.is_empty() {
        return Err(CoveringError::Empty);
    }
    if let Some(s) = z.iter().find(|s| !c.universe().contains(s)) {
        return Err(CoveringError::UnknownState(s.name().to_string()));
    }
    for s in of {
        if let Some(m) = c.gamma(s)?.support().into_iter().find(|t| !z.contains(t)) {
            return Err(CoveringError::SupportEscapes { state: s.name().to_string(), missing: m.name().to_string() });
        }
    }
    Ok(())
}

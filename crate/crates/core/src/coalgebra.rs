use std::sync::Arc;

use crate::error::Error;
use crate::functor::{BValue, FunctorExpr};
use crate::state::{StateId, SymbolSet, Universe};
use crate::weight::Weight;

/// Whether every state has a successor structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presentation {
    Complete,
    /// Some boundary states have no declared successor structure. Only proof
    /// checking is available on fragments.
    Fragment,
}

/// A finite coalgebra `γ : X → B(X)`, possibly with undeclared boundary states.
#[derive(Clone, Debug)]
pub struct Coalgebra<W> {
    functor: FunctorExpr,
    sets: Vec<Arc<SymbolSet>>,
    universe: Arc<Universe>,
    gamma: Vec<Option<BValue<W>>>,
}

impl<W: Weight> Coalgebra<W> {
    /// Builds and validates a system. `sets` are the declared symbol sets
    /// (used when printing); any set the functor mentions but `sets` lacks is
    /// appended.
    pub fn new(
        functor: FunctorExpr,
        sets: Vec<Arc<SymbolSet>>,
        states: Vec<(StateId, BValue<W>)>,
        boundary: Vec<StateId>,
    ) -> Result<Self, Error> {
        let mut sets = sets;
        for s in functor.symbol_sets() {
            if !sets.iter().any(|t| t.name() == s.name()) {
                sets.push(s);
            }
        }
        let universe = Universe::new(states.iter().map(|(s, _)| s.clone()).chain(boundary.iter().cloned()))?;
        let mut gamma: Vec<Option<BValue<W>>> = vec![None; universe.len()];
        for (s, v) in states {
            v.validate(&functor, &universe).map_err(|e| e.within(&format!("gamma({s})")))?;
            let i = universe.position(&s).expect("state is in its own universe");
            gamma[i] = Some(v);
        }
        Ok(Coalgebra { functor, sets, universe, gamma })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn sets(&self) -> &[Arc<SymbolSet>] {
        &self.sets
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn states(&self) -> &[StateId] {
        self.universe.states()
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn presentation(&self) -> Presentation {
        if self.gamma.iter().all(Option::is_some) {
            Presentation::Complete
        } else {
            Presentation::Fragment
        }
    }

    /// States whose successor structure is not declared.
    pub fn boundary(&self) -> impl Iterator<Item = &StateId> + '_ {
        self.gamma.iter().enumerate().filter(|(_, g)| g.is_none()).map(|(i, _)| self.universe.state(i))
    }

    pub fn require_complete(&self) -> Result<(), Error> {
        match self.presentation() {
            Presentation::Complete => Ok(()),
            Presentation::Fragment => Err(Error::Fragment(self.boundary().count())),
        }
    }

    pub fn lookup(&self, name: &str) -> Result<&StateId, Error> {
        self.universe.lookup(name).ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    /// `γ(s)`; fails loudly for boundary and unknown states.
    pub fn gamma(&self, s: &StateId) -> Result<&BValue<W>, Error> {
        let i = self.universe.position(s).ok_or_else(|| Error::UnknownState(s.name().to_string()))?;
        self.gamma[i].as_ref().ok_or_else(|| Error::Boundary(s.name().to_string()))
    }

    /// `γ` by universe position, for complete systems.
    pub(crate) fn gamma_at(&self, i: usize) -> &BValue<W> {
        self.gamma[i].as_ref().expect("complete system")
    }

    /// Replaces the successor structure of `s`, revalidating it.
    pub fn with_gamma(&self, s: &StateId, value: BValue<W>) -> Result<Self, Error> {
        let i = self.universe.position(s).ok_or_else(|| Error::UnknownState(s.name().to_string()))?;
        value.validate(&self.functor, &self.universe).map_err(|e| e.within(&format!("gamma({s})")))?;
        let mut out = self.clone();
        out.gamma[i] = Some(value);
        Ok(out)
    }
}

use std::collections::HashMap;
use std::sync::Arc;

use crate::coalgebra::Coalgebra;
use crate::engine::{apartness_tower, behavioural_equivalence, one_step_covering, ApartnessTower, CoveringMode};
use crate::error::Error;
use crate::functor::{apartness_quotient, normalize_unchecked};
use crate::proof::witness::first_difference;
use crate::proof::{ProofNode, Rule};
use crate::relation::Relation;
use crate::state::StateId;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Synthesis<W> {
    Proved(Arc<ProofNode<W>>),
    /// The states are behaviourally equivalent; `class` is their class.
    NotApart { class: Vec<StateId> },
}

/// Builds a proof of `x # y` of height equal to the first tower level
/// containing the pair. Each node's relation is the previous tower level
/// (restricted to the covering in the covering rule), greedily pruned in
/// canonical pair order while the inequality survives.
pub fn synthesize<W: Weight>(c: &Coalgebra<W>, x: &StateId, y: &StateId, rule: Rule) -> Result<Synthesis<W>, Error> {
    c.require_complete()?;
    for s in [x, y] {
        if !c.universe().contains(s) {
            return Err(Error::UnknownState(s.name().to_string()));
        }
    }
    let tower = apartness_tower(c, usize::MAX)?;
    if !tower.limit().contains(x, y) {
        let eq = behavioural_equivalence(c)?;
        let class = eq.block_containing(x).expect("x is in the universe").into_iter().cloned().collect();
        return Ok(Synthesis::NotApart { class });
    }
    let mut s = Synth { c, tower: &tower, rule, memo: HashMap::new() };
    Ok(Synthesis::Proved(s.node(x, y)))
}

struct Synth<'a, W> {
    c: &'a Coalgebra<W>,
    tower: &'a ApartnessTower,
    rule: Rule,
    memo: HashMap<(StateId, StateId), Arc<ProofNode<W>>>,
}

impl<W: Weight> Synth<'_, W> {
    fn node(&mut self, x: &StateId, y: &StateId) -> Arc<ProofNode<W>> {
        if let Some(n) = self.memo.get(&(x.clone(), y.clone())) {
            return n.clone();
        }
        let level = self.tower.level_of(x, y).expect("pair is apart");
        let previous = &self.tower.levels()[level - 1];
        let (gx, gy) = (self.c.gamma(x).unwrap(), self.c.gamma(y).unwrap());
        let (mut relation, z) = match self.rule {
            Rule::Basic => (previous.clone(), None),
            Rule::Covering => {
                let z = one_step_covering(self.c, &[x.clone(), y.clone()], CoveringMode::Minimal)
                    .expect("complete system")
                    .z;
                (previous.restrict(&z).expect("covering lies in the state space"), Some(z))
            }
        };
        let separated = |r: &Relation| {
            let p = apartness_quotient(r);
            let p = match &z {
                Some(z) => p.restrict(z).expect("covering lies in the universe of R"),
                None => p,
            };
            let (nx, ny) = (normalize_unchecked(&p, gx), normalize_unchecked(&p, gy));
            (nx != ny).then(|| first_difference(&nx, &ny).expect("normal forms differ"))
        };
        assert!(separated(&relation).is_some(), "previous tower level separates {x} and {y}");
        let u = relation.universe().clone();
        for (i, j) in relation.unordered_index_pairs() {
            relation.set_index(i, j, false);
            relation.set_index(j, i, false);
            if separated(&relation).is_none() {
                relation.set_index(i, j, true);
                relation.set_index(j, i, true);
            }
        }
        let witness = separated(&relation).unwrap();
        let children = relation
            .unordered_index_pairs()
            .into_iter()
            .map(|(i, j)| self.node(u.state(i), u.state(j)))
            .collect();
        let node = Arc::new(ProofNode {
            goal: (x.clone(), y.clone()),
            rule: self.rule,
            relation,
            covering_z: z,
            witness,
            children,
        });
        self.memo.insert((x.clone(), y.clone()), node.clone());
        node
    }
}

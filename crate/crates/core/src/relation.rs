//! Binary relations and partitions over a finite universe of states.

use std::fmt;
use std::sync::Arc;

use bitvec::vec::BitVec;

use crate::error::Error;
use crate::state::{StateId, Universe};

/// A binary relation on a universe, stored as an `n * n` bit matrix.
#[derive(Clone)]
pub struct Relation {
    universe: Arc<Universe>,
    bits: BitVec,
}

impl Relation {
    pub fn empty(universe: Arc<Universe>) -> Self {
        let n = universe.len();
        Relation { universe, bits: BitVec::repeat(false, n * n) }
    }

    pub fn total(universe: Arc<Universe>) -> Self {
        let n = universe.len();
        Relation { universe, bits: BitVec::repeat(true, n * n) }
    }

    pub fn from_pairs<'a>(
        universe: Arc<Universe>,
        pairs: impl IntoIterator<Item = (&'a StateId, &'a StateId)>,
    ) -> Result<Self, Error> {
        let mut r = Relation::empty(universe);
        for (a, b) in pairs {
            r.insert(a, b)?;
        }
        Ok(r)
    }

    /// Like [`Relation::from_pairs`], resolving states by name.
    pub fn from_named_pairs(universe: Arc<Universe>, pairs: &[(&str, &str)]) -> Result<Self, Error> {
        let mut r = Relation::empty(universe.clone());
        for (a, b) in pairs {
            let a = universe.lookup(a).ok_or_else(|| Error::NotInUniverse(a.to_string()))?;
            let b = universe.lookup(b).ok_or_else(|| Error::NotInUniverse(b.to_string()))?;
            r.insert(a, b)?;
        }
        Ok(r)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    fn n(&self) -> usize {
        self.universe.len()
    }

    pub fn contains_index(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n() + j]
    }

    pub fn set_index(&mut self, i: usize, j: usize, value: bool) {
        let n = self.n();
        self.bits.set(i * n + j, value);
    }

    pub fn contains(&self, a: &StateId, b: &StateId) -> bool {
        match (self.universe.position(a), self.universe.position(b)) {
            (Some(i), Some(j)) => self.contains_index(i, j),
            _ => false,
        }
    }

    pub fn insert(&mut self, a: &StateId, b: &StateId) -> Result<(), Error> {
        let i = self.position(a)?;
        let j = self.position(b)?;
        self.set_index(i, j, true);
        Ok(())
    }

    pub fn remove(&mut self, a: &StateId, b: &StateId) -> Result<(), Error> {
        let i = self.position(a)?;
        let j = self.position(b)?;
        self.set_index(i, j, false);
        Ok(())
    }

    fn position(&self, s: &StateId) -> Result<usize, Error> {
        self.universe.position(s).ok_or_else(|| Error::NotInUniverse(s.name().to_string()))
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    /// Pairs in row-major universe order.
    pub fn pairs(&self) -> impl Iterator<Item = (&StateId, &StateId)> + '_ {
        let n = self.n();
        self.bits.iter_ones().map(move |k| (self.universe.state(k / n), self.universe.state(k % n)))
    }

    /// Index pairs `(i, j)` with `i < j` such that `(i, j)` or `(j, i)` is present.
    pub fn unordered_index_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.contains_index(i, j) || self.contains_index(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs().all(|(a, b)| other.contains(a, b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetric_pair().is_none()
    }

    fn asymmetric_pair(&self) -> Option<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| {
            self.contains_index(i, j) && !self.contains_index(j, i)
        })
    }

    /// Smallest symmetric relation containing `self`.
    pub fn symmetric_closure(&self) -> Relation {
        let mut out = self.clone();
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if self.contains_index(i, j) {
                    out.set_index(j, i, true);
                }
            }
        }
        out
    }

    /// `(universe × universe) \ self`.
    pub fn complement(&self) -> Relation {
        Relation { universe: self.universe.clone(), bits: !self.bits.clone() }
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, Error> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(Relation { universe: self.universe.clone(), bits: self.bits.clone() | other.bits.clone() })
    }

    /// Partition induced by the reflexive, symmetric, transitive closure.
    pub fn equivalence_closure(&self) -> Partition {
        let n = self.n();
        let mut uf = UnionFind::new(n);
        for (i, j) in self.bits.iter_ones().map(|k| (k / n, k % n)) {
            uf.union(i, j);
        }
        let labels: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
        Partition::from_labels(self.universe.clone(), &labels)
    }

    /// Largest apartness relation contained in the symmetric relation `self`:
    /// the complement of the equivalence closure of the complement.
    pub fn apartness_interior(&self) -> Result<Relation, Error> {
        if let Some((i, j)) = self.asymmetric_pair() {
            return Err(Error::NotSymmetric(
                self.universe.state(i).to_string(),
                self.universe.state(j).to_string(),
            ));
        }
        Ok(self.complement().equivalence_closure().to_relation().complement())
    }

    /// Restriction to `z × z`; the universe becomes `z`.
    pub fn restrict<'a>(&self, z: impl IntoIterator<Item = &'a StateId>) -> Result<Relation, Error> {
        let sub = self.universe.restrict(z)?;
        let map: Vec<usize> = sub.states().iter().map(|s| self.universe.position(s).unwrap()).collect();
        let mut out = Relation::empty(sub);
        for (i, &pi) in map.iter().enumerate() {
            for (j, &pj) in map.iter().enumerate() {
                if self.contains_index(pi, pj) {
                    out.set_index(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Checks irreflexivity, symmetry and cotransitivity, reporting the first
    /// violation found.
    pub fn is_apartness(&self) -> ApartnessCheck {
        let n = self.n();
        let name = |i: usize| self.universe.state(i).clone();
        for i in 0..n {
            if self.contains_index(i, i) {
                return ApartnessCheck::Violation(ApartnessViolation::Reflexive(name(i)));
            }
        }
        if let Some((i, j)) = self.asymmetric_pair() {
            return ApartnessCheck::Violation(ApartnessViolation::Asymmetric(name(i), name(j)));
        }
        for i in 0..n {
            for j in 0..n {
                if !self.contains_index(i, j) {
                    continue;
                }
                for k in 0..n {
                    if !self.contains_index(i, k) && !self.contains_index(j, k) {
                        return ApartnessCheck::Violation(ApartnessViolation::NotCotransitive(
                            name(i),
                            name(j),
                            name(k),
                        ));
                    }
                }
            }
        }
        ApartnessCheck::Holds
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.bits == other.bits
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApartnessCheck {
    Holds,
    Violation(ApartnessViolation),
}

impl ApartnessCheck {
    pub fn holds(&self) -> bool {
        matches!(self, ApartnessCheck::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApartnessViolation {
    /// `x # x`.
    Reflexive(StateId),
    /// `x # y` without `y # x`.
    Asymmetric(StateId, StateId),
    /// `x1 # x2` but neither `x1 # x3` nor `x2 # x3`.
    NotCotransitive(StateId, StateId, StateId),
}

/// A partition of a universe into non-empty blocks.
///
/// Blocks are ordered by their least member and the least member is the
/// representative, so two partitions with the same blocks compare equal.
#[derive(Clone)]
pub struct Partition {
    universe: Arc<Universe>,
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds the canonical partition grouping positions with equal labels.
    pub fn from_labels<L: Eq + std::hash::Hash>(universe: Arc<Universe>, labels: &[L]) -> Self {
        assert_eq!(labels.len(), universe.len());
        let mut seen = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = vec![0; labels.len()];
        for (i, l) in labels.iter().enumerate() {
            let b = *seen.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            block_of[i] = b;
        }
        Partition { universe, block_of, blocks }
    }

    pub fn from_blocks<S: AsRef<str>>(universe: Arc<Universe>, blocks: &[Vec<S>]) -> Result<Self, Error> {
        let mut labels = vec![usize::MAX; universe.len()];
        for (b, block) in blocks.iter().enumerate() {
            for name in block {
                let name = name.as_ref();
                let s = universe.lookup(name).ok_or_else(|| Error::NotInUniverse(name.to_string()))?;
                labels[universe.position(s).unwrap()] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::NotInUniverse(universe.state(i).to_string()));
        }
        Ok(Partition::from_labels(universe, &labels))
    }

    pub fn discrete(universe: Arc<Universe>) -> Self {
        let labels: Vec<usize> = (0..universe.len()).collect();
        Partition::from_labels(universe, &labels)
    }

    pub fn single_block(universe: Arc<Universe>) -> Self {
        let labels = vec![0usize; universe.len()];
        Partition::from_labels(universe, &labels)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_index(&self, position: usize) -> usize {
        self.block_of[position]
    }

    pub fn block_of(&self, s: &StateId) -> Option<usize> {
        self.universe.position(s).map(|i| self.block_of[i])
    }

    pub fn blocks(&self) -> impl Iterator<Item = Vec<&StateId>> + '_ {
        self.blocks.iter().map(|b| b.iter().map(|&i| self.universe.state(i)).collect())
    }

    /// Block containing `s` (as states), if `s` is in the universe.
    pub fn block_containing(&self, s: &StateId) -> Option<Vec<&StateId>> {
        let b = self.block_of(s)?;
        Some(self.blocks[b].iter().map(|&i| self.universe.state(i)).collect())
    }

    /// Least member of the block of `s`.
    pub fn representative(&self, s: &StateId) -> Option<&StateId> {
        let b = self.block_of(s)?;
        Some(self.universe.state(self.blocks[b][0]))
    }

    pub fn same_block(&self, a: &StateId, b: &StateId) -> bool {
        matches!((self.block_of(a), self.block_of(b)), (Some(x), Some(y)) if x == y)
    }

    /// The induced equivalence relation.
    pub fn to_relation(&self) -> Relation {
        let mut r = Relation::empty(self.universe.clone());
        for block in &self.blocks {
            for &i in block {
                for &j in block {
                    r.set_index(i, j, true);
                }
            }
        }
        r
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.universe == coarser.universe
            && self.blocks.iter().all(|b| b.iter().all(|&i| coarser.block_of[i] == coarser.block_of[b[0]]))
    }

    /// Restriction to `z`; the universe becomes `z`.
    pub fn restrict<'a>(&self, z: impl IntoIterator<Item = &'a StateId>) -> Result<Partition, Error> {
        let sub = self.universe.restrict(z)?;
        let labels: Vec<usize> =
            sub.states().iter().map(|s| self.block_of[self.universe.position(s).unwrap()]).collect();
        Ok(Partition::from_labels(sub, &labels))
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.blocks == other.blocks
    }
}

impl Eq for Partition {}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks()).finish()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, block) in self.blocks().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            for (i, s) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(names: &[&str]) -> Arc<Universe> {
        Universe::from_names(names).unwrap()
    }

    fn rel(u: &Arc<Universe>, pairs: &[(&str, &str)]) -> Relation {
        Relation::from_named_pairs(u.clone(), pairs).unwrap()
    }

    /// All relations over a universe of size n.
    fn all_relations(u: &Arc<Universe>) -> Vec<Relation> {
        let n = u.len();
        (0u32..1 << (n * n))
            .map(|mask| {
                let mut r = Relation::empty(u.clone());
                for k in 0..n * n {
                    if mask & (1 << k) != 0 {
                        r.set_index(k / n, k % n, true);
                    }
                }
                r
            })
            .collect()
    }

    #[test]
    fn symmetric_closure_examples() {
        let u = universe(&["x", "y"]);
        assert_eq!(rel(&u, &[("x", "y")]).symmetric_closure(), rel(&u, &[("x", "y"), ("y", "x")]));
        assert!(Relation::empty(u.clone()).symmetric_closure().is_empty());
        let s = rel(&u, &[("x", "y"), ("y", "x")]);
        assert_eq!(s.symmetric_closure(), s);
    }

    #[test]
    fn complement_examples() {
        let u = universe(&["x", "y"]);
        assert_eq!(Relation::empty(u.clone()).complement().len(), 4);
        let r = rel(&u, &[("x", "y")]);
        assert_eq!(r.complement().complement(), r);

        let u3 = universe(&["x", "y", "z"]);
        let r = rel(&u3, &[("x", "y")]);
        assert_ne!(r.symmetric_closure().complement(), r.complement().symmetric_closure());
    }

    #[test]
    fn equivalence_closure_examples() {
        let u = universe(&["x", "y", "z", "w"]);
        let p = rel(&u, &[("x", "y"), ("y", "z")]).equivalence_closure();
        assert_eq!(p, Partition::from_blocks(u.clone(), &[vec!["x", "y", "z"], vec!["w"]]).unwrap());
        let u2 = universe(&["x", "y"]);
        assert_eq!(Relation::empty(u2.clone()).equivalence_closure(), Partition::discrete(u2.clone()));
        assert_eq!(Relation::total(u2.clone()).equivalence_closure(), Partition::single_block(u2));
    }

    #[test]
    fn apartness_interior_examples() {
        let u = universe(&["x", "y", "z"]);
        let mut all_but_diag = Relation::total(u.clone());
        for i in 0..3 {
            all_but_diag.set_index(i, i, false);
        }
        assert_eq!(all_but_diag.apartness_interior().unwrap(), all_but_diag);

        let xy = rel(&u, &[("x", "y"), ("y", "x")]);
        assert!(xy.apartness_interior().unwrap().is_empty());
        assert!(Relation::empty(u.clone()).apartness_interior().unwrap().is_empty());
        assert!(matches!(rel(&u, &[("x", "y")]).apartness_interior(), Err(Error::NotSymmetric(..))));
    }

    #[test]
    fn restrict_examples() {
        let u = universe(&["x", "y", "w"]);
        let r = rel(&u, &[("x", "y"), ("x", "w")]);
        let z = [u.state(0).clone(), u.state(1).clone()];
        let sub = r.restrict(&z).unwrap();
        assert_eq!(sub.len(), 1);
        assert!(sub.contains(&z[0], &z[1]));

        let d = Partition::discrete(u.clone()).restrict(&z).unwrap();
        assert_eq!(d, Partition::discrete(u.restrict(&z).unwrap()));

        assert_eq!(r.restrict(u.states()).unwrap(), r);

        let stranger = StateId::new(9, "q").unwrap();
        assert!(r.restrict([&stranger]).is_err());
        assert!(Partition::discrete(u.clone()).restrict([&stranger]).is_err());
    }

    #[test]
    fn is_apartness_examples() {
        let u = universe(&["x", "y"]);
        assert!(Relation::empty(u.clone()).is_apartness().holds());
        assert_eq!(
            rel(&u, &[("x", "x")]).is_apartness(),
            ApartnessCheck::Violation(ApartnessViolation::Reflexive(u.state(0).clone()))
        );
        assert!(matches!(
            rel(&u, &[("x", "y")]).is_apartness(),
            ApartnessCheck::Violation(ApartnessViolation::Asymmetric(..))
        ));
        let u3 = universe(&["x", "y", "z"]);
        assert!(matches!(
            rel(&u3, &[("x", "y"), ("y", "x")]).is_apartness(),
            ApartnessCheck::Violation(ApartnessViolation::NotCotransitive(..))
        ));
    }

    #[test]
    fn closure_laws_exhaustive() {
        for size in 1..=3 {
            let u = universe(&["a", "b", "c"][..size]);
            let all = all_relations(&u);
            for r in &all {
                assert_eq!(&r.complement().complement(), r);
                let s = r.symmetric_closure();
                assert!(r.is_subset(&s));
                assert_eq!(s.symmetric_closure(), s);
                let e = r.equivalence_closure();
                assert!(r.is_subset(&e.to_relation()));
                assert_eq!(e.to_relation().equivalence_closure(), e);
            }
            // monotonicity on a sample of pairs
            for r1 in all.iter().step_by(7) {
                for r2 in all.iter().step_by(5) {
                    if r1.is_subset(r2) {
                        assert!(r1.symmetric_closure().is_subset(&r2.symmetric_closure()));
                        assert!(r1.equivalence_closure().refines(&r2.equivalence_closure()));
                    }
                }
            }
        }
    }

    #[test]
    fn interior_is_largest_apartness_exhaustive() {
        for size in 1..=4 {
            let u = universe(&["a", "b", "c", "d"][..size]);
            let apartness: Vec<Relation> =
                all_relations_small(&u).into_iter().filter(|r| r.is_apartness().holds()).collect();
            // apartness relations are exactly the complements of equivalences
            for a in &apartness {
                let eq = a.complement();
                assert_eq!(eq.equivalence_closure().to_relation(), eq);
            }
            let symmetric: Vec<Relation> = symmetric_relations(&u);
            for r in &symmetric {
                let interior = r.apartness_interior().unwrap();
                assert!(interior.is_apartness().holds(), "{r:?}");
                assert!(interior.is_subset(r));
                for a in &apartness {
                    if a.is_subset(r) {
                        assert!(a.is_subset(&interior));
                    }
                }
            }
        }
    }

    #[test]
    fn equivalences_complement_to_apartness_exhaustive() {
        for size in 1..=4 {
            let u = universe(&["a", "b", "c", "d"][..size]);
            for r in symmetric_relations(&u) {
                let eq = r.equivalence_closure().to_relation();
                assert!(eq.complement().is_apartness().holds());
            }
        }
    }

    /// Relations over universes up to size 4 built from symmetric relations
    /// plus a diagonal pattern; all apartness relations are symmetric and
    /// irreflexive, so this set contains every one of them.
    fn all_relations_small(u: &Arc<Universe>) -> Vec<Relation> {
        if u.len() <= 3 {
            return all_relations(u);
        }
        symmetric_relations(u)
    }

    fn symmetric_relations(u: &Arc<Universe>) -> Vec<Relation> {
        let n = u.len();
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        (0u32..1 << slots.len())
            .map(|mask| {
                let mut r = Relation::empty(u.clone());
                for (k, &(i, j)) in slots.iter().enumerate() {
                    if mask & (1 << k) != 0 {
                        r.set_index(i, j, true);
                        r.set_index(j, i, true);
                    }
                }
                r
            })
            .collect()
    }
}

//! Seeded random systems for property tests and the command line.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalgebra::Coalgebra;
use crate::functor::{BValue, FunctorExpr};
use crate::state::{StateId, SymbolSet, Universe};
use crate::weight::Weight;

/// Masses drawn for distribution entries; zero draws are dropped.
pub fn mass_pool<W: Weight>() -> Vec<W> {
    [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1)]
        .iter()
        .map(|&(p, q)| W::from_fraction(&BigInt::from(p), &BigInt::from(q)).expect("small fraction"))
        .collect()
}

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub min_states: usize,
    pub max_states: usize,
    /// Bound on [`FunctorExpr::depth`] when the functor is drawn.
    pub max_depth: usize,
    /// Fixed functor; drawn at random when `None`.
    pub functor: Option<FunctorExpr>,
    /// Chance that a state copies the successor value of an earlier one,
    /// which makes non-trivial equivalence classes likely.
    pub copy_probability: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { min_states: 1, max_states: 8, max_depth: 2, functor: None, copy_probability: 0.3 }
    }
}

/// The constant set `A = {a, b}` used for both outputs and labels.
pub fn default_symbols() -> Arc<SymbolSet> {
    SymbolSet::new("A", &["a", "b"]).expect("valid set")
}

/// A functor of depth at most `depth` over `Id` and the set `a`, which
/// mentions `Id` at least once.
pub fn random_functor(rng: &mut impl Rng, depth: usize, a: &Arc<SymbolSet>) -> FunctorExpr {
    loop {
        let f = draw_functor(rng, depth, a);
        if mentions_identity(&f) {
            return f;
        }
    }
}

fn mentions_identity(f: &FunctorExpr) -> bool {
    match f {
        FunctorExpr::Identity => true,
        FunctorExpr::Constant(_) => false,
        FunctorExpr::Product(l, r) | FunctorExpr::Coproduct(l, r) => mentions_identity(l) || mentions_identity(r),
        FunctorExpr::Exponent(b, _) | FunctorExpr::FinPowerset(b) | FunctorExpr::SubDist(b) => mentions_identity(b),
    }
}

fn draw_functor(rng: &mut impl Rng, depth: usize, a: &Arc<SymbolSet>) -> FunctorExpr {
    let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..7) };
    let d = depth.saturating_sub(1);
    match choice {
        0 => FunctorExpr::Identity,
        1 => FunctorExpr::Constant(a.clone()),
        2 => {
            let l = draw_functor(rng, d, a);
            FunctorExpr::product(l, draw_functor(rng, d, a))
        }
        3 => {
            let l = draw_functor(rng, d, a);
            FunctorExpr::coproduct(l, draw_functor(rng, d, a))
        }
        4 => FunctorExpr::exponent(draw_functor(rng, d, a), a.clone()),
        5 => FunctorExpr::powerset(draw_functor(rng, d, a)),
        _ => FunctorExpr::subdist(draw_functor(rng, d, a)),
    }
}

/// A random element of `f` applied to `universe`.
pub fn random_value<W: Weight>(rng: &mut impl Rng, f: &FunctorExpr, universe: &Universe, masses: &[W]) -> BValue<W> {
    match f {
        FunctorExpr::Identity => BValue::State(universe.states().choose(rng).expect("non-empty universe").clone()),
        FunctorExpr::Constant(set) => BValue::Atom(set.members().choose(rng).expect("non-empty set").clone()),
        FunctorExpr::Product(l, r) => {
            let lv = random_value(rng, l, universe, masses);
            BValue::pair(lv, random_value(rng, r, universe, masses))
        }
        FunctorExpr::Coproduct(l, r) => {
            if rng.gen_bool(0.5) {
                BValue::inl(random_value(rng, l, universe, masses))
            } else {
                BValue::inr(random_value(rng, r, universe, masses))
            }
        }
        FunctorExpr::Exponent(b, labels) => BValue::Table(
            labels.members().iter().map(|l| (l.clone(), random_value(rng, b, universe, masses))).collect(),
        ),
        FunctorExpr::FinPowerset(b) => {
            let n = rng.gen_range(0..=3);
            let mut items: Vec<BValue<W>> = (0..n).map(|_| random_value(rng, b, universe, masses)).collect();
            items.sort();
            items.dedup();
            BValue::Set(items)
        }
        FunctorExpr::SubDist(b) => {
            let n = rng.gen_range(0..=3);
            let mut keys: Vec<BValue<W>> = (0..n).map(|_| random_value(rng, b, universe, masses)).collect();
            keys.sort();
            keys.dedup();
            let mut left = W::one();
            let mut entries = Vec::new();
            for k in keys {
                let fitting: Vec<&W> = masses.iter().filter(|m| **m <= left).collect();
                let w = (*fitting.choose(rng).expect("zero always fits")).clone();
                if w.is_positive() {
                    left = left - w.clone();
                    entries.push((k, w));
                }
            }
            BValue::Dist(entries)
        }
    }
}

/// A random complete system; the same seed and spec give the same system.
pub fn random_system<W: Weight>(seed: u64, spec: &RandomSpec) -> Coalgebra<W> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = default_symbols();
    let functor = match &spec.functor {
        Some(f) => f.clone(),
        None => random_functor(&mut rng, spec.max_depth, &a),
    };
    let n = rng.gen_range(spec.min_states.max(1)..=spec.max_states.max(spec.min_states).max(1));
    let ids: Vec<StateId> = (0..n).map(|i| StateId::new(i as u32, &format!("s{i}")).expect("valid name")).collect();
    let universe = Universe::new(ids.clone()).expect("distinct names");
    let masses = mass_pool::<W>();
    let mut values: Vec<BValue<W>> = Vec::with_capacity(n);
    for _ in 0..n {
        let v = if !values.is_empty() && rng.gen_bool(spec.copy_probability) {
            values.choose(&mut rng).unwrap().clone()
        } else {
            random_value(&mut rng, &functor, &universe, &masses)
        };
        values.push(v);
    }
    let sets = functor.symbol_sets();
    Coalgebra::new(functor, sets, ids.into_iter().zip(values).collect(), Vec::new()).expect("generated values are valid")
}

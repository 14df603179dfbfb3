#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use apartness::{parse_system, BValue, Rational, StateId, System};

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn example(name: &str) -> System {
    let text = std::fs::read_to_string(example_path(name)).unwrap();
    parse_system(&text).unwrap()
}

pub fn st(c: &System, name: &str) -> StateId {
    c.lookup(name).unwrap().clone()
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

/// A successor value with states replaced by the ids of their previous
/// unfolding, in a form where equality is behavioural equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum Term {
    S(usize),
    A(String),
    P(Box<Term>, Box<Term>),
    L(Box<Term>),
    R(Box<Term>),
    Tab(Vec<(String, Term)>),
    Set(BTreeSet<Term>),
    Dist(BTreeMap<Term, Rational>),
}

fn term(v: &BValue<Rational>, ids: &HashMap<StateId, usize>) -> Term {
    match v {
        BValue::State(s) => Term::S(ids[s]),
        BValue::Atom(a) => Term::A(a.name().to_string()),
        BValue::Pair(l, r) => Term::P(Box::new(term(l, ids)), Box::new(term(r, ids))),
        BValue::Inl(x) => Term::L(Box::new(term(x, ids))),
        BValue::Inr(x) => Term::R(Box::new(term(x, ids))),
        BValue::Table(t) => Term::Tab(t.iter().map(|(l, x)| (l.name().to_string(), term(x, ids))).collect()),
        BValue::Set(items) => Term::Set(items.iter().map(|x| term(x, ids)).collect()),
        BValue::Dist(entries) => {
            let mut m: BTreeMap<Term, Rational> = BTreeMap::new();
            for (k, w) in entries {
                *m.entry(term(k, ids)).or_insert_with(|| q(0, 1)) += w.clone();
            }
            Term::Dist(m)
        }
    }
}

/// `ids[n][i]`: identifier of the n-step unfolding of state `i`; two states
/// are n-step equivalent iff their identifiers agree. Computed for
/// `n = 0..=|X| + 1`.
pub fn unfoldings(c: &System) -> Vec<Vec<usize>> {
    let states = c.states();
    let mut levels = vec![vec![0; states.len()]];
    for _ in 0..=states.len() {
        let prev: HashMap<StateId, usize> =
            states.iter().cloned().zip(levels.last().unwrap().iter().copied()).collect();
        let mut intern: HashMap<Term, usize> = HashMap::new();
        let next = states
            .iter()
            .map(|s| {
                let t = term(c.gamma(s).unwrap(), &prev);
                let n = intern.len();
                *intern.entry(t).or_insert(n)
            })
            .collect();
        levels.push(next);
    }
    levels
}

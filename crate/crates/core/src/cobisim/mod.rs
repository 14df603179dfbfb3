//! Apartness obtained by dualising relation-lifting bisimulation, for the
//! two functors where the lifting is spelled out: labelled transition
//! systems and subdistributions. Used as an independent oracle for the
//! behavioural engine.

mod coupling;

use std::collections::HashMap;

pub use coupling::{coupling_exists, CouplingAnswer, CouplingQuery, NoCoupling};

use crate::coalgebra::Coalgebra;
use crate::error::Error;
use crate::functor::{BValue, FunctorExpr};
use crate::relation::Relation;
use crate::state::{StateId, Symbol};
use crate::weight::Weight;

// ---------------------------------------------------------------------------
// Subdistributions

fn require_subdist<W: Weight>(c: &Coalgebra<W>) -> Result<(), Error> {
    match c.functor() {
        FunctorExpr::SubDist(b) if **b == FunctorExpr::Identity => Ok(()),
        f => Err(Error::WrongFunctor { expected: "Ds Id".into(), found: f.to_string() }),
    }
}

fn as_dist<W: Weight>(v: &BValue<W>) -> Vec<(StateId, W)> {
    match v {
        BValue::Dist(entries) => entries
            .iter()
            .map(|(k, w)| match k {
                BValue::State(s) => (s.clone(), w.clone()),
                _ => unreachable!("validated Ds Id value"),
            })
            .collect(),
        _ => unreachable!("validated Ds Id value"),
    }
}

/// True when `coupling` charges only allowed pairs and has exactly the
/// marginals requested by `q`.
pub fn verify_coupling<W: Weight>(q: &CouplingQuery<W>, coupling: &[((StateId, StateId), W)]) -> bool {
    if coupling.iter().any(|((a, b), w)| q.forbidden.contains(a, b) || !w.is_positive()) {
        return false;
    }
    let marginal = |side: usize, s: &StateId| {
        coupling
            .iter()
            .filter(|((a, b), _)| if side == 0 { a == s } else { b == s })
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    };
    let matches = |mu: &[(StateId, W)], side: usize| {
        mu.iter().all(|(s, w)| marginal(side, s) == *w)
            && coupling.iter().all(|((a, b), _)| {
                let s = if side == 0 { a } else { b };
                mu.iter().any(|(t, _)| t == s)
            })
    };
    matches(&q.mu_left, 0) && matches(&q.mu_right, 1)
}

/// Outcome of the coupling-based fixpoint.
#[derive(Clone, Debug)]
pub struct CobisimReport<W> {
    pub apart: Relation,
    /// Iterations until the fixpoint, counting the last (unchanged) one.
    pub rounds: usize,
    /// Every query of the last round with its answer.
    pub answers: Vec<(CouplingQuery<W>, CouplingAnswer<W>)>,
}

/// Least fixpoint of `R ↦ {(x, y) | no coupling of γ(x), γ(y) avoids R}`.
pub fn cobisim_fixpoint<W: Weight>(c: &Coalgebra<W>) -> Result<CobisimReport<W>, Error> {
    require_subdist(c)?;
    c.require_complete()?;
    let states = c.states();
    let dists: Vec<Vec<(StateId, W)>> = states.iter().map(|s| Ok(as_dist(c.gamma(s)?))).collect::<Result<_, Error>>()?;
    let mut apart = Relation::empty(c.universe().clone());
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut next = Relation::empty(c.universe().clone());
        let mut answers = Vec::new();
        for i in 0..states.len() {
            for j in 0..states.len() {
                let q = CouplingQuery { mu_left: dists[i].clone(), mu_right: dists[j].clone(), forbidden: apart.clone() };
                let answer = coupling_exists(&q);
                if !answer.exists() {
                    next.set_index(i, j, true);
                }
                answers.push((q, answer));
            }
        }
        if next == apart {
            return Ok(CobisimReport { apart, rounds, answers });
        }
        apart = next;
    }
}

pub fn cobisim_apart<W: Weight>(c: &Coalgebra<W>) -> Result<Relation, Error> {
    Ok(cobisim_fixpoint(c)?.apart)
}

// ---------------------------------------------------------------------------
// Labelled transition systems

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A derivation of `goal.0 # goal.1` from the two LTS rules: one side makes
/// a move that every equally-labelled move of the other side is apart from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsDerivation {
    pub goal: (StateId, StateId),
    pub side: Side,
    pub label: Symbol,
    pub moved_to: StateId,
    /// One derivation per successor of the other side under `label`.
    pub subgoals: Vec<LtsDerivation>,
}

impl LtsDerivation {
    pub fn height(&self) -> usize {
        1 + self.subgoals.iter().map(LtsDerivation::height).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtsCheck {
    Valid,
    Invalid { path: Vec<usize>, reason: String },
}

fn require_lts<W: Weight>(c: &Coalgebra<W>) -> Result<(), Error> {
    if let FunctorExpr::Exponent(body, _) = c.functor() {
        if let FunctorExpr::FinPowerset(inner) = &**body {
            if **inner == FunctorExpr::Identity {
                return Ok(());
            }
        }
    }
    Err(Error::WrongFunctor { expected: "(P Id)^A".into(), found: c.functor().to_string() })
}

fn successors<W: Weight>(c: &Coalgebra<W>, s: &StateId, label: &Symbol) -> Result<Vec<StateId>, Error> {
    let BValue::Table(entries) = c.gamma(s)? else { unreachable!("validated LTS value") };
    let Some((_, BValue::Set(items))) = entries.iter().find(|(l, _)| l == label) else {
        return Ok(Vec::new());
    };
    Ok(items
        .iter()
        .map(|v| match v {
            BValue::State(t) => t.clone(),
            _ => unreachable!("validated LTS value"),
        })
        .collect())
}

/// Checks a derivation against the LTS rules.
pub fn lts_check<W: Weight>(c: &Coalgebra<W>, t: &LtsDerivation) -> Result<LtsCheck, Error> {
    require_lts(c)?;
    Ok(check_node(c, t, &mut Vec::new()))
}

fn check_node<W: Weight>(c: &Coalgebra<W>, t: &LtsDerivation, path: &mut Vec<usize>) -> LtsCheck {
    let invalid = |path: &Vec<usize>, reason: String| LtsCheck::Invalid { path: path.clone(), reason };
    let (x, y) = &t.goal;
    let (mover, other) = match t.side {
        Side::Left => (x, y),
        Side::Right => (y, x),
    };
    let moves = match successors(c, mover, &t.label) {
        Ok(m) => m,
        Err(e) => return invalid(path, e.to_string()),
    };
    if !moves.contains(&t.moved_to) {
        return invalid(path, format!("{mover} has no {}-transition to {}", t.label, t.moved_to));
    }
    let answers = match successors(c, other, &t.label) {
        Ok(m) => m,
        Err(e) => return invalid(path, e.to_string()),
    };
    for a in &answers {
        let wanted = match t.side {
            Side::Left => (&t.moved_to, a),
            Side::Right => (a, &t.moved_to),
        };
        let found = t.subgoals.iter().any(|s| {
            (&s.goal.0, &s.goal.1) == wanted || (&s.goal.1, &s.goal.0) == wanted
        });
        if !found {
            return invalid(path, format!("no subderivation for {} # {}", wanted.0, wanted.1));
        }
    }
    for (k, s) in t.subgoals.iter().enumerate() {
        let relevant = answers.iter().any(|a| {
            let g = (&s.goal.0, &s.goal.1);
            g == (&t.moved_to, a) || g == (a, &t.moved_to)
        });
        if !relevant {
            return invalid(path, format!("subderivation {} # {} is not a premise", s.goal.0, s.goal.1));
        }
        path.push(k);
        let r = check_node(c, s, path);
        path.pop();
        if r != LtsCheck::Valid {
            return r;
        }
    }
    LtsCheck::Valid
}

/// Builds a minimal-height derivation of `x # y`, or `None` if the states are
/// bisimilar.
pub fn lts_synthesize<W: Weight>(c: &Coalgebra<W>, x: &StateId, y: &StateId) -> Result<Option<LtsDerivation>, Error> {
    require_lts(c)?;
    c.require_complete()?;
    let FunctorExpr::Exponent(_, labels) = c.functor() else { unreachable!() };
    let labels = labels.members().to_vec();
    let states = c.states().to_vec();
    let mut succ: HashMap<(StateId, Symbol), Vec<StateId>> = HashMap::new();
    for s in &states {
        for l in &labels {
            succ.insert((s.clone(), l.clone()), successors(c, s, l)?);
        }
    }
    // level[(a, b)] = first round in which the pair is derivable
    let mut level: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut round = 0;
    loop {
        round += 1;
        let mut added = Vec::new();
        for a in &states {
            for b in &states {
                if level.contains_key(&(a.clone(), b.clone())) {
                    continue;
                }
                if find_move(&labels, &succ, &level, a, b, round).is_some() {
                    added.push((a.clone(), b.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for p in added {
            level.insert(p, round);
        }
    }
    if !level.contains_key(&(x.clone(), y.clone())) {
        return Ok(None);
    }
    Ok(Some(build(&labels, &succ, &level, x, y)))
}

type Move = (Side, Symbol, StateId);

fn find_move(
    labels: &[Symbol],
    succ: &HashMap<(StateId, Symbol), Vec<StateId>>,
    level: &HashMap<(StateId, StateId), usize>,
    a: &StateId,
    b: &StateId,
    below: usize,
) -> Option<Move> {
    let proved = |p: &StateId, q: &StateId| level.get(&(p.clone(), q.clone())).is_some_and(|&l| l < below);
    for l in labels {
        let (sa, sb) = (&succ[&(a.clone(), l.clone())], &succ[&(b.clone(), l.clone())]);
        if let Some(m) = sa.iter().find(|m| sb.iter().all(|o| proved(m, o))) {
            return Some((Side::Left, l.clone(), m.clone()));
        }
        if let Some(m) = sb.iter().find(|m| sa.iter().all(|o| proved(o, m))) {
            return Some((Side::Right, l.clone(), m.clone()));
        }
    }
    None
}

fn build(
    labels: &[Symbol],
    succ: &HashMap<(StateId, Symbol), Vec<StateId>>,
    level: &HashMap<(StateId, StateId), usize>,
    x: &StateId,
    y: &StateId,
) -> LtsDerivation {
    let lv = level[&(x.clone(), y.clone())];
    let (side, label, moved_to) = find_move(labels, succ, level, x, y, lv).expect("pair has a level");
    let others = match side {
        Side::Left => &succ[&(y.clone(), label.clone())],
        Side::Right => &succ[&(x.clone(), label.clone())],
    };
    let subgoals = others
        .iter()
        .map(|o| match side {
            Side::Left => build(labels, succ, level, &moved_to, o),
            Side::Right => build(labels, succ, level, o, &moved_to),
        })
        .collect();
    LtsDerivation { goal: (x.clone(), y.clone()), side, label, moved_to, subgoals }
}

//! The first structural difference of two normal forms, and re-evaluation of
//! a recorded difference against a pair of normal forms.

use std::fmt;

use crate::functor::{normalize, BValue, FunctorExpr, NormalForm};
use crate::relation::Partition;
use crate::state::{StateId, Symbol};
use crate::weight::Weight;

/// One step into a successor value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Fst,
    Snd,
    Inl,
    Inr,
    Label(Symbol),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Fst => f.write_str("fst"),
            Step::Snd => f.write_str("snd"),
            Step::Inl => f.write_str("inl"),
            Step::Inr => f.write_str("inr"),
            Step::Label(l) => write!(f, "label:{l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Summand {
    Inl,
    Inr,
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Summand::Inl => "inl",
            Summand::Inr => "inr",
        })
    }
}

/// What differs at the end of the path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Difference<W> {
    /// The class of `class` carries different weight on the two sides.
    Mass { class: BValue<W>, left: W, right: W },
    /// Two states in different classes.
    Classes { left: StateId, right: StateId },
    Constants { left: Symbol, right: Symbol },
    Sides { left: Summand, right: Summand },
    /// A class present in exactly one of two sets; `in_left` says which.
    Element { element: BValue<W>, in_left: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness<W> {
    pub path: Vec<Step>,
    pub detail: Difference<W>,
}

/// First difference in canonical order, or `None` for equal normal forms.
pub fn first_difference<W: Weight>(a: &NormalForm<W>, b: &NormalForm<W>) -> Option<Witness<W>> {
    let mut path = Vec::new();
    let detail = diff(a, b, &mut path)?;
    Some(Witness { path, detail })
}

fn diff<W: Weight>(a: &NormalForm<W>, b: &NormalForm<W>, path: &mut Vec<Step>) -> Option<Difference<W>> {
    use NormalForm as N;
    if a == b {
        return None;
    }
    match (a, b) {
        (N::Class(l), N::Class(r)) => Some(Difference::Classes { left: l.clone(), right: r.clone() }),
        (N::Atom(l), N::Atom(r)) => Some(Difference::Constants { left: l.clone(), right: r.clone() }),
        (N::Pair(l1, r1), N::Pair(l2, r2)) => {
            let step = if l1 != l2 { Step::Fst } else { Step::Snd };
            path.push(step.clone());
            if step == Step::Fst {
                diff(l1, l2, path)
            } else {
                diff(r1, r2, path)
            }
        }
        (N::Inl(x), N::Inl(y)) => {
            path.push(Step::Inl);
            diff(x, y, path)
        }
        (N::Inr(x), N::Inr(y)) => {
            path.push(Step::Inr);
            diff(x, y, path)
        }
        (N::Inl(_), N::Inr(_)) => Some(Difference::Sides { left: Summand::Inl, right: Summand::Inr }),
        (N::Inr(_), N::Inl(_)) => Some(Difference::Sides { left: Summand::Inr, right: Summand::Inl }),
        (N::Table(t1), N::Table(t2)) => {
            let ((label, x), (_, y)) = t1.iter().zip(t2).find(|((_, x), (_, y))| x != y)?;
            path.push(Step::Label(label.clone()));
            diff(x, y, path)
        }
        (N::Set(s1), N::Set(s2)) => {
            // both sorted: the least element of the symmetric difference
            let first_only = |s: &[NormalForm<W>], other: &[NormalForm<W>]| s.iter().find(|e| !other.contains(e)).cloned();
            match (first_only(s1, s2), first_only(s2, s1)) {
                (Some(e), Some(f)) if f < e => Some(Difference::Element { element: f.to_value(), in_left: false }),
                (Some(e), _) => Some(Difference::Element { element: e.to_value(), in_left: true }),
                (None, Some(f)) => Some(Difference::Element { element: f.to_value(), in_left: false }),
                (None, None) => None,
            }
        }
        (N::Dist(_), N::Dist(_)) => {
            let mut keys: Vec<&NormalForm<W>> = match (a, b) {
                (N::Dist(d1), N::Dist(d2)) => d1.iter().chain(d2).map(|(k, _)| k).collect(),
                _ => unreachable!(),
            };
            keys.sort();
            keys.dedup();
            keys.into_iter().find_map(|k| {
                let (l, r) = (a.mass_of(k)?, b.mass_of(k)?);
                (l != r).then(|| Difference::Mass { class: k.to_value(), left: l, right: r })
            })
        }
        _ => None,
    }
}

/// Follows `path` into a normal form.
pub fn navigate<'a, W>(nf: &'a NormalForm<W>, path: &[Step]) -> Option<&'a NormalForm<W>> {
    path.iter().try_fold(nf, |nf, step| match (step, nf) {
        (Step::Fst, NormalForm::Pair(l, _)) => Some(&**l),
        (Step::Snd, NormalForm::Pair(_, r)) => Some(&**r),
        (Step::Inl, NormalForm::Inl(v)) | (Step::Inr, NormalForm::Inr(v)) => Some(&**v),
        (Step::Label(l), NormalForm::Table(t)) => t.iter().find(|(k, _)| k == l).map(|(_, v)| v),
        _ => None,
    })
}

/// Sub-functor reached by `path`.
pub fn functor_at<'a>(f: &'a FunctorExpr, path: &[Step]) -> Option<&'a FunctorExpr> {
    path.iter().try_fold(f, |f, step| match (step, f) {
        (Step::Fst, FunctorExpr::Product(l, _)) => Some(&**l),
        (Step::Snd, FunctorExpr::Product(_, r)) => Some(&**r),
        (Step::Inl, FunctorExpr::Coproduct(l, _)) => Some(&**l),
        (Step::Inr, FunctorExpr::Coproduct(_, r)) => Some(&**r),
        (Step::Label(l), FunctorExpr::Exponent(b, labels)) if labels.contains(l) => Some(&**b),
        _ => None,
    })
}

/// Checks that `w` describes a genuine difference between `a` and `b`, where
/// both are normal forms under `p`. Returns a reason on failure.
pub fn reevaluate<W: Weight>(
    p: &Partition,
    a: &NormalForm<W>,
    b: &NormalForm<W>,
    w: &Witness<W>,
) -> Result<(), String> {
    let (Some(x), Some(y)) = (navigate(a, &w.path), navigate(b, &w.path)) else {
        return Err("path does not lead into both successor values".into());
    };
    let norm = |v: &BValue<W>| normalize(p, v).map_err(|e| e.to_string());
    match &w.detail {
        Difference::Mass { class, left, right } => {
            let key = norm(class)?;
            let (Some(l), Some(r)) = (x.mass_of(&key), y.mass_of(&key)) else {
                return Err("path does not end at two distributions".into());
            };
            if (&l, &r) != (left, right) {
                return Err(format!("class masses are {} and {}", l.fraction_string(), r.fraction_string()));
            }
            if l == r {
                return Err("recorded masses are equal".into());
            }
        }
        Difference::Classes { left, right } => {
            let (l, r) = (norm(&BValue::State(left.clone()))?, norm(&BValue::State(right.clone()))?);
            if (x, y) != (&l, &r) || l == r {
                return Err("recorded states are not the two successors in distinct classes".into());
            }
        }
        Difference::Constants { left, right } => {
            if (x, y) != (&NormalForm::Atom(left.clone()), &NormalForm::Atom(right.clone())) || left == right {
                return Err("recorded constants do not match".into());
            }
        }
        Difference::Sides { left, right } => {
            let side = |nf: &NormalForm<W>| match nf {
                NormalForm::Inl(_) => Some(Summand::Inl),
                NormalForm::Inr(_) => Some(Summand::Inr),
                _ => None,
            };
            if (side(x), side(y)) != (Some(*left), Some(*right)) || left == right {
                return Err("recorded summands do not match".into());
            }
        }
        Difference::Element { element, in_left } => {
            let e = norm(element)?;
            let (NormalForm::Set(s1), NormalForm::Set(s2)) = (x, y) else {
                return Err("path does not end at two sets".into());
            };
            if (s1.contains(&e), s2.contains(&e)) != (*in_left, !*in_left) {
                return Err("element is not in exactly the recorded set".into());
            }
        }
    }
    Ok(())
}

//! Behaviour functors, their values, and the one-step apartness test.
//!
//! The grammar is `Id | A | B × B | B + B | B^A | P B | Ds B` with finite,
//! explicitly declared constant and label sets. A [`BValue`] is an element
//! of `B(X)` for a finite state set `X`.

mod normal;
mod reca;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::state::{StateId, Symbol, SymbolSet, Universe};
use crate::weight::Weight;

pub use normal::{normalize, normalize_unchecked, NormalForm};
pub use reca::{apartness_quotient, reca_direct, reca_inductive};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Identity,
    Constant(Arc<SymbolSet>),
    Product(Box<FunctorExpr>, Box<FunctorExpr>),
    Coproduct(Box<FunctorExpr>, Box<FunctorExpr>),
    Exponent(Box<FunctorExpr>, Arc<SymbolSet>),
    FinPowerset(Box<FunctorExpr>),
    SubDist(Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn product(l: FunctorExpr, r: FunctorExpr) -> Self {
        FunctorExpr::Product(Box::new(l), Box::new(r))
    }

    pub fn coproduct(l: FunctorExpr, r: FunctorExpr) -> Self {
        FunctorExpr::Coproduct(Box::new(l), Box::new(r))
    }

    pub fn exponent(body: FunctorExpr, labels: Arc<SymbolSet>) -> Self {
        FunctorExpr::Exponent(Box::new(body), labels)
    }

    pub fn powerset(body: FunctorExpr) -> Self {
        FunctorExpr::FinPowerset(Box::new(body))
    }

    pub fn subdist(body: FunctorExpr) -> Self {
        FunctorExpr::SubDist(Box::new(body))
    }

    /// Height of the syntax tree; `Id` and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            FunctorExpr::Identity | FunctorExpr::Constant(_) => 0,
            FunctorExpr::Product(l, r) | FunctorExpr::Coproduct(l, r) => 1 + l.depth().max(r.depth()),
            FunctorExpr::Exponent(b, _) | FunctorExpr::FinPowerset(b) | FunctorExpr::SubDist(b) => 1 + b.depth(),
        }
    }

    /// Every symbol set the expression mentions, in first-occurrence order.
    pub fn symbol_sets(&self) -> Vec<Arc<SymbolSet>> {
        fn walk(f: &FunctorExpr, out: &mut Vec<Arc<SymbolSet>>) {
            match f {
                FunctorExpr::Identity => {}
                FunctorExpr::Constant(s) => push(out, s),
                FunctorExpr::Product(l, r) | FunctorExpr::Coproduct(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                FunctorExpr::Exponent(b, s) => {
                    walk(b, out);
                    push(out, s);
                }
                FunctorExpr::FinPowerset(b) | FunctorExpr::SubDist(b) => walk(b, out),
            }
        }
        fn push(out: &mut Vec<Arc<SymbolSet>>, s: &Arc<SymbolSet>) {
            if !out.iter().any(|t| t.name() == s.name()) {
                out.push(s.clone());
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Coproduct(..) => 0,
            FunctorExpr::Product(..) => 1,
            FunctorExpr::FinPowerset(_) | FunctorExpr::SubDist(_) => 2,
            FunctorExpr::Exponent(..) => 3,
            FunctorExpr::Identity | FunctorExpr::Constant(_) => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            FunctorExpr::Identity => f.write_str("Id"),
            FunctorExpr::Constant(s) => f.write_str(s.name()),
            FunctorExpr::Coproduct(l, r) => {
                l.fmt_at(f, 0)?;
                f.write_str(" + ")?;
                r.fmt_at(f, 1)
            }
            FunctorExpr::Product(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" * ")?;
                r.fmt_at(f, 2)
            }
            FunctorExpr::FinPowerset(b) => {
                f.write_str("P ")?;
                b.fmt_at(f, 2)
            }
            FunctorExpr::SubDist(b) => {
                f.write_str("Ds ")?;
                b.fmt_at(f, 2)
            }
            FunctorExpr::Exponent(b, s) => {
                b.fmt_at(f, 3)?;
                write!(f, "^{}", s.name())
            }
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of `B(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BValue<W> {
    State(StateId),
    Atom(Symbol),
    Pair(Box<BValue<W>>, Box<BValue<W>>),
    Inl(Box<BValue<W>>),
    Inr(Box<BValue<W>>),
    /// One entry per label, in label order.
    Table(Vec<(Symbol, BValue<W>)>),
    Set(Vec<BValue<W>>),
    /// Finite support with positive weights.
    Dist(Vec<(BValue<W>, W)>),
}

impl<W: Weight> BValue<W> {
    pub fn pair(l: BValue<W>, r: BValue<W>) -> Self {
        BValue::Pair(Box::new(l), Box::new(r))
    }

    pub fn inl(v: BValue<W>) -> Self {
        BValue::Inl(Box::new(v))
    }

    pub fn inr(v: BValue<W>) -> Self {
        BValue::Inr(Box::new(v))
    }

    /// Every state occurring anywhere in the value.
    pub fn support(&self) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<StateId>) {
        match self {
            BValue::State(s) => {
                out.insert(s.clone());
            }
            BValue::Atom(_) => {}
            BValue::Pair(l, r) => {
                l.collect_support(out);
                r.collect_support(out);
            }
            BValue::Inl(v) | BValue::Inr(v) => v.collect_support(out),
            BValue::Table(entries) => entries.iter().for_each(|(_, v)| v.collect_support(out)),
            BValue::Set(items) => items.iter().for_each(|v| v.collect_support(out)),
            BValue::Dist(entries) => entries.iter().for_each(|(v, _)| v.collect_support(out)),
        }
    }

    /// Total mass of a `Dist` value; `None` for other shapes.
    pub fn mass(&self) -> Option<W> {
        match self {
            BValue::Dist(entries) => Some(entries.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone())),
            _ => None,
        }
    }

    /// Checks that the value is an element of `functor` applied to `universe`.
    pub fn validate(&self, functor: &FunctorExpr, universe: &Universe) -> Result<(), ShapeError> {
        validate_at(functor, universe, self, &mut Vec::new())
    }
}

/// Free-function form of [`BValue::support`].
pub fn support<W: Weight>(value: &BValue<W>) -> BTreeSet<StateId> {
    value.support()
}

/// Free-function form of [`BValue::validate`].
pub fn validate_value<W: Weight>(
    functor: &FunctorExpr,
    universe: &Universe,
    value: &BValue<W>,
) -> Result<(), ShapeError> {
    value.validate(functor, universe)
}

fn validate_at<W: Weight>(
    functor: &FunctorExpr,
    universe: &Universe,
    value: &BValue<W>,
    path: &mut Vec<String>,
) -> Result<(), ShapeError> {
    let fail = |path: &Vec<String>, kind| Err(ShapeError { path: render_path(path), kind });
    match (functor, value) {
        (FunctorExpr::Identity, BValue::State(s)) => {
            if universe.contains(s) {
                Ok(())
            } else {
                fail(path, ShapeErrorKind::UnknownState(s.name().to_string()))
            }
        }
        (FunctorExpr::Constant(set), BValue::Atom(a)) => {
            if set.contains(a) {
                Ok(())
            } else {
                fail(path, ShapeErrorKind::UnknownAtom { atom: a.name().to_string(), set: set.name().to_string() })
            }
        }
        (FunctorExpr::Product(lf, rf), BValue::Pair(l, r)) => {
            path.push("fst".into());
            validate_at(lf, universe, l, path)?;
            path.pop();
            path.push("snd".into());
            validate_at(rf, universe, r, path)?;
            path.pop();
            Ok(())
        }
        (FunctorExpr::Coproduct(lf, _), BValue::Inl(v)) => {
            path.push("inl".into());
            validate_at(lf, universe, v, path)?;
            path.pop();
            Ok(())
        }
        (FunctorExpr::Coproduct(_, rf), BValue::Inr(v)) => {
            path.push("inr".into());
            validate_at(rf, universe, v, path)?;
            path.pop();
            Ok(())
        }
        (FunctorExpr::Exponent(body, labels), BValue::Table(entries)) => {
            for (k, label) in labels.members().iter().enumerate() {
                match entries.get(k) {
                    Some((l, v)) if l == label => {
                        path.push(format!("({})", label.name()));
                        validate_at(body, universe, v, path)?;
                        path.pop();
                    }
                    _ => {
                        if let Some((l, _)) = entries.iter().find(|(l, _)| !labels.contains(l)) {
                            return fail(path, ShapeErrorKind::UnexpectedLabel(l.name().to_string()));
                        }
                        return fail(path, ShapeErrorKind::MissingLabel(label.name().to_string()));
                    }
                }
            }
            if let Some((l, _)) = entries.get(labels.members().len()) {
                return fail(path, ShapeErrorKind::UnexpectedLabel(l.name().to_string()));
            }
            Ok(())
        }
        (FunctorExpr::FinPowerset(body), BValue::Set(items)) => {
            for (k, v) in items.iter().enumerate() {
                path.push(format!("[{k}]"));
                validate_at(body, universe, v, path)?;
                path.pop();
                if items[..k].contains(v) {
                    return fail(path, ShapeErrorKind::DuplicateElement(k));
                }
            }
            Ok(())
        }
        (FunctorExpr::SubDist(body), BValue::Dist(entries)) => {
            let mut total = W::zero();
            for (k, (v, w)) in entries.iter().enumerate() {
                path.push(format!("[{k}]"));
                validate_at(body, universe, v, path)?;
                if !w.is_positive() {
                    return fail(path, ShapeErrorKind::NonPositiveWeight(w.to_string()));
                }
                path.pop();
                if entries[..k].iter().any(|(u, _)| u == v) {
                    return fail(path, ShapeErrorKind::DuplicateElement(k));
                }
                total = total + w.clone();
            }
            if total > W::one() {
                return fail(path, ShapeErrorKind::MassExceedsOne(total.to_string()));
            }
            Ok(())
        }
        (f, v) => fail(path, ShapeErrorKind::Mismatch { expected: f.to_string(), found: shape_name(v) }),
    }
}

fn shape_name<W>(v: &BValue<W>) -> &'static str {
    match v {
        BValue::State(_) => "a state",
        BValue::Atom(_) => "an atom",
        BValue::Pair(..) => "a pair",
        BValue::Inl(_) => "a left injection",
        BValue::Inr(_) => "a right injection",
        BValue::Table(_) => "a label table",
        BValue::Set(_) => "a set",
        BValue::Dist(_) => "a distribution",
    }
}

fn render_path(path: &[String]) -> String {
    if path.is_empty() {
        "value".to_string()
    } else {
        format!("value.{}", path.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {kind}")]
pub struct ShapeError {
    pub path: String,
    pub kind: ShapeErrorKind,
}

impl ShapeError {
    /// Prefixes the path, e.g. with the state whose successor value failed.
    pub fn within(mut self, context: &str) -> Self {
        self.path = self.path.replacen("value", context, 1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeErrorKind {
    #[error("expected an element of `{expected}`, found {found}")]
    Mismatch { expected: String, found: &'static str },
    #[error("`{0}` is not a state of the system")]
    UnknownState(String),
    #[error("`{atom}` is not a member of `{set}`")]
    UnknownAtom { atom: String, set: String },
    #[error("table is not total: no entry for label `{0}`")]
    MissingLabel(String),
    #[error("table has an entry for unexpected label `{0}`")]
    UnexpectedLabel(String),
    #[error("entry {0} repeats an earlier element")]
    DuplicateElement(usize),
    #[error("weight {0} is not positive")]
    NonPositiveWeight(String),
    #[error("total mass {0} > 1")]
    MassExceedsOne(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type V = BValue<Rational64>;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn setup() -> (Arc<Universe>, Arc<SymbolSet>) {
        (
            Universe::from_names(&["x", "x1", "x2", "y", "y1", "y2"]).unwrap(),
            SymbolSet::new("Act", &["a", "b"]).unwrap(),
        )
    }

    fn st(u: &Universe, n: &str) -> V {
        BValue::State(u.lookup(n).unwrap().clone())
    }

    #[test]
    fn validate_examples() {
        let (u, act) = setup();
        let dist = FunctorExpr::subdist(FunctorExpr::Identity);
        let ok: V = BValue::Dist(vec![(st(&u, "x1"), r(1, 2)), (st(&u, "x2"), r(1, 2))]);
        assert!(ok.validate(&dist, &u).is_ok());

        let heavy: V = BValue::Dist(vec![(st(&u, "x1"), r(2, 3)), (st(&u, "x2"), r(2, 3))]);
        let err = heavy.validate(&dist, &u).unwrap_err();
        assert_eq!(err.kind, ShapeErrorKind::MassExceedsOne("4/3".into()));

        let lts = FunctorExpr::exponent(FunctorExpr::powerset(FunctorExpr::Identity), act.clone());
        let partial: V = BValue::Table(vec![(act.members()[0].clone(), BValue::Set(vec![]))]);
        let err = partial.validate(&lts, &u).unwrap_err();
        assert_eq!(err.kind, ShapeErrorKind::MissingLabel("b".into()));
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        let (u, _) = setup();
        let dist = FunctorExpr::subdist(FunctorExpr::Identity);
        let zero: V = BValue::Dist(vec![(st(&u, "x1"), r(0, 1))]);
        assert!(matches!(zero.validate(&dist, &u).unwrap_err().kind, ShapeErrorKind::NonPositiveWeight(_)));
        let dup: V = BValue::Dist(vec![(st(&u, "x1"), r(1, 4)), (st(&u, "x1"), r(1, 4))]);
        assert!(matches!(dup.validate(&dist, &u).unwrap_err().kind, ShapeErrorKind::DuplicateElement(1)));
        let wrong: V = st(&u, "x");
        let err = wrong.validate(&dist, &u).unwrap_err();
        assert_eq!(err.to_string(), "value: expected an element of `Ds Id`, found a state");
        let stranger: V = BValue::State(StateId::new(40, "q").unwrap());
        assert!(stranger.validate(&FunctorExpr::Identity, &u).is_err());
    }

    #[test]
    fn support_examples() {
        let (u, _) = setup();
        let d: V = BValue::Dist(vec![(st(&u, "x1"), r(1, 2)), (st(&u, "x2"), r(1, 2))]);
        let names: Vec<_> = d.support().into_iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names, ["x1", "x2"]);
        let nat = SymbolSet::new("Nat", &["1"]).unwrap();
        let p: V = BValue::pair(BValue::Atom(nat.members()[0].clone()), st(&u, "x1"));
        assert_eq!(p.support().len(), 1);
        assert!(BValue::<Rational64>::Set(vec![]).support().is_empty());
    }

    #[test]
    fn functor_display() {
        let (_, act) = setup();
        let lts = FunctorExpr::exponent(FunctorExpr::powerset(FunctorExpr::Identity), act.clone());
        assert_eq!(lts.to_string(), "(P Id)^Act");
        let f = FunctorExpr::coproduct(
            FunctorExpr::product(FunctorExpr::Constant(act.clone()), FunctorExpr::Identity),
            FunctorExpr::subdist(FunctorExpr::product(FunctorExpr::Identity, FunctorExpr::Identity)),
        );
        assert_eq!(f.to_string(), "Act * Id + Ds (Id * Id)");
        assert_eq!(f.depth(), 3);
        let right_nested = FunctorExpr::product(
            FunctorExpr::Identity,
            FunctorExpr::product(FunctorExpr::Identity, FunctorExpr::Identity),
        );
        assert_eq!(right_nested.to_string(), "Id * (Id * Id)");
    }
}

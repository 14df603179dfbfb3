//! The relation `t1 ▷_R t2`: successor values that differ once states are
//! identified by the equivalence closure of the complement of `R^s`.

use crate::functor::normal::normalize_unchecked;
use crate::functor::{BValue, FunctorExpr};
use crate::relation::{Partition, Relation};
use crate::weight::Weight;

/// Partition induced by `e(complement(R^s))`.
pub fn apartness_quotient(r: &Relation) -> Partition {
    r.symmetric_closure().complement().equivalence_closure()
}

/// `t1 ▷_R t2` computed by comparing normal forms under the quotient.
pub fn reca_direct<W: Weight>(functor: &FunctorExpr, r: &Relation, v1: &BValue<W>, v2: &BValue<W>) -> bool {
    debug_assert!(v1.validate(functor, r.universe()).is_ok());
    debug_assert!(v2.validate(functor, r.universe()).is_ok());
    let p = apartness_quotient(r);
    normalize_unchecked(&p, v1) != normalize_unchecked(&p, v2)
}

/// `t1 ▷_R t2` computed clause by clause over the functor's syntax.
///
/// At `Id` positions states are compared with the apartness interior of
/// `R^s`; at `Ds` positions the keys of both distributions are grouped by
/// the complement of the child relation and class masses are compared.
/// Values in different coproduct summands are always apart.
///
/// # Panics
/// If either value does not have the shape of `functor`.
pub fn reca_inductive<W: Weight>(functor: &FunctorExpr, r: &Relation, v1: &BValue<W>, v2: &BValue<W>) -> bool {
    let interior = r
        .symmetric_closure()
        .apartness_interior()
        .expect("symmetric closure is symmetric");
    Inductive { interior: &interior }.apart(functor, v1, v2)
}

struct Inductive<'a> {
    interior: &'a Relation,
}

impl Inductive<'_> {
    fn apart<W: Weight>(&self, f: &FunctorExpr, v1: &BValue<W>, v2: &BValue<W>) -> bool {
        match (f, v1, v2) {
            (FunctorExpr::Identity, BValue::State(a), BValue::State(b)) => self.interior.contains(a, b),
            (FunctorExpr::Constant(_), BValue::Atom(a), BValue::Atom(b)) => a != b,
            (FunctorExpr::Product(lf, rf), BValue::Pair(l1, r1), BValue::Pair(l2, r2)) => {
                self.apart(lf, l1, l2) || self.apart(rf, r1, r2)
            }
            (FunctorExpr::Coproduct(lf, _), BValue::Inl(a), BValue::Inl(b)) => self.apart(lf, a, b),
            (FunctorExpr::Coproduct(_, rf), BValue::Inr(a), BValue::Inr(b)) => self.apart(rf, a, b),
            (FunctorExpr::Coproduct(..), BValue::Inl(_), BValue::Inr(_))
            | (FunctorExpr::Coproduct(..), BValue::Inr(_), BValue::Inl(_)) => true,
            (FunctorExpr::Exponent(body, labels), BValue::Table(t1), BValue::Table(t2)) => {
                labels.members().iter().any(|label| {
                    let a = lookup(t1, label);
                    let b = lookup(t2, label);
                    self.apart(body, a, b)
                })
            }
            (FunctorExpr::FinPowerset(body), BValue::Set(s1), BValue::Set(s2)) => {
                s1.iter().any(|u| s2.iter().all(|v| self.apart(body, u, v)))
                    || s2.iter().any(|v| s1.iter().all(|u| self.apart(body, u, v)))
            }
            (FunctorExpr::SubDist(body), BValue::Dist(d1), BValue::Dist(d2)) => self.dist_apart(body, d1, d2),
            (f, _, _) => panic!("values do not have the shape of `{f}`"),
        }
    }

    fn dist_apart<W: Weight>(&self, body: &FunctorExpr, d1: &[(BValue<W>, W)], d2: &[(BValue<W>, W)]) -> bool {
        let mut keys: Vec<&BValue<W>> = Vec::new();
        for (k, _) in d1.iter().chain(d2) {
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        // classes of the complement of the child relation, by union-find
        let mut class: Vec<usize> = (0..keys.len()).collect();
        fn root(class: &mut [usize], mut i: usize) -> usize {
            while class[i] != i {
                class[i] = class[class[i]];
                i = class[i];
            }
            i
        }
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                let (ri, rj) = (root(&mut class, i), root(&mut class, j));
                if ri != rj && !self.apart(body, keys[i], keys[j]) {
                    class[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let roots: Vec<usize> = (0..keys.len()).map(|i| root(&mut class, i)).collect();
        let mass = |d: &[(BValue<W>, W)], c: usize| {
            d.iter()
                .filter(|(k, _)| roots[keys.iter().position(|x| x == &k).unwrap()] == c)
                .fold(W::zero(), |acc, (_, w)| acc + w.clone())
        };
        let mut seen = Vec::new();
        for &c in &roots {
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            if mass(d1, c) != mass(d2, c) {
                return true;
            }
        }
        false
    }
}

fn lookup<'v, W>(table: &'v [(crate::state::Symbol, BValue<W>)], label: &crate::state::Symbol) -> &'v BValue<W> {
    table
        .iter()
        .find(|(l, _)| l == label)
        .map(|(_, v)| v)
        .unwrap_or_else(|| panic!("table has no entry for label {label}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{SymbolSet, Universe};
    use num_rational::Rational64;
    use std::sync::Arc;

    type V = BValue<Rational64>;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn st(u: &Universe, n: &str) -> V {
        BValue::State(u.lookup(n).unwrap().clone())
    }

    fn both(f: &FunctorExpr, rel: &Relation, a: &V, b: &V) -> bool {
        let d = reca_direct(f, rel, a, b);
        assert_eq!(d, reca_inductive(f, rel, a, b), "direct and inductive disagree");
        assert_eq!(d, reca_direct(f, rel, b, a), "not symmetric");
        d
    }

    fn system3() -> Arc<Universe> {
        Universe::from_names(&["x", "x1", "x2", "y", "y1", "y2"]).unwrap()
    }

    #[test]
    fn subdistribution_with_eight_pairs() {
        let u = system3();
        let f = FunctorExpr::subdist(FunctorExpr::Identity);
        let s = Relation::from_named_pairs(
            u.clone(),
            &[
                ("x1", "x2"),
                ("x1", "y2"),
                ("x2", "y1"),
                ("y1", "y2"),
                ("x", "x1"),
                ("x", "y1"),
                ("y", "x1"),
                ("y", "y1"),
            ],
        )
        .unwrap();
        let gx = BValue::Dist(vec![(st(&u, "x1"), r(1, 2)), (st(&u, "x2"), r(1, 2))]);
        let gy = BValue::Dist(vec![(st(&u, "y1"), r(2, 5)), (st(&u, "y2"), r(3, 5))]);
        assert!(both(&f, &s, &gx, &gy));

        // with R = S1 alone the interior is empty and only total mass counts
        let s1 = Relation::from_named_pairs(u.clone(), &[("x1", "x2"), ("x1", "y2"), ("x2", "y1"), ("y1", "y2")])
            .unwrap();
        assert!(!both(&f, &s1, &gx, &gy));
    }

    #[test]
    fn empty_vs_full_mass() {
        let u = system3();
        let f = FunctorExpr::subdist(FunctorExpr::Identity);
        let empty: V = BValue::Dist(vec![]);
        let loop_y2: V = BValue::Dist(vec![(st(&u, "y2"), r(1, 1))]);
        for rel in [Relation::empty(u.clone()), Relation::total(u.clone())] {
            assert!(both(&f, &rel, &empty, &loop_y2));
        }
    }

    #[test]
    fn reflexive_values_never_apart() {
        let u = system3();
        let f = FunctorExpr::subdist(FunctorExpr::Identity);
        let v: V = BValue::Dist(vec![(st(&u, "y2"), r(1, 3))]);
        assert!(!both(&f, &Relation::empty(u.clone()), &v, &v));
        let nat = SymbolSet::new("Out", &["0", "1"]).unwrap();
        let c = FunctorExpr::Constant(nat.clone());
        let a: V = BValue::Atom(nat.members()[1].clone());
        assert!(!both(&c, &Relation::empty(u.clone()), &a, &a));
    }

    #[test]
    fn stream_successor_needs_restricted_interior() {
        let nat = SymbolSet::new("Nat", &["1", "2"]).unwrap();
        let f = FunctorExpr::product(FunctorExpr::Constant(nat.clone()), FunctorExpr::Identity);
        let one = BValue::Atom(nat.members()[0].clone());
        let z = Universe::from_names(&["x1", "x2"]).unwrap();
        let rel = Relation::from_named_pairs(z.clone(), &[("x1", "x2")]).unwrap();
        let a: V = BValue::pair(one.clone(), st(&z, "x1"));
        let b: V = BValue::pair(one.clone(), st(&z, "x2"));
        assert!(both(&f, &rel, &a, &b));

        // over a larger universe the interior of {(x1,x2)}^s is empty
        let big = Universe::from_names(&["x0", "x1", "x2"]).unwrap();
        let rel = Relation::from_named_pairs(big.clone(), &[("x1", "x2")]).unwrap();
        let a: V = BValue::pair(one.clone(), st(&big, "x1"));
        let b: V = BValue::pair(one, st(&big, "x2"));
        assert!(!both(&f, &rel, &a, &b));
    }

    #[test]
    fn lts_label_b_distinguishes() {
        let u = system3();
        let act = SymbolSet::new("Act", &["a", "b"]).unwrap();
        let (a, b) = (act.members()[0].clone(), act.members()[1].clone());
        let f = FunctorExpr::exponent(FunctorExpr::powerset(FunctorExpr::Identity), act.clone());
        let gx: V = BValue::Table(vec![
            (a.clone(), BValue::Set(vec![st(&u, "x1")])),
            (b.clone(), BValue::Set(vec![st(&u, "x2")])),
        ]);
        let gy: V = BValue::Table(vec![
            (a.clone(), BValue::Set(vec![st(&u, "y1")])),
            (b.clone(), BValue::Set(vec![st(&u, "y2")])),
        ]);
        // {(x2,y2)} alone has an empty interior over six states; the equivalence
        // classes {x1,x2,y1}, ... must be separated from y2 as well.
        let rel = Relation::from_named_pairs(
            u.clone(),
            &[("x2", "y2"), ("x", "y2"), ("x1", "y2"), ("y", "y2"), ("y1", "y2")],
        )
        .unwrap();
        assert!(both(&f, &rel, &gx, &gy));
        assert!(!both(&f, &Relation::empty(u.clone()), &gx, &gy));
    }

    #[test]
    fn coproduct_sides() {
        let u = Universe::from_names(&["s"]).unwrap();
        let f = FunctorExpr::coproduct(FunctorExpr::Identity, FunctorExpr::Identity);
        let l: V = BValue::inl(st(&u, "s"));
        let rr: V = BValue::inr(st(&u, "s"));
        assert!(both(&f, &Relation::empty(u.clone()), &l, &rr));
        assert!(!both(&f, &Relation::empty(u.clone()), &l, &l));
    }

    #[test]
    fn powerset_empty_sets() {
        let u = Universe::from_names(&["s", "t"]).unwrap();
        let f = FunctorExpr::powerset(FunctorExpr::Identity);
        let empty: V = BValue::Set(vec![]);
        let one: V = BValue::Set(vec![st(&u, "s")]);
        assert!(both(&f, &Relation::empty(u.clone()), &empty, &one));
        assert!(!both(&f, &Relation::empty(u.clone()), &empty, &empty));
        let two: V = BValue::Set(vec![st(&u, "s"), st(&u, "t")]);
        let rel = Relation::from_named_pairs(u.clone(), &[("s", "t")]).unwrap();
        assert!(both(&f, &rel, &one, &two));
        assert!(!both(&f, &Relation::empty(u.clone()), &one, &two));
    }
}

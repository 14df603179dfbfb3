mod common;

use std::sync::Arc;

use apartness::cobisim::cobisim_apart;
use apartness::functor::normalize;
use apartness::proof::{check, from_json, synthesize, to_json, CheckResult, Rule, Synthesis};
use apartness::random::{default_symbols, mass_pool, random_functor, random_system, random_value, RandomSpec};
use apartness::{
    apartness_tower, behavioural_apartness, behavioural_equivalence, one_step_covering, parse_system, print_system,
    reca_direct, reca_inductive, system_hash, CoveringMode, FunctorExpr, Partition, Rational, Relation, System,
    Universe,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn universe(n: usize) -> Arc<Universe> {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    Universe::from_names(&names).unwrap()
}

fn relation(u: &Arc<Universe>, bits: &[bool]) -> Relation {
    let n = u.len();
    let mut r = Relation::empty(u.clone());
    for i in 0..n {
        for j in 0..n {
            if bits[i * n + j] {
                r.set_index(i, j, true);
            }
        }
    }
    r
}

fn arb_relation() -> impl Strategy<Value = Relation> {
    (1usize..=6).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * n).prop_map(move |b| relation(&universe(n), &b)))
}

fn sys(seed: u64, max_states: usize) -> System {
    random_system(seed, &RandomSpec { max_states, ..RandomSpec::default() })
}

fn partition(u: &Arc<Universe>, labels: &[u8]) -> Partition {
    Partition::from_labels(u.clone(), &labels[..u.len()])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn closures(r in arb_relation()) {
        let s = r.symmetric_closure();
        prop_assert!(s.is_symmetric());
        prop_assert!(r.is_subset(&s));
        prop_assert_eq!(s.symmetric_closure(), s.clone());
        prop_assert_eq!(r.complement().complement(), r.clone());
        let e = r.equivalence_closure().to_relation();
        prop_assert!(r.is_subset(&e));
        prop_assert!(e.equivalence_closure().to_relation() == e);
        let i = s.apartness_interior().unwrap();
        prop_assert!(r.apartness_interior().is_err() || r.is_symmetric());
        prop_assert!(i.is_subset(&s));
        prop_assert!(i.is_apartness().holds());
        // the interior is the complement of the equivalence generated by the complement
        prop_assert_eq!(i, s.complement().equivalence_closure().to_relation().complement());
    }

    #[test]
    fn restriction(r in arb_relation(), keep in proptest::collection::vec(any::<bool>(), 6)) {
        let u = r.universe().clone();
        let z: Vec<_> = u.states().iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| s.clone()).collect();
        prop_assume!(!z.is_empty());
        let rz = r.restrict(&z).unwrap();
        prop_assert_eq!(rz.universe().len(), z.len());
        for a in &z {
            for b in &z {
                prop_assert_eq!(rz.contains(a, b), r.contains(a, b));
            }
        }
    }

    #[test]
    fn normal_forms(seed in any::<u64>(), fine in proptest::collection::vec(0u8..4, 8), merge in 0u8..4) {
        let c = sys(seed, 8);
        let u = c.universe();
        let p = partition(u, &fine);
        // merging two labels gives a coarser partition
        let coarse_labels: Vec<u8> = fine.iter().map(|&l| if l == merge { (merge + 1) % 4 } else { l }).collect();
        let p2 = partition(u, &coarse_labels);
        prop_assert!(p.refines(&p2));
        let s = c.states();
        for a in s {
            let na = normalize(&p, c.gamma(a).unwrap()).unwrap();
            prop_assert_eq!(normalize(&p, &na.to_value()).unwrap(), na.clone());
            for b in s {
                let nb = normalize(&p, c.gamma(b).unwrap()).unwrap();
                if na == nb {
                    prop_assert_eq!(normalize(&p2, c.gamma(a).unwrap()).unwrap(), normalize(&p2, c.gamma(b).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn reca_laws(seed in any::<u64>(), bits in proptest::collection::vec(any::<bool>(), 16), extra in proptest::collection::vec(any::<bool>(), 16)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = default_symbols();
        let f = random_functor(&mut rng, 2, &a);
        let u = universe(4);
        let masses = mass_pool::<Rational>();
        let v1 = random_value(&mut rng, &f, &u, &masses);
        let v2 = random_value(&mut rng, &f, &u, &masses);
        let r = relation(&u, &bits);
        let bigger = r.union(&relation(&u, &extra)).unwrap();
        let d = reca_direct(&f, &r, &v1, &v2);
        prop_assert_eq!(d, reca_inductive(&f, &r, &v1, &v2));
        prop_assert_eq!(d, reca_direct(&f, &r, &v2, &v1));
        prop_assert!(!reca_direct(&f, &r, &v1, &v1));
        if d {
            prop_assert!(reca_direct(&f, &bigger, &v1, &v2));
        }
    }

    #[test]
    fn engine_matches_unfoldings(seed in any::<u64>()) {
        let c = sys(seed, 7);
        let ids = common::unfoldings(&c);
        let n = c.len();
        let tower = apartness_tower(&c, n + 1).unwrap();
        let apart = behavioural_apartness(&c).unwrap();
        prop_assert!(tower.is_stable());
        // no new pairs after level n - 1
        for k in n..tower.levels().len() {
            prop_assert!(tower.newly_apart(k).is_empty());
        }
        for (k, level) in ids.iter().enumerate() {
            let rel = tower.levels().get(k).unwrap_or(tower.limit());
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(rel.contains_index(i, j), level[i] != level[j], "level {} at ({}, {})", k, i, j);
                }
            }
        }
        let last = ids.last().unwrap();
        let eq = behavioural_equivalence(&c).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(apart.contains_index(i, j), last[i] != last[j]);
                prop_assert_eq!(eq.block_index(i) == eq.block_index(j), last[i] == last[j]);
            }
        }
    }

    #[test]
    fn covering_lemma(seed in any::<u64>(), labels in proptest::collection::vec(0u8..3, 8), pick in any::<(usize, usize)>()) {
        let c = sys(seed, 6);
        let s = c.states();
        let (x, y) = (&s[pick.0 % s.len()], &s[pick.1 % s.len()]);
        let p = partition(c.universe(), &labels);
        let whole = normalize(&p, c.gamma(x).unwrap()).unwrap() != normalize(&p, c.gamma(y).unwrap()).unwrap();
        for mode in [CoveringMode::Minimal, CoveringMode::Full] {
            let cov = one_step_covering(&c, &[x.clone(), y.clone()], mode).unwrap();
            let pz = p.restrict(&cov.z).unwrap();
            let local = normalize(&pz, cov.g(x).unwrap()).unwrap() != normalize(&pz, cov.g(y).unwrap()).unwrap();
            prop_assert_eq!(whole, local);
        }
    }

    #[test]
    fn dsl_round_trip(seed in any::<u64>()) {
        let c = sys(seed, 8);
        let text = print_system(&c);
        let back: System = parse_system(&text).unwrap();
        prop_assert_eq!(print_system(&back), text);
        prop_assert_eq!(system_hash(&back), system_hash(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, ..ProptestConfig::default() })]

    #[test]
    fn proofs_round_trip(seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let c = sys(seed, 6);
        let s = c.states();
        let (x, y) = (&s[pick.0 % s.len()], &s[pick.1 % s.len()]);
        let apart = behavioural_apartness(&c).unwrap();
        for rule in [Rule::Basic, Rule::Covering] {
            match synthesize(&c, x, y, rule).unwrap() {
                Synthesis::Proved(t) => {
                    prop_assert!(apart.contains(x, y));
                    prop_assert_eq!(check(&c, &t), CheckResult::Valid);
                    let text = to_json(&c, &t);
                    let doc = from_json(&text, &c).unwrap();
                    prop_assert_eq!(check(&c, &doc.root), CheckResult::Valid);
                    prop_assert_eq!(to_json(&c, &doc.root), text);
                    prop_assert_eq!(t.height(), apartness_tower(&c, usize::MAX).unwrap().level_of(x, y).unwrap());
                }
                Synthesis::NotApart { class } => {
                    prop_assert!(!apart.contains(x, y));
                    prop_assert!(class.contains(x) && class.contains(y));
                }
            }
        }
    }

    #[test]
    fn couplings_match_behaviour(seed in any::<u64>()) {
        let spec = RandomSpec { max_states: 6, functor: Some(FunctorExpr::subdist(FunctorExpr::Identity)), ..RandomSpec::default() };
        let c: System = random_system(seed, &spec);
        prop_assert_eq!(cobisim_apart(&c).unwrap(), behavioural_apartness(&c).unwrap());
    }
}

//! Structured proof documents.
//!
//! ```text
//! { "system_hash": "<hex>", "root": node }
//! node    = { "goal": [x, y], "rule": "basic" | "covering", "Z": [..]?, "R": [[a, b], ..],
//!             "witness": { "path": [..], "kind": .., .. }, "children": [node | ref] }
//! ref     = { "ref": [x, y] }   -- the first full node with that goal, earlier in the document
//! ```
//!
//! `R` lists each unordered pair once, in universe order. Rationals are
//! `"p/q"` strings; witness payloads that are successor values are written
//! in the system language.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::coalgebra::Coalgebra;
use crate::dsl::{parse_value, print_value, system_hash};
use crate::error::Error;
use crate::functor::FunctorExpr;
use crate::proof::witness::{functor_at, Difference, Step, Summand, Witness};
use crate::proof::{ProofNode, Rule};
use crate::relation::Relation;
use crate::state::{StateId, Universe};
use crate::weight::{parse_fraction, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDocument<W> {
    pub system_hash: String,
    pub root: Arc<ProofNode<W>>,
}

/// Serialises a proof about `c`, two-space indented, with a trailing newline.
pub fn to_json<W: Weight>(c: &Coalgebra<W>, root: &Arc<ProofNode<W>>) -> String {
    let mut first: HashMap<(StateId, StateId), *const ProofNode<W>> = HashMap::new();
    let doc = json!({ "system_hash": system_hash(c), "root": node_json(root, &mut first) });
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON values serialise");
    out.push('\n');
    out
}

fn pair_json(a: &StateId, b: &StateId) -> Value {
    json!([a.name(), b.name()])
}

fn node_json<W: Weight>(t: &Arc<ProofNode<W>>, first: &mut HashMap<(StateId, StateId), *const ProofNode<W>>) -> Value {
    match first.get(&t.goal) {
        Some(&p) if p == Arc::as_ptr(t) => return json!({ "ref": pair_json(&t.goal.0, &t.goal.1) }),
        Some(_) => {}
        None => {
            first.insert(t.goal.clone(), Arc::as_ptr(t));
        }
    }
    let mut m = Map::new();
    m.insert("goal".into(), pair_json(&t.goal.0, &t.goal.1));
    m.insert("rule".into(), json!(t.rule.to_string()));
    if let Some(z) = &t.covering_z {
        m.insert("Z".into(), json!(z.iter().map(|s| s.name()).collect::<Vec<_>>()));
    }
    let u = t.relation.universe();
    let pairs: Vec<Value> =
        t.relation.unordered_index_pairs().into_iter().map(|(i, j)| pair_json(u.state(i), u.state(j))).collect();
    m.insert("R".into(), Value::Array(pairs));
    m.insert("witness".into(), witness_json(&t.witness));
    let children: Vec<Value> = t.children.iter().map(|ch| node_json(ch, first)).collect();
    m.insert("children".into(), Value::Array(children));
    Value::Object(m)
}

fn witness_json<W: Weight>(w: &Witness<W>) -> Value {
    let mut m = Map::new();
    m.insert("path".into(), json!(w.path.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    match &w.detail {
        Difference::Mass { class, left, right } => {
            m.insert("kind".into(), json!("mass"));
            m.insert("class".into(), json!(print_value(class)));
            m.insert("left".into(), json!(left.fraction_string()));
            m.insert("right".into(), json!(right.fraction_string()));
        }
        Difference::Classes { left, right } => {
            m.insert("kind".into(), json!("classes"));
            m.insert("left".into(), json!(left.name()));
            m.insert("right".into(), json!(right.name()));
        }
        Difference::Constants { left, right } => {
            m.insert("kind".into(), json!("constants"));
            m.insert("left".into(), json!(left.name()));
            m.insert("right".into(), json!(right.name()));
        }
        Difference::Sides { left, right } => {
            m.insert("kind".into(), json!("sides"));
            m.insert("left".into(), json!(left.to_string()));
            m.insert("right".into(), json!(right.to_string()));
        }
        Difference::Element { element, in_left } => {
            m.insert("kind".into(), json!("element"));
            m.insert("element".into(), json!(print_value(element)));
            m.insert("in".into(), json!(if *in_left { "left" } else { "right" }));
        }
    }
    Value::Object(m)
}

/// Parses a proof document about `c`. Names must be states of `c`; shape
/// errors are reported as [`Error::ProofFormat`]. The recorded system hash
/// is returned as is, not compared.
pub fn from_json<W: Weight>(text: &str, c: &Coalgebra<W>) -> Result<ProofDocument<W>, Error> {
    let doc: Value = serde_json::from_str(text).map_err(|e| fmt_err(format!("not JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| fmt_err("top level must be an object"))?;
    let system_hash = obj
        .get("system_hash")
        .and_then(Value::as_str)
        .ok_or_else(|| fmt_err("missing string field `system_hash`"))?
        .to_string();
    let root = obj.get("root").ok_or_else(|| fmt_err("missing field `root`"))?;
    let mut r = Reader { c, started: HashMap::new(), done: HashMap::new(), next: 0 };
    let root = r.node(root, "root")?;
    Ok(ProofDocument { system_hash, root })
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::ProofFormat(msg.into())
}

struct Reader<'a, W> {
    c: &'a Coalgebra<W>,
    /// Goal → pre-order index of the first full node with that goal.
    started: HashMap<(StateId, StateId), usize>,
    done: HashMap<usize, Arc<ProofNode<W>>>,
    next: usize,
}

impl<W: Weight> Reader<'_, W> {
    fn state(&self, v: &Value, at: &str) -> Result<StateId, Error> {
        let name = v.as_str().ok_or_else(|| fmt_err(format!("{at}: expected a state name")))?;
        self.c.lookup(name).cloned().map_err(|_| fmt_err(format!("{at}: unknown state `{name}`")))
    }

    fn pair(&self, v: &Value, at: &str) -> Result<(StateId, StateId), Error> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((self.state(a, at)?, self.state(b, at)?)),
            _ => Err(fmt_err(format!("{at}: expected a pair of state names"))),
        }
    }

    fn node(&mut self, v: &Value, at: &str) -> Result<Arc<ProofNode<W>>, Error> {
        let obj = v.as_object().ok_or_else(|| fmt_err(format!("{at}: expected an object")))?;
        if let Some(target) = obj.get("ref") {
            let goal = self.pair(target, &format!("{at}.ref"))?;
            let idx = self
                .started
                .get(&goal)
                .ok_or_else(|| fmt_err(format!("{at}: reference to ({}, {}) before its proof", goal.0, goal.1)))?;
            return self
                .done
                .get(idx)
                .cloned()
                .ok_or_else(|| fmt_err(format!("{at}: reference to an enclosing proof of ({}, {})", goal.0, goal.1)));
        }
        let field = |name: &str| obj.get(name).ok_or_else(|| fmt_err(format!("{at}: missing field `{name}`")));
        let goal = self.pair(field("goal")?, &format!("{at}.goal"))?;
        let index = self.next;
        self.next += 1;
        self.started.entry(goal.clone()).or_insert(index);
        let rule = match field("rule")?.as_str() {
            Some("basic") => Rule::Basic,
            Some("covering") => Rule::Covering,
            _ => return Err(fmt_err(format!("{at}.rule: expected \"basic\" or \"covering\""))),
        };
        let covering_z = match obj.get("Z") {
            None => None,
            Some(z) => {
                let items = z.as_array().ok_or_else(|| fmt_err(format!("{at}.Z: expected an array")))?;
                Some(items.iter().map(|s| self.state(s, &format!("{at}.Z"))).collect::<Result<Vec<_>, _>>()?)
            }
        };
        let pairs = field("R")?
            .as_array()
            .ok_or_else(|| fmt_err(format!("{at}.R: expected an array")))?
            .iter()
            .map(|p| self.pair(p, &format!("{at}.R")))
            .collect::<Result<Vec<_>, _>>()?;
        let universe = match &covering_z {
            None => self.c.universe().clone(),
            Some(z) => {
                let all = z.iter().chain(pairs.iter().flat_map(|(a, b)| [a, b]));
                self.c.universe().restrict(all)?
            }
        };
        let relation = symmetric_relation(universe, &pairs)?;
        let witness = self.witness(field("witness")?, &format!("{at}.witness"))?;
        let children = field("children")?
            .as_array()
            .ok_or_else(|| fmt_err(format!("{at}.children: expected an array")))?
            .iter()
            .enumerate()
            .map(|(i, ch)| self.node(ch, &format!("{at}.children[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let node = Arc::new(ProofNode { goal, rule, relation, covering_z, witness, children });
        self.done.insert(index, node.clone());
        Ok(node)
    }

    fn witness(&self, v: &Value, at: &str) -> Result<Witness<W>, Error> {
        let obj = v.as_object().ok_or_else(|| fmt_err(format!("{at}: expected an object")))?;
        let text = |name: &str| {
            obj.get(name)
                .and_then(Value::as_str)
                .ok_or_else(|| fmt_err(format!("{at}: missing string field `{name}`")))
        };
        let steps = obj
            .get("path")
            .and_then(Value::as_array)
            .ok_or_else(|| fmt_err(format!("{at}: missing array field `path`")))?;
        let mut path = Vec::new();
        let mut f = self.c.functor();
        for s in steps {
            let s = s.as_str().ok_or_else(|| fmt_err(format!("{at}.path: expected strings")))?;
            let step = match (s, f) {
                ("fst", _) => Step::Fst,
                ("snd", _) => Step::Snd,
                ("inl", _) => Step::Inl,
                ("inr", _) => Step::Inr,
                (l, FunctorExpr::Exponent(_, labels)) if l.starts_with("label:") => {
                    let name = &l["label:".len()..];
                    Step::Label(labels.get(name).cloned().ok_or_else(|| fmt_err(format!("{at}.path: unknown label `{name}`")))?)
                }
                _ => return Err(fmt_err(format!("{at}.path: step `{s}` does not fit the functor"))),
            };
            f = functor_at(f, std::slice::from_ref(&step))
                .ok_or_else(|| fmt_err(format!("{at}.path: step `{s}` does not fit the functor")))?;
            path.push(step);
        }
        let weight = |name: &str| {
            let t = text(name)?;
            parse_fraction::<W>(t).ok_or_else(|| fmt_err(format!("{at}.{name}: `{t}` is not a rational")))
        };
        let value = |name: &str, inner: &FunctorExpr| {
            parse_value(text(name)?, inner, self.c).map_err(|e| fmt_err(format!("{at}.{name}: {e}")))
        };
        let summand = |name: &str| match text(name)? {
            "inl" => Ok(Summand::Inl),
            "inr" => Ok(Summand::Inr),
            other => Err(fmt_err(format!("{at}.{name}: `{other}` is not a summand"))),
        };
        let misfit = |kind: &str| fmt_err(format!("{at}: a `{kind}` difference cannot occur at this path"));
        let detail = match (text("kind")?, f) {
            ("mass", FunctorExpr::SubDist(inner)) => {
                Difference::Mass { class: value("class", inner)?, left: weight("left")?, right: weight("right")? }
            }
            ("classes", FunctorExpr::Identity) => Difference::Classes {
                left: self.state(obj.get("left").unwrap_or(&Value::Null), &format!("{at}.left"))?,
                right: self.state(obj.get("right").unwrap_or(&Value::Null), &format!("{at}.right"))?,
            },
            ("constants", FunctorExpr::Constant(set)) => {
                let atom = |name: &str| {
                    let t = text(name)?;
                    set.get(t).cloned().ok_or_else(|| fmt_err(format!("{at}.{name}: `{t}` is not in `{}`", set.name())))
                };
                Difference::Constants { left: atom("left")?, right: atom("right")? }
            }
            ("sides", FunctorExpr::Coproduct(..)) => Difference::Sides { left: summand("left")?, right: summand("right")? },
            ("element", FunctorExpr::FinPowerset(inner)) => Difference::Element {
                element: value("element", inner)?,
                in_left: match text("in")? {
                    "left" => true,
                    "right" => false,
                    other => return Err(fmt_err(format!("{at}.in: `{other}` is not left or right"))),
                },
            },
            (kind @ ("mass" | "classes" | "constants" | "sides" | "element"), _) => return Err(misfit(kind)),
            (other, _) => return Err(fmt_err(format!("{at}.kind: unknown difference `{other}`"))),
        };
        Ok(Witness { path, detail })
    }
}

fn symmetric_relation(universe: Arc<Universe>, pairs: &[(StateId, StateId)]) -> Result<Relation, Error> {
    let mut r = Relation::empty(universe);
    for (a, b) in pairs {
        r.insert(a, b)?;
        r.insert(b, a)?;
    }
    Ok(r)
}

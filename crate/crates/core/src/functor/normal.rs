use crate::error::Error;
use crate::functor::BValue;
use crate::relation::Partition;
use crate::state::{StateId, Symbol};
use crate::weight::Weight;

/// The image of a value under `B q` for the quotient map `q` of a partition.
///
/// States are replaced by their block representatives, sets are
/// deduplicated and sorted, distribution entries that collapse onto the same
/// normal form have their weights summed. Two values have equal images
/// exactly when their normal forms are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalForm<W> {
    Class(StateId),
    Atom(Symbol),
    Pair(Box<NormalForm<W>>, Box<NormalForm<W>>),
    Inl(Box<NormalForm<W>>),
    Inr(Box<NormalForm<W>>),
    Table(Vec<(Symbol, NormalForm<W>)>),
    Set(Vec<NormalForm<W>>),
    Dist(Vec<(NormalForm<W>, W)>),
}

impl<W: Weight> NormalForm<W> {
    /// The normal form read back as a value whose states are representatives.
    pub fn to_value(&self) -> BValue<W> {
        match self {
            NormalForm::Class(s) => BValue::State(s.clone()),
            NormalForm::Atom(a) => BValue::Atom(a.clone()),
            NormalForm::Pair(l, r) => BValue::pair(l.to_value(), r.to_value()),
            NormalForm::Inl(v) => BValue::inl(v.to_value()),
            NormalForm::Inr(v) => BValue::inr(v.to_value()),
            NormalForm::Table(t) => BValue::Table(t.iter().map(|(l, v)| (l.clone(), v.to_value())).collect()),
            NormalForm::Set(items) => BValue::Set(items.iter().map(NormalForm::to_value).collect()),
            NormalForm::Dist(entries) => {
                BValue::Dist(entries.iter().map(|(v, w)| (v.to_value(), w.clone())).collect())
            }
        }
    }

    /// Total mass of a `Dist` normal form.
    pub fn mass(&self) -> Option<W> {
        match self {
            NormalForm::Dist(entries) => Some(entries.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone())),
            _ => None,
        }
    }

    /// Weight the distribution assigns to the class `key` (zero if absent).
    pub fn mass_of(&self, key: &NormalForm<W>) -> Option<W> {
        match self {
            NormalForm::Dist(entries) => Some(
                entries.iter().find(|(k, _)| k == key).map(|(_, w)| w.clone()).unwrap_or_else(W::zero),
            ),
            _ => None,
        }
    }
}

/// Computes `B q_p (v)`. Fails if `v` mentions a state outside `p`'s universe.
pub fn normalize<W: Weight>(p: &Partition, v: &BValue<W>) -> Result<NormalForm<W>, Error> {
    normalize_inner(p, v).map_err(|s| Error::NotInUniverse(s.name().to_string()))
}

/// [`normalize`] for values already known to lie over `p`'s universe.
///
/// # Panics
/// If a state of `v` is outside the universe.
pub fn normalize_unchecked<W: Weight>(p: &Partition, v: &BValue<W>) -> NormalForm<W> {
    match normalize_inner(p, v) {
        Ok(nf) => nf,
        Err(s) => panic!("state {s} outside the partition's universe"),
    }
}

fn normalize_inner<W: Weight>(p: &Partition, v: &BValue<W>) -> Result<NormalForm<W>, StateId> {
    Ok(match v {
        BValue::State(s) => NormalForm::Class(p.representative(s).ok_or_else(|| s.clone())?.clone()),
        BValue::Atom(a) => NormalForm::Atom(a.clone()),
        BValue::Pair(l, r) => NormalForm::Pair(Box::new(normalize_inner(p, l)?), Box::new(normalize_inner(p, r)?)),
        BValue::Inl(v) => NormalForm::Inl(Box::new(normalize_inner(p, v)?)),
        BValue::Inr(v) => NormalForm::Inr(Box::new(normalize_inner(p, v)?)),
        BValue::Table(entries) => NormalForm::Table(
            entries.iter().map(|(l, v)| Ok((l.clone(), normalize_inner(p, v)?))).collect::<Result<_, _>>()?,
        ),
        BValue::Set(items) => {
            let mut out = items.iter().map(|v| normalize_inner(p, v)).collect::<Result<Vec<_>, _>>()?;
            out.sort();
            out.dedup();
            NormalForm::Set(out)
        }
        BValue::Dist(entries) => {
            let mut out = entries
                .iter()
                .map(|(v, w)| Ok((normalize_inner(p, v)?, w.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            out.sort_by(|a, b| a.0.cmp(&b.0));
            let mut merged: Vec<(NormalForm<W>, W)> = Vec::with_capacity(out.len());
            for (k, w) in out {
                match merged.last_mut() {
                    Some((last, acc)) if *last == k => *acc = acc.clone() + w,
                    _ => merged.push((k, w)),
                }
            }
            NormalForm::Dist(merged)
        }
    })
}

//! State and symbol identifiers.
//!
//! Both carry the position at which they were declared; all canonical
//! orders (block representatives, set and distribution entries, witness
//! choice) follow declaration order rather than the spelling of the name.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Error;

const RESERVED: &[&str] = &[
    "functor", "set", "state", "boundary", "inl", "inr", "dist", "Id", "P", "Ds",
];

/// Returns true when `name` is usable as a state, atom, label or set name.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !RESERVED.contains(&name)
}

/// A state of a coalgebra.
#[derive(Clone)]
pub struct StateId {
    rank: u32,
    name: Arc<str>,
}

impl StateId {
    pub fn new(rank: u32, name: &str) -> Result<Self, Error> {
        if !is_identifier(name) {
            return Err(Error::InvalidIdentifier(name.to_string()));
        }
        Ok(StateId { rank, name: name.into() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Declaration position in the owning system.
    pub fn rank(&self) -> u32 {
        self.rank
    }
}

impl PartialEq for StateId {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.name == other.name
    }
}

impl Eq for StateId {}

impl Hash for StateId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.name.hash(state);
    }
}

impl PartialOrd for StateId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StateId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank.cmp(&other.rank).then_with(|| self.name.cmp(&other.name))
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A member of a declared finite set: an output atom or a transition label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    rank: u32,
    name: Arc<str>,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A named, finite, non-empty set of symbols such as `Act = {a, b}`.
#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet {
    name: String,
    members: Vec<Symbol>,
}

impl SymbolSet {
    pub fn new<S: AsRef<str>>(name: &str, members: &[S]) -> Result<Arc<Self>, Error> {
        if !is_identifier(name) {
            return Err(Error::InvalidIdentifier(name.to_string()));
        }
        if members.is_empty() {
            return Err(Error::EmptySet(name.to_string()));
        }
        let mut out: Vec<Symbol> = Vec::with_capacity(members.len());
        for (rank, m) in members.iter().enumerate() {
            let m = m.as_ref();
            if !is_identifier(m) {
                return Err(Error::InvalidIdentifier(m.to_string()));
            }
            if out.iter().any(|s| s.name() == m) {
                return Err(Error::DuplicateMember { set: name.to_string(), member: m.to_string() });
            }
            out.push(Symbol { rank: rank as u32, name: m.into() });
        }
        Ok(Arc::new(SymbolSet { name: name.to_string(), members: out }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[Symbol] {
        &self.members
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.members.iter().find(|s| s.name() == name)
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.members.get(symbol.rank as usize) == Some(symbol)
    }
}

/// An ordered finite set of states.
#[derive(Clone, Default)]
pub struct Universe {
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    by_name: HashMap<Arc<str>, usize>,
}

impl Universe {
    /// Builds a universe, sorting the states into declaration order.
    pub fn new(states: impl IntoIterator<Item = StateId>) -> Result<Arc<Self>, Error> {
        let mut states: Vec<StateId> = states.into_iter().collect();
        states.sort();
        let mut index = HashMap::with_capacity(states.len());
        let mut by_name = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if by_name.insert(s.name.clone(), i).is_some() {
                return Err(Error::DuplicateState(s.name().to_string()));
            }
            index.insert(s.clone(), i);
        }
        Ok(Arc::new(Universe { states, index, by_name }))
    }

    /// Convenience constructor ranking `names` in the given order.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, Error> {
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, n)| StateId::new(i as u32, n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ids)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateId {
        &self.states[i]
    }

    pub fn position(&self, s: &StateId) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &StateId) -> bool {
        self.index.contains_key(s)
    }

    pub fn lookup(&self, name: &str) -> Option<&StateId> {
        self.by_name.get(name).map(|&i| &self.states[i])
    }

    /// Sub-universe on `z`, keeping the parent's order.
    pub fn restrict<'a>(&self, z: impl IntoIterator<Item = &'a StateId>) -> Result<Arc<Self>, Error> {
        let mut picked = Vec::new();
        for s in z {
            if !self.contains(s) {
                return Err(Error::NotInUniverse(s.name().to_string()));
            }
            picked.push(s.clone());
        }
        picked.sort();
        picked.dedup();
        Universe::new(picked)
    }
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
    }
}

impl Eq for Universe {}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.states.iter()).finish()
    }
}

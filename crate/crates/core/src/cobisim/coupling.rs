//! Exact coupling feasibility as a transportation problem.
//!
//! A coupling of `µ` and `ν` avoiding a set of forbidden pairs exists iff the
//! bipartite network source → left (cap µ) → right (allowed pairs, unbounded)
//! → sink (cap ν) carries a flow saturating both sides. Flows are found with
//! shortest augmenting paths, so termination does not depend on the values.

use std::collections::VecDeque;

use crate::relation::Relation;
use crate::state::StateId;
use crate::weight::Weight;

#[derive(Clone, Debug)]
pub struct CouplingQuery<W> {
    pub mu_left: Vec<(StateId, W)>,
    pub mu_right: Vec<(StateId, W)>,
    /// Pairs the coupling may not charge.
    pub forbidden: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingAnswer<W> {
    /// A subdistribution on allowed pairs with the requested marginals.
    Exists(Vec<((StateId, StateId), W)>),
    None(NoCoupling<W>),
}

impl<W> CouplingAnswer<W> {
    pub fn exists(&self) -> bool {
        matches!(self, CouplingAnswer::Exists(_))
    }
}

/// Why no coupling exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoCoupling<W> {
    /// Marginals of one coupling always carry the same total mass.
    MassMismatch { left: W, right: W },
    /// `mass(left_set)` exceeds the mass of every right state it may reach.
    Hall { left_set: Vec<StateId>, left_mass: W, reachable: Vec<StateId>, reachable_mass: W },
}

fn total<W: Weight>(mu: &[(StateId, W)]) -> W {
    mu.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone())
}

/// Decides whether a coupling exists, returning one or a certificate.
pub fn coupling_exists<W: Weight>(q: &CouplingQuery<W>) -> CouplingAnswer<W> {
    let (lm, rm) = (total(&q.mu_left), total(&q.mu_right));
    if lm != rm {
        return CouplingAnswer::None(NoCoupling::MassMismatch { left: lm, right: rm });
    }
    let left: Vec<&(StateId, W)> = q.mu_left.iter().filter(|(_, w)| w.is_positive()).collect();
    let right: Vec<&(StateId, W)> = q.mu_right.iter().filter(|(_, w)| w.is_positive()).collect();
    let (nl, nr) = (left.len(), right.len());
    // nodes: 0 = source, 1..=nl left, nl+1..=nl+nr right, nl+nr+1 = sink
    let sink = nl + nr + 1;
    let mut net = Network::new(sink + 1);
    for (i, (_, w)) in left.iter().enumerate() {
        net.add_edge(0, 1 + i, w.clone());
    }
    for (j, (_, w)) in right.iter().enumerate() {
        net.add_edge(1 + nl + j, sink, w.clone());
    }
    let mut middle = Vec::new();
    for (i, (a, _)) in left.iter().enumerate() {
        for (j, (b, _)) in right.iter().enumerate() {
            if !q.forbidden.contains(a, b) {
                // left capacity bounds any flow through this edge
                let e = net.add_edge(1 + i, 1 + nl + j, lm.clone());
                middle.push((e, i, j));
            }
        }
    }
    let flow = net.max_flow(0, sink);
    if flow == lm {
        let coupling = middle
            .into_iter()
            .filter_map(|(e, i, j)| {
                let f = net.flow(e);
                f.is_positive().then(|| ((left[i].0.clone(), right[j].0.clone()), f))
            })
            .collect();
        return CouplingAnswer::Exists(coupling);
    }
    let reach = net.residual_reachable(0);
    let left_set: Vec<StateId> = (0..nl).filter(|&i| reach[1 + i]).map(|i| left[i].0.clone()).collect();
    let reachable: Vec<StateId> = (0..nr).filter(|&j| reach[1 + nl + j]).map(|j| right[j].0.clone()).collect();
    let left_mass = (0..nl).filter(|&i| reach[1 + i]).fold(W::zero(), |acc, i| acc + left[i].1.clone());
    let reachable_mass = (0..nr).filter(|&j| reach[1 + nl + j]).fold(W::zero(), |acc, j| acc + right[j].1.clone());
    CouplingAnswer::None(NoCoupling::Hall { left_set, left_mass, reachable, reachable_mass })
}

struct Edge<W> {
    to: usize,
    cap: W,
    flow: W,
}

struct Network<W> {
    edges: Vec<Edge<W>>,
    adj: Vec<Vec<usize>>,
}

impl<W: Weight> Network<W> {
    fn new(n: usize) -> Self {
        Network { edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: W) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: W::zero() });
        self.adj[from].push(id);
        self.edges.push(Edge { to: from, cap: W::zero(), flow: W::zero() });
        self.adj[to].push(id + 1);
        id
    }

    fn residual(&self, e: usize) -> W {
        self.edges[e].cap.clone() - self.edges[e].flow.clone()
    }

    fn flow(&self, e: usize) -> W {
        self.edges[e].flow.clone()
    }

    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut via: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if !seen[v] && self.residual(e).is_positive() {
                    seen[v] = true;
                    via[v] = Some(e);
                    queue.push_back(v);
                }
            }
        }
        via
    }

    fn max_flow(&mut self, s: usize, t: usize) -> W {
        let mut total = W::zero();
        loop {
            let via = self.bfs(s);
            if via[t].is_none() {
                return total;
            }
            let mut path = Vec::new();
            let mut v = t;
            while v != s {
                let e = via[v].unwrap();
                path.push(e);
                v = self.edges[e ^ 1].to;
            }
            let push = path.iter().map(|&e| self.residual(e)).min().unwrap();
            for &e in &path {
                self.edges[e].flow = self.edges[e].flow.clone() + push.clone();
                self.edges[e ^ 1].flow = self.edges[e ^ 1].flow.clone() - push.clone();
            }
            total = total + push;
        }
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let via = self.bfs(s);
        (0..self.adj.len()).map(|v| v == s || via[v].is_some()).collect()
    }
}

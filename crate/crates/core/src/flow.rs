//! Exact-rational maximum flow and transportation feasibility.
//!
//! Networks here are tiny (a handful of branches times a handful of pure
//! strategies), so plain Edmonds–Karp over `BigRational` capacities is
//! plenty and keeps every answer exact.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};

use crate::dist::{Dist, Q};
use crate::value::Value;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    /// `None` is an uncapacitated arc.
    cap: Option<Q>,
    flow: Q,
}

impl Edge {
    fn residual(&self) -> Option<Q> {
        self.cap.as_ref().map(|c| c - &self.flow)
    }
}

/// A directed graph with rational capacities.
#[derive(Clone, Debug, Default)]
pub struct MaxFlow {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl MaxFlow {
    pub fn new(nodes: usize) -> MaxFlow {
        MaxFlow {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds an arc and returns its id; `cap = None` means unbounded.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: Option<Q>) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: Q::zero() });
        self.edges.push(Edge {
            to: from,
            cap: Some(Q::zero()),
            flow: Q::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> &Q {
        &self.edges[edge].flow
    }

    fn has_residual(&self, e: usize) -> bool {
        match self.edges[e].residual() {
            None => true,
            Some(r) => r > Q::zero(),
        }
    }

    /// Runs Edmonds–Karp and returns the maximum flow value. Assumes every
    /// source-to-sink path has at least one finite capacity.
    pub fn run(&mut self, source: usize, sink: usize) -> Q {
        let mut total = Q::zero();
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if !seen[v] && self.has_residual(e) {
                        seen[v] = true;
                        prev[v] = Some(e);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut path = Vec::new();
            let mut v = sink;
            while let Some(e) = prev[v] {
                path.push(e);
                v = self.edges[e ^ 1].to;
            }
            let bottleneck = path
                .iter()
                .filter_map(|&e| self.edges[e].residual())
                .min()
                .expect("augmenting path without a finite capacity");
            for &e in &path {
                self.edges[e].flow += &bottleneck;
                self.edges[e ^ 1].flow -= &bottleneck;
            }
            total += bottleneck;
        }
    }
}

/// Supply/demand transportation problem: branch `i` ships `supplies[i]`
/// only to strategies in `admissible[i]`; strategy `σ` must receive
/// `demand(σ)`.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    pub sources: Vec<(Value, Q)>,
    pub admissible: Vec<BTreeSet<Value>>,
    pub sinks: Vec<(Value, Q)>,
}

/// Shipment plan: `(branch, strategy) -> amount`.
pub type TransportPlan = BTreeMap<(Value, Value), Q>;

impl FlowNetwork {
    /// Branches from `alpha` with the given admissible sets, demands from `psi`.
    pub fn new(alpha: &Dist<Value>, admissible: Vec<BTreeSet<Value>>, psi: &Dist<Value>) -> FlowNetwork {
        assert_eq!(alpha.support_len(), admissible.len());
        FlowNetwork {
            sources: alpha.iter().map(|(a, w)| (a.clone(), w.clone())).collect(),
            admissible,
            sinks: psi.iter().map(|(s, w)| (s.clone(), w.clone())).collect(),
        }
    }

    /// Maximum flow value together with a plan attaining it.
    pub fn solve(&self) -> (Q, TransportPlan) {
        let m = self.sources.len();
        let n = self.sinks.len();
        let source = m + n;
        let sink = source + 1;
        let mut g = MaxFlow::new(m + n + 2);
        for (i, (_, p)) in self.sources.iter().enumerate() {
            g.add_edge(source, i, Some(p.clone()));
        }
        let mut arcs = Vec::new();
        for (i, set) in self.admissible.iter().enumerate() {
            for (j, (s, _)) in self.sinks.iter().enumerate() {
                if set.contains(s) {
                    arcs.push((i, j, g.add_edge(i, m + j, None)));
                }
            }
        }
        for (j, (_, d)) in self.sinks.iter().enumerate() {
            g.add_edge(m + j, sink, Some(d.clone()));
        }
        let value = g.run(source, sink);
        let mut plan = TransportPlan::new();
        for (i, j, e) in arcs {
            let f = g.flow_on(e).clone();
            if !f.is_zero() {
                plan.insert((self.sources[i].0.clone(), self.sinks[j].0.clone()), f);
            }
        }
        (value, plan)
    }

    /// Feasible iff all unit mass can be shipped.
    pub fn feasible(&self) -> bool {
        self.solve().0.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::q;

    fn set(xs: &[&str]) -> BTreeSet<Value> {
        xs.iter().map(|x| Value::atom(x)).collect()
    }

    #[test]
    fn two_branch_split() {
        let alpha = Dist::uniform(Value::atoms(&["y1", "y2"]));
        let sets = vec![set(&["a"]), set(&["b"])];
        let psi = Dist::uniform(Value::atoms(&["a", "b"]));
        assert!(FlowNetwork::new(&alpha, sets.clone(), &psi).feasible());
        let pa = Dist::point(Value::atom("a"));
        assert!(!FlowNetwork::new(&alpha, sets, &pa).feasible());
    }

    #[test]
    fn plan_respects_marginals() {
        let alpha = Dist::new(vec![(Value::atom("x"), q(1, 3)), (Value::atom("y"), q(2, 3))]).unwrap();
        let sets = vec![set(&["a", "b"]), set(&["b", "c"])];
        let psi = Dist::new(vec![
            (Value::atom("a"), q(1, 6)),
            (Value::atom("b"), q(1, 2)),
            (Value::atom("c"), q(1, 3)),
        ])
        .unwrap();
        let (value, plan) = FlowNetwork::new(&alpha, sets, &psi).solve();
        assert_eq!(value, q(1, 1));
        let from_x: Q = plan.iter().filter(|((i, _), _)| *i == Value::atom("x")).map(|(_, f)| f.clone()).sum();
        assert_eq!(from_x, q(1, 3));
        let to_b: Q = plan.iter().filter(|((_, s), _)| *s == Value::atom("b")).map(|(_, f)| f.clone()).sum();
        assert_eq!(to_b, q(1, 2));
    }

    #[test]
    fn maxflow_on_layered_graph() {
        // s -> a (1/2), s -> b (1/2), a -> t (1/3), b -> t (1), a -> b (inf)
        let mut g = MaxFlow::new(4);
        g.add_edge(0, 1, Some(q(1, 2)));
        g.add_edge(0, 2, Some(q(1, 2)));
        g.add_edge(1, 3, Some(q(1, 3)));
        g.add_edge(2, 3, Some(q(1, 1)));
        g.add_edge(1, 2, None);
        assert_eq!(g.run(0, 3), q(1, 1));
    }
}

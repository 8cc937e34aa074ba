//! Min-cost flow by successive shortest paths.
//!
//! Supplies are real numbers (probability masses), so capacities and flows
//! are `f64`. Dijkstra runs on reduced costs with node potentials; costs must
//! be nonnegative, which makes the zero potential a valid start.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::tolerance::tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    /// `f64::INFINITY` for an uncapacitated arc.
    pub capacity: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize, cost: f64) -> Self {
        Edge {
            from,
            to,
            cost,
            capacity: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    /// Flow on each input edge, in input order.
    pub flow: Vec<f64>,
    pub cost: f64,
    /// Node potentials `pi` with `cost + pi[from] - pi[to] >= 0` on every
    /// residual arc; they certify optimality.
    pub potentials: Vec<f64>,
}

struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed for a min-heap; ties by node index keep runs deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Send `supplies[i]` out of every node with positive supply into the nodes
/// with negative supply at minimum total cost.
pub fn min_cost_flow(n: usize, supplies: &[f64], edges: &[Edge]) -> Result<Flow> {
    if supplies.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: supplies.len(),
        });
    }
    for e in edges {
        if e.from >= n || e.to >= n {
            return Err(Error::MalformedProgram(format!(
                "edge ({}, {}) leaves a graph of {n} nodes",
                e.from, e.to
            )));
        }
        if !(e.cost.is_finite() && e.cost >= 0.0) || e.capacity.is_nan() || e.capacity < 0.0 {
            return Err(Error::MalformedProgram(format!(
                "edge ({}, {}) has cost {} and capacity {}",
                e.from, e.to, e.cost, e.capacity
            )));
        }
    }
    if supplies.iter().any(|s| !s.is_finite()) {
        return Err(Error::MalformedProgram("non-finite supply".into()));
    }
    let total_out = compensated_sum(supplies.iter().map(|s| s.max(0.0)));
    let imbalance = compensated_sum(supplies.iter().copied());
    let scale = total_out.max(1.0);
    // Slack relative to the absolute supply on both sides.
    if imbalance.abs() > 2.0 * tolerances().mass * scale {
        return Err(Error::Unbalanced(imbalance));
    }
    // Residual graph with a super source `n` and super sink `n + 1`.
    let source = n;
    let sink = n + 1;
    let nodes = n + 2;
    let mut arcs: Vec<Arc> = Vec::with_capacity(2 * (edges.len() + n));
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |arcs: &mut Vec<Arc>, from: usize, to: usize, cap: f64, cost: f64| {
        adj[from].push(arcs.len());
        arcs.push(Arc { to, cap, cost });
        adj[to].push(arcs.len());
        arcs.push(Arc {
            to: from,
            cap: 0.0,
            cost: -cost,
        });
    };
    for e in edges {
        add(&mut arcs, e.from, e.to, e.capacity, e.cost);
    }
    let mut demand = 0.0;
    for (i, &s) in supplies.iter().enumerate() {
        if s > 0.0 {
            add(&mut arcs, source, i, s, 0.0);
        } else if s < 0.0 {
            add(&mut arcs, i, sink, -s, 0.0);
            demand += -s;
        }
    }
    // Ship the smaller side; the rounding surplus on the other side is
    // within the balance check above.
    let target = total_out.min(demand);
    let eps = f64::EPSILON * 16.0 * scale;

    let mut pi = vec![0.0_f64; nodes];
    let mut sent = 0.0;
    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev_arc = vec![usize::MAX; nodes];
    while target - sent > eps {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        prev_arc.iter_mut().for_each(|p| *p = usize::MAX);
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry(0.0, source));
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &a in &adj[v] {
                let arc = &arcs[a];
                if arc.cap <= eps {
                    continue;
                }
                // Reduced costs are nonnegative up to rounding.
                let rc = (arc.cost + pi[v] - pi[arc.to]).max(0.0);
                let nd = d + rc;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    prev_arc[arc.to] = a;
                    heap.push(Entry(nd, arc.to));
                }
            }
        }
        if !dist[sink].is_finite() {
            return Err(Error::Disconnected(target - sent));
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                pi[v] += dist[v];
            } else {
                pi[v] += dist[sink];
            }
        }
        let mut push = target - sent;
        let mut v = sink;
        while v != source {
            let a = prev_arc[v];
            push = push.min(arcs[a].cap);
            v = arcs[a ^ 1].to;
        }
        let mut v = sink;
        while v != source {
            let a = prev_arc[v];
            arcs[a].cap -= push;
            arcs[a ^ 1].cap += push;
            v = arcs[a ^ 1].to;
        }
        sent += push;
    }
    let flow: Vec<f64> = (0..edges.len()).map(|k| arcs[2 * k + 1].cap).collect();
    let cost = compensated_sum(flow.iter().zip(edges).map(|(f, e)| f * e.cost));
    Ok(Flow {
        flow,
        cost,
        potentials: pi[..n].to_vec(),
    })
}

/// Complete bipartite edge list from every `sources` node to every `sinks`
/// node with `cost(i, j)`.
pub fn bipartite_edges(
    sources: &[usize],
    sinks: &[usize],
    cost: impl Fn(usize, usize) -> f64,
) -> Vec<Edge> {
    let mut edges = Vec::with_capacity(sources.len() * sinks.len());
    for &i in sources {
        for &j in sinks {
            edges.push(Edge::new(i, j, cost(i, j)));
        }
    }
    edges
}

//! Seeded workload generators and in-memory reference implementations.
//!
//! Everything here works on raw edge lists with plain hash maps and a
//! binary heap — deliberately sharing no code with the table engine or the
//! relational search algorithms, so the two sides can check each other. The
//! generators are fully determined by their spec: the same spec always
//! yields the same edge list, which keeps every downstream comparison
//! reproducible.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{Cost, EdgeTuple, NodeId};

/// Largest node count `oracle_apsp` accepts before refusing.
pub const APSP_NODE_LIMIT: usize = 2048;

/// Shape of a generated graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// `n * avg_degree` uniformly sampled (source, target) pairs.
    Random,
    /// Preferential attachment: new nodes link to existing ones with
    /// probability proportional to current degree, producing a heavy-tailed
    /// degree distribution with a few hub nodes.
    Power,
}

/// Full recipe for a synthetic graph; equal specs give identical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GraphKind,
    pub n: u64,
    pub avg_degree: u64,
    /// Inclusive weight range; both ends finite and at least 1.
    pub weight_range: (u64, u64),
    pub seed: u64,
}

/// Generates a directed edge list: no self-loops, duplicate (source,
/// target) pairs collapsed to their minimum weight, sorted by (source,
/// target).
pub fn gen_graph(spec: &GenSpec) -> Result<Vec<EdgeTuple>> {
    let (lo, hi) = spec.weight_range;
    if spec.n < 2 || spec.avg_degree < 1 || lo < 1 || lo > hi || hi >= u64::MAX {
        return Err(Error::Schema(format!(
            "invalid graph spec: n={}, avg_degree={}, weights [{lo}, {hi}]",
            spec.n, spec.avg_degree
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    let add = |edges: &mut BTreeMap<(NodeId, NodeId), u64>, f: u64, t: u64, w: u64| {
        if f != t {
            edges
                .entry((f, t))
                .and_modify(|old| *old = (*old).min(w))
                .or_insert(w);
        }
    };

    match spec.kind {
        GraphKind::Random => {
            let m = spec.n * spec.avg_degree;
            for _ in 0..m {
                let f = rng.gen_range(0..spec.n);
                let t = rng.gen_range(0..spec.n);
                let w = rng.gen_range(lo..=hi);
                add(&mut edges, f, t, w);
            }
        }
        GraphKind::Power => {
            // Every edge endpoint is pushed onto `endpoints`, so sampling a
            // uniform element of it picks nodes proportionally to degree.
            let mut endpoints: Vec<NodeId> = vec![0, 1];
            let w = rng.gen_range(lo..=hi);
            add(&mut edges, 1, 0, w);
            for v in 2..spec.n {
                for _ in 0..spec.avg_degree {
                    let mut target = endpoints[rng.gen_range(0..endpoints.len())];
                    for _ in 0..8 {
                        if target != v {
                            break;
                        }
                        target = endpoints[rng.gen_range(0..endpoints.len())];
                    }
                    if target == v {
                        continue;
                    }
                    let w = rng.gen_range(lo..=hi);
                    // Random orientation keeps both directions populated
                    // while preserving the hub structure.
                    if rng.gen_bool(0.5) {
                        add(&mut edges, v, target, w);
                    } else {
                        add(&mut edges, target, v, w);
                    }
                    endpoints.push(v);
                    endpoints.push(target);
                }
            }
        }
    }

    Ok(edges
        .into_iter()
        .map(|((fid, tid), w)| EdgeTuple::new(fid, tid, w))
        .collect())
}

fn adjacency(edges: &[EdgeTuple]) -> HashMap<NodeId, Vec<(NodeId, u64)>> {
    let mut adj: HashMap<NodeId, Vec<(NodeId, u64)>> = HashMap::new();
    for e in edges {
        adj.entry(e.fid)
            .or_default()
            .push((e.tid, e.cost.raw()));
        adj.entry(e.tid).or_default();
    }
    adj
}

/// Distinct node ids appearing in the edge list, ascending.
pub fn node_ids(edges: &[EdgeTuple]) -> Vec<NodeId> {
    let mut set = BTreeSet::new();
    for e in edges {
        set.insert(e.fid);
        set.insert(e.tid);
    }
    set.into_iter().collect()
}

/// Textbook heap-based Dijkstra over the raw edge list. Returns the exact
/// distance and one witness path as a node sequence `[s, ..., t]`; an
/// unreachable target gives `(INF, [])` and `s == t` gives `(0, [])`.
pub fn oracle_dijkstra(
    edges: &[EdgeTuple],
    s: NodeId,
    t: NodeId,
) -> Result<(Cost, Vec<NodeId>)> {
    let adj = adjacency(edges);
    for node in [s, t] {
        if !adj.contains_key(&node) {
            return Err(Error::NodeNotFound(node));
        }
    }
    if s == t {
        return Ok((Cost::ZERO, Vec::new()));
    }

    let mut dist: HashMap<NodeId, u64> = HashMap::new();
    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(s, 0);
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[&u] {
            continue; // stale heap entry
        }
        if u == t {
            break;
        }
        for &(v, w) in adj.get(&u).into_iter().flatten() {
            let nd = d.saturating_add(w);
            if dist.get(&v).is_none_or(|&old| nd < old) {
                dist.insert(v, nd);
                parent.insert(v, u);
                heap.push(Reverse((nd, v)));
            }
        }
    }

    match dist.get(&t) {
        None => Ok((Cost::INF, Vec::new())),
        Some(&d) => {
            let mut path = vec![t];
            let mut cur = t;
            while cur != s {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            Ok((Cost::new(d), path))
        }
    }
}

/// All-pairs shortest distances up to `bound`, keyed by `(u, v)` with
/// `u != v`, computed by one bounded Dijkstra per node. Refuses graphs
/// above [`APSP_NODE_LIMIT`] nodes — this is a validation oracle, not an
/// algorithm.
pub fn oracle_apsp(
    edges: &[EdgeTuple],
    bound: Cost,
) -> Result<HashMap<(NodeId, NodeId), Cost>> {
    let adj = adjacency(edges);
    let n = adj.len();
    if n > APSP_NODE_LIMIT {
        return Err(Error::GraphTooLarge {
            n,
            limit: APSP_NODE_LIMIT,
        });
    }
    let cap = bound.raw();
    let mut out = HashMap::new();
    for &s in adj.keys() {
        let mut dist: HashMap<NodeId, u64> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(s, 0);
        heap.push(Reverse((0u64, s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[&u] {
                continue;
            }
            for &(v, w) in adj.get(&u).into_iter().flatten() {
                let nd = d.saturating_add(w);
                if nd <= cap && dist.get(&v).is_none_or(|&old| nd < old) {
                    dist.insert(v, nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        for (v, d) in dist {
            if v != s {
                out.insert((s, v), Cost::new(d));
            }
        }
    }
    Ok(out)
}

/// `count` uniformly sampled `(s, t)` pairs with `s != t`, deterministic in
/// `seed`. Graphs with fewer than two nodes yield no pairs.
pub fn sample_queries(
    edges: &[EdgeTuple],
    count: usize,
    seed: u64,
) -> Vec<(NodeId, NodeId)> {
    let nodes = node_ids(edges);
    if nodes.len() < 2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = nodes[rng.gen_range(0..nodes.len())];
            let mut t = nodes[rng.gen_range(0..nodes.len())];
            while t == s {
                t = nodes[rng.gen_range(0..nodes.len())];
            }
            (s, t)
        })
        .collect()
}

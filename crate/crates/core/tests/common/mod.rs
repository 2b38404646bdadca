#![allow(dead_code)]

use graphasm::gds::{DistributedSystem, Kind};
use graphasm::graph::{Label, LabeledGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(r: &mut impl Rng, n: usize, alphabet: &[&str], p: f64) -> LabeledGraph {
    let labels: Vec<&str> = (0..n).map(|_| *alphabet.choose(r).unwrap()).collect();
    let mut g = LabeledGraph::with_labels(labels);
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(p) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

/// All injective maps from `k` items into `0..n`.
pub fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                go(k, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(k, n, &mut Vec::new(), &mut out);
    out
}

/// Brute-force labeled isomorphism.
pub fn isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    injections(n, n).into_iter().any(|p| {
        (0..n).all(|v| a.label(v) == b.label(p[v]))
            && a.edges().all(|(x, y)| b.has_edge(p[x], p[y]))
    })
}

pub fn labels_of(g: &LabeledGraph) -> Vec<Label> {
    g.labels().to_vec()
}

/// Random system on at most `max_subs` subsystems, ids topologically ordered.
pub fn random_system(r: &mut impl Rng, max_subs: usize) -> DistributedSystem {
    let mut d = DistributedSystem::new();
    let nodes = r.gen_range(1..=4);
    d.add_nodes(nodes);
    let count = r.gen_range(0..=max_subs);
    for id in 0..count {
        let kind = match r.gen_range(0..3) {
            0 => Kind::Process,
            1 => Kind::Bond,
            _ => Kind::Event,
        };
        let label = ["a", "b"][r.gen_range(0..2)];
        let arity = r.gen_range(1..=2);
        let attach = (0..arity).map(|_| r.gen_range(0..nodes)).collect();
        let parents = (0..id).filter(|_| r.gen_bool(0.25)).collect();
        d.add_subsystem(kind, label, attach, parents).unwrap();
    }
    d
}

/// A small random perturbation of `d`: extends it with a few subsystems
/// hanging off random points, so pairs often agree on shallow truncations.
pub fn perturb(r: &mut impl Rng, d: &DistributedSystem, max_subs: usize) -> DistributedSystem {
    let mut e = d.clone();
    if e.node_count() == 0 {
        e.add_node();
    }
    let extra = r.gen_range(0..=3).min(max_subs.saturating_sub(e.len()));
    for _ in 0..extra {
        let id = e.len();
        let parents = if id == 0 { vec![] } else { vec![r.gen_range(0..id)] };
        let n = r.gen_range(0..e.node_count());
        let label = ["a", "b"][r.gen_range(0..2)];
        e.add_subsystem(Kind::Process, label, vec![n], parents).unwrap();
    }
    e
}

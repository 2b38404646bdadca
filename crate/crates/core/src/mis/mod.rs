//! Synchronous round algorithms, the ALPHA synchronizer, a deterministic
//! coin-flipping MIS, growth bounds and surface cost.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::sim::{NetworkGraph, ProcessorSpec, ProcessorSystem, SimError};

mod alpha;
mod compose;
mod cost;

pub use alpha::{alpha_audit, alpha_wrap, AlphaAudit, AlphaOptions};
pub use compose::{compose_then_measure, then, ComposeReport};
pub use cost::{convex_volume6, rectangular_surface_cost, SurfaceCostReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MisError {
    #[error("id {0} is used twice")]
    DuplicateIds(u64),
    #[error("{found} ids for {expected} vertices")]
    IdCount { expected: usize, found: usize },
    #[error("neighbourhood of {v} at radius {r} has {size} vertices")]
    NeighborhoodTooLarge { v: usize, r: usize, size: usize },
    #[error("no placements to measure")]
    EmptyAssembly,
    #[error("run with seed {0} did not finish within its budget")]
    Unfinished(u64),
    #[error("seed {0} gave a different assembly box")]
    SeedDependent(u64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A synchronous algorithm: in every round each node broadcasts one message
/// computed from its state, then moves on using everything it received.
pub trait RoundAlgorithm {
    type State: Clone + PartialEq + fmt::Debug;

    fn rounds(&self) -> usize;
    fn init(&self, v: usize) -> Self::State;
    /// Message broadcast in `round`. Must not contain whitespace, `,` or `:`.
    fn message(&self, v: usize, round: usize, s: &Self::State) -> String;
    fn step(&self, v: usize, round: usize, s: &Self::State, inbox: &BTreeMap<usize, String>) -> Self::State;
    fn output(&self, v: usize, s: &Self::State) -> String;
}

/// States of every node before each round and after the last:
/// `out[i][v]` is `v`'s state entering round `i`.
pub fn run_synchronous<A: RoundAlgorithm>(alg: &A, g: &NetworkGraph) -> Vec<Vec<A::State>> {
    let n = g.n;
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut states: Vec<A::State> = (0..n).map(|v| alg.init(v)).collect();
    let mut out = vec![states.clone()];
    for round in 0..alg.rounds() {
        let msgs: Vec<String> = (0..n).map(|v| alg.message(v, round, &states[v])).collect();
        states = (0..n)
            .map(|v| {
                let inbox = nbrs[v].iter().map(|&u| (u, msgs[u].clone())).collect();
                alg.step(v, round, &states[v], &inbox)
            })
            .collect();
        out.push(states.clone());
    }
    out
}

fn check_ids(n: usize, ids: &[u64]) -> Result<(), MisError> {
    if ids.len() != n {
        return Err(MisError::IdCount {
            expected: n,
            found: ids.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for &id in ids {
        if !seen.insert(id) {
            return Err(MisError::DuplicateIds(id));
        }
    }
    Ok(())
}

/// Bits needed for the largest id (at least one).
pub fn id_bits(ids: &[u64]) -> u32 {
    ids.iter().map(|&i| 64 - i.leading_zeros()).max().unwrap_or(0).max(1)
}

/// Colour-reduction rounds that take `bits`-bit colours below six.
pub fn reduction_rounds(bits: u32) -> usize {
    let mut bound: u64 = 1 << bits;
    let mut t = 0;
    while bound > 6 {
        let l = 64 - (bound - 1).leading_zeros() as u64;
        bound = 2 * l.max(1);
        t += 1;
    }
    t
}

/// Deterministic coin-flipping MIS.
///
/// The graph is split into forests: forest `k` links each node to its
/// `k`-th higher-id neighbour. Each forest is three-coloured by bit-difference
/// colour reduction followed by three shift-down rounds. The colour tuple
/// properly colours the graph, and the colour classes then join the set one
/// class per round.
#[derive(Clone, Debug)]
pub struct Mis {
    ids: Vec<u64>,
    /// `parents[v][k]`: `v`'s parent in forest `k`.
    parents: Vec<Vec<Option<usize>>>,
    forests: usize,
    reduction: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisState {
    pub colour: Vec<u64>,
    /// Colours before the latest shift-down, which the children now carry.
    pub previous: Vec<u64>,
    pub in_set: bool,
}

impl Mis {
    pub fn new(g: &NetworkGraph, ids: &[u64]) -> Result<Self, MisError> {
        check_ids(g.n, ids)?;
        let nbrs: Vec<Vec<usize>> = (0..g.n).map(|v| g.neighbors(v)).collect();
        let higher: Vec<Vec<usize>> = (0..g.n)
            .map(|v| {
                let mut h: Vec<usize> = nbrs[v].iter().copied().filter(|&u| ids[u] > ids[v]).collect();
                h.sort_by_key(|&u| ids[u]);
                h
            })
            .collect();
        let forests = higher.iter().map(Vec::len).max().unwrap_or(0);
        let parents = higher
            .iter()
            .map(|h| (0..forests).map(|k| h.get(k).copied()).collect())
            .collect();
        Ok(Mis {
            ids: ids.to_vec(),
            parents,
            forests,
            reduction: reduction_rounds(id_bits(ids)),
        })
    }

    pub fn forests(&self) -> usize {
        self.forests
    }

    fn sweep_start(&self) -> usize {
        self.reduction + 6
    }

    fn combined(&self, s: &MisState) -> usize {
        s.colour.iter().rev().fold(0, |acc, &c| acc * 3 + c as usize)
    }
}

fn parse_colours(m: &str) -> Vec<u64> {
    m.split('-').filter(|x| !x.is_empty()).map(|x| x.parse().expect("colour")).collect()
}

fn smallest_free(avoid: &[u64]) -> u64 {
    (0..3).find(|c| !avoid.contains(c)).expect("three colours, two constraints")
}

impl RoundAlgorithm for Mis {
    type State = MisState;

    fn rounds(&self) -> usize {
        self.sweep_start() + 3usize.pow(self.forests as u32)
    }

    fn init(&self, v: usize) -> MisState {
        MisState {
            colour: vec![self.ids[v]; self.forests],
            previous: vec![self.ids[v]; self.forests],
            in_set: false,
        }
    }

    fn message(&self, _v: usize, round: usize, s: &MisState) -> String {
        if round < self.sweep_start() {
            let c: Vec<String> = s.colour.iter().map(u64::to_string).collect();
            format!("c{}", c.join("-"))
        } else {
            format!("f{}", u8::from(s.in_set))
        }
    }

    fn step(&self, v: usize, round: usize, s: &MisState, inbox: &BTreeMap<usize, String>) -> MisState {
        let mut next = s.clone();
        if round >= self.sweep_start() {
            let turn = round - self.sweep_start();
            let taken = inbox.values().any(|m| m == "f1");
            if self.combined(s) == turn && !taken && !s.in_set {
                next.in_set = true;
            }
            return next;
        }
        let parent_colour = |k: usize| {
            self.parents[v][k].map(|p| parse_colours(inbox[&p].strip_prefix('c').expect("colour message"))[k])
        };
        for k in 0..self.forests {
            let c = s.colour[k];
            if round < self.reduction {
                let i = match parent_colour(k) {
                    Some(pc) => (c ^ pc).trailing_zeros() as u64,
                    None => 0,
                };
                next.colour[k] = 2 * i + ((c >> i) & 1);
            } else if (round - self.reduction) % 2 == 0 {
                next.previous[k] = c;
                next.colour[k] = match parent_colour(k) {
                    Some(pc) => pc,
                    None => smallest_free(&[c]),
                };
            } else {
                let x = 5 - (round - self.reduction) as u64 / 2;
                if c == x {
                    let mut avoid = vec![s.previous[k]];
                    avoid.extend(parent_colour(k));
                    next.colour[k] = smallest_free(&avoid);
                }
            }
        }
        next
    }

    fn output(&self, _v: usize, s: &MisState) -> String {
        if s.in_set { "in" } else { "out" }.to_string()
    }
}

/// Every node learns the largest id within `rounds` hops.
#[derive(Clone, Debug)]
pub struct MaxFlood {
    pub ids: Vec<u64>,
    pub rounds: usize,
}

impl RoundAlgorithm for MaxFlood {
    type State = u64;

    fn rounds(&self) -> usize {
        self.rounds
    }

    fn init(&self, v: usize) -> u64 {
        self.ids[v]
    }

    fn message(&self, _v: usize, _round: usize, s: &u64) -> String {
        s.to_string()
    }

    fn step(&self, _v: usize, _round: usize, s: &u64, inbox: &BTreeMap<usize, String>) -> u64 {
        inbox
            .values()
            .filter_map(|m| m.parse::<u64>().ok())
            .fold(*s, u64::max)
    }

    fn output(&self, _v: usize, s: &u64) -> String {
        s.to_string()
    }
}

/// Processors on `g` that start halted.
pub fn idle_system(g: &NetworkGraph) -> ProcessorSystem {
    let procs = (0..g.n)
        .map(|v| ProcessorSpec {
            name: format!("v{v}"),
            states: vec!["halt".into()],
            start: 0,
            halting: BTreeSet::from([0]),
            table: BTreeMap::new(),
        })
        .collect();
    ProcessorSystem::new(procs, Vec::new(), g.clone(), vec![None; g.n]).expect("no transitions to validate")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisResult {
    pub set: BTreeSet<usize>,
    pub rounds: usize,
}

impl MisResult {
    pub fn is_independent(&self, g: &NetworkGraph) -> bool {
        g.edges.iter().all(|&(a, b)| !(self.set.contains(&a) && self.set.contains(&b)))
    }

    pub fn is_maximal(&self, g: &NetworkGraph) -> bool {
        (0..g.n).all(|v| self.set.contains(&v) || g.neighbors(v).iter().any(|u| self.set.contains(u)))
    }

    pub fn render(&self, g: &NetworkGraph) -> String {
        format!(
            "mis size={} rounds={} independent={} maximal={}\n",
            self.set.len(),
            self.rounds,
            self.is_independent(g),
            self.is_maximal(g)
        )
    }
}

/// Runs the MIS algorithm synchronously on the undirected view of `g`.
pub fn mis_run(g: &NetworkGraph, ids: &[u64]) -> Result<MisResult, MisError> {
    let alg = Mis::new(g, ids)?;
    let states = run_synchronous(&alg, g);
    let last = states.last().expect("initial states");
    Ok(MisResult {
        set: (0..g.n).filter(|&v| last[v].in_set).collect(),
        rounds: alg.rounds(),
    })
}

/// Vertices within distance `r` of `v` in the undirected view.
pub fn ball(g: &NetworkGraph, v: usize, r: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n];
    dist[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(u) = q.pop_front() {
        if dist[u] == r {
            continue;
        }
        for w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    (0..g.n).filter(|&u| dist[u] != usize::MAX).collect()
}

/// Size of a maximum independent set of the subgraph induced by `vs`.
fn max_independent(g: &NetworkGraph, vs: &[usize]) -> usize {
    let idx: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<u64> = vs
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|u| idx.get(u))
                .fold(0u64, |m, &i| m | 1 << i)
        })
        .collect();
    fn go(adj: &[u64], cand: u64) -> usize {
        if cand == 0 {
            return 0;
        }
        let v = cand.trailing_zeros() as usize;
        let rest = cand & !(1 << v);
        // a vertex with no candidate neighbours is always taken
        if adj[v] & rest == 0 {
            return 1 + go(adj, rest);
        }
        (1 + go(adj, rest & !adj[v])).max(go(adj, rest))
    }
    go(&adj, if vs.len() == 64 { u64::MAX } else { (1u64 << vs.len()) - 1 })
}

/// Largest neighbourhood searched exactly.
pub const MAX_NEIGHBOURHOOD: usize = 48;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthEntry {
    pub v: usize,
    pub r: usize,
    pub measured: Result<usize, MisError>,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthBoundReport {
    pub entries: Vec<GrowthEntry>,
    pub verdict: bool,
}

impl GrowthBoundReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            match &e.measured {
                Ok(k) => writeln!(s, "growthbound v={} r={} measured={k} bound={}", e.v, e.r, e.bound),
                Err(err) => writeln!(s, "growthbound v={} r={} error=\"{err}\" bound={}", e.v, e.r, e.bound),
            }
            .unwrap();
        }
        s
    }
}

/// `f(r) = f[0] + f[1] r + f[2] r^2 + ...`
pub fn eval_poly(f: &[u64], r: usize) -> u64 {
    f.iter().rev().fold(0, |acc, &c| acc * r as u64 + c)
}

/// Compares the maximum independent set in every `N^r(v)`, `r <= r_max`,
/// against `f(r)`.
pub fn is_growth_bounded(h: &NetworkGraph, f: &[u64], r_max: usize) -> GrowthBoundReport {
    let mut entries = Vec::new();
    for v in 0..h.n {
        for r in 0..=r_max {
            let b = ball(h, v, r);
            let measured = if b.len() > MAX_NEIGHBOURHOOD {
                Err(MisError::NeighborhoodTooLarge { v, r, size: b.len() })
            } else {
                Ok(max_independent(h, &b))
            };
            entries.push(GrowthEntry {
                v,
                r,
                measured,
                bound: eval_poly(f, r),
            });
        }
    }
    let verdict = entries
        .iter()
        .all(|e| matches!(e.measured, Ok(k) if k as u64 <= e.bound));
    GrowthBoundReport { entries, verdict }
}

/// Undirected `rows x cols` grid, vertices numbered row-major.
pub fn grid(rows: usize, cols: usize) -> NetworkGraph {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    NetworkGraph::undirected(rows * cols, &e).expect("grid edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_rounds_by_width() {
        assert_eq!(reduction_rounds(5), 3);
        assert_eq!(reduction_rounds(4), 2);
        assert_eq!(reduction_rounds(2), 0);
    }

    #[test]
    fn poly() {
        assert_eq!(eval_poly(&[2, 4, 2], 3), 2 + 12 + 18);
    }
}

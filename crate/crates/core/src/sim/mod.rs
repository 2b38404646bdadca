//! Asynchronous message-passing processor systems, their reference
//! semantics, and compilations into self-assembly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng as _;
use thiserror::Error;

use crate::rng;

mod blockage;
mod check;
mod lattice;
mod planar;
mod space;
mod text;
mod topo;

pub use blockage::{adversarial_blockage_search, BlockageKind, BlockageOutcome, BlockageWitness};
pub use check::{simulation_check, ClauseResult, SimReport, Status};
pub use lattice::{convex_hull_2d, decode_lattice, hulls_disjoint, Lattice, Owner, Placement, Point};
pub use planar::compile_planar;
pub use space::{compile_3d, compile_3d_with_ports};
pub use text::{parse_procsys, ProcsysParseError};
pub use topo::compile_topological;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("network is not in class C: vertex {vertex} has total degree {degree}")]
    NotInClassC { vertex: String, degree: usize },
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("unknown processor `{0}`")]
    UnknownProcessor(String),
    #[error("duplicate processor `{0}`")]
    DuplicateProcessor(String),
    #[error("unknown state `{state}` in processor `{proc}`")]
    UnknownState { proc: String, state: String },
    #[error("`{from}` sends to `{to}` but the network has no such edge")]
    MissingEdge { from: String, to: String },
    #[error("a transition of `{0}` sends twice on one channel")]
    DoubleSend(String),
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("inbuffer bound {bound} below in-degree {indegree}")]
    PortBound { bound: usize, indegree: usize },
    #[error("search budget of {0} states exhausted")]
    BudgetExhausted(usize),
}

/// Where a step's received message came from; `None` is a spontaneous step.
pub type Recv = Option<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    /// `(peer, message)` pairs, at most one per peer.
    pub sends: Vec<(usize, usize)>,
}

/// A processor as a finite transition table.
///
/// A missing `(s, Some(m))` entry consumes the message and stays in `s`;
/// a missing `(s, None)` entry means no spontaneous step from `s`.
/// Halting states have no steps at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessorSpec {
    pub name: String,
    pub states: Vec<String>,
    pub start: usize,
    pub halting: BTreeSet<usize>,
    pub table: BTreeMap<(usize, Recv), Transition>,
}

impl ProcessorSpec {
    pub fn state_index(&self, s: &str) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    pub fn transition(&self, state: usize, recv: Recv) -> Option<Transition> {
        if self.halting.contains(&state) {
            return None;
        }
        match (self.table.get(&(state, recv)), recv) {
            (Some(t), _) => Some(t.clone()),
            (None, Some(_)) => Some(Transition {
                next: state,
                sends: Vec::new(),
            }),
            (None, None) => None,
        }
    }
}

/// Directed network over processor indices; `(i, j)` means `i` may send to `j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NetworkGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl NetworkGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SimError> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(SimError::UnknownProcessor(a.max(b).to_string()));
            }
            if a == b {
                return Err(SimError::SelfLoop(a.to_string()));
            }
        }
        Ok(NetworkGraph { n, edges })
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    /// Channels in a fixed order; a channel's index is its position here.
    pub fn channels(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().collect()
    }

    pub fn channel_index(&self, from: usize, to: usize) -> Option<usize> {
        self.edges.iter().position(|&e| e == (from, to))
    }

    /// Neighbors in the undirected view, sorted.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        s.into_iter().collect()
    }

    /// Symmetric closure of an undirected edge list.
    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self, SimError> {
        Self::new(n, edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]))
    }
}

/// True iff every vertex has indegree + outdegree at most 2.
pub fn in_class_c(h: &NetworkGraph) -> bool {
    class_c_violation(h).is_none()
}

fn class_c_violation(h: &NetworkGraph) -> Option<(usize, usize)> {
    (0..h.n)
        .map(|v| (v, h.indegree(v) + h.outdegree(v)))
        .find(|&(_, d)| d > 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessorSystem {
    pub procs: Vec<ProcessorSpec>,
    pub messages: Vec<String>,
    pub network: NetworkGraph,
    pub inputs: Vec<Option<String>>,
}

impl ProcessorSystem {
    pub fn new(
        procs: Vec<ProcessorSpec>,
        messages: Vec<String>,
        network: NetworkGraph,
        inputs: Vec<Option<String>>,
    ) -> Result<Self, SimError> {
        if network.n != procs.len() {
            return Err(SimError::Degenerate("network size differs from processor count".into()));
        }
        let mut names = BTreeSet::new();
        for (i, p) in procs.iter().enumerate() {
            if !names.insert(&p.name) {
                return Err(SimError::DuplicateProcessor(p.name.clone()));
            }
            for t in p.table.values() {
                let mut peers = BTreeSet::new();
                for &(peer, _) in &t.sends {
                    if !network.edges.contains(&(i, peer)) {
                        return Err(SimError::MissingEdge {
                            from: p.name.clone(),
                            to: procs.get(peer).map_or(peer.to_string(), |q| q.name.clone()),
                        });
                    }
                    if !peers.insert(peer) {
                        return Err(SimError::DoubleSend(p.name.clone()));
                    }
                }
            }
        }
        let mut inputs = inputs;
        inputs.resize(procs.len(), None);
        Ok(ProcessorSystem {
            procs,
            messages,
            network,
            inputs,
        })
    }

    pub fn n(&self) -> usize {
        self.procs.len()
    }

    pub fn proc_index(&self, name: &str) -> Option<usize> {
        self.procs.iter().position(|p| p.name == name)
    }

    pub fn initial(&self) -> Config {
        Config {
            states: self.procs.iter().map(|p| p.start).collect(),
            queues: vec![Vec::new(); self.network.edges.len()],
        }
    }

    pub fn is_halted(&self, c: &Config, p: usize) -> bool {
        self.procs[p].halting.contains(&c.states[p])
    }

    /// Every step the reference semantics allows from `c`.
    pub fn enabled(&self, c: &Config) -> Vec<Step> {
        let chans = self.network.channels();
        let mut out = Vec::new();
        for p in 0..self.n() {
            if self.procs[p].transition(c.states[p], None).is_some() {
                out.push(Step::Spontaneous(p));
            }
            for (ci, &(_, to)) in chans.iter().enumerate() {
                if to == p && !c.queues[ci].is_empty() && !self.is_halted(c, p) {
                    out.push(Step::Receive(ci));
                }
            }
        }
        out
    }

    /// Applies `step`, returning the successor and the events it emits.
    pub fn apply(&self, c: &Config, step: Step) -> (Config, Vec<Event>) {
        let chans = self.network.channels();
        let mut next = c.clone();
        let mut events = Vec::new();
        let (p, recv) = match step {
            Step::Spontaneous(p) => (p, None),
            Step::Receive(ci) => {
                let (from, to) = chans[ci];
                let m = next.queues[ci].remove(0);
                events.push(Event::Deliver { from, to, msg: m });
                (to, Some(m))
            }
        };
        let t = self.procs[p]
            .transition(c.states[p], recv)
            .expect("apply called on an enabled step");
        events.push(Event::Compute {
            proc: p,
            from: c.states[p],
            to: t.next,
        });
        next.states[p] = t.next;
        for &(peer, m) in &t.sends {
            let ci = self.network.channel_index(p, peer).expect("validated edge");
            next.queues[ci].push(m);
            events.push(Event::Send {
                from: p,
                to: peer,
                msg: m,
            });
        }
        (next, events)
    }

    pub fn successors(&self, c: &Config) -> Vec<Config> {
        self.enabled(c).into_iter().map(|s| self.apply(c, s).0).collect()
    }

    pub fn is_legal_step(&self, from: &Config, to: &Config) -> bool {
        self.successors(from).iter().any(|s| s == to)
    }

    pub fn all_halted(&self, c: &Config) -> bool {
        (0..self.n()).all(|p| self.is_halted(c, p))
    }

    pub fn render_config(&self, c: &Config) -> String {
        let mut s = String::new();
        for (p, &st) in c.states.iter().enumerate() {
            if p > 0 {
                s.push(' ');
            }
            s.push_str(&format!("{}={}", self.procs[p].name, self.procs[p].states[st]));
        }
        for (ci, (a, b)) in self.network.channels().into_iter().enumerate() {
            if !c.queues[ci].is_empty() {
                let q: Vec<&str> = c.queues[ci].iter().map(|&m| self.messages[m].as_str()).collect();
                s.push_str(&format!(" {}>{}:[{}]", self.procs[a].name, self.procs[b].name, q.join(",")));
            }
        }
        s
    }
}

/// Processor states plus the FIFO contents of every channel.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub states: Vec<usize>,
    pub queues: Vec<Vec<usize>>,
}

impl Config {
    pub fn in_flight(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Spontaneous(usize),
    /// Receive the front of the channel with this index.
    Receive(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Compute { proc: usize, from: usize, to: usize },
    Send { from: usize, to: usize, msg: usize },
    Deliver { from: usize, to: usize, msg: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<Event>,
    pub steps: usize,
    pub final_config: Config,
    /// No step was enabled at the end.
    pub quiescent: bool,
}

impl Trace {
    pub fn render(&self, m: &ProcessorSystem) -> String {
        let name = |p: usize| m.procs[p].name.as_str();
        let mut s = String::new();
        for (i, e) in self.events.iter().enumerate() {
            let line = match *e {
                Event::Compute { proc, from, to } => format!(
                    "event={i} kind=compute proc={} from={} to={}",
                    name(proc),
                    m.procs[proc].states[from],
                    m.procs[proc].states[to]
                ),
                Event::Send { from, to, msg } => {
                    format!("event={i} kind=send from={} to={} msg={}", name(from), name(to), m.messages[msg])
                }
                Event::Deliver { from, to, msg } => format!(
                    "event={i} kind=deliver from={} to={} msg={}",
                    name(from),
                    name(to),
                    m.messages[msg]
                ),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }
}

/// Uniformly random interleaving of enabled steps, at most `max_steps` of them.
pub fn direct_execute(m: &ProcessorSystem, seed: u64, max_steps: usize) -> Trace {
    let mut r = rng::derive(seed, 0x51a);
    let mut c = m.initial();
    let mut events = Vec::new();
    let mut steps = 0;
    loop {
        let en = m.enabled(&c);
        if en.is_empty() {
            return Trace {
                events,
                steps,
                final_config: c,
                quiescent: true,
            };
        }
        if steps >= max_steps {
            return Trace {
                events,
                steps,
                final_config: c,
                quiescent: false,
            };
        }
        let (next, ev) = m.apply(&c, en[r.gen_range(0..en.len())]);
        events.extend(ev);
        c = next;
        steps += 1;
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("event {0}: delivery does not match the channel front")]
    NotFifo(usize),
    #[error("event {0}: no such transition")]
    BadCompute(usize),
    #[error("event {0}: sends differ from the transition")]
    BadSends(usize),
    #[error("event {0}: delivery without a compute step")]
    Dangling(usize),
}

/// Replays `events` against the reference semantics from the initial
/// configuration and returns the configuration reached.
pub fn replay(m: &ProcessorSystem, events: &[Event]) -> Result<Config, TraceError> {
    let mut c = m.initial();
    let mut i = 0;
    while i < events.len() {
        let mut recv = None;
        let start = i;
        if let Event::Deliver { from, to, msg } = events[i] {
            let ci = m.network.channel_index(from, to).ok_or(TraceError::NotFifo(i))?;
            if c.queues[ci].first() != Some(&msg) {
                return Err(TraceError::NotFifo(i));
            }
            recv = Some((to, ci));
            i += 1;
        }
        let Some(&Event::Compute { proc, from, to }) = events.get(i) else {
            return Err(TraceError::Dangling(start));
        };
        let step = match recv {
            Some((p, ci)) if p == proc => Step::Receive(ci),
            Some(_) => return Err(TraceError::BadCompute(i)),
            None => Step::Spontaneous(proc),
        };
        if c.states[proc] != from || !m.enabled(&c).contains(&step) {
            return Err(TraceError::BadCompute(i));
        }
        let (next, expected) = m.apply(&c, step);
        let got = &events[start..(start + expected.len()).min(events.len())];
        if got != expected.as_slice() {
            return Err(TraceError::BadSends(i));
        }
        if next.states[proc] != to {
            return Err(TraceError::BadCompute(i));
        }
        i = start + expected.len();
        c = next;
    }
    Ok(c)
}

/// Target of a compilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Topological,
    Plane,
    Space,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Topological => "topo",
            Target::Plane => "z2",
            Target::Space => "z3",
        })
    }
}

/// Raw agent configuration observed during a compiled run.
#[derive(Clone, Debug)]
pub enum Snapshot<'a> {
    Graph(&'a crate::graph::LabeledGraph),
    Lattice(&'a Lattice),
}

/// Maps a raw agent configuration back to a configuration of the system.
pub type Decoder = fn(&ProcessorSystem, &Snapshot<'_>) -> Option<Config>;

/// Metadata the geometric compilers expose.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layout {
    /// Slot of each processor along the axis.
    pub order: Vec<usize>,
    /// Plane (z) of each channel's highway, for the space target.
    pub highway_planes: Vec<i64>,
    /// Plane (z) of each processor's wedge, for the space target.
    pub wedge_planes: Vec<i64>,
    /// Ports on each inbuffer agent, for the space target.
    pub inbuffer_arity: usize,
    /// Number of agent types used for messages.
    pub message_agent_types: usize,
}

/// A compiled system ready to be run under a seeded scheduler.
#[derive(Clone)]
pub struct CompiledSimulation {
    pub target: Target,
    pub system: ProcessorSystem,
    pub layout: Layout,
    /// Graph assembly system for the topological target.
    pub gas: Option<crate::graph::GraphAssemblySystem>,
    pub decode: Decoder,
    pub(crate) geometry: Geometry,
}

#[derive(Clone, Debug)]
pub(crate) enum Geometry {
    None,
    Plane(planar::PlaneGeometry),
    Space(space::SpaceGeometry),
}

impl fmt::Debug for CompiledSimulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompiledSimulation")
            .field("target", &self.target)
            .field("layout", &self.layout)
            .finish_non_exhaustive()
    }
}

/// One decoded observation during a compiled run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    /// Configuration the engine tracked.
    pub truth: Config,
    /// Configuration read back by the decoder.
    pub decoded: Option<Config>,
}

/// Outcome of one seeded run of a compiled simulation.
#[derive(Clone, Debug)]
pub struct CompiledRun {
    pub observations: Vec<Observation>,
    /// Steps of the simulated system, in order.
    pub trace: Vec<Event>,
    pub final_config: Config,
    /// Lattice placements for geometric targets.
    pub lattice: Option<Lattice>,
    /// Final agent graph for the topological target.
    pub graph: Option<crate::graph::LabeledGraph>,
    /// No engine event was enabled at the end.
    pub terminal: bool,
    pub engine_events: usize,
    pub sent: usize,
    pub delivered: usize,
    /// Set if the engine refused a placement (two agents at one point).
    pub conflict: Option<String>,
}

impl CompiledSimulation {
    /// Runs the compiled system for at most `budget` engine events.
    pub fn run(&self, seed: u64, budget: usize) -> CompiledRun {
        self.run_with(seed, budget, true)
    }

    /// Like [`run`](Self::run) but decodes only the initial and final
    /// placements.
    pub fn run_unobserved(&self, seed: u64, budget: usize) -> CompiledRun {
        self.run_with(seed, budget, false)
    }

    fn run_with(&self, seed: u64, budget: usize, observe: bool) -> CompiledRun {
        match self.target {
            Target::Topological => topo::run(self, seed, budget, observe),
            Target::Plane => planar::run(self, seed, budget, observe),
            Target::Space => space::run(self, seed, budget, observe),
        }
    }
}

pub(crate) fn count_messages(trace: &[Event]) -> (usize, usize) {
    trace.iter().fold((0, 0), |(s, d), e| match e {
        Event::Send { .. } => (s + 1, d),
        Event::Deliver { .. } => (s, d + 1),
        Event::Compute { .. } => (s, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_c_on_small_graphs() {
        let ring = NetworkGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(in_class_c(&ring));
        let star = NetworkGraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!in_class_c(&star));
        assert_eq!(
            NetworkGraph::new(2, [(1, 1)]).unwrap_err(),
            SimError::SelfLoop("1".into())
        );
    }
}

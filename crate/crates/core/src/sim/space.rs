//! Space compilation for arbitrary networks.
//!
//! Processor `i` grows its wedge in the plane `z = 2i`, one row per
//! simulated step, anchored at `x <= 0`. Channel `c` gets the plane
//! `z = 2n + 1 + c` to itself; its `k`-th message sits at `(1 + k, y)`
//! where `y` is the sender's row, bonded to both wedges by long bonds.
//! The east cell of each row is the inbuffer agent; it serves the incoming
//! channels round-robin.

use rand::Rng as _;

use crate::rng;

use super::lattice::{decode_lattice, Lattice, Owner};
use super::{
    count_messages, CompiledRun, CompiledSimulation, Config, Event, Geometry, Layout, Observation,
    ProcessorSystem, SimError, Snapshot, Step, Target,
};

const BASE: i64 = 2;

#[derive(Clone, Debug)]
pub(crate) struct SpaceGeometry {
    wedge_plane: Vec<i64>,
    highway_plane: Vec<i64>,
    /// Incoming channel indices of each processor, in counter order.
    inputs: Vec<Vec<usize>>,
}

fn west(y: i64) -> i64 {
    -(BASE - 1) - y.max(0) / 2
}

/// Compiles onto Z³ with inbuffers sized to the largest in-degree.
pub fn compile_3d(m: &ProcessorSystem) -> CompiledSimulation {
    let m0 = (0..m.n()).map(|v| m.network.indegree(v)).max().unwrap_or(0);
    compile_3d_with_ports(m, m0).expect("ports cover the largest in-degree")
}

/// Compiles onto Z³ with `ports` input ports per inbuffer agent.
pub fn compile_3d_with_ports(m: &ProcessorSystem, ports: usize) -> Result<CompiledSimulation, SimError> {
    let n = m.n() as i64;
    let chans = m.network.channels();
    if let Some(indegree) = (0..m.n()).map(|v| m.network.indegree(v)).find(|&d| d > ports) {
        return Err(SimError::PortBound { bound: ports, indegree });
    }
    let g = SpaceGeometry {
        wedge_plane: (0..n).map(|i| 2 * i).collect(),
        highway_plane: (0..chans.len() as i64).map(|c| 2 * n + 1 + c).collect(),
        inputs: (0..m.n())
            .map(|p| (0..chans.len()).filter(|&ci| chans[ci].1 == p).collect())
            .collect(),
    };
    Ok(CompiledSimulation {
        target: Target::Space,
        system: m.clone(),
        layout: Layout {
            order: (0..m.n()).collect(),
            highway_planes: g.highway_plane.clone(),
            wedge_planes: g.wedge_plane.clone(),
            inbuffer_arity: ports + 1,
            message_agent_types: m.messages.len() * chans.len(),
        },
        gas: None,
        decode: decode_lattice,
        geometry: Geometry::Space(g),
    })
}

struct Engine<'a> {
    m: &'a ProcessorSystem,
    g: &'a SpaceGeometry,
    lat: Lattice,
    top: Vec<i64>,
    counter: Vec<usize>,
    sent: Vec<usize>,
    truth: Config,
    trace: Vec<Event>,
}

impl Engine<'_> {
    /// Position in the input list the counter would serve next, if any.
    fn next_input(&self, p: usize) -> Option<usize> {
        let ins = &self.g.inputs[p];
        (0..ins.len())
            .map(|i| (self.counter[p] + i) % ins.len())
            .find(|&i| !self.truth.queues[ins[i]].is_empty())
    }

    fn steps(&self) -> Vec<Step> {
        let mut out = Vec::new();
        for p in 0..self.m.n() {
            if self.m.is_halted(&self.truth, p) {
                continue;
            }
            if self.m.procs[p].transition(self.truth.states[p], None).is_some() {
                out.push(Step::Spontaneous(p));
            }
            if let Some(i) = self.next_input(p) {
                out.push(Step::Receive(self.g.inputs[p][i]));
            }
        }
        out
    }

    fn row(&mut self, p: usize, agent: String, inbox: &str) -> Result<(), String> {
        let y = self.top[p] + 1;
        let z = self.g.wedge_plane[p];
        for x in west(y)..0 {
            self.lat.place([x, y, z], agent.clone(), Owner::Proc(p))?;
        }
        self.lat.place([0, y, z], inbox, Owner::Proc(p))?;
        self.top[p] = y;
        Ok(())
    }

    fn apply(&mut self, step: Step) -> Result<(), String> {
        let (next, events) = self.m.apply(&self.truth, step);
        let (p, inbox) = match step {
            Step::Spontaneous(p) => (p, "in:-".to_string()),
            Step::Receive(ci) => {
                let (from, to) = self.m.network.channels()[ci];
                let i = self.g.inputs[to].iter().position(|&c| c == ci).expect("input channel");
                self.counter[to] = (i + 1) % self.g.inputs[to].len();
                (to, format!("in:{from}:{}", self.truth.queues[ci][0]))
            }
        };
        self.row(p, format!("c:{}", next.states[p]), &inbox)?;
        let y = self.top[p];
        for e in &events {
            if let Event::Send { from, to, msg } = *e {
                let ci = self.m.network.channel_index(from, to).expect("validated edge");
                let k = self.sent[ci] as i64;
                self.sent[ci] += 1;
                let z = self.g.highway_plane[ci];
                self.lat.place([1 + k, y, z], format!("send:{msg}"), Owner::Highway(from, to))?;
            }
        }
        if self.m.is_halted(&next, p) {
            self.row(p, format!("h:{}", next.states[p]), "in:-")?;
        }
        self.truth = next;
        self.trace.extend(events);
        Ok(())
    }
}

pub(super) fn run(c: &CompiledSimulation, seed: u64, budget: usize, observe_all: bool) -> CompiledRun {
    let Geometry::Space(g) = &c.geometry else {
        panic!("space run without space geometry")
    };
    let m = &c.system;
    let mut e = Engine {
        m,
        g,
        lat: Lattice::new(3),
        top: vec![0; m.n()],
        counter: vec![0; m.n()],
        sent: vec![0; m.network.edges.len()],
        truth: m.initial(),
        trace: Vec::new(),
    };
    let mut conflict = None;
    for p in 0..m.n() {
        for x in west(0)..=0 {
            let agent = format!("s:{}", m.procs[p].start);
            if let Err(err) = e.lat.place([x, 0, g.wedge_plane[p]], agent, Owner::Proc(p)) {
                conflict.get_or_insert(err);
            }
        }
    }
    let observe = |e: &Engine<'_>| Observation {
        truth: e.truth.clone(),
        decoded: (c.decode)(m, &Snapshot::Lattice(&e.lat)),
    };
    let mut observations = vec![observe(&e)];
    let mut r = rng::derive(seed, 0x3d3);
    let mut events = 0;
    let mut terminal = false;
    while conflict.is_none() {
        let steps = e.steps();
        if steps.is_empty() {
            terminal = true;
            break;
        }
        if events >= budget {
            break;
        }
        events += 1;
        if let Err(err) = e.apply(steps[r.gen_range(0..steps.len())]) {
            conflict = Some(err);
            break;
        }
        if observe_all {
            observations.push(observe(&e));
        }
    }
    if !observe_all && events > 0 {
        observations.push(observe(&e));
    }
    let (sent, delivered) = count_messages(&e.trace);
    CompiledRun {
        observations,
        trace: e.trace,
        final_config: e.truth,
        lattice: Some(e.lat),
        graph: None,
        terminal,
        engine_events: events,
        sent,
        delivered,
        conflict,
    }
}

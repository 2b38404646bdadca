//! Plane compilation for class-C networks.
//!
//! Wedges sit side by side on the x-axis in component order. Wedge `t`
//! has east edge `X_t + floor(5ty/6)` and widens west by one cell every
//! other row, so neighbouring wedges drift apart. A simulated step takes
//! three rows: a west buffer row, an east buffer row, then a compute row.
//!
//! Message `k` on a channel climbs lane `k`, at distance `k + 1` from the
//! receiver's edge. Channels between neighbouring wedges use the corridor
//! between them; the channel closing a cycle wraps around the outside of
//! its component, below the seed row.

use std::collections::VecDeque;

use rand::Rng as _;

use crate::rng;

use super::lattice::{decode_lattice, Lattice, Owner};
use super::{
    class_c_violation, count_messages, CompiledRun, CompiledSimulation, Config, Event, Geometry, Layout,
    Observation, ProcessorSystem, SimError, Snapshot, Step, Target,
};

/// Wedge width on the seed row.
const BASE: i64 = 2;
/// Extra spacing between neighbouring anchors.
const GAP: i64 = 4;
/// Outer lanes available on a component side that faces another component.
pub const OUTER_CAPACITY: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    W,
    E,
}

impl Side {
    fn out(self) -> i64 {
        match self {
            Side::W => -1,
            Side::E => 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Route {
    outer: bool,
    send_side: Side,
    recv_side: Side,
}

#[derive(Clone, Debug)]
pub(crate) struct PlaneGeometry {
    /// Slot of each processor.
    slot: Vec<usize>,
    /// Processor in each slot.
    order: Vec<usize>,
    anchor: Vec<i64>,
    /// First and last slot of the component holding each slot.
    span: Vec<(usize, usize)>,
    routes: Vec<Route>,
}

impl PlaneGeometry {
    fn edge(&self, t: usize, side: Side, y: i64) -> i64 {
        let y = y.max(0);
        let east = self.anchor[t] + 5 * t as i64 * y / 6;
        match side {
            Side::E => east,
            Side::W => east - (BASE - 1) - y / 2,
        }
    }

    fn row(&self, t: usize, y: i64) -> std::ops::RangeInclusive<i64> {
        self.edge(t, Side::W, y)..=self.edge(t, Side::E, y)
    }

    /// Column of lane `k` on the receiving side of channel `ci`.
    fn lane(&self, m: &ProcessorSystem, ci: usize, k: usize, y: i64) -> i64 {
        let to = m.network.channels()[ci].1;
        let side = self.routes[ci].recv_side;
        self.edge(self.slot[to], side, y) + side.out() * (1 + k as i64)
    }

    fn outermost(&self, t: usize, side: Side) -> bool {
        match side {
            Side::W => t == 0,
            Side::E => t + 1 == self.order.len(),
        }
    }
}

/// Components in order of their smallest processor, each walked from an end.
fn components(m: &ProcessorSystem) -> Vec<Vec<usize>> {
    let n = m.n();
    let nb: Vec<Vec<usize>> = (0..n).map(|v| m.network.neighbors(v)).collect();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let mut comp = vec![v];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &w in &nb[u] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        let start = comp.iter().copied().find(|&u| nb[u].len() < 2).unwrap_or(comp[0]);
        let mut walk = vec![start];
        let mut cur = start;
        while let Some(&next) = nb[cur].iter().find(|w| !walk.contains(w)) {
            walk.push(next);
            cur = next;
        }
        out.push(walk);
    }
    out
}

fn geometry(m: &ProcessorSystem) -> PlaneGeometry {
    let comps = components(m);
    let order: Vec<usize> = comps.iter().flatten().copied().collect();
    let mut slot = vec![0; m.n()];
    for (t, &p) in order.iter().enumerate() {
        slot[p] = t;
    }
    let mut anchor = Vec::new();
    let mut span = Vec::new();
    let mut x = 0;
    for c in &comps {
        let first = span.len();
        for i in 0..c.len() {
            if !anchor.is_empty() {
                x += BASE + GAP + if i == 0 { 2 * OUTER_CAPACITY as i64 + 4 } else { 0 };
            }
            anchor.push(x);
            span.push((first, first + c.len() - 1));
        }
    }
    let routes = m
        .network
        .channels()
        .into_iter()
        .map(|(a, b)| {
            let (sa, sb) = (slot[a], slot[b]);
            let reverse = m.network.edges.contains(&(b, a));
            if sa.abs_diff(sb) == 1 && (!reverse || sa < sb) {
                let (send_side, recv_side) = if sb > sa { (Side::E, Side::W) } else { (Side::W, Side::E) };
                Route {
                    outer: false,
                    send_side,
                    recv_side,
                }
            } else {
                let (send_side, recv_side) = if sa < sb { (Side::W, Side::E) } else { (Side::E, Side::W) };
                Route {
                    outer: true,
                    send_side,
                    recv_side,
                }
            }
        })
        .collect();
    PlaneGeometry {
        slot,
        order,
        anchor,
        span,
        routes,
    }
}

/// Compiles a class-C system onto Z².
pub fn compile_planar(m: &ProcessorSystem) -> Result<CompiledSimulation, SimError> {
    if let Some((v, degree)) = class_c_violation(&m.network) {
        return Err(SimError::NotInClassC {
            vertex: m.procs[v].name.clone(),
            degree,
        });
    }
    let g = geometry(m);
    Ok(CompiledSimulation {
        target: Target::Plane,
        system: m.clone(),
        layout: Layout {
            order: g.order.clone(),
            message_agent_types: m.messages.len() * m.network.edges.len(),
            ..Layout::default()
        },
        gas: None,
        decode: decode_lattice,
        geometry: Geometry::Plane(g),
    })
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Compute(usize),
    Deliver(usize),
    Climb(usize),
    Idle(usize),
}

struct Ray {
    chan: usize,
    k: usize,
    head: i64,
}

struct Engine<'a> {
    m: &'a ProcessorSystem,
    g: &'a PlaneGeometry,
    chans: Vec<(usize, usize)>,
    lat: Lattice,
    top: Vec<i64>,
    halted: Vec<bool>,
    rays: Vec<Ray>,
    pending: Vec<VecDeque<usize>>,
    sent: Vec<usize>,
    truth: Config,
    trace: Vec<Event>,
}

impl Engine<'_> {
    fn buffer_row(&self, p: usize, side: Side) -> i64 {
        self.top[p]
            + match side {
                Side::W => 1,
                Side::E => 2,
            }
    }

    fn incoming(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.chans.len()).filter(move |&ci| self.chans[ci].1 == p)
    }

    fn moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for p in 0..self.m.n() {
            if self.halted[p] {
                continue;
            }
            if self.m.procs[p].transition(self.truth.states[p], None).is_some() {
                out.push(Move::Compute(p));
            }
            let mut idle = false;
            for ci in self.incoming(p) {
                if let Some(&r) = self.pending[ci].front() {
                    let row = self.buffer_row(p, self.g.routes[ci].recv_side);
                    if self.rays[r].head == row {
                        out.push(Move::Deliver(ci));
                    }
                    idle |= self.rays[r].head > row;
                }
            }
            if idle {
                out.push(Move::Idle(p));
            }
        }
        for q in &self.pending {
            for &r in q {
                let ray = &self.rays[r];
                let to = self.chans[ray.chan].1;
                if ray.head < self.buffer_row(to, self.g.routes[ray.chan].recv_side) {
                    out.push(Move::Climb(r));
                }
            }
        }
        out
    }

    fn put(&mut self, x: i64, y: i64, agent: impl Into<String>, owner: Owner) -> Result<(), String> {
        self.lat.place([x, y, 0], agent, owner)
    }

    fn seed(&mut self) -> Result<(), String> {
        let mut t = 0;
        while t < self.g.order.len() {
            let (a, b) = self.g.span[t];
            for x in self.g.edge(a, Side::W, 0)..=self.g.edge(b, Side::E, 0) {
                match (a..=b).find(|&s| self.g.row(s, 0).contains(&x)) {
                    Some(s) => {
                        let p = self.g.order[s];
                        let start = self.m.procs[p].start;
                        self.put(x, 0, format!("s:{start}"), Owner::Proc(p))?;
                    }
                    None => self.put(x, 0, "seed", Owner::Seed)?,
                }
            }
            t = b + 1;
        }
        Ok(())
    }

    /// Two buffer rows and a compute row; `inbox` marks the receiving side.
    fn step_rows(&mut self, p: usize, inbox: Option<(Side, String)>, state: usize) -> Result<(), String> {
        let t = self.g.slot[p];
        for (dy, side) in [(1, Side::W), (2, Side::E)] {
            let y = self.top[p] + dy;
            let end = self.g.edge(t, side, y);
            for x in self.g.row(t, y) {
                let agent = match &inbox {
                    _ if x != end => "b".to_string(),
                    Some((s, a)) if *s == side => a.clone(),
                    _ => "in:-".to_string(),
                };
                self.put(x, y, agent, Owner::Proc(p))?;
            }
        }
        let y = self.top[p] + 3;
        for x in self.g.row(t, y) {
            self.put(x, y, format!("c:{state}"), Owner::Proc(p))?;
        }
        self.top[p] = y;
        Ok(())
    }

    fn send(&mut self, from: usize, to: usize, msg: usize, y: i64) -> Result<(), String> {
        let ci = self.m.network.channel_index(from, to).expect("validated edge");
        let k = self.sent[ci];
        self.sent[ci] += 1;
        let route = self.g.routes[ci];
        let hw = Owner::Highway(from, to);
        let st = self.g.slot[from];
        let out = route.send_side.out();
        let edge = self.g.edge(st, route.send_side, y);
        let head = if route.outer {
            let rt = self.g.slot[to];
            if k >= OUTER_CAPACITY
                && !(self.g.outermost(st, route.send_side) && self.g.outermost(rt, route.recv_side))
            {
                return Err(format!("outer lane capacity {OUTER_CAPACITY} exceeded on channel {from}->{to}"));
            }
            let d = 1 + k as i64;
            for i in 1..d {
                self.put(edge + out * i, y, "arm", hw)?;
            }
            self.put(edge + out * d, y, format!("send:{msg}"), hw)?;
            let bottom = -1 - k as i64;
            for yy in (bottom..y).rev() {
                self.put(self.g.edge(st, route.send_side, yy) + out * d, yy, "ray", hw)?;
            }
            let x0 = self.g.edge(st, route.send_side, bottom) + out * d;
            let x1 = self.g.lane(self.m, ci, k, bottom);
            let dir = (x1 - x0).signum();
            let mut x = x0 + dir;
            while x != x1 {
                self.put(x, bottom, "ray", hw)?;
                x += dir;
            }
            self.put(x1, bottom, "ray", hw)?;
            bottom
        } else {
            let lane = self.g.lane(self.m, ci, k, y);
            let mut x = edge + out;
            while (lane - x) * out > 0 {
                self.put(x, y, "arm", hw)?;
                x += out;
            }
            self.put(lane, y, format!("send:{msg}"), hw)?;
            y
        };
        self.pending[ci].push_back(self.rays.len());
        self.rays.push(Ray { chan: ci, k, head });
        Ok(())
    }

    fn apply(&mut self, mv: Move) -> Result<(), String> {
        let (p, step) = match mv {
            Move::Climb(r) => {
                let (ci, k, y) = (self.rays[r].chan, self.rays[r].k, self.rays[r].head + 1);
                let (from, to) = self.chans[ci];
                self.put(self.g.lane(self.m, ci, k, y), y, "ray", Owner::Highway(from, to))?;
                self.rays[r].head = y;
                return Ok(());
            }
            Move::Idle(p) => return self.step_rows(p, None, self.truth.states[p]),
            Move::Compute(p) => (p, Step::Spontaneous(p)),
            Move::Deliver(ci) => (self.chans[ci].1, Step::Receive(ci)),
        };
        let (next, events) = self.m.apply(&self.truth, step);
        let mut inbox = None;
        if let Move::Deliver(ci) = mv {
            let r = self.pending[ci].pop_front().expect("front ray");
            let (from, to) = self.chans[ci];
            let side = self.g.routes[ci].recv_side;
            let y = self.buffer_row(p, side);
            let edge = self.g.edge(self.g.slot[to], side, y);
            for d in 1..=self.rays[r].k as i64 {
                self.put(edge + side.out() * d, y, "arm", Owner::Highway(from, to))?;
            }
            let msg = self.truth.queues[ci][0];
            inbox = Some((side, format!("in:{from}:{msg}")));
        }
        self.step_rows(p, inbox, next.states[p])?;
        let y = self.top[p];
        for e in &events {
            if let Event::Send { from, to, msg } = *e {
                self.send(from, to, msg, y)?;
            }
        }
        if self.m.is_halted(&next, p) {
            let y = y + 1;
            for x in self.g.row(self.g.slot[p], y) {
                self.put(x, y, format!("h:{}", next.states[p]), Owner::Proc(p))?;
            }
            self.top[p] = y;
            self.halted[p] = true;
        }
        self.truth = next;
        self.trace.extend(events);
        Ok(())
    }
}

pub(super) fn run(c: &CompiledSimulation, seed: u64, budget: usize, observe_all: bool) -> CompiledRun {
    let Geometry::Plane(g) = &c.geometry else {
        panic!("plane run without plane geometry")
    };
    let m = &c.system;
    let chans = m.network.channels();
    let mut e = Engine {
        m,
        g,
        lat: Lattice::new(2),
        top: vec![0; m.n()],
        halted: (0..m.n()).map(|p| m.is_halted(&m.initial(), p)).collect(),
        rays: Vec::new(),
        pending: vec![VecDeque::new(); chans.len()],
        sent: vec![0; chans.len()],
        truth: m.initial(),
        trace: Vec::new(),
        chans,
    };
    let observe = |e: &Engine<'_>| Observation {
        truth: e.truth.clone(),
        decoded: (c.decode)(m, &Snapshot::Lattice(&e.lat)),
    };
    let mut conflict = e.seed().err();
    let mut observations = vec![observe(&e)];
    let mut r = rng::derive(seed, 0x2d2);
    let mut events = 0;
    let mut terminal = false;
    while conflict.is_none() {
        let moves = e.moves();
        if moves.is_empty() {
            terminal = true;
            break;
        }
        if events >= budget {
            break;
        }
        let mv = moves[r.gen_range(0..moves.len())];
        events += 1;
        if let Err(err) = e.apply(mv) {
            conflict = Some(err);
            break;
        }
        if observe_all && !matches!(mv, Move::Climb(_)) {
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

//! Search for schedules that force a message ray through another wedge.
//!
//! Every ordering of the wedges along the axis is tried. A channel between
//! neighbouring wedges uses the corridor between them and a channel between
//! the two outermost wedges wraps around the outside; any other channel has
//! to cross the wedges in between. Its ray leaves the sender on the
//! sender's compute row and meets each wedge in between on that row.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use super::{Config, ProcessorSystem, SimError, Step};

/// Rows a simulated step adds to a wedge.
const ROWS_PER_STEP: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockageKind {
    /// The ray runs through rows the crossed wedge has yet to grow into.
    BlockedCone,
    /// The ray's row is already filled by the crossed wedge; only that
    /// wedge's agents could carry it on.
    NeedsCooperation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockageWitness {
    /// Processor in each slot along the axis.
    pub order: Vec<usize>,
    pub kind: BlockageKind,
    pub channel: (usize, usize),
    /// The wedge the ray has to cross.
    pub crossed: usize,
    pub ray_row: i64,
    pub crossed_top: i64,
    /// Steps leading to the blocking send, the last one included.
    pub schedule: Vec<Step>,
    /// Configuration before the last step.
    pub config: Config,
}

#[derive(Clone, Debug)]
pub struct BlockageOutcome {
    /// One witness per wedge ordering.
    pub witnesses: Vec<BlockageWitness>,
    pub explored: usize,
}

impl BlockageOutcome {
    pub fn render(&self, m: &ProcessorSystem) -> String {
        let name = |p: usize| m.procs[p].name.as_str();
        let mut s = String::new();
        writeln!(s, "blockage layouts={} explored={}", self.witnesses.len(), self.explored).unwrap();
        for w in &self.witnesses {
            let order: Vec<&str> = w.order.iter().map(|&p| name(p)).collect();
            let sched: Vec<String> = w
                .schedule
                .iter()
                .map(|st| match *st {
                    Step::Spontaneous(p) => name(p).to_string(),
                    Step::Receive(ci) => {
                        let (a, b) = m.network.channels()[ci];
                        format!("{}<{}", name(b), name(a))
                    }
                })
                .collect();
            writeln!(
                s,
                "witness layout={} channel={}->{} kind={} crossed={} row={} top={} schedule={}",
                order.join(","),
                name(w.channel.0),
                name(w.channel.1),
                match w.kind {
                    BlockageKind::BlockedCone => "blocked-cone",
                    BlockageKind::NeedsCooperation => "needs-cooperation",
                },
                name(w.crossed),
                w.ray_row,
                w.crossed_top,
                sched.join(",")
            )
            .unwrap();
        }
        s
    }
}

/// Wedges a channel's ray has to cross under `slot`.
fn crossed(slot: &[usize], order: &[usize], (a, b): (usize, usize)) -> Vec<usize> {
    let (lo, hi) = (slot[a].min(slot[b]), slot[a].max(slot[b]));
    if hi - lo <= 1 || (lo == 0 && hi + 1 == order.len()) {
        return Vec::new();
    }
    order[lo + 1..hi].to_vec()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    config: Config,
    steps: Vec<i64>,
}

fn top(m: &ProcessorSystem, s: &State, p: usize) -> i64 {
    ROWS_PER_STEP * s.steps[p] + i64::from(m.is_halted(&s.config, p))
}

/// Breadth-first over schedules; returns the first blocking send, `None`
/// once the reachable states are exhausted.
fn search_layout(
    m: &ProcessorSystem,
    order: &[usize],
    budget: usize,
    explored: &mut usize,
) -> Result<Option<BlockageWitness>, SimError> {
    let mut slot = vec![0; m.n()];
    for (t, &p) in order.iter().enumerate() {
        slot[p] = t;
    }
    let start = State {
        config: m.initial(),
        steps: vec![0; m.n()],
    };
    let mut parent: HashMap<State, Option<(State, Step)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let path = |parent: &HashMap<State, Option<(State, Step)>>, mut s: State| {
        let mut out = Vec::new();
        while let Some(Some((prev, step))) = parent.get(&s) {
            out.push(*step);
            s = prev.clone();
        }
        out.reverse();
        out
    };
    while let Some(s) = queue.pop_front() {
        *explored += 1;
        if *explored > budget {
            return Err(SimError::BudgetExhausted(budget));
        }
        for step in m.enabled(&s.config) {
            let (next, events) = m.apply(&s.config, step);
            let p = match step {
                Step::Spontaneous(p) => p,
                Step::Receive(ci) => m.network.channels()[ci].1,
            };
            let row = ROWS_PER_STEP * (s.steps[p] + 1);
            for e in &events {
                let super::Event::Send { from, to, .. } = *e else { continue };
                for w in crossed(&slot, order, (from, to)) {
                    let wtop = top(m, &s, w);
                    let kind = if row <= wtop {
                        BlockageKind::NeedsCooperation
                    } else if !m.is_halted(&s.config, w) {
                        BlockageKind::BlockedCone
                    } else {
                        continue;
                    };
                    let mut schedule = path(&parent, s.clone());
                    schedule.push(step);
                    return Ok(Some(BlockageWitness {
                        order: order.to_vec(),
                        kind,
                        channel: (from, to),
                        crossed: w,
                        ray_row: row,
                        crossed_top: wtop,
                        schedule,
                        config: s.config.clone(),
                    }));
                }
            }
            let mut steps = s.steps.clone();
            steps[p] += 1;
            let n = State { config: next, steps };
            if !parent.contains_key(&n) {
                parent.insert(n.clone(), Some((s.clone(), step)));
                queue.push_back(n);
            }
        }
    }
    Ok(None)
}

/// Looks for a blocking schedule under every wedge ordering. Returns a
/// witness per ordering when all of them block, `None` as soon as one
/// ordering is shown never to block.
pub fn adversarial_blockage_search(m: &ProcessorSystem, budget: usize) -> Result<Option<BlockageOutcome>, SimError> {
    if m.n() < 2 {
        return Err(SimError::Degenerate("blockage search needs at least two processors".into()));
    }
    if m.network.edges.is_empty() {
        return Err(SimError::Degenerate("blockage search needs at least one channel".into()));
    }
    let chans = m.network.channels();
    let layouts = permutations(m.n());
    for order in &layouts {
        let mut slot = vec![0; m.n()];
        for (t, &p) in order.iter().enumerate() {
            slot[p] = t;
        }
        if chans.iter().all(|&c| crossed(&slot, order, c).is_empty()) {
            return Ok(None);
        }
    }
    let mut explored = 0;
    let mut witnesses = Vec::new();
    for order in &layouts {
        match search_layout(m, order, budget, &mut explored)? {
            Some(w) => witnesses.push(w),
            None => return Ok(None),
        }
    }
    Ok(Some(BlockageOutcome { witnesses, explored }))
}

//! Sequential composition of processor systems and the cost of appending
//! an ALPHA-wrapped MIS to a finished computation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::sim::{compile_3d, NetworkGraph, Owner, ProcessorSpec, ProcessorSystem, SimError, Transition};

use super::{
    alpha_wrap, id_bits, rectangular_surface_cost, AlphaOptions, Mis, MisError, MisResult, RoundAlgorithm,
    SurfaceCostReport,
};

/// Runs `a`, and wherever a processor of `a` would halt it starts as the
/// same processor of `b` instead. Processors are matched by position.
///
/// Messages of `b` that reach a processor still running `a` are taken in
/// while they drive `b` from its start through receive-only transitions.
/// A composite state `A.<s>+B.<t>` remembers where that left `b`.
pub fn then(a: &ProcessorSystem, b: &ProcessorSystem) -> Result<ProcessorSystem, SimError> {
    if a.n() != b.n() {
        return Err(SimError::Degenerate("composed systems differ in size".into()));
    }
    let mut messages: Vec<String> = a.messages.iter().map(|m| format!("A.{m}")).collect();
    let shift = messages.len();
    messages.extend(b.messages.iter().map(|m| format!("B.{m}")));
    let procs = a.procs.iter().zip(&b.procs).map(|(pa, pb)| then_proc(pa, pb, shift)).collect();
    let network = NetworkGraph::new(a.n(), a.network.edges.union(&b.network.edges).copied())?;
    let inputs = a.inputs.iter().zip(&b.inputs).map(|(x, y)| y.clone().or_else(|| x.clone())).collect();
    ProcessorSystem::new(procs, messages, network, inputs)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    /// Running `a` in the first state, `b` parked in the second.
    A(usize, usize),
    B(usize),
}

fn then_proc(pa: &ProcessorSpec, pb: &ProcessorSpec, shift: usize) -> ProcessorSpec {
    let enter = |sa: usize, sb: usize| {
        if pa.halting.contains(&sa) {
            Phase::B(sb)
        } else {
            Phase::A(sa, sb)
        }
    };
    let name = |p: Phase| match p {
        Phase::A(sa, sb) if sb == pb.start => format!("A.{}", pa.states[sa]),
        Phase::A(sa, sb) => format!("A.{}+B.{}", pa.states[sa], pb.states[sb]),
        Phase::B(sb) => format!("B.{}", pb.states[sb]),
    };
    let start = enter(pa.start, pb.start);
    let mut index: BTreeMap<Phase, usize> = BTreeMap::new();
    let mut order = vec![start];
    index.insert(start, 0);
    let mut table = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let from = order[i];
        i += 1;
        let mut out: Vec<(Option<usize>, Phase, Vec<(usize, usize)>)> = Vec::new();
        match from {
            Phase::A(sa, sb) => {
                for (&(s, recv), t) in pa.table.range((sa, None)..) {
                    if s != sa {
                        break;
                    }
                    out.push((recv, enter(t.next, sb), t.sends.clone()));
                }
                for (&(s, recv), t) in pb.table.range((sb, None)..) {
                    if s != sb {
                        break;
                    }
                    if let Some(m) = recv {
                        if t.sends.is_empty() && !pb.halting.contains(&t.next) {
                            out.push((Some(m + shift), Phase::A(sa, t.next), Vec::new()));
                        }
                    }
                }
            }
            Phase::B(sb) => {
                if pb.halting.contains(&sb) {
                    continue;
                }
                for (&(s, recv), t) in pb.table.range((sb, None)..) {
                    if s != sb {
                        break;
                    }
                    let sends = t.sends.iter().map(|&(q, m)| (q, m + shift)).collect();
                    out.push((recv.map(|m| m + shift), Phase::B(t.next), sends));
                }
            }
        }
        let from = index[&from];
        for (recv, next, sends) in out {
            let next = *index.entry(next).or_insert_with(|| {
                order.push(next);
                order.len() - 1
            });
            table.insert((from, recv), Transition { next, sends });
        }
    }
    let halting = order
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, Phase::B(sb) if pb.halting.contains(sb)))
        .map(|(i, _)| i)
        .collect();
    ProcessorSpec {
        name: pa.name.clone(),
        states: order.into_iter().map(name).collect(),
        start: 0,
        halting,
        table,
    }
}

#[derive(Clone, Debug)]
pub struct ComposeReport {
    pub base: SurfaceCostReport,
    pub composed: SurfaceCostReport,
    /// `composed.dims - base.dims` per axis.
    pub deltas: [i64; 3],
    /// Most rows any wedge gained.
    pub added_rows: i64,
    pub mis: MisResult,
    pub seeds: Vec<u64>,
}

impl ComposeReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (a, name) in ["x", "y", "z"].iter().enumerate() {
            writeln!(
                s,
                "axis={name} base={} composed={} delta={}",
                self.base.dims[a], self.composed.dims[a], self.deltas[a]
            )
            .unwrap();
        }
        writeln!(s, "added_rows={}", self.added_rows).unwrap();
        s
    }
}

fn heights(l: &crate::sim::Lattice, n: usize) -> Vec<i64> {
    let mut h = vec![0; n];
    for p in &l.placements {
        if let Owner::Proc(i) = p.owner {
            h[i] = h[i].max(p.pos[1]);
        }
    }
    h
}

/// Compiles `a` alone and `a` followed by an ALPHA-wrapped MIS on `g` onto
/// Z³, runs both to completion under every seed, and compares their boxes.
///
/// Rounds are padded to `degree_bound`, so every wedge gains the same rows.
pub fn compose_then_measure(
    a: &ProcessorSystem,
    g: &NetworkGraph,
    ids: &[u64],
    degree_bound: usize,
    seeds: &[u64],
    budget: usize,
) -> Result<ComposeReport, MisError> {
    let mis = Mis::new(g, ids)?;
    let opts = AlphaOptions {
        pad_to_degree: Some(degree_bound),
        ids: Some((ids.to_vec(), id_bits(ids))),
        ..AlphaOptions::default()
    };
    let wrapped = alpha_wrap(&mis, g, &opts);
    let composed = then(a, &wrapped)?;
    let (ca, cb) = (compile_3d(a), compile_3d(&composed));
    let mut out: Option<ComposeReport> = None;
    for &seed in seeds {
        let ra = ca.run_unobserved(seed, budget);
        let rb = cb.run_unobserved(seed, budget);
        if !ra.terminal || !rb.terminal || ra.conflict.is_some() || rb.conflict.is_some() {
            return Err(MisError::Unfinished(seed));
        }
        let (la, lb) = (ra.lattice.expect("space run"), rb.lattice.expect("space run"));
        let base = rectangular_surface_cost(&la.points())?;
        let comp = rectangular_surface_cost(&lb.points())?;
        let (ha, hb) = (heights(&la, a.n()), heights(&lb, a.n()));
        let added_rows = ha.iter().zip(&hb).map(|(x, y)| y - x).max().unwrap_or(0);
        let set: BTreeSet<usize> = (0..a.n())
            .filter(|&p| cb.system.procs[p].states[rb.final_config.states[p]].ends_with(".in"))
            .collect();
        let report = ComposeReport {
            deltas: [0, 1, 2].map(|i| comp.dims[i] - base.dims[i]),
            base,
            composed: comp,
            added_rows,
            mis: MisResult {
                set,
                rounds: mis.rounds(),
            },
            seeds: seeds.to_vec(),
        };
        match &out {
            Some(prev)
                if prev.base.dims != report.base.dims
                    || prev.composed.dims != report.composed.dims
                    || prev.mis != report.mis => {
                return Err(MisError::SeedDependent(seed));
            }
            Some(_) => {}
            None => out = Some(report),
        }
    }
    out.ok_or(MisError::EmptyAssembly)
}

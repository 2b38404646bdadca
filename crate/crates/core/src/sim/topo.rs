//! Topological compilation: one wedge grammar per processor plus an
//! information highway per channel, as a graph assembly system.
//!
//! Labels:
//! - `p|i|s|top` the newest row of processor `i`, in state `s`; `p|i|s` older rows
//! - `hw|i|j|0` / `hw|i|j|1` the highway anchor of channel `i -> j`, empty or not
//! - `m|k|i|j|t` the last queued message `k`, `m|k|i|j|q` an earlier one,
//!   `m|k|i|j|x` a consumed one
//! - `free` unused agents
//!
//! A queue is a path hanging off its anchor, front first.

use std::collections::BTreeMap;

use rand::Rng as _;

use crate::graph::{find_embeddings, Action, Embedding, GraphAssemblySystem, Label, LabeledGraph, Rule};
use crate::rng;

use super::{
    count_messages, CompiledRun, CompiledSimulation, Config, Layout, Observation, ProcessorSystem, Snapshot, Step,
    Target,
};

const FREE: &str = "free";

fn top(i: usize, s: usize) -> String {
    format!("p|{i}|{s}|top")
}

fn row(i: usize, s: usize) -> String {
    format!("p|{i}|{s}")
}

fn anchor(i: usize, j: usize, busy: bool) -> String {
    format!("hw|{i}|{j}|{}", u8::from(busy))
}

fn msg(k: usize, i: usize, j: usize, flag: char) -> String {
    format!("m|{k}|{i}|{j}|{flag}")
}

/// Left and right sides under construction; vertices are added in pairs.
#[derive(Default)]
struct Sides {
    left: LabeledGraph,
    right: LabeledGraph,
}

impl Sides {
    fn vertex(&mut self, l: &str, r: &str) -> usize {
        self.left.add_vertex(l);
        self.right.add_vertex(r)
    }

    fn edge_left(&mut self, a: usize, b: usize) {
        self.left.add_edge(a, b).expect("fresh vertices");
    }

    fn edge_right(&mut self, a: usize, b: usize) {
        self.right.add_edge(a, b).expect("fresh vertices");
    }
}

/// Every way the tails of the send channels can look.
fn tail_choices(m: &ProcessorSystem, sends: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in sends {
        let mut next = Vec::new();
        for prefix in &out {
            for choice in std::iter::once(None).chain((0..m.messages.len()).map(Some)) {
                let mut v: Vec<Option<usize>> = prefix.clone();
                v.push(choice);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn add_sends(s: &mut Sides, p: usize, sends: &[(usize, usize)], tails: &[Option<usize>]) {
    for (&(peer, k), &tail) in sends.iter().zip(tails) {
        let f = match tail {
            None => {
                let a = s.vertex(&anchor(p, peer, false), &anchor(p, peer, true));
                let f = s.vertex(FREE, &msg(k, p, peer, 't'));
                s.edge_right(a, f);
                f
            }
            Some(old) => {
                let t = s.vertex(&msg(old, p, peer, 't'), &msg(old, p, peer, 'q'));
                let f = s.vertex(FREE, &msg(k, p, peer, 't'));
                s.edge_right(t, f);
                f
            }
        };
        let _ = f;
    }
}

/// Rules with the reference step each one realizes.
fn build_rules(m: &ProcessorSystem) -> Vec<(Rule, Step)> {
    let chans = m.network.channels();
    let mut rules = Vec::new();
    for (p, spec) in m.procs.iter().enumerate() {
        for s in 0..spec.states.len() {
            if let Some(t) = spec.transition(s, None) {
                for tails in tail_choices(m, &t.sends) {
                    let mut sd = Sides::default();
                    let a = sd.vertex(&top(p, s), &row(p, s));
                    let b = sd.vertex(FREE, &top(p, t.next));
                    sd.edge_right(a, b);
                    add_sends(&mut sd, p, &t.sends, &tails);
                    let name = format!("step|{p}|{s}|none|{}", rules.len());
                    rules.push((Rule::new(name, sd.left, sd.right).expect("paired sides"), Step::Spontaneous(p)));
                }
            }
            for (ci, &(from, to)) in chans.iter().enumerate() {
                if to != p {
                    continue;
                }
                for k in 0..m.messages.len() {
                    let Some(t) = spec.transition(s, Some(k)) else {
                        continue;
                    };
                    // front is the only element, or is followed by `next`
                    let fronts = std::iter::once(None)
                        .chain((0..m.messages.len()).flat_map(|n| [Some((n, 't')), Some((n, 'q'))]));
                    for front in fronts {
                        for tails in tail_choices(m, &t.sends) {
                            let mut sd = Sides::default();
                            let a = sd.vertex(&top(p, s), &row(p, s));
                            let b = sd.vertex(FREE, &top(p, t.next));
                            sd.edge_right(a, b);
                            match front {
                                None => {
                                    let h = sd.vertex(&anchor(from, to, true), &anchor(from, to, false));
                                    let x = sd.vertex(&msg(k, from, to, 't'), &msg(k, from, to, 'x'));
                                    sd.edge_left(h, x);
                                }
                                Some((n, flag)) => {
                                    let h = sd.vertex(&anchor(from, to, true), &anchor(from, to, true));
                                    let x = sd.vertex(&msg(k, from, to, 'q'), &msg(k, from, to, 'x'));
                                    let y = sd.vertex(&msg(n, from, to, flag), &msg(n, from, to, flag));
                                    sd.edge_left(h, x);
                                    sd.edge_left(x, y);
                                    sd.edge_right(h, y);
                                }
                            }
                            add_sends(&mut sd, p, &t.sends, &tails);
                            let name = format!("step|{p}|{s}|{k}|{}", rules.len());
                            rules.push((
                                Rule::new(name, sd.left, sd.right).expect("paired sides"),
                                Step::Receive(ci),
                            ));
                        }
                    }
                }
            }
        }
    }
    rules
}

fn initial_graph(m: &ProcessorSystem) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    for (p, spec) in m.procs.iter().enumerate() {
        g.add_vertex(top(p, spec.start));
    }
    for (i, j) in m.network.channels() {
        g.add_vertex(anchor(i, j, false));
    }
    g
}

fn alphabet(m: &ProcessorSystem) -> Vec<Label> {
    let mut a = vec![Label::new(FREE)];
    for (p, spec) in m.procs.iter().enumerate() {
        for s in 0..spec.states.len() {
            a.push(top(p, s).into());
            a.push(row(p, s).into());
        }
    }
    for (i, j) in m.network.channels() {
        a.push(anchor(i, j, false).into());
        a.push(anchor(i, j, true).into());
        for k in 0..m.messages.len() {
            for f in ['t', 'q', 'x'] {
                a.push(msg(k, i, j, f).into());
            }
        }
    }
    a
}

/// Free agents a single step may consume.
fn free_per_step(m: &ProcessorSystem) -> usize {
    1 + m.procs.iter().flat_map(|p| p.table.values()).map(|t| t.sends.len()).max().unwrap_or(0)
}

pub fn compile_topological(m: &ProcessorSystem) -> CompiledSimulation {
    let rules: Vec<Rule> = build_rules(m).into_iter().map(|(r, _)| r).collect();
    let gas = GraphAssemblySystem::new(alphabet(m), initial_graph(m), rules)
        .and_then(|g| g.with_supply(FREE, 64 * free_per_step(m)))
        .expect("labels are generated from the alphabet")
        .auto_orient();
    CompiledSimulation {
        target: Target::Topological,
        system: m.clone(),
        layout: Layout {
            order: (0..m.n()).collect(),
            message_agent_types: m.messages.len() * m.network.edges.len(),
            ..Layout::default()
        },
        gas: Some(gas),
        decode: decode_graph,
        geometry: super::Geometry::None,
    }
}

fn parse_label(l: &str) -> Vec<&str> {
    l.split('|').collect()
}

/// Reads processor states from the `top` rows and queue contents by walking
/// each highway from its anchor.
pub fn decode_graph(m: &ProcessorSystem, snap: &Snapshot<'_>) -> Option<Config> {
    let Snapshot::Graph(g) = snap else { return None };
    let mut states = vec![None; m.n()];
    let mut anchors = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let parts = parse_label(g.label(v).as_str());
        match parts[..] {
            ["p", i, s, "top"] => {
                let i: usize = i.parse().ok()?;
                if states.get_mut(i)?.replace(s.parse().ok()?).is_some() {
                    return None;
                }
            }
            ["hw", i, j, busy] => {
                anchors.insert((i.parse::<usize>().ok()?, j.parse::<usize>().ok()?), (v, busy == "1"));
            }
            _ => {}
        }
    }
    let mut queues = Vec::new();
    for (i, j) in m.network.channels() {
        let &(a, busy) = anchors.get(&(i, j))?;
        let mut q = Vec::new();
        if busy {
            let mut prev = a;
            let mut cur = *g.neighbors(a).iter().next()?;
            loop {
                let parts = parse_label(g.label(cur).as_str());
                let ["m", k, _, _, flag] = parts[..] else { return None };
                q.push(k.parse().ok()?);
                if flag == "t" {
                    break;
                }
                let next = *g.neighbors(cur).iter().find(|&&x| x != prev)?;
                prev = cur;
                cur = next;
            }
        }
        queues.push(q);
    }
    Some(Config {
        states: states.into_iter().collect::<Option<_>>()?,
        queues,
    })
}

/// Embeddings of the rule's left side with the free agents filled in from
/// the lowest unused ids; free agents are interchangeable.
fn instances(rule: &Rule, g: &LabeledGraph, free: &[usize]) -> Vec<Embedding> {
    let fixed: Vec<usize> = (0..rule.left.vertex_count())
        .filter(|&v| rule.left.label(v).as_str() != FREE)
        .collect();
    let n_free = rule.left.vertex_count() - fixed.len();
    if n_free > free.len() {
        return Vec::new();
    }
    let mut pat = LabeledGraph::new();
    let mut pos = vec![usize::MAX; rule.left.vertex_count()];
    for (k, &v) in fixed.iter().enumerate() {
        pos[v] = k;
        pat.add_vertex(rule.left.label(v).clone());
    }
    for (a, b) in rule.left.edges() {
        pat.add_edge(pos[a], pos[b]).expect("free agents are isolated on the left");
    }
    find_embeddings(&pat, g)
        .into_iter()
        .map(|e| {
            let mut fill = free.iter();
            let map = (0..rule.left.vertex_count())
                .map(|v| match pos[v] {
                    usize::MAX => *fill.next().expect("checked supply"),
                    k => e.map[k],
                })
                .collect();
            Embedding { map }
        })
        .collect()
}

pub(super) fn run(c: &CompiledSimulation, seed: u64, budget: usize, observe_all: bool) -> CompiledRun {
    let m = &c.system;
    let gas = c.gas.as_ref().expect("topological compile carries a GAS");
    let steps: Vec<Step> = build_rules(m).into_iter().map(|(_, s)| s).collect();
    let mut g = initial_graph(m);
    let per_step = free_per_step(m);
    let mut r = rng::derive(seed, 0x7090);
    let mut truth = m.initial();
    let mut trace = Vec::new();
    let observe = |g: &LabeledGraph, truth: &Config| Observation {
        truth: truth.clone(),
        decoded: (c.decode)(m, &Snapshot::Graph(g)),
    };
    let mut observations = vec![observe(&g, &truth)];
    let mut events = 0;
    let terminal = loop {
        let mut free: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.label(v).as_str() == FREE).collect();
        // the supply of free agents never runs out
        while free.len() < per_step {
            free.push(g.add_vertex(FREE));
        }
        let mut acts = Vec::new();
        for (i, rule) in gas.rules.iter().enumerate() {
            for embedding in instances(rule, &g, &free) {
                acts.push(Action { rule: i, embedding });
            }
        }
        if acts.is_empty() {
            break true;
        }
        if events >= budget {
            break false;
        }
        let act = &acts[r.gen_range(0..acts.len())];
        g = gas.apply(&g, act).expect("instance is a valid embedding");
        let (next, ev) = m.apply(&truth, steps[act.rule]);
        truth = next;
        trace.extend(ev);
        events += 1;
        if observe_all {
            observations.push(observe(&g, &truth));
        }
    };
    if !observe_all && events > 0 {
        observations.push(observe(&g, &truth));
    }
    let (sent, delivered) = count_messages(&trace);
    CompiledRun {
        observations,
        trace,
        final_config: truth,
        lattice: None,
        graph: Some(g),
        terminal,
        engine_events: events,
        sent,
        delivered,
        conflict: None,
    }
}

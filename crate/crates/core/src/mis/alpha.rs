//! ALPHA synchronizer as finite processor tables.
//!
//! Round `i` of node `v`: broadcast `a<i mod k>.<v>.<data>`, collect the
//! announcements of every neighbour, compute, broadcast `s<i mod k>.<v>`,
//! collect every neighbour's safe message, then advance. A neighbour may
//! already announce round `i + 1` while `v` waits for safe messages; such
//! announcements are remembered. Tables cover the local states reachable
//! from the synchronous execution.
//!
//! A node that hears round-0 announcements before starting keeps them in
//! `w.<heard>`.
//!
//! State names: `start`, `w.<heard>`, `r<i>.A.<heard>.<safe>`, `r<i>.B.<safe>.<early>`,
//! `r<i>.P<j>.<early>` for padding steps, `r<i>` for isolated nodes, and
//! `done.<output>`. Neighbour sets are bit strings over the sorted neighbours.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::sim::{Event, NetworkGraph, ProcessorSpec, ProcessorSystem, Transition};

use super::{run_synchronous, RoundAlgorithm};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphaOptions {
    /// Modulus of the round counter carried by messages; `rounds + 1` if unset.
    pub counter_bound: Option<usize>,
    /// Pad every round to the step count of a node of this degree.
    pub pad_to_degree: Option<usize>,
    /// Ids written into the processor inputs as `<binary id>#`.
    pub ids: Option<(Vec<u64>, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Local {
    Start,
    Woke { heard: u64 },
    Heard { round: usize, heard: u64, safe: u64 },
    Safe { round: usize, safe: u64, early: u64 },
    Pad { round: usize, j: usize, early: u64 },
    Alone { round: usize, j: usize },
    Done,
}

fn bits(mask: u64, d: usize) -> String {
    (0..d).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

impl Local {
    fn name(&self, d: usize, output: &str) -> String {
        match *self {
            Local::Start => "start".into(),
            Local::Woke { heard } => format!("w.{}", bits(heard, d)),
            Local::Heard { round, heard, safe } => format!("r{round}.A.{}.{}", bits(heard, d), bits(safe, d)),
            Local::Safe { round, safe, early } => format!("r{round}.B.{}.{}", bits(safe, d), bits(early, d)),
            Local::Pad { round, j, early } => format!("r{round}.P{j}.{}", bits(early, d)),
            Local::Alone { round, j: 0 } => format!("r{round}"),
            Local::Alone { round, j } => format!("r{round}.T{j}"),
            Local::Done => format!("done.{output}"),
        }
    }
}

struct Names {
    list: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Names {
    fn get(&mut self, s: String) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        self.list.push(s.clone());
        self.index.insert(s, self.list.len() - 1);
        self.list.len() - 1
    }
}

/// Wraps `alg` on the undirected view of `g` into asynchronous processors.
pub fn alpha_wrap<A: RoundAlgorithm>(alg: &A, g: &NetworkGraph, opts: &AlphaOptions) -> ProcessorSystem {
    let n = g.n;
    let r = alg.rounds();
    let k = opts.counter_bound.unwrap_or(r + 1).max(2);
    let sync = run_synchronous(alg, g);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut msgs = Names {
        list: Vec::new(),
        index: BTreeMap::new(),
    };
    let data: Vec<Vec<String>> = (0..r)
        .map(|i| (0..n).map(|v| alg.message(v, i, &sync[i][v])).collect())
        .collect();
    let mut announce = |i: usize, u: usize| msgs.get(format!("a{}.{u}.{}", i % k, data[i][u]));
    let mut announce_ids = vec![vec![0; n]; r];
    for (i, row) in announce_ids.iter_mut().enumerate() {
        for (u, slot) in row.iter_mut().enumerate() {
            *slot = announce(i, u);
        }
    }
    let safe_ids: Vec<Vec<usize>> = (0..r)
        .map(|i| (0..n).map(|u| msgs.get(format!("s{}.{u}", i % k))).collect())
        .collect();
    let mut procs = Vec::new();
    for v in 0..n {
        let d = nbrs[v].len();
        let full: u64 = if d == 0 { 0 } else { (1u64 << d) - 1 };
        let pads = 2 * opts.pad_to_degree.unwrap_or(d).saturating_sub(d);
        // an isolated node matches the 2D + 2 steps of a padded round
        let ticks = if opts.pad_to_degree.is_some() { pads + 2 } else { 1 };
        let output = alg.output(v, &sync[r][v]);
        let to_all = |m: &Vec<Vec<usize>>, i: usize| nbrs[v].iter().map(|&u| (u, m[i][v])).collect::<Vec<_>>();
        let mut table: BTreeMap<(Local, Option<usize>), (Local, Vec<(usize, usize)>)> = BTreeMap::new();
        let mut seen = BTreeSet::from([Local::Start]);
        let mut queue = VecDeque::from([Local::Start]);
        // the step that closes round `i` once every safe message is in
        let advance = |i: usize, early: u64| {
            if i + 1 == r {
                (Local::Done, Vec::new())
            } else {
                (
                    Local::Heard {
                        round: i + 1,
                        heard: early,
                        safe: 0,
                    },
                    to_all(&announce_ids, i + 1),
                )
            }
        };
        while let Some(s) = queue.pop_front() {
            let mut out: Vec<(Option<usize>, Local, Vec<(usize, usize)>)> = Vec::new();
            match s {
                Local::Start if r == 0 => out.push((None, Local::Done, Vec::new())),
                Local::Start if d == 0 => out.push((None, Local::Alone { round: 0, j: 0 }, Vec::new())),
                Local::Start | Local::Woke { .. } => {
                    let heard = match s {
                        Local::Woke { heard } => heard,
                        _ => 0,
                    };
                    for (j, &u) in nbrs[v].iter().enumerate() {
                        if heard >> j & 1 == 0 {
                            let next = Local::Woke { heard: heard | 1 << j };
                            out.push((Some(announce_ids[0][u]), next, Vec::new()));
                        }
                    }
                    let next = Local::Heard { round: 0, heard, safe: 0 };
                    out.push((None, next, to_all(&announce_ids, 0)));
                }
                Local::Alone { round, j } => {
                    let next = if j + 1 < ticks {
                        Local::Alone { round, j: j + 1 }
                    } else if round + 1 == r {
                        Local::Done
                    } else {
                        Local::Alone { round: round + 1, j: 0 }
                    };
                    out.push((None, next, Vec::new()));
                }
                Local::Heard { round, heard, safe } => {
                    for (j, &u) in nbrs[v].iter().enumerate() {
                        let bit = 1u64 << j;
                        if heard & bit == 0 {
                            let next = Local::Heard {
                                round,
                                heard: heard | bit,
                                safe,
                            };
                            out.push((Some(announce_ids[round][u]), next, Vec::new()));
                        } else if safe & bit == 0 {
                            let next = Local::Heard {
                                round,
                                heard,
                                safe: safe | bit,
                            };
                            out.push((Some(safe_ids[round][u]), next, Vec::new()));
                        }
                    }
                    if heard == full {
                        let next = Local::Safe { round, safe, early: 0 };
                        out.push((None, next, to_all(&safe_ids, round)));
                    }
                }
                Local::Safe { round, safe, early } => {
                    for (j, &u) in nbrs[v].iter().enumerate() {
                        let bit = 1u64 << j;
                        if safe & bit == 0 {
                            let next = Local::Safe {
                                round,
                                safe: safe | bit,
                                early,
                            };
                            out.push((Some(safe_ids[round][u]), next, Vec::new()));
                        } else if early & bit == 0 && round + 1 < r {
                            let next = Local::Safe {
                                round,
                                safe,
                                early: early | bit,
                            };
                            out.push((Some(announce_ids[round + 1][u]), next, Vec::new()));
                        }
                    }
                    if safe == full {
                        if pads > 0 {
                            out.push((None, Local::Pad { round, j: 1, early }, Vec::new()));
                        } else {
                            let (next, sends) = advance(round, early);
                            out.push((None, next, sends));
                        }
                    }
                }
                Local::Pad { round, j, early } => {
                    for (b, &u) in nbrs[v].iter().enumerate() {
                        let bit = 1u64 << b;
                        if early & bit == 0 && round + 1 < r {
                            let next = Local::Pad {
                                round,
                                j,
                                early: early | bit,
                            };
                            out.push((Some(announce_ids[round + 1][u]), next, Vec::new()));
                        }
                    }
                    if j < pads {
                        out.push((None, Local::Pad { round, j: j + 1, early }, Vec::new()));
                    } else {
                        let (next, sends) = advance(round, early);
                        out.push((None, next, sends));
                    }
                }
                Local::Done => {}
            }
            for (recv, next, sends) in out {
                if seen.insert(next.clone()) {
                    queue.push_back(next.clone());
                }
                table.insert((s.clone(), recv), (next, sends));
            }
        }
        let mut states = Names {
            list: Vec::new(),
            index: BTreeMap::new(),
        };
        let start = states.get(Local::Start.name(d, &output));
        let mut t = BTreeMap::new();
        for ((s, recv), (next, sends)) in table {
            let from = states.get(s.name(d, &output));
            let next = states.get(next.name(d, &output));
            t.insert((from, recv), Transition { next, sends });
        }
        let done = states.get(Local::Done.name(d, &output));
        procs.push(ProcessorSpec {
            name: format!("v{v}"),
            states: states.list,
            start,
            halting: BTreeSet::from([done]),
            table: t,
        });
    }
    let inputs = match &opts.ids {
        Some((ids, width)) => ids
            .iter()
            .map(|id| Some(format!("{id:0w$b}#", w = *width as usize)))
            .collect(),
        None => vec![None; n],
    };
    let network = NetworkGraph::new(n, (0..n).flat_map(|v| nbrs[v].iter().map(move |&u| (v, u))))
        .expect("neighbours are in range");
    ProcessorSystem::new(procs, msgs.list, network, inputs).expect("tables only send to neighbours")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaAudit {
    /// First round-safety violation.
    pub violation: Option<String>,
    /// Messages sent per ordered pair of neighbours.
    pub per_pair: BTreeMap<(usize, usize), usize>,
    /// `done.<output>` suffix per node, for nodes that finished.
    pub outputs: Vec<Option<String>>,
}

fn round_of(name: &str) -> Option<usize> {
    name.strip_prefix('r')?.split('.').next()?.parse().ok()
}

/// Checks that no node computes round `i + 1` before each neighbour has
/// computed round `i`, and counts messages per pair.
pub fn alpha_audit(m: &ProcessorSystem, trace: &[Event]) -> AlphaAudit {
    let n = m.n();
    let mut computed: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    let mut per_pair = BTreeMap::new();
    let mut violation = None;
    for (t, e) in trace.iter().enumerate() {
        match *e {
            Event::Send { from, to, .. } => *per_pair.entry((from, to)).or_insert(0) += 1,
            Event::Compute { proc, from, to } => {
                let a = &m.procs[proc].states[from];
                let b = &m.procs[proc].states[to];
                // the compute step of a round: A -> B, or an isolated node's tick
                let round = if a.contains(".A.") && b.contains(".B.") || !a.contains('.') && a != "start" {
                    round_of(a)
                } else {
                    None
                };
                let Some(i) = round else { continue };
                if i > 0 && violation.is_none() {
                    for u in m.network.neighbors(proc) {
                        if !computed[u].contains_key(&(i - 1)) {
                            violation = Some(format!(
                                "event {t}: {} computes round {i} before {} finished round {}",
                                m.procs[proc].name,
                                m.procs[u].name,
                                i - 1
                            ));
                        }
                    }
                }
                computed[proc].insert(i, t);
            }
            Event::Deliver { .. } => {}
        }
    }
    let outputs = (0..n).map(|_| None).collect();
    AlphaAudit {
        violation,
        per_pair,
        outputs,
    }
}

impl AlphaAudit {
    /// Fills `outputs` from a final configuration.
    pub fn with_outputs(mut self, m: &ProcessorSystem, states: &[usize]) -> Self {
        self.outputs = states
            .iter()
            .enumerate()
            .map(|(p, &s)| m.procs[p].states[s].strip_prefix("done.").map(str::to_string))
            .collect();
        self
    }
}

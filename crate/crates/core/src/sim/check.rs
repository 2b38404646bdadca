//! Seeded audit of a compiled simulation against the reference semantics.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use super::{CompiledSimulation, Config, ProcessorSystem, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotChecked,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotChecked => "not-checked",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseResult {
    /// Clause label: `1`, `2-3`, `4`, `5` or `6`.
    pub clause: &'static str,
    pub status: Status,
    /// First counterexample, or a note for unchecked clauses.
    pub witness: Option<String>,
}

impl ClauseResult {
    fn new(clause: &'static str, witness: Option<String>) -> Self {
        ClauseResult {
            clause,
            status: if witness.is_some() { Status::Fail } else { Status::Pass },
            witness,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimReport {
    pub target: Target,
    pub seeds: Vec<u64>,
    pub clauses: Vec<ClauseResult>,
    /// `(seed, message)` for every run the placement engine stopped.
    pub conflicts: Vec<(u64, String)>,
    /// `(seed, i, j)` for processors whose final hulls meet.
    pub hull_overlaps: Vec<(u64, usize, usize)>,
    pub sent: usize,
    pub delivered: usize,
    pub engine_events: usize,
}

impl SimReport {
    pub fn clause(&self, label: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == label)
    }

    /// No failed clause, no conflict and no overlapping hulls.
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.status != Status::Fail)
            && self.conflicts.is_empty()
            && self.hull_overlaps.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "target={} seeds={} events={} sent={} delivered={}",
            self.target,
            self.seeds.len(),
            self.engine_events,
            self.sent,
            self.delivered
        )
        .unwrap();
        for c in &self.clauses {
            write!(s, "clause={} status={}", c.clause, c.status).unwrap();
            if let Some(w) = &c.witness {
                write!(s, " witness=\"{w}\"").unwrap();
            }
            s.push('\n');
        }
        writeln!(s, "conflicts={}", self.conflicts.len()).unwrap();
        for (seed, msg) in &self.conflicts {
            writeln!(s, "conflict seed={seed} detail=\"{msg}\"").unwrap();
        }
        writeln!(s, "hull_overlaps={}", self.hull_overlaps.len()).unwrap();
        for (seed, i, j) in &self.hull_overlaps {
            writeln!(s, "hull_overlap seed={seed} a={i} b={j}").unwrap();
        }
        writeln!(s, "verdict={}", if self.passed() { "pass" } else { "fail" }).unwrap();
        s
    }
}

/// Runs `c` once per seed for at most `budget` engine events each and
/// checks the decoded behaviour against `m`.
pub fn simulation_check(m: &ProcessorSystem, c: &CompiledSimulation, seeds: &[u64], budget: usize) -> SimReport {
    let show = |x: &Config| m.render_config(x);
    let mut seen: HashMap<Config, Config> = HashMap::new();
    let (mut c1, mut c23, mut c5, mut c6) = (None, None, None, None);
    let mut conflicts = Vec::new();
    let mut hull_overlaps = Vec::new();
    let (mut sent, mut delivered, mut engine_events) = (0, 0, 0);
    for &seed in seeds {
        let run = c.run(seed, budget);
        sent += run.sent;
        delivered += run.delivered;
        engine_events += run.engine_events;
        if let Some(msg) = &run.conflict {
            conflicts.push((seed, msg.clone()));
        }
        if let Some(l) = &run.lattice {
            if let Err((i, j)) = l.processor_hulls_disjoint(m.n()) {
                hull_overlaps.push((seed, i, j));
            }
        }
        // clause 1: one decoded value never stands for two configurations
        for o in &run.observations {
            let Some(d) = &o.decoded else { continue };
            match seen.get(d) {
                Some(t) if *t != o.truth && c1.is_none() => {
                    c1 = Some(format!(
                        "seed {seed}: [{}] and [{}] both decode to [{}]",
                        show(t),
                        show(&o.truth),
                        show(d)
                    ));
                }
                Some(_) => {}
                None => {
                    seen.insert(d.clone(), o.truth.clone());
                }
            }
        }
        // clauses 2-3: the decoded sequence is a legal execution from the start
        if c23.is_none() {
            let mut prev: Option<&Config> = None;
            for (i, o) in run.observations.iter().enumerate() {
                let Some(d) = &o.decoded else {
                    c23 = Some(format!("seed {seed}: observation {i} does not decode"));
                    break;
                };
                match prev {
                    None if *d != m.initial() => {
                        c23 = Some(format!("seed {seed}: starts at [{}]", show(d)));
                        break;
                    }
                    Some(p) if p != d && !m.is_legal_step(p, d) => {
                        c23 = Some(format!("seed {seed}: illegal step [{}] -> [{}]", show(p), show(d)));
                        break;
                    }
                    _ => {}
                }
                prev = Some(d);
            }
        }
        // clause 5 surrogate: everything sent got delivered within the budget
        if c5.is_none() && run.sent != run.delivered {
            c5 = Some(format!(
                "seed {seed}: {} sent, {} delivered after {} events",
                run.sent, run.delivered, run.engine_events
            ));
        }
        // clause 6: a finished run decodes to a configuration with no steps left
        if c6.is_none() && run.terminal {
            match run.observations.last().and_then(|o| o.decoded.as_ref()) {
                Some(d) if m.enabled(d).is_empty() => {}
                Some(d) => c6 = Some(format!("seed {seed}: terminal run decodes to live [{}]", show(d))),
                None => c6 = Some(format!("seed {seed}: terminal run does not decode")),
            }
        }
    }
    let clauses = vec![
        ClauseResult::new("1", c1),
        ClauseResult::new("2-3", c23),
        ClauseResult {
            clause: "4",
            status: Status::NotChecked,
            witness: Some("needs an explicit configuration set".into()),
        },
        ClauseResult::new("5", c5),
        ClauseResult::new("6", c6),
    ];
    SimReport {
        target: c.target,
        seeds: seeds.to_vec(),
        clauses,
        conflicts,
        hull_overlaps,
        sent,
        delivered,
        engine_events,
    }
}

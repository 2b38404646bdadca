use std::collections::HashMap;

use rand::Rng as _;

use crate::rng;

use super::{DistributedSystem, Gds, LiveView, Match};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Final,
    /// The depth-`n` truncation stayed unchanged for the configured window.
    ConvergedAtTruncation,
    BudgetExhausted,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Final => "final",
            RunStatus::ConvergedAtTruncation => "converged_at_truncation",
            RunStatus::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub max_steps: usize,
    /// `(n, window)`: stop once `[D]_n` is unchanged for `window` steps.
    pub convergence: Option<(usize, usize)>,
}

impl RunConfig {
    pub fn steps(max_steps: usize) -> Self {
        RunConfig {
            max_steps,
            convergence: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub production: usize,
    pub name: String,
    /// Consumed subsystem ids, sorted.
    pub site: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Computation {
    pub steps: Vec<DistributedSystem>,
    pub schedule: Vec<StepRecord>,
    pub status: RunStatus,
}

impl Computation {
    pub fn result(&self) -> &DistributedSystem {
        self.steps.last().expect("a computation has at least D_0")
    }

    /// One `step=<i> production=<name> site=<ids> status=<s>` line per step;
    /// the last line carries the final status, earlier ones `running`.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.schedule.iter().enumerate() {
            let status = if i + 1 == self.schedule.len() {
                self.status.as_str()
            } else {
                "running"
            };
            let site: Vec<String> = r.site.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!(
                "step={} production={} site={} status={}\n",
                i + 1,
                r.name,
                site.join(","),
                status
            ));
        }
        if self.schedule.is_empty() {
            out.push_str(&format!("step=0 production=- site= status={}\n", self.status.as_str()));
        }
        out
    }
}

/// Runs `g` under an oldest-enabled-first scheduler.
///
/// Every `(production, consumed set)` pair remembers the step since which it
/// has been continuously enabled; each step fires one of the oldest, ties
/// broken uniformly by the seeded generator. A pair enabled at step `t` is
/// therefore fired or disabled within `|enabled at t|` steps.
pub fn run_weakly_fair(g: &Gds, seed: u64, cfg: RunConfig) -> Computation {
    let mut rng = rng::derive(seed, 0x6d5);
    let mut d = g.initial.clone();
    let mut steps = vec![d.clone()];
    let mut schedule = Vec::new();
    let mut since: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut stable_for = 0usize;
    let mut last_trunc: Option<Vec<u8>> = None;

    for step in 0..cfg.max_steps {
        let view = LiveView::of(&d);
        let enabled: Vec<(Match, Vec<usize>)> = g
            .enabled_in(&view)
            .into_iter()
            .map(|m| {
                let (_, c) = g.resolve(&view, &m).expect("enumerated match resolves");
                (m, c)
            })
            .collect();
        if enabled.is_empty() {
            return Computation {
                steps,
                schedule,
                status: RunStatus::Final,
            };
        }
        let live: std::collections::HashSet<(usize, Vec<usize>)> = enabled
            .iter()
            .map(|(m, c)| (m.production, c.clone()))
            .collect();
        since.retain(|k, _| live.contains(k));
        for k in live {
            since.entry(k).or_insert(step);
        }
        let oldest = enabled
            .iter()
            .map(|(m, c)| since[&(m.production, c.clone())])
            .min()
            .unwrap();
        let pool: Vec<&(Match, Vec<usize>)> = enabled
            .iter()
            .filter(|(m, c)| since[&(m.production, c.clone())] == oldest)
            .collect();
        let (m, consumed) = pool[rng.gen_range(0..pool.len())];
        d = g.apply(&d, m).expect("enabled match applies");
        schedule.push(StepRecord {
            production: m.production,
            name: g.productions[m.production].name.clone(),
            site: consumed.clone(),
        });
        steps.push(d.clone());

        if let Some((n, window)) = cfg.convergence {
            let t = d.truncate(n).canonical_form();
            if last_trunc.as_ref() == Some(&t) {
                stable_for += 1;
            } else {
                stable_for = 0;
                last_trunc = Some(t);
            }
            if stable_for >= window {
                return Computation {
                    steps,
                    schedule,
                    status: RunStatus::ConvergedAtTruncation,
                };
            }
        }
    }
    let status = if g.is_final(&d) {
        RunStatus::Final
    } else {
        RunStatus::BudgetExhausted
    };
    Computation {
        steps,
        schedule,
        status,
    }
}

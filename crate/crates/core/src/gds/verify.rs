use std::collections::{BTreeMap, HashSet, VecDeque};

use super::{DistributedSystem, Gds, LiveView};

#[derive(Clone, Debug)]
pub struct LdCounterexample {
    /// The explored state where two competing applications diverge.
    pub state: DistributedSystem,
    /// Live subsystems claimed by both applications.
    pub shared: Vec<usize>,
    pub productions: (String, String),
    /// Steps from the initial system to `state`.
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub enum LdVerdict {
    HoldsOnExplored { states: usize, complete: bool },
    Counterexample(Box<LdCounterexample>),
}

impl LdVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LdVerdict::HoldsOnExplored { .. })
    }
}

/// Checks local determinism on every state reachable within the bounds.
///
/// An application claims a set of live subsystems, the parents of whatever
/// it produces. The check requires that any two applications enabled in the
/// same state whose claimed sets intersect lead to isomorphic systems, i.e.
/// the parents of a produced subsystem leave exactly one outcome up to
/// isomorphism, whichever competitor gets to fire.
pub fn is_locally_deterministic(g: &Gds, depth_bound: usize, state_bound: usize) -> LdVerdict {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(g.initial.canonical_form());
    let mut queue = VecDeque::from([(g.initial.clone(), 0usize)]);
    let mut complete = true;
    let mut states = 0;
    while let Some((d, depth)) = queue.pop_front() {
        states += 1;
        let view = LiveView::of(&d);
        let enabled = g.enabled_in(&view);
        if enabled.is_empty() {
            continue;
        }
        if depth >= depth_bound {
            complete = false;
            continue;
        }
        let mut succ = Vec::with_capacity(enabled.len());
        for m in &enabled {
            let (_, consumed) = g.resolve(&view, m).expect("enumerated match resolves");
            let next = g.apply(&d, m).expect("enabled match applies");
            let key = next.canonical_form();
            succ.push((m, consumed, next, key));
        }
        for i in 0..succ.len() {
            for j in i + 1..succ.len() {
                let shared: Vec<usize> = succ[i]
                    .1
                    .iter()
                    .filter(|s| succ[j].1.binary_search(s).is_ok())
                    .copied()
                    .collect();
                if !shared.is_empty() && succ[i].3 != succ[j].3 {
                    return LdVerdict::Counterexample(Box::new(LdCounterexample {
                        state: d,
                        shared,
                        productions: (
                            g.productions[succ[i].0.production].name.clone(),
                            g.productions[succ[j].0.production].name.clone(),
                        ),
                        depth,
                    }));
                }
            }
        }
        for (_, _, next, key) in succ {
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= state_bound {
                complete = false;
                continue;
            }
            seen.insert(key);
            queue.push_back((next, depth + 1));
        }
    }
    LdVerdict::HoldsOnExplored { states, complete }
}

#[derive(Clone, Debug)]
pub enum OracleOutcome {
    /// Every schedule ends in the same system up to isomorphism.
    Unique { result: DistributedSystem, states: usize },
    /// Two schedules end in non-isomorphic final systems.
    NotUnique {
        first: DistributedSystem,
        second: DistributedSystem,
        results: usize,
    },
    /// Some schedule was cut by a bound before becoming final.
    Inconclusive { states: usize },
}

impl OracleOutcome {
    pub fn is_unique(&self) -> bool {
        matches!(self, OracleOutcome::Unique { .. })
    }
}

/// Enumerates every schedule of `g` (modulo isomorphic intermediate
/// systems) and collects the final systems reached.
pub fn unique_result_oracle(g: &Gds, depth_bound: usize, state_bound: usize) -> OracleOutcome {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(g.initial.canonical_form());
    let mut queue = VecDeque::from([(g.initial.clone(), 0usize)]);
    let mut finals: BTreeMap<Vec<u8>, DistributedSystem> = BTreeMap::new();
    let mut cut = false;
    while let Some((d, depth)) = queue.pop_front() {
        let enabled = g.enabled(&d);
        if enabled.is_empty() {
            finals.entry(d.canonical_form()).or_insert(d);
            continue;
        }
        if depth >= depth_bound {
            cut = true;
            continue;
        }
        for m in &enabled {
            let next = g.apply(&d, m).expect("enabled match applies");
            let key = next.canonical_form();
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= state_bound {
                cut = true;
                continue;
            }
            seen.insert(key);
            queue.push_back((next, depth + 1));
        }
    }
    let results = finals.len();
    let mut it = finals.into_values();
    match (it.next(), it.next()) {
        (Some(first), Some(second)) => OracleOutcome::NotUnique {
            first,
            second,
            results,
        },
        _ if cut => OracleOutcome::Inconclusive { states: seen.len() },
        (Some(result), None) => OracleOutcome::Unique {
            result,
            states: seen.len(),
        },
        (None, _) => OracleOutcome::Inconclusive { states: seen.len() },
    }
}

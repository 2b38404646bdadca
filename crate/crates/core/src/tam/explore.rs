use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::Rng as _;

use crate::rng;

use super::{Assembly, Pos, Side, TileAssemblySystem, TEMPERATURE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblySequence {
    pub additions: Vec<(Pos, usize)>,
    pub result: Assembly,
    pub terminal: bool,
}

/// Adds uniformly chosen frontier tiles until none remain or `max_tiles`
/// additions have been made.
pub fn run_assembly(sys: &TileAssemblySystem, seed: u64, max_tiles: usize) -> AssemblySequence {
    let mut rng = rng::derive(seed, 0x7a3);
    let mut a = sys.seed.clone();
    let mut additions = Vec::new();
    loop {
        let f = sys.frontier(&a);
        if f.is_empty() {
            return AssemblySequence {
                additions,
                result: a,
                terminal: true,
            };
        }
        if additions.len() >= max_tiles {
            return AssemblySequence {
                additions,
                result: a,
                terminal: false,
            };
        }
        let (p, t) = f[rng.gen_range(0..f.len())];
        a.tiles.insert(p, t);
        additions.push((p, t));
    }
}

/// Assembly-level state graph explored from the seed.
struct StateGraph {
    states: Vec<Assembly>,
    /// `(from, cell, tile, to)`
    edges: Vec<(usize, Pos, usize, usize)>,
    complete: bool,
}

fn explore(sys: &TileAssemblySystem, state_bound: usize) -> StateGraph {
    let mut index: HashMap<Assembly, usize> = HashMap::new();
    index.insert(sys.seed.clone(), 0);
    let mut g = StateGraph {
        states: vec![sys.seed.clone()],
        edges: Vec::new(),
        complete: true,
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let a = g.states[s].clone();
        for (p, t) in sys.frontier(&a) {
            let mut b = a.clone();
            b.tiles.insert(p, t);
            let to = match index.get(&b) {
                Some(&to) => to,
                None => {
                    if g.states.len() >= state_bound {
                        g.complete = false;
                        continue;
                    }
                    let to = g.states.len();
                    index.insert(b.clone(), to);
                    g.states.push(b);
                    queue.push_back(to);
                    to
                }
            };
            g.edges.push((s, p, t, to));
        }
    }
    g
}

#[derive(Clone, Debug)]
pub struct Terminals {
    pub assemblies: Vec<Assembly>,
    pub states: usize,
    /// `false` if the state bound cut the exploration.
    pub complete: bool,
}

/// Every terminal assembly reachable from the seed, sorted.
pub fn terminal_assemblies(sys: &TileAssemblySystem, state_bound: usize) -> Terminals {
    let g = explore(sys, state_bound);
    let has_out: BTreeSet<usize> = g.edges.iter().map(|e| e.0).collect();
    let mut assemblies: Vec<Assembly> = g
        .states
        .iter()
        .enumerate()
        .filter(|(i, a)| !has_out.contains(i) && sys.is_terminal(a))
        .map(|(_, a)| a.clone())
        .collect();
    assemblies.sort();
    Terminals {
        assemblies,
        states: g.states.len(),
        complete: g.complete,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TamViolation {
    /// Condition (1): an addition bound with more than the minimum strength.
    Overbound { strength: u32 },
    /// Condition (2): with the tile and its OUT-neighbors removed, another
    /// tile type can attach at its cell.
    Alternative { other: usize, in_sides: Vec<Side> },
    /// Condition (3): the explored result is not terminal.
    NotTerminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TamLdVerdict {
    Holds { sequences_result: usize, states: usize },
    Counterexample { site: Pos, tile: usize, violation: TamViolation },
    Inconclusive { states: usize },
}

impl TamLdVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, TamLdVerdict::Holds { .. })
    }
}

/// Checks local determinism over every assembly sequence in the explored
/// state graph.
///
/// A sequence is identified by the terminal it ends in; a transition lies on
/// some sequence ending in terminal `T` iff `T` is reachable from its target.
/// For each such transition the sides the new tile bound through (its IN
/// sides) are recorded; the remaining bonded neighbors in `T` are its
/// OUT-neighbors.
pub fn is_locally_deterministic_tam(sys: &TileAssemblySystem, state_bound: usize) -> TamLdVerdict {
    let g = explore(sys, state_bound);
    if !g.complete {
        return TamLdVerdict::Inconclusive {
            states: g.states.len(),
        };
    }
    // condition (1)
    for &(from, p, t, _) in &g.edges {
        let (s, _) = sys.binding_at(&g.states[from], p, t);
        if s != TEMPERATURE {
            return TamLdVerdict::Counterexample {
                site: p,
                tile: t,
                violation: TamViolation::Overbound { strength: s },
            };
        }
    }
    let n = g.states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_out = vec![false; n];
    for &(from, _, _, to) in &g.edges {
        preds[to].push(from);
        has_out[from] = true;
    }
    let sinks: Vec<usize> = (0..n).filter(|&s| !has_out[s]).collect();
    for &sink in &sinks {
        let result = &g.states[sink];
        // condition (3)
        if !sys.is_terminal(result) {
            let (p, t) = sys.frontier(result)[0];
            return TamLdVerdict::Counterexample {
                site: p,
                tile: t,
                violation: TamViolation::NotTerminal,
            };
        }
        let mut reaches = vec![false; n];
        reaches[sink] = true;
        let mut stack = vec![sink];
        while let Some(s) = stack.pop() {
            for &p in &preds[s] {
                if !reaches[p] {
                    reaches[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut in_sides: BTreeMap<Pos, BTreeSet<Vec<Side>>> = BTreeMap::new();
        for &(from, p, t, to) in &g.edges {
            if reaches[to] {
                let (_, sides) = sys.binding_at(&g.states[from], p, t);
                in_sides.entry(p).or_default().insert(sides);
            }
        }
        // condition (2)
        for (&p, variants) in &in_sides {
            let t0 = result.tiles[&p];
            for ins in variants {
                let mut cut = result.clone();
                cut.tiles.remove(&p);
                for side in Side::ALL {
                    if ins.contains(&side) {
                        continue;
                    }
                    let q = side.step(p);
                    if let Some(u) = result.get(q) {
                        if sys.bond(t0, side, u) > 0 {
                            cut.tiles.remove(&q);
                        }
                    }
                }
                for other in (0..sys.tiles.len()).filter(|&o| o != t0) {
                    if sys.binding_at(&cut, p, other).0 >= TEMPERATURE {
                        return TamLdVerdict::Counterexample {
                            site: p,
                            tile: t0,
                            violation: TamViolation::Alternative {
                                other,
                                in_sides: ins.clone(),
                            },
                        };
                    }
                }
            }
        }
    }
    TamLdVerdict::Holds {
        sequences_result: sinks.len(),
        states: n,
    }
}

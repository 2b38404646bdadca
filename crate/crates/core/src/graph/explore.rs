use std::collections::{HashMap, VecDeque};

use super::{is_stable, Action, GraphAssemblySystem, LabeledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Bfs,
    Dfs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_depth: usize,
    pub max_states: usize,
    pub strategy: Strategy,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_depth: 64,
            max_states: 10_000,
            strategy: Strategy::Bfs,
        }
    }
}

/// The part of the reachable set visited within [`Bounds`], one
/// representative per isomorphism class.
#[derive(Clone, Debug)]
pub struct Exploration {
    /// Representatives in discovery order; index 0 is the initial graph.
    pub states: Vec<LabeledGraph>,
    /// Shortest known distance from the initial graph.
    pub depth: Vec<usize>,
    /// `(from, action, to)` for every explored transition.
    pub transitions: Vec<(usize, Action, usize)>,
    pub truncated_by_depth: bool,
    pub truncated_by_states: bool,
    /// States whose successors were all generated.
    pub expanded: Vec<bool>,
}

impl Exploration {
    pub fn is_complete(&self) -> bool {
        !self.truncated_by_depth && !self.truncated_by_states
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions
            .iter()
            .filter(move |(f, _, _)| *f == s)
            .map(|&(_, _, t)| t)
    }
}

/// Explores the reachable set modulo isomorphism.
///
/// A state already seen is revisited only when reached at a strictly smaller
/// depth, so depth-first search still respects `max_depth` exactly.
pub fn reachable_set(sys: &GraphAssemblySystem, bounds: Bounds) -> Exploration {
    let start = sys.initial_graph();
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    index.insert(start.canonical_form(), 0);
    let mut ex = Exploration {
        states: vec![start],
        depth: vec![0],
        transitions: Vec::new(),
        truncated_by_depth: false,
        truncated_by_states: false,
        expanded: vec![false],
    };
    let mut work: VecDeque<usize> = VecDeque::from([0]);
    let mut seen_edges: std::collections::HashSet<(usize, usize, Action)> = Default::default();

    while let Some(s) = match bounds.strategy {
        Strategy::Bfs => work.pop_front(),
        Strategy::Dfs => work.pop_back(),
    } {
        let d = ex.depth[s];
        let g = ex.states[s].clone();
        let actions = sys.actions(&g);
        if actions.is_empty() {
            ex.expanded[s] = true;
            continue;
        }
        if d >= bounds.max_depth {
            ex.truncated_by_depth = true;
            continue;
        }
        let mut complete = true;
        for act in actions {
            let next = sys.apply(&g, &act).expect("enumerated action applies");
            let key = next.canonical_form();
            let t = match index.get(&key) {
                Some(&t) => {
                    if d + 1 < ex.depth[t] {
                        ex.depth[t] = d + 1;
                        work.push_back(t);
                    }
                    t
                }
                None => {
                    if ex.states.len() >= bounds.max_states {
                        ex.truncated_by_states = true;
                        complete = false;
                        continue;
                    }
                    let t = ex.states.len();
                    index.insert(key, t);
                    ex.states.push(next);
                    ex.depth.push(d + 1);
                    ex.expanded.push(false);
                    work.push_back(t);
                    t
                }
            };
            if seen_edges.insert((s, t, act.clone())) {
                ex.transitions.push((s, act, t));
            }
        }
        ex.expanded[s] = complete;
    }
    ex
}

#[derive(Clone, Debug)]
pub struct Language {
    /// Stable, connected representatives found, in discovery order.
    pub members: Vec<LabeledGraph>,
    /// `true` if exploration finished within bounds, so `members` is the full
    /// language up to isomorphism.
    pub complete: bool,
}

/// `L(G_0, Φ)`: reachable graphs that are stable and connected.
pub fn language(sys: &GraphAssemblySystem, bounds: Bounds) -> Language {
    let ex = reachable_set(sys, bounds);
    let members = ex
        .states
        .iter()
        .filter(|g| g.is_connected() && is_stable(g, &sys.rules))
        .cloned()
        .collect();
    Language {
        members,
        complete: ex.is_complete(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Label, Rule};
    use super::*;

    fn chain_system(n: usize) -> GraphAssemblySystem {
        // a + a -> b-b ; b + a -> b-b once: grows chains, ends when agents run out.
        let r1 = Rule::new(
            "start",
            LabeledGraph::with_labels(["a", "a"]),
            LabeledGraph::from_parts(["e", "e"], [(0, 1)]).unwrap(),
        )
        .unwrap();
        let r2 = Rule::new(
            "grow",
            LabeledGraph::with_labels(["e", "a"]),
            LabeledGraph::from_parts(["m", "e"], [(0, 1)]).unwrap(),
        )
        .unwrap();
        GraphAssemblySystem::new(
            ["a", "e", "m"].map(Label::from),
            LabeledGraph::with_labels(vec!["a"; n]),
            vec![r1, r2],
        )
        .unwrap()
    }

    #[test]
    fn depth_bound_is_reported() {
        let sys = chain_system(6);
        let ex = reachable_set(
            &sys,
            Bounds {
                max_depth: 1,
                ..Bounds::default()
            },
        );
        assert!(ex.truncated_by_depth);
        assert!(ex.depth.iter().all(|&d| d <= 1));
    }

    #[test]
    fn dfs_and_bfs_agree_when_complete() {
        let sys = chain_system(5);
        let b = reachable_set(&sys, Bounds::default());
        let d = reachable_set(
            &sys,
            Bounds {
                strategy: Strategy::Dfs,
                ..Bounds::default()
            },
        );
        assert!(b.is_complete() && d.is_complete());
        let mut kb: Vec<_> = b.states.iter().map(|g| g.canonical_form()).collect();
        let mut kd: Vec<_> = d.states.iter().map(|g| g.canonical_form()).collect();
        kb.sort();
        kd.sort();
        assert_eq!(kb, kd);
    }
}

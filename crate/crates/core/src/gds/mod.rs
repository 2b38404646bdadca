//! Grammars for distributed systems.
//!
//! A [`DistributedSystem`] is a hypergraph whose hyperedges ("subsystems") are
//! processes, bonds and events, partially ordered by causality. A [`Gds`]
//! rewrites the live part of such a system (processes and bonds without a
//! successor) while keeping every consumed subsystem and every event as
//! history, which is what depth, truncation and the ultrametric act on.

mod embed;
mod run;
mod system;
mod verify;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{find_embeddings, Embedding, GraphError, LabeledGraph, Orientation};

pub use embed::{embed_gas, psi, starred, PsiMap};
pub use run::{run_weakly_fair, Computation, RunConfig, RunStatus, StepRecord};
pub use system::{distance, DistributedSystem, Distance, Kind, Subsystem};
pub use verify::{
    is_locally_deterministic, unique_result_oracle, LdCounterexample, LdVerdict, OracleOutcome,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GdsError {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("subsystem {0} does not exist or does not precede its child")]
    UnknownSubsystem(usize),
    #[error("rule `{0}` has no orientation")]
    OrientationMissing(String),
    #[error("production `{production}`: {reason}")]
    BadProduction { production: String, reason: String },
    #[error("name `{0}` is used both as an event and as a process")]
    NameClash(String),
    #[error("name `{0}` is not declared")]
    UndeclaredName(String),
    #[error("initial system contains events")]
    InitialHasEvents,
    #[error("match site does not witness the production")]
    InvalidMatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Label of every bond subsystem.
pub const BOND_LABEL: &str = "bond";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GdsAlphabet {
    pub events: BTreeSet<String>,
    pub processes: BTreeSet<String>,
}

/// `(ψ(L), L* ↦ ψ(R))`, stored as the pattern graphs over process names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub name: String,
    pub event: String,
    pub left: LabeledGraph,
    pub right: LabeledGraph,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gds {
    pub alphabet: GdsAlphabet,
    pub initial: DistributedSystem,
    pub productions: Vec<Production>,
    /// Arity of every process.
    pub ports: usize,
}

/// Image of each left-side vertex: a live process subsystem id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(pub Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub production: usize,
    pub site: Site,
}

/// The live processes and bonds of a system, read as a labeled graph.
#[derive(Clone, Debug)]
pub struct LiveView {
    pub graph: LabeledGraph,
    /// Vertex index to process subsystem id.
    pub procs: Vec<usize>,
    /// `(u, v)` with `u < v` to the bond subsystem joining them.
    pub bonds: BTreeMap<(usize, usize), usize>,
}

impl LiveView {
    pub fn of(d: &DistributedSystem) -> LiveView {
        let mut graph = LabeledGraph::new();
        let mut procs = Vec::new();
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (s, sub) in d.subsystems().iter().enumerate() {
            if sub.kind == Kind::Process && d.is_live(s) {
                let v = graph.add_vertex(sub.label.as_str());
                procs.push(s);
                for &n in &sub.attach {
                    owner.insert(n, v);
                }
            }
        }
        let mut bonds = BTreeMap::new();
        for (s, sub) in d.subsystems().iter().enumerate() {
            if sub.kind != Kind::Bond || !d.is_live(s) {
                continue;
            }
            let ends: Vec<usize> = sub.attach.iter().filter_map(|n| owner.get(n).copied()).collect();
            if let [a, b] = ends[..] {
                if a != b {
                    let key = (a.min(b), a.max(b));
                    if graph.add_edge(a, b).is_ok() {
                        bonds.entry(key).or_insert(s);
                    }
                }
            }
        }
        LiveView { graph, procs, bonds }
    }

    fn vertex_of(&self, proc_id: usize) -> Option<usize> {
        self.procs.binary_search(&proc_id).ok()
    }
}

impl Gds {
    pub fn new(
        alphabet: GdsAlphabet,
        initial: DistributedSystem,
        productions: Vec<Production>,
        ports: usize,
    ) -> Result<Self, GdsError> {
        if let Some(n) = alphabet.events.intersection(&alphabet.processes).next() {
            return Err(GdsError::NameClash(n.clone()));
        }
        if initial.has_events() {
            return Err(GdsError::InitialHasEvents);
        }
        for sub in initial.subsystems() {
            if sub.kind == Kind::Process && !alphabet.processes.contains(&sub.label) {
                return Err(GdsError::UndeclaredName(sub.label.clone()));
            }
        }
        for p in &productions {
            let bad = |reason: String| GdsError::BadProduction {
                production: p.name.clone(),
                reason,
            };
            if !alphabet.events.contains(&p.event) {
                return Err(GdsError::UndeclaredName(p.event.clone()));
            }
            if p.left.vertex_count() != p.right.vertex_count() {
                return Err(bad("sides have different vertex counts".into()));
            }
            for l in p.left.labels().iter().chain(p.right.labels()) {
                if !alphabet.processes.contains(l.as_str()) {
                    return Err(GdsError::UndeclaredName(l.0.clone()));
                }
            }
            for (a, b) in p.right.edges() {
                match p.orientation.right.get(&(a, b)) {
                    Some(&(i, j)) if i as usize <= ports && j as usize <= ports => {}
                    Some(_) => return Err(bad(format!("slot of edge {a}-{b} exceeds {ports} ports"))),
                    None => return Err(bad(format!("edge {a}-{b} has no slots"))),
                }
            }
        }
        Ok(Gds {
            alphabet,
            initial,
            productions,
            ports,
        })
    }

    /// Every applicable `(production, site)`, ordered by production index
    /// then site.
    pub fn enabled(&self, d: &DistributedSystem) -> Vec<Match> {
        let view = LiveView::of(d);
        self.enabled_in(&view)
    }

    pub(crate) fn enabled_in(&self, view: &LiveView) -> Vec<Match> {
        let mut out = Vec::new();
        for (i, p) in self.productions.iter().enumerate() {
            for emb in find_embeddings(&p.left, &view.graph) {
                let site = Site(emb.map.iter().map(|&v| view.procs[v]).collect());
                out.push(Match {
                    production: i,
                    site,
                });
            }
        }
        out
    }

    pub fn is_final(&self, d: &DistributedSystem) -> bool {
        let view = LiveView::of(d);
        self.productions
            .iter()
            .all(|p| find_embeddings(&p.left, &view.graph).is_empty())
    }

    /// Live subsystems a match would consume: its processes and the bonds
    /// matched by the left side's edges, sorted.
    pub fn consumed(&self, d: &DistributedSystem, m: &Match) -> Result<Vec<usize>, GdsError> {
        let view = LiveView::of(d);
        let (_, consumed) = self.resolve(&view, m)?;
        Ok(consumed)
    }

    pub(crate) fn resolve(&self, view: &LiveView, m: &Match) -> Result<(Embedding, Vec<usize>), GdsError> {
        let p = self.productions.get(m.production).ok_or(GdsError::InvalidMatch)?;
        let map: Option<Vec<usize>> = m.site.0.iter().map(|&s| view.vertex_of(s)).collect();
        let emb = Embedding {
            map: map.ok_or(GdsError::InvalidMatch)?,
        };
        if !emb.is_valid(&p.left, &view.graph) {
            return Err(GdsError::InvalidMatch);
        }
        let mut consumed = m.site.0.clone();
        for (a, b) in p.left.edges() {
            let (u, v) = (emb.map[a], emb.map[b]);
            consumed.push(view.bonds[&(u.min(v), u.max(v))]);
        }
        consumed.sort_unstable();
        Ok((emb, consumed))
    }

    /// Replaces the matched processes and bonds by an event and the
    /// right-side fragment caused by it.
    pub fn apply(&self, d: &DistributedSystem, m: &Match) -> Result<DistributedSystem, GdsError> {
        let view = LiveView::of(d);
        let (emb, consumed) = self.resolve(&view, m)?;
        let p = &self.productions[m.production];
        let mut out = d.clone();
        let ports: Vec<Vec<usize>> = m
            .site
            .0
            .iter()
            .map(|&s| d.subsystem(s).attach.clone())
            .collect();
        let event_attach: Vec<usize> = ports.iter().flatten().copied().collect();
        let event = out.add_subsystem(Kind::Event, p.event.clone(), event_attach, consumed)?;
        for (x, attach) in ports.iter().enumerate() {
            out.add_subsystem(Kind::Process, p.right.label(x).as_str(), attach.clone(), vec![event])?;
        }
        for (a, b) in p.right.edges() {
            let (u, v) = (emb.map[a], emb.map[b]);
            let kept = view.graph.has_edge(u, v) && !p.left.has_edge(a, b);
            if kept {
                continue;
            }
            let (i, j) = p.orientation.right[&(a, b)];
            let attach = vec![ports[a][i as usize - 1], ports[b][j as usize - 1]];
            out.add_subsystem(Kind::Bond, BOND_LABEL, attach, vec![event])?;
        }
        Ok(out)
    }
}

/// Reads a parsed production list into a [`Gds`] whose initial system is
/// built from a labeled graph with default slot numbering.
pub fn gds_from_parts(
    alphabet: GdsAlphabet,
    initial: &LabeledGraph,
    productions: Vec<Production>,
    ports: usize,
) -> Result<Gds, GdsError> {
    let ports = ports.max(max_graph_degree(initial)).max(1);
    let (d, _) = psi(initial, ports);
    Gds::new(alphabet, d, productions, ports)
}

pub(crate) fn max_graph_degree(g: &LabeledGraph) -> usize {
    (0..g.vertex_count()).map(|v| g.degree(v)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Rule;

    fn production(name: &str, left: LabeledGraph, right: LabeledGraph) -> Production {
        let rule = Rule::new(name, left, right).unwrap();
        let orientation = rule.default_orientation();
        Production {
            name: name.into(),
            event: format!("{name}*"),
            left: rule.left,
            right: rule.right,
            orientation,
        }
    }

    fn alphabet(events: &[&str], procs: &[&str]) -> GdsAlphabet {
        GdsAlphabet {
            events: events.iter().map(|s| s.to_string()).collect(),
            processes: procs.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn relabel_identity_records_one_event() {
        let g = LabeledGraph::with_labels(["a"]);
        let p = production("r", g.clone(), g.clone());
        let gds = gds_from_parts(alphabet(&["r*"], &["a"]), &g, vec![p], 1).unwrap();
        let m = gds.enabled(&gds.initial).remove(0);
        let d = gds.apply(&gds.initial, &m).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.subsystems().iter().filter(|s| s.kind == Kind::Event).count(), 1);
        assert_eq!(LiveView::of(&d).graph.canonical_form(), g.canonical_form());
    }

    #[test]
    fn bonding_creates_a_bond() {
        let g = LabeledGraph::with_labels(["a", "b"]);
        let right = LabeledGraph::from_parts(["c", "c"], [(0, 1)]).unwrap();
        let p = production("r", g.clone(), right.clone());
        let gds = gds_from_parts(alphabet(&["r*"], &["a", "b", "c"]), &g, vec![p], 1).unwrap();
        let m = gds.enabled(&gds.initial).remove(0);
        let d = gds.apply(&gds.initial, &m).unwrap();
        assert_eq!(LiveView::of(&d).graph, right);
        assert!(gds.is_final(&d));
        assert_eq!(gds.apply(&d, &m), Err(GdsError::InvalidMatch));
    }

    #[test]
    fn initial_events_rejected() {
        let mut d = DistributedSystem::new();
        d.add_subsystem(Kind::Event, "e", vec![], vec![]).unwrap();
        let err = Gds::new(alphabet(&["e"], &[]), d, vec![], 1);
        assert_eq!(err, Err(GdsError::InitialHasEvents));
    }

    #[test]
    fn clashing_names_rejected() {
        let err = Gds::new(alphabet(&["x"], &["x"]), DistributedSystem::new(), vec![], 1);
        assert_eq!(err, Err(GdsError::NameClash("x".into())));
    }
}

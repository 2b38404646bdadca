//! Labeled-graph rewriting for graph assembly systems.
//!
//! Vertices are agents, edges are bonds, labels are conformations. A rule
//! `(L, R)` shares its vertex set between both sides; applying it through an
//! embedding `h` deletes the images of `L`'s edges, adds the images of `R`'s
//! edges and relabels the image vertices by `R`. Vertices are never created
//! or destroyed, so free agents must already be present in the initial graph
//! (see [`GraphAssemblySystem::supply`]).

mod explore;
mod matching;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::canon::ColoredGraph;

pub use explore::{language, reachable_set, Bounds, Exploration, Language, Strategy};
pub use matching::find_embeddings;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("label `{0}` is not in the alphabet")]
    UndeclaredLabel(String),
    #[error("rule `{0}`: left and right sides have different vertex counts")]
    VertexSetMismatch(String),
    #[error("rule `{rule}`: bad orientation: {reason}")]
    BadOrientation { rule: String, reason: String },
    #[error("embedding does not witness applicability of the rule")]
    InvalidEmbedding,
}

/// A symbol from a system's declared alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// Simple undirected graph on vertices `0..n` with a total labeling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabeledGraph {
    labels: Vec<Label>,
    adj: Vec<BTreeSet<usize>>,
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_labels<I, L>(labels: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<Label>,
    {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let adj = vec![BTreeSet::new(); labels.len()];
        LabeledGraph { labels, adj }
    }

    /// Builds a graph and validates every edge.
    pub fn from_parts<L: Into<Label>>(
        labels: impl IntoIterator<Item = L>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::with_labels(labels);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: impl Into<Label>) -> usize {
        self.labels.push(label.into());
        self.adj.push(BTreeSet::new());
        self.labels.len() - 1
    }

    /// Inserts `{a, b}`. Duplicate insertions are idempotent.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        let n = self.labels.len();
        if a >= n {
            return Err(GraphError::VertexOutOfRange(a));
        }
        if b >= n {
            return Err(GraphError::VertexOutOfRange(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        if a < self.adj.len() && b < self.adj.len() {
            self.adj[a].remove(&b);
            self.adj[b].remove(&a);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn label(&self, v: usize) -> &Label {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<Label>) {
        self.labels[v] = label.into();
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(&b))
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn to_colored(&self) -> ColoredGraph {
        let mut cg = ColoredGraph::new();
        for l in &self.labels {
            cg.add_vertex(l.0.as_bytes());
        }
        for (a, b) in self.edges() {
            cg.add_undirected(a, b, 0);
        }
        cg
    }

    /// Equal iff the graphs are isomorphic respecting labels.
    pub fn canonical_form(&self) -> Vec<u8> {
        self.to_colored().canonical_bytes()
    }

    /// Line-oriented dump used by the CLI: `vertex <i> <label>` then `edge <a> <b>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            s.push_str(&format!("vertex {i} {l}\n"));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("edge {a} {b}\n"));
        }
        s
    }
}

/// Equal iff `g` and `h` are isomorphic respecting labels.
pub fn canonical_form(g: &LabeledGraph) -> Vec<u8> {
    g.canonical_form()
}

/// Slot numbering of edge endpoints, keyed by `(a, b)` with `a < b`;
/// the value holds the slot at `a` and the slot at `b` (1-based).
pub type SlotMap = BTreeMap<(usize, usize), (u32, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Orientation {
    pub left: SlotMap,
    pub right: SlotMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub left: LabeledGraph,
    pub right: LabeledGraph,
    pub orientation: Option<Orientation>,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        left: LabeledGraph,
        right: LabeledGraph,
    ) -> Result<Self, GraphError> {
        let name = name.into();
        if left.vertex_count() != right.vertex_count() {
            return Err(GraphError::VertexSetMismatch(name));
        }
        Ok(Rule {
            name,
            left,
            right,
            orientation: None,
        })
    }

    pub fn with_orientation(mut self, o: Orientation) -> Result<Self, GraphError> {
        for (side, g, slots) in [("left", &self.left, &o.left), ("right", &self.right, &o.right)] {
            let bad = |reason: String| GraphError::BadOrientation {
                rule: self.name.clone(),
                reason: format!("{side}: {reason}"),
            };
            let mut used: BTreeSet<(usize, u32)> = BTreeSet::new();
            for (&(a, b), &(sa, sb)) in slots {
                if !g.has_edge(a, b) {
                    return Err(bad(format!("no edge {a}-{b}")));
                }
                if sa == 0 || sb == 0 {
                    return Err(bad("slots are 1-based".into()));
                }
                if !used.insert((a, sa)) || !used.insert((b, sb)) {
                    return Err(bad(format!("slot reused at edge {a}-{b}")));
                }
            }
        }
        self.orientation = Some(o);
        Ok(self)
    }

    /// Largest vertex degree on either side.
    pub fn max_degree(&self) -> usize {
        (0..self.left.vertex_count())
            .map(|v| self.left.degree(v).max(self.right.degree(v)))
            .max()
            .unwrap_or(0)
    }

    /// Assigns the lowest free slot to every endpoint, edges in lexicographic order.
    pub fn default_orientation(&self) -> Orientation {
        fn assign(g: &LabeledGraph) -> SlotMap {
            let mut next = vec![1u32; g.vertex_count()];
            let mut m = SlotMap::new();
            for (a, b) in g.edges() {
                m.insert((a, b), (next[a], next[b]));
                next[a] += 1;
                next[b] += 1;
            }
            m
        }
        Orientation {
            left: assign(&self.left),
            right: assign(&self.right),
        }
    }

    /// The rule with sides swapped (and orientation swapped with them).
    pub fn inverse(&self) -> Rule {
        Rule {
            name: format!("{}^-1", self.name),
            left: self.right.clone(),
            right: self.left.clone(),
            orientation: self.orientation.as_ref().map(|o| Orientation {
                left: o.right.clone(),
                right: o.left.clone(),
            }),
        }
    }
}

/// Injective, edge- and label-preserving vertex map from a rule's left side.
/// `map[x]` is the image of left-side vertex `x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn is_valid(&self, pattern: &LabeledGraph, target: &LabeledGraph) -> bool {
        if self.map.len() != pattern.vertex_count() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for (x, &gx) in self.map.iter().enumerate() {
            if gx >= target.vertex_count() || !seen.insert(gx) {
                return false;
            }
            if pattern.label(x) != target.label(gx) {
                return false;
            }
        }
        pattern
            .edges()
            .all(|(a, b)| target.has_edge(self.map[a], self.map[b]))
    }
}

/// A rule (by index into a rule list) together with an embedding witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub rule: usize,
    pub embedding: Embedding,
}

/// Applies `rule` to `g` through `emb`.
pub fn apply_action(
    g: &LabeledGraph,
    rule: &Rule,
    emb: &Embedding,
) -> Result<LabeledGraph, GraphError> {
    if !emb.is_valid(&rule.left, g) {
        return Err(GraphError::InvalidEmbedding);
    }
    let mut out = g.clone();
    for (a, b) in rule.left.edges() {
        out.remove_edge(emb.map[a], emb.map[b]);
    }
    for (a, b) in rule.right.edges() {
        out.add_edge(emb.map[a], emb.map[b])?;
    }
    for (x, &gx) in emb.map.iter().enumerate() {
        out.set_label(gx, rule.right.label(x).clone());
    }
    Ok(out)
}

/// Every applicable `(rule, embedding)` pair, ordered by rule index then embedding.
pub fn applicable_actions(g: &LabeledGraph, rules: &[Rule]) -> Vec<Action> {
    rules
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            find_embeddings(&r.left, g)
                .into_iter()
                .map(move |embedding| Action { rule: i, embedding })
        })
        .collect()
}

pub fn is_stable(g: &LabeledGraph, rules: &[Rule]) -> bool {
    rules.iter().all(|r| !matching::has_embedding(&r.left, g))
}

/// `(G_0, Φ)` plus an alphabet and an optional free-agent supply.
///
/// The supply stands in for an unbounded initial graph: each `(label, count)`
/// entry adds `count` isolated vertices with that label when the initial
/// graph is materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAssemblySystem {
    pub alphabet: BTreeSet<Label>,
    pub initial: LabeledGraph,
    pub rules: Vec<Rule>,
    pub supply: Vec<(Label, usize)>,
}

impl GraphAssemblySystem {
    pub fn new(
        alphabet: impl IntoIterator<Item = Label>,
        initial: LabeledGraph,
        rules: Vec<Rule>,
    ) -> Result<Self, GraphError> {
        let sys = GraphAssemblySystem {
            alphabet: alphabet.into_iter().collect(),
            initial,
            rules,
            supply: Vec::new(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_supply(mut self, label: impl Into<Label>, count: usize) -> Result<Self, GraphError> {
        let label = label.into();
        if !self.alphabet.contains(&label) {
            return Err(GraphError::UndeclaredLabel(label.0));
        }
        self.supply.push((label, count));
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let check = |g: &LabeledGraph| {
            g.labels()
                .iter()
                .find(|l| !self.alphabet.contains(*l))
                .map_or(Ok(()), |l| Err(GraphError::UndeclaredLabel(l.0.clone())))
        };
        check(&self.initial)?;
        for r in &self.rules {
            check(&r.left)?;
            check(&r.right)?;
            if r.left.vertex_count() != r.right.vertex_count() {
                return Err(GraphError::VertexSetMismatch(r.name.clone()));
            }
        }
        for (l, _) in &self.supply {
            if !self.alphabet.contains(l) {
                return Err(GraphError::UndeclaredLabel(l.0.clone()));
            }
        }
        Ok(())
    }

    /// The initial graph with the free-agent supply appended.
    pub fn initial_graph(&self) -> LabeledGraph {
        let mut g = self.initial.clone();
        for (label, count) in &self.supply {
            for _ in 0..*count {
                g.add_vertex(label.clone());
            }
        }
        g
    }

    /// Fills in default slot numbering on every rule lacking one.
    pub fn auto_orient(mut self) -> Self {
        for r in &mut self.rules {
            if r.orientation.is_none() {
                r.orientation = Some(r.default_orientation());
            }
        }
        self
    }

    pub fn actions(&self, g: &LabeledGraph) -> Vec<Action> {
        applicable_actions(g, &self.rules)
    }

    pub fn apply(&self, g: &LabeledGraph, act: &Action) -> Result<LabeledGraph, GraphError> {
        let rule = self.rules.get(act.rule).ok_or(GraphError::InvalidEmbedding)?;
        apply_action(g, rule, &act.embedding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(labels: &[&str]) -> LabeledGraph {
        let edges: Vec<(usize, usize)> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        LabeledGraph::from_parts(labels.iter().copied(), edges).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = LabeledGraph::with_labels(["a", "b"]);
        assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
        assert_eq!(g.add_edge(0, 5), Err(GraphError::VertexOutOfRange(5)));
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn identity_rule_leaves_graph_unchanged() {
        let g = path(&["a", "b", "a"]);
        let side = path(&["a", "b"]);
        let rule = Rule::new("id", side.clone(), side).unwrap();
        for emb in find_embeddings(&rule.left, &g) {
            assert_eq!(apply_action(&g, &rule, &emb).unwrap(), g);
        }
    }

    #[test]
    fn two_isolated_vertices_bond() {
        let g = LabeledGraph::with_labels(["a", "b"]);
        let left = LabeledGraph::with_labels(["a", "b"]);
        let right = LabeledGraph::from_parts(["c", "c"], [(0, 1)]).unwrap();
        let rule = Rule::new("bond", left, right).unwrap();
        let embs = find_embeddings(&rule.left, &g);
        assert_eq!(embs.len(), 1);
        let out = apply_action(&g, &rule, &embs[0]).unwrap();
        assert_eq!(out, LabeledGraph::from_parts(["c", "c"], [(0, 1)]).unwrap());
    }

    #[test]
    fn stale_embedding_is_rejected() {
        let g = LabeledGraph::with_labels(["a"]);
        let rule = Rule::new(
            "r",
            LabeledGraph::with_labels(["b"]),
            LabeledGraph::with_labels(["c"]),
        )
        .unwrap();
        let emb = Embedding { map: vec![0] };
        assert_eq!(apply_action(&g, &rule, &emb), Err(GraphError::InvalidEmbedding));
    }

    #[test]
    fn empty_rules_mean_stable() {
        assert!(is_stable(&path(&["a", "b"]), &[]));
    }

    #[test]
    fn applicable_identity_rule_means_unstable() {
        let g = path(&["a", "b"]);
        let rule = Rule::new("id", g.clone(), g.clone()).unwrap();
        assert!(!is_stable(&g, &[rule]));
    }

    #[test]
    fn one_action_per_matching_vertex() {
        let g = LabeledGraph::from_parts(["a", "a", "b", "a"], [(0, 2)]).unwrap();
        let rule = Rule::new(
            "r",
            LabeledGraph::with_labels(["a"]),
            LabeledGraph::with_labels(["c"]),
        )
        .unwrap();
        assert_eq!(applicable_actions(&g, &[rule]).len(), 3);
        let none = Rule::new(
            "q",
            LabeledGraph::with_labels(["z"]),
            LabeledGraph::with_labels(["z"]),
        )
        .unwrap();
        assert!(applicable_actions(&g, &[none]).is_empty());
    }

    #[test]
    fn orientation_validation() {
        let side = path(&["a", "b"]);
        let rule = Rule::new("r", side.clone(), side).unwrap();
        let mut o = rule.default_orientation();
        assert!(rule.clone().with_orientation(o.clone()).is_ok());
        o.left.insert((0, 1), (0, 1));
        assert!(rule.clone().with_orientation(o.clone()).is_err());
        o.left.clear();
        o.left.insert((0, 1), (1, 1));
        o.right.insert((0, 1), (1, 1));
        assert!(rule.with_orientation(o).is_ok());
    }

    #[test]
    fn undeclared_labels_are_rejected() {
        let err = GraphAssemblySystem::new([Label::from("a")], path(&["a", "b"]), vec![]);
        assert_eq!(err, Err(GraphError::UndeclaredLabel("b".into())));
    }

    #[test]
    fn canonical_form_distinguishes_labels() {
        assert_eq!(path(&["a", "b", "c"]).canonical_form(), path(&["c", "b", "a"]).canonical_form());
        assert_ne!(path(&["a", "b", "c"]).canonical_form(), path(&["b", "a", "c"]).canonical_form());
    }
}

use std::cmp::Ordering;
use std::fmt;

use crate::canon::ColoredGraph;

use super::GdsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Process,
    /// A link between two ports, the image of a graph edge.
    Bond,
    Event,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Process => "P",
            Kind::Bond => "B",
            Kind::Event => "E",
        }
    }
}

/// A hyperedge: `attach[i]` is the node at port `i`; `parents` are the
/// immediate predecessors in the causal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub kind: Kind,
    pub label: String,
    pub attach: Vec<usize>,
    pub parents: Vec<usize>,
}

/// `(N, S, f, l, ≤)` with `≤` stored as its covering relation.
///
/// Subsystem ids are topologically ordered: every parent id is smaller than
/// its child's id, so `≤` is a partial order by construction and every
/// subsystem has finitely many predecessors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DistributedSystem {
    nodes: usize,
    subs: Vec<Subsystem>,
    children: Vec<Vec<usize>>,
}

impl DistributedSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    pub fn add_nodes(&mut self, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.add_node()).collect()
    }

    pub fn add_subsystem(
        &mut self,
        kind: Kind,
        label: impl Into<String>,
        attach: Vec<usize>,
        mut parents: Vec<usize>,
    ) -> Result<usize, GdsError> {
        let id = self.subs.len();
        if let Some(&n) = attach.iter().find(|&&n| n >= self.nodes) {
            return Err(GdsError::UnknownNode(n));
        }
        parents.sort_unstable();
        parents.dedup();
        if let Some(&p) = parents.iter().find(|&&p| p >= id) {
            return Err(GdsError::UnknownSubsystem(p));
        }
        for &p in &parents {
            self.children[p].push(id);
        }
        self.subs.push(Subsystem {
            kind,
            label: label.into(),
            attach,
            parents,
        });
        self.children.push(Vec::new());
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn subsystem(&self, s: usize) -> &Subsystem {
        &self.subs[s]
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subs
    }

    pub fn children(&self, s: usize) -> &[usize] {
        &self.children[s]
    }

    pub fn has_events(&self) -> bool {
        self.subs.iter().any(|s| s.kind == Kind::Event)
    }

    /// Processes and bonds with no successor.
    pub fn is_live(&self, s: usize) -> bool {
        self.subs[s].kind != Kind::Event && self.children[s].is_empty()
    }

    /// `a ≤ b` (reflexive).
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        if a > b {
            return false;
        }
        let mut stack = vec![b];
        let mut seen = vec![false; self.subs.len()];
        while let Some(x) = stack.pop() {
            for &p in &self.subs[x].parents {
                if p == a {
                    return true;
                }
                if p > a && !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        false
    }

    /// Longest predecessor chain length for every subsystem.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.subs.len()];
        for s in 0..self.subs.len() {
            d[s] = self.subs[s].parents.iter().map(|&p| d[p] + 1).max().unwrap_or(0);
        }
        d
    }

    pub fn depth(&self, s: usize) -> usize {
        self.depths()[s]
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.depths().into_iter().max()
    }

    /// `[D]_n`: subsystems of depth `< n`, the nodes they attach to, and the
    /// restricted attachment, labeling and order. Ids are renumbered in order.
    pub fn truncate(&self, n: usize) -> DistributedSystem {
        let depths = self.depths();
        let mut sub_map = vec![usize::MAX; self.subs.len()];
        let mut node_map = vec![usize::MAX; self.nodes];
        let mut kept_nodes = 0;
        for (s, sub) in self.subs.iter().enumerate() {
            if depths[s] < n {
                for &v in &sub.attach {
                    if node_map[v] == usize::MAX {
                        node_map[v] = 0;
                    }
                }
            }
        }
        for slot in node_map.iter_mut().filter(|m| **m == 0) {
            *slot = kept_nodes;
            kept_nodes += 1;
        }
        let mut out = DistributedSystem {
            nodes: kept_nodes,
            ..Default::default()
        };
        for (s, sub) in self.subs.iter().enumerate() {
            if depths[s] >= n {
                continue;
            }
            let attach = sub.attach.iter().map(|&v| node_map[v]).collect();
            // depth is monotone along ≤, so every parent is kept
            let parents = sub.parents.iter().map(|&p| sub_map[p]).collect();
            sub_map[s] = out
                .add_subsystem(sub.kind, sub.label.clone(), attach, parents)
                .expect("truncation preserves well-formedness");
        }
        out
    }

    pub fn to_colored(&self) -> ColoredGraph {
        let mut cg = ColoredGraph::new();
        for _ in 0..self.nodes {
            cg.add_vertex("N");
        }
        for sub in &self.subs {
            let v = cg.add_vertex(format!("{}:{}", sub.kind.tag(), sub.label));
            for (i, &n) in sub.attach.iter().enumerate() {
                // bond endpoints are unordered
                let port = if sub.kind == Kind::Bond { 1 } else { i as u32 + 1 };
                cg.add_edge(v, n, port);
            }
        }
        for (s, sub) in self.subs.iter().enumerate() {
            for &p in &sub.parents {
                cg.add_edge(self.nodes + p, self.nodes + s, 0);
            }
        }
        cg
    }

    /// Equal iff the systems are isomorphic (nodes, subsystems, ports, labels
    /// and causal order all respected).
    pub fn canonical_form(&self) -> Vec<u8> {
        self.to_colored().canonical_bytes()
    }

    pub fn is_isomorphic(&self, other: &DistributedSystem) -> bool {
        self.len() == other.len()
            && self.nodes == other.nodes
            && self.canonical_form() == other.canonical_form()
    }

    /// Line-oriented dump: one `sub` line per subsystem.
    pub fn dump(&self) -> String {
        let mut s = format!("nodes {}\n", self.nodes);
        for (i, sub) in self.subs.iter().enumerate() {
            let join = |v: &[usize]| {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            };
            s.push_str(&format!(
                "sub {i} kind={} label={} attach={} parents={}\n",
                sub.kind.tag(),
                sub.label,
                join(&sub.attach),
                join(&sub.parents)
            ));
        }
        s
    }
}

/// Exact value of the ultrametric: `Zero` or `2^-n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    InvPow2(u32),
}

impl Distance {
    pub fn to_f64(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::InvPow2(n) => 0.5f64.powi(n as i32),
        }
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            // larger exponent, smaller value
            (Distance::InvPow2(a), Distance::InvPow2(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::InvPow2(n) => write!(f, "2^-{n}"),
        }
    }
}

/// `2^-max{n : [D1]_n ≅ [D2]_n}`, or zero when the truncations agree at
/// every depth.
pub fn distance(a: &DistributedSystem, b: &DistributedSystem) -> Distance {
    // Agreement is downward closed in n, and beyond the deeper system's
    // max depth every truncation is the whole system.
    let top = a.max_depth().max(b.max_depth()).map_or(0, |d| d + 1);
    if a.is_isomorphic(b) {
        return Distance::Zero;
    }
    let mut last = 0;
    for n in 1..=top {
        if a.truncate(n).is_isomorphic(&b.truncate(n)) {
            last = n;
        } else {
            break;
        }
    }
    Distance::InvPow2(last as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(len: usize) -> DistributedSystem {
        let mut d = DistributedSystem::new();
        let n = d.add_node();
        let mut prev: Option<usize> = None;
        for i in 0..len {
            let kind = if i % 2 == 0 { Kind::Process } else { Kind::Event };
            prev = Some(
                d.add_subsystem(kind, "x", vec![n], prev.into_iter().collect())
                    .unwrap(),
            );
        }
        d
    }

    #[test]
    fn depth_of_chain() {
        let d = chain(3);
        assert_eq!(d.depths(), vec![0, 1, 2]);
    }

    #[test]
    fn truncate_extremes() {
        let d = chain(4);
        assert!(d.truncate(0).is_empty());
        assert_eq!(d.truncate(0).node_count(), 0);
        assert_eq!(d.truncate(4), d);
        assert_eq!(d.truncate(2).len(), 2);
    }

    #[test]
    fn parents_must_precede() {
        let mut d = DistributedSystem::new();
        assert_eq!(
            d.add_subsystem(Kind::Process, "p", vec![], vec![0]),
            Err(GdsError::UnknownSubsystem(0))
        );
        assert_eq!(
            d.add_subsystem(Kind::Process, "p", vec![3], vec![]),
            Err(GdsError::UnknownNode(3))
        );
    }

    #[test]
    fn distance_examples() {
        let d = chain(4);
        assert_eq!(distance(&d, &d), Distance::Zero);
        let mut e = chain(4);
        let n = e.add_node();
        e.add_subsystem(Kind::Process, "y", vec![n], vec![3]).unwrap();
        // agree up to depth 4, differ at the depth-4 subsystem
        assert_eq!(distance(&d, &e), Distance::InvPow2(4));
    }

    #[test]
    fn distance_order() {
        assert!(Distance::Zero < Distance::InvPow2(9));
        assert!(Distance::InvPow2(3) < Distance::InvPow2(2));
    }

    #[test]
    fn precedes_is_transitive() {
        let d = chain(4);
        assert!(d.precedes(0, 3));
        assert!(!d.precedes(3, 0));
        assert!(d.precedes(2, 2));
    }
}

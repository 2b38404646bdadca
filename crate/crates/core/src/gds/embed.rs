use std::collections::BTreeMap;

use crate::graph::{GraphAssemblySystem, Label, LabeledGraph};

use super::{max_graph_degree, DistributedSystem, Gds, GdsAlphabet, GdsError, Kind, Production, BOND_LABEL};

/// Vertex index of the source graph to the process subsystem representing it.
pub type PsiMap = Vec<usize>;

pub(crate) fn process_name(l: &Label) -> String {
    format!("{}*", l.0)
}

pub fn starred(g: &LabeledGraph) -> LabeledGraph {
    let mut out = g.clone();
    for v in 0..g.vertex_count() {
        out.set_label(v, process_name(g.label(v)));
    }
    out
}

/// The event-free system of `g`: each vertex a process on `ports` fresh
/// nodes, each edge a bond between the lowest free ports of its endpoints.
pub fn psi(g: &LabeledGraph, ports: usize) -> (DistributedSystem, PsiMap) {
    let mut d = DistributedSystem::new();
    let mut node_sets = Vec::with_capacity(g.vertex_count());
    let mut map = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let nodes = d.add_nodes(ports);
        let s = d
            .add_subsystem(Kind::Process, g.label(v).as_str(), nodes.clone(), vec![])
            .expect("fresh nodes");
        node_sets.push(nodes);
        map.push(s);
    }
    let mut next = vec![0usize; g.vertex_count()];
    for (a, b) in g.edges() {
        let attach = vec![node_sets[a][next[a] % ports], node_sets[b][next[b] % ports]];
        next[a] += 1;
        next[b] += 1;
        d.add_subsystem(Kind::Bond, BOND_LABEL, attach, vec![])
            .expect("fresh nodes");
    }
    (d, map)
}

/// Builds `G*` from a graph assembly system.
///
/// Process names are `λ*` for every label `λ`; one event name per rule left
/// side up to isomorphism, named after the first rule having it. Processes
/// get `k` ports, `k` the largest vertex degree in any rule (or in the
/// initial graph, if larger).
pub fn embed_gas(sys: &GraphAssemblySystem) -> Result<(Gds, PsiMap), GdsError> {
    let g0 = sys.initial_graph();
    let rule_k = sys.rules.iter().map(|r| r.max_degree()).max().unwrap_or(0);
    let ports = rule_k.max(max_graph_degree(&g0)).max(1);

    let mut alphabet = GdsAlphabet::default();
    for l in &sys.alphabet {
        alphabet.processes.insert(process_name(l));
    }
    let mut event_of: BTreeMap<Vec<u8>, String> = BTreeMap::new();
    let mut productions = Vec::with_capacity(sys.rules.len());
    for r in &sys.rules {
        let orientation = r
            .orientation
            .clone()
            .ok_or_else(|| GdsError::OrientationMissing(r.name.clone()))?;
        let event = event_of
            .entry(r.left.canonical_form())
            .or_insert_with(|| format!("L_{}*", r.name))
            .clone();
        alphabet.events.insert(event.clone());
        productions.push(Production {
            name: r.name.clone(),
            event,
            left: starred(&r.left),
            right: starred(&r.right),
            orientation,
        });
    }
    let (initial, map) = psi(&starred(&g0), ports);
    Ok((Gds::new(alphabet, initial, productions, ports)?, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gds::LiveView;
    use crate::graph::Rule;

    #[test]
    fn alphabet_counts() {
        let a = LabeledGraph::with_labels(["a"]);
        let b = LabeledGraph::with_labels(["b"]);
        let ab = LabeledGraph::with_labels(["a", "b"]);
        let ab_e = LabeledGraph::from_parts(["a", "b"], [(0, 1)]).unwrap();
        let rules = vec![
            Rule::new("r1", a.clone(), b.clone()).unwrap(),
            Rule::new("r2", ab.clone(), ab_e.clone()).unwrap(),
            Rule::new("r3", ab_e.clone(), ab.clone()).unwrap(),
            Rule::new("r4", a.clone(), a.clone()).unwrap(),
        ];
        let sys = GraphAssemblySystem::new(["a", "b"].map(Label::from), ab, rules)
            .unwrap()
            .auto_orient();
        let (gds, map) = embed_gas(&sys).unwrap();
        assert_eq!(gds.alphabet.processes.len(), 2);
        assert_eq!(gds.alphabet.events.len(), 3);
        assert_eq!(map, vec![0, 1]);
        assert_eq!(gds.ports, 1);
    }

    #[test]
    fn missing_orientation() {
        let a = LabeledGraph::with_labels(["a"]);
        let sys = GraphAssemblySystem::new(
            [Label::from("a")],
            a.clone(),
            vec![Rule::new("r", a.clone(), a).unwrap()],
        )
        .unwrap();
        assert_eq!(embed_gas(&sys).err(), Some(GdsError::OrientationMissing("r".into())));
    }

    #[test]
    fn psi_of_initial_is_initial() {
        let g = LabeledGraph::from_parts(["a", "b", "a"], [(0, 1), (1, 2)]).unwrap();
        let sys = GraphAssemblySystem::new(["a", "b"].map(Label::from), g.clone(), vec![]).unwrap();
        let (gds, _) = embed_gas(&sys).unwrap();
        let (d, _) = psi(&starred(&g), gds.ports);
        assert_eq!(d, gds.initial);
        assert!(!d.has_events());
        assert_eq!(LiveView::of(&d).graph, starred(&g));
    }
}

//! Encoding of a tile assembly system as a graph assembly system.
//!
//! The window becomes a grid of cell vertices (`y` occupied, `y'` empty);
//! horizontally adjacent cells `c` (west) and `d` (east) are joined by the
//! path `c - E - W - d`, vertically adjacent `c` (south) and `d` (north) by
//! `c - N - S - d`. A tile is a center (`x` attached, `x'` free) with a tag
//! vertex naming its type and one vertex per side labeled `D:a` while
//! unbound and `D:a'` once bonded to the facing tile.
//!
//! Two rule families:
//! * attachment: a free tile binds at an empty cell through a minimal set of
//!   sides whose bonds reach the temperature;
//! * bonding: two attached, adjacent tiles with matching unbound sides bond.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::{reachable_set, Bounds, GraphAssemblySystem, Label, LabeledGraph, Rule};

use super::{Assembly, Pos, Side, TamError, TileAssemblySystem, Window, TEMPERATURE};

pub const CELL_EMPTY: &str = "y'";
pub const CELL_FULL: &str = "y";
pub const CENTER_FREE: &str = "x'";
pub const CENTER_BOUND: &str = "x";

fn side_label(side: Side, glue: &str, bound: bool) -> String {
    if bound {
        format!("{}:{}'", side.letter(), glue)
    } else {
        format!("{}:{}", side.letter(), glue)
    }
}

fn tag_label(name: &str) -> String {
    format!("tile:{name}")
}

#[derive(Clone, Debug)]
pub struct KlavinsEncoding {
    pub gas: GraphAssemblySystem,
    pub window: Window,
    /// Cell vertex of every window position.
    pub cells: BTreeMap<Pos, usize>,
    tile_names: Vec<String>,
}

/// Builds the encoding of `sys` restricted to `window`.
pub fn tam_to_gas(sys: &TileAssemblySystem, window: Window) -> Result<KlavinsEncoding, TamError> {
    for &p in sys.seed.tiles.keys() {
        if !window.contains(p) {
            return Err(TamError::WindowTooSmall(p.0, p.1));
        }
    }
    let mut strength: BTreeMap<&str, u32> = BTreeMap::new();
    for t in &sys.tiles {
        for g in &t.glues {
            if *strength.entry(&g.name).or_insert(g.strength) != g.strength {
                return Err(TamError::InconsistentGlue(g.name.clone()));
            }
        }
    }
    let glues: Vec<&str> = strength.keys().copied().collect();

    let mut alphabet: BTreeSet<Label> = BTreeSet::new();
    for g in &glues {
        for side in Side::ALL {
            alphabet.insert(Label::from(side_label(side, g, false)));
            alphabet.insert(Label::from(side_label(side, g, true)));
        }
    }
    for l in [CELL_EMPTY, CELL_FULL, CENTER_FREE, CENTER_BOUND, "N", "S", "E", "W"] {
        alphabet.insert(Label::from(l));
    }
    for t in &sys.tiles {
        alphabet.insert(Label::from(tag_label(&t.name)));
    }

    let mut rules = attachment_rules(sys, &strength);
    let attachable: BTreeSet<String> = rules
        .iter()
        .map(|r| r.name.split('|').nth(1).unwrap().to_string())
        .collect();
    rules.extend(bond_rules(sys, &strength));

    // grid
    let mut g = LabeledGraph::new();
    let mut cells = BTreeMap::new();
    for p in window.cells() {
        let label = if sys.seed.tiles.contains_key(&p) { CELL_FULL } else { CELL_EMPTY };
        cells.insert(p, g.add_vertex(label));
    }
    for (&p, &c) in &cells {
        for side in [Side::E, Side::N] {
            if let Some(&d) = cells.get(&side.step(p)) {
                let a = g.add_vertex(side.letter());
                let b = g.add_vertex(side.opposite().letter());
                g.add_edge(c, a).unwrap();
                g.add_edge(a, b).unwrap();
                g.add_edge(b, d).unwrap();
            }
        }
    }
    // seed tiles, with every positive bond already formed
    let mut side_vertex: HashMap<(Pos, Side), usize> = HashMap::new();
    for (&p, &t) in &sys.seed.tiles {
        let center = g.add_vertex(CENTER_BOUND);
        g.add_edge(center, cells[&p]).unwrap();
        let tag = g.add_vertex(tag_label(&sys.tiles[t].name));
        g.add_edge(center, tag).unwrap();
        for side in Side::ALL {
            let bound = sys
                .seed
                .get(side.step(p))
                .is_some_and(|u| sys.bond(t, side, u) > 0);
            let v = g.add_vertex(side_label(side, &sys.tiles[t].glue(side).name, bound));
            g.add_edge(center, v).unwrap();
            side_vertex.insert((p, side), v);
        }
    }
    for (&p, &t) in &sys.seed.tiles {
        for side in [Side::E, Side::N] {
            let q = side.step(p);
            if let Some(u) = sys.seed.get(q) {
                if sys.bond(t, side, u) > 0 {
                    g.add_edge(side_vertex[&(p, side)], side_vertex[&(q, side.opposite())])
                        .unwrap();
                }
            }
        }
    }
    // free supply: one copy per empty cell of every attachable type
    let free_cells = window.cells().filter(|p| !sys.seed.tiles.contains_key(p)).count();
    for t in sys.tiles.iter().filter(|t| attachable.contains(&t.name)) {
        for _ in 0..free_cells {
            let center = g.add_vertex(CENTER_FREE);
            let tag = g.add_vertex(tag_label(&t.name));
            g.add_edge(center, tag).unwrap();
            for side in Side::ALL {
                let v = g.add_vertex(side_label(side, &t.glue(side).name, false));
                g.add_edge(center, v).unwrap();
            }
        }
    }
    let gas = GraphAssemblySystem::new(alphabet, g, rules)
        .expect("every label is declared")
        .auto_orient();
    Ok(KlavinsEncoding {
        gas,
        window,
        cells,
        tile_names: sys.tiles.iter().map(|t| t.name.clone()).collect(),
    })
}

/// Partner glues that bond with `glue` and the resulting bond strength.
fn partners<'a>(
    sys: &TileAssemblySystem,
    strength: &BTreeMap<&'a str, u32>,
    glue: &str,
    own: u32,
) -> Vec<(&'a str, u32)> {
    strength
        .iter()
        .filter(|(g, _)| sys.binding.contains(&(glue.to_string(), g.to_string())))
        .map(|(&g, &s)| (g, s.min(own)))
        .filter(|&(_, s)| s > 0)
        .collect()
}

fn attachment_rules(sys: &TileAssemblySystem, strength: &BTreeMap<&str, u32>) -> Vec<Rule> {
    let mut rules = Vec::new();
    for t in &sys.tiles {
        let options: Vec<Vec<(&str, u32)>> = Side::ALL
            .iter()
            .map(|&d| partners(sys, strength, &t.glue(d).name, t.glue(d).strength))
            .collect();
        for mask in 1u32..16 {
            let sides: Vec<Side> = Side::ALL
                .iter()
                .copied()
                .filter(|d| mask >> d.index() & 1 == 1)
                .collect();
            if sides.iter().any(|d| options[d.index()].is_empty()) {
                continue;
            }
            // every choice of partner glue per side
            let mut choices: Vec<Vec<(Side, &str, u32)>> = vec![Vec::new()];
            for &d in &sides {
                choices = choices
                    .into_iter()
                    .flat_map(|c| {
                        options[d.index()].iter().map(move |&(g, s)| {
                            let mut c = c.clone();
                            c.push((d, g, s));
                            c
                        })
                    })
                    .collect();
            }
            for choice in choices {
                let total: u32 = choice.iter().map(|c| c.2).sum();
                let minimal = choice.iter().all(|c| total - c.2 < TEMPERATURE);
                if total >= TEMPERATURE && minimal {
                    rules.push(attachment_rule(t, &choice));
                }
            }
        }
    }
    rules
}

fn attachment_rule(t: &super::TileType, choice: &[(Side, &str, u32)]) -> Rule {
    let mut l = LabeledGraph::new();
    let mut r = LabeledGraph::new();
    let mut both = |a: &str, b: &str| {
        l.add_vertex(a);
        r.add_vertex(b)
    };
    let cell = both(CELL_EMPTY, CELL_FULL);
    let center = both(CENTER_FREE, CENTER_BOUND);
    let tag = both(&tag_label(&t.name), &tag_label(&t.name));
    let mut l_edges = vec![(center, tag)];
    let mut r_extra = vec![(cell, center)];
    let mut parts = Vec::new();
    for &(d, g, _) in choice {
        let o1 = both(d.letter(), d.letter());
        let o2 = both(d.opposite().letter(), d.opposite().letter());
        let m = both(CELL_FULL, CELL_FULL);
        let nc = both(CENTER_BOUND, CENTER_BOUND);
        let ns = both(&side_label(d.opposite(), g, false), &side_label(d.opposite(), g, true));
        let own = &t.glue(d).name;
        let fs = both(&side_label(d, own, false), &side_label(d, own, true));
        l_edges.extend([(cell, o1), (o1, o2), (o2, m), (m, nc), (nc, ns), (center, fs)]);
        r_extra.push((fs, ns));
        parts.push(format!("{}={}", d.letter(), g));
    }
    for &(a, b) in &l_edges {
        l.add_edge(a, b).unwrap();
        r.add_edge(a, b).unwrap();
    }
    for &(a, b) in &r_extra {
        r.add_edge(a, b).unwrap();
    }
    Rule::new(format!("attach|{}|{}", t.name, parts.join(",")), l, r).unwrap()
}

fn bond_rules(sys: &TileAssemblySystem, strength: &BTreeMap<&str, u32>) -> Vec<Rule> {
    let mut rules = Vec::new();
    for (p, q) in &sys.binding {
        let (Some(&sp), Some(&sq)) = (strength.get(p.as_str()), strength.get(q.as_str())) else {
            continue;
        };
        if sp.min(sq) == 0 {
            continue;
        }
        for axis in [Side::E, Side::N] {
            let mut l = LabeledGraph::new();
            let mut r = LabeledGraph::new();
            let mut both = |a: &str, b: &str| {
                l.add_vertex(a);
                r.add_vertex(b)
            };
            let c = both(CELL_FULL, CELL_FULL);
            let o1 = both(axis.letter(), axis.letter());
            let o2 = both(axis.opposite().letter(), axis.opposite().letter());
            let d = both(CELL_FULL, CELL_FULL);
            let x1 = both(CENTER_BOUND, CENTER_BOUND);
            let x2 = both(CENTER_BOUND, CENTER_BOUND);
            let s1 = both(&side_label(axis, p, false), &side_label(axis, p, true));
            let s2 = both(&side_label(axis.opposite(), q, false), &side_label(axis.opposite(), q, true));
            for (a, b) in [(c, o1), (o1, o2), (o2, d), (c, x1), (d, x2), (x1, s1), (x2, s2)] {
                l.add_edge(a, b).unwrap();
                r.add_edge(a, b).unwrap();
            }
            r.add_edge(s1, s2).unwrap();
            rules.push(Rule::new(format!("bond|{}|{p}|{q}", axis.letter()), l, r).unwrap());
        }
    }
    rules
}

/// Reads the assembly off a graph of the encoding.
pub fn decode_gas_state(enc: &KlavinsEncoding, g: &LabeledGraph) -> Assembly {
    let mut a = Assembly::default();
    for (&p, &c) in &enc.cells {
        if g.label(c).as_str() != CELL_FULL {
            continue;
        }
        let center = g
            .neighbors(c)
            .iter()
            .copied()
            .find(|&v| g.label(v).as_str() == CENTER_BOUND);
        let Some(center) = center else { continue };
        for &v in g.neighbors(center) {
            if let Some(name) = g.label(v).as_str().strip_prefix("tile:") {
                if let Some(i) = enc.tile_names.iter().position(|n| n == name) {
                    a.tiles.insert(p, i);
                }
            }
        }
    }
    a
}

#[derive(Clone, Debug)]
pub struct Bisimulation {
    pub tam_states: usize,
    pub tam_transitions: usize,
    pub gas_states: usize,
    /// Distinct assemblies decoded from the explored graphs.
    pub gas_assemblies: usize,
    /// Distinct decoded attachment transitions.
    pub gas_transitions: usize,
    pub bond_steps: usize,
    pub complete: bool,
    pub mismatch: Option<String>,
}

impl Bisimulation {
    pub fn ok(&self) -> bool {
        self.complete && self.mismatch.is_none()
    }
}

/// Explores both sides exhaustively and compares the state graphs, with
/// bonding steps treated as internal.
pub fn bisimulation_check(
    sys: &TileAssemblySystem,
    window: Window,
    state_bound: usize,
) -> Result<Bisimulation, TamError> {
    let mut restricted = sys.clone();
    restricted.window = Some(window);
    let enc = tam_to_gas(&restricted, window)?;

    // tile side
    let mut tam_states: BTreeSet<Assembly> = BTreeSet::new();
    let mut tam_edges: BTreeSet<(Assembly, Assembly)> = BTreeSet::new();
    let mut stack = vec![restricted.seed.clone()];
    tam_states.insert(restricted.seed.clone());
    while let Some(a) = stack.pop() {
        for (p, t) in restricted.frontier(&a) {
            let mut b = a.clone();
            b.tiles.insert(p, t);
            tam_edges.insert((a.clone(), b.clone()));
            if tam_states.insert(b.clone()) {
                stack.push(b);
            }
        }
    }

    // graph side
    let ex = reachable_set(
        &enc.gas,
        Bounds {
            max_depth: usize::MAX,
            max_states: state_bound,
            ..Bounds::default()
        },
    );
    let decoded: Vec<Assembly> = ex.states.iter().map(|g| decode_gas_state(&enc, g)).collect();
    let gas_assemblies: BTreeSet<Assembly> = decoded.iter().cloned().collect();
    let mut gas_edges: BTreeSet<(Assembly, Assembly)> = BTreeSet::new();
    let mut bond_steps = 0;
    let mut mismatch = None;
    let mut attach_from: Vec<BTreeSet<Assembly>> = vec![BTreeSet::new(); ex.states.len()];
    for (from, act, to) in &ex.transitions {
        let (a, b) = (&decoded[*from], &decoded[*to]);
        if a == b {
            bond_steps += 1;
            if !enc.gas.rules[act.rule].name.starts_with("bond|") {
                mismatch.get_or_insert(format!("non-bond rule {} kept the assembly", enc.gas.rules[act.rule].name));
            }
            continue;
        }
        if !tam_edges.contains(&(a.clone(), b.clone())) {
            mismatch.get_or_insert(format!(
                "graph step {from}->{to} ({}) is not a tile step",
                enc.gas.rules[act.rule].name
            ));
        }
        attach_from[*from].insert(b.clone());
        gas_edges.insert((a.clone(), b.clone()));
    }
    if gas_assemblies != tam_states {
        mismatch.get_or_insert(format!(
            "{} tile states vs {} decoded graph states",
            tam_states.len(),
            gas_assemblies.len()
        ));
    }
    let mut stable_results: BTreeSet<Assembly> = BTreeSet::new();
    // every tile step is available from every graph state with that assembly
    for (s, a) in decoded.iter().enumerate() {
        if !ex.expanded[s] {
            continue;
        }
        for (p, t) in restricted.frontier(a) {
            let mut b = a.clone();
            b.tiles.insert(p, t);
            if !attach_from[s].contains(&b) {
                mismatch.get_or_insert(format!("graph state {s} cannot place tile {t} at {p:?}"));
            }
        }
        if enc.gas.actions(&ex.states[s]).is_empty() {
            if !restricted.is_terminal(a) {
                mismatch.get_or_insert(format!("stable graph state {s} is not terminal"));
            }
            stable_results.insert(a.clone());
        }
    }
    // stable graphs decode onto exactly the terminal assemblies
    let terminals: BTreeSet<Assembly> = tam_states
        .iter()
        .filter(|a| restricted.is_terminal(a))
        .cloned()
        .collect();
    if ex.is_complete() && stable_results != terminals {
        mismatch.get_or_insert(format!(
            "{} terminal assemblies vs {} stable graph results",
            terminals.len(),
            stable_results.len()
        ));
    }
    Ok(Bisimulation {
        tam_states: tam_states.len(),
        tam_transitions: tam_edges.len(),
        gas_states: ex.states.len(),
        gas_assemblies: gas_assemblies.len(),
        gas_transitions: gas_edges.len(),
        bond_steps,
        complete: ex.is_complete(),
        mismatch,
    })
}

//! Line-oriented text formats for grammars and GDS's.
//!
//! ```text
//! # comment
//! alphabet: a b c
//! graph init:
//!   vertex 0 a
//!   vertex 1 b
//!   edge 0 1
//!   supply a 4
//! rule bind:
//!   left:
//!     vertex x a
//!     vertex y b
//!   right:
//!     vertex x c
//!     vertex y c
//!     edge x y
//!   slots:
//!     right x y 1 1
//! ```
//!
//! The GDS format uses `processes:`, `events:`, `ports: <k>`, an `initial:`
//! section of `process <id> <name>` / `link <id> <id>` lines, and
//! `production <name> event=<e>:` sections shaped like rules.
//! Indentation is not significant.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::gds::{gds_from_parts, Gds, GdsAlphabet, GdsError, Production};
use crate::graph::{GraphAssemblySystem, GraphError, Label, LabeledGraph, Orientation, Rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Non-empty, comment-stripped lines with 1-based numbers.
pub fn lines(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("expected {what}, found `{tok}`")))
}

/// A graph whose vertices are named by arbitrary tokens.
#[derive(Default)]
struct GraphBuilder {
    ids: Vec<String>,
    labels: Vec<String>,
    edges: Vec<(usize, String, String)>,
    supply: Vec<(usize, String, usize)>,
}

impl GraphBuilder {
    fn vertex(&mut self, line: usize, id: &str, label: &str) -> Result<(), ParseError> {
        if self.ids.iter().any(|x| x == id) {
            return Err(ParseError::new(line, format!("duplicate vertex `{id}`")));
        }
        self.ids.push(id.to_string());
        self.labels.push(label.to_string());
        Ok(())
    }

    fn index(&self, line: usize, id: &str) -> Result<usize, ParseError> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| ParseError::new(line, format!("unknown vertex `{id}`")))
    }

    /// Builds the graph with vertices ordered as `order` (default: declaration order).
    fn build(&self, order: Option<&[String]>) -> Result<LabeledGraph, ParseError> {
        let ids: Vec<String> = order.map_or_else(|| self.ids.clone(), <[String]>::to_vec);
        let mut g = LabeledGraph::new();
        for id in &ids {
            let i = self.index(0, id)?;
            g.add_vertex(self.labels[i].as_str());
        }
        let pos = |line: usize, id: &str| {
            ids.iter()
                .position(|x| x == id)
                .ok_or_else(|| ParseError::new(line, format!("unknown vertex `{id}`")))
        };
        for (line, a, b) in &self.edges {
            let (x, y) = (pos(*line, a)?, pos(*line, b)?);
            g.add_edge(x, y)
                .map_err(|e| ParseError::new(*line, e.to_string()))?;
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Default)]
struct RuleBuilder {
    name: String,
    event: Option<String>,
    line: usize,
    left: GraphBuilder,
    right: GraphBuilder,
    left_lines: Vec<usize>,
    right_lines: Vec<usize>,
    slots: Vec<(usize, Side, String, String, u32, u32)>,
}

impl RuleBuilder {
    fn finish(&self) -> Result<(LabeledGraph, LabeledGraph, Option<Orientation>), ParseError> {
        let mut l_ids = self.left.ids.clone();
        let mut r_ids = self.right.ids.clone();
        l_ids.sort();
        r_ids.sort();
        if l_ids != r_ids {
            return Err(ParseError::new(
                self.line,
                format!("rule `{}`: left and right declare different vertices", self.name),
            ));
        }
        let left = self.left.build(None)?;
        let right = self.right.build(Some(&self.left.ids))?;
        if self.slots.is_empty() {
            return Ok((left, right, None));
        }
        let mut o = Orientation::default();
        for (line, side, a, b, sa, sb) in &self.slots {
            let x = self.left.index(*line, a)?;
            let y = self.left.index(*line, b)?;
            let (key, val) = if x < y { ((x, y), (*sa, *sb)) } else { ((y, x), (*sb, *sa)) };
            match side {
                Side::Left => o.left.insert(key, val),
                Side::Right => o.right.insert(key, val),
            };
        }
        Ok((left, right, Some(o)))
    }
}

enum Ctx {
    None,
    Graph,
    RuleTop,
    RuleSide(Side),
    Slots,
}

/// Shared section walker for both formats.
struct Doc {
    alphabet: Option<(usize, BTreeSet<String>)>,
    events: Option<BTreeSet<String>>,
    ports: Option<usize>,
    graph: Option<(usize, GraphBuilder, Vec<usize>)>,
    rules: Vec<RuleBuilder>,
}

fn walk(src: &str, gds: bool) -> Result<Doc, ParseError> {
    let mut doc = Doc {
        alphabet: None,
        events: None,
        ports: None,
        graph: None,
        rules: Vec::new(),
    };
    let mut ctx = Ctx::None;
    let (alpha_kw, graph_kw, rule_kw, vertex_kw, edge_kw) = if gds {
        ("processes:", "initial:", "production", "process", "link")
    } else {
        ("alphabet:", "graph", "rule", "vertex", "edge")
    };
    for (ln, t) in lines(src) {
        let head = t[0];
        if head == alpha_kw {
            doc.alphabet = Some((ln, t[1..].iter().map(|s| s.to_string()).collect()));
            ctx = Ctx::None;
        } else if gds && head == "events:" {
            doc.events = Some(t[1..].iter().map(|s| s.to_string()).collect());
            ctx = Ctx::None;
        } else if gds && head == "ports:" {
            let k = t.get(1).ok_or_else(|| ParseError::new(ln, "missing port count"))?;
            doc.ports = Some(parse_num(ln, k, "port count")?);
            ctx = Ctx::None;
        } else if head == graph_kw {
            if !gds && (t.len() != 2 || !t[1].ends_with(':')) {
                return Err(ParseError::new(ln, "expected `graph <name>:`"));
            }
            if doc.graph.is_some() {
                return Err(ParseError::new(ln, "only one initial graph is allowed"));
            }
            doc.graph = Some((ln, GraphBuilder::default(), Vec::new()));
            ctx = Ctx::Graph;
        } else if head == rule_kw {
            let rest = t[1..].join(" ");
            let rest = rest
                .strip_suffix(':')
                .ok_or_else(|| ParseError::new(ln, format!("expected `{rule_kw} <name>:`")))?;
            let mut parts = rest.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| ParseError::new(ln, "missing name"))?
                .to_string();
            let mut event = None;
            for p in parts {
                match p.strip_prefix("event=") {
                    Some(e) if gds => event = Some(e.to_string()),
                    _ => return Err(ParseError::new(ln, format!("unexpected `{p}`"))),
                }
            }
            if gds && event.is_none() {
                return Err(ParseError::new(ln, "production needs `event=<name>`"));
            }
            doc.rules.push(RuleBuilder {
                name,
                event,
                line: ln,
                ..Default::default()
            });
            ctx = Ctx::RuleTop;
        } else if head == "left:" || head == "right:" || head == "slots:" {
            if matches!(ctx, Ctx::None | Ctx::Graph) {
                return Err(ParseError::new(ln, format!("`{head}` outside a rule")));
            }
            ctx = match head {
                "left:" => Ctx::RuleSide(Side::Left),
                "right:" => Ctx::RuleSide(Side::Right),
                _ => Ctx::Slots,
            };
        } else {
            match &ctx {
                Ctx::Graph => {
                    let (_, g, vlines) = doc.graph.as_mut().unwrap();
                    body_line(ln, &t, g, Some(vlines), vertex_kw, edge_kw, !gds)?;
                }
                Ctx::RuleSide(side) => {
                    let r = doc.rules.last_mut().unwrap();
                    let (g, vl) = match side {
                        Side::Left => (&mut r.left, &mut r.left_lines),
                        Side::Right => (&mut r.right, &mut r.right_lines),
                    };
                    body_line(ln, &t, g, Some(vl), vertex_kw, edge_kw, false)?;
                }
                Ctx::Slots => {
                    let side = match t[0] {
                        "left" => Side::Left,
                        "right" => Side::Right,
                        other => {
                            return Err(ParseError::new(ln, format!("expected `left` or `right`, found `{other}`")))
                        }
                    };
                    if t.len() != 5 {
                        return Err(ParseError::new(ln, "expected `<side> <u> <v> <slot_u> <slot_v>`"));
                    }
                    let r = doc.rules.last_mut().unwrap();
                    r.slots.push((
                        ln,
                        side,
                        t[1].to_string(),
                        t[2].to_string(),
                        parse_num(ln, t[3], "slot")?,
                        parse_num(ln, t[4], "slot")?,
                    ));
                }
                _ => return Err(ParseError::new(ln, format!("unexpected `{head}`"))),
            }
        }
    }
    Ok(doc)
}

fn body_line(
    ln: usize,
    t: &[&str],
    g: &mut GraphBuilder,
    vlines: Option<&mut Vec<usize>>,
    vertex_kw: &str,
    edge_kw: &str,
    allow_supply: bool,
) -> Result<(), ParseError> {
    match t[0] {
        k if k == vertex_kw && t.len() == 3 => {
            g.vertex(ln, t[1], t[2])?;
            if let Some(v) = vlines {
                v.push(ln);
            }
        }
        k if k == edge_kw && t.len() == 3 => {
            g.index(ln, t[1])?;
            g.index(ln, t[2])?;
            g.edges.push((ln, t[1].to_string(), t[2].to_string()));
        }
        "supply" if allow_supply && t.len() == 3 => {
            g.supply.push((ln, t[1].to_string(), parse_num(ln, t[2], "count")?));
        }
        _ => {
            return Err(ParseError::new(
                ln,
                format!("expected `{vertex_kw} <id> <label>` or `{edge_kw} <id> <id>`"),
            ))
        }
    }
    Ok(())
}

fn check_side(
    g: &GraphBuilder,
    vlines: &[usize],
    alphabet: &BTreeSet<String>,
) -> Result<(), ParseError> {
    for (i, l) in g.labels.iter().enumerate() {
        if !alphabet.contains(l) {
            return Err(ParseError::new(vlines[i], format!("label `{l}` is not declared")));
        }
    }
    Ok(())
}

/// Errors that can follow a successful parse (carry the offending line).
fn at(line: usize) -> impl Fn(GraphError) -> ParseError {
    move |e| ParseError::new(line, e.to_string())
}

pub fn parse_grammar(src: &str) -> Result<GraphAssemblySystem, ParseError> {
    let doc = walk(src, false)?;
    let (_, alphabet) = doc
        .alphabet
        .ok_or_else(|| ParseError::new(1, "missing `alphabet:` line"))?;
    let (gline, graph, vlines) = doc
        .graph
        .ok_or_else(|| ParseError::new(1, "missing `graph <name>:` section"))?;
    check_side(&graph, &vlines, &alphabet)?;
    let initial = graph.build(None)?;
    let mut rules = Vec::with_capacity(doc.rules.len());
    for rb in &doc.rules {
        check_side(&rb.left, &rb.left_lines, &alphabet)?;
        check_side(&rb.right, &rb.right_lines, &alphabet)?;
        let (l, r, o) = rb.finish()?;
        let mut rule = Rule::new(rb.name.clone(), l, r).map_err(at(rb.line))?;
        if let Some(o) = o {
            rule = rule.with_orientation(o).map_err(at(rb.line))?;
        }
        rules.push(rule);
    }
    let mut names = BTreeSet::new();
    for rb in &doc.rules {
        if !names.insert(&rb.name) {
            return Err(ParseError::new(rb.line, format!("duplicate rule `{}`", rb.name)));
        }
    }
    let mut sys = GraphAssemblySystem::new(alphabet.iter().map(|s| Label::from(s.as_str())), initial, rules)
        .map_err(at(gline))?;
    for (ln, label, count) in &graph.supply {
        sys = sys
            .with_supply(label.as_str(), *count)
            .map_err(at(*ln))?;
    }
    Ok(sys)
}

#[derive(Debug, Error)]
pub enum GdsParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Gds(#[from] GdsError),
}

pub fn parse_gds(src: &str) -> Result<Gds, GdsParseError> {
    let doc = walk(src, true)?;
    let (_, processes) = doc
        .alphabet
        .ok_or_else(|| ParseError::new(1, "missing `processes:` line"))?;
    let events = doc
        .events
        .ok_or_else(|| ParseError::new(1, "missing `events:` line"))?;
    let (_, graph, vlines) = doc
        .graph
        .ok_or_else(|| ParseError::new(1, "missing `initial:` section"))?;
    check_side(&graph, &vlines, &processes)?;
    let initial = graph.build(None)?;
    let mut productions = Vec::new();
    let mut k = doc.ports.unwrap_or(0);
    for rb in &doc.rules {
        check_side(&rb.left, &rb.left_lines, &processes)?;
        check_side(&rb.right, &rb.right_lines, &processes)?;
        let event = rb.event.clone().unwrap();
        if !events.contains(&event) {
            return Err(ParseError::new(rb.line, format!("event `{event}` is not declared")).into());
        }
        let (l, r, o) = rb.finish()?;
        let rule = Rule::new(rb.name.clone(), l, r).map_err(at(rb.line))?;
        let rule = match o {
            Some(o) => rule.with_orientation(o).map_err(at(rb.line))?,
            None => {
                let o = rule.default_orientation();
                rule.with_orientation(o).map_err(at(rb.line))?
            }
        };
        if doc.ports.is_none() {
            k = k.max(rule.max_degree());
        }
        productions.push(Production {
            name: rule.name,
            event,
            left: rule.left,
            right: rule.right,
            orientation: rule.orientation.unwrap(),
        });
    }
    let alphabet = GdsAlphabet { events, processes };
    Ok(gds_from_parts(alphabet, &initial, productions, k)?)
}

/// Inverse of [`parse_grammar`] up to vertex names.
pub fn write_grammar(sys: &GraphAssemblySystem) -> String {
    let mut s = String::new();
    let labels: Vec<&str> = sys.alphabet.iter().map(Label::as_str).collect();
    s.push_str(&format!("alphabet: {}\n", labels.join(" ")));
    s.push_str("graph initial:\n");
    write_graph(&mut s, &sys.initial, "  ");
    for (l, c) in &sys.supply {
        s.push_str(&format!("  supply {l} {c}\n"));
    }
    for r in &sys.rules {
        s.push_str(&format!("rule {}:\n  left:\n", r.name));
        write_graph(&mut s, &r.left, "    ");
        s.push_str("  right:\n");
        write_graph(&mut s, &r.right, "    ");
        if let Some(o) = &r.orientation {
            s.push_str("  slots:\n");
            let side = |s: &mut String, name: &str, m: &BTreeMap<(usize, usize), (u32, u32)>| {
                for (&(a, b), &(i, j)) in m {
                    s.push_str(&format!("    {name} {a} {b} {i} {j}\n"));
                }
            };
            side(&mut s, "left", &o.left);
            side(&mut s, "right", &o.right);
        }
    }
    s
}

fn write_graph(s: &mut String, g: &LabeledGraph, indent: &str) {
    for v in 0..g.vertex_count() {
        s.push_str(&format!("{indent}vertex {v} {}\n", g.label(v)));
    }
    for (a, b) in g.edges() {
        s.push_str(&format!("{indent}edge {a} {b}\n"));
    }
}

//! Scenario files. The kind comes from the extension unless `--kind` says
//! otherwise.
//!
//! Compose scenarios are line based:
//!
//! ```text
//! network grid 4 4          # or: network edges <n> 0-1 1-2 ...
//! ids-from 64               # or: ids 5 9 2 ...
//! degree 4
//! base flood 2              # or: base halt
//! ```

use std::path::Path;

use clap::ValueEnum;
use graphasm::gds::Gds;
use graphasm::graph::GraphAssemblySystem;
use graphasm::mis::{alpha_wrap, grid, idle_system, AlphaOptions, MaxFlood};
use graphasm::sim::{parse_procsys, NetworkGraph, ProcessorSystem};
use graphasm::tam::{parse_tileset, TileAssemblySystem};
use graphasm::text::{lines, parse_gds, parse_grammar, parse_num, ParseError};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Gas,
    Gds,
    Tam,
    Procsys,
    Compose,
}

impl Kind {
    fn from_path(path: &Path) -> Option<Kind> {
        match path.extension()?.to_str()? {
            "gas" | "grammar" => Some(Kind::Gas),
            "gds" => Some(Kind::Gds),
            "tiles" | "tam" => Some(Kind::Tam),
            "procsys" => Some(Kind::Procsys),
            "compose" => Some(Kind::Compose),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum BaseSpec {
    Halt,
    Flood(usize),
}

#[derive(Clone, Debug)]
pub struct ComposeScenario {
    pub network: NetworkGraph,
    /// Absent ids stay absent so the id check can report them.
    pub ids: Vec<u64>,
    pub degree: usize,
    pub base: BaseSpec,
}

impl ComposeScenario {
    /// The computation the MIS is appended to.
    pub fn base_system(&self) -> Result<ProcessorSystem, CliError> {
        Ok(match self.base {
            BaseSpec::Halt => idle_system(&self.network),
            BaseSpec::Flood(rounds) => {
                if self.ids.len() != self.network.n {
                    return Err(CliError::Ids(format!(
                        "{} ids for {} vertices",
                        self.ids.len(),
                        self.network.n
                    )));
                }
                let alg = MaxFlood {
                    ids: self.ids.clone(),
                    rounds,
                };
                let opts = AlphaOptions {
                    pad_to_degree: Some(self.degree),
                    ..AlphaOptions::default()
                };
                alpha_wrap(&alg, &self.network, &opts)
            }
        })
    }
}

pub enum Scenario {
    Gas(GraphAssemblySystem),
    Gds(Gds),
    Tam(TileAssemblySystem),
    Procsys(ProcessorSystem),
    Compose(ComposeScenario),
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self {
            Scenario::Gas(_) => Kind::Gas,
            Scenario::Gds(_) => Kind::Gds,
            Scenario::Tam(_) => Kind::Tam,
            Scenario::Procsys(_) => Kind::Procsys,
            Scenario::Compose(_) => Kind::Compose,
        }
    }
}

pub fn load(path: &Path, kind: Option<Kind>) -> Result<Scenario, CliError> {
    let kind = kind
        .or_else(|| Kind::from_path(path))
        .ok_or_else(|| CliError::Parse(format!("{}: cannot tell the scenario kind; pass --kind", path.display())))?;
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let parse = |e: &dyn std::fmt::Display| CliError::Parse(format!("{}: {e}", path.display()));
    Ok(match kind {
        Kind::Gas => Scenario::Gas(parse_grammar(&src).map_err(|e| parse(&e))?),
        Kind::Gds => Scenario::Gds(parse_gds(&src).map_err(|e| parse(&e))?),
        Kind::Tam => Scenario::Tam(parse_tileset(&src).map_err(|e| parse(&e))?),
        Kind::Procsys => Scenario::Procsys(parse_procsys(&src).map_err(|e| parse(&e))?),
        Kind::Compose => Scenario::Compose(parse_compose(&src).map_err(|e| parse(&e))?),
    })
}

fn edge(line: usize, tok: &str) -> Result<(usize, usize), ParseError> {
    let (a, b) = tok
        .split_once('-')
        .ok_or_else(|| ParseError::new(line, format!("expected `<u>-<v>`, found `{tok}`")))?;
    Ok((parse_num(line, a, "vertex")?, parse_num(line, b, "vertex")?))
}

pub fn parse_compose(src: &str) -> Result<ComposeScenario, ParseError> {
    let mut network = None;
    let mut ids = None;
    let mut degree = None;
    let mut base = None;
    for (ln, t) in lines(src) {
        match (t[0], t.len()) {
            ("network", 4) if t[1] == "grid" => {
                network = Some(grid(parse_num(ln, t[2], "rows")?, parse_num(ln, t[3], "columns")?));
            }
            ("network", k) if k >= 3 && t[1] == "edges" => {
                let n: usize = parse_num(ln, t[2], "vertex count")?;
                let e = t[3..].iter().map(|tok| edge(ln, tok)).collect::<Result<Vec<_>, _>>()?;
                let g = NetworkGraph::undirected(n, &e).map_err(|e| ParseError::new(ln, e.to_string()))?;
                network = Some(g);
            }
            ("ids", _) => {
                ids = Some(t[1..].iter().map(|x| parse_num(ln, x, "id")).collect::<Result<Vec<u64>, _>>()?);
            }
            ("ids-from", 2) => {
                let first: u64 = parse_num(ln, t[1], "id")?;
                let n = network
                    .as_ref()
                    .map(|g: &NetworkGraph| g.n)
                    .ok_or_else(|| ParseError::new(ln, "`ids-from` needs the network first"))?;
                ids = Some((0..n as u64).map(|i| first + i).collect());
            }
            ("degree", 2) => degree = Some(parse_num(ln, t[1], "degree")?),
            ("base", 2) if t[1] == "halt" => base = Some(BaseSpec::Halt),
            ("base", 3) if t[1] == "flood" => base = Some(BaseSpec::Flood(parse_num(ln, t[2], "rounds")?)),
            _ => return Err(ParseError::new(ln, format!("unexpected `{}`", t.join(" ")))),
        }
    }
    let network = network.ok_or_else(|| ParseError::new(1, "missing `network` line"))?;
    let degree = degree.unwrap_or_else(|| (0..network.n).map(|v| network.neighbors(v).len()).max().unwrap_or(0));
    Ok(ComposeScenario {
        network,
        ids: ids.unwrap_or_default(),
        degree,
        base: base.unwrap_or(BaseSpec::Halt),
    })
}

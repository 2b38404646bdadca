//! The abstract Tile Assembly Model at temperature 2.
//!
//! Tiles are unrotatable unit squares with a glue on each side. A tile may
//! attach at an empty cell when the glues it shares with its placed
//! neighbors sum to at least [`TEMPERATURE`]. Two facing glues `a`, `b`
//! contribute `min(strength(a), strength(b))` when `(a, b)` is in the binding
//! relation, and nothing otherwise.

mod explore;
mod klavins;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use explore::{
    is_locally_deterministic_tam, run_assembly, terminal_assemblies, AssemblySequence,
    TamLdVerdict, TamViolation, Terminals,
};
pub use klavins::{bisimulation_check, decode_gas_state, tam_to_gas, Bisimulation, KlavinsEncoding};
pub use text::{parse_tileset, render_ascii, render_svg, TilesetParseError};

pub const TEMPERATURE: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TamError {
    #[error("glue strength {0} is not 0, 1 or 2")]
    BadStrength(u32),
    #[error("unknown tile type `{0}`")]
    UnknownTile(String),
    #[error("duplicate tile type `{0}`")]
    DuplicateTile(String),
    #[error("seed is empty")]
    EmptySeed,
    #[error("seed is not stable")]
    UnstableSeed,
    #[error("seed cell ({0}, {1}) lies outside the window")]
    WindowTooSmall(i32, i32),
    #[error("glue `{0}` is used with different strengths")]
    InconsistentGlue(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    N,
    S,
    E,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::N, Side::S, Side::E, Side::W];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::N => Side::S,
            Side::S => Side::N,
            Side::E => Side::W,
            Side::W => Side::E,
        }
    }

    pub fn offset(self) -> (i32, i32) {
        match self {
            Side::N => (0, 1),
            Side::S => (0, -1),
            Side::E => (1, 0),
            Side::W => (-1, 0),
        }
    }

    pub fn step(self, (x, y): Pos) -> Pos {
        let (dx, dy) = self.offset();
        (x + dx, y + dy)
    }

    pub fn letter(self) -> &'static str {
        match self {
            Side::N => "N",
            Side::S => "S",
            Side::E => "E",
            Side::W => "W",
        }
    }
}

pub type Pos = (i32, i32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Glue {
    pub name: String,
    pub strength: u32,
}

impl Glue {
    pub fn new(name: impl Into<String>, strength: u32) -> Result<Self, TamError> {
        if strength > 2 {
            return Err(TamError::BadStrength(strength));
        }
        Ok(Glue {
            name: name.into(),
            strength,
        })
    }

    pub fn null() -> Self {
        Glue {
            name: "-".into(),
            strength: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TileType {
    pub name: String,
    /// Indexed by [`Side::index`]: N, S, E, W.
    pub glues: [Glue; 4],
}

impl TileType {
    pub fn new(name: impl Into<String>, n: Glue, s: Glue, e: Glue, w: Glue) -> Self {
        TileType {
            name: name.into(),
            glues: [n, s, e, w],
        }
    }

    pub fn glue(&self, side: Side) -> &Glue {
        &self.glues[side.index()]
    }
}

/// Inclusive bounds on placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub xmin: i32,
    pub xmax: i32,
    pub ymin: i32,
    pub ymax: i32,
}

impl Window {
    pub fn contains(&self, (x, y): Pos) -> bool {
        (self.xmin..=self.xmax).contains(&x) && (self.ymin..=self.ymax).contains(&y)
    }

    pub fn cells(&self) -> impl Iterator<Item = Pos> + '_ {
        (self.ymin..=self.ymax).flat_map(move |y| (self.xmin..=self.xmax).map(move |x| (x, y)))
    }
}

/// Placements keyed by position; values index the system's tile types.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assembly {
    pub tiles: BTreeMap<Pos, usize>,
}

impl Assembly {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, p: Pos) -> Option<usize> {
        self.tiles.get(&p).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileAssemblySystem {
    pub tiles: Vec<TileType>,
    pub seed: Assembly,
    /// Symmetric.
    pub binding: BTreeSet<(String, String)>,
    pub window: Option<Window>,
}

impl TileAssemblySystem {
    pub fn new(
        tiles: Vec<TileType>,
        seed: Vec<(Pos, &str)>,
        binding: impl IntoIterator<Item = (String, String)>,
        window: Option<Window>,
    ) -> Result<Self, TamError> {
        let mut names = BTreeSet::new();
        for t in &tiles {
            if !names.insert(t.name.clone()) {
                return Err(TamError::DuplicateTile(t.name.clone()));
            }
            if let Some(g) = t.glues.iter().find(|g| g.strength > 2) {
                return Err(TamError::BadStrength(g.strength));
            }
        }
        let mut placed = Assembly::default();
        for (p, name) in seed {
            let i = tiles
                .iter()
                .position(|t| t.name == name)
                .ok_or_else(|| TamError::UnknownTile(name.to_string()))?;
            if let Some(w) = window {
                if !w.contains(p) {
                    return Err(TamError::WindowTooSmall(p.0, p.1));
                }
            }
            placed.tiles.insert(p, i);
        }
        if placed.is_empty() {
            return Err(TamError::EmptySeed);
        }
        let mut rel = BTreeSet::new();
        for (a, b) in binding {
            rel.insert((b.clone(), a.clone()));
            rel.insert((a, b));
        }
        let sys = TileAssemblySystem {
            tiles,
            seed: placed,
            binding: rel,
            window,
        };
        if !sys.is_stable(&sys.seed) {
            return Err(TamError::UnstableSeed);
        }
        Ok(sys)
    }

    /// Binding relation where every glue binds only with itself.
    pub fn identity_binding(tiles: &[TileType]) -> Vec<(String, String)> {
        let names: BTreeSet<&str> = tiles
            .iter()
            .flat_map(|t| t.glues.iter())
            .filter(|g| g.strength > 0)
            .map(|g| g.name.as_str())
            .collect();
        names.into_iter().map(|n| (n.to_string(), n.to_string())).collect()
    }

    pub fn tile_index(&self, name: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.name == name)
    }

    /// Strength of the bond between `t` at some cell and `u` on its `side`.
    pub fn bond(&self, t: usize, side: Side, u: usize) -> u32 {
        let a = self.tiles[t].glue(side);
        let b = self.tiles[u].glue(side.opposite());
        if self.binding.contains(&(a.name.clone(), b.name.clone())) {
            a.strength.min(b.strength)
        } else {
            0
        }
    }

    /// Total strength `t` would bind with at `p` in `a`, and the sides used.
    pub fn binding_at(&self, a: &Assembly, p: Pos, t: usize) -> (u32, Vec<Side>) {
        let mut total = 0;
        let mut sides = Vec::new();
        for side in Side::ALL {
            if let Some(u) = a.get(side.step(p)) {
                let s = self.bond(t, side, u);
                if s > 0 {
                    total += s;
                    sides.push(side);
                }
            }
        }
        (total, sides)
    }

    pub fn in_window(&self, p: Pos) -> bool {
        self.window.map_or(true, |w| w.contains(p))
    }

    /// Every `(empty cell, tile type)` that could attach, sorted.
    pub fn frontier(&self, a: &Assembly) -> Vec<(Pos, usize)> {
        let mut cells: BTreeSet<Pos> = BTreeSet::new();
        for &p in a.tiles.keys() {
            for side in Side::ALL {
                let q = side.step(p);
                if !a.tiles.contains_key(&q) && self.in_window(q) {
                    cells.insert(q);
                }
            }
        }
        let mut out = Vec::new();
        for q in cells {
            for t in 0..self.tiles.len() {
                if self.binding_at(a, q, t).0 >= TEMPERATURE {
                    out.push((q, t));
                }
            }
        }
        out
    }

    pub fn is_terminal(&self, a: &Assembly) -> bool {
        self.frontier(a).is_empty()
    }

    /// Every cut of the bond graph has strength at least [`TEMPERATURE`].
    pub fn is_stable(&self, a: &Assembly) -> bool {
        let cells: Vec<Pos> = a.tiles.keys().copied().collect();
        if cells.len() < 2 {
            return true;
        }
        let n = cells.len();
        let mut w = vec![vec![0u32; n]; n];
        for (i, &p) in cells.iter().enumerate() {
            for side in [Side::E, Side::N] {
                if let Ok(j) = cells.binary_search(&side.step(p)) {
                    let s = self.bond(a.tiles[&p], side, a.tiles[&cells[j]]);
                    w[i][j] += s;
                    w[j][i] += s;
                }
            }
        }
        min_cut(w) >= TEMPERATURE
    }

    /// Line dump: `x y tilename`, sorted by position.
    pub fn dump(&self, a: &Assembly) -> String {
        let mut s = String::new();
        for (&(x, y), &t) in &a.tiles {
            s.push_str(&format!("{x} {y} {}\n", self.tiles[t].name));
        }
        s
    }
}

/// Global minimum cut of an undirected weighted graph (Stoer–Wagner).
pub fn min_cut(mut w: Vec<Vec<u32>>) -> u32 {
    let n = w.len();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u32::MAX;
    while alive.len() > 1 {
        let mut added = vec![false; n];
        let mut weight = vec![0u32; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        for _ in 0..alive.len() {
            let next = *alive
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (weight[v], std::cmp::Reverse(v)))
                .unwrap();
            added[next] = true;
            prev = last;
            last = next;
            for &v in &alive {
                if !added[v] {
                    weight[v] += w[next][v];
                }
            }
        }
        best = best.min(weight[last]);
        // merge `last` into `prev`
        for &v in &alive {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    best
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: &str, s: u32) -> Glue {
        Glue::new(name, s).unwrap()
    }

    #[test]
    fn zero_glue_seed_has_empty_frontier() {
        let t = TileType::new("s", Glue::null(), Glue::null(), Glue::null(), Glue::null());
        let sys = TileAssemblySystem::new(vec![t], vec![((0, 0), "s")], vec![], None).unwrap();
        assert!(sys.frontier(&sys.seed).is_empty());
    }

    #[test]
    fn strong_east_glue_forces_one_attachment() {
        let s = TileType::new("s", Glue::null(), Glue::null(), g("a", 2), Glue::null());
        let t = TileType::new("t", Glue::null(), Glue::null(), Glue::null(), g("a", 2));
        let u = TileType::new("u", Glue::null(), Glue::null(), Glue::null(), g("a", 1));
        let tiles = vec![s, t, u];
        let rel = TileAssemblySystem::identity_binding(&tiles);
        let sys = TileAssemblySystem::new(tiles, vec![((0, 0), "s")], rel, None).unwrap();
        assert_eq!(sys.frontier(&sys.seed), vec![((1, 0), 1)]);
    }

    #[test]
    fn strength_three_rejected() {
        assert_eq!(Glue::new("a", 3), Err(TamError::BadStrength(3)));
    }

    #[test]
    fn min_cut_small() {
        // path a -2- b -1- c: min cut 1
        let w = vec![vec![0, 2, 0], vec![2, 0, 1], vec![0, 1, 0]];
        assert_eq!(min_cut(w), 1);
        // 4-cycle of weight-1 edges: min cut 2
        let w = vec![
            vec![0, 1, 0, 1],
            vec![1, 0, 1, 0],
            vec![0, 1, 0, 1],
            vec![1, 0, 1, 0],
        ];
        assert_eq!(min_cut(w), 2);
    }

    #[test]
    fn unstable_seed_rejected() {
        let t = TileType::new("s", Glue::null(), Glue::null(), g("a", 1), g("a", 1));
        let tiles = vec![t];
        let rel = TileAssemblySystem::identity_binding(&tiles);
        let err = TileAssemblySystem::new(tiles, vec![((0, 0), "s"), ((1, 0), "s")], rel, None);
        assert_eq!(err, Err(TamError::UnstableSeed));
    }
}

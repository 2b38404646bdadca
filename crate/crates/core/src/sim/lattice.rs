//! Lattice placements with a one-agent-per-point guard, exact convex hulls,
//! and dumps/renders.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{Config, ProcessorSystem, Snapshot};

pub type Point = [i64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    Proc(usize),
    Highway(usize, usize),
    Seed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub pos: Point,
    pub agent: String,
    pub owner: Owner,
}

#[derive(Clone, Debug, Default)]
pub struct Lattice {
    pub placements: Vec<Placement>,
    index: HashMap<Point, usize>,
    /// 2 for plane placements (z is always 0), 3 for space.
    pub dims: u8,
}

impl Lattice {
    pub fn new(dims: u8) -> Self {
        Lattice {
            dims,
            ..Lattice::default()
        }
    }

    /// Places an agent; refuses a point that is already taken.
    pub fn place(&mut self, pos: Point, agent: impl Into<String>, owner: Owner) -> Result<(), String> {
        if let Some(&k) = self.index.get(&pos) {
            let old = &self.placements[k];
            return Err(format!(
                "point {pos:?} holds {} ({:?}); refused {} ({owner:?})",
                old.agent,
                old.owner,
                agent.into()
            ));
        }
        self.index.insert(pos, self.placements.len());
        self.placements.push(Placement {
            pos,
            agent: agent.into(),
            owner,
        });
        Ok(())
    }

    pub fn get(&self, pos: Point) -> Option<&Placement> {
        self.index.get(&pos).map(|&k| &self.placements[k])
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.placements.iter().map(|p| p.pos).collect()
    }

    /// One line per placement, sorted by position.
    pub fn dump(&self, m: &ProcessorSystem) -> String {
        let mut ps: Vec<&Placement> = self.placements.iter().collect();
        ps.sort_by_key(|p| (p.pos[2], p.pos[1], p.pos[0]));
        let mut s = String::new();
        for p in ps {
            let [x, y, z] = p.pos;
            if self.dims == 3 {
                write!(s, "{x} {y} {z}").unwrap();
            } else {
                write!(s, "{x} {y}").unwrap();
            }
            writeln!(s, " agent={} owner={}", p.agent, owner_name(m, p.owner)).unwrap();
        }
        s
    }

    /// ASCII picture, top row first; one block per z for space placements.
    /// Digits and letters mark processors, `*` highways, `#` seed.
    pub fn render_ascii(&self) -> String {
        let mut by_z: BTreeMap<i64, Vec<&Placement>> = BTreeMap::new();
        for p in &self.placements {
            by_z.entry(p.pos[2]).or_default().push(p);
        }
        let mut s = String::new();
        for (z, ps) in by_z {
            if self.dims == 3 {
                writeln!(s, "z={z}").unwrap();
            }
            let (x0, x1) = min_max(ps.iter().map(|p| p.pos[0]));
            let (y0, y1) = min_max(ps.iter().map(|p| p.pos[1]));
            let cells: HashMap<(i64, i64), char> = ps.iter().map(|p| ((p.pos[0], p.pos[1]), glyph(p.owner))).collect();
            for y in (y0..=y1).rev() {
                let line: String = (x0..=x1).map(|x| *cells.get(&(x, y)).unwrap_or(&'.')).collect();
                s.push_str(line.trim_end_matches('.'));
                s.push('\n');
            }
        }
        s
    }

    pub fn render_svg(&self) -> String {
        const CELL: i64 = 6;
        let (x0, x1) = min_max(self.placements.iter().map(|p| p.pos[0]));
        let (y0, y1) = min_max(self.placements.iter().map(|p| p.pos[1]));
        let (w, h) = ((x1 - x0 + 1) * CELL, (y1 - y0 + 1) * CELL);
        let mut s = String::new();
        writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">").unwrap();
        let mut ps: Vec<&Placement> = self.placements.iter().collect();
        ps.sort_by_key(|p| (p.pos[2], p.pos[1], p.pos[0]));
        for p in ps {
            let fill = match p.owner {
                Owner::Proc(i) => ["#f4d35e", "#ee964b", "#9bc53d", "#5bc0eb", "#c3423f", "#8e7dbe"][i % 6],
                Owner::Highway(..) => "#1f5fbf",
                Owner::Seed => "#2a9d3a",
            };
            writeln!(
                s,
                "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\"/>",
                (p.pos[0] - x0) * CELL,
                (y1 - p.pos[1]) * CELL
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }

    /// Checks that processor regions have pairwise disjoint convex hulls,
    /// each region taken as the union of its closed unit cells. Returns the
    /// first overlapping pair.
    ///
    /// Regions whose z-ranges are disjoint are separated; otherwise the
    /// projections onto the xy-plane must be disjoint.
    pub fn processor_hulls_disjoint(&self, n: usize) -> Result<(), (usize, usize)> {
        let mut cells: Vec<Vec<Point>> = vec![Vec::new(); n];
        for p in &self.placements {
            if let Owner::Proc(i) = p.owner {
                cells[i].push(p.pos);
            }
        }
        let hulls: Vec<Vec<[i64; 2]>> = cells
            .iter()
            .map(|c| convex_hull_2d(&c.iter().flat_map(|&[x, y, _]| cell_corners(x, y)).collect::<Vec<_>>()))
            .collect();
        let zr: Vec<Option<(i64, i64)>> = cells
            .iter()
            .map(|c| (!c.is_empty()).then(|| min_max(c.iter().map(|p| p[2]))))
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                let (Some((a0, a1)), Some((b0, b1))) = (zr[i], zr[j]) else {
                    continue;
                };
                // unit cells span [z, z + 1]
                if a1 + 1 < b0 || b1 + 1 < a0 {
                    continue;
                }
                if !hulls_disjoint(&hulls[i], &hulls[j]) {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }
}

/// Reads a configuration back from processor rows and highway agents.
///
/// A processor's state is the one written on its highest state-carrying row
/// (`s:`, `c:` or `h:` agents). A channel's queue is its `send:` markers in
/// send order, minus as many as the receiver holds `in:<sender>:` agents.
pub fn decode_lattice(m: &ProcessorSystem, snap: &Snapshot<'_>) -> Option<Config> {
    let Snapshot::Lattice(l) = snap else { return None };
    let chans = m.network.channels();
    let mut states: Vec<Option<(i64, usize)>> = vec![None; m.n()];
    let mut sent: Vec<Vec<(i64, i64, usize)>> = vec![Vec::new(); chans.len()];
    let mut taken = vec![0usize; chans.len()];
    for p in &l.placements {
        match p.owner {
            Owner::Proc(i) => {
                if let Some(rest) = p.agent.strip_prefix("in:") {
                    if rest != "-" {
                        let from: usize = rest.split(':').next()?.parse().ok()?;
                        taken[m.network.channel_index(from, i)?] += 1;
                    }
                    continue;
                }
                let Some(st) = ["s:", "c:", "h:"].iter().find_map(|pre| p.agent.strip_prefix(pre)) else {
                    continue;
                };
                let st: usize = st.parse().ok()?;
                let y = p.pos[1];
                let slot = states.get_mut(i)?;
                match *slot {
                    Some((yy, s)) if yy == y && s != st => return None,
                    Some((yy, _)) if yy >= y => {}
                    _ => *slot = Some((y, st)),
                }
            }
            Owner::Highway(i, j) => {
                if let Some(k) = p.agent.strip_prefix("send:") {
                    let ci = m.network.channel_index(i, j)?;
                    sent[ci].push((p.pos[1], p.pos[0], k.parse().ok()?));
                }
            }
            Owner::Seed => {}
        }
    }
    let mut queues = Vec::new();
    for (ci, mut s) in sent.into_iter().enumerate() {
        s.sort();
        if taken[ci] > s.len() {
            return None;
        }
        queues.push(s[taken[ci]..].iter().map(|e| e.2).collect());
    }
    Some(Config {
        states: states.into_iter().map(|s| s.map(|(_, st)| st)).collect::<Option<_>>()?,
        queues,
    })
}

fn owner_name(m: &ProcessorSystem, o: Owner) -> String {
    match o {
        Owner::Proc(i) => m.procs[i].name.clone(),
        Owner::Highway(i, j) => format!("highway({},{})", m.procs[i].name, m.procs[j].name),
        Owner::Seed => "seed".into(),
    }
}

fn glyph(o: Owner) -> char {
    match o {
        Owner::Proc(i) => char::from_digit((i % 36) as u32, 36).unwrap_or('?'),
        Owner::Highway(..) => '*',
        Owner::Seed => '#',
    }
}

fn min_max(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(a, b), v| (a.min(v), b.max(v)))
}

fn cell_corners(x: i64, y: i64) -> [[i64; 2]; 4] {
    [[x, y], [x + 1, y], [x, y + 1], [x + 1, y + 1]]
}

fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Counter-clockwise hull without collinear points (monotone chain).
pub fn convex_hull_2d(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut p = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn axes(h: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let n = h.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = h[i];
        let b = h[(i + 1) % n];
        let d = [b[0] - a[0], b[1] - a[1]];
        out.push([-d[1], d[0]]);
        // degenerate hulls also need the edge direction itself
        if n <= 2 {
            out.push(d);
        }
    }
    out
}

fn project(h: &[[i64; 2]], ax: [i64; 2]) -> (i128, i128) {
    h.iter()
        .map(|p| p[0] as i128 * ax[0] as i128 + p[1] as i128 * ax[1] as i128)
        .fold((i128::MAX, i128::MIN), |(a, b), v| (a.min(v), b.max(v)))
}

/// Whether two closed convex polygons (hull vertex lists) are disjoint.
/// Touching counts as intersecting.
pub fn hulls_disjoint(a: &[[i64; 2]], b: &[[i64; 2]]) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    axes(a).into_iter().chain(axes(b)).filter(|ax| *ax != [0, 0]).any(|ax| {
        let (a0, a1) = project(a, ax);
        let (b0, b1) = project(b, ax);
        a1 < b0 || b1 < a0
    }) || (a.len() == 1 && b.len() == 1 && a != b)
}

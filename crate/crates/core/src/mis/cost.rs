//! Bounding boxes and exact convex hull volumes of lattice assemblies.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;

use crate::rng;
use crate::sim::Point;

use super::MisError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceCostReport {
    pub min: Point,
    pub max: Point,
    /// Side lengths in unit cells.
    pub dims: [i64; 3],
    /// Volume of the bounding box.
    pub rectangular: i64,
    /// Six times the volume of the hull of all occupied unit cubes.
    pub convex_volume6: i128,
    pub occupied: usize,
}

impl SurfaceCostReport {
    pub fn convex(&self) -> f64 {
        self.convex_volume6 as f64 / 6.0
    }
}

/// Box and hull of the unit cubes at `points`.
pub fn rectangular_surface_cost(points: &[Point]) -> Result<SurfaceCostReport, MisError> {
    let distinct: BTreeSet<Point> = points.iter().copied().collect();
    let first = *distinct.iter().next().ok_or(MisError::EmptyAssembly)?;
    let (mut min, mut max) = (first, first);
    for p in &distinct {
        for a in 0..3 {
            min[a] = min[a].min(p[a]);
            max[a] = max[a].max(p[a]);
        }
    }
    let dims = [0, 1, 2].map(|a| max[a] - min[a] + 1);
    Ok(SurfaceCostReport {
        min,
        max,
        dims,
        rectangular: dims.iter().product(),
        convex_volume6: convex_volume6(&cube_corners(&distinct)),
        occupied: distinct.len(),
    })
}

/// Corners of unit cubes that can be hull vertices: per (x, y) column only
/// the lowest and highest cube matter.
fn cube_corners(points: &BTreeSet<Point>) -> Vec<Point> {
    let mut ends: std::collections::BTreeMap<(i64, i64), (i64, i64)> = std::collections::BTreeMap::new();
    for &[x, y, z] in points {
        let e = ends.entry((x, y)).or_insert((z, z));
        e.0 = e.0.min(z);
        e.1 = e.1.max(z);
    }
    let mut out = HashSet::new();
    for (&(x, y), &(lo, hi)) in &ends {
        for dx in 0..2 {
            for dy in 0..2 {
                out.insert([x + dx, y + dy, lo]);
                out.insert([x + dx, y + dy, hi + 1]);
            }
        }
    }
    let mut v: Vec<Point> = out.into_iter().collect();
    v.sort();
    v
}

fn sub(a: Point, b: Point) -> [i128; 3] {
    [0, 1, 2].map(|i| (a[i] - b[i]) as i128)
}

fn det(a: [i128; 3], b: [i128; 3], c: [i128; 3]) -> i128 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Positive when `d` lies on the side the face normal points to.
fn orient(a: Point, b: Point, c: Point, d: Point) -> i128 {
    det(sub(b, a), sub(c, a), sub(d, a))
}

/// Six times the volume of the convex hull of `pts` (incremental hull with
/// exact integer predicates). Zero for flat or tiny inputs.
pub fn convex_volume6(pts: &[Point]) -> i128 {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 4 {
        return 0;
    }
    let a = p[0];
    let Some(&b) = p.iter().find(|&&q| q != a) else { return 0 };
    let Some(&c) = p.iter().find(|&&q| {
        let [u, v] = [sub(b, a), sub(q, a)];
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]] != [0, 0, 0]
    }) else {
        return 0;
    };
    let Some(&d) = p.iter().find(|&&q| orient(a, b, c, q) != 0) else { return 0 };
    let mut faces: Vec<[Point; 3]> = if orient(a, b, c, d) < 0 {
        vec![[a, b, c], [a, d, b], [b, d, c], [c, d, a]]
    } else {
        vec![[a, c, b], [a, b, d], [b, c, d], [c, a, d]]
    };
    let mut rest: Vec<Point> = p.into_iter().filter(|q| ![a, b, c, d].contains(q)).collect();
    rest.shuffle(&mut rng::derive(0, 0xc0));
    for q in rest {
        let visible: Vec<bool> = faces.iter().map(|f| orient(f[0], f[1], f[2], q) > 0).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let lit: HashSet<(Point, Point)> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| v)
            .flat_map(|(f, _)| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .collect();
        let horizon: Vec<(Point, Point)> = lit.iter().copied().filter(|&(u, v)| !lit.contains(&(v, u))).collect();
        let mut kept: Vec<[Point; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        kept.extend(horizon.into_iter().map(|(u, v)| [u, v, q]));
        faces = kept;
    }
    let o = faces[0][0];
    faces.iter().map(|f| -orient(f[0], f[1], f[2], o)).sum()
}

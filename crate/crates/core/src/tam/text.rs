//! Tileset text format and renderers.
//!
//! ```text
//! tile seed N=r:2 W=z:2
//! tile b0 E=z:2 W=z:2 N=b0:1
//! bond b0 b0          # optional; identity binding when absent
//! seed at 3,0 seed
//! window 0 3 0 3
//! ```
//!
//! Missing sides carry the null glue.

use std::fmt::Write as _;

use thiserror::Error;

use crate::text::{lines, parse_num, ParseError};

use super::{Assembly, Glue, Side, TamError, TileAssemblySystem, TileType, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilesetParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Tam(#[from] TamError),
}

fn parse_glue(line: usize, tok: &str) -> Result<(Side, Glue), ParseError> {
    let (side, rest) = tok
        .split_once('=')
        .ok_or_else(|| ParseError::new(line, format!("expected SIDE=glue:strength, got `{tok}`")))?;
    let side = match side {
        "N" => Side::N,
        "S" => Side::S,
        "E" => Side::E,
        "W" => Side::W,
        _ => return Err(ParseError::new(line, format!("unknown side `{side}`"))),
    };
    let (name, strength) = rest
        .split_once(':')
        .ok_or_else(|| ParseError::new(line, format!("glue `{rest}` has no strength")))?;
    let strength = parse_num(line, strength, "strength")?;
    let glue = Glue::new(name, strength).map_err(|e| ParseError::new(line, e.to_string()))?;
    Ok((side, glue))
}

pub fn parse_tileset(src: &str) -> Result<TileAssemblySystem, TilesetParseError> {
    let mut tiles = Vec::new();
    let mut bonds = Vec::new();
    let mut seed = Vec::new();
    let mut window = None;
    for (line, toks) in lines(src) {
        match toks[0] {
            "tile" => {
                let name = toks
                    .get(1)
                    .ok_or_else(|| ParseError::new(line, "tile needs a name"))?;
                let mut glues = [Glue::null(), Glue::null(), Glue::null(), Glue::null()];
                for tok in &toks[2..] {
                    let (side, g) = parse_glue(line, tok)?;
                    glues[side.index()] = g;
                }
                let [n, s, e, w] = glues;
                tiles.push(TileType::new(*name, n, s, e, w));
            }
            "bond" => {
                let [_, a, b] = toks[..] else {
                    return Err(ParseError::new(line, "expected `bond <glue> <glue>`").into());
                };
                bonds.push((a.to_string(), b.to_string()));
            }
            "seed" => {
                let [_, "at", pos, name] = toks[..] else {
                    return Err(ParseError::new(line, "expected `seed at x,y <tile>`").into());
                };
                let (x, y) = pos
                    .split_once(',')
                    .ok_or_else(|| ParseError::new(line, "expected x,y"))?;
                seed.push((
                    (parse_num(line, x, "x")?, parse_num(line, y, "y")?),
                    name.to_string(),
                ));
            }
            "window" => {
                let [_, a, b, c, d] = toks[..] else {
                    return Err(ParseError::new(line, "expected `window xmin xmax ymin ymax`").into());
                };
                window = Some(Window {
                    xmin: parse_num(line, a, "xmin")?,
                    xmax: parse_num(line, b, "xmax")?,
                    ymin: parse_num(line, c, "ymin")?,
                    ymax: parse_num(line, d, "ymax")?,
                });
            }
            other => return Err(ParseError::new(line, format!("unknown directive `{other}`")).into()),
        }
    }
    if bonds.is_empty() {
        bonds = TileAssemblySystem::identity_binding(&tiles);
    }
    let seed = seed.iter().map(|(p, n)| (*p, n.as_str())).collect();
    Ok(TileAssemblySystem::new(tiles, seed, bonds, window)?)
}

fn bounds(a: &Assembly) -> Option<(i32, i32, i32, i32)> {
    let xs = a.tiles.keys().map(|p| p.0);
    let ys = a.tiles.keys().map(|p| p.1);
    Some((xs.clone().min()?, xs.max()?, ys.clone().min()?, ys.max()?))
}

/// One row per y (top row first), each cell the tile name padded to the
/// widest name, `.` for empty cells.
pub fn render_ascii(sys: &TileAssemblySystem, a: &Assembly) -> String {
    let Some((x0, x1, y0, y1)) = bounds(a) else {
        return String::new();
    };
    let width = sys.tiles.iter().map(|t| t.name.len()).max().unwrap_or(1);
    let mut s = String::new();
    for y in (y0..=y1).rev() {
        let row: Vec<String> = (x0..=x1)
            .map(|x| match a.get((x, y)) {
                Some(t) => format!("{:<width$}", sys.tiles[t].name),
                None => format!("{:<width$}", "."),
            })
            .collect();
        s.push_str(row.join(" ").trim_end());
        s.push('\n');
    }
    s
}

pub fn render_svg(sys: &TileAssemblySystem, a: &Assembly) -> String {
    const CELL: i32 = 40;
    let Some((x0, x1, y0, y1)) = bounds(a) else {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n".into();
    };
    let (w, h) = ((x1 - x0 + 1) * CELL, (y1 - y0 + 1) * CELL);
    let mut s = String::new();
    writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">").unwrap();
    for (&(x, y), &t) in &a.tiles {
        let (px, py) = ((x - x0) * CELL, (y1 - y) * CELL);
        writeln!(
            s,
            "  <rect x=\"{px}\" y=\"{py}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#eef\" stroke=\"#333\"/>"
        )
        .unwrap();
        writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            px + CELL / 2,
            py + CELL / 2 + 4,
            escape(&sys.tiles[t].name)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders() {
        let src = "tile s E=a:2\ntile t W=a:2\nseed at 0,0 s\nwindow 0 1 0 0\n";
        let sys = parse_tileset(src).unwrap();
        assert_eq!(sys.tiles.len(), 2);
        let mut a = sys.seed.clone();
        a.tiles.insert((1, 0), 1);
        assert_eq!(render_ascii(&sys, &a), "s t\n");
        assert!(render_svg(&sys, &a).contains(">t</text>"));
    }

    #[test]
    fn bad_side_reports_line() {
        let err = parse_tileset("tile s\ntile t Q=a:1\n").unwrap_err();
        assert!(matches!(err, TilesetParseError::Parse(ParseError { line: 2, .. })));
    }
}

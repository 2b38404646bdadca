use std::collections::HashMap;

use super::{Embedding, LabeledGraph};

/// All label-preserving embeddings of `pattern` into `target`, sorted
/// lexicographically by the image vector.
///
/// Backtracking over pattern vertices in a connectivity-first order: a vertex
/// with an already-placed neighbor only considers that neighbor's image's
/// neighbors as candidates. Degree and label checks prune the rest.
pub fn find_embeddings(pattern: &LabeledGraph, target: &LabeledGraph) -> Vec<Embedding> {
    let mut out = Vec::new();
    search(pattern, target, &mut |m| {
        out.push(Embedding { map: m.to_vec() });
        true
    });
    out.sort();
    out
}

pub(crate) fn has_embedding(pattern: &LabeledGraph, target: &LabeledGraph) -> bool {
    let mut found = false;
    search(pattern, target, &mut |_| {
        found = true;
        false
    });
    found
}

/// Runs the backtracking search, calling `visit` on each complete map.
/// `visit` returns `false` to stop early.
pub(crate) fn search(
    pattern: &LabeledGraph,
    target: &LabeledGraph,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let n = pattern.vertex_count();
    if n == 0 {
        visit(&[]);
        return;
    }
    if n > target.vertex_count() {
        return;
    }
    let mut by_label: HashMap<&str, Vec<usize>> = HashMap::new();
    for v in 0..target.vertex_count() {
        by_label.entry(target.label(v).as_str()).or_default().push(v);
    }
    let mut pools: Vec<&[usize]> = Vec::with_capacity(n);
    for x in 0..n {
        match by_label.get(pattern.label(x).as_str()) {
            Some(p) => pools.push(p.as_slice()),
            None => return,
        }
    }
    let order = plan(pattern, &pools);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; target.vertex_count()];
    let ctx = Ctx {
        pattern,
        target,
        pools: &pools,
        order: &order,
    };
    ctx.step(0, &mut map, &mut used, visit);
}

/// Pattern vertex order: rarest label first, then repeatedly the unplaced
/// vertex with the most placed neighbors (ties: smaller pool, lower index).
fn plan(pattern: &LabeledGraph, pools: &[&[usize]]) -> Vec<usize> {
    let n = pattern.vertex_count();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&x| !placed[x])
            .min_by_key(|&x| {
                let links = pattern.neighbors(x).iter().filter(|&&y| placed[y]).count();
                (std::cmp::Reverse(links), pools[x].len(), x)
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Ctx<'a> {
    pattern: &'a LabeledGraph,
    target: &'a LabeledGraph,
    pools: &'a [&'a [usize]],
    order: &'a [usize],
}

impl Ctx<'_> {
    fn step(
        &self,
        depth: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == self.order.len() {
            return visit(map);
        }
        let x = self.order[depth];
        let anchor = self
            .pattern
            .neighbors(x)
            .iter()
            .copied()
            .find(|&y| map[y] != usize::MAX);
        let label = self.pattern.label(x);
        let need = self.pattern.degree(x);
        let try_one = |gx: usize, map: &mut Vec<usize>, used: &mut Vec<bool>,
                       visit: &mut dyn FnMut(&[usize]) -> bool|
         -> bool {
            if used[gx] || self.target.label(gx) != label || self.target.degree(gx) < need {
                return true;
            }
            let consistent = self
                .pattern
                .neighbors(x)
                .iter()
                .all(|&y| map[y] == usize::MAX || self.target.has_edge(gx, map[y]));
            if !consistent {
                return true;
            }
            map[x] = gx;
            used[gx] = true;
            let go_on = self.step(depth + 1, map, used, visit);
            used[gx] = false;
            map[x] = usize::MAX;
            go_on
        };
        match anchor {
            Some(y) => {
                let candidates: Vec<usize> = self.target.neighbors(map[y]).iter().copied().collect();
                for gx in candidates {
                    if !try_one(gx, map, used, visit) {
                        return false;
                    }
                }
            }
            None => {
                for &gx in self.pools[x] {
                    if !try_one(gx, map, used, visit) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_lookup() {
        let l = LabeledGraph::with_labels(["a"]);
        let g = LabeledGraph::with_labels(["a", "b"]);
        assert_eq!(find_embeddings(&l, &g), vec![Embedding { map: vec![0] }]);
    }

    #[test]
    fn identity_is_found() {
        let g = LabeledGraph::from_parts(["a", "b", "a", "c"], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let embs = find_embeddings(&g, &g);
        assert!(embs.contains(&Embedding { map: vec![0, 1, 2, 3] }));
    }

    #[test]
    fn edge_into_triangle() {
        let l = LabeledGraph::from_parts(["a", "b"], [(0, 1)]).unwrap();
        let g = LabeledGraph::from_parts(["a", "b", "b"], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let embs = find_embeddings(&l, &g);
        assert_eq!(
            embs,
            vec![Embedding { map: vec![0, 1] }, Embedding { map: vec![0, 2] }]
        );
    }

    #[test]
    fn empty_pattern_has_one_embedding() {
        let g = LabeledGraph::with_labels(["a"]);
        assert_eq!(find_embeddings(&LabeledGraph::new(), &g).len(), 1);
    }
}

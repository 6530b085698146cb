//! Isomorphism search by colour refinement plus backtracking, and the
//! automorphism orbit partition built from it.

use std::collections::{BTreeMap, VecDeque};

use super::Graph;
use crate::error::{Error, Result};

/// Largest graph accepted by [`automorphism_orbits`].
pub const MAX_AUTOMORPHISM_VERTICES: usize = 16;

/// Stable colour refinement run jointly on `g ⊔ h` so that colours are
/// comparable across the two graphs.
fn refine_jointly(g: &Graph, h: &Graph, mut colours: Vec<usize>) -> Vec<usize> {
    let n = g.n();
    let neighbours = |i: usize| -> &[usize] {
        if i < n {
            g.neighbours(i)
        } else {
            h.neighbours(i - n)
        }
    };
    let offset = |i: usize| if i < n { 0 } else { n };
    let mut count = colours.iter().collect::<std::collections::BTreeSet<_>>().len();
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..colours.len())
            .map(|i| {
                let mut nb: Vec<usize> = neighbours(i).iter().map(|&j| colours[j + offset(i)]).collect();
                nb.sort_unstable();
                (colours[i], nb)
            })
            .collect();
        let mut ids: BTreeMap<&(usize, Vec<usize>), usize> = BTreeMap::new();
        for s in &signatures {
            let next = ids.len();
            ids.entry(s).or_insert(next);
        }
        // Renumber in signature order so colours do not depend on vertex labels.
        let ordered: BTreeMap<&(usize, Vec<usize>), usize> =
            ids.keys().enumerate().map(|(rank, k)| (*k, rank)).collect();
        let refined: Vec<usize> = signatures.iter().map(|s| ordered[s]).collect();
        let new_count = ordered.len();
        colours = refined;
        if new_count == count {
            return colours;
        }
        count = new_count;
    }
}

/// A bijection `σ` with `g.has_edge(a, b) == h.has_edge(σa, σb)`, optionally
/// constrained to send `fix.0` to `fix.1`.
pub fn find_isomorphism(g: &Graph, h: &Graph, fix: Option<(usize, usize)>) -> Option<Vec<usize>> {
    let n = g.n();
    if h.n() != n || g.edge_count() != h.edge_count() {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let mut init: Vec<usize> = (0..n).map(|v| g.degree(v)).chain((0..n).map(|v| h.degree(v))).collect();
    if let Some((u, v)) = fix {
        if u >= n || v >= n {
            return None;
        }
        init[u] = n + 1;
        init[n + v] = n + 1;
    }
    let colours = refine_jointly(g, h, init);
    let (cg, ch) = colours.split_at(n);
    let mut sg = cg.to_vec();
    let mut sh = ch.to_vec();
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return None;
    }

    // Visit g in BFS order from the fixed vertex (or the rarest colour) so
    // that most vertices have an already-mapped neighbour.
    let mut freq = BTreeMap::new();
    for &c in cg {
        *freq.entry(c).or_insert(0usize) += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| (freq[&cg[v]], v));
    if let Some((u, _)) = fix {
        roots.retain(|&v| v != u);
        roots.insert(0, u);
    }
    for r in roots {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut queue = VecDeque::from([r]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in g.neighbours(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let position: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    let anchor: Vec<Option<usize>> = order
        .iter()
        .map(|&w| g.neighbours(w).iter().copied().filter(|&p| position[p] < position[w]).min_by_key(|&p| position[p]))
        .collect();

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn extend(
        depth: usize,
        g: &Graph,
        h: &Graph,
        order: &[usize],
        anchor: &[Option<usize>],
        cg: &[usize],
        ch: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let w = order[depth];
        let pool: Vec<usize> = match anchor[depth] {
            Some(p) => h.neighbours(map[p]).to_vec(),
            None => (0..h.n()).collect(),
        };
        for c in pool {
            if used[c] || ch[c] != cg[w] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&z| g.has_edge(w, z) == h.has_edge(c, map[z]));
            if !consistent {
                continue;
            }
            map[w] = c;
            used[c] = true;
            if extend(depth + 1, g, h, order, anchor, cg, ch, map, used) {
                return true;
            }
            used[c] = false;
            map[w] = usize::MAX;
        }
        false
    }
    extend(0, g, h, &order, &anchor, cg, ch, &mut map, &mut used).then_some(map)
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h, None).is_some()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Orbits of the automorphism group, each sorted, ordered by least element.
pub fn automorphism_orbits(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    if n > MAX_AUTOMORPHISM_VERTICES {
        return Err(Error::GraphTooLarge { n, limit: MAX_AUTOMORPHISM_VERTICES });
    }
    let colours = refine_jointly(g, g, (0..n).map(|v| g.degree(v)).chain((0..n).map(|v| g.degree(v))).collect());
    let mut parent: Vec<usize> = (0..n).collect();
    for u in 0..n {
        for v in u + 1..n {
            if colours[u] != colours[v] || find(&mut parent, u) == find(&mut parent, v) {
                continue;
            }
            if let Some(sigma) = find_isomorphism(g, g, Some((u, v))) {
                for (i, &j) in sigma.iter().enumerate() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut orbits: Vec<Vec<usize>> = groups.into_values().collect();
    orbits.sort_by_key(|o| o[0]);
    Ok(orbits)
}

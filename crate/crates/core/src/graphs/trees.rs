//! Unlabelled free trees, generated from a catalog of rooted trees and
//! deduplicated by a centroid-rooted canonical code.

use std::collections::BTreeMap;

use super::Graph;
use crate::error::{Error, Result};

pub const MAX_TREE_VERTICES: usize = 12;

/// Rooted trees by size, as parenthesis codes.
fn rooted_catalog(n: usize) -> Vec<Vec<String>> {
    let mut cat: Vec<Vec<String>> = vec![Vec::new(), vec!["()".to_string()]];
    for k in 2..=n {
        let mut out = Vec::new();
        let mut children = Vec::new();
        forests(&cat, k - 1, (k - 1, usize::MAX), &mut children, &mut out);
        cat.push(out);
    }
    cat
}

/// Multisets of rooted trees with total size `remaining`, listed as
/// non-increasing `(size, index)` sequences no larger than `bound`.
fn forests(
    cat: &[Vec<String>],
    remaining: usize,
    bound: (usize, usize),
    children: &mut Vec<(usize, usize)>,
    out: &mut Vec<String>,
) {
    if remaining == 0 {
        let mut code = String::from("(");
        for &(s, i) in children.iter() {
            code.push_str(&cat[s][i]);
        }
        code.push(')');
        out.push(code);
        return;
    }
    for size in (1..=remaining.min(bound.0)).rev() {
        let top = if size == bound.0 { bound.1.min(cat[size].len().saturating_sub(1)) } else { cat[size].len() - 1 };
        for idx in (0..=top).rev() {
            children.push((size, idx));
            forests(cat, remaining - size, (size, idx), children, out);
            children.pop();
        }
    }
}

fn graph_from_code(code: &str) -> Graph {
    let n = code.len() / 2;
    let mut g = Graph::empty(n);
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0;
    for c in code.bytes() {
        if c == b'(' {
            if let Some(&parent) = stack.last() {
                g.add_edge(parent, next).expect("tree codes are simple");
            }
            stack.push(next);
            next += 1;
        } else {
            stack.pop();
        }
    }
    g
}

fn rooted_code(g: &Graph, v: usize, parent: usize) -> String {
    let mut parts: Vec<String> = g.neighbours(v).iter().filter(|&&w| w != parent).map(|&w| rooted_code(g, w, v)).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    format!("({})", parts.concat())
}

fn subtree_sizes(g: &Graph, v: usize, parent: usize, sizes: &mut [usize]) -> usize {
    let mut s = 1;
    for &w in g.neighbours(v) {
        if w != parent {
            s += subtree_sizes(g, w, v, sizes);
        }
    }
    sizes[v] = s;
    s
}

/// Canonical code of a free tree: the least rooted code over its centroids.
fn free_code(g: &Graph) -> String {
    let n = g.n();
    let mut sizes = vec![0; n];
    subtree_sizes(g, 0, usize::MAX, &mut sizes);
    let heaviest = |v: usize| -> usize {
        let mut worst = n - sizes[v];
        for &w in g.neighbours(v) {
            if sizes[w] < sizes[v] {
                worst = worst.max(sizes[w]);
            }
        }
        worst
    };
    let best = (0..n).map(heaviest).min().unwrap_or(0);
    (0..n).filter(|&v| heaviest(v) == best).map(|v| rooted_code(g, v, usize::MAX)).min().unwrap_or_default()
}

/// All unlabelled trees on `n` vertices, one representative each, in a
/// deterministic order and labelling.
pub fn enumerate_trees(n: usize) -> Result<Vec<Graph>> {
    if n == 0 {
        return Err(Error::InvalidArgument("trees need at least one vertex".into()));
    }
    if n > MAX_TREE_VERTICES {
        return Err(Error::GraphTooLarge { n, limit: MAX_TREE_VERTICES });
    }
    let cat = rooted_catalog(n);
    let mut unique: BTreeMap<String, ()> = BTreeMap::new();
    for code in &cat[n] {
        unique.insert(free_code(&graph_from_code(code)), ());
    }
    Ok(unique.keys().map(|c| graph_from_code(c)).collect())
}

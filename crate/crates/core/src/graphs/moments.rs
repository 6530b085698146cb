//! Exact walk moments `μ_k(v) = Σ_j λ_j^k |e_j(v)|²`.
//!
//! For the adjacency operator these are `(A^k)_{vv}` (closed walks). For the
//! normalized Laplacian the diagonal similarity `L = D^{1/2}(I - D^{-1}A)D^{-1/2}`
//! gives `(L^k)_{vv} = ((I - D^{-1}A)^k)_{vv}`, which has rational entries.
//! Two vertex measures on the same spectrum (at most `n` atoms) agree iff
//! their moments agree for `k < n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::spectrum::{float_cospectral, spectrum};
use super::{Graph, Operator};
use crate::error::{Error, Result};

/// Loose pre-filter tolerance; verdicts always come from exact moments.
const PREFILTER_TOL: f64 = 1e-6;

/// Sparse rows of the operator as exact rationals.
fn exact_rows(g: &Graph, operator: Operator) -> Result<Vec<Vec<(usize, BigRational)>>> {
    let n = g.n();
    match operator {
        Operator::Adjacency => Ok((0..n)
            .map(|i| g.neighbours(i).iter().map(|&j| (j, BigRational::one())).collect())
            .collect()),
        Operator::NormalizedLaplacian => {
            if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
                return Err(Error::IsolatedVertex(v));
            }
            Ok((0..n)
                .map(|i| {
                    let step = -BigRational::new(BigInt::one(), BigInt::from(g.degree(i)));
                    let mut row: Vec<(usize, BigRational)> = vec![(i, BigRational::one())];
                    row.extend(g.neighbours(i).iter().map(|&j| (j, step.clone())));
                    row
                })
                .collect())
        }
    }
}

/// `μ_0 ..= μ_{k_max}` at vertex `v`, exactly.
pub fn walk_moments(g: &Graph, v: usize, k_max: usize, operator: Operator) -> Result<Vec<BigRational>> {
    if v >= g.n() {
        return Err(Error::InvalidArgument(format!("vertex {v} out of range for {} vertices", g.n())));
    }
    let rows = exact_rows(g, operator)?;
    Ok(moments_with_rows(&rows, v, k_max))
}

fn moments_with_rows(rows: &[Vec<(usize, BigRational)>], v: usize, k_max: usize) -> Vec<BigRational> {
    let n = rows.len();
    // x_k = M^k e_v, μ_k = (x_k)_v.
    let mut x: Vec<BigRational> = vec![BigRational::zero(); n];
    x[v] = BigRational::one();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(BigRational::one());
    for _ in 0..k_max {
        let next: Vec<BigRational> = rows
            .iter()
            .map(|row| {
                row.iter().fold(BigRational::zero(), |acc, (j, a)| {
                    if x[*j].is_zero() {
                        acc
                    } else {
                        acc + a * &x[*j]
                    }
                })
            })
            .collect();
        x = next;
        out.push(x[v].clone());
    }
    out
}

/// All moments `k <= n-1` for every vertex.
fn all_moments(g: &Graph, operator: Operator) -> Result<Vec<Vec<BigRational>>> {
    let rows = exact_rows(g, operator)?;
    let k_max = g.n().saturating_sub(1);
    Ok((0..g.n()).map(|v| moments_with_rows(&rows, v, k_max)).collect())
}

/// Exact verdict: `u` and `v` are cospectral for `operator`.
pub fn exact_cospectral(g: &Graph, operator: Operator, u: usize, v: usize) -> Result<bool> {
    let k = g.n().saturating_sub(1);
    Ok(walk_moments(g, u, k, operator)? == walk_moments(g, v, k, operator)?)
}

/// Unordered pairs `(u, v)`, `u < v`, of cospectral vertices.
pub fn cospectral_vertex_pairs(g: &Graph, operator: Operator) -> Result<Vec<(usize, usize)>> {
    g.require_connected()?;
    let spec = spectrum(g, operator, super::DEFAULT_CLUSTER_TOL)?;
    let mut pairs = Vec::new();
    let mut moments: Option<Vec<Vec<BigRational>>> = None;
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if !float_cospectral(&spec, u, v, PREFILTER_TOL)? {
                continue;
            }
            let m = match &moments {
                Some(m) => m,
                None => moments.insert(all_moments(g, operator)?),
            };
            if m[u] == m[v] {
                pairs.push((u, v));
            }
        }
    }
    Ok(pairs)
}

use super::jacobi::symmetric_eigen;
use super::{Graph, Operator};
use crate::counting::{compare, Comparison, CountingFunction, Provenance, SpectralTail};
use crate::error::{Error, Result};

/// Eigenvalues closer than `tol · max(1, |λ|)` share a cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j) as u8 as f64).collect()).collect()
}

/// `I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian(g: &Graph) -> Result<Vec<Vec<f64>>> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    g.require_connected()?;
    let n = g.n();
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        1.0
                    } else if g.has_edge(i, j) {
                        -inv_sqrt[i] * inv_sqrt[j]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCluster {
    /// Mean of the clustered eigenvalues.
    pub value: f64,
    pub multiplicity: usize,
}

/// Full spectrum plus per-cluster projector diagonals.
#[derive(Clone, Debug)]
pub struct GraphSpectrum {
    pub operator: Operator,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<SpectralCluster>,
    /// `vertex_weights[c][v] = Σ_{j ∈ c} |e_j(v)|²`.
    pub vertex_weights: Vec<Vec<f64>>,
    graph_id: String,
}

impl GraphSpectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Weights of `v` across clusters.
    pub fn weights_of(&self, v: usize) -> Vec<f64> {
        self.vertex_weights.iter().map(|c| c[v]).collect()
    }

    pub fn graph_id(&self) -> &str {
        &self.graph_id
    }
}

/// Eigendecomposition of the chosen operator with eigenvalue clustering.
pub fn spectrum(g: &Graph, operator: Operator, cluster_tol: f64) -> Result<GraphSpectrum> {
    let matrix = match operator {
        Operator::Adjacency => {
            g.require_connected()?;
            adjacency_matrix(g)
        }
        Operator::NormalizedLaplacian => normalized_laplacian(g)?,
    };
    let eig = symmetric_eigen(&matrix)?;
    let n = g.n();
    let mut clusters: Vec<SpectralCluster> = Vec::new();
    let mut weights: Vec<Vec<f64>> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, clusters: &mut Vec<SpectralCluster>, weights: &mut Vec<Vec<f64>>| {
        if members.is_empty() {
            return;
        }
        let value = members.iter().map(|&k| eig.values[k]).sum::<f64>() / members.len() as f64;
        let w = (0..n)
            .map(|v| members.iter().map(|&k| eig.vectors[k][v] * eig.vectors[k][v]).sum())
            .collect();
        clusters.push(SpectralCluster { value, multiplicity: members.len() });
        weights.push(w);
        members.clear();
    };
    for k in 0..n {
        if let Some(&last) = members.last() {
            let prev: f64 = eig.values[last];
            if eig.values[k] - prev >= cluster_tol * prev.abs().max(1.0) {
                flush(&mut members, &mut clusters, &mut weights);
            }
        }
        members.push(k);
    }
    flush(&mut members, &mut clusters, &mut weights);
    Ok(GraphSpectrum {
        operator,
        eigenvalues: eig.values.clone(),
        clusters,
        vertex_weights: weights,
        graph_id: g.id(),
    })
}

/// `N_v(λ) = Σ_{λ_j <= λ} |e_j(v)|²` as a counting function with jumps at
/// the cluster values.
pub fn vertex_counting_function(spec: &GraphSpectrum, v: usize) -> Result<CountingFunction> {
    if v >= spec.n() {
        return Err(Error::InvalidArgument(format!("vertex {v} out of range for {} vertices", spec.n())));
    }
    let cutoff = spec.clusters.last().map_or(0.0, |c| c.value);
    CountingFunction::from_raw(
        spec.clusters.iter().zip(&spec.vertex_weights).map(|(c, w)| (c.value, w[v])),
        cutoff,
        Provenance { model: format!("graph:{}", spec.graph_id), point: vec![v as f64], second_point: None },
        SpectralTail::Complete,
    )
}

/// Floating-point test that `u` and `v` have the same counting function.
pub fn float_cospectral(spec: &GraphSpectrum, u: usize, v: usize, tol: f64) -> Result<bool> {
    let a = vertex_counting_function(spec, u)?;
    let b = vertex_counting_function(spec, v)?;
    Ok(compare(&a, &b, tol, tol)? == Comparison::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn k2_normalized() {
        let k2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let l = normalized_laplacian(&k2).unwrap();
        assert_eq!(l, vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let s = spectrum(&k2, Operator::NormalizedLaplacian, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-15 && (s.eigenvalues[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn p3_weights() {
        let s = spectrum(&p3(), Operator::NormalizedLaplacian, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(s.clusters.len(), 3);
        for (c, expect) in s.clusters.iter().zip([0.0, 1.0, 2.0]) {
            assert!((c.value - expect).abs() < 1e-14);
        }
        for (got, expect) in s.weights_of(0).iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - expect).abs() < 1e-14);
        }
        for (got, expect) in s.weights_of(1).iter().zip([0.5, 0.0, 0.5]) {
            assert!((got - expect).abs() < 1e-14);
        }
        let n0 = vertex_counting_function(&s, 0).unwrap();
        assert!((n0.evaluate(1.5).unwrap() - 0.75).abs() < 1e-14);
        assert!((n0.evaluate(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((n0.evaluate(7.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(float_cospectral(&s, 0, 2, 1e-9).unwrap());
        assert!(!float_cospectral(&s, 0, 1, 1e-9).unwrap());
    }

    #[test]
    fn harmonic_vector() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let h: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
        for row in &l {
            let s: f64 = row.iter().zip(&h).map(|(a, b)| a * b).sum();
            assert!(s.abs() < 1e-14);
        }
    }

    #[test]
    fn complete_graph_vertices_look_alike() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        let k5 = Graph::from_edges(5, &edges).unwrap();
        let s = spectrum(&k5, Operator::Adjacency, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(s.clusters.len(), 2);
        assert_eq!(s.clusters[0].multiplicity, 4);
        for v in 1..5 {
            for (a, b) in s.weights_of(0).iter().zip(s.weights_of(v)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_errors() {
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(spectrum(&two_k2, Operator::Adjacency, 1e-9), Err(Error::Disconnected)));
        let isolated = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(normalized_laplacian(&isolated), Err(Error::IsolatedVertex(2))));
    }
}

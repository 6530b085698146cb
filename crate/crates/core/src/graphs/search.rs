//! Scanning a collection of graphs for cospectral vertices that no
//! automorphism relates.

use rayon::prelude::*;
use serde::Serialize;

use super::{automorphism_orbits, cospectral_vertex_pairs, Graph, Operator};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    /// Position of the graph in the input.
    #[serde(skip)]
    pub index: usize,
    pub graph6: String,
    /// Cospectral pairs lying in different automorphism orbits.
    pub pairs: Vec<(usize, usize)>,
    pub orbits: Vec<Vec<usize>>,
}

#[derive(Debug, Default)]
pub struct FailureSearch {
    pub failures: Vec<Failure>,
    /// Graphs that could not be analysed, with their input position.
    pub errors: Vec<(usize, Error)>,
}

fn examine(index: usize, g: &Graph, operator: Operator) -> Result<Option<Failure>, Error> {
    let pairs = cospectral_vertex_pairs(g, operator)?;
    if pairs.is_empty() {
        return Ok(None);
    }
    let orbits = automorphism_orbits(g)?;
    let mut orbit_of = vec![0; g.n()];
    for (k, o) in orbits.iter().enumerate() {
        for &v in o {
            orbit_of[v] = k;
        }
    }
    let bad: Vec<(usize, usize)> = pairs.into_iter().filter(|&(u, v)| orbit_of[u] != orbit_of[v]).collect();
    if bad.is_empty() {
        return Ok(None);
    }
    Ok(Some(Failure { index, graph6: g.id(), pairs: bad, orbits }))
}

/// Results are reported in input order regardless of scheduling.
pub fn find_echolocation_failures<I>(graphs: I, operator: Operator) -> FailureSearch
where
    I: IntoIterator<Item = Graph>,
{
    let graphs: Vec<Graph> = graphs.into_iter().collect();
    let outcomes: Vec<Result<Option<Failure>, Error>> =
        graphs.par_iter().enumerate().map(|(i, g)| examine(i, g, operator)).collect();
    let mut search = FailureSearch::default();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(Some(f)) => search.failures.push(f),
            Ok(None) => {}
            Err(e) => search.errors.push((i, e)),
        }
    }
    search
}

//! Pointwise counting functions `N_x(λ) = Σ_{λ_j <= λ} |e_j(x)|²`, their
//! timbre, and the two-point sums `Σ |e_j(x) + e_j(y)|²`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{enumerate_blocks, EigenspaceBlock, ModelGeometry, Point};

/// Relative floor below which a jump is treated as exactly zero.
pub const SUPPRESSION_THRESHOLD: f64 = 1e-14;
/// Default absolute frequency tolerance for [`compare`].
pub const DEFAULT_FREQUENCY_TOL: f64 = 1e-9;
/// Default absolute weight tolerance for [`compare`].
pub const DEFAULT_WEIGHT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub lambda: f64,
    pub weight: f64,
}

/// What is known about the spectrum beyond the cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralTail {
    /// Infinite spectrum with Weyl asymptotics in dimension `dim` on a
    /// manifold of volume `volume`.
    Weyl { dim: usize, volume: f64 },
    /// The enumerated spectrum is the whole spectrum (finite graphs).
    Complete,
}

/// Where a counting function came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// Model specification string, or `graph:<id>`.
    pub model: String,
    pub point: Vec<f64>,
    /// Second point of a two-point sum.
    pub second_point: Option<Vec<f64>>,
}

/// Right-continuous step function stored as its jumps.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingFunction {
    jumps: Vec<Jump>,
    suppressed: Vec<f64>,
    cutoff: f64,
    provenance: Provenance,
    tail: SpectralTail,
}

impl CountingFunction {
    /// Build from raw `(λ, w)` pairs with strictly increasing `λ <= cutoff`.
    /// Near-zero weights are moved to the suppressed list.
    pub fn from_raw(
        raw: impl IntoIterator<Item = (f64, f64)>,
        cutoff: f64,
        provenance: Provenance,
        tail: SpectralTail,
    ) -> Result<Self> {
        let mut jumps = Vec::new();
        let mut suppressed = Vec::new();
        let mut total = 0.0;
        let mut last = f64::NEG_INFINITY;
        for (lambda, weight) in raw {
            if !(lambda.is_finite() && weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite jump ({lambda}, {weight})")));
            }
            if lambda <= last {
                return Err(Error::InvalidArgument(format!(
                    "jump frequencies must strictly increase ({last} then {lambda})"
                )));
            }
            if lambda > cutoff {
                return Err(Error::OutOfRange { lambda, cutoff });
            }
            last = lambda;
            let mean = if jumps.is_empty() { 0.0 } else { total / jumps.len() as f64 };
            if weight < SUPPRESSION_THRESHOLD * mean.max(1.0) {
                if weight < -1e-9 * mean.max(1.0) {
                    return Err(Error::InvalidArgument(format!("negative jump {weight} at {lambda}")));
                }
                suppressed.push(lambda);
            } else {
                total += weight;
                jumps.push(Jump { lambda, weight });
            }
        }
        Ok(CountingFunction { jumps, suppressed, cutoff, provenance, tail })
    }

    /// Rebuild from already-validated parts, e.g. a deserialised file.
    pub fn from_parts(
        jumps: Vec<Jump>,
        suppressed: Vec<f64>,
        cutoff: f64,
        provenance: Provenance,
        tail: SpectralTail,
    ) -> Result<Self> {
        if jumps.windows(2).any(|w| w[0].lambda >= w[1].lambda) {
            return Err(Error::Format("jump frequencies must strictly increase".into()));
        }
        if let Some(j) = jumps.iter().find(|j| j.lambda > cutoff || !(j.weight > 0.0)) {
            return Err(Error::Format(format!("invalid jump ({}, {})", j.lambda, j.weight)));
        }
        Ok(CountingFunction { jumps, suppressed, cutoff, provenance, tail })
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Frequencies whose jump vanished (nodal points).
    pub fn suppressed(&self) -> &[f64] {
        &self.suppressed
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tail(&self) -> SpectralTail {
        self.tail
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// `N(λ) = Σ_{λ' <= λ} w(λ')`; refuses to extrapolate past the cutoff
    /// unless the spectrum is complete.
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        if lambda > self.cutoff && self.tail != SpectralTail::Complete {
            return Err(Error::OutOfRange { lambda, cutoff: self.cutoff });
        }
        let end = self.jumps.partition_point(|j| j.lambda <= lambda);
        Ok(self.jumps[..end].iter().map(|j| j.weight).sum())
    }

    /// Jump weight at `lambda` within `tol`, zero when absent.
    pub fn jump_at(&self, lambda: f64, tol: f64) -> f64 {
        let i = self.jumps.partition_point(|j| j.lambda < lambda - tol);
        match self.jumps.get(i) {
            Some(j) if (j.lambda - lambda).abs() <= tol => j.weight,
            _ => 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.jumps.iter().map(|j| j.weight).sum()
    }
}

/// Square roots of the jumps over distinct eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Timbre {
    pub entries: Vec<(f64, f64)>,
}

pub fn timbre(cf: &CountingFunction) -> Timbre {
    Timbre {
        entries: cf.jumps.iter().map(|j| (j.lambda, j.weight.sqrt())).collect(),
    }
}

impl Timbre {
    /// Squares the amplitudes back into jumps.
    pub fn to_raw_jumps(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|&(l, a)| (l, a * a)).collect()
    }
}

pub(crate) fn model_tail(model: &ModelGeometry) -> SpectralTail {
    SpectralTail::Weyl { dim: model.dimension(), volume: model.volume() }
}

/// `N_x` up to `cutoff` on `model`.
pub fn counting_function(model: &ModelGeometry, x: &Point, cutoff: f64) -> Result<CountingFunction> {
    model.validate_point(x)?;
    let blocks = enumerate_blocks(model, cutoff)?;
    counting_function_from_blocks(model, &blocks, x, cutoff)
}

/// `N_x` over a pre-enumerated block list (all blocks must be `<= cutoff`).
pub fn counting_function_from_blocks(
    model: &ModelGeometry,
    blocks: &[EigenspaceBlock],
    x: &Point,
    cutoff: f64,
) -> Result<CountingFunction> {
    let raw: Vec<(f64, f64)> = blocks
        .par_iter()
        .filter(|b| b.frequency() <= cutoff)
        .map(|b| (b.frequency(), b.weight(x)))
        .collect();
    CountingFunction::from_raw(
        raw,
        cutoff,
        Provenance { model: model.to_string(), point: x.coords().to_vec(), second_point: None },
        model_tail(model),
    )
}

/// `N_{x,y}(λ) = Σ_{λ_j <= λ} |e_j(x) + e_j(y)|²`, expanded blockwise as
/// `E(x,x) + E(y,y) + 2E(x,y)`.
pub fn two_point_counting(model: &ModelGeometry, x: &Point, y: &Point, cutoff: f64) -> Result<CountingFunction> {
    model.validate_point(x)?;
    model.validate_point(y)?;
    let blocks = enumerate_blocks(model, cutoff)?;
    let raw: Vec<(f64, f64)> = blocks
        .par_iter()
        .map(|b| {
            let w = b.weight(x) + b.weight(y) + 2.0 * b.kernel(x, y);
            // Exact cancellation leaves roundoff of either sign.
            let scale = b.weight(x) + b.weight(y);
            let w = if w.abs() <= 1e-13 * scale { 0.0 } else { w };
            (b.frequency(), w)
        })
        .collect();
    CountingFunction::from_raw(
        raw,
        cutoff,
        Provenance {
            model: model.to_string(),
            point: x.coords().to_vec(),
            second_point: Some(y.coords().to_vec()),
        },
        model_tail(model),
    )
}

/// Outcome of [`compare`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Comparison {
    Equal,
    /// First frequency where the jumps differ beyond tolerance.
    Discrepancy { lambda: f64, delta: f64 },
}

/// Jump-by-jump comparison of two counting functions.
///
/// Jumps present on one side only count as a weight difference equal to the
/// jump itself.
pub fn compare(a: &CountingFunction, b: &CountingFunction, frequency_tol: f64, weight_tol: f64) -> Result<Comparison> {
    if (a.cutoff - b.cutoff).abs() > frequency_tol {
        return Err(Error::CutoffMismatch(a.cutoff, b.cutoff));
    }
    let (ja, jb) = (&a.jumps, &b.jumps);
    let (mut i, mut k) = (0, 0);
    while i < ja.len() || k < jb.len() {
        let (lambda, delta) = match (ja.get(i), jb.get(k)) {
            (Some(x), Some(y)) if (x.lambda - y.lambda).abs() <= frequency_tol => {
                i += 1;
                k += 1;
                (x.lambda, (x.weight - y.weight).abs())
            }
            (Some(x), Some(y)) if x.lambda < y.lambda => {
                i += 1;
                (x.lambda, x.weight)
            }
            (Some(x), None) => {
                i += 1;
                (x.lambda, x.weight)
            }
            (_, Some(y)) => {
                k += 1;
                (y.lambda, y.weight)
            }
            (None, None) => unreachable!(),
        };
        if delta > weight_tol {
            return Ok(Comparison::Discrepancy { lambda, delta });
        }
    }
    Ok(Comparison::Equal)
}

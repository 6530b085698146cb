//! Transforms of `dN_x`: heat trace, scalar curvature, smoothed wave trace
//! with looping-time detection, the quantum energy CDF and eigenspace density.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::counting::{counting_function_from_blocks, CountingFunction, SpectralTail};
use crate::error::{Error, Result};
use crate::models::{enumerate_blocks, weyl_density_constant, ModelGeometry, Point};

/// Relative size of the tail majorant tolerated by [`heat_trace`].
pub const HEAT_TAIL_TOLERANCE: f64 = 1e-12;
/// Default threshold for [`detect_looping_times`].
pub const DEFAULT_THRESHOLD_RATIO: f64 = 0.25;
/// Safety factor applied to the Weyl density in tail majorants.
const WEYL_SAFETY: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTraceResult {
    pub value: f64,
    pub tail_bound: f64,
    pub t: f64,
    /// Exponent is `-tλ²/2` (Brownian motion) instead of `-tλ²`.
    pub half_laplacian: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveTraceSample {
    pub t: f64,
    pub value: f64,
    pub sigma: f64,
}

/// Majorant for `Σ_{λ > Λ} e^{-sλ²} w(λ)` from `C_d ∫_Λ^∞ e^{-sλ²} λ^{d-1} dλ`.
fn heat_tail_bound(dim: usize, volume: f64, s: f64, cutoff: f64) -> Result<f64> {
    let c = WEYL_SAFETY * dim as f64 * weyl_density_constant(dim) * volume;
    let integral = match dim {
        1 => 0.5 * (PI / s).sqrt() * libm::erfc(s.sqrt() * cutoff),
        2 => (-s * cutoff * cutoff).exp() / (2.0 * s),
        d => return Err(Error::InvalidArgument(format!("heat tail bound not available in dimension {d}"))),
    };
    Ok(c * integral)
}

/// `Σ_{λ <= Λ} e^{-tλ²} w_x(λ)` with a certified tail majorant.
pub fn heat_trace(cf: &CountingFunction, t: f64, half_laplacian: bool) -> Result<HeatTraceResult> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument(format!("heat time must be positive, got {t}")));
    }
    if cf.is_empty() && cf.suppressed().is_empty() {
        return Err(Error::Empty("counting function has no spectrum".into()));
    }
    let s = if half_laplacian { 0.5 * t } else { t };
    let value: f64 = cf.jumps().iter().map(|j| (-s * j.lambda * j.lambda).exp() * j.weight).sum();
    let tail_bound = match cf.tail() {
        SpectralTail::Complete => 0.0,
        SpectralTail::Weyl { dim, volume } => {
            let bound = heat_tail_bound(dim, volume, s, cf.cutoff())?;
            if bound > HEAT_TAIL_TOLERANCE * value {
                let target = HEAT_TAIL_TOLERANCE * value;
                return Err(Error::TailNotControlled {
                    t,
                    bound,
                    value,
                    min_cutoff: minimal_cutoff(dim, volume, s, cf.cutoff(), target)?,
                });
            }
            bound
        }
    };
    Ok(HeatTraceResult { value, tail_bound, t, half_laplacian })
}

fn minimal_cutoff(dim: usize, volume: f64, s: f64, from: f64, target: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Ok(f64::INFINITY);
    }
    let mut lo = from.max(1e-12);
    let mut hi = lo * 2.0;
    while heat_tail_bound(dim, volume, s, hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(f64::INFINITY);
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if heat_tail_bound(dim, volume, s, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Cutoff with a controlled heat tail at time `t` (on any closed model).
pub fn heat_cutoff_for(t: f64) -> f64 {
    (40.0 / t).sqrt()
}

/// Scalar curvature at `x` from the small-time heat expansion
/// `(4πt)^{d/2} e^{tΔ}(x,x) = 1 + t R(x)/6 + O(t²)`, extrapolated to `t = 0`.
pub fn estimate_scalar_curvature(model: &ModelGeometry, x: &Point, t_schedule: &[f64]) -> Result<f64> {
    let t_min = t_schedule.iter().copied().fold(f64::INFINITY, f64::min);
    estimate_scalar_curvature_with_cutoff(model, x, t_schedule, heat_cutoff_for(t_min))
}

pub fn estimate_scalar_curvature_with_cutoff(
    model: &ModelGeometry,
    x: &Point,
    t_schedule: &[f64],
    cutoff: f64,
) -> Result<f64> {
    if !model.is_closed() {
        return Err(Error::UnsupportedModel(format!(
            "{model} has a boundary; the local heat expansion needs a closed manifold"
        )));
    }
    if t_schedule.len() < 2 {
        return Err(Error::InvalidArgument("Richardson extrapolation needs at least 2 times".into()));
    }
    if t_schedule.windows(2).any(|w| !(w[1] < w[0])) || t_schedule.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument("t schedule must be positive and strictly decreasing".into()));
    }
    model.validate_point(x)?;
    let blocks = enumerate_blocks(model, cutoff)?;
    let cf = counting_function_from_blocks(model, &blocks, x, cutoff)?;
    let half_dim = model.dimension() as f64 / 2.0;
    let samples = t_schedule
        .iter()
        .map(|&t| {
            let h = heat_trace(&cf, t, false)?.value;
            Ok((t, 6.0 * ((4.0 * PI * t).powf(half_dim) * h - 1.0) / t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate_to_zero(&samples))
}

/// Neville–Aitken polynomial extrapolation of `(t, f(t))` samples to `t = 0`.
/// For a halving schedule this is the Richardson tableau.
pub fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (ti, tj) = (ts[i], ts[i + level]);
            p[i] = (ti * p[i + 1] - tj * p[i]) / (ti - tj);
        }
    }
    p[0]
}

/// `Σ cos(tλ) w(λ) exp(-λ²/(2σ²))` on each time in `t_grid`.
pub fn smoothed_wave_trace(cf: &CountingFunction, t_grid: &[f64], sigma: f64) -> Result<Vec<WaveTraceSample>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing width must be positive, got {sigma}")));
    }
    if matches!(cf.tail(), SpectralTail::Weyl { .. }) && sigma > cf.cutoff() / 3.0 {
        return Err(Error::WindowUnresolved { sigma, cutoff: cf.cutoff() });
    }
    let damped: Vec<(f64, f64)> = cf
        .jumps()
        .iter()
        .map(|j| (j.lambda, j.weight * (-j.lambda * j.lambda / (2.0 * sigma * sigma)).exp()))
        .collect();
    Ok(t_grid
        .par_iter()
        .map(|&t| WaveTraceSample {
            t,
            value: damped.iter().map(|&(l, w)| (t * l).cos() * w).sum(),
            sigma,
        })
        .collect())
}

/// Prominent local maxima of `|value|` on a uniform grid, refined by a
/// parabola through the three neighbouring samples.
pub fn detect_looping_times(samples: &[WaveTraceSample], threshold_ratio: f64) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Empty("no wave-trace samples".into()));
    }
    if samples.len() >= 3 {
        let h = samples[1].t - samples[0].t;
        let uniform = h > 0.0
            && samples
                .windows(2)
                .all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h.abs().max(1e-300) + 1e-12);
        if !uniform {
            return Err(Error::InvalidArgument("wave-trace samples must lie on a uniform ascending grid".into()));
        }
    }
    let mag: Vec<f64> = samples.iter().map(|s| s.value.abs()).collect();
    let peak = mag.iter().copied().fold(0.0, f64::max);
    let floor = threshold_ratio * peak;
    let mut out = Vec::new();
    for i in 1..mag.len().saturating_sub(1) {
        let (a, b, c) = (mag[i - 1], mag[i], mag[i + 1]);
        if b > a && b > c && b >= floor && b > 0.0 {
            let h = samples[i + 1].t - samples[i].t;
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            out.push(samples[i].t + shift.clamp(-0.5, 0.5) * h);
        }
    }
    Ok(out)
}

/// `P_Λ(λ) = N_x(λ) / N_x(Λ)`.
pub fn quantum_energy_cdf(cf: &CountingFunction, lambda: f64, cap: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= cap) {
        return Err(Error::InvalidArgument(format!("need 0 < λ <= Λ, got λ = {lambda}, Λ = {cap}")));
    }
    let total = cf.evaluate(cap)?;
    if total <= 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(cf.evaluate(lambda)? / total)
}

/// A value of `N_x(λ)` recovered from the energy CDF.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredCount {
    pub lambda: f64,
    pub value: f64,
    /// Half-width of the `O(Λ^{d-1})` uncertainty band.
    pub band: f64,
}

/// `N_x(λ) ≈ ω_d (2π)^{-d} P_Λ(λ) Λ^d` for each requested `λ`.
///
/// The band is `P_Λ(λ) · 2 d ω_d (2π)^{-d} Λ^{d-1}`, the remainder of the
/// pointwise Weyl law with the same safety factor as the heat tail.
pub fn recover_counting_from_cdf(
    cdf: impl Fn(f64) -> f64,
    cap: f64,
    dim: usize,
    lambdas: &[f64],
) -> Result<Vec<RecoveredCount>> {
    if !(cap > 0.0) || dim == 0 {
        return Err(Error::InvalidArgument("need Λ > 0 and d >= 1".into()));
    }
    let c = weyl_density_constant(dim);
    let main = c * cap.powi(dim as i32);
    let band_scale = WEYL_SAFETY * dim as f64 * c * cap.powi(dim as i32 - 1);
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0 && lambda <= cap) {
                return Err(Error::InvalidArgument(format!("λ = {lambda} outside (0, Λ]")));
            }
            let p = cdf(lambda);
            Ok(RecoveredCount { lambda, value: main * p, band: band_scale * p })
        })
        .collect()
}

/// `(N_x(λ) - N_x(λ-)) / multiplicity(λ)`, the expected density of a random
/// unit vector of the eigenspace.
pub fn eigenspace_density(model: &ModelGeometry, lambda: f64, x: &Point) -> Result<f64> {
    model.validate_point(x)?;
    let tol = 1e-9 * lambda.abs().max(1.0);
    if !(lambda >= 0.0) {
        return Err(Error::NotInSpectrum(lambda));
    }
    let blocks = enumerate_blocks(model, (lambda + tol).max(tol))?;
    let block = blocks
        .iter()
        .find(|b| (b.frequency() - lambda).abs() <= tol)
        .ok_or(Error::NotInSpectrum(lambda))?;
    Ok(block.weight(x) / block.multiplicity() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::counting_function;

    #[test]
    fn torus_heat_is_flat() {
        let t = 0.01;
        let cf = counting_function(&ModelGeometry::FlatTorus, &Point::p2(1.0, 2.0), heat_cutoff_for(t)).unwrap();
        let h = heat_trace(&cf, t, false).unwrap();
        assert!((4.0 * PI * t * h.value - 1.0).abs() < 1e-6);
        assert!(h.tail_bound <= 1e-12 * h.value);
    }

    #[test]
    fn sphere_heat_matches_direct_sum() {
        let t = 1e-3;
        let cf = counting_function(&ModelGeometry::Sphere, &Point::p2(0.7, 0.2), heat_cutoff_for(t)).unwrap();
        let h = heat_trace(&cf, t, false).unwrap();
        // Independent route: t Σ_l (2l+1) e^{-t l(l+1)} over many more terms.
        let direct: f64 = (0..2000u32).map(|l| (2 * l + 1) as f64 * (-t * l as f64 * (l as f64 + 1.0)).exp()).sum::<f64>() * t;
        assert!((4.0 * PI * t * h.value - direct).abs() < 1e-12);
        // Small-time expansion 1 + t/3 + t²/15 of the unit sphere.
        assert!((direct - (1.0 + t / 3.0 + t * t / 15.0)).abs() < 5e-9);
    }

    #[test]
    fn half_laplacian_convention() {
        let cf = counting_function(&ModelGeometry::Sphere, &Point::p2(0.7, 0.2), 60.0).unwrap();
        let a = heat_trace(&cf, 0.2, true).unwrap();
        let b = heat_trace(&cf, 0.1, false).unwrap();
        assert!((a.value - b.value).abs() < 1e-15);
        assert!(a.half_laplacian && !b.half_laplacian);
    }

    #[test]
    fn uncontrolled_tail_refuses() {
        let cf = counting_function(&ModelGeometry::Square, &Point::p2(0.3, 0.4), 10.0).unwrap();
        match heat_trace(&cf, 1e-6, false) {
            Err(Error::TailNotControlled { min_cutoff, .. }) => assert!(min_cutoff > 10.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn heat_monotone_in_t() {
        let cf = counting_function(&ModelGeometry::Square, &Point::p2(0.3, 0.4), 80.0).unwrap();
        let ts = [0.05, 0.1, 0.2, 0.4];
        let v: Vec<f64> = ts.iter().map(|&t| heat_trace(&cf, t, false).unwrap().value).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn curvature_on_closed_models() {
        let sched = [1e-2, 5e-3, 2.5e-3];
        let k = estimate_scalar_curvature(&ModelGeometry::FlatTorus, &Point::p2(0.1, 0.2), &sched).unwrap();
        assert!(k.abs() < 1e-4, "{k}");
        let k = estimate_scalar_curvature(&ModelGeometry::Sphere, &Point::p2(1.0, 0.2), &sched).unwrap();
        assert!((k - 2.0).abs() < 0.05, "{k}");
        let k2 = estimate_scalar_curvature(&ModelGeometry::Sphere, &Point::p2(1.0, 0.2), &[1e-3, 5e-4]).unwrap();
        assert!((k - k2).abs() < 0.05);
        assert!(matches!(
            estimate_scalar_curvature(&ModelGeometry::Square, &Point::p2(0.5, 0.5), &sched),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn extrapolation_kills_polynomial_terms() {
        let f = |t: f64| 2.0 + 3.0 * t - 7.0 * t * t;
        let s: Vec<(f64, f64)> = [0.4, 0.2, 0.1].iter().map(|&t| (t, f(t))).collect();
        assert!((extrapolate_to_zero(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wave_trace_even_and_positive_at_zero() {
        let cf = counting_function(&ModelGeometry::Square, &Point::p2(0.3, 0.4), 60.0).unwrap();
        let s = smoothed_wave_trace(&cf, &[0.0, 0.37, -0.37], 15.0).unwrap();
        assert!(s[0].value > 0.0);
        assert_eq!(s[1].value, s[2].value);
        assert!(matches!(smoothed_wave_trace(&cf, &[0.0], 25.0), Err(Error::WindowUnresolved { .. })));
    }

    #[test]
    fn looping_detection_edge_cases() {
        assert!(detect_looping_times(&[], 0.25).is_err());
        let flat: Vec<_> = (0..20).map(|i| WaveTraceSample { t: i as f64 * 0.1, value: 3.0, sigma: 1.0 }).collect();
        assert!(detect_looping_times(&flat, 0.25).unwrap().is_empty());
        let bump: Vec<_> = (0..41)
            .map(|i| {
                let t = i as f64 * 0.05;
                WaveTraceSample { t, value: (-(t - 1.02f64).powi(2) / 0.02).exp(), sigma: 1.0 }
            })
            .collect();
        let found = detect_looping_times(&bump, 0.25).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0] - 1.02).abs() < 5e-3);
    }

    #[test]
    fn cdf_values() {
        let m = ModelGeometry::interval(1.0).unwrap();
        let cf = counting_function(&m, &Point::p1(0.5), 3.0 * PI).unwrap();
        assert!((quantum_energy_cdf(&cf, PI, 3.0 * PI).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(quantum_energy_cdf(&cf, 3.0 * PI, 3.0 * PI).unwrap(), 1.0);
        assert_eq!(quantum_energy_cdf(&cf, 1.0, 3.0 * PI).unwrap(), 0.0);
        let empty = counting_function(&m, &Point::p1(0.5), 2.0).unwrap();
        assert_eq!(quantum_energy_cdf(&empty, 1.0, 2.0), Err(Error::DegenerateNormalization));
    }

    #[test]
    fn recovery_of_zero_cdf() {
        let r = recover_counting_from_cdf(|_| 0.0, 100.0, 2, &[1.0]).unwrap();
        assert_eq!(r[0].value, 0.0);
    }

    #[test]
    fn densities() {
        let x = Point::p2(0.9, 2.1);
        for lam in [0.0, 2f64.sqrt(), 6f64.sqrt(), 12f64.sqrt()] {
            let d = eigenspace_density(&ModelGeometry::Sphere, lam, &x).unwrap();
            assert!((d - 1.0 / (4.0 * PI)).abs() < 1e-12);
        }
        for lam in [1.0, 2f64.sqrt(), 5f64.sqrt(), 5.0] {
            let d = eigenspace_density(&ModelGeometry::FlatTorus, lam, &x).unwrap();
            assert!((d - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
        }
        let d = eigenspace_density(&ModelGeometry::Square, PI * 2f64.sqrt(), &Point::p2(0.5, 0.5)).unwrap();
        assert!((d - 4.0).abs() < 1e-12);
        assert!(matches!(
            eigenspace_density(&ModelGeometry::Square, 5.0, &Point::p2(0.5, 0.5)),
            Err(Error::NotInSpectrum(_))
        ));
    }
}

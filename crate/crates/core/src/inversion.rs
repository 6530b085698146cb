//! Echolocation: recover a point up to isometry from its spectral signature.
//!
//! Closed-form inversions exist for the string, the rectangle and the square;
//! the ellipsoid and the disk are located through curvature and looping time.
//! Everything else goes through [`generic_locate`], a grid scan followed by
//! simplex refinement on the squared jump mismatch.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::counting::CountingFunction;
use crate::error::{Error, Result};
use crate::models::{enumerate_blocks, Aspect, isometry_orbit, sort_points, EigenspaceBlock, ModelGeometry, Orbit, Point};
use crate::optim::NelderMead;

/// Residual accepted for closed-form inversions.
pub const CLOSED_FORM_ACCEPTANCE: f64 = 1e-8;
/// Residual accepted for [`generic_locate`].
pub const GENERIC_ACCEPTANCE: f64 = 1e-6;
/// Two candidates share an orbit when an isometry image is this close.
pub const ORBIT_TOL: f64 = 1e-6;
/// Slack on feasibility bounds of closed-form inversions.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocationStatus {
    UniqueOrbit,
    MultipleOrbits,
    /// Every point of the model matches: the isometry group is transitive.
    AllPoints,
    NoMatch,
}

impl LocationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocationStatus::UniqueOrbit => "unique-orbit",
            LocationStatus::MultipleOrbits => "multiple-orbits",
            LocationStatus::AllPoints => "all-points",
            LocationStatus::NoMatch => "no-match",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub point: Point,
    pub residual: f64,
}

/// Candidate points grouped into isometry orbits.
#[derive(Clone, Debug, PartialEq)]
pub struct LocationReport {
    pub status: LocationStatus,
    /// Accepted candidates sorted by residual, then coordinates.
    pub candidates: Vec<Candidate>,
    /// Indices into `candidates`, one group per orbit.
    pub orbit_classes: Vec<Vec<usize>>,
}

impl LocationReport {
    fn no_match() -> Self {
        LocationReport { status: LocationStatus::NoMatch, candidates: Vec::new(), orbit_classes: Vec::new() }
    }

    /// Candidates of each orbit class.
    pub fn orbits(&self) -> Vec<Vec<&Candidate>> {
        self.orbit_classes
            .iter()
            .map(|class| class.iter().map(|&i| &self.candidates[i]).collect())
            .collect()
    }

    /// Whether some reported orbit contains `p` (up to `tol`).
    pub fn contains_orbit_of(&self, model: &ModelGeometry, p: &Point, tol: f64) -> bool {
        let orbit = isometry_orbit(model, p);
        self.candidates.iter().any(|c| orbit.contains(&c.point, tol))
    }

    /// Group accepted candidates into orbits and derive the status.
    pub fn assemble(model: &ModelGeometry, mut candidates: Vec<Candidate>, acceptance: f64) -> Self {
        candidates.retain(|c| c.residual <= acceptance);
        candidates.sort_by(|a, b| {
            a.residual
                .total_cmp(&b.residual)
                .then_with(|| {
                    let mut pair = [a.point.clone(), b.point.clone()];
                    sort_points(&mut pair);
                    if pair[0] == a.point { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater }
                })
        });
        // Drop candidates that repeat an already-kept point.
        let mut kept: Vec<Candidate> = Vec::new();
        for c in candidates {
            if !kept.iter().any(|k| k.point.chart_distance(&c.point) <= ORBIT_TOL) {
                kept.push(c);
            }
        }
        if kept.is_empty() {
            return Self::no_match();
        }
        let mut classes: Vec<(Orbit, Vec<usize>)> = Vec::new();
        for (i, c) in kept.iter().enumerate() {
            match classes.iter_mut().find(|(orbit, _)| orbit.contains(&c.point, ORBIT_TOL)) {
                Some((_, members)) => members.push(i),
                None => classes.push((isometry_orbit(model, &c.point), vec![i])),
            }
        }
        let status = if model.is_homogeneous() {
            LocationStatus::AllPoints
        } else if classes.len() == 1 {
            LocationStatus::UniqueOrbit
        } else {
            LocationStatus::MultipleOrbits
        };
        LocationReport { status, candidates: kept, orbit_classes: classes.into_iter().map(|(_, m)| m).collect() }
    }
}

fn clamp_unit(v: f64, what: &str) -> Result<f64> {
    if !(-FEASIBILITY_SLACK..=1.0 + FEASIBILITY_SLACK).contains(&v) {
        return Err(Error::InfeasibleSignature(format!("{what} = {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Solve `sin²(πu) = s` for `u ∈ [0, 1/2]`, accurately at both ends.
fn half_period_arcsin(s: f64) -> f64 {
    if s <= 0.5 {
        s.sqrt().asin() / PI
    } else {
        0.5 - (1.0 - s).sqrt().asin() / PI
    }
}

/// String of length `a`: `w = (2/a) sin²(πx/a)` gives `x` up to reflection.
pub fn locate_on_interval(a: f64, first_jump_weight: f64) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("interval length must be positive, got {a}")));
    }
    if !(first_jump_weight > 0.0) {
        return Err(Error::InfeasibleSignature(format!("first jump {first_jump_weight} must be positive")));
    }
    let s = clamp_unit(a * first_jump_weight / 2.0, "a·w/2")?;
    let x = a * half_period_arcsin(s);
    let mirror = a - x;
    if (mirror - x).abs() <= 1e-12 * a {
        Ok(vec![0.5 * a])
    } else {
        Ok(vec![x, mirror])
    }
}

/// First two blocks of a Dirichlet rectangle or square.
fn leading_blocks(model: &ModelGeometry) -> Result<Vec<EigenspaceBlock>> {
    let b = match model {
        ModelGeometry::Rectangle { aspect } => aspect.b(),
        ModelGeometry::Square => 1.0,
        _ => return Err(Error::UnsupportedModel(model.to_string())),
    };
    let cutoff = PI * (4.0 + 1.0 / (b * b)).sqrt() * (1.0 + 1e-12);
    let blocks = enumerate_blocks(model, cutoff)?;
    debug_assert!(blocks.len() >= 2);
    Ok(blocks)
}

fn two_jump_residual(blocks: &[EigenspaceBlock], p: &Point, j1: f64, j2: f64) -> f64 {
    (blocks[0].weight(p) - j1).powi(2) + (blocks[1].weight(p) - j2).powi(2)
}

/// Rectangle `[0,1] × [0,b]` from the jumps at `λ_{1,1}` and `λ_{2,1}`.
///
/// The ratio of the two jumps is `4cos²(πx)`; the first jump then fixes
/// `sin²(πy/b) = b·jump11 / (4 sin²(πx))`.
pub fn locate_on_rectangle(b: f64, jump11: f64, jump21: f64) -> Result<LocationReport> {
    if !(0.0 < b && b < 1.0) {
        return Err(Error::InvalidArgument(format!("rectangle needs 0 < b < 1, got {b}")));
    }
    // The two leading eigenvalues are simple for every b, so the exactness of
    // b² does not matter here.
    let model = ModelGeometry::rectangle(Aspect::irrational(b)?)?;
    locate_on_rectangle_model(&model, jump11, jump21)
}

fn rectangle_candidate(b: f64, jump11: f64, jump21: f64) -> Result<Point> {
    if !(jump11 > 0.0) || jump21 < 0.0 {
        return Err(Error::InfeasibleSignature(format!("jumps ({jump11}, {jump21}) must be positive")));
    }
    let ratio = jump21 / jump11;
    if ratio >= 4.0 - FEASIBILITY_SLACK {
        return Err(Error::InfeasibleSignature(format!(
            "jump ratio {ratio} >= 4 would put x on the boundary"
        )));
    }
    let cos2 = ratio / 4.0;
    let sin2x = 1.0 - cos2;
    let x = half_period_arcsin(sin2x);
    let sin2y = clamp_unit(jump11 * b / (4.0 * sin2x), "sin²(πy/b)")?;
    if sin2y == 0.0 {
        return Err(Error::InfeasibleSignature("y would lie on the boundary".into()));
    }
    Ok(Point::p2(x, b * half_period_arcsin(sin2y)))
}

fn locate_on_rectangle_model(model: &ModelGeometry, jump11: f64, jump21: f64) -> Result<LocationReport> {
    let b = match model {
        ModelGeometry::Rectangle { aspect } => aspect.b(),
        _ => return Err(Error::UnsupportedModel(model.to_string())),
    };
    let p = rectangle_candidate(b, jump11, jump21)?;
    let blocks = leading_blocks(model)?;
    let candidates = match isometry_orbit(model, &p) {
        Orbit::Points(pts) => pts
            .into_iter()
            .map(|q| Candidate { residual: two_jump_residual(&blocks, &q, jump11, jump21), point: q })
            .collect(),
        _ => unreachable!("rectangle orbits are finite"),
    };
    Ok(LocationReport::assemble(model, candidates, CLOSED_FORM_ACCEPTANCE))
}

/// `{sin²(πx), sin²(πy)}` on the unit square as the roots of `z² - Sz + P`,
/// with `P = jump11/4` and `S = 2 - (jump2/jump11)/4`.
fn square_roots(jump11: f64, jump_block2: f64) -> Result<(f64, f64)> {
    if !(jump11 > 0.0) || jump_block2 < 0.0 {
        return Err(Error::InfeasibleSignature(format!(
            "jumps ({jump11}, {jump_block2}) must be positive; nodal targets need generic_locate"
        )));
    }
    let product = jump11 / 4.0;
    let sum = 2.0 - jump_block2 / jump11 / 4.0;
    let mut disc = sum * sum - 4.0 * product;
    if disc < -FEASIBILITY_SLACK {
        return Err(Error::InfeasibleSignature(format!("negative discriminant {disc}")));
    }
    disc = disc.max(0.0);
    let big = 0.5 * (sum + disc.sqrt());
    if !(big > 0.0) {
        return Err(Error::InfeasibleSignature("no positive root".into()));
    }
    let small = product / big;
    Ok((clamp_unit(big, "sin²")?, clamp_unit(small, "sin²")?))
}

/// Unit square from the jumps at `π√2` and `π√5`.
pub fn locate_on_square(jump11: f64, jump_block2: f64) -> Result<LocationReport> {
    let (s1, s2) = square_roots(jump11, jump_block2)?;
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::InfeasibleSignature("point would lie on the boundary".into()));
    }
    let p = Point::p2(half_period_arcsin(s1), half_period_arcsin(s2));
    let model = ModelGeometry::Square;
    let blocks = leading_blocks(&model)?;
    let candidates = match isometry_orbit(&model, &p) {
        Orbit::Points(pts) => pts
            .into_iter()
            .map(|q| Candidate { residual: two_jump_residual(&blocks, &q, jump11, jump_block2), point: q })
            .collect(),
        _ => unreachable!("square orbits are finite"),
    };
    Ok(LocationReport::assemble(&model, candidates, CLOSED_FORM_ACCEPTANCE))
}

/// Gaussian curvature of `x² + y² + z²/a² = 1` at height `z`:
/// `K = a² / (z²(a⁻² - 1) + a²)²`.
pub fn ellipsoid_gaussian_curvature(z: f64, a: f64) -> f64 {
    let d = z * z * (1.0 / (a * a) - 1.0) + a * a;
    a * a / (d * d)
}

/// Heights `±z` on the spheroid with curvature `K`.
pub fn ellipsoid_z_from_curvature(k: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || (a - 1.0).abs() < 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "need a > 0 and a ≠ 1 (the round sphere carries no information), got {a}"
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("curvature must be positive, got {k}")));
    }
    let z2 = (a / k.sqrt() - a * a) / (1.0 / (a * a) - 1.0);
    let slack = 1e-12 * a * a;
    if z2 < -slack || z2 > a * a + slack {
        return Err(Error::InfeasibleSignature(format!("curvature {k} is not attained on the spheroid a = {a}")));
    }
    let z = z2.clamp(0.0, a * a).sqrt();
    Ok((z, -z))
}

/// Radius in the unit disk whose shortest looping time is `t_min = 2(1 - r)`.
pub fn disk_radius_from_looping_time(t_min: f64) -> Result<f64> {
    if !(t_min > 0.0) || t_min >= 2.0 {
        return Err(Error::InfeasibleSignature(format!("looping time {t_min} outside (0, 2)")));
    }
    Ok(1.0 - t_min / 2.0)
}

/// Settings for [`generic_locate`].
#[derive(Clone, Debug)]
pub struct GenericOptions {
    /// Grid points per coordinate.
    pub grid_resolution: usize,
    /// Simplex iterations per seed.
    pub refine_steps: usize,
    pub acceptance: f64,
    /// Frequencies are matched when closer than this (relative to `max(1, λ)`).
    pub frequency_tol: f64,
    /// Upper bound on refined seeds.
    pub max_seeds: usize,
}

impl Default for GenericOptions {
    fn default() -> Self {
        GenericOptions {
            grid_resolution: 64,
            refine_steps: 200,
            acceptance: GENERIC_ACCEPTANCE,
            frequency_tol: 1e-9,
            max_seeds: 256,
        }
    }
}

/// Squared mismatch `D(x) = Σ_λ (w_x(λ) - w_target(λ))²` over the union of
/// model and target frequencies below the target cutoff.
pub struct SignatureObjective {
    blocks: Vec<EigenspaceBlock>,
    targets: Vec<f64>,
    unmatched: f64,
}

impl SignatureObjective {
    pub fn new(model: &ModelGeometry, target: &CountingFunction, frequency_tol: f64) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::Empty("target counting function has no jumps".into()));
        }
        let blocks = enumerate_blocks(model, target.cutoff())?;
        let mut targets = vec![0.0; blocks.len()];
        let mut unmatched = 0.0;
        let mut k = 0;
        for j in target.jumps() {
            let tol = frequency_tol * j.lambda.abs().max(1.0);
            while k < blocks.len() && blocks[k].frequency() < j.lambda - tol {
                k += 1;
            }
            match blocks.get(k) {
                Some(b) if (b.frequency() - j.lambda).abs() <= tol => targets[k] = j.weight,
                _ => unmatched += j.weight * j.weight,
            }
        }
        Ok(SignatureObjective { blocks, targets, unmatched })
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.unmatched
            + self
                .blocks
                .iter()
                .zip(&self.targets)
                .map(|(b, t)| (b.weight(x) - t).powi(2))
                .sum::<f64>()
    }
}

/// Sampling box and periodicity of a model chart.
struct Chart {
    lo: Vec<f64>,
    hi: Vec<f64>,
    periodic: Vec<bool>,
    /// Cell-centred samples when the coordinate has a boundary.
    centred: Vec<bool>,
}

fn chart(model: &ModelGeometry) -> Chart {
    let tau = 2.0 * PI;
    match *model {
        ModelGeometry::Interval { length } => Chart { lo: vec![0.0], hi: vec![length], periodic: vec![false], centred: vec![true] },
        ModelGeometry::Rectangle { aspect } => Chart {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, aspect.b()],
            periodic: vec![false; 2],
            centred: vec![true; 2],
        },
        ModelGeometry::Square => Chart { lo: vec![0.0; 2], hi: vec![1.0; 2], periodic: vec![false; 2], centred: vec![true; 2] },
        ModelGeometry::FlatTorus => Chart { lo: vec![0.0; 2], hi: vec![tau; 2], periodic: vec![true; 2], centred: vec![false; 2] },
        ModelGeometry::Disk => Chart {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, tau],
            periodic: vec![false, true],
            centred: vec![true, false],
        },
        ModelGeometry::Sphere => Chart {
            lo: vec![0.0, 0.0],
            hi: vec![PI, tau],
            periodic: vec![false, true],
            centred: vec![true, false],
        },
    }
}

/// Grid scan plus simplex refinement for models without a closed form.
pub fn generic_locate(model: &ModelGeometry, target: &CountingFunction, options: &GenericOptions) -> Result<LocationReport> {
    if options.grid_resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let objective = SignatureObjective::new(model, target, options.frequency_tol)?;
    let chart = chart(model);
    let dim = model.dimension();
    let res = options.grid_resolution;
    let coord = |axis: usize, i: usize| -> f64 {
        let w = chart.hi[axis] - chart.lo[axis];
        let offset = if chart.centred[axis] { 0.5 } else { 0.0 };
        chart.lo[axis] + (i as f64 + offset) * w / res as f64
    };
    let shape: Vec<usize> = vec![res; dim];
    let total: usize = shape.iter().product();
    let index_to_point = |flat: usize| -> Point {
        let mut rem = flat;
        let mut c = Vec::with_capacity(dim);
        for axis in 0..dim {
            c.push(coord(axis, rem % res));
            rem /= res;
        }
        Point::new(c)
    };
    let values: Vec<f64> = (0..total).into_par_iter().map(|i| objective.eval(&index_to_point(i))).collect();

    if values.iter().all(|&v| v <= options.acceptance) {
        let candidates = (0..total)
            .map(|i| Candidate { point: index_to_point(i), residual: values[i] })
            .collect();
        let mut report = LocationReport::assemble(model, candidates, options.acceptance);
        report.status = LocationStatus::AllPoints;
        return Ok(report);
    }

    let global_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = 10.0 * global_min;
    let neighbours = |flat: usize| -> Vec<usize> {
        let mut idx = Vec::with_capacity(dim);
        let mut rem = flat;
        for _ in 0..dim {
            idx.push(rem % res);
            rem /= res;
        }
        let mut out = Vec::new();
        let offsets: Vec<Vec<i64>> = if dim == 1 {
            vec![vec![-1], vec![1]]
        } else {
            let mut o = Vec::new();
            for a in -1..=1i64 {
                for b in -1..=1i64 {
                    if a != 0 || b != 0 {
                        o.push(vec![a, b]);
                    }
                }
            }
            o
        };
        'next: for off in offsets {
            let mut f = 0usize;
            let mut stride = 1usize;
            for axis in 0..dim {
                let mut j = idx[axis] as i64 + off[axis];
                if j < 0 || j >= res as i64 {
                    if chart.periodic[axis] {
                        j = j.rem_euclid(res as i64);
                    } else {
                        continue 'next;
                    }
                }
                f += j as usize * stride;
                stride *= res;
            }
            out.push(f);
        }
        out
    };
    let mut seeds: Vec<usize> = (0..total)
        .filter(|&i| values[i] <= threshold && neighbours(i).iter().all(|&j| values[i] <= values[j]))
        .collect();
    seeds.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    seeds.truncate(options.max_seeds);

    let nm = NelderMead {
        max_iterations: options.refine_steps,
        initial_step: 1.0 / res as f64,
        ..NelderMead::default()
    };
    let candidates: Vec<Candidate> = seeds
        .par_iter()
        .map(|&s| {
            let start = index_to_point(s);
            let m = nm.minimize(|c| objective.eval(&Point::new(c.to_vec())), start.coords(), &chart.lo, &chart.hi);
            let mut c = m.x;
            for axis in 0..dim {
                if chart.periodic[axis] {
                    c[axis] = c[axis].rem_euclid(chart.hi[axis] - chart.lo[axis]);
                }
            }
            Candidate { point: Point::new(c), residual: m.value }
        })
        .collect();
    Ok(LocationReport::assemble(model, candidates, options.acceptance))
}

/// Locate using the closed form when the model has one, else the generic
/// solver. Closed-form candidates are re-scored against the full signature.
pub fn locate(model: &ModelGeometry, target: &CountingFunction, options: &GenericOptions) -> Result<LocationReport> {
    if target.is_empty() {
        return Err(Error::Empty("target counting function has no jumps".into()));
    }
    let closed = match *model {
        ModelGeometry::Interval { length } => {
            let w = target.jump_at(PI / length, options.frequency_tol * (PI / length).max(1.0));
            locate_on_interval(length, w).map(|xs| xs.into_iter().map(Point::p1).collect::<Vec<_>>())
        }
        ModelGeometry::Rectangle { .. } | ModelGeometry::Square => {
            let blocks = leading_blocks(model)?;
            let tol = |l: f64| options.frequency_tol * l.max(1.0);
            let (l1, l2) = (blocks[0].frequency(), blocks[1].frequency());
            if target.cutoff() < l2 {
                Err(Error::InfeasibleSignature("target cutoff below the second eigenvalue".into()))
            } else {
                let (j1, j2) = (target.jump_at(l1, tol(l1)), target.jump_at(l2, tol(l2)));
                let report = if matches!(model, ModelGeometry::Square) {
                    locate_on_square(j1, j2)
                } else {
                    locate_on_rectangle_model(model, j1, j2)
                };
                report.map(|r| r.candidates.into_iter().map(|c| c.point).collect())
            }
        }
        _ => Err(Error::UnsupportedModel(model.to_string())),
    };
    match closed {
        Ok(points) => {
            let objective = SignatureObjective::new(model, target, options.frequency_tol)?;
            let mut all = Vec::new();
            for p in points {
                if let Orbit::Points(images) = isometry_orbit(model, &p) {
                    all.extend(images);
                }
            }
            let candidates = all
                .into_iter()
                .map(|p| Candidate { residual: objective.eval(&p), point: p })
                .collect();
            Ok(LocationReport::assemble(model, candidates, CLOSED_FORM_ACCEPTANCE))
        }
        Err(Error::InfeasibleSignature(_)) | Err(Error::UnsupportedModel(_)) => generic_locate(model, target, options),
        Err(e) => Err(e),
    }
}

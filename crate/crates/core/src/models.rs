//! Model geometries with closed-form eigenspace enumerations.
//!
//! Frequencies follow the `Δe = -λ²e` convention throughout, so a block's
//! `frequency` is the square root of the Laplace eigenvalue.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_integer::gcd;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, bessel_j_zeros};
use crate::error::{Error, Result};

/// Default cap on the number of individual eigenmodes a single enumeration
/// may materialise.
pub const DEFAULT_MODE_BUDGET: u64 = 20_000_000;

/// Squared aspect ratio `b²` of a rectangle `[0,1] × [0,b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Aspect {
    /// `b² = p / q` in lowest terms; eigenvalue coincidences are decided exactly.
    Rational { p: u64, q: u64 },
    /// `b²` irrational: all rectangle eigenvalues are simple.
    Irrational { b: f64 },
}

impl Aspect {
    /// Aspect with `b = num / den`.
    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidModel("aspect ratio must be positive".into()));
        }
        Self::from_squared(num * num, den * den)
    }

    /// Aspect with `b² = p / q`.
    pub fn from_squared(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidModel("aspect ratio must be positive".into()));
        }
        let g = gcd(p, q);
        Ok(Aspect::Rational { p: p / g, q: q / g })
    }

    /// Aspect with an irrational `b²`. The caller vouches for irrationality.
    pub fn irrational(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidModel("aspect ratio must be positive".into()));
        }
        Ok(Aspect::Irrational { b })
    }

    pub fn b(&self) -> f64 {
        match *self {
            Aspect::Rational { p, q } => (p as f64 / q as f64).sqrt(),
            Aspect::Irrational { b } => b,
        }
    }

    fn is_unity(&self) -> bool {
        matches!(*self, Aspect::Rational { p: 1, q: 1 })
    }
}

/// One of the explicit model geometries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelGeometry {
    /// Dirichlet string `[0, a]`.
    Interval { length: f64 },
    /// Dirichlet rectangle `[0,1] × [0,b]` with `0 < b < 1`.
    Rectangle { aspect: Aspect },
    /// Dirichlet unit square.
    Square,
    /// Flat torus `(R / 2πZ)²`.
    FlatTorus,
    /// Dirichlet unit disk, points in polar coordinates `(r, θ)`.
    Disk,
    /// Unit round sphere, points as `(colatitude, longitude)`.
    Sphere,
}

impl ModelGeometry {
    pub fn interval(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidModel(format!("interval length must be positive, got {length}")));
        }
        Ok(ModelGeometry::Interval { length })
    }

    pub fn rectangle(aspect: Aspect) -> Result<Self> {
        let b = aspect.b();
        if aspect.is_unity() || !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidModel(format!(
                "rectangle needs 0 < b < 1 (use `square` for b = 1), got b = {b}"
            )));
        }
        Ok(ModelGeometry::Rectangle { aspect })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ModelGeometry::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            ModelGeometry::Interval { length } => *length,
            ModelGeometry::Rectangle { aspect } => aspect.b(),
            ModelGeometry::Square => 1.0,
            ModelGeometry::FlatTorus => 4.0 * PI * PI,
            ModelGeometry::Disk => PI,
            ModelGeometry::Sphere => 4.0 * PI,
        }
    }

    /// Closed manifolds (no boundary) carry a constant eigenfunction.
    pub fn is_closed(&self) -> bool {
        matches!(self, ModelGeometry::FlatTorus | ModelGeometry::Sphere)
    }

    /// The isometry group acts transitively.
    pub fn is_homogeneous(&self) -> bool {
        self.is_closed()
    }

    /// Check that `x` is a legal point of this model.
    pub fn validate_point(&self, x: &Point) -> Result<()> {
        let c = x.coords();
        if c.len() != self.dimension() {
            return Err(Error::InvalidPoint(format!(
                "{self} expects {} coordinates, got {}",
                self.dimension(),
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint("coordinates must be finite".into()));
        }
        let inside = match self {
            ModelGeometry::Interval { length } => c[0] > 0.0 && c[0] < *length,
            ModelGeometry::Rectangle { aspect } => c[0] > 0.0 && c[0] < 1.0 && c[1] > 0.0 && c[1] < aspect.b(),
            ModelGeometry::Square => c[0] > 0.0 && c[0] < 1.0 && c[1] > 0.0 && c[1] < 1.0,
            ModelGeometry::FlatTorus => true,
            ModelGeometry::Disk => c[0] >= 0.0 && c[0] < 1.0,
            ModelGeometry::Sphere => (0.0..=PI).contains(&c[0]),
        };
        if inside {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!("{x} lies outside the interior of {self}")))
        }
    }

    /// Leading Weyl term `ω_d (2π)^{-d} vol(M) Λ^d` for the global mode count.
    pub fn weyl_mode_estimate(&self, cutoff: f64) -> f64 {
        weyl_density_constant(self.dimension()) * self.volume() * cutoff.powi(self.dimension() as i32)
    }

    fn boundary_length(&self) -> f64 {
        match self {
            ModelGeometry::Interval { .. } => 2.0,
            ModelGeometry::Rectangle { aspect } => 2.0 + 2.0 * aspect.b(),
            ModelGeometry::Square => 4.0,
            ModelGeometry::Disk => 2.0 * PI,
            ModelGeometry::FlatTorus | ModelGeometry::Sphere => 0.0,
        }
    }
}

/// `ω_d / (2π)^d`, with `ω_d` the volume of the unit ball in `R^d`.
pub fn weyl_density_constant(dim: usize) -> f64 {
    match dim {
        1 => 2.0 / (2.0 * PI),
        2 => PI / (4.0 * PI * PI),
        d => {
            let omega = PI.powf(d as f64 / 2.0) / libm::tgamma(d as f64 / 2.0 + 1.0);
            omega / (2.0 * PI).powi(d as i32)
        }
    }
}

impl fmt::Display for ModelGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelGeometry::Interval { length } => write!(f, "interval:a={length}"),
            ModelGeometry::Rectangle { aspect } => match *aspect {
                Aspect::Rational { p, q } => match (exact_sqrt(p), exact_sqrt(q)) {
                    (Some(a), Some(b)) => write!(f, "rect:b={a}/{b}"),
                    _ => write!(f, "rect:b2={p}/{q}"),
                },
                Aspect::Irrational { b } => write!(f, "rect:b={b},irrational=true"),
            },
            ModelGeometry::Square => write!(f, "square"),
            ModelGeometry::FlatTorus => write!(f, "torus"),
            ModelGeometry::Disk => write!(f, "disk"),
            ModelGeometry::Sphere => write!(f, "sphere"),
        }
    }
}

impl FromStr for ModelGeometry {
    type Err = Error;

    /// Parses `interval:a=1.0`, `rect:b=0.5`, `rect:b2=1/2`,
    /// `rect:b=0.7071,irrational=true`, `square`, `torus`, `disk`, `sphere`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k, p),
            None => (s, ""),
        };
        let mut map = BTreeMap::new();
        if !params.is_empty() {
            for item in params.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidModel(format!("expected key=value, got `{item}`")))?;
                if map.insert(k.trim(), v.trim()).is_some() {
                    return Err(Error::InvalidModel(format!("duplicate key `{k}`")));
                }
            }
        }
        let allow = |keys: &[&str]| -> Result<()> {
            match map.keys().find(|k| !keys.contains(k)) {
                Some(k) => Err(Error::InvalidModel(format!("unknown key `{k}` for model `{kind}`"))),
                None => Ok(()),
            }
        };
        match kind {
            "interval" => {
                allow(&["a"])?;
                let a = map
                    .get("a")
                    .ok_or_else(|| Error::InvalidModel("interval requires a=<length>".into()))?;
                let a: f64 = a
                    .parse()
                    .map_err(|_| Error::InvalidModel(format!("bad interval length `{a}`")))?;
                ModelGeometry::interval(a)
            }
            "rect" | "rectangle" => {
                allow(&["b", "b2", "irrational"])?;
                let irrational = match map.get("irrational") {
                    None | Some(&"false") => false,
                    Some(&"true") => true,
                    Some(v) => return Err(Error::InvalidModel(format!("irrational must be true|false, got `{v}`"))),
                };
                let aspect = match (map.get("b"), map.get("b2")) {
                    (Some(b), None) if irrational => {
                        let b: f64 = b.parse().map_err(|_| Error::InvalidModel(format!("bad aspect `{b}`")))?;
                        Aspect::irrational(b)?
                    }
                    (Some(b), None) => {
                        let (n, d) = parse_rational(b)?;
                        Aspect::from_ratio(n, d)?
                    }
                    (None, Some(b2)) if !irrational => {
                        let (p, q) = parse_rational(b2)?;
                        Aspect::from_squared(p, q)?
                    }
                    _ => {
                        return Err(Error::InvalidModel(
                            "rect requires exactly one of b=<ratio> or b2=<ratio> (irrational=true only with b)".into(),
                        ))
                    }
                };
                ModelGeometry::rectangle(aspect)
            }
            "square" | "torus" | "disk" | "sphere" => {
                allow(&[])?;
                Ok(match kind {
                    "square" => ModelGeometry::Square,
                    "torus" => ModelGeometry::FlatTorus,
                    "disk" => ModelGeometry::Disk,
                    _ => ModelGeometry::Sphere,
                })
            }
            other => Err(Error::InvalidModel(format!("unknown model kind `{other}`"))),
        }
    }
}

fn exact_sqrt(v: u64) -> Option<u64> {
    let r = (v as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(v)).then_some(r)
}

/// Exact positive rational from `p/q`, an integer, or a finite decimal.
fn parse_rational(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::InvalidModel(format!("`{s}` is not an exact positive rational"));
    let (num, den) = if let Some((a, b)) = s.split_once('/') {
        (a.trim().parse::<u64>().map_err(|_| bad())?, b.trim().parse::<u64>().map_err(|_| bad())?)
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        (int.checked_mul(scale).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?, scale)
    } else {
        (s.parse::<u64>().map_err(|_| bad())?, 1)
    };
    if num == 0 || den == 0 {
        return Err(bad());
    }
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

/// A point in the model's coordinate chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn p1(x: f64) -> Self {
        Point { coords: vec![x] }
    }

    pub fn p2(x: f64, y: f64) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Max-norm distance in chart coordinates.
    pub fn chart_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.coords.len().cmp(&other.coords.len())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Comma separated coordinates, e.g. `0.2,0.4`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidPoint(format!("bad coordinate `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Point::new(coords))
    }
}

pub(crate) fn sort_points(points: &mut [Point]) {
    points.sort_by(|a, b| a.lex_cmp(b));
}

/// How a block evaluates its eigenspace kernel.
#[derive(Clone, Debug, PartialEq)]
enum BlockKernel {
    /// `(2/a) sin(jπx/a) sin(jπy/a)`.
    Interval { length: f64, mode: u64 },
    /// Sum over lattice pairs of `(4/b) sin(πnx) sin(πmy/b) · (same at y)`.
    Rectangle { b: f64, modes: Vec<(u32, u32)> },
    /// Flat torus: `Σ_k cos(k·(x-y)) / (4π²)` over lattice vectors with `|k|² = n`.
    Torus { vectors: Vec<(i32, i32)> },
    /// Disk: `c · J_m(j r) J_m(j r') cos(m(θ-θ'))`, `c` carrying the normalisation
    /// for both the cosine and sine modes when `m >= 1`.
    Disk { order: usize, zero: f64, scale: f64 },
    /// Sphere: addition theorem `(2l+1)/(4π) P_l(cos γ)`.
    Sphere { degree: u32 },
}

/// One distinct eigenvalue with its multiplicity and eigenspace kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenspaceBlock {
    frequency: f64,
    multiplicity: usize,
    kernel: BlockKernel,
}

impl EigenspaceBlock {
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// `E_λ(x, y) = Σ_{λ_j = λ} e_j(x) e_j(y)`.
    pub fn kernel(&self, x: &Point, y: &Point) -> f64 {
        let (x, y) = (x.coords(), y.coords());
        match &self.kernel {
            BlockKernel::Interval { length, mode } => {
                let k = *mode as f64 * PI / length;
                2.0 / length * (k * x[0]).sin() * (k * y[0]).sin()
            }
            BlockKernel::Rectangle { b, modes } => {
                let mut s = 0.0;
                for &(n, m) in modes {
                    let (n, m) = (n as f64, m as f64);
                    s += (PI * n * x[0]).sin()
                        * (PI * m * x[1] / b).sin()
                        * (PI * n * y[0]).sin()
                        * (PI * m * y[1] / b).sin();
                }
                4.0 / b * s
            }
            BlockKernel::Torus { vectors } => {
                let (d0, d1) = (x[0] - y[0], x[1] - y[1]);
                let s: f64 = vectors
                    .iter()
                    .map(|&(k0, k1)| (k0 as f64 * d0 + k1 as f64 * d1).cos())
                    .sum();
                s / (4.0 * PI * PI)
            }
            BlockKernel::Disk { order, zero, scale } => {
                let a = bessel_j(*order, zero * x[0]);
                let b = if x[0] == y[0] { a } else { bessel_j(*order, zero * y[0]) };
                scale * a * b * (*order as f64 * (x[1] - y[1])).cos()
            }
            BlockKernel::Sphere { degree } => {
                let cos_gamma = if x == y {
                    1.0
                } else {
                    x[0].cos() * y[0].cos() + x[0].sin() * y[0].sin() * (x[1] - y[1]).cos()
                };
                (2 * degree + 1) as f64 / (4.0 * PI) * legendre(*degree, cos_gamma.clamp(-1.0, 1.0))
            }
        }
    }

    /// Jump `Σ_{λ_j = λ} |e_j(x)|²` of the pointwise counting function.
    pub fn weight(&self, x: &Point) -> f64 {
        match &self.kernel {
            BlockKernel::Torus { vectors } => vectors.len() as f64 / (4.0 * PI * PI),
            BlockKernel::Sphere { degree } => (2 * degree + 1) as f64 / (4.0 * PI),
            BlockKernel::Disk { order, zero, scale } => {
                let a = bessel_j(*order, zero * x.coords()[0]);
                scale * a * a
            }
            _ => self.kernel(x, x).max(0.0),
        }
    }
}

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre(l: u32, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Distinct eigenspaces with frequency `<= cutoff`, strictly increasing.
pub fn enumerate_blocks(model: &ModelGeometry, cutoff: f64) -> Result<Vec<EigenspaceBlock>> {
    enumerate_blocks_with_budget(model, cutoff, DEFAULT_MODE_BUDGET)
}

/// Same as [`enumerate_blocks`] with an explicit mode budget.
pub fn enumerate_blocks_with_budget(model: &ModelGeometry, cutoff: f64, budget: u64) -> Result<Vec<EigenspaceBlock>> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    let estimate = model.weyl_mode_estimate(cutoff) + cutoff * model.boundary_length() / (2.0 * PI) + 1.0;
    if estimate > budget as f64 {
        return Err(Error::Capacity { requested: estimate.min(u64::MAX as f64) as u64, budget });
    }
    let blocks = match *model {
        ModelGeometry::Interval { length } => interval_blocks(length, cutoff),
        ModelGeometry::Rectangle { aspect } => rectangle_blocks(aspect, cutoff),
        ModelGeometry::Square => rectangle_blocks(Aspect::Rational { p: 1, q: 1 }, cutoff),
        ModelGeometry::FlatTorus => torus_blocks(cutoff),
        ModelGeometry::Disk => disk_blocks(cutoff),
        ModelGeometry::Sphere => sphere_blocks(cutoff),
    };
    debug_assert!(blocks.windows(2).all(|w| w[0].frequency < w[1].frequency));
    Ok(blocks)
}

fn interval_blocks(length: f64, cutoff: f64) -> Vec<EigenspaceBlock> {
    let top = (cutoff * length / PI).floor() as u64;
    (1..=top)
        .map(|mode| EigenspaceBlock {
            frequency: mode as f64 * PI / length,
            multiplicity: 1,
            kernel: BlockKernel::Interval { length, mode },
        })
        .filter(|b| b.frequency <= cutoff)
        .collect()
}

fn rectangle_blocks(aspect: Aspect, cutoff: f64) -> Vec<EigenspaceBlock> {
    let b = aspect.b();
    let reduced = cutoff / PI; // n² + m²/b² <= reduced²
    let limit = reduced * reduced;
    match aspect {
        Aspect::Rational { p, q } => {
            // n² + m² q/p scaled by p: p n² + q m², exact on integers.
            let mut groups: BTreeMap<u128, Vec<(u32, u32)>> = BTreeMap::new();
            let mut n: u32 = 1;
            while (n as f64).powi(2) < limit {
                let mut m: u32 = 1;
                loop {
                    let lam2 = (n as f64).powi(2) + (m as f64 / b).powi(2);
                    if PI * lam2.sqrt() > cutoff {
                        break;
                    }
                    let key = p as u128 * (n as u128).pow(2) + q as u128 * (m as u128).pow(2);
                    groups.entry(key).or_default().push((n, m));
                    m += 1;
                }
                n += 1;
            }
            groups
                .into_iter()
                .map(|(key, modes)| EigenspaceBlock {
                    frequency: PI * (key as f64 / p as f64).sqrt(),
                    multiplicity: modes.len(),
                    kernel: BlockKernel::Rectangle { b, modes },
                })
                .collect()
        }
        Aspect::Irrational { .. } => {
            let mut blocks = Vec::new();
            let mut n: u32 = 1;
            while (n as f64).powi(2) < limit {
                let mut m: u32 = 1;
                loop {
                    let lam = PI * ((n as f64).powi(2) + (m as f64 / b).powi(2)).sqrt();
                    if lam > cutoff {
                        break;
                    }
                    blocks.push(EigenspaceBlock {
                        frequency: lam,
                        multiplicity: 1,
                        kernel: BlockKernel::Rectangle { b, modes: vec![(n, m)] },
                    });
                    m += 1;
                }
                n += 1;
            }
            blocks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
            blocks
        }
    }
}

fn torus_blocks(cutoff: f64) -> Vec<EigenspaceBlock> {
    let r = cutoff.floor() as i64;
    let limit = cutoff * cutoff;
    let mut groups: BTreeMap<i64, Vec<(i32, i32)>> = BTreeMap::new();
    for k0 in -r..=r {
        for k1 in -r..=r {
            let n = k0 * k0 + k1 * k1;
            if (n as f64) <= limit {
                groups.entry(n).or_default().push((k0 as i32, k1 as i32));
            }
        }
    }
    groups
        .into_iter()
        .map(|(n, vectors)| EigenspaceBlock {
            frequency: (n as f64).sqrt(),
            multiplicity: vectors.len(),
            kernel: BlockKernel::Torus { vectors },
        })
        .collect()
}

fn sphere_blocks(cutoff: f64) -> Vec<EigenspaceBlock> {
    (0u32..)
        .map(|l| (l, ((l as f64) * (l as f64 + 1.0)).sqrt()))
        .take_while(|&(_, lam)| lam <= cutoff)
        .map(|(degree, frequency)| EigenspaceBlock {
            frequency,
            multiplicity: 2 * degree as usize + 1,
            kernel: BlockKernel::Sphere { degree },
        })
        .collect()
}

fn disk_blocks(cutoff: f64) -> Vec<EigenspaceBlock> {
    let max_order = cutoff.floor() as usize;
    let mut blocks: Vec<EigenspaceBlock> = (0..=max_order)
        .into_par_iter()
        .flat_map_iter(|order| {
            bessel_j_zeros(order, cutoff).into_iter().map(move |zero| {
                // ∫_0^1 J_m(j r)² r dr = J_{m+1}(j)² / 2, angular factor 2π (m = 0) or π.
                let next = bessel_j(order + 1, zero);
                let scale = if order == 0 { 1.0 } else { 2.0 } / (PI * next * next);
                EigenspaceBlock {
                    frequency: zero,
                    multiplicity: if order == 0 { 1 } else { 2 },
                    kernel: BlockKernel::Disk { order, zero, scale },
                }
            })
        })
        .collect();
    blocks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    blocks
}

/// Jump of `N_x` at the block's frequency.
pub fn block_weight(block: &EigenspaceBlock, x: &Point) -> f64 {
    block.weight(x)
}

/// Cross term `E_λ(x, y)` of the block.
pub fn eigenspace_kernel(block: &EigenspaceBlock, x: &Point, y: &Point) -> f64 {
    block.kernel(x, y)
}

/// Orbit of a point under the model's isometry group.
#[derive(Clone, Debug, PartialEq)]
pub enum Orbit {
    /// Finite orbit, deduplicated and sorted lexicographically.
    Points(Vec<Point>),
    /// Disk rotations: every point at this radius.
    Circle { radius: f64 },
    /// Homogeneous space: every point.
    Everything,
}

impl Orbit {
    /// Whether `p` lies within `tol` (chart max-norm) of the orbit.
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        match self {
            Orbit::Points(pts) => pts.iter().any(|q| q.chart_distance(p) <= tol),
            Orbit::Circle { radius } => (p.coords()[0] - radius).abs() <= tol,
            Orbit::Everything => true,
        }
    }

    /// Number of points for finite orbits.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            Orbit::Points(pts) => Some(pts.len()),
            _ => None,
        }
    }
}

/// Isometry orbit of `x`.
pub fn isometry_orbit(model: &ModelGeometry, x: &Point) -> Orbit {
    let c = x.coords();
    let images = match *model {
        ModelGeometry::Interval { length } => vec![Point::p1(c[0]), Point::p1(length - c[0])],
        ModelGeometry::Rectangle { aspect } => {
            let b = aspect.b();
            let (px, py) = (c[0], c[1]);
            vec![
                Point::p2(px, py),
                Point::p2(1.0 - px, py),
                Point::p2(px, b - py),
                Point::p2(1.0 - px, b - py),
            ]
        }
        ModelGeometry::Square => {
            let (px, py) = (c[0], c[1]);
            let mut v = Vec::with_capacity(8);
            for (u, w) in [(px, py), (py, px)] {
                for (a, b) in [(u, w), (1.0 - u, w), (u, 1.0 - w), (1.0 - u, 1.0 - w)] {
                    v.push(Point::p2(a, b));
                }
            }
            v
        }
        ModelGeometry::Disk => return Orbit::Circle { radius: c[0] },
        ModelGeometry::FlatTorus | ModelGeometry::Sphere => return Orbit::Everything,
    };
    let mut unique: Vec<Point> = Vec::with_capacity(images.len());
    for p in images {
        if !unique.iter().any(|q| q.chart_distance(&p) <= 1e-12) {
            unique.push(p);
        }
    }
    sort_points(&mut unique);
    Orbit::Points(unique)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_first_blocks() {
        let blocks = enumerate_blocks(&ModelGeometry::Square, 8.0).unwrap();
        assert_eq!(blocks.len(), 2);
        assert!((blocks[0].frequency() - PI * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(blocks[0].multiplicity(), 1);
        assert!((blocks[0].frequency() - 4.4429).abs() < 1e-4);
        assert!((blocks[1].frequency() - PI * 5f64.sqrt()).abs() < 1e-12);
        assert!((blocks[1].frequency() - 7.0248).abs() < 1e-4);
        assert_eq!(blocks[1].multiplicity(), 2);
    }

    #[test]
    fn rectangle_half_first_blocks_simple() {
        let model: ModelGeometry = "rect:b=0.5".parse().unwrap();
        let blocks = enumerate_blocks(&model, 7.5).unwrap();
        // π√5 ≈ 7.025 is (n,m) = (1,1); π√8 ≈ 8.886 lies above 7.5.
        assert_eq!(blocks.len(), 1);
        let blocks = enumerate_blocks(&model, 9.0).unwrap();
        assert!((blocks[0].frequency() - PI * 5f64.sqrt()).abs() < 1e-12);
        assert!((blocks[1].frequency() - PI * 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(blocks[0].multiplicity(), 1);
        assert_eq!(blocks[1].multiplicity(), 1);
    }

    #[test]
    fn disk_first_block() {
        let blocks = enumerate_blocks(&ModelGeometry::Disk, 3.0).unwrap();
        assert_eq!(blocks.len(), 1);
        assert!((blocks[0].frequency() - 2.404_825_557_695_773).abs() < 1e-12);
        assert_eq!(blocks[0].multiplicity(), 1);
    }

    #[test]
    fn sphere_first_blocks() {
        let blocks = enumerate_blocks(&ModelGeometry::Sphere, 2.0).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].frequency(), 0.0);
        assert_eq!(blocks[0].multiplicity(), 1);
        let x = Point::p2(0.3, 1.1);
        assert!((blocks[0].weight(&x) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((blocks[1].frequency() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(blocks[1].multiplicity(), 3);
        assert!((blocks[1].weight(&x) - 3.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn interval_midpoint_weight() {
        let model = ModelGeometry::interval(PI).unwrap();
        let blocks = enumerate_blocks(&model, 1.5).unwrap();
        assert!((blocks[0].weight(&Point::p1(PI / 2.0)) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn square_center_weight_and_cross_term() {
        let blocks = enumerate_blocks(&ModelGeometry::Square, 5.0).unwrap();
        assert!((blocks[0].weight(&Point::p2(0.5, 0.5)) - 4.0).abs() < 1e-14);
        let x = Point::p2(0.25, 0.25);
        let y = Point::p2(0.75, 0.75);
        let e = |p: &Point| 2.0 * (PI * p.coords()[0]).sin() * (PI * p.coords()[1]).sin();
        assert!((blocks[0].kernel(&x, &y) - e(&x) * e(&y)).abs() < 1e-14);
        assert!((blocks[0].kernel(&x, &y) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn torus_weights_are_constant() {
        let blocks = enumerate_blocks(&ModelGeometry::FlatTorus, 6.0).unwrap();
        assert_eq!(blocks[0].frequency(), 0.0);
        assert_eq!(blocks[0].multiplicity(), 1);
        let (x, y) = (Point::p2(0.3, 5.1), Point::p2(2.2, 0.7));
        for b in &blocks {
            assert!((b.weight(&x) - b.weight(&y)).abs() < 1e-12);
            assert!((b.kernel(&x, &x) - b.weight(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn orbits() {
        let interval = ModelGeometry::interval(1.0).unwrap();
        match isometry_orbit(&interval, &Point::p1(0.3)) {
            Orbit::Points(p) => {
                assert_eq!(p.len(), 2);
                assert!((p[0].coords()[0] - 0.3).abs() < 1e-15);
                assert!((p[1].coords()[0] - 0.7).abs() < 1e-15);
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(isometry_orbit(&ModelGeometry::Square, &Point::p2(0.2, 0.4)).len(), Some(8));
        assert_eq!(isometry_orbit(&ModelGeometry::Square, &Point::p2(0.5, 0.5)).len(), Some(1));
        assert_eq!(isometry_orbit(&ModelGeometry::Disk, &Point::p2(0.4, 1.0)), Orbit::Circle { radius: 0.4 });
        assert_eq!(isometry_orbit(&ModelGeometry::Sphere, &Point::p2(0.4, 1.0)), Orbit::Everything);
    }

    #[test]
    fn parse_models() {
        assert_eq!("square".parse::<ModelGeometry>().unwrap(), ModelGeometry::Square);
        assert_eq!(
            "interval:a=1.0".parse::<ModelGeometry>().unwrap(),
            ModelGeometry::Interval { length: 1.0 }
        );
        assert_eq!(
            "rect:b=0.5".parse::<ModelGeometry>().unwrap(),
            ModelGeometry::Rectangle { aspect: Aspect::Rational { p: 1, q: 4 } }
        );
        assert_eq!(
            "rect:b2=1/2".parse::<ModelGeometry>().unwrap(),
            ModelGeometry::Rectangle { aspect: Aspect::Rational { p: 1, q: 2 } }
        );
        for bad in ["rect:b=1", "rect:b=1.5", "interval:a=-1", "interval", "cube", "square:x=1", "rect:b=0.5,b2=1/4"] {
            assert!(bad.parse::<ModelGeometry>().is_err(), "{bad}");
        }
        for m in ["rect:b=1/2", "rect:b2=1/2", "interval:a=2.5", "disk", "torus", "sphere", "square"] {
            let model: ModelGeometry = m.parse().unwrap();
            assert_eq!(model.to_string(), m);
        }
    }

    #[test]
    fn capacity_error() {
        let err = enumerate_blocks_with_budget(&ModelGeometry::Square, 1e4, 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn irrational_aspect_all_simple() {
        let model = ModelGeometry::rectangle(Aspect::irrational(2.0 / (1.0 + 5f64.sqrt())).unwrap()).unwrap();
        let blocks = enumerate_blocks(&model, 40.0).unwrap();
        assert!(blocks.iter().all(|b| b.multiplicity() == 1));
        assert!(blocks.windows(2).all(|w| w[0].frequency() < w[1].frequency()));
    }
}

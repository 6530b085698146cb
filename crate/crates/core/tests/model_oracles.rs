mod common;

use std::f64::consts::PI;

use echoloc_core::counting::counting_function;
use echoloc_core::models::enumerate_blocks;
use echoloc_core::{ModelGeometry, Point};

/// `#{(n, m) ∈ Z_{>0}² : p n² + q m² = key}` by direct search.
fn lattice_count(p: u64, q: u64, key: u64) -> usize {
    let mut count = 0;
    let mut n = 1;
    while p * n * n < key {
        let rest = key - p * n * n;
        if rest.is_multiple_of(q) {
            let m2 = rest / q;
            let m = (m2 as f64).sqrt().round() as u64;
            if m > 0 && m * m == m2 {
                count += 1;
            }
        }
        n += 1;
    }
    count
}

#[test]
fn rectangle_multiplicities_match_lattice_search() {
    // b² = p/q; λ² / π² = n² + m² q / p, so p λ²/π² = p n² + q m².
    for (spec, p, q) in [("square", 1, 1), ("rect:b2=1/2", 1, 2), ("rect:b=1/3", 1, 9), ("rect:b2=2/3", 2, 3)] {
        let model: ModelGeometry = spec.parse().unwrap();
        let blocks = enumerate_blocks(&model, 60.0).unwrap();
        let mut total = 0;
        for b in &blocks {
            let key = (p as f64 * (b.frequency() / PI).powi(2)).round() as u64;
            assert_eq!(b.multiplicity(), lattice_count(p, q, key), "{spec} at {}", b.frequency());
            total += b.multiplicity();
        }
        let mut brute = 0;
        for n in 1..100u64 {
            for m in 1..300u64 {
                if PI * PI * (p * n * n + q * m * m) as f64 / p as f64 <= 3600.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(total, brute, "{spec}");
    }
}

#[test]
fn torus_multiplicities_are_sums_of_two_squares() {
    let blocks = enumerate_blocks(&ModelGeometry::FlatTorus, 20.0).unwrap();
    for b in &blocks {
        let n = (b.frequency() * b.frequency()).round() as i64;
        let mut r2 = 0;
        for k0 in -20i64..=20 {
            for k1 in -20i64..=20 {
                r2 += (k0 * k0 + k1 * k1 == n) as usize;
            }
        }
        assert_eq!(b.multiplicity(), r2);
    }
    // r_2(25) = 12: (±5,0), (0,±5), (±3,±4), (±4,±3).
    assert_eq!(blocks.iter().find(|b| (b.frequency() - 5.0).abs() < 1e-12).unwrap().multiplicity(), 12);
}

#[test]
fn weyl_mode_counts_at_100() {
    // Two-term Weyl law `|M| Λ²/(4π) - |∂M| Λ/(4π)` for Dirichlet problems.
    for (model, perimeter) in [
        (ModelGeometry::Square, 4.0),
        ("rect:b=1/2".parse().unwrap(), 3.0),
        (ModelGeometry::Disk, 2.0 * PI),
        (ModelGeometry::FlatTorus, 0.0),
        (ModelGeometry::Sphere, 0.0),
    ] {
        let count: usize = enumerate_blocks(&model, 100.0).unwrap().iter().map(|b| b.multiplicity()).sum();
        let weyl = model.volume() * 1e4 / (4.0 * PI) - perimeter * 100.0 / (4.0 * PI);
        let rel = (count as f64 - weyl).abs() / weyl;
        assert!(rel < 0.1, "{model}: {count} modes vs {weyl}");
    }
}

#[test]
fn sphere_degree_one_matches_explicit_harmonics() {
    let blocks = enumerate_blocks(&ModelGeometry::Sphere, 3.0).unwrap();
    let b1 = &blocks[1];
    assert_eq!(b1.multiplicity(), 3);
    assert!((b1.frequency() - 2f64.sqrt()).abs() < 1e-15);
    let c = (3.0 / (4.0 * PI)).sqrt();
    let ys = |th: f64, ph: f64| [c * th.cos(), c * th.sin() * ph.cos(), c * th.sin() * ph.sin()];
    for (x, y) in [((0.3, 1.0), (2.0, 4.0)), ((1.5, 0.0), (1.5, PI)), ((0.01, 6.0), (3.1, 0.2))] {
        let (ax, ay) = (ys(x.0, x.1), ys(y.0, y.1));
        let direct: f64 = ax.iter().zip(&ay).map(|(a, b)| a * b).sum();
        let got = b1.kernel(&Point::p2(x.0, x.1), &Point::p2(y.0, y.1));
        assert!((got - direct).abs() < 1e-14, "{got} vs {direct}");
    }
}

#[test]
fn disk_block_weights_integrate_to_multiplicity() {
    for block in enumerate_blocks(&ModelGeometry::Disk, 30.0).unwrap() {
        let mass = 2.0 * PI * common::integrate_unit(|r| block.weight(&Point::p2(r, 0.0)) * r, 24, 24);
        assert!((mass - block.multiplicity() as f64).abs() < 1e-6, "{} at {}", mass, block.frequency());
    }
}

#[test]
fn disk_kernel_is_rotation_invariant_and_symmetric() {
    let blocks = enumerate_blocks(&ModelGeometry::Disk, 15.0).unwrap();
    for b in &blocks {
        let (x, y) = (Point::p2(0.3, 0.4), Point::p2(0.7, 2.0));
        let (xr, yr) = (Point::p2(0.3, 1.4), Point::p2(0.7, 3.0));
        assert!((b.kernel(&x, &y) - b.kernel(&xr, &yr)).abs() < 1e-12);
        assert!((b.kernel(&x, &y) - b.kernel(&y, &x)).abs() < 1e-12);
    }
}

#[test]
fn interval_and_square_closed_forms() {
    let a = 2.5;
    let x = 0.8;
    let cf = counting_function(&ModelGeometry::interval(a).unwrap(), &Point::p1(x), 20.0).unwrap();
    for (j, jump) in cf.jumps().iter().enumerate() {
        let k = (jump.lambda * a / PI).round();
        assert!((jump.lambda - k * PI / a).abs() < 1e-12);
        assert!((jump.weight - 2.0 / a * (k * PI * x / a).sin().powi(2)).abs() < 1e-14, "jump {j}");
    }
    let p = Point::p2(0.15, 0.65);
    let cf = counting_function(&ModelGeometry::Square, &p, 5.0).unwrap();
    let expect = 4.0 * (PI * 0.15).sin().powi(2) * (PI * 0.65).sin().powi(2);
    assert!((cf.jumps()[0].weight - expect).abs() < 1e-14);
}

#[test]
fn midpoint_of_string_is_silent_at_even_modes() {
    let cf = counting_function(&ModelGeometry::interval(1.0).unwrap(), &Point::p1(0.5), 30.0).unwrap();
    assert_eq!(cf.suppressed().len(), 4);
    for (i, l) in cf.suppressed().iter().enumerate() {
        assert!((l - 2.0 * (i + 1) as f64 * PI).abs() < 1e-12);
    }
}

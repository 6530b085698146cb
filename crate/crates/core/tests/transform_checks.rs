use echoloc_core::counting::{counting_function, counting_function_from_blocks};
use echoloc_core::models::enumerate_blocks;
use echoloc_core::transforms::{
    detect_looping_times, eigenspace_density, quantum_energy_cdf, recover_counting_from_cdf, smoothed_wave_trace,
};
use echoloc_core::{ModelGeometry, Point};

#[test]
fn cdf_recovery_stays_in_band_and_its_envelope_shrinks() {
    // The pointwise remainder oscillates, so the error at a single point need
    // not drop at every doubling of the cap; its envelope over points does.
    let model = ModelGeometry::Square;
    let lambda = 20.0;
    let points: Vec<Point> = (1..6)
        .flat_map(|i| (1..6).map(move |j| Point::p2(i as f64 / 6.0 + 0.013, j as f64 / 6.0 - 0.021)))
        .collect();
    let mut envelope = Vec::new();
    for cap in [100.0, 200.0, 400.0] {
        let blocks = enumerate_blocks(&model, cap).unwrap();
        let mut worst = 0.0f64;
        for x in &points {
            let cf = counting_function_from_blocks(&model, &blocks, x, cap).unwrap();
            let truth = cf.evaluate(lambda).unwrap();
            let rec =
                recover_counting_from_cdf(|l| quantum_energy_cdf(&cf, l, cap).unwrap(), cap, 2, &[lambda]).unwrap();
            let err = (rec[0].value - truth).abs();
            assert!(err <= rec[0].band, "cap {cap}, {x}: error {err} outside band {}", rec[0].band);
            worst = worst.max(err / truth);
        }
        envelope.push(worst);
    }
    assert!(envelope.windows(2).all(|w| w[1] <= w[0]), "{envelope:?}");
    assert!(envelope[0] < 0.07);
}

#[test]
fn disk_peaks_sit_near_twice_the_boundary_distance() {
    let grid: Vec<f64> = (0..=1100).map(|i| 0.3 + i as f64 * 0.002).collect();
    for r in [0.2, 0.3, 0.5, 0.6] {
        let cf = counting_function(&ModelGeometry::Disk, &Point::p2(r, 0.7), 60.0).unwrap();
        let times = detect_looping_times(&smoothed_wave_trace(&cf, &grid, 15.0).unwrap(), 0.25).unwrap();
        let first = times[0];
        assert!((first - 2.0 * (1.0 - r)).abs() < 0.1, "r = {r}: {times:?}");
    }
}

#[test]
fn density_times_multiplicity_is_the_jump() {
    let model = ModelGeometry::Square;
    let x = Point::p2(0.3, 0.45);
    let cf = counting_function(&model, &x, 20.0).unwrap();
    let blocks = echoloc_core::models::enumerate_blocks(&model, 20.0).unwrap();
    for b in blocks {
        let d = eigenspace_density(&model, b.frequency(), &x).unwrap();
        let jump = cf.jump_at(b.frequency(), 1e-9);
        assert!((d * b.multiplicity() as f64 - jump).abs() < 1e-12);
    }
}

mod common;

use common::FreeGaussian;
use traversal_core::nelson::*;
use traversal_core::sideband::static_coefficients;
use traversal_core::*;

fn free_run(n_t: usize) -> (Field, FreeGaussian) {
    let u = Units::default();
    let packet = Packet::new(-10.0, 4.0, 1.0).unwrap();
    let grid = Grid::new(-40.0, 40.0, 4096, 0.005, n_t).unwrap().with_stride(100).unwrap();
    let field = propagate_free(&packet, &grid, &u).unwrap();
    (field, FreeGaussian { x0: -10.0, sigma: 4.0, k0: 1.0 })
}

#[test]
fn free_packet_matches_analytic_spreading() {
    let (field, exact) = free_run(2000);
    for s in [0, 5, 10, 20] {
        let t = field.time(s);
        let worst = field
            .snapshot(s)
            .iter()
            .enumerate()
            .map(|(j, c)| (c - exact.psi(field.grid.x(j), t)).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-4, "t = {t}: max error {worst:e}");
    }
}

#[test]
fn free_packet_centre_moves_at_group_velocity() {
    let (field, _) = free_run(2000);
    let last = field.n_snapshots() - 1;
    let t = field.time(last);
    let moved = field.mean_position(last) - field.mean_position(0);
    assert!((moved - t).abs() / t < 1e-3, "moved {moved} in {t}");
}

#[test]
fn norm_is_conserved() {
    let (field, _) = free_run(2000);
    assert!(field.max_norm_drift() <= 1e-8);
}

#[test]
fn grid_velocities_match_analytic_log_derivative() {
    let (field, exact) = free_run(2000);
    for s in [0, 10, 20] {
        let t = field.time(s);
        let centre = exact.x0 + exact.k0 * t;
        let w = exact.width(t);
        let mut worst: f64 = 0.0;
        let mut x = centre - 3.0 * w;
        while x <= centre + 3.0 * w {
            let got = velocities(&field, x, t).unwrap();
            let want = exact.log_derivative(x, t);
            worst = worst.max((got.u - want.re).abs()).max((got.v - want.im).abs());
            assert!(!got.clamped);
            x += 0.173;
        }
        assert!(worst <= 1e-4, "t = {t}: {worst:e}");
    }
}

#[test]
fn plane_wave_region_has_no_osmotic_velocity() {
    // a very wide packet is locally a plane wave
    let u = Units::default();
    let packet = Packet::new(0.0, 40.0, 1.0).unwrap();
    let grid = Grid::new(-300.0, 300.0, 16384, 0.05, 2).unwrap();
    let field = propagate_free(&packet, &grid, &u).unwrap();
    let vel = velocities(&field, 0.0, 0.0).unwrap();
    assert!(vel.u.abs() < 1e-3 && (vel.v - 1.0).abs() < 1e-3);
}

#[test]
fn initial_velocities_are_those_of_the_gaussian() {
    let (field, exact) = free_run(100);
    for x in [-15.0, -10.0, -6.0] {
        let vel = velocities(&field, x, 0.0).unwrap();
        let want_u = -(x - exact.x0) / (2.0 * exact.sigma * exact.sigma);
        assert!((vel.u - want_u).abs() < 1e-4);
        assert!((vel.v - 1.0).abs() < 1e-4);
    }
}

#[test]
fn barrier_run_transmits_the_stationary_fraction() {
    let u = Units::default();
    let barrier = Barrier::rectangular(1.0, 2.0).unwrap();
    let packet = Packet::new(-1.0 - 6.0 * 20.0, 20.0, 1.0).unwrap();
    let grid = Grid::new(-300.0, 300.0, 8192, 0.05, 5000).unwrap().with_stride(50).unwrap();
    let field = propagate(&packet, &barrier, &grid, &u).unwrap();
    let last = field.n_snapshots() - 1;
    let transmitted = field.probability_right_of(1.0, last);
    let (_, d0) = static_coefficients(0.5, &barrier, &u).unwrap();
    let stationary = d0.norm_sqr();
    assert!((stationary - 0.070_650_824_853_164_43).abs() < 1e-12);
    assert!((transmitted - stationary).abs() / stationary < 0.15, "{transmitted} vs {stationary}");
    assert!(field.max_norm_drift() <= 1e-8);
    assert_eq!(field.region_ii, (-1.0, 1.0));
}

#[test]
fn packet_reaching_the_edge_is_a_window_error() {
    let u = Units::default();
    let packet = Packet::new(-10.0, 4.0, 1.0).unwrap();
    let grid = Grid::new(-40.0, 40.0, 4096, 0.01, 6000).unwrap();
    assert!(matches!(propagate_free(&packet, &grid, &u), Err(Error::Window { .. })));
}

#[test]
fn preconditions_are_checked() {
    let u = Units::default();
    let barrier = Barrier::rectangular(1.0, 2.0).unwrap();
    let grid = Grid::new(-100.0, 100.0, 4096, 0.05, 10).unwrap();
    // packet overlapping the barrier
    let near = Packet::new(-5.0, 2.0, 1.0).unwrap();
    assert!(propagate(&near, &barrier, &grid, &u).is_err());
    // modulated barrier
    let driven = barrier.clone().with_modulation(0.01, 0.1).unwrap();
    let ok = Packet::new(-50.0, 5.0, 1.0).unwrap();
    assert!(propagate(&ok, &driven, &grid, &u).is_err());
    // under-resolved wavelength
    let coarse = Grid::new(-100.0, 100.0, 64, 0.05, 10).unwrap();
    assert!(propagate(&ok, &barrier, &coarse, &u).is_err());
    assert!(Grid::new(1.0, -1.0, 256, 0.1, 10).is_err());
    assert!(Grid::new(-1.0, 1.0, 256, 0.1, 10).unwrap().with_stride(3).is_err());
}

#[test]
fn default_packet_sits_six_widths_from_the_barrier() {
    let p = Packet::default_for(-1.0, 1.0).unwrap();
    assert_eq!(p.sigma, 10.0);
    assert_eq!(p.x0, -61.0);
}

#[test]
fn smooth_barrier_region_uses_turning_points() {
    let u = Units::default();
    let barrier = Barrier::smooth(Profile::Eckart { height: 1.0, a: 1.0 });
    let packet = Packet::new(-60.0, 10.0, 1.0).unwrap();
    let grid = Grid::new(-150.0, 150.0, 4096, 0.05, 20).unwrap();
    let field = propagate(&packet, &barrier, &grid, &u).unwrap();
    let edge = (2.0f64).sqrt().acosh();
    assert!((field.region_ii.0 + edge).abs() < 1e-9 && (field.region_ii.1 - edge).abs() < 1e-9);
}

//! Chern number, boundary winding, gauge averages, the fraction bound and the
//! lattice Dirac index on the gauge torus.

use hallcond::geometry::{Direction, GaugeGrid, GaugePoint, TorusGeometry};
use hallcond::landau::BasisSet;
use hallcond::manybody::ManyBodySystem;
use hallcond::operators::CMat;
use hallcond::potential::{gaussian_interaction, random_modes, PotentialSpec};
use hallcond::system::System;
use hallcond::topology::{
    averaged_gamma, boundary_winding, chern_number, curvature, dirac_index, fraction_bound, sample_multiplet,
    MultipletField,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn integer_system(m: usize, n_max: usize, levels: usize, disorder: f64) -> System {
    let g = TorusGeometry::from_flux(m, 1.0, 1.0).unwrap();
    let basis = BasisSet::new(g, n_max).unwrap();
    let mut pot = PotentialSpec::zero();
    if disorder > 0.0 {
        pot.w = random_modes(&g, 2, disorder, 7);
    }
    pot.compute_norms(&g);
    System::fermi_sea(basis, pot, levels * m).unwrap()
}

fn third_system(disorder: f64) -> System {
    let g = TorusGeometry::from_flux(6, 1.0, 1.0).unwrap();
    let basis = BasisSet::new(g, 1).unwrap();
    let mut pot = PotentialSpec::zero();
    pot.w2 = gaussian_interaction(&g, 1.0, 1.0, 6);
    if disorder > 0.0 {
        pot.w = random_modes(&g, 1, disorder, 3);
    }
    pot.compute_norms(&g);
    System::many_body(ManyBodySystem::new(basis, pot, 2).unwrap(), 3)
}

fn random_unitary(q: usize, rng: &mut ChaCha20Rng) -> CMat {
    let a = DMatrix::from_fn(q, q, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

#[test]
fn clean_integer_chern_and_winding() {
    for levels in [1usize, 2] {
        let sys = integer_system(4, levels + 1, levels, 0.0);
        if levels == 1 {
            // Each of the four plaquettes carries π/2, so the link sum is
            // unambiguous while the edge phase jumps by π per step.
            let coarse = GaugeGrid::new(sys.geometry(), 2, 2).unwrap();
            let field = sample_multiplet(&coarse, &sys).unwrap();
            assert_eq!(chern_number(&field).unwrap().chern, -1);
            assert!(matches!(boundary_winding(&field), Err(hallcond::error::HallError::GridTooCoarse(_))));
        }
        for n in [4usize, 8] {
            if levels == 2 && n == 4 {
                continue;
            }
            let grid = GaugeGrid::new(sys.geometry(), n, n).unwrap();
            let field = sample_multiplet(&grid, &sys).unwrap();
            let c = chern_number(&field).unwrap();
            assert_eq!(c.chern, -(levels as i64), "grid {n}");
            assert_eq!(c.avg_sigma_xy, -(levels as f64));
            assert_eq!(c.p, levels as i64);
            let w = boundary_winding(&field).unwrap();
            assert_eq!(w.p, c.p);
            assert_eq!(w.theta_x.len(), n + 1);
        }
    }
}

/// For a full clean level the Slater-determinant overlap between gauge points
/// `Δφ` apart is `exp(−N ℓ² Δφ²/4)`.
#[test]
fn clean_link_modulus_matches_gaussian_overlap() {
    let sys = integer_system(4, 2, 1, 0.0);
    let grid = GaugeGrid::new(sys.geometry(), 4, 4).unwrap();
    let field = sample_multiplet(&grid, &sys).unwrap();
    let (ax, ay) = grid.spacing();
    let ell2 = sys.geometry().ell_b.powi(2);
    for (links, a) in [(&field.link_x, ax), (&field.link_y, ay)] {
        let expected = (-(4.0 * ell2 * a * a) / 4.0).exp();
        for l in links {
            assert!((l[(0, 0)].norm() - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn disordered_chern_is_grid_independent() {
    let sys = integer_system(4, 2, 1, 0.2);
    for n in [4usize, 8] {
        let grid = GaugeGrid::new(sys.geometry(), n, n).unwrap();
        let field = sample_multiplet(&grid, &sys).unwrap();
        let c = chern_number(&field).unwrap();
        assert_eq!(c.chern, -1);
        assert_eq!(boundary_winding(&field).unwrap().p, 1);
    }
}

#[test]
fn wrapped_frames_match_direct_frames() {
    let sys = third_system(0.0);
    let g = *sys.geometry();
    let (dx, dy) = g.gauge_cell();
    for (s, delta) in [(Direction::X, dx), (Direction::Y, dy)] {
        let base = GaugePoint::new(0.3 * dx, 0.6 * dy);
        let wrapped = sys.wrap(&sys.frame(base).unwrap(), s);
        let direct = sys.frame(base.shifted(s, delta)).unwrap();
        let overlap = sys.link(&wrapped, &direct);
        assert_eq!(overlap.nrows(), 3);
        for sv in overlap.singular_values().iter() {
            assert!((sv - 1.0).abs() < 1e-8, "singular value {sv}");
        }
    }
}

/// Plaquette phase from frames diagonalized directly at the four corners, on
/// the closed `(n+1) × (n+1)` grid, without any wrap map.
fn direct_plaquette(sys: &System, grid: &GaugeGrid, i: usize, j: usize) -> f64 {
    let f = |a: usize, b: usize| sys.frame(grid.point(a as isize, b as isize)).unwrap();
    let (f00, f10, f11, f01) = (f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1));
    let d = |a: &hallcond::system::Frame, b: &hallcond::system::Frame| {
        let z = sys.link(a, b).determinant();
        z / z.norm()
    };
    (d(&f00, &f10) * d(&f10, &f11) * d(&f01, &f11).conj() * d(&f00, &f01).conj()).arg()
}

#[test]
fn closed_grid_oracle_reproduces_every_plaquette() {
    for sys in [integer_system(4, 2, 1, 0.2), third_system(0.0)] {
        let grid = GaugeGrid::new(sys.geometry(), 4, 4).unwrap();
        let c = curvature(&sample_multiplet(&grid, &sys).unwrap()).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let direct = direct_plaquette(&sys, &grid, i, j);
                assert!((direct - c.plaquette_phase[grid.index(i, j)]).abs() < 1e-9, "plaquette ({i}, {j})");
            }
        }
    }
}

#[test]
fn third_filling_multiplet() {
    let sys = third_system(0.0);
    let grid = GaugeGrid::new(sys.geometry(), 6, 6).unwrap();
    let field = sample_multiplet(&grid, &sys).unwrap();
    assert_eq!(field.q, 3);
    assert!(field.min_gap > 10.0 * field.max_spread);
    let c = chern_number(&field).unwrap();
    assert_eq!(c.chern, -1);
    assert!((c.avg_sigma_xy + 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(boundary_winding(&field).unwrap().p, 1);
}

#[test]
fn fraction_bound_for_third_filling() {
    let sys = third_system(0.0);
    let bound = fraction_bound(&sys, 0.05, 1, 3).unwrap();
    assert_eq!(bound.delta, 0.0);
    assert!(bound.admissible);
    assert!(fraction_bound(&sys, 0.05, 1, 2).map(|b| !b.admissible).unwrap());

    let weak = third_system(0.002);
    let grid = GaugeGrid::new(weak.geometry(), 4, 4).unwrap();
    let field = sample_multiplet(&grid, &weak).unwrap();
    let c = chern_number(&field).unwrap();
    let b = fraction_bound(&weak, field.min_gap, c.p, c.q).unwrap();
    assert!(b.delta > 0.0);
    assert!(b.admissible, "{b:?}");
}

#[test]
fn fraction_bound_notes_an_uninformative_interval() {
    let sys = integer_system(4, 2, 1, 0.3);
    let b = fraction_bound(&sys, 0.01, 1, 1).unwrap();
    assert!(b.admissible);
    assert!(b.note.is_some());
}

#[test]
fn fraction_bound_rejects_vector_potentials() {
    let g = TorusGeometry::from_flux(4, 1.0, 1.0).unwrap();
    let mut pot = PotentialSpec::zero();
    pot.b_pz = hallcond::potential::cosine(1, 0, 0.05);
    let sys = System::fermi_sea(BasisSet::new(g, 2).unwrap(), pot, 4).unwrap();
    assert!(matches!(fraction_bound(&sys, 1.0, 1, 1), Err(hallcond::error::HallError::Hypothesis(_))));
}

#[test]
fn averaged_gamma_vanishes_without_disorder() {
    let sys = integer_system(4, 3, 1, 0.0);
    let grid = GaugeGrid::new(sys.geometry(), 2, 2).unwrap();
    for s in [Direction::X, Direction::Y] {
        assert!(averaged_gamma(&grid, &sys, s).unwrap().abs() < 1e-10);
    }
}

#[test]
fn flat_bundle_has_zero_index() {
    let sys = integer_system(4, 2, 1, 0.0);
    let grid = GaugeGrid::new(sys.geometry(), 8, 8).unwrap();
    let one = CMat::identity(1, 1);
    let field = MultipletField {
        grid: grid.clone(),
        frames: Vec::new(),
        link_x: vec![one.clone(); grid.len()],
        link_y: vec![one; grid.len()],
        q: 1,
        min_gap: 1.0,
        max_spread: 0.0,
    };
    let d = dirac_index(&field, 1.0, None).unwrap();
    assert_eq!(d.index, 0);
    assert!(d.residual < 1e-10);
}

/// The heat-kernel trace of the Berry-bundle Dirac operator is `−ℐ`; the
/// chirality convention follows `D± = ∇x ± i∇y` acting on the upper and lower
/// components.
#[test]
fn dirac_index_tracks_the_chern_number() {
    let sys = integer_system(4, 2, 1, 0.0);
    let mut previous = f64::INFINITY;
    for n in [8usize, 16] {
        let grid = GaugeGrid::new(sys.geometry(), n, n).unwrap();
        let field = sample_multiplet(&grid, &sys).unwrap();
        let d = dirac_index(&field, 1.0, None).unwrap();
        assert_eq!(d.chern_target, -1);
        assert_eq!(d.index, -d.chern_target);
        assert!(d.residual < previous);
        previous = d.residual;
    }
    assert!(previous < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn frame_remixing_leaves_topology_unchanged(seed in 0u64..1000) {
        let sys = third_system(0.0);
        let grid = GaugeGrid::new(sys.geometry(), 4, 4).unwrap();
        let field = sample_multiplet(&grid, &sys).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let gauges: Vec<CMat> = (0..grid.len()).map(|_| random_unitary(3, &mut rng)).collect();
        let remixed = field.remixed(&gauges);
        let (a, b) = (chern_number(&field).unwrap(), chern_number(&remixed).unwrap());
        prop_assert_eq!(a.chern, b.chern);
        prop_assert_eq!(boundary_winding(&remixed).unwrap().p, boundary_winding(&field).unwrap().p);
        let (ca, cb) = (curvature(&field).unwrap(), curvature(&remixed).unwrap());
        for (x, y) in ca.plaquette_phase.iter().zip(&cb.plaquette_phase) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn plaquette_phases_sum_to_an_integer(seed in 0u64..1000) {
        let g = TorusGeometry::from_flux(4, 1.0, 1.0).unwrap();
        let mut pot = PotentialSpec::zero();
        pot.w = random_modes(&g, 1, 0.2, seed);
        let sys = System::fermi_sea(BasisSet::new(g, 2).unwrap(), pot, 4).unwrap();
        let grid = GaugeGrid::new(&g, 3, 3).unwrap();
        let c = curvature(&sample_multiplet(&grid, &sys).unwrap()).unwrap();
        let total: f64 = c.plaquette_phase.iter().sum::<f64>() / (2.0 * std::f64::consts::PI);
        prop_assert!((total - total.round()).abs() < 1e-9);
        for p in &c.plaquette_phase {
            prop_assert!(*p > -std::f64::consts::PI && *p <= std::f64::consts::PI);
        }
    }
}

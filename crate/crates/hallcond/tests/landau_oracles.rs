//! Quadrature oracles for the Landau basis and the single-particle operators.
//!
//! Every analytic matrix element is compared against a brute-force trapezoid
//! rule on a 256×256 grid over the fundamental domain, using pointwise orbital
//! values only.

use std::f64::consts::PI;

use hallcond::geometry::{Direction, GaugePoint, TorusGeometry};
use hallcond::landau::{
    eval_orbital, magnetic_translate, orbital_overlap, wrap_map, BasisSet, SampledField,
};
use hallcond::operators::{
    build_hamiltonian, covariant_difference, diagonalize, hermitian_eigen, plane_wave_matrix,
    velocity_matrix, CMat,
};
use hallcond::potential::{cosine, random_modes, PotentialSpec};
use num_complex::Complex64;

const GRID: usize = 256;

fn basis(m: usize, n_max: usize) -> BasisSet {
    BasisSet::new(TorusGeometry::from_flux(m, 1.0, 1.0).unwrap(), n_max).unwrap()
}

fn sample(b: &BasisSet, i: usize, phi: GaugePoint) -> SampledField {
    let o = b.orbital(i);
    SampledField::torus(&b.geometry, GRID, GRID, |x, y| eval_orbital(b, &o, phi, x, y))
}

fn integrate(b: &BasisSet, f: &SampledField, g: &SampledField, weight: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let cell = b.geometry.lx * b.geometry.ly / (GRID * GRID) as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..GRID {
        for i in 0..GRID {
            let (x, y) = f.coords(i, j);
            let k = j * GRID + i;
            s += f.values[k].conj() * weight(x, y) * g.values[k];
        }
    }
    s * cell
}

/// Sixth-order central first and second derivatives of an orbital.
fn derivatives(b: &BasisSet, i: usize, phi: GaugePoint, x: f64, y: f64) -> [Complex64; 5] {
    let o = b.orbital(i);
    let f = |x: f64, y: f64| eval_orbital(b, &o, phi, x, y);
    let h = 0.01;
    let c1 = [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
    let c2 = [(1.0, 270.0), (2.0, -27.0), (3.0, 2.0)];
    let f0 = f(x, y);
    let mut dx = Complex64::new(0.0, 0.0);
    let mut dy = Complex64::new(0.0, 0.0);
    let mut dxx = -490.0 * f0;
    let mut dyy = -490.0 * f0;
    for &(k, w) in &c1 {
        dx += w * (f(x + k * h, y) - f(x - k * h, y));
        dy += w * (f(x, y + k * h) - f(x, y - k * h));
    }
    for &(k, w) in &c2 {
        dxx += w * (f(x + k * h, y) + f(x - k * h, y));
        dyy += w * (f(x, y + k * h) + f(x, y - k * h));
    }
    [f0, dx / (60.0 * h), dy / (60.0 * h), dxx / (180.0 * h * h), dyy / (180.0 * h * h)]
}

#[test]
fn magnetic_translations_by_periods_leave_orbitals_invariant() {
    let b = basis(8, 3);
    let g = b.geometry;
    let phi = GaugePoint::new(0.21, 0.37);
    for i in [0, 5, 11, 23] {
        let o = b.orbital(i);
        let f = SampledField::torus(&g, 64, 64, |x, y| eval_orbital(&b, &o, phi, x, y));
        let tx = magnetic_translate(&g, Direction::X, g.lx, &f).unwrap();
        let direct = SampledField::sample(tx.x0, tx.y0, tx.hx, tx.hy, 64, 64, |x, y| eval_orbital(&b, &o, phi, x, y));
        assert!(tx.max_difference(&direct) < 1e-10);
        let ty = magnetic_translate(&g, Direction::Y, g.ly, &f).unwrap();
        let direct = SampledField::sample(ty.x0, ty.y0, ty.hx, ty.hy, 64, 64, |x, y| eval_orbital(&b, &o, phi, x, y));
        assert!(ty.max_difference(&direct) < 1e-10, "{}", ty.max_difference(&direct));
        let t0 = magnetic_translate(&g, Direction::Y, 0.0, &f).unwrap();
        assert_eq!(t0, f);
    }
    let f = SampledField::torus(&g, 64, 64, |_, _| Complex64::new(1.0, 0.0));
    assert!(magnetic_translate(&g, Direction::X, 0.3 * f.hx, &f).is_err());
}

#[test]
fn gram_matrix_is_identity_and_energies_match() {
    let b = basis(8, 3);
    let phi = GaugePoint::new(0.3, 0.55);
    let samples: Vec<SampledField> = (0..b.dim()).map(|i| sample(&b, i, phi)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let v = integrate(&b, &samples[i], &samples[j], |_, _| Complex64::new(1.0, 0.0));
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - e).norm());
        }
    }
    assert!(worst < 1e-8, "gram defect {worst}");

    // ⟨φ|H₀|φ⟩ with H₀ = [(−i∂x − By + φx)² + (−i∂y + φy)²]/2 by quadrature.
    let g = b.geometry;
    for i in [0, 3, 9, 20] {
        let n = 64;
        let cell = g.lx * g.ly / (n * n) as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for jy in 0..n {
            for ix in 0..n {
                let x = -0.5 * g.lx + g.lx * ix as f64 / n as f64;
                let y = -0.5 * g.ly + g.ly * jy as f64 / n as f64;
                let [f, fx, fy, fxx, fyy] = derivatives(&b, i, phi, x, y);
                let cx = -g.b * y + phi.phi_x;
                let i1 = Complex64::new(0.0, 1.0);
                let px2 = -fxx - 2.0 * i1 * cx * fx + cx * cx * f;
                let py2 = -fyy - 2.0 * i1 * phi.phi_y * fy + phi.phi_y * phi.phi_y * f;
                s += f.conj() * 0.5 * (px2 + py2) * cell;
            }
        }
        let expect = b.level_energy(b.orbital(i).n);
        assert!((s - expect).norm() < 1e-8, "orbital {i}: {s} vs {expect}");
    }
}

#[test]
fn plane_wave_elements_match_quadrature() {
    let b = basis(8, 3);
    let phi = GaugePoint::new(0.17, 0.62);
    let g = b.geometry;
    let samples: Vec<SampledField> = (0..b.dim()).map(|i| sample(&b, i, phi)).collect();
    for &(a, bq) in &[(1, 0), (0, 1), (-2, 1), (3, -2), (5, 1)] {
        let pw = plane_wave_matrix(&b, phi, a, bq).entries;
        let (qx, qy) = (2.0 * PI * a as f64 / g.lx, 2.0 * PI * bq as f64 / g.ly);
        let mut worst: f64 = 0.0;
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let v = integrate(&b, &samples[i], &samples[j], |x, y| Complex64::from_polar(1.0, qx * x + qy * y));
                worst = worst.max((v - pw[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-8, "mode ({a},{bq}) worst {worst}");
    }
}

#[test]
fn basis_overlap_between_gauge_points_matches_quadrature() {
    let b = basis(8, 3);
    let p1 = GaugePoint::new(0.1, 0.2);
    let p2 = GaugePoint::new(0.35, -0.15);
    for m in [b.m_min(), 0, b.m_max()] {
        for n in 0..3 {
            for np in 0..3 {
                let f = sample(&b, b.index(n, m), p1);
                let h = sample(&b, b.index(np, m), p2);
                let v = integrate(&b, &f, &h, |_, _| Complex64::new(1.0, 0.0));
                let a = orbital_overlap(&b, p1, p2, n, np, m);
                assert!((v - a).norm() < 1e-8, "m={m} n={n} n'={np}: {v} vs {a}");
            }
        }
    }
}

#[test]
fn wrap_map_matches_pointwise_large_gauge_relation() {
    // e^{iΔφx x} φ_i(φx + ΔφX, φy) = phase_i(φy) φ_{perm(i)}(φx, φy), and the y
    // analogue with e^{iΔφy y} and the identity map.
    let b = basis(6, 2);
    let g = b.geometry;
    let (dx, dy) = g.gauge_cell();
    let phi = GaugePoint::new(0.07, 0.31);
    let wx = wrap_map(&b, Direction::X);
    let wy = wrap_map(&b, Direction::Y);
    for i in 0..b.dim() {
        let oi = b.orbital(i);
        let ox = b.orbital(wx.permutation[i]);
        for &(x, y) in &[(0.3, -0.8), (-1.7, 1.1), (2.0, 2.2)] {
            let lhs = Complex64::from_polar(1.0, dx * x) * eval_orbital(&b, &oi, GaugePoint::new(phi.phi_x + dx, phi.phi_y), x, y);
            let rhs = wx.phase(i, phi.phi_y) * eval_orbital(&b, &ox, phi, x, y);
            assert!((lhs - rhs).norm() < 1e-10, "x wrap orbital {i}");
            let lhs = Complex64::from_polar(1.0, dy * y) * eval_orbital(&b, &oi, GaugePoint::new(phi.phi_x, phi.phi_y + dy), x, y);
            let rhs = wy.phase(i, phi.phi_x) * eval_orbital(&b, &b.orbital(wy.permutation[i]), phi, x, y);
            assert!((lhs - rhs).norm() < 1e-10, "y wrap orbital {i}");
        }
    }
}

fn quadrature_hamiltonian(b: &BasisSet, pot: &PotentialSpec, phi: GaugePoint, n_grid: usize) -> CMat {
    let g = b.geometry;
    let cell = g.lx * g.ly / (n_grid * n_grid) as f64;
    let dim = b.dim();
    let mut h = CMat::zeros(dim, dim);
    let (axm, _) = pot.a_p_modes(&g);
    let has_a = !axm.is_empty();
    let i1 = Complex64::new(0.0, 1.0);
    for jy in 0..n_grid {
        for ix in 0..n_grid {
            let x = -0.5 * g.lx + g.lx * ix as f64 / n_grid as f64;
            let y = -0.5 * g.ly + g.ly * jy as f64 / n_grid as f64;
            let w = pot.w_at(&g, x, y);
            let (ax, ay) = pot.a_p_at(&g, x, y);
            let vals: Vec<[Complex64; 5]> = if has_a {
                (0..dim).map(|i| derivatives(b, i, phi, x, y)).collect()
            } else {
                (0..dim)
                    .map(|i| {
                        let f = eval_orbital(b, &b.orbital(i), phi, x, y);
                        [f, f, f, f, f]
                    })
                    .collect()
            };
            for j in 0..dim {
                let [f, fx, fy, _, _] = vals[j];
                let mut hf = w * f;
                if has_a {
                    // A·Π f with Π = (−i∂x − By + φx, −i∂y + φy) and |A|²/2.
                    let pxf = -i1 * fx + (-g.b * y + phi.phi_x) * f;
                    let pyf = -i1 * fy + phi.phi_y * f;
                    hf += ax * pxf + ay * pyf + 0.5 * (ax * ax + ay * ay) * f;
                }
                for i in 0..dim {
                    h[(i, j)] += vals[i][0].conj() * hf * cell;
                }
            }
        }
    }
    for i in 0..dim {
        h[(i, i)] += b.level_energy(b.orbital(i).n);
    }
    h
}

#[test]
fn random_potential_spectrum_matches_real_space_assembly() {
    let b = basis(8, 3);
    let g = b.geometry;
    let phi = GaugePoint::new(0.4, 0.1);
    let mut w = random_modes(&g, 1, 0.3, 11);
    w.truncate(10);
    let pot = PotentialSpec { w, ..Default::default() };
    pot.validate().unwrap();
    let analytic = build_hamiltonian(&b, &pot, phi).unwrap();
    let quad = quadrature_hamiltonian(&b, &pot, phi, 128);
    let (ea, _) = hermitian_eigen(&analytic.entries);
    let (eq, _) = hermitian_eigen(&quad);
    for (a, q) in ea.iter().zip(&eq) {
        assert!((a - q).abs() < 1e-6, "{a} vs {q}");
    }
}

#[test]
fn vector_potential_terms_match_real_space_assembly() {
    let b = basis(4, 2);
    let g = b.geometry;
    let phi = GaugePoint::new(0.2, 0.45);
    let mut pot = PotentialSpec { w: cosine(0, 1, 0.05), b_pz: cosine(1, 0, 0.08), ..Default::default() };
    pot.b_pz.extend(cosine(1, 1, 0.05));
    pot.validate().unwrap();
    let analytic = build_hamiltonian(&b, &pot, phi).unwrap().entries;
    let quad = quadrature_hamiltonian(&b, &pot, phi, 64);
    let quad = (&quad + quad.adjoint()) * Complex64::new(0.5, 0.0);
    assert!((analytic - quad).norm() < 1e-6, "{}", g.lx);
}

#[test]
fn free_velocities_are_ladders_with_sum_rule_and_commutators() {
    let b = basis(8, 5);
    let phi = GaugePoint::new(0.3, 0.2);
    let zero = PotentialSpec::zero();
    let vx = velocity_matrix(&b, &zero, phi, Direction::X).unwrap().entries;
    let vy = velocity_matrix(&b, &zero, phi, Direction::Y).unwrap().entries;
    let h = build_hamiltonian(&b, &zero, phi).unwrap().entries;
    let w = b.geometry.omega_c;
    let sum = &vx * &vx + &vy * &vy;
    let comm = &vx * &vy - &vy * &vx;
    let i1 = Complex64::new(0.0, 1.0);
    let cx = (&vy * &h - &h * &vy) * (-i1 / w);
    let cy = (&vx * &h - &h * &vx) * (i1 / w);
    let inner = b.m() * (b.n_max - 1);
    for i in 0..inner {
        let n = b.orbital(i).n;
        assert!((sum[(i, i)] - (2.0 * n as f64 + 1.0) * w).norm() < 1e-12);
        for j in 0..inner {
            let e = if i == j { -i1 * w } else { Complex64::new(0.0, 0.0) };
            assert!((comm[(i, j)] - e).norm() < 1e-10);
        }
    }
    assert!((cx - &vx).norm() < 1e-10);
    assert!((cy - &vy).norm() < 1e-10);

    // Matrix elements of Π against finite-difference quadrature.
    let g = b.geometry;
    let n = 64;
    let cell = g.lx * g.ly / (n * n) as f64;
    for &(i, j) in &[(0usize, 8usize), (9, 1), (17, 9)] {
        let mut sx = Complex64::new(0.0, 0.0);
        let mut sy = Complex64::new(0.0, 0.0);
        for jy in 0..n {
            for ix in 0..n {
                let x = -0.5 * g.lx + g.lx * ix as f64 / n as f64;
                let y = -0.5 * g.ly + g.ly * jy as f64 / n as f64;
                let fi = eval_orbital(&b, &b.orbital(i), phi, x, y);
                let [f, fx, fy, _, _] = derivatives(&b, j, phi, x, y);
                sx += fi.conj() * (-i1 * fx + (-g.b * y + phi.phi_x) * f) * cell;
                sy += fi.conj() * (-i1 * fy + phi.phi_y * f) * cell;
            }
        }
        assert!((sx - vx[(i, j)]).norm() < 1e-8);
        assert!((sy - vy[(i, j)]).norm() < 1e-8);
    }
}

#[test]
fn velocity_is_second_order_limit_of_covariant_difference() {
    let b = basis(8, 3);
    let g = b.geometry;
    let mut pot = PotentialSpec { w: random_modes(&g, 2, 0.2, 5), b_pz: cosine(1, 1, 0.05), ..Default::default() };
    pot.b_pz.extend(cosine(0, 1, 0.04));
    pot.validate().unwrap();
    for &(fx, fy) in &[(0.1, 0.7), (0.45, 0.25), (0.8, 0.9)] {
        let phi = GaugePoint::from_fractions(&g, fx, fy);
        for s in [Direction::X, Direction::Y] {
            let v = velocity_matrix(&b, &pot, phi, s).unwrap().entries;
            let e1 = (covariant_difference(&b, &pot, phi, s, 1e-3).unwrap() - &v).norm();
            let e2 = (covariant_difference(&b, &pot, phi, s, 1e-4).unwrap() - &v).norm();
            let ratio = e1 / e2;
            assert!(e1 < 1e-5, "error {e1}");
            assert!(ratio > 50.0 && ratio < 200.0, "ratio {ratio} ({e1}, {e2})");
        }
    }
}

#[test]
fn spectrum_is_invariant_under_large_gauge_shift() {
    let b = basis(8, 3);
    let g = b.geometry;
    let pot = PotentialSpec { w: random_modes(&g, 2, 0.25, 9), b_pz: cosine(1, 2, 0.05), ..Default::default() };
    let (dx, dy) = g.gauge_cell();
    let phi = GaugePoint::new(0.123, 0.456);
    let e0 = diagonalize(&build_hamiltonian(&b, &pot, phi).unwrap(), 1).unwrap().eigenvalues;
    for shifted in [GaugePoint::new(phi.phi_x + dx, phi.phi_y), GaugePoint::new(phi.phi_x, phi.phi_y + dy)] {
        let e1 = diagonalize(&build_hamiltonian(&b, &pot, shifted).unwrap(), 1).unwrap().eigenvalues;
        for (a, c) in e0.iter().zip(&e1) {
            assert!((a - c).abs() < 1e-10);
        }
    }
}

#[test]
fn hermiticity_of_assembled_operators() {
    let b = basis(8, 3);
    let g = b.geometry;
    let pot = PotentialSpec { w: random_modes(&g, 2, 0.25, 3), b_pz: cosine(2, 1, 0.06), ..Default::default() };
    let phi = GaugePoint::new(0.3, 0.1);
    assert!(build_hamiltonian(&b, &pot, phi).unwrap().hermiticity_defect() < 1e-12);
    for s in [Direction::X, Direction::Y] {
        assert!(velocity_matrix(&b, &pot, phi, s).unwrap().hermiticity_defect() < 1e-12);
    }
}

#[test]
fn lll_bandwidth_bounded_by_twice_sup_norm_and_gap_bound_respected() {
    let b = basis(8, 4);
    let g = b.geometry;
    let mut pot = PotentialSpec { w: cosine(1, 1, 0.05), ..Default::default() };
    pot.compute_norms(&g);
    let s = diagonalize(&build_hamiltonian(&b, &pot, GaugePoint::new(0.1, 0.2)).unwrap(), 8).unwrap();
    let sup = pot.norms.w_plus.max(pot.norms.w_minus);
    assert!(s.spread <= 2.0 * sup);

    let mut pot = PotentialSpec { w: random_modes(&g, 2, 0.3, 21), ..Default::default() };
    pot.compute_norms(&g);
    let report = hallcond::operators::gap_condition(&g, &pot, 1);
    assert!(report.holds);
    for &(fx, fy) in &[(0.0, 0.0), (0.3, 0.6), (0.9, 0.2)] {
        let s = diagonalize(&build_hamiltonian(&b, &pot, GaugePoint::from_fractions(&g, fx, fy)).unwrap(), 8).unwrap();
        assert!(s.gap >= report.lhs - report.rhs, "gap {} bound {}", s.gap, report.lhs - report.rhs);
    }
}

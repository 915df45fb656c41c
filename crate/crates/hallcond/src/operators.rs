//! Single-particle Hamiltonian and velocity matrices in the Landau basis,
//! dense diagonalization and the non-interacting gap condition.
//!
//! The Hamiltonian at gauge point `φ` is
//! `H(φ) = ½(Π(φ) + A_P)² + W` with `Π(φ) = p + A₀ + φ`. In the basis at `φ`
//! the Landau part is diagonal. With `div A_P = 0` the cross term is `A_P·Π`,
//! assembled as a product through one extra Landau level so that the
//! truncated matrix equals the projection of the exact operator. The velocity
//! `v_s = ∂H/∂φ_s = Π_s + A_P,s` is the matrix of that operator in the same
//! basis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint, TorusGeometry};
use crate::landau::{connection_element, kinetic_element, plane_wave_value, BasisSet};
use crate::potential::{FourierMode, PotentialSpec};

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Default multiplet separation factor: a warning is raised when `gap ≤ κ·spread`.
pub const DEFAULT_KAPPA: f64 = 100.0;

/// Hermiticity tolerance (relative Frobenius norm).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Operator kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OperatorKind {
    /// Hamiltonian.
    Hamiltonian,
    /// Velocity along x.
    VelocityX,
    /// Velocity along y.
    VelocityY,
    /// Plane wave with reciprocal indices.
    PlaneWave(i64, i64),
}

/// Dense operator at a gauge point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    /// Gauge point of the basis.
    pub phi: GaugePoint,
    /// Operator kind.
    pub kind: OperatorKind,
    /// Matrix entries over orbital indices.
    pub entries: CMat,
}

impl OperatorMatrix {
    /// Relative anti-Hermitian part `‖A − A†‖_F / ‖A‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }
}

/// Relative anti-Hermitian part of a matrix.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / norm
}

/// Plane-wave matrix `⟨φ_i| e^{iq·r} |φ_j⟩` with `rows × cols` Landau levels.
fn plane_wave_block(b: &BasisSet, phi: GaugePoint, a: i64, bq: i64, n_rows: usize, n_cols: usize) -> CMat {
    let mm = b.m();
    let mut out = CMat::zeros(n_rows * mm, n_cols * mm);
    for mj in b.m_min()..=b.m_max() {
        let (mi, s) = b.reduce_label(mj + a);
        for np in 0..n_cols {
            let j = b.index(np, mj);
            for n in 0..n_rows {
                let i = b.index(n, mi);
                out[(i, j)] = plane_wave_value(b, phi, n, np, mj, s, a, bq);
            }
        }
    }
    out
}

/// Fourier series `Σ c_q e^{iq·r}` as a `rows × cols` level block.
fn series_block(b: &BasisSet, phi: GaugePoint, modes: &[FourierMode], n_rows: usize, n_cols: usize) -> CMat {
    let mm = b.m();
    let mut out = CMat::zeros(n_rows * mm, n_cols * mm);
    for mode in modes {
        if mode.c.norm() == 0.0 {
            continue;
        }
        for mj in b.m_min()..=b.m_max() {
            let (mi, s) = b.reduce_label(mj + mode.a);
            for np in 0..n_cols {
                let j = b.index(np, mj);
                for n in 0..n_rows {
                    let i = b.index(n, mi);
                    out[(i, j)] += mode.c * plane_wave_value(b, phi, n, np, mj, s, mode.a, mode.b);
                }
            }
        }
    }
    out
}

/// Kinetic momentum `Π_s` as a `rows × cols` level block.
fn kinetic_block(b: &BasisSet, s: Direction, n_rows: usize, n_cols: usize) -> CMat {
    let ext = b.with_levels(n_rows.max(n_cols));
    let mm = b.m();
    CMat::from_fn(n_rows * mm, n_cols * mm, |i, j| kinetic_element(&ext, i, j, s))
}

/// `⟨φ_{n,k}| exp(i(2πa x/Lx + 2πb y/Ly)) |φ_{n',k'}⟩`.
pub fn plane_wave_matrix(b: &BasisSet, phi: GaugePoint, a: i64, bq: i64) -> OperatorMatrix {
    OperatorMatrix {
        phi,
        kind: OperatorKind::PlaneWave(a, bq),
        entries: plane_wave_block(b, phi, a, bq, b.n_max, b.n_max),
    }
}

fn check_geometry(b: &BasisSet, pot: &PotentialSpec) -> Result<()> {
    if b.geometry.is_zero_field() {
        return Err(HallError::Config("Landau operators need B > 0".into()));
    }
    pot.validate()
}

/// Hamiltonian `H(φ)` in the basis at `φ`.
pub fn build_hamiltonian(b: &BasisSet, pot: &PotentialSpec, phi: GaugePoint) -> Result<OperatorMatrix> {
    check_geometry(b, pot)?;
    let n = b.n_max;
    let mut h = series_block(b, phi, &pot.w, n, n);
    for i in 0..b.dim() {
        h[(i, i)] += Complex64::new(b.level_energy(b.orbital(i).n), 0.0);
    }
    if pot.has_vector_potential() {
        let g = &b.geometry;
        let (ax, ay) = pot.a_p_modes(g);
        for (modes, s) in [(&ax, Direction::X), (&ay, Direction::Y)] {
            let a_block = series_block(b, phi, modes, n, n + 1);
            let p_block = kinetic_block(b, s, n + 1, n);
            h += a_block * p_block;
        }
        h += series_block(b, phi, &pot.a_p_square_half(g), n, n);
        let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        h = herm;
    }
    Ok(OperatorMatrix { phi, kind: OperatorKind::Hamiltonian, entries: h })
}

/// Velocity `v_s(φ) = Π_s + A_P,s` in the basis at `φ`.
pub fn velocity_matrix(b: &BasisSet, pot: &PotentialSpec, phi: GaugePoint, s: Direction) -> Result<OperatorMatrix> {
    check_geometry(b, pot)?;
    let n = b.n_max;
    let mut v = kinetic_block(b, s, n, n);
    if pot.has_vector_potential() {
        let (ax, ay) = pot.a_p_modes(&b.geometry);
        let modes = match s {
            Direction::X => ax,
            Direction::Y => ay,
        };
        v += series_block(b, phi, &modes, n, n);
    }
    let kind = match s {
        Direction::X => OperatorKind::VelocityX,
        Direction::Y => OperatorKind::VelocityY,
    };
    Ok(OperatorMatrix { phi, kind, entries: v })
}

/// Connection `Γ_s = ⟨φ_i|∂_s φ_j⟩` of the moving basis.
pub fn basis_connection(b: &BasisSet, phi: GaugePoint, s: Direction) -> CMat {
    CMat::from_fn(b.dim(), b.dim(), |i, j| connection_element(b, phi, i, j, s))
}

/// Covariant derivative of the Hamiltonian matrix from finite differences:
/// `(H(φ+δ) − H(φ−δ))/2δ − [H Γ_s − Γ_s H]`, where the commutator term removes
/// the motion of the basis. It converges to `v_s` at second order in `δ`.
/// The correction is computed with one extra level so that it is exact.
pub fn covariant_difference(b: &BasisSet, pot: &PotentialSpec, phi: GaugePoint, s: Direction, delta: f64) -> Result<CMat> {
    let plus = build_hamiltonian(b, pot, phi.shifted(s, delta))?.entries;
    let minus = build_hamiltonian(b, pot, phi.shifted(s, -delta))?.entries;
    let fd = (plus - minus) / Complex64::new(2.0 * delta, 0.0);
    let ext = b.with_levels(b.n_max + 1);
    let h_ext = build_hamiltonian(&ext, pot, phi)?.entries;
    let gamma = basis_connection(&ext, phi, s);
    let comm = &h_ext * &gamma - &gamma * &h_ext;
    let d = b.dim();
    Ok(fd - comm.view((0, 0), (d, d)))
}

/// Eigenpairs at one gauge point with ground-multiplet statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Gauge point.
    pub phi: GaugePoint,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: CMat,
    /// Declared multiplet size.
    pub q: usize,
    /// `E_{q−1} − E_0`.
    pub spread: f64,
    /// `E_q − E_{q−1}`.
    pub gap: f64,
    /// Set when `gap ≤ κ·spread`.
    pub degeneracy_warning: bool,
}

/// Ascending Hermitian eigendecomposition.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(a.clone());
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Dense diagonalization with multiplet bookkeeping for the lowest `q` states.
pub fn diagonalize(h: &OperatorMatrix, q: usize) -> Result<SpectralData> {
    diagonalize_with_kappa(h, q, DEFAULT_KAPPA)
}

/// As [`diagonalize`] with an explicit separation factor.
pub fn diagonalize_with_kappa(h: &OperatorMatrix, q: usize, kappa: f64) -> Result<SpectralData> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(HallError::NonHermitian(defect));
    }
    let n = h.entries.nrows();
    if q == 0 || q > n {
        return Err(HallError::Config(format!("multiplet size q = {q} invalid for dimension {n}")));
    }
    let (eigenvalues, eigenvectors) = hermitian_eigen(&h.entries);
    let spread = eigenvalues[q - 1] - eigenvalues[0];
    let gap = if q < n { eigenvalues[q] - eigenvalues[q - 1] } else { f64::INFINITY };
    Ok(SpectralData {
        phi: h.phi,
        eigenvalues,
        eigenvectors,
        q,
        spread,
        gap,
        degeneracy_warning: gap <= kappa * spread,
    })
}

/// Cluster the lowest eigenvalues: among the splittings whose gap exceeds
/// `ratio` times the spread of the levels below, pick the widest gap.
pub fn auto_multiplet(eigenvalues: &[f64], ratio: f64) -> Option<usize> {
    (1..eigenvalues.len())
        .filter(|&q| {
            let spread = eigenvalues[q - 1] - eigenvalues[0];
            let gap = eigenvalues[q] - eigenvalues[q - 1];
            gap > ratio * spread && gap > 0.0
        })
        .max_by(|&a, &b| {
            let ga = eigenvalues[a] - eigenvalues[a - 1];
            let gb = eigenvalues[b] - eigenvalues[b - 1];
            ga.total_cmp(&gb)
        })
}

/// Evaluation of the non-interacting gap inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapReport {
    /// `ħω_c`.
    pub lhs: f64,
    /// Right side of the inequality.
    pub rhs: f64,
    /// `lhs > rhs`.
    pub holds: bool,
    /// Target integer filling `ℓ`.
    pub ell: usize,
}

/// Gap condition for `ℓ` filled levels:
/// `ω_c > √(2ω_c)‖|A_P|‖[√(ℓ+½) + √(ℓ−½)] + ‖|A_P|‖²/2 + ‖W⁺‖ + ‖W⁻‖`.
pub fn gap_condition(geom: &TorusGeometry, pot: &PotentialSpec, ell: usize) -> GapReport {
    let n = &pot.norms;
    let l = ell as f64;
    let lhs = geom.omega_c;
    let rhs = (2.0 * geom.omega_c).sqrt() * n.a_p * ((l + 0.5).sqrt() + (l - 0.5).max(0.0).sqrt())
        + 0.5 * n.a_p * n.a_p
        + n.w_plus
        + n.w_minus;
    GapReport { lhs, rhs, holds: lhs > rhs, ell }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{cosine, Norms};

    fn basis(m: usize, n_max: usize) -> BasisSet {
        BasisSet::new(TorusGeometry::from_flux(m, 1.0, 1.0).unwrap(), n_max).unwrap()
    }

    #[test]
    fn zero_wave_is_identity_and_adjoint_relation_holds() {
        let b = basis(8, 3);
        let phi = GaugePoint::new(0.13, 0.41);
        let id = plane_wave_matrix(&b, phi, 0, 0).entries;
        assert!((id - CMat::identity(b.dim(), b.dim())).norm() < 1e-13);
        let p = plane_wave_matrix(&b, phi, 2, -1).entries;
        let m = plane_wave_matrix(&b, phi, -2, 1).entries;
        assert!((p - m.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let b = basis(4, 2);
        let h = build_hamiltonian(&b, &PotentialSpec::zero(), GaugePoint::new(0.2, 0.1)).unwrap();
        let s = diagonalize(&h, 4).unwrap();
        for (i, e) in s.eigenvalues.iter().enumerate() {
            let expect = if i < 4 { 0.5 } else { 1.5 };
            assert!((e - expect).abs() < 1e-14);
        }
        assert!((s.gap - 1.0).abs() < 1e-14 && s.spread.abs() < 1e-14);
    }

    #[test]
    fn cosine_potential_is_sum_of_two_waves() {
        let b = basis(8, 2);
        let phi = GaugePoint::new(0.05, 0.3);
        let pot = PotentialSpec { w: cosine(1, 0, 0.1), ..Default::default() };
        let h = build_hamiltonian(&b, &pot, phi).unwrap().entries;
        let mut expect = plane_wave_matrix(&b, phi, 1, 0).entries + plane_wave_matrix(&b, phi, -1, 0).entries;
        expect *= Complex64::new(0.1, 0.0);
        for i in 0..b.dim() {
            expect[(i, i)] += Complex64::new(b.level_energy(b.orbital(i).n), 0.0);
        }
        assert!((h - expect).norm() < 1e-13);
    }

    #[test]
    fn gap_condition_examples() {
        let g = TorusGeometry::from_flux(8, 1.0, 1.0).unwrap();
        let mut p = PotentialSpec::zero();
        p.norms = Norms { w_plus: 0.2, w_minus: 0.2, a_p: 0.0, d2_w: 0.0 };
        let r = gap_condition(&g, &p, 1);
        assert!(r.holds && (r.rhs - 0.4).abs() < 1e-15);
        p.norms.w_plus = 0.6;
        p.norms.w_minus = 0.6;
        assert!(!gap_condition(&g, &p, 1).holds);
        p.norms = Norms { w_plus: 0.0, w_minus: 0.0, a_p: 0.1, d2_w: 0.0 };
        let r = gap_condition(&g, &p, 1);
        let expect = 2f64.sqrt() * 0.1 * (1.5f64.sqrt() + 0.5f64.sqrt()) + 0.005;
        assert!((r.rhs - expect).abs() < 1e-14 && r.holds);
        assert!((r.rhs - 0.278).abs() < 1e-3);
    }

    #[test]
    fn auto_multiplet_finds_cluster() {
        assert_eq!(auto_multiplet(&[0.0, 1e-6, 2e-6, 1.0, 1.1], 100.0), Some(3));
    }
}

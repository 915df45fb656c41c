//! N-electron Hamiltonians over a truncated Landau-orbital set.
//!
//! States are occupation bitmasks over the single-particle basis at a gauge
//! point, ordered as `c†_{i1} c†_{i2} … |0⟩` with `i1 < i2 < …`. One-body
//! operators are lifted from their single-particle matrices and the
//! interaction `W⁽²⁾(r₁ − r₂)` is assembled from plane-wave factors.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint};
use crate::landau::{orbital_overlap, wrap_map, BasisSet, Orbital};
use crate::operators::{
    basis_connection, build_hamiltonian, hermitian_eigen, plane_wave_matrix, velocity_matrix, CMat, DEFAULT_KAPPA,
};
use crate::potential::PotentialSpec;

/// Default cap on the Fock-space dimension.
pub const DEFAULT_DIM_CAP: usize = 2_000_000;

/// Largest dimension solved densely by [`ground_multiplet`].
pub const DENSE_LIMIT: usize = 4000;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Antisymmetric occupation basis with `N` electrons.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    /// Single-particle orbitals in basis order.
    pub orbitals: Vec<Orbital>,
    /// Electron count.
    pub n_particles: usize,
    /// Occupation bitmasks in increasing integer order.
    pub states: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

/// `C(n, k)` as a float, which is enough for size checks.
fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl FockBasis {
    /// All `N`-electron states over the orbitals of `b`.
    pub fn new(b: &BasisSet, n_particles: usize) -> Result<Self> {
        Self::with_cap(b, n_particles, DEFAULT_DIM_CAP)
    }

    /// As [`FockBasis::new`] with an explicit dimension cap.
    pub fn with_cap(b: &BasisSet, n_particles: usize, cap: usize) -> Result<Self> {
        let n_orb = b.dim();
        if n_orb > 64 {
            return Err(HallError::Config(format!("{n_orb} orbitals exceed the 64-bit occupation mask")));
        }
        if n_particles > n_orb {
            return Err(HallError::Config(format!("N = {n_particles} exceeds the {n_orb} available orbitals")));
        }
        let size = binomial(n_orb, n_particles);
        if size > cap as f64 {
            return Err(HallError::DimensionCap { dim: size as usize, cap });
        }
        let mut states = Vec::with_capacity(size as usize);
        if n_particles == 0 {
            states.push(0);
        } else {
            let limit = if n_orb == 64 { u64::MAX } else { (1u64 << n_orb) - 1 };
            let mut s: u64 = (1u64 << n_particles) - 1;
            loop {
                states.push(s);
                // Next integer with the same popcount.
                let c = s & s.wrapping_neg();
                let r = s.wrapping_add(c);
                if r == 0 || r > limit {
                    break;
                }
                let next = (((r ^ s) >> 2) / c) | r;
                if next > limit {
                    break;
                }
                s = next;
            }
        }
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self { orbitals: b.orbitals(), n_particles, states, lookup })
    }

    /// Number of states.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Index of an occupation mask.
    pub fn find(&self, mask: u64) -> Option<usize> {
        self.lookup.get(&mask).copied()
    }

    /// Occupied orbital indices of state `s`, ascending.
    pub fn occupied(&self, s: usize) -> Vec<usize> {
        bits(self.states[s])
    }

    /// Total momentum label `Σ m` reduced mod `M`.
    pub fn momentum(&self, s: usize, m: usize) -> usize {
        let total: i64 = bits(self.states[s]).iter().map(|&i| self.orbitals[i].m).sum();
        total.rem_euclid(m as i64) as usize
    }
}

fn bits(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        out.push(i);
        mask &= mask - 1;
    }
    out
}

fn below(mask: u64, i: usize) -> u32 {
    (mask & ((1u64 << i) - 1)).count_ones()
}

/// `c_i |mask⟩` as `(mask', sign)`.
fn annihilate(mask: u64, i: usize) -> Option<(u64, f64)> {
    if mask & (1 << i) == 0 {
        return None;
    }
    let sign = if below(mask, i) % 2 == 0 { 1.0 } else { -1.0 };
    Some((mask & !(1 << i), sign))
}

/// `c†_i |mask⟩` as `(mask', sign)`.
fn create(mask: u64, i: usize) -> Option<(u64, f64)> {
    if mask & (1 << i) != 0 {
        return None;
    }
    let sign = if below(mask, i) % 2 == 0 { 1.0 } else { -1.0 };
    Some((mask | (1 << i), sign))
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    /// Dimension.
    pub dim: usize,
    /// Row pointers.
    pub row_ptr: Vec<usize>,
    /// Column indices.
    pub cols: Vec<usize>,
    /// Values.
    pub vals: Vec<Complex64>,
}

impl SparseMatrix {
    fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let row = |r: usize| {
            let mut s = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            s
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if self.dim > 2048 {
                return (0..self.dim).into_par_iter().map(row).collect();
            }
        }
        (0..self.dim).map(row).collect()
    }

    /// Dense copy.
    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// Kind of a many-body operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ManyBodyKind {
    /// Hamiltonian.
    Hamiltonian,
    /// Total velocity along x.
    VelocityX,
    /// Total velocity along y.
    VelocityY,
}

/// Sparse many-body operator at a gauge point.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyOperator {
    /// Gauge point of the orbital basis.
    pub phi: GaugePoint,
    /// Operator kind.
    pub kind: ManyBodyKind,
    /// Entries.
    pub matrix: SparseMatrix,
}

/// Two-body table `V[i][j][k][l] = ⟨ij|W⁽²⁾(r₁ − r₂)|kl⟩` stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable {
    /// Single-particle dimension.
    pub dim: usize,
    /// Flat entries with index `((i·d + j)·d + k)·d + l`.
    pub values: Vec<Complex64>,
}

impl InteractionTable {
    /// Entry `V_{ijkl}`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let d = self.dim;
        self.values[((i * d + j) * d + k) * d + l]
    }
}

/// Interaction table `V_{ijkl} = Σ_q c_q ⟨i|e^{iq·r}|k⟩⟨j|e^{−iq·r}|l⟩` in the
/// basis at `phi`.
pub fn interaction_elements(b: &BasisSet, pot: &PotentialSpec, phi: GaugePoint) -> InteractionTable {
    let d = b.dim();
    let mut values = vec![ZERO; d * d * d * d];
    for mode in &pot.w2 {
        if mode.c.norm() == 0.0 {
            continue;
        }
        let p = plane_wave_matrix(b, phi, mode.a, mode.b).entries;
        let pm = plane_wave_matrix(b, phi, -mode.a, -mode.b).entries;
        for i in 0..d {
            for k in 0..d {
                let pik = p[(i, k)];
                if pik == ZERO {
                    continue;
                }
                for j in 0..d {
                    for l in 0..d {
                        let pjl = pm[(j, l)];
                        if pjl != ZERO {
                            values[((i * d + j) * d + k) * d + l] += mode.c * pik * pjl;
                        }
                    }
                }
            }
        }
    }
    InteractionTable { dim: d, values }
}

/// Second-quantized lift `Σ_{ij} A_{ij} c†_i c_j` of a one-body matrix.
pub fn lift_one_body(fb: &FockBasis, a: &CMat) -> SparseMatrix {
    let d = a.nrows();
    let rows: Vec<Vec<(usize, Complex64)>> = (0..fb.dim())
        .map(|r| {
            let mask = fb.states[r];
            let mut row = Vec::new();
            // Row r collects ⟨r| c†_i c_j |s⟩; iterate over i occupied in r and j.
            for i in bits(mask) {
                let Some((m1, s1)) = annihilate(mask, i) else { continue };
                for j in 0..d {
                    let v = a[(i, j)];
                    if v == ZERO {
                        continue;
                    }
                    if let Some((m2, s2)) = create(m1, j) {
                        if let Some(col) = fb.find(m2) {
                            row.push((col, v * s1 * s2));
                        }
                    }
                }
            }
            row
        })
        .collect();
    SparseMatrix::from_rows(rows)
}

/// Lift `½ Σ V_{ijkl} c†_i c†_j c_l c_k` of the two-body table.
pub fn lift_two_body(fb: &FockBasis, v: &InteractionTable) -> SparseMatrix {
    let d = v.dim;
    let rows: Vec<Vec<(usize, Complex64)>> = (0..fb.dim())
        .map(|r| {
            // ⟨r| c†_i c†_j c_l c_k |s⟩ = conj of ⟨s| c†_k c†_l c_j c_i |r⟩, so
            // remove i<j from r, add k<l to reach s.
            let mask = fb.states[r];
            let occ = bits(mask);
            let mut row = Vec::new();
            for (x, &i) in occ.iter().enumerate() {
                for &j in &occ[x + 1..] {
                    let (m1, s1) = annihilate(mask, i).unwrap();
                    let (m2, s2) = annihilate(m1, j).unwrap();
                    for k in 0..d {
                        if m2 & (1 << k) != 0 {
                            continue;
                        }
                        for l in (k + 1)..d {
                            if m2 & (1 << l) != 0 {
                                continue;
                            }
                            // ½ Σ over the four orderings of (i,j) and (k,l).
                            let amp = 0.5 * (v.get(i, j, k, l) - v.get(j, i, k, l) - v.get(i, j, l, k) + v.get(j, i, l, k));
                            if amp.norm() < 1e-300 {
                                continue;
                            }
                            // |s⟩ = c†_k c†_l |m2⟩ up to the sign below, and
                            // ⟨r|c†_i c†_j = (c_j c_i|r⟩)†.
                            let (m3, s3) = create(m2, l).unwrap();
                            let (m4, s4) = create(m3, k).unwrap();
                            if let Some(col) = fb.find(m4) {
                                row.push((col, amp * (s1 * s2 * s3 * s4)));
                            }
                        }
                    }
                }
            }
            row
        })
        .collect();
    SparseMatrix::from_rows(rows)
}

/// A many-body problem: single-particle basis, potentials and Fock space.
#[derive(Debug, Clone)]
pub struct ManyBodySystem {
    /// Single-particle basis.
    pub basis: BasisSet,
    /// Potentials, including `W⁽²⁾`.
    pub pot: PotentialSpec,
    /// Fock space.
    pub fock: FockBasis,
}

impl ManyBodySystem {
    /// Build the system with the default dimension cap.
    pub fn new(basis: BasisSet, pot: PotentialSpec, n_particles: usize) -> Result<Self> {
        pot.validate()?;
        let fock = FockBasis::new(&basis, n_particles)?;
        Ok(Self { basis, pot, fock })
    }

    /// Hamiltonian at `phi`.
    pub fn hamiltonian(&self, phi: GaugePoint) -> Result<ManyBodyOperator> {
        build_manybody_hamiltonian(&self.basis, &self.fock, &self.pot, phi)
    }

    /// Total velocity at `phi`.
    pub fn velocity(&self, phi: GaugePoint, s: Direction) -> Result<ManyBodyOperator> {
        manybody_velocity(&self.basis, &self.fock, &self.pot, phi, s)
    }
}

/// `H = Σ one-body H(φ) + ½ Σ V c†c†cc` in the Fock space at `phi`.
pub fn build_manybody_hamiltonian(
    b: &BasisSet,
    fb: &FockBasis,
    pot: &PotentialSpec,
    phi: GaugePoint,
) -> Result<ManyBodyOperator> {
    let h1 = build_hamiltonian(b, pot, phi)?.entries;
    let mut rows = rows_of(&lift_one_body(fb, &h1));
    if !pot.w2.is_empty() && fb.n_particles >= 2 {
        let v = interaction_elements(b, pot, phi);
        for (r, extra) in rows_of(&lift_two_body(fb, &v)).into_iter().enumerate() {
            rows[r].extend(extra);
        }
    }
    Ok(ManyBodyOperator { phi, kind: ManyBodyKind::Hamiltonian, matrix: SparseMatrix::from_rows(rows) })
}

fn rows_of(m: &SparseMatrix) -> Vec<Vec<(usize, Complex64)>> {
    (0..m.dim)
        .map(|r| (m.row_ptr[r]..m.row_ptr[r + 1]).map(|k| (m.cols[k], m.vals[k])).collect())
        .collect()
}

/// Total velocity `Σ_j v_s(j)`, the lift of the single-particle velocity.
pub fn manybody_velocity(
    b: &BasisSet,
    fb: &FockBasis,
    pot: &PotentialSpec,
    phi: GaugePoint,
    s: Direction,
) -> Result<ManyBodyOperator> {
    let v = velocity_matrix(b, pot, phi, s)?.entries;
    let kind = match s {
        Direction::X => ManyBodyKind::VelocityX,
        Direction::Y => ManyBodyKind::VelocityY,
    };
    Ok(ManyBodyOperator { phi, kind, matrix: lift_one_body(fb, &v) })
}

/// Dense lifted velocities `(V_x, V_y)` at `phi`.
pub fn kubo_lift_dense(system: &ManyBodySystem, phi: GaugePoint) -> Result<(CMat, CMat)> {
    let vx = system.velocity(phi, Direction::X)?.matrix.to_dense();
    let vy = system.velocity(phi, Direction::Y)?.matrix.to_dense();
    Ok((vx, vy))
}

/// Covariant finite difference of the many-body Hamiltonian, the many-body
/// analogue of [`crate::operators::covariant_difference`]. Converges to the
/// lifted velocity at second order in `delta`.
pub fn manybody_covariant_difference(
    b: &BasisSet,
    n_particles: usize,
    pot: &PotentialSpec,
    phi: GaugePoint,
    s: Direction,
    delta: f64,
) -> Result<CMat> {
    let fb = FockBasis::new(b, n_particles)?;
    let plus = build_manybody_hamiltonian(b, &fb, pot, phi.shifted(s, delta))?.matrix.to_dense();
    let minus = build_manybody_hamiltonian(b, &fb, pot, phi.shifted(s, -delta))?.matrix.to_dense();
    let fd = (plus - minus) / Complex64::new(2.0 * delta, 0.0);
    let ext = b.with_levels(b.n_max + 1);
    let fext = FockBasis::new(&ext, n_particles)?;
    let h = build_manybody_hamiltonian(&ext, &fext, pot, phi)?.matrix.to_dense();
    let gamma = lift_one_body(&fext, &basis_connection(&ext, phi, s)).to_dense();
    let comm = &h * &gamma - &gamma * &h;
    // Orbital indices of `b` coincide with the first levels of `ext`.
    let map: Vec<usize> = fb.states.iter().map(|&m| fext.find(m).unwrap()).collect();
    let d = fb.dim();
    Ok(CMat::from_fn(d, d, |i, j| fd[(i, j)] - comm[(map[i], map[j])]))
}

/// Lowest `q` eigenpairs with multiplet statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundMultiplet {
    /// Gauge point.
    pub phi: GaugePoint,
    /// The `q` lowest eigenvalues.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMat,
    /// `max |E₀μ − E₀μ′|`.
    pub spread: f64,
    /// `E_q − E_{q−1}`.
    pub gap: f64,
    /// Set when `gap ≤ κ·spread`.
    pub degeneracy_warning: bool,
}

impl GroundMultiplet {
    /// `gap / spread` (infinite for an exactly degenerate multiplet).
    pub fn separation(&self) -> f64 {
        if self.spread == 0.0 {
            f64::INFINITY
        } else {
            self.gap / self.spread
        }
    }
}

/// Lowest `q` eigenpairs: dense below [`DENSE_LIMIT`], Lanczos above.
pub fn ground_multiplet(h: &ManyBodyOperator, q: usize) -> Result<GroundMultiplet> {
    ground_multiplet_with(h, q, DENSE_LIMIT)
}

/// As [`ground_multiplet`] with an explicit dense/iterative threshold.
pub fn ground_multiplet_with(h: &ManyBodyOperator, q: usize, dense_limit: usize) -> Result<GroundMultiplet> {
    let dim = h.matrix.dim;
    if q == 0 || dim < q + 1 {
        return Err(HallError::Config(format!("need dim ≥ q + 1, got dim = {dim}, q = {q}")));
    }
    let (vals, vecs) = if dim <= dense_limit {
        let (vals, vecs) = hermitian_eigen(&h.matrix.to_dense());
        (vals[..=q].to_vec(), vecs.columns(0, q + 1).into_owned())
    } else {
        lanczos_lowest(&h.matrix, q + 1, 1e-10, 0x5eed)?
    };
    let spread = vals[q - 1] - vals[0];
    let gap = vals[q] - vals[q - 1];
    Ok(GroundMultiplet {
        phi: h.phi,
        energies: vals[..q].to_vec(),
        vectors: vecs.columns(0, q).into_owned(),
        spread,
        gap,
        degeneracy_warning: gap <= DEFAULT_KAPPA * spread,
    })
}

/// Lowest `k` eigenpairs of a sparse Hermitian matrix by thick-restarted
/// Lanczos with full reorthogonalization. The start vector is drawn from a
/// seeded generator so results are reproducible.
pub fn lanczos_lowest(a: &SparseMatrix, k: usize, tol: f64, seed: u64) -> Result<(Vec<f64>, CMat)> {
    let n = a.dim;
    let max_basis = (2 * k + 40).min(n);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut start: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut images: Vec<DVector<Complex64>> = Vec::new();
    let push = |v: Vec<Complex64>, basis: &mut Vec<DVector<Complex64>>| -> bool {
        let mut v = DVector::from_vec(v);
        for _ in 0..2 {
            for u in basis.iter() {
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let norm = v.norm();
        if norm < 1e-12 {
            return false;
        }
        basis.push(v / Complex64::new(norm, 0.0));
        true
    };
    push(std::mem::take(&mut start), &mut basis);
    for _restart in 0..500 {
        while basis.len() < max_basis {
            let last = basis.last().unwrap().clone();
            let w = DVector::from_vec(a.apply(last.as_slice()));
            images.push(w.clone());
            if !push(w.data.into(), &mut basis) {
                let extra: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
                if !push(extra, &mut basis) {
                    break;
                }
            }
        }
        while images.len() < basis.len() {
            let v = &basis[images.len()];
            images.push(DVector::from_vec(a.apply(v.as_slice())));
        }
        let m = basis.len();
        let t = CMat::from_fn(m, m, |i, j| basis[i].dotc(&images[j]));
        let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
        let (theta, y) = hermitian_eigen(&t);
        let kk = k.min(m);
        let mut ritz = Vec::with_capacity(kk);
        let mut ritz_images = Vec::with_capacity(kk);
        let mut worst: f64 = 0.0;
        let mut worst_residual = DVector::zeros(n);
        for c in 0..kk {
            let mut x = DVector::zeros(n);
            let mut ax = DVector::zeros(n);
            for r in 0..m {
                x += &basis[r] * y[(r, c)];
                ax += &images[r] * y[(r, c)];
            }
            let res = &ax - &x * Complex64::new(theta[c], 0.0);
            let rn = res.norm();
            if rn > worst {
                worst = rn;
                worst_residual = res;
            }
            ritz.push(x);
            ritz_images.push(ax);
        }
        if worst < tol || m == n {
            let vecs = CMat::from_columns(&ritz);
            return Ok((theta[..kk].to_vec(), vecs));
        }
        basis = ritz;
        images = ritz_images;
        push(worst_residual.data.into(), &mut basis);
    }
    Err(HallError::Config("Lanczos iteration did not converge".into()))
}

/// Single-particle overlap matrix `S_ij = ⟨φ_i(φ)|φ_j(φ′)⟩` between bases at
/// two gauge points (block-diagonal in the momentum label).
pub fn basis_overlap(b: &BasisSet, phi: GaugePoint, phi2: GaugePoint) -> CMat {
    let d = b.dim();
    CMat::from_fn(d, d, |i, j| {
        let (oi, oj) = (b.orbital(i), b.orbital(j));
        if oi.m != oj.m {
            ZERO
        } else {
            orbital_overlap(b, phi, phi2, oi.n, oj.n, oi.m)
        }
    })
}

/// Fock-space overlap `⟨s(φ)|s′(φ′)⟩ = det S[s, s′]` applied to a set of
/// coefficient columns: returns `Σ_{s′} ⟨s|s′⟩ C_{s′ν}` for every `s`.
pub fn fock_overlap_apply(fb: &FockBasis, s: &CMat, cols: &CMat) -> CMat {
    let dim = fb.dim();
    let n = fb.n_particles;
    let mut out = CMat::zeros(dim, cols.ncols());
    // Only states with identical momentum-label multisets overlap.
    let key = |mask: u64| {
        let mut ms: Vec<i64> = bits(mask).iter().map(|&i| fb.orbitals[i].m).collect();
        ms.sort_unstable();
        ms
    };
    let mut groups: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (idx, &mask) in fb.states.iter().enumerate() {
        groups.entry(key(mask)).or_default().push(idx);
    }
    for members in groups.values() {
        for &r in members {
            let occ_r = bits(fb.states[r]);
            for &c in members {
                let occ_c = bits(fb.states[c]);
                let sub = CMat::from_fn(n, n, |x, y| s[(occ_r[x], occ_c[y])]);
                let det = if n == 0 { Complex64::new(1.0, 0.0) } else { sub.determinant() };
                if det == ZERO {
                    continue;
                }
                for nu in 0..cols.ncols() {
                    out[(r, nu)] += det * cols[(c, nu)];
                }
            }
        }
    }
    out
}

/// Large-gauge identification lifted to Fock space: a state with
/// coefficients `C` at `φ` equals the state with coefficients
/// `C′[target[s]] = factor[s]·C[s]` at `φ + Δφ_s`, for `φy`-dependent factors
/// evaluated at a given `φy`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockWrap {
    /// Direction of the shift.
    pub direction: Direction,
    /// Image state index.
    pub target: Vec<usize>,
    /// Reordering sign of each state.
    pub sign: Vec<f64>,
    /// Phase slope per state: the total phase is `exp(−i slope φy)`.
    pub slope: Vec<f64>,
}

impl FockWrap {
    /// Build the lift of the single-particle wrap map.
    pub fn new(b: &BasisSet, fb: &FockBasis, direction: Direction) -> Self {
        let w = wrap_map(b, direction);
        let inv = w.inverse_permutation();
        let mut target = Vec::with_capacity(fb.dim());
        let mut sign = Vec::with_capacity(fb.dim());
        let mut slope = Vec::with_capacity(fb.dim());
        for &mask in &fb.states {
            let occ = bits(mask);
            let images: Vec<usize> = occ.iter().map(|&j| inv[j]).collect();
            let mut inversions = 0usize;
            for x in 0..images.len() {
                for y in (x + 1)..images.len() {
                    if images[x] > images[y] {
                        inversions += 1;
                    }
                }
            }
            let new_mask = images.iter().fold(0u64, |acc, &i| acc | (1 << i));
            target.push(fb.find(new_mask).expect("wrap image inside the Fock space"));
            sign.push(if inversions % 2 == 0 { 1.0 } else { -1.0 });
            slope.push(images.iter().map(|&i| w.phase_slope[i]).sum());
        }
        Self { direction, target, sign, slope }
    }

    /// Transport coefficient columns across the boundary.
    pub fn transport(&self, c: &CMat, phi_y: f64) -> CMat {
        let mut out = CMat::zeros(c.nrows(), c.ncols());
        for s in 0..c.nrows() {
            let f = Complex64::from_polar(self.sign[s], -self.slope[s] * phi_y);
            for nu in 0..c.ncols() {
                out[(self.target[s], nu)] = f * c[(s, nu)];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TorusGeometry;

    fn lll(m: usize) -> BasisSet {
        BasisSet::new(TorusGeometry::from_flux(m, 1.0, 1.0).unwrap(), 1).unwrap()
    }

    #[test]
    fn fock_dimensions() {
        assert_eq!(FockBasis::new(&lll(6), 2).unwrap().dim(), 15);
        assert_eq!(FockBasis::new(&lll(12), 4).unwrap().dim(), 495);
        let vac = FockBasis::new(&lll(6), 0).unwrap();
        assert_eq!(vac.states, vec![0]);
        let b = lll(12);
        let fb = FockBasis::new(&b, 4).unwrap();
        assert!(fb.states.windows(2).all(|w| w[0] < w[1]));
        assert!(fb.states.iter().all(|s| s.count_ones() == 4));
        assert!(matches!(FockBasis::with_cap(&b, 6, 100), Err(HallError::DimensionCap { .. })));
        assert_eq!(FockBasis::new(&lll(4), 4).unwrap().dim(), 1);
    }

    #[test]
    fn fermion_signs() {
        assert_eq!(annihilate(0b1011, 3), Some((0b0011, 1.0)));
        assert_eq!(annihilate(0b1011, 1), Some((0b1001, -1.0)));
        assert_eq!(create(0b1001, 1), Some((0b1011, -1.0)));
        assert_eq!(create(0b1001, 0), None);
    }
}

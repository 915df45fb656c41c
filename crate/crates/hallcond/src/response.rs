//! Linear-response coefficients from spectral data and direct time
//! integration of the driven Schrödinger equation.
//!
//! Conductances are returned in units of `e²/h`, which in natural units
//! means multiplying by `h = 2π`. Acceleration coefficients are returned in
//! `e²/h` per unit time, with the natural-unit value kept alongside.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint, PLANCK};
use crate::manybody::{GroundMultiplet, SparseMatrix};
use crate::operators::{hermitian_eigen, CMat, SpectralData};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative energy-denominator guard in units of `ω_c`.
pub const DENOMINATOR_GUARD: f64 = 1e-10;

/// Adiabatic switching of the field `F` along y through `α(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingProtocol {
    /// Field strength `F`.
    #[serde(rename = "F")]
    pub f: f64,
    /// Switching rate `η > 0`.
    pub eta: f64,
    /// Switch-on duration `T > 0`.
    #[serde(rename = "T")]
    pub big_t: f64,
    /// Observation time `t ≥ 0`.
    pub t: f64,
}

impl SwitchingProtocol {
    /// Validated protocol.
    pub fn new(f: f64, eta: f64, big_t: f64, t: f64) -> Result<Self> {
        if !(eta > 0.0) || !(big_t > 0.0) || !(t >= 0.0) || !f.is_finite() {
            return Err(HallError::Config(format!(
                "switching protocol needs η > 0, T > 0, t ≥ 0 (got η = {eta}, T = {big_t}, t = {t})"
            )));
        }
        Ok(Self { f, eta, big_t, t })
    }

    /// `α(t) = −Ft e^{ηt}` for `t ≤ 0` and `−Ft` for `t > 0`.
    pub fn alpha(&self, time: f64) -> f64 {
        if time <= 0.0 {
            -self.f * time * (self.eta * time).exp()
        } else {
            -self.f * time
        }
    }
}

/// Switching kernel
/// `ℳ(t, ℰ; η, T) = {[iT/(ℰ+iη) − 1/(ℰ+iη)²] e^{−ηT} e^{iℰT} + [1/ℰ² − 1/(ℰ+iη)²]} e^{iℰt}`.
pub fn switching_kernel(t: f64, e: f64, eta: f64, big_t: f64) -> Result<Complex64> {
    if e == 0.0 {
        return Err(HallError::GapViolation {
            phi_x: f64::NAN,
            phi_y: f64::NAN,
            message: "switching kernel needs a nonzero energy difference".into(),
        });
    }
    let w = Complex64::new(e, eta);
    let first = (I * big_t / w - 1.0 / (w * w)) * (-eta * big_t).exp() * Complex64::from_polar(1.0, e * big_t);
    let second = Complex64::new(1.0 / (e * e), 0.0) - 1.0 / (w * w);
    Ok((first + second) * Complex64::from_polar(1.0, e * t))
}

/// How the initial state is built from the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Occupation {
    /// Free fermions: the `N` lowest single-particle orbitals are filled.
    FermiSea(usize),
    /// Many-body ground multiplet of dimension `q` with `N` electrons.
    Multiplet {
        /// Multiplet dimension.
        q: usize,
        /// Electron count.
        n: usize,
    },
}

impl Occupation {
    fn occupied(&self) -> usize {
        match *self {
            Occupation::FermiSea(n) => n,
            Occupation::Multiplet { q, .. } => q,
        }
    }

    fn weight(&self) -> f64 {
        match *self {
            Occupation::FermiSea(_) => 1.0,
            Occupation::Multiplet { q, .. } => 1.0 / q as f64,
        }
    }

    fn particles(&self) -> usize {
        match *self {
            Occupation::FermiSea(n) => n,
            Occupation::Multiplet { n, .. } => n,
        }
    }
}

/// Spectral representation shared by all response formulas: energies and
/// velocity matrices in the eigenbasis, split into occupied and excited sets.
#[derive(Debug, Clone)]
pub struct SpectralResponse {
    /// Gauge point.
    pub phi: GaugePoint,
    /// Eigenvalues ascending.
    pub energies: Vec<f64>,
    /// `v_x` in the eigenbasis.
    pub vx: CMat,
    /// `v_y` in the eigenbasis.
    pub vy: CMat,
    /// Occupation rule.
    pub occupation: Occupation,
    /// Area `Lx·Ly`.
    pub area: f64,
    /// Smallest `E_n − E_m` between excited and occupied states.
    pub gap: f64,
}

impl SpectralResponse {
    /// Build from eigenpairs and velocity matrices given in the orbital (or
    /// Fock) basis. Rejects vanishing energy denominators.
    pub fn new(
        spec: &SpectralData,
        vx: &CMat,
        vy: &CMat,
        occupation: Occupation,
        area: f64,
        omega_c: f64,
    ) -> Result<Self> {
        let u = &spec.eigenvectors;
        let k = occupation.occupied();
        if k == 0 || k >= spec.eigenvalues.len() {
            return Err(HallError::Config(format!(
                "occupied set of size {k} must be nonempty and leave excited states (dim {})",
                spec.eigenvalues.len()
            )));
        }
        let gap = spec.eigenvalues[k] - spec.eigenvalues[k - 1];
        let scale = if omega_c > 0.0 { omega_c } else { 1.0 };
        if gap < DENOMINATOR_GUARD * scale {
            return Err(HallError::GapViolation {
                phi_x: spec.phi.phi_x,
                phi_y: spec.phi.phi_y,
                message: format!("energy denominator {gap:e} below the guard"),
            });
        }
        Ok(Self {
            phi: spec.phi,
            energies: spec.eigenvalues.clone(),
            vx: u.adjoint() * vx * u,
            vy: u.adjoint() * vy * u,
            occupation,
            area,
            gap,
        })
    }

    fn v(&self, s: Direction) -> &CMat {
        match s {
            Direction::X => &self.vx,
            Direction::Y => &self.vy,
        }
    }

    /// `Σ_{m occ, n exc} f(⟨m|a|n⟩⟨n|v_y|m⟩, E_m − E_n)` weighted by `1/q`.
    fn pair_sum(&self, s: Direction, f: impl Fn(Complex64, f64) -> Complex64) -> Complex64 {
        let k = self.occupation.occupied();
        let a = self.v(s);
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..k {
            for n in k..self.energies.len() {
                total += f(a[(m, n)] * self.vy[(n, m)], self.energies[m] - self.energies[n]);
            }
        }
        total * self.occupation.weight()
    }

    /// Hall conductance in natural units.
    pub fn sigma_xy_natural(&self) -> f64 {
        let s = self.pair_sum(Direction::X, |p, e| {
            let x = p / (e * e);
            x - x.conj()
        });
        (-I * s / self.area).re
    }

    /// Hall conductance in `e²/h`.
    pub fn sigma_xy(&self) -> f64 {
        PLANCK * self.sigma_xy_natural()
    }

    /// Acceleration coefficient `γ_sy` in natural units (`e²/m_e` per area),
    /// including the diamagnetic `N/(LxLy)` for `s = y`.
    pub fn gamma_natural(&self, s: Direction) -> f64 {
        let sum = self.pair_sum(s, |p, e| Complex64::new(2.0 * (p / e).re, 0.0)).re;
        let dia = if s == Direction::Y { self.occupation.particles() as f64 } else { 0.0 };
        (dia + sum) / self.area
    }

    /// Acceleration coefficient in `e²/h` per unit time.
    pub fn gamma(&self, s: Direction) -> f64 {
        PLANCK * self.gamma_natural(s)
    }

    /// Switching correction `δσ_sy(t; η, T)` in `e²/h`.
    pub fn delta_sigma(&self, s: Direction, p: &SwitchingProtocol) -> Result<f64> {
        let k = self.occupation.occupied();
        let a = self.v(s);
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..k {
            for n in k..self.energies.len() {
                let kern = switching_kernel(p.t, self.energies[m] - self.energies[n], p.eta, p.big_t)?;
                total += a[(m, n)] * self.vy[(n, m)] * kern;
            }
        }
        let val = I * total * self.occupation.weight() / self.area;
        Ok(PLANCK * 2.0 * val.re)
    }

    /// Full report at one gauge point.
    pub fn report(&self, protocol: Option<&SwitchingProtocol>) -> Result<ResponseReport> {
        let (dx, dy) = match protocol {
            Some(p) => (Some(self.delta_sigma(Direction::X, p)?), Some(self.delta_sigma(Direction::Y, p)?)),
            None => (None, None),
        };
        Ok(ResponseReport {
            phi: self.phi,
            sigma_xy: self.sigma_xy(),
            gamma_xy: self.gamma(Direction::X),
            gamma_yy: self.gamma(Direction::Y),
            gamma_xy_natural: self.gamma_natural(Direction::X),
            gamma_yy_natural: self.gamma_natural(Direction::Y),
            delta_sigma_xy: dx,
            delta_sigma_yy: dy,
            q_used: match self.occupation {
                Occupation::FermiSea(_) => 1,
                Occupation::Multiplet { q, .. } => q,
            },
            gap: self.gap,
        })
    }
}

/// Response coefficients at one gauge point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResponseReport {
    /// Gauge point.
    pub phi: GaugePoint,
    /// `σ_xy` in `e²/h`.
    #[serde(rename = "sigmaXY")]
    pub sigma_xy: f64,
    /// `γ_xy` in `e²/h` per unit time.
    #[serde(rename = "gammaXY")]
    pub gamma_xy: f64,
    /// `γ_yy` in `e²/h` per unit time.
    #[serde(rename = "gammaYY")]
    pub gamma_yy: f64,
    /// `γ_xy` in natural units.
    #[serde(rename = "gammaXYNatural")]
    pub gamma_xy_natural: f64,
    /// `γ_yy` in natural units.
    #[serde(rename = "gammaYYNatural")]
    pub gamma_yy_natural: f64,
    /// `δσ_xy` in `e²/h`.
    #[serde(rename = "deltaSigmaXY")]
    pub delta_sigma_xy: Option<f64>,
    /// `δσ_yy` in `e²/h`.
    #[serde(rename = "deltaSigmaYY")]
    pub delta_sigma_yy: Option<f64>,
    /// Multiplet dimension.
    pub q_used: usize,
    /// Energy gap above the occupied set.
    pub gap: f64,
}

/// `σ_xy` in `e²/h` from spectral data.
pub fn kubo_sigma_xy(spec: &SpectralData, vx: &CMat, vy: &CMat, occupation: Occupation, area: f64, omega_c: f64) -> Result<f64> {
    Ok(SpectralResponse::new(spec, vx, vy, occupation, area, omega_c)?.sigma_xy())
}

/// `γ_sy` in `e²/h` per unit time from spectral data.
pub fn kubo_gamma(
    spec: &SpectralData,
    vx: &CMat,
    vy: &CMat,
    occupation: Occupation,
    area: f64,
    omega_c: f64,
    s: Direction,
) -> Result<f64> {
    Ok(SpectralResponse::new(spec, vx, vy, occupation, area, omega_c)?.gamma(s))
}

/// `δσ_sy` in `e²/h` from spectral data.
#[allow(clippy::too_many_arguments)]
pub fn delta_sigma(
    spec: &SpectralData,
    vx: &CMat,
    vy: &CMat,
    occupation: Occupation,
    area: f64,
    omega_c: f64,
    s: Direction,
    protocol: &SwitchingProtocol,
) -> Result<f64> {
    SpectralResponse::new(spec, vx, vy, occupation, area, omega_c)?.delta_sigma(s, protocol)
}

/// Upper bound `ν[(1 + ω_cT)e^{−ηT} + (2 + η/ω_c)(η/ω_c)]` on `|δσ_sy|` in `e²/h`.
pub fn delta_sigma_bound(nu: f64, omega_c: f64, eta: f64, big_t: f64) -> f64 {
    let r = eta / omega_c;
    nu * ((1.0 + omega_c * big_t) * (-eta * big_t).exp() + (2.0 + r) * r)
}

/// Hall conductance from the projector form `−(i/LxLy) Tr P[∂xP, ∂yP]` in
/// `e²/h`, where `P` is the spectral projection onto the `k` lowest states
/// and `∂_s P = (1/2πi)∮ R(z) v_s R(z) dz` on a circle around them. Uses
/// resolvents only, no eigenvectors.
pub fn projector_sigma_xy(h: &CMat, vx: &CMat, vy: &CMat, lower: f64, upper: f64, area: f64, nodes: usize) -> Result<f64> {
    let center = 0.5 * (lower + upper);
    let radius = 0.5 * (upper - lower);
    let dim = h.nrows();
    let mut p = CMat::zeros(dim, dim);
    let mut px = CMat::zeros(dim, dim);
    let mut py = CMat::zeros(dim, dim);
    let id = CMat::identity(dim, dim);
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / nodes as f64;
        let e = Complex64::from_polar(1.0, theta);
        let z = center + radius * e;
        // dz/(2πi) = r e^{iθ} dθ/(2π).
        let w = radius * e / nodes as f64;
        let r = (&id * z - h)
            .try_inverse()
            .ok_or_else(|| HallError::Config("contour passes through the spectrum".into()))?;
        p += &r * w;
        px += &r * vx * &r * w;
        py += &r * vy * &r * w;
    }
    let tr = (&p * (&px * &py - &py * &px)).trace();
    Ok(PLANCK * (-I * tr / area).re)
}

/// Dense spectral data of a Hermitian matrix with multiplet statistics.
pub fn spectral_from_dense(phi: GaugePoint, h: &CMat, q: usize) -> SpectralData {
    let (eigenvalues, eigenvectors) = hermitian_eigen(h);
    let spread = eigenvalues[q - 1] - eigenvalues[0];
    let gap = eigenvalues[q] - eigenvalues[q - 1];
    SpectralData {
        phi,
        eigenvalues,
        eigenvectors,
        q,
        spread,
        gap,
        degeneracy_warning: gap <= crate::operators::DEFAULT_KAPPA * spread,
    }
}

/// `σ_xy`, `γ_xy`, `γ_yy` (in `e²/h`, `e²/h` per unit time) for a sparse
/// many-body problem without a full diagonalization: the sums over excited
/// states become conjugate-gradient solves of `(H − E₀μ)x = Q v|0μ⟩` on the
/// complement `Q` of the multiplet.
pub fn kubo_iterative(
    h: &SparseMatrix,
    gm: &GroundMultiplet,
    vx: &SparseMatrix,
    vy: &SparseMatrix,
    n_particles: usize,
    area: f64,
) -> Result<(f64, f64, f64)> {
    let q = gm.energies.len();
    let mut sigma = Complex64::new(0.0, 0.0);
    let mut gxy = 0.0;
    let mut gyy = 0.0;
    let ground: Vec<Vec<Complex64>> = (0..q).map(|mu| gm.vectors.column(mu).iter().copied().collect()).collect();
    let project = |v: &mut Vec<Complex64>| {
        for g in &ground {
            let c: Complex64 = g.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(g) {
                *x -= c * y;
            }
        }
    };
    for mu in 0..q {
        let e0 = gm.energies[mu];
        let mut bx = vx.apply(&ground[mu]);
        let mut by = vy.apply(&ground[mu]);
        project(&mut bx);
        project(&mut by);
        let op = |v: &[Complex64]| {
            let mut w = h.apply(v);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= e0 * vi;
            }
            project(&mut w);
            w
        };
        let rx = conjugate_gradient(&op, &bx, 1e-13, 10 * h.dim + 100)?;
        let ry = conjugate_gradient(&op, &by, 1e-13, 10 * h.dim + 100)?;
        // Σ ⟨0|vx|n⟩⟨n|vy|0⟩/(E0−En)² = ⟨R Q vx 0 | R Q vy 0⟩.
        let x: Complex64 = rx.iter().zip(&ry).map(|(a, b)| a.conj() * b).sum();
        sigma += x - x.conj();
        // Σ ⟨0|vs|n⟩⟨n|vy|0⟩/(E0−En) = −⟨Q vs 0|(H−E0)^{-1}|Q vy 0⟩.
        let gx: Complex64 = bx.iter().zip(&ry).map(|(a, b)| a.conj() * b).sum();
        let gy: Complex64 = by.iter().zip(&ry).map(|(a, b)| a.conj() * b).sum();
        gxy += -2.0 * gx.re;
        gyy += -2.0 * gy.re;
    }
    let w = 1.0 / q as f64;
    let sigma = PLANCK * (-I * sigma * w / area).re;
    let gxy = PLANCK * gxy * w / area;
    let gyy = PLANCK * (n_particles as f64 + gyy * w) / area;
    Ok((sigma, gxy, gyy))
}

/// Conjugate gradients for a Hermitian positive operator on its range.
pub fn conjugate_gradient(
    op: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    let dot = |a: &[Complex64], c: &[Complex64]| -> Complex64 { a.iter().zip(c).map(|(x, y)| x.conj() * y).sum() };
    let bnorm = dot(b, b).re.sqrt();
    let mut x = vec![Complex64::new(0.0, 0.0); b.len()];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for _ in 0..max_iter {
        let ap = op(&p);
        let alpha = rr / dot(&p, &ap).re;
        for k in 0..x.len() {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r).re;
        if rr_new.sqrt() < tol * bnorm {
            return Ok(x);
        }
        let beta = rr_new / rr;
        for k in 0..p.len() {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
    }
    Err(HallError::Config("conjugate gradient did not converge".into()))
}

/// Time series of the induced current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvolutionTrace {
    /// Protocol.
    pub protocol: SwitchingProtocol,
    /// Sample times.
    pub times: Vec<f64>,
    /// Induced current density along x.
    pub jx: Vec<f64>,
    /// Induced current density along y.
    pub jy: Vec<f64>,
    /// Integrator step.
    pub step_size: f64,
    /// Persistent current `(j₀x, j₀y)`.
    pub persistent: (f64, f64),
    /// Largest deviation of any evolved column norm from one.
    pub norm_drift: f64,
}

/// Integration controls for [`evolve_driven`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvolutionSettings {
    /// Step size.
    pub dt: f64,
    /// End of the observation window.
    pub t_end: f64,
    /// Record every `stride` steps while `t < 0`.
    pub stride_before: usize,
    /// Record every `stride` steps while `t ≥ 0`.
    pub stride_after: usize,
}

/// Integrate `i∂Ψ/∂t = [H₀ + α(t) v_y]Ψ` from `t = −T` starting from the
/// occupied eigenvectors and record the induced current
/// `j_ind = −(1/LxLy)⟨v_tot(t)⟩ − j₀`, where `v_tot,y(t) = v_y + Nα(t)`.
///
/// The propagator is second-order Strang splitting between `H₀` (diagonal in
/// its eigenbasis) and `α v_y` (diagonal in a fixed eigenbasis of `v_y`). The
/// c-number `Nα²/2` only contributes a global phase and is dropped. Both
/// factors are exactly unitary, so the norm is conserved to roundoff.
pub fn evolve_driven(
    spec: &SpectralData,
    vx: &CMat,
    vy: &CMat,
    occupation: Occupation,
    area: f64,
    protocol: &SwitchingProtocol,
    settings: &EvolutionSettings,
) -> Result<EvolutionTrace> {
    let u = &spec.eigenvectors;
    let dim = u.nrows();
    let k = occupation.occupied();
    let weight = occupation.weight();
    let n_particles = occupation.particles() as f64;
    let ex = u.adjoint() * vx * u;
    let ey = u.adjoint() * vy * u;
    let (lam, w) = hermitian_eigen(&ey);
    let wa = w.adjoint();
    let dt = settings.dt;
    let half: Vec<Complex64> = spec.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -0.5 * e * dt)).collect();
    // Columns of the state in the H₀ eigenbasis.
    let mut psi = CMat::zeros(dim, k);
    for c in 0..k {
        psi[(c, c)] = Complex64::new(1.0, 0.0);
    }
    let current = |psi: &CMat, alpha: f64| -> (f64, f64) {
        let mut sx = 0.0;
        let mut sy = 0.0;
        for c in 0..k {
            let col = psi.column(c);
            sx += col.dotc(&(&ex * col)).re;
            sy += col.dotc(&(&ey * col)).re;
        }
        (-(weight * sx) / area, -(weight * sy + n_particles * alpha) / area)
    };
    let j0 = current(&psi, 0.0);
    let steps = ((protocol.big_t + settings.t_end) / dt).round() as usize;
    let mut times = Vec::new();
    let mut jx = Vec::new();
    let mut jy = Vec::new();
    let mut record = |t: f64, psi: &CMat| {
        let (x, y) = current(psi, protocol.alpha(t));
        times.push(t);
        jx.push(x - j0.0);
        jy.push(y - j0.1);
    };
    let t0 = -protocol.big_t;
    record(t0, &psi);
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        let alpha = protocol.alpha(t + 0.5 * dt);
        apply_diag(&mut psi, &half);
        if alpha != 0.0 {
            let mut rot = &wa * &psi;
            let kick: Vec<Complex64> = lam.iter().map(|&l| Complex64::from_polar(1.0, -alpha * l * dt)).collect();
            apply_diag(&mut rot, &kick);
            psi = &w * rot;
        }
        apply_diag(&mut psi, &half);
        let t_next = t0 + (step + 1) as f64 * dt;
        let stride = if t_next < -1e-12 { settings.stride_before } else { settings.stride_after };
        if (step + 1) % stride.max(1) == 0 || step + 1 == steps {
            record(t_next, &psi);
        }
    }
    let norm_drift = (0..k).map(|c| (psi.column(c).norm() - 1.0).abs()).fold(0.0, f64::max);
    if norm_drift > 1e-6 {
        return Err(HallError::NormDrift(norm_drift));
    }
    Ok(EvolutionTrace { protocol: *protocol, times, jx, jy, step_size: dt, persistent: j0, norm_drift })
}

fn apply_diag(m: &mut CMat, d: &[Complex64]) {
    for c in 0..m.ncols() {
        for (r, f) in d.iter().enumerate() {
            m[(r, c)] *= f;
        }
    }
}

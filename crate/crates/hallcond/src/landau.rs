//! Magnetic-translation periodic Landau orbitals on the torus.
//!
//! With `A₀ = (−By, 0)` the orbitals are
//!
//! ```text
//! φ_{n,k}(x, y; φ) = Lx^{-1/2} Σ_ℓ e^{i(k+ℓK)x} e^{−iφy(y−ℓLy)} v_n(y − y(k,φx) − ℓLy)
//! ```
//!
//! with `k = 2πm/Lx`, `K = Ly/ℓ_B²` and `y(k, φx) = (k + φx)/B`. They are
//! eigenfunctions of `[(p_x − By + φx)² + (p_y + φy)²]/2` with energy
//! `(n + 1/2)ω_c`. The gauge parameters live inside the orbitals; the twisted
//! boundary picture only appears through [`WrapMap`].
//!
//! Matrix elements are computed in closed form. The image sum over `ℓ` is
//! unfolded into an integral over the real line, so the analytic elements carry
//! no image truncation; `ell_trunc` only affects pointwise evaluation.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint, TorusGeometry};
use crate::special::{displacement_element, landau_mode};

/// Default image cutoff for pointwise orbital evaluation.
pub const DEFAULT_ELL_TRUNC: usize = 3;

/// One Landau orbital label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbital {
    /// Landau level.
    pub n: usize,
    /// Momentum label in `{−M/2+1, …, M/2}`.
    pub m: i64,
    /// Wavenumber `2πm/Lx`.
    pub k: f64,
}

/// Truncated orbital basis ordered by `(n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    /// Torus.
    pub geometry: TorusGeometry,
    /// Number of Landau levels retained.
    pub n_max: usize,
    /// Image cutoff for pointwise evaluation.
    pub ell_trunc: usize,
}

impl BasisSet {
    /// Basis with `n_max` levels and the default image cutoff.
    pub fn new(geometry: TorusGeometry, n_max: usize) -> Result<Self> {
        Self::with_ell_trunc(geometry, n_max, DEFAULT_ELL_TRUNC)
    }

    /// Basis with an explicit image cutoff.
    pub fn with_ell_trunc(geometry: TorusGeometry, n_max: usize, ell_trunc: usize) -> Result<Self> {
        if geometry.is_zero_field() {
            return Err(HallError::Config("Landau basis requires B > 0".into()));
        }
        if n_max < 1 {
            return Err(HallError::Config("nMax must be at least 1".into()));
        }
        if ell_trunc < 1 {
            return Err(HallError::Config("ellTrunc must be at least 1".into()));
        }
        Ok(Self { geometry, n_max, ell_trunc })
    }

    /// Same torus with a different number of levels.
    pub fn with_levels(&self, n_max: usize) -> Self {
        Self { n_max, ..self.clone() }
    }

    /// Flux quanta `M`.
    pub fn m(&self) -> usize {
        self.geometry.m
    }

    /// Smallest momentum label `−M/2 + 1`.
    pub fn m_min(&self) -> i64 {
        1 - (self.geometry.m as i64) / 2
    }

    /// Largest momentum label `M/2`.
    pub fn m_max(&self) -> i64 {
        (self.geometry.m as i64) / 2
    }

    /// Number of orbitals `nMax·M`.
    pub fn dim(&self) -> usize {
        self.n_max * self.geometry.m
    }

    /// Flat index of `(n, m)`.
    pub fn index(&self, n: usize, m: i64) -> usize {
        n * self.geometry.m + (m - self.m_min()) as usize
    }

    /// Orbital at flat index `i`.
    pub fn orbital(&self, i: usize) -> Orbital {
        let mm = self.geometry.m;
        let n = i / mm;
        let m = (i % mm) as i64 + self.m_min();
        Orbital { n, m, k: 2.0 * PI * m as f64 / self.geometry.lx }
    }

    /// All orbitals in order.
    pub fn orbitals(&self) -> Vec<Orbital> {
        (0..self.dim()).map(|i| self.orbital(i)).collect()
    }

    /// Wrap a momentum label into the fundamental range, returning the
    /// reduced label and the number of periods `s` removed (`m = m_red + sM`).
    pub fn reduce_label(&self, m: i64) -> (i64, i64) {
        let mm = self.geometry.m as i64;
        let shifted = m - self.m_min();
        let s = shifted.div_euclid(mm);
        (shifted.rem_euclid(mm) + self.m_min(), s)
    }

    /// Guiding centre `y(k, φx) = (k + φx)/B`.
    pub fn center(&self, m: i64, phi_x: f64) -> f64 {
        (2.0 * PI * m as f64 / self.geometry.lx + phi_x) / self.geometry.b
    }

    /// Landau energy `(n + 1/2)ω_c`.
    pub fn level_energy(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.geometry.omega_c
    }
}

/// `v_n(y − center)` with the magnetic length of the torus.
pub fn hermite_mode(n: usize, y: f64, center: f64, ell_b: f64) -> f64 {
    landau_mode(n, y - center, ell_b)
}

/// Pointwise value of `φ_{n,k}(x, y; φ)` with the image sum cut at `|ℓ| ≤ ellTrunc`.
pub fn eval_orbital(b: &BasisSet, o: &Orbital, phi: GaugePoint, x: f64, y: f64) -> Complex64 {
    let g = &b.geometry;
    let big_k = g.ly / (g.ell_b * g.ell_b);
    let yk = b.center(o.m, phi.phi_x);
    let t = b.ell_trunc as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in -t..=t {
        let lf = l as f64;
        let amp = hermite_mode(o.n, y, yk + lf * g.ly, g.ell_b);
        if amp == 0.0 {
            continue;
        }
        let phase = (o.k + lf * big_k) * x - phi.phi_y * (y - lf * g.ly);
        acc += Complex64::from_polar(amp, phase);
    }
    acc / g.lx.sqrt()
}

/// Matrix element of `exp(i(2πa x/Lx + 2πb y/Ly))` between orbitals `i` and `j`
/// of the basis at the same gauge point.
///
/// Nonzero only when `m_i ≡ m_j + a (mod M)`. Writing `m_j + a = m_i + sM`, the
/// value is `e^{−iφy Ly s} e^{iq_y(y_j + q_x ℓ²/2)} ⟨n_i|D(z)|n_j⟩` with
/// `z = ℓ(−q_x + i q_y)/√2`.
pub fn plane_wave_element(b: &BasisSet, phi: GaugePoint, i: usize, j: usize, a: i64, bq: i64) -> Complex64 {
    let oi = b.orbital(i);
    let oj = b.orbital(j);
    let (target, s) = b.reduce_label(oj.m + a);
    if target != oi.m {
        return Complex64::new(0.0, 0.0);
    }
    plane_wave_value(b, phi, oi.n, oj.n, oj.m, s, a, bq)
}

/// Closed form used by [`plane_wave_element`] once the selection rule holds.
#[allow(clippy::too_many_arguments)]
pub(crate) fn plane_wave_value(
    b: &BasisSet,
    phi: GaugePoint,
    n: usize,
    np: usize,
    mp: i64,
    s: i64,
    a: i64,
    bq: i64,
) -> Complex64 {
    let g = &b.geometry;
    let ell = g.ell_b;
    let qx = 2.0 * PI * a as f64 / g.lx;
    let qy = 2.0 * PI * bq as f64 / g.ly;
    let yj = b.center(mp, phi.phi_x);
    let phase = -phi.phi_y * g.ly * s as f64 + qy * (yj + 0.5 * qx * ell * ell);
    let z = Complex64::new(-qx * ell, qy * ell) / SQRT_2;
    Complex64::from_polar(1.0, phase) * displacement_element(n, np, z)
}

/// Overlap `⟨φ_{n,m}(φ) | φ_{n',m}(φ')⟩` of orbitals with the same momentum
/// label at two gauge points (orbitals with different labels are orthogonal).
pub fn orbital_overlap(b: &BasisSet, phi: GaugePoint, phi2: GaugePoint, n: usize, np: usize, m: i64) -> Complex64 {
    let g = &b.geometry;
    let ell = g.ell_b;
    let dx = phi2.phi_x - phi.phi_x;
    let dy = phi2.phi_y - phi.phi_y;
    let mid = 0.5 * (b.center(m, phi.phi_x) + b.center(m, phi2.phi_x));
    let z = Complex64::new(dx * ell, -dy * ell) / SQRT_2;
    Complex64::from_polar(1.0, -dy * mid) * displacement_element(n, np, z)
}

/// Connection `Γ_s[i][j] = ⟨φ_i | ∂_{φ_s} φ_j⟩` of the moving basis.
///
/// Because `∂_{φ_s} φ_j` only involves levels `n_j`, `n_j ± 1`, evaluating this on a
/// basis with one extra level makes products such as `H Γ` exact.
pub fn connection_element(b: &BasisSet, phi: GaugePoint, i: usize, j: usize, s: Direction) -> Complex64 {
    let oi = b.orbital(i);
    let oj = b.orbital(j);
    if oi.m != oj.m {
        return Complex64::new(0.0, 0.0);
    }
    let g = &b.geometry;
    let ell = g.ell_b;
    let (n, np) = (oi.n, oj.n);
    let up = if n == np + 1 { ((np + 1) as f64).sqrt() / SQRT_2 } else { 0.0 };
    let down = if n + 1 == np { (np as f64).sqrt() / SQRT_2 } else { 0.0 };
    match s {
        Direction::X => Complex64::new(-(down - up) / (g.b * ell), 0.0),
        Direction::Y => {
            let diag = if n == np { b.center(oj.m, phi.phi_x) } else { 0.0 };
            Complex64::new(0.0, -(ell * (down + up) + diag))
        }
    }
}

/// Matrix element of the kinetic momentum `Π_s = p_s + A₀,s + φ_s` between
/// orbitals at the same gauge point (independent of `φ`).
pub fn kinetic_element(b: &BasisSet, i: usize, j: usize, s: Direction) -> Complex64 {
    let oi = b.orbital(i);
    let oj = b.orbital(j);
    if oi.m != oj.m {
        return Complex64::new(0.0, 0.0);
    }
    let g = &b.geometry;
    let ell = g.ell_b;
    let (n, np) = (oi.n, oj.n);
    let up = if n == np + 1 { ((np + 1) as f64).sqrt() / SQRT_2 } else { 0.0 };
    let down = if n + 1 == np { (np as f64).sqrt() / SQRT_2 } else { 0.0 };
    match s {
        // Π_x = −B u with u = ℓ(a + a†)/√2.
        Direction::X => Complex64::new(-g.b * ell * (down + up), 0.0),
        // Π_y = −i d/du with d/du = (a − a†)/(√2 ℓ).
        Direction::Y => Complex64::new(0.0, -(down - up) / ell),
    }
}

/// Large-gauge identification of orbitals across one period of the gauge torus.
///
/// For direction x: `φ̃_i(φx + ΔφX, φy) = phase_i(φy) · φ̃_{perm(i)}(φx, φy)` in the
/// Kunz-gauge picture, with `perm(n, m) = (n, m + 1)` and `perm(n, M/2) = (n, −M/2+1)`
/// carrying phase `exp(−i Ly φy)`. Direction y is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrapMap {
    /// Wrap direction.
    pub direction: Direction,
    /// Orbital permutation by flat index.
    pub permutation: Vec<usize>,
    /// Phase slope per orbital: `phase_i = exp(i · slope_i · φy)`.
    pub phase_slope: Vec<f64>,
}

impl WrapMap {
    /// Phase attached to orbital `i` at gauge parameter `phi_y`.
    pub fn phase(&self, i: usize, phi_y: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.phase_slope[i] * phi_y)
    }

    /// Coefficients of the same state written in the basis at the wrapped point.
    ///
    /// A state `Σ_j c_j φ̃_j(φ)` equals `Σ_i c'_i φ̃_i(φ + Δφ)` with
    /// `c'_i = conj(phase_i) c_{perm(i)}`.
    pub fn transport(&self, coeffs: &[Complex64], phi_y: f64) -> Vec<Complex64> {
        (0..coeffs.len())
            .map(|i| self.phase(i, phi_y).conj() * coeffs[self.permutation[i]])
            .collect()
    }

    /// Inverse permutation.
    pub fn inverse_permutation(&self) -> Vec<usize> {
        let mut inv = vec![0; self.permutation.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }
}

/// Build the wrap map of the basis in direction `direction`.
pub fn wrap_map(b: &BasisSet, direction: Direction) -> WrapMap {
    let dim = b.dim();
    match direction {
        Direction::Y => WrapMap {
            direction,
            permutation: (0..dim).collect(),
            phase_slope: vec![0.0; dim],
        },
        Direction::X => {
            let mut permutation = Vec::with_capacity(dim);
            let mut phase_slope = Vec::with_capacity(dim);
            for i in 0..dim {
                let o = b.orbital(i);
                if o.m == b.m_max() {
                    permutation.push(b.index(o.n, b.m_min()));
                    phase_slope.push(-b.geometry.ly);
                } else {
                    permutation.push(b.index(o.n, o.m + 1));
                    phase_slope.push(0.0);
                }
            }
            WrapMap { direction, permutation, phase_slope }
        }
    }
}

/// Complex samples of a field on a uniform rectangular window.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    /// x coordinate of the first sample.
    pub x0: f64,
    /// y coordinate of the first sample.
    pub y0: f64,
    /// Sample spacing in x.
    pub hx: f64,
    /// Sample spacing in y.
    pub hy: f64,
    /// Samples in x.
    pub nx: usize,
    /// Samples in y.
    pub ny: usize,
    /// Values, x fastest.
    pub values: Vec<Complex64>,
}

impl SampledField {
    /// Sample `f` on the window.
    #[allow(clippy::too_many_arguments)]
    pub fn sample(x0: f64, y0: f64, hx: f64, hy: f64, nx: usize, ny: usize, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(x0 + i as f64 * hx, y0 + j as f64 * hy));
            }
        }
        Self { x0, y0, hx, hy, nx, ny, values }
    }

    /// Periodic sampling of the fundamental domain `[−Lx/2, Lx/2) × [−Ly/2, Ly/2)`.
    pub fn torus(g: &TorusGeometry, nx: usize, ny: usize, f: impl Fn(f64, f64) -> Complex64) -> Self {
        Self::sample(-0.5 * g.lx, -0.5 * g.ly, g.lx / nx as f64, g.ly / ny as f64, nx, ny, f)
    }

    /// Coordinates of sample `(i, j)`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    /// Largest pointwise difference to another field on the same point set.
    pub fn max_difference(&self, other: &SampledField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Apply a magnetic translation to a sampled field.
///
/// `t^(x)(x′) f(x, y) = f(x − x′, y)` and `t^(y)(y′) f = exp(i y′ x/ℓ_B²) f(x, y − y′)`.
/// The result lives on the window shifted by the translation, so no samples
/// outside the original window are needed. Shifts that are not an integer
/// number of sample spacings are rejected.
pub fn magnetic_translate(g: &TorusGeometry, direction: Direction, shift: f64, f: &SampledField) -> Result<SampledField> {
    let h = match direction {
        Direction::X => f.hx,
        Direction::Y => f.hy,
    };
    let steps = shift / h;
    if (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0) {
        return Err(HallError::Config(format!(
            "shift {shift} is not commensurate with sample spacing {h}"
        )));
    }
    let mut out = f.clone();
    match direction {
        Direction::X => out.x0 += shift,
        Direction::Y => {
            out.y0 += shift;
            let inv_l2 = 1.0 / (g.ell_b * g.ell_b);
            for j in 0..out.ny {
                for i in 0..out.nx {
                    let (x, _) = out.coords(i, j);
                    out.values[j * out.nx + i] *= Complex64::from_polar(1.0, shift * x * inv_l2);
                }
            }
        }
    }
    Ok(out)
}

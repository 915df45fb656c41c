//! Finite Fourier representations of the single-body potential `W`, the
//! periodic magnetic field `B_P,z` (from which `A_P` is reconstructed) and the
//! two-body interaction `W⁽²⁾`, together with the sup-norm bounds used by the
//! gap condition and the fraction bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::TorusGeometry;

/// Samples per direction for sup-norm evaluation.
pub const NORM_GRID: usize = 512;
/// Multiplicative safety factor applied to sampled sup norms.
pub const NORM_SAFETY: f64 = 1.01;

/// Tolerance for the reality and inversion checks on coefficients.
const SYMMETRY_TOL: f64 = 1e-12;

/// Coefficient of `exp(i(2πa x/Lx + 2πb y/Ly))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    /// Reciprocal index along x.
    pub a: i64,
    /// Reciprocal index along y.
    pub b: i64,
    /// Coefficient.
    pub c: Complex64,
}

/// Cached sup-norm bounds (sampled on a 512×512 grid, times 1.01).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Norms {
    /// `‖W⁺‖∞` with `W⁺ = max(W, 0)`.
    pub w_plus: f64,
    /// `‖W⁻‖∞` with `W⁻ = max(−W, 0)`.
    pub w_minus: f64,
    /// `‖|A_P|‖∞`.
    pub a_p: f64,
    /// `max_{m+n=2} ‖∂_x^m ∂_y^n W‖∞`.
    pub d2_w: f64,
}

/// Potentials of a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// Fourier modes of `W`.
    pub w: Vec<FourierMode>,
    /// Fourier modes of `B_P,z` (no `(0,0)` mode).
    pub b_pz: Vec<FourierMode>,
    /// Fourier modes of `W⁽²⁾(r₁ − r₂)`.
    pub w2: Vec<FourierMode>,
    /// Seed used for any randomized coefficients.
    pub seed: u64,
    /// Sup-norm bounds, filled by [`PotentialSpec::compute_norms`].
    pub norms: Norms,
}

impl PotentialSpec {
    /// The zero potential.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Check the reality, inversion and zero-flux constraints.
    pub fn validate(&self) -> Result<()> {
        check_real(&self.w, "W")?;
        check_real(&self.b_pz, "B_P,z")?;
        check_real(&self.w2, "W2")?;
        if self.b_pz.iter().any(|m| m.a == 0 && m.b == 0 && m.c.norm() > 0.0) {
            return Err(HallError::Config(
                "B_P,z (0,0) mode is forbidden: total flux must stay 2πM".into(),
            ));
        }
        for m in &self.w2 {
            let partner = coefficient(&self.w2, -m.a, -m.b);
            if (partner - m.c).norm() > SYMMETRY_TOL * m.c.norm().max(1.0) {
                return Err(HallError::Config(format!(
                    "W2 must be inversion symmetric; mode ({}, {}) violates it",
                    m.a, m.b
                )));
            }
        }
        Ok(())
    }

    /// True when there is no periodic vector potential.
    pub fn has_vector_potential(&self) -> bool {
        self.b_pz.iter().any(|m| m.c.norm() > 0.0)
    }

    /// Fourier modes of `A_P = (A_x, A_y)` in the divergence-free gauge:
    /// `A_x(q) = i q_y B(q)/|q|²`, `A_y(q) = −i q_x B(q)/|q|²`.
    pub fn a_p_modes(&self, g: &TorusGeometry) -> (Vec<FourierMode>, Vec<FourierMode>) {
        let mut ax = Vec::new();
        let mut ay = Vec::new();
        for m in &self.b_pz {
            let (qx, qy) = wavevector(g, m.a, m.b);
            let q2 = qx * qx + qy * qy;
            if q2 == 0.0 {
                continue;
            }
            ax.push(FourierMode { a: m.a, b: m.b, c: Complex64::new(0.0, qy / q2) * m.c });
            ay.push(FourierMode { a: m.a, b: m.b, c: Complex64::new(0.0, -qx / q2) * m.c });
        }
        (ax, ay)
    }

    /// Fourier modes of `|A_P|²/2`, obtained by convolving the component series.
    pub fn a_p_square_half(&self, g: &TorusGeometry) -> Vec<FourierMode> {
        let (ax, ay) = self.a_p_modes(g);
        let mut out: Vec<FourierMode> = Vec::new();
        for comp in [&ax, &ay] {
            for m1 in comp.iter() {
                for m2 in comp.iter() {
                    add_mode(&mut out, m1.a + m2.a, m1.b + m2.b, 0.5 * m1.c * m2.c);
                }
            }
        }
        out.retain(|m| m.c.norm() > 0.0);
        out
    }

    /// Evaluate `W(x, y)`.
    pub fn w_at(&self, g: &TorusGeometry, x: f64, y: f64) -> f64 {
        evaluate(&self.w, g, x, y).re
    }

    /// Evaluate `W⁽²⁾(x, y)`.
    pub fn w2_at(&self, g: &TorusGeometry, x: f64, y: f64) -> f64 {
        evaluate(&self.w2, g, x, y).re
    }

    /// Evaluate `A_P(x, y)`.
    pub fn a_p_at(&self, g: &TorusGeometry, x: f64, y: f64) -> (f64, f64) {
        let (ax, ay) = self.a_p_modes(g);
        (evaluate(&ax, g, x, y).re, evaluate(&ay, g, x, y).re)
    }

    /// Sample the sup norms on the 512×512 grid and store them (times 1.01).
    pub fn compute_norms(&mut self, g: &TorusGeometry) {
        self.norms = self.sampled_norms(g, NORM_GRID);
    }

    /// Sup norms sampled on an `n × n` grid, including the safety factor.
    pub fn sampled_norms(&self, g: &TorusGeometry, n: usize) -> Norms {
        let (ax, ay) = self.a_p_modes(g);
        let derivs: Vec<Vec<FourierMode>> = [(2, 0), (1, 1), (0, 2)]
            .iter()
            .map(|&(px, py)| {
                self.w
                    .iter()
                    .map(|m| {
                        let (qx, qy) = wavevector(g, m.a, m.b);
                        let factor = Complex64::new(0.0, qx).powu(px) * Complex64::new(0.0, qy).powu(py);
                        FourierMode { a: m.a, b: m.b, c: m.c * factor }
                    })
                    .collect()
            })
            .collect();
        let mut norms = Norms::default();
        let has_a = !ax.is_empty();
        for j in 0..n {
            let y = -0.5 * g.ly + g.ly * j as f64 / n as f64;
            for i in 0..n {
                let x = -0.5 * g.lx + g.lx * i as f64 / n as f64;
                if !self.w.is_empty() {
                    let w = evaluate(&self.w, g, x, y).re;
                    norms.w_plus = norms.w_plus.max(w);
                    norms.w_minus = norms.w_minus.max(-w);
                    for d in &derivs {
                        norms.d2_w = norms.d2_w.max(evaluate(d, g, x, y).re.abs());
                    }
                }
                if has_a {
                    let a1 = evaluate(&ax, g, x, y).re;
                    let a2 = evaluate(&ay, g, x, y).re;
                    norms.a_p = norms.a_p.max((a1 * a1 + a2 * a2).sqrt());
                }
            }
        }
        norms.w_plus *= NORM_SAFETY;
        norms.w_minus *= NORM_SAFETY;
        norms.a_p *= NORM_SAFETY;
        norms.d2_w *= NORM_SAFETY;
        norms
    }
}

/// Wavevector `(2πa/Lx, 2πb/Ly)`.
pub fn wavevector(g: &TorusGeometry, a: i64, b: i64) -> (f64, f64) {
    (2.0 * PI * a as f64 / g.lx, 2.0 * PI * b as f64 / g.ly)
}

/// Evaluate a Fourier series at a point.
pub fn evaluate(modes: &[FourierMode], g: &TorusGeometry, x: f64, y: f64) -> Complex64 {
    modes
        .iter()
        .map(|m| {
            let (qx, qy) = wavevector(g, m.a, m.b);
            m.c * Complex64::from_polar(1.0, qx * x + qy * y)
        })
        .sum()
}

/// Coefficient of mode `(a, b)` (zero when absent).
pub fn coefficient(modes: &[FourierMode], a: i64, b: i64) -> Complex64 {
    modes
        .iter()
        .filter(|m| m.a == a && m.b == b)
        .map(|m| m.c)
        .sum()
}

fn add_mode(out: &mut Vec<FourierMode>, a: i64, b: i64, c: Complex64) {
    if let Some(m) = out.iter_mut().find(|m| m.a == a && m.b == b) {
        m.c += c;
    } else {
        out.push(FourierMode { a, b, c });
    }
}

fn check_real(modes: &[FourierMode], name: &str) -> Result<()> {
    for m in modes {
        let partner = coefficient(modes, -m.a, -m.b);
        if (partner - m.c.conj()).norm() > SYMMETRY_TOL * m.c.norm().max(1.0) {
            return Err(HallError::Config(format!(
                "{name} must be real: coefficient(-a,-b) must equal conj(coefficient(a,b)) for mode ({}, {})",
                m.a, m.b
            )));
        }
    }
    Ok(())
}

/// Modes `(a, b)` with `|a|, |b| ≤ cutoff` in the upper half plane
/// (`b > 0`, or `b = 0` and `a > 0`), in lexicographic `(b, a)` order.
/// This fixes the order in which random draws are consumed.
pub fn half_plane_modes(cutoff: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for b in 0..=cutoff {
        for a in -cutoff..=cutoff {
            if b > 0 || a > 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Random real potential with modes `|a|, |b| ≤ cutoff` (excluding the mean),
/// rescaled so that its sampled sup norm equals `amplitude`.
///
/// Draw order: for each mode of [`half_plane_modes`], two uniform numbers in
/// `[−1, 1)` (real part then imaginary part) from ChaCha20 seeded with `seed`.
pub fn random_modes(g: &TorusGeometry, cutoff: i64, amplitude: f64, seed: u64) -> Vec<FourierMode> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for (a, b) in half_plane_modes(cutoff) {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        let c = Complex64::new(re, im);
        modes.push(FourierMode { a, b, c });
        modes.push(FourierMode { a: -a, b: -b, c: c.conj() });
    }
    let mut sup: f64 = 0.0;
    let n = 128;
    for j in 0..n {
        for i in 0..n {
            let x = -0.5 * g.lx + g.lx * i as f64 / n as f64;
            let y = -0.5 * g.ly + g.ly * j as f64 / n as f64;
            sup = sup.max(evaluate(&modes, g, x, y).re.abs());
        }
    }
    if sup > 0.0 {
        for m in &mut modes {
            m.c *= amplitude / sup;
        }
    }
    modes
}

/// `W = 2c·cos(2π a x/Lx + 2π b y/Ly)`.
pub fn cosine(a: i64, b: i64, c: f64) -> Vec<FourierMode> {
    vec![
        FourierMode { a, b, c: Complex64::new(c, 0.0) },
        FourierMode { a: -a, b: -b, c: Complex64::new(c, 0.0) },
    ]
}

/// Gaussian short-range repulsion `c_q = strength·exp(−|q|² range²/2)` on
/// modes `|a|, |b| ≤ cutoff`. Real and inversion symmetric by construction.
pub fn gaussian_interaction(g: &TorusGeometry, strength: f64, range: f64, cutoff: i64) -> Vec<FourierMode> {
    let mut modes = Vec::new();
    for b in -cutoff..=cutoff {
        for a in -cutoff..=cutoff {
            let (qx, qy) = wavevector(g, a, b);
            let c = strength * (-(qx * qx + qy * qy) * range * range / 2.0).exp();
            modes.push(FourierMode { a, b, c: Complex64::new(c, 0.0) });
        }
    }
    modes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> TorusGeometry {
        TorusGeometry::from_flux(8, 1.0, 1.0).unwrap()
    }

    #[test]
    fn random_potential_is_real_and_normalized() {
        let g = geom();
        let w = random_modes(&g, 2, 0.3, 7);
        let spec = PotentialSpec { w: w.clone(), ..Default::default() };
        spec.validate().unwrap();
        let norms = spec.sampled_norms(&g, 128);
        assert!((norms.w_plus.max(norms.w_minus) - 0.3 * NORM_SAFETY).abs() < 1e-12);
        assert_eq!(w, random_modes(&g, 2, 0.3, 7));
    }

    #[test]
    fn zero_flux_mode_forbidden_and_reality_enforced() {
        let mut p = PotentialSpec::zero();
        p.b_pz.push(FourierMode { a: 0, b: 0, c: Complex64::new(0.1, 0.0) });
        assert!(p.validate().is_err());
        let mut p = PotentialSpec::zero();
        p.w.push(FourierMode { a: 1, b: 0, c: Complex64::new(0.1, 0.0) });
        assert!(p.validate().is_err());
    }

    #[test]
    fn vector_potential_reproduces_field_and_is_divergence_free() {
        let g = geom();
        let mut p = PotentialSpec::zero();
        p.b_pz = cosine(1, 2, 0.05);
        let (ax, ay) = p.a_p_modes(&g);
        for (mx, my) in ax.iter().zip(&ay) {
            let (qx, qy) = wavevector(&g, mx.a, mx.b);
            let curl = Complex64::new(0.0, qx) * my.c - Complex64::new(0.0, qy) * mx.c;
            let div = Complex64::new(0.0, qx) * mx.c + Complex64::new(0.0, qy) * my.c;
            assert!((curl - coefficient(&p.b_pz, mx.a, mx.b)).norm() < 1e-14);
            assert!(div.norm() < 1e-14);
        }
    }

    #[test]
    fn a_square_series_matches_pointwise() {
        let g = geom();
        let mut p = PotentialSpec::zero();
        p.b_pz = cosine(1, 0, 0.05);
        p.b_pz.extend(cosine(1, 1, 0.03));
        let sq = p.a_p_square_half(&g);
        for &(x, y) in &[(0.1, 0.2), (-1.3, 2.2), (3.0, -0.7)] {
            let (a1, a2) = p.a_p_at(&g, x, y);
            assert!((evaluate(&sq, &g, x, y).re - 0.5 * (a1 * a1 + a2 * a2)).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_interaction_is_inversion_symmetric() {
        let g = geom();
        let p = PotentialSpec { w2: gaussian_interaction(&g, 1.0, 1.0, 3), ..Default::default() };
        p.validate().unwrap();
    }
}

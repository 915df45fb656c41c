//! Zero-field electron gas on the torus in a plane-wave basis.
//!
//! Without a magnetic field and without potentials the one-body Hamiltonian
//! at gauge point `φ` is `½(p + φ)²`, diagonal in the plane waves
//! `e^{i(k_a x + k_b y)}` with `k = 2π(a/Lx, b/Ly)`. The velocity `p + φ` is
//! diagonal as well, so every interband matrix element vanishes. This is the
//! translation-invariant reference against which the response formulas are
//! checked.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint, TorusGeometry};
use crate::operators::{CMat, SpectralData};
use crate::response::{Occupation, SpectralResponse};

/// Plane waves with `|a| + |b| ≤ cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveBasis {
    /// Zero-field torus.
    pub geometry: TorusGeometry,
    /// Diamond cutoff on the integer wavevector labels.
    pub cutoff: i64,
    /// Labels `(a, b)` in basis order.
    pub labels: Vec<(i64, i64)>,
}

impl PlaneWaveBasis {
    /// Basis on a zero-field geometry.
    pub fn new(geometry: TorusGeometry, cutoff: i64) -> Result<Self> {
        if !geometry.is_zero_field() {
            return Err(HallError::Config("the plane-wave basis is only used at B = 0".into()));
        }
        if cutoff < 1 {
            return Err(HallError::Config("plane-wave cutoff must be at least 1".into()));
        }
        let mut labels = Vec::new();
        for b in -cutoff..=cutoff {
            for a in -cutoff..=cutoff {
                if a.abs() + b.abs() <= cutoff {
                    labels.push((a, b));
                }
            }
        }
        Ok(Self { geometry, cutoff, labels })
    }

    /// Number of plane waves.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Shifted momentum `k + φ` of orbital `i`.
    pub fn momentum(&self, i: usize, phi: GaugePoint) -> (f64, f64) {
        let (a, b) = self.labels[i];
        let two_pi = 2.0 * std::f64::consts::PI;
        (two_pi * a as f64 / self.geometry.lx + phi.phi_x, two_pi * b as f64 / self.geometry.ly + phi.phi_y)
    }

    /// Diagonal Hamiltonian `½|k + φ|²`.
    pub fn hamiltonian(&self, phi: GaugePoint) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| {
                let (kx, ky) = self.momentum(i, phi);
                Complex64::new(0.5 * (kx * kx + ky * ky), 0.0)
            }),
        ))
    }

    /// Diagonal velocity `k_s + φ_s`.
    pub fn velocity(&self, phi: GaugePoint, s: Direction) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| {
                let (kx, ky) = self.momentum(i, phi);
                Complex64::new(if s == Direction::X { kx } else { ky }, 0.0)
            }),
        ))
    }

    /// Eigenpairs sorted by energy; eigenvectors are unit vectors.
    pub fn spectral(&self, phi: GaugePoint, n: usize) -> SpectralData {
        let h = self.hamiltonian(phi);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| h[(i, i)].re.total_cmp(&h[(j, j)].re));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| h[(i, i)].re).collect();
        let mut eigenvectors = CMat::zeros(self.dim(), self.dim());
        for (col, &i) in order.iter().enumerate() {
            eigenvectors[(i, col)] = Complex64::new(1.0, 0.0);
        }
        let q = n.max(1);
        SpectralData {
            phi,
            spread: eigenvalues[q - 1] - eigenvalues[0],
            gap: eigenvalues[q] - eigenvalues[q - 1],
            eigenvalues,
            eigenvectors,
            q,
            degeneracy_warning: false,
        }
    }
}

/// `N` free electrons at zero field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFieldGas {
    /// Plane-wave basis.
    pub basis: PlaneWaveBasis,
    /// Electron count.
    pub n: usize,
}

impl ZeroFieldGas {
    /// Gas of `n` electrons; the basis must leave empty orbitals.
    pub fn new(basis: PlaneWaveBasis, n: usize) -> Result<Self> {
        if n == 0 || n >= basis.dim() {
            return Err(HallError::Config(format!("N = {n} must satisfy 0 < N < {}", basis.dim())));
        }
        Ok(Self { basis, n })
    }

    /// Spectral data with the velocity matrices.
    pub fn spectral(&self, phi: GaugePoint) -> (SpectralData, CMat, CMat) {
        (
            self.basis.spectral(phi, self.n),
            self.basis.velocity(phi, Direction::X),
            self.basis.velocity(phi, Direction::Y),
        )
    }

    /// Response at `phi`. Rejects open shells, where the Fermi level is
    /// degenerate.
    pub fn response(&self, phi: GaugePoint) -> Result<SpectralResponse> {
        let (spec, vx, vy) = self.spectral(phi);
        let g = &self.basis.geometry;
        SpectralResponse::new(&spec, &vx, &vy, Occupation::FermiSea(self.n), g.area(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_sizes() {
        let g = TorusGeometry::zero_field(5.0, 5.0).unwrap();
        assert_eq!(PlaneWaveBasis::new(g, 2).unwrap().dim(), 13);
        assert_eq!(PlaneWaveBasis::new(g, 3).unwrap().dim(), 25);
    }

    #[test]
    fn open_shell_is_rejected() {
        let g = TorusGeometry::zero_field(5.0, 5.0).unwrap();
        let gas = ZeroFieldGas::new(PlaneWaveBasis::new(g, 2).unwrap(), 3).unwrap();
        assert!(gas.response(GaugePoint::new(0.0, 0.0)).is_err());
    }
}

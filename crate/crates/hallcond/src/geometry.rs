//! Torus geometry, flux quantization, gauge torus and filling bookkeeping.
//!
//! Natural units `ħ = e = m_e = 1` are used everywhere, so `ℓ_B = B^{-1/2}`
//! and `ω_c = B`. Conductances are converted to `e²/h` (that is, multiplied
//! by `h = 2π`) only when reports are assembled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};

/// Planck's constant in natural units; multiplies a natural-unit conductance
/// to express it in units of `e²/h`.
pub const PLANCK: f64 = 2.0 * PI;

/// Relative tolerance for deciding that `Lx·Ly·B/2π` is an integer.
const FLUX_INTEGER_TOL: f64 = 1e-9;

/// Rectangular torus carrying `M` flux quanta of a uniform field `B`.
///
/// The zero-field flavour (`b = 0`, `m = 0`) uses a plane-wave basis and skips
/// flux quantization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    /// Extent in x.
    pub lx: f64,
    /// Extent in y.
    pub ly: f64,
    /// Uniform field strength.
    pub b: f64,
    /// Number of flux quanta (even, at least 2) or 0 in zero-field mode.
    pub m: usize,
    /// Magnetic length `B^{-1/2}` (infinite in zero-field mode).
    pub ell_b: f64,
    /// Cyclotron frequency `B`.
    pub omega_c: f64,
}

impl TorusGeometry {
    /// Solve `Lx·Ly = 2πM ℓ_B²` for the lengths given `M`, the aspect ratio
    /// `Lx/Ly` and the field.
    pub fn from_flux(m: usize, aspect: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(HallError::Config(format!(
                "field B = {b} must be positive in magnetic mode"
            )));
        }
        if !(aspect > 0.0) || !aspect.is_finite() {
            return Err(HallError::Config(format!("aspect = {aspect} must be positive")));
        }
        check_even_flux(m)?;
        let area = 2.0 * PI * m as f64 / b;
        let ly = (area / aspect).sqrt();
        let lx = aspect * ly;
        Ok(Self::assemble(lx, ly, b, m))
    }

    /// Accept `(Lx, Ly, B)` and solve for `M`, rejecting non-even or
    /// non-integral flux with the nearest valid flux numbers suggested.
    pub fn from_lengths(lx: f64, ly: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(HallError::Config(format!(
                "field B = {b} must be positive in magnetic mode"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(HallError::Config("lengths must be positive".into()));
        }
        let flux = lx * ly * b / (2.0 * PI);
        let nearest = flux.round();
        let lower = 2 * ((flux / 2.0).floor() as usize).max(1);
        let upper = lower + 2;
        let suggestions = vec![lower, upper];
        if (flux - nearest).abs() > FLUX_INTEGER_TOL * flux.max(1.0) {
            return Err(HallError::FluxQuantization {
                message: format!(
                    "Lx·Ly·B/2π = {flux:.9} is not an integer; nearest even flux numbers {lower} or {upper}"
                ),
                suggestions,
            });
        }
        let m = nearest as usize;
        if m < 2 || m % 2 != 0 {
            return Err(HallError::FluxQuantization {
                message: format!("flux number M = {m} must be even and at least 2"),
                suggestions,
            });
        }
        Ok(Self::assemble(lx, ly, b, m))
    }

    /// Zero-field torus used by the translation-invariant oracle.
    pub fn zero_field(lx: f64, ly: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(HallError::Config("lengths must be positive".into()));
        }
        Ok(Self {
            lx,
            ly,
            b: 0.0,
            m: 0,
            ell_b: f64::INFINITY,
            omega_c: 0.0,
        })
    }

    fn assemble(lx: f64, ly: f64, b: f64, m: usize) -> Self {
        Self {
            lx,
            ly,
            b,
            m,
            ell_b: b.powf(-0.5),
            omega_c: b,
        }
    }

    /// True for the plane-wave (B = 0) flavour.
    pub fn is_zero_field(&self) -> bool {
        self.b == 0.0
    }

    /// Area `Lx·Ly`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Relative flux-quantization residual `|Lx·Ly − 2πMℓ_B²| / (Lx·Ly)`.
    pub fn flux_residual(&self) -> f64 {
        if self.is_zero_field() {
            return 0.0;
        }
        (self.area() - 2.0 * PI * self.m as f64 * self.ell_b * self.ell_b).abs() / self.area()
    }

    /// Periods `(ΔφX, ΔφY) = (2π/Lx, 2π/Ly)` of the gauge torus.
    pub fn gauge_cell(&self) -> (f64, f64) {
        (2.0 * PI / self.lx, 2.0 * PI / self.ly)
    }
}

fn check_even_flux(m: usize) -> Result<()> {
    if m < 2 || m % 2 != 0 {
        let lower = (m.max(2) / 2) * 2;
        let suggestions = if lower == m { vec![m] } else { vec![lower.max(2), lower + 2] };
        return Err(HallError::FluxQuantization {
            message: format!("flux number M = {m} must be even and at least 2"),
            suggestions,
        });
    }
    Ok(())
}

/// Free function form of [`TorusGeometry::gauge_cell`].
pub fn gauge_cell(geometry: &TorusGeometry) -> (f64, f64) {
    geometry.gauge_cell()
}

/// A point `(φx, φy)` of the gauge torus.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GaugePoint {
    /// Gauge parameter in x (momentum units).
    pub phi_x: f64,
    /// Gauge parameter in y (momentum units).
    pub phi_y: f64,
}

impl GaugePoint {
    /// Construct a gauge point.
    pub fn new(phi_x: f64, phi_y: f64) -> Self {
        Self { phi_x, phi_y }
    }

    /// Representative in the fundamental cell `[0, ΔφX) × [0, ΔφY)`.
    pub fn reduced(&self, geometry: &TorusGeometry) -> Self {
        let (dx, dy) = geometry.gauge_cell();
        Self {
            phi_x: self.phi_x.rem_euclid(dx),
            phi_y: self.phi_y.rem_euclid(dy),
        }
    }

    /// Point given as fractions of the gauge cell.
    pub fn from_fractions(geometry: &TorusGeometry, fx: f64, fy: f64) -> Self {
        let (dx, dy) = geometry.gauge_cell();
        Self::new(fx * dx, fy * dy)
    }

    /// Component along direction `s`.
    pub fn component(&self, s: Direction) -> f64 {
        match s {
            Direction::X => self.phi_x,
            Direction::Y => self.phi_y,
        }
    }

    /// Point displaced by `delta` along `s`.
    pub fn shifted(&self, s: Direction, delta: f64) -> Self {
        match s {
            Direction::X => Self::new(self.phi_x + delta, self.phi_y),
            Direction::Y => Self::new(self.phi_x, self.phi_y + delta),
        }
    }
}

/// Cartesian direction label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The x direction.
    X,
    /// The y direction.
    Y,
}

/// Uniform tiling of the gauge cell, `point(i, j) = (i·ΔφX/nX, j·ΔφY/nY)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeGrid {
    /// Points per direction in x.
    pub nx: usize,
    /// Points per direction in y.
    pub ny: usize,
    /// Cell period in x.
    pub dphi_x: f64,
    /// Cell period in y.
    pub dphi_y: f64,
}

impl GaugeGrid {
    /// Grid with `nx × ny` points over the gauge cell of `geometry`.
    pub fn new(geometry: &TorusGeometry, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(HallError::Config(format!(
                "gauge grid {nx}×{ny} too small; both directions need at least 2 points"
            )));
        }
        let (dphi_x, dphi_y) = geometry.gauge_cell();
        Ok(Self { nx, ny, dphi_x, dphi_y })
    }

    /// Point with integer coordinates `(i, j)`; indices outside the cell are
    /// allowed and give points outside the fundamental cell.
    pub fn point(&self, i: isize, j: isize) -> GaugePoint {
        GaugePoint::new(
            i as f64 * self.dphi_x / self.nx as f64,
            j as f64 * self.dphi_y / self.ny as f64,
        )
    }

    /// Flat index of `(i, j)` for `0 ≤ i < nx`, `0 ≤ j < ny` (x fastest).
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// All points in flat order.
    pub fn points(&self) -> Vec<GaugePoint> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(self.point(i as isize, j as isize));
            }
        }
        out
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    /// Always false; grids have at least four points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacings `(ΔφX/nX, ΔφY/nY)`.
    pub fn spacing(&self) -> (f64, f64) {
        (self.dphi_x / self.nx as f64, self.dphi_y / self.ny as f64)
    }
}

/// Electron count, filling and Landau-level truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingSpec {
    /// Electron count.
    pub n: usize,
    /// Flux quanta (denominator of the filling).
    pub m: usize,
    /// Landau levels retained.
    pub n_max: usize,
}

impl FillingSpec {
    /// Validate `1 ≤ nMax` and `N ≤ nMax·M`.
    pub fn new(n: usize, m: usize, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(HallError::Config("nMax must be at least 1".into()));
        }
        if n > n_max * m {
            return Err(HallError::Config(format!(
                "N = {n} electrons do not fit into nMax·M = {} orbitals",
                n_max * m
            )));
        }
        Ok(Self { n, m, n_max })
    }

    /// Filling factor `ν = N/M` as a reduced fraction.
    pub fn nu_fraction(&self) -> (usize, usize) {
        let g = gcd(self.n, self.m).max(1);
        (self.n / g, self.m / g)
    }

    /// Filling factor as a float.
    pub fn nu(&self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

/// Greatest common divisor.
pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_solve_square_m12() {
        let g = TorusGeometry::from_flux(12, 1.0, 1.0).unwrap();
        assert!((g.lx - (24.0 * PI).sqrt()).abs() < 1e-12);
        assert!((g.ly - g.lx).abs() < 1e-12);
        assert!((g.ell_b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_pi_square_is_rejected() {
        let err = TorusGeometry::from_lengths(2.0 * PI, 2.0 * PI, 1.0).unwrap_err();
        match err {
            HallError::FluxQuantization { suggestions, .. } => {
                assert_eq!(suggestions, vec![6, 8]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strong_field_small_torus() {
        let g = TorusGeometry::from_flux(2, 1.0, 4.0).unwrap();
        assert!((g.ell_b - 0.5).abs() < 1e-15);
        assert!((g.lx - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn odd_flux_and_bad_field_rejected() {
        assert!(TorusGeometry::from_flux(7, 1.0, 1.0).is_err());
        assert!(TorusGeometry::from_flux(8, 1.0, 0.0).is_err());
        assert!(TorusGeometry::from_flux(8, 1.0, -1.0).is_err());
        assert_eq!(TorusGeometry::from_flux(7, 1.0, 1.0).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn gauge_cell_examples() {
        let g = TorusGeometry::from_lengths(4.0 * PI, PI, 2.0 / PI).unwrap();
        let (dx, dy) = g.gauge_cell();
        assert!((dx - 0.5).abs() < 1e-14 && (dy - 2.0).abs() < 1e-14);
        let g = TorusGeometry::from_flux(12, 1.0, 1.0).unwrap();
        let (dx, dy) = gauge_cell(&g);
        let expect = 2.0 * PI / (24.0 * PI).sqrt();
        assert!((dx - expect).abs() < 1e-14 && (dy - expect).abs() < 1e-14);
    }

    #[test]
    fn grid_points_tile_cell() {
        let g = TorusGeometry::from_flux(8, 1.0, 1.0).unwrap();
        let grid = GaugeGrid::new(&g, 4, 2).unwrap();
        let p = grid.point(3, 1);
        assert!((p.phi_x - 0.75 * grid.dphi_x).abs() < 1e-15);
        assert!((p.phi_y - 0.5 * grid.dphi_y).abs() < 1e-15);
        assert_eq!(grid.points().len(), 8);
        assert!(GaugeGrid::new(&g, 1, 4).is_err());
    }

    #[test]
    fn filling_fraction_reduces() {
        let f = FillingSpec::new(3, 9, 1).unwrap();
        assert_eq!(f.nu_fraction(), (1, 3));
        assert!(FillingSpec::new(10, 8, 1).is_err());
        assert!(FillingSpec::new(1, 8, 0).is_err());
    }
}

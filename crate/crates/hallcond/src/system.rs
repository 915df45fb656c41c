//! A physical system seen from the gauge torus: ground frames, overlaps
//! between frames at different gauge points, large-gauge transport and
//! pointwise response, for free fermions and for interacting electrons.

use num_complex::Complex64;

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugePoint, TorusGeometry};
use crate::landau::{wrap_map, BasisSet, WrapMap};
use crate::manybody::{
    basis_overlap, fock_overlap_apply, ground_multiplet, kubo_lift_dense, FockWrap, ManyBodySystem, DENSE_LIMIT,
};
use crate::operators::{build_hamiltonian, diagonalize, velocity_matrix, CMat, SpectralData};
use crate::potential::PotentialSpec;
use crate::response::{kubo_iterative, spectral_from_dense, Occupation, ResponseReport, SpectralResponse, SwitchingProtocol};

/// Either free fermions filling the lowest orbitals or an interacting
/// many-body problem with a ground multiplet.
#[derive(Debug, Clone)]
pub enum System {
    /// `N` non-interacting electrons in the lowest single-particle states.
    FermiSea {
        /// Single-particle basis.
        basis: BasisSet,
        /// Potentials (`W⁽²⁾` ignored).
        pot: PotentialSpec,
        /// Electron count.
        n: usize,
        /// Wrap maps in x and y.
        wraps: [WrapMap; 2],
    },
    /// Interacting electrons with a `q`-dimensional ground multiplet.
    ManyBody {
        /// The many-body problem.
        system: Box<ManyBodySystem>,
        /// Multiplet dimension.
        q: usize,
        /// Lifted wrap maps in x and y.
        wraps: [FockWrap; 2],
    },
}

/// Ground frame at one gauge point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Gauge point (not reduced to the fundamental cell).
    pub phi: GaugePoint,
    /// Coefficient columns in the basis at `phi`.
    pub coeffs: CMat,
    /// Energies of the frame states (occupied orbitals or multiplet).
    pub energies: Vec<f64>,
    /// Gap above the frame.
    pub gap: f64,
    /// Spread of the multiplet (zero for a Fermi sea).
    pub spread: f64,
}

impl System {
    /// Free fermions.
    pub fn fermi_sea(basis: BasisSet, pot: PotentialSpec, n: usize) -> Result<Self> {
        pot.validate()?;
        if n == 0 || n >= basis.dim() {
            return Err(HallError::Config(format!("N = {n} must satisfy 0 < N < {}", basis.dim())));
        }
        let wraps = [wrap_map(&basis, Direction::X), wrap_map(&basis, Direction::Y)];
        Ok(System::FermiSea { basis, pot, n, wraps })
    }

    /// Interacting electrons.
    pub fn many_body(system: ManyBodySystem, q: usize) -> Self {
        let wraps = [
            FockWrap::new(&system.basis, &system.fock, Direction::X),
            FockWrap::new(&system.basis, &system.fock, Direction::Y),
        ];
        System::ManyBody { system: Box::new(system), q, wraps }
    }

    /// Single-particle basis.
    pub fn basis(&self) -> &BasisSet {
        match self {
            System::FermiSea { basis, .. } => basis,
            System::ManyBody { system, .. } => &system.basis,
        }
    }

    /// Potentials.
    pub fn potential(&self) -> &PotentialSpec {
        match self {
            System::FermiSea { pot, .. } => pot,
            System::ManyBody { system, .. } => &system.pot,
        }
    }

    /// Geometry.
    pub fn geometry(&self) -> &TorusGeometry {
        &self.basis().geometry
    }

    /// Electron count.
    pub fn particles(&self) -> usize {
        match self {
            System::FermiSea { n, .. } => *n,
            System::ManyBody { system, .. } => system.fock.n_particles,
        }
    }

    /// Dimension `q` of the ground multiplet (one for a Fermi sea).
    pub fn q(&self) -> usize {
        match self {
            System::FermiSea { .. } => 1,
            System::ManyBody { q, .. } => *q,
        }
    }

    /// Filling `ν = N/M`.
    pub fn nu(&self) -> f64 {
        self.particles() as f64 / self.geometry().m as f64
    }

    /// Ground frame at `phi`. Rejects points where the gap does not exceed
    /// the multiplet spread.
    pub fn frame(&self, phi: GaugePoint) -> Result<Frame> {
        let frame = match self {
            System::FermiSea { basis, pot, n, .. } => {
                let spec = diagonalize(&build_hamiltonian(basis, pot, phi)?, *n)?;
                Frame {
                    phi,
                    coeffs: spec.eigenvectors.columns(0, *n).into_owned(),
                    energies: spec.eigenvalues[..*n].to_vec(),
                    gap: spec.gap,
                    spread: 0.0,
                }
            }
            System::ManyBody { system, q, .. } => {
                let gm = ground_multiplet(&system.hamiltonian(phi)?, *q)?;
                Frame { phi, coeffs: gm.vectors, energies: gm.energies, gap: gm.gap, spread: gm.spread }
            }
        };
        if !(frame.gap > frame.spread) || frame.gap < 1e-10 * self.geometry().omega_c {
            return Err(HallError::GapViolation {
                phi_x: phi.phi_x,
                phi_y: phi.phi_y,
                message: format!(
                    "gap {:e} does not exceed multiplet spread {:e}",
                    frame.gap, frame.spread
                ),
            });
        }
        Ok(frame)
    }

    /// `q × q` overlap `⟨Φ_μ(φ_a)|Φ_ν(φ_b)⟩` of two frames. For a Fermi sea the
    /// many-body ground state is the Slater determinant, so the `1 × 1`
    /// overlap is the determinant of the orbital overlaps.
    pub fn link(&self, a: &Frame, b: &Frame) -> CMat {
        let s = basis_overlap(self.basis(), a.phi, b.phi);
        match self {
            System::FermiSea { .. } => {
                let m = a.coeffs.adjoint() * s * &b.coeffs;
                CMat::from_element(1, 1, m.determinant())
            }
            System::ManyBody { system, .. } => {
                let moved = fock_overlap_apply(&system.fock, &s, &b.coeffs);
                a.coeffs.adjoint() * moved
            }
        }
    }

    /// The same frame expressed at `phi + Δφ_s` (one gauge-torus period).
    pub fn wrap(&self, f: &Frame, s: Direction) -> Frame {
        let (dx, dy) = self.geometry().gauge_cell();
        let delta = if s == Direction::X { dx } else { dy };
        let idx = if s == Direction::X { 0 } else { 1 };
        let coeffs = match self {
            System::FermiSea { wraps, .. } => {
                let w = &wraps[idx];
                let mut out = CMat::zeros(f.coeffs.nrows(), f.coeffs.ncols());
                for c in 0..f.coeffs.ncols() {
                    let col: Vec<Complex64> = f.coeffs.column(c).iter().copied().collect();
                    for (r, v) in w.transport(&col, f.phi.phi_y).into_iter().enumerate() {
                        out[(r, c)] = v;
                    }
                }
                out
            }
            System::ManyBody { wraps, .. } => wraps[idx].transport(&f.coeffs, f.phi.phi_y),
        };
        Frame { phi: f.phi.shifted(s, delta), coeffs, ..f.clone() }
    }

    /// Rotate a frame by a `q × q` unitary (for a Fermi sea, `u` is a phase
    /// applied to the first orbital, which rotates the Slater determinant).
    pub fn rotate(&self, f: &mut Frame, u: &CMat) {
        match self {
            System::FermiSea { .. } => {
                let ph = u[(0, 0)];
                for r in 0..f.coeffs.nrows() {
                    f.coeffs[(r, 0)] *= ph;
                }
            }
            System::ManyBody { .. } => f.coeffs = &f.coeffs * u,
        }
    }

    /// Dense spectral data and velocity matrices at `phi`.
    pub fn spectral(&self, phi: GaugePoint) -> Result<(SpectralData, CMat, CMat)> {
        match self {
            System::FermiSea { basis, pot, n, .. } => {
                let spec = diagonalize(&build_hamiltonian(basis, pot, phi)?, *n)?;
                let vx = velocity_matrix(basis, pot, phi, Direction::X)?.entries;
                let vy = velocity_matrix(basis, pot, phi, Direction::Y)?.entries;
                Ok((spec, vx, vy))
            }
            System::ManyBody { system, q, .. } => {
                if system.fock.dim() > DENSE_LIMIT {
                    return Err(HallError::DimensionCap { dim: system.fock.dim(), cap: DENSE_LIMIT });
                }
                let h = system.hamiltonian(phi)?.matrix.to_dense();
                let (vx, vy) = kubo_lift_dense(system, phi)?;
                Ok((spectral_from_dense(phi, &h, *q), vx, vy))
            }
        }
    }

    /// Occupation used by the response formulas.
    pub fn occupation(&self) -> Occupation {
        match self {
            System::FermiSea { n, .. } => Occupation::FermiSea(*n),
            System::ManyBody { system, q, .. } => Occupation::Multiplet { q: *q, n: system.fock.n_particles },
        }
    }

    fn check_kubo_support(&self) -> Result<()> {
        if self.basis().n_max < 2 {
            return Err(HallError::Config(
                "pointwise Kubo formulas need at least two Landau levels: the projected kinetic velocity vanishes \
                 in a single level; use the Chern route for lowest-level-only runs"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Spectral response object at `phi`.
    pub fn response(&self, phi: GaugePoint) -> Result<SpectralResponse> {
        self.check_kubo_support()?;
        let (spec, vx, vy) = self.spectral(phi)?;
        let g = self.geometry();
        SpectralResponse::new(&spec, &vx, &vy, self.occupation(), g.area(), g.omega_c)
    }

    /// Response report at `phi`, using conjugate gradients for Fock spaces
    /// beyond the dense limit (switching corrections need the dense path).
    pub fn response_report(&self, phi: GaugePoint, protocol: Option<&SwitchingProtocol>) -> Result<ResponseReport> {
        self.check_kubo_support()?;
        if let System::ManyBody { system, q, .. } = self {
            if system.fock.dim() > DENSE_LIMIT {
                let h = system.hamiltonian(phi)?;
                let gm = ground_multiplet(&h, *q)?;
                let vx = system.velocity(phi, Direction::X)?.matrix;
                let vy = system.velocity(phi, Direction::Y)?.matrix;
                let g = self.geometry();
                let (sigma, gxy, gyy) = kubo_iterative(&h.matrix, &gm, &vx, &vy, system.fock.n_particles, g.area())?;
                return Ok(ResponseReport {
                    phi,
                    sigma_xy: sigma,
                    gamma_xy: gxy,
                    gamma_yy: gyy,
                    gamma_xy_natural: gxy / crate::geometry::PLANCK,
                    gamma_yy_natural: gyy / crate::geometry::PLANCK,
                    delta_sigma_xy: None,
                    delta_sigma_yy: None,
                    q_used: *q,
                    gap: gm.gap,
                });
            }
        }
        self.response(phi)?.report(protocol)
    }
}

//! Run configuration and experiment presets.
//!
//! A run is described by one TOML file. Every table is optional except
//! `geometry` and `filling`; omitted keys take the defaults documented on the
//! fields below. Keys are camelCase, physical symbols keep their usual
//! spelling (`M`, `N`, `B`, `Lx`, `Ly`, `T`, `F`). All numbers are in natural
//! units `ħ = e = m = 1`.
//!
//! ```toml
//! seed = 7
//! operations = ["response", "chern"]
//!
//! [geometry]
//! M = 8
//! B = 1.0
//!
//! [filling]
//! nu = 1.0
//! nMax = 4
//!
//! [potential.disorder]
//! amplitude = 0.2
//! kmax = 1.5
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{GaugeGrid, GaugePoint, TorusGeometry};
use crate::landau::BasisSet;
use crate::manybody::{ground_multiplet, ManyBodySystem};
use crate::operators::auto_multiplet;
use crate::planewave::{PlaneWaveBasis, ZeroFieldGas};
use crate::potential::{gaussian_interaction, random_modes, FourierMode, PotentialSpec};
use crate::response::{EvolutionSettings, SwitchingProtocol};
use crate::system::System;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 7] = [
    "clean-integer",
    "disordered-integer",
    "zero-field",
    "fractional-third",
    "switching-sweep",
    "finite-size-scan",
    "index-check",
];

/// Gap-to-spread ratio used when the multiplet dimension is chosen
/// automatically.
pub const AUTO_Q_RATIO: f64 = 100.0;

/// A pipeline step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    /// Low-lying spectrum and multiplet statistics at `response.phi`.
    Spectrum,
    /// Kubo coefficients and switching corrections at `response.phi`.
    Response,
    /// Driven time evolution at `response.phi`.
    Evolve,
    /// Chern number, curvature, winding and fraction bound on `topology.grid`.
    Chern,
    /// Boundary winding on `topology.grid`.
    Winding,
    /// Heat-kernel Dirac index on `topology.diracLattice`.
    Index,
    /// Gauge averages on `topology.averageGrid`.
    Average,
    /// Parameter sweep described by the `scan` table.
    Scan,
}

impl Operation {
    /// Lower-case name used in files and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Spectrum => "spectrum",
            Operation::Response => "response",
            Operation::Evolve => "evolve",
            Operation::Chern => "chern",
            Operation::Winding => "winding",
            Operation::Index => "index",
            Operation::Average => "average",
            Operation::Scan => "scan",
        }
    }
}

/// Complete description of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for every random draw that does not carry its own seed.
    #[serde(default)]
    pub seed: u64,
    /// Steps executed by [`crate::run::run`], in order.
    #[serde(default)]
    pub operations: Vec<Operation>,
    /// Torus geometry.
    pub geometry: GeometryConfig,
    /// Electron count and truncation.
    pub filling: FillingConfig,
    /// Potentials.
    #[serde(default)]
    pub potential: PotentialConfig,
    /// Gauge point, switching protocol and integrator.
    #[serde(default)]
    pub response: ResponseConfig,
    /// Gauge grids for the topological routes.
    #[serde(default)]
    pub topology: TopologyConfig,
    /// Parameter sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    /// Output controls.
    #[serde(default)]
    pub output: OutputConfig,
}

/// Geometry table: either `M` (with `aspect`) or `Lx`, `Ly`, and `B`.
/// `B = 0` selects the zero-field plane-wave model and needs `Lx`, `Ly`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Flux quanta.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// `Lx/Ly` when `M` is given (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect: Option<f64>,
    /// Field strength (default 1).
    #[serde(rename = "B", default = "one")]
    pub b: f64,
    /// Length along x.
    #[serde(rename = "Lx", default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<f64>,
    /// Length along y.
    #[serde(rename = "Ly", default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
}

/// Filling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FillingConfig {
    /// Electron count. Either `N` or `nu` must be given.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Filling `N/M`; `N = nu·M` must be an integer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Landau levels retained (default 4).
    #[serde(rename = "nMax", default = "default_n_max")]
    pub n_max: usize,
    /// Keep only the lowest Landau level (overrides `nMax`).
    #[serde(default)]
    pub lll_only: bool,
    /// Multiplet dimension of an interacting run; chosen from the spectrum
    /// at `φ = 0` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Diamond cutoff of the zero-field plane-wave basis (default 2).
    #[serde(default = "default_plane_wave_cutoff")]
    pub plane_wave_cutoff: i64,
}

/// One Fourier coefficient `c = re + i·im` of mode `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    /// Reciprocal index along x.
    pub a: i64,
    /// Reciprocal index along y.
    pub b: i64,
    /// Real part.
    pub re: f64,
    /// Imaginary part.
    #[serde(default)]
    pub im: f64,
}

impl ModeConfig {
    fn mode(&self) -> FourierMode {
        FourierMode { a: self.a, b: self.b, c: num_complex::Complex64::new(self.re, self.im) }
    }
}

/// Random one-body potential, rescaled to a given sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DisorderConfig {
    /// Sup norm of the drawn potential.
    pub amplitude: f64,
    /// Largest integer mode label. Takes precedence over `kmax`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<i64>,
    /// Largest physical wavevector; the label cutoff becomes
    /// `⌊kmax·max(Lx, Ly)/2π⌋` (at least 1), so the correlation length stays
    /// fixed when the torus grows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<f64>,
    /// Seed of the draw (defaults to the run seed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Gaussian two-body repulsion `c_q = strength·exp(−|q|²range²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    /// Overall strength.
    pub strength: f64,
    /// Range in magnetic lengths.
    pub range: f64,
    /// Largest integer mode label.
    pub cutoff: i64,
}

/// Potential table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PotentialConfig {
    /// Explicit coefficients of `W`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<ModeConfig>,
    /// Random contribution to `W`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderConfig>,
    /// Coefficients of `B_P,z`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_pz: Vec<ModeConfig>,
    /// Explicit coefficients of `W⁽²⁾`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w2: Vec<ModeConfig>,
    /// Gaussian contribution to `W⁽²⁾`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionConfig>,
}

impl PotentialConfig {
    fn is_empty(&self) -> bool {
        self.w.is_empty() && self.disorder.is_none() && self.b_pz.is_empty() && self.w2.is_empty() && self.interaction.is_none()
    }

    fn interacting(&self) -> bool {
        !self.w2.is_empty() || self.interaction.is_some()
    }
}

/// Integrator controls for the `evolve` step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct EvolveConfig {
    /// Step size (default 0.02).
    pub dt: f64,
    /// End of the observation window (default 5).
    pub t_end: f64,
    /// Sampling stride before the field is fully on (default 5000).
    pub stride_before: usize,
    /// Sampling stride afterwards (default 10).
    pub stride_after: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { dt: 0.02, t_end: 5.0, stride_before: 5000, stride_after: 10 }
    }
}

/// Response table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct ResponseConfig {
    /// Gauge point `(φx, φy)` (default origin).
    #[serde(default)]
    pub phi: [f64; 2],
    /// Switching rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Switch-on duration.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub big_t: Option<f64>,
    /// Observation time (default 0).
    #[serde(default)]
    pub t: f64,
    /// Field strength (default 1e-4).
    #[serde(rename = "F", default = "default_field")]
    pub f: f64,
    /// Integrator controls.
    #[serde(default)]
    pub evolve: EvolveConfig,
}

impl Default for ResponseConfig {
    fn default() -> Self {
        Self { phi: [0.0, 0.0], eta: None, big_t: None, t: 0.0, f: default_field(), evolve: EvolveConfig::default() }
    }
}

impl ResponseConfig {
    /// Gauge point.
    pub fn gauge_point(&self) -> GaugePoint {
        GaugePoint::new(self.phi[0], self.phi[1])
    }

    /// Switching protocol, present when both `eta` and `T` are given.
    pub fn protocol(&self) -> Result<Option<SwitchingProtocol>> {
        match (self.eta, self.big_t) {
            (Some(eta), Some(big_t)) => SwitchingProtocol::new(self.f, eta, big_t, self.t).map(Some),
            (None, None) => Ok(None),
            _ => Err(HallError::Config("response.eta and response.T must be given together".into())),
        }
    }

    /// Integrator settings.
    pub fn settings(&self) -> EvolutionSettings {
        EvolutionSettings {
            dt: self.evolve.dt,
            t_end: self.evolve.t_end,
            stride_before: self.evolve.stride_before,
            stride_after: self.evolve.stride_after,
        }
    }
}

/// Topology table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct TopologyConfig {
    /// Gauge grid of the `chern` and `winding` steps (default 8×8).
    pub grid: [usize; 2],
    /// Lattice of the `index` step (default 16×16).
    pub dirac_lattice: [usize; 2],
    /// Wilson parameter (default 1).
    pub wilson_r: f64,
    /// Heat-kernel parameter (default half the gauge-cell area).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Grid of the `average` step (default 4×4).
    pub average_grid: [usize; 2],
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self { grid: [8, 8], dirac_lattice: [16, 16], wilson_r: 1.0, beta: None, average_grid: [4, 4] }
    }
}

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// Flux number `M` at fixed filling `nu`.
    Size,
    /// Filling `nu` at fixed `M`.
    Filling,
    /// Switching rate `η` at fixed `ηT`.
    Eta,
}

/// Quantity evaluated for every scan value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// `σ_xy(φ)`.
    Sigma,
    /// `γ_xy(φ)` and `γ_yy(φ)`.
    Gamma,
    /// Switching corrections, their bound and their envelope over one
    /// cyclotron period.
    Switching,
    /// Chern number on `topology.grid`.
    Chern,
    /// Boundary winding on `topology.grid`.
    Winding,
}

/// Scan table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScanConfig {
    /// Swept parameter.
    pub kind: ScanKind,
    /// Values of the swept parameter.
    pub values: Vec<f64>,
    /// Quantities per value.
    pub quantities: Vec<Quantity>,
    /// Fixed product `ηT` of an `eta` scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_t: Option<f64>,
}

/// Output table.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OutputConfig {
    /// Leave wall-clock timings out of the bundle so that repeated runs are
    /// byte-identical.
    #[serde(default)]
    pub canonical: bool,
}

fn one() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    4
}

fn default_plane_wave_cutoff() -> i64 {
    2
}

fn default_field() -> f64 {
    1e-4
}

/// The physical model a configuration describes.
#[derive(Debug, Clone)]
pub enum Model {
    /// Electrons in Landau levels, free or interacting.
    Landau(System),
    /// Free electrons at zero field.
    ZeroField(ZeroFieldGas),
}

impl RunConfig {
    /// Parse and validate a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| HallError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Read and validate a TOML file.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HallError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Serialize back to TOML.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HallError::Config(e.to_string()))
    }

    /// Schema checks that need no physics.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.b == 0.0 {
            if g.lx.is_none() || g.ly.is_none() || g.m.is_some() {
                return Err(HallError::Config("zero field needs Lx and Ly and no M".into()));
            }
            if !self.potential.is_empty() {
                return Err(HallError::Config("the zero-field model has no potentials".into()));
            }
        } else if g.m.is_some() == (g.lx.is_some() || g.ly.is_some()) {
            return Err(HallError::Config("geometry needs either M or both Lx and Ly".into()));
        }
        if self.filling.n.is_none() && self.filling.nu.is_none() {
            return Err(HallError::Config("filling needs N or nu".into()));
        }
        if self.topology.grid.iter().chain(&self.topology.dirac_lattice).chain(&self.topology.average_grid).any(|&n| n < 2) {
            return Err(HallError::Config("every gauge grid needs at least 2 points per direction".into()));
        }
        if let Some(scan) = &self.scan {
            if scan.values.is_empty() || scan.quantities.is_empty() {
                return Err(HallError::Config("scan needs values and quantities".into()));
            }
            match scan.kind {
                ScanKind::Size if self.filling.nu.is_none() => {
                    return Err(HallError::Config("a size scan needs filling.nu".into()));
                }
                ScanKind::Size if g.m.is_none() => {
                    return Err(HallError::Config("a size scan needs geometry.M".into()));
                }
                ScanKind::Eta if scan.eta_t.is_none() => {
                    return Err(HallError::Config("an eta scan needs scan.etaT".into()));
                }
                _ => {}
            }
        } else if self.operations.contains(&Operation::Scan) {
            return Err(HallError::Config("the scan step needs a scan table".into()));
        }
        self.response.protocol()?;
        Ok(())
    }

    /// Torus geometry.
    pub fn torus(&self) -> Result<TorusGeometry> {
        let g = &self.geometry;
        if g.b == 0.0 {
            return TorusGeometry::zero_field(g.lx.unwrap_or(0.0), g.ly.unwrap_or(0.0));
        }
        match (g.m, g.lx, g.ly) {
            (Some(m), None, None) => TorusGeometry::from_flux(m, g.aspect.unwrap_or(1.0), g.b),
            (None, Some(lx), Some(ly)) => TorusGeometry::from_lengths(lx, ly, g.b),
            _ => Err(HallError::Config("geometry needs either M or both Lx and Ly".into())),
        }
    }

    /// Electron count, from `N` or from `nu·M`.
    pub fn electrons(&self, geometry: &TorusGeometry) -> Result<usize> {
        let from_nu = match self.filling.nu {
            Some(nu) if geometry.is_zero_field() => {
                return Err(HallError::Config(format!("filling nu = {nu} is undefined at zero field; give N")));
            }
            Some(nu) => {
                let n = nu * geometry.m as f64;
                if (n - n.round()).abs() > 1e-9 || n.round() < 1.0 {
                    return Err(HallError::Config(format!("nu·M = {n} is not a positive integer")));
                }
                Some(n.round() as usize)
            }
            None => None,
        };
        match (self.filling.n, from_nu) {
            (Some(a), Some(b)) if a != b => Err(HallError::Config(format!("N = {a} disagrees with nu·M = {b}"))),
            (Some(a), _) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(HallError::Config("filling needs N or nu".into())),
        }
    }

    /// Landau levels retained.
    pub fn levels(&self) -> usize {
        if self.filling.lll_only {
            1
        } else {
            self.filling.n_max
        }
    }

    /// Assemble the potentials, drawing random coefficients in the
    /// documented order.
    pub fn potentials(&self, geometry: &TorusGeometry) -> Result<PotentialSpec> {
        let p = &self.potential;
        let mut pot = PotentialSpec::zero();
        pot.seed = self.seed;
        pot.w = p.w.iter().map(ModeConfig::mode).collect();
        if let Some(d) = &p.disorder {
            let cutoff = match (d.cutoff, d.kmax) {
                (Some(c), _) => c,
                (None, Some(k)) => {
                    ((k * geometry.lx.max(geometry.ly) / (2.0 * std::f64::consts::PI)).floor() as i64).max(1)
                }
                (None, None) => return Err(HallError::Config("disorder needs cutoff or kmax".into())),
            };
            if cutoff < 1 || !(d.amplitude >= 0.0) {
                return Err(HallError::Config("disorder needs cutoff ≥ 1 and amplitude ≥ 0".into()));
            }
            let seed = d.seed.unwrap_or(self.seed);
            pot.seed = seed;
            merge(&mut pot.w, random_modes(geometry, cutoff, d.amplitude, seed));
        }
        pot.b_pz = p.b_pz.iter().map(ModeConfig::mode).collect();
        pot.w2 = p.w2.iter().map(ModeConfig::mode).collect();
        if let Some(i) = &p.interaction {
            merge(&mut pot.w2, gaussian_interaction(geometry, i.strength, i.range, i.cutoff));
        }
        pot.validate()?;
        pot.compute_norms(geometry);
        Ok(pot)
    }

    /// Build the model. Interacting potentials give a many-body system.
    pub fn model(&self) -> Result<Model> {
        let geometry = self.torus()?;
        let n = self.electrons(&geometry)?;
        if geometry.is_zero_field() {
            let basis = PlaneWaveBasis::new(geometry, self.filling.plane_wave_cutoff)?;
            return Ok(Model::ZeroField(ZeroFieldGas::new(basis, n)?));
        }
        let basis = BasisSet::new(geometry, self.levels())?;
        let pot = self.potentials(&geometry)?;
        if !self.potential.interacting() {
            if self.filling.q.is_some_and(|q| q != 1) {
                return Err(HallError::Config("a non-interacting Fermi sea has q = 1".into()));
            }
            return Ok(Model::Landau(System::fermi_sea(basis, pot, n)?));
        }
        let mb = ManyBodySystem::new(basis, pot, n)?;
        let q = match self.filling.q {
            Some(q) => q,
            None => auto_q(&mb)?,
        };
        Ok(Model::Landau(System::many_body(mb, q)))
    }

    /// Gauge grid `[nx, ny]` over the gauge cell.
    pub fn grid(&self, size: [usize; 2]) -> Result<GaugeGrid> {
        GaugeGrid::new(&self.torus()?, size[0], size[1])
    }
}

fn merge(into: &mut Vec<FourierMode>, extra: Vec<FourierMode>) {
    for m in extra {
        match into.iter_mut().find(|e| e.a == m.a && e.b == m.b) {
            Some(e) => e.c += m.c,
            None => into.push(m),
        }
    }
}

fn auto_q(mb: &ManyBodySystem) -> Result<usize> {
    let dim = mb.fock.dim();
    let k = 10.min(dim.saturating_sub(1)).max(1);
    let gm = ground_multiplet(&mb.hamiltonian(GaugePoint::new(0.0, 0.0))?, k)?;
    let mut levels = gm.energies.clone();
    levels.push(gm.energies[k - 1] + gm.gap);
    auto_multiplet(&levels, AUTO_Q_RATIO).ok_or_else(|| {
        HallError::Config("no separated ground multiplet among the lowest levels at φ = 0; set filling.q".into())
    })
}

/// Canonical configuration of a named experiment.
pub fn preset(name: &str) -> Result<RunConfig> {
    let base = |m: usize, nu: f64, n_max: usize| RunConfig {
        seed: 1,
        operations: Vec::new(),
        geometry: GeometryConfig { m: Some(m), aspect: None, b: 1.0, lx: None, ly: None },
        filling: FillingConfig {
            n: None,
            nu: Some(nu),
            n_max,
            lll_only: false,
            q: None,
            plane_wave_cutoff: default_plane_wave_cutoff(),
        },
        potential: PotentialConfig::default(),
        response: ResponseConfig { phi: [0.17, -0.4], ..ResponseConfig::default() },
        topology: TopologyConfig::default(),
        scan: None,
        output: OutputConfig::default(),
    };
    let disorder = Some(DisorderConfig { amplitude: 0.2, cutoff: None, kmax: Some(2.5), seed: None });
    let config = match name {
        "clean-integer" => {
            let mut c = base(8, 1.0, 4);
            c.operations = vec![Operation::Response, Operation::Chern, Operation::Scan];
            c.response.eta = Some(1e-3);
            c.response.big_t = Some(15.0 / 1e-3);
            c.scan = Some(ScanConfig {
                kind: ScanKind::Filling,
                values: vec![1.0, 2.0],
                quantities: vec![Quantity::Sigma, Quantity::Gamma, Quantity::Chern, Quantity::Winding],
                eta_t: None,
            });
            c
        }
        "disordered-integer" => {
            let mut c = base(8, 1.0, 12);
            c.operations = vec![Operation::Response, Operation::Chern, Operation::Average];
            c.potential.disorder = disorder;
            c
        }
        "zero-field" => {
            let mut c = base(2, 1.0, 1);
            c.geometry = GeometryConfig { m: None, aspect: None, b: 0.0, lx: Some(5.0), ly: Some(5.0) };
            c.filling.n = Some(5);
            c.filling.nu = None;
            c.operations = vec![Operation::Response, Operation::Evolve];
            c.response.eta = Some(0.1);
            c.response.big_t = Some(150.0);
            c.response.t = 1.0;
            c.response.evolve = EvolveConfig { dt: 0.05, t_end: 5.0, stride_before: 100, stride_after: 10 };
            c
        }
        "fractional-third" => {
            let mut c = base(6, 1.0 / 3.0, 1);
            c.filling.lll_only = true;
            c.filling.q = Some(3);
            c.potential.interaction = Some(InteractionConfig { strength: 1.0, range: 1.0, cutoff: 6 });
            c.topology.grid = [6, 6];
            c.operations = vec![Operation::Spectrum, Operation::Chern, Operation::Scan];
            c.scan = Some(ScanConfig {
                kind: ScanKind::Size,
                values: vec![6.0, 12.0],
                quantities: vec![Quantity::Chern, Quantity::Winding],
                eta_t: None,
            });
            c
        }
        "switching-sweep" => {
            let mut c = base(8, 1.0, 4);
            c.operations = vec![Operation::Scan];
            c.scan = Some(ScanConfig {
                kind: ScanKind::Eta,
                values: vec![1e-1, 1e-2, 1e-3],
                quantities: vec![Quantity::Switching],
                eta_t: Some(15.0),
            });
            c
        }
        "finite-size-scan" => {
            let mut c = base(8, 1.0, 20);
            c.potential.disorder = disorder;
            c.topology.grid = [4, 4];
            c.operations = vec![Operation::Scan];
            c.scan = Some(ScanConfig {
                kind: ScanKind::Size,
                values: vec![8.0, 16.0, 32.0],
                quantities: vec![Quantity::Sigma, Quantity::Gamma, Quantity::Chern, Quantity::Winding],
                eta_t: None,
            });
            c
        }
        "index-check" => {
            let mut c = base(8, 1.0, 4);
            c.operations = vec![Operation::Chern, Operation::Index];
            c
        }
        other => {
            return Err(HallError::Config(format!(
                "unknown preset '{other}'; valid presets: {}",
                PRESETS.join(", ")
            )))
        }
    };
    config.validate()?;
    Ok(config)
}

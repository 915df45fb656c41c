//! Run orchestration: executes the steps of a [`RunConfig`], collects the
//! reports into a [`ResultBundle`] and writes the bundle and the CSV side
//! files.
//!
//! Gauge-point work inside a step runs on the rayon pool when the `parallel`
//! feature is on; steps run one after another and reports are assembled in
//! order, so the output does not depend on the number of workers.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Model, Operation, Quantity, RunConfig, ScanKind};
use crate::error::{HallError, Result};
use crate::geometry::Direction;
use crate::manybody::ground_multiplet;
use crate::operators::{build_hamiltonian, diagonalize, gap_condition, GapReport, DEFAULT_KAPPA};
use crate::potential::Norms;
use crate::response::{delta_sigma_bound, evolve_driven, EvolutionTrace, Occupation, SwitchingProtocol};
use crate::system::System;
use crate::topology::{
    averaged_gamma, averaged_sigma, boundary_winding, chern_number, curvature, dirac_index, fraction_bound,
    sample_multiplet, CurvatureField,
};

/// Unit convention echoed into every bundle.
pub const UNITS: &str = "natural units hbar = e = m = 1, lengths in magnetic lengths for B = 1; \
conductances in e^2/h unless the key ends in Natural";

/// Samples of the switching-correction envelope per cyclotron period.
const ENVELOPE_SAMPLES: usize = 32;

/// Size and filling of the model a bundle was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemSummary {
    /// `fermiSea`, `manyBody` or `zeroField`.
    pub kind: String,
    /// Flux quanta (zero at zero field).
    #[serde(rename = "M")]
    pub m: usize,
    /// Electrons.
    #[serde(rename = "N")]
    pub n: usize,
    /// `N/M` (zero at zero field).
    pub nu: f64,
    /// Multiplet dimension.
    pub q: usize,
    /// Torus lengths.
    #[serde(rename = "Lx")]
    pub lx: f64,
    /// Torus lengths.
    #[serde(rename = "Ly")]
    pub ly: f64,
    /// Field strength.
    #[serde(rename = "B")]
    pub b: f64,
    /// Single-particle basis dimension.
    pub basis_dim: usize,
    /// Fock-space dimension of an interacting run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
    /// Non-interacting gap inequality at integer filling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_condition: Option<GapReport>,
    /// Sup-norm bounds of the potentials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<Norms>,
}

/// One executed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperationRecord {
    /// Step name.
    pub operation: Operation,
    /// Gauge points or grids the result was computed from.
    pub derived_from: String,
    /// Report.
    pub result: Value,
}

/// Everything a run produced, in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultBundle {
    /// Crate version.
    pub version: String,
    /// Unit convention.
    pub units: String,
    /// The configuration that was run.
    pub config: RunConfig,
    /// Model summary.
    pub system: SystemSummary,
    /// Reports in execution order.
    pub reports: Vec<OperationRecord>,
    /// Wall-clock seconds per step (left out of canonical bundles).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    /// Warnings, each tagged with the hypothesis it concerns.
    pub warnings: Vec<String>,
}

impl ResultBundle {
    /// Report of the first step named `op`.
    pub fn report(&self, op: Operation) -> Option<&Value> {
        self.reports.iter().find(|r| r.operation == op).map(|r| &r.result)
    }
}

/// One line of `scan.csv`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    /// Swept value.
    pub value: f64,
    /// Flux quanta.
    #[serde(rename = "M")]
    pub m: usize,
    /// Electrons.
    #[serde(rename = "N")]
    pub n: usize,
    /// Longer torus side.
    pub l_max: f64,
    /// `σ_xy(φ)` in `e²/h`.
    #[serde(rename = "sigmaXY")]
    pub sigma_xy: Option<f64>,
    /// `γ_xy(φ)` in `e²/h` per unit time.
    #[serde(rename = "gammaXY")]
    pub gamma_xy: Option<f64>,
    /// `γ_yy(φ)` in `e²/h` per unit time.
    #[serde(rename = "gammaYY")]
    pub gamma_yy: Option<f64>,
    /// Switching rate.
    pub eta: Option<f64>,
    /// `δσ_xy` at the configured `t`.
    #[serde(rename = "deltaSigmaXY")]
    pub delta_sigma_xy: Option<f64>,
    /// `δσ_yy` at the configured `t`.
    #[serde(rename = "deltaSigmaYY")]
    pub delta_sigma_yy: Option<f64>,
    /// Largest `|δσ_xy|` over one cyclotron period.
    pub delta_envelope: Option<f64>,
    /// Bound on `|δσ_sy|`.
    pub delta_bound: Option<f64>,
    /// Chern number.
    pub chern: Option<i64>,
    /// Multiplet dimension.
    pub q: Option<usize>,
    /// `ℐ/q` in `e²/h`.
    #[serde(rename = "avgSigmaXY")]
    pub avg_sigma_xy: Option<f64>,
    /// Winding integer.
    pub winding_p: Option<i64>,
}

/// Bundle plus the data written to CSV side files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// JSON bundle.
    pub bundle: ResultBundle,
    /// Plaquette phases of the last `chern` step.
    pub curvature: Option<CurvatureField>,
    /// Trace of the last `evolve` step.
    pub trace: Option<EvolutionTrace>,
    /// Rows of the last `scan` step.
    pub scan: Option<Vec<ScanRow>>,
}

struct Context<'a> {
    config: &'a RunConfig,
    model: &'a Model,
    warnings: Vec<String>,
    curvature: Option<CurvatureField>,
    trace: Option<EvolutionTrace>,
    scan: Option<Vec<ScanRow>>,
}

/// Execute the configured steps.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let model = config.model()?;
    let mut ctx = Context { config, model: &model, warnings: Vec::new(), curvature: None, trace: None, scan: None };
    let system = summary(&model, &mut ctx.warnings);
    let mut reports = Vec::new();
    let mut timings = BTreeMap::new();
    for &op in &config.operations {
        let start = Instant::now();
        let (derived_from, result) = ctx.execute(op)?;
        *timings.entry(op.name().to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        reports.push(OperationRecord { operation: op, derived_from, result });
    }
    let bundle = ResultBundle {
        version: env!("CARGO_PKG_VERSION").to_string(),
        units: UNITS.to_string(),
        config: config.clone(),
        system,
        reports,
        timings: (!config.output.canonical).then_some(timings),
        warnings: ctx.warnings,
    };
    Ok(RunOutput { bundle, curvature: ctx.curvature, trace: ctx.trace, scan: ctx.scan })
}

fn summary(model: &Model, warnings: &mut Vec<String>) -> SystemSummary {
    match model {
        Model::ZeroField(gas) => {
            let g = &gas.basis.geometry;
            SystemSummary {
                kind: "zeroField".into(),
                m: 0,
                n: gas.n,
                nu: 0.0,
                q: 1,
                lx: g.lx,
                ly: g.ly,
                b: 0.0,
                basis_dim: gas.basis.dim(),
                fock_dim: None,
                gap_condition: None,
                norms: None,
            }
        }
        Model::Landau(sys) => {
            let g = sys.geometry();
            let n = sys.particles();
            let (kind, fock_dim) = match sys {
                System::FermiSea { .. } => ("fermiSea", None),
                System::ManyBody { system, .. } => ("manyBody", Some(system.fock.dim())),
            };
            let gap = (fock_dim.is_none() && n % g.m == 0).then(|| gap_condition(g, sys.potential(), n / g.m));
            if let Some(r) = &gap {
                if !r.holds {
                    warnings.push(format!(
                        "[gap inequality] ω_c = {:.4} does not exceed {:.4}; quantization is not guaranteed",
                        r.lhs, r.rhs
                    ));
                }
            } else if fock_dim.is_none() {
                warnings.push(format!(
                    "[integer filling] a free Fermi sea at ν = {n}/{} has no guaranteed gap",
                    g.m
                ));
            }
            SystemSummary {
                kind: kind.into(),
                m: g.m,
                n,
                nu: sys.nu(),
                q: sys.q(),
                lx: g.lx,
                ly: g.ly,
                b: g.b,
                basis_dim: sys.basis().dim(),
                fock_dim,
                gap_condition: gap,
                norms: Some(sys.potential().norms),
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn no_bundle(op: Operation) -> HallError {
    HallError::Config(format!("the {} step needs a magnetic field; the zero-field model has no Berry bundle", op.name()))
}

impl<'a> Context<'a> {
    fn landau(&self, op: Operation) -> Result<&'a System> {
        match self.model {
            Model::Landau(s) => Ok(s),
            Model::ZeroField(_) => Err(no_bundle(op)),
        }
    }

    fn phi_label(&self) -> String {
        let p = self.config.response.phi;
        format!("phi = ({}, {})", p[0], p[1])
    }

    fn grid_label(size: [usize; 2]) -> String {
        format!("{}×{} gauge grid over the gauge cell", size[0], size[1])
    }

    fn execute(&mut self, op: Operation) -> Result<(String, Value)> {
        match op {
            Operation::Spectrum => Ok((self.phi_label(), self.spectrum()?)),
            Operation::Response => Ok((self.phi_label(), self.response()?)),
            Operation::Evolve => Ok((self.phi_label(), self.evolve()?)),
            Operation::Chern => Ok((Self::grid_label(self.config.topology.grid), self.chern()?)),
            Operation::Winding => Ok((Self::grid_label(self.config.topology.grid), self.winding()?)),
            Operation::Index => Ok((Self::grid_label(self.config.topology.dirac_lattice), self.index()?)),
            Operation::Average => Ok((Self::grid_label(self.config.topology.average_grid), self.average()?)),
            Operation::Scan => self.scan(),
        }
    }

    fn spectrum(&mut self) -> Result<Value> {
        let phi = self.config.response.gauge_point();
        let (eigenvalues, q, gap, spread) = match self.model {
            Model::ZeroField(gas) => {
                let s = gas.basis.spectral(phi, gas.n);
                (s.eigenvalues, gas.n, s.gap, s.spread)
            }
            Model::Landau(System::FermiSea { basis, pot, n, .. }) => {
                let s = diagonalize(&build_hamiltonian(basis, pot, phi)?, *n)?;
                (s.eigenvalues, *n, s.gap, s.spread)
            }
            Model::Landau(System::ManyBody { system, q, .. }) => {
                let k = (q + 6).min(system.fock.dim() - 1);
                let gm = ground_multiplet(&system.hamiltonian(phi)?, k)?;
                let mut e = gm.energies.clone();
                e.push(gm.energies[k - 1] + gm.gap);
                let (gap, spread) = (e[*q] - e[*q - 1], e[*q - 1] - e[0]);
                (e, *q, gap, spread)
            }
        };
        let warning = gap <= DEFAULT_KAPPA * spread;
        if warning {
            self.warnings.push(format!(
                "[uniform gap] at φ = ({}, {}) the gap {gap:.3e} does not exceed {DEFAULT_KAPPA}× the spread {spread:.3e}",
                phi.phi_x, phi.phi_y
            ));
        }
        Ok(json!({
            "phi": phi,
            "eigenvalues": eigenvalues,
            "q": q,
            "gap": gap,
            "spread": spread,
            "degeneracyWarning": warning,
        }))
    }

    fn response(&mut self) -> Result<Value> {
        let phi = self.config.response.gauge_point();
        let protocol = self.config.response.protocol()?;
        let report = match self.model {
            Model::ZeroField(gas) => gas.response(phi)?.report(protocol.as_ref())?,
            Model::Landau(sys) => sys.response_report(phi, protocol.as_ref())?,
        };
        let mut v = to_value(&report);
        if let (Some(p), Some(obj)) = (protocol, v.as_object_mut()) {
            obj.insert("protocol".into(), to_value(&p));
            if let Model::Landau(sys) = self.model {
                let g = sys.geometry();
                obj.insert("deltaSigmaBound".into(), json!(delta_sigma_bound(sys.nu(), g.omega_c, p.eta, p.big_t)));
            }
        }
        Ok(v)
    }

    fn evolve(&mut self) -> Result<Value> {
        let phi = self.config.response.gauge_point();
        let protocol = self.config.response.protocol()?.ok_or_else(|| {
            HallError::Config("the evolve step needs response.eta and response.T".into())
        })?;
        let settings = self.config.response.settings();
        let (spec, vx, vy, occupation, area, sigma) = match self.model {
            Model::ZeroField(gas) => {
                let (spec, vx, vy) = gas.spectral(phi);
                let sigma = gas.response(phi)?.sigma_xy_natural();
                (spec, vx, vy, Occupation::FermiSea(gas.n), gas.basis.geometry.area(), sigma)
            }
            Model::Landau(sys) => {
                let (spec, vx, vy) = sys.spectral(phi)?;
                let sigma = sys.response(phi).ok().map_or(f64::NAN, |r| r.sigma_xy_natural());
                (spec, vx, vy, sys.occupation(), sys.geometry().area(), sigma)
            }
        };
        let trace = evolve_driven(&spec, &vx, &vy, occupation, area, &protocol, &settings)?;
        let deviation = trace
            .times
            .iter()
            .zip(&trace.jx)
            .filter(|(t, _)| **t >= 0.0)
            .map(|(_, j)| (j / protocol.f - sigma).abs())
            .fold(0.0, f64::max);
        let v = json!({
            "protocol": protocol,
            "settings": settings,
            "samples": trace.times.len(),
            "normDrift": trace.norm_drift,
            "persistent": trace.persistent,
            "kuboSigmaXYNatural": if sigma.is_finite() { json!(sigma) } else { Value::Null },
            "maxDeviationFromKubo": if sigma.is_finite() { json!(deviation) } else { Value::Null },
        });
        self.trace = Some(trace);
        Ok(v)
    }

    fn chern(&mut self) -> Result<Value> {
        let sys = self.landau(Operation::Chern)?;
        let grid = self.config.grid(self.config.topology.grid)?;
        let field = sample_multiplet(&grid, sys)?;
        let mut report = chern_number(&field)?;
        match boundary_winding(&field) {
            Ok(w) => report.winding_p = Some(w.p),
            Err(e) => self.warnings.push(format!("[boundary winding] {e}")),
        }
        let fraction = if sys.potential().has_vector_potential() {
            self.warnings.push("[fraction bound] not computed: only available for A_P = 0".into());
            None
        } else {
            let b = fraction_bound(sys, field.min_gap, report.p, report.q)?;
            report.admissible = Some(b.admissible);
            if let Some(note) = &b.note {
                self.warnings.push(format!("[fraction bound] {note}"));
            }
            Some(b)
        };
        self.curvature = Some(curvature(&field)?);
        Ok(json!({
            "chern": report,
            "fraction": fraction,
            "minGap": field.min_gap,
            "maxSpread": field.max_spread,
        }))
    }

    fn winding(&mut self) -> Result<Value> {
        let sys = self.landau(Operation::Winding)?;
        let field = sample_multiplet(&self.config.grid(self.config.topology.grid)?, sys)?;
        Ok(to_value(&boundary_winding(&field)?))
    }

    fn index(&mut self) -> Result<Value> {
        let sys = self.landau(Operation::Index)?;
        let field = sample_multiplet(&self.config.grid(self.config.topology.dirac_lattice)?, sys)?;
        let t = &self.config.topology;
        Ok(to_value(&dirac_index(&field, t.wilson_r, t.beta)?))
    }

    fn average(&mut self) -> Result<Value> {
        let sys = self.landau(Operation::Average)?;
        let grid = self.config.grid(self.config.topology.average_grid)?;
        Ok(json!({
            "avgSigmaXY": averaged_sigma(&grid, sys)?,
            "avgGammaXY": averaged_gamma(&grid, sys, Direction::X)?,
            "avgGammaYY": averaged_gamma(&grid, sys, Direction::Y)?,
        }))
    }

    fn scan(&mut self) -> Result<(String, Value)> {
        let scan = self.config.scan.clone().ok_or_else(|| HallError::Config("missing scan table".into()))?;
        let mut rows = Vec::with_capacity(scan.values.len());
        for &value in &scan.values {
            let mut c = self.config.clone();
            c.scan = None;
            c.operations.clear();
            match scan.kind {
                ScanKind::Size => {
                    if value.fract() != 0.0 || value < 2.0 {
                        return Err(HallError::Config(format!("size scan value {value} is not a flux number")));
                    }
                    c.geometry.m = Some(value as usize);
                    c.filling.n = None;
                }
                ScanKind::Filling => {
                    c.filling.nu = Some(value);
                    c.filling.n = None;
                }
                ScanKind::Eta => {
                    c.response.eta = Some(value);
                    c.response.big_t = Some(scan.eta_t.unwrap_or(0.0) / value);
                }
            }
            c.validate()?;
            let model = c.model()?;
            let mut warnings = Vec::new();
            summary(&model, &mut warnings);
            self.warnings.extend(warnings.into_iter().map(|w| format!("{w} (scan value {value})")));
            rows.push(scan_row(&c, &model, value, &scan.quantities)?);
        }
        let label = format!("{:?} scan over {:?} at {}", scan.kind, scan.values, self.phi_label()).to_lowercase();
        let v = to_value(&rows);
        self.scan = Some(rows);
        Ok((label, v))
    }
}

fn scan_row(c: &RunConfig, model: &Model, value: f64, quantities: &[Quantity]) -> Result<ScanRow> {
    let phi = c.response.gauge_point();
    let (m, n, l_max, nu, omega_c) = match model {
        Model::ZeroField(gas) => {
            let g = &gas.basis.geometry;
            (0, gas.n, g.lx.max(g.ly), 0.0, 0.0)
        }
        Model::Landau(sys) => {
            let g = sys.geometry();
            (g.m, sys.particles(), g.lx.max(g.ly), sys.nu(), g.omega_c)
        }
    };
    let mut row = ScanRow { value, m, n, l_max, ..ScanRow::default() };
    let protocol = c.response.protocol()?;
    let needs_response = quantities.iter().any(|q| matches!(q, Quantity::Sigma | Quantity::Gamma | Quantity::Switching));
    if needs_response {
        let response = match model {
            Model::ZeroField(gas) => gas.response(phi)?,
            Model::Landau(sys) => sys.response(phi)?,
        };
        if quantities.contains(&Quantity::Sigma) {
            row.sigma_xy = Some(response.sigma_xy());
        }
        if quantities.contains(&Quantity::Gamma) {
            row.gamma_xy = Some(response.gamma(Direction::X));
            row.gamma_yy = Some(response.gamma(Direction::Y));
        }
        if quantities.contains(&Quantity::Switching) {
            let p = protocol.ok_or_else(|| HallError::Config("switching quantities need eta and T".into()))?;
            row.eta = Some(p.eta);
            row.delta_sigma_xy = Some(response.delta_sigma(Direction::X, &p)?);
            row.delta_sigma_yy = Some(response.delta_sigma(Direction::Y, &p)?);
            row.delta_bound = Some(delta_sigma_bound(nu, omega_c, p.eta, p.big_t));
            if omega_c > 0.0 {
                let period = 2.0 * std::f64::consts::PI / omega_c;
                let mut env: f64 = 0.0;
                for k in 0..ENVELOPE_SAMPLES {
                    let t = p.t + period * k as f64 / ENVELOPE_SAMPLES as f64;
                    let pk = SwitchingProtocol { t, ..p };
                    env = env.max(response.delta_sigma(Direction::X, &pk)?.abs());
                }
                row.delta_envelope = Some(env);
            }
        }
    }
    if quantities.iter().any(|q| matches!(q, Quantity::Chern | Quantity::Winding)) {
        let sys = match model {
            Model::Landau(s) => s,
            Model::ZeroField(_) => return Err(no_bundle(Operation::Scan)),
        };
        let field = sample_multiplet(&c.grid(c.topology.grid)?, sys)?;
        if quantities.contains(&Quantity::Chern) {
            let r = chern_number(&field)?;
            row.chern = Some(r.chern);
            row.q = Some(r.q);
            row.avg_sigma_xy = Some(r.avg_sigma_xy);
        }
        if quantities.contains(&Quantity::Winding) {
            row.winding_p = Some(boundary_winding(&field)?.p);
        }
    }
    Ok(row)
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> HallError {
    HallError::Config(format!("cannot write {}: {e}", path.display()))
}

/// Write `bundle.json` and whichever of `curvature.csv`, `trace.csv` and
/// `scan.csv` the run produced. Returns the written file names.
pub fn write_outputs(output: &RunOutput, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    let path = dir.join("bundle.json");
    let mut text = serde_json::to_string_pretty(&output.bundle).map_err(|e| io_error(&path, e))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    written.push("bundle.json".to_string());

    if let Some(c) = &output.curvature {
        let path = dir.join("curvature.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
        w.write_record(["iPhiX", "iPhiY", "phiX", "phiY", "phase"]).map_err(|e| io_error(&path, e))?;
        for j in 0..c.grid.ny {
            for i in 0..c.grid.nx {
                let p = c.grid.point(i as isize, j as isize);
                let phase = c.plaquette_phase[c.grid.index(i, j)];
                w.serialize((i, j, p.phi_x, p.phi_y, phase)).map_err(|e| io_error(&path, e))?;
            }
        }
        w.flush().map_err(|e| io_error(&path, e))?;
        written.push("curvature.csv".to_string());
    }
    if let Some(t) = &output.trace {
        let path = dir.join("trace.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
        w.write_record(["t", "jx", "jy"]).map_err(|e| io_error(&path, e))?;
        for k in 0..t.times.len() {
            w.serialize((t.times[k], t.jx[k], t.jy[k])).map_err(|e| io_error(&path, e))?;
        }
        w.flush().map_err(|e| io_error(&path, e))?;
        written.push("trace.csv".to_string());
    }
    if let Some(rows) = &output.scan {
        let path = dir.join("scan.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| io_error(&path, e))?;
        }
        w.flush().map_err(|e| io_error(&path, e))?;
        written.push("scan.csv".to_string());
    }
    Ok(written)
}

//! Browser front end for `hallcond`.
//!
//! Three small computations back the static page in `www/`: the low-lying
//! spectrum along a line of gauge points, the Berry-curvature map with its
//! Chern number, and the switching correction `δσ_xy` as the rate `η` is
//! lowered. Each takes a JSON parameter object and returns JSON, so the page
//! needs no bindings beyond strings. The same functions are callable from
//! Rust for testing.

use hallcond::config::{preset, Model, RunConfig};
use hallcond::error::{HallError, Result};
use hallcond::geometry::{Direction, GaugePoint};
use hallcond::response::{delta_sigma_bound, SwitchingProtocol};
use hallcond::system::System;
use hallcond::topology::{boundary_winding, chern_number, curvature, sample_multiplet};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Envelope samples over one cyclotron period.
const ENVELOPE_SAMPLES: usize = 32;

/// Largest flux number accepted from the page.
const MAX_FLUX: usize = 16;

/// Largest Landau-level count accepted from the page.
const MAX_LEVELS: usize = 8;

/// Model parameters shared by all three computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DemoParams {
    /// Flux quanta (even).
    #[serde(rename = "M")]
    pub m: usize,
    /// Number of filled Landau levels.
    pub filling: usize,
    /// Landau levels kept in the basis.
    pub n_max: usize,
    /// Disorder amplitude (0 for the clean system).
    pub disorder: f64,
    /// Disorder seed.
    pub seed: u64,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self { m: 8, filling: 1, n_max: 4, disorder: 0.2, seed: 1 }
    }
}

impl DemoParams {
    /// Run configuration for these parameters.
    pub fn config(&self) -> Result<RunConfig> {
        if self.m > MAX_FLUX || self.n_max > MAX_LEVELS {
            return Err(HallError::Config(format!(
                "the demo is limited to M ≤ {MAX_FLUX} and nMax ≤ {MAX_LEVELS}"
            )));
        }
        if self.filling == 0 || self.filling >= self.n_max {
            return Err(HallError::Config(format!(
                "filling {} needs 1 ≤ filling < nMax = {}",
                self.filling, self.n_max
            )));
        }
        let mut c = preset("disordered-integer")?;
        c.seed = self.seed;
        c.geometry.m = Some(self.m);
        c.filling.nu = Some(self.filling as f64);
        c.filling.n_max = self.n_max;
        match (&mut c.potential.disorder, self.disorder) {
            (_, a) if a == 0.0 => c.potential.disorder = None,
            (Some(d), a) => d.amplitude = a,
            (None, _) => unreachable!("the disordered preset carries a disorder table"),
        }
        c.operations.clear();
        c.validate()?;
        Ok(c)
    }

    fn system(&self) -> Result<(RunConfig, System)> {
        let c = self.config()?;
        match c.model()? {
            Model::Landau(sys) => Ok((c, sys)),
            Model::ZeroField(_) => Err(HallError::Config("the demo needs a magnetic field".into())),
        }
    }
}

/// Lowest eigenvalues along `φ_y = 0`, `φ_x` across one gauge cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumCurve {
    /// Sampled `φ_x`.
    pub phi_x: Vec<f64>,
    /// `levels[k][i]` is the `k`-th eigenvalue at `phi_x[i]`.
    pub levels: Vec<Vec<f64>>,
    /// Number of occupied states.
    #[serde(rename = "N")]
    pub n: usize,
    /// Smallest gap above the occupied states along the line.
    pub min_gap: f64,
}

/// Spectrum of the single-particle Hamiltonian along a line in the gauge cell:
/// the occupied states and `extra` states above them.
pub fn spectrum_curve(params: &DemoParams, samples: usize, extra: usize) -> Result<SpectrumCurve> {
    let (c, sys) = params.system()?;
    let grid = c.grid([samples.max(2), 2])?;
    let n = sys.particles();
    let shown = n + extra;
    let mut phi_x = Vec::with_capacity(grid.nx + 1);
    let mut levels = vec![Vec::with_capacity(grid.nx + 1); shown];
    let mut min_gap = f64::INFINITY;
    for i in 0..=grid.nx {
        let phi = GaugePoint::new(grid.dphi_x * i as f64 / grid.nx as f64, 0.0);
        let (spec, _, _) = sys.spectral(phi)?;
        phi_x.push(phi.phi_x);
        for (k, row) in levels.iter_mut().enumerate() {
            row.push(spec.eigenvalues.get(k).copied().unwrap_or(f64::NAN));
        }
        min_gap = min_gap.min(spec.gap);
    }
    Ok(SpectrumCurve { phi_x, levels, n, min_gap })
}

/// Plaquette phases over the gauge cell and the integers built from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvatureMap {
    /// Plaquettes along `φ_x`.
    pub nx: usize,
    /// Plaquettes along `φ_y`.
    pub ny: usize,
    /// Phase of plaquette `(i, j)` at index `j·nx + i`.
    pub phases: Vec<f64>,
    /// Chern number of the occupied multiplet.
    pub chern: i64,
    /// Boundary winding integer, when the windings are unambiguous.
    pub winding_p: Option<i64>,
    /// `σ_xy` in `e²/h` from the Chern number.
    #[serde(rename = "sigmaXY")]
    pub sigma_xy: f64,
}

/// Berry curvature on an `n × n` gauge grid.
pub fn curvature_map(params: &DemoParams, n: usize) -> Result<CurvatureMap> {
    let (c, sys) = params.system()?;
    let field = sample_multiplet(&c.grid([n, n])?, &sys)?;
    let report = chern_number(&field)?;
    let phases = curvature(&field)?;
    Ok(CurvatureMap {
        nx: phases.grid.nx,
        ny: phases.grid.ny,
        phases: phases.plaquette_phase,
        chern: report.chern,
        winding_p: boundary_winding(&field).ok().map(|w| w.p),
        sigma_xy: report.avg_sigma_xy,
    })
}

/// Switching correction at one rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SwitchingPoint {
    /// Switching rate.
    pub eta: f64,
    /// `δσ_xy` at the configured observation time.
    #[serde(rename = "deltaSigmaXY")]
    pub delta_sigma_xy: f64,
    /// Largest `|δσ_xy|` over one cyclotron period.
    pub envelope: f64,
    /// Analytic bound on `|δσ_xy|`.
    pub bound: f64,
}

/// `δσ_xy` for each rate at fixed `ηT`.
pub fn switching_sweep(params: &DemoParams, etas: &[f64], eta_t: f64) -> Result<Vec<SwitchingPoint>> {
    let (c, sys) = params.system()?;
    let response = sys.response(c.response.gauge_point())?;
    let omega_c = sys.geometry().omega_c;
    let period = 2.0 * std::f64::consts::PI / omega_c;
    etas.iter()
        .map(|&eta| {
            let p = SwitchingProtocol::new(c.response.f, eta, eta_t / eta, c.response.t)?;
            let mut envelope: f64 = 0.0;
            for k in 0..ENVELOPE_SAMPLES {
                let pk = SwitchingProtocol { t: p.t + period * k as f64 / ENVELOPE_SAMPLES as f64, ..p };
                envelope = envelope.max(response.delta_sigma(Direction::X, &pk)?.abs());
            }
            Ok(SwitchingPoint {
                eta,
                delta_sigma_xy: response.delta_sigma(Direction::X, &p)?,
                envelope,
                bound: delta_sigma_bound(sys.nu(), omega_c, eta, eta_t / eta),
            })
        })
        .collect()
}

fn parse(params: &str) -> std::result::Result<DemoParams, JsValue> {
    serde_json::from_str(params).map_err(|e| JsValue::from_str(&format!("bad parameters: {e}")))
}

fn reply<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
        .and_then(|v| serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string())))
}

/// JSON [`SpectrumCurve`] for JSON [`DemoParams`].
#[wasm_bindgen(js_name = spectrumCurve)]
pub fn spectrum_curve_js(params: &str, samples: usize, extra: usize) -> std::result::Result<String, JsValue> {
    reply(spectrum_curve(&parse(params)?, samples, extra))
}

/// JSON [`CurvatureMap`] for JSON [`DemoParams`].
#[wasm_bindgen(js_name = curvatureMap)]
pub fn curvature_map_js(params: &str, n: usize) -> std::result::Result<String, JsValue> {
    reply(curvature_map(&parse(params)?, n))
}

/// JSON list of [`SwitchingPoint`] for JSON [`DemoParams`].
#[wasm_bindgen(js_name = switchingSweep)]
pub fn switching_sweep_js(params: &str, etas: Vec<f64>, eta_t: f64) -> std::result::Result<String, JsValue> {
    reply(switching_sweep(&parse(params)?, &etas, eta_t))
}

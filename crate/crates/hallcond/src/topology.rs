//! Berry-bundle topology of the ground frame over the gauge torus: link
//! variables, the Chern number, boundary windings, gauge averages, the
//! fraction bound and the lattice Dirac index.
//!
//! Frames are sampled on the `nX × nY` grid of the fundamental cell. Links
//! across the cell boundary compare a frame with the large-gauge image of the
//! frame on the opposite edge, so every quantity is built from overlaps in
//! one Hilbert space.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::geometry::{Direction, GaugeGrid, GaugePoint, PLANCK};
use crate::operators::{hermitian_eigen, CMat};
use crate::system::{Frame, System};

/// Links with smaller determinant modulus are rejected as ambiguous.
pub const MIN_LINK_DET: f64 = 0.1;

/// Ground frames on a gauge grid with the link matrices between neighbours.
#[derive(Debug, Clone)]
pub struct MultipletField {
    /// The grid.
    pub grid: GaugeGrid,
    /// Frames in grid order (`grid.index(i, j)`).
    pub frames: Vec<Frame>,
    /// `⟨Φ(i,j)|Φ(i+1,j)⟩`, the last column using the wrapped frame.
    pub link_x: Vec<CMat>,
    /// `⟨Φ(i,j)|Φ(i,j+1)⟩`, the last row using the wrapped frame.
    pub link_y: Vec<CMat>,
    /// Multiplet dimension.
    pub q: usize,
    /// Smallest gap over the grid.
    pub min_gap: f64,
    /// Largest multiplet spread over the grid.
    pub max_spread: f64,
}

fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Frames and links on `grid`.
pub fn sample_multiplet(grid: &GaugeGrid, system: &System) -> Result<MultipletField> {
    let points: Vec<(usize, GaugePoint)> = grid.points().into_iter().enumerate().collect();
    let frames: Vec<Result<Frame>> = par_map(points, |(_, p)| system.frame(p));
    let mut failures = Vec::new();
    let mut ok = Vec::with_capacity(frames.len());
    for f in frames {
        match f {
            Ok(f) => ok.push(f),
            Err(HallError::GapViolation { phi_x, phi_y, .. }) => failures.push((phi_x, phi_y)),
            Err(e) => return Err(e),
        }
    }
    if !failures.is_empty() {
        return Err(HallError::GapViolation {
            phi_x: failures[0].0,
            phi_y: failures[0].1,
            message: format!("gap closes at {} grid point(s): {:?}", failures.len(), failures),
        });
    }
    let frames = ok;
    let (nx, ny) = (grid.nx, grid.ny);
    let neighbour = |i: usize, j: usize, s: Direction| -> Frame {
        match s {
            Direction::X if i + 1 == nx => system.wrap(&frames[grid.index(0, j)], Direction::X),
            Direction::X => frames[grid.index(i + 1, j)].clone(),
            Direction::Y if j + 1 == ny => system.wrap(&frames[grid.index(i, 0)], Direction::Y),
            Direction::Y => frames[grid.index(i, j + 1)].clone(),
        }
    };
    let sites: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    let links: Vec<(CMat, CMat)> = par_map(sites, |(i, j)| {
        let here = &frames[grid.index(i, j)];
        (system.link(here, &neighbour(i, j, Direction::X)), system.link(here, &neighbour(i, j, Direction::Y)))
    });
    let (link_x, link_y) = links.into_iter().unzip();
    let min_gap = frames.iter().map(|f| f.gap).fold(f64::INFINITY, f64::min);
    let max_spread = frames.iter().map(|f| f.spread).fold(0.0, f64::max);
    Ok(MultipletField { grid: grid.clone(), frames, link_x, link_y, q: system.q(), min_gap, max_spread })
}

impl MultipletField {
    /// Link matrix from `(i, j)` in direction `s`, periodic in both indices.
    pub fn link(&self, i: usize, j: usize, s: Direction) -> &CMat {
        let k = self.grid.index(i % self.grid.nx, j % self.grid.ny);
        match s {
            Direction::X => &self.link_x[k],
            Direction::Y => &self.link_y[k],
        }
    }

    /// Re-mix every frame by a unitary, as a gauge-invariance probe: links
    /// transform as `L → g_a† L g_b`.
    pub fn remixed(&self, gauges: &[CMat]) -> Self {
        let mut out = self.clone();
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = self.grid.index(i, j);
                let kx = self.grid.index((i + 1) % nx, j);
                let ky = self.grid.index(i, (j + 1) % ny);
                out.link_x[k] = gauges[k].adjoint() * &self.link_x[k] * &gauges[kx];
                out.link_y[k] = gauges[k].adjoint() * &self.link_y[k] * &gauges[ky];
            }
        }
        out
    }
}

/// Plaquette phases and link determinants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvatureField {
    /// Grid.
    pub grid: GaugeGrid,
    /// Argument of the oriented product of unit link determinants, per
    /// plaquette, in `(−π, π]`.
    pub plaquette_phase: Vec<f64>,
    /// Unit-modulus link determinants along x.
    pub link_dets_x: Vec<Complex64>,
    /// Unit-modulus link determinants along y.
    pub link_dets_y: Vec<Complex64>,
    /// Smallest raw determinant modulus.
    pub min_link_modulus: f64,
}

/// Chern-number summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChernReport {
    /// First Chern number `ℐ`.
    pub chern: i64,
    /// Multiplet dimension.
    pub q: usize,
    /// `ℐ/q` in `e²/h`.
    #[serde(rename = "avgSigmaXY")]
    pub avg_sigma_xy: f64,
    /// `p = −ℐ`.
    pub p: i64,
    /// `p` from the boundary windings, when computed.
    pub winding_p: Option<i64>,
    /// Fraction-bound admissibility, when computed.
    pub admissible: Option<bool>,
    /// `|Σ phases/2π − ℐ|`.
    pub residual: f64,
    /// Smallest raw link determinant modulus.
    pub min_link_modulus: f64,
}

/// Curvature from link determinants.
pub fn curvature(field: &MultipletField) -> Result<CurvatureField> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let mut min_mod = f64::INFINITY;
    let mut unit = |m: &CMat| {
        let d = m.determinant();
        min_mod = min_mod.min(d.norm());
        d / d.norm()
    };
    let dx: Vec<Complex64> = field.link_x.iter().map(&mut unit).collect();
    let dy: Vec<Complex64> = field.link_y.iter().map(&mut unit).collect();
    if min_mod < MIN_LINK_DET {
        return Err(HallError::GridTooCoarse(format!(
            "link determinant modulus {min_mod:.3e} below {MIN_LINK_DET} on a {nx}×{ny} grid"
        )));
    }
    let mut phases = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let k = field.grid.index(i, j);
            let kx = field.grid.index((i + 1) % nx, j);
            let ky = field.grid.index(i, (j + 1) % ny);
            let w = dx[k] * dy[kx] * dx[ky].conj() * dy[k].conj();
            phases.push(w.arg());
        }
    }
    Ok(CurvatureField { grid: field.grid.clone(), plaquette_phase: phases, link_dets_x: dx, link_dets_y: dy, min_link_modulus: min_mod })
}

/// First Chern number `ℐ = (1/2π) Σ plaquette phases`.
pub fn chern_number(field: &MultipletField) -> Result<ChernReport> {
    let c = curvature(field)?;
    let total: f64 = c.plaquette_phase.iter().sum::<f64>() / (2.0 * PI);
    let chern = total.round() as i64;
    let residual = (total - chern as f64).abs();
    if residual > 1e-6 {
        return Err(HallError::GridTooCoarse(format!("plaquette sum {total} is not an integer")));
    }
    Ok(ChernReport {
        chern,
        q: field.q,
        avg_sigma_xy: chern as f64 / field.q as f64,
        p: -chern,
        winding_p: None,
        admissible: None,
        residual,
        min_link_modulus: c.min_link_modulus,
    })
}

/// Unitary polar factor `L (L†L)^{-1/2}`.
pub fn polar_unitary(l: &CMat) -> CMat {
    let svd = l.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Boundary windings `θ^(x)`, `θ^(y)` and the integer `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WindingReport {
    /// `p = −(1/2π)[θx(ΔφY) − θx(0) − θy(ΔφX) + θy(0)]`.
    pub p: i64,
    /// Continuous branch of `arg det C^(x)` along the right edge.
    pub theta_x: Vec<f64>,
    /// Continuous branch of `arg det C^(y)` along the top edge.
    pub theta_y: Vec<f64>,
    /// Largest branch step encountered.
    pub max_step: f64,
}

/// Largest accepted jump of `arg det` between neighbouring edge points. A
/// principal argument never exceeds π, so the cutoff sits below it.
pub const MAX_BRANCH_STEP: f64 = 0.75 * PI;

/// Boundary winding from transition matrices in a parallel-transport gauge.
///
/// Frames on the closed `(nX+1) × (nY+1)` grid are rotated so that every link
/// along the bottom row and up every column is positive Hermitian. The
/// transition matrices `C^(x)(φy)`, `C^(y)(φx)` then relate the rotated frames
/// on opposite edges, and `θ = arg det C` is tracked continuously.
pub fn boundary_winding(field: &MultipletField) -> Result<WindingReport> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let q = field.link_x[0].nrows();
    // g[i][j] for i in 0..=nx, j in 0..=ny.
    let mut g = vec![vec![CMat::identity(q, q); ny + 1]; nx + 1];
    for i in 0..nx {
        let u = polar_unitary(field.link(i, 0, Direction::X));
        g[i + 1][0] = u.adjoint() * &g[i][0];
    }
    for (i, col) in g.iter_mut().enumerate() {
        for j in 0..ny {
            let u = polar_unitary(field.link(i % nx, j, Direction::Y));
            col[j + 1] = u.adjoint() * &col[j];
        }
    }
    let unwrap = |dets: Vec<Complex64>| -> (Vec<f64>, f64) {
        let mut out = Vec::with_capacity(dets.len());
        let mut max_step: f64 = 0.0;
        let mut acc = dets[0].arg();
        out.push(acc);
        for w in dets.windows(2) {
            let step = (w[1] / w[0]).arg();
            max_step = max_step.max(step.abs());
            acc += step;
            out.push(acc);
        }
        (out, max_step)
    };
    let cx: Vec<Complex64> = (0..=ny).map(|j| (g[0][j].adjoint() * &g[nx][j]).determinant()).collect();
    let cy: Vec<Complex64> = (0..=nx).map(|i| (g[i][0].adjoint() * &g[i][ny]).determinant()).collect();
    let (theta_x, sx) = unwrap(cx);
    let (theta_y, sy) = unwrap(cy);
    let max_step = sx.max(sy);
    if max_step > MAX_BRANCH_STEP {
        return Err(HallError::GridTooCoarse(format!(
            "boundary phase step {max_step:.3} exceeds 3π/4; refine the edge resolution"
        )));
    }
    let raw = -((theta_x[ny] - theta_x[0]) - (theta_y[nx] - theta_y[0])) / (2.0 * PI);
    Ok(WindingReport { p: raw.round() as i64, theta_x, theta_y, max_step })
}

/// Gauge average of `γ_sy` (in `e²/h` per unit time) by the trapezoid rule
/// on the periodic grid.
pub fn averaged_gamma(grid: &GaugeGrid, system: &System, s: Direction) -> Result<f64> {
    let values: Vec<Result<f64>> = par_map(grid.points(), |p| Ok(system.response(p)?.gamma(s)));
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / grid.len() as f64)
}

/// Gauge average of `σ_xy` (in `e²/h`) by the trapezoid rule on the grid.
pub fn averaged_sigma(grid: &GaugeGrid, system: &System) -> Result<f64> {
    let values: Vec<Result<f64>> = par_map(grid.points(), |p| Ok(system.response(p)?.sigma_xy()));
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / grid.len() as f64)
}

/// Admissible interval for the fraction `p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FractionBoundReport {
    /// `δ = 2ℓ⁴ ω_c/ΔE³ · max‖D²W‖²∞`.
    pub delta: f64,
    /// Filling `ν`.
    pub nu: f64,
    /// `ν(1 − δ)`.
    pub lower: f64,
    /// `ν(1 + δ)`.
    pub upper: f64,
    /// `(p, q)`.
    pub p_over_q: (i64, usize),
    /// `lower ≤ p/q ≤ upper`.
    pub admissible: bool,
    /// Set when the interval also contains an integer.
    pub note: Option<String>,
}

/// Fraction bound for `A_P = 0`.
pub fn fraction_bound(system: &System, gap: f64, p: i64, q: usize) -> Result<FractionBoundReport> {
    let pot = system.potential();
    if pot.has_vector_potential() {
        return Err(HallError::Hypothesis(
            "the fraction bound is only available for A_P = 0".into(),
        ));
    }
    let g = system.geometry();
    let norms = pot.sampled_norms(g, crate::potential::NORM_GRID);
    let ell4 = g.ell_b.powi(4);
    let delta = 2.0 * ell4 * g.omega_c / gap.powi(3) * norms.d2_w * norms.d2_w;
    let nu = system.nu();
    let (lower, upper) = (nu * (1.0 - delta), nu * (1.0 + delta));
    let frac = p as f64 / q as f64;
    let tol = 1e-12;
    let admissible = lower - tol <= frac && frac <= upper + tol;
    let contains_integer = lower.ceil() <= upper && delta > 0.0;
    Ok(FractionBoundReport {
        delta,
        nu,
        lower,
        upper,
        p_over_q: (p, q),
        admissible,
        note: contains_integer.then(|| "bound uninformative: the interval contains an integer".into()),
    })
}

/// Heat-kernel index of the lattice Dirac operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiracIndexReport {
    /// Sites per direction `(nX, nY)`.
    pub lattice_size: (usize, usize),
    /// Wilson parameter.
    pub wilson_r: f64,
    /// Heat-kernel parameter.
    pub beta: f64,
    /// Nearest integer to `Tr σz e^{−βH}`.
    pub index: i64,
    /// `Tr σz e^{−βH}`.
    pub trace: f64,
    /// `Tr σz e^{−2βH}`.
    pub trace_double_beta: f64,
    /// `|Tr σz e^{−βH} − index|`.
    pub residual: f64,
    /// Chern number of the same links.
    pub chern_target: i64,
}

/// Wilson–Dirac operator `D_W = Σ_s [σ_s (∇⁺_s + ∇⁻_s)/2 − (r a_s/2) Δ_s]` on
/// the gauge-torus lattice with unitary links. Site `(i, j)`, spin `σ` and
/// colour `c` have index `((j·nX + i)·2 + σ)·q + c`.
pub fn wilson_dirac(field: &MultipletField, wilson_r: f64) -> CMat {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let (ax, ay) = field.grid.spacing();
    let q = field.link_x[0].nrows();
    let dim = nx * ny * 2 * q;
    let mut d = CMat::zeros(dim, dim);
    let one = Complex64::new(1.0, 0.0);
    let i1 = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    // σx, σy as 2×2 arrays.
    let sigma = [[[zero, one], [one, zero]], [[zero, -i1], [i1, zero]]];
    let idx = |i: usize, j: usize, s: usize, c: usize| ((j * nx + i) * 2 + s) * q + c;
    for j in 0..ny {
        for i in 0..nx {
            for (dir, a) in [(0usize, ax), (1usize, ay)] {
                let (fi, fj) = if dir == 0 { ((i + 1) % nx, j) } else { (i, (j + 1) % ny) };
                let (bi, bj) = if dir == 0 { ((i + nx - 1) % nx, j) } else { (i, (j + ny - 1) % ny) };
                let dir_e = if dir == 0 { Direction::X } else { Direction::Y };
                let uf = polar_unitary(field.link(i, j, dir_e));
                let ub = polar_unitary(field.link(bi, bj, dir_e)).adjoint();
                for s in 0..2 {
                    for t in 0..2 {
                        let sg = sigma[dir][s][t];
                        for c in 0..q {
                            for e in 0..q {
                                // Symmetric difference (U ψ(x+a) − U† ψ(x−a))/(2a).
                                let fwd = sg * uf[(c, e)] / (2.0 * a);
                                let bwd = -sg * ub[(c, e)] / (2.0 * a);
                                d[(idx(i, j, s, c), idx(fi, fj, t, e))] += fwd;
                                d[(idx(i, j, s, c), idx(bi, bj, t, e))] += bwd;
                            }
                        }
                    }
                    // Wilson term −(r a/2)(Uψ(x+a) − 2ψ + U†ψ(x−a))/a².
                    let w = wilson_r / (2.0 * a);
                    for c in 0..q {
                        d[(idx(i, j, s, c), idx(i, j, s, c))] += Complex64::new(2.0 * w, 0.0);
                        for e in 0..q {
                            d[(idx(i, j, s, c), idx(fi, fj, s, e))] -= w * uf[(c, e)];
                            d[(idx(i, j, s, c), idx(bi, bj, s, e))] -= w * ub[(c, e)];
                        }
                    }
                }
            }
        }
    }
    d
}

/// Default heat-kernel parameter: half the gauge-cell area.
pub fn default_beta(field: &MultipletField) -> f64 {
    let (ax, ay) = field.grid.spacing();
    0.5 * (ax * field.grid.nx as f64) * (ay * field.grid.ny as f64)
}

/// Index `Tr σz e^{−βH}` with `H = D_W† D_W`, by a dense spectral sum, with a
/// consistency evaluation at `2β`.
pub fn dirac_index(field: &MultipletField, wilson_r: f64, beta: Option<f64>) -> Result<DiracIndexReport> {
    let beta = beta.unwrap_or_else(|| default_beta(field));
    let d = wilson_dirac(field, wilson_r);
    let h = d.adjoint() * &d;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, vecs) = hermitian_eigen(&h);
    let q = field.link_x[0].nrows();
    let dim = vals.len();
    let chirality: Vec<f64> = (0..dim)
        .map(|k| {
            let col = vecs.column(k);
            (0..dim)
                .map(|r| {
                    let s = (r / q) % 2;
                    let w = col[r].norm_sqr();
                    if s == 0 {
                        w
                    } else {
                        -w
                    }
                })
                .sum()
        })
        .collect();
    let trace_at = |b: f64| -> f64 { vals.iter().zip(&chirality).map(|(l, c)| (-b * l).exp() * c).sum() };
    let trace = trace_at(beta);
    let trace2 = trace_at(2.0 * beta);
    let index = trace.round() as i64;
    let residual = (trace - index as f64).abs();
    let chern = chern_number(field)?.chern;
    if residual > 0.1 || (trace - trace2).abs() > 0.1 {
        return Err(HallError::LatticeTooCoarse(format!(
            "heat-kernel trace {trace:.4} (β) vs {trace2:.4} (2β) is not a stable integer"
        )));
    }
    Ok(DiracIndexReport {
        lattice_size: (field.grid.nx, field.grid.ny),
        wilson_r,
        beta,
        index,
        trace,
        trace_double_beta: trace2,
        residual,
        chern_target: chern,
    })
}

/// Pointwise Hall conductance average weighted by `1/q`, used by consistency
/// checks between the Kubo and link routes.
pub fn sigma_from_chern(report: &ChernReport) -> f64 {
    report.avg_sigma_xy
}

/// Natural-unit value of a conductance given in `e²/h`.
pub fn to_natural(value: f64) -> f64 {
    value / PLANCK
}

//! Gap scaling near second-order boundaries and phase-diagram rasters.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bogoliubov::spectrum_at;
use crate::error::{Error, Result};
use crate::meanfield::{classify_solution, minimize_energy, minimize_energy_seeded, refine, SolverOptions};
use crate::model::{MeanFieldConfiguration, PhaseLabel, RingParameters};
use crate::normal::{classify_theta, critical_coupling, phase_boundaries};
use crate::observables::{ring_current, subring_currents};

/// Minimum distance, in units of π, from a first-order flux boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-3;
/// Least number of points a power-law fit accepts.
pub const MIN_FIT_POINTS: usize = 8;

/// Which side of `g₁c` a gap curve approaches from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

/// Log-spaced reduced couplings `δ = |g₁/g₁c − 1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for ReducedGrid {
    fn default() -> Self {
        Self {
            min: 1e-4,
            max: 1e-2,
            points: 16,
        }
    }
}

impl ReducedGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "reduced window",
                reason: format!("need 0 < min < max, got [{min}, {max}]"),
            });
        }
        if points < 2 {
            return Err(Error::InvalidParameter {
                name: "reduced points",
                reason: format!("need at least 2, got {points}"),
            });
        }
        Ok(Self { min, max, points })
    }

    /// Ascending values of `δ`.
    pub fn deltas(&self) -> Vec<f64> {
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let step = (hi - lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.min,
                _ if i + 1 == self.points => self.max,
                _ => (lo + step * i as f64).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    pub g1: f64,
    pub delta: f64,
    pub gap: f64,
}

/// Lowest excitation energy along a line of `g₁` at fixed flux.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCurve {
    pub theta: f64,
    pub side: Side,
    pub g1c: f64,
    /// Softest normal-phase momentum index `|m|`.
    pub momentum: usize,
    /// Sorted by increasing `g₁`.
    pub points: Vec<GapPoint>,
}

fn angular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Rejects fluxes too close to a first-order boundary, where the softest
/// momentum is ambiguous.
pub fn check_boundary_margin(params: &RingParameters) -> Result<()> {
    for b in phase_boundaries(params.sites, params.hop_over_omega())? {
        if angular_distance(params.theta, b) <= BOUNDARY_MARGIN * PI {
            return Err(Error::NearFirstOrderBoundary {
                theta: params.theta,
                boundary: b,
                margin: BOUNDARY_MARGIN * PI,
            });
        }
    }
    Ok(())
}

/// Gap `ε₁` on a log grid of reduced couplings on one side of `g₁c`.
///
/// Below threshold the gap is that of the vacuum. Above, the mean field is
/// found by a full multi-start search at the largest `δ` and then followed
/// towards `g₁c` by refining the previous minimum.
pub fn gap_curve(params: &RingParameters, side: Side, grid: &ReducedGrid, options: &SolverOptions) -> Result<GapCurve> {
    params.validate()?;
    check_boundary_margin(params)?;
    let class = classify_theta(params)?;
    let g1c = critical_coupling(params, class.momentum(params.sites))?;
    let deltas = grid.deltas();
    let mut points = Vec::with_capacity(deltas.len());
    match side {
        Side::Below => {
            let vacuum = MeanFieldConfiguration::zeros(params.sites);
            for &delta in &deltas {
                let g1 = g1c * (1.0 - delta);
                let gap = spectrum_at(&params.with_g1(g1), &vacuum)?.gap();
                points.push(GapPoint { g1, delta, gap });
            }
        }
        Side::Above => {
            let mut previous: Option<MeanFieldConfiguration> = None;
            for &delta in deltas.iter().rev() {
                let g1 = g1c * (1.0 + delta);
                let p = params.with_g1(g1);
                let config = match &previous {
                    None => minimize_energy(&p, options)?
                        .global()
                        .ok_or(Error::SolverFailure {
                            g1,
                            reason: "no minimum found".into(),
                        })?
                        .config
                        .clone(),
                    Some(seed) => {
                        let r = refine(&p, seed, options)?;
                        if !r.is_minimum() {
                            return Err(Error::SolverFailure {
                                g1,
                                reason: format!(
                                    "continuation lost the minimum (residual {:e}, curvature {:e})",
                                    r.residual_norm, r.min_curvature
                                ),
                            });
                        }
                        r.config
                    }
                };
                let spectrum = spectrum_at(&p, &config)?;
                points.push(GapPoint {
                    g1,
                    delta,
                    gap: spectrum.gap(),
                });
                previous = Some(config);
            }
            points.reverse();
        }
    }
    if side == Side::Below {
        points.reverse();
    }
    Ok(GapCurve {
        theta: params.theta,
        side,
        g1c,
        momentum: class.abs_momenta[0],
        points,
    })
}

/// Least-squares power law `ε₁ = e^{c} δ^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub gamma: f64,
    pub log_prefactor: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln ε₁` against `ln δ` over every positive point of the curve.
pub fn fit_exponent(curve: &GapCurve) -> Result<ScalingFit> {
    fit_exponent_in(curve, 0.0, f64::INFINITY)
}

/// [`fit_exponent`] restricted to `δ ∈ [lo, hi]`.
pub fn fit_exponent_in(curve: &GapCurve, lo: f64, hi: f64) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.delta >= lo && p.delta <= hi && p.gap > 0.0 && p.gap.is_finite())
        .map(|p| (p.delta.ln(), p.gap.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            required: MIN_FIT_POINTS,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let gamma = sxy / sxx;
    let intercept = my - gamma * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - gamma * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let xs = pts.iter().map(|p| p.0.exp());
    let window = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(0.0, f64::max));
    Ok(ScalingFit {
        gamma,
        log_prefactor: intercept,
        window,
        r_squared,
        points: pts.len(),
    })
}

/// One cell of a `(θ, g₁)` raster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCell {
    pub theta: f64,
    pub g1: f64,
    pub label: PhaseLabel,
    /// Set when the solver failed at this cell; the numbers are then NaN.
    pub failure: Option<String>,
    pub a4: f64,
    pub b2: f64,
    pub current: f64,
    pub i135: f64,
    pub i246: f64,
    /// Number of degenerate ground states.
    pub degeneracy: usize,
}

/// Picks the ground state with the largest `A₄` so that neighbouring cells
/// report the same member of a degenerate family.
fn canonical(states: &[MeanFieldConfiguration]) -> Option<&MeanFieldConfiguration> {
    let key = |c: &MeanFieldConfiguration| c.a.get(3).copied().unwrap_or(c.a[0]);
    states.iter().reduce(|best, c| if key(c) > key(best) + 1e-9 { c } else { best })
}

fn failed_cell(theta: f64, g1: f64, reason: String) -> PhaseCell {
    PhaseCell {
        theta,
        g1,
        label: PhaseLabel::Unknown,
        failure: Some(reason),
        a4: f64::NAN,
        b2: f64::NAN,
        current: f64::NAN,
        i135: f64::NAN,
        i246: f64::NAN,
        degeneracy: 0,
    }
}

fn column(params: &RingParameters, theta: f64, g1_grid: &[f64], options: &SolverOptions) -> Vec<PhaseCell> {
    let mut seeds: Vec<MeanFieldConfiguration> = Vec::new();
    let mut cells = Vec::with_capacity(g1_grid.len());
    for &g1 in g1_grid {
        let p = params.with_theta(theta).with_g1(g1);
        let result = minimize_energy_seeded(&p, options, &seeds);
        let cell = match result {
            Err(e) => failed_cell(theta, g1, e.to_string()),
            Ok(res) => {
                let ground: Vec<MeanFieldConfiguration> = res.ground_states().iter().map(|r| r.config.clone()).collect();
                match canonical(&ground) {
                    None => failed_cell(theta, g1, "no minimum found".into()),
                    Some(c) => {
                        let (i135, i246) = subring_currents(c).unwrap_or((f64::NAN, f64::NAN));
                        let cell = PhaseCell {
                            theta,
                            g1,
                            label: classify_solution(&p, c),
                            failure: None,
                            a4: c.a.get(3).copied().unwrap_or(f64::NAN),
                            b2: c.b.get(1).copied().unwrap_or(f64::NAN),
                            current: ring_current(c),
                            i135,
                            i246,
                            degeneracy: ground.len(),
                        };
                        seeds = ground;
                        cell
                    }
                }
            }
        };
        cells.push(cell);
    }
    cells
}

/// Rasterizes the `(θ, g₁)` plane, ordered by `θ` then `g₁`.
///
/// Columns of fixed `θ` run in parallel; within a column each cell is seeded
/// with the ground states of the previous `g₁`. Cells where the solver fails
/// are reported in-band.
pub fn phase_diagram(
    params: &RingParameters,
    theta_grid: &[f64],
    g1_grid: &[f64],
    options: &SolverOptions,
) -> Result<Vec<PhaseCell>> {
    params.validate()?;
    if theta_grid.is_empty() || g1_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "phase-diagram grids must be nonempty".into(),
        });
    }
    let inner = SolverOptions {
        parallel: false,
        ..options.clone()
    };
    let columns: Vec<Vec<PhaseCell>> = if options.parallel {
        theta_grid.par_iter().map(|&t| column(params, t, g1_grid, &inner)).collect()
    } else {
        theta_grid.iter().map(|&t| column(params, t, g1_grid, &inner)).collect()
    };
    Ok(columns.into_iter().flatten().collect())
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

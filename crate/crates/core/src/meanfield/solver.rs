//! Multi-start search for all local minima of the energy functional.

use nalgebra::{DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::branches::{closed_form_afsr, closed_form_fsr, fsr_amplitude, solve_csr_pattern, CsrVariant};
use super::classify::{classify_solution, PATTERN_TOLERANCE};
use super::{ground_energy, residual_jacobian, stationarity_residuals};
use crate::error::Result;
use crate::model::{symmetry_orbit, MeanFieldConfiguration, PhaseLabel, RingParameters};

/// Tuning knobs of [`minimize_energy`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Uniform random starts in addition to the closed-form branches.
    pub random_starts: usize,
    pub seed: u64,
    /// Convergence threshold on the max-norm of the residuals.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings allowed per Newton iteration.
    pub max_halvings: usize,
    /// Relative energy window within which minima count as degenerate.
    pub degeneracy_tolerance: f64,
    /// Curvature floor for the modified Newton step.
    pub curvature_floor: f64,
    /// Refine independent starts on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            random_starts: 64,
            seed: 0,
            tolerance: 1e-12,
            max_iterations: 200,
            max_halvings: 30,
            degeneracy_tolerance: 1e-10,
            curvature_floor: 1e-8,
            parallel: true,
        }
    }
}

/// Where a start point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartOrigin {
    Vacuum,
    Ferro,
    AntiFerro,
    Chiral { variant: CsrVariant },
    Continuation { index: usize },
    Random { index: usize },
    /// Symmetry image of the minimum reached from another start.
    Image { source: usize, shift: usize, flipped: bool },
}

/// One distinct local minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    pub config: MeanFieldConfiguration,
    pub energy: f64,
    pub residual_norm: f64,
    pub label: PhaseLabel,
    pub iterations: usize,
    pub origin: StartOrigin,
}

/// All minima found by [`minimize_energy`], global minimum first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizationResult {
    pub minima: Vec<SolverReport>,
    /// Number of refined starts (including symmetry images).
    pub starts: usize,
    /// Starts that did not converge or converged to a saddle.
    pub dropped: usize,
    pub degeneracy_tolerance: f64,
}

impl MinimizationResult {
    pub fn global(&self) -> Option<&SolverReport> {
        self.minima.first()
    }

    /// Minima degenerate with the global minimum.
    pub fn ground_states(&self) -> &[SolverReport] {
        let Some(best) = self.global() else {
            return &[];
        };
        let window = self.degeneracy_tolerance * best.energy.abs().max(1.0);
        let count = self
            .minima
            .iter()
            .take_while(|r| r.energy - best.energy <= window)
            .count();
        &self.minima[..count]
    }

    pub fn degeneracy(&self) -> usize {
        self.ground_states().len()
    }

    /// Distinct labels among the ground states, ignoring chirality.
    pub fn ground_labels(&self) -> Vec<PhaseLabel> {
        let mut labels: Vec<PhaseLabel> = Vec::new();
        for r in self.ground_states() {
            if !labels.iter().any(|l| l.same_kind(&r.label)) {
                labels.push(r.label);
            }
        }
        labels
    }
}

/// Outcome of a single damped Newton refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub config: MeanFieldConfiguration,
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
    /// Smallest eigenvalue of the residual Jacobian at the final point.
    pub min_curvature: f64,
}

impl Refinement {
    pub fn is_minimum(&self) -> bool {
        self.converged && self.min_curvature >= -1e-8
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Damped Newton iteration on the stationarity residuals.
///
/// The Newton matrix has its eigenvalues replaced by their absolute values
/// (floored at `curvature_floor`), so away from minima the step still
/// descends in energy. A step is accepted if it satisfies the Armijo
/// condition on the energy or reduces the squared residual norm; otherwise it
/// is halved, up to `max_halvings` times.
pub fn refine(params: &RingParameters, start: &MeanFieldConfiguration, options: &SolverOptions) -> Result<Refinement> {
    start.check_sites(params)?;
    let mut x = start.clone();
    let mut r = stationarity_residuals(params, &x)?;
    let mut energy = ground_energy(params, &x)?;
    let mut iterations = 0;

    while max_norm(&r) >= options.tolerance && iterations < options.max_iterations {
        iterations += 1;
        let eig = SymmetricEigen::new(residual_jacobian(params, &x)?);
        let rv = DVector::from_column_slice(&r);
        let coeffs = eig.eigenvectors.transpose() * &rv;
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(c, l)| -c / l.abs().max(options.curvature_floor)),
        );
        let step: Vec<f64> = (&eig.eigenvectors * scaled).iter().copied().collect();
        let slope = 2.0 * r.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
        let flat = x.to_flat();
        let current = sq_norm(&r);

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial_flat: Vec<f64> = flat.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let trial = MeanFieldConfiguration::from_flat(&trial_flat);
            let e = ground_energy(params, &trial)?;
            let rt = stationarity_residuals(params, &trial)?;
            if e <= energy + 1e-4 * t * slope || sq_norm(&rt) < current {
                accepted = Some((trial, rt, e));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt, e)) => {
                x = trial;
                r = rt;
                energy = e;
            }
            None => break,
        }
    }

    let residual_norm = max_norm(&r);
    let min_curvature = SymmetricEigen::new(residual_jacobian(params, &x)?)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(Refinement {
        config: x,
        iterations,
        residual_norm,
        converged: residual_norm < options.tolerance,
        min_curvature,
    })
}

fn closed_form_starts(params: &RingParameters) -> Vec<(StartOrigin, MeanFieldConfiguration)> {
    let mut starts = vec![(StartOrigin::Vacuum, MeanFieldConfiguration::zeros(params.sites))];
    if let Some(c) = closed_form_fsr(params) {
        starts.push((StartOrigin::Ferro, c));
    }
    if let Ok(Some(c)) = closed_form_afsr(params) {
        starts.push((StartOrigin::AntiFerro, c));
    }
    if params.sites == 6 {
        for variant in [CsrVariant::I, CsrVariant::II] {
            if let Ok(Some(c)) = solve_csr_pattern(params, variant) {
                starts.push((StartOrigin::Chiral { variant }, c));
            }
        }
    }
    let mut with_images = Vec::new();
    for (origin, c) in starts {
        for member in symmetry_orbit(&c) {
            with_images.push((origin, member));
        }
    }
    with_images
}

fn random_starts(params: &RingParameters, options: &SolverOptions) -> Vec<(StartOrigin, MeanFieldConfiguration)> {
    let scale = fsr_amplitude(params)
        .filter(|&a| a > 0.0)
        .unwrap_or_else(|| (params.delta / params.omega).sqrt());
    let bound = 1.2 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    (0..options.random_starts)
        .map(|index| {
            let flat: Vec<f64> = (0..2 * params.sites).map(|_| rng.random_range(-bound..=bound)).collect();
            (StartOrigin::Random { index }, MeanFieldConfiguration::from_flat(&flat))
        })
        .collect()
}

fn refine_all(
    params: &RingParameters,
    starts: &[(StartOrigin, MeanFieldConfiguration)],
    options: &SolverOptions,
) -> Result<Vec<Refinement>> {
    if options.parallel {
        starts.par_iter().map(|(_, c)| refine(params, c, options)).collect()
    } else {
        starts.iter().map(|(_, c)| refine(params, c, options)).collect()
    }
}

fn dedup_tolerance(c: &MeanFieldConfiguration) -> f64 {
    PATTERN_TOLERANCE * c.max_abs().max(1.0)
}

/// Multi-start minimization of the mean-field energy.
pub fn minimize_energy(params: &RingParameters, options: &SolverOptions) -> Result<MinimizationResult> {
    minimize_energy_seeded(params, options, &[])
}

/// [`minimize_energy`] with extra start points, e.g. minima at a neighbouring
/// parameter value.
pub fn minimize_energy_seeded(
    params: &RingParameters,
    options: &SolverOptions,
    seeds: &[MeanFieldConfiguration],
) -> Result<MinimizationResult> {
    params.validate()?;
    let mut starts = closed_form_starts(params);
    for (index, s) in seeds.iter().enumerate() {
        s.check_sites(params)?;
        starts.push((StartOrigin::Continuation { index }, s.clone()));
    }
    starts.extend(random_starts(params, options));

    let refined = refine_all(params, &starts, options)?;
    let mut total = starts.len();
    let mut dropped = 0;
    let mut found: Vec<(StartOrigin, Refinement)> = Vec::new();
    let push_unique = |found: &mut Vec<(StartOrigin, Refinement)>, origin, r: Refinement| {
        let tol = dedup_tolerance(&r.config);
        if !found.iter().any(|(_, f)| f.config.approx_eq(&r.config, tol)) {
            found.push((origin, r));
        }
    };
    for ((origin, _), r) in starts.iter().zip(refined) {
        if r.is_minimum() {
            push_unique(&mut found, *origin, r);
        } else {
            dropped += 1;
        }
    }

    // Symmetry images of every minimum are minima too; make sure none is missed.
    let mut images = Vec::new();
    for (source, (_, r)) in found.iter().enumerate() {
        let n = r.config.sites();
        for flipped in [false, true] {
            for shift in 0..n {
                let mut member = r.config.shifted(shift);
                if flipped {
                    member = member.negated();
                }
                let tol = dedup_tolerance(&member);
                let known = found.iter().any(|(_, f)| f.config.approx_eq(&member, tol))
                    || images.iter().any(|(_, m): &(StartOrigin, MeanFieldConfiguration)| m.approx_eq(&member, tol));
                if !known {
                    images.push((StartOrigin::Image { source, shift, flipped }, member));
                }
            }
        }
    }
    total += images.len();
    for ((origin, _), r) in images.iter().zip(refine_all(params, &images, options)?) {
        if r.is_minimum() {
            push_unique(&mut found, *origin, r);
        } else {
            dropped += 1;
        }
    }

    let mut minima = found
        .into_iter()
        .map(|(origin, r)| {
            Ok(SolverReport {
                energy: ground_energy(params, &r.config)?,
                label: classify_solution(params, &r.config),
                residual_norm: r.residual_norm,
                iterations: r.iterations,
                origin,
                config: r.config,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_minima(&mut minima, options.degeneracy_tolerance);

    Ok(MinimizationResult {
        minima,
        starts: total,
        dropped,
        degeneracy_tolerance: options.degeneracy_tolerance,
    })
}

/// Orders by energy; runs of degenerate minima are ordered lexicographically
/// by configuration so the output does not depend on start order.
fn sort_minima(minima: &mut [SolverReport], rel_tol: f64) {
    minima.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    let mut start = 0;
    while start < minima.len() {
        let anchor = minima[start].energy;
        let window = rel_tol * anchor.abs().max(1.0);
        let end = start + minima[start..].iter().take_while(|r| r.energy - anchor <= window).count();
        minima[start..end].sort_by(|x, y| x.config.lexicographic_cmp(&y.config));
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quick() -> SolverOptions {
        SolverOptions {
            random_starts: 16,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn refine_converges_from_nearby_point() {
        let p = RingParameters::default().with_theta(0.9 * PI).with_g1(0.7);
        let target = closed_form_fsr(&p).unwrap();
        let start = MeanFieldConfiguration::real(target.a.iter().map(|a| a * 1.1).collect());
        let r = refine(&p, &start, &quick()).unwrap();
        assert!(r.is_minimum());
        assert!(r.config.approx_eq(&target, 1e-9));
    }

    #[test]
    fn below_threshold_only_vacuum() {
        for theta in [0.0, 0.3 * PI, 0.49 * PI, 0.9 * PI, -0.6 * PI] {
            let p = RingParameters::default().with_theta(theta).with_g1(0.4);
            let res = minimize_energy(&p, &quick()).unwrap();
            assert_eq!(res.minima.len(), 1);
            assert_eq!(res.minima[0].label, PhaseLabel::Normal);
        }
    }

    #[test]
    fn ferro_is_doubly_degenerate() {
        let p = RingParameters::default().with_theta(0.9 * PI).with_g1(0.7);
        let res = minimize_energy(&p, &quick()).unwrap();
        assert_eq!(res.degeneracy(), 2);
        assert!(res.ground_states().iter().all(|r| r.label == PhaseLabel::Ferro));
    }

    #[test]
    fn result_is_independent_of_parallelism() {
        let p = RingParameters::default().with_theta(0.49 * PI).with_g1(0.7);
        let par = minimize_energy(&p, &quick()).unwrap();
        let seq = minimize_energy(&p, &SolverOptions { parallel: false, ..quick() }).unwrap();
        assert_eq!(par, seq);
    }
}

//! Displaced-frame energy functional and its stationary points.
//!
//! Each cavity mode is displaced by `α_n = A_n + iB_n`. After projecting onto
//! the lower qubit state the remaining classical energy is
//!
//! ```text
//! E_g = Σ_n ω|α_n|² − Δ_n/2 + J α_n*(e^{iθ} α_{n+1} + e^{−iθ} α_{n−1}),
//! Δ_n = √(Δ² + 16 g² A_n²).
//! ```
//!
//! The residuals returned by [`stationarity_residuals`] are half of the
//! gradient of `E_g`; their zeros are the stationary points.

mod branches;
mod classify;
mod solver;

pub use branches::{closed_form_afsr, closed_form_csr, closed_form_fsr, fsr_amplitude, solve_csr_pattern, CsrVariant};
pub use classify::{classify_solution, match_csr_pattern, CsrPatternMatch, PATTERN_TOLERANCE};
pub use solver::{
    minimize_energy, minimize_energy_seeded, refine, MinimizationResult, Refinement, SolverOptions, SolverReport,
    StartOrigin,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{MeanFieldConfiguration, RingParameters};

/// Per-site quantities of the displaced frame: `Δ_n`, `λ_n = gΔ/Δ_n` and
/// `χ_n = λ_n²/Δ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSiteQuantities {
    pub delta_n: Vec<f64>,
    pub lambda_n: Vec<f64>,
    pub chi_n: Vec<f64>,
}

impl EffectiveSiteQuantities {
    pub fn new(params: &RingParameters, a: &[f64]) -> Self {
        let g = params.bare_coupling();
        let delta_n: Vec<f64> = a
            .iter()
            .map(|&an| (params.delta * params.delta + 16.0 * g * g * an * an).sqrt())
            .collect();
        let lambda_n: Vec<f64> = delta_n.iter().map(|&dn| g * params.delta / dn).collect();
        let chi_n = lambda_n.iter().zip(&delta_n).map(|(l, d)| l * l / d).collect();
        Self {
            delta_n,
            lambda_n,
            chi_n,
        }
    }
}

#[inline]
fn next(n: usize, sites: usize) -> usize {
    (n + 1) % sites
}

#[inline]
fn prev(n: usize, sites: usize) -> usize {
    (n + sites - 1) % sites
}

/// Mean-field ground-state energy `E_g` of a configuration.
///
/// # Panics
///
/// If the hopping sum acquires an imaginary part, which would mean the
/// neighbour indexing is broken.
pub fn ground_energy(params: &RingParameters, config: &MeanFieldConfiguration) -> Result<f64> {
    config.check_sites(params)?;
    let n = params.sites;
    let alpha: Vec<Complex64> = config
        .a
        .iter()
        .zip(&config.b)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    let phase = Complex64::from_polar(1.0, params.theta);
    let sites = EffectiveSiteQuantities::new(params, &config.a);

    let mut onsite = 0.0;
    let mut hopping = Complex64::new(0.0, 0.0);
    for i in 0..n {
        onsite += params.omega * alpha[i].norm_sqr() - sites.delta_n[i] / 2.0;
        hopping += alpha[i].conj() * (phase * alpha[next(i, n)] + phase.conj() * alpha[prev(i, n)]);
    }
    let hopping = hopping * params.hop;
    let energy = onsite + hopping.re;
    assert!(
        hopping.im.abs() < 1e-10 * (1.0 + energy.abs()),
        "hopping energy has imaginary part {}",
        hopping.im
    );
    Ok(energy)
}

/// Stationarity conditions: the `A`-equations (first `N` entries) and the
/// `B`-equations (last `N` entries). Equal to half the gradient of `E_g`.
pub fn stationarity_residuals(params: &RingParameters, config: &MeanFieldConfiguration) -> Result<Vec<f64>> {
    config.check_sites(params)?;
    let n = params.sites;
    let (a, b) = (&config.a, &config.b);
    let g2 = params.bare_coupling().powi(2);
    let (w, jc, js) = (params.omega, params.hop * params.theta.cos(), params.hop * params.theta.sin());
    let sites = EffectiveSiteQuantities::new(params, a);

    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let (p, m) = (next(i, n), prev(i, n));
        out[i] = w * a[i] - 4.0 * g2 * a[i] / sites.delta_n[i] + jc * (a[p] + a[m]) + js * (b[m] - b[p]);
        out[n + i] = w * b[i] + js * (a[p] - a[m]) + jc * (b[p] + b[m]);
    }
    Ok(out)
}

/// Jacobian of [`stationarity_residuals`] (half the Hessian of `E_g`).
pub fn residual_jacobian(params: &RingParameters, config: &MeanFieldConfiguration) -> Result<DMatrix<f64>> {
    config.check_sites(params)?;
    let n = params.sites;
    let (w, jc, js) = (params.omega, params.hop * params.theta.cos(), params.hop * params.theta.sin());
    let sites = EffectiveSiteQuantities::new(params, &config.a);

    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (p, m) = (next(i, n), prev(i, n));
        h[(i, i)] += w - 4.0 * sites.chi_n[i];
        h[(i, p)] += jc;
        h[(i, m)] += jc;
        h[(i, n + m)] += js;
        h[(i, n + p)] -= js;

        h[(n + i, n + i)] += w;
        h[(n + i, n + p)] += jc;
        h[(n + i, n + m)] += jc;
        h[(n + i, p)] += js;
        h[(n + i, m)] -= js;
    }
    Ok(h)
}

fn require_hexagon(params: &RingParameters, len: usize) -> Result<()> {
    if params.sites != 6 {
        return Err(Error::UnsupportedSiteCount {
            required: "6",
            found: params.sites,
        });
    }
    if len != 6 {
        return Err(Error::SiteCountMismatch { expected: 6, found: len });
    }
    Ok(())
}

fn hexagon_denominator(params: &RingParameters) -> Result<f64> {
    let jc = params.hop * params.theta.cos();
    let den = params.omega * params.omega - jc * jc;
    if den.abs() <= 1e-12 {
        return Err(Error::SingularDenominator {
            context: "hexagon B elimination",
            theta: params.theta,
            hop: params.hop,
            momentum: f64::NAN,
        });
    }
    Ok(den)
}

/// Eliminates `B` on the hexagon: the unique solution of the `B`-equations
/// for given `A`.
pub fn b_from_a(params: &RingParameters, a: &[f64]) -> Result<Vec<f64>> {
    require_hexagon(params, a.len())?;
    let den = hexagon_denominator(params)?;
    let (w, jc, js) = (params.omega, params.hop * params.theta.cos(), params.hop * params.theta.sin());
    let at = |i: isize| a[i.rem_euclid(6) as usize];
    Ok((0..6isize)
        .map(|i| -js * (w * (at(i + 1) - at(i - 1)) + jc * (at(i - 2) - at(i + 2))) / den)
        .collect())
}

/// Linear (hopping-induced) part of the reduced `A`-equations.
fn reduced_linear(params: &RingParameters, a: &[f64], den: f64) -> [f64; 6] {
    let (w, jc, js) = (params.omega, params.hop * params.theta.cos(), params.hop * params.theta.sin());
    let at = |i: isize| a[i.rem_euclid(6) as usize];
    let mut out = [0.0; 6];
    for (i, slot) in out.iter_mut().enumerate() {
        let i = i as isize;
        *slot = jc * (at(i + 1) + at(i - 1))
            - js * js / den
                * (w * (2.0 * at(i) - at(i - 2) - at(i + 2)) + jc * (2.0 * at(i + 3) - at(i + 1) - at(i - 1)));
    }
    out
}

/// `A`-equations on the hexagon after substituting [`b_from_a`].
pub fn reduced_residual(params: &RingParameters, a: &[f64]) -> Result<Vec<f64>> {
    require_hexagon(params, a.len())?;
    let den = hexagon_denominator(params)?;
    let g2 = params.bare_coupling().powi(2);
    let sites = EffectiveSiteQuantities::new(params, a);
    let linear = reduced_linear(params, a, den);
    Ok((0..6)
        .map(|i| a[i] * (params.omega - 4.0 * g2 / sites.delta_n[i]) + linear[i])
        .collect())
}

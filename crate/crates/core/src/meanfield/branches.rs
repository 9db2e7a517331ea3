//! Closed-form and pattern-reduced superradiant branches.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{b_from_a, hexagon_denominator, reduced_linear, require_hexagon, EffectiveSiteQuantities};
use crate::error::{Error, Result};
use crate::model::{MeanFieldConfiguration, RingParameters};
use crate::normal::hexagon_boundaries_closed_form;

const NEWTON_TOLERANCE: f64 = 1e-12;
const NEWTON_MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 30;

/// Uniform amplitude `(1/4g₁)√(Δ/ω)√(16g₁⁴/(1 + 2J cosθ/ω)² − 1)`, or `None`
/// below the ferro threshold.
pub fn fsr_amplitude(params: &RingParameters) -> Option<f64> {
    branch_amplitude(params, 1.0)
}

fn branch_amplitude(params: &RingParameters, sign: f64) -> Option<f64> {
    let c = 1.0 + sign * 2.0 * params.hop_over_omega() * params.theta.cos();
    if params.g1 <= 0.0 || c <= 0.0 {
        return None;
    }
    let g1sq = params.g1 * params.g1;
    let radicand = 16.0 * g1sq * g1sq / (c * c) - 1.0;
    // Rounding can push the radicand just below zero exactly at threshold.
    let radicand = if radicand < 0.0 && radicand > -1e-13 { 0.0 } else { radicand };
    if radicand < 0.0 {
        return None;
    }
    Some((params.delta / params.omega).sqrt() * radicand.sqrt() / (4.0 * params.g1))
}

/// Uniform ferro branch (`+` sign, `B = 0`), `None` below threshold.
pub fn closed_form_fsr(params: &RingParameters) -> Option<MeanFieldConfiguration> {
    fsr_amplitude(params).map(|a| MeanFieldConfiguration::real(vec![a; params.sites]))
}

/// Staggered branch `A_n = (−1)ⁿ a` (sites counted from 1), `None` at or below
/// threshold. Rejects odd rings.
pub fn closed_form_afsr(params: &RingParameters) -> Result<Option<MeanFieldConfiguration>> {
    if params.sites % 2 != 0 {
        return Err(Error::UnsupportedSiteCount {
            required: "even",
            found: params.sites,
        });
    }
    Ok(branch_amplitude(params, -1.0).filter(|&a| a > 0.0).map(|a| {
        let amps = (0..params.sites)
            .map(|i| if i % 2 == 0 { -a } else { a })
            .collect();
        MeanFieldConfiguration::real(amps)
    }))
}

/// The two chiral patterns of the hexagon.
///
/// * `I`: `A₁ = A₄`, `A₂ = A₃ = A₅ = A₆`, `B₁ = B₄ = 0`, `B₂ = −B₃ = B₅ = −B₆`.
/// * `II`: `A₁ = −A₄`, `A₂ = −A₃ = −A₅ = A₆`, `B₁ = B₄ = 0`, `B₂ = B₃ = −B₅ = −B₆`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CsrVariant {
    I,
    II,
}

impl CsrVariant {
    /// `A` on all six sites from the two free amplitudes.
    pub fn expand(self, a1: f64, a2: f64) -> [f64; 6] {
        match self {
            CsrVariant::I => [a1, a2, a2, a1, a2, a2],
            CsrVariant::II => [a1, a2, -a2, -a1, -a2, a2],
        }
    }

    /// `B` on all six sites from `B₂`.
    pub fn expand_b(self, b2: f64) -> [f64; 6] {
        match self {
            CsrVariant::I => [0.0, b2, -b2, 0.0, b2, -b2],
            CsrVariant::II => [0.0, b2, b2, 0.0, -b2, -b2],
        }
    }

    /// Momentum index `|m|` of the chiral condensate.
    pub fn momentum_index(self) -> usize {
        match self {
            CsrVariant::I => 2,
            CsrVariant::II => 1,
        }
    }

    pub fn from_momentum_index(m: usize) -> Option<Self> {
        match m {
            2 => Some(CsrVariant::I),
            1 => Some(CsrVariant::II),
            _ => None,
        }
    }

    /// `(lower, upper)` bounds of `|θ|` for this variant.
    pub fn window(self, hop_over_omega: f64) -> (f64, f64) {
        let b = hexagon_boundaries_closed_form(hop_over_omega);
        match self {
            CsrVariant::I => (b[3], PI / 2.0),
            CsrVariant::II => (PI / 2.0, b[5]),
        }
    }

    fn name(self) -> &'static str {
        match self {
            CsrVariant::I => "CSR I",
            CsrVariant::II => "CSR II",
        }
    }
}

/// Chiral branch of the hexagon inside its flux window.
///
/// Fails with [`Error::OutsideWindow`] when `|θ|` is outside the window of
/// `variant`; otherwise behaves like [`solve_csr_pattern`].
pub fn closed_form_csr(params: &RingParameters, variant: CsrVariant) -> Result<Option<MeanFieldConfiguration>> {
    require_hexagon(params, 6)?;
    let (lower, upper) = variant.window(params.hop_over_omega());
    let t = params.theta.abs();
    if t < lower - 1e-12 || t > upper + 1e-12 {
        return Err(Error::OutsideWindow {
            window: variant.name(),
            theta: params.theta,
            lower,
            upper,
        });
    }
    solve_csr_pattern(params, variant)
}

/// Solves the reduced `A`-equations restricted to the pattern of `variant`
/// for `(A₁, A₂)` by damped Newton, with `B` from [`b_from_a`].
///
/// Returns `None` when every seed collapses onto the vacuum or onto the
/// ferro/antiferro sub-pattern contained in the variant. No flux window check.
pub fn solve_csr_pattern(params: &RingParameters, variant: CsrVariant) -> Result<Option<MeanFieldConfiguration>> {
    require_hexagon(params, 6)?;
    let den = hexagon_denominator(params)?;
    let scale = fsr_amplitude(params)
        .filter(|&a| a > 1e-3)
        .unwrap_or_else(|| (params.delta / params.omega).sqrt() / 2.0);
    let seeds = match variant {
        CsrVariant::I => [(scale, -scale), (scale, -0.5 * scale)],
        CsrVariant::II => [(scale, scale), (scale, 0.5 * scale)],
    };

    for (a1, a2) in seeds {
        let (a1, a2) = pattern_newton(params, variant, den, a1, a2)?;
        let trivial = a1.abs().max(a2.abs()) < 1e-8;
        let collapsed = match variant {
            CsrVariant::I => (a1 - a2).abs() < 1e-8,
            CsrVariant::II => (a1 + a2).abs() < 1e-8,
        };
        if trivial || collapsed {
            continue;
        }
        let a = variant.expand(a1, a2).to_vec();
        let b = b_from_a(params, &a)?;
        return Ok(Some(MeanFieldConfiguration { a, b }));
    }
    Ok(None)
}

fn pattern_system(params: &RingParameters, variant: CsrVariant, den: f64, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let a = variant.expand(x[0], x[1]);
    let g2 = params.bare_coupling().powi(2);
    let sites = EffectiveSiteQuantities::new(params, &a);
    let linear = reduced_linear(params, &a, den);
    let basis = [variant.expand(1.0, 0.0), variant.expand(0.0, 1.0)];
    let lin_basis = [reduced_linear(params, &basis[0], den), reduced_linear(params, &basis[1], den)];

    let mut f = [0.0; 2];
    let mut jac = [[0.0; 2]; 2];
    for i in 0..2 {
        f[i] = a[i] * (params.omega - 4.0 * g2 / sites.delta_n[i]) + linear[i];
        let onsite = params.omega - 4.0 * sites.chi_n[i];
        for j in 0..2 {
            jac[i][j] = onsite * basis[j][i] + lin_basis[j][i];
        }
    }
    (f, jac)
}

fn pattern_newton(params: &RingParameters, variant: CsrVariant, den: f64, a1: f64, a2: f64) -> Result<(f64, f64)> {
    let norm2 = |f: [f64; 2]| f[0] * f[0] + f[1] * f[1];
    let mut x = [a1, a2];
    let (mut f, mut jac) = pattern_system(params, variant, den, x);
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if f[0].abs().max(f[1].abs()) < NEWTON_TOLERANCE {
            return Ok((x[0], x[1]));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let current = norm2(f);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = [x[0] + t * step[0], x[1] + t * step[1]];
            let (ft, jt) = pattern_system(params, variant, den, trial);
            if norm2(ft) < current {
                accepted = Some((trial, ft, jt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xt, ft, jt)) => {
                x = xt;
                f = ft;
                jac = jt;
            }
            None => break,
        }
    }
    if f[0].abs().max(f[1].abs()) < NEWTON_TOLERANCE {
        return Ok((x[0], x[1]));
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX_ITERATIONS,
        residual: f[0].abs().max(f[1].abs()),
        last: x.to_vec(),
    })
}

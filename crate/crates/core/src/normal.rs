//! Closed-form normal-phase diagnostics.
//!
//! In the normal phase the ring is diagonal in momentum space. Each allowed
//! momentum `k = 2πm/N` softens at its own critical coupling, and the mode that
//! softens first selects which superradiant phase appears at a given flux.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Chirality, PhaseLabel, RingParameters};

/// Relative gap below which two momenta are treated as degenerate.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Uniform flux samples on `[0, π)` used to bracket boundaries.
pub const THETA_SCAN_POINTS: usize = 2001;

/// Bisection stops once the bracket is narrower than this (radians).
pub const BISECTION_TOLERANCE: f64 = 1e-9;

/// Allowed momenta of an `N`-site ring.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    sites: usize,
}

impl MomentumGrid {
    pub fn new(sites: usize) -> Self {
        Self { sites }
    }

    /// Momentum for index `m`, reduced to `(−π, π]`.
    pub fn momentum(&self, m: usize) -> f64 {
        let n = self.sites;
        let m = m % n;
        if 2 * m <= n {
            2.0 * PI * m as f64 / n as f64
        } else {
            -2.0 * PI * (n - m) as f64 / n as f64
        }
    }

    /// All `N` momenta in index order `m = 0 … N−1`.
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.sites).map(|m| self.momentum(m)).collect()
    }

    /// Distinct `|m|` classes, `0 ≤ |m| ≤ N/2`.
    pub fn abs_indices(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.sites / 2
    }
}

/// Bare dispersion `ω_k = ω(1 − 2g₁²) + 2J cos(θ − k)`.
pub fn dispersion(params: &RingParameters, k: f64) -> f64 {
    params.omega * (1.0 - 2.0 * params.g1 * params.g1) + 2.0 * params.hop * (params.theta - k).cos()
}

/// Normal-phase excitation energy at momentum `k`.
///
/// Returns `None` when the radicand is negative, i.e. the vacuum is not a
/// stable ground state at these parameters. Radicands that are negative only
/// by rounding are clamped to zero.
pub fn np_excitation(params: &RingParameters, k: f64) -> Option<f64> {
    let wk = dispersion(params, k);
    let wmk = dispersion(params, -k);
    let sum = wk + wmk;
    let g1sq = params.g1 * params.g1;
    let radicand = sum * sum - 16.0 * params.omega * params.omega * g1sq * g1sq;
    let radicand = if radicand < 0.0 && radicand > -1e-13 * sum * sum {
        0.0
    } else {
        radicand
    };
    if radicand < 0.0 {
        return None;
    }
    Some(0.5 * (radicand.sqrt() + wk - wmk))
}

/// Coupling at which the normal-phase mode at momentum `k` softens.
///
/// Returns `f64::INFINITY` when the mode never softens (negative ratio,
/// reachable only for very large `J/ω`).
pub fn critical_coupling(params: &RingParameters, k: f64) -> Result<f64> {
    let j = params.hop_over_omega();
    let theta = params.theta;
    let j_plus = j * (theta + k).cos();
    let j_minus = j * (theta - k).cos();
    let mixed = j * theta.cos() * k.cos();
    let den = 1.0 + 2.0 * mixed;
    if den.abs() < 1e-14 {
        return Err(Error::SingularDenominator {
            context: "critical coupling",
            theta,
            hop: params.hop,
            momentum: k,
        });
    }
    let ratio = (1.0 + 4.0 * mixed + 4.0 * j_plus * j_minus) / den;
    if ratio < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * ratio.sqrt())
}

/// Outcome of [`classify_theta`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaClassification {
    /// Minimizing `|m|` values; more than one only at a degenerate boundary.
    pub abs_momenta: Vec<usize>,
    /// `g₁c` of the softest mode.
    pub critical_coupling: f64,
    /// One label per entry of `abs_momenta`.
    pub labels: Vec<PhaseLabel>,
}

impl ThetaClassification {
    pub fn is_degenerate(&self) -> bool {
        self.abs_momenta.len() > 1
    }

    /// The unique label, if the flux is not on a boundary.
    pub fn label(&self) -> Option<PhaseLabel> {
        (!self.is_degenerate()).then(|| self.labels[0])
    }

    /// Softest momentum `k* ≥ 0` (the smallest `|m|` when degenerate).
    pub fn momentum(&self, sites: usize) -> f64 {
        2.0 * PI * self.abs_momenta[0] as f64 / sites as f64
    }
}

/// Which superradiant phase the normal phase gives way to at this flux.
///
/// `g1` is ignored. Since `g₁c(k) = g₁c(−k)`, chiral phases are reported with
/// [`Chirality::Either`].
pub fn classify_theta(params: &RingParameters) -> Result<ThetaClassification> {
    if !(params.hop > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hop",
            reason: format!("flux classification needs J > 0, got {}", params.hop),
        });
    }
    let grid = MomentumGrid::new(params.sites);
    let couplings = grid
        .abs_indices()
        .map(|m| critical_coupling(params, grid.momentum(m)).map(|g| (m, g)))
        .collect::<Result<Vec<_>>>()?;
    let best = couplings.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min);
    let abs_momenta: Vec<usize> = couplings
        .iter()
        .filter(|&&(_, g)| g - best <= TIE_TOLERANCE * best.max(1.0))
        .map(|&(m, _)| m)
        .collect();
    let labels = abs_momenta
        .iter()
        .map(|&m| PhaseLabel::from_momentum(m, params.sites, Chirality::Either))
        .collect();
    Ok(ThetaClassification {
        abs_momenta,
        critical_coupling: best,
        labels,
    })
}

/// Softest `|m|` with ties broken towards the smaller index; bracketing helper.
fn softest_index(params: &RingParameters) -> Result<usize> {
    Ok(classify_theta(params)?.abs_momenta[0])
}

fn scan_params(sites: usize, hop_over_omega: f64) -> RingParameters {
    RingParameters {
        sites,
        omega: 1.0,
        hop: hop_over_omega,
        ..RingParameters::default()
    }
}

fn scan_thetas() -> impl Iterator<Item = f64> {
    (0..THETA_SCAN_POINTS).map(|i| PI * i as f64 / THETA_SCAN_POINTS as f64)
}

/// Closed-form hexagon boundaries `{±π/2} ∪ {±cos⁻¹[∓(ω − √(ω² + 8J²))/(4J)]}`,
/// sorted ascending.
pub fn hexagon_boundaries_closed_form(hop_over_omega: f64) -> Vec<f64> {
    let j = hop_over_omega;
    let x = (1.0 - (1.0 + 8.0 * j * j).sqrt()) / (4.0 * j);
    let positive = [(-x).acos(), PI / 2.0, x.acos()];
    let mut all: Vec<f64> = positive.iter().map(|t| -t).chain(positive).collect();
    all.sort_by(f64::total_cmp);
    all
}

/// Boundaries located by scanning `[0, π)` for switches of the softest momentum
/// and bisecting each bracket, mirrored to negative flux. Sorted ascending.
pub fn phase_boundaries_numeric(sites: usize, hop_over_omega: f64) -> Result<Vec<f64>> {
    let base = scan_params(sites, hop_over_omega);
    let class_at = |theta: f64| softest_index(&base.with_theta(theta));

    let thetas: Vec<f64> = scan_thetas().collect();
    let classes = thetas.iter().map(|&t| class_at(t)).collect::<Result<Vec<_>>>()?;

    let mut positive = Vec::new();
    for i in 1..thetas.len() {
        if classes[i] == classes[i - 1] {
            continue;
        }
        let (mut lo, mut hi) = (thetas[i - 1], thetas[i]);
        let left = classes[i - 1];
        while hi - lo > BISECTION_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if class_at(mid)? == left {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        positive.push(0.5 * (lo + hi));
    }
    let mut all: Vec<f64> = positive.iter().map(|t| -t).chain(positive.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Flux values separating superradiant phases, both signs, sorted ascending.
///
/// The hexagon uses the closed form; other ring sizes are located numerically.
pub fn phase_boundaries(sites: usize, hop_over_omega: f64) -> Result<Vec<f64>> {
    if sites < 3 || !(hop_over_omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "N/hop",
            reason: format!("need N >= 3 and J/omega > 0, got N = {sites}, J/omega = {hop_over_omega}"),
        });
    }
    if sites == 6 {
        Ok(hexagon_boundaries_closed_form(hop_over_omega))
    } else {
        phase_boundaries_numeric(sites, hop_over_omega)
    }
}

/// Number of distinct superradiant phase kinds for `θ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseCensus {
    pub sites: usize,
    pub chiral: usize,
    pub ferro: usize,
    pub antiferro: usize,
}

/// Counts phase kinds by sweeping the flux and collecting the softest momenta.
pub fn phase_census(sites: usize, hop_over_omega: f64) -> Result<PhaseCensus> {
    let base = scan_params(sites, hop_over_omega);
    base.validate()?;
    let mut seen = vec![false; sites / 2 + 1];
    for theta in scan_thetas() {
        let class = classify_theta(&base.with_theta(theta))?;
        if !class.is_degenerate() {
            seen[class.abs_momenta[0]] = true;
        }
    }
    let mut census = PhaseCensus {
        sites,
        chiral: 0,
        ferro: 0,
        antiferro: 0,
    };
    for (m, _) in seen.iter().enumerate().filter(|(_, &s)| s) {
        match PhaseLabel::from_momentum(m, sites, Chirality::Either) {
            PhaseLabel::Ferro => census.ferro += 1,
            PhaseLabel::AntiFerro => census.antiferro += 1,
            _ => census.chiral += 1,
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(hop: f64, theta: f64, g1: f64) -> RingParameters {
        RingParameters::default().with_hop(hop).with_theta(theta).with_g1(g1)
    }

    #[test]
    fn grid_membership() {
        for n in 3..=12 {
            let ks = MomentumGrid::new(n).momenta();
            assert_eq!(ks[0], 0.0);
            assert_eq!(ks.iter().any(|&k| (k - PI).abs() < 1e-15), n % 2 == 0);
            for &k in &ks {
                assert!(k > -PI && k <= PI);
                assert!(ks.iter().any(|&q| ((q + k).rem_euclid(2.0 * PI)).min(2.0 * PI - (q + k).rem_euclid(2.0 * PI)) < 1e-12));
            }
        }
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(&params(0.0, 0.3, 0.0), 1.1), 1.0);
        assert!((dispersion(&params(0.05, 0.0, 0.0), 0.0) - 1.1).abs() < 1e-15);
        // 1 - 2(0.09) + 2(0.05)cos(0)
        assert!((dispersion(&params(0.05, PI / 2.0, 0.3), PI / 2.0) - 0.92).abs() < 1e-14);
    }

    #[test]
    fn excitation_without_coupling_is_dispersion() {
        for m in 0..6 {
            let k = MomentumGrid::new(6).momentum(m);
            let p = params(0.05, 0.37, 0.0);
            assert!((np_excitation(&p, k).unwrap() - dispersion(&p, k)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_cavity_gap_closes_at_one_half() {
        let p = params(0.0, 0.0, 0.5);
        assert!(np_excitation(&p, 0.0).unwrap().abs() < 1e-10);
        assert!(np_excitation(&p.with_g1(0.4999), 0.0).unwrap() > 0.0);
        assert!(np_excitation(&p.with_g1(0.51), 0.0).is_none());
    }

    #[test]
    fn ferro_critical_point() {
        let p = params(0.05, PI, 0.0);
        let gc = critical_coupling(&p, 0.0).unwrap();
        assert!((gc - 0.5 * (0.81_f64 / 0.9).sqrt()).abs() < 1e-15);
        assert!((gc - (1.0_f64 - 0.1).sqrt() / 2.0).abs() < 1e-15);
        assert!((gc - 0.474342).abs() < 1e-6);
        assert!(np_excitation(&p.with_g1(gc), 0.0).unwrap() < 1e-6);
    }

    #[test]
    fn isolated_cavity_threshold() {
        for &theta in &[-2.0, 0.0, 0.7, PI] {
            for m in 0..6 {
                let k = MomentumGrid::new(6).momentum(m);
                assert_eq!(critical_coupling(&params(0.0, theta, 0.0), k).unwrap(), 0.5);
            }
        }
    }

    #[test]
    fn chiral_one_wins_below_half_pi() {
        let p = params(0.05, 0.49 * PI, 0.0);
        let g_two = critical_coupling(&p, 2.0 * PI / 3.0).unwrap();
        let g_one = critical_coupling(&p, PI / 3.0).unwrap();
        assert!((g_two - 0.49772).abs() < 1e-5, "{g_two}");
        assert!((g_one - 0.49853).abs() < 1e-5, "{g_one}");
        assert!(g_two < g_one);
    }

    #[test]
    fn singular_denominator_is_reported() {
        let p = params(0.5, 0.0, 0.0);
        assert!(matches!(
            critical_coupling(&p, PI),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn flux_classification_examples() {
        let class = |t: f64| classify_theta(&params(0.05, t, 0.0)).unwrap();
        assert_eq!(class(0.9 * PI).label(), Some(PhaseLabel::Ferro));
        assert_eq!(class(0.1 * PI).label(), Some(PhaseLabel::AntiFerro));
        let csr = class(0.49 * PI);
        assert_eq!(csr.abs_momenta, vec![2]);
        assert!((csr.momentum(6) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(class(PI / 2.0).is_degenerate());
        assert!(classify_theta(&params(0.0, 0.3, 0.0)).is_err());
    }

    #[test]
    fn hexagon_boundary_values() {
        let b = hexagon_boundaries_closed_form(0.05);
        let expected = [-0.516, -0.5, -0.484, 0.484, 0.5, 0.516];
        for (got, want) in b.iter().zip(expected) {
            assert!((got / PI - want).abs() < 1e-3, "{got}");
        }
    }

    #[test]
    fn square_ring_has_two_positive_boundaries() {
        let b = phase_boundaries(4, 0.05).unwrap();
        assert_eq!(b.iter().filter(|&&t| t > 0.0).count(), 2);
    }

    #[test]
    fn census_small_rings() {
        let c = phase_census(6, 0.05).unwrap();
        assert_eq!((c.chiral, c.ferro, c.antiferro), (2, 1, 1));
        let c = phase_census(3, 0.05).unwrap();
        assert_eq!((c.chiral, c.ferro, c.antiferro), (1, 1, 0));
        let c = phase_census(7, 0.05).unwrap();
        assert_eq!((c.chiral, c.ferro, c.antiferro), (3, 1, 0));
    }
}

//! Parameter space, configurations and phase labels shared by every solver.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Componentwise tolerance used when collapsing symmetry-related configurations.
pub const ORBIT_TOLERANCE: f64 = 1e-9;

/// Physical inputs of the ring.
///
/// `g1` is the scaled coupling `g/√(Δω)`; the bare coupling is derived on
/// demand by [`RingParameters::bare_coupling`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingParameters {
    /// Number of cavities `N`.
    pub sites: usize,
    /// Cavity frequency `ω`; the energy unit.
    pub omega: f64,
    /// Qubit splitting `Δ`.
    pub delta: f64,
    /// Hopping amplitude `J`.
    pub hop: f64,
    /// Flux phase per link `θ`, in radians.
    pub theta: f64,
    /// Scaled coupling `g₁`.
    pub g1: f64,
}

impl Default for RingParameters {
    /// Hexagonal ring with `Δ/ω = 50`, `J/ω = 0.05`, `ω = 1`.
    fn default() -> Self {
        Self {
            sites: 6,
            omega: 1.0,
            delta: 50.0,
            hop: 0.05,
            theta: 0.0,
            g1: 0.0,
        }
    }
}

impl RingParameters {
    pub fn new(sites: usize, omega: f64, delta: f64, hop: f64, theta: f64, g1: f64) -> Result<Self> {
        let params = Self {
            sites,
            omega,
            delta,
            hop,
            theta,
            g1,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: impl Into<String>) -> Result<()> {
            Err(Error::InvalidParameter {
                name,
                reason: reason.into(),
            })
        }
        if self.sites < 3 {
            return bad("N", format!("need at least 3 cavities, got {}", self.sites));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return bad("omega", format!("must be positive, got {}", self.omega));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad("delta", format!("must be positive, got {}", self.delta));
        }
        if !self.hop.is_finite() {
            return bad("hop", "must be finite");
        }
        if !(self.g1.is_finite() && self.g1 >= 0.0) {
            return bad("g1", format!("must be non-negative, got {}", self.g1));
        }
        if !(self.theta.is_finite() && self.theta.abs() <= PI + 1e-12) {
            return bad("theta", format!("must lie in [-pi, pi], got {}", self.theta));
        }
        Ok(())
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn with_g1(self, g1: f64) -> Self {
        Self { g1, ..self }
    }

    pub fn with_sites(self, sites: usize) -> Self {
        Self { sites, ..self }
    }

    pub fn with_hop(self, hop: f64) -> Self {
        Self { hop, ..self }
    }

    /// Bare coupling `g = g₁√(Δω)`.
    pub fn bare_coupling(&self) -> f64 {
        self.g1 * (self.delta * self.omega).sqrt()
    }

    /// Inverse of [`bare_coupling`](Self::bare_coupling).
    pub fn scaled_coupling(bare: f64, delta: f64, omega: f64) -> f64 {
        bare / (delta * omega).sqrt()
    }

    pub fn hop_over_omega(&self) -> f64 {
        self.hop / self.omega
    }

    /// Constant shift `E₀ = N[−Δ/2 + (ω+3J)g²/Δ² − g²/Δ]` of the projected
    /// Hamiltonian.
    ///
    /// Evaluated exactly as written. The middle term does not carry the
    /// dimension of an energy; it is kept verbatim and never enters any
    /// minimization.
    pub fn constant_energy(&self) -> f64 {
        let g2 = self.bare_coupling().powi(2);
        let d = self.delta;
        self.sites as f64 * (-d / 2.0 + (self.omega + 3.0 * self.hop) * g2 / (d * d) - g2 / d)
    }
}

/// Displacement amplitudes `α_n = A_n + iB_n`, with cyclic site index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConfiguration {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl MeanFieldConfiguration {
    pub fn zeros(sites: usize) -> Self {
        Self {
            a: vec![0.0; sites],
            b: vec![0.0; sites],
        }
    }

    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SiteCountMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "config",
                reason: "non-finite amplitude".into(),
            });
        }
        Ok(Self { a, b })
    }

    /// Real configuration (`B = 0`).
    pub fn real(a: Vec<f64>) -> Self {
        let b = vec![0.0; a.len()];
        Self { a, b }
    }

    /// Inverse of [`to_flat`](Self::to_flat): first `N` entries are `A`, the rest `B`.
    pub fn from_flat(x: &[f64]) -> Self {
        let n = x.len() / 2;
        Self {
            a: x[..n].to_vec(),
            b: x[n..2 * n].to_vec(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn sites(&self) -> usize {
        self.a.len()
    }

    pub fn check_sites(&self, params: &RingParameters) -> Result<()> {
        if self.a.len() != params.sites || self.b.len() != params.sites {
            return Err(Error::SiteCountMismatch {
                expected: params.sites,
                found: self.a.len(),
            });
        }
        Ok(())
    }

    /// Translation `n → n + shift`: the new amplitude at site `n` is the old one
    /// at site `n + shift`.
    pub fn shifted(&self, shift: usize) -> Self {
        let n = self.sites();
        let rot = |v: &[f64]| (0..n).map(|i| v[(i + shift) % n]).collect::<Vec<_>>();
        Self {
            a: rot(&self.a),
            b: rot(&self.b),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            a: self.a.iter().map(|x| -x).collect(),
            b: self.b.iter().map(|x| -x).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sites() == other.sites() && self.max_abs_diff(other) <= tol
    }

    /// Lexicographic comparison on `(A, B)`, used for deterministic ordering.
    pub fn lexicographic_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (x, y) in self.a.iter().chain(&self.b).zip(other.a.iter().chain(&other.b)) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// Orbit of `config` under the global sign flip and all cyclic site shifts.
///
/// Members closer than [`ORBIT_TOLERANCE`] componentwise are merged. The first
/// element is always `config` itself.
pub fn symmetry_orbit(config: &MeanFieldConfiguration) -> Vec<MeanFieldConfiguration> {
    let n = config.sites();
    let mut orbit: Vec<MeanFieldConfiguration> = Vec::with_capacity(2 * n);
    for flipped in [false, true] {
        for shift in 0..n {
            let mut member = config.shifted(shift);
            if flipped {
                member = member.negated();
            }
            if !orbit.iter().any(|m| m.approx_eq(&member, ORBIT_TOLERANCE)) {
                orbit.push(member);
            }
        }
    }
    orbit
}

/// Handedness of the circulating photon current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    Positive,
    Negative,
    /// Both handednesses are degenerate (no configuration chosen yet).
    Either,
}

impl Chirality {
    pub fn from_current(current: f64) -> Self {
        if current >= 0.0 {
            Chirality::Positive
        } else {
            Chirality::Negative
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Chirality::Positive => 1,
            Chirality::Negative => -1,
            Chirality::Either => 0,
        }
    }
}

/// Ground-state phase of the ring.
///
/// Chiral phases carry the condensation momentum as an index `m` with
/// `k = 2πm/N`, reduced to `1 ≤ m < N/2`. On the hexagon, `m = 2` is the
/// phase called CSR I and `m = 1` is CSR II. The text form is `NP`, `FSR`,
/// `AFSR`, `CSRm{m}` plus a chirality sign, or `UNKNOWN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    Normal,
    Ferro,
    AntiFerro,
    Chiral { momentum: usize, chirality: Chirality },
    Unknown,
}

impl PhaseLabel {
    /// Label for a condensate at momentum index `m` (any representative mod N).
    pub fn from_momentum(m: usize, sites: usize, chirality: Chirality) -> Self {
        let m = m % sites;
        let m = m.min(sites - m);
        if m == 0 {
            PhaseLabel::Ferro
        } else if 2 * m == sites {
            PhaseLabel::AntiFerro
        } else {
            PhaseLabel::Chiral {
                momentum: m,
                chirality,
            }
        }
    }

    /// `|m|` of the condensation momentum, when the phase has one.
    pub fn momentum_index(&self, sites: usize) -> Option<usize> {
        match self {
            PhaseLabel::Ferro => Some(0),
            PhaseLabel::AntiFerro if sites % 2 == 0 => Some(sites / 2),
            PhaseLabel::Chiral { momentum, .. } => Some(*momentum),
            _ => None,
        }
    }

    pub fn chirality(&self) -> Option<Chirality> {
        match self {
            PhaseLabel::Chiral { chirality, .. } => Some(*chirality),
            _ => None,
        }
    }

    pub fn is_chiral(&self) -> bool {
        matches!(self, PhaseLabel::Chiral { .. })
    }

    /// Same phase kind and momentum, ignoring chirality.
    pub fn same_kind(&self, other: &PhaseLabel) -> bool {
        match (self, other) {
            (PhaseLabel::Chiral { momentum: m1, .. }, PhaseLabel::Chiral { momentum: m2, .. }) => m1 == m2,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseLabel::Normal => f.write_str("NP"),
            PhaseLabel::Ferro => f.write_str("FSR"),
            PhaseLabel::AntiFerro => f.write_str("AFSR"),
            PhaseLabel::Chiral { momentum, chirality } => {
                let suffix = match chirality {
                    Chirality::Positive => "+",
                    Chirality::Negative => "-",
                    Chirality::Either => "",
                };
                write!(f, "CSRm{momentum}{suffix}")
            }
            PhaseLabel::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

//! Photon currents, in-plane spin texture and the magnetic analogy.
//!
//! Currents are coherent-state expectations of the hopping current operators,
//! `⟨a_n† a_m⟩ → α_n* α_m`. Their sign is a convention; mapping it onto a
//! clockwise or anticlockwise arrow is a plotting choice.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{MeanFieldConfiguration, RingParameters};

/// Norm below which a spin vector has no defined direction.
pub const MIN_SPIN_NORM: f64 = 1e-9;

/// Current along the link `n → m`: `i(α_n* α_m − α_n α_m*) = −2(A_n B_m − B_n A_m)`.
fn link_current(config: &MeanFieldConfiguration, n: usize, m: usize) -> f64 {
    -2.0 * (config.a[n] * config.b[m] - config.b[n] * config.a[m])
}

/// Ring current `I = i Σ_n (a_n† a_{n+1} − h.c.)` in the coherent state.
pub fn ring_current(config: &MeanFieldConfiguration) -> f64 {
    let n = config.sites();
    (0..n).map(|i| link_current(config, i, (i + 1) % n)).sum()
}

/// Loop currents on the odd (1,3,5) and even (2,4,6) triangles of the hexagon.
pub fn subring_currents(config: &MeanFieldConfiguration) -> Result<(f64, f64)> {
    if config.sites() != 6 {
        return Err(Error::UnsupportedSiteCount {
            required: "6",
            found: config.sites(),
        });
    }
    let odd = link_current(config, 0, 2) + link_current(config, 2, 4) + link_current(config, 4, 0);
    let even = link_current(config, 1, 3) + link_current(config, 3, 5) + link_current(config, 5, 1);
    Ok((odd, even))
}

/// Ring and subring currents of a hexagon configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentReport {
    pub ring: f64,
    pub odd_subring: f64,
    pub even_subring: f64,
}

impl CurrentReport {
    pub fn new(config: &MeanFieldConfiguration) -> Result<Self> {
        let (odd_subring, even_subring) = subring_currents(config)?;
        Ok(Self {
            ring: ring_current(config),
            odd_subring,
            even_subring,
        })
    }
}

/// Scaled in-plane magnetisation `S_n = (A_n, −B_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinField {
    pub vectors: Vec<[f64; 2]>,
}

pub fn spin_vectors(config: &MeanFieldConfiguration) -> SpinField {
    SpinField {
        vectors: config.a.iter().zip(&config.b).map(|(&a, &b)| [a, -b]).collect(),
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Number of turns the in-plane spin makes along one trip around the ring.
///
/// Each neighbour step is wrapped into `(−π, π]`. Antiparallel neighbours make
/// the step direction ambiguous and are rejected rather than resolved.
pub fn winding_number(field: &SpinField) -> Result<i32> {
    let n = field.vectors.len();
    for (site, v) in field.vectors.iter().enumerate() {
        if v[0].hypot(v[1]) <= MIN_SPIN_NORM {
            return Err(Error::UndefinedWinding { site });
        }
    }
    let angles: Vec<f64> = field.vectors.iter().map(|v| v[1].atan2(v[0])).collect();
    let mut total = 0.0;
    for i in 0..n {
        let step = wrap_angle(angles[(i + 1) % n] - angles[i]);
        if (step.abs() - PI).abs() <= 1e-9 {
            return Err(Error::AmbiguousWinding {
                site: i,
                next: (i + 1) % n,
            });
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    assert!((turns - rounded).abs() < 1e-6, "winding sum {turns} is not an integer");
    Ok(rounded as i32)
}

/// Character of the dominant spin coupling in the magnetic analogy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MagneticRegime {
    XyFerro,
    XyAntiferro,
    DmDominated,
}

/// Signs and relative scales of the XY and Dzyaloshinskii–Moriya couplings.
///
/// Only the `J`-dependence is exposed; the overall spin-normalised prefactor is
/// not computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticCouplings {
    /// Sign of `J cos θ`; negative is ferromagnetic.
    pub xy_sign: i8,
    /// DM scale `J sin θ`.
    pub dm: f64,
    pub regime: MagneticRegime,
}

pub fn magnetic_couplings(params: &RingParameters) -> MagneticCouplings {
    let xy = params.hop * params.theta.cos();
    let dm = params.hop * params.theta.sin();
    let xy_sign = if xy > 0.0 {
        1
    } else if xy < 0.0 {
        -1
    } else {
        0
    };
    let regime = if dm.abs() > xy.abs() {
        MagneticRegime::DmDominated
    } else if xy < 0.0 {
        MagneticRegime::XyFerro
    } else {
        MagneticRegime::XyAntiferro
    };
    MagneticCouplings { xy_sign, dm, regime }
}

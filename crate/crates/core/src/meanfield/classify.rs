use std::f64::consts::PI;

use super::branches::CsrVariant;
use crate::model::{Chirality, MeanFieldConfiguration, PhaseLabel, RingParameters};
use crate::observables::ring_current;

/// Componentwise tolerance for pattern matching, relative to `max(1, max|α|)`.
pub const PATTERN_TOLERANCE: f64 = 1e-6;

/// A hexagon configuration aligned to one of the chiral patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsrPatternMatch {
    pub variant: CsrVariant,
    /// Cyclic shift that aligns the configuration with the pattern.
    pub shift: usize,
    pub a1: f64,
    pub a2: f64,
    pub b2: f64,
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn fits(variant: CsrVariant, c: &MeanFieldConfiguration, tol: f64) -> bool {
    let expected_a = variant.expand(c.a[0], c.a[1]);
    let expected_b = variant.expand_b(c.b[1]);
    (0..6).all(|i| close(c.a[i], expected_a[i], tol) && close(c.b[i], expected_b[i], tol))
}

/// Finds a cyclic shift that puts a hexagon configuration into the CSR I or
/// CSR II pattern.
pub fn match_csr_pattern(config: &MeanFieldConfiguration, tol: f64) -> Option<CsrPatternMatch> {
    if config.sites() != 6 {
        return None;
    }
    for variant in [CsrVariant::I, CsrVariant::II] {
        for shift in 0..6 {
            let c = config.shifted(shift);
            if fits(variant, &c, tol) {
                return Some(CsrPatternMatch {
                    variant,
                    shift,
                    a1: c.a[0],
                    a2: c.a[1],
                    b2: c.b[1],
                });
            }
        }
    }
    None
}

/// Dominant `|m|` of the Fourier transform of `α_n`.
fn dominant_momentum(config: &MeanFieldConfiguration) -> usize {
    let n = config.sites();
    let power = |m: usize| {
        let (mut re, mut im) = (0.0, 0.0);
        for j in 0..n {
            let phase = -2.0 * PI * (m * j) as f64 / n as f64;
            let (s, c) = phase.sin_cos();
            re += config.a[j] * c - config.b[j] * s;
            im += config.a[j] * s + config.b[j] * c;
        }
        re * re + im * im
    };
    (0..=n / 2)
        .map(|m| (m, power(m) + if m == 0 || 2 * m == n { 0.0 } else { power(n - m) }))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// Assigns a phase label to a stationary configuration.
///
/// Matching is done up to cyclic shift and global sign. The chirality of chiral
/// phases is the sign of the ring current.
pub fn classify_solution(params: &RingParameters, config: &MeanFieldConfiguration) -> PhaseLabel {
    let n = config.sites();
    if n != params.sites || n == 0 {
        return PhaseLabel::Unknown;
    }
    let tol = PATTERN_TOLERANCE * config.max_abs().max(1.0);
    if config.max_abs() <= tol {
        return PhaseLabel::Normal;
    }
    let real = config.b.iter().all(|b| b.abs() <= tol);
    if real {
        if config.a.iter().all(|&a| close(a, config.a[0], tol)) {
            return PhaseLabel::Ferro;
        }
        if n % 2 == 0 && (0..n).all(|i| close(config.a[i], -config.a[(i + 1) % n], tol)) {
            return PhaseLabel::AntiFerro;
        }
    }
    let chirality = Chirality::from_current(ring_current(config));
    if n == 6 {
        return match match_csr_pattern(config, tol) {
            Some(m) if !real => PhaseLabel::Chiral {
                momentum: m.variant.momentum_index(),
                chirality,
            },
            _ => PhaseLabel::Unknown,
        };
    }
    if real {
        return PhaseLabel::Unknown;
    }
    match PhaseLabel::from_momentum(dominant_momentum(config), n, chirality) {
        label @ PhaseLabel::Chiral { .. } => label,
        _ => PhaseLabel::Unknown,
    }
}

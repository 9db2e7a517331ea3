//! Quadratic fluctuations around a mean-field configuration.
//!
//! Around a displacement `α_n` the low-energy Hamiltonian is bilinear in the
//! shifted photon operators,
//!
//! ```text
//! H = Σ_n (ω − 2χ_n) a_n†a_n − Σ_n χ_n (a_n†a_n† + a_n a_n)
//!     + J Σ_n (e^{iθ} a_n†a_{n+1} + h.c.) + const,
//! ```
//!
//! with `χ_n = λ_n²/Δ_n`. Writing `H = ½Ψ†MΨ` with `Ψ = (a, a†)`, the
//! excitation energies are the positive members of the `±ε` pairs in the
//! spectrum of the dynamical matrix `ηM`, `η = diag(1, −1)`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::meanfield::EffectiveSiteQuantities;
use crate::model::{MeanFieldConfiguration, RingParameters};

/// `|ε| < ZERO_MODE_TOLERANCE·ω` counts as a zero mode.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-7;
/// Imaginary parts above this fraction of the spectral scale mean instability.
pub const STABILITY_TOLERANCE: f64 = 1e-8;
/// Relative mismatch allowed when pairing `λ` with `−λ`.
pub const PAIRING_TOLERANCE: f64 = 1e-6;

const SCHUR_MAX_ITERATIONS: usize = 100_000;

/// Coefficient matrix `M` of `H = ½Ψ†MΨ + const`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub sites: usize,
    pub omega: f64,
    pub matrix: DMatrix<Complex64>,
}

impl QuadraticForm {
    /// Normal block `h`, coefficient of `a_n†a_m`.
    pub fn h(&self) -> DMatrix<Complex64> {
        self.matrix.view((0, 0), (self.sites, self.sites)).into_owned()
    }

    /// Anomalous block `d`, with `½Σ d_nm a_n†a_m† + h.c.` in `H`.
    pub fn d(&self) -> DMatrix<Complex64> {
        self.matrix.view((0, self.sites), (self.sites, self.sites)).into_owned()
    }

    /// Largest deviation of `M` from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Dynamical matrix `ηM`.
    pub fn dynamical_matrix(&self) -> DMatrix<Complex64> {
        let mut m = self.matrix.clone();
        for mut row in m.rows_mut(self.sites, self.sites).row_iter_mut() {
            row.iter_mut().for_each(|z| *z = -*z);
        }
        m
    }
}

pub fn bilinear_matrix(params: &RingParameters, config: &MeanFieldConfiguration) -> Result<QuadraticForm> {
    config.check_sites(params)?;
    let n = params.sites;
    let chi = EffectiveSiteQuantities::new(params, &config.a).chi_n;
    let hop = Complex64::from_polar(params.hop, params.theta);
    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        let diag = Complex64::new(params.omega - 2.0 * chi[i], 0.0);
        let anomalous = Complex64::new(-2.0 * chi[i], 0.0);
        m[(i, i)] += diag;
        m[(n + i, n + i)] += diag;
        m[(i, n + i)] += anomalous;
        m[(n + i, i)] += anomalous;
        // h_{i,i+1} = J e^{iθ}; the lower block holds h*.
        m[(i, j)] += hop;
        m[(j, i)] += hop.conj();
        m[(n + i, n + j)] += hop.conj();
        m[(n + j, n + i)] += hop;
    }
    Ok(QuadraticForm {
        sites: n,
        omega: params.omega,
        matrix: m,
    })
}

/// Bogoliubov energies of a quadratic form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationSpectrum {
    /// `ε₁ ≤ … ≤ ε_N`, in units of ω.
    pub energies: Vec<f64>,
    pub stable: bool,
    pub zero_modes: usize,
    /// Largest imaginary part among the dynamical eigenvalues.
    pub max_imaginary: f64,
}

impl ExcitationSpectrum {
    pub fn gap(&self) -> f64 {
        self.energies[0]
    }
}

/// Diagonalizes `ηM` and pairs its eigenvalues as `±ε`.
///
/// # Panics
///
/// If `M` is not hermitian.
pub fn excitation_spectrum(form: &QuadraticForm) -> Result<ExcitationSpectrum> {
    let n = form.sites;
    let norm = form.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(
        form.hermiticity_error() <= 1e-12 * norm.max(1.0),
        "quadratic form is not hermitian"
    );
    let schur = Schur::try_new(form.dynamical_matrix(), f64::EPSILON, SCHUR_MAX_ITERATIONS).ok_or_else(|| {
        Error::PairingFailure {
            value: "Schur iteration did not converge".into(),
        }
    })?;
    let (_, t) = schur.unpack();
    let mut eig: Vec<Complex64> = t.diagonal().iter().copied().collect();
    eig.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));

    let scale = eig.iter().map(|z| z.norm()).fold(form.omega, f64::max);
    let zero_tol = ZERO_MODE_TOLERANCE * form.omega;
    let mut used = vec![false; 2 * n];
    let mut energies = Vec::with_capacity(n);
    let mut max_imaginary: f64 = 0.0;
    let mut stable = true;
    for i in 0..2 * n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let lambda = eig[i];
        let (partner, miss) = (0..2 * n)
            .filter(|&j| !used[j])
            .map(|j| (j, (eig[j] + lambda).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or_else(|| Error::PairingFailure {
                value: format!("{lambda}"),
            })?;
        if miss > PAIRING_TOLERANCE * scale {
            return Err(Error::PairingFailure {
                value: format!("{lambda}"),
            });
        }
        used[partner] = true;
        let im = lambda.im.abs().max(eig[partner].im.abs());
        max_imaginary = max_imaginary.max(im);
        if im > STABILITY_TOLERANCE * scale && lambda.norm() >= zero_tol {
            stable = false;
        }
        energies.push(0.5 * (lambda.re - eig[partner].re).abs());
    }
    energies.sort_by(f64::total_cmp);
    let zero_modes = energies.iter().filter(|&&e| e < zero_tol).count();
    Ok(ExcitationSpectrum {
        energies,
        stable,
        zero_modes,
        max_imaginary,
    })
}

/// Convenience wrapper: spectrum around `config`.
pub fn spectrum_at(params: &RingParameters, config: &MeanFieldConfiguration) -> Result<ExcitationSpectrum> {
    excitation_spectrum(&bilinear_matrix(params, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::closed_form_fsr;
    use crate::normal::{classify_theta, critical_coupling, dispersion, np_excitation, MomentumGrid};
    use std::f64::consts::PI;

    fn closed_form_np(params: &RingParameters) -> Vec<f64> {
        let mut e: Vec<f64> = MomentumGrid::new(params.sites)
            .momenta()
            .into_iter()
            .map(|k| np_excitation(params, k).unwrap())
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn form_blocks() {
        let p = RingParameters::default().with_theta(0.3).with_g1(0.4);
        let form = bilinear_matrix(&p, &MeanFieldConfiguration::zeros(6)).unwrap();
        assert!(form.hermiticity_error() == 0.0);
        let d = form.d();
        assert!((&d - d.transpose()).iter().all(|z| z.norm() == 0.0));
        for i in 0..6 {
            // χ = ωg₁² at the vacuum.
            assert!((d[(i, i)].re + 2.0 * 0.16).abs() < 1e-14);
            assert!((form.h()[(i, i)].re - (1.0 - 2.0 * 0.16)).abs() < 1e-14);
        }
        let fsr = closed_form_fsr(&p.with_theta(PI).with_g1(0.7)).unwrap();
        let d = bilinear_matrix(&p, &fsr).unwrap().d();
        assert!((0..6).all(|i| (d[(i, i)] - d[(0, 0)]).norm() < 1e-15));
    }

    #[test]
    fn decoupled_vacuum_is_the_dispersion() {
        let p = RingParameters::default().with_theta(0.7);
        let s = spectrum_at(&p, &MeanFieldConfiguration::zeros(6)).unwrap();
        let mut expected: Vec<f64> = MomentumGrid::new(6).momenta().into_iter().map(|k| dispersion(&p, k)).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.energies.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.stable && s.zero_modes == 0);
    }

    #[test]
    fn normal_phase_matches_closed_form() {
        for &(theta, g1) in &[(0.2, 0.3), (0.49 * PI, 0.4), (-2.5, 0.42), (PI, 0.45)] {
            let p = RingParameters::default().with_theta(theta).with_g1(g1);
            let s = spectrum_at(&p, &MeanFieldConfiguration::zeros(6)).unwrap();
            for (a, b) in s.energies.iter().zip(closed_form_np(&p)) {
                assert!((a - b).abs() < 1e-10, "{theta} {g1}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gap_closes_at_threshold() {
        for theta in [0.1 * PI, 0.49 * PI, 0.51 * PI, 0.9 * PI] {
            let p = RingParameters::default().with_theta(theta);
            let c = classify_theta(&p).unwrap();
            let gc = critical_coupling(&p, c.momentum(6)).unwrap();
            let s = spectrum_at(&p.with_g1(gc), &MeanFieldConfiguration::zeros(6)).unwrap();
            assert!(s.gap() < 1e-6, "{theta}: {}", s.gap());
            assert!(s.zero_modes >= 1);
            let above = spectrum_at(&p.with_g1(gc + 0.02), &MeanFieldConfiguration::zeros(6)).unwrap();
            assert!(!above.stable);
        }
    }

    #[test]
    fn relabeling_leaves_spectrum_unchanged() {
        let p = RingParameters::default().with_theta(0.8 * PI).with_g1(0.7);
        let c = MeanFieldConfiguration::new(vec![1.0, 4.0, -2.0, 0.5, 3.0, -1.0], vec![0.3, 0.0, -0.2, 0.1, 0.4, 0.2])
            .unwrap();
        let base = spectrum_at(&p, &c).unwrap();
        for shift in 1..6 {
            let s = spectrum_at(&p, &c.shifted(shift)).unwrap();
            for (a, b) in s.energies.iter().zip(&base.energies) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

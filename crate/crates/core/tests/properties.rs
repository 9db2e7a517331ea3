use std::f64::consts::PI;

use proptest::prelude::*;
use rabi_ring::bogoliubov::{bilinear_matrix, spectrum_at};
use rabi_ring::meanfield::{ground_energy, minimize_energy, stationarity_residuals, SolverOptions};
use rabi_ring::model::symmetry_orbit;
use rabi_ring::normal::{critical_coupling, MomentumGrid};
use rabi_ring::observables::{ring_current, spin_vectors, subring_currents, winding_number, SpinField};
use rabi_ring::{MeanFieldConfiguration, RingParameters};

fn config(n: usize) -> impl Strategy<Value = MeanFieldConfiguration> {
    (prop::collection::vec(-6.0..6.0f64, n), prop::collection::vec(-6.0..6.0f64, n))
        .prop_map(|(a, b)| MeanFieldConfiguration::new(a, b).unwrap())
}

fn params() -> impl Strategy<Value = RingParameters> {
    (-PI..PI, 0.0..1.0f64, 0.0..0.2f64)
        .prop_map(|(theta, g1, hop)| RingParameters::default().with_theta(theta).with_g1(g1).with_hop(hop))
}

fn central_gradient(p: &RingParameters, c: &MeanFieldConfiguration) -> Vec<f64> {
    let x = c.to_flat();
    (0..x.len())
        .map(|i| {
            let h = 1e-5 * x[i].abs().max(1.0);
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += h;
            down[i] -= h;
            let e = |v: &[f64]| ground_energy(p, &MeanFieldConfiguration::from_flat(v)).unwrap();
            (e(&up) - e(&down)) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_is_twice_the_residual(p in params(), c in config(6)) {
        let r = stationarity_residuals(&p, &c).unwrap();
        let g = central_gradient(&p, &c);
        let scale = g.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (gi, ri) in g.iter().zip(&r) {
            prop_assert!((gi - 2.0 * ri).abs() / scale < 1e-5, "{gi} vs {}", 2.0 * ri);
        }
    }

    #[test]
    fn energy_is_invariant_on_the_orbit(p in params(), c in config(6)) {
        let e = ground_energy(&p, &c).unwrap();
        for m in symmetry_orbit(&c) {
            prop_assert!((ground_energy(&p, &m).unwrap() - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn conjugation_mirrors_the_flux(p in params(), c in config(6)) {
        let conj = MeanFieldConfiguration::new(c.a.clone(), c.b.iter().map(|b| -b).collect()).unwrap();
        let mirrored = p.with_theta(-p.theta);
        let (e, e_conj) = (ground_energy(&p, &c).unwrap(), ground_energy(&mirrored, &conj).unwrap());
        prop_assert!((e - e_conj).abs() <= 1e-10 * e.abs().max(1.0));
        prop_assert!((ring_current(&c) + ring_current(&conj)).abs() < 1e-10);
    }

    #[test]
    fn energies_scale_with_the_unit(p in params(), c in config(6), s in 0.1..10.0f64) {
        let scaled = RingParameters { omega: p.omega * s, delta: p.delta * s, hop: p.hop * s, ..p };
        let (e, es) = (ground_energy(&p, &c).unwrap(), ground_energy(&scaled, &c).unwrap());
        prop_assert!((es - s * e).abs() <= 1e-10 * es.abs().max(1.0));
        let r = stationarity_residuals(&p, &c).unwrap();
        let rs = stationarity_residuals(&scaled, &c).unwrap();
        for (x, y) in r.iter().zip(&rs) {
            prop_assert!((y - s * x).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn bilinear_form_is_hermitian(p in params(), c in config(6)) {
        let form = bilinear_matrix(&p, &c).unwrap();
        prop_assert!(form.hermiticity_error() == 0.0);
        let d = form.d();
        prop_assert!((&d - d.transpose()).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn spectrum_is_shift_invariant(theta in -PI..PI, a in 0.0..5.0f64) {
        // A uniform displacement is a fixed point of every shift.
        let p = RingParameters::default().with_theta(theta).with_g1(0.3);
        let c = MeanFieldConfiguration::real(vec![a; 6]);
        let base = spectrum_at(&p, &c).unwrap();
        for shift in 1..6 {
            let s = spectrum_at(&p, &c.shifted(shift)).unwrap();
            for (x, y) in s.energies.iter().zip(&base.energies) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_coupling_is_even_in_momentum(theta in -PI..PI, hop in 0.001..0.2f64, n in 3usize..13) {
        let p = RingParameters::default().with_theta(theta).with_hop(hop).with_sites(n);
        let grid = MomentumGrid::new(n);
        for m in 0..n {
            let k = grid.momentum(m);
            let (x, y) = (critical_coupling(&p, k).unwrap(), critical_coupling(&p, -k).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn winding_survives_rotation_and_scaling(c in config(6), phi in -PI..PI, s in 0.01..100.0f64) {
        let field = spin_vectors(&c);
        let Ok(w) = winding_number(&field) else { return Ok(()); };
        let (sin, cos) = phi.sin_cos();
        let rotated = SpinField {
            vectors: field.vectors.iter().map(|v| [s * (cos * v[0] - sin * v[1]), s * (sin * v[0] + cos * v[1])]).collect(),
        };
        // A rotation may move a step onto the ambiguous antipode only by rounding.
        if let Ok(w2) = winding_number(&rotated) {
            prop_assert_eq!(w, w2);
        }
    }

    #[test]
    fn subring_currents_sum_like_the_ring_on_chiral_patterns(a1 in -5.0..5.0f64, a2 in -5.0..5.0f64, b2 in -2.0..2.0f64) {
        use rabi_ring::meanfield::CsrVariant;
        for variant in [CsrVariant::I, CsrVariant::II] {
            let c = MeanFieldConfiguration::new(variant.expand(a1, a2).to_vec(), variant.expand_b(b2).to_vec()).unwrap();
            let i = ring_current(&c);
            let (odd, even) = subring_currents(&c).unwrap();
            prop_assert!((odd - even).abs() < 1e-10);
            let expected = match variant { CsrVariant::I => -i / 2.0, CsrVariant::II => i / 2.0 };
            prop_assert!((odd - expected).abs() < 1e-10 * i.abs().max(1.0));
        }
    }
}

/// B-sum rules are never imposed by the solver; they must come out.
#[test]
fn imaginary_parts_obey_emergent_sum_rules() {
    let options = SolverOptions {
        random_starts: 32,
        ..SolverOptions::default()
    };
    let mut count = 0;
    for i in 0..24 {
        let theta = -PI + 2.0 * PI * (i as f64 + 0.5) / 24.0;
        for g1 in [0.55, 0.7, 0.8] {
            let p = RingParameters::default().with_theta(theta).with_g1(g1);
            for r in minimize_energy(&p, &options).unwrap().minima {
                let b = &r.config.b;
                let total: f64 = b.iter().sum();
                let odd = b[0] + b[2] + b[4];
                let even = b[1] + b[3] + b[5];
                assert!(total.abs() < 1e-8 && odd.abs() < 1e-8 && even.abs() < 1e-8, "{theta} {g1}: {b:?}");
                count += 1;
            }
        }
    }
    assert!(count > 72);
}

//! Property tests: transform bijectivity, conservation, piecewise
//! continuity, and predictive-distribution invariants.

use proptest::prelude::*;

use seiprd::forecast::{NbComponent, PredictiveDistribution, TAIL_EPS};
use seiprd::integrator::{integrate_daily, IntegratorConfig};
use seiprd::model::{rhs, CompartmentState, PiecewiseLinear, TransmissionParams};
use seiprd::params::{from_unconstrained, to_unconstrained, ParamLayout, ParamVector, Support};

fn layout() -> ParamLayout {
    ParamLayout::new(
        vec![0.0, 20.0, 40.0, 60.0],
        vec![0.0, 50.0],
        vec![0.0, 25.0, 50.0],
    )
    .unwrap()
}

fn constrained_vector(l: &ParamLayout) -> impl Strategy<Value = Vec<f64>> {
    let dim = l.dim();
    let supports: Vec<Support> = (0..dim).map(|i| l.support(i)).collect();
    proptest::collection::vec(0.001..0.999f64, dim).prop_map(move |raw| {
        raw.iter()
            .zip(&supports)
            .map(|(&r, s)| match s {
                // Positive components spread over several decades.
                Support::Positive => 10f64.powf(r * 4.0 - 2.0),
                Support::UnitInterval => r,
            })
            .collect()
    })
}

fn transmission_params() -> impl Strategy<Value = TransmissionParams> {
    (
        0.9..0.9999f64,
        0.05..0.95f64,
        proptest::collection::vec(0.0..1.2f64, 4),
        2.0..8.0f64,
        2.0..9.0f64,
        6.0..20.0f64,
        0.002..0.05f64,
    )
        .prop_map(|(alpha1, alpha2, beta_values, d_l, d_i, d_p, omega)| {
            TransmissionParams {
                alpha1,
                alpha2,
                beta: PiecewiseLinear::new(vec![0.0, 30.0, 60.0, 90.0], beta_values).unwrap(),
                d_l,
                d_i,
                d_p,
                omega,
                n_population: 1_000_000,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn transform_roundtrip_is_identity(values in constrained_vector(&layout())) {
        let l = layout();
        let p = ParamVector::new(values, &l).unwrap();
        let u = to_unconstrained(&p, &l);
        let (back, _) = from_unconstrained(&u, &l).unwrap();
        for (a, b) in p.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }
}

proptest! {
    #[test]
    fn rhs_derivatives_sum_to_zero(tp in transmission_params(),
                                   scale in 0.0..1.0f64) {
        let n = tp.n_population as f64;
        let state = CompartmentState {
            s: n * (1.0 - scale) * 0.9,
            e1: n * scale * 0.05,
            e2: n * scale * 0.05,
            i1: n * scale * 0.1,
            i2: n * scale * 0.1,
            p1: n * scale * 0.2,
            p2: n * scale * 0.2,
            r: n * scale * 0.25,
            d: n * scale * 0.05,
        };
        let dy = rhs(12.3, &state, &tp);
        let sum: f64 = dy.to_array().iter().sum();
        let magnitude: f64 = dy.to_array().iter().map(|v| v.abs()).sum();
        prop_assert!(sum.abs() <= 1e-10 * magnitude.max(1.0));
    }

    #[test]
    fn trajectories_conserve_population_and_monotone_deaths(tp in transmission_params()) {
        let cfg = IntegratorConfig::new(4, 365).unwrap();
        let traj = integrate_daily(&tp, &cfg).unwrap();
        let n = tp.n_population as f64;
        let mut prev_d = -1.0;
        for st in traj.states() {
            prop_assert!((st.total() - n).abs() <= 1e-6 * n);
            prop_assert!(st.d >= prev_d);
            prop_assert!(st.to_array().iter().all(|&v| v >= -1e-9 * n));
            prev_d = st.d;
        }
    }

    #[test]
    fn piecewise_is_continuous_at_knots(values in proptest::collection::vec(-5.0..5.0f64, 4)) {
        let f = PiecewiseLinear::new(vec![0.0, 10.0, 15.0, 40.0], values).unwrap();
        let eps = 1e-9;
        for &t in f.knot_times() {
            let left = f.eval(t - eps);
            let right = f.eval(t + eps);
            prop_assert!((left - right).abs() < 1e-6);
        }
    }

    #[test]
    fn predictive_distribution_invariants(
        mus in proptest::collection::vec(0.1..200.0f64, 1..8),
        phis in proptest::collection::vec(0.2..30.0f64, 8),
    ) {
        let components: Vec<NbComponent> = mus
            .iter()
            .zip(&phis)
            .map(|(&mu, &phi)| NbComponent { mu, phi })
            .collect();
        let dist = PredictiveDistribution::new(components).unwrap();

        // cdf reaches the tail target and is non-decreasing.
        let kmax = dist.k_max();
        prop_assert!(dist.cdf(kmax) >= 1.0 - TAIL_EPS);
        let mut prev = 0.0;
        for k in (0..=kmax).step_by((kmax as usize / 64).max(1)) {
            let c = dist.cdf(k);
            prop_assert!(c >= prev);
            prev = c;
        }

        // The median is a genuine median.
        let med = dist.quantile(0.5).unwrap();
        prop_assert!(dist.cdf(med) >= 0.5);
        if med > 0 {
            prop_assert!(dist.cdf(med - 1) < 0.5);
        }

        // Mixture mean equals the pmf-weighted sum.
        let sum: f64 = (0..=kmax).map(|k| k as f64 * dist.pmf(k)).sum();
        prop_assert!((sum - dist.mean()).abs() <= 1e-6 * dist.mean());
    }
}

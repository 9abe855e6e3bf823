//! SEIPRD transmission model: disease-state populations, parameters, the
//! piecewise-linear contact rate, the initial state, and the ODE right-hand
//! side.
//!
//! The population is closed and split into nine states: susceptible (S), two
//! exposed sub-states (E1, E2), two infectious sub-states (I1, I2), two
//! pending sub-states (P1, P2) for individuals who are convalescing or
//! terminally ill, recovered (R), and dead (D). Splitting E, I, and P gives
//! their dwell times Erlang rather than Exponential distributions.

use crate::error::{Error, Result};

/// Number of disease states.
pub const N_COMPARTMENTS: usize = 9;

/// Real-valued population counts for the nine disease states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompartmentState {
    pub s: f64,
    pub e1: f64,
    pub e2: f64,
    pub i1: f64,
    pub i2: f64,
    pub p1: f64,
    pub p2: f64,
    pub r: f64,
    pub d: f64,
}

impl CompartmentState {
    pub fn to_array(self) -> [f64; N_COMPARTMENTS] {
        [
            self.s, self.e1, self.e2, self.i1, self.i2, self.p1, self.p2, self.r, self.d,
        ]
    }

    pub fn from_array(a: [f64; N_COMPARTMENTS]) -> Self {
        CompartmentState {
            s: a[0],
            e1: a[1],
            e2: a[2],
            i1: a[3],
            i2: a[4],
            p1: a[5],
            p2: a[6],
            r: a[7],
            d: a[8],
        }
    }

    /// Sum over all nine states.
    pub fn total(&self) -> f64 {
        self.to_array().iter().sum()
    }
}

/// A continuous piecewise-linear function of model time defined by knots.
///
/// Between knots the value is the linear interpolation of the bracketing
/// pair; outside the knot span the value is held constant at the nearest
/// end knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knot_times: Vec<f64>,
    knot_values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knot_times: Vec<f64>, knot_values: Vec<f64>) -> Result<Self> {
        if knot_times.len() < 2 {
            return Err(Error::domain("piecewise-linear function needs >= 2 knots"));
        }
        if knot_times.len() != knot_values.len() {
            return Err(Error::domain(format!(
                "knot count mismatch: {} times vs {} values",
                knot_times.len(),
                knot_values.len()
            )));
        }
        if !knot_times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("knot times must be strictly increasing"));
        }
        if !knot_values.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("knot values must be finite"));
        }
        Ok(PiecewiseLinear {
            knot_times,
            knot_values,
        })
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.knot_times
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    pub fn n_knots(&self) -> usize {
        self.knot_times.len()
    }

    /// Evaluate at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let times = &self.knot_times;
        let values = &self.knot_values;
        if t <= times[0] {
            return values[0];
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return values[last];
        }
        // Index of the segment [t_j, t_{j+1}) containing t.
        let j = times.partition_point(|&tk| tk <= t) - 1;
        let frac = (t - times[j]) / (times[j + 1] - times[j]);
        values[j] + frac * (values[j + 1] - values[j])
    }
}

/// Parameters of the transmission model.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionParams {
    /// Proportion of the non-seed population initially susceptible.
    pub alpha1: f64,
    /// Proportion of the initially infected population not yet infectious.
    pub alpha2: f64,
    /// Effective contact rate per day, piecewise linear in time.
    pub beta: PiecewiseLinear,
    /// Mean latent period in days.
    pub d_l: f64,
    /// Mean infectious period in days.
    pub d_i: f64,
    /// Mean pending period in days.
    pub d_p: f64,
    /// Infection fatality ratio.
    pub omega: f64,
    /// Total population size.
    pub n_population: u64,
}

impl TransmissionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("omega", self.omega),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        for (name, v) in [("d_l", self.d_l), ("d_i", self.d_i), ("d_p", self.d_p)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.n_population < 6 {
            return Err(Error::domain(format!(
                "population must be >= 6, got {}",
                self.n_population
            )));
        }
        if self.beta.knot_times()[0] != 0.0 {
            return Err(Error::domain("beta knots must start at model day 0"));
        }
        if !self.beta.knot_values().iter().all(|&b| b >= 0.0) {
            return Err(Error::domain("beta values must be >= 0"));
        }
        Ok(())
    }
}

/// Initial disease-state allocation.
///
/// One individual seeds each of S, E1, E2, I1, and I2; `alpha1` sets the
/// susceptible share of the remaining N-5, and `alpha2` splits the infected
/// remainder between exposed and infectious, equally across sub-states.
pub fn initial_state(params: &TransmissionParams) -> Result<CompartmentState> {
    params.validate()?;
    let n = params.n_population as f64;
    let rest = n - 5.0;
    let exposed = 0.5 * rest * (1.0 - params.alpha1) * params.alpha2 + 1.0;
    let infectious = 0.5 * rest * (1.0 - params.alpha1) * (1.0 - params.alpha2) + 1.0;
    Ok(CompartmentState {
        s: rest * params.alpha1 + 1.0,
        e1: exposed,
        e2: exposed,
        i1: infectious,
        i2: infectious,
        p1: 0.0,
        p2: 0.0,
        r: 0.0,
        d: 0.0,
    })
}

/// Time derivative of the nine disease states at time `t`.
pub fn rhs(t: f64, state: &CompartmentState, params: &TransmissionParams) -> CompartmentState {
    let n = params.n_population as f64;
    let beta_t = params.beta.eval(t);
    let infection = beta_t * (state.i1 + state.i2) / n * state.s;
    let e1_out = 2.0 / params.d_l * state.e1;
    let e2_out = 2.0 / params.d_l * state.e2;
    let i1_out = 2.0 / params.d_i * state.i1;
    let i2_out = 2.0 / params.d_i * state.i2;
    let p1_out = 2.0 / params.d_p * state.p1;
    let p2_out = 2.0 / params.d_p * state.p2;
    CompartmentState {
        s: -infection,
        e1: infection - e1_out,
        e2: e1_out - e2_out,
        i1: e2_out - i1_out,
        i2: i1_out - i2_out,
        p1: i2_out - p1_out,
        p2: p1_out - p2_out,
        r: p2_out * (1.0 - params.omega),
        d: p2_out * params.omega,
    }
}

#[cfg(test)]
pub(crate) fn test_params() -> TransmissionParams {
    TransmissionParams {
        alpha1: 0.5,
        alpha2: 0.5,
        beta: PiecewiseLinear::new(vec![0.0, 7.0], vec![0.5, 0.5]).unwrap(),
        d_l: 4.0,
        d_i: 5.0,
        d_p: 13.0,
        omega: 0.01,
        n_population: 1005,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_direct_substitution() {
        let st = initial_state(&test_params()).unwrap();
        assert_eq!(st.s, 501.0);
        assert_eq!(st.e1, 126.0);
        assert_eq!(st.e2, 126.0);
        assert_eq!(st.i1, 126.0);
        assert_eq!(st.i2, 126.0);
        assert_eq!(st.p1, 0.0);
        assert_eq!(st.p2, 0.0);
        assert_eq!(st.r, 0.0);
        assert_eq!(st.d, 0.0);
    }

    #[test]
    fn initial_state_alpha1_near_one() {
        // (1 - alpha1) -> 0 zeroes the infected allocation except the seeds.
        let mut p = test_params();
        p.alpha1 = 1.0 - 1e-15;
        let st = initial_state(&p).unwrap();
        assert!((st.s - 1001.0).abs() < 1e-9);
        for v in [st.e1, st.e2, st.i1, st.i2] {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn initial_state_sums_to_population() {
        let mut p = test_params();
        for &(a1, a2) in &[(0.1, 0.9), (0.5, 0.5), (0.9995, 0.4), (0.3, 0.01)] {
            p.alpha1 = a1;
            p.alpha2 = a2;
            let st = initial_state(&p).unwrap();
            let n = p.n_population as f64;
            assert!(
                (st.total() - n).abs() <= 1e-12 * n,
                "sum {} != {n}",
                st.total()
            );
        }
    }

    #[test]
    fn initial_state_rejects_invalid() {
        let mut p = test_params();
        p.omega = 1.2;
        assert!(initial_state(&p).is_err());
        let mut p = test_params();
        p.n_population = 5;
        assert!(initial_state(&p).is_err());
        let mut p = test_params();
        p.d_i = 0.0;
        assert!(initial_state(&p).is_err());
    }

    #[test]
    fn rhs_disease_free_equilibrium() {
        let p = test_params();
        let st = CompartmentState {
            s: 1000.0,
            e1: 0.0,
            e2: 0.0,
            i1: 0.0,
            i2: 0.0,
            p1: 0.0,
            p2: 0.0,
            r: 5.0,
            d: 0.0,
        };
        let dy = rhs(3.0, &st, &p);
        assert!(dy.to_array().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rhs_hand_evaluated_flows() {
        let mut p = test_params();
        p.n_population = 1000;
        let st = CompartmentState {
            s: 990.0,
            e1: 0.0,
            e2: 0.0,
            i1: 5.0,
            i2: 5.0,
            p1: 0.0,
            p2: 0.0,
            r: 0.0,
            d: 0.0,
        };
        let dy = rhs(0.0, &st, &p);
        assert!((dy.s - -4.95).abs() < 1e-12);
        assert!((dy.e1 - 4.95).abs() < 1e-12);
        assert!((dy.i1 - -2.0).abs() < 1e-12);
        assert!((dy.p1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rhs_conserves_population() {
        let p = test_params();
        let st = CompartmentState {
            s: 400.0,
            e1: 100.0,
            e2: 90.0,
            i1: 80.0,
            i2: 70.0,
            p1: 60.0,
            p2: 50.0,
            r: 100.0,
            d: 55.0,
        };
        let dy = rhs(2.5, &st, &p);
        let sum: f64 = dy.to_array().iter().sum();
        let scale: f64 = dy.to_array().iter().map(|v| v.abs()).sum();
        assert!(sum.abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn rhs_death_flow_nonnegative() {
        let p = test_params();
        let mut st = CompartmentState::from_array([0.0; 9]);
        st.p2 = 42.0;
        assert!(rhs(0.0, &st, &p).d >= 0.0);
    }

    #[test]
    fn piecewise_midpoint_and_endpoints() {
        let f = PiecewiseLinear::new(vec![0.0, 7.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(f.eval(3.5), 3.0);
        assert_eq!(f.eval(0.0), 2.0);
        assert_eq!(f.eval(10.0), 4.0); // held constant beyond the last knot
        assert_eq!(f.eval(-1.0), 2.0); // and before the first
    }

    #[test]
    fn piecewise_multi_segment() {
        let f = PiecewiseLinear::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, -2.0]).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.eval(3.0), -2.0);
    }

    #[test]
    fn piecewise_rejects_bad_knots() {
        assert!(PiecewiseLinear::new(vec![0.0], vec![1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }
}

//! Electric-field statistics of the entangled two-cavity Bernoulli state
//!
//! `|Psi> = N_eta [ |p1,t1>|1-p2,pi+t2> + eta |1-p1,pi+t1>|p2,t2> ]`,
//! `N_eta = 1/sqrt(1 + eta^2)`.
//!
//! Every quantity has a closed form and an operator route (`*_operator`)
//! that takes the expectation of `a + a^dagger` directly on the state.
//! Fields are in units of `sqrt(4 pi hbar omega / V)`, products and
//! covariances in units of `4 pi hbar omega / V`.
//!
//! Sign pairing in the `p1 = p2 = 1/2`, `|eta| = 1` special case: the
//! covariance is `-cos(t1 + t2)` for `eta = +1` and `-cos(t1 - t2)` for
//! `eta = -1`.

use num_complex::Complex64;

use crate::binomial::GbsParams;
use crate::error::{invalid, Result};
use crate::fock::{tensor, Cavity, FieldOperator, TwoCavityState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledGbsParams {
    pub p1: f64,
    pub p2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub eta: f64,
}

impl EntangledGbsParams {
    pub fn new(p1: f64, p2: f64, theta1: f64, theta2: f64, eta: f64) -> Result<Self> {
        let params = Self {
            p1,
            p2,
            theta1,
            theta2,
            eta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Equal probabilities and phases in both cavities.
    pub fn symmetric(p: f64, theta: f64, eta: f64) -> Result<Self> {
        Self::new(p, p, theta, theta, eta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(name, format!("{p} is outside [0, 1]")));
            }
        }
        for (name, x) in [
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("eta", self.eta),
        ] {
            if !x.is_finite() {
                return Err(invalid(name, format!("{x} is not finite")));
            }
        }
        Ok(())
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.eta * self.eta).sqrt()
    }

    /// The two Bernoulli states `(|p_j, t_j>, |1-p_j, pi+t_j>)` of cavity `j`.
    pub fn cavity_basis(&self, cavity: Cavity) -> (GbsParams, GbsParams) {
        let (p, t) = match cavity {
            Cavity::First => (self.p1, self.theta1),
            Cavity::Second => (self.p2, self.theta2),
        };
        // validated on construction; the fields are public so re-check cheaply
        let g = GbsParams::new(p.clamp(0.0, 1.0), t).expect("finite phase");
        (g, g.partner())
    }
}

/// Field moments of the entangled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats {
    pub e1: f64,
    pub e2: f64,
    pub e1e2: f64,
    pub covariance: f64,
}

pub fn entangled_gbs_state(params: &EntangledGbsParams, n_max: usize) -> Result<TwoCavityState> {
    params.validate()?;
    let (a1, b1) = params.cavity_basis(Cavity::First);
    let (a2, b2) = params.cavity_basis(Cavity::Second);
    let first = tensor(&a1.state(n_max)?, &b2.state(n_max)?)?;
    let second = tensor(&b1.state(n_max)?, &a2.state(n_max)?)?;
    TwoCavityState::superpose(&[
        (Complex64::from(1.0), &first),
        (Complex64::from(params.eta), &second),
    ])
}

/// Field matrix elements in the basis `{|p,t>, |1-p,pi+t>}`:
/// `E11 = 2 sqrt(p(1-p)) cos t = -E22`, `E12 = (2p-1) cos t - i sin t`.
pub fn gbs_field_matrix_elements(g: GbsParams) -> (f64, Complex64) {
    let (p, t) = (g.p(), g.phi());
    let e11 = 2.0 * (p * (1.0 - p)).sqrt() * t.cos();
    let e12 = Complex64::new((2.0 * p - 1.0) * t.cos(), -t.sin());
    (e11, e12)
}

fn polarization(eta: f64) -> f64 {
    (1.0 - eta * eta) / (1.0 + eta * eta)
}

/// `f(p1, p2) = (2p1 - 1)(2p2 - 1)`.
pub fn f_factor(p1: f64, p2: f64) -> f64 {
    (2.0 * p1 - 1.0) * (2.0 * p2 - 1.0)
}

/// `h(p1, p2) = 2 sqrt(p1 p2 (1-p1)(1-p2))`.
pub fn h_factor(p1: f64, p2: f64) -> f64 {
    2.0 * (p1 * p2 * (1.0 - p1) * (1.0 - p2)).sqrt()
}

/// Closed-form `<E_j>`.
pub fn field_expectation(params: &EntangledGbsParams, cavity: Cavity) -> f64 {
    let (sign, p, t) = match cavity {
        Cavity::First => (1.0, params.p1, params.theta1),
        Cavity::Second => (-1.0, params.p2, params.theta2),
    };
    2.0 * sign * (p * (1.0 - p)).sqrt() * polarization(params.eta) * t.cos()
}

fn cross_term(params: &EntangledGbsParams) -> f64 {
    let (t1, t2) = (params.theta1, params.theta2);
    params.eta / (1.0 + params.eta * params.eta)
        * (f_factor(params.p1, params.p2) * t1.cos() * t2.cos() + t1.sin() * t2.sin())
}

/// Closed-form `<E_1 E_2>`; the `8 pi hbar omega / V` prefactor becomes 2.
pub fn field_correlation(params: &EntangledGbsParams) -> f64 {
    let cc = params.theta1.cos() * params.theta2.cos();
    2.0 * (cross_term(params) - h_factor(params.p1, params.p2) * cc)
}

/// Closed-form covariance together with the moments it is built from.
pub fn field_covariance(params: &EntangledGbsParams) -> FieldStats {
    let cc = params.theta1.cos() * params.theta2.cos();
    let pol = polarization(params.eta);
    let covariance =
        2.0 * (cross_term(params) - (1.0 - pol * pol) * h_factor(params.p1, params.p2) * cc);
    FieldStats {
        e1: field_expectation(params, Cavity::First),
        e2: field_expectation(params, Cavity::Second),
        e1e2: field_correlation(params),
        covariance,
    }
}

/// Operator route: expectations of `a + a^dagger` on the constructed state.
pub fn field_stats_operator(params: &EntangledGbsParams, n_max: usize) -> Result<FieldStats> {
    let state = entangled_gbs_state(params, n_max)?;
    let x = FieldOperator::quadrature(n_max)?;
    let e1 = state.expectation_local(&x, Cavity::First)?.re;
    let e2 = state.expectation_local(&x, Cavity::Second)?.re;
    let e1e2 = x.kron(&x).expectation(&state)?.re;
    Ok(FieldStats {
        e1,
        e2,
        e1e2,
        covariance: e1e2 - e1 * e2,
    })
}

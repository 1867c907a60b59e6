//! Generalized binomial states `|N, p, phi>` and their `N = 1` special case,
//! the generalized Bernoulli state `|p, phi> = sqrt(1-p)|0> + e^{i phi} sqrt(p)|1>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::StateVector;

/// Largest photon number accepted by [`BinomialParams`].
pub const MAX_PHOTONS: usize = 64;

/// Reduces an angle to the canonical interval `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(name, format!("{p} is outside [0, 1]")));
    }
    Ok(())
}

fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(invalid(name, format!("{x} is not finite")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialParams {
    n: usize,
    p: f64,
    phi: f64,
}

impl BinomialParams {
    pub fn new(n: usize, p: f64, phi: f64) -> Result<Self> {
        if n > MAX_PHOTONS {
            return Err(Error::PhotonNumberTooLarge(n));
        }
        check_probability("p", p)?;
        check_finite("phi", phi)?;
        Ok(Self {
            n,
            p,
            phi: wrap_phase(phi),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Phase in `(-pi, pi]`.
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Parameters `(p, phi)` of a generalized Bernoulli state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbsParams {
    p: f64,
    phi: f64,
}

impl GbsParams {
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_finite("phi", phi)?;
        Ok(Self {
            p,
            phi: wrap_phase(phi),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn as_binomial(&self) -> BinomialParams {
        BinomialParams {
            n: 1,
            p: self.p,
            phi: self.phi,
        }
    }

    /// `(1 - p, pi + phi)`, the unique orthogonal Bernoulli state.
    pub fn partner(&self) -> GbsParams {
        orthogonal_partner(*self)
    }

    pub fn state(&self, n_max: usize) -> Result<StateVector> {
        binomial_state(self.as_binomial(), n_max)
    }

    /// Same state up to the 2 pi periodicity of the phase.
    pub fn approx_eq(&self, other: &GbsParams, tol: f64) -> bool {
        (self.p - other.p).abs() <= tol && phase_distance(self.phi, other.phi) <= tol
    }
}

/// `C(N, k)` for `k = 0..=N` by the multiplicative recurrence.
pub fn binomial_coefficients(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    out.push(c);
    for k in 1..=n {
        c = c * (n + 1 - k) as f64 / k as f64;
        out.push(c);
    }
    out
}

/// `|N, p, phi> = sum_n [C(N,n) p^n (1-p)^(N-n)]^(1/2) e^{i n phi} |n>`.
pub fn binomial_state(params: BinomialParams, n_max: usize) -> Result<StateVector> {
    if n_max < params.n.max(1) {
        return Err(Error::CutoffTooSmall {
            min: params.n.max(1),
            actual: n_max,
        });
    }
    let coeffs = binomial_coefficients(params.n);
    let (p, q) = (params.p, 1.0 - params.p);
    let amps = (0..=n_max)
        .map(|k| {
            if k > params.n {
                return Complex64::new(0.0, 0.0);
            }
            let weight = coeffs[k] * p.powi(k as i32) * q.powi((params.n - k) as i32);
            Complex64::from_polar(weight.sqrt(), k as f64 * params.phi)
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Closed form of `<N, p, phi | N, p', phi'>`:
/// `(e^{i(phi'-phi)} sqrt(p p') + sqrt((1-p)(1-p')))^N`.
pub fn binomial_overlap(a: BinomialParams, b: BinomialParams) -> Result<Complex64> {
    if a.n != b.n {
        return Err(Error::PhotonNumberMismatch(a.n, b.n));
    }
    let base = Complex64::from_polar((a.p * b.p).sqrt(), b.phi - a.phi)
        + ((1.0 - a.p) * (1.0 - b.p)).sqrt();
    Ok(base.powi(a.n as i32))
}

pub fn orthogonal_partner(g: GbsParams) -> GbsParams {
    GbsParams {
        p: 1.0 - g.p,
        phi: wrap_phase(PI + g.phi),
    }
}

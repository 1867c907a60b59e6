//! CHSH analysis with the dichotomic field operator
//!
//! `F_p(phi) = |p,phi><p,phi| - |1-p,pi+phi><1-p,pi+phi|`,
//!
//! measured in both cavities of the symmetric entangled state
//! `N_eta [ |p,t>|1-p,pi+t> + eta |1-p,pi+t>|p,t> ]`.
//!
//! Closed forms live next to operator routes (`*_operator`) that build the
//! state and the tensor-product observable explicitly.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::binomial::GbsParams;
use crate::error::{invalid, Result};
use crate::field::{entangled_gbs_state, EntangledGbsParams};
use crate::fock::{FieldOperator, StateVector, TwoCavityState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomicParams {
    pub p: f64,
    pub phi: f64,
}

impl DichotomicParams {
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        GbsParams::new(p, phi)?;
        Ok(Self { p, phi })
    }

    pub fn eigenbasis(&self) -> Result<(GbsParams, GbsParams)> {
        let g = GbsParams::new(self.p, self.phi)?;
        Ok((g, g.partner()))
    }
}

/// Fock-basis form:
/// `(2p-1)(|1><1| - |0><0|) + 2 sqrt(p(1-p)) (e^{i phi}|1><0| + h.c.)`,
/// zero outside the `{|0>, |1>}` block.
pub fn dichotomic_operator(d: DichotomicParams, n_max: usize) -> Result<FieldOperator> {
    let mut m = FieldOperator::identity(n_max)?.matrix() * Complex64::new(0.0, 0.0);
    let z = 2.0 * d.p - 1.0;
    let off = 2.0 * (d.p * (1.0 - d.p)).sqrt();
    m[(0, 0)] = Complex64::from(-z);
    m[(1, 1)] = Complex64::from(z);
    m[(1, 0)] = Complex64::from_polar(off, d.phi);
    m[(0, 1)] = Complex64::from_polar(off, -d.phi);
    FieldOperator::from_matrix(m)
}

/// `F_p(phi')` in the basis `{|p,phi>, |1-p,pi+phi>}`: `[[F11, F12], [F12*, -F11]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbsBasisMatrix {
    pub f11: f64,
    pub f12: Complex64,
}

impl GbsBasisMatrix {
    /// `F11^2 + |F12|^2 - 1`; zero for any valid matrix.
    pub fn spectral_defect(&self) -> f64 {
        self.f11 * self.f11 + self.f12.norm_sqr() - 1.0
    }
}

pub fn dichotomic_gbs_matrix(p: f64, phi: f64, phi_op: f64) -> GbsBasisMatrix {
    let half = ((phi_op - phi) / 2.0).sin();
    let s2 = half * half;
    let q = p * (1.0 - p);
    GbsBasisMatrix {
        f11: 1.0 - 8.0 * q * s2,
        f12: Complex64::new(2.0 * (1.0 - 2.0 * p) * s2, (phi_op - phi).sin()) * (2.0 * q.sqrt()),
    }
}

/// Numeric projections `<b_i|F_p(phi')|b_j>` onto the Bernoulli basis.
pub fn dichotomic_gbs_matrix_operator(
    p: f64,
    phi: f64,
    phi_op: f64,
    n_max: usize,
) -> Result<GbsBasisMatrix> {
    let op = dichotomic_operator(DichotomicParams::new(p, phi_op)?, n_max)?;
    let (a, b) = DichotomicParams::new(p, phi)?.eigenbasis()?;
    let (a, b) = (a.state(n_max)?, b.state(n_max)?);
    Ok(GbsBasisMatrix {
        f11: op.matrix_element(&a, &a)?.re,
        f12: op.matrix_element(&a, &b)?,
    })
}

/// Eigenvectors `(+1, -1)` of `F_p(phi')` built from the `{|p,phi>, |1-p,pi+phi>}`
/// basis components. When `F12` vanishes the basis already diagonalizes the
/// operator and the defining pair `(|p,phi'>, |1-p,pi+phi'>)` is returned.
pub fn dichotomic_eigenstates(
    p: f64,
    phi: f64,
    phi_op: f64,
    n_max: usize,
) -> Result<(StateVector, StateVector)> {
    let m = dichotomic_gbs_matrix(p, phi, phi_op);
    let abs12 = m.f12.norm();
    if abs12 <= 1e-15 {
        let (plus, minus) = DichotomicParams::new(p, phi_op)?.eigenbasis()?;
        return Ok((plus.state(n_max)?, minus.state(n_max)?));
    }
    let (a, b) = DichotomicParams::new(p, phi)?.eigenbasis()?;
    let (a, b) = (a.state(n_max)?, b.state(n_max)?);
    let norm = (abs12 * abs12 + (1.0 - m.f11).powi(2)).sqrt();
    let combine = |ca: Complex64, cb: Complex64| {
        let amps = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (ca * x + cb * y) / norm)
            .collect();
        StateVector::normalized(amps)
    };
    let plus = combine(Complex64::from(abs12), (1.0 - m.f11) * abs12 / m.f12)?;
    let minus = combine((m.f11 - 1.0) * abs12 / m.f12.conj(), Complex64::from(abs12))?;
    Ok((plus, minus))
}

/// `G = 2|eta| / (1 + eta^2)`.
pub fn degree_of_entanglement(eta: f64) -> f64 {
    2.0 * eta.abs() / (1.0 + eta * eta)
}

/// The `0 <= eta <= 1` root of `degree_of_entanglement(eta) = g`.
pub fn eta_for_degree(g: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(invalid("G", format!("{g} is outside [0, 1]")));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    // (1 - sqrt(1 - g^2)) / g, written to avoid cancellation at small g
    Ok(g / (1.0 + (1.0 - g * g).sqrt()))
}

/// Measurement phases `(phi1, phi2, phi1', phi2')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub phi1: f64,
    pub phi2: f64,
    pub phi1p: f64,
    pub phi2p: f64,
}

impl Angles {
    /// The four CHSH settings in the order they enter `S_B`:
    /// `(phi1,phi2), (phi1,phi2'), (phi1',phi2), (phi1',phi2')`.
    pub fn settings(&self) -> [(f64, f64); 4] {
        [
            (self.phi1, self.phi2),
            (self.phi1, self.phi2p),
            (self.phi1p, self.phi2),
            (self.phi1p, self.phi2p),
        ]
    }

    pub fn shifted(&self, delta: f64) -> Angles {
        Angles {
            phi1: self.phi1 + delta,
            phi2: self.phi2 + delta,
            phi1p: self.phi1p + delta,
            phi2p: self.phi2p + delta,
        }
    }
}

/// Everything `S_B` depends on for the symmetric state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellConfig {
    pub p: f64,
    pub theta: f64,
    pub eta: f64,
    pub angles: Angles,
}

impl BellConfig {
    pub fn new(p: f64, theta: f64, eta: f64, angles: Angles) -> Result<Self> {
        let cfg = Self {
            p,
            theta,
            eta,
            angles,
        };
        cfg.state_params()?;
        Ok(cfg)
    }

    /// A preset angle set for the given state phase and entanglement.
    pub fn with_preset(preset: Preset, p: f64, theta: f64, eta: f64) -> Result<Self> {
        Self::new(p, theta, eta, angle_preset(preset, theta, eta))
    }

    pub fn state_params(&self) -> Result<EntangledGbsParams> {
        EntangledGbsParams::symmetric(self.p, self.theta, self.eta)
    }

    pub fn degree_of_entanglement(&self) -> f64 {
        degree_of_entanglement(self.eta)
    }
}

/// Closed-form `<F^(1)(phi_a) F^(2)(phi_b)>` for any `p`.
pub fn bell_correlation(config: &BellConfig, phi_a: f64, phi_b: f64) -> f64 {
    let (p, t, eta) = (config.p, config.theta, config.eta);
    let sa = ((phi_a - t) / 2.0).sin().powi(2);
    let sb = ((phi_b - t) / 2.0).sin().powi(2);
    let q = p * (1.0 - p);
    let entangled = eta / (1.0 + eta * eta)
        * (4.0 * (1.0 - 2.0 * p).powi(2) * sa * sb + (phi_a - t).sin() * (phi_b - t).sin());
    -1.0 + 8.0 * q * (sa + sb - 8.0 * q * sa * sb + entangled)
}

fn correlation_operator_on(
    state: &TwoCavityState,
    p: f64,
    phi_a: f64,
    phi_b: f64,
    n_max: usize,
) -> Result<f64> {
    let fa = dichotomic_operator(DichotomicParams::new(p, phi_a)?, n_max)?;
    let fb = dichotomic_operator(DichotomicParams::new(p, phi_b)?, n_max)?;
    Ok(fa.kron(&fb).expectation(state)?.re)
}

/// Operator route for the correlation on the symmetric state.
pub fn bell_correlation_operator(
    config: &BellConfig,
    phi_a: f64,
    phi_b: f64,
    n_max: usize,
) -> Result<f64> {
    let state = entangled_gbs_state(&config.state_params()?, n_max)?;
    correlation_operator_on(&state, config.p, phi_a, phi_b, n_max)
}

/// Operator-route correlation for an arbitrary (possibly asymmetric) state;
/// no closed form is provided for that case.
pub fn correlation_on_state(
    state: &EntangledGbsParams,
    p: f64,
    phi_a: f64,
    phi_b: f64,
    n_max: usize,
) -> Result<f64> {
    let psi = entangled_gbs_state(state, n_max)?;
    correlation_operator_on(&psi, p, phi_a, phi_b, n_max)
}

/// `|C1 - C2| + |C3 + C4|` over the settings of [`Angles::settings`].
pub fn chsh_combination(c: [f64; 4]) -> f64 {
    (c[0] - c[1]).abs() + (c[2] + c[3]).abs()
}

/// `S_B` from the closed-form correlations.
pub fn bell_function(config: &BellConfig) -> f64 {
    let c = config
        .angles
        .settings()
        .map(|(a, b)| bell_correlation(config, a, b));
    chsh_combination(c)
}

pub fn bell_function_operator(config: &BellConfig, n_max: usize) -> Result<f64> {
    let state = entangled_gbs_state(&config.state_params()?, n_max)?;
    let mut c = [0.0; 4];
    for (k, (a, b)) in config.angles.settings().into_iter().enumerate() {
        c[k] = correlation_operator_on(&state, config.p, a, b, n_max)?;
    }
    Ok(chsh_combination(c))
}

/// `S_B` at `p = 1/2` written in terms of `G`:
///
/// `|G s1 (s2 - s2') -+ c1 (c2 - c2')| + |G s1' (s2 + s2') -+ c1' (c2 + c2')|`
///
/// with `s = sin(phi - t)`, `c = cos(phi - t)`. The cosine terms enter with
/// `-` for `eta > 0` and `+` for `eta < 0` (the upper sign belongs to
/// negative `eta`). `config.p` is ignored.
pub fn bell_function_half(config: &BellConfig) -> f64 {
    let g = config.degree_of_entanglement();
    let sign = if config.eta < 0.0 { 1.0 } else { -1.0 };
    let t = config.theta;
    let Angles {
        phi1,
        phi2,
        phi1p,
        phi2p,
    } = config.angles;
    let (s1, c1) = (phi1 - t).sin_cos();
    let (s2, c2) = (phi2 - t).sin_cos();
    let (s1p, c1p) = (phi1p - t).sin_cos();
    let (s2p, c2p) = (phi2p - t).sin_cos();
    (g * s1 * (s2 - s2p) + sign * c1 * (c2 - c2p)).abs()
        + (g * s1p * (s2 + s2p) + sign * c1p * (c2 + c2p)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `pi/4` spacing; `S_B = sqrt(2)(1 + G)`.
    Maximal,
    /// `S_B = 7/4 + 3G/4`, violated for `G > 1/3`.
    Wide,
}

impl Preset {
    /// Smallest `G` at which the preset reaches `S_B = 2`.
    pub fn threshold(&self) -> f64 {
        match self {
            Preset::Maximal => 2f64.sqrt() - 1.0,
            Preset::Wide => 1.0 / 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Maximal => "maximal",
            Preset::Wide => "wide",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maximal" | "max" => Ok(Preset::Maximal),
            "wide" => Ok(Preset::Wide),
            other => Err(invalid("preset", format!("unknown preset {other:?}"))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Preset measurement phases relative to the state phase `theta`. Only the
/// sign of `eta` matters, and only for [`Preset::Wide`] (`eta = 0` counts as
/// positive).
pub fn angle_preset(preset: Preset, theta: f64, eta: f64) -> Angles {
    match preset {
        Preset::Maximal => Angles {
            phi1: theta,
            phi2: theta + FRAC_PI_4,
            phi1p: theta + FRAC_PI_2,
            phi2p: theta + 3.0 * FRAC_PI_4,
        },
        Preset::Wide => Angles {
            phi1: theta,
            phi2: theta,
            phi1p: theta + FRAC_PI_3,
            phi2p: if eta < 0.0 {
                theta + 2.0 * PI / 3.0
            } else {
                theta - 2.0 * PI / 3.0
            },
        },
    }
}

/// `S_B` of a preset at `p = 1/2` as a function of `G`.
pub fn analytic_s_b(preset: Preset, g: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(invalid("G", format!("{g} is outside [0, 1]")));
    }
    Ok(match preset {
        Preset::Maximal => 2f64.sqrt() * (1.0 + g),
        Preset::Wide => 1.75 + 0.75 * g,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PScan {
    pub p_star: f64,
    pub s_b_max: f64,
    /// `(p, S_B)` in ascending `p`.
    pub curve: Vec<(f64, f64)>,
}

/// Grid search of `S_B` over `p in [0, 1]`; `config.p` is ignored.
///
/// Values within `1e-12` of the maximum count as ties and resolve to the
/// grid point closest to `1/2`.
pub fn optimal_p_scan(config: &BellConfig, step: f64) -> Result<PScan> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid("step", format!("{step} must lie in (0, 1]")));
    }
    let n = (1.0 / step).round() as usize;
    if (n as f64 * step - 1.0).abs() > 1e-9 {
        return Err(invalid("step", format!("{step} does not divide [0, 1]")));
    }
    let curve: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let p = i as f64 / n as f64;
            (p, bell_function(&BellConfig { p, ..*config }))
        })
        .collect();
    let s_b_max = curve
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let p_star = curve
        .iter()
        .filter(|&&(_, s)| s >= s_b_max - 1e-12)
        .map(|&(p, _)| p)
        .min_by(|a, b| (a - 0.5).abs().total_cmp(&(b - 0.5).abs()))
        .expect("grid is non-empty");
    Ok(PScan {
        p_star,
        s_b_max,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DEFAULT_N_MAX, IDENTITY_TOL};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    const N: usize = DEFAULT_N_MAX;

    /// Eigenvalues from nalgebra's Hermitian solver, independent of the
    /// closed forms under test.
    fn spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
        let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn operator_examples() {
        let f = dichotomic_operator(DichotomicParams::new(1.0, 0.3).unwrap(), N).unwrap();
        assert_abs_diff_eq!(f.matrix()[(0, 0)].re, -1.0);
        assert_abs_diff_eq!(f.matrix()[(1, 1)].re, 1.0);
        assert_abs_diff_eq!(f.matrix()[(0, 1)].norm(), 0.0);
        let f = dichotomic_operator(DichotomicParams::new(0.5, 0.0).unwrap(), N).unwrap();
        assert_abs_diff_eq!(f.matrix()[(0, 0)].norm(), 0.0);
        assert_abs_diff_eq!(f.matrix()[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.matrix()[(1, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn operator_spectrum_on_grid() {
        for i in 0..=10 {
            for j in 0..12 {
                let (p, phi) = (i as f64 / 10.0, j as f64 * PI / 6.0 - PI);
                let f = dichotomic_operator(DichotomicParams::new(p, phi).unwrap(), N).unwrap();
                assert!(f.is_hermitian(IDENTITY_TOL));
                let ev = spectrum(f.matrix());
                assert!((ev[0] + 1.0).abs() < IDENTITY_TOL);
                assert!(
                    ev[1].abs() < IDENTITY_TOL,
                    "padding level must stay at zero"
                );
                assert!((ev[2] - 1.0).abs() < IDENTITY_TOL);
            }
        }
    }

    #[test]
    fn operator_acts_as_spectral_decomposition() {
        for &(p, phi) in &[(0.2, 0.4), (0.5, -1.0), (0.93, 2.9)] {
            let d = DichotomicParams::new(p, phi).unwrap();
            let f = dichotomic_operator(d, N).unwrap();
            let (a, b) = d.eigenbasis().unwrap();
            let (a, b) = (a.state(N).unwrap(), b.state(N).unwrap());
            let fa = f.apply(&a).unwrap();
            let fb = f.apply(&b).unwrap();
            for n in 0..=N {
                assert!((fa.amplitude(n) - a.amplitude(n)).norm() < IDENTITY_TOL);
                assert!((fb.amplitude(n) + b.amplitude(n)).norm() < IDENTITY_TOL);
            }
        }
    }

    #[test]
    fn basis_matrix_examples() {
        let m = dichotomic_gbs_matrix(0.3, 0.7, 0.7);
        assert_abs_diff_eq!(m.f11, 1.0);
        assert_abs_diff_eq!(m.f12.norm(), 0.0);
        let m = dichotomic_gbs_matrix(0.5, 0.2, 0.2 + FRAC_PI_2);
        assert_abs_diff_eq!(m.f11, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.f12 - Complex64::i()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn basis_matrix_matches_projection() {
        for &p in &[0.0, 0.15, 0.5, 0.77, 1.0] {
            for &phi in &[-2.0, 0.0, 1.3] {
                for &phi_op in &[-3.0, -0.4, 0.0, 1.3, 2.2] {
                    let closed = dichotomic_gbs_matrix(p, phi, phi_op);
                    let numeric = dichotomic_gbs_matrix_operator(p, phi, phi_op, N).unwrap();
                    assert!((closed.f11 - numeric.f11).abs() < IDENTITY_TOL);
                    assert!((closed.f12 - numeric.f12).norm() < IDENTITY_TOL);
                    assert!(closed.spectral_defect().abs() < IDENTITY_TOL);
                }
            }
        }
    }

    fn assert_eigenvector(f: &FieldOperator, v: &StateVector, lambda: f64) {
        let fv = f.apply(v).unwrap();
        for n in 0..v.dim() {
            assert!((fv.amplitude(n) - lambda * v.amplitude(n)).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenstates_including_degenerate_cases() {
        let cases = [
            (0.3, 0.5, 0.5),       // phi' = phi
            (0.5, 0.0, PI),        // F11 = -1, F12 = 0
            (1.0, 0.2, 1.4),       // p at the endpoint
            (0.5, 0.0, FRAC_PI_2), // generic
            (0.8, -1.1, 2.6),
        ];
        for &(p, phi, phi_op) in &cases {
            let (plus, minus) = dichotomic_eigenstates(p, phi, phi_op, N).unwrap();
            let f = dichotomic_operator(DichotomicParams::new(p, phi_op).unwrap(), N).unwrap();
            assert_eigenvector(&f, &plus, 1.0);
            assert_eigenvector(&f, &minus, -1.0);
            assert!(plus.inner(&minus).unwrap().norm() < IDENTITY_TOL);
            let target = GbsParams::new(p, phi_op).unwrap().state(N).unwrap();
            assert_abs_diff_eq!(plus.inner(&target).unwrap().norm(), 1.0, epsilon = 1e-12);
        }
        let (plus, minus) = dichotomic_eigenstates(0.3, 0.5, 0.5, N).unwrap();
        let g = GbsParams::new(0.3, 0.5).unwrap();
        assert_eq!(plus, g.state(N).unwrap());
        assert_eq!(minus, g.partner().state(N).unwrap());
    }

    #[test]
    fn entanglement_degree_examples() {
        assert_abs_diff_eq!(degree_of_entanglement(1.0), 1.0);
        assert_abs_diff_eq!(degree_of_entanglement(0.0), 0.0);
        assert_abs_diff_eq!(degree_of_entanglement(2.0), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(degree_of_entanglement(0.5), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(degree_of_entanglement(-0.5), 0.8, epsilon = 1e-15);
        for g in [0.0, 1e-9, 0.3, 2f64.sqrt() - 1.0, 1.0] {
            let eta = eta_for_degree(g).unwrap();
            assert!((0.0..=1.0).contains(&eta));
            assert_abs_diff_eq!(degree_of_entanglement(eta), g, epsilon = 1e-15);
        }
        assert!(eta_for_degree(1.1).is_err());
    }

    #[test]
    fn correlation_examples() {
        let cfg =
            |eta| BellConfig::new(0.5, 0.0, eta, angle_preset(Preset::Maximal, 0.0, eta)).unwrap();
        assert_abs_diff_eq!(
            bell_correlation(&cfg(1.0), 0.0, FRAC_PI_4),
            -FRAC_PI_4.cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bell_correlation_operator(&cfg(1.0), 0.0, FRAC_PI_4, N).unwrap(),
            -FRAC_PI_4.cos(),
            epsilon = 1e-12
        );
        for &(a, b) in &[(0.3, 1.2), (-2.0, 0.5)] {
            assert_abs_diff_eq!(
                bell_correlation(&cfg(0.0), a, b),
                -a.cos() * b.cos(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn closed_form_correlation_matches_operator_grid() {
        let vals = |lo: f64, hi: f64| [lo, (lo + hi) / 2.0, hi];
        for p in vals(0.1, 0.9) {
            for theta in vals(-1.0, 2.0) {
                for eta in vals(-2.0, 1.5) {
                    for a in vals(-3.0, 3.0) {
                        for b in vals(-0.5, 2.5) {
                            let cfg = BellConfig::new(
                                p,
                                theta,
                                eta,
                                angle_preset(Preset::Maximal, theta, eta),
                            )
                            .unwrap();
                            let closed = bell_correlation(&cfg, a, b);
                            let op = bell_correlation_operator(&cfg, a, b, N).unwrap();
                            assert!((closed - op).abs() < IDENTITY_TOL, "{closed} vs {op}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn preset_values() {
        let a = angle_preset(Preset::Maximal, 0.0, 1.0);
        assert_eq!(
            (a.phi1, a.phi2, a.phi1p, a.phi2p),
            (0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4)
        );
        let w = angle_preset(Preset::Wide, 0.0, 1.0);
        assert_eq!((w.phi1, w.phi2, w.phi1p), (0.0, 0.0, FRAC_PI_3));
        assert_abs_diff_eq!(w.phi2p, -2.0 * PI / 3.0);
        assert_abs_diff_eq!(angle_preset(Preset::Wide, 0.0, -1.0).phi2p, 2.0 * PI / 3.0);
        for eta in [1.0, -1.0] {
            let s = angle_preset(Preset::Maximal, 0.3, eta);
            let base = angle_preset(Preset::Maximal, 0.0, eta).shifted(0.3);
            assert_eq!(s, base);
        }
    }

    #[test]
    fn analytic_values() {
        assert_abs_diff_eq!(
            analytic_s_b(Preset::Maximal, 1.0).unwrap(),
            2.0 * 2f64.sqrt()
        );
        assert_abs_diff_eq!(analytic_s_b(Preset::Maximal, 0.0).unwrap(), 2f64.sqrt());
        assert_abs_diff_eq!(
            analytic_s_b(Preset::Wide, 1.0 / 3.0).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        for preset in [Preset::Maximal, Preset::Wide] {
            assert_abs_diff_eq!(
                analytic_s_b(preset, preset.threshold()).unwrap(),
                2.0,
                epsilon = 1e-15
            );
        }
        assert!(analytic_s_b(Preset::Wide, -0.1).is_err());
    }

    #[test]
    fn bell_function_reproduces_presets() {
        for preset in [Preset::Maximal, Preset::Wide] {
            for sign in [1.0, -1.0] {
                for g in [0.0, 0.25, preset.threshold(), 0.8, 1.0] {
                    let eta = sign * eta_for_degree(g).unwrap();
                    let cfg = BellConfig::with_preset(preset, 0.5, 0.4, eta).unwrap();
                    let expected = analytic_s_b(preset, g).unwrap();
                    assert!((bell_function(&cfg) - expected).abs() < 1e-9);
                    assert!((bell_function_half(&cfg) - bell_function(&cfg)).abs() < IDENTITY_TOL);
                    assert!((bell_function_operator(&cfg, N).unwrap() - expected).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn closed_form_sign_pairing_with_sampled_eta() {
        // Arbitrary angles, both signs of eta, compared with the CHSH sum of
        // correlations: fixes which sign goes with which eta.
        for &eta in &[-3.0, -0.7, -0.2, 0.2, 0.9, 4.0] {
            let angles = Angles {
                phi1: 0.3,
                phi2: 1.9,
                phi1p: -0.8,
                phi2p: 2.4,
            };
            let cfg = BellConfig::new(0.5, 0.1, eta, angles).unwrap();
            assert!((bell_function_half(&cfg) - bell_function(&cfg)).abs() < IDENTITY_TOL);
        }
    }

    #[test]
    fn reciprocal_eta_gives_same_s_b() {
        for preset in [Preset::Maximal, Preset::Wide] {
            for eta in [0.3f64, 0.7, -0.5] {
                let a = bell_function(&BellConfig::with_preset(preset, 0.5, 0.0, eta).unwrap());
                let b =
                    bell_function(&BellConfig::with_preset(preset, 0.5, 0.0, 1.0 / eta).unwrap());
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn p_scan_examples() {
        let cfg = BellConfig::with_preset(Preset::Maximal, 0.5, 0.0, 1.0).unwrap();
        let scan = optimal_p_scan(&cfg, 0.01).unwrap();
        assert_eq!(scan.p_star, 0.5);
        assert_eq!(scan.curve.len(), 101);
        let cfg = BellConfig::with_preset(Preset::Wide, 0.5, 0.0, 0.8).unwrap();
        let scan = optimal_p_scan(&cfg, 0.01).unwrap();
        assert_eq!(scan.p_star, 0.5);
        let n = scan.curve.len();
        for i in 0..n {
            assert!((scan.curve[i].1 - scan.curve[n - 1 - i].1).abs() < 1e-9);
        }
        assert!(optimal_p_scan(&cfg, 0.3).is_err());
        assert!(optimal_p_scan(&cfg, 0.0).is_err());
    }

    #[test]
    fn p_scan_ties_resolve_toward_half() {
        // eta = 0 with angles equal to theta: S_B = 2 for every p
        let angles = Angles {
            phi1: 0.0,
            phi2: 0.0,
            phi1p: 0.0,
            phi2p: 0.0,
        };
        let cfg = BellConfig::new(0.5, 0.0, 0.0, angles).unwrap();
        let scan = optimal_p_scan(&cfg, 0.25).unwrap();
        assert_eq!(scan.p_star, 0.5);
    }

    proptest! {
        #[test]
        fn tsirelson_bound(
            p in 0.0f64..=1.0, theta in -4.0f64..4.0, eta in -5.0f64..5.0,
            a in -4.0f64..4.0, b in -4.0f64..4.0, c in -4.0f64..4.0, d in -4.0f64..4.0,
        ) {
            let cfg = BellConfig::new(p, theta, eta, Angles { phi1: a, phi2: b, phi1p: c, phi2p: d }).unwrap();
            prop_assert!(bell_function(&cfg) <= 2.0 * 2f64.sqrt() + 1e-9);
        }

        #[test]
        fn common_phase_shift_is_invisible(
            p in 0.0f64..=1.0, theta in -4.0f64..4.0, eta in -5.0f64..5.0, shift in -6.0f64..6.0,
            a in -4.0f64..4.0, b in -4.0f64..4.0, c in -4.0f64..4.0, d in -4.0f64..4.0,
        ) {
            let angles = Angles { phi1: a, phi2: b, phi1p: c, phi2p: d };
            let cfg = BellConfig::new(p, theta, eta, angles).unwrap();
            let moved = BellConfig::new(p, theta + shift, eta, angles.shifted(shift)).unwrap();
            prop_assert!((bell_function(&cfg) - bell_function(&moved)).abs() < IDENTITY_TOL);
            prop_assert!((bell_correlation(&cfg, a, b) - bell_correlation(&moved, a + shift, b + shift)).abs() < IDENTITY_TOL);
        }
    }
}

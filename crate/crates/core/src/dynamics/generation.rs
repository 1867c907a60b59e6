//! Two-cavity state generation from an entangled atom pair.
//!
//! Atom `j` (initially entangled with its partner, both cavities empty)
//! crosses a Ramsey zone set to `cos(theta_j/2) = sqrt(p_j)`, `phi_j = -t_j`
//! and then interacts with cavity `j` for `g t = pi/2`. Both atoms leave in
//! `|down>` and the photons they deposit form
//! `N_eta [ |p1,t1>|1-p2,pi+t2> + eta |1-p1,pi+t1>|p2,t2> ]`.
//!
//! With the Ramsey phases alone, the `|up,down>` and `|down,up>` branches pick
//! up different global phases, `-e^{-i t1}` and `-e^{-i t2}`, so the field
//! comes out with `eta` replaced by `eta e^{i(t1 - t2)}`. Under
//! [`RamseyPhaseConvention::Compensated`] (the default) atom `j` first
//! acquires a ground-level phase `e^{-i t_j}`, which equalizes the branches
//! for every choice of phases. [`RamseyPhaseConvention::Literal`] omits that
//! step and is exact only when `t1 = t2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{jc_on, RamseyParams, DOWN, PROBE_PULSE, UP};
use crate::error::{invalid, Result};
use crate::field::EntangledGbsParams;
use crate::fock::{Register, TwoCavityState, ONE, ZERO};

pub(crate) const ATOM1: usize = 0;
pub(crate) const ATOM2: usize = 1;
pub(crate) const CAV1: usize = 2;
pub(crate) const CAV2: usize = 3;

/// Atom pair `N_eta (|up,down> + eta |down,up>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAtomPair {
    eta: f64,
}

impl InitialAtomPair {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(invalid("eta", format!("{eta} is not finite")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.eta * self.eta).sqrt()
    }

    /// Amplitudes over `(atom1, atom2)`, atom 1 major, `down = 0`.
    pub fn amplitudes(&self) -> DVector<Complex64> {
        let n = self.normalization();
        let mut v = DVector::from_element(4, ZERO);
        v[UP * 2 + DOWN] = Complex64::from(n);
        v[DOWN * 2 + UP] = Complex64::from(n * self.eta);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RamseyPhaseConvention {
    /// Ramsey phases only.
    Literal,
    /// Ground-level phase `e^{-i t_j}` on atom `j` before its Ramsey zone.
    #[default]
    Compensated,
}

/// Joint atoms-plus-cavities state after the generation sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    register: Register,
}

impl Generation {
    /// Sites `[atom1, atom2, cavity1, cavity2]`.
    pub fn register(&self) -> &Register {
        &self.register
    }

    /// Probability of finding both atoms in `|down>`.
    pub fn ground_probability(&self) -> f64 {
        self.register.weight_where(&[(ATOM1, DOWN), (ATOM2, DOWN)])
    }

    /// `[P(dd), P(du), P(ud), P(uu)]` for the two generation atoms.
    pub fn atom_probabilities(&self) -> Vec<f64> {
        self.register.marginal(&[ATOM1, ATOM2])
    }

    /// Cavity state conditioned on both atoms in `|down>`, renormalized.
    pub fn field(&self) -> Result<TwoCavityState> {
        let branch = self
            .register
            .slice(&[(ATOM1, DOWN), (ATOM2, DOWN)])
            .to_two_cavity_unnormalized()?;
        TwoCavityState::superpose(&[(ONE, &branch)])
    }

    /// `sum_{a1,a2} |<target| a1 a2 component>|^2`: the fidelity of the
    /// reduced cavity state with `target`, whatever the atoms do.
    pub fn fidelity(&self, target: &TwoCavityState) -> Result<f64> {
        let mut total = 0.0;
        for a1 in [DOWN, UP] {
            for a2 in [DOWN, UP] {
                let branch = self
                    .register
                    .slice(&[(ATOM1, a1), (ATOM2, a2)])
                    .to_two_cavity_unnormalized()?;
                total += target.inner(&branch)?.norm_sqr();
            }
        }
        Ok(total)
    }
}

/// Runs the generation sequence with the nominal `g t = pi/2`.
pub fn generate_entangled_gbs(
    init: InitialAtomPair,
    target: &EntangledGbsParams,
    n_max: usize,
    convention: RamseyPhaseConvention,
) -> Result<Generation> {
    generate_with_timing(init, target, n_max, convention, PROBE_PULSE)
}

/// Generation sequence with an arbitrary atom-cavity interaction `gt`.
/// Only `p1, p2, theta1, theta2` of `target` are used; the entanglement
/// weight comes from `init`.
pub fn generate_with_timing(
    init: InitialAtomPair,
    target: &EntangledGbsParams,
    n_max: usize,
    convention: RamseyPhaseConvention,
    gt: f64,
) -> Result<Generation> {
    target.validate()?;
    if n_max < 1 {
        return Err(crate::error::Error::CutoffTooSmall {
            min: 1,
            actual: n_max,
        });
    }
    let vacuum = DVector::from_fn(n_max + 1, |n, _| if n == 0 { ONE } else { ZERO });
    let mut register = Register::product(&[&init.amplitudes(), &vacuum, &vacuum]);
    // split the pair register into two atom sites
    register = Register::from_parts(
        vec![2, 2, n_max + 1, n_max + 1],
        register.amplitudes().clone(),
    )?;

    for (atom, cavity, p, t) in [
        (ATOM1, CAV1, target.p1, target.theta1),
        (ATOM2, CAV2, target.p2, target.theta2),
    ] {
        if convention == RamseyPhaseConvention::Compensated {
            let mut phase = DMatrix::identity(2, 2);
            phase[(DOWN, DOWN)] = Complex64::from_polar(1.0, -t);
            register.apply(&[atom], &phase)?;
        }
        register.apply(&[atom], &RamseyParams::from_probability(p, -t)?.matrix())?;
        jc_on(&mut register, atom, cavity, gt)?;
    }
    Ok(Generation { register })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::GbsParams;
    use crate::field::entangled_gbs_state;
    use crate::fock::{tensor, RandomStream, DEFAULT_N_MAX};
    use std::f64::consts::PI;

    const N: usize = DEFAULT_N_MAX;

    fn run(params: &EntangledGbsParams, convention: RamseyPhaseConvention) -> Generation {
        let init = InitialAtomPair::new(params.eta).unwrap();
        generate_entangled_gbs(init, params, N, convention).unwrap()
    }

    #[test]
    fn maximally_entangled_example() {
        let params = EntangledGbsParams::symmetric(0.5, 0.0, 1.0).unwrap();
        let g = run(&params, RamseyPhaseConvention::Compensated);
        let target = entangled_gbs_state(&params, N).unwrap();
        assert!((g.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.ground_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_when_eta_vanishes() {
        let params = EntangledGbsParams::new(0.3, 0.8, 0.4, -1.2, 0.0).unwrap();
        let g = run(&params, RamseyPhaseConvention::Compensated);
        let a = GbsParams::new(0.3, 0.4).unwrap().state(N).unwrap();
        let b = GbsParams::new(0.8, -1.2)
            .unwrap()
            .partner()
            .state(N)
            .unwrap();
        let product = tensor(&a, &b).unwrap();
        assert!((g.field().unwrap().fidelity(&product).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_convention_is_exact_on_random_parameters() {
        let mut rng = RandomStream::new(7);
        for _ in 0..100 {
            let params = EntangledGbsParams::new(
                rng.uniform(),
                rng.uniform(),
                (2.0 * rng.uniform() - 1.0) * PI,
                (2.0 * rng.uniform() - 1.0) * PI,
                (rng.uniform() - 0.5) * 6.0,
            )
            .unwrap();
            let g = run(&params, RamseyPhaseConvention::Compensated);
            let target = entangled_gbs_state(&params, N).unwrap();
            assert!((g.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
            assert!((g.ground_probability() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_convention_rotates_eta_by_the_phase_difference() {
        let params = EntangledGbsParams::new(0.5, 0.5, 0.9, 0.2, 1.0).unwrap();
        let g = run(&params, RamseyPhaseConvention::Literal);
        assert!((g.ground_probability() - 1.0).abs() < 1e-12);
        let target = entangled_gbs_state(&params, N).unwrap();
        assert!(g.fidelity(&target).unwrap() < 0.99);

        // the literal output is the target with eta -> eta e^{i(t1 - t2)}
        let (a1, b1) = (
            GbsParams::new(0.5, 0.9).unwrap(),
            GbsParams::new(0.5, 0.9).unwrap().partner(),
        );
        let (a2, b2) = (
            GbsParams::new(0.5, 0.2).unwrap(),
            GbsParams::new(0.5, 0.2).unwrap().partner(),
        );
        let first = tensor(&a1.state(N).unwrap(), &b2.state(N).unwrap()).unwrap();
        let second = tensor(&b1.state(N).unwrap(), &a2.state(N).unwrap()).unwrap();
        let rotated = TwoCavityState::superpose(&[
            (ONE, &first),
            (Complex64::from_polar(1.0, 0.9 - 0.2), &second),
        ])
        .unwrap();
        assert!((g.field().unwrap().fidelity(&rotated).unwrap() - 1.0).abs() < 1e-12);

        let equal = EntangledGbsParams::symmetric(0.3, 1.1, -0.7).unwrap();
        let g = run(&equal, RamseyPhaseConvention::Literal);
        let target = entangled_gbs_state(&equal, N).unwrap();
        assert!((g.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mistimed_interaction_leaves_atoms_excited() {
        let params = EntangledGbsParams::symmetric(0.5, 0.0, 1.0).unwrap();
        let init = InitialAtomPair::new(1.0).unwrap();
        let g = generate_with_timing(init, &params, N, RamseyPhaseConvention::Compensated, 1.4)
            .unwrap();
        assert!(g.ground_probability() < 1.0 - 1e-3);
        assert!((g.atom_probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generation_needs_a_photon_slot() {
        let params = EntangledGbsParams::symmetric(0.5, 0.0, 1.0).unwrap();
        let init = InitialAtomPair::new(1.0).unwrap();
        assert!(
            generate_entangled_gbs(init, &params, 0, RamseyPhaseConvention::Compensated).is_err()
        );
    }
}

//! Atom-cavity dynamics in the resonant interaction picture.
//!
//! Two-level atoms use index 0 for the ground level `|down>` and 1 for the
//! excited level `|up>`. Interaction durations are given as the dimensionless
//! Rabi phase `g t`; free-evolution phases are never tracked.
//!
//! No decay channels exist here: the protocols assume atomic and photon
//! lifetimes much longer than the interaction times.

mod experiment;
mod generation;

pub use experiment::{
    detection_threshold_check, run_bell_experiment, sample_setting, setting_distribution,
    timing_sensitivity, BellEstimate, DetectionReport, ExperimentConfig, OutcomeCounts,
    OutcomeDistribution, SensitivityRow, SettingEstimate, DETECTION_THRESHOLD,
};
pub use generation::{
    generate_entangled_gbs, generate_with_timing, Generation, InitialAtomPair,
    RamseyPhaseConvention,
};

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bell::DichotomicParams;
use crate::error::{invalid, Error, Result};
use crate::fock::{pick, RandomStream, Register, StateVector, IDENTITY_TOL, SPAN_TOL, ZERO};

pub const DOWN: usize = 0;
pub const UP: usize = 1;

/// Rabi phase `g T` that maps `|down, 1>` onto `|up, 0>`.
pub const PROBE_PULSE: f64 = FRAC_PI_2;

/// Joint pure state of one two-level atom and one cavity mode;
/// row index is the atomic level, column index the photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldState {
    amps: DMatrix<Complex64>,
}

impl AtomFieldState {
    /// `(c_down |down> + c_up |up>) (x) field`.
    pub fn product(down: Complex64, up: Complex64, field: &StateVector) -> Result<Self> {
        let norm = down.norm_sqr() + up.norm_sqr();
        if (norm - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let d = field.dim();
        let amps = DMatrix::from_fn(2, d, |a, n| {
            let c = if a == DOWN { down } else { up };
            c * field.amplitude(n)
        });
        Ok(Self { amps })
    }

    /// Atom in `|down>`, cavity in `field`.
    pub fn ground(field: &StateVector) -> Self {
        Self::product(Complex64::from(1.0), ZERO, field).expect("unit atom state")
    }

    pub fn n_max(&self) -> usize {
        self.amps.ncols() - 1
    }

    pub fn amplitude(&self, level: usize, n: usize) -> Complex64 {
        self.amps[(level, n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `[P(down), P(up)]`.
    pub fn atom_probabilities(&self) -> [f64; 2] {
        [
            self.amps.row(DOWN).norm_squared(),
            self.amps.row(UP).norm_squared(),
        ]
    }

    /// Normalized field state conditioned on the atom being found in `level`,
    /// or `None` if that level is unpopulated.
    pub fn field_given(&self, level: usize) -> Option<StateVector> {
        let row: Vec<Complex64> = self.amps.row(level).iter().copied().collect();
        StateVector::normalized(row).ok()
    }

    fn to_register(&self) -> Register {
        let d = self.amps.ncols();
        let flat = nalgebra::DVector::from_fn(2 * d, |i, _| self.amps[(i / d, i % d)]);
        Register::from_parts(vec![2, d], flat).expect("consistent dims")
    }

    fn from_register(reg: &Register) -> Self {
        let d = reg.dims()[1];
        Self {
            amps: DMatrix::from_fn(2, d, |a, n| reg.amplitudes()[a * d + n]),
        }
    }
}

/// Resonant Jaynes-Cummings propagator on `atom (x) cavity` (atom-major).
///
/// Each doublet `{|up, n>, |down, n+1>}` rotates by `g t sqrt(n+1)`:
/// `|up n> -> cos|up n> - sin|down n+1>`, `|down n+1> -> cos|down n+1> + sin|up n>`.
/// `|down 0>` is stationary; `|up n_max>` has no partner inside the cutoff
/// and is left untouched (callers must keep it empty).
pub fn jc_matrix(gt: f64, n_max: usize) -> DMatrix<Complex64> {
    let d = n_max + 1;
    let idx = |level: usize, n: usize| level * d + n;
    let mut u = DMatrix::identity(2 * d, 2 * d);
    for n in 0..n_max {
        let (s, c) = (gt * ((n + 1) as f64).sqrt()).sin_cos();
        let (up, down) = (idx(UP, n), idx(DOWN, n + 1));
        u[(up, up)] = Complex64::from(c);
        u[(down, up)] = Complex64::from(-s);
        u[(down, down)] = Complex64::from(c);
        u[(up, down)] = Complex64::from(s);
    }
    u
}

fn check_leakage(reg: &Register, atom: usize, cavity: usize) -> Result<()> {
    let n_max = reg.dims()[cavity] - 1;
    let weight = reg.weight_where(&[(atom, UP), (cavity, n_max)]);
    if weight.sqrt() > IDENTITY_TOL {
        return Err(Error::FockLeakage(weight));
    }
    Ok(())
}

/// Applies the JC propagator to one atom-cavity pair of a register.
pub(crate) fn jc_on(reg: &mut Register, atom: usize, cavity: usize, gt: f64) -> Result<()> {
    check_leakage(reg, atom, cavity)?;
    let n_max = reg.dims()[cavity] - 1;
    reg.apply(&[atom, cavity], &jc_matrix(gt, n_max))
}

pub fn jc_evolve(s: &AtomFieldState, gt: f64) -> Result<AtomFieldState> {
    let mut reg = s.to_register();
    jc_on(&mut reg, 0, 1, gt)?;
    Ok(AtomFieldState::from_register(&reg))
}

/// Classical-field rotation of the atom:
/// `|up> -> cos(theta/2)|up> - e^{i phi} sin(theta/2)|down>`,
/// `|down> -> e^{-i phi} sin(theta/2)|up> + cos(theta/2)|down>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyParams {
    pub theta: f64,
    pub phi: f64,
}

impl RamseyParams {
    /// Pulse with `cos(theta/2) = sqrt(p)`, `sin(theta/2) = sqrt(1-p)`.
    pub fn from_probability(p: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("{p} is outside [0, 1]")));
        }
        Ok(Self {
            theta: 2.0 * p.sqrt().acos(),
            phi,
        })
    }

    /// Settings that turn the probe atom into a meter for `F_p(phi)`.
    pub fn for_probe(d: DichotomicParams) -> Result<Self> {
        Self::from_probability(d.p, -d.phi)
    }

    /// 2x2 unitary in the `(down, up)` basis.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let mut m = DMatrix::from_element(2, 2, ZERO);
        m[(DOWN, DOWN)] = Complex64::from(c);
        m[(UP, DOWN)] = Complex64::from_polar(s, -self.phi);
        m[(DOWN, UP)] = Complex64::from_polar(-s, self.phi);
        m[(UP, UP)] = Complex64::from(c);
        m
    }
}

pub fn ramsey_rotate(s: &AtomFieldState, r: RamseyParams) -> AtomFieldState {
    AtomFieldState {
        amps: r.matrix() * &s.amps,
    }
}

/// Outcome of a dichotomic measurement: `|up>` reads `+1`, `|down>` reads `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    fn from_level(level: usize) -> Self {
        if level == UP {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Probe sequence up to (not including) detection: ground-state atom,
/// resonant interaction for `gt`, then the Ramsey zone set for `d`.
pub fn probe_sequence(field: &StateVector, d: DichotomicParams, gt: f64) -> Result<AtomFieldState> {
    let weight = field.weight_above_one();
    if weight > SPAN_TOL {
        return Err(Error::OutsideMeasurementSpan(weight));
    }
    let evolved = jc_evolve(&AtomFieldState::ground(field), gt)?;
    Ok(ramsey_rotate(&evolved, RamseyParams::for_probe(d)?))
}

/// `[P(+1), P(-1)]` for a probe measurement of `F_p(phi)`.
pub fn probe_probabilities(field: &StateVector, d: DichotomicParams) -> Result<[f64; 2]> {
    let [down, up] = probe_sequence(field, d, PROBE_PULSE)?.atom_probabilities();
    Ok([up, down])
}

/// Measures `F_p(phi)` on a single cavity with a probe atom and returns the
/// outcome with the conditional cavity state, which is the vacuum (up to a
/// phase) in both branches.
pub fn probe_measure(
    field: &StateVector,
    d: DichotomicParams,
    rng: &mut RandomStream,
) -> Result<(Outcome, StateVector)> {
    let out = probe_sequence(field, d, PROBE_PULSE)?;
    let level = pick(&out.atom_probabilities(), rng.uniform());
    let post = out.field_given(level).ok_or(Error::NotNormalized(0.0))?;
    Ok((Outcome::from_level(level), post))
}

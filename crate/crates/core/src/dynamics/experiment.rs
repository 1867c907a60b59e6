//! Monte Carlo CHSH experiments with probe atoms.
//!
//! For each of the four settings the generated two-cavity state is probed by
//! one atom per cavity, and the joint `(+-1, +-1)` distribution of the two
//! atomic detections is computed exactly from the atoms-plus-cavities
//! register. Shots are then drawn from that distribution. Both probes are
//! sampled in a single Born event.
//!
//! Shot `i` of setting `k` uses its own random stream keyed by
//! `(seed, k << 40 | i)`, so results do not depend on how shots are
//! distributed over threads.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rayon::prelude::*;

use super::generation::{ATOM1, ATOM2, CAV1, CAV2};
use super::{
    generate_with_timing, jc_on, Generation, InitialAtomPair, RamseyParams, RamseyPhaseConvention,
    DOWN, UP,
};
use crate::bell::{chsh_combination, BellConfig, DichotomicParams};
use crate::error::{invalid, Error, Result};
use crate::field::entangled_gbs_state;
use crate::fock::{pick, RandomStream, Register, DEFAULT_N_MAX, SPAN_TOL};

/// Minimum detector efficiency `2/(sqrt 2 + 1)` for a CHSH violation with a
/// maximally entangled state when undetected events are not discarded.
pub const DETECTION_THRESHOLD: f64 = 2.0 / (SQRT_2 + 1.0);

const PROBE1: usize = 4;
const PROBE2: usize = 5;
const SHOT_BITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub bell: BellConfig,
    pub shots: u64,
    pub seed: u64,
    /// Independent detection probability of each probe atom.
    pub detector_efficiency: f64,
    /// Discard shots in which either atom went undetected.
    pub fair_sampling: bool,
    pub n_max: usize,
}

impl ExperimentConfig {
    /// Ideal detectors, fair sampling, default cutoff.
    pub fn new(bell: BellConfig, shots: u64, seed: u64) -> Result<Self> {
        let cfg = Self {
            bell,
            shots,
            seed,
            detector_efficiency: 1.0,
            fair_sampling: true,
            n_max: DEFAULT_N_MAX,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_detector_efficiency(mut self, alpha: f64) -> Result<Self> {
        self.detector_efficiency = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(invalid("shots", "must be at least 1"));
        }
        if self.shots >= 1 << SHOT_BITS {
            return Err(invalid("shots", format!("must be below 2^{SHOT_BITS}")));
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return Err(invalid(
                "detector_efficiency",
                format!("{} is outside [0, 1]", self.detector_efficiency),
            ));
        }
        if self.n_max < 1 {
            return Err(Error::CutoffTooSmall {
                min: 1,
                actual: self.n_max,
            });
        }
        self.bell.state_params()?;
        Ok(())
    }
}

/// Joint probabilities of the two probe outcomes, ordered `[++, +-, -+, --]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution(pub [f64; 4]);

impl OutcomeDistribution {
    /// `<A B>` with `+1` for `|up>` and `-1` for `|down>`.
    pub fn correlation(&self) -> f64 {
        let [pp, pm, mp, mm] = self.0;
        pp - pm - mp + mm
    }
}

/// Tallies of one setting, ordered `[++, +-, -+, --]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub counts: [u64; 4],
    pub discarded: u64,
}

impl OutcomeCounts {
    fn merge(mut self, other: Self) -> Self {
        for k in 0..4 {
            self.counts[k] += other.counts[k];
        }
        self.discarded += other.discarded;
        self
    }

    pub fn retained(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingEstimate {
    pub phi_a: f64,
    pub phi_b: f64,
    pub counts: OutcomeCounts,
    pub correlation: f64,
    pub std_error: f64,
}

impl SettingEstimate {
    fn from_counts(phi_a: f64, phi_b: f64, counts: OutcomeCounts) -> Self {
        let n = counts.retained() as f64;
        let [pp, pm, mp, mm] = counts.counts;
        let correlation = (pp + mm) as f64 / n - (pm + mp) as f64 / n;
        let std_error = ((1.0 - correlation * correlation).max(0.0) / n).sqrt();
        Self {
            phi_a,
            phi_b,
            counts,
            correlation,
            std_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellEstimate {
    pub settings: [SettingEstimate; 4],
    pub s_b_hat: f64,
    /// Standard errors of the four correlations added in quadrature.
    pub std_error: f64,
    pub discarded_shots: u64,
}

/// Exact probe-outcome distribution for one setting on a generated state.
/// `gt` is the probe interaction phase (`pi/2` nominally).
pub fn setting_distribution(
    generation: &Generation,
    p: f64,
    phi_a: f64,
    phi_b: f64,
    gt: f64,
) -> Result<OutcomeDistribution> {
    let reg = generation.register();
    let span_leak = (0..reg.dims()[CAV1])
        .filter(|&n| n > 1)
        .map(|n| reg.weight_where(&[(CAV1, n)]) + reg.weight_where(&[(CAV2, n)]))
        .sum::<f64>();
    if span_leak > SPAN_TOL {
        return Err(Error::OutsideMeasurementSpan(span_leak));
    }
    let ground = nalgebra::DVector::from_fn(2, |a, _| {
        if a == DOWN {
            crate::fock::ONE
        } else {
            crate::fock::ZERO
        }
    });
    let mut reg: Register = reg.append(&ground).append(&ground);
    for (probe, cavity, phi) in [(PROBE1, CAV1, phi_a), (PROBE2, CAV2, phi_b)] {
        jc_on(&mut reg, probe, cavity, gt)?;
        let r = RamseyParams::for_probe(DichotomicParams::new(p, phi)?)?;
        reg.apply(&[probe], &r.matrix())?;
    }
    let m = reg.marginal(&[PROBE1, PROBE2]);
    let at = |a: usize, b: usize| m[a * 2 + b];
    Ok(OutcomeDistribution([
        at(UP, UP),
        at(UP, DOWN),
        at(DOWN, UP),
        at(DOWN, DOWN),
    ]))
}

/// Draws `cfg.shots` events for setting `k` from `dist`.
pub fn sample_setting(dist: &OutcomeDistribution, cfg: &ExperimentConfig, k: u64) -> OutcomeCounts {
    let alpha = cfg.detector_efficiency;
    (0..cfg.shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomStream::substream(cfg.seed, (k << SHOT_BITS) | i);
            let outcome = pick(&dist.0, rng.uniform());
            let mut tally = OutcomeCounts::default();
            if alpha < 1.0 {
                let first = rng.uniform() < alpha;
                let second = rng.uniform() < alpha;
                if !(first && second) {
                    tally.discarded = 1;
                    return tally;
                }
            }
            tally.counts[outcome] = 1;
            tally
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge)
}

fn generate(cfg: &ExperimentConfig, gt: f64) -> Result<Generation> {
    let params = cfg.bell.state_params()?;
    generate_with_timing(
        InitialAtomPair::new(params.eta)?,
        &params,
        cfg.n_max,
        RamseyPhaseConvention::Compensated,
        gt,
    )
}

/// Simulates the full protocol: state generation, probe atoms for each of
/// the four settings, detection and (if `alpha < 1`) fair-sampling
/// post-selection. The generation sequence is deterministic, so it is run
/// once and every shot samples the same joint state.
pub fn run_bell_experiment(cfg: &ExperimentConfig) -> Result<BellEstimate> {
    cfg.validate()?;
    if cfg.detector_efficiency < 1.0 && !cfg.fair_sampling {
        return Err(Error::Unsupported(
            "detector inefficiency without fair sampling".into(),
        ));
    }
    if (cfg.bell.p - 0.5).abs() > 1e-12 {
        log::warn!(
            "p = {} differs from 1/2; the preset angles are optimal only at p = 1/2",
            cfg.bell.p
        );
    }
    let generation = generate(cfg, FRAC_PI_2)?;
    let mut settings = Vec::with_capacity(4);
    for (k, (a, b)) in cfg.bell.angles.settings().into_iter().enumerate() {
        let dist = setting_distribution(&generation, cfg.bell.p, a, b, FRAC_PI_2)?;
        let counts = sample_setting(&dist, cfg, k as u64);
        if counts.retained() == 0 {
            return Err(Error::NoRetainedShots(k));
        }
        settings.push(SettingEstimate::from_counts(a, b, counts));
    }
    let settings: [SettingEstimate; 4] = settings.try_into().expect("four settings");
    let s_b_hat = chsh_combination(settings.map(|s| s.correlation));
    let std_error = settings
        .iter()
        .map(|s| s.std_error.powi(2))
        .sum::<f64>()
        .sqrt();
    let discarded_shots = settings.iter().map(|s| s.counts.discarded).sum();
    Ok(BellEstimate {
        settings,
        s_b_hat,
        std_error,
        discarded_shots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub alpha: f64,
    pub alpha_t: f64,
    pub violable: bool,
    pub note: &'static str,
}

pub fn detection_threshold_check(alpha: f64) -> Result<DetectionReport> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} is outside [0, 1]")));
    }
    Ok(DetectionReport {
        alpha,
        alpha_t: DETECTION_THRESHOLD,
        violable: alpha > DETECTION_THRESHOLD,
        note: "threshold for a maximally entangled state without the fair-sampling assumption",
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRow {
    pub epsilon: f64,
    /// Fidelity of the generated cavity state (atoms traced out) with the target.
    pub fidelity: f64,
    /// Exact `S_B` when generation and probe interactions both last
    /// `gt = (pi/2)(1 + epsilon)`.
    pub s_b: f64,
    /// `s_b` minus the same quantity for the unperturbed protocol.
    pub delta_s_b: f64,
}

fn protocol_s_b(cfg: &ExperimentConfig, generation: &Generation, gt: f64) -> Result<f64> {
    let mut c = [0.0; 4];
    for (k, (a, b)) in cfg.bell.angles.settings().into_iter().enumerate() {
        c[k] = setting_distribution(generation, cfg.bell.p, a, b, gt)?.correlation();
    }
    Ok(chsh_combination(c))
}

/// Timing-error sweep: every atom-cavity interaction is off by the relative
/// error `epsilon` (a velocity spread `dv/v` translates into `dT/T = dv/v`).
/// Deterministic; nothing is sampled.
pub fn timing_sensitivity(cfg: &ExperimentConfig, epsilons: &[f64]) -> Result<Vec<SensitivityRow>> {
    cfg.validate()?;
    let target = entangled_gbs_state(&cfg.bell.state_params()?, cfg.n_max)?;
    let ideal = protocol_s_b(cfg, &generate(cfg, FRAC_PI_2)?, FRAC_PI_2)?;
    epsilons
        .iter()
        .map(|&epsilon| {
            if epsilon.is_nan() || epsilon.abs() >= 0.5 {
                return Err(invalid("epsilon", format!("|{epsilon}| must be below 0.5")));
            }
            let gt = FRAC_PI_2 * (1.0 + epsilon);
            let generation = generate(cfg, gt)?;
            let fidelity = generation.fidelity(&target)?;
            let s_b = protocol_s_b(cfg, &generation, gt)?;
            Ok(SensitivityRow {
                epsilon,
                fidelity,
                s_b,
                delta_s_b: s_b - ideal,
            })
        })
        .collect()
}

// keep the site constants in one place
const _: () = assert!(ATOM1 == 0 && ATOM2 == 1 && PROBE1 == 4 && PROBE2 == 5);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{bell_correlation, bell_function, Preset};

    fn config(preset: Preset, eta: f64, shots: u64, seed: u64) -> ExperimentConfig {
        let bell = BellConfig::with_preset(preset, 0.5, 0.0, eta).unwrap();
        ExperimentConfig::new(bell, shots, seed).unwrap()
    }

    #[test]
    fn exact_distribution_matches_closed_form_correlations() {
        for preset in [Preset::Maximal, Preset::Wide] {
            for eta in [-1.0, 0.0, 0.5, 1.0, 3.0] {
                for (p, theta) in [(0.5, 0.0), (0.3, 0.7), (0.8, -1.9)] {
                    let bell = BellConfig::with_preset(preset, p, theta, eta).unwrap();
                    let cfg = ExperimentConfig::new(bell, 1, 0).unwrap();
                    let g = generate(&cfg, FRAC_PI_2).unwrap();
                    for (a, b) in bell.angles.settings() {
                        let d = setting_distribution(&g, p, a, b, FRAC_PI_2).unwrap();
                        assert!((d.0.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                        let want = bell_correlation(&bell, a, b);
                        assert!((d.correlation() - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn maximal_violation_is_reproduced() {
        let est = run_bell_experiment(&config(Preset::Maximal, 1.0, 100_000, 42)).unwrap();
        let target = 2.0 * SQRT_2;
        assert!(est.std_error <= 0.01);
        assert!((est.s_b_hat - target).abs() < 3.0 * est.std_error);
        assert_eq!(est.discarded_shots, 0);
        for s in &est.settings {
            assert!(s.correlation.abs() <= 1.0);
            assert_eq!(s.counts.retained(), 100_000);
        }
    }

    #[test]
    fn product_state_does_not_violate() {
        for preset in [Preset::Maximal, Preset::Wide] {
            let est = run_bell_experiment(&config(preset, 0.0, 20_000, 5)).unwrap();
            assert!(est.s_b_hat <= 2.0 + 3.0 * est.std_error);
        }
    }

    #[test]
    fn runs_are_deterministic_and_seed_dependent() {
        let cfg = config(Preset::Wide, 1.0, 5_000, 9);
        let a = run_bell_experiment(&cfg).unwrap();
        let b = run_bell_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        let c = run_bell_experiment(&ExperimentConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.settings[0].counts, c.settings[0].counts);
    }

    #[test]
    fn fair_sampling_keeps_about_alpha_squared() {
        let cfg = config(Preset::Maximal, 1.0, 40_000, 3)
            .with_detector_efficiency(0.5)
            .unwrap();
        let est = run_bell_experiment(&cfg).unwrap();
        for s in &est.settings {
            let kept = s.counts.retained() as f64 / 40_000.0;
            assert!((kept - 0.25).abs() < 0.01, "kept {kept}");
            assert_eq!(s.counts.retained() + s.counts.discarded, 40_000);
        }
        assert!((est.s_b_hat - 2.0 * SQRT_2).abs() < 3.0 * est.std_error);
    }

    #[test]
    fn zero_efficiency_retains_nothing() {
        let cfg = config(Preset::Maximal, 1.0, 100, 3)
            .with_detector_efficiency(0.0)
            .unwrap();
        assert_eq!(run_bell_experiment(&cfg), Err(Error::NoRetainedShots(0)));
    }

    #[test]
    fn unfair_sampling_is_refused() {
        let mut cfg = config(Preset::Maximal, 1.0, 100, 3)
            .with_detector_efficiency(0.9)
            .unwrap();
        cfg.fair_sampling = false;
        assert!(matches!(
            run_bell_experiment(&cfg),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bell = BellConfig::with_preset(Preset::Maximal, 0.5, 0.0, 1.0).unwrap();
        assert!(ExperimentConfig::new(bell, 0, 1).is_err());
        let cfg = ExperimentConfig::new(bell, 10, 1).unwrap();
        assert!(cfg.with_detector_efficiency(1.5).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!((DETECTION_THRESHOLD - 0.8284).abs() < 5e-5);
        assert!(detection_threshold_check(1.0).unwrap().violable);
        assert!(detection_threshold_check(0.9).unwrap().violable);
        assert!(
            !detection_threshold_check(DETECTION_THRESHOLD)
                .unwrap()
                .violable
        );
        assert!(!detection_threshold_check(0.5).unwrap().violable);
        assert!(detection_threshold_check(-0.1).is_err());
    }

    #[test]
    fn sensitivity_is_exact_at_zero_and_symmetric() {
        let cfg = config(Preset::Maximal, 1.0, 1, 0);
        let rows = timing_sensitivity(&cfg, &[0.0, 0.01, -0.01, 0.1, -0.1]).unwrap();
        assert!((rows[0].fidelity - 1.0).abs() < 1e-12);
        assert_eq!(rows[0].delta_s_b, 0.0);
        assert!((rows[0].s_b - bell_function(&cfg.bell)).abs() < 1e-12);
        assert!((rows[1].fidelity - rows[2].fidelity).abs() < 1e-10);
        assert!((rows[3].fidelity - rows[4].fidelity).abs() < 1e-10);
        assert!(rows[1].fidelity >= 0.999);
        assert!(rows[1].delta_s_b.abs() < 0.01);
        assert!(rows[3].fidelity < rows[1].fidelity);
        assert!(timing_sensitivity(&cfg, &[0.5]).is_err());
    }
}

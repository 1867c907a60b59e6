//! Subcommand arguments and their computations. Nothing here touches the
//! filesystem.

use anyhow::{ensure, Result};
use bernoulli_bell::bell::{bell_function_operator, chsh_combination};
use bernoulli_bell::dynamics::DETECTION_THRESHOLD;
use bernoulli_bell::field::{field_covariance, field_stats_operator};
use bernoulli_bell::{
    analytic_s_b, bell_function, detection_threshold_check, entangled_gbs_state, eta_for_degree,
    generate_entangled_gbs, optimal_p_scan, run_bell_experiment, timing_sensitivity, BellConfig,
    EntangledGbsParams, ExperimentConfig, InitialAtomPair, Preset, RamseyPhaseConvention,
};
use clap::{ArgAction, Args, ValueEnum};

use crate::parse::{angle, g_grid, join_exact, real_list};
use crate::report::{Report, Table, Value};

type Params = Vec<(String, String)>;

fn param(name: &str, value: impl ToString) -> (String, String) {
    (name.to_string(), value.to_string())
}

fn preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: bernoulli_bell::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "maximal", value_parser = preset)]
    pub preset: Preset,
    /// Degrees of entanglement: `start:stop:step` or a comma list in [0, 1].
    #[arg(long, default_value = "0:1:0.05", value_parser = g_grid)]
    pub grid: ::std::vec::Vec<f64>,
    /// State phase; radians or multiples of pi (`0.25pi`, `pi/4`).
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta: f64,
}

impl ScanArgs {
    pub fn params(&self) -> Params {
        vec![
            param("preset", self.preset),
            param("grid", join_exact(&self.grid)),
            param("theta", self.theta),
        ]
    }

    /// `S_B` against `G` at `p = 1/2`, closed form and operator route.
    pub fn run(&self, n_max: usize) -> Result<Report> {
        let mut table = Table::new(&["G", "s_b_analytic", "s_b_operator"]);
        for &g in &self.grid {
            let eta = eta_for_degree(g)?;
            let cfg = BellConfig::with_preset(self.preset, 0.5, self.theta, eta)?;
            table.push(vec![
                g.into(),
                analytic_s_b(self.preset, g)?.into(),
                bell_function_operator(&cfg, n_max)?.into(),
            ]);
        }
        Ok(Report::table(table))
    }
}

#[derive(Debug, Clone, Args)]
pub struct PscanArgs {
    #[arg(long, default_value = "maximal", value_parser = preset)]
    pub preset: Preset,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta: f64,
    /// Grid spacing in p; must divide [0, 1].
    #[arg(long, default_value_t = 0.005)]
    pub step: f64,
}

impl PscanArgs {
    pub fn params(&self) -> Params {
        vec![
            param("preset", self.preset),
            param("eta", self.eta),
            param("theta", self.theta),
            param("step", self.step),
        ]
    }

    pub fn run(&self) -> Result<Report> {
        let cfg = BellConfig::with_preset(self.preset, 0.5, self.theta, self.eta)?;
        let scan = optimal_p_scan(&cfg, self.step)?;
        let mut table = Table::new(&["p", "s_b"]);
        for &(p, s) in &scan.curve {
            table.push(vec![p.into(), s.into()]);
        }
        let mut report = Report::table(table);
        report
            .set("preset", self.preset.name())
            .set("eta", self.eta)
            .set("G", cfg.degree_of_entanglement())
            .set("p_star", scan.p_star)
            .set("s_b_max", scan.s_b_max);
        Ok(report)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CovarianceArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p2: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta1: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eta: f64,
}

impl CovarianceArgs {
    pub fn params(&self) -> Params {
        vec![
            param("p1", self.p1),
            param("p2", self.p2),
            param("theta1", self.theta1),
            param("theta2", self.theta2),
            param("eta", self.eta),
        ]
    }

    fn state(&self) -> Result<EntangledGbsParams> {
        Ok(EntangledGbsParams::new(
            self.p1,
            self.p2,
            self.theta1,
            self.theta2,
            self.eta,
        )?)
    }

    /// Field moments in units where `4 pi hbar omega / V = 1`.
    pub fn run(&self, n_max: usize) -> Result<Report> {
        let state = self.state()?;
        let a = field_covariance(&state);
        let o = field_stats_operator(&state, n_max)?;
        let mut report = Report::default();
        report
            .set("e1_analytic", a.e1)
            .set("e1_operator", o.e1)
            .set("e2_analytic", a.e2)
            .set("e2_operator", o.e2)
            .set("e1e2_analytic", a.e1e2)
            .set("e1e2_operator", o.e1e2)
            .set("covariance_analytic", a.covariance)
            .set("covariance_operator", o.covariance);
        Ok(report)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "maximal", value_parser = preset)]
    pub preset: Preset,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Shots per setting (at least 100).
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    /// Detection probability of each probe atom.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub fair_sampling: bool,
}

impl SimulateArgs {
    pub fn params(&self) -> Params {
        vec![
            param("preset", self.preset),
            param("eta", self.eta),
            param("theta", self.theta),
            param("p", self.p),
            param("shots", self.shots),
            param("alpha", self.alpha),
            param("fair-sampling", self.fair_sampling),
        ]
    }

    pub fn run(&self, seed: u64, n_max: usize) -> Result<Report> {
        ensure!(self.shots >= 100, "--shots must be at least 100");
        let bell = BellConfig::with_preset(self.preset, self.p, self.theta, self.eta)?;
        let cfg = ExperimentConfig {
            detector_efficiency: self.alpha,
            fair_sampling: self.fair_sampling,
            n_max,
            ..ExperimentConfig::new(bell, self.shots, seed)?
        };
        let est = run_bell_experiment(&cfg)?;
        let target = bell_function(&bell);
        let detection = detection_threshold_check(self.alpha)?;

        let mut report = Report::default();
        report
            .set("preset", self.preset.name())
            .set("eta", self.eta)
            .set("G", bell.degree_of_entanglement())
            .set("p", self.p)
            .set("shots_per_setting", self.shots)
            .set("seed", seed)
            .set("alpha", self.alpha)
            .set("fair_sampling", self.fair_sampling);
        if (self.p - 0.5).abs() > 1e-12 {
            report.set("note", "preset angles are optimal only at p = 1/2");
        }
        for (k, s) in est.settings.iter().enumerate() {
            let key = |name: &str| format!("setting{}.{name}", k + 1);
            let [pp, pm, mp, mm] = s.counts.counts;
            report
                .set(key("phi_a"), s.phi_a)
                .set(key("phi_b"), s.phi_b)
                .set(key("n_pp"), pp)
                .set(key("n_pm"), pm)
                .set(key("n_mp"), mp)
                .set(key("n_mm"), mm)
                .set(key("retained"), s.counts.retained())
                .set(key("discarded"), s.counts.discarded)
                .set(key("correlation"), s.correlation)
                .set(key("std_error"), s.std_error);
        }
        let deviation = if est.std_error > 0.0 {
            Value::Float((est.s_b_hat - target) / est.std_error)
        } else {
            Value::Text("undefined".into())
        };
        debug_assert_eq!(
            est.s_b_hat,
            chsh_combination(est.settings.map(|s| s.correlation))
        );
        report
            .set("s_b_hat", est.s_b_hat)
            .set("std_error", est.std_error)
            .set("s_b_target", target)
            .set("deviation_sigma", deviation)
            .set("violation", est.s_b_hat > 2.0)
            .set("discarded_shots", est.discarded_shots)
            .set("alpha_threshold", DETECTION_THRESHOLD)
            .set("loophole_free_violable", detection.violable);
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Compensated,
    Literal,
}

impl Convention {
    fn name(self) -> &'static str {
        match self {
            Convention::Compensated => "compensated",
            Convention::Literal => "literal",
        }
    }
}

impl From<Convention> for RamseyPhaseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Compensated => RamseyPhaseConvention::Compensated,
            Convention::Literal => RamseyPhaseConvention::Literal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p2: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta1: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta2: f64,
    /// Whether each atom's ground level picks up `e^{-i theta_j}` before its
    /// Ramsey zone; `literal` is exact only for theta1 = theta2.
    #[arg(long, value_enum, default_value_t = Convention::Compensated)]
    pub convention: Convention,
}

impl GenerateArgs {
    pub fn params(&self) -> Params {
        vec![
            param("eta", self.eta),
            param("p1", self.p1),
            param("p2", self.p2),
            param("theta1", self.theta1),
            param("theta2", self.theta2),
            param("convention", self.convention.name()),
        ]
    }

    pub fn run(&self, n_max: usize) -> Result<Report> {
        let target = EntangledGbsParams::new(self.p1, self.p2, self.theta1, self.theta2, self.eta)?;
        let generation = generate_entangled_gbs(
            InitialAtomPair::new(self.eta)?,
            &target,
            n_max,
            self.convention.into(),
        )?;
        let fidelity = generation.fidelity(&entangled_gbs_state(&target, n_max)?)?;
        let mut report = Report::default();
        report
            .set("eta", self.eta)
            .set("p1", self.p1)
            .set("p2", self.p2)
            .set("theta1", self.theta1)
            .set("theta2", self.theta2)
            .set("convention", self.convention.name())
            .set("fidelity", fidelity)
            .set("atoms_ground_probability", generation.ground_probability());
        Ok(report)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[arg(long, default_value = "maximal", value_parser = preset)]
    pub preset: Preset,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub theta: f64,
    /// Relative interaction-time errors, comma separated, each |e| < 0.5.
    #[arg(
        long,
        default_value = "-0.1,-0.05,-0.01,0,0.01,0.05,0.1",
        value_parser = real_list,
        allow_hyphen_values = true
    )]
    pub epsilons: ::std::vec::Vec<f64>,
}

impl SensitivityArgs {
    pub fn params(&self) -> Params {
        vec![
            param("preset", self.preset),
            param("eta", self.eta),
            param("theta", self.theta),
            param("epsilons", join_exact(&self.epsilons)),
        ]
    }

    pub fn run(&self, n_max: usize) -> Result<Report> {
        let bell = BellConfig::with_preset(self.preset, 0.5, self.theta, self.eta)?;
        let cfg = ExperimentConfig {
            n_max,
            ..ExperimentConfig::new(bell, 1, 0)?
        };
        let mut table = Table::new(&["epsilon", "fidelity", "s_b", "delta_s_b"]);
        for row in timing_sensitivity(&cfg, &self.epsilons)? {
            table.push(vec![
                row.epsilon.into(),
                row.fidelity.into(),
                row.s_b.into(),
                row.delta_s_b.into(),
            ]);
        }
        Ok(Report::table(table))
    }
}

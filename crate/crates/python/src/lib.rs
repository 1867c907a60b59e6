//! Python bindings: `import bernoulli_bell`.

use std::collections::BTreeMap;

use bb::bell::bell_function_operator;
use bernoulli_bell as bb;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: bb::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_preset(name: &str) -> PyResult<bb::Preset> {
    name.parse().map_err(value_err)
}

/// Amplitudes of `|N, p, phi>` in a Fock space truncated at `n_max`
/// (defaults to `N`).
#[pyfunction]
#[pyo3(signature = (n, p, phi, n_max = None))]
fn binomial_state(n: usize, p: f64, phi: f64, n_max: Option<usize>) -> PyResult<Vec<Complex64>> {
    let params = bb::BinomialParams::new(n, p, phi).map_err(value_err)?;
    let state = bb::binomial_state(params, n_max.unwrap_or(n.max(1))).map_err(value_err)?;
    Ok(state.amplitudes().to_vec())
}

/// `<N, p, phi | N, q, psi>` in closed form.
#[pyfunction]
fn binomial_overlap(n: usize, p: f64, phi: f64, q: f64, psi: f64) -> PyResult<Complex64> {
    let a = bb::BinomialParams::new(n, p, phi).map_err(value_err)?;
    let b = bb::BinomialParams::new(n, q, psi).map_err(value_err)?;
    bb::binomial_overlap(a, b).map_err(value_err)
}

/// Field moments of the entangled two-cavity state as a dict with keys
/// `e1, e2, e1e2, covariance` (closed form) and the same keys suffixed
/// `_operator`.
#[pyfunction]
#[pyo3(signature = (p1, p2, theta1, theta2, eta, n_max = bb::DEFAULT_N_MAX))]
fn field_covariance(
    p1: f64,
    p2: f64,
    theta1: f64,
    theta2: f64,
    eta: f64,
    n_max: usize,
) -> PyResult<BTreeMap<&'static str, f64>> {
    let s = bb::EntangledGbsParams::new(p1, p2, theta1, theta2, eta).map_err(value_err)?;
    let a = bb::field_covariance(&s);
    let o = bb::field_stats_operator(&s, n_max).map_err(value_err)?;
    Ok(BTreeMap::from([
        ("e1", a.e1),
        ("e2", a.e2),
        ("e1e2", a.e1e2),
        ("covariance", a.covariance),
        ("e1_operator", o.e1),
        ("e2_operator", o.e2),
        ("e1e2_operator", o.e1e2),
        ("covariance_operator", o.covariance),
    ]))
}

#[pyfunction]
fn degree_of_entanglement(eta: f64) -> f64 {
    bb::degree_of_entanglement(eta)
}

/// The `|eta| <= 1` weight with the given degree of entanglement.
#[pyfunction]
fn eta_for_degree(g: f64) -> PyResult<f64> {
    bb::eta_for_degree(g).map_err(value_err)
}

/// Closed-form `S_B(G)` of a preset (`"maximal"` or `"wide"`) at `p = 1/2`.
#[pyfunction]
fn analytic_s_b(preset: &str, g: f64) -> PyResult<f64> {
    bb::analytic_s_b(parse_preset(preset)?, g).map_err(value_err)
}

/// Symmetric entangled state measured with one of the preset angle sets.
#[pyclass(frozen, module = "bernoulli_bell")]
struct BellConfig {
    inner: bb::BellConfig,
}

#[pymethods]
impl BellConfig {
    #[new]
    #[pyo3(signature = (preset, eta, theta = 0.0, p = 0.5))]
    fn new(preset: &str, eta: f64, theta: f64, p: f64) -> PyResult<Self> {
        let inner =
            bb::BellConfig::with_preset(parse_preset(preset)?, p, theta, eta).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    /// `(phi1, phi2, phi1', phi2')`.
    #[getter]
    fn angles(&self) -> (f64, f64, f64, f64) {
        let a = self.inner.angles;
        (a.phi1, a.phi2, a.phi1p, a.phi2p)
    }

    fn degree_of_entanglement(&self) -> f64 {
        self.inner.degree_of_entanglement()
    }

    fn correlation(&self, phi_a: f64, phi_b: f64) -> f64 {
        bb::bell_correlation(&self.inner, phi_a, phi_b)
    }

    fn s_b(&self) -> f64 {
        bb::bell_function(&self.inner)
    }

    #[pyo3(signature = (n_max = bb::DEFAULT_N_MAX))]
    fn s_b_operator(&self, n_max: usize) -> PyResult<f64> {
        bell_function_operator(&self.inner, n_max).map_err(value_err)
    }

    /// `(p_star, s_b_max)` of a grid scan over `p`.
    #[pyo3(signature = (step = 0.005))]
    fn optimal_p(&self, step: f64) -> PyResult<(f64, f64)> {
        let scan = bb::optimal_p_scan(&self.inner, step).map_err(value_err)?;
        Ok((scan.p_star, scan.s_b_max))
    }

    /// Monte Carlo run of the probe-atom protocol.
    #[pyo3(signature = (shots, seed, alpha = 1.0))]
    fn simulate(
        &self,
        py: Python<'_>,
        shots: u64,
        seed: u64,
        alpha: f64,
    ) -> PyResult<BellEstimate> {
        let cfg = bb::ExperimentConfig::new(self.inner, shots, seed)
            .and_then(|c| c.with_detector_efficiency(alpha))
            .map_err(value_err)?;
        let inner = py
            .detach(|| bb::run_bell_experiment(&cfg))
            .map_err(value_err)?;
        Ok(BellEstimate { inner })
    }

    /// Rows `(epsilon, fidelity, s_b, delta_s_b)` for relative timing errors.
    fn timing_sensitivity(&self, epsilons: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        let cfg = bb::ExperimentConfig::new(self.inner, 1, 0).map_err(value_err)?;
        let rows = bb::timing_sensitivity(&cfg, &epsilons).map_err(value_err)?;
        Ok(rows
            .into_iter()
            .map(|r| (r.epsilon, r.fidelity, r.s_b, r.delta_s_b))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "BellConfig(p={}, theta={}, eta={}, angles={:?})",
            self.inner.p,
            self.inner.theta,
            self.inner.eta,
            self.angles()
        )
    }
}

#[pyclass(frozen, module = "bernoulli_bell")]
struct BellEstimate {
    inner: bb::BellEstimate,
}

#[pymethods]
impl BellEstimate {
    #[getter]
    fn s_b_hat(&self) -> f64 {
        self.inner.s_b_hat
    }

    #[getter]
    fn std_error(&self) -> f64 {
        self.inner.std_error
    }

    #[getter]
    fn discarded_shots(&self) -> u64 {
        self.inner.discarded_shots
    }

    #[getter]
    fn correlations(&self) -> Vec<f64> {
        self.inner.settings.iter().map(|s| s.correlation).collect()
    }

    /// Per-setting `(n_pp, n_pm, n_mp, n_mm)`.
    #[getter]
    fn counts(&self) -> Vec<(u64, u64, u64, u64)> {
        self.inner
            .settings
            .iter()
            .map(|s| {
                let [a, b, c, d] = s.counts.counts;
                (a, b, c, d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "BellEstimate(s_b_hat={}, std_error={})",
            self.inner.s_b_hat, self.inner.std_error
        )
    }
}

/// `(fidelity, probability both atoms end in the ground state)` of the
/// atom-cavity generation sequence.
#[pyfunction]
#[pyo3(signature = (eta, p1, theta1, p2, theta2, compensated = true, n_max = bb::DEFAULT_N_MAX))]
fn generate(
    eta: f64,
    p1: f64,
    theta1: f64,
    p2: f64,
    theta2: f64,
    compensated: bool,
    n_max: usize,
) -> PyResult<(f64, f64)> {
    let target = bb::EntangledGbsParams::new(p1, p2, theta1, theta2, eta).map_err(value_err)?;
    let convention = if compensated {
        bb::RamseyPhaseConvention::Compensated
    } else {
        bb::RamseyPhaseConvention::Literal
    };
    let init = bb::InitialAtomPair::new(eta).map_err(value_err)?;
    let g = bb::generate_entangled_gbs(init, &target, n_max, convention).map_err(value_err)?;
    let fidelity = bb::entangled_gbs_state(&target, n_max)
        .and_then(|t| g.fidelity(&t))
        .map_err(value_err)?;
    Ok((fidelity, g.ground_probability()))
}

#[pymodule]
#[pyo3(name = "bernoulli_bell")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DETECTION_THRESHOLD", bb::dynamics::DETECTION_THRESHOLD)?;
    m.add_class::<BellConfig>()?;
    m.add_class::<BellEstimate>()?;
    m.add_function(wrap_pyfunction!(binomial_state, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(field_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(degree_of_entanglement, m)?)?;
    m.add_function(wrap_pyfunction!(eta_for_degree, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_s_b, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}

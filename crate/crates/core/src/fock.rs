//! Truncated Fock-space states and operators.
//!
//! A single cavity mode is represented on the basis `|0>, |1>, ..., |n_max>`.
//! All states handed out by the public constructors are unit-norm; operators
//! are dense matrices, which is plenty for the handful of levels involved here.
//!
//! Field quantities use units where `sqrt(4 pi hbar omega / V) = 1` and the
//! mode profile is evaluated at the cavity centre (`sin(kz) = 1`), so the
//! electric field operator is simply the quadrature `a + a^dagger`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default Fock cutoff. Every state in this crate lives in `span{|0>, |1>}`;
/// the extra level makes leakage visible instead of silently truncated.
pub const DEFAULT_N_MAX: usize = 2;

/// Tolerance for analytic identities (norms, Hermiticity, closed forms).
pub const IDENTITY_TOL: f64 = 1e-12;

/// Tolerance for span membership and basis orthonormality checks.
pub const SPAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_cutoff(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::CutoffTooSmall {
            min: 1,
            actual: n_max,
        });
    }
    Ok(())
}

fn check_norm(norm_sqr: f64) -> Result<()> {
    if (norm_sqr - 1.0).abs() > IDENTITY_TOL {
        return Err(Error::NotNormalized(norm_sqr));
    }
    Ok(())
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Pure state of one cavity mode, amplitudes indexed by photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// The number state `|n>` in a space truncated at `n_max`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        check_cutoff(n_max)?;
        if n > n_max {
            return Err(Error::CutoffTooSmall {
                min: n,
                actual: n_max,
            });
        }
        let mut amps = DVector::from_element(n_max + 1, ZERO);
        amps[n] = ONE;
        Ok(Self { amps })
    }

    /// Wraps amplitudes that must already be unit-norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        check_cutoff(amps.len().saturating_sub(1))?;
        let amps = DVector::from_vec(amps);
        check_norm(amps.norm_squared())?;
        Ok(Self { amps })
    }

    /// Normalizes arbitrary (non-zero) amplitudes.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_cutoff(amps.len().saturating_sub(1))?;
        let amps = DVector::from_vec(amps);
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amps: amps / Complex64::from(norm),
        })
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amps.get(n).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `<self|other>`, conjugating the left argument.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Probability weight on photon numbers above one.
    pub fn weight_above_one(&self) -> f64 {
        self.amps.iter().skip(2).map(|c| c.norm_sqr()).sum()
    }

    /// Same amplitudes padded (or checked-truncated) to a new cutoff.
    pub fn with_cutoff(&self, n_max: usize) -> Result<Self> {
        check_cutoff(n_max)?;
        let dropped: f64 = self.amps.iter().skip(n_max + 1).map(|c| c.norm_sqr()).sum();
        if dropped > IDENTITY_TOL {
            return Err(Error::CutoffTooSmall {
                min: self.n_max(),
                actual: n_max,
            });
        }
        let amps = DVector::from_fn(n_max + 1, |n, _| self.amplitude(n));
        Ok(Self { amps })
    }
}

/// Operator on a single truncated cavity mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOperator {
    matrix: DMatrix<Complex64>,
}

impl FieldOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        check_dim(matrix.nrows(), matrix.ncols())?;
        check_cutoff(matrix.nrows().saturating_sub(1))?;
        Ok(Self { matrix })
    }

    pub fn identity(n_max: usize) -> Result<Self> {
        check_cutoff(n_max)?;
        Ok(Self {
            matrix: DMatrix::identity(n_max + 1, n_max + 1),
        })
    }

    /// Photon number operator `a^dagger a`.
    pub fn number(n_max: usize) -> Result<Self> {
        check_cutoff(n_max)?;
        let diag = DVector::from_fn(n_max + 1, |n, _| Complex64::from(n as f64));
        Ok(Self {
            matrix: DMatrix::from_diagonal(&diag),
        })
    }

    /// Annihilation operator `a`, truncated.
    pub fn annihilation(n_max: usize) -> Result<Self> {
        check_cutoff(n_max)?;
        let d = n_max + 1;
        let matrix = DMatrix::from_fn(d, d, |r, c| {
            if c == r + 1 {
                Complex64::from((c as f64).sqrt())
            } else {
                ZERO
            }
        });
        Ok(Self { matrix })
    }

    pub fn creation(n_max: usize) -> Result<Self> {
        Ok(Self {
            matrix: Self::annihilation(n_max)?.matrix.adjoint(),
        })
    }

    /// `a + a^dagger`: the electric field at the cavity centre in field units.
    pub fn quadrature(n_max: usize) -> Result<Self> {
        let a = Self::annihilation(n_max)?.matrix;
        Ok(Self {
            matrix: &a + a.adjoint(),
        })
    }

    pub fn n_max(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let adj = self.matrix.adjoint();
        self.matrix
            .iter()
            .zip(adj.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        check_dim(self.matrix.ncols(), s.dim())?;
        Ok(StateVector::from_vector_unchecked(&self.matrix * &s.amps))
    }

    /// `<s|op|s>`.
    pub fn expectation(&self, s: &StateVector) -> Result<Complex64> {
        check_dim(self.matrix.ncols(), s.dim())?;
        Ok(s.amps.dotc(&(&self.matrix * &s.amps)))
    }

    /// `<a|op|b>`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<Complex64> {
        check_dim(self.matrix.ncols(), a.dim())?;
        check_dim(self.matrix.ncols(), b.dim())?;
        Ok(a.amps.dotc(&(&self.matrix * &b.amps)))
    }

    /// `self (x) other`, with `self` acting on cavity 1.
    pub fn kron(&self, other: &FieldOperator) -> JointOperator {
        JointOperator {
            matrix: self.matrix.kronecker(&other.matrix),
            d1: self.matrix.nrows(),
            d2: other.matrix.nrows(),
        }
    }
}

/// Operator on the joint space of two cavities (cavity 1 is the major index).
#[derive(Debug, Clone, PartialEq)]
pub struct JointOperator {
    matrix: DMatrix<Complex64>,
    d1: usize,
    d2: usize,
}

impl JointOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let adj = self.matrix.adjoint();
        self.matrix
            .iter()
            .zip(adj.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn expectation(&self, s: &TwoCavityState) -> Result<Complex64> {
        check_dim(self.d1, s.dim())?;
        check_dim(self.d2, s.dim())?;
        let flat = s.flatten();
        Ok(flat.dotc(&(&self.matrix * &flat)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cavity {
    First,
    Second,
}

/// Joint pure state of two cavity modes; `amplitude(m, n)` is the
/// coefficient of `|m>_1 |n>_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCavityState {
    amps: DMatrix<Complex64>,
}

impl TwoCavityState {
    pub fn from_matrix(amps: DMatrix<Complex64>) -> Result<Self> {
        check_dim(amps.nrows(), amps.ncols())?;
        check_cutoff(amps.nrows().saturating_sub(1))?;
        check_norm(amps.norm_squared())?;
        Ok(Self { amps })
    }

    pub(crate) fn from_matrix_unchecked(amps: DMatrix<Complex64>) -> Self {
        Self { amps }
    }

    /// Normalized superposition `sum_k c_k |s_k>`.
    pub fn superpose(terms: &[(Complex64, &TwoCavityState)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| crate::error::invalid("terms", "empty superposition"))?;
        let d = first.1.dim();
        let mut acc = DMatrix::from_element(d, d, ZERO);
        for (c, s) in terms {
            check_dim(d, s.dim())?;
            acc += &s.amps * *c;
        }
        let norm = acc.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amps: acc / Complex64::from(norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn amplitude(&self, m: usize, n: usize) -> Complex64 {
        self.amps.get((m, n)).copied().unwrap_or(ZERO)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Amplitudes in `m * dim + n` order, matching [`FieldOperator::kron`].
    pub fn flatten(&self) -> DVector<Complex64> {
        let d = self.dim();
        DVector::from_fn(d * d, |i, _| self.amps[(i / d, i % d)])
    }

    pub fn inner(&self, other: &TwoCavityState) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &TwoCavityState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Expectation of an operator acting on one cavity only.
    pub fn expectation_local(&self, op: &FieldOperator, cavity: Cavity) -> Result<Complex64> {
        check_dim(op.matrix.nrows(), self.dim())?;
        let applied = match cavity {
            Cavity::First => &op.matrix * &self.amps,
            Cavity::Second => &self.amps * op.matrix.transpose(),
        };
        Ok(self.amps.dotc(&applied))
    }

    /// Expectation of `a (x) b` evaluated as `Tr(Psi^dagger A Psi B^T)`,
    /// without materializing the joint operator.
    pub fn expectation_product(&self, a: &FieldOperator, b: &FieldOperator) -> Result<Complex64> {
        check_dim(a.matrix.nrows(), self.dim())?;
        check_dim(b.matrix.nrows(), self.dim())?;
        let applied = &a.matrix * &self.amps * b.matrix.transpose();
        Ok(self.amps.dotc(&applied))
    }
}

/// `a (x) b`.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<TwoCavityState> {
    check_dim(a.dim(), b.dim())?;
    let amps = &a.amps * b.amps.transpose();
    Ok(TwoCavityState { amps })
}

/// Pure state of several subsystems (cavity modes and two-level atoms).
///
/// The amplitude vector is in row-major order over `dims`: the first site is
/// the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    dims: Vec<usize>,
    amps: DVector<Complex64>,
}

impl Register {
    pub fn product(factors: &[&DVector<Complex64>]) -> Self {
        let mut amps = DVector::from_element(1, ONE);
        let mut dims = Vec::with_capacity(factors.len());
        for f in factors {
            amps = amps.kronecker(*f);
            dims.push(f.len());
        }
        Self { dims, amps }
    }

    pub fn from_parts(dims: Vec<usize>, amps: DVector<Complex64>) -> Result<Self> {
        check_dim(dims.iter().product(), amps.len())?;
        Ok(Self { dims, amps })
    }

    pub fn from_two_cavity(s: &TwoCavityState) -> Self {
        Self {
            dims: vec![s.dim(), s.dim()],
            amps: s.flatten(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Appends a new site prepared in `local`.
    pub fn append(&self, local: &DVector<Complex64>) -> Self {
        let mut dims = self.dims.clone();
        dims.push(local.len());
        Self {
            dims,
            amps: self.amps.kronecker(local),
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn digit(&self, strides: &[usize], index: usize, site: usize) -> usize {
        (index / strides[site]) % self.dims[site]
    }

    /// Applies `op` to the listed sites; `op` acts on their product space
    /// with the first listed site as the major index.
    pub fn apply(&mut self, sites: &[usize], op: &DMatrix<Complex64>) -> Result<()> {
        let local_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s]).collect();
        let local_dim: usize = local_dims.iter().product();
        check_dim(local_dim, op.nrows())?;
        check_dim(local_dim, op.ncols())?;
        let strides = self.strides();
        let offsets: Vec<usize> = (0..local_dim)
            .map(|mut l| {
                let mut off = 0;
                for k in (0..sites.len()).rev() {
                    off += (l % local_dims[k]) * strides[sites[k]];
                    l /= local_dims[k];
                }
                off
            })
            .collect();
        let mut buf = DVector::from_element(local_dim, ZERO);
        for base in 0..self.amps.len() {
            if sites.iter().any(|&s| self.digit(&strides, base, s) != 0) {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base + off];
            }
            let out = op * &buf;
            for (l, off) in offsets.iter().enumerate() {
                self.amps[base + off] = out[l];
            }
        }
        Ok(())
    }

    /// Probability of each joint value of `sites` (first site major), i.e.
    /// the Born distribution with every other site traced out.
    pub fn marginal(&self, sites: &[usize]) -> Vec<f64> {
        let strides = self.strides();
        let local_dim: usize = sites.iter().map(|&s| self.dims[s]).product();
        let mut probs = vec![0.0; local_dim];
        for (i, c) in self.amps.iter().enumerate() {
            let mut l = 0;
            for &s in sites {
                l = l * self.dims[s] + self.digit(&strides, i, s);
            }
            probs[l] += c.norm_sqr();
        }
        probs
    }

    /// Squared norm of the component with the given sites fixed.
    pub fn weight_where(&self, fixed: &[(usize, usize)]) -> f64 {
        let strides = self.strides();
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| fixed.iter().all(|&(s, v)| self.digit(&strides, *i, s) == v))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Unnormalized component with the given sites fixed, over the
    /// remaining sites in their original order.
    pub fn slice(&self, fixed: &[(usize, usize)]) -> Register {
        let strides = self.strides();
        let dims: Vec<usize> = self
            .dims
            .iter()
            .enumerate()
            .filter(|(s, _)| !fixed.iter().any(|&(f, _)| f == *s))
            .map(|(_, &d)| d)
            .collect();
        let amps: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| fixed.iter().all(|&(s, v)| self.digit(&strides, *i, s) == v))
            .map(|(_, &c)| c)
            .collect();
        Register {
            dims,
            amps: DVector::from_vec(amps),
        }
    }

    /// Reinterprets a two-site register of equal cavity dimensions.
    /// The result is not renormalized.
    pub fn to_two_cavity_unnormalized(&self) -> Result<TwoCavityState> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: self.dims.len(),
            });
        }
        check_dim(self.dims[0], self.dims[1])?;
        let d = self.dims[0];
        Ok(TwoCavityState::from_matrix_unchecked(DMatrix::from_fn(
            d,
            d,
            |m, n| self.amps[m * d + n],
        )))
    }
}

/// Deterministic random stream.
///
/// Streams are keyed by `(seed, index)`: the draws for a given index do not
/// depend on how many other streams exist or in which order they are used,
/// which is what makes sharded Monte Carlo runs reproducible.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }
}

/// Picks an index from a discrete distribution given a uniform draw.
pub(crate) fn pick(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return k;
        }
    }
    // u * total can round up to the full sum; fall back to the last
    // outcome that actually has weight.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Projective measurement of `s` onto a two-element orthonormal basis.
///
/// Returns the outcome index, drawn with probability `|<basis_k|s>|^2`, and
/// the collapsed state `basis_k`.
pub fn born_sample(
    s: &StateVector,
    basis: [&StateVector; 2],
    rng: &mut RandomStream,
) -> Result<(usize, StateVector)> {
    for b in basis {
        check_dim(s.dim(), b.dim())?;
    }
    let gram = [
        basis[0].inner(basis[0])? - ONE,
        basis[1].inner(basis[1])? - ONE,
        basis[0].inner(basis[1])?,
    ];
    let deviation = gram.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if deviation > SPAN_TOL {
        return Err(Error::BasisNotOrthonormal(deviation));
    }
    let probs = [basis[0].inner(s)?.norm_sqr(), basis[1].inner(s)?.norm_sqr()];
    let outside = s.norm_sqr() - probs[0] - probs[1];
    if outside > SPAN_TOL {
        return Err(Error::OutsideMeasurementSpan(outside));
    }
    let k = pick(&probs, rng.uniform());
    Ok((k, basis[k].clone()))
}

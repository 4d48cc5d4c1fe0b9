//! Truncated Fock space: number states, ladder and quadrature operators.
//!
//! Everything lives in the span of `|0>, ..., |n_max>`. Products of ladder
//! operators are exact away from the top of the basis; the last
//! `interior_margin` rows are treated as truncation-contaminated by the
//! checks elsewhere in the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{PhaseError, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest Poisson tail mass a truncated coherent state may discard.
pub const COHERENT_TAIL_GUARD: f64 = 1e-12;

/// Dimension and edge policy of the truncated number basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationConfig {
    n_max: usize,
    interior_margin: usize,
}

impl TruncationConfig {
    pub fn new(n_max: usize, interior_margin: usize) -> Result<Self> {
        if n_max < 8 || !n_max.is_multiple_of(2) {
            return Err(PhaseError::InvalidConfig(format!(
                "n_max must be even and >= 8, got {n_max}"
            )));
        }
        if interior_margin < 2 {
            return Err(PhaseError::InvalidConfig(format!(
                "interior_margin must be >= 2, got {interior_margin}"
            )));
        }
        if interior_margin >= n_max {
            return Err(PhaseError::InvalidConfig(format!(
                "interior_margin {interior_margin} leaves no interior rows for n_max {n_max}"
            )));
        }
        Ok(Self {
            n_max,
            interior_margin,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Highest row index considered free of truncation effects.
    pub fn interior_limit(&self) -> usize {
        self.n_max - self.interior_margin
    }

    /// Dimensions of the even and odd parity subspaces.
    pub fn parity_dims(&self) -> (usize, usize) {
        (self.n_max / 2 + 1, self.n_max / 2)
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n_max: 256,
            interior_margin: 4,
        }
    }
}

/// Amplitudes over `|0>, ..., |n_max>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            amplitudes: DVector::from_iterator(
                values.len(),
                values.iter().map(|&v| Complex64::new(v, 0.0)),
            ),
        }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        Self {
            amplitudes: self.amplitudes.map(|c| c / norm),
        }
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(PhaseError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Hermitian operator in the number basis. Storage is dense; `bandwidth`
/// records the widest nonzero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitianOperator {
    entries: CMatrix,
    bandwidth: usize,
}

impl BandedHermitianOperator {
    pub const HERMITIAN_TOL: f64 = 1e-14;

    pub fn new(entries: CMatrix, bandwidth: usize) -> Result<Self> {
        if !entries.is_square() {
            return Err(PhaseError::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        for c in 0..dim {
            for r in 0..dim {
                if r.abs_diff(c) > bandwidth && entries[(r, c)] != ZERO {
                    return Err(PhaseError::BandViolation {
                        bandwidth,
                        row: r,
                        col: c,
                    });
                }
            }
        }
        let scale = entries.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let dev = hermitian_deviation(&entries);
        if dev > Self::HERMITIAN_TOL * scale {
            return Err(PhaseError::NotHermitian(dev));
        }
        Ok(Self { entries, bandwidth })
    }

    /// Real symmetric input; the upper triangle is mirrored so the result is
    /// exactly symmetric.
    pub fn from_real_symmetric(values: &DMatrix<f64>, bandwidth: usize) -> Result<Self> {
        let dim = values.nrows();
        let mut entries = CMatrix::zeros(dim, values.ncols());
        for c in 0..values.ncols() {
            for r in 0..=c.min(dim.saturating_sub(1)) {
                let v = Complex64::new(values[(r, c)], 0.0);
                entries[(r, c)] = v;
                entries[(c, r)] = v;
            }
        }
        Self::new(entries, bandwidth)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.dim() != self.dim() {
            return Err(PhaseError::DimensionMismatch {
                left: self.dim(),
                right: v.dim(),
            });
        }
        Ok(FockVector::from_amplitudes(&self.entries * v.amplitudes()))
    }

    /// `<v|A|v>` for the given (not necessarily normalized) state.
    pub fn expectation(&self, v: &FockVector) -> Result<Complex64> {
        let av = self.apply(v)?;
        v.inner(&av)
    }
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for c in 0..n {
        for r in 0..=c {
            worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `max |A_ij - B_ij|` over `i, j <= limit`.
pub fn max_abs_diff_within(a: &CMatrix, b: &CMatrix, limit: usize) -> f64 {
    let top = limit.min(a.nrows() - 1).min(b.nrows() - 1);
    let mut worst: f64 = 0.0;
    for c in 0..=top {
        for r in 0..=top {
            worst = worst.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    worst
}

/// Coupling ratio of the `±2` band of the phase operator.
///
/// `f(n) = n(n+1) / ((n - 1/2)(n + 3/2))` for `n >= 1`, zero otherwise.
pub fn f_ratio(n: i64) -> f64 {
    if n <= 0 {
        return 0.0;
    }
    let n = n as f64;
    // 4n(n+1) / ((2n-1)(2n+3)) keeps every factor an integer
    (4.0 * n * (n + 1.0)) / ((2.0 * n - 1.0) * (2.0 * n + 3.0))
}

/// Annihilation and creation matrices. Neither is Hermitian.
pub fn build_ladder(cfg: &TruncationConfig) -> (CMatrix, CMatrix) {
    let dim = cfg.dim();
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (a, adag)
}

/// Position, momentum, number and Hamiltonian operators.
#[derive(Debug, Clone)]
pub struct Quadratures {
    pub position: BandedHermitianOperator,
    pub momentum: BandedHermitianOperator,
    pub number: BandedHermitianOperator,
    pub hamiltonian: BandedHermitianOperator,
}

pub fn build_quadratures(cfg: &TruncationConfig) -> Quadratures {
    let (a, adag) = build_ladder(cfg);
    let half = Complex64::new(0.5, 0.0);
    let position = (&a + &adag) * half;
    // (a - a^dag) / (2i)
    let momentum = (&a - &adag) * Complex64::new(0.0, -0.5);
    let number = number_matrix(cfg);
    let hamiltonian = &number + CMatrix::identity(cfg.dim(), cfg.dim()) * half;
    Quadratures {
        position: BandedHermitianOperator::new(position, 1).expect("q is Hermitian"),
        momentum: BandedHermitianOperator::new(momentum, 1).expect("p is Hermitian"),
        number: BandedHermitianOperator::new(number, 0).expect("N is diagonal"),
        hamiltonian: BandedHermitianOperator::new(hamiltonian, 0).expect("H is diagonal"),
    }
}

pub(crate) fn number_matrix(cfg: &TruncationConfig) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_fn(cfg.dim(), |n, _| {
        Complex64::new(n as f64, 0.0)
    }))
}

/// Diagonal `(N + 1/2)^{-1/2}`.
pub(crate) fn inv_sqrt_energy(cfg: &TruncationConfig) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_fn(cfg.dim(), |n, _| {
        Complex64::new(1.0 / (n as f64 + 0.5).sqrt(), 0.0)
    }))
}

pub fn fock_state(cfg: &TruncationConfig, n: usize) -> Result<FockVector> {
    if n > cfg.n_max() {
        return Err(PhaseError::IndexOutOfRange {
            index: n,
            len: cfg.dim(),
        });
    }
    let mut amps = DVector::from_element(cfg.dim(), ZERO);
    amps[n] = ONE;
    Ok(FockVector::from_amplitudes(amps))
}

/// Poisson mass `e^{-x} sum_{n > n_max} x^n / n!` with `x = |alpha|^2`.
pub fn coherent_tail(abs_alpha: f64, n_max: usize) -> f64 {
    let x = abs_alpha * abs_alpha;
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let term = (-x + n as f64 * ln_x - libm::lgamma(n as f64 + 1.0)).exp();
        tail += term;
        if n as f64 > x && term <= tail * 1e-17 {
            break;
        }
        if term == 0.0 && n as f64 > x {
            break;
        }
        n += 1;
    }
    tail
}

/// Coherent state `|alpha>` with `alpha = abs_alpha * e^{i phase_angle}`,
/// renormalized after truncation.
pub fn coherent_state(cfg: &TruncationConfig, abs_alpha: f64, phase_angle: f64) -> Result<FockVector> {
    if !(abs_alpha >= 0.0) || !abs_alpha.is_finite() {
        return Err(PhaseError::InvalidConfig(format!(
            "coherent amplitude must be finite and >= 0, got {abs_alpha}"
        )));
    }
    let tail = coherent_tail(abs_alpha, cfg.n_max());
    if tail > COHERENT_TAIL_GUARD {
        return Err(PhaseError::TruncationInsufficient(format!(
            "|alpha| = {abs_alpha} leaves Poisson tail {tail:e} above n_max = {}",
            cfg.n_max()
        )));
    }
    let x = abs_alpha * abs_alpha;
    let amps = DVector::from_fn(cfg.dim(), |n, _| {
        if x == 0.0 {
            return if n == 0 { ONE } else { ZERO };
        }
        let ln_mod = 0.5 * (-x + n as f64 * x.ln() - libm::lgamma(n as f64 + 1.0));
        Complex64::from_polar(ln_mod.exp(), n as f64 * phase_angle)
    });
    Ok(FockVector::from_amplitudes(amps).normalized())
}

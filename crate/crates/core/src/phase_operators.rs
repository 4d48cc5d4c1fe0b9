//! Phase-operator matrices in the number basis.
//!
//! `cos 2φ̂` is exact and banded: it only couples `|n>` with `|n±2>`, with
//! amplitude `√f(n+1)/2`. `cos²φ̂` and `sin²φ̂` are built from it as
//! `(I ± cos 2φ̂)/2`. Everything that needs `φ̂` itself goes through the
//! spectral sum over the sampled phase states in [`PhaseStateTable`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{PhaseError, Result};
use crate::fock::{build_ladder, build_quadratures, f_ratio, inv_sqrt_energy, max_abs_diff_within, number_matrix, BandedHermitianOperator, CMatrix, TruncationConfig};
use crate::phase_states::{symmetrize, Branch, PhaseStateTable};

/// Spectral values with magnitude above this are dropped from the sum.
pub const SPECTRAL_VALUE_CAP: f64 = 1e8;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn build_cos2phi(cfg: &TruncationConfig) -> BandedHermitianOperator {
    let dim = cfg.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..dim - 2 {
        let v = real(0.5 * f_ratio(n as i64 + 1).sqrt());
        m[(n, n + 2)] = v;
        m[(n + 2, n)] = v;
    }
    BandedHermitianOperator::new(m, 2).expect("cos 2phi is real symmetric")
}

/// `cos²φ̂ = (I + cos 2φ̂)/2`.
pub fn build_cos_sq(cfg: &TruncationConfig) -> BandedHermitianOperator {
    half_shift(cfg, 1.0)
}

/// `sin²φ̂ = (I - cos 2φ̂)/2`.
pub fn build_sin_sq(cfg: &TruncationConfig) -> BandedHermitianOperator {
    half_shift(cfg, -1.0)
}

fn half_shift(cfg: &TruncationConfig, sign: f64) -> BandedHermitianOperator {
    let c2 = build_cos2phi(cfg);
    let dim = cfg.dim();
    let mut m = c2.entries() * real(0.5 * sign);
    for n in 0..dim {
        m[(n, n)] += real(0.5);
    }
    BandedHermitianOperator::new(m, 2).expect("shifted cos 2phi is Hermitian")
}

/// `(N + 1/2)^{-1/2} q² (N + 1/2)^{-1/2}` from the truncated position
/// operator. Agrees with [`build_cos_sq`] except on the last row.
pub fn build_cos_sq_direct(cfg: &TruncationConfig) -> BandedHermitianOperator {
    let q = build_quadratures(cfg);
    sandwich(cfg, &(q.position.entries() * q.position.entries()))
}

/// `(N + 1/2)^{-1/2} p² (N + 1/2)^{-1/2}`.
pub fn build_sin_sq_direct(cfg: &TruncationConfig) -> BandedHermitianOperator {
    let q = build_quadratures(cfg);
    sandwich(cfg, &(q.momentum.entries() * q.momentum.entries()))
}

fn sandwich(cfg: &TruncationConfig, inner: &CMatrix) -> BandedHermitianOperator {
    let d = inv_sqrt_energy(cfg);
    let mut m = &d * inner * &d;
    // q² and p² are Hermitian only up to rounding in the products
    hermitize(&mut m);
    BandedHermitianOperator::new(m, 2).expect("sandwiched quadrature is Hermitian")
}

fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for c in 0..n {
        m[(c, c)].im = 0.0;
        for r in 0..c {
            let v = 0.5 * (m[(r, c)] + m[(c, r)].conj());
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
}

/// Which angle the minus branch `|λ,->` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseLabeling {
    /// `φ - π`, the eigenvalue of `φ̂` on `|λ,->`.
    #[default]
    Eigenvalue,
    /// `φ + π`, the angle on the spectrum `(π, 3π/2)`.
    Angular,
}

impl PhaseLabeling {
    pub fn minus_shift(self) -> f64 {
        match self {
            PhaseLabeling::Eigenvalue => -std::f64::consts::PI,
            PhaseLabeling::Angular => std::f64::consts::PI,
        }
    }
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Values of an operator function on the two branches. Both closures take
/// the plus-branch angle `φ ∈ (0, π/2)` of a node.
pub struct SpectralFunction {
    plus: ScalarFn,
    minus: ScalarFn,
}

impl SpectralFunction {
    pub fn new(plus: impl Fn(f64) -> f64 + Send + Sync + 'static, minus: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            plus: Box::new(plus),
            minus: Box::new(minus),
        }
    }

    /// `g(φ̂)`: `g(φ)` on the plus branch and `g(φ ∓ π)` on the minus branch.
    pub fn of_phase(g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static, labeling: PhaseLabeling) -> Self {
        let shift = labeling.minus_shift();
        let gm = g.clone();
        Self::new(g, move |phi| gm(phi + shift))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, move |_| c)
    }

    pub fn plus_value(&self, phi: f64) -> f64 {
        (self.plus)(phi)
    }

    pub fn minus_value(&self, phi: f64) -> f64 {
        (self.minus)(phi)
    }
}

/// Result of a spectral sum; `dropped_nodes` lists nodes whose function
/// value exceeded [`SPECTRAL_VALUE_CAP`] or was not finite.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    pub operator: BandedHermitianOperator,
    pub dropped_nodes: Vec<usize>,
}

/// `A = Σ_k W_k [g₊(φ_k) |λ_k,+><λ_k,+| + g₋(φ_k) |λ_k,-><λ_k,-|]`, with
/// `W_k` the λ-weights of the grid.
pub fn build_spectral_operator(table: &PhaseStateTable, func: &SpectralFunction) -> SpectralOperator {
    let grid = table.grid();
    let mut dropped = Vec::new();
    let mut plus_w = vec![0.0; grid.len()];
    let mut minus_w = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let phi = grid.phi_nodes()[k];
        let (gp, gm) = (func.plus_value(phi), func.minus_value(phi));
        if !gp.is_finite() || !gm.is_finite() || gp.abs() > SPECTRAL_VALUE_CAP || gm.abs() > SPECTRAL_VALUE_CAP {
            dropped.push(k);
            continue;
        }
        let w = grid.lambda_weight(k);
        plus_w[k] = w * gp;
        minus_w[k] = w * gm;
    }

    let weighted = |branch: Branch, weights: &[f64]| {
        let c = table.coeffs(branch);
        let mut scaled = c.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= weights[k];
        }
        scaled * c.transpose()
    };
    let mut sum: DMatrix<f64> = weighted(Branch::Plus, &plus_w) + weighted(Branch::Minus, &minus_w);
    symmetrize(&mut sum);
    let dim = table.dim();
    let operator = BandedHermitianOperator::from_real_symmetric(&sum, dim - 1).expect("spectral sum is symmetric");
    SpectralOperator {
        operator,
        dropped_nodes: dropped,
    }
}

/// The phase operator under the given minus-branch labeling.
pub fn build_phi(table: &PhaseStateTable, labeling: PhaseLabeling) -> BandedHermitianOperator {
    build_spectral_operator(table, &SpectralFunction::of_phase(|p| p, labeling)).operator
}

pub fn build_cos_phi(table: &PhaseStateTable) -> BandedHermitianOperator {
    build_spectral_operator(table, &SpectralFunction::of_phase(f64::cos, PhaseLabeling::Eigenvalue)).operator
}

pub fn build_sin_phi(table: &PhaseStateTable) -> BandedHermitianOperator {
    build_spectral_operator(table, &SpectralFunction::of_phase(f64::sin, PhaseLabeling::Eigenvalue)).operator
}

/// `tan φ̂`. Nodes where `|tan φ_k|` exceeds the cap are reported in
/// `dropped_nodes`.
pub fn build_tan_phi(table: &PhaseStateTable) -> SpectralOperator {
    build_spectral_operator(table, &SpectralFunction::of_phase(f64::tan, PhaseLabeling::Eigenvalue))
}

/// `cos 2φ̂` through the spectral route, for comparison with the banded
/// construction.
pub fn build_cos2phi_spectral(table: &PhaseStateTable) -> BandedHermitianOperator {
    build_spectral_operator(table, &SpectralFunction::of_phase(|p| (2.0 * p).cos(), PhaseLabeling::Eigenvalue)).operator
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(PhaseError::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// Interior deviations of the commutators with the number operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorReport {
    /// `[cos 2φ̂, N]` against `(N+1/2)^{-1/2} (a² - a†²) (N+1/2)^{-1/2}`.
    pub cos2phi_vs_ladder: f64,
    /// `[cos²φ̂, N]` against `½ [cos 2φ̂, N]`.
    pub cos_sq_vs_half: f64,
    /// `[sin²φ̂, N]` against `-½ [cos 2φ̂, N]`.
    pub sin_sq_vs_minus_half: f64,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.cos2phi_vs_ladder.max(self.cos_sq_vs_half).max(self.sin_sq_vs_minus_half)
    }
}

pub fn check_comm_relations(cfg: &TruncationConfig) -> CommutatorReport {
    let n = number_matrix(cfg);
    let c2 = build_cos2phi(cfg);
    let comm_c2 = commutator(c2.entries(), &n).expect("same dimension");
    let (a, adag) = build_ladder(cfg);
    let d = inv_sqrt_energy(cfg);
    let rhs = &d * (&a * &a - &adag * &adag) * &d;
    let lim = cfg.interior_limit();

    let comm_cos_sq = commutator(build_cos_sq(cfg).entries(), &n).expect("same dimension");
    let comm_sin_sq = commutator(build_sin_sq(cfg).entries(), &n).expect("same dimension");
    CommutatorReport {
        cos2phi_vs_ladder: max_abs_diff_within(&comm_c2, &rhs, lim),
        cos_sq_vs_half: max_abs_diff_within(&comm_cos_sq, &(&comm_c2 * real(0.5)), lim),
        sin_sq_vs_minus_half: max_abs_diff_within(&comm_sin_sq, &(&comm_c2 * real(-0.5)), lim),
    }
}

/// Eigenvalues of the even and odd blocks of the truncated `cos 2φ̂`.
pub fn parity_block_spectra(cfg: &TruncationConfig) -> (Vec<f64>, Vec<f64>) {
    let block = |offset: usize, size: usize| {
        let m = DMatrix::from_fn(size, size, |i, j| {
            if i.abs_diff(j) == 1 {
                let low = 2 * i.min(j) + offset;
                0.5 * f_ratio(low as i64 + 1).sqrt()
            } else {
                0.0
            }
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    };
    let (even, odd) = cfg.parity_dims();
    (block(0, even), block(1, odd))
}

/// `max |A_ij|` over pairs `(i, j)` of equal parity.
pub fn max_same_parity_entry(a: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..a.ncols() {
        for r in (c % 2..a.nrows()).step_by(2) {
            worst = worst.max(a[(r, c)].norm());
        }
    }
    worst
}

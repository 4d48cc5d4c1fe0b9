//! Phase-state coefficients in the number basis.
//!
//! The eigenstates of `cos 2φ̂` split by parity. Their coefficients are
//! normalized Gegenbauer polynomials with a `(1 - λ²)^{∓1/8}` prefactor:
//!
//! ```text
//! <2n   | λ, e> = (1-λ²)^{-1/8} C_n^{(1/4)}(λ) / N_n(1/4)
//! <2n+1 | λ, o> = (1-λ²)^{+1/8} C_n^{(3/4)}(λ) / N_n(3/4)
//! ```
//!
//! and the phase states are `|λ,±> = (|λ,e> ± |λ,o>) / √2`. The states are
//! continuum-normalized, so they are only ever sampled at quadrature nodes
//! and their delta normalization holds under quadrature sums.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use nalgebra::{DMatrix, DVectorView};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PhaseError, Result};
use crate::fock::{f_ratio, FockVector, TruncationConfig};
use crate::special::{gegenbauer_eval, gegenbauer_fill, gegenbauer_norm_sq, gegenbauer_norm_sq_all, GegenbauerOrder, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn order(self) -> GegenbauerOrder {
        match self {
            Parity::Even => GegenbauerOrder::EVEN,
            Parity::Odd => GegenbauerOrder::ODD,
        }
    }

    fn prefactor_exponent(self) -> f64 {
        match self {
            Parity::Even => -0.125,
            Parity::Odd => 0.125,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

fn check_interior(lambda: f64) -> Result<()> {
    if lambda.abs() < 1.0 {
        Ok(())
    } else {
        Err(PhaseError::Domain(lambda))
    }
}

/// `<2n|λ,e>` or `<2n+1|λ,o>`; `n` indexes within the parity subspace.
pub fn coeff(parity: Parity, n: usize, lambda: f64) -> Result<f64> {
    check_interior(lambda)?;
    let order = parity.order();
    let one_minus = (1.0 - lambda) * (1.0 + lambda);
    let poly = gegenbauer_eval(order, n, lambda);
    Ok(one_minus.powf(parity.prefactor_exponent()) * poly / gegenbauer_norm_sq(order, n).sqrt())
}

/// Largest mismatch between the two sides of the parity recurrence
///
/// ```text
/// even: √f(2n+1) <2n+2|λ,e> = 2λ <2n|λ,e> - √f(2n-1) <2n-2|λ,e>
/// odd:  √f(2n+2) <2n+3|λ,o> = 2λ <2n+1|λ,o> - √f(2n) <2n-1|λ,o>
/// ```
///
/// for `n = 0..=n_limit`, with every coefficient taken from [`coeff`].
pub fn recurrence_residual(parity: Parity, lambda: f64, n_limit: usize) -> Result<f64> {
    check_interior(lambda)?;
    let shift = match parity {
        Parity::Even => 1,
        Parity::Odd => 2,
    };
    let mut worst: f64 = 0.0;
    for n in 0..=n_limit {
        let i = 2 * n as i64;
        let lhs = f_ratio(i + shift).sqrt() * coeff(parity, n + 1, lambda)?;
        let mut rhs = 2.0 * lambda * coeff(parity, n, lambda)?;
        if n > 0 {
            rhs -= f_ratio(i + shift - 2).sqrt() * coeff(parity, n - 1, lambda)?;
        }
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Phase-operator eigenvalue attached to `|λ,±>`: `φ = acos(λ)/2` on the
/// plus branch and `φ - π` on the minus branch.
pub fn phi_label(lambda: f64, branch: Branch) -> f64 {
    let phi = 0.5 * lambda.acos();
    match branch {
        Branch::Plus => phi,
        Branch::Minus => phi - PI,
    }
}

/// Angle on the spectrum `(0, π/2) ∪ (π, 3π/2)` used for the `|φ>` states
/// and phase distributions. Differs from [`phi_label`] by `2π` on the minus
/// branch.
pub fn phi_display_label(lambda: f64, branch: Branch) -> f64 {
    let phi = 0.5 * lambda.acos();
    match branch {
        Branch::Plus => phi,
        Branch::Minus => phi + PI,
    }
}

/// `1 / N_m` for both parities up to the truncation.
#[derive(Debug, Clone)]
struct InverseNorms {
    even: Vec<f64>,
    odd: Vec<f64>,
}

impl InverseNorms {
    fn new(n_max: usize) -> Self {
        let inv = |v: Vec<f64>| v.into_iter().map(|x| 1.0 / x.sqrt()).collect();
        Self {
            even: inv(gegenbauer_norm_sq_all(GegenbauerOrder::EVEN, n_max / 2)),
            odd: inv(gegenbauer_norm_sq_all(GegenbauerOrder::ODD, n_max / 2)),
        }
    }
}

/// Plus-branch column `<n|λ,+>` for `n = 0..=n_max`. `sin_2phi` is
/// `(1-λ²)^{1/2}`. The minus column differs by the sign of odd entries.
fn plus_column(n_max: usize, lambda: f64, sin_2phi: f64, norms: &InverseNorms, scratch: &mut Vec<f64>) -> Vec<f64> {
    let mut col = vec![0.0; n_max + 1];
    let even_count = n_max / 2 + 1;
    let odd_count = n_max / 2 + usize::from(n_max % 2 == 1);

    let even_pref = FRAC_1_SQRT_2 * sin_2phi.powf(-0.25);
    gegenbauer_fill(GegenbauerOrder::EVEN, lambda, even_count, scratch);
    for (m, c) in scratch.iter().enumerate() {
        col[2 * m] = even_pref * c * norms.even[m];
    }

    let odd_pref = FRAC_1_SQRT_2 * sin_2phi.powf(0.25);
    gegenbauer_fill(GegenbauerOrder::ODD, lambda, odd_count, scratch);
    for (m, c) in scratch.iter().enumerate() {
        col[2 * m + 1] = odd_pref * c * norms.odd[m];
    }
    col
}

/// Sampled `<n|λ,branch>` at an arbitrary interior `λ`.
pub fn sample_state(n_max: usize, lambda: f64, branch: Branch) -> Result<Vec<f64>> {
    check_interior(lambda)?;
    let norms = InverseNorms::new(n_max);
    let s2 = ((1.0 - lambda) * (1.0 + lambda)).sqrt();
    let mut col = plus_column(n_max, lambda, s2, &norms, &mut Vec::new());
    if branch == Branch::Minus {
        negate_odd(&mut col);
    }
    Ok(col)
}

fn negate_odd(col: &mut [f64]) {
    for v in col.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// Coefficients `<n|λ_k,±>` for every node of a quadrature grid.
///
/// Column `k` of [`PhaseStateTable::coeffs`] is the sampled state at node
/// `k`; rows are number states.
#[derive(Debug, Clone)]
pub struct PhaseStateTable {
    grid: QuadratureRule,
    cfg: TruncationConfig,
    plus: DMatrix<f64>,
    minus: DMatrix<f64>,
}

pub fn build_phase_table(cfg: &TruncationConfig, grid: &QuadratureRule) -> Result<PhaseStateTable> {
    let n_max = cfg.n_max();
    let norms = InverseNorms::new(n_max);
    let columns: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map_init(Vec::new, |scratch, k| {
            let lambda = grid.lambda_nodes()[k];
            check_interior(lambda)?;
            Ok(plus_column(n_max, lambda, grid.sin_2phi()[k], &norms, scratch))
        })
        .collect::<Result<_>>()?;

    let dim = cfg.dim();
    let plus = DMatrix::from_fn(dim, grid.len(), |n, k| columns[k][n]);
    let minus = DMatrix::from_fn(dim, grid.len(), |n, k| if n % 2 == 0 { plus[(n, k)] } else { -plus[(n, k)] });
    Ok(PhaseStateTable {
        grid: grid.clone(),
        cfg: *cfg,
        plus,
        minus,
    })
}

impl PhaseStateTable {
    pub fn grid(&self) -> &QuadratureRule {
        &self.grid
    }

    pub fn config(&self) -> &TruncationConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.cfg.dim()
    }

    pub fn node_count(&self) -> usize {
        self.grid.len()
    }

    pub fn coeffs(&self, branch: Branch) -> &DMatrix<f64> {
        match branch {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }

    pub fn column(&self, k: usize, branch: Branch) -> DVectorView<'_, f64> {
        self.coeffs(branch).column(k)
    }

    /// `<n|λ_k,e>` (for even `n`) or `<n|λ_k,o>` (odd `n`), i.e. the parity
    /// coefficient without the `1/√2` of the branch mix.
    pub fn parity_coeff(&self, n: usize, k: usize) -> f64 {
        std::f64::consts::SQRT_2 * self.plus[(n, k)]
    }

    /// Sampled `|λ_k, branch>` as a (non-normalized) Fock vector.
    pub fn state(&self, k: usize, branch: Branch) -> Result<FockVector> {
        if k >= self.node_count() {
            return Err(PhaseError::IndexOutOfRange {
                index: k,
                len: self.node_count(),
            });
        }
        let col = self.column(k, branch);
        Ok(FockVector::from_amplitudes(col.map(|v| Complex64::new(v, 0.0))))
    }

    /// Quadrature Gram matrix `Σ_k W_k <m|λ_k,p><n|λ_k,p>` of one parity
    /// block, `m, n < size`, where `W_k` are the λ-weights.
    pub fn parity_gram(&self, parity: Parity, size: usize) -> DMatrix<f64> {
        let offset = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let weights = self.grid.lambda_weights();
        DMatrix::from_fn(size, size, |i, j| {
            let (a, b) = (2 * i + offset, 2 * j + offset);
            (0..self.node_count())
                .map(|k| weights[k] * self.parity_coeff(a, k) * self.parity_coeff(b, k))
                .sum()
        })
    }

    /// Truncated `Σ_n <n|λ_k,+><n|λ_k,->`.
    pub fn branch_overlap(&self, k: usize) -> f64 {
        self.plus.column(k).dot(&self.minus.column(k))
    }

    /// `P = Σ_k W_k (|λ_k,+><λ_k,+| + |λ_k,-><λ_k,-|)` on number indices
    /// `0..size`.
    pub fn resolution_of_identity(&self, size: usize) -> DMatrix<f64> {
        let weights = self.grid.lambda_weights();
        let p = self.plus.rows(0, size);
        let m = self.minus.rows(0, size);
        let scale = |mat: nalgebra::DMatrixView<'_, f64>| {
            let mut s = mat.clone_owned();
            for (k, mut col) in s.column_iter_mut().enumerate() {
                col *= weights[k];
            }
            s
        };
        let mut out = scale(p) * p.transpose() + scale(m) * m.transpose();
        symmetrize(&mut out);
        out
    }

    /// CSV dump: `node,lambda,phi,branch,n,coefficient`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node,lambda,phi,branch,n,coefficient")?;
        for k in 0..self.node_count() {
            let lambda = self.grid.lambda_nodes()[k];
            for branch in Branch::BOTH {
                let phi = phi_label(lambda, branch);
                for n in 0..self.dim() {
                    writeln!(
                        w,
                        "{k},{},{},{},{n},{}",
                        fmt_f64(lambda),
                        fmt_f64(phi),
                        branch.as_str(),
                        fmt_f64(self.coeffs(branch)[(n, k)])
                    )?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for c in 0..n {
        for r in 0..c {
            let v = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
}

/// Fixed 17-significant-digit rendering shared by every text output.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

//! Phase statistics: moments in number states, the uniform limit, phase
//! distributions, and coherent-state expectations.
//!
//! Even moments go through powers of the banded `cos 2φ̂`:
//!
//! ```text
//! cos^{2k} φ = ((1 + cos 2φ)/2)^k
//! m_{2k}(n)  = 2^{-k} Σ_m C(k, 2m) <n|cos^{2m} 2φ̂|n>
//! ```
//!
//! (odd powers of `cos 2φ̂` have zero diagonal). The diagonal of a band
//! power is a sum over ±2 walks, and rescaling the band to super-diagonal
//! `f/4` and sub-diagonal `1` leaves it unchanged while making every entry
//! rational, so the moments come out as exact fractions.

use std::f64::consts::PI;
use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{PhaseError, Result};
use crate::fock::{build_quadratures, coherent_state, f_ratio, CMatrix, FockVector, TruncationConfig};
use crate::phase_operators::{build_cos2phi, build_cos_sq, build_sin_sq, build_spectral_operator, commutator, PhaseLabeling, SpectralFunction};
use crate::phase_states::{fmt_f64, phi_display_label, sample_state, Branch, PhaseStateTable};

/// Which side of the uniform-distribution value a moment falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    BelowUniform,
    Equal,
    AboveUniform,
}

impl Side {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn classify(value: f64, uniform: f64) -> Self {
        if (value - uniform).abs() <= Self::TOLERANCE {
            Side::Equal
        } else if value < uniform {
            Side::BelowUniform
        } else {
            Side::AboveUniform
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::BelowUniform => "below",
            Side::Equal => "equal",
            Side::AboveUniform => "above",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub k: usize,
    pub value: f64,
    pub uniform_value: f64,
    pub side: Side,
}

/// `cos φ̂` or `sin φ̂`; the number-state moments of the two coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigFamily {
    Cos,
    Sin,
}

impl TrigFamily {
    fn eval(self, phi: f64) -> f64 {
        match self {
            TrigFamily::Cos => phi.cos(),
            TrigFamily::Sin => phi.sin(),
        }
    }
}

fn check_reach(n: usize, k: usize, cfg: &TruncationConfig) -> Result<()> {
    if k == 0 {
        return Err(PhaseError::InvalidConfig("moment order k must be >= 1".into()));
    }
    if n + 2 * k > cfg.interior_limit() {
        return Err(PhaseError::TruncationInsufficient(format!(
            "moment (n = {n}, k = {k}) needs n + 2k <= {}",
            cfg.interior_limit()
        )));
    }
    Ok(())
}

/// `f(n)` as an exact fraction.
pub fn f_ratio_exact(n: i64) -> BigRational {
    if n < 1 {
        return BigRational::zero();
    }
    let n = BigInt::from(n);
    let num = BigInt::from(4) * &n * (&n + 1);
    let den = (BigInt::from(2) * &n - 1) * (BigInt::from(2) * &n + 3);
    BigRational::new(num, den)
}

/// `<n|cos^j 2φ̂|n>` for `j = 0..=max_power` in exact arithmetic.
pub fn cos2phi_power_diagonals(n: usize, max_power: usize) -> Vec<BigRational> {
    let len = n + 2 * max_power + 3;
    let up: Vec<BigRational> = (0..len).map(|i| f_ratio_exact(i as i64 + 1) / BigInt::from(4)).collect();
    let mut row = vec![BigRational::zero(); len];
    row[n] = BigRational::one();
    let mut out = vec![BigRational::one()];
    for _ in 0..max_power {
        let mut next = vec![BigRational::zero(); len];
        for (i, v) in row.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if i + 2 < len {
                next[i + 2] += v * &up[i];
            }
            if i >= 2 {
                next[i - 2] += v;
            }
        }
        row = next;
        out.push(row[n].clone());
    }
    out
}

/// Same walk in floating point on the symmetric band `√f(i+1)/2`.
fn cos2phi_power_diagonals_f64(n: usize, max_power: usize) -> Vec<f64> {
    let len = n + 2 * max_power + 3;
    let band: Vec<f64> = (0..len).map(|i| 0.5 * f_ratio(i as i64 + 1).sqrt()).collect();
    let mut row = vec![0.0; len];
    row[n] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..max_power {
        let mut next = vec![0.0; len];
        for (i, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            if i + 2 < len {
                next[i + 2] += v * band[i];
            }
            if i >= 2 {
                next[i - 2] += v * band[i - 2];
            }
        }
        row = next;
        out.push(row[n]);
    }
    out
}

/// `m_{2k}(n)` as an exact fraction.
pub fn moment_even_exact(n: usize, k: usize, cfg: &TruncationConfig) -> Result<BigRational> {
    check_reach(n, k, cfg)?;
    let diag = cos2phi_power_diagonals(n, k);
    let mut sum = BigRational::zero();
    for m in 0..=k / 2 {
        sum += BigRational::from_integer(binomial(BigInt::from(k), BigInt::from(2 * m))) * &diag[2 * m];
    }
    Ok(sum / BigInt::from(2).pow(k as u32))
}

/// `m_{2k}(n) = <n|cos^{2k} φ̂|n> = <n|sin^{2k} φ̂|n>`.
pub fn moment_even(n: usize, k: usize, cfg: &TruncationConfig) -> Result<f64> {
    check_reach(n, k, cfg)?;
    let diag = cos2phi_power_diagonals_f64(n, k);
    let sum: f64 = (0..=k / 2)
        .map(|m| binomial(k as u64, 2 * m as u64) as f64 * diag[2 * m])
        .sum();
    Ok(sum / 2f64.powi(k as i32))
}

pub fn moment_report(n: usize, k: usize, cfg: &TruncationConfig) -> Result<MomentReport> {
    let value = moment_even(n, k, cfg)?;
    let uniform_value = uniform_moment(k);
    Ok(MomentReport {
        n,
        k,
        value,
        uniform_value,
        side: Side::classify(value, uniform_value),
    })
}

/// `<n|cos² 2φ̂|n> = (f(n+1) + f(n-1))/4`.
pub fn cos2phi_squared_diagonal(n: usize) -> BigRational {
    (f_ratio_exact(n as i64 + 1) + f_ratio_exact(n as i64 - 1)) / BigInt::from(4)
}

/// `u_{2k} = (2k-1)!!/(2k)!!`, the moment of a uniform phase.
pub fn uniform_moment_exact(k: usize) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=k {
        num *= 2 * j - 1;
        den *= 2 * j;
    }
    BigRational::new(num, den)
}

pub fn uniform_moment(k: usize) -> f64 {
    uniform_moment_exact(k).to_f64().expect("finite ratio")
}

/// `(2^{-k} Σ_m 2^{-2m} C(k, 2m) C(2m, m), u_{2k})`: the large-`n` limit of
/// the band-power formula (where `f → 1`) next to the uniform moment.
pub fn uniform_limit_identity(k: usize) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    for m in 0..=k / 2 {
        let c = binomial(BigInt::from(k), BigInt::from(2 * m)) * binomial(BigInt::from(2 * m), BigInt::from(m));
        sum += BigRational::new(c, BigInt::from(2).pow(2 * m as u32));
    }
    (sum / BigInt::from(2).pow(k as u32), uniform_moment_exact(k))
}

/// `<n|g(φ̂)|n>` through the spectral sum.
fn spectral_diagonal(n: usize, table: &PhaseStateTable, g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static) -> Result<f64> {
    if n >= table.dim() {
        return Err(PhaseError::IndexOutOfRange { index: n, len: table.dim() });
    }
    let op = build_spectral_operator(table, &SpectralFunction::of_phase(g, PhaseLabeling::Eigenvalue)).operator;
    Ok(op.get(n, n).re)
}

/// `<n|cos^{2k+1} φ̂|n>` (or the sine variant), which vanishes for every
/// number state.
pub fn moment_odd(n: usize, k: usize, table: &PhaseStateTable, family: TrigFamily) -> Result<f64> {
    let p = 2 * k as i32 + 1;
    spectral_diagonal(n, table, move |phi| family.eval(phi).powi(p))
}

/// `m_{2k}(n)` through the spectral sum; cross-check for [`moment_even`].
pub fn moment_even_spectral(n: usize, k: usize, table: &PhaseStateTable, family: TrigFamily) -> Result<f64> {
    let p = 2 * k as i32;
    spectral_diagonal(n, table, move |phi| family.eval(phi).powi(p))
}

/// Phase density sampled at the quadrature nodes of both spectral
/// intervals. Angles use the display labels in `(0, π/2) ∪ (π, 3π/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    pub phi: Vec<f64>,
    pub branch: Vec<Branch>,
    pub density: Vec<f64>,
    /// φ-quadrature weight of each sample.
    pub weight: Vec<f64>,
}

impl PhaseDistribution {
    pub fn integral(&self) -> f64 {
        self.density.iter().zip(&self.weight).map(|(d, w)| d * w).sum()
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    /// CSV: `phi,branch,density`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "phi,branch,density")?;
        for i in 0..self.len() {
            writeln!(w, "{},{},{}", fmt_f64(self.phi[i]), self.branch[i].as_str(), fmt_f64(self.density[i]))?;
        }
        Ok(())
    }
}

/// `P(φ) = |<φ|ψ>|²` with `|φ> = (2 sin 2φ)^{1/2} |λ,±>`, so that `P`
/// integrates to one over both intervals.
pub fn phase_distribution(state: &FockVector, table: &PhaseStateTable) -> Result<PhaseDistribution> {
    if state.dim() != table.dim() {
        return Err(PhaseError::DimensionMismatch {
            left: state.dim(),
            right: table.dim(),
        });
    }
    let grid = table.grid();
    let q = table.node_count();
    let mut out = PhaseDistribution {
        phi: Vec::with_capacity(2 * q),
        branch: Vec::with_capacity(2 * q),
        density: Vec::with_capacity(2 * q),
        weight: Vec::with_capacity(2 * q),
    };
    for branch in Branch::BOTH {
        let coeffs = table.coeffs(branch);
        for k in 0..q {
            let amp: Complex64 = coeffs.column(k).iter().zip(state.amplitudes().iter()).map(|(c, a)| a * c).sum();
            out.phi.push(phi_display_label(grid.lambda_nodes()[k], branch));
            out.branch.push(branch);
            out.density.push(2.0 * grid.sin_2phi()[k] * amp.norm_sqr());
            out.weight.push(grid.weights()[k]);
        }
    }
    Ok(out)
}

/// Phase density at an arbitrary angle in `(0, π/2) ∪ (π, 3π/2)`.
pub fn phase_density_at(state: &FockVector, phi: f64) -> Result<f64> {
    let branch = if phi > 0.0 && phi < 0.5 * PI {
        Branch::Plus
    } else if phi > PI && phi < 1.5 * PI {
        Branch::Minus
    } else {
        return Err(PhaseError::Domain(phi));
    };
    let n_max = state.dim() - 1;
    let col = sample_state(n_max, (2.0 * phi).cos(), branch)?;
    let amp: Complex64 = col.iter().zip(state.amplitudes().iter()).map(|(c, a)| a * c).sum();
    Ok(2.0 * (2.0 * phi).sin() * amp.norm_sqr())
}

/// `S(|α|) = e^{-x} Σ_n x^{n+1} / (n! √((n+5/2)(n+1/2)))`, `x = |α|²`, the
/// common factor of the coherent-state `cos 2φ̂` expectations. Tends to 1.
pub fn coherent_series_factor(abs_alpha: f64) -> f64 {
    let x = abs_alpha * abs_alpha;
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let ln_term = -x + (nf + 1.0) * ln_x - libm::lgamma(nf + 1.0);
        let term = ln_term.exp() / ((nf + 2.5) * (nf + 0.5)).sqrt();
        sum += term;
        if nf > x && term <= 1e-17 * sum {
            break;
        }
        n += 1;
    }
    sum
}

/// `<α|cos 2φ̂|α> = S(|α|) cos 2φ`.
pub fn coherent_cos2phi(abs_alpha: f64, phase_angle: f64) -> f64 {
    coherent_series_factor(abs_alpha) * (2.0 * phase_angle).cos()
}

/// `<α|-i[cos 2φ̂, H]|α> = 2 S(|α|) sin 2φ`.
pub fn coherent_comm_h(abs_alpha: f64, phase_angle: f64) -> f64 {
    2.0 * coherent_series_factor(abs_alpha) * (2.0 * phase_angle).sin()
}

fn expect(m: &CMatrix, v: &FockVector) -> Complex64 {
    let a = v.amplitudes();
    a.dotc(&(m * a))
}

fn comm_h_matrix(a: &CMatrix, cfg: &TruncationConfig) -> CMatrix {
    let h = build_quadratures(cfg).hamiltonian;
    commutator(a, h.entries()).expect("same dimension") * Complex64::new(0.0, -1.0)
}

/// Quantities compared against their classical counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalQuantity {
    /// `<cos 2φ̂>` vs `cos 2φ`.
    Cos2Phi,
    /// `<-i[cos 2φ̂, H]>` vs `{cos 2φ, H} = 2 sin 2φ`.
    Cos2PhiBracket,
    /// `<-i[cos²φ̂, H]>` vs `sin 2φ`.
    CosSqBracket,
    /// `<-i[sin²φ̂, H]>` vs `-sin 2φ`.
    SinSqBracket,
}

impl ClassicalQuantity {
    pub const ALL: [ClassicalQuantity; 4] = [
        ClassicalQuantity::Cos2Phi,
        ClassicalQuantity::Cos2PhiBracket,
        ClassicalQuantity::CosSqBracket,
        ClassicalQuantity::SinSqBracket,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassicalQuantity::Cos2Phi => "cos2phi",
            ClassicalQuantity::Cos2PhiBracket => "comm_cos2phi_h",
            ClassicalQuantity::CosSqBracket => "comm_cos_sq_h",
            ClassicalQuantity::SinSqBracket => "comm_sin_sq_h",
        }
    }

    pub fn classical(self, phi: f64) -> f64 {
        match self {
            ClassicalQuantity::Cos2Phi => (2.0 * phi).cos(),
            ClassicalQuantity::Cos2PhiBracket => 2.0 * (2.0 * phi).sin(),
            ClassicalQuantity::CosSqBracket => (2.0 * phi).sin(),
            ClassicalQuantity::SinSqBracket => -(2.0 * phi).sin(),
        }
    }

    /// Closed-form series value.
    pub fn series(self, abs_alpha: f64, phi: f64) -> f64 {
        match self {
            ClassicalQuantity::Cos2Phi => coherent_cos2phi(abs_alpha, phi),
            ClassicalQuantity::Cos2PhiBracket => coherent_comm_h(abs_alpha, phi),
            ClassicalQuantity::CosSqBracket => 0.5 * coherent_comm_h(abs_alpha, phi),
            ClassicalQuantity::SinSqBracket => -0.5 * coherent_comm_h(abs_alpha, phi),
        }
    }

    fn operator(self, cfg: &TruncationConfig) -> CMatrix {
        match self {
            ClassicalQuantity::Cos2Phi => build_cos2phi(cfg).into_entries(),
            ClassicalQuantity::Cos2PhiBracket => comm_h_matrix(build_cos2phi(cfg).entries(), cfg),
            ClassicalQuantity::CosSqBracket => comm_h_matrix(build_cos_sq(cfg).entries(), cfg),
            ClassicalQuantity::SinSqBracket => comm_h_matrix(build_sin_sq(cfg).entries(), cfg),
        }
    }

    /// `<α|A|α>` with the truncated coherent vector and the built matrix.
    pub fn matrix(self, cfg: &TruncationConfig, abs_alpha: f64, phi: f64) -> Result<f64> {
        let v = coherent_state(cfg, abs_alpha, phi)?;
        Ok(expect(&self.operator(cfg), &v).re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalLimitRow {
    pub abs_alpha: f64,
    pub quantity: ClassicalQuantity,
    pub series: f64,
    pub matrix: f64,
    pub classical: f64,
}

impl ClassicalLimitRow {
    /// `|matrix - classical|`.
    pub fn deviation(&self) -> f64 {
        (self.matrix - self.classical).abs()
    }

    pub fn path_mismatch(&self) -> f64 {
        (self.matrix - self.series).abs()
    }
}

/// One row per `(|α|, quantity)`, in input order.
pub fn classical_limit_report(abs_alphas: &[f64], phase_angle: f64, cfg: &TruncationConfig) -> Result<Vec<ClassicalLimitRow>> {
    let ops: Vec<(ClassicalQuantity, CMatrix)> = ClassicalQuantity::ALL.iter().map(|&q| (q, q.operator(cfg))).collect();
    let mut rows = Vec::with_capacity(abs_alphas.len() * ops.len());
    for &abs_alpha in abs_alphas {
        let v = coherent_state(cfg, abs_alpha, phase_angle)?;
        for (q, op) in &ops {
            rows.push(ClassicalLimitRow {
                abs_alpha,
                quantity: *q,
                series: q.series(abs_alpha, phase_angle),
                matrix: expect(op, &v).re,
                classical: q.classical(phase_angle),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_state;
    use crate::phase_states::build_phase_table;
    use crate::special::build_quadrature;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    // mpmath series oracle, 18 digits
    const S2: f64 = 0.892_797_826_340_335_896;
    const S4: f64 = 0.969_844_209_262_996_251;
    const S8: f64 = 0.992_250_041_701_972_891;
    const S16: f64 = 0.998_050_712_330_284_924;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg() -> TruncationConfig {
        TruncationConfig::new(64, 4).unwrap()
    }

    #[test]
    fn exact_moments() {
        let c = cfg();
        let m4: Vec<_> = (0..3).map(|n| moment_even_exact(n, 2, &c).unwrap()).collect();
        assert_eq!(m4, vec![frac(7, 20), frac(9, 28), frac(5, 12)]);
        let m6: Vec<_> = (0..3).map(|n| moment_even_exact(n, 3, &c).unwrap()).collect();
        assert_eq!(m6, vec![frac(11, 40), frac(13, 56), frac(3, 8)]);
        for n in 0..=50 {
            assert_eq!(moment_even_exact(n, 1, &c).unwrap(), frac(1, 2));
        }
    }

    #[test]
    fn float_moments_mirror_exact() {
        let c = cfg();
        for n in 0..12 {
            for k in 1..5 {
                let exact = moment_even_exact(n, k, &c).unwrap().to_f64().unwrap();
                assert_abs_diff_eq!(moment_even(n, k, &c).unwrap(), exact, epsilon = 1e-15);
            }
        }
        assert!(moment_even(0, 8, &c).unwrap() < uniform_moment(8));
    }

    #[test]
    fn reach_guard() {
        let c = TruncationConfig::new(16, 4).unwrap();
        assert!(moment_even(8, 2, &c).is_ok());
        assert!(matches!(moment_even(9, 2, &c), Err(PhaseError::TruncationInsufficient(_))));
        assert!(moment_even_exact(0, 0, &c).is_err());
    }

    #[test]
    fn squared_band_diagonal() {
        for n in 0..30 {
            assert_eq!(cos2phi_power_diagonals(n, 2)[2], cos2phi_squared_diagonal(n));
            assert!(cos2phi_power_diagonals(n, 3)[3].is_zero());
        }
    }

    #[test]
    fn uniform_values() {
        assert_eq!(uniform_moment_exact(1), frac(1, 2));
        assert_eq!(uniform_moment_exact(2), frac(3, 8));
        assert_eq!(uniform_moment_exact(3), frac(5, 16));
        assert_eq!(uniform_moment_exact(4), frac(35, 128));
        for k in 1..=8 {
            let (lhs, rhs) = uniform_limit_identity(k);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn large_n_approaches_uniform() {
        let c = TruncationConfig::new(1024, 4).unwrap();
        assert!((moment_even(1000, 2, &c).unwrap() - 0.375).abs() <= 1e-5);
        assert!((moment_even(1000, 3, &c).unwrap() - 0.3125).abs() <= 1e-5);
    }

    #[test]
    fn sidedness() {
        let c = cfg();
        for k in 2..=4 {
            for n in 0..=10 {
                let r = moment_report(n, k, &c).unwrap();
                let want = if n < 2 { Side::BelowUniform } else { Side::AboveUniform };
                assert_eq!(r.side, want, "n = {n}, k = {k}");
            }
        }
        assert_eq!(moment_report(7, 1, &c).unwrap().side, Side::Equal);
    }

    #[test]
    fn spectral_moments() {
        let c = TruncationConfig::new(96, 4).unwrap();
        let table = build_phase_table(&c, &build_quadrature(1024).unwrap()).unwrap();
        for family in [TrigFamily::Cos, TrigFamily::Sin] {
            assert!(moment_odd(0, 0, &table, family).unwrap().abs() <= 1e-8);
            assert!(moment_odd(3, 1, &table, family).unwrap().abs() <= 1e-8);
            for n in [0, 1, 5, 10] {
                for k in 1..=3 {
                    let banded = moment_even(n, k, &c).unwrap();
                    let spectral = moment_even_spectral(n, k, &table, family).unwrap();
                    assert_abs_diff_eq!(spectral, banded, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn vacuum_distribution() {
        let c = cfg();
        let table = build_phase_table(&c, &build_quadrature(2048).unwrap()).unwrap();
        let vac = fock_state(&c, 0).unwrap();
        let dist = phase_distribution(&vac, &table).unwrap();
        assert_abs_diff_eq!(dist.integral(), 1.0, epsilon = 1e-6);
        let inv_norm0 = 0.417_313_420_837_036_593_1;
        assert_abs_diff_eq!(phase_density_at(&vac, FRAC_PI_4).unwrap(), inv_norm0, epsilon = 1e-12);
        assert_abs_diff_eq!(phase_density_at(&vac, 5.0 * FRAC_PI_4).unwrap(), inv_norm0, epsilon = 1e-12);
        assert!(phase_density_at(&vac, 1e-4).unwrap() < 1e-2);
        assert!(phase_density_at(&vac, 2.0).is_err());
        let mut buf = Vec::new();
        dist.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("phi,branch,density\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 2048);
    }

    #[test]
    fn series_factor() {
        assert_eq!(coherent_series_factor(0.0), 0.0);
        for (a, s) in [(2.0, S2), (4.0, S4), (8.0, S8), (16.0, S16)] {
            assert_abs_diff_eq!(coherent_series_factor(a), s, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(coherent_cos2phi(2.0, FRAC_PI_4), 0.0, epsilon = 1e-16);
        assert_eq!(coherent_cos2phi(0.0, 0.3), 0.0);
    }

    #[test]
    fn matrix_path_matches_series() {
        let c = cfg();
        for q in ClassicalQuantity::ALL {
            for phi in [0.0, FRAC_PI_6, 1.1] {
                let m = q.matrix(&c, 2.0, phi).unwrap();
                assert_abs_diff_eq!(m, q.series(2.0, phi), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn classical_limit_rows() {
        let c = TruncationConfig::new(256, 4).unwrap();
        let rows = classical_limit_report(&[2.0, 4.0, 8.0], FRAC_PI_6, &c).unwrap();
        assert_eq!(rows.len(), 12);
        for q in ClassicalQuantity::ALL {
            let dev: Vec<f64> = rows.iter().filter(|r| r.quantity == q).map(|r| r.deviation()).collect();
            assert!(dev[0] > dev[1] && dev[1] > dev[2], "{q:?}: {dev:?}");
        }
        assert!(rows.iter().all(|r| r.path_mismatch() <= 1e-10));
        assert!(classical_limit_report(&[20.0], 0.0, &c).is_err());
    }
}

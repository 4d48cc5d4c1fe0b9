//! Time evolution under `H = N + 1/2` (with `ω = 1`).
//!
//! Both pictures reduce to diagonal phases in the number basis, so the
//! evolution is exact. Times that are whole multiples of a quarter period
//! use exact powers of `i`, which makes the quarter-period relations hold
//! bit for bit.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{PhaseError, Result};
use crate::fock::{BandedHermitianOperator, CMatrix, FockVector};
use crate::phase_states::{Branch, PhaseStateTable};

/// Time in units of `1/ω`. Multiples of `π/2` are tracked exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionTime {
    t: f64,
    quarters: Option<i64>,
}

impl EvolutionTime {
    /// Snaps to the exact quarter-period form when `t` is bitwise equal to
    /// `q · π/2` for an integer `q`.
    pub fn new(t: f64) -> Self {
        let q = (t / FRAC_PI_2).round();
        let quarters = (q.abs() < 1e9 && q * FRAC_PI_2 == t).then_some(q as i64);
        Self { t, quarters }
    }

    pub fn quarter_periods(q: i64) -> Self {
        Self {
            t: q as f64 * FRAC_PI_2,
            quarters: Some(q),
        }
    }

    pub fn value(&self) -> f64 {
        self.t
    }

    pub fn quarters(&self) -> Option<i64> {
        self.quarters
    }

    /// `z · e^{i t m}`.
    fn rotate(&self, z: Complex64, m: i64) -> Complex64 {
        match self.quarters {
            Some(q) => mul_i_pow(z, q * m),
            None => z * Complex64::from_polar(1.0, self.t * m as f64),
        }
    }
}

/// `z · i^k` without rounding.
fn mul_i_pow(z: Complex64, k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => z,
        1 => Complex64::new(-z.im, z.re),
        2 => Complex64::new(-z.re, -z.im),
        _ => Complex64::new(z.im, -z.re),
    }
}

/// `e^{-itH} |v>`: amplitude `n` picks up `e^{-it(n + 1/2)}`.
pub fn evolve_state(v: &FockVector, t: EvolutionTime) -> FockVector {
    let zero_point = Complex64::from_polar(1.0, -0.5 * t.value());
    let amps = DVector::from_fn(v.dim(), |n, _| t.rotate(v.get(n), -(n as i64)) * zero_point);
    FockVector::from_amplitudes(amps)
}

/// Heisenberg picture `A(t) = e^{iHt} A e^{-iHt}`; entry `(m, n)` picks up
/// `e^{it(m-n)}`.
pub fn heisenberg(a: &BandedHermitianOperator, t: EvolutionTime) -> BandedHermitianOperator {
    if t.quarters().is_some_and(|q| q.rem_euclid(4) == 0) {
        // whole periods: the identity map, signed zeros included
        return a.clone();
    }
    let src = a.entries();
    let dim = a.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        out[(c, c)] = src[(c, c)];
        for r in 0..c {
            let v = t.rotate(src[(r, c)], r as i64 - c as i64);
            out[(r, c)] = v;
            // keeps the pair exactly conjugate
            out[(c, r)] = v.conj();
        }
    }
    BandedHermitianOperator::new(out, a.bandwidth()).expect("diagonal conjugation preserves Hermiticity")
}

/// 2×2 block of `A` on the sampled pair `|λ_k,+>`, `|λ_k,->`.
///
/// The returned `M` satisfies `A u_j ≈ Σ_i M_ij u_i` in the least-squares
/// sense (`M = G⁻¹ H` with Gram matrix `G`), so column 1 is the image of
/// the plus state. The sampled states are only approximately orthogonal at
/// finite truncation; the Gram correction removes their scale and overlap.
pub fn phase_basis_matrix_elements(a: &BandedHermitianOperator, table: &PhaseStateTable, k: usize) -> Result<Matrix2<Complex64>> {
    if k >= table.node_count() {
        return Err(PhaseError::IndexOutOfRange {
            index: k,
            len: table.node_count(),
        });
    }
    if a.dim() != table.dim() {
        return Err(PhaseError::DimensionMismatch {
            left: a.dim(),
            right: table.dim(),
        });
    }
    let u = [table.state(k, Branch::Plus)?, table.state(k, Branch::Minus)?];
    let images = [a.apply(&u[0])?, a.apply(&u[1])?];
    let mut gram = Matrix2::<Complex64>::zeros();
    let mut h = Matrix2::<Complex64>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            gram[(i, j)] = u[i].inner(&u[j])?;
            h[(i, j)] = u[i].inner(&images[j])?;
        }
    }
    let inv = gram.try_inverse().ok_or_else(|| PhaseError::TruncationInsufficient("phase-state pair is degenerate at this node".into()))?;
    Ok(inv * h)
}

/// Largest entry magnitude of `A - B`.
pub fn max_entry_diff(a: &BandedHermitianOperator, b: &BandedHermitianOperator) -> f64 {
    (a.entries() - b.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of the entries.
pub fn frobenius(a: &BandedHermitianOperator) -> f64 {
    a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, TruncationConfig};
    use crate::phase_operators::{build_cos2phi, build_cos_sq, build_sin_sq};
    use crate::phase_states::build_phase_table;
    use crate::special::build_quadrature;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn cfg() -> TruncationConfig {
        TruncationConfig::new(32, 4).unwrap()
    }

    #[test]
    fn time_snapping() {
        assert_eq!(EvolutionTime::new(PI).quarters(), Some(2));
        assert_eq!(EvolutionTime::new(2.0 * PI).quarters(), Some(4));
        assert_eq!(EvolutionTime::new(3.0 * PI / 2.0).quarters(), Some(3));
        assert_eq!(EvolutionTime::new(0.3).quarters(), None);
        assert_eq!(EvolutionTime::quarter_periods(-1).value(), -FRAC_PI_2);
    }

    #[test]
    fn state_evolution() {
        let c = cfg();
        let v = coherent_state(&c, 1.5, 0.4).unwrap();
        assert_eq!(evolve_state(&v, EvolutionTime::new(0.0)), v);
        let full = evolve_state(&v, EvolutionTime::new(2.0 * PI));
        for n in 0..c.dim() {
            assert_abs_diff_eq!(full.get(n).re, -v.get(n).re, epsilon = 1e-15);
            assert_abs_diff_eq!(full.get(n).im, -v.get(n).im, epsilon = 1e-15);
        }
        let moved = evolve_state(&v, EvolutionTime::new(1.234));
        assert_abs_diff_eq!(moved.norm(), v.norm(), epsilon = 1e-14);
    }

    #[test]
    fn half_period_swaps_phase_branches() {
        let c = cfg();
        let grid = build_quadrature(64).unwrap();
        let table = build_phase_table(&c, &grid).unwrap();
        let global = Complex64::from_polar(1.0, -FRAC_PI_2);
        for k in [3, 30, 60] {
            let plus = table.state(k, Branch::Plus).unwrap();
            let minus = table.state(k, Branch::Minus).unwrap();
            let moved = evolve_state(&plus, EvolutionTime::new(PI));
            for n in 0..c.dim() {
                let d = moved.get(n) - global * minus.get(n);
                assert!(d.norm() <= 1e-14 * minus.get(n).norm().max(1.0));
            }
        }
    }

    #[test]
    fn quarter_period_relations_are_exact() {
        let c = cfg();
        let c2 = build_cos2phi(&c);
        let neg = BandedHermitianOperator::new(-c2.entries(), 2).unwrap();
        assert_eq!(heisenberg(&c2, EvolutionTime::quarter_periods(1)), neg);
        assert_eq!(heisenberg(&c2, EvolutionTime::quarter_periods(2)), c2);
        assert_eq!(heisenberg(&c2, EvolutionTime::quarter_periods(3)), neg);
        let cs = build_cos_sq(&c);
        assert_eq!(heisenberg(&cs, EvolutionTime::new(FRAC_PI_2)), build_sin_sq(&c));
        assert_eq!(heisenberg(&cs, EvolutionTime::new(2.0 * PI)), cs);
    }

    #[test]
    fn generic_time_is_isometric() {
        let c = cfg();
        let c2 = build_cos2phi(&c);
        let moved = heisenberg(&c2, EvolutionTime::new(0.77));
        assert_abs_diff_eq!(frobenius(&moved), frobenius(&c2), epsilon = 1e-13);
        assert_eq!(moved.bandwidth(), 2);
    }

    #[test]
    fn node_block_errors() {
        let c = cfg();
        let table = build_phase_table(&c, &build_quadrature(64).unwrap()).unwrap();
        let c2 = build_cos2phi(&c);
        assert!(matches!(
            phase_basis_matrix_elements(&c2, &table, 64),
            Err(PhaseError::IndexOutOfRange { .. })
        ));
        let other = build_cos2phi(&TruncationConfig::new(16, 2).unwrap());
        assert!(phase_basis_matrix_elements(&other, &table, 3).is_err());
    }
}

//! Gegenbauer polynomials, their normalization constants, and the
//! Gauss–Legendre rule used for every integral over the `λ = cos 2φ`
//! spectrum.
//!
//! Integrals over `λ ∈ (-1, 1)` are carried out in the angle variable:
//! `dλ = 2 sin 2φ dφ` and `(1 - λ²)^{1/2} = sin 2φ`, which turns the
//! endpoint singularity of the even-sector weight into a bounded integrand.

use std::f64::consts::{FRAC_PI_4, LN_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{PhaseError, Result};

/// Smallest node count accepted by [`build_quadrature`].
pub const MIN_QUADRATURE_NODES: usize = 64;

/// Default node count.
pub const DEFAULT_QUADRATURE_NODES: usize = 2048;

/// Parameter `α` of `C_n^{(α)}`; orthogonality needs `α > -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerOrder(f64);

impl GegenbauerOrder {
    /// Order of the even-parity phase-state coefficients.
    pub const EVEN: GegenbauerOrder = GegenbauerOrder(0.25);
    /// Order of the odd-parity phase-state coefficients.
    pub const ODD: GegenbauerOrder = GegenbauerOrder(0.75);

    /// `α = 0` is rejected: every `C_n^{(0)}` with `n >= 1` vanishes.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > -0.5 && alpha != 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(PhaseError::InvalidConfig(format!(
                "Gegenbauer order must exceed -1/2, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// `C_n^{(α)}(λ)` by the three-term recurrence.
pub fn gegenbauer_eval(order: GegenbauerOrder, n: usize, lambda: f64) -> f64 {
    let alpha = order.0;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * alpha * lambda;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 * (kf + alpha) * lambda * cur - (kf + 2.0 * alpha - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_0^{(α)}(λ), ..., C_n^{(α)}(λ)` in one sweep.
pub fn gegenbauer_eval_all(order: GegenbauerOrder, n: usize, lambda: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    gegenbauer_fill(order, lambda, n + 1, &mut out);
    out
}

pub(crate) fn gegenbauer_fill(order: GegenbauerOrder, lambda: f64, count: usize, out: &mut Vec<f64>) {
    let alpha = order.0;
    out.clear();
    if count == 0 {
        return;
    }
    out.push(1.0);
    if count == 1 {
        return;
    }
    out.push(2.0 * alpha * lambda);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = (2.0 * (kf + alpha) * lambda * out[k] - (kf + 2.0 * alpha - 1.0) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

/// Squared norm `∫ (1-λ²)^{α-1/2} [C_n^{(α)}]² dλ`:
///
/// `N_n² = 2^{1-2α} π Γ(n+2α) / ((n+α) n! Γ(α)²)`.
///
/// Small `n` uses the gamma function directly; larger `n` takes
/// `ln Γ(n+2α) - ln Γ(n+1)` from its asymptotic series so the result neither
/// overflows nor loses digits to cancellation.
pub fn gegenbauer_norm_sq(order: GegenbauerOrder, n: usize) -> f64 {
    let alpha = order.0;
    let nf = n as f64;
    let prefactor = (1.0 - 2.0 * alpha) * LN_2 + PI.ln() - 2.0 * libm::lgamma(alpha);
    // Γ(n+2α) and (n+α) change sign together for α in (-1/2, 0), so
    // magnitudes suffice.
    if n < DIRECT_GAMMA_LIMIT {
        let ratio = libm::tgamma(nf + 2.0 * alpha) / libm::tgamma(nf + 1.0);
        return prefactor.exp() * (ratio / (nf + alpha)).abs();
    }
    let ln_ratio = ln_gamma_ratio(nf, 2.0 * alpha, 1.0);
    (prefactor + ln_ratio - (nf + alpha).ln()).exp()
}

const DIRECT_GAMMA_LIMIT: usize = 160;

/// `ln Γ(z+a) - ln Γ(z+b)` for large `z`, from
/// `ln Γ(z+a) ~ (z+a-1/2) ln z - z + ln(2π)/2 + Σ_k (-1)^{k+1} B_{k+1}(a) / (k(k+1) z^k)`.
fn ln_gamma_ratio(z: f64, a: f64, b: f64) -> f64 {
    let mut sum = (a - b) * z.ln();
    let mut zpow = z;
    for k in 1..=7 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * (bernoulli_poly(k + 1, a) - bernoulli_poly(k + 1, b)) / (kf * (kf + 1.0) * zpow);
        zpow *= z;
    }
    sum
}

fn bernoulli_poly(n: usize, x: f64) -> f64 {
    let x2 = x * x;
    match n {
        2 => x2 - x + 1.0 / 6.0,
        3 => x * (x2 - 1.5 * x + 0.5),
        4 => x2 * (x2 - 2.0 * x + 1.0) - 1.0 / 30.0,
        5 => x * (x2 * (x2 - 2.5 * x + 5.0 / 3.0) - 1.0 / 6.0),
        6 => x2 * (x2 * (x2 - 3.0 * x + 2.5) - 0.5) + 1.0 / 42.0,
        7 => x * (x2 * (x2 * (x2 - 3.5 * x + 3.5) - 7.0 / 6.0) + 1.0 / 6.0),
        8 => x2 * (x2 * (x2 * (x2 - 4.0 * x + 14.0 / 3.0) - 7.0 / 3.0) + 2.0 / 3.0) - 1.0 / 30.0,
        _ => unreachable!("only B_2..B_8 are tabulated"),
    }
}

/// `N_0², ..., N_n²` via the ratio
/// `N_{k+1}²/N_k² = (k+2α)(k+α) / ((k+1)(k+1+α))`.
pub fn gegenbauer_norm_sq_all(order: GegenbauerOrder, n: usize) -> Vec<f64> {
    let alpha = order.0;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = gegenbauer_norm_sq(order, 0);
    out.push(cur);
    for k in 0..n {
        let kf = k as f64;
        cur *= (kf + 2.0 * alpha) * (kf + alpha) / ((kf + 1.0) * (kf + 1.0 + alpha));
        out.push(cur);
    }
    out
}

/// Gauss–Legendre nodes on `φ ∈ (0, π/2)` with `λ_k = cos 2φ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    phi_nodes: Vec<f64>,
    lambda_nodes: Vec<f64>,
    sin_2phi: Vec<f64>,
    weights: Vec<f64>,
}

pub fn build_quadrature(node_count: usize) -> Result<QuadratureRule> {
    if node_count < MIN_QUADRATURE_NODES {
        return Err(PhaseError::InvalidConfig(format!(
            "quadrature needs at least {MIN_QUADRATURE_NODES} nodes, got {node_count}"
        )));
    }
    let degree = NonZeroUsize::new(node_count).expect("checked above");
    let rule = GaussLegendre::new(degree);
    let mut pairs: Vec<(f64, f64)> = rule
        .iter()
        .map(|&(x, w)| (FRAC_PI_4 * (x + 1.0), FRAC_PI_4 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let phi_nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1).collect();
    let lambda_nodes = phi_nodes.iter().map(|&p| (2.0 * p).cos()).collect();
    let sin_2phi = phi_nodes.iter().map(|&p| (2.0 * p).sin()).collect();
    Ok(QuadratureRule {
        phi_nodes,
        lambda_nodes,
        sin_2phi,
        weights,
    })
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.phi_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi_nodes.is_empty()
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi_nodes
    }

    /// Decreasing, since `φ` is sorted ascending.
    pub fn lambda_nodes(&self) -> &[f64] {
        &self.lambda_nodes
    }

    /// Weights for integration over `φ`; they sum to `π/2`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sin 2φ_k = (1 - λ_k²)^{1/2}`, computed from the angle.
    pub fn sin_2phi(&self) -> &[f64] {
        &self.sin_2phi
    }

    /// Weights for integration over `λ`: `2 sin 2φ_k w_k`.
    pub fn lambda_weight(&self, k: usize) -> f64 {
        2.0 * self.sin_2phi[k] * self.weights[k]
    }

    pub fn lambda_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.lambda_weight(k)).collect()
    }

    /// `∫_0^{π/2} f(φ) dφ`.
    pub fn integrate_phi(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.phi_nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    /// `∫_{-1}^{1} g(λ) dλ`.
    pub fn integrate_lambda(&self, g: impl Fn(f64) -> f64) -> f64 {
        (0..self.len())
            .map(|k| self.lambda_weight(k) * g(self.lambda_nodes[k]))
            .sum()
    }

    /// `∫_{-1}^{1} (1-λ²)^s g(λ) dλ`, with the weight taken from `sin 2φ`.
    pub fn integrate_lambda_weighted(&self, s: f64, g: impl Fn(f64) -> f64) -> f64 {
        (0..self.len())
            .map(|k| {
                2.0 * self.weights[k] * self.sin_2phi[k].powf(1.0 + 2.0 * s) * g(self.lambda_nodes[k])
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::FRAC_PI_2;

    // mpmath, 30 digits: 2^{1-2α} π Γ(2α) / (α Γ(α)²)
    const NORM0_QUARTER: f64 = 2.396_280_469_471_184_4;
    const NORM0_THREE_QUARTERS: f64 = 1.748_038_369_528_079_9;

    /// Explicit sum `Σ_k (-1)^k Γ(n-k+α) / (Γ(α) k! (n-2k)!) (2x)^{n-2k}`.
    fn monomial_gegenbauer(alpha: f64, n: usize, x: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..=n / 2 {
            let poch = libm::tgamma(n as f64 - k as f64 + alpha) / libm::tgamma(alpha);
            let denom = libm::tgamma(k as f64 + 1.0) * libm::tgamma((n - 2 * k) as f64 + 1.0);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * poch / denom * (2.0 * x).powi((n - 2 * k) as i32);
        }
        s
    }

    #[test]
    fn low_order_values() {
        let q = GegenbauerOrder::EVEN;
        assert_eq!(gegenbauer_eval(q, 0, 0.3), 1.0);
        assert_abs_diff_eq!(gegenbauer_eval(q, 1, 0.5), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(gegenbauer_eval(GegenbauerOrder::ODD, 2, 1.0), 1.875, epsilon = 1e-14);
    }

    #[test]
    fn recurrence_matches_monomial_expansion() {
        for order in [GegenbauerOrder::EVEN, GegenbauerOrder::ODD] {
            for n in 0..=6 {
                for &x in &[-0.9, -0.31, 0.0, 0.42, 0.77, 1.0] {
                    let r = gegenbauer_eval(order, n, x);
                    let m = monomial_gegenbauer(order.alpha(), n, x);
                    assert_abs_diff_eq!(r, m, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        let all = gegenbauer_eval_all(GegenbauerOrder::ODD, 50, -0.37);
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, gegenbauer_eval(GegenbauerOrder::ODD, n, -0.37));
        }
    }

    #[test]
    fn norm_constants_against_gamma_oracle() {
        assert_relative_eq!(gegenbauer_norm_sq(GegenbauerOrder::EVEN, 0), NORM0_QUARTER, max_relative = 1e-13);
        assert_relative_eq!(
            gegenbauer_norm_sq(GegenbauerOrder::ODD, 0),
            NORM0_THREE_QUARTERS,
            max_relative = 1e-13
        );
    }

    #[test]
    fn norm_ratio_recurrence() {
        for order in [GegenbauerOrder::EVEN, GegenbauerOrder::ODD] {
            let a = order.alpha();
            let all = gegenbauer_norm_sq_all(order, 2000);
            for n in [0usize, 1, 5, 37, 400, 1999] {
                let nf = n as f64;
                let ratio = gegenbauer_norm_sq(order, n + 1) / gegenbauer_norm_sq(order, n);
                let expect = (nf + 2.0 * a) * (nf + a) / ((nf + 1.0) * (nf + 1.0 + a));
                assert_relative_eq!(ratio, expect, max_relative = 1e-12);
                assert_relative_eq!(all[n], gegenbauer_norm_sq(order, n), max_relative = 1e-11);
            }
            assert!(gegenbauer_norm_sq(order, 10_000).is_finite());
            assert!(gegenbauer_norm_sq(order, 10_000) > 0.0);
        }
    }

    #[test]
    fn asymptotic_gamma_ratio_agrees_with_direct() {
        // overlap region: both routes valid for 150 <= n < 170
        for n in [150usize, 160, 169] {
            for a in [0.5, 1.5] {
                let direct = (libm::tgamma(n as f64 + a) / libm::tgamma(n as f64 + 1.0)).ln();
                assert_abs_diff_eq!(ln_gamma_ratio(n as f64, a, 1.0), direct, epsilon = 1e-14);
            }
        }
        // continuity across the switch point
        for order in [GegenbauerOrder::EVEN, GegenbauerOrder::ODD] {
            let below = gegenbauer_norm_sq(order, DIRECT_GAMMA_LIMIT - 1);
            let above = gegenbauer_norm_sq(order, DIRECT_GAMMA_LIMIT);
            let a = order.alpha();
            let nf = (DIRECT_GAMMA_LIMIT - 1) as f64;
            let expect = (nf + 2.0 * a) * (nf + a) / ((nf + 1.0) * (nf + 1.0 + a));
            assert_relative_eq!(above / below, expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn order_validation() {
        assert!(GegenbauerOrder::new(-0.5).is_err());
        assert!(GegenbauerOrder::new(-0.4).is_ok());
        assert!(GegenbauerOrder::new(0.0).is_err());
        let neg = GegenbauerOrder::new(-0.25).unwrap();
        for n in 0..20 {
            assert!(gegenbauer_norm_sq(neg, n) > 0.0);
        }
    }

    #[test]
    fn quadrature_basics() {
        assert!(build_quadrature(63).is_err());
        let rule = build_quadrature(256).unwrap();
        let total: f64 = rule.weights().iter().sum();
        assert_abs_diff_eq!(total, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(rule.integrate_lambda(|_| 1.0), 2.0, epsilon = 1e-12);
        let lam = rule.lambda_nodes();
        assert!(lam.windows(2).all(|w| w[1] < w[0]));
        assert!(lam.iter().all(|&l| l > -1.0 && l < 1.0));
    }

    #[test]
    fn quadrature_weighted_orthogonality() {
        let rule = build_quadrature(512).unwrap();
        let q = GegenbauerOrder::EVEN;
        let odd = rule.integrate_lambda_weighted(-0.25, |l| gegenbauer_eval(q, 0, l) * gegenbauer_eval(q, 1, l));
        assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-10);

        let rule = build_quadrature(2048).unwrap();
        let norm = rule.integrate_lambda_weighted(-0.25, |_| 1.0);
        assert_abs_diff_eq!(norm, NORM0_QUARTER, epsilon = 1e-6);
        assert_abs_diff_eq!(norm, gegenbauer_norm_sq(q, 0), epsilon = 1e-6);
    }
}

//! Susskind–Glogower and Pegg–Barnett constructions, kept as baselines.
//!
//! Truncating the one-sided shift `E = Σ |n><n+1|` produces a mirror image
//! of the `|0><0|` defect at `|n_max><n_max|`; the functions here report
//! both so callers can separate the physical defect from the artifact.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{PhaseError, Result};
use crate::fock::{number_matrix, BandedHermitianOperator, CMatrix, TruncationConfig};
use crate::phase_operators::commutator;

/// One-sided shift `E` and its adjoint.
pub fn build_shift_e(cfg: &TruncationConfig) -> (CMatrix, CMatrix) {
    let dim = cfg.dim();
    let mut e = CMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        e[(n, n + 1)] = Complex64::new(1.0, 0.0);
    }
    let edag = e.adjoint();
    (e, edag)
}

/// `C = (E + E†)/2` and `S = (E - E†)/(2i)`.
pub fn build_sg(cfg: &TruncationConfig) -> (BandedHermitianOperator, BandedHermitianOperator) {
    let (e, edag) = build_shift_e(cfg);
    let c = (&e + &edag) * Complex64::new(0.5, 0.0);
    let s = (&e - &edag) * Complex64::new(0.0, -0.5);
    (
        BandedHermitianOperator::new(c, 1).expect("C is Hermitian"),
        BandedHermitianOperator::new(s, 1).expect("S is Hermitian"),
    )
}

/// Measured departures of the SG operators from the ideal identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgReport {
    /// `max |[C, N] - iS|` over the whole truncated space.
    pub c_number_commutator: f64,
    /// `max |[S, N] + iC|`.
    pub s_number_commutator: f64,
    /// `<0|[C, S]|0>`; the ideal infinite-dimensional value is `i/2`.
    pub cs_commutator_vacuum: Complex64,
    /// `<n_max|[C, S]|n_max>`, the truncation mirror of the vacuum term.
    pub cs_commutator_edge: Complex64,
    /// `max |[C, S]|` over entries other than the two diagonal corners.
    pub cs_commutator_interior: f64,
    /// `1 - <0|C² + S²|0>`.
    pub trig_defect_vacuum: f64,
    /// `1 - <n_max|C² + S²|n_max>`.
    pub trig_defect_edge: f64,
    /// `max |C² + S² - I|` away from the two corners.
    pub trig_defect_interior: f64,
}

pub fn sg_report(cfg: &TruncationConfig) -> SgReport {
    let (c, s) = build_sg(cfg);
    let (c, s) = (c.entries(), s.entries());
    let n = number_matrix(cfg);
    let i = Complex64::new(0.0, 1.0);
    let top = cfg.n_max();

    let cn = commutator(c, &n).expect("same dimension");
    let sn = commutator(s, &n).expect("same dimension");
    let cs = commutator(c, s).expect("same dimension");
    let trig = c * c + s * s;

    let away_from_corners = |m: &CMatrix, target: &dyn Fn(usize, usize) -> Complex64| {
        let mut worst: f64 = 0.0;
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let corner = row == col && (row == 0 || row == top);
                if !corner {
                    worst = worst.max((m[(row, col)] - target(row, col)).norm());
                }
            }
        }
        worst
    };
    let zero = |_: usize, _: usize| Complex64::new(0.0, 0.0);
    let ident = |r: usize, c: usize| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };

    SgReport {
        c_number_commutator: max_norm(&(&cn - s * i)),
        s_number_commutator: max_norm(&(&sn + c * i)),
        cs_commutator_vacuum: cs[(0, 0)],
        cs_commutator_edge: cs[(top, top)],
        cs_commutator_interior: away_from_corners(&cs, &zero),
        trig_defect_vacuum: 1.0 - trig[(0, 0)].re,
        trig_defect_edge: 1.0 - trig[(top, top)].re,
        trig_defect_interior: away_from_corners(&trig, &ident),
    }
}

fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dimension parameter `s` of the Pegg–Barnett space (`s + 1` states).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PbDimension(usize);

impl PbDimension {
    pub fn new(s: usize) -> Result<Self> {
        if s >= 1 {
            Ok(Self(s))
        } else {
            Err(PhaseError::InvalidConfig("Pegg-Barnett s must be >= 1".into()))
        }
    }

    pub fn s(self) -> usize {
        self.0
    }
}

/// Cycling operator `|0><1| + |1><2| + ... + |s-1><s| + |s><0|`.
pub fn pb_cycling(s: PbDimension) -> DMatrix<f64> {
    let dim = s.0 + 1;
    let mut u = DMatrix::zeros(dim, dim);
    for n in 0..s.0 {
        u[(n, n + 1)] = 1.0;
    }
    u[(s.0, 0)] = 1.0;
    u
}

/// `<0| U† N U |0>` for the cycling operator `U`, in integer arithmetic.
/// Equals `s`: the wrap-around term sends the vacuum to the top state.
pub fn pb_divergence(s: PbDimension) -> u64 {
    let dim = s.0 + 1;
    let u = pb_cycling(s).map(|x| x as i64);
    let mut vacuum = DVector::<i64>::zeros(dim);
    vacuum[0] = 1;
    let image = &u * &vacuum;
    // U is real, so U† = Uᵀ and the expectation is Σ_n n |image_n|²
    let value: i64 = image.iter().enumerate().map(|(n, a)| n as i64 * a * a).sum();
    value as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TruncationConfig {
        TruncationConfig::new(16, 2).unwrap()
    }

    #[test]
    fn shift_products() {
        let c = cfg();
        let (e, edag) = build_shift_e(&c);
        assert_eq!(e[(0, 1)].re, 1.0);
        let dim = c.dim();
        let mut vac = CMatrix::zeros(dim, dim);
        vac[(0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(&edag * &e + &vac, CMatrix::identity(dim, dim));
        let mut edge = CMatrix::identity(dim, dim);
        edge[(c.n_max(), c.n_max())] = Complex64::new(0.0, 0.0);
        assert_eq!(&e * &edag, edge);
    }

    #[test]
    fn sg_identities() {
        let rep = sg_report(&cfg());
        assert_eq!(rep.c_number_commutator, 0.0);
        assert_eq!(rep.s_number_commutator, 0.0);
        assert_eq!(rep.cs_commutator_interior, 0.0);
        assert_eq!(rep.trig_defect_interior, 0.0);
        assert_eq!(rep.trig_defect_vacuum, 0.5);
        assert_eq!(rep.trig_defect_edge, 0.5);
        // [C, S] = (i/2)(|0><0| - |n_max><n_max|)
        assert_eq!(rep.cs_commutator_vacuum, Complex64::new(0.0, 0.5));
        assert_eq!(rep.cs_commutator_edge, Complex64::new(0.0, -0.5));
    }

    #[test]
    fn cycling_operator() {
        for s in [1usize, 2, 7] {
            let dim = PbDimension::new(s).unwrap();
            let u = pb_cycling(dim);
            assert_eq!(u.transpose() * &u, DMatrix::identity(s + 1, s + 1));
            let mut vac = DVector::zeros(s + 1);
            vac[0] = 1.0;
            let img = &u * vac;
            assert_eq!(img[s], 1.0);
        }
        assert!(PbDimension::new(0).is_err());
    }

    #[test]
    fn divergence_equals_s() {
        assert_eq!(pb_divergence(PbDimension::new(1).unwrap()), 1);
        assert_eq!(pb_divergence(PbDimension::new(10).unwrap()), 10);
    }
}

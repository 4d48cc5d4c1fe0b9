//! The identity suite behind `phasekit verify`: every structural relation of
//! the construction, measured at one truncation and quadrature size.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::dynamics::{heisenberg, max_entry_diff, EvolutionTime};
use crate::error::{PhaseError, Result};
use crate::fock::{f_ratio, fock_state, hermitian_deviation, max_abs_diff_within, CMatrix, TruncationConfig};
use crate::legacy::sg_report;
use crate::observables::{moment_even_exact, moment_report, phase_distribution, Side};
use crate::phase_operators::{
    build_cos2phi, build_cos_phi, build_cos_sq, build_cos_sq_direct, build_phi, build_sin_phi, build_sin_sq, build_sin_sq_direct, check_comm_relations,
    parity_block_spectra, PhaseLabeling,
};
use crate::phase_states::{build_phase_table, recurrence_residual, Branch, Parity, PhaseStateTable};
use crate::special::build_quadrature;

/// One line of the report. `pass` is `measured <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check_id: &'static str,
    /// The relation under test, as a short formula.
    pub relation: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Check {
    id: &'static str,
    relation: &'static str,
    tolerance: f64,
}

const CHECKS: &[Check] = &[
    Check { id: "trig_identity", relation: "cos^2 + sin^2 = I", tolerance: 0.0 },
    Check { id: "trig_direct", relation: "cos^2 = D q^2 D, sin^2 = D p^2 D (interior)", tolerance: 1e-13 },
    Check { id: "hermiticity", relation: "A = A^dagger for built operators", tolerance: 1e-13 },
    Check { id: "comm_cos2phi_number", relation: "[cos 2phi, N] = D (a^2 - a^dag^2) D", tolerance: 1e-13 },
    Check { id: "comm_cos_sq_number", relation: "[cos^2, N] = [cos 2phi, N]/2", tolerance: 1e-13 },
    Check { id: "comm_sin_sq_number", relation: "[sin^2, N] = -[cos 2phi, N]/2", tolerance: 1e-13 },
    Check { id: "block_spectra_inside", relation: "|eig(cos 2phi parity blocks)| < 1", tolerance: 1.0 },
    Check { id: "recurrence_even", relation: "even-parity three-term recurrence", tolerance: 1e-10 },
    Check { id: "recurrence_odd", relation: "odd-parity three-term recurrence", tolerance: 1e-10 },
    Check { id: "orthonormality_even", relation: "int <m|l,e><n|l,e> dl = delta_mn", tolerance: 1e-6 },
    Check { id: "orthonormality_odd", relation: "int <m|l,o><n|l,o> dl = delta_mn", tolerance: 1e-6 },
    Check { id: "eigen_relation", relation: "cos 2phi |l,+> = l |l,+> (interior)", tolerance: 1e-8 },
    Check { id: "branch_parity_sign", relation: "<n|l,-> = (-1)^n <n|l,+>", tolerance: 0.0 },
    Check { id: "resolution_of_identity", relation: "sum_k w_k |phi_k><phi_k| = I", tolerance: 1e-3 },
    Check { id: "heisenberg_cos_phi_pi", relation: "cos phi(pi) = -cos phi(0)", tolerance: 1e-12 },
    Check { id: "heisenberg_sin_phi_pi", relation: "sin phi(pi) = -sin phi(0)", tolerance: 1e-12 },
    Check { id: "heisenberg_cos_sq_half", relation: "cos^2 phi(pi/2) = sin^2 phi(0)", tolerance: 1e-12 },
    Check { id: "heisenberg_sin_sq_half", relation: "sin^2 phi(pi/2) = cos^2 phi(0)", tolerance: 1e-12 },
    Check { id: "heisenberg_cos2phi_half", relation: "cos 2phi(pi/2) = -cos 2phi(0)", tolerance: 1e-12 },
    Check { id: "heisenberg_full_period", relation: "A(2pi) = A(0)", tolerance: 0.0 },
    Check { id: "moments_exact", relation: "m2 = 1/2; m4 = 7/20, 9/28, 5/12; m6 = 11/40, 13/56, 3/8", tolerance: 0.0 },
    Check { id: "moment_sidedness", relation: "m_2k(0,1) < u_2k < m_2k(2..10), k = 2..4", tolerance: 0.0 },
    Check { id: "sg_interior", relation: "[C,N] = iS, [S,N] = -iC, [C,S] = 0, C^2 + S^2 = I (interior)", tolerance: 0.0 },
    Check { id: "sg_vacuum_defect", relation: "<0|[C,S]|0> = i/2, <0|C^2 + S^2|0> = 1/2", tolerance: 0.0 },
    Check { id: "vacuum_normalization", relation: "int P_vac(phi) dphi = 1", tolerance: 1e-6 },
];

/// Ids accepted as tolerance overrides.
pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}

/// Runs every check. `overrides` replaces default tolerances by id; an
/// unknown id is a configuration error.
pub fn run_identity_suite(cfg: &TruncationConfig, quad_nodes: usize, overrides: &BTreeMap<String, f64>) -> Result<Vec<CheckResult>> {
    for (id, tol) in overrides {
        if !CHECKS.iter().any(|c| c.id == id) {
            return Err(PhaseError::InvalidConfig(format!("unknown check id '{id}' in tolerance overrides")));
        }
        if !(tol.is_finite() && *tol >= 0.0) {
            return Err(PhaseError::InvalidConfig(format!("tolerance for '{id}' must be finite and >= 0")));
        }
    }
    let grid = build_quadrature(quad_nodes)?;
    let table = build_phase_table(cfg, &grid)?;
    let measured = measure(cfg, &table)?;
    Ok(CHECKS
        .iter()
        .zip(measured)
        .map(|(c, m)| {
            let tolerance = overrides.get(c.id).copied().unwrap_or(c.tolerance);
            CheckResult {
                check_id: c.id,
                relation: c.relation,
                measured: m,
                tolerance,
                pass: m <= tolerance,
            }
        })
        .collect())
}

/// Same order as [`CHECKS`].
fn measure(cfg: &TruncationConfig, table: &PhaseStateTable) -> Result<Vec<f64>> {
    let dim = cfg.dim();
    let c2 = build_cos2phi(cfg);
    let cs = build_cos_sq(cfg);
    let sn = build_sin_sq(cfg);
    let cos_phi = build_cos_phi(table);
    let sin_phi = build_sin_phi(table);
    let phi = build_phi(table, PhaseLabeling::Eigenvalue);

    let trig = max_norm(&(cs.entries() + sn.entries() - CMatrix::identity(dim, dim)));
    let direct = max_abs_diff_within(build_cos_sq_direct(cfg).entries(), cs.entries(), cfg.n_max() - 2)
        .max(max_abs_diff_within(build_sin_sq_direct(cfg).entries(), sn.entries(), cfg.n_max() - 2));
    let herm = [&c2, &cs, &sn, &cos_phi, &sin_phi, &phi].iter().map(|a| hermitian_deviation(a.entries())).fold(0.0, f64::max);
    let comm = check_comm_relations(cfg);
    let (even, odd) = parity_block_spectra(cfg);
    let spectra = even.iter().chain(&odd).map(|x| x.abs()).fold(0.0, f64::max);

    let n_limit = 200.min(cfg.n_max() / 2);
    let lambdas: Vec<f64> = (0..20).map(|i| -0.95 + 0.1 * i as f64).collect();
    let recurrence = |p: Parity| -> Result<f64> {
        lambdas.iter().try_fold(0.0f64, |acc, &l| Ok(acc.max(recurrence_residual(p, l, n_limit)?)))
    };
    let ortho = |p: Parity| {
        let size = 11.min(match p {
            Parity::Even => cfg.parity_dims().0,
            Parity::Odd => cfg.parity_dims().1,
        });
        let g = table.parity_gram(p, size);
        max_abs_identity_deviation(&g)
    };
    let branch_sign = (0..table.node_count())
        .flat_map(|k| (0..dim).map(move |n| (n, k)))
        .map(|(n, k)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            (table.coeffs(Branch::Minus)[(n, k)] - sign * table.coeffs(Branch::Plus)[(n, k)]).abs()
        })
        .fold(0.0, f64::max);
    let roi = max_abs_identity_deviation(&table.resolution_of_identity(cfg.n_max() / 2 + 1));

    let t = |q: i64| EvolutionTime::quarter_periods(q);
    let neg = |a: &crate::fock::BandedHermitianOperator| {
        crate::fock::BandedHermitianOperator::new(-a.entries(), a.bandwidth()).expect("negation keeps Hermiticity")
    };
    let full_period = [&c2, &cs, &cos_phi, &phi]
        .iter()
        .map(|a| max_entry_diff(&heisenberg(a, t(4)), a))
        .fold(0.0, f64::max);

    let sg = sg_report(cfg);
    let sg_interior = sg.c_number_commutator.max(sg.s_number_commutator).max(sg.cs_commutator_interior).max(sg.trig_defect_interior);
    let sg_vacuum = (sg.cs_commutator_vacuum - Complex64::new(0.0, 0.5)).norm() + (sg.trig_defect_vacuum - 0.5).abs();

    let vac = fock_state(cfg, 0)?;
    let norm = (phase_distribution(&vac, table)?.integral() - 1.0).abs();

    Ok(vec![
        trig,
        direct,
        herm,
        comm.cos2phi_vs_ladder,
        comm.cos_sq_vs_half,
        comm.sin_sq_vs_minus_half,
        spectra,
        recurrence(Parity::Even)?,
        recurrence(Parity::Odd)?,
        ortho(Parity::Even),
        ortho(Parity::Odd),
        eigen_relation_residual(table),
        branch_sign,
        roi,
        max_entry_diff(&heisenberg(&cos_phi, t(2)), &neg(&cos_phi)),
        max_entry_diff(&heisenberg(&sin_phi, t(2)), &neg(&sin_phi)),
        max_entry_diff(&heisenberg(&cs, t(1)), &sn),
        max_entry_diff(&heisenberg(&sn, t(1)), &cs),
        max_entry_diff(&heisenberg(&c2, t(1)), &neg(&c2)),
        full_period,
        exact_moment_mismatches(cfg),
        sidedness_violations(cfg),
        sg_interior,
        sg_vacuum,
        norm,
    ])
}

fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs_identity_deviation(m: &nalgebra::DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - target).abs());
        }
    }
    worst
}

/// `max_k max_{n <= interior} |(cos 2φ̂ v_k)_n - λ_k v_{k,n}| / max_n |v_{k,n}|`
/// over all nodes, for the sampled plus-branch states `v_k`.
pub fn eigen_relation_residual(table: &PhaseStateTable) -> f64 {
    let cfg = table.config();
    let lim = cfg.interior_limit();
    let band: Vec<f64> = (0..cfg.dim()).map(|i| 0.5 * f_ratio(i as i64 + 1).sqrt()).collect();
    let coeffs = table.coeffs(Branch::Plus);
    let mut worst: f64 = 0.0;
    for k in 0..table.node_count() {
        let v = coeffs.column(k);
        let lambda = table.grid().lambda_nodes()[k];
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for n in 0..=lim {
            let mut applied = band[n] * v[n + 2];
            if n >= 2 {
                applied += band[n - 2] * v[n - 2];
            }
            worst = worst.max((applied - lambda * v[n]).abs() / scale);
        }
    }
    worst
}

/// Number of mismatches (or `inf` if the truncation is too small).
fn exact_moment_mismatches(cfg: &TruncationConfig) -> f64 {
    let frac = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let targets = [
        (0, 2, frac(7, 20)),
        (1, 2, frac(9, 28)),
        (2, 2, frac(5, 12)),
        (0, 3, frac(11, 40)),
        (1, 3, frac(13, 56)),
        (2, 3, frac(3, 8)),
    ];
    let mut bad = 0usize;
    for (n, k, want) in targets {
        match moment_even_exact(n, k, cfg) {
            Ok(v) if v == want => {}
            Ok(_) => bad += 1,
            Err(_) => return f64::INFINITY,
        }
    }
    let half = frac(1, 2);
    for n in 0..=cfg.interior_limit().saturating_sub(2).min(50) {
        if moment_even_exact(n, 1, cfg).map_or(true, |v| v != half) {
            bad += 1;
        }
    }
    bad as f64
}

fn sidedness_violations(cfg: &TruncationConfig) -> f64 {
    let mut bad = 0usize;
    for k in 2..=4 {
        for n in 0..=10 {
            let want = if n < 2 { Side::BelowUniform } else { Side::AboveUniform };
            match moment_report(n, k, cfg) {
                Ok(r) if r.side == want => {}
                Ok(_) => bad += 1,
                Err(_) => return f64::INFINITY,
            }
        }
    }
    bad as f64
}

use rayon::prelude::*;

use phasekit::dynamics::{heisenberg, EvolutionTime};
use phasekit::fock::{coherent_state, fock_state, BandedHermitianOperator, TruncationConfig};
use phasekit::io::{write_matrix_binary, write_matrix_csv};
use phasekit::legacy::{build_sg, pb_divergence, sg_report, PbDimension};
use phasekit::observables::{classical_limit_report, moment_even_exact, moment_report, phase_distribution, uniform_moment_exact, Side};
use phasekit::phase_operators::{build_cos2phi, build_cos_phi, build_cos_sq, build_phi, build_sin_phi, build_sin_sq, build_tan_phi, PhaseLabeling};
use phasekit::phase_states::{build_phase_table, PhaseStateTable};
use phasekit::special::build_quadrature;
use phasekit::verify::run_identity_suite;
use phasekit::PhaseError;

use crate::config::RunConfig;
use crate::parse::StateSpec;
use crate::report::{Cell, Table};

/// Rendered bytes plus whether the run should exit nonzero.
pub struct Output {
    pub bytes: Vec<u8>,
    pub failed: bool,
}

fn table(cfg: &RunConfig, t: &Table, failed: bool) -> anyhow::Result<Output> {
    Ok(Output {
        bytes: t.render(cfg.format)?,
        failed,
    })
}

fn phase_table(cfg: &RunConfig) -> anyhow::Result<PhaseStateTable> {
    let grid = build_quadrature(cfg.quad)?;
    Ok(build_phase_table(&cfg.truncation, &grid)?)
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<Output> {
    let results = run_identity_suite(&cfg.truncation, cfg.quad, &cfg.tolerances)?;
    let mut t = Table::new(&["check_id", "relation", "measured", "tolerance", "pass"]);
    for r in &results {
        t.push(vec![r.check_id.into(), r.relation.into(), r.measured.into(), r.tolerance.into(), r.pass.into()]);
    }
    table(cfg, &t, results.iter().any(|r| !r.pass))
}

pub fn moments(cfg: &RunConfig, ns: &[usize], ks: &[usize], exact: bool) -> anyhow::Result<Output> {
    let pairs: Vec<(usize, usize)> = ns.iter().flat_map(|&n| ks.iter().map(move |&k| (n, k))).collect();
    let trunc = &cfg.truncation;
    let rows: Vec<Vec<Cell>> = pairs.par_iter().map(|&(n, k)| moment_row(trunc, n, k, exact)).collect();
    let mut t = Table::new(&["n", "k", "relation", "value", "uniform", "side", "error"]);
    let failed = rows.iter().any(|r| r[6] != Cell::Empty);
    for row in rows {
        t.push(row);
    }
    table(cfg, &t, failed)
}

fn moment_row(cfg: &TruncationConfig, n: usize, k: usize, exact: bool) -> Vec<Cell> {
    let relation: Cell = "<n|cos^2k phi|n> = <n|sin^2k phi|n>".into();
    let report = match moment_report(n, k, cfg) {
        Ok(r) => r,
        Err(e) => return vec![n.into(), k.into(), relation, Cell::Empty, Cell::Empty, Cell::Empty, e.to_string().into()],
    };
    let (value, uniform, side) = if exact {
        let v = moment_even_exact(n, k, cfg).expect("same guard as the float moment");
        let u = uniform_moment_exact(k);
        let side = match v.cmp(&u) {
            std::cmp::Ordering::Less => Side::BelowUniform,
            std::cmp::Ordering::Equal => Side::Equal,
            std::cmp::Ordering::Greater => Side::AboveUniform,
        };
        (v.to_string().into(), u.to_string().into(), side)
    } else {
        (report.value.into(), report.uniform_value.into(), report.side)
    };
    vec![n.into(), k.into(), relation, value, uniform, side.as_str().into(), Cell::Empty]
}

pub fn coherent(cfg: &RunConfig, alphas: &[f64], phase: f64) -> anyhow::Result<Output> {
    let rows = classical_limit_report(alphas, phase, &cfg.truncation)?;
    let mut t = Table::new(&["abs_alpha", "phase", "quantity", "classical_relation", "series", "matrix", "classical", "deviation", "path_mismatch"]);
    for r in &rows {
        let relation = match r.quantity.as_str() {
            "cos2phi" => "<cos 2phi> -> cos 2phi",
            "comm_cos2phi_h" => "<-i[cos 2phi, H]> -> 2 sin 2phi",
            "comm_cos_sq_h" => "<-i[cos^2 phi, H]> -> sin 2phi",
            _ => "<-i[sin^2 phi, H]> -> -sin 2phi",
        };
        t.push(vec![
            r.abs_alpha.into(),
            phase.into(),
            r.quantity.as_str().into(),
            relation.into(),
            r.series.into(),
            r.matrix.into(),
            r.classical.into(),
            r.deviation().into(),
            r.path_mismatch().into(),
        ]);
    }
    table(cfg, &t, false)
}

pub fn phase_dist(cfg: &RunConfig, state: StateSpec) -> anyhow::Result<Output> {
    let v = match state {
        StateSpec::Fock(n) => fock_state(&cfg.truncation, n)?,
        StateSpec::Coherent { abs_alpha, phase } => coherent_state(&cfg.truncation, abs_alpha, phase)?,
    };
    let dist = phase_distribution(&v, &phase_table(cfg)?)?;
    let mut t = Table::new(&["phi", "branch", "density"]);
    for i in 0..dist.len() {
        t.push(vec![dist.phi[i].into(), dist.branch[i].as_str().into(), dist.density[i].into()]);
    }
    table(cfg, &t, false)
}

/// The named operator at time zero. Spectral operators need the phase
/// table; the rest are built directly.
pub fn build_named(cfg: &RunConfig, name: &str, labeling: PhaseLabeling) -> anyhow::Result<BandedHermitianOperator> {
    let trunc = &cfg.truncation;
    Ok(match name {
        "cos2phi" => build_cos2phi(trunc),
        "cos_sq" => build_cos_sq(trunc),
        "sin_sq" => build_sin_sq(trunc),
        "sg_c" => build_sg(trunc).0,
        "sg_s" => build_sg(trunc).1,
        "phi" => build_phi(&phase_table(cfg)?, labeling),
        "cos_phi" => build_cos_phi(&phase_table(cfg)?),
        "sin_phi" => build_sin_phi(&phase_table(cfg)?),
        "tan_phi" => {
            let op = build_tan_phi(&phase_table(cfg)?);
            if !op.dropped_nodes.is_empty() {
                eprintln!("tan_phi: {} node(s) above the value cap were dropped", op.dropped_nodes.len());
            }
            op.operator
        }
        other => return Err(PhaseError::UnknownOperator(other.to_owned()).into()),
    })
}

pub fn dump(cfg: &RunConfig, name: &str, time: EvolutionTime, binary: bool, labeling: PhaseLabeling) -> anyhow::Result<Output> {
    let op = heisenberg(&build_named(cfg, name, labeling)?, time);
    let mut bytes = Vec::new();
    if binary {
        write_matrix_binary(op.entries(), &mut bytes)?;
    } else {
        write_matrix_csv(op.entries(), &mut bytes)?;
    }
    Ok(Output { bytes, failed: false })
}

pub fn legacy(cfg: &RunConfig, s: usize) -> anyhow::Result<Output> {
    let dim = PbDimension::new(s)?;
    let sg = sg_report(&cfg.truncation);
    let mut t = Table::new(&["quantity", "relation", "value"]);
    let rows: [(&str, &str, Cell); 11] = [
        ("sg_c_number_commutator", "max |[C,N] - iS|", sg.c_number_commutator.into()),
        ("sg_s_number_commutator", "max |[S,N] + iC|", sg.s_number_commutator.into()),
        ("sg_cs_commutator_vacuum_re", "Re <0|[C,S]|0>", sg.cs_commutator_vacuum.re.into()),
        ("sg_cs_commutator_vacuum_im", "Im <0|[C,S]|0>", sg.cs_commutator_vacuum.im.into()),
        ("sg_cs_commutator_edge_re", "Re <n_max|[C,S]|n_max>", sg.cs_commutator_edge.re.into()),
        ("sg_cs_commutator_edge_im", "Im <n_max|[C,S]|n_max>", sg.cs_commutator_edge.im.into()),
        ("sg_cs_commutator_interior", "max |[C,S]| off the corners", sg.cs_commutator_interior.into()),
        ("sg_trig_defect_vacuum", "1 - <0|C^2 + S^2|0>", sg.trig_defect_vacuum.into()),
        ("sg_trig_defect_edge", "1 - <n_max|C^2 + S^2|n_max>", sg.trig_defect_edge.into()),
        ("sg_trig_defect_interior", "max |C^2 + S^2 - I| off the corners", sg.trig_defect_interior.into()),
        ("pb_divergence", "<0|e^{-i phi_s} N_s e^{i phi_s}|0> = s", pb_divergence(dim).into()),
    ];
    for (q, rel, v) in rows {
        t.push(vec![q.into(), rel.into(), v]);
    }
    table(cfg, &t, false)
}

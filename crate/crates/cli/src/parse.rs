//! Small grammars for command-line values: angles/times written with `pi`,
//! and state specifications.

use phasekit::dynamics::EvolutionTime;
use phasekit::PhaseError;

/// `a*pi/b` split into its rational multiple of `π`, if it has one.
struct PiMultiple {
    coeff: f64,
    denom: f64,
}

/// Accepts plain numbers and `[sign][coeff][*]pi[/denom]`, e.g. `pi/2`,
/// `-3pi/2`, `2*pi`, `0.25`.
pub fn parse_angle(s: &str) -> Result<f64, PhaseError> {
    match parse_pi(s)? {
        Some(m) => Ok(m.coeff * std::f64::consts::PI / m.denom),
        None => finite(s),
    }
}

/// Like [`parse_angle`], but integer multiples of `π/2` become exact
/// quarter periods.
pub fn parse_time(s: &str) -> Result<EvolutionTime, PhaseError> {
    if let Some(m) = parse_pi(s)? {
        let quarters = 2.0 * m.coeff / m.denom;
        if quarters.fract() == 0.0 && quarters.abs() < 1e9 {
            return Ok(EvolutionTime::quarter_periods(quarters as i64));
        }
        return Ok(EvolutionTime::new(m.coeff * std::f64::consts::PI / m.denom));
    }
    Ok(EvolutionTime::new(finite(s)?))
}

fn finite(s: &str) -> Result<f64, PhaseError> {
    let v: f64 = s.trim().parse().map_err(|_| PhaseError::Parse(format!("not a number or pi expression: '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(PhaseError::Parse(format!("value must be finite: '{s}'")))
    }
}

fn parse_pi(s: &str) -> Result<Option<PiMultiple>, PhaseError> {
    let t = s.trim().to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return Ok(None);
    };
    let bad = || PhaseError::Parse(format!("bad pi expression: '{s}'"));
    let head = t[..at].trim().trim_end_matches('*').trim();
    let tail = t[at + 2..].trim();
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = if tail.is_empty() {
        1.0
    } else {
        let d = tail.strip_prefix('/').ok_or_else(bad)?.trim();
        d.parse::<f64>().map_err(|_| bad())?
    };
    if !coeff.is_finite() || !denom.is_finite() || denom == 0.0 {
        return Err(bad());
    }
    Ok(Some(PiMultiple { coeff, denom }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent { abs_alpha: f64, phase: f64 },
}

/// `fock:<n>` or `coherent:<|α|>,<φ>`.
pub fn parse_state(s: &str) -> Result<StateSpec, PhaseError> {
    let bad = |why: &str| PhaseError::Parse(format!("state spec '{s}': {why} (expected fock:<n> or coherent:<|alpha|>,<phi>)"));
    let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    match kind.trim() {
        "fock" => rest.trim().parse().map(StateSpec::Fock).map_err(|_| bad("n must be a non-negative integer")),
        "coherent" => {
            let (a, p) = rest.split_once(',').ok_or_else(|| bad("missing ','"))?;
            let abs_alpha = finite(a).map_err(|_| bad("bad |alpha|"))?;
            if abs_alpha < 0.0 {
                return Err(bad("|alpha| must be >= 0"));
            }
            let phase = parse_angle(p).map_err(|_| bad("bad phase"))?;
            Ok(StateSpec::Coherent { abs_alpha, phase })
        }
        _ => Err(bad("unknown state kind")),
    }
}

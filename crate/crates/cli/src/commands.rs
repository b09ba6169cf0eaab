use std::fs;
use std::path::Path;

use ratapprox_core::ergodic::{primes_up_to, Psi};
use ratapprox_core::exact_arith::validate_c;
use ratapprox_core::hits::HitRow;
use ratapprox_core::primes::harmonic_h;
use ratapprox_core::sequences::constant_sequence;
use ratapprox_core::sieve_lab::MonteCarlo;
use ratapprox_core::{
    alpha_and_markov, arc_of, block_construction, convergence_series, fractional_hits, greedy_sequence, hit_primes,
    level_sets, normalize_union, omega_expectation_exact, omega_expectation_mc, random_sequence, sieve_range,
    sparse_prime_set, uncovered_measure, Error, HitReport, NumeratorSequence, Rational, RealApproximant, SparseMode,
};
use serde_json::{json, Map, Value};

use crate::output::{self, Artifact, Format};
use crate::{BuildMethod, Command, RealArg, SeqCommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("sequence file not found")]
    SeqNotFound,
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn parse_rational(s: &str) -> Result<Rational> {
    Ok(s.trim().parse::<Rational>()?)
}

fn parse_c(s: &str) -> Result<Rational> {
    let c = parse_rational(s).map_err(|_| Error::InvalidC)?;
    validate_c(&c)?;
    Ok(c)
}

fn load_seq(path: &Path) -> Result<NumeratorSequence> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(CliError::SeqNotFound),
        Err(e) => return Err(CliError::Io(format!("cannot read {}: {e}", path.display()))),
    };
    Ok(NumeratorSequence::from_json(&text)?)
}

fn parts(r: &Rational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

pub fn run(command: Command, format: Option<Format>, out: Option<&Path>) -> Result<()> {
    let artifacts = match command {
        Command::Primes { bound, list } => vec![Artifact::new(out, primes(bound, list, format.unwrap_or(Format::Json))?)],
        Command::Seq(SeqCommand::Build { method, bound, c, seed, eps, schedule }) => {
            if format == Some(Format::Csv) {
                return Err(CliError::Usage("sequence files are JSON only".into()));
            }
            seq_build(method, bound, &c, seed, &eps, out, schedule.as_deref())?
        }
        Command::Coverage { seq, x, y, union } => {
            vec![Artifact::new(out, coverage(&seq, x, y, union, format.unwrap_or(Format::Json))?)]
        }
        Command::Sievelab { seq, x, y, c, exact, mc, seed } => vec![Artifact::new(
            out,
            sievelab(seq.as_deref(), x, y, c.as_deref(), exact, mc, seed, format.unwrap_or(Format::Json))?,
        )],
        Command::Hits { seq, x, bound } => {
            let seq = load_seq(&seq)?;
            let approx = approximant(&x)?;
            let report = hit_primes(&approx, &seq, bound)?;
            vec![Artifact::new(out, hit_report(&approx, report, format.unwrap_or(Format::Json))?)]
        }
        Command::Fracparts { x, c, bound } => {
            let c = parse_c(&c)?;
            let approx = approximant(&x)?;
            let report = fractional_hits(&approx, &c, bound)?;
            vec![Artifact::new(out, hit_report(&approx, report, format.unwrap_or(Format::Json))?)]
        }
        Command::Ergodic { seq, x, y, primes_up_to, sparse } => vec![Artifact::new(
            out,
            ergodic(&seq, x, y, primes_up_to, sparse.as_deref(), format.unwrap_or(Format::Csv))?,
        )],
    };
    output::emit(artifacts)
}

fn primes(bound: u64, list: bool, format: Format) -> Result<Vec<u8>> {
    let table = sieve_range(bound)?;
    match (format, list) {
        (Format::Json, false) => output::json(&json!({ "bound": bound, "count": table.len() })),
        (Format::Json, true) => output::json(&json!({ "bound": bound, "count": table.len(), "primes": table.primes() })),
        (Format::Csv, false) => output::csv(&["bound", "count"], [[bound.to_string(), table.len().to_string()]]),
        (Format::Csv, true) => output::csv(&["p"], table.primes().iter().map(|p| [p.to_string()])),
    }
}

fn seq_build(
    method: BuildMethod,
    bound: u64,
    c: &str,
    seed: u64,
    eps: &[String],
    out: Option<&Path>,
    schedule_path: Option<&Path>,
) -> Result<Vec<Artifact>> {
    let c = parse_c(c)?;
    if !matches!(method, BuildMethod::Blocks) && (!eps.is_empty() || schedule_path.is_some()) {
        return Err(CliError::Usage("--eps and --schedule apply to --method blocks only".into()));
    }
    let (seq, schedule) = match method {
        BuildMethod::Greedy => (greedy_sequence(bound, &c)?, None),
        BuildMethod::Random => (random_sequence(bound, &c, seed)?, None),
        BuildMethod::Constant => (constant_sequence(bound, &c)?, None),
        BuildMethod::Blocks => {
            if eps.is_empty() {
                return Err(CliError::Usage("--method blocks needs --eps".into()));
            }
            let eps: Vec<Rational> = eps.iter().map(|e| parse_rational(e)).collect::<Result<_>>()?;
            let (seq, schedule) = block_construction(&eps, &c, bound)?;
            (seq, Some(schedule))
        }
    };
    let mut seq_bytes = seq.to_json().into_bytes();
    seq_bytes.push(b'\n');
    let mut artifacts = vec![Artifact::new(out, seq_bytes)];
    if let Some(schedule) = schedule {
        let report = json!({ "final_bound": schedule.final_bound(), "blocks": schedule.blocks });
        match (schedule_path, out) {
            (Some(path), _) => artifacts.push(Artifact::new(Some(path), output::json(&report)?)),
            (None, Some(_)) => artifacts.push(Artifact::new(None, output::json(&report)?)),
            (None, None) => {}
        }
    }
    Ok(artifacts)
}

fn coverage(path: &Path, x: u64, y: u64, union: bool, format: Format) -> Result<Vec<u8>> {
    let seq = load_seq(path)?;
    let uncovered = uncovered_measure(&seq, x, y)?;
    match format {
        Format::Json => {
            let mut report = json!({
                "c": seq.c(),
                "x": x,
                "y": y,
                "uncovered": uncovered,
                "covered": Rational::one() - &uncovered,
            });
            if union {
                let arcs = seq
                    .range(x, y)?
                    .into_iter()
                    .map(|(p, a)| arc_of(p, a, seq.c()))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                report["union"] = serde_json::to_value(normalize_union(arcs)).map_err(|e| CliError::Io(e.to_string()))?;
            }
            output::json(&report)
        }
        Format::Csv => {
            let [num, den] = parts(&uncovered);
            output::csv(&["x", "y", "uncovered_num", "uncovered_den"], [[x.to_string(), y.to_string(), num, den]])
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sievelab(
    seq_path: Option<&Path>,
    x: u64,
    y: u64,
    c: Option<&str>,
    exact: bool,
    mc: Option<u64>,
    seed: u64,
    format: Format,
) -> Result<Vec<u8>> {
    let seq = seq_path.map(load_seq).transpose()?;
    let c = match (&seq, c) {
        (Some(seq), None) => seq.c().clone(),
        (Some(seq), Some(c)) => {
            let c = parse_c(c)?;
            if &c != seq.c() {
                return Err(CliError::Usage(format!("--c {c} differs from the sequence's c = {}", seq.c())));
            }
            c
        }
        (None, Some(c)) => parse_c(c)?,
        (None, None) => return Err(CliError::Usage("--c is required without --seq".into())),
    };
    if seq.is_none() && !exact && mc.is_none() {
        return Err(CliError::Usage("nothing to compute: give --seq, --exact or --mc".into()));
    }
    if y <= x {
        return Err(Error::InvalidRange(format!("need X < Y, got X={x}, Y={y}")).into());
    }

    let report = seq.as_ref().map(|s| level_sets(s, x, y).map(|p| alpha_and_markov(&p))).transpose()?;
    let expectation = if exact { Some(omega_expectation_exact(x, y, &c)?) } else { None };
    let monte_carlo: Option<MonteCarlo> = mc.map(|t| omega_expectation_mc(x, y, &c, t, seed)).transpose()?;
    let harmonic = harmonic_h(&Rational::from(x), &Rational::from(y));

    match format {
        Format::Json => {
            let mut map = Map::new();
            map.insert("c".into(), json!(c));
            map.insert("range".into(), json!([x, y]));
            map.insert("harmonic".into(), json!(harmonic));
            if let Some(r) = &report {
                if let Value::Object(fields) = json!(r) {
                    map.extend(fields);
                }
                map.insert("markov_holds".into(), json!(r.markov_holds()));
            }
            if let Some(e) = &expectation {
                map.insert("expectation_exact".into(), json!(e));
            }
            if let Some(m) = &monte_carlo {
                map.insert("monte_carlo".into(), json!(m));
            }
            output::json(&Value::Object(map))
        }
        Format::Csv => {
            let mut rows: Vec<[String; 2]> = vec![["c".into(), c.to_string()]];
            rows.push(["harmonic".into(), harmonic_string(&harmonic)]);
            if let Some(r) = &report {
                rows.push(["nu".into(), r.profile.nu.to_string()]);
                for (k, m) in &r.profile.levels {
                    rows.push([format!("level_{k}"), m.to_string()]);
                }
                rows.push(["alpha".into(), r.alpha.to_string()]);
                rows.push(["omega_measure".into(), r.omega_measure.to_string()]);
                rows.push(["markov_bound".into(), json_scalar(&r.markov_bound)]);
                rows.push(["markov_holds".into(), r.markov_holds().to_string()]);
            }
            if let Some(e) = &expectation {
                rows.push(["expectation_exact".into(), e.to_string()]);
            }
            if let Some(m) = &monte_carlo {
                rows.push(["mc_mean".into(), m.mean.to_string()]);
                rows.push(["mc_stderr".into(), m.stderr.to_string()]);
                rows.push(["mc_trials".into(), m.trials.to_string()]);
                rows.push(["mc_seed".into(), m.seed.to_string()]);
            }
            output::csv(&["quantity", "value"], rows)
        }
    }
}

fn harmonic_string(h: &ratapprox_core::HarmonicSum) -> String {
    match h.exact() {
        Some(r) => r.to_string(),
        None => h.to_f64().to_string(),
    }
}

fn json_scalar<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn approximant(arg: &RealArg) -> Result<RealApproximant> {
    match (&arg.x, &arg.x_named) {
        (Some(x), None) => Ok(RealApproximant::exact(parse_rational(x)?)),
        (None, Some(name)) => Ok(RealApproximant::named(name, &parse_rational(&arg.eta)?)?),
        _ => Err(CliError::Usage("give exactly one of --x and --x-named".into())),
    }
}

fn hit_report(x: &RealApproximant, report: HitReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut value = json!(report);
            value["x"] = json!({ "label": x.label, "value": x.value, "error_bound": x.error_bound });
            output::json(&value)
        }
        Format::Csv => output::csv(
            &["p", "distance_num", "distance_den", "hit", "ambiguous"],
            report.rows.iter().map(|r: &HitRow| {
                let [num, den] = parts(&r.distance);
                [r.p.to_string(), num, den, r.hit.to_string(), r.ambiguous.to_string()]
            }),
        ),
    }
}

fn ergodic(path: &Path, x: f64, y: f64, bound: u64, sparse: Option<&str>, format: Format) -> Result<Vec<u8>> {
    let seq = load_seq(path)?;
    let primes = match sparse {
        None => primes_up_to(bound)?,
        Some("geometric") => sparse_prime_set(bound, SparseMode::Geometric)?.primes,
        Some(name) => sparse_prime_set(bound, SparseMode::Psi(name.parse::<Psi>()?))?.primes,
    };
    let samples = convergence_series(&seq, x, y, &primes)?;
    match format {
        Format::Json => output::json(&samples),
        Format::Csv => output::csv(
            &["p", "a_p", "d", "abs_s", "is_hit", "method"],
            samples.iter().map(|s| {
                [
                    s.p.to_string(),
                    s.a_p.to_string(),
                    s.d.to_string(),
                    s.abs_s().to_string(),
                    s.is_hit.to_string(),
                    json_scalar(&s.method),
                ]
            }),
        ),
    }
}

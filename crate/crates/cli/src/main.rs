use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ecpatterns::certificate::{self, Certificate};
use ecpatterns::hypothesis::check_pattern_hypothesis;
use ecpatterns::lmfdb;
use ecpatterns::membership::naive_point_search;
use ecpatterns::patterns::{self, PatternReport};
use ecpatterns::subgroup::{enumerate_gamma, image_set, GammaSpec, ValueSet};
use ecpatterns::{CoordinateMap, Curve, CurvePoint, Error, Rational, RecurrenceMap};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(
    name = "ecpatterns",
    version,
    about = "Patterns in coordinate images of rational points on elliptic curves"
)]
struct Cli {
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Check every claim of one or more certificates (built-in names or files)
    Verify {
        #[arg(required = true)]
        targets: Vec<String>,
    },
    /// Build a value set and run a pattern detector on it
    Search {
        kind: SearchKind,
        #[command(flatten)]
        source: Source,
        /// Rank used for the implied constant
        #[arg(long)]
        rank: Option<u32>,
        /// Additive shift (shift search); the best shift is found when omitted
        #[arg(long, allow_hyphen_values = true)]
        a: Option<Rational>,
        /// Ratio (scale search)
        #[arg(long, allow_hyphen_values = true)]
        q: Option<Rational>,
        #[arg(long)]
        exclude_fixed: bool,
        /// Recurrence map file (orbit search)
        #[arg(long)]
        map: Option<PathBuf>,
        /// Second curve (intersect search)
        #[arg(long)]
        curve2: Option<PathBuf>,
        /// Coordinate map file for the second curve
        #[arg(long)]
        g2: Option<PathBuf>,
    },
    /// Decide whether g and F∘g have different branch values
    CheckHypothesis {
        #[arg(long)]
        curve: PathBuf,
        /// Recurrence map F
        #[arg(long)]
        map: PathBuf,
        /// Coordinate map g (defaults to x)
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// List Γ points (or searched points) and their image values
    Enumerate {
        #[command(flatten)]
        source: Source,
    },
    /// Download a curve record and write a local curve file
    FetchLmfdb { label: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Ap,
    Gp,
    Orbit,
    Shift,
    Scale,
    Intersect,
}

#[derive(clap::Args)]
struct Source {
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Use a built-in certificate's curve and value list
    #[arg(long, conflicts_with_all = ["curve", "gamma", "naive"])]
    fixture: Option<String>,
    /// Generators of Γ (the enumeration uses --bound)
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    bound: u32,
    /// Naive search with |x| ≤ NUM and denominators up to DEN²
    #[arg(long, num_args = 2, value_names = ["NUM", "DEN"], conflicts_with = "gamma")]
    naive: Option<Vec<u64>>,
    /// Coordinate map file g (defaults to x)
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long)]
    allow_infinity: bool,
}

struct Failure {
    code: u8,
    message: String,
    /// Output produced before the failure.
    lines: Vec<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::VerificationFailed(_) => 1,
            Error::SchemaMismatch(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
            lines: Vec::new(),
        }
    }
}

fn parse_failure(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
        lines: Vec::new(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn json_line(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("report types serialize")
}

struct ValueSource {
    curve: Curve,
    g: CoordinateMap,
    points: Option<BTreeSet<CurvePoint>>,
    values: ValueSet,
    rank: Option<(u32, bool)>,
}

fn build(source: &Source) -> CliResult<ValueSource> {
    if let Some(name) = &source.fixture {
        let cert = certificate::builtin(name)?;
        return Ok(ValueSource {
            values: cert.value_set(),
            rank: cert.rank.map(|r| (r, true)),
            curve: cert.curve,
            g: cert.map,
            points: None,
        });
    }
    let path = source
        .curve
        .as_ref()
        .ok_or_else(|| parse_failure("one of --curve or --fixture is required"))?;
    let curve: Curve = read_json(path)?;
    let g = match &source.g {
        Some(p) => read_json(p)?,
        None => CoordinateMap::x(),
    };
    let (points, rank) = match (&source.gamma, &source.naive) {
        (Some(p), _) => {
            let spec: GammaSpec = read_json(p)?;
            (
                enumerate_gamma(&curve, &spec, source.bound)?,
                Some(spec.rank()),
            )
        }
        (None, Some(nd)) => (naive_point_search(&curve, nd[0], nd[1]), None),
        (None, None) => (naive_point_search(&curve, 10, 1), None),
    };
    let values = image_set(&curve, &g, &points, source.allow_infinity);
    Ok(ValueSource {
        curve,
        g,
        points: Some(points),
        values,
        rank,
    })
}

fn attach_rank(report: PatternReport, flag: Option<u32>, src: &ValueSource) -> PatternReport {
    match (flag, src.rank) {
        (Some(r), _) => report.with_rank(r, true),
        (None, Some((r, declared))) => report.with_rank(r, declared),
        (None, None) => report,
    }
}

fn run(cli: Cli) -> CliResult<Vec<String>> {
    match cli.command {
        Command::Verify { targets } => verify(&targets),
        Command::Search {
            kind,
            source,
            rank,
            a,
            q,
            exclude_fixed,
            map,
            curve2,
            g2,
        } => {
            let src = build(&source)?;
            let x = &src.values;
            let report = match kind {
                SearchKind::Ap => patterns::longest_ap(x)?,
                SearchKind::Gp => patterns::longest_gp(x)?,
                SearchKind::Orbit => {
                    let path = map.ok_or_else(|| parse_failure("orbit search needs --map"))?;
                    let f: RecurrenceMap = read_json(&path)?;
                    patterns::longest_orbit(x, &f)?
                }
                SearchKind::Shift => match a {
                    Some(a) => patterns::additive_shift_report(x, &a)?,
                    None => {
                        let (a, _) = patterns::best_additive_shift(x)?;
                        patterns::additive_shift_report(x, &a)?
                    }
                },
                SearchKind::Scale => {
                    let q = q.ok_or_else(|| parse_failure("scale search needs --q"))?;
                    patterns::multiplicative_shift_report(x, &q, exclude_fixed)?
                }
                SearchKind::Intersect => {
                    let path =
                        curve2.ok_or_else(|| parse_failure("intersect search needs --curve2"))?;
                    let second = Source {
                        curve: Some(path),
                        fixture: None,
                        gamma: None,
                        bound: source.bound,
                        naive: source.naive.clone(),
                        g: g2,
                        allow_infinity: source.allow_infinity,
                    };
                    let other = build(&second)?;
                    let both = ValueSet::new(
                        x.values.intersection(&other.values.values).cloned(),
                        format!("{} ∩ {}", x.provenance, other.values.provenance),
                    );
                    patterns::intersection_report(&both)
                }
            };
            Ok(vec![json_line(&attach_rank(report, rank, &src))])
        }
        Command::CheckHypothesis { curve, map, g } => {
            let curve: Curve = read_json(&curve)?;
            let f: RecurrenceMap = read_json(&map)?;
            let g = match g {
                Some(p) => read_json(&p)?,
                None => CoordinateMap::x(),
            };
            Ok(vec![json_line(&check_pattern_hypothesis(&curve, &g, &f))])
        }
        Command::Enumerate { source } => {
            let src = build(&source)?;
            let mut out = Vec::new();
            for p in src.points.iter().flatten() {
                let v = src.g.apply(&src.curve, p);
                out.push(json_line(&serde_json::json!({ "point": p, "value": v })));
            }
            out.push(json_line(&src.values));
            Ok(out)
        }
        Command::FetchLmfdb { label } => {
            let url = lmfdb::api_url(&label)?;
            let body = ureq::get(&url)
                .call()
                .and_then(|mut r| r.body_mut().read_to_string())
                .map_err(|e| Failure {
                    code: 3,
                    message: format!("network error fetching {url}: {e}"),
                    lines: Vec::new(),
                })?;
            let file = lmfdb::parse_response(&label, &body)?;
            Ok(vec![
                serde_json::to_string_pretty(&file).expect("curve files serialize")
            ])
        }
    }
}

fn load_certificate(target: &str) -> CliResult<Certificate> {
    if certificate::builtin_names().any(|n| n == target) {
        return Ok(certificate::builtin(target)?);
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Error::UnknownFixture(target.to_string()).into());
    }
    read_json(path)
}

/// Certificates are checked on separate threads; output keeps input order.
fn verify(targets: &[String]) -> CliResult<Vec<String>> {
    let results: Vec<CliResult<(Certificate, certificate::Verification)>> =
        std::thread::scope(|s| {
            let handles: Vec<_> = targets
                .iter()
                .map(|t| {
                    s.spawn(move || {
                        let cert = load_certificate(t)?;
                        let v = certificate::verify(&cert);
                        Ok((cert, v))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("verifier thread panicked"))
                .collect()
        });
    let mut out = Vec::new();
    for r in results {
        let (cert, v) = r?;
        out.extend(v.lines.iter().map(json_line));
        let summary = serde_json::json!({
            "certificate": cert.name,
            "status": if v.passed() { "pass" } else { "fail" },
            "checks": v.lines.len(),
        });
        out.push(json_line(&summary));
        if let Some(e) = v.failure {
            return Err(Failure {
                code: 1,
                message: e.to_string(),
                lines: out,
            });
        }
    }
    Ok(out)
}

fn emit(lines: &[String], output: Option<&Path>) -> std::io::Result<()> {
    let mut text = lines.join("\n");
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok(lines) => match emit(&lines, output.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(2)
            }
        },
        Err(f) => {
            if !f.lines.is_empty() {
                emit(&f.lines, output.as_deref()).ok();
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::VerificationFailed("x".into())).code, 1);
        assert_eq!(Failure::from(Error::Parse("x".into())).code, 2);
        assert_eq!(Failure::from(Error::SchemaMismatch("x".into())).code, 3);
    }
}

//! The `foliated` command line.
//!
//! Exit status: 0 when every check passed, 2 when a formula check failed
//! beyond tolerance (the JSON report is still written), 1 on any error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use foliated_core::arith::{analogy_table, gaussian_places, product_formula_residual, rational_places, PlaceValuation};
use foliated_core::orbits::find_singular_orbits;
use foliated_core::sphere::{Chart, PointCP1};
use foliated_core::verifier::{verify_all, verify_product_formula};
use foliated_core::winding::winding_order;
use foliated_core::{Method, RationalFunction, VerificationReport};

use crate::error::LabError;
use crate::literals::{parse_coefficients, parse_fraction, parse_gaussian_fraction, parse_point};
use crate::report::{human_summary, ReportDoc};
use crate::scenario_file::parse_scenario;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FORMULA: i32 = 2;

/// Residual below which `arith` reports the product formula as holding.
pub const ARITH_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "foliated", version, about = "Product formula checks on mapping tori and number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full verification of a scenario file.
    Verify {
        scenario: PathBuf,
        /// `A`, `B`, or one of them per orbit, comma separated.
        #[arg(long)]
        partition: Option<String>,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List the closed orbits through zeros and poles.
    Orbits { scenario: PathBuf },
    /// Order of a rational function at a point, by the argument principle.
    Order {
        /// Numerator coefficients, constant term first, e.g. `0,0,0,0,1`.
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        den: String,
        /// `re,im`, or `inf` for the point at infinity.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        /// Radius in the chart of the centre.
        #[arg(long)]
        radius: f64,
    },
    /// Places of a rational or Gaussian number and the product formula.
    Arith {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "gaussian", required_unless_present = "gaussian")]
        rational: Option<String>,
        /// `a+bi` or `a+bi/c+di`.
        #[arg(long, allow_hyphen_values = true)]
        gaussian: Option<String>,
    },
    /// Closed orbits of a scenario beside the places of a rational number.
    Analogy {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        rational: String,
    },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, LabError> {
    match command {
        Command::Verify {
            scenario,
            partition,
            json,
        } => verify(&scenario, partition.as_deref(), json.as_deref(), out),
        Command::Orbits { scenario } => {
            let loaded = parse_scenario(&scenario)?;
            let orbits = find_singular_orbits(&loaded.scenario)?;
            emit(out, &format!("{:<4} {:>18} {:>5}  points", "n", "l", "ord"))?;
            for o in &orbits {
                let points: Vec<String> = o.points.iter().map(|p| p.to_string()).collect();
                emit(out, &format!("{:<4} {:>18.12} {:>+5}  {}", o.period_n, o.length_l, o.order, points.join(" ")))?;
            }
            Ok(EXIT_PASS)
        }
        Command::Order {
            num,
            den,
            center,
            radius,
        } => {
            let f = RationalFunction::new(parse_coefficients(&num)?, parse_coefficients(&den)?)?;
            let center = if center.trim().eq_ignore_ascii_case("inf") {
                PointCP1::INFINITY
            } else {
                PointCP1::in_chart(Chart::Standard, parse_point(&center)?)
            };
            emit(out, &winding_order(&f, &center, radius)?.to_string())?;
            Ok(EXIT_PASS)
        }
        Command::Arith { rational, gaussian } => {
            let places = match (rational, gaussian) {
                (Some(r), _) => {
                    let (p, q) = parse_fraction(&r)?;
                    rational_places(p, q)?
                }
                (None, Some(g)) => {
                    let (n, d) = parse_gaussian_fraction(&g)?;
                    gaussian_places(n, d)?
                }
                (None, None) => return Err(LabError::Usage("arith needs --rational or --gaussian".into())),
            };
            let residual = product_formula_residual(&places);
            emit(out, &places_table(&places))?;
            emit(out, &format!("residual = {residual:.3e}"))?;
            Ok(if residual < ARITH_TOL { EXIT_PASS } else { EXIT_FORMULA })
        }
        Command::Analogy { scenario, rational } => {
            let loaded = parse_scenario(&scenario)?;
            let (p, q) = parse_fraction(&rational)?;
            let places = rational_places(p, q)?;
            let report = verify_product_formula(&loaded.scenario);
            emit(out, analogy_table(&report, Some(&places)).trim_end())?;
            Ok(exit_code(&report))
        }
    }
}

fn verify(
    path: &std::path::Path,
    partition: Option<&str>,
    json: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<i32, LabError> {
    let loaded = parse_scenario(path)?;
    let report = match partition {
        None => verify_all(&loaded.scenario, None),
        Some(text) => {
            let methods = parse_partition(text)?;
            let methods = if methods.len() == 1 {
                let n = find_singular_orbits(&loaded.scenario)?.len();
                vec![methods[0]; n]
            } else {
                methods
            };
            verify_all(&loaded.scenario, Some(&methods))
        }
    };
    emit(out, human_summary(&report).trim_end())?;
    if let Some(target) = json {
        let text = ReportDoc::new(&report, &loaded.digest).to_json();
        if target.as_os_str() == "-" {
            out.write_all(text.as_bytes()).map_err(|source| io_error(target, source))?;
        } else {
            fs::write(target, text).map_err(|source| io_error(target, source))?;
        }
    }
    Ok(exit_code(&report))
}

fn exit_code(report: &VerificationReport) -> i32 {
    match (&report.failure, report.passed) {
        (Some(_), _) => EXIT_ERROR,
        (None, true) => EXIT_PASS,
        (None, false) => EXIT_FORMULA,
    }
}

fn parse_partition(text: &str) -> Result<Vec<Method>, LabError> {
    text.split(',')
        .map(|m| match m.trim() {
            "A" | "a" => Ok(Method::A),
            "B" | "b" => Ok(Method::B),
            other => Err(LabError::Usage(format!("partition entries are A or B, got {other:?}"))),
        })
        .collect()
}

fn places_table(places: &[PlaceValuation]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>5} {:>20} {:>20}", "place", "ord", "log N", "log|f|_v");
    for v in places {
        let _ = writeln!(s, "{:<14} {:>5} {:>20.15} {:>20.15}", v.place.to_string(), v.ord, v.log_norm, v.log_abs);
    }
    s.trim_end().to_owned()
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), LabError> {
    writeln!(out, "{text}").map_err(|source| io_error(std::path::Path::new("<stdout>"), source))
}

fn io_error(path: &std::path::Path, source: std::io::Error) -> LabError {
    LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("foliated").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn arith_rational() {
        let (code, out, _) = run_capture(&["arith", "--rational", "-12/5"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("residual"));
        let (code, _, err) = run_capture(&["arith", "--rational", "0/5"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("ZeroInput"), "{err}");
    }

    #[test]
    fn arith_gaussian() {
        let (code, out, _) = run_capture(&["arith", "--gaussian", "3+4i"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("(2+i)"), "{out}");
    }

    #[test]
    fn order_of_quartic() {
        let (code, out, _) = run_capture(&["order", "--num", "0,0,0,0,1", "--den", "1,0,0,0,1", "--center", "0,0", "--radius", "0.5"]);
        assert_eq!((code, out.trim()), (EXIT_PASS, "4"));
        let (code, out, _) = run_capture(&[
            "order", "--num", "0,0,0,0,1", "--den", "1,0,0,0,1", "--center", "0.70710678118654752,0.70710678118654752", "--radius", "0.1",
        ]);
        assert_eq!((code, out.trim()), (EXIT_PASS, "-1"));
        let (code, out, _) = run_capture(&["order", "--num", "1", "--den", "0,0,1", "--center", "inf", "--radius", "0.5"]);
        assert_eq!((code, out.trim()), (EXIT_PASS, "2"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["verify"]).0, EXIT_ERROR);
        assert_eq!(run_capture(&["arith"]).0, EXIT_ERROR);
        assert_eq!(run_capture(&["arith", "--rational", "1/x"]).0, EXIT_ERROR);
        assert_eq!(run_capture(&["verify", "/nonexistent/scenario.json"]).0, EXIT_ERROR);
        assert_eq!(run_capture(&["--help"]).0, EXIT_PASS);
    }

    #[test]
    fn partition_syntax() {
        assert_eq!(parse_partition("A,b,B").unwrap(), vec![Method::A, Method::B, Method::B]);
        assert!(parse_partition("A,C").is_err());
    }
}

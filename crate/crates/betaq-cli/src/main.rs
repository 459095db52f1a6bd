//! betaq — command-line front end for the exact q-series engine.
//!
//! Subcommands map one-to-one onto the library modules: `expand` and
//! `eisenstein` print q-expansions, `verify` runs coefficientwise identity
//! checks, `decompose` solves in the triangular cusp basis, `cm`/`limits`
//! evaluate the numeric layer, `count`/`asympt` drive the counting
//! corollary, and `suite` runs the whole verification battery.
//!
//! Exit status: 0 when every sub-check of the invoked command passed,
//! 1 on a verification failure, 2 on a usage error. JSON output renders
//! exact rationals as strings and high-precision reals as decimal strings
//! with their precision stated.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use betaq_core::analytics::{asymptotic_report, limit_check, limit_grid, t_counts};
use betaq_core::basis::{build_basis, cusp_conditions, decompose, t_cusp_series};
use betaq_core::cm::cm_report;
use betaq_core::eisenstein::{chi2, chi_minus4, trivial_character, EisensteinSpec};
use betaq_core::etaq::EtaQuotient;
use betaq_core::lambert::{verify_classical, verify_theorem2, ClassicalIdentity};
use betaq_core::qseries::QSeries;
use betaq_core::suite::run_all;
use betaq_core::{DEFAULT_PREC, DEFAULT_TRUNC};

#[derive(Parser)]
#[command(
    name = "betaq",
    version,
    about = "Exact q-series engine: eta quotients, odd-weight Eisenstein series, \
             Lambert expansions, CM evaluations, and a verification suite"
)]
struct Cli {
    /// Working precision in bits for the numeric commands
    #[arg(long, global = true, env = "BETAQ_PREC", default_value_t = DEFAULT_PREC)]
    prec: u32,

    /// Output format; every command has a natural default
    #[arg(short, long, global = true, value_enum)]
    output: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Psi {
    /// principal character mod 1
    One,
    /// principal character mod 2
    Chi2,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Identity {
    Ramanujan,
    HouSun,
    K3,
    Theorem2,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an eta quotient, e.g. "4^6*8^4/2^4 @8", as a q-series
    Expand {
        /// Quotient in compact form: delta^exp factors joined by * and /, then @level
        #[arg(long)]
        quotient: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: i64,
        /// Include the modularity report (weight, cusp orders, character)
        #[arg(long)]
        ghn: bool,
    },
    /// Fourier expansion of the weight-(2k+1) Eisenstein series E_{χ₋₄,ψ}(mτ)
    Eisenstein {
        /// Family index: the series has weight 2k+1
        #[arg(long)]
        k: u32,
        /// Evaluate at mτ; m must clear the exponent grid (ψ = chi2 needs 2 | m)
        #[arg(long, default_value_t = 2)]
        twist: u32,
        #[arg(long, value_enum, default_value_t = Psi::One)]
        psi: Psi,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: i64,
    },
    /// Check a coefficientwise identity; exits 1 on the first mismatch
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        /// Family index, used by --identity theorem2
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Defaults: 500 (ramanujan, hou-sun), 300 (k3), 200 (theorem2)
        #[arg(long)]
        trunc: Option<i64>,
    },
    /// Decompose f_k − H_k (or an arbitrary --quotient) in the cusp basis
    Decompose {
        #[arg(long)]
        k: u32,
        /// Decompose this eta quotient instead of the default target
        #[arg(long)]
        quotient: Option<String>,
        #[arg(long, default_value_t = 300)]
        trunc: i64,
    },
    /// Evaluate H_k at the CM point 2^r i: closed form vs direct summation
    Cm {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
    },
    /// Radial limit of (1−q)^{2k+1} f_k on the grid q = 1 − 2^{−j}, j = 4..12
    Limits {
        #[arg(long)]
        k: u32,
    },
    /// Lattice-point counts t_k(n)
    Count {
        #[arg(long)]
        k: u32,
        /// Single count t_k(n)
        #[arg(long)]
        n: Option<u64>,
        /// Table of counts for n = 0..=nmax
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// Exact counts t_k(n) against the Eisenstein main term
    Asympt {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 200)]
        nmax: u64,
    },
    /// Run the end-to-end verification suite
    Suite {
        /// Cap for the per-k sweeps (decompositions to min(k_max, 6), numerics to min(k_max, 3))
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
}

/// A bad flag combination: reported on stderr, exit 2.
struct UsageError(String);

/// Commands return whether every sub-check passed.
type CmdResult = Result<bool, UsageError>;

fn main() -> ExitCode {
    // Die quietly when the reader of a pipe goes away (e.g. `betaq asympt | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.prec < 64 {
        eprintln!("error: --prec must be at least 64 bits, got {}", cli.prec);
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Expand { quotient, trunc, ghn } => cmd_expand(cli, quotient, *trunc, *ghn),
        Command::Eisenstein { k, twist, psi, trunc } => {
            cmd_eisenstein(cli, *k, *twist, *psi, *trunc)
        }
        Command::Verify { identity, k, trunc } => cmd_verify(cli, *identity, *k, *trunc),
        Command::Decompose { k, quotient, trunc } => {
            cmd_decompose(cli, *k, quotient.as_deref(), *trunc)
        }
        Command::Cm { k, r } => cmd_cm(cli, *k, *r),
        Command::Limits { k } => cmd_limits(cli, *k),
        Command::Count { k, n, nmax } => cmd_count(cli, *k, *n, *nmax),
        Command::Asympt { k, nmax } => cmd_asympt(cli, *k, *nmax),
        Command::Suite { k_max } => cmd_suite(cli, *k_max),
    }
}

fn check_trunc(trunc: i64) -> Result<(), UsageError> {
    if trunc < 8 {
        return Err(UsageError(format!("--trunc must be at least 8, got {trunc}")));
    }
    Ok(())
}

fn check_k(k: u32) -> Result<(), UsageError> {
    if k < 1 {
        return Err(UsageError("--k must be at least 1".into()));
    }
    Ok(())
}

/// The chosen format, or the command's default; errors when the command has
/// no rendering for it.
fn format_for(cli: &Cli, default: Format, csv_ok: bool) -> Result<Format, UsageError> {
    let f = cli.output.unwrap_or(default);
    if f == Format::Csv && !csv_ok {
        return Err(UsageError("this command has no CSV form".into()));
    }
    Ok(f)
}

fn parse_quotient(s: &str) -> Result<EtaQuotient, UsageError> {
    EtaQuotient::from_str(s).map_err(|e| UsageError(format!("--quotient: {e}")))
}

fn print_series_text(series: &QSeries) {
    let terms: Vec<String> = series
        .iter()
        .filter(|(_, c)| **c != 0)
        .map(|(e, c)| format!("{c} q^{e}"))
        .collect();
    if terms.is_empty() {
        println!("0");
    } else {
        println!("{}", terms.join(" + "));
    }
    println!("(coefficients known below q^{})", series.truncation());
}

fn cmd_expand(cli: &Cli, quotient: &str, trunc: i64, ghn: bool) -> CmdResult {
    check_trunc(trunc)?;
    let eta = parse_quotient(quotient)?;
    let series = eta
        .expand(trunc)
        .map_err(|e| UsageError(format!("cannot expand: {e}")))?;
    match format_for(cli, Format::Json, false)? {
        Format::Json => {
            let mut doc = json!({
                "quotient": eta.to_string(),
                "series": serde_json::to_value(&series).expect("series serializes"),
            });
            if ghn {
                doc["modularity"] = eta.ghn_check().to_json();
            }
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Text => {
            println!("{eta}");
            print_series_text(&series);
            if ghn {
                println!("{}", eta.ghn_check().to_json());
            }
        }
        Format::Csv => unreachable!(),
    }
    Ok(true)
}

fn cmd_eisenstein(cli: &Cli, k: u32, twist: u32, psi: Psi, trunc: i64) -> CmdResult {
    check_k(k)?;
    check_trunc(trunc)?;
    let (psi_table, psi_name) = match psi {
        Psi::One => (trivial_character(), "one"),
        Psi::Chi2 => (chi2(), "chi2"),
    };
    let grid = psi_table.modulus();
    if twist < 1 || twist % grid != 0 {
        return Err(UsageError(format!(
            "--twist {twist} does not clear the q^(n/{grid}) exponent grid; use a multiple of {grid}"
        )));
    }
    let spec = EisensteinSpec::new(2 * k + 1, chi_minus4(), psi_table)
        .map_err(|e| UsageError(e.to_string()))?;
    let series = spec.series(twist, trunc);
    match format_for(cli, Format::Json, false)? {
        Format::Json => {
            let doc = json!({
                "k": k,
                "weight": 2 * k + 1,
                "psi": psi_name,
                "twist": twist,
                "series": serde_json::to_value(&series).expect("series serializes"),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Text => {
            println!("E_(2k+1 = {}, χ₋₄, ψ = {psi_name}) at {twist}τ", 2 * k + 1);
            print_series_text(&series);
        }
        Format::Csv => unreachable!(),
    }
    Ok(true)
}

fn cmd_verify(cli: &Cli, identity: Identity, k: u32, trunc: Option<i64>) -> CmdResult {
    check_k(k)?;
    let trunc = trunc.unwrap_or(match identity {
        Identity::Ramanujan | Identity::HouSun => 500,
        Identity::K3 => 300,
        Identity::Theorem2 => 200,
    });
    check_trunc(trunc)?;
    let report = match identity {
        Identity::Ramanujan => verify_classical(ClassicalIdentity::Ramanujan, trunc),
        Identity::HouSun => verify_classical(ClassicalIdentity::HouSun, trunc),
        Identity::K3 => verify_classical(ClassicalIdentity::K3, trunc),
        Identity::Theorem2 => verify_theorem2(k, trunc),
    };
    match format_for(cli, Format::Json, false)? {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.to_json()).expect("valid JSON")
        ),
        Format::Text => match report.first_mismatch {
            None => println!("{}: coefficient-exact below q^{trunc}", report.identity),
            Some(e) => println!("{}: FIRST MISMATCH at q^{e}", report.identity),
        },
        Format::Csv => unreachable!(),
    }
    Ok(report.holds)
}

fn cmd_decompose(cli: &Cli, k: u32, quotient: Option<&str>, trunc: i64) -> CmdResult {
    check_k(k)?;
    check_trunc(trunc)?;
    if trunc <= 2 * k as i64 + 1 {
        return Err(UsageError(format!(
            "--trunc {trunc} is too small to see all {} basis leads for k = {k}",
            2 * k + 2
        )));
    }
    let target = match quotient {
        None => t_cusp_series(k, trunc),
        Some(s) => parse_quotient(s)?
            .expand(trunc)
            .map_err(|e| UsageError(format!("cannot expand: {e}")))?,
    };
    let basis = build_basis(k, trunc);
    let format = format_for(cli, Format::Json, false)?;
    match decompose(&target, &basis) {
        Ok(d) => {
            let conds = cusp_conditions(&d);
            match format {
                Format::Json => {
                    let doc = json!({
                        "k": k,
                        "trunc": trunc,
                        "target": quotient.unwrap_or("fk-minus-hk"),
                        "decomposition": d.to_json(),
                        "cusp_conditions": conds.to_json(),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
                }
                Format::Text => {
                    for l in 0..basis.len() {
                        println!("c_{l} ({}) = {}", basis.quotient(l), d.coefficient(l));
                    }
                    println!("residual zero: {}", d.residual_zero);
                    println!("cusp conditions: {}", conds.to_json());
                }
                Format::Csv => unreachable!(),
            }
            Ok(d.residual_zero && conds.all())
        }
        Err(e) => {
            match format {
                Format::Json => println!("{}", json!({ "k": k, "error": e.to_string() })),
                Format::Text => println!("not in the space: {e}"),
                Format::Csv => unreachable!(),
            }
            Ok(false)
        }
    }
}

fn cmd_cm(cli: &Cli, k: u32, r: u32) -> CmdResult {
    check_k(k)?;
    if r < 1 {
        return Err(UsageError("--r must be at least 1".into()));
    }
    let report = cm_report(k, r, cli.prec);
    let rel: f64 = report["rel_err"]
        .as_str()
        .expect("rel_err is a string")
        .parse()
        .expect("rel_err parses");
    match format_for(cli, Format::Json, false)? {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("valid JSON"))
        }
        Format::Text => {
            println!("H_{k}(2^{r} i) at {} bits", cli.prec);
            println!("closed form:      {}", report["closed"].as_str().unwrap());
            println!("direct summation: {}", report["direct"].as_str().unwrap());
            println!("relative error:   {rel:.3e}");
        }
        Format::Csv => unreachable!(),
    }
    Ok(rel < 1e-15)
}

fn cmd_limits(cli: &Cli, k: u32) -> CmdResult {
    check_k(k)?;
    let report = limit_check(k, &limit_grid(cli.prec));
    let tol = if k == 1 { 1e-3 } else { 1e-2 };
    let pass = report.identity_exact && report.rel_dev < tol;
    match format_for(cli, Format::Json, false)? {
        Format::Json => {
            let mut doc = report.to_json();
            doc["prec"] = json!(cli.prec);
            doc["tolerance"] = json!(format!("{tol:.0e}"));
            doc["pass"] = json!(pass);
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Text => {
            println!("(1−q)^{} f_{k}(q) on q = 1 − 2^(−j), j = 4..12:", 2 * k + 1);
            for (j, row) in (4..).zip(report.rows.iter()) {
                println!("  j = {j:2}: {:.12e}", row.value.to_f64());
            }
            println!("extrapolated: {:.12e}", report.extrapolated.to_f64());
            println!("target:       {:.12e}", report.target.to_f64());
            println!("relative dev: {:.3e} (tolerance {tol:.0e})", report.rel_dev);
            println!("exact constant identity: {}", report.identity_exact);
        }
        Format::Csv => unreachable!(),
    }
    Ok(pass)
}

fn cmd_count(cli: &Cli, k: u32, n: Option<u64>, nmax: Option<u64>) -> CmdResult {
    check_k(k)?;
    let (lo, hi) = match (n, nmax) {
        (Some(n), None) => (n, n),
        (None, Some(m)) => (0, m),
        (None, None) => return Err(UsageError("pass --n N or --nmax N".into())),
        (Some(_), Some(_)) => {
            return Err(UsageError("--n and --nmax are mutually exclusive".into()))
        }
    };
    let counts = t_counts(k, hi);
    match format_for(cli, Format::Text, true)? {
        Format::Text => {
            for n in lo..=hi {
                println!("t_{k}({n}) = {}", counts[n as usize]);
            }
        }
        Format::Json => {
            let doc = json!({
                "k": k,
                "counts": (lo..=hi)
                    .map(|n| json!({ "n": n, "count": counts[n as usize].to_string() }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Csv => {
            println!("n,count");
            for n in lo..=hi {
                println!("{n},{}", counts[n as usize]);
            }
        }
    }
    Ok(true)
}

fn cmd_asympt(cli: &Cli, k: u32, nmax: u64) -> CmdResult {
    check_k(k)?;
    let rows = asymptotic_report(k, nmax);
    match format_for(cli, Format::Csv, true)? {
        Format::Csv => {
            println!("n,exact,main_term,ratio,cusp_coeff");
            for row in &rows {
                println!(
                    "{},{},{},{:.12},{}",
                    row.n, row.exact, row.main_term, row.ratio, row.cusp_coeff
                );
            }
        }
        Format::Json => {
            let doc = json!({
                "k": k,
                "rows": rows.iter().map(|row| json!({
                    "n": row.n,
                    "exact": row.exact.to_string(),
                    "main_term": row.main_term.to_string(),
                    "ratio": row.ratio,
                    "cusp_coeff": row.cusp_coeff.to_string(),
                })).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Text => {
            for row in &rows {
                println!(
                    "n = {:4}: t = {}, main = {}, ratio = {:.6}",
                    row.n, row.exact, row.main_term, row.ratio
                );
            }
        }
    }
    Ok(true)
}

fn cmd_suite(cli: &Cli, k_max: u32) -> CmdResult {
    if k_max < 1 {
        return Err(UsageError("--k-max must be at least 1".into()));
    }
    let results = run_all(k_max);
    let all_pass = results.iter().all(|r| r.pass);
    match format_for(cli, Format::Text, false)? {
        Format::Text => {
            for r in &results {
                println!("{}", r.summary_line());
            }
            let passed = results.iter().filter(|r| r.pass).count();
            println!(
                "suite {}: {passed}/{} checks passed",
                if all_pass { "PASS" } else { "FAIL" },
                results.len()
            );
        }
        Format::Json => {
            let doc = json!({
                "k_max": k_max,
                "all_pass": all_pass,
                "results": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
        }
        Format::Csv => unreachable!(),
    }
    Ok(all_pass)
}

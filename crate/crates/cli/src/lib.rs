//! Spec-file format and command implementations behind the `ainf` binary.

pub mod commands;
pub mod corpus_files;
pub mod format;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use ainf_core::modfun::diagrams::Which;
use clap::{Parser, Subcommand};

use commands::{ComplexKind, Formulation, RelativeArgs};
use report::{Exit, Report};

/// Environment variable holding the default truncation length.
pub const MAX_LEN_VAR: &str = "AINF_MAX_LEN";
pub const DEFAULT_MAX_LEN: usize = 3;

#[derive(Parser, Debug)]
#[command(name = "ainf", about = "Finite A-infinity categories over F2: validation, Hochschild homology, Calabi-Yau checks")]
struct Cli {
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Truncation length (defaults to $AINF_MAX_LEN, else 3).
    #[arg(long, global = true)]
    max_len: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a spec file and run the matching relation validator.
    Validate { path: PathBuf },
    /// Print the canonical form of a spec file.
    Fmt { path: PathBuf },
    /// Homology of a hom or Hochschild complex, with a probe at L+1.
    Homology {
        path: PathBuf,
        #[arg(long, default_value = "cc-chains")]
        complex: String,
        /// `diag`, `dual`, `zero`, or a bimodule reference.
        #[arg(long, default_value = "diag")]
        coeff: String,
    },
    /// Decide whether a pairing candidate is weak Calabi-Yau.
    CheckCy {
        path: PathBuf,
        #[arg(long)]
        pairing: PathBuf,
        #[arg(long, default_value = "bimodule")]
        form: String,
        #[arg(long)]
        cross_check: bool,
    },
    /// Run the relative pipeline for a functor B -> A[j].
    CheckRelative {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        functor: PathBuf,
        /// Bimodule reference for the relative diagonal.
        #[arg(long)]
        rel: String,
        /// Morphism file, or `canonical`.
        #[arg(long)]
        irel: String,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long)]
        sigma_b: Option<PathBuf>,
    },
    /// Check one of the four commuting diagrams on random instances.
    Diagram {
        #[arg(long)]
        which: String,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Write a corpus entry (or `all`) as spec files.
    Corpus {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_max_len() -> Result<usize, String> {
    match std::env::var(MAX_LEN_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{MAX_LEN_VAR}={v:?} is not a length")),
        Err(_) => Ok(DEFAULT_MAX_LEN),
    }
}

/// Runs the command line and returns the exit code; output goes to the
/// given writers.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Input as i32 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let l = match cli.max_len.map_or_else(default_max_len, Ok) {
        Ok(l) => l,
        Err(e) => return finish(Report::input_error("ainf", e), cli.json, out, err),
    };
    let report = match cli.cmd {
        Cmd::Validate { path } => commands::validate(&path, l),
        Cmd::Fmt { path } => match commands::fmt(&path) {
            Ok(text) => {
                let _ = write!(out, "{text}");
                return 0;
            }
            Err(r) => r,
        },
        Cmd::Homology { path, complex, coeff } => match ComplexKind::parse(&complex) {
            Some(k) => commands::homology(&path, k, &coeff, l),
            None => Report::input_error("homology", format!("unknown complex {complex:?}")),
        },
        Cmd::CheckCy { path, pairing, form, cross_check } => match Formulation::parse(&form) {
            Some(f) => commands::check_cy(&path, &pairing, f, cross_check, l),
            None => Report::input_error("check-cy", format!("unknown formulation {form:?}")),
        },
        Cmd::CheckRelative { a, b, functor, rel, irel, phi, sigma, sigma_b } => {
            let args = RelativeArgs { a: &a, b: &b, functor: &functor, rel: &rel, irel: &irel, phi: phi.as_deref(), sigma: sigma.as_deref(), sigma_b: sigma_b.as_deref() };
            commands::check_relative(&args, l)
        }
        Cmd::Diagram { which, paths, samples, seed, arity } => match Which::parse(&which) {
            Some(w) => commands::diagram(w, &paths, samples, seed, arity),
            None => Report::input_error("diagram", format!("unknown diagram {which:?}")),
        },
        Cmd::Corpus { name, out: dir } => commands::emit_corpus(&name, &dir),
    };
    finish(report, cli.json, out, err)
}

fn finish(r: Report, json: bool, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&r.to_json()).expect("report serializes"));
    } else {
        let text = r.to_text();
        let _ = if r.exit_code() == Exit::Input { write!(err, "{text}") } else { write!(out, "{text}") };
    }
    r.exit_code() as i32
}

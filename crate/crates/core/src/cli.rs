//! The `motiondual` command line.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a
//! verification fails.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chains::{self, ChainCertificate};
use crate::constants::{self, ConstantsError, ConstantsReport};
use crate::dualspace::{DualModel, PointSet};
use crate::primal::{self, MergeCertificate, StarGraph};
use crate::signatures::{self, Signature};
use crate::verify::{self, default_bound, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "motiondual",
    version,
    about = "Dual-space invariants and derivation constants of the motion groups R^N x| SO(N)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    /// Class points and germs with `~`.
    Dual,
    /// Germ ideals and line kernels with `*`.
    Sub,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    #[arg(long)]
    pub n: u32,
    /// Truncation bound on `m_1` (default 3 for N <= 9, else 1).
    #[arg(long)]
    pub bound: Option<u32>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constants table for one N, cross-checked on a truncated model.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Export the `~` graph of the dual or the `*` graph of Sub(A).
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "dual")]
        kind: GraphKind,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Class-restricted distance between two SO(N) signatures.
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        from: String,
        #[arg(allow_hyphen_values = true)]
        to: String,
        /// Also report the walk upper bound and chain lower bound.
        #[arg(long)]
        certificates: bool,
    },
    /// An explicit `~`-walk between two SO(N) signatures.
    Walk {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        from: String,
        #[arg(allow_hyphen_values = true)]
        to: String,
    },
    /// An admissible chain certifying a distance lower bound.
    Chain {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        from: String,
        #[arg(allow_hyphen_values = true)]
        to: String,
        /// Chain length (default: the distance).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Merge certificate for three SO(N-1) signatures.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        sigma1: String,
        #[arg(allow_hyphen_values = true)]
        sigma2: String,
        #[arg(allow_hyphen_values = true)]
        sigma3: String,
    },
    /// Re-check a chain certificate file.
    CheckChain { file: PathBuf },
    /// Re-check a merge certificate file.
    CheckCert { file: PathBuf },
    /// Run every check over a range of N.
    Verify {
        #[arg(long, default_value_t = 3)]
        n_min: u32,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (falls back to MOTIONDUAL_JOBS).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

type CmdResult = Result<String, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("values serialize") + "\n"
}

fn bound_for(common: &Common, sigs: &[&Signature]) -> u32 {
    let needed = sigs.iter().map(|s| s.max_abs()).max().unwrap_or(0) as u32;
    common
        .bound
        .unwrap_or_else(|| default_bound(common.n))
        .max(needed)
}

fn emit(common_output: &Option<PathBuf>, text: String) -> CmdResult {
    match common_output {
        Some(path) => {
            fs::write(path, &text).map_err(usage)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn cmd_report(common: &Common, format: Format) -> CmdResult {
    let n = common.n;
    let result = if n == 2 {
        constants::predict(n)
    } else {
        constants::cross_check(n, common.bound.unwrap_or_else(|| default_bound(n)))
    };
    let (report, failed): (ConstantsReport, bool) = match result {
        Ok(r) => (r, false),
        Err(ConstantsError::Failed(r)) => (*r, true),
        Err(e) => return Err(usage(e)),
    };
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Table => constants::render_table(std::slice::from_ref(&report)),
        Format::Dot => return Err(usage("report supports table or json")),
    };
    if failed {
        if let Some(p) = &common.output {
            let _ = fs::write(p, &text);
        }
        return Err(Failure::Verification(text));
    }
    emit(&common.output, text)
}

fn cmd_graph(common: &Common, kind: GraphKind, format: Format) -> CmdResult {
    let bound = common.bound.unwrap_or_else(|| default_bound(common.n));
    let text = match kind {
        GraphKind::Dual => {
            let m = DualModel::build(common.n, bound).map_err(usage)?;
            match format {
                Format::Dot => m.to_dot(),
                _ => json(&m.export()),
            }
        }
        GraphKind::Sub => {
            let g = StarGraph::build(common.n, bound).map_err(usage)?;
            match format {
                Format::Dot => g.to_dot(),
                _ => json(&g.export()),
            }
        }
    };
    emit(&common.output, text)
}

fn parse_pair(common: &Common, a: &str, b: &str) -> Result<(Signature, Signature), Failure> {
    Ok((
        Signature::parse(a, common.n).map_err(usage)?,
        Signature::parse(b, common.n).map_err(usage)?,
    ))
}

#[derive(Serialize)]
struct DistanceAnswer {
    n: u32,
    bound: u32,
    from: Signature,
    to: Signature,
    distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    walk_upper_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain_lower_bound: Option<usize>,
}

fn cmd_distance(common: &Common, from: &str, to: &str, certificates: bool) -> CmdResult {
    let (a, b) = parse_pair(common, from, to)?;
    let bound = bound_for(common, &[&a, &b]);
    let m = DualModel::build(common.n, bound).map_err(usage)?;
    let d = m.class_distance(&a, &b).map_err(usage)?;
    let mut ans = DistanceAnswer {
        n: common.n,
        bound,
        from: a.clone(),
        to: b.clone(),
        distance: d,
        walk_upper_bound: None,
        chain_lower_bound: None,
    };
    if certificates {
        let w = signatures::walk(&a, &b).map_err(usage)?;
        w.validate()
            .map_err(|e| Failure::Verification(e.to_string()))?;
        ans.walk_upper_bound = Some(w.len());
        if let Some(d) = d.filter(|&d| d >= 2) {
            let (x, y) = (
                m.class_point(&a).map_err(usage)?,
                m.class_point(&b).map_err(usage)?,
            );
            let chain = chains::find_admissible_chain(
                &m,
                &PointSet::from([x]),
                &PointSet::from([y]),
                d,
                true,
            )
            .map_err(|e| Failure::Verification(e.to_string()))?;
            let lb = chains::chain_lower_bound(&m, &chain, x, y, true)
                .map_err(|e| Failure::Verification(e.to_string()))?;
            ans.chain_lower_bound = Some(lb);
        }
    }
    let text = match (common.output.is_some(), d) {
        (true, _) => json(&ans),
        (false, Some(d)) if !certificates => format!("{d}\n"),
        (false, None) if !certificates => "inf\n".to_string(),
        _ => json(&ans),
    };
    emit(&common.output, text)
}

fn cmd_walk(common: &Common, from: &str, to: &str) -> CmdResult {
    let (a, b) = parse_pair(common, from, to)?;
    let w = signatures::walk(&a, &b).map_err(usage)?;
    w.validate()
        .map_err(|e| Failure::Verification(e.to_string()))?;
    emit(&common.output, json(&w))
}

fn cmd_chain(common: &Common, from: &str, to: &str, k: Option<usize>) -> CmdResult {
    let (a, b) = parse_pair(common, from, to)?;
    let bound = bound_for(common, &[&a, &b]);
    let m = DualModel::build(common.n, bound).map_err(usage)?;
    let (x, y) = (
        m.class_point(&a).map_err(usage)?,
        m.class_point(&b).map_err(usage)?,
    );
    let d = m.distance(x, y, true).map_err(usage)?;
    let k = k
        .or(d)
        .ok_or_else(|| usage("endpoints are in different components"))?;
    let chain =
        chains::find_admissible_chain(&m, &PointSet::from([x]), &PointSet::from([y]), k, true)
            .map_err(usage)?;
    let cert = ChainCertificate {
        n: common.n,
        bound,
        restrict_to_class: true,
        x,
        y,
        chain,
    };
    cert.check()
        .map_err(|e| Failure::Verification(e.to_string()))?;
    emit(&common.output, json(&cert))
}

#[derive(Serialize)]
struct Certified<'a> {
    certificate: &'a MergeCertificate,
    report: primal::CertificateReport,
}

fn cmd_certify(common: &Common, sigmas: &[String]) -> CmdResult {
    let n = common.n;
    if n < 3 {
        return Err(usage(format!("certify needs N >= 3, got {n}")));
    }
    let s: Vec<Signature> = sigmas
        .iter()
        .map(|t| Signature::parse(t, n - 1))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let cert = primal::merge_certificate(n, &s[0], &s[1], &s[2]).map_err(usage)?;
    let report = primal::validate_certificate(&cert);
    let valid = report.is_valid();
    let text = json(&Certified {
        certificate: &cert,
        report,
    });
    if !valid {
        return Err(Failure::Verification(text));
    }
    emit(&common.output, text)
}

fn read(file: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn cmd_check_chain(file: &PathBuf) -> CmdResult {
    let cert: ChainCertificate = serde_json::from_str(&read(file)?).map_err(usage)?;
    match cert.check() {
        Ok(k) => Ok(format!("valid chain certificate: d >= {k}\n")),
        Err(e) => Err(Failure::Verification(format!(
            "invalid chain certificate: {e}\n"
        ))),
    }
}

fn cmd_check_cert(file: &PathBuf) -> CmdResult {
    let text = read(file)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(usage)?;
    // accept both a bare certificate and the output of `certify`
    let inner = value.get("certificate").cloned().unwrap_or(value);
    let cert: MergeCertificate = serde_json::from_value(inner).map_err(usage)?;
    let report = primal::validate_certificate(&cert);
    if report.is_valid() {
        Ok(format!(
            "valid merge certificate: K(M(A)) <= {}\n",
            report.implied_k_bound.map_or("-".into(), |k| k.to_string())
        ))
    } else {
        Err(Failure::Verification(json(&report)))
    }
}

fn cmd_verify(cfg: VerifyConfig) -> CmdResult {
    let summary = verify::run_sweep(&cfg).map_err(usage)?;
    let text = summary.render();
    if summary.passed() {
        Ok(text)
    } else {
        Err(Failure::Verification(text))
    }
}

fn jobs_from_env() -> Option<usize> {
    std::env::var("MOTIONDUAL_JOBS").ok()?.trim().parse().ok()
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Report { common, format } => cmd_report(&common, format),
        Command::Graph {
            common,
            kind,
            format,
        } => cmd_graph(&common, kind, format),
        Command::Distance {
            common,
            from,
            to,
            certificates,
        } => cmd_distance(&common, &from, &to, certificates),
        Command::Walk { common, from, to } => cmd_walk(&common, &from, &to),
        Command::Chain {
            common,
            from,
            to,
            k,
        } => cmd_chain(&common, &from, &to, k),
        Command::Certify {
            common,
            sigma1,
            sigma2,
            sigma3,
        } => cmd_certify(&common, &[sigma1, sigma2, sigma3]),
        Command::CheckChain { file } => cmd_check_chain(&file),
        Command::CheckCert { file } => cmd_check_cert(&file),
        Command::Verify {
            n_min,
            n_max,
            bound,
            seed,
            jobs,
        } => cmd_verify(VerifyConfig {
            n_min,
            n_max,
            bound,
            seed,
            jobs: jobs.or_else(jobs_from_env),
        }),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verification(text)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = writeln!(err, "verification failed");
            EXIT_FAILED
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

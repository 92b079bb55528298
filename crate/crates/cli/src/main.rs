//! Command-line front end: compute polynomial families, build Gram matrices,
//! run the verification suites, and manage the on-disk result cache.
//!
//! Exit codes: 0 on success, 1 when a verification suite finds a violated
//! identity, 2 on usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use sqwhit_core::shapes::Partition;
use sqwhit_core::suites::{
    compute_family, gram_matrix, run_suite, GramKind, Report, SuiteConfig, SuiteKind,
};
use sqwhit_core::{Ctx, Error, GradedSeries};

mod params;

use params::ParamsMode;

#[derive(Parser)]
#[command(
    name = "sqwhit",
    version,
    about = "Exact spin q-Whittaker computations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a polynomial family member and emit canonical JSON.
    Compute(ComputeArgs),
    /// Build the Gram matrix of a family against its dual.
    Gram(GramArgs),
    /// Run a verification suite and report per-case outcomes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Family: f, F, Fstar, shl, G, Gbar, P, Pbar, qW.
    #[arg(long)]
    family: String,
    /// Shape, e.g. "[3,1]" (use "[]" for the empty partition).
    #[arg(long)]
    lambda: String,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Truncation cap for the graded series.
    #[arg(long = "D", default_value_t = 6)]
    cap: u32,
    /// "symbolic" or a JSON file with rational parameter values.
    #[arg(long, default_value = "symbolic")]
    params: String,
    /// Cache directory (falls back to SQWHIT_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct GramArgs {
    /// Kind: sqw, qw, grothendieck, interpolation, shl.
    #[arg(long)]
    kind: String,
    /// Box bounds "L,M".
    #[arg(long = "box", default_value = "2,2")]
    box_: String,
    #[arg(long)]
    n: usize,
    #[arg(long = "D", default_value_t = 6)]
    cap: u32,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (orthogonality, cauchy, dual-cauchy, pieri, eigen, shift,
    /// reverse, stability, shl-orthogonality, adjoint, grothendieck,
    /// interpolation, lemmas).
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Box bounds "L,M" (0,0 = suite default).
    #[arg(long = "box", default_value = "0,0")]
    box_: String,
    #[arg(long = "D", default_value_t = 0)]
    cap: u32,
    /// Deterministic PRNG seed for point sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "json")]
    format: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Gram(args) => cmd_gram(args),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn parse_box(s: &str) -> Result<(u32, u32), Error> {
    let (l, m) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidInput(format!("box must look like L,M: {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| Error::InvalidInput(format!("bad box bound {t:?}: {e}")))
    };
    Ok((parse(l)?, parse(m)?))
}

fn configure_jobs(jobs: usize) {
    if jobs > 0 {
        // a later duplicate configuration attempt is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

fn emit(
    out: &OutArgs,
    json: &serde_json::Value,
    csv: impl FnOnce() -> String,
) -> Result<(), Error> {
    let body = match out.format.as_str() {
        "json" => serde_json::to_string_pretty(json).expect("serializable") + "\n",
        "csv" => csv(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown format {other:?} (expected json or csv)"
            )))
        }
    };
    match &out.out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| Error::InvalidInput(format!("cannot write {path:?}: {e}")))?;
        }
        None => {
            print!("{body}");
            std::io::stdout().flush().ok();
        }
    }
    Ok(())
}

/// Flatten a series to `monomial=coefficient;...` for spreadsheet diffing.
fn flatten_series(s: &GradedSeries, ctx: &std::sync::Arc<Ctx>) -> String {
    if s.num_terms() == 0 {
        return "0".into();
    }
    s.iter_terms()
        .map(|(e, c)| {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let sym = ctx.alphabet.symbol(i);
                    if k == 1 {
                        sym.to_string()
                    } else {
                        format!("{sym}^{k}")
                    }
                })
                .collect();
            let name = if mono.is_empty() {
                "1".to_string()
            } else {
                mono.join("*")
            };
            format!("{name}={c}")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_compute(args: ComputeArgs) -> Result<ExitCode, Error> {
    let lam = Partition::parse(&args.lambda)?;
    let mode = ParamsMode::parse(&args.params)?;
    if args.n == 0 {
        return Err(Error::InvalidInput("--n must be positive".into()));
    }
    let key = serde_json::json!({
        "family": args.family,
        "lambda": lam.parts(),
        "n": args.n,
        "D": args.cap,
        "params": mode.fingerprint(),
    });
    let cache_dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("SQWHIT_CACHE_DIR").map(PathBuf::from));
    if let Some(dir) = &cache_dir {
        if let Some(bytes) = cache_get(dir, &key) {
            match &args.out.out {
                Some(path) => std::fs::write(path, &bytes)
                    .map_err(|e| Error::InvalidInput(format!("cannot write {path:?}: {e}")))?,
                None => {
                    std::io::stdout().write_all(&bytes).ok();
                }
            }
            return Ok(ExitCode::SUCCESS);
        }
    }
    let (poly, ctx) = match &mode {
        ParamsMode::Symbolic => compute_family(&args.family, &lam, args.n, args.cap)?,
        ParamsMode::File(values) => values.compute(&args.family, &lam, args.n, args.cap)?,
    };
    let json = serde_json::json!({
        "family": args.family,
        "lambda": lam.parts(),
        "n": args.n,
        "D": args.cap,
        "poly": poly.to_json(&ctx),
    });
    if let Some(dir) = &cache_dir {
        let bytes = serde_json::to_string_pretty(&json).expect("serializable") + "\n";
        cache_put(dir, &key, bytes.as_bytes());
    }
    emit(&args.out, &json, || {
        let mut s = String::from("mu,value\n");
        for (mu, c) in poly.iter_terms() {
            s.push_str(&format!("\"{}\",\"{}\"\n", mu, flatten_series(c, &ctx)));
        }
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cache_path(dir: &Path, key: &serde_json::Value) -> PathBuf {
    let digest = Sha256::digest(key.to_string().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("{hex}.json"))
}

fn cache_get(dir: &Path, key: &serde_json::Value) -> Option<Vec<u8>> {
    let path = cache_path(dir, key);
    let bytes = std::fs::read(&path).ok()?;
    // a corrupt entry is recomputed and overwritten
    if serde_json::from_slice::<serde_json::Value>(&bytes).is_err() {
        eprintln!("warning: corrupt cache entry {path:?}; recomputing");
        return None;
    }
    Some(bytes)
}

fn cache_put(dir: &Path, key: &serde_json::Value, bytes: &[u8]) {
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let path = cache_path(dir, key);
    let tmp = dir.join(format!(".tmp-{}", std::process::id()));
    if std::fs::write(&tmp, bytes).is_ok() {
        // last writer wins; rename is atomic on the same filesystem
        let _ = std::fs::rename(&tmp, &path);
    }
}

fn cmd_gram(args: GramArgs) -> Result<ExitCode, Error> {
    configure_jobs(args.jobs);
    let kind = GramKind::parse(&args.kind)?;
    let (l, m) = parse_box(&args.box_)?;
    if args.n == 0 {
        return Err(Error::InvalidInput("--n must be positive".into()));
    }
    let gram = gram_matrix(kind, l, m, args.n, args.cap)?;
    let json = gram.to_json();
    emit(&args.out, &json, || {
        let mut s = String::from("lam,mu,value\n");
        for (lam, mu, v) in &gram.entries {
            s.push_str(&format!(
                "\"{}\",\"{}\",\"{}\"\n",
                lam,
                mu,
                flatten_series(v, &gram.ctx)
            ));
        }
        for (lam, v) in &gram.norms {
            s.push_str(&format!(
                "\"{}\",norm,\"{}\"\n",
                lam,
                flatten_series(v, &gram.ctx)
            ));
        }
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    configure_jobs(args.jobs);
    let suite = SuiteKind::parse(&args.suite)?;
    let (l, m) = parse_box(&args.box_)?;
    let cfg = SuiteConfig {
        suite,
        n: args.n,
        box_l: l,
        box_m: m,
        cap: args.cap,
        seed: args.seed,
    };
    let start = Instant::now();
    let mut report: Report = run_suite(&cfg)?;
    report.wall_ms = Some(start.elapsed().as_millis() as u64);
    let pass = report.pass;
    let json = report.to_json();
    emit(&args.out, &json, || {
        let mut s = String::from("case,expected,got,pass\n");
        for c in &report.cases {
            s.push_str(&format!(
                "\"{}\",\"{}\",\"{}\",{}\n",
                c.case, c.expected, c.got, c.pass
            ));
        }
        s
    })?;
    if pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgGroup, Parser, Subcommand};

use sectobs::ellrank::DescentBounds;
use sectobs::pipeline::{
    analyze, cache_dir_from_env, emit_certificate, load_certificate, search_family, verify_certificate,
    AnalyzeOptions, CurveInput, SearchOptions,
};

#[derive(Parser)]
#[command(name = "sectobs", version, about = "Local-global checks for bielliptic genus 2 curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one curve and emit its certificate.
    #[command(group(ArgGroup::new("input").required(true).args(["family", "coeffs"])))]
    Analyze {
        /// `p,a` for Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a).
        #[arg(long, allow_hyphen_values = true)]
        family: Option<String>,
        /// `f6,f5,f4,f3,f2,f1,f0`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// Naive height bound for points on the elliptic quotients.
        #[arg(long, default_value_t = DescentBounds::default().height)]
        height_bound: i64,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the family over primes p = 7 mod 8 and a range of a.
    Search {
        #[arg(long)]
        pmax: u64,
        #[arg(long, allow_hyphen_values = true)]
        amin: i64,
        #[arg(long, allow_hyphen_values = true)]
        amax: i64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Per-pair certificate cache; `SECTOBS_CACHE` takes precedence.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Write `rows.json` and one certificate per pair here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-validate a certificate from its evidence.
    Verify { file: PathBuf },
}

/// Errors returned here are input problems (bad curves, parameters, paths or
/// certificates); defects surface as panics.
fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Analyze { family, coeffs, height_bound, out } => {
            if height_bound < 1 {
                bail!("--height-bound must be positive");
            }
            let input_spec = match (family, coeffs) {
                (Some(f), None) => CurveInput::parse_family(&f)?,
                (None, Some(c)) => CurveInput::parse_coeffs(&c),
                _ => unreachable!("clap enforces exactly one input"),
            };
            let curve = input_spec.curve()?;
            let mut opts = AnalyzeOptions::default();
            opts.bounds.height = height_bound;
            let cert = analyze(&curve, opts);
            eprintln!("{}: {} ({})", cert.curve.equation, cert.verdicts.status, cert.verdicts.reason);
            match out {
                Some(path) => emit_certificate(&cert, &path).context("writing certificate")?,
                None => print!("{}", cert.to_canonical_json()),
            }
        }
        Cmd::Search { pmax, amin, amax, jobs, cache, out } => {
            let opts = SearchOptions { analyze: AnalyzeOptions::default(), jobs, cache: cache_dir_from_env().or(cache) };
            let found = search_family(pmax, amin, amax, &opts)?;
            for r in &found.rows {
                println!("{:>3} {:>4}  {:<20} {}", r.p, r.a, r.status.as_str(), r.reason);
            }
            let certified = found.certified();
            println!("certified: {certified:?}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                for (row, cert) in found.rows.iter().zip(&found.certificates) {
                    emit_certificate(cert, &dir.join(&row.certificate))?;
                }
                let rows = serde_json::to_string_pretty(&found.rows).context("serializing rows")?;
                fs::write(dir.join("rows.json"), rows + "\n").context("writing rows.json")?;
            }
        }
        Cmd::Verify { file } => {
            let cert = load_certificate(&file)?;
            let rep = verify_certificate(&cert);
            for c in &rep.checks {
                println!("{} {}{}", if c.ok { "ok  " } else { "FAIL" }, c.name, if c.ok { String::new() } else { format!(": {}", c.detail) });
            }
            if !rep.ok() {
                bail!("{} check(s) failed", rep.failures().len());
            }
            println!("verified: {} ({})", cert.verdicts.status, cert.verdicts.reason);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        // the panic message has already been printed
        Err(_) => ExitCode::from(2),
    }
}

//! Command-line front end: `riesz`, `ornstein`, `selftest`, `weyl`.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 validation error,
//! 3 quadrature did not converge (outputs are still written and flagged),
//! 4 search cap exceeded.
//!
//! Every output file embeds the fully resolved configuration and a
//! format-version marker; outputs are byte-deterministic for a fixed
//! configuration and seed, independent of the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qtorus::algebra::trace;
use qtorus::error::{Error, Result};
use qtorus::experiments::{
    ornstein_sweep, records_to_csv, weyl_rescale, SweepConfig, ThetaPoint,
};
use qtorus::reps::{schatten_norms, GridPolicy, NormSelection};
use qtorus::riesz::{riesz_product, spectrum_sets, FrequencySchedule};
use qtorus::selftest::run_selftest;
use qtorus::theta::FixedTheta;

const FORMAT_VERSION: u32 = 1;

const EXIT_OK: i32 = 0;
const EXIT_SELFTEST_FAILED: i32 = 1;
const EXIT_VALIDATION: i32 = 2;
const EXIT_NOT_CONVERGED: i32 = 3;
const EXIT_SEARCH_CAP: i32 = 4;

#[derive(Parser)]
#[command(
    name = "qtorus",
    version,
    about = "Riesz products on the quantum torus: construction, norms, experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one Riesz product and report its spectrum, coefficients and norms
    Riesz(RieszArgs),
    /// Sweep the L^1 norms of the second derivatives of W over theta and N
    Ornstein(OrnsteinArgs),
    /// Run the seeded invariant, lemma and oracle suites
    Selftest(SelftestArgs),
    /// Find the smallest M0 with dist(M0^2 theta, Z) < theta0
    Weyl(WeylArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn wants_json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Args)]
struct RieszArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Geometric frequency ratio (>= 3)
    #[arg(long)]
    ratio: Option<i64>,
    /// Number of factors
    #[arg(long = "N")]
    n: Option<usize>,
    /// Rotation angle: "p/q", a decimal, or "sqrt2m1" / "golden"
    #[arg(long)]
    theta: Option<String>,
    /// Largest denominator for the rational surrogate of an irrational angle
    #[arg(long)]
    q_max: Option<i64>,
    /// Comma-separated subset of l1,l2,op (or "all")
    #[arg(long)]
    norms: Option<String>,
    /// Relative quadrature tolerance between grid doublings
    #[arg(long)]
    grid_tol: Option<f64>,
    /// Hard cap on the quadrature grid size
    #[arg(long)]
    grid_max: Option<usize>,
    /// Output format for the coefficient dump
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RieszFile {
    ratio: Option<i64>,
    n: Option<usize>,
    theta: Option<String>,
    q_max: Option<i64>,
    norms: Option<String>,
    grid_tol: Option<f64>,
    grid_max: Option<usize>,
    format: Option<String>,
    out: Option<String>,
}

#[derive(Serialize, Clone)]
struct RieszConfig {
    ratio: i64,
    n: usize,
    theta: String,
    theta_resolved: String,
    q_max: i64,
    norms: String,
    grid_tol: f64,
    grid_max: usize,
    format: OutputFormat,
    out: String,
}

#[derive(Args)]
struct OrnsteinArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Geometric frequency ratio (>= 3)
    #[arg(long)]
    ratio: Option<i64>,
    /// Largest number of factors; every N = 1..N_max is swept
    #[arg(long = "N")]
    n: Option<usize>,
    /// Rotation angles (repeatable): "p/q", decimals, "sqrt2m1", "golden"
    #[arg(long)]
    theta: Vec<String>,
    /// Largest denominator for rational surrogates of irrational angles
    #[arg(long)]
    q_max: Option<i64>,
    /// Relative quadrature tolerance between grid doublings
    #[arg(long)]
    grid_tol: Option<f64>,
    /// Hard cap on the quadrature grid size
    #[arg(long)]
    grid_max: Option<usize>,
    /// Output format for the sweep records
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Also emit a plotting-tool-agnostic data file and a script stub
    #[arg(long)]
    plot_stub: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OrnsteinFile {
    ratio: Option<i64>,
    n: Option<usize>,
    theta: Option<Vec<String>>,
    q_max: Option<i64>,
    grid_tol: Option<f64>,
    grid_max: Option<usize>,
    format: Option<String>,
    plot_stub: Option<bool>,
    out: Option<String>,
}

#[derive(Serialize, Clone)]
struct OrnsteinConfig {
    ratio: i64,
    n_max: usize,
    thetas: Vec<String>,
    thetas_resolved: Vec<String>,
    q_max: i64,
    grid_tol: f64,
    grid_max: usize,
    format: OutputFormat,
    plot_stub: bool,
    out: String,
}

#[derive(Args)]
struct SelftestArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed for the randomized suites
    #[arg(long)]
    seed: Option<u64>,
    /// Reduced trial counts
    #[arg(long)]
    quick: bool,
    /// Optional file for the JSON summary (also printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SelftestFile {
    seed: Option<u64>,
    quick: Option<bool>,
    out: Option<String>,
}

#[derive(Args)]
struct WeylArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rotation angle: a decimal, "p/q", or "sqrt2m1" / "golden"
    #[arg(long)]
    theta: Option<String>,
    /// Equidistribution threshold in (0, 1/2)
    #[arg(long)]
    theta0: Option<f64>,
    /// Search cap on M0
    #[arg(long)]
    cap: Option<u64>,
    /// Optional file for the JSON report (also printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct WeylFile {
    theta: Option<String>,
    theta0: Option<f64>,
    cap: Option<u64>,
    out: Option<String>,
}

#[derive(Serialize, Clone)]
struct WeylConfig {
    theta: String,
    theta0: f64,
    cap: u64,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Riesz(args) => cmd_riesz(args),
        Cmd::Ornstein(args) => cmd_ornstein(args),
        Cmd::Selftest(args) => cmd_selftest(args),
        Cmd::Weyl(args) => cmd_weyl(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SearchCapExceeded(_) => EXIT_SEARCH_CAP,
                _ => EXIT_VALIDATION,
            }
        }
    }
}

fn load_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
        None => Ok(T::default()),
    }
}

/// "p/q" exactly, an integer, a decimal, or a named constant; irrational
/// inputs are pinned to their best convergent with q <= q_max.
fn parse_theta_point(s: &str, q_max: i64) -> Result<ThetaPoint> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| Error::ThetaParse(s.into()))?;
        let q: i64 = q.trim().parse().map_err(|_| Error::ThetaParse(s.into()))?;
        if q < 1 {
            return Err(Error::InvalidModulus(q));
        }
        return Ok(ThetaPoint::rational(p.rem_euclid(q), q));
    }
    if let Ok(n) = s.parse::<i64>() {
        // any integer is 0 mod 1
        let _ = n;
        return Ok(ThetaPoint::rational(0, 1));
    }
    let fixed = FixedTheta::named(s).or_else(|_| FixedTheta::from_decimal_str(s))?;
    Ok(ThetaPoint::from_fixed(&fixed, q_max, s))
}

fn parse_norm_selection(s: &str) -> Result<NormSelection> {
    if s == "all" {
        return Ok(NormSelection::all());
    }
    let mut sel = NormSelection {
        l1: false,
        l2: false,
        op: false,
    };
    for part in s.split(',') {
        match part.trim() {
            "l1" => sel.l1 = true,
            "l2" => sel.l2 = true,
            "op" => sel.op = true,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown norm '{other}' (expected l1, l2, op or all)"
                )))
            }
        }
    }
    if !(sel.l1 || sel.l2 || sel.op) {
        return Err(Error::InvalidConfig("empty norm selection".into()));
    }
    Ok(sel)
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        "both" => Ok(OutputFormat::Both),
        other => Err(Error::InvalidConfig(format!(
            "unknown format '{other}' (expected csv, json or both)"
        ))),
    }
}

fn csv_preamble<C: Serialize>(config: &C) -> String {
    let cfg = serde_json::to_string(config).expect("serializable config");
    format!("# format_version: {FORMAT_VERSION}\n# config: {cfg}\n")
}

fn json_document<C: Serialize>(config: &C, payload: serde_json::Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("format_version".into(), FORMAT_VERSION.into());
    doc.insert(
        "config".into(),
        serde_json::to_value(config).expect("serializable config"),
    );
    match payload {
        serde_json::Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("payload".into(), other);
        }
    }
    let mut text =
        serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("serializable");
    text.push('\n');
    text
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn cmd_riesz(args: RieszArgs) -> Result<i32> {
    let file: RieszFile = load_config(&args.config)?;
    let ratio = args.ratio.or(file.ratio).unwrap_or(3);
    let n = args.n.or(file.n).unwrap_or(2);
    let theta_str = args.theta.or(file.theta).unwrap_or_else(|| "0".into());
    let q_max = args.q_max.or(file.q_max).unwrap_or(64);
    let norms_str = args.norms.or(file.norms).unwrap_or_else(|| "all".into());
    let grid_tol = args.grid_tol.or(file.grid_tol).unwrap_or(1e-4);
    let grid_max = args.grid_max.or(file.grid_max).unwrap_or(8192);
    let format = match (args.format, file.format) {
        (Some(f), _) => f,
        (None, Some(s)) => parse_format(&s)?,
        (None, None) => OutputFormat::Both,
    };
    let out = args
        .out
        .or(file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qtorus-out"));

    let theta = parse_theta_point(&theta_str, q_max)?;
    let selection = parse_norm_selection(&norms_str)?;
    let config = RieszConfig {
        ratio,
        n,
        theta: theta_str,
        theta_resolved: theta.label.clone(),
        q_max,
        norms: norms_str,
        grid_tol,
        grid_max,
        format,
        out: out.display().to_string(),
    };

    let schedule = FrequencySchedule::geometric(ratio, n)?;
    let dm = theta.deformation()?;
    let rep = theta.rep()?;
    let p = riesz_product(&schedule, n, &dm, None)?;
    let spectrum = spectrum_sets(&schedule, n)?;
    let policy = GridPolicy {
        tol: grid_tol,
        g_max: grid_max,
        g0: None,
    };
    let report = schatten_norms(&p, &rep, selection, &policy)?;

    write_file(
        &out,
        "spectrum.csv",
        &format!("{}{}", csv_preamble(&config), spectrum.to_csv()),
    )?;
    if format.wants_json() {
        write_file(
            &out,
            "riesz_coeffs.json",
            &json_document(&config, serde_json::json!({ "polynomial": p.to_json() })),
        )?;
    }
    if format.wants_csv() {
        let mut csv = csv_preamble(&config);
        csv.push_str("alpha1,alpha2,re,im\n");
        for (alpha, c) in p.terms() {
            csv.push_str(&format!(
                "{},{},{:.17e},{:.17e}\n",
                alpha[0], alpha[1], c.re, c.im
            ));
        }
        write_file(&out, "riesz_coeffs.csv", &csv)?;
    }
    write_file(
        &out,
        "riesz_norms.json",
        &json_document(
            &config,
            serde_json::json!({ "report": serde_json::to_value(&report)? }),
        ),
    )?;

    println!(
        "riesz: theta = {}, N = {}, {} terms, trace = {:.3e}, grid = {}, converged = {}",
        theta.label,
        n,
        p.num_terms(),
        trace(&p).re,
        report.grid,
        report.converged
    );
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_ornstein(args: OrnsteinArgs) -> Result<i32> {
    let file: OrnsteinFile = load_config(&args.config)?;
    let ratio = args.ratio.or(file.ratio).unwrap_or(3);
    let n_max = args.n.or(file.n).unwrap_or(3);
    let theta_strs = if args.theta.is_empty() {
        file.theta.unwrap_or_else(|| vec!["0".into()])
    } else {
        args.theta
    };
    let q_max = args.q_max.or(file.q_max).unwrap_or(64);
    let grid_tol = args.grid_tol.or(file.grid_tol).unwrap_or(1e-4);
    let grid_max = args.grid_max.or(file.grid_max).unwrap_or(8192);
    let format = match (args.format, file.format) {
        (Some(f), _) => f,
        (None, Some(s)) => parse_format(&s)?,
        (None, None) => OutputFormat::Both,
    };
    let plot_stub = args.plot_stub || file.plot_stub.unwrap_or(false);
    let out = args
        .out
        .or(file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qtorus-out"));

    let thetas = theta_strs
        .iter()
        .map(|s| parse_theta_point(s, q_max))
        .collect::<Result<Vec<_>>>()?;
    let config = OrnsteinConfig {
        ratio,
        n_max,
        thetas: theta_strs,
        thetas_resolved: thetas.iter().map(|t| t.label.clone()).collect(),
        q_max,
        grid_tol,
        grid_max,
        format,
        plot_stub,
        out: out.display().to_string(),
    };

    let sweep = SweepConfig {
        ratio,
        n_max,
        thetas,
        grid: GridPolicy {
            tol: grid_tol,
            g_max: grid_max,
            g0: None,
        },
    };
    let records = ornstein_sweep(&sweep)?;
    let all_converged = records.iter().all(|r| r.converged);

    let csv_body = records_to_csv(&records);
    if format.wants_csv() {
        write_file(
            &out,
            "ornstein.csv",
            &format!("{}{}", csv_preamble(&config), csv_body),
        )?;
    }
    if format.wants_json() {
        write_file(
            &out,
            "ornstein.json",
            &json_document(
                &config,
                serde_json::json!({ "records": serde_json::to_value(&records)? }),
            ),
        )?;
    }
    if plot_stub {
        let tsv = csv_body.replace(',', "\t");
        write_file(&out, "plot_data.tsv", &tsv)?;
        write_file(&out, "plot_norms.py", PLOT_STUB)?;
    }

    println!(
        "ornstein: {} records, grids up to {}, converged = {}",
        records.len(),
        records.iter().map(|r| r.grid).max().unwrap_or(0),
        all_converged
    );
    Ok(if all_converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

const PLOT_STUB: &str = r#"#!/usr/bin/env python3
"""Plot the sweep norms against N, one line per theta.

Reads plot_data.tsv from the same directory. Requires matplotlib only at
plot time; the data file itself is tool-agnostic.
"""
import csv
import os
from collections import defaultdict

HERE = os.path.dirname(os.path.abspath(__file__))

def load():
    series = defaultdict(list)
    with open(os.path.join(HERE, "plot_data.tsv")) as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            series[row["theta"]].append((int(row["N"]), row))
    return series

def main():
    import matplotlib.pyplot as plt
    cols = ["norm_d1d1", "norm_d2d2", "norm_d1d2"]
    series = load()
    fig, axes = plt.subplots(1, len(cols), figsize=(5 * len(cols), 4))
    for ax, col in zip(axes, cols):
        for theta, rows in sorted(series.items()):
            rows.sort()
            ax.plot([n for n, _ in rows], [float(r[col]) for _, r in rows],
                    marker="o", label=theta)
        ax.set_xlabel("N")
        ax.set_ylabel(col)
        ax.legend(title="theta")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "ornstein.png"), dpi=150)
    print("wrote ornstein.png")

if __name__ == "__main__":
    main()
"#;

fn cmd_selftest(args: SelftestArgs) -> Result<i32> {
    let file: SelftestFile = load_config(&args.config)?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let quick = args.quick || file.quick.unwrap_or(false);
    let out = args.out.or(file.out.map(PathBuf::from));

    let summary = run_selftest(seed, quick);
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    print!("{text}");
    if let Some(path) = out {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(&path, &text)?;
    }
    Ok(if summary.all_passed {
        EXIT_OK
    } else {
        EXIT_SELFTEST_FAILED
    })
}

fn cmd_weyl(args: WeylArgs) -> Result<i32> {
    let file: WeylFile = load_config(&args.config)?;
    let theta_str = args
        .theta
        .or(file.theta)
        .ok_or_else(|| Error::InvalidConfig("weyl requires --theta".into()))?;
    let theta0 = args.theta0.or(file.theta0).unwrap_or(0.05);
    let cap = args.cap.or(file.cap).unwrap_or(1_000_000_000);
    let out = args.out.or(file.out.map(PathBuf::from));

    let theta = if let Some((p, q)) = theta_str.split_once('/') {
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|_| Error::ThetaParse(theta_str.clone()))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| Error::ThetaParse(theta_str.clone()))?;
        FixedTheta::from_rational(p, q)?
    } else {
        FixedTheta::named(&theta_str).or_else(|_| FixedTheta::from_decimal_str(&theta_str))?
    };
    let config = WeylConfig {
        theta: theta_str,
        theta0,
        cap,
    };

    let report = weyl_rescale(&theta, theta0, cap)?;
    println!("M0 = {}", report.m0);
    println!("theta_tilde = {:.12e}", report.theta_tilde);
    println!(
        "check: dist(M0^2 theta, Z) = {:.6e} < theta0 = {theta0}",
        report.theta_tilde.abs()
    );
    if report.rational_warning {
        println!("note: theta is exactly rational; the search is degenerate");
    }
    if let Some(path) = out {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let doc = json_document(
            &config,
            serde_json::json!({ "report": serde_json::to_value(&report)? }),
        );
        fs::write(&path, doc)?;
    }
    Ok(EXIT_OK)
}

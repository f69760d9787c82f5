//! Command-line front end: sweeps, verification suites, estimates, loop
//! dumps and manifest replay.
//!
//! Exit codes: `0` success, `1` verification or runtime failure, `2` usage
//! error (bad flags, or parameters the library rejects).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuits::{brute_force_circuits, chain_subadditivity_check, cluster_hops, max_disjoint_circuits};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::experiments::{
    coupled_slope_fit_min, half_loop_constant, loop_constant, run_sweep_with, sandwich_check, thread_pool,
    EstimateRecord, SlopeFit, Statistic, SweepOutcome, SweepPlan, DEFAULT_SCHEDULE,
};
use crate::fpp::{
    annulus_time, exhaustive_passage_time, passage_time, passage_time_bidirectional, path_time, point_to_ball_boundary,
    point_to_line, point_to_point, DEFAULT_MARGIN,
};
use crate::lattice::{ball0, boundary, SiteCoord};
use crate::loops::{trace_loops, write_loops_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fixed CSV header for estimate records.
pub const CSV_HEADER: &str = "statistic,n,k,samples,mean,std_error,seed";

#[derive(Debug, Parser)]
#[command(
    name = "fppsim",
    version,
    about = "Critical first-passage percolation on the triangular lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate one statistic over a scale schedule.
    Sweep(SweepArgs),
    /// Run invariant suites on seeded random configurations.
    Verify(VerifyArgs),
    /// Estimate μ and the loop constants from five sweeps.
    Estimate(EstimateArgs),
    /// Dump the interface loops of one sample as CSV.
    Loops(LoopsArgs),
    /// Rerun a sweep from its manifest and check the output digest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct Workers {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "FPPSIM_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_statistic)]
    stat: Statistic,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',', required = true)]
    schedule: Vec<u32>,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    /// Annulus exponent for annulus statistics (default 1).
    #[arg(long)]
    k: Option<u32>,
    /// Window blow-up factor for `a0n` and `b0n`.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: u32,
    /// Output file; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON records instead of CSV.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Duality,
    Oracle,
    Sandwich,
    Lipschitz,
    Subadditivity,
    All,
}

impl Suite {
    const EACH: [Suite; 5] = [
        Suite::Duality,
        Suite::Oracle,
        Suite::Sandwich,
        Suite::Lipschitz,
        Suite::Subadditivity,
    ];

    fn default_samples(self) -> u64 {
        match self {
            Suite::Duality => 200,
            Suite::Oracle => 10_000,
            _ => 100,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::Oracle => "oracle",
            Suite::Sandwich => "sandwich",
            Suite::Lipschitz => "lipschitz",
            Suite::Subadditivity => "subadditivity",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Configurations per suite (each suite has its own default).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SCHEDULE.to_vec())]
    schedule: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: u32,
    /// Smallest scales left out of the second set of fits.
    #[arg(long, default_value_t = 2)]
    drop_low_scales: usize,
    #[arg(long)]
    json: bool,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Debug, Args)]
struct LoopsArgs {
    /// Radius of the sampled ball.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Where to write the regenerated output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

fn parse_statistic(s: &str) -> std::result::Result<Statistic, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Statistic::ALL.iter().map(|st| st.name()).collect();
        format!("unknown statistic {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything needed to regenerate a sweep's output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    #[serde(flatten)]
    pub plan: SweepPlan,
    pub format: OutputFormat,
    pub wall_time_seconds: f64,
    /// SHA-256 of each record's CSV row, in order.
    pub record_digests: Vec<String>,
    /// SHA-256 of the whole output.
    pub output_digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// One CSV row, without the line break. Floats carry 17 significant digits.
pub fn csv_row(r: &EstimateRecord) -> String {
    let k = r.k.map(|k| k.to_string()).unwrap_or_default();
    format!(
        "{},{},{k},{},{:.16e},{:.16e},{}",
        r.statistic, r.n, r.sample_count, r.mean, r.std_error, r.master_seed
    )
}

pub fn records_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

fn records_json(records: &[EstimateRecord]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(records).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render(records: &[EstimateRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(records_csv(records)),
        OutputFormat::Json => records_json(records),
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_plan(plan: &SweepPlan, threads: Option<usize>) -> Result<SweepOutcome> {
    let seed = plan.master_seed;
    run_sweep_with(
        plan,
        threads,
        &|region, idx| Configuration::sample(region, seed, idx),
        &mut |r| eprintln!("{} n={} mean={:.4} se={:.4}", r.statistic, r.n, r.mean, r.std_error),
    )
}

/// Parses `args` (program name first) and runs the command; returns the
/// exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Sweep(a) => cmd_sweep(a, &args),
        Command::Verify(a) => cmd_verify(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Loops(a) => cmd_loops(a),
        Command::Replay(a) => cmd_replay(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::RegionTooSmall(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn cmd_sweep(a: SweepArgs, args: &[String]) -> Result<i32> {
    let mut plan = SweepPlan::new(a.stat, a.schedule, a.samples, a.seed);
    if a.k.is_some() {
        plan.k = a.k;
    }
    plan.margin = a.margin;
    plan.validate()?;
    let format = if a.json { OutputFormat::Json } else { OutputFormat::Csv };
    let start = Instant::now();
    let outcome = run_plan(&plan, a.workers.threads)?;
    let text = render(&outcome.records, format)?;
    emit(a.out.as_deref(), &text)?;
    if let Some(out) = &a.out {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: args.to_vec(),
            plan,
            format,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            record_digests: outcome
                .records
                .iter()
                .map(|r| sha256_hex(csv_row(r).as_bytes()))
                .collect(),
            output_digest: sha256_hex(text.as_bytes()),
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(manifest_path(out), json + "\n")?;
    }
    Ok(EXIT_OK)
}

fn cmd_replay(a: ReplayArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.manifest)?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", a.manifest.display())))?;
    let outcome = run_plan(&manifest.plan, a.workers.threads)?;
    let out = render(&outcome.records, manifest.format)?;
    emit(a.out.as_deref(), &out)?;
    let digest = sha256_hex(out.as_bytes());
    if digest != manifest.output_digest {
        eprintln!(
            "replay mismatch: output digest {digest}, manifest has {}",
            manifest.output_digest
        );
        return Ok(EXIT_FAILURE);
    }
    eprintln!("replay matches manifest digest {digest}");
    Ok(EXIT_OK)
}

fn cmd_loops(a: LoopsArgs) -> Result<i32> {
    if a.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let cfg = Configuration::sample(ball0(a.n), a.seed, a.index)?;
    let mut buf = Vec::new();
    write_loops_csv(&trace_loops(&cfg), &mut buf)?;
    match &a.out {
        Some(p) => fs::write(p, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(EXIT_OK)
}

/// First failing configuration of a suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub sample_index: u64,
    pub digest: u64,
    pub detail: String,
}

/// Checks one sample; `Ok(None)` on success.
type Check = dyn Fn(u64, u64) -> Result<Option<Counterexample>> + Sync;

fn failure(cfg: &Configuration, idx: u64, detail: String) -> Option<Counterexample> {
    Some(Counterexample {
        sample_index: idx,
        digest: cfg.digest(),
        detail,
    })
}

/// Per-sample RNG for choices a suite makes beyond the configuration.
fn side_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
    rng.set_stream(idx);
    rng
}

fn duality_check(seed: u64, idx: u64) -> Result<Option<Counterexample>> {
    for (m, n) in [(2u32, 6u32), (2, 8), (3, 8)] {
        let cfg = Configuration::sample(ball0(n), seed, idx)?;
        let t = annulus_time(&cfg, m, n)?.time()?;
        let peeled = max_disjoint_circuits(&cfg, m, n)?;
        let brute = brute_force_circuits(&cfg, m, n)?;
        if t != peeled || t != brute {
            let detail = format!("A({m},{n}): annulus_time {t}, peeled {peeled}, brute force {brute}");
            return Ok(failure(&cfg, idx, detail));
        }
    }
    Ok(None)
}

/// Compares both searches and the geodesic against exhaustive enumeration.
fn compare_with_oracle(
    cfg: &Configuration,
    idx: u64,
    a: &[SiteCoord],
    b: &[SiteCoord],
) -> Result<Option<Counterexample>> {
    let conf = *cfg.region();
    let want = exhaustive_passage_time(cfg, a, b, &conf)?;
    let one = passage_time(cfg, a, b, &conf)?;
    let two = passage_time_bidirectional(cfg, a, b, &conf)?;
    let path_ok = |r: &crate::PassageResult| r.geodesic.as_ref().map(|g| path_time(cfg, g)) == want;
    if one.value != want || two.value != want || !path_ok(&one) || !path_ok(&two) {
        let detail = format!(
            "{a:?} -> {b:?}: exhaustive {want:?}, search {:?}, bidirectional {:?}",
            one.value, two.value
        );
        return Ok(failure(cfg, idx, detail));
    }
    Ok(None)
}

/// One query per sample, cycling through fixed targets, the ball boundary
/// (checked against `c_3` as well) and random site sets.
fn oracle_instance(cfg: &Configuration, idx: u64, rng: &mut ChaCha8Rng) -> Result<Option<Counterexample>> {
    let region = *cfg.region();
    let sites: Vec<SiteCoord> = region.sites().collect();
    let mut pick =
        |k: usize| -> Vec<SiteCoord> { (0..k).map(|_| sites[rng.next_u32() as usize % sites.len()]).collect() };
    let o = vec![SiteCoord::ORIGIN];
    let (a, b) = match idx % 5 {
        0 => (o, vec![SiteCoord::new(3, 0)]),
        1 => (o, vec![SiteCoord::new(2, 0)]),
        2 => (o, vec![SiteCoord::new(-1, 3)]),
        3 => {
            let want = exhaustive_passage_time(cfg, &o, &boundary(&region), &region)?;
            let c3 = point_to_ball_boundary(cfg, 3)?.value;
            if c3 != want {
                return Ok(failure(cfg, idx, format!("c_3 {c3:?}, exhaustive {want:?}")));
            }
            (o, boundary(&region))
        }
        _ => (pick(1 + (idx / 5) as usize % 2), pick(1 + (idx / 5) as usize % 3)),
    };
    compare_with_oracle(cfg, idx, &a, &b)
}

fn oracle_check(seed: u64, idx: u64) -> Result<Option<Counterexample>> {
    let cfg = Configuration::sample(ball0(3), seed, idx)?;
    oracle_instance(&cfg, idx, &mut side_rng(seed, idx))
}

/// The all-open and all-closed balls, checked once per oracle run.
fn oracle_extremes(seed: u64) -> Result<Option<Counterexample>> {
    for (j, cfg) in [Configuration::all_open(ball0(3)), Configuration::all_closed(ball0(3))]
        .iter()
        .enumerate()
    {
        for case in 0..10 {
            let idx = u64::MAX - 9 - 10 * j as u64 + case;
            if let Some(c) = oracle_instance(cfg, idx, &mut side_rng(seed, idx))? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

fn sandwich_suite_check(seed: u64, idx: u64) -> Result<Option<Counterexample>> {
    let cfg = Configuration::sample(ball0(768), seed, idx)?;
    for k in [1, 2] {
        if !sandwich_check(&cfg, k, 256)? {
            return Ok(failure(&cfg, idx, format!("sandwich sum exceeds c_256 at k = {k}")));
        }
    }
    for n in [64u32, 256] {
        let b = point_to_line(&cfg, n)?.time()?;
        let c = point_to_ball_boundary(&cfg, n)?.time()?;
        if b < c {
            return Ok(failure(&cfg, idx, format!("b0n {b} < cn {c} at n = {n}")));
        }
    }
    for (m, n) in [(5u32, 64u32), (9, 128)] {
        let hops = cluster_hops(&cfg, m, n)?;
        let t = annulus_time(&cfg, m, n)?.time()?;
        if hops.exists && t > hops.value {
            let detail = format!("A({m},{n}): annulus_time {t} > cluster hop time {}", hops.value);
            return Ok(failure(&cfg, idx, detail));
        }
    }
    Ok(None)
}

fn lipschitz_check(seed: u64, idx: u64) -> Result<Option<Counterexample>> {
    let n = 8u32;
    let cfg = Configuration::sample(ball0(3 * n), seed, idx)?;
    let sites: Vec<SiteCoord> = ball0(n).sites().collect();
    let flip = sites[side_rng(seed, idx).next_u32() as usize % sites.len()];
    let flipped = Configuration::from_fn(*cfg.region(), |s| cfg.time(s) ^ (s == flip) as u8);
    let stats = |c: &Configuration| -> Result<[u32; 4]> {
        Ok([
            point_to_point(c, n)?.time()?,
            point_to_line(c, n)?.time()?,
            point_to_ball_boundary(c, n)?.time()?,
            annulus_time(c, 2, n)?.time()?,
        ])
    };
    let (before, after) = (stats(&cfg)?, stats(&flipped)?);
    let raised = cfg.is_open(flip);
    for (name, (x, y)) in ["a0n", "b0n", "cn", "annulus_time"]
        .iter()
        .zip(before.iter().zip(&after))
    {
        if x.abs_diff(*y) > 1 || (raised && y < x) || (!raised && y > x) {
            let detail = format!("{name} went from {x} to {y} after flipping {flip}");
            return Ok(failure(&cfg, idx, detail));
        }
    }
    Ok(None)
}

fn subadditivity_check(seed: u64, idx: u64) -> Result<Option<Counterexample>> {
    let cfg = Configuration::sample(ball0(256), seed, idx)?;
    for (i, j) in [(2u32, 5u32), (3, 8), (2, 8)] {
        if !chain_subadditivity_check(&cfg, i, j)? {
            return Ok(failure(&cfg, idx, format!("chain subadditivity fails for ({i},{j})")));
        }
    }
    Ok(None)
}

/// Runs one suite over `samples` configurations; the reported
/// counterexample is the failing sample with the smallest index.
pub fn run_suite(name: &str, samples: u64, seed: u64, threads: Option<usize>) -> Result<Option<Counterexample>> {
    let check: &Check = match name {
        "duality" => &duality_check,
        "oracle" => &oracle_check,
        "sandwich" => &sandwich_suite_check,
        "lipschitz" => &lipschitz_check,
        "subadditivity" => &subadditivity_check,
        other => return Err(Error::InvalidParameter(format!("unknown suite {other:?}"))),
    };
    if name == "oracle" {
        if let Some(c) = oracle_extremes(seed)? {
            return Ok(Some(c));
        }
    }
    let pool = thread_pool(threads)?;
    let results: Vec<Option<Counterexample>> = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|idx| {
                check(seed, idx).unwrap_or_else(|e| {
                    Some(Counterexample {
                        sample_index: idx,
                        digest: 0,
                        detail: format!("error: {e}"),
                    })
                })
            })
            .collect()
    });
    Ok(results.into_iter().flatten().next())
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let suites: Vec<Suite> = if a.suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![a.suite]
    };
    let mut code = EXIT_OK;
    for suite in suites {
        let samples = a.samples.unwrap_or(suite.default_samples());
        let start = Instant::now();
        let result = run_suite(suite.name(), samples, a.seed, a.workers.threads)?;
        let secs = start.elapsed().as_secs_f64();
        match result {
            None => println!("suite {}: pass ({samples} samples, {secs:.1} s)", suite.name()),
            Some(c) => {
                println!(
                    "suite {}: FAIL at sample {} config digest {:016x}: {}",
                    suite.name(),
                    c.sample_index,
                    c.digest,
                    c.detail
                );
                code = EXIT_FAILURE;
            }
        }
    }
    Ok(code)
}

/// A slope with its standard error, over the scales it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub slope: f64,
    pub std_error: f64,
    pub scales: Vec<u32>,
}

impl From<SlopeFit> for SlopeSummary {
    fn from(f: SlopeFit) -> Self {
        SlopeSummary {
            slope: f.slope,
            std_error: f.slope_std_error,
            scales: f.scales_used,
        }
    }
}

/// Output of `estimate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schedule: Vec<u32>,
    pub samples: u64,
    pub master_seed: u64,
    pub margin: u32,
    pub drop_low_scales: usize,
    /// `2 ×` the `c_n` slope.
    pub mu_hat: SlopeSummary,
    pub mu_hat_drop_low: Option<SlopeSummary>,
    pub a0n_slope: SlopeSummary,
    pub b0n_slope: SlopeSummary,
    pub a_prime_slope: SlopeSummary,
    pub a_prime_slope_drop_low: Option<SlopeSummary>,
    pub b_prime_slope: SlopeSummary,
    pub b_prime_slope_drop_low: Option<SlopeSummary>,
    /// Mean `a0n` over mean `b0n` at the largest scale.
    pub a0n_b0n_ratio: f64,
    pub loop_constant: f64,
    pub half_loop_constant: f64,
    pub records: Vec<EstimateRecord>,
}

impl EstimateReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let target = loop_constant();
        let half = half_loop_constant();
        let line = |s: &mut String, name: &str, f: &SlopeSummary, extra: &str| {
            let _ = writeln!(
                s,
                "{name} {:.6} std_error {:.6} scales {:?}{extra}",
                f.slope, f.std_error, f.scales
            );
        };
        let _ = writeln!(
            s,
            "samples {} seed {} margin {}",
            self.samples, self.master_seed, self.margin
        );
        line(&mut s, "mu_hat", &self.mu_hat, "");
        if let Some(f) = &self.mu_hat_drop_low {
            line(&mut s, "mu_hat_drop_low", f, "");
        }
        let lower = self.mu_hat.slope - 3.0 * self.mu_hat.std_error;
        let verdict = if lower > half { "above" } else { "not above" };
        let _ = writeln!(s, "mu_hat - 3 std_error {lower:.6} {verdict} bound {half:.6}");
        line(&mut s, "a0n_slope", &self.a0n_slope, " (mu)");
        line(&mut s, "b0n_slope", &self.b0n_slope, " (mu/2)");
        let last = self.schedule.iter().max().copied().unwrap_or(0);
        let _ = writeln!(s, "a0n_b0n_ratio {:.6} at n {last} target 2", self.a0n_b0n_ratio);
        let tgt = format!(" target {target:.6}");
        line(&mut s, "a_prime_slope", &self.a_prime_slope, &tgt);
        if let Some(f) = &self.a_prime_slope_drop_low {
            line(&mut s, "a_prime_slope_drop_low", f, &tgt);
        }
        let half_tgt = format!(" target {half:.6}");
        line(&mut s, "b_prime_slope", &self.b_prime_slope, &half_tgt);
        if let Some(f) = &self.b_prime_slope_drop_low {
            line(&mut s, "b_prime_slope_drop_low", f, &half_tgt);
        }
        let _ = writeln!(
            s,
            "b_prime_ratio {:.6} target 0.5",
            self.b_prime_slope.slope / self.a_prime_slope.slope
        );
        s
    }
}

/// Runs the five sweeps behind `estimate`.
pub fn build_estimate(
    schedule: &[u32],
    samples: u64,
    seed: u64,
    margin: u32,
    drop_low: usize,
    threads: Option<usize>,
) -> Result<EstimateReport> {
    let mut schedule = schedule.to_vec();
    schedule.sort_unstable();
    schedule.dedup();
    if schedule.len() < 2 {
        return Err(Error::InvalidParameter("estimate needs at least two scales".into()));
    }
    let run = |stat| {
        let mut plan = SweepPlan::new(stat, schedule.clone(), samples, seed);
        plan.margin = margin;
        run_plan(&plan, threads)
    };
    let cn = run(Statistic::Cn)?;
    let b0n = run(Statistic::B0n)?;
    let a0n = run(Statistic::A0n)?;
    let a_prime = run(Statistic::APrime)?;
    let b_prime = run(Statistic::BPrime)?;
    let fit = |o: &SweepOutcome| coupled_slope_fit_min(o, 0, 2).map(SlopeSummary::from);
    let fit_dropped = |o: &SweepOutcome| {
        (drop_low > 0 && schedule.len() >= drop_low + 2)
            .then(|| coupled_slope_fit_min(o, drop_low, 2).map(SlopeSummary::from))
            .transpose()
    };
    let double = |f: SlopeSummary| SlopeSummary {
        slope: 2.0 * f.slope,
        std_error: 2.0 * f.std_error,
        scales: f.scales,
    };
    let last = |o: &SweepOutcome| o.records.last().map_or(f64::NAN, |r| r.mean);
    let records = [&cn, &b0n, &a0n, &a_prime, &b_prime]
        .iter()
        .flat_map(|o| o.records.iter().cloned())
        .collect();
    Ok(EstimateReport {
        mu_hat: double(fit(&cn)?),
        mu_hat_drop_low: fit_dropped(&cn)?.map(double),
        a0n_slope: fit(&a0n)?,
        b0n_slope: fit(&b0n)?,
        a_prime_slope: fit(&a_prime)?,
        a_prime_slope_drop_low: fit_dropped(&a_prime)?,
        b_prime_slope: fit(&b_prime)?,
        b_prime_slope_drop_low: fit_dropped(&b_prime)?,
        a0n_b0n_ratio: last(&a0n) / last(&b0n),
        loop_constant: loop_constant(),
        half_loop_constant: half_loop_constant(),
        schedule,
        samples,
        master_seed: seed,
        margin,
        drop_low_scales: drop_low,
        records,
    })
}

fn cmd_estimate(a: EstimateArgs) -> Result<i32> {
    let report = build_estimate(
        &a.schedule,
        a.samples,
        a.seed,
        a.margin,
        a.drop_low_scales,
        a.workers.threads,
    )?;
    let text = if a.json {
        serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))? + "\n"
    } else {
        report.to_text()
    };
    emit(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: Option<u32>) -> EstimateRecord {
        EstimateRecord {
            statistic: Statistic::AnnulusTime,
            n: 64,
            k,
            sample_count: 3,
            mean: 1.0 / 3.0,
            std_error: 0.0,
            master_seed: 9,
        }
    }

    #[test]
    fn csv_rows_have_seventeen_digits() {
        assert_eq!(
            csv_row(&record(Some(2))),
            "annulus_time,64,2,3,3.3333333333333331e-1,0.0000000000000000e0,9"
        );
        assert_eq!(csv_row(&record(None)).split(',').nth(2), Some(""));
        assert!(records_csv(&[]).starts_with(CSV_HEADER));
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("out/cn.csv")),
            PathBuf::from("out/cn.csv.manifest.json")
        );
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(
            run(["fppsim", "sweep", "--schedule", "8", "--samples", "1", "--seed", "1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["fppsim", "verify", "--suite", "nope", "--seed", "1"]), EXIT_USAGE);
        assert_eq!(
            run([
                "fppsim",
                "sweep",
                "--stat",
                "xx",
                "--schedule",
                "8",
                "--samples",
                "1",
                "--seed",
                "1"
            ]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["fppsim", "sweep", "--stat", "cn", "--schedule", "8", "--samples", "1"]),
            EXIT_USAGE
        );
        assert_eq!(
            run([
                "fppsim",
                "sweep",
                "--stat",
                "annulus_time",
                "--schedule",
                "5",
                "--samples",
                "1",
                "--seed",
                "1"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["fppsim", "--help"]), EXIT_OK);
    }

    #[test]
    fn small_suites_pass() {
        for suite in Suite::EACH {
            let samples = if suite == Suite::Oracle { 50 } else { 3 };
            assert_eq!(
                run_suite(suite.name(), samples, 5, Some(1)).unwrap(),
                None,
                "{}",
                suite.name()
            );
        }
        assert!(run_suite("nope", 1, 1, None).is_err());
    }
}

//! Monte Carlo sweeps over scale schedules, log-slope fits and the
//! per-configuration checks that accompany them.
//!
//! Sample `i` at every scale reads the same site bits (see
//! [`Configuration::sample`]), so sweeps are coupled across scales and
//! monotone statistics grow sample by sample.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{chain_hops, cluster_hops};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::fpp::{
    annulus_passage, annulus_time, on_ball_boundary, point_to_ball_boundary, point_to_line, point_to_point,
    DEFAULT_MARGIN,
};
use crate::lattice::{ball0, neighbors, Radius, Region, SiteCoord};
use crate::loops::{annulus_loop_count, halfplane_separating_count, separating_loop_count, LOOP_MARGIN};
use crate::tiles::TileGrid;
use crate::uf::UnionFind;

/// Default scale schedule, `2^6 ..= 2^12`.
pub const DEFAULT_SCHEDULE: [u32; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

/// `1/(√3π)`, the loop constant for `a'`.
pub fn loop_constant() -> f64 {
    1.0 / (3f64.sqrt() * std::f64::consts::PI)
}

/// `1/(2√3π)`, the half-plane loop constant and the lower bound on `μ`.
pub fn half_loop_constant() -> f64 {
    loop_constant() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "a0n")]
    A0n,
    #[serde(rename = "b0n")]
    B0n,
    #[serde(rename = "cn")]
    Cn,
    #[serde(rename = "a_prime")]
    APrime,
    #[serde(rename = "b_prime")]
    BPrime,
    #[serde(rename = "annulus_time")]
    AnnulusTime,
    #[serde(rename = "annulus_loops")]
    AnnulusLoops,
    #[serde(rename = "T_prime")]
    TPrime,
    #[serde(rename = "T_double_prime")]
    TDoublePrime,
}

impl Statistic {
    pub const ALL: [Statistic; 9] = [
        Statistic::A0n,
        Statistic::B0n,
        Statistic::Cn,
        Statistic::APrime,
        Statistic::BPrime,
        Statistic::AnnulusTime,
        Statistic::AnnulusLoops,
        Statistic::TPrime,
        Statistic::TDoublePrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::A0n => "a0n",
            Statistic::B0n => "b0n",
            Statistic::Cn => "cn",
            Statistic::APrime => "a_prime",
            Statistic::BPrime => "b_prime",
            Statistic::AnnulusTime => "annulus_time",
            Statistic::AnnulusLoops => "annulus_loops",
            Statistic::TPrime => "T_prime",
            Statistic::TDoublePrime => "T_double_prime",
        }
    }

    /// Statistics over `A(n/2^k, n)` that take the exponent `k`.
    pub fn uses_annulus(self) -> bool {
        matches!(
            self,
            Statistic::AnnulusTime | Statistic::AnnulusLoops | Statistic::TPrime | Statistic::TDoublePrime
        )
    }

    /// Inner radius for scale `n` and exponent `k`: `n/2^k + 1` for the
    /// passage-type annulus statistics (as in `T_{k,i}`), `n/2^k` for loop
    /// counts.
    fn inner_radius(self, n: u32, k: u32) -> u32 {
        let base = n >> k;
        if self == Statistic::AnnulusLoops {
            base
        } else {
            base + 1
        }
    }

    /// Window to sample for scale `n`.
    pub fn window(self, n: u32, margin: u32) -> Region {
        match self {
            Statistic::A0n | Statistic::B0n => ball0(margin * n),
            Statistic::APrime | Statistic::BPrime => ball0(LOOP_MARGIN * n),
            _ => ball0(n),
        }
    }

    fn check(self, n: u32, k: Option<u32>, margin: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("scales must be >= 1".into()));
        }
        let reach = match self {
            Statistic::A0n | Statistic::B0n => n.checked_mul(margin),
            Statistic::APrime | Statistic::BPrime => n.checked_mul(LOOP_MARGIN),
            _ => Some(n),
        };
        if reach.is_none_or(|r| r > i32::MAX as u32 / 4) {
            return Err(Error::InvalidParameter(format!("scale {n} too large for {self}")));
        }
        if margin == 0 {
            return Err(Error::InvalidParameter("margin must be >= 1".into()));
        }
        match (self.uses_annulus(), k) {
            (false, None) => Ok(()),
            (false, Some(_)) => Err(Error::InvalidParameter(format!("{self} takes no annulus exponent"))),
            (true, None) => Err(Error::InvalidParameter(format!("{self} needs an annulus exponent k"))),
            (true, Some(k)) => {
                if k == 0 || k >= 31 || n >> k == 0 || !n.is_multiple_of(1 << k) {
                    return Err(Error::InvalidParameter(format!(
                        "{self}: n = {n} is not a multiple of 2^{k}"
                    )));
                }
                let m = self.inner_radius(n, k);
                if m >= n {
                    return Err(Error::InvalidParameter(format!("{self}: annulus ({m}, {n}) is empty")));
                }
                Ok(())
            }
        }
    }

    /// The statistic on one configuration; the region must cover
    /// [`Statistic::window`].
    pub fn evaluate(self, cfg: &Configuration, n: u32, k: Option<u32>) -> Result<u32> {
        let annulus = |k: Option<u32>| {
            let k = k.ok_or_else(|| Error::InvalidParameter(format!("{self} needs an annulus exponent k")))?;
            Ok::<_, Error>(self.inner_radius(n, k))
        };
        match self {
            Statistic::A0n => point_to_point(cfg, n)?.time(),
            Statistic::B0n => point_to_line(cfg, n)?.time(),
            Statistic::Cn => point_to_ball_boundary(cfg, n)?.time(),
            Statistic::APrime => separating_loop_count(cfg, n),
            Statistic::BPrime => halfplane_separating_count(cfg, n),
            Statistic::AnnulusTime => annulus_time(cfg, annulus(k)?, n)?.time(),
            Statistic::AnnulusLoops => annulus_loop_count(cfg, annulus(k)?, n),
            Statistic::TPrime => Ok(cluster_hops(cfg, annulus(k)?, n)?.value),
            Statistic::TDoublePrime => Ok(chain_hops(cfg, annulus(k)?, n)?.value),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown statistic {s:?}")))
    }
}

/// Aggregate of one statistic at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub statistic: Statistic,
    pub n: u32,
    pub k: Option<u32>,
    pub sample_count: u64,
    pub mean: f64,
    /// Sample standard deviation over `√sample_count`; zero for one sample.
    pub std_error: f64,
    pub master_seed: u64,
}

impl EstimateRecord {
    fn from_values(statistic: Statistic, n: u32, k: Option<u32>, master_seed: u64, values: &[u32]) -> Self {
        let (mean, sd) = mean_sd(values.iter().map(|&v| v as f64));
        EstimateRecord {
            statistic,
            n,
            k,
            sample_count: values.len() as u64,
            mean,
            std_error: sd / (values.len() as f64).sqrt(),
            master_seed,
        }
    }
}

/// Mean and sample standard deviation, summed in iteration order.
fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    if count < 2.0 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (count - 1.0)).sqrt())
}

/// Everything that determines a sweep's output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub statistic: Statistic,
    pub schedule: Vec<u32>,
    pub samples: u64,
    pub master_seed: u64,
    /// Annulus exponent for the annulus statistics.
    pub k: Option<u32>,
    /// Window blow-up for `a0n` and `b0n`.
    pub margin: u32,
}

impl SweepPlan {
    /// Plan with the default margin and, for annulus statistics, `k = 1`.
    pub fn new(statistic: Statistic, schedule: Vec<u32>, samples: u64, master_seed: u64) -> Self {
        SweepPlan {
            statistic,
            schedule,
            samples,
            master_seed,
            k: statistic.uses_annulus().then_some(1),
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::InvalidParameter("schedule is empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be >= 1".into()));
        }
        for &n in &self.schedule {
            self.statistic.check(n, self.k, self.margin)?;
        }
        Ok(())
    }
}

/// Per-sample values of a sweep alongside its records.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub plan: SweepPlan,
    pub records: Vec<EstimateRecord>,
    /// `values[scale][sample_index]`.
    pub values: Vec<Vec<u32>>,
}

/// Draws configurations for a sweep; the default samples fresh bits.
pub type ConfigSource<'a> = dyn Fn(Region, u64) -> Result<Configuration> + Sync + 'a;

/// `sweep(statistic, schedule, samples, master_seed)` with default options.
pub fn sweep(statistic: Statistic, schedule: &[u32], samples: u64, master_seed: u64) -> Result<Vec<EstimateRecord>> {
    Ok(run_sweep(
        &SweepPlan::new(statistic, schedule.to_vec(), samples, master_seed),
        None,
    )?
    .records)
}

/// Runs `plan` on `threads` workers (all cores when `None`). The output does
/// not depend on the worker count.
pub fn run_sweep(plan: &SweepPlan, threads: Option<usize>) -> Result<SweepOutcome> {
    let seed = plan.master_seed;
    run_sweep_with(
        plan,
        threads,
        &|region, idx| Configuration::sample(region, seed, idx),
        &mut |_| {},
    )
}

/// As [`run_sweep`] with an explicit configuration source, reporting each
/// record as its scale completes.
pub fn run_sweep_with(
    plan: &SweepPlan,
    threads: Option<usize>,
    source: &ConfigSource<'_>,
    progress: &mut dyn FnMut(&EstimateRecord),
) -> Result<SweepOutcome> {
    plan.validate()?;
    let pool = thread_pool(threads)?;
    let mut records = Vec::with_capacity(plan.schedule.len());
    let mut values = Vec::with_capacity(plan.schedule.len());
    for &n in &plan.schedule {
        let window = plan.statistic.window(n, plan.margin);
        let row: Vec<u32> = pool.install(|| {
            (0..plan.samples)
                .into_par_iter()
                .map(|idx| plan.statistic.evaluate(&source(window, idx)?, n, plan.k))
                .collect::<Result<Vec<u32>>>()
        })?;
        let record = EstimateRecord::from_values(plan.statistic, n, plan.k, plan.master_seed, &row);
        progress(&record);
        records.push(record);
        values.push(row);
    }
    Ok(SweepOutcome {
        plan: plan.clone(),
        records,
        values,
    })
}

pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    if threads == Some(0) {
        return Err(Error::InvalidParameter("threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

/// Least-squares line of the mean against `ln n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub scales_used: Vec<u32>,
    /// Standard error of the slope.
    pub slope_std_error: f64,
}

/// OLS weights `c_i` with `slope = Σ c_i y_i`.
fn slope_weights(scales: &[u32], min_scales: usize) -> Result<Vec<f64>> {
    let distinct: HashSet<u32> = scales.iter().copied().collect();
    if distinct.len() != scales.len() {
        return Err(Error::InvalidParameter("repeated scale in fit".into()));
    }
    if scales.len() < min_scales.max(2) {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs >= {} distinct scales, got {}",
            min_scales.max(2),
            scales.len()
        )));
    }
    let xs: Vec<f64> = scales.iter().map(|&n| (n as f64).ln()).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    Ok(xs.iter().map(|x| (x - xbar) / sxx).collect())
}

fn fit_means(scales: &[u32], means: &[f64], slope_std_error: f64) -> Result<SlopeFit> {
    let weights = slope_weights(scales, 2)?;
    let slope: f64 = weights.iter().zip(means).map(|(c, y)| c * y).sum();
    let xs: Vec<f64> = scales.iter().map(|&n| (n as f64).ln()).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = means.iter().sum::<f64>() / means.len() as f64;
    let intercept = ybar - slope * xbar;
    let ss: f64 = xs
        .iter()
        .zip(means)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms: (ss / means.len() as f64).sqrt(),
        scales_used: scales.to_vec(),
        slope_std_error,
    })
}

/// Fit over the records' scales. The slope error treats the scales as
/// independent; use [`coupled_slope_fit`] when per-sample values exist.
pub fn fit_log_slope(records: &[EstimateRecord]) -> Result<SlopeFit> {
    let scales: Vec<u32> = records.iter().map(|r| r.n).collect();
    let means: Vec<f64> = records.iter().map(|r| r.mean).collect();
    let weights = slope_weights(&scales, 3)?;
    let var: f64 = weights
        .iter()
        .zip(records)
        .map(|(c, r)| (c * r.std_error).powi(2))
        .sum();
    fit_means(&scales, &means, var.sqrt())
}

/// Fit over the outcome's scales after dropping the `drop_low` smallest.
/// The slope is linear in the values, so each sample has its own slope and
/// their spread gives an error that accounts for the coupling across scales.
pub fn coupled_slope_fit(outcome: &SweepOutcome, drop_low: usize) -> Result<SlopeFit> {
    coupled_slope_fit_min(outcome, drop_low, 3)
}

/// [`coupled_slope_fit`] accepting as few as `min_scales` scales (at least
/// two; a two-scale fit has no residual).
pub fn coupled_slope_fit_min(outcome: &SweepOutcome, drop_low: usize, min_scales: usize) -> Result<SlopeFit> {
    let mut order: Vec<usize> = (0..outcome.records.len()).collect();
    order.sort_by_key(|&i| outcome.records[i].n);
    let keep: Vec<usize> = order.into_iter().skip(drop_low).collect();
    let scales: Vec<u32> = keep.iter().map(|&i| outcome.records[i].n).collect();
    let weights = slope_weights(&scales, min_scales)?;
    let samples = outcome.plan.samples as usize;
    let per_sample = (0..samples).map(|s| {
        keep.iter()
            .zip(&weights)
            .map(|(&i, c)| c * outcome.values[i][s] as f64)
            .sum::<f64>()
    });
    let (_, sd) = mean_sd(per_sample);
    let means: Vec<f64> = keep.iter().map(|&i| outcome.records[i].mean).collect();
    fit_means(&scales, &means, sd / (samples as f64).sqrt())
}

/// `μ̂ = 2 × slope` of `c_n` against `ln n`.
pub fn estimate_mu(records_cn: &[EstimateRecord]) -> Result<f64> {
    if let Some(r) = records_cn.iter().find(|r| r.statistic != Statistic::Cn) {
        return Err(Error::InvalidParameter(format!(
            "estimate_mu expects cn records, got {}",
            r.statistic
        )));
    }
    Ok(2.0 * fit_log_slope(records_cn)?.slope)
}

/// Sample standard deviation over `ln n`, per scale.
pub fn fluctuation_profile(outcome: &SweepOutcome) -> Vec<(u32, f64)> {
    outcome
        .records
        .iter()
        .zip(&outcome.values)
        .map(|(r, v)| {
            let (_, sd) = mean_sd(v.iter().map(|&x| x as f64));
            (r.n, sd / (r.n as f64).ln())
        })
        .collect()
}

/// Open sites of `annulus(2^i, 2^(i+1))` in clusters (of the ball) that
/// reach `∂B(2^(i+1))` and contain a circuit surrounding the origin,
/// reported as the `n` with `(n, 0)` in such a cluster.
fn shell_axis_sites(cfg: &Configuration, i: u32) -> Result<Option<Vec<u32>>> {
    if i >= 29 {
        return Err(Error::InvalidParameter(format!("shell index {i} too large")));
    }
    let (inner, outer) = (1u32 << i, 1u32 << (i + 1));
    let rn = Radius::from_int(outer);
    let ri = Radius::from_int(inner);
    cfg.require_ball(rn)?;
    let ball = ball0(outer);
    let mut index = TileGrid::new(ball.bbox(), u32::MAX);
    let mut open = Vec::new();
    for s in ball.sites().filter(|&s| cfg.is_open(s)) {
        index.set(s, open.len() as u32);
        open.push(s);
    }
    let mut uf = UnionFind::new(open.len());
    for (a, &s) in open.iter().enumerate() {
        for t in neighbors(s) {
            let b = index.get(t);
            if b != u32::MAX {
                uf.union(a, b as usize);
            }
        }
    }
    let mut reaches = vec![false; open.len()];
    for (a, &s) in open.iter().enumerate() {
        if on_ball_boundary(s, rn) {
            let r = uf.find(a);
            reaches[r] = true;
        }
    }
    // A separating circuit of sites crosses the positive axis at a site.
    let mut roots = Vec::new();
    for n in inner + 1..=outer {
        let a = index.get(SiteCoord::new(n as i32, 0));
        if a != u32::MAX {
            let r = uf.find(a as usize);
            if reaches[r] && !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    let mut hits = Vec::new();
    for r in roots {
        let in_wall = |s: SiteCoord, uf: &mut UnionFind| {
            let a = index.get(s);
            a != u32::MAX && s.norm4() > ri.four_r_sq() && uf.find(a as usize) == r
        };
        // Flood from the origin avoiding the cluster's annulus part.
        let mut seen = HashSet::from([SiteCoord::ORIGIN]);
        let mut queue = VecDeque::from([SiteCoord::ORIGIN]);
        let mut escaped = false;
        while let Some(s) = queue.pop_front() {
            if on_ball_boundary(s, rn) {
                escaped = true;
                break;
            }
            for t in neighbors(s) {
                if ball.contains(t) && !in_wall(t, &mut uf) && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        if !escaped {
            for n in inner + 1..=outer {
                let a = index.get(SiteCoord::new(n as i32, 0));
                if a != u32::MAX && uf.find(a as usize) == r {
                    hits.push(n);
                }
            }
        }
    }
    if hits.is_empty() {
        Ok(None)
    } else {
        hits.sort_unstable();
        Ok(Some(hits))
    }
}

/// Event `B_i`: an open circuit surrounding the origin in
/// `annulus(2^i, 2^(i+1))` whose cluster reaches `∂B(2^(i+1))`.
pub fn detect_shell_event(cfg: &Configuration, i: u32) -> Result<bool> {
    Ok(shell_axis_sites(cfg, i)?.is_some())
}

/// On `B_i`, whether some `n ∈ (2^i, 2^(i+1)]` with `(n, 0)` on the detected
/// cluster has `a_{0,n} = c_{2^(i+1)}`. Needs `ball(0, 3·2^(i+1))`.
pub fn shell_equality_check(cfg: &Configuration, i: u32) -> Result<bool> {
    let Some(candidates) = shell_axis_sites(cfg, i)? else {
        return Err(Error::Precondition(format!("shell event B_{i} does not occur")));
    };
    let c = point_to_ball_boundary(cfg, 1 << (i + 1))?.time()?;
    for n in candidates {
        if point_to_point(cfg, n)?.time()? == c {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Left side of the sandwich: `Σ_{i < ⌊log_{2^k} n⌋} T_{k,i}`.
pub fn sandwich_sum(cfg: &Configuration, k: u32, n: u32) -> Result<u32> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "needs k >= 1 and n >= 1, got k = {k}, n = {n}"
        )));
    }
    cfg.require_ball(Radius::from_int(n))?;
    let terms = n.ilog2() / k;
    let mut total = 0;
    for i in 0..terms {
        let m = (1u32 << (k * i)) + 1;
        total += annulus_passage(cfg, m, 1 << (k * (i + 1)))?.time()?;
    }
    Ok(total)
}

/// `Σ_i T_{k,i} <= c_n`.
pub fn sandwich_check(cfg: &Configuration, k: u32, n: u32) -> Result<bool> {
    Ok(sandwich_sum(cfg, k, n)? <= point_to_ball_boundary(cfg, n)?.time()?)
}

/// Samples with `T'' = T = T'` at `m = 2^k + 1`, `n = 2^(2k)`, counting
/// only configurations where a cluster sequence and a chain exist.
pub fn triple_equality_count(k: u32, samples: u64, master_seed: u64, threads: Option<usize>) -> Result<u64> {
    if !(1..=14).contains(&k) {
        return Err(Error::InvalidParameter(format!("k = {k} out of range")));
    }
    let (m, n) = ((1u32 << k) + 1, 1u32 << (2 * k));
    if m >= n {
        return Err(Error::InvalidParameter(format!("annulus ({m}, {n}) is empty")));
    }
    let pool = thread_pool(threads)?;
    let hits = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|idx| {
                let cfg = Configuration::sample(ball0(n), master_seed, idx)?;
                let t = annulus_time(&cfg, m, n)?.time()?;
                let hop = cluster_hops(&cfg, m, n)?;
                let chain = chain_hops(&cfg, m, n)?;
                Ok((hop.exists && chain.exists && hop.value == t && chain.value == t) as u64)
            })
            .collect::<Result<Vec<u64>>>()
    })?;
    Ok(hits.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: u32, mean: f64) -> EstimateRecord {
        EstimateRecord {
            statistic: Statistic::Cn,
            n,
            k: None,
            sample_count: 10,
            mean,
            std_error: 0.1,
            master_seed: 0,
        }
    }

    #[test]
    fn names_round_trip() {
        for st in Statistic::ALL {
            assert_eq!(st.name().parse::<Statistic>().unwrap(), st);
            assert_eq!(serde_json::to_string(&st).unwrap(), format!("\"{}\"", st.name()));
        }
        assert!("A0N".parse::<Statistic>().is_err());
    }

    #[test]
    fn exact_synthetic_fits() {
        let scales = [64u32, 128, 256, 512];
        let log2: Vec<_> = scales.iter().map(|&n| record(n, 2.0 * (n as f64).ln())).collect();
        let fit = fit_log_slope(&log2).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-9);
        assert!(fit.residual_rms < 1e-9);

        let flat: Vec<_> = scales.iter().map(|&n| record(n, 3.5)).collect();
        let fit = fit_log_slope(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!((fit.intercept - 3.5).abs() < 1e-12);

        let quarter: Vec<_> = scales
            .iter()
            .map(|&n| record(n, 0.25 * (n as f64).ln() + 1.0))
            .collect();
        assert!((estimate_mu(&quarter).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits_are_rejected() {
        assert!(fit_log_slope(&[record(64, 1.0), record(128, 2.0)]).is_err());
        assert!(fit_log_slope(&[record(64, 1.0), record(64, 1.0), record(128, 2.0)]).is_err());
        let mut wrong = record(256, 1.0);
        wrong.statistic = Statistic::A0n;
        assert!(estimate_mu(&[record(64, 1.0), record(128, 2.0), wrong]).is_err());
    }

    #[test]
    fn plan_validation() {
        let ok = SweepPlan::new(Statistic::TPrime, vec![16, 32], 2, 1);
        assert_eq!(ok.k, Some(1));
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.k = Some(3);
        bad.schedule = vec![12];
        assert!(bad.validate().is_err());
        let mut bad = SweepPlan::new(Statistic::Cn, vec![8], 2, 1);
        bad.k = Some(1);
        assert!(bad.validate().is_err());
        assert!(SweepPlan::new(Statistic::Cn, vec![], 2, 1).validate().is_err());
        assert!(SweepPlan::new(Statistic::Cn, vec![8], 0, 1).validate().is_err());
        assert!(SweepPlan::new(Statistic::AnnulusTime, vec![2], 1, 1)
            .validate()
            .is_err());
    }

    #[test]
    fn all_open_override_gives_zero_mean() {
        let plan = SweepPlan::new(Statistic::Cn, vec![4], 10, 3);
        let out = run_sweep_with(&plan, Some(1), &|r, _| Ok(Configuration::all_open(r)), &mut |_| {}).unwrap();
        assert_eq!(out.records[0].mean, 0.0);
        assert_eq!(out.records[0].std_error, 0.0);
        assert_eq!(out.records[0].sample_count, 10);
    }

    #[test]
    fn coupled_fit_error_matches_per_sample_slopes() {
        let plan = SweepPlan::new(Statistic::Cn, vec![8, 16, 32, 64], 40, 5);
        let out = run_sweep(&plan, Some(1)).unwrap();
        let fit = coupled_slope_fit(&out, 0).unwrap();
        assert!((fit.slope - fit_log_slope(&out.records).unwrap().slope).abs() < 1e-12);
        assert!(fit.slope_std_error > 0.0);
        let dropped = coupled_slope_fit(&out, 1).unwrap();
        assert_eq!(dropped.scales_used, vec![16, 32, 64]);
        assert!(coupled_slope_fit(&out, 2).is_err());
    }

    #[test]
    fn shell_event_corners() {
        let open = Configuration::all_open(ball0(48));
        assert!(detect_shell_event(&open, 3).unwrap());
        assert!(shell_equality_check(&open, 3).unwrap());
        let closed = Configuration::all_closed(ball0(48));
        assert!(!detect_shell_event(&closed, 3).unwrap());
        assert!(matches!(shell_equality_check(&closed, 3), Err(Error::Precondition(_))));
        assert!(detect_shell_event(&Configuration::all_open(ball0(15)), 3).is_err());
    }

    #[test]
    fn open_circuit_cut_from_boundary_is_not_an_event() {
        // Open ring at radius 12 in an otherwise closed ball: it surrounds the
        // origin but its cluster never reaches ∂B(16).
        let ring: HashSet<SiteCoord> = crate::lattice::hex_ring(12).into_iter().collect();
        let cfg = Configuration::from_fn(ball0(48), |s| (!ring.contains(&s)) as u8);
        assert!(!detect_shell_event(&cfg, 3).unwrap());
        // Joining it to the boundary along the axis makes it one.
        let cfg = Configuration::from_fn(ball0(48), |s| (!(ring.contains(&s) || (s.v == 0 && s.u >= 12))) as u8);
        assert!(detect_shell_event(&cfg, 3).unwrap());
        assert!(shell_equality_check(&cfg, 3).unwrap());
    }

    #[test]
    fn sandwich_corners() {
        assert!(sandwich_check(&Configuration::all_open(ball0(16)), 1, 16).unwrap());
        let closed = Configuration::all_closed(ball0(8));
        // Annuli (2,2), (3,4), (5,8) cost 1, 2, 4 sites; c_8 = 9.
        assert_eq!(sandwich_sum(&closed, 1, 8).unwrap(), 7);
        assert!(sandwich_check(&closed, 1, 8).unwrap());
    }
}

//! Metropolis sampling of the eigenvalue gas `Δ(t)^2 exp(-n Σ ln(1+t_k^2))`
//! restricted to the tangent-variable support, and histogram comparison
//! against the limiting density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::curves::{density_at, DensitySpec};
use crate::error::{ArcError, Result};
use crate::numerics::{quad_singular, RealContext};
use crate::symbol::{tan_support, ArcConfig};

pub const DEFAULT_SEED: u64 = 0xA11CE;
pub const TUNE_FRACTION: f64 = 0.1;
pub const BURN_IN_FRACTION: f64 = 0.2;
pub const TARGET_ACCEPTANCE: f64 = 0.4;
pub const RECOMPUTE_EVERY: usize = 1000;
pub const DRIFT_LIMIT: f64 = 1e-8;
const TUNE_BLOCK: usize = 20;
pub const MIN_POOLED_SAMPLES: usize = 10_000;

#[derive(Clone, Debug)]
pub struct McSettings {
    pub sweeps: usize,
    /// Record positions every `thin` sweeps after burn-in.
    pub thin: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings { sweeps: 4000, thin: 5 }
    }
}

#[derive(Clone, Debug)]
pub struct GasChain {
    pub n: usize,
    pub support: Vec<(f64, f64)>,
    pub positions: Vec<f64>,
    pub rng_seed: u64,
    pub stream: u64,
    pub sweep_count: usize,
    /// Per-site window half-widths.
    pub proposal_width: Vec<f64>,
    site_interval: Vec<usize>,
    log_weight: f64,
    rng: ChaCha8Rng,
    pub drift_flags: usize,
    pub max_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainOutput {
    pub stream: u64,
    pub samples: Vec<f64>,
    pub acceptance_rate: f64,
    pub drift_flags: usize,
    pub max_drift: f64,
}

fn log_weight(pos: &[f64]) -> f64 {
    let n = pos.len() as f64;
    let mut w = 0.0;
    for (i, x) in pos.iter().enumerate() {
        for y in &pos[i + 1..] {
            w += 2.0 * (x - y).abs().ln();
        }
        w -= n * x.mul_add(*x, 1.0).ln();
    }
    w
}

/// Support intervals of the configuration in the tangent variable.
pub fn support_f64(config: &ArcConfig) -> Result<Vec<(f64, f64)>> {
    let ctx = RealContext::new(64)?;
    let mut s: Vec<(f64, f64)> = tan_support(config, &ctx)
        .iter()
        .map(|(a, b)| (a.to_f64(), b.to_f64()))
        .collect();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(s)
}

impl GasChain {
    /// Sites spread round-robin over the intervals, evenly spaced inside each.
    pub fn new(support: Vec<(f64, f64)>, n: usize, seed: u64, stream: u64) -> Result<GasChain> {
        if n < 2 {
            return Err(ArcError::InvalidParameter(format!("gas needs n >= 2, got {n}")));
        }
        if support.is_empty() {
            return Err(ArcError::InvalidParameter("empty support".into()));
        }
        let k = support.len();
        let mut counts = vec![0usize; k];
        let site_interval: Vec<usize> = (0..n).map(|i| i % k).collect();
        for &j in &site_interval {
            counts[j] += 1;
        }
        let mut seen = vec![0usize; k];
        let mut positions = Vec::with_capacity(n);
        let mut proposal_width = Vec::with_capacity(n);
        for &j in &site_interval {
            let (a, b) = support[j];
            seen[j] += 1;
            positions.push(a + (b - a) * seen[j] as f64 / (counts[j] + 1) as f64);
            proposal_width.push((b - a) / (counts[j] as f64 + 1.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let log_weight = log_weight(&positions);
        Ok(GasChain {
            n,
            support,
            positions,
            rng_seed: seed,
            stream,
            sweep_count: 0,
            proposal_width,
            site_interval,
            log_weight,
            rng,
            drift_flags: 0,
            max_drift: 0.0,
        })
    }

    fn in_support(&self, x: f64) -> bool {
        self.support.iter().any(|&(a, b)| x >= a && x <= b)
    }

    fn delta(&self, i: usize, new: f64) -> f64 {
        let old = self.positions[i];
        let n = self.n as f64;
        let mut d = 0.0;
        for (j, t) in self.positions.iter().enumerate() {
            if j != i {
                d += 2.0 * ((new - t).abs().ln() - (old - t).abs().ln());
            }
        }
        d - n * (new.mul_add(new, 1.0).ln() - old.mul_add(old, 1.0).ln())
    }

    /// One sweep of single-site moves; returns accepted count per site.
    pub fn sweep(&mut self, accepted: &mut [usize]) {
        for i in 0..self.n {
            let h = self.proposal_width[i];
            let u: f64 = self.rng.gen::<f64>() * 2.0 - 1.0;
            let cand = self.positions[i] + h * u;
            let r: f64 = self.rng.gen();
            if !self.in_support(cand) {
                continue;
            }
            let d = self.delta(i, cand);
            if d >= 0.0 || r < d.exp() {
                self.positions[i] = cand;
                self.log_weight += d;
                accepted[i] += 1;
            }
        }
        self.sweep_count += 1;
        if self.sweep_count % RECOMPUTE_EVERY == 0 {
            let fresh = log_weight(&self.positions);
            let drift = (fresh - self.log_weight).abs() / fresh.abs().max(1.0);
            self.max_drift = self.max_drift.max(drift);
            if drift > DRIFT_LIMIT {
                self.drift_flags += 1;
            }
            self.log_weight = fresh;
        }
    }

    fn retune(&mut self, accepted: &[usize], sweeps: usize) {
        for (i, &a) in accepted.iter().enumerate() {
            let rate = a as f64 / sweeps as f64;
            let (lo, hi) = self.support[self.site_interval[i]];
            let w = self.proposal_width[i] * ((rate - TARGET_ACCEPTANCE) * 2.0).exp();
            self.proposal_width[i] = w.clamp((hi - lo) * 1e-6, hi - lo);
        }
    }

    /// Tune during the first tenth, discard the first fifth, then record.
    pub fn run(mut self, settings: &McSettings) -> ChainOutput {
        let sweeps = settings.sweeps.max(1);
        let tune = (sweeps as f64 * TUNE_FRACTION) as usize;
        let burn = (sweeps as f64 * BURN_IN_FRACTION) as usize;
        let thin = settings.thin.max(1);
        let mut block = vec![0usize; self.n];
        let mut block_len = 0;
        let mut acc = vec![0usize; self.n];
        let mut samples = Vec::with_capacity((sweeps - burn) / thin * self.n + self.n);
        let mut counted = 0usize;
        for s in 0..sweeps {
            if s < tune {
                self.sweep(&mut block);
                block_len += 1;
                if block_len == TUNE_BLOCK {
                    self.retune(&block, block_len);
                    block.iter_mut().for_each(|b| *b = 0);
                    block_len = 0;
                }
                continue;
            }
            self.sweep(&mut acc);
            counted += 1;
            if s >= burn && (s - burn) % thin == 0 {
                samples.extend_from_slice(&self.positions);
            }
        }
        let total: usize = acc.iter().sum();
        ChainOutput {
            stream: self.stream,
            samples,
            acceptance_rate: total as f64 / (counted.max(1) * self.n) as f64,
            drift_flags: self.drift_flags,
            max_drift: self.max_drift,
        }
    }
}

pub fn run_chain(config: &ArcConfig, n: usize, settings: &McSettings, seed: u64, stream: u64) -> Result<ChainOutput> {
    let chain = GasChain::new(support_f64(config)?, n, seed, stream)?;
    Ok(chain.run(settings))
}

/// Independent chains on streams `0..chains` of one seed.
pub fn run_chains(
    config: &ArcConfig,
    n: usize,
    chains: usize,
    settings: &McSettings,
    seed: u64,
) -> Result<Vec<ChainOutput>> {
    let support = support_f64(config)?;
    let mut out = (0..chains as u64)
        .into_par_iter()
        .map(|k| GasChain::new(support.clone(), n, seed, k).map(|c| c.run(settings)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|c| c.stream);
    Ok(out)
}

pub fn pooled(outputs: &[ChainOutput]) -> Vec<f64> {
    outputs.iter().flat_map(|c| c.samples.iter().copied()).collect()
}

/// Theoretical CDF tabulated on a cosine grid per interval and interpolated.
#[derive(Clone, Debug)]
pub struct CdfTable {
    pieces: Vec<CdfPiece>,
}

#[derive(Clone, Debug)]
struct CdfPiece {
    lo: f64,
    hi: f64,
    /// CDF at `u_k = k/m`, `x(u) = lo + (hi-lo)(1-cos(pi u))/2`.
    values: Vec<f64>,
}

impl CdfPiece {
    fn u_of(&self, x: f64) -> f64 {
        let c = 1.0 - 2.0 * (x - self.lo) / (self.hi - self.lo);
        c.clamp(-1.0, 1.0).acos() / std::f64::consts::PI
    }
}

impl CdfTable {
    pub fn build(d: &DensitySpec, nodes_per_interval: usize, ctx: &RealContext) -> Result<CdfTable> {
        let m = nodes_per_interval.max(2);
        let mut pieces = Vec::with_capacity(d.curve.support.len());
        let mut base = ctx.zero();
        for (lo, hi) in &d.curve.support {
            let width = Float::with_val(ctx.bits(), hi - lo);
            let mut values = Vec::with_capacity(m + 1);
            values.push(base.to_f64());
            let mut prev = lo.clone();
            for k in 1..=m {
                let x = if k == m {
                    hi.clone()
                } else {
                    let u = ctx.pi() * k as u32 / m as u32;
                    lo.clone() + Float::with_val(ctx.bits(), &width * (1u32 - u.cos())) / 2u32
                };
                let part = quad_singular(|t| density_at(d, t), &prev, &x, ctx)?;
                base += part;
                values.push(base.to_f64());
                prev = x;
            }
            pieces.push(CdfPiece {
                lo: lo.to_f64(),
                hi: hi.to_f64(),
                values,
            });
        }
        Ok(CdfTable { pieces })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut below = 0.0;
        for p in &self.pieces {
            if x < p.lo {
                return below;
            }
            if x <= p.hi {
                let m = p.values.len() - 1;
                let u = p.u_of(x) * m as f64;
                let k = (u.floor() as usize).min(m - 1);
                let f = u - k as f64;
                return p.values[k] * (1.0 - f) + p.values[k + 1] * f;
            }
            below = *p.values.last().expect("non-empty piece");
        }
        below
    }

    /// Inverse CDF by bisection, for synthetic controls.
    pub fn quantile(&self, q: f64) -> f64 {
        let lo0 = self.pieces.first().map_or(0.0, |p| p.lo);
        let hi0 = self.pieces.last().map_or(0.0, |p| p.hi);
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// One-sample Kolmogorov-Smirnov statistic of sorted samples against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / m).max((i + 1) as f64 / m - f)
    })
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct HistogramRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub empirical_density: f64,
    pub theoretical_density: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HistogramComparison {
    pub samples: usize,
    /// Largest per-bin gap between empirical and theoretical mass.
    pub sup_deviation: f64,
    pub ks_statistic: f64,
    pub rows: Vec<HistogramRow>,
}

/// `bins` equal-width bins per support interval.
pub fn histogram_compare(
    samples: &[f64],
    d: &DensitySpec,
    bins: usize,
    ctx: &RealContext,
) -> Result<HistogramComparison> {
    if bins == 0 || d.curve.support.is_empty() {
        return Err(ArcError::EmptyBins);
    }
    if samples.len() < MIN_POOLED_SAMPLES {
        return Err(ArcError::InvalidParameter(format!(
            "need at least {MIN_POOLED_SAMPLES} pooled samples, got {}",
            samples.len()
        )));
    }
    let table = CdfTable::build(d, 400, ctx)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let ks = ks_statistic(&sorted, |x| table.eval(x));
    let mut rows = Vec::new();
    let mut sup: f64 = 0.0;
    for (lo, hi) in &d.curve.support {
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        let w = (hi - lo) / bins as f64;
        for b in 0..bins {
            let a = lo + w * b as f64;
            let z = if b + 1 == bins { hi } else { a + w };
            let start = sorted.partition_point(|&x| x < a);
            let end = if b + 1 == bins {
                sorted.partition_point(|&x| x <= z)
            } else {
                sorted.partition_point(|&x| x < z)
            };
            let emp = (end - start) as f64 / m;
            let theo = table.eval(z) - table.eval(a);
            sup = sup.max((emp - theo).abs());
            rows.push(HistogramRow {
                bin_lo: a,
                bin_hi: z,
                empirical_density: emp / (z - a),
                theoretical_density: theo / (z - a),
            });
        }
    }
    Ok(HistogramComparison {
        samples: sorted.len(),
        sup_deviation: sup,
        ks_statistic: ks,
        rows,
    })
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut out = String::from("bin_lo,bin_hi,empirical_density,theoretical_density\n");
    for r in rows {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.bin_lo, r.bin_hi, r.empirical_density, r.theoretical_density
        ));
    }
    out
}

//! Monte Carlo experiment runner: scenario configuration, trial scoring,
//! aggregation, and CSV/JSON emission.

use crate::channel::{
    sample_channel_with, to_physical, AngularChannel, ClusterCount, PathGainModel,
};
use crate::discovery::{
    normalized_energy, plan, DiscoveryEngine, DiscoveryPlan, MeasurementSetup,
};
use crate::error::{Error, Result};
use crate::measure::{NoiseScaling, QuantizerSpec};
use crate::scalar::Real;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Which aggregate columns a run reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    PerfectK,
    AllK,
    AnyIncorrect,
    MeanIncorrect,
    MaxIncorrect,
    Mse,
    Energy,
}

impl MetricKind {
    pub fn all() -> Vec<MetricKind> {
        vec![
            MetricKind::PerfectK,
            MetricKind::AllK,
            MetricKind::AnyIncorrect,
            MetricKind::MeanIncorrect,
            MetricKind::MaxIncorrect,
            MetricKind::Mse,
            MetricKind::Energy,
        ]
    }

    fn parse(s: &str) -> Result<MetricKind> {
        Ok(match s {
            "perfect" => MetricKind::PerfectK,
            "all" => MetricKind::AllK,
            "any_incorrect" => MetricKind::AnyIncorrect,
            "mean_incorrect" => MetricKind::MeanIncorrect,
            "max_incorrect" => MetricKind::MaxIncorrect,
            "mse" => MetricKind::Mse,
            "energy" => MetricKind::Energy,
            other => {
                return Err(Error::InvalidConfig(format!("unknown metric `{other}`")))
            }
        })
    }

    fn name(&self) -> &'static str {
        match self {
            MetricKind::PerfectK => "p_err_perfect",
            MetricKind::AllK => "p_err_all",
            MetricKind::AnyIncorrect => "p_any_incorrect",
            MetricKind::MeanIncorrect => "mean_incorrect",
            MetricKind::MaxIncorrect => "max_incorrect",
            MetricKind::Mse => "mse",
            MetricKind::Energy => "e_t_db",
        }
    }
}

/// Full description of one simulation sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub l: usize,
    pub rx_code: String,
    pub tx_code: String,
    pub rx_ec_code: Option<String>,
    pub tx_ec_code: Option<String>,
    /// Per-path SNR grid in dB, anchored to the weakest admissible path.
    pub snr_db: Vec<f64>,
    /// ADC bits per rail; `None` models a perfect converter.
    pub adc_bits: Option<u32>,
    /// Explicit ADC full scale; `None` auto-calibrates from the scenario.
    pub full_scale: Option<f64>,
    pub runs: usize,
    pub seed: u64,
    pub n0_dbm: f64,
    pub mu_db: f64,
    pub window_db: f64,
    pub noise: NoiseScaling,
    /// Present: each cluster slot is kept with this probability.
    pub presence_prob: Option<f64>,
    pub threshold_scale: f64,
    pub metrics: Vec<MetricKind>,
}

impl ScenarioConfig {
    /// Baseline scenario; callers override the fields they care about.
    pub fn new(n_t: usize, n_r: usize, l: usize, rx_code: &str, tx_code: &str) -> Self {
        ScenarioConfig {
            n_t,
            n_r,
            l,
            rx_code: rx_code.into(),
            tx_code: tx_code.into(),
            rx_ec_code: None,
            tx_ec_code: None,
            snr_db: vec![0.0],
            adc_bits: None,
            full_scale: None,
            runs: 1000,
            seed: 0,
            n0_dbm: -95.0,
            mu_db: 136.0,
            window_db: 14.0,
            noise: NoiseScaling::Normalized,
            presence_prob: None,
            threshold_scale: crate::discovery::DEFAULT_THRESHOLD_SCALE,
            metrics: MetricKind::all(),
        }
    }

    /// Parse the flat `key = value` scenario format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n_t = None;
        let mut n_r = None;
        let mut l = None;
        let mut rx_code = None;
        let mut tx_code = None;
        let mut cfg_rest: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            match key.as_str() {
                "n_t" => n_t = Some(parse_num::<usize>(&key, &value)?),
                "n_r" => n_r = Some(parse_num::<usize>(&key, &value)?),
                "l" => l = Some(parse_num::<usize>(&key, &value)?),
                "rx_code" => rx_code = Some(value),
                "tx_code" => tx_code = Some(value),
                _ => cfg_rest.push((key, value)),
            }
        }
        let missing = |what: &str| Error::InvalidConfig(format!("missing required key `{what}`"));
        let mut cfg = ScenarioConfig::new(
            n_t.ok_or_else(|| missing("n_t"))?,
            n_r.ok_or_else(|| missing("n_r"))?,
            l.ok_or_else(|| missing("l"))?,
            &rx_code.ok_or_else(|| missing("rx_code"))?,
            &tx_code.ok_or_else(|| missing("tx_code"))?,
        );
        for (key, value) in cfg_rest {
            match key.as_str() {
                "rx_ec_code" => cfg.rx_ec_code = Some(value),
                "tx_ec_code" => cfg.tx_ec_code = Some(value),
                "snr_db" => {
                    cfg.snr_db = value
                        .split(',')
                        .map(|s| parse_num::<f64>("snr_db", s.trim()))
                        .collect::<Result<_>>()?;
                }
                "adc_bits" => {
                    cfg.adc_bits = if value == "perfect" {
                        None
                    } else {
                        Some(parse_num::<u32>(&key, &value)?)
                    };
                }
                "full_scale" => {
                    cfg.full_scale = if value == "auto" {
                        None
                    } else {
                        Some(parse_num::<f64>(&key, &value)?)
                    };
                }
                "runs" => cfg.runs = parse_num(&key, &value)?,
                "seed" => cfg.seed = parse_num(&key, &value)?,
                "n0_dbm" => cfg.n0_dbm = parse_num(&key, &value)?,
                "mu_db" => cfg.mu_db = parse_num(&key, &value)?,
                "window_db" => cfg.window_db = parse_num(&key, &value)?,
                "noise" => {
                    cfg.noise = match value.as_str() {
                        "normalized" => NoiseScaling::Normalized,
                        "combiner" => NoiseScaling::Combiner,
                        other => {
                            return Err(Error::InvalidConfig(format!(
                                "noise must be `normalized` or `combiner`, got `{other}`"
                            )))
                        }
                    };
                }
                "presence_prob" => cfg.presence_prob = Some(parse_num(&key, &value)?),
                "threshold_scale" => cfg.threshold_scale = parse_num(&key, &value)?,
                "metrics" => {
                    cfg.metrics = if value == "all" {
                        MetricKind::all()
                    } else {
                        value
                            .split(',')
                            .map(|s| MetricKind::parse(s.trim()))
                            .collect::<Result<_>>()?
                    };
                }
                other => {
                    return Err(Error::InvalidConfig(format!("unknown key `{other}`")));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::InvalidConfig("snr_db grid is empty".into()));
        }
        if self.rx_ec_code.is_some() != self.tx_ec_code.is_some() {
            return Err(Error::InvalidConfig(
                "error correction needs both rx_ec_code and tx_ec_code".into(),
            ));
        }
        if let Some(p) = self.presence_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(
                    "presence_prob must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn noise_power_mw(&self) -> f64 {
        10f64.powf(self.n0_dbm / 10.0)
    }

    pub fn gain_model(&self) -> PathGainModel {
        PathGainModel::new(self.mu_db, self.window_db)
    }

    /// Pilot power that puts the weakest admissible path at `snr_db`.
    pub fn pilot_power(&self, snr_db: f64) -> f64 {
        let a_min = self.gain_model().floor_amplitude();
        10f64.powf(snr_db / 10.0) * self.noise_power_mw() / (a_min * a_min)
    }

    pub fn build_plan(&self) -> Result<DiscoveryPlan> {
        let ec = match (&self.rx_ec_code, &self.tx_ec_code) {
            (Some(r), Some(t)) => Some((r.as_str(), t.as_str())),
            _ => None,
        };
        plan(self.n_t, self.n_r, self.l, &self.rx_code, &self.tx_code, ec)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse `{value}` for key `{key}`")))
}

/// Aggregates for one SNR point.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricsRecord {
    pub snr_db: f64,
    pub e_t_db: f64,
    pub measurement_count: usize,
    pub runs: usize,
    /// Error probability of perfect-k discovery, k = 1..=L.
    pub p_err_perfect: Vec<f64>,
    /// Error probability of all-k discovery, k = 1..=L.
    pub p_err_all: Vec<f64>,
    pub p_any_incorrect: f64,
    pub mean_incorrect: f64,
    pub max_incorrect: usize,
    /// Mean normalized MSE over trials with a nonzero true channel.
    pub mse: f64,
    /// Trials excluded from the MSE mean because the truth was zero.
    pub mse_excluded: usize,
}

/// Outcome of scoring one trial at one k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreOutcome {
    pub all_k: bool,
    pub perfect_k: bool,
    pub incorrect: usize,
}

/// Score an estimate against the truth for the strongest `k` paths.
///
/// All-k: the k strongest true bins all appear in the estimate. Perfect-k:
/// all-k and the estimate has no bins outside the true support.
pub fn score<T: Real>(
    truth: &AngularChannel<T>,
    estimate: &AngularChannel<T>,
    k: usize,
) -> ScoreOutcome {
    let truth_support = truth.support();
    let strongest = strongest_bins(truth, k);
    let est_support = estimate.support();
    let all_k = strongest.iter().all(|b| est_support.contains(b));
    let incorrect = est_support
        .iter()
        .filter(|b| !truth_support.contains(b))
        .count();
    ScoreOutcome {
        all_k,
        perfect_k: all_k && incorrect == 0,
        incorrect,
    }
}

fn strongest_bins<T: Real>(truth: &AngularChannel<T>, k: usize) -> Vec<(usize, usize)> {
    let mut ranked: Vec<_> = truth.clusters().to_vec();
    ranked.sort_by(|a, b| {
        b.gain
            .norm_sqr()
            .partial_cmp(&a.gain.norm_sqr())
            .unwrap()
            .then(a.rx_bin.cmp(&b.rx_bin))
            .then(a.tx_bin.cmp(&b.tx_bin))
    });
    ranked
        .iter()
        .take(k)
        .map(|c| (c.rx_bin, c.tx_bin))
        .collect()
}

/// `||Q^a - Q_hat^a||_F^2 / ||Q^a||_F^2`; `None` for a zero truth channel.
pub fn normalized_mse<T: Real>(
    truth: &AngularChannel<T>,
    estimate: &AngularChannel<T>,
) -> Option<f64> {
    let denom = truth.frobenius_norm_sqr();
    if denom.is_zero() {
        return None;
    }
    let mut num = T::zero();
    let mut seen = Vec::with_capacity(estimate.clusters().len());
    for e in estimate.clusters() {
        let t = truth
            .clusters()
            .iter()
            .find(|c| c.rx_bin == e.rx_bin && c.tx_bin == e.tx_bin);
        let want = t.map_or(num_complex::Complex::new(T::zero(), T::zero()), |c| c.gain);
        num = num + (e.gain - want).norm_sqr();
        seen.push((e.rx_bin, e.tx_bin));
    }
    for c in truth.clusters() {
        if !seen.contains(&(c.rx_bin, c.tx_bin)) {
            num = num + c.gain.norm_sqr();
        }
    }
    Some((num / denom).as_f64())
}

struct TrialOutcome {
    perfect: Vec<bool>,
    all: Vec<bool>,
    incorrect: usize,
    mse: Option<f64>,
}

fn trial_rng(seed: u64, snr_index: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&snr_index.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..32].copy_from_slice(&0x5eed_0f_beac0de_u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Run the configured sweep. Trials are distributed over a worker pool; each
/// owns an RNG stream keyed by (seed, SNR index, trial index), so results do
/// not depend on the worker count.
pub fn run_scenario<T: Real>(cfg: &ScenarioConfig) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    let plan = cfg.build_plan()?;
    let engine = DiscoveryEngine::<T>::new(plan)?;
    let model = cfg.gain_model();
    let n0 = cfg.noise_power_mw();
    let count = match cfg.presence_prob {
        None => ClusterCount::Exact,
        Some(p) => ClusterCount::UpTo(p),
    };
    let max_rx_row_weight = (0..engine.plan().rx_rows().rows())
        .map(|i| engine.plan().rx_rows().row_weight(i))
        .max()
        .unwrap_or(1);
    let mut records = Vec::with_capacity(cfg.snr_db.len());
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let p = cfg.pilot_power(snr_db);
        let quantizer = match cfg.adc_bits {
            None => QuantizerSpec::perfect(),
            Some(b) => {
                let fs = cfg.full_scale.unwrap_or_else(|| {
                    // outermost level at the largest plausible combined signal
                    let (_, peak) = model.composite_bounds(cfg.n_t, cfg.n_r);
                    max_rx_row_weight as f64 * peak * p.sqrt()
                });
                QuantizerSpec::new(b, T::of(fs))
            }
        };
        let setup = MeasurementSetup {
            pilot_power: T::of(p),
            noise_power: T::of(n0),
            quantizer,
            noise_scaling: cfg.noise,
            threshold_scale: T::of(cfg.threshold_scale),
        };
        let outcomes: Vec<TrialOutcome> = (0..cfg.runs)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.seed, si as u64, trial as u64);
                let truth = sample_channel_with::<T, _>(
                    &mut rng, cfg.n_t, cfg.n_r, cfg.l, &model, count,
                )
                .expect("validated plan admits the sampler");
                let q = to_physical(&truth, engine.rx_basis(), engine.tx_basis())
                    .expect("engine bases match the channel");
                let res = engine
                    .discover(&q, &setup, &mut rng)
                    .expect("engine matches the plan");
                let per_k: Vec<ScoreOutcome> = (1..=cfg.l)
                    .map(|k| score(&truth, &res.q_hat, k))
                    .collect();
                TrialOutcome {
                    perfect: per_k.iter().map(|s| s.perfect_k).collect(),
                    all: per_k.iter().map(|s| s.all_k).collect(),
                    incorrect: per_k.first().map_or_else(
                        || score(&truth, &res.q_hat, 0).incorrect,
                        |s| s.incorrect,
                    ),
                    mse: normalized_mse(&truth, &res.q_hat),
                }
            })
            .collect();
        records.push(aggregate(cfg, &engine, snr_db, p, &outcomes));
    }
    Ok(records)
}

fn aggregate<T: Real>(
    cfg: &ScenarioConfig,
    engine: &DiscoveryEngine<T>,
    snr_db: f64,
    pilot_power: f64,
    outcomes: &[TrialOutcome],
) -> MetricsRecord {
    let runs = outcomes.len();
    let n = runs as f64;
    let mut p_err_perfect = vec![0.0; cfg.l];
    let mut p_err_all = vec![0.0; cfg.l];
    for o in outcomes {
        for k in 0..cfg.l {
            if !o.perfect[k] {
                p_err_perfect[k] += 1.0;
            }
            if !o.all[k] {
                p_err_all[k] += 1.0;
            }
        }
    }
    for v in p_err_perfect.iter_mut().chain(p_err_all.iter_mut()) {
        *v /= n;
    }
    let any_incorrect = outcomes.iter().filter(|o| o.incorrect > 0).count() as f64 / n;
    let mean_incorrect = outcomes.iter().map(|o| o.incorrect as f64).sum::<f64>() / n;
    let max_incorrect = outcomes.iter().map(|o| o.incorrect).max().unwrap_or(0);
    let (mse_sum, mse_count) = outcomes
        .iter()
        .filter_map(|o| o.mse)
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    let mse = if mse_count > 0 {
        mse_sum / mse_count as f64
    } else {
        0.0
    };
    let energy = crate::discovery::energy_of(engine.plan(), pilot_power);
    let e_t = normalized_energy(
        energy,
        cfg.noise_power_mw(),
        cfg.gain_model().floor_amplitude(),
    );
    MetricsRecord {
        snr_db,
        e_t_db: 10.0 * e_t.log10(),
        measurement_count: engine.plan().measurement_count(),
        runs,
        p_err_perfect,
        p_err_all,
        p_any_incorrect: any_incorrect,
        mean_incorrect,
        max_incorrect,
        mse,
        mse_excluded: runs - mse_count,
    }
}

/// Long-format CSV: one row per SNR point per metric (per k where ranked).
pub fn emit_csv<W: Write>(
    cfg: &ScenarioConfig,
    records: &[MetricsRecord],
    out: &mut W,
) -> Result<()> {
    writeln!(out, "snr_db,e_t_db,m,runs,metric,k,value")?;
    for r in records {
        let mut push = |metric: &str, k: Option<usize>, value: f64| -> Result<()> {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.snr_db,
                r.e_t_db,
                r.measurement_count,
                r.runs,
                metric,
                k.map_or(String::new(), |k| k.to_string()),
                value
            )?;
            Ok(())
        };
        for metric in &cfg.metrics {
            match metric {
                MetricKind::PerfectK => {
                    for k in 1..=cfg.l {
                        push(metric.name(), Some(k), r.p_err_perfect[k - 1])?;
                    }
                }
                MetricKind::AllK => {
                    for k in 1..=cfg.l {
                        push(metric.name(), Some(k), r.p_err_all[k - 1])?;
                    }
                }
                MetricKind::AnyIncorrect => push(metric.name(), None, r.p_any_incorrect)?,
                MetricKind::MeanIncorrect => push(metric.name(), None, r.mean_incorrect)?,
                MetricKind::MaxIncorrect => push(metric.name(), None, r.max_incorrect as f64)?,
                MetricKind::Mse => push(metric.name(), None, r.mse)?,
                MetricKind::Energy => push(metric.name(), None, r.e_t_db)?,
            }
        }
    }
    Ok(())
}

/// Structured JSON: config echo plus the full records.
pub fn emit_json<W: Write>(
    cfg: &ScenarioConfig,
    records: &[MetricsRecord],
    out: &mut W,
) -> Result<()> {
    #[derive(Serialize)]
    struct Output<'a> {
        config: &'a ScenarioConfig,
        records: &'a [MetricsRecord],
    }
    let doc = Output {
        config: cfg,
        records,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}

//! Monte Carlo selectability estimation.
//!
//! Trials are independent: trial `t` draws all coins from the counter-based
//! stream keyed by `(master seed, t)`, so results are reproducible and
//! aggregate by order-independent integer addition — reports are bit-identical
//! for any worker count. Every trial is audited against the structural
//! invariants (forest output, one pick per bucket, sampled edges never picked,
//! greedy selection of unblocked edges).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use rocrs_core::ordering::Ordering;
use rocrs_core::rng::{tag, CoinBox};
use rocrs_core::scheme::{
    audit_selection, realize_activity, realize_sample, run_prior_knowledge, run_rocrs,
    run_sample_ocrs, random_order_events, AuditViolation, SchemeError, TieBreak,
};
use rocrs_core::{CoinConfig, Frac, ForestChecker, Instance, Labeling};

use crate::adversary::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    Prior,
    Rocrs,
    SampleOcrs,
}

impl SchemeId {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Prior => "prior",
            SchemeId::Rocrs => "rocrs",
            SchemeId::SampleOcrs => "sample-ocrs",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<SchemeId, String> {
        match s {
            "prior" => Ok(SchemeId::Prior),
            "rocrs" => Ok(SchemeId::Rocrs),
            "sample-ocrs" => Ok(SchemeId::SampleOcrs),
            other => Err(format!(
                "unknown scheme '{}' (expected prior, rocrs, or sample-ocrs)",
                other
            )),
        }
    }
}

#[derive(Debug)]
pub enum HarnessError {
    Scheme(SchemeError),
    /// A structural invariant failed in one trial.
    Audit { trial: u64, violation: AuditViolation },
    /// The sample-based OCRS needs an adversary strategy.
    AdversaryRequired,
    /// MOFS inputs must be forests covering the ground set.
    BadForestCover(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Scheme(e) => write!(f, "{}", e),
            HarnessError::Audit { trial, violation } => {
                write!(f, "trial {}: {}", trial, violation)
            }
            HarnessError::AdversaryRequired => {
                write!(f, "scheme sample-ocrs needs an adversary strategy")
            }
            HarnessError::BadForestCover(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<SchemeError> for HarnessError {
    fn from(e: SchemeError) -> HarnessError {
        HarnessError::Scheme(e)
    }
}

/// Harness configuration: scheme coins, selectability targets, workers.
#[derive(Debug, Clone, Copy)]
pub struct HarnessConfig {
    pub coin: CoinConfig,
    /// Target denominator of the prior-knowledge scheme (target = x/16).
    pub prior_target_den: i64,
    /// Target denominator of the sample-based schemes (target = x/96).
    pub target_den: i64,
    /// Worker threads; 0 uses the library default pool.
    pub workers: usize,
}

impl Default for HarnessConfig {
    fn default() -> HarnessConfig {
        HarnessConfig {
            coin: CoinConfig::default(),
            prior_target_den: 16,
            target_den: 96,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub edge: usize,
    pub u: usize,
    pub v: usize,
    pub x: Frac,
    pub picks: u64,
}

/// Per-edge selection frequencies against the `c·x_e` target.
#[derive(Debug, Clone)]
pub struct SelectabilityReport {
    pub scheme: String,
    pub adversary: Option<String>,
    pub seed: u64,
    pub trials: u64,
    /// Wall-clock milliseconds; informational, never serialized into the CSV.
    pub wall_ms: u128,
    /// Targets are `x_e / target_den`.
    pub target_den: i64,
    pub rows: Vec<ReportRow>,
}

impl SelectabilityReport {
    pub fn freq(&self, row: &ReportRow) -> f64 {
        row.picks as f64 / self.trials as f64
    }

    /// One-sided confidence margin `4·sqrt(f(1−f)/N + 1/N)`.
    pub fn margin(&self, row: &ReportRow) -> f64 {
        let f = self.freq(row);
        let n = self.trials as f64;
        4.0 * (f * (1.0 - f) / n + 1.0 / n).sqrt()
    }

    pub fn lower(&self, row: &ReportRow) -> f64 {
        (self.freq(row) - self.margin(row)).max(0.0)
    }

    pub fn target(&self, row: &ReportRow) -> f64 {
        row.x.to_f64() / self.target_den as f64
    }

    /// One-sided test: the target is not violated beyond noise.
    pub fn pass(&self, row: &ReportRow) -> bool {
        self.freq(row) + self.margin(row) >= self.target(row)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|row| self.pass(row))
    }

    /// CSV serialization: a header comment row, then one row per edge.
    /// Deliberately excludes wall-clock and worker count so reruns are
    /// byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# scheme={} seed={} trials={} adversary={}\n",
            self.scheme,
            self.seed,
            self.trials,
            self.adversary.as_deref().unwrap_or("-"),
        );
        out.push_str("edge_id,u,v,x,picks,trials,freq,lower,target,pass\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.9},{:.9},{:.9},{}\n",
                row.edge,
                row.u,
                row.v,
                row.x,
                row.picks,
                self.trials,
                self.freq(row),
                self.lower(row),
                self.target(row),
                self.pass(row),
            ));
        }
        out
    }
}

/// Runs `trials` independent trials of `run_one`, which must add its picks
/// into the per-edge counter slice. Aggregation is an order-independent sum.
fn run_counted<F>(
    trials: u64,
    m: usize,
    workers: usize,
    run_one: F,
) -> Result<Vec<u64>, HarnessError>
where
    F: Fn(u64, &mut [u64]) -> Result<(), HarnessError> + Sync,
{
    let body = || {
        (0..trials as usize)
            .into_par_iter()
            .with_min_len(1024)
            .try_fold(
                || vec![0u64; m],
                |mut acc: Vec<u64>, t| {
                    run_one(t as u64, &mut acc)?;
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![0u64; m],
                |mut a, b| {
                    for (slot, add) in a.iter_mut().zip(b) {
                        *slot += add;
                    }
                    Ok(a)
                },
            )
    };
    if workers == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(body)
    }
}

/// Estimates per-edge selection frequencies of the given scheme over
/// independent trials with the algorithm's own on-the-fly random tiebreak.
pub fn estimate_selectability(
    scheme: SchemeId,
    instance: &Instance,
    trials: u64,
    seed: u64,
    adversary: Option<Strategy>,
    cfg: &HarnessConfig,
) -> Result<SelectabilityReport, HarnessError> {
    if scheme == SchemeId::SampleOcrs && adversary.is_none() {
        return Err(HarnessError::AdversaryRequired);
    }
    let m = instance.edge_count();
    let n = instance.vertex_count();
    let coin = cfg.coin;
    let start = Instant::now();
    let picks = run_counted(trials, m, cfg.workers, |t, acc| {
        let coins = CoinBox::for_trial(seed, t);
        let activity = realize_activity(instance, &coins);
        let sel = match scheme {
            SchemeId::Prior => {
                let mut arrival: Vec<usize> = (0..m).collect();
                coins.stream(tag::ARRIVAL).shuffle(&mut arrival);
                run_prior_knowledge(
                    instance,
                    &activity,
                    &arrival,
                    TieBreak::OnTheFly,
                    &coins,
                    &coin,
                )?
            }
            SchemeId::Rocrs => {
                let mut events = random_order_events(instance, &activity, &coins);
                // Enforce the information model inside the harness too: the
                // scheme never receives post-sample marginals.
                let s = coins.binomial(m, coin.sample_rate.num(), coin.sample_rate.den());
                for ev in &mut events[s..] {
                    ev.x = None;
                }
                run_rocrs(&events, m, n, TieBreak::OnTheFly, &coins, &coin)?
            }
            SchemeId::SampleOcrs => {
                let strategy = adversary.expect("checked above");
                let sample = realize_sample(instance, &coins, &coin);
                let order = strategy.order(instance, &sample, seed);
                run_sample_ocrs(
                    instance,
                    &activity,
                    &sample,
                    &order,
                    TieBreak::OnTheFly,
                    &coins,
                    &coin,
                )?
            }
        };
        audit_selection(instance, &sel)
            .map_err(|violation| HarnessError::Audit { trial: t, violation })?;
        for &id in &sel.picked {
            acc[id] += 1;
        }
        Ok(())
    })?;
    let rows = instance
        .edges()
        .iter()
        .map(|e| ReportRow {
            edge: e.id,
            u: e.u,
            v: e.v,
            x: instance.x(e.id),
            picks: picks[e.id],
        })
        .collect();
    Ok(SelectabilityReport {
        scheme: scheme.name().to_string(),
        adversary: adversary.map(|s| s.name().to_string()),
        seed,
        trials,
        wall_ms: start.elapsed().as_millis(),
        target_den: match scheme {
            SchemeId::Prior => cfg.prior_target_den,
            _ => cfg.target_den,
        },
        rows,
    })
}

/// The fair-selection driver: builds the uniform point `x = 1/k` on the union
/// of `k` forests and runs the random-order scheme against target `1/(96k)`.
pub fn mofs_run(
    vertex_count: usize,
    skeleton: &[(usize, usize)],
    forests: &[Vec<usize>],
    trials: u64,
    seed: u64,
    cfg: &HarnessConfig,
) -> Result<SelectabilityReport, HarnessError> {
    let k = forests.len();
    if k == 0 {
        return Err(HarnessError::BadForestCover("no forests given".into()));
    }
    let mut covered = vec![false; skeleton.len()];
    for ids in forests {
        for &id in ids {
            if id >= skeleton.len() {
                return Err(HarnessError::BadForestCover(format!(
                    "edge id {} outside the skeleton",
                    id
                )));
            }
            covered[id] = true;
        }
    }
    if !covered.iter().all(|&c| c) {
        return Err(HarnessError::BadForestCover(
            "the forests do not cover the ground set".into(),
        ));
    }
    for (i, ids) in forests.iter().enumerate() {
        let mut checker = ForestChecker::new(vertex_count);
        for &id in ids {
            let (u, v) = skeleton[id];
            if !checker.add_edge(u, v) {
                return Err(HarnessError::BadForestCover(format!(
                    "input set {} is not a forest",
                    i
                )));
            }
        }
    }
    // The ground set is a union of k forests, so the uniform point x = 1/k
    // lies in the forest polytope.
    let x = Frac::new(1, k as i64);
    let edges: Vec<(usize, usize, Frac)> =
        skeleton.iter().map(|&(u, v)| (u, v, x)).collect();
    let union_x = Instance::new(vertex_count, &edges)
        .map_err(|e| HarnessError::BadForestCover(e.to_string()))?;
    let mut report = estimate_selectability(
        SchemeId::Rocrs,
        &union_x,
        trials,
        seed,
        None,
        cfg,
    )?;
    report.scheme = format!("mofs-k{}", k);
    Ok(report)
}

/// Monte Carlo estimate of `E_S[x(E_v^S \ S)]` per vertex under a fixed
/// labeling: returns `(mean, standard error)` pairs.
pub fn estimate_offsample_load(
    instance: &Instance,
    labeling: &Labeling,
    trials: u64,
    seed: u64,
    cfg: &HarnessConfig,
) -> Vec<(f64, f64)> {
    let n = instance.vertex_count();
    let scale = instance.scale() as f64;
    let coin = cfg.coin;
    // Accumulate per-vertex sums and squared sums of integer loads.
    let sums = run_counted(trials, 2 * n, cfg.workers, |t, acc| {
        let coins = CoinBox::for_trial(seed, t);
        let sample = realize_sample(instance, &coins, &coin);
        let off: Vec<bool> = sample.iter().map(|&b| !b).collect();
        let ordering =
            Ordering::from_sample_full(instance, &sample, labeling).expect("complete labeling");
        for v in 0..n {
            let load = ordering
                .bucket_load_num(instance, v, Some(&off))
                .expect("full ordering") as u64;
            acc[v] += load;
            acc[n + v] += load * load;
        }
        Ok(())
    })
    .expect("no fallible steps");
    (0..n)
        .map(|v| {
            let t = trials as f64;
            let mean = sums[v] as f64 / t / scale;
            let mean_sq = sums[n + v] as f64 / t / (scale * scale);
            let var = (mean_sq - mean * mean).max(0.0);
            (mean, (var / t).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rocrs_core::fixtures;

    #[test]
    fn margins_shrink_with_more_trials() {
        let row = ReportRow {
            edge: 0,
            u: 0,
            v: 1,
            x: Frac::ONE,
            picks: 100,
        };
        let small = SelectabilityReport {
            scheme: "rocrs".into(),
            adversary: None,
            seed: 0,
            trials: 1000,
            wall_ms: 0,
            target_den: 96,
            rows: vec![row.clone()],
        };
        let mut big = small.clone();
        big.trials = 2000;
        big.rows[0].picks = 200; // same frequency
        assert!(big.margin(&big.rows[0]) < small.margin(&small.rows[0]));
        assert!(small.lower(&small.rows[0]) <= small.freq(&small.rows[0]));
    }

    #[test]
    fn prior_single_edge_matches_exact_law() {
        let single = Instance::from_f64(2, &[(0, 1, 1.0)]).unwrap();
        let cfg = HarnessConfig::default();
        let report =
            estimate_selectability(SchemeId::Prior, &single, 100_000, 7, None, &cfg).unwrap();
        let row = &report.rows[0];
        let f = report.freq(row);
        assert!((f - 0.125).abs() <= report.margin(row), "f = {}", f);
        assert!(report.all_pass());
    }

    #[test]
    fn reports_are_worker_count_independent() {
        let fig6 = fixtures::fig6();
        let mut cfg = HarnessConfig::default();
        cfg.workers = 1;
        let one =
            estimate_selectability(SchemeId::Rocrs, &fig6, 20_000, 3, None, &cfg).unwrap();
        cfg.workers = 4;
        let four =
            estimate_selectability(SchemeId::Rocrs, &fig6, 20_000, 3, None, &cfg).unwrap();
        assert_eq!(one.to_csv(), four.to_csv());
    }

    #[test]
    fn sample_ocrs_requires_an_adversary() {
        let fig5 = fixtures::fig5();
        let cfg = HarnessConfig::default();
        let err =
            estimate_selectability(SchemeId::SampleOcrs, &fig5, 10, 0, None, &cfg);
        assert!(matches!(err, Err(HarnessError::AdversaryRequired)));
    }

    #[test]
    fn pick_counts_match_csv_arithmetic() {
        let fig5 = fixtures::fig5();
        let cfg = HarnessConfig::default();
        let report = estimate_selectability(
            SchemeId::SampleOcrs,
            &fig5,
            5_000,
            1,
            Some(Strategy::Reverse),
            &cfg,
        )
        .unwrap();
        for row in &report.rows {
            let reconstructed = (report.freq(row) * report.trials as f64).round() as u64;
            assert_eq!(reconstructed, row.picks);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("# scheme=sample-ocrs seed=1 trials=5000 adversary=reverse\n"));
        assert_eq!(csv.lines().count(), 2 + fig5.edge_count());
    }

    #[test]
    fn mofs_rejects_bad_covers() {
        let skeleton = vec![(0, 1), (1, 2)];
        let cfg = HarnessConfig::default();
        let err = mofs_run(3, &skeleton, &[vec![0]], 10, 0, &cfg);
        assert!(matches!(err, Err(HarnessError::BadForestCover(_))));
        let err = mofs_run(3, &skeleton, &[], 10, 0, &cfg);
        assert!(matches!(err, Err(HarnessError::BadForestCover(_))));
    }

    #[test]
    fn mofs_uniform_point_runs() {
        let skeleton = vec![(0, 1), (1, 2), (2, 3)];
        let forests = vec![vec![0, 1, 2]];
        let cfg = HarnessConfig::default();
        let report = mofs_run(4, &skeleton, &forests, 20_000, 5, &cfg).unwrap();
        assert_eq!(report.scheme, "mofs-k1");
        assert!(report.rows.iter().all(|r| r.x == Frac::ONE));
        assert!(report.all_pass());
    }
}

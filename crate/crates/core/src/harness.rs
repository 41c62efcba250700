//! Experiment harness: synthetic order books, the curve-shape sweep, the
//! order-size trend study, and the statistics used to report them.

use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Variant;
use crate::model::{load_scenario, GapRule, Job, Machine, MutexGroup, Order, ProcessingOption, Scenario, ValidationReport};
use crate::moead::{self, ArchiveEntry, ConfigError, MoeadConfig, ParetoArchive};
use crate::scheduler::Instance;
use crate::valuecurve::ValueCurve;

const REFERENCE_SCENARIO: &str = include_str!("../data/reference_14.json");

/// The bundled 14-element order book.
///
/// Element `E01` carries the 12 (machine, mode) options of the worked
/// example: three machines with four modes each. The other elements scale
/// its durations up and its profits up sub-linearly, so large elements earn
/// less per second of plant time. All three machines share one mutex group,
/// which makes the plant a single serial resource.
pub fn reference_scenario() -> Scenario {
    load_scenario(REFERENCE_SCENARIO.as_bytes()).expect("bundled scenario parses")
}

/// The 14 `(D, Z)` curve shapes of the comparison table, in seconds.
pub fn default_dz_pairs() -> Vec<(f64, f64)> {
    [
        (5000, 10000),
        (5000, 15000),
        (10000, 15000),
        (10000, 20000),
        (15000, 20000),
        (15000, 25000),
        (20000, 25000),
        (20000, 30000),
        (25000, 30000),
        (25000, 35000),
        (30000, 35000),
        (30000, 40000),
        (35000, 40000),
        (35000, 45000),
    ]
    .into_iter()
    .map(|(d, z)| (d as f64, z as f64))
    .collect()
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid generator or sweep spec: {0}")]
    Spec(String),
    #[error("archive is empty")]
    EmptyArchive,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid scenario:\n{0}")]
    Scenario(#[from] ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub element_counts: Vec<usize>,
    pub scenarios_per_count: usize,
    pub machines: usize,
    pub modes_per_machine: usize,
    pub duration_range_s: (f64, f64),
    /// Tier-0 profit of an element's fastest mode is drawn from this range.
    pub base_profit_range: (f64, f64),
    /// Profit multiplier per machine tier; machine `k` earns `tier_growth^k`.
    pub tier_growth: f64,
    /// Relative profit increase from a machine's fastest to slowest mode.
    pub mode_profit_slope: f64,
    pub d_s: f64,
    pub z_s: f64,
    /// Put every machine into one mutex group.
    pub mutex_all_machines: bool,
    /// Alternate job classes and add this gap on every class change.
    pub changeover_gap_s: Option<f64>,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            element_counts: (7..=16).collect(),
            scenarios_per_count: 10,
            machines: 3,
            modes_per_machine: 4,
            duration_range_s: (1200.0, 3200.0),
            base_profit_range: (150.0, 250.0),
            tier_growth: 1.7,
            mode_profit_slope: 0.15,
            d_s: 30_000.0,
            z_s: 40_000.0,
            mutex_all_machines: false,
            changeover_gap_s: None,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: &str| Err(HarnessError::Spec(m.to_string()));
        let (lo, hi) = self.duration_range_s;
        let (plo, phi) = self.base_profit_range;
        if self.element_counts.is_empty() || self.element_counts.contains(&0) {
            return fail("element_counts must be non-empty and positive");
        }
        if self.machines == 0 || self.modes_per_machine == 0 {
            return fail("machines and modes_per_machine must be positive");
        }
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return fail("duration_range_s must be positive and ordered");
        }
        if !(plo > 0.0 && plo <= phi && phi.is_finite()) {
            return fail("base_profit_range must be positive and ordered");
        }
        if !(self.tier_growth > 0.0 && self.mode_profit_slope >= 0.0) {
            return fail("tier_growth must be > 0 and mode_profit_slope >= 0");
        }
        if !(self.d_s >= 0.0 && self.d_s < self.z_s && self.z_s.is_finite()) {
            return fail("curve needs 0 <= d_s < z_s");
        }
        if self.mutex_all_machines && self.machines < 2 {
            return fail("a mutex group needs at least 2 machines");
        }
        if let Some(g) = self.changeover_gap_s {
            if !(g >= 0.0 && g.is_finite()) {
                return fail("changeover_gap_s must be >= 0");
            }
        }
        Ok(())
    }
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// `size` one-job orders released at time 0 with a shared curve.
///
/// Machine `M<k>` is quality tier `k - 1`: higher tiers have shorter
/// durations and higher profits. The duration range is split into one band
/// per machine, the fastest band going to the highest tier. Within a machine
/// modes are numbered by ascending duration and earn ascending profit.
pub fn generate_scenario<R: Rng + ?Sized>(spec: &GeneratorSpec, size: usize, rng: &mut R) -> Scenario {
    let (lo, hi) = spec.duration_range_s;
    let band = (hi - lo) / spec.machines as f64;
    let machines: Vec<Machine> = (0..spec.machines)
        .map(|k| Machine {
            id: format!("M{}", k + 1),
            label: format!("tier {k}"),
        })
        .collect();
    let digits = size.to_string().len().max(2);

    let orders = (0..size)
        .map(|e| {
            let id = format!("E{:0digits$}", e + 1);
            let base = rng.random_range(spec.base_profit_range.0..=spec.base_profit_range.1);
            let mut options = Vec::with_capacity(spec.machines * spec.modes_per_machine);
            for (k, m) in machines.iter().enumerate() {
                let band_lo = lo + (spec.machines - 1 - k) as f64 * band;
                let mut durations: Vec<f64> = (0..spec.modes_per_machine)
                    .map(|_| round1(rng.random_range(band_lo..=band_lo + band)))
                    .collect();
                durations.sort_by(f64::total_cmp);
                let tier = spec.tier_growth.powi(k as i32);
                for (mode, d) in durations.into_iter().enumerate() {
                    let within = (d - band_lo) / band;
                    options.push(ProcessingOption {
                        machine_id: m.id.clone(),
                        mode_id: format!("Mode {}", mode + 1),
                        duration_s: d,
                        max_profit: round1(base * tier * (1.0 + spec.mode_profit_slope * within)),
                    });
                }
            }
            let gap_class = spec.changeover_gap_s.map(|_| format!("c{}", e % 2));
            Order {
                id: id.clone(),
                arrival_time_s: 0.0,
                curve: ValueCurve::new(spec.d_s, spec.z_s),
                jobs: vec![Job { id, gap_class, options }],
                precedence: vec![],
            }
        })
        .collect();

    let mutex_groups = if spec.mutex_all_machines {
        vec![MutexGroup {
            machine_ids: machines.iter().map(|m| m.id.clone()).collect(),
        }]
    } else {
        vec![]
    };
    let gap_rules = match spec.changeover_gap_s {
        Some(gap_s) => machines
            .iter()
            .flat_map(|m| {
                [("c0", "c1"), ("c1", "c0")].map(|(from, to)| GapRule {
                    machine_id: m.id.clone(),
                    from_class: from.into(),
                    to_class: to.into(),
                    gap_s,
                })
            })
            .collect(),
        None => vec![],
    };

    Scenario {
        machines,
        mutex_groups,
        gap_rules,
        orders,
    }
}

/// Every `(size, replicate, scenario)` of a generator spec.
pub fn generate_batch(spec: &GeneratorSpec) -> Result<Vec<(usize, usize, Scenario)>, HarnessError> {
    spec.validate()?;
    let mut out = Vec::new();
    for &size in &spec.element_counts {
        for k in 0..spec.scenarios_per_count {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario_seed(spec.seed, size, k));
            out.push((size, k, generate_scenario(spec, size, &mut rng)));
        }
    }
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for job `index` of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn scenario_seed(master: u64, size: usize, replicate: usize) -> u64 {
    derive_seed(derive_seed(master, size as u64), replicate as u64)
}

/// Max-profit entry; ties go to lower makespan, then fewer elements.
pub fn representative_point(archive: &ParetoArchive) -> Result<&ArchiveEntry, HarnessError> {
    archive
        .entries()
        .iter()
        .min_by(|a, b| {
            b.objectives
                .total_profit
                .total_cmp(&a.objectives.total_profit)
                .then(a.objectives.makespan_s.total_cmp(&b.objectives.makespan_s))
                .then(a.elements_produced.cmp(&b.elements_produced))
        })
        .ok_or(HarnessError::EmptyArchive)
}

/// Spearman rank correlation with average ranks for ties. Returns NaN when
/// either input is constant or shorter than two values.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return f64::NAN;
    }
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut k = i;
        while k + 1 < idx.len() && v[idx[k + 1]] == v[idx[i]] {
            k += 1;
        }
        let avg = (i + k) as f64 / 2.0 + 1.0;
        for &j in &idx[i..=k] {
            r[j] = avg;
        }
        i = k + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub dz_pairs: Vec<(f64, f64)>,
    pub variants: Vec<Variant>,
    pub optimizer: MoeadConfig,
    /// Independent runs per cell; their archives are merged before the
    /// representative point is taken.
    pub seeds_per_cell: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            dz_pairs: default_dz_pairs(),
            variants: Variant::ALL.to_vec(),
            optimizer: MoeadConfig::default(),
            seeds_per_cell: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d_s: f64,
    pub z_s: f64,
    pub variant: Variant,
    pub profit: f64,
    pub makespan_s: f64,
    pub elements_produced: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn row(&self, d_s: f64, z_s: f64, variant: Variant) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.d_s == d_s && r.z_s == z_s && r.variant == variant)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["d_s", "z_s", "variant", "profit", "makespan_s", "elements_produced"])?;
        for r in &self.rows {
            out.write_record([
                r.d_s.to_string(),
                r.z_s.to_string(),
                r.variant.to_string(),
                r.profit.to_string(),
                r.makespan_s.to_string(),
                r.elements_produced.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Optimizes `base` under every `(D, Z)` pair and variant, one row per cell.
pub fn run_sweep(spec: &SweepSpec, base: &Scenario) -> Result<SweepReport, HarnessError> {
    spec.optimizer.validate()?;
    if spec.seeds_per_cell == 0 {
        return Err(HarnessError::Spec("seeds_per_cell must be positive".into()));
    }
    if let Some(&(d, z)) = spec.dz_pairs.iter().find(|(d, z)| !(d < z)) {
        return Err(HarnessError::Spec(format!("curve pair ({d}, {z}) needs D < Z")));
    }
    let instances = spec
        .dz_pairs
        .iter()
        .map(|&(d, z)| Instance::new(&base.with_curve(d, z)))
        .collect::<Result<Vec<_>, _>>()?;

    let cells: Vec<(usize, usize)> = (0..spec.dz_pairs.len())
        .flat_map(|p| (0..spec.variants.len()).map(move |v| (p, v)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(p, v)| {
            let variant = spec.variants[v];
            let cell = (p * spec.variants.len() + v) as u64;
            let archives = (0..spec.seeds_per_cell)
                .map(|k| {
                    let cfg = MoeadConfig {
                        seed: derive_seed(spec.optimizer.seed, cell * spec.seeds_per_cell as u64 + k as u64),
                        ..spec.optimizer.clone()
                    };
                    moead::run(&instances[p], &cfg, variant)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let merged = ParetoArchive::merged(&archives);
            let rep = representative_point(&merged)?;
            let (d_s, z_s) = spec.dz_pairs[p];
            Ok(SweepRow {
                d_s,
                z_s,
                variant,
                profit: rep.objectives.total_profit,
                makespan_s: rep.objectives.makespan_s,
                elements_produced: rep.elements_produced,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(SweepReport { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSample {
    pub size: usize,
    pub replicate: usize,
    pub variant: Variant,
    pub profit: f64,
    pub makespan_s: f64,
    pub elements_produced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub size: usize,
    pub variant: Variant,
    pub mean_makespan_s: f64,
    pub mean_profit: f64,
    /// Rank correlation of bucket-mean makespan against size for this variant.
    pub spearman_makespan: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub rows: Vec<TrendRow>,
    pub samples: Vec<TrendSample>,
}

impl TrendReport {
    pub fn row(&self, size: usize, variant: Variant) -> Option<&TrendRow> {
        self.rows.iter().find(|r| r.size == size && r.variant == variant)
    }

    pub fn spearman(&self, variant: Variant) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.variant == variant)
            .map(|r| r.spearman_makespan)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["size", "variant", "mean_makespan_s", "mean_profit", "spearman_makespan"])?;
        for r in &self.rows {
            out.write_record([
                r.size.to_string(),
                r.variant.to_string(),
                r.mean_makespan_s.to_string(),
                r.mean_profit.to_string(),
                r.spearman_makespan.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Optimizes every generated scenario with both variants and summarizes
/// representative makespan and profit per order size.
pub fn trend_study(spec: &GeneratorSpec, cfg: &MoeadConfig) -> Result<TrendReport, HarnessError> {
    cfg.validate()?;
    let batch = generate_batch(spec)?;
    let instances = batch
        .iter()
        .map(|(_, _, s)| Instance::new(s))
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<(usize, Variant)> = (0..batch.len())
        .flat_map(|i| Variant::ALL.map(|v| (i, v)))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(i, variant)| {
            let (size, replicate, _) = batch[i];
            let run_cfg = MoeadConfig {
                seed: derive_seed(cfg.seed, (i * 2 + variant as usize) as u64),
                ..cfg.clone()
            };
            let archive = moead::run(&instances[i], &run_cfg, variant)?;
            let rep = representative_point(&archive)?;
            Ok(TrendSample {
                size,
                replicate,
                variant,
                profit: rep.objectives.total_profit,
                makespan_s: rep.objectives.makespan_s,
                elements_produced: rep.elements_produced,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let mut rows = Vec::new();
    for variant in Variant::ALL {
        let mut bucket_rows = Vec::new();
        for &size in &spec.element_counts {
            let bucket: Vec<&TrendSample> = samples
                .iter()
                .filter(|s| s.size == size && s.variant == variant)
                .collect();
            let n = bucket.len() as f64;
            bucket_rows.push(TrendRow {
                size,
                variant,
                mean_makespan_s: bucket.iter().map(|s| s.makespan_s).sum::<f64>() / n,
                mean_profit: bucket.iter().map(|s| s.profit).sum::<f64>() / n,
                spearman_makespan: f64::NAN,
            });
        }
        let sizes: Vec<f64> = bucket_rows.iter().map(|r| r.size as f64).collect();
        let makespans: Vec<f64> = bucket_rows.iter().map(|r| r.mean_makespan_s).collect();
        let rho = spearman(&sizes, &makespans);
        for r in &mut bucket_rows {
            r.spearman_makespan = rho;
        }
        rows.extend(bucket_rows);
    }
    Ok(TrendReport { rows, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Chromosome;
    use crate::model::validate_scenario;
    use crate::scheduler::ObjectiveVector;

    fn archive(points: &[(f64, f64, usize)]) -> ParetoArchive {
        let mut a = ParetoArchive::new();
        for &(m, p, e) in points {
            a.insert(ArchiveEntry {
                chromosome: Chromosome {
                    variant: Variant::Standard,
                    alloc: vec![],
                    prio: vec![],
                    incl: vec![],
                },
                objectives: ObjectiveVector::new(m, p),
                elements_produced: e,
            });
        }
        a
    }

    #[test]
    fn representative_is_max_profit() {
        let a = archive(&[(100.0, 10.0, 1), (200.0, 20.0, 2)]);
        let r = representative_point(&a).unwrap();
        assert_eq!((r.objectives.total_profit, r.objectives.makespan_s), (20.0, 200.0));

        // (200, 20) is dominated by (100, 20), so only the tie winner survives
        let a = archive(&[(200.0, 20.0, 2), (100.0, 20.0, 1)]);
        let r = representative_point(&a).unwrap();
        assert_eq!((r.objectives.total_profit, r.objectives.makespan_s), (20.0, 100.0));

        let a = archive(&[(5.0, 1.0, 1)]);
        assert_eq!(representative_point(&a).unwrap().objectives.makespan_s, 5.0);
        assert!(matches!(
            representative_point(&ParetoArchive::new()),
            Err(HarnessError::EmptyArchive)
        ));
    }

    #[test]
    fn spearman_known_values() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]), -1.0);
        // ranks (1,2,3,4,5) vs (2,1,4,3,5): 1 - 6*4/(5*24) = 0.8
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]) - 0.8).abs() < 1e-12);
        // tied y values get average ranks
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
        assert!(spearman(&[1.0, 2.0], &[5.0, 5.0]).is_nan());
    }

    #[test]
    fn generated_scenario_shape() {
        let spec = GeneratorSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = generate_scenario(&spec, 14, &mut rng);
        assert!(validate_scenario(&s).is_valid());
        assert_eq!(s.orders.len(), 14);
        assert_eq!(s.job_count(), 14);
        for o in &s.orders {
            assert_eq!(o.arrival_time_s, 0.0);
            assert_eq!(o.curve, ValueCurve::new(30_000.0, 40_000.0));
            let opts = &o.jobs[0].options;
            assert_eq!(opts.len(), 12);
            assert!(opts.iter().all(|p| (1200.0..=3200.0).contains(&p.duration_s)));
            for m in &s.machines {
                let mine: Vec<&ProcessingOption> = opts.iter().filter(|p| p.machine_id == m.id).collect();
                assert_eq!(mine.len(), 4);
                for w in mine.windows(2) {
                    assert!(w[0].duration_s <= w[1].duration_s);
                    assert!(w[0].max_profit <= w[1].max_profit);
                }
            }
            // top tier is fastest and most profitable
            let on = |id: &'static str| opts.iter().filter(move |p| p.machine_id == id);
            let m3_slowest = on("M3").map(|p| p.duration_s).fold(0.0, f64::max);
            let m1_fastest = on("M1").map(|p| p.duration_s).fold(f64::INFINITY, f64::min);
            assert!(m3_slowest <= m1_fastest);
            let m3_min_profit = on("M3").map(|p| p.max_profit).fold(f64::INFINITY, f64::min);
            let m1_max_profit = on("M1").map(|p| p.max_profit).fold(0.0, f64::max);
            assert!(m3_min_profit > m1_max_profit);
        }
    }

    #[test]
    fn generator_is_deterministic_and_flags_work() {
        let spec = GeneratorSpec {
            element_counts: vec![3, 5],
            scenarios_per_count: 2,
            mutex_all_machines: true,
            changeover_gap_s: Some(60.0),
            seed: 4,
            ..GeneratorSpec::default()
        };
        let a = generate_batch(&spec).unwrap();
        assert_eq!(a, generate_batch(&spec).unwrap());
        assert_eq!(a.len(), 4);
        assert_ne!(a[0].2, a[1].2);
        for (_, _, s) in &a {
            assert!(validate_scenario(s).is_valid());
            assert_eq!(s.mutex_groups.len(), 1);
            assert_eq!(s.gap_rules.len(), 6);
        }
        let bad = GeneratorSpec {
            duration_range_s: (10.0, 5.0),
            ..GeneratorSpec::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn reference_scenario_is_valid() {
        let s = reference_scenario();
        assert!(validate_scenario(&s).is_valid());
        assert_eq!(s.orders.len(), 14);
        assert_eq!(s.orders[0].jobs[0].options.len(), 12);
    }

    #[test]
    fn small_sweep_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = generate_scenario(&GeneratorSpec::default(), 3, &mut rng);
        let spec = SweepSpec {
            dz_pairs: vec![(1000.0, 2000.0), (3000.0, 6000.0)],
            optimizer: MoeadConfig {
                generations: 5,
                ..MoeadConfig::default().with_population(6)
            },
            ..SweepSpec::default()
        };
        let report = run_sweep(&spec, &base).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report, run_sweep(&spec, &base).unwrap());
        for r in &report.rows {
            if r.variant == Variant::Standard {
                assert_eq!(r.elements_produced, 3);
            } else {
                assert!(r.elements_produced <= 3);
            }
        }
        let bad = SweepSpec {
            dz_pairs: vec![(5.0, 5.0)],
            ..spec
        };
        assert!(matches!(run_sweep(&bad, &base), Err(HarnessError::Spec(_))));
    }

    #[test]
    fn small_trend_shape() {
        let spec = GeneratorSpec {
            element_counts: vec![2, 3, 4],
            scenarios_per_count: 2,
            ..GeneratorSpec::default()
        };
        let cfg = MoeadConfig {
            generations: 5,
            ..MoeadConfig::default().with_population(6)
        };
        let report = trend_study(&spec, &cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert_eq!(report.samples.len(), 12);
        assert!(report.row(3, Variant::Selection).is_some());
    }
}

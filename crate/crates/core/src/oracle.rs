//! Brute-force Pareto front of tiny instances.
//!
//! Every option assignment, every job dispatch permutation and, for the
//! selection variant, every inclusion subset is pushed through the scheduler.
//! Permutations are turned into strictly decreasing priorities, which reaches
//! every dispatch order a real-valued priority vector can produce.

use thiserror::Error;

use crate::encoding::Variant;
use crate::scheduler::{Instance, ObjectiveVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_jobs: usize,
    pub max_options: usize,
    /// Upper bound on the number of evaluated schedules.
    pub cap: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_jobs: 4,
            max_options: 3,
            cap: 1_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {jobs} jobs, limit is {limit}")]
    TooManyJobs { jobs: usize, limit: usize },
    #[error("job {job} has {options} options, limit is {limit}")]
    TooManyOptions { job: usize, options: usize, limit: usize },
    #[error("enumeration needs {size} evaluations, cap is {cap}")]
    TooLarge { size: u64, cap: u64 },
}

/// Number of schedules [`enumerate_front`] would evaluate, saturating.
pub fn enumeration_size(inst: &Instance, variant: Variant) -> u64 {
    let assignments = (0..inst.job_count()).fold(1u64, |acc, j| acc.saturating_mul(inst.option_count(j) as u64));
    let perms = (1..=inst.job_count() as u64).fold(1u64, |acc, k| acc.saturating_mul(k));
    let subsets = match variant {
        Variant::Standard => 1,
        Variant::Selection => 1u64.checked_shl(inst.order_count() as u32).unwrap_or(u64::MAX),
    };
    assignments.saturating_mul(perms).saturating_mul(subsets)
}

/// The exact non-dominated set, sorted by makespan ascending.
pub fn enumerate_front(
    inst: &Instance,
    variant: Variant,
    limits: &OracleLimits,
) -> Result<Vec<ObjectiveVector>, OracleError> {
    let n = inst.job_count();
    if n > limits.max_jobs {
        return Err(OracleError::TooManyJobs {
            jobs: n,
            limit: limits.max_jobs,
        });
    }
    if let Some(job) = (0..n).find(|&j| inst.option_count(j) > limits.max_options) {
        return Err(OracleError::TooManyOptions {
            job,
            options: inst.option_count(job),
            limit: limits.max_options,
        });
    }
    let size = enumeration_size(inst, variant);
    if size > limits.cap {
        return Err(OracleError::TooLarge { size, cap: limits.cap });
    }

    let m = inst.order_count();
    let subsets: Vec<Vec<bool>> = match variant {
        Variant::Standard => vec![vec![true; m]],
        Variant::Selection => (0..1u64 << m)
            .map(|mask| (0..m).map(|o| mask >> o & 1 == 1).collect())
            .collect(),
    };
    let perms = permutations(n);

    let mut points: Vec<ObjectiveVector> = Vec::new();
    let mut alloc = vec![0usize; n];
    let mut prio = vec![0.0f64; n];
    loop {
        for perm in &perms {
            // perm[k] is dispatched k-th
            for (k, &j) in perm.iter().enumerate() {
                prio[j] = (n - k) as f64 / (n + 1) as f64;
            }
            for included in &subsets {
                let o = inst.evaluate_dense(&alloc, &prio, included).objectives;
                if !points.contains(&o) {
                    points.push(o);
                }
            }
        }
        if !next_assignment(&mut alloc, |j| inst.option_count(j)) {
            break;
        }
    }

    let mut front: Vec<ObjectiveVector> = points
        .iter()
        .filter(|p| !points.iter().any(|q| q.dominates(p)))
        .copied()
        .collect();
    front.sort_by(|a, b| a.makespan_s.total_cmp(&b.makespan_s));
    Ok(front)
}

/// Odometer increment; false once every assignment has been visited.
fn next_assignment(alloc: &mut [usize], options: impl Fn(usize) -> usize) -> bool {
    for j in 0..alloc.len() {
        alloc[j] += 1;
        if alloc[j] < options(j) {
            return true;
        }
        alloc[j] = 0;
    }
    false
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                extend(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

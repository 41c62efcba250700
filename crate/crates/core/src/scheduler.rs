//! Fitness evaluation: a deterministic serial list scheduler.
//!
//! Jobs of included orders are dispatched one at a time. At each step the
//! ready job (all intra-order predecessors placed) with the highest priority
//! gene is placed on its allocated machine at the earliest start allowed by
//!
//! * the order's arrival time,
//! * the end of every predecessor,
//! * the machine's cursor plus any gap rule matching the previous job's class,
//! * the cursor of every mutex group the machine belongs to.
//!
//! Cursors only move forward; jobs are never inserted into earlier idle time.
//! Equal priorities fall back to the global job index (orders by id, then
//! jobs by id).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_scenario, Scenario, ValidationReport};
use crate::valuecurve::ValueCurve;

/// Per-job option choice and priority, plus per-order inclusion, keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodedGenome {
    pub allocation: BTreeMap<String, usize>,
    pub priority: BTreeMap<String, f64>,
    pub included: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub job_id: String,
    pub machine_id: String,
    pub mode_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// In dispatch order.
    pub placements: Vec<Placement>,
    pub order_completion: BTreeMap<String, f64>,
    pub makespan_s: f64,
    pub total_profit: f64,
    pub elements_produced: usize,
}

/// `(makespan, total profit)`; makespan is minimized, profit maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub makespan_s: f64,
    pub total_profit: f64,
}

impl ObjectiveVector {
    pub fn new(makespan_s: f64, total_profit: f64) -> Self {
        Self {
            makespan_s,
            total_profit,
        }
    }

    /// Both components in minimization form: `(makespan, -profit)`.
    #[inline]
    pub fn minimization(&self) -> [f64; 2] {
        [self.makespan_s, -self.total_profit]
    }

    /// No worse in both objectives and strictly better in at least one.
    #[inline]
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        self.makespan_s <= other.makespan_s
            && self.total_profit >= other.total_profit
            && (self.makespan_s < other.makespan_s || self.total_profit > other.total_profit)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("no allocation for job {0:?}")]
    MissingAllocation(String),
    #[error("allocation {index} for job {job:?} is out of range (job has {options} options)")]
    AllocationOutOfRange {
        job: String,
        index: usize,
        options: usize,
    },
    #[error("no finite priority for job {0:?}")]
    BadPriority(String),
}

#[derive(Debug, Clone)]
pub(crate) struct OptionInfo {
    pub machine: usize,
    pub duration_s: f64,
    pub max_profit: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct JobInfo {
    pub order: usize,
    /// (order position, job position) in the source scenario.
    pub source: (usize, usize),
    pub class: usize,
    pub options: Vec<OptionInfo>,
    pub preds: Vec<usize>,
    pub succs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct OrderInfo {
    pub source: usize,
    pub arrival_s: f64,
    pub curve: ValueCurve,
    pub jobs: std::ops::Range<usize>,
}

/// A validated scenario compiled to dense indices.
///
/// Jobs are numbered in global order (order id ascending, then job id
/// ascending); that numbering is the gene layout used by [`crate::encoding`].
#[derive(Debug, Clone)]
pub struct Instance {
    scenario: Scenario,
    pub(crate) orders: Vec<OrderInfo>,
    pub(crate) jobs: Vec<JobInfo>,
    machine_count: usize,
    machine_groups: Vec<Vec<usize>>,
    group_count: usize,
    /// Per machine: `(from_class, to_class, gap_s)`.
    gap_rules: Vec<Vec<(usize, usize, f64)>>,
}

/// Raw dispatch result for one job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Slot {
    pub job: usize,
    pub option: usize,
    pub start_s: f64,
    pub end_s: f64,
}

/// Objectives of one evaluated genome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub elements_produced: usize,
}

impl Instance {
    pub fn new(scenario: &Scenario) -> Result<Self, ValidationReport> {
        let report = validate_scenario(scenario);
        if !report.is_valid() {
            return Err(report);
        }

        let machine_index: HashMap<&str, usize> = scenario
            .machines
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect();
        let machine_count = scenario.machines.len();

        let mut machine_groups = vec![Vec::new(); machine_count];
        for (gi, g) in scenario.mutex_groups.iter().enumerate() {
            for id in &g.machine_ids {
                machine_groups[machine_index[id.as_str()]].push(gi);
            }
        }

        let mut class_index: HashMap<String, usize> = HashMap::new();
        let mut class_of = |name: &str| {
            let next = class_index.len();
            *class_index.entry(name.to_string()).or_insert(next)
        };

        let mut order_pos: Vec<usize> = (0..scenario.orders.len()).collect();
        order_pos.sort_by(|&a, &b| scenario.orders[a].id.cmp(&scenario.orders[b].id));

        let mut orders = Vec::with_capacity(order_pos.len());
        let mut jobs = Vec::with_capacity(scenario.job_count());
        for (oi, &op) in order_pos.iter().enumerate() {
            let o = &scenario.orders[op];
            let mut job_pos: Vec<usize> = (0..o.jobs.len()).collect();
            job_pos.sort_by(|&a, &b| o.jobs[a].id.cmp(&o.jobs[b].id));
            let first = jobs.len();
            let local: HashMap<&str, usize> = job_pos
                .iter()
                .enumerate()
                .map(|(k, &jp)| (o.jobs[jp].id.as_str(), first + k))
                .collect();
            for &jp in &job_pos {
                let j = &o.jobs[jp];
                let preds = o
                    .precedence
                    .iter()
                    .filter(|(_, succ)| *succ == j.id)
                    .map(|(pred, _)| local[pred.as_str()])
                    .collect();
                jobs.push(JobInfo {
                    order: oi,
                    source: (op, jp),
                    class: class_of(j.gap_class()),
                    options: j
                        .options
                        .iter()
                        .map(|p| OptionInfo {
                            machine: machine_index[p.machine_id.as_str()],
                            duration_s: p.duration_s,
                            max_profit: p.max_profit,
                        })
                        .collect(),
                    preds,
                    succs: Vec::new(),
                });
            }
            orders.push(OrderInfo {
                source: op,
                arrival_s: o.arrival_time_s,
                curve: o.curve,
                jobs: first..jobs.len(),
            });
        }

        for j in 0..jobs.len() {
            for p in jobs[j].preds.clone() {
                jobs[p].succs.push(j);
            }
        }

        let mut gap_rules = vec![Vec::new(); machine_count];
        for r in &scenario.gap_rules {
            // classes no job uses can never match
            let (Some(&from), Some(&to)) = (class_index.get(&r.from_class), class_index.get(&r.to_class))
            else {
                continue;
            };
            gap_rules[machine_index[r.machine_id.as_str()]].push((from, to, r.gap_s));
        }

        Ok(Self {
            scenario: scenario.clone(),
            orders,
            jobs,
            machine_count,
            machine_groups,
            group_count: scenario.mutex_groups.len(),
            gap_rules,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    /// Number of processing options of global job `job`.
    pub fn option_count(&self, job: usize) -> usize {
        self.jobs[job].options.len()
    }

    pub fn job_id(&self, job: usize) -> &str {
        let (o, j) = self.jobs[job].source;
        &self.scenario.orders[o].jobs[j].id
    }

    pub fn order_id(&self, order: usize) -> &str {
        &self.scenario.orders[self.orders[order].source].id
    }

    fn gap(&self, machine: usize, from: usize, to: usize) -> f64 {
        self.gap_rules[machine]
            .iter()
            .filter(|&&(f, t, _)| f == from && t == to)
            .map(|&(_, _, g)| g)
            .fold(0.0, f64::max)
    }

    /// Serial schedule generation over dense genes. `alloc` and `prio` are
    /// indexed by global job, `included` by global order.
    pub(crate) fn dispatch(&self, alloc: &[usize], prio: &[f64], included: &[bool]) -> Vec<Slot> {
        let n = self.jobs.len();
        let mut pending = vec![0usize; n];
        let mut ready = Vec::with_capacity(n);
        let mut total = 0;
        for (oi, o) in self.orders.iter().enumerate() {
            if !included[oi] {
                continue;
            }
            for j in o.jobs.clone() {
                total += 1;
                pending[j] = self.jobs[j].preds.len();
                if pending[j] == 0 {
                    ready.push(j);
                }
            }
        }

        let mut end = vec![0.0f64; n];
        let mut machine_cursor: Vec<Option<(f64, usize)>> = vec![None; self.machine_count];
        let mut group_cursor = vec![0.0f64; self.group_count];
        let mut slots = Vec::with_capacity(total);

        while let Some(pos) = pick(&ready, prio) {
            let j = ready.swap_remove(pos);
            let info = &self.jobs[j];
            let option = alloc[j];
            let opt = &info.options[option];
            let m = opt.machine;

            let mut start = self.orders[info.order].arrival_s;
            for &p in &info.preds {
                start = start.max(end[p]);
            }
            if let Some((cursor, last_class)) = machine_cursor[m] {
                start = start.max(cursor + self.gap(m, last_class, info.class));
            }
            for &g in &self.machine_groups[m] {
                start = start.max(group_cursor[g]);
            }
            let finish = start + opt.duration_s;

            end[j] = finish;
            machine_cursor[m] = Some((finish, info.class));
            for &g in &self.machine_groups[m] {
                group_cursor[g] = finish;
            }
            slots.push(Slot {
                job: j,
                option,
                start_s: start,
                end_s: finish,
            });

            for &s in &info.succs {
                pending[s] -= 1;
                if pending[s] == 0 {
                    ready.push(s);
                }
            }
        }
        debug_assert_eq!(slots.len(), total);
        slots
    }

    fn score(&self, slots: &[Slot], included: &[bool]) -> (Evaluation, Vec<Option<f64>>) {
        let mut completion: Vec<Option<f64>> = vec![None; self.orders.len()];
        let mut value = vec![0.0f64; self.orders.len()];
        let mut makespan = 0.0f64;
        for s in slots {
            let o = self.jobs[s.job].order;
            makespan = makespan.max(s.end_s);
            completion[o] = Some(completion[o].map_or(s.end_s, |c| c.max(s.end_s)));
            value[o] += self.jobs[s.job].options[s.option].max_profit;
        }
        let mut profit = 0.0;
        for (oi, o) in self.orders.iter().enumerate() {
            if let Some(et) = completion[oi] {
                profit += value[oi] * o.curve.factor(et);
            }
        }
        let eval = Evaluation {
            objectives: ObjectiveVector::new(makespan, profit),
            elements_produced: included.iter().filter(|&&b| b).count(),
        };
        (eval, completion)
    }

    /// Objectives of dense genes without materializing a [`Schedule`].
    pub(crate) fn evaluate_dense(&self, alloc: &[usize], prio: &[f64], included: &[bool]) -> Evaluation {
        let slots = self.dispatch(alloc, prio, included);
        self.score(&slots, included).0
    }

    pub(crate) fn schedule_dense(&self, alloc: &[usize], prio: &[f64], included: &[bool]) -> Schedule {
        let slots = self.dispatch(alloc, prio, included);
        let (eval, completion) = self.score(&slots, included);
        let placements = slots
            .iter()
            .map(|s| {
                let (o, j) = self.jobs[s.job].source;
                let job = &self.scenario.orders[o].jobs[j];
                let opt = &job.options[s.option];
                Placement {
                    job_id: job.id.clone(),
                    machine_id: opt.machine_id.clone(),
                    mode_id: opt.mode_id.clone(),
                    start_s: s.start_s,
                    end_s: s.end_s,
                }
            })
            .collect();
        let order_completion = completion
            .iter()
            .enumerate()
            .filter_map(|(oi, c)| c.map(|et| (self.order_id(oi).to_string(), et)))
            .collect();
        Schedule {
            placements,
            order_completion,
            makespan_s: eval.objectives.makespan_s,
            total_profit: eval.objectives.total_profit,
            elements_produced: eval.elements_produced,
        }
    }

    fn densify(&self, g: &DecodedGenome) -> Result<(Vec<usize>, Vec<f64>, Vec<bool>), GenomeError> {
        let mut alloc = Vec::with_capacity(self.jobs.len());
        let mut prio = Vec::with_capacity(self.jobs.len());
        for j in 0..self.jobs.len() {
            let id = self.job_id(j);
            let a = *g
                .allocation
                .get(id)
                .ok_or_else(|| GenomeError::MissingAllocation(id.to_string()))?;
            if a >= self.option_count(j) {
                return Err(GenomeError::AllocationOutOfRange {
                    job: id.to_string(),
                    index: a,
                    options: self.option_count(j),
                });
            }
            let p = g
                .priority
                .get(id)
                .copied()
                .filter(|p| p.is_finite())
                .ok_or_else(|| GenomeError::BadPriority(id.to_string()))?;
            alloc.push(a);
            prio.push(p);
        }
        // orders absent from `included` are produced
        let included = (0..self.orders.len())
            .map(|o| g.included.get(self.order_id(o)).copied().unwrap_or(true))
            .collect();
        Ok((alloc, prio, included))
    }
}

/// Position in `ready` of the highest-priority job; ties go to the lower index.
#[inline]
fn pick(ready: &[usize], prio: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (pos, &j) in ready.iter().enumerate() {
        best = match best {
            None => Some(pos),
            Some(b) => {
                let k = ready[b];
                if prio[j] > prio[k] || (prio[j] == prio[k] && j < k) {
                    Some(pos)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

pub fn build_schedule(inst: &Instance, g: &DecodedGenome) -> Result<Schedule, GenomeError> {
    let (alloc, prio, included) = inst.densify(g)?;
    Ok(inst.schedule_dense(&alloc, &prio, &included))
}

pub fn evaluate(inst: &Instance, g: &DecodedGenome) -> Result<(Schedule, ObjectiveVector), GenomeError> {
    let schedule = build_schedule(inst, g)?;
    let objectives = ObjectiveVector::new(schedule.makespan_s, schedule.total_profit);
    Ok((schedule, objectives))
}

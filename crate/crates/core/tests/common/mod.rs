//! Random scenarios and an independent schedule checker shared by the
//! integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use valuesched_core::model::{GapRule, Job, Machine, MutexGroup, Order, ProcessingOption, Scenario};
use valuesched_core::scheduler::{DecodedGenome, Schedule};
use valuesched_core::ValueCurve;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub orders: (usize, usize),
    pub jobs_per_order: (usize, usize),
    pub max_jobs: usize,
    pub options: (usize, usize),
    pub machines: usize,
    pub mutex: bool,
    pub gaps: bool,
    pub arrivals: bool,
    pub precedence: bool,
}

impl Shape {
    /// Up to 3 jobs, 3 options each, 2 machines.
    pub fn tiny(mutex: bool, gaps: bool) -> Self {
        Self {
            orders: (1, 3),
            jobs_per_order: (1, 2),
            max_jobs: 3,
            options: (1, 3),
            machines: 2,
            mutex,
            gaps,
            arrivals: true,
            precedence: true,
        }
    }

    pub fn medium() -> Self {
        Self {
            orders: (1, 6),
            jobs_per_order: (1, 4),
            max_jobs: 16,
            options: (1, 5),
            machines: 4,
            mutex: true,
            gaps: true,
            arrivals: true,
            precedence: true,
        }
    }
}

/// Integer durations and times keep every sum exact.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Scenario {
    let machines: Vec<Machine> = (1..=shape.machines)
        .map(|i| Machine {
            id: format!("M{i}"),
            label: String::new(),
        })
        .collect();
    let n_orders = rng.random_range(shape.orders.0..=shape.orders.1);
    let mut budget = shape.max_jobs;
    let mut orders = Vec::new();
    for o in 0..n_orders {
        if budget == 0 {
            break;
        }
        let n_jobs = rng.random_range(shape.jobs_per_order.0..=shape.jobs_per_order.1).min(budget);
        budget -= n_jobs;
        let jobs: Vec<Job> = (0..n_jobs)
            .map(|j| Job {
                id: format!("O{o}J{j}"),
                gap_class: shape.gaps.then(|| ["a", "b"][rng.random_range(0..2)].to_string()),
                options: (0..rng.random_range(shape.options.0..=shape.options.1))
                    .map(|k| ProcessingOption {
                        machine_id: machines[rng.random_range(0..shape.machines)].id.clone(),
                        mode_id: format!("mode{k}"),
                        duration_s: rng.random_range(1..=100) as f64,
                        max_profit: rng.random_range(1..=100) as f64,
                    })
                    .collect(),
            })
            .collect();
        let mut precedence = Vec::new();
        if shape.precedence {
            for a in 0..n_jobs {
                for b in a + 1..n_jobs {
                    if rng.random_bool(0.4) {
                        precedence.push((jobs[a].id.clone(), jobs[b].id.clone()));
                    }
                }
            }
        }
        let arrival = if shape.arrivals { rng.random_range(0..50) as f64 } else { 0.0 };
        let d = arrival + rng.random_range(0..300) as f64;
        let z = d + rng.random_range(1..300) as f64;
        orders.push(Order {
            id: format!("O{o}"),
            arrival_time_s: arrival,
            curve: ValueCurve::new(d, z),
            jobs,
            precedence,
        });
    }
    let mutex_groups = if shape.mutex && shape.machines >= 2 {
        vec![MutexGroup {
            machine_ids: machines[..2].iter().map(|m| m.id.clone()).collect(),
        }]
    } else {
        vec![]
    };
    let mut gap_rules = Vec::new();
    if shape.gaps {
        for m in &machines {
            for (from, to) in [("a", "b"), ("b", "a"), ("a", "a")] {
                if gap_rules.is_empty() || rng.random_bool(0.5) {
                    gap_rules.push(GapRule {
                        machine_id: m.id.clone(),
                        from_class: from.into(),
                        to_class: to.into(),
                        gap_s: rng.random_range(0..=60) as f64,
                    });
                }
            }
        }
    }
    Scenario {
        machines,
        mutex_groups,
        gap_rules,
        orders,
    }
}

fn factor(c: &ValueCurve, t: f64) -> f64 {
    if t <= c.d_s {
        1.0
    } else if t >= c.z_s {
        c.penalty_rate * (c.z_s - t)
    } else {
        1.0 - (t - c.d_s) / (c.z_s - c.d_s)
    }
}

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

/// Every way `sch` fails to be a feasible, correctly scored schedule of `g`.
pub fn violations(s: &Scenario, g: &DecodedGenome, sch: &Schedule) -> Vec<String> {
    let mut out = Vec::new();
    let placed: BTreeMap<&str, _> = sch.placements.iter().map(|p| (p.job_id.as_str(), p)).collect();
    if placed.len() != sch.placements.len() {
        out.push("job placed twice".to_string());
    }
    let class: BTreeMap<&str, &str> = s
        .orders
        .iter()
        .flat_map(|o| &o.jobs)
        .map(|j| (j.id.as_str(), j.gap_class.as_deref().unwrap_or(&j.id)))
        .collect();

    let mut profit = 0.0;
    let mut produced = 0;
    for o in &s.orders {
        let inc = g.included.get(&o.id).copied().unwrap_or(true);
        if !inc {
            for j in &o.jobs {
                if placed.contains_key(j.id.as_str()) {
                    out.push(format!("excluded job {} was placed", j.id));
                }
            }
            if sch.order_completion.contains_key(&o.id) {
                out.push(format!("excluded order {} has a completion time", o.id));
            }
            continue;
        }
        produced += 1;
        let mut et = f64::NEG_INFINITY;
        let mut max_profit = 0.0;
        for j in &o.jobs {
            let Some(p) = placed.get(j.id.as_str()) else {
                out.push(format!("job {} missing", j.id));
                continue;
            };
            let opt = &j.options[g.allocation[&j.id]];
            if p.machine_id != opt.machine_id || p.mode_id != opt.mode_id {
                out.push(format!("job {} not on its allocated option", j.id));
            }
            if p.end_s != p.start_s + opt.duration_s {
                out.push(format!("job {} end != start + duration", j.id));
            }
            if p.start_s < o.arrival_time_s {
                out.push(format!("job {} starts before release", j.id));
            }
            et = et.max(p.end_s);
            max_profit += opt.max_profit;
        }
        for (a, b) in &o.precedence {
            if let (Some(pa), Some(pb)) = (placed.get(a.as_str()), placed.get(b.as_str())) {
                if pb.start_s < pa.end_s {
                    out.push(format!("precedence {a} -> {b} violated"));
                }
            }
        }
        if sch.order_completion.get(&o.id) != Some(&et) {
            out.push(format!("order {} completion mismatch", o.id));
        }
        profit += max_profit * factor(&o.curve, et);
    }

    for (i, a) in sch.placements.iter().enumerate() {
        for b in &sch.placements[i + 1..] {
            let ia = (a.start_s, a.end_s);
            let ib = (b.start_s, b.end_s);
            if a.machine_id == b.machine_id && overlaps(ia, ib) {
                out.push(format!("{} and {} overlap on {}", a.job_id, b.job_id, a.machine_id));
            }
            for grp in &s.mutex_groups {
                let has = |m: &str| grp.machine_ids.iter().any(|x| x == m);
                if a.machine_id != b.machine_id && has(&a.machine_id) && has(&b.machine_id) && overlaps(ia, ib) {
                    out.push(format!("{} and {} overlap in a mutex group", a.job_id, b.job_id));
                }
            }
        }
    }

    for m in &s.machines {
        let mut on: Vec<_> = sch.placements.iter().filter(|p| p.machine_id == m.id).collect();
        on.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
        for w in on.windows(2) {
            let need = s
                .gap_rules
                .iter()
                .filter(|r| {
                    r.machine_id == m.id
                        && r.from_class == class[w[0].job_id.as_str()]
                        && r.to_class == class[w[1].job_id.as_str()]
                })
                .map(|r| r.gap_s)
                .fold(0.0, f64::max);
            if w[1].start_s < w[0].end_s + need {
                out.push(format!("gap between {} and {} too short", w[0].job_id, w[1].job_id));
            }
        }
    }

    let makespan = sch.placements.iter().map(|p| p.end_s).fold(0.0, f64::max);
    if sch.makespan_s != makespan {
        out.push(format!("makespan {} != {}", sch.makespan_s, makespan));
    }
    if (sch.total_profit - profit).abs() > 1e-9 * profit.abs().max(1.0) {
        out.push(format!("profit {} != {}", sch.total_profit, profit));
    }
    if sch.elements_produced != produced {
        out.push(format!("elements_produced {} != {}", sch.elements_produced, produced));
    }
    out
}

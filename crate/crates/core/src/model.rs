//! Plant and order-book domain types, validation, and the JSON scenario format.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::valuecurve::ValueCurve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub id: String,
    #[serde(default)]
    pub label: String,
}

/// Machines of which at most one may be processing at any instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MutexGroup {
    pub machine_ids: Vec<String>,
}

/// Mandatory idle time on `machine_id` between a job of `from_class`
/// and a directly following job of `to_class`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRule {
    pub machine_id: String,
    pub from_class: String,
    pub to_class: String,
    pub gap_s: f64,
}

/// One way of producing a job: a machine running in a given mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessingOption {
    pub machine_id: String,
    pub mode_id: String,
    pub duration_s: f64,
    pub max_profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_class: Option<String>,
    pub options: Vec<ProcessingOption>,
}

impl Job {
    /// Class label used by gap rules; the job id unless set explicitly.
    pub fn gap_class(&self) -> &str {
        self.gap_class.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub id: String,
    pub arrival_time_s: f64,
    pub curve: ValueCurve,
    pub jobs: Vec<Job>,
    /// Intra-order `(predecessor, successor)` job id pairs.
    #[serde(default)]
    pub precedence: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub machines: Vec<Machine>,
    #[serde(default)]
    pub mutex_groups: Vec<MutexGroup>,
    #[serde(default)]
    pub gap_rules: Vec<GapRule>,
    pub orders: Vec<Order>,
}

impl Scenario {
    pub fn job_count(&self) -> usize {
        self.orders.iter().map(|o| o.jobs.len()).sum()
    }

    /// Copy of the scenario with every order's curve replaced by `(d_s, z_s)`,
    /// keeping each order's penalty rate.
    pub fn with_curve(&self, d_s: f64, z_s: f64) -> Scenario {
        let mut s = self.clone();
        for o in &mut s.orders {
            o.curve.d_s = d_s;
            o.curve.z_s = z_s;
        }
        s
    }
}

/// A single invariant violation, located by a JSON-path-like string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Collects every invariant violation of `s`. An empty report means every
/// downstream module can resolve all ids and build schedules.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut machine_ids = HashSet::new();
    for (i, m) in s.machines.iter().enumerate() {
        if m.id.is_empty() {
            report.push(format!("machines[{i}]"), "empty machine id");
        }
        if !machine_ids.insert(m.id.as_str()) {
            report.push(format!("machines[{i}]"), format!("duplicate machine id {:?}", m.id));
        }
    }

    for (i, g) in s.mutex_groups.iter().enumerate() {
        let loc = format!("mutex_groups[{i}]");
        let distinct: BTreeSet<&str> = g.machine_ids.iter().map(String::as_str).collect();
        if distinct.len() != g.machine_ids.len() {
            report.push(&loc, "machine listed more than once");
        }
        if distinct.len() < 2 {
            report.push(&loc, "a mutex group needs at least 2 machines");
        }
        for id in &g.machine_ids {
            if !machine_ids.contains(id.as_str()) {
                report.push(&loc, format!("unknown machine {id:?}"));
            }
        }
    }

    for (i, r) in s.gap_rules.iter().enumerate() {
        let loc = format!("gap_rules[{i}]");
        if !machine_ids.contains(r.machine_id.as_str()) {
            report.push(&loc, format!("unknown machine {:?}", r.machine_id));
        }
        if !(r.gap_s.is_finite() && r.gap_s >= 0.0) {
            report.push(&loc, format!("gap_s must be finite and >= 0, got {}", r.gap_s));
        }
    }

    if s.orders.is_empty() {
        report.push("orders", "scenario has no orders");
    }

    let mut order_ids = HashSet::new();
    let mut job_ids = HashSet::new();
    for (oi, o) in s.orders.iter().enumerate() {
        let oloc = format!("orders[{oi}]");
        if !order_ids.insert(o.id.as_str()) {
            report.push(&oloc, format!("duplicate order id {:?}", o.id));
        }
        if !(o.arrival_time_s.is_finite() && o.arrival_time_s >= 0.0) {
            report.push(
                &oloc,
                format!("arrival_time_s must be finite and >= 0, got {}", o.arrival_time_s),
            );
        }
        validate_curve(o, &format!("{oloc}.curve"), &mut report);

        if o.jobs.is_empty() {
            report.push(&oloc, "order has no jobs");
        }
        for (ji, j) in o.jobs.iter().enumerate() {
            let jloc = format!("{oloc}.jobs[{ji}]");
            if !job_ids.insert(j.id.as_str()) {
                report.push(&jloc, format!("duplicate job id {:?}", j.id));
            }
            if j.options.is_empty() {
                report.push(&jloc, "job has no processing options");
            }
            let mut pairs = HashSet::new();
            for (pi, p) in j.options.iter().enumerate() {
                let ploc = format!("{jloc}.options[{pi}]");
                if !machine_ids.contains(p.machine_id.as_str()) {
                    report.push(&ploc, format!("unknown machine {:?}", p.machine_id));
                }
                if !(p.duration_s.is_finite() && p.duration_s > 0.0) {
                    report.push(&ploc, format!("duration_s must be finite and > 0, got {}", p.duration_s));
                }
                if !p.max_profit.is_finite() {
                    report.push(&ploc, "max_profit must be finite");
                }
                if !pairs.insert((p.machine_id.as_str(), p.mode_id.as_str())) {
                    report.push(
                        &ploc,
                        format!("duplicate option ({:?}, {:?})", p.machine_id, p.mode_id),
                    );
                }
            }
        }
        validate_precedence(o, &oloc, &mut report);
    }

    report
}

fn validate_curve(o: &Order, loc: &str, report: &mut ValidationReport) {
    let c = &o.curve;
    if !(c.d_s.is_finite() && c.z_s.is_finite()) {
        report.push(loc, "d_s and z_s must be finite");
        return;
    }
    if o.arrival_time_s > c.d_s {
        report.push(
            loc,
            format!("arrival time {} is after plateau end d_s {}", o.arrival_time_s, c.d_s),
        );
    }
    if c.d_s >= c.z_s {
        report.push(loc, format!("d_s {} must be < z_s {}", c.d_s, c.z_s));
    }
    if !(c.penalty_rate.is_finite() && c.penalty_rate >= 0.0) {
        report.push(loc, format!("penalty_rate must be finite and >= 0, got {}", c.penalty_rate));
    }
}

fn validate_precedence(o: &Order, oloc: &str, report: &mut ValidationReport) {
    let index: HashMap<&str, usize> = o
        .jobs
        .iter()
        .enumerate()
        .map(|(i, j)| (j.id.as_str(), i))
        .collect();
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut indegree = vec![0usize; o.jobs.len()];
    let mut dangling = false;
    for (ei, (a, b)) in o.precedence.iter().enumerate() {
        match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&pa), Some(&pb)) => {
                succ.entry(pa).or_default().push(pb);
                indegree[pb] += 1;
            }
            _ => {
                dangling = true;
                report.push(
                    format!("{oloc}.precedence[{ei}]"),
                    format!("edge ({a:?}, {b:?}) references a job outside this order"),
                );
            }
        }
    }
    if dangling {
        return;
    }
    // Kahn's algorithm; leftovers mean a cycle
    let mut queue: Vec<usize> = (0..o.jobs.len()).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        if let Some(next) = succ.get(&v) {
            for &w in next {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
    }
    if seen < o.jobs.len() {
        report.push(format!("{oloc}.precedence"), "cycle");
    }
}

/// Malformed scenario document.
#[derive(Debug, Error)]
#[error("scenario parse error at line {line}, column {column} (field `{path}`): {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
}

pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, ParseError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(scenario)
}

pub fn save_scenario(s: &Scenario) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(s).expect("scenario serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn option(machine: &str, mode: &str, d: f64, p: f64) -> ProcessingOption {
        ProcessingOption {
            machine_id: machine.into(),
            mode_id: mode.into(),
            duration_s: d,
            max_profit: p,
        }
    }

    fn minimal() -> Scenario {
        Scenario {
            machines: vec![Machine {
                id: "M1".into(),
                label: "mill".into(),
            }],
            mutex_groups: vec![],
            gap_rules: vec![],
            orders: vec![Order {
                id: "O1".into(),
                arrival_time_s: 0.0,
                curve: ValueCurve::new(100.0, 200.0),
                jobs: vec![Job {
                    id: "J1".into(),
                    gap_class: None,
                    options: vec![option("M1", "A", 10.0, 5.0)],
                }],
                precedence: vec![],
            }],
        }
    }

    #[test]
    fn minimal_is_valid() {
        assert!(validate_scenario(&minimal()).is_valid());
    }

    #[test]
    fn dangling_machine() {
        let mut s = minimal();
        s.orders[0].jobs[0].options[0].machine_id = "M9".into();
        let r = validate_scenario(&s);
        assert_eq!(r.violations.len(), 1, "{r}");
        assert!(r.violations[0].location.contains("options[0]"));
        assert!(r.violations[0].message.contains("M9"));
    }

    #[test]
    fn two_cycle() {
        let mut s = minimal();
        s.orders[0].jobs.push(Job {
            id: "J2".into(),
            gap_class: None,
            options: vec![option("M1", "A", 10.0, 5.0)],
        });
        s.orders[0].precedence = vec![("J1".into(), "J2".into()), ("J2".into(), "J1".into())];
        let r = validate_scenario(&s);
        assert_eq!(r.violations.len(), 1, "{r}");
        assert_eq!(r.violations[0].message, "cycle");
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let mut s = minimal();
        s.orders[0].precedence = vec![("J1".into(), "J1".into())];
        assert_eq!(validate_scenario(&s).violations[0].message, "cycle");
    }

    #[test]
    fn cross_order_edge_rejected() {
        let mut s = minimal();
        let mut o2 = s.orders[0].clone();
        o2.id = "O2".into();
        o2.jobs[0].id = "J2".into();
        s.orders.push(o2);
        s.orders[0].precedence = vec![("J1".into(), "J2".into())];
        let r = validate_scenario(&s);
        assert_eq!(r.violations.len(), 1, "{r}");
        assert!(r.violations[0].message.contains("outside this order"));
    }

    #[test]
    fn curve_violations() {
        let mut s = minimal();
        s.orders[0].curve = ValueCurve::new(200.0, 200.0);
        assert_eq!(validate_scenario(&s).violations.len(), 1);
        s.orders[0].curve = ValueCurve::new(100.0, 200.0).with_penalty(-1.0);
        assert_eq!(validate_scenario(&s).violations.len(), 1);
        s.orders[0].curve = ValueCurve::new(100.0, 200.0);
        s.orders[0].arrival_time_s = 150.0;
        assert_eq!(validate_scenario(&s).violations.len(), 1);
    }

    #[test]
    fn duplicates_and_empties() {
        let mut s = minimal();
        s.machines.push(s.machines[0].clone());
        s.orders[0].jobs[0].options.push(option("M1", "A", 3.0, 1.0));
        s.mutex_groups.push(MutexGroup {
            machine_ids: vec!["M1".into()],
        });
        s.gap_rules.push(GapRule {
            machine_id: "M1".into(),
            from_class: "a".into(),
            to_class: "b".into(),
            gap_s: -1.0,
        });
        let r = validate_scenario(&s);
        assert_eq!(r.violations.len(), 4, "{r}");

        let mut empty = minimal();
        empty.orders.clear();
        assert!(!validate_scenario(&empty).is_valid());
    }

    #[test]
    fn file_format_round_trip() {
        let mut s = minimal();
        s.orders[0].jobs[0].gap_class = Some("paint".into());
        s.mutex_groups.push(MutexGroup {
            machine_ids: vec!["M1".into(), "M1b".into()],
        });
        let bytes = save_scenario(&s);
        assert_eq!(load_scenario(&bytes).unwrap(), s);
    }

    #[test]
    fn documented_keys_parse() {
        let doc = br#"{
            "machines": [{"id": "M1", "label": "lathe"}, {"id": "M2", "label": "mill"}],
            "mutex_groups": [["M1", "M2"]],
            "gap_rules": [{"machine_id": "M1", "from_class": "a", "to_class": "b", "gap_s": 30}],
            "orders": [{"id": "O1", "arrival_time_s": 0,
                        "curve": {"d_s": 100, "z_s": 200, "penalty_rate": 0},
                        "jobs": [{"id": "J1", "gap_class": "a",
                                  "options": [{"machine_id": "M1", "mode_id": "1", "duration_s": 10, "max_profit": 3.5}]}],
                        "precedence": []}]
        }"#;
        let s = load_scenario(doc).unwrap();
        assert_eq!(s.mutex_groups[0].machine_ids, vec!["M1", "M2"]);
        assert_eq!(s.orders[0].jobs[0].gap_class(), "a");
        assert!(validate_scenario(&s).is_valid());
    }

    #[test]
    fn parse_errors_carry_locus() {
        let err = load_scenario(b"").unwrap_err();
        assert_eq!(err.line, 1);

        let doc = b"{\n \"machines\": [],\n \"orders\": [{\"id\": \"O1\", \"arrival_time_s\": \"soon\"}]\n}";
        let err = load_scenario(doc).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.path.contains("arrival_time_s"), "{err}");
    }
}

//! External archive of mutually non-dominated solutions.

use std::io;

use crate::encoding::Chromosome;
use crate::scheduler::ObjectiveVector;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub chromosome: Chromosome,
    pub objectives: ObjectiveVector,
    pub elements_produced: usize,
}

/// Non-dominated set under (minimize makespan, maximize profit).
///
/// Insertion order is preserved, which keeps seeded runs bit-identical.
/// An incoming point whose objective vector is already present is rejected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns whether `entry` was admitted.
    pub fn insert(&mut self, entry: ArchiveEntry) -> bool {
        let incoming = entry.objectives;
        if self
            .entries
            .iter()
            .any(|e| e.objectives == incoming || e.objectives.dominates(&incoming))
        {
            return false;
        }
        self.entries.retain(|e| !incoming.dominates(&e.objectives));
        self.entries.push(entry);
        true
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> impl Iterator<Item = ObjectiveVector> + '_ {
        self.entries.iter().map(|e| e.objectives)
    }

    /// Entries by ascending makespan.
    pub fn sorted_by_makespan(&self) -> Vec<&ArchiveEntry> {
        let mut v: Vec<&ArchiveEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| {
            a.objectives
                .makespan_s
                .total_cmp(&b.objectives.makespan_s)
                .then(b.objectives.total_profit.total_cmp(&a.objectives.total_profit))
        });
        v
    }

    pub fn is_mutually_non_dominated(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, a)| {
            self.entries
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || (!a.objectives.dominates(&b.objectives) && a.objectives != b.objectives))
        })
    }

    /// Union of several archives, filtered again.
    pub fn merged<'a>(archives: impl IntoIterator<Item = &'a ParetoArchive>) -> ParetoArchive {
        let mut out = ParetoArchive::new();
        for a in archives {
            for e in &a.entries {
                out.insert(e.clone());
            }
        }
        out
    }

    /// CSV with header `makespan_s,profit,elements_produced,genome`, sorted by
    /// makespan ascending.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["makespan_s", "profit", "elements_produced", "genome"])?;
        for e in self.sorted_by_makespan() {
            out.write_record([
                e.objectives.makespan_s.to_string(),
                e.objectives.total_profit.to_string(),
                e.elements_produced.to_string(),
                e.chromosome.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

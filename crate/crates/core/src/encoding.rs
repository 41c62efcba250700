//! Value-encoded chromosomes.
//!
//! A chromosome for `n` jobs carries `n` allocation genes (an index into the
//! job's processing options, i.e. machine plus mode) followed by `n` priority
//! genes in `[0, 1)`. The selection variant appends one inclusion gene per
//! order, so the search itself decides which elements get produced. Genes are
//! laid out in global job order, see [`Instance`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scheduler::{DecodedGenome, Evaluation, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Every ordered element is produced.
    Standard,
    /// Per-order inclusion genes decide what is produced.
    Selection,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Standard, Variant::Selection];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Selection => "selection",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = GenomeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Variant::Standard),
            "selection" => Ok(Variant::Selection),
            other => Err(GenomeParseError::UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub variant: Variant,
    pub alloc: Vec<usize>,
    pub prio: Vec<f64>,
    /// Empty for [`Variant::Standard`].
    pub incl: Vec<bool>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeParseError {
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
    #[error("genome is tagged {tagged} but {expected} was requested")]
    VariantMismatch { tagged: Variant, expected: Variant },
    #[error("expected {expected} genes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("gene {position}: {message}")]
    Gene { position: usize, message: String },
}

impl Chromosome {
    /// Gene count: `2n`, plus `m` inclusion genes for the selection variant.
    pub fn len(&self) -> usize {
        self.alloc.len() + self.prio.len() + self.incl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn random<R: Rng + ?Sized>(inst: &Instance, variant: Variant, rng: &mut R) -> Self {
        let n = inst.job_count();
        let alloc = (0..n).map(|j| rng.random_range(0..inst.option_count(j))).collect();
        let prio = (0..n).map(|_| rng.random::<f64>()).collect();
        let incl = match variant {
            Variant::Standard => Vec::new(),
            Variant::Selection => (0..inst.order_count()).map(|_| rng.random_bool(0.5)).collect(),
        };
        Self {
            variant,
            alloc,
            prio,
            incl,
        }
    }

    /// Uniform crossover; each gene comes from either parent with probability 0.5.
    pub fn crossover<R: Rng + ?Sized>(&self, other: &Chromosome, rng: &mut R) -> Chromosome {
        uniform_crossover(self, other, || rng.random_bool(0.5))
    }

    /// Resamples each gene from its full domain with probability `rate`.
    /// Inclusion genes are flipped instead.
    pub fn mutate<R: Rng + ?Sized>(&mut self, inst: &Instance, rate: f64, rng: &mut R) {
        for (j, a) in self.alloc.iter_mut().enumerate() {
            if rng.random::<f64>() < rate {
                *a = rng.random_range(0..inst.option_count(j));
            }
        }
        for p in &mut self.prio {
            if rng.random::<f64>() < rate {
                *p = rng.random::<f64>();
            }
        }
        for b in &mut self.incl {
            if rng.random::<f64>() < rate {
                *b = !*b;
            }
        }
    }

    /// Whether this chromosome fits `inst` and every gene is in its domain.
    pub fn is_valid_for(&self, inst: &Instance) -> bool {
        let n = inst.job_count();
        let incl_ok = match self.variant {
            Variant::Standard => self.incl.is_empty(),
            Variant::Selection => self.incl.len() == inst.order_count(),
        };
        incl_ok
            && self.alloc.len() == n
            && self.prio.len() == n
            && self.alloc.iter().enumerate().all(|(j, &a)| a < inst.option_count(j))
            && self.prio.iter().all(|p| (0.0..1.0).contains(p))
    }

    /// Per-order inclusion flags; all true for the standard variant.
    pub fn included(&self, inst: &Instance) -> Vec<bool> {
        match self.variant {
            Variant::Standard => vec![true; inst.order_count()],
            Variant::Selection => self.incl.clone(),
        }
    }

    pub fn decode(&self, inst: &Instance) -> DecodedGenome {
        let included = self.included(inst);
        DecodedGenome {
            allocation: (0..inst.job_count())
                .map(|j| (inst.job_id(j).to_string(), self.alloc[j]))
                .collect(),
            priority: (0..inst.job_count())
                .map(|j| (inst.job_id(j).to_string(), self.prio[j]))
                .collect(),
            included: (0..inst.order_count())
                .map(|o| (inst.order_id(o).to_string(), included[o]))
                .collect(),
        }
    }

    /// Evaluates through the scheduler without building id-keyed maps.
    pub fn evaluate(&self, inst: &Instance) -> Evaluation {
        match self.variant {
            Variant::Standard => {
                let all = vec![true; inst.order_count()];
                inst.evaluate_dense(&self.alloc, &self.prio, &all)
            }
            Variant::Selection => inst.evaluate_dense(&self.alloc, &self.prio, &self.incl),
        }
    }

    pub fn schedule(&self, inst: &Instance) -> crate::scheduler::Schedule {
        inst.schedule_dense(&self.alloc, &self.prio, &self.included(inst))
    }

    /// Parses the result-file genome form, `<variant>:<genes>`, against the
    /// shape of `inst`. The tag may be omitted when `expected` is given.
    pub fn parse(s: &str, inst: &Instance, expected: Option<Variant>) -> Result<Self, GenomeParseError> {
        let s = s.trim();
        let (tag, body) = match s.split_once(':') {
            Some((tag, body)) => (Some(tag.trim().parse::<Variant>()?), body),
            None => (None, s),
        };
        let variant = match (tag, expected) {
            (Some(t), Some(e)) if t != e => {
                return Err(GenomeParseError::VariantMismatch {
                    tagged: t,
                    expected: e,
                })
            }
            (Some(t), _) => t,
            (None, Some(e)) => e,
            (None, None) => Variant::Standard,
        };

        let genes: Vec<&str> = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(str::trim).collect()
        };
        let n = inst.job_count();
        let m = match variant {
            Variant::Standard => 0,
            Variant::Selection => inst.order_count(),
        };
        if genes.len() != 2 * n + m {
            return Err(GenomeParseError::Length {
                expected: 2 * n + m,
                found: genes.len(),
            });
        }
        let bad = |position: usize, message: String| GenomeParseError::Gene { position, message };

        let mut alloc = Vec::with_capacity(n);
        for (j, g) in genes[..n].iter().enumerate() {
            let a: usize = g.parse().map_err(|_| bad(j, format!("{g:?} is not an option index")))?;
            if a >= inst.option_count(j) {
                return Err(bad(j, format!("option {a} out of range 0..{}", inst.option_count(j))));
            }
            alloc.push(a);
        }
        let mut prio = Vec::with_capacity(n);
        for (k, g) in genes[n..2 * n].iter().enumerate() {
            let p: f64 = g.parse().map_err(|_| bad(n + k, format!("{g:?} is not a number")))?;
            if !(0.0..1.0).contains(&p) {
                return Err(bad(n + k, format!("priority {p} outside [0, 1)")));
            }
            prio.push(p);
        }
        let mut incl = Vec::with_capacity(m);
        for (k, g) in genes[2 * n..].iter().enumerate() {
            incl.push(match *g {
                "1" => true,
                "0" => false,
                other => return Err(bad(2 * n + k, format!("{other:?} is not 0 or 1"))),
            });
        }
        Ok(Self {
            variant,
            alloc,
            prio,
            incl,
        })
    }
}

/// Genome string form: variant tag, then alloc integers, priority decimals
/// and inclusion bits, comma-separated. Priorities print in shortest
/// round-trip form so a parsed genome evaluates bit-identically.
impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.variant)?;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if first {
                first = false;
                Ok(())
            } else {
                f.write_str(",")
            }
        };
        for a in &self.alloc {
            sep(f)?;
            write!(f, "{a}")?;
        }
        for p in &self.prio {
            sep(f)?;
            write!(f, "{p}")?;
        }
        for &b in &self.incl {
            sep(f)?;
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub(crate) fn uniform_crossover(a: &Chromosome, b: &Chromosome, mut take_a: impl FnMut() -> bool) -> Chromosome {
    debug_assert_eq!(a.variant, b.variant);
    debug_assert_eq!(a.alloc.len(), b.alloc.len());
    let alloc = a
        .alloc
        .iter()
        .zip(&b.alloc)
        .map(|(&x, &y)| if take_a() { x } else { y })
        .collect();
    let prio = a
        .prio
        .iter()
        .zip(&b.prio)
        .map(|(&x, &y)| if take_a() { x } else { y })
        .collect();
    let incl = a
        .incl
        .iter()
        .zip(&b.incl)
        .map(|(&x, &y)| if take_a() { x } else { y })
        .collect();
    Chromosome {
        variant: a.variant,
        alloc,
        prio,
        incl,
    }
}

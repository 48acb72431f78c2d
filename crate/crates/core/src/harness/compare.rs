use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::harness::metrics::{behavior_histogram, split_by_animat};
use crate::harness::trace::{ColumnValues, TraceRecord};

/// Comparison of one animat of run A against the animat at the same
/// position in run B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub animat_a: String,
    pub animat_b: String,
    /// Per-tick `alpha_a - alpha_b`.
    pub alpha_deltas: Vec<ColumnValues>,
    /// Total-variation distance between the behaviour distributions, in `[0, 1]`.
    pub histogram_distance: f64,
    /// First tick whose records differ in anything but the animat id.
    pub first_divergence: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub pairs: Vec<PairComparison>,
}

impl ComparisonReport {
    pub fn identical(&self) -> bool {
        self.pairs.iter().all(|p| p.first_divergence.is_none())
    }
}

fn same_except_id(a: &TraceRecord, b: &TraceRecord) -> bool {
    TraceRecord {
        animat: String::new(),
        ..a.clone()
    } == TraceRecord {
        animat: String::new(),
        ..b.clone()
    }
}

pub fn compare_runs(trace_a: &[TraceRecord], trace_b: &[TraceRecord]) -> Result<ComparisonReport> {
    let groups_a = split_by_animat(trace_a);
    let groups_b = split_by_animat(trace_b);
    if groups_a.len() != groups_b.len() {
        return Err(CoreError::invalid(
            "animats",
            format!("{} animats vs {}", groups_a.len(), groups_b.len()),
        ));
    }
    let mut pairs = Vec::with_capacity(groups_a.len());
    for ((id_a, a), (id_b, b)) in groups_a.into_iter().zip(groups_b) {
        if a.len() != b.len() {
            return Err(CoreError::DurationMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        let alpha_deltas = a
            .iter()
            .zip(&b)
            .map(|(ra, rb)| ColumnValues {
                hunger: ra.alpha.hunger - rb.alpha.hunger,
                thirst: ra.alpha.thirst - rb.alpha.thirst,
                fatigue: ra.alpha.fatigue - rb.alpha.fatigue,
            })
            .collect();

        let ha = behavior_histogram(a.iter().copied());
        let hb = behavior_histogram(b.iter().copied());
        let n = a.len().max(1) as f64;
        let mut keys: Vec<_> = ha.keys().chain(hb.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        let histogram_distance = 0.5
            * keys
                .iter()
                .map(|k| {
                    let pa = *ha.get(k).unwrap_or(&0) as f64 / n;
                    let pb = *hb.get(k).unwrap_or(&0) as f64 / n;
                    (pa - pb).abs()
                })
                .sum::<f64>();

        let first_divergence = a
            .iter()
            .zip(&b)
            .find(|(ra, rb)| !same_except_id(ra, rb))
            .map(|(ra, _)| ra.tick);

        pairs.push(PairComparison {
            animat_a: id_a,
            animat_b: id_b,
            alpha_deltas,
            histogram_distance,
            first_divergence,
        });
    }
    Ok(ComparisonReport { pairs })
}

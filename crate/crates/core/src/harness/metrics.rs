//! Metrics computed purely from traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::harness::scenario::Scenario;
use crate::harness::trace::{ColumnValues, TraceRecord};
use crate::network::Column;
use crate::world::MotorBehavior;

const TRACED: [Column; 3] = [Column::Hunger, Column::Thirst, Column::Fatigue];

/// Alpha bounds per animat and column; unknown animats use `[0, 1]`.
#[derive(Debug, Clone, Default)]
pub struct MetricBounds {
    per_animat: BTreeMap<String, BTreeMap<Column, (f64, f64)>>,
}

impl MetricBounds {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let per_animat = scenario
            .animats
            .iter()
            .map(|a| {
                let cols = TRACED
                    .iter()
                    .map(|c| {
                        let s = a.columns.get(*c);
                        (*c, (s.alpha_min, s.alpha_max))
                    })
                    .collect();
                (a.id.clone(), cols)
            })
            .collect();
        MetricBounds { per_animat }
    }

    pub fn get(&self, animat: &str, column: Column) -> (f64, f64) {
        self.per_animat
            .get(animat)
            .and_then(|m| m.get(&column))
            .copied()
            .unwrap_or((0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ColumnTicks {
    pub hunger: Option<u64>,
    pub thirst: Option<u64>,
    pub fatigue: Option<u64>,
}

impl ColumnTicks {
    pub fn get(&self, column: Column) -> Option<u64> {
        match column {
            Column::Hunger => self.hunger,
            Column::Thirst => self.thirst,
            Column::Fatigue => self.fatigue,
            Column::Safety => None,
        }
    }

    fn set(&mut self, column: Column, value: Option<u64>) {
        match column {
            Column::Hunger => self.hunger = value,
            Column::Thirst => self.thirst = value,
            Column::Fatigue => self.fatigue = value,
            Column::Safety => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub phase: usize,
    pub start_tick: u64,
    pub ticks: u64,
    pub histogram: BTreeMap<MotorBehavior, u64>,
}

impl PhaseStats {
    /// Most frequent behaviour; ties go to the earlier behaviour.
    pub fn dominant(&self) -> Option<MotorBehavior> {
        let mut best: Option<(MotorBehavior, u64)> = None;
        for (b, n) in &self.histogram {
            if best.is_none_or(|(_, m)| *n > m) {
                best = Some((*b, *n));
            }
        }
        best.map(|(b, _)| b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnimatMetrics {
    pub animat: String,
    pub ticks: u64,
    /// Ticks elapsed when alpha first sat at its upper bound.
    pub ticks_to_alpha_max: ColumnTicks,
    pub ticks_to_alpha_min: ColumnTicks,
    pub final_alpha: ColumnValues,
    pub phases: Vec<PhaseStats>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentMetrics {
    pub animats: Vec<AnimatMetrics>,
}

impl ExperimentMetrics {
    pub fn animat(&self, id: &str) -> Option<&AnimatMetrics> {
        self.animats.iter().find(|a| a.animat == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metrics serialize");
        s.push('\n');
        s
    }
}

/// Groups a trace by animat, in order of first appearance.
pub fn split_by_animat(trace: &[TraceRecord]) -> Vec<(String, Vec<&TraceRecord>)> {
    let mut out: Vec<(String, Vec<&TraceRecord>)> = Vec::new();
    for r in trace {
        match out.iter_mut().find(|(id, _)| *id == r.animat) {
            Some((_, v)) => v.push(r),
            None => out.push((r.animat.clone(), vec![r])),
        }
    }
    out
}

pub fn behavior_histogram<'a>(records: impl IntoIterator<Item = &'a TraceRecord>) -> BTreeMap<MotorBehavior, u64> {
    let mut h = BTreeMap::new();
    for r in records {
        *h.entry(r.behavior).or_insert(0) += 1;
    }
    h
}

pub fn compute_metrics(trace: &[TraceRecord], bounds: &MetricBounds) -> ExperimentMetrics {
    let animats = split_by_animat(trace)
        .into_iter()
        .map(|(id, records)| {
            let mut to_max = ColumnTicks::default();
            let mut to_min = ColumnTicks::default();
            for c in TRACED {
                let (lo, hi) = bounds.get(&id, c);
                let first =
                    |pred: &dyn Fn(f64) -> bool| records.iter().find(|r| pred(r.alpha.get(c))).map(|r| r.tick + 1);
                to_max.set(c, first(&|a| a >= hi));
                to_min.set(c, first(&|a| a <= lo));
            }

            let mut phases: Vec<PhaseStats> = Vec::new();
            for r in &records {
                match phases.last_mut() {
                    Some(p) if p.phase == r.phase => {
                        p.ticks += 1;
                        *p.histogram.entry(r.behavior).or_insert(0) += 1;
                    }
                    _ => phases.push(PhaseStats {
                        phase: r.phase,
                        start_tick: r.tick,
                        ticks: 1,
                        histogram: BTreeMap::from([(r.behavior, 1)]),
                    }),
                }
            }

            AnimatMetrics {
                ticks: records.len() as u64,
                ticks_to_alpha_max: to_max,
                ticks_to_alpha_min: to_min,
                final_alpha: records.last().map(|r| r.alpha).unwrap_or_default(),
                phases,
                animat: id,
            }
        })
        .collect();
    ExperimentMetrics { animats }
}

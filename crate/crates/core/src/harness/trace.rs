//! Per-tick trace records and their JSONL / CSV encodings.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::network::Column;
use crate::world::{InternalStates, MotorBehavior, Qualities};

pub const CSV_HEADER: &str = "tick,animat,x,y,behavior,alpha_hunger,alpha_thirst,alpha_fatigue,A_hunger,A_thirst,A_fatigue,hunger,thirst,fatigue,strength,lucidity";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColumnValues {
    pub hunger: f64,
    pub thirst: f64,
    pub fatigue: f64,
}

impl ColumnValues {
    /// Safety is not traced and reads as zero.
    pub fn get(&self, column: Column) -> f64 {
        match column {
            Column::Hunger => self.hunger,
            Column::Thirst => self.thirst,
            Column::Fatigue => self.fatigue,
            Column::Safety => 0.0,
        }
    }
}

/// Observable state of one animat after one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub phase: usize,
    pub animat: String,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub behavior: MotorBehavior,
    pub alpha: ColumnValues,
    /// Congruent certainty of each column this tick.
    pub congruent: ColumnValues,
    pub internal: InternalStates,
    pub qualities: Qualities,
}

impl TraceRecord {
    pub fn is_finite(&self) -> bool {
        [
            self.x,
            self.y,
            self.heading,
            self.alpha.hunger,
            self.alpha.thirst,
            self.alpha.fatigue,
            self.congruent.hunger,
            self.congruent.thirst,
            self.congruent.fatigue,
            self.internal.hunger,
            self.internal.thirst,
            self.internal.fatigue,
            self.qualities.strength,
            self.qualities.lucidity,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::with_capacity(192);
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.tick,
            self.animat,
            self.x,
            self.y,
            self.behavior,
            self.alpha.hunger,
            self.alpha.thirst,
            self.alpha.fatigue,
            self.congruent.hunger,
            self.congruent.thirst,
            self.congruent.fatigue,
            self.internal.hunger,
            self.internal.thirst,
            self.internal.fatigue,
            self.qualities.strength,
            self.qualities.lucidity,
        );
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Jsonl,
    Csv,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TraceFormat::Jsonl => "jsonl",
            TraceFormat::Csv => "csv",
        }
    }

    pub fn from_path(path: &std::path::Path) -> Option<TraceFormat> {
        match path.extension()?.to_str()? {
            "jsonl" => Some(TraceFormat::Jsonl),
            "csv" => Some(TraceFormat::Csv),
            _ => None,
        }
    }
}

pub fn to_jsonl(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 320);
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

pub fn to_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 192);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn encode(records: &[TraceRecord], format: TraceFormat) -> String {
    match format {
        TraceFormat::Jsonl => to_jsonl(records),
        TraceFormat::Csv => to_csv(records),
    }
}

pub fn read_jsonl(reader: impl BufRead) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CoreError::Parse {
            line: i + 1,
            column: 0,
            msg: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
            line: i + 1,
            column: e.column(),
            msg: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

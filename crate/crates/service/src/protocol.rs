//! Wire messages. Every message is one JSON object whose `type` field
//! selects the variant.

use motivsim::harness::TraceRecord;
use motivsim::network::Column;
use motivsim::world::{Entity, Magnitude, StimulusKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceEntity {
    pub kind: StimulusKind,
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub magnitude: Magnitude,
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateName {
    Hunger,
    Thirst,
    Fatigue,
    Strength,
    Lucidity,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetAnimatState {
    /// Defaults to the first animat.
    #[serde(default)]
    pub animat: Option<String>,
    pub state: StateName,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetAlphaParams {
    #[serde(default)]
    pub animat: Option<String>,
    pub column: Column,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    PlaceEntity(PlaceEntity),
    RemoveEntity {
        id: u64,
    },
    SetAnimatState(SetAnimatState),
    SetAlphaParams(SetAlphaParams),
    Pause,
    Resume,
    StepN {
        n: u64,
    },
    /// Restarts from a built-in scenario, or the served one when `None`.
    ResetScenario {
        scenario: Option<String>,
    },
    SetSnapshotRate {
        every: u64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdPayload {
    id: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepPayload {
    n: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResetPayload {
    #[serde(default)]
    scenario: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatePayload {
    every: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

pub const COMMAND_TYPES: [&str; 9] = [
    "place_entity",
    "remove_entity",
    "set_animat_state",
    "set_alpha_params",
    "pause",
    "resume",
    "step_n",
    "reset_scenario",
    "set_snapshot_rate",
];

/// A rejected message or command: what went wrong and which field caused it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {msg}")]
pub struct CommandError {
    pub msg: String,
    pub field: String,
}

impl CommandError {
    pub fn new(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CommandError {
            msg: msg.into(),
            field: field.into(),
        }
    }
}

impl From<motivsim::CoreError> for CommandError {
    fn from(e: motivsim::CoreError) -> Self {
        let field = e.field().unwrap_or("").to_string();
        CommandError {
            msg: e.to_string(),
            field,
        }
    }
}

/// Name quoted in backticks after `prefix`, as serde formats missing and
/// unknown fields.
fn quoted_after<'a>(msg: &'a str, prefix: &str) -> Option<&'a str> {
    let rest = msg.strip_prefix(prefix)?.strip_prefix('`')?;
    rest.split('`').next()
}

fn payload<T: DeserializeOwned>(fields: Map<String, Value>) -> Result<T, CommandError> {
    serde_path_to_error::deserialize(Value::Object(fields)).map_err(|e| {
        let path = e.path().to_string();
        let msg = e.inner().to_string();
        let field = if path != "." {
            path
        } else {
            quoted_after(&msg, "missing field ")
                .or_else(|| quoted_after(&msg, "unknown field "))
                .unwrap_or("")
                .to_string()
        };
        CommandError { msg, field }
    })
}

pub fn parse_command(text: &str) -> Result<Command, CommandError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CommandError::new("message", e.to_string()))?;
    let Value::Object(mut fields) = value else {
        return Err(CommandError::new("message", "expected a JSON object"));
    };
    let kind = match fields.remove("type") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(CommandError::new("type", "expected a string")),
        None => return Err(CommandError::new("type", "missing field `type`")),
    };
    let command = match kind.as_str() {
        "place_entity" => Command::PlaceEntity(payload(fields)?),
        "remove_entity" => Command::RemoveEntity {
            id: payload::<IdPayload>(fields)?.id,
        },
        "set_animat_state" => Command::SetAnimatState(payload(fields)?),
        "set_alpha_params" => Command::SetAlphaParams(payload(fields)?),
        "pause" => {
            payload::<Empty>(fields)?;
            Command::Pause
        }
        "resume" => {
            payload::<Empty>(fields)?;
            Command::Resume
        }
        "step_n" => Command::StepN {
            n: payload::<StepPayload>(fields)?.n,
        },
        "reset_scenario" => Command::ResetScenario {
            scenario: payload::<ResetPayload>(fields)?.scenario,
        },
        "set_snapshot_rate" => Command::SetSnapshotRate {
            every: payload::<RatePayload>(fields)?.every,
        },
        other => {
            return Err(CommandError::new(
                "type",
                format!(
                    "unknown command `{other}`, expected one of {}",
                    COMMAND_TYPES.join(", ")
                ),
            ))
        }
    };
    Ok(command)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityView {
    pub id: u64,
    pub kind: StimulusKind,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub magnitude: Magnitude,
}

impl From<&Entity> for EntityView {
    fn from(e: &Entity) -> Self {
        EntityView {
            id: e.id,
            kind: e.kind,
            x: e.position.x,
            y: e.position.y,
            radius: e.radius,
            magnitude: e.magnitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Ok {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Value>,
    },
    Error {
        msg: String,
        field: String,
    },
    Snapshot {
        seq: u64,
        /// Tick the animat records were computed at.
        tick: u64,
        animats: Vec<TraceRecord>,
        entities: Vec<EntityView>,
        paused: bool,
    },
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

impl From<CommandError> for ServerMessage {
    fn from(e: CommandError) -> Self {
        ServerMessage::Error {
            msg: e.msg,
            field: e.field,
        }
    }
}

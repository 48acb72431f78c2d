use motivsim::harness::{builtin, Scenario, Simulation, TraceRecord};
use motivsim::world::{StimulusKind, Vec2};
use serde_json::json;

use crate::protocol::{
    Command, CommandError, EntityView, PlaceEntity, ServerMessage, SetAlphaParams, SetAnimatState, StateName,
};

/// Upper bound on a single `step_n`.
pub const MAX_STEPS: u64 = 100_000;

/// What the simulation loop must do after a command was accepted.
#[derive(Debug, Clone, PartialEq)]
pub enum Applied {
    Reply(ServerMessage),
    /// Advance this many ticks, then acknowledge.
    Step(u64),
    /// Per-connection snapshot interval, in ticks.
    SnapshotRate(u64),
}

/// The served simulation and its run state. Owned by exactly one task.
#[derive(Debug)]
pub struct Session {
    scenario: Scenario,
    sim: Simulation,
    paused: bool,
    last: Vec<TraceRecord>,
}

fn ok_value(value: serde_json::Value) -> Applied {
    Applied::Reply(ServerMessage::Ok {
        id: None,
        value: Some(value),
    })
}

impl Session {
    pub fn new(scenario: Scenario) -> motivsim::Result<Self> {
        let sim = Simulation::new(&scenario)?;
        Ok(Session {
            scenario,
            sim,
            paused: false,
            last: Vec::new(),
        })
    }

    pub fn simulation(&self) -> &Simulation {
        &self.sim
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn set_paused(&mut self, paused: bool) {
        self.paused = paused;
    }

    /// Records of the most recent tick.
    pub fn last_records(&self) -> &[TraceRecord] {
        &self.last
    }

    pub fn step(&mut self) -> &[TraceRecord] {
        self.last = self.sim.step();
        &self.last
    }

    /// Snapshot of the most recent tick; `None` before the first tick.
    pub fn snapshot(&self, seq: u64) -> Option<ServerMessage> {
        let tick = self.last.first()?.tick;
        Some(ServerMessage::Snapshot {
            seq,
            tick,
            animats: self.last.clone(),
            entities: self.sim.world().entities().iter().map(EntityView::from).collect(),
            paused: self.paused,
        })
    }

    fn animat_index(&self, id: Option<&str>) -> Result<usize, CommandError> {
        let animats = self.sim.animats();
        match id {
            None if animats.is_empty() => Err(CommandError::new("animat", "scenario has no animats")),
            None => Ok(0),
            Some(id) => animats
                .iter()
                .position(|a| a.id == id)
                .ok_or_else(|| CommandError::new("animat", format!("no animat `{id}`"))),
        }
    }

    /// Validates and applies one command. Rejected commands leave the
    /// simulation untouched.
    pub fn apply_command(&mut self, command: &Command) -> Result<Applied, CommandError> {
        match command {
            Command::PlaceEntity(p) => self.place_entity(p),
            Command::RemoveEntity { id } => match self.sim.world_mut().remove_entity(*id) {
                Some(_) => Ok(Applied::Reply(ServerMessage::Ok {
                    id: Some(*id),
                    value: None,
                })),
                None => Err(CommandError::new("id", format!("no entity with id {id}"))),
            },
            Command::SetAnimatState(s) => self.set_animat_state(s),
            Command::SetAlphaParams(p) => self.set_alpha_params(p),
            Command::Pause | Command::Resume => {
                self.paused = matches!(command, Command::Pause);
                Ok(ok_value(json!({"tick": self.sim.tick(), "paused": self.paused})))
            }
            Command::StepN { n } => {
                if *n == 0 || *n > MAX_STEPS {
                    return Err(CommandError::new("n", format!("expected 1..={MAX_STEPS}, got {n}")));
                }
                Ok(Applied::Step(*n))
            }
            Command::ResetScenario { scenario } => {
                let next = match scenario {
                    None => self.scenario.clone(),
                    Some(name) => builtin(name)
                        .map_err(|e| CommandError::new("scenario", e.to_string()))?
                        .with_seed(self.scenario.seed),
                };
                self.sim = Simulation::new(&next).map_err(|e| CommandError::new("scenario", e.to_string()))?;
                self.scenario = next;
                self.last.clear();
                Ok(ok_value(json!({"tick": 0, "seed": self.scenario.seed})))
            }
            Command::SetSnapshotRate { every } => {
                if *every == 0 {
                    return Err(CommandError::new("every", "expected at least 1"));
                }
                Ok(Applied::SnapshotRate(*every))
            }
        }
    }

    fn place_entity(&mut self, p: &PlaceEntity) -> Result<Applied, CommandError> {
        let position = Vec2::new(p.x, p.y);
        if p.kind == StimulusKind::Obstacle {
            let covered = self
                .sim
                .animats()
                .iter()
                .any(|a| a.position.distance(position) < p.radius);
            if covered {
                return Err(CommandError::new("x", "obstacle would cover an animat"));
            }
        }
        let id = self
            .sim
            .world_mut()
            .add_entity(p.kind, position, p.radius, p.magnitude)?;
        Ok(Applied::Reply(ServerMessage::Ok {
            id: Some(id),
            value: None,
        }))
    }

    fn set_animat_state(&mut self, s: &SetAnimatState) -> Result<Applied, CommandError> {
        let i = self.animat_index(s.animat.as_deref())?;
        if !(0.0..=1.0).contains(&s.value) {
            return Err(CommandError::new("value", format!("{} is outside [0, 1]", s.value)));
        }
        let a = &mut self.sim.animats_mut()[i];
        let slot = match s.state {
            StateName::Hunger => &mut a.internal.hunger,
            StateName::Thirst => &mut a.internal.thirst,
            StateName::Fatigue => &mut a.internal.fatigue,
            StateName::Strength => &mut a.qualities.strength,
            StateName::Lucidity => &mut a.qualities.lucidity,
        };
        *slot = s.value;
        Ok(ok_value(json!(s.value)))
    }

    fn set_alpha_params(&mut self, p: &SetAlphaParams) -> Result<Applied, CommandError> {
        let i = self.animat_index(p.animat.as_deref())?;
        let network = &mut self.sim.animats_mut()[i].network;
        let mut state = *network.alpha_state(p.column);
        if let Some(v) = p.theta {
            state.theta = v;
        }
        if let Some(v) = p.delta {
            state.delta = v;
        }
        if let Some(v) = p.rho {
            state.rho = v;
        }
        if let Some(v) = p.alpha {
            state.alpha = v;
        }
        network.set_alpha_state(p.column, state).map_err(|e| {
            let mut err = CommandError::from(e);
            // report the command's field name, not the column path
            if let Some((_, last)) = err.field.rsplit_once('.') {
                err.field = last.to_string();
            }
            err
        })?;
        Ok(ok_value(serde_json::to_value(state).expect("alpha state serializes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::parse_command;
    use motivsim::network::Column;

    fn session() -> Session {
        Session::new(builtin("scarce_food").unwrap()).unwrap()
    }

    fn apply(s: &mut Session, text: &str) -> Result<Applied, CommandError> {
        s.apply_command(&parse_command(text).unwrap())
    }

    #[test]
    fn removing_unknown_entity_is_rejected() {
        let mut s = session();
        let before = s.simulation().world().entities().to_vec();
        let err = apply(&mut s, r#"{"type":"remove_entity","id":999}"#).unwrap_err();
        assert_eq!(err.field, "id");
        assert_eq!(s.simulation().world().entities(), &before[..]);
    }

    #[test]
    fn out_of_range_state_is_rejected_not_clamped() {
        let mut s = session();
        let err = apply(&mut s, r#"{"type":"set_animat_state","state":"hunger","value":1.5}"#).unwrap_err();
        assert_eq!(err.field, "value");
        assert_eq!(s.simulation().animats()[0].internal.hunger, 0.95);
        apply(&mut s, r#"{"type":"set_animat_state","state":"hunger","value":0.25}"#).unwrap();
        assert_eq!(s.simulation().animats()[0].internal.hunger, 0.25);
        let err = apply(
            &mut s,
            r#"{"type":"set_animat_state","animat":"ghost","state":"hunger","value":0.2}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "animat");
    }

    #[test]
    fn placement_is_bounds_checked() {
        let mut s = session();
        let n = s.simulation().world().entities().len();
        let err = apply(&mut s, r#"{"type":"place_entity","kind":"food_source","x":101,"y":5}"#).unwrap_err();
        assert_eq!(err.field, "x");
        let err = apply(&mut s, r#"{"type":"place_entity","kind":"food_source","x":5,"y":-1}"#).unwrap_err();
        assert_eq!(err.field, "y");
        let err = apply(
            &mut s,
            r#"{"type":"place_entity","kind":"food_source","x":5,"y":5,"radius":0}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "radius");
        let err = apply(
            &mut s,
            r#"{"type":"place_entity","kind":"obstacle","x":50,"y":50,"radius":2}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "x");
        assert_eq!(s.simulation().world().entities().len(), n);
        match apply(&mut s, r#"{"type":"place_entity","kind":"food_source","x":5,"y":5}"#).unwrap() {
            Applied::Reply(ServerMessage::Ok { id: Some(id), .. }) => {
                assert!(s.simulation().world().entity(id).is_some());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_params_are_validated() {
        let mut s = session();
        let err = apply(&mut s, r#"{"type":"set_alpha_params","column":"hunger","rho":0}"#).unwrap_err();
        assert_eq!(err.field, "rho");
        let err = apply(&mut s, r#"{"type":"set_alpha_params","column":"hunger","theta":2}"#).unwrap_err();
        assert_eq!(err.field, "theta");
        let err = apply(&mut s, r#"{"type":"set_alpha_params","column":"hunger","alpha":1.2}"#).unwrap_err();
        assert_eq!(err.field, "alpha");
        apply(
            &mut s,
            r#"{"type":"set_alpha_params","column":"thirst","rho":5,"alpha":0.1}"#,
        )
        .unwrap();
        let st = s.simulation().animats()[0].network.alpha_state(Column::Thirst);
        assert_eq!((st.rho, st.alpha), (5.0, 0.1));
    }

    #[test]
    fn pause_and_resume_keep_tick_count() {
        let mut s = session();
        s.step();
        apply(&mut s, r#"{"type":"pause"}"#).unwrap();
        assert!(s.is_paused());
        apply(&mut s, r#"{"type":"resume"}"#).unwrap();
        s.step();
        assert_eq!(s.simulation().tick(), 2);
        assert_eq!(s.last_records()[0].tick, 1);
    }

    #[test]
    fn step_and_rate_bounds() {
        let mut s = session();
        assert_eq!(apply(&mut s, r#"{"type":"step_n","n":3}"#).unwrap(), Applied::Step(3));
        assert_eq!(apply(&mut s, r#"{"type":"step_n","n":0}"#).unwrap_err().field, "n");
        assert_eq!(
            apply(&mut s, r#"{"type":"set_snapshot_rate","every":0}"#)
                .unwrap_err()
                .field,
            "every"
        );
        assert_eq!(
            apply(&mut s, r#"{"type":"set_snapshot_rate","every":5}"#).unwrap(),
            Applied::SnapshotRate(5)
        );
    }

    #[test]
    fn reset_restarts_the_clock() {
        let mut s = session();
        for _ in 0..5 {
            s.step();
        }
        apply(&mut s, r#"{"type":"reset_scenario","scenario":"abundant_food"}"#).unwrap();
        assert_eq!(s.simulation().tick(), 0);
        assert!(s.snapshot(0).is_none());
        assert_eq!(s.simulation().animats()[0].id, "abundant");
        let err = apply(&mut s, r#"{"type":"reset_scenario","scenario":"nope"}"#).unwrap_err();
        assert_eq!(err.field, "scenario");
        assert_eq!(s.simulation().animats()[0].id, "abundant");
    }
}

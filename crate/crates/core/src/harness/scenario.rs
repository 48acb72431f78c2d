//! Scenario documents: world layout, animats and phases.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, check_unit, CoreError, Result};
use crate::network::{ColumnAlphas, NetworkParams, StimulusCoupling};
use crate::world::{InternalStates, Magnitude, PhysiologyRates, Qualities, StimulusKind, Vec2};

pub const DEFAULT_SEED: u64 = 1;

const BUILTINS: [(&str, &str); 4] = [
    ("abundant_food", include_str!("../../scenarios/abundant_food.json")),
    ("scarce_food", include_str!("../../scenarios/scarce_food.json")),
    (
        "two_environments",
        include_str!("../../scenarios/two_environments.json"),
    ),
    ("empty", include_str!("../../scenarios/empty.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    /// Total duration across all phases.
    pub ticks: u64,
    pub world: WorldSpec,
    pub animats: Vec<AnimatSpec>,
    pub phases: Vec<PhaseSpec>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: DEFAULT_SEED,
            ticks: 2000,
            world: WorldSpec::default(),
            animats: Vec::new(),
            phases: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSpec {
    pub width: f64,
    pub height: f64,
    pub entities: Vec<EntitySpec>,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            width: 100.0,
            height: 100.0,
            entities: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpec {
    pub kind: StimulusKind,
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Omitted or `null` means an inexhaustible source.
    #[serde(default)]
    pub magnitude: Magnitude,
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnimatSpec {
    pub id: String,
    /// Defaults to the world center.
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub heading: f64,
    pub speed: f64,
    pub perception_radius: f64,
    pub internal: InternalStates,
    pub qualities: Qualities,
    pub columns: ColumnAlphas,
    pub coupling: StimulusCoupling,
    pub network: NetworkParams,
    pub physiology: PhysiologyRates,
}

impl Default for AnimatSpec {
    fn default() -> Self {
        AnimatSpec {
            id: String::new(),
            x: None,
            y: None,
            heading: 0.0,
            speed: 1.0,
            perception_radius: 20.0,
            internal: InternalStates::default(),
            qualities: Qualities::default(),
            columns: ColumnAlphas::default(),
            coupling: StimulusCoupling::default(),
            network: NetworkParams::default(),
            physiology: PhysiologyRates::default(),
        }
    }
}

impl AnimatSpec {
    pub fn position(&self, world: &WorldSpec) -> Vec2 {
        Vec2::new(
            self.x.unwrap_or(world.width / 2.0),
            self.y.unwrap_or(world.height / 2.0),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialStates {
    pub hunger: Option<f64>,
    pub thirst: Option<f64>,
    pub fatigue: Option<f64>,
}

impl PartialStates {
    pub fn apply(&self, s: &mut InternalStates) {
        if let Some(v) = self.hunger {
            s.hunger = v;
        }
        if let Some(v) = self.thirst {
            s.thirst = v;
        }
        if let Some(v) = self.fatigue {
            s.fatigue = v;
        }
    }
}

/// A segment of the run. At `at_tick` the phase may reset internal states
/// of every animat and/or replace the world's entity set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSpec {
    pub name: String,
    pub at_tick: u64,
    pub set_internal: Option<PartialStates>,
    pub entities: Option<Vec<EntitySpec>>,
    /// Drop all blackboard contents (motivation degrees are kept).
    pub clear_blackboards: bool,
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Result<Scenario> {
    let text = builtin_source(name).ok_or_else(|| CoreError::UnknownScenario(name.to_string()))?;
    load_scenario(text)
}

/// Parses, fills defaults and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let text = if text.trim().is_empty() { "{}" } else { text };
    let mut scenario: Scenario = serde_json::from_str(text).map_err(|e| CoreError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    scenario.fill_defaults();
    scenario.validate()?;
    Ok(scenario)
}

fn validate_entity(field: &str, e: &EntitySpec, world: &WorldSpec) -> Result<()> {
    check_range(
        &format!("{field}.x"),
        e.x,
        0.0,
        world.width,
        "expected x within the world",
    )?;
    check_range(
        &format!("{field}.y"),
        e.y,
        0.0,
        world.height,
        "expected y within the world",
    )?;
    check_range(
        &format!("{field}.radius"),
        e.radius,
        f64::MIN_POSITIVE,
        f64::MAX,
        "expected radius > 0",
    )?;
    if e.magnitude.0.is_nan() || e.magnitude.0 < 0.0 {
        return Err(CoreError::out_of_range(
            format!("{field}.magnitude"),
            e.magnitude.0,
            "expected magnitude >= 0",
        ));
    }
    Ok(())
}

impl Scenario {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn fill_defaults(&mut self) {
        for (i, a) in self.animats.iter_mut().enumerate() {
            if a.id.is_empty() {
                a.id = format!("animat{i}");
            }
            let p = a.position(&self.world);
            a.x = Some(p.x);
            a.y = Some(p.y);
        }
        if self.phases.is_empty() {
            self.phases.push(PhaseSpec {
                name: "main".into(),
                ..PhaseSpec::default()
            });
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.world;
        check_range(
            "world.width",
            w.width,
            f64::MIN_POSITIVE,
            f64::MAX,
            "expected width > 0",
        )?;
        check_range(
            "world.height",
            w.height,
            f64::MIN_POSITIVE,
            f64::MAX,
            "expected height > 0",
        )?;
        if self.ticks == 0 {
            return Err(CoreError::invalid("ticks", "must be at least 1"));
        }
        for (i, e) in w.entities.iter().enumerate() {
            validate_entity(&format!("world.entities[{i}]"), e, w)?;
        }

        for (i, a) in self.animats.iter().enumerate() {
            let f = |n: &str| format!("animats[{i}].{n}");
            if a.id.is_empty() || !a.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(CoreError::invalid(f("id"), "expected [A-Za-z0-9_-]+"));
            }
            if self.animats[..i].iter().any(|b| b.id == a.id) {
                return Err(CoreError::invalid(f("id"), format!("duplicate id `{}`", a.id)));
            }
            let p = a.position(w);
            check_range(&f("x"), p.x, 0.0, w.width, "expected x within the world")?;
            check_range(&f("y"), p.y, 0.0, w.height, "expected y within the world")?;
            let blocked = w
                .entities
                .iter()
                .any(|e| e.kind == StimulusKind::Obstacle && p.distance(Vec2::new(e.x, e.y)) < e.radius);
            if blocked {
                return Err(CoreError::invalid(f("x"), "animat starts inside an obstacle"));
            }
            check_range(
                &f("heading"),
                a.heading,
                f64::MIN,
                f64::MAX,
                "expected a finite heading",
            )?;
            check_range(&f("speed"), a.speed, 0.0, f64::MAX, "expected speed >= 0")?;
            check_range(
                &f("perception_radius"),
                a.perception_radius,
                f64::MIN_POSITIVE,
                f64::MAX,
                "expected perception_radius > 0",
            )?;
            a.internal.validate(&f("internal"))?;
            a.qualities.validate(&f("qualities"))?;
            a.columns.validate(&f("columns"))?;
            a.coupling.validate(&f("coupling"))?;
            a.network.validate(&f("network"))?;
            a.physiology.validate(&f("physiology"))?;
        }

        if self.phases.is_empty() {
            return Err(CoreError::invalid("phases", "at least one phase is required"));
        }
        if self.phases[0].at_tick != 0 {
            return Err(CoreError::invalid(
                "phases[0].at_tick",
                "first phase must start at tick 0",
            ));
        }
        for (i, ph) in self.phases.iter().enumerate() {
            let f = |n: &str| format!("phases[{i}].{n}");
            if i > 0 && ph.at_tick <= self.phases[i - 1].at_tick {
                return Err(CoreError::invalid(
                    f("at_tick"),
                    "phases must start at increasing ticks",
                ));
            }
            if ph.at_tick >= self.ticks {
                return Err(CoreError::invalid(f("at_tick"), "phase starts after the run ends"));
            }
            if let Some(s) = &ph.set_internal {
                for (n, v) in [("hunger", s.hunger), ("thirst", s.thirst), ("fatigue", s.fatigue)] {
                    if let Some(v) = v {
                        check_unit(&f(&format!("set_internal.{n}")), v)?;
                    }
                }
            }
            if let Some(es) = &ph.entities {
                for (j, e) in es.iter().enumerate() {
                    validate_entity(&f(&format!("entities[{j}]")), e, w)?;
                }
            }
        }
        Ok(())
    }

    /// Phase index active at `tick`.
    pub fn phase_at(&self, tick: u64) -> usize {
        self.phases.iter().rposition(|p| p.at_tick <= tick).unwrap_or(0)
    }

    /// `[start, end)` tick range of a phase.
    pub fn phase_range(&self, phase: usize) -> (u64, u64) {
        let start = self.phases[phase].at_tick;
        let end = self.phases.get(phase + 1).map_or(self.ticks, |p| p.at_tick);
        (start, end)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for name in builtin_names() {
            builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(builtin("nope"), Err(CoreError::UnknownScenario(_))));
    }

    #[test]
    fn abundant_food_layout() {
        let s = builtin("abundant_food").unwrap();
        let food = s
            .world
            .entities
            .iter()
            .filter(|e| e.kind == StimulusKind::FoodSource)
            .count();
        assert!(food >= 3);
        assert_eq!(s.animats.len(), 1);
        assert_eq!(s.animats[0].columns.hunger.alpha, 0.7);
        assert_eq!(s.animats[0].internal.hunger, 0.95);
    }

    #[test]
    fn scarce_food_layout() {
        let s = builtin("scarce_food").unwrap();
        let kinds: Vec<_> = s.world.entities.iter().map(|e| e.kind).collect();
        assert!(!kinds.contains(&StimulusKind::FoodSource));
        assert!(kinds.contains(&StimulusKind::WaterSource));
        assert!(kinds.contains(&StimulusKind::Grass));
        let a = &s.animats[0];
        assert_eq!(a.columns.hunger.alpha, 0.7);
        assert_eq!(a.internal.hunger, 0.95);
        assert_eq!(a.internal.thirst, 0.0);
    }

    #[test]
    fn empty_document_is_all_defaults() {
        for text in ["", "  \n", "{}"] {
            let s = load_scenario(text).unwrap();
            assert_eq!(s.seed, DEFAULT_SEED);
            assert!(s.world.entities.is_empty());
            assert!(s.animats.is_empty());
            assert_eq!(s.phases.len(), 1);
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_scenario("{\n  \"seed\": 1,\n  \"ticks\": \"many\"\n}").unwrap_err();
        match err {
            CoreError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = load_scenario("{\"bogus\": 1}").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn validation_names_the_field() {
        let doc = r#"{"animats":[{"internal":{"hunger":1.5}}]}"#;
        assert_eq!(
            load_scenario(doc).unwrap_err().field(),
            Some("animats[0].internal.hunger")
        );

        let doc = r#"{"animats":[{"columns":{"hunger":{"rho":500}}}]}"#;
        assert_eq!(
            load_scenario(doc).unwrap_err().field(),
            Some("animats[0].columns.hunger.rho")
        );

        let doc = r#"{"world":{"entities":[{"kind":"blob","x":500,"y":1}]}}"#;
        assert_eq!(load_scenario(doc).unwrap_err().field(), Some("world.entities[0].x"));

        let doc = r#"{"ticks":10,"phases":[{"at_tick":0},{"at_tick":20}]}"#;
        assert_eq!(load_scenario(doc).unwrap_err().field(), Some("phases[1].at_tick"));

        let doc = r#"{"animats":[{"id":"a"},{"id":"a"}]}"#;
        assert_eq!(load_scenario(doc).unwrap_err().field(), Some("animats[1].id"));
    }

    #[test]
    fn resolved_document_round_trips() {
        let s = builtin("two_environments").unwrap();
        assert_eq!(load_scenario(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn phase_lookup() {
        let s = builtin("scarce_food").unwrap();
        assert_eq!(s.phase_at(0), 0);
        let (start, end) = s.phase_range(1);
        assert_eq!(s.phase_at(start), 1);
        assert_eq!(end, s.ticks);
        assert_eq!(s.phase_at(start - 1), 0);
    }
}

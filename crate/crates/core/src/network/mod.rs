//! Two-node blackboard action-selection network.
//!
//! The motivational node combines internal and external signals per
//! behavioural column and picks a consummatory preference; the cognitive node
//! keeps perceptual persistence, gates the preference against what is
//! actually perceived and resolves one external behaviour per tick.

mod blackboard;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use blackboard::{Blackboard, BlackboardLevel, CognitiveLevel, MotivationalLevel, Node, SolutionElement, Subject};

use crate::error::{check_range, check_unit, CoreError, Result};
use crate::motivation::{alpha_update, combine_activation, external_sum, Activation, AlphaState, CombinationInputs};
use crate::world::{InternalStates, MotorBehavior, Percept, StimulusKind};

const COG_EXTERNAL: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::ExternalPerceptions);
const COG_PERSISTENTS: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::PerceptualPersistents);
const COG_PREFERENTS: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::ConsummatoryPreferents);
const COG_DRIVE_PERCEPTION: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::DrivePerceptionCongruents);
const COG_POTENTIAL: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::PotentialActions);
const COG_ACTIONS: BlackboardLevel = BlackboardLevel::Cognitive(CognitiveLevel::Actions);
const MOT_INTERNAL: BlackboardLevel = BlackboardLevel::Motivational(MotivationalLevel::InternalPerceptions);
const MOT_EXTERNAL: BlackboardLevel = BlackboardLevel::Motivational(MotivationalLevel::ExternalPerceptions);
const MOT_CONGRUENTS: BlackboardLevel = BlackboardLevel::Motivational(MotivationalLevel::InteroExteroDriveCongruents);
const MOT_DRIVE: BlackboardLevel = BlackboardLevel::Motivational(MotivationalLevel::Drive);

/// Behavioural columns, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Hunger,
    Thirst,
    Fatigue,
    Safety,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::Hunger, Column::Thirst, Column::Fatigue, Column::Safety];

    pub fn name(self) -> &'static str {
        match self {
            Column::Hunger => "hunger",
            Column::Thirst => "thirst",
            Column::Fatigue => "fatigue",
            Column::Safety => "safety",
        }
    }

    pub fn consummatory(self) -> MotorBehavior {
        match self {
            Column::Hunger => MotorBehavior::Eat,
            Column::Thirst => MotorBehavior::Drink,
            Column::Fatigue => MotorBehavior::Rest,
            Column::Safety => MotorBehavior::Runaway,
        }
    }

    /// Appetitive columns search for their stimulus when it is missing.
    pub fn is_appetitive(self) -> bool {
        self != Column::Safety
    }

    pub fn from_name(name: &str) -> Option<Column> {
        Column::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Tunable constants of the internal behaviours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    /// Per-tick decay of perceptual persistents.
    pub persistence_decay: f64,
    /// Minimum certainty to compete, and below which persistents are dropped.
    pub activation_floor: f64,
    pub explore_threshold: f64,
    /// Obstacle intensity that triggers the avoidance reflex.
    pub obstacle_reflex: f64,
    /// Surface distance within which consummatory behaviours are possible.
    pub interaction_range: f64,
    pub fa_internal: f64,
    pub fa_drive: f64,
    /// Constant internal signal of the safety column; zero disables it.
    pub safety_vigilance: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            persistence_decay: 0.9,
            activation_floor: 0.01,
            explore_threshold: 0.3,
            obstacle_reflex: 0.7,
            interaction_range: 1.0,
            fa_internal: 1.0,
            fa_drive: 0.2,
            safety_vigilance: 0.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let f = |n: &str| format!("{prefix}.{n}");
        check_unit(&f("persistence_decay"), self.persistence_decay)?;
        check_unit(&f("activation_floor"), self.activation_floor)?;
        check_unit(&f("explore_threshold"), self.explore_threshold)?;
        check_unit(&f("obstacle_reflex"), self.obstacle_reflex)?;
        check_range(
            &f("interaction_range"),
            self.interaction_range,
            0.0,
            f64::MAX,
            "expected >= 0",
        )?;
        check_unit(&f("fa_internal"), self.fa_internal)?;
        check_unit(&f("fa_drive"), self.fa_drive)?;
        check_unit(&f("safety_vigilance"), self.safety_vigilance)
    }
}

/// Coupling strengths between each stimulus kind and its column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StimulusCoupling {
    pub food_source: f64,
    pub grass: f64,
    pub water_source: f64,
    pub spot: f64,
    pub blob: f64,
}

impl Default for StimulusCoupling {
    fn default() -> Self {
        StimulusCoupling {
            food_source: 1.0,
            grass: 0.0,
            water_source: 1.0,
            spot: 1.0,
            blob: 1.0,
        }
    }
}

impl StimulusCoupling {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (n, v) in [
            ("food_source", self.food_source),
            ("grass", self.grass),
            ("water_source", self.water_source),
            ("spot", self.spot),
            ("blob", self.blob),
        ] {
            check_unit(&format!("{prefix}.{n}"), v)?;
        }
        Ok(())
    }

    /// Linked stimuli of a column with their coupling strengths.
    pub fn linked(&self, column: Column) -> Vec<(StimulusKind, f64)> {
        match column {
            Column::Hunger => vec![
                (StimulusKind::FoodSource, self.food_source),
                (StimulusKind::Grass, self.grass),
            ],
            Column::Thirst => vec![(StimulusKind::WaterSource, self.water_source)],
            Column::Fatigue => vec![(StimulusKind::Spot, self.spot)],
            Column::Safety => vec![(StimulusKind::Blob, self.blob)],
        }
    }
}

/// Initial motivation degree and learning parameters of every column.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnAlphas {
    pub hunger: AlphaState,
    pub thirst: AlphaState,
    pub fatigue: AlphaState,
    pub safety: AlphaState,
}

impl ColumnAlphas {
    pub fn get(&self, column: Column) -> &AlphaState {
        match column {
            Column::Hunger => &self.hunger,
            Column::Thirst => &self.thirst,
            Column::Fatigue => &self.fatigue,
            Column::Safety => &self.safety,
        }
    }

    pub fn get_mut(&mut self, column: Column) -> &mut AlphaState {
        match column {
            Column::Hunger => &mut self.hunger,
            Column::Thirst => &mut self.thirst,
            Column::Fatigue => &mut self.fatigue,
            Column::Safety => &mut self.safety,
        }
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        for c in Column::ALL {
            self.get(c).validate(&format!("{prefix}.{}", c.name()))?;
        }
        Ok(())
    }
}

/// Coupling strengths of an elemental behaviour, one per condition element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingVector {
    pub components: Vec<f64>,
    /// Which components a learning process may modify. No rule modifies them yet.
    pub modifiable: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionElement {
    pub level: BlackboardLevel,
    pub subject: Subject,
    pub min_certainty: f64,
}

/// A production rule: condition elements on the blackboard, action elements
/// it creates, and the coupling strengths of its conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementalBehavior {
    pub id: String,
    pub conditions: Vec<ConditionElement>,
    pub actions: Vec<(BlackboardLevel, Subject)>,
    pub coupling: CouplingVector,
}

impl ElementalBehavior {
    /// The congruence behaviour of a column. Conditions are laid out as
    /// `[internal perception, external perceptions.., drive]`.
    pub fn congruence(column: Column, linked: &[(StimulusKind, f64)], fa_internal: f64, fa_drive: f64) -> Self {
        let mut conditions = vec![ConditionElement {
            level: MOT_INTERNAL,
            subject: Subject::Column(column),
            min_certainty: 0.0,
        }];
        let mut components = vec![fa_internal];
        let mut modifiable = vec![false];
        for &(kind, fa) in linked {
            conditions.push(ConditionElement {
                level: MOT_EXTERNAL,
                subject: Subject::Stimulus(kind),
                min_certainty: 0.0,
            });
            components.push(fa);
            modifiable.push(true);
        }
        conditions.push(ConditionElement {
            level: MOT_DRIVE,
            subject: Subject::Column(column),
            min_certainty: 0.0,
        });
        components.push(fa_drive);
        modifiable.push(false);
        ElementalBehavior {
            id: format!("congruence.{}", column.name()),
            conditions,
            actions: vec![(MOT_CONGRUENTS, Subject::Column(column))],
            coupling: CouplingVector { components, modifiable },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.conditions.len();
        if self.coupling.components.len() != n || self.coupling.modifiable.len() != n {
            return Err(CoreError::LengthMismatch {
                left: self.coupling.components.len(),
                right: n,
            });
        }
        for (j, fa) in self.coupling.components.iter().enumerate() {
            check_unit(&format!("{}.coupling[{j}]", self.id), *fa)?;
        }
        Ok(())
    }

    /// Reads the condition signals off the motivational blackboard.
    fn combination_inputs(&self, board: &Blackboard, o_drive: f64, alpha: f64) -> CombinationInputs {
        let n = self.conditions.len();
        let signal = |c: &ConditionElement| board.certainty(c.level, c.subject);
        CombinationInputs {
            o_internal: signal(&self.conditions[0]),
            fa_internal: self.coupling.components[0],
            o_external: self.conditions[1..n - 1].iter().map(signal).collect(),
            fa_external: self.coupling.components[1..n - 1].to_vec(),
            o_drive,
            fa_drive: self.coupling.components[n - 1],
            alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviouralColumn {
    pub id: Column,
    pub stimuli: Vec<StimulusKind>,
    pub consummatory: MotorBehavior,
    pub alpha_state: AlphaState,
    pub congruence: ElementalBehavior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InternalBehavior {
    PerceptualPersistence,
    AttentionToPreferences,
    ReactiveResponseInhibition,
    ExternalBehavioursSelector,
    InteroExteroDriveCongruence,
    ConsummatoryPreferencesSelector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActivityRegister {
    pub last_active: Option<u64>,
    pub activations: u64,
}

/// Output of one network tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub behavior: MotorBehavior,
    /// Column whose motivation produced the behaviour, if any.
    pub column: Option<Column>,
    /// Stimulus the behaviour is directed at (or away from).
    pub target: Option<Percept>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BecaNetwork {
    params: NetworkParams,
    coupling: StimulusCoupling,
    columns: Vec<BehaviouralColumn>,
    cognitive: Blackboard,
    motivational: Blackboard,
    registers: BTreeMap<InternalBehavior, ActivityRegister>,
    /// Latest percept per kind, kept while its persistent survives.
    last_seen: BTreeMap<StimulusKind, Percept>,
    activations: BTreeMap<Column, Activation>,
    winner: Option<Column>,
    gated: Option<StimulusKind>,
    tick: u64,
}

impl BecaNetwork {
    pub fn new(params: NetworkParams, coupling: StimulusCoupling, alphas: ColumnAlphas) -> Self {
        let columns = Column::ALL
            .into_iter()
            .map(|id| {
                let linked = coupling.linked(id);
                BehaviouralColumn {
                    id,
                    stimuli: linked.iter().map(|(k, _)| *k).collect(),
                    consummatory: id.consummatory(),
                    alpha_state: *alphas.get(id),
                    congruence: ElementalBehavior::congruence(id, &linked, params.fa_internal, params.fa_drive),
                }
            })
            .collect();
        BecaNetwork {
            params,
            coupling,
            columns,
            cognitive: Blackboard::new(Node::Cognitive),
            motivational: Blackboard::new(Node::Motivational),
            registers: BTreeMap::new(),
            last_seen: BTreeMap::new(),
            activations: BTreeMap::new(),
            winner: None,
            gated: None,
            tick: 0,
        }
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn coupling(&self) -> &StimulusCoupling {
        &self.coupling
    }

    pub fn columns(&self) -> &[BehaviouralColumn] {
        &self.columns
    }

    pub fn column(&self, id: Column) -> &BehaviouralColumn {
        &self.columns[id as usize]
    }

    pub fn alpha(&self, id: Column) -> f64 {
        self.column(id).alpha_state.alpha
    }

    pub fn alpha_state(&self, id: Column) -> &AlphaState {
        &self.column(id).alpha_state
    }

    /// Replaces a column's motivation degree and learning parameters.
    pub fn set_alpha_state(&mut self, id: Column, state: AlphaState) -> Result<()> {
        state.validate(id.name())?;
        self.columns[id as usize].alpha_state = state;
        Ok(())
    }

    /// Certainty of the column's congruent element this tick.
    pub fn congruent(&self, id: Column) -> f64 {
        self.motivational.certainty(MOT_CONGRUENTS, Subject::Column(id))
    }

    /// Unclamped combination value computed for the column this tick.
    pub fn raw_activation(&self, id: Column) -> f64 {
        self.activations.get(&id).map_or(0.0, |a| a.raw)
    }

    pub fn winner(&self) -> Option<Column> {
        self.winner
    }

    pub fn cognitive(&self) -> &Blackboard {
        &self.cognitive
    }

    pub fn motivational(&self) -> &Blackboard {
        &self.motivational
    }

    pub fn register(&self, behavior: InternalBehavior) -> ActivityRegister {
        self.registers.get(&behavior).copied().unwrap_or_default()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Drops all solution elements; motivation degrees are kept.
    pub fn clear_blackboards(&mut self) {
        self.cognitive = Blackboard::new(Node::Cognitive);
        self.motivational = Blackboard::new(Node::Motivational);
        self.last_seen.clear();
        self.activations.clear();
        self.winner = None;
        self.gated = None;
    }

    fn mark(&mut self, behavior: InternalBehavior) {
        let r = self.registers.entry(behavior).or_default();
        r.last_active = Some(self.tick);
        r.activations += 1;
    }

    /// Exteroceptors: one element per perceived kind on both external
    /// perception levels, keeping the strongest of duplicate percepts.
    pub fn write_exteroception(&mut self, percepts: &[Percept]) {
        self.cognitive.clear_level(COG_EXTERNAL);
        self.motivational.clear_level(MOT_EXTERNAL);
        let mut strongest: BTreeMap<StimulusKind, Percept> = BTreeMap::new();
        for p in percepts {
            if p.intensity <= 0.0 {
                continue;
            }
            match strongest.get(&p.kind) {
                Some(prev) if prev.intensity >= p.intensity => {}
                _ => {
                    strongest.insert(p.kind, *p);
                }
            }
        }
        for (kind, p) in strongest {
            self.cognitive
                .write(COG_EXTERNAL, Subject::Stimulus(kind), p.intensity, self.tick);
            self.motivational
                .write(MOT_EXTERNAL, Subject::Stimulus(kind), p.intensity, self.tick);
            self.last_seen.insert(kind, p);
        }
    }

    /// Interoceptors: internal states onto the motivational node.
    pub fn write_interoception(&mut self, states: &InternalStates) {
        self.motivational.clear_level(MOT_INTERNAL);
        let signals = [
            (Column::Hunger, states.hunger),
            (Column::Thirst, states.thirst),
            (Column::Fatigue, states.fatigue),
            (Column::Safety, self.params.safety_vigilance),
        ];
        for (column, value) in signals {
            if value > 0.0 {
                self.motivational
                    .write(MOT_INTERNAL, Subject::Column(column), value, self.tick);
            }
        }
    }

    /// Persistent = max(current perception, decay * previous persistent).
    pub fn perceptual_persistence_step(&mut self) {
        let decay = self.params.persistence_decay;
        let floor = self.params.activation_floor;
        let mut any = false;
        for kind in StimulusKind::ALL {
            let subject = Subject::Stimulus(kind);
            let current = self.cognitive.certainty(COG_EXTERNAL, subject);
            let previous = self.cognitive.certainty(COG_PERSISTENTS, subject);
            let value = current.max(decay * previous);
            if value > 0.0 && (value >= floor || current > 0.0) {
                self.cognitive.write(COG_PERSISTENTS, subject, value, self.tick);
                any = true;
            } else {
                self.cognitive.remove(COG_PERSISTENTS, subject);
                self.last_seen.remove(&kind);
            }
        }
        if any {
            self.mark(InternalBehavior::PerceptualPersistence);
        }
    }

    /// Combines internal and external signals per column, writes the
    /// congruents and adjusts each column's motivation degree.
    pub fn congruence_step(&mut self) {
        self.activations.clear();
        let mut next_congruents = Vec::with_capacity(self.columns.len());
        for col in &mut self.columns {
            let subject = Subject::Column(col.id);
            let o_drive = self.motivational.certainty(MOT_DRIVE, subject);
            let inputs = col
                .congruence
                .combination_inputs(&self.motivational, o_drive, col.alpha_state.alpha);
            let activation = combine_activation(&inputs).expect("blackboard signals are certainties");
            let ext = external_sum(&inputs.fa_external, &inputs.o_external).expect("lengths match by construction");
            col.alpha_state = alpha_update(col.alpha_state, inputs.o_internal, ext);
            self.activations.insert(col.id, activation);
            next_congruents.push((subject, activation.certainty));
        }
        self.motivational.clear_level(MOT_CONGRUENTS);
        let mut wrote = false;
        for (subject, certainty) in next_congruents {
            if certainty > 0.0 {
                self.motivational.write(MOT_CONGRUENTS, subject, certainty, self.tick);
                wrote = true;
            }
        }
        if wrote {
            self.mark(InternalBehavior::InteroExteroDriveCongruence);
        }
    }

    /// Winner-take-all over the congruents of columns whose need is above
    /// the column's theta. Competes on the unclamped activation; ties go to
    /// the earlier column.
    pub fn consummatory_preference_select(&mut self) -> Option<Column> {
        let floor = self.params.activation_floor;
        let mut best: Option<(Column, Activation)> = None;
        for col in Column::ALL {
            let subject = Subject::Column(col);
            let need = self.motivational.certainty(MOT_INTERNAL, subject);
            if need <= 0.0 || need <= self.alpha_state(col).theta {
                continue;
            }
            let Some(a) = self.activations.get(&col).copied() else {
                continue;
            };
            if a.certainty < floor {
                continue;
            }
            if best.is_none_or(|(_, b)| a.raw > b.raw) {
                best = Some((col, a));
            }
        }
        self.motivational.clear_level(MOT_DRIVE);
        self.cognitive.clear_level(COG_PREFERENTS);
        self.winner = best.map(|(c, _)| c);
        if let Some((col, a)) = best {
            self.motivational
                .write(MOT_DRIVE, Subject::Column(col), a.certainty, self.tick);
            self.cognitive
                .write(COG_PREFERENTS, Subject::Column(col), a.certainty, self.tick);
            self.mark(InternalBehavior::ConsummatoryPreferencesSelector);
        }
        self.winner
    }

    /// Gates the preferred column against its persistent external signal.
    pub fn attention_to_preferences_step(&mut self) {
        self.cognitive.clear_level(COG_DRIVE_PERCEPTION);
        self.gated = None;
        let Some(winner) = self.winner else { return };
        let preference = self.cognitive.certainty(COG_PREFERENTS, Subject::Column(winner));
        let mut best: Option<(StimulusKind, f64)> = None;
        for (kind, fa) in self.coupling.linked(winner) {
            if fa <= 0.0 {
                continue;
            }
            let persistent = self.cognitive.certainty(COG_PERSISTENTS, Subject::Stimulus(kind));
            if persistent > 0.0 && best.is_none_or(|(_, b)| fa * persistent > b) {
                best = Some((kind, fa * persistent));
            }
        }
        if let Some((kind, _)) = best {
            let persistent = self.cognitive.certainty(COG_PERSISTENTS, Subject::Stimulus(kind));
            self.cognitive.write(
                COG_DRIVE_PERCEPTION,
                Subject::Column(winner),
                persistent.min(preference),
                self.tick,
            );
            self.gated = Some(kind);
            self.mark(InternalBehavior::AttentionToPreferences);
        }
    }

    fn current_percept(&self, kind: StimulusKind) -> Option<Percept> {
        if self.cognitive.certainty(COG_EXTERNAL, Subject::Stimulus(kind)) > 0.0 {
            self.last_seen.get(&kind).copied()
        } else {
            None
        }
    }

    /// Reflexes, reactive-response inhibition and the external behaviour
    /// selector, resolved by priority.
    pub fn reactive_and_select_action(&mut self) -> Decision {
        self.cognitive.clear_level(COG_POTENTIAL);
        self.cognitive.clear_level(COG_ACTIONS);
        let p = self.params;
        let winner_certainty = self
            .winner
            .map_or(0.0, |c| self.cognitive.certainty(COG_PREFERENTS, Subject::Column(c)));

        let obstacle = self.current_percept(StimulusKind::Obstacle);
        let blob = self.current_percept(StimulusKind::Blob);
        let mut potential: Vec<(MotorBehavior, f64)> = Vec::new();
        if let Some(o) = obstacle {
            potential.push((MotorBehavior::AvoidObstacles, o.intensity));
        }
        if let Some(b) = blob {
            potential.push((MotorBehavior::Runaway, b.intensity));
        }
        if let Some(c) = self.winner {
            potential.push((c.consummatory(), winner_certainty));
        }

        let mut inhibited = false;
        let decision = if let Some(o) = obstacle.filter(|o| o.intensity > p.obstacle_reflex) {
            Decision {
                behavior: MotorBehavior::AvoidObstacles,
                column: None,
                target: Some(o),
            }
        } else if let Some(b) = blob.filter(|b| b.intensity > winner_certainty.max(p.activation_floor)) {
            Decision {
                behavior: MotorBehavior::Runaway,
                column: None,
                target: Some(b),
            }
        } else {
            inhibited = blob.is_some();
            self.motivated_action()
        };
        if inhibited {
            self.mark(InternalBehavior::ReactiveResponseInhibition);
        }

        for (behavior, certainty) in potential {
            self.cognitive
                .write(COG_POTENTIAL, Subject::Behavior(behavior), certainty, self.tick);
        }
        let selected_certainty = decision
            .target
            .map(|t| t.intensity)
            .unwrap_or(winner_certainty)
            .max(winner_certainty);
        self.cognitive.write(
            COG_ACTIONS,
            Subject::Behavior(decision.behavior),
            selected_certainty,
            self.tick,
        );
        self.mark(InternalBehavior::ExternalBehavioursSelector);
        decision
    }

    fn motivated_action(&self) -> Decision {
        let wander = Decision {
            behavior: MotorBehavior::Wander,
            column: None,
            target: None,
        };
        let Some(winner) = self.winner else { return wander };

        if winner == Column::Safety {
            return match self.current_percept(StimulusKind::Blob) {
                Some(b) => Decision {
                    behavior: MotorBehavior::Runaway,
                    column: Some(winner),
                    target: Some(b),
                },
                None => wander,
            };
        }

        if let Some(kind) = self.gated {
            let reachable = self
                .current_percept(kind)
                .filter(|t| t.distance <= self.params.interaction_range);
            return match reachable {
                Some(t) => Decision {
                    behavior: winner.consummatory(),
                    column: Some(winner),
                    target: Some(t),
                },
                None => Decision {
                    behavior: MotorBehavior::Approach,
                    column: Some(winner),
                    target: self.last_seen.get(&kind).copied(),
                },
            };
        }

        let certainty = self.motivational.certainty(MOT_CONGRUENTS, Subject::Column(winner));
        if winner.is_appetitive() && certainty > self.params.explore_threshold {
            Decision {
                behavior: MotorBehavior::Explore,
                column: Some(winner),
                target: None,
            }
        } else {
            wander
        }
    }

    /// Runs the full pipeline once and returns the selected behaviour.
    pub fn network_tick(&mut self, percepts: &[Percept], states: &InternalStates) -> Decision {
        self.write_exteroception(percepts);
        self.write_interoception(states);
        self.perceptual_persistence_step();
        self.congruence_step();
        self.consummatory_preference_select();
        self.attention_to_preferences_step();
        let decision = self.reactive_and_select_action();
        self.tick += 1;
        decision
    }
}

//! Blackboard nodes: leveled stores of solution elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Column;
use crate::world::{MotorBehavior, StimulusKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Cognitive,
    Motivational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CognitiveLevel {
    ExternalPerceptions,
    PerceptualPersistents,
    ConsummatoryPreferents,
    DrivePerceptionCongruents,
    PotentialActions,
    Actions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotivationalLevel {
    InternalPerceptions,
    ExternalPerceptions,
    InteroExteroDriveCongruents,
    Drive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlackboardLevel {
    Cognitive(CognitiveLevel),
    Motivational(MotivationalLevel),
}

impl BlackboardLevel {
    pub const COGNITIVE: [BlackboardLevel; 6] = [
        BlackboardLevel::Cognitive(CognitiveLevel::ExternalPerceptions),
        BlackboardLevel::Cognitive(CognitiveLevel::PerceptualPersistents),
        BlackboardLevel::Cognitive(CognitiveLevel::ConsummatoryPreferents),
        BlackboardLevel::Cognitive(CognitiveLevel::DrivePerceptionCongruents),
        BlackboardLevel::Cognitive(CognitiveLevel::PotentialActions),
        BlackboardLevel::Cognitive(CognitiveLevel::Actions),
    ];

    pub const MOTIVATIONAL: [BlackboardLevel; 4] = [
        BlackboardLevel::Motivational(MotivationalLevel::InternalPerceptions),
        BlackboardLevel::Motivational(MotivationalLevel::ExternalPerceptions),
        BlackboardLevel::Motivational(MotivationalLevel::InteroExteroDriveCongruents),
        BlackboardLevel::Motivational(MotivationalLevel::Drive),
    ];

    pub fn node(self) -> Node {
        match self {
            BlackboardLevel::Cognitive(_) => Node::Cognitive,
            BlackboardLevel::Motivational(_) => Node::Motivational,
        }
    }
}

/// What a solution element is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Column(Column),
    Stimulus(StimulusKind),
    Behavior(MotorBehavior),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionElement {
    pub subject: Subject,
    pub level: BlackboardLevel,
    pub certainty: f64,
    pub tick_written: u64,
}

/// One blackboard node. At most one element is held per (level, subject).
#[derive(Debug, Clone, PartialEq)]
pub struct Blackboard {
    node: Node,
    elements: BTreeMap<(BlackboardLevel, Subject), SolutionElement>,
}

impl Blackboard {
    pub fn new(node: Node) -> Self {
        Blackboard {
            node,
            elements: BTreeMap::new(),
        }
    }

    pub fn node(&self) -> Node {
        self.node
    }

    pub fn levels(&self) -> &'static [BlackboardLevel] {
        match self.node {
            Node::Cognitive => &BlackboardLevel::COGNITIVE,
            Node::Motivational => &BlackboardLevel::MOTIVATIONAL,
        }
    }

    /// Creates or replaces an element. Certainty is clamped to `[0, 1]`.
    pub fn write(&mut self, level: BlackboardLevel, subject: Subject, certainty: f64, tick: u64) {
        assert_eq!(
            level.node(),
            self.node,
            "level {level:?} does not belong to {:?}",
            self.node
        );
        let certainty = if certainty.is_nan() {
            0.0
        } else {
            certainty.clamp(0.0, 1.0)
        };
        self.elements.insert(
            (level, subject),
            SolutionElement {
                subject,
                level,
                certainty,
                tick_written: tick,
            },
        );
    }

    pub fn get(&self, level: BlackboardLevel, subject: Subject) -> Option<&SolutionElement> {
        self.elements.get(&(level, subject))
    }

    /// Certainty of an element, zero when absent.
    pub fn certainty(&self, level: BlackboardLevel, subject: Subject) -> f64 {
        self.get(level, subject).map_or(0.0, |e| e.certainty)
    }

    pub fn remove(&mut self, level: BlackboardLevel, subject: Subject) {
        self.elements.remove(&(level, subject));
    }

    pub fn clear_level(&mut self, level: BlackboardLevel) {
        self.elements.retain(|(l, _), _| *l != level);
    }

    pub fn level(&self, level: BlackboardLevel) -> impl Iterator<Item = &SolutionElement> {
        self.elements
            .range((level, Subject::Column(Column::Hunger))..)
            .take_while(move |((l, _), _)| *l == level)
            .map(|(_, e)| e)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &SolutionElement> {
        self.elements.values()
    }
}

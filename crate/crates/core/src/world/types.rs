use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_unit, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn bearing_to(self, other: Vec2) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = theta % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

/// Kinds of things an animat can perceive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StimulusKind {
    FoodSource,
    WaterSource,
    Grass,
    Blob,
    Spot,
    Obstacle,
}

impl StimulusKind {
    pub const ALL: [StimulusKind; 6] = [
        StimulusKind::FoodSource,
        StimulusKind::WaterSource,
        StimulusKind::Grass,
        StimulusKind::Blob,
        StimulusKind::Spot,
        StimulusKind::Obstacle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StimulusKind::FoodSource => "food_source",
            StimulusKind::WaterSource => "water_source",
            StimulusKind::Grass => "grass",
            StimulusKind::Blob => "blob",
            StimulusKind::Spot => "spot",
            StimulusKind::Obstacle => "obstacle",
        }
    }
}

impl fmt::Display for StimulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The eight external behaviours an animat can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotorBehavior {
    Wander,
    Explore,
    Approach,
    AvoidObstacles,
    Rest,
    Eat,
    Drink,
    Runaway,
}

impl MotorBehavior {
    pub const ALL: [MotorBehavior; 8] = [
        MotorBehavior::Wander,
        MotorBehavior::Explore,
        MotorBehavior::Approach,
        MotorBehavior::AvoidObstacles,
        MotorBehavior::Rest,
        MotorBehavior::Eat,
        MotorBehavior::Drink,
        MotorBehavior::Runaway,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MotorBehavior::Wander => "wander",
            MotorBehavior::Explore => "explore",
            MotorBehavior::Approach => "approach",
            MotorBehavior::AvoidObstacles => "avoid_obstacles",
            MotorBehavior::Rest => "rest",
            MotorBehavior::Eat => "eat",
            MotorBehavior::Drink => "drink",
            MotorBehavior::Runaway => "runaway",
        }
    }

    pub fn is_locomotion(self) -> bool {
        !matches!(self, MotorBehavior::Rest | MotorBehavior::Eat | MotorBehavior::Drink)
    }
}

impl fmt::Display for MotorBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the animat senses of one stimulus kind this tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percept {
    pub kind: StimulusKind,
    /// In `[0, 1]`, 1 when touching the source.
    pub intensity: f64,
    /// Radians toward the source that produced the intensity.
    pub bearing: f64,
    /// Distance to that source's surface.
    pub distance: f64,
}

impl Percept {
    pub fn new(kind: StimulusKind, intensity: f64, bearing: f64, distance: f64) -> Self {
        Percept {
            kind,
            intensity,
            bearing,
            distance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InternalStates {
    pub hunger: f64,
    pub thirst: f64,
    pub fatigue: f64,
}

impl InternalStates {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        check_unit(&format!("{prefix}.hunger"), self.hunger)?;
        check_unit(&format!("{prefix}.thirst"), self.thirst)?;
        check_unit(&format!("{prefix}.fatigue"), self.fatigue)
    }

    pub fn clamp(&mut self) {
        self.hunger = self.hunger.clamp(0.0, 1.0);
        self.thirst = self.thirst.clamp(0.0, 1.0);
        self.fatigue = self.fatigue.clamp(0.0, 1.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Qualities {
    pub strength: f64,
    pub lucidity: f64,
}

impl Default for Qualities {
    fn default() -> Self {
        Qualities {
            strength: 1.0,
            lucidity: 1.0,
        }
    }
}

impl Qualities {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        check_unit(&format!("{prefix}.strength"), self.strength)?;
        check_unit(&format!("{prefix}.lucidity"), self.lucidity)
    }
}

/// Consumable stock of an entity; infinite stock is written as `null` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Magnitude(pub f64);

impl Magnitude {
    pub const INFINITE: Magnitude = Magnitude(f64::INFINITY);

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Default for Magnitude {
    fn default() -> Self {
        Magnitude::INFINITE
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for Magnitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map_or(Magnitude::INFINITE, Magnitude))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: u64,
    pub kind: StimulusKind,
    pub position: Vec2,
    pub radius: f64,
    pub magnitude: Magnitude,
}

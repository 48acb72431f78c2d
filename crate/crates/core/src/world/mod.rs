//! 2-D environment, animat body, perception, locomotion and physiology.

mod types;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use types::{wrap_angle, Entity, InternalStates, Magnitude, MotorBehavior, Percept, Qualities, StimulusKind, Vec2};

use crate::error::{check_range, CoreError, Result};
use crate::harness::trace::{ColumnValues, TraceRecord};
use crate::network::{BecaNetwork, Column, ColumnAlphas, Decision, NetworkParams, StimulusCoupling};

/// Per-tick physiology rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysiologyRates {
    pub hunger_rate: f64,
    pub thirst_rate: f64,
    /// Applied only on ticks spent moving.
    pub fatigue_rate: f64,
    pub eat_rate: f64,
    pub drink_rate: f64,
    pub rest_rate: f64,
    /// Fraction of `eat_rate` obtained from grass.
    pub grass_factor: f64,
    /// Weight of the previous value when smoothing strength and lucidity.
    pub quality_blend: f64,
}

impl Default for PhysiologyRates {
    fn default() -> Self {
        PhysiologyRates {
            hunger_rate: 0.002,
            thirst_rate: 0.003,
            fatigue_rate: 0.001,
            eat_rate: 0.02,
            drink_rate: 0.02,
            rest_rate: 0.01,
            grass_factor: 0.5,
            quality_blend: 0.99,
        }
    }
}

impl PhysiologyRates {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (n, v) in [
            ("hunger_rate", self.hunger_rate),
            ("thirst_rate", self.thirst_rate),
            ("fatigue_rate", self.fatigue_rate),
            ("eat_rate", self.eat_rate),
            ("drink_rate", self.drink_rate),
            ("rest_rate", self.rest_rate),
            ("grass_factor", self.grass_factor),
            ("quality_blend", self.quality_blend),
        ] {
            check_range(&format!("{prefix}.{n}"), v, 0.0, 1.0, "expected a value in [0, 1]")?;
        }
        Ok(())
    }
}

/// Coarse visit-count grid used to bias exploration toward unvisited cells.
#[derive(Debug, Clone, PartialEq)]
pub struct VisitGrid {
    cell: f64,
    cols: usize,
    rows: usize,
    counts: Vec<u32>,
}

impl VisitGrid {
    /// Cells are a tenth of the world width.
    pub fn new(width: f64, height: f64) -> Self {
        let cell = width / 10.0;
        let cols = 10;
        let rows = ((height / cell).ceil() as usize).max(1);
        VisitGrid {
            cell,
            cols,
            rows,
            counts: vec![0; cols * rows],
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn index(&self, p: Vec2) -> usize {
        let c = ((p.x / self.cell).floor().max(0.0) as usize).min(self.cols - 1);
        let r = ((p.y / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        r * self.cols + c
    }

    pub fn visit(&mut self, p: Vec2) {
        let i = self.index(p);
        self.counts[i] = self.counts[i].saturating_add(1);
    }

    pub fn count(&self, p: Vec2) -> u32 {
        self.counts[self.index(p)]
    }

    pub fn cells_visited(&self) -> usize {
        self.counts.iter().filter(|c| **c > 0).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Animat {
    pub id: String,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub perception_radius: f64,
    pub internal: InternalStates,
    pub qualities: Qualities,
    pub physiology: PhysiologyRates,
    pub network: BecaNetwork,
    pub visits: VisitGrid,
}

impl Animat {
    pub fn new(id: impl Into<String>, position: Vec2, world: &World) -> Self {
        Animat {
            id: id.into(),
            position,
            heading: 0.0,
            speed: 1.0,
            perception_radius: 20.0,
            internal: InternalStates::default(),
            qualities: Qualities::default(),
            physiology: PhysiologyRates::default(),
            network: BecaNetwork::new(
                NetworkParams::default(),
                StimulusCoupling::default(),
                ColumnAlphas::default(),
            ),
            visits: VisitGrid::new(world.width, world.height),
        }
    }
}

#[derive(Debug, Clone)]
pub struct World {
    pub width: f64,
    pub height: f64,
    entities: Vec<Entity>,
    next_id: u64,
    seed: u64,
    rng: ChaCha8Rng,
    tick: u64,
    phase: usize,
}

impl World {
    pub fn new(width: f64, height: f64, seed: u64) -> Self {
        World {
            width,
            height,
            entities: Vec::new(),
            next_id: 1,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tick: 0,
            phase: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn set_phase(&mut self, phase: usize) {
        self.phase = phase;
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity(&self, id: u64) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    pub fn add_entity(&mut self, kind: StimulusKind, position: Vec2, radius: f64, magnitude: Magnitude) -> Result<u64> {
        if !(position.x.is_finite() && position.y.is_finite()) || !self.contains(position) {
            let field = if (0.0..=self.width).contains(&position.x) {
                "y"
            } else {
                "x"
            };
            let value = if field == "x" { position.x } else { position.y };
            return Err(CoreError::out_of_range(field, value, "position outside world bounds"));
        }
        check_range("radius", radius, f64::MIN_POSITIVE, f64::MAX, "expected radius > 0")?;
        if magnitude.0.is_nan() || magnitude.0 < 0.0 {
            return Err(CoreError::out_of_range(
                "magnitude",
                magnitude.0,
                "expected magnitude >= 0",
            ));
        }
        let id = self.next_id;
        self.next_id += 1;
        self.entities.push(Entity {
            id,
            kind,
            position,
            radius,
            magnitude,
        });
        Ok(id)
    }

    pub fn remove_entity(&mut self, id: u64) -> Option<Entity> {
        let i = self.entities.iter().position(|e| e.id == id)?;
        Some(self.entities.remove(i))
    }

    pub fn clear_entities(&mut self) {
        self.entities.clear();
    }

    fn clamp_to_bounds(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }

    fn overlaps_obstacle(&self, p: Vec2, tolerance: f64) -> bool {
        self.entities
            .iter()
            .filter(|e| e.kind == StimulusKind::Obstacle)
            .any(|e| p.distance(e.position) < e.radius - tolerance)
    }

    /// Moves from `from` toward `to`, sliding along bounds and obstacle
    /// surfaces. Falls back to `from` if no free position is found.
    fn resolve_motion(&self, from: Vec2, to: Vec2) -> Vec2 {
        let mut p = self.clamp_to_bounds(to);
        for _ in 0..8 {
            let mut pushed = false;
            for e in self.entities.iter().filter(|e| e.kind == StimulusKind::Obstacle) {
                let d = p.distance(e.position);
                if d < e.radius {
                    pushed = true;
                    p = if d > 1e-12 {
                        e.position + (p - e.position) * (e.radius / d)
                    } else {
                        from
                    };
                }
            }
            p = self.clamp_to_bounds(p);
            if !pushed {
                break;
            }
        }
        if self.overlaps_obstacle(p, 1e-9) {
            from
        } else {
            p
        }
    }

    fn nearest_in_range(&self, position: Vec2, kind: StimulusKind, range: f64) -> Option<usize> {
        self.entities
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == kind)
            .map(|(i, e)| (i, (position.distance(e.position) - e.radius).max(0.0)))
            .filter(|(_, d)| *d <= range)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }
}

/// Strongest percept of every stimulus kind within the perception radius.
pub fn sense(world: &World, animat: &Animat) -> Vec<Percept> {
    let radius = animat.perception_radius;
    let mut out: Vec<Percept> = Vec::new();
    for kind in StimulusKind::ALL {
        let best = world
            .entities
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| {
                let d = (animat.position.distance(e.position) - e.radius).max(0.0);
                (e, d, (1.0 - d / radius).max(0.0))
            })
            .filter(|(_, _, i)| *i > 0.0)
            .max_by(|a, b| a.2.total_cmp(&b.2).then(b.1.total_cmp(&a.1)));
        if let Some((e, d, intensity)) = best {
            out.push(Percept::new(kind, intensity, animat.position.bearing_to(e.position), d));
        }
    }
    out
}

fn turn_toward(heading: f64, target: f64, max_turn: f64) -> f64 {
    let diff = wrap_angle(target - heading);
    wrap_angle(heading + diff.clamp(-max_turn, max_turn))
}

const MAX_TURN: f64 = 0.5;
const WANDER_TURN: f64 = 2.0;
const EXPLORE_JITTER: f64 = 0.1;

/// Executes the locomotion part of a decision.
pub fn motor_step(world: &mut World, animat: &mut Animat, decision: &Decision) {
    let speed = animat.speed;
    let (heading, distance) = match decision.behavior {
        MotorBehavior::Wander => {
            let turn = world.rng.random_range(-WANDER_TURN..WANDER_TURN);
            (wrap_angle(animat.heading + turn), speed * 0.5)
        }
        MotorBehavior::Explore => (explore_heading(world, animat), speed),
        MotorBehavior::Approach => match decision.target {
            Some(t) => (turn_toward(animat.heading, t.bearing, MAX_TURN), speed.min(t.distance)),
            None => (animat.heading, speed),
        },
        MotorBehavior::Runaway => match decision.target {
            Some(t) => (turn_toward(animat.heading, t.bearing + PI, MAX_TURN), speed),
            None => (animat.heading, speed),
        },
        MotorBehavior::AvoidObstacles => match decision.target {
            Some(t) => {
                let left = wrap_angle(t.bearing + PI / 2.0);
                let right = wrap_angle(t.bearing - PI / 2.0);
                let h = if wrap_angle(left - animat.heading).abs() <= wrap_angle(right - animat.heading).abs() {
                    left
                } else {
                    right
                };
                (h, speed)
            }
            None => (animat.heading, speed),
        },
        MotorBehavior::Rest | MotorBehavior::Eat | MotorBehavior::Drink => (animat.heading, 0.0),
    };
    animat.heading = heading;
    if distance > 0.0 {
        let target = animat.position + Vec2::from_angle(heading) * distance;
        animat.position = world.resolve_motion(animat.position, target);
    }
    animat.visits.visit(animat.position);
}

/// Correlated walk that prefers the least visited cell one cell ahead.
fn explore_heading(world: &mut World, animat: &Animat) -> f64 {
    let jitter = world.rng.random_range(-EXPLORE_JITTER..EXPLORE_JITTER);
    let look = animat.visits.cell_size();
    let mut best: Option<(f64, u32)> = None;
    for turn in [0.0, -0.25, 0.25, -0.5, 0.5] {
        let h = wrap_angle(animat.heading + turn + jitter);
        let ahead = animat.position + Vec2::from_angle(h) * look;
        if !world.contains(ahead) {
            continue;
        }
        let score = animat.visits.count(ahead);
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((h, score));
        }
    }
    best.map_or(wrap_angle(animat.heading + PI + jitter), |(h, _)| h)
}

/// Updates internal states and qualities for the executed behaviour and
/// draws down the stock of whatever was consumed.
pub fn physiology_step(world: &mut World, animat: &mut Animat, behavior: MotorBehavior) {
    let rates = animat.physiology;
    let range = animat.network.params().interaction_range;
    let s = &mut animat.internal;

    let mut ate = false;
    let mut drank = false;
    let mut rested = false;
    match behavior {
        MotorBehavior::Eat => {
            let source = world
                .nearest_in_range(animat.position, StimulusKind::FoodSource, range)
                .map(|i| (i, 1.0))
                .or_else(|| {
                    world
                        .nearest_in_range(animat.position, StimulusKind::Grass, range)
                        .map(|i| (i, rates.grass_factor))
                });
            match source {
                Some((i, factor)) => {
                    s.hunger -= rates.eat_rate * factor;
                    consume(&mut world.entities[i]);
                    ate = true;
                }
                None => log::warn!("{}: eat selected with no food in range", animat.id),
            }
        }
        MotorBehavior::Drink => match world.nearest_in_range(animat.position, StimulusKind::WaterSource, range) {
            Some(i) => {
                s.thirst -= rates.drink_rate;
                consume(&mut world.entities[i]);
                drank = true;
            }
            None => log::warn!("{}: drink selected with no water in range", animat.id),
        },
        MotorBehavior::Rest => match world.nearest_in_range(animat.position, StimulusKind::Spot, range) {
            Some(i) => {
                let m = world.entities[i].magnitude;
                let effectiveness = if m.is_finite() { m.0 } else { 1.0 };
                s.fatigue -= rates.rest_rate * effectiveness;
                rested = true;
            }
            None => log::warn!("{}: rest selected with no spot in range", animat.id),
        },
        _ => {}
    }
    if !ate {
        s.hunger += rates.hunger_rate;
    }
    if !drank {
        s.thirst += rates.thirst_rate;
    }
    if !rested && behavior.is_locomotion() {
        s.fatigue += rates.fatigue_rate;
    }
    s.clamp();

    let q = &mut animat.qualities;
    let b = rates.quality_blend;
    q.strength = (b * q.strength + (1.0 - b) * (1.0 - s.hunger.max(s.thirst))).clamp(0.0, 1.0);
    q.lucidity = (b * q.lucidity + (1.0 - b) * (1.0 - s.fatigue)).clamp(0.0, 1.0);
}

fn consume(e: &mut Entity) {
    if e.magnitude.is_finite() {
        e.magnitude.0 = (e.magnitude.0 - 1.0).max(0.0);
    }
}

fn column_values(f: impl Fn(Column) -> f64) -> ColumnValues {
    ColumnValues {
        hunger: f(Column::Hunger),
        thirst: f(Column::Thirst),
        fatigue: f(Column::Fatigue),
    }
}

/// Advances every animat one tick: sense, decide, move, metabolise. Animats
/// do not perceive each other.
pub fn world_tick(world: &mut World, animats: &mut [Animat]) -> Vec<TraceRecord> {
    let mut records = Vec::with_capacity(animats.len());
    for animat in animats.iter_mut() {
        let percepts = sense(world, animat);
        let decision = animat.network.network_tick(&percepts, &animat.internal);
        motor_step(world, animat, &decision);
        physiology_step(world, animat, decision.behavior);
        records.push(TraceRecord {
            tick: world.tick,
            phase: world.phase,
            animat: animat.id.clone(),
            x: animat.position.x,
            y: animat.position.y,
            heading: animat.heading,
            behavior: decision.behavior,
            alpha: column_values(|c| animat.network.alpha(c)),
            congruent: column_values(|c| animat.network.congruent(c)),
            internal: animat.internal,
            qualities: animat.qualities,
        });
    }
    world
        .entities
        .retain(|e| !(e.magnitude.is_finite() && e.magnitude.0 <= 0.0 && consumable(e.kind)));
    world.tick += 1;
    records
}

fn consumable(kind: StimulusKind) -> bool {
    matches!(
        kind,
        StimulusKind::FoodSource | StimulusKind::WaterSource | StimulusKind::Grass
    )
}

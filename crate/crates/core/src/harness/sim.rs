use crate::error::Result;
use crate::harness::metrics::{compute_metrics, ExperimentMetrics, MetricBounds};
use crate::harness::scenario::{EntitySpec, Scenario};
use crate::harness::trace::TraceRecord;
use crate::network::BecaNetwork;
use crate::world::{world_tick, Animat, Vec2, VisitGrid, World};

/// A scenario instantiated as a steppable world.
#[derive(Debug, Clone)]
pub struct Simulation {
    scenario: Scenario,
    world: World,
    animats: Vec<Animat>,
    /// Index of the next phase to apply.
    next_phase: usize,
}

fn populate(world: &mut World, entities: &[EntitySpec]) -> Result<()> {
    world.clear_entities();
    for e in entities {
        world.add_entity(e.kind, Vec2::new(e.x, e.y), e.radius, e.magnitude)?;
    }
    Ok(())
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let spec = &scenario.world;
        let mut world = World::new(spec.width, spec.height, scenario.seed);
        populate(&mut world, &spec.entities)?;
        let animats = scenario
            .animats
            .iter()
            .map(|a| Animat {
                id: a.id.clone(),
                position: a.position(spec),
                heading: a.heading,
                speed: a.speed,
                perception_radius: a.perception_radius,
                internal: a.internal,
                qualities: a.qualities,
                physiology: a.physiology,
                network: BecaNetwork::new(a.network, a.coupling, a.columns),
                visits: VisitGrid::new(spec.width, spec.height),
            })
            .collect();
        Ok(Simulation {
            scenario: scenario.clone(),
            world,
            animats,
            next_phase: 0,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn animats(&self) -> &[Animat] {
        &self.animats
    }

    pub fn animats_mut(&mut self) -> &mut [Animat] {
        &mut self.animats
    }

    pub fn animat_mut(&mut self, id: &str) -> Option<&mut Animat> {
        self.animats.iter_mut().find(|a| a.id == id)
    }

    pub fn tick(&self) -> u64 {
        self.world.tick()
    }

    pub fn is_finished(&self) -> bool {
        self.world.tick() >= self.scenario.ticks
    }

    fn apply_due_phases(&mut self) {
        let tick = self.world.tick();
        while let Some(phase) = self.scenario.phases.get(self.next_phase) {
            if phase.at_tick > tick {
                break;
            }
            if let Some(states) = &phase.set_internal {
                for a in &mut self.animats {
                    states.apply(&mut a.internal);
                }
            }
            if let Some(entities) = &phase.entities {
                populate(&mut self.world, entities).expect("phase entities validated with the scenario");
            }
            if phase.clear_blackboards {
                for a in &mut self.animats {
                    a.network.clear_blackboards();
                }
            }
            self.world.set_phase(self.next_phase);
            self.next_phase += 1;
        }
    }

    /// Advances one tick; phases whose start tick has been reached are
    /// applied first. Stepping past the scenario duration is allowed.
    pub fn step(&mut self) -> Vec<TraceRecord> {
        self.apply_due_phases();
        world_tick(&mut self.world, &mut self.animats)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seed: u64,
    pub trace: Vec<TraceRecord>,
    pub metrics: ExperimentMetrics,
}

/// Runs a scenario to its configured duration.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    let mut sim = Simulation::new(scenario)?;
    let mut trace = Vec::with_capacity((scenario.ticks as usize) * scenario.animats.len());
    while !sim.is_finished() {
        trace.extend(sim.step());
    }
    let metrics = compute_metrics(&trace, &MetricBounds::from_scenario(scenario));
    Ok(RunOutput {
        seed: scenario.seed,
        trace,
        metrics,
    })
}

use motivsim::harness::{load_scenario, run, Scenario, Simulation};
use motivsim::world::{MotorBehavior, StimulusKind};
use proptest::prelude::*;
use serde_json::json;

const KINDS: [&str; 6] = ["food_source", "water_source", "grass", "spot", "blob", "obstacle"];

fn entity() -> impl Strategy<Value = serde_json::Value> {
    (
        0usize..6,
        0.0f64..60.0,
        0.0f64..60.0,
        0.5f64..4.0,
        prop::option::of(1u32..30),
    )
        .prop_map(|(k, x, y, radius, magnitude)| {
            let mut e = json!({"kind": KINDS[k], "x": x, "y": y, "radius": radius});
            if let Some(m) = magnitude {
                e["magnitude"] = json!(m);
            }
            e
        })
}

prop_compose! {
    fn small_world()(
        entities in prop::collection::vec(entity(), 0..12),
        x in 0.0f64..60.0,
        y in 0.0f64..60.0,
        hunger in 0.0f64..=1.0,
        thirst in 0.0f64..=1.0,
        fatigue in 0.0f64..=1.0,
        speed in 0.1f64..3.0,
        seed in any::<u64>(),
    ) -> serde_json::Value {
        json!({
            "seed": seed,
            "ticks": 150,
            "world": {"width": 60, "height": 60, "entities": entities},
            "animats": [{"x": x, "y": y, "speed": speed,
                         "internal": {"hunger": hunger, "thirst": thirst, "fatigue": fatigue}}],
        })
    }
}

fn load(doc: &serde_json::Value) -> Option<Scenario> {
    // random layouts may start the animat inside an obstacle
    load_scenario(&doc.to_string()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn animat_stays_inside_world_and_outside_obstacles(doc in small_world()) {
        let Some(s) = load(&doc) else { return Ok(()) };
        let mut sim = Simulation::new(&s).unwrap();
        while !sim.is_finished() {
            sim.step();
            let world = sim.world();
            for a in sim.animats() {
                prop_assert!(world.contains(a.position), "{:?}", a.position);
                for e in world.entities().iter().filter(|e| e.kind == StimulusKind::Obstacle) {
                    prop_assert!(a.position.distance(e.position) >= e.radius - 1e-9);
                }
            }
        }
    }

    #[test]
    fn states_and_qualities_stay_clamped(doc in small_world()) {
        let Some(s) = load(&doc) else { return Ok(()) };
        for r in run(&s).unwrap().trace {
            for v in [r.internal.hunger, r.internal.thirst, r.internal.fatigue, r.qualities.strength, r.qualities.lucidity] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(r.is_finite());
        }
    }

    #[test]
    fn identical_inputs_give_identical_traces(doc in small_world()) {
        let Some(s) = load(&doc) else { return Ok(()) };
        prop_assert_eq!(run(&s).unwrap().trace, run(&s).unwrap().trace);
    }

    #[test]
    fn consumption_never_exceeds_consummatory_ticks(doc in small_world()) {
        let Some(s) = load(&doc) else { return Ok(()) };
        let mut sim = Simulation::new(&s).unwrap();
        while !sim.is_finished() {
            let before: Vec<_> = sim.world().entities().to_vec();
            let records = sim.step();
            let consumed: f64 = before
                .iter()
                .filter(|e| e.magnitude.is_finite() && matches!(e.kind, StimulusKind::FoodSource | StimulusKind::Grass | StimulusKind::WaterSource))
                .map(|e| {
                    let now = sim.world().entity(e.id).map_or(0.0, |n| n.magnitude.0);
                    e.magnitude.0 - now
                })
                .sum();
            let consuming = records
                .iter()
                .filter(|r| matches!(r.behavior, MotorBehavior::Eat | MotorBehavior::Drink))
                .count() as f64;
            prop_assert!(consumed <= consuming);
            prop_assert!(consumed >= 0.0);
        }
    }
}

#[test]
fn single_food_magnitude_matches_eat_count() {
    let doc = json!({
        "ticks": 600,
        "world": {"entities": [{"kind": "food_source", "x": 56, "y": 50, "radius": 1, "magnitude": 1000}]},
        "animats": [{"x": 50, "y": 50, "internal": {"hunger": 1.0}}],
    });
    let s = load_scenario(&doc.to_string()).unwrap();
    let mut sim = Simulation::new(&s).unwrap();
    let mut eats = 0u32;
    while !sim.is_finished() {
        eats += sim.step().iter().filter(|r| r.behavior == MotorBehavior::Eat).count() as u32;
    }
    assert!(eats > 10);
    let food = &sim.world().entities()[0];
    assert_eq!(food.magnitude.0, 1000.0 - f64::from(eats));
}

#[test]
fn exhausted_sources_are_removed() {
    let doc = json!({
        "ticks": 200,
        "world": {"entities": [{"kind": "food_source", "x": 52, "y": 50, "radius": 1, "magnitude": 3}]},
        "animats": [{"x": 50, "y": 50, "internal": {"hunger": 1.0}}],
    });
    let out = run(&load_scenario(&doc.to_string()).unwrap()).unwrap();
    assert_eq!(out.trace.iter().filter(|r| r.behavior == MotorBehavior::Eat).count(), 3);
    let mut sim = Simulation::new(&load_scenario(&doc.to_string()).unwrap()).unwrap();
    while !sim.is_finished() {
        sim.step();
    }
    assert!(sim.world().entities().is_empty());
}

#[test]
fn blocked_start_is_rejected() {
    let doc = json!({
        "world": {"entities": [{"kind": "obstacle", "x": 50, "y": 50, "radius": 3}]},
        "animats": [{}],
    });
    let err = load_scenario(&doc.to_string()).unwrap_err();
    assert!(err.to_string().contains("animats[0]"));
}

mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use rallyforge_core::behavior::ModelConfig;
use rallyforge_core::config::EngineConfig;
use rallyforge_core::rally::stats::summarize;
use rallyforge_core::rally::{ControlOverride, Engine, EngineParams, RallyEvent, RallyLog};
use rallyforge_core::Vec2;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| {
        Engine::fit(
            common::standard_db(120, 31),
            &ModelConfig::default(),
            EngineParams::default(),
        )
        .unwrap()
    })
}

#[test]
fn batch_points_satisfy_the_invariants() {
    let e = engine();
    let logs = e.run_batch(["a", "b"], 120, 32).unwrap();
    for (i, log) in logs.iter().enumerate() {
        common::check_point(log, e.params().rally.max_shots)
            .unwrap_or_else(|m| panic!("point {i}: {m}"));
    }
    let s = summarize(&logs, e.court());
    assert_eq!(s.points, 120);
    assert_eq!(s.endings.values().sum::<u64>(), 120);
}

#[test]
fn summary_direction_counts_match_a_recount() {
    let e = engine();
    let logs = e.run_batch(["a", "b"], 60, 33).unwrap();
    let s = summarize(&logs, e.court());
    assert_eq!(
        common::count_directions(&logs, e.court()),
        (s.cross_court, s.down_the_line)
    );
}

#[test]
fn jsonl_replays_byte_for_byte() {
    let e = engine();
    let a: String = e
        .run_batch(["b", "a"], 30, 34)
        .unwrap()
        .iter()
        .map(RallyLog::to_jsonl)
        .collect();
    let b: String = (0..30)
        .map(|i| {
            let (s, r) = if i % 2 == 0 { ("b", "a") } else { ("a", "b") };
            e.run_rally(s, r, 34, i).unwrap().to_jsonl()
        })
        .collect();
    assert_eq!(a, b);
    let back = RallyLog::read_jsonl(a.as_bytes()).unwrap();
    assert_eq!(back.iter().map(RallyLog::to_jsonl).collect::<String>(), a);
}

#[test]
fn tight_shot_limit_truncates() {
    let db = common::standard_db(40, 35);
    let cfg = EngineConfig::from_toml_str("[rally]\nmax_shots = 2\n").unwrap();
    let e = Engine::fit(db, &cfg.model_config(), cfg.engine_params()).unwrap();
    for log in e.run_batch(["a", "b"], 40, 36).unwrap() {
        common::check_point(&log, 2).unwrap();
        assert!(log.end().unwrap().2 <= 2);
    }
}

#[test]
fn recovery_override_moves_the_target() {
    let e = engine();
    for seed in 0..20 {
        let mut st = e.start_point("a", "b", seed, 0).unwrap();
        let target = Vec2::new(-1.5, -12.0);
        st.queue_override(ControlOverride {
            player: "b".into(),
            placement: None,
            recovery: Some(target),
            shot_type: None,
        })
        .unwrap();
        e.step(&mut st).unwrap();
        let Some(RallyEvent::ShotCycle(r)) = st
            .log
            .events
            .iter()
            .rev()
            .find(|e| matches!(e, RallyEvent::ShotCycle(_)))
        else {
            continue;
        };
        if let Some(d) = r.decision {
            assert!((d.recovery - target).norm() < 1e-9);
            assert!(r.control.is_some());
            return;
        }
    }
    panic!("no return reached a decision");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn any_seed_gives_a_valid_point(seed in any::<u64>(), point in 0u64..1000, swap in any::<bool>()) {
        let e = engine();
        let (s, r) = if swap { ("b", "a") } else { ("a", "b") };
        let log = e.run_rally(s, r, seed, point).unwrap();
        prop_assert!(common::check_point(&log, e.params().rally.max_shots).is_ok());
        prop_assert_eq!(log.to_jsonl(), e.run_rally(s, r, seed, point).unwrap().to_jsonl());
    }
}

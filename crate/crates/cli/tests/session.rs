use std::sync::{Arc, OnceLock};

use rallyforge::protocol::{ClientMessage, ErrorCode, ServerMessage};
use rallyforge::session::SessionHub;
use rallyforge_core::behavior::ModelConfig;
use rallyforge_core::clipdb::{generate_synthetic_db, ArchetypeSpec, GeneratorSettings};
use rallyforge_core::court::Side;
use rallyforge_core::rally::{ControlOverride, Engine, EngineParams, Phase, RallyEvent};
use rallyforge_core::Vec2;

fn hub() -> SessionHub {
    static ENGINE: OnceLock<Arc<Engine>> = OnceLock::new();
    let engine = ENGINE.get_or_init(|| {
        let arch = [ArchetypeSpec::named("a"), ArchetypeSpec::named("b")];
        let db = generate_synthetic_db(&arch, 40, 5, &GeneratorSettings::standard()).unwrap();
        Arc::new(Engine::fit(db, &ModelConfig::default(), EngineParams::default()).unwrap())
    });
    SessionHub::new(engine.clone())
}

fn create(h: &SessionHub, seed: u64, human: Option<Side>) -> (u64, Vec<ServerMessage>) {
    let out = h.handle(ClientMessage::CreateSession {
        players: ["a".into(), "b".into()],
        seed,
        point: 0,
        human,
    });
    (out[0].session().unwrap(), out)
}

fn step_to_end(h: &SessionHub, id: u64) -> Vec<String> {
    let mut stream = Vec::new();
    for _ in 0..200 {
        let out = h.handle(ClientMessage::Step { session: id });
        let done = out
            .iter()
            .any(|m| matches!(m, ServerMessage::RallyEnded { .. }));
        for m in &out {
            // Session ids differ between sessions; compare the rest.
            let mut v = serde_json::to_value(m).unwrap();
            v.as_object_mut().unwrap().remove("session");
            stream.push(v.to_string());
        }
        if done {
            break;
        }
    }
    stream
}

#[test]
fn new_session_is_serving() {
    let h = hub();
    let (_, out) = create(&h, 1, None);
    match &out[0] {
        ServerMessage::StateSnapshot { snapshot, seq, .. } => {
            assert_eq!(snapshot.phase, Phase::Serving);
            assert_eq!(*seq, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn queued_override_reaches_the_logged_decision() {
    let h = hub();
    // The returner b stands on the far half.
    let (id, _) = create(&h, 2, Some(Side::Far));
    let target = Vec2::new(1.5, 7.0);
    let control = ControlOverride {
        player: "b".into(),
        placement: Some(target),
        recovery: None,
        shot_type: None,
    };
    let ack = h.handle(ClientMessage::ControlInput {
        session: id,
        control: control.clone(),
    });
    assert!(matches!(
        &ack[..],
        [ServerMessage::ControlInput { accepted: true, .. }]
    ));
    let out = h.handle(ClientMessage::Step { session: id });
    let ServerMessage::StepAck { events, .. } = &out[0] else {
        panic!("{out:?}")
    };
    let cycle = events.iter().find_map(|e| match e {
        RallyEvent::ShotCycle(r) => Some(r),
        _ => None,
    });
    let cycle = cycle.unwrap();
    assert_eq!(cycle.control.as_ref(), Some(&control));
    if let Some(d) = cycle.decision {
        assert_eq!(d.placement, target);
    }
}

#[test]
fn control_for_the_model_player_is_rejected() {
    let h = hub();
    let (id, _) = create(&h, 3, Some(Side::Near));
    let control = ControlOverride {
        player: "b".into(),
        placement: None,
        recovery: Some(Vec2::new(0.0, -12.0)),
        shot_type: None,
    };
    let out = h.handle(ClientMessage::ControlInput {
        session: id,
        control,
    });
    assert!(matches!(
        &out[..],
        [ServerMessage::Error {
            code: ErrorCode::InvalidControl,
            ..
        }]
    ));
}

#[test]
fn unknown_session_is_reported() {
    let h = hub();
    for msg in [
        ClientMessage::Step { session: 99 },
        ClientMessage::GetSnapshot { session: 99 },
        ClientMessage::CloseSession { session: 99 },
    ] {
        let out = h.handle(msg);
        assert!(matches!(
            &out[..],
            [ServerMessage::Error {
                code: ErrorCode::SessionNotFound,
                session: Some(99),
                ..
            }]
        ));
    }
}

#[test]
fn identical_sessions_stream_identically() {
    let h = hub();
    let (a, _) = create(&h, 17, None);
    let (b, _) = create(&h, 17, None);
    assert_ne!(a, b);
    let sa = step_to_end(&h, a);
    let sb = step_to_end(&h, b);
    assert_eq!(sa, sb);
    assert!(!sa.is_empty());
}

#[test]
fn interleaved_sessions_do_not_interact() {
    let h = hub();
    let (solo, _) = create(&h, 23, None);
    let alone = step_to_end(&h, solo);

    let (x, _) = create(&h, 23, None);
    let (y, _) = create(&h, 99, None);
    let mut sx = Vec::new();
    for _ in 0..200 {
        let mut ended = true;
        for (id, keep) in [(x, true), (y, false)] {
            let out = h.handle(ClientMessage::Step { session: id });
            if out
                .iter()
                .any(|m| matches!(m, ServerMessage::StepAck { .. }))
            {
                ended = false;
            }
            if keep {
                for m in &out {
                    if matches!(m, ServerMessage::Error { .. }) {
                        continue;
                    }
                    let mut v = serde_json::to_value(m).unwrap();
                    v.as_object_mut().unwrap().remove("session");
                    sx.push(v.to_string());
                }
            }
        }
        if ended {
            break;
        }
    }
    assert_eq!(alone, sx);
}

#[test]
fn snapshots_are_ordered() {
    let h = hub();
    let (id, _) = create(&h, 31, None);
    let mut last = (0u32, f64::NEG_INFINITY);
    let mut seqs = Vec::new();
    for _ in 0..200 {
        let out = h.handle(ClientMessage::Step { session: id });
        for m in &out {
            match m {
                ServerMessage::StateSnapshot { snapshot, seq, .. } => {
                    let key = (snapshot.shot_index, snapshot.clock);
                    assert!(key.0 > last.0 || (key.0 == last.0 && key.1 >= last.1));
                    last = key;
                    seqs.push(*seq);
                }
                ServerMessage::StepAck { seq, .. } | ServerMessage::RallyEnded { seq, .. } => {
                    seqs.push(*seq)
                }
                _ => {}
            }
        }
        if out.iter().any(|m| {
            matches!(
                m,
                ServerMessage::Error { .. } | ServerMessage::RallyEnded { .. }
            )
        }) {
            break;
        }
    }
    assert!(seqs.windows(2).all(|w| w[1] == w[0] + 1));
    let out = h.handle(ClientMessage::Step { session: id });
    assert!(matches!(
        &out[..],
        [ServerMessage::Error {
            code: ErrorCode::RallyEnded,
            ..
        }]
    ));
    let out = h.handle(ClientMessage::CloseSession { session: id });
    assert!(matches!(&out[..], [ServerMessage::SessionClosed { .. }]));
    assert!(h.is_empty());
}

//! Interactive rally sessions, independent of any transport.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rallyforge_core::court::Side;
use rallyforge_core::rally::{ControlOverride, Engine, RallyEvent, RallyState};
use rallyforge_core::Error;

use crate::protocol::{ClientMessage, ErrorCode, ServerMessage};

struct Session {
    state: RallyState,
    human: Option<Side>,
    seq: u64,
}

impl Session {
    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }
}

/// All live sessions over one shared engine. Each session is stepped under
/// its own lock, so sessions never wait on each other's steps.
pub struct SessionHub {
    engine: Arc<Engine>,
    sessions: Mutex<BTreeMap<u64, Arc<Mutex<Session>>>>,
    next_id: Mutex<u64>,
}

fn error(session: Option<u64>, code: ErrorCode, message: impl Into<String>) -> ServerMessage {
    ServerMessage::Error {
        session,
        code,
        message: message.into(),
    }
}

impl SessionHub {
    pub fn new(engine: Arc<Engine>) -> Self {
        Self {
            engine,
            sessions: Mutex::new(BTreeMap::new()),
            next_id: Mutex::new(0),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("hub lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn session(&self, id: u64) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().expect("hub lock").get(&id).cloned()
    }

    /// Handle one request and return the replies in order.
    pub fn handle(&self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::CreateSession {
                players,
                seed,
                point,
                human,
            } => self.create(players, seed, point, human),
            ClientMessage::ControlInput { session, control } => self.control(session, control),
            ClientMessage::Step { session } => self.step(session),
            ClientMessage::GetSnapshot { session } => self.with(session, |s, e| {
                let seq = s.next_seq();
                vec![ServerMessage::StateSnapshot {
                    session,
                    seq,
                    snapshot: e.snapshot(&s.state),
                }]
            }),
            ClientMessage::CloseSession { session } => {
                match self.sessions.lock().expect("hub lock").remove(&session) {
                    Some(_) => vec![ServerMessage::SessionClosed { session }],
                    None => vec![error(
                        Some(session),
                        ErrorCode::SessionNotFound,
                        format!("no session {session}"),
                    )],
                }
            }
        }
    }

    fn with(
        &self,
        id: u64,
        f: impl FnOnce(&mut Session, &Engine) -> Vec<ServerMessage>,
    ) -> Vec<ServerMessage> {
        match self.session(id) {
            Some(s) => {
                let mut guard = s.lock().expect("session lock");
                f(&mut guard, &self.engine)
            }
            None => vec![error(
                Some(id),
                ErrorCode::SessionNotFound,
                format!("no session {id}"),
            )],
        }
    }

    fn create(
        &self,
        players: [String; 2],
        seed: u64,
        point: u64,
        human: Option<Side>,
    ) -> Vec<ServerMessage> {
        let state = match self
            .engine
            .start_point(&players[0], &players[1], seed, point)
        {
            Ok(s) => s,
            Err(e) => return vec![error(None, engine_code(&e), e.to_string())],
        };
        let id = {
            let mut n = self.next_id.lock().expect("id lock");
            *n += 1;
            *n
        };
        let mut session = Session {
            state,
            human,
            seq: 0,
        };
        let seq = session.next_seq();
        let snapshot = self.engine.snapshot(&session.state);
        let mut out = vec![ServerMessage::StateSnapshot {
            session: id,
            seq,
            snapshot,
        }];
        if session.state.is_ended() {
            out.push(ended(id, &mut session));
        }
        self.sessions
            .lock()
            .expect("hub lock")
            .insert(id, Arc::new(Mutex::new(session)));
        out
    }

    fn control(&self, id: u64, control: ControlOverride) -> Vec<ServerMessage> {
        self.with(id, |s, _| {
            let Some(slot) = s.state.slot_of(&control.player) else {
                return vec![error(
                    Some(id),
                    ErrorCode::InvalidControl,
                    format!("unknown player `{}`", control.player),
                )];
            };
            if s.human != Some(s.state.players[slot].side) {
                return vec![error(
                    Some(id),
                    ErrorCode::InvalidControl,
                    format!(
                        "player `{}` is controlled by the behavior model",
                        control.player
                    ),
                )];
            }
            if s.state.is_ended() {
                return vec![error(Some(id), ErrorCode::RallyEnded, "the point is over")];
            }
            s.state
                .queue_override(control.clone())
                .expect("player checked above");
            let seq = s.next_seq();
            vec![ServerMessage::ControlInput {
                session: id,
                seq,
                control,
                accepted: true,
            }]
        })
    }

    fn step(&self, id: u64) -> Vec<ServerMessage> {
        self.with(id, |s, engine| {
            let before = s.state.log.events.len();
            if let Err(e) = engine.step(&mut s.state) {
                let code = if matches!(e, Error::RallyEnded) {
                    ErrorCode::RallyEnded
                } else {
                    engine_code(&e)
                };
                return vec![error(Some(id), code, e.to_string())];
            }
            let events: Vec<RallyEvent> = s.state.log.events[before..].to_vec();
            let seq = s.next_seq();
            let mut out = vec![ServerMessage::StepAck {
                session: id,
                seq,
                shot_index: s.state.shot_index,
                events,
            }];
            let seq = s.next_seq();
            out.push(ServerMessage::StateSnapshot {
                session: id,
                seq,
                snapshot: engine.snapshot(&s.state),
            });
            if s.state.is_ended() {
                out.push(ended(id, s));
            }
            out
        })
    }
}

fn ended(id: u64, s: &mut Session) -> ServerMessage {
    let seq = s.next_seq();
    ServerMessage::RallyEnded {
        session: id,
        seq,
        result: s.state.result.clone().expect("ended states carry a result"),
        responses: s.state.shot_index,
    }
}

fn engine_code(e: &Error) -> ErrorCode {
    if e.is_data_error() {
        ErrorCode::BadRequest
    } else {
        ErrorCode::Engine
    }
}

//! Session messages. Each message is one JSON object tagged by `kind`, sent
//! as one WebSocket text frame.

use rallyforge_core::court::Side;
use rallyforge_core::rally::{ControlOverride, PointResult, RallyEvent, Snapshot};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClientMessage {
    /// `players[0]` serves from the near half.
    CreateSession {
        players: [String; 2],
        seed: u64,
        #[serde(default)]
        point: u64,
        /// Side whose player takes control inputs; the other is driven by
        /// its behavior model.
        #[serde(default)]
        human: Option<Side>,
    },
    ControlInput {
        session: u64,
        control: ControlOverride,
    },
    Step {
        session: u64,
    },
    GetSnapshot {
        session: u64,
    },
    CloseSession {
        session: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    SessionNotFound,
    InvalidControl,
    RallyEnded,
    BadRequest,
    Engine,
}

/// Replies. `seq` increases by one with every numbered message of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServerMessage {
    StateSnapshot {
        session: u64,
        seq: u64,
        snapshot: Snapshot,
    },
    /// Acknowledges a queued control input.
    ControlInput {
        session: u64,
        seq: u64,
        control: ControlOverride,
        accepted: bool,
    },
    StepAck {
        session: u64,
        seq: u64,
        shot_index: u32,
        events: Vec<RallyEvent>,
    },
    RallyEnded {
        session: u64,
        seq: u64,
        result: PointResult,
        responses: u32,
    },
    SessionClosed {
        session: u64,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session: Option<u64>,
        code: ErrorCode,
        message: String,
    },
}

impl ServerMessage {
    pub fn session(&self) -> Option<u64> {
        match self {
            ServerMessage::StateSnapshot { session, .. }
            | ServerMessage::ControlInput { session, .. }
            | ServerMessage::StepAck { session, .. }
            | ServerMessage::RallyEnded { session, .. }
            | ServerMessage::SessionClosed { session } => Some(*session),
            ServerMessage::Error { session, .. } => *session,
        }
    }
}

//! Line-delimited clip files: one header object, then one clip per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClipDatabase, PlayerInfo, ShotCycleClip};
use crate::court::CourtSpec;
use crate::physics::FlightParams;
use crate::Error;

pub const FORMAT_NAME: &str = "rallyforge-clips";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    court: CourtSpec,
    flight: FlightParams,
    players: Vec<PlayerInfo>,
}

pub fn write_db<W: Write>(db: &ClipDatabase, mut out: W) -> Result<(), Error> {
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        court: db.court,
        flight: db.flight,
        players: db.players().to_vec(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for clip in db.source_clips() {
        serde_json::to_writer(&mut out, &clip)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_db(db: &ClipDatabase, path: impl AsRef<Path>) -> Result<(), Error> {
    write_db(db, BufWriter::new(File::create(path)?))
}

/// Parse a clip file. Blank lines are skipped. Parse failures stop at the
/// first malformed line; validation failures are collected over all clips.
pub fn read_db<R: BufRead>(input: R) -> Result<ClipDatabase, Error> {
    let mut header: Option<Header> = None;
    let mut clips: Vec<ShotCycleClip> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: Header = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad header: {e}"),
            })?;
            if h.format != FORMAT_NAME {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unknown format `{}`", h.format),
                });
            }
            if h.version != FORMAT_VERSION {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unsupported version {}", h.version),
                });
            }
            header = Some(h);
            continue;
        }
        let clip: ShotCycleClip = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        clips.push(clip);
    }
    let h = header.ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    ClipDatabase::new(h.court, h.flight, h.players, clips)
}

pub fn load_db(path: impl AsRef<Path>) -> Result<ClipDatabase, Error> {
    read_db(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clipdb::tests::{still_clip, two_players};

    fn sample_db() -> ClipDatabase {
        let mut far = still_clip(2, 1.3).half_turn();
        far.player_id = "b".into();
        far.opponent_id = "a".into();
        ClipDatabase::new(
            CourtSpec::default(),
            FlightParams::default(),
            two_players(),
            vec![still_clip(1, 2.0), far],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let db = sample_db();
        let mut buf = Vec::new();
        write_db(&db, &mut buf).unwrap();
        let back = read_db(buf.as_slice()).unwrap();
        assert_eq!(back, db);
    }

    #[test]
    fn header_only_is_empty() {
        let db = ClipDatabase::new(
            CourtSpec::default(),
            FlightParams::default(),
            two_players(),
            vec![],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_db(&db, &mut buf).unwrap();
        assert!(read_db(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let db = sample_db();
        let mut buf = Vec::new();
        write_db(&db, &mut buf).unwrap();
        buf.extend_from_slice(b"{not json}\n");
        match read_db(buf.as_slice()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let text = format!(
            "{{\"format\":\"{FORMAT_NAME}\",\"version\":1,\"court\":{},\"flight\":{},\"players\":[],\"extra\":1}}\n",
            serde_json::to_string(&CourtSpec::<f64>::default()).unwrap(),
            serde_json::to_string(&FlightParams::<f64>::default()).unwrap()
        );
        assert!(matches!(
            read_db(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_header_is_a_parse_error() {
        assert!(matches!(read_db("".as_bytes()), Err(Error::Parse { .. })));
    }
}

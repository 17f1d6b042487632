use std::path::Path;
use std::process::{Command, Output};

use rallyforge_core::court::{CourtSpec, ShotDirection};
use rallyforge_core::rally::RallyLog;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rallyforge"));
    c.env_remove("RALLYFORGE_CONFIG");
    c
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn gen(dir: &Path) -> std::path::PathBuf {
    let db = dir.join("db.jsonl");
    ok(bin()
        .args([
            "gen-data",
            "--players",
            "a,b",
            "--points",
            "30",
            "--seed",
            "2",
            "--out",
        ])
        .arg(&db)
        .output()
        .unwrap());
    db
}

fn metric(tsv: &str, name: &str) -> Option<String> {
    tsv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}\t")).map(str::to_string))
}

#[test]
fn simulate_is_repeatable_and_summaries_recount() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen(dir.path());
    let run = |out: &str| {
        let out = dir.path().join(out);
        ok(bin()
            .args(["simulate", "--points", "12", "--seed", "5", "--db"])
            .arg(&db)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap());
        out
    };
    let (a, b) = (run("a"), run("b"));
    let la = std::fs::read(a.join("logs.jsonl")).unwrap();
    assert_eq!(la, std::fs::read(b.join("logs.jsonl")).unwrap());
    assert_eq!(
        std::fs::read(a.join("heatmaps.tsv")).unwrap(),
        std::fs::read(b.join("heatmaps.tsv")).unwrap()
    );

    // Recount the cross-court fraction straight from the raw records.
    let logs = RallyLog::read_jsonl(&la[..]).unwrap();
    assert_eq!(logs.len(), 12);
    let court = CourtSpec::default();
    let (mut cc, mut dtl) = (0u64, 0u64);
    for l in &logs {
        for r in l.shot_cycles() {
            let (Some(d), Some(p)) = (r.decision, r.hitter_position) else {
                continue;
            };
            if !d.shot_type.is_groundstroke() {
                continue;
            }
            let hitter = rallyforge_core::court::region_of(p, &court);
            match rallyforge_core::court::shot_direction(hitter, d.placement, &court) {
                ShotDirection::CrossCourt => cc += 1,
                ShotDirection::DownTheLine => dtl += 1,
                _ => {}
            }
        }
    }
    let summary = std::fs::read_to_string(a.join("summary.tsv")).unwrap();
    assert_eq!(metric(&summary, "cross_court").unwrap(), cc.to_string());
    assert_eq!(metric(&summary, "down_the_line").unwrap(), dtl.to_string());
    let frac: f64 = metric(&summary, "cross_court_fraction")
        .unwrap()
        .parse()
        .unwrap();
    assert!((frac - cc as f64 / (cc + dtl) as f64).abs() < 1e-4);

    // Every decision lands in exactly one cell of each grid.
    let decisions = logs
        .iter()
        .flat_map(|l| l.shot_cycles())
        .filter(|r| r.decision.is_some())
        .count() as u64;
    let grids = std::fs::read_to_string(a.join("heatmaps.tsv")).unwrap();
    let mut sum = 0u64;
    let mut header_total = 0u64;
    let mut in_placement = false;
    for line in grids.lines() {
        if let Some(h) = line.strip_prefix("# ") {
            in_placement = h.contains("kind=placement");
            if in_placement {
                header_total += h
                    .split(' ')
                    .find_map(|kv| kv.strip_prefix("total="))
                    .unwrap()
                    .parse::<u64>()
                    .unwrap();
            }
        } else if in_placement {
            sum += line
                .split('\t')
                .map(|c| c.parse::<u64>().unwrap())
                .sum::<u64>();
        }
    }
    assert_eq!(sum, decisions);
    assert_eq!(header_total, decisions);

    let stats = ok(bin()
        .arg("stats")
        .arg("--logs")
        .arg(a.join("logs.jsonl"))
        .output()
        .unwrap());
    assert_eq!(metric(&stats, "cross_court").unwrap(), cc.to_string());
}

#[test]
fn models_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen(dir.path());
    let model = dir.path().join("m.json");
    ok(bin()
        .arg("build-model")
        .arg("--db")
        .arg(&db)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap());
    let text = ok(bin()
        .arg("inspect-model")
        .arg("--model")
        .arg(&model)
        .output()
        .unwrap());
    assert!(text.lines().any(|l| l.starts_with("a\t")));
    assert!(text.lines().any(|l| l.starts_with("b\t")));
    let out = dir.path().join("sim");
    let fitted = dir.path().join("fitted");
    ok(bin()
        .args(["simulate", "--points", "3", "--db"])
        .arg(&db)
        .arg("--model")
        .arg(&model)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    ok(bin()
        .args(["simulate", "--points", "3", "--db"])
        .arg(&db)
        .arg("--out")
        .arg(&fitted)
        .output()
        .unwrap());
    assert_eq!(
        std::fs::read(out.join("logs.jsonl")).unwrap(),
        std::fs::read(fitted.join("logs.jsonl")).unwrap()
    );
}

#[test]
fn fit_trajectory_reports_every_linked_clip() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen(dir.path());
    let report = ok(bin()
        .args(["fit-trajectory", "--points", "4", "--db"])
        .arg(&db)
        .output()
        .unwrap());
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split('\t').nth(1) == Some("ok")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen(dir.path());
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[weights]\nposes = 1.0\n").unwrap();

    let o = bin()
        .arg("--config")
        .arg(&bad)
        .arg("stats")
        .arg("--db")
        .arg(&db)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("RALLYFORGE_CONFIG", &bad)
        .arg("stats")
        .arg("--db")
        .arg(&db)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .args(["stats", "--db", "/nonexistent/db.jsonl"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let corrupt = dir.path().join("corrupt.jsonl");
    std::fs::write(&corrupt, "{not json\n").unwrap();
    let o = bin()
        .arg("stats")
        .arg("--db")
        .arg(&corrupt)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin()
        .args(["simulate", "--players", "a,zz", "--points", "1", "--db"])
        .arg(&db)
        .arg("--out")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin().args(["simulate", "--bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen(dir.path());
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, "[rally]\nmax_shots = 1\n").unwrap();
    let out = dir.path().join("s");
    ok(bin()
        .arg("--config")
        .arg(&cfg)
        .args(["simulate", "--points", "6", "--db"])
        .arg(&db)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let logs = RallyLog::read_jsonl(
        std::fs::File::open(out.join("logs.jsonl"))
            .map(std::io::BufReader::new)
            .unwrap(),
    )
    .unwrap();
    assert!(logs.iter().all(|l| l.shot_cycles().count() <= 1));
}

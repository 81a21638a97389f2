use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dra_synth::scenario::{
    load_manifest, load_scenario, reevaluate_beam, run, ResultsTable, RowStatus, RunOptions, ScenarioFile,
    MANIFEST_FILE, RESULTS_FILE,
};
use dra_synth::Error;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

const TINY: &str = r#"{
  "format_version": 1,
  "ga": {"population_size": 12, "max_generations": 6, "rng_seed": 11},
  "beams": [
    {"id": "es", "latitude_deg": 39.3, "longitude_deg": -5.3, "beamwidth_deg": 1.4, "sll_min_db": 14, "eirp_dbw": 49.93},
    {"id": "cz", "latitude_deg": 49, "longitude_deg": 17.4, "beamwidth_deg": 1.4, "sll_min_db": 14, "eirp_dbw": 49.93},
    {"id": "fr", "latitude_deg": 46, "longitude_deg": 2.5, "beamwidth_az_deg": 1.0, "beamwidth_el_deg": 1.2, "sll_min_db": 12, "eirp_dbw": 55}
  ]
}"#;

fn tiny() -> ScenarioFile {
    ScenarioFile::from_json(TINY, "tiny").unwrap()
}

#[test]
fn shipped_table_one() {
    let s = load_scenario(data("reference_beams.json")).unwrap();
    assert_eq!(s.beams.len(), 8);
    assert_eq!((s.array.subarray_count_x, s.array.subarray_count_y), (36, 36));
    let expect = [
        (39.3, -5.3, 0.9, 61.94),
        (49.0, 17.4, 0.9, 61.94),
        (39.3, -5.3, 1.4, 61.94),
        (49.0, 17.4, 1.4, 61.94),
        (39.3, -5.3, 0.9, 49.93),
        (49.0, 17.4, 0.9, 49.93),
        (39.3, -5.3, 1.4, 49.93),
        (49.0, 17.4, 1.4, 49.93),
    ];
    for (b, (lat, lon, bw, eirp)) in s.beams.iter().zip(expect) {
        assert_eq!(b.spec.target.latitude_deg, lat);
        assert_eq!(b.spec.target.longitude_deg, lon);
        assert_eq!(b.spec.beamwidth_az_deg, bw);
        assert_eq!(b.spec.beamwidth_el_deg, bw);
        assert_eq!(b.spec.sll_min_db, 14.0);
        assert_eq!(b.spec.eirp_dbw, eirp);
    }
    let desk = load_scenario(data("reference_beams_desk.json")).unwrap();
    assert_eq!(desk.beams, s.beams);
    assert_eq!((desk.ga.population_size, desk.ga.max_generations), (60, 150));
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_scenario("/nonexistent/scenario.json"), Err(Error::Io { .. })));
}

#[test]
fn run_writes_reproducible_outputs() {
    let s = tiny();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let table = run(&s, a.path(), &RunOptions::default()).unwrap();
    assert_eq!(table.rows.len(), 3);
    run(&s, b.path(), &RunOptions::default()).unwrap();

    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(!name.ends_with(".tmp"), "leftover temp file {name}");
        if name == "timing.csv" {
            continue;
        }
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name} differs between identical runs");
    }
    assert_eq!(ResultsTable::load(a.path()).unwrap(), table);

    for row in &table.rows {
        assert_eq!(row.status, RowStatus::Ok);
        let stored = row.metrics.unwrap();
        let (m, c) = reevaluate_beam(a.path(), &row.scenario).unwrap();
        assert!((m.beamwidth_az_deg - stored.bw_az_deg).abs() <= 1e-6);
        assert!((m.beamwidth_el_deg - stored.bw_el_deg).abs() <= 1e-6);
        assert!((m.min_sll_db() - stored.sll_db).abs() <= 1e-6);
        assert!((m.eirp_dbw - stored.eirp_dbw).abs() <= 1e-6);
        assert!((c - stored.cost).abs() <= 1e-6);
        assert_eq!(m.active_chains, stored.active_chains);
    }
}

#[test]
fn beams_are_independent_of_selection() {
    let s = tiny();
    let all = tempfile::tempdir().unwrap();
    let one = tempfile::tempdir().unwrap();
    let full = run(&s, all.path(), &RunOptions::default()).unwrap();
    let part = run(
        &s,
        one.path(),
        &RunOptions {
            beams: Some(vec![3, 2]),
            ..RunOptions::default()
        },
    )
    .unwrap();
    assert_eq!(part.rows.len(), 2);
    assert_eq!(part.rows[0], full.rows[1]);
    assert_eq!(part.rows[1], full.rows[2]);
    for f in ["beam_cz_mask.csv", "beam_fr_cut_el.csv", "beam_fr_grid.csv"] {
        assert_eq!(fs::read(all.path().join(f)).unwrap(), fs::read(one.path().join(f)).unwrap(), "{f}");
    }
    let bad = RunOptions {
        beams: Some(vec![4]),
        ..RunOptions::default()
    };
    assert!(matches!(run(&s, one.path(), &bad), Err(Error::Config(_))));
}

#[test]
fn seed_override_changes_masks() {
    let s = tiny();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let opts = |seed| RunOptions {
        seed: Some(seed),
        beams: Some(vec![1]),
        ..RunOptions::default()
    };
    run(&s, a.path(), &opts(1)).unwrap();
    run(&s, b.path(), &opts(2)).unwrap();
    assert_ne!(
        fs::read(a.path().join("beam_es_mask.csv")).unwrap(),
        fs::read(b.path().join("beam_es_mask.csv")).unwrap()
    );
}

#[test]
fn fine_report_halves_cut_step() {
    let s = tiny();
    let d = tempfile::tempdir().unwrap();
    run(
        &s,
        d.path(),
        &RunOptions {
            beams: Some(vec![1]),
            fine_report: true,
            ..RunOptions::default()
        },
    )
    .unwrap();
    let m = load_manifest(d.path()).unwrap();
    assert_eq!(m.report_step_deg, 0.005);
    let cut = fs::read_to_string(d.path().join("beam_es_cut_az.csv")).unwrap();
    assert!(cut.lines().count() > 3000);
}

#[test]
fn unknown_output_version_rejected() {
    let s = tiny();
    let d = tempfile::tempdir().unwrap();
    run(&s, d.path(), &RunOptions { beams: Some(vec![1]), ..RunOptions::default() }).unwrap();
    let path = d.path().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
    fs::write(&path, text).unwrap();
    assert!(matches!(load_manifest(d.path()), Err(Error::FormatVersion { found: 9, .. })));
    assert!(ResultsTable::load(d.path()).is_err());
}

#[test]
fn failing_beam_is_recorded_and_run_continues() {
    let s = tiny();
    let d = tempfile::tempdir().unwrap();
    // a directory squatting on the mask path makes that beam's export fail
    fs::create_dir_all(d.path().join("beam_cz_mask.csv/x")).unwrap();
    let t = run(&s, d.path(), &RunOptions::default()).unwrap();
    assert!(matches!(&t.rows[1].status, RowStatus::Error(msg) if msg.contains("beam_cz_mask.csv")), "{:?}", t.rows[1]);
    assert!(t.rows[1].metrics.is_none());
    assert_eq!(t.rows[0].status, RowStatus::Ok);
    assert_eq!(t.rows[2].status, RowStatus::Ok);
    let csv = fs::read_to_string(d.path().join(RESULTS_FILE)).unwrap();
    assert!(csv.lines().nth(2).unwrap().contains(",error: "));
    let manifest = load_manifest(d.path()).unwrap();
    assert!(manifest.beams[1].error.is_some() && manifest.beams[1].files.is_none());
    assert_eq!(ResultsTable::load(d.path()).unwrap(), t);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dra-synth"))
}

#[test]
fn cli_synthesize_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    fs::write(&scenario, TINY).unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["synthesize", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .args(["--beams", "1,3", "--seed", "5"])
        .env("DRA_SYNTH_THREADS", "2")
        .output()
        .unwrap();
    let table = ResultsTable::load(&out).unwrap();
    assert_eq!(table.rows.len(), 2);
    let met = table.rows.iter().zip([14.0, 12.0]).all(|(r, min)| r.metrics.unwrap().sll_db >= min);
    assert_eq!(status.status.code(), Some(if met { 0 } else { 1 }), "{status:?}");

    let report = cli().arg("report").arg(&out).args(["--format", "md"]).output().unwrap();
    assert!(report.status.success());
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.starts_with("| Scenario | lat,lon |"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn cli_rejects_bad_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("bad.json");
    fs::write(&scenario, r#"{"format_version": 1, "beams": [{"latitude_deg": 85, "longitude_deg": 13, "beamwidth_deg": 1, "sll_min_db": 14, "eirp_dbw": 50}]}"#).unwrap();
    let o = cli()
        .args(["synthesize", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not visible"));
}

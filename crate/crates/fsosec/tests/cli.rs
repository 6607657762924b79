use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fsosec::report::{Report, SlotTables, TablesFile};
use fsosec::waveform::{read_waveform, write_waveform};
use fsosec_core::fading::{wiretap_run, SimConfig, WaveformRecord};
use fsosec_core::metrics::{InputDist, TransitionTable};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fsosec"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    let out = bin().current_dir(dir).args(args).output().unwrap();
    if !out.status.success() {
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("campaign.toml");
    fs::write(&p, text).unwrap();
    p
}

fn read_report(dir: &Path) -> Report {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn csv_header(path: &Path) -> Vec<String> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.headers().unwrap().iter().map(String::from).collect()
}

const DEGRADED: &str = r#"
[sim]
duration_s = 0.02
rng_seed = 5
[sim.eve]
mean_gain = 0.4
scint_index = 0.1
noise_sigma = 0.3
"#;

#[test]
fn default_campaign_has_ten_million_samples_and_fifty_slots() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "[sim]\nrng_seed = 1\n");
    assert!(run(dir.path(), &["simulate", "--config", "campaign.toml"])
        .status
        .success());
    let bob = read_waveform(&dir.path().join("out/bob.fsow")).unwrap();
    assert_eq!(bob.samples.len(), 10_000_000);
    assert_eq!(bob.sample_rate_hz, 50e6);
    assert_eq!(
        fs::metadata(dir.path().join("out/eve.fsow")).unwrap().len(),
        34 + 3 + 4 * 10_000_000
    );

    let cfg = "[input]\nbob = \"out/bob.fsow\"\neve = \"out/eve.fsow\"\n[analysis]\nlpf_cutoff_hz = 6e6\n";
    write_config(dir.path(), cfg);
    assert!(run(dir.path(), &["analyze", "--config", "campaign.toml"])
        .status
        .success());
    let slots = dir.path().join("out/slots.csv");
    assert_eq!(
        csv_header(&slots),
        [
            "slot_index",
            "t_start_ms",
            "mi_bob",
            "mi_eve",
            "rs_i",
            "rs_i_bps",
            "mean_voltage_bob"
        ]
    );
    let rows = csv_rows(&slots);
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[49][1], "196");
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "[sim]\nduration_s = 0.008\nrng_seed = 42\n");
    for out in ["a", "b"] {
        let s = run(
            dir.path(),
            &["simulate", "--config", "campaign.toml", "--out", out],
        );
        assert!(s.status.success());
    }
    for f in ["bob.fsow", "eve.fsow", "truth.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
    run(
        dir.path(),
        &[
            "simulate",
            "--config",
            "campaign.toml",
            "--out",
            "c",
            "--seed",
            "43",
        ],
    );
    assert_ne!(
        fs::read(dir.path().join("a/bob.fsow")).unwrap(),
        fs::read(dir.path().join("c/bob.fsow")).unwrap()
    );
}

#[test]
fn simulated_files_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "[sim]\nduration_s = 0.004\nrng_seed = 8\n");
    assert!(run(dir.path(), &["simulate", "--config", "campaign.toml"])
        .status
        .success());
    let cfg = SimConfig {
        duration_s: 0.004,
        rng_seed: 8,
        ..SimConfig::default()
    };
    let (wb, we, truth) = wiretap_run(&cfg).unwrap();
    assert_eq!(read_waveform(&dir.path().join("out/bob.fsow")).unwrap(), wb);
    assert_eq!(read_waveform(&dir.path().join("out/eve.fsow")).unwrap(), we);
    let t: fsosec::report::TruthFile =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/truth.json")).unwrap())
            .unwrap();
    assert_eq!(t.bits(), truth.transmitted_bits);
    assert_eq!(t.frame_offset_symbols, truth.frame_offset_symbols());
    assert_eq!(t.slot_gains_bob, truth.slot_gains_bob);
}

#[test]
fn missing_sim_section_is_named() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "[analysis]\ncoherence_s = 0.004\n");
    let out = run(dir.path(), &["simulate", "--config", "campaign.toml"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`sim`"), "{err}");
}

#[test]
fn bad_config_fails_with_field_name() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "[sim]\nduration_s = 0.0041\n");
    let out = run(dir.path(), &["simulate", "--config", "campaign.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("duration_s"));

    let out = run(dir.path(), &["simulate", "--config", "missing.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.toml"));
}

#[test]
fn degraded_eve_gives_positive_rates_and_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), DEGRADED);
    let out = run(dir.path(), &["analyze", "--config", "campaign.toml"]);
    assert!(out.status.success());
    let out_dir = dir.path().join("out");
    let report = read_report(&out_dir);
    assert_eq!(report.meta.n_slots, 5);
    assert_eq!(report.meta.n_valid_slots, 5);
    assert!(report.rs_ergodic.unwrap() > 0.0);
    assert!(report.slots.iter().all(|s| s.rs_i.unwrap() > 0.0));
    assert!(report.atmos.bob.is_some());

    let schema: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");

    let json: serde_json::Value = doc;
    let keys: Vec<&str> = json
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    for k in [
        "meta",
        "slots",
        "rs_long_span",
        "rs_ergodic",
        "outage",
        "atmos",
    ] {
        assert!(keys.contains(&k));
    }

    let outage = csv_rows(&out_dir.join("outage.csv"));
    let p: Vec<f64> = outage.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(p.windows(2).all(|w| w[0] <= w[1]));
    assert!(out_dir.join("binsweep.csv").exists());
}

#[test]
fn workers_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), DEGRADED);
    for (w, out) in [("1", "one"), ("4", "four")] {
        let s = run(
            dir.path(),
            &[
                "--workers",
                w,
                "analyze",
                "--config",
                "campaign.toml",
                "--out",
                out,
            ],
        );
        assert!(s.status.success());
    }
    for f in [
        "report.json",
        "slots.csv",
        "outage.csv",
        "binsweep.csv",
        "tables.json",
    ] {
        assert_eq!(
            fs::read(dir.path().join("one").join(f)).unwrap(),
            fs::read(dir.path().join("four").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn identical_inputs_give_zero_secrecy() {
    let dir = tempfile::tempdir().unwrap();
    let noisy = "[sim.bob]\nmean_gain = 1.0\nscint_index = 0.1\nnoise_sigma = 0.4\n";
    for (name, extra) in [("clean", ""), ("noisy", noisy)] {
        write_config(
            dir.path(),
            &format!("[sim]\nduration_s = 0.02\nrng_seed = 2\n{extra}"),
        );
        let out = run(
            dir.path(),
            &["simulate", "--config", "campaign.toml", "--out", name],
        );
        assert!(out.status.success());
        let bob = format!("{name}/bob.fsow");
        write_config(
            dir.path(),
            &format!("[input]\nbob = \"{bob}\"\neve = \"{bob}\"\n"),
        );
        let report_dir = format!("{name}/report");
        let out = run(
            dir.path(),
            &["analyze", "--config", "campaign.toml", "--out", &report_dir],
        );
        assert!(out.status.success());
        let report = read_report(&dir.path().join(&report_dir));
        assert_eq!(report.slots.len(), 5);
        for s in &report.slots {
            assert_eq!(s.rs_i, Some(0.0), "{name} slot {}", s.slot_index);
        }
        assert_eq!(report.rs_ergodic, Some(0.0));
    }
}

#[test]
fn overrides_reach_the_analysis() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), DEGRADED);
    let out = run(
        dir.path(),
        &[
            "analyze",
            "--config",
            "campaign.toml",
            "--coherence-ms",
            "2",
            "--delta-mv",
            "50",
            "--rth-grid",
            "0,1e6,5e6",
        ],
    );
    assert!(out.status.success());
    let report = read_report(&dir.path().join("out"));
    assert_eq!(report.meta.n_slots, 10);
    assert_eq!(report.meta.delta_eve_v, 0.05);
    assert_eq!(report.meta.delta_eve_source, "fixed");
    assert_eq!(report.outage.len(), 3);
    assert_eq!(report.outage[0].probability, 0.0);
}

#[test]
fn sync_failure_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let (wb, _, _) = wiretap_run(&SimConfig {
        duration_s: 0.008,
        ..SimConfig::default()
    })
    .unwrap();
    write_waveform(&dir.path().join("bob.fsow"), &wb).unwrap();
    // Pseudo-random noise with no training sequence in it.
    let mut state = 0x9e37_79b9_u32;
    let noise: Vec<f32> = (0..wb.samples.len())
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            (state as f32 / u32::MAX as f32) - 0.5
        })
        .collect();
    let junk = WaveformRecord::new(noise, 50e6, Some(0.0), "junk").unwrap();
    write_waveform(&dir.path().join("junk.fsow"), &junk).unwrap();
    write_config(
        dir.path(),
        "[input]\nbob = \"bob.fsow\"\neve = \"junk.fsow\"\n",
    );
    let out = run(dir.path(), &["analyze", "--config", "campaign.toml"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("junk.fsow") && err.contains("sync"), "{err}");
}

#[test]
fn frame_csv_input_reproduces_the_waveform_analysis() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        &format!("{DEGRADED}\n[analysis]\nwrite_frames = true\n[analysis.delta_eve]\nmode = \"fixed\"\nvalue_v = 0.05\n"),
    );
    assert!(run(dir.path(), &["analyze", "--config", "campaign.toml"])
        .status
        .success());
    let from_waveforms = read_report(&dir.path().join("out"));
    write_config(
        dir.path(),
        "[input]\nbob = \"out/bob_frame.csv\"\neve = \"out/eve_frame.csv\"\n[analysis.delta_eve]\nmode = \"fixed\"\nvalue_v = 0.05\n",
    );
    assert!(run(
        dir.path(),
        &["analyze", "--config", "campaign.toml", "--out", "csv"]
    )
    .status
    .success());
    let from_frames = read_report(&dir.path().join("csv"));
    assert!(from_frames.meta.sync_bob.is_none());
    for (a, b) in from_waveforms.slots.iter().zip(&from_frames.slots) {
        assert!((a.rs_i.unwrap() - b.rs_i.unwrap()).abs() < 1e-6);
    }
}

#[test]
fn slots_missing_a_symbol_class_are_marked_invalid() {
    let dir = tempfile::tempdir().unwrap();
    // 3 slots of 4 symbols; slot 1 never sends a one.
    let xs = [0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0];
    let mut text = String::from("symbol_index,slot_index,x,v\n");
    for (j, x) in xs.iter().enumerate() {
        text += &format!("{j},{},{x},{}\n", j / 4, *x as f64 + 0.01 * j as f64);
    }
    fs::write(dir.path().join("f.csv"), &text).unwrap();
    write_config(
        dir.path(),
        "[input]\nbob = \"f.csv\"\neve = \"f.csv\"\n[analysis]\nrep_rate_hz = 1000.0\ncoherence_s = 0.004\n[analysis.delta_eve]\nmode = \"fixed\"\nvalue_v = 0.1\n",
    );
    let out = run(dir.path(), &["analyze", "--config", "campaign.toml"]);
    assert!(out.status.success());
    let report = read_report(&dir.path().join("out"));
    assert_eq!(report.meta.n_valid_slots, 2);
    assert!(!report.slots[1].valid && report.slots[1].rs_i.is_none());
    let rows = csv_rows(&dir.path().join("out/slots.csv"));
    assert_eq!(rows[1][2], "NaN");
    assert_eq!(rows[0][2], "1");
}

fn write_tables(dir: &Path, eve: TransitionTable, mi_bob: f64) {
    fs::create_dir_all(dir).unwrap();
    let t = TablesFile {
        px: InputDist::uniform(),
        rep_rate_hz: 10e6,
        delta_eve_v: 0.01,
        pooled: SlotTables { mi_bob, eve },
        slots: Vec::new(),
    };
    fs::write(dir.join("tables.json"), serde_json::to_string(&t).unwrap()).unwrap();
}

#[test]
fn finitelen_curves() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(
        &dir.path().join("out"),
        TransitionTable::bsc(0.5).unwrap(),
        1.0,
    );
    write_config(
        dir.path(),
        r#"
[sim]
[analysis.finite_length]
rep_grid_hz = [10000.0]
observation_s = 0.2
r_b_grid = [0.0, 0.5, 1.0, 1.5]
n_grid = [10, 100, 1000]
"#,
    );
    let out = run(dir.path(), &["finitelen", "--config", "campaign.toml"]);
    assert!(out.status.success());
    let out_dir = dir.path().join("out");

    let rep = csv_rows(&out_dir.join("repetition.csv"));
    assert_eq!(csv_header(&out_dir.join("repetition.csv"))[1], "R_rep_hz");
    assert!(rep.iter().all(|r| r[2] == "2000"));

    let split = csv_rows(&out_dir.join("rate_split.csv"));
    assert_eq!(
        csv_header(&out_dir.join("rate_split.csv")),
        [
            "R_B_bits_per_letter",
            "R_E_bits_per_letter",
            "H_sec_nats",
            "n",
            "delta_bound",
            "feasible"
        ]
    );
    for r in &split {
        let r_b: f64 = r[0].parse().unwrap();
        let delta: f64 = r[4].parse().unwrap();
        if r_b >= 1.0 {
            assert_eq!(delta, 1.0);
            assert_eq!(r[5], "0");
        } else {
            assert!(delta < 1.0, "{r:?}");
            assert_eq!(r[5], "1");
        }
    }
    assert_eq!(split.len(), 12);

    let req = csv_rows(&out_dir.join("required_length.csv"));
    // R_E = 1 bit on a useless channel: H = 0.999 ln 2.
    let expected = ((1e20f64).ln() / (0.999 * std::f64::consts::LN_2)).ceil();
    assert_eq!(req[0][3], expected.to_string());
    assert_eq!(req[2][3], "");
}

#[test]
fn finitelen_runs_the_analysis_when_needed() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), DEGRADED);
    assert!(run(dir.path(), &["finitelen", "--config", "campaign.toml"])
        .status
        .success());
    for f in [
        "report.json",
        "tables.json",
        "rate_split.csv",
        "repetition.csv",
    ] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn binsweep_writes_both_receivers() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), DEGRADED);
    let out = run(dir.path(), &["binsweep", "--config", "campaign.toml"]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("out/binsweep.csv"));
    assert_eq!(rows.len(), 60);
    for who in ["bob", "eve"] {
        assert_eq!(
            rows.iter().filter(|r| r[0] == who && r[3] == "1").count(),
            1
        );
    }
}

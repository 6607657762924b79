//! The four subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fsosec_core::atmos::AtmosStats;
use fsosec_core::fading::{wiretap_run, WaveformRecord};
use fsosec_core::finite_length::{
    rate_split_row, repetition_curve, required_length_for_exponent, RateSplitRow,
};
use fsosec_core::metrics::{
    bin_width_sweep, geometric_widths, mutual_info, outage_curve, pooled_tables, select_bin_width,
    slot_metric, soft_transition, BinWidthChoice, InputDist, SlotMetrics, TransitionTable,
};
use fsosec_core::prbs::{gen_prbs, PrbsSpec};
use fsosec_core::recovery::{recover, RecoveryOptions, SymbolFrame, SymbolPair};
use log::{info, warn};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{CampaignConfig, DeltaSpec};
use crate::frames::{read_frame_csv, write_frame_csv};
use crate::output::{num, write_csv, write_json};
use crate::report::{
    AtmosReport, Meta, OutagePoint, Report, SlotRow, SlotTables, SyncInfo, TablesFile, TruthFile,
};
use crate::waveform::{read_waveform, write_waveform};

pub const SLOTS_HEADER: [&str; 7] = [
    "slot_index",
    "t_start_ms",
    "mi_bob",
    "mi_eve",
    "rs_i",
    "rs_i_bps",
    "mean_voltage_bob",
];
pub const OUTAGE_HEADER: [&str; 2] = ["r_th_bps", "p_outage"];
pub const BINSWEEP_HEADER: [&str; 4] = ["receiver", "delta_v", "mean_slot_mi_bits", "selected"];
pub const RATE_SPLIT_HEADER: [&str; 6] = [
    "R_B_bits_per_letter",
    "R_E_bits_per_letter",
    "H_sec_nats",
    "n",
    "delta_bound",
    "feasible",
];
pub const REQUIRED_HEADER: [&str; 5] = [
    "R_B_bits_per_letter",
    "R_E_bits_per_letter",
    "H_sec_nats",
    "n_required",
    "feasible",
];
pub const REPETITION_HEADER: [&str; 5] = [
    "R_B_bits_per_letter",
    "R_rep_hz",
    "n",
    "delta_bound",
    "feasible",
];

/// Worker pool for per-slot and per-width parallel loops. `None` uses every
/// available core.
pub fn thread_pool(workers: Option<usize>) -> anyhow::Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

pub struct SimulateOutput {
    pub bob: PathBuf,
    pub eve: PathBuf,
    pub truth: PathBuf,
}

pub fn simulate(cfg: &CampaignConfig) -> anyhow::Result<SimulateOutput> {
    let sim = cfg.require_sim()?;
    create_dir(&cfg.output_dir)?;
    let (wb, we, truth) = wiretap_run(sim).context("simulation failed")?;
    let out = SimulateOutput {
        bob: cfg.output_dir.join("bob.fsow"),
        eve: cfg.output_dir.join("eve.fsow"),
        truth: cfg.output_dir.join("truth.json"),
    };
    write_waveform(&out.bob, &wb)?;
    write_waveform(&out.eve, &we)?;
    write_json(&out.truth, &TruthFile::new(sim, &truth))?;
    info!(
        "wrote {} samples per receiver to {}",
        wb.samples.len(),
        cfg.output_dir.display()
    );
    Ok(out)
}

/// Aligned frames for both receivers plus how they were obtained.
pub struct Frames {
    pub bob: SymbolFrame,
    pub eve: SymbolFrame,
    pub bob_name: String,
    pub eve_name: String,
    pub sync_bob: Option<SyncInfo>,
    pub sync_eve: Option<SyncInfo>,
    pub simulated: bool,
}

enum Source {
    Waveform(WaveformRecord),
    Frame(SymbolFrame),
}

fn load_source(path: &Path, cfg: &CampaignConfig) -> anyhow::Result<Source> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let a = &cfg.analysis;
        Ok(Source::Frame(read_frame_csv(
            path,
            a.rep_rate_hz,
            a.coherence_s,
        )?))
    } else {
        let w = read_waveform(path).with_context(|| format!("cannot read {}", path.display()))?;
        Ok(Source::Waveform(w))
    }
}

fn align(
    src: Source,
    name: &str,
    prbs: &[bool],
    opts: &RecoveryOptions,
) -> anyhow::Result<(SymbolFrame, Option<SyncInfo>)> {
    match src {
        Source::Frame(f) => Ok((f, None)),
        Source::Waveform(w) => {
            let r = recover(&w, prbs, opts)
                .with_context(|| format!("{name}: symbol recovery failed"))?;
            info!(
                "{name}: offset {} symbols, peak {:.3}, runner-up {:.3}, phase {}",
                r.sync.offset_symbols, r.sync.peak_correlation, r.sync.second_peak, r.timing_phase
            );
            let sync = SyncInfo::new(&r.sync, r.timing_phase);
            Ok((r.frame, Some(sync)))
        }
    }
}

pub fn load_frames(cfg: &CampaignConfig, pool: &ThreadPool) -> anyhow::Result<Frames> {
    cfg.validate()?;
    let a = &cfg.analysis;
    let opts = RecoveryOptions {
        rep_rate_hz: a.rep_rate_hz,
        coherence_s: a.coherence_s,
        lpf_cutoff_hz: (a.lpf_cutoff_hz > 0.0).then_some(a.lpf_cutoff_hz),
    };
    let (bob_src, eve_src, bob_name, eve_name, prbs_spec): (_, _, _, _, &PrbsSpec) =
        if let Some(sim) = &cfg.sim {
            let (wb, we, _) = wiretap_run(sim).context("simulation failed")?;
            (
                Source::Waveform(wb),
                Source::Waveform(we),
                "simulated bob".to_string(),
                "simulated eve".to_string(),
                &sim.prbs,
            )
        } else {
            let input = cfg.input.as_ref().expect("validated");
            (
                load_source(&input.bob, cfg)?,
                load_source(&input.eve, cfg)?,
                input.bob.display().to_string(),
                input.eve.display().to_string(),
                &a.prbs,
            )
        };
    let prbs = gen_prbs(prbs_spec).context("invalid PRBS settings")?;
    let (bob, eve) = pool.install(|| {
        rayon::join(
            || align(bob_src, &bob_name, &prbs, &opts),
            || align(eve_src, &eve_name, &prbs, &opts),
        )
    });
    let (bob, sync_bob) = bob?;
    let (eve, sync_eve) = eve?;
    Ok(Frames {
        bob,
        eve,
        bob_name,
        eve_name,
        sync_bob,
        sync_eve,
        simulated: cfg.sim.is_some(),
    })
}

/// Mean per-slot MI over a geometric bin-width grid.
///
/// Slot-sized samples are what the per-slot estimates see, so the small-sample
/// inflation shows up at the same widths as in the estimates themselves. The
/// grid starts at `widest_v`, or at half the overall voltage range.
pub fn slot_sweep(
    frame: &SymbolFrame,
    n_slots: usize,
    points: usize,
    widest_v: Option<f64>,
    px: &InputDist,
    pool: &ThreadPool,
) -> anyhow::Result<Vec<(f64, f64)>> {
    let widest = match widest_v {
        Some(w) => w,
        None => {
            let (lo, hi) = shared_pairs(frame, n_slots)
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                    (a.min(p.v), b.max(p.v))
                });
            let half = 0.5 * (hi - lo);
            if !(half > 0.0) {
                bail!("all soft values are identical; nothing to sweep");
            }
            half
        }
    };
    let widths = geometric_widths(widest, points);
    let per_slot: Vec<fsosec_core::Result<Vec<(f64, f64)>>> = pool.install(|| {
        (0..n_slots)
            .into_par_iter()
            .map(|i| bin_width_sweep(frame.slot(i), &widths, px))
            .collect()
    });
    let mut sum = vec![0.0; widths.len()];
    let mut used = 0usize;
    for (i, s) in per_slot.into_iter().enumerate() {
        match s {
            Ok(s) => {
                for (acc, (_, mi)) in sum.iter_mut().zip(s) {
                    *acc += mi;
                }
                used += 1;
            }
            Err(e) => warn!("slot {i}: left out of the bin-width sweep: {e}"),
        }
    }
    if used == 0 {
        bail!("no slot supports a bin-width sweep");
    }
    Ok(widths
        .into_iter()
        .zip(sum)
        .map(|(d, s)| (d, s / used as f64))
        .collect())
}

fn sweep_params(spec: &DeltaSpec) -> (usize, Option<f64>) {
    match spec {
        DeltaSpec::Sweep { points, widest_v } => (*points, *widest_v),
        DeltaSpec::Fixed { .. } => match DeltaSpec::default() {
            DeltaSpec::Sweep { points, widest_v } => (points, widest_v),
            DeltaSpec::Fixed { .. } => unreachable!(),
        },
    }
}

fn shared_pairs(f: &SymbolFrame, slots: usize) -> &[SymbolPair] {
    &f.pairs[..slots * f.symbols_per_slot()]
}

fn sweep_rows(receiver: &str, sweep: &[(f64, f64)], chosen: Option<f64>) -> Vec<Vec<String>> {
    sweep
        .iter()
        .map(|&(d, mi)| {
            vec![
                receiver.to_string(),
                num(d),
                num(mi),
                u8::from(chosen == Some(d)).to_string(),
            ]
        })
        .collect()
}

fn on_intensity(slot: &[SymbolPair]) -> Option<f64> {
    let on: Vec<f64> = slot.iter().filter(|p| p.x).map(|p| p.v).collect();
    (!on.is_empty()).then(|| on.iter().sum::<f64>() / on.len() as f64)
}

fn atmos_for(
    frame: &SymbolFrame,
    slots: usize,
    cfg: &CampaignConfig,
    who: &str,
) -> Option<AtmosStats> {
    let intensities: Vec<f64> = (0..slots)
        .filter_map(|i| on_intensity(frame.slot(i)))
        .collect();
    match AtmosStats::from_intensities(
        intensities,
        cfg.analysis.wavelength_m,
        cfg.analysis.path_length_m,
    ) {
        Ok(s) => Some(s),
        Err(e) => {
            warn!("{who}: no turbulence estimate: {e}");
            None
        }
    }
}

pub struct Analysis {
    pub report: Report,
    pub tables: TablesFile,
}

pub fn analyze(cfg: &CampaignConfig, pool: &ThreadPool) -> anyhow::Result<Analysis> {
    let frames = load_frames(cfg, pool)?;
    create_dir(&cfg.output_dir)?;
    let (bob, eve) = (&frames.bob, &frames.eve);
    if bob.symbols_per_slot() != eve.symbols_per_slot() {
        bail!("Bob's and Eve's frames use different slot lengths");
    }
    let n_slots = bob.complete_slots().min(eve.complete_slots());
    if n_slots == 0 {
        bail!(
            "inputs are shorter than one coherence slot ({} s)",
            cfg.analysis.coherence_s
        );
    }
    let px = cfg.input_dist();
    let rep = cfg.analysis.rep_rate_hz;

    let (points, widest) = sweep_params(&cfg.analysis.delta_eve);
    let eve_sweep = slot_sweep(eve, n_slots, points, widest, &px, pool)?;
    let (delta, source, on_plateau) = match cfg.analysis.delta_eve {
        DeltaSpec::Fixed { value_v } => (value_v, "fixed", None),
        DeltaSpec::Sweep { .. } => {
            let BinWidthChoice {
                delta, on_plateau, ..
            } = select_bin_width(&eve_sweep)?;
            if !on_plateau {
                warn!("no MI plateau in Eve's bin-width sweep; using the median width");
            }
            (delta, "sweep", Some(on_plateau))
        }
    };
    info!("Eve bin width {delta:.4e} V ({source})");
    write_csv(
        &cfg.output_dir.join("binsweep.csv"),
        &BINSWEEP_HEADER,
        &sweep_rows("eve", &eve_sweep, Some(delta)),
    )?;

    let per_slot: Vec<Option<(SlotMetrics, TransitionTable)>> = pool.install(|| {
        (0..n_slots)
            .into_par_iter()
            .map(|i| {
                let run = || -> fsosec_core::Result<_> {
                    let m = slot_metric(i, bob.slot(i), eve.slot(i), &px, delta, rep)?;
                    let t = soft_transition(eve.slot(i), delta)?;
                    Ok((m, t))
                };
                match run() {
                    Ok(v) => Some(v),
                    Err(e) => {
                        warn!("slot {i}: marked invalid: {e}");
                        None
                    }
                }
            })
            .collect()
    });
    let valid: Vec<SlotMetrics> = per_slot.iter().flatten().map(|(m, _)| *m).collect();

    let (mi_bob_pooled, eve_pooled) = pooled_tables(bob, eve, &px, delta)?;
    let mi_eve_pooled = mutual_info(&eve_pooled, &px);
    let rs_ergodic = if valid.is_empty() {
        warn!("no valid slot; ergodic rate undefined");
        None
    } else {
        Some(valid.iter().map(|m| m.rs_i).sum::<f64>() / valid.len() as f64)
    };

    let slot_rows: Vec<SlotRow> = per_slot
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let m = s.as_ref().map(|(m, _)| m);
            SlotRow {
                slot_index: i,
                t_start_ms: bob.slot_start_s(i) * 1e3,
                valid: m.is_some(),
                mi_bob: m.map(|m| m.mi_bob),
                mi_eve: m.map(|m| m.mi_eve),
                rs_i: m.map(|m| m.rs_i),
                rs_i_bps: m.map(|m| m.rs_i_bps),
                mean_voltage_bob: m.map(|m| m.mean_voltage_bob),
                threshold_bob: m.map(|m| m.threshold_bob),
            }
        })
        .collect();

    let report = Report {
        meta: Meta {
            tool: "fsosec".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            source: if frames.simulated {
                "simulation"
            } else {
                "files"
            }
            .into(),
            bob_input: frames.bob_name.clone(),
            eve_input: frames.eve_name.clone(),
            rep_rate_hz: rep,
            coherence_s: cfg.analysis.coherence_s,
            symbols_per_slot: bob.symbols_per_slot(),
            n_slots,
            n_valid_slots: valid.len(),
            p_one: px.p1,
            delta_eve_v: delta,
            delta_eve_source: source.into(),
            delta_eve_on_plateau: on_plateau,
            mi_bob_pooled,
            mi_eve_pooled,
            sync_bob: frames.sync_bob,
            sync_eve: frames.sync_eve,
        },
        slots: slot_rows,
        rs_long_span: mi_bob_pooled - mi_eve_pooled,
        rs_ergodic,
        outage: outage_curve(&valid, &cfg.analysis.outage_grid_bps)
            .into_iter()
            .map(|(r_th_bps, probability)| OutagePoint {
                r_th_bps,
                probability,
            })
            .collect(),
        atmos: AtmosReport {
            bob: atmos_for(bob, n_slots, cfg, "bob"),
            eve: atmos_for(eve, n_slots, cfg, "eve"),
        },
    };
    let tables = TablesFile {
        px,
        rep_rate_hz: rep,
        delta_eve_v: delta,
        pooled: SlotTables {
            mi_bob: mi_bob_pooled,
            eve: eve_pooled,
        },
        slots: per_slot
            .into_iter()
            .map(|s| {
                s.map(|(m, eve)| SlotTables {
                    mi_bob: m.mi_bob,
                    eve,
                })
            })
            .collect(),
    };

    write_report_files(&cfg.output_dir, &report, &tables)?;
    if cfg.analysis.write_frames {
        write_frame_csv(&cfg.output_dir.join("bob_frame.csv"), bob)?;
        write_frame_csv(&cfg.output_dir.join("eve_frame.csv"), eve)?;
    }
    Ok(Analysis { report, tables })
}

fn write_report_files(dir: &Path, report: &Report, tables: &TablesFile) -> anyhow::Result<()> {
    let slot_rows: Vec<Vec<String>> = report
        .slots
        .iter()
        .map(|s| {
            let f = |v: Option<f64>| num(v.unwrap_or(f64::NAN));
            vec![
                s.slot_index.to_string(),
                num(s.t_start_ms),
                f(s.mi_bob),
                f(s.mi_eve),
                f(s.rs_i),
                f(s.rs_i_bps),
                f(s.mean_voltage_bob),
            ]
        })
        .collect();
    write_csv(&dir.join("slots.csv"), &SLOTS_HEADER, &slot_rows)?;
    let outage_rows: Vec<Vec<String>> = report
        .outage
        .iter()
        .map(|o| vec![num(o.r_th_bps), num(o.probability)])
        .collect();
    write_csv(&dir.join("outage.csv"), &OUTAGE_HEADER, &outage_rows)?;
    write_json(&dir.join("tables.json"), tables)?;
    write_json(&dir.join("report.json"), report)?;
    Ok(())
}

pub struct FiniteLengthOutput {
    pub total_rate: f64,
    pub rate_split: Vec<RateSplitRow>,
}

fn infeasible_row(total: f64, r_b: f64, n_grid: &[u64]) -> RateSplitRow {
    RateSplitRow {
        r_b,
        r_e: total - r_b,
        h_sec: 0.0,
        bounds: n_grid.iter().map(|&n| (n, 1.0)).collect(),
    }
}

pub fn finitelen(cfg: &CampaignConfig, pool: &ThreadPool) -> anyhow::Result<FiniteLengthOutput> {
    let f = &cfg.analysis.finite_length;
    let path = cfg.output_dir.join("tables.json");
    let tables: TablesFile = if path.exists() {
        info!("using tables from {}", path.display());
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?
    } else {
        info!("no {}; running the analysis first", path.display());
        analyze(cfg, pool)?.tables
    };
    let chosen = match f.slot {
        None => &tables.pooled,
        Some(i) => match tables.slots.get(i) {
            Some(Some(t)) => t,
            Some(None) => bail!("slot {i} is invalid in {}", path.display()),
            None => bail!("slot {i} does not exist ({} slots)", tables.slots.len()),
        },
    };
    let total = f.total_rate.unwrap_or(chosen.mi_bob);
    if !(total > 0.0) {
        bail!("sum rate {total} is not positive; nothing to split");
    }
    let r_b_grid: Vec<f64> = if f.r_b_grid.is_empty() {
        (0..=10).map(|k| total * k as f64 / 10.0).collect()
    } else {
        f.r_b_grid.clone()
    };
    let (table, px) = (&chosen.eve, &tables.px);

    let rows: Vec<anyhow::Result<RateSplitRow>> = pool.install(|| {
        r_b_grid
            .par_iter()
            .map(|&r_b| {
                if r_b > total || r_b < 0.0 {
                    warn!("R_B = {r_b} lies outside [0, {total}]; row marked infeasible");
                    return Ok(infeasible_row(total, r_b, &f.n_grid));
                }
                Ok(rate_split_row(total, r_b, table, px, &f.n_grid)?)
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<anyhow::Result<Vec<_>>>()?;

    let mut split_csv = Vec::new();
    let mut required_csv = Vec::new();
    let mut rep_csv = Vec::new();
    for row in &rows {
        let feasible = row.h_sec > 0.0;
        for &(n, bound) in &row.bounds {
            split_csv.push(vec![
                num(row.r_b),
                num(row.r_e),
                num(row.h_sec),
                n.to_string(),
                num(bound),
                u8::from(feasible).to_string(),
            ]);
        }
        let n_req = if feasible {
            required_length_for_exponent(f.delta_target, row.h_sec)?.to_string()
        } else {
            String::new()
        };
        required_csv.push(vec![
            num(row.r_b),
            num(row.r_e),
            num(row.h_sec),
            n_req,
            u8::from(feasible).to_string(),
        ]);
        let curve = if row.r_e >= 0.0 {
            repetition_curve(f.observation_s, total, row.r_b, table, px, &f.rep_grid_hz)?
        } else {
            Vec::new()
        };
        for p in curve {
            rep_csv.push(vec![
                num(row.r_b),
                num(p.rep_rate_hz),
                p.n.to_string(),
                num(p.delta_bound),
                u8::from(feasible).to_string(),
            ]);
        }
    }
    create_dir(&cfg.output_dir)?;
    write_csv(
        &cfg.output_dir.join("rate_split.csv"),
        &RATE_SPLIT_HEADER,
        &split_csv,
    )?;
    write_csv(
        &cfg.output_dir.join("required_length.csv"),
        &REQUIRED_HEADER,
        &required_csv,
    )?;
    write_csv(
        &cfg.output_dir.join("repetition.csv"),
        &REPETITION_HEADER,
        &rep_csv,
    )?;
    Ok(FiniteLengthOutput {
        total_rate: total,
        rate_split: rows,
    })
}

pub struct BinSweepOutput {
    pub bob: Vec<(f64, f64)>,
    pub eve: Vec<(f64, f64)>,
    pub bob_choice: BinWidthChoice,
    pub eve_choice: BinWidthChoice,
}

pub fn binsweep(cfg: &CampaignConfig, pool: &ThreadPool) -> anyhow::Result<BinSweepOutput> {
    let frames = load_frames(cfg, pool)?;
    let n_slots = frames.bob.complete_slots().min(frames.eve.complete_slots());
    if n_slots == 0 {
        bail!("inputs are shorter than one coherence slot");
    }
    let px = cfg.input_dist();
    let (points, widest) = sweep_params(&cfg.analysis.delta_eve);
    let bob = slot_sweep(&frames.bob, n_slots, points, widest, &px, pool)?;
    let eve = slot_sweep(&frames.eve, n_slots, points, widest, &px, pool)?;
    let bob_choice = select_bin_width(&bob)?;
    let eve_choice = select_bin_width(&eve)?;
    let mut rows = sweep_rows("bob", &bob, Some(bob_choice.delta));
    rows.extend(sweep_rows("eve", &eve, Some(eve_choice.delta)));
    create_dir(&cfg.output_dir)?;
    write_csv(
        &cfg.output_dir.join("binsweep.csv"),
        &BINSWEEP_HEADER,
        &rows,
    )?;
    Ok(BinSweepOutput {
        bob,
        eve,
        bob_choice,
        eve_choice,
    })
}

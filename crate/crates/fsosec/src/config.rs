//! TOML campaign configuration and command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fsosec_core::fading::SimConfig;
use fsosec_core::metrics::InputDist;
use fsosec_core::prbs::PrbsSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    /// Simulated campaign. Exactly one of `sim` and `input` is set.
    pub sim: Option<SimConfig>,
    /// Recorded waveforms (`.fsow`) or aligned frames (`.csv`).
    pub input: Option<InputPaths>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub bob: PathBuf,
    pub eve: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub rep_rate_hz: f64,
    pub coherence_s: f64,
    /// `P(X = 1)`.
    pub p_one: f64,
    /// Low-pass cutoff before timing recovery; `0` disables the filter.
    pub lpf_cutoff_hz: f64,
    pub delta_eve: DeltaSpec,
    /// Target rates for the outage curve, bits/s.
    pub outage_grid_bps: Vec<f64>,
    pub wavelength_m: f64,
    pub path_length_m: f64,
    pub finite_length: FiniteLengthConfig,
    /// Training sequence of recorded inputs; simulations use `sim.prbs`.
    pub prbs: PrbsSpec,
    /// Also write the aligned frames as `bob_frame.csv` and `eve_frame.csv`.
    pub write_frames: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            rep_rate_hz: 10e6,
            coherence_s: 4e-3,
            p_one: 0.5,
            lpf_cutoff_hz: 6e6,
            delta_eve: DeltaSpec::default(),
            outage_grid_bps: (0..=20).map(|k| k as f64 * 0.5e6).collect(),
            wavelength_m: 1550e-9,
            path_length_m: 7800.0,
            finite_length: FiniteLengthConfig::default(),
            prbs: PrbsSpec::prbs15(),
            write_frames: false,
        }
    }
}

/// How Eve's soft-decision bin width is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSpec {
    Fixed {
        value_v: f64,
    },
    /// Geometric sweep from `widest_v` (default: half the voltage range)
    /// down by `sqrt(2)` per point.
    Sweep {
        #[serde(default = "default_sweep_points")]
        points: usize,
        #[serde(default)]
        widest_v: Option<f64>,
    },
}

impl Default for DeltaSpec {
    fn default() -> Self {
        DeltaSpec::Sweep {
            points: default_sweep_points(),
            widest_v: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteLengthConfig {
    pub delta_target: f64,
    /// Observation window for the repetition-rate curve, seconds.
    pub observation_s: f64,
    pub rep_grid_hz: Vec<f64>,
    /// Message rates in bits/letter; empty means 11 points over `[0, C]`.
    pub r_b_grid: Vec<f64>,
    pub n_grid: Vec<u64>,
    /// Sum rate `C = R_B + R_E` in bits/letter; defaults to Bob's MI.
    pub total_rate: Option<f64>,
    /// Slot whose tables are used; the pooled tables when unset.
    pub slot: Option<usize>,
}

impl Default for FiniteLengthConfig {
    fn default() -> Self {
        FiniteLengthConfig {
            delta_target: 1e-20,
            observation_s: 0.2,
            rep_grid_hz: vec![1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5],
            r_b_grid: Vec::new(),
            n_grid: vec![100, 200, 500, 1_000, 2_000, 5_000, 10_000, 20_000, 50_000],
            total_rate: None,
            slot: None,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_sweep_points() -> usize {
    30
}

/// Values given on the command line; each replaces the file's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub coherence_ms: Option<f64>,
    pub delta_mv: Option<f64>,
    pub rth_grid_bps: Option<Vec<f64>>,
}

impl CampaignConfig {
    /// Parses a config; relative paths are taken relative to `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> anyhow::Result<Self> {
        let mut cfg: CampaignConfig = toml::from_str(text).context("invalid config")?;
        if let Some(input) = &mut cfg.input {
            input.bob = base_dir.join(&input.bob);
            input.eve = base_dir.join(&input.eve);
        }
        cfg.output_dir = base_dir.join(&cfg.output_dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let (Some(seed), Some(sim)) = (o.seed, self.sim.as_mut()) {
            sim.rng_seed = seed;
        }
        if let Some(ms) = o.coherence_ms {
            self.analysis.coherence_s = ms * 1e-3;
            if let Some(sim) = self.sim.as_mut() {
                sim.coherence_s = ms * 1e-3;
            }
        }
        if let Some(mv) = o.delta_mv {
            self.analysis.delta_eve = DeltaSpec::Fixed { value_v: mv * 1e-3 };
        }
        if let Some(grid) = &o.rth_grid_bps {
            self.analysis.outage_grid_bps = grid.clone();
        }
    }

    /// The `sim` section, or an error naming it.
    pub fn require_sim(&self) -> anyhow::Result<&SimConfig> {
        match &self.sim {
            Some(sim) => {
                sim.validate().context("invalid `sim` section")?;
                Ok(sim)
            }
            None => bail!("config has no `sim` section; `simulate` needs one"),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        match (&self.sim, &self.input) {
            (Some(sim), None) => {
                sim.validate().context("invalid `sim` section")?;
                if sim.rep_rate_hz != self.analysis.rep_rate_hz {
                    bail!(
                        "`analysis.rep_rate_hz` ({}) differs from `sim.rep_rate_hz` ({})",
                        self.analysis.rep_rate_hz,
                        sim.rep_rate_hz
                    );
                }
            }
            (None, Some(_)) => {}
            (Some(_), Some(_)) => bail!("config sets both `sim` and `input`; keep exactly one"),
            (None, None) => bail!("config needs a `sim` or an `input` section"),
        }
        let a = &self.analysis;
        if !(a.rep_rate_hz > 0.0 && a.rep_rate_hz.is_finite()) {
            bail!("`analysis.rep_rate_hz` must be positive");
        }
        if !(a.coherence_s > 0.0 && a.coherence_s.is_finite()) {
            bail!("`analysis.coherence_s` must be positive");
        }
        InputDist::new(a.p_one).context("`analysis.p_one`")?;
        if !(a.lpf_cutoff_hz >= 0.0) {
            bail!("`analysis.lpf_cutoff_hz` must be >= 0");
        }
        match a.delta_eve {
            DeltaSpec::Fixed { value_v } if !(value_v > 0.0 && value_v.is_finite()) => {
                bail!("`analysis.delta_eve.value_v` must be positive")
            }
            DeltaSpec::Sweep { points, .. } if points < 5 => {
                bail!("`analysis.delta_eve.points` must be at least 5")
            }
            DeltaSpec::Sweep {
                widest_v: Some(w), ..
            } if !(w > 0.0 && w.is_finite()) => {
                bail!("`analysis.delta_eve.widest_v` must be positive")
            }
            _ => {}
        }
        if a.outage_grid_bps.is_empty() {
            bail!("`analysis.outage_grid_bps` is empty");
        }
        let f = &a.finite_length;
        if !(f.delta_target > 0.0 && f.delta_target < 1.0) {
            bail!("`analysis.finite_length.delta_target` must lie in (0, 1)");
        }
        if !(f.observation_s > 0.0) {
            bail!("`analysis.finite_length.observation_s` must be positive");
        }
        if f.rep_grid_hz.is_empty() {
            bail!("`analysis.finite_length.rep_grid_hz` is empty");
        }
        if f.n_grid.is_empty() {
            bail!("`analysis.finite_length.n_grid` is empty");
        }
        Ok(())
    }

    pub fn input_dist(&self) -> InputDist {
        InputDist::new(self.analysis.p_one).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> anyhow::Result<CampaignConfig> {
        CampaignConfig::from_toml(text, Path::new("/base"))
    }

    #[test]
    fn empty_sim_section_takes_defaults() {
        let cfg = parse("[sim]\n").unwrap();
        assert_eq!(cfg.sim, Some(SimConfig::default()));
        assert_eq!(cfg.analysis, AnalysisConfig::default());
        assert_eq!(cfg.output_dir, Path::new("/base/out"));
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg = parse(
            r#"
            output_dir = "run1"
            [sim]
            duration_s = 0.02
            rng_seed = 7
            [sim.eve]
            mean_gain = 0.3
            scint_index = 0.1
            noise_sigma = 0.25
            [analysis]
            coherence_s = 0.002
            [analysis.delta_eve]
            mode = "fixed"
            value_v = 0.01
            "#,
        )
        .unwrap();
        let sim = cfg.sim.as_ref().unwrap();
        assert_eq!(sim.rng_seed, 7);
        assert_eq!(sim.eve.mean_gain, 0.3);
        assert_eq!(sim.eve.dc_offset, 0.0);
        assert_eq!(sim.bob, SimConfig::default().bob);
        assert_eq!(cfg.analysis.coherence_s, 0.002);
        assert_eq!(cfg.analysis.delta_eve, DeltaSpec::Fixed { value_v: 0.01 });
        assert_eq!(cfg.output_dir, Path::new("/base/run1"));
    }

    #[test]
    fn input_paths_resolve_against_base() {
        let cfg = parse("[input]\nbob = \"b.fsow\"\neve = \"/abs/e.fsow\"\n").unwrap();
        let input = cfg.input.unwrap();
        assert_eq!(input.bob, Path::new("/base/b.fsow"));
        assert_eq!(input.eve, Path::new("/abs/e.fsow"));
    }

    #[test]
    fn missing_sim_is_named() {
        let cfg = parse("[input]\nbob = \"b\"\neve = \"e\"\n").unwrap();
        let err = cfg.require_sim().unwrap_err().to_string();
        assert!(err.contains("`sim`"), "{err}");
    }

    #[test]
    fn exactly_one_source() {
        let err = parse("").unwrap().validate().unwrap_err().to_string();
        assert!(err.contains("`sim` or an `input`"), "{err}");
        let both = parse("[sim]\n[input]\nbob = \"b\"\neve = \"e\"\n").unwrap();
        assert!(both.validate().is_err());
    }

    #[test]
    fn unknown_keys_and_missing_fields_are_reported() {
        let err = format!("{:#}", parse("[sim]\nduraton_s = 1\n").unwrap_err());
        assert!(err.contains("duraton_s"), "{err}");
        let err = format!("{:#}", parse("[sim.bob]\nmean_gain = 1\n").unwrap_err());
        assert!(err.contains("scint_index"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut cfg = parse("[sim]\n").unwrap();
        cfg.analysis.outage_grid_bps.clear();
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .contains("outage_grid_bps"));
        let cfg = parse("[sim]\nduration_s = -1\n").unwrap();
        assert!(format!("{:#}", cfg.validate().unwrap_err()).contains("duration_s"));
    }

    #[test]
    fn example_file_is_valid() {
        let cfg = parse(include_str!("../campaign.example.toml")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.analysis.delta_eve, DeltaSpec::default());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut cfg = parse("[sim]\n").unwrap();
        cfg.apply(&Overrides {
            out: Some("elsewhere".into()),
            seed: Some(99),
            coherence_ms: Some(2.0),
            delta_mv: Some(5.0),
            rth_grid_bps: Some(vec![1e6, 2e6]),
        });
        let sim = cfg.sim.as_ref().unwrap();
        assert_eq!(sim.rng_seed, 99);
        assert_eq!(sim.coherence_s, 2e-3);
        assert_eq!(cfg.analysis.coherence_s, 2e-3);
        assert_eq!(cfg.analysis.delta_eve, DeltaSpec::Fixed { value_v: 5e-3 });
        assert_eq!(cfg.analysis.outage_grid_bps, vec![1e6, 2e6]);
        assert_eq!(cfg.output_dir, Path::new("elsewhere"));
    }
}

use std::path::Path;

use bcsgp::asymptotics::{CriticalConfig, StudyConfig, DEFAULT_H_LIST};
use bcsgp::bcs::{McConfig, QuadratureConfig, SectorConfig, DEFAULT_MARGIN};
use bcsgp::gp::{GpGrid, MinimizerConfig};
use bcsgp::model::check_h;
use bcsgp::twobody::TwoBodyConfig;
use bcsgp::{Interaction, Trap};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid override `{0}`: expected key=value")]
    Override(String),
    #[error("{0}")]
    Invalid(String),
}

/// Interaction, trap and the scale parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub interaction: Interaction,
    pub trap: Trap,
    /// `D − E_W`; ignored when `d` is set.
    pub d_offset: f64,
    /// Absolute offset `D`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Scale ratio of `trial-energy`.
    pub h: f64,
    /// Scale ratios of `sweep`.
    pub h_list: Vec<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            interaction: Interaction::default(),
            trap: Trap::default(),
            d_offset: 0.5,
            d: None,
            h: 0.3,
            h_list: DEFAULT_H_LIST.to_vec(),
        }
    }
}

impl ModelSection {
    pub fn offset(&self, e_w: f64) -> f64 {
        self.d.unwrap_or(e_w + self.d_offset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpSection {
    /// Offsets `D − E_W` of the criticality scan.
    pub scan_offsets: Vec<f64>,
}

impl Default for GpSection {
    fn default() -> Self {
        Self {
            scan_offsets: vec![-0.5, -0.1, 0.0, 0.05, 0.1, 0.25, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    pub h_values: Vec<f64>,
    pub lo_offset: f64,
    pub hi_offset: f64,
    pub tolerance: f64,
    pub points_per_round: usize,
}

impl Default for CriticalSection {
    fn default() -> Self {
        let c = CriticalConfig::default();
        Self {
            h_values: vec![0.4, 0.3, 0.2],
            lo_offset: c.lo_offset,
            hi_offset: c.hi_offset,
            tolerance: c.tolerance,
            points_per_round: c.points_per_round,
        }
    }
}

impl CriticalSection {
    pub fn search(&self) -> CriticalConfig {
        CriticalConfig {
            lo_offset: self.lo_offset,
            hi_offset: self.hi_offset,
            tolerance: self.tolerance,
            points_per_round: self.points_per_round,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub include_mc: bool,
    pub mc_samples: u64,
    /// Seed of the random directions in the gradient checks.
    pub seed: u64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            include_mc: true,
            mc_samples: 1_000_000,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub json: bool,
    pub csv: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "bcsgp-out".into(),
            json: true,
            csv: true,
        }
    }
}

/// Everything a run depends on; embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub twobody: TwoBodyConfig,
    pub grid: GpGrid,
    pub minimizer: MinimizerConfig,
    pub sectors: SectorConfig,
    pub quadrature: QuadratureConfig,
    pub mc: McConfig,
    /// Admissibility margin `δ`.
    pub margin: f64,
    pub gp: GpSection,
    pub critical: CriticalSection,
    pub verify: VerifySection,
    pub output: OutputSection,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection::default(),
            twobody: TwoBodyConfig::default(),
            grid: GpGrid::default(),
            minimizer: MinimizerConfig::default(),
            sectors: SectorConfig::default(),
            quadrature: QuadratureConfig::default(),
            mc: McConfig::default(),
            margin: DEFAULT_MARGIN,
            gp: GpSection::default(),
            critical: CriticalSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn study(&self) -> StudyConfig {
        StudyConfig {
            sectors: self.sectors,
            quadrature: self.quadrature,
            mc: self.mc,
            minimizer: self.minimizer,
            margin: self.margin,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |e: bcsgp::Error| ConfigError::Invalid(e.to_string());
        self.model.interaction.validate().map_err(bad)?;
        self.model.trap.validate().map_err(bad)?;
        check_h(self.model.h).map_err(|e| ConfigError::Invalid(format!("model.h: {e}")))?;
        for &h in self.model.h_list.iter().chain(&self.critical.h_values) {
            check_h(h).map_err(|e| ConfigError::Invalid(format!("h list: {e}")))?;
        }
        if !self.model.d_offset.is_finite() || self.model.d.is_some_and(|d| !d.is_finite()) {
            return Err(ConfigError::Invalid("model offset D must be finite".into()));
        }
        if self.mc.samples == 0 || self.mc.block == 0 {
            return Err(ConfigError::Invalid("mc.samples and mc.block must be positive".into()));
        }
        if !(self.margin >= 0.0) {
            return Err(ConfigError::Invalid(format!("margin must be nonnegative, got {}", self.margin)));
        }
        let c = &self.critical;
        if !(c.lo_offset < c.hi_offset) || !(c.tolerance > 0.0) || c.points_per_round == 0 {
            return Err(ConfigError::Invalid(
                "critical: need lo_offset < hi_offset, tolerance > 0 and points_per_round >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Parses a TOML document into a validated config with defaults filled in.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    // The document alone first, so that its errors carry line positions.
    let parsed: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if overrides.is_empty() {
        parsed.validate()?;
        return Ok(parsed);
    }
    let mut value: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config: RunConfig = RunConfig::deserialize(value).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Reads `path` (or the defaults when absent) and applies `key=value` overrides.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    parse_config(&text, overrides).map_err(|e| match (e, path) {
        (ConfigError::Parse(m), Some(p)) => ConfigError::Parse(format!("{}: {m}", p.display())),
        (e, _) => e,
    })
}

/// `a.b.c=value`, with `value` read as a TOML value (bare words as strings).
fn apply_override(root: &mut toml::Table, arg: &str) -> Result<(), ConfigError> {
    let (key, raw) = arg.split_once('=').ok_or_else(|| ConfigError::Override(arg.into()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::Override(arg.into()));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.into()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut table = root;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(format!("override `{key}`: `{p}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(
            r#"
            [model]
            interaction = { kind = "gaussian-well", depth = 6.6784478435664845, width = 1.0 }
            trap = { kind = "harmonic", coefficient = 1.0 }
            "#,
            &[],
        )
        .unwrap();
        assert_eq!(c.model.h_list, DEFAULT_H_LIST.to_vec());
        assert_eq!(c.minimizer, MinimizerConfig::default());
        assert_eq!(c.mc, McConfig::default());
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = parse_config("[model]\nhbar = 1.0\n", &[]).unwrap_err();
        assert!(e.to_string().contains("hbar"), "{e}");
        let e = parse_config("colour = 1\n", &[]).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn h_out_of_range() {
        let e = parse_config("[model]\nh = 1.5\n", &[]).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)));
        assert!(e.to_string().contains("(0, 1)"), "{e}");
    }

    #[test]
    fn overrides() {
        let c = parse_config(
            "",
            &[
                "model.h=0.25".into(),
                "mc.seed=42".into(),
                "model.h_list=[0.4, 0.3]".into(),
                "output.dir=somewhere".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.model.h, 0.25);
        assert_eq!(c.mc.seed, 42);
        assert_eq!(c.model.h_list, vec![0.4, 0.3]);
        assert_eq!(c.output.dir, "somewhere");
        assert!(matches!(parse_config("", &["nonsense".into()]), Err(ConfigError::Override(_))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_config("[model\nh = 0.3\n", &[]).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
    }

    #[test]
    fn resolved_config_roundtrips() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_config(&text, &[]).unwrap(), c);
    }
}

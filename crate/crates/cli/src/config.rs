//! Experiment configuration. Every field has a default, so an empty file is a valid config.

use std::fmt;

use qlab::measure_models::{MeasureKind, ModelSpec};
use qlab::norms::NormingFunction;
use serde::{Deserialize, Serialize};

pub const SUITES: [&str; 6] = ["norms", "ktau", "cubes", "kernels", "blocks", "fourier"];

pub const DEFAULTS_HELP: &str = "\
Config file (TOML); every key is optional. Defaults:
  seed = 7
  [norms]   samples = 200, pairs = 200, dim = 8, max_m = 1000, sigma_m = 64
  [ktau]    model = { kind = \"lebesgue\", m = 2, n = 16 }
            profile = [{ kind = \"lorentz_minus\", p = 2.0 }, { kind = \"lorentz_minus\", p = 2.0 }]
            dilation = 2.0, brute_steps = 120, certificate_p = [2.0, 2.0],
            certificate_grids = [16, 24, 32, 48]
  [cubes]   p = [2.0, 2.0], grid = 36, m_params = [4, 9, 16, 25], cantor_depth = 2,
            cantor_ratio = 0.3333333333333333, trend_grid = 2048, trend_ratio = 0.25,
            trend_depths = [1, 5], trend_target = 0.2
  [kernels] exponents = [[2.0, 2.0], [3.0, 1.5]], identity_samples = 10000,
            rank_grids = [16, 32], decay_grid = 48, decay_window = [2, 32], slope_tolerance = 0.15
  [blocks]  p = [2.0, 2.0], grid = 128, levels = [0, 12], count_levels = 16,
            reassembly_grid = 32, scaling_h = 0.01, scaling_levels = [0, 1, 2, 3],
            scaling_tolerance = 0.1
  [fourier] grid = 64, resolution = 2048, cutoff = 512, line_resolution = 65536,
            line_cutoff = 16384, line_octaves = 4, annulus_exponents = [[2.0, 2.0], [3.0, 1.5]],
            annulus_resolution = 2048, annulus_cutoff = 512, annulus_octaves = 3,
            export_coefficients = false";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub norms: NormsConfig,
    pub ktau: KtauConfig,
    pub cubes: CubesConfig,
    pub kernels: KernelsConfig,
    pub blocks: BlocksConfig,
    pub fourier: FourierConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 7,
            norms: NormsConfig::default(),
            ktau: KtauConfig::default(),
            cubes: CubesConfig::default(),
            kernels: KernelsConfig::default(),
            blocks: BlocksConfig::default(),
            fourier: FourierConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    /// Random vectors per norming function for the axiom checks.
    pub samples: usize,
    /// Random matrix pairs per dual pair for the duality check.
    pub pairs: usize,
    pub dim: usize,
    pub max_m: usize,
    pub sigma_m: usize,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig { samples: 200, pairs: 200, dim: 8, max_m: 1000, sigma_m: 64 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KtauConfig {
    pub model: ModelSpec,
    pub profile: Vec<NormingFunction>,
    pub dilation: f64,
    pub brute_steps: usize,
    pub certificate_p: Vec<f64>,
    pub certificate_grids: Vec<usize>,
}

impl Default for KtauConfig {
    fn default() -> Self {
        KtauConfig {
            model: ModelSpec { kind: MeasureKind::Lebesgue, m: 2, n: 16 },
            profile: vec![NormingFunction::LorentzMinus { p: 2.0 }; 2],
            dilation: 2.0,
            brute_steps: 120,
            certificate_p: vec![2.0, 2.0],
            certificate_grids: vec![16, 24, 32, 48],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CubesConfig {
    /// Lorentz exponents of the profile.
    pub p: Vec<f64>,
    pub grid: usize,
    pub m_params: Vec<usize>,
    pub cantor_depth: u32,
    pub cantor_ratio: f64,
    pub trend_grid: usize,
    pub trend_ratio: f64,
    pub trend_depths: [u32; 2],
    pub trend_target: f64,
}

impl Default for CubesConfig {
    fn default() -> Self {
        CubesConfig {
            p: vec![2.0, 2.0],
            grid: 36,
            m_params: vec![4, 9, 16, 25],
            cantor_depth: 2,
            cantor_ratio: 1.0 / 3.0,
            trend_grid: 2048,
            trend_ratio: 0.25,
            trend_depths: [1, 5],
            trend_target: 0.2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelsConfig {
    pub exponents: Vec<Vec<f64>>,
    pub identity_samples: usize,
    pub rank_grids: Vec<usize>,
    pub decay_grid: usize,
    pub decay_window: [usize; 2],
    pub slope_tolerance: f64,
}

impl Default for KernelsConfig {
    fn default() -> Self {
        KernelsConfig {
            exponents: vec![vec![2.0, 2.0], vec![3.0, 1.5]],
            identity_samples: 10_000,
            rank_grids: vec![16, 32],
            decay_grid: 48,
            decay_window: [2, 32],
            slope_tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlocksConfig {
    pub p: Vec<f64>,
    pub grid: usize,
    pub levels: [i32; 2],
    pub count_levels: i32,
    pub reassembly_grid: usize,
    pub scaling_h: f64,
    pub scaling_levels: Vec<i32>,
    pub scaling_tolerance: f64,
}

impl Default for BlocksConfig {
    fn default() -> Self {
        BlocksConfig {
            p: vec![2.0, 2.0],
            grid: 128,
            levels: [0, 12],
            count_levels: 16,
            reassembly_grid: 32,
            scaling_h: 0.01,
            scaling_levels: vec![0, 1, 2, 3],
            scaling_tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierConfig {
    pub grid: usize,
    pub resolution: usize,
    pub cutoff: usize,
    pub line_resolution: usize,
    pub line_cutoff: usize,
    pub line_octaves: u32,
    pub annulus_exponents: Vec<Vec<f64>>,
    pub annulus_resolution: usize,
    pub annulus_cutoff: usize,
    pub annulus_octaves: u32,
    pub export_coefficients: bool,
}

impl Default for FourierConfig {
    fn default() -> Self {
        FourierConfig {
            grid: 64,
            resolution: 2048,
            cutoff: 512,
            line_resolution: 1 << 16,
            line_cutoff: 1 << 14,
            line_octaves: 4,
            annulus_exponents: vec![vec![2.0, 2.0], vec![3.0, 1.5]],
            annulus_resolution: 2048,
            annulus_cutoff: 512,
            annulus_octaves: 3,
            export_coefficients: false,
        }
    }
}

#[derive(Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// First line assigning `key` inside `[table]` (or at top level when `table` is empty).
fn line_of_key(src: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        let name = line.split('=').next().unwrap_or("").trim();
        if current == table && line.contains('=') && (name == key || name.starts_with(&format!("{key}."))) {
            return Some(i + 1);
        }
        if current.starts_with(&format!("{table}.{key}")) && !table.is_empty() {
            return Some(i + 1);
        }
    }
    None
}

fn sums_to_one(p: &[f64]) -> bool {
    p.iter().all(|&q| q > 1.0) && (p.iter().map(|q| 1.0 / q).sum::<f64>() - 1.0).abs() < 1e-12
}

impl Config {
    pub fn parse(src: &str) -> Result<Config, ConfigError> {
        let cfg: Config = toml::from_str(src).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of_offset(src, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate().map_err(|(table, key, message)| ConfigError {
            line: line_of_key(src, table, key),
            message: if table.is_empty() { format!("{key}: {message}") } else { format!("{table}.{key}: {message}") },
        })?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), (&'static str, &'static str, String)> {
        let n = &self.norms;
        if n.samples == 0 || n.pairs == 0 || n.dim == 0 {
            return Err(("norms", "samples", "sample counts and dim must be positive".into()));
        }
        if n.sigma_m < 2 {
            return Err(("norms", "sigma_m", "must be at least 2".into()));
        }
        let k = &self.ktau;
        if k.profile.len() != k.model.m {
            return Err(("ktau", "profile", format!("profile has {} entries, model arity is {}", k.profile.len(), k.model.m)));
        }
        for f in &k.profile {
            f.validate().map_err(|e| ("ktau", "profile", e.to_string()))?;
        }
        k.model.build().map_err(|e| ("ktau", "model", e.to_string()))?;
        if !(k.dilation > 0.0) {
            return Err(("ktau", "dilation", "must be positive".into()));
        }
        if !sums_to_one(&k.certificate_p) {
            return Err(("ktau", "certificate_p", "exponents must exceed 1 with reciprocals summing to 1".into()));
        }
        if k.certificate_grids.len() < 2 {
            return Err(("ktau", "certificate_grids", "need at least two grid sizes".into()));
        }
        let c = &self.cubes;
        if !sums_to_one(&c.p) {
            return Err(("cubes", "p", "exponents must exceed 1 with reciprocals summing to 1".into()));
        }
        if c.m_params.is_empty() || c.m_params.contains(&0) {
            return Err(("cubes", "m_params", "need positive parameters".into()));
        }
        if !(c.cantor_ratio > 0.0 && c.cantor_ratio < 0.5) {
            return Err(("cubes", "cantor_ratio", "must lie in (0, 1/2)".into()));
        }
        if !(c.trend_ratio > 0.0 && c.trend_ratio < 0.5) {
            return Err(("cubes", "trend_ratio", "must lie in (0, 1/2)".into()));
        }
        if c.trend_depths[0] >= c.trend_depths[1] {
            return Err(("cubes", "trend_depths", "first depth must be the shallower one".into()));
        }
        let kc = &self.kernels;
        for p in &kc.exponents {
            if !sums_to_one(p) {
                return Err(("kernels", "exponents", format!("{p:?}: exponents must exceed 1 with reciprocals summing to 1")));
            }
        }
        if kc.decay_window[1] < kc.decay_window[0] + 15 || kc.decay_window[0] == 0 {
            return Err(("kernels", "decay_window", "window must start at 1 or later and hold at least 16 entries".into()));
        }
        if kc.decay_grid * kc.decay_grid < kc.decay_window[1] {
            return Err(("kernels", "decay_grid", "grid too small for the fit window".into()));
        }
        let b = &self.blocks;
        if !sums_to_one(&b.p) {
            return Err(("blocks", "p", "exponents must exceed 1 with reciprocals summing to 1".into()));
        }
        if b.levels[0] > b.levels[1] {
            return Err(("blocks", "levels", "empty level range".into()));
        }
        if !(b.scaling_h > 0.0) {
            return Err(("blocks", "scaling_h", "must be positive".into()));
        }
        let f = &self.fourier;
        for p in &f.annulus_exponents {
            if p.len() != 2 || p.iter().any(|&q| !(q > 1.0)) {
                return Err(("fourier", "annulus_exponents", format!("{p:?}: need two exponents above 1")));
            }
        }
        for (key, res, cut) in [
            ("resolution", f.resolution, f.cutoff),
            ("line_resolution", f.line_resolution, f.line_cutoff),
            ("annulus_resolution", f.annulus_resolution, f.annulus_cutoff),
        ] {
            if res < 4 * cut {
                return Err(("fourier", key, format!("resolution {res} below 4 x cutoff {cut}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.kernels.decay_grid, 48);
    }

    #[test]
    fn defaults_round_trip() {
        let text = toml::to_string(&Config::default()).unwrap();
        let back = Config::parse(&text).unwrap();
        assert_eq!(toml::to_string(&back).unwrap(), text);
    }

    #[test]
    fn syntax_error_has_line() {
        let e = Config::parse("seed = 3\n[norms]\nsamples = = 4\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn unknown_key_has_line() {
        let e = Config::parse("seed = 3\n\n[kernels]\nwidth = 4\n").unwrap_err();
        assert_eq!(e.line, Some(4));
    }

    #[test]
    fn semantic_error_has_line() {
        let e = Config::parse("[norms]\ndim = 4\n\n[blocks]\ngrid = 64\np = [2.0, 3.0]\n").unwrap_err();
        assert_eq!(e.line, Some(6));
        assert!(e.to_string().contains("blocks.p"));
    }
}

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use gaci_core::{CountryId, GaciError, HcType, NormalizationSpec};

use crate::args::Cli;

/// Environment variable consulted for the default input directory when
/// neither `--fixtures` nor a config-file entry names one.
pub const FIXTURE_DIR_VAR: &str = "GACI_FIXTURE_DIR";

const CONFIG_KEYS: &[&str] = &[
    "fixtures",
    "out",
    "norm-lo",
    "norm-hi",
    "epsilon",
    "alpha",
    "hc",
    "base-country",
    "format",
];

/// Which renderings of the region report to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Md,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn md(self) -> bool {
        matches!(self, Format::Md | Format::Both)
    }
}

/// How a run failed, for exit-code purposes: `Usage` is a bad
/// invocation (malformed flags or settings), `Data` is anything the
/// pipeline itself rejected.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(GaciError),
}

impl From<GaciError> for CliError {
    fn from(e: GaciError) -> Self {
        CliError::Data(e)
    }
}

/// Fully resolved run settings. Precedence per setting: command-line
/// flag, then config-file entry, then (for the fixture directory only)
/// `GACI_FIXTURE_DIR`, then the built-in default.
#[derive(Debug)]
pub struct RunConfig {
    pub fixtures: PathBuf,
    pub out: PathBuf,
    pub spec: NormalizationSpec,
    pub alpha: f64,
    pub hc: HcType,
    pub base_country: Option<CountryId>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
        let file = match &cli.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };

        let fixtures = cli
            .fixtures
            .clone()
            .or_else(|| file.get("fixtures").map(PathBuf::from))
            .or_else(|| env::var_os(FIXTURE_DIR_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("fixtures"));
        let out = cli
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));

        let lo = pick_number(cli.norm_lo, &file, "norm-lo")?.unwrap_or(0.0);
        let hi = pick_number(cli.norm_hi, &file, "norm-hi")?.unwrap_or(100.0);
        let epsilon = pick_number(cli.epsilon, &file, "epsilon")?.unwrap_or(1e-9);
        let alpha = pick_number(cli.alpha, &file, "alpha")?.unwrap_or(0.05);

        if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo >= hi {
            return Err(CliError::Usage(format!(
                "normalization range must satisfy 0 <= lo < hi <= 100 (got [{lo}, {hi}])"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::Usage(format!(
                "alpha must lie strictly between 0 and 1 (got {alpha})"
            )));
        }
        let spec =
            NormalizationSpec::new(lo, hi, epsilon).map_err(|e| CliError::Usage(e.to_string()))?;

        let hc = match pick_text(&cli.hc, &file, "hc") {
            Some(raw) => raw
                .parse::<HcType>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            None => HcType::Hc1,
        };
        let base_country = pick_text(&cli.base_country, &file, "base-country")
            .map(|name| CountryId::new(&name))
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let format = match pick_text(&cli.format, &file, "format").as_deref() {
            None | Some("both") => Format::Both,
            Some("csv") => Format::Csv,
            Some("md") => Format::Md,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "format must be csv, md, or both (got `{other}`)"
                )));
            }
        };

        Ok(RunConfig {
            fixtures,
            out,
            spec,
            alpha,
            hc,
            base_country,
            format,
        })
    }

    /// Resolve an input path: the explicit flag if given, otherwise the
    /// named file inside the fixture directory.
    pub fn input(&self, flag: &Option<PathBuf>, default_name: &str) -> PathBuf {
        flag.clone()
            .unwrap_or_else(|| self.fixtures.join(default_name))
    }

    /// Like [`RunConfig::input`], but when the flag is absent the default
    /// is used only if the file actually exists. An explicit flag is
    /// always honored so a typo surfaces as a load error instead of a
    /// silently skipped step.
    pub fn optional_input(&self, flag: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
        match flag {
            Some(path) => Some(path.clone()),
            None => {
                let path = self.fixtures.join(default_name);
                path.is_file().then_some(path)
            }
        }
    }

    /// Path for an output file, creating the output directory on first
    /// use.
    pub fn out_file(&self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.out).map_err(|source| GaciError::Io {
            path: self.out.display().to_string(),
            source,
        })?;
        Ok(self.out.join(name))
    }
}

fn pick_number(
    flag: Option<f64>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<f64>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => raw.parse::<f64>().map(Some).map_err(|_| {
            CliError::Usage(format!(
                "configuration key `{key}`: `{raw}` is not a number"
            ))
        }),
        None => Ok(None),
    }
}

fn pick_text(flag: &Option<String>, file: &BTreeMap<String, String>, key: &str) -> Option<String> {
    flag.clone().or_else(|| file.get(key).cloned())
}

/// Parse a `key=value` settings file: one entry per line, `#` comments
/// and blank lines ignored. Unknown keys are rejected so a typo cannot
/// be skipped silently.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| GaciError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown configuration key `{key}`",
                path.display(),
                idx + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

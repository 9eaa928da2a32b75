//! Command-line flags and the TOML file that mirrors them.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::parse::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Quantize,
    VerifyLemma,
    VerifyTheorem,
    Ccr,
    CuntzCheck,
    BoundCheck,
    WnBracket,
    WnQuantize,
    Export,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Quantize => "quantize",
            Mode::VerifyLemma => "verify-lemma",
            Mode::VerifyTheorem => "verify-theorem",
            Mode::Ccr => "ccr",
            Mode::CuntzCheck => "cuntz-check",
            Mode::BoundCheck => "bound-check",
            Mode::WnBracket => "wn-bracket",
            Mode::WnQuantize => "wn-quantize",
            Mode::Export => "export",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightArg {
    /// `e^{-|x|^2}`
    Unnormalized,
    /// `(2 pi)^{-n} e^{-|x|^2/2}`
    StandardGaussian,
}

/// Every field is optional so that a config file and flags can be merged;
/// flags win.
#[derive(Clone, Debug, Default, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "cuntzq", version, about = "Quantize polynomial observables into Cuntz-algebra coefficient matrices and verify the quantization identities")]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Degrees of freedom of the phase space R^{2n}.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of basis elements.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub size: Option<usize>,
    /// Dimension of the truncated l^2(N).
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub dim: Option<u64>,
    /// Number of materialized Cuntz generators.
    #[arg(long)]
    pub d: Option<usize>,
    /// White-noise modes.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub modes: Option<usize>,
    /// Chaos order cap.
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub cap: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Exponent m of phi(x) = x^m in the von Neumann rule.
    #[arg(long)]
    pub phi_degree: Option<u32>,
    /// Bracket weights, comma separated; a single value is used for every mode.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// 0-based basis index for bound-check.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub weight: Option<WeightArg>,
    /// Run the checks in f64 instead of exact arithmetic.
    #[arg(long)]
    #[serde(default)]
    pub float: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($a:ident, $b:ident; $($field:ident),*) => {
        Settings {
            $($field: $a.$field.or($b.$field),)*
            float: $a.float || $b.float,
            config: $a.config.or($b.config),
        }
    };
}

impl Settings {
    /// `self` wins over `file`.
    pub fn over(self, file: Settings) -> Settings {
        let cli = self;
        prefer!(cli, file; mode, n, size, dim, d, modes, cap, f, g, h, phi_degree, lambda, k, seed, out, weight)
    }

    pub fn from_toml(text: &str) -> Result<Settings, ParseError> {
        toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            let (line, column) = line_col(text, offset);
            ParseError {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Settings, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Settings::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

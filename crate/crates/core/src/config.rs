//! Flat `key = value` run configuration.
//!
//! ```text
//! n_cavities = 2
//! emitters_per_cavity = 2
//! g_ghz = 5.0
//! j_over_g = 0.1
//! kappa_ghz = 10.0
//! gamma_ghz = 0.1724137931
//! delta_mode = "units_of_g_sqrt_m"
//! delta_value = 0.25
//! boundary = "open"
//! seed = 7
//! ```
//!
//! Rates are quoted as `rate / 2π` in GHz and stored in rad/ns. Missing keys
//! take the default rates.

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::model::{
    angular_to_ghz, ghz_to_angular, Boundary, DeltaSpec, SystemParams, DEFAULT_GAMMA_GHZ,
    DEFAULT_G_GHZ, DEFAULT_J_OVER_G, DEFAULT_KAPPA_GHZ,
};

pub const CONFIG_KEYS: &[&str] = &[
    "n_cavities",
    "emitters_per_cavity",
    "g_ghz",
    "j_over_g",
    "kappa_ghz",
    "gamma_ghz",
    "omega_c_ghz",
    "delta_mode",
    "delta_value",
    "boundary",
    "seed",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_cavities: Option<Spanned<i64>>,
    emitters_per_cavity: Option<Spanned<i64>>,
    g_ghz: Option<Spanned<f64>>,
    j_over_g: Option<Spanned<f64>>,
    kappa_ghz: Option<Spanned<f64>>,
    gamma_ghz: Option<Spanned<f64>>,
    omega_c_ghz: Option<Spanned<f64>>,
    delta_mode: Option<Spanned<String>>,
    delta_value: Option<Spanned<f64>>,
    boundary: Option<Spanned<String>>,
    seed: Option<Spanned<i64>>,
}

/// A parsed configuration: the array, how its disorder was specified, and
/// the seed of its disorder draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub delta: DeltaSpec,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SystemParams::new(2, 2),
            delta: DeltaSpec::AbsoluteGhz { value: 0.0 },
            seed: 0,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Located<'a> {
    text: &'a str,
}

impl Located<'_> {
    fn err<T>(&self, key: &str, span: std::ops::Range<usize>, reason: impl Into<String>) -> Result<T> {
        Err(Error::Config {
            key: key.to_string(),
            line: line_of(self.text, span.start),
            reason: reason.into(),
        })
    }

    fn count(&self, key: &str, v: &Spanned<i64>, min: i64) -> Result<usize> {
        let value = *v.get_ref();
        if value < min {
            return self.err(key, v.span(), format!("must be at least {min}, got {value}"));
        }
        Ok(value as usize)
    }

    fn rate(&self, key: &str, v: &Spanned<f64>, non_negative: bool) -> Result<f64> {
        let value = *v.get_ref();
        if !value.is_finite() {
            return self.err(key, v.span(), format!("must be finite, got {value}"));
        }
        if non_negative && value < 0.0 {
            return self.err(key, v.span(), format!("must be non-negative, got {value}"));
        }
        Ok(value)
    }
}

/// Turns a TOML error into a key/line diagnostic where the span allows it.
fn syntax_error(text: &str, e: toml::de::Error) -> Error {
    let message = e.message().to_string();
    match e.span() {
        Some(span) => {
            let line = line_of(text, span.start);
            let source_line = text.lines().nth(line - 1).unwrap_or("");
            let key = source_line
                .split('=')
                .next()
                .map(str::trim)
                .filter(|k| !k.is_empty())
                .unwrap_or("?")
                .to_string();
            Error::Config {
                key,
                line,
                reason: message,
            }
        }
        None => Error::ConfigSyntax(message),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| syntax_error(text, e))?;
        let at = Located { text };

        let n_cavities = match &raw.n_cavities {
            Some(v) => at.count("n_cavities", v, 1)?,
            None => 2,
        };
        let emitters = match &raw.emitters_per_cavity {
            Some(v) => at.count("emitters_per_cavity", v, 0)?,
            None => 2,
        };
        let mut params = SystemParams::new(n_cavities, emitters);
        let g_ghz = match &raw.g_ghz {
            Some(v) => at.rate("g_ghz", v, true)?,
            None => DEFAULT_G_GHZ,
        };
        params.g = ghz_to_angular(g_ghz);
        let j_over_g = match &raw.j_over_g {
            Some(v) => at.rate("j_over_g", v, false)?,
            None => DEFAULT_J_OVER_G,
        };
        params.j_hop = j_over_g * params.g;
        params.kappa = ghz_to_angular(match &raw.kappa_ghz {
            Some(v) => at.rate("kappa_ghz", v, true)?,
            None => DEFAULT_KAPPA_GHZ,
        });
        params.gamma = ghz_to_angular(match &raw.gamma_ghz {
            Some(v) => at.rate("gamma_ghz", v, true)?,
            None => DEFAULT_GAMMA_GHZ,
        });
        if let Some(v) = &raw.omega_c_ghz {
            params.omega_c = ghz_to_angular(at.rate("omega_c_ghz", v, false)?);
        }
        if let Some(v) = &raw.boundary {
            params.boundary = match v.get_ref().parse::<Boundary>() {
                Ok(b) => b,
                Err(reason) => return at.err("boundary", v.span(), reason),
            };
        }

        let delta_value = match &raw.delta_value {
            Some(v) => at.rate("delta_value", v, true)?,
            None => 0.0,
        };
        let delta = match raw.delta_mode.as_ref().map(|m| (m.get_ref().as_str(), m.span())) {
            None | Some(("absolute_ghz", _)) => DeltaSpec::AbsoluteGhz { value: delta_value },
            Some(("units_of_g_sqrt_m", _)) => DeltaSpec::collective(delta_value),
            Some((other, span)) => {
                return at.err(
                    "delta_mode",
                    span,
                    format!("expected `absolute_ghz` or `units_of_g_sqrt_m`, got `{other}`"),
                )
            }
        };
        params.delta = delta.resolve(params.g, params.emitters_per_cavity);

        let seed = match &raw.seed {
            Some(v) => at.count("seed", v, 0)? as u64,
            None => 0,
        };
        params.validate()?;
        Ok(RunConfig {
            params,
            delta,
            seed,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the configuration back in the file format, rates in GHz.
    pub fn to_config_text(&self) -> String {
        let p = &self.params;
        let (mode, value) = match self.delta {
            DeltaSpec::AbsoluteGhz { value } => ("absolute_ghz", value),
            DeltaSpec::UnitsOfGSqrtM { value, .. } => ("units_of_g_sqrt_m", value),
        };
        format!(
            "n_cavities = {}\nemitters_per_cavity = {}\ng_ghz = {:?}\nj_over_g = {:?}\n\
             kappa_ghz = {:?}\ngamma_ghz = {:?}\nomega_c_ghz = {:?}\ndelta_mode = \"{}\"\n\
             delta_value = {:?}\nboundary = \"{}\"\nseed = {}\n",
            p.n_cavities,
            p.emitters_per_cavity,
            angular_to_ghz(p.g),
            p.j_over_g(),
            angular_to_ghz(p.kappa),
            angular_to_ghz(p.gamma),
            angular_to_ghz(p.omega_c),
            mode,
            value,
            p.boundary,
            self.seed,
        )
    }
}

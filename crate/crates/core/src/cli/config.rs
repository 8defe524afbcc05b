use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::experiment::{linspace, Geometry, SourceParams};
use crate::stochastic::{ChoicePolicy, ChoiceRule, ChoiceTime, MonteCarloSetup};

/// Detector-choice rule as written on the command line and in config files:
/// `always-screen`, `always-telescope`, `random` or `random:<p_screen>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PolicySpec(pub ChoiceRule);

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rule = match s {
            "always-screen" | "screen" => ChoiceRule::AlwaysScreen,
            "always-telescope" | "telescope" => ChoiceRule::AlwaysTelescope,
            "random" => ChoiceRule::RandomPerEvent { p_screen: 0.5 },
            _ => {
                let p = s
                    .strip_prefix("random:")
                    .ok_or_else(|| format!("unknown policy '{s}'"))?
                    .parse::<f64>()
                    .map_err(|e| format!("bad p_screen in '{s}': {e}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("p_screen {p} outside [0, 1]"));
                }
                ChoiceRule::RandomPerEvent { p_screen: p }
            }
        };
        Ok(PolicySpec(rule))
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ChoiceRule::AlwaysScreen => write!(f, "always-screen"),
            ChoiceRule::AlwaysTelescope => write!(f, "always-telescope"),
            ChoiceRule::RandomPerEvent { p_screen } => write!(f, "random:{p_screen}"),
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

pub(crate) fn parse_choice_time(s: &str) -> Result<ChoiceTime, String> {
    match s {
        "before" | "before-slit" => Ok(ChoiceTime::BeforeSlit),
        "after" | "after-slit" => Ok(ChoiceTime::AfterSlit),
        _ => Err(format!("unknown choice time '{s}' (expected before|after)")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Slit separation (m).
    pub d: f64,
    /// Slit plane to detector plane (m).
    #[serde(rename = "L")]
    pub l: f64,
    /// Source to each slit (m).
    pub ds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub epsilon: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub grid: usize,
    pub bins: usize,
    pub events: u64,
    pub seed: u64,
    pub policy: PolicySpec,
    pub choice_time: ChoiceTime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 0.5e-3,
            l: 1.0,
            ds: 1.0,
            wavelength: Some(633e-9),
            k: None,
            epsilon: 0.1,
            phi_a: 0.0,
            phi_b: 0.0,
            xmin: -5e-3,
            xmax: 5e-3,
            grid: 1001,
            bins: 50,
            events: 100_000,
            seed: 1,
            policy: PolicySpec(ChoiceRule::RandomPerEvent { p_screen: 0.5 }),
            choice_time: ChoiceTime::AfterSlit,
            format: None,
        }
    }
}

/// A partial configuration: one config file or one set of flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub d: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub ds: Option<f64>,
    pub wavelength: Option<f64>,
    pub k: Option<f64>,
    pub epsilon: Option<f64>,
    pub phi_a: Option<f64>,
    pub phi_b: Option<f64>,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub grid: Option<usize>,
    pub bins: Option<usize>,
    pub events: Option<u64>,
    pub seed: Option<u64>,
    pub policy: Option<PolicySpec>,
    pub choice_time: Option<ChoiceTime>,
    pub format: Option<OutputFormat>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

macro_rules! overlay {
    ($cfg:expr, $layer:expr, $($field:ident),*) => {
        $( if let Some(v) = $layer.$field { $cfg.$field = v; } )*
    };
}

impl RunConfig {
    /// Applies `layer` on top of `self`. Setting one of wavelength/k clears
    /// the other; setting both in one layer is an error.
    pub fn overlay(&mut self, layer: &ConfigLayer) -> Result<(), String> {
        match (layer.wavelength, layer.k) {
            (Some(_), Some(_)) => return Err("give either wavelength or k, not both".into()),
            (Some(w), None) => {
                self.wavelength = Some(w);
                self.k = None;
            }
            (None, Some(k)) => {
                self.k = Some(k);
                self.wavelength = None;
            }
            (None, None) => {}
        }
        overlay!(
            self, layer, d, l, ds, epsilon, phi_a, phi_b, xmin, xmax, grid, bins, events, seed,
            policy, choice_time
        );
        if layer.format.is_some() {
            self.format = layer.format;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.geometry()?;
        self.source()?;
        if self.grid < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        if !(self.xmin.is_finite() && self.xmax.is_finite() && self.xmin < self.xmax) {
            return Err(Error::invalid("need xmin < xmax"));
        }
        self.setup()?;
        self.policy()?;
        if self.events == 0 {
            return Err(Error::invalid("events must be at least 1"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<Geometry, Error> {
        match (self.wavelength, self.k) {
            (Some(w), None) => Geometry::from_wavelength(self.d, self.l, self.ds, w),
            (None, Some(k)) => Geometry::new(self.d, self.l, self.ds, k),
            _ => Err(Error::invalid("exactly one of wavelength and k must be set")),
        }
    }

    pub fn source(&self) -> Result<SourceParams, Error> {
        SourceParams::new(self.epsilon, self.phi_a, self.phi_b)
    }

    pub fn x_grid(&self) -> Vec<f64> {
        linspace(self.xmin, self.xmax, self.grid)
    }

    pub fn setup(&self) -> Result<MonteCarloSetup, Error> {
        MonteCarloSetup::new((self.xmin, self.xmax), self.bins)
    }

    pub fn policy(&self) -> Result<ChoicePolicy, Error> {
        ChoicePolicy::new(self.policy.0, self.choice_time)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_strings() {
        assert_eq!("always-screen".parse::<PolicySpec>().unwrap().0, ChoiceRule::AlwaysScreen);
        assert_eq!(
            "random:0.25".parse::<PolicySpec>().unwrap().0,
            ChoiceRule::RandomPerEvent { p_screen: 0.25 }
        );
        assert!("random:1.5".parse::<PolicySpec>().is_err());
        assert!("sometimes".parse::<PolicySpec>().is_err());
        let p = PolicySpec(ChoiceRule::RandomPerEvent { p_screen: 0.1 });
        assert_eq!(p.to_string().parse::<PolicySpec>().unwrap(), p);
    }

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let g = c.geometry().unwrap();
        assert!((g.wavenumber - 2.0 * std::f64::consts::PI / 633e-9).abs() < 1e-3);
    }

    #[test]
    fn overlay_wavelength_and_k() {
        let mut c = RunConfig::default();
        c.overlay(&ConfigLayer { k: Some(1e7), ..Default::default() }).unwrap();
        assert_eq!((c.wavelength, c.k), (None, Some(1e7)));
        c.overlay(&ConfigLayer { wavelength: Some(5e-7), ..Default::default() }).unwrap();
        assert_eq!((c.wavelength, c.k), (Some(5e-7), None));
        assert!(c
            .overlay(&ConfigLayer { wavelength: Some(5e-7), k: Some(1.0), ..Default::default() })
            .is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            phi_b: -1.25,
            policy: PolicySpec(ChoiceRule::AlwaysTelescope),
            format: Some(OutputFormat::Json),
            ..RunConfig::default()
        };
        let text = c.to_toml();
        let mut back = RunConfig::default();
        back.overlay(&ConfigLayer::from_toml(&text).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigLayer::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let c = RunConfig { grid: 1, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { xmin: 1.0, xmax: 0.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { d: -1.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { wavelength: None, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }
}

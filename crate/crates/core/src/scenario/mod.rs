//! Configuration-driven runs that reproduce each figure as CSV series and a
//! critical-point report.
//!
//! A config file is JSON with a single top-level `scenario` object:
//!
//! ```json
//! {
//!   "scenario": {
//!     "name": "custom",
//!     "family": "bell-diagonal-phase-phase",
//!     "params": { "c0": [-0.5, -0.3, -0.4], "gamma": [0.45, 0.15] },
//!     "window": { "start": 0.0, "end": 3.0, "points": 2000 },
//!     "measures": ["geometric", "info-numeric"]
//!   }
//! }
//! ```
//!
//! With `name` set to `fig1`..`fig5` every other field is optional and
//! overrides the built-in value; `params` are merged key by key.

mod emit;
mod run;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::collective::CollectiveParams;
use crate::qstate::{bell_diagonal, BellDiagonalParams};
use crate::{Error, Result};

pub use emit::{emit, events_csv, report_text, series_csv};
pub use run::{run, run_with, EventSource, ReportEvent, RunOptions, RunReport, SeriesRow};

pub const BUILTIN_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Geometric,
    InfoNumeric,
    InfoClosedForm,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Geometric => "geometric",
            Measure::InfoNumeric => "info-numeric",
            Measure::InfoClosedForm => "info-closed-form",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "geometric" => Ok(Measure::Geometric),
            "info-numeric" => Ok(Measure::InfoNumeric),
            "info-closed-form" => Ok(Measure::InfoClosedForm),
            other => Err(Error::InvalidField {
                field: "measures".into(),
                message: format!("unknown measure `{other}` (expected geometric, info-numeric, info-closed-form)"),
            }),
        }
    }
}

/// Bell-diagonal start with Markovian rates `γ = (γ₁, γ₂)` in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovParams {
    pub c0: [f64; 3],
    pub gamma: [f64; 2],
}

/// Bell-diagonal start under colored noise on each qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredParams {
    pub c0: [f64; 3],
    pub a: [f64; 2],
    /// Memory times in seconds; the time axis is `υ = t/(2τ₁)`.
    pub tau: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectiveScenarioParams {
    pub alpha: f64,
    pub gamma: f64,
    /// Interatomic distance in wavelengths.
    pub r12: f64,
    #[serde(default)]
    pub omega: f64,
}

impl CollectiveScenarioParams {
    pub fn to_params(&self) -> Result<CollectiveParams> {
        CollectiveParams::new(self.alpha, self.gamma, self.r12, self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    /// Phase damping on A, bit flip on B.
    BellDiagonalPhaseBitflip(MarkovParams),
    /// Phase damping on both qubits.
    BellDiagonalPhasePhase(MarkovParams),
    /// Colored-noise phase flip on A, bit flip on B.
    BellDiagonalColored(ColoredParams),
    /// Amplitude damping on both qubits from a Bell-diagonal start.
    AmplitudeDamping(MarkovParams),
    /// Two atoms in a common vacuum.
    Collective(CollectiveScenarioParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::BellDiagonalPhaseBitflip(_) => "bell-diagonal-phase-bitflip",
            Family::BellDiagonalPhasePhase(_) => "bell-diagonal-phase-phase",
            Family::BellDiagonalColored(_) => "bell-diagonal-colored",
            Family::AmplitudeDamping(_) => "amplitude-damping",
            Family::Collective(_) => "collective",
        }
    }

    /// Unit of the scenario time axis.
    pub fn time_axis(&self) -> &'static str {
        match self {
            Family::BellDiagonalColored(_) => "upsilon = t/(2 tau_A), dimensionless",
            Family::Collective(_) => "upsilon = gamma t, dimensionless",
            _ => "t in seconds",
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |field: &str, message: String| Error::InvalidField {
            field: format!("params.{field}"),
            message,
        };
        let check_c0 = |c0: [f64; 3]| -> Result<()> {
            bell_diagonal(BellDiagonalParams::from_array(c0))
                .map(|_| ())
                .map_err(|e| {
                    let flipped = c0.map(|c| -c.abs());
                    let hint = if BellDiagonalParams::from_array(flipped).is_physical() {
                        format!("; the same magnitudes are admissible as {flipped:?}")
                    } else {
                        String::new()
                    };
                    bad("c0", format!("{e}{hint}"))
                })
        };
        let check_rates = |g: [f64; 2]| -> Result<()> {
            if g.iter().all(|x| *x >= 0.0 && x.is_finite()) {
                Ok(())
            } else {
                Err(bad("gamma", format!("rates {g:?} must be finite and >= 0")))
            }
        };
        match *self {
            Family::BellDiagonalPhaseBitflip(p) | Family::BellDiagonalPhasePhase(p) | Family::AmplitudeDamping(p) => {
                check_c0(p.c0)?;
                check_rates(p.gamma)
            }
            Family::BellDiagonalColored(p) => {
                check_c0(p.c0)?;
                if !p.a.iter().all(|x| *x >= 0.0 && x.is_finite()) {
                    return Err(bad("a", format!("{:?} must be finite and >= 0", p.a)));
                }
                if !p.tau.iter().all(|x| *x > 0.0 && x.is_finite()) {
                    return Err(bad("tau", format!("{:?} must be finite and > 0", p.tau)));
                }
                Ok(())
            }
            Family::Collective(p) => p.to_params().map(|_| ()).map_err(|e| bad("collective", e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Window {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Window { start, end, points }
    }

    fn check(&self) -> Result<()> {
        if !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidField {
                field: "window".into(),
                message: format!("need start < end, got ({}, {})", self.start, self.end),
            });
        }
        if self.points < 2 {
            return Err(Error::InvalidField {
                field: "window.points".into(),
                message: format!("need at least 2 points, got {}", self.points),
            });
        }
        Ok(())
    }

    /// Uniform grid with both ends included.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.end
                } else {
                    self.start + (self.end - self.start) * (k as f64 / n as f64)
                }
            })
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub family: Family,
    pub window: Window,
    pub measures: Vec<Measure>,
    /// Parameters that have no published value and were filled with
    /// documented defaults.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub placeholders: Vec<String>,
}

impl Scenario {
    pub fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }

    pub fn check(&self) -> Result<()> {
        self.family.check()?;
        self.window.check()?;
        if self.measures.is_empty() {
            return Err(Error::InvalidField {
                field: "measures".into(),
                message: "at least one measure is required".into(),
            });
        }
        if matches!(self.family, Family::Collective(_)) && self.window.start < 0.0 {
            return Err(Error::InvalidField {
                field: "window.start".into(),
                message: "the collective solution starts at t = 0".into(),
            });
        }
        Ok(())
    }

    /// Warnings to surface when placeholders are in use.
    pub fn placeholder_warning(&self) -> Option<String> {
        if self.placeholders.is_empty() {
            None
        } else {
            Some(format!(
                "{}: placeholder defaults in use for {}; override them in a config file",
                self.name,
                self.placeholders.join(", ")
            ))
        }
    }

    /// Reference values from the figure captions, reported but not asserted.
    pub fn reference_annotations(&self) -> Vec<String> {
        match self.name.as_str() {
            "fig1" => vec![
                "sudden changes at about t = 5.3362 s and t = 20.2733 s".into(),
                "plot scaling: the figure shows doubled geometric discord; data here are unscaled".into(),
            ],
            "fig2" => vec![
                "sudden change at about t = 0.3719 s".into(),
                "plot scaling: the figure shows one-quarter of the information discord; data here are unscaled".into(),
            ],
            "fig3" => vec![
                "critical points near t = 0.732 s and t = 0.542 s (generating parameters unstated; reference only)"
                    .into(),
                "plot scaling: the figure shows one-quarter of the information discord; data here are unscaled".into(),
            ],
            "fig4" => vec![
                "sudden changes near upsilon = 0.055, 0.185, 0.317 (initial state unstated; reference only)".into(),
                "plot scaling: the figure shows one-quarter of the information discord; data here are unscaled".into(),
            ],
            "fig5" => vec![
                "geometric sudden changes at about upsilon = 0.25 and 0.89".into(),
                "information discord s-branch crossing at about upsilon = 1.65".into(),
            ],
            _ => Vec::new(),
        }
    }
}

fn builtin_parts(name: &str) -> Option<(Family, Window, Vec<Measure>, Vec<&'static str>)> {
    use Measure::*;
    let info = vec![Geometric, InfoNumeric];
    Some(match name {
        "fig1" => (
            Family::BellDiagonalPhaseBitflip(MarkovParams {
                c0: [0.12, 0.13, 0.08],
                gamma: [0.035, 0.015],
            }),
            Window::new(0.0, 40.0, 2000),
            info,
            vec![],
        ),
        "fig2" => (
            Family::BellDiagonalPhasePhase(MarkovParams {
                c0: [-0.5, -0.3, -0.4],
                gamma: [0.45, 0.15],
            }),
            Window::new(0.0, 3.0, 2000),
            info,
            vec![],
        ),
        "fig3" => (
            Family::AmplitudeDamping(MarkovParams {
                c0: [0.41, 0.53, -0.57],
                gamma: [1.0, 1.0],
            }),
            Window::new(0.0, 2.0, 2000),
            info,
            vec!["c0", "gamma"],
        ),
        "fig4" => (
            Family::BellDiagonalColored(ColoredParams {
                c0: [-0.5, -0.3, -0.4],
                a: [2.0 / 3.0, 1.0 / 3.0],
                tau: [5.0, 5.0],
            }),
            Window::new(0.0, 0.5, 2000),
            info,
            vec!["c0"],
        ),
        "fig5" => (
            Family::Collective(CollectiveScenarioParams {
                alpha: 0.9f64.sqrt(),
                gamma: 1.0,
                r12: 0.6737,
                omega: 0.0,
            }),
            Window::new(0.0, 3.0, 2000),
            vec![Geometric, InfoNumeric, InfoClosedForm],
            vec![],
        ),
        _ => return None,
    })
}

/// Built-in scenario by name.
pub fn builtin(name: &str) -> Result<Scenario> {
    let (family, window, measures, placeholders) =
        builtin_parts(name).ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    Ok(Scenario {
        name: name.to_string(),
        family,
        window,
        measures,
        placeholders: placeholders.into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scenario: RawScenario,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    family: Option<String>,
    params: Option<Map<String, Value>>,
    window: Option<Window>,
    measures: Option<Vec<String>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a JSON scenario config.
pub fn parse_config(text: &str) -> Result<Scenario> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty config".into(),
        });
    }
    let raw: RawFile = serde_json::from_str(text).map_err(parse_error)?;
    let raw = raw.scenario;

    let base = builtin_parts(&raw.name);
    if base.is_none() && raw.name != "custom" {
        return Err(Error::InvalidField {
            field: "name".into(),
            message: format!("`{}` is not one of fig1..fig5 or custom", raw.name),
        });
    }

    let (family_name, mut params, window, measures, mut placeholders) = match base {
        Some((family, window, measures, placeholders)) => {
            let v = serde_json::to_value(family).expect("families serialise");
            let params = v["params"].as_object().cloned().unwrap_or_default();
            (
                family.name().to_string(),
                params,
                Some(window),
                Some(measures),
                placeholders,
            )
        }
        None => (String::new(), Map::new(), None, None, Vec::new()),
    };

    let family_name = match raw.family {
        Some(f) => {
            if !family_name.is_empty() && f != family_name {
                // a different family discards the built-in parameters
                params.clear();
                placeholders.clear();
            }
            f
        }
        None if !family_name.is_empty() => family_name,
        None => {
            return Err(Error::InvalidField {
                field: "family".into(),
                message: "required for custom scenarios".into(),
            })
        }
    };
    if let Some(user) = raw.params {
        for (k, v) in user {
            placeholders.retain(|p| *p != k.as_str());
            params.insert(k, v);
        }
    }
    let family: Family = serde_json::from_value(serde_json::json!({ "family": family_name, "params": params }))
        .map_err(|e| Error::InvalidField {
            field: "params".into(),
            message: format!("{family_name}: {e}"),
        })?;
    let window = raw.window.or(window).ok_or_else(|| Error::InvalidField {
        field: "window".into(),
        message: "required for custom scenarios".into(),
    })?;
    let measures = match raw.measures {
        Some(list) => list.iter().map(|s| Measure::parse(s)).collect::<Result<Vec<_>>>()?,
        None => measures.unwrap_or_else(|| vec![Measure::Geometric, Measure::InfoNumeric]),
    };

    let s = Scenario {
        name: raw.name,
        family,
        window,
        measures: dedup(measures),
        placeholders: placeholders.into_iter().map(String::from).collect(),
    };
    s.check()?;
    Ok(s)
}

fn dedup(mut m: Vec<Measure>) -> Vec<Measure> {
    m.sort();
    m.dedup();
    m
}

/// Built-in name or config text.
pub fn load_scenario(source: &str) -> Result<Scenario> {
    let trimmed = source.trim();
    if trimmed.starts_with('{') || trimmed.is_empty() {
        return parse_config(source);
    }
    let s = builtin(trimmed)?;
    s.check()?;
    Ok(s)
}

/// Parses a comma-separated measure list such as `geometric,info-numeric`.
pub fn parse_measures(list: &str) -> Result<Vec<Measure>> {
    let m = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Measure::parse)
        .collect::<Result<Vec<_>>>()?;
    if m.is_empty() {
        return Err(Error::InvalidField {
            field: "measures".into(),
            message: "empty list".into(),
        });
    }
    Ok(dedup(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_builtin() {
        let s = load_scenario("fig1").unwrap();
        assert_eq!(
            s.family,
            Family::BellDiagonalPhaseBitflip(MarkovParams {
                c0: [0.12, 0.13, 0.08],
                gamma: [0.035, 0.015]
            })
        );
        assert_eq!(s.window, Window::new(0.0, 40.0, 2000));
        assert!(s.placeholders.is_empty());
    }

    #[test]
    fn fig5_builtin() {
        let s = load_scenario("fig5").unwrap();
        match s.family {
            Family::Collective(p) => {
                assert_eq!(p.alpha, 0.9f64.sqrt());
                assert_eq!(p.r12, 0.6737);
            }
            _ => panic!("wrong family"),
        }
        assert_eq!(s.window, Window::new(0.0, 3.0, 2000));
    }

    #[test]
    fn placeholders_flagged() {
        assert_eq!(load_scenario("fig3").unwrap().placeholders, vec!["c0", "gamma"]);
        assert_eq!(load_scenario("fig4").unwrap().placeholders, vec!["c0"]);
        let s = load_scenario(r#"{"scenario":{"name":"fig4","params":{"c0":[0.6,-0.2,0.3]}}}"#).unwrap();
        assert!(s.placeholders.is_empty());
        match s.family {
            Family::BellDiagonalColored(p) => {
                assert_eq!(p.c0, [0.6, -0.2, 0.3]);
                assert_eq!(p.tau, [5.0, 5.0]);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn empty_config_is_parse_error() {
        assert!(matches!(load_scenario(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_config("   \n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_config("{\n  \"scenario\": {\n    \"name\": fig1\n  }\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load_scenario("fig9"), Err(Error::UnknownScenario(_))));
        assert!(parse_config(r#"{"scenario":{"name":"fig9"}}"#)
            .unwrap_err()
            .is_parse_error());
    }

    #[test]
    fn custom_requires_fields() {
        let e = parse_config(r#"{"scenario":{"name":"custom","family":"collective"}}"#).unwrap_err();
        assert!(
            matches!(e, Error::InvalidField { ref field, .. } if field == "params"),
            "{e}"
        );
        let e = parse_config(r#"{"scenario":{"name":"custom"}}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidField { ref field, .. } if field == "family"));
    }

    #[test]
    fn custom_round_trip() {
        let text = r#"{"scenario":{"name":"custom","family":"bell-diagonal-phase-phase",
            "params":{"c0":[-0.5,-0.3,-0.4],"gamma":[0.45,0.15]},
            "window":{"start":0,"end":3,"points":100},"measures":["geometric"]}}"#;
        let s = parse_config(text).unwrap();
        assert_eq!(s.measures, vec![Measure::Geometric]);
        assert_eq!(s.window.points, 100);
    }

    #[test]
    fn bad_window_and_measures() {
        let e = parse_config(r#"{"scenario":{"name":"fig1","window":{"start":1,"end":0,"points":10}}}"#).unwrap_err();
        assert!(e.is_parse_error());
        let e = parse_config(r#"{"scenario":{"name":"fig1","measures":["entropy"]}}"#).unwrap_err();
        assert!(e.is_parse_error());
        let e = parse_config(r#"{"scenario":{"name":"fig1","params":{"c0":[0.9,0.9,0.9]}}}"#).unwrap_err();
        assert!(e.is_parse_error());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = Window::new(0.0, 3.0, 2000).grid();
        assert_eq!(g.len(), 2000);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1999], 3.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}

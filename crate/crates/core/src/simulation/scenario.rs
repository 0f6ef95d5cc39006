//! Scenario definitions, the scenario file parser and the built-in figure
//! presets.
//!
//! A scenario file holds one `key = value` pair per line. `#` starts a
//! comment, blank lines are ignored and lists are comma separated:
//!
//! ```text
//! # weak signals at fixed ratio
//! preset  = fig4          # optional; later keys override it
//! p_list  = 40, 60, 80
//! gamma   = 0.5           # n = round(p / gamma)
//! lambda  = 12, 10, 8, 6, 6, 5, 4, 4
//! sigma2  = 1
//! trials  = 1000
//! seed    = 2024
//! methods = rmt, sns      # or `all`
//! ```
//!
//! The sweep axis follows from the keys present: `gamma` with `p` or
//! `p_list` sweeps `p` at a fixed ratio, a single `p` with an `n` list sweeps
//! `n`, and a single `p` with a single `n` is one point.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::estimators::{EstimatorConfig, Method};

/// Where the grid of a sweep lives.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Point { p: usize, n: usize },
    /// `p` varies, `n = round(p / gamma)`.
    FixedRatio { gamma: f64, p_values: Vec<usize> },
    /// `n` varies at fixed `p`.
    FixedDimension { p: usize, n_values: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    pub sweep_value: usize,
    pub p: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub axis: SweepAxis,
    pub signal_strengths: Vec<f64>,
    pub sigma2: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub config: EstimatorConfig,
}

impl ScenarioSpec {
    pub fn new(axis: SweepAxis, signal_strengths: Vec<f64>) -> Self {
        Self {
            axis,
            signal_strengths,
            sigma2: 1.0,
            trials: 3000,
            base_seed: 0,
            methods: Method::ALL.to_vec(),
            config: EstimatorConfig::default(),
        }
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        match &self.axis {
            SweepAxis::Point { p, n } => vec![SweepPoint { sweep_value: *p, p: *p, n: *n }],
            SweepAxis::FixedRatio { gamma, p_values } => p_values
                .iter()
                .map(|&p| SweepPoint {
                    sweep_value: p,
                    p,
                    n: (p as f64 / gamma).round() as usize,
                })
                .collect(),
            SweepAxis::FixedDimension { p, n_values } => n_values
                .iter()
                .map(|&n| SweepPoint { sweep_value: n, p: *p, n })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(invalid("no estimators requested"));
        }
        if self.signal_strengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(invalid("signal strengths must be positive"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(invalid("sigma2 must be positive"));
        }
        if let SweepAxis::FixedRatio { gamma, .. } = self.axis {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(invalid("gamma must be positive"));
            }
        }
        let points = self.points();
        if points.is_empty() {
            return Err(invalid("sweep has no points"));
        }
        for pt in points {
            if pt.p < 2 || pt.n < 2 {
                return Err(invalid(format!("need p >= 2 and n >= 2, got p = {}, n = {}", pt.p, pt.n)));
            }
            if self.signal_strengths.len() >= pt.p.min(pt.n) {
                return Err(invalid(format!(
                    "{} signals cannot be resolved with p = {}, n = {}",
                    self.signal_strengths.len(),
                    pt.p,
                    pt.n
                )));
            }
        }
        self.config.validate()
    }

    /// Parses a scenario file. Unknown keys fail with `Error::UnknownKey`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_scale(text, Scale::Desk)
    }

    /// As [`ScenarioSpec::parse`], resolving a `preset` key at `scale`.
    pub fn parse_with_scale(text: &str, scale: Scale) -> Result<Self> {
        let mut entries: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let canonical = KEYS
                .iter()
                .copied()
                .find(|k| *k == key)
                .ok_or_else(|| Error::UnknownKey(key.to_string()))?;
            if entries.insert(canonical, (line_no, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }

        let get = |k: &str| entries.get(k).map(|(l, v)| (*l, v.as_str()));
        let mut spec = match get("preset") {
            Some((line, name)) => preset(name, scale).map_err(|e| Error::Parse { line, message: e.to_string() })?,
            None => ScenarioSpec::new(SweepAxis::Point { p: 0, n: 0 }, Vec::new()),
        };
        let has_preset = get("preset").is_some();

        if let Some((line, v)) = get("lambda") {
            spec.signal_strengths = parse_list::<f64>(line, v)?;
        }
        if let Some((line, v)) = get("sigma2") {
            spec.sigma2 = parse_one(line, v)?;
        }
        if let Some((line, v)) = get("trials") {
            spec.trials = parse_one(line, v)?;
        }
        if let Some((line, v)) = get("seed") {
            spec.base_seed = parse_one(line, v)?;
        }
        if let Some((line, v)) = get("methods") {
            spec.methods = Method::parse_list(v).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        }

        let p_vals = match (get("p"), get("p_list")) {
            (Some((line, _)), Some(_)) => {
                return Err(Error::Parse { line, message: "give either `p` or `p_list`, not both".into() })
            }
            (Some((line, v)), None) => Some((line, vec![parse_one::<usize>(line, v)?])),
            (None, Some((line, v))) => Some((line, parse_list::<usize>(line, v)?)),
            (None, None) => None,
        };
        let n_vals = get("n").map(|(line, v)| parse_list::<usize>(line, v).map(|n| (line, n))).transpose()?;
        let gamma = get("gamma").map(|(line, v)| parse_one::<f64>(line, v).map(|g| (line, g))).transpose()?;

        if p_vals.is_some() || n_vals.is_some() || gamma.is_some() {
            spec.axis = resolve_axis(&spec.axis, p_vals, n_vals, gamma)?;
        } else if !has_preset {
            return Err(invalid("scenario needs `p`/`p_list` with `n` or `gamma`, or a `preset`"));
        }
        spec.validate()?;
        Ok(spec)
    }
}

const KEYS: [&str; 10] = ["p", "p_list", "n", "gamma", "lambda", "sigma2", "trials", "seed", "methods", "preset"];

fn parse_one<T: std::str::FromStr>(line: usize, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{v}`"),
    })
}

fn parse_list<T: std::str::FromStr>(line: usize, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(line, s))
        .collect()
}

type Keyed<T> = Option<(usize, T)>;

fn resolve_axis(base: &SweepAxis, p: Keyed<Vec<usize>>, n: Keyed<Vec<usize>>, gamma: Keyed<f64>) -> Result<SweepAxis> {
    let conflict = |line: usize, msg: &str| Error::Parse { line, message: msg.to_string() };
    // keys that are not given fall back to the preset's axis
    let base_p: Option<Vec<usize>> = match base {
        SweepAxis::Point { p, .. } if *p > 0 => Some(vec![*p]),
        SweepAxis::Point { .. } => None,
        SweepAxis::FixedRatio { p_values, .. } => Some(p_values.clone()),
        SweepAxis::FixedDimension { p, .. } => Some(vec![*p]),
    };
    match (p, n, gamma) {
        (_, Some(_), Some((line, _))) => Err(conflict(line, "give either `n` or `gamma`, not both")),
        (p, None, Some((line, g))) => {
            let p_values = p.map(|(_, v)| v).or(base_p).ok_or_else(|| conflict(line, "`gamma` needs `p` or `p_list`"))?;
            Ok(SweepAxis::FixedRatio { gamma: g, p_values })
        }
        (Some((line, pv)), None, None) => match base {
            SweepAxis::FixedRatio { gamma, .. } => Ok(SweepAxis::FixedRatio { gamma: *gamma, p_values: pv }),
            SweepAxis::FixedDimension { n_values, .. } if pv.len() == 1 => Ok(SweepAxis::FixedDimension {
                p: pv[0],
                n_values: n_values.clone(),
            }),
            SweepAxis::Point { n, .. } if pv.len() == 1 && *n > 0 => Ok(SweepAxis::Point { p: pv[0], n: *n }),
            _ => Err(conflict(line, "`p` needs `n` or `gamma`")),
        },
        (p, Some((line, nv)), None) => {
            let pv = p.map(|(_, v)| v).or(base_p).ok_or_else(|| conflict(line, "`n` needs `p`"))?;
            match (pv.as_slice(), nv.as_slice()) {
                ([p], [n]) => Ok(SweepAxis::Point { p: *p, n: *n }),
                ([p], _) => Ok(SweepAxis::FixedDimension { p: *p, n_values: nv }),
                _ => Err(conflict(line, "sweeping `p` needs `gamma`; an `n` list needs a single `p`")),
            }
        }
        (None, None, None) => Ok(base.clone()),
    }
}

/// Preset size: the first three grid points at 1000 trials, or the full
/// grid at 3000 trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Desk,
    Full,
}

struct PresetDef {
    name: &'static str,
    lambda: &'static [f64],
    axis: fn() -> SweepAxis,
}

fn p_range(from: usize, to: usize) -> Vec<usize> {
    (from..=to).step_by(20).collect()
}

/// Default `n` grid of the fixed-dimension presets (`p = 60`).
const N_GRID: [usize; 10] = [30, 60, 90, 120, 180, 240, 300, 400, 500, 600];

const PRESETS: [PresetDef; 11] = [
    PresetDef { name: "fig1", lambda: &[], axis: || SweepAxis::FixedRatio { gamma: 0.5, p_values: p_range(20, 200) } },
    PresetDef { name: "fig2", lambda: &[15.0], axis: || SweepAxis::FixedRatio { gamma: 0.5, p_values: p_range(20, 200) } },
    PresetDef {
        name: "fig3",
        lambda: &[20.0, 15.0, 12.0, 12.0, 10.0, 10.0, 10.0, 10.0],
        axis: || SweepAxis::FixedRatio { gamma: 0.5, p_values: p_range(20, 200) },
    },
    PresetDef {
        name: "fig4",
        lambda: &[12.0, 10.0, 8.0, 6.0, 6.0, 5.0, 4.0, 4.0],
        axis: || SweepAxis::FixedRatio { gamma: 0.5, p_values: p_range(40, 200) },
    },
    PresetDef { name: "fig5", lambda: &[], axis: || SweepAxis::FixedRatio { gamma: 2.0, p_values: p_range(20, 200) } },
    PresetDef { name: "fig6", lambda: &[20.0], axis: || SweepAxis::FixedRatio { gamma: 2.0, p_values: p_range(20, 200) } },
    PresetDef {
        name: "fig7",
        lambda: &[15.0, 15.0, 12.0, 12.0, 10.0, 10.0, 10.0, 8.0],
        axis: || SweepAxis::FixedRatio { gamma: 2.0, p_values: p_range(60, 300) },
    },
    PresetDef { name: "fig8", lambda: &[], axis: || SweepAxis::FixedDimension { p: 60, n_values: N_GRID.to_vec() } },
    PresetDef { name: "fig9", lambda: &[20.0], axis: || SweepAxis::FixedDimension { p: 60, n_values: N_GRID.to_vec() } },
    PresetDef {
        name: "fig10",
        lambda: &[40.0, 25.0, 20.0, 20.0, 15.0, 15.0, 12.0, 10.0],
        axis: || SweepAxis::FixedDimension { p: 60, n_values: N_GRID.to_vec() },
    },
    PresetDef {
        name: "fig11",
        lambda: &[15.0, 12.0, 10.0, 10.0, 8.0, 6.0, 5.0, 4.0, 4.0, 2.5],
        axis: || SweepAxis::FixedDimension { p: 60, n_values: N_GRID.to_vec() },
    },
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

/// Built-in figure scenario `fig1` .. `fig11`, all estimators, seed 0.
pub fn preset(name: &str, scale: Scale) -> Result<ScenarioSpec> {
    let def = PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name.trim()))
        .ok_or_else(|| invalid(format!("unknown preset `{name}` (expected fig1 .. fig11)")))?;
    let mut axis = (def.axis)();
    if scale == Scale::Desk {
        match &mut axis {
            SweepAxis::FixedRatio { p_values, .. } => p_values.truncate(3),
            SweepAxis::FixedDimension { n_values, .. } => n_values.truncate(3),
            SweepAxis::Point { .. } => {}
        }
    }
    let mut spec = ScenarioSpec::new(axis, def.lambda.to_vec());
    spec.trials = match scale {
        Scale::Desk => 1000,
        Scale::Full => 3000,
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_sweep_rounds_n() {
        let spec = ScenarioSpec::new(SweepAxis::FixedRatio { gamma: 2.0, p_values: vec![21, 40] }, vec![]);
        let pts = spec.points();
        assert_eq!((pts[0].p, pts[0].n), (21, 11));
        assert_eq!((pts[1].p, pts[1].n), (40, 20));
    }

    #[test]
    fn desk_presets_use_three_points() {
        let s = preset("fig4", Scale::Desk).unwrap();
        assert_eq!(s.trials, 1000);
        let ps: Vec<usize> = s.points().iter().map(|p| p.p).collect();
        assert_eq!(ps, vec![40, 60, 80]);
        assert_eq!(s.signal_strengths, vec![12.0, 10.0, 8.0, 6.0, 6.0, 5.0, 4.0, 4.0]);
        let full = preset("fig4", Scale::Full).unwrap();
        assert_eq!(full.trials, 3000);
        assert!(full.points().len() > 3);
        for name in preset_names() {
            preset(name, Scale::Full).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn parses_a_full_file() {
        let text = "# comment\np_list = 40, 60\ngamma = 0.5\nlambda = 5, 2 # two\ntrials = 7\nseed = 9\nmethods = rmt,sns\n";
        let s = ScenarioSpec::parse(text).unwrap();
        assert_eq!(s.axis, SweepAxis::FixedRatio { gamma: 0.5, p_values: vec![40, 60] });
        assert_eq!(s.signal_strengths, vec![5.0, 2.0]);
        assert_eq!((s.trials, s.base_seed), (7, 9));
        assert_eq!(s.methods, vec![Method::Rmt, Method::Sns]);
    }

    #[test]
    fn n_list_sweeps_at_fixed_p() {
        let s = ScenarioSpec::parse("p = 60\nn = 30, 60, 90\n").unwrap();
        assert_eq!(s.axis, SweepAxis::FixedDimension { p: 60, n_values: vec![30, 60, 90] });
        let s = ScenarioSpec::parse("p = 60\nn = 120\n").unwrap();
        assert_eq!(s.axis, SweepAxis::Point { p: 60, n: 120 });
    }

    #[test]
    fn preset_keys_can_be_overridden() {
        let s = ScenarioSpec::parse("preset = fig1\ntrials = 5\np_list = 20\n").unwrap();
        assert_eq!(s.trials, 5);
        assert_eq!(s.axis, SweepAxis::FixedRatio { gamma: 0.5, p_values: vec![20] });
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ScenarioSpec::parse("p = 4\nfoo = 1\n"), Err(Error::UnknownKey("foo".into())));
        assert!(matches!(ScenarioSpec::parse("p 4\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ScenarioSpec::parse("p = 4\nn = x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(ScenarioSpec::parse("p = 40\nn = 80\ngamma = 0.5\n").is_err());
        assert!(ScenarioSpec::parse("lambda = 3\n").is_err());
        assert!(ScenarioSpec::parse("p = 4\nn = 8\ntrials = 0\n").is_err());
        assert!(ScenarioSpec::parse("preset = fig12\n").is_err());
    }
}

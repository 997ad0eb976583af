use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Arrangement, ArrangementKind, Line, Orientation, Point};
use crate::piecewise::{PiecewiseMap, PiecewiseRule};
use crate::symbolic::{SymbolicMap, SymbolicRule};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub label: String,
    pub point: [f64; 2],
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub theta_deg: f64,
    pub orientation: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

/// A JSON system description. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub mode: Mode,
    pub lines: Vec<LineSpec>,
    pub rules: Vec<RuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<[f64; 2]>,
}

/// A validated, ready-to-run system.
#[derive(Debug, Clone)]
pub enum System {
    Symbolic(SymbolicMap),
    Piecewise(PiecewiseMap),
}

impl System {
    pub fn arrangement(&self) -> &Arrangement {
        match self {
            System::Symbolic(m) => m.arrangement(),
            System::Piecewise(m) => m.arrangement(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            System::Symbolic(m) => m.len(),
            System::Piecewise(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SystemConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.system()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn arrangement(&self) -> Result<Arrangement, ConfigError> {
        let mut lines = Vec::with_capacity(self.lines.len());
        for (i, l) in self.lines.iter().enumerate() {
            let field = format!("lines[{i}]");
            if l.label.is_empty() {
                return Err(invalid(format!("{field}.label"), "label is empty"));
            }
            if !l.point.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("{field}.point"), "coordinates must be finite"));
            }
            if !l.angle_deg.is_finite() {
                return Err(invalid(format!("{field}.angle_deg"), "angle must be finite"));
            }
            let p = Point::new(l.point[0], l.point[1]);
            let line = Line::from_point_angle(p, l.angle_deg.to_radians(), l.label.clone())
                .map_err(|e| invalid(&field, e.to_string()))?;
            lines.push(line);
        }
        let kind = match self.mode {
            Mode::Symbolic => ArrangementKind::Symbolic,
            Mode::Piecewise => ArrangementKind::Piecewise,
        };
        Arrangement::new(lines, kind).map_err(|e| invalid("lines", e.to_string()))
    }

    /// Validates the whole document and builds the map it describes.
    pub fn system(&self) -> Result<System, ConfigError> {
        let arr = self.arrangement()?;
        let mut checked = Vec::with_capacity(self.rules.len());
        for (i, r) in self.rules.iter().enumerate() {
            let field = format!("rules[{i}]");
            if !(r.theta_deg > 0.0 && r.theta_deg <= 90.0) {
                return Err(invalid(
                    format!("{field}.theta_deg"),
                    format!("{} is outside (0, 90]", r.theta_deg),
                ));
            }
            let o = Orientation::from_bit(r.orientation).ok_or_else(|| {
                invalid(format!("{field}.orientation"), "orientation must be 0 or 1")
            })?;
            checked.push((r.theta_deg.to_radians(), o));
        }
        match self.mode {
            Mode::Symbolic => {
                let mut rules = Vec::with_capacity(self.rules.len());
                for (i, (r, &(theta, o))) in self.rules.iter().zip(&checked).enumerate() {
                    if r.rank.is_some() {
                        return Err(invalid(
                            format!("rules[{i}].rank"),
                            "symbolic rules take a target, not a rank",
                        ));
                    }
                    let target = r.target.clone().ok_or_else(|| {
                        invalid(format!("rules[{i}].target"), "missing target label")
                    })?;
                    if arr.index_of(&target).is_none() {
                        return Err(invalid(
                            format!("rules[{i}].target"),
                            format!("unknown line label {target:?}"),
                        ));
                    }
                    rules.push(SymbolicRule::new(theta, o, target));
                }
                SymbolicMap::new(arr, rules)
                    .map(System::Symbolic)
                    .map_err(|e| invalid("rules", e.to_string()))
            }
            Mode::Piecewise => {
                let mut rules = Vec::with_capacity(self.rules.len());
                for (i, (r, &(theta, o))) in self.rules.iter().zip(&checked).enumerate() {
                    if r.target.is_some() {
                        return Err(invalid(
                            format!("rules[{i}].target"),
                            "piecewise rules take a rank, not a target",
                        ));
                    }
                    let rank = r
                        .rank
                        .ok_or_else(|| invalid(format!("rules[{i}].rank"), "missing rank"))?;
                    rules.push(PiecewiseRule::new(theta, o, rank));
                }
                PiecewiseMap::new(arr, rules)
                    .map(System::Piecewise)
                    .map_err(|e| invalid("rules", e.to_string()))
            }
        }
    }

    /// The configured start, or a point drawn from `seed` (default 0) on the
    /// line the first rule maps from.
    pub fn default_start(&self, system: &System) -> Point {
        if let Some([x, y]) = self.start {
            return Point::new(x, y);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
        let arr = system.arrangement();
        let line = match system {
            System::Symbolic(m) => m.induced_line(),
            System::Piecewise(_) => arr.line(rng.gen_range(0..arr.len())),
        };
        // stay near the vertices rather than at an arbitrary far point
        let center = arr
            .vertices()
            .iter()
            .map(|v| v.2)
            .fold(Point::new(0.0, 0.0), |a, b| a + b);
        let count = arr.vertices().len().max(1) as f64;
        let t0 = line.param_of(center * (1.0 / count));
        line.point_at(t0 + rng.gen_range(-1.0..1.0))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    SystemConfig::from_json(&text)
}

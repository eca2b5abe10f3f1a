//! JSON experiment configuration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{ExperimentLayout, ENDPOINT_TOLERANCE};
use crate::geometry::{
    LineCharge, MagneticMoment, Orientation, Point2, Polyline, DEFAULT_EXCLUSION_RADIUS,
    DEFAULT_NODES,
};

/// A configuration problem, located by its key path (`moments[2].sign`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config key `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub charge: ChargeConfig,
    pub sources: SourcesConfig,
    pub meetings: MeetingsConfig,
    pub moments: Vec<MomentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    pub numerics: NumericsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeConfig {
    pub lambda: f64,
    pub puncture: Point2,
    /// `+1` or `-1`.
    #[serde(default = "plus_one")]
    pub axis_sign: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcesConfig {
    pub c: Point2,
    pub d: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeetingsConfig {
    pub a: Point2,
    pub b: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentConfig {
    pub magnitude: f64,
    /// `+1` parallel to the line axis, `-1` antiparallel.
    #[serde(default = "plus_one")]
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub c_to_a: Vec<Point2>,
    pub c_to_b: Vec<Point2>,
    pub d_to_b: Vec<Point2>,
    pub d_to_a: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub locus_a: Vec<Point2>,
    pub locus_b: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_exclusion")]
    pub exclusion_radius: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            nodes: DEFAULT_NODES,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }
}

fn plus_one() -> i64 {
    1
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn default_exclusion() -> f64 {
    DEFAULT_EXCLUSION_RADIUS
}

impl ExperimentConfig {
    /// Parses and validates a configuration document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| ConfigError::new(e.path().to_string(), e.inner().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        finite("charge.lambda", self.charge.lambda)?;
        point("charge.puncture", self.charge.puncture)?;
        sign("charge.axis_sign", self.charge.axis_sign)?;
        point("sources.c", self.sources.c)?;
        point("sources.d", self.sources.d)?;
        point("meetings.a", self.meetings.a)?;
        point("meetings.b", self.meetings.b)?;
        if let Some(p) = self.meetings.a_prime {
            point("meetings.a_prime", p)?;
        }
        if let Some(p) = self.meetings.b_prime {
            point("meetings.b_prime", p)?;
        }
        if self.moments.len() != 4 {
            return Err(ConfigError::new(
                "moments",
                format!("expected 4 moments, got {}", self.moments.len()),
            ));
        }
        for (i, m) in self.moments.iter().enumerate() {
            let key = format!("moments[{i}].magnitude");
            finite(&key, m.magnitude)?;
            if m.magnitude < 0.0 {
                return Err(ConfigError::new(key, "must be non-negative"));
            }
            sign(&format!("moments[{i}].sign"), m.sign)?;
        }
        if let Some(paths) = &self.paths {
            let (c, d, a, b) = (
                self.sources.c,
                self.sources.d,
                self.meetings.a,
                self.meetings.b,
            );
            for (name, pts, start, end) in [
                ("c_to_a", &paths.c_to_a, c, a),
                ("c_to_b", &paths.c_to_b, c, b),
                ("d_to_b", &paths.d_to_b, d, b),
                ("d_to_a", &paths.d_to_a, d, a),
            ] {
                let key = format!("paths.{name}");
                for (i, p) in pts.iter().enumerate() {
                    point(&format!("{key}[{i}]"), *p)?;
                }
                let line = Polyline::new(pts.clone())
                    .map_err(|e| ConfigError::new(key.clone(), e.to_string()))?;
                if line.start().distance(start) > ENDPOINT_TOLERANCE
                    || line.end().distance(end) > ENDPOINT_TOLERANCE
                {
                    return Err(ConfigError::new(
                        key,
                        format!("must run from {start} to {end}"),
                    ));
                }
            }
        }
        if let Some(scan) = &self.scan {
            for (name, locus) in [("locus_a", &scan.locus_a), ("locus_b", &scan.locus_b)] {
                let key = format!("scan.{name}");
                if locus.len() < 2 {
                    return Err(ConfigError::new(key, "needs at least 2 candidate points"));
                }
                for (i, p) in locus.iter().enumerate() {
                    point(&format!("{key}[{i}]"), *p)?;
                }
            }
        }
        if self.numerics.nodes < 2 {
            return Err(ConfigError::new("numerics.nodes", "must be at least 2"));
        }
        finite("numerics.exclusion_radius", self.numerics.exclusion_radius)?;
        if self.numerics.exclusion_radius < 0.0 {
            return Err(ConfigError::new(
                "numerics.exclusion_radius",
                "must be non-negative",
            ));
        }
        Ok(())
    }

    /// Experiment layout of a validated configuration.
    pub fn layout(&self) -> ExperimentLayout {
        let orientation = |s: i64| {
            if s < 0 {
                Orientation::Antiparallel
            } else {
                Orientation::Parallel
            }
        };
        let moment = |m: &MomentConfig| MagneticMoment {
            magnitude: m.magnitude,
            orientation: orientation(m.sign),
        };
        let line = |pts: &Vec<Point2>| Polyline::new(pts.clone()).expect("validated path");
        ExperimentLayout {
            source_c: self.sources.c,
            source_d: self.sources.d,
            meeting_a: self.meetings.a,
            meeting_b: self.meetings.b,
            moments: [
                moment(&self.moments[0]),
                moment(&self.moments[1]),
                moment(&self.moments[2]),
                moment(&self.moments[3]),
            ],
            charge: LineCharge {
                lambda: self.charge.lambda,
                puncture: self.charge.puncture,
                axis: orientation(self.charge.axis_sign),
            },
            paths: self.paths.as_ref().map(|p| {
                [
                    line(&p.c_to_a),
                    line(&p.c_to_b),
                    line(&p.d_to_b),
                    line(&p.d_to_a),
                ]
            }),
            exclusion_radius: self.numerics.exclusion_radius,
        }
    }
}

fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be finite, got {v}")))
    }
}

fn point(key: &str, p: Point2) -> Result<(), ConfigError> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be finite, got {p}")))
    }
}

fn sign(key: &str, s: i64) -> Result<(), ConfigError> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be 1 or -1, got {s}")))
    }
}

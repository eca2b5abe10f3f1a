//! Planar geometry of a neutral particle moving around a line charge.
//!
//! The line charge pierces the motion plane at a single puncture point.
//! Units absorb every electromagnetic constant: a moment `μ` carried once
//! counterclockwise around a line of density `λ` picks up the phase `μλ`.
//! Along an open path the phase is `μλ/2π` times the swept angle.

mod quadrature;

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use quadrature::{ac_phase_quadrature, gauss_legendre, DEFAULT_NODES};

/// Distance under which a point is considered to sit on the puncture.
pub const SINGULAR_DISTANCE: f64 = 1e-12;
/// Quadrature refuses segments that come closer than this to the puncture.
pub const QUADRATURE_MIN_DISTANCE: f64 = 1e-6;
/// Default impenetrable radius around the line, in layout units.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;
/// Largest accepted gap between the first and last point of a closed path.
pub const CLOSURE_TOLERANCE: f64 = 1e-12;
/// Largest accepted distance of a swept angle from a whole number of turns.
pub const WINDING_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({x}, {y}) lies on the line charge")]
    Singularity { x: f64, y: f64 },
    #[error("segment {index} passes through the line charge")]
    SegmentThroughPuncture { index: usize },
    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("polyline point {0} is not finite")]
    NonFinitePoint(usize),
    #[error("polyline points {0} and {} coincide", .0 + 1)]
    RepeatedPoint(usize),
    #[error("path is not closed: endpoints {gap} apart")]
    NotClosed { gap: f64 },
    #[error("swept angle {swept} is {residual} away from a whole number of turns")]
    NumericalInconsistency { swept: f64, residual: f64 },
    #[error("segment {index} comes within {distance} of the line charge; quadrature would be inaccurate")]
    Accuracy { index: usize, distance: f64 },
    #[error("quadrature needs at least 2 nodes per segment, got {0}")]
    TooFewNodes(usize),
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("moment magnitude must be non-negative, got {0}")]
    NegativeMagnitude(f64),
}

/// A point or displacement in the motion plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Point2::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Orientation along the out-of-plane axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Along `+z`.
    Parallel,
    /// Along `−z`.
    Antiparallel,
}

impl Orientation {
    pub fn value(self) -> f64 {
        match self {
            Orientation::Parallel => 1.0,
            Orientation::Antiparallel => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Parallel => Orientation::Antiparallel,
            Orientation::Antiparallel => Orientation::Parallel,
        }
    }
}

/// Infinite, impenetrable line charge perpendicular to the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCharge {
    /// Charge per unit length.
    pub lambda: f64,
    pub puncture: Point2,
    pub axis: Orientation,
}

impl LineCharge {
    pub fn new(lambda: f64, puncture: Point2, axis: Orientation) -> Result<Self, GeometryError> {
        if !lambda.is_finite() {
            return Err(GeometryError::NonFinite {
                what: "lambda",
                value: lambda,
            });
        }
        if !puncture.is_finite() {
            return Err(GeometryError::NonFinite {
                what: "puncture",
                value: if puncture.x.is_finite() {
                    puncture.y
                } else {
                    puncture.x
                },
            });
        }
        Ok(LineCharge {
            lambda,
            puncture,
            axis,
        })
    }
}

/// Magnetic moment component along the line-charge axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticMoment {
    pub magnitude: f64,
    pub orientation: Orientation,
}

impl MagneticMoment {
    pub fn new(magnitude: f64, orientation: Orientation) -> Result<Self, GeometryError> {
        if !magnitude.is_finite() {
            return Err(GeometryError::NonFinite {
                what: "moment magnitude",
                value: magnitude,
            });
        }
        if magnitude < 0.0 {
            return Err(GeometryError::NegativeMagnitude(magnitude));
        }
        Ok(MagneticMoment {
            magnitude,
            orientation,
        })
    }

    pub fn parallel(magnitude: f64) -> Result<Self, GeometryError> {
        Self::new(magnitude, Orientation::Parallel)
    }

    /// Signed projection on `+z`.
    pub fn projection(&self) -> f64 {
        self.orientation.value() * self.magnitude
    }
}

/// Phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PhaseValue(f64);

impl PhaseValue {
    pub fn new(radians: f64) -> Result<Self, GeometryError> {
        if !radians.is_finite() {
            return Err(GeometryError::NonFinite {
                what: "phase",
                value: radians,
            });
        }
        Ok(PhaseValue(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl Sub for PhaseValue {
    type Output = PhaseValue;
    fn sub(self, o: PhaseValue) -> PhaseValue {
        PhaseValue(self.0 - o.0)
    }
}

impl Add for PhaseValue {
    type Output = PhaseValue;
    fn add(self, o: PhaseValue) -> PhaseValue {
        PhaseValue(self.0 + o.0)
    }
}

/// Piecewise-straight trajectory in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point2>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self, GeometryError> {
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints(points.len()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinitePoint(i));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(GeometryError::RepeatedPoint(i));
        }
        Ok(Polyline { points })
    }

    pub fn segment(a: Point2, b: Point2) -> Result<Self, GeometryError> {
        Self::new(vec![a, b])
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_closed(&self) -> bool {
        self.start().distance(self.end()) <= CLOSURE_TOLERANCE
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    /// `self` followed by `next`; the shared joint point is kept once.
    pub fn concat(&self, next: &Polyline) -> Result<Polyline, GeometryError> {
        let mut points = self.points.clone();
        let skip = usize::from(self.end() == next.start());
        points.extend_from_slice(&next.points[skip..]);
        Polyline::new(points)
    }
}

/// Radial field `λ/(2πr) r̂` of the line at `p`.
pub fn electric_field_at(charge: &LineCharge, p: Point2) -> Result<Point2, GeometryError> {
    let d = p - charge.puncture;
    let r2 = d.dot(d);
    if r2.sqrt() < SINGULAR_DISTANCE {
        return Err(GeometryError::Singularity { x: p.x, y: p.y });
    }
    Ok(d * (charge.lambda / (TAU * r2)))
}

/// Shortest distance from `p` to the segment `a → b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Signed angle swept about `origin` by the straight segment `a → b`,
/// counterclockwise positive, strictly inside `(−π, π)`.
pub fn segment_swept_angle(a: Point2, b: Point2, origin: Point2) -> Result<f64, GeometryError> {
    if point_segment_distance(origin, a, b) < SINGULAR_DISTANCE {
        return Err(GeometryError::Singularity {
            x: origin.x,
            y: origin.y,
        });
    }
    let (u, v) = (a - origin, b - origin);
    Ok(u.cross(v).atan2(u.dot(v)))
}

/// Total signed angle swept about `origin` along `path`.
pub fn path_swept_angle(path: &Polyline, origin: Point2) -> Result<f64, GeometryError> {
    path.segments()
        .enumerate()
        .map(|(index, (a, b))| {
            segment_swept_angle(a, b, origin)
                .map_err(|_| GeometryError::SegmentThroughPuncture { index })
        })
        .sum()
}

/// Aharonov-Casher phase of `moment` along `path` from the swept angle.
pub fn ac_phase_analytic(
    path: &Polyline,
    moment: &MagneticMoment,
    charge: &LineCharge,
) -> Result<PhaseValue, GeometryError> {
    let swept = path_swept_angle(path, charge.puncture)?;
    let coupling = charge.axis.value() * moment.projection() * charge.lambda / TAU;
    PhaseValue::new(coupling * swept)
}

/// Number of counterclockwise turns of a closed path about `origin`.
pub fn winding_number(path: &Polyline, origin: Point2) -> Result<i64, GeometryError> {
    if !path.is_closed() {
        return Err(GeometryError::NotClosed {
            gap: path.start().distance(path.end()),
        });
    }
    let swept = path_swept_angle(path, origin)?;
    let turns = (swept / TAU).round();
    let residual = (swept - turns * TAU).abs();
    if residual >= WINDING_RESIDUAL {
        return Err(GeometryError::NumericalInconsistency { swept, residual });
    }
    Ok(turns as i64)
}

/// A segment that enters the exclusion disc around the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentViolation {
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{} segment(s) enter the exclusion radius {radius}", violations.len())]
pub struct PathViolations {
    pub radius: f64,
    pub violations: Vec<SegmentViolation>,
}

/// Checks that every segment stays strictly farther than
/// `exclusion_radius` from the puncture.
pub fn validate_path(
    path: &Polyline,
    charge: &LineCharge,
    exclusion_radius: f64,
) -> Result<(), PathViolations> {
    let violations: Vec<_> = path
        .segments()
        .enumerate()
        .filter_map(|(index, (a, b))| {
            let distance = point_segment_distance(charge.puncture, a, b);
            (distance <= exclusion_radius).then_some(SegmentViolation { index, distance })
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PathViolations {
            radius: exclusion_radius,
            violations,
        })
    }
}

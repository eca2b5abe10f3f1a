#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use ac_bell::engine::ExperimentLayout;
use ac_bell::geometry::{
    point_segment_distance, LineCharge, MagneticMoment, Orientation, Point2, Polyline,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn min_distance(path: &Polyline, p: Point2) -> f64 {
    path.segments()
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Closed star-shaped polygon turning `turns` times around `center`.
/// Angular steps stay in roughly [0.15, 0.6] rad and radii in [0.6, 1.8],
/// so every segment is short compared to its distance from `center`.
pub fn star_loop(rng: &mut impl Rng, center: Point2, turns: i64) -> Polyline {
    let total = TAU * turns.unsigned_abs() as f64;
    let mut steps = Vec::new();
    let mut acc = 0.0;
    while acc < total {
        let s: f64 = rng.gen_range(0.15..0.6);
        steps.push(s);
        acc += s;
    }
    let scale = total / acc;
    let dir = turns.signum() as f64;
    let start: f64 = rng.gen_range(-PI..PI);
    let r0: f64 = rng.gen_range(0.6..1.8);
    let mut pts = vec![center + Point2::from_polar(r0, start)];
    let mut theta = start;
    for (i, s) in steps.iter().enumerate() {
        theta += dir * s * scale;
        let r = if i + 1 == steps.len() {
            r0
        } else {
            rng.gen_range(0.6..1.8)
        };
        pts.push(center + Point2::from_polar(r, theta));
    }
    // close exactly
    let first = pts[0];
    *pts.last_mut().unwrap() = first;
    Polyline::new(pts).unwrap()
}

/// A random closed polyline and its winding number about `puncture`, known
/// from construction.
pub fn random_closed_polyline(rng: &mut impl Rng, puncture: Point2) -> (Polyline, i64) {
    let turns = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
    if rng.gen_bool(0.75) {
        (star_loop(rng, puncture, turns), turns)
    } else {
        let dir: f64 = rng.gen_range(-PI..PI);
        let center = puncture + Point2::from_polar(rng.gen_range(4.0..6.0), dir);
        (star_loop(rng, center, turns), 0)
    }
}

pub fn random_moment(rng: &mut impl Rng) -> MagneticMoment {
    let o = if rng.gen_bool(0.5) {
        Orientation::Parallel
    } else {
        Orientation::Antiparallel
    };
    MagneticMoment::new(rng.gen_range(0.0..2.0), o).unwrap()
}

pub fn random_point(rng: &mut impl Rng, half: f64) -> Point2 {
    Point2::new(rng.gen_range(-half..half), rng.gen_range(-half..half))
}

/// Random straight-contour layout that passes validation.
pub fn random_layout(rng: &mut impl Rng) -> ExperimentLayout {
    loop {
        let axis = if rng.gen_bool(0.5) {
            Orientation::Parallel
        } else {
            Orientation::Antiparallel
        };
        let charge =
            LineCharge::new(rng.gen_range(-4.0..4.0), random_point(rng, 1.0), axis).unwrap();
        let layout = ExperimentLayout::straight(
            random_point(rng, 3.0),
            random_point(rng, 3.0),
            random_point(rng, 3.0),
            random_point(rng, 3.0),
            [
                random_moment(rng),
                random_moment(rng),
                random_moment(rng),
                random_moment(rng),
            ],
            charge,
        );
        if layout.validate().is_ok() {
            return layout;
        }
    }
}

/// Polyline from `path.start()` to `path.end()` sweeping the same angle
/// about `origin` as the straight segment, through random waypoints.
/// Requires `path` to be a single segment clear of `origin`.
pub fn homotopic_detour(
    rng: &mut impl Rng,
    start: Point2,
    end: Point2,
    origin: Point2,
) -> Polyline {
    let (u, v) = (start - origin, end - origin);
    let theta0 = u.y.atan2(u.x);
    let sweep = u.cross(v).atan2(u.dot(v));
    // total angular span stays below π so every step sweeps its plain
    // angle difference
    let margin = ((PI - sweep.abs()) / 2.0 - 0.01).clamp(0.0, 0.4);
    let (lo, hi) = (sweep.min(0.0) - margin, sweep.max(0.0) + margin);
    let (r0, r1) = (u.norm(), v.norm());
    let rmin = r0.min(r1);
    let n = rng.gen_range(1..6);
    // waypoint angles relative to theta0; consecutive gaps stay below π
    let mut rel: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    rel.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sweep < 0.0 {
        rel.reverse();
    }
    let mut pts = vec![start];
    for t in rel {
        let r = rng.gen_range(0.5 * rmin..1.5 * r0.max(r1));
        pts.push(origin + Point2::from_polar(r, theta0 + t));
    }
    pts.push(end);
    pts.dedup();
    Polyline::new(pts).unwrap()
}

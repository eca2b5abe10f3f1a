//! Gauss-Legendre evaluation of the phase line integral, used as an
//! independent check on the swept-angle formula.

use std::f64::consts::PI;

use super::{
    electric_field_at, point_segment_distance, GeometryError, LineCharge, MagneticMoment,
    PhaseValue, Polyline, QUADRATURE_MIN_DISTANCE, SINGULAR_DISTANCE,
};

pub const DEFAULT_NODES: usize = 64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    // roots are symmetric; solve the upper half
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `(μ × E)·dr` along `path` with `nodes_per_segment` nodes on
/// each straight segment. Orientation matches [`super::ac_phase_analytic`]:
/// a counterclockwise sweep with parallel moment and axis is positive.
pub fn ac_phase_quadrature(
    path: &Polyline,
    moment: &MagneticMoment,
    charge: &LineCharge,
    nodes_per_segment: usize,
) -> Result<PhaseValue, GeometryError> {
    if nodes_per_segment < 2 {
        return Err(GeometryError::TooFewNodes(nodes_per_segment));
    }
    for (index, (a, b)) in path.segments().enumerate() {
        let distance = point_segment_distance(charge.puncture, a, b);
        if distance < SINGULAR_DISTANCE {
            return Err(GeometryError::SegmentThroughPuncture { index });
        }
        if distance < QUADRATURE_MIN_DISTANCE {
            return Err(GeometryError::Accuracy { index, distance });
        }
    }
    let coupling = charge.axis.value() * moment.projection();
    if coupling == 0.0 {
        return PhaseValue::new(0.0);
    }
    let (nodes, weights) = gauss_legendre(nodes_per_segment);
    let mut total = 0.0;
    for (a, b) in path.segments() {
        let d = b - a;
        let mid = (a + b) * 0.5;
        let mut seg = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let r = mid + d * (0.5 * x);
            seg += w * electric_field_at(charge, r)?.cross(d);
        }
        // dt = dx / 2 on the unit parameter interval
        total += 0.5 * seg;
    }
    PhaseValue::new(coupling * total)
}

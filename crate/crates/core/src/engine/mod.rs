//! The four-particle experiment.
//!
//! Particles 1 and 2 leave source `C` in a singlet, particles 3 and 4 leave
//! source `D` in a singlet. Particles 1 and 4 meet at `A`, particles 2 and 3
//! meet at `B`. Each particle picks up an Aharonov-Casher phase along its
//! contour:
//!
//! | particle | contour |
//! |----------|---------|
//! | 1        | C → A   |
//! | 2        | C → B   |
//! | 3        | D → B   |
//! | 4        | D → A   |
//!
//! The station phases are `Φ_A = Φ₁ − Φ₄` and `Φ_B = Φ₂ − Φ₃`. Total pair
//! spin is measured at both stations; the `m = 0` outcomes give the
//! correlation `E = cos 2(Φ_A − Φ_B)`.

mod lhv;
mod scan;

use std::borrow::Cow;
use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{
    ac_phase_analytic, ac_phase_quadrature, validate_path, GeometryError, LineCharge,
    MagneticMoment, PathViolations, PhaseValue, Point2, Polyline, DEFAULT_EXCLUSION_RADIUS,
};
use crate::spin::{
    apply_local_phase, build_singlet_product, coupled_amplitudes, probability_of, Amplitude,
    CoupledLabel, PairGrouping, SpinError, StateVector,
};

pub use lhv::{exhaustive_lhv_max, lhv_reference_bound, LocalStrategy};
pub use scan::{
    scan_chsh_over_locations, scan_chsh_over_phases, ScanOptions, ScanOutcome, ScanRow,
    SkippedCandidate,
};

/// Path endpoints must match the declared points this closely.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;
/// Classical CHSH bound.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum (Tsirelson) CHSH bound.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("contour {contour} enters the exclusion radius")]
    PathViolation {
        contour: Contour,
        #[source]
        violations: PathViolations,
    },
    #[error(
        "contour {contour} runs {start} -> {end}, expected {expected_start} -> {expected_end}"
    )]
    EndpointMismatch {
        contour: Contour,
        start: Point2,
        end: Point2,
        expected_start: Point2,
        expected_end: Point2,
    },
    #[error("contour {contour}: {source}")]
    Geometry {
        contour: Contour,
        #[source]
        source: GeometryError,
    },
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error("correlation undefined: no probability mass in the m = 0 sector")]
    UndefinedCorrelation,
    #[error("setting {variant}: {source}")]
    Variant {
        variant: &'static str,
        #[source]
        source: Box<EngineError>,
    },
    #[error("geometric CHSH settings need an experiment layout")]
    MissingLayout,
    #[error("locus {locus} has {valid} valid candidate point(s), at least 2 required")]
    InsufficientLocus { locus: &'static str, valid: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// One of the four particle trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contour {
    CToA,
    CToB,
    DToB,
    DToA,
}

impl Contour {
    /// In particle order 1..4.
    pub const ALL: [Contour; 4] = [Contour::CToA, Contour::CToB, Contour::DToB, Contour::DToA];

    /// 1-based particle travelling this contour.
    pub fn particle(self) -> usize {
        match self {
            Contour::CToA => 1,
            Contour::CToB => 2,
            Contour::DToB => 3,
            Contour::DToA => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Contour::CToA => "C->A",
            Contour::CToB => "C->B",
            Contour::DToB => "D->B",
            Contour::DToA => "D->A",
        }
    }
}

impl fmt::Display for Contour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Planar layout of one run of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentLayout {
    pub source_c: Point2,
    pub source_d: Point2,
    pub meeting_a: Point2,
    pub meeting_b: Point2,
    /// Moments of particles 1..4.
    pub moments: [MagneticMoment; 4],
    pub charge: LineCharge,
    /// Explicit contours in [`Contour::ALL`] order; straight segments when absent.
    pub paths: Option<[Polyline; 4]>,
    pub exclusion_radius: f64,
}

impl ExperimentLayout {
    /// Layout with straight contours and the default exclusion radius.
    pub fn straight(
        source_c: Point2,
        source_d: Point2,
        meeting_a: Point2,
        meeting_b: Point2,
        moments: [MagneticMoment; 4],
        charge: LineCharge,
    ) -> Self {
        ExperimentLayout {
            source_c,
            source_d,
            meeting_a,
            meeting_b,
            moments,
            charge,
            paths: None,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    pub fn endpoints(&self, contour: Contour) -> (Point2, Point2) {
        match contour {
            Contour::CToA => (self.source_c, self.meeting_a),
            Contour::CToB => (self.source_c, self.meeting_b),
            Contour::DToB => (self.source_d, self.meeting_b),
            Contour::DToA => (self.source_d, self.meeting_a),
        }
    }

    pub fn moment(&self, contour: Contour) -> &MagneticMoment {
        &self.moments[contour.particle() - 1]
    }

    pub fn contour(&self, contour: Contour) -> Result<Cow<'_, Polyline>, EngineError> {
        match &self.paths {
            Some(paths) => Ok(Cow::Borrowed(&paths[contour.particle() - 1])),
            None => {
                let (a, b) = self.endpoints(contour);
                Polyline::segment(a, b)
                    .map(Cow::Owned)
                    .map_err(|source| EngineError::Geometry { contour, source })
            }
        }
    }

    /// Same layout with new meeting points; explicit contours are dropped in
    /// favour of straight segments.
    pub fn with_meetings(&self, meeting_a: Point2, meeting_b: Point2) -> Self {
        ExperimentLayout {
            meeting_a,
            meeting_b,
            paths: None,
            ..self.clone()
        }
    }

    /// Validated contour: endpoints match and the exclusion radius is respected.
    pub fn checked_contour(&self, contour: Contour) -> Result<Cow<'_, Polyline>, EngineError> {
        let path = self.contour(contour)?;
        let (expected_start, expected_end) = self.endpoints(contour);
        if path.start().distance(expected_start) > ENDPOINT_TOLERANCE
            || path.end().distance(expected_end) > ENDPOINT_TOLERANCE
        {
            return Err(EngineError::EndpointMismatch {
                contour,
                start: path.start(),
                end: path.end(),
                expected_start,
                expected_end,
            });
        }
        validate_path(&path, &self.charge, self.exclusion_radius).map_err(|violations| {
            EngineError::PathViolation {
                contour,
                violations,
            }
        })?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        for c in Contour::ALL {
            self.checked_contour(c)?;
        }
        Ok(())
    }

    /// Phase of one contour from its swept angle.
    pub fn contour_phase(&self, contour: Contour) -> Result<PhaseValue, EngineError> {
        let path = self.checked_contour(contour)?;
        ac_phase_analytic(&path, self.moment(contour), &self.charge)
            .map_err(|source| EngineError::Geometry { contour, source })
    }

    /// Phase of one contour by Gauss-Legendre quadrature.
    pub fn contour_phase_quadrature(
        &self,
        contour: Contour,
        nodes_per_segment: usize,
    ) -> Result<PhaseValue, EngineError> {
        let path = self.checked_contour(contour)?;
        ac_phase_quadrature(&path, self.moment(contour), &self.charge, nodes_per_segment)
            .map_err(|source| EngineError::Geometry { contour, source })
    }
}

/// The four single-particle phases and the two station phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseQuadruple {
    phi: [PhaseValue; 4],
    phi_a: PhaseValue,
    phi_b: PhaseValue,
}

impl PhaseQuadruple {
    pub fn new(phi: [PhaseValue; 4]) -> Self {
        PhaseQuadruple {
            phi,
            phi_a: phi[0] - phi[3],
            phi_b: phi[1] - phi[2],
        }
    }

    pub fn from_radians(phi: [f64; 4]) -> Result<Self, GeometryError> {
        Ok(Self::new([
            PhaseValue::new(phi[0])?,
            PhaseValue::new(phi[1])?,
            PhaseValue::new(phi[2])?,
            PhaseValue::new(phi[3])?,
        ]))
    }

    /// A quadruple realizing the given station phases: `Φ₁ = Φ_A`,
    /// `Φ₂ = Φ_B`, `Φ₃ = Φ₄ = 0`.
    pub fn from_station_phases(phi_a: f64, phi_b: f64) -> Result<Self, GeometryError> {
        Self::from_radians([phi_a, phi_b, 0.0, 0.0])
    }

    /// `Φ₁..Φ₄` in radians.
    pub fn radians(&self) -> [f64; 4] {
        self.phi.map(PhaseValue::radians)
    }

    pub fn phi(&self, particle: usize) -> PhaseValue {
        self.phi[particle - 1]
    }

    pub fn phi_a(&self) -> PhaseValue {
        self.phi_a
    }

    pub fn phi_b(&self) -> PhaseValue {
        self.phi_b
    }
}

/// Phases of every contour of a validated layout.
pub fn compute_phases(layout: &ExperimentLayout) -> Result<PhaseQuadruple, EngineError> {
    let mut phi = [PhaseValue::default(); 4];
    for c in Contour::ALL {
        phi[c.particle() - 1] = layout.contour_phase(c)?;
    }
    Ok(PhaseQuadruple::new(phi))
}

/// Per-contour phases by quadrature, in particle order.
pub fn compute_phases_quadrature(
    layout: &ExperimentLayout,
    nodes_per_segment: usize,
) -> Result<[PhaseValue; 4], EngineError> {
    let mut phi = [PhaseValue::default(); 4];
    for c in Contour::ALL {
        phi[c.particle() - 1] = layout.contour_phase_quadrature(c, nodes_per_segment)?;
    }
    Ok(phi)
}

/// Singlets from both sources, each particle phased by its contour phase.
pub fn assemble_total_state(phases: &PhaseQuadruple) -> StateVector {
    let mut state = build_singlet_product(PairGrouping::SOURCES);
    for (i, phi) in phases.radians().into_iter().enumerate() {
        state = apply_local_phase(&state, i + 1, phi).expect("phase values are finite");
    }
    state
}

/// Closed-form coupled amplitudes of the total state on the meeting pairs
/// `(1,4)`, `(2,3)`, indexed `[A][B]` in [`CoupledLabel::ALL`] order.
pub fn closed_form_meeting_amplitudes(phases: &PhaseQuadruple) -> [[Amplitude; 4]; 4] {
    let [p1, p2, p3, p4] = phases.radians();
    let delta = phases.phi_a().radians() - phases.phi_b().radians();
    let outer = p1 - p2 - p3 + p4;
    let (cos, sin) = (0.5 * delta.cos(), 0.5 * delta.sin());
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    // [S, T0, Tp, Tm]
    out[2][3] = -Complex64::from_polar(0.5, outer);
    out[3][2] = -Complex64::from_polar(0.5, -outer);
    out[1][1] = Complex64::new(cos, 0.0);
    out[0][0] = Complex64::new(-cos, 0.0);
    out[0][1] = Complex64::new(0.0, sin);
    out[1][0] = Complex64::new(0.0, -sin);
    out
}

/// Coupled amplitudes of a state on the meeting pairs, `[A][B]`.
pub fn meeting_amplitudes(state: &StateVector) -> [[Amplitude; 4]; 4] {
    coupled_amplitudes(state, PairGrouping::MEETINGS)
}

/// Joint outcome probabilities of total pair spin at `A` and `B`.
///
/// Outcome `1` is the `m = 0` triplet, outcome `0` the singlet. All
/// remaining mass (an `m = ±1` result at either station) is kept in
/// `residual`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pub p11: f64,
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub residual: f64,
}

impl JointDistribution {
    /// Probability mass of the post-selected `m = 0` sector.
    pub fn m0_mass(&self) -> f64 {
        self.p11 + self.p00 + self.p10 + self.p01
    }
}

pub fn joint_probabilities(state: &StateVector) -> Result<JointDistribution, EngineError> {
    use CoupledLabel::{S, T0};
    let g = PairGrouping::MEETINGS;
    let p11 = probability_of(state, g, T0, T0)?;
    let p00 = probability_of(state, g, S, S)?;
    let p10 = probability_of(state, g, T0, S)?;
    let p01 = probability_of(state, g, S, T0)?;
    let mut residual = 0.0;
    for a in CoupledLabel::ALL {
        for b in CoupledLabel::ALL {
            if !matches!((a, b), (S | T0, S | T0)) {
                residual += probability_of(state, g, a, b)?;
            }
        }
    }
    Ok(JointDistribution {
        p11,
        p00,
        p10,
        p01,
        residual,
    })
}

/// Post-selected correlation `(p11 + p00 − p10 − p01) / (p11 + p00 + p10 + p01)`.
pub fn correlation(dist: &JointDistribution) -> Result<f64, EngineError> {
    let mass = dist.m0_mass();
    if mass.is_nan() || mass <= 0.0 {
        return Err(EngineError::UndefinedCorrelation);
    }
    Ok((dist.p11 + dist.p00 - dist.p10 - dist.p01) / mass)
}

/// `cos 2(Φ_A − Φ_B)`
pub fn closed_form_correlation(phi_a: f64, phi_b: f64) -> f64 {
    (2.0 * (phi_a - phi_b)).cos()
}

/// Correlation and distribution for one phase quadruple, through the full
/// state-vector pipeline.
pub fn evaluate(phases: &PhaseQuadruple) -> Result<(f64, JointDistribution), EngineError> {
    let dist = joint_probabilities(&assemble_total_state(phases))?;
    Ok((correlation(&dist)?, dist))
}

/// Settings of a CHSH run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChshSettings {
    /// Alternative meeting points in a layout.
    Geometric {
        a: Point2,
        a_prime: Point2,
        b: Point2,
        b_prime: Point2,
    },
    /// Station phases given directly.
    Direct {
        phi_a: f64,
        phi_a_prime: f64,
        phi_b: f64,
        phi_b_prime: f64,
    },
}

/// One correlator term of a CHSH sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorTerm {
    pub phi_a: f64,
    pub phi_b: f64,
    pub e: f64,
    pub distribution: JointDistribution,
}

/// Result of a CHSH evaluation.
///
/// `terms` holds `E(A,B)`, `E(A,B′)`, `E(A′,B)`, `E(A′,B′)` in that order and
/// `s = E(A,B) − E(A,B′) + E(A′,B) + E(A′,B′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord {
    pub settings: ChshSettings,
    pub terms: [CorrelatorTerm; 4],
    pub s: f64,
}

impl CorrelationRecord {
    fn from_terms(settings: ChshSettings, terms: [CorrelatorTerm; 4]) -> Self {
        let s = chsh_combination([terms[0].e, terms[1].e, terms[2].e, terms[3].e]);
        CorrelationRecord { settings, terms, s }
    }

    pub fn violates_classical_bound(&self) -> bool {
        self.s.abs() > CLASSICAL_BOUND
    }
}

/// `e[0] − e[1] + e[2] + e[3]`
pub fn chsh_combination(e: [f64; 4]) -> f64 {
    e[0] - e[1] + e[2] + e[3]
}

const VARIANTS: [(&str, usize, usize); 4] = [
    ("(A,B)", 0, 0),
    ("(A,B')", 0, 1),
    ("(A',B)", 1, 0),
    ("(A',B')", 1, 1),
];

/// Evaluates the CHSH sum with each correlator from the full pipeline.
pub fn chsh_value(
    settings: &ChshSettings,
    layout: Option<&ExperimentLayout>,
) -> Result<CorrelationRecord, EngineError> {
    let mut terms = Vec::with_capacity(4);
    match *settings {
        ChshSettings::Direct {
            phi_a,
            phi_a_prime,
            phi_b,
            phi_b_prime,
        } => {
            let alice = [phi_a, phi_a_prime];
            let bob = [phi_b, phi_b_prime];
            for (variant, i, j) in VARIANTS {
                let phases =
                    PhaseQuadruple::from_station_phases(alice[i], bob[j]).map_err(|source| {
                        EngineError::Variant {
                            variant,
                            source: Box::new(EngineError::Geometry {
                                contour: Contour::CToA,
                                source,
                            }),
                        }
                    })?;
                terms.push(term(&phases)?);
            }
        }
        ChshSettings::Geometric {
            a,
            a_prime,
            b,
            b_prime,
        } => {
            let layout = layout.ok_or(EngineError::MissingLayout)?;
            let alice = [a, a_prime];
            let bob = [b, b_prime];
            for (variant, i, j) in VARIANTS {
                let variant_layout = layout.with_meetings(alice[i], bob[j]);
                let t = compute_phases(&variant_layout)
                    .and_then(|p| term(&p))
                    .map_err(|e| EngineError::Variant {
                        variant,
                        source: Box::new(e),
                    })?;
                terms.push(t);
            }
        }
    }
    let terms: [CorrelatorTerm; 4] = terms.try_into().expect("four CHSH terms");
    Ok(CorrelationRecord::from_terms(*settings, terms))
}

fn term(phases: &PhaseQuadruple) -> Result<CorrelatorTerm, EngineError> {
    let (e, distribution) = evaluate(phases)?;
    Ok(CorrelatorTerm {
        phi_a: phases.phi_a().radians(),
        phi_b: phases.phi_b().radians(),
        e,
        distribution,
    })
}

//! Exact amplitude machinery for four spin-½ particles.
//!
//! Spins are projected on the line-charge axis. A product basis state is
//! addressed by a 4-bit label: bit `i` is set when particle `i + 1` is `+`.
//! Coupled (total-spin) bases are available for any split of the four
//! particles into two ordered pairs.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude of a basis state.
pub type Amplitude = Complex64;

/// Number of particles in the register.
pub const PARTICLES: usize = 4;
/// Dimension of the product Hilbert space.
pub const DIM: usize = 1 << PARTICLES;

/// Largest deviation of the squared norm from 1 accepted by
/// [`probability_of`] and friends.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("particle index {0} is outside 1..=4")]
    ParticleOutOfRange(usize),
    #[error("invalid pair grouping {first:?} {second:?}: indices must be a permutation of 1..=4")]
    InvalidGrouping {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("phase must be finite, got {0}")]
    NonFinitePhase(f64),
    #[error("state is not normalized: norm² = {0}")]
    Unnormalized(f64),
    #[error("amplitude at {label} is not finite")]
    NonFiniteAmplitude { label: BasisLabel },
}

/// Spin projection of one particle along the line-charge axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// `+1` for up, `-1` for down.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// A product basis state `|s₁ s₂ s₃ s₄⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel(u8);

impl BasisLabel {
    /// Label from its 4-bit index.
    ///
    /// # Panics
    /// When `index >= 16`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < DIM, "basis index {index} out of range");
        BasisLabel(index as u8)
    }

    pub fn from_spins(spins: [Spin; PARTICLES]) -> Self {
        let bits = spins
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Spin::Up)
            .fold(0u8, |acc, (i, _)| acc | (1 << i));
        BasisLabel(bits)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Spin of particle `particle` (1-based).
    pub fn spin(self, particle: usize) -> Spin {
        if self.0 & (1 << (particle - 1)) != 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn spins(self) -> [Spin; PARTICLES] {
        [self.spin(1), self.spin(2), self.spin(3), self.spin(4)]
    }

    pub fn all() -> impl Iterator<Item = BasisLabel> {
        (0..DIM).map(BasisLabel::from_index)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.spins() {
            f.write_str(match s {
                Spin::Up => "+",
                Spin::Down => "-",
            })?;
        }
        Ok(())
    }
}

/// Pure state of the four-spin register, stored densely by basis index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    amplitudes: [Amplitude; DIM],
}

impl StateVector {
    pub fn zero() -> Self {
        StateVector {
            amplitudes: [Amplitude::new(0.0, 0.0); DIM],
        }
    }

    pub fn from_amplitudes(amplitudes: [Amplitude; DIM]) -> Result<Self, SpinError> {
        if let Some(i) = amplitudes.iter().position(|a| !a.is_finite()) {
            return Err(SpinError::NonFiniteAmplitude {
                label: BasisLabel::from_index(i),
            });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn basis(label: BasisLabel) -> Self {
        let mut s = Self::zero();
        s.amplitudes[label.index()] = Amplitude::new(1.0, 0.0);
        s
    }

    pub fn amplitude(&self, label: BasisLabel) -> Amplitude {
        self.amplitudes[label.index()]
    }

    pub fn amplitudes(&self) -> &[Amplitude; DIM] {
        &self.amplitudes
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisLabel, Amplitude)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (BasisLabel::from_index(i), *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Amplitude {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn ensure_normalized(&self) -> Result<(), SpinError> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(SpinError::Unnormalized(n));
        }
        Ok(())
    }
}

/// Euclidean norm of a state.
pub fn state_norm(state: &StateVector) -> f64 {
    state.norm_sqr().sqrt()
}

/// Split of the four particles into two ordered pairs.
///
/// The order inside a pair decides which particle is "first" in `|+−⟩`,
/// which fixes the sign convention of the singlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairGrouping {
    first: (usize, usize),
    second: (usize, usize),
}

impl PairGrouping {
    /// Pairs as emitted by the two sources, `(1,2)` and `(3,4)`.
    pub const SOURCES: PairGrouping = PairGrouping {
        first: (1, 2),
        second: (3, 4),
    };

    /// Pairs as they meet at `A` and `B`, `(1,4)` and `(2,3)`.
    pub const MEETINGS: PairGrouping = PairGrouping {
        first: (1, 4),
        second: (2, 3),
    };

    pub fn new(first: (usize, usize), second: (usize, usize)) -> Result<Self, SpinError> {
        let mut seen = [false; PARTICLES];
        for p in [first.0, first.1, second.0, second.1] {
            if !(1..=PARTICLES).contains(&p) || seen[p - 1] {
                return Err(SpinError::InvalidGrouping { first, second });
            }
            seen[p - 1] = true;
        }
        Ok(PairGrouping { first, second })
    }

    pub fn first(&self) -> (usize, usize) {
        self.first
    }

    pub fn second(&self) -> (usize, usize) {
        self.second
    }
}

/// Total-spin state of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoupledLabel {
    /// `|0,0⟩ = (|+−⟩ − |−+⟩)/√2`
    S,
    /// `|1,0⟩ = (|+−⟩ + |−+⟩)/√2`
    T0,
    /// `|1,1⟩ = |++⟩`
    Tp,
    /// `|1,−1⟩ = |−−⟩`
    Tm,
}

impl CoupledLabel {
    pub const ALL: [CoupledLabel; 4] = [
        CoupledLabel::S,
        CoupledLabel::T0,
        CoupledLabel::Tp,
        CoupledLabel::Tm,
    ];

    /// Overlap ⟨self | s_first s_second⟩ (real in this convention).
    pub fn overlap(self, first: Spin, second: Spin) -> f64 {
        use CoupledLabel::*;
        use Spin::*;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match (self, first, second) {
            (S, Up, Down) => h,
            (S, Down, Up) => -h,
            (T0, Up, Down) | (T0, Down, Up) => h,
            (Tp, Up, Up) | (Tm, Down, Down) => 1.0,
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CoupledLabel::S => "S",
            CoupledLabel::T0 => "T0",
            CoupledLabel::Tp => "Tp",
            CoupledLabel::Tm => "Tm",
        }
    }
}

impl fmt::Display for CoupledLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Product-basis expansion of `|first⟩ ⊗ |second⟩` for the given grouping.
pub fn coupled_state(
    grouping: PairGrouping,
    first: CoupledLabel,
    second: CoupledLabel,
) -> StateVector {
    let (i, j) = grouping.first;
    let (k, l) = grouping.second;
    let mut out = StateVector::zero();
    for label in BasisLabel::all() {
        let c = first.overlap(label.spin(i), label.spin(j))
            * second.overlap(label.spin(k), label.spin(l));
        out.amplitudes[label.index()] = Amplitude::new(c, 0.0);
    }
    out
}

/// Product of singlets on both pairs of `grouping`.
pub fn build_singlet_product(grouping: PairGrouping) -> StateVector {
    coupled_state(grouping, CoupledLabel::S, CoupledLabel::S)
}

/// Multiplies every amplitude by `e^{±i·phi}` according to the spin of
/// `particle` (1-based).
pub fn apply_local_phase(
    state: &StateVector,
    particle: usize,
    phi: f64,
) -> Result<StateVector, SpinError> {
    if !(1..=PARTICLES).contains(&particle) {
        return Err(SpinError::ParticleOutOfRange(particle));
    }
    if !phi.is_finite() {
        return Err(SpinError::NonFinitePhase(phi));
    }
    let up = Amplitude::from_polar(1.0, phi);
    let down = up.conj();
    let mut out = *state;
    for (idx, amp) in out.amplitudes.iter_mut().enumerate() {
        *amp *= match BasisLabel::from_index(idx).spin(particle) {
            Spin::Up => up,
            Spin::Down => down,
        };
    }
    Ok(out)
}

/// ⟨first ⊗ second | state⟩ in the coupled basis of `grouping`.
pub fn coupled_amplitude(
    state: &StateVector,
    grouping: PairGrouping,
    first: CoupledLabel,
    second: CoupledLabel,
) -> Amplitude {
    coupled_state(grouping, first, second).inner(state)
}

/// All 16 coupled amplitudes, indexed `[first][second]` in
/// [`CoupledLabel::ALL`] order.
pub fn coupled_amplitudes(state: &StateVector, grouping: PairGrouping) -> [[Amplitude; 4]; 4] {
    let mut out = [[Amplitude::new(0.0, 0.0); 4]; 4];
    for (a, first) in CoupledLabel::ALL.iter().enumerate() {
        for (b, second) in CoupledLabel::ALL.iter().enumerate() {
            out[a][b] = coupled_amplitude(state, grouping, *first, *second);
        }
    }
    out
}

/// Projective probability of finding `first ⊗ second` on `grouping`.
pub fn probability_of(
    state: &StateVector,
    grouping: PairGrouping,
    first: CoupledLabel,
    second: CoupledLabel,
) -> Result<f64, SpinError> {
    state.ensure_normalized()?;
    Ok(coupled_amplitude(state, grouping, first, second).norm_sqr())
}

//! Pure states, GHZ-type families and the measurement operators of the protocol.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result};
use crate::qmat::{kron_vec, ComplexMatrix, DensityMatrix, C64, ONE, ZERO};

const NORM_TOL: f64 = 1e-12;

/// Normalized amplitude vector over the computational basis of `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return invalid(format!("{len} amplitudes do not describe a qubit register"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return invalid(format!("state is not normalized (norm² = {norm})"));
        }
        Ok(Self { qubits: len.trailing_zeros() as usize, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return invalid("cannot normalize the zero vector");
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if qubits == 0 || index >= dim {
            return invalid(format!("basis index {index} out of range for {qubits} qubits"));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::projector(&self.amplitudes))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { qubits: self.qubits + other.qubits, amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        crate::qmat::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `u|ψ⟩` for a unitary `u` on the whole register.
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        Self { qubits: self.qubits, amplitudes: u.apply(&self.amplitudes) }
    }
}

/// Polar and azimuthal angles of a single-qubit input state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    /// `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return invalid(format!("theta = {theta} outside [0, π]"));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return invalid(format!("phi = {phi} outside [0, 2π)"));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn state(&self) -> PureState {
        bloch_pure(*self)
    }
}

/// `cos(θ/2) e^{iφ/2}|0⟩ + sin(θ/2) e^{-iφ/2}|1⟩`.
pub fn bloch_pure(angles: BlochAngles) -> PureState {
    let (t, p) = (angles.theta / 2.0, angles.phi / 2.0);
    PureState::new(vec![C64::from_polar(t.cos(), p), C64::from_polar(t.sin(), -p)])
        .expect("Bloch amplitudes are normalized")
}

fn two_term(qubits: usize, i: usize, j: usize, sign: f64) -> PureState {
    let mut amps = vec![ZERO; 1 << qubits];
    amps[i] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[j] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
    PureState::new(amps).expect("two-term superposition is normalized")
}

/// The eight-element GHZ basis, `k = 1..=8`:
/// `|GHZ,2j-1⟩ = (|b⟩ + |b̄⟩)/√2`, `|GHZ,2j⟩ = (|b⟩ - |b̄⟩)/√2` with
/// `b = 000, 001, 010, 011` and `b̄` its bitwise complement.
pub fn ghz_basis(k: usize) -> Result<PureState> {
    if !(1..=8).contains(&k) {
        return invalid(format!("GHZ basis index {k} outside 1..=8"));
    }
    let low = (k - 1) / 2;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    Ok(two_term(3, low, 7 - low, sign))
}

pub fn ghz() -> PureState {
    ghz_basis(1).unwrap()
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state() -> PureState {
    let a = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    amps[0b001] = a;
    amps[0b010] = a;
    amps[0b100] = a;
    PureState::new(amps).unwrap()
}

/// `|Φ+⟩, |Φ-⟩, |Ψ+⟩, |Ψ-⟩` in that order.
pub fn bell_states() -> [PureState; 4] {
    [two_term(2, 0, 3, 1.0), two_term(2, 0, 3, -1.0), two_term(2, 1, 2, 1.0), two_term(2, 1, 2, -1.0)]
}

/// Projectors `M_1..M_4` onto the Bell states, in the order of [`bell_states`].
pub fn bell_projectors() -> [ComplexMatrix; 4] {
    bell_states().map(|s| ComplexMatrix::projector(s.amplitudes()))
}

/// `|μ+⟩ = sinν|0⟩ + cosν|1⟩`, `|μ-⟩ = cosν|0⟩ - sinν|1⟩`.
pub fn bob_basis(nu: f64) -> [PureState; 2] {
    let (s, c) = nu.sin_cos();
    [
        PureState::new(vec![C64::new(s, 0.0), C64::new(c, 0.0)]).unwrap(),
        PureState::new(vec![C64::new(c, 0.0), C64::new(-s, 0.0)]).unwrap(),
    ]
}

/// `N_1 = |μ+⟩⟨μ+|`, `N_2 = |μ-⟩⟨μ-|`.
pub fn bob_projectors(nu: f64) -> [ComplexMatrix; 2] {
    bob_basis(nu).map(|s| ComplexMatrix::projector(s.amplitudes()))
}

/// `√z|GHZ,1⟩ - e^{iφ}√(1-z)|GHZ,2⟩`.
pub fn z_family(z: f64, phase: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&z) {
        return invalid(format!("weight {z} outside [0, 1]"));
    }
    let g1 = ghz_basis(1)?;
    let g2 = ghz_basis(2)?;
    let (a, b) = (C64::new(z.sqrt(), 0.0), -C64::from_polar((1.0 - z).sqrt(), phase));
    let amps = g1.amplitudes().iter().zip(g2.amplitudes()).map(|(&x, &y)| a * x + b * y).collect();
    PureState::normalized(amps)
}

/// `√x|GHZ,1⟩ - Σ_k e^{iφ_k}√((1-x)/3)|GHZ,2k+1⟩` for `k = 1, 2, 3`.
pub fn x_family(x: f64, phases: [f64; 3]) -> Result<PureState> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("weight {x} outside [0, 1]"));
    }
    let side = ((1.0 - x) / 3.0).sqrt();
    let mut amps: Vec<C64> = ghz_basis(1)?.amplitudes().iter().map(|&a| a * x.sqrt()).collect();
    for (k, &ph) in [3usize, 5, 7].iter().zip(&phases) {
        let coeff = -C64::from_polar(side, ph);
        for (dst, &a) in amps.iter_mut().zip(ghz_basis(*k)?.amplitudes()) {
            *dst += coeff * a;
        }
    }
    PureState::normalized(amps)
}

/// `(|GHZ,3⟩ - e^{iθ₁}|GHZ,5⟩ - e^{iθ₂}|GHZ,7⟩)/√3`.
pub fn j_family(theta1: f64, theta2: f64) -> PureState {
    let w = 1.0 / 3f64.sqrt();
    let coeffs = [C64::new(w, 0.0), -C64::from_polar(w, theta1), -C64::from_polar(w, theta2)];
    let mut amps = vec![ZERO; 8];
    for (k, c) in [3usize, 5, 7].iter().zip(coeffs) {
        for (dst, &a) in amps.iter_mut().zip(ghz_basis(*k).unwrap().amplitudes()) {
            *dst += c * a;
        }
    }
    PureState::normalized(amps).unwrap()
}

//! Noisy GHZ channels: the closed-form spectral decompositions of the
//! three-qubit GHZ state after Pauli decoherence, and a Lindblad integrator
//! that reproduces them from the master equation.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, C64, I, ONE};
use crate::states::{ghz, ghz_basis};

/// Which Pauli dissipators act on the shared GHZ qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    None,
    X,
    Y,
    Z,
    Isotropic,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [NoiseKind::None, NoiseKind::X, NoiseKind::Y, NoiseKind::Z, NoiseKind::Isotropic];
    pub const NOISY: [NoiseKind; 4] = [NoiseKind::X, NoiseKind::Y, NoiseKind::Z, NoiseKind::Isotropic];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::X => "x",
            NoiseKind::Y => "y",
            NoiseKind::Z => "z",
            NoiseKind::Isotropic => "isotropic",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseKind::None),
            "x" => Ok(NoiseKind::X),
            "y" => Ok(NoiseKind::Y),
            "z" => Ok(NoiseKind::Z),
            "i" | "iso" | "isotropic" => Ok(NoiseKind::Isotropic),
            other => invalid(format!("unknown noise kind '{other}' (expected none, x, y, z, isotropic)")),
        }
    }
}

/// Noise family together with the dimensionless decoherence strength `κt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub kind: NoiseKind,
    pub kappa_t: f64,
}

impl ChannelParams {
    pub fn new(kind: NoiseKind, kappa_t: f64) -> Result<Self> {
        if !kappa_t.is_finite() || kappa_t < 0.0 {
            return invalid(format!("kappa_t must be a nonnegative number, got {kappa_t}"));
        }
        Ok(Self { kind, kappa_t })
    }

    pub fn noiseless() -> Self {
        Self { kind: NoiseKind::None, kappa_t: 0.0 }
    }

    /// `x = (1 + 3e^{-4κt})/4`, the GHZ weight under X noise.
    pub fn x(&self) -> f64 {
        (1.0 + 3.0 * (-4.0 * self.kappa_t).exp()) / 4.0
    }

    /// `(y₊, y₋) = (1 + e^{-2κt}, 1 - e^{-2κt})`.
    pub fn y_pm(&self) -> (f64, f64) {
        let e = (-2.0 * self.kappa_t).exp();
        (1.0 + e, 1.0 - e)
    }

    /// `z = (1 + e^{-6κt})/2`.
    pub fn z(&self) -> f64 {
        (1.0 + (-6.0 * self.kappa_t).exp()) / 2.0
    }

    /// `p = e^{-4κt}`.
    pub fn p(&self) -> f64 {
        (-4.0 * self.kappa_t).exp()
    }

    /// Weights of `|GHZ,1⟩..|GHZ,8⟩` for the kinds that are diagonal in the
    /// GHZ basis (everything except isotropic noise).
    pub fn ghz_weights(&self) -> Option<[f64; 8]> {
        match self.kind {
            NoiseKind::None => Some([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            NoiseKind::X => {
                let x = self.x();
                let s = (1.0 - x) / 3.0;
                Some([x, 0.0, s, 0.0, s, 0.0, s, 0.0])
            }
            NoiseKind::Y => {
                let (yp, ym) = self.y_pm();
                let one = yp * ym * ym / 8.0;
                let two = yp * yp * ym / 8.0;
                Some([yp.powi(3) / 8.0, ym.powi(3) / 8.0, one, two, one, two, one, two])
            }
            NoiseKind::Z => {
                let z = self.z();
                Some([z, 1.0 - z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
            }
            NoiseKind::Isotropic => None,
        }
    }
}

fn ghz_mixture(weights: &[f64; 8]) -> ComplexMatrix {
    weights.iter().enumerate().filter(|(_, &w)| w != 0.0).fold(ComplexMatrix::zeros(8), |acc, (k, &w)| {
        let g = ghz_basis(k + 1).unwrap();
        &acc + &ComplexMatrix::projector(g.amplitudes()).scale_real(w)
    })
}

/// The three-qubit state `ε(|GHZ⟩⟨GHZ|)` after decoherence of strength `κt`.
pub fn channel_state(params: ChannelParams) -> DensityMatrix {
    let m = match params.ghz_weights() {
        Some(w) => ghz_mixture(&w),
        None => {
            let p = params.p();
            let (p2, p3) = (p * p, p * p * p);
            let mut m = ghz_mixture(&[
                (1.0 + 3.0 * p2 + 4.0 * p3) / 8.0,
                (1.0 + 3.0 * p2 - 4.0 * p3) / 8.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
            ]);
            let side = (1.0 - p2) / 8.0;
            for k in 1..7 {
                m[(k, k)] += C64::new(side, 0.0);
            }
            m
        }
    };
    DensityMatrix::from_matrix_unchecked(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A jump operator `√rate · σ_axis` on one qubit, stored as a monomial
/// matrix: `L|j⟩ = √rate · phase[j] |target[j]⟩`.
#[derive(Clone, Debug)]
pub struct PauliJump {
    pub qubit: usize,
    pub axis: PauliAxis,
    target: Vec<usize>,
    phase: Vec<C64>,
}

impl PauliJump {
    pub fn new(qubits: usize, qubit: usize, axis: PauliAxis) -> Result<Self> {
        if qubit >= qubits {
            return invalid(format!("qubit {qubit} out of range for {qubits} qubits"));
        }
        let bit = 1usize << (qubits - 1 - qubit);
        let dim = 1usize << qubits;
        let (target, phase) = (0..dim)
            .map(|j| {
                let set = j & bit != 0;
                match axis {
                    PauliAxis::X => (j ^ bit, ONE),
                    PauliAxis::Y => (j ^ bit, if set { -I } else { I }),
                    PauliAxis::Z => (j, if set { -ONE } else { ONE }),
                }
            })
            .unzip();
        Ok(Self { qubit, axis, target, phase })
    }

    /// Dense form of `σ_axis` on the register (without the rate).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.target.len());
        for (j, (&t, &ph)) in self.target.iter().zip(&self.phase).enumerate() {
            m[(t, j)] = ph;
        }
        m
    }
}

/// Dissipators of the master equation. The Hamiltonian part is zero.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    pub qubits: usize,
    pub rate: f64,
    pub jumps: Vec<PauliJump>,
}

impl LindbladSpec {
    /// The dissipator set for `kind` acting with rate `rate` on every qubit of
    /// a three-qubit register. `NoiseKind::None` has no dissipators.
    pub fn for_kind(kind: NoiseKind, rate: f64) -> Self {
        let qubits = 3;
        let axes: &[PauliAxis] = match kind {
            NoiseKind::None => &[],
            NoiseKind::X => &[PauliAxis::X],
            NoiseKind::Y => &[PauliAxis::Y],
            NoiseKind::Z => &[PauliAxis::Z],
            NoiseKind::Isotropic => &[PauliAxis::X, PauliAxis::Y, PauliAxis::Z],
        };
        let jumps = axes
            .iter()
            .flat_map(|&axis| (0..qubits).map(move |q| PauliJump::new(qubits, q, axis).unwrap()))
            .collect();
        Self { qubits, rate, jumps }
    }
}

/// `dρ/dt = Σ_L (L ρ L† - ½{L†L, ρ})`.
pub fn lindblad_generator(rho: &DensityMatrix, spec: &LindbladSpec) -> Result<ComplexMatrix> {
    if rho.qubits() != spec.qubits {
        return invalid(format!(
            "state has {} qubits but the dissipators act on {}",
            rho.qubits(),
            spec.qubits
        ));
    }
    Ok(generator(rho.matrix(), spec))
}

fn generator(rho: &ComplexMatrix, spec: &LindbladSpec) -> ComplexMatrix {
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n);
    for jump in &spec.jumps {
        for r in 0..n {
            let (tr, pr) = (jump.target[r], jump.phase[r]);
            let dr = pr.norm_sqr() * spec.rate;
            for c in 0..n {
                let (tc, pc) = (jump.target[c], jump.phase[c]);
                let dc = pc.norm_sqr() * spec.rate;
                let v = rho[(r, c)];
                out[(tr, tc)] += pr * v * pc.conj() * spec.rate;
                out[(r, c)] -= v * (0.5 * (dr + dc));
            }
        }
    }
    out
}

/// Number of RK4 steps used to integrate up to `κt`.
pub fn rk4_steps(kappa_t: f64) -> usize {
    (2000.0 * kappa_t).ceil() as usize + 1
}

/// Integrates the master equation from `rho0` over time `t` with fixed-step RK4.
pub fn lindblad_evolve(rho0: &DensityMatrix, spec: &LindbladSpec, t: f64, steps: usize) -> Result<DensityMatrix> {
    if steps == 0 {
        return invalid("RK4 integration needs at least one step");
    }
    if rho0.qubits() != spec.qubits {
        return invalid("state and dissipators act on different registers");
    }
    let h = t / steps as f64;
    let mut rho = rho0.matrix().clone();
    for _ in 0..steps {
        let k1 = generator(&rho, spec);
        let k2 = generator(&(&rho + &k1.scale_real(h / 2.0)), spec);
        let k3 = generator(&(&rho + &k2.scale_real(h / 2.0)), spec);
        let k4 = generator(&(&rho + &k3.scale_real(h)), spec);
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        rho = &rho + &incr.scale_real(h / 6.0);
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Evolves `|GHZ⟩⟨GHZ|` under `kind` noise with unit rate for time `κt`.
pub fn evolve_ghz(params: ChannelParams) -> DensityMatrix {
    let spec = LindbladSpec::for_kind(params.kind, 1.0);
    lindblad_evolve(&ghz().density(), &spec, params.kappa_t, rk4_steps(params.kappa_t))
        .expect("GHZ register matches the dissipators")
}

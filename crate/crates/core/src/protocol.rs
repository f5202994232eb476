//! The tripartite teleportation pipeline in density-matrix form.
//!
//! Register layout: qubit 0 holds the input state, qubits 1, 2, 3 hold the
//! shared GHZ state (Alice, Bob, Charlie). Alice measures qubits 0 and 1 in
//! the Bell basis, Bob measures qubit 2 in the `ν`-rotated basis, and Charlie
//! corrects qubit 3 with a Pauli chosen by both outcomes.

use crate::channels::{channel_state, ChannelParams};
use crate::error::{invalid, Error, Result};
use crate::qmat::{kron, partial_trace, pauli, ComplexMatrix, DensityMatrix};
use crate::states::{bell_projectors, bob_projectors, BlochAngles};

/// Outcome probabilities below this are not conditioned on.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

/// One `(m, n)` branch of the protocol.
#[derive(Clone, Debug)]
pub struct OutcomeRecord {
    /// Alice's outcome, `1..=4`.
    pub m: usize,
    /// Bob's outcome, `1..=2`.
    pub n: usize,
    pub p_m: f64,
    pub q_mn: f64,
    /// Charlie's corrected state; `None` when `q_mn` is below
    /// [`DEGENERATE_PROBABILITY`] and there is nothing to condition on.
    pub tau_mn: Option<DensityMatrix>,
}

impl OutcomeRecord {
    pub fn weight(&self) -> f64 {
        self.p_m * self.q_mn
    }
}

/// `ρ_in ⊗ ε(ρ_GHZ)` on four qubits.
pub fn prepare_initial(input: BlochAngles, channel: ChannelParams) -> DensityMatrix {
    input.state().density().tensor(&channel_state(channel))
}

/// Applies the projector `op` (acting on the whole register) and returns the
/// outcome probability with the normalized post-measurement state.
fn project(state: &DensityMatrix, op: &ComplexMatrix) -> Result<(f64, DensityMatrix)> {
    let probability = op.trace_product_re(state.matrix());
    if probability < DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateOutcome { probability });
    }
    let post = &(op * state.matrix()) * op;
    Ok((probability, DensityMatrix::from_matrix_unchecked(post.scale_real(1.0 / probability))))
}

/// Alice's Bell measurement with outcome `m` on qubits 0 and 1.
pub fn alice_measure(state: &DensityMatrix, m: usize) -> Result<(f64, DensityMatrix)> {
    if state.qubits() != 4 {
        return invalid(format!("Alice measures a 4-qubit register, got {} qubits", state.qubits()));
    }
    if !(1..=4).contains(&m) {
        return invalid(format!("Alice's outcome {m} outside 1..=4"));
    }
    let op = kron(&bell_projectors()[m - 1], &ComplexMatrix::identity(4));
    project(state, &op)
}

/// Bob's measurement with outcome `n` on the first qubit of the Bob–Charlie state.
pub fn bob_measure(pi_34: &DensityMatrix, nu: f64, n: usize) -> Result<(f64, DensityMatrix)> {
    if pi_34.qubits() != 2 {
        return invalid(format!("Bob measures a 2-qubit register, got {} qubits", pi_34.qubits()));
    }
    if !(1..=2).contains(&n) {
        return invalid(format!("Bob's outcome {n} outside 1..=2"));
    }
    let op = kron(&bob_projectors(nu)[n - 1], &ComplexMatrix::identity(2));
    project(pi_34, &op)
}

/// Charlie's correction `u^{mn}`.
pub fn charlie_unitary(m: usize, n: usize) -> Result<ComplexMatrix> {
    Ok(match (m, n) {
        (1, 1) | (2, 2) => ComplexMatrix::identity(2),
        (1, 2) | (2, 1) => pauli::z(),
        (3, 1) | (4, 2) => pauli::x(),
        (3, 2) | (4, 1) => pauli::y(),
        _ => return invalid(format!("no correction for outcome pair ({m}, {n})")),
    })
}

pub fn charlie_correct(chi: &DensityMatrix, m: usize, n: usize) -> Result<DensityMatrix> {
    if chi.qubits() != 1 {
        return invalid(format!("Charlie corrects a single qubit, got {} qubits", chi.qubits()));
    }
    let u = charlie_unitary(m, n)?;
    Ok(DensityMatrix::from_matrix_unchecked(chi.matrix().conjugate_by(&u)))
}

/// Bob–Charlie state after Alice reports `m`.
pub fn bob_charlie_state(initial: &DensityMatrix, m: usize) -> Result<(f64, DensityMatrix)> {
    let (p, post) = alice_measure(initial, m)?;
    Ok((p, partial_trace(&post, &[2, 3])?))
}

/// Evaluates every `(m, n)` branch, ordered `m`-major.
pub fn run_protocol(input: BlochAngles, channel: ChannelParams, nu: f64) -> Result<Vec<OutcomeRecord>> {
    let initial = prepare_initial(input, channel);
    let mut records = Vec::with_capacity(8);
    for m in 1..=4 {
        let (p_m, pi_34) = bob_charlie_state(&initial, m)?;
        for n in 1..=2 {
            let record = match bob_measure(&pi_34, nu, n) {
                Ok((q_mn, post)) => {
                    let chi = partial_trace(&post, &[1])?;
                    OutcomeRecord { m, n, p_m, q_mn, tau_mn: Some(charlie_correct(&chi, m, n)?) }
                }
                Err(Error::DegenerateOutcome { probability }) => {
                    OutcomeRecord { m, n, p_m, q_mn: probability.max(0.0), tau_mn: None }
                }
                Err(e) => return Err(e),
            };
            records.push(record);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NoiseKind;
    use crate::qmat::{ComplexMatrix, C64};
    use crate::states::{ghz, PureState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn angles(theta: f64, phi: f64) -> BlochAngles {
        BlochAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn initial_state_without_noise() {
        let rho = prepare_initial(angles(0.0, 0.0), ChannelParams::noiseless());
        let expected = PureState::basis(1, 0).unwrap().density().tensor(&ghz().density());
        assert!(rho.matrix().distance(expected.matrix()) < 1e-15);
    }

    #[test]
    fn initial_state_factorizes() {
        let params = ChannelParams::new(NoiseKind::Y, 0.3).unwrap();
        let rho = prepare_initial(angles(1.1, 4.0), params);
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        let shared = partial_trace(&rho, &[1, 2, 3]).unwrap();
        assert!(shared.matrix().distance(channel_state(params).matrix()) < 1e-14);
    }

    #[test]
    fn alice_outcomes_are_uniform() {
        for kind in NoiseKind::ALL {
            let rho = prepare_initial(angles(0.9, 2.2), ChannelParams::new(kind, 0.4).unwrap());
            for m in 1..=4 {
                let (p, post) = alice_measure(&rho, m).unwrap();
                assert!((p - 0.25).abs() < 1e-14);
                assert!((post.trace() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn alice_collapse_at_equator() {
        // Input (|0⟩+|1⟩)/√2 with a clean GHZ channel. Projecting qubits 0,1 on
        // |Φ+⟩ leaves Bob and Charlie in (|00⟩ + |11⟩)/√2.
        let rho = prepare_initial(angles(FRAC_PI_2, 0.0), ChannelParams::noiseless());
        let (_, pi) = bob_charlie_state(&rho, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = ComplexMatrix::projector(&[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]);
        assert!(pi.matrix().distance(&expected) < 1e-14);
    }

    #[test]
    fn invalid_arguments() {
        let rho = prepare_initial(angles(0.5, 0.5), ChannelParams::noiseless());
        assert!(alice_measure(&rho, 0).is_err());
        assert!(alice_measure(&rho, 5).is_err());
        assert!(alice_measure(&ghz().density(), 1).is_err());
        let (_, pi) = bob_charlie_state(&rho, 1).unwrap();
        assert!(bob_measure(&pi, 0.3, 3).is_err());
        assert!(charlie_unitary(5, 1).is_err());
        assert!(charlie_unitary(1, 3).is_err());
    }

    #[test]
    fn bob_probability_without_noise() {
        for &(theta, nu) in &[(0.3, 0.2), (2.0, 1.1), (1.4, FRAC_PI_4)] {
            let rho = prepare_initial(angles(theta, 1.0), ChannelParams::noiseless());
            let (_, pi) = bob_charlie_state(&rho, 1).unwrap();
            let (q, _) = bob_measure(&pi, nu, 1).unwrap();
            let expected = 0.5 * (1.0 - (2.0 * nu).cos() * theta.cos());
            assert!((q - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn bob_outcome_can_be_degenerate() {
        // θ = 0, ν = 0: Bob's |μ+⟩ = |1⟩ never fires after outcome m = 1.
        let rho = prepare_initial(angles(0.0, 0.0), ChannelParams::noiseless());
        let (_, pi) = bob_charlie_state(&rho, 1).unwrap();
        assert!(matches!(bob_measure(&pi, 0.0, 1), Err(Error::DegenerateOutcome { .. })));
        let records = run_protocol(angles(0.0, 0.0), ChannelParams::noiseless(), 0.0).unwrap();
        assert!(records[0].tau_mn.is_none());
        let total: f64 = records.iter().map(OutcomeRecord::weight).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn corrections() {
        let chi = angles(1.0, 0.5).state().density();
        let same = charlie_correct(&chi, 1, 1).unwrap();
        assert!(same.matrix().distance(chi.matrix()) < 1e-15);
        let flipped = charlie_correct(&chi, 3, 2).unwrap();
        assert!(flipped.matrix().distance(&chi.matrix().conjugate_by(&pauli::y())) < 1e-15);
    }

    #[test]
    fn perfect_teleportation_at_quarter_pi() {
        for &(theta, phi) in &[(0.0, 0.0), (0.7, 1.9), (FRAC_PI_2, 3.0), (2.5, 5.5)] {
            let input = angles(theta, phi);
            let rho_in = input.state().density();
            let records = run_protocol(input, ChannelParams::noiseless(), FRAC_PI_4).unwrap();
            assert_eq!(records.len(), 8);
            for r in &records {
                let tau = r.tau_mn.as_ref().unwrap();
                assert!(tau.matrix().distance(rho_in.matrix()) < 1e-12, "branch ({}, {})", r.m, r.n);
            }
            let total: f64 = records.iter().map(OutcomeRecord::weight).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }
}

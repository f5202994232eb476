//! Invariant suites runnable outside the test harness.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{channel_state, evolve_ghz, ChannelParams, NoiseKind};
use crate::convexroof::{ensemble_from_isometry, minimize_tangle, IsometryParams, Support};
use crate::error::{Error, Result};
use crate::fidelity::{
    bob_conditional_average_closed, bob_fidelities, bob_probability_closed, charlie_average, charlie_average_closed,
};
use crate::protocol::{alice_measure, prepare_initial, run_protocol};
use crate::qmat::{herm_eig, partial_trace, partial_transpose_matrix, trace_norm, ComplexMatrix, DensityMatrix, C64};
use crate::states::{ghz, w_state, BlochAngles, PureState};
use crate::tangles::{
    appendix_a_suite, concurrence, negativity, one_tangle, pi_tangle, pi_tangle_closed, three_tangle_pure, Cut,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Qmat,
    Channels,
    Protocol,
    Fidelity,
    Tangles,
    Convexroof,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Qmat, Suite::Channels, Suite::Protocol, Suite::Fidelity, Suite::Tangles, Suite::Convexroof];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Qmat => "qmat",
            Suite::Channels => "channels",
            Suite::Protocol => "protocol",
            Suite::Fidelity => "fidelity",
            Suite::Tangles => "tangles",
            Suite::Convexroof => "convexroof",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
            Error::InvalidArgument(format!("unknown suite '{s}'; valid suites are all, {}", names.join(", ")))
        })
    }
}

/// Outcome of one check: the largest error seen against its tolerance.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_error.is_finite() && self.max_error <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: max error {:.3e} (tolerance {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.max_error,
            self.tolerance
        )
    }
}

const GRID: [f64; 6] = [0.0, 0.05, 0.146, 0.25, 0.5, 1.0];

fn random_pure(rng: &mut ChaCha8Rng, qubits: usize) -> PureState {
    let amps = (0..1 << qubits).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    PureState::normalized(amps).expect("random vector is nonzero")
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + &a.adjoint()).scale_real(0.5)
}

fn random_angles(rng: &mut ChaCha8Rng) -> BlochAngles {
    BlochAngles::new(rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..std::f64::consts::TAU))
        .expect("sampled inside the valid ranges")
}

fn params(kind: NoiseKind, kt: f64) -> ChannelParams {
    ChannelParams::new(kind, kt).expect("grid values are valid")
}

fn max_over<I: IntoIterator<Item = f64>>(errors: I) -> f64 {
    errors.into_iter().fold(0.0, |acc, e| if e.is_nan() { f64::NAN } else { acc.max(e) })
}

fn check(suite: Suite, name: &'static str, tolerance: f64, max_error: f64) -> CheckResult {
    CheckResult { suite, name, max_error, tolerance }
}

fn qmat_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let s = Suite::Qmat;
    let mut eig_err: f64 = 0.0;
    let mut ptrace_err: f64 = 0.0;
    let mut norm_err: f64 = 0.0;
    for _ in 0..20 {
        let h = random_hermitian(rng, 8);
        eig_err = eig_err.max(herm_eig(&h)?.reconstruct().distance(&h));
        let rho = random_pure(rng, 3).density();
        let reduced = partial_trace(&rho, &[0, 2])?;
        ptrace_err = ptrace_err.max((reduced.trace() - 1.0).abs());
        let twice = partial_transpose_matrix(&partial_transpose_matrix(rho.matrix(), 3, 1)?, 3, 1)?;
        ptrace_err = ptrace_err.max(twice.distance(rho.matrix()));
        norm_err = norm_err.max((trace_norm(rho.matrix()) - 1.0).abs());
    }
    Ok(vec![
        check(s, "eigendecomposition reconstructs", 1e-10, eig_err),
        check(s, "partial trace and transpose", 1e-12, ptrace_err),
        check(s, "trace norm of a state is one", 1e-10, norm_err),
    ])
}

fn channel_checks() -> Result<Vec<CheckResult>> {
    let s = Suite::Channels;
    let mut lindblad: f64 = 0.0;
    let mut validity: f64 = 0.0;
    for kind in NoiseKind::NOISY {
        for kt in [0.05, 0.2] {
            let p = params(kind, kt);
            lindblad = lindblad.max(evolve_ghz(p).matrix().distance(channel_state(p).matrix()));
        }
        for kt in GRID {
            let rho = channel_state(params(kind, kt));
            validity = validity.max((rho.trace() - 1.0).abs()).max((-rho.min_eigenvalue()).max(0.0));
        }
    }
    Ok(vec![
        check(s, "Lindblad evolution matches closed forms", 1e-6, lindblad),
        check(s, "channel states are valid", 1e-12, validity),
    ])
}

fn protocol_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let s = Suite::Protocol;
    let mut alice: f64 = 0.0;
    let mut bob: f64 = 0.0;
    let mut perfect: f64 = 0.0;
    for kind in NoiseKind::ALL {
        for kt in [0.0, 0.1, 0.5] {
            let p = params(kind, kt);
            let input = random_angles(rng);
            let nu = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
            let initial = prepare_initial(input, p);
            for m in 1..=4 {
                alice = alice.max((alice_measure(&initial, m)?.0 - 0.25).abs());
            }
            for r in run_protocol(input, p, nu)? {
                bob = bob.max((r.q_mn - bob_probability_closed(input, p, nu, r.m, r.n)?).abs());
            }
        }
    }
    for _ in 0..5 {
        let input = random_angles(rng);
        let target = input.state().density();
        for r in run_protocol(input, ChannelParams::noiseless(), FRAC_PI_4)? {
            let tau = r.tau_mn.expect("no degenerate branch at ν = π/4");
            perfect = perfect.max(tau.matrix().distance(target.matrix()));
        }
    }
    Ok(vec![
        check(s, "Alice outcomes are uniform", 1e-12, alice),
        check(s, "Bob outcome probabilities match closed forms", 1e-10, bob),
        check(s, "noiseless teleportation at ν = π/4 is perfect", 1e-12, perfect),
    ])
}

fn fidelity_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let s = Suite::Fidelity;
    let mut charlie: f64 = 0.0;
    let mut total: f64 = 0.0;
    let mut conditional: f64 = 0.0;
    for kind in NoiseKind::ALL {
        let p = params(kind, 0.2);
        let nu = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        charlie = charlie.max((charlie_average(p, nu) - charlie_average_closed(p, nu)).abs());
        let input = random_angles(rng);
        total = total.max((bob_fidelities(input, p, nu, None)?.average - 0.5).abs());
        let m = rng.random_range(1..=4);
        let report = bob_fidelities(input, p, nu, Some(m))?;
        conditional = conditional.max((report.average - bob_conditional_average_closed(p, nu, m)?).abs());
    }
    Ok(vec![
        check(s, "Charlie's average fidelity matches closed forms", 1e-7, charlie),
        check(s, "Bob's total average fidelity is 1/2", 1e-10, total),
        check(s, "Bob's conditional averages match closed forms", 1e-7, conditional),
    ])
}

fn tangle_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let s = Suite::Tangles;
    let mut closed: f64 = 0.0;
    let mut monogamy: f64 = 0.0;
    for kind in NoiseKind::ALL {
        for kt in GRID {
            let p = params(kind, kt);
            let b = pi_tangle(&channel_state(p))?;
            closed = closed.max((b.pi_tangle - pi_tangle_closed(p)).abs());
            monogamy = monogamy.max(max_over(b.pi_components.map(|r| -r)));
        }
    }
    let mut ckw: f64 = 0.0;
    let mut hyper: f64 = 0.0;
    for _ in 0..50 {
        let psi = random_pure(rng, 3);
        let rho = psi.density();
        let b = pi_tangle(&rho)?;
        monogamy = monogamy.max(max_over(b.pi_components.map(|r| -r)));
        let c_ab = concurrence(&partial_trace(&rho, &[0, 1])?)?;
        let c_ac = concurrence(&partial_trace(&rho, &[0, 2])?)?;
        let residual = one_tangle(&psi, 0)? - c_ab * c_ab - c_ac * c_ac;
        ckw = ckw.max(-residual);
        hyper = hyper.max((three_tangle_pure(&psi)? - residual).abs());
    }
    let landmarks = max_over([
        (three_tangle_pure(&ghz())? - 1.0).abs(),
        three_tangle_pure(&w_state())?,
        (pi_tangle(&ghz().density())?.pi_tangle - 1.0).abs(),
        (pi_tangle(&w_state().density())?.pi_tangle - 4.0 * (5f64.sqrt() - 1.0) / 9.0).abs(),
        (negativity(&ghz().density(), Cut::Single(0))? - 1.0).abs(),
    ]);
    let appendix = appendix_a_suite();
    Ok(vec![
        check(s, "π-tangle matches closed forms", 1e-8, closed),
        check(s, "negativity monogamy residuals are nonnegative", 1e-10, monogamy.max(0.0)),
        check(s, "CKW residuals are nonnegative", 1e-10, ckw.max(0.0)),
        check(s, "hyperdeterminant equals the CKW residual", 1e-8, hyper),
        check(s, "GHZ and W landmarks", 1e-10, landmarks),
        check(s, "J-family tangle closed form", 1e-10, appendix.grid_max_error),
        check(s, "zero-tangle decomposition of the GHZ complement", 1e-12, appendix.zero_pair_max_tangle.max(appendix.mixture_error)),
    ])
}

fn convexroof_checks(rng: &mut ChaCha8Rng, seed: u64) -> Result<Vec<CheckResult>> {
    let s = Suite::Convexroof;
    let mut recon: f64 = 0.0;
    for kind in NoiseKind::NOISY {
        let rho: DensityMatrix = channel_state(params(kind, 0.2));
        let rank = Support::of(&rho)?.rank();
        let u = IsometryParams::random(rank + 2, rank, rng)?;
        recon = recon.max(ensemble_from_isometry(&rho, &u)?.reconstruction_error(&rho));
    }
    let (z, _) = minimize_tangle(&channel_state(params(NoiseKind::Z, 0.1)), 2, 8, seed)?;
    let (x, _) = minimize_tangle(&channel_state(params(NoiseKind::X, 0.12)), 8, 8, seed)?;
    Ok(vec![
        check(s, "isometries reconstruct the state", 1e-9, recon),
        check(s, "Z-noise optimum is reached", 1e-4, (z - (-1.2f64).exp()).abs()),
        check(s, "X-noise tangle vanishes past the threshold", 1e-3, x.max(0.0)),
    ])
}

/// Runs one suite; random inputs are drawn from a generator seeded by `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Qmat => qmat_checks(&mut rng),
        Suite::Channels => channel_checks(),
        Suite::Protocol => protocol_checks(&mut rng),
        Suite::Fidelity => fidelity_checks(&mut rng),
        Suite::Tangles => tangle_checks(&mut rng),
        Suite::Convexroof => convexroof_checks(&mut rng, seed),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        out.extend(run_suite(suite, seed)?);
    }
    Ok(out)
}

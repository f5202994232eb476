//! Charlie's and Bob's teleportation fidelities, pointwise and averaged over
//! the Bloch sphere, together with the closed-form expressions they are
//! checked against.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::channels::{ChannelParams, NoiseKind};
use crate::error::{invalid, Result};
use crate::protocol::{run_protocol, OutcomeRecord};
use crate::qmat::DensityMatrix;
use crate::states::{bob_projectors, BlochAngles};

/// Gauss–Legendre nodes in `cos θ`.
pub const POLAR_NODES: usize = 32;
/// Trapezoid nodes in `φ`.
pub const AZIMUTH_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub pointwise: f64,
    pub average: f64,
    pub kind: NoiseKind,
    pub nu: f64,
    pub kappa_t: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn polar_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(POLAR_NODES))
}

/// `(1/4π) ∫ sinθ dθ dφ f(θ, φ)`: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
pub fn sphere_average<F>(f: F) -> f64
where
    F: Fn(BlochAngles) -> f64 + Sync,
{
    let (nodes, weights) = polar_rule();
    let rows: Vec<f64> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&u, &w)| {
            let theta = u.acos();
            let ring: f64 = (0..AZIMUTH_NODES)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / AZIMUTH_NODES as f64;
                    f(BlochAngles::new(theta, phi).expect("quadrature node on the sphere"))
                })
                .sum();
            w * ring / AZIMUTH_NODES as f64
        })
        .collect();
    0.5 * rows.iter().sum::<f64>()
}

/// `Tr[τ ρ_in]`.
pub fn outcome_fidelity(tau: &DensityMatrix, input: BlochAngles) -> f64 {
    tau.matrix().trace_product_re(input.state().density().matrix())
}

fn charlie_from_records(records: &[OutcomeRecord], input: BlochAngles) -> f64 {
    records
        .iter()
        .filter_map(|r| r.tau_mn.as_ref().map(|tau| r.weight() * outcome_fidelity(tau, input)))
        .sum()
}

/// `F_C(θ, φ) = Σ P_m q_mn Tr[τ_mn ρ_in]` from the simulated protocol.
pub fn charlie_pointwise(input: BlochAngles, channel: ChannelParams, nu: f64) -> Result<f64> {
    Ok(charlie_from_records(&run_protocol(input, channel, nu)?, input))
}

/// Sphere average of [`charlie_pointwise`].
pub fn charlie_average(channel: ChannelParams, nu: f64) -> f64 {
    sphere_average(|a| charlie_pointwise(a, channel, nu).expect("protocol on a valid input"))
}

/// Closed form of `F_C(θ, φ)` for each noise family.
pub fn charlie_pointwise_closed(input: BlochAngles, channel: ChannelParams, nu: f64) -> f64 {
    let kt = channel.kappa_t;
    let s2n = (2.0 * nu).sin();
    let (st, ct) = input.theta().sin_cos();
    let (sp, cp) = input.phi().sin_cos();
    let (st2, ct2) = (st * st, ct * ct);
    match channel.kind {
        NoiseKind::None => 1.0 - 0.5 * (1.0 - s2n) * st2,
        NoiseKind::X => {
            0.5 * ((1.0 + st2 * cp * cp * s2n) + (-4.0 * kt).exp() * (ct2 + st2 * sp * sp * s2n))
        }
        NoiseKind::Y => {
            0.5 * (1.0
                + (-2.0 * kt).exp() * st2 * sp * sp * s2n
                + (-4.0 * kt).exp() * ct2
                + (-6.0 * kt).exp() * st2 * cp * cp * s2n)
        }
        NoiseKind::Z => 1.0 - 0.5 * (1.0 - s2n * (-6.0 * kt).exp()) * st2,
        NoiseKind::Isotropic => 0.5 * (1.0 + (-8.0 * kt).exp() * ct2 + (-12.0 * kt).exp() * st2 * s2n),
    }
}

/// Closed form of Charlie's sphere-averaged fidelity `F̄_C`.
pub fn charlie_average_closed(channel: ChannelParams, nu: f64) -> f64 {
    let kt = channel.kappa_t;
    let s2n = (2.0 * nu).sin();
    let e = |k: f64| (-k * kt).exp();
    match channel.kind {
        NoiseKind::None => (2.0 + s2n) / 3.0,
        NoiseKind::X => ((3.0 + s2n) + e(4.0) * (1.0 + s2n)) / 6.0,
        NoiseKind::Y => (3.0 + e(2.0) * s2n + e(4.0) + e(6.0) * s2n) / 6.0,
        NoiseKind::Z => (2.0 + e(6.0) * s2n) / 3.0,
        NoiseKind::Isotropic => (3.0 + e(8.0) + 2.0 * s2n * e(12.0)) / 6.0,
    }
}

/// Factor by which noise shrinks the `cos 2ν cos θ` term of Bob's outcome
/// probabilities.
pub fn bob_probability_decay(channel: ChannelParams) -> f64 {
    match channel.kind {
        NoiseKind::None | NoiseKind::Z => 1.0,
        NoiseKind::X | NoiseKind::Y => (-4.0 * channel.kappa_t).exp(),
        NoiseKind::Isotropic => (-8.0 * channel.kappa_t).exp(),
    }
}

/// Closed form of `q_mn`.
pub fn bob_probability_closed(input: BlochAngles, channel: ChannelParams, nu: f64, m: usize, n: usize) -> Result<f64> {
    let sign = match (m, n) {
        (1, 1) | (2, 1) | (3, 2) | (4, 2) => -1.0,
        (1, 2) | (2, 2) | (3, 1) | (4, 1) => 1.0,
        _ => return invalid(format!("no outcome pair ({m}, {n})")),
    };
    Ok(0.5 * (1.0 + sign * (2.0 * nu).cos() * input.theta().cos() * bob_probability_decay(channel)))
}

/// Closed form of Bob's conditional average fidelity `F̄_B^m`.
pub fn bob_conditional_average_closed(channel: ChannelParams, nu: f64, m: usize) -> Result<f64> {
    let c2 = (2.0 * nu).cos().powi(2);
    let e = bob_probability_decay(channel);
    match m {
        1 | 2 => Ok((3.0 + e * c2) / 6.0),
        3 | 4 => Ok((3.0 - e * c2) / 6.0),
        _ => invalid(format!("Alice's outcome {m} outside 1..=4")),
    }
}

/// Pointwise `F_B^m(θ, φ)`:
/// `½[1 ± E cos²2ν cos²θ ∓ E sin2ν cos2ν sinθ cosθ cosφ]` with `+` for `m ∈ {1, 2}`
/// and `E` the decay of [`bob_probability_decay`].
pub fn bob_conditional_pointwise_closed(input: BlochAngles, channel: ChannelParams, nu: f64, m: usize) -> Result<f64> {
    let sign = match m {
        1 | 2 => 1.0,
        3 | 4 => -1.0,
        _ => return invalid(format!("Alice's outcome {m} outside 1..=4")),
    };
    let (s2n, c2n) = (2.0 * nu).sin_cos();
    let (st, ct) = input.theta().sin_cos();
    let e = bob_probability_decay(channel);
    Ok(0.5 * (1.0 + sign * e * (c2n * c2n * ct * ct - s2n * c2n * st * ct * input.phi().cos())))
}

/// Bob's fidelity with the input, assuming he keeps the post-measurement
/// state `N_n`. With `m = None` his outcome is averaged over Alice's results
/// (total fidelity); with `m = Some(k)` it is conditioned on Alice reporting `k`.
fn bob_pointwise(input: BlochAngles, channel: ChannelParams, nu: f64, m: Option<usize>) -> Result<f64> {
    let records = run_protocol(input, channel, nu)?;
    let rho_in = input.state().density();
    let overlaps = bob_projectors(nu).map(|nb| nb.trace_product_re(rho_in.matrix()));
    let mut weight = [0.0; 2];
    for r in &records {
        match m {
            None => weight[r.n - 1] += r.weight(),
            Some(k) if r.m == k => weight[r.n - 1] += r.q_mn,
            Some(_) => {}
        }
    }
    Ok(weight[0] * overlaps[0] + weight[1] * overlaps[1])
}

/// Bob's total (`m = None`) or conditional (`m = Some(1..=4)`) fidelity at
/// `input`, with its sphere average, both from the simulated protocol.
pub fn bob_fidelities(input: BlochAngles, channel: ChannelParams, nu: f64, m: Option<usize>) -> Result<FidelityReport> {
    if let Some(k) = m {
        if !(1..=4).contains(&k) {
            return invalid(format!("Alice's outcome {k} outside 1..=4"));
        }
    }
    let pointwise = bob_pointwise(input, channel, nu, m)?;
    let average = sphere_average(|a| bob_pointwise(a, channel, nu, m).expect("protocol on a valid input"));
    Ok(FidelityReport { pointwise, average, kind: channel.kind, nu, kappa_t: channel.kappa_t })
}

/// Charlie's pointwise fidelity at `input` and its sphere average.
pub fn charlie_fidelities(input: BlochAngles, channel: ChannelParams, nu: f64) -> Result<FidelityReport> {
    Ok(FidelityReport {
        pointwise: charlie_pointwise(input, channel, nu)?,
        average: charlie_average(channel, nu),
        kind: channel.kind,
        nu,
        kappa_t: channel.kappa_t,
    })
}

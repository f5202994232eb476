//! Entanglement measures for two and three qubits.
//!
//! Pure-state three-tangle comes straight from the Cayley hyperdeterminant of
//! the amplitudes. Mixed states get the negativity-based π-tangle numerically,
//! and the convex-roof three-tangle in closed form for the Z and X channels
//! (with the decompositions that realize it) plus constructive upper bounds
//! for the Y and isotropic channels.

use std::f64::consts::PI;

use crate::channels::{ChannelParams, NoiseKind};
use crate::error::{invalid, Result};
use crate::qmat::{
    herm_eig, kron, partial_trace, partial_transpose, partial_transpose_matrix, pauli, psd_sqrt, trace_norm,
    ComplexMatrix, DensityMatrix, C64,
};
use crate::states::{ghz_basis, j_family, x_family, z_family, PureState};

/// Largest GHZ weight of the X-noise state whose three-tangle vanishes.
pub const X0: f64 = 0.75;

/// Tangent point `(2 + √3)/4` where the linear segment from `|GHZ,1⟩` meets `α_I`.
pub fn x1() -> f64 {
    (2.0 + 3f64.sqrt()) / 4.0
}

/// Onset of non-convexity of `α_I`, `(1 + 2^{1/3} + 4^{1/3})/4`.
pub fn x_star() -> f64 {
    (1.0 + 2f64.cbrt() + 4f64.cbrt()) / 4.0
}

/// `κt` at which the X-noise GHZ weight reaches [`x1`].
pub fn mu1_x() -> f64 {
    -((4.0 * x1() - 1.0) / 3.0).ln() / 4.0
}

/// `κt` beyond which the X-noise three-tangle vanishes.
pub fn mu2_x() -> f64 {
    -(2.0f64 / 3.0).ln() / 4.0
}

/// `κt` bounds of the three regimes of the Y-noise upper bound.
pub fn nu1_y() -> f64 {
    -(3f64.sqrt() - 1.0).ln() / 2.0
}

pub fn nu2_y() -> f64 {
    2f64.ln() / 2.0
}

/// `κt` at which the Y-noise π-tangle reaches zero (Cardano root).
pub fn y_star() -> f64 {
    let r = 33f64.sqrt();
    ((1.0 + (19.0 + 3.0 * r).cbrt() + (19.0 - 3.0 * r).cbrt()) / 3.0).ln()
}

/// `κt` at which the isotropic π-tangle reaches zero.
pub fn i_star() -> f64 {
    let r = 321f64.sqrt();
    (((54.0 + 3.0 * r).cbrt() + (54.0 - 3.0 * r).cbrt()) / 3.0).ln() / 4.0
}

/// Weighted pure states `{(p_i, ψ_i)}` with `Σ p_i = 1`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return invalid("ensemble needs at least one member");
        };
        let qubits = first.qubits();
        if members.iter().any(|(p, s)| *p < 0.0 || !p.is_finite() || s.qubits() != qubits) {
            return invalid("ensemble weights must be nonnegative and members must share a register");
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return invalid(format!("ensemble weights sum to {total}, not 1"));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn qubits(&self) -> usize {
        self.members[0].1.qubits()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn density(&self) -> DensityMatrix {
        let dim = 1 << self.qubits();
        let m = self.members.iter().fold(ComplexMatrix::zeros(dim), |acc, (p, s)| {
            &acc + &ComplexMatrix::projector(s.amplitudes()).scale_real(*p)
        });
        DensityMatrix::new(m).expect("mixture of pure states is a density matrix")
    }

    /// Frobenius distance between the mixture and `target`.
    pub fn reconstruction_error(&self, target: &DensityMatrix) -> f64 {
        self.density().matrix().distance(target.matrix())
    }

    /// Mixes two ensembles with weights `w` and `1 - w`, dropping zero-weight members.
    pub fn mix(w: f64, a: &Ensemble, b: &Ensemble) -> Result<Self> {
        let members = a
            .members
            .iter()
            .map(|(p, s)| (w * p, s.clone()))
            .chain(b.members.iter().map(|(p, s)| ((1.0 - w) * p, s.clone())))
            .filter(|(p, _)| *p > 0.0)
            .collect();
        Self::new(members)
    }

    /// Applies the same unitary to every member.
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        Self { members: self.members.iter().map(|(p, s)| (*p, s.evolve(u))).collect() }
    }
}

fn check_qubits(rho: &DensityMatrix, qubits: usize) -> Result<()> {
    if rho.qubits() != qubits {
        return invalid(format!("expected a {qubits}-qubit state, got {} qubits", rho.qubits()));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_qubits(rho, 2)?;
    let yy = kron(&pauli::y(), &pauli::y());
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    let root = psd_sqrt(rho.matrix())?;
    let r = &(&root * &flipped) * &root;
    let r = (&r + &r.adjoint()).scale_real(0.5);
    // rounding-level eigenvalues would otherwise contribute their square roots
    let mut lambdas: Vec<f64> =
        herm_eig(&r)?.values.iter().map(|&v| if v > 1e-13 { v.sqrt() } else { 0.0 }).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Which bipartition a negativity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cut {
    /// One qubit against all others: `N_{q(rest)}`.
    Single(usize),
    /// Reduce to two qubits, then transpose the first: `N_{ab}`.
    Pair(usize, usize),
}

/// `‖ρ^{T}‖₁ - 1` for the given cut.
pub fn negativity(rho: &DensityMatrix, cut: Cut) -> Result<f64> {
    let norm = match cut {
        Cut::Single(q) => trace_norm(&partial_transpose(rho, q)?),
        Cut::Pair(a, b) => {
            if a == b {
                return invalid("pair negativity needs two distinct qubits");
            }
            let reduced = partial_trace(rho, &[a, b])?;
            // kept qubits come out in ascending order
            let first = usize::from(a > b);
            trace_norm(&partial_transpose_matrix(reduced.matrix(), 2, first)?)
        }
    };
    Ok((norm - 1.0).max(0.0))
}

/// Local purity based one-tangle `4 det ρ_q` of a pure state.
pub fn one_tangle(psi: &PureState, qubit: usize) -> Result<f64> {
    let reduced = partial_trace(&psi.density(), &[qubit])?;
    let m = reduced.matrix();
    Ok(4.0 * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re)
}

/// `d₁ - 2d₂ + 4d₃` for raw (not necessarily normalized) amplitudes.
pub(crate) fn hyperdeterminant(a: &[C64]) -> C64 {
    let d1 = a[0b000] * a[0b000] * a[0b111] * a[0b111]
        + a[0b001] * a[0b001] * a[0b110] * a[0b110]
        + a[0b010] * a[0b010] * a[0b101] * a[0b101]
        + a[0b100] * a[0b100] * a[0b011] * a[0b011];
    let d2 = a[0b000] * a[0b111] * a[0b011] * a[0b100]
        + a[0b000] * a[0b111] * a[0b101] * a[0b010]
        + a[0b000] * a[0b111] * a[0b110] * a[0b001]
        + a[0b011] * a[0b100] * a[0b101] * a[0b010]
        + a[0b011] * a[0b100] * a[0b110] * a[0b001]
        + a[0b101] * a[0b010] * a[0b110] * a[0b001];
    let d3 = a[0b000] * a[0b110] * a[0b101] * a[0b011] + a[0b111] * a[0b001] * a[0b010] * a[0b100];
    d1 - d2 * 2.0 + d3 * 4.0
}

/// `τ₃ = 4|d₁ - 2d₂ + 4d₃|` of a three-qubit pure state.
pub fn three_tangle_pure(psi: &PureState) -> Result<f64> {
    if psi.qubits() != 3 {
        return invalid(format!("three-tangle needs 3 qubits, got {}", psi.qubits()));
    }
    Ok(4.0 * hyperdeterminant(psi.amplitudes()).norm())
}

/// Negativities and monogamy residuals entering the π-tangle.
#[derive(Clone, Debug, PartialEq)]
pub struct TangleBreakdown {
    /// `N²_{A(BC)}, N²_{B(AC)}, N²_{C(AB)}`.
    pub one_tangles: [f64; 3],
    /// `N_{AB}, N_{AC}, N_{BC}`.
    pub pairwise: [f64; 3],
    /// `π_A, π_B, π_C`.
    pub pi_components: [f64; 3],
    pub pi_tangle: f64,
}

pub fn pi_tangle(rho: &DensityMatrix) -> Result<TangleBreakdown> {
    check_qubits(rho, 3)?;
    let mut one_tangles = [0.0; 3];
    for (q, slot) in one_tangles.iter_mut().enumerate() {
        *slot = negativity(rho, Cut::Single(q))?.powi(2);
    }
    let pairwise = [
        negativity(rho, Cut::Pair(0, 1))?,
        negativity(rho, Cut::Pair(0, 2))?,
        negativity(rho, Cut::Pair(1, 2))?,
    ];
    let [ab, ac, bc] = pairwise.map(|n| n * n);
    let pi_components = [one_tangles[0] - ab - ac, one_tangles[1] - ab - bc, one_tangles[2] - ac - bc];
    let pi_tangle = pi_components.iter().sum::<f64>() / 3.0;
    Ok(TangleBreakdown { one_tangles, pairwise, pi_components, pi_tangle })
}

/// `(1/64)(|g| - g)²`, written as `max(0, -g)²/16`.
fn clipped_square(g: f64) -> f64 {
    let neg = (-g).max(0.0);
    neg * neg / 16.0
}

/// Closed-form π-tangle of the noisy GHZ channel states.
pub fn pi_tangle_closed(channel: ChannelParams) -> f64 {
    let kt = channel.kappa_t;
    let e = |k: f64| (-k * kt).exp();
    match channel.kind {
        NoiseKind::None => 1.0,
        NoiseKind::X => e(8.0),
        NoiseKind::Y => clipped_square(1.0 - 3.0 * e(2.0) - e(4.0) - e(6.0)),
        NoiseKind::Z => e(12.0),
        NoiseKind::Isotropic => clipped_square(1.0 - e(8.0) - 4.0 * e(12.0)),
    }
}

/// Three-tangle of `|X(x, 0, 0, 0)⟩`, which is also the average tangle of
/// the four-member X decomposition.
pub fn alpha_one(x: f64) -> f64 {
    let y = 1.0 - x;
    x * x - y * y / 3.0 - 2.0 * x * y - 8.0 * 3f64.sqrt() / 9.0 * (x * y * y * y).sqrt()
}

/// Average tangle of the X decomposition that mixes `|X(x₁, ·)⟩` members with `|GHZ,1⟩`.
pub fn alpha_two(x: f64, x1: f64) -> f64 {
    ((1.0 - x) * alpha_one(x1) + (x - x1)) / (1.0 - x1)
}

/// Convex-roof three-tangle of `x|GHZ,1⟩⟨GHZ,1| + (1-x)/3 Σ_{k=3,5,7}|GHZ,k⟩⟨GHZ,k|`.
pub fn x_state_tangle(x: f64) -> f64 {
    let x1 = x1();
    if x <= X0 {
        0.0
    } else if x <= x1 {
        alpha_one(x)
    } else {
        alpha_two(x, x1)
    }
}

/// Closed-form convex-roof three-tangle for the channels where it is known
/// exactly (no noise, Z and X noise).
pub fn three_tangle_closed(kind: NoiseKind, kappa_t: f64) -> Result<f64> {
    let params = ChannelParams::new(kind, kappa_t)?;
    match kind {
        NoiseKind::None => Ok(1.0),
        NoiseKind::Z => Ok((1.0 - 2.0 * params.z()).powi(2)),
        NoiseKind::X => Ok(x_state_tangle(params.x())),
        NoiseKind::Y | NoiseKind::Isotropic => invalid(format!(
            "no closed-form three-tangle for {kind} noise; valid kinds are none, x, z"
        )),
    }
}

/// Parameters `(ξ, Y₁, Y₂)` splitting the Y-noise state into two X-type states.
pub fn y_split(kappa_t: f64) -> (f64, f64, f64) {
    let e = (-2.0 * kappa_t).exp();
    let (yp, ym) = (1.0 + e, 1.0 - e);
    let (p2, m2) = (yp * yp, ym * ym);
    (yp * (p2 + 3.0 * m2) / 8.0, p2 / (p2 + 3.0 * m2), m2 / (3.0 * p2 + m2))
}

/// Constructive upper bounds on the three-tangle of the rank-8 channels.
pub fn three_tangle_upper_bound(kind: NoiseKind, kappa_t: f64) -> Result<f64> {
    let params = ChannelParams::new(kind, kappa_t)?;
    match kind {
        NoiseKind::Y => {
            let (xi, y1, _) = y_split(kappa_t);
            Ok(xi * x_state_tangle(y1))
        }
        NoiseKind::Isotropic => {
            let p2 = params.p().powi(2);
            Ok(4.0 * p2 * p2 * p2 / (1.0 + 3.0 * p2))
        }
        _ => invalid(format!("upper bounds are provided for y and isotropic noise, not {kind}")),
    }
}

const SIGN_PATTERNS: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [0.0, PI, PI], [PI, 0.0, PI], [PI, PI, 0.0]];

/// Angle pairs `(θ₁, θ₂)` for which `|J(θ₁, θ₂)⟩` has zero three-tangle.
pub const J_ZERO_PAIRS: [(f64, f64); 8] = [
    (PI / 3.0, 2.0 * PI / 3.0),
    (5.0 * PI / 3.0, 4.0 * PI / 3.0),
    (2.0 * PI / 3.0, PI / 3.0),
    (4.0 * PI / 3.0, 5.0 * PI / 3.0),
    (PI / 3.0, 5.0 * PI / 3.0),
    (5.0 * PI / 3.0, PI / 3.0),
    (2.0 * PI / 3.0, 4.0 * PI / 3.0),
    (4.0 * PI / 3.0, 2.0 * PI / 3.0),
];

/// Zero-tangle decomposition of `(|GHZ,3⟩⟨·| + |GHZ,5⟩⟨·| + |GHZ,7⟩⟨·|)/3`.
pub fn pi_ghz_decomposition() -> Ensemble {
    Ensemble::new(J_ZERO_PAIRS.iter().map(|&(a, b)| (0.125, j_family(a, b))).collect()).unwrap()
}

/// `(|GHZ,3⟩⟨·| + |GHZ,5⟩⟨·| + |GHZ,7⟩⟨·|)/3`.
pub fn pi_ghz() -> DensityMatrix {
    let m = [3, 5, 7].iter().fold(ComplexMatrix::zeros(8), |acc, &k| {
        &acc + &ComplexMatrix::projector(ghz_basis(k).unwrap().amplitudes()).scale_real(1.0 / 3.0)
    });
    DensityMatrix::new(m).unwrap()
}

fn x_members(x: f64, weight: f64) -> Vec<(f64, PureState)> {
    SIGN_PATTERNS.iter().map(|&ph| (weight / 4.0, x_family(x, ph).unwrap())).collect()
}

/// Optimal decomposition of the X-type state with GHZ weight `x ∈ [0, 1]`.
pub fn x_state_decomposition(x: f64) -> Result<Ensemble> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("GHZ weight {x} outside [0, 1]"));
    }
    let x1 = x1();
    let mut members = if x >= x1 {
        let mut m = x_members(x1, (1.0 - x) / (1.0 - x1));
        m.push(((x - x1) / (1.0 - x1), ghz_basis(1)?));
        m
    } else if x >= X0 {
        x_members(x, 1.0)
    } else {
        let mut m = x_members(X0, x / X0);
        let rest = (X0 - x) / X0;
        m.extend(pi_ghz_decomposition().members.into_iter().map(|(p, s)| (p * rest, s)));
        m
    };
    members.retain(|(p, _)| *p > 0.0);
    Ensemble::new(members)
}

/// Decomposition realizing the closed-form three-tangle of Z or X noise.
pub fn optimal_decomposition(kind: NoiseKind, kappa_t: f64) -> Result<Ensemble> {
    let params = ChannelParams::new(kind, kappa_t)?;
    match kind {
        NoiseKind::Z => {
            let z = params.z();
            Ensemble::new(vec![(0.5, z_family(z, 0.0)?), (0.5, z_family(z, PI)?)])
        }
        NoiseKind::X => x_state_decomposition(params.x()),
        _ => invalid(format!("optimal decompositions are known for x and z noise, not {kind}")),
    }
}

/// `σ_z ⊗ I ⊗ I`.
pub fn sigma_z_first() -> ComplexMatrix {
    kron(&kron(&pauli::z(), &ComplexMatrix::identity(2)), &ComplexMatrix::identity(2))
}

/// Decomposition whose average tangle equals [`three_tangle_upper_bound`].
pub fn upper_bound_decomposition(kind: NoiseKind, kappa_t: f64) -> Result<Ensemble> {
    let params = ChannelParams::new(kind, kappa_t)?;
    match kind {
        NoiseKind::Y => {
            let (xi, y1, y2) = y_split(kappa_t);
            let first = x_state_decomposition(y1)?;
            let second = x_state_decomposition(y2)?.evolve(&sigma_z_first());
            Ensemble::mix(xi, &first, &second)
        }
        NoiseKind::Isotropic => {
            let p = params.p();
            let (p2, p3) = (p * p, p * p * p);
            let zeta = (1.0 + 3.0 * p2) / 4.0;
            let z = 0.5 + 2.0 * p3 / (1.0 + 3.0 * p2);
            let ghz_part = Ensemble::new(vec![(0.5, z_family(z, 0.0)?), (0.5, z_family(z, PI)?)])?;
            let product_part = Ensemble::new(
                (1..7).map(|i| (1.0 / 6.0, PureState::basis(3, i).unwrap())).collect(),
            )?;
            Ensemble::mix(zeta, &ghz_part, &product_part)
        }
        _ => invalid(format!("upper-bound decompositions are provided for y and isotropic noise, not {kind}")),
    }
}

/// `(1/9)|1 - (e^{iθ₁} - e^{iθ₂})²| |1 - (e^{iθ₁} + e^{iθ₂})²|`.
pub fn j_tangle_closed(theta1: f64, theta2: f64) -> f64 {
    let (a, b) = (C64::from_polar(1.0, theta1), C64::from_polar(1.0, theta2));
    let one = C64::new(1.0, 0.0);
    (one - (a - b) * (a - b)).norm() * (one - (a + b) * (a + b)).norm() / 9.0
}

/// Numerical evidence that `(|GHZ,3⟩⟨·| + |GHZ,5⟩⟨·| + |GHZ,7⟩⟨·|)/3` has
/// zero three-tangle.
#[derive(Clone, Debug)]
pub struct AppendixReport {
    /// Largest `|τ₃(J) - closed form|` over the angle grid.
    pub grid_max_error: f64,
    pub grid_points: usize,
    /// Largest `τ₃` among the eight zero pairs.
    pub zero_pair_max_tangle: f64,
    /// Frobenius error of the equal-weight eight-member mixture.
    pub mixture_error: f64,
    /// Average tangle of that mixture.
    pub mixture_tangle: f64,
}

impl AppendixReport {
    pub fn passes(&self) -> bool {
        self.grid_max_error < 1e-10 && self.zero_pair_max_tangle < 1e-12 && self.mixture_error < 1e-12
    }
}

pub fn appendix_a_suite() -> AppendixReport {
    appendix_a_with_grid(12)
}

pub fn appendix_a_with_grid(points: usize) -> AppendixReport {
    let mut grid_max_error: f64 = 0.0;
    for i in 0..points {
        for j in 0..points {
            let (t1, t2) = (2.0 * PI * i as f64 / points as f64, 2.0 * PI * j as f64 / points as f64);
            let numeric = three_tangle_pure(&j_family(t1, t2)).unwrap();
            grid_max_error = grid_max_error.max((numeric - j_tangle_closed(t1, t2)).abs());
        }
    }
    let zero_pair_max_tangle = J_ZERO_PAIRS
        .iter()
        .map(|&(a, b)| three_tangle_pure(&j_family(a, b)).unwrap())
        .fold(0.0, f64::max);
    let decomposition = pi_ghz_decomposition();
    AppendixReport {
        grid_max_error,
        grid_points: points * points,
        zero_pair_max_tangle,
        mixture_error: decomposition.reconstruction_error(&pi_ghz()),
        mixture_tangle: crate::convexroof::ensemble_avg_tangle(&decomposition),
    }
}

//! Numerical convex roof of the three-tangle.
//!
//! Every ensemble `{p_j, ψ_j}` of an `r`-rank state `ρ = Σ λ_k |v_k⟩⟨v_k|`
//! with `m` members comes from an `m × r` isometry `U` through
//! `√p_j |ψ_j⟩ = Σ_k U_{jk} √λ_k |v_k⟩`. The search walks over isometries by
//! left-multiplying two-row rotations, so every iterate stays exactly
//! orthonormal and every reported value is an upper bound on the roof.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::qmat::{herm_eig, DensityMatrix, C64, ZERO};
use crate::states::PureState;
use crate::tangles::{hyperdeterminant, Ensemble};

/// Eigenvalues at or below this are outside the support of `ρ`.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Members lighter than this contribute nothing to averages.
pub const WEIGHT_CUTOFF: f64 = 1e-12;

pub const MAX_DEFAULT_MEMBERS: usize = 12;

/// `min(rank + 4, 12)`, never below the rank itself.
pub fn default_members(rank: usize) -> usize {
    (rank + 4).min(MAX_DEFAULT_MEMBERS).max(rank)
}

/// Nonzero part of the spectrum of `ρ`, largest eigenvalue first.
#[derive(Clone, Debug)]
pub struct Support {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Support {
    pub fn of(rho: &DensityMatrix) -> Result<Self> {
        let eig = herm_eig(rho.matrix())?;
        let (values, vectors) = (0..eig.values.len())
            .rev()
            .filter(|&k| eig.values[k] > RANK_CUTOFF)
            .map(|k| (eig.values[k], eig.vector(k)))
            .unzip();
        Ok(Self { values, vectors })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Columns `√λ_k |v_k⟩`.
    fn scaled(&self) -> Vec<Vec<C64>> {
        self.values.iter().zip(&self.vectors).map(|(l, v)| v.iter().map(|a| a * l.sqrt()).collect()).collect()
    }
}

/// An `m × r` complex matrix with orthonormal columns, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryParams {
    members: usize,
    rank: usize,
    entries: Vec<C64>,
}

impl IsometryParams {
    pub fn new(members: usize, rank: usize, entries: Vec<C64>) -> Result<Self> {
        if rank == 0 || members < rank {
            return invalid(format!("an isometry needs 1 ≤ rank ≤ members, got {members} × {rank}"));
        }
        if entries.len() != members * rank {
            return invalid(format!("expected {} entries, got {}", members * rank, entries.len()));
        }
        let params = Self { members, rank, entries };
        let err = params.orthonormality_error();
        if err > 1e-10 {
            return invalid(format!("columns are not orthonormal (error {err:.3e})"));
        }
        Ok(params)
    }

    /// First `r` columns of the `m × m` identity.
    pub fn identity(members: usize, rank: usize) -> Result<Self> {
        let entries = (0..members * rank)
            .map(|i| if i / rank == i % rank { C64::new(1.0, 0.0) } else { ZERO })
            .collect();
        Self::new(members, rank, entries)
    }

    /// Gram–Schmidt orthonormalized complex Gaussian matrix.
    pub fn random(members: usize, rank: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        if rank == 0 || members < rank {
            return invalid(format!("an isometry needs 1 ≤ rank ≤ members, got {members} × {rank}"));
        }
        let mut entries: Vec<C64> = (0..members * rank)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        orthonormalize_columns(&mut entries, members, rank)?;
        Self::new(members, rank, entries)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.entries[j * self.rank + k]
    }

    /// Largest deviation of `U†U` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.rank {
            for b in 0..self.rank {
                let dot: C64 = (0..self.members).map(|j| self.entry(j, a).conj() * self.entry(j, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Modified Gram–Schmidt, run twice for stability.
fn orthonormalize_columns(entries: &mut [C64], members: usize, rank: usize) -> Result<()> {
    for _ in 0..2 {
        for k in 0..rank {
            for prev in 0..k {
                let dot: C64 = (0..members).map(|j| entries[j * rank + prev].conj() * entries[j * rank + k]).sum();
                for j in 0..members {
                    let p = entries[j * rank + prev];
                    entries[j * rank + k] -= dot * p;
                }
            }
            let norm = (0..members).map(|j| entries[j * rank + k].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return invalid("columns are linearly dependent");
            }
            for j in 0..members {
                entries[j * rank + k] /= norm;
            }
        }
    }
    Ok(())
}

fn check_three_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.qubits() != 3 {
        return invalid(format!("the three-tangle roof needs 3 qubits, got {}", rho.qubits()));
    }
    Ok(())
}

/// Unnormalized member `Σ_k U_{jk} √λ_k |v_k⟩`.
fn member_vector(row: &[C64], columns: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![ZERO; columns[0].len()];
    for (u, col) in row.iter().zip(columns) {
        if *u != ZERO {
            for (o, c) in out.iter_mut().zip(col) {
                *o += u * c;
            }
        }
    }
    out
}

/// `p τ₃(φ/√p)` for an unnormalized member `φ` with `p = ‖φ‖²`.
fn weighted_tangle(phi: &[C64]) -> f64 {
    let p: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
    if p < WEIGHT_CUTOFF {
        return 0.0;
    }
    4.0 * hyperdeterminant(phi).norm() / p
}

pub fn ensemble_from_isometry(rho: &DensityMatrix, params: &IsometryParams) -> Result<Ensemble> {
    let support = Support::of(rho)?;
    if support.rank() != params.rank() {
        return invalid(format!("ρ has rank {}, the isometry has {} columns", support.rank(), params.rank()));
    }
    let columns = support.scaled();
    let members = (0..params.members())
        .map(|j| member_vector(&params.entries[j * params.rank..(j + 1) * params.rank], &columns))
        .filter_map(|phi| {
            let p: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
            (p > 1e-14).then(|| PureState::normalized(phi).map(|s| (p, s)))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = members.iter().map(|(p, _)| p).sum();
    Ensemble::new(members.into_iter().map(|(p, s)| (p / total, s)).collect())
}

/// `Σ p_i τ₃(ψ_i)`, skipping members below [`WEIGHT_CUTOFF`].
pub fn ensemble_avg_tangle(e: &Ensemble) -> f64 {
    e.members()
        .iter()
        .filter(|(p, _)| *p >= WEIGHT_CUTOFF)
        .map(|(p, s)| p * 4.0 * hyperdeterminant(s.amplitudes()).norm())
        .sum()
}

/// Isometry reproducing a given decomposition of `ρ`, padded with zero rows up to `members`.
pub fn isometry_from_ensemble(rho: &DensityMatrix, ensemble: &Ensemble, members: usize) -> Result<IsometryParams> {
    let support = Support::of(rho)?;
    let rank = support.rank();
    if ensemble.len() > members {
        return invalid(format!("ensemble has {} members, more than {members}", ensemble.len()));
    }
    let mut entries = vec![ZERO; members * rank];
    for (j, (p, psi)) in ensemble.members().iter().enumerate() {
        for k in 0..rank {
            let overlap = crate::qmat::inner(&support.vectors[k], psi.amplitudes());
            entries[j * rank + k] = overlap * (p / support.values[k]).sqrt();
        }
    }
    let raw = IsometryParams { members, rank, entries };
    let err = raw.orthonormality_error();
    if err > 1e-6 {
        return invalid(format!("ensemble does not decompose ρ (isometry error {err:.3e})"));
    }
    let mut entries = raw.entries;
    orthonormalize_columns(&mut entries, members, rank)?;
    IsometryParams::new(members, rank, entries)
}

/// Search settings for [`minimize_tangle_with`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub members: usize,
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub final_step: f64,
    pub max_sweeps_per_step: usize,
    /// Rotation phases `β = kπ/n` for `k < n` tried on every row pair.
    pub phase_directions: usize,
}

impl SearchOptions {
    pub fn new(members: usize, restarts: usize, seed: u64) -> Self {
        Self { members, restarts, seed, initial_step: 0.3, final_step: 1e-5, max_sweeps_per_step: 400, phase_directions: 4 }
    }
}

/// Best decomposition found; `value` is an upper bound on the convex roof.
#[derive(Clone, Debug)]
pub struct RoofBound {
    pub value: f64,
    pub ensemble: Ensemble,
    /// Final value of each random restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Final value of the run seeded by the supplied decomposition.
    pub warm_value: Option<f64>,
}

struct Descent<'a> {
    columns: &'a [Vec<C64>],
    rank: usize,
    rows: Vec<Vec<C64>>,
    contrib: Vec<f64>,
}

impl<'a> Descent<'a> {
    fn new(columns: &'a [Vec<C64>], params: &IsometryParams) -> Self {
        let rank = params.rank;
        let rows: Vec<Vec<C64>> = params.entries.chunks(rank).map(<[C64]>::to_vec).collect();
        let contrib = rows.iter().map(|r| weighted_tangle(&member_vector(r, columns))).collect();
        Self { columns, rank, rows, contrib }
    }


    /// Rows `(j, k)` after `[[c, -w̄s], [ws, c]]` with `w = e^{iβ}`.
    fn rotate(&self, j: usize, k: usize, t: f64, w: C64) -> (Vec<C64>, Vec<C64>) {
        let (s, c) = t.sin_cos();
        let (a, b) = (&self.rows[j], &self.rows[k]);
        let (ws, wbs) = (w * s, w.conj() * s);
        (
            a.iter().zip(b).map(|(x, y)| x * c - y * wbs).collect(),
            a.iter().zip(b).map(|(x, y)| x * ws + y * c).collect(),
        )
    }

    fn sweep(&mut self, step: f64, phases: &[C64]) -> bool {
        let m = self.rows.len();
        let mut improved = false;
        for j in 0..m {
            for k in j + 1..m {
                for &w in phases {
                    for t in [step, -step] {
                        let (rj, rk) = self.rotate(j, k, t, w);
                        let cj = weighted_tangle(&member_vector(&rj, self.columns));
                        let ck = weighted_tangle(&member_vector(&rk, self.columns));
                        if cj + ck < self.contrib[j] + self.contrib[k] - 1e-15 {
                            self.rows[j] = rj;
                            self.rows[k] = rk;
                            self.contrib[j] = cj;
                            self.contrib[k] = ck;
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }
        improved
    }

    fn run(mut self, opts: &SearchOptions) -> (f64, IsometryParams) {
        let n = opts.phase_directions.max(1);
        let phases: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64)).collect();
        let mut step = opts.initial_step;
        while step >= opts.final_step {
            for _ in 0..opts.max_sweeps_per_step {
                if !self.sweep(step, &phases) {
                    break;
                }
            }
            step /= 2.0;
        }
        let members = self.rows.len();
        let mut entries: Vec<C64> = self.rows.into_iter().flatten().collect();
        // rotations are unitary; this only removes accumulated rounding
        orthonormalize_columns(&mut entries, members, self.rank).expect("rotations preserve rank");
        let params = IsometryParams { members, rank: self.rank, entries };
        let columns = self.columns;
        let value = (0..members)
            .map(|j| weighted_tangle(&member_vector(&params.entries[j * params.rank..(j + 1) * params.rank], columns)))
            .sum();
        (value, params)
    }
}

/// Convex-roof upper bound from `restarts` seeded random isometries, plus an
/// optional run started from `start`. The search uses `max(m, start.len())` rows
/// for the warm run.
pub fn minimize_tangle_with(rho: &DensityMatrix, opts: &SearchOptions, start: Option<&Ensemble>) -> Result<RoofBound> {
    check_three_qubits(rho)?;
    let support = Support::of(rho)?;
    let rank = support.rank();
    if opts.members < rank {
        return invalid(format!("ensemble size {} is below the rank {rank}", opts.members));
    }
    if opts.restarts == 0 {
        return invalid("at least one restart is required");
    }
    let columns = support.scaled();
    let restarts: Vec<(f64, IsometryParams)> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let init = IsometryParams::random(opts.members, rank, &mut rng)?;
            Ok(Descent::new(&columns, &init).run(opts))
        })
        .collect::<Result<_>>()?;
    let warm = start
        .map(|e| {
            let init = isometry_from_ensemble(rho, e, opts.members.max(e.len()))?;
            Ok::<_, crate::Error>(Descent::new(&columns, &init).run(opts))
        })
        .transpose()?;
    let restart_values: Vec<f64> = restarts.iter().map(|(v, _)| *v).collect();
    let warm_value = warm.as_ref().map(|(v, _)| *v);
    let (value, best) = restarts
        .into_iter()
        .chain(warm)
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one run");
    Ok(RoofBound { value, ensemble: ensemble_from_isometry(rho, &best)?, restart_values, warm_value })
}

/// Lowest average tangle over `restarts` seeded searches with `m` members.
pub fn minimize_tangle(rho: &DensityMatrix, m: usize, restarts: usize, seed: u64) -> Result<(f64, Ensemble)> {
    let bound = minimize_tangle_with(rho, &SearchOptions::new(m, restarts, seed), None)?;
    Ok((bound.value, bound.ensemble))
}

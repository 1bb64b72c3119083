//! Extremality of PPT symmetric states via the projector fixed-point system, and
//! the rank-reduction walk towards extremal states.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    compressed_pt_matrix, rank_profile, rank_vector, SymmetricState, ThreeRank, Tolerances,
};
use crate::linalg::{
    c, check_hermitian, eigh, eigvalsh, real_null_space, trace, CMatrix, RMatrix, RVector,
};

/// Hilbert–Schmidt orthonormal real coordinates on `n × n` Hermitian matrices.
#[derive(Clone, Copy, Debug)]
pub struct HermitianBasis {
    pub dim: usize,
}

impl HermitianBasis {
    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim).flat_map(move |i| (i + 1..self.dim).map(move |j| (i, j)))
    }

    pub fn element(&self, idx: usize) -> CMatrix {
        let mut x = RVector::zeros(self.len());
        x[idx] = 1.0;
        self.from_coords(&x)
    }

    pub fn to_coords(&self, h: &CMatrix) -> RVector {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.dim {
            out.push(h[(i, i)].re);
        }
        let s = std::f64::consts::SQRT_2;
        for (i, j) in self.pairs() {
            out.push(s * h[(i, j)].re);
            out.push(s * h[(i, j)].im);
        }
        RVector::from_vec(out)
    }

    pub fn from_coords(&self, x: &RVector) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            h[(i, i)] = c(x[i], 0.0);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (p, (i, j)) in self.pairs().enumerate() {
            let z = c(x[self.dim + 2 * p] * s, x[self.dim + 2 * p + 1] * s);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        h
    }
}

/// Maps `P̂_0 … P̂_M` in Hermitian coordinates of the symmetric compression.
///
/// `P̂_k` is the orthogonal projector onto `{h : R(h^{T_k}) ⊆ R(ρ^{T_k})}`.
#[derive(Clone, Debug)]
pub struct FixedPointSystem {
    pub num_qubits: usize,
    pub hermitian_basis: HermitianBasis,
    pub maps: Vec<RMatrix>,
    pub composed: RMatrix,
    /// Real constraint matrices whose null spaces are the fixed-point sets.
    pub constraints: Vec<RMatrix>,
    pub ranks: Vec<usize>,
}

fn complement_residual(x: &CMatrix, proj: &CMatrix) -> CMatrix {
    x - proj * x
}

fn flatten_real(m: &CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn build_fixed_point_system(
    state: &SymmetricState,
    tol: &Tolerances,
) -> Result<FixedPointSystem> {
    state.require_ppt(tol)?;
    let n = state.num_qubits;
    let basis = HermitianBasis { dim: state.dim() };
    let family = state.pt_family();
    let mut maps = vec![];
    let mut constraints = vec![];
    let mut ranks = vec![];
    for (k, m) in family.iter().enumerate() {
        let prof = rank_profile(m, tol)?;
        ranks.push(prof.rank);
        let cols: Vec<Vec<f64>> = (0..basis.len())
            .map(|j| {
                let x = compressed_pt_matrix(&basis.element(j), n, k);
                flatten_real(&complement_residual(&x, &prof.range_projector))
            })
            .collect();
        let rows = cols[0].len();
        let a = RMatrix::from_fn(rows, basis.len(), |r, j| cols[j][r]);
        let (null, _) = real_null_space(&a, tol.residual_tol);
        maps.push(&null * null.transpose());
        constraints.push(a);
    }
    let mut composed = RMatrix::identity(basis.len(), basis.len());
    for p in &maps {
        composed = p * composed;
    }
    Ok(FixedPointSystem {
        num_qubits: n,
        hermitian_basis: basis,
        maps,
        composed,
        constraints,
        ranks,
    })
}

#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub dim: usize,
    pub basis: Vec<CMatrix>,
    pub coords: RMatrix,
    /// Dimension of the null space of `composed − 1` before cross-checking.
    pub composed_dim: usize,
    /// Dimension of the simultaneous null space of all constraints.
    pub intersection_dim: usize,
    /// Largest constraint residual of each basis element.
    pub residuals: Vec<f64>,
}

pub fn solution_space(sys: &FixedPointSystem, tol: &Tolerances) -> Result<SolutionSpace> {
    let nb = sys.hermitian_basis.len();
    let thr = tol.residual_tol;
    let (cand, _) = real_null_space(&(&sys.composed - RMatrix::identity(nb, nb)), thr);
    let total_rows: usize = sys.constraints.iter().map(|a| a.nrows()).sum();
    let mut stacked = RMatrix::zeros(total_rows, nb);
    let mut r0 = 0;
    for a in &sys.constraints {
        stacked.view_mut((r0, 0), (a.nrows(), nb)).copy_from(a);
        r0 += a.nrows();
    }
    let (inter, _) = real_null_space(&stacked, thr);
    let coords = if cand.ncols() == 0 {
        cand.clone()
    } else {
        let (z, _) = real_null_space(&(&stacked * &cand), thr);
        &cand * z
    };
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(
            "solution space decomposition produced non-finite values".into(),
        ));
    }
    let residuals = (0..coords.ncols())
        .map(|j| {
            sys.constraints
                .iter()
                .map(|a| (a * coords.column(j)).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let basis = (0..coords.ncols())
        .map(|j| {
            sys.hermitian_basis
                .from_coords(&coords.column(j).into_owned())
        })
        .collect();
    Ok(SolutionSpace {
        dim: coords.ncols(),
        basis,
        composed_dim: cand.ncols(),
        intersection_dim: inter.ncols(),
        coords,
        residuals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountingSpace {
    /// `N` parties of local dimension `d`, without symmetry.
    General {
        local_dim: usize,
        num_parties: usize,
    },
    /// Four-qubit symmetric states: `r0² + r1² + r2² ≥ 147`.
    Symmetric4,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountingBound {
    pub not_extremal: bool,
    pub lhs: usize,
    pub threshold: usize,
    pub note: Option<String>,
}

pub const SYMMETRIC4_THRESHOLD: usize = 147;

/// Parameter-counting sufficient condition for non-extremality.
pub fn counting_bound(ranks: &[usize], space: CountingSpace) -> Result<CountingBound> {
    let lhs: usize = ranks.iter().map(|r| r * r).sum();
    match space {
        CountingSpace::Symmetric4 => {
            if ranks.len() != 3 || ranks[0] > 5 || ranks[1] > 8 || ranks[2] > 9 {
                return Err(Error::InvalidParameter(format!(
                    "invalid three-rank {ranks:?}"
                )));
            }
            Ok(CountingBound {
                not_extremal: lhs >= SYMMETRIC4_THRESHOLD,
                lhs,
                threshold: SYMMETRIC4_THRESHOLD,
                note: None,
            })
        }
        CountingSpace::General {
            local_dim,
            num_parties,
        } => {
            if ranks.is_empty() {
                return Err(Error::InvalidParameter("empty rank list".into()));
            }
            let m = ranks.len() - 1;
            let full = local_dim.pow(num_parties as u32);
            if ranks.iter().any(|&r| r > full) {
                return Err(Error::InvalidParameter(format!(
                    "rank exceeds dimension {full}"
                )));
            }
            let threshold = m * full * full + 1;
            Ok(CountingBound {
                not_extremal: lhs >= threshold,
                lhs,
                threshold,
                note: Some(format!(
                    "naive constraint counting guarantees a second solution only from {}",
                    threshold + 1
                )),
            })
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalityReport {
    pub solution_dim: usize,
    pub is_extremal: bool,
    pub counting_bound_triggered: bool,
    pub basis_of_solutions: Vec<CMatrix>,
    pub residuals: Vec<f64>,
    pub ranks: Vec<usize>,
    pub composed_dim: usize,
    pub intersection_dim: usize,
    /// Extremal with rank ≥ 2: extremal separable PPT states are pure products.
    pub entangled_certificate: bool,
}

pub fn extremality_test(state: &SymmetricState, tol: &Tolerances) -> Result<ExtremalityReport> {
    let sys = build_fixed_point_system(state, tol)?;
    let sol = solution_space(&sys, tol)?;
    let triggered = if state.num_qubits == 4 {
        counting_bound(&sys.ranks, CountingSpace::Symmetric4)?.not_extremal
    } else {
        false
    };
    let is_extremal = sol.dim == 1;
    Ok(ExtremalityReport {
        solution_dim: sol.dim,
        is_extremal,
        counting_bound_triggered: triggered,
        entangled_certificate: is_extremal && sys.ranks[0] >= 2,
        basis_of_solutions: sol.basis,
        residuals: sol.residuals,
        ranks: sys.ranks,
        composed_dim: sol.composed_dim,
        intersection_dim: sol.intersection_dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    /// Index into the PT family (0 is the state itself).
    pub matrix: usize,
}

/// Removes the `ρ` component of `h` and normalizes in Hilbert–Schmidt norm.
pub fn orthogonalize_direction(state: &SymmetricState, h: &CMatrix) -> Result<CMatrix> {
    let rho = &state.dicke_matrix;
    let ip = |a: &CMatrix, b: &CMatrix| trace(&(a.adjoint() * b)).re;
    let h = h - rho * c(ip(rho, h) / ip(rho, rho), 0.0);
    let n = ip(&h, &h).sqrt();
    if n <= 1e-12 {
        return Err(Error::InvalidParameter(
            "direction is parallel to the state".into(),
        ));
    }
    Ok(h / c(n, 0.0))
}

fn inv_sqrt_psd(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(a);
    let d = CMatrix::from_diagonal(&crate::linalg::CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(1.0 / v.max(1e-300).sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// First zero crossing on each side of `x = 0` for each PT of `ρ + x (h − Tr h · ρ)`.
pub fn critical_points(
    state: &SymmetricState,
    h: &CMatrix,
    tol: &Tolerances,
) -> Result<Vec<CriticalPoint>> {
    let n = state.num_qubits;
    let hh = h - &state.dicke_matrix * c(trace(h).re / state.trace(), 0.0);
    let scale = crate::linalg::frobenius(&hh).max(1e-300);
    let mut out = vec![];
    for (k, m) in state.pt_family().iter().enumerate() {
        let prof = rank_profile(m, tol)?;
        if prof.rank == 0 {
            continue;
        }
        let dk = compressed_pt_matrix(&hh, n, k);
        let leak = crate::linalg::frobenius(&(&dk - &prof.range_projector * &dk)) / scale;
        if leak > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "direction leaves the range of PT {k} (leak {leak:.2e})"
            )));
        }
        let v = &prof.range_basis;
        let a = v.adjoint() * m * v;
        let b = v.adjoint() * dk * v;
        let s = inv_sqrt_psd(&a);
        let mu = eigvalsh(&(&s * b * &s));
        let lo = mu.first().copied().unwrap_or(0.0);
        let hi = mu.last().copied().unwrap_or(0.0);
        if lo < -1e-14 {
            out.push(CriticalPoint {
                x: -1.0 / lo,
                matrix: k,
            });
        }
        if hi > 1e-14 {
            out.push(CriticalPoint {
                x: -1.0 / hi,
                matrix: k,
            });
        }
    }
    Ok(out)
}

fn restricted_min(
    state: &SymmetricState,
    hh: &CMatrix,
    k: usize,
    x: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let m = &state.pt_family()[k];
    let prof = rank_profile(m, tol)?;
    let v = &prof.range_basis;
    let a = v.adjoint() * m * v;
    let b = v.adjoint() * compressed_pt_matrix(hh, state.num_qubits, k) * v;
    let (vals, vecs) = eigh(&(&a + &b * c(x, 0.0)));
    let u = vecs.column(0);
    let deriv = (u.adjoint() * &b * u)[(0, 0)].re;
    Ok((vals[0], deriv))
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: SymmetricState,
    pub x_star: f64,
    pub limiting: usize,
    pub ranks_before: Vec<usize>,
    pub ranks_after: Vec<usize>,
}

/// Moves to `ρ(x)` at a given critical point, polishing `x` by Newton steps on the
/// smallest restricted eigenvalue.
pub fn step_to(
    state: &SymmetricState,
    h: &CMatrix,
    cp: CriticalPoint,
    tol: &Tolerances,
) -> Result<StepOutcome> {
    let hh = h - &state.dicke_matrix * c(trace(h).re / state.trace(), 0.0);
    let before = rank_vector(state, tol)?;
    let mut x = cp.x;
    for attempt in 0..2 {
        let iters = if attempt == 0 { 3 } else { 12 };
        for _ in 0..iters {
            let (lam, d) = restricted_min(state, &hh, cp.matrix, x, tol)?;
            if d.abs() < 1e-300 {
                break;
            }
            let next = x - lam / d;
            let (lam_next, _) = restricted_min(state, &hh, cp.matrix, next, tol)?;
            if lam_next.abs() < lam.abs() {
                x = next;
            } else {
                break;
            }
        }
        let m = &state.dicke_matrix + &hh * c(x, 0.0);
        let next =
            SymmetricState::from_matrix_unchecked(state.num_qubits, crate::linalg::hermitize(&m));
        let after = rank_vector(&next, tol)?;
        let dropped = after.iter().zip(&before).any(|(a, b)| a < b);
        let grew = after.iter().zip(&before).any(|(a, b)| a > b);
        if dropped && !grew && next.is_ppt(tol) {
            return Ok(StepOutcome {
                state: next,
                x_star: x,
                limiting: cp.matrix,
                ranks_before: before,
                ranks_after: after,
            });
        }
    }
    Err(Error::Numerical(format!(
        "no rank reduction at critical x = {x:.6e} (PT {})",
        cp.matrix
    )))
}

/// Step to the critical point of smallest magnitude along `h`.
pub fn rank_reduction_step(
    state: &SymmetricState,
    h: &CMatrix,
    tol: &Tolerances,
) -> Result<StepOutcome> {
    check_hermitian(h, tol.hermitian_tol)?;
    let h = orthogonalize_direction(state, h)?;
    let cps = critical_points(state, &h, tol)?;
    let cp = cps
        .into_iter()
        .min_by(|a, b| a.x.abs().total_cmp(&b.x.abs()))
        .ok_or_else(|| Error::Numerical("no finite critical point along the direction".into()))?;
    step_to(state, &h, cp, tol)
}

/// Smallest-magnitude critical point on one side of zero.
pub fn first_crossing(cps: &[CriticalPoint], positive: bool) -> Option<CriticalPoint> {
    cps.iter()
        .filter(|cp| (cp.x > 0.0) == positive)
        .min_by(|a, b| a.x.abs().total_cmp(&b.x.abs()))
        .copied()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DirectionPolicy {
    /// Steps keeping every rank at or above a target, targets tried in order.
    TowardTargets { targets: Vec<Vec<usize>> },
    /// Uniformly random admissible step.
    Random,
}

impl DirectionPolicy {
    /// Steering towards the four-qubit ranks (5,7,8) and (5,7,7).
    pub fn four_qubit_default() -> Self {
        DirectionPolicy::TowardTargets {
            targets: vec![vec![5, 7, 8], vec![5, 7, 7]],
        }
    }

    /// Options reaching the highest-priority target that any option can still reach.
    fn select(&self, ranks: &[&[usize]]) -> Vec<usize> {
        match self {
            DirectionPolicy::Random => (0..ranks.len()).collect(),
            DirectionPolicy::TowardTargets { targets } => {
                for t in targets {
                    let ok: Vec<usize> = (0..ranks.len())
                        .filter(|&i| {
                            t.len() == ranks[i].len() && ranks[i].iter().zip(t).all(|(r, t)| r >= t)
                        })
                        .collect();
                    if !ok.is_empty() {
                        return ok;
                    }
                }
                vec![]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub start: SymmetricState,
    pub policy: DirectionPolicy,
    pub candidates_per_step: usize,
    pub max_steps: usize,
}

impl SearchConfig {
    pub fn four_qubit_default() -> Self {
        SearchConfig {
            start: SymmetricState::maximally_mixed(4).expect("valid"),
            policy: DirectionPolicy::four_qubit_default(),
            candidates_per_step: 8,
            max_steps: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WalkStep {
    pub state: SymmetricState,
    pub ranks: Vec<usize>,
    pub direction: CMatrix,
    pub x_star: f64,
    pub limiting: usize,
    /// Whether the policy could pick an admissible candidate.
    pub steered: bool,
}

#[derive(Clone, Debug)]
pub struct WalkTrace {
    pub seed: u64,
    pub start_ranks: Vec<usize>,
    pub steps: Vec<WalkStep>,
    pub terminal_state: SymmetricState,
    pub terminal: ExtremalityReport,
}

impl WalkTrace {
    pub fn terminal_three_rank(&self) -> Option<ThreeRank> {
        let r = &self.terminal.ranks;
        (r.len() == 3).then(|| ThreeRank([r[0], r[1], r[2]]))
    }

    /// All visited states (including the start) with their rank vectors.
    pub fn visited(&self) -> impl Iterator<Item = (&SymmetricState, &Vec<usize>)> {
        self.steps.iter().map(|s| (&s.state, &s.ranks))
    }
}

fn rand_distr_normal() -> rand::distributions::Open01 {
    rand::distributions::Open01
}

/// Seeded walk from `config.start` to an extremal state.
pub fn extremal_search(seed: u64, config: &SearchConfig, tol: &Tolerances) -> Result<WalkTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = config.start.normalized()?;
    current.require_ppt(tol)?;
    let start_ranks = rank_vector(&current, tol)?;
    let mut steps = vec![];
    for _ in 0..=config.max_steps {
        let report = extremality_test(&current, tol)?;
        if report.is_extremal {
            return Ok(WalkTrace {
                seed,
                start_ranks,
                steps,
                terminal_state: current,
                terminal: report,
            });
        }
        if steps.len() == config.max_steps {
            break;
        }
        let free: Vec<CMatrix> = report
            .basis_of_solutions
            .iter()
            .filter_map(|b| orthogonalize_direction(&current, b).ok())
            .collect();
        if free.is_empty() {
            return Err(Error::Numerical(
                "non-extremal state without a free direction".into(),
            ));
        }
        let mut options: Vec<(StepOutcome, CMatrix)> = vec![];
        for _ in 0..config.candidates_per_step.max(1) {
            // sum of four centred uniforms, a cheap bell-shaped weight
            let h = {
                let mut h = CMatrix::zeros(current.dim(), current.dim());
                for b in &free {
                    let g: f64 = (0..4)
                        .map(|_| rng.sample::<f64, _>(rand_distr_normal()) - 0.5)
                        .sum();
                    h += b * c(g, 0.0);
                }
                h
            };
            let Ok(h) = orthogonalize_direction(&current, &h) else {
                continue;
            };
            let Ok(cps) = critical_points(&current, &h, tol) else {
                continue;
            };
            for positive in [true, false] {
                if let Some(cp) = first_crossing(&cps, positive) {
                    if let Ok(out) = step_to(&current, &h, cp, tol) {
                        options.push((out, h.clone()));
                    }
                }
            }
        }
        if options.is_empty() {
            return Err(Error::Numerical(
                "no admissible rank-reduction step found".into(),
            ));
        }
        let ranks: Vec<&[usize]> = options.iter().map(|o| o.0.ranks_after.as_slice()).collect();
        let admissible = config.policy.select(&ranks);
        let steered = !admissible.is_empty();
        let pick = if steered {
            *admissible.choose(&mut rng).expect("nonempty")
        } else {
            rng.gen_range(0..options.len())
        };
        let (out, h) = options.swap_remove(pick);
        current = out.state.normalized()?;
        steps.push(WalkStep {
            state: current.clone(),
            ranks: out.ranks_after,
            direction: h,
            x_star: out.x_star,
            limiting: out.limiting,
            steered,
        });
    }
    Err(Error::MaxSteps(config.max_steps))
}

/// Sorted spectra of the normalized PT family, rounded to `1e-6`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint(pub Vec<Vec<i64>>);

pub fn spectral_fingerprint(state: &SymmetricState) -> Fingerprint {
    let t = state.trace();
    let s = if t.abs() > 0.0 { 1.0 / t } else { 1.0 };
    Fingerprint(
        state
            .pt_family()
            .iter()
            .map(|m| {
                eigvalsh(&(m * c(s, 0.0)))
                    .into_iter()
                    .map(|v| {
                        let r = (v * 1e6).round() as i64;
                        if r == 0 {
                            0
                        } else {
                            r
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

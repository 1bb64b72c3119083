//! Filter pipeline from the qubit–qudit family to symmetric multi-qubit PPT states:
//! `F → F₂ → V`, lifting by `λ* P_N`, and one product-vector subtraction.

use serde::{Deserialize, Serialize};

use crate::classify::edge::{family_profiles, product_residuals, raw_solutions, FoundVector};
use crate::classify::SolutionCurve;
use crate::error::{Error, Result};
use crate::extremal::{extremality_test, ExtremalityReport};
use crate::hilbert::{
    compressed_product_vector, compressed_pt_matrix, dicke_basis, rank_profile, rank_vector,
    symmetric_power_coords, Alpha, SymmetricState, Tolerances,
};
use crate::horodecki::{rho_db, HorodeckiParams, QubitQuditState};
use crate::linalg::{
    c, eigh, eigvalsh, frobenius, hermitize, max_abs, min_eigenvalue, numeric_rank, CMatrix, C64,
};

#[derive(Clone, Debug)]
pub struct FilterChain {
    pub d: usize,
    pub d_out: usize,
    pub b: f64,
    pub y: f64,
    pub gammas: Vec<C64>,
    pub f: CMatrix,
    pub f2: CMatrix,
    pub v: CMatrix,
}

impl FilterChain {
    /// `gammas[j]` sits on the `j`-th superdiagonal of `F₂`, so `d − d_out + 1` are needed.
    pub fn new(d: usize, d_out: usize, b: f64, gammas: &[C64]) -> Result<Self> {
        let params = HorodeckiParams::new(d, b)?;
        if d_out < 2 || d_out >= d {
            return Err(Error::InvalidParameter(format!(
                "target dimension {d_out} must satisfy 2 <= d' < d = {d}"
            )));
        }
        if gammas.len() != d - d_out + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} filter parameters, got {}",
                d - d_out + 1,
                gammas.len()
            )));
        }
        if gammas.iter().any(|g| !(g.re.is_finite() && g.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite filter parameter".into()));
        }
        let y = params.y();
        let mut f = CMatrix::identity(d, d);
        f[(0, d - 1)] = c(-y, 0.0);
        let mut f2 = CMatrix::zeros(d_out, d);
        for i in 0..d_out {
            for (j, g) in gammas.iter().enumerate() {
                f2[(i, i + j)] = *g;
            }
        }
        let rank = numeric_rank(&f2, 1e-12);
        if rank < d_out {
            return Err(Error::RankDeficientFilter {
                rank,
                expected: d_out,
            });
        }
        let n = d_out - 1;
        let basis = dicke_basis(n)?;
        let mut v = CMatrix::zeros(1 << n, d_out);
        for i in 0..d_out {
            v.set_column(i, &basis.vector(n - i));
        }
        Ok(FilterChain {
            d,
            d_out,
            b,
            y,
            gammas: gammas.to_vec(),
            f,
            f2,
            v,
        })
    }

    /// Number of qubits of the output state.
    pub fn num_qubits(&self) -> usize {
        self.d_out
    }
}

pub fn apply_filter_f(state: &QubitQuditState, chain: &FilterChain) -> Result<QubitQuditState> {
    state.local_filter(&chain.f)
}

pub fn apply_filter_f2(state: &QubitQuditState, chain: &FilterChain) -> Result<QubitQuditState> {
    state.local_filter(&chain.f2)
}

/// `1 ⊗ V`, then restriction to the symmetric subspace.
pub fn apply_filter_v(state: &QubitQuditState, chain: &FilterChain) -> Result<SymmetricState> {
    if state.d != chain.d_out {
        return Err(Error::Size(format!(
            "V expects a qudit of dimension {}, got {}",
            chain.d_out, state.d
        )));
    }
    let n = chain.num_qubits();
    let full = CMatrix::identity(2, 2).kronecker(&chain.v);
    let op = &full * &state.matrix * full.adjoint();
    let basis = dicke_basis(n)?;
    let iso = basis.isometry();
    let p = &iso * iso.adjoint();
    let residual = max_abs(&(&p * &op * &p - &op)) / max_abs(&op).max(1e-300);
    if residual > 1e-9 {
        return Err(Error::Convention { residual });
    }
    Ok(SymmetricState::from_matrix_unchecked(
        n,
        hermitize(&(iso.adjoint() * op * iso)),
    ))
}

/// Overall scale applied to the filtered operator `ω` before lifting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaScale {
    /// Filters applied to the trace-one `ρ_{d,b}`.
    Filtered,
    TraceOne,
    /// Filters applied to `((2d−1) b + 1) ρ_{d,b}`.
    Unnormalized,
    /// Filters applied to `2 ((2d−1) b + 1) ρ_{d,b}`.
    DoubledUnnormalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectorScale {
    Bare,
    TraceOne,
}

impl OmegaScale {
    pub const ALL: [OmegaScale; 4] = [
        OmegaScale::Filtered,
        OmegaScale::TraceOne,
        OmegaScale::Unnormalized,
        OmegaScale::DoubledUnnormalized,
    ];

    pub fn factor(&self, omega: &SymmetricState, d: usize, b: f64) -> f64 {
        let k = (2 * d - 1) as f64 * b + 1.0;
        match self {
            OmegaScale::Filtered => 1.0,
            OmegaScale::TraceOne => 1.0 / omega.trace(),
            OmegaScale::Unnormalized => k,
            OmegaScale::DoubledUnnormalized => 2.0 * k,
        }
    }
}

impl ProjectorScale {
    pub const ALL: [ProjectorScale; 2] = [ProjectorScale::Bare, ProjectorScale::TraceOne];

    /// `P_N` in Dicke coordinates under this scale.
    pub fn projector(&self, n: usize) -> CMatrix {
        let s = match self {
            ProjectorScale::Bare => 1.0,
            ProjectorScale::TraceOne => 1.0 / (n + 1) as f64,
        };
        CMatrix::identity(n + 1, n + 1) * c(s, 0.0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaStar {
    pub lambda: f64,
    /// PT index whose minimum eigenvalue vanishes at `λ*`.
    pub limiting: usize,
    /// Same threshold from the generalized eigenvalue problem of each PT.
    pub cross_check: f64,
    pub bisection_steps: usize,
}

fn pt_min(parts: &[(CMatrix, CMatrix)], lambda: f64) -> (f64, usize) {
    parts
        .iter()
        .enumerate()
        .map(|(k, (a, p))| (min_eigenvalue(&(a + p * c(lambda, 0.0))), k))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc })
}

/// Smallest `λ ≥ 0` making `ω + λ P` PPT.
pub fn min_lambda_ppt(omega: &SymmetricState, projector: ProjectorScale, tol: &Tolerances) -> Result<LambdaStar> {
    let n = omega.num_qubits;
    let p = projector.projector(n);
    let parts: Vec<(CMatrix, CMatrix)> = (0..=n / 2)
        .map(|k| {
            (
                compressed_pt_matrix(&omega.dicke_matrix, n, k),
                compressed_pt_matrix(&p, n, k),
            )
        })
        .collect();
    let scale = frobenius(&omega.dicke_matrix).max(1.0);
    let cross_check = parts
        .iter()
        .map(|(a, q)| {
            let (vals, vecs) = eigh(q);
            let s = &vecs
                * CMatrix::from_diagonal(&crate::linalg::CVector::from_iterator(
                    vals.len(),
                    vals.iter().map(|&v| c(1.0 / v.max(1e-300).sqrt(), 0.0)),
                ))
                * vecs.adjoint();
            let m = eigvalsh(&(&s * a * &s));
            (-m[0]).max(0.0)
        })
        .fold(0.0, f64::max);
    let (m0, k0) = pt_min(&parts, 0.0);
    if m0 >= -tol.psd_tol * scale {
        return Ok(LambdaStar {
            lambda: 0.0,
            limiting: k0,
            cross_check,
            bisection_steps: 0,
        });
    }
    let mut lo = 0.0;
    let mut hi = 10.0 * frobenius(&omega.dicke_matrix);
    if pt_min(&parts, hi).0 < 0.0 {
        return Err(Error::Numerical("λ bracket does not reach PPT".into()));
    }
    let mut steps = 0;
    while hi - lo > 1e-12 && steps < 200 {
        let mid = 0.5 * (lo + hi);
        if pt_min(&parts, mid).0 >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(LambdaStar {
        lambda: hi,
        limiting: pt_min(&parts, hi).1,
        cross_check,
        bisection_steps: steps,
    })
}

/// `ω + λ P` under the given projector scale.
pub fn lift(omega: &SymmetricState, lambda: f64, projector: ProjectorScale) -> SymmetricState {
    let p = projector.projector(omega.num_qubits);
    SymmetricState::from_matrix_unchecked(omega.num_qubits, &omega.dicke_matrix + p * c(lambda, 0.0))
}

/// Product vectors `e^{⊗4}` whose partial conjugations lie in all ranges.
///
/// When the solutions form a curve, the returned list samples it; see [`subtraction_curve`].
pub fn find_subtraction_vector(state: &SymmetricState, tol: &Tolerances) -> Result<Vec<FoundVector>> {
    four_qubits(state)?;
    state.require_ppt(tol)?;
    let profiles = family_profiles(state, tol)?;
    let raw = raw_solutions(&profiles, tol)?;
    Ok(raw
        .candidates
        .into_iter()
        .filter_map(|a| {
            let r = product_residuals(&profiles, 4, a);
            r.iter().all(|&x| x <= tol.residual_tol).then(|| FoundVector {
                alpha: a,
                residuals: [r[0], r[1], r[2]],
            })
        })
        .collect())
}

pub fn subtraction_curve(state: &SymmetricState, tol: &Tolerances) -> Result<Option<SolutionCurve>> {
    four_qubits(state)?;
    let profiles = family_profiles(state, tol)?;
    Ok(raw_solutions(&profiles, tol)?.curve)
}

fn four_qubits(state: &SymmetricState) -> Result<()> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter(
            "product-vector subtraction is implemented for four qubits".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubtractionWeight {
    pub mu_star: f64,
    /// `1/⟨ψ_k|(ρ^{T_k})⁺|ψ_k⟩` for each PT, normalized `ψ_k`.
    pub per_matrix: Vec<f64>,
    pub limiting: usize,
}

pub fn max_subtraction_weight(state: &SymmetricState, alpha: Alpha, tol: &Tolerances) -> Result<SubtractionWeight> {
    let n = state.num_qubits;
    let mut per = vec![];
    for (k, m) in state.pt_family().iter().enumerate() {
        let prof = rank_profile(m, tol)?;
        let psi = compressed_product_vector(alpha, n, k);
        let psi = &psi / c(psi.norm(), 0.0);
        let residual = prof.range_residual(&psi);
        if residual > tol.residual_tol {
            return Err(Error::InvalidAlpha { residual });
        }
        let v = &prof.range_basis;
        let a = v.adjoint() * m * v;
        let x = v.adjoint() * &psi;
        let sol = a
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&x))
            .ok_or_else(|| Error::Numerical("restricted PT is not positive definite".into()))?;
        let q = (x.adjoint() * sol)[(0, 0)].re;
        per.push(1.0 / q);
    }
    let (limiting, &mu_star) = per
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty family");
    Ok(SubtractionWeight {
        mu_star,
        per_matrix: per,
        limiting,
    })
}

/// `ρ − μ (|ê⟩⟨ê|)^{⊗N}` with `ê` normalized.
pub fn subtract_product(state: &SymmetricState, alpha: Alpha, mu: f64) -> SymmetricState {
    let v = symmetric_power_coords(alpha, false, state.num_qubits);
    let v = &v / c(v.norm(), 0.0);
    SymmetricState::from_matrix_unchecked(
        state.num_qubits,
        hermitize(&(&state.dicke_matrix - &v * v.adjoint() * c(mu, 0.0))),
    )
}

/// How the subtracted product vector is picked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SubtractionChoice {
    /// Smallest `|α|` for which `T_A` limits the weight by a clear margin.
    Auto,
    /// Largest imaginary part on the solution curve at this real part.
    RealPart(f64),
    Alpha(Alpha),
}

/// Real parts scanned by [`SubtractionChoice::Auto`].
pub const AUTO_REAL_PARTS: [f64; 7] = [0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0];
const AUTO_MARGIN: f64 = 1.05;

fn candidates_for(state: &SymmetricState, choice: &SubtractionChoice, tol: &Tolerances) -> Result<Vec<Alpha>> {
    let curve = subtraction_curve(state, tol)?;
    let found = find_subtraction_vector(state, tol)?;
    let on_line = |t: f64| -> Vec<Alpha> {
        match &curve {
            Some(cv) => cv.points_at_real_part(t).into_iter().map(Alpha::Finite).collect(),
            None => found
                .iter()
                .filter(|f| f.alpha.value().is_some_and(|z| (z.re - t).abs() < 1e-6))
                .map(|f| f.alpha)
                .collect(),
        }
    };
    Ok(match choice {
        SubtractionChoice::Alpha(a) => vec![*a],
        SubtractionChoice::RealPart(t) => {
            let mut pts = on_line(*t);
            pts.sort_by(|a, b| {
                let im = |x: &Alpha| x.value().map_or(f64::NEG_INFINITY, |z| z.im);
                im(b).total_cmp(&im(a))
            });
            pts.truncate(1);
            pts
        }
        SubtractionChoice::Auto => {
            let mut all: Vec<Alpha> = AUTO_REAL_PARTS.iter().flat_map(|&t| on_line(t)).collect();
            if curve.is_none() {
                all.extend(found.iter().map(|f| f.alpha));
            }
            all
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubtractionReport {
    pub alpha: Alpha,
    pub residuals: Vec<f64>,
    pub weight: SubtractionWeight,
}

/// Picks the product vector and weight for `choice`; `None` when no vector exists.
pub fn choose_subtraction(
    state: &SymmetricState,
    choice: &SubtractionChoice,
    tol: &Tolerances,
) -> Result<Option<SubtractionReport>> {
    let profiles = family_profiles(state, tol)?;
    let mut scored = vec![];
    for a in candidates_for(state, choice, tol)? {
        let residuals = product_residuals(&profiles, state.num_qubits, a);
        match max_subtraction_weight(state, a, tol) {
            Ok(w) => scored.push(SubtractionReport {
                alpha: a,
                residuals,
                weight: w,
            }),
            Err(e @ Error::InvalidAlpha { .. }) if matches!(choice, SubtractionChoice::Alpha(_)) => {
                return Err(e)
            }
            Err(Error::InvalidAlpha { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if !matches!(choice, SubtractionChoice::Auto) {
        return Ok(scored.into_iter().next());
    }
    let ratio = |r: &SubtractionReport| {
        let w = &r.weight.per_matrix;
        let others = w
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 1)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        others / w[1]
    };
    let norm = |r: &SubtractionReport| r.alpha.value().map_or(f64::INFINITY, |z| z.norm());
    let good = scored
        .iter()
        .filter(|r| ratio(r) >= AUTO_MARGIN)
        .min_by(|a, b| norm(a).total_cmp(&norm(b)));
    let pick = good
        .or_else(|| scored.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))))
        .cloned();
    Ok(pick)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LambdaMode {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub d: usize,
    pub d_out: usize,
    pub b: f64,
    pub gammas: Vec<C64>,
    pub lambda: LambdaMode,
    /// `None` skips the subtraction step.
    pub subtraction: Option<SubtractionChoice>,
    pub omega_scale: OmegaScale,
    pub projector_scale: ProjectorScale,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl PipelineConfig {
    /// `d = 5`, `b = 1/2`, `γ = (1/√2, √2)`, four qubits.
    pub fn four_qubit_example() -> Self {
        PipelineConfig {
            d: 5,
            d_out: 4,
            b: 0.5,
            gammas: vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(std::f64::consts::SQRT_2, 0.0)],
            lambda: LambdaMode::Auto,
            subtraction: Some(SubtractionChoice::RealPart(7.0)),
            omega_scale: OmegaScale::DoubledUnnormalized,
            projector_scale: ProjectorScale::Bare,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub ranks: Vec<usize>,
    pub min_pt_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub omega: SymmetricState,
    pub lambda: LambdaStar,
    pub lifted: SymmetricState,
    pub subtraction: Option<SubtractionReport>,
    pub final_state: SymmetricState,
    pub stages: Vec<StageRecord>,
    pub extremality: Option<ExtremalityReport>,
    pub notes: Vec<String>,
}

impl PipelineResult {
    pub fn final_ranks(&self) -> &[usize] {
        &self.stages.last().expect("stages recorded").ranks
    }

    /// Extremal with rank at least two, hence PPT entangled.
    pub fn certified_entangled(&self) -> bool {
        self.extremality.as_ref().is_some_and(|r| r.entangled_certificate)
    }
}

fn record(stage: &str, state: &SymmetricState, tol: &Tolerances) -> Result<StageRecord> {
    Ok(StageRecord {
        stage: stage.to_string(),
        ranks: rank_vector(state, tol)?,
        min_pt_eigenvalues: state.ppt_min_eigenvalues(),
    })
}

/// Filters, lift and optional subtraction, followed by an extremality check.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineResult> {
    let tol = &config.tolerances;
    tol.validate()?;
    let chain = FilterChain::new(config.d, config.d_out, config.b, &config.gammas).map_err(Error::at("filters"))?;
    let rho = rho_db(&HorodeckiParams::new(config.d, config.b)?);
    let r1 = apply_filter_f(&rho, &chain).map_err(Error::at("filter_f"))?;
    let r2 = apply_filter_f2(&r1, &chain).map_err(Error::at("filter_f2"))?;
    let filtered = apply_filter_v(&r2, &chain).map_err(Error::at("filter_v"))?;
    let omega = filtered.scaled(config.omega_scale.factor(&filtered, config.d, config.b));
    let mut stages = vec![record("omega", &omega, tol)?];
    let mut notes = vec![];

    let lambda = match config.lambda {
        LambdaMode::Auto => min_lambda_ppt(&omega, config.projector_scale, tol).map_err(Error::at("lambda"))?,
        LambdaMode::Fixed(v) => {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::at("lambda")(Error::InvalidParameter(format!("λ = {v}"))));
            }
            LambdaStar {
                lambda: v,
                limiting: 0,
                cross_check: f64::NAN,
                bisection_steps: 0,
            }
        }
    };
    let lifted = lift(&omega, lambda.lambda, config.projector_scale);
    if !lifted.is_ppt(tol) {
        return Err(Error::at("lambda")(Error::InvalidParameter(format!(
            "not PPT at λ={}",
            lambda.lambda
        ))));
    }
    stages.push(record("lifted", &lifted, tol)?);

    let mut current = lifted.clone();
    let mut subtraction = None;
    match (&config.subtraction, config.d_out) {
        (Some(choice), 4) => {
            match choose_subtraction(&lifted, choice, tol).map_err(Error::at("subtraction"))? {
                Some(rep) => {
                    current = subtract_product(&lifted, rep.alpha, rep.weight.mu_star);
                    subtraction = Some(rep);
                    stages.push(record("subtracted", &current, tol)?);
                }
                None => notes.push("no admissible product vector; subtraction skipped".into()),
            }
        }
        (Some(_), n) => notes.push(format!("subtraction is only implemented for four qubits (got {n})")),
        (None, _) => {}
    }
    let final_state = current.normalized().map_err(Error::at("normalize"))?;
    final_state.require_ppt(tol).map_err(Error::at("final"))?;
    let extremality = match extremality_test(&final_state, tol) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("extremality test failed: {e}"));
            None
        }
    };
    stages.push(record("final", &final_state, tol)?);
    Ok(PipelineResult {
        omega,
        lambda,
        lifted,
        subtraction,
        final_state,
        stages,
        extremality,
        notes,
    })
}

/// `λ*` for every scale combination, in `OmegaScale::ALL × ProjectorScale::ALL` order.
pub fn convention_scan(config: &PipelineConfig) -> Result<Vec<(OmegaScale, ProjectorScale, f64)>> {
    let chain = FilterChain::new(config.d, config.d_out, config.b, &config.gammas)?;
    let rho = rho_db(&HorodeckiParams::new(config.d, config.b)?);
    let filtered = apply_filter_v(&apply_filter_f2(&apply_filter_f(&rho, &chain)?, &chain)?, &chain)?;
    let mut out = vec![];
    for os in OmegaScale::ALL {
        let omega = filtered.scaled(os.factor(&filtered, config.d, config.b));
        for ps in ProjectorScale::ALL {
            out.push((os, ps, min_lambda_ppt(&omega, ps, &config.tolerances)?.lambda));
        }
    }
    Ok(out)
}

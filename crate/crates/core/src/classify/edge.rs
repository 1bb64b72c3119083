//! Symmetric product vectors whose partial conjugates lie in all ranges.
//!
//! Kernel vectors are taken in compressed coordinates: `C² ⊗ S_3` (index `a·4 + j`)
//! for `ρ^{T_A}` and `S_2 ⊗ S_2` (index `a·3 + b`) for `ρ^{T_AB}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    compressed_product_vector, rank_profile, three_rank, Alpha, RankProfile, SymmetricState,
    ThreeRank, Tolerances,
};
use crate::linalg::{binomial, c, eigh, CMatrix, CVector, C64, ONE, ZERO};
use crate::optim::{levenberg_marquardt, LmOptions};
use crate::poly::Poly;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Relative residual under which a polished root is accepted.
const ROOT_ACCEPT: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoundVector {
    pub alpha: Alpha,
    /// Range-projection residuals for `ρ`, `ρ^{T_A}`, `ρ^{T_AB}`.
    pub residuals: [f64; 3],
}

/// `‖(1 − P_k) x_k(α)‖` for each member of the PT family, with normalized `x_k`.
pub fn product_residuals(profiles: &[RankProfile], n: usize, alpha: Alpha) -> Vec<f64> {
    profiles
        .iter()
        .enumerate()
        .map(|(k, p)| p.range_residual(&compressed_product_vector(alpha, n, k)))
        .collect()
}

pub fn family_profiles(state: &SymmetricState, tol: &Tolerances) -> Result<Vec<RankProfile>> {
    state
        .pt_family()
        .iter()
        .map(|m| rank_profile(m, tol))
        .collect()
}

fn s_poly() -> [Poly; 3] {
    [
        Poly::constant(ONE),
        Poly(vec![ZERO, c(SQRT2, 0.0)]),
        Poly(vec![ZERO, ZERO, ONE]),
    ]
}

/// Gauss–Newton/LM polish of `α` for real residual equations in `(α, ᾱ)`.
fn polish<F>(f: F, a0: C64) -> C64
where
    F: Fn(C64) -> Vec<f64>,
{
    let (x, _) = levenberg_marquardt(
        |v| f(c(v[0], v[1])),
        &[a0.re, a0.im],
        LmOptions {
            max_iter: 60,
            tol: 0.0,
        },
    );
    c(x[0], x[1])
}

fn push_unique(out: &mut Vec<Alpha>, a: Alpha) {
    let close = |b: &Alpha| match (a, *b) {
        (Alpha::Finite(x), Alpha::Finite(y)) => (x - y).norm() <= 1e-7 * (1.0 + x.norm()),
        (Alpha::Infinity, Alpha::Infinity) => true,
        _ => false,
    };
    if !out.iter().any(close) {
        out.push(a);
    }
}

fn norm_e(a: C64) -> f64 {
    1.0 + a.norm_sqr()
}

/// Solutions of `⟨e*, e, e, e|Ψ⟩ = 0` for `Ψ ∈ C² ⊗ S_3`.
///
/// The condition reads `P_0(ᾱ) + α P_1(ᾱ) = 0`. Treating `β = ᾱ` as independent and
/// eliminating it through the conjugate equation gives one polynomial of degree ≤ 10
/// in `α`; its companion roots are filtered by `|β(α) − ᾱ|` and polished.
pub fn solve_case_579(psi: &CVector) -> Result<Vec<Alpha>> {
    if psi.len() != 8 {
        return Err(Error::Size(
            "kernel vector of ρ^{T_A} must have 8 components".into(),
        ));
    }
    let scale = psi.norm();
    if scale == 0.0 {
        return Err(Error::Degenerate("zero kernel vector".into()));
    }
    let psi = psi / c(scale, 0.0);
    let w = |j: usize| (binomial(3, j) as f64).sqrt();
    let p0 = Poly((0..4).map(|j| psi[j] * w(j)).collect());
    let p1 = Poly((0..4).map(|j| psi[4 + j] * w(j)).collect());
    let g = |a: C64| p0.eval(a.conj()) + a * p1.eval(a.conj());
    let resid = |a: C64| {
        let v = g(a) / norm_e(a).powi(2);
        vec![v.re, v.im]
    };
    let rel = |a: C64| g(a).norm() / norm_e(a).powi(2);
    let mut out = vec![];
    if psi[7].norm() <= ROOT_ACCEPT {
        out.push(Alpha::Infinity);
    }
    let mut candidates: Vec<C64> = vec![];
    if p1.max_coeff() <= 1e-14 {
        candidates.extend(p0.roots().into_iter().map(|z| z.conj()));
    } else {
        let (q0, q1) = (p0.conj(), p1.conj());
        let neg_q0 = -&q0;
        let mut q = Poly::zero();
        for j in 0..4 {
            let term = &neg_q0.pow(j) * &q1.pow(3 - j);
            q = &q + &(&term.scale(p0.0[j]) + &(&Poly::x() * &term.scale(p1.0[j])));
        }
        if q.max_coeff() <= 1e-13 {
            // identically vanishing eliminant: fall back to multistart
            for r in [0.3, 1.0, 3.0] {
                for k in 0..12 {
                    candidates.push(C64::from_polar(r, k as f64 * std::f64::consts::PI / 6.0));
                }
            }
        } else {
            for a in q.roots() {
                let den = q1.eval(a);
                let consistent = if den.norm() > 1e-12 {
                    let beta = -q0.eval(a) / den;
                    (beta - a.conj()).norm() <= 1e-4 * (1.0 + a.norm())
                } else {
                    true
                };
                if consistent {
                    candidates.push(a);
                }
            }
        }
    }
    for a in candidates {
        let a = polish(resid, a);
        if rel(a) <= ROOT_ACCEPT && a.re.is_finite() && a.im.is_finite() {
            push_unique(&mut out, Alpha::Finite(a));
        }
    }
    Ok(out)
}

/// Decomposition `Ψ = Σ_k λ_k |e_k*⟩|e_k⟩` of an `S_2 ⊗ S_2` vector with `GΨ* = Ψ`.
#[derive(Clone, Debug)]
pub struct SymmetricKernelSchmidt {
    pub lambdas: Vec<f64>,
    /// Orthonormal vectors in `S_2` Dicke coordinates.
    pub vectors: Vec<CVector>,
    /// Hermitian reshape `T_{ab} = Ψ_{3a+b}`.
    pub t: CMatrix,
    pub symmetry_residual: f64,
}

impl SymmetricKernelSchmidt {
    pub fn reconstruct(&self) -> CVector {
        let mut out = CVector::zeros(9);
        for (l, e) in self.lambdas.iter().zip(&self.vectors) {
            let ec = e.map(|z| z.conj());
            out += crate::linalg::kron_vec(&ec, e) * c(*l, 0.0);
        }
        out
    }
}

/// `GΨ*` with `G` swapping the two `S_2` factors.
pub fn g_conj(psi: &CVector) -> CVector {
    CVector::from_fn(9, |i, _| psi[(i % 3) * 3 + i / 3].conj())
}

/// Fixes the phase of `Ψ` so that `GΨ* = Ψ`, then symmetrizes.
pub fn symmetrize_kernel_vector(psi: &CVector, tol: f64) -> Result<(CVector, f64)> {
    let n = psi.norm();
    if n == 0.0 {
        return Err(Error::Degenerate("zero kernel vector".into()));
    }
    let psi = psi / c(n, 0.0);
    let overlap = psi.dotc(&g_conj(&psi));
    let phased = &psi * C64::from_polar(1.0, overlap.arg() / 2.0);
    let residual = (g_conj(&phased) - &phased).norm();
    if residual > tol {
        return Err(Error::SymmetryViolation { residual });
    }
    let sym = (&phased + g_conj(&phased)) * c(0.5, 0.0);
    Ok((sym, residual))
}

pub fn kernel_schmidt_symmetric(psi: &CVector, tol: f64) -> Result<SymmetricKernelSchmidt> {
    if psi.len() != 9 {
        return Err(Error::Size(
            "vector in S_2 ⊗ S_2 must have 9 components".into(),
        ));
    }
    let residual = (g_conj(psi) - psi).norm() / psi.norm().max(f64::MIN_POSITIVE);
    if residual > tol {
        return Err(Error::SymmetryViolation { residual });
    }
    let t = CMatrix::from_fn(3, 3, |a, b| psi[3 * a + b]);
    let (vals, vecs) = eigh(&t);
    // T = Σ λ u u†, so Ψ_{ab} = Σ λ u_a ū_b = Σ λ (e*)_a e_b with e = ū.
    let vectors = (0..3).map(|k| vecs.column(k).map(|z| z.conj())).collect();
    Ok(SymmetricKernelSchmidt {
        lambdas: vals,
        vectors,
        t: crate::linalg::hermitize(&t),
        symmetry_residual: residual,
    })
}

/// Real curve `{α : s(α)ᵀ T s(ᾱ) = 0}` with `s(z) = (1, √2 z, z²)` and `T` Hermitian.
#[derive(Clone, Debug)]
pub struct SolutionCurve {
    pub t: CMatrix,
}

impl SolutionCurve {
    pub fn new(t: CMatrix) -> Self {
        SolutionCurve { t }
    }

    pub fn value(&self, a: C64) -> f64 {
        let s = [ONE, a * SQRT2, a * a];
        let sb = [ONE, a.conj() * SQRT2, a.conj() * a.conj()];
        let mut v = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                v += s[i] * self.t[(i, j)] * sb[j];
            }
        }
        v.re
    }

    /// `|f(α)| / (‖T‖ (1+|α|²)²)`.
    pub fn residual(&self, a: Alpha) -> f64 {
        let tn = crate::linalg::frobenius(&self.t).max(f64::MIN_POSITIVE);
        match a {
            Alpha::Finite(a) => self.value(a).abs() / (tn * norm_e(a).powi(2)),
            Alpha::Infinity => self.t[(2, 2)].norm() / tn,
        }
    }

    pub fn contains_infinity(&self) -> bool {
        self.residual(Alpha::Infinity) <= ROOT_ACCEPT
    }

    /// Polynomial in the free real coordinate along `α = base + dir·u`.
    fn line_poly(&self, base: C64, dir: C64) -> Poly {
        let z = Poly(vec![base, dir]);
        let zb = Poly(vec![base.conj(), dir.conj()]);
        let sp = s_poly();
        let s: Vec<Poly> = (0..3).map(|i| compose(&sp[i], &z)).collect();
        let sb: Vec<Poly> = (0..3).map(|i| compose(&sp[i], &zb)).collect();
        let mut f = Poly::zero();
        for i in 0..3 {
            for j in 0..3 {
                f = &f + &(&s[i] * &sb[j]).scale(self.t[(i, j)]);
            }
        }
        Poly(f.0.iter().map(|z| c(z.re, 0.0)).collect())
    }

    fn points_on_line(&self, base: C64, dir: C64) -> Vec<C64> {
        let p = self.line_poly(base, dir);
        let scale = p.max_coeff();
        if scale == 0.0 {
            return vec![];
        }
        let mut out: Vec<C64> = vec![];
        for r in p.roots() {
            if r.im.abs() > 1e-6 * (1.0 + r.re.abs()) {
                continue;
            }
            let mut u = r.re;
            let dp = p.derivative();
            for _ in 0..6 {
                let d = dp.eval(c(u, 0.0)).re;
                if d == 0.0 {
                    break;
                }
                u -= p.eval(c(u, 0.0)).re / d;
            }
            let a = base + dir * u;
            if self.residual(Alpha::Finite(a)) <= ROOT_ACCEPT
                && !out
                    .iter()
                    .any(|b| (b - a).norm() <= 1e-9 * (1.0 + a.norm()))
            {
                out.push(a);
            }
        }
        out.sort_by(|x, y| x.im.total_cmp(&y.im));
        out
    }

    /// Curve points with `Re α = t`, sorted by imaginary part.
    pub fn points_at_real_part(&self, t: f64) -> Vec<C64> {
        self.points_on_line(c(t, 0.0), c(0.0, 1.0))
    }

    /// Curve points with `Im α = u`, sorted by imaginary part.
    pub fn points_at_imag_part(&self, u: f64) -> Vec<C64> {
        self.points_on_line(c(0.0, u), ONE)
    }

    /// Points on a grid of horizontal and vertical lines.
    pub fn sample(&self, lines: &[f64]) -> Vec<Alpha> {
        let mut out = vec![];
        if self.contains_infinity() {
            out.push(Alpha::Infinity);
        }
        for &t in lines {
            for a in self.points_at_real_part(t) {
                push_unique(&mut out, Alpha::Finite(a));
            }
            for a in self.points_at_imag_part(t) {
                push_unique(&mut out, Alpha::Finite(a));
            }
        }
        out
    }
}

fn compose(p: &Poly, inner: &Poly) -> Poly {
    let mut out = Poly::zero();
    let mut pw = Poly::constant(ONE);
    for &coef in &p.0 {
        out = &out + &pw.scale(coef);
        pw = &pw * inner;
    }
    out
}

/// The `(5,8,8)` condition: returns the curve defined by the symmetric kernel vector.
pub fn solve_case_588(psi: &CVector, tol: f64) -> Result<SolutionCurve> {
    let (sym, _) = symmetrize_kernel_vector(psi, tol)?;
    let ks = kernel_schmidt_symmetric(&sym, tol)?;
    Ok(SolutionCurve::new(ks.t))
}

/// Brings a two-dimensional `G`-invariant kernel to a basis with `GΨ_i* = Ψ_i`.
pub fn g_real_basis(psi1: &CVector, psi2: &CVector, tol: f64) -> Result<(CVector, CVector)> {
    let k = CMatrix::from_columns(&[psi1.clone(), psi2.clone()]);
    let q = k.clone().qr().q();
    let proj = &q * q.adjoint();
    let mut cands = vec![];
    for v in [psi1, psi2] {
        let jv = g_conj(v);
        let residual = (&jv - &proj * &jv).norm() / v.norm().max(f64::MIN_POSITIVE);
        if residual > tol {
            return Err(Error::SymmetryViolation { residual });
        }
        cands.push(v + &jv);
        cands.push((v - &jv) * c(0.0, 1.0));
    }
    // real Gram–Schmidt with respect to Re⟨·,·⟩
    let mut basis: Vec<CVector> = vec![];
    cands.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    for v in cands {
        let mut w = v.clone();
        for b in &basis {
            let p = b.dotc(&w).re;
            w -= b * c(p, 0.0);
        }
        let n = w.norm();
        if n > 1e-6 * v.norm().max(1e-300) && n > 1e-12 {
            basis.push(&w / c(n, 0.0));
        }
        if basis.len() == 2 {
            break;
        }
    }
    if basis.len() < 2 {
        return Err(Error::Degenerate(
            "kernel pair has no two G-real directions".into(),
        ));
    }
    let m = CMatrix::from_columns(&basis);
    if crate::linalg::numeric_rank(&m, 1e-8) < 2 {
        return Err(Error::Degenerate(
            "G-real directions are complex-collinear".into(),
        ));
    }
    Ok((basis[0].clone(), basis[1].clone()))
}

/// The `(5,8,7)` condition: common zeros of two real curve equations.
///
/// Each equation is quadratic in `β = ᾱ`; the Sylvester resultant in `β` gives a
/// polynomial of degree ≤ 8 in `α`.
pub fn solve_case_587(psi1: &CVector, psi2: &CVector, tol: f64) -> Result<Vec<Alpha>> {
    let (v1, v2) = g_real_basis(psi1, psi2, tol)?;
    let t1 = kernel_schmidt_symmetric(&v1, tol)?.t;
    let t2 = kernel_schmidt_symmetric(&v2, tol)?.t;
    let curves = [
        SolutionCurve::new(t1.clone()),
        SolutionCurve::new(t2.clone()),
    ];
    let w = [1.0, SQRT2, 1.0];
    let sp = s_poly();
    let coeffs = |t: &CMatrix| -> [Poly; 3] {
        let mk = |m: usize| {
            let mut p = Poly::zero();
            for (a, s) in sp.iter().enumerate() {
                p = &p + &s.scale(t[(a, m)] * w[m]);
            }
            p
        };
        [mk(0), mk(1), mk(2)]
    };
    let a = coeffs(&t1);
    let b = coeffs(&t2);
    let c02 = &(&a[0] * &b[2]) - &(&b[0] * &a[2]);
    let c01 = &(&a[0] * &b[1]) - &(&b[0] * &a[1]);
    let c12 = &(&a[1] * &b[2]) - &(&b[1] * &a[2]);
    let res = &(&c02 * &c02) - &(&c01 * &c12);
    let mut out = vec![];
    if curves.iter().all(|cv| cv.contains_infinity()) {
        out.push(Alpha::Infinity);
    }
    if res.max_coeff() <= 1e-12 {
        return Err(Error::Degenerate("resultant vanishes identically".into()));
    }
    let resid = |z: C64| {
        vec![
            curves[0].value(z) / norm_e(z).powi(2),
            curves[1].value(z) / norm_e(z).powi(2),
        ]
    };
    for z in res.roots() {
        let den = c12.eval(z);
        if den.norm() > 1e-12 {
            let beta = -c02.eval(z) / den;
            if (beta - z.conj()).norm() > 1e-4 * (1.0 + z.norm()) {
                continue;
            }
        }
        let z = polish(resid, z);
        let ok = curves
            .iter()
            .all(|cv| cv.residual(Alpha::Finite(z)) <= ROOT_ACCEPT);
        if ok && z.re.is_finite() && z.im.is_finite() {
            push_unique(&mut out, Alpha::Finite(z));
        }
    }
    Ok(out)
}

/// Roots of `⟨e^{⊗4}|Ψ⟩ = 0` for a kernel vector of `ρ` itself.
fn solve_rho_kernel(psi: &CVector) -> Vec<Alpha> {
    let p = Poly(
        (0..psi.len())
            .map(|j| psi[j] * (binomial(psi.len() - 1, j) as f64).sqrt())
            .collect(),
    );
    let mut out: Vec<Alpha> = p
        .roots()
        .into_iter()
        .map(|z| Alpha::Finite(z.conj()))
        .collect();
    if psi[psi.len() - 1].norm() <= ROOT_ACCEPT * psi.norm() {
        out.push(Alpha::Infinity);
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum EdgeSolutions {
    /// Finitely many candidates (already filtered by all kernels).
    Finite,
    /// A real curve of solutions; `found_vectors` holds samples.
    Curve,
    /// All ranges are full: every `α` qualifies.
    Unconstrained,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeTestReport {
    pub case_tag: String,
    pub three_rank: ThreeRank,
    pub kernel_dims: [usize; 3],
    pub solutions: EdgeSolutions,
    pub found_vectors: Vec<FoundVector>,
    pub is_edge_counterexample: bool,
    pub note: Option<String>,
}

/// Real parts (and imaginary parts) of the lines used to sample solution curves.
pub const CURVE_SAMPLE_LINES: [f64; 13] = [
    -7.0, -3.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 7.0,
];

/// Candidate `α` for the state; the curve, when present, is returned separately.
pub(crate) struct RawSolutions {
    pub candidates: Vec<Alpha>,
    pub curve: Option<SolutionCurve>,
    pub kind: EdgeSolutions,
    pub tag: String,
}

pub(crate) fn raw_solutions(profiles: &[RankProfile], tol: &Tolerances) -> Result<RawSolutions> {
    let k0 = profiles[0].kernel_dim();
    let k1 = profiles[1].kernel_dim();
    let k2 = profiles[2].kernel_dim();
    let ranks = [profiles[0].rank, profiles[1].rank, profiles[2].rank];
    let tag = format!("({},{},{})", ranks[0], ranks[1], ranks[2]);
    if ranks[0] == 0 {
        return Err(Error::Dispatch([k0, k1, k2]));
    }
    let col = |p: &RankProfile, i: usize| p.kernel_basis.column(i).into_owned();
    let sym_tol = tol.residual_tol;
    if k0 >= 1 {
        return Ok(RawSolutions {
            candidates: solve_rho_kernel(&col(&profiles[0], 0)),
            curve: None,
            kind: EdgeSolutions::Finite,
            tag,
        });
    }
    if k1 >= 1 {
        return Ok(RawSolutions {
            candidates: solve_case_579(&col(&profiles[1], 0))?,
            curve: None,
            kind: EdgeSolutions::Finite,
            tag,
        });
    }
    if k2 >= 2 {
        return Ok(RawSolutions {
            candidates: solve_case_587(&col(&profiles[2], 0), &col(&profiles[2], 1), sym_tol)?,
            curve: None,
            kind: EdgeSolutions::Finite,
            tag,
        });
    }
    if k2 == 1 {
        let curve = solve_case_588(&col(&profiles[2], 0), sym_tol)?;
        return Ok(RawSolutions {
            candidates: curve.sample(&CURVE_SAMPLE_LINES),
            curve: Some(curve),
            kind: EdgeSolutions::Curve,
            tag,
        });
    }
    Ok(RawSolutions {
        candidates: vec![Alpha::Finite(ZERO), Alpha::Finite(ONE), Alpha::Infinity],
        curve: None,
        kind: EdgeSolutions::Unconstrained,
        tag,
    })
}

/// Searches for `α` with `e^{⊗4} ∈ R(ρ)`, `e*⊗e^{⊗3} ∈ R(ρ^{T_A})`, `e*⊗e*⊗e⊗e ∈ R(ρ^{T_AB})`.
pub fn edge_test(state: &SymmetricState, tol: &Tolerances) -> Result<EdgeTestReport> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter(
            "edge tests are implemented for four qubits".into(),
        ));
    }
    state.require_ppt(tol)?;
    let tr = three_rank(state, tol)?;
    let profiles = family_profiles(state, tol)?;
    let kernel_dims = [
        profiles[0].kernel_dim(),
        profiles[1].kernel_dim(),
        profiles[2].kernel_dim(),
    ];
    let raw = match raw_solutions(&profiles, tol) {
        Ok(r) => r,
        Err(Error::Degenerate(msg)) => {
            return Ok(EdgeTestReport {
                case_tag: tr.to_string(),
                three_rank: tr,
                kernel_dims,
                solutions: EdgeSolutions::Finite,
                found_vectors: vec![],
                is_edge_counterexample: false,
                note: Some(format!("inconclusive: {msg}")),
            })
        }
        Err(e) => return Err(e),
    };
    let mut found = vec![];
    for a in raw.candidates {
        let r = product_residuals(&profiles, 4, a);
        if r.iter().all(|&x| x <= tol.residual_tol) {
            found.push(FoundVector {
                alpha: a,
                residuals: [r[0], r[1], r[2]],
            });
        }
    }
    let note = if found.is_empty() {
        Some("no product vector found".to_string())
    } else {
        None
    };
    Ok(EdgeTestReport {
        case_tag: raw.tag,
        three_rank: tr,
        kernel_dims,
        solutions: raw.kind,
        is_edge_counterexample: !found.is_empty(),
        found_vectors: found,
        note,
    })
}

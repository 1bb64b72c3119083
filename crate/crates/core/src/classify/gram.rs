//! Gram-system decompositions of four-qubit symmetric states into terms
//! `A (1,α)^{⊗4} + B (0,1)^{⊗4}` or `A (1,α)^{⊗4} + B (1,−α)^{⊗4}`, and separability
//! certificates built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::edge::{family_profiles, product_residuals, raw_solutions};
use crate::error::{Error, Result};
use crate::hilbert::{dicke_basis, symmetric_power_coords, Alpha, SymmetricState, Tolerances};
use crate::linalg::{
    binomial, c, eigh, frobenius, nnls, null_space, pinv, schur, CMatrix, CVector, RMatrix,
    RVector, C64, ONE, ZERO,
};
use crate::optim::{levenberg_marquardt, LmOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GramForm {
    /// Companion `(1,−α)^{⊗4}`, via the maps `V` and `W`.
    A3,
    /// Companion `(0,1)^{⊗4}`, via the shift structure of the Dicke coordinates.
    A4,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramDecomposition {
    pub form: GramForm,
    pub k: usize,
    pub alphas: Vec<C64>,
    pub a_coeffs: Vec<C64>,
    pub b_coeffs: Vec<C64>,
    /// Frobenius distance between the state and `Σ_k [ψ_k]` rebuilt from the parameters.
    pub reconstruction_error: f64,
}

impl GramDecomposition {
    /// Term vectors in orthonormal Dicke coordinates.
    pub fn vectors(&self) -> Vec<CVector> {
        (0..self.k)
            .map(|i| term_vector(self.form, self.alphas[i], self.a_coeffs[i], self.b_coeffs[i]))
            .collect()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut m = CMatrix::zeros(5, 5);
        for v in self.vectors() {
            m += &v * v.adjoint();
        }
        m
    }

    /// Every term is a product vector, so the decomposition is a separable one.
    pub fn is_product_form(&self, rel: f64) -> bool {
        (0..self.k).all(|i| {
            let (a, b) = (self.a_coeffs[i].norm(), self.b_coeffs[i].norm());
            let alpha = self.alphas[i].norm();
            let s = a.max(b);
            s == 0.0
                || a <= rel * s
                || b <= rel * s
                || (self.form == GramForm::A3 && alpha <= rel)
        })
    }
}

fn e_coords(alpha: C64) -> CVector {
    CVector::from_fn(5, |j, _| alpha.powu(j as u32))
}

fn to_dicke(e: &CVector) -> CVector {
    CVector::from_fn(e.len(), |j, _| e[j] * (binomial(e.len() - 1, j) as f64).sqrt())
}

/// `A (1,α)^{⊗4} + B ψ_c` in orthonormal Dicke coordinates.
pub fn term_vector(form: GramForm, alpha: C64, a: C64, b: C64) -> CVector {
    let e = match form {
        GramForm::A4 => {
            let mut e = e_coords(alpha) * a;
            e[4] += b;
            e
        }
        GramForm::A3 => e_coords(alpha) * a + e_coords(-alpha) * b,
    };
    to_dicke(&e)
}

/// Unnormalized state `Σ_k [ψ_k]` built from Gram-form parameters.
pub fn gram_state(form: GramForm, alphas: &[C64], a: &[C64], b: &[C64]) -> SymmetricState {
    let mut m = CMatrix::zeros(5, 5);
    for k in 0..alphas.len() {
        let v = term_vector(form, alphas[k], a[k], b[k]);
        m += &v * v.adjoint();
    }
    SymmetricState::from_matrix_unchecked(4, m)
}

#[derive(Clone, Debug)]
pub enum GramOutcome {
    Decomposed(GramDecomposition),
    Inconclusive { reason: String },
}

/// Solves `bot = top · N` for a normal `N`, allowing zero-padding up to `max_k` columns.
/// Returns the Gram vectors `G = F Q` and the eigenvalues of `N`.
fn normal_shift(
    f: &CMatrix,
    top_rows: &[usize],
    bot_rows: &[usize],
    max_k: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(CMatrix, Vec<C64>)> {
    let r = f.ncols();
    for k in r.max(1)..=max_k.max(r) {
        let mut fk = CMatrix::zeros(f.nrows(), k);
        fk.view_mut((0, 0), (f.nrows(), r)).copy_from(f);
        let top = CMatrix::from_fn(top_rows.len(), k, |i, j| fk[(top_rows[i], j)]);
        let bot = CMatrix::from_fn(bot_rows.len(), k, |i, j| fk[(bot_rows[i], j)]);
        let n0 = pinv(&top, 1e-12) * &bot;
        let scale = frobenius(&bot).max(frobenius(&top)).max(1e-300);
        if frobenius(&(&top * &n0 - &bot)) > 1e-9 * scale {
            continue;
        }
        let z = null_space(&top, 1e-10);
        let m = z.ncols();
        let build = |x: &[f64]| -> CMatrix {
            let w = CMatrix::from_fn(m, k, |i, j| c(x[2 * (i * k + j)], x[2 * (i * k + j) + 1]));
            &n0 + &z * w
        };
        let defect = |n: &CMatrix| -> Vec<f64> {
            let comm = n * n.adjoint() - n.adjoint() * n;
            comm.iter().flat_map(|z| [z.re, z.im]).collect()
        };
        let nscale = frobenius(&n0).max(1.0);
        let mut best: Option<(CMatrix, f64)> = None;
        let starts = if m == 0 { 1 } else { 48 };
        for s in 0..starts {
            let x0: Vec<f64> = (0..2 * m * k)
                .map(|_| if s == 0 { 0.0 } else { nscale * (rng.gen::<f64>() * 2.0 - 1.0) })
                .collect();
            let (x, _) = if m == 0 {
                (vec![], 0.0)
            } else {
                levenberg_marquardt(|x| defect(&build(x)), &x0, LmOptions { max_iter: 300, tol: 1e-15 })
            };
            let n = build(&x);
            let d = defect(&n).iter().map(|v| v * v).sum::<f64>().sqrt() / nscale.powi(2);
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((n, d));
            }
            if d < 1e-13 {
                break;
            }
        }
        let (n, d) = best?;
        if d > 1e-10 {
            continue;
        }
        let (q, t) = schur(&n)?;
        let alphas = (0..k).map(|i| t[(i, i)]).collect();
        return Some((fk * q, alphas));
    }
    None
}

/// Gram factor `F` with `F F† = m`, columns for the numerically nonzero eigenvalues.
fn gram_factor(m: &CMatrix, rel: f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<CVector> = vals
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > rel * top)
        .map(|(i, &v)| vecs.column(i) * c(v.sqrt(), 0.0))
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Coordinates relative to unnormalized Dicke vectors: `ρ = Σ ρ̃_{μν} |E_μ⟩⟨E_ν|`.
fn unnormalized_coords(rho: &CMatrix) -> CMatrix {
    let n = rho.nrows() - 1;
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |i, j| {
        rho[(i, j)] / ((binomial(n, i) * binomial(n, j)) as f64).sqrt()
    })
}

pub const GRAM_MAX_TERMS: usize = 6;
pub const GRAM_ACCEPT: f64 = 1e-6;

fn finish(form: GramForm, state: &SymmetricState, alphas: Vec<C64>, a: Vec<C64>, b: Vec<C64>) -> GramOutcome {
    let mut dec = GramDecomposition {
        form,
        k: alphas.len(),
        alphas,
        a_coeffs: a,
        b_coeffs: b,
        reconstruction_error: 0.0,
    };
    // drop empty padding terms
    let keep: Vec<usize> = (0..dec.k)
        .filter(|&i| dec.a_coeffs[i].norm() + dec.b_coeffs[i].norm() > 1e-12)
        .collect();
    dec.alphas = keep.iter().map(|&i| dec.alphas[i]).collect();
    dec.a_coeffs = keep.iter().map(|&i| dec.a_coeffs[i]).collect();
    dec.b_coeffs = keep.iter().map(|&i| dec.b_coeffs[i]).collect();
    dec.k = keep.len();
    dec.reconstruction_error = frobenius(&(dec.reconstruct() - &state.dicke_matrix));
    let scale = frobenius(&state.dicke_matrix).max(1e-300);
    if dec.reconstruction_error > GRAM_ACCEPT * scale.max(1.0) {
        return GramOutcome::Inconclusive {
            reason: format!("reconstruction error {:.3e}", dec.reconstruction_error),
        };
    }
    GramOutcome::Decomposed(dec)
}

pub fn decompose_gram(state: &SymmetricState, form: GramForm, seed: u64) -> Result<GramOutcome> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter("Gram decompositions are four-qubit only".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match form {
        GramForm::A4 => {
            let f = gram_factor(&unnormalized_coords(&state.dicke_matrix), 1e-10);
            let Some((g, alphas)) = normal_shift(&f, &[0, 1, 2], &[1, 2, 3], GRAM_MAX_TERMS, &mut rng) else {
                return Ok(GramOutcome::Inconclusive {
                    reason: "no normal shift operator found".into(),
                });
            };
            let a: Vec<C64> = (0..g.ncols()).map(|k| g[(0, k)]).collect();
            let b: Vec<C64> = (0..g.ncols())
                .map(|k| g[(4, k)] - a[k] * alphas[k].powu(4))
                .collect();
            Ok(finish(form, state, alphas, a, b))
        }
        GramForm::A3 => {
            let sigma = v_map(state)?;
            let f = gram_factor(&sigma, 1e-10);
            // rows (j, m) ordered as 2j + m
            let Some((g, betas)) = normal_shift(&f, &[0, 2, 4], &[1, 3, 5], GRAM_MAX_TERMS, &mut rng) else {
                return Ok(GramOutcome::Inconclusive {
                    reason: "no normal shift operator found".into(),
                });
            };
            let mut alphas = vec![];
            let mut a = vec![];
            let mut b = vec![];
            for k in 0..g.ncols() {
                let alpha = betas[k].sqrt();
                let (e0, e1) = (g[(0, k)], g[(2, k)]);
                let diff = if alpha.norm() > 1e-12 { e1 / alpha } else { ZERO };
                alphas.push(alpha);
                a.push((e0 + diff) * 0.5);
                b.push((e0 - diff) * 0.5);
            }
            Ok(finish(form, state, alphas, a, b))
        }
    }
}

/// `V̂` on the last two qubits, `V = |0⟩⟨00| + |1⟩⟨11|`, in `E_j ⊗ |m⟩` coordinates.
fn v_map(state: &SymmetricState) -> Result<CMatrix> {
    let rho = state.to_computational();
    let mut v = CMatrix::zeros(2, 4);
    v[(0, 0)] = ONE;
    v[(1, 3)] = ONE;
    let l = CMatrix::identity(4, 4).kronecker(&v);
    let sigma = &l * rho * l.adjoint();
    let b2 = dicke_basis(2)?;
    let cols: Vec<CVector> = (0..3)
        .flat_map(|j| {
            let e = b2.vector(j);
            (0..2).map(move |m| {
                let mut f = CVector::zeros(2);
                f[m] = ONE;
                crate::linalg::kron_vec(&e, &f)
            })
        })
        .collect();
    let q = CMatrix::from_columns(&cols);
    let qp = pinv(&q, 1e-12);
    Ok(&qp * sigma * qp.adjoint())
}

/// Separable decomposition `Σ w_k [e_k^{⊗4}]` with `e_k` normalized.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductMixture {
    pub alphas: Vec<Alpha>,
    pub weights: Vec<f64>,
    pub reconstruction_error: f64,
}

impl ProductMixture {
    pub fn reconstruct(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n + 1, n + 1);
        for (a, w) in self.alphas.iter().zip(&self.weights) {
            let v = symmetric_power_coords(*a, false, n);
            let v = &v / c(v.norm(), 0.0);
            m += &v * v.adjoint() * c(*w, 0.0);
        }
        m
    }
}

fn real_vec(m: &CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Nonnegative fit of the state by symmetric product projectors.
pub fn fit_product_mixture(state: &SymmetricState, alphas: &[Alpha]) -> ProductMixture {
    let n = state.num_qubits;
    let projs: Vec<CMatrix> = alphas
        .iter()
        .map(|a| {
            let v = symmetric_power_coords(*a, false, n);
            let v = &v / c(v.norm(), 0.0);
            &v * v.adjoint()
        })
        .collect();
    let target = RVector::from_vec(real_vec(&state.dicke_matrix));
    let cols: Vec<Vec<f64>> = projs.iter().map(real_vec).collect();
    let a = RMatrix::from_fn(target.len(), cols.len(), |i, j| cols[j][i]);
    let w = if cols.is_empty() {
        RVector::zeros(0)
    } else {
        nnls(&a, &target)
    };
    let mut mix = ProductMixture {
        alphas: vec![],
        weights: vec![],
        reconstruction_error: 0.0,
    };
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            mix.alphas.push(alphas[i]);
            mix.weights.push(wi);
        }
    }
    mix.reconstruction_error = frobenius(&(mix.reconstruct(n) - &state.dicke_matrix));
    mix
}

/// Product vectors lying in all three ranges, fitted with nonnegative weights.
pub fn decompose_products(state: &SymmetricState, tol: &Tolerances) -> Result<Option<ProductMixture>> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter("product decomposition is four-qubit only".into()));
    }
    let profiles = family_profiles(state, tol)?;
    let raw = match raw_solutions(&profiles, tol) {
        Ok(r) => r,
        Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let accept = 1e-6;
    let cands: Vec<Alpha> = raw
        .candidates
        .into_iter()
        .filter(|a| product_residuals(&profiles, 4, *a).iter().all(|&r| r <= accept))
        .collect();
    if cands.is_empty() {
        return Ok(None);
    }
    let mix = fit_product_mixture(state, &cands);
    let scale = frobenius(&state.dicke_matrix).max(1e-300);
    Ok((mix.reconstruction_error <= 1e-8 * scale.max(1.0)).then_some(mix))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SeparabilityCertificate {
    Products(ProductMixture),
    Gram(GramDecomposition),
}

impl SeparabilityCertificate {
    pub fn reconstruction_error(&self) -> f64 {
        match self {
            SeparabilityCertificate::Products(m) => m.reconstruction_error,
            SeparabilityCertificate::Gram(g) => g.reconstruction_error,
        }
    }

    pub fn num_terms(&self) -> usize {
        match self {
            SeparabilityCertificate::Products(m) => m.alphas.len(),
            SeparabilityCertificate::Gram(g) => g.k,
        }
    }
}

/// Tries the product-vector route, then both Gram forms; only product-form results certify.
pub fn separability_certificate(state: &SymmetricState, seed: u64, tol: &Tolerances) -> Result<Option<SeparabilityCertificate>> {
    if let Some(mix) = decompose_products(state, tol)? {
        return Ok(Some(SeparabilityCertificate::Products(mix)));
    }
    for form in [GramForm::A4, GramForm::A3] {
        if let GramOutcome::Decomposed(d) = decompose_gram(state, form, seed)? {
            if d.is_product_form(1e-8) && d.k <= GRAM_MAX_TERMS {
                return Ok(Some(SeparabilityCertificate::Gram(d)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a4_state(alphas: &[C64], a: &[C64], b: &[C64]) -> SymmetricState {
        let mut m = CMatrix::zeros(5, 5);
        for k in 0..alphas.len() {
            let v = term_vector(GramForm::A4, alphas[k], a[k], b[k]);
            m += &v * v.adjoint();
        }
        SymmetricState::from_matrix_unchecked(4, m)
    }

    fn matched(got: &GramDecomposition, want: &[C64]) -> f64 {
        want.iter()
            .map(|w| got.alphas.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    #[test]
    fn product_state_is_one_term() {
        let s = SymmetricState::pure_product(4, Alpha::finite(0.0, 0.0)).unwrap();
        let GramOutcome::Decomposed(d) = decompose_gram(&s, GramForm::A4, 0).unwrap() else {
            panic!("inconclusive")
        };
        assert_eq!(d.k, 1);
        assert!(d.alphas[0].norm() < 1e-12 && d.is_product_form(1e-8));
    }

    #[test]
    fn a4_two_and_three_terms() {
        let alphas = [c(0.3, -0.2), c(-0.7, 0.5), c(1.2, 0.1)];
        let a = [c(0.5, 0.0), c(0.2, 0.3), c(-0.4, 0.1)];
        let b = [c(0.1, 0.1), c(0.0, -0.3), c(0.2, 0.0)];
        for k in [2, 3] {
            let s = a4_state(&alphas[..k], &a[..k], &b[..k]);
            let GramOutcome::Decomposed(d) = decompose_gram(&s, GramForm::A4, 1).unwrap() else {
                panic!("inconclusive for k={k}")
            };
            assert!(matched(&d, &alphas[..k]) < 1e-8);
            assert!(d.reconstruction_error < 1e-10);
            assert!(!d.is_product_form(1e-8));
        }
    }

    #[test]
    fn a3_recovers_companion_form() {
        let alphas = [c(0.4, 0.2), c(-0.3, 0.9)];
        let a = [c(0.5, 0.0), c(0.2, 0.3)];
        let b = [c(0.1, 0.1), c(0.0, -0.3)];
        let mut m = CMatrix::zeros(5, 5);
        for k in 0..2 {
            let v = term_vector(GramForm::A3, alphas[k], a[k], b[k]);
            m += &v * v.adjoint();
        }
        let s = SymmetricState::from_matrix_unchecked(4, m);
        let GramOutcome::Decomposed(d) = decompose_gram(&s, GramForm::A3, 1).unwrap() else {
            panic!("inconclusive")
        };
        assert!(d.reconstruction_error < 1e-10, "{}", d.reconstruction_error);
        for w in alphas {
            let best = d.alphas.iter().map(|g| (g - w).norm().min((g + w).norm())).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8);
        }
    }

    #[test]
    fn product_mixture_certificate() {
        let al = [
            Alpha::finite(0.1, 0.2),
            Alpha::finite(-0.5, 0.4),
            Alpha::finite(1.1, -0.3),
            Alpha::finite(0.0, -0.9),
            Alpha::Infinity,
        ];
        let w = [0.3, 0.2, 0.2, 0.15, 0.15];
        let mix = ProductMixture {
            alphas: al.to_vec(),
            weights: w.to_vec(),
            reconstruction_error: 0.0,
        };
        let s = SymmetricState::from_matrix_unchecked(4, mix.reconstruct(4));
        let fit = fit_product_mixture(&s, &al);
        assert!(fit.reconstruction_error < 1e-12);
        let cert = separability_certificate(&s, 0, &Tolerances::default()).unwrap();
        assert!(cert.is_some());
    }
}

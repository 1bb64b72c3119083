//! The qubit–qudit family `ρ_{d,b}`: construction, PPT, range criterion, kernel
//! and the separable decomposition at `b = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{rank_profile, Alpha, Tolerances};
use crate::linalg::{
    c, check_hermitian, kron_vec, max_abs, trace, CMatrix, CVector, C64, ONE, ZERO,
};
use crate::optim::{levenberg_marquardt, LmOptions};

pub const MAX_D: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorodeckiParams {
    pub d: usize,
    pub b: f64,
}

impl HorodeckiParams {
    pub fn new(d: usize, b: f64) -> Result<Self> {
        if !(2..=MAX_D).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "d = {d} outside 2..={MAX_D}"
            )));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParameter(format!("b = {b} outside [0, 1]")));
        }
        Ok(HorodeckiParams { d, b })
    }

    /// `y = √((1−b)/(1+b))`.
    pub fn y(&self) -> f64 {
        ((1.0 - self.b) / (1.0 + self.b)).sqrt()
    }

    pub fn is_interior(&self) -> bool {
        self.b > 0.0 && self.b < 1.0
    }
}

/// Density matrix on `C² ⊗ C^d`, index `a·d + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitQuditState {
    pub d: usize,
    pub matrix: CMatrix,
    pub trace_normalized: bool,
}

impl QubitQuditState {
    pub fn new(d: usize, matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != 2 * d || matrix.ncols() != 2 * d {
            return Err(Error::Size(format!("expected {0}x{0} matrix", 2 * d)));
        }
        check_hermitian(&matrix, tol.hermitian_tol)?;
        let tn = (trace(&matrix).re - 1.0).abs() <= 1e-12;
        Ok(QubitQuditState {
            d,
            matrix,
            trace_normalized: tn,
        })
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    /// Transpose on the qubit factor.
    pub fn partial_transpose_a(&self) -> CMatrix {
        pt_qubit(&self.matrix, self.d)
    }

    /// Applies `1 ⊗ L` with `L : C^d → C^{d'}`.
    pub fn local_filter(&self, l: &CMatrix) -> Result<QubitQuditState> {
        if l.ncols() != self.d {
            return Err(Error::Size(format!("filter must have {} columns", self.d)));
        }
        let full = CMatrix::identity(2, 2).kronecker(l);
        let m = &full * &self.matrix * full.adjoint();
        let tn = (trace(&m).re - 1.0).abs() <= 1e-12;
        Ok(QubitQuditState {
            d: l.nrows(),
            matrix: m,
            trace_normalized: tn,
        })
    }
}

pub fn pt_qubit(m: &CMatrix, d: usize) -> CMatrix {
    let mut out = m.clone();
    for a in 0..2 {
        for ap in 0..2 {
            for i in 0..d {
                for j in 0..d {
                    out[(a * d + i, ap * d + j)] = m[(ap * d + i, a * d + j)];
                }
            }
        }
    }
    out
}

fn basis_ket(d: usize, a: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(2 * d);
    v[a * d + i] = ONE;
    v
}

pub fn rho_insep(d: usize) -> Result<QubitQuditState> {
    if !(2..=MAX_D).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "d = {d} outside 2..={MAX_D}"
        )));
    }
    let n = (2 * d - 1) as f64;
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for i in 0..d - 1 {
        let psi = (basis_ket(d, 0, i) + basis_ket(d, 1, i + 1)) * s;
        m += &psi * psi.adjoint() * c(2.0 / n, 0.0);
    }
    let v = basis_ket(d, 1, 0);
    m += &v * v.adjoint() * c(1.0 / n, 0.0);
    Ok(QubitQuditState {
        d,
        matrix: m,
        trace_normalized: true,
    })
}

fn phi_b(p: &HorodeckiParams) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    basis_ket(p.d, 0, 0) * c(s * (1.0 - p.b).sqrt(), 0.0)
        + basis_ket(p.d, 0, p.d - 1) * c(s * (1.0 + p.b).sqrt(), 0.0)
}

/// `ρ_{d,b} = [(2d−1) b ρ_insep + |Φ_b⟩⟨Φ_b|] / ((2d−1) b + 1)`.
pub fn rho_db(p: &HorodeckiParams) -> QubitQuditState {
    let insep = rho_insep(p.d).expect("validated d");
    let n = (2 * p.d - 1) as f64;
    let phi = phi_b(p);
    let m = (&insep.matrix * c(n * p.b, 0.0) + &phi * phi.adjoint()) / c(n * p.b + 1.0, 0.0);
    QubitQuditState {
        d: p.d,
        matrix: m,
        trace_normalized: true,
    }
}

/// Independent assembly from the blocks `C`, `b B_U`, `b B_L`, `b 1`.
pub fn block_form(p: &HorodeckiParams) -> CMatrix {
    let d = p.d;
    let b = p.b;
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, i)] = c(b, 0.0);
        m[(d + i, d + i)] = c(b, 0.0);
    }
    m[(0, 0)] = c((1.0 + b) / 2.0, 0.0);
    m[(d - 1, d - 1)] = c((1.0 + b) / 2.0, 0.0);
    if d > 1 {
        let off = c((1.0 - b * b).sqrt() / 2.0, 0.0);
        m[(0, d - 1)] += off;
        m[(d - 1, 0)] += off;
    }
    for i in 0..d - 1 {
        m[(i, d + i + 1)] = c(b, 0.0);
        m[(d + i + 1, i)] = c(b, 0.0);
    }
    m / c((2 * d - 1) as f64 * b + 1.0, 0.0)
}

/// `‖ρ^{T_A} − (1⊗U) ρ (1⊗U†)‖_∞` with `U` the anti-diagonal unit matrix.
pub fn verify_ppt_by_unitary(p: &HorodeckiParams) -> f64 {
    let d = p.d;
    let rho = rho_db(p);
    let u = CMatrix::from_fn(d, d, |i, j| if i + j == d - 1 { ONE } else { ZERO });
    let full = CMatrix::identity(2, 2).kronecker(&u);
    let conj = &full * &rho.matrix * full.adjoint();
    max_abs(&(rho.partial_transpose_a() - conj))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionResiduals {
    pub alpha: Alpha,
    /// `|α(1−|α|²)|`
    pub cond_i: f64,
    /// `|α^{d−2} − ᾱ(α^{d−1}+y)|`
    pub cond_ii: f64,
    /// `|y(y+α^{d−1}) − (1−|α|²)|`
    pub cond_iii: f64,
    /// Largest residual over the complete membership system.
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RangeCriterionReport {
    pub entangled: bool,
    pub tested_conditions: Vec<ConditionResiduals>,
    pub witness_vector: Option<Alpha>,
}

#[derive(Clone, Copy, Debug)]
pub struct RangeSearchConfig {
    pub theta_grid: usize,
    pub radial_grid: usize,
}

impl Default for RangeSearchConfig {
    fn default() -> Self {
        RangeSearchConfig {
            theta_grid: 720,
            radial_grid: 24,
        }
    }
}

/// Local qudit factor of the product vectors in `R(ρ_{d,b})`.
pub fn range_product_factor(d: usize, y: f64, alpha: Alpha) -> CVector {
    match alpha {
        Alpha::Finite(a) => CVector::from_fn(d, |j, _| {
            let v = a.powu((d - 1 - j) as u32);
            if j == 0 {
                v + y
            } else {
                v
            }
        }),
        Alpha::Infinity => {
            let mut v = CVector::zeros(d);
            v[0] = ONE;
            v
        }
    }
}

/// Residuals of `(1, ᾱ) ⊗ f(α) ∈ R(ρ^{T_A})`, written out component-wise.
pub fn membership_residuals(d: usize, y: f64, alpha: Alpha) -> Vec<C64> {
    match alpha {
        Alpha::Finite(a) => {
            let f = range_product_factor(d, y, alpha);
            let ab = a.conj();
            let mut out: Vec<C64> = (1..d.saturating_sub(1))
                .map(|j| f[j] - ab * f[j - 1])
                .collect();
            out.push(ONE - f[0] * y - ab * f[d - 2]);
            out
        }
        // (0,1)⊗(1,0,…,0): first half vanishes, forcing the second half to be (0,…,0,b).
        Alpha::Infinity => vec![ONE],
    }
}

fn condition_report(d: usize, y: f64, alpha: Alpha) -> ConditionResiduals {
    let max_residual = membership_residuals(d, y, alpha)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    let (ci, cii, ciii) = match alpha {
        Alpha::Finite(a) => {
            let n2 = a.norm_sqr();
            let top = a.powu((d - 1) as u32);
            let sub = if d >= 2 { a.powu((d - 2) as u32) } else { ONE };
            (
                (a * (1.0 - n2)).norm(),
                (sub - a.conj() * (top + y)).norm(),
                ((top + y) * y - (1.0 - n2)).norm(),
            )
        }
        Alpha::Infinity => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    ConditionResiduals {
        alpha,
        cond_i: ci,
        cond_ii: cii,
        cond_iii: ciii,
        max_residual,
    }
}

/// Range criterion for `0 < b < 1`.
///
/// For `d ≥ 4` the membership system forces `α ∈ {0} ∪ {|α| = 1} ∪ {∞}` and only
/// those branches are examined; for `d ≤ 3` a two-dimensional search is run.
pub fn range_criterion_test(
    p: &HorodeckiParams,
    cfg: &RangeSearchConfig,
    tol: &Tolerances,
) -> Result<RangeCriterionReport> {
    if !p.is_interior() {
        return Err(Error::Boundary(format!(
            "b = {} is a boundary value; use the separable constructions",
            p.b
        )));
    }
    let d = p.d;
    let y = p.y();
    let mut tested = vec![];
    tested.push(condition_report(d, y, Alpha::Finite(ZERO)));
    tested.push(condition_report(d, y, Alpha::Infinity));
    let max_res = |a: C64| {
        membership_residuals(d, y, Alpha::Finite(a))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()))
    };
    if d >= 4 {
        let n = cfg.theta_grid.max(8);
        let grid: Vec<f64> = (0..n)
            .map(|k| max_res(C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)))
            .collect();
        let h = 2.0 * PI / n as f64;
        let cond_ii = |t: f64| {
            let a = C64::from_polar(1.0, t);
            (a.powu((d - 2) as u32) - a.conj() * (a.powu((d - 1) as u32) + y)).norm()
        };
        for k in 0..n {
            let prev = grid[(k + n - 1) % n];
            let next = grid[(k + 1) % n];
            if grid[k] <= prev && grid[k] <= next {
                let t = golden_min(cond_ii, (k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
                tested.push(condition_report(
                    d,
                    y,
                    Alpha::Finite(C64::from_polar(1.0, t)),
                ));
            }
        }
    } else {
        let radial = cfg.radial_grid.max(4);
        let angular = 36;
        let mut starts = vec![];
        for ri in 0..radial {
            let r = 2.5 * (ri as f64 + 0.5) / radial as f64;
            for ti in 0..angular {
                let a = C64::from_polar(r, 2.0 * PI * ti as f64 / angular as f64);
                starts.push((max_res(a), a));
            }
        }
        starts.sort_by(|x, y| x.0.total_cmp(&y.0));
        for &(_, a0) in starts.iter().take(8) {
            let (x, _) = levenberg_marquardt(
                |v| {
                    membership_residuals(d, y, Alpha::Finite(c(v[0], v[1])))
                        .iter()
                        .flat_map(|z| [z.re, z.im])
                        .collect()
                },
                &[a0.re, a0.im],
                LmOptions::default(),
            );
            tested.push(condition_report(d, y, Alpha::Finite(c(x[0], x[1]))));
        }
    }
    let witness = tested
        .iter()
        .filter(|r| r.max_residual <= tol.residual_tol)
        .min_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        .map(|r| r.alpha);
    Ok(RangeCriterionReport {
        entangled: witness.is_none(),
        tested_conditions: tested,
        witness_vector: witness,
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// `d − 1` vectors spanning the kernel of `ρ_{d,b}` for `0 < b < 1`.
pub fn kernel_basis(p: &HorodeckiParams) -> Result<Vec<CVector>> {
    if !p.is_interior() {
        return Err(Error::Boundary(format!(
            "kernel basis needs 0 < b < 1, got {}",
            p.b
        )));
    }
    let d = p.d;
    let mut out: Vec<CVector> = (1..d - 1)
        .map(|i| basis_ket(d, 0, i) - basis_ket(d, 1, i + 1))
        .collect();
    let sp = c((1.0 + p.b).sqrt(), 0.0);
    let sm = c((1.0 - p.b).sqrt(), 0.0);
    out.push(basis_ket(d, 0, 0) * (-sp) + basis_ket(d, 0, d - 1) * sm + basis_ket(d, 1, 1) * sp);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct B1Decomposition {
    pub phis: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(1, e^{iφ})/√2` and `(1, e^{−iφ}, …)/√d` per node.
    pub qubit_vectors: Vec<CVector>,
    pub qudit_vectors: Vec<CVector>,
    pub mixture: CMatrix,
    /// Scalar `c` with `ρ_{d,1} = c ∫_0^{2π} P(φ)⊗Q(φ) dφ`.
    pub fitted_prefactor: f64,
    pub frobenius_error: f64,
}

/// Equally spaced quadrature of the `b = 1` integral representation.
pub fn separable_decomposition_b1(d: usize, m: usize) -> Result<B1Decomposition> {
    HorodeckiParams::new(d, 1.0)?;
    if m < 2 * d + 1 {
        return Err(Error::QuadratureTooCoarse {
            nodes: m,
            required: 2 * d + 1,
        });
    }
    let mut phis = vec![];
    let mut qv = vec![];
    let mut dv = vec![];
    let mut mixture = CMatrix::zeros(2 * d, 2 * d);
    for j in 0..m {
        let phi = 2.0 * PI * j as f64 / m as f64;
        let e = CVector::from_vec(vec![ONE, C64::from_polar(1.0, phi)]) / c(2f64.sqrt(), 0.0);
        let f = CVector::from_fn(d, |k, _| C64::from_polar(1.0, -(k as f64) * phi))
            / c((d as f64).sqrt(), 0.0);
        let v = kron_vec(&e, &f);
        mixture += &v * v.adjoint() * c(1.0 / m as f64, 0.0);
        phis.push(phi);
        qv.push(e);
        dv.push(f);
    }
    let raw_trace = trace(&mixture).re;
    let fitted_prefactor = 1.0 / (2.0 * PI * raw_trace);
    mixture /= c(raw_trace, 0.0);
    let target = rho_db(&HorodeckiParams { d, b: 1.0 });
    let err = crate::linalg::frobenius(&(&mixture - &target.matrix));
    Ok(B1Decomposition {
        phis,
        weights: vec![1.0 / m as f64; m],
        qubit_vectors: qv,
        qudit_vectors: dv,
        mixture,
        fitted_prefactor,
        frobenius_error: err,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum HorodeckiVerdict {
    /// `b = 0`: the state is the pure product `|Φ_0⟩⟨Φ_0|`.
    SeparablePure,
    /// `b = 1`: explicit mixture of product projectors.
    SeparableIntegral { frobenius_error: f64 },
    /// `d ≤ 3`: PPT implies separable; the report carries a product vector.
    SeparableLowDimension { witness: Option<Alpha> },
    /// No product vector in the range has its partial conjugate in `R(ρ^{T_A})`.
    EntangledRangeCriterion,
    /// `d ≥ 4` and a range witness was found (not expected).
    Inconclusive,
}

impl HorodeckiVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(
            self,
            HorodeckiVerdict::SeparablePure
                | HorodeckiVerdict::SeparableIntegral { .. }
                | HorodeckiVerdict::SeparableLowDimension { .. }
        )
    }
}

pub fn separability_verdict(
    p: &HorodeckiParams,
    cfg: &RangeSearchConfig,
    tol: &Tolerances,
) -> Result<HorodeckiVerdict> {
    if p.b == 0.0 {
        return Ok(HorodeckiVerdict::SeparablePure);
    }
    if p.b == 1.0 {
        let dec = separable_decomposition_b1(p.d, 2 * p.d + 1)?;
        return Ok(HorodeckiVerdict::SeparableIntegral {
            frobenius_error: dec.frobenius_error,
        });
    }
    let report = range_criterion_test(p, cfg, tol)?;
    Ok(match (p.d <= 3, report.entangled) {
        (true, _) => HorodeckiVerdict::SeparableLowDimension {
            witness: report.witness_vector,
        },
        (false, true) => HorodeckiVerdict::EntangledRangeCriterion,
        (false, false) => HorodeckiVerdict::Inconclusive,
    })
}

/// Rank of `ρ` and `ρ^{T_A}`.
pub fn ranks(state: &QubitQuditState, tol: &Tolerances) -> Result<(usize, usize)> {
    Ok((
        rank_profile(&state.matrix, tol)?.rank,
        rank_profile(&state.partial_transpose_a(), tol)?.rank,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, min_eigenvalue};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn insep_d2_closed_form() {
        let r = rho_insep(2).unwrap();
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi0 = (basis_ket(2, 0, 0) + basis_ket(2, 1, 1)) * s;
        let v = basis_ket(2, 1, 0);
        let want =
            &psi0 * psi0.adjoint() * c(2.0 / 3.0, 0.0) + &v * v.adjoint() * c(1.0 / 3.0, 0.0);
        assert!(max_abs(&(r.matrix - want)) < 1e-15);
        assert!(rho_insep(1).is_err());
    }

    #[test]
    fn insep_rank_d5() {
        let r = rho_insep(5).unwrap();
        assert!((r.trace() - 1.0).abs() < 1e-14);
        assert_eq!(rank_profile(&r.matrix, &tol()).unwrap().rank, 5);
    }

    #[test]
    fn block_form_matches_ket_form() {
        for d in 2..=8 {
            for k in 0..=10 {
                let p = HorodeckiParams::new(d, k as f64 / 10.0).unwrap();
                assert!(
                    max_abs(&(rho_db(&p).matrix - block_form(&p))) < 1e-14,
                    "d={d} b={}",
                    p.b
                );
            }
        }
    }

    #[test]
    fn b_zero_is_pure_phi() {
        let p = HorodeckiParams::new(5, 0.0).unwrap();
        let phi = phi_b(&p);
        assert!(max_abs(&(rho_db(&p).matrix - &phi * phi.adjoint())) < 1e-15);
    }

    #[test]
    fn ppt_by_unitary() {
        for (d, b) in [(4, 0.3), (2, 1.0), (7, 0.9)] {
            let p = HorodeckiParams::new(d, b).unwrap();
            assert!(verify_ppt_by_unitary(&p) <= 1e-13);
            assert!(min_eigenvalue(&rho_db(&p).partial_transpose_a()) >= -1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(HorodeckiParams::new(1, 0.5).is_err());
        assert!(HorodeckiParams::new(4, 1.5).is_err());
        assert!(HorodeckiParams::new(17, 0.5).is_err());
    }

    #[test]
    fn range_criterion_examples() {
        let t = tol();
        let cfg = RangeSearchConfig::default();
        for (d, b, want) in [
            (4, 0.5, true),
            (3, 0.5, false),
            (6, 0.25, true),
            (2, 0.7, false),
        ] {
            let p = HorodeckiParams::new(d, b).unwrap();
            let r = range_criterion_test(&p, &cfg, &t).unwrap();
            assert_eq!(r.entangled, want, "d={d} b={b}");
        }
        let p = HorodeckiParams::new(4, 1.0).unwrap();
        assert!(matches!(
            range_criterion_test(&p, &cfg, &t),
            Err(Error::Boundary(_))
        ));
    }

    #[test]
    fn witness_is_in_both_ranges() {
        let t = tol();
        let p = HorodeckiParams::new(3, 0.4).unwrap();
        let r = range_criterion_test(&p, &RangeSearchConfig::default(), &t).unwrap();
        let a = r.witness_vector.unwrap();
        let rho = rho_db(&p);
        let f = range_product_factor(3, p.y(), a);
        let v = kron_vec(&CVector::from_column_slice(&a.local(false)), &f);
        let w = kron_vec(&CVector::from_column_slice(&a.local(true)), &f);
        assert!(rank_profile(&rho.matrix, &t).unwrap().range_residual(&v) < 1e-9);
        assert!(
            rank_profile(&rho.partial_transpose_a(), &t)
                .unwrap()
                .range_residual(&w)
                < 1e-9
        );
    }

    #[test]
    fn explicit_conditions_agree_with_range_projection() {
        // A non-solution has a nonzero projection residual and nonzero condition residual.
        let t = tol();
        let p = HorodeckiParams::new(5, 0.5).unwrap();
        let pt = rank_profile(&rho_db(&p).partial_transpose_a(), &t).unwrap();
        for k in 0..16 {
            let a = C64::from_polar(0.3 + 0.2 * k as f64, 0.7 * k as f64);
            let f = range_product_factor(5, p.y(), Alpha::Finite(a));
            let w = kron_vec(&CVector::from_vec(vec![ONE, a.conj()]), &f);
            let res = membership_residuals(5, p.y(), Alpha::Finite(a));
            let zero = res.iter().all(|z| z.norm() < 1e-12);
            assert_eq!(zero, pt.range_residual(&w) < 1e-10);
        }
    }

    #[test]
    fn kernel_vectors() {
        let t = tol();
        for (d, b) in [(5, 0.5), (4, 0.9)] {
            let p = HorodeckiParams::new(d, b).unwrap();
            let rho = rho_db(&p);
            let k = kernel_basis(&p).unwrap();
            assert_eq!(k.len(), d - 1);
            for v in &k {
                assert!((&rho.matrix * v).norm() <= 1e-12);
            }
            let prof = rank_profile(&rho.matrix, &t).unwrap();
            assert_eq!(prof.rank, d + 1);
            let km = CMatrix::from_columns(&k);
            // the SVD kernel projector fixes the span of the returned vectors
            let pk = &prof.kernel_basis * prof.kernel_basis.adjoint();
            assert!(frobenius(&(&pk * &km - &km)) < 1e-10);
        }
    }

    #[test]
    fn b1_quadrature() {
        for (d, m) in [(4, 9), (2, 5)] {
            let dec = separable_decomposition_b1(d, m).unwrap();
            assert!(dec.frobenius_error < 1e-12, "{}", dec.frobenius_error);
            assert!((dec.fitted_prefactor - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
        assert!(separable_decomposition_b1(4, 8).is_err());
    }
}

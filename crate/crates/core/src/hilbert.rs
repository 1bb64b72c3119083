//! Dicke basis, symmetric projector, partial transposes and rank extraction.
//!
//! Qubit ordering: party 1 is the most significant (slowest varying) bit of a
//! computational-basis index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    binomial, c, check_hermitian, eigh, frobenius, kron_vec, max_abs, trace, CMatrix, CVector, C64,
    ONE, ZERO,
};

pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank_rel_tol: f64,
    pub psd_tol: f64,
    pub hermitian_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel_tol: 1e-8,
            psd_tol: 1e-10,
            hermitian_tol: 1e-12,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.rank_rel_tol,
            self.psd_tol,
            self.hermitian_tol,
            self.residual_tol,
        ];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) || self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "invalid tolerances {self:?}"
            )));
        }
        Ok(())
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Size(format!(
            "number of qubits {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DickeBasis {
    pub num_qubits: usize,
    /// Indicator vectors of `|E_i^N⟩`: computational indices with `i` ones.
    pub supports: Vec<Vec<usize>>,
    /// Squared norms `C(N, i)`.
    pub norms: Vec<u64>,
}

impl DickeBasis {
    pub fn dim(&self) -> usize {
        self.num_qubits + 1
    }

    /// Unnormalized `|E_i^N⟩` in `C^{2^N}`.
    pub fn vector(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(1 << self.num_qubits);
        for &idx in &self.supports[i] {
            v[idx] = ONE;
        }
        v
    }

    /// Normalized `|D_i^N⟩`.
    pub fn orthonormal_vector(&self, i: usize) -> CVector {
        self.vector(i) / c((self.norms[i] as f64).sqrt(), 0.0)
    }

    /// Isometry `2^N × (N+1)` whose columns are the `|D_i^N⟩`.
    pub fn isometry(&self) -> CMatrix {
        let cols: Vec<CVector> = (0..self.dim())
            .map(|i| self.orthonormal_vector(i))
            .collect();
        CMatrix::from_columns(&cols)
    }
}

pub fn dicke_basis(n: usize) -> Result<DickeBasis> {
    check_qubits(n)?;
    let mut supports = vec![vec![]; n + 1];
    for idx in 0..(1usize << n) {
        supports[idx.count_ones() as usize].push(idx);
    }
    let norms = (0..=n).map(|i| binomial(n, i)).collect();
    Ok(DickeBasis {
        num_qubits: n,
        supports,
        norms,
    })
}

pub fn symmetric_projector(n: usize) -> Result<CMatrix> {
    let d = dicke_basis(n)?.isometry();
    Ok(&d * d.adjoint())
}

/// Restricts an operator supported on `S_N` to orthonormal Dicke coordinates.
pub fn compress(op: &CMatrix, basis: &DickeBasis) -> Result<CMatrix> {
    let dim = 1usize << basis.num_qubits;
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::Size(format!("expected {dim}x{dim} operator")));
    }
    let d = basis.isometry();
    let p = &d * d.adjoint();
    let residual = max_abs(&(&p * op * &p - op));
    if residual > 1e-10 * max_abs(op).max(1.0) {
        return Err(Error::SupportOutsideSymmetric { residual });
    }
    Ok(d.adjoint() * op * d)
}

pub fn expand(m: &CMatrix, basis: &DickeBasis) -> Result<CMatrix> {
    if m.nrows() != basis.dim() || m.ncols() != basis.dim() {
        return Err(Error::Size(format!(
            "expected {0}x{0} Dicke matrix",
            basis.dim()
        )));
    }
    let d = basis.isometry();
    Ok(&d * m * d.adjoint())
}

/// Set of transposed parties, 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub transposed_parties: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(parties: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = parties.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PartitionSpec {
            transposed_parties: v,
        }
    }

    /// The parties `{1, …, k}`.
    pub fn canonical(k: usize) -> Self {
        PartitionSpec::new(1..=k)
    }

    pub fn complement(&self, n: usize) -> Self {
        PartitionSpec::new((1..=n).filter(|p| !self.transposed_parties.contains(p)))
    }

    fn mask(&self, n: usize) -> Result<usize> {
        let mut mask = 0usize;
        for &p in &self.transposed_parties {
            if p == 0 || p > n {
                return Err(Error::InvalidParty {
                    party: p,
                    num_qubits: n,
                });
            }
            mask |= 1 << (n - p);
        }
        Ok(mask)
    }
}

/// Partial transpose of an operator on `N` qubits over the parties in `spec`.
pub fn partial_transpose(op: &CMatrix, n: usize, spec: &PartitionSpec) -> Result<CMatrix> {
    check_qubits(n)?;
    let dim = 1usize << n;
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::Size(format!(
            "expected {dim}x{dim} operator for {n} qubits"
        )));
    }
    let mask = spec.mask(n)?;
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            let nr = (r & !mask) | (col & mask);
            let nc = (col & !mask) | (r & mask);
            out[(nr, nc)] = op[(r, col)];
        }
    }
    Ok(out)
}

/// Symmetric N-qubit operator in orthonormal Dicke coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    pub num_qubits: usize,
    pub dicke_matrix: CMatrix,
    pub trace_normalized: bool,
}

impl SymmetricState {
    /// Validates size and Hermiticity; does not normalize.
    pub fn new(n: usize, m: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_qubits(n)?;
        if m.nrows() != n + 1 || m.ncols() != n + 1 {
            return Err(Error::Size(format!(
                "Dicke matrix for {n} qubits must be {0}x{0}, got {1}x{2}",
                n + 1,
                m.nrows(),
                m.ncols()
            )));
        }
        check_hermitian(&m, tol.hermitian_tol)?;
        let tn = (trace(&m).re - 1.0).abs() <= 1e-12;
        Ok(SymmetricState {
            num_qubits: n,
            dicke_matrix: crate::linalg::hermitize(&m),
            trace_normalized: tn,
        })
    }

    pub fn from_computational(op: &CMatrix, n: usize, tol: &Tolerances) -> Result<Self> {
        let basis = dicke_basis(n)?;
        check_hermitian(op, tol.hermitian_tol)?;
        SymmetricState::new(n, compress(op, &basis)?, tol)
    }

    /// `P_N / (N+1)`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(SymmetricState {
            num_qubits: n,
            dicke_matrix: CMatrix::identity(n + 1, n + 1) * c(1.0 / (n + 1) as f64, 0.0),
            trace_normalized: true,
        })
    }

    /// Pure symmetric product `(|e⟩⟨e|)^{⊗N}` with `e ∝ (1, α)`.
    pub fn pure_product(n: usize, alpha: Alpha) -> Result<Self> {
        check_qubits(n)?;
        let v = symmetric_power_coords(alpha, false, n);
        let v = &v / c(v.norm(), 0.0);
        Ok(SymmetricState {
            num_qubits: n,
            dicke_matrix: &v * v.adjoint(),
            trace_normalized: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.num_qubits + 1
    }

    pub fn trace(&self) -> f64 {
        trace(&self.dicke_matrix).re
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t.abs() > 0.0 && t.is_finite()) {
            return Err(Error::Numerical(
                "cannot normalize an operator with zero trace".into(),
            ));
        }
        Ok(SymmetricState {
            num_qubits: self.num_qubits,
            dicke_matrix: &self.dicke_matrix / c(t, 0.0),
            trace_normalized: true,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymmetricState {
            num_qubits: self.num_qubits,
            dicke_matrix: &self.dicke_matrix * c(s, 0.0),
            trace_normalized: (trace(&self.dicke_matrix).re * s - 1.0).abs() <= 1e-12,
        }
    }

    pub fn from_matrix_unchecked(n: usize, m: CMatrix) -> Self {
        let tn = (trace(&m).re - 1.0).abs() <= 1e-12;
        SymmetricState {
            num_qubits: n,
            dicke_matrix: m,
            trace_normalized: tn,
        }
    }

    pub fn to_computational(&self) -> CMatrix {
        let basis = dicke_basis(self.num_qubits).expect("validated qubit count");
        expand(&self.dicke_matrix, &basis).expect("validated size")
    }

    /// Number of canonical partial transposes, `⌊N/2⌋`.
    pub fn num_pts(&self) -> usize {
        self.num_qubits / 2
    }

    /// `[ρ, ρ^{T_1}, …, ρ^{T_M}]` on the compressed spaces.
    pub fn pt_family(&self) -> Vec<CMatrix> {
        let mut out = vec![self.dicke_matrix.clone()];
        for k in 1..=self.num_pts() {
            out.push(compressed_pt_matrix(&self.dicke_matrix, self.num_qubits, k));
        }
        out
    }

    /// Minimum eigenvalue of each member of [`Self::pt_family`].
    pub fn ppt_min_eigenvalues(&self) -> Vec<f64> {
        self.pt_family()
            .iter()
            .map(crate::linalg::min_eigenvalue)
            .collect()
    }

    /// PSD and PPT within `psd_tol · max(1, ‖ρ‖)`.
    pub fn is_ppt(&self, tol: &Tolerances) -> bool {
        let scale = frobenius(&self.dicke_matrix).max(1.0);
        self.ppt_min_eigenvalues()
            .iter()
            .all(|&e| e >= -tol.psd_tol * scale)
    }

    /// Errors with the first violated PT (0 means the state itself).
    pub fn require_ppt(&self, tol: &Tolerances) -> Result<()> {
        let scale = frobenius(&self.dicke_matrix).max(1.0);
        for (k, e) in self.ppt_min_eigenvalues().into_iter().enumerate() {
            if e < -tol.psd_tol * scale {
                return Err(if k == 0 {
                    Error::NotPsd { min_eig: e }
                } else {
                    Error::NotPpt {
                        parties: k,
                        min_eig: e,
                    }
                });
            }
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        SymmetricState {
            num_qubits: self.num_qubits,
            dicke_matrix: self.dicke_matrix.map(|z| z.conj()),
            trace_normalized: self.trace_normalized,
        }
    }
}

fn pt_coefficient(n: usize, k: usize, i: usize, a: usize) -> f64 {
    let num = binomial(k, a) as f64 * binomial(n - k, i - a) as f64;
    (num / binomial(n, i) as f64).sqrt()
}

/// Dimension of `S_k ⊗ S_{N−k}`.
pub fn compressed_dim(n: usize, k: usize) -> usize {
    (k + 1) * (n - k + 1)
}

/// Partial transpose over parties `1..=k` of a Dicke-coordinate matrix, written in
/// orthonormal coordinates of `S_k ⊗ S_{N−k}` (index `a·(N−k+1) + b`).
pub fn compressed_pt_matrix(m: &CMatrix, n: usize, k: usize) -> CMatrix {
    if k == 0 {
        return m.clone();
    }
    let w = n - k + 1;
    let dim = compressed_dim(n, k);
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..=n {
        for j in 0..=n {
            let rij = m[(i, j)];
            if rij == ZERO {
                continue;
            }
            for a in i.saturating_sub(n - k)..=k.min(i) {
                let cia = pt_coefficient(n, k, i, a);
                for b in j.saturating_sub(n - k)..=k.min(j) {
                    let cjb = pt_coefficient(n, k, j, b);
                    out[(b * w + (i - a), a * w + (j - b))] += rij * (cia * cjb);
                }
            }
        }
    }
    out
}

/// Isometry from `S_k ⊗ S_{N−k}` coordinates into `C^{2^N}`.
pub fn compressed_embedding(n: usize, k: usize) -> Result<CMatrix> {
    let dk = dicke_basis(k.max(1))?.isometry();
    let dk = if k == 0 {
        CMatrix::from_element(1, 1, ONE)
    } else {
        dk
    };
    let rest = if n - k == 0 {
        CMatrix::from_element(1, 1, ONE)
    } else {
        dicke_basis(n - k)?.isometry()
    };
    Ok(dk.kronecker(&rest))
}

pub fn compressed_pt(state: &SymmetricState, k: usize) -> Result<CMatrix> {
    if k == 0 || k > state.num_qubits / 2 {
        return Err(Error::InvalidParameter(format!(
            "partial transpose size {k} outside 1..={}",
            state.num_qubits / 2
        )));
    }
    Ok(compressed_pt_matrix(
        &state.dicke_matrix,
        state.num_qubits,
        k,
    ))
}

#[derive(Clone, Debug)]
pub struct RankProfile {
    pub rank: usize,
    /// Columns form an orthonormal kernel basis.
    pub kernel_basis: CMatrix,
    /// Columns form an orthonormal range basis.
    pub range_basis: CMatrix,
    pub range_projector: CMatrix,
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
}

impl RankProfile {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.ncols()
    }

    /// `‖(1 − P) v‖ / ‖v‖`.
    pub fn range_residual(&self, v: &CVector) -> f64 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        (v - &self.range_projector * v).norm() / nv
    }
}

pub fn rank_profile(m: &CMatrix, tol: &Tolerances) -> Result<RankProfile> {
    check_hermitian(m, tol.hermitian_tol)?;
    let n = m.nrows();
    let (vals, vecs) = eigh(m);
    let smax = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cut = tol.rank_rel_tol * smax;
    let mut range = vec![];
    let mut kernel = vec![];
    for (i, v) in vals.iter().enumerate() {
        if smax > 0.0 && v.abs() > cut {
            range.push(vecs.column(i).into_owned());
        } else {
            kernel.push(vecs.column(i).into_owned());
        }
    }
    let to_mat = |cols: &[CVector]| {
        if cols.is_empty() {
            CMatrix::zeros(n, 0)
        } else {
            CMatrix::from_columns(cols)
        }
    };
    let range_basis = to_mat(&range);
    let kernel_basis = to_mat(&kernel);
    let mut sv: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(RankProfile {
        rank: range.len(),
        range_projector: &range_basis * range_basis.adjoint(),
        range_basis,
        kernel_basis,
        singular_values: sv,
        tolerance_used: tol.rank_rel_tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeRank(pub [usize; 3]);

impl ThreeRank {
    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
    pub fn sum_of_squares(&self) -> usize {
        self.0.iter().map(|r| r * r).sum()
    }
}

impl fmt::Display for ThreeRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Ranks of every member of the PT family (length `⌊N/2⌋ + 1`).
pub fn rank_vector(state: &SymmetricState, tol: &Tolerances) -> Result<Vec<usize>> {
    state
        .pt_family()
        .iter()
        .map(|m| rank_profile(m, tol).map(|p| p.rank))
        .collect()
}

pub fn three_rank(state: &SymmetricState, tol: &Tolerances) -> Result<ThreeRank> {
    if state.num_qubits != 4 {
        return Err(Error::InvalidParameter(format!(
            "three-rank is defined for four qubits, got {}",
            state.num_qubits
        )));
    }
    let r = rank_vector(state, tol)?;
    Ok(ThreeRank([r[0], r[1], r[2]]))
}

/// Point of the projective line: `e = (1, α)` or the limit `e = (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Alpha {
    Finite(C64),
    Infinity,
}

impl Alpha {
    pub fn finite(re: f64, im: f64) -> Self {
        Alpha::Finite(c(re, im))
    }

    /// Local vector `(1, α)` or `(0, 1)`, optionally conjugated.
    pub fn local(&self, conj: bool) -> [C64; 2] {
        match *self {
            Alpha::Finite(a) => [ONE, if conj { a.conj() } else { a }],
            Alpha::Infinity => [ZERO, ONE],
        }
    }

    pub fn value(&self) -> Option<C64> {
        match *self {
            Alpha::Finite(a) => Some(a),
            Alpha::Infinity => None,
        }
    }

    pub fn distance(&self, other: &Alpha) -> f64 {
        match (self, other) {
            (Alpha::Finite(a), Alpha::Finite(b)) => (a - b).norm(),
            (Alpha::Infinity, Alpha::Infinity) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// `⊗_p (1, α)` or its conjugate per party, in `C^{2^N}`.
pub fn embed_product_vector(alpha: Alpha, pattern: &[bool], n: usize) -> Result<CVector> {
    check_qubits(n)?;
    if pattern.len() != n {
        return Err(Error::Size(format!(
            "conjugation pattern has length {}, expected {n}",
            pattern.len()
        )));
    }
    let mut v = CVector::from_element(1, ONE);
    for &conj in pattern {
        let e = alpha.local(conj);
        v = kron_vec(&v, &CVector::from_column_slice(&e));
    }
    Ok(v)
}

/// Orthonormal Dicke coordinates of `e^{⊗n}` (or `(e*)^{⊗n}`), unnormalized `e`.
pub fn symmetric_power_coords(alpha: Alpha, conj: bool, n: usize) -> CVector {
    let [e0, e1] = alpha.local(conj);
    CVector::from_fn(n + 1, |j, _| {
        c((binomial(n, j) as f64).sqrt(), 0.0) * e0.powu((n - j) as u32) * e1.powu(j as u32)
    })
}

/// `(e*)^{⊗k} ⊗ e^{⊗(N−k)}` in `S_k ⊗ S_{N−k}` coordinates.
pub fn compressed_product_vector(alpha: Alpha, n: usize, k: usize) -> CVector {
    if k == 0 {
        return symmetric_power_coords(alpha, false, n);
    }
    kron_vec(
        &symmetric_power_coords(alpha, true, k),
        &symmetric_power_coords(alpha, false, n - k),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, kron};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn dicke_small_cases() {
        let b = dicke_basis(1).unwrap();
        assert_eq!(b.vector(0).as_slice(), &[ONE, ZERO]);
        let b = dicke_basis(2).unwrap();
        assert_eq!(b.vector(1).as_slice(), &[ZERO, ONE, ONE, ZERO]);
        assert_eq!(b.norms[1], 2);
        assert_eq!(dicke_basis(4).unwrap().norms[2], 6);
        assert!(dicke_basis(0).is_err() && dicke_basis(13).is_err());
    }

    #[test]
    fn dicke_vectors_orthogonal_with_binomial_norms() {
        let b = dicke_basis(5).unwrap();
        for i in 0..=5 {
            for j in 0..=5 {
                let ip = b.vector(i).dotc(&b.vector(j)).re;
                let want = if i == j { b.norms[i] as f64 } else { 0.0 };
                assert_eq!(ip, want);
            }
        }
    }

    #[test]
    fn two_qubit_symmetrizer() {
        let p = symmetric_projector(2).unwrap();
        let mut swap = CMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, col)] = ONE;
        }
        let want = (CMatrix::identity(4, 4) + swap) * c(0.5, 0.0);
        assert!(max_abs(&(p - want)) < 1e-15);
    }

    #[test]
    fn projector_trace_and_idempotence() {
        for n in 1..=6 {
            let p = symmetric_projector(n).unwrap();
            assert!((trace(&p).re - (n + 1) as f64).abs() < 1e-14);
            assert!(max_abs(&(&p * &p - &p)) < 1e-14);
        }
    }

    #[test]
    fn compress_projector_and_basis_state() {
        let b = dicke_basis(4).unwrap();
        let p = symmetric_projector(4).unwrap();
        assert!(max_abs(&(compress(&p, &b).unwrap() - CMatrix::identity(5, 5))) < 1e-14);
        let d0 = b.orthonormal_vector(0);
        let m = compress(&(&d0 * d0.adjoint()), &b).unwrap();
        assert!((m[(0, 0)] - ONE).norm() < 1e-15);
        assert!(max_abs(&m) <= 1.0 + 1e-15 && frobenius(&m) < 1.0 + 1e-14);
    }

    #[test]
    fn compress_rejects_non_symmetric_support() {
        let b = dicke_basis(2).unwrap();
        let mut op = CMatrix::zeros(4, 4);
        op[(1, 1)] = ONE;
        assert!(matches!(
            compress(&op, &b),
            Err(Error::SupportOutsideSymmetric { .. })
        ));
    }

    #[test]
    fn product_state_pt() {
        // σ1⊗σ2, transpose party 1
        let s1 =
            CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]);
        let s2 =
            CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.0, 0.3), c(0.0, -0.3), c(0.7, 0.0)]);
        let pt = partial_transpose(&kron(&s1, &s2), 2, &PartitionSpec::canonical(1)).unwrap();
        assert!(max_abs(&(pt - kron(&s1.transpose(), &s2))) < 1e-16);
        assert!(partial_transpose(&s1, 1, &PartitionSpec::new([2])).is_err());
    }

    #[test]
    fn compressed_pt_of_maximally_mixed_matches_full_space() {
        let rho = SymmetricState::maximally_mixed(4).unwrap();
        let full = rho.to_computational();
        for k in 1..=2 {
            let pt = compressed_pt(&rho, k).unwrap();
            let q = compressed_embedding(4, k).unwrap();
            let fpt = partial_transpose(&full, 4, &PartitionSpec::canonical(k)).unwrap();
            assert!(max_abs(&(q.adjoint() * &fpt * &q - &pt)) < 1e-14);
            // the full PT lives inside the compressed space
            assert!(max_abs(&(&q * &pt * q.adjoint() - &fpt)) < 1e-14);
            assert_eq!(rank_profile(&pt, &tol()).unwrap().rank, [8, 9][k - 1]);
        }
        assert!(compressed_pt(&rho, 3).is_err());
    }

    #[test]
    fn three_rank_examples() {
        let t = tol();
        let mm = SymmetricState::maximally_mixed(4).unwrap();
        assert_eq!(three_rank(&mm, &t).unwrap(), ThreeRank([5, 8, 9]));
        let d0 = SymmetricState::pure_product(4, Alpha::finite(0.0, 0.0)).unwrap();
        assert_eq!(three_rank(&d0, &t).unwrap(), ThreeRank([1, 1, 1]));
        assert_eq!(ThreeRank([5, 7, 8]).sum_of_squares(), 138);
    }

    #[test]
    fn rank_profile_of_zero_and_projector() {
        let t = tol();
        let z = rank_profile(&CMatrix::zeros(3, 3), &t).unwrap();
        assert_eq!((z.rank, z.kernel_dim()), (0, 3));
        let p = symmetric_projector(4).unwrap();
        let rp = rank_profile(&p, &t).unwrap();
        assert_eq!(rp.rank, 5);
        assert_eq!(rp.rank + rp.kernel_dim(), 16);
        assert!(
            max_abs(&(&rp.range_projector * &rp.range_projector - &rp.range_projector)) < 1e-12
        );
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(rank_profile(&bad, &t).is_err());
    }

    #[test]
    fn product_vector_embedding() {
        let v = embed_product_vector(Alpha::finite(0.0, 0.0), &[false; 4], 4).unwrap();
        assert_eq!(v[0], ONE);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let v = embed_product_vector(Alpha::finite(0.0, 1.0), &[true, false], 2).unwrap();
        let want = [ONE, c(0.0, 1.0), c(0.0, -1.0), ONE];
        assert!(v.iter().zip(want).all(|(a, b)| (a - b).norm() < 1e-15));
        let v = embed_product_vector(Alpha::Infinity, &[false; 4], 4).unwrap();
        assert_eq!(v[15], ONE);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compressed_product_vector_matches_embedding() {
        let a = Alpha::finite(0.4, -1.3);
        let q = compressed_embedding(4, 1).unwrap();
        let full = embed_product_vector(a, &[true, false, false, false], 4).unwrap();
        let v = compressed_product_vector(a, 4, 1);
        assert!((q * v - full).norm() < 1e-13);
    }

    #[test]
    fn complementary_pt_ranks_agree() {
        let rho = SymmetricState::pure_product(3, Alpha::finite(0.2, 0.9)).unwrap();
        let full = rho.to_computational();
        let s = PartitionSpec::new([2]);
        let a = partial_transpose(&full, 3, &s).unwrap();
        let b = partial_transpose(&full, 3, &s.complement(3)).unwrap();
        let t = tol();
        assert_eq!(
            rank_profile(&a, &t).unwrap().rank,
            rank_profile(&b, &t).unwrap().rank
        );
        let ea = eigvalsh(&a);
        let eb = eigvalsh(&b);
        assert!(ea.iter().zip(&eb).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}

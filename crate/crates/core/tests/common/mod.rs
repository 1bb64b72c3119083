#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symppt::extremal::{
    critical_points, extremal_search, first_crossing, orthogonalize_direction, step_to,
    DirectionPolicy, SearchConfig,
};
use symppt::hilbert::{compressed_product_vector, rank_vector};
use symppt::linalg::{c, CMatrix, CVector, C64, ONE};
use symppt::{Alpha, SymmetricState, Tolerances};

pub fn rand_c(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| rand_c(rng));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// States visited by unsteered walks from the maximally mixed state.
pub fn random_ppt_states(seed: u64, count: usize) -> Vec<SymmetricState> {
    let tol = Tolerances::default();
    let mut cfg = SearchConfig::four_qubit_default();
    cfg.policy = DirectionPolicy::Random;
    cfg.candidates_per_step = 2;
    let mut out = vec![cfg.start.clone()];
    let mut s = seed;
    while out.len() < count {
        if let Ok(trace) = extremal_search(s, &cfg, &tol) {
            out.extend(trace.steps.into_iter().map(|st| st.state));
        }
        s += 1;
    }
    out.truncate(count);
    out
}

/// Single rank-reduction steps from the maximally mixed state landing on `target`.
pub fn states_with_ranks(seed: u64, target: [usize; 3], count: usize, max_tries: usize) -> Vec<SymmetricState> {
    let tol = Tolerances::default();
    let start = SymmetricState::maximally_mixed(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for _ in 0..max_tries {
        if out.len() == count {
            break;
        }
        let mut cur = start.clone();
        // one or two steps reach the boundary profiles next to (5,8,9)
        for _ in 0..2 {
            let h = random_hermitian(&mut rng, 5);
            let Ok(h) = orthogonalize_direction(&cur, &h) else { break };
            let Ok(cps) = critical_points(&cur, &h, &tol) else { break };
            let Some(cp) = first_crossing(&cps, rng.gen()) else { break };
            let Ok(step) = step_to(&cur, &h, cp, &tol) else { break };
            cur = step.state.normalized().unwrap();
            let r = rank_vector(&cur, &tol).unwrap();
            if r == target {
                out.push(cur.clone());
                break;
            }
            if r.iter().zip(&target).any(|(a, b)| a < b) {
                break;
            }
        }
    }
    out
}

/// Kernel vector of `ρ^{T_A}` orthogonal to the product vector at `a0`.
pub fn planted_579(rng: &mut impl Rng, a0: Alpha) -> CVector {
    let x = compressed_product_vector(a0, 4, 1);
    let mut psi = CVector::from_fn(8, |_, _| rand_c(rng));
    let p = x.dotc(&psi) / x.dotc(&x);
    psi -= &x * p;
    psi
}

/// Hermitian `3 × 3` coefficient matrix whose quadratic form vanishes at `a0`.
pub fn planted_hermitian(rng: &mut impl Rng, a0: C64) -> CMatrix {
    let t = random_hermitian(rng, 3) * c(2.0, 0.0);
    let s2 = std::f64::consts::SQRT_2;
    let w = CVector::from_vec(vec![ONE, a0.conj() * s2, a0.conj() * a0.conj()]);
    let f = w.dotc(&(&t * &w)).re;
    t - &w * w.adjoint() * c(f / w.norm_squared().powi(2), 0.0)
}

pub fn vec_of(t: &CMatrix) -> CVector {
    CVector::from_fn(9, |i, _| t[(i / 3, i % 3)])
}

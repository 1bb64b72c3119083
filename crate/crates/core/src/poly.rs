//! Univariate complex polynomials (ascending coefficients) and companion-matrix roots.

use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::{eigvals, CMatrix, C64, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly(vec![ZERO, ONE])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|z| *z != ZERO)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.0.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficient-wise conjugate, i.e. the polynomial `x ↦ conj(p(conj x))`.
    pub fn conj(&self) -> Poly {
        Poly(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly(self.0.iter().map(|&z| z * s).collect())
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::constant(ONE);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn max_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Drops leading coefficients below `rel · max|coeff|`.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let cut = rel * self.max_coeff();
        let mut v = self.0.clone();
        while let Some(last) = v.last() {
            if last.norm() <= cut {
                v.pop();
            } else {
                break;
            }
        }
        Poly(v)
    }

    /// All roots via eigenvalues of the companion matrix, each polished by Newton.
    /// Leading coefficients below `1e-13` relative are treated as zero.
    pub fn roots(&self) -> Vec<C64> {
        let p = self.trimmed(1e-13);
        let n = match p.degree() {
            Some(n) if n >= 1 => n,
            _ => return vec![],
        };
        // Factor out roots at zero exactly.
        let lead_zero =
            p.0.iter()
                .position(|z| z.norm() > 1e-13 * p.max_coeff())
                .unwrap_or(0);
        let q = Poly(p.0[lead_zero..].to_vec());
        let mut roots = vec![ZERO; lead_zero];
        let m = n - lead_zero;
        if m >= 1 {
            let lead = q.0[m];
            let mut comp = CMatrix::zeros(m, m);
            for i in 1..m {
                comp[(i, i - 1)] = ONE;
            }
            for i in 0..m {
                comp[(i, m - 1)] = -q.0[i] / lead;
            }
            let dq = q.derivative();
            for z in eigvals(&comp) {
                roots.push(newton_polish(&q, &dq, z));
            }
        }
        roots
    }
}

fn newton_polish(p: &Poly, dp: &Poly, mut z: C64) -> C64 {
    let mut best = (p.eval(z).norm(), z);
    for _ in 0..8 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p.eval(z) / d;
        let r = p.eval(next).norm();
        if !(r < best.0) {
            break;
        }
        best = (r, next);
        z = next;
    }
    best.1
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly(
            (0..n)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or(ZERO) + o.0.get(i).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|&z| -z).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn roots_of_product_of_linear_factors() {
        let planted = [c(0.3, -0.7), c(-2.0, 1.5), c(5.0, 0.0), ZERO];
        let mut p = Poly::constant(ONE);
        for &r in &planted {
            p = p * Poly(vec![-r, ONE]);
        }
        let roots = p.roots();
        assert_eq!(roots.len(), 4);
        for r in planted {
            assert!(roots.iter().any(|z| (z - r).norm() < 1e-12));
        }
    }

    #[test]
    fn trimming_leading_zeros() {
        let p = Poly(vec![c(-1.0, 0.0), ONE, ZERO, c(1e-20, 0.0)]);
        let r = p.roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - ONE).norm() < 1e-14);
    }

    #[test]
    fn conj_and_eval() {
        let p = Poly(vec![c(1.0, 2.0), c(0.0, 1.0)]);
        let x = c(0.5, -0.25);
        assert!((p.conj().eval(x) - p.eval(x.conj()).conj()).norm() < 1e-15);
    }
}

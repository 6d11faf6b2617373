//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Columns of a working copy of `A` are orthogonalized by plane rotations,
//! accumulated in `V`, so that `A·V = U·Σ`. Each rotation first removes the
//! phase of the column inner product and then applies a real Jacobi rotation.

use num_complex::Complex;

use super::adjoint::ComplexMatrix;
use crate::Real;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(s)·Vᴴ` with `s` non-increasing.
///
/// `U` is `m×k`, `V` is `n×k`, `k = min(m, n)`. Columns of `U` belonging to
/// zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub s: Vec<T>,
    pub v: ComplexMatrix<T>,
}

pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

fn jacobi_tall<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    // column-major working copies
    let mut w: Vec<Vec<Complex<T>>> = (0..n).map(|c| (0..m).map(|r| a.get(r, c)).collect()).collect();
    let mut v: Vec<Vec<Complex<T>>> =
        (0..n).map(|c| (0..n).map(|r| if r == c { one } else { zero }).collect()).collect();
    let eps = T::epsilon();
    // rotations preserve the Frobenius norm; a column below ε‖A‖ is rounding
    // of a null direction and rotating it only drives it into underflow
    let total = w.iter().flatten().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let negligible = eps * eps * total;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&w[p], &w[q]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = zero;
                    for i in 0..m {
                        alpha = alpha + cp[i].norm_sqr();
                        beta = beta + cq[i].norm_sqr();
                        gamma = gamma + cp[i].conj() * cq[i];
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (g + g);
                let sign = if zeta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                let phase = (gamma / Complex::new(g, T::zero())).conj();
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = w.iter().map(|col| col.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in column order, so results are reproducible
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u_out = ComplexMatrix::zeros(m, n);
    let mut v_out = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        s.push(sigma);
        if sigma > T::zero() {
            let inv = Complex::new(sigma.recip(), T::zero());
            for (i, &wi) in w[j].iter().enumerate().take(m) {
                u_out.set(i, k, wi * inv);
            }
        }
        for (i, &vi) in v[j].iter().enumerate().take(n) {
            v_out.set(i, k, vi);
        }
    }
    Svd { u: u_out, s, v: v_out }
}

/// `col_p ← c·col_p − s·φ·col_q`, `col_q ← s·col_p + c·φ·col_q`.
fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp.scale(c) - yq.scale(s);
        *y = xp.scale(s) + yq.scale(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<f64> {
        // small LCG keeps this test free of RNG crates
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data = (0..rows * cols).map(|_| Complex::new(next(), next())).collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    }

    fn reconstruct(d: &Svd<f64>) -> ComplexMatrix<f64> {
        let k = d.s.len();
        let mut us = d.u.clone();
        for i in 0..us.rows() {
            for j in 0..k {
                us.set(i, j, us.get(i, j) * d.s[j]);
            }
        }
        us.matmul(&d.v.adjoint()).unwrap()
    }

    #[test]
    fn reconstructs_tall_and_wide() {
        for (r, c, seed) in [(7, 4, 1), (4, 7, 2), (6, 6, 3), (1, 5, 4)] {
            let a = mat(r, c, seed);
            let d = svd(&a);
            let err = reconstruct(&d).max_abs_diff(&a);
            assert!(err <= 1e-13 * a.fro_norm(), "{r}x{c}: {err}");
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn singular_vectors_are_orthonormal() {
        let a = mat(8, 5, 9);
        let d = svd(&a);
        let g = d.v.adjoint().matmul(&d.v).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g.get(i, j) - Complex::new(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn rank_deficient_input() {
        let b = mat(6, 2, 5);
        let c = mat(2, 6, 6);
        let a = b.matmul(&c).unwrap();
        let d = svd(&a);
        assert!(d.s[2] <= 1e-13 * d.s[0]);
        assert!(reconstruct(&d).max_abs_diff(&a) <= 1e-13 * a.fro_norm());
    }

    #[test]
    fn exact_null_columns_do_not_underflow() {
        // complex adjoint of a sparse integer quaternion matrix of rank 3
        let z = Complex::new(0.0, 0.0);
        let (one, i) = (Complex::new(1.0, 0.0), Complex::new(0.0, 1.0));
        let rows = [
            [z, one, z, one, z, z, z, z],
            [i, z, z, i, z, z, z, z],
            [z; 8],
            [z, z, z, z, z, one, -i, z],
            [z, z, z, z, z, one, z, one],
            [z, z, z, z, -i, z, z, -i],
            [z; 8],
            [z, -one, -i, z, z, z, z, z],
        ];
        let a = ComplexMatrix::new(8, 8, rows.concat()).unwrap();
        let d = svd(&a);
        assert!(d.s.iter().all(|s: &f64| s.is_finite()));
        assert!(d.s[5] > 0.5 && d.s[6] <= 1e-15);
        assert!(reconstruct(&d).max_abs_diff(&a) <= 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let d = svd(&ComplexMatrix::<f64>::zeros(3, 2));
        assert!(d.s.iter().all(|&s| s == 0.0));
    }
}

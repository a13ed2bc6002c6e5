//! Restarted GMRES for complex linear systems, matrix-free.

use num_complex::Complex;

use crate::scalar::Real;

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Givens rotation `[c s; −s̄ c]` zeroing the second entry of `(a, b)`.
fn rotation<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let rho = na.hypot(b.norm());
    if rho == T::zero() {
        (T::one(), Complex::new(T::zero(), T::zero()))
    } else if na == T::zero() {
        (T::zero(), b.conj() / b.norm())
    } else {
        (na / rho, (a / na) * b.conj() / rho)
    }
}

fn rotate<T: Real>(c: T, s: Complex<T>, x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>) {
    (x * c + s * y, -s.conj() * x + y * c)
}

pub(crate) struct GmresOutcome {
    pub matvecs: usize,
}

/// Solves `A x = b` from the initial guess in `x`.
///
/// Stops when the true residual `‖b − A x‖₂` drops to `tol` or after
/// `max_matvecs` applications of `A`.
pub(crate) fn gmres<T: Real, F>(
    mut apply: F,
    b: &[Complex<T>],
    x: &mut [Complex<T>],
    tol: T,
    restart: usize,
    max_matvecs: usize,
) -> GmresOutcome
where
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    let len = b.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut matvecs = 0;
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(restart + 1);
    let mut w = vec![zero; len];
    loop {
        apply(x, &mut w);
        matvecs += 1;
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi = *bi - *wi;
        }
        let beta = norm(&w);
        if beta <= tol || matvecs >= max_matvecs || !beta.is_finite() {
            return GmresOutcome { matvecs };
        }
        basis.clear();
        basis.push(w.iter().map(|v| *v / beta).collect());
        let mut hess = vec![vec![zero; restart]; restart + 1];
        let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(restart);
        let mut g = vec![zero; restart + 1];
        g[0] = Complex::new(beta, T::zero());
        let mut steps = 0;
        for j in 0..restart {
            apply(&basis[j], &mut w);
            matvecs += 1;
            for (i, v) in basis.iter().enumerate() {
                let h = dot(v, &w);
                hess[i][j] = h;
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= h * vi;
                }
            }
            let hn = norm(&w);
            hess[j + 1][j] = Complex::new(hn, T::zero());
            for (i, &(c, s)) in rots.iter().enumerate() {
                let (a, bb) = rotate(c, s, hess[i][j], hess[i + 1][j]);
                hess[i][j] = a;
                hess[i + 1][j] = bb;
            }
            let (c, s) = rotation(hess[j][j], hess[j + 1][j]);
            let (a, _) = rotate(c, s, hess[j][j], hess[j + 1][j]);
            hess[j][j] = a;
            hess[j + 1][j] = zero;
            let (g0, g1) = rotate(c, s, g[j], g[j + 1]);
            g[j] = g0;
            g[j + 1] = g1;
            rots.push((c, s));
            steps = j + 1;
            // Aim below the target so the recomputed residual also meets it.
            let done = g[j + 1].norm() <= tol / T::of(2.0) || matvecs >= max_matvecs || hn == T::zero();
            if done {
                break;
            }
            basis.push(w.iter().map(|v| *v / hn).collect());
        }
        let mut y = vec![zero; steps];
        for i in (0..steps).rev() {
            let mut acc = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                acc -= hess[i][l] * yl;
            }
            y[i] = acc / hess[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += yi * vk;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_nonnormal_system() {
        let n = 12;
        let a: Vec<Vec<Complex<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { 3.0 } else { 0.0 };
                        Complex::new(d + ((i * 7 + j * 3) % 5) as f64 * 0.1, ((i + 2 * j) % 3) as f64 * 0.2 - 0.2)
                    })
                    .collect()
            })
            .collect();
        let apply = |x: &[Complex<f64>], out: &mut [Complex<f64>]| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = a[i].iter().zip(x).map(|(p, q)| p * q).sum();
            }
        };
        let b: Vec<Complex<f64>> = (0..n).map(|i| Complex::new(i as f64, 1.0)).collect();
        let mut x = vec![Complex::new(0.0, 0.0); n];
        let out = gmres(apply, &b, &mut x, 1e-12, 5, 200);
        assert!(out.matvecs < 200);
        let mut ax = vec![Complex::new(0.0, 0.0); n];
        apply(&x, &mut ax);
        let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12);
    }
}

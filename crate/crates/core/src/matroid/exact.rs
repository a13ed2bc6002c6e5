//! Fraction-free elimination over the integers.

use num_integer::Integer;
use num_traits::Signed;

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn determinant<I: Integer + Signed + Clone>(mut m: Vec<Vec<I>>) -> I {
    let n = m.len();
    if n == 0 {
        return I::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut sign = I::one();
    let mut prev = I::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return I::zero();
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for cc in c + 1..n {
                let v = m[r][cc].clone() * m[c][c].clone() - m[r][c].clone() * m[c][cc].clone();
                m[r][cc] = v / prev.clone();
            }
            m[r][c] = I::zero();
        }
        prev = m[c][c].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Rank of an integer matrix by fraction-free row reduction.
pub fn rank<I: Integer + Signed + Clone>(mut m: Vec<Vec<I>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let (a, b) = (m[rank][c].clone(), m[r][c].clone());
            let g = a.gcd(&b);
            let (fa, fb) = (a / g.clone(), b / g);
            let pivot = m[rank].clone();
            for (x, p) in m[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                *x = x.clone() * fa.clone() - p.clone() * fb.clone();
            }
            let g = m[r].iter().fold(I::zero(), |acc, x| acc.gcd(x));
            if !g.is_zero() && !g.is_one() {
                m[r].iter_mut().for_each(|x| *x = x.clone() / g.clone());
            }
        }
        rank += 1;
    }
    rank
}

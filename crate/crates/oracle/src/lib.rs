//! Independent dense complex linear algebra for test oracles.
//!
//! Everything here works on plain `Vec<Vec<Complex64>>` with textbook
//! algorithms (triple-loop products, cyclic Jacobi, Gauss-Jordan) so that the
//! tests never check the library against the same code path it runs on.

use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn rows(m: &Mat) -> usize {
    m.len()
}

pub fn cols(m: &Mat) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(cols(a), rows(b), "oracle matmul: inner dimensions differ");
    let mut out = zeros(rows(a), cols(b));
    for i in 0..rows(a) {
        for j in 0..cols(b) {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..cols(a) {
                acc += a[i][l] * b[l][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn adjoint(a: &Mat) -> Mat {
    let mut out = zeros(cols(a), rows(a));
    for i in 0..rows(a) {
        for j in 0..cols(a) {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: Complex64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(rows(a), rows(b));
    assert_eq!(cols(a), cols(b));
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi.
pub fn hermitian_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = rows(a);
    assert_eq!(n, cols(a), "oracle eigenvalues: matrix not square");
    // Work on the exact Hermitian part.
    let mut m = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[i][j] = (a[i][j] + a[j][i].conj()) * 0.5;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j].norm_sqr())
            .sum();
        let diag: f64 = (0..n).map(|i| m[i][i].norm_sqr()).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let theta = (m[q][q].re - m[p][p].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
                let g_pp = Complex64::new(cs, 0.0);
                let g_pq = Complex64::new(sn, 0.0);
                let g_qp = -phase.conj() * sn;
                let g_qq = phase.conj() * cs;
                for row in m.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * g_pp + xq * g_qp;
                    row[q] = xp * g_pq + xq * g_qq;
                }
                for j in 0..n {
                    let (xp, xq) = (m[p][j], m[q][j]);
                    m[p][j] = g_pp.conj() * xp + g_qp.conj() * xq;
                    m[q][j] = g_pq.conj() * xp + g_qq.conj() * xq;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, descending, as square roots of the eigenvalues of `a* a`
/// (or `a a*` when that is smaller). Length is `min(rows, cols)`.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    let gram = if rows(a) >= cols(a) {
        matmul(&adjoint(a), a)
    } else {
        matmul(a, &adjoint(a))
    };
    let mut sv: Vec<f64> = hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.reverse();
    sv
}

pub fn spectral_norm(a: &Mat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = rows(a);
    assert_eq!(n, cols(a));
    let mut work: Mat = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().copied().chain(e).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| work[i][col].norm().total_cmp(&work[j][col].norm()))?;
        if work[pivot][col].norm() == 0.0 {
            return None;
        }
        work.swap(col, pivot);
        let p = work[col][col];
        for x in work[col].iter_mut() {
            *x /= p;
        }
        for i in 0..n {
            if i != col {
                let f = work[i][col];
                if f != Complex64::new(0.0, 0.0) {
                    for j in 0..2 * n {
                        let v = work[col][j];
                        work[i][j] -= f * v;
                    }
                }
            }
        }
    }
    Some(work.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Loewner check `p <= q` through the Jacobi eigenvalues of `q - p`.
pub fn loewner_leq(p: &Mat, q: &Mat, tol: f64) -> bool {
    hermitian_eigenvalues(&sub(q, p))[0] >= -tol
}

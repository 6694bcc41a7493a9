//! Dense symmetric eigensolvers and a Cholesky solve, on flat row-major
//! storage.
//!
//! Two independent eigensolver routes are kept on purpose: the production
//! path (Householder tridiagonalization + implicit QL, eigenvalues only) and
//! a cyclic Jacobi decomposition with eigenvectors. The Jacobi route doubles
//! as a cross-check oracle in tests.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix data length {len} does not match dimension {n}x{n}")]
    BadShape { n: usize, len: usize },
    #[error("QL iteration failed to converge at eigenvalue index {0}")]
    NoConvergence(usize),
    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),
    #[error("dimension {n} exceeds the dense solver cap {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Hard cap for the dense eigensolver paths.
pub const DENSE_EIGEN_CAP: usize = 4096;

fn sign_copy(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// eigenvalues-only variant. Destroys `a`. Returns `(d, e)` with `d` the
/// diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        if l > 1 {
            let mut scale = 0.0;
            for k in 0..l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l - 1];
            } else {
                for k in 0..l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l - 1];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l - 1] = f - g;
                // e[0..l] = (A u) / h over the leading block, walking the
                // lower triangle row-wise: a dot pass and an axpy pass per
                // row keep the accesses sequential.
                let u: Vec<f64> = a[i * n..i * n + l].to_vec();
                e[..l].iter_mut().for_each(|x| *x = 0.0);
                for j in 0..l {
                    let uj = u[j];
                    let row = &a[j * n..j * n + j];
                    let mut acc = a[j * n + j] * uj;
                    for (rk, uk) in row.iter().zip(&u[..j]) {
                        acc += rk * uk;
                    }
                    e[j] += acc;
                    for (ek, rk) in e[..j].iter_mut().zip(row) {
                        *ek += rk * uj;
                    }
                }
                f = 0.0;
                for j in 0..l {
                    e[j] /= h;
                    f += e[j] * u[j];
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    // a[j][k] -= f*e[k] + g*a[i][k] for k <= j; row j lives
                    // strictly before row i, so the split keeps the borrows
                    // disjoint.
                    let (head, tail) = a.split_at_mut(i * n);
                    let rowi = &tail[..l];
                    let target = &mut head[j * n..j * n + j + 1];
                    for k in 0..=j {
                        target[k] -= f * e[k] + g * rowi[k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l - 1];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(LinalgError::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + sign_copy(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix (flat row-major), sorted ascending.
pub fn symmetric_eigenvalues(n: usize, mut a: Vec<f64>) -> Result<Vec<f64>, LinalgError> {
    if a.len() != n * n {
        return Err(LinalgError::BadShape { n, len: a.len() });
    }
    if n > DENSE_EIGEN_CAP {
        return Err(LinalgError::TooLarge {
            n,
            cap: DENSE_EIGEN_CAP,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[0]]);
    }
    let (mut d, mut e) = tridiagonalize(n, &mut a);
    tql_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Cyclic Jacobi eigendecomposition with eigenvectors, for small matrices.
///
/// Returns `(values, vectors)` sorted ascending; `vectors[k]` is the unit
/// eigenvector for `values[k]`.
pub fn symmetric_eigen_jacobi(
    n: usize,
    mut a: Vec<f64>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), LinalgError> {
    if a.len() != n * n {
        return Err(LinalgError::BadShape { n, len: a.len() });
    }
    if n > 1024 {
        return Err(LinalgError::TooLarge { n, cap: 1024 });
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        s
    };
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    let tol = 1e-30 * norm;
    for _sweep in 0..128 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok((values, vectors))
}

/// Cholesky factor (lower triangular, flat row-major) of a symmetric
/// positive-definite matrix.
pub fn cholesky_factor(n: usize, a: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.len() != n * n {
        return Err(LinalgError::BadShape { n, len: a.len() });
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite(i));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L L^T x = b` in place given the Cholesky factor `L`.
pub fn cholesky_solve_inplace(n: usize, l: &[f64], b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat(rows: &[&[f64]]) -> (usize, Vec<f64>) {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            a.extend_from_slice(r);
        }
        (n, a)
    }

    #[test]
    fn eigenvalues_of_2x2() {
        let (n, a) = flat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let vals = symmetric_eigenvalues(n, a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let (n, a) = flat(&[
            &[3.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 7.0],
        ]);
        let vals = symmetric_eigenvalues(n, a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 7.0).abs() < 1e-12);
    }

    // Normalized Laplacian of the k-cycle has eigenvalues 1 - cos(2*pi*l/k),
    // an exact closed form that exercises clustered and paired eigenvalues.
    #[test]
    fn cycle_laplacian_spectrum_matches_closed_form() {
        for k in [3usize, 4, 6, 12, 33, 64] {
            let mut a = vec![0.0; k * k];
            for i in 0..k {
                a[i * k + i] = 1.0;
                let j = (i + 1) % k;
                a[i * k + j] = -0.5;
                a[j * k + i] = -0.5;
            }
            let vals = symmetric_eigenvalues(k, a).unwrap();
            let mut expected: Vec<f64> = (0..k)
                .map(|l| 1.0 - (2.0 * std::f64::consts::PI * l as f64 / k as f64).cos())
                .collect();
            expected.sort_by(f64::total_cmp);
            for (v, e) in vals.iter().zip(expected.iter()) {
                assert!((v - e).abs() < 1e-12, "k={k}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn jacobi_recovers_eigenpairs() {
        let (n, a) = flat(&[
            &[4.0, 1.0, 0.5],
            &[1.0, 3.0, -0.25],
            &[0.5, -0.25, 1.0],
        ]);
        let (vals, vecs) = symmetric_eigen_jacobi(n, a.clone()).unwrap();
        for (lam, v) in vals.iter().zip(vecs.iter()) {
            for i in 0..n {
                let mut av = 0.0;
                for j in 0..n {
                    av += a[i * n + j] * v[j];
                }
                assert!((av - lam * v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cholesky_roundtrip() {
        let (n, a) = flat(&[
            &[4.0, 2.0, 0.0],
            &[2.0, 5.0, 1.0],
            &[0.0, 1.0, 3.0],
        ]);
        let l = cholesky_factor(n, &a).unwrap();
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[i * n + j] * x_true[j];
            }
        }
        cholesky_solve_inplace(n, &l, &mut b);
        for i in 0..n {
            assert!((b[i] - x_true[i]).abs() < 1e-12);
        }
    }

    proptest! {
        // The two eigensolver routes must agree on random symmetric matrices.
        #[test]
        fn ql_matches_jacobi(seed_entries in prop::collection::vec(-1.0f64..1.0, 36)) {
            let n = 6;
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let w = seed_entries[i * n + j];
                    a[i * n + j] = w;
                    a[j * n + i] = w;
                }
            }
            let ql = symmetric_eigenvalues(n, a.clone()).unwrap();
            let (jac, _) = symmetric_eigen_jacobi(n, a).unwrap();
            for (x, y) in ql.iter().zip(jac.iter()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn trace_is_preserved(seed_entries in prop::collection::vec(-2.0f64..2.0, 25)) {
            let n = 5;
            let mut a = vec![0.0; n * n];
            let mut trace = 0.0;
            for i in 0..n {
                for j in 0..=i {
                    let w = seed_entries[i * n + j];
                    a[i * n + j] = w;
                    a[j * n + i] = w;
                }
                trace += a[i * n + i];
            }
            let vals = symmetric_eigenvalues(n, a).unwrap();
            let sum: f64 = vals.iter().sum();
            prop_assert!((sum - trace).abs() < 1e-9);
        }
    }
}

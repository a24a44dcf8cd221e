//! Implicit QL with Wilkinson shifts for real symmetric tridiagonal
//! matrices (EISPACK tql2 lineage, via the JAMA port).

use crate::{Error, Result};

/// Eigenvalues (ascending) and optionally eigenvectors of the symmetric
/// tridiagonal matrix with diagonal `d` and subdiagonal `e` (len n - 1).
///
/// Eigenvectors are returned flat column-major: component k of eigenvector j
/// sits at z[k + j n]. Each column has unit 2-norm.
pub fn sym_tridiag_eigen(
    d: &[f64],
    e: &[f64],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = d.len();
    if n == 0 {
        return Err(Error::Domain("empty tridiagonal matrix".into()));
    }
    if e.len() + 1 != n {
        return Err(Error::Domain(format!(
            "subdiagonal length {} does not match dimension {}",
            e.len(),
            n
        )));
    }
    if d.iter().chain(e.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Domain("tridiagonal data not finite".into()));
    }

    let mut d = d.to_vec();
    // e is shifted down one slot with a zero sentinel at the end
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    let mut z = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i + i * n] = 1.0;
        }
        z
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            // find the first negligible subdiagonal at or above l
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
            if iter > 50 {
                return Err(Error::Numerical(
                    "tridiagonal QL exceeded 50 iterations".into(),
                ));
            }

            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
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
                    // recover by deflating; see Numerical Recipes tqli
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_vectors {
                    for k in 0..n {
                        f = z[k + (i + 1) * n];
                        z[k + (i + 1) * n] = s * z[k + i * n] + c * f;
                        z[k + i * n] = c * z[k + i * n] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // ascending order, permuting vector columns alongside
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vecs = if want_vectors {
        let mut out = vec![0.0; n * n];
        for (jnew, &jold) in order.iter().enumerate() {
            out[jnew * n..(jnew + 1) * n].copy_from_slice(&z[jold * n..(jold + 1) * n]);
        }
        Some(out)
    } else {
        None
    };
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_laplacian_eigenvalues_are_known() {
        // second difference matrix: eigenvalues 2 - 2 cos(pi j / (n+1))
        let n = 24;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let (vals, vecs) = sym_tridiag_eigen(&d, &e, true).unwrap();
        for j in 0..n {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((vals[j] - exact).abs() < 1e-12);
        }
        // residual check on a few eigenpairs
        let z = vecs.unwrap();
        for j in [0, n / 2, n - 1] {
            let v = &z[j * n..(j + 1) * n];
            let mut rmax: f64 = 0.0;
            for k in 0..n {
                let mut av = d[k] * v[k];
                if k > 0 {
                    av += e[k - 1] * v[k - 1];
                }
                if k + 1 < n {
                    av += e[k] * v[k + 1];
                }
                rmax = rmax.max((av - vals[j] * v[k]).abs());
            }
            assert!(rmax < 1e-12);
        }
    }

    #[test]
    fn single_element() {
        let (vals, _) = sym_tridiag_eigen(&[3.5], &[], false).unwrap();
        assert_eq!(vals, vec![3.5]);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(sym_tridiag_eigen(&[1.0, 2.0], &[0.1, 0.2], false).is_err());
    }
}

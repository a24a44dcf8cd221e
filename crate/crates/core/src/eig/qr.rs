//! Balanced Hessenberg reduction and implicit single-shift QR for general
//! complex matrices, with Schur-basis accumulation and triangular
//! back-substitution for right eigenvectors.
//!
//! The shapes follow the EISPACK balanc/comqr family: Parlett-Reinsch
//! diagonal balancing, unitary Householder reduction, Givens-driven bulge
//! chasing with Wilkinson shifts and occasional exceptional shifts.

use super::ComplexMatrix;
use crate::{Complex64, Error, Result};

const RADIX: f64 = 2.0;
const MAX_SWEEPS_PER_N: usize = 50;

/// Parlett-Reinsch balancing by powers of the radix: A <- D^{-1} A D with
/// D = diag(d). Exact (no rounding) because d holds powers of two.
/// Eigenvectors of A are recovered as v_i = d_i * w_i from vectors w of the
/// balanced matrix.
fn balance(a: &mut [Complex64], n: usize) -> Vec<f64> {
    let mut d = vec![1.0_f64; n];
    let r2 = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[j * n + i].re.abs() + a[j * n + i].im.abs();
                    row += a[i * n + j].re.abs() + a[i * n + j].im.abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut g = row / RADIX;
            while c < g {
                f *= RADIX;
                c *= r2;
            }
            g = row * RADIX;
            while c > g {
                f /= RADIX;
                c /= r2;
            }
            if (col + row) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= inv;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
        if converged {
            return d;
        }
    }
}

/// Householder reduction to upper Hessenberg form, A <- U^H A U with
/// U = H_0 H_1 ... accumulated into q when provided (q must start as the
/// identity). Reflectors are I - 2 w w^H with unit w.
fn hessenberg(a: &mut [Complex64], n: usize, mut q: Option<&mut [Complex64]>) {
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // active column length below the diagonal
        let mut norm2 = 0.0;
        for i in 0..m {
            norm2 += a[(k + 1 + i) * n + k].norm_sqr();
        }
        if norm2 == 0.0 {
            continue;
        }
        let norm = norm2.sqrt();
        let x0 = a[(k + 1) * n + k];
        let phase = if x0 == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;

        // w = (x - alpha e1) / ||x - alpha e1||; the norm is computed from
        // the closed form 2 norm (norm + |x0|) to avoid cancellation
        let vnorm = (2.0 * norm * (norm + x0.norm())).sqrt();
        w[0] = (x0 - alpha) / vnorm;
        for i in 1..m {
            w[i] = a[(k + 1 + i) * n + k] / vnorm;
        }

        // left: rows k+1..n, columns k+1..n (column k is set explicitly)
        for j in (k + 1)..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..m {
                s += w[i].conj() * a[(k + 1 + i) * n + j];
            }
            s *= 2.0;
            for i in 0..m {
                a[(k + 1 + i) * n + j] -= s * w[i];
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in 1..m {
            a[(k + 1 + i) * n + k] = Complex64::new(0.0, 0.0);
        }

        // right: all rows, columns k+1..n
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..m {
                s += row[k + 1 + j] * w[j];
            }
            s *= 2.0;
            for j in 0..m {
                row[k + 1 + j] -= s * w[j].conj();
            }
        }

        if let Some(qm) = q.as_deref_mut() {
            for i in 0..n {
                let row = &mut qm[i * n..(i + 1) * n];
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    s += row[k + 1 + j] * w[j];
                }
                s *= 2.0;
                for j in 0..m {
                    row[k + 1 + j] -= s * w[j].conj();
                }
            }
        }
    }
}

/// Unitary plane rotation G = [[c, s], [-conj(s), c]] with real c >= 0 and
/// G [x; y] = [r; 0].
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == Complex64::new(0.0, 0.0) {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if x == Complex64::new(0.0, 0.0) {
        return (0.0, y.conj() / y.norm());
    }
    let ax = x.norm();
    let t = (x.norm_sqr() + y.norm_sqr()).sqrt();
    (ax / t, (x / ax) * y.conj() / t)
}

#[inline]
fn rot_rows(a: &mut [Complex64], n: usize, i: usize, c: f64, s: Complex64, jl: usize) {
    for j in jl..n {
        let u = a[i * n + j];
        let v = a[(i + 1) * n + j];
        a[i * n + j] = c * u + s * v;
        a[(i + 1) * n + j] = -s.conj() * u + c * v;
    }
}

#[inline]
fn rot_cols(a: &mut [Complex64], n: usize, i: usize, c: f64, s: Complex64, rmax: usize) {
    for r in 0..=rmax {
        let u = a[r * n + i];
        let v = a[r * n + i + 1];
        a[r * n + i] = c * u + s.conj() * v;
        a[r * n + i + 1] = -s * u + c * v;
    }
}

/// One implicit single-shift QR sweep on the unreduced window [lo, hi].
fn qr_sweep(
    h: &mut [Complex64],
    n: usize,
    lo: usize,
    hi: usize,
    sigma: Complex64,
    mut q: Option<&mut [Complex64]>,
) {
    let mut x = h[lo * n + lo] - sigma;
    let mut y = h[(lo + 1) * n + lo];
    for i in lo..hi {
        let (c, s) = givens(x, y);
        let jl = if i == lo { lo } else { i - 1 };
        rot_rows(h, n, i, c, s, jl);
        if i > lo {
            // the rotation annihilated the bulge at (i+1, i-1)
            h[(i + 1) * n + i - 1] = Complex64::new(0.0, 0.0);
        }
        let rmax = usize::min(i + 2, hi);
        rot_cols(h, n, i, c, s, rmax);
        if let Some(qm) = q.as_deref_mut() {
            rot_cols(qm, n, i, c, s, n - 1);
        }
        if i + 1 < hi {
            x = h[(i + 1) * n + i];
            y = h[(i + 2) * n + i];
        }
    }
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to the
/// bottom-right entry.
fn wilkinson_shift(h: &[Complex64], n: usize, hi: usize) -> Complex64 {
    let a = h[(hi - 1) * n + hi - 1];
    let b = h[(hi - 1) * n + hi];
    let c = h[hi * n + hi - 1];
    let d = h[hi * n + hi];
    let mid = 0.5 * (a + d);
    let disc = (mid * mid - (a * d - b * c)).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduces an upper Hessenberg matrix to upper triangular Schur form in
/// place; accumulates the rotations into q when provided.
fn hessenberg_to_schur(
    h: &mut [Complex64],
    n: usize,
    mut q: Option<&mut [Complex64]>,
) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    let anorm: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if anorm == 0.0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let budget = MAX_SWEEPS_PER_N * n;

    while hi > 0 {
        // walk up from hi to the first negligible subdiagonal
        let mut lo = hi;
        while lo > 0 {
            let scale = {
                let s = h[(lo - 1) * n + lo - 1].norm() + h[lo * n + lo].norm();
                if s == 0.0 {
                    anorm
                } else {
                    s
                }
            };
            if h[lo * n + lo - 1].norm() <= eps * scale {
                h[lo * n + lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::Numerical(format!(
                "QR iteration exceeded {budget} sweeps without converging"
            )));
        }
        let sigma = if since_deflation % 12 == 0 {
            // exceptional shift breaks symmetry-induced cycles
            h[hi * n + hi] + 0.75 * h[hi * n + hi - 1].norm()
        } else {
            wilkinson_shift(h, n, hi)
        };
        qr_sweep(h, n, lo, hi, sigma, q.as_deref_mut());
    }
    Ok(())
}

pub fn schur_eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let mut h = a.clone().data;
    balance(&mut h, n);
    hessenberg(&mut h, n, None);
    hessenberg_to_schur(&mut h, n, None)?;
    Ok((0..n).map(|i| h[i * n + i]).collect())
}

/// Full decomposition path: returns eigenvalues and unit right eigenvectors
/// of the original (unbalanced) matrix, in Schur order.
pub fn schur_eigenpairs(a: &ComplexMatrix) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
    let n = a.dim();
    let mut h = a.clone().data;
    let d = balance(&mut h, n);
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    hessenberg(&mut h, n, Some(&mut q));
    hessenberg_to_schur(&mut h, n, Some(&mut q))?;

    let values: Vec<Complex64> = (0..n).map(|i| h[i * n + i]).collect();
    let tnorm: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let smlnum = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE * 1e16);

    let mut vectors = Vec::with_capacity(n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let lambda = values[j];
        for yi in y.iter_mut() {
            *yi = Complex64::new(0.0, 0.0);
        }
        y[j] = Complex64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in (i + 1)..=j {
                s += h[i * n + l] * y[l];
            }
            let mut den = h[i * n + i] - lambda;
            if den.norm() < smlnum {
                // repeated or clustered eigenvalue: perturb the pivot, the
                // usual inverse-iteration style regularization
                den = Complex64::new(smlnum, 0.0);
            }
            y[i] = -s / den;
            let mag = y[i].norm();
            if mag > 1e120 {
                // rescale to dodge overflow in pathological triangles
                let inv = 1.0 / mag;
                for yl in y[i..=j].iter_mut() {
                    *yl *= inv;
                }
            }
        }

        // v = Q y, then undo the balancing and normalize
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..=j {
                acc += q[r * n + l] * y[l];
            }
            v[r] = acc * d[r];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for vi in v.iter_mut() {
                *vi *= inv;
            }
        }
        vectors.push(v);
    }
    Ok((values, vectors))
}

/// Reduction of an exactly Hermitian matrix to real symmetric tridiagonal
/// data (d, e). Runs the general Householder reduction, which preserves
/// Hermiticity, then takes moduli of the subdiagonal; the phase similarity
/// that realifies the subdiagonal does not change eigenvalues.
pub fn hermitian_tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut h = a.clone().data;
    hessenberg(&mut h, n, None);
    let d: Vec<f64> = (0..n).map(|i| h[i * n + i].re).collect();
    let e: Vec<f64> = (0..n - 1).map(|i| h[(i + 1) * n + i].norm()).collect();
    (d, e)
}

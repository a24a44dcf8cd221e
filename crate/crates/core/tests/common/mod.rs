//! Independent oracles used by the integration suites: quadrature for the
//! elliptic integrals, FFT-based Fourier coefficients, characteristic
//! polynomial roots for 3 x 3 matrices, and a geometric angle-sum winding.
//! None of them share code paths with the library implementations they
//! check.

#![allow(dead_code)]

use skinband::Complex64;

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn s<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = s(f, a, fa, m, fm);
        let (right, rm, frm) = s(f, m, fm, b, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = s(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Complete elliptic integral K(m) by quadrature of the defining integral.
pub fn k_by_quadrature(m: f64) -> f64 {
    simpson(
        &|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(),
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-13,
    )
}

/// Incomplete elliptic integral F(phi, m) by quadrature.
pub fn incomplete_f(phi: f64, m: f64) -> f64 {
    simpson(
        &|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(),
        0.0,
        phi,
        1e-13,
    )
}

/// sn(u, m) by bisecting the inversion F(phi, m) = u, after reducing u into
/// the fundamental quarter period using oddness and sn(2K - u) = sn(u).
pub fn sn_by_inversion(u: f64, m: f64) -> f64 {
    let k = k_by_quadrature(m);
    let mut ur = u.rem_euclid(4.0 * k);
    if ur > 2.0 * k {
        ur -= 4.0 * k;
    }
    // now ur in (-2K, 2K]; fold into [-K, K]
    if ur > k {
        ur = 2.0 * k - ur;
    } else if ur < -k {
        ur = -2.0 * k - ur;
    }
    let mut lo = -std::f64::consts::FRAC_PI_2;
    let mut hi = std::f64::consts::FRAC_PI_2;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if incomplete_f(mid, m) < ur {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    (0.5 * (lo + hi)).sin()
}

/// Fourier coefficients V_n, |n| <= n_max, of a period-a function by a
/// plain FFT of n_fft uniform samples over [0, a).
pub fn fft_fourier_coeffs<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    n_max: usize,
    n_fft: usize,
) -> Vec<Complex64> {
    use rustfft::FftPlanner;
    let mut buf: Vec<Complex64> = (0..n_fft)
        .map(|j| Complex64::new(f(a * j as f64 / n_fft as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    let mut out = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i64)..=(n_max as i64) {
        let idx = n.rem_euclid(n_fft as i64) as usize;
        out.push(buf[idx] / n_fft as f64);
    }
    out
}

/// Roots of the characteristic polynomial of a 3 x 3 complex matrix
/// (row-major), via Cardano on the depressed cubic.
pub fn char_poly_roots_3(m: &[Complex64; 9]) -> [Complex64; 3] {
    let tr = m[0] + m[4] + m[8];
    // sum of principal 2 x 2 minors
    let c1 = (m[0] * m[4] - m[1] * m[3]) + (m[0] * m[8] - m[2] * m[6])
        + (m[4] * m[8] - m[5] * m[7]);
    let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6]);

    // lambda^3 - tr lambda^2 + c1 lambda - det; shift lambda = t + tr/3
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let shift = tr * third;
    let p = c1 - tr * tr * third;
    let q = -det + c1 * shift - Complex64::new(2.0 / 27.0, 0.0) * tr * tr * tr;

    let disc = (q * q * 0.25 + p * p * p / 27.0).sqrt();
    let mut u3 = -q * 0.5 + disc;
    if u3.norm() < 1e-30 {
        u3 = -q * 0.5 - disc;
    }
    if u3.norm() < 1e-30 {
        // p = q = 0: triple root at the shift
        return [shift, shift, shift];
    }
    let u = u3.cbrt();
    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (i, root) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(i as u32);
        *root = uk - p / (uk * 3.0) + shift;
    }
    roots
}

/// Total signed angle, in turns, subtended at `at` by a set of directed
/// segments. When the segments tile closed loops this is the integer
/// winding number.
pub fn angle_sum_turns(segments: &[(Complex64, Complex64)], at: Complex64) -> f64 {
    let mut total = 0.0;
    for &(z0, z1) in segments {
        let v0 = z0 - at;
        let v1 = z1 - at;
        let cross = v0.re * v1.im - v0.im * v1.re;
        let dot = v0.re * v1.re + v0.im * v1.im;
        total += cross.atan2(dot);
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Directed segment soup of a tracked band family, closed across the zone
/// boundary by greedy nearest matching of the last column onto the first.
pub fn curve_segments(curves: &skinband::bloch::SpectrumCurves) -> Vec<(Complex64, Complex64)> {
    let nb = curves.n_bands();
    let nk = curves.k_count();
    let mut segs = Vec::with_capacity(nb * nk);
    for j in 0..nb {
        for i in 0..nk - 1 {
            segs.push((curves.point(j, i), curves.point(j, i + 1)));
        }
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for j in 0..nb {
        let last = curves.point(j, nk - 1);
        for j2 in 0..nb {
            pairs.push(((curves.point(j2, 0) - last).norm(), j, j2));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut from_used = vec![false; nb];
    let mut to_used = vec![false; nb];
    for (_, j, j2) in pairs {
        if !from_used[j] && !to_used[j2] {
            from_used[j] = true;
            to_used[j2] = true;
            segs.push((curves.point(j, nk - 1), curves.point(j2, 0)));
        }
    }
    segs
}

/// Max over `xs` of min distance to `ys` and vice versa (symmetric
/// Hausdorff distance of two real sets).
pub fn hausdorff(xs: &[f64], ys: &[f64]) -> f64 {
    let one_way = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|&x| to.iter().map(|&y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(xs, ys).max(one_way(ys, xs))
}

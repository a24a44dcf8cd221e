//! Cross-checks of library numerics against the independent oracles in
//! `common`: quadrature vs the AGM elliptic integrals, FFT vs trapezoid
//! Fourier coefficients, Cardano vs QR eigenvalues, and geometric angle
//! sums vs the analytic winding.

mod common;

use skinband::bloch::{pbc_spectrum, BlochConfig};
use skinband::eig::{eigenvalues, ComplexMatrix};
use skinband::models::{dirac_gap_width, dirac_hamiltonian, DiracParams};
use skinband::potentials::Potential;
use skinband::specfun::{ellip_k, jacobi_sn};
use skinband::topology::winding_number;
use skinband::Complex64;

#[test]
fn elliptic_k_matches_quadrature() {
    for &m in &[0.0, 0.1, 0.35, 0.5, 0.75, 0.9, 0.99, 0.999] {
        let agm = ellip_k(m).unwrap();
        let quad = common::k_by_quadrature(m);
        assert!(
            (agm - quad).abs() < 1e-10 * quad,
            "m = {m}: AGM {agm} vs quadrature {quad}"
        );
    }
}

#[test]
fn jacobi_sn_matches_integral_inversion() {
    for &m in &[0.1, 0.5, 0.9, 0.999] {
        let k = ellip_k(m).unwrap();
        for i in 0..12 {
            // spread over several quarter periods, includes negatives
            let u = -1.5 * k + i as f64 * 0.35 * k;
            let fast = jacobi_sn(u, m).unwrap();
            let slow = common::sn_by_inversion(u, m);
            assert!(
                (fast - slow).abs() < 1e-9,
                "u = {u}, m = {m}: descent {fast} vs inversion {slow}"
            );
        }
    }
}

#[test]
fn trapezoid_fourier_matches_fft() {
    // the double-well tolerance is looser: its periodization has an
    // exponentially small seam jump whose slow Fourier tail aliases into
    // the trapezoid sum
    let cases: Vec<(&str, Potential, f64)> = vec![
        ("mathieu", Potential::mathieu(1.3, 2.0 * std::f64::consts::PI).unwrap(), 1e-10),
        ("lame", Potential::lame(2, 0.9).unwrap(), 1e-9),
        ("double_well", Potential::double_well(1.1, 10.0).unwrap(), 2e-7),
    ];
    for (name, p, tol) in cases {
        let a = p.period();
        let n_max = 12;
        let vn = p.fourier_coeffs(n_max, 2048).unwrap();
        let oracle = common::fft_fourier_coeffs(&|x| p.eval(x), a, n_max, 8192);
        for (i, n) in (-(n_max as i64)..=(n_max as i64)).enumerate() {
            let d = (vn.get(n) - oracle[i]).norm();
            assert!(d < tol, "{name}: V_{n} differs by {d:.3e}");
        }
    }
}

#[test]
fn qr_eigenvalues_match_characteristic_polynomial() {
    let mats: Vec<[Complex64; 9]> = vec![
        [
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.3, -0.4),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.5, -1.5),
            Complex64::new(1.0, 1.0),
            Complex64::new(-0.7, 0.2),
            Complex64::new(0.0, 0.0),
            Complex64::new(-3.0, 0.25),
        ],
        [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-3, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
        [
            Complex64::new(4.0, 0.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, -2.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, -0.5),
            Complex64::new(2.0, 0.0),
        ],
    ];
    for (case, flat) in mats.iter().enumerate() {
        let rows: Vec<Vec<Complex64>> = (0..3)
            .map(|r| (0..3).map(|c| flat[3 * r + c]).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows).unwrap();
        let got = eigenvalues(&m).unwrap();
        let mut want = common::char_poly_roots_3(flat).to_vec();
        want.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        for (g, w) in got.iter().zip(&want) {
            assert!(
                (g - w).norm() < 1e-8,
                "case {case}: {g} vs Cardano {w}"
            );
        }
    }
}

#[test]
fn winding_matches_geometric_angle_sum() {
    let p = Potential::mathieu(1.0, 2.0 * std::f64::consts::PI).unwrap();
    let cfg = BlochConfig {
        n_pw: 8,
        k_points: 256,
        beta: 0.5,
    };
    let curves = pbc_spectrum(&p, &cfg).unwrap();
    let segs = common::curve_segments(&curves);
    let spacing = curves.median_spacing();
    let probes = [
        Complex64::new(-0.30, 0.0),
        Complex64::new(0.60, 0.35),
        Complex64::new(1.40, -0.60),
        Complex64::new(3.00, 0.10),
        Complex64::new(-2.00, 1.00),
        Complex64::new(0.25, 2.50),
    ];
    let mut tested = 0;
    for &e_b in &probes {
        if curves.min_distance(e_b) < 3.0 * spacing {
            continue;
        }
        let w = winding_number(&curves, e_b).unwrap();
        let turns = common::angle_sum_turns(&segs, e_b);
        assert!(
            (turns - w.w as f64).abs() < 1e-6,
            "at {e_b}: product {} vs angle sum {turns}",
            w.w
        );
        tested += 1;
    }
    assert!(tested >= 4, "only {tested} probes were off-spectrum");
}

#[test]
fn dirac_gap_matches_two_level_eigenvalues() {
    let prm = DiracParams::new(0.1, 2.0 * std::f64::consts::PI).unwrap();
    let k0 = prm.k0();
    for &beta in &[0.0, 0.02, 0.04, 0.0499] {
        let (gap, closed) = dirac_gap_width(beta, prm);
        assert!(!closed);
        let h = dirac_hamiltonian(k0, beta, prm);
        let vals = eigenvalues(&h).unwrap();
        let direct = (vals[1].re - vals[0].re).abs();
        assert!(
            (gap - direct).abs() < 1e-12 * (1.0 + direct),
            "beta = {beta}: formula {gap} vs 2x2 eigenvalues {direct}"
        );
    }
    // past the closing field the two levels split vertically instead
    let (gap, closed) = dirac_gap_width(0.06, prm);
    assert_eq!(gap, 0.0);
    assert!(closed);
    let h = dirac_hamiltonian(k0, 0.06, prm);
    let vals = eigenvalues(&h).unwrap();
    assert!((vals[0].re - vals[1].re).abs() < 1e-10);
    assert!((vals[0].im - vals[1].im).abs() > 1e-3);
}

//! Finite-difference realization of the gauged Schrodinger operator on a
//! finite chain of unit cells, with open (Dirichlet) or periodic closure.
//!
//! The operator -(d/dx + beta)^2 + V discretizes to a tridiagonal with
//! diagonal 2/h^2 - beta^2 + V(x_j) and off-diagonals -1/h^2 -+ beta/h.
//! Under open boundaries the two off-diagonals have equal-sign product, so
//! the matrix is similar to a real symmetric tridiagonal by an explicit
//! diagonal scaling; obc_spectrum exploits that instead of running a
//! general complex eigensolve.

use crate::eig::{self, ComplexMatrix};
use crate::potentials::Potential;
use crate::{Complex64, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub cells: usize,
    pub points_per_cell: usize,
    pub boundary: Boundary,
    /// Lattice period a; the grid step is a / points_per_cell.
    pub period: f64,
}

impl GridSpec {
    pub fn new(cells: usize, points_per_cell: usize, boundary: Boundary, period: f64) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Domain(format!("need at least 2 cells, got {cells}")));
        }
        if points_per_cell < 32 {
            return Err(Error::Domain(format!(
                "need at least 32 points per cell, got {points_per_cell}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Domain(format!("period {period} must be positive")));
        }
        Ok(GridSpec {
            cells,
            points_per_cell,
            boundary,
            period,
        })
    }

    pub fn for_potential(p: &Potential, cells: usize, points_per_cell: usize, boundary: Boundary) -> Result<Self> {
        Self::new(cells, points_per_cell, boundary, p.period())
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.period / self.points_per_cell as f64
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.period * self.cells as f64
    }

    /// Matrix dimension: interior nodes for open chains (both walls are
    /// Dirichlet), every node for periodic closure.
    pub fn n_nodes(&self) -> usize {
        let total = self.cells * self.points_per_cell;
        match self.boundary {
            Boundary::Open => total - 1,
            Boundary::Periodic => total,
        }
    }

    /// Position of matrix row j.
    #[inline]
    pub fn node_x(&self, j: usize) -> f64 {
        match self.boundary {
            Boundary::Open => (j + 1) as f64 * self.step(),
            Boundary::Periodic => j as f64 * self.step(),
        }
    }
}

fn check_grid(p: &Potential, beta: f64, g: &GridSpec) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} is not finite")));
    }
    if (g.period - p.period()).abs() > 1e-12 * p.period() {
        return Err(Error::Domain(format!(
            "grid period {} disagrees with the potential period {}",
            g.period,
            p.period()
        )));
    }
    let h = g.step();
    if beta != 0.0 && h >= 1.0 / beta.abs() {
        return Err(Error::Domain(format!(
            "grid step {h:.4e} does not resolve the gauge length 1/|beta| = {:.4e}; \
             raise points_per_cell",
            1.0 / beta.abs()
        )));
    }
    Ok(())
}

/// Dense finite-difference matrix of -(d/dx + beta)^2 + V on the grid.
pub fn build_fd_hamiltonian(p: &Potential, beta: f64, g: &GridSpec) -> Result<ComplexMatrix> {
    check_grid(p, beta, g)?;
    let n = g.n_nodes();
    let h = g.step();
    let inv_h2 = 1.0 / (h * h);
    let upper = Complex64::new(-inv_h2 - beta / h, 0.0);
    let lower = Complex64::new(-inv_h2 + beta / h, 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for j in 0..n {
        let d = 2.0 * inv_h2 - beta * beta + p.eval(g.node_x(j));
        m.set(j, j, Complex64::new(d, 0.0));
        if j + 1 < n {
            m.set(j, j + 1, upper);
            m.set(j + 1, j, lower);
        }
    }
    if g.boundary == Boundary::Periodic {
        m.set(0, n - 1, lower);
        m.set(n - 1, 0, upper);
    }
    Ok(m)
}

/// Open-chain Hamiltonian built the other way round: the beta = 0 matrix
/// conjugated by the exact exponential gauge D = diag(e^{-beta x_j}). Its
/// spectrum must agree with `build_fd_hamiltonian` up to the difference
/// between the exact and the finite-difference gauge, which vanishes as
/// h^2. Refuses chains long enough that the scaling overflows.
pub fn gauge_oracle_hamiltonian(p: &Potential, beta: f64, g: &GridSpec) -> Result<ComplexMatrix> {
    if g.boundary != Boundary::Open {
        return Err(Error::Domain(
            "the gauge transformation only trivializes open boundaries".into(),
        ));
    }
    check_grid(p, beta, g)?;
    if beta.abs() * g.length() > 300.0 {
        return Err(Error::Domain(format!(
            "beta * length = {:.1} overflows the exponential gauge factors",
            beta.abs() * g.length()
        )));
    }
    let n = g.n_nodes();
    let h = g.step();
    let inv_h2 = 1.0 / (h * h);
    // D H0 D^{-1}: diagonal untouched, off-diagonals pick up e^{+-beta h}
    let upper = Complex64::new(-inv_h2 * (beta * h).exp(), 0.0);
    let lower = Complex64::new(-inv_h2 * (-beta * h).exp(), 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for j in 0..n {
        let d = 2.0 * inv_h2 + p.eval(g.node_x(j));
        m.set(j, j, Complex64::new(d, 0.0));
        if j + 1 < n {
            m.set(j, j + 1, upper);
            m.set(j + 1, j, lower);
        }
    }
    Ok(m)
}

/// Open-boundary eigenvalues, ascending. Real for every beta the grid
/// resolves: the chain is similar to the ungauged symmetric problem.
pub fn obc_eigenvalues(p: &Potential, beta: f64, g: &GridSpec) -> Result<Vec<f64>> {
    let (d, e) = symmetrized_tridiag(p, beta, g)?;
    let (vals, _) = eig::sym_tridiag_eigen(&d, &e, false)?;
    Ok(vals)
}

/// Open-boundary eigenpairs: real eigenvalues ascending (as Complex64 with
/// zero imaginary part) and unit-norm eigenvectors of the non-Hermitian
/// chain, recovered from the symmetrized problem by the inverse diagonal
/// scaling. The scaling grows like e^{|beta| L}, hence the length guard.
pub fn obc_spectrum(
    p: &Potential,
    beta: f64,
    g: &GridSpec,
) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
    if beta.abs() * g.length() > 300.0 {
        return Err(Error::Domain(format!(
            "beta * length = {:.1} overflows the eigenvector descaling",
            beta.abs() * g.length()
        )));
    }
    let (d, e) = symmetrized_tridiag(p, beta, g)?;
    let n = d.len();
    let (vals, vecs) = eig::sym_tridiag_eigen(&d, &e, true)?;
    let z = vecs.expect("vectors requested");

    // v_j = r^{-j} z_j with r = sqrt(u/l); for beta > 0 this damps toward
    // the left wall, which is the skin side
    let h = g.step();
    let u = -1.0 / (h * h) - beta / h;
    let l = -1.0 / (h * h) + beta / h;
    let r = (u / l).sqrt();
    let mut vectors = Vec::with_capacity(n);
    for col in 0..n {
        let mut v = Vec::with_capacity(n);
        let mut scale = 1.0;
        let mut norm2 = 0.0;
        for row in 0..n {
            let x = z[row + col * n] * scale;
            norm2 += x * x;
            v.push(x);
            scale /= r;
        }
        let norm = norm2.sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical(
                "eigenvector descaling overflowed or vanished".into(),
            ));
        }
        vectors.push(v.iter().map(|&x| Complex64::new(x / norm, 0.0)).collect());
    }
    let values = vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok((values, vectors))
}

/// Symmetrized open-chain tridiagonal: same spectrum as the gauged chain.
/// Requires h < 1/|beta| so the off-diagonal product stays positive.
fn symmetrized_tridiag(p: &Potential, beta: f64, g: &GridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    if g.boundary != Boundary::Open {
        return Err(Error::Domain(
            "symmetrization needs open boundaries; use fd_pbc_spectrum for rings".into(),
        ));
    }
    check_grid(p, beta, g)?;
    let n = g.n_nodes();
    let h = g.step();
    let inv_h2 = 1.0 / (h * h);
    let off = -(inv_h2 * inv_h2 - (beta / h) * (beta / h)).sqrt();
    let mut d = Vec::with_capacity(n);
    for j in 0..n {
        d.push(2.0 * inv_h2 - beta * beta + p.eval(g.node_x(j)));
    }
    Ok((d, vec![off; n - 1]))
}

/// Ring eigenvalues sorted by (Re, Im). Complex for beta != 0: periodic
/// closure defeats the gauge transformation.
pub fn fd_pbc_spectrum(p: &Potential, beta: f64, g: &GridSpec) -> Result<Vec<Complex64>> {
    if g.boundary != Boundary::Periodic {
        return Err(Error::Domain("fd_pbc_spectrum needs a periodic grid".into()));
    }
    let m = build_fd_hamiltonian(p, beta, g)?;
    eig::eigenvalues(&m)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SkinProfile {
    /// First moment of |psi|^2 in length units.
    pub center_of_mass: f64,
    /// Inverse participation ratio of the normalized amplitudes;
    /// 1/n_nodes for a flat state, order 1 for a pinned one.
    pub ipr: f64,
    /// Decay rate in inverse length units from a linear fit of
    /// log(cell-wise max |psi|) against the cell center.
    pub fitted_decay: f64,
    /// R^2 of that fit.
    pub fit_quality: f64,
}

/// Localization diagnostics of a chain eigenvector.
pub fn skin_metrics(v: &[Complex64], g: &GridSpec) -> Result<SkinProfile> {
    if v.len() != g.n_nodes() {
        return Err(Error::Domain(format!(
            "vector length {} does not match the grid ({} nodes)",
            v.len(),
            g.n_nodes()
        )));
    }
    let mut w2 = 0.0;
    let mut w4 = 0.0;
    let mut xw = 0.0;
    for (j, z) in v.iter().enumerate() {
        let m2 = z.norm_sqr();
        w2 += m2;
        w4 += m2 * m2;
        xw += g.node_x(j) * m2;
    }
    if w2 == 0.0 {
        return Err(Error::Domain("zero vector has no localization profile".into()));
    }

    let a = g.period;
    let mut env = vec![0.0f64; g.cells];
    for (j, z) in v.iter().enumerate() {
        let c = ((g.node_x(j) / a) as usize).min(g.cells - 1);
        env[c] = env[c].max(z.norm());
    }
    if env.iter().any(|&m| m == 0.0) {
        return Err(Error::Numerical(
            "a cell-wise envelope vanished; cannot fit a decay rate".into(),
        ));
    }

    // least squares of ln(env) on the cell centers
    let n = g.cells as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (c, &m) in env.iter().enumerate() {
        let x = (c as f64 + 0.5) * a;
        let y = m.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let ss_tot = syy - sy * sy / n;
    let ss_res = {
        let intercept = (sy - slope * sx) / n;
        let mut acc = 0.0;
        for (c, &m) in env.iter().enumerate() {
            let x = (c as f64 + 0.5) * a;
            let r = m.ln() - (slope * x + intercept);
            acc += r * r;
        }
        acc
    };
    let fit_quality = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    Ok(SkinProfile {
        center_of_mass: xw / w2,
        ipr: w4 / (w2 * w2),
        fitted_decay: -slope,
        fit_quality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(p: &Potential, m: usize, pp: usize, b: Boundary) -> GridSpec {
        GridSpec::for_potential(p, m, pp, b).unwrap()
    }

    #[test]
    fn grid_validation() {
        let p = Potential::free(2.0).unwrap();
        assert!(GridSpec::for_potential(&p, 1, 64, Boundary::Open).is_err());
        assert!(GridSpec::for_potential(&p, 4, 16, Boundary::Open).is_err());
        let g = grid(&p, 4, 64, Boundary::Open);
        assert_eq!(g.n_nodes(), 4 * 64 - 1);
        assert_eq!(grid(&p, 4, 64, Boundary::Periodic).n_nodes(), 4 * 64);
        // step must resolve 1/|beta|
        assert!(build_fd_hamiltonian(&p, 64.0, &g).is_err());
    }

    #[test]
    fn free_chain_matches_dirichlet_laplacian() {
        // V = 0, beta = 0: eigenvalues (2 - 2 cos(pi j / MP)) / h^2
        let p = Potential::free(1.0).unwrap();
        let g = grid(&p, 2, 32, Boundary::Open);
        let vals = obc_eigenvalues(&p, 0.0, &g).unwrap();
        let n = g.n_nodes();
        let h = g.step();
        for (j, &v) in vals.iter().enumerate() {
            let exact = (2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI
                / (n + 1) as f64).cos()) / (h * h);
            assert!((v - exact).abs() < 1e-8 * (1.0 + exact.abs()), "j={j}");
        }
    }

    #[test]
    fn obc_spectrum_is_gauge_invariant() {
        // eigenvalues must not move when beta turns on (open chain)
        let p = Potential::mathieu(1.0, 2.0 * std::f64::consts::PI).unwrap();
        let g = grid(&p, 4, 48, Boundary::Open);
        let v0 = obc_eigenvalues(&p, 0.0, &g).unwrap();
        let v1 = obc_eigenvalues(&p, 0.4, &g).unwrap();
        let mut worst = 0.0f64;
        for i in 0..8 {
            worst = worst.max((v0[i] - v1[i]).abs());
        }
        // exact similarity would give 0; the discrete gauge shift is O(beta^2 h^2)
        assert!(worst < 1e-2, "worst low-level shift {worst}");
    }

    #[test]
    fn symmetrized_matches_dense_eigensolve() {
        let p = Potential::mathieu(0.8, 2.0).unwrap();
        let g = grid(&p, 2, 32, Boundary::Open);
        let fast = obc_eigenvalues(&p, 0.3, &g).unwrap();
        let m = build_fd_hamiltonian(&p, 0.3, &g).unwrap();
        let dense = eig::eigenvalues(&m).unwrap();
        for (f, d) in fast.iter().zip(&dense) {
            assert!((f - d.re).abs() < 1e-8 * (1.0 + f.abs()));
            assert!(d.im.abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvectors_satisfy_the_chain_equation() {
        let p = Potential::mathieu(1.0, 2.0).unwrap();
        let g = grid(&p, 3, 32, Boundary::Open);
        let beta = 0.5;
        let (vals, vecs) = obc_spectrum(&p, beta, &g).unwrap();
        let m = build_fd_hamiltonian(&p, beta, &g).unwrap();
        for idx in [0usize, 3, 20] {
            let av = m.mul_vec(&vecs[idx]);
            let mut r2 = 0.0;
            for (x, y) in av.iter().zip(&vecs[idx]) {
                r2 += (x - vals[idx] * y).norm_sqr();
            }
            assert!(r2.sqrt() < 1e-7 * m.frobenius_norm(), "idx={idx}");
        }
    }

    #[test]
    fn ground_state_piles_on_the_left_for_positive_beta() {
        let p = Potential::free(1.0).unwrap();
        let g = grid(&p, 6, 32, Boundary::Open);
        let (_, vecs) = obc_spectrum(&p, 0.8, &g).unwrap();
        let prof = skin_metrics(&vecs[0], &g).unwrap();
        assert!(prof.center_of_mass < 0.35 * g.length(), "com {}", prof.center_of_mass);
        assert!(prof.fitted_decay > 0.0);
    }

    #[test]
    fn gauge_oracle_agrees_with_direct_discretization() {
        let p = Potential::mathieu(1.0, 2.0).unwrap();
        let g = grid(&p, 3, 48, Boundary::Open);
        let beta = 0.4;
        let direct = obc_eigenvalues(&p, beta, &g).unwrap();
        let oracle = gauge_oracle_hamiltonian(&p, beta, &g).unwrap();
        let ovals = eig::eigenvalues(&oracle).unwrap();
        for i in 0..10 {
            assert!((direct[i] - ovals[i].re).abs() < 2e-2 * (1.0 + direct[i].abs()));
        }
        // ring grids are rejected
        let gp = grid(&p, 3, 48, Boundary::Periodic);
        assert!(gauge_oracle_hamiltonian(&p, beta, &gp).is_err());
    }

    #[test]
    fn pbc_ring_goes_complex_under_the_gauge() {
        let p = Potential::free(1.0).unwrap();
        let g = grid(&p, 4, 32, Boundary::Periodic);
        let vals = fd_pbc_spectrum(&p, 0.6, &g).unwrap();
        let max_im = vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im > 0.1, "max |Im| {max_im}");
        // and stays real without it
        let vals0 = fd_pbc_spectrum(&p, 0.0, &g).unwrap();
        let max_im0 = vals0.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im0 < 1e-10);
    }

    #[test]
    fn skin_metrics_flags_degenerate_input() {
        let p = Potential::free(1.0).unwrap();
        let g = grid(&p, 2, 32, Boundary::Open);
        let zeros = vec![Complex64::new(0.0, 0.0); g.n_nodes()];
        assert!(skin_metrics(&zeros, &g).is_err());
        let short = vec![Complex64::new(1.0, 0.0); 5];
        assert!(skin_metrics(&short, &g).is_err());
    }

    #[test]
    fn flat_state_has_minimal_ipr() {
        let p = Potential::free(1.0).unwrap();
        let g = grid(&p, 2, 32, Boundary::Periodic);
        let n = g.n_nodes();
        let flat = vec![Complex64::new(1.0, 0.0); n];
        let prof = skin_metrics(&flat, &g).unwrap();
        assert!((prof.ipr - 1.0 / n as f64).abs() < 1e-12);
        assert!(prof.fitted_decay.abs() < 1e-12);
    }
}

//! Plane-wave Bloch Hamiltonian for H = -(d/dx + beta)^2 + V(x) under
//! periodic boundaries, and tracked complex band structure over the
//! Brillouin zone.
//!
//! In the plane-wave basis e^{i (k + 2 pi n / a) x} the operator is the
//! dense matrix H_{n m} = (k + 2 pi n / a - i beta)^2 delta_{n m} + V_{n-m}.
//! Replacing k by the complex k - i beta is not an approximation: the
//! non-Hermitian problem at real k IS the Hermitian problem analytically
//! continued, as a literal matrix identity, and the sweep exploits the
//! resulting PT pairing spectrum(-k) = conj(spectrum(k)) to halve the work.

use crate::eig::{self, ComplexMatrix};
use crate::potentials::{FourierCoefficients, Potential};
use crate::{Complex64, Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct BlochConfig {
    /// Plane waves kept on each side of n = 0; basis size is 2 n_pw + 1.
    pub n_pw: usize,
    /// Brillouin-zone samples (midpoint grid, symmetric about k = 0).
    pub k_points: usize,
    /// Imaginary gauge field.
    pub beta: f64,
}

impl Default for BlochConfig {
    fn default() -> Self {
        BlochConfig {
            n_pw: 64,
            k_points: 512,
            beta: 0.0,
        }
    }
}

impl BlochConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pw < 8 {
            return Err(Error::Domain(format!(
                "n_pw = {} too small; need at least 8 plane waves per side",
                self.n_pw
            )));
        }
        if self.k_points < 64 {
            return Err(Error::Domain(format!(
                "k_points = {} too small; need at least 64",
                self.k_points
            )));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Domain(format!(
                "beta = {} must be finite and non-negative",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn with_beta(&self, beta: f64) -> BlochConfig {
        BlochConfig { beta, ..*self }
    }

    /// Energies with Re E above this are discarded: the basis resolves
    /// kinetic energies only up to half the plane-wave cutoff.
    pub fn e_max_valid(&self, a: f64) -> f64 {
        let g = std::f64::consts::PI * self.n_pw as f64 / a;
        g * g
    }
}

/// Bloch matrix at complex momentum kc in the basis n = -n_pw .. n_pw.
/// Needs Fourier coefficients out to 2 n_pw.
pub fn build_bloch_matrix_complex_k(
    vn: &FourierCoefficients,
    kc: Complex64,
    n_pw: usize,
) -> Result<ComplexMatrix> {
    if vn.n_max() < 2 * n_pw {
        return Err(Error::Domain(format!(
            "need Fourier coefficients out to {} for n_pw = {}, have {}",
            2 * n_pw,
            n_pw,
            vn.n_max()
        )));
    }
    let dim = 2 * n_pw + 1;
    let g0 = 2.0 * std::f64::consts::PI / vn.period;
    let mut h = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        let n = r as i64 - n_pw as i64;
        for cidx in 0..dim {
            let m = cidx as i64 - n_pw as i64;
            h.set(r, cidx, vn.get(n - m));
        }
        let q = kc + g0 * n as f64;
        h.set(r, r, h.get(r, r) + q * q);
    }
    Ok(h)
}

/// Bloch matrix at real momentum k with imaginary gauge beta. Identical,
/// entry for entry, to the complex-momentum matrix at k - i beta.
pub fn build_bloch_matrix(
    vn: &FourierCoefficients,
    k: f64,
    beta: f64,
    n_pw: usize,
) -> Result<ComplexMatrix> {
    build_bloch_matrix_complex_k(vn, Complex64::new(k, -beta), n_pw)
}

/// Tracked complex band structure over one Brillouin zone.
///
/// Bands are stored as per-k sorted eigenvalue columns plus a permutation
/// per column; band j at sample i is `point(j, i)`. All columns keep the
/// same count (the minimum over k of eigenvalues with Re E below the
/// validity cutoff), so the top retained band may splice across the
/// truncation boundary and is flagged by `band_intervals`.
#[derive(Clone, Debug)]
pub struct SpectrumCurves {
    a: f64,
    beta: f64,
    n_pw: usize,
    e_max: f64,
    ks: Vec<f64>,
    cols: Vec<Vec<Complex64>>,
    perms: Vec<Vec<usize>>,
    vn: FourierCoefficients,
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn solve_sorted(vn: &FourierCoefficients, k: f64, beta: f64, n_pw: usize) -> Result<Vec<Complex64>> {
    let h = build_bloch_matrix(vn, k, beta, n_pw)?;
    let mut vals = eig::eigenvalues(&h)
        .map_err(|e| Error::Numerical(format!("eigensolve failed at k = {k}: {e}")))?;
    vals.sort_by(cmp_complex);
    Ok(vals)
}

/// Sweeps the Brillouin zone and tracks bands by greedy nearest-neighbor
/// continuation. Only k <= 0 is solved directly; the k > 0 half is the
/// complex conjugate by the PT pairing of the gauged operator.
pub fn pbc_spectrum(p: &Potential, cfg: &BlochConfig) -> Result<SpectrumCurves> {
    cfg.validate()?;
    let n_max = 2 * cfg.n_pw;
    let vn = p.fourier_coeffs(n_max, (8 * n_max).max(256))?;
    pbc_spectrum_from_coeffs(vn, cfg)
}

/// Same sweep, starting from precomputed Fourier coefficients.
pub fn pbc_spectrum_from_coeffs(
    vn: FourierCoefficients,
    cfg: &BlochConfig,
) -> Result<SpectrumCurves> {
    cfg.validate()?;
    let a = vn.period;
    let nk = cfg.k_points;
    let dk = 2.0 * std::f64::consts::PI / a / nk as f64;

    // midpoint grid built to be exactly mirror-symmetric: ks[nk-1-i] = -ks[i]
    let mut ks = vec![0.0_f64; nk];
    for i in 0..nk / 2 {
        let k = -std::f64::consts::PI / a + (i as f64 + 0.5) * dk;
        ks[i] = k;
        ks[nk - 1 - i] = -k;
    }

    let half = nk.div_ceil(2);
    let solve_half = |i: usize| solve_sorted(&vn, ks[i], cfg.beta, cfg.n_pw);
    #[cfg(feature = "parallel")]
    let left: Result<Vec<Vec<Complex64>>> = (0..half).into_par_iter().map(solve_half).collect();
    #[cfg(not(feature = "parallel"))]
    let left: Result<Vec<Vec<Complex64>>> = (0..half).map(solve_half).collect();
    let left = left?;

    let mut cols = vec![Vec::new(); nk];
    for (i, col) in left.into_iter().enumerate() {
        if nk - 1 - i > i {
            let mut mirror: Vec<Complex64> = col.iter().map(|z| z.conj()).collect();
            mirror.sort_by(cmp_complex);
            cols[nk - 1 - i] = mirror;
        }
        cols[i] = col;
    }

    // uniform retention below the validity ceiling
    let e_max = cfg.e_max_valid(a);
    let n_tracked = cols
        .iter()
        .map(|c| c.iter().filter(|z| z.re < e_max).count())
        .min()
        .unwrap_or(0);
    if n_tracked == 0 {
        return Err(Error::Numerical(
            "no eigenvalues below the validity cutoff; raise n_pw".into(),
        ));
    }
    for c in cols.iter_mut() {
        c.truncate(n_tracked);
    }

    let perms = track_bands(&cols, n_tracked);
    Ok(SpectrumCurves {
        a,
        beta: cfg.beta,
        n_pw: cfg.n_pw,
        e_max,
        ks,
        cols,
        perms,
        vn,
    })
}

/// Greedy nearest-neighbor band continuation: band j continues to the
/// unclaimed eigenvalue of the next column closest to its current value.
fn track_bands(cols: &[Vec<Complex64>], n_tracked: usize) -> Vec<Vec<usize>> {
    let nk = cols.len();
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(nk);
    perms.push((0..n_tracked).collect());
    for i in 1..nk {
        let prev = &perms[i - 1];
        let mut used = vec![false; n_tracked];
        let mut perm = vec![0usize; n_tracked];
        for j in 0..n_tracked {
            let target = cols[i - 1][prev[j]];
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (c, val) in cols[i].iter().enumerate() {
                if !used[c] {
                    let dist = (val - target).norm_sqr();
                    if dist < best_d {
                        best_d = dist;
                        best = c;
                    }
                }
            }
            used[best] = true;
            perm[j] = best;
        }
        perms.push(perm);
    }
    perms
}

impl SpectrumCurves {
    pub fn period(&self) -> f64 {
        self.a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_pw(&self) -> usize {
        self.n_pw
    }

    pub fn e_max_valid(&self) -> f64 {
        self.e_max
    }

    pub fn n_bands(&self) -> usize {
        self.perms[0].len()
    }

    pub fn k_count(&self) -> usize {
        self.ks.len()
    }

    pub fn k_at(&self, i: usize) -> f64 {
        self.ks[i]
    }

    /// Tracked band j at Brillouin-zone sample i.
    pub fn point(&self, j: usize, i: usize) -> Complex64 {
        self.cols[i][self.perms[i][j]]
    }

    pub fn band_curve(&self, j: usize) -> Vec<Complex64> {
        (0..self.k_count()).map(|i| self.point(j, i)).collect()
    }

    pub(crate) fn coeffs(&self) -> &FourierCoefficients {
        &self.vn
    }

    /// Fresh eigensolve at arbitrary k, retaining the tracked band count
    /// (lowest by Re E), sorted by (re, im).
    pub fn solve_at(&self, k: f64) -> Result<Vec<Complex64>> {
        let mut vals = solve_sorted(&self.vn, k, self.beta, self.n_pw)?;
        vals.truncate(self.n_bands());
        Ok(vals)
    }

    /// Distance from e_b to the nearest stored spectrum point.
    pub fn min_distance(&self, e_b: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for col in &self.cols {
            for z in col {
                best = best.min((z - e_b).norm());
            }
        }
        best
    }

    /// Curve sampling density near e_b: the larger of the two steps flanking
    /// the stored point nearest to e_b, along its own band.
    pub fn local_spacing_near(&self, e_b: Complex64) -> f64 {
        let (mut bj, mut bi, mut best) = (0usize, 0usize, f64::INFINITY);
        for j in 0..self.n_bands() {
            for i in 0..self.k_count() {
                let d = (self.point(j, i) - e_b).norm();
                if d < best {
                    best = d;
                    bj = j;
                    bi = i;
                }
            }
        }
        let nk = self.k_count();
        let prev = self.point(bj, (bi + nk - 1) % nk);
        let here = self.point(bj, bi);
        let next = self.point(bj, (bi + 1) % nk);
        (here - prev).norm().max((next - here).norm())
    }

    /// Median consecutive point spacing along the tracked bands; the
    /// default clustering scale is a multiple of this.
    pub fn median_spacing(&self) -> f64 {
        let mut steps = Vec::with_capacity(self.n_bands() * (self.k_count() - 1));
        for j in 0..self.n_bands() {
            for i in 1..self.k_count() {
                steps.push((self.point(j, i) - self.point(j, i - 1)).norm());
            }
        }
        steps.sort_by(f64::total_cmp);
        steps[steps.len() / 2]
    }

    /// Largest deviation of the stored points from the wide-band parabola
    /// Re E = mean(V) - beta^2 + (Im E / (2 beta))^2. Only meaningful for
    /// beta large enough that the bands have detached from the real axis.
    pub fn parabola_deviation(&self) -> Result<f64> {
        if self.beta <= 0.0 {
            return Err(Error::Domain(
                "parabola deviation needs beta > 0".into(),
            ));
        }
        let vbar = self.vn.mean();
        let mut worst = 0.0_f64;
        for col in &self.cols {
            for z in col {
                let pred = vbar - self.beta * self.beta + (z.im / (2.0 * self.beta)).powi(2);
                worst = worst.max((z.re - pred).abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BandInterval {
    pub lo: f64,
    pub hi: f64,
    /// True when the interval contains the topmost retained band, whose
    /// upper edge is set by the basis cutoff rather than by the spectrum.
    pub truncated: bool,
}

/// Real band intervals [min Re, max Re] of the Hermitian (beta = 0) problem,
/// merged where they touch or overlap, ascending.
pub fn band_intervals(p: &Potential, n_pw: usize, k_points: usize) -> Result<Vec<BandInterval>> {
    let cfg = BlochConfig {
        n_pw,
        k_points,
        beta: 0.0,
    };
    let curves = pbc_spectrum(p, &cfg)?;
    let nb = curves.n_bands();
    // the midpoint sweep never lands on the band extrema at the zone
    // center and zone edge; solve there explicitly (at beta = 0 bands do
    // not cross, so sorted order is band order)
    let center = curves.solve_at(0.0)?;
    let edge = curves.solve_at(std::f64::consts::PI / p.period())?;
    let mut raw: Vec<(f64, f64, bool)> = (0..nb)
        .map(|j| {
            let mut lo = center[j].re.min(edge[j].re);
            let mut hi = center[j].re.max(edge[j].re);
            for i in 0..curves.k_count() {
                let e = curves.point(j, i).re;
                lo = lo.min(e);
                hi = hi.max(e);
            }
            (lo, hi, j == nb - 1)
        })
        .collect();
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut out: Vec<BandInterval> = Vec::new();
    for (lo, hi, top) in raw {
        let tol = 1e-9 * (1.0 + hi.abs());
        match out.last_mut() {
            Some(last) if lo <= last.hi + tol => {
                last.hi = last.hi.max(hi);
                last.truncated |= top;
            }
            _ => out.push(BandInterval {
                lo,
                hi,
                truncated: top,
            }),
        }
    }
    Ok(out)
}

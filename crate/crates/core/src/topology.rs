//! Spectral topology of the complex Bloch bands: winding numbers around
//! base energies, real-axis crossing counts, connected-component merging
//! scans, and the semi-infinite-boundary (SIBC) edge-state machinery.
//!
//! The winding number uses the permutation-invariant product over all
//! retained eigenvalues per k, so band tracking cannot corrupt it at
//! merging points. Each retained eigenvalue family returns to itself (as a
//! set) after one Brillouin-zone period, which makes the accumulated phase
//! an integer multiple of 2 pi without any special closure of the top band.

use crate::bloch::{pbc_spectrum, BlochConfig, SpectrumCurves};
use crate::eig;
use crate::potentials::Potential;
use crate::{Complex64, Error, Result};

/// Sign convention: k traversed from -pi/a to +pi/a; a base energy inside
/// the free-particle spectral parabola at beta > 0 winds once with POSITIVE
/// sign. Everything else follows from continuity.
pub const FREE_PARTICLE_INTERIOR_WINDING: i64 = 1;

const REFINE_MAX_DEPTH: usize = 42;
const REFINE_MAX_SOLVES: usize = 20_000;

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct WindingResult {
    pub w: i64,
    /// |accumulated phase / 2 pi - w|; below 0.5 by construction.
    pub residual: f64,
    pub min_curve_distance: f64,
}

/// Winding number of the full spectral curve family around e_b.
///
/// Accumulates principal-branch increments of arg prod_j (E_j(k) - e_b)
/// over the k grid, bisecting any interval where a single factor turns by
/// more than pi/2. Errors when e_b sits within twice the local sampling
/// spacing of the curves (winding undefined that close) or when refinement
/// exhausts its budget.
pub fn winding_number(curves: &SpectrumCurves, e_b: Complex64) -> Result<WindingResult> {
    let mind = curves.min_distance(e_b);
    let spacing = curves.local_spacing_near(e_b);
    if mind < 2.0 * spacing {
        return Err(Error::Domain(format!(
            "base energy ({}, {}) lies within {mind:.3e} of the sampled spectrum \
             (local spacing {spacing:.3e}); winding is undefined on the curve",
            e_b.re, e_b.im
        )));
    }
    let (w, residual) = winding_core(curves, e_b)?;
    Ok(WindingResult {
        w,
        residual,
        min_curve_distance: mind,
    })
}

/// Phase accumulation without the proximity guard; shared by the public
/// entry point and the SIBC classifier (which manages proximity itself).
fn winding_core(curves: &SpectrumCurves, e_b: Complex64) -> Result<(i64, f64)> {
    let nk = curves.k_count();
    let nb = curves.n_bands();
    let g0 = 2.0 * std::f64::consts::PI / curves.period();

    // sorted columns straight from storage; positional pairing is a
    // bijection, so the product phase is tracking-independent
    let col = |i: usize| -> Vec<Complex64> {
        let mut c: Vec<Complex64> = (0..nb).map(|j| curves.point(j, i)).collect();
        c.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        c
    };

    let mut budget = REFINE_MAX_SOLVES;
    let mut total = 0.0;
    let mut prev_k = curves.k_at(0);
    let mut prev_col = col(0);
    for i in 1..nk {
        let ki = curves.k_at(i);
        let ci = col(i);
        total += seg_phase(curves, e_b, prev_k, &prev_col, ki, &ci, 0, &mut budget)?;
        prev_k = ki;
        prev_col = ci;
    }
    // wrap across the zone boundary back to the first sample
    let first = col(0);
    total += seg_phase(
        curves,
        e_b,
        prev_k,
        &prev_col,
        curves.k_at(0) + g0,
        &first,
        0,
        &mut budget,
    )?;

    let turns = total / (2.0 * std::f64::consts::PI);
    let w = turns.round();
    Ok((w as i64, (turns - w).abs()))
}

/// Greedy nearest-neighbor bijection between two eigenvalue columns.
/// Any bijection leaves the product ratio invariant; matching by distance
/// keeps individual factors slowly turning, so the per-factor branch check
/// stays meaningful across (re, im) sort-order swaps between samples.
fn pair_indices(vl: &[Complex64], vr: &[Complex64]) -> Vec<usize> {
    let nb = vl.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(nb * nb);
    for (i, l) in vl.iter().enumerate() {
        for (j, r) in vr.iter().enumerate() {
            pairs.push(((r - l).norm_sqr(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut to = vec![usize::MAX; nb];
    let mut taken = vec![false; nb];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if to[i] == usize::MAX && !taken[j] {
            to[i] = j;
            taken[j] = true;
            matched += 1;
            if matched == nb {
                break;
            }
        }
    }
    to
}

#[allow(clippy::too_many_arguments)]
fn seg_phase(
    curves: &SpectrumCurves,
    e_b: Complex64,
    kl: f64,
    vl: &[Complex64],
    kr: f64,
    vr: &[Complex64],
    depth: usize,
    budget: &mut usize,
) -> Result<f64> {
    let to = pair_indices(vl, vr);
    let mut sum = 0.0;
    let mut sharp = false;
    for (i, l) in vl.iter().enumerate() {
        let dphi = ((vr[to[i]] - e_b) / (l - e_b)).arg();
        if !dphi.is_finite() || dphi.abs() > std::f64::consts::FRAC_PI_2 {
            sharp = true;
            break;
        }
        sum += dphi;
    }
    if !sharp {
        return Ok(sum);
    }
    if depth >= REFINE_MAX_DEPTH {
        return Err(Error::Numerical(format!(
            "winding refinement hit depth {REFINE_MAX_DEPTH} near k = {kl}; \
             base energy is too close to the spectrum"
        )));
    }
    if *budget == 0 {
        return Err(Error::Numerical(
            "winding refinement exceeded its eigensolve budget".into(),
        ));
    }
    *budget -= 1;
    let km = 0.5 * (kl + kr);
    let vm = curves.solve_at(km)?;
    Ok(seg_phase(curves, e_b, kl, vl, km, &vm, depth + 1, budget)?
        + seg_phase(curves, e_b, km, &vm, kr, vr, depth + 1, budget)?)
}

/// Energies at which the tracked bands cross the real axis (transversal
/// sign changes of Im E along k), deduplicated within `tol` (default: the
/// clustering scale 3 x median spacing). The topmost retained band is
/// excluded: its continuation across the retention boundary splices
/// branches and manufactures spurious sign changes.
pub fn real_axis_crossing_energies(
    curves: &SpectrumCurves,
    tol: Option<f64>,
) -> Result<Vec<f64>> {
    if curves.beta() == 0.0 {
        return Err(Error::Domain(
            "beta = 0: the entire spectrum is real, crossings are degenerate".into(),
        ));
    }
    let nb = curves.n_bands();
    if nb < 2 {
        return Err(Error::Numerical(
            "only one tracked band; raise n_pw to resolve crossings".into(),
        ));
    }
    let tol = tol.unwrap_or(3.0 * curves.median_spacing());
    let nk = curves.k_count();

    // wrap partners: greedily match last-column points to first-column
    // points across all bands (tracking does not identify them directly)
    let mut wrap_next = vec![usize::MAX; nb];
    {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(nb * nb);
        for j in 0..nb {
            let last = curves.point(j, nk - 1);
            for j2 in 0..nb {
                pairs.push(((curves.point(j2, 0) - last).norm(), j, j2));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut used_from = vec![false; nb];
        let mut used_to = vec![false; nb];
        for (_, j, j2) in pairs {
            if !used_from[j] && !used_to[j2] {
                used_from[j] = true;
                used_to[j2] = true;
                wrap_next[j] = j2;
            }
        }
    }

    let mut hits: Vec<f64> = Vec::new();
    for j in 0..nb - 1 {
        let mut push_crossing = |e0: Complex64, e1: Complex64| {
            if e0.im == 0.0 {
                hits.push(e0.re);
            } else if e0.im * e1.im < 0.0 {
                let t = -e0.im / (e1.im - e0.im);
                hits.push(e0.re + t * (e1.re - e0.re));
            }
        };
        for i in 0..nk - 1 {
            push_crossing(curves.point(j, i), curves.point(j, i + 1));
        }
        push_crossing(curves.point(j, nk - 1), curves.point(wrap_next[j], 0));
    }

    hits.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    for h in hits {
        match cluster.last() {
            Some(&prev) if h - prev <= tol => cluster.push(h),
            _ => {
                if !cluster.is_empty() {
                    out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                }
                cluster = vec![h];
            }
        }
    }
    if !cluster.is_empty() {
        out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
    }
    Ok(out)
}

/// Count of distinct real-axis crossings; see `real_axis_crossing_energies`.
pub fn real_axis_crossings(curves: &SpectrumCurves, tol: Option<f64>) -> Result<usize> {
    Ok(real_axis_crossing_energies(curves, tol)?.len())
}

/// Connected components of the sampled spectrum under single-linkage
/// clustering with neighborhood radius eps (default 3 x median consecutive
/// spacing along the tracked curves).
pub fn component_count(curves: &SpectrumCurves, eps: Option<f64>) -> usize {
    let eps = eps.unwrap_or(3.0 * curves.median_spacing());
    let pts: Vec<Complex64> = (0..curves.n_bands())
        .flat_map(|j| (0..curves.k_count()).map(move |i| curves.point(j, i)))
        .collect();
    let n = pts.len();

    // spatial hash so linkage is near-linear instead of quadratic
    let cell = |z: Complex64| -> (i64, i64) {
        ((z.re / eps).floor() as i64, (z.im / eps).floor() as i64)
    };
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (idx, &z) in pts.iter().enumerate() {
        grid.entry(cell(z)).or_default().push(idx);
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let eps2 = eps * eps;
    for (idx, &z) in pts.iter().enumerate() {
        let (cx, cy) = cell(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &other in bucket {
                        if other > idx && (pts[other] - z).norm_sqr() <= eps2 {
                            let ra = find(&mut parent, idx);
                            let rb = find(&mut parent, other);
                            if ra != rb {
                                parent[ra] = rb;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut roots = std::collections::HashSet::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        roots.insert(r);
    }
    roots.len()
}

/// Bisection on beta for the field at which `component_count` first drops
/// to `target`. Requires count(beta_lo) > target >= count(beta_hi).
/// Absolute resolution 1e-3.
pub fn beta_critical_scan(
    p: &Potential,
    cfg: &BlochConfig,
    beta_lo: f64,
    beta_hi: f64,
    target: usize,
) -> Result<f64> {
    if !(beta_lo.is_finite() && beta_hi.is_finite() && 0.0 <= beta_lo && beta_lo < beta_hi) {
        return Err(Error::Domain(format!(
            "invalid beta bracket [{beta_lo}, {beta_hi}]"
        )));
    }
    let count_at = |beta: f64| -> Result<usize> {
        Ok(component_count(&pbc_spectrum(p, &cfg.with_beta(beta))?, None))
    };
    let c_lo = count_at(beta_lo)?;
    let c_hi = count_at(beta_hi)?;
    if !(c_hi <= target && target < c_lo) {
        return Err(Error::Domain(format!(
            "no transition to {target} components in bracket: \
             count({beta_lo}) = {c_lo}, count({beta_hi}) = {c_hi}"
        )));
    }
    let mut lo = beta_lo;
    let mut hi = beta_hi;
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if count_at(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Verdict of the semi-infinite-boundary membership test for a base energy.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EdgeClassification {
    pub is_in_sibc_spectrum: bool,
    /// Gauge at which the PBC curve sweeps through the base energy; the
    /// largest such root (slowest edge-state decay). In [0, beta].
    pub beta_prime: Option<f64>,
    /// beta - beta_prime; the edge-state decay rate when interior.
    pub decay_rate: Option<f64>,
    /// True when the base energy lies on the beta-curve itself (the edge
    /// state degenerates into an extended state).
    pub boundary_flag: bool,
}

/// Distance from the base energy to the sampled curve at which we call the
/// point "on the curve" during classification: twice the local sampling
/// spacing, same as the winding guard.
fn on_curve(curves: &SpectrumCurves, e_b: Complex64) -> bool {
    curves.min_distance(e_b) < 2.0 * curves.local_spacing_near(e_b)
}

/// Classifies a base energy against the SIBC spectrum at gauge beta.
///
/// Interior points are those the PBC curves sweep over as the gauge grows
/// from 0 to beta; the largest root beta' of the sweep-through condition is
/// located by bisection on the winding predicate (the curves nest
/// monotonically in beta') to 1e-4, then cross-checked against the distance
/// from the base energy to the curve at beta'. Disagreement between the
/// winding and distance verdicts signals a too-coarse sweep and errors out.
pub fn classify_sibc(
    p: &Potential,
    beta: f64,
    e_b: Complex64,
    cfg: &BlochConfig,
) -> Result<EdgeClassification> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let at = |bp: f64| pbc_spectrum(p, &cfg.with_beta(bp));
    let top = at(beta)?;
    if on_curve(&top, e_b) {
        return Ok(EdgeClassification {
            is_in_sibc_spectrum: true,
            beta_prime: Some(beta),
            decay_rate: Some(0.0),
            boundary_flag: true,
        });
    }
    let (w_top, _) = winding_core(&top, e_b)?;
    if w_top == 0 {
        // exterior; cheap consistency sweep for stray distance roots
        for i in 1..8 {
            let bp = beta * i as f64 / 8.0;
            let c = at(bp)?;
            if on_curve(&c, e_b) {
                return Err(Error::Numerical(format!(
                    "winding says exterior at beta = {beta} but the curve at \
                     beta' = {bp} passes through the base energy; \
                     raise k_points or n_pw"
                )));
            }
        }
        return Ok(EdgeClassification {
            is_in_sibc_spectrum: false,
            beta_prime: None,
            decay_rate: None,
            boundary_flag: false,
        });
    }

    // interior: the winding predicate flips exactly where the curve last
    // sweeps through e_b (regions nest monotonically in beta'). Proximity
    // to the sampled curve must NOT count as interior here or the root
    // drifts to the edge of the proximity band; a refinement cap-out means
    // the point is on the curve, i.e. at the transition itself.
    let inside = |bp: f64| -> Result<bool> {
        let c = at(bp)?;
        match winding_core(&c, e_b) {
            Ok((w, _)) => Ok(w != 0),
            Err(Error::Numerical(_)) => Ok(true),
            Err(e) => Err(e),
        }
    };
    let mut lo = 0.0;
    let mut hi = beta;
    if inside(lo)? {
        // already interior at beta' = 0 (base energy inside a real band)
        return Ok(EdgeClassification {
            is_in_sibc_spectrum: true,
            beta_prime: Some(0.0),
            decay_rate: Some(beta),
            boundary_flag: false,
        });
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);

    // distance cross-check at the root
    let c_root = at(root)?;
    let d = c_root.min_distance(e_b);
    let allow = 3.0 * c_root.median_spacing() + 1e-3;
    if d > allow {
        return Err(Error::Numerical(format!(
            "winding transition at beta' = {root:.6} but the curve there stays \
             {d:.3e} away from the base energy (allowance {allow:.3e}); \
             raise k_points or n_pw"
        )));
    }
    Ok(EdgeClassification {
        is_in_sibc_spectrum: true,
        beta_prime: Some(root),
        decay_rate: Some(beta - root),
        boundary_flag: false,
    })
}

/// Batch classifier sharing one family of gauge sweeps across many base
/// energies. beta' roots are resolved only to the scan grid (beta/n_scan),
/// which is what merging-diagram scans need; use `classify_sibc` for a
/// refined single-point root.
pub fn classify_sibc_grid(
    p: &Potential,
    beta: f64,
    e_bs: &[Complex64],
    cfg: &BlochConfig,
    n_scan: usize,
) -> Result<Vec<EdgeClassification>> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    if n_scan < 2 {
        return Err(Error::Domain("n_scan must be at least 2".into()));
    }
    let sweeps: Vec<SpectrumCurves> = (0..=n_scan)
        .map(|i| pbc_spectrum(p, &cfg.with_beta(beta * i as f64 / n_scan as f64)))
        .collect::<Result<_>>()?;
    let top = &sweeps[n_scan];

    let mut out = Vec::with_capacity(e_bs.len());
    for &e_b in e_bs {
        if on_curve(top, e_b) {
            out.push(EdgeClassification {
                is_in_sibc_spectrum: true,
                beta_prime: Some(beta),
                decay_rate: Some(0.0),
                boundary_flag: true,
            });
            continue;
        }
        if winding_core(top, e_b)?.0 == 0 {
            out.push(EdgeClassification {
                is_in_sibc_spectrum: false,
                beta_prime: None,
                decay_rate: None,
                boundary_flag: false,
            });
            continue;
        }
        // walk down the cached sweeps for the last exterior gauge
        let mut root = 0.0;
        for i in (0..n_scan).rev() {
            let c = &sweeps[i];
            let interior = on_curve(c, e_b)
                || match winding_core(c, e_b) {
                    Ok((w, _)) => w != 0,
                    Err(Error::Numerical(_)) => true, // on the curve itself
                    Err(e) => return Err(e),
                };
            if !interior {
                root = beta * (i as f64 + 0.5) / n_scan as f64;
                break;
            }
        }
        out.push(EdgeClassification {
            is_in_sibc_spectrum: true,
            beta_prime: Some(root),
            decay_rate: Some(beta - root),
            boundary_flag: false,
        });
    }
    Ok(out)
}

/// Synthesized SIBC edge state on a grid.
#[derive(Clone, Debug)]
pub struct EdgeStateProfile {
    pub psi: Vec<Complex64>,
    /// ||H psi - E_B psi|| / ||psi|| over interior grid nodes, by
    /// fourth-order finite differences.
    pub residual: f64,
    pub beta_prime: f64,
    pub k_prime: f64,
}

/// Builds the edge state for an interior base energy: Bloch function from
/// the plane-wave eigenvector at (beta', k'), attenuated by e^{-(beta-beta')x},
/// plus the reduction-of-order partner integrated from a/2; the combination
/// A psi_1 + B psi_2 with B = -A psi_1(0)/psi_2(0) vanishes at the wall.
/// The grid must be uniform, start at 0, and have at least 16 nodes.
pub fn edge_state_profile(
    p: &Potential,
    beta: f64,
    e_b: Complex64,
    cfg: &BlochConfig,
    x_grid: &[f64],
) -> Result<EdgeStateProfile> {
    let cls = classify_sibc(p, beta, e_b, cfg)?;
    if !cls.is_in_sibc_spectrum || cls.boundary_flag {
        return Err(Error::Domain(
            "base energy is not an interior SIBC point; no localized edge state exists".into(),
        ));
    }
    edge_state_profile_with(p, beta, e_b, cls.beta_prime.unwrap(), cfg, x_grid)
}

/// Same synthesis with the gauge root beta' already known.
pub fn edge_state_profile_with(
    p: &Potential,
    beta: f64,
    e_b: Complex64,
    beta_prime: f64,
    cfg: &BlochConfig,
    x_grid: &[f64],
) -> Result<EdgeStateProfile> {
    let n = x_grid.len();
    if n < 16 {
        return Err(Error::Domain("profile grid needs at least 16 nodes".into()));
    }
    if x_grid[0] != 0.0 {
        return Err(Error::Domain("profile grid must start at x = 0".into()));
    }
    let h = x_grid[1] - x_grid[0];
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain("profile grid must be increasing".into()));
    }
    for (j, &x) in x_grid.iter().enumerate() {
        if (x - h * j as f64).abs() > 1e-9 * x_grid[n - 1] {
            return Err(Error::Domain("profile grid must be uniform".into()));
        }
    }

    let a = p.period();
    let curves = pbc_spectrum(p, &cfg.with_beta(beta_prime))?;
    // nearest tracked point, then a golden-section polish of k
    let (mut bj, mut bi, mut best) = (0usize, 0usize, f64::INFINITY);
    for j in 0..curves.n_bands() {
        for i in 0..curves.k_count() {
            let d = (curves.point(j, i) - e_b).norm();
            if d < best {
                best = d;
                bj = j;
                bi = i;
            }
        }
    }
    let _ = bj;
    let dk = 2.0 * std::f64::consts::PI / a / curves.k_count() as f64;
    let misfit = |k: f64| -> Result<f64> {
        let vals = curves.solve_at(k)?;
        Ok(vals
            .iter()
            .map(|z| (z - e_b).norm())
            .fold(f64::INFINITY, f64::min))
    };
    let k_prime = golden_min(
        curves.k_at(bi) - dk,
        curves.k_at(bi) + dk,
        60,
        &misfit,
    )?;

    // plane-wave eigenvector at (beta', k')
    let hmat = crate::bloch::build_bloch_matrix(curves.coeffs(), k_prime, beta_prime, cfg.n_pw)?;
    let pairs = eig::eigenpairs(&hmat)?;
    let mut sel = 0;
    let mut seld = f64::INFINITY;
    for (idx, v) in pairs.values.iter().enumerate() {
        let d = (v - e_b).norm();
        if d < seld {
            seld = d;
            sel = idx;
        }
    }
    let coeffs = &pairs.vectors[sel];
    let n_pw = cfg.n_pw as i64;
    let g0 = 2.0 * std::f64::consts::PI / a;
    let gamma = beta - beta_prime;

    // Bloch factor f(x) = sum_n c_n e^{i (k' + n g0) x}; the slow solution
    // is psi_1 = f e^{-gamma x}
    let bloch_f = |x: f64| -> Complex64 {
        let mut f = Complex64::new(0.0, 0.0);
        for (idx, c) in coeffs.iter().enumerate() {
            let q = k_prime + (idx as i64 - n_pw) as f64 * g0;
            f += c * Complex64::new(0.0, q * x).exp();
        }
        f
    };
    let psi1 = |x: f64| bloch_f(x) * (-gamma * x).exp();

    let p1_grid: Vec<Complex64> = x_grid.iter().map(|&x| psi1(x)).collect();
    let f_scale = x_grid
        .iter()
        .map(|&x| bloch_f(x).norm())
        .fold(0.0, f64::max);
    if f_scale == 0.0 {
        return Err(Error::Numerical("Bloch synthesis produced a zero function".into()));
    }
    let zero_tol = 1e-8 * f_scale;

    // psi_2 = psi_1 * integral_{a/2}^{x} W(t) / psi_1(t)^2 dt with the
    // Abel Wronskian W = e^{-2 beta t} of psi'' + 2 beta psi' + ... = 0;
    // the exponentials combine into e^{-2 beta' t} / f(t)^2, which decays,
    // so only genuine zeros of the Bloch factor can spoil the quadrature.
    let x0 = 0.5 * a;
    let quad_to = |from: f64, to: f64| -> Result<Complex64> {
        // 8-node Gauss-Legendre per whole-h chunk
        const GL_X: [f64; 8] = [
            -0.9602898564975362,
            -0.7966664774136267,
            -0.525532409916329,
            -0.18343464249564978,
            0.18343464249564978,
            0.525532409916329,
            0.7966664774136267,
            0.9602898564975362,
        ];
        const GL_W: [f64; 8] = [
            0.10122853629037669,
            0.22238103445337448,
            0.31370664587788744,
            0.36268378337836193,
            0.36268378337836193,
            0.31370664587788744,
            0.22238103445337448,
            0.10122853629037669,
        ];
        let len = to - from;
        let chunks = (len.abs() / h).ceil().max(1.0) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..chunks {
            let lo = from + len * c as f64 / chunks as f64;
            let hi = from + len * (c + 1) as f64 / chunks as f64;
            let mid = 0.5 * (lo + hi);
            let hw = 0.5 * (hi - lo);
            for (xg, wg) in GL_X.iter().zip(GL_W.iter()) {
                let t = mid + hw * xg;
                let f = bloch_f(t);
                if f.norm() < zero_tol {
                    return Err(Error::Numerical(format!(
                        "reduction-of-order integrand passes within {zero_tol:.2e} \
                         of a zero of the Bloch factor at x = {t:.6}"
                    )));
                }
                acc += *wg * hw * (-2.0 * beta_prime * t).exp() / (f * f);
            }
        }
        Ok(acc)
    };

    // cumulative integral at the grid nodes, anchored at x0
    let mut integral = vec![Complex64::new(0.0, 0.0); n];
    let anchor_idx = ((x0 / h).floor() as usize).min(n - 1);
    integral[anchor_idx] = quad_to(x0, x_grid[anchor_idx])?;
    for j in (anchor_idx + 1)..n {
        integral[j] = integral[j - 1] + quad_to(x_grid[j - 1], x_grid[j])?;
    }
    for j in (0..anchor_idx).rev() {
        integral[j] = integral[j + 1] + quad_to(x_grid[j + 1], x_grid[j])?;
    }

    let p2_grid: Vec<Complex64> = p1_grid
        .iter()
        .zip(&integral)
        .map(|(p1, i)| p1 * i)
        .collect();
    if p2_grid[0].norm() < 1e-12 * f_scale {
        return Err(Error::Numerical(
            "reduction-of-order partner vanishes at x = 0; normalization degenerate".into(),
        ));
    }

    let b = -p1_grid[0] / p2_grid[0];
    let mut psi: Vec<Complex64> = p1_grid
        .iter()
        .zip(&p2_grid)
        .map(|(p1, p2)| p1 + b * p2)
        .collect();
    let maxmod = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if maxmod == 0.0 {
        return Err(Error::Numerical("edge state vanished identically".into()));
    }
    for z in psi.iter_mut() {
        *z /= maxmod;
    }

    // fourth-order finite-difference residual of (H - E_B) psi on the
    // interior nodes
    let mut r2 = 0.0;
    let mut p2 = 0.0;
    for j in 2..n - 2 {
        let d2 = (-psi[j - 2] + 16.0 * psi[j - 1] - 30.0 * psi[j] + 16.0 * psi[j + 1]
            - psi[j + 2])
            / (12.0 * h * h);
        let d1 = (psi[j - 2] - 8.0 * psi[j - 1] + 8.0 * psi[j + 1] - psi[j + 2]) / (12.0 * h);
        let v = p.eval(x_grid[j]);
        let r = -d2 - 2.0 * beta * d1 + (v - beta * beta) * psi[j] - e_b * psi[j];
        r2 += r.norm_sqr();
        p2 += psi[j].norm_sqr();
    }
    if p2 == 0.0 {
        return Err(Error::Numerical("edge state vanishes on the interior grid".into()));
    }

    Ok(EdgeStateProfile {
        psi,
        residual: (r2 / p2).sqrt(),
        beta_prime,
        k_prime,
    })
}

/// Golden-section minimizer for a scalar function on [lo, hi].
fn golden_min(lo: f64, hi: f64, iters: usize, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    const INV_PHI: f64 = 0.6180339887498949;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg(beta: f64) -> BlochConfig {
        BlochConfig {
            n_pw: 8,
            k_points: 64,
            beta,
        }
    }

    #[test]
    fn winding_far_outside_is_zero() {
        let p = Potential::mathieu(1.0, 2.0 * std::f64::consts::PI).unwrap();
        let curves = pbc_spectrum(&p, &quick_cfg(0.4)).unwrap();
        let r = winding_number(&curves, Complex64::new(1e3, 1e3)).unwrap();
        assert_eq!(r.w, 0);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn winding_free_particle_interior_is_plus_one() {
        let p = Potential::free(2.0 * std::f64::consts::PI).unwrap();
        let beta = 0.5;
        let curves = pbc_spectrum(&p, &quick_cfg(beta)).unwrap();
        // inside the lowest spectral parabola, just below its vertex
        let e_b = Complex64::new(-beta * beta / 2.0, 0.0);
        let r = winding_number(&curves, e_b).unwrap();
        assert_eq!(r.w, FREE_PARTICLE_INTERIOR_WINDING);
        assert!(r.residual < 1e-6);
    }

    #[test]
    fn winding_rejects_on_spectrum_energy() {
        let p = Potential::mathieu(1.0, 2.0 * std::f64::consts::PI).unwrap();
        let curves = pbc_spectrum(&p, &quick_cfg(0.4)).unwrap();
        let e_on = curves.point(0, 7);
        assert!(winding_number(&curves, e_on).is_err());
    }

    #[test]
    fn beta_zero_spectrum_has_no_enclosure() {
        let p = Potential::mathieu(1.0, 2.0 * std::f64::consts::PI).unwrap();
        let curves = pbc_spectrum(&p, &quick_cfg(0.0)).unwrap();
        for &im in &[0.4, -0.7, 1.3] {
            let r = winding_number(&curves, Complex64::new(0.3, im)).unwrap();
            assert_eq!(r.w, 0);
        }
    }

    #[test]
    fn free_particle_has_single_axis_crossing() {
        let p = Potential::free(2.0 * std::f64::consts::PI).unwrap();
        let curves = pbc_spectrum(
            &p,
            &BlochConfig {
                n_pw: 8,
                k_points: 128,
                beta: 0.35,
            },
        )
        .unwrap();
        let hits = real_axis_crossing_energies(&curves, None).unwrap();
        assert_eq!(hits.len(), 1, "hits {hits:?}");
        // parabola vertex sits at -beta^2
        assert!((hits[0] + 0.35 * 0.35).abs() < 1e-2);
    }

    #[test]
    fn crossings_reject_hermitian_input() {
        let p = Potential::free(2.0).unwrap();
        let curves = pbc_spectrum(&p, &quick_cfg(0.0)).unwrap();
        assert!(real_axis_crossings(&curves, None).is_err());
    }

    #[test]
    fn component_count_free_particle_is_one() {
        let p = Potential::free(2.0 * std::f64::consts::PI).unwrap();
        let curves = pbc_spectrum(&p, &quick_cfg(0.5)).unwrap();
        assert_eq!(component_count(&curves, None), 1);
    }

    #[test]
    fn scan_rejects_bracket_without_transition() {
        let p = Potential::free(2.0 * std::f64::consts::PI).unwrap();
        let cfg = quick_cfg(0.0);
        assert!(beta_critical_scan(&p, &cfg, 0.3, 0.5, 0).is_err());
    }
}

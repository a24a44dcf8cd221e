//! Closed-form reference models: the merging theory for the two-gap
//! elliptic potential and the two-band Dirac reduction near a narrow gap.
//!
//! Both exist to cross-check the full plane-wave solver: the elliptic model
//! predicts the critical gauge field at which the two lowest bands merge,
//! the Dirac model the shrinking of a narrow gap and the exceptional point
//! where it closes.

use crate::eig::{self, ComplexMatrix};
use crate::{Complex64, Error, Result};

/// Parameters of the two-gap elliptic model; everything depends on the
/// lattice period alone.
#[derive(Clone, Copy, Debug)]
pub struct Lame2Params {
    pub a: f64,
}

impl Lame2Params {
    /// Requires a >= 2: the merging analysis degenerates below that (the
    /// interior maximum of the field curve moves to the band edge).
    pub fn new(a: f64) -> Result<Lame2Params> {
        if !(a.is_finite() && a >= 2.0) {
            return Err(Error::Domain(format!(
                "elliptic model needs period a >= 2, got {a}"
            )));
        }
        Ok(Lame2Params { a })
    }

    /// Period from the elliptic parameter: a = 2 K(m).
    pub fn from_parameter(m: f64) -> Result<Lame2Params> {
        Lame2Params::new(2.0 * crate::specfun::ellip_k(m)?)
    }
}

/// Gauge field at which a decay rate kI becomes an allowed real-energy
/// channel: beta = kI + (1/a) ln |(1 - kI) / (1 + kI)|.
pub fn lame2_beta_of_ki(ki: f64, prm: Lame2Params) -> Result<f64> {
    if !ki.is_finite() {
        return Err(Error::Domain("kI must be finite".into()));
    }
    if ki == 1.0 || ki == -1.0 {
        return Err(Error::Domain(
            "kI = +-1 sits on the logarithmic singularity".into(),
        ));
    }
    Ok(ki + ((1.0 - ki) / (1.0 + ki)).abs().ln() / prm.a)
}

/// Critical gauge field: the interior maximum of the kI -> beta curve,
/// beta_c = s + (1/a) ln((1 - s)/(1 + s)) with s = sqrt(1 - 2/a).
pub fn lame2_beta_c(prm: Lame2Params) -> f64 {
    let s = (1.0 - 2.0 / prm.a).sqrt();
    if s == 0.0 {
        return 0.0;
    }
    s + ((1.0 - s) / (1.0 + s)).ln() / prm.a
}

/// Number of grid intervals for root bracketing. The transcendental curve
/// has logarithmic spikes hugging kI = +-1 whose extraneous near-singular
/// solutions sit closer than one grid step; this density resolves the
/// 1 to 3 physical roots and nothing else.
const KI_GRID: usize = 40_000;

/// Real roots kI of exp[2 (beta - kI) a] = (kR^2 + (1-kI)^2) / (kR^2 + (1+kI)^2),
/// found by sign-change bracketing on [-2, beta + 2] and bisection to 1e-10.
/// Even in kR by construction.
pub fn lame2_ki_roots(kr: f64, beta: f64, prm: Lame2Params) -> Result<Vec<f64>> {
    if !kr.is_finite() || !beta.is_finite() {
        return Err(Error::Domain("kR and beta must be finite".into()));
    }
    let a = prm.a;
    let kr2 = kr * kr;
    let f = |ki: f64| -> f64 {
        let up = kr2 + (1.0 - ki) * (1.0 - ki);
        let dn = kr2 + (1.0 + ki) * (1.0 + ki);
        2.0 * (beta - ki) * a - (up / dn).ln()
    };

    let lo = -2.0;
    let hi = beta + 2.0;
    let step = (hi - lo) / KI_GRID as f64;
    let mut roots = Vec::new();
    let mut xl = lo;
    let mut fl = f(xl);
    for i in 1..=KI_GRID {
        let xr = lo + step * i as f64;
        let fr = f(xr);
        if fl.is_finite() && fr.is_finite() {
            if fl == 0.0 {
                roots.push(xl);
            } else if fl * fr < 0.0 {
                // bisect to 1e-10
                let (mut bl, mut br, mut vbl) = (xl, xr, fl);
                while br - bl > 1e-10 {
                    let mid = 0.5 * (bl + br);
                    let vm = f(mid);
                    if vm == 0.0 {
                        bl = mid;
                        br = mid;
                        break;
                    }
                    if vbl * vm < 0.0 {
                        br = mid;
                    } else {
                        bl = mid;
                        vbl = vm;
                    }
                }
                roots.push(0.5 * (bl + br));
            }
        }
        xl = xr;
        fl = fr;
    }
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    Ok(roots)
}

/// Two-band Dirac reduction around a narrow gap at the zone edge
/// k0 = pi / a with unperturbed edge energy E1 = k0^2.
#[derive(Clone, Copy, Debug)]
pub struct DiracParams {
    pub v0: f64,
    pub a: f64,
}

impl DiracParams {
    pub fn new(v0: f64, a: f64) -> Result<DiracParams> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(Error::Domain(format!("gap parameter V0 = {v0} must be positive")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Domain(format!("period a = {a} must be positive")));
        }
        Ok(DiracParams { v0, a })
    }

    pub fn k0(&self) -> f64 {
        std::f64::consts::PI / self.a
    }

    pub fn e1(&self) -> f64 {
        self.k0() * self.k0()
    }

    /// V0 / E1; the reduction assumes a shallow lattice, so values near or
    /// above 1 mean the model is being stretched.
    pub fn shallowness(&self) -> f64 {
        self.v0 / self.e1()
    }
}

/// [[E1 + 2 k0 (k - k0 - i beta), V0/2], [V0/2, E1 - 2 k0 (k - k0 - i beta)]]
pub fn dirac_hamiltonian(k: f64, beta: f64, prm: DiracParams) -> ComplexMatrix {
    let k0 = prm.k0();
    let delta = 2.0 * k0 * Complex64::new(k - k0, -beta);
    let e1 = Complex64::new(prm.e1(), 0.0);
    let v = Complex64::new(prm.v0 / 2.0, 0.0);
    let mut h = ComplexMatrix::zeros(2);
    h.set(0, 0, e1 + delta);
    h.set(0, 1, v);
    h.set(1, 0, v);
    h.set(1, 1, e1 - delta);
    h
}

/// Width of the gap between the two bands on the real-energy axis,
/// 2 sqrt((V0/2)^2 - 4 k0^2 beta^2), and whether the gap has closed.
///
/// The two zone-edge eigenvalues sit at E1 +- sqrt((V0/2)^2 - (2 k0 beta)^2),
/// so the real-axis separation carries a factor 2 over the square root and
/// reduces to V0 at beta = 0, matching the full solver.
pub fn dirac_gap_width(beta: f64, prm: DiracParams) -> (f64, bool) {
    let s = prm.v0 * prm.v0 / 4.0 - 4.0 * prm.k0().powi(2) * beta * beta;
    if s <= 0.0 {
        (0.0, true)
    } else {
        (2.0 * s.sqrt(), false)
    }
}

/// Field at which the gap closes: beta_c = V0 a / (4 pi).
pub fn dirac_beta_c(prm: DiracParams) -> f64 {
    prm.v0 * prm.a / (4.0 * std::f64::consts::PI)
}

/// Diagnostics of the gap-closing degeneracy at k = k0, beta = beta_c.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DiracEpReport {
    /// max |((H - E1)^2)_{ij}| / ||H - E1||_F^2
    pub nilpotency_residual: f64,
    pub nilpotent: bool,
    /// s2 / s1, the singular-value ratio of H - E1
    pub rank_ratio: f64,
    pub rank_one: bool,
    pub eigenvalues: [(f64, f64); 2],
}

/// Checks that H(k0, beta_c) - E1 I is nilpotent of rank one: an exceptional
/// point where the two band eigenvalues and eigenvectors coalesce.
pub fn dirac_ep_check(prm: DiracParams) -> Result<DiracEpReport> {
    let h = dirac_hamiltonian(prm.k0(), dirac_beta_c(prm), prm);
    let e1 = Complex64::new(prm.e1(), 0.0);
    let n = [
        h.get(0, 0) - e1,
        h.get(0, 1),
        h.get(1, 0),
        h.get(1, 1) - e1,
    ];
    let nf2: f64 = n.iter().map(|z| z.norm_sqr()).sum();

    // (H - E1)^2 entrywise
    let sq = [
        n[0] * n[0] + n[1] * n[2],
        n[0] * n[1] + n[1] * n[3],
        n[2] * n[0] + n[3] * n[2],
        n[2] * n[1] + n[3] * n[3],
    ];
    let nil_res = sq
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        / nf2.max(f64::MIN_POSITIVE);

    // singular values of the 2x2: eigenvalues of N^H N
    let t = nf2;
    let det2 = (n[0] * n[3] - n[1] * n[2]).norm_sqr();
    let disc = (t * t / 4.0 - det2).max(0.0).sqrt();
    let s1 = (t / 2.0 + disc).sqrt();
    let s2 = (t / 2.0 - disc).max(0.0).sqrt();
    let rank_ratio = if s1 > 0.0 { s2 / s1 } else { 1.0 };

    let vals = eig::eigenvalues(&h)?;
    Ok(DiracEpReport {
        nilpotency_residual: nil_res,
        nilpotent: nil_res < 1e-14,
        rank_ratio,
        rank_one: s1 > 0.0 && rank_ratio < 1e-12,
        eigenvalues: [(vals[0].re, vals[0].im), (vals[1].re, vals[1].im)],
    })
}

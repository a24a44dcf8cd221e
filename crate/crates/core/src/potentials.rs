//! Periodic potentials V(x) = V(x + a) and their Fourier coefficients.
//!
//! Built-in families: the elliptic (Lame) potential with its natural period
//! 2K(m), a periodized double-well cell, the cosine (Mathieu) lattice, the
//! free particle, and tabulated single-period samples with trigonometric
//! interpolation. Fourier coefficients come from the periodic trapezoid
//! rule, which is spectrally accurate for smooth V.

use crate::specfun::{ellip_k, jacobi_sn};
use crate::{Complex64, Error, Result};

#[derive(Clone, Debug)]
enum Kind {
    /// N(N-1) (m sn^2(x; m) - 1); finite-gap for integer N, period 2K(m).
    Lame { index: u32, m: f64 },
    /// Reflectionless double-well cell, periodized; depth controlled by sigma.
    DoubleWell { sigma: f64 },
    /// v0 cos(2 pi x / a); zero mean by construction.
    Mathieu { amplitude: f64 },
    Free,
    /// Uniform samples over one period; evaluated by trig interpolation.
    Tabulated {
        x0: f64,
        cos_c: Vec<f64>,
        sin_c: Vec<f64>,
        n_samples: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Potential {
    kind: Kind,
    period: f64,
}

impl Potential {
    /// Elliptic potential N(N-1) (m sn^2(x; m) - 1) with period 2K(m).
    pub fn lame(index: u32, m: f64) -> Result<Potential> {
        if index < 1 {
            return Err(Error::Domain("lame index must be >= 1".into()));
        }
        let period = 2.0 * ellip_k(m)?;
        Ok(Potential {
            kind: Kind::Lame { index, m },
            period,
        })
    }

    /// Double-well cell on [-a/2, a/2), repeated with period a.
    ///
    /// The cell supports two bound states at -sigma^2 and -1 when isolated;
    /// for small a the periodization seam distorts the upper bands, so a
    /// should be large enough that the cell has decayed at |x| = a/2.
    pub fn double_well(sigma: f64, period: f64) -> Result<Potential> {
        if !sigma.is_finite() || sigma <= 1.0 {
            return Err(Error::Domain(format!(
                "double-well shape parameter sigma = {sigma} must exceed 1"
            )));
        }
        check_period(period)?;
        Ok(Potential {
            kind: Kind::DoubleWell { sigma },
            period,
        })
    }

    /// Cosine lattice v0 cos(2 pi x / a).
    pub fn mathieu(amplitude: f64, period: f64) -> Result<Potential> {
        if !amplitude.is_finite() {
            return Err(Error::Domain("mathieu amplitude must be finite".into()));
        }
        check_period(period)?;
        Ok(Potential {
            kind: Kind::Mathieu { amplitude },
            period,
        })
    }

    /// V = 0 with an explicit period (sets the Brillouin zone).
    pub fn free(period: f64) -> Result<Potential> {
        check_period(period)?;
        Ok(Potential {
            kind: Kind::Free,
            period,
        })
    }

    /// Potential from uniform samples (x_j, V(x_j)), x_j = x0 + j dx,
    /// covering exactly one period a = n dx. Values between samples come
    /// from the trigonometric interpolant, which reproduces band-limited
    /// data exactly.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Potential> {
        let n = samples.len();
        if n < 4 {
            return Err(Error::Domain(format!(
                "tabulated potential needs at least 4 samples, got {n}"
            )));
        }
        let x0 = samples[0].0;
        let dx = samples[1].0 - samples[0].0;
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::Domain("tabulated abscissas must be increasing".into()));
        }
        let period = dx * n as f64;
        for (j, &(x, v)) in samples.iter().enumerate() {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::Domain("tabulated sample not finite".into()));
            }
            let expected = x0 + dx * j as f64;
            if (x - expected).abs() > 1e-9 * period {
                return Err(Error::Domain(format!(
                    "tabulated abscissas not uniform: sample {j} at {x}, expected {expected}"
                )));
            }
        }

        // Real trig interpolation coefficients: a_k = (2/n) sum v_j cos(k t_j),
        // b_k = (2/n) sum v_j sin(k t_j), t_j = 2 pi j / n. The constant and
        // (for even n) the Nyquist cosine carry a factor 1/2.
        let half = n / 2;
        let mut cos_c = vec![0.0; half + 1];
        let mut sin_c = vec![0.0; half + 1];
        for k in 0..=half {
            let mut ck = 0.0;
            let mut sk = 0.0;
            for (j, &(_, v)) in samples.iter().enumerate() {
                let t = 2.0 * std::f64::consts::PI * (k * j % n) as f64 / n as f64;
                ck += v * t.cos();
                sk += v * t.sin();
            }
            cos_c[k] = 2.0 * ck / n as f64;
            sin_c[k] = 2.0 * sk / n as f64;
        }
        cos_c[0] *= 0.5;
        sin_c[0] = 0.0;
        if n % 2 == 0 {
            cos_c[half] *= 0.5;
            sin_c[half] = 0.0;
        }

        Ok(Potential {
            kind: Kind::Tabulated {
                x0,
                cos_c,
                sin_c,
                n_samples: n,
            },
            period,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// V(x), defined for all real x through the periodic extension.
    pub fn eval(&self, x: f64) -> f64 {
        let a = self.period;
        // reduce to [-a/2, a/2); every branch below sees the same cell
        let xr = x - a * (x / a + 0.5).floor();
        match &self.kind {
            Kind::Lame { index, m } => {
                let s = jacobi_sn(xr, *m).expect("parameter validated at construction");
                let c = (*index * (*index - 1)) as f64;
                // index 1 has no gap: V = 0 uniformly, keep the formula
                if *index == 1 {
                    0.0
                } else {
                    c * (*m * s * s - 1.0)
                }
            }
            Kind::DoubleWell { sigma } => double_well_cell(xr, *sigma),
            Kind::Mathieu { amplitude } => {
                amplitude * (2.0 * std::f64::consts::PI * xr / a).cos()
            }
            Kind::Free => 0.0,
            Kind::Tabulated {
                x0,
                cos_c,
                sin_c,
                n_samples,
            } => {
                let t = 2.0 * std::f64::consts::PI * (xr - x0) / a;
                let mut acc = 0.0;
                let half = n_samples / 2;
                for k in 0..=half {
                    let (s, c) = (k as f64 * t).sin_cos();
                    acc += cos_c[k] * c + sin_c[k] * s;
                }
                acc
            }
        }
    }

    /// Fourier coefficients V_n = (1/a) integral_0^a V(x) e^{-2 pi i n x / a} dx
    /// for |n| <= n_max, by the periodic trapezoid rule on n_quad nodes.
    ///
    /// Requires n_quad >= 8 n_max so the retained coefficients are resolved
    /// well past the aliasing limit. The result is conjugate-symmetrized,
    /// which makes downstream Hermitian limits exact for real V.
    pub fn fourier_coeffs(&self, n_max: usize, n_quad: usize) -> Result<FourierCoefficients> {
        if n_quad < 8 * n_max.max(1) {
            return Err(Error::Domain(format!(
                "n_quad = {n_quad} too coarse for n_max = {n_max}; need n_quad >= {}",
                8 * n_max.max(1)
            )));
        }
        let a = self.period;
        let vals_x: Vec<f64> = (0..n_quad)
            .map(|j| self.eval(a * j as f64 / n_quad as f64))
            .collect();

        let mut vals = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for n in -(n_max as i64)..=(n_max as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in vals_x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (n * j as i64) as f64 / n_quad as f64;
                acc += v * Complex64::new(ang.cos(), ang.sin());
            }
            vals[(n + n_max as i64) as usize] = acc / n_quad as f64;
        }
        // enforce V_{-n} = conj(V_n) exactly (V is real)
        vals[n_max] = Complex64::new(vals[n_max].re, 0.0);
        for n in 1..=n_max {
            let sym = 0.5 * (vals[n_max + n] + vals[n_max - n].conj());
            vals[n_max + n] = sym;
            vals[n_max - n] = sym.conj();
        }

        Ok(FourierCoefficients {
            period: a,
            n_max,
            vals,
        })
    }
}

fn check_period(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("period a = {a} must be positive")));
    }
    Ok(())
}

/// One double-well cell. Even in x; two isolated-cell bound states at
/// -sigma^2 and -1. The denominator is bounded away from zero for sigma > 1.
fn double_well_cell(x: f64, sigma: f64) -> f64 {
    let sx = sigma * x;
    let num = sigma * sigma + (1.0 / x.cosh()).powi(2) * sx.sinh().powi(2);
    let den = x.tanh() * sx.sinh() - sigma * sx.cosh();
    -2.0 * (sigma * sigma - 1.0) * num / (den * den)
}

/// Fourier coefficients of a real periodic potential, indexed n in
/// [-n_max, n_max] with V_{-n} = conj(V_n).
#[derive(Clone, Debug)]
pub struct FourierCoefficients {
    pub period: f64,
    n_max: usize,
    vals: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// V_n. Panics if |n| > n_max; callers size n_max to cover every
    /// difference index they will request.
    pub fn get(&self, n: i64) -> Complex64 {
        assert!(
            n.unsigned_abs() as usize <= self.n_max,
            "Fourier index {n} out of range +-{}",
            self.n_max
        );
        self.vals[(n + self.n_max as i64) as usize]
    }

    /// Mean of V over one period (the n = 0 coefficient).
    pub fn mean(&self) -> f64 {
        self.vals[self.n_max].re
    }

    /// sum_n |V_n|^2, the Parseval power of the truncated series.
    pub fn power(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum()
    }
}

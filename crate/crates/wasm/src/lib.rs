//! Browser bindings for the interactive demo page in `www/`: one Explorer
//! object wrapping a potential, with a Brillouin-zone sweep, point winding
//! numbers, and open-chain skin metrics. All numeric plumbing stays in the
//! core crate; this layer only flattens results for JS.
//!
//! The plain `do_*` methods carry the logic and compile on any target; the
//! `#[wasm_bindgen]` wrappers translate errors into JS strings.

use skinband::bloch::{pbc_spectrum, BlochConfig, SpectrumCurves};
use skinband::potentials::Potential;
use skinband::realspace::{obc_spectrum, skin_metrics, Boundary, GridSpec};
use skinband::topology::winding_number;
use skinband::Complex64;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Explorer {
    potential: Potential,
    curves: Option<SpectrumCurves>,
}

impl Explorer {
    /// kind: "mathieu" (amplitude, period), "double-well" (width, period),
    /// "lame" (parameter; period is derived, the argument is ignored),
    /// "free" (amplitude ignored).
    fn build(kind: &str, amplitude: f64, period: f64) -> Result<Explorer, String> {
        let potential = match kind {
            "mathieu" => Potential::mathieu(amplitude, period),
            "double-well" => Potential::double_well(amplitude, period),
            "lame" => Potential::lame(2, amplitude),
            "free" => Potential::free(period),
            other => Err(skinband::Error::Domain(format!(
                "unknown potential kind {other:?}"
            ))),
        }
        .map_err(|e| e.to_string())?;
        Ok(Explorer {
            potential,
            curves: None,
        })
    }

    fn do_sweep(&mut self, beta: f64, n_pw: usize, k_points: usize) -> Result<(), String> {
        let cfg = BlochConfig {
            n_pw,
            k_points,
            beta,
        };
        self.curves = Some(pbc_spectrum(&self.potential, &cfg).map_err(|e| e.to_string())?);
        Ok(())
    }

    fn sweep_ref(&self) -> Result<&SpectrumCurves, String> {
        self.curves.as_ref().ok_or_else(|| "sweep first".to_string())
    }

    fn do_winding(&self, e_re: f64, e_im: f64) -> Result<i64, String> {
        let curves = self.sweep_ref()?;
        winding_number(curves, Complex64::new(e_re, e_im))
            .map(|r| r.w)
            .map_err(|e| e.to_string())
    }

    /// [length, center_of_mass, ipr, fitted_decay, fit_quality] followed by
    /// |psi| at every node of the selected mid-spectrum open-chain mode.
    fn do_skin(
        &self,
        beta: f64,
        cells: usize,
        points_per_cell: usize,
    ) -> Result<Vec<f64>, String> {
        let g = GridSpec::for_potential(&self.potential, cells, points_per_cell, Boundary::Open)
            .map_err(|e| e.to_string())?;
        let (_, vecs) = obc_spectrum(&self.potential, beta, &g).map_err(|e| e.to_string())?;
        let v = &vecs[g.n_nodes() / 2];
        let m = skin_metrics(v, &g).map_err(|e| e.to_string())?;
        let mut out = vec![
            g.length(),
            m.center_of_mass,
            m.ipr,
            m.fitted_decay,
            m.fit_quality,
        ];
        out.extend(v.iter().map(|z| z.norm()));
        Ok(out)
    }
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, amplitude: f64, period: f64) -> Result<Explorer, JsValue> {
        Explorer::build(kind, amplitude, period).map_err(|e| JsValue::from_str(&e))
    }

    pub fn sweep(&mut self, beta: f64, n_pw: usize, k_points: usize) -> Result<(), JsValue> {
        self.do_sweep(beta, n_pw, k_points)
            .map_err(|e| JsValue::from_str(&e))
    }

    pub fn n_bands(&self) -> usize {
        self.curves.as_ref().map_or(0, |c| c.n_bands())
    }

    pub fn k_count(&self) -> usize {
        self.curves.as_ref().map_or(0, |c| c.k_count())
    }

    pub fn e_max_valid(&self) -> f64 {
        self.curves.as_ref().map_or(0.0, |c| c.e_max_valid())
    }

    pub fn band_re(&self, band: usize) -> Vec<f64> {
        match &self.curves {
            Some(c) if band < c.n_bands() => c.band_curve(band).iter().map(|z| z.re).collect(),
            _ => Vec::new(),
        }
    }

    pub fn band_im(&self, band: usize) -> Vec<f64> {
        match &self.curves {
            Some(c) if band < c.n_bands() => c.band_curve(band).iter().map(|z| z.im).collect(),
            _ => Vec::new(),
        }
    }

    /// Winding number of the swept spectrum around (e_re, e_im); throws on
    /// points too close to the curve to certify.
    pub fn winding(&self, e_re: f64, e_im: f64) -> Result<i32, JsValue> {
        self.do_winding(e_re, e_im)
            .map(|w| w as i32)
            .map_err(|e| JsValue::from_str(&e))
    }

    pub fn skin(
        &self,
        beta: f64,
        cells: usize,
        points_per_cell: usize,
    ) -> Result<Vec<f64>, JsValue> {
        self.do_skin(beta, cells, points_per_cell)
            .map_err(|e| JsValue::from_str(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explorer_sweeps_winds_and_localizes() {
        let mut ex = Explorer::build("free", 0.0, std::f64::consts::TAU).unwrap();
        ex.do_sweep(0.4, 8, 128).unwrap();
        assert!(ex.n_bands() >= 3);
        assert_eq!(ex.band_re(0).len(), ex.k_count());

        // interior of the free-particle loop winds once
        let w = ex.do_winding(-0.08, 0.0).unwrap();
        assert_eq!(w.abs(), 1);
        assert_eq!(ex.do_winding(-2.0, 0.0).unwrap(), 0);

        let skin = ex.do_skin(0.3, 6, 32).unwrap();
        let n_nodes = 6 * 32 - 1;
        assert_eq!(skin.len(), 5 + n_nodes);
        let (length, com, decay) = (skin[0], skin[1], skin[3]);
        assert!(com < 0.5 * length, "com = {com}, length = {length}");
        assert!((decay - 0.3).abs() < 0.1, "decay = {decay}");
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!(Explorer::build("quartic", 1.0, 1.0).is_err());
        let ex = Explorer::build("mathieu", 1.0, std::f64::consts::TAU).unwrap();
        assert!(ex.do_winding(0.0, 0.0).is_err(), "winding before sweep");
    }
}

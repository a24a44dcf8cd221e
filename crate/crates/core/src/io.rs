//! CSV and JSON serialization of spectra, level lists, eigenvectors, and
//! winding reports. All floating-point output uses 17 significant digits
//! so files round-trip bit-exactly through f64 parsing.

use crate::bloch::SpectrumCurves;
use crate::{Complex64, Error, Result};
use std::io::{BufRead, Write};

/// Shortest representation that survives an exact f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Band-major polylines: every row of band 0 for all k, then band 1, ...
/// Header: k,band,re_e,im_e.
pub fn write_spectrum_csv<W: Write>(w: &mut W, curves: &SpectrumCurves) -> Result<()> {
    writeln!(w, "k,band,re_e,im_e").map_err(io_err)?;
    for band in 0..curves.n_bands() {
        for i in 0..curves.k_count() {
            let e = curves.point(band, i);
            writeln!(
                w,
                "{},{band},{},{}",
                fmt_f64(curves.k_at(i)),
                fmt_f64(e.re),
                fmt_f64(e.im)
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Flat level list. Header: band,re_e,im_e.
pub fn write_levels_csv<W: Write>(w: &mut W, levels: &[Complex64]) -> Result<()> {
    writeln!(w, "band,re_e,im_e").map_err(io_err)?;
    for (band, e) in levels.iter().enumerate() {
        writeln!(w, "{band},{},{}", fmt_f64(e.re), fmt_f64(e.im)).map_err(io_err)?;
    }
    Ok(())
}

/// Sampled wavefunction. Header: x,re_psi,im_psi,abs_psi.
pub fn write_eigenvector_csv<W: Write>(
    w: &mut W,
    xs: &[f64],
    psi: &[Complex64],
) -> Result<()> {
    if xs.len() != psi.len() {
        return Err(Error::Domain(format!(
            "grid has {} nodes but the vector has {}",
            xs.len(),
            psi.len()
        )));
    }
    writeln!(w, "x,re_psi,im_psi,abs_psi").map_err(io_err)?;
    for (x, z) in xs.iter().zip(psi) {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(*x),
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(z.norm())
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// One row of a winding / edge-classification report. Fields that do not
/// apply to the requested computation stay null rather than disappearing,
/// so downstream parsers see a fixed schema.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct WindingRecord {
    pub e_b_re: f64,
    pub e_b_im: f64,
    pub w: Option<i64>,
    pub residual: Option<f64>,
    pub in_sibc: Option<bool>,
    pub beta_prime: Option<f64>,
    pub decay_rate: Option<f64>,
}

/// Pretty-printed JSON for any serializable report.
pub fn write_json<W: Write, T: serde::Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| Error::Numerical(format!("json write failed: {e}")))?;
    writeln!(w).map_err(io_err)
}

/// Reads an x,V two-column CSV (comma separated, optional one-line header)
/// into sample pairs for `Potential::tabulated`.
pub fn read_tabulated_csv<R: BufRead>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut cols = t.split(',');
        let c0 = cols.next().unwrap_or("").trim();
        let c1 = cols.next().unwrap_or("").trim();
        if cols.next().is_some() {
            return Err(Error::Domain(format!(
                "line {}: expected two columns",
                lineno + 1
            )));
        }
        match (c0.parse::<f64>(), c1.parse::<f64>()) {
            (Ok(x), Ok(v)) => out.push((x, v)),
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(Error::Domain(format!(
                    "line {}: cannot parse '{t}' as two reals",
                    lineno + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Domain("no numeric rows in the table".into()));
    }
    Ok(out)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Numerical(format!("io failure: {e}"))
}

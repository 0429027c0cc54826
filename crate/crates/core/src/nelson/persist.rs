//! Raw snapshot files with a JSON sidecar, and CSV dumps of path ensembles.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::paths::PathEnsemble;
use super::tdse::WaveField;
use crate::physics::PhysicalUnits;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldSidecar {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_x: usize,
    pub dt: f64,
    pub n_t: usize,
    pub stride: usize,
    pub n_snapshots: usize,
    pub mass: f64,
    pub hbar: f64,
    pub k0: f64,
    pub region_ii: [f64; 2],
    pub norms: Vec<f64>,
}

fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

/// Writes `data` as little-endian `f64` pairs `(re, im)` and `data.json`.
pub fn save_field<T: Scalar>(field: &WaveField<T>, data: impl AsRef<Path>) -> Result<()> {
    let data = data.as_ref();
    let mut out = BufWriter::new(fs::File::create(data)?);
    for c in &field.psi {
        out.write_all(&c.re.to_f64_lossy().to_le_bytes())?;
        out.write_all(&c.im.to_f64_lossy().to_le_bytes())?;
    }
    out.flush()?;
    let g = &field.grid;
    let meta = FieldSidecar {
        x_lo: g.x_lo.to_f64_lossy(),
        x_hi: g.x_hi.to_f64_lossy(),
        n_x: g.n_x,
        dt: g.dt.to_f64_lossy(),
        n_t: g.n_t,
        stride: g.stride,
        n_snapshots: field.n_snapshots(),
        mass: field.units.mass.to_f64_lossy(),
        hbar: field.units.hbar.to_f64_lossy(),
        k0: field.k0.to_f64_lossy(),
        region_ii: [field.region_ii.0.to_f64_lossy(), field.region_ii.1.to_f64_lossy()],
        norms: field.norms.iter().map(|n| n.to_f64_lossy()).collect(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(sidecar_path(data), json)?;
    Ok(())
}

pub fn load_field<T: Scalar>(data: impl AsRef<Path>) -> Result<WaveField<T>> {
    let data = data.as_ref();
    let text = fs::read_to_string(sidecar_path(data))?;
    let meta: FieldSidecar = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let bytes = fs::read(data)?;
    let expected = meta.n_snapshots * meta.n_x * 16;
    if bytes.len() != expected {
        return Err(Error::Parse(format!(
            "snapshot file holds {} bytes, sidecar implies {expected}",
            bytes.len()
        )));
    }
    let grid = GridSpec::new(T::lit(meta.x_lo), T::lit(meta.x_hi), meta.n_x, T::lit(meta.dt), meta.n_t)?
        .with_stride(meta.stride)?;
    if grid.n_snapshots() != meta.n_snapshots || meta.norms.len() != meta.n_snapshots {
        return Err(Error::Parse("sidecar snapshot count is inconsistent".into()));
    }
    let word = |i: usize| {
        let mut b = [0u8; 8];
        b.copy_from_slice(&bytes[8 * i..8 * i + 8]);
        T::lit(f64::from_le_bytes(b))
    };
    let psi: Vec<Complex<T>> = (0..meta.n_snapshots * meta.n_x)
        .map(|i| Complex::new(word(2 * i), word(2 * i + 1)))
        .collect();
    let peak_density = psi
        .chunks(meta.n_x)
        .map(|s| s.iter().fold(T::zero(), |m, c| m.max(c.norm_sqr())))
        .collect();
    Ok(WaveField {
        grid,
        units: PhysicalUnits::new(T::lit(meta.mass), T::lit(meta.hbar))?,
        psi,
        norms: meta.norms.iter().map(|n| T::lit(*n)).collect(),
        peak_density,
        region_ii: (T::lit(meta.region_ii[0]), T::lit(meta.region_ii[1])),
        k0: T::lit(meta.k0),
        broad_spectrum: false,
    })
}

/// `path_id,seed,transmitted,dwell_time` per path; excluded paths are kept
/// with an empty dwell time and a reason column.
pub fn write_ensemble_csv<T: Scalar, W: Write>(ensemble: &PathEnsemble<T>, mut out: W) -> Result<()> {
    writeln!(out, "path_id,seed,transmitted,dwell_time,excluded")?;
    for p in &ensemble.paths {
        match p.excluded {
            None => writeln!(out, "{},{},{},{},", p.index, p.seed, p.transmitted, p.dwell_time.to_f64_lossy())?,
            Some(e) => writeln!(out, "{},{},{},,{:?}", p.index, p.seed, p.transmitted, e)?,
        }
    }
    Ok(())
}

/// Long format `path_id,t,x` for paths that recorded a trajectory.
pub fn write_trajectories_csv<T: Scalar, W: Write>(ensemble: &PathEnsemble<T>, mut out: W) -> Result<()> {
    writeln!(out, "path_id,t,x")?;
    let every = T::from_usize_lossy(ensemble.record_every.unwrap_or(1));
    for p in &ensemble.paths {
        if let Some(traj) = &p.trajectory {
            for (k, x) in traj.iter().enumerate() {
                let t = ensemble.sde_dt * every * T::from_usize_lossy(k);
                writeln!(out, "{},{},{}", p.index, t.to_f64_lossy(), x.to_f64_lossy())?;
            }
        }
    }
    Ok(())
}

//! Trajectory files.
//!
//! CSV: optional `# ` comment lines, then the column row
//! `t_bar,n,phi,phi_dot` and one row per cell per snapshot. Floats use the
//! shortest representation that round-trips.
//!
//! Binary (all little-endian):
//!
//! ```text
//! magic       6 bytes  "STWPA1"
//! n           u64
//! r c3 c4     f64 x3
//! dt_bar a    f64 x2
//! boundary    u8       0 = fixed, 1 = periodic
//! stride      u64
//! snapshots   u64
//! per snapshot: t_bar f64, phi f64 x n, phi_dot f64 x n
//! ```

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

use super::{Boundary, LatticeConfig, LatticeState, Trajectory};

pub const MAGIC: &[u8; 6] = b"STWPA1";
pub const CSV_COLUMNS: &str = "t_bar,n,phi,phi_dot";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a trajectory file (bad magic {0:?})")]
    BadMagic([u8; 6]),
    #[error("unknown boundary tag {0}")]
    BadBoundary(u8),
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("inconsistent trajectory: {0}")]
    Inconsistent(String),
}

pub fn write_csv<W: Write>(traj: &Trajectory, header: &[String], mut w: W) -> io::Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{CSV_COLUMNS}")?;
    for s in &traj.snapshots {
        for (n, (p, v)) in s.phi.iter().zip(&s.phi_dot).enumerate() {
            writeln!(w, "{},{n},{p},{v}", s.t_bar)?;
        }
    }
    Ok(())
}

/// Reads the snapshots of a CSV trajectory. The file does not carry the
/// full configuration, so the caller supplies it.
pub fn read_csv<R: BufRead>(config: LatticeConfig, record_stride: usize, r: R) -> Result<Trajectory, FormatError> {
    let mut snapshots: Vec<LatticeState> = Vec::new();
    let mut seen_columns = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let err = |message: String| FormatError::Csv { line: lineno, message };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_columns {
            if line.trim() != CSV_COLUMNS {
                return Err(err(format!("expected column row {CSV_COLUMNS:?}")));
            }
            seen_columns = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", fields.len())));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
        let t = num(fields[0])?;
        let n: usize = fields[1].trim().parse().map_err(|e| err(format!("cell index: {e}")))?;
        let (p, v) = (num(fields[2])?, num(fields[3])?);
        if n == 0 {
            snapshots.push(LatticeState {
                t_bar: t,
                phi: Vec::with_capacity(config.n),
                phi_dot: Vec::with_capacity(config.n),
            });
        }
        let s = snapshots
            .last_mut()
            .filter(|s| s.phi.len() == n && s.t_bar == t)
            .ok_or_else(|| err(format!("cell {n} out of order")))?;
        s.phi.push(p);
        s.phi_dot.push(v);
    }
    finish(config, record_stride, snapshots)
}

fn finish(
    config: LatticeConfig,
    record_stride: usize,
    snapshots: Vec<LatticeState>,
) -> Result<Trajectory, FormatError> {
    if snapshots.is_empty() {
        return Err(FormatError::Inconsistent("no snapshots".into()));
    }
    if let Some(s) = snapshots.iter().find(|s| s.phi.len() != config.n) {
        return Err(FormatError::Inconsistent(format!(
            "snapshot at t_bar = {} has {} cells, expected {}",
            s.t_bar,
            s.phi.len(),
            config.n
        )));
    }
    if snapshots.windows(2).any(|w| w[1].t_bar <= w[0].t_bar) {
        return Err(FormatError::Inconsistent("times are not strictly increasing".into()));
    }
    Ok(Trajectory {
        config,
        record_stride,
        snapshots,
    })
}

fn put_f64<W: Write>(w: &mut W, x: f64) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn put_u64<W: Write>(w: &mut W, x: u64) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

pub fn write_binary<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    let c = &traj.config;
    w.write_all(MAGIC)?;
    put_u64(&mut w, c.n as u64)?;
    for x in [c.r, c.c3, c.c4, c.dt_bar, c.a] {
        put_f64(&mut w, x)?;
    }
    w.write_all(&[match c.boundary {
        Boundary::Fixed => 0,
        Boundary::Periodic => 1,
    }])?;
    put_u64(&mut w, traj.record_stride as u64)?;
    put_u64(&mut w, traj.snapshots.len() as u64)?;
    for s in &traj.snapshots {
        put_f64(&mut w, s.t_bar)?;
        for &x in s.phi.iter().chain(&s.phi_dot) {
            put_f64(&mut w, x)?;
        }
    }
    Ok(())
}

fn get_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Trajectory, FormatError> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let n = get_u64(&mut r)? as usize;
    let mut params = [0.0; 5];
    for x in &mut params {
        *x = get_f64(&mut r)?;
    }
    let [rr, c3, c4, dt_bar, a] = params;
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let boundary = match tag[0] {
        0 => Boundary::Fixed,
        1 => Boundary::Periodic,
        t => return Err(FormatError::BadBoundary(t)),
    };
    let config = LatticeConfig {
        n,
        r: rr,
        c3,
        c4,
        boundary,
        dt_bar,
        a,
    };
    config
        .validate()
        .map_err(|e| FormatError::Inconsistent(e.to_string()))?;
    let stride = get_u64(&mut r)? as usize;
    let count = get_u64(&mut r)? as usize;
    let mut snapshots = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let t_bar = get_f64(&mut r)?;
        let phi = (0..n).map(|_| get_f64(&mut r)).collect::<io::Result<Vec<_>>>()?;
        let phi_dot = (0..n).map(|_| get_f64(&mut r)).collect::<io::Result<Vec<_>>>()?;
        snapshots.push(LatticeState { t_bar, phi, phi_dot });
    }
    finish(config, stride, snapshots)
}

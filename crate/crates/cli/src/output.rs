use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use stwpa::lattice::io::{write_binary, write_csv, CSV_COLUMNS};
use stwpa::{CircuitScales, Trajectory};

use crate::error::CliError;
use crate::manifest::{RunManifest, MANIFEST_FILE};

const SI_TRAJECTORY_COLUMNS: &str = "t_s,x_m,phi,voltage_V";

/// Output directory of one run. Every CSV gets a `#` header naming the
/// subcommand, the manifest digest and the columns.
pub struct RunDir {
    dir: PathBuf,
    subcommand: String,
    version: String,
    digest: String,
    outputs: Vec<String>,
}

impl RunDir {
    pub fn create(dir: PathBuf, manifest: &RunManifest) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
        Ok(Self {
            dir,
            subcommand: manifest.subcommand.clone(),
            version: manifest.version.clone(),
            digest: manifest.digest.clone(),
            outputs: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    fn header(&self, columns: &str) -> Vec<String> {
        vec![
            format!("stwpa {} {}", self.version, self.subcommand),
            format!("manifest sha256:{}", self.digest),
            format!("columns: {columns}"),
        ]
    }

    fn write_file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(path.display(), e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(path.display(), e))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// CSV with the given columns; `rows` writes the data lines.
    pub fn csv(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let columns = columns.join(",");
        let header = self.header(&columns);
        self.write_file(name, |w| {
            for line in &header {
                writeln!(w, "# {line}")?;
            }
            writeln!(w, "{columns}")?;
            rows(w)
        })
    }

    /// Trajectory CSV, dimensionless or converted with `si`.
    pub fn trajectory(&mut self, name: &str, traj: &Trajectory, si: Option<&CircuitScales>) -> Result<(), CliError> {
        match si {
            None => {
                let header = self.header(CSV_COLUMNS);
                self.write_file(name, |w| write_csv(traj, &header, w))
            }
            Some(s) => self.csv(name, &SI_TRAJECTORY_COLUMNS.split(',').collect::<Vec<_>>(), |w| {
                for snap in &traj.snapshots {
                    let t = s.time_si(snap.t_bar);
                    for (n, (p, v)) in snap.phi.iter().zip(&snap.phi_dot).enumerate() {
                        writeln!(w, "{t},{},{p},{}", s.length_si(n as f64), s.cell_voltage(*v))?;
                    }
                }
                Ok(())
            }),
        }
    }

    pub fn binary(&mut self, name: &str, traj: &Trajectory) -> Result<(), CliError> {
        self.write_file(name, |w| write_binary(traj, w))
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.write_file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    /// Writes the manifest with the list of outputs and returns it.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<(PathBuf, Vec<String>), CliError> {
        manifest.outputs = self.outputs.clone();
        self.json(MANIFEST_FILE, &manifest)?;
        Ok((self.dir, self.outputs))
    }
}

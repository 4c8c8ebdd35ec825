//! Output staging: results are rendered fully in memory and written in one
//! pass, so a failing computation never leaves partial files behind.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Staged files plus the lines to print on success.
pub struct OutputSet {
    files: Vec<(String, String)>,
    notes: Vec<String>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self { files: Vec::new(), notes: Vec::new() }
    }

    pub fn stage(&mut self, name: impl Into<String>, content: String) {
        self.files.push((name.into(), content));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Write every staged file under `dir` and print the notes.
    pub fn commit(self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        for (name, content) in &self.files {
            let path: PathBuf = dir.join(name);
            fs::write(&path, content)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        }
        for line in &self.notes {
            println!("{line}");
        }
        if !self.files.is_empty() {
            println!(
                "wrote {} file(s) to {}",
                self.files.len(),
                dir.display()
            );
        }
        Ok(())
    }
}

/// Full-precision float for CSV cells (17 significant digits).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Make a float safe for file names: 2.5 becomes "2p5".
pub fn tag(x: f64) -> String {
    let s = if x == x.trunc() && x.abs() < 1e6 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    };
    s.replace('.', "p").replace('-', "m")
}

/// Log-spaced frequency grid without zero, for Bode tables.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let l0 = lo.log10();
    let l1 = hi.log10();
    (0..points)
        .map(|k| 10f64.powf(l0 + (l1 - l0) * k as f64 / (points - 1) as f64))
        .collect()
}

/// Render a Bode table as `omega,mag_db,phase_deg,re,im`.
pub fn bode_csv(samples: &[adaptctl_core::freqresp::SensitivitySample]) -> String {
    let mut out = String::from("omega,mag_db,phase_deg,re,im\n");
    for s in samples {
        out += &format!(
            "{},{},{},{},{}\n",
            fmt(s.omega),
            fmt(s.mag_db),
            fmt(s.phase_deg),
            fmt(s.value.re),
            fmt(s.value.im)
        );
    }
    out
}

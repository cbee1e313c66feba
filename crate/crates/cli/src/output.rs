use crate::config::Settings;
use eqmeasure::EquilibriumSolution;
use serde::Serialize;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

pub const DENSITY_SCHEMA: &str = "eqmeasure.density/1";
pub const MANIFEST_SCHEMA: &str = "eqmeasure.manifest/1";
pub const DENSITY_POINTS: usize = 1001;

/// Writes artifacts into the output directory and remembers what was written.
pub struct Outputs {
    dir: PathBuf,
    csv: bool,
    json: bool,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: PathBuf, formats: &str) -> io::Result<Self> {
        fs::create_dir_all(&dir)?;
        let has = |f: &str| formats.split(',').any(|s| s.trim().eq_ignore_ascii_case(f));
        Ok(Self {
            dir,
            csv: has("csv"),
            json: has("json"),
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> io::Result<BufWriter<fs::File>> {
        let f = fs::File::create(self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    /// CSV with a schema line and a column header.
    pub fn csv<I>(&mut self, name: &str, schema: &str, header: &str, rows: I) -> io::Result<()>
    where
        I: IntoIterator<Item = String>,
    {
        if !self.csv {
            return Ok(());
        }
        let mut w = self.create(name)?;
        writeln!(w, "# {schema}")?;
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()
    }

    /// Raw CSV from a writer callback; the callback supplies the schema line.
    pub fn csv_with<F>(&mut self, name: &str, f: F) -> io::Result<()>
    where
        F: FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
    {
        if !self.csv {
            return Ok(());
        }
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        if !self.json {
            return Ok(());
        }
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()
    }

    /// x, ρ(x) on uniform points across the support hull.
    pub fn density(&mut self, sol: &EquilibriumSolution) -> io::Result<()> {
        let (lo, hi) = sol.hull();
        let rows = (0..DENSITY_POINTS).map(|i| {
            let x = lo + (hi - lo) * i as f64 / (DENSITY_POINTS - 1) as f64;
            format!("{x},{}", sol.density(x))
        });
        self.csv("density.csv", DENSITY_SCHEMA, "x,density", rows)
    }

    /// Manifest plus a config file that reruns the command. Always written.
    pub fn finish(&mut self, settings: &Settings, error: Option<&str>) -> io::Result<()> {
        fs::write(self.dir.join("run.cfg"), settings.to_file_text())?;
        let manifest = serde_json::json!({
            "schema": MANIFEST_SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "command": settings.command,
            "settings": settings.values,
            "files": self.files,
            "status": if error.is_some() { "failed" } else { "ok" },
            "error": error,
        });
        let mut w = BufWriter::new(fs::File::create(self.dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::{Grid, Wigner};

use super::config::ScenarioConfig;
use super::FORMAT_VERSION;

/// Magic bytes of the binary Wigner format.
pub const MBW_MAGIC: &[u8; 4] = b"MBW1";

/// A bounded quantity with its verdict; NaN never passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisEntry {
    pub name: String,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

impl AnalysisEntry {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            files: Vec::new(),
        }
    }

    pub(crate) fn max(&mut self, key: &str, v: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(v);
        *slot = if v.is_nan() || slot.is_nan() { f64::NAN } else { slot.max(v) };
    }

    pub(crate) fn min(&mut self, key: &str, v: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(v);
        *slot = if v.is_nan() || slot.is_nan() { f64::NAN } else { slot.min(v) };
    }

    /// Records `value <= bound`, keeping the worst value seen under `name`.
    pub(crate) fn check(&mut self, name: &str, value: f64, bound: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.value = if value.is_nan() || c.value.is_nan() { f64::NAN } else { c.value.max(value) };
                c.pass = c.value <= c.bound;
            }
            None => self.checks.push(Check {
                name: name.to_string(),
                value,
                bound,
                pass: value <= bound,
            }),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}

/// Machine-readable summary of one run. Wall time is kept out of it so that
/// reports are byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub format_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub analyses: Vec<AnalysisEntry>,
}

impl RunReport {
    pub fn entry(&self, name: &str) -> Option<&AnalysisEntry> {
        self.analyses.iter().find(|a| a.name == name)
    }

    pub fn passed(&self) -> bool {
        self.analyses.iter().all(AnalysisEntry::passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.analyses
            .iter()
            .flat_map(|a| a.checks.iter().filter(|c| !c.pass).map(move |c| (a.name.as_str(), c)))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Everything a run produces, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: RunReport,
    pub files: Vec<OutputFile>,
}

pub const REPORT_FILE: &str = "report.json";
pub const PLOT_FILE: &str = "plot.gp";

impl RunOutput {
    /// Writes data files, the plot script and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<String>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for f in &self.files {
            std::fs::write(dir.join(&f.name), &f.bytes)?;
            written.push(f.name.clone());
        }
        std::fs::write(dir.join(REPORT_FILE), self.report.to_json())?;
        written.push(REPORT_FILE.to_string());
        Ok(written)
    }
}

/// Column-oriented text table with a `#` header.
pub(crate) struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<(&'static str, &'static str)>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(scenario: &str, quantity: &str, columns: &[(&'static str, &'static str)]) -> Self {
        Self {
            meta: vec![
                ("format".into(), format!("bohmian-table {FORMAT_VERSION}")),
                ("scenario".into(), scenario.into()),
                ("quantity".into(), quantity.into()),
            ],
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn grid(self, g: &Grid) -> Self {
        let text = format!("x_min={} x_max={} n={} dx={}", g.x_min(), g.x_max(), g.n(), g.dx());
        self.meta("grid", text)
    }

    pub fn row(&mut self, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn render(&self) -> Vec<u8> {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let names: Vec<_> = self.columns.iter().map(|c| c.0).collect();
        let units: Vec<_> = self.columns.iter().map(|c| c.1).collect();
        let _ = writeln!(s, "# units: natural (hbar and mass as configured); L = length, E = energy");
        let _ = writeln!(s, "# columns: {}", names.join(" "));
        let _ = writeln!(s, "# column_units: {}", units.join(" "));
        let _ = writeln!(s, "# rows: {}", self.rows.len());
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s.into_bytes()
    }

    pub fn file(&self, name: String) -> OutputFile {
        OutputFile {
            name,
            bytes: self.render(),
        }
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        self.columns.iter().map(|c| c.0).collect()
    }
}

/// `MBW1`, `n_x` and `n_p` as little-endian u64, then `F[x][p]` row-major
/// little-endian f64.
pub fn encode_mbw(w: &Wigner) -> Vec<u8> {
    let n = w.n() as u64;
    let mut out = Vec::with_capacity(20 + 8 * w.values.len());
    out.extend_from_slice(MBW_MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    for v in &w.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`encode_mbw`]: `(n_x, n_p, values)`.
pub fn decode_mbw(bytes: &[u8]) -> Option<(usize, usize, Vec<f64>)> {
    if bytes.len() < 20 || &bytes[..4] != MBW_MAGIC {
        return None;
    }
    let dim = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap()) as usize;
    let (nx, np) = (dim(4), dim(12));
    let body = &bytes[20..];
    if body.len() != nx.checked_mul(np)?.checked_mul(8)? {
        return None;
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Some((nx, np, values))
}

/// Gnuplot script drawing every column of each table against its first.
pub(crate) fn plot_script(tables: &[(String, Vec<&'static str>)], wigner: &[(String, usize)]) -> OutputFile {
    let mut s = String::from("# gnuplot script; run `gnuplot plot.gp` in this directory\nset terminal pngcairo size 900,600\nset key outside\n");
    for (name, cols) in tables {
        let stem = name.trim_end_matches(".dat");
        let _ = writeln!(s, "\nset output '{stem}.png'\nset title '{stem}'\nset xlabel '{}'", cols[0]);
        let parts: Vec<String> = cols
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| format!("'{name}' using 1:{} with lines title '{c}'", i + 1))
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    for (name, n) in wigner {
        let stem = name.trim_end_matches(".mbw");
        let _ = writeln!(
            s,
            "\nset output '{stem}.png'\nset title '{stem}'\nset xlabel 'p index'\nset ylabel 'x index'\nset view map\n\
             splot '{name}' binary skip=20 array=({n},{n}) format='%float64' endian=little with image notitle\nunset view\nunset ylabel"
        );
    }
    OutputFile {
        name: PLOT_FILE.into(),
        bytes: s.into_bytes(),
    }
}

//! CSV tables, SVG line charts and the run manifest.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

/// Text form of a CSV cell; `f64` uses the shortest round-trip form.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:e}")
    }
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for bool {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

impl Cell for &str {
    fn cell(&self) -> String {
        self.to_string()
    }
}

/// Collects rows and writes them in one go.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::cell(&$x)),*]
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn project(v: f64, axis: Axis) -> Option<f64> {
    match axis {
        Axis::Linear => v.is_finite().then_some(v),
        Axis::Log => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

/// Self-contained SVG line chart. Points that cannot be shown on a log axis
/// are dropped.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, axes: (Axis, Axis), series: &[Series]) -> String {
    let (w, h) = (640.0, 420.0);
    let (l, r, t, b) = (70.0, 150.0, 40.0, 50.0);
    let proj: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((project(x, axes.0)?, project(y, axes.1)?)))
                .collect()
        })
        .collect();
    let all = proj.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let sy = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);
    let tick = |v: f64, axis: Axis| match axis {
        Axis::Linear => format!("{v:.3}"),
        Axis::Log => format!("1e{v:.1}"),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - l - r,
        h - t - b
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            sx(xv),
            h - b + 16.0,
            tick(xv, axes.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 6.0,
            sy(yv) + 4.0,
            tick(yv, axes.1)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        l + (w - l - r) / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        t + (h - t - b) / 2.0,
        t + (h - t - b) / 2.0,
        escape(y_label)
    );
    for (i, (pts, ser)) in proj.iter().zip(series).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = t + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - r + 10.0,
            w - r + 30.0,
            w - r + 36.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Files written by one run, in order.
#[derive(Default)]
pub struct Emitted {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Emitted {
    pub fn new(dir: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Emitted {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn table(&mut self, name: &str, table: &Table) -> io::Result<()> {
        let p = self.dir.join(name);
        table.write(&p)?;
        self.files.push(p);
        Ok(())
    }

    pub fn text(&mut self, name: &str, content: &str) -> io::Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, content)?;
        self.files.push(p);
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Plain-text manifest: tool version, command, wall time, checksums of the
/// emitted files and the fully resolved configuration.
pub fn write_manifest(out: &Emitted, command: &str, wall_seconds: f64, threads: usize, config_toml: &str) -> io::Result<PathBuf> {
    let mut s = String::new();
    let _ = writeln!(s, "tool = frictionlab {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "command = {command}");
    let _ = writeln!(s, "threads = {threads}");
    let _ = writeln!(s, "wall_seconds = {wall_seconds:.3}");
    let _ = writeln!(s, "\n[files]");
    for f in &out.files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = writeln!(s, "{}  {name}", sha256_file(f)?);
    }
    let _ = writeln!(s, "\n[config]");
    s.push_str(config_toml);
    let p = out.dir.join("manifest.txt");
    std::fs::write(&p, s)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300, 0.0] {
            assert_eq!(v.cell().parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn chart_skips_nonpositive_points_on_log_axes() {
        let s = line_chart(
            "t",
            "x",
            "y",
            (Axis::Log, Axis::Log),
            &[Series {
                label: "a<b".into(),
                points: vec![(0.0, 1.0), (1.0, 1.0), (10.0, 100.0)],
            }],
        );
        assert!(s.starts_with("<svg"));
        assert!(s.contains("a&lt;b"));
        let poly = s.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
    }

    #[test]
    fn digest_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        std::fs::write(&p, b"abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

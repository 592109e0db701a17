//! CSV tables, self-contained SVG plots and the run manifest.
//!
//! Numbers are written with Rust's shortest round-trip formatting so that
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// I/O failure, kept distinct so the front end can map it to its own exit code.
#[derive(Debug)]
pub struct IoFailure {
    pub path: PathBuf,
    pub source: std::io::Error,
}

impl std::fmt::Display for IoFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "I/O error on {}: {}", self.path.display(), self.source)
    }
}

impl std::error::Error for IoFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> anyhow::Error {
    IoFailure { path: path.to_path_buf(), source }.into()
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path, e)
    })
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| fmt_num(*v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Linear,
    Log,
}

impl Axis {
    fn map(self, v: f64) -> f64 {
        match self {
            Axis::Linear => v,
            Axis::Log => v.log10(),
        }
    }
}

/// A small SVG canvas with a data-space viewport.
pub struct Svg {
    width: f64,
    height: f64,
    margin: f64,
    x: (f64, f64),
    y: (f64, f64),
    x_axis: Axis,
    y_axis: Axis,
    body: String,
    title: String,
}

impl Svg {
    pub fn new(title: &str, x: (f64, f64), y: (f64, f64), x_axis: Axis, y_axis: Axis) -> Self {
        let fix = |(lo, hi): (f64, f64), axis: Axis| {
            let (lo, hi) = (axis.map(lo), axis.map(hi));
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, lo + 0.5)
            }
        };
        Self {
            width: 640.0,
            height: 480.0,
            margin: 60.0,
            x: fix(x, x_axis),
            y: fix(y, y_axis),
            x_axis,
            y_axis,
            body: String::new(),
            title: title.to_string(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let (x, y) = (self.x_axis.map(x), self.y_axis.map(y));
        let w = self.width - 2.0 * self.margin;
        let h = self.height - 2.0 * self.margin;
        (
            self.margin + (x - self.x.0) / (self.x.1 - self.x.0) * w,
            self.height - self.margin - (y - self.y.0) / (self.y.1 - self.y.0) * h,
        )
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (a, b) = self.px(x, y);
                format!("{a:.2},{b:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let p = self.points(pts);
        let _ = writeln!(self.body, r#"<polyline fill="none" stroke="{stroke}" stroke-width="1.5" points="{p}"/>"#);
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], fill: &str) {
        let p = self.points(pts);
        let _ = writeln!(
            self.body,
            r#"<polygon fill="{fill}" fill-opacity="0.35" stroke="{fill}" stroke-width="1" points="{p}"/>"#
        );
    }

    pub fn marker(&mut self, x: f64, y: f64, color: &str, label: Option<&str>) {
        if !(x.is_finite() && y.is_finite()) {
            return;
        }
        let (a, b) = self.px(x, y);
        let _ = writeln!(self.body, r#"<circle cx="{a:.2}" cy="{b:.2}" r="3.5" fill="{color}"/>"#);
        if let Some(text) = label {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">{}</text>"#,
                a + 5.0,
                b - 5.0,
                escape(text)
            );
        }
    }

    pub fn render(&self, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        if let Some(ts) = timestamp {
            let _ = writeln!(out, "<!-- generated {} -->", escape(ts));
        }
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (l, r, t, b) = (self.margin, self.width - self.margin, self.margin, self.height - self.margin);
        let _ = writeln!(
            out,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        let tick = |v: f64, axis: Axis| match axis {
            Axis::Linear => format!("{v:.3}"),
            Axis::Log => format!("1e{v:.1}"),
        };
        let _ = writeln!(
            out,
            r#"<text x="{l}" y="{}" font-size="11">{}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            b + 16.0,
            tick(self.x.0, self.x_axis),
            r,
            b + 16.0,
            tick(self.x.1, self.x_axis)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{b}" font-size="11" text-anchor="end">{}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            l - 4.0,
            tick(self.y.0, self.y_axis),
            l - 4.0,
            t + 10.0,
            tick(self.y.1, self.y_axis)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            self.width / 2.0,
            t - 20.0,
            escape(&self.title)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Data range of a set of values, padded by 5 %.
pub fn padded_range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-12 * lo.abs().max(1.0));
    (lo - pad, hi + pad)
}

/// Output directory plus the list of files written so far.
pub struct Emitter {
    dir: PathBuf,
    timestamp: Option<String>,
    files: Vec<(String, String)>,
}

impl Emitter {
    pub fn new(dir: &Path, timestamp: Option<String>) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), timestamp, files: Vec::new() })
    }

    pub fn timestamp(&self) -> Option<&str> {
        self.timestamp.as_deref()
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        write_atomic(&self.dir.join(name), contents.as_bytes())
            .with_context(|| format!("writing {name}"))?;
        self.files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, csv: &Csv) -> anyhow::Result<()> {
        self.write(name, &csv.render())
    }

    pub fn svg(&mut self, name: &str, svg: &Svg) -> anyhow::Result<()> {
        let text = svg.render(self.timestamp.as_deref());
        self.write(name, &text)
    }

    /// Writes `manifest.json` describing the run and every file written.
    pub fn manifest(&mut self, subcommand: &str, config_text: &str, body: Value) -> anyhow::Result<()> {
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|(name, hash)| json!({ "file": name, "sha256": hash }))
            .collect();
        let mut manifest = json!({
            "tool": "lpspectra",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "config_sha256": sha256_hex(config_text.as_bytes()),
            "outputs": files,
        });
        let map = manifest.as_object_mut().expect("manifest is an object");
        if let Value::Object(extra) = body {
            map.extend(extra);
        }
        if let Some(ts) = &self.timestamp {
            map.insert("timestamp".into(), Value::String(ts.clone()));
        }
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        write_atomic(&self.dir.join("manifest.json"), text.as_bytes())
    }
}

/// Seconds since the Unix epoch, as a manifest timestamp.
pub fn now_stamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

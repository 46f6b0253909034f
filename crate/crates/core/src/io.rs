//! Dataset files: point clouds, surface sweeps and Θ curves as CSV with a
//! `#`-prefixed JSON manifest, and hulls as JSON.
//!
//! Floats are written in shortest round-trip form, rows end in `\n`, and the
//! manifest stores a SHA-256 of the data section (header row plus rows), so
//! identical inputs give byte-identical files and edits are detected on read.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{ConvexHull3, HullKind};
use crate::types::ExpectationPoint;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata block at the top of every CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub model_tag: String,
    pub axes: Vec<String>,
    /// Seeds, grids, sizes and other generator settings, keyed by name.
    #[serde(default)]
    pub generator: Map<String, Value>,
    pub tool_version: String,
    /// Wall-clock creation time; not covered by the hash and omitted unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    /// Grid cells or samples that could not be evaluated.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default)]
    pub content_hash: String,
}

impl DatasetManifest {
    pub fn new(model_tag: impl Into<String>, axes: &[&str]) -> Self {
        Self {
            model_tag: model_tag.into(),
            axes: axes.iter().map(|s| s.to_string()).collect(),
            generator: Map::new(),
            tool_version: TOOL_VERSION.to_string(),
            created: None,
            failures: Vec::new(),
            content_hash: String::new(),
        }
    }

    /// Adds a generator setting.
    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("generator values are plain data");
        self.generator.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.generator.get(key)
    }
}

/// Where a cloud point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Random,
    Oracle,
    Sweep,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Random => "random",
            Source::Oracle => "oracle",
            Source::Sweep => "sweep",
        }
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(Source::Random),
            "oracle" => Ok(Source::Oracle),
            "sweep" => Ok(Source::Sweep),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

/// One CSV row: a point, the optional fourth observable used by Θ scans,
/// and its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub point: ExpectationPoint,
    pub y: Option<f64>,
    pub source: Source,
}

impl CloudPoint {
    pub fn new(point: ExpectationPoint, source: Source) -> Self {
        Self { point, y: None, source }
    }

    pub fn with_y(point: ExpectationPoint, y: f64, source: Source) -> Self {
        Self { point, y: Some(y), source }
    }

    /// `(a, b, c, y)` with a missing `y` read as zero.
    pub fn quad(&self) -> [f64; 4] {
        [self.point.a, self.point.b, self.point.c, self.y.unwrap_or(0.0)]
    }
}

/// SHA-256 of a data section, hex encoded.
pub fn content_hash(data: &str) -> String {
    hex::encode(Sha256::digest(data.as_bytes()))
}

fn render(manifest: &DatasetManifest, data: &str) -> String {
    let mut m = manifest.clone();
    m.content_hash = content_hash(data);
    let json = serde_json::to_string_pretty(&m).expect("manifest serializes");
    let mut out = String::with_capacity(json.len() + data.len() + 64);
    for line in json.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(data);
    out
}

/// Splits a file into its manifest and data section, checking the hash.
fn split(text: &str) -> Result<(DatasetManifest, &str, usize)> {
    let mut json = String::new();
    let mut offset = 0;
    let mut lines = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix('#') else { break };
        json.push_str(rest.strip_prefix(' ').unwrap_or(rest));
        offset += line.len();
        lines += 1;
    }
    if lines == 0 {
        return Err(Error::Parse { line: 1, msg: "missing `#` manifest block".into() });
    }
    let manifest: DatasetManifest =
        serde_json::from_str(&json).map_err(|e| Error::Parse { line: e.line(), msg: format!("manifest: {e}") })?;
    let data = &text[offset..];
    let computed = content_hash(data);
    if computed != manifest.content_hash {
        return Err(Error::Integrity { stored: manifest.content_hash, computed });
    }
    Ok((manifest, data, lines))
}

fn parse_f64(field: &str, line: usize, column: &str) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse { line, msg: format!("column `{column}`: cannot parse `{field}`") })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Serializes a cloud to its file contents. Either every point carries `y`
/// or none does.
pub fn render_cloud(points: &[CloudPoint], manifest: &DatasetManifest) -> Result<String> {
    render_cloud_columns(points, manifest, points.first().is_some_and(|p| p.y.is_some()))
}

/// [`render_cloud`] with the `y` column chosen explicitly, so that an empty
/// cloud can still declare it.
pub fn render_cloud_columns(points: &[CloudPoint], manifest: &DatasetManifest, with_y: bool) -> Result<String> {
    if points.iter().any(|p| p.y.is_some() != with_y) {
        return Err(Error::Schema("the `y` column must be present on all rows or none".into()));
    }
    let mut data = String::from(if with_y { "a,b,c,y,source\n" } else { "a,b,c,source\n" });
    for p in points {
        let q = p.point;
        write!(data, "{:?},{:?},{:?},", q.a, q.b, q.c).unwrap();
        if let Some(y) = p.y {
            write!(data, "{y:?},").unwrap();
        }
        data.push_str(p.source.as_str());
        data.push('\n');
    }
    Ok(render(manifest, &data))
}

/// Parses file contents produced by [`render_cloud`].
pub fn parse_cloud(text: &str) -> Result<(Vec<CloudPoint>, DatasetManifest)> {
    let (manifest, data, skipped) = split(text)?;
    let mut rows = data.lines().enumerate().map(|(k, l)| (k + skipped + 1, l));
    let (header_line, header) = rows.next().ok_or(Error::Parse { line: skipped + 1, msg: "missing header row".into() })?;
    let with_y = match header {
        "a,b,c,source" => false,
        "a,b,c,y,source" => true,
        other => return Err(Error::Parse { line: header_line, msg: format!("unexpected header `{other}`") }),
    };
    let names: &[&str] = if with_y { &["a", "b", "c", "y"] } else { &["a", "b", "c"] };
    let mut points = Vec::new();
    for (line, row) in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != names.len() + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", names.len() + 1, fields.len()),
            });
        }
        let mut v = [0.0; 4];
        for (k, name) in names.iter().enumerate() {
            v[k] = parse_f64(fields[k], line, name)?;
        }
        let source = fields[names.len()].parse().map_err(|msg| Error::Parse { line, msg })?;
        let point = ExpectationPoint::new(v[0], v[1], v[2]);
        points.push(CloudPoint { point, y: with_y.then_some(v[3]), source });
    }
    Ok((points, manifest))
}

pub fn write_cloud(points: &[CloudPoint], manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &render_cloud(points, manifest)?)
}

pub fn write_cloud_columns(
    points: &[CloudPoint],
    manifest: &DatasetManifest,
    with_y: bool,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_text(path.as_ref(), &render_cloud_columns(points, manifest, with_y)?)
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<(Vec<CloudPoint>, DatasetManifest)> {
    parse_cloud(&fs::read_to_string(path)?)
}

/// A `(Θ, d_max)` curve with its manifest.
pub fn write_curve(curve: &[(f64, f64)], manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    let mut data = String::from("theta,d_max\n");
    for (t, d) in curve {
        writeln!(data, "{t:?},{d:?}").unwrap();
    }
    write_text(path.as_ref(), &render(manifest, &data))
}

pub fn read_curve(path: impl AsRef<Path>) -> Result<(Vec<(f64, f64)>, DatasetManifest)> {
    let text = fs::read_to_string(path)?;
    let (manifest, data, skipped) = split(&text)?;
    let mut rows = data.lines().enumerate().map(|(k, l)| (k + skipped + 1, l));
    match rows.next() {
        Some((_, "theta,d_max")) => {}
        Some((line, other)) => return Err(Error::Parse { line, msg: format!("unexpected header `{other}`") }),
        None => return Err(Error::Parse { line: skipped + 1, msg: "missing header row".into() }),
    }
    let mut curve = Vec::new();
    for (line, row) in rows {
        let (t, d) = row.split_once(',').ok_or(Error::Parse { line, msg: "expected 2 fields".into() })?;
        curve.push((parse_f64(t, line, "theta")?, parse_f64(d, line, "d_max")?));
    }
    Ok((curve, manifest))
}

/// JSON layout of a hull file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullFile {
    pub kind: HullKind,
    pub degenerate: bool,
    pub vertices: Vec<[f64; 3]>,
    pub facets: Vec<[usize; 3]>,
    pub edges: Vec<(usize, usize)>,
}

impl From<&ConvexHull3> for HullFile {
    fn from(h: &ConvexHull3) -> Self {
        Self {
            kind: h.kind,
            degenerate: h.is_degenerate(),
            vertices: h.vertices.iter().map(|v| v.to_array()).collect(),
            facets: h.facets.clone(),
            edges: h.edges.clone(),
        }
    }
}

pub fn render_hull(hull: &ConvexHull3) -> String {
    let mut s = serde_json::to_string_pretty(&HullFile::from(hull)).expect("hull serializes");
    s.push('\n');
    s
}

pub fn write_hull(hull: &ConvexHull3, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &render_hull(hull))
}

pub fn read_hull(path: impl AsRef<Path>) -> Result<HullFile> {
    let text = fs::read_to_string(path)?;
    let file: HullFile = serde_json::from_str(&text)?;
    let n = file.vertices.len();
    let bad = file.facets.iter().flatten().chain(file.edges.iter().flat_map(|(i, j)| [i, j])).any(|&i| i >= n);
    if bad {
        return Err(Error::Schema("hull index out of range".into()));
    }
    Ok(file)
}

/// Writes any serializable report as pretty JSON with a trailing newline.
pub fn write_json(value: &impl Serialize, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path.as_ref(), &s)
}

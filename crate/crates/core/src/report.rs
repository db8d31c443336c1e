//! Run configuration and deterministic JSON/CSV artifacts.
//!
//! Every artifact carries the [`RunConfig`] it was produced with: JSON
//! files wrap the payload in an [`Artifact`], CSV files start with `#`
//! comment lines holding the configuration as JSON. Floats are written with
//! 17 significant digits so a fixed configuration gives byte-identical files.
//!
//! ```
//! use henon_morse::report::{parse_domain, RunConfig};
//!
//! let config = RunConfig {
//!     alpha: 2.0,
//!     p: 3.0,
//!     nodal: 2,
//!     domain: parse_domain("annulus:1:2")?,
//!     ..RunConfig::default()
//! };
//! config.validate()?;
//! assert!(parse_domain("annulus:2:1").is_err());
//! # Ok::<(), henon_morse::Error>(())
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::{Tolerances, DEFAULT_GRID_POINTS};
use crate::domain::{Domain, RadialGrid, RadialProfile};
use crate::spectral::ModeSpectrum;
use crate::{Error, Result};

/// Smallest grid a run may request.
pub const MIN_GRID_POINTS: usize = 16;

/// Seed written into every artifact; also seeds random test functions.
pub const DEFAULT_SEED: u64 = crate::verify::TEST_FUNCTION_SEED;

/// Parameters of one command, embedded in every artifact it writes.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub alpha: f64,
    pub p: f64,
    pub nodal: usize,
    pub domain: Domain,
    pub points: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            alpha: 0.0,
            p: 3.0,
            nodal: 1,
            domain: Domain::unit_ball(),
            points: DEFAULT_GRID_POINTS,
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "alpha must be ≥ 0"));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::param("p", "p must be > 1"));
        }
        if self.nodal == 0 {
            return Err(Error::param("nodal", "nodal must be ≥ 1"));
        }
        if self.points < MIN_GRID_POINTS {
            return Err(Error::param(
                "grid",
                format!("grid must have ≥ {MIN_GRID_POINTS} points, got {}", self.points),
            ));
        }
        self.tolerances.validate()
    }
}

/// Parses `ball`, `ball:R` or `annulus:RIN:ROUT`.
pub fn parse_domain(spec: &str) -> Result<Domain> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let number = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::Parse {
            context: format!("domain `{spec}`"),
            reason: format!("`{s}` is not a number"),
        })
    };
    match parts.as_slice() {
        ["ball"] => Ok(Domain::unit_ball()),
        ["ball", r] => Domain::ball(number(r)?),
        ["annulus", inner, outer] => {
            let (inner, outer) = (number(inner)?, number(outer)?);
            if !(inner < outer) {
                return Err(Error::InvalidDomain("inner < outer required".into()));
            }
            Domain::annulus(inner, outer)
        }
        _ => Err(Error::Parse {
            context: format!("domain `{spec}`"),
            reason: "expected `ball`, `ball:R` or `annulus:RIN:ROUT`".into(),
        }),
    }
}

/// Inverse of [`parse_domain`].
pub fn format_domain(domain: &Domain) -> String {
    if domain.is_ball() {
        if domain.outer_radius() == 1.0 {
            "ball".into()
        } else {
            format!("ball:{}", domain.outer_radius())
        }
    } else {
        format!("annulus:{}:{}", domain.inner_radius(), domain.outer_radius())
    }
}

/// Float with 17 significant digits, the form used in every artifact.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON layout with floats written by [`format_real`].
struct ReportFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Deterministic JSON text: struct fields in declaration order, map keys
/// sorted, floats with 17 significant digits, non-finite floats as `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let formatter = ReportFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut serializer).map_err(|e| Error::Parse {
        context: "json serialization".into(),
        reason: e.to_string(),
    })?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// A payload with the configuration that produced it.
#[derive(Debug, Clone, SerializeDerive, Deserialize)]
pub struct Artifact<T> {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub report: T,
}

impl<T> Artifact<T> {
    pub fn new(config: &RunConfig, report: T) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            report,
        }
    }
}

/// Rows of a CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// CSV text with the configuration in leading `#` lines.
    pub fn render(&self, config: &RunConfig) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} {}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        ));
        let json = serde_json::to_string(config).map_err(|e| Error::Parse {
            context: "config serialization".into(),
            reason: e.to_string(),
        })?;
        out.push_str(&format!("# config: {json}\n"));
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// `r,u,du` rows of a profile.
pub fn profile_table(profile: &RadialProfile) -> CsvTable {
    let mut table = CsvTable::new(&["r", "u", "du"]);
    for ((r, u), du) in profile
        .grid
        .nodes()
        .iter()
        .zip(&profile.values)
        .zip(&profile.derivatives)
    {
        table.push(vec![format_real(*r), format_real(*u), format_real(*du)]);
    }
    table
}

/// `k,index,lambda` rows, one per computed eigenvalue.
pub fn spectrum_table(spectra: &[ModeSpectrum]) -> CsvTable {
    let mut table = CsvTable::new(&["k", "index", "lambda"]);
    for spectrum in spectra {
        for (index, lambda) in spectrum.eigenvalues.iter().enumerate() {
            table.push(vec![
                spectrum.mode.to_string(),
                index.to_string(),
                format_real(*lambda),
            ]);
        }
    }
    table
}

/// `k,lambda1` rows: the lowest eigenvalue per mode.
pub fn lowest_eigenvalue_table(spectra: &[ModeSpectrum]) -> CsvTable {
    let mut table = CsvTable::new(&["k", "lambda1"]);
    for spectrum in spectra {
        table.push(vec![spectrum.mode.to_string(), format_real(spectrum.lowest())]);
    }
    table
}

/// Output format of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// What [`emit_report`] can write.
pub enum Payload<'a, T: Serialize> {
    Json(&'a T),
    Csv(&'a CsvTable),
}

impl<T: Serialize> Payload<'_, T> {
    pub fn format(&self) -> Format {
        match self {
            Payload::Json(_) => Format::Json,
            Payload::Csv(_) => Format::Csv,
        }
    }
}

/// Renders `payload` with `config` embedded.
pub fn render<T: Serialize>(payload: &Payload<'_, T>, config: &RunConfig) -> Result<String> {
    match payload {
        Payload::Json(value) => to_json(&Artifact::new(config, value)),
        Payload::Csv(table) => table.render(config),
    }
}

/// Writes `payload` to `path`, creating parent directories.
pub fn emit_report<T: Serialize>(payload: &Payload<'_, T>, config: &RunConfig, path: &Path) -> Result<()> {
    let text = render(payload, config)?;
    write_file(path, &text)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    let io_error = |source| Error::Io {
        context: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_error)?;
    }
    fs::write(path, text).map_err(io_error)
}

/// A profile read back from an `r,u,du` CSV.
#[derive(Debug, Clone)]
pub struct ProfileFile {
    pub config: Option<RunConfig>,
    pub profile: RadialProfile,
}

/// Reads a profile CSV. The domain and weight come from the embedded
/// configuration when present; `alpha` and `domain` override them.
pub fn read_profile(path: &Path, alpha: Option<f64>, domain: Option<Domain>) -> Result<ProfileFile> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        context: path.to_path_buf(),
        source,
    })?;
    parse_profile(&text, &path.display().to_string(), alpha, domain)
}

/// [`read_profile`] on text; `context` names the source in errors.
pub fn parse_profile(
    text: &str,
    context: &str,
    alpha: Option<f64>,
    domain: Option<Domain>,
) -> Result<ProfileFile> {
    let malformed = |line: usize, reason: String| Error::Parse {
        context: format!("{context}:{line}"),
        reason,
    };
    let mut config: Option<RunConfig> = None;
    let mut header_seen = false;
    let (mut r, mut u, mut du) = (Vec::new(), Vec::new(), Vec::new());
    for (number, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(json) = comment.trim().strip_prefix("config:") {
                config = Some(
                    serde_json::from_str(json.trim())
                        .map_err(|e| malformed(number, format!("bad config line: {e}")))?,
                );
            }
            continue;
        }
        if !header_seen {
            let columns: Vec<&str> = line.split(',').map(str::trim).collect();
            if columns != ["r", "u", "du"] {
                return Err(malformed(number, format!("expected header `r,u,du`, got `{line}`")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| malformed(number, e.to_string()))?;
        if fields.len() != 3 {
            return Err(malformed(number, format!("expected 3 columns, got {}", fields.len())));
        }
        r.push(fields[0]);
        u.push(fields[1]);
        du.push(fields[2]);
    }
    if r.is_empty() {
        return Err(malformed(0, "no data rows".into()));
    }
    let domain = domain
        .or(config.as_ref().map(|c| c.domain))
        .unwrap_or_else(Domain::unit_ball);
    let alpha = alpha.or(config.as_ref().map(|c| c.alpha)).unwrap_or(0.0);
    let grid = RadialGrid::from_nodes(domain, r)?;
    let profile = RadialProfile::new(grid, u, du, alpha)?;
    Ok(ProfileFile { config, profile })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_round_trip() {
        for spec in ["ball", "ball:2", "annulus:1:2", "annulus:0.5:3"] {
            let d = parse_domain(spec).unwrap();
            assert_eq!(parse_domain(&format_domain(&d)).unwrap(), d);
        }
    }

    #[test]
    fn domain_errors_name_the_problem() {
        let err = parse_domain("annulus:2:1").unwrap_err().to_string();
        assert!(err.contains("inner < outer required"), "{err}");
        assert!(parse_domain("disk").is_err());
        assert!(parse_domain("annulus:a:2").is_err());
    }

    #[test]
    fn validation_messages() {
        let bad = |c: RunConfig| c.validate().unwrap_err().to_string();
        assert!(bad(RunConfig { alpha: -1.0, ..Default::default() }).contains("alpha must be ≥ 0"));
        assert!(bad(RunConfig { p: 1.0, ..Default::default() }).contains("p must be > 1"));
        assert!(bad(RunConfig { points: 8, ..Default::default() }).contains("≥ 16"));
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn floats_carry_17_digits() {
        let json = to_json(&vec![0.1f64, 1.0 / 3.0, f64::NAN]).unwrap();
        assert!(json.contains("1.0000000000000001e-1"), "{json}");
        assert!(json.contains("3.3333333333333331e-1"), "{json}");
        assert!(json.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[1], Some(1.0 / 3.0));
    }

    #[test]
    fn profile_csv_round_trip() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 32).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|r| 1.0 - r * r).collect();
        let derivatives: Vec<f64> = grid.nodes().iter().map(|r| -2.0 * r).collect();
        let profile = RadialProfile::new(grid, values, derivatives, 2.0).unwrap();
        let config = RunConfig { alpha: 2.0, ..Default::default() };
        let text = profile_table(&profile).render(&config).unwrap();
        let back = parse_profile(&text, "memory", None, None).unwrap();
        assert_eq!(back.config.as_ref(), Some(&config));
        assert_eq!(back.profile.values, profile.values);
        assert_eq!(back.profile.derivatives, profile.derivatives);
        assert!(back.profile.grid.same_nodes(&profile.grid));
        assert_eq!(back.profile.alpha, 2.0);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(parse_profile("r,u,du\n1,2\n", "x", None, None).is_err());
        assert!(parse_profile("a,b,c\n", "x", None, None).is_err());
        assert!(parse_profile("# nothing\n", "x", None, None).is_err());
    }
}

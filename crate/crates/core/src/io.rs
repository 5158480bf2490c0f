//! File formats and canonical JSON output.
//!
//! Every JSON document written by this crate has its object keys sorted and
//! every float printed with 17 significant digits, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::coupling::DisplacementSets;
use crate::error::{Error, Result};
use crate::measures::{BVPotential, Breakpoint, IntervalUnion, Measure1D, Piece};
use crate::potentials::RhoConfig;

/// Pretty printer that writes floats in scientific notation with 17
/// significant digits.
struct Canonical<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for Canonical<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

/// Canonical JSON text of `value` (sorted keys, fixed float format).
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // Going through `Value` sorts the keys: its maps are ordered.
    let tree = serde_json::to_value(value).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Canonical { pretty: PrettyFormatter::new() });
    tree.serialize(&mut ser).map_err(|e| Error::Invalid(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = to_canonical_json(value)?;
    std::fs::write(path.as_ref(), text).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    parse_json(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub pieces: Vec<Piece>,
}

/// Parses `{"pieces": [{"a", "b", "density"}, ...]}` into a probability
/// measure, reporting the first violated invariant.
pub fn parse_measure(text: &str) -> Result<Measure1D> {
    let file: MeasureFile = parse_json(text)?;
    Measure1D::from_pieces(file.pieces)
}

pub fn read_measure(path: impl AsRef<Path>) -> Result<Measure1D> {
    parse_measure(&read_text(path)?)
}

pub fn measure_file(m: &Measure1D) -> MeasureFile {
    MeasureFile { pieces: m.pieces().to_vec() }
}

/// Output of the `winf` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinfReport {
    pub lambda_c: f64,
    pub m_plus: IntervalUnion,
    pub m_minus: IntervalUnion,
}

impl WinfReport {
    pub fn new(lambda_c: f64, sets: Option<&DisplacementSets>) -> Self {
        match sets {
            Some(s) => Self { lambda_c, m_plus: s.m_plus.clone(), m_minus: s.m_minus.clone() },
            None => Self { lambda_c, m_plus: IntervalUnion::empty(), m_minus: IntervalUnion::empty() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakpointRecord {
    pub x: f64,
    pub value_right: f64,
    pub slope_right: f64,
    /// `f(x) − f(x−)`; informational, ignored on input.
    #[serde(default)]
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialRecord {
    pub left_value: f64,
    pub breakpoints: Vec<BreakpointRecord>,
}

impl From<&BVPotential> for PotentialRecord {
    fn from(f: &BVPotential) -> Self {
        Self {
            left_value: f.left_value(),
            breakpoints: f
                .breakpoints()
                .iter()
                .map(|b| BreakpointRecord { x: b.x, value_right: b.value, slope_right: b.slope, jump: f.jump_at(b.x) })
                .collect(),
        }
    }
}

impl TryFrom<&PotentialRecord> for BVPotential {
    type Error = Error;
    fn try_from(r: &PotentialRecord) -> Result<Self> {
        let bps =
            r.breakpoints.iter().map(|b| Breakpoint { x: b.x, value: b.value_right, slope: b.slope_right }).collect();
        BVPotential::from_breakpoints(r.left_value, bps)
    }
}

/// Output of the `potentials` command, input of `verify-dual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialsFile {
    pub lambda_c: f64,
    pub rho_config: RhoConfig,
    pub phi: PotentialRecord,
    pub psi: PotentialRecord,
}

impl PotentialsFile {
    pub fn potentials(&self) -> Result<(BVPotential, BVPotential)> {
        Ok(((&self.phi).try_into()?, (&self.psi).try_into()?))
    }
}

/// CSV with columns `x,phi,psi` sampled at `xs`.
pub fn potentials_csv(phi: &BVPotential, psi: &BVPotential, xs: &[f64]) -> String {
    let mut out = String::from("x,phi,psi\n");
    for &x in xs {
        writeln!(out, "{x:.16e},{:.16e},{:.16e}", phi.eval(x), psi.eval(x)).expect("writing to a String");
    }
    out
}

/// `count + 1` evenly spaced points covering `[lo − margin, hi + margin]`.
pub fn plot_grid(lo: f64, hi: f64, margin: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = (lo - margin, hi + margin);
    let count = count.max(1);
    (0..=count).map(|k| lo + (hi - lo) * k as f64 / count as f64).collect()
}

/// Output of the `oracle` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub bottleneck: f64,
    pub sorted_bottleneck: f64,
    pub threshold_bottleneck: f64,
    pub method_agreement: bool,
    pub lambda_c: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

//! Artifact writers: JSON with fixed-precision floats, CSV tables and the
//! boundary SVG.

use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use spectral_mirror::functional::ArcSet;
use spectral_mirror::geometry::DomainSpec;

pub const SCHEMA: &str = "spectral-mirror/1";

/// Pretty printing with every float written as `{:.16e}`, i.e. 17 significant
/// digits, so identical runs give identical bytes.
struct Fixed17(PrettyFormatter<'static>);

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn json(value: &Value) -> String {
    use serde::Serialize;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Non-finite floats become `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn arcs(set: &ArcSet) -> Value {
    Value::Array(set.arcs.iter().map(|&(a, b)| nums(&[a, b])).collect())
}

pub fn csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// `d` attribute for the boundary piece `[s0, s1]`, sampled finely enough
/// that arcs look round and through every corner inside it.
fn path(domain: &DomainSpec, s0: f64, s1: f64, map: &impl Fn([f64; 2]) -> (f64, f64)) -> String {
    let samples = (((s1 - s0) / domain.perimeter() * 720.0).ceil() as usize).max(1);
    let mut at: Vec<f64> = (0..=samples).map(|i| s0 + (s1 - s0) * i as f64 / samples as f64).collect();
    let mut corner = 0.0;
    for seg in domain.segments() {
        corner += seg.length();
        if corner > s0 && corner < s1 {
            at.push(corner);
        }
    }
    at.sort_by(f64::total_cmp);
    let mut d = String::new();
    for (i, s) in at.into_iter().enumerate() {
        let (x, y) = map(domain.point_at(s).0);
        d.push_str(&format!("{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" }));
    }
    d
}

/// `domain` outline in a thin stroke with `gamma` drawn bold on top.
pub fn svg(domain: &DomainSpec, gamma: &ArcSet, note: Option<&str>) -> String {
    let (lo, hi) = domain.bounding_box();
    let scale = (SIZE - 2.0 * MARGIN) / (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let width = 2.0 * MARGIN + scale * (hi[0] - lo[0]);
    let height = 2.0 * MARGIN + scale * (hi[1] - lo[1]);
    // SVG y grows downwards
    let map = |p: [f64; 2]| (MARGIN + scale * (p[0] - lo[0]), MARGIN + scale * (hi[1] - p[1]));
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.3} {height:.3}\">\n"
    );
    out.push_str(&format!("<title>{domain}</title>\n"));
    if let Some(note) = note {
        out.push_str(&format!("<desc>{note}</desc>\n"));
    }
    let outline = path(domain, 0.0, domain.perimeter(), &map);
    out.push_str(&format!(
        "<path d=\"{outline} Z\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    for &(a, b) in &gamma.arcs {
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"5\" stroke-linecap=\"butt\"/>\n",
            path(domain, a, b, &map)
        ));
    }
    out.push_str("</svg>\n");
    out
}

//! Report assembly and byte-stable serialization.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use maslov_core::linalg::C64;
use maslov_core::Tolerances;

use crate::spec::SPEC_VERSION;

const ROOT_LABELS: [&str; 4] = ["1", "i", "-1", "-i"];

/// A phase with its nearest fourth root of unity and the distance to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledPhase {
    pub name: String,
    pub re: f64,
    pub im: f64,
    pub nearest_fourth_root: &'static str,
    pub residual: f64,
    /// Whether the residual is within phase_tol, i.e. the label is exact.
    pub exact: bool,
}

impl LabeledPhase {
    pub fn new(name: impl Into<String>, z: C64, tol: &Tolerances) -> Self {
        let (k, residual) = (0..4)
            .map(|k| (k, (z - maslov_core::linalg::i_pow(k)).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four candidates");
        Self {
            name: name.into(),
            re: z.re,
            im: z.im,
            nearest_fourth_root: ROOT_LABELS[k as usize],
            residual,
            exact: residual <= tol.phase_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    /// Non-gating assertions are diagnostics and do not affect the exit code.
    pub gating: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub spec_version: &'static str,
    pub convention_ledger: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub phases: Vec<LabeledPhase>,
    pub assertions: Vec<Assertion>,
    pub sampling: Value,
    pub pass: bool,
}

impl Report {
    pub fn new(ledger: &str, command: &str, inputs: Value) -> Self {
        Self {
            spec_version: SPEC_VERSION,
            convention_ledger: ledger.to_string(),
            command: command.to_string(),
            inputs,
            results: Value::Object(Default::default()),
            phases: Vec::new(),
            assertions: Vec::new(),
            sampling: Value::Object(Default::default()),
            pass: true,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.as_object_mut().expect("object").insert(key.to_string(), v);
    }

    pub fn sampling(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.sampling.as_object_mut().expect("object").insert(key.to_string(), v);
    }

    pub fn phase(&mut self, name: impl Into<String>, z: C64, tol: &Tolerances) {
        self.phases.push(LabeledPhase::new(name, z, tol));
    }

    pub fn assert(&mut self, name: impl Into<String>, pass: bool) {
        self.assertions.push(Assertion { name: name.into(), pass, gating: true });
        self.pass &= pass;
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, pass: bool) {
        self.assertions.push(Assertion { name: name.into(), pass, gating: false });
    }

    pub fn failing(&self) -> Vec<&str> {
        self.assertions.iter().filter(|a| a.gating && !a.pass).map(|a| a.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// Pretty JSON with every float printed to 17 significant digits.
struct FixedFloats(serde_json::ser::PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value as f64))
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

/// `{:.16e}`, with negative zero folded into zero so that sign noise does not change bytes.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

pub fn to_json_string(value: &impl Serialize) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FixedFloats(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("utf-8 json")
}

/// One row of the plotting trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub theta_unwrapped: f64,
    pub phase: C64,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("t,theta_unwrapped,phase_re,phase_im\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(r.t),
            fmt_f64(r.theta_unwrapped),
            fmt_f64(r.phase.re),
            fmt_f64(r.phase.im)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(-1.0), "-1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let back: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_floats_round_trip() {
        let json = to_json_string(&serde_json::json!({"x": 0.1, "n": 3, "nan": f64::NAN}));
        assert!(json.contains("1.0000000000000001e-1"));
        assert!(json.contains("\"n\": 3"));
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
        assert!(v["nan"].is_null());
    }

    #[test]
    fn labels() {
        let t = Tolerances::default();
        let p = LabeledPhase::new("p", C64::new(-1.0, 1e-9), &t);
        assert_eq!((p.nearest_fourth_root, p.exact), ("-1", true));
        let q = LabeledPhase::new("q", C64::from_polar(1.0, std::f64::consts::FRAC_PI_4), &t);
        assert!(!q.exact);
        assert!((q.residual - (2.0 - 2.0f64.sqrt()).sqrt()).abs() < 1e-12);
    }
}

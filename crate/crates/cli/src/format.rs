//! Output formatting shared by all subcommands.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "rpifs";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float printed with 17 significant digits (`null` when not finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        fmt_f64(self.0)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Param {
    fn text(&self) -> String {
        match self {
            Param::Int(v) => v.to_string(),
            Param::Float(v) => fmt_f64(*v),
            Param::Text(v) => v.clone(),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Param::Int(v) => s.serialize_u64(*v),
            Param::Float(v) => Num(*v).serialize(s),
            Param::Text(v) => s.serialize_str(v),
        }
    }
}

/// Ordered key/value pairs serialized as a JSON object.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(pub Vec<(String, Param)>);

impl Params {
    pub fn int(mut self, key: &str, v: impl Into<u64>) -> Self {
        self.0.push((key.to_string(), Param::Int(v.into())));
        self
    }

    pub fn float(mut self, key: &str, v: f64) -> Self {
        self.0.push((key.to_string(), Param::Float(v)));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.0.push((key.to_string(), Param::Text(v.into())));
        self
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Provenance block written at the top of every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub spec: String,
    pub spec_sha256: String,
    pub params: Params,
}

impl Header {
    pub fn new(command: &'static str, spec_name: &str, spec_bytes: &[u8], params: Params) -> Self {
        Header {
            tool: TOOL,
            version: VERSION,
            command,
            spec: spec_name.to_string(),
            spec_sha256: hex::encode(Sha256::digest(spec_bytes)),
            params,
        }
    }

    /// `#`-prefixed comment lines for CSV output.
    pub fn csv_comment(&self) -> String {
        let mut out = format!(
            "# tool: {} {}\n# command: {}\n# spec: {}\n# spec_sha256: {}\n",
            self.tool, self.version, self.command, self.spec, self.spec_sha256
        );
        for (k, v) in &self.params.0 {
            out.push_str(&format!("# param {k}: {}\n", v.text()));
        }
        out
    }
}

/// CSV text with a comment header; every row must have as many fields as `columns`.
pub fn csv_table(header: &Header, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(columns).expect("write to memory");
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    let body = String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields");
    header.csv_comment() + &body
}

pub fn json_text(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt_f64(f64::NAN), "null");
        for x in [0.1, -2.0 / 3.0, 1e-300, 6.02e23, 2f64.ln() / 3f64.ln()] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn num_in_json() {
        let text = serde_json::to_string(&vec![Num(0.25), Num(f64::INFINITY)]).unwrap();
        assert_eq!(text, "[2.5000000000000000e-1,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![Some(0.25), None]);
    }

    #[test]
    fn header_block() {
        let h = Header::new("sample", "x.json", b"abc", Params::default().int("seed", 7u64).float("tol", 0.5));
        assert_eq!(h.spec_sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let c = h.csv_comment();
        assert!(c.contains("# param seed: 7\n"));
        assert!(c.contains("# param tol: 5.0000000000000000e-1\n"));
        let j = serde_json::to_string(&h).unwrap();
        assert!(j.contains("\"params\":{\"seed\":7,\"tol\":5.0000000000000000e-1}"));
    }
}

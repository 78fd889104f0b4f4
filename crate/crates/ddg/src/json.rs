//! JSON documents: vertex functions, edge maps keyed `"i-j"` (`i < j`),
//! quadratic differentials and reports.
//!
//! Output is pretty-printed with every float written to 17 significant
//! digits, so identical values always produce identical bytes and reading a
//! document back recovers the values exactly.

use std::io;

use ddg_core::hqd::QuadDiff;
use ddg_core::mesh::EdgeId;
use ddg_core::{Complex64, TriMesh};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::fmt::sig17;

/// Version stamped into every document written by the CLI.
pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct FormatError(pub String);

type Result<T> = std::result::Result<T, FormatError>;

fn bad(msg: impl Into<String>) -> FormatError {
    FormatError(msg.into())
}

struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(sig17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
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

/// Serializes `v` with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::with_indent(b"  ")));
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(e.to_string()))
}

/// A float as JSON; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn reals(x: &[f64]) -> Value {
    Value::Array(x.iter().map(|&v| num(v)).collect())
}

pub fn complexes(z: &[Complex64]) -> Value {
    Value::Array(z.iter().map(|&v| complex(v)).collect())
}

/// `"i-j"` with `i < j`.
pub fn edge_key(mesh: &TriMesh, e: EdgeId) -> String {
    let [i, j] = mesh.edge(e).v;
    format!("{i}-{j}")
}

/// Object keyed by `edge_key` over `edges`, in the given order.
pub fn edge_map(mesh: &TriMesh, edges: &[EdgeId], mut value: impl FnMut(EdgeId) -> Value) -> Value {
    let mut m = Map::new();
    for &e in edges {
        m.insert(edge_key(mesh, e), value(e));
    }
    Value::Object(m)
}

/// `{"i-j": Im q}` over interior edges.
pub fn qdiff(mesh: &TriMesh, q: &QuadDiff) -> Value {
    edge_map(mesh, mesh.interior_edges(), |e| num(q.im()[e]))
}

/// A document stamped with the schema version.
pub fn document(fields: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

pub fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(format!("{what}: expected a number, found {v}")))
}

pub fn as_complex(v: &Value, what: &str) -> Result<Complex64> {
    match v.as_array().map(|a| &a[..]) {
        Some([re, im]) => Ok(Complex64::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(bad(format!("{what}: expected [re, im], found {v}"))),
    }
}

/// Either `v` itself or `v[key]` when `v` is an object.
fn unwrap_key<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    match v {
        Value::Object(m) => m.get(key).ok_or_else(|| bad(format!("missing field `{key}`"))),
        _ => Ok(v),
    }
}

/// A real vertex function given as an array or as `{key: array}` for the
/// first of `keys` present.
pub fn vertex_reals(v: &Value, keys: &[&str]) -> Result<Vec<f64>> {
    let key = match v {
        Value::Object(m) => keys.iter().copied().find(|k| m.contains_key(*k)).unwrap_or(keys[0]),
        _ => keys[0],
    };
    let arr = unwrap_key(v, key)?.as_array().ok_or_else(|| bad(format!("`{key}` must be an array")))?;
    arr.iter().enumerate().map(|(i, x)| as_f64(x, &format!("{key}[{i}]"))).collect()
}

/// A complex vertex function given as an array of pairs or as `{key: array}`.
pub fn vertex_complexes(v: &Value, key: &str) -> Result<Vec<Complex64>> {
    let arr = unwrap_key(v, key)?.as_array().ok_or_else(|| bad(format!("`{key}` must be an array")))?;
    arr.iter().enumerate().map(|(i, x)| as_complex(x, &format!("{key}[{i}]"))).collect()
}

/// Dirichlet data for `n` vertices: an array with `null` for free vertices,
/// or an object mapping vertex ids to values.
pub fn boundary_data(v: &Value, n: usize) -> Result<Vec<Option<f64>>> {
    let inner = match v {
        Value::Object(m) if m.contains_key("boundary") => &m["boundary"],
        _ => v,
    };
    match inner {
        Value::Array(a) => a
            .iter()
            .enumerate()
            .map(|(i, x)| if x.is_null() { Ok(None) } else { as_f64(x, &format!("boundary[{i}]")).map(Some) })
            .collect(),
        Value::Object(m) => {
            let mut out = vec![None; n];
            for (k, x) in m {
                let i: usize = k.parse().map_err(|_| bad(format!("`{k}` is not a vertex id")))?;
                if i >= n {
                    return Err(bad(format!("vertex {i} is out of range")));
                }
                out[i] = Some(as_f64(x, &format!("boundary[{k}]"))?);
            }
            Ok(out)
        }
        other => Err(bad(format!("boundary data must be an array or object, found {other}"))),
    }
}

/// Parses an `"i-j"` edge map into per-edge-id entries. Keys may use either
/// vertex order but an edge may appear only once.
pub fn edge_entries<'a>(mesh: &TriMesh, v: &'a Value, key: &str) -> Result<Vec<Option<&'a Value>>> {
    let m = match v {
        Value::Object(m) if m.contains_key(key) => unwrap_key(v, key)?.as_object(),
        Value::Object(m) => Some(m),
        _ => None,
    }
    .ok_or_else(|| bad(format!("`{key}` must be an object keyed \"i-j\"")))?;
    let mut out = vec![None; mesh.edge_count()];
    for (k, x) in m {
        let (i, j) = k
            .split_once('-')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| bad(format!("`{k}` is not an edge key")))?;
        let e = (i.max(j) < mesh.vertex_count())
            .then(|| mesh.edge_id(i, j))
            .flatten()
            .ok_or_else(|| bad(format!("`{k}` is not an edge of the mesh")))?;
        if out[e].replace(x).is_some() {
            return Err(bad(format!("edge {} appears twice", edge_key(mesh, e))));
        }
    }
    Ok(out)
}

fn interior<T>(
    mesh: &TriMesh,
    v: &Value,
    key: &str,
    read: impl Fn(&Value, &str) -> Result<T>,
    zero: T,
) -> Result<Vec<T>>
where
    T: Clone,
{
    let entries = edge_entries(mesh, v, key)?;
    let mut out = vec![zero; mesh.edge_count()];
    for &e in mesh.interior_edges() {
        let k = edge_key(mesh, e);
        let x = entries[e].ok_or_else(|| bad(format!("interior edge {k} is missing")))?;
        out[e] = read(x, &k)?;
    }
    Ok(out)
}

/// A quadratic differential `{"i-j": Im q}`; every interior edge must be
/// present, boundary entries are ignored.
pub fn read_qdiff(mesh: &TriMesh, v: &Value) -> Result<QuadDiff> {
    let im = interior(mesh, v, "q", as_f64, 0.0)?;
    QuadDiff::new(mesh, im).map_err(|e| bad(e.to_string()))
}

/// A complex edge function `{"i-j": [re, im]}` on interior edges.
pub fn read_edge_complexes(mesh: &TriMesh, v: &Value, key: &str) -> Result<Vec<Complex64>> {
    interior(mesh, v, key, as_complex, Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddg_core::shapes;

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_string(&document([("x", num(0.1)), ("n", Value::from(3))]));
        assert_eq!(s, "{\n  \"schema\": 1,\n  \"x\": 1.0000000000000001e-1,\n  \"n\": 3\n}\n");
        assert_eq!(parse(&s).unwrap()["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn qdiff_round_trip() {
        let (m, _) = shapes::wheel(6);
        let im: Vec<f64> = (0..m.edge_count()).map(|e| (e as f64 * 0.7).sin() / 3.0).collect();
        let q = QuadDiff::new(&m, im).unwrap();
        let text = to_string(&document([("q", qdiff(&m, &q))]));
        let back = read_qdiff(&m, &parse(&text).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn edge_keys_are_validated() {
        let (m, _) = shapes::wheel(6);
        let v = parse(r#"{"0-1": 1, "1-0": 2}"#).unwrap();
        assert!(edge_entries(&m, &v, "q").unwrap_err().0.contains("twice"));
        let v = parse(r#"{"1-3": 1}"#).unwrap();
        assert!(edge_entries(&m, &v, "q").unwrap_err().0.contains("not an edge"));
        let v = parse(r#"{"0-99": 1}"#).unwrap();
        assert!(edge_entries(&m, &v, "q").is_err());
        let v = parse(r#"{"q": {"0-1": 1}}"#).unwrap();
        assert!(read_qdiff(&m, &v).unwrap_err().0.contains("missing"));
    }

    #[test]
    fn boundary_data_forms() {
        let v = parse(r#"{"1": 0.5, "3": -1}"#).unwrap();
        assert_eq!(boundary_data(&v, 4).unwrap(), vec![None, Some(0.5), None, Some(-1.0)]);
        let v = parse(r#"[null, 2]"#).unwrap();
        assert_eq!(boundary_data(&v, 2).unwrap(), vec![None, Some(2.0)]);
        assert!(boundary_data(&parse(r#"{"7": 1}"#).unwrap(), 4).is_err());
    }
}

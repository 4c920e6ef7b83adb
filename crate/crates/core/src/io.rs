//! JSON and text formats for every input type, with errors located by JSON
//! path. Emitted JSON has sorted keys and rational strings, so identical
//! values serialize byte-identically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cellsheaf::{Assignment, CellularSheaf, Variance};
use crate::cohomology::{BayesModel, Variable};
use crate::complex::{Closure, SimplicialComplex};
use crate::error::{Error, Result};
use crate::finsheaf::{Copresheaf, FinitePresheaf};
use crate::galois::GaloisConnection;
use crate::modal::{DirectedMultigraph, Edge, Subgraph};
use crate::morphology::{BinaryImage, Point, StructuringElement};
use crate::poset::{mask_members, FinitePoset, FiniteTopology, Mask};
use crate::rational::{format_rational, parse_rational, Rational, RationalMatrix};

/// A rational written as a string (`"7.5"`, `"-1/3"`) or a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Num(Rational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Num, E> {
                parse_rational(s).map(Num).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> std::result::Result<Num, E> {
                Ok(Num(Rational::from_integer(n.into())))
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> std::result::Result<Num, E> {
                Ok(Num(Rational::from_integer(n.into())))
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<Num, E> {
                Err(E::custom(format!("{x} is a float; write it as a string")))
            }
        }
        d.deserialize_any(V)
    }
}

fn from_json<T: DeserializeOwned>(data: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(data);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
        Error::schema(path, e.inner().to_string())
    })?;
    Ok(value)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Schema { .. } => e,
        other => Error::schema(path, other.to_string()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    vertices: Vec<String>,
    faces: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closure: Option<String>,
}

fn build_complex(raw: ComplexJson, path: &str) -> Result<SimplicialComplex> {
    let mode = match raw.closure.as_deref() {
        None | Some("complete") => Closure::Complete,
        Some("strict") => Closure::Strict,
        Some(other) => {
            return Err(Error::schema(
                format!("{path}.closure"),
                format!("expected \"complete\" or \"strict\", found {other:?}"),
            ))
        }
    };
    SimplicialComplex::new(&raw.vertices, &raw.faces, mode).map_err(at(format!("{path}.faces")))
}

/// `{"vertices": [...], "faces": [[...], ...], "closure"?: "complete" | "strict"}`
pub fn parse_complex(data: &[u8]) -> Result<SimplicialComplex> {
    build_complex(from_json(data)?, "$")
}

/// Every face, vertices included, in the global face order.
pub fn emit_complex(c: &SimplicialComplex) -> Value {
    let faces: Vec<Vec<String>> = c.all_faces().map(|f| c.face_labels(f)).collect();
    json!({ "vertices": c.vertices(), "faces": faces })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexSource {
    Inline(ComplexJson),
    Path(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SheafJson {
    complex: ComplexSource,
    stalks: BTreeMap<String, usize>,
    #[serde(default)]
    maps: BTreeMap<String, Vec<Vec<Num>>>,
    #[serde(default = "default_variance")]
    variance: Variance,
}

fn default_variance() -> Variance {
    Variance::Sheaf
}

fn build_matrix(rows: &[Vec<Num>], shape: (usize, usize), path: &str) -> Result<RationalMatrix> {
    let (r, c) = shape;
    if rows.is_empty() && r == 0 {
        return Ok(RationalMatrix::zeros(0, c));
    }
    if rows.len() != r {
        return Err(Error::dims(path, format!("{r} rows"), rows.len()));
    }
    let mut out = Vec::with_capacity(r);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(Error::dims(format!("{path}[{i}]"), format!("{c} columns"), row.len()));
        }
        out.push(row.iter().map(|n| n.0.clone()).collect());
    }
    RationalMatrix::from_rows(out, c)
}

pub fn emit_matrix(m: &RationalMatrix) -> Value {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(format_rational).collect())
        .collect();
    json!(rows)
}

/// Like [`parse_sheaf`], with `"complex": "<path>"` resolved by `load`.
pub fn parse_sheaf_with(data: &[u8], load: impl Fn(&str) -> Result<Vec<u8>>) -> Result<CellularSheaf> {
    let raw: SheafJson = from_json(data)?;
    let base = match raw.complex {
        ComplexSource::Inline(c) => build_complex(c, "$.complex")?,
        ComplexSource::Path(p) => {
            let bytes = load(&p).map_err(at("$.complex".into()))?;
            parse_complex(&bytes).map_err(|e| Error::schema(format!("$.complex ({p})"), e.to_string()))?
        }
    };
    let mut stalks = BTreeMap::new();
    for (name, &d) in &raw.stalks {
        let f = base.parse_face(name).map_err(at(format!("$.stalks.{name}")))?;
        stalks.insert(f, d);
    }
    let mut maps = BTreeMap::new();
    for (key, rows) in &raw.maps {
        let path = format!("$.maps.{key}");
        let (s, t) = key
            .split_once("->")
            .ok_or_else(|| Error::schema(&path, "map keys have the form <face>-><face>"))?;
        let (s, t) = (
            base.parse_face(s).map_err(at(path.clone()))?,
            base.parse_face(t).map_err(at(path.clone()))?,
        );
        let (ds, dt) = (
            stalks.get(&s).copied().unwrap_or(0),
            stalks.get(&t).copied().unwrap_or(0),
        );
        let shape = match raw.variance {
            Variance::Sheaf => (dt, ds),
            Variance::Cosheaf => (ds, dt),
        };
        maps.insert((s, t), build_matrix(rows, shape, &path)?);
    }
    CellularSheaf::new(base, stalks, maps, raw.variance).map_err(at("$".into()))
}

/// `{"complex": {...}, "stalks": {"a": 2, ...}, "maps": {"a->ab": [["1","0"], ...]}, "variance": "sheaf"}`
pub fn parse_sheaf(data: &[u8]) -> Result<CellularSheaf> {
    parse_sheaf_with(data, |p| {
        Err(Error::schema("$.complex", format!("complex given by path {p:?}; inline it or load it through the CLI")))
    })
}

pub fn emit_sheaf(s: &CellularSheaf) -> Value {
    let base = s.base();
    let stalks: BTreeMap<String, usize> = s.stalks().iter().map(|(f, d)| (base.face_name(f), *d)).collect();
    let maps: BTreeMap<String, Value> = s
        .maps()
        .iter()
        .map(|((a, b), m)| (format!("{}->{}", base.face_name(a), base.face_name(b)), emit_matrix(m)))
        .collect();
    json!({
        "complex": emit_complex(base),
        "stalks": stalks,
        "maps": maps,
        "variance": s.variance(),
    })
}

/// `{"e": ["1", "0", "-1"], ...}`
pub fn parse_assignment(data: &[u8]) -> Result<Assignment> {
    let raw: BTreeMap<String, Vec<Num>> = from_json(data)?;
    Ok(Assignment {
        values: raw
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|n| n.0).collect()))
            .collect(),
    })
}

pub fn emit_assignment(a: &Assignment) -> Value {
    json!(a.to_strings())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// `{"vertices": [...], "edges": [{"id": "α", "src": "a", "dst": "b"}, ...]}`
pub fn parse_graph(data: &[u8]) -> Result<DirectedMultigraph> {
    let raw: GraphJson = from_json(data)?;
    DirectedMultigraph::from_edges(&raw.vertices, &raw.edges).map_err(at("$.edges".into()))
}

pub fn emit_graph(g: &DirectedMultigraph) -> Value {
    json!({ "vertices": g.vertices(), "edges": g.edge_list() })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubgraphJson {
    vertices: Vec<String>,
    edges: Vec<String>,
}

/// `{"vertices": [...], "edges": [edge ids]}`, checked against `g`.
pub fn parse_subgraph(g: &DirectedMultigraph, data: &[u8]) -> Result<Subgraph> {
    let raw: SubgraphJson = from_json(data)?;
    g.subgraph(&raw.vertices, &raw.edges).map_err(at("$".into()))
}

pub fn emit_subgraph(g: &DirectedMultigraph, s: &Subgraph) -> Value {
    json!({ "vertices": g.vertex_labels(s), "edges": g.edge_labels(s) })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetJson {
    elements: Vec<String>,
    #[serde(default)]
    relations: Vec<(String, String)>,
}

fn build_poset(raw: PosetJson, path: &str) -> Result<FinitePoset> {
    FinitePoset::new(&raw.elements, &raw.relations).map_err(at(format!("{path}.relations")))
}

/// `{"elements": [...], "relations": [["a", "b"], ...]}` with `a ≤ b`.
pub fn parse_poset(data: &[u8]) -> Result<FinitePoset> {
    build_poset(from_json(data)?, "$")
}

/// Elements with the covering relation.
pub fn emit_poset(p: &FinitePoset) -> Value {
    let covers: Vec<(String, String)> = p
        .covers()
        .into_iter()
        .map(|(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
        .collect();
    json!({ "elements": p.labels(), "relations": covers })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaloisJson {
    source: PosetJson,
    target: PosetJson,
    left: BTreeMap<String, String>,
    #[serde(default)]
    right: Option<BTreeMap<String, String>>,
}

/// A monotone pair between two posets. When `right` is absent only the
/// left map and the posets are returned.
pub struct GaloisInput {
    pub source: FinitePoset,
    pub target: FinitePoset,
    pub left: Vec<usize>,
    pub right: Option<Vec<usize>>,
}

/// `{"source": poset, "target": poset, "left": {...}, "right"?: {...}}`
pub fn parse_galois(data: &[u8]) -> Result<GaloisInput> {
    let raw: GaloisJson = from_json(data)?;
    let source = build_poset(raw.source, "$.source")?;
    let target = build_poset(raw.target, "$.target")?;
    let left = source.index_map(&target, &raw.left).map_err(at("$.left".into()))?;
    let right = match &raw.right {
        Some(r) => Some(target.index_map(&source, r).map_err(at("$.right".into()))?),
        None => None,
    };
    Ok(GaloisInput {
        source,
        target,
        left,
        right,
    })
}

pub fn emit_galois(c: &GaloisConnection) -> Value {
    json!({
        "source": emit_poset(c.source()),
        "target": emit_poset(c.target()),
        "left": c.source().label_map(c.target(), c.left()),
        "right": c.target().label_map(c.source(), c.right()),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafJson {
    topology: Vec<Vec<String>>,
    opens: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

/// `{"topology": [["U", points...], ...], "opens": {"U": [elements...]},
/// "restrictions": {"V<=U": {"x": "y", ...}}}`
pub fn parse_presheaf(data: &[u8]) -> Result<FinitePresheaf> {
    let raw: PresheafJson = from_json(data)?;
    let mut points = BTreeSet::new();
    let mut named: Vec<(String, Vec<String>)> = Vec::new();
    for (i, entry) in raw.topology.iter().enumerate() {
        let (name, members) = entry
            .split_first()
            .ok_or_else(|| Error::schema(format!("$.topology[{i}]"), "each open starts with its name"))?;
        points.extend(members.iter().cloned());
        named.push((name.clone(), members.to_vec()));
    }
    let points: Vec<String> = points.into_iter().collect();
    let opens: Vec<Vec<String>> = named.iter().map(|(_, m)| m.clone()).collect();
    let topology = FiniteTopology::new(&points, &opens).map_err(at("$.topology".into()))?;
    let mut names: BTreeMap<String, Mask> = BTreeMap::new();
    for (i, (name, members)) in named.iter().enumerate() {
        let m = topology.mask_of(members).map_err(at(format!("$.topology[{i}]")))?;
        if names.insert(name.clone(), m).is_some() {
            return Err(Error::schema(format!("$.topology[{i}]"), format!("open {name:?} named twice")));
        }
    }
    let mut restrictions = BTreeMap::new();
    for (key, table) in raw.restrictions {
        let (v, u) = key
            .split_once("<=")
            .ok_or_else(|| Error::schema(format!("$.restrictions.{key}"), "keys have the form <V><=<U>"))?;
        restrictions.insert((v.to_string(), u.to_string()), table);
    }
    FinitePresheaf::new(topology, &names, &raw.opens, &restrictions).map_err(at("$".into()))
}

pub fn emit_presheaf(p: &FinitePresheaf) -> Value {
    let topology: Vec<Vec<String>> = p
        .open_names()
        .iter()
        .zip(p.topology().opens())
        .map(|(name, &m)| {
            let mut row = vec![name.clone()];
            row.extend(mask_members(m).map(|i| p.topology().points()[i].clone()));
            row
        })
        .collect();
    let restrictions: BTreeMap<String, BTreeMap<String, String>> = p
        .restriction_tables()
        .into_iter()
        .filter(|((v, u), _)| v != u)
        .map(|((v, u), t)| (format!("{v}<={u}"), t))
        .collect();
    json!({ "topology": topology, "opens": p.stalks(), "restrictions": restrictions })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CopresheafJson {
    poset: PosetJson,
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    maps: BTreeMap<String, BTreeMap<String, String>>,
}

/// `{"poset": poset, "sets": {"p": [...]}, "maps": {"p->q": {"x": "y"}}}`
pub fn parse_copresheaf(data: &[u8]) -> Result<Copresheaf> {
    let raw: CopresheafJson = from_json(data)?;
    let poset = build_poset(raw.poset, "$.poset")?;
    let mut maps = BTreeMap::new();
    for (key, table) in raw.maps {
        let (p, q) = key
            .split_once("->")
            .ok_or_else(|| Error::schema(format!("$.maps.{key}"), "keys have the form <p>-><q>"))?;
        maps.insert((p.to_string(), q.to_string()), table);
    }
    Copresheaf::new(poset, &raw.sets, &maps).map_err(at("$".into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableJson {
    name: String,
    outcomes: Vec<String>,
    #[serde(default)]
    parents: Vec<String>,
    cpt: Vec<Vec<NumText>>,
}

/// Serializes through [`format_rational`].
#[derive(Clone, Debug)]
struct NumText(Rational);

impl Serialize for NumText {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for NumText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Num::deserialize(d).map(|n| NumText(n.0))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BayesJson {
    variables: Vec<VariableJson>,
}

/// `{"variables": [{"name": "W", "outcomes": [...], "parents": [...], "cpt": [[...], ...]}, ...]}`
pub fn parse_bayes(data: &[u8]) -> Result<BayesModel> {
    let raw: BayesJson = from_json(data)?;
    let variables = raw
        .variables
        .into_iter()
        .map(|v| Variable {
            name: v.name,
            outcomes: v.outcomes,
            parents: v.parents,
            cpt: v.cpt.into_iter().map(|r| r.into_iter().map(|n| n.0).collect()).collect(),
        })
        .collect();
    BayesModel::new(variables).map_err(at("$.variables".into()))
}

pub fn emit_bayes(m: &BayesModel) -> Value {
    let variables: Vec<VariableJson> = m
        .variables()
        .iter()
        .map(|v| VariableJson {
            name: v.name.clone(),
            outcomes: v.outcomes.clone(),
            parents: v.parents.clone(),
            cpt: v.cpt.iter().map(|r| r.iter().cloned().map(NumText).collect()).collect(),
        })
        .collect();
    serde_json::to_value(BayesJson { variables }).expect("plain data")
}

/// A vector of rationals: `["1/2", "1/2"]`.
pub fn parse_vector(data: &[u8]) -> Result<Vec<Rational>> {
    let raw: Vec<Num> = from_json(data)?;
    Ok(raw.into_iter().map(|n| n.0).collect())
}

pub fn emit_vector(v: &[Rational]) -> Value {
    json!(v.iter().map(format_rational).collect::<Vec<_>>())
}

/// Rows of `0`/`1` characters; blank lines are ignored.
pub fn parse_bitmap(data: &[u8]) -> Result<BinaryImage> {
    let text = std::str::from_utf8(data).map_err(|e| Error::schema("bitmap", e.to_string()))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .chars()
            .enumerate()
            .map(|(c, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::schema(
                    format!("line {}, column {}", n + 1, c + 1),
                    format!("expected 0 or 1, found {other:?}"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push(row);
    }
    BinaryImage::from_rows(&rows)
}

pub fn emit_bitmap(img: &BinaryImage) -> String {
    let mut out = String::new();
    for row in img.rows() {
        out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

/// `[[dx, dy], ...]`, offsets from the origin `(0, 0)`.
pub fn parse_structuring_element(data: &[u8]) -> Result<StructuringElement> {
    let raw: Vec<Point> = from_json(data)?;
    StructuringElement::new(&raw)
}

pub fn emit_structuring_element(b: &StructuringElement) -> Value {
    json!(b.offsets())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const EDGE: &str = r#"{"vertices": ["a", "b"], "faces": [["a", "b"]]}"#;

    #[test]
    fn complex_round_trip() {
        let c = parse_complex(EDGE.as_bytes()).unwrap();
        assert_eq!(c.homology_dims(), vec![1, 0]);
        let again = parse_complex(to_json_string(&emit_complex(&c)).as_bytes()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unsorted_face_reports_path() {
        let err = parse_complex(br#"{"vertices": ["a", "b"], "faces": [["b", "a"]]}"#).unwrap_err();
        let Error::Schema { path, .. } = err else { panic!("{err:?}") };
        assert_eq!(path, "$.faces");
    }

    #[test]
    fn sheaf_parses_decimal_and_fraction() {
        let text = r#"{
            "complex": {"vertices": ["a", "b"], "faces": [["a", "b"]]},
            "stalks": {"a": 1, "b": 1, "ab": 1},
            "maps": {"a->ab": [["0.5"]], "b->ab": [["1/2"]]}
        }"#;
        let s = parse_sheaf(text.as_bytes()).unwrap();
        assert_eq!(s.map_named("a", "ab").unwrap(), s.map_named("b", "ab").unwrap());
        let again = parse_sheaf(to_json_string(&emit_sheaf(&s)).as_bytes()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn bad_entry_reports_path() {
        let text = r#"{
            "complex": {"vertices": ["a", "b"], "faces": [["a", "b"]]},
            "stalks": {"a": 1, "b": 1, "ab": 1},
            "maps": {"a->ab": [["1e3"]], "b->ab": [["1"]]}
        }"#;
        let Error::Schema { path, .. } = parse_sheaf(text.as_bytes()).unwrap_err() else { panic!() };
        assert_eq!(path, "$.maps.a->ab[0][0]");
        let wrong_shape = text.replace(r#"[["1e3"]]"#, r#"[["1", "2"]]"#);
        assert!(matches!(parse_sheaf(wrong_shape.as_bytes()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn seeds() {
        let a = parse_assignment(br#"{"e": ["1", "0", "-1"], "d": [2]}"#).unwrap();
        assert_eq!(a.values["d"], vec![ratio(2, 1)]);
        assert!(parse_assignment(br#"{"e": [0.5]}"#).is_err());
    }

    #[test]
    fn bitmaps() {
        let img = parse_bitmap(b"010\n111\n").unwrap();
        assert_eq!(img.count(), 4);
        assert_eq!(emit_bitmap(&img), "010\n111\n");
        assert!(parse_bitmap(b"01\n1\n").is_err());
        let Error::Schema { path, .. } = parse_bitmap(b"01\n1x\n").unwrap_err() else { panic!() };
        assert_eq!(path, "line 2, column 2");
        assert_eq!(parse_structuring_element(b"[[0,0],[1,0]]").unwrap(), StructuringElement::bar(2));
    }

    #[test]
    fn presheaf_round_trip() {
        let h = crate::finsheaf::constant_sheaf(-1, 1);
        let text = to_json_string(&emit_presheaf(&h));
        assert_eq!(parse_presheaf(text.as_bytes()).unwrap(), h);
    }
}

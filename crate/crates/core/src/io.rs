//! JSON documents for superfunctions, distributions, component tables and
//! matrices. Complex numbers are `[re, im]` pairs; component maps are keyed by
//! index-set strings such as `"{}"` or `"{1,3}"` and written in canonical order.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_complex::Complex64;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fourier::ComponentTable;
use crate::integral::{CompactDistribution, PointDerivative};
use crate::scalar::{GaussPoly, GaussTerm, GridFn, ScalarFn};
use crate::spinrep::HMatrix;
use crate::superalgebra::{parse_index_set, IndexSet};
use crate::superfunction::SuperFunction;

/// A JSON object whose key order is kept as written.
struct Ordered<T>(Vec<(String, T)>);

impl<T: Serialize> Serialize for Ordered<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Ordered<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Ordered<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from index sets to component data")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some((k, v)) = a.next_entry::<String, T>()? {
                    if out.iter().any(|(j, _)| *j == k) {
                        return Err(serde::de::Error::custom(format!("duplicate component {k}")));
                    }
                    out.push((k, v));
                }
                Ok(Ordered(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    poly: Vec<Complex64>,
    alpha: Complex64,
    mu: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum SpecDoc {
    #[serde(rename = "gausspoly")]
    GaussPoly { terms: Vec<TermDoc> },
    #[serde(rename = "grid")]
    Grid {
        x0: f64,
        dx: f64,
        values: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<(f64, f64)>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    n: usize,
    components: Ordered<SpecDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    order: u32,
    x0: f64,
    coeff: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionDoc {
    n: usize,
    components: Ordered<Vec<PointDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    n: usize,
    zetas: Vec<f64>,
    components: Ordered<Vec<Complex64>>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed {what} JSON: {e}")))
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents contain only finite numbers and string keys")
}

fn key(text: &str, n: usize) -> Result<IndexSet> {
    parse_index_set(text, n).map_err(|e| Error::Parse(format!("component \"{text}\": {e}")))
}

fn in_component<T>(k: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Parse(format!("component \"{k}\": {e}")))
}

fn spec_to_scalar(k: &str, spec: SpecDoc) -> Result<ScalarFn> {
    in_component(
        k,
        match spec {
            SpecDoc::GaussPoly { terms } => terms
                .into_iter()
                .map(|t| GaussTerm::new(t.poly, t.alpha, t.mu))
                .collect::<Result<Vec<_>>>()
                .map(|ts| ScalarFn::Gauss(GaussPoly::new(ts))),
            SpecDoc::Grid { x0, dx, values, support } => GridFn::new(x0, dx, values).and_then(|g| match support {
                Some((lo, hi)) if !(lo <= hi) => Err(Error::Invalid(format!("support [{lo}, {hi}] is empty"))),
                Some((lo, hi)) => Ok(ScalarFn::Grid(g.with_support(lo, hi))),
                None => Ok(ScalarFn::Grid(g)),
            }),
        },
    )
}

fn scalar_to_spec(f: &ScalarFn) -> SpecDoc {
    match f {
        ScalarFn::Gauss(g) => SpecDoc::GaussPoly {
            terms: g.terms.iter().map(|t| TermDoc { poly: t.poly.clone(), alpha: t.alpha, mu: t.mu }).collect(),
        },
        ScalarFn::Grid(g) => SpecDoc::Grid { x0: g.x0, dx: g.dx, values: g.values.clone(), support: g.support },
    }
}

pub fn superfunction_from_json(text: &str) -> Result<SuperFunction> {
    let doc: FunctionDoc = parse_json(text, "superfunction")?;
    let mut comps = BTreeMap::new();
    for (k, spec) in doc.components.0 {
        let idx = key(&k, doc.n)?;
        if comps.insert(idx, spec_to_scalar(&k, spec)?).is_some() {
            return Err(Error::Parse(format!("component \"{k}\" given twice")));
        }
    }
    SuperFunction::new(doc.n, comps)
}

pub fn superfunction_to_json(f: &SuperFunction) -> String {
    let components = Ordered(f.components().map(|(i, s)| (i.to_string(), scalar_to_spec(s))).collect());
    to_json(&FunctionDoc { n: f.n(), components })
}

pub fn distribution_from_json(text: &str) -> Result<CompactDistribution> {
    let doc: DistributionDoc = parse_json(text, "distribution")?;
    let mut comps = BTreeMap::new();
    for (k, pts) in doc.components.0 {
        let idx = key(&k, doc.n)?;
        let pts = pts.into_iter().map(|p| PointDerivative { order: p.order, x0: p.x0, coeff: p.coeff }).collect();
        if comps.insert(idx, pts).is_some() {
            return Err(Error::Parse(format!("component \"{k}\" given twice")));
        }
    }
    CompactDistribution::new(doc.n, comps)
}

pub fn distribution_to_json(u: &CompactDistribution) -> String {
    let components = Ordered(
        u.components()
            .map(|(i, pts)| {
                let docs = pts.iter().map(|p| PointDoc { order: p.order, x0: p.x0, coeff: p.coeff }).collect();
                (i.to_string(), docs)
            })
            .collect(),
    );
    to_json(&DistributionDoc { n: u.n(), components })
}

pub fn table_from_json(text: &str) -> Result<ComponentTable> {
    let doc: TableDoc = parse_json(text, "component table")?;
    let mut components = BTreeMap::new();
    for (k, vals) in doc.components.0 {
        let idx = key(&k, doc.n)?;
        if components.insert(idx, vals).is_some() {
            return Err(Error::Parse(format!("component \"{k}\" given twice")));
        }
    }
    Ok(ComponentTable { n: doc.n, zetas: doc.zetas, components })
}

pub fn table_to_json(t: &ComponentTable) -> String {
    let components = Ordered(t.components.iter().map(|(i, v)| (i.to_string(), v.clone())).collect());
    to_json(&TableDoc { n: t.n, zetas: t.zetas.clone(), components })
}

/// Rows of `[re, im]` pairs.
pub fn matrix_rows(m: &HMatrix) -> Vec<Vec<Complex64>> {
    let e = m.entries();
    (0..e.nrows()).map(|r| (0..e.ncols()).map(|c| e[(r, c)]).collect()).collect()
}

pub fn matrix_to_json(m: &HMatrix) -> String {
    to_json(&matrix_rows(m))
}

/// Transform samples: `{"n", "zetas": [[re,im],...], "matrices": [...]}`.
pub fn matrices_to_json(n: usize, zetas: &[Complex64], mats: &[HMatrix]) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        n: usize,
        zetas: &'a [Complex64],
        matrices: Vec<Vec<Vec<Complex64>>>,
    }
    to_json(&Doc { n, zetas, matrices: mats.iter().map(matrix_rows).collect() })
}

/// A parsed input file of either kind.
#[derive(Clone, Debug)]
pub enum Document {
    Function(SuperFunction),
    Distribution(CompactDistribution),
}

/// Distribution components are arrays, superfunction components are objects.
pub fn document_from_json(text: &str) -> Result<Document> {
    let v: serde_json::Value = parse_json(text, "input")?;
    let is_dist = v
        .get("components")
        .and_then(|c| c.as_object())
        .map(|m| m.values().next().is_some_and(|x| x.is_array()))
        .unwrap_or(false);
    if is_dist {
        distribution_from_json(text).map(Document::Distribution)
    } else {
        superfunction_from_json(text).map(Document::Function)
    }
}

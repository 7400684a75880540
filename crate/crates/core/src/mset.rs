//! Multisets with real, possibly negative, multiplicities.
//!
//! An [`Mset`] maps elements to multiplicities. Zero multiplicities are never
//! stored, so the empty map doubles as the universe mset (every element at
//! multiplicity zero) and structural equality is set equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// An opaque element label, ordered by its canonical text form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(String);

impl Element {
    pub fn new(label: impl Into<String>) -> Self {
        Element(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Element {
    fn from(s: &str) -> Self {
        Element(s.to_owned())
    }
}

impl From<String> for Element {
    fn from(s: String) -> Self {
        Element(s)
    }
}

macro_rules! element_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Element {
            fn from(v: $t) -> Self {
                Element(v.to_string())
            }
        }
    )*};
}
element_from_int!(i32, i64, u32, u64, usize);

/// Which elements count as members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    /// `m(x) > 0`.
    Positive,
    /// `m(x) != 0`, for signed msets.
    Nonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalityMode {
    /// Sum of multiplicities.
    Signed,
    /// Sum of absolute multiplicities.
    Absolute,
}

/// Elementwise binary combinations. Absent elements read as multiplicity 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Union,
    Intersection,
    Sum,
    DiffSigned,
    DiffTruncated,
    Product,
}

impl CombineOp {
    pub const ALL: [CombineOp; 6] = [
        CombineOp::Union,
        CombineOp::Intersection,
        CombineOp::Sum,
        CombineOp::DiffSigned,
        CombineOp::DiffTruncated,
        CombineOp::Product,
    ];

    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            CombineOp::Union => a.max(b),
            CombineOp::Intersection => a.min(b),
            CombineOp::Sum => a + b,
            CombineOp::DiffSigned => a - b,
            CombineOp::DiffTruncated => (a - b).max(0.0),
            CombineOp::Product => a * b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CombineOp::Union => "union",
            CombineOp::Intersection => "intersection",
            CombineOp::Sum => "sum",
            CombineOp::DiffSigned => "diff",
            CombineOp::DiffTruncated => "diff-truncated",
            CombineOp::Product => "product",
        }
    }
}

impl std::str::FromStr for CombineOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "union" => CombineOp::Union,
            "intersection" => CombineOp::Intersection,
            "sum" => CombineOp::Sum,
            "diff" | "diff-signed" => CombineOp::DiffSigned,
            "diff-truncated" => CombineOp::DiffTruncated,
            "product" => CombineOp::Product,
            _ => return Err(format!("unknown operation `{s}`")),
        })
    }
}

/// Default absolute tolerance for [`Mset::approx_eq`].
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A finite multiset with real multiplicities, kept in canonical form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MsetRepr", into = "MsetRepr")]
pub struct Mset {
    entries: BTreeMap<Element, f64>,
}

#[derive(Serialize, Deserialize)]
struct MsetRepr {
    entries: BTreeMap<Element, f64>,
}

impl TryFrom<MsetRepr> for Mset {
    type Error = String;

    fn try_from(repr: MsetRepr) -> Result<Self, Self::Error> {
        if let Some((e, _)) = repr.entries.iter().find(|(_, m)| !m.is_finite()) {
            return Err(format!("non-finite multiplicity for `{e}`"));
        }
        Ok(Mset::from_pairs(repr.entries))
    }
}

impl From<Mset> for MsetRepr {
    fn from(m: Mset) -> Self {
        MsetRepr { entries: m.entries }
    }
}

impl Mset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts occurrences.
    pub fn from_elements<I, E>(items: I) -> Self
    where
        I: IntoIterator<Item = E>,
        E: Into<Element>,
    {
        let mut entries = BTreeMap::new();
        for item in items {
            *entries.entry(item.into()).or_insert(0.0) += 1.0;
        }
        Mset { entries }
    }

    /// Builds from `(element, multiplicity)` pairs; repeated elements accumulate.
    pub fn from_pairs<I, E>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (E, f64)>,
        E: Into<Element>,
    {
        let mut entries = BTreeMap::new();
        for (e, m) in pairs {
            *entries.entry(e.into()).or_insert(0.0) += m;
        }
        entries.retain(|_, m| *m != 0.0);
        Mset { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of stored (nonzero) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, f64)> + '_ {
        self.entries.iter().map(|(e, m)| (e, *m))
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.entries.keys()
    }

    pub fn multiplicity<E: Into<Element>>(&self, x: E) -> f64 {
        self.entries.get(&x.into()).copied().unwrap_or(0.0)
    }

    pub fn get(&self, x: &Element) -> f64 {
        self.entries.get(x).copied().unwrap_or(0.0)
    }

    pub fn support(&self, mode: SupportMode) -> BTreeSet<Element> {
        self.entries
            .iter()
            .filter(|(_, m)| match mode {
                SupportMode::Positive => **m > 0.0,
                SupportMode::Nonzero => **m != 0.0,
            })
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn cardinality(&self, mode: CardinalityMode) -> f64 {
        match mode {
            CardinalityMode::Signed => self.entries.values().sum(),
            CardinalityMode::Absolute => self.entries.values().map(|m| m.abs()).sum(),
        }
    }

    /// `m_A(x) <= m_B(x)` for every element of either support.
    pub fn is_subset(&self, other: &Mset) -> bool {
        self.union_keys(other)
            .into_iter()
            .all(|e| self.get(e) <= other.get(e))
    }

    /// Sorted union of both key sets.
    pub fn union_keys<'a>(&'a self, other: &'a Mset) -> BTreeSet<&'a Element> {
        self.entries.keys().chain(other.entries.keys()).collect()
    }

    /// Elementwise combination over the union of supports. `None` drops the
    /// element from the result.
    pub fn zip_with<F>(&self, other: &Mset, mut f: F) -> Mset
    where
        F: FnMut(f64, f64) -> Option<f64>,
    {
        let entries = self
            .union_keys(other)
            .into_iter()
            .filter_map(|e| {
                f(self.get(e), other.get(e))
                    .filter(|m| *m != 0.0)
                    .map(|m| (e.clone(), m))
            })
            .collect();
        Mset { entries }
    }

    pub fn combine(&self, op: CombineOp, other: &Mset) -> Mset {
        self.zip_with(other, |a, b| Some(op.apply(a, b)))
    }

    pub fn union(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::Union, other)
    }

    pub fn intersection(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::Intersection, other)
    }

    pub fn sum(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::Sum, other)
    }

    pub fn diff_signed(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::DiffSigned, other)
    }

    pub fn diff_truncated(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::DiffTruncated, other)
    }

    pub fn product(&self, other: &Mset) -> Mset {
        self.combine(CombineOp::Product, other)
    }

    /// Elementwise division. Elements where the divisor is zero are left out.
    pub fn quotient(&self, other: &Mset) -> Mset {
        self.zip_with(other, |a, b| (b != 0.0).then(|| a / b))
    }

    /// Sign change of every multiplicity.
    pub fn complement(&self) -> Mset {
        Mset {
            entries: self.entries.iter().map(|(e, m)| (e.clone(), -m)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Mset {
        Mset::from_pairs(self.entries.iter().map(|(e, m)| (e.clone(), m * c)))
    }

    /// Same elements with every multiplicity within `tol` of the other's.
    pub fn approx_eq(&self, other: &Mset, tol: f64) -> bool {
        self.union_keys(other)
            .into_iter()
            .all(|e| (self.get(e) - other.get(e)).abs() <= tol)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("mset serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::Result<Mset> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<E: Into<Element>> FromIterator<(E, f64)> for Mset {
    fn from_iter<T: IntoIterator<Item = (E, f64)>>(iter: T) -> Self {
        Mset::from_pairs(iter)
    }
}

//! Set-theoretic analogues of the inner product and the similarity indices
//! built from them.
//!
//! The pointwise building block is the mproduct, `s_f s_g min(|f|, |g|)`:
//! the signed size of what two values share. Integrated (or summed, for
//! msets) it gives the common product. The sup product integrates
//! `max(|f|, |g|)` and normalizes the common product into a Jaccard index
//! confined to `[-1, 1]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::format::{fmt_num, round_sig, SIGNIFICANT_DIGITS};
use crate::mfunction::MFunction;
use crate::mset::{Element, Mset};

/// `s_a s_b min(|a|, |b|)`; zero when either operand is zero.
#[inline]
pub fn mproduct_scalar(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let m = a.abs().min(b.abs());
    if (a > 0.0) == (b > 0.0) {
        m
    } else {
        -m
    }
}

/// Two operands laid out on a shared index set, with the quadrature weight
/// (`dx` for functions, 1 for msets).
#[derive(Debug, Clone)]
pub struct Aligned {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub weight: f64,
}

/// Values that the similarity functionals accept: msets and mfunctions.
pub trait Operand: Sized {
    fn align(&self, other: &Self) -> Result<Aligned>;

    /// Column per operand over the shared index set, plus the weight.
    fn align_many(items: &[&Self]) -> Result<(Vec<Vec<f64>>, f64)>;

    fn mproduct(&self, other: &Self) -> Result<Self>;
}

impl Operand for Mset {
    fn align(&self, other: &Self) -> Result<Aligned> {
        let keys = self.union_keys(other);
        Ok(Aligned {
            left: keys.iter().map(|e| self.get(e)).collect(),
            right: keys.iter().map(|e| other.get(e)).collect(),
            weight: 1.0,
        })
    }

    fn align_many(items: &[&Self]) -> Result<(Vec<Vec<f64>>, f64)> {
        let keys: BTreeSet<&Element> = items.iter().flat_map(|m| m.elements()).collect();
        let cols = items
            .iter()
            .map(|m| keys.iter().map(|e| m.get(e)).collect())
            .collect();
        Ok((cols, 1.0))
    }

    fn mproduct(&self, other: &Self) -> Result<Self> {
        Ok(self.zip_with(other, |a, b| Some(mproduct_scalar(a, b))))
    }
}

impl Operand for MFunction {
    fn align(&self, other: &Self) -> Result<Aligned> {
        self.grid().check_same(other.grid())?;
        Ok(Aligned {
            left: self.samples().to_vec(),
            right: other.samples().to_vec(),
            weight: self.grid().dx(),
        })
    }

    fn align_many(items: &[&Self]) -> Result<(Vec<Vec<f64>>, f64)> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidArgument("no operands".into()))?;
        for f in &items[1..] {
            first.grid().check_same(f.grid())?;
        }
        Ok((items.iter().map(|f| f.samples().to_vec()).collect(), first.grid().dx()))
    }

    fn mproduct(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, mproduct_scalar)
    }
}

pub fn mproduct<T: Operand>(f: &T, g: &T) -> Result<T> {
    f.mproduct(g)
}

/// Integral (or sum) of the mproduct: the signed shared area.
pub fn common_product<T: Operand>(f: &T, g: &T) -> Result<f64> {
    let a = f.align(g)?;
    Ok(a.weight * a.left.iter().zip(&a.right).map(|(x, y)| mproduct_scalar(*x, *y)).sum::<f64>())
}

/// Integral (or sum) of `max(|f|, |g|)`.
pub fn sup_product<T: Operand>(f: &T, g: &T) -> Result<f64> {
    let a = f.align(g)?;
    Ok(a.weight * a.left.iter().zip(&a.right).map(|(x, y)| x.abs().max(y.abs())).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    Jaccard,
    CosineL2,
    CosineSum,
    CosineIntersection,
    CommonProduct,
    SupProduct,
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityKind::Jaccard => "jaccard",
            SimilarityKind::CosineL2 => "cosine_l2",
            SimilarityKind::CosineSum => "cosine_sum",
            SimilarityKind::CosineIntersection => "cosine_intersection",
            SimilarityKind::CommonProduct => "common_product",
            SimilarityKind::SupProduct => "sup_product",
        })
    }
}

/// Set when both Jaccard operands vanish and the index is taken as 1.
pub const FLAG_INDETERMINATE: &str = "indeterminate";

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub kind: SimilarityKind,
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

impl SimilarityReport {
    fn ratio(kind: SimilarityKind, numerator: f64, denominator: f64) -> Self {
        SimilarityReport {
            kind,
            value: numerator / denominator,
            numerator,
            denominator,
            flags: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn to_json(&self) -> String {
        let r = |x: f64| round_sig(x, SIGNIFICANT_DIGITS);
        let v = json!({
            "kind": self.kind,
            "value": r(self.value),
            "numerator": r(self.numerator),
            "denominator": r(self.denominator),
            "flags": self.flags,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report serialization");
        s.push('\n');
        s
    }
}

fn jaccard_from_sums(numerator: f64, denominator: f64) -> SimilarityReport {
    if denominator == 0.0 {
        let mut rep = SimilarityReport::ratio(SimilarityKind::Jaccard, 0.0, 0.0);
        rep.value = 1.0;
        rep.flags.push(FLAG_INDETERMINATE.to_owned());
        rep
    } else {
        SimilarityReport::ratio(SimilarityKind::Jaccard, numerator, denominator)
    }
}

/// Common product over sup product. Two all-zero operands score 1 and carry
/// [`FLAG_INDETERMINATE`].
pub fn jaccard<T: Operand>(f: &T, g: &T) -> Result<SimilarityReport> {
    let a = f.align(g)?;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut total = 0.0;
    for (x, y) in a.left.iter().zip(&a.right) {
        num += mproduct_scalar(*x, *y);
        den += x.abs().max(y.abs());
        total += x.abs() + y.abs();
    }
    let mut rep = jaccard_from_sums(a.weight * num, a.weight * den);
    if total > 0.0 {
        let total = a.weight * total;
        // Same numerator over the combined mass of both operands instead of
        // the union mass.
        rep.notes.push(format!(
            "sum-denominator variant: {}/{} = {}",
            fmt_num(rep.numerator),
            fmt_num(total),
            fmt_num(rep.numerator / total)
        ));
    }
    Ok(rep)
}

/// Elementwise minimum over all inputs divided by elementwise maximum.
/// Inputs must be nonnegative.
pub fn jaccard_multi<T: Operand>(items: &[&T]) -> Result<SimilarityReport> {
    if items.len() < 2 {
        return Err(Error::InvalidArgument("multiway Jaccard needs at least two operands".into()));
    }
    let (cols, weight) = T::align_many(items)?;
    if cols.iter().flatten().any(|v| *v < 0.0) {
        return Err(Error::NegativeInput);
    }
    let len = cols[0].len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..len {
        let (lo, hi) = cols
            .iter()
            .map(|c| c[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        num += lo;
        den += hi;
    }
    Ok(jaccard_from_sums(weight * num, weight * den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosineVariant {
    /// Euclidean norms.
    L2,
    /// Product of total absolute masses.
    SumNormalized,
    /// Mproduct numerator over the product of total absolute masses.
    Intersection,
}

pub fn cosine<T: Operand>(f: &T, g: &T, variant: CosineVariant) -> Result<SimilarityReport> {
    let a = f.align(g)?;
    let w = a.weight;
    let pairs = || a.left.iter().zip(&a.right);
    let (kind, num, den) = match variant {
        CosineVariant::L2 => {
            let num = w * pairs().map(|(x, y)| x * y).sum::<f64>();
            let nf = (w * a.left.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let ng = (w * a.right.iter().map(|x| x * x).sum::<f64>()).sqrt();
            (SimilarityKind::CosineL2, num, nf * ng)
        }
        CosineVariant::SumNormalized | CosineVariant::Intersection => {
            let mf = w * a.left.iter().map(|x| x.abs()).sum::<f64>();
            let mg = w * a.right.iter().map(|x| x.abs()).sum::<f64>();
            if variant == CosineVariant::SumNormalized {
                let num = w * pairs().map(|(x, y)| x * y).sum::<f64>();
                (SimilarityKind::CosineSum, num, mf * mg)
            } else {
                let num = w * pairs().map(|(x, y)| mproduct_scalar(*x, *y)).sum::<f64>();
                (SimilarityKind::CosineIntersection, num, mf * mg)
            }
        }
    };
    if den == 0.0 {
        return Err(Error::ZeroNorm("cosine similarity"));
    }
    Ok(SimilarityReport::ratio(kind, num, den))
}

/// Report wrapper for a bare common product.
pub fn common_product_report<T: Operand>(f: &T, g: &T) -> Result<SimilarityReport> {
    let v = common_product(f, g)?;
    Ok(SimilarityReport::ratio(SimilarityKind::CommonProduct, v, 1.0))
}

/// Report wrapper for a bare sup product.
pub fn sup_product_report<T: Operand>(f: &T, g: &T) -> Result<SimilarityReport> {
    let v = sup_product(f, g)?;
    Ok(SimilarityReport::ratio(SimilarityKind::SupProduct, v, 1.0))
}

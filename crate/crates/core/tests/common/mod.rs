//! Generators and reference implementations shared by the integration tests.
//!
//! The oracles here work on plain vectors and maps and never call the
//! library operation they are checked against.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use multikit::{CombineOp, Grid1D, MFunction, Mset, PointwiseOp};
use proptest::prelude::*;
use rand::Rng;

pub mod golden;

pub const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Multiples of 1/4 in `[-4, 4]`: sums, differences and negations of these
/// are exact in `f64`, so algebraic laws can be compared bit for bit.
pub fn dyadic() -> impl Strategy<Value = f64> + Clone {
    (-16i32..=16).prop_map(|k| f64::from(k) / 4.0)
}

fn mset_from<S: Strategy<Value = f64>>(values: S) -> impl Strategy<Value = Mset> {
    proptest::collection::vec(proptest::option::of(values), LABELS.len()).prop_map(|vs| {
        Mset::from_pairs(LABELS.iter().zip(vs).filter_map(|(l, v)| v.map(|v| (*l, v))))
    })
}

pub fn signed_mset() -> impl Strategy<Value = Mset> {
    mset_from(dyadic())
}

pub fn real_mset(lo: f64, hi: f64) -> impl Strategy<Value = Mset> {
    mset_from(lo..hi)
}

pub fn grid() -> impl Strategy<Value = Grid1D> {
    (-5.0f64..5.0, 0.001f64..0.5, 1usize..48).prop_map(|(x0, dx, n)| Grid1D::new(x0, dx, n).unwrap())
}

/// `count` functions on one random grid with samples drawn from `values`.
pub fn functions_on_grid<S>(count: usize, values: S) -> impl Strategy<Value = Vec<MFunction>>
where
    S: Strategy<Value = f64> + Clone,
{
    grid().prop_flat_map(move |g| {
        proptest::collection::vec(proptest::collection::vec(values.clone(), g.len()), count)
            .prop_map(move |cols| cols.into_iter().map(|s| MFunction::new(g, s).unwrap()).collect())
    })
}

pub fn random_mset<R: Rng>(rng: &mut R, signed: bool) -> Mset {
    let lo = if signed { -5.0 } else { 0.0 };
    let mut pairs = Vec::new();
    for l in LABELS {
        if rng.gen_bool(0.7) {
            pairs.push((l, rng.gen_range(lo..5.0)));
        }
    }
    Mset::from_pairs(pairs)
}

pub fn random_function<R: Rng>(rng: &mut R, grid: Grid1D, lo: f64, hi: f64) -> MFunction {
    MFunction::new(grid, (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// Multiplicity lookup through a plain map, absent keys reading 0.
pub fn as_map(m: &Mset) -> BTreeMap<String, f64> {
    m.iter().map(|(e, v)| (e.as_str().to_owned(), v)).collect()
}

/// `sum min / sum max` over the union of keys, computed from the raw maps.
pub fn jaccard_oracle(a: &Mset, b: &Mset) -> f64 {
    let (a, b) = (as_map(a), as_map(b));
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for k in keys {
        let x = a.get(k).copied().unwrap_or(0.0);
        let y = b.get(k).copied().unwrap_or(0.0);
        num += if x < y { x } else { y };
        den += if x > y { x } else { y };
    }
    num / den
}

/// Expands integer multiplicities into a crisp set of `(element, tag)`
/// copies, one distinct tag per repetition.
pub fn tagged(counts: &[u32]) -> BTreeSet<(usize, u32)> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(e, &m)| (0..m).map(move |t| (e, t)))
        .collect()
}

/// Multiplicities recovered from a tagged crisp set.
pub fn untag(set: &BTreeSet<(usize, u32)>, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for (e, _) in set {
        out[*e] += 1;
    }
    out
}

/// Left-rectangle quadrature of `|f|`, written out independently.
pub fn abs_area(samples: &[f64], dx: f64) -> f64 {
    samples.iter().map(|v| v.abs()).sum::<f64>() * dx
}

/// Lag-by-lag correlation of two sample vectors by explicit shifting:
/// entry `k` pairs `f[i]` with `g[i - (k - (m - 1))]`.
pub fn shifted_correlation(f: &[f64], g: &[f64], dx: f64, pair: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let (n, m) = (f.len() as isize, g.len() as isize);
    (0..n + m - 1)
        .map(|k| {
            let shift = k - (m - 1);
            let mut acc = 0.0;
            for i in 0..n {
                let j = i - shift;
                if (0..m).contains(&j) {
                    acc += pair(f[i as usize], g[j as usize]);
                }
            }
            dx * acc
        })
        .collect()
}

/// Unit-height box on `[0, 1)` sampled with `n` points.
pub fn unit_box(n: usize) -> MFunction {
    MFunction::constant(Grid1D::span(0.0, 1.0, n).unwrap(), 1.0)
}

/// Continuous overlap length of two unit boxes offset by `t - 1`.
pub fn box_triangle(t: f64) -> f64 {
    (1.0 - (t - 1.0).abs()).max(0.0)
}

/// Number of sign changes along a +-1 sequence.
pub fn sign_changes(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Hadamard rows by the Sylvester recursion, unordered.
pub fn sylvester(k: u32) -> Vec<Vec<f64>> {
    let mut h = vec![vec![1.0]];
    for _ in 0..k {
        let n = h.len();
        let mut next = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = h[i][j];
                next[i][j + n] = h[i][j];
                next[i + n][j] = h[i][j];
                next[i + n][j + n] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

/// Solves the normal equations `A^T A c = A^T f` for small dense systems by
/// Gaussian elimination with partial pivoting. `columns[j]` is column `j`.
pub fn least_squares(columns: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    let p = columns.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut m: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut row: Vec<f64> = (0..p).map(|j| dot(&columns[i], &columns[j])).collect();
            row.push(dot(&columns[i], f));
            row
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let factor = m[r][col] / m[col][col];
                for c in col..=p {
                    m[r][c] -= factor * m[col][c];
                }
            }
        }
    }
    (0..p).map(|i| m[i][p] / m[i][i]).collect()
}

/// Union and intersection against crisp-set operations on uniquely tagged
/// copies. Operations act on each element independently and labels are
/// opaque, so every pair of msets with at most five support elements and
/// multiplicities `0..=4` is covered, up to relabeling, by the multisets of
/// five per-element `(m_A, m_B)` pairs. Returns the number of pairs checked.
pub fn tag_oracle_sweep() -> Result<usize, String> {
    let pairs: Vec<(u32, u32)> = (0..=4).flat_map(|a| (0..=4).map(move |b| (a, b))).collect();
    let labels = ["p", "q", "r", "s", "t"];
    let to_mset = |c: &[u32]| Mset::from_pairs(labels.iter().zip(c).map(|(l, &m)| (*l, f64::from(m))));
    let mut checked = 0usize;
    let mut idx = [0usize; 5];
    loop {
        let a: Vec<u32> = idx.iter().map(|&i| pairs[i].0).collect();
        let b: Vec<u32> = idx.iter().map(|&i| pairs[i].1).collect();
        let (ma, mb) = (to_mset(&a), to_mset(&b));
        let (ta, tb) = (tagged(&a), tagged(&b));
        let union = untag(&ta.union(&tb).copied().collect(), 5);
        let inter = untag(&ta.intersection(&tb).copied().collect(), 5);
        if ma.union(&mb) != to_mset(&union) {
            return Err(format!("union of {a:?} and {b:?}"));
        }
        if ma.intersection(&mb) != to_mset(&inter) {
            return Err(format!("intersection of {a:?} and {b:?}"));
        }
        checked += 1;

        // Next non-decreasing index tuple.
        let mut pos = idx.len();
        while pos > 0 && idx[pos - 1] == pairs.len() - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return Ok(checked);
        }
        idx[pos - 1] += 1;
        let v = idx[pos - 1];
        for slot in idx.iter_mut().skip(pos) {
            *slot = v;
        }
    }
}

/// An expression as text alongside the value obtained by calling the
/// pointwise operations directly.
pub struct ComposedExpr {
    pub text: String,
    pub value: MFunction,
}

/// Random fully parenthesized expression over `env`, evaluated by direct
/// calls to the pointwise operations.
pub fn compose_expr<R: Rng>(rng: &mut R, depth: u32, env: &[(&str, MFunction)]) -> ComposedExpr {
    let grid = *env[0].1.grid();
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.75) {
            let (name, f) = &env[rng.gen_range(0..env.len())];
            ComposedExpr { text: (*name).to_owned(), value: f.clone() }
        } else {
            let v = f64::from(rng.gen_range(0u32..40)) / 4.0;
            ComposedExpr { text: format!("{v}"), value: MFunction::constant(grid, v) }
        };
    }
    if rng.gen_bool(0.15) {
        let inner = compose_expr(rng, depth - 1, env);
        return ComposedExpr { text: format!("-({})", inner.text), value: inner.value.complement() };
    }
    let l = compose_expr(rng, depth - 1, env);
    let r = compose_expr(rng, depth - 1, env);
    let (sym, op) = match rng.gen_range(0..6) {
        0 => ('|', PointwiseOp::Combine(CombineOp::Union)),
        1 => ('&', PointwiseOp::Combine(CombineOp::Intersection)),
        2 => ('+', PointwiseOp::Combine(CombineOp::Sum)),
        3 => ('-', PointwiseOp::Combine(CombineOp::DiffSigned)),
        4 => ('*', PointwiseOp::Combine(CombineOp::Product)),
        _ => ('/', PointwiseOp::Quotient),
    };
    ComposedExpr {
        text: format!("({}) {sym} ({})", l.text, r.text),
        value: l.value.pointwise(op, &r.value).unwrap(),
    }
}

/// Identical grids and bitwise identical samples.
pub fn bit_equal(a: &MFunction, b: &MFunction) -> bool {
    a.grid() == b.grid()
        && a.samples().len() == b.samples().len()
        && a.samples().iter().zip(b.samples()).all(|(x, y)| x.to_bits() == y.to_bits())
}

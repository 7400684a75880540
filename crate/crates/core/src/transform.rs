//! Greedy decomposition of an mfunction onto a basis under the common
//! product, and the Walsh basis, which is orthogonal under it.

use serde_json::json;

use crate::error::{Error, Result};
use crate::format::{round_sig, SIGNIFICANT_DIGITS};
use crate::mfunction::{Builtin, Grid1D, MFunction};
use crate::similarity::{common_product, mproduct_scalar};

/// Ordered basis functions sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    functions: Vec<MFunction>,
    labels: Vec<String>,
}

impl Basis {
    pub fn new(functions: Vec<MFunction>, labels: Vec<String>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidArgument("basis is empty".into()));
        }
        if functions.len() != labels.len() {
            return Err(Error::LengthMismatch { expected: functions.len(), actual: labels.len() });
        }
        for (f, label) in functions.iter().zip(&labels) {
            functions[0].grid().check_same(f.grid())?;
            if f.samples().iter().all(|v| *v == 0.0) {
                return Err(Error::ZeroBasisFunction(label.clone()));
            }
        }
        Ok(Basis { functions, labels })
    }

    /// `sin(2 pi freq x + phase)` per `(freq, phase)` pair.
    pub fn sinusoids(grid: Grid1D, terms: &[(f64, f64)]) -> Result<Self> {
        let functions = terms
            .iter()
            .map(|&(freq, phase)| Builtin::Sin { freq, phase }.sample(grid))
            .collect();
        let labels = terms.iter().map(|(f, p)| format!("sin(f={f},phase={p})")).collect();
        Basis::new(functions, labels)
    }

    pub fn grid(&self) -> &Grid1D {
        self.functions[0].grid()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[MFunction] {
        &self.functions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same members in a new order; `order[i]` is the old index of member `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Basis> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument("not a permutation of the basis".into()));
            }
        }
        if order.len() != self.len() {
            return Err(Error::InvalidArgument("not a permutation of the basis".into()));
        }
        Ok(Basis {
            functions: order.iter().map(|&i| self.functions[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
        })
    }
}

/// Sign of `(-1)^popcount(a & b)`.
fn walsh_sign(row: usize, col: usize) -> f64 {
    if (row & col).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Natural-order Hadamard row holding the Walsh function of sequency `s`:
/// bit reversal of the Gray code of `s`.
fn sequency_to_hadamard(s: usize, k: u32) -> usize {
    if k == 0 {
        return 0;
    }
    let gray = s ^ (s >> 1);
    gray.reverse_bits() >> (usize::BITS - k)
}

/// The `2^k` Walsh functions on `grid`, in sequency order. `grid` must hold
/// exactly `2^k` samples.
pub fn walsh_basis(k: u32, grid: Grid1D) -> Result<Basis> {
    let n = grid.len();
    if k >= usize::BITS || n != 1usize << k {
        return Err(Error::NotPowerOfTwo(n));
    }
    let functions = (0..n)
        .map(|s| {
            let row = sequency_to_hadamard(s, k);
            MFunction::new(grid, (0..n).map(|t| walsh_sign(row, t)).collect())
                .expect("walsh samples match the grid")
        })
        .collect();
    let labels = (0..n).map(|s| format!("walsh_{s}")).collect();
    Basis::new(functions, labels)
}

/// How the residual is updated after each coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualUpdate {
    /// `r <- r - c_i g_i`.
    #[default]
    Scaled,
    /// `r <- r - g_i`, kept for comparison.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residual: MFunction,
    /// Integral of `|residual|` after each step.
    pub residual_norms: Vec<f64>,
}

impl TransformResult {
    pub fn to_json(&self) -> String {
        let r = |xs: &[f64]| -> Vec<f64> { xs.iter().map(|x| round_sig(*x, SIGNIFICANT_DIGITS)).collect() };
        let v = json!({
            "labels": self.labels,
            "coefficients": r(&self.coefficients),
            "residual_norms": r(&self.residual_norms),
        });
        let mut s = serde_json::to_string_pretty(&v).expect("transform serialization");
        s.push('\n');
        s
    }
}

/// Walks the basis in order: `c_i = <<r, g_i>> / <<g_i, g_i>>`, then updates
/// the residual.
///
/// Against a `+-1` basis member the mproduct is linear in `r` only while
/// `|r| <= 1`, so exact recovery on the Walsh basis needs residuals within
/// that range.
pub fn greedy_decompose(f: &MFunction, basis: &Basis, update: ResidualUpdate) -> Result<TransformResult> {
    basis.grid().check_same(f.grid())?;
    let mut residual = f.clone();
    let mut coefficients = Vec::with_capacity(basis.len());
    let mut residual_norms = Vec::with_capacity(basis.len());
    for g in basis.functions() {
        let c = common_product(&residual, g)? / common_product(g, g)?;
        let step = match update {
            ResidualUpdate::Scaled => c,
            ResidualUpdate::Literal => 1.0,
        };
        residual = residual.zip_with(g, |r, gv| r - step * gv)?;
        coefficients.push(c);
        residual_norms.push(residual.abs_integral());
    }
    Ok(TransformResult {
        labels: basis.labels().to_vec(),
        coefficients,
        residual,
        residual_norms,
    })
}

/// `sum_i c_i g_i`.
pub fn reconstruct(result: &TransformResult, basis: &Basis) -> Result<MFunction> {
    if result.coefficients.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            actual: result.coefficients.len(),
        });
    }
    let mut acc = vec![0.0; basis.grid().len()];
    for (c, g) in result.coefficients.iter().zip(basis.functions()) {
        for (a, v) in acc.iter_mut().zip(g.samples()) {
            *a += c * v;
        }
    }
    MFunction::new(*basis.grid(), acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramProduct {
    Common,
    Classical,
}

/// Pairwise products of basis members divided by the domain length.
pub fn gram_matrix(basis: &Basis, product: GramProduct) -> Vec<Vec<f64>> {
    let fs = basis.functions();
    let grid = basis.grid();
    let scale = grid.dx() / grid.extent();
    let pair: fn(f64, f64) -> f64 = match product {
        GramProduct::Common => mproduct_scalar,
        GramProduct::Classical => |a, b| a * b,
    };
    let mut g = vec![vec![0.0; fs.len()]; fs.len()];
    for i in 0..fs.len() {
        for j in i..fs.len() {
            let v = scale
                * fs[i]
                    .samples()
                    .iter()
                    .zip(fs[j].samples())
                    .map(|(a, b)| pair(*a, *b))
                    .sum::<f64>();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

//! Uniformly sampled functions and fields viewed as dense msets.
//!
//! Samples are generalized multiplicities attached to grid abscissae. All
//! binary operations require identical grids; nothing is resampled
//! implicitly.

use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::mset::{CombineOp, Element, Mset};

/// Relative tolerance on abscissa spacing when loading sampled CSV data.
pub const UNIFORMITY_TOLERANCE: f64 = 1e-9;
/// Relative rounding allowance for abscissae read back from CSV.
const PRINT_RESOLUTION: f64 = 2e-11;

/// `n` abscissae `x0 + i*dx`, `i` in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x0: f64,
    dx: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {dx}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("sample count must be at least 1".into()));
        }
        Ok(Grid1D { x0, dx, n })
    }

    /// `n` samples covering `[start, end)`.
    pub fn span(start: f64, end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("sample count must be at least 1".into()));
        }
        if !(end > start) {
            return Err(Error::InvalidGrid(format!("empty interval [{start}, {end})")));
        }
        Grid1D::new(start, (end - start) / n as f64, n)
    }

    /// Default experiment grid, `[-1, 1)` with 2048 samples.
    pub fn default_experiment() -> Self {
        Grid1D::span(-1.0, 1.0, 2048).expect("valid default grid")
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Length of the covered interval, `n*dx`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Alignment(format!(
                "grid ({}, {}, {}) differs from ({}, {}, {})",
                self.x0, self.dx, self.n, other.x0, other.dx, other.n
            )))
        }
    }
}

/// A sampled function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct MFunction {
    grid: Grid1D,
    samples: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Combine(CombineOp),
    /// Zero wherever the divisor is zero.
    Quotient,
}

impl PointwiseOp {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            PointwiseOp::Combine(op) => op.apply(a, b),
            PointwiseOp::Quotient => {
                if b == 0.0 {
                    0.0
                } else {
                    a / b
                }
            }
        }
    }
}

impl std::str::FromStr for PointwiseOp {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "quotient" => Ok(PointwiseOp::Quotient),
            other => other.parse().map(PointwiseOp::Combine),
        }
    }
}

impl MFunction {
    pub fn new(grid: Grid1D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("samples must be finite".into()));
        }
        Ok(MFunction { grid, samples })
    }

    pub fn from_vector(values: &[f64], grid: Grid1D) -> Result<Self> {
        MFunction::new(grid, values.to_vec())
    }

    pub fn zeros(grid: Grid1D) -> Self {
        MFunction {
            grid,
            samples: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid1D, value: f64) -> Self {
        MFunction {
            grid,
            samples: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        MFunction {
            grid,
            samples: grid.abscissae().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Sparse view keyed by 1-based sample index. Zero samples drop out.
    pub fn mset_view(&self) -> Mset {
        Mset::from_pairs(
            self.samples
                .iter()
                .enumerate()
                .map(|(i, v)| (Element::from(i + 1), *v)),
        )
    }

    /// Inverse of [`MFunction::mset_view`]. Elements must be 1-based indices
    /// inside the grid.
    pub fn from_mset_view(view: &Mset, grid: Grid1D) -> Result<Self> {
        let mut samples = vec![0.0; grid.len()];
        for (e, m) in view.iter() {
            let k: usize = e
                .as_str()
                .parse()
                .map_err(|_| Error::Format(format!("element `{e}` is not an index")))?;
            if k == 0 || k > grid.len() {
                return Err(Error::Format(format!("index {k} outside the grid")));
            }
            samples[k - 1] = m;
        }
        MFunction::new(grid, samples)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> MFunction {
        MFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &MFunction, f: impl Fn(f64, f64) -> f64) -> Result<MFunction> {
        self.grid.check_same(&other.grid)?;
        Ok(MFunction {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn pointwise(&self, op: PointwiseOp, other: &MFunction) -> Result<MFunction> {
        self.zip_with(other, |a, b| op.apply(a, b))
    }

    pub fn combine(&self, op: CombineOp, other: &MFunction) -> Result<MFunction> {
        self.pointwise(PointwiseOp::Combine(op), other)
    }

    pub fn complement(&self) -> MFunction {
        self.map(|v| -v)
    }

    pub fn scale(&self, c: f64) -> MFunction {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> MFunction {
        self.map(f64::abs)
    }

    /// Left-point rectangle rule, `dx * sum(samples)`.
    pub fn integral(&self) -> f64 {
        self.grid.dx * self.samples.iter().sum::<f64>()
    }

    /// `dx * sum(|samples|)`.
    pub fn abs_integral(&self) -> f64 {
        self.grid.dx * self.samples.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Rescales so that the integral of `|f|` is one.
    pub fn normalize_area(&self) -> Result<MFunction> {
        let area = self.abs_integral();
        if area <= 0.0 {
            return Err(Error::ZeroArea);
        }
        Ok(self.scale(1.0 / area))
    }

    /// Linear interpolation onto `grid`; zero outside the source span.
    pub fn resample(&self, grid: Grid1D) -> MFunction {
        let last = self.samples.len() - 1;
        MFunction::from_fn(grid, |x| {
            let t = (x - self.grid.x0) / self.grid.dx;
            if t < 0.0 || t > last as f64 {
                return 0.0;
            }
            let i = (t.floor() as usize).min(last);
            if i == last {
                return self.samples[last];
            }
            let w = t - i as f64;
            self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
        })
    }

    pub fn max_abs_diff(&self, other: &MFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "value"])?;
        for (x, v) in self.grid.abscissae().zip(&self.samples) {
            w.write_record([fmt_num(x), fmt_num(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads `x,value` rows and rebuilds the grid, rejecting non-uniform spacing.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::Format("expected header `x,value`".into()));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            xs.push(parse_field(&rec, 0)?);
            vs.push(parse_field(&rec, 1)?);
        }
        let grid = infer_grid(&xs)?;
        MFunction::new(grid, vs)
    }
}

fn parse_field(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    let field = rec
        .get(i)
        .ok_or_else(|| Error::Format(format!("missing column {i}")))?;
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("`{field}` is not a number")))
}

fn infer_grid(xs: &[f64]) -> Result<Grid1D> {
    if xs.len() < 2 {
        return Err(Error::Format("need at least two samples to infer the grid".into()));
    }
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(Error::Format("abscissae must be strictly increasing".into()));
    }
    // Abscissae written with 12 significant digits carry up to 5e-12 |x| of
    // rounding; that slack is allowed on top of the spacing tolerance.
    let magnitude = xs[0].abs().max(xs[n - 1].abs());
    let tolerance = UNIFORMITY_TOLERANCE * dx + PRINT_RESOLUTION * magnitude;
    for (i, x) in xs.iter().enumerate() {
        let expected = xs[0] + i as f64 * dx;
        if (x - expected).abs() > tolerance {
            return Err(Error::Format(format!("abscissa {x} at row {} breaks uniform spacing", i + 1)));
        }
    }
    Grid1D::new(xs[0], dx, n)
}

/// Analytic functions that can be sampled by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `exp(-10 x^2)`
    GaussG,
    /// `2 exp(-10 |x - 0.1|)`
    LaplaceH,
    /// `sin(2 pi freq x + phase)`
    Sin { freq: f64, phase: f64 },
    /// `cos(2 pi freq x + phase)`
    Cos { freq: f64, phase: f64 },
    Const(f64),
}

impl Builtin {
    /// Looks up a builtin by name. `freq`/`phase` apply to the sinusoids and
    /// `value` to `const`.
    pub fn from_name(name: &str, freq: f64, phase: f64, value: f64) -> Result<Self> {
        Ok(match name {
            "gauss_g" => Builtin::GaussG,
            "laplace_h" => Builtin::LaplaceH,
            "sin" => Builtin::Sin { freq, phase },
            "cos" => Builtin::Cos { freq, phase },
            "const" => Builtin::Const(value),
            _ => return Err(Error::UnknownBuiltin(name.to_owned())),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Builtin::GaussG => (-10.0 * x * x).exp(),
            Builtin::LaplaceH => 2.0 * (-10.0 * (x - 0.1).abs()).exp(),
            Builtin::Sin { freq, phase } => (2.0 * PI * freq * x + phase).sin(),
            Builtin::Cos { freq, phase } => (2.0 * PI * freq * x + phase).cos(),
            Builtin::Const(c) => c,
        }
    }

    pub fn sample(&self, grid: Grid1D) -> MFunction {
        MFunction::from_fn(grid, |x| self.eval(x))
    }
}

/// Column-major index mapping between an `ni x nj` matrix (1-based) and a
/// flat 0-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMap {
    ni: usize,
    nj: usize,
}

impl IndexMap {
    pub fn new(ni: usize, nj: usize) -> Result<Self> {
        if ni == 0 || nj == 0 {
            return Err(Error::InvalidArgument("index map dimensions must be positive".into()));
        }
        Ok(IndexMap { ni, nj })
    }

    pub fn size(&self) -> usize {
        self.ni * self.nj
    }

    pub fn flatten(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || i > self.ni || j == 0 || j > self.nj {
            return Err(Error::IndexOutOfRange { i, j, ni: self.ni, nj: self.nj });
        }
        Ok(self.ni * (j - 1) + i - 1)
    }

    pub fn unflatten(&self, k: usize) -> Result<(usize, usize)> {
        if k >= self.size() {
            return Err(Error::FlatIndexOutOfRange { k, size: self.size() });
        }
        Ok((k % self.ni + 1, k / self.ni + 1))
    }

    /// Mset view of a column-major matrix, keyed by flat index.
    pub fn matrix_mset(&self, values: &[f64]) -> Result<Mset> {
        if values.len() != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), actual: values.len() });
        }
        Ok(Mset::from_pairs(
            values.iter().enumerate().map(|(k, v)| (Element::from(k), *v)),
        ))
    }
}

/// Regular 2-D grid; sample `(ix, iy)` sits at `(x0 + ix*dx, y0 + iy*dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Grid2D { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        self.x.dx() * self.y.dx()
    }

    pub fn check_same(&self, other: &Grid2D) -> Result<()> {
        self.x.check_same(&other.x)?;
        self.y.check_same(&other.y)
    }
}

/// Scalar field sampled on a [`Grid2D`], stored row-major with `y` as the
/// outer index.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    samples: Vec<f64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), actual: samples.len() });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("samples must be finite".into()));
        }
        Ok(Field2D { grid, samples })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.samples[iy * self.grid.x.len() + ix]
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.samples.iter().sum::<f64>()
    }

    pub fn scale(&self, c: f64) -> Field2D {
        Field2D {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v * c).collect(),
        }
    }

    pub fn combine(&self, op: CombineOp, other: &Field2D) -> Result<Field2D> {
        self.grid.check_same(&other.grid)?;
        Ok(Field2D {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| op.apply(*a, *b))
                .collect(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "value"])?;
        for iy in 0..self.grid.y.len() {
            for ix in 0..self.grid.x.len() {
                w.write_record([
                    fmt_num(self.grid.x.x(ix)),
                    fmt_num(self.grid.y.x(iy)),
                    fmt_num(self.get(ix, iy)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 3 || &headers[0] != "x" || &headers[1] != "y" || &headers[2] != "value" {
            return Err(Error::Format("expected header `x,y,value`".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push((parse_field(&rec, 0)?, parse_field(&rec, 1)?, parse_field(&rec, 2)?));
        }
        let nx = rows
            .iter()
            .position(|r| r.1 != rows[0].1)
            .unwrap_or(rows.len());
        if nx == 0 || rows.len() % nx != 0 {
            return Err(Error::Format("field rows do not form a rectangle".into()));
        }
        let xs: Vec<f64> = rows[..nx].iter().map(|r| r.0).collect();
        let ys: Vec<f64> = rows.iter().step_by(nx).map(|r| r.1).collect();
        let grid = Grid2D::new(infer_grid(&xs)?, infer_grid(&ys)?);
        for (k, row) in rows.iter().enumerate() {
            if row.0 != xs[k % nx] || row.1 != ys[k / nx] {
                return Err(Error::Format(format!("row {} is out of order", k + 1)));
            }
        }
        Field2D::new(grid, rows.into_iter().map(|r| r.2).collect())
    }
}

//! Convolution and correlation with the mproduct in place of the ordinary
//! product, a Jaccard-per-lag similarity correlation, and the classical
//! cross-correlation as a baseline.
//!
//! All operators zero-pad their operands and evaluate every lag with a
//! nonzero overlap, directly in `O(n*m)`. Lags are independent and are
//! evaluated on the rayon pool; each lag is summed sequentially so the
//! output does not depend on the thread count.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::format::{fmt_num, round_sig, SIGNIFICANT_DIGITS};
use crate::mfunction::{Grid1D, MFunction};
use crate::similarity::mproduct_scalar;

/// Relative tolerance when matching the sample steps of two operands.
const STEP_TOLERANCE: f64 = 1e-9;

/// Values on a uniform lag grid `origin + k*step`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagSeries {
    origin: f64,
    step: f64,
    values: Vec<f64>,
}

impl LagSeries {
    pub fn new(origin: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidArgument("lag step must be positive".into()));
        }
        Ok(LagSeries { origin, step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn lag(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    pub fn lags(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.lag(k)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the lag closest to `y`.
    pub fn index_of(&self, y: f64) -> Option<usize> {
        if self.values.is_empty() {
            return None;
        }
        let k = ((y - self.origin) / self.step).round();
        (k >= 0.0 && (k as usize) < self.values.len()).then_some(k as usize)
    }

    pub fn value_at(&self, y: f64) -> Option<f64> {
        self.index_of(y).map(|k| self.values[k])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lag", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([fmt_num(self.lag(k)), fmt_num(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn common_step(f: &MFunction, g: &MFunction) -> Result<f64> {
    let (a, b) = (f.grid().dx(), g.grid().dx());
    if (a - b).abs() > STEP_TOLERANCE * a.max(b) {
        return Err(Error::Alignment(format!("sample steps differ: {a} vs {b}")));
    }
    Ok(a)
}

/// Evaluates `kernel(i_lo, i_hi, shift)` for every correlation lag
/// `k = i - j`, where `i` indexes `f`, `j = i - shift` indexes `g`, and
/// `i_lo..=i_hi` is the overlap.
fn correlation_lags<K>(n: usize, m: usize, kernel: K) -> Vec<f64>
where
    K: Fn(usize, usize, isize) -> f64 + Sync,
{
    let count = n + m - 1;
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let shift = idx as isize - (m as isize - 1);
            let lo = shift.max(0) as usize;
            let hi = ((m as isize - 1 + shift) as usize).min(n - 1);
            kernel(lo, hi, shift)
        })
        .collect()
}

fn correlation_series<P>(f: &MFunction, g: &MFunction, product: P) -> Result<LagSeries>
where
    P: Fn(f64, f64) -> f64 + Sync,
{
    let dx = common_step(f, g)?;
    let (fs, gs) = (f.samples(), g.samples());
    let (n, m) = (fs.len(), gs.len());
    let values = correlation_lags(n, m, |lo, hi, shift| {
        let mut acc = 0.0;
        for i in lo..=hi {
            acc += product(fs[i], gs[(i as isize - shift) as usize]);
        }
        dx * acc
    });
    LagSeries::new(correlation_origin(f, g, dx), dx, values)
}

fn correlation_origin(f: &MFunction, g: &MFunction, dx: f64) -> f64 {
    f.grid().x0() - g.grid().x0() - (g.grid().len() as f64 - 1.0) * dx
}

/// `y -> integral of mproduct(f(x), g(y - x)) dx`, on lags
/// `f.x0 + g.x0 + k*dx`, `k` in `[0, n + m - 1)`.
pub fn mconvolve(f: &MFunction, g: &MFunction) -> Result<LagSeries> {
    let dx = common_step(f, g)?;
    let (fs, gs) = (f.samples(), g.samples());
    let (n, m) = (fs.len(), gs.len());
    let values = (0..n + m - 1)
        .into_par_iter()
        .map(|k| {
            let lo = k.saturating_sub(m - 1);
            let hi = k.min(n - 1);
            dx * (lo..=hi).map(|i| mproduct_scalar(fs[i], gs[k - i])).sum::<f64>()
        })
        .collect();
    LagSeries::new(f.grid().x0() + g.grid().x0(), dx, values)
}

/// `y -> integral of mproduct(f(x), g(x - y)) dx`.
pub fn mcorrelate(f: &MFunction, g: &MFunction) -> Result<LagSeries> {
    correlation_series(f, g, mproduct_scalar)
}

/// Classical `y -> integral of f(x) g(x - y) dx`, on the same lags as
/// [`mcorrelate`].
pub fn cross_correlate(f: &MFunction, g: &MFunction) -> Result<LagSeries> {
    correlation_series(f, g, |a, b| a * b)
}

/// Jaccard index between `f` and `g` shifted by each lag: common product over
/// sup product, both taken over the whole zero-padded line. Lags where both
/// vanish give 0.
pub fn scorrelate(f: &MFunction, g: &MFunction) -> Result<LagSeries> {
    let dx = common_step(f, g)?;
    let (fs, gs) = (f.samples(), g.samples());
    let (n, m) = (fs.len(), gs.len());
    let prefix = |s: &[f64]| {
        let mut p = Vec::with_capacity(s.len() + 1);
        p.push(0.0);
        let mut acc = 0.0;
        for v in s {
            acc += v.abs();
            p.push(acc);
        }
        p
    };
    let (pf, pg) = (prefix(fs), prefix(gs));
    let values = correlation_lags(n, m, |lo, hi, shift| {
        let mut shared = 0.0;
        let mut union = 0.0;
        for i in lo..=hi {
            let (a, b) = (fs[i], gs[(i as isize - shift) as usize]);
            shared += mproduct_scalar(a, b);
            union += a.abs().max(b.abs());
        }
        let (jlo, jhi) = ((lo as isize - shift) as usize, (hi as isize - shift) as usize);
        union += pf[lo] + (pf[n] - pf[hi + 1]);
        union += pg[jlo] + (pg[m] - pg[jhi + 1]);
        if union == 0.0 {
            0.0
        } else {
            shared / union
        }
    });
    LagSeries::new(correlation_origin(f, g, dx), dx, values)
}

/// Primary peak, strongest well-separated secondary peak and peak width.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub primary_lag: f64,
    pub primary_value: f64,
    pub secondary_lag: Option<f64>,
    pub secondary_value: f64,
    pub secondary_ratio: f64,
    pub fwhm: f64,
}

impl PeakReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let r = |x: f64| round_sig(x, SIGNIFICANT_DIGITS);
        json!({
            "primary_lag": r(self.primary_lag),
            "primary_value": r(self.primary_value),
            "secondary_lag": self.secondary_lag.map(r),
            "secondary_value": r(self.secondary_value),
            "secondary_ratio": r(self.secondary_ratio),
            "fwhm": r(self.fwhm),
        })
    }
}

/// Global maximum, its full width at half maximum (linear interpolation,
/// clipped at the series ends), and the largest local maximum at least one
/// FWHM away from it.
pub fn peak_report(series: &LagSeries) -> Result<PeakReport> {
    let v = series.values();
    if v.is_empty() || v.iter().all(|x| *x == v[0]) {
        return Err(Error::NoPeak);
    }
    let p = v
        .iter()
        .enumerate()
        .fold(0, |best, (i, x)| if *x > v[best] { i } else { best });
    let peak = v[p];
    let half = peak / 2.0;
    let step = series.step();

    let mut left = series.lag(0);
    for i in (0..p).rev() {
        if v[i] <= half {
            let t = (half - v[i]) / (v[i + 1] - v[i]);
            left = series.lag(i) + t * step;
            break;
        }
    }
    let mut right = series.lag(v.len() - 1);
    for i in p + 1..v.len() {
        if v[i] <= half {
            let t = (v[i - 1] - half) / (v[i - 1] - v[i]);
            right = series.lag(i - 1) + t * step;
            break;
        }
    }
    let fwhm = right - left;

    let last = v.len() - 1;
    // Plateaus count once, at their left edge.
    let is_local_max = |i: usize| match (i == 0, i == last) {
        (true, true) => false,
        (true, false) => v[0] > v[1],
        (false, true) => v[last] > v[last - 1],
        (false, false) => v[i] > v[i - 1] && v[i] >= v[i + 1],
    };
    let primary_lag = series.lag(p);
    let secondary = (0..v.len())
        .filter(|&i| i != p && is_local_max(i) && (series.lag(i) - primary_lag).abs() >= fwhm)
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if v[b] >= v[i] => Some(b),
            _ => Some(i),
        });
    let secondary_value = secondary.map_or(0.0, |i| v[i].max(0.0));
    let secondary_ratio = if peak > 0.0 { secondary_value / peak } else { 0.0 };
    Ok(PeakReport {
        primary_lag,
        primary_value: peak,
        secondary_lag: secondary.map(|i| series.lag(i)),
        secondary_value,
        secondary_ratio,
        fwhm,
    })
}

/// Seed of the template-matching benchmark noise.
pub const BENCHMARK_SEED: u64 = 42;
/// Template copy positions in the benchmark signal.
pub const BENCHMARK_POSITIONS: [f64; 3] = [2.0, 5.0, 8.0];
/// Amplitudes of the template copies, in position order.
pub const BENCHMARK_AMPLITUDES: [f64; 3] = [1.0, 0.55, 0.8];
const BENCHMARK_SAMPLES: usize = 4096;
const BENCHMARK_NOISE: f64 = 0.05;
const TEMPLATE_SAMPLES: usize = 574;

/// Positive lobe at 0.5 minus a smaller negative lobe at 0.9.
pub fn benchmark_template_shape(x: f64) -> f64 {
    (-40.0 * (x - 0.5).powi(2)).exp() - 0.6 * (-40.0 * (x - 0.9).powi(2)).exp()
}

/// Synthetic template-matching fixture: `(signal, template)`.
///
/// The signal lives on `[0, 10)` with 4096 samples and holds three scaled
/// copies of the template shape plus seeded uniform noise in `[-0.05, 0.05)`.
/// The template is the bare shape on `[0, 1.4]` at the same step, so a
/// correlation peak at lag `y` means a copy starting at `y`.
pub fn template_benchmark() -> (MFunction, MFunction) {
    let grid = Grid1D::span(0.0, 10.0, BENCHMARK_SAMPLES).expect("benchmark grid");
    let mut rng = ChaCha8Rng::seed_from_u64(BENCHMARK_SEED);
    let signal = MFunction::from_fn(grid, |x| {
        BENCHMARK_POSITIONS
            .iter()
            .zip(BENCHMARK_AMPLITUDES)
            .map(|(c, a)| a * benchmark_template_shape(x - c))
            .sum()
    });
    let noisy: Vec<f64> = signal
        .samples()
        .iter()
        .map(|v| v + rng.gen_range(-BENCHMARK_NOISE..BENCHMARK_NOISE))
        .collect();
    let signal = MFunction::new(grid, noisy).expect("finite samples");
    let tgrid = Grid1D::new(0.0, grid.dx(), TEMPLATE_SAMPLES).expect("template grid");
    let template = MFunction::from_fn(tgrid, benchmark_template_shape);
    (signal, template)
}

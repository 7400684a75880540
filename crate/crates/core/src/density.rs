//! Gaussian KDE fields for labeled 2-D point clouds and Jaccard comparison
//! of the resulting densities.

use std::io::Read;

use log::warn;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::format::{round_sig, SIGNIFICANT_DIGITS};
use crate::mfunction::{Field2D, Grid1D, Grid2D};

/// Grid cells per axis for [`default_grid`].
pub const DEFAULT_CELLS: usize = 256;
/// Margin around the points, in bandwidths, for [`default_grid`].
pub const GRID_MARGIN: f64 = 4.0;
/// Below this margin (in bandwidths) [`kde2d`] warns about truncated mass.
pub const MIN_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledPoints {
    points: Vec<LabeledPoint>,
}

impl LabeledPoints {
    pub fn new(points: Vec<LabeledPoint>) -> Self {
        LabeledPoints { points }
    }

    /// Reads `x,y,label` rows.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 3 || &headers[0] != "x" || &headers[1] != "y" || &headers[2] != "label" {
            return Err(Error::Format("expected header `x,y,label`".into()));
        }
        let mut points = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                let v: f64 = rec[i]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("row {}: `{}` is not a number", row + 1, &rec[i])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Format(format!("row {}: non-finite coordinate", row + 1)))
                }
            };
            points.push(LabeledPoint {
                x: num(0)?,
                y: num(1)?,
                label: rec[2].trim().to_owned(),
            });
        }
        Ok(LabeledPoints { points })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    /// Distinct labels in order of first appearance.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.label) {
                out.push(p.label.clone());
            }
        }
        out
    }

    pub fn coords_for(&self, label: &str) -> Vec<[f64; 2]> {
        self.points
            .iter()
            .filter(|p| p.label == label)
            .map(|p| [p.x, p.y])
            .collect()
    }
}

/// A unit-mass density on a 2-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeField {
    pub field: Field2D,
    pub label: String,
    pub bandwidth: f64,
}

/// `n^(-1/6)` times the root mean of the per-axis sample variances.
pub fn default_bandwidth(points: &[[f64; 2]]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two points to choose a bandwidth".into(),
        ));
    }
    let var = |axis: usize| {
        let mean = points.iter().map(|p| p[axis]).sum::<f64>() / n as f64;
        points.iter().map(|p| (p[axis] - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    };
    let spread = ((var(0) + var(1)) / 2.0).sqrt();
    let bw = (n as f64).powf(-1.0 / 6.0) * spread;
    if bw > 0.0 {
        Ok(bw)
    } else {
        Err(Error::InvalidArgument("points are coincident; pass a bandwidth".into()))
    }
}

/// Bounding box of all points grown by `margin` on every side, `cells`
/// samples per axis.
pub fn default_grid(points: &[[f64; 2]], margin: f64, cells: usize) -> Result<Grid2D> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    let axis = |a: usize| -> Result<Grid1D> {
        let lo = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
        Grid1D::span(lo - margin, hi + margin, cells)
    };
    Ok(Grid2D::new(axis(0)?, axis(1)?))
}

/// Sum of isotropic Gaussians (standard deviation `bandwidth`) centred on
/// the points, scaled to unit mass on `grid`.
pub fn kde2d(points: &[[f64; 2]], label: &str, grid: Grid2D, bandwidth: f64) -> Result<KdeField> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    let (gx, gy) = (grid.x, grid.y);
    let margin = MIN_MARGIN * bandwidth;
    let x_hi = gx.x(gx.len() - 1);
    let y_hi = gy.x(gy.len() - 1);
    if points.iter().any(|p| {
        p[0] - margin < gx.x0() || p[0] + margin > x_hi || p[1] - margin < gy.x0() || p[1] + margin > y_hi
    }) {
        warn!("grid leaves less than {MIN_MARGIN} bandwidths around `{label}` points; mass near the edges is truncated");
    }

    let inv = -0.5 / (bandwidth * bandwidth);
    let profile = |axis: Grid1D, c: f64| -> Vec<f64> {
        axis.abscissae().map(|x| ((x - c) * (x - c) * inv).exp()).collect()
    };
    let kx: Vec<Vec<f64>> = points.iter().map(|p| profile(gx, p[0])).collect();
    let ky: Vec<Vec<f64>> = points.iter().map(|p| profile(gy, p[1])).collect();

    let nx = gx.len();
    let mut samples = vec![0.0; grid.len()];
    samples.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
        for (px, py) in kx.iter().zip(&ky) {
            let w = py[iy];
            if w == 0.0 {
                continue;
            }
            for (cell, k) in row.iter_mut().zip(px) {
                *cell += w * k;
            }
        }
    });
    let field = Field2D::new(grid, samples)?;
    let mass = field.integral();
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "density for `{label}` vanishes on the grid"
        )));
    }
    Ok(KdeField {
        field: field.scale(1.0 / mass),
        label: label.to_owned(),
        bandwidth,
    })
}

fn min_max_ratio(fields: &[&Field2D]) -> Result<f64> {
    for f in &fields[1..] {
        fields[0].grid().check_same(f.grid())?;
    }
    let mut lo_sum = 0.0;
    let mut hi_sum = 0.0;
    for i in 0..fields[0].samples().len() {
        let (lo, hi) = fields
            .iter()
            .map(|f| f.samples()[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        lo_sum += lo;
        hi_sum += hi;
    }
    Ok(if hi_sum == 0.0 { 1.0 } else { lo_sum / hi_sum })
}

/// Pairwise Jaccard indices, `sum(min) / sum(max)`. Symmetric with unit
/// diagonal.
pub fn cluster_jaccard_matrix(fields: &[KdeField]) -> Result<Vec<Vec<f64>>> {
    let n = fields.len();
    let mut m = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = min_max_ratio(&[&fields[i].field, &fields[j].field])?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Jaccard index of the whole family: minimum over all fields divided by the
/// maximum.
pub fn cluster_jaccard_multi(fields: &[KdeField]) -> Result<f64> {
    if fields.len() < 2 {
        return Err(Error::InvalidArgument("multiway comparison needs at least two fields".into()));
    }
    let refs: Vec<&Field2D> = fields.iter().map(|f| &f.field).collect();
    if refs.iter().any(|f| f.samples().iter().any(|v| *v < 0.0)) {
        return Err(Error::NegativeInput);
    }
    min_max_ratio(&refs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterComparison {
    pub labels: Vec<String>,
    pub bandwidths: Vec<f64>,
    pub jaccard: Vec<Vec<f64>>,
    /// Whole-family index; present with three or more labels.
    pub multiway: Option<f64>,
}

impl ClusterComparison {
    pub fn to_json(&self) -> String {
        let r = |x: f64| round_sig(x, SIGNIFICANT_DIGITS);
        let v = json!({
            "labels": self.labels,
            "bandwidths": self.bandwidths.iter().map(|b| r(*b)).collect::<Vec<_>>(),
            "jaccard": self.jaccard.iter().map(|row| row.iter().map(|x| r(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "multiway": self.multiway.map(r),
        });
        let mut s = serde_json::to_string_pretty(&v).expect("cluster serialization");
        s.push('\n');
        s
    }
}

/// Builds one KDE per label on a shared default grid and compares them.
/// `bandwidth` overrides the per-label default.
pub fn compare_clusters(points: &LabeledPoints, bandwidth: Option<f64>, cells: usize) -> Result<ClusterComparison> {
    let labels = points.labels();
    if labels.is_empty() {
        return Err(Error::EmptyPoints);
    }
    let groups: Vec<Vec<[f64; 2]>> = labels.iter().map(|l| points.coords_for(l)).collect();
    let bandwidths = groups
        .iter()
        .map(|g| bandwidth.map_or_else(|| default_bandwidth(g), Ok))
        .collect::<Result<Vec<f64>>>()?;
    let all: Vec<[f64; 2]> = groups.iter().flatten().copied().collect();
    let max_bw = bandwidths.iter().copied().fold(0.0, f64::max);
    let grid = default_grid(&all, GRID_MARGIN * max_bw, cells)?;
    let fields = labels
        .iter()
        .zip(&groups)
        .zip(&bandwidths)
        .map(|((l, g), bw)| kde2d(g, l, grid, *bw))
        .collect::<Result<Vec<_>>>()?;
    let jaccard = cluster_jaccard_matrix(&fields)?;
    let multiway = if fields.len() >= 3 {
        Some(cluster_jaccard_multi(&fields)?)
    } else {
        None
    };
    Ok(ClusterComparison {
        labels,
        bandwidths,
        jaccard,
        multiway,
    })
}

//! Trial-function representations and the pointwise operators used by the
//! truncation and maximal-function machinery.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("bump displacement too small (|a| = {0}): supports overlap")]
    Overlap(f64),
    #[error("grid is not dyadic: {0}")]
    GridNotDyadic(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad descriptor: {0}")]
    Descriptor(String),
}

/// Radial profiles: analytic families plus sampled log-grid profiles.
///
/// Every shape reports a support interval [inner, outer]; outside it the
/// function is zero (or below 1e-14 and treated as zero).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape")]
pub enum RadialShape {
    /// exp(-r^2 / sigma^2), truncated where it falls below 1e-14.
    Gaussian { sigma: f64 },
    /// The fixed mollifier bump: 1 on B_{1/8}, supported in B_{1/4}.
    Mollifier,
    /// Sum of radial Gaussian ridges a_i exp(-(r - c_i)^2 / w_i^2).
    GaussianMixture {
        amplitudes: Vec<f64>,
        centers: Vec<f64>,
        widths: Vec<f64>,
    },
    /// Smooth bump supported in the annulus {r0 < r < r1}.
    AnnulusBump { r0: f64, r1: f64 },
    /// r^{-expo} smoothly cut to zero outside [r0, r1] (near-extremal shape).
    PowerCutoff { expo: f64, r0: f64, r1: f64 },
    /// Sampled radial profile with monotone cubic interpolation between nodes.
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
    /// Dilation r -> inner(lambda r).
    Dilated { inner: Box<RadialShape>, lambda: f64 },
}

/// Smooth transition: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let e = |u: f64| (-1.0 / u).exp();
        e(t) / (e(t) + e(1.0 - t))
    }
}

fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    // Central difference is adequate here; the analytic form is unwieldy.
    let h = 1e-6_f64.min(t.min(1.0 - t) * 0.5);
    (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h)
}

/// The mollifier profile eta(r): 1 on [0, 1/8], 0 beyond 1/4.
pub fn mollifier(r: f64) -> f64 {
    smooth_step((0.25 - r) / 0.125)
}

pub fn mollifier_deriv(r: f64) -> f64 {
    -smooth_step_deriv((0.25 - r) / 0.125) / 0.125
}

impl RadialShape {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialShape::Gaussian { sigma } => {
                let v = (-(r / sigma).powi(2)).exp();
                if v < 1e-14 {
                    0.0
                } else {
                    v
                }
            }
            RadialShape::Mollifier => mollifier(r),
            RadialShape::GaussianMixture {
                amplitudes,
                centers,
                widths,
            } => amplitudes
                .iter()
                .zip(centers)
                .zip(widths)
                .map(|((&a, &c), &w)| a * (-((r - c) / w).powi(2)).exp())
                .sum(),
            RadialShape::AnnulusBump { r0, r1 } => {
                if r <= *r0 || r >= *r1 {
                    0.0
                } else {
                    let t = (r - r0) / (r1 - r0);
                    (-1.0 / (t * (1.0 - t))).exp() * 54.598150033144236 // e^4: peak normalized to 1
                }
            }
            RadialShape::PowerCutoff { expo, r0, r1 } => {
                if r <= *r0 || r >= *r1 {
                    0.0
                } else {
                    // Logarithmically wide transitions keep the cutoff
                    // energy small next to the bulk of the power profile.
                    let decades = (r1 / r0).log10();
                    let w = (decades / 4.0).min(2.0).max(0.25);
                    let cut_in = smooth_step((r / r0).log10() / w);
                    let cut_out = smooth_step((r1 / r).log10() / w);
                    r.powf(-expo) * cut_in * cut_out
                }
            }
            RadialShape::Sampled { nodes, values } => pchip_eval(nodes, values, r),
            RadialShape::Dilated { inner, lambda } => inner.eval(lambda * r),
        }
    }

    pub fn deriv(&self, r: f64) -> f64 {
        match self {
            RadialShape::Gaussian { sigma } => {
                -2.0 * r / (sigma * sigma) * (-(r / sigma).powi(2)).exp()
            }
            RadialShape::Mollifier => mollifier_deriv(r),
            RadialShape::GaussianMixture {
                amplitudes,
                centers,
                widths,
            } => amplitudes
                .iter()
                .zip(centers)
                .zip(widths)
                .map(|((&a, &c), &w)| {
                    -2.0 * (r - c) / (w * w) * a * (-((r - c) / w).powi(2)).exp()
                })
                .sum(),
            RadialShape::Dilated { inner, lambda } => lambda * inner.deriv(lambda * r),
            _ => {
                // Central differences with h-refinement for shapes without analytic form.
                let h = 1e-5 * (1.0 + r.abs());
                (self.eval(r + h) - self.eval(r - h)) / (2.0 * h)
            }
        }
    }

    /// Support interval [inner, outer] (inner > 0 for annulus-type shapes).
    pub fn support(&self) -> (f64, f64) {
        match self {
            RadialShape::Gaussian { sigma } => (0.0, sigma * (14.0 * std::f64::consts::LN_10).sqrt()),
            RadialShape::Mollifier => (0.0, 0.25),
            RadialShape::GaussianMixture {
                centers, widths, ..
            } => {
                let reach = (14.0 * std::f64::consts::LN_10).sqrt();
                let outer = centers
                    .iter()
                    .zip(widths)
                    .map(|(&c, &w)| c + w * reach)
                    .fold(0.0, f64::max);
                (0.0, outer)
            }
            RadialShape::AnnulusBump { r0, r1 } => (*r0, *r1),
            RadialShape::PowerCutoff { r0, r1, .. } => (*r0, *r1),
            RadialShape::Sampled { nodes, .. } => (0.0, *nodes.last().unwrap_or(&1.0)),
            RadialShape::Dilated { inner, lambda } => {
                let (a, b) = inner.support();
                (a / lambda, b / lambda)
            }
        }
    }

    pub fn dilate(&self, lambda: f64) -> RadialShape {
        RadialShape::Dilated {
            inner: Box::new(self.clone()),
            lambda,
        }
    }
}

/// Monotone cubic (Fritsch-Carlson) interpolation, zero outside the node range.
fn pchip_eval(nodes: &[f64], values: &[f64], r: f64) -> f64 {
    let n = nodes.len();
    if n == 0 || r < nodes[0] || r > nodes[n - 1] {
        return 0.0;
    }
    if n == 1 {
        return values[0];
    }
    let i = match nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    };
    let h = nodes[i + 1] - nodes[i];
    let t = (r - nodes[i]) / h;
    let delta: Vec<f64> = (0..n - 1)
        .map(|k| (values[k + 1] - values[k]) / (nodes[k + 1] - nodes[k]))
        .collect();
    let slope = |k: usize| -> f64 {
        if k == 0 {
            delta[0]
        } else if k == n - 1 {
            delta[n - 2]
        } else if delta[k - 1] * delta[k] <= 0.0 {
            0.0
        } else {
            // Harmonic mean keeps the interpolant monotone on each interval.
            2.0 / (1.0 / delta[k - 1] + 1.0 / delta[k])
        }
    };
    let (m0, m1) = (slope(i), slope(i + 1));
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    h00 * values[i] + h10 * h * m0 + h01 * values[i + 1] + h11 * h * m1
}

/// Uniform tensor grid over [origin, origin + n*h]^d, cell-centered values in
/// row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunction {
    pub d: u32,
    pub n: usize,
    pub h: f64,
    pub origin: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(d: u32, n: usize, h: f64, origin: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n.pow(d));
        assert_eq!(origin.len(), d as usize);
        GridFunction {
            d,
            n,
            h,
            origin,
            values,
        }
    }

    /// Build a 1-D grid on [-l, l] from a function of x.
    pub fn sample_1d(n: usize, l: f64, f: impl Fn(f64) -> f64) -> Self {
        let h = 2.0 * l / n as f64;
        let values = (0..n).map(|i| f(-l + (i as f64 + 0.5) * h)).collect();
        GridFunction::new(1, n, h, vec![-l], values)
    }

    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + (i as f64 + 0.5) * self.h)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.d as i32)
    }

    /// Iterate multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let d = self.d as usize;
        let n = self.n;
        (0..self.values.len()).map(move |flat| {
            let mut idx = vec![0usize; d];
            let mut rem = flat;
            for k in (0..d).rev() {
                idx[k] = rem % n;
                rem /= n;
            }
            idx
        })
    }
}

/// Binary grid payload: one line of JSON header, then row-major f64 LE values.
pub fn save_grid(path: &Path, g: &GridFunction) -> Result<(), ProfileError> {
    #[derive(Serialize)]
    struct Header<'a> {
        d: u32,
        n: usize,
        h: f64,
        origin: &'a [f64],
    }
    let mut f = std::fs::File::create(path)?;
    let header = serde_json::to_string(&Header {
        d: g.d,
        n: g.n,
        h: g.h,
        origin: &g.origin,
    })
    .map_err(|e| ProfileError::Descriptor(e.to_string()))?;
    writeln!(f, "{header}")?;
    for v in &g.values {
        f.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_grid(path: &Path) -> Result<GridFunction, ProfileError> {
    #[derive(Deserialize)]
    struct Header {
        d: u32,
        n: usize,
        h: f64,
        origin: Vec<f64>,
    }
    let data = std::fs::read(path)?;
    let nl = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| ProfileError::Descriptor("missing header line".into()))?;
    let header: Header = serde_json::from_slice(&data[..nl])
        .map_err(|e| ProfileError::Descriptor(e.to_string()))?;
    let mut values = Vec::with_capacity(header.n.pow(header.d));
    let mut body = &data[nl + 1..];
    let mut buf = [0u8; 8];
    while body.len() >= 8 {
        body.read_exact(&mut buf)?;
        values.push(f64::from_le_bytes(buf));
    }
    if values.len() != header.n.pow(header.d) {
        return Err(ProfileError::Descriptor("value count mismatch".into()));
    }
    Ok(GridFunction::new(
        header.d,
        header.n,
        header.h,
        header.origin,
        values,
    ))
}

/// A trial function: radial profile, tensor grid, or bump train.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum TrialFunction {
    Radial { d: u32, shape: RadialShape },
    Grid { grid: GridFunction },
    BumpTrain { d: u32, m: usize, a: Vec<f64> },
}

/// Build a bump train v(x) = sum_{k=1..m} eta(x + k a).
pub fn bump_train(m: usize, a: Vec<f64>, d: u32) -> Result<TrialFunction, ProfileError> {
    assert!(m >= 1);
    assert_eq!(a.len(), d as usize);
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 0.5 {
        return Err(ProfileError::Overlap(norm));
    }
    Ok(TrialFunction::BumpTrain { d, m, a })
}

// ---------------------------------------------------------------------------
// Truncation operators
// ---------------------------------------------------------------------------

/// Base-10 layer truncation of a nonnegative value at level k.
pub fn truncate_value(g: f64, k: i32) -> f64 {
    let lo = 10f64.powi(k);
    let hi = 10f64.powi(k + 1);
    if g > hi {
        hi - lo
    } else if g > lo {
        g - lo
    } else {
        0.0
    }
}

/// Apply the level-k truncation pointwise to |g|.
pub fn truncate(values: &[f64], k: i32) -> Vec<f64> {
    values.iter().map(|&v| truncate_value(v.abs(), k)).collect()
}

/// Level range covering all values in [lo, hi].
pub fn level_range(values: &[f64]) -> (i32, i32) {
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max <= 0.0 {
        return (0, 0);
    }
    let top = max.log10().ceil() as i32 + 1;
    // 10^k below ~1e-18 * max contributes below f64 resolution of the sum.
    let bottom = top - 20;
    (bottom, top)
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    /// max_z | sum_k T_k(|g|)(z) - |g(z)| |.
    pub reconstruction_violation: f64,
    /// max over pairs of sum_k |g_k(x) - g_k(y)| - |g(x) - g(y)| (should be <= 0).
    pub contraction_violation: f64,
}

/// Check the exact truncation identities on sample values and pairs.
pub fn truncation_identities_check(samples: &[f64], pairs: &[(f64, f64)]) -> TruncationReport {
    let mut recon = 0.0f64;
    for &z in samples {
        let g = z.abs();
        let (lo, hi) = level_range(&[g]);
        let total: f64 = (lo..=hi).map(|k| truncate_value(g, k)).sum();
        recon = recon.max((total - g).abs());
    }
    let mut contr = f64::NEG_INFINITY;
    for &(x, y) in pairs {
        let (gx, gy) = (x.abs(), y.abs());
        let (lo, hi) = level_range(&[gx, gy]);
        let total: f64 = (lo..=hi)
            .map(|k| (truncate_value(gx, k) - truncate_value(gy, k)).abs())
            .sum();
        contr = contr.max(total - (gx - gy).abs());
    }
    if pairs.is_empty() {
        contr = 0.0;
    }
    TruncationReport {
        reconstruction_violation: recon,
        contraction_violation: contr,
    }
}

// ---------------------------------------------------------------------------
// Dyadic maximal functions
// ---------------------------------------------------------------------------

/// Dyadic maximal function on a uniform grid over a dyadic cube [0, 2^J)^d.
///
/// Each grid cell is a unit cell; dyadic cubes are the aligned blocks with
/// side 2^l cells, l = 0..=J. Averages are exact sums over grid cells.
pub fn dyadic_maximal(g: &GridFunction) -> Result<GridFunction, ProfileError> {
    dyadic_scan(g, true)
}

/// Dyadic sharp maximal function: max over dyadic cubes of the mean
/// oscillation of g.
pub fn dyadic_sharp(g: &GridFunction) -> Result<GridFunction, ProfileError> {
    dyadic_scan(g, false)
}

fn dyadic_scan(g: &GridFunction, maximal: bool) -> Result<GridFunction, ProfileError> {
    let n = g.n;
    if !n.is_power_of_two() {
        return Err(ProfileError::GridNotDyadic(format!(
            "side {n} is not a power of two"
        )));
    }
    if g.d != 1 && g.d != 2 {
        return Err(ProfileError::GridNotDyadic(
            "dyadic scan supports d in {1, 2}".into(),
        ));
    }
    let levels = n.trailing_zeros() as usize;
    let mut out = vec![f64::NEG_INFINITY; g.values.len()];
    if g.d == 1 {
        for l in 0..=levels {
            let side = 1usize << l;
            for b in 0..(n / side) {
                let block = &g.values[b * side..(b + 1) * side];
                let v = block_stat(block.iter().copied(), side, maximal);
                for i in b * side..(b + 1) * side {
                    out[i] = out[i].max(v);
                }
            }
        }
    } else {
        for l in 0..=levels {
            let side = 1usize << l;
            let blocks = n / side;
            for bi in 0..blocks {
                for bj in 0..blocks {
                    let cells = (0..side).flat_map(|di| {
                        let row = (bi * side + di) * n + bj * side;
                        g.values[row..row + side].iter().copied().collect::<Vec<_>>()
                    });
                    let v = block_stat(cells, side * side, maximal);
                    for di in 0..side {
                        for dj in 0..side {
                            let idx = (bi * side + di) * n + bj * side + dj;
                            out[idx] = out[idx].max(v);
                        }
                    }
                }
            }
        }
    }
    Ok(GridFunction::new(g.d, g.n, g.h, g.origin.clone(), out))
}

fn block_stat(cells: impl Iterator<Item = f64> + Clone, count: usize, maximal: bool) -> f64 {
    if maximal {
        cells.map(f64::abs).sum::<f64>() / count as f64
    } else {
        let mean = cells.clone().sum::<f64>() / count as f64;
        cells.map(|v| (v - mean).abs()).sum::<f64>() / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mollifier_support_constraints() {
        assert_eq!(mollifier(0.0), 1.0);
        assert_eq!(mollifier(0.125), 1.0);
        assert_eq!(mollifier(0.25), 0.0);
        assert_eq!(mollifier(0.3), 0.0);
        let v = mollifier(0.19);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn truncation_cases() {
        assert_relative_eq!(truncate_value(25.0, 1), 15.0);
        assert_relative_eq!(truncate_value(25.0, 0), 9.0);
        assert_relative_eq!(truncate_value(25.0, -1), 0.9);
        assert_eq!(truncate_value(0.5, 0), 0.0);
        assert_eq!(truncate_value(0.5, 3), 0.0);
    }

    #[test]
    fn truncation_reconstructs_value() {
        let rep = truncation_identities_check(&[0.0, 3.0, 40.0, 25.0], &[]);
        assert!(rep.reconstruction_violation <= 1e-12);
    }

    #[test]
    fn truncation_contraction_on_pairs() {
        let rep = truncation_identities_check(&[], &[(7.0, 7.0), (3.0, 40.0), (0.0, 123.0)]);
        assert!(rep.contraction_violation <= 1e-12);
    }

    #[test]
    fn dyadic_maximal_constant() {
        let g = GridFunction::new(1, 8, 1.0, vec![0.0], vec![2.5; 8]);
        let m = dyadic_maximal(&g).unwrap();
        let sharp = dyadic_sharp(&g).unwrap();
        for i in 0..8 {
            assert_relative_eq!(m.values[i], 2.5);
            assert_relative_eq!(sharp.values[i], 0.0);
        }
    }

    #[test]
    fn dyadic_maximal_indicator() {
        // Indicator of one cell: 1 at that cell, 2^{-J} at a cell sharing
        // only the root cube.
        let n = 8;
        let mut vals = vec![0.0; n];
        vals[0] = 1.0;
        let g = GridFunction::new(1, n, 1.0, vec![0.0], vals);
        let m = dyadic_maximal(&g).unwrap();
        assert_relative_eq!(m.values[0], 1.0);
        assert_relative_eq!(m.values[n - 1], 1.0 / n as f64);
    }

    #[test]
    fn dyadic_not_power_of_two_rejected() {
        let g = GridFunction::new(1, 6, 1.0, vec![0.0], vec![0.0; 6]);
        assert!(matches!(
            dyadic_maximal(&g),
            Err(ProfileError::GridNotDyadic(_))
        ));
    }

    #[test]
    fn bump_train_overlap_rejected() {
        assert!(matches!(
            bump_train(3, vec![0.3], 1),
            Err(ProfileError::Overlap(_))
        ));
        assert!(bump_train(3, vec![2.0], 1).is_ok());
    }

    #[test]
    fn pchip_interpolates_monotone() {
        let nodes = vec![0.0, 1.0, 2.0, 4.0];
        let values = vec![1.0, 0.5, 0.2, 0.0];
        let s = RadialShape::Sampled {
            nodes: nodes.clone(),
            values: values.clone(),
        };
        for (n, v) in nodes.iter().zip(&values) {
            assert_relative_eq!(s.eval(*n), *v, epsilon = 1e-12);
        }
        // No overshoot between nodes.
        let mid = s.eval(0.5);
        assert!(mid < 1.0 && mid > 0.5);
        assert_eq!(s.eval(5.0), 0.0);
    }

    #[test]
    fn grid_roundtrip() {
        let g = GridFunction::sample_1d(16, 2.0, |x| (-x * x).exp());
        let dir = std::env::temp_dir().join("cslab_grid_test.bin");
        save_grid(&dir, &g).unwrap();
        let g2 = load_grid(&dir).unwrap();
        assert_eq!(g.values, g2.values);
        assert_eq!(g.n, g2.n);
    }
}

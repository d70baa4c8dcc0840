//! Explicit constants: the fractional Hardy constant, the remainder
//! constant of the Hardy inequality with remainder, the ball-overlap
//! normalization constant for the inverse-power kernel decomposition, and
//! unit-ball volumes.

use crate::numeric::{gl_integrate, log_panels, uniform_panels};
use crate::quad::angular_kernel;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstError {
    #[error("Hardy constant undefined: requires 0 < s <= 1, p >= 1 and sp < d")]
    HardyUndefined,
    #[error("kernel exponent gamma = {0} outside (0, d)")]
    OutOfRange(f64),
}

/// Fractional Hardy constant with quadrature diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HardyConstant {
    pub d: u32,
    pub s: f64,
    pub p: f64,
    pub value: f64,
    pub nodes: usize,
    pub est_rel_err: f64,
}

fn hardy_cache() -> &'static Mutex<HashMap<(u32, u64, u64), HardyConstant>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64, u64), HardyConstant>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Hardy constant: `((d-p)/p)^p` at s = 1; for 0 < s < 1 the radial
/// integral `2 int_0^1 r^{sp-1} |1 - r^{(d-sp)/p}|^p Phi(r) dr` where `Phi`
/// is the angular kernel with exponent d + sp.
pub fn hardy_constant(d: u32, s: f64, p: f64) -> Result<HardyConstant, ConstError> {
    if !(s > 0.0 && s <= 1.0 && p >= 1.0 && s * p < d as f64) {
        return Err(ConstError::HardyUndefined);
    }
    let key = (d, s.to_bits(), p.to_bits());
    if let Some(c) = hardy_cache().lock().unwrap().get(&key) {
        return Ok(*c);
    }
    let c = if s >= 1.0 {
        HardyConstant {
            d,
            s,
            p,
            value: ((d as f64 - p) / p).powf(p),
            nodes: 0,
            est_rel_err: 0.0,
        }
    } else {
        let coarse = hardy_quadrature(d, s, p, 24);
        let fine = hardy_quadrature(d, s, p, 48);
        HardyConstant {
            d,
            s,
            p,
            value: fine,
            nodes: 48,
            est_rel_err: ((fine - coarse) / fine.abs().max(1e-300)).abs(),
        }
    };
    hardy_cache().lock().unwrap().insert(key, c);
    Ok(c)
}

fn hardy_quadrature(d: u32, s: f64, p: f64, n_panels: usize) -> f64 {
    let sp = s * p;
    let kappa = (d as f64 - sp) / p;
    let e = d as f64 + sp;
    let f = |r: f64| r.powf(sp - 1.0) * (1.0 - r.powf(kappa)).abs().powf(p) * angular_kernel(d, e, r).value;
    // r in (0, 1/2]: substitute w = r^{sp}, which absorbs the r^{sp-1}
    // endpoint factor and leaves a bounded smooth integrand.
    let mut acc = 0.0;
    let mut g = |w: f64| {
        let r = w.powf(1.0 / sp);
        (1.0 - r.powf(kappa)).abs().powf(p) * angular_kernel(d, e, r).value / sp
    };
    // The substituted integrand still carries a fractional power w^{kappa/sp}
    // at 0, so grade the mesh toward that endpoint.
    let w_hi = 0.5f64.powf(sp);
    let mut low = vec![0.0];
    low.extend(log_panels(w_hi * 1e-16, w_hi, n_panels));
    for w in low.windows(2) {
        acc += gl_integrate(&mut g, w[0], w[1], 12);
    }
    // r in (1/2, 1): substitute 1 - r = e^{-v}; the integrand decays like
    // e^{-v p (1 - s)}, so a finite v-interval suffices.
    let v_max = (30.0 / (p * (1.0 - s))).min(33.0);
    let mut h = |v: f64| {
        let r = 1.0 - (-v).exp();
        f(r) * (-v).exp()
    };
    for w in uniform_panels(2f64.ln(), v_max, n_panels).windows(2) {
        acc += gl_integrate(&mut h, w[0], w[1], 12);
    }
    2.0 * acc
}

/// Remainder constant `c_p = min over r in (0, 1/2) of
/// (1-r)^p - r^p + p r^{p-1}`, by a coarse grid bracket refined with
/// golden-section search.
pub fn remainder_constant(p: f64) -> (f64, f64) {
    assert!(p >= 2.0);
    if p == 2.0 {
        // (1-r)^2 - r^2 + 2r = 1 identically; every r is a minimizer.
        return (1.0, 0.25);
    }
    let f = |r: f64| (1.0 - r).powf(p) - r.powf(p) + p * r.powf(p - 1.0);
    let n = 1000;
    let mut best_i: usize = 1;
    let mut best = f64::INFINITY;
    for i in 1..n {
        let r = 0.5 * i as f64 / n as f64;
        let v = f(r);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = 0.5 * (best_i.saturating_sub(1)) as f64 / n as f64;
    let mut b = 0.5 * (best_i + 1).min(n) as f64 / n as f64;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let r = 0.5 * (a + b);
    (f(r).min(best), if f(r) <= best { r } else { 0.5 * best_i as f64 / n as f64 })
}

/// Volume of the overlap of two balls of radius `radius` whose centers are
/// `separation` apart (closed forms for d <= 3).
pub fn lens_volume(d: u32, radius: f64, separation: f64) -> f64 {
    let t = separation;
    if 2.0 * radius <= t {
        return 0.0;
    }
    let r = radius;
    match d {
        1 => 2.0 * r - t,
        2 => {
            let h = t / (2.0 * r);
            2.0 * r * r * h.acos() - 0.5 * t * (4.0 * r * r - t * t).sqrt()
        }
        3 => std::f64::consts::PI * (2.0 * r - t).powi(2) * (4.0 * r + t) / 12.0,
        _ => panic!("lens volume implemented for d <= 3"),
    }
}

/// Normalization constant `c_{d,gamma}` making
/// `|x-y|^{-gamma} = c int_0^inf int chi_R(x-z) chi_R(y-z) dz dR / R^{d+gamma+1}`
/// hold: the reciprocal of the unit-separation overlap integral. Closed
/// forms for d = 1, 3; quadrature for d = 2.
pub fn fdl_constant(d: u32, gamma: f64) -> Result<f64, ConstError> {
    if gamma <= 0.0 || gamma >= d as f64 {
        return Err(ConstError::OutOfRange(gamma));
    }
    let i = match d {
        1 => {
            // int_{1/2}^inf (2R - 1) R^{-2-gamma} dR.
            2f64.powf(1.0 + gamma) / (gamma * (1.0 + gamma))
        }
        3 => {
            // (pi/12)(16 R^3 - 12 R^2 + 1) expanded term by term.
            std::f64::consts::PI / 12.0
                * (16.0 * 2f64.powf(gamma) / gamma - 12.0 * 2f64.powf(1.0 + gamma) / (1.0 + gamma)
                    + 2f64.powf(3.0 + gamma) / (3.0 + gamma))
        }
        _ => fdl_overlap_integral(d, gamma),
    };
    Ok(1.0 / i)
}

/// Unit-separation overlap integral `int_{1/2}^inf W_d(R) R^{-d-gamma-1} dR`
/// by quadrature (substituting R = 1/(2 sigma)); also the oracle for the
/// closed forms. The full-ball part of the lens volume is integrated
/// analytically; only the cancellation-free deficit W_d - |B_1| R^d is
/// quadratured, so the small-sigma tail truncation is harmless.
pub fn fdl_overlap_integral(d: u32, gamma: f64) -> f64 {
    let e = d as f64 + gamma;
    let ball = unit_ball_volume(d);
    let deficit = |sigma: f64| -> f64 {
        let r = 1.0 / (2.0 * sigma);
        match d {
            1 => -1.0,
            2 => -2.0 * r * r * (1.0 / (2.0 * r)).asin() - 0.5 * (4.0 * r * r - 1.0).sqrt(),
            3 => std::f64::consts::PI * (1.0 - 12.0 * r * r) / 12.0,
            _ => lens_volume(d, r, 1.0) - ball * r.powf(d as f64),
        }
    };
    let mut f = |sigma: f64| deficit(sigma) * sigma.powf(e - 1.0);
    let mut acc = 0.0;
    for w in log_panels(1e-30, 1.0, 240).windows(2) {
        acc += gl_integrate(&mut f, w[0], w[1], 12);
    }
    2f64.powf(e) * (ball * 2f64.powf(-(d as f64)) / gamma + acc)
}

pub use crate::numeric::unit_ball_volume;

/// One row of the exportable constants table.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsRow {
    pub name: String,
    pub value: f64,
    pub est_rel_err: f64,
}

/// Standard constants table (CSV-ready) for documentation regeneration.
pub fn constants_table() -> Vec<ConstantsRow> {
    let mut rows = Vec::new();
    for (d, s, p) in [(3, 1.0, 2.0), (1, 0.25, 2.0), (3, 0.5, 2.0), (2, 0.5, 2.0)] {
        if let Ok(c) = hardy_constant(d, s, p) {
            rows.push(ConstantsRow {
                name: format!("hardy[d={d},s={s},p={p}]"),
                value: c.value,
                est_rel_err: c.est_rel_err,
            });
        }
    }
    for p in [2.0, 3.0, 4.0] {
        let (v, _) = remainder_constant(p);
        rows.push(ConstantsRow {
            name: format!("remainder[p={p}]"),
            value: v,
            est_rel_err: 0.0,
        });
    }
    for (d, g) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
        if let Ok(v) = fdl_constant(d, g) {
            rows.push(ConstantsRow {
                name: format!("overlap-normalization[d={d},gamma={g}]"),
                value: v,
                est_rel_err: 0.0,
            });
        }
    }
    for d in 1..=3 {
        rows.push(ConstantsRow {
            name: format!("unit-ball-volume[d={d}]"),
            value: unit_ball_volume(d),
            est_rel_err: 0.0,
        });
    }
    rows
}

pub fn table_to_csv(rows: &[ConstantsRow]) -> String {
    let mut out = String::from("name,value,est_rel_err\n");
    for r in rows {
        out.push_str(&format!("{},{:.16e},{:.3e}\n", r.name, r.value, r.est_rel_err));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hardy_s1_closed_form() {
        let c = hardy_constant(3, 1.0, 2.0).unwrap();
        assert_eq!(c.value, 0.25);
    }

    #[test]
    fn hardy_rejects_supercritical() {
        assert!(hardy_constant(1, 1.0, 2.0).is_err());
        assert!(hardy_constant(2, 0.5, 4.0).is_err());
    }

    #[test]
    fn hardy_d1_matches_adaptive_oracle() {
        // d = 1, s = 1/4, p = 2: two-sided kernel in closed form, oracle by
        // adaptive quadrature with explicit endpoint substitutions.
        let (s, p) = (0.25, 2.0);
        let sp = s * p;
        let kappa = (1.0 - sp) / p;
        let f = |r: f64| {
            r.powf(sp - 1.0)
                * (1.0 - r.powf(kappa)).powf(p)
                * ((1.0 - r).powf(-1.0 - sp) + (1.0 + r).powf(-1.0 - sp))
        };
        // Near r = 0 substitute w = r^{sp} (dr = w^{1/sp - 1} dw / sp);
        // near r = 1 substitute 1 - r = e^{-v}.
        let mut g0 = |w: f64| {
            let r = w.powf(1.0 / sp);
            f(r) * r.powf(1.0 - sp) / sp
        };
        let i0 = crate::numeric::adaptive_simpson(&mut g0, 1e-60f64, 0.5f64.powf(sp), 1e-13);
        let mut g1 = |v: f64| {
            let r = 1.0 - (-v).exp();
            if r >= 1.0 {
                return 0.0;
            }
            f(r) * (-v).exp()
        };
        let i1 = crate::numeric::adaptive_simpson(&mut g1, 2f64.ln(), 33.0, 1e-13);
        let oracle = 2.0 * (i0 + i1);
        let c = hardy_constant(1, s, p).unwrap();
        assert_relative_eq!(c.value, oracle, max_relative = 1e-8);
    }

    #[test]
    fn hardy_positive_fractional_d3() {
        let c = hardy_constant(3, 0.5, 2.0).unwrap();
        assert!(c.value > 0.0);
        assert!(c.est_rel_err < 1e-6, "est_rel_err = {}", c.est_rel_err);
    }

    #[test]
    fn hardy_s_to_one_sweep_is_finite() {
        // Diagnostic only: record that the fractional values stay positive
        // and finite as s -> 1.
        let mut prev = 0.0;
        for s in [0.9, 0.95, 0.99] {
            let c = hardy_constant(3, s, 2.0).unwrap();
            assert!(c.value.is_finite() && c.value > 0.0);
            prev = c.value;
        }
        let _ = prev;
    }

    #[test]
    fn remainder_p2_is_one() {
        let (v, _) = remainder_constant(2.0);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn remainder_p3() {
        let (v, r) = remainder_constant(3.0);
        // Analytic argmin r = 1 - 1/sqrt(2).
        let r_exact = 1.0 - 1.0 / 2f64.sqrt();
        let v_exact = (1.0 - r_exact).powi(3) - r_exact.powi(3) + 3.0 * r_exact * r_exact;
        assert_relative_eq!(v, v_exact, epsilon = 1e-12);
        assert_relative_eq!(r, r_exact, epsilon = 1e-7);
        assert!((v - 0.5858).abs() < 1e-3);
    }

    #[test]
    fn remainder_p4_brute_force() {
        let (v, r) = remainder_constant(4.0);
        let f = |r: f64| (1.0 - r).powi(4) - r.powi(4) + 4.0 * r.powi(3);
        let n = 1_000_000;
        let mut best = f64::INFINITY;
        let mut best_r = 0.0;
        for i in 1..n {
            let x = 0.5 * i as f64 / n as f64;
            let fx = f(x);
            if fx < best {
                best = fx;
                best_r = x;
            }
        }
        assert!((v - best).abs() < 1e-9, "{v} vs brute {best}");
        assert!((r - best_r).abs() < 1e-5);
    }

    #[test]
    fn remainder_in_unit_interval() {
        for p in [2.0, 2.5, 3.0, 5.0, 8.0] {
            let (v, _) = remainder_constant(p);
            assert!(v > 0.0 && v <= 1.0 + 1e-12, "c_{p} = {v}");
        }
    }

    #[test]
    fn fdl_d1_closed_form() {
        let c = fdl_constant(1, 0.5).unwrap();
        let exact = 0.5 * 1.5 / 2f64.powf(1.5);
        assert_relative_eq!(c, exact, epsilon = 1e-14);
        assert!((c - 0.26516).abs() < 1e-4);
    }

    #[test]
    fn fdl_closed_forms_match_quadrature() {
        for (d, g) in [(1u32, 0.25), (1, 0.5), (3, 0.5), (3, 1.0), (3, 2.0)] {
            let c = fdl_constant(d, g).unwrap();
            let q = 1.0 / fdl_overlap_integral(d, g);
            assert_relative_eq!(c, q, max_relative = 1e-9, epsilon = 0.0);
        }
    }

    #[test]
    fn fdl_d2_positive() {
        let c = fdl_constant(2, 0.5).unwrap();
        assert!(c > 0.0 && c.is_finite());
    }

    #[test]
    fn fdl_rejects_out_of_range() {
        assert!(fdl_constant(2, 2.0).is_err());
        assert!(fdl_constant(1, 0.0).is_err());
        assert!(fdl_constant(3, -1.0).is_err());
    }

    #[test]
    fn lens_volume_sanity() {
        // Full overlap limit: separation 0 gives the whole ball.
        assert_relative_eq!(lens_volume(1, 2.0, 0.0), 4.0, epsilon = 1e-12);
        assert_relative_eq!(
            lens_volume(3, 1.0, 0.0),
            4.0 * std::f64::consts::PI / 3.0,
            epsilon = 1e-9
        );
        // Tangent balls: zero overlap.
        assert_eq!(lens_volume(2, 1.0, 2.0), 0.0);
        // Half-overlap area for d = 2 against polar quadrature.
        let r = 1.0;
        let t = 1.0;
        let a = lens_volume(2, r, t);
        // Oracle: 2 * integral over the circular segment.
        let mut f = |x: f64| 2.0 * (r * r - x * x).sqrt();
        let seg = crate::numeric::adaptive_simpson(&mut f, t / 2.0, r, 1e-12);
        assert_relative_eq!(a, 2.0 * seg, max_relative = 1e-9);
    }

    #[test]
    fn csv_export_shape() {
        let rows = constants_table();
        let csv = table_to_csv(&rows);
        assert!(csv.starts_with("name,value,est_rel_err\n"));
        assert_eq!(csv.lines().count(), rows.len() + 1);
        assert!(csv.contains("unit-ball-volume[d=3]"));
    }
}

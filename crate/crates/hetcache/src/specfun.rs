//! Interference special functions.
//!
//! The closed-form hit probability is built from three scalar functions of the
//! SIR threshold `β` and the path-loss constant `δ = 2/α ∈ (0, 1)`:
//!
//! * `Q(β)` — interference from base stations that hold the requested file.
//!   These interferers are excluded from a disc around the user (the serving
//!   station is the strongest of them), which gives the integral
//!   `Q(β) = ∫₁^∞ β/(β + t^{1/δ}) dt`, equivalently
//!   `(δβ/(1−δ)) · ₂F₁[1, 1−δ; 2−δ; −β]`.
//! * `V(β)` — interference from stations without the file, which can be
//!   arbitrarily close: `V(β) = β^δ · δπ/sin(δπ)`.
//! * `W(β) = 1 + Q(β) − V(β)`.
//!
//! `q_func` evaluates the integral form by adaptive Gauss–Kronrod quadrature
//! after the substitution `v = s^{1/δ−1}` (with `s = 1/t`), which removes the
//! endpoint singularity for `α < 4` and is valid for every `β ≥ 0`.
//! `q_func_series` evaluates the hypergeometric series after a Pfaff
//! transformation and is kept as an independent algebraic route for
//! cross-validation.

use crate::model::ModelError;

/// Kronrod-15 abscissae on [0, 1] (positive half plus the midpoint).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss-7 weights for the odd-indexed abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 7–15 panel. Returns the K15 estimate and the
/// |K15 − G7| error indicator.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (f1, f2) = if x == 0.0 {
            let fc = f(center);
            (fc, 0.0)
        } else {
            (f(center - half * x), f(center + half * x))
        };
        let fsum = if x == 0.0 { f1 } else { f1 + f2 };
        kronrod += wk * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        } else if x == 0.0 {
            gauss += WG[3] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive quadrature of `f` over `[a, b]` by recursive panel bisection.
///
/// The tolerance is interpreted as absolute; panels are split until the local
/// error indicator falls below the tolerance share of the panel.
pub(crate) fn adaptive_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // (lo, hi, tol) work stack; depth is bounded by the tolerance splitting.
    let mut stack = vec![(a, b, tol.max(1e-300))];
    let mut total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, t)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        panels += 1;
        if err <= t || hi - lo < 1e-14 * (b - a).abs() || panels > 100_000 {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
    }
    total
}

fn check_domain(beta: f64, delta: f64) -> Result<(), ModelError> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(ModelError::Domain {
            what: "sir threshold beta",
            value: beta,
            requirement: "finite and >= 0",
        });
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(ModelError::Domain {
            what: "path-loss constant delta",
            value: delta,
            requirement: "in the open interval (0, 1)",
        });
    }
    Ok(())
}

/// `Q(β)` without domain checks; callers guarantee `β ≥ 0`, `δ ∈ (0, 1)`.
pub(crate) fn q_raw(beta: f64, delta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    // ∫₁^∞ β/(β + t^{1/δ}) dt  --t=1/s-->  ∫₀¹ β s^{1/δ−2}/(β s^{1/δ} + 1) ds
    // --v=s^{1/δ−1}-->  β/(1/δ−1) ∫₀¹ dv/(β v^{e} + 1),  e = (1/δ)/(1/δ−1).
    let c = 1.0 / delta;
    let e = c / (c - 1.0);
    let integral = adaptive_quadrature(|v| 1.0 / (beta * v.powf(e) + 1.0), 0.0, 1.0, 1e-13);
    beta / (c - 1.0) * integral
}

pub(crate) fn v_raw(beta: f64, delta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    beta.powf(delta) * delta * std::f64::consts::PI / (delta * std::f64::consts::PI).sin()
}

pub(crate) fn w_raw(beta: f64, delta: f64) -> f64 {
    1.0 + q_raw(beta, delta) - v_raw(beta, delta)
}

/// Interference function `Q(β)` for stations holding the requested file.
///
/// Monotone increasing in `β` with `Q(0) = 0`.
pub fn q_func(beta: f64, delta: f64) -> Result<f64, ModelError> {
    check_domain(beta, delta)?;
    Ok(q_raw(beta, delta))
}

/// Series evaluation of `Q(β)` through the Pfaff-transformed hypergeometric
/// sum, used as an independent cross-check of [`q_func`].
///
/// With `w = β/(1+β) ∈ [0, 1)` the transformed series
/// `₂F₁[1, 1; 2−δ; w] = Σ_n n!/(2−δ)_n · wⁿ` converges for every `β ≥ 0`.
pub fn q_func_series(beta: f64, delta: f64) -> Result<f64, ModelError> {
    check_domain(beta, delta)?;
    if beta == 0.0 {
        return Ok(0.0);
    }
    let w = beta / (1.0 + beta);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0f64;
    loop {
        term *= (n + 1.0) / (n + 2.0 - delta) * w;
        sum += term;
        n += 1.0;
        // Remaining tail is below term * w / (1 - w); stop once it cannot move the sum.
        if term * w / (1.0 - w) < 1e-16 * sum || n > 2e6 {
            break;
        }
    }
    Ok(delta * beta / ((1.0 - delta) * (1.0 + beta)) * sum)
}

/// Interference function `V(β)` for stations without the requested file.
///
/// `V(β) = β^δ · δπ/sin(δπ)`, strictly positive for `β > 0`.
pub fn v_func(beta: f64, delta: f64) -> Result<f64, ModelError> {
    check_domain(beta, delta)?;
    Ok(v_raw(beta, delta))
}

/// `W(β) = 1 + Q(β) − V(β)`.
///
/// May be negative in principle; callers only rely on `W(β)·p + V(β) > 0`
/// for `p ∈ [0, 1]`, which holds because `W·p + V = p(1+Q) + (1−p)V`.
pub fn w_func(beta: f64, delta: f64) -> Result<f64, ModelError> {
    check_domain(beta, delta)?;
    Ok(w_raw(beta, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_at_zero_is_zero() {
        for delta in [0.1, 0.5, 0.9] {
            assert_eq!(q_func(0.0, delta).unwrap(), 0.0);
            assert_eq!(v_func(0.0, delta).unwrap(), 0.0);
            assert_eq!(w_func(0.0, delta).unwrap(), 1.0);
        }
    }

    #[test]
    fn q_closed_form_alpha_four() {
        // delta = 1/2: Q(beta) = sqrt(beta) * atan(sqrt(beta)).
        let q = q_func(1.0, 0.5).unwrap();
        assert!((q - std::f64::consts::FRAC_PI_4).abs() < 1e-12, "q = {q}");
        for beta in [0.1f64, 0.7, 3.0, 42.0] {
            let expect = beta.sqrt() * beta.sqrt().atan();
            assert!((q_func(beta, 0.5).unwrap() - expect).abs() < 1e-11 * expect.max(1.0));
        }
    }

    #[test]
    fn q_fig3_operating_point() {
        // beta = -4 dB, alpha = 3; frozen from the quadrature oracle.
        let beta = 10f64.powf(-0.4);
        let q = q_func(beta, 2.0 / 3.0).unwrap();
        assert!((q - 0.731138397748693).abs() < 1e-10, "q = {q}");
    }

    #[test]
    fn v_values() {
        let v = v_func(1.0, 0.5).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        // Cross-checked against the Beta-function identity B(δ,1−δ) = π csc(δπ).
        let v2 = v_func(2.0, 2.0 / 3.0).unwrap();
        assert!((v2 - 3.83896935845953176).abs() < 1e-13, "v2 = {v2}");
    }

    #[test]
    fn w_identity_and_value() {
        let w = w_func(1.0, 0.5).unwrap();
        assert!((w - (1.0 - std::f64::consts::FRAC_PI_4)).abs() < 1e-12);
        // W + V = 1 + Q for arbitrary arguments.
        for beta in [0.05, 0.5, 2.0, 30.0] {
            for delta in [0.25, 0.5, 0.8] {
                let lhs = w_func(beta, delta).unwrap() + v_func(beta, delta).unwrap();
                let rhs = 1.0 + q_func(beta, delta).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
            }
        }
    }

    #[test]
    fn series_route_matches_quadrature() {
        for &beta in &[1e-3, 0.1, 0.398107, 1.0, 5.0, 100.0] {
            for &delta in &[0.8, 2.0 / 3.0, 0.5, 1.0 / 3.0] {
                let a = q_func(beta, delta).unwrap();
                let b = q_func_series(beta, delta).unwrap();
                assert!(
                    (a - b).abs() <= 1e-10 * b.abs().max(1e-30),
                    "beta={beta} delta={delta}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn q_monotone_in_beta() {
        let mut prev = -1.0;
        for i in 0..40 {
            let beta = 1e-2 * 10f64.powf(i as f64 / 10.0);
            let q = q_func(beta, 2.0 / 3.0).unwrap();
            assert!(q > prev);
            prev = q;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(q_func(-1.0, 0.5).is_err());
        assert!(q_func(1.0, 0.0).is_err());
        assert!(q_func(1.0, 1.0).is_err());
        assert!(v_func(1.0, 1.5).is_err());
        assert!(w_func(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn denominator_safety_grid() {
        // W(beta)*p + V(beta) > 0 for p in [0,1] over a (beta, delta) grid.
        for i in 0..30 {
            let beta = 1e-3 * 10f64.powf(i as f64 / 5.0);
            for delta in [0.1, 0.3, 0.5, 2.0 / 3.0, 0.8, 0.95] {
                let w = w_raw(beta, delta);
                let v = v_raw(beta, delta);
                for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    assert!(w * p + v > 0.0, "beta={beta} delta={delta} p={p}");
                }
            }
        }
    }
}

//! Reaction terms λ|u|^{p−2}u and λ|u|^{p−2}u(a(x) − u).

use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, Reaction};

#[inline]
fn signed_pow(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(e).copysign(s)
    }
}

/// Reaction value at node i for state s.
pub fn reaction_eval(s: f64, i: usize, spec: &ProblemSpec) -> f64 {
    let base = spec.lambda * signed_pow(s, spec.p - 1.0);
    match &spec.reaction {
        Reaction::Power => base,
        Reaction::Logistic(a) => base * (a.values()[i] - s),
    }
}

/// d(reaction)/ds with |s|^{p−2} replaced by (s² + eps²)^{(p−2)/2}; a non-finite value
/// (p < 2, s = 0, eps = 0) is reported as 0, leaving the time term to carry the Jacobian.
pub(crate) fn reaction_derivative(s: f64, i: usize, spec: &ProblemSpec, eps: f64) -> f64 {
    let p = spec.p;
    let w = (s * s + eps * eps).powf(0.5 * (p - 2.0));
    let d = match &spec.reaction {
        Reaction::Power => spec.lambda * (p - 1.0) * w,
        Reaction::Logistic(a) => spec.lambda * w * ((p - 1.0) * a.values()[i] - p * s),
    };
    if d.is_finite() {
        d
    } else {
        0.0
    }
}

/// The logistic reaction is covered by the comparison theory only for p > 2; other exponents
/// are accepted but flagged.
pub fn reaction_outside_theory(spec: &ProblemSpec) -> bool {
    matches!(spec.reaction, Reaction::Logistic(_)) && spec.p <= 2.0
}

/// sup over s ≥ 0 of ∂g/∂s = λ p s^{p−2}((p−1)/p·a − s) for the logistic reaction with
/// a ≤ a_sup. Infinite when p < 2 and λ·a_sup > 0.
pub fn one_sided_lipschitz_bound(p: f64, lambda: f64, a_sup: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(
            "the logistic reaction needs lambda >= 0".into(),
        ));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let c = (p - 1.0) / p * a_sup;
    let g = |s: f64| lambda * p * s.powf(p - 2.0) * (c - s);
    if p == 2.0 {
        return Ok(2.0 * lambda * c.max(0.0));
    }
    // interior critical point of s^{p−2}(c − s)
    let s_crit = (p - 2.0) * c / (p - 1.0);
    if p > 2.0 {
        // the s → 0 limit is 0
        Ok(if s_crit > 0.0 { g(s_crit) } else { 0.0 })
    } else if c > 0.0 {
        Ok(f64::INFINITY)
    } else if s_crit > 0.0 {
        Ok(g(s_crit))
    } else {
        // c = 0: −λ p s^{p−1} tends to 0 from below
        Ok(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, Grid};
    use crate::problem::Source;

    fn brute(p: f64, lambda: f64, a: f64) -> f64 {
        (1..200_000)
            .map(|k| k as f64 * 1e-5)
            .map(|s| lambda * p * s.powf(p - 2.0) * ((p - 1.0) / p * a - s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn lipschitz_bound() {
        assert!((one_sided_lipschitz_bound(3.0, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for (p, l, a) in [(3.0, 1.0, 1.0), (2.5, 2.0, 0.7), (4.0, 0.5, 1.3), (1.5, 1.0, -1.0)] {
            let b = one_sided_lipschitz_bound(p, l, a).unwrap();
            assert!((b - brute(p, l, a)).abs() < 1e-6, "{p} {l} {a}: {b}");
        }
        assert_eq!(one_sided_lipschitz_bound(1.5, 1.0, 1.0).unwrap(), f64::INFINITY);
        assert!(one_sided_lipschitz_bound(3.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn values() {
        let g = Grid::interval(-1.0, 1.0, 5).unwrap();
        let spec = ProblemSpec::new(3.0, 1.0, Field::zeros(g), Source::Zero).unwrap();
        assert_eq!(reaction_eval(-2.0, 1, &spec), -4.0);
        let a = Field::new(g, vec![1.0; 5]).unwrap();
        let logi = spec.clone().with_reaction(Reaction::Logistic(a));
        assert_eq!(reaction_eval(0.0, 2, &logi), 0.0);
        assert_eq!(reaction_eval(0.5, 2, &logi), 0.125);
        assert!(!reaction_outside_theory(&logi));
    }
}

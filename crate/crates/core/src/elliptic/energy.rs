//! Discrete energy E(w) = (1/p)∫|∇w|^p − (λ/p)∫|w|^p + ½∫w² − ∫hw and its exact gradient.

use crate::elliptic::operator::{apply_p_laplacian, flux_derivative, Stencil};
use crate::error::{Error, Result};
use crate::grid::Field;

#[derive(Debug, Clone)]
pub struct EnergySpec {
    pub p: f64,
    pub lambda: f64,
    pub h_src: Field,
}

impl EnergySpec {
    pub fn new(p: f64, lambda: f64, h_src: Field) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
        }
        Ok(EnergySpec { p, lambda, h_src })
    }

    fn check(&self, w: &Field) -> Result<()> {
        if w.grid() != self.h_src.grid() {
            return Err(Error::IncompatibleFields(
                "field and source live on different grids".into(),
            ));
        }
        Ok(())
    }
}

/// Gradient term on cell sums, node terms with the control-volume (trapezoid) weights.
pub(crate) fn energy_raw(st: &Stencil, w: &[f64], spec: &EnergySpec) -> f64 {
    let p = spec.p;
    let h = st.h;
    let hs = spec.h_src.values();
    let mut grad_part = 0.0;
    for i in 0..w.len() - 1 {
        let d = (w[i + 1] - w[i]) / h;
        grad_part += st.face[i] * h * d.abs().powf(p);
    }
    let mut node_part = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        node_part += st.vol[i]
            * (-spec.lambda / p * wi.abs().powf(p) + 0.5 * wi * wi - hs[i] * wi);
    }
    grad_part / p + node_part
}

/// ∂E/∂w_i at interior nodes, 0 on the boundary.
pub(crate) fn gradient_raw(st: &Stencil, w: &[f64], spec: &EnergySpec, out: &mut [f64]) {
    let p = spec.p;
    apply_p_laplacian(st, w, p, 0.0, out);
    let hs = spec.h_src.values();
    for i in 0..w.len() {
        if st.grid.is_boundary(i) {
            out[i] = 0.0;
            continue;
        }
        let wi = w[i];
        let pow = if wi == 0.0 {
            0.0
        } else {
            wi.abs().powf(p - 1.0).copysign(wi)
        };
        out[i] = st.vol[i] * (-out[i] - spec.lambda * pow + wi - hs[i]);
    }
}

/// Nodal residual −Δp w − λ|w|^{p−2}w + w − h (gradient divided by control volumes).
pub fn elliptic_residual(w: &Field, spec: &EnergySpec) -> Result<Field> {
    spec.check(w)?;
    let st = Stencil::new(w.grid());
    let mut g = vec![0.0; w.grid().n()];
    gradient_raw(&st, w.values(), spec, &mut g);
    for (gi, v) in g.iter_mut().zip(&st.vol) {
        *gi /= v;
    }
    Field::new(*w.grid(), g)
}

pub fn energy(w: &Field, spec: &EnergySpec) -> Result<f64> {
    spec.check(w)?;
    let st = Stencil::new(w.grid());
    Ok(energy_raw(&st, w.values(), spec))
}

pub fn energy_gradient(w: &Field, spec: &EnergySpec) -> Result<Field> {
    spec.check(w)?;
    let st = Stencil::new(w.grid());
    let mut g = vec![0.0; w.grid().n()];
    gradient_raw(&st, w.values(), spec, &mut g);
    Field::new(*w.grid(), g)
}

/// Tridiagonal second derivative of E with the singular coefficients |D|^{p−2}, |w|^{p−2}
/// regularized by `delta`. Returns (diag, off, concave) where `concave` is the diagonal
/// contribution of the −λ|w|^p/p term, kept apart so callers can drop it.
///
/// Faces flagged in `secant` use the secant slope φ(D) instead of the derivative of the flux.
/// For p < 2 that slope is the larger of the two, and it sends a sublinear flux straight to
/// its zero instead of overshooting.
pub(crate) fn hessian_raw(
    st: &Stencil,
    w: &[f64],
    spec: &EnergySpec,
    delta: f64,
    secant: Option<&[bool]>,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = w.len();
    let p = spec.p;
    let h = st.h;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut concave = vec![0.0; n];
    for i in 0..n - 1 {
        let d = (w[i + 1] - w[i]) / h;
        let slope = match secant {
            Some(mask) if mask[i] && p < 2.0 => (d * d + delta * delta).powf(0.5 * (p - 2.0)),
            _ => flux_derivative(d, p, delta),
        };
        let k = st.face[i] / h * slope;
        diag[i] += k;
        diag[i + 1] += k;
        off[i] = -k;
    }
    for i in 0..n {
        diag[i] += st.vol[i];
        concave[i] = -spec.lambda * (p - 1.0) * st.vol[i] * (w[i] * w[i] + delta * delta).powf(0.5 * (p - 2.0));
    }
    (diag, off, concave)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, Grid};

    #[test]
    fn zero_field() {
        let g = Grid::interval(-1.0, 1.0, 11).unwrap();
        let hsrc = sample(&g, |x| 1.0 + x).unwrap();
        let spec = EnergySpec::new(1.5, 1.0, hsrc.clone()).unwrap();
        let w = Field::zeros(g);
        assert_eq!(energy(&w, &spec).unwrap(), 0.0);
        let grad = energy_gradient(&w, &spec).unwrap();
        for i in g.interior() {
            assert!((grad.values()[i] + g.h() * hsrc.values()[i]).abs() < 1e-15);
        }
        let spec0 = EnergySpec::new(1.5, 1.0, Field::zeros(g)).unwrap();
        assert!(energy_gradient(&w, &spec0).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn grid_mismatch() {
        let g = Grid::interval(-1.0, 1.0, 11).unwrap();
        let spec = EnergySpec::new(1.5, 1.0, Field::zeros(g)).unwrap();
        let other = Field::zeros(Grid::interval(-1.0, 1.0, 12).unwrap());
        assert!(matches!(energy(&other, &spec), Err(Error::IncompatibleFields(_))));
    }
}

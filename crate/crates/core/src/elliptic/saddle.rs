//! Critical point w0 of the energy with a sign-changing source h, and a direction z along
//! which the energy decreases, for p ∈ (1, 2).
//!
//! w0 = |x|^m on the core |x| ≤ ε1 and 0 outside B_{2ε1}. On the annulus the flux
//! F = |w0'|^{p−2}w0' (not w0 itself) is a polynomial in s = (|x| − ε1)/ε1:
//!
//!   F(s) = (s* − s)(1 − s)³(a + b s + c s²),
//!
//! C²-matched to the core flux at s = 0 and vanishing to third order at s = 1. The root s*
//! is where w0 peaks; it is chosen so that w0(2ε1) = 0. Because F is smooth, Δp w0 stays
//! bounded even though w0' vanishes at the peak.

use crate::elliptic::energy::{energy_gradient, EnergySpec};
use crate::elliptic::operator::flux_inverse;
use crate::error::{Error, Result};
use crate::grid::{Field, Geometry, Grid};
use crate::numerics::{brent, Quadrature};

/// Default blend width of the cutoff z, as a fraction of the transition variable.
pub const DEFAULT_BLEND: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct SaddleConstruction {
    pub m: f64,
    pub eps1: f64,
    pub eps: f64,
    pub w0: Field,
    pub z: Field,
    pub h_src: Field,
    pub profile: W0Profile,
}

/// Radial description of w0, evaluable anywhere.
#[derive(Debug, Clone, Copy)]
pub struct W0Profile {
    pub p: f64,
    pub dim: usize,
    pub m: f64,
    pub eps1: f64,
    /// Peak of w0 in the annulus variable s.
    pub s_star: f64,
    /// Coefficients (a, b, c) of the quadratic factor of the annulus flux.
    pub coeffs: [f64; 3],
}

/// m = max(N/(2−p), 1 + 1/(p−1)).
pub fn saddle_exponent(p: f64, dim: usize) -> f64 {
    (dim as f64 / (2.0 - p)).max(1.0 + 1.0 / (p - 1.0))
}

impl W0Profile {
    pub fn new(p: f64, dim: usize, m: f64, eps1: f64) -> Result<Self> {
        let quad = Quadrature::new(24, 8);
        let target = -eps1.powf(m);
        let mut prof = W0Profile {
            p,
            dim,
            m,
            eps1,
            s_star: 0.5,
            coeffs: [0.0; 3],
        };
        // ∫_{ε1}^{2ε1} w0' dr + ε1^m, as a function of s*
        let closing = |s_star: f64| -> f64 {
            let mut pr = prof;
            pr.set_peak(s_star);
            let g = |s: f64| pr.annulus_slope(s);
            eps1 * (quad.integrate(0.0, s_star, g) + quad.integrate(s_star, 1.0, g)) - target
        };
        let s_star = brent(closing, 1e-6, 1.0 - 1e-9, 1e-15)?;
        prof.set_peak(s_star);
        Ok(prof)
    }

    fn core_flux_derivs(&self) -> [f64; 3] {
        let (p, m, r) = (self.p, self.m, self.eps1);
        let e = (m - 1.0) * (p - 1.0);
        let c = m.powf(p - 1.0);
        [
            c * r.powf(e),
            c * e * r.powf(e - 1.0),
            c * e * (e - 1.0) * r.powf(e - 2.0),
        ]
    }

    fn set_peak(&mut self, s_star: f64) {
        // P(s) = (s* − s)(1 − s)³: P(0) = s*, P'(0) = −1 − 3s*, P''(0) = 6 + 6s*
        let [f0, f1, f2] = self.core_flux_derivs();
        let e = self.eps1;
        let (t0, t1, t2) = (f0, f1 * e, f2 * e * e); // derivatives in s
        let (p0, p1, p2) = (s_star, -1.0 - 3.0 * s_star, 6.0 + 6.0 * s_star);
        let a = t0 / p0;
        let b = (t1 - p1 * a) / p0;
        let c = (t2 - p2 * a - 2.0 * p1 * b) / (2.0 * p0);
        self.s_star = s_star;
        self.coeffs = [a, b, c];
    }

    /// Annulus flux F(s) and dF/ds.
    fn annulus_flux(&self, s: f64) -> (f64, f64) {
        let [a, b, c] = self.coeffs;
        let ss = self.s_star;
        let q = a + b * s + c * s * s;
        let dq = b + 2.0 * c * s;
        let one = 1.0 - s;
        let pp = (ss - s) * one.powi(3);
        let dp = -one.powi(3) - 3.0 * (ss - s) * one.powi(2);
        (pp * q, dp * q + pp * dq)
    }

    fn annulus_slope(&self, s: f64) -> f64 {
        flux_inverse(self.annulus_flux(s).0, self.p)
    }

    pub fn r_star(&self) -> f64 {
        self.eps1 * (1.0 + self.s_star)
    }

    /// w0(r)
    pub fn value(&self, r: f64, quad: &Quadrature) -> f64 {
        let e = self.eps1;
        if r <= e {
            return r.powf(self.m);
        }
        if r >= 2.0 * e {
            return 0.0;
        }
        let s = (r - e) / e;
        let g = |s: f64| self.annulus_slope(s);
        if s <= self.s_star {
            e.powf(self.m) + e * quad.integrate(0.0, s, g)
        } else {
            -e * quad.integrate(s, 1.0, g)
        }
    }

    /// Flux |w0'|^{p−2}w0' at r.
    pub fn flux(&self, r: f64) -> f64 {
        let e = self.eps1;
        if r <= e {
            self.m.powf(self.p - 1.0) * r.powf((self.m - 1.0) * (self.p - 1.0))
        } else if r >= 2.0 * e {
            0.0
        } else {
            self.annulus_flux((r - e) / e).0
        }
    }

    /// Δp w0 at r (radial form F' + (N−1)F/r).
    pub fn p_laplacian(&self, r: f64) -> f64 {
        let e = self.eps1;
        let n1 = self.dim as f64 - 1.0;
        if r <= e {
            let ex = (self.m - 1.0) * (self.p - 1.0);
            self.m.powf(self.p - 1.0) * (ex + n1) * r.powf(ex - 1.0)
        } else if r >= 2.0 * e {
            0.0
        } else {
            let (f, df) = self.annulus_flux((r - e) / e);
            df / e + n1 * f / r
        }
    }

    /// h = −Δp w0 − λ|w0|^{p−2}w0 + w0 at r, given w0(r).
    pub fn source(&self, r: f64, w0: f64, lambda: f64) -> f64 {
        -self.p_laplacian(r) - lambda * w0.abs().powf(self.p - 1.0).copysign(w0) + w0
    }
}

/// Cutoff profile: 1 for r ≤ ε, 0 for r ≥ ε1, C² in between, blended over width δ of the
/// variable τ = (r² − ε²)/(ε1² − ε²).
pub fn cutoff(r: f64, eps: f64, eps1: f64, delta: f64) -> f64 {
    let tau = ((r * r - eps * eps) / (eps1 * eps1 - eps * eps)).clamp(0.0, 1.0);
    // antiderivative of the quintic smoothstep, I(1) = 1/2
    let blend = |u: f64| u.powi(6) - 3.0 * u.powi(5) + 2.5 * u.powi(4);
    let ramp = if tau < delta {
        delta * blend(tau / delta)
    } else if tau > 1.0 - delta {
        (1.0 - delta) - delta * blend((1.0 - tau) / delta)
    } else {
        0.5 * delta + (tau - delta)
    };
    1.0 - ramp / (1.0 - delta)
}

fn center_and_room(grid: &Grid) -> (f64, f64) {
    match grid.geometry() {
        Geometry::Interval { a, b } => (0.0, (-a).min(b)),
        Geometry::Radial { radius, .. } => (0.0, radius),
    }
}

/// Builds w0, z and h on the grid. The construction is centered at the origin, so the
/// ball B_{2ε1} must lie strictly inside the domain.
pub fn build_saddle_construction(
    grid: &Grid,
    p: f64,
    lambda: f64,
    eps: f64,
    eps1: f64,
) -> Result<SaddleConstruction> {
    build_saddle_construction_with_blend(grid, p, lambda, eps, eps1, DEFAULT_BLEND)
}

pub fn build_saddle_construction_with_blend(
    grid: &Grid,
    p: f64,
    lambda: f64,
    eps: f64,
    eps1: f64,
    blend: f64,
) -> Result<SaddleConstruction> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the saddle construction needs p in (1, 2), got {p}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("the saddle construction needs lambda > 0".into()));
    }
    if !(eps > 0.0 && eps < eps1) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < eps < eps1, got eps = {eps}, eps1 = {eps1}"
        )));
    }
    if !(blend > 0.0 && blend < 0.5) {
        return Err(Error::InvalidParameter("blend width must lie in (0, 1/2)".into()));
    }
    let (_, room) = center_and_room(grid);
    if !(2.0 * eps1 < room) {
        return Err(Error::InvalidParameter(format!(
            "the ball of radius 2·eps1 = {} is not inside the domain",
            2.0 * eps1
        )));
    }
    let dim = grid.dim();
    let m = saddle_exponent(p, dim);
    let profile = W0Profile::new(p, dim, m, eps1)?;
    let quad = Quadrature::new(24, 8);
    let rs: Vec<f64> = (0..grid.n()).map(|i| grid.radius_of(i)).collect();
    let w0_vals: Vec<f64> = rs.iter().map(|&r| profile.value(r, &quad)).collect();
    let h_vals: Vec<f64> = rs
        .iter()
        .zip(&w0_vals)
        .map(|(&r, &w)| profile.source(r, w, lambda))
        .collect();
    let z_vals: Vec<f64> = rs.iter().map(|&r| cutoff(r, eps, eps1, blend)).collect();
    Ok(SaddleConstruction {
        m,
        eps1,
        eps,
        w0: Field::new(*grid, w0_vals)?,
        z: Field::new(*grid, z_vals)?,
        h_src: Field::new(*grid, h_vals)?,
        profile,
    })
}

/// ζ(t) = (⟨E'(w0 + t z), z⟩ − ⟨E'(w0), z⟩)/t with the quadrature of the energy.
pub fn zeta(t: f64, c: &SaddleConstruction, p: f64, lambda: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("zeta needs t > 0, got {t}")));
    }
    let spec = EnergySpec::new(p, lambda, c.h_src.clone())?;
    let shifted = Field::new(
        *c.w0.grid(),
        c.w0
            .values()
            .iter()
            .zip(c.z.values())
            .map(|(w, z)| w + t * z)
            .collect(),
    )?;
    let g1 = energy_gradient(&shifted, &spec)?;
    let g0 = energy_gradient(&c.w0, &spec)?;
    let pair = |g: &Field| -> f64 { g.values().iter().zip(c.z.values()).map(|(a, b)| a * b).sum() };
    Ok((pair(&g1) - pair(&g0)) / t)
}

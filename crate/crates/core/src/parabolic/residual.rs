//! Pointwise residual of ∂t u − Δp u − reaction(u) − f for a candidate space-time field.

use crate::elliptic::operator::{apply_p_laplacian, Stencil};
use crate::error::{Error, Result};
use crate::grid::{Field, SpaceTimeField};
use crate::parabolic::reaction::reaction_eval;
use crate::problem::ProblemSpec;

fn slice_residual(
    st: &Stencil,
    prev: &[f64],
    cur: &[f64],
    next: &[f64],
    t: f64,
    dt: f64,
    spec: &ProblemSpec,
    lap: &mut [f64],
) -> Vec<f64> {
    apply_p_laplacian(st, cur, spec.p, spec.eps_reg, lap);
    (0..cur.len())
        .map(|i| {
            if spec.grid.is_boundary(i) {
                0.0
            } else {
                (next[i] - prev[i]) / (2.0 * dt)
                    - lap[i]
                    - reaction_eval(cur[i], i, spec)
                    - spec.source.eval(&spec.grid, i, t)
            }
        })
        .collect()
}

/// Residual at time t from the slices at t − dt, t and t + dt (centered in time,
/// conservative in space, boundary nodes 0). Streaming counterpart of `residual_field` for
/// meshes too large to hold in memory.
pub fn residual_slice(
    prev: &Field,
    cur: &Field,
    next: &Field,
    t: f64,
    dt: f64,
    spec: &ProblemSpec,
) -> Result<Field> {
    if prev.grid() != &spec.grid || cur.grid() != &spec.grid || next.grid() != &spec.grid {
        return Err(Error::IncompatibleFields(
            "residual slices live on different grids".into(),
        ));
    }
    let st = Stencil::new(&spec.grid);
    let mut lap = vec![0.0; spec.grid.n()];
    let r = slice_residual(
        &st,
        prev.values(),
        cur.values(),
        next.values(),
        t,
        dt,
        spec,
        &mut lap,
    );
    Field::new(spec.grid, r)
}

/// Residual at every interior time slice; slices 0 and mT are zero by convention.
pub fn residual_field(stf: &SpaceTimeField, spec: &ProblemSpec) -> Result<SpaceTimeField> {
    if stf.grid() != &spec.grid {
        return Err(Error::IncompatibleFields(
            "field and problem live on different grids".into(),
        ));
    }
    let steps = stf.tmesh().steps();
    if steps < 2 {
        return Err(Error::IncompatibleFields(
            "the centered residual needs at least three slices".into(),
        ));
    }
    let st = Stencil::new(&spec.grid);
    let dt = stf.tmesh().dt();
    let mut lap = vec![0.0; spec.grid.n()];
    let mut slices = vec![Field::zeros(spec.grid)];
    for k in 1..steps {
        let r = slice_residual(
            &st,
            stf.slice(k - 1).values(),
            stf.slice(k).values(),
            stf.slice(k + 1).values(),
            stf.tmesh().time(k),
            dt,
            spec,
            &mut lap,
        );
        slices.push(Field::new(spec.grid, r)?);
    }
    slices.push(Field::zeros(spec.grid));
    SpaceTimeField::new(spec.grid, *stf.tmesh(), slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sup_norm, Grid, TimeMesh};
    use crate::problem::Source;

    #[test]
    fn zero_field_zero_residual() {
        let g = Grid::interval(-1.0, 1.0, 11).unwrap();
        let tm = TimeMesh::new(1.0, 4).unwrap();
        let spec = ProblemSpec::new(3.0, 1.0, Field::zeros(g), Source::Zero).unwrap();
        let r = residual_field(&SpaceTimeField::zeros(&g, &tm), &spec).unwrap();
        assert!(r.slices().iter().all(|s| sup_norm(s) == 0.0));
        let short = SpaceTimeField::zeros(&g, &TimeMesh::new(1.0, 1).unwrap());
        assert!(residual_field(&short, &spec).is_err());
    }

    #[test]
    fn heat_polynomial_is_exact() {
        // u = t + x²/2 solves u_t − u_xx = 0 for p = 2 and is reproduced exactly
        let g = Grid::interval(-1.0, 1.0, 21).unwrap();
        let tm = TimeMesh::new(1.0, 10).unwrap();
        let spec = ProblemSpec::new(2.0, 0.0, Field::zeros(g), Source::Zero)
            .unwrap()
            .with_eps_reg(0.0);
        let u = SpaceTimeField::from_fn(&g, &tm, |x, t| t + 0.5 * x * x).unwrap();
        let r = residual_field(&u, &spec).unwrap();
        assert!(r.slices().iter().all(|s| sup_norm(s) < 1e-12));
    }
}

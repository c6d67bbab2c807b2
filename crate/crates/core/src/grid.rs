//! Uniform grids on an interval or a radial ball, nodal fields, and their CSV form.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    /// The interval (a, b).
    Interval { a: f64, b: f64 },
    /// The ball of radius `radius` in dimension `dim`, discretized along r ∈ [0, radius].
    Radial { radius: f64, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    geometry: Geometry,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGeometry(format!(
                "interval ({a}, {b}) must have positive length"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGeometry(format!("need n >= 3 nodes, got {n}")));
        }
        Ok(Grid {
            geometry: Geometry::Interval { a, b },
            n,
            h: (b - a) / (n - 1) as f64,
        })
    }

    pub fn radial(radius: f64, dim: usize, n: usize) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "ball radius {radius} must be positive"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidGeometry("ball dimension must be >= 1".into()));
        }
        if n < 3 {
            return Err(Error::InvalidGeometry(format!("need n >= 3 nodes, got {n}")));
        }
        Ok(Grid {
            geometry: Geometry::Radial { radius, dim },
            n,
            h: radius / (n - 1) as f64,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.geometry, Geometry::Radial { .. })
    }

    /// Spatial dimension N (1 for intervals).
    pub fn dim(&self) -> usize {
        match self.geometry {
            Geometry::Interval { .. } => 1,
            Geometry::Radial { dim, .. } => dim,
        }
    }

    /// b − a for intervals, R for balls.
    pub fn length(&self) -> f64 {
        match self.geometry {
            Geometry::Interval { a, b } => b - a,
            Geometry::Radial { radius, .. } => radius,
        }
    }

    /// Coordinate of node i: x for intervals, r for balls. The last node is the endpoint exactly.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        let (start, end) = match self.geometry {
            Geometry::Interval { a, b } => (a, b),
            Geometry::Radial { radius, .. } => (0.0, radius),
        };
        if i + 1 == self.n {
            end
        } else {
            start + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Distance of node i from the center of symmetry (|x − (a+b)/2| or r).
    pub fn radius_of(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Interval { a, b } => (self.node(i) - 0.5 * (a + b)).abs(),
            Geometry::Radial { .. } => self.node(i),
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        match self.geometry {
            Geometry::Interval { .. } => i == 0 || i + 1 == self.n,
            Geometry::Radial { .. } => i + 1 == self.n,
        }
    }

    /// Unknowns of a Dirichlet problem: every node except the boundary ones.
    /// For balls this includes the center r = 0.
    pub fn interior(&self) -> std::ops::Range<usize> {
        match self.geometry {
            Geometry::Interval { .. } => 1..self.n - 1,
            Geometry::Radial { .. } => 0..self.n - 1,
        }
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        match self.geometry {
            Geometry::Interval { .. } => vec![0, self.n - 1],
            Geometry::Radial { .. } => vec![self.n - 1],
        }
    }

    /// Area of the face between nodes i and i+1, including the sphere measure for balls.
    pub fn face_area(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Interval { .. } => 1.0,
            Geometry::Radial { dim, .. } => {
                let r = (i as f64 + 0.5) * self.h;
                sphere_measure(dim) * r.powi(dim as i32 - 1)
            }
        }
    }

    /// Measure of the control volume of node i. Interior interval nodes get h, endpoints h/2.
    pub fn volume(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Interval { .. } => {
                if i == 0 || i + 1 == self.n {
                    0.5 * self.h
                } else {
                    self.h
                }
            }
            Geometry::Radial { dim, .. } => {
                let lo = if i == 0 { 0.0 } else { (i as f64 - 0.5) * self.h };
                let hi = if i + 1 == self.n {
                    self.node(i)
                } else {
                    (i as f64 + 0.5) * self.h
                };
                let d = dim as i32;
                sphere_measure(dim) * (hi.powi(d) - lo.powi(d)) / dim as f64
            }
        }
    }

    pub fn volumes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.volume(i)).collect()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

/// Surface measure of the unit sphere in R^N: 2, 2π, 4π, …
pub fn sphere_measure(dim: usize) -> f64 {
    use std::f64::consts::PI;
    // |S^{N-1}| = 2π|S^{N-3}|/(N-2)
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        d => 2.0 * PI * sphere_measure(d - 2) / (d - 2) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    t_final: f64,
    steps: usize,
    dt: f64,
}

impl TimeMesh {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "final time {t_final} must be positive"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidGeometry("need at least one time step".into()));
        }
        Ok(TimeMesh {
            t_final,
            steps,
            dt: t_final / steps as f64,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of steps mT; there are mT + 1 slices.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_final
        } else {
            k as f64 * self.dt
        }
    }

    /// Index of the slice closest to time t.
    pub fn nearest(&self, t: f64) -> usize {
        ((t / self.dt).round().max(0.0) as usize).min(self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::IncompatibleFields(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt_num(self.grid.node(i)), fmt_num(*v))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Samples `f` at every node.
pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Field> {
    let values = (0..grid.n()).map(|i| f(grid.node(i))).collect();
    Field::new(*grid, values)
}

pub fn sup_norm(u: &Field) -> f64 {
    u.values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sup_diff(u: &Field, v: &Field) -> Result<f64> {
    if u.grid != v.grid {
        return Err(Error::IncompatibleFields("fields live on different grids".into()));
    }
    Ok(u.values
        .iter()
        .zip(&v.values)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// A time-indexed stack of fields on one grid; slice 0 is the initial datum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    tmesh: TimeMesh,
    slices: Vec<Field>,
}

impl SpaceTimeField {
    pub fn new(grid: Grid, tmesh: TimeMesh, slices: Vec<Field>) -> Result<Self> {
        if slices.len() != tmesh.steps() + 1 {
            return Err(Error::IncompatibleFields(format!(
                "{} slices for a time mesh of {} steps",
                slices.len(),
                tmesh.steps()
            )));
        }
        if slices.iter().any(|s| s.grid != grid) {
            return Err(Error::IncompatibleFields("slice on a foreign grid".into()));
        }
        Ok(SpaceTimeField { grid, tmesh, slices })
    }

    /// Samples u(x, t) at every node and slice.
    pub fn from_fn(grid: &Grid, tmesh: &TimeMesh, u: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let slices = (0..=tmesh.steps())
            .map(|k| {
                let t = tmesh.time(k);
                sample(grid, |x| u(x, t))
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(*grid, *tmesh, slices)
    }

    pub fn zeros(grid: &Grid, tmesh: &TimeMesh) -> Self {
        SpaceTimeField {
            grid: *grid,
            tmesh: *tmesh,
            slices: vec![Field::zeros(*grid); tmesh.steps() + 1],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tmesh(&self) -> &TimeMesh {
        &self.tmesh
    }

    pub fn slices(&self) -> &[Field] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &Field {
        &self.slices[k]
    }

    pub fn last(&self) -> &Field {
        self.slices.last().expect("at least one slice")
    }

    pub fn same_mesh(&self, other: &SpaceTimeField) -> bool {
        self.grid == other.grid && self.tmesh == other.tmesh
    }

    pub fn scaled(&self, c: f64) -> SpaceTimeField {
        SpaceTimeField {
            grid: self.grid,
            tmesh: self.tmesh,
            slices: self.slices.iter().map(|s| s.scaled(c)).collect(),
        }
    }

    /// Every `stride`-th slice; `stride` must divide mT.
    pub fn subsample(&self, stride: usize) -> Result<SpaceTimeField> {
        if stride == 0 || self.tmesh.steps() % stride != 0 {
            return Err(Error::InvalidParameter(format!(
                "stride {stride} does not divide {} steps",
                self.tmesh.steps()
            )));
        }
        let tmesh = TimeMesh::new(self.tmesh.t_final(), self.tmesh.steps() / stride)?;
        let slices = self.slices.iter().step_by(stride).cloned().collect();
        SpaceTimeField::new(self.grid, tmesh, slices)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,value")?;
        let xs: Vec<String> = self.grid.nodes().into_iter().map(fmt_num).collect();
        let mut line = String::new();
        for (k, s) in self.slices.iter().enumerate() {
            let t = fmt_num(self.tmesh.time(k));
            for (x, v) in xs.iter().zip(s.values()) {
                line.clear();
                let _ = writeln!(line, "{t},{x},{}", fmt_num(*v));
                w.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads the `t,x,value` layout back. The grid is rebuilt from the x column of the first
    /// slice: an interval unless `radial_dim` is given, in which case x is read as r ∈ [0, R].
    pub fn read_csv<R: BufRead>(r: R, radial_dim: Option<usize>) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))??;
        if header.trim() != "t,x,value" {
            return Err(Error::Parse(format!("expected header `t,x,value`, got `{header}`")));
        }
        let mut times: Vec<f64> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", lineno + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {name}: {e}", lineno + 2)))
            };
            let (t, x, v) = (next("t")?, next("x")?, next("value")?);
            if times.last() != Some(&t) {
                times.push(t);
                rows.push(Vec::new());
            }
            if times.len() == 1 {
                xs.push(x);
            }
            rows.last_mut().expect("row pushed above").push(v);
        }
        if times.len() < 2 {
            return Err(Error::Parse("need at least two time slices".into()));
        }
        let n = xs.len();
        let grid = match radial_dim {
            None => Grid::interval(xs[0], xs[n - 1], n)?,
            Some(dim) => Grid::radial(xs[n - 1], dim, n)?,
        };
        let tmesh = TimeMesh::new(times[times.len() - 1], times.len() - 1)?;
        let slices = rows
            .into_iter()
            .map(|vals| Field::new(grid, vals))
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(grid, tmesh, slices)
    }
}

/// Decimal scientific notation with 16 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.15e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_nodes() {
        let g = Grid::interval(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.nodes(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.h(), 0.5);
    }

    #[test]
    fn radial_nodes() {
        let g = Grid::radial(1.0, 1, 3).unwrap();
        assert_eq!(g.nodes(), vec![0.0, 0.5, 1.0]);
        assert_eq!(g.interior(), 0..2);
    }

    #[test]
    fn degenerate_geometry() {
        assert!(matches!(Grid::interval(1.0, 1.0, 5), Err(Error::InvalidGeometry(_))));
        assert!(matches!(Grid::interval(0.0, 1.0, 2), Err(Error::InvalidGeometry(_))));
        assert!(matches!(Grid::radial(-1.0, 2, 5), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn sampling() {
        let g = Grid::interval(-1.0, 1.0, 5).unwrap();
        assert_eq!(sup_norm(&sample(&g, |_| 0.0).unwrap()), 0.0);
        assert_eq!(sample(&g, |x| x * x).unwrap().values()[3], 0.25);
        match sample(&g, |x| 1.0 / x) {
            Err(Error::NonFiniteValue { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn norms() {
        let g = Grid::interval(0.0, 1.0, 3).unwrap();
        let u = Field::new(g, vec![1.0, -3.0, 2.0]).unwrap();
        assert_eq!(sup_norm(&u), 3.0);
        assert_eq!(sup_diff(&u, &u).unwrap(), 0.0);
        let other = Field::zeros(Grid::interval(0.0, 2.0, 3).unwrap());
        assert!(matches!(sup_diff(&u, &other), Err(Error::IncompatibleFields(_))));
    }

    #[test]
    fn volumes_sum_to_measure() {
        let g = Grid::interval(-1.0, 1.0, 11).unwrap();
        let total: f64 = g.volumes().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for dim in 1..=3 {
            let g = Grid::radial(2.0, dim, 41).unwrap();
            let total: f64 = g.volumes().iter().sum();
            let exact = sphere_measure(dim) * 2f64.powi(dim as i32) / dim as f64;
            assert!((total - exact).abs() < 1e-12 * exact, "dim {dim}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::interval(-1.0, 1.0, 7).unwrap();
        let tm = TimeMesh::new(0.3, 3).unwrap();
        let stf = SpaceTimeField::from_fn(&g, &tm, |x, t| (1.0 + t) * x.sin() / 3.0).unwrap();
        let mut buf = Vec::new();
        stf.write_csv(&mut buf).unwrap();
        let back = SpaceTimeField::read_csv(&buf[..], None).unwrap();
        assert_eq!(back.tmesh().steps(), 3);
        for (a, b) in stf.slices().iter().zip(back.slices()) {
            assert!(sup_diff(a, &Field::new(g, b.values().to_vec()).unwrap()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn field_csv_header() {
        let g = Grid::interval(0.0, 1.0, 3).unwrap();
        let s = Field::zeros(g).to_csv_string();
        assert!(s.starts_with("x,value\n"));
        assert_eq!(s.lines().count(), 4);
    }
}

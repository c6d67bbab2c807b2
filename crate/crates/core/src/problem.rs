//! Problem instances: ∂t u − Δp u = reaction(u) + f with Dirichlet data.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Source term f(x, t).
#[derive(Clone)]
pub enum Source {
    Zero,
    Constant(f64),
    /// f(x, t) = g(x)·θ(t) with g given nodally.
    Separable { space: Field, time: TimeFn },
    Function(SpaceTimeFn),
}

impl Source {
    pub fn eval(&self, grid: &Grid, i: usize, t: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant(c) => *c,
            Source::Separable { space, time } => space.values()[i] * time(t),
            Source::Function(f) => f(grid.node(i), t),
        }
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => write!(f, "Zero"),
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::Separable { .. } => write!(f, "Separable"),
            Source::Function(_) => write!(f, "Function"),
        }
    }
}

/// Dirichlet data on the boundary nodes.
#[derive(Clone)]
pub enum Boundary {
    Zero,
    Function(SpaceTimeFn),
}

impl Boundary {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Boundary::Zero => 0.0,
            Boundary::Function(g) => g(x, t),
        }
    }
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Zero => write!(f, "Zero"),
            Boundary::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Reaction {
    /// λ|u|^{p−2}u
    Power,
    /// λ|u|^{p−2}u(a(x) − u)
    Logistic(Field),
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub p: f64,
    pub lambda: f64,
    pub grid: Grid,
    pub source: Source,
    pub initial: Field,
    pub boundary: Boundary,
    pub reaction: Reaction,
    pub eps_reg: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
}

pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
pub const DEFAULT_NEWTON_MAX_ITERS: usize = 60;

impl ProblemSpec {
    /// Power reaction, zero boundary data, eps_reg = h and default Newton settings.
    pub fn new(p: f64, lambda: f64, initial: Field, source: Source) -> Result<Self> {
        let grid = *initial.grid();
        let spec = ProblemSpec {
            p,
            lambda,
            grid,
            source,
            initial,
            boundary: Boundary::Zero,
            reaction: Reaction::Power,
            eps_reg: grid.h(),
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iters: DEFAULT_NEWTON_MAX_ITERS,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_eps_reg(mut self, eps_reg: f64) -> Self {
        self.eps_reg = eps_reg;
        self
    }

    pub fn with_reaction(mut self, reaction: Reaction) -> Self {
        self.reaction = reaction;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_newton_tol(mut self, tol: f64) -> Self {
        self.newton_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p = {} must exceed 1", self.p)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        if !(self.eps_reg >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps_reg = {} must be nonnegative",
                self.eps_reg
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParameter("newton_tol must be positive".into()));
        }
        if *self.initial.grid() != self.grid {
            return Err(Error::IncompatibleFields(
                "initial datum lives on another grid".into(),
            ));
        }
        if let Reaction::Logistic(a) = &self.reaction {
            if *a.grid() != self.grid {
                return Err(Error::IncompatibleFields(
                    "logistic weight lives on another grid".into(),
                ));
            }
            if self.lambda < 0.0 {
                return Err(Error::InvalidParameter(
                    "the logistic reaction needs lambda >= 0".into(),
                ));
            }
        }
        Ok(())
    }
}

//! Discrete maximum, comparison and Hopf principles as predicates on computed solutions,
//! plus positivity-time, support and extinction estimators.
//!
//! Weak principles (WMP, WCP) hold when the margin is at least −tol. Strict principles
//! (SMP, SCP, HMP) need the strict quantity above +tol, so a violated strict report can carry
//! a margin in (−tol, tol].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Principle {
    Wmp,
    Smp,
    Wcp,
    Scp,
    Hmp,
}

impl Principle {
    pub fn name(&self) -> &'static str {
        match self {
            Principle::Wmp => "WMP",
            Principle::Smp => "SMP",
            Principle::Wcp => "WCP",
            Principle::Scp => "SCP",
            Principle::Hmp => "HMP",
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Principle::Smp | Principle::Scp | Principle::Hmp)
    }

    pub fn parse(s: &str) -> Option<Principle> {
        match s.to_ascii_lowercase().as_str() {
            "wmp" => Some(Principle::Wmp),
            "smp" => Some(Principle::Smp),
            "wcp" => Some(Principle::Wcp),
            "scp" => Some(Principle::Scp),
            "hmp" | "hopf" => Some(Principle::Hmp),
            _ => None,
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipleReport {
    pub principle: Principle,
    pub verdict: Verdict,
    pub margin: f64,
    /// (time index, node index) where the margin is attained.
    pub witness: Option<(usize, usize)>,
    pub tolerance: f64,
    /// Secondary margins, e.g. the boundary-flux ordering of the SCP.
    #[serde(default)]
    pub sub_margins: Vec<(String, f64)>,
    #[serde(default)]
    pub note: String,
}

impl PrincipleReport {
    fn new(principle: Principle, verdict: Verdict, margin: f64, witness: Option<(usize, usize)>, tol: f64) -> Self {
        PrincipleReport {
            principle,
            verdict,
            margin,
            witness,
            tolerance: tol,
            sub_margins: Vec::new(),
            note: String::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Plain `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "principle={}\nverdict={}\nmargin={:.12e}\ntolerance={:.6e}\n",
            self.principle, self.verdict, self.margin, self.tolerance
        );
        match self.witness {
            Some((k, i)) => s.push_str(&format!("witness_time_index={k}\nwitness_node={i}\n")),
            None => s.push_str("witness_time_index=none\nwitness_node=none\n"),
        }
        for (name, m) in &self.sub_margins {
            s.push_str(&format!("margin_{name}={m:.12e}\n"));
        }
        if !self.note.is_empty() {
            s.push_str(&format!("note={}\n", self.note));
        }
        s
    }
}

/// max(10·newton_tol, h²): strict inequalities are read as "> tol".
pub fn default_tolerance(h: f64, newton_tol: f64) -> f64 {
    (10.0 * newton_tol).max(h * h)
}

fn check_pair(u: &SpaceTimeField, v: &SpaceTimeField) -> Result<()> {
    if !u.same_mesh(v) {
        return Err(Error::IncompatibleFields(
            "the two runs use different grids or time meshes".into(),
        ));
    }
    Ok(())
}

/// Minimum over the given slices and nodes of f(k, i), with its location.
fn min_over(
    slices: impl Iterator<Item = usize>,
    nodes: impl Iterator<Item = usize> + Clone,
    f: impl Fn(usize, usize) -> f64,
) -> Option<(f64, (usize, usize))> {
    let mut best: Option<(f64, (usize, usize))> = None;
    for k in slices {
        for i in nodes.clone() {
            let val = f(k, i);
            if best.map_or(true, |(b, _)| val < b) {
                best = Some((val, (k, i)));
            }
        }
    }
    best
}

/// Nonnegativity of every node of every slice.
pub fn check_wmp(stf: &SpaceTimeField, tol: f64) -> PrincipleReport {
    let n = stf.grid().n();
    let (m, at) = min_over(0..stf.slices().len(), 0..n, |k, i| stf.slice(k).values()[i])
        .expect("nonempty field");
    let verdict = if m >= -tol { Verdict::Holds } else { Verdict::Violated };
    PrincipleReport::new(Principle::Wmp, verdict, m, Some(at), tol)
}

/// u ≤ v everywhere; the caller is responsible for the ordering of the data.
pub fn check_wcp(u: &SpaceTimeField, v: &SpaceTimeField, tol: f64) -> Result<PrincipleReport> {
    check_pair(u, v)?;
    let n = u.grid().n();
    let (m, at) = min_over(0..u.slices().len(), 0..n, |k, i| {
        v.slice(k).values()[i] - u.slice(k).values()[i]
    })
    .expect("nonempty field");
    let verdict = if m >= -tol { Verdict::Holds } else { Verdict::Violated };
    Ok(PrincipleReport::new(Principle::Wcp, verdict, m, Some(at), tol))
}

/// Shared core of the unrestricted strong principles: once the difference d has been above
/// tol somewhere at a positive time, it must stay above tol at every interior node.
fn strong_positivity(
    principle: Principle,
    d: impl Fn(usize, usize) -> f64,
    slices: usize,
    interior: std::ops::Range<usize>,
    all_nodes: usize,
    tol: f64,
) -> PrincipleReport {
    let mut active = false;
    let mut best: Option<(f64, (usize, usize))> = None;
    let mut negative: Option<(f64, (usize, usize))> = None;
    // the strong form includes the weak one: no node of any slice may dip below −tol
    for k in 0..slices {
        for i in 0..all_nodes {
            let val = d(k, i);
            if val < -tol && negative.map_or(true, |(b, _)| val < b) {
                negative = Some((val, (k, i)));
            }
        }
    }
    for k in 1..slices {
        if !active {
            active = (0..all_nodes).any(|i| d(k, i) > tol);
        }
        for i in interior.clone() {
            let val = d(k, i);
            if active && best.map_or(true, |(b, _)| val < b) {
                best = Some((val, (k, i)));
            }
        }
    }
    if let Some((m, at)) = negative {
        return PrincipleReport::new(principle, Verdict::Violated, m, Some(at), tol)
            .with_note("the weak ordering already fails");
    }
    match best {
        None => PrincipleReport::new(principle, Verdict::Inconclusive, 0.0, None, tol)
            .with_note("the difference never rises above tol at a positive time"),
        Some((m, at)) if m > tol => PrincipleReport::new(principle, Verdict::Holds, m, Some(at), tol),
        Some((m, at)) => PrincipleReport::new(principle, Verdict::Violated, m, Some(at), tol)
            .with_note("interior zero after the solution was nontrivial"),
    }
}

/// Unrestricted SMP for a nonnegative run: a solution that is nontrivial at some positive
/// time stays above tol at every interior node from then on. Interior zeros inside a
/// nontrivial slice (finite propagation) or after extinction are violations.
pub fn check_smp(stf: &SpaceTimeField, tol: f64) -> PrincipleReport {
    let g = stf.grid();
    strong_positivity(
        Principle::Smp,
        |k, i| stf.slice(k).values()[i],
        stf.slices().len(),
        g.interior(),
        g.n(),
        tol,
    )
}

/// Unrestricted strong comparison: once v − u is above tol somewhere at a positive time, it
/// stays above tol at every interior node.
pub fn check_strong_comparison(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    tol: f64,
) -> Result<PrincipleReport> {
    check_pair(u, v)?;
    let g = u.grid();
    Ok(strong_positivity(
        Principle::Scp,
        |k, i| v.slice(k).values()[i] - u.slice(k).values()[i],
        u.slices().len(),
        g.interior(),
        g.n(),
        tol,
    ))
}

/// Largest slice index k such that all interior nodes of slices 1..=k exceed tol.
pub fn positivity_index(stf: &SpaceTimeField, tol: f64) -> usize {
    let g = stf.grid();
    (1..stf.slices().len())
        .take_while(|&k| g.interior().all(|i| stf.slice(k).values()[i] > tol))
        .last()
        .unwrap_or(0)
}

/// Largest slice index k such that every slice 1..=k has some node above tol.
pub fn nontrivial_index(stf: &SpaceTimeField, tol: f64) -> usize {
    (1..stf.slices().len())
        .take_while(|&k| stf.slice(k).values().iter().any(|v| *v > tol))
        .last()
        .unwrap_or(0)
}

/// (t̄, t*): the last time up to which the run is positive at every interior node, and the
/// last time up to which it is nontrivial. Always t̄ ≤ t*.
pub fn positivity_time(stf: &SpaceTimeField, tol: f64) -> (f64, f64) {
    let tm = stf.tmesh();
    let kb = positivity_index(stf, tol);
    let ks = nontrivial_index(stf, tol).max(kb);
    (tm.time(kb), tm.time(ks))
}

/// Outer normal derivatives at the boundary nodes by the 3-point one-sided stencil.
pub fn boundary_normal_derivatives(slice: &Field) -> Vec<(usize, f64)> {
    let g = slice.grid();
    let u = slice.values();
    let n = g.n();
    let h = g.h();
    let right = (n - 1, (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h));
    if g.is_radial() {
        vec![right]
    } else {
        let left = (0, (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * h));
        vec![left, right]
    }
}

/// Hopf: strictly negative outer normal derivative at every boundary node of slice k.
/// The margin −max ∂u/∂ν is always reported; a slice that is not strictly positive inside
/// gives an inconclusive verdict.
pub fn check_hopf(stf: &SpaceTimeField, k: usize, tol: f64) -> Result<PrincipleReport> {
    if k >= stf.slices().len() {
        return Err(Error::InvalidParameter(format!(
            "slice {k} is outside the run ({} slices)",
            stf.slices().len()
        )));
    }
    let slice = stf.slice(k);
    let ders = boundary_normal_derivatives(slice);
    let (node, worst) = ders
        .iter()
        .cloned()
        .fold((0, f64::NEG_INFINITY), |a, (i, d)| if d > a.1 { (i, d) } else { a });
    let margin = -worst;
    let g = slice.grid();
    let positive = g.interior().all(|i| slice.values()[i] > 0.0);
    let report = if !positive {
        PrincipleReport::new(Principle::Hmp, Verdict::Inconclusive, margin, Some((k, node)), tol)
            .with_note("the slice has interior zeros")
    } else if margin > tol {
        PrincipleReport::new(Principle::Hmp, Verdict::Holds, margin, Some((k, node)), tol)
    } else {
        PrincipleReport::new(Principle::Hmp, Verdict::Violated, margin, Some((k, node)), tol)
    };
    let mut report = report;
    report.sub_margins = ders
        .iter()
        .map(|(i, d)| (format!("normal_derivative_node_{i}"), *d))
        .collect();
    Ok(report)
}

/// SCP restricted to Ω_{t̄(v)}: u < v at interior nodes and ∂v/∂ν < ∂u/∂ν at boundary nodes
/// for slices burn_in+1 ..= k̄(v). Both margins must exceed tol.
pub fn check_scp(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    tol: f64,
    burn_in: usize,
) -> Result<PrincipleReport> {
    let weak = check_wcp(u, v, tol)?;
    if weak.verdict == Verdict::Violated {
        return Ok(PrincipleReport::new(Principle::Scp, Verdict::Violated, weak.margin, weak.witness, tol)
            .with_note("the weak ordering already fails"));
    }
    let kbar = positivity_index(v, tol);
    let first = burn_in + 1;
    if kbar < first {
        return Ok(PrincipleReport::new(Principle::Scp, Verdict::Inconclusive, 0.0, None, tol)
            .with_note("v is not positive on any slice after the burn-in"));
    }
    let g = u.grid();
    let (m_int, at) = min_over(first..=kbar, g.interior(), |k, i| {
        v.slice(k).values()[i] - u.slice(k).values()[i]
    })
    .expect("nonempty range");
    let mut m_bnd = f64::INFINITY;
    let mut at_bnd = at;
    for k in first..=kbar {
        let du = boundary_normal_derivatives(u.slice(k));
        let dv = boundary_normal_derivatives(v.slice(k));
        for ((i, a), (_, b)) in du.iter().zip(&dv) {
            if a - b < m_bnd {
                m_bnd = a - b;
                at_bnd = (k, *i);
            }
        }
    }
    let (margin, witness) = if m_int <= m_bnd { (m_int, at) } else { (m_bnd, at_bnd) };
    let verdict = if m_int > tol && m_bnd > tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut report = PrincipleReport::new(Principle::Scp, verdict, margin, Some(witness), tol);
    report.sub_margins = vec![("interior".into(), m_int), ("boundary_flux".into(), m_bnd)];
    report.note = format!("checked slices {first}..={kbar}");
    Ok(report)
}

/// Largest radius with a value above tol; 0 for a slice that is nowhere above tol.
pub fn support_radius(slice: &Field, tol: f64) -> f64 {
    let g = slice.grid();
    slice
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > tol)
        .map(|(i, _)| g.radius_of(i))
        .fold(0.0, f64::max)
}

/// Time of the first slice with sup-norm below tol, or +∞ if there is none.
pub fn extinction_time_estimate(stf: &SpaceTimeField, tol: f64) -> f64 {
    stf.slices()
        .iter()
        .position(|s| s.values().iter().all(|v| v.abs() < tol))
        .map_or(f64::INFINITY, |k| stf.tmesh().time(k))
}

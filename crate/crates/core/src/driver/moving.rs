//! The moving-polarization experiment and the Hopf sign check.

use std::fmt::Write as _;

use crate::driver::config::Schedule;
use crate::error::{Error, Result};
use crate::geometry::{reflect, PolarizationPlane};
use crate::nodal::{
    below_resolution, dist_to_boundary, e1_distance_d1, extract_nodal_set, normal_derivative, sample, Contact,
};
use crate::nonlinearity::{Nonlinearity, SourceTerm};
use crate::rearrange::{dirichlet_energy, pointwise_integral, polarize_function, GridFunction};
use crate::scalar::Real;
use crate::solver::nehari_defect;

/// One step of the slide.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationTraceEntry<T> {
    /// Offset from the symmetry axis.
    pub a: T,
    /// `supp P_a u` stays inside the domain.
    pub contained: bool,
    /// `∫G(P_a u) − ∫G(u)`; exactly 0.
    pub pointwise_drift: T,
    /// `D(P_a u) − D(u)`; never positive.
    pub gradient_drift: T,
    /// Relative Nehari defects of `P_a u`, when a source term is given.
    pub nehari_defects: Option<(T, T)>,
    /// `dist(Z(P_a u), ∂Ω)`.
    pub dist: Option<T>,
}

pub fn trace_csv<T: Real>(trace: &[PolarizationTraceEntry<T>]) -> String {
    let mut out = String::from("a,contained,pointwise_drift,gradient_drift,nehari_plus,nehari_minus,dist\n");
    for e in trace {
        let (np, nm) = match e.nehari_defects {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        let dist = e.dist.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.a, e.contained, e.pointwise_drift, e.gradient_drift, np, nm, dist
        );
    }
    out
}

#[derive(Clone, Debug)]
pub struct MovingPolarization<T> {
    /// Whether `u` was replaced by `−u` first.
    pub flipped: bool,
    pub contact: Contact<T>,
    pub trace: Vec<PolarizationTraceEntry<T>>,
    /// Offset of the last plane, the largest aligned one not beyond `d₁/2`.
    pub final_offset: T,
    /// Absolute `x₁`-position of the last plane.
    pub plane_position: T,
    /// `P_{d₁/2} u`.
    pub field: GridFunction<T>,
}

#[derive(Clone, Debug)]
pub enum MovingOutcome<T> {
    /// `d ≤ h`: the nodal set already reaches the boundary, nothing to slide.
    AlreadyExhibited { d: T },
    Slid(MovingPolarization<T>),
}

/// Slides the polarization plane from the symmetry axis to `d₁/2`.
///
/// `nl` supplies `G = F` for the pointwise integral and the Nehari defects;
/// without it `G(s) = |s|ᵖ/p` and no defects are reported. Every step must
/// keep the support inside the domain ([`Error::SupportEscape`]), leave the
/// pointwise integral bit-identical and not increase the Dirichlet energy
/// ([`Error::Invariant`]). The final field must have `dist(Z, ∂Ω) ≤ h`.
pub fn moving_polarization<T: Real>(
    u: &GridFunction<T>,
    p: T,
    nl: Option<&Nonlinearity<T>>,
    schedule: &Schedule<T>,
    tau: T,
) -> Result<MovingOutcome<T>> {
    let grid = u.grid().clone();
    let dom = grid.descriptor().ok_or(Error::NoDescriptor)?;
    let h = grid.h();
    let set = extract_nodal_set(u, tau)?;
    let d = dist_to_boundary(&set, &grid)?;
    if below_resolution(d, h) {
        return Ok(MovingOutcome::AlreadyExhibited { d });
    }
    let (u, set, flipped) = match e1_distance_d1(&set, u) {
        Ok(_) => (u.clone(), set, false),
        Err(Error::SignFlipRequired) => {
            let v = u.scale(-T::one());
            let s = extract_nodal_set(&v, tau)?;
            (v, s, true)
        }
        Err(e) => return Err(e),
    };
    let contact = e1_distance_d1(&set, &u)?;

    let lat = grid.lattice();
    let axis = dom.axis();
    let k0 = lat.plane(axis)?.pair_sum();
    // d₁ comes from interpolated crossings and carries an O(h²) error, so a
    // target just short of an aligned offset is snapped up to it.
    let k_end = lat.plane_floor(axis + contact.d1 / T::lit(2.0) + h / T::lit(8.0)).pair_sum().max(k0);
    let mut ks: Vec<i64> = match schedule {
        Schedule::All => (k0..=k_end).collect(),
        Schedule::Steps(n) => {
            let span = (k_end - k0) as f64;
            (0..*n).map(|j| k0 + (span * j as f64 / (*n - 1) as f64).round() as i64).collect()
        }
        Schedule::Offsets(a) => {
            let mut ks = Vec::with_capacity(a.len() + 1);
            for &x in a {
                let k = lat.plane(axis + x)?.pair_sum();
                if k > k_end {
                    return Err(Error::Precondition(format!(
                        "schedule offset {x} exceeds d1/2 = {}",
                        contact.d1 / T::lit(2.0)
                    )));
                }
                ks.push(k);
            }
            ks
        }
    };
    ks.push(k_end);
    ks.sort_unstable();
    ks.dedup();

    let g = |s: T| match nl {
        Some(nl) => nl.primitive(s),
        None => s.abs().powf(p) / p,
    };
    let base_g = pointwise_integral(&u, g);
    let base_d = dirichlet_energy(&u, p)?;
    let mut trace = Vec::with_capacity(ks.len());
    let mut last = None;
    for &k in &ks {
        let plane = lat.plane_from_pair_sum(k);
        let a = plane.offset() - axis;
        let v = polarize_function(&u, &plane)?;
        if let Some(&node) = v.escaped_nodes().first() {
            return Err(Error::SupportEscape { a: a.to_f64_lossy(), node });
        }
        let pointwise_drift = pointwise_integral(&v, g) - base_g;
        let gradient_drift = dirichlet_energy(&v, p)? - base_d;
        if pointwise_drift != T::zero() {
            return Err(Error::Invariant(format!("pointwise integral drifted by {pointwise_drift} at a = {a}")));
        }
        if gradient_drift > T::zero() {
            return Err(Error::Invariant(format!("Dirichlet energy grew by {gradient_drift} at a = {a}")));
        }
        let nehari_defects = match nl {
            Some(nl) => nehari_defect(&v, nl).ok(),
            None => None,
        };
        let vs = extract_nodal_set(&v, tau)?;
        let dist = dist_to_boundary(&vs, &grid).ok();
        trace.push(PolarizationTraceEntry {
            a,
            contained: true,
            pointwise_drift,
            gradient_drift,
            nehari_defects,
            dist,
        });
        last = Some((plane, v));
    }
    let (plane, field): (PolarizationPlane<T>, _) = last.expect("schedule holds the final plane");
    let final_dist = trace.last().and_then(|e| e.dist);
    match final_dist {
        Some(dz) if below_resolution(dz, h) => {}
        _ => {
            return Err(Error::Invariant(format!(
                "nodal set of the final polarization is at distance {final_dist:?} > h = {h} from the boundary"
            )))
        }
    }
    Ok(MovingOutcome::Slid(MovingPolarization {
        flipped,
        contact,
        trace,
        final_offset: plane.offset() - axis,
        plane_position: plane.offset(),
        field,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopfVerdict {
    /// `∂v/∂n > 0` at a reflected contact point and `∂v/∂n ≤ tol` at a
    /// nearby boundary point of `supp v⁺`.
    ConflictExhibited,
    NoConflict,
    /// No boundary point of `supp v⁺` near any image point.
    Vacuous,
    /// `d ≤ h`: the construction does not apply.
    NotApplicable,
}

impl HopfVerdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::ConflictExhibited => "conflict exhibited",
            Self::NoConflict => "no conflict",
            Self::Vacuous => "vacuous",
            Self::NotApplicable => "not applicable",
        }
    }
}

/// Signs found around one contact point.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactCheck<T> {
    /// `x ∈ ∂Y(u)`.
    pub contact: [T; 2],
    /// `σ(x)` projected onto the boundary.
    pub image: [T; 2],
    pub image_derivative: Option<T>,
    /// Boundary points of `supp v⁺` near the image with their derivatives.
    pub neighbours: Vec<([T; 2], T)>,
    /// Radius finally searched for neighbours.
    pub radius: T,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfReport<T> {
    pub checks: Vec<ContactCheck<T>>,
    pub tolerance: T,
    pub verdict: HopfVerdict,
}

impl<T: Real> HopfReport<T> {
    pub fn not_applicable() -> Self {
        Self { checks: Vec::new(), tolerance: T::zero(), verdict: HopfVerdict::NotApplicable }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("verdict: {}\ntolerance: {}\n", self.verdict.name(), self.tolerance);
        for c in &self.checks {
            let _ = write!(
                out,
                "contact ({}, {}) -> image ({}, {}): dv/dn = ",
                c.contact[0], c.contact[1], c.image[0], c.image[1]
            );
            match c.image_derivative {
                Some(dn) => {
                    let _ = writeln!(out, "{dn}");
                }
                None => {
                    let _ = writeln!(out, "skipped ({})", c.note.as_deref().unwrap_or("no normal"));
                }
            }
            for (b, dn) in &c.neighbours {
                let _ = writeln!(out, "  nearby ({}, {}): dv/dn = {dn}", b[0], b[1]);
            }
        }
        out
    }
}

const MAX_RADIUS_DOUBLINGS: usize = 4;

/// Evaluates the two Hopf signs for `v = P_{d₁/2} u`.
///
/// At the image `σ(x)` of each `x ∈ ∂Y(u)` the outward derivative is
/// expected positive (`v < 0` just inside); at boundary points of
/// `supp v⁺` within `4h` of the image, where `v` is positive at both
/// stencil depths, (doubling the radius while none is
/// found, never beyond `d`) it is expected `≤ tol`, `tol = h · sup|v| / L`.
pub fn hopf_conflict_check<T: Real>(run: &MovingPolarization<T>) -> Result<HopfReport<T>> {
    let v = &run.field;
    let grid = v.grid();
    let dom = grid.descriptor().ok_or(Error::NoDescriptor)?;
    let lat = grid.lattice();
    let h = grid.h();
    let tol = h * v.sup_norm() / dom.half_width();
    let mut checks = Vec::new();
    for &x in &run.contact.boundary_y {
        let image = dom.project_to_boundary(reflect(x, run.plane_position));
        let image_derivative = match normal_derivative(v, image) {
            Ok(dn) => Some(dn),
            Err(Error::Corner) => {
                checks.push(ContactCheck {
                    contact: x,
                    image,
                    image_derivative: None,
                    neighbours: Vec::new(),
                    radius: T::zero(),
                    note: Some("corner".into()),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut radius = h * T::lit(4.0);
        let mut neighbours = Vec::new();
        for _ in 0..=MAX_RADIUS_DOUBLINGS {
            if radius >= run.contact.d {
                radius = run.contact.d;
            }
            neighbours.clear();
            for i in 0..lat.len() {
                if !(grid.is_inside(i) && grid.boundary_adjacent()[i] && v.values()[i] > T::zero()) {
                    continue;
                }
                let b = dom.project_to_boundary(lat.point(i));
                if (b[0] - image[0]).hypot(b[1] - image[1]) > radius {
                    continue;
                }
                // Hopf needs v one-signed on the inner side: drop points
                // whose difference stencil already reaches the negative part.
                let Some(n) = dom.outward_normal(b, h * T::lit(2.0)) else { continue };
                let positive = |s: T| sample(v, [b[0] - s * n[0], b[1] - s * n[1]]) > T::zero();
                if !(positive(h) && positive(h + h)) {
                    continue;
                }
                if let Ok(dn) = normal_derivative(v, b) {
                    neighbours.push((b, dn));
                }
            }
            if !neighbours.is_empty() || radius >= run.contact.d {
                break;
            }
            radius = radius * T::lit(2.0);
        }
        checks.push(ContactCheck { contact: x, image, image_derivative, neighbours, radius, note: None });
    }
    let conflict = checks.iter().any(|c| {
        c.image_derivative.is_some_and(|dn| dn > T::zero()) && c.neighbours.iter().any(|&(_, dn)| dn <= tol)
    });
    let any_neighbour = checks.iter().any(|c| !c.neighbours.is_empty());
    let verdict = if conflict {
        HopfVerdict::ConflictExhibited
    } else if any_neighbour {
        HopfVerdict::NoConflict
    } else {
        HopfVerdict::Vacuous
    };
    Ok(HopfReport { checks, tolerance: tol, verdict })
}

/// `(δ·ρ − s)·s` with `s` the distance to the boundary and `ρ` the largest
/// such distance over the inside nodes: positive in a boundary collar of
/// width `δρ`, negative deeper inside. On the unit disk with `δ = 1/2` this
/// is `(r − 1/2)(1 − r)`.
pub fn manufactured_field<T: Real>(grid: std::sync::Arc<crate::geometry::Grid<T>>, delta: T) -> Result<GridFunction<T>> {
    let dom = grid.descriptor().ok_or(Error::NoDescriptor)?.clone();
    let lat = grid.lattice();
    let rho = (0..lat.len())
        .filter(|&i| grid.is_inside(i))
        .fold(T::zero(), |m, i| m.max(-dom.signed_distance(lat.point(i))));
    let depth = delta * rho;
    GridFunction::from_fn(grid, |x| {
        let s = -dom.signed_distance(x);
        (depth - s) * s
    })
}

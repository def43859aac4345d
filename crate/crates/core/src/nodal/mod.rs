//! Nodal sets, nodal domains, the distances `d` and `d₁`, and boundary
//! normal derivatives.

mod distance;
mod normal;
mod set;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rearrange::GridFunction;
use crate::scalar::Real;

pub use distance::{below_resolution, dist_to_boundary, e1_distance_d1, Contact, ContactKind};
pub use normal::{normal_derivative, sample};
pub use set::{extract_nodal_set, nodal_domains, Crossing, NodalDomains, NodalSet};

/// Everything the nodal analysis knows about one field.
#[derive(Clone, Debug)]
pub struct NodalDecomposition<T> {
    pub set: NodalSet<T>,
    pub domains: NodalDomains,
    /// `dist(Z(u), ∂Ω)`.
    pub d: T,
    pub h: T,
    /// `None` when `u` is not positive next to the boundary.
    pub contact: Option<Contact<T>>,
}

impl<T: Real> NodalDecomposition<T> {
    /// Analyses a sign-changing `u` on a grid with a domain descriptor.
    pub fn new(u: &GridFunction<T>, tau: T) -> Result<Self> {
        let set = extract_nodal_set(u, tau)?;
        if set.is_empty() || !u.is_sign_changing() {
            return Err(Error::NotSignChanging);
        }
        let domains = nodal_domains(u, tau);
        let d = dist_to_boundary(&set, u.grid())?;
        let contact = match e1_distance_d1(&set, u) {
            Ok(c) => Some(c),
            Err(Error::SignFlipRequired | Error::Precondition(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { set, domains, d, h: u.grid().h(), contact })
    }

    /// `d ≤ h`: the nodal set reaches the boundary at this resolution.
    pub fn touches_boundary(&self) -> bool {
        below_resolution(self.d, self.h)
    }

    pub fn has_plateau(&self) -> bool {
        !self.set.plateau_nodes().is_empty()
    }

    /// One-row CSV: `d,d_le_h,d1,domains,y,boundary_y,contact,plateau`.
    pub fn report_csv(&self) -> String {
        let mut out = String::from("d,d_le_h,d1,domains,y,boundary_y,contact,plateau\n");
        let (d1, y, by, kind) = match &self.contact {
            Some(c) => (c.d1.to_string(), c.y.len(), c.boundary_y.len(), contact_name(c.kind)),
            None => (String::new(), 0, 0, "negative_near_boundary"),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.d,
            self.touches_boundary(),
            d1,
            self.domains.count,
            y,
            by,
            kind,
            self.has_plateau()
        );
        out
    }

    /// The crossing points, one `x,y` row each.
    pub fn crossings_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in self.set.points() {
            let _ = writeln!(out, "{},{}", p[0], p[1]);
        }
        out
    }
}

fn contact_name(kind: ContactKind) -> &'static str {
    match kind {
        ContactKind::Regular => "regular",
        ContactKind::ExtremeFallback => "extreme_fallback",
        ContactKind::BelowResolution => "below_resolution",
    }
}

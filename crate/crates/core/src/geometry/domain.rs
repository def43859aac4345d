//! Analytic planar domains.
//!
//! Every shape is described by an exact signed distance function (negative
//! inside). Membership, boundary projection, normals, ray exits and edge cut
//! fractions are all derived from it.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Point<T> = [T; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum Shape<T> {
    /// Axis-aligned rectangle `(x0, x1) × (y0, y1)`.
    Rectangle { x: [T; 2], y: [T; 2] },
    Disk { center: Point<T>, radius: T },
    /// Rectangle `[-half_length, half_length] × [-radius, radius]` capped by
    /// half-disks at `x₁ = ±half_length`.
    Stadium { half_length: T, radius: T },
    /// Convex polygon, mirror-symmetric about `x₁ = 0`, counter-clockwise.
    Polygon { vertices: Vec<Point<T>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// A bounded, connected, Steiner-symmetric planar domain.
///
/// The symmetry hyperplane is `x₁ = axis()`; for the centred shapes this is
/// `x₁ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainDescriptor<T> {
    shape: Shape<T>,
}

impl<T: Real> DomainDescriptor<T> {
    pub fn rectangle(x0: T, x1: T, y0: T, y1: T) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "rectangle needs x0 < x1 and y0 < y1, got ({x0}, {x1}) x ({y0}, {y1})"
            )));
        }
        Ok(Self { shape: Shape::Rectangle { x: [x0, x1], y: [y0, y1] } })
    }

    /// Rectangle `(-a, a) × (-b, b)`.
    pub fn centered_rectangle(a: T, b: T) -> Result<Self> {
        Self::rectangle(-a, a, -b, b)
    }

    pub fn disk(center: Point<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { shape: Shape::Disk { center, radius } })
    }

    pub fn unit_disk() -> Self {
        Self { shape: Shape::Disk { center: [T::zero(); 2], radius: T::one() } }
    }

    pub fn stadium(half_length: T, radius: T) -> Result<Self> {
        if !(half_length >= T::zero() && radius > T::zero()) {
            return Err(Error::InvalidDomain(format!(
                "stadium needs half_length >= 0 and radius > 0, got {half_length}, {radius}"
            )));
        }
        Ok(Self { shape: Shape::Stadium { half_length, radius } })
    }

    /// Convex polygon symmetric about `x₁ = 0`. Vertices may be given in
    /// either orientation.
    pub fn symmetric_polygon(mut vertices: Vec<Point<T>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        let mut area2 = T::zero();
        for i in 0..n {
            let [ax, ay] = vertices[i];
            let [bx, by] = vertices[(i + 1) % n];
            area2 = area2 + ax * by - bx * ay;
        }
        if area2 == T::zero() {
            return Err(Error::InvalidDomain("degenerate polygon".into()));
        }
        if area2 < T::zero() {
            vertices.reverse();
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross < T::zero() {
                return Err(Error::InvalidDomain("polygon is not convex".into()));
            }
        }
        let scale = vertices.iter().fold(T::zero(), |m, v| m.max(v[0].abs()).max(v[1].abs()));
        let tol = scale * T::lit(1e-9);
        for v in &vertices {
            let mirrored = vertices
                .iter()
                .any(|w| (w[0] + v[0]).abs() <= tol && (w[1] - v[1]).abs() <= tol);
            if !mirrored {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not symmetric about x1 = 0: vertex ({}, {}) has no mirror",
                    v[0], v[1]
                )));
            }
        }
        Ok(Self { shape: Shape::Polygon { vertices } })
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn kind(&self) -> &'static str {
        match self.shape {
            Shape::Rectangle { .. } => "rectangle",
            Shape::Disk { .. } => "disk",
            Shape::Stadium { .. } => "stadium",
            Shape::Polygon { .. } => "polygon",
        }
    }

    /// Flat parameter list in the order used by the configuration format.
    pub fn params(&self) -> Vec<T> {
        match &self.shape {
            Shape::Rectangle { x, y } => vec![x[0], x[1], y[0], y[1]],
            Shape::Disk { center, radius } => vec![center[0], center[1], *radius],
            Shape::Stadium { half_length, radius } => vec![*half_length, *radius],
            Shape::Polygon { vertices } => vertices.iter().flat_map(|v| [v[0], v[1]]).collect(),
        }
    }

    /// `x₁`-coordinate of the symmetry hyperplane.
    pub fn axis(&self) -> T {
        match &self.shape {
            Shape::Rectangle { x, .. } => (x[0] + x[1]) / T::lit(2.0),
            Shape::Disk { center, .. } => center[0],
            Shape::Stadium { .. } | Shape::Polygon { .. } => T::zero(),
        }
    }

    /// `[[x_min, x_max], [y_min, y_max]]`.
    pub fn bounding_box(&self) -> [[T; 2]; 2] {
        match &self.shape {
            Shape::Rectangle { x, y } => [*x, *y],
            Shape::Disk { center, radius } => [
                [center[0] - *radius, center[0] + *radius],
                [center[1] - *radius, center[1] + *radius],
            ],
            Shape::Stadium { half_length, radius } => {
                let w = *half_length + *radius;
                [[-w, w], [-*radius, *radius]]
            }
            Shape::Polygon { vertices } => {
                let mut bb = [[T::infinity(), T::neg_infinity()]; 2];
                for v in vertices {
                    for k in 0..2 {
                        bb[k][0] = bb[k][0].min(v[k]);
                        bb[k][1] = bb[k][1].max(v[k]);
                    }
                }
                bb
            }
        }
    }

    /// Characteristic length: half-width of the bounding box in `x₁`.
    pub fn half_width(&self) -> T {
        let bb = self.bounding_box();
        (bb[0][1] - bb[0][0]) / T::lit(2.0)
    }

    /// Exact signed Euclidean distance to the boundary, negative inside.
    pub fn signed_distance(&self, p: Point<T>) -> T {
        match &self.shape {
            Shape::Rectangle { x, y } => {
                let two = T::lit(2.0);
                let cx = (x[0] + x[1]) / two;
                let cy = (y[0] + y[1]) / two;
                let hx = (x[1] - x[0]) / two;
                let hy = (y[1] - y[0]) / two;
                let qx = (p[0] - cx).abs() - hx;
                let qy = (p[1] - cy).abs() - hy;
                let outside = qx.max(T::zero()).hypot(qy.max(T::zero()));
                outside + qx.max(qy).min(T::zero())
            }
            Shape::Disk { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) - *radius
            }
            Shape::Stadium { half_length, radius } => {
                let cx = p[0].max(-*half_length).min(*half_length);
                (p[0] - cx).hypot(p[1]) - *radius
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut dist = T::infinity();
                let mut inside = true;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let (d, _) = segment_distance(p, a, b);
                    dist = dist.min(d);
                    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                    if cross < T::zero() {
                        inside = false;
                    }
                }
                if inside {
                    -dist
                } else {
                    dist
                }
            }
        }
    }

    pub fn classify(&self, p: Point<T>, tol: T) -> Membership {
        let s = self.signed_distance(p);
        if s < -tol {
            Membership::Inside
        } else if s <= tol {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }

    /// Nearest boundary point.
    pub fn project_to_boundary(&self, p: Point<T>) -> Point<T> {
        match &self.shape {
            Shape::Rectangle { x, y } => {
                let inside = p[0] > x[0] && p[0] < x[1] && p[1] > y[0] && p[1] < y[1];
                if inside {
                    let gaps = [p[0] - x[0], x[1] - p[0], p[1] - y[0], y[1] - p[1]];
                    let k = argmin(&gaps);
                    match k {
                        0 => [x[0], p[1]],
                        1 => [x[1], p[1]],
                        2 => [p[0], y[0]],
                        _ => [p[0], y[1]],
                    }
                } else {
                    [p[0].max(x[0]).min(x[1]), p[1].max(y[0]).min(y[1])]
                }
            }
            Shape::Disk { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let r = dx.hypot(dy);
                if r == T::zero() {
                    [center[0] + *radius, center[1]]
                } else {
                    [center[0] + *radius * dx / r, center[1] + *radius * dy / r]
                }
            }
            Shape::Stadium { half_length, radius } => {
                let cx = p[0].max(-*half_length).min(*half_length);
                let dx = p[0] - cx;
                let r = dx.hypot(p[1]);
                if r == T::zero() {
                    [cx, *radius]
                } else {
                    [cx + *radius * dx / r, *radius * p[1] / r]
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (T::infinity(), p);
                for i in 0..n {
                    let (d, q) = segment_distance(p, vertices[i], vertices[(i + 1) % n]);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    /// Outward unit normal at a boundary point, `None` at corners.
    ///
    /// `b` is projected onto the boundary first; `corner_tol` is the distance
    /// to a vertex below which the point counts as a corner.
    pub fn outward_normal(&self, b: Point<T>, corner_tol: T) -> Option<Point<T>> {
        let b = self.project_to_boundary(b);
        match &self.shape {
            Shape::Rectangle { x, y } => {
                let near_x: Vec<usize> =
                    (0..2).filter(|&k| (b[0] - x[k]).abs() <= corner_tol).collect();
                let near_y: Vec<usize> =
                    (0..2).filter(|&k| (b[1] - y[k]).abs() <= corner_tol).collect();
                match (near_x.as_slice(), near_y.as_slice()) {
                    ([k], []) => Some([if *k == 0 { -T::one() } else { T::one() }, T::zero()]),
                    ([], [k]) => Some([T::zero(), if *k == 0 { -T::one() } else { T::one() }]),
                    _ => None,
                }
            }
            Shape::Disk { center, radius } => {
                Some([(b[0] - center[0]) / *radius, (b[1] - center[1]) / *radius])
            }
            Shape::Stadium { half_length, radius } => {
                let cx = b[0].max(-*half_length).min(*half_length);
                Some([(b[0] - cx) / *radius, b[1] / *radius])
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if vertices.iter().any(|v| (v[0] - b[0]).hypot(v[1] - b[1]) <= corner_tol) {
                    return None;
                }
                let mut best = (T::infinity(), 0);
                for i in 0..n {
                    let (d, _) = segment_distance(b, vertices[i], vertices[(i + 1) % n]);
                    if d < best.0 {
                        best = (d, i);
                    }
                }
                let a = vertices[best.1];
                let c = vertices[(best.1 + 1) % n];
                let (ex, ey) = (c[0] - a[0], c[1] - a[1]);
                let len = ex.hypot(ey);
                Some([ey / len, -ex / len])
            }
        }
    }

    /// Distance travelled from `p` along the unit direction `dir` until the
    /// boundary is hit, by sphere tracing on the signed distance. `None` when
    /// `p` is not inside.
    pub fn ray_exit(&self, p: Point<T>, dir: Point<T>) -> Option<T> {
        let scale = self.half_width().max(T::min_positive_value());
        let tol = scale * T::lit(1e-13);
        if self.signed_distance(p) >= T::zero() {
            return None;
        }
        let mut t = T::zero();
        for _ in 0..100_000 {
            let q = [p[0] + t * dir[0], p[1] + t * dir[1]];
            let s = self.signed_distance(q);
            if s > -tol {
                return Some(t);
            }
            t = t - s;
        }
        Some(t)
    }

    /// Fraction `θ ∈ (0, 1]` of the segment from the inside point `a` to the
    /// non-inside point `b` at which the boundary is crossed.
    pub fn cut_fraction(&self, a: Point<T>, b: Point<T>) -> T {
        let at = |t: T| self.signed_distance([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        if at(T::one()) < T::zero() {
            return T::one();
        }
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..80 {
            let mid = (lo + hi) / T::lit(2.0);
            if at(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

fn argmin<T: Real>(xs: &[T]) -> usize {
    let mut k = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x < xs[k] {
            k = i;
        }
    }
    k
}

/// Distance from `p` to the segment `[a, b]` and the closest point.
fn segment_distance<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> (T, Point<T>) {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let len2 = ex * ex + ey * ey;
    let t = if len2 == T::zero() {
        T::zero()
    } else {
        (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2).max(T::zero()).min(T::one())
    };
    let q = [a[0] + t * ex, a[1] + t * ey];
    ((p[0] - q[0]).hypot(p[1] - q[1]), q)
}

//! Projection onto the nodal Nehari set.
//!
//! For a sign-changing `u` the fibre map `φ(α, β) = E(αu⁺ + βu⁻)` has a
//! unique interior critical point when `f` is a pure power with `q > p`;
//! `αu⁺ + βu⁻` is then the projection. Edges whose ends carry opposite signs
//! couple `α` and `β`; without such edges the two conditions decouple and the
//! closed form is exact.

use crate::error::{Error, Result};
use crate::nonlinearity::{Nonlinearity, SourceTerm};
use crate::rearrange::NehariScaling;
use crate::scalar::Real;
use crate::solver::operator::Discretization;
use crate::sum::Compensated;

/// Everything `φ` depends on, gathered in one pass over the edges.
#[derive(Clone, Debug)]
pub(crate) struct Fibre<T> {
    p: T,
    q: T,
    c: T,
    vol: T,
    /// Energy of edges touching only `u ≥ 0` nodes (scales like `αᵖ`).
    d_plus: T,
    d_minus: T,
    /// `(u⁺/h, |u⁻|/h)` at the two ends of each sign-changing edge.
    cross: Vec<(T, T)>,
    /// `hᴺ Σ |u±|^q`.
    m_plus: T,
    m_minus: T,
}

impl<T: Real> Fibre<T> {
    pub fn new(op: &Discretization<T>, x: &[T], q: T, c: T) -> Self {
        let h = op.h();
        let p = op.p();
        let pow = |t: T| t.abs().powf(p);
        let mut dp = Compensated::new();
        let mut dm = Compensated::new();
        let mut cross = Vec::new();
        for &(a, b) in op.edges() {
            let (xa, xb) = (x[a as usize], x[b as usize]);
            if xa >= T::zero() && xb >= T::zero() {
                dp.add(pow((xb - xa) / h));
            } else if xa <= T::zero() && xb <= T::zero() {
                dm.add(pow((xb - xa) / h));
            } else {
                let (pos, neg) = if xa > T::zero() { (xa, xb) } else { (xb, xa) };
                cross.push((pos / h, -neg / h));
            }
        }
        for (e, &w) in op.boundary().iter().zip(op.boundary_weights()) {
            let v = x[e.node as usize];
            if v > T::zero() {
                dp.add(w * pow(v / h));
            } else if v < T::zero() {
                dm.add(w * pow(v / h));
            }
        }
        let mut mp = Compensated::new();
        let mut mm = Compensated::new();
        for &v in x {
            if v > T::zero() {
                mp.add(v.powf(q));
            } else if v < T::zero() {
                mm.add((-v).powf(q));
            }
        }
        let vol = op.volume();
        Self {
            p,
            q,
            c,
            vol,
            d_plus: dp.value() * vol,
            d_minus: dm.value() * vol,
            cross,
            m_plus: mp.value() * vol,
            m_minus: mm.value() * vol,
        }
    }

    /// `D(u⁺)` and `D(u⁻)` as separate functions.
    pub fn part_energies(&self) -> (T, T) {
        let mut sp = Compensated::new();
        let mut sm = Compensated::new();
        for &(a, b) in &self.cross {
            sp.add(a.powf(self.p));
            sm.add(b.powf(self.p));
        }
        (self.d_plus + sp.value() * self.vol, self.d_minus + sm.value() * self.vol)
    }

    pub fn masses(&self) -> (T, T) {
        (self.m_plus, self.m_minus)
    }

    pub fn has_cross_edges(&self) -> bool {
        !self.cross.is_empty()
    }

    /// `(α ∂φ/∂α, β ∂φ/∂β)` and their derivatives in `(ln α, ln β)`.
    pub fn gradient(&self, alpha: T, beta: T) -> ([T; 2], [[T; 2]; 2]) {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        let mut ga = Compensated::new();
        let mut gb = Compensated::new();
        let mut jaa = Compensated::new();
        let mut jab = Compensated::new();
        let mut jbb = Compensated::new();
        for &(a, b) in &self.cross {
            let (xa, xb) = (alpha * a, beta * b);
            let s = xa + xb;
            let s1 = s.powf(p - one);
            let s2 = s.powf(p - T::lit(2.0));
            ga.add(s1 * xa);
            gb.add(s1 * xb);
            jaa.add((p - one) * s2 * xa * xa + s1 * xa);
            jbb.add((p - one) * s2 * xb * xb + s1 * xb);
            jab.add((p - one) * s2 * xa * xb);
        }
        let ap = alpha.powf(p);
        let bp = beta.powf(p);
        let aq = self.c * alpha.powf(q) * self.m_plus;
        let bq = self.c * beta.powf(q) * self.m_minus;
        let v = self.vol;
        let g = [ap * self.d_plus + v * ga.value() - aq, bp * self.d_minus + v * gb.value() - bq];
        let j = [
            [p * ap * self.d_plus + v * jaa.value() - q * aq, v * jab.value()],
            [v * jab.value(), p * bp * self.d_minus + v * jbb.value() - q * bq],
        ];
        (g, j)
    }

    /// Relative size of the two Nehari conditions at `(α, β)`.
    fn defect(&self, alpha: T, beta: T) -> T {
        let (g, _) = self.gradient(alpha, beta);
        let sa = self.c * alpha.powf(self.q) * self.m_plus;
        let sb = self.c * beta.powf(self.q) * self.m_minus;
        (g[0].abs() / sa).max(g[1].abs() / sb)
    }

    /// The scaling that solves the coupled Nehari conditions: damped Newton
    /// in `(ln α, ln β)` started from the decoupled closed form.
    pub fn solve(&self) -> Result<NehariScaling<T>> {
        let (dp, dm) = self.part_energies();
        let expo = T::one() / (self.q - self.p);
        let mut la = (dp / (self.c * self.m_plus)).ln() * expo;
        let mut lb = (dm / (self.c * self.m_minus)).ln() * expo;
        if !self.has_cross_edges() {
            return NehariScaling::new(la.exp(), lb.exp());
        }
        let tol = T::epsilon() * T::lit(64.0);
        let mut defect = self.defect(la.exp(), lb.exp());
        for _ in 0..200 {
            if defect <= tol {
                break;
            }
            let (g, j) = self.gradient(la.exp(), lb.exp());
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let (mut sa, mut sb) = if det != T::zero() && det.is_finite() {
                ((j[0][1] * g[1] - j[1][1] * g[0]) / det, (j[1][0] * g[0] - j[0][0] * g[1]) / det)
            } else {
                (-g[0] / j[0][0], -g[1] / j[1][1])
            };
            let cap = T::one();
            let m = sa.abs().max(sb.abs());
            if m > cap {
                sa = sa * cap / m;
                sb = sb * cap / m;
            }
            let mut step = T::one();
            let mut improved = false;
            for _ in 0..60 {
                let (na, nb) = (la + step * sa, lb + step * sb);
                let d = self.defect(na.exp(), nb.exp());
                if d < defect {
                    la = na;
                    lb = nb;
                    defect = d;
                    improved = true;
                    break;
                }
                step = step * T::lit(0.5);
            }
            if !improved {
                break;
            }
        }
        if !(defect <= T::lit(1e-9)) {
            return Err(Error::Solver(format!("Nehari projection stalled at relative defect {defect}")));
        }
        NehariScaling::new(la.exp(), lb.exp())
    }
}

fn power_params<T: Real>(nl: &Nonlinearity<T>) -> Result<(T, T)> {
    match *nl {
        Nonlinearity::Power { p, q, c } if q > p => Ok((q, c)),
        Nonlinearity::Power { p, q, .. } => Err(Error::InvalidNonlinearity(format!(
            "Nehari projection needs q > p, got q = {q}, p = {p}"
        ))),
        Nonlinearity::Resonant { .. } => Err(Error::InvalidNonlinearity(
            "Nehari projection needs the power family".into(),
        )),
    }
}

fn check_sign_change<T: Real>(x: &[T]) -> Result<()> {
    let pos = x.iter().any(|&v| v > T::zero());
    let neg = x.iter().any(|&v| v < T::zero());
    if pos && neg {
        Ok(())
    } else {
        Err(Error::NotSignChanging)
    }
}

/// Decoupled closed form `α = (D(u⁺) / (C ∫|u⁺|^q))^{1/(q−p)}`, same for `β`.
pub fn closed_form_scaling<T: Real>(
    op: &Discretization<T>,
    x: &[T],
    nl: &Nonlinearity<T>,
) -> Result<NehariScaling<T>> {
    let (q, c) = power_params(nl)?;
    check_sign_change(x)?;
    let plus: Vec<T> = x.iter().map(|&v| v.max(T::zero())).collect();
    let minus: Vec<T> = x.iter().map(|&v| v.min(T::zero())).collect();
    let (mp, mm) = (op.lp_mass(&plus, q), op.lp_mass(&minus, q));
    if mp == T::zero() || mm == T::zero() {
        return Err(Error::ZeroMass);
    }
    let expo = T::one() / (q - nl.p());
    let alpha = (op.dirichlet(&plus) / (c * mp)).powf(expo);
    let beta = (op.dirichlet(&minus) / (c * mm)).powf(expo);
    NehariScaling::new(alpha, beta)
}

/// Coupled projection: `(α, β)` and `αu⁺ + βu⁻` with both Nehari conditions
/// of the unsplit discrete energy satisfied.
pub fn project<T: Real>(
    op: &Discretization<T>,
    x: &[T],
    nl: &Nonlinearity<T>,
) -> Result<(NehariScaling<T>, Vec<T>)> {
    let (q, c) = power_params(nl)?;
    check_sign_change(x)?;
    let fibre = Fibre::new(op, x, q, c);
    let (mp, mm) = fibre.masses();
    if mp == T::zero() || mm == T::zero() || !mp.is_finite() || !mm.is_finite() {
        return Err(Error::ZeroMass);
    }
    let s = fibre.solve()?;
    let w = x.iter().map(|&v| if v > T::zero() { s.alpha * v } else { s.beta * v }).collect();
    Ok((s, w))
}

/// `⟨E′(u), u±⟩` relative to `∫u± f(u±)`, for both signs.
pub fn nehari_defects<T: Real>(op: &Discretization<T>, x: &[T], nl: &Nonlinearity<T>) -> (T, T) {
    let r = op.residual(x, nl);
    defects_from_residual(op, x, &r, nl)
}

pub(crate) fn defects_from_residual<T: Real>(
    op: &Discretization<T>,
    x: &[T],
    r: &[T],
    nl: &Nonlinearity<T>,
) -> (T, T) {
    let mut gp = Compensated::new();
    let mut gm = Compensated::new();
    let mut sp = Compensated::new();
    let mut sm = Compensated::new();
    for (&v, &ri) in x.iter().zip(r) {
        if v > T::zero() {
            gp.add(ri * v);
            sp.add(v * nl.f(v));
        } else if v < T::zero() {
            gm.add(ri * v);
            sm.add(v * nl.f(v));
        }
    }
    let rel = |g: T, s: T| if s == T::zero() { T::infinity() } else { (g / s).abs() };
    let _ = op;
    (rel(gp.value(), sp.value()), rel(gm.value(), sm.value()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{DomainDescriptor, Grid};
    use crate::rearrange::GridFunction;

    fn disk_field() -> (Discretization<f64>, Vec<f64>) {
        let g = Arc::new(Grid::build(DomainDescriptor::unit_disk(), 1.0 / 16.0).unwrap());
        let op = Discretization::new(g.clone(), 2.0).unwrap();
        let v = GridFunction::from_fn(g, |p| (1.0 - p[0] * p[0] - p[1] * p[1]) * (p[0] + 0.3 * p[1] - 0.1) * 3.0)
            .unwrap();
        let x = op.restrict(&v).unwrap();
        (op, x)
    }

    #[test]
    fn projection_zeroes_both_defects() {
        let (op, x) = disk_field();
        let nl = Nonlinearity::power(2.0, 4.0, 1.0).unwrap();
        let (_, w) = project(&op, &x, &nl).unwrap();
        let (a, b) = nehari_defects(&op, &w, &nl);
        assert!(a < 1e-12 && b < 1e-12, "{a} {b}");
        let (s, _) = project(&op, &w, &nl).unwrap();
        assert!((s.alpha - 1.0).abs() < 1e-12 && (s.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_for_p3() {
        let g = Arc::new(Grid::build(DomainDescriptor::stadium(0.5, 0.5).unwrap(), 1.0 / 16.0).unwrap());
        let op = Discretization::new(g.clone(), 3.0).unwrap();
        let v = GridFunction::from_fn(g, |p| p[0] * (0.25 - p[1] * p[1])).unwrap();
        let x = op.restrict(&v).unwrap();
        let nl = Nonlinearity::power(3.0, 4.0, 1.0).unwrap();
        let (_, w) = project(&op, &x, &nl).unwrap();
        let (a, b) = nehari_defects(&op, &w, &nl);
        assert!(a < 1e-11 && b < 1e-11, "{a} {b}");
    }

    #[test]
    fn closed_form_example() {
        // A 5×1 strip with h = 1: each node of u⁺ = (1, 0, 1, 0, 0) has two
        // vertical edges to the zeros beyond the window, and four horizontal
        // edges see a jump of 1, so D(u⁺) = 8 and ∫|u⁺|⁴ = 2.
        use crate::geometry::Lattice;
        let lat = Lattice::centred(vec![5, 1], 1.0, vec![0.0, 0.0]).unwrap();
        let g = Arc::new(Grid::from_mask(lat, vec![true; 5]).unwrap());
        let op = Discretization::new(g, 2.0).unwrap();
        let x = vec![1.0, 0.0, 1.0, 0.0, -1.0];
        let plus: Vec<f64> = x.iter().map(|v: &f64| v.max(0.0)).collect();
        assert_eq!(op.dirichlet(&plus), 8.0);
        let nl = Nonlinearity::power(2.0, 4.0, 1.0).unwrap();
        let sc = closed_form_scaling(&op, &x, &nl).unwrap();
        assert_eq!(sc.alpha, 2.0);
        // u⁺ and u⁻ share no edge, so the coupled projection agrees.
        let (cp, _) = project(&op, &x, &nl).unwrap();
        assert_eq!(cp, sc);
    }

    #[test]
    fn rejects_one_signed_and_resonant() {
        let (op, x) = disk_field();
        let pos: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let nl = Nonlinearity::power(2.0, 4.0, 1.0).unwrap();
        assert!(matches!(project(&op, &pos, &nl), Err(Error::NotSignChanging)));
        let res = Nonlinearity::resonant(2.0, 10.0).unwrap();
        assert!(matches!(project(&op, &x, &res), Err(Error::InvalidNonlinearity(_))));
    }
}

//! Two-point rearrangement of nodal values.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{polarize_set, PolarizationPlane, Side, Variant};
use crate::rearrange::function::{negative_part, positive_part, GridFunction};
use crate::scalar::Real;

/// `P_a` on raw node values: the smaller value of each mirror pair goes to
/// the `Σ⁺` node, the larger to the `Σ⁻` node.
///
/// Works for any totally ordered value type. Nodes whose mirror lies beyond
/// the lattice window are paired with an implicit 0; if a nonzero value would
/// have to move onto such a phantom node the rearrangement is not a
/// permutation of the window and [`Error::SupportEscape`] is returned.
pub fn polarize_values<T: Real, V: Copy + PartialOrd + Zero>(
    values: &[V],
    plane: &PolarizationPlane<T>,
) -> Result<Vec<V>> {
    plane.check_len(values.len())?;
    let mut out = Vec::with_capacity(values.len());
    for (i, &here) in values.iter().enumerate() {
        let side = plane.side(i);
        let there = match plane.mirror(i) {
            Some(j) => values[j],
            None => {
                let escapes = match side {
                    Side::Positive => here > V::zero(),
                    Side::Negative => here < V::zero(),
                    Side::OnPlane => false,
                };
                if escapes {
                    return Err(Error::SupportEscape { a: plane.offset().to_f64_lossy(), node: i });
                }
                V::zero()
            }
        };
        out.push(match side {
            Side::OnPlane => here,
            Side::Positive => {
                if there < here {
                    there
                } else {
                    here
                }
            }
            Side::Negative => {
                if there > here {
                    there
                } else {
                    here
                }
            }
        });
    }
    Ok(out)
}

/// `P_a v`. The result may be nonzero off the inside mask.
pub fn polarize_function<T: Real>(
    v: &GridFunction<T>,
    plane: &PolarizationPlane<T>,
) -> Result<GridFunction<T>> {
    v.with_values(polarize_values(v.values(), plane)?)
}

/// `(P_a v)± = P_a(v±)`, compared node by node.
pub fn plus_minus_commutation_check<T: Real>(
    v: &GridFunction<T>,
    plane: &PolarizationPlane<T>,
) -> Result<bool> {
    let pv = polarize_function(v, plane)?;
    let plus = positive_part(&pv) == polarize_function(&positive_part(v), plane)?;
    let minus = negative_part(&pv) == polarize_function(&negative_part(v), plane)?;
    Ok(plus && minus)
}

/// `supp P_a v = P_a(supp v⁺) ∪ P̃_a(supp v⁻)`, compared node by node.
pub fn support_decomposition_check<T: Real>(
    v: &GridFunction<T>,
    plane: &PolarizationPlane<T>,
) -> Result<bool> {
    let lhs = polarize_function(v, plane)?.support();
    let plus = polarize_set(&positive_part(v).support(), plane, Variant::P)?;
    let minus = polarize_set(&negative_part(v).support(), plane, Variant::PTilde)?;
    Ok(lhs.iter().zip(plus.iter().zip(&minus)).all(|(&l, (&a, &b))| l == (a || b)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{Grid, Lattice};

    fn line_grid(n: usize, h: f64) -> Arc<Grid<f64>> {
        let lat = Lattice::centred(vec![n], h, vec![0.0]).unwrap();
        let mask = (0..n).map(|i| i > 0 && i + 1 < n).collect();
        Arc::new(Grid::from_mask(lat, mask).unwrap())
    }

    #[test]
    fn odd_line_flips() {
        // Nodes -2..2 in steps of 0.5, v(x) = x.
        let g = line_grid(9, 0.5);
        let v = GridFunction::new(g.clone(), (0..9).map(|i| g.lattice().axis_coord(0, i)).collect())
            .unwrap();
        let plane = g.lattice().plane(0.0).unwrap();
        let pv = polarize_function(&v, &plane).unwrap();
        assert_eq!(pv, v.scale(-1.0));
    }

    #[test]
    fn pair_sorting() {
        let g = line_grid(5, 1.0);
        let plane = g.lattice().plane(0.0).unwrap();
        // x = 1 is in Σ⁺ with mirror x = -1.
        let v = GridFunction::new(g, vec![0.0, 3.0, 0.0, 1.0, 0.0]).unwrap();
        let pv = polarize_function(&v, &plane).unwrap();
        assert_eq!(pv.values(), &[0.0, 3.0, 0.0, 1.0, 0.0]);
        let w = v.with_values(vec![0.0, 1.0, 0.0, 3.0, 0.0]).unwrap();
        assert_eq!(polarize_function(&w, &plane).unwrap().values(), &[0.0, 3.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn even_function_is_fixed() {
        let g = line_grid(11, 0.25);
        let lat = g.lattice();
        let a = 0.25;
        let v = GridFunction::new(g.clone(), (0..11).map(|i| (-(lat.axis_coord(0, i) - a).powi(2)).exp()).collect())
            .unwrap();
        let plane = lat.plane(a).unwrap();
        let pv = polarize_function(&v, &plane).unwrap();
        for i in 0..11 {
            if let Some(j) = plane.mirror(i) {
                if v.values()[j] == v.values()[i] {
                    assert_eq!(pv.values()[i], v.values()[i]);
                }
            }
        }
    }

    #[test]
    fn integer_values() {
        let lat = Lattice::<f64>::centred(vec![5], 1.0, vec![0.0]).unwrap();
        let plane = lat.plane(0.0).unwrap();
        let out = polarize_values(&[0i64, 4, 7, -2, 0], &plane).unwrap();
        assert_eq!(out, vec![0, 4, 7, -2, 0]);
        let out = polarize_values(&[0i64, -2, 7, 4, 0], &plane).unwrap();
        assert_eq!(out, vec![0, 4, 7, -2, 0]);
    }

    #[test]
    fn escape_is_reported() {
        let lat = Lattice::<f64>::centred(vec![5], 1.0, vec![0.0]).unwrap();
        // a = 1: node 0 (x = -2) mirrors to x = 4, beyond the window.
        let plane = lat.plane(1.0).unwrap();
        assert!(matches!(
            polarize_values(&[-1.0, 0.0, 0.0, 0.0, 0.0], &plane),
            Err(Error::SupportEscape { node: 0, .. })
        ));
        assert!(polarize_values(&[1.0, 0.0, 0.0, 0.0, 0.0], &plane).is_ok());
    }

    #[test]
    fn oracles_on_a_sign_changing_line() {
        let g = line_grid(9, 1.0);
        let v = GridFunction::new(g.clone(), vec![0.0, 2.0, -1.0, 0.5, 3.0, -4.0, 1.0, -0.5, 0.0]).unwrap();
        for k in 6..12 {
            let plane = g.lattice().plane_from_pair_sum(k);
            if polarize_function(&v, &plane).is_ok() {
                assert!(plus_minus_commutation_check(&v, &plane).unwrap());
                assert!(support_decomposition_check(&v, &plane).unwrap());
            }
        }
    }

    #[test]
    fn disjoint_bumps() {
        let g = line_grid(11, 1.0);
        // Positive bump on the right, negative bump on the left.
        let v = GridFunction::new(g.clone(), vec![0.0, 0.0, -1.0, -2.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0]).unwrap();
        let plane = g.lattice().plane(0.0).unwrap();
        let pv = polarize_function(&v, &plane).unwrap();
        let expect_plus = polarize_set(&positive_part(&v).support(), &plane, Variant::P).unwrap();
        let expect_minus = polarize_set(&negative_part(&v).support(), &plane, Variant::PTilde).unwrap();
        for i in 0..11 {
            assert_eq!(pv.values()[i] > 0.0, expect_plus[i]);
            assert_eq!(pv.values()[i] < 0.0, expect_minus[i]);
        }
        assert_eq!(pv.values(), &[0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, -2.0, -1.0, 0.0, 0.0]);
    }
}

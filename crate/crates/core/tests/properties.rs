use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use nodal_lab::driver::{parse_config, ExperimentConfig};
use nodal_lab::geometry::{polarize_set, DomainDescriptor, Grid, Variant};
use nodal_lab::nodal::{extract_nodal_set, nodal_domains};
use nodal_lab::rearrange::{
    dirichlet_energy, plus_minus_commutation_check, pointwise_integral, polarize_function,
    support_decomposition_check, GridFunction,
};
use nodal_lab::solver::{nehari_defect, nehari_project};
use nodal_lab::sum::canonical_sum;
use nodal_lab::Nonlinearity;

fn disk() -> Arc<Grid<f64>> {
    static GRID: OnceLock<Arc<Grid<f64>>> = OnceLock::new();
    GRID.get_or_init(|| Arc::new(Grid::build_with_margin(DomainDescriptor::unit_disk(), 0.125, 6).unwrap()))
        .clone()
}

fn field(values: Vec<f64>) -> GridFunction<f64> {
    let g = disk();
    let v = (0..g.len()).map(|i| if g.is_inside(i) { values[i % values.len()] } else { 0.0 }).collect();
    GridFunction::new(g, v).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64, (-4i32..=4).prop_map(|k| k as f64 / 4.0)], 1..400)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn polarization_is_exact(vals in values(), s in -5i64..5) {
        let v = field(vals);
        let lat = v.grid().lattice();
        let plane = lat.plane_from_pair_sum(lat.centre_pair_sum() + s);
        let pv = polarize_function(&v, &plane).unwrap();
        prop_assert!(plus_minus_commutation_check(&v, &plane).unwrap());
        prop_assert!(support_decomposition_check(&v, &plane).unwrap());
        prop_assert_eq!(polarize_function(&pv, &plane).unwrap(), pv.clone());
        let g = |x: f64| x.abs().powf(2.5);
        prop_assert_eq!(pointwise_integral(&pv, g).to_bits(), pointwise_integral(&v, g).to_bits());
        for p in [1.5, 2.0, 3.0] {
            prop_assert!(dirichlet_energy(&pv, p).unwrap() <= dirichlet_energy(&v, p).unwrap());
        }
    }

    #[test]
    fn set_polarization_is_monotone(a in prop::collection::vec(any::<bool>(), 1..64), s in -5i64..5) {
        let g = disk();
        let lat = g.lattice();
        let m1: Vec<bool> = (0..lat.len()).map(|i| a[i % a.len()] && g.is_inside(i)).collect();
        let m2: Vec<bool> = (0..lat.len()).map(|i| m1[i] || (i % 3 == 0 && g.is_inside(i))).collect();
        let plane = lat.plane_from_pair_sum(lat.centre_pair_sum() + s);
        for variant in [Variant::P, Variant::PTilde] {
            let p1 = polarize_set(&m1, &plane, variant).unwrap();
            let p2 = polarize_set(&m2, &plane, variant).unwrap();
            prop_assert!(p1.iter().zip(&p2).all(|(&x, &y)| !x || y));
            prop_assert_eq!(p1.iter().filter(|&&b| b).count(), m1.iter().filter(|&&b| b).count());
        }
    }

    #[test]
    fn nodal_structure_ignores_scale_and_sign(vals in values(), c in 0.01..100.0f64) {
        let v = field(vals);
        let d = nodal_domains(&v, 0.0);
        let scaled = nodal_domains(&v.scale(c), 0.0);
        let flipped = nodal_domains(&v.scale(-1.0), 0.0);
        prop_assert_eq!(d.count, scaled.count);
        prop_assert_eq!(d.count, flipped.count);
        prop_assert_eq!(d.positive_count(), flipped.negative_count());
        let z = extract_nodal_set(&v, 0.0).unwrap();
        let zf = extract_nodal_set(&v.scale(-1.0), 0.0).unwrap();
        prop_assert_eq!(z.points().collect::<Vec<_>>(), zf.points().collect::<Vec<_>>());
    }

    #[test]
    fn canonical_sum_ignores_order(mut terms in prop::collection::vec(-1e6..1e6f64, 0..200), seed in any::<u64>()) {
        let before = canonical_sum(terms.clone());
        let n = terms.len().max(1);
        terms.rotate_left(seed as usize % n);
        terms.reverse();
        prop_assert_eq!(before.to_bits(), canonical_sum(terms).to_bits());
    }

    #[test]
    fn projection_lands_on_the_nehari_set(
        c in prop::collection::vec(-1.0..1.0f64, 4),
        p in prop_oneof![Just(2.0), Just(3.0)],
        q in 4.0..6.0f64,
    ) {
        let g = Arc::new(Grid::build(DomainDescriptor::unit_disk(), 0.125).unwrap());
        let u = GridFunction::from_fn(g, |[x, y]| {
            (1.0 - x * x - y * y) * (x + 0.3 * c[0] + c[1] * x * y + c[2] * y * y + 0.5 * c[3] * y)
        })
        .unwrap();
        prop_assume!(u.is_sign_changing());
        let nl = Nonlinearity::power(p, q, 1.0).unwrap();
        let (s, w) = nehari_project(&u, &nl).unwrap();
        prop_assert!(s.alpha > 0.0 && s.beta > 0.0);
        let (dp, dm) = nehari_defect(&w, &nl).unwrap();
        prop_assert!(dp.abs() < 1e-10 && dm.abs() < 1e-10, "{} {}", dp, dm);
    }

    #[test]
    fn config_text_round_trips(
        p in 1.5..4.0f64,
        dq in 0.5..3.0f64,
        n in prop_oneof![Just(8.0), Just(16.0), Just(32.0)],
        seed in any::<u64>(),
        refine in 1usize..4,
    ) {
        let text = format!(
            "domain.kind = stadium\ndomain.params = 0.5, 0.5\np = {p}\nq = {}\nh = {}\nrefine = {refine}\nsolver.seed = {seed}\n",
            p + dq,
            1.0 / n
        );
        let cfg: ExperimentConfig<f64> = parse_config(&text).unwrap();
        let again: ExperimentConfig<f64> = parse_config(&cfg.to_text()).unwrap();
        prop_assert_eq!(again.to_text(), cfg.to_text());
        prop_assert_eq!(again.solver.seed, seed);
        prop_assert_eq!(again.refinements().len(), refine);
    }
}

#[test]
fn single_precision_pipeline() {
    use nodal_lab::{first_eigenpair, Grid32, SolverConfig32};
    let g = Arc::new(Grid32::build(DomainDescriptor::centered_rectangle(1.0f32, 1.0).unwrap(), 0.125).unwrap());
    let r = first_eigenpair(g.clone(), 2.0f32, &SolverConfig32 { eps_res: Some(1e-3), ..Default::default() }).unwrap();
    // five-point spectrum on (−1, 1)², h = 1/8
    let exact = 2.0 * 4.0 / 0.125f32.powi(2) * (std::f32::consts::PI * 0.125 / 4.0).sin().powi(2);
    assert!((r.lambda - exact).abs() < 1e-3 * exact, "{} {exact}", r.lambda);

    let g = Arc::new(Grid32::build_with_margin(DomainDescriptor::centered_rectangle(1.0f32, 1.0).unwrap(), 0.125, 4).unwrap());
    let v = GridFunction::from_fn(g.clone(), |[x, y]: [f32; 2]| (x + 0.2) * (1.0 - x * x) * (1.0 - y * y)).unwrap();
    let plane = g.lattice().plane(0.25f32).unwrap();
    let pv = polarize_function(&v, &plane).unwrap();
    assert!(dirichlet_energy(&pv, 2.0).unwrap() <= dirichlet_energy(&v, 2.0).unwrap());
}

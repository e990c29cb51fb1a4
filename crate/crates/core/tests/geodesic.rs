use kstab_core::config::{NormalConeConfig, Rounding, ToricConfig};
use kstab_core::geodesic::*;
use kstab_core::pl::{Affine, PlConcave};
use kstab_core::polytope::Polytope;
use kstab_core::rat::{int, rat, Rat};

fn unit() -> Polytope {
    Polytope::interval(int(0), int(1)).unwrap()
}

fn on_unit(affines: Vec<Affine>) -> ToricConfig {
    let g = PlConcave::new(affines, &unit()).unwrap();
    ToricConfig::new(unit(), g, Rounding::Ceil).unwrap()
}

fn product() -> ToricConfig {
    on_unit(vec![Affine::new(vec![int(1)], int(0))])
}

fn constant(kappa: Rat) -> ToricConfig {
    on_unit(vec![Affine::new(vec![int(0)], kappa)])
}

fn simplex_product() -> ToricConfig {
    let s = Polytope::simplex(2, int(1)).unwrap();
    let g = PlConcave::new(vec![Affine::new(vec![int(1), int(0)], int(0))], &s).unwrap();
    ToricConfig::new(s, g, Rounding::Ceil).unwrap()
}

fn max_err(grid: &PotentialGrid, f: impl Fn(f64) -> f64) -> f64 {
    grid.points().iter().zip(&grid.values).map(|(y, v)| (v - f(y[0])).abs()).fold(0.0, f64::max)
}

#[test]
fn reference_is_the_softplus() {
    let lab = GeodesicLab::new(&product(), 10_001, 10.0).unwrap();
    let phi = lab.reference().unwrap().grid;
    assert!(max_err(&phi, softplus) <= 1e-3);
    assert_eq!(lab.ray(0.0).unwrap().grid, phi);
    assert!(lab.ray(-0.1).is_err());
}

#[test]
fn product_ray_is_a_translated_softplus() {
    let lab = GeodesicLab::new(&product(), 10_001, 10.0).unwrap();
    let ray = lab.ray(1.0).unwrap().grid;
    assert!(max_err(&ray, |y| softplus(y + 1.0)) <= 1e-3);
}

#[test]
fn constant_configuration_translates_the_reference() {
    let lab = GeodesicLab::new(&constant(rat(3, 4)), 2001, 8.0).unwrap();
    let phi = lab.reference().unwrap().grid;
    for t in [0.5, 2.0] {
        let ray = lab.ray(t).unwrap().grid;
        let worst = ray.values.iter().zip(&phi.values).map(|(a, b)| (a - b - 0.75 * t).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-12);
    }
    assert!(gradient_map_residual(&lab, 1.0).unwrap() < 1e-9);
    let fit = aubin_mabuchi_slope(&lab, &[0.0, 0.5, 1.0]).unwrap();
    assert!((fit.slope - 0.75).abs() < 1e-3);
}

#[test]
fn trivial_energy_is_flat() {
    let lab = GeodesicLab::new(&constant(int(0)), 2001, 8.0).unwrap();
    let fit = aubin_mabuchi_slope(&lab, &[0.0, 0.5, 1.0, 1.5]).unwrap();
    assert!(fit.slope.abs() < 1e-12);
}

#[test]
fn equilibrium_examples() {
    let lab = GeodesicLab::new(&product(), 10_001, 10.0).unwrap();
    let phi = lab.reference().unwrap().grid;
    // Below the minimal weight the constraint is void.
    let below = lab.equilibrium(-0.5).unwrap();
    assert_eq!(below.grid().unwrap(), &phi);
    // At y = 0 the constrained maximum of -u0 over [1/2, 1] sits at 1/2.
    let half = lab.equilibrium(0.5).unwrap();
    let g = half.grid().unwrap();
    let mid = g.points().iter().position(|y| y[0].abs() < 1e-12).unwrap();
    assert!((g.values[mid] - 2f64.ln()).abs() < 1e-9);
    assert!(lab.equilibrium(1.5).unwrap().is_neg_infinity());
}

#[test]
fn mass_identity_examples() {
    let lab = GeodesicLab::new(&product(), 10_001, 10.0).unwrap();
    let (lhs, rhs) = ma_mass_identity(&lab, &rat(1, 2)).unwrap();
    assert_eq!(rhs, rat(1, 2));
    assert!((lhs - 0.5).abs() <= 1e-2);
    let (lhs, rhs) = ma_mass_identity(&lab, &rat(-1, 1)).unwrap();
    assert_eq!(rhs, int(1));
    assert!((lhs - 1.0).abs() <= 1e-2);
    let (lhs, rhs) = ma_mass_identity(&lab, &rat(2, 1)).unwrap();
    assert_eq!((lhs, rhs), (0.0, int(0)));
}

#[test]
fn planar_mass_identity() {
    let lab = GeodesicLab::new(&simplex_product(), 101, 10.0).unwrap();
    let (lhs, rhs) = ma_mass_identity(&lab, &rat(1, 2)).unwrap();
    assert_eq!(rhs, rat(1, 4));
    assert!((lhs - 0.25).abs() < 2e-2, "{lhs}");
}

#[test]
fn residual_is_first_order() {
    let coarse = GeodesicLab::new(&product(), 2001, 10.0).unwrap();
    let fine = GeodesicLab::new(&product(), 4001, 10.0).unwrap();
    let (a, b) = (gradient_map_residual(&coarse, 1.0).unwrap(), gradient_map_residual(&fine, 1.0).unwrap());
    assert!(a <= 1e-2 && (1.5..=2.5).contains(&(a / b)), "{a} {b}");
    assert!(gradient_map_residual(&coarse, 0.0).is_err());
}

#[test]
fn planar_residual_is_small() {
    let lab = GeodesicLab::new(&simplex_product(), 61, 10.0).unwrap();
    assert!(gradient_map_residual(&lab, 1.0).unwrap() < 5e-2);
}

#[test]
fn normal_cone_energy_slope() {
    let unit = unit();
    let nc = NormalConeConfig::new(unit, 0, rat(1, 2)).unwrap();
    let lab = GeodesicLab::new(nc.toric(), 10_001, 10.0).unwrap();
    let fit = aubin_mabuchi_slope(&lab, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    assert!((fit.slope + 0.125).abs() <= 1e-2, "{}", fit.slope);
    assert!(tangent_law_distance(&lab, 64).unwrap() < 1e-2);
}

#[test]
fn planar_energy_slope_is_twice_b0() {
    // b0 = ∫ x1 over the standard triangle = 1/6.
    let lab = GeodesicLab::new(&simplex_product(), 101, 10.0).unwrap();
    let fit = aubin_mabuchi_slope(&lab, &[0.0, 0.5, 1.0]).unwrap();
    assert!((fit.slope - 1.0 / 3.0).abs() < 1e-2, "{}", fit.slope);
}

#[test]
fn maximality_and_tangent_law() {
    let lab = GeodesicLab::new(&product(), 10_001, 10.0).unwrap();
    for l in [0.1, 0.5, 0.9] {
        assert!(maximality_leakage(&lab, l).unwrap() <= 1e-3);
    }
    assert!(tangent_law_distance(&lab, 64).unwrap() < 1e-3);
}

#[test]
fn ray_is_convex_in_time() {
    let tent = on_unit(vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(-1)], int(1))]);
    let lab = GeodesicLab::new(&tent, 2001, 8.0).unwrap();
    let times: Vec<f64> = (0..8).map(|i| i as f64 * 0.4).collect();
    assert!(ray_convexity_defect(&lab, &times).unwrap() <= 1e-12);
}

#[test]
fn ray_agrees_with_equilibrium_envelope() {
    let lab = GeodesicLab::new(&product(), 2001, 8.0).unwrap();
    let levels: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
    let t = 1.5;
    let direct = lab.ray(t).unwrap().grid;
    let envelope = lab.ray_from_equilibria(t, &levels).unwrap();
    assert!(direct.sup_distance(&envelope) <= t * 2.0 / 400.0 + 1e-9);
    assert!(envelope.values.iter().zip(&direct.values).all(|(e, d)| *e <= d + 1e-12));
}

#[test]
fn equilibrium_family_is_monotone_and_concave() {
    let nc = NormalConeConfig::new(unit(), 0, rat(1, 2)).unwrap();
    let lab = GeodesicLab::new(nc.toric(), 2001, 8.0).unwrap();
    let levels: Vec<f64> = (0..=20).map(|i| -0.5 + 0.5 * i as f64 / 20.0).collect();
    let (mono, conc) = equilibrium_family_defects(&lab, &levels).unwrap();
    assert!(mono <= 0.0, "{mono}");
    assert!(conc <= 1e-3, "{conc}");
}

#[test]
fn bergman_envelopes_increase_to_the_equilibrium() {
    let lab = GeodesicLab::new(&product(), 4001, 6.0).unwrap();
    let psi = lab.equilibrium(0.5).unwrap();
    let gap = |k| {
        let b = lab.bergman_approx(&rat(1, 2), k).unwrap();
        b.grid().unwrap().sup_distance(psi.grid().unwrap())
    };
    let (g32, g64) = (gap(32), gap(64));
    assert!(g64 <= g32, "{g32} {g64}");
    let below = lab.bergman_approx(&int(-1), 256).unwrap();
    assert!(below.grid().unwrap().sup_distance(&lab.reference().unwrap().grid) < 1e-2);
    assert!(lab.bergman_approx(&int(2), 16).unwrap().is_neg_infinity());
}

#[test]
fn comparison_examples() {
    let lab = GeodesicLab::new(&product(), 4001, 10.0).unwrap();
    let axes = lab.primal_axes().to_vec();
    let phi = Equilibrium::Grid(lab.reference().unwrap().grid);
    let psi = lab.equilibrium(0.3).unwrap();
    assert!(comparison_monotonicity(&phi, &psi, &axes, 1e-3).unwrap().holds());
    let lifted = match &phi {
        Equilibrium::Grid(g) => Equilibrium::Grid(PotentialGrid { values: g.values.iter().map(|v| v + 5.0).collect(), ..g.clone() }),
        Equilibrium::NegInfinity => unreachable!(),
    };
    match comparison_monotonicity(&phi, &lifted, &axes, 1e-12).unwrap() {
        Comparison::Holds { mass, other_mass } => assert!((mass - other_mass).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
    let psi2 = lab.equilibrium(0.7).unwrap();
    assert!(comparison_monotonicity(&psi, &psi2, &axes, 1e-3).unwrap().holds());
    assert!(matches!(
        comparison_monotonicity(&Equilibrium::NegInfinity, &psi, &axes, 1e-3).unwrap(),
        Comparison::Inconclusive(_)
    ));
}

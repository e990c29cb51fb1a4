//! Metric lower bounds on toric Fano models: the density ratio against the
//! Kähler–Einstein equation and the one-dimensional scalar-curvature bound.
//!
//! Metrics are symplectic potentials `u` on the moment polytope with
//! closed-form derivatives. At `x = ∇φ(y)` the Kähler potential is
//! `φ = <x, ∇u> - u` and `det D²φ = 1 / det D²u`, so the ratio
//! `n! e^{-φ} / MA(φ)` becomes `C e^{-(<x,∇u> - u)} det D²u(x)`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::config::TestConfiguration;
use crate::error::{Error, Result};
use crate::geodesic::potential::{lattice_facets, PotentialFn};
use crate::polytope::Polytope;
use crate::rat::{int, to_f64, Rat};
use crate::spectra::{fit_invariants, integral_f0, norms, Exponent, TRIVIAL_RAY_DIAGNOSIS};

/// `sum_i l_i log l_i + <x, A x>/2 + <b, x> + e sum_j x_j^4`, with `l_i` the
/// lattice distances to the facets.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMetric {
    facets: Vec<(Vec<f64>, f64)>,
    pub quadratic: Vec<Vec<f64>>,
    pub linear: Vec<f64>,
    pub quartic: f64,
}

impl SymplecticMetric {
    pub fn guillemin(p: &Polytope) -> Self {
        let n = p.dim();
        SymplecticMetric { facets: lattice_facets(p), quadratic: vec![vec![0.0; n]; n], linear: vec![0.0; n], quartic: 0.0 }
    }

    pub fn perturbed(mut self, quadratic: Vec<Vec<f64>>, linear: Vec<f64>, quartic: f64) -> Self {
        self.quadratic = quadratic;
        self.linear = linear;
        self.quartic = quartic;
        self
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    fn distances(&self, x: &[f64]) -> Vec<f64> {
        self.facets.iter().map(|(n, off)| off - dot(n, x)).collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for l in self.distances(x) {
            if l < -crate::geodesic::potential::DOMAIN_TOL {
                return f64::INFINITY;
            }
            if l > 0.0 {
                total += l * l.ln();
            }
        }
        let ax: Vec<f64> = self.quadratic.iter().map(|r| dot(r, x)).collect();
        total + dot(x, &ax) / 2.0 + dot(&self.linear, x) + self.quartic * x.iter().map(|v| v.powi(4)).sum::<f64>()
    }

    /// Gradient at an interior point.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = (0..self.dim())
            .map(|i| dot(&self.quadratic[i], x) + self.linear[i] + 4.0 * self.quartic * x[i].powi(3))
            .collect();
        for ((n, _), l) in self.facets.iter().zip(self.distances(x)) {
            for (gi, ni) in g.iter_mut().zip(n) {
                *gi -= ni * (l.ln() + 1.0);
            }
        }
        g
    }

    /// Hessian at an interior point.
    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut h = self.quadratic.clone();
        for i in 0..d {
            h[i][i] += 12.0 * self.quartic * x[i] * x[i];
        }
        for ((n, _), l) in self.facets.iter().zip(self.distances(x)) {
            for i in 0..d {
                for j in 0..d {
                    h[i][j] += n[i] * n[j] / l;
                }
            }
        }
        h
    }

    /// Scalar curvature `-(1/u'')''` of a metric on an interval.
    pub fn scalar_curvature_1d(&self, x: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim() });
        }
        let (mut f, mut f1, mut f2) = (self.quadratic[0][0] + 12.0 * self.quartic * x * x, 24.0 * self.quartic * x, 24.0 * self.quartic);
        for (n, off) in &self.facets {
            let (n, l) = (n[0], off - n[0] * x);
            f += n * n / l;
            f1 += n * n * n / (l * l);
            f2 += 2.0 * n.powi(4) / (l * l * l);
        }
        if !(f > 0.0) {
            return Err(Error::DegenerateMetric(format!("u'' = {f} at x = {x}")));
        }
        Ok(f2 / (f * f) - 2.0 * f1 * f1 / (f * f * f))
    }

    pub fn potential_fn(&self) -> PotentialFn {
        let me = self.clone();
        Arc::new(move |x: &[f64]| me.value(x))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(h: &[Vec<f64>]) -> f64 {
    match h.len() {
        1 => h[0][0],
        2 => h[0][0] * h[1][1] - h[0][1] * h[1][0],
        _ => f64::NAN,
    }
}

/// Midpoint quadrature on the polytope: cell centres of a `nodes`-per-axis
/// grid over the bounding box that lie strictly inside, with weights scaled
/// to sum to the exact volume.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(p: &Polytope, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidParameter("quadrature needs at least 2 nodes per axis".into()));
        }
        let (lo, hi) = p.bounding_box();
        let axes: Vec<crate::geodesic::Axis> = (0..p.dim())
            .map(|d| crate::geodesic::Axis::new(to_f64(&lo[d]), to_f64(&hi[d]), nodes + 1).map(|a| a.cell_centres()))
            .collect::<Result<_>>()?;
        let facets = lattice_facets(p);
        let points: Vec<Vec<f64>> = crate::geodesic::grid::tensor_points(&axes)
            .into_iter()
            .filter(|x| facets.iter().all(|(n, off)| off - dot(n, x) > 1e-9))
            .collect();
        if points.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let w = to_f64(&p.volume()) / points.len() as f64;
        Ok(Quadrature { weights: vec![w; points.len()], points })
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `(∫ |f|^p)^{1/p}`, or the maximum of `|f|` for `p = ∞`.
    pub fn norm(&self, f: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            f.iter().map(|v| v.abs()).fold(0.0, f64::max)
        } else {
            self.integrate(&f.iter().map(|v| v.abs().powf(p)).collect::<Vec<_>>()).powf(1.0 / p)
        }
    }
}

/// A toric Fano model: the polytope of the anticanonical class with sample
/// metrics. Index 0 is the Guillemin metric.
#[derive(Debug, Clone)]
pub struct FanoModel {
    pub name: String,
    polytope: Polytope,
    metrics: Vec<SymplecticMetric>,
    quadrature: Quadrature,
}

impl FanoModel {
    pub fn new(name: &str, polytope: Polytope, metrics: Vec<SymplecticMetric>, nodes: usize) -> Result<Self> {
        let n = polytope.dim();
        if n == 0 || n > 2 {
            return Err(Error::InvalidParameter(format!("Fano models are supported in dimensions 1 and 2, not {n}")));
        }
        let origin = vec![0i64; n];
        if !polytope.is_lattice_polytope() || polytope.interior_lattice_points(1) != vec![origin] {
            return Err(Error::InvalidParameter(format!("{name}: polytope is not reflexive about the origin")));
        }
        if polytope.halfspaces().iter().any(|h| h.primitive().1 != int(1)) {
            return Err(Error::InvalidParameter(format!("{name}: facets are not at lattice distance 1 from the origin")));
        }
        let quadrature = Quadrature::new(&polytope, nodes)?;
        Ok(FanoModel { name: name.into(), polytope, metrics, quadrature })
    }

    /// `[-1, 1]` with the Guillemin (Fubini–Study) metric and quartic bumps.
    pub fn projective_line(nodes: usize) -> Result<Self> {
        let p = Polytope::interval(int(-1), int(1))?;
        let fs = SymplecticMetric::guillemin(&p);
        let mut metrics = vec![fs.clone()];
        metrics.extend((1..=5).map(|i| fs.clone().perturbed(vec![vec![0.05 * i as f64]], vec![0.0], 0.1 * i as f64)));
        FanoModel::new("p1", p, metrics, nodes)
    }

    /// The triangle `(-1,-1), (2,-1), (-1,2)`.
    pub fn projective_plane(nodes: usize) -> Result<Self> {
        let p = Polytope::from_vertices(&[vec![int(-1), int(-1)], vec![int(2), int(-1)], vec![int(-1), int(2)]])?;
        Self::planar("p2", p, nodes)
    }

    /// The quadrilateral `(0,-1), (2,-1), (-1,2), (-1,0)` of the plane blown up
    /// at one point.
    pub fn blow_up(nodes: usize) -> Result<Self> {
        let p = Polytope::from_vertices(&[
            vec![int(0), int(-1)],
            vec![int(2), int(-1)],
            vec![int(-1), int(2)],
            vec![int(-1), int(0)],
        ])?;
        Self::planar("blowup", p, nodes)
    }

    fn planar(name: &str, p: Polytope, nodes: usize) -> Result<Self> {
        let base = SymplecticMetric::guillemin(&p);
        let mut metrics = vec![base.clone()];
        metrics.extend((1..=5).map(|i| {
            let s = 0.1 * i as f64;
            base.clone().perturbed(vec![vec![s, 0.3 * s], vec![0.3 * s, 0.5 * s]], vec![0.05 * s, -0.05 * s], 0.02 * s)
        }));
        FanoModel::new(name, p, metrics, nodes)
    }

    pub fn by_name(name: &str, nodes: usize) -> Result<Self> {
        match name {
            "p1" => Self::projective_line(nodes),
            "p2" => Self::projective_plane(nodes),
            "blowup" => Self::blow_up(nodes),
            _ => Err(Error::InvalidParameter(format!("unknown Fano model {name:?} (expected p1, p2 or blowup)"))),
        }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn metrics(&self) -> &[SymplecticMetric] {
        &self.metrics
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }
}

/// `n! e^{-φ} / MA(φ)` at the quadrature points, normalized so that its
/// integral against Lebesgue measure on the polytope is the volume.
pub fn density_ratio(model: &FanoModel, metric: usize) -> Result<Vec<f64>> {
    let m = model
        .metrics
        .get(metric)
        .ok_or_else(|| Error::InvalidParameter(format!("model {} has no metric {metric}", model.name)))?;
    let raw = model
        .quadrature
        .points
        .par_iter()
        .map(|x| {
            let d = det(&m.hessian(x));
            if !(d > 0.0) || (model.dim() == 2 && !(m.hessian(x)[0][0] > 0.0)) {
                return Err(Error::DegenerateMetric(format!("Hessian not positive definite at {x:?}")));
            }
            Ok((m.value(x) - dot(x, &m.gradient(x))).exp() * d)
        })
        .collect::<Result<Vec<f64>>>()?;
    let c = to_f64(&model.polytope.volume()) / model.quadrature.integrate(&raw);
    Ok(raw.into_iter().map(|r| r * c).collect())
}

/// One instance of `‖T‖_p ‖ratio - 1‖_q >= F₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub p: Exponent,
    /// `‖ratio - 1‖_q` (or `‖S - Ŝ‖_q`).
    pub lhs: f64,
    pub f1: Rat,
    pub norm_t: f64,
    /// `F₁ / ‖T‖_p`, absent when the ray is trivial.
    pub rhs: Option<f64>,
    pub holds: bool,
    /// `|∫(g - F₀)(h)| <= ‖g - F₀‖_p ‖h‖_q` on the quadrature grid.
    pub holder_holds: bool,
    /// `∫(g - F₀) h` on the quadrature grid.
    pub pairing: f64,
    pub diagnosis: Option<&'static str>,
}

/// Slack allowed when comparing quadrature values to exact ones.
pub const BOUND_TOL: f64 = 1e-6;

fn bound_check(quad: &Quadrature, cfg: &TestConfiguration, p: Exponent, h: &[f64]) -> Result<BoundCheck> {
    let q = p.conjugate();
    let lhs = quad.norm(h, q);
    let toric = cfg.toric();
    let f1 = fit_invariants(cfg)?.f1;
    let report = norms(cfg, p)?;
    let f0 = to_f64(&integral_f0(toric)?);
    let centred: Vec<f64> = quad.points.iter().map(|x| toric.g().eval_f64(x) - f0).collect();
    let pairing = quad.integrate(&centred.iter().zip(h).map(|(a, b)| a * b).collect::<Vec<_>>());
    let pf = match p {
        Exponent::Finite(e) => e as f64,
        Exponent::Infinity => f64::INFINITY,
    };
    let holder_holds = pairing.abs() <= quad.norm(&centred, pf) * lhs * (1.0 + 1e-12) + 1e-15;
    if report.norm == 0.0 {
        return Ok(BoundCheck { p, lhs, f1, norm_t: 0.0, rhs: None, holds: true, holder_holds, pairing, diagnosis: Some(TRIVIAL_RAY_DIAGNOSIS) });
    }
    let rhs = to_f64(&f1) / report.norm;
    Ok(BoundCheck { p, lhs, f1, norm_t: report.norm, rhs: Some(rhs), holds: lhs >= rhs - BOUND_TOL, holder_holds, pairing, diagnosis: None })
}

/// The Kähler–Einstein lower bound for one metric of the model against a
/// configuration on the same polytope.
pub fn verify_fano_bound(model: &FanoModel, metric: usize, cfg: &TestConfiguration, p: Exponent) -> Result<BoundCheck> {
    if cfg.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: cfg.dim() });
    }
    let ratio = density_ratio(model, metric)?;
    let dev: Vec<f64> = ratio.iter().map(|r| r - 1.0).collect();
    bound_check(&model.quadrature, cfg, p, &dev)
}

/// The scalar-curvature lower bound `‖T‖_p ‖S - Ŝ‖_q >= F₁` on an interval,
/// with `Ŝ` the mean of `S`.
pub fn calabi_bound_1d(metric: &SymplecticMetric, cfg: &TestConfiguration, p: Exponent, nodes: usize) -> Result<BoundCheck> {
    if cfg.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: cfg.dim() });
    }
    let quad = Quadrature::new(cfg.toric().polytope(), nodes)?;
    let s = quad.points.iter().map(|x| metric.scalar_curvature_1d(x[0])).collect::<Result<Vec<f64>>>()?;
    let vol: f64 = quad.weights.iter().sum();
    let mean = quad.integrate(&s) / vol;
    let dev: Vec<f64> = s.iter().map(|v| v - mean).collect();
    bound_check(&quad, cfg, p, &dev)
}

/// The Fubini–Study metric of the unit interval, whose scalar curvature is 2.
pub fn unit_interval_metric() -> Result<SymplecticMetric> {
    Ok(SymplecticMetric::guillemin(&Polytope::interval(int(0), int(1))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NormalConeConfig, Rounding, ToricConfig};
    use crate::pl::{Affine, PlConcave};
    use crate::rat::rat;

    fn on(p: &Polytope, affines: Vec<Affine>) -> TestConfiguration {
        let g = PlConcave::new(affines, p).unwrap();
        TestConfiguration::Toric(ToricConfig::new(p.clone(), g, Rounding::Ceil).unwrap())
    }

    #[test]
    fn fubini_study_is_einstein() {
        for model in [FanoModel::projective_line(2000).unwrap(), FanoModel::projective_plane(200).unwrap()] {
            let r = density_ratio(&model, 0).unwrap();
            let dev = r.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-9, "{} {dev}", model.name);
            let r1 = density_ratio(&model, 1).unwrap();
            assert!(model.quadrature.norm(&r1.iter().map(|v| v - 1.0).collect::<Vec<_>>(), 2.0) > 1e-3);
            assert!((model.quadrature.integrate(&r1) - to_f64(&model.polytope.volume())).abs() < 1e-9);
        }
    }

    #[test]
    fn interval_curvature_is_two() {
        let m = unit_interval_metric().unwrap();
        for x in [0.01, 0.3, 0.5, 0.99] {
            assert!((m.scalar_curvature_1d(x).unwrap() - 2.0).abs() < 1e-9);
        }
        // Oracle: finite differences of 1/u''.
        let bumped = m.clone().perturbed(vec![vec![0.3]], vec![0.0], 0.2);
        let w = |x: f64| 1.0 / bumped.hessian(&[x])[0][0];
        let (x, h) = (0.37, 1e-4);
        let fd = -(w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
        assert!((bumped.scalar_curvature_1d(x).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let model = FanoModel::blow_up(10).unwrap();
        let m = &model.metrics[3];
        let x = [0.2, -0.3];
        let h = 1e-5;
        let g = m.gradient(&x);
        let hs = m.hessian(&x);
        for i in 0..2 {
            let mut a = x;
            let mut b = x;
            a[i] += h;
            b[i] -= h;
            assert!(((m.value(&a) - m.value(&b)) / (2.0 * h) - g[i]).abs() < 1e-6);
            for j in 0..2 {
                let d = (m.gradient(&a)[j] - m.gradient(&b)[j]) / (2.0 * h);
                assert!((d - hs[i][j]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn blow_up_bound_is_nontrivial_and_holds() {
        let model = FanoModel::blow_up(120).unwrap();
        let cfg = on(model.polytope(), vec![Affine::new(vec![int(1), int(1)], int(0))]);
        for metric in 1..=5 {
            let b = verify_fano_bound(&model, metric, &cfg, Exponent::Finite(2)).unwrap();
            assert_eq!(b.f1, rat(1, 12));
            assert!(b.rhs.unwrap() > 0.0 && b.holds && b.holder_holds, "{b:?}");
            // For linear g the pairing is -∫_P g = -2/3 for every metric.
            assert!((b.pairing + 2.0 / 3.0).abs() < 3e-2, "{}", b.pairing);
        }
    }

    #[test]
    fn trivial_ray_skips_the_bound() {
        let model = FanoModel::projective_line(200).unwrap();
        let cfg = on(model.polytope(), vec![Affine::new(vec![int(0)], int(3))]);
        let b = verify_fano_bound(&model, 1, &cfg, Exponent::Finite(2)).unwrap();
        assert_eq!(b.rhs, None);
        assert_eq!(b.diagnosis, Some(TRIVIAL_RAY_DIAGNOSIS));
    }

    #[test]
    fn calabi_bound_on_the_interval() {
        let unit = Polytope::interval(int(0), int(1)).unwrap();
        let nc = TestConfiguration::NormalCone(NormalConeConfig::new(unit.clone(), 0, rat(1, 2)).unwrap());
        let fs = unit_interval_metric().unwrap();
        let b = calabi_bound_1d(&fs, &nc, Exponent::Finite(2), 1000).unwrap();
        assert!(b.lhs < 1e-9 && b.holds && b.rhs.unwrap() < 0.0);
        let product = on(&unit, vec![Affine::new(vec![int(1)], int(0))]);
        let bumped = fs.perturbed(vec![vec![0.5]], vec![0.0], 0.3);
        for p in [Exponent::Finite(1), Exponent::Finite(2), Exponent::Finite(4), Exponent::Infinity] {
            let b = calabi_bound_1d(&bumped, &product, p, 1000).unwrap();
            assert!(b.lhs.is_finite() && b.lhs > 0.0 && b.holds && b.holder_holds, "{b:?}");
        }
    }

    #[test]
    fn non_reflexive_polytopes_are_rejected() {
        let p = Polytope::interval(int(0), int(1)).unwrap();
        assert!(FanoModel::new("x", p.clone(), vec![SymplecticMetric::guillemin(&p)], 10).is_err());
    }
}

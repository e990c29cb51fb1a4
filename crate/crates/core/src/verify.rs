//! Acceptance suites: exact identities, geodesic numerics and metric bounds.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::config::TestConfiguration;
use crate::error::{Error, Result};
use crate::geodesic::{
    aubin_mabuchi_slope, gradient_map_residual, ma_mass, ma_mass_identity, maximality_leakage, GeodesicLab,
};
use crate::io::{corpus, CorpusEntry};
use crate::ke::{density_ratio, verify_fano_bound, FanoModel};
use crate::rat::{factorial, format_rat, rat, to_f64, Rat};
use crate::spectra::{
    cdf_distance, check_n2_identity, dh_measure, fit_invariants, level_sums_from_table, norms, spectral_measure, Exponent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Geodesic,
    Ke,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Suite::Exact),
            "geodesic" => Ok(Suite::Geodesic),
            "ke" => Ok(Suite::Ke),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidParameter(format!("unknown suite {s:?} (expected exact, geodesic, ke or all)"))),
        }
    }
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Exact => &[1, 2, 3, 8],
            Suite::Geodesic => &[4, 5, 6],
            Suite::Ke => &[7],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest level of the convergence sweep, before multiplying by the period.
    pub kmax: u64,
    /// Nodes per axis of one-dimensional grids.
    pub nodes: usize,
    /// Nodes per axis of two-dimensional grids.
    pub nodes_2d: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { kmax: 256, nodes: 10_001, nodes_2d: 101 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "b0 from lattice counts equals the DH first moment",
        2 => "spectral measures converge to DH at rate 1/k",
        3 => "N2 identity and level-k norm sums",
        4 => "trivial configuration gives the trivial ray",
        5 => "geodesic ray on product P1",
        6 => "comparison monotonicity of equilibrium masses",
        7 => "Kahler-Einstein lower bound",
        8 => "Newton regions match generator products",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_invariants(),
        2 => criterion_convergence(opts),
        3 => criterion_norms(opts),
        4 => criterion_trivial(opts),
        5 => criterion_geodesic(opts),
        6 => criterion_comparison(opts),
        7 => criterion_ke(opts),
        8 => criterion_oracle(),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title: title(id), passed, detail, elapsed: start.elapsed() }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<CriterionResult> {
    suite.criteria().iter().map(|&id| run_criterion(id, opts)).collect()
}

fn entries() -> Result<Vec<CorpusEntry>> {
    corpus()
}

fn find(name: &str) -> Result<TestConfiguration> {
    entries()?
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.config)
        .ok_or_else(|| Error::InvalidParameter(format!("corpus entry {name} missing")))
}

type Outcome = Result<(bool, String)>;

fn criterion_invariants() -> Outcome {
    let mut failures = Vec::new();
    let all = entries()?;
    for e in &all {
        let inv = fit_invariants(&e.config)?;
        let dh = dh_measure(e.config.toric())?;
        // The DH measure carries total mass n! vol(P), so its first moment is n! b0.
        let scaled = &inv.b0 * Rat::from_integer(factorial(e.config.dim()));
        if scaled != dh.moment(1) {
            failures.push(format!("{}: n! b0 {} vs {}", e.name, format_rat(&scaled), format_rat(&dh.moment(1))));
        }
    }
    let nc = find("normal-cone-p1")?;
    let inv = fit_invariants(&nc)?;
    if inv.b0 != rat(-1, 8) || inv.f1 != rat(-1, 8) {
        failures.push(format!("normal-cone-p1: b0 {} F1 {}", format_rat(&inv.b0), format_rat(&inv.f1)));
    }
    for k in (2..=64u64).step_by(2) {
        let direct: i128 = (0..=k as i128).map(|j| (j - k as i128 / 2).min(0)).sum();
        if nc.total_weight(k)? != direct {
            failures.push(format!("normal-cone-p1: w({k}) differs from the ord-j oracle"));
        }
    }
    Ok(if failures.is_empty() {
        (true, format!("{} configurations; normal-cone-p1 b0 = F1 = -1/8", all.len()))
    } else {
        (false, failures.join("; "))
    })
}

fn sweep(kmax: u64) -> Vec<u64> {
    let mut ks = Vec::new();
    let mut k = 8;
    while k <= kmax.max(8) {
        ks.push(k);
        k *= 2;
    }
    ks
}

fn criterion_convergence(opts: &VerifyOptions) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["product-p1", "normal-cone-p1"] {
        let cfg = find(name)?;
        let period = cfg.period()?;
        let dh = dh_measure(cfg.toric())?;
        let dists = sweep(opts.kmax)
            .into_iter()
            .map(|k| Ok((k * period, cdf_distance(&spectral_measure(&cfg, k * period)?, &dh).kolmogorov)))
            .collect::<Result<Vec<(u64, Rat)>>>()?;
        let kr = |k: u64| Rat::from_integer(BigInt::from(k));
        let c = &dists[0].1 * kr(dists[0].0);
        let monotone = dists.windows(2).all(|w| w[1].1 <= w[0].1);
        let rate = dists.iter().all(|(k, d)| d * kr(*k) <= c);
        ok &= monotone && rate;
        let last = dists.last().expect("non-empty sweep");
        notes.push(format!(
            "{name}: C = {}, d({}) = {}{}{}",
            format_rat(&c),
            last.0,
            format_rat(&last.1),
            if monotone { "" } else { ", not monotone" },
            if rate { "" } else { ", exceeds C/k" }
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_norms(opts: &VerifyOptions) -> Outcome {
    let mut failures = Vec::new();
    let all = entries()?;
    for e in &all {
        let inv = fit_invariants(&e.config)?;
        if !check_n2_identity(&e.config, &inv)? {
            failures.push(format!("{}: N2 identity", e.name));
        }
        let period = e.config.period()?;
        let cap = if e.config.dim() == 1 { opts.kmax } else { opts.kmax.min(32) };
        let tables = sweep(cap).into_iter().map(|k| e.config.dims_by_weight(k * period)).collect::<Result<Vec<_>>>()?;
        for p in 1..=4u32 {
            let exact = norms(&e.config, Exponent::Finite(p))?;
            let targets = [exact.q_p.clone().expect("finite"), exact.n_p.clone().expect("finite"), exact.norm_pow.clone()];
            let mut scaled: Vec<[Rat; 3]> = Vec::new();
            for table in &tables {
                let s = level_sums_from_table(table, e.config.dim(), p);
                let kr = Rat::from_integer(BigInt::from(table.level));
                let vals = [s.q_p, s.n_p, s.norm_pow];
                scaled.push(std::array::from_fn(|i| (&vals[i] - &targets[i]).abs() * &kr));
            }
            for i in 0..3 {
                let bound = scaled.iter().take(2).map(|s| s[i].clone()).max().unwrap_or_default() * Rat::from_integer(2.into());
                if scaled.iter().any(|s| s[i] > bound) {
                    failures.push(format!("{}: p = {p} sum {i} not O(1/k)", e.name));
                }
            }
        }
    }
    let product = find("product-p1")?;
    let two = norms(&product, Exponent::Finite(2))?;
    let inf = norms(&product, Exponent::Infinity)?;
    if two.q_p != Some(rat(1, 3)) || two.n_p != Some(rat(1, 12)) || two.norm_pow != rat(1, 12) || inf.norm_pow != rat(1, 2) {
        failures.push("product-p1 targets".into());
    }
    Ok(if failures.is_empty() {
        (true, format!("{} configurations; product-p1 Q2 = 1/3, N2 = 1/12, |T|inf = 1/2", all.len()))
    } else {
        (false, failures.join("; "))
    })
}

fn criterion_trivial(opts: &VerifyOptions) -> Outcome {
    let mut failures = Vec::new();
    let trivial = find("trivial")?;
    if !norms(&trivial, Exponent::Finite(2))?.norm_pow.is_zero() {
        failures.push("trivial: |T|2 != 0".to_string());
    }
    let f0 = to_f64(&fit_invariants(&trivial)?.f0);
    let lab = GeodesicLab::new(trivial.toric(), opts.nodes, 10.0)?;
    let phi = lab.reference()?.grid;
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0, 5.0] {
        let ray = lab.ray(t)?.grid;
        for (a, b) in ray.values.iter().zip(&phi.values) {
            worst = worst.max((a - b - f0 * t).abs());
        }
    }
    if worst > 1e-12 {
        failures.push(format!("trivial ray deviates by {worst:e}"));
    }
    for e in entries()? {
        let constant = e.config.toric().is_constant();
        let positive = norms(&e.config, Exponent::Finite(2))?.norm_pow.is_positive();
        if !constant && !positive {
            failures.push(format!("{}: non-constant g with |T|2 = 0", e.name));
        }
    }
    Ok(if failures.is_empty() { (true, format!("trivial ray error {worst:e}")) } else { (false, failures.join("; ")) })
}

fn criterion_geodesic(opts: &VerifyOptions) -> Outcome {
    let cfg = find("product-p1")?;
    let toric = cfg.toric();
    let coarse = GeodesicLab::new(toric, opts.nodes, 10.0)?;
    let fine = GeodesicLab::new(toric, 2 * opts.nodes - 1, 10.0)?;
    let r1 = gradient_map_residual(&coarse, 1.0)?;
    let r2 = gradient_map_residual(&fine, 1.0)?;
    let ratio = r1 / r2;
    let (lhs, rhs) = ma_mass_identity(&coarse, &rat(1, 2))?;
    let mass_err = (lhs - to_f64(&rhs)).abs();
    let fit = aubin_mabuchi_slope(&coarse, &[0.0, 0.25, 0.5, 0.75, 1.0])?;
    let leak = maximality_leakage(&coarse, 0.5)?;
    let checks = [
        r1 <= 1e-2,
        (1.5..=2.5).contains(&ratio),
        mass_err <= 1e-2,
        (fit.slope - 0.5).abs() <= 1e-3,
        fit.max_residual <= 1e-3,
        leak <= 1e-3,
    ];
    Ok((
        checks.iter().all(|&c| c),
        format!(
            "residual {r1:.3e} (refined {r2:.3e}, ratio {ratio:.3}); mass {lhs:.6} vs 1/2; energy slope {:.6}; leakage {leak:.1e}",
            fit.slope
        ),
    ))
}

fn criterion_comparison(opts: &VerifyOptions) -> Outcome {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let all = entries()?;
    for e in &all {
        let toric = e.config.toric();
        let nodes = if toric.polytope().dim() == 1 { opts.nodes } else { opts.nodes_2d };
        let lab = GeodesicLab::new(toric, nodes, 10.0)?;
        let (lo, hi) = toric.lambda_bounds()?;
        let (lo, hi) = (to_f64(&lo), to_f64(&hi));
        let masses = (0..20)
            .map(|i| {
                let l = lo + (hi - lo) * i as f64 / 19.0;
                ma_mass(&lab.equilibrium(l)?, lab.primal_axes())
            })
            .collect::<Result<Vec<f64>>>()?;
        for i in 0..masses.len() {
            for j in i + 1..masses.len() {
                let excess = masses[j] - masses[i];
                worst = worst.max(excess);
                if excess > 1e-3 {
                    failures.push(format!("{}: level {j} exceeds level {i} by {excess:.2e}", e.name));
                }
            }
        }
    }
    Ok(if failures.is_empty() {
        (true, format!("{} configurations, largest increase {worst:.2e}", all.len()))
    } else {
        (false, failures.join("; "))
    })
}

fn criterion_ke(opts: &VerifyOptions) -> Outcome {
    let mut failures = Vec::new();
    let line = FanoModel::projective_line(opts.nodes)?;
    let plane = FanoModel::projective_plane(opts.nodes_2d * 2)?;
    let blow_up = FanoModel::blow_up(opts.nodes_2d * 2)?;
    let fs_dev = density_ratio(&line, 0)?.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    if fs_dev > 1e-3 {
        failures.push(format!("Fubini-Study ratio deviates by {fs_dev:e}"));
    }
    let ps = [Exponent::Finite(1), Exponent::Finite(2), Exponent::Finite(4), Exponent::Infinity];
    let mut checked = 0;
    let mut blow_up_rhs = None;
    for e in entries()? {
        let on_blow_up = e.name == "blowup-product";
        let (model, metrics): (&FanoModel, Vec<usize>) = if on_blow_up {
            (&blow_up, (1..blow_up.metrics().len()).collect())
        } else if e.config.dim() == 1 {
            (&line, vec![0])
        } else {
            (&plane, vec![0])
        };
        for &m in &metrics {
            for &p in &ps {
                let b = verify_fano_bound(model, m, &e.config, p)?;
                checked += 1;
                if !b.holds {
                    failures.push(format!("{} metric {m} p = {p}: {} < {:?}", e.name, b.lhs, b.rhs));
                }
                if on_blow_up {
                    if b.rhs.map_or(true, |r| r <= 0.0) {
                        failures.push(format!("{}: bound is trivial", e.name));
                    }
                    blow_up_rhs = b.rhs;
                } else if b.f1.is_positive() {
                    failures.push(format!("{}: F1 = {} > 0 on a Kahler-Einstein model", e.name, format_rat(&b.f1)));
                }
            }
        }
    }
    Ok(if failures.is_empty() {
        (true, format!("FS ratio deviation {fs_dev:.1e}; {checked} bounds hold; blow-up rhs {:.4}", blow_up_rhs.unwrap_or(f64::NAN)))
    } else {
        (false, failures.join("; "))
    })
}

fn criterion_oracle() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for e in entries()? {
        if let TestConfiguration::Flag(f) = &e.config {
            for l in 0..f.steps() {
                for m in 1..=4 {
                    mismatches += f.oracle_mismatches(l, m);
                    checked += 1;
                }
            }
        }
    }
    Ok((mismatches == 0 && checked > 0, format!("{checked} (ideal, power) pairs, {mismatches} mismatches")))
}

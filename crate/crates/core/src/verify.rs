//! Exact identity suites, each reporting counterexamples with both sides.

use std::fmt;
use std::str::FromStr;

use num::traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{candidate_destinations, coeff, destination_sum, support, Direction};
use crate::cr_forms::{box_b, dbar_b, dbar_b_star_auto, highest_weight_form, l2_inner, norm_sq, PolyForm};
use crate::error::{Error, Result};
use crate::exact::{rat, CRational, Rational};
use crate::multiplier_calculus::{
    component_section, m_theta_norm_sq_exact, weighted_kernel_norm_sq_exact, ComponentCache, KernelPolynomial,
    KernelSection,
};
use crate::rep_engine::{empirical_coeff, gl_closure};
use crate::spectrum::{check_nj, dimension, eigenvalue_sq, indices_in_box, FormIndex, Kind};
use crate::sphere_geometry::{rational_sphere_points, surface_measure, ExactScalar};

/// The available suites.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eigenvalues,
    Coefficients,
    Kernels,
    Plancherel,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Eigenvalues, Suite::Coefficients, Suite::Kernels, Suite::Plancherel];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eigenvalues => "eigenvalues",
            Suite::Coefficients => "coefficients",
            Suite::Kernels => "kernels",
            Suite::Plancherel => "plancherel",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// Scope of a verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub n: usize,
    /// All form degrees when absent.
    pub j: Option<usize>,
    pub pmax: i64,
    pub qmax: i64,
    /// Number of exact base points for kernel identities.
    pub points: usize,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            j: None,
            pmax: 2,
            qmax: 2,
            points: 5,
            seed: 0,
        }
    }

    fn degrees(&self) -> Result<Vec<usize>> {
        match self.j {
            Some(j) => {
                check_nj(self.n, j)?;
                Ok(vec![j])
            }
            None => {
                check_nj(self.n, 0)?;
                Ok((0..self.n).collect())
            }
        }
    }

    fn indices(&self) -> Result<Vec<FormIndex>> {
        let mut out = Vec::new();
        for j in self.degrees()? {
            out.extend(indices_in_box(self.n, j, self.pmax, self.qmax)?);
        }
        Ok(out)
    }
}

/// One failed identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} != {}", self.check, self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Accumulates checks; failures keep their discovery order.
#[derive(Default, Debug)]
pub struct Tally {
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl Tally {
    pub fn check<T: PartialEq + fmt::Display>(&mut self, name: impl Into<String>, left: T, right: T) {
        self.checks += 1;
        if left != right {
            self.failures.push(Failure {
                check: name.into(),
                left: left.to_string(),
                right: right.to_string(),
            });
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self
    }

    pub fn into_report(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.checks,
            failures: self.failures,
        }
    }
}

fn merge_all(parts: Vec<Result<Tally>>) -> Result<Tally> {
    parts
        .into_iter()
        .try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

/// Runs one suite.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let tally = match suite {
        Suite::Eigenvalues => eigenvalue_suite(cfg)?,
        Suite::Coefficients => coefficient_suite(cfg)?,
        Suite::Kernels => kernel_suite(cfg)?,
        Suite::Plancherel => plancherel_suite(cfg)?,
    };
    Ok(tally.into_report(suite))
}

/// Whether `a` and `b` are parallel: `|<<a, b>>|^2 = ||a||^2 ||b||^2`.
fn parallel(a: &PolyForm, b: &PolyForm) -> Result<(ExactScalar, ExactScalar)> {
    let ab = l2_inner(a, b)?;
    let left = &ab * &ab.conj();
    let right = &norm_sq(a) * &norm_sq(b);
    Ok((left, right))
}

fn l2_close(a: &PolyForm, b: &PolyForm) -> ExactScalar {
    norm_sq(&a.sub(b))
}

/// Rank of the invariant closure against the dimension formula, and the
/// mapping properties of `dbar_b`, its adjoint and `box_b` on highest weight
/// forms, which extend to whole components by equivariance.
pub fn eigenvalue_suite(cfg: &VerifyConfig) -> Result<Tally> {
    let parts: Vec<Result<Tally>> = cfg
        .indices()?
        .par_iter()
        .map(|idx| {
            let mut t = Tally::default();
            let (n, j) = (idx.n(), idx.j());
            let rank = gl_closure(idx)?.rank();
            t.check(format!("rank {idx}"), rank.to_string(), dimension(idx).to_string());
            let f = highest_weight_form(idx);
            let l2 = Rational::from_integer((eigenvalue_sq(idx) as i64).into());
            let lam = ExactScalar::rational(l2.clone(), 0);
            t.check(
                format!("box_b {idx}"),
                l2_close(&box_b(&f)?, &f.scale(&CRational::real(l2.clone()))),
                ExactScalar::zero(n as i32),
            );
            match idx.kind() {
                Kind::Phi => {
                    let d = dbar_b(&f)?;
                    t.check(format!("|dbar_b phi|^2 {idx}"), norm_sq(&d), &lam * &norm_sq(&f));
                    if let Ok(target) = FormIndex::new(n, j + 1, idx.p(), idx.q(), Kind::Psi) {
                        let (l, r) = parallel(&d, &highest_weight_form(&target))?;
                        t.check(format!("dbar_b {idx} lands in {target}"), l, r);
                    }
                    if j >= 1 {
                        let s = dbar_b_star_auto(&f)?;
                        t.check(format!("dbar_b* {idx}"), norm_sq(&s), ExactScalar::zero(n as i32));
                    }
                }
                Kind::Psi => {
                    if j + 1 < n {
                        let d = dbar_b(&f)?;
                        t.check(format!("dbar_b {idx}"), norm_sq(&d), ExactScalar::zero(n as i32));
                    }
                    let s = dbar_b_star_auto(&f)?;
                    t.check(format!("|dbar_b* psi|^2 {idx}"), norm_sq(&s), &lam * &norm_sq(&f));
                    if let Ok(target) = FormIndex::new(n, j - 1, idx.p(), idx.q(), Kind::Phi) {
                        let (l, r) = parallel(&s, &highest_weight_form(&target))?;
                        t.check(format!("dbar_b* {idx} lands in {target}"), l, r);
                    }
                }
            }
            Ok(t)
        })
        .collect();
    merge_all(parts)
}

/// Projection coefficients against the closed forms, and the weighted
/// destination sums.
pub fn coefficient_suite(cfg: &VerifyConfig) -> Result<Tally> {
    let jobs: Vec<(FormIndex, Direction, FormIndex)> = cfg
        .indices()?
        .into_iter()
        .flat_map(|src| {
            [Direction::Z, Direction::ZBar]
                .into_iter()
                .flat_map(move |d| candidate_destinations(&src).into_iter().map(move |dst| (src, d, dst)))
        })
        .collect();
    let parts: Vec<Result<Tally>> = jobs
        .par_iter()
        .map(|(src, d, dst)| {
            let mut t = Tally::default();
            t.check(
                format!("coeff {d} {src} -> {dst}"),
                empirical_coeff(*d, src, dst)?,
                coeff(*d, src, dst),
            );
            Ok(t)
        })
        .collect();
    let mut tally = merge_all(parts)?;
    for src in cfg.indices()? {
        for d in [Direction::Z, Direction::ZBar] {
            tally.check(format!("destination sum {d} {src}"), destination_sum(d, &src), Rational::one());
        }
    }
    Ok(tally)
}

/// Orthogonality integrals of component kernels and the multiplication
/// identities at exact point pairs.
pub fn kernel_suite(cfg: &VerifyConfig) -> Result<Tally> {
    let cache = ComponentCache::new();
    let points = rational_sphere_points(cfg.n, cfg.points.max(2), cfg.seed);
    let bases: Vec<&_> = points.iter().skip(points.len().min(1)).collect();
    let mut tally = Tally::default();
    for j in cfg.degrees()? {
        let indices = indices_in_box(cfg.n, j, cfg.pmax, cfg.qmax)?;
        let sigma = surface_measure(cfg.n);
        for w in &bases {
            let sections: Vec<KernelSection> = indices
                .par_iter()
                .map(|idx| component_section(&*cache.get(idx)?, w))
                .collect::<Result<_>>()?;
            for (a, idx) in sections.iter().zip(&indices) {
                let dim = ExactScalar::rational(Rational::from_integer(dimension(idx).into()), 0);
                tally.check(format!("int |K_{idx}|^2"), a.hs_integral(), &dim / &sigma);
            }
            for k in 0..sections.len() {
                for l in k + 1..sections.len() {
                    let (a, b) = (&sections[k], &sections[l]);
                    let sum = a.add_scaled(b, &CRational::one()).hs_integral();
                    tally.check(
                        format!("orthogonality {} {}", indices[k], indices[l]),
                        sum,
                        &a.hs_integral() + &b.hs_integral(),
                    );
                }
            }
            let parts: Vec<Result<Tally>> = indices
                .par_iter()
                .map(|src| multiplication_checks(src, w, &points, &cache))
                .collect();
            tally = tally.merge(merge_all(parts)?);
        }
    }
    Ok(tally)
}

/// `<z, w> K_src(z, w)` and its conjugate against the coefficient expansion,
/// at every `z` in `points`.
pub fn multiplication_checks(
    src: &FormIndex,
    w: &crate::sphere_geometry::SpherePoint,
    points: &[crate::sphere_geometry::SpherePoint],
    cache: &ComponentCache,
) -> Result<Tally> {
    let mut t = Tally::default();
    let (n, j) = (src.n(), src.j());
    let base = component_section(&*cache.get(src)?, w)?;
    for d in [Direction::Z, Direction::ZBar] {
        let lhs = base.multiply_pairing(d == Direction::ZBar);
        let mut rhs = KernelSection::zero(n, j, w);
        for dst in support(d, src) {
            let s = component_section(&*cache.get(&dst)?, w)?;
            rhs = rhs.add_scaled(&s, &CRational::real(coeff(d, src, &dst)));
        }
        for (i, z) in points.iter().enumerate() {
            let diff = lhs.at(z).sub(&rhs.at(z)).hs_norm_sq();
            t.check(format!("multiplication {d} {src} at point {i}"), diff, ExactScalar::zero(0));
        }
    }
    Ok(t)
}

/// Random kernel supported on one type and one residue class of `p + q`.
pub fn random_single_class_kernel(
    n: usize,
    j: usize,
    kind: Kind,
    class: i64,
    pmax: i64,
    qmax: i64,
    rng: &mut ChaCha8Rng,
) -> Result<KernelPolynomial<CRational>> {
    let mut k = KernelPolynomial::new(n, j)?;
    for idx in indices_in_box(n, j, pmax, qmax)? {
        if idx.kind() == kind && (idx.p() + idx.q()).rem_euclid(3) == class {
            let c = CRational::new(
                rat(rng.random_range(-6..=6), rng.random_range(1..=4)),
                rat(rng.random_range(-6..=6), rng.random_range(1..=4)),
            );
            k.insert(idx, c)?;
        }
    }
    Ok(k)
}

/// `|| weight K ||_2 = || M K ||_2` for kernels of a single type and a
/// single residue class, at several exact base points.
pub fn plancherel_suite(cfg: &VerifyConfig) -> Result<Tally> {
    let cache = ComponentCache::new();
    let points = rational_sphere_points(cfg.n, cfg.points.max(2), cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::new();
    for j in cfg.degrees()? {
        for kind in [Kind::Phi, Kind::Psi] {
            for class in 0..3 {
                let k = random_single_class_kernel(cfg.n, j, kind, class, cfg.pmax, cfg.qmax, &mut rng)?;
                if !k.is_empty() {
                    let w = points[rng.random_range(0..points.len())].clone();
                    jobs.push((k, w));
                }
            }
        }
    }
    let parts: Vec<Result<Tally>> = jobs
        .par_iter()
        .map(|(k, w)| {
            let mut t = Tally::default();
            let lhs = weighted_kernel_norm_sq_exact(k, w, 1, &cache)?;
            let rhs = m_theta_norm_sq_exact(k, 1)?;
            let support: Vec<String> = k.coeffs().keys().map(|i| i.to_string()).collect();
            t.check(format!("weighted norm of [{}]", support.join(" ")), lhs, rhs);
            let lhs0 = weighted_kernel_norm_sq_exact(k, w, 0, &cache)?;
            t.check(
                format!("unweighted norm of [{}]", support.join(" ")),
                lhs0,
                m_theta_norm_sq_exact(k, 0)?,
            );
            Ok(t)
        })
        .collect();
    merge_all(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::Zero;

    #[test]
    fn suites_pass_on_small_ranges() {
        let mut cfg = VerifyConfig::new(3);
        cfg.j = Some(1);
        cfg.pmax = 1;
        cfg.qmax = 1;
        cfg.points = 3;
        for s in Suite::ALL {
            let r = run_suite(s, &cfg).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures.first());
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn failures_carry_both_sides() {
        let mut t = Tally::default();
        t.check("x", rat(1, 2), rat(1, 3));
        t.check("y", rat(1, 2), rat(1, 2));
        let r = t.into_report(Suite::Coefficients);
        assert_eq!(r.checks, 2);
        assert_eq!(r.failures[0].to_string(), "x: 1/2 != 1/3");
        assert_eq!("kernels".parse::<Suite>().unwrap(), Suite::Kernels);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn single_class_kernels_are_single_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = random_single_class_kernel(3, 1, Kind::Psi, 2, 2, 2, &mut rng).unwrap();
        assert!(k.coeffs().keys().all(|i| i.kind() == Kind::Psi && (i.p() + i.q()) % 3 == 2));
        assert!(!k.coeffs().values().any(|c| c.is_zero()) || k.coeffs().is_empty());
    }
}

//! Weighted kernel norms and the quantitative estimates built on them.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::{
    component_section, kernel_section, m_theta_norm_sq, one_minus_epsilon, ComponentCache, KernelPolynomial,
    KernelSection, SectionEvaluator,
};
use super::multiplier::{multiplier_kernel, n_norm, Multiplier};
use crate::error::{Error, Result};
use crate::exact::{to_f64, CRational};
use crate::spectrum::{check_nj, dimension, indices_with_eigenvalue_sq, shell, FormIndex};
use crate::sphere_geometry::{mc_vector, sample_sphere, surface_measure, ExactScalar, McEstimate, SpherePoint};

/// Sample count and seed for a Monte Carlo estimate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
}

/// `|| weight^theta |K(., w)|_HS ||_2^2`, exact or estimated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum WeightedNorm {
    Exact(ExactScalar),
    Estimate(McEstimate),
}

impl WeightedNorm {
    pub fn value(&self) -> f64 {
        match self {
            WeightedNorm::Exact(v) => v.to_f64(),
            WeightedNorm::Estimate(e) => e.mean,
        }
    }

    pub fn std_err(&self) -> f64 {
        match self {
            WeightedNorm::Exact(_) => 0.0,
            WeightedNorm::Estimate(e) => e.std_err,
        }
    }
}

fn dim_f64(idx: &FormIndex) -> f64 {
    dimension(idx).to_f64().unwrap_or(f64::INFINITY)
}

/// Exact `|| weight^theta |K(., w)|_HS ||_2^2` for `theta` in `{0, 1}`,
/// where the integrand is a polynomial.
pub fn weighted_kernel_norm_sq_exact(
    k: &KernelPolynomial<CRational>,
    w: &SpherePoint,
    theta: u8,
    cache: &ComponentCache,
) -> Result<ExactScalar> {
    if k.is_empty() {
        return Ok(ExactScalar::zero(0));
    }
    let s = kernel_section(k, w, cache)?;
    match theta {
        0 => Ok(s.hs_integral()),
        1 => Ok(s.weighted_integral()),
        _ => Err(Error::InvalidArgument("exact weighted norms need theta in {0, 1}".into())),
    }
}

/// Sections of each component at `w` together with the float coefficients.
fn component_sections(
    k: &KernelPolynomial<Complex64>,
    w: &SpherePoint,
    cache: &ComponentCache,
) -> Result<(Vec<KernelSection>, Vec<Complex64>)> {
    let list: Vec<(&FormIndex, &Complex64)> = k.coeffs().iter().collect();
    let sections = list
        .par_iter()
        .map(|(idx, _)| component_section(&*cache.get(idx)?, w))
        .collect::<Result<Vec<_>>>()?;
    Ok((sections, list.iter().map(|(_, c)| **c).collect()))
}

/// Monte Carlo estimates of `int weight^{2 theta_k} |K(., w)|_HS^2` for
/// several exponents at once, from the same samples.
pub fn weighted_kernel_norms_sq_mc(
    k: &KernelPolynomial<Complex64>,
    w: &SpherePoint,
    thetas: &[f64],
    mc: McOptions,
    cache: &ComponentCache,
) -> Result<Vec<McEstimate>> {
    if thetas.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidArgument("theta outside [0, 1]".into()));
    }
    let sigma = surface_measure(k.n()).to_f64();
    if k.is_empty() {
        return Ok(vec![McEstimate { mean: 0.0, std_err: 0.0, samples: mc.samples }; thetas.len()]);
    }
    let (sections, coeffs) = component_sections(k, w, cache)?;
    let ev = SectionEvaluator::new(&sections)?;
    let n = k.n();
    let est = mc_vector(mc.samples, mc.seed, thetas.len(), |rng, out| {
        let z = sample_sphere(rng, n);
        let e = ev.evaluate(&z);
        let t = ev.combine(&e, &coeffs);
        let hs = ev.hs_sq(&e, &t);
        let ws = ev.weight_sq(&z);
        for (o, th) in out.iter_mut().zip(thetas) {
            *o = ws.powf(*th) * hs;
        }
    });
    Ok(est.into_iter().map(|e| e.scale(sigma)).collect())
}

/// `|| weight^theta |K(., w)|_HS ||_2^2`: exact at the endpoints unless a
/// Monte Carlo run is requested, which it must be otherwise.
pub fn weighted_kernel_norm_sq(
    k: &KernelPolynomial<Complex64>,
    w: &SpherePoint,
    theta: f64,
    mc: Option<McOptions>,
    cache: &ComponentCache,
) -> Result<WeightedNorm> {
    match mc {
        Some(opts) => Ok(WeightedNorm::Estimate(
            weighted_kernel_norms_sq_mc(k, w, &[theta], opts, cache)?[0],
        )),
        None if theta == 0.0 || theta == 1.0 => Ok(WeightedNorm::Exact(weighted_kernel_norm_sq_exact(
            &k.to_exact()?,
            w,
            theta as u8,
            cache,
        )?)),
        None => Err(Error::InvalidArgument(format!(
            "theta = {theta} needs a Monte Carlo sample count and seed"
        ))),
    }
}

/// Same-sample check of the interpolation between the two endpoint bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub theta: f64,
    /// `int |K|_HS^2`, `int weight^{2 theta} |K|_HS^2`, `int weight^2 |K|_HS^2`.
    pub unweighted: McEstimate,
    pub weighted: McEstimate,
    pub endpoint: McEstimate,
    /// `(int |K|^2)^{1 - theta} (int weight^2 |K|^2)^theta`.
    pub hoelder_bound: f64,
    /// `|| |M^theta K|_HS ||_2^2`.
    pub m_theta_norm_sq: f64,
    /// `weighted / m_theta_norm_sq`.
    pub constant_sq: f64,
}

pub fn interpolation_check(
    k: &KernelPolynomial<Complex64>,
    w: &SpherePoint,
    theta: f64,
    mc: McOptions,
    cache: &ComponentCache,
) -> Result<InterpolationReport> {
    let est = weighted_kernel_norms_sq_mc(k, w, &[0.0, theta, 1.0], mc, cache)?;
    let m = m_theta_norm_sq(k, theta)?;
    Ok(InterpolationReport {
        theta,
        unweighted: est[0],
        weighted: est[1],
        endpoint: est[2],
        hoelder_bound: est[0].mean.powf(1.0 - theta) * est[2].mean.powf(theta),
        m_theta_norm_sq: m,
        constant_sq: if m > 0.0 { est[1].mean / m } else { 0.0 },
    })
}

/// Weighted Plancherel quantities for `F = G(. / N)` with `G` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlancherelReport {
    pub n: usize,
    pub j: usize,
    pub big_n: usize,
    pub theta: f64,
    pub support: usize,
    /// `|| |M^theta K|_HS ||_2^2`.
    pub m_theta_norm_sq: f64,
    /// `|| |M^{theta/2} K|_HS ||_2^2`.
    pub m_half_theta_norm_sq: f64,
    /// `sum_{i=2}^N C_i`.
    pub shell_max_sum: f64,
    /// `||F(N .)||_{N,2}`.
    pub n_norm: f64,
    /// `m_theta_norm_sq / (N^{2n-1-2 theta} sum C_i)`.
    pub shell_ratio: f64,
    /// `m_half_theta_norm_sq / (N^{2n-theta} ||F(N .)||_{N,2}^2)`.
    pub hormander_ratio: f64,
    /// `int weight^{2 theta} |K|_HS^2` when computed exactly.
    pub exact_lhs: Option<ExactScalar>,
    /// The same integral by Monte Carlo.
    pub mc_lhs: Option<McEstimate>,
}

/// Options for [`plancherel_check`].
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct PlancherelOptions {
    /// Compute the left side exactly (only for `theta` in `{0, 1}`).
    pub exact: bool,
    pub mc: Option<McOptions>,
}

fn safe_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Weighted Plancherel ratios for `F = shape(. / N)` at the base point `w`.
#[allow(clippy::too_many_arguments)]
pub fn plancherel_check(
    shape: &Multiplier,
    n: usize,
    j: usize,
    big_n: usize,
    theta: f64,
    w: &SpherePoint,
    opts: PlancherelOptions,
    cache: &ComponentCache,
) -> Result<PlancherelReport> {
    if big_n < 1 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let f = shape.clone().dilate(big_n as f64);
    let k = multiplier_kernel(&f, n, j, big_n)?;
    let m_theta = m_theta_norm_sq(&k, theta)?;
    let m_half = m_theta_norm_sq(&k, theta / 2.0)?;
    let mut shell_max_sum = 0.0;
    for i in 2..=big_n as u64 {
        let c = shell(n, j, i)?
            .members
            .iter()
            .filter_map(|idx| k.coeffs().get(idx))
            .map(|c| c.norm_sqr())
            .fold(0.0, f64::max);
        shell_max_sum += c;
    }
    let nn = big_n as f64;
    let dn = 2.0 * n as f64;
    let norm = n_norm(shape, big_n);
    let exact_lhs = if opts.exact {
        if theta != 0.0 && theta != 1.0 {
            return Err(Error::InvalidArgument("exact left side needs theta in {0, 1}".into()));
        }
        Some(weighted_kernel_norm_sq_exact(&k.to_exact()?, w, theta as u8, cache)?)
    } else {
        None
    };
    let mc_lhs = match opts.mc {
        Some(mc) => Some(weighted_kernel_norms_sq_mc(&k, w, &[theta], mc, cache)?[0]),
        None => None,
    };
    Ok(PlancherelReport {
        n,
        j,
        big_n,
        theta,
        support: k.coeffs().len(),
        m_theta_norm_sq: m_theta,
        m_half_theta_norm_sq: m_half,
        shell_max_sum,
        n_norm: norm,
        shell_ratio: safe_ratio(m_theta, nn.powf(dn - 1.0 - 2.0 * theta) * shell_max_sum),
        hormander_ratio: safe_ratio(m_half, nn.powf(dn - theta) * norm * norm),
        exact_lhs,
        mc_lhs,
    })
}

/// `sum ((p' + q') / (p' q'))^{1 - 2 theta}` over `p', q' >= 1` with
/// `(i-1)^2 <= 2 p' q' <= i^2`, and the number of lattice points.
pub fn hyperbola_sum(i: u64, theta: f64) -> (f64, u64) {
    let lo = (i - 1) * (i - 1);
    let hi = i * i;
    let e = 1.0 - 2.0 * theta;
    let mut sum = 0.0;
    let mut count = 0u64;
    for q in 1..=hi / 2 {
        let p_lo = lo.div_ceil(2 * q).max(1);
        let p_hi = hi / (2 * q);
        for p in p_lo..=p_hi {
            sum += ((p + q) as f64 / (p * q) as f64).powf(e);
            count += 1;
        }
    }
    (sum, count)
}

/// Lattice and shell sums for one shell index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellEstimate {
    pub n: usize,
    pub j: usize,
    pub i: u64,
    pub theta: f64,
    pub hyperbola_sum: f64,
    pub lattice_points: u64,
    /// `hyperbola_sum / i`.
    pub ratio_to_i: f64,
    /// `sum_{shell} (1 - eps)^theta dim`.
    pub shell_sum: f64,
    /// `shell_sum / i^{2(n - theta) - 1}`.
    pub shell_ratio: f64,
}

/// The lattice sum does not depend on the form degree.
pub fn shell_sum_estimate(n: usize, j: usize, theta: f64, i: u64) -> Result<ShellEstimate> {
    check_nj(n, j)?;
    if !(0.0..0.5).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 1/2)")));
    }
    if i < 2 {
        return Err(Error::InvalidArgument("shell index must be at least 2".into()));
    }
    let (hsum, count) = hyperbola_sum(i, theta);
    let members = shell(n, j, i)?.members;
    // collected first so the float sum has a fixed order
    let terms: Vec<f64> = members
        .par_iter()
        .map(|idx| to_f64(&one_minus_epsilon(idx)).powf(theta) * dim_f64(idx))
        .collect();
    let shell_sum: f64 = terms.iter().sum();
    let fi = i as f64;
    Ok(ShellEstimate {
        n,
        j,
        i,
        theta,
        hyperbola_sum: hsum,
        lattice_points: count,
        ratio_to_i: hsum / fi,
        shell_sum,
        shell_ratio: shell_sum / fi.powf(2.0 * (n as f64 - theta) - 1.0),
    })
}

/// Bound on `||(1 + r^2 box_b)^{-l}||^2_{L2 -> Linf}` from the spectral sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevReport {
    pub n: usize,
    pub j: usize,
    pub r: f64,
    pub ell: u32,
    /// Components with `lambda <= cutoff` are summed exactly.
    pub cutoff: u64,
    pub partial_sum: f64,
    /// Largest `shell dimension / i^{2n-1}` seen up to the cutoff.
    pub shell_constant: f64,
    pub tail_bound: f64,
    pub total: f64,
    /// `total * min(1, r^{2n})`.
    pub ratio: f64,
}

fn isqrt_ceil(x: u64) -> u64 {
    let mut s = (x as f64).sqrt() as u64;
    while s * s > x {
        s -= 1;
    }
    while s * s < x {
        s += 1;
    }
    s
}

/// [`sobolev_check_with_cutoff`] with a cutoff adapted to `r`.
pub fn sobolev_check(n: usize, j: usize, r: f64, ell: u32) -> Result<SobolevReport> {
    let cutoff = ((16.0 / r).ceil() as u64).clamp(8, 120);
    sobolev_check_with_cutoff(n, j, r, ell, cutoff)
}

/// `sum (1 + r^2 lambda^2)^{-2l} dim / sigma`, exact up to the cutoff and
/// bounded beyond it by `sum_{i > I} C i^{2n-1} (1 + r^2 (i-1)^2)^{-2l} / sigma`.
/// The constant `C` is the largest shell ratio observed below the cutoff.
pub fn sobolev_check_with_cutoff(n: usize, j: usize, r: f64, ell: u32, cutoff: u64) -> Result<SobolevReport> {
    check_nj(n, j)?;
    if 2 * ell as usize <= n {
        return Err(Error::Divergent(format!("l = {ell} must exceed n/2 = {}", n as f64 / 2.0)));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    let sigma = surface_measure(n).to_f64();
    let members = indices_with_eigenvalue_sq(n, j, 1, cutoff * cutoff)?;
    let r2 = r * r;
    let e = -2.0 * ell as f64;
    let partial: f64 = members
        .iter()
        .map(|idx| (1.0 + r2 * idx.eigenvalue_sq() as f64).powf(e) * dim_f64(idx))
        .sum::<f64>()
        / sigma;
    // shell dimensions; a squared eigenvalue i^2 lies in shells i and i + 1
    let mut shells: BTreeMap<u64, f64> = BTreeMap::new();
    for idx in &members {
        let l2 = idx.eigenvalue_sq();
        let i = isqrt_ceil(l2);
        *shells.entry(i).or_default() += dim_f64(idx);
        if i * i == l2 {
            *shells.entry(i + 1).or_default() += dim_f64(idx);
        }
    }
    let p = 2.0 * n as f64 - 1.0;
    let c = shells
        .iter()
        .filter(|(i, _)| **i >= 2 && **i <= cutoff)
        .map(|(i, d)| d / (*i as f64).powf(p))
        .fold(0.0, f64::max);
    let m = 10 * cutoff;
    let mut tail = 0.0;
    for i in cutoff + 1..=m {
        let fi = i as f64;
        tail += c * fi.powf(p) * (1.0 + r2 * (fi - 1.0).powi(2)).powf(e);
    }
    let fm = m as f64;
    let four_l = 4.0 * ell as f64;
    tail += c * r.powf(-four_l) * (fm / (fm - 1.0)).powf(four_l) * fm.powf(2.0 * n as f64 - four_l)
        / (four_l - 2.0 * n as f64);
    tail /= sigma;
    let total = partial + tail;
    Ok(SobolevReport {
        n,
        j,
        r,
        ell,
        cutoff,
        partial_sum: partial,
        shell_constant: c,
        tail_bound: tail,
        total,
        ratio: total * r.powf(2.0 * n as f64).min(1.0),
    })
}

/// `int |K(z, w)| dsigma(z)` for the kernel of `(1 - t box_b)_+^delta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RieszPoint {
    pub t: f64,
    pub support: usize,
    pub l1: McEstimate,
}

/// `count` values from `lo` to `hi`, equally spaced on a log scale.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// L1 norms of Bochner-Riesz kernels at one base point for several `t`,
/// sharing samples. Components with equal eigenvalues share a group.
pub fn bochner_riesz_sweep(
    n: usize,
    j: usize,
    delta: f64,
    ts: &[f64],
    w: &SpherePoint,
    mc: McOptions,
    cache: &ComponentCache,
) -> Result<Vec<RieszPoint>> {
    check_nj(n, j)?;
    if !(delta > 0.0) || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("delta and t must be positive".into()));
    }
    if j == 0 || j == n - 1 {
        return Err(Error::InvalidArgument(format!(
            "(1 - t box_b)_+^delta does not vanish at 0, which is an eigenvalue for j = {j}"
        )));
    }
    let t_min = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    let top = (1.0 / t_min).floor() as u64;
    let members = indices_with_eigenvalue_sq(n, j, 1, top)?;
    let mut by_eigen: BTreeMap<u64, Vec<FormIndex>> = BTreeMap::new();
    for idx in members {
        by_eigen.entry(idx.eigenvalue_sq()).or_default().push(idx);
    }
    let eigen: Vec<u64> = by_eigen.keys().cloned().collect();
    let groups: Vec<KernelSection> = by_eigen
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|list| {
            let mut k = KernelPolynomial::<CRational>::new(n, j)?;
            for idx in list.iter() {
                k.insert(*idx, CRational::from_int(1))?;
            }
            kernel_section(&k, w, cache)
        })
        .collect::<Result<_>>()?;
    let coeffs: Vec<Vec<Complex64>> = ts
        .iter()
        .map(|t| {
            let f = Multiplier::BochnerRiesz { t: *t, delta };
            eigen
                .iter()
                .map(|l2| Complex64::new(f.eval((*l2 as f64).sqrt()), 0.0))
                .collect()
        })
        .collect();
    let support: Vec<usize> = coeffs
        .iter()
        .map(|c| {
            c.iter()
                .zip(by_eigen.values())
                .filter(|(x, _)| !x.is_zero())
                .map(|(_, l)| l.len())
                .sum()
        })
        .collect();
    let sigma = surface_measure(n).to_f64();
    let est = if groups.is_empty() {
        vec![McEstimate { mean: 0.0, std_err: 0.0, samples: mc.samples }; ts.len()]
    } else {
        let ev = SectionEvaluator::new(&groups)?;
        mc_vector(mc.samples, mc.seed, ts.len(), |rng, out| {
            let z = sample_sphere(rng, n);
            let e = ev.evaluate(&z);
            for (o, c) in out.iter_mut().zip(&coeffs) {
                *o = ev.op_norm(&e, &ev.combine(&e, c));
            }
        })
        .into_iter()
        .map(|e| e.scale(sigma))
        .collect()
    };
    Ok(ts
        .iter()
        .zip(est)
        .zip(support)
        .map(|((t, l1), support)| RieszPoint { t: *t, support, l1 })
        .collect())
}

pub fn bochner_riesz_l1(
    n: usize,
    j: usize,
    delta: f64,
    t: f64,
    w: &SpherePoint,
    mc: McOptions,
    cache: &ComponentCache,
) -> Result<McEstimate> {
    Ok(bochner_riesz_sweep(n, j, delta, &[t], w, mc, cache)?[0].l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{coeff, support, Direction};
    use crate::exact::rat;
    use crate::sphere_geometry::rational_sphere_points;
    use num::traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI3: f64 = std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI;

    fn phi(p: i64, q: i64) -> FormIndex {
        FormIndex::phi(3, 1, p, q).unwrap()
    }

    #[test]
    fn weighted_norm_examples() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 3, 4)[2];
        let mut k = KernelPolynomial::<Complex64>::new(3, 1).unwrap();
        k.insert(phi(0, 1), Complex64::new(1.0, 0.0)).unwrap();
        match weighted_kernel_norm_sq(&k, w, 1.0, None, &cache).unwrap() {
            WeightedNorm::Exact(v) => assert_eq!(v, ExactScalar::rational(rat(15, 8), -3)),
            other => panic!("{other:?}"),
        }
        let e = weighted_kernel_norm_sq(&k, w, 1.0, Some(McOptions { samples: 20000, seed: 1 }), &cache).unwrap();
        assert!((e.value() - 15.0 / 8.0 / PI3).abs() < 4.0 * e.std_err());
        assert!(weighted_kernel_norm_sq(&k, w, 0.5, None, &cache).is_err());
    }

    #[test]
    fn single_class_identity_and_shift_orthogonality() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 8)[1];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [crate::spectrum::Kind::Phi, crate::spectrum::Kind::Psi] {
            for class in 0..3 {
                let mut k = KernelPolynomial::<CRational>::new(3, 1).unwrap();
                for p in 0..=2 {
                    for q in 1..=2 {
                        if (p + q) % 3 == class {
                            let c = CRational::new(rat(rng.random_range(-5..=5), 3), rat(rng.random_range(-5..=5), 2));
                            k.insert(FormIndex::new(3, 1, p, q, kind).unwrap(), c).unwrap();
                        }
                    }
                }
                let lhs = weighted_kernel_norm_sq_exact(&k, w, 1, &cache).unwrap();
                assert_eq!(lhs, super::super::kernel::m_theta_norm_sq_exact(&k, 1).unwrap());
            }
        }
        // z-shifted kernels of one class are orthogonal
        let a = component_section(&cache.get(&phi(0, 1)).unwrap(), w).unwrap().multiply_pairing(false);
        let b = component_section(&cache.get(&phi(2, 2)).unwrap(), w).unwrap().multiply_pairing(false);
        let sum = a.add_scaled(&b, &CRational::one());
        assert_eq!(sum.hs_integral(), &a.hs_integral() + &b.hs_integral());
    }

    #[test]
    fn mixed_class_constant_is_moderate() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 3)[1];
        let mut k = KernelPolynomial::<CRational>::new(3, 1).unwrap();
        for (p, q) in [(0, 1), (1, 1), (0, 2), (1, 2)] {
            k.insert(phi(p, q), CRational::one()).unwrap();
            k.insert(FormIndex::psi(3, 1, p, q).unwrap(), CRational::one()).unwrap();
        }
        let lhs = weighted_kernel_norm_sq_exact(&k, w, 1, &cache).unwrap().to_f64();
        let rhs = super::super::kernel::m_theta_norm_sq_exact(&k, 1).unwrap().to_f64();
        assert!(lhs <= 6.0 * rhs, "{lhs} {rhs}");
    }

    #[test]
    fn multiplication_identity_in_l2() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 6)[1];
        let src = phi(1, 1);
        let base = component_section(&cache.get(&src).unwrap(), w).unwrap();
        let lhs = base.multiply_pairing(true);
        let mut rhs = KernelSection::zero(3, 1, w);
        for dst in support(Direction::ZBar, &src) {
            let s = component_section(&cache.get(&dst).unwrap(), w).unwrap();
            rhs = rhs.add_scaled(&s, &CRational::real(coeff(Direction::ZBar, &src, &dst)));
        }
        let neg = rhs.add_scaled(&lhs, &CRational::from_int(-1));
        assert!(neg.hs_integral().is_zero());
    }

    #[test]
    fn interpolation_endpoints() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 6)[1];
        let k = multiplier_kernel(&Multiplier::closed(0.0, 3.0), 3, 1, 3).unwrap();
        let r = interpolation_check(&k, w, 0.5, McOptions { samples: 8192, seed: 5 }, &cache).unwrap();
        assert!(r.weighted.mean <= r.hoelder_bound * (1.0 + 1e-12));
        assert!(r.constant_sq <= 6f64.sqrt() * 1.2);
        let exact0 = m_theta_norm_sq(&k, 0.0).unwrap();
        assert!(r.unweighted.agrees_with(exact0, 4.0));
    }

    #[test]
    fn plancherel_examples() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 2)[1];
        let zero = plancherel_check(&Multiplier::Zero, 3, 1, 4, 0.2, w, PlancherelOptions::default(), &cache).unwrap();
        assert_eq!(zero.m_theta_norm_sq, 0.0);
        assert_eq!(zero.shell_ratio, 0.0);
        // F = 1_{2} at N = 4
        let shape = Multiplier::closed(0.5, 0.5);
        let r = plancherel_check(
            &shape,
            3,
            1,
            4,
            1.0,
            w,
            PlancherelOptions { exact: true, mc: None },
            &cache,
        )
        .unwrap();
        assert_eq!(r.support, 2);
        let lhs = r.exact_lhs.unwrap().to_f64();
        assert!((lhs - r.m_theta_norm_sq).abs() < 1e-12 * lhs);
        assert!(r.shell_ratio.is_finite() && r.shell_ratio > 0.0);
    }

    #[test]
    fn hyperbola_and_shell_values() {
        assert_eq!(hyperbola_sum(2, 0.0), (5.0, 3));
        let s = shell_sum_estimate(3, 1, 0.0, 2).unwrap();
        assert_eq!(s.hyperbola_sum, 5.0);
        assert_eq!(s.ratio_to_i, 2.5);
        // shell 2 at n = 3, j = 1 holds the two components with lambda^2 = 4
        assert_eq!(s.shell_sum, 6.0);
        assert!(shell_sum_estimate(3, 1, 0.5, 4).is_err());
        assert!(shell_sum_estimate(3, 1, 0.0, 1).is_err());
        // brute-force oracle for the lattice sum
        for i in 2..40u64 {
            let mut sum = 0.0;
            for p in 1..=i * i {
                for q in 1..=i * i {
                    let v = 2 * p * q;
                    if (i - 1) * (i - 1) <= v && v <= i * i {
                        sum += ((p + q) as f64 / (p * q) as f64).powf(0.6);
                    }
                }
            }
            assert!((hyperbola_sum(i, 0.2).0 - sum).abs() < 1e-9 * sum);
        }
    }

    #[test]
    fn sobolev_examples() {
        let s = sobolev_check(3, 1, 1.0, 2).unwrap();
        assert!(s.total.is_finite() && s.tail_bound < s.partial_sum);
        assert!(sobolev_check(3, 1, 1.0, 1).is_err());
        let rs = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
        let sums: Vec<f64> = rs
            .iter()
            .map(|r| sobolev_check_with_cutoff(3, 1, *r, 2, 40).unwrap().partial_sum)
            .collect();
        assert!(sums.windows(2).all(|w| w[1] <= w[0]));
        // the exact partial sum of the first shell
        let one = sobolev_check_with_cutoff(3, 1, 1.0, 2, 2).unwrap();
        let expect = 6.0 * 5f64.powi(-4) / PI3;
        assert!((one.partial_sum - expect).abs() < 1e-15);
    }

    #[test]
    fn riesz_examples() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 1, 0)[0];
        let mc = McOptions { samples: 2000, seed: 3 };
        let empty = bochner_riesz_l1(3, 1, 6.0, 0.3, w, mc, &cache).unwrap();
        assert_eq!(empty.mean, 0.0);
        let sweep = bochner_riesz_sweep(3, 1, 6.0, &[0.1, 0.2], w, mc, &cache).unwrap();
        assert!(sweep[0].support >= sweep[1].support && sweep[1].support == 2);
        assert!(sweep.iter().all(|p| p.l1.mean > 0.0));
        assert!(bochner_riesz_l1(3, 0, 6.0, 0.1, w, mc, &cache).is_err());
        let ts = log_spaced(1.0 / 48.0, 0.25, 12);
        assert_eq!(ts.len(), 12);
        assert!((ts[11] - 0.25).abs() < 1e-15 && (ts[0] - 1.0 / 48.0).abs() < 1e-15);
    }
}

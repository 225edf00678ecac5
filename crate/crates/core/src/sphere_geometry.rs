//! Exact integration over the unit sphere of C^n, the distance and weight
//! functions, exact rational sphere points and seeded Monte Carlo estimates.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::complex::Complex64;
use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, rational_string, to_f64, CRational, Rational};
use crate::MAX_N;

/// Exponent multi-index; entries past `n` are zero.
pub type Exponents = [u16; MAX_N];

pub fn exponents(v: &[u16]) -> Exponents {
    assert!(v.len() <= MAX_N);
    let mut e = [0u16; MAX_N];
    e[..v.len()].copy_from_slice(v);
    e
}

pub fn total_degree(e: &Exponents) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

/// A Gaussian rational times `pi^pi_power`.
///
/// Addition requires equal powers (zero is compatible with any power);
/// multiplication and division add and subtract them.
#[derive(Clone, Debug, Eq)]
pub struct ExactScalar {
    pub value: CRational,
    pub pi_power: i32,
}

/// Zero compares equal to zero whatever the power of pi.
impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && (self.pi_power == other.pi_power || self.is_zero())
    }
}

impl ExactScalar {
    pub fn new(value: CRational, pi_power: i32) -> Self {
        Self { value, pi_power }
    }

    pub fn rational(value: Rational, pi_power: i32) -> Self {
        Self::new(CRational::real(value), pi_power)
    }

    pub fn zero(pi_power: i32) -> Self {
        Self::new(CRational::zero(), pi_power)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The rational coefficient if the value is real.
    pub fn real_part(&self) -> &Rational {
        &self.value.re
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.value.re) * std::f64::consts::PI.powi(self.pi_power)
    }

    /// `self / other` when both carry the same power of pi.
    pub fn ratio(&self, other: &ExactScalar) -> Option<CRational> {
        if other.is_zero() || (self.pi_power != other.pi_power && !self.is_zero()) {
            return None;
        }
        Some(&self.value / &other.value)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.value.conj(), self.pi_power)
    }

    fn join_power(&self, o: &ExactScalar) -> i32 {
        if self.is_zero() {
            o.pi_power
        } else if o.is_zero() {
            self.pi_power
        } else {
            assert_eq!(self.pi_power, o.pi_power, "mixed powers of pi");
            self.pi_power
        }
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.value + &o.value, self.join_power(o))
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.value - &o.value, self.join_power(o))
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.value * &o.value, self.pi_power + o.pi_power)
    }
}

impl Div<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.value / &o.value, self.pi_power - o.pi_power)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.value, self.pi_power)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*pi^{}", self.value, self.pi_power)
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let imag = !self.value.im.is_zero();
        let mut st = s.serialize_struct("ExactScalar", if imag { 3 } else { 2 })?;
        st.serialize_field("rational", &rational_string(&self.value.re))?;
        if imag {
            st.serialize_field("imag", &rational_string(&self.value.im))?;
        }
        st.serialize_field("pi_power", &self.pi_power)?;
        st.end()
    }
}

/// `sigma(S^{2n-1}) = 2 pi^n / (n-1)!`.
pub fn surface_measure(n: usize) -> ExactScalar {
    ExactScalar::rational(
        Rational::new(2.into(), factorial(n - 1)),
        n as i32,
    )
}

/// Rational part of `int |z^a|^2 dsigma = 2 pi^n a! / (n - 1 + |a|)!`.
pub fn monomial_integral_coeff(n: usize, a: &Exponents) -> Rational {
    let mut num = factorial(0) * 2;
    for &x in &a[..n] {
        if x > 1 {
            num *= factorial(x as usize);
        }
    }
    Rational::new(num, factorial(n - 1 + total_degree(a) as usize))
}

/// `int z^a conj(z)^b dsigma` over the unit sphere of C^n, `n = a.len()`.
pub fn monomial_integral(a: &[u32], b: &[u32]) -> ExactScalar {
    let n = a.len();
    assert_eq!(n, b.len(), "multi-indices of different length");
    if a != b {
        return ExactScalar::zero(n as i32);
    }
    let mut num = factorial(0) * 2;
    for &x in a {
        num *= factorial(x as usize);
    }
    let deg: u32 = a.iter().sum();
    ExactScalar::rational(
        Rational::new(num, factorial(n - 1 + deg as usize)),
        n as i32,
    )
}

/// A point of the unit sphere with Gaussian-rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpherePoint {
    coords: Vec<CRational>,
}

impl SpherePoint {
    pub fn new(coords: Vec<CRational>) -> Result<Self> {
        let norm: Rational = coords.iter().map(|c| c.norm_sqr()).sum();
        if !norm.is_one() {
            return Err(Error::NotUnit(rational_string(&norm)));
        }
        if coords.len() < 2 || coords.len() > MAX_N {
            return Err(Error::InvalidDimension(coords.len()));
        }
        Ok(Self { coords })
    }

    /// Standard basis vector `e_k`, `k` zero-based.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut coords = vec![CRational::zero(); n];
        coords[k] = CRational::one();
        Self { coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CRational] {
        &self.coords
    }

    pub fn to_float(&self) -> Vec<Complex64> {
        self.coords.iter().map(|c| c.to_complex64()).collect()
    }

    /// `<z, w> = sum z_m conj(w_m)`.
    pub fn hermitian(&self, w: &SpherePoint) -> CRational {
        let mut acc = CRational::zero();
        for (a, b) in self.coords.iter().zip(&w.coords) {
            acc += &(a * &b.conj());
        }
        acc
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn hermitian(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn is_unit(z: &[Complex64]) -> bool {
    let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    (s - 1.0).abs() <= 1e-12
}

/// `dist(z, w) = 2 |1 - <z, w>|^{1/2}`.
pub fn dist(z: &[Complex64], w: &[Complex64]) -> f64 {
    2.0 * (Complex64::one() - hermitian(z, w)).norm().sqrt()
}

/// `weight(z, w) = |1 - |<z, w>|^2|^{1/2}`.
pub fn weight(z: &[Complex64], w: &[Complex64]) -> f64 {
    (1.0 - hermitian(z, w).norm_sqr()).abs().sqrt()
}

/// The distance computed from the exact value of `|1 - <z, w>|^2`.
pub fn dist_exact(z: &SpherePoint, w: &SpherePoint) -> f64 {
    let d = (CRational::one() - z.hermitian(w)).norm_sqr();
    2.0 * to_f64(&d).sqrt().sqrt()
}

/// The weight computed from the exact value of `1 - |<z, w>|^2`.
pub fn weight_exact(z: &SpherePoint, w: &SpherePoint) -> f64 {
    let s = Rational::one() - z.hermitian(w).norm_sqr();
    to_f64(&s).abs().sqrt()
}

/// Exact unit points: the standard basis first, then seeded points with
/// Gaussian-rational coordinates.
///
/// Each random point comes from an integer tuple `u` and a scale `d`: the
/// vector `(2 d u, d^2 - |u|^2)` has integer norm `d^2 + |u|^2`, and its
/// `2n` real entries are shuffled into the real and imaginary parts.
pub fn rational_sphere_points(n: usize, count: usize, seed: u64) -> Vec<SpherePoint> {
    let mut out: Vec<SpherePoint> = (0..n.min(count)).map(|k| SpherePoint::basis(n, k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let d: i64 = rng.random_range(1..=3);
        let u: Vec<i64> = (0..2 * n - 1).map(|_| rng.random_range(-2..=2)).collect();
        let u2: i64 = u.iter().map(|x| x * x).sum();
        let norm = d * d + u2;
        let mut v: Vec<i64> = u.iter().map(|x| 2 * d * x).collect();
        v.push(d * d - u2);
        // Fisher-Yates on the real coordinates
        for i in (1..v.len()).rev() {
            let k = rng.random_range(0..=i);
            v.swap(i, k);
        }
        let coords: Vec<CRational> = (0..n)
            .map(|m| {
                CRational::new(
                    Rational::new(v[2 * m].into(), norm.into()),
                    Rational::new(v[2 * m + 1].into(), norm.into()),
                )
            })
            .collect();
        let p = SpherePoint::new(coords).expect("unit by construction");
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Uniform point on the unit sphere of C^n via a normalized complex Gaussian.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let s: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if s > 1e-300 {
            return v.into_iter().map(|c| c / s).collect();
        }
    }
}

/// Mean of i.i.d. samples with its standard error.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn exact(v: f64) -> Self {
        Self {
            mean: v,
            std_err: 0.0,
            samples: 0,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mean: self.mean * s,
            std_err: self.std_err * s.abs(),
            samples: self.samples,
        }
    }

    /// Ratio of two independent estimates with first-order error propagation.
    pub fn ratio(&self, other: &McEstimate) -> Self {
        let r = self.mean / other.mean;
        let rel = ((self.std_err / self.mean).powi(2) + (other.std_err / other.mean).powi(2)).sqrt();
        Self {
            mean: r,
            std_err: (r * rel).abs(),
            samples: self.samples.min(other.samples),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err + 1e-12 * value.abs().max(1.0)
    }
}

pub const MC_BATCH: usize = 4096;

/// Runs `samples` draws of a vector-valued statistic in fixed batches.
///
/// Batch `b` uses ChaCha8 stream `b` of `seed`, and partial sums are combined
/// in batch order, so the result does not depend on the thread count.
pub fn mc_vector<F>(samples: usize, seed: u64, dim: usize, f: F) -> Vec<McEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let batches = samples.div_ceil(MC_BATCH);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut sum = vec![0.0; dim];
            let mut sq = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for _ in 0..count {
                buf.iter_mut().for_each(|x| *x = 0.0);
                f(&mut rng, &mut buf);
                for k in 0..dim {
                    sum[k] += buf[k];
                    sq[k] += buf[k] * buf[k];
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; dim];
    let mut sq = vec![0.0; dim];
    for (s, q) in partial {
        for k in 0..dim {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let nn = samples as f64;
    (0..dim)
        .map(|k| {
            let mean = sum[k] / nn;
            let var = ((sq[k] / nn - mean * mean) * nn / (nn - 1.0).max(1.0)).max(0.0);
            McEstimate {
                mean,
                std_err: (var / nn).sqrt(),
                samples,
            }
        })
        .collect()
}

/// `int f dsigma` by uniform sampling.
pub fn mc_integrate<F>(n: usize, samples: usize, seed: u64, f: F) -> McEstimate
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let sigma = surface_measure(n).to_f64();
    mc_vector(samples, seed, 1, |rng, out| {
        let z = sample_sphere(rng, n);
        out[0] = f(&z);
    })[0]
    .scale(sigma)
}

/// Ball measure, doubling ratio and weighted ball integral near one point.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct BallStatistics {
    pub t: f64,
    pub theta: f64,
    /// `sigma(B(z, t))`.
    pub ball_measure: McEstimate,
    /// `sigma(B(z, 2t)) / sigma(B(z, t))`.
    pub doubling_ratio: McEstimate,
    /// `int_{B(z,t)} weight(z, y)^{-theta} dsigma(y)`.
    pub weighted_integral: McEstimate,
    /// `min(1, t^{2n})`.
    pub measure_scale: f64,
    /// `min(1, t^{2n - theta})`.
    pub weighted_scale: f64,
}

impl BallStatistics {
    pub fn measure_ratio(&self) -> McEstimate {
        self.ball_measure.scale(1.0 / self.measure_scale)
    }

    pub fn weighted_ratio(&self) -> McEstimate {
        self.weighted_integral.scale(1.0 / self.weighted_scale)
    }
}

/// Diameter of the sphere for `dist`.
pub const DIAMETER: f64 = 2.0 * std::f64::consts::SQRT_2;

/// A uniform unit vector orthogonal to `z`.
fn orthogonal_unit<R: Rng + ?Sized>(rng: &mut R, z: &[Complex64]) -> Vec<Complex64> {
    loop {
        let g = sample_sphere(rng, z.len());
        let c = hermitian(&g, z);
        let v: Vec<Complex64> = g.iter().zip(z).map(|(a, b)| a - c * b).collect();
        let s = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if s > 1e-8 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Importance-sampled estimates of `(sigma(B), int_B weight^{-theta})` for
/// the ball `B(z, t)`.
///
/// The inner product `u = <y, z>` of a uniform `y` has density
/// `(n-1)/pi (1 - |u|^2)^{n-2}` on the unit disk, and `y` lies in the ball
/// iff `|1 - u| < t^2/4`; `u` is drawn uniformly from that disk, `y` is
/// rebuilt from it, and membership and weight are evaluated on `y` itself.
fn ball_integrals(z: &[Complex64], t: f64, theta: f64, samples: usize, seed: u64) -> [McEstimate; 2] {
    let n = z.len();
    let sigma = surface_measure(n).to_f64();
    let rho = (t * t / 4.0).min(2.0);
    let area = std::f64::consts::PI * rho * rho;
    let dens = (n as f64 - 1.0) / std::f64::consts::PI;
    let est = mc_vector(samples, seed, 2, |rng, out| {
        let r = rho * rng.random::<f64>().sqrt();
        let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let u = Complex64::new(1.0, 0.0) + Complex64::from_polar(r, phase);
        let s = 1.0 - u.norm_sqr();
        if s <= 0.0 {
            return;
        }
        let v = orthogonal_unit(rng, z);
        let y: Vec<Complex64> = z
            .iter()
            .zip(&v)
            .map(|(a, b)| u * a + s.sqrt() * b)
            .collect();
        if dist(&y, z) >= t {
            return;
        }
        let imp = dens * s.powi(n as i32 - 2) * area;
        out[0] = imp;
        let w = weight(z, &y);
        out[1] = imp * w.powf(-theta);
    });
    [est[0].scale(sigma), est[1].scale(sigma)]
}

/// Seeded estimates of the ball statistics at `z`.
pub fn mc_ball_statistics(
    z: &[Complex64],
    t: f64,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Result<BallStatistics> {
    if !is_unit(z) {
        return Err(Error::NotUnit(format!("{}", z.iter().map(|c| c.norm_sqr()).sum::<f64>())));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius t = {t} must be positive")));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} must lie in [0, 1)")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let n = z.len();
    let sigma = surface_measure(n).to_f64();
    let [small, weighted] = ball_integrals(z, t, theta, samples, seed);
    let ball_measure = if t > DIAMETER { McEstimate::exact(sigma) } else { small };
    let doubling_ratio = if t > DIAMETER {
        McEstimate::exact(1.0)
    } else if 2.0 * t > DIAMETER {
        McEstimate::exact(sigma).ratio(&ball_measure)
    } else {
        let [big, _] = ball_integrals(z, 2.0 * t, theta, samples, seed ^ 0x9e37_79b9_7f4a_7c15);
        big.ratio(&ball_measure)
    };
    let two_n = 2.0 * n as f64;
    Ok(BallStatistics {
        t,
        theta,
        ball_measure,
        doubling_ratio,
        weighted_integral: weighted,
        measure_scale: t.powf(two_n).min(1.0),
        weighted_scale: t.powf(two_n - theta).min(1.0),
    })
}

/// `sigma(B(z, t))` by plain uniform sampling; a cross-check of the
/// importance sampler at moderate radii.
pub fn mc_ball_measure_naive(z: &[Complex64], t: f64, samples: usize, seed: u64) -> McEstimate {
    mc_integrate(z.len(), samples, seed, |y| if dist(y, z) < t { 1.0 } else { 0.0 })
}

/// Number of random triples violating the triangle inequality by more than
/// `1e-12`.
pub fn triangle_inequality_violations(n: usize, triples: usize, seed: u64) -> usize {
    let est = mc_vector(triples, seed, 1, |rng, out| {
        let x = sample_sphere(rng, n);
        let y = sample_sphere(rng, n);
        let z = sample_sphere(rng, n);
        if dist(&x, &z) > dist(&x, &y) + dist(&y, &z) + 1e-12 {
            out[0] = 1.0;
        }
    });
    (est[0].mean * triples as f64).round() as usize
}

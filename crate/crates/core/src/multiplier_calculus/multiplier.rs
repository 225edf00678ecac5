//! Spectral multipliers as closed-form descriptors, the discrete
//! Hormander norm, and assembly of multiplier kernels.

use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;

use super::kernel::KernelPolynomial;
use crate::error::{Error, Result};
use crate::spectrum::{check_nj, indices_with_eigenvalue_sq};

/// A polynomial on `[lo, hi)` with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

/// Real roots of a polynomial inside `[lo, hi]`, found by splitting the
/// interval at the roots of the derivative and bisecting each monotone piece.
fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&derivative(&c), lo, hi));
    cuts.push(hi);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (horner(&c, a), horner(&c, b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = horner(&c, m);
            if fm == 0.0 || m == a || m == b {
                a = m;
                b = m;
                break;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        out.push(0.5 * (a + b));
    }
    if horner(&c, hi) == 0.0 {
        out.push(hi);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `sup |p|` over `[lo, hi]`.
fn poly_sup_abs(c: &[f64], lo: f64, hi: f64) -> f64 {
    let mut best = horner(c, lo).abs().max(horner(c, hi).abs());
    for x in real_roots(&derivative(c), lo, hi) {
        best = best.max(horner(c, x).abs());
    }
    best
}

/// A real spectral multiplier `F`, evaluated at `lambda >= 0`.
#[derive(Clone)]
pub enum Multiplier {
    Zero,
    Constant(f64),
    /// Indicator of an interval with the given closedness at each end.
    Indicator {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
    /// Piecewise polynomial, zero off the pieces.
    Piecewise(Vec<PolyPiece>),
    /// `(1 - t lambda^2)_+^delta`.
    BochnerRiesz { t: f64, delta: f64 },
    /// `exp(1 - 1 / (1 - x^2))` with `x = (lambda - center) / radius`.
    Bump { center: f64, radius: f64 },
    /// `inner(lambda / scale)`.
    Dilated { inner: Box<Multiplier>, scale: f64 },
    /// An arbitrary function; cell suprema come from `resolution` samples.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        resolution: usize,
    },
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Zero => write!(f, "Zero"),
            Multiplier::Constant(c) => write!(f, "Constant({c})"),
            Multiplier::Indicator {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => write!(
                f,
                "Indicator{}{lo}, {hi}{}",
                if *lo_closed { "[" } else { "(" },
                if *hi_closed { "]" } else { ")" }
            ),
            Multiplier::Piecewise(p) => write!(f, "Piecewise({p:?})"),
            Multiplier::BochnerRiesz { t, delta } => write!(f, "BochnerRiesz {{ t: {t}, delta: {delta} }}"),
            Multiplier::Bump { center, radius } => write!(f, "Bump {{ center: {center}, radius: {radius} }}"),
            Multiplier::Dilated { inner, scale } => write!(f, "Dilated({inner:?}, {scale})"),
            Multiplier::Custom { name, resolution, .. } => write!(f, "Custom({name}, {resolution})"),
        }
    }
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

impl Multiplier {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Multiplier::Indicator {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn half_open(lo: f64, hi: f64) -> Self {
        Multiplier::Indicator {
            lo,
            hi,
            lo_closed: true,
            hi_closed: false,
        }
    }

    /// `lambda` on `[0, 1]`.
    pub fn ramp() -> Self {
        Multiplier::Piecewise(vec![PolyPiece {
            lo: 0.0,
            hi: 1.0,
            coeffs: vec![0.0, 1.0],
        }])
    }

    /// `F(lambda / scale)`.
    pub fn dilate(self, scale: f64) -> Self {
        Multiplier::Dilated {
            inner: Box::new(self),
            scale,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Multiplier::Zero => 0.0,
            Multiplier::Constant(c) => *c,
            Multiplier::Indicator {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => {
                let above = if *lo_closed { x >= *lo } else { x > *lo };
                let below = if *hi_closed { x <= *hi } else { x < *hi };
                if above && below {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::Piecewise(pieces) => {
                let last = pieces.len().saturating_sub(1);
                pieces
                    .iter()
                    .enumerate()
                    .find(|(k, p)| x >= p.lo && (x < p.hi || (*k == last && x == p.hi)))
                    .map_or(0.0, |(_, p)| p.eval(x))
            }
            Multiplier::BochnerRiesz { t, delta } => {
                let b = 1.0 - t * x * x;
                if b > 0.0 {
                    b.powf(*delta)
                } else {
                    0.0
                }
            }
            Multiplier::Bump { center, radius } => bump((x - center) / radius),
            Multiplier::Dilated { inner, scale } => inner.eval(x / scale),
            Multiplier::Custom { f, .. } => f(x),
        }
    }

    /// `sup |F|` over the closed interval `[a, b]`.
    pub fn sup_abs(&self, a: f64, b: f64) -> f64 {
        match self {
            Multiplier::Zero => 0.0,
            Multiplier::Constant(c) => c.abs(),
            Multiplier::Indicator { lo, hi, .. } => {
                let l = a.max(*lo);
                let h = b.min(*hi);
                let hit = l < h || (l == h && self.eval(l) != 0.0);
                if hit {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::Piecewise(pieces) => {
                let last = pieces.len().saturating_sub(1);
                let mut best: f64 = 0.0;
                for (k, p) in pieces.iter().enumerate() {
                    let l = a.max(p.lo);
                    let h = b.min(p.hi);
                    // a single shared point counts only if the piece owns it
                    if l < h || (l == h && (l < p.hi || k == last) && l >= p.lo) {
                        best = best.max(poly_sup_abs(&p.coeffs, l, h));
                    }
                }
                best
            }
            Multiplier::BochnerRiesz { .. } => {
                // decreasing in |lambda|
                let m = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
                self.eval(m)
            }
            Multiplier::Bump { center, .. } => {
                let m = center.clamp(a, b);
                self.eval(m)
            }
            Multiplier::Dilated { inner, scale } => {
                let (x, y) = (a / scale, b / scale);
                inner.sup_abs(x.min(y), x.max(y))
            }
            Multiplier::Custom { f, resolution, .. } => {
                let k = (*resolution).max(2);
                (0..k)
                    .map(|s| f(a + (b - a) * s as f64 / (k - 1) as f64).abs())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// `||F||_{N,2}` with closed cells `[(i-1)/N, i/N]`.
///
/// A jump at a cell boundary therefore counts in both neighbouring cells:
/// the closed indicator of `[0, 1/N]` gives `(2/N)^{1/2}`, while the
/// half-open `[0, 1/N)` gives `N^{-1/2}`.
pub fn n_norm(f: &Multiplier, big_n: usize) -> f64 {
    if big_n == 0 {
        return 0.0;
    }
    let nn = big_n as f64;
    let total: f64 = (1..=big_n)
        .map(|i| f.sup_abs((i - 1) as f64 / nn, i as f64 / nn).powi(2))
        .sum();
    (total / nn).sqrt()
}

/// `K_{F(sqrt(box_b))} = sum F(lambda) K_idx` over components with
/// `0 < lambda <= cap`.
///
/// When `j` is `0` or `n - 1` the Laplacian has an infinite-dimensional
/// kernel, so `F(0)` must vanish there.
pub fn multiplier_kernel(f: &Multiplier, n: usize, j: usize, cap: usize) -> Result<KernelPolynomial<Complex64>> {
    check_nj(n, j)?;
    if (j == 0 || j == n - 1) && f.eval(0.0) != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "F(0) = {} must vanish when j = {j} and n = {n}",
            f.eval(0.0)
        )));
    }
    let mut k = KernelPolynomial::new(n, j)?;
    let cap2 = (cap as u64) * (cap as u64);
    for idx in indices_with_eigenvalue_sq(n, j, 1, cap2)? {
        let lambda = (idx.eigenvalue_sq() as f64).sqrt();
        k.insert(idx, Complex64::new(f.eval(lambda), 0.0))?;
    }
    Ok(k)
}

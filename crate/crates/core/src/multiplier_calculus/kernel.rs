//! Reproducing kernels of the components and kernel polynomials.
//!
//! For a fixed base point `w` the kernel `K(., w)` is stored as one form
//! `kappa_B` per wedge `zeta_B(w)`, with
//! `K(z, w) v = sum_B <v, zeta_B(w)> kappa_B(z)`. This gives exact
//! Hilbert-Schmidt integrals through the L2 pairing of forms.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coefficients::epsilon;
use crate::cr_forms::{self, j_subsets, multiply_coordinate, PolyForm, Wedge};
use crate::error::{Error, Result};
use crate::exact::{to_f64, CRational, Rational};
use crate::linalg::{self, Matrix};
use crate::rep_engine::{component_space, ComponentSpace};
use crate::spectrum::{check_nj, dimension, FormIndex};
use crate::sphere_geometry::{surface_measure, ExactScalar, Exponents, SpherePoint};
use crate::MAX_N;

/// Scalars allowed as kernel-polynomial coefficients.
pub trait Coefficient: Clone + Send + Sync + std::fmt::Debug {
    fn to_c64(&self) -> Complex64;
    fn is_zero_coeff(&self) -> bool;
}

impl Coefficient for CRational {
    fn to_c64(&self) -> Complex64 {
        self.to_complex64()
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
}

impl Coefficient for Complex64 {
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero_coeff(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
}

/// `K = sum c_idx K_idx` with finitely many nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPolynomial<C: Coefficient = Complex64> {
    n: usize,
    j: usize,
    coeffs: BTreeMap<FormIndex, C>,
}

impl<C: Coefficient> KernelPolynomial<C> {
    pub fn new(n: usize, j: usize) -> Result<Self> {
        check_nj(n, j)?;
        Ok(Self {
            n,
            j,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn coeffs(&self) -> &BTreeMap<FormIndex, C> {
        &self.coeffs
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sets a coefficient; zero removes the component.
    pub fn insert(&mut self, idx: FormIndex, c: C) -> Result<()> {
        if idx.n() != self.n || idx.j() != self.j {
            return Err(Error::Mismatch(format!(
                "{idx} in a kernel polynomial with n = {}, j = {}",
                self.n, self.j
            )));
        }
        if c.is_zero_coeff() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
        Ok(())
    }

    /// The same coefficients as exact rationals (every finite float is one).
    pub fn to_exact(&self) -> Result<KernelPolynomial<CRational>> {
        let conv = |x: f64| {
            Rational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("coefficient {x} is not finite")))
        };
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            let z = c.to_c64();
            coeffs.insert(*k, CRational::new(conv(z.re)?, conv(z.im)?));
        }
        Ok(KernelPolynomial {
            n: self.n,
            j: self.j,
            coeffs,
        })
    }

    pub fn to_float(&self) -> KernelPolynomial<Complex64> {
        KernelPolynomial {
            n: self.n,
            j: self.j,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.to_c64())).collect(),
        }
    }
}

/// `1 - epsilon` on the diagonal, the factor behind `M`.
pub fn one_minus_epsilon(idx: &FormIndex) -> Rational {
    Rational::one() - epsilon(idx, idx)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 1]")));
    }
    Ok(())
}

/// `M^theta K`: each coefficient scaled by `(1 - epsilon)^{theta/2}`.
pub fn m_theta<C: Coefficient>(k: &KernelPolynomial<C>, theta: f64) -> Result<KernelPolynomial<Complex64>> {
    check_theta(theta)?;
    let mut out = KernelPolynomial::new(k.n, k.j)?;
    for (idx, c) in &k.coeffs {
        let s = to_f64(&one_minus_epsilon(idx)).powf(theta / 2.0);
        out.insert(*idx, c.to_c64() * s)?;
    }
    Ok(out)
}

/// `|| |M^theta K(., w)|_HS ||_2^2 = sigma^{-1} sum (1 - eps)^theta |c|^2 dim`,
/// which does not depend on `w`.
pub fn m_theta_norm_sq<C: Coefficient>(k: &KernelPolynomial<C>, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let sigma = surface_measure(k.n).to_f64();
    let total: f64 = k
        .coeffs
        .iter()
        .map(|(idx, c)| {
            let d = dimension(idx).to_f64().unwrap_or(f64::INFINITY);
            to_f64(&one_minus_epsilon(idx)).powf(theta) * c.to_c64().norm_sqr() * d
        })
        .sum();
    Ok(total / sigma)
}

/// The exact value of [`m_theta_norm_sq`] at `theta` in `{0, 1}`.
pub fn m_theta_norm_sq_exact(k: &KernelPolynomial<CRational>, theta: u8) -> Result<ExactScalar> {
    if theta > 1 {
        return Err(Error::InvalidArgument("exact theta must be 0 or 1".into()));
    }
    let mut total = Rational::zero();
    for (idx, c) in &k.coeffs {
        let mut t = c.norm_sqr() * Rational::from_integer(dimension(idx).into());
        if theta == 1 {
            t *= one_minus_epsilon(idx);
        }
        total += t;
    }
    Ok(&ExactScalar::rational(total, 0) / &surface_measure(k.n))
}

/// Component spaces built on demand and shared between threads.
#[derive(Default)]
pub struct ComponentCache {
    spaces: Mutex<HashMap<FormIndex, Arc<ComponentSpace>>>,
}

impl ComponentCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, idx: &FormIndex) -> Result<Arc<ComponentSpace>> {
        if let Some(s) = self.spaces.lock().expect("cache lock").get(idx) {
            return Ok(s.clone());
        }
        let built = Arc::new(component_space(idx)?);
        let mut guard = self.spaces.lock().expect("cache lock");
        Ok(guard.entry(*idx).or_insert(built).clone())
    }
}

/// `K(., w)` as the forms `kappa_B`, with exact coefficients times `pi^pi_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSection {
    pub n: usize,
    pub j: usize,
    pub w: SpherePoint,
    pub columns: Vec<PolyForm>,
    pub pi_power: i32,
}

fn wedge_position(n: usize, j: usize) -> HashMap<Wedge, usize> {
    j_subsets(n, j).into_iter().enumerate().map(|(i, c)| (c, i)).collect()
}

/// The section of one reproducing kernel at `w`.
pub fn component_section(space: &ComponentSpace, w: &SpherePoint) -> Result<KernelSection> {
    let (n, j) = (space.idx.n(), space.idx.j());
    if w.n() != n {
        return Err(Error::Mismatch(format!("point in C^{} for n = {n}", w.n())));
    }
    let pos = wedge_position(n, j);
    let width = pos.len();
    let mut columns = vec![PolyForm::zero(n, j); width];
    let parts: Vec<Vec<PolyForm>> = space
        .blocks
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|block| {
            // b_B[k] = conj(a_{kB}(w)), y_B = G^{-1} b_B
            let mut rhs = vec![vec![CRational::zero(); block.forms.len()]; width];
            for (k, f) in block.forms.iter().enumerate() {
                for (c, v) in f.evaluate(w) {
                    rhs[pos[&c]][k] = v.conj();
                }
            }
            let ys = linalg::solve_many(&block.gram, &rhs)?;
            Ok(ys
                .iter()
                .map(|y| PolyForm::combination(n, j, &block.forms, y))
                .collect())
        })
        .collect::<Result<_>>()?;
    for part in parts {
        for (col, f) in columns.iter_mut().zip(part) {
            *col = col.add(&f);
        }
    }
    Ok(KernelSection {
        n,
        j,
        w: w.clone(),
        columns,
        pi_power: -(n as i32),
    })
}

impl KernelSection {
    pub fn zero(n: usize, j: usize, w: &SpherePoint) -> Self {
        let width = j_subsets(n, j).len();
        Self {
            n,
            j,
            w: w.clone(),
            columns: vec![PolyForm::zero(n, j); width],
            pi_power: -(n as i32),
        }
    }

    /// `self + c * other` for sections at the same point.
    pub fn add_scaled(&self, other: &KernelSection, c: &CRational) -> KernelSection {
        assert_eq!(self.w, other.w);
        assert_eq!(self.pi_power, other.pi_power);
        KernelSection {
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| a.add(&b.scale(c)))
                .collect(),
            ..self.clone()
        }
    }

    /// Multiplication by `<z, w>` (or its conjugate).
    pub fn multiply_pairing(&self, conjugate: bool) -> KernelSection {
        let wc = self.w.coords();
        let columns = self
            .columns
            .iter()
            .map(|f| {
                let mut acc = PolyForm::zero(self.n, self.j);
                for (m, x) in wc.iter().enumerate() {
                    let c = if conjugate { x.clone() } else { x.conj() };
                    acc = acc.add(&multiply_coordinate(f, m, conjugate).scale(&c));
                }
                acc
            })
            .collect();
        KernelSection {
            columns,
            ..self.clone()
        }
    }

    /// `int |K(z, w)|_HS^2 dsigma(z)`.
    pub fn hs_integral(&self) -> ExactScalar {
        let gw = cr_forms::wedge_gram(&self.w, self.j);
        let m = self.columns.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|b| (0..m).map(move |c| (b, c))).collect();
        let total = pairs
            .par_iter()
            .filter(|&&(b, c)| !gw[c][b].is_zero())
            .map(|&(b, c)| {
                let v = cr_forms::l2_inner(&self.columns[b], &self.columns[c]).expect("same degree");
                &v.value * &gw[c][b]
            })
            .reduce(CRational::zero, |a, b| a + b);
        ExactScalar::new(total, self.n as i32 + 2 * self.pi_power)
    }

    /// `int (1 - |<z, w>|^2) |K(z, w)|_HS^2 dsigma(z)`, the squared weighted norm at `theta = 1`.
    pub fn weighted_integral(&self) -> ExactScalar {
        &self.hs_integral() - &self.multiply_pairing(false).hs_integral()
    }

    /// The kernel at `z` as an exact homomorphism between fibres.
    pub fn at(&self, z: &SpherePoint) -> HomMatrix {
        let pos = wedge_position(self.n, self.j);
        let width = pos.len();
        let mut entries = vec![vec![CRational::zero(); width]; width];
        for (b, col) in self.columns.iter().enumerate() {
            for (c, v) in col.evaluate(z) {
                entries[pos[&c]][b] = v;
            }
        }
        HomMatrix {
            n: self.n,
            j: self.j,
            entries,
            pi_power: self.pi_power,
            gram_z: cr_forms::wedge_gram(z, self.j),
            gram_w: cr_forms::wedge_gram(&self.w, self.j),
        }
    }
}

/// Section of a kernel polynomial with exact coefficients.
pub fn kernel_section(
    k: &KernelPolynomial<CRational>,
    w: &SpherePoint,
    cache: &ComponentCache,
) -> Result<KernelSection> {
    let parts: Vec<(KernelSection, CRational)> = k
        .coeffs
        .par_iter()
        .map(|(idx, c)| Ok((component_section(&*cache.get(idx)?, w)?, c.clone())))
        .collect::<Result<_>>()?;
    let mut out = KernelSection::zero(k.n, k.j, w);
    for (s, c) in parts {
        out = out.add_scaled(&s, &c);
    }
    Ok(out)
}

/// `K(z, w)` for one component.
pub fn reproducing_kernel(space: &ComponentSpace, z: &SpherePoint, w: &SpherePoint) -> Result<HomMatrix> {
    Ok(component_section(space, w)?.at(z))
}

/// A homomorphism from the fibre at `w` to the fibre at `z`, written in the
/// spanning wedges: it sends `v` to
/// `sum_{A,B} entries[A][B] <v, zeta_B(w)> zeta_A(z)`, all entries times `pi^pi_power`.
/// The wedge Gram matrices may be singular; all norms account for that.
#[derive(Clone, Debug, PartialEq)]
pub struct HomMatrix {
    pub n: usize,
    pub j: usize,
    pub entries: Matrix,
    pub pi_power: i32,
    pub gram_z: Matrix,
    pub gram_w: Matrix,
}

impl HomMatrix {
    /// Exact `|T|_HS^2`.
    pub fn hs_norm_sq(&self) -> ExactScalar {
        let t = &self.entries;
        let m = t.len();
        let mut total = CRational::zero();
        for b in 0..m {
            for b2 in 0..m {
                if self.gram_w[b2][b].is_zero() {
                    continue;
                }
                let mut inner = CRational::zero();
                for a in 0..m {
                    if t[a][b].is_zero() {
                        continue;
                    }
                    for a2 in 0..m {
                        if !t[a2][b2].is_zero() && !self.gram_z[a][a2].is_zero() {
                            inner += &(&(&t[a][b] * &t[a2][b2].conj()) * &self.gram_z[a][a2]);
                        }
                    }
                }
                total += &(&inner * &self.gram_w[b2][b]);
            }
        }
        ExactScalar::new(total, 2 * self.pi_power)
    }

    pub fn sub(&self, other: &HomMatrix) -> HomMatrix {
        assert_eq!(self.pi_power, other.pi_power);
        HomMatrix {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// The operator as a matrix between orthonormal bases of the fibres.
    pub fn orthonormal_matrix(&self) -> DMatrix<Complex64> {
        let scale = std::f64::consts::PI.powi(self.pi_power);
        let t = to_dmatrix(&self.entries) * Complex64::new(scale, 0.0);
        let az = frame(&to_dmatrix(&self.gram_z));
        let aw = frame(&to_dmatrix(&self.gram_w));
        az * t * aw.adjoint()
    }

    pub fn op_norm(&self) -> f64 {
        let m = self.orthonormal_matrix();
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn hs_norm(&self) -> f64 {
        self.orthonormal_matrix().norm()
    }

    /// Dimension of the fibres.
    pub fn fibre_dim(&self) -> usize {
        linalg::rank(&self.gram_w)
    }
}

pub(crate) fn to_dmatrix(m: &Matrix) -> DMatrix<Complex64> {
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, k| m[i][k].to_complex64())
}

/// For a wedge Gram `Gm` (so `<x, y> = y^* Gm^T x` on coefficient vectors)
/// returns `Lambda^{1/2} V^*`, which maps coefficient vectors to
/// coordinates in an orthonormal basis of the fibre.
pub(crate) fn frame(gm: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = gm.transpose();
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-9 * top.max(1e-300))
        .collect();
    let m = gm.nrows();
    DMatrix::from_fn(keep.len(), m, |r, c| {
        eig.eigenvectors[(c, keep[r])].conj() * eig.eigenvalues[keep[r]].sqrt()
    })
}

/// Floating-point wedge Gram at `z` over the given wedges.
pub(crate) fn wedge_gram_f64(z: &[Complex64], j: usize, wedges: &[Wedge]) -> DMatrix<Complex64> {
    let n = z.len();
    let m = wedges.len();
    DMatrix::from_fn(m, m, |a, b| {
        let mut v = Complex64::new(0.0, 0.0);
        for (g, x, y) in cr_forms::wedge_gram_terms(wedges[a], wedges[b], j, n) {
            let mut t = Complex64::new(g as f64, 0.0);
            if x < n {
                t *= z[x].conj();
            }
            if y < n {
                t *= z[y];
            }
            v += t;
        }
        v
    })
}

/// Compiled floating-point evaluation of several sections at one base
/// point, sharing monomial evaluations between them.
pub struct SectionEvaluator {
    n: usize,
    j: usize,
    w: Vec<Complex64>,
    wedges: Vec<Wedge>,
    groups: usize,
    max_deg: usize,
    monomials: Vec<(Exponents, Exponents)>,
    /// Per monomial: (group, flat entry index A * width + B, coefficient).
    contrib: Vec<Vec<(usize, usize, Complex64)>>,
    gram_w: DMatrix<Complex64>,
    analysis_w: DMatrix<Complex64>,
}

/// Per-sample values: one `width x width` matrix per group.
pub struct Evaluation {
    pub z: Vec<Complex64>,
    pub groups: Vec<DMatrix<Complex64>>,
    pub gram_z: DMatrix<Complex64>,
}

impl SectionEvaluator {
    pub fn new(sections: &[KernelSection]) -> Result<Self> {
        let first = sections
            .first()
            .ok_or_else(|| Error::InvalidArgument("no sections to evaluate".into()))?;
        let (n, j) = (first.n, first.j);
        let wedges = j_subsets(n, j);
        let pos = wedge_position(n, j);
        let width = wedges.len();
        let mut index: HashMap<(Exponents, Exponents), usize> = HashMap::new();
        let mut monomials = Vec::new();
        let mut contrib: Vec<Vec<(usize, usize, Complex64)>> = Vec::new();
        let mut max_deg = 0usize;
        for (g, s) in sections.iter().enumerate() {
            if s.w != first.w || s.n != n || s.j != j {
                return Err(Error::Mismatch("sections at different points".into()));
            }
            let scale = std::f64::consts::PI.powi(s.pi_power);
            for (b, col) in s.columns.iter().enumerate() {
                for (k, c) in col.terms() {
                    let key = (k.a, k.b);
                    let id = *index.entry(key).or_insert_with(|| {
                        monomials.push(key);
                        contrib.push(Vec::new());
                        monomials.len() - 1
                    });
                    for m in 0..MAX_N {
                        max_deg = max_deg.max(k.a[m] as usize).max(k.b[m] as usize);
                    }
                    contrib[id].push((g, pos[&k.c] * width + b, c.to_complex64() * scale));
                }
            }
        }
        let w = first.w.to_float();
        let gram_w = wedge_gram_f64(&w, j, &wedges);
        let analysis_w = frame(&gram_w);
        Ok(Self {
            n,
            j,
            w,
            wedges,
            groups: sections.len(),
            max_deg,
            monomials,
            contrib,
            gram_w,
            analysis_w,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn base_point(&self) -> &[Complex64] {
        &self.w
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Evaluation {
        let n = self.n;
        let width = self.wedges.len();
        let mut pz = vec![vec![Complex64::new(1.0, 0.0); self.max_deg + 1]; n];
        let mut pzb = pz.clone();
        for m in 0..n {
            for e in 1..=self.max_deg {
                pz[m][e] = pz[m][e - 1] * z[m];
                pzb[m][e] = pzb[m][e - 1] * z[m].conj();
            }
        }
        let mut groups = vec![DMatrix::zeros(width, width); self.groups];
        for ((a, b), list) in self.monomials.iter().zip(&self.contrib) {
            let mut v = Complex64::new(1.0, 0.0);
            for m in 0..n {
                if a[m] > 0 {
                    v *= pz[m][a[m] as usize];
                }
                if b[m] > 0 {
                    v *= pzb[m][b[m] as usize];
                }
            }
            for &(g, flat, c) in list {
                groups[g][(flat / width, flat % width)] += v * c;
            }
        }
        Evaluation {
            z: z.to_vec(),
            groups,
            gram_z: wedge_gram_f64(z, self.j, &self.wedges),
        }
    }

    /// `T = sum_g c_g K_g(z, w)` in wedge coordinates.
    pub fn combine(&self, e: &Evaluation, coeffs: &[Complex64]) -> DMatrix<Complex64> {
        let width = self.wedges.len();
        let mut t = DMatrix::zeros(width, width);
        for (g, c) in coeffs.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                t += &e.groups[g] * *c;
            }
        }
        t
    }

    /// `S = T^* H_z T` with `H_z = Gm_z^T`, so that `S[B'][B] = <T zeta_B, T zeta_B'>`.
    fn pullback(&self, e: &Evaluation, t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        t.adjoint() * e.gram_z.transpose() * t
    }

    pub fn hs_sq(&self, e: &Evaluation, t: &DMatrix<Complex64>) -> f64 {
        let s = self.pullback(e, t);
        let m = s.nrows();
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..m {
            for b2 in 0..m {
                acc += s[(b, b2)] * self.gram_w[(b, b2)];
            }
        }
        acc.re.max(0.0)
    }

    pub fn op_norm(&self, e: &Evaluation, t: &DMatrix<Complex64>) -> f64 {
        let s = self.pullback(e, t);
        let m = &self.analysis_w * s * self.analysis_w.adjoint();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        m.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
    }

    /// `1 - |<z, w>|^2`, the square of the weight.
    pub fn weight_sq(&self, z: &[Complex64]) -> f64 {
        let u: Complex64 = z.iter().zip(&self.w).map(|(a, b)| a * b.conj()).sum();
        (1.0 - u.norm_sqr()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{coeff, support, Direction};
    use crate::exact::rat;
    use crate::rep_engine::component_space;
    use crate::spectrum::indices_in_box;
    use crate::sphere_geometry::{rational_sphere_points, sample_sphere};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi(n: usize, j: usize, p: i64, q: i64) -> FormIndex {
        FormIndex::phi(n, j, p, q).unwrap()
    }

    #[test]
    fn hs_integral_of_single_components() {
        let cache = ComponentCache::new();
        let points = rational_sphere_points(3, 3, 1);
        for idx in indices_in_box(3, 1, 2, 2).unwrap() {
            let space = cache.get(&idx).unwrap();
            for w in &points {
                let s = component_section(&space, w).unwrap();
                let expect = &ExactScalar::rational(Rational::from_integer(dimension(&idx).into()), 0)
                    / &surface_measure(3);
                assert_eq!(s.hs_integral(), expect, "{idx}");
            }
        }
        let s = component_section(&cache.get(&phi(3, 1, 0, 1)).unwrap(), &points[1]).unwrap();
        assert_eq!(s.hs_integral(), ExactScalar::rational(rat(3, 1), -3));
        assert_eq!(s.weighted_integral(), ExactScalar::rational(rat(15, 8), -3));
    }

    #[test]
    fn distinct_components_are_orthogonal() {
        let cache = ComponentCache::new();
        let w = &rational_sphere_points(3, 2, 5)[1];
        let a = component_section(&cache.get(&phi(3, 1, 0, 1)).unwrap(), w).unwrap();
        let b = component_section(&cache.get(&FormIndex::psi(3, 1, 0, 1).unwrap()).unwrap(), w).unwrap();
        let sum = a.add_scaled(&b, &CRational::one());
        assert_eq!(sum.hs_integral(), &a.hs_integral() + &b.hs_integral());
    }

    #[test]
    fn reproducing_property() {
        // <<f, kappa_B>> is the zeta_B(w) coefficient of f(w)
        let idx = phi(3, 1, 1, 1);
        let space = component_space(&idx).unwrap();
        let w = &rational_sphere_points(3, 2, 9)[1];
        let s = component_section(&space, w).unwrap();
        let f = crate::rep_engine::random_element(&space, 3);
        let fw = f.evaluate(w);
        let wedges = j_subsets(3, 1);
        for (b, col) in s.columns.iter().enumerate() {
            let lhs = cr_forms::l2_inner(&f, col).unwrap();
            assert_eq!(lhs.pi_power + s.pi_power, 0);
            assert_eq!(lhs.value, fw.get(&wedges[b]).cloned().unwrap_or_else(CRational::zero));
        }
    }

    #[test]
    fn pointwise_multiplication_identity() {
        let cache = ComponentCache::new();
        let pts = rational_sphere_points(3, 4, 2);
        let src = phi(3, 1, 0, 1);
        for dir in [Direction::Z, Direction::ZBar] {
            let w = &pts[2];
            let base = component_section(&cache.get(&src).unwrap(), w).unwrap();
            let lhs = base.multiply_pairing(dir == Direction::ZBar);
            let mut rhs = KernelSection::zero(3, 1, w);
            for dst in support(dir, &src) {
                let s = component_section(&cache.get(&dst).unwrap(), w).unwrap();
                rhs = rhs.add_scaled(&s, &CRational::real(coeff(dir, &src, &dst)));
            }
            for z in &pts {
                assert!(lhs.at(z).sub(&rhs.at(z)).hs_norm_sq().is_zero());
            }
        }
    }

    #[test]
    fn hom_matrix_norms() {
        let cache = ComponentCache::new();
        let pts = rational_sphere_points(3, 4, 6);
        let s = component_section(&cache.get(&phi(3, 1, 1, 1)).unwrap(), &pts[1]).unwrap();
        for z in &pts {
            let h = s.at(z);
            let hs = h.hs_norm();
            let op = h.op_norm();
            assert!((hs * hs - h.hs_norm_sq().to_f64()).abs() < 1e-9 * (1.0 + hs * hs));
            assert!(op <= hs + 1e-12);
            assert!(hs <= (h.fibre_dim() as f64).sqrt() * op + 1e-12);
        }
        // the float evaluator agrees with exact evaluation
        let ev = SectionEvaluator::new(std::slice::from_ref(&s)).unwrap();
        for z in &pts {
            let e = ev.evaluate(&z.to_float());
            let t = ev.combine(&e, &[Complex64::new(1.0, 0.0)]);
            let h = s.at(z);
            assert!((ev.hs_sq(&e, &t) - h.hs_norm_sq().to_f64()).abs() < 1e-9);
            assert!((ev.op_norm(&e, &t) - h.op_norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn random_hom_matrix_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z = sample_sphere(&mut rng, 4);
            let w = sample_sphere(&mut rng, 4);
            let wedges = j_subsets(4, 2);
            let gz = wedge_gram_f64(&z, 2, &wedges);
            let gw = wedge_gram_f64(&w, 2, &wedges);
            let az = frame(&gz);
            let aw = frame(&gw);
            assert_eq!(az.nrows(), 3);
            let t = DMatrix::from_fn(6, 6, |_, _| Complex64::new(rng.random(), rng.random()));
            let m = az * t * aw.adjoint();
            let sv = m.singular_values();
            let op = sv.iter().cloned().fold(0.0, f64::max);
            let hs = m.norm();
            assert!(op <= hs + 1e-12 && hs <= 3f64.sqrt() * op + 1e-12);
        }
    }

    #[test]
    fn m_theta_examples() {
        let mut k: KernelPolynomial<CRational> = KernelPolynomial::new(3, 1).unwrap();
        k.insert(phi(3, 1, 0, 1), CRational::one()).unwrap();
        let m0 = m_theta(&k, 0.0).unwrap();
        assert_eq!(m0, k.to_float());
        let m1 = m_theta(&k, 1.0).unwrap();
        let c = m1.coeffs()[&phi(3, 1, 0, 1)];
        assert!((c.re - (5.0f64 / 8.0).sqrt()).abs() < 1e-15);
        let mm = m_theta(&m1, 1.0).unwrap();
        assert!((mm.coeffs()[&phi(3, 1, 0, 1)].re - 5.0 / 8.0).abs() < 1e-15);
        assert!(m_theta(&k, 1.5).is_err());
        assert_eq!(m_theta_norm_sq_exact(&k, 1).unwrap(), ExactScalar::rational(rat(15, 8), -3));
        let f = m_theta_norm_sq(&k, 1.0).unwrap();
        assert!((f - 15.0 / 8.0 / std::f64::consts::PI.powi(3)).abs() < 1e-14);
    }
}

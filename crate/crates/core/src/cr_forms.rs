//! Polynomial (0,j)-forms on the sphere over the spanning family of
//! wedges of `zeta_c = dbar_b conj(z_c)`, with exact L2 pairings and the
//! operators `dbar_b`, its adjoint and the Kohn Laplacian.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, int, rational_string, CRational, Rational};
use crate::linalg::{self, Matrix};
use crate::spectrum::{check_nj, FormIndex, Kind};
use crate::sphere_geometry::{
    exponents, monomial_integral_coeff, total_degree, ExactScalar, Exponents, SpherePoint,
};
use crate::MAX_N;

/// Bit mask of a wedge index set; bit `m` stands for `zeta_{m+1}`.
pub type Wedge = u16;

/// Torus weight: `-a + b + 1_C`.
pub type Weight = [i32; MAX_N];

pub fn wedge_from_indices(c: &[usize]) -> Wedge {
    c.iter().fold(0, |acc, &i| {
        assert!((1..=MAX_N).contains(&i), "wedge index {i} out of range");
        acc | (1 << (i - 1))
    })
}

/// One-based indices of a wedge, increasing.
pub fn wedge_indices(c: Wedge) -> Vec<usize> {
    (0..MAX_N).filter(|&m| c & (1 << m) != 0).map(|m| m + 1).collect()
}

/// `zeta_m wedge zeta_C = sign * zeta_{C + m}` for zero-based `m`.
pub fn wedge_insert(m: usize, c: Wedge) -> Option<(i32, Wedge)> {
    if c & (1 << m) != 0 {
        return None;
    }
    let below = (c & ((1u16 << m) - 1)).count_ones();
    Some((if below.is_multiple_of(2) { 1 } else { -1 }, c | (1 << m)))
}

/// All `j`-subsets of `{1..n}` as masks, in lexicographic order of their index lists.
pub fn j_subsets(n: usize, j: usize) -> Vec<Wedge> {
    fn rec(start: usize, n: usize, left: usize, cur: Wedge, out: &mut Vec<Wedge>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for m in start..n {
            rec(m + 1, n, left - 1, cur | (1 << m), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, j, 0, &mut out);
    out
}

/// Exponent vectors in `n` variables of total degree `d`.
pub fn compositions(n: usize, d: u32) -> Vec<Exponents> {
    fn rec(i: usize, n: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == n - 1 {
            cur[i] = left as u16;
            out.push(*cur);
            return;
        }
        for x in (0..=left).rev() {
            cur[i] = x as u16;
            rec(i + 1, n, left - x, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = [0u16; MAX_N];
    rec(0, n, d, &mut cur, &mut out);
    out
}

/// Coefficient monomial `z^a conj(z)^b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub a: Exponents,
    pub b: Exponents,
}

/// A term label: `z^a conj(z)^b zeta_C`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormKey {
    pub a: Exponents,
    pub b: Exponents,
    pub c: Wedge,
}

impl FormKey {
    pub fn weight(&self) -> Weight {
        let mut w = [0i32; MAX_N];
        for (m, slot) in w.iter_mut().enumerate() {
            *slot = self.b[m] as i32 - self.a[m] as i32 + ((self.c >> m) & 1) as i32;
        }
        w
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (total_degree(&self.a), total_degree(&self.b))
    }

    pub fn monomial(&self) -> Monomial {
        Monomial {
            a: self.a,
            b: self.b,
        }
    }
}

/// A (0,j)-form with Gaussian-rational polynomial coefficients.
///
/// The representation is not unique, because `sum_c z_c zeta_c = 0`;
/// equality of forms means that the difference has zero L2 norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    j: usize,
    terms: BTreeMap<FormKey, CRational>,
}

impl PolyForm {
    pub fn zero(n: usize, j: usize) -> Self {
        check_nj(n, j).expect("valid (n, j)");
        Self {
            n,
            j,
            terms: BTreeMap::new(),
        }
    }

    /// Single term `coeff * z^a conj(z)^b zeta_C` with one-based wedge indices.
    pub fn monomial(n: usize, a: &[u16], b: &[u16], c: &[usize], coeff: CRational) -> Self {
        assert!(a.len() == n && b.len() == n);
        let mut f = Self::zero(n, c.len());
        f.add_term(
            FormKey {
                a: exponents(a),
                b: exponents(b),
                c: wedge_from_indices(c),
            },
            coeff,
        );
        f
    }

    /// The one-form `zeta_c` (one-based `c`).
    pub fn zeta(n: usize, c: usize) -> Self {
        Self::monomial(n, &vec![0; n], &vec![0; n], &[c], CRational::one())
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn terms(&self) -> &BTreeMap<FormKey, CRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: FormKey, coeff: CRational) {
        debug_assert_eq!(key.c.count_ones() as usize, self.j);
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        self.check_same(other).expect("matching (n, j)");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&CRational::from_int(-1)))
    }

    pub fn scale(&self, s: &CRational) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.j);
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, c)| (*k, c * s)).collect();
        out
    }

    /// `sum_k coeffs[k] * forms[k]`.
    pub fn combination(n: usize, j: usize, forms: &[PolyForm], coeffs: &[CRational]) -> PolyForm {
        let mut acc: BTreeMap<FormKey, CRational> = BTreeMap::new();
        for (f, x) in forms.iter().zip(coeffs) {
            if x.is_zero() {
                continue;
            }
            for (k, c) in &f.terms {
                *acc.entry(*k).or_default() += &(c * x);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PolyForm { n, j, terms: acc }
    }

    /// Distinct bidegrees of the terms.
    pub fn bidegrees(&self) -> BTreeSet<(u32, u32)> {
        self.terms.keys().map(|k| k.bidegree()).collect()
    }

    fn check_same(&self, other: &PolyForm) -> Result<()> {
        if self.n != other.n || self.j != other.j {
            return Err(Error::Mismatch(format!(
                "(n, j) = ({}, {}) vs ({}, {})",
                self.n, self.j, other.n, other.j
            )));
        }
        Ok(())
    }

    fn groups(&self) -> HashMap<Weight, Vec<(&FormKey, &CRational)>> {
        let mut g: HashMap<Weight, Vec<(&FormKey, &CRational)>> = HashMap::new();
        for (k, c) in &self.terms {
            g.entry(k.weight()).or_default().push((k, c));
        }
        g
    }

    /// Coefficients in the wedge frame at an exact point: mask -> value.
    pub fn evaluate(&self, z: &SpherePoint) -> BTreeMap<Wedge, CRational> {
        assert_eq!(z.n(), self.n);
        let powers = PowerTable::new(z.coords(), self.max_degree());
        let mut out: BTreeMap<Wedge, CRational> = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = powers.monomial(&k.a, &k.b);
            if !v.is_zero() {
                *out.entry(k.c).or_default() += &(&v * c);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.a.iter().chain(k.b.iter()))
            .copied()
            .max()
            .unwrap_or(0) as usize
    }
}

/// Cached powers `z_m^e` and `conj(z_m)^e` at one exact point.
pub(crate) struct PowerTable {
    pos: Vec<Vec<CRational>>,
    neg: Vec<Vec<CRational>>,
}

impl PowerTable {
    pub(crate) fn new(z: &[CRational], deg: usize) -> Self {
        let build = |x: &CRational| {
            let mut v = vec![CRational::one()];
            for e in 1..=deg {
                let next = &v[e - 1] * x;
                v.push(next);
            }
            v
        };
        Self {
            pos: z.iter().map(build).collect(),
            neg: z.iter().map(|x| build(&x.conj())).collect(),
        }
    }

    pub(crate) fn monomial(&self, a: &Exponents, b: &Exponents) -> CRational {
        let mut acc = CRational::one();
        for m in 0..self.pos.len() {
            if a[m] > 0 {
                acc = &acc * &self.pos[m][a[m] as usize];
            }
            if b[m] > 0 {
                acc = &acc * &self.neg[m][b[m] as usize];
            }
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for m in 0..self.n {
                match k.a[m] {
                    0 => {}
                    1 => write!(f, "*z{}", m + 1)?,
                    e => write!(f, "*z{}^{}", m + 1, e)?,
                }
                match k.b[m] {
                    0 => {}
                    1 => write!(f, "*zb{}", m + 1)?,
                    e => write!(f, "*zb{}^{}", m + 1, e)?,
                }
            }
            let idx = wedge_indices(k.c);
            if !idx.is_empty() {
                let parts: Vec<String> = idx.iter().map(|i| format!("zeta{i}")).collect();
                write!(f, "*{}", parts.join("^"))?;
            }
        }
        Ok(())
    }
}

struct TermJson<'a> {
    n: usize,
    key: &'a FormKey,
    coeff: &'a CRational,
}

impl Serialize for TermJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("a", &self.key.a[..self.n])?;
        m.serialize_entry("b", &self.key.b[..self.n])?;
        m.serialize_entry("c", &wedge_indices(self.key.c))?;
        m.serialize_entry("re", &rational_string(&self.coeff.re))?;
        m.serialize_entry("im", &rational_string(&self.coeff.im))?;
        m.end()
    }
}

/// Serialized as a list of `{a, b, c, re, im}` with one-based wedge indices.
impl Serialize for PolyForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (key, coeff) in &self.terms {
            seq.serialize_element(&TermJson {
                n: self.n,
                key,
                coeff,
            })?;
        }
        seq.end()
    }
}

/// `<zeta_a, zeta_b>(z) = 2 (delta_ab - conj(z_a) z_b)`.
pub fn zeta_gram(z: &SpherePoint) -> Matrix {
    let c = z.coords();
    let n = c.len();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut v = -(&c[a].conj() * &c[b]);
                    if a == b {
                        v += &CRational::one();
                    }
                    v.scale(&int(2))
                })
                .collect()
        })
        .collect()
}

/// Pointwise `<zeta_A, zeta_B>` as a sum of `coeff * conj(z)^x z^y` with
/// `x, y` one-hot or empty, returned as `(coeff, x, y)` with `n` meaning empty.
pub(crate) fn wedge_gram_terms(a: Wedge, b: Wedge, j: usize, n: usize) -> Vec<(i64, usize, usize)> {
    let scale = 1i64 << j;
    if a == b {
        let mut out = vec![(scale, n, n)];
        for m in 0..n {
            if a & (1 << m) != 0 {
                out.push((-scale, m, m));
            }
        }
        return out;
    }
    let common = a & b;
    if (common.count_ones() as usize) + 1 != j {
        return Vec::new();
    }
    let x = (a & !common).trailing_zeros() as usize;
    let y = (b & !common).trailing_zeros() as usize;
    let pos_x = (a & ((1u16 << x) - 1)).count_ones();
    let pos_y = (b & ((1u16 << y) - 1)).count_ones();
    let sign = if (pos_x + pos_y).is_multiple_of(2) { -1 } else { 1 };
    vec![(sign * scale, x, y)]
}

/// Pointwise `<zeta_A, zeta_B>(z)` over the `j`-subsets in [`j_subsets`] order.
pub fn wedge_gram(z: &SpherePoint, j: usize) -> Matrix {
    let n = z.n();
    let c = z.coords();
    let subsets = j_subsets(n, j);
    subsets
        .iter()
        .map(|&a| {
            subsets
                .iter()
                .map(|&b| {
                    let mut v = CRational::zero();
                    for (g, x, y) in wedge_gram_terms(a, b, j, n) {
                        let mut t = CRational::from_int(g);
                        if x < n {
                            t = &t * &c[x].conj();
                        }
                        if y < n {
                            t = &t * &c[y];
                        }
                        v += &t;
                    }
                    v
                })
                .collect()
        })
        .collect()
}

/// `<<alpha, beta>> = int <alpha(z), beta(z)> dsigma`, linear in `alpha`.
pub fn l2_inner(alpha: &PolyForm, beta: &PolyForm) -> Result<ExactScalar> {
    alpha.check_same(beta)?;
    let n = alpha.n;
    let j = alpha.j;
    let ga = alpha.groups();
    let gb = beta.groups();
    let pairs: Vec<(&Vec<(&FormKey, &CRational)>, &Vec<(&FormKey, &CRational)>)> = ga
        .iter()
        .filter_map(|(w, xs)| gb.get(w).map(|ys| (xs, ys)))
        .collect();
    let partial: Vec<CRational> = pairs
        .par_iter()
        .map(|(xs, ys)| {
            let mut by_exp: HashMap<Exponents, CRational> = HashMap::new();
            for (ks, cs) in xs.iter() {
                for (kt, ct) in ys.iter() {
                    let terms = wedge_gram_terms(ks.c, kt.c, j, n);
                    if terms.is_empty() {
                        continue;
                    }
                    let prod = *cs * &ct.conj();
                    // z-exponent of f_s conj(f_t): a_s + b_t
                    let mut e = ks.a;
                    for m in 0..n {
                        e[m] += kt.b[m];
                    }
                    for (g, _x, y) in terms {
                        let mut ee = e;
                        if y < n {
                            ee[y] += 1;
                        }
                        let v = prod.scale(&int(g));
                        *by_exp.entry(ee).or_default() += &v;
                    }
                }
            }
            let mut acc = CRational::zero();
            for (e, c) in by_exp {
                if !c.is_zero() {
                    acc += &c.scale(&monomial_integral_coeff(n, &e));
                }
            }
            acc
        })
        .collect();
    let mut total = CRational::zero();
    for p in partial {
        total += &p;
    }
    Ok(ExactScalar::new(total, n as i32))
}

pub fn norm_sq(alpha: &PolyForm) -> ExactScalar {
    l2_inner(alpha, alpha).expect("same form")
}

/// Hermitian Gram matrix `G[k][l] = <<forms[l], forms[k]>>` (rational
/// parts; every entry carries the same power of pi).
pub fn gram(forms: &[PolyForm]) -> Matrix {
    let m = forms.len();
    let idx: Vec<(usize, usize)> = (0..m).flat_map(|k| (k..m).map(move |l| (k, l))).collect();
    let vals: Vec<CRational> = idx
        .par_iter()
        .map(|&(k, l)| l2_inner(&forms[l], &forms[k]).expect("same (n, j)").value)
        .collect();
    let mut g = vec![vec![CRational::zero(); m]; m];
    for ((k, l), v) in idx.into_iter().zip(vals) {
        g[l][k] = v.conj();
        g[k][l] = v;
    }
    g
}

/// `dbar_b(f zeta_C) = sum_m (d f / d conj(z_m)) zeta_m wedge zeta_C`.
pub fn dbar_b(alpha: &PolyForm) -> Result<PolyForm> {
    let n = alpha.n;
    if alpha.j + 1 >= n {
        return Err(Error::InvalidArgument(format!(
            "dbar_b is not defined on ({}, {})-forms with n = {n}",
            0, alpha.j
        )));
    }
    let mut out = PolyForm::zero(n, alpha.j + 1);
    for (k, c) in &alpha.terms {
        for m in 0..n {
            if k.b[m] == 0 {
                continue;
            }
            let Some((sign, wedge)) = wedge_insert(m, k.c) else {
                continue;
            };
            let mut b = k.b;
            b[m] -= 1;
            out.add_term(
                FormKey { a: k.a, b, c: wedge },
                c.scale(&int(sign as i64 * k.b[m] as i64)),
            );
        }
    }
    Ok(out)
}

/// Multiplication by `z_m` or `conj(z_m)`, zero-based `m`.
pub fn multiply_coordinate(alpha: &PolyForm, m: usize, conjugate: bool) -> PolyForm {
    assert!(m < alpha.n);
    let mut out = PolyForm::zero(alpha.n, alpha.j);
    for (k, c) in &alpha.terms {
        let mut key = *k;
        if conjugate {
            key.b[m] += 1;
        } else {
            key.a[m] += 1;
        }
        out.add_term(key, c.clone());
    }
    out
}

/// Monomial `(j-1)`-forms whose bidegrees are `(s + level, t + 1 + level)`
/// for each bidegree `(s, t)` of `beta`, with matching torus weight.
pub fn adjoint_family(beta: &PolyForm, level: u32) -> Vec<PolyForm> {
    assert!(beta.j >= 1);
    let n = beta.n;
    let j = beta.j - 1;
    let targets: BTreeSet<(u32, Weight)> = beta
        .terms
        .keys()
        .map(|k| (k.bidegree().0, k.weight()))
        .collect();
    let mut keys: BTreeSet<FormKey> = BTreeSet::new();
    for (s, w) in targets {
        for a in compositions(n, s + level) {
            for c in j_subsets(n, j) {
                let mut b = [0u16; MAX_N];
                let mut ok = true;
                for m in 0..n {
                    let v = w[m] + a[m] as i32 - ((c >> m) & 1) as i32;
                    if v < 0 {
                        ok = false;
                        break;
                    }
                    b[m] = v as u16;
                }
                if ok {
                    keys.insert(FormKey { a, b, c });
                }
            }
        }
    }
    keys.into_iter()
        .map(|k| {
            let mut f = PolyForm::zero(n, j);
            f.add_term(k, CRational::one());
            f
        })
        .collect()
}

/// The adjoint `dbar_b^* beta` within `span(ambient)`, by an exact Gram solve.
///
/// The result is certified on `ambient` together with the next larger
/// monomial family; a nonzero residual means the ambient was too small.
pub fn dbar_b_star(beta: &PolyForm, ambient: &[PolyForm]) -> Result<PolyForm> {
    if beta.j == 0 {
        return Err(Error::InvalidArgument("dbar_b^* is not defined on functions".into()));
    }
    let n = beta.n;
    let j = beta.j - 1;
    if beta.is_empty() {
        return Ok(PolyForm::zero(n, j));
    }
    if let Some(f) = ambient.iter().find(|f| f.n != n || f.j != j) {
        return Err(Error::Mismatch(format!(
            "ambient form of degree {} for a {}-form",
            f.j, beta.j
        )));
    }
    let g = gram(ambient);
    let dbars: Vec<PolyForm> = ambient.iter().map(dbar_b).collect::<Result<_>>()?;
    let rhs: Vec<CRational> = dbars
        .par_iter()
        .map(|d| l2_inner(beta, d).expect("same degree").value)
        .collect();
    let x = linalg::solve(&g, &rhs)?;
    let gamma = PolyForm::combination(n, j, ambient, &x);
    let mut cert: Vec<PolyForm> = adjoint_family(beta, 1);
    cert.extend_from_slice(ambient);
    let bad = cert.par_iter().find_any(|delta| {
        let lhs = l2_inner(&gamma, delta).expect("same degree");
        let rhs = l2_inner(beta, &dbar_b(delta).expect("degree below n - 1")).expect("same degree");
        lhs.value != rhs.value
    });
    if bad.is_some() {
        return Err(Error::Inconsistent(
            "adjoint residual is nonzero on the certificate family".into(),
        ));
    }
    Ok(gamma)
}

/// `dbar_b^* beta`, enlarging the default monomial ambient until certified.
pub fn dbar_b_star_auto(beta: &PolyForm) -> Result<PolyForm> {
    let mut last = None;
    for level in 0..=2 {
        match dbar_b_star(beta, &adjoint_family(beta, level)) {
            Ok(g) => return Ok(g),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `box_b = dbar_b dbar_b^* + dbar_b^* dbar_b` with certified adjoints.
pub fn box_b(alpha: &PolyForm) -> Result<PolyForm> {
    let n = alpha.n;
    let mut out = PolyForm::zero(n, alpha.j);
    if alpha.j >= 1 {
        let down = dbar_b_star_auto(alpha)?;
        out = out.add(&dbar_b(&down)?);
    }
    if alpha.j + 1 < n {
        let up = dbar_b(alpha)?;
        out = out.add(&dbar_b_star_auto(&up)?);
    }
    Ok(out)
}

/// The highest weight form of a component.
pub fn highest_weight_form(idx: &FormIndex) -> PolyForm {
    let n = idx.n();
    let j = idx.j();
    let mut f = PolyForm::zero(n, j);
    let mut a = [0u16; MAX_N];
    let mut b = [0u16; MAX_N];
    match idx.kind() {
        Kind::Phi if idx.q() == 0 => {
            a[n - 1] = idx.p() as u16;
            f.add_term(FormKey { a, b, c: 0 }, CRational::one());
        }
        Kind::Phi => {
            a[n - 1] = idx.p() as u16;
            b[0] = (idx.q() - 1) as u16;
            let full: Wedge = (1 << (j + 1)) - 1;
            for i in 0..=j {
                let mut bb = b;
                bb[i] += 1;
                let sign = if i % 2 == 0 { 1 } else { -1 };
                f.add_term(
                    FormKey {
                        a,
                        b: bb,
                        c: full & !(1 << i),
                    },
                    CRational::from_int(sign),
                );
            }
        }
        Kind::Psi if idx.p() == -1 => {
            b[0] = (idx.q() - 1) as u16;
            let full: Wedge = (1 << n) - 1;
            for i in 0..n {
                let mut bb = b;
                bb[i] += 1;
                // (-1)^{i + n} with one-based i
                let sign = if (i + 1 + n).is_multiple_of(2) { 1 } else { -1 };
                f.add_term(
                    FormKey {
                        a,
                        b: bb,
                        c: full & !(1 << i),
                    },
                    CRational::from_int(sign),
                );
            }
        }
        Kind::Psi => {
            a[n - 1] = idx.p() as u16;
            b[0] = (idx.q() - 1) as u16;
            f.add_term(
                FormKey {
                    a,
                    b,
                    c: (1 << j) - 1,
                },
                CRational::one(),
            );
        }
    }
    f
}

/// Closed-form squared norm of the highest weight form:
/// `2^{j+1} pi^n p! (q-1)! / (p+q+n-1)!` times `q + j` (Phi) or `p + n - j`
/// (Psi), with `(q-1)! (q+j)` read as one at `q = j = 0` and `p! (p+n-j)`
/// read as one at `p = -1`.
pub fn highest_weight_norm_sq(idx: &FormIndex) -> ExactScalar {
    let (n, j, p, q) = (idx.n() as i64, idx.j() as i64, idx.p(), idx.q());
    let fact = |k: i64| Rational::from_integer(factorial(k as usize));
    let top = match idx.kind() {
        Kind::Phi => {
            let tail = if q == 0 { Rational::one() } else { fact(q - 1) * int(q + j) };
            fact(p) * tail
        }
        Kind::Psi => {
            let head = if p == -1 { Rational::one() } else { fact(p) * int(p + n - j) };
            head * fact(q - 1)
        }
    };
    let v = top * int(1 << (j + 1)) / fact(p + q + n - 1);
    ExactScalar::rational(v, n as i32)
}

//! The representation spaces `V_{pqk}` inside tensor spaces, the
//! intertwiners onto the components of the forms, exact orthogonal
//! projections and the empirical multiplication coefficients.
//!
//! The tensor factors of dual and vector slots are kept in symmetric
//! form: the symmetrised tensor of a multiset of basis vectors is stored
//! as a monomial. Every vector of `V_{pqk}` is symmetric in those slots,
//! so nothing is lost, and the gl(n) action becomes a derivation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::traits::{One, Zero};
use num::{BigUint, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::Direction;
use crate::cr_forms::{self, highest_weight_form, multiply_coordinate, FormKey, PolyForm, Wedge, Weight};
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, rat, CRational, Rational};
use crate::linalg::{self, Matrix, SparseEchelon};
use crate::spectrum::{dimension, highest_weight, weyl_dimension, FormIndex, Kind};
use crate::sphere_geometry::{total_degree, Exponents};
use crate::MAX_N;

/// The tensor space a vector lives in: `dual` copies of the dual space,
/// a wedge of degree `wedge`, and `vector` copies of `C^n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpaceTag {
    pub n: usize,
    pub dual: u32,
    pub wedge: usize,
    pub vector: u32,
}

impl SpaceTag {
    pub fn of(idx: &FormIndex) -> SpaceTag {
        let n = idx.n();
        let (p, q, j) = (idx.p(), idx.q(), idx.j());
        match idx.kind() {
            Kind::Phi if q == 0 => SpaceTag {
                n,
                dual: p as u32,
                wedge: 0,
                vector: 0,
            },
            Kind::Phi => SpaceTag {
                n,
                dual: p as u32,
                wedge: j + 1,
                vector: (q - 1) as u32,
            },
            Kind::Psi if p == -1 => SpaceTag {
                n,
                dual: 0,
                wedge: n,
                vector: (q - 1) as u32,
            },
            Kind::Psi => SpaceTag {
                n,
                dual: p as u32,
                wedge: j,
                vector: (q - 1) as u32,
            },
        }
    }

    /// Dimension of the symmetric part of the tensor space.
    pub fn ambient_dimension(&self) -> BigUint {
        let n = self.n as i64;
        let sym = |d: u32| binomial(d as i64 + n - 1, d as i64);
        let v = sym(self.dual) * binomial(n, self.wedge as i64) * sym(self.vector);
        v.to_biguint().expect("nonnegative")
    }
}

/// Basis label `y^a (e_C) x^b`: `a` counts dual slots, `b` vector slots.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorKey {
    pub a: Exponents,
    pub c: Wedge,
    pub b: Exponents,
}

impl TensorKey {
    /// Torus weight, in the same convention as [`FormKey::weight`].
    pub fn weight(&self) -> Weight {
        let mut w = [0i32; MAX_N];
        for (m, slot) in w.iter_mut().enumerate() {
            *slot = self.b[m] as i32 - self.a[m] as i32 + ((self.c >> m) & 1) as i32;
        }
        w
    }
}

/// A sparse vector in a tensor space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorVector {
    pub tag: SpaceTag,
    pub terms: BTreeMap<TensorKey, CRational>,
}

impl TensorVector {
    pub fn zero(tag: SpaceTag) -> Self {
        Self {
            tag,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: TensorKey, c: CRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Inner product induced from the tensor product of orthonormal bases:
    /// a symmetric monomial `x^b` has squared norm `b! / |b|!`.
    pub fn inner(&self, other: &TensorVector) -> CRational {
        let mut acc = CRational::zero();
        for (k, x) in &self.terms {
            if let Some(y) = other.terms.get(k) {
                acc += &(x * &y.conj()).scale(&(sym_norm(&k.a) * sym_norm(&k.b)));
            }
        }
        acc
    }
}

fn sym_norm(e: &Exponents) -> Rational {
    let top: num::BigInt = e.iter().map(|&x| factorial(x as usize)).product();
    Rational::new(top, factorial(total_degree(e) as usize))
}

impl fmt::Display for TensorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.tag.n;
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut s = format!("({c})");
                for m in 0..n {
                    for _ in 0..k.a[m] {
                        s += &format!("*e{}'", m + 1);
                    }
                }
                let w = cr_forms::wedge_indices(k.c);
                if !w.is_empty() {
                    let ws: Vec<String> = w.iter().map(|i| format!("e{i}")).collect();
                    s += &format!("*({})", ws.join("^"));
                }
                for m in 0..n {
                    for _ in 0..k.b[m] {
                        s += &format!("*e{}", m + 1);
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The primitive vector `e*_n^p (e_1 ^ ... ^ e_{k+1}) e_1^{q-1}`.
pub fn primitive_vector(idx: &FormIndex) -> TensorVector {
    let tag = SpaceTag::of(idx);
    let mut a = [0u16; MAX_N];
    let mut b = [0u16; MAX_N];
    a[tag.n - 1] = tag.dual as u16;
    b[0] = tag.vector as u16;
    let mut v = TensorVector::zero(tag);
    v.add_term(
        TensorKey {
            a,
            c: ((1u32 << tag.wedge) - 1) as Wedge,
            b,
        },
        CRational::one(),
    );
    v
}

fn act_zero_based(a: usize, b: usize, v: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero(v.tag);
    for (k, x) in &v.terms {
        // dual slots: E_ab e*_i = -delta_{ai} e*_b
        if k.a[a] > 0 {
            let mut key = *k;
            key.a[a] -= 1;
            key.a[b] += 1;
            out.add_term(key, x.scale(&Rational::from_integer((-(k.a[a] as i64)).into())));
        }
        // wedge: e_b -> e_a
        if k.c & (1 << b) != 0 {
            if a == b {
                out.add_term(*k, x.clone());
            } else if k.c & (1 << a) == 0 {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let between = (k.c & (((1u32 << hi) - 1) as Wedge) & !(((1u32 << (lo + 1)) - 1) as Wedge))
                    .count_ones();
                let mut key = *k;
                key.c = (k.c & !(1 << b)) | (1 << a);
                let s = if between.is_multiple_of(2) { 1 } else { -1 };
                out.add_term(key, x.scale(&Rational::from_integer(s.into())));
            }
        }
        // vector slots: E_ab e_i = delta_{bi} e_a
        if k.b[b] > 0 {
            let mut key = *k;
            key.b[b] -= 1;
            key.b[a] += 1;
            out.add_term(key, x.scale(&Rational::from_integer((k.b[b] as i64).into())));
        }
    }
    out
}

/// Derived action of the matrix unit `E_ab` (one-based indices).
pub fn gl_action(a: usize, b: usize, v: &TensorVector) -> TensorVector {
    assert!((1..=v.tag.n).contains(&a) && (1..=v.tag.n).contains(&b));
    act_zero_based(a - 1, b - 1, v)
}

/// The invariant subspace generated by a primitive vector, graded by weight.
#[derive(Clone, Debug)]
pub struct InvariantSpace {
    pub idx: FormIndex,
    /// A basis of each weight space.
    pub blocks: BTreeMap<Weight, Vec<TensorVector>>,
}

impl InvariantSpace {
    pub fn rank(&self) -> usize {
        self.blocks.values().map(Vec::len).sum()
    }

    pub fn spanning(&self) -> Vec<TensorVector> {
        self.blocks.values().flatten().cloned().collect()
    }

    /// Gram matrix of [`Self::spanning`] in the tensor inner product.
    pub fn gram(&self) -> Matrix {
        let s = self.spanning();
        s.iter()
            .map(|u| s.iter().map(|v| v.inner(u)).collect())
            .collect()
    }
}

fn weight_of(idx: &FormIndex) -> Weight {
    let key = primitive_vector(idx);
    key.terms.keys().next().expect("nonzero").weight()
}

/// Whether `to` is reachable from `from` by lowering operators `E_ab`, `a > b`.
fn lowerable(from: &Weight, to: &Weight, n: usize) -> bool {
    let mut partial = 0i32;
    for m in 0..n {
        partial += to[m] - from[m];
        if partial > 0 {
            return false;
        }
    }
    partial == 0
}

fn height(top: &Weight, w: &Weight, n: usize) -> i64 {
    let mut partial = 0i64;
    let mut h = 0i64;
    for m in 0..n.saturating_sub(1) {
        partial += (top[m] - w[m]) as i64;
        h += partial;
    }
    h
}

/// Weight spaces of `V` reached by lowering from the primitive vector,
/// restricted to weights from which some target is reachable (all
/// weights when `targets` is `None`).
fn weight_spaces(idx: &FormIndex, targets: Option<&[Weight]>) -> BTreeMap<Weight, Vec<TensorVector>> {
    let n = idx.n();
    let top = weight_of(idx);
    let wanted = |w: &Weight| match targets {
        None => true,
        Some(ts) => ts.iter().any(|t| lowerable(w, t, n)),
    };
    let mut out = BTreeMap::new();
    if !wanted(&top) {
        return out;
    }
    let tag = SpaceTag::of(idx);
    let mut pending: BTreeMap<(i64, Weight), SparseEchelon<TensorKey>> = BTreeMap::new();
    let mut start = SparseEchelon::new();
    start.insert(primitive_vector(idx).terms);
    pending.insert((0, top), start);
    while let Some(((_, w), space)) = pending.pop_first() {
        let basis: Vec<TensorVector> = space
            .rows()
            .map(|r| TensorVector {
                tag,
                terms: r.clone(),
            })
            .collect();
        for a in 0..n {
            for b in 0..a {
                let mut nw = w;
                nw[a] += 1;
                nw[b] -= 1;
                if !wanted(&nw) {
                    continue;
                }
                for v in &basis {
                    let img = act_zero_based(a, b, v);
                    if img.is_zero() {
                        continue;
                    }
                    pending
                        .entry((height(&top, &nw, n), nw))
                        .or_default()
                        .insert(img.terms);
                }
            }
        }
        out.insert(w, basis);
    }
    out
}

/// The smallest invariant subspace containing the primitive vector.
///
/// Lowering operators suffice, because the primitive vector is a highest
/// weight vector. The final rank is checked against the dimension formula.
pub fn gl_closure(idx: &FormIndex) -> Result<InvariantSpace> {
    let blocks = weight_spaces(idx, None);
    let space = InvariantSpace { idx: *idx, blocks };
    let expected = dimension(idx);
    if BigUint::from(space.rank()) != expected {
        return Err(Error::RankMismatch {
            what: format!("closure of {idx}"),
            expected: expected.to_string(),
            found: space.rank(),
        });
    }
    Ok(space)
}

/// The intertwiner from the tensor space of `idx` onto forms.
pub fn f_map(idx: &FormIndex, v: &TensorVector) -> Result<PolyForm> {
    let tag = SpaceTag::of(idx);
    if v.tag != tag {
        return Err(Error::Mismatch(format!("tensor space {:?} for {idx}", v.tag)));
    }
    let n = idx.n();
    let j = idx.j();
    let mut out = PolyForm::zero(n, j);
    let phi_style = match idx.kind() {
        Kind::Phi => idx.q() > 0,
        Kind::Psi => idx.p() == -1,
    };
    // the top-degree Psi display carries (-1)^{i+n} instead of (-1)^{i-1}
    let global = if idx.kind() == Kind::Psi && n.is_multiple_of(2) { -1 } else { 1 };
    for (k, x) in &v.terms {
        if phi_style {
            for (i, m) in cr_forms::wedge_indices(k.c).into_iter().enumerate() {
                let mut b = k.b;
                b[m - 1] += 1;
                let s = if i % 2 == 0 { global } else { -global };
                out.add_term(
                    FormKey {
                        a: k.a,
                        b,
                        c: k.c & !(1 << (m - 1)),
                    },
                    x.scale(&Rational::from_integer(s.into())),
                );
            }
        } else {
            out.add_term(
                FormKey {
                    a: k.a,
                    b: k.b,
                    c: k.c,
                },
                x.clone(),
            );
        }
    }
    Ok(out)
}

/// One weight space of a component: forms and their L2 Gram matrix (the
/// rational factor of `pi^n`).
#[derive(Clone, Debug)]
pub struct ComponentBlock {
    pub forms: Vec<PolyForm>,
    pub gram: Matrix,
}

/// A component of the forms, graded by weight.
#[derive(Clone, Debug)]
pub struct ComponentSpace {
    pub idx: FormIndex,
    pub blocks: BTreeMap<Weight, ComponentBlock>,
}

fn build_blocks(idx: &FormIndex, spaces: BTreeMap<Weight, Vec<TensorVector>>) -> Result<ComponentSpace> {
    let built: Vec<(Weight, ComponentBlock)> = spaces
        .into_par_iter()
        .map(|(w, vs)| {
            let forms: Vec<PolyForm> = vs.iter().map(|v| f_map(idx, v)).collect::<Result<_>>()?;
            let gram = cr_forms::gram(&forms);
            if linalg::rank(&gram) != forms.len() {
                return Err(Error::RankMismatch {
                    what: format!("weight block of {idx}"),
                    expected: forms.len().to_string(),
                    found: linalg::rank(&gram),
                });
            }
            Ok((w, ComponentBlock { forms, gram }))
        })
        .collect::<Result<_>>()?;
    Ok(ComponentSpace {
        idx: *idx,
        blocks: built.into_iter().collect(),
    })
}

impl ComponentSpace {
    pub fn dimension(&self) -> usize {
        self.blocks.values().map(|b| b.forms.len()).sum()
    }

    pub fn forms(&self) -> impl Iterator<Item = &PolyForm> {
        self.blocks.values().flat_map(|b| b.forms.iter())
    }

    /// Orthogonal projection of `alpha` onto the blocks held here.
    pub fn project(&self, alpha: &PolyForm) -> Result<PolyForm> {
        Ok(self.project_with_norm(alpha)?.0)
    }

    /// The projection together with its squared norm (rational factor of `pi^n`).
    pub fn project_with_norm(&self, alpha: &PolyForm) -> Result<(PolyForm, Rational)> {
        let (n, j) = (self.idx.n(), self.idx.j());
        if alpha.n() != n || alpha.j() != j {
            return Err(Error::Mismatch(format!(
                "{}-form in dimension {} projected onto {}",
                alpha.j(),
                alpha.n(),
                self.idx
            )));
        }
        let parts = split_by_weight(alpha);
        let mut out = PolyForm::zero(n, j);
        let mut norm = Rational::zero();
        for (w, piece) in parts {
            let Some(block) = self.blocks.get(&w) else {
                continue;
            };
            let rhs: Vec<CRational> = block
                .forms
                .par_iter()
                .map(|f| cr_forms::l2_inner(&piece, f).expect("same degree").value)
                .collect();
            let x = linalg::solve(&block.gram, &rhs)?;
            for (xi, ri) in x.iter().zip(&rhs) {
                norm += (xi.conj() * ri).re;
            }
            out = out.add(&PolyForm::combination(n, j, &block.forms, &x));
        }
        Ok((out, norm))
    }
}

fn split_by_weight(alpha: &PolyForm) -> BTreeMap<Weight, PolyForm> {
    let mut out: BTreeMap<Weight, PolyForm> = BTreeMap::new();
    for (k, c) in alpha.terms() {
        out.entry(k.weight())
            .or_insert_with(|| PolyForm::zero(alpha.n(), alpha.j()))
            .add_term(*k, c.clone());
    }
    out
}

/// Images of the closure under the intertwiner, with their Gram blocks.
pub fn component_space(idx: &FormIndex) -> Result<ComponentSpace> {
    let space = gl_closure(idx)?;
    build_blocks(idx, space.blocks)
}

/// Only the weight spaces of `idx` at the given weights.
pub fn component_blocks(idx: &FormIndex, weights: &[Weight]) -> Result<ComponentSpace> {
    let mut spaces = weight_spaces(idx, Some(weights));
    spaces.retain(|w, _| weights.contains(w));
    build_blocks(idx, spaces)
}

/// Orthogonal projection onto the component `dst`.
pub fn project(dst: &FormIndex, alpha: &PolyForm) -> Result<PolyForm> {
    let weights: Vec<Weight> = split_by_weight(alpha).into_keys().collect();
    component_blocks(dst, &weights)?.project(alpha)
}

fn multiply(direction: Direction, alpha: &PolyForm, m: usize) -> PolyForm {
    multiply_coordinate(alpha, m, direction == Direction::ZBar)
}

/// `(dim src / dim dst) sum_m |P_dst(z_m alpha)|^2 / |alpha|^2` for a given
/// nonzero `alpha` in the source component (`conj(z_m)` for `ZBar`).
pub fn empirical_coeff_with(
    direction: Direction,
    src: &FormIndex,
    dst: &FormIndex,
    alpha: &PolyForm,
) -> Result<Rational> {
    if src.n() != dst.n() || src.j() != dst.j() {
        return Err(Error::Mismatch(format!("{src} and {dst}")));
    }
    let n = src.n();
    let products: Vec<PolyForm> = (0..n).map(|m| multiply(direction, alpha, m)).collect();
    let weights: BTreeSet<Weight> = products
        .iter()
        .flat_map(|f| f.terms().keys().map(|k| k.weight()))
        .collect();
    let weights: Vec<Weight> = weights.into_iter().collect();
    let space = component_blocks(dst, &weights)?;
    let mut total = Rational::zero();
    for f in &products {
        total += space.project_with_norm(f)?.1;
    }
    let alpha_norm = cr_forms::norm_sq(alpha).value.re;
    if alpha_norm.is_zero() {
        return Err(Error::InvalidArgument("alpha has zero norm".into()));
    }
    let ratio = Rational::from_integer(dimension(src).into()) / Rational::from_integer(dimension(dst).into());
    Ok(ratio * total / alpha_norm)
}

/// The empirical coefficient with the highest weight form of `src` as `alpha`.
pub fn empirical_coeff(direction: Direction, src: &FormIndex, dst: &FormIndex) -> Result<Rational> {
    empirical_coeff_with(direction, src, dst, &highest_weight_form(src))
}

/// A pseudo-random element of the component, a combination of a few
/// spanning forms with small Gaussian-integer coefficients.
pub fn random_element(space: &ComponentSpace, seed: u64) -> PolyForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<&PolyForm> = space.forms().collect();
    let (n, j) = (space.idx.n(), space.idx.j());
    let mut out = PolyForm::zero(n, j);
    while cr_forms::norm_sq(&out).is_zero() {
        for _ in 0..3.min(all.len()) {
            let f = all[rng.random_range(0..all.len())];
            let c = CRational::new(rat(rng.random_range(-3..=3), 1), rat(rng.random_range(-3..=3), 1));
            out = out.add(&f.scale(&c));
        }
    }
    out
}

/// One summand of the decomposition of a tensor product with `C^n`
/// (label `l > 0`) or its dual (label `-l`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorSummand {
    pub label: i32,
    /// The highest weight, or `None` if the displayed tuple has the wrong length.
    pub weight: Option<Vec<i64>>,
    /// Weyl dimension; zero when the tuple is not nonincreasing.
    pub dim: u64,
}

/// The four candidate summands of `V (x) C^n` (`ZBar`) or `C^{n*} (x) V` (`Z`).
pub fn tensor_component_dims(idx: &FormIndex, direction: Direction) -> Vec<TensorSummand> {
    let n = idx.n() as i64;
    let k = idx.tensor_degree() as i64;
    let (p, q) = (idx.p(), idx.q());
    // segments: (value, length)
    let build = |segs: &[(i64, i64)]| -> Option<Vec<i64>> {
        if segs.iter().any(|&(_, l)| l < 0) {
            return None;
        }
        let v: Vec<i64> = segs.iter().flat_map(|&(x, l)| std::iter::repeat_n(x, l as usize)).collect();
        (v.len() as i64 == n).then_some(v)
    };
    let (labels, tuples): (Vec<i32>, Vec<Option<Vec<i64>>>) = match direction {
        Direction::ZBar => (
            vec![1, 2, 3, 4],
            vec![
                build(&[(q + 1, 1), (1, k), (0, n - 2 - k), (-p, 1)]),
                build(&[(q, 1), (2, 1), (1, k - 1), (0, n - 2 - k), (-p, 1)]),
                build(&[(q, 1), (1, k + 1), (0, n - 3 - k), (-p, 1)]),
                build(&[(q, 1), (1, k), (0, n - 2 - k), (-p + 1, 1)]),
            ],
        ),
        Direction::Z => (
            vec![-1, -2, -3, -4],
            vec![
                build(&[(q, 1), (1, k), (0, n - 2 - k), (-p - 1, 1)]),
                build(&[(q, 1), (1, k), (0, n - 3 - k), (-1, 1), (-p, 1)]),
                build(&[(q, 1), (1, k - 1), (0, n - 1 - k), (-p, 1)]),
                build(&[(q - 1, 1), (1, k), (0, n - 2 - k), (-p, 1)]),
            ],
        ),
    };
    labels
        .into_iter()
        .zip(tuples)
        .map(|(label, weight)| {
            let dim = weight
                .as_ref()
                .and_then(|w| weyl_dimension(w))
                .map(|d| d.to_u64().expect("small dimension"))
                .unwrap_or(0);
            TensorSummand { label, weight, dim }
        })
        .collect()
}

/// Sanity check that the primitive vector has the highest weight of `idx`.
pub fn primitive_weight_matches(idx: &FormIndex) -> bool {
    let w = weight_of(idx);
    let hw = highest_weight(idx);
    (0..idx.n()).all(|m| w[m] as i64 == hw[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{candidate_destinations, coeff};
    use crate::spectrum::indices_in_box;

    fn phi(n: usize, j: usize, p: i64, q: i64) -> FormIndex {
        FormIndex::phi(n, j, p, q).unwrap()
    }
    fn psi(n: usize, j: usize, p: i64, q: i64) -> FormIndex {
        FormIndex::psi(n, j, p, q).unwrap()
    }
    fn basis(tag: SpaceTag, a: &[u16], c: &[usize], b: &[u16]) -> TensorVector {
        let mut v = TensorVector::zero(tag);
        v.add_term(
            TensorKey {
                a: crate::sphere_geometry::exponents(a),
                c: cr_forms::wedge_from_indices(c),
                b: crate::sphere_geometry::exponents(b),
            },
            CRational::one(),
        );
        v
    }

    #[test]
    fn primitive_vectors() {
        let v = primitive_vector(&phi(3, 1, 0, 1));
        let tag = SpaceTag::of(&phi(3, 1, 0, 1));
        assert_eq!(v, basis(tag, &[0, 0, 0], &[1, 2], &[0, 0, 0]));
        let v = primitive_vector(&phi(3, 0, 2, 0));
        assert_eq!(v, basis(v.tag, &[0, 0, 2], &[], &[0, 0, 0]));
        let v = primitive_vector(&psi(3, 2, -1, 1));
        assert_eq!(v, basis(v.tag, &[0, 0, 0], &[1, 2, 3], &[0, 0, 0]));
        for n in 2..=4 {
            for j in 0..n {
                for idx in indices_in_box(n, j, 3, 3).unwrap() {
                    assert!(primitive_weight_matches(&idx), "{idx}");
                }
            }
        }
    }

    #[test]
    fn gl_action_examples() {
        let tag = SpaceTag {
            n: 3,
            dual: 0,
            wedge: 0,
            vector: 1,
        };
        let e1 = basis(tag, &[0, 0, 0], &[], &[1, 0, 0]);
        assert_eq!(gl_action(2, 1, &e1), basis(tag, &[0, 0, 0], &[], &[0, 1, 0]));
        let wtag = SpaceTag {
            n: 3,
            dual: 0,
            wedge: 2,
            vector: 0,
        };
        let e12 = basis(wtag, &[0, 0, 0], &[1, 2], &[0, 0, 0]);
        assert!(gl_action(2, 1, &e12).is_zero());
        assert_eq!(gl_action(3, 2, &e12), basis(wtag, &[0, 0, 0], &[1, 3], &[0, 0, 0]));
        // e_1 ^ e_3 under E_21 gives e_2 ^ e_3; e_2 ^ e_3 under E_12 gives e_1 ^ e_3
        let e13 = basis(wtag, &[0, 0, 0], &[1, 3], &[0, 0, 0]);
        assert_eq!(gl_action(2, 1, &e13), basis(wtag, &[0, 0, 0], &[2, 3], &[0, 0, 0]));
        // e_1 ^ e_2 under E_32 with reordering: E_31 gives e_3 ^ e_2 = -e_2 ^ e_3
        let mut neg = basis(wtag, &[0, 0, 0], &[2, 3], &[0, 0, 0]);
        neg = TensorVector {
            tag: wtag,
            terms: neg.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        };
        assert_eq!(gl_action(3, 1, &e12), neg);
        // dual slot: E_ab e*_a = -e*_b
        let dtag = SpaceTag {
            n: 3,
            dual: 1,
            wedge: 0,
            vector: 0,
        };
        let d3 = basis(dtag, &[0, 0, 1], &[], &[0, 0, 0]);
        let mut expect = basis(dtag, &[1, 0, 0], &[], &[0, 0, 0]);
        expect.terms.values_mut().for_each(|c| *c = -c.clone());
        assert_eq!(gl_action(3, 1, &d3), expect);
    }

    #[test]
    fn action_is_a_lie_algebra_representation() {
        // [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb on a generic vector
        let idx = phi(3, 1, 1, 2);
        let space = gl_closure(&idx).unwrap();
        let v = space.spanning().into_iter().nth(4).unwrap();
        let sub = |x: &TensorVector, y: &TensorVector| {
            let mut out = x.clone();
            for (k, c) in &y.terms {
                out.add_term(*k, -c.clone());
            }
            out
        };
        for (a, b, c, d) in [(1, 2, 2, 3), (2, 1, 1, 2), (3, 1, 1, 3), (1, 3, 2, 1)] {
            let lhs = sub(
                &gl_action(a, b, &gl_action(c, d, &v)),
                &gl_action(c, d, &gl_action(a, b, &v)),
            );
            let mut rhs = TensorVector::zero(v.tag);
            if b == c {
                rhs = gl_action(a, d, &v);
            }
            if d == a {
                rhs = sub(&rhs, &gl_action(c, b, &v));
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(gl_closure(&phi(3, 1, 0, 1)).unwrap().rank(), 3);
        assert_eq!(gl_closure(&phi(2, 0, 2, 0)).unwrap().rank(), 3);
        assert_eq!(gl_closure(&psi(3, 1, 0, 1)).unwrap().rank(), 3);
        let s = gl_closure(&phi(3, 1, 0, 1)).unwrap();
        assert_eq!(linalg::rank(&s.gram()), 3);
        assert_eq!(SpaceTag::of(&phi(3, 1, 0, 1)).ambient_dimension(), BigUint::from(3u32));
    }

    #[test]
    fn closure_certificate_and_invariance() {
        for n in 2..=4 {
            for j in 0..n {
                for idx in indices_in_box(n, j, 3, 3).unwrap() {
                    let space = gl_closure(&idx).unwrap();
                    if n <= 3 && idx.p() <= 2 && idx.q() <= 2 {
                        assert_eq!(linalg::rank(&space.gram()), space.rank());
                        // closed under every E_ab, raising operators included
                        let mut ech = SparseEchelon::new();
                        for v in space.spanning() {
                            ech.insert(v.terms);
                        }
                        for v in space.spanning() {
                            for a in 1..=n {
                                for b in 1..=n {
                                    assert!(ech.contains(&gl_action(a, b, &v).terms), "{idx}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_map_examples() {
        let idx = phi(3, 1, 0, 1);
        let img = f_map(&idx, &primitive_vector(&idx)).unwrap();
        let expect = PolyForm::monomial(3, &[0, 0, 0], &[1, 0, 0], &[2], CRational::one()).add(
            &PolyForm::monomial(3, &[0, 0, 0], &[0, 1, 0], &[1], CRational::from_int(-1)),
        );
        assert_eq!(img, expect);
        let idx = psi(3, 1, 0, 1);
        assert_eq!(f_map(&idx, &primitive_vector(&idx)).unwrap(), PolyForm::zeta(3, 1));
        assert!(f_map(&phi(3, 1, 1, 1), &primitive_vector(&idx)).is_err());
        for n in 2..=4 {
            for j in 0..n {
                for idx in indices_in_box(n, j, 2, 2).unwrap() {
                    assert_eq!(
                        f_map(&idx, &primitive_vector(&idx)).unwrap(),
                        highest_weight_form(&idx),
                        "{idx}"
                    );
                }
            }
        }
    }

    #[test]
    fn component_space_examples() {
        let s = component_space(&phi(3, 1, 0, 1)).unwrap();
        assert_eq!(s.dimension(), 3);
        let total: usize = s.blocks.values().map(|b| linalg::rank(&b.gram)).sum();
        assert_eq!(total, 3);
        let s = component_space(&psi(3, 1, 0, 1)).unwrap();
        for b in s.blocks.values() {
            assert_eq!(b.gram, vec![vec![CRational::real(rat(4, 3))]]);
        }
    }

    #[test]
    fn projection_examples() {
        let idx = phi(3, 1, 0, 1);
        let f = highest_weight_form(&idx);
        let p = project(&idx, &f).unwrap();
        assert!(cr_forms::norm_sq(&p.sub(&f)).is_zero());
        let z1f = multiply_coordinate(&f, 0, false);
        assert!(cr_forms::norm_sq(&project(&phi(3, 1, 2, 1), &z1f).unwrap()).is_zero());
        let dst = component_space(&phi(3, 1, 1, 1)).unwrap();
        let mut total = Rational::zero();
        for m in 0..3 {
            total += dst.project_with_norm(&multiply_coordinate(&f, m, false)).unwrap().1;
        }
        assert_eq!(total / cr_forms::norm_sq(&f).value.re, rat(1, 2));
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint() {
        let dst = component_space(&psi(3, 1, 1, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let src = component_space(&psi(3, 1, 0, 1)).unwrap();
        let forms: Vec<PolyForm> = (0..3)
            .map(|s| {
                let f = random_element(&src, s);
                let m = rng.random_range(0..3);
                multiply_coordinate(&f, m, false).add(&multiply_coordinate(&f, (m + 1) % 3, true))
            })
            .collect();
        for f in &forms {
            let p = dst.project(f).unwrap();
            let pp = dst.project(&p).unwrap();
            assert!(cr_forms::norm_sq(&p.sub(&pp)).is_zero());
        }
        for f in &forms {
            for g in &forms {
                let lhs = cr_forms::l2_inner(&dst.project(f).unwrap(), g).unwrap();
                let rhs = cr_forms::l2_inner(f, &dst.project(g).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn empirical_examples() {
        let src = phi(3, 1, 0, 1);
        assert_eq!(empirical_coeff(Direction::Z, &src, &phi(3, 1, 1, 1)).unwrap(), rat(1, 4));
        assert_eq!(empirical_coeff(Direction::ZBar, &src, &phi(3, 1, 0, 2)).unwrap(), rat(3, 8));
        assert!(empirical_coeff(Direction::Z, &src, &psi(3, 1, 0, 2)).unwrap().is_zero());
    }

    #[test]
    fn empirical_matches_table_small() {
        for (n, j) in [(2, 0), (2, 1), (3, 1)] {
            for src in indices_in_box(n, j, 1, 1).unwrap() {
                for dir in [Direction::Z, Direction::ZBar] {
                    for dst in candidate_destinations(&src) {
                        assert_eq!(
                            empirical_coeff(dir, &src, &dst).unwrap(),
                            coeff(dir, &src, &dst),
                            "{dir} {src} -> {dst}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn empirical_is_independent_of_alpha() {
        let src = psi(3, 1, 1, 1);
        let space = component_space(&src).unwrap();
        let alpha = random_element(&space, 11);
        for dir in [Direction::Z, Direction::ZBar] {
            for dst in crate::coefficients::support(dir, &src) {
                assert_eq!(
                    empirical_coeff_with(dir, &src, &dst, &alpha).unwrap(),
                    coeff(dir, &src, &dst)
                );
            }
        }
    }

    #[test]
    fn tensor_dims() {
        let d = tensor_component_dims(&phi(3, 1, 0, 1), Direction::ZBar);
        let total: u64 = d.iter().map(|s| s.dim).sum();
        assert_eq!(total, 9);
        assert_eq!(d[0].weight, Some(vec![2, 1, 0]));
        assert_eq!(d[1].dim, 0);
        for n in 2..=4 {
            for j in 0..n {
                for idx in indices_in_box(n, j, 4, 4).unwrap() {
                    let dim = dimension(&idx).to_u64().unwrap();
                    for dir in [Direction::Z, Direction::ZBar] {
                        let total: u64 = tensor_component_dims(&idx, dir).iter().map(|s| s.dim).sum();
                        assert_eq!(total, n as u64 * dim, "{idx} {dir}");
                    }
                }
            }
        }
    }
}

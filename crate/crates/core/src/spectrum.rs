//! Irreducible components of the (0,j)-forms on the sphere, their eigenvalues,
//! dimensions, spectral shells and the Hodge-dual index map.

use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::MAX_N;

/// The two families of components: `Phi` lies in the range of the adjoint
/// operator, `Psi` in the range of the tangential Cauchy-Riemann operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Phi,
    Psi,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Phi => "Phi",
            Kind::Psi => "Psi",
        }
    }

    pub fn other(self) -> Kind {
        match self {
            Kind::Phi => Kind::Psi,
            Kind::Psi => Kind::Phi,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(Kind::Phi),
            "psi" => Ok(Kind::Psi),
            _ => Err(Error::InvalidArgument(format!("unknown kind {s:?}"))),
        }
    }
}

pub(crate) fn check_nj(n: usize, j: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    if j >= n {
        return Err(Error::InvalidDegree { n, j });
    }
    Ok(())
}

/// Least admissible `(p, q)` in the index set for degree `j`.
pub fn index_floor(n: usize, j: usize) -> (i64, i64) {
    if j == 0 {
        (0, 0)
    } else if j == n - 1 {
        (-1, 1)
    } else {
        (0, 1)
    }
}

/// Whether `(n, j, p, q, kind)` names a nonzero component.
pub fn is_valid_index(n: usize, j: usize, p: i64, q: i64, kind: Kind) -> Result<bool> {
    check_nj(n, j)?;
    let kind_ok = match kind {
        Kind::Phi => j + 2 <= n,
        Kind::Psi => j >= 1,
    };
    let (pmin, qmin) = index_floor(n, j);
    Ok(kind_ok && p >= pmin && q >= qmin)
}

/// A validated label `(n, j, p, q, kind)` of one irreducible component.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormIndex {
    n: usize,
    j: usize,
    p: i64,
    q: i64,
    kind: Kind,
}

impl FormIndex {
    pub fn new(n: usize, j: usize, p: i64, q: i64, kind: Kind) -> Result<Self> {
        if is_valid_index(n, j, p, q, kind)? {
            Ok(Self { n, j, p, q, kind })
        } else {
            Err(Error::InvalidIndex {
                n,
                j,
                p,
                q,
                kind: kind.name(),
            })
        }
    }

    pub fn phi(n: usize, j: usize, p: i64, q: i64) -> Result<Self> {
        Self::new(n, j, p, q, Kind::Phi)
    }

    pub fn psi(n: usize, j: usize, p: i64, q: i64) -> Result<Self> {
        Self::new(n, j, p, q, Kind::Psi)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j(&self) -> usize {
        self.j
    }
    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn q(&self) -> i64 {
        self.q
    }
    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// The index `(p', q', kind')` in the same `(n, j)` if it is valid.
    pub fn sibling(&self, p: i64, q: i64, kind: Kind) -> Option<FormIndex> {
        FormIndex::new(self.n, self.j, p, q, kind).ok()
    }

    /// Degree of the exterior factor in the tensor model: `j` for Phi, `j - 1` for Psi.
    pub fn tensor_degree(&self) -> usize {
        match self.kind {
            Kind::Phi => self.j,
            Kind::Psi => self.j - 1,
        }
    }

    pub fn eigenvalue_sq(&self) -> u64 {
        eigenvalue_sq(self)
    }

    pub fn dimension(&self) -> BigUint {
        dimension(self)
    }

    pub fn hodge_dual(&self) -> FormIndex {
        hodge_dual(self)
    }

    pub fn highest_weight(&self) -> Vec<i64> {
        highest_weight(self)
    }
}

impl fmt::Display for FormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[n={},j={},p={},q={}]",
            self.kind, self.n, self.j, self.p, self.q
        )
    }
}

/// `lambda_{pqj}^2 = 2 (q + j)(p + n - 1 - j)` for signed arguments.
pub fn lambda_sq(n: usize, j: i64, p: i64, q: i64) -> i64 {
    2 * (q + j) * (p + n as i64 - 1 - j)
}

/// Squared eigenvalue of the Kohn Laplacian on the component.
pub fn eigenvalue_sq(idx: &FormIndex) -> u64 {
    let j = idx.j as i64;
    let v = match idx.kind {
        Kind::Phi => lambda_sq(idx.n, j, idx.p, idx.q),
        Kind::Psi => lambda_sq(idx.n, j - 1, idx.p, idx.q),
    };
    debug_assert!(v >= 0);
    v as u64
}

/// `num / den`, reading `0/0` as one.
fn guarded(num: i64, den: i64) -> BigRational {
    if num == 0 && den == 0 {
        BigRational::one()
    } else {
        assert!(den != 0, "vanishing denominator {num}/{den}");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Closed-form dimension of `Phi_{pqk}` at tensor degree `k`.
fn dimension_formula(n: usize, k: i64, p: i64, q: i64) -> BigRational {
    let n = n as i64;
    let mut r = guarded(p + 1, p + n - 1 - k);
    r *= guarded(q, q + k);
    r *= guarded(p + q + n - 1, n - 1);
    r *= BigRational::from_integer(binomial(n - 2, k));
    r *= BigRational::from_integer(binomial(p + n - 1, n - 2));
    r *= BigRational::from_integer(binomial(q + n - 2, n - 2));
    r
}

/// Dimension of the component, from the closed formula.
pub fn dimension(idx: &FormIndex) -> BigUint {
    let r = dimension_formula(idx.n, idx.tensor_degree() as i64, idx.p, idx.q);
    assert!(r.is_integer() && r.is_positive(), "dimension {r} of {idx}");
    r.to_integer().to_biguint().expect("positive")
}

/// Highest weight `(q, 1^k, 0^{n-2-k}, -p)` with `k` the tensor degree.
pub fn highest_weight(idx: &FormIndex) -> Vec<i64> {
    let n = idx.n;
    let k = idx.tensor_degree();
    let mut w = vec![0i64; n];
    w[0] = idx.q;
    for slot in w.iter_mut().take(k + 1).skip(1) {
        *slot = 1;
    }
    w[n - 1] = -idx.p;
    w
}

/// Weyl dimension of the irreducible with highest weight `l`, or `None` if
/// `l` is not nonincreasing.
pub fn weyl_dimension(l: &[i64]) -> Option<BigUint> {
    if l.windows(2).any(|w| w[0] < w[1]) {
        return None;
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..l.len() {
        for k in i + 1..l.len() {
            num *= BigInt::from(l[i] - l[k] + (k - i) as i64);
            den *= BigInt::from((k - i) as i64);
        }
    }
    Some((num / den).to_biguint().expect("positive"))
}

/// Index map realising the Hodge star: `Phi_{pqj} -> Psi_{(q-1)(p+1)(n-1-j)}` and back.
pub fn hodge_dual(idx: &FormIndex) -> FormIndex {
    FormIndex {
        n: idx.n,
        j: idx.n - 1 - idx.j,
        p: idx.q - 1,
        q: idx.p + 1,
        kind: idx.kind.other(),
    }
}

/// Components whose squared eigenvalue lies in `[(i-1)^2, i^2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralShell {
    pub i: u64,
    pub members: Vec<FormIndex>,
}

impl SpectralShell {
    pub fn total_dimension(&self) -> BigUint {
        self.members.iter().map(dimension).sum()
    }
}

/// All valid indices with squared eigenvalue in `[lo, hi]` and positive.
///
/// Components in the kernel (`q = 0` for `j = 0`, `p = -1` for `j = n - 1`)
/// are infinite in number and never listed.
pub fn indices_with_eigenvalue_sq(n: usize, j: usize, lo: u64, hi: u64) -> Result<Vec<FormIndex>> {
    check_nj(n, j)?;
    let lo = lo.max(1) as i64;
    let hi = hi as i64;
    let mut out = Vec::new();
    if hi < lo {
        return Ok(out);
    }
    let (pmin, qmin) = index_floor(n, j);
    for kind in [Kind::Phi, Kind::Psi] {
        if !is_valid_index(n, j, pmin, qmin, kind)? {
            continue;
        }
        // lambda^2 = 2 (q + alpha)(p + beta)
        let jj = j as i64;
        let (alpha, beta) = match kind {
            Kind::Phi => (jj, n as i64 - 1 - jj),
            Kind::Psi => (jj - 1, n as i64 - jj),
        };
        let mut p = pmin;
        loop {
            let pb = p + beta;
            if pb == 0 {
                p += 1;
                continue;
            }
            // smallest q gives the smallest eigenvalue for this p
            let q_first = qmin.max(1 - alpha);
            if 2 * (q_first + alpha) * pb > hi {
                break;
            }
            let q_lo = (div_ceil(lo, 2 * pb) - alpha).max(q_first);
            let q_hi = hi / (2 * pb) - alpha;
            for q in q_lo..=q_hi {
                out.push(FormIndex { n, j, p, q, kind });
            }
            p += 1;
        }
    }
    out.sort();
    Ok(out)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

/// The shell `H_i`; boundary eigenvalues `i^2` belong to shells `i` and `i + 1`.
pub fn shell(n: usize, j: usize, i: u64) -> Result<SpectralShell> {
    if i == 0 {
        return Err(Error::InvalidArgument("shell index must be at least 1".into()));
    }
    let members = indices_with_eigenvalue_sq(n, j, (i - 1) * (i - 1), i * i)?;
    Ok(SpectralShell { i, members })
}

/// Valid indices with `p <= pmax` and `q <= qmax`.
pub fn indices_in_box(n: usize, j: usize, pmax: i64, qmax: i64) -> Result<Vec<FormIndex>> {
    check_nj(n, j)?;
    let (pmin, qmin) = index_floor(n, j);
    let mut out = Vec::new();
    for p in pmin..=pmax {
        for q in qmin..=qmax {
            for kind in [Kind::Phi, Kind::Psi] {
                if let Ok(idx) = FormIndex::new(n, j, p, q, kind) {
                    out.push(idx);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi(n: usize, j: usize, p: i64, q: i64) -> FormIndex {
        FormIndex::phi(n, j, p, q).unwrap()
    }
    fn psi(n: usize, j: usize, p: i64, q: i64) -> FormIndex {
        FormIndex::psi(n, j, p, q).unwrap()
    }

    #[test]
    fn validity_table() {
        assert!(is_valid_index(3, 0, 0, 0, Kind::Phi).unwrap());
        assert!(!is_valid_index(3, 1, -1, 1, Kind::Psi).unwrap());
        assert!(is_valid_index(3, 2, -1, 1, Kind::Psi).unwrap());
        assert!(!is_valid_index(3, 2, 0, 1, Kind::Phi).unwrap());
        assert!(!is_valid_index(3, 0, 0, 1, Kind::Psi).unwrap());
        assert!(is_valid_index(1, 0, 0, 0, Kind::Phi).is_err());
        assert!(is_valid_index(3, 3, 0, 0, Kind::Phi).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue_sq(&phi(3, 1, 0, 1)), 4);
        assert_eq!(eigenvalue_sq(&phi(3, 0, 5, 0)), 0);
        assert_eq!(eigenvalue_sq(&psi(3, 1, 0, 1)), 4);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(&phi(3, 1, 0, 1)), BigUint::from(3u32));
        assert_eq!(dimension(&phi(2, 0, 1, 1)), BigUint::from(3u32));
        assert_eq!(dimension(&phi(3, 1, 1, 1)), BigUint::from(6u32));
        assert_eq!(dimension(&phi(3, 1, 0, 2)), BigUint::from(8u32));
        // harmonic polynomials of bidegree (p, 0) are C(p+n-1, n-1) in number
        for n in 2..6 {
            for p in 0..6 {
                let expect = binomial(p + n as i64 - 1, n as i64 - 1);
                assert_eq!(BigInt::from(dimension(&phi(n, 0, p, 0))), expect);
            }
            assert_eq!(dimension(&psi(n, n - 1, -1, 1)), BigUint::one());
        }
    }

    #[test]
    fn dimension_agrees_with_weyl() {
        for n in 2..=5 {
            for j in 0..n {
                for idx in indices_in_box(n, j, 5, 5).unwrap() {
                    let w = highest_weight(&idx);
                    assert_eq!(weyl_dimension(&w), Some(dimension(&idx)), "{idx}");
                }
            }
        }
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge_dual(&phi(3, 1, 0, 1)), psi(3, 1, 0, 1));
        assert_eq!(hodge_dual(&psi(3, 2, 0, 1)), phi(3, 0, 0, 1));
    }

    #[test]
    fn shell_examples() {
        let s = shell(3, 1, 2).unwrap();
        assert_eq!(s.members, vec![phi(3, 1, 0, 1), psi(3, 1, 0, 1)]);
        assert!(shell(3, 1, 1).unwrap().members.is_empty());
        assert!(shell(3, 1, 0).is_err());
    }

    #[test]
    fn shells_match_brute_force() {
        for n in 2..=4 {
            for j in 0..n {
                for i in 1..=9u64 {
                    let s = shell(n, j, i).unwrap();
                    let lo = (i - 1) * (i - 1);
                    let hi = i * i;
                    let brute: Vec<FormIndex> = indices_in_box(n, j, 60, 60)
                        .unwrap()
                        .into_iter()
                        .filter(|x| {
                            let l = eigenvalue_sq(x);
                            l > 0 && l >= lo && l <= hi
                        })
                        .collect();
                    assert_eq!(s.members, brute, "n={n} j={j} i={i}");
                }
            }
        }
    }

    #[test]
    fn collection_ratios() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        let d = |x: &FormIndex| BigRational::from_integer(BigInt::from(dimension(x)));
        for n in 2..=5usize {
            let ni = n as i64;
            for j in 0..n - 1 {
                let ji = j as i64;
                for p in 0..=50 {
                    for q in 1..=50 {
                        let lpq = lambda_sq(n, ji, p, q);
                        if FormIndex::phi(n, j, p, q).is_ok() && lpq != 0 {
                            assert_eq!(
                                r(lambda_sq(n, ji, p + 1, q), lpq),
                                r(p + ni - ji, p + ni - ji - 1)
                            );
                            assert_eq!(
                                r(lambda_sq(n, ji, p, q + 1), lpq),
                                r(q + 1 + ji, q + ji)
                            );
                            let base = phi(n, j, p, q);
                            assert_eq!(
                                d(&phi(n, j, p + 1, q)) / d(&base),
                                r(p + q + ni, p + q + ni - 1) * r(p + ni, p + ni - ji)
                                    * r(p + ni - ji - 1, p + 1)
                            );
                            assert_eq!(
                                d(&phi(n, j, p, q + 1)) / d(&base),
                                r(p + q + ni, p + q + ni - 1) * r(q + ji, q)
                                    * r(q + ni - 1, q + ji + 1)
                            );
                            if let Ok(up) = FormIndex::psi(n, j + 1, p, q) {
                                assert_eq!(
                                    d(&psi(n, j + 1, p + 1, q)) / d(&up),
                                    d(&phi(n, j, p + 1, q)) / d(&base)
                                );
                                assert_eq!(
                                    d(&psi(n, j + 1, p, q + 1)) / d(&up),
                                    d(&phi(n, j, p, q + 1)) / d(&base)
                                );
                            }
                            if j >= 1 {
                                assert_eq!(
                                    d(&psi(n, j, p, q)) / d(&base),
                                    r(ji, ni - 1 - ji) * r(p + ni - ji - 1, p + ni - ji)
                                        * r(q + ji, q + ji - 1)
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    fn arb_index() -> impl Strategy<Value = FormIndex> {
        (2usize..=6, 0usize..6, -1i64..30, 0i64..30, prop::bool::ANY).prop_filter_map(
            "valid index",
            |(n, j, p, q, k)| {
                let kind = if k { Kind::Phi } else { Kind::Psi };
                FormIndex::new(n, j % n, p, q, kind).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn hodge_is_an_involution(idx in arb_index()) {
            let d = hodge_dual(&idx);
            prop_assert!(FormIndex::new(d.n(), d.j(), d.p(), d.q(), d.kind()).is_ok());
            prop_assert_eq!(hodge_dual(&d), idx);
            prop_assert_eq!(dimension(&d), dimension(&idx));
            prop_assert_eq!(eigenvalue_sq(&d), eigenvalue_sq(&idx));
        }

        #[test]
        fn eigenvalue_symmetry(n in 2usize..7, j in 0usize..6, p in 0i64..40, q in 1i64..40) {
            let j = j % (n - 1);
            let jj = j as i64;
            prop_assert_eq!(
                lambda_sq(n, jj, p, q),
                lambda_sq(n, n as i64 - 2 - jj, q - 1, p + 1)
            );
        }

        #[test]
        fn eigenvalue_parity_and_kernel(idx in arb_index()) {
            let l = eigenvalue_sq(&idx);
            prop_assert_eq!(l % 2, 0);
            let (n, j) = (idx.n(), idx.j());
            if j > 0 && j < n - 1 {
                prop_assert!(l >= 2);
            } else if j == 0 {
                prop_assert_eq!(l == 0, idx.q() == 0);
            } else {
                prop_assert_eq!(l == 0, idx.p() == -1);
            }
        }

        #[test]
        fn phi_and_psi_dimensions_match(n in 2usize..7, j in 0usize..6, p in 0i64..30, q in 1i64..30) {
            let j = j % (n - 1);
            let a = FormIndex::phi(n, j, p, q).unwrap();
            let b = FormIndex::psi(n, j + 1, p, q).unwrap();
            prop_assert_eq!(dimension(&a), dimension(&b));
        }

        #[test]
        fn shells_two_apart_are_disjoint(n in 2usize..5, j in 0usize..4, i in 1u64..30) {
            let j = j % n;
            let a = shell(n, j, i).unwrap();
            let b = shell(n, j, i + 2).unwrap();
            prop_assert!(a.members.iter().all(|x| !b.members.contains(x)));
            for x in &a.members {
                let l = eigenvalue_sq(x);
                prop_assert!((i - 1) * (i - 1) <= l && l <= i * i);
            }
        }
    }
}

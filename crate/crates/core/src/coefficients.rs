//! Closed-form multiplication coefficients.
//!
//! Multiplying the reproducing kernel of a component by `<z,w>` (direction
//! `Z`) or by its conjugate (direction `ZBar`) yields a combination of at most
//! three neighbouring kernels; `coeff` returns the weights and `epsilon`
//! composes the two directions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{int, Rational};
use crate::spectrum::{dimension, FormIndex, Kind};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// Multiplication by `<z, w>`.
    Z,
    /// Multiplication by `conj <z, w>`.
    ZBar,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Z => "Z",
            Direction::ZBar => "ZBAR",
        }
    }

    pub fn reverse(self) -> Direction {
        match self {
            Direction::Z => Direction::ZBar,
            Direction::ZBar => Direction::Z,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Direction::Z),
            "zbar" => Ok(Direction::ZBar),
            _ => Err(Error::InvalidArgument(format!("unknown direction {s:?}"))),
        }
    }
}

/// `num / den` with `0/0` read as one.
fn frac(num: i64, den: i64) -> Rational {
    if num == 0 && den == 0 {
        return Rational::one();
    }
    assert!(den != 0, "vanishing denominator {num}/{den}");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The coefficient of `K_dst` in `<z,w> K_src` (or its conjugate).
/// Invalid or unrelated destinations give zero.
pub fn coeff(direction: Direction, src: &FormIndex, dst: &FormIndex) -> Rational {
    if src.n() != dst.n() || src.j() != dst.j() {
        return Rational::zero();
    }
    let (n, j, p, q) = (src.n() as i64, src.j() as i64, src.p(), src.q());
    let dp = dst.p() - p;
    let dq = dst.q() - q;
    use Direction::*;
    use Kind::*;
    match (direction, src.kind(), dst.kind(), dp, dq) {
        (Z, Phi, Phi, 1, 0) => frac(p + 1, p + q + n),
        (Z, Phi, Phi, 0, -1) => frac(q + n - 2, p + q + n - 2),
        (Z, Phi, Psi, 0, 0) => frac(n - 1 - j, (q + j) * (p + n - 1 - j)),
        (Z, Psi, Psi, 1, 0) => frac(p + n + 1 - j, p + q + n) * frac(p + 1, p + n - j),
        (Z, Psi, Psi, 0, -1) => frac(q + n - 2, p + q + n - 2) * frac(q - 2 + j, q - 1 + j),
        (ZBar, Phi, Phi, 0, 1) => frac(q + 1 + j, p + q + n) * frac(q, q + j),
        (ZBar, Phi, Phi, -1, 0) => {
            frac(p + n - 1, p + q + n - 2) * frac(p + n - 2 - j, p + n - 1 - j)
        }
        (ZBar, Psi, Psi, -1, 0) => frac(p + n - 1, p + q + n - 2),
        (ZBar, Psi, Psi, 0, 1) => frac(q, p + q + n),
        (ZBar, Psi, Phi, 0, 0) => frac(j, (q - 1 + j) * (p + n - j)),
        _ => Rational::zero(),
    }
}

/// Destinations that the table can reach from `src`, valid or not filtered.
fn candidate_shifts(direction: Direction, kind: Kind) -> &'static [(i64, i64, Kind)] {
    use Kind::*;
    match (direction, kind) {
        (Direction::Z, Phi) => &[(1, 0, Phi), (0, -1, Phi), (0, 0, Psi)],
        (Direction::Z, Psi) => &[(1, 0, Psi), (0, -1, Psi)],
        (Direction::ZBar, Phi) => &[(0, 1, Phi), (-1, 0, Phi)],
        (Direction::ZBar, Psi) => &[(-1, 0, Psi), (0, 1, Psi), (0, 0, Phi)],
    }
}

/// Valid destinations with a nonzero coefficient.
pub fn support(direction: Direction, src: &FormIndex) -> Vec<FormIndex> {
    let mut out: Vec<FormIndex> = candidate_shifts(direction, src.kind())
        .iter()
        .filter_map(|&(dp, dq, k)| src.sibling(src.p() + dp, src.q() + dq, k))
        .filter(|dst| !coeff(direction, src, dst).is_zero())
        .collect();
    out.sort();
    out
}

/// Every valid index of either kind within two steps of `src` in `p` and `q`;
/// the table vanishes outside the support, which oracle checks confirm.
pub fn candidate_destinations(src: &FormIndex) -> Vec<FormIndex> {
    let mut out = Vec::new();
    for dp in -2..=2 {
        for dq in -2..=2 {
            for kind in [Kind::Phi, Kind::Psi] {
                if let Some(dst) = src.sibling(src.p() + dp, src.q() + dq, kind) {
                    out.push(dst);
                }
            }
        }
    }
    out.sort();
    out
}

/// All nonzero entries of one row of the coefficient table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub source: FormIndex,
    pub direction: Direction,
    pub entries: BTreeMap<FormIndex, Rational>,
}

pub fn coeff_table(direction: Direction, src: &FormIndex) -> CoeffTable {
    let entries = support(direction, src)
        .into_iter()
        .map(|dst| {
            let c = coeff(direction, src, &dst);
            (dst, c)
        })
        .collect();
    CoeffTable {
        source: *src,
        direction,
        entries,
    }
}

fn compose(first: Direction, src: &FormIndex, dst: &FormIndex) -> Rational {
    let mut acc = Rational::zero();
    for mid in support(first, src) {
        let b = coeff(first.reverse(), &mid, dst);
        if !b.is_zero() {
            acc += coeff(first, src, &mid) * b;
        }
    }
    acc
}

/// Coefficient of `K_dst` in `|<z,w>|^2 K_src`, composing `ZBar` then `Z`.
pub fn epsilon(src: &FormIndex, dst: &FormIndex) -> Rational {
    compose(Direction::ZBar, src, dst)
}

/// The same composition taken in the other order; equal to `epsilon`.
pub fn epsilon_z_first(src: &FormIndex, dst: &FormIndex) -> Rational {
    compose(Direction::Z, src, dst)
}

/// The diagonal coefficient written as the displayed two-term sums.
pub fn epsilon_diagonal_closed_form(src: &FormIndex) -> Rational {
    let (p, q, k) = (src.p(), src.q(), src.kind());
    let term = |mid: Option<FormIndex>, first: Direction| -> Rational {
        match mid {
            Some(m) => coeff(first, src, &m) * coeff(first.reverse(), &m, src),
            None => Rational::zero(),
        }
    };
    match k {
        Kind::Phi => {
            term(src.sibling(p, q + 1, Kind::Phi), Direction::ZBar)
                + term(src.sibling(p - 1, q, Kind::Phi), Direction::ZBar)
        }
        Kind::Psi => {
            term(src.sibling(p + 1, q, Kind::Psi), Direction::Z)
                + term(src.sibling(p, q - 1, Kind::Psi), Direction::Z)
        }
    }
}

/// `(1 - eps) (2 + p + q)^2 / ((2 + p)(2 + q))`, the quantity bounded above
/// by an absolute constant times one.
pub fn conti_ratio(src: &FormIndex) -> Rational {
    let (p, q) = (src.p(), src.q());
    (Rational::one() - epsilon(src, src)) * int((2 + p + q) * (2 + p + q))
        / int((2 + p) * (2 + q))
}

/// `sum_dst dim(dst)/dim(src) * coeff(direction, src, dst)`; equals one.
pub fn destination_sum(direction: Direction, src: &FormIndex) -> Rational {
    let ds = Rational::from_integer(BigInt::from(dimension(src)));
    support(direction, src)
        .iter()
        .map(|dst| {
            Rational::from_integer(BigInt::from(dimension(dst))) / &ds * coeff(direction, src, dst)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

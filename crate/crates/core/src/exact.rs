//! Exact scalars: big rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n / d` as a big rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serializes a rational as `"a/b"`, always with an explicit denominator.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, `"a"` or a decimal literal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Rational::new(a, b));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Some(if neg { -r } else { r });
    }
    Some(Rational::from_integer(s.parse().ok()?))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

const FACTORIAL_CACHE: usize = 512;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_CACHE);
        t.push(BigInt::one());
        for k in 1..FACTORIAL_CACHE {
            let next = &t[k - 1] * BigInt::from(k);
            t.push(next);
        }
        t
    })
}

pub fn factorial(k: usize) -> BigInt {
    let table = factorial_table();
    if k < table.len() {
        return table[k].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for m in table.len()..=k {
        acc *= BigInt::from(m);
    }
    acc
}

/// Binomial coefficient with `C(n, k) = 0` outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CRational {
    pub re: Rational,
    pub im: Rational,
}

impl CRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self::real(int(k))
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Rational {
        if self.im.is_zero() {
            return &self.re * &self.re;
        }
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if self.im.is_zero() {
            return Self::real(&self.re * r);
        }
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let d = self.norm_sqr();
        Some(Self::new(&self.re / &d, -&self.im / &d))
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Exact integer power.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn mul_ref(&self, o: &Self) -> Self {
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => Self::real(&self.re * &o.re),
            (true, false) => Self::new(&self.re * &o.re, &self.re * &o.im),
            (false, true) => Self::new(&self.re * &o.re, &self.im * &o.re),
            (false, false) => Self::new(
                &self.re * &o.re - &self.im * &o.im,
                &self.re * &o.im + &self.im * &o.re,
            ),
        }
    }
}

impl Zero for CRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", rational_string(&self.re));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{}i",
            rational_string(&self.re),
            sign,
            rational_string(&self.im.abs())
        )
    }
}

impl From<Rational> for CRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-self.re, -self.im)
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-&self.re, -&self.im)
    }
}

impl Add<&CRational> for &CRational {
    type Output = CRational;
    fn add(self, o: &CRational) -> CRational {
        CRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub<&CRational> for &CRational {
    type Output = CRational;
    fn sub(self, o: &CRational) -> CRational {
        CRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul<&CRational> for &CRational {
    type Output = CRational;
    fn mul(self, o: &CRational) -> CRational {
        self.mul_ref(o)
    }
}

impl Div<&CRational> for &CRational {
    type Output = CRational;
    fn div(self, o: &CRational) -> CRational {
        self.mul_ref(&o.inv().expect("division by zero"))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CRational> for CRational {
            type Output = CRational;
            fn $m(self, o: CRational) -> CRational {
                (&self).$m(&o)
            }
        }
        impl $tr<&CRational> for CRational {
            type Output = CRational;
            fn $m(self, o: &CRational) -> CRational {
                (&self).$m(o)
            }
        }
        impl $tr<CRational> for &CRational {
            type Output = CRational;
            fn $m(self, o: CRational) -> CRational {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&CRational> for CRational {
    fn add_assign(&mut self, o: &CRational) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl AddAssign<CRational> for CRational {
    fn add_assign(&mut self, o: CRational) {
        *self += &o;
    }
}

impl SubAssign<&CRational> for CRational {
    fn sub_assign(&mut self, o: &CRational) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl MulAssign<&CRational> for CRational {
    fn mul_assign(&mut self, o: &CRational) {
        *self = self.mul_ref(o);
    }
}

//! Exact dyadic rationals, outward-rounded intervals, dyadic cells and
//! binary digit streams.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `num / 2^level`, kept with `num` odd or `level = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    level: u32,
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, level: u32) -> Self {
        let mut num = num.into();
        let mut level = level;
        if num.is_zero() {
            return Dyadic::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(level as u64) as u32;
        if tz > 0 {
            num >>= tz as usize;
            level -= tz;
        }
        Dyadic { num, level }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            level: 0,
        }
    }

    pub fn int(k: i64) -> Self {
        Dyadic::new(k, 0)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            level: self.level,
        }
    }

    /// Numerator over `2^level` for any `level ≥ self.level`.
    fn scaled(&self, level: u32) -> BigInt {
        &self.num << (level - self.level) as usize
    }

    /// `self · 2^e`.
    pub fn mul_pow2(&self, e: i32) -> Self {
        if e >= 0 {
            Dyadic::new(&self.num << e as usize, self.level)
        } else if (-e) as u32 <= self.level {
            Dyadic::new(self.num.clone(), self.level - (-e) as u32)
        } else {
            Dyadic::new(self.num.clone(), self.level + (-e) as u32)
        }
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num.clone(), self.level + 1)
    }

    /// Largest multiple of `2^-prec` not above `self`.
    pub fn floor_at(&self, prec: u32) -> Self {
        if self.level <= prec {
            return self.clone();
        }
        Dyadic::new(self.num.div_floor(&pow2(self.level - prec)), prec)
    }

    /// Smallest multiple of `2^-prec` not below `self`.
    pub fn ceil_at(&self, prec: u32) -> Self {
        if self.level <= prec {
            return self.clone();
        }
        Dyadic::new(self.num.div_ceil(&pow2(self.level - prec)), prec)
    }

    /// `floor(self · 2^level)` as an integer.
    pub fn floor_scaled(&self, level: u32) -> BigInt {
        if self.level <= level {
            self.scaled(level)
        } else {
            self.num.div_floor(&pow2(self.level - level))
        }
    }

    /// `ceil(self · 2^level)` as an integer.
    pub fn ceil_scaled(&self, level: u32) -> BigInt {
        if self.level <= level {
            self.scaled(level)
        } else {
            self.num.div_ceil(&pow2(self.level - level))
        }
    }

    /// `num/den` rounded down to a multiple of `2^-prec`.
    pub fn ratio_floor(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        Dyadic::new((num << prec as usize).div_floor(den), prec)
    }

    pub fn ratio_ceil(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        Dyadic::new((num << prec as usize).div_ceil(den), prec)
    }

    /// Lower and upper `2^-prec` bounds on `1/self`; `None` at zero.
    pub fn recip_bounds(&self, prec: u32) -> Option<(Dyadic, Dyadic)> {
        if self.is_zero() {
            return None;
        }
        let (num, den) = (pow2(self.level), self.num.clone());
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        Some((
            Dyadic::ratio_floor(&num, &den, prec),
            Dyadic::ratio_ceil(&num, &den, prec),
        ))
    }

    /// Lower and upper `2^-prec` bounds on `√self` for `self ≥ 0`.
    pub fn sqrt_bounds(&self, prec: u32) -> Option<(Dyadic, Dyadic)> {
        if self.is_negative() {
            return None;
        }
        let v = self.floor_scaled(2 * prec);
        let s = v.sqrt();
        let lo = Dyadic::new(s.clone(), prec);
        let hi = if &s * &s == v && self.level <= 2 * prec {
            lo.clone()
        } else {
            Dyadic::new(s + 1, prec)
        };
        Some((lo, hi))
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n / 2f64.powi(self.level as i32)
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b { a.clone() } else { b.clone() }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b { a.clone() } else { b.clone() }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.level.max(other.level);
        self.scaled(l).cmp(&other.scaled(l))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let l = self.level.max(rhs.level);
        Dyadic::new(self.scaled(l) + rhs.scaled(l), l)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let l = self.level.max(rhs.level);
        Dyadic::new(self.scaled(l) - rhs.scaled(l), l)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.level + rhs.level)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            level: self.level,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl From<i64> for Dyadic {
    fn from(k: i64) -> Self {
        Dyadic::int(k)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, pow2(self.level))
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `k` or `k/2^N` written as `k/N'` with `N'` a power of two.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not a dyadic rational: {s:?}"));
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if !den.is_positive() || (&den & (&den - 1u32)) != BigInt::zero() {
            return Err(bad());
        }
        let level = den.bits() as u32 - 1;
        Ok(Dyadic::new(num, level))
    }
}

/// Closed interval with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).half()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    /// Closed intervals meet.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `∞`-distance from a point, zero inside.
    pub fn dist(&self, x: &Dyadic) -> Dyadic {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            Dyadic::zero()
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = p.iter().min().expect("four products").clone();
        let hi = p.iter().max().expect("four products").clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &Dyadic) -> Interval {
        self.mul(&Interval::point(c.clone()))
    }

    pub fn square(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Interval::new(Dyadic::zero(), Dyadic::max(&a, &b))
        } else {
            Interval::new(Dyadic::min(&a, &b), Dyadic::max(&a, &b))
        }
    }

    /// Enclosure of `√x` over the interval, rounded outward to `2^-prec`.
    pub fn sqrt(&self, prec: u32) -> Option<Interval> {
        let lo = self.lo.sqrt_bounds(prec)?.0;
        let hi = self.hi.sqrt_bounds(prec)?.1;
        Some(Interval::new(lo, hi))
    }

    /// Enclosure of `1/x`; `None` when the interval contains zero.
    pub fn recip(&self, prec: u32) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let lo = self.hi.recip_bounds(prec)?.0;
        let hi = self.lo.recip_bounds(prec)?.1;
        Some(Interval::new(lo, hi))
    }

    /// Widens the endpoints outward to multiples of `2^-prec`.
    pub fn round_out(&self, prec: u32) -> Interval {
        Interval::new(self.lo.floor_at(prec), self.hi.ceil_at(prec))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Closed cell `∏ [k_i/2^N, (k_i+1)/2^N]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCell {
    level: u32,
    corner: Vec<i64>,
}

impl DyadicCell {
    pub fn new(level: u32, corner: Vec<i64>) -> Self {
        assert!(!corner.is_empty(), "cell dimension must be positive");
        DyadicCell { level, corner }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn corner(&self) -> &[i64] {
        &self.corner
    }

    pub fn side(&self) -> Dyadic {
        Dyadic::new(1, self.level)
    }

    pub fn interval(&self, i: usize) -> Interval {
        Interval::new(
            Dyadic::new(self.corner[i], self.level),
            Dyadic::new(self.corner[i] + 1, self.level),
        )
    }

    pub fn to_box(&self) -> Vec<Interval> {
        (0..self.dim()).map(|i| self.interval(i)).collect()
    }

    pub fn lower_corner(&self) -> Vec<Dyadic> {
        self.corner.iter().map(|&k| Dyadic::new(k, self.level)).collect()
    }

    pub fn children(&self) -> Vec<DyadicCell> {
        let d = self.dim();
        (0..1u32 << d)
            .map(|m| {
                DyadicCell::new(
                    self.level + 1,
                    (0..d)
                        .map(|i| 2 * self.corner[i] + i64::from(m >> (d - 1 - i) & 1))
                        .collect(),
                )
            })
            .collect()
    }

    /// Cell of the given coarser or equal level containing this one.
    pub fn ancestor(&self, level: u32) -> DyadicCell {
        assert!(level <= self.level);
        let s = self.level - level;
        DyadicCell::new(level, self.corner.iter().map(|k| k >> s).collect())
    }

    /// All descendants at a finer or equal level.
    pub fn refine(&self, level: u32) -> Vec<DyadicCell> {
        assert!(level >= self.level);
        let s = level - self.level;
        let lo: Vec<i64> = self.corner.iter().map(|k| k << s).collect();
        let n = 1i64 << s;
        box_cells(level, &lo, &lo.iter().map(|k| k + n - 1).collect::<Vec<_>>())
    }

    pub fn contains_point(&self, x: &[Dyadic]) -> bool {
        x.iter().enumerate().all(|(i, v)| self.interval(i).contains(v))
    }

    /// Closed cells meet (touching counts).
    pub fn meets(&self, other: &DyadicCell) -> bool {
        let l = self.level.max(other.level);
        let (sa, sb) = (l - self.level, l - other.level);
        self.corner.iter().zip(&other.corner).all(|(&a, &b)| {
            let (a, b) = (i128::from(a) << sa, i128::from(b) << sb);
            a <= b + (1i128 << sb) && b <= a + (1i128 << sa)
        })
    }

    pub fn meets_box(&self, b: &[Interval]) -> bool {
        (0..self.dim()).all(|i| self.interval(i).meets(&b[i]))
    }

    /// `∞`-distance from a point.
    pub fn dist(&self, x: &[Dyadic]) -> Dyadic {
        (0..self.dim())
            .map(|i| self.interval(i).dist(&x[i]))
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    /// Digit streams of the lower corner, ending in zeros.
    pub fn lower_corner_reps(&self) -> Vec<BinaryRep> {
        self.corner
            .iter()
            .map(|&k| BinaryRep::of_fraction(k, self.level))
            .collect()
    }
}

impl fmt::Display for DyadicCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.corner.iter().map(|k| k.to_string()).collect();
        write!(f, "cell {} {}", self.level, c.join(","))
    }
}

/// Cells of one level with corners in the inclusive range `lo..=hi`.
pub fn box_cells(level: u32, lo: &[i64], hi: &[i64]) -> Vec<DyadicCell> {
    let mut out = Vec::new();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return out;
    }
    let mut cur = lo.to_vec();
    loop {
        out.push(DyadicCell::new(level, cur.clone()));
        let mut i = cur.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

/// Cells of `level` meeting the closed box.
pub fn cells_meeting(level: u32, b: &[Interval]) -> Vec<DyadicCell> {
    let to_i64 = |x: BigInt| x.to_i64().expect("cell index fits in i64");
    let lo: Vec<i64> = b.iter().map(|iv| to_i64(iv.lo.ceil_scaled(level)) - 1).collect();
    let hi: Vec<i64> = b.iter().map(|iv| to_i64(iv.hi.floor_scaled(level))).collect();
    box_cells(level, &lo, &hi)
        .into_iter()
        .filter(|c| c.meets_box(b))
        .collect()
}

/// A real number as `int_part + Σ digits[i] 2^{-(i+1)}`, with the digit
/// sequence eventually constant at `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryRep {
    pub int_part: i64,
    pub digits: Vec<bool>,
    pub tail: bool,
}

impl BinaryRep {
    /// Finite expansion of `k/2^level`.
    pub fn of_fraction(k: i64, level: u32) -> Self {
        let int_part = k >> level;
        let frac = k - (int_part << level);
        BinaryRep {
            int_part,
            digits: (0..level).rev().map(|b| frac >> b & 1 == 1).collect(),
            tail: false,
        }
    }

    /// Both expansions of a dyadic: the finite one and, unless the value is
    /// an integer shifted below zero digits, the one ending in ones.
    pub fn expansions(x: &Dyadic) -> Vec<BinaryRep> {
        let k = x.num().to_i64().expect("dyadic numerator fits in i64");
        let fin = BinaryRep::of_fraction(k, x.level());
        let mut alt = BinaryRep::of_fraction(k - 1, x.level());
        alt.tail = true;
        vec![fin, alt]
    }

    pub fn digit(&self, i: usize) -> bool {
        self.digits.get(i).copied().unwrap_or(self.tail)
    }

    /// The closed interval of all reals whose expansion begins with the
    /// integer part and the first `n` digits.
    pub fn prefix_interval(&self, n: u32) -> Interval {
        let mut k = BigInt::from(self.int_part);
        for i in 0..n as usize {
            k = (k << 1usize) + u32::from(self.digit(i));
        }
        let lo = Dyadic::new(k.clone(), n);
        Interval::new(lo, Dyadic::new(k + 1, n))
    }

    pub fn value(&self) -> Option<Dyadic> {
        if self.tail {
            return None;
        }
        Some(self.prefix_interval(self.digits.len() as u32).lo)
    }
}

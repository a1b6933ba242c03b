//! Domain points of `[a, b]` with representation-level rationality.
//!
//! A [`Point`] is either an exact rational `p/q` or a plain binary float.
//! Rationality is a property of how the point was *constructed*, not of
//! its floating value: asking whether an `f64` "is rational" is
//! meaningless, so indicator-style integrands branch on the
//! representation instead. Uniform grids over rational endpoints stay
//! rational, which keeps partition-point identity exact under merge and
//! refinement.

use std::cmp::Ordering;
use std::fmt;

use num::rational::Ratio;
use num::traits::ToPrimitive;

use crate::error::{Error, Result};

/// A point of the domain interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    /// Exact rational, always kept in reduced form by `Ratio`.
    Rational(Ratio<i64>),
    /// A plain float; treated as non-rational by representation.
    Real(f64),
}

impl Point {
    /// Exact rational `p/q`. Errors on a zero denominator.
    pub fn rational(p: i64, q: i64) -> Result<Point> {
        if q == 0 {
            return Err(Error::Domain("rational point with zero denominator".into()));
        }
        Ok(Point::Rational(Ratio::new(p, q)))
    }

    /// A plain float point. Must be finite.
    pub fn real(v: f64) -> Point {
        debug_assert!(v.is_finite());
        Point::Real(v)
    }

    pub fn zero() -> Point {
        Point::Rational(Ratio::new(0, 1))
    }

    pub fn one() -> Point {
        Point::Rational(Ratio::new(1, 1))
    }

    /// Floating value of the point.
    pub fn value(self) -> f64 {
        match self {
            Point::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Point::Real(v) => v,
        }
    }

    /// Rationality by representation.
    pub fn is_rational(self) -> bool {
        matches!(self, Point::Rational(_))
    }

    pub fn as_ratio(self) -> Option<Ratio<i64>> {
        match self {
            Point::Rational(r) => Some(r),
            Point::Real(_) => None,
        }
    }

    /// Ordering by floating value. Distinct representations with equal
    /// values compare equal here; partition constructors reject that
    /// configuration up front.
    pub fn cmp_value(self, other: Point) -> Ordering {
        self.value().total_cmp(&other.value())
    }

    /// Midpoint, exact when both endpoints are rational and the result
    /// fits in `i64` arithmetic.
    pub fn midpoint(a: Point, b: Point) -> Point {
        if let (Point::Rational(x), Point::Rational(y)) = (a, b) {
            if let Some(m) = checked_ratio_midpoint(x, y) {
                return Point::Rational(m);
            }
        }
        Point::Real(0.5 * (a.value() + b.value()))
    }

    /// `a + t*(b - a)` with `t = num/den`, exact on rationals when it fits.
    pub fn affine(a: Point, b: Point, num: i64, den: i64) -> Point {
        if let (Point::Rational(x), Point::Rational(y)) = (a, b) {
            if let Some(p) = checked_ratio_affine(x, y, num, den) {
                return Point::Rational(p);
            }
        }
        let t = num as f64 / den as f64;
        Point::Real(a.value() + t * (b.value() - a.value()))
    }

    /// Parses the point grammar used by the CLI: integers (`1`), exact
    /// fractions (`1/3`), exact decimals (`0.25`) and floats marked
    /// non-rational with a leading `~` (`~0.7071`).
    pub fn parse(s: &str) -> Result<Point> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('~') {
            let v: f64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad real point '{s}'")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite point '{s}'")));
            }
            return Ok(Point::Real(v));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
            let q: i64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
            return Point::rational(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let sign = if int.trim_start().starts_with('-') { -1i64 } else { 1 };
            let int: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse()
                    .map_err(|_| Error::Parse(format!("bad decimal '{s}'")))?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
                return Err(Error::Parse(format!("bad decimal '{s}'")));
            }
            let digits: i64 = frac
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal '{s}'")))?;
            let den = 10i64.pow(frac.len() as u32);
            return Ok(Point::Rational(
                Ratio::new(int, 1) + Ratio::new(sign * digits, den),
            ));
        }
        let p: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad point '{s}'")))?;
        Ok(Point::Rational(Ratio::new(p, 1)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Point::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Point::Real(v) => write!(f, "~{v}"),
        }
    }
}

fn checked_ratio_midpoint(x: Ratio<i64>, y: Ratio<i64>) -> Option<Ratio<i64>> {
    let n = (*x.numer() as i128) * (*y.denom() as i128) + (*y.numer() as i128) * (*x.denom() as i128);
    let d = 2i128 * (*x.denom() as i128) * (*y.denom() as i128);
    ratio_from_i128(n, d)
}

fn checked_ratio_affine(x: Ratio<i64>, y: Ratio<i64>, num: i64, den: i64) -> Option<Ratio<i64>> {
    if den == 0 {
        return None;
    }
    // x + (num/den)*(y - x), all in i128 before reduction.
    let xd = *x.denom() as i128;
    let yd = *y.denom() as i128;
    let xn = *x.numer() as i128;
    let yn = *y.numer() as i128;
    let diff_n = yn * xd - xn * yd;
    let diff_d = xd * yd;
    let n = xn
        .checked_mul(diff_d)?
        .checked_mul(den as i128)?
        .checked_add(diff_n.checked_mul(num as i128)?.checked_mul(xd)?)?;
    let d = xd.checked_mul(diff_d)?.checked_mul(den as i128)?;
    ratio_from_i128(n, d)
}

fn ratio_from_i128(n: i128, d: i128) -> Option<Ratio<i64>> {
    if d == 0 {
        return None;
    }
    let g = gcd_i128(n.unsigned_abs(), d.unsigned_abs());
    let (mut n, mut d) = (n / g as i128, d / g as i128);
    if d < 0 {
        n = -n;
        d = -d;
    }
    if n >= i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
        Some(Ratio::new(n as i64, d as i64))
    } else {
        None
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// `k`-th binary digit (`k >= 1`) of `t` in `[0, 1]`, exact for both
/// representations.
///
/// Dyadic rationals take their terminating expansion, making every digit
/// right-continuous; `t = 1` is the one point with no terminating
/// expansion and uses the all-ones form.
pub fn binary_digit(t: Point, k: u32) -> u8 {
    debug_assert!(k >= 1);
    match t {
        Point::Rational(r) => {
            let p = *r.numer();
            let q = *r.denom();
            debug_assert!(p >= 0 && p <= q);
            if p == q {
                return 1; // t = 1, all-ones expansion
            }
            // Long-division digit generator: r_{i+1} = 2 r_i mod q.
            let mut rem = p as i128;
            let q = q as i128;
            let mut digit = 0u8;
            for _ in 0..k {
                rem *= 2;
                digit = (rem / q) as u8;
                rem %= q;
            }
            digit
        }
        Point::Real(v) => {
            debug_assert!((0.0..=1.0).contains(&v));
            if v == 1.0 {
                return 1;
            }
            if v <= 0.0 {
                return 0;
            }
            // v = m * 2^e exactly; digit_k = (m >> -(e+k)) & 1.
            let bits = v.to_bits();
            let exp_field = ((bits >> 52) & 0x7ff) as i64;
            let (m, e) = if exp_field == 0 {
                (bits & ((1u64 << 52) - 1), -1074i64)
            } else {
                ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), exp_field - 1075)
            };
            let shift = -(e + k as i64);
            if shift < 0 {
                0 // m * 2^(e+k) is an even integer
            } else if shift >= 64 {
                0
            } else {
                ((m >> shift) & 1) as u8
            }
        }
    }
}

/// Flips digit `k` of `t in [0, 1]`: adds `2^-k` when the digit is 0,
/// subtracts it when 1. Only digit `k` changes; the result stays in
/// `[0, 1]`. Exact for rationals and for floats when `k <= 48`.
pub fn flip_binary_digit(t: Point, k: u32) -> Point {
    let step_up = binary_digit(t, k) == 0;
    match t {
        Point::Rational(r) => {
            let delta = Ratio::new(1i64, 1i64 << k.min(62));
            Point::Rational(if step_up { r + delta } else { r - delta })
        }
        Point::Real(v) => {
            let delta = (2f64).powi(-(k as i32));
            Point::Real(if step_up { v + delta } else { v - delta })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grammar() {
        assert_eq!(Point::parse("1/3").unwrap(), Point::rational(1, 3).unwrap());
        assert_eq!(Point::parse("0.25").unwrap(), Point::rational(1, 4).unwrap());
        assert_eq!(Point::parse("1").unwrap(), Point::one());
        assert_eq!(Point::parse("~0.5").unwrap(), Point::real(0.5));
        assert!(Point::parse("1/0").is_err());
        assert!(Point::parse("x").is_err());
        // exact decimal vs rational identity
        assert_eq!(Point::parse("0.5").unwrap(), Point::rational(1, 2).unwrap());
    }

    #[test]
    fn rationality_is_representation_level() {
        assert!(Point::parse("1/3").unwrap().is_rational());
        assert!(!Point::parse("~0.3333333333333333").unwrap().is_rational());
    }

    #[test]
    fn midpoint_exact_on_rationals() {
        let m = Point::midpoint(Point::zero(), Point::rational(1, 2).unwrap());
        assert_eq!(m, Point::rational(1, 4).unwrap());
    }

    #[test]
    fn digits_of_dyadics_terminate() {
        let half = Point::rational(1, 2).unwrap();
        assert_eq!(binary_digit(half, 1), 1);
        assert_eq!(binary_digit(half, 2), 0);
        assert_eq!(binary_digit(half, 17), 0);
        let quarter = Point::rational(1, 4).unwrap();
        assert_eq!(binary_digit(quarter, 1), 0);
        assert_eq!(binary_digit(quarter, 2), 1);
        assert_eq!(binary_digit(quarter, 3), 0);
    }

    #[test]
    fn digits_of_one_third_alternate() {
        let t = Point::rational(1, 3).unwrap();
        for k in 1..=24 {
            assert_eq!(binary_digit(t, k), if k % 2 == 0 { 1 } else { 0 });
        }
    }

    #[test]
    fn digits_of_one_are_all_ones() {
        for k in 1..=24 {
            assert_eq!(binary_digit(Point::one(), k), 1);
            assert_eq!(binary_digit(Point::real(1.0), k), 1);
        }
    }

    #[test]
    fn float_digits_match_rational_digits() {
        for (p, q) in [(1i64, 2i64), (3, 8), (5, 16), (1, 4), (7, 8), (0, 1)] {
            let r = Point::rational(p, q).unwrap();
            let f = Point::real(p as f64 / q as f64);
            for k in 1..=20 {
                assert_eq!(binary_digit(r, k), binary_digit(f, k), "p/q={p}/{q} k={k}");
            }
        }
    }

    #[test]
    fn flip_changes_exactly_one_digit() {
        for t in [
            Point::rational(1, 3).unwrap(),
            Point::rational(5, 8).unwrap(),
            Point::real(0.3789341),
        ] {
            for k in 1..=16 {
                let v = flip_binary_digit(t, k);
                assert!((v.value() - t.value()).abs() <= (2f64).powi(-(k as i32)) + 1e-15);
                for j in 1..=16 {
                    if j == k {
                        assert_ne!(binary_digit(v, j), binary_digit(t, j));
                    } else {
                        assert_eq!(binary_digit(v, j), binary_digit(t, j), "t={t} k={k} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn affine_builds_exact_uniform_grid() {
        for i in 0..=10 {
            let p = Point::affine(Point::zero(), Point::one(), i, 10);
            assert_eq!(p, Point::rational(i, 10).unwrap());
        }
    }
}

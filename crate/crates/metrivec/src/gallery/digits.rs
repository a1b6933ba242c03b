//! The binary-digit function `f(t) = (c_1(t), ..., c_K(t), 0, ...)`.
//!
//! Digits use the terminating expansion at dyadic rationals, so each
//! `c_k` is right-continuous with jumps exactly at the interior
//! multiples of `2^-k`; `t = 1` takes the all-ones expansion. The
//! truncated function is constant on the level-`K` dyadic cells
//! `[j 2^-K, (j+1) 2^-K)`, which makes interval and pointwise
//! oscillation exactly computable: the pattern of cell `j` is the bit
//! string of `j`, and maximizing any shipped metric over a cell range
//! `[j1, j2]` reduces to maximizing `j ^ j'`, attained by the classic
//! `(prefix·0·1…1, prefix·1·0…0)` pair at the top differing bit.

use crate::error::{Error, Result};
use crate::integration::Integrand;
use crate::point::{binary_digit, flip_binary_digit, Point};
use crate::spaces::{Space, VectorValue};

pub struct BinaryDigitFn {
    k: u32,
    space: Space,
}

impl BinaryDigitFn {
    pub fn new(k: u32, space: Space) -> Result<BinaryDigitFn> {
        if k == 0 {
            return Err(Error::Domain("need at least one digit".into()));
        }
        if k > 48 {
            return Err(Error::Capability(
                "digit flips beyond 2^-48 are not exactly representable for float points".into(),
            ));
        }
        let prefix = space.prefix_len().ok_or_else(|| {
            Error::Capability(format!("digits:{k} needs a sequence backend, got {space}"))
        })?;
        if (prefix as u32) < k {
            return Err(Error::Capability(format!(
                "digit count {k} exceeds truncation {prefix}"
            )));
        }
        Ok(BinaryDigitFn { k, space })
    }

    pub fn digit_count(&self) -> u32 {
        self.k
    }

    /// Level-`K` cell index of `t` in `[0, 1]`; `t = 1` folds into the
    /// last cell, matching its all-ones expansion.
    pub fn cell_of(&self, t: Point) -> u64 {
        let last = (1u64 << self.k) - 1;
        match t {
            Point::Rational(r) => {
                let p = *r.numer() as i128;
                let q = *r.denom() as i128;
                let j = (p << self.k) / q;
                (j.max(0) as u64).min(last)
            }
            Point::Real(v) => {
                // Scaling by a power of two is exact.
                let scaled = v * (1u64 << self.k) as f64;
                (scaled.floor().max(0.0) as u64).min(last)
            }
        }
    }

    fn cell_range(&self, lo: Point, hi: Point) -> (u64, u64) {
        (self.cell_of(lo), self.cell_of(hi))
    }

    /// A point of `[lo, hi]` whose cell is `j`, assuming
    /// `cell_of(lo) <= j <= cell_of(hi)`.
    fn representative(&self, j: u64, lo: Point, hi: Point) -> Point {
        let left = Point::rational(j as i64, 1i64 << self.k).expect("nonzero denominator");
        if left.value() >= lo.value() {
            debug_assert!(left.value() <= hi.value());
            left
        } else {
            lo
        }
    }

    fn pattern_value(&self, j: u64) -> VectorValue {
        let m = self.space.prefix_len().unwrap();
        let mut v = vec![0.0; m];
        for (i, slot) in v.iter_mut().enumerate().take(self.k as usize) {
            // digit i+1 is bit (k-1-i) of the cell index
            *slot = ((j >> (self.k - 1 - i as u32)) & 1) as f64;
        }
        VectorValue::Prefix(v)
    }

    /// Metric distance between the patterns of two cells.
    fn cell_distance(&self, j1: u64, j2: u64) -> f64 {
        self.space
            .metric(&self.pattern_value(j1), &self.pattern_value(j2))
            .unwrap()
    }

    /// Pair of cell indices in `[j1, j2]` whose exclusive-or is the
    /// all-ones mask below the top differing bit; that pair maximizes
    /// every shipped metric over the range simultaneously.
    fn max_xor_pair(&self, j1: u64, j2: u64) -> Option<(u64, u64)> {
        if j1 >= j2 {
            return None;
        }
        let p = 63 - (j1 ^ j2).leading_zeros();
        let split = (j2 >> p) << p;
        Some((split, split - 1))
    }

    /// Distance across the jump at a breakpoint whose index has `nu`
    /// trailing zeros; the differing digits are `K-nu ..= K` regardless
    /// of the breakpoint's position.
    fn jump_of_trailing_zeros(&self, nu: u32) -> f64 {
        let j = 1u64 << nu;
        self.cell_distance(j - 1, j)
    }

    /// Largest trailing-zero count among interior level-`K` breakpoints
    /// `j 2^-K` with `j` in `[ceil(lo 2^K), floor(hi 2^K)]`.
    fn max_trailing_zeros_in(&self, lo: f64, hi: f64) -> Option<u32> {
        let scale = (1u64 << self.k) as f64;
        let j_lo = (lo * scale).ceil().max(1.0) as u64;
        let j_hi = ((hi * scale).floor() as u64).min((1u64 << self.k) - 1);
        if j_lo > j_hi {
            return None;
        }
        for nu in (0..self.k).rev() {
            let step = 1u64 << nu;
            let first = j_lo.div_ceil(step) * step;
            if first <= j_hi {
                return Some(nu);
            }
        }
        None
    }
}

impl Integrand for BinaryDigitFn {
    fn id(&self) -> String {
        format!("digits:{}", self.k)
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: Point) -> VectorValue {
        let m = self.space.prefix_len().unwrap();
        let mut v = vec![0.0; m];
        for (i, slot) in v.iter_mut().enumerate().take(self.k as usize) {
            *slot = binary_digit(t, i as u32 + 1) as f64;
        }
        VectorValue::Prefix(v)
    }

    fn bound(&self) -> Option<f64> {
        self.space.metric_of_abs_bounds(&vec![1.0; self.k as usize]).ok()
    }

    fn domain(&self) -> Option<(Point, Point)> {
        Some((Point::zero(), Point::one()))
    }

    fn has_witness(&self) -> bool {
        true
    }

    /// Flips the most significant digit whose period fits the radius;
    /// exactly one coordinate changes.
    fn best_witness(&self, t: Point, radius: f64) -> Option<Point> {
        let k = (1..=self.k).find(|k| (2f64).powi(-(*k as i32)) <= radius)?;
        Some(flip_binary_digit(t, k))
    }

    /// Max-xor cell pair of the interval, oriented so the first point
    /// carries the 1 at the top differing digit.
    fn adversary_pair(&self, lo: Point, hi: Point) -> Option<(Point, Point)> {
        let (j1, j2) = self.cell_range(lo, hi);
        let (high, low) = self.max_xor_pair(j1, j2)?;
        Some((self.representative(high, lo, hi), self.representative(low, lo, hi)))
    }

    fn high_oscillation_tag(&self, lo: Point, hi: Point, r: f64) -> Option<Point> {
        let nu = self.max_trailing_zeros_in(lo.value(), hi.value())?;
        if self.jump_of_trailing_zeros(nu) < r {
            return None;
        }
        // Any breakpoint with that trailing-zero count inside the range.
        let scale = 1u64 << self.k;
        let step = 1u64 << nu;
        let j_lo = (lo.value() * scale as f64).ceil().max(1.0) as u64;
        let j = j_lo.div_ceil(step) * step;
        Some(Point::rational(j as i64, scale as i64).unwrap())
    }

    /// Exact: the max-xor pair attains the sup of every shipped metric
    /// over the interval's cell range.
    fn interval_oscillation_sup(&self, lo: Point, hi: Point) -> Option<f64> {
        let (j1, j2) = self.cell_range(lo, hi);
        Some(match self.max_xor_pair(j1, j2) {
            Some((high, low)) => self.cell_distance(high, low),
            None => 0.0,
        })
    }

    /// Exact: `ω(f, t)` vanishes off breakpoints and equals the jump
    /// size at a breakpoint, which grows with its trailing-zero count.
    fn pointwise_oscillation_sup(&self, lo: Point, hi: Point) -> Option<f64> {
        Some(
            self.max_trailing_zeros_in(lo.value(), hi.value())
                .map(|nu| self.jump_of_trailing_zeros(nu))
                .unwrap_or(0.0),
        )
    }

    fn structure(&self) -> Option<String> {
        Some(format!(
            "first {} binary digits, terminating expansion at dyadics; \
             jumps exactly at interior multiples of 2^-{}",
            self.k, self.k
        ))
    }
}

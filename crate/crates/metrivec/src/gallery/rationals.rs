//! The rational-enumeration function: `f(r_n) = e_n` on an enumeration
//! of the rationals in `[0, 1]`, zero elsewhere.
//!
//! The enumeration walks denominators in increasing order (the Farey
//! mediant levels): `0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...`. It is
//! deterministic and platform independent, and its first 1000 entries
//! are exactly the fractions with denominator up to 57 (minus one),
//! so consecutive enumerated points are never more than 1/56 apart.
//! Rationals beyond `n_max` map to zero; every claim about this
//! function is about that truncated object.

use std::collections::BTreeMap;

use num::rational::Ratio;
use num::traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::integration::Integrand;
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// First `n_max` rationals in `[0, 1]`, denominator-major order.
pub fn enumerate_rationals(n_max: usize) -> Vec<Ratio<i64>> {
    let mut out = Vec::with_capacity(n_max);
    let mut q = 1i64;
    while out.len() < n_max {
        if q == 1 {
            out.push(Ratio::new(0, 1));
            if out.len() < n_max {
                out.push(Ratio::new(1, 1));
            }
        } else {
            for p in 1..q {
                if gcd(p, q) == 1 {
                    out.push(Ratio::new(p, q));
                    if out.len() == n_max {
                        break;
                    }
                }
            }
        }
        q += 1;
    }
    out
}

pub struct RationalEnumeration {
    n_max: usize,
    space: Space,
    by_index: Vec<Ratio<i64>>,
    index_of: BTreeMap<Ratio<i64>, usize>,
    /// `(value, 1-based index)` sorted by value, for window queries.
    by_value: Vec<(f64, usize)>,
}

impl RationalEnumeration {
    pub fn new(n_max: usize, space: Space) -> Result<RationalEnumeration> {
        if n_max == 0 {
            return Err(Error::Domain("need at least one enumerated rational".into()));
        }
        let prefix = space.prefix_len().ok_or_else(|| {
            Error::Capability(format!("rationals:{n_max} needs a sequence backend, got {space}"))
        })?;
        if prefix < n_max {
            return Err(Error::Capability(format!(
                "truncation {prefix} below enumeration count {n_max}"
            )));
        }
        let by_index = enumerate_rationals(n_max);
        let mut index_of = BTreeMap::new();
        let mut by_value: Vec<(f64, usize)> = Vec::with_capacity(n_max);
        for (i, r) in by_index.iter().enumerate() {
            index_of.insert(*r, i + 1);
            by_value.push((r.to_f64().unwrap(), i + 1));
        }
        by_value.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(RationalEnumeration { n_max, space, by_index, index_of, by_value })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// 1-based enumeration index of an exactly rational point.
    pub fn index_of(&self, t: Point) -> Option<usize> {
        t.as_ratio().and_then(|r| self.index_of.get(&r).copied())
    }

    /// `r_n` for a 1-based index.
    pub fn rational(&self, n: usize) -> Option<Point> {
        self.by_index.get(n - 1).map(|r| Point::Rational(*r))
    }

    /// Enumerated `(value, index)` pairs inside `[lo, hi)` or the closed
    /// interval, ascending by value.
    fn in_range(&self, lo: f64, hi: f64, closed: bool) -> &[(f64, usize)] {
        let start = self.by_value.partition_point(|(v, _)| *v < lo);
        let end = if closed {
            self.by_value.partition_point(|(v, _)| *v <= hi)
        } else {
            self.by_value.partition_point(|(v, _)| *v < hi)
        };
        &self.by_value[start..end]
    }

    fn min_index_in(&self, lo: f64, hi: f64, closed: bool) -> Option<usize> {
        self.in_range(lo, hi, closed).iter().map(|(_, n)| *n).min()
    }

    /// Lowest enumeration index usable as a tag for `[lo, hi]`.
    ///
    /// Half-open on the right so adjacent intervals always pick
    /// distinct points (disjoint basis supports are what the norm
    /// algebra of the adversary rests on). The single exception is the
    /// domain's right end: `1 = r_2` lies in no half-open interval, so
    /// the final interval may take it.
    fn pick_index(&self, lo: f64, hi: f64) -> Option<usize> {
        self.min_index_in(lo, hi, false).or_else(|| {
            (hi == 1.0)
                .then(|| self.min_index_in(lo, hi, true))
                .flatten()
        })
    }

    /// Distance from `t` to the nearest of the first `n` enumerated
    /// rationals; used to size windows that exclude `r_1..r_n`.
    pub fn distance_to_first(&self, t: f64, n: usize) -> f64 {
        self.by_index
            .iter()
            .take(n)
            .map(|r| (r.to_f64().unwrap() - t).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn basis(&self, n: usize) -> VectorValue {
        self.space.basis(n).expect("index within truncation by construction")
    }

    fn basis_norm(&self, n: usize) -> f64 {
        self.space.norm(&self.basis(n)).unwrap()
    }
}

impl Integrand for RationalEnumeration {
    fn id(&self) -> String {
        format!("rationals:{}", self.n_max)
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: Point) -> VectorValue {
        match self.index_of(t) {
            Some(n) => self.basis(n),
            None => self.space.zero(),
        }
    }

    fn bound(&self) -> Option<f64> {
        Some(self.basis_norm(1))
    }

    fn domain(&self) -> Option<(Point, Point)> {
        Some((Point::zero(), Point::one()))
    }

    fn has_witness(&self) -> bool {
        true
    }

    /// Nearest useful enumerated rational, or an off-grid real partner
    /// when `t` is itself enumerated.
    fn best_witness(&self, t: Point, radius: f64) -> Option<Point> {
        let tv = t.value();
        let lo = tv - radius;
        let hi = tv + radius;
        match self.index_of(t) {
            Some(n) => {
                // Partner candidates: another enumerated point in range,
                // or a plain real (value zero) beside t.
                let other = self
                    .in_range(lo, hi, true)
                    .iter()
                    .filter(|(_, m)| *m != n)
                    .map(|(_, m)| *m)
                    .min();
                let plain = {
                    let delta = radius * std::f64::consts::FRAC_1_SQRT_2;
                    let up = tv + delta;
                    if up <= 1.0 {
                        Point::real(up)
                    } else {
                        Point::real(tv - delta)
                    }
                };
                match other {
                    Some(m) => {
                        let d_other = self
                            .space
                            .metric(&self.basis(n), &self.basis(m))
                            .unwrap();
                        if d_other >= self.basis_norm(n) {
                            Some(Point::Rational(self.by_index[m - 1]))
                        } else {
                            Some(plain)
                        }
                    }
                    None => Some(plain),
                }
            }
            None => {
                // f(t) = 0: the lowest-index enumerated point in range
                // maximizes every shipped metric's d(e_n, 0).
                let n = self.min_index_in(lo.max(0.0), hi.min(1.0), true)?;
                Some(Point::Rational(self.by_index[n - 1]))
            }
        }
    }

    /// The lowest-index enumerated rational of the interval against a
    /// plain real beside it, shifted toward the interval's farther end.
    fn adversary_pair(&self, lo: Point, hi: Point) -> Option<(Point, Point)> {
        let n = self.pick_index(lo.value(), hi.value())?;
        let u = Point::Rational(self.by_index[n - 1]);
        let room_up = hi.value() - u.value();
        let room_down = u.value() - lo.value();
        let v = if room_up >= room_down {
            Point::real(u.value() + room_up * std::f64::consts::FRAC_1_SQRT_2)
        } else {
            Point::real(u.value() - room_down * std::f64::consts::FRAC_1_SQRT_2)
        };
        Some((u, v))
    }

    fn high_oscillation_tag(&self, lo: Point, hi: Point, r: f64) -> Option<Point> {
        let n = self.pick_index(lo.value(), hi.value())?;
        (self.basis_norm(n) >= r).then(|| Point::Rational(self.by_index[n - 1]))
    }

    /// Exact for the truncated function: the two lowest indices in the
    /// closed interval dominate every metric.
    fn interval_oscillation_sup(&self, lo: Point, hi: Point) -> Option<f64> {
        let mut indices: Vec<usize> = self
            .in_range(lo.value(), hi.value(), true)
            .iter()
            .map(|(_, n)| *n)
            .collect();
        indices.sort_unstable();
        Some(match indices.as_slice() {
            [] => 0.0,
            [n] => self.basis_norm(*n),
            [n1, n2, ..] => {
                let lone = self.basis_norm(*n1);
                let pair = self
                    .space
                    .metric(&self.basis(*n1), &self.basis(*n2))
                    .unwrap();
                lone.max(pair)
            }
        })
    }

    /// `ω(f, t)` is `d(e_n, 0)` at `r_n` and 0 elsewhere; the sup over a
    /// closed interval is decided by the lowest contained index.
    fn pointwise_oscillation_sup(&self, lo: Point, hi: Point) -> Option<f64> {
        Some(
            self.min_index_in(lo.value(), hi.value(), true)
                .map(|n| self.basis_norm(n))
                .unwrap_or(0.0),
        )
    }

    fn structure(&self) -> Option<String> {
        Some(format!(
            "f(r_n) = e_n on the first {} rationals of [0,1] in denominator-major order, zero elsewhere; \
             discontinuous exactly at the enumerated points",
            self.n_max
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn enumeration_prefix_is_frozen() {
        let r = enumerate_rationals(13);
        let expect: Vec<Ratio<i64>> = [
            (0, 1),
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 3),
            (1, 4),
            (3, 4),
            (1, 5),
            (2, 5),
            (3, 5),
            (4, 5),
            (1, 6),
            (5, 6),
        ]
        .iter()
        .map(|(p, q)| Ratio::new(*p, *q))
        .collect();
        assert_eq!(r, expect);
    }

    #[test]
    fn enumeration_is_injective_and_dense() {
        let r = enumerate_rationals(1000);
        let set: std::collections::BTreeSet<_> = r.iter().collect();
        assert_eq!(set.len(), 1000);
        // Denominators 1..=57 all complete within the first 1000.
        assert!(r.iter().all(|x| *x.denom() <= 58));
        let mut values: Vec<f64> = r.iter().map(|x| x.to_f64().unwrap()).collect();
        values.sort_by(f64::total_cmp);
        let max_gap = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(max_gap <= 1.0 / 56.0 + 1e-12, "max gap {max_gap}");
    }

    #[test]
    fn evaluation_follows_the_enumeration() {
        let f = RationalEnumeration::new(100, Space::lp(2.0, 128).unwrap()).unwrap();
        assert_eq!(f.eval(Point::zero()), f.space().basis(1).unwrap());
        assert_eq!(
            f.eval(Point::rational(1, 2).unwrap()),
            f.space().basis(3).unwrap()
        );
        // irrational-by-representation and beyond-truncation rationals are zero
        assert_eq!(f.eval(Point::real(std::f64::consts::FRAC_1_SQRT_2)), f.space().zero());
        assert_eq!(f.eval(Point::rational(1, 5000).unwrap()), f.space().zero());
    }

    #[test]
    fn unit_basis_distances() {
        let lp2 = RationalEnumeration::new(50, Space::lp(2.0, 64).unwrap()).unwrap();
        for n in 1..=50 {
            let rn = lp2.rational(n).unwrap();
            let d = lp2
                .space()
                .metric(&lp2.eval(rn), &lp2.eval(Point::real(0.123456789)))
                .unwrap();
            assert_abs_diff_eq!(d, 1.0);
        }
        let sup = RationalEnumeration::new(50, Space::omega_sup(64)).unwrap();
        for n in [1usize, 2, 7, 50] {
            let rn = sup.rational(n).unwrap();
            assert_abs_diff_eq!(sup.space().norm(&sup.eval(rn)).unwrap(), 1.0 / n as f64);
        }
    }

    #[test]
    fn capability_requires_wide_enough_prefix() {
        assert!(matches!(
            RationalEnumeration::new(100, Space::lp(2.0, 64).unwrap()),
            Err(Error::Capability(_))
        ));
        assert!(matches!(
            RationalEnumeration::new(4, Space::l1_gamma()),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn witnesses_separate() {
        let f = RationalEnumeration::new(1000, Space::lp(2.0, 1024).unwrap()).unwrap();
        // At a plain real point every window down to the enumeration
        // density holds a unit-distance witness.
        let t = Point::real(0.377001123);
        let v = f.best_witness(t, 0.02).unwrap();
        let d = f.space().metric(&f.eval(t), &f.eval(v)).unwrap();
        assert_abs_diff_eq!(d, 1.0);
        // The demanded-separation form checks its claim.
        assert!(f.witness(t, 0.02, 1.5).is_none());
        assert!(f.witness(t, 0.02, 0.5).is_some());
    }

    #[test]
    fn adversary_pairs_have_distinct_indices_across_uniform_intervals() {
        let f = RationalEnumeration::new(1000, Space::lp(1.0, 1024).unwrap()).unwrap();
        for n in [8usize, 16, 32, 50, 64] {
            let grid = crate::partitions::Partition::uniform(Point::zero(), Point::one(), n).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for i in 0..grid.len() {
                let (lo, hi) = grid.interval(i);
                let (u, v) = f.adversary_pair(lo, hi).unwrap_or_else(|| panic!("no pair in interval {i} of {n}"));
                let idx = f.index_of(u).expect("u is enumerated");
                assert!(seen.insert(idx), "index {idx} reused at level {n}");
                assert!(!v.is_rational());
                assert!(u.value() >= lo.value() && u.value() <= hi.value());
                assert!(v.value() >= lo.value() && v.value() <= hi.value());
            }
        }
    }

    #[test]
    fn oscillation_hooks_match_basis_norms() {
        let f = RationalEnumeration::new(100, Space::omega_sup(128)).unwrap();
        // [0.49, 0.51] contains 1/2 = r_3 and nothing with lower index.
        let lo = Point::real(0.49);
        let hi = Point::real(0.51);
        assert_abs_diff_eq!(f.pointwise_oscillation_sup(lo, hi).unwrap(), 1.0 / 3.0);
        assert!(f.interval_oscillation_sup(lo, hi).unwrap() >= 1.0 / 3.0);
        // An interval with no enumerated rational in it.
        let quiet_lo = Point::real(0.0101);
        let quiet_hi = Point::real(0.0117);
        assert_eq!(f.pointwise_oscillation_sup(quiet_lo, quiet_hi).unwrap(), 0.0);
    }
}

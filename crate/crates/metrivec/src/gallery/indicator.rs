//! The rational indicator: `f(t) = e_1` at representation-level
//! rationals, zero elsewhere. Its pointwise oscillation equals
//! `d(e_1, 0)` at every point of `[0, 1]`, which makes it the minimal
//! driver for the adversarial tagged-partition construction.

use crate::integration::Integrand;
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

pub struct RationalIndicator {
    space: Space,
    e1: VectorValue,
    level: f64,
}

impl RationalIndicator {
    pub fn new(space: Space) -> RationalIndicator {
        let e1 = space.basis(1).expect("every backend has a first basis vector");
        let level = space.norm(&e1).unwrap();
        RationalIndicator { space, e1, level }
    }

    /// `d(e_1, 0)` in this backend: the constant oscillation level.
    pub fn oscillation_level(&self) -> f64 {
        self.level
    }

    /// An exact rational within `radius` of `t`, on a power-of-two grid.
    fn nearby_rational(t: f64, radius: f64) -> Point {
        let mut den = 1i64;
        while 1.0 / den as f64 > radius && den < (1 << 50) {
            den *= 2;
        }
        let p = (t * den as f64).round().clamp(0.0, den as f64) as i64;
        Point::rational(p, den).unwrap()
    }
}

impl Integrand for RationalIndicator {
    fn id(&self) -> String {
        "ratind".into()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: Point) -> VectorValue {
        if t.is_rational() {
            self.e1.clone()
        } else {
            self.space.zero()
        }
    }

    fn bound(&self) -> Option<f64> {
        Some(self.level)
    }

    fn domain(&self) -> Option<(Point, Point)> {
        Some((Point::zero(), Point::one()))
    }

    fn has_witness(&self) -> bool {
        true
    }

    fn best_witness(&self, t: Point, radius: f64) -> Option<Point> {
        if t.is_rational() {
            let delta = radius * std::f64::consts::FRAC_1_SQRT_2;
            let up = t.value() + delta;
            Some(if up <= 1.0 { Point::real(up) } else { Point::real(t.value() - delta) })
        } else {
            Some(Self::nearby_rational(t.value(), radius))
        }
    }

    fn adversary_pair(&self, lo: Point, hi: Point) -> Option<(Point, Point)> {
        let width = hi.value() - lo.value();
        let u = if lo.is_rational() {
            lo
        } else {
            Self::nearby_rational(lo.value() + width / 2.0, width / 2.0)
        };
        let v = Point::real(u.value() + (hi.value() - u.value()) * std::f64::consts::FRAC_1_SQRT_2);
        Some((u, v))
    }

    fn high_oscillation_tag(&self, lo: Point, hi: Point, r: f64) -> Option<Point> {
        (self.level >= r).then(|| self.adversary_pair(lo, hi).unwrap().0)
    }

    fn interval_oscillation_sup(&self, _lo: Point, _hi: Point) -> Option<f64> {
        Some(self.level)
    }

    fn pointwise_oscillation_sup(&self, _lo: Point, _hi: Point) -> Option<f64> {
        Some(self.level)
    }

    fn structure(&self) -> Option<String> {
        Some("e_1 at representation-level rationals, zero elsewhere; ω(f, t) = d(e_1, 0) everywhere".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn values_by_representation() {
        let f = RationalIndicator::new(Space::l1_gamma());
        assert_eq!(f.eval(Point::rational(1, 2).unwrap()), f.space().basis(1).unwrap());
        assert_eq!(f.eval(Point::real(std::f64::consts::SQRT_2 - 1.0)), f.space().zero());
        assert_abs_diff_eq!(f.oscillation_level(), 1.0);
    }

    #[test]
    fn oscillation_level_tracks_the_metric() {
        assert_abs_diff_eq!(RationalIndicator::new(Space::lp(1.0, 8).unwrap()).oscillation_level(), 1.0);
        assert_abs_diff_eq!(RationalIndicator::new(Space::omega_sum(8)).oscillation_level(), 0.5);
        assert_abs_diff_eq!(RationalIndicator::new(Space::omega_sup(8)).oscillation_level(), 1.0);
    }

    #[test]
    fn witness_pairs_always_separate() {
        let f = RationalIndicator::new(Space::l1_gamma());
        for t in [Point::rational(1, 3).unwrap(), Point::real(0.6180339887)] {
            let v = f.best_witness(t, 1e-3).unwrap();
            assert!((v.value() - t.value()).abs() <= 1e-3);
            let d = f.space().metric(&f.eval(t), &f.eval(v)).unwrap();
            assert_abs_diff_eq!(d, 1.0);
        }
    }

    #[test]
    fn adversary_pair_stays_inside_and_separates() {
        let f = RationalIndicator::new(Space::l1_gamma());
        let lo = Point::real(0.331);
        let hi = Point::real(0.3315);
        let (u, v) = f.adversary_pair(lo, hi).unwrap();
        assert!(u.is_rational() && !v.is_rational());
        for p in [u, v] {
            assert!(p.value() >= lo.value() && p.value() <= hi.value());
        }
        assert_abs_diff_eq!(f.space().metric(&f.eval(u), &f.eval(v)).unwrap(), 1.0);
    }
}

//! Coordinatewise continuity against product-metric continuity.
//!
//! For sequence backends, `f` is continuous at `t` under the product
//! metric exactly when every projection `π_i ∘ f` is continuous at `t`.
//! The probe runs both sides on a shared sample corpus, so their
//! verdicts agree structurally whenever the estimates are faithful.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::integration::Integrand;
use crate::oscillation::OscSampler;
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

/// Scalar view `π_index ∘ f` into `euclidean:1`; `index` is 1-based.
pub struct CoordinateView<'a> {
    inner: &'a dyn Integrand,
    index: usize,
    space: Space,
}

impl<'a> CoordinateView<'a> {
    pub fn new(inner: &'a dyn Integrand, index: usize) -> Result<CoordinateView<'a>> {
        let width = inner
            .space()
            .prefix_len()
            .ok_or_else(|| Error::Capability("coordinate views need a sequence backend".into()))?;
        if index == 0 || index > width {
            return Err(Error::Domain(format!("coordinate {index} outside 1..={width}")));
        }
        Ok(CoordinateView { inner, index, space: Space::euclidean(1) })
    }
}

impl Integrand for CoordinateView<'_> {
    fn id(&self) -> String {
        format!("{}[{}]", self.inner.id(), self.index)
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: Point) -> VectorValue {
        let c = self.inner.eval(t).coordinate(self.index).unwrap_or(0.0);
        VectorValue::Dense(vec![c])
    }

    fn domain(&self) -> Option<(Point, Point)> {
        self.inner.domain()
    }

    fn has_witness(&self) -> bool {
        self.inner.has_witness()
    }

    fn best_witness(&self, t: Point, radius: f64) -> Option<Point> {
        self.inner.best_witness(t, radius)
    }

    fn adversary_pair(&self, lo: Point, hi: Point) -> Option<(Point, Point)> {
        self.inner.adversary_pair(lo, hi)
    }
}

/// Both sides of the coordinatewise-continuity equivalence at a point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordinateContinuityReport {
    pub function: String,
    pub space: String,
    pub t: f64,
    pub coord_count: usize,
    /// Final-window oscillation estimate per coordinate `1..=coord_count`.
    pub coordinate_estimates: Vec<f64>,
    /// Product-metric estimates along the window schedule.
    pub product_per_window: Vec<f64>,
    pub product_estimate: f64,
    pub coordinatewise_continuous: bool,
    pub product_continuous: bool,
    pub agree: bool,
    pub tol: f64,
    pub windows: Vec<f64>,
    pub seed: u64,
    pub annotations: Vec<String>,
}

/// Estimates the product-metric oscillation of `f` at `t` and the
/// scalar oscillation of each projection, on one shared corpus per
/// window (samples, the point itself, and the integrand's witness).
pub fn coordinate_continuity_probe(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    t: Point,
    coord_count: usize,
    windows: &[f64],
    sampler: OscSampler,
    tol: f64,
) -> Result<CoordinateContinuityReport> {
    use rand::Rng;
    let width = f
        .space()
        .prefix_len()
        .ok_or_else(|| Error::Capability("coordinate probe needs a sequence backend".into()))?;
    if coord_count == 0 || coord_count > width {
        return Err(Error::Domain(format!("coordinate count {coord_count} outside 1..={width}")));
    }
    if windows.is_empty() || windows.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("window schedule must be strictly decreasing".into()));
    }
    if t.value() < a.value() || t.value() > b.value() {
        return Err(Error::Domain(format!("point {t} outside [{a}, {b}]")));
    }

    // Per-window sample sets, inner windows reused by outer ones.
    let mut level_points: Vec<Vec<Point>> = Vec::with_capacity(windows.len());
    for (k, delta) in windows.iter().enumerate() {
        let lo = a.value().max(t.value() - delta);
        let hi = b.value().min(t.value() + delta);
        let mut pts = Vec::with_capacity(2 * sampler.pairs + 1);
        let mut rng = exec::subrng(sampler.seed, 40_000 + k as u64);
        for _ in 0..sampler.pairs {
            pts.push(Point::real(rng.gen_range(lo..=hi)));
            pts.push(Point::real(rng.gen_range(lo..=hi)));
        }
        if sampler.witness_assisted {
            let radius = (t.value() - lo).max(hi - t.value());
            if let Some(v) = f.best_witness(t, radius.min(*delta)) {
                if v.value() >= lo && v.value() <= hi {
                    pts.push(v);
                }
            }
        }
        level_points.push(pts);
    }

    struct WindowOutcome {
        product: f64,
        coords: Vec<f64>,
    }

    let outcomes: Vec<WindowOutcome> = exec::map_indexed(windows.len(), |k| -> Result<WindowOutcome> {
        let mut corpus: Vec<Point> = vec![t];
        for pts in level_points.iter().skip(k) {
            corpus.extend_from_slice(pts);
        }
        let values: Vec<VectorValue> = corpus.iter().map(|p| f.eval(*p)).collect();
        let space = f.space();
        let mut product = 0.0f64;
        let mut coords = vec![0.0f64; coord_count];
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                product = product.max(space.metric(&values[i], &values[j])?);
                for (c, worst) in coords.iter_mut().enumerate() {
                    let x = values[i].coordinate(c + 1).unwrap_or(0.0);
                    let y = values[j].coordinate(c + 1).unwrap_or(0.0);
                    *worst = worst.max((x - y).abs());
                }
            }
        }
        Ok(WindowOutcome { product, coords })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let product_per_window: Vec<f64> = outcomes.iter().map(|o| o.product).collect();
    let product_estimate = *product_per_window.last().unwrap();
    let coordinate_estimates = outcomes.last().unwrap().coords.clone();
    let coordinatewise_continuous = coordinate_estimates.iter().all(|e| *e <= tol);
    let product_continuous = product_estimate <= tol;
    Ok(CoordinateContinuityReport {
        function: f.id(),
        space: f.space().to_string(),
        t: t.value(),
        coord_count,
        coordinate_estimates,
        product_per_window,
        product_estimate,
        coordinatewise_continuous,
        product_continuous,
        agree: coordinatewise_continuous == product_continuous,
        tol,
        windows: windows.to_vec(),
        seed: sampler.seed,
        annotations: f.space().hypothesis_annotations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::BinaryDigitFn;
    use crate::oscillation::default_window_schedule;

    #[test]
    fn digit_function_at_one_third_is_continuous_both_ways() {
        // The truncated function is locally constant once the window
        // shrinks past the nearest level-16 breakpoint (about
        // 1/(3·2^16) away), so the schedule must reach below that.
        let f = BinaryDigitFn::new(16, Space::omega_sum(16)).unwrap();
        let windows: Vec<f64> = (3..=20).map(|k| (2f64).powi(-k)).collect();
        let report = coordinate_continuity_probe(
            &f,
            Point::zero(),
            Point::one(),
            Point::rational(1, 3).unwrap(),
            16,
            &windows,
            OscSampler::new(4, 7),
            1e-9,
        )
        .unwrap();
        assert_eq!(report.product_estimate, 0.0);
        assert!(report.coordinatewise_continuous);
        assert!(report.product_continuous);
        assert!(report.agree);
        // The trend is visible along the schedule: early windows see the
        // sub-cell structure, late ones see a constant.
        assert!(report.product_per_window.first().unwrap() > &0.0);
    }

    #[test]
    fn digit_function_at_half_is_discontinuous_both_ways() {
        let f = BinaryDigitFn::new(16, Space::omega_sum(16)).unwrap();
        let report = coordinate_continuity_probe(
            &f,
            Point::zero(),
            Point::one(),
            Point::rational(1, 2).unwrap(),
            16,
            &default_window_schedule(1.0),
            OscSampler::new(4, 7),
            1e-9,
        )
        .unwrap();
        // every digit flips across 1/2
        assert!(report.coordinate_estimates.iter().all(|e| *e == 1.0));
        assert!(report.product_estimate > 0.0);
        assert!(!report.coordinatewise_continuous && !report.product_continuous);
        assert!(report.agree);
    }

    #[test]
    fn constant_function_agrees_trivially() {
        struct Flat(Space);
        impl Integrand for Flat {
            fn id(&self) -> String {
                "flat".into()
            }
            fn space(&self) -> &Space {
                &self.0
            }
            fn eval(&self, _t: Point) -> VectorValue {
                self.0.basis(2).unwrap()
            }
        }
        let f = Flat(Space::omega_sup(8));
        let report = coordinate_continuity_probe(
            &f,
            Point::zero(),
            Point::one(),
            Point::real(0.4),
            8,
            &default_window_schedule(1.0),
            OscSampler::new(4, 7),
            1e-9,
        )
        .unwrap();
        assert_eq!(report.product_estimate, 0.0);
        assert!(report.agree && report.coordinatewise_continuous);
    }

    #[test]
    fn coordinate_view_projects() {
        let f = BinaryDigitFn::new(8, Space::linf(8)).unwrap();
        let view = CoordinateView::new(&f, 1).unwrap();
        assert_eq!(view.eval(Point::rational(3, 4).unwrap()), VectorValue::Dense(vec![1.0]));
        assert_eq!(view.eval(Point::rational(1, 4).unwrap()), VectorValue::Dense(vec![0.0]));
        assert!(CoordinateView::new(&f, 9).is_err());
        assert!(CoordinateView::new(&f, 0).is_err());
    }
}

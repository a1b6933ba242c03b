//! Continuous calibration functions with closed-form calculus.

use crate::error::{Error, Result};
use crate::integration::Integrand;
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

/// Scalar component curves, closed under differentiation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarCurve {
    Const(f64),
    /// `a * t`
    Linear(f64),
    /// `t^2`
    Square,
    Sin,
    Cos,
    NegSin,
    NegCos,
}

impl ScalarCurve {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            ScalarCurve::Const(c) => c,
            ScalarCurve::Linear(a) => a * t,
            ScalarCurve::Square => t * t,
            ScalarCurve::Sin => t.sin(),
            ScalarCurve::Cos => t.cos(),
            ScalarCurve::NegSin => -t.sin(),
            ScalarCurve::NegCos => -t.cos(),
        }
    }

    /// Antiderivative vanishing at 0.
    pub fn antideriv0(self, t: f64) -> f64 {
        match self {
            ScalarCurve::Const(c) => c * t,
            ScalarCurve::Linear(a) => a * t * t / 2.0,
            ScalarCurve::Square => t * t * t / 3.0,
            ScalarCurve::Sin => 1.0 - t.cos(),
            ScalarCurve::Cos => t.sin(),
            ScalarCurve::NegSin => t.cos() - 1.0,
            ScalarCurve::NegCos => -t.sin(),
        }
    }

    pub fn derivative(self) -> ScalarCurve {
        match self {
            ScalarCurve::Const(_) => ScalarCurve::Const(0.0),
            ScalarCurve::Linear(a) => ScalarCurve::Const(a),
            ScalarCurve::Square => ScalarCurve::Linear(2.0),
            ScalarCurve::Sin => ScalarCurve::Cos,
            ScalarCurve::Cos => ScalarCurve::NegSin,
            ScalarCurve::NegSin => ScalarCurve::NegCos,
            ScalarCurve::NegCos => ScalarCurve::Sin,
        }
    }

    /// Bound on `|curve|` over `[a, b]`.
    pub fn abs_bound(self, a: f64, b: f64) -> f64 {
        match self {
            ScalarCurve::Const(c) => c.abs(),
            ScalarCurve::Linear(s) => s.abs() * a.abs().max(b.abs()),
            ScalarCurve::Square => (a * a).max(b * b),
            _ => 1.0,
        }
    }
}

/// A tuple of scalar curves truncated into a backend.
#[derive(Clone, Debug)]
pub struct SmoothFn {
    name: String,
    space: Space,
    components: Vec<ScalarCurve>,
    /// Interval the declared bound refers to.
    bound_interval: (f64, f64),
}

impl SmoothFn {
    pub fn new(name: &str, space: Space, components: Vec<ScalarCurve>) -> Result<SmoothFn> {
        let width = match space.kind() {
            crate::spaces::SpaceKind::Euclidean { dim } => *dim,
            crate::spaces::SpaceKind::L1Gamma => {
                return Err(Error::Capability(
                    "smooth calibration functions target coordinate backends".into(),
                ))
            }
            _ => space.prefix_len().unwrap(),
        };
        if components.is_empty() || components.len() > width {
            return Err(Error::Capability(format!(
                "{} components do not fit into {space}",
                components.len()
            )));
        }
        Ok(SmoothFn { name: name.to_string(), space, components, bound_interval: (0.0, 1.0) })
    }

    /// `poly12` = (t, t²); `trig` = (sin t, cos t); `linear` = (t);
    /// `const1` = (1).
    pub fn named(name: &str, space: Space) -> Result<SmoothFn> {
        let components = match name {
            "poly12" => vec![ScalarCurve::Linear(1.0), ScalarCurve::Square],
            "trig" => vec![ScalarCurve::Sin, ScalarCurve::Cos],
            "linear" => vec![ScalarCurve::Linear(1.0)],
            "const1" => vec![ScalarCurve::Const(1.0)],
            _ => return Err(Error::Parse(format!("unknown smooth function '{name}'"))),
        };
        SmoothFn::new(name, space, components)
    }

    pub fn components(&self) -> &[ScalarCurve] {
        &self.components
    }

    fn lift(&self, coords: impl Iterator<Item = f64>) -> VectorValue {
        match self.space.kind() {
            crate::spaces::SpaceKind::Euclidean { dim } => {
                let mut v = vec![0.0; *dim];
                for (slot, c) in v.iter_mut().zip(coords) {
                    *slot = c;
                }
                VectorValue::Dense(v)
            }
            _ => {
                let m = self.space.prefix_len().unwrap();
                let mut v = vec![0.0; m];
                for (slot, c) in v.iter_mut().zip(coords) {
                    *slot = c;
                }
                VectorValue::Prefix(v)
            }
        }
    }

    /// Exact integral over `[a, b]` from the antiderivatives.
    pub fn analytic_integral(&self, a: f64, b: f64) -> VectorValue {
        self.lift(self.components.iter().map(|c| c.antideriv0(b) - c.antideriv0(a)))
    }

    /// Componentwise derivative as another smooth function.
    pub fn derivative_fn(&self) -> SmoothFn {
        SmoothFn {
            name: format!("{}'", self.name),
            space: self.space.clone(),
            components: self.components.iter().map(|c| c.derivative()).collect(),
            bound_interval: self.bound_interval,
        }
    }

    pub fn analytic_derivative(&self, t: f64) -> VectorValue {
        self.lift(self.components.iter().map(|c| c.derivative().eval(t)))
    }
}

impl Integrand for SmoothFn {
    fn id(&self) -> String {
        format!("smooth:{}", self.name)
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: Point) -> VectorValue {
        let tv = t.value();
        self.lift(self.components.iter().map(|c| c.eval(tv)))
    }

    fn bound(&self) -> Option<f64> {
        let (a, b) = self.bound_interval;
        let bounds: Vec<f64> = self.components.iter().map(|c| c.abs_bound(a, b)).collect();
        self.space.metric_of_abs_bounds(&bounds).ok()
    }

    fn pointwise_oscillation_sup(&self, _lo: Point, _hi: Point) -> Option<f64> {
        Some(0.0) // continuous everywhere
    }

    fn structure(&self) -> Option<String> {
        Some("continuous; analytic antiderivative and derivative available".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poly12_analytic_integral() {
        let f = SmoothFn::named("poly12", Space::euclidean(2)).unwrap();
        match f.analytic_integral(0.0, 1.0) {
            VectorValue::Dense(v) => {
                assert_abs_diff_eq!(v[0], 0.5);
                assert_abs_diff_eq!(v[1], 1.0 / 3.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn trig_derivative_values() {
        let f = SmoothFn::named("trig", Space::omega_sum(8)).unwrap();
        let t = 0.7;
        match f.analytic_derivative(t) {
            VectorValue::Prefix(v) => {
                assert_abs_diff_eq!(v[0], t.cos());
                assert_abs_diff_eq!(v[1], -t.sin());
                assert!(v[2..].iter().all(|x| *x == 0.0));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn components_must_fit() {
        assert!(SmoothFn::named("poly12", Space::euclidean(1)).is_err());
        assert!(SmoothFn::named("poly12", Space::l1_gamma()).is_err());
        assert!(SmoothFn::named("nope", Space::euclidean(4)).is_err());
    }

    #[test]
    fn declared_bound_dominates_samples() {
        let f = SmoothFn::named("trig", Space::lp(2.0, 8).unwrap()).unwrap();
        let bound = f.bound().unwrap();
        for i in 0..100 {
            let t = Point::real(i as f64 / 100.0);
            let norm = f.space().norm(&f.eval(t)).unwrap();
            assert!(norm <= bound + 1e-12);
        }
    }
}

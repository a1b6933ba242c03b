//! Primitives `F(t) = ∫_a^t f`, a differentiability probe for the
//! remainder condition `d(0, φ(t+s) - φ(t) - s x_t) = o(s)`, and the
//! fundamental-theorem residual check `∫_a^τ F' = F(τ) - F(a)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::integration::{integrate, Integrand, IntegrateConfig, IntegrationReport};
use crate::oscillation::{pointwise_oscillation, OscSampler};
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

/// Grid of primitive values with per-entry convergence flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimitiveTable {
    pub function: String,
    pub space: String,
    pub a: f64,
    pub b: f64,
    pub grid: Vec<f64>,
    pub values: Vec<VectorValue>,
    /// Whether the sub-integration for each entry converged; `F(a)` is
    /// exact by construction.
    pub converged: Vec<bool>,
    pub seed: u64,
    pub annotations: Vec<String>,
}

/// Tabulates `F(t_j) = ∫_a^{t_j} f` on a uniform grid with both
/// endpoints included.
pub fn primitive(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    grid_size: usize,
    cfg: &IntegrateConfig,
) -> Result<PrimitiveTable> {
    if grid_size < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    let grid: Vec<Point> = (0..grid_size)
        .map(|j| Point::affine(a, b, j as i64, (grid_size - 1) as i64))
        .collect();
    let entries = exec::map_indexed(grid_size, |j| -> Result<(VectorValue, bool)> {
        if j == 0 {
            return Ok((f.space().zero(), true));
        }
        let report = integrate(f, a, grid[j], cfg)?;
        Ok((report.estimate, report.converged))
    });
    let entries: Vec<(VectorValue, bool)> = entries.into_iter().collect::<Result<_>>()?;
    Ok(PrimitiveTable {
        function: f.id(),
        space: f.space().to_string(),
        a: a.value(),
        b: b.value(),
        grid: grid.iter().map(|p| p.value()).collect(),
        values: entries.iter().map(|(v, _)| v.clone()).collect(),
        converged: entries.iter().map(|(_, c)| *c).collect(),
        seed: cfg.seed,
        annotations: f.space().hypothesis_annotations(),
    })
}

/// Numerically built primitive usable as a function.
///
/// Evaluation anchors at the largest grid point below `t` and integrates
/// the short remainder `[t_j, t]` with a mesh schedule relative to that
/// local interval, so nearby evaluations share almost all of their
/// error. That keeps difference quotients clean at small steps.
pub struct PrimitiveFn<'a> {
    f: &'a dyn Integrand,
    grid: Vec<Point>,
    values: Vec<VectorValue>,
    local_cfg: IntegrateConfig,
}

impl<'a> PrimitiveFn<'a> {
    pub fn build(f: &'a dyn Integrand, a: Point, b: Point, grid_size: usize, cfg: &IntegrateConfig) -> Result<PrimitiveFn<'a>> {
        if grid_size < 2 {
            return Err(Error::Domain("grid needs at least two points".into()));
        }
        let grid: Vec<Point> = (0..grid_size)
            .map(|j| Point::affine(a, b, j as i64, (grid_size - 1) as i64))
            .collect();
        let values = exec::map_indexed(grid_size, |j| -> Result<VectorValue> {
            if j == 0 {
                return Ok(f.space().zero());
            }
            Ok(integrate(f, a, grid[j], cfg)?.estimate)
        });
        let values: Vec<VectorValue> = values.into_iter().collect::<Result<_>>()?;
        Ok(PrimitiveFn {
            f,
            grid,
            values,
            local_cfg: IntegrateConfig {
                tolerance: 1e-9,
                mesh_start_div: 8,
                mesh_levels: 6,
                tag_samples: 2,
                seed: cfg.seed,
            },
        })
    }

    pub fn eval(&self, t: Point) -> Result<VectorValue> {
        let tv = t.value();
        let first = self.grid[0].value();
        let last = self.grid[self.grid.len() - 1].value();
        if tv < first || tv > last {
            return Err(Error::Domain(format!("{t} outside primitive domain")));
        }
        // Largest grid point at or below t.
        let mut anchor = 0;
        for (j, g) in self.grid.iter().enumerate() {
            if g.value() <= tv {
                anchor = j;
            } else {
                break;
            }
        }
        if self.grid[anchor].value() == tv {
            return Ok(self.values[anchor].clone());
        }
        let local = integrate(self.f, self.grid[anchor], t, &self.local_cfg)?;
        self.f.space().add(&self.values[anchor], &local.estimate)
    }
}

/// Step schedule of the differentiability probe: strictly decreasing
/// magnitudes, approached from both sides on interior points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepSchedule {
    pub magnitudes: Vec<f64>,
}

impl Default for StepSchedule {
    /// Geometric half-decade steps from 1e-1 down to 1e-4.
    fn default() -> StepSchedule {
        StepSchedule {
            magnitudes: (0..7).map(|k| 0.1 * (10f64).powf(-(k as f64) / 2.0)).collect(),
        }
    }
}

impl StepSchedule {
    pub fn decades(from: i32, to: i32) -> StepSchedule {
        assert!(from > to);
        StepSchedule {
            magnitudes: (to..=from).rev().map(|e| (10f64).powi(e)).collect(),
        }
    }
}

/// Decision rule for the o(s) verdict.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DerivativeProbeConfig {
    /// Threshold as a fraction of the first ratio.
    pub threshold_rel: f64,
    /// Absolute threshold floor, for exactly linear φ.
    pub threshold_abs: f64,
    /// Allowed relative growth between consecutive tail ratios.
    pub monotone_slack: f64,
}

impl Default for DerivativeProbeConfig {
    fn default() -> DerivativeProbeConfig {
        DerivativeProbeConfig { threshold_rel: 1e-2, threshold_abs: 1e-9, monotone_slack: 0.05 }
    }
}

/// Remainder ratios `ρ_m = d(0, φ(t+s) - φ(t) - s x_t) / |s|` along the
/// step schedule, with the finite decision rule applied to the tail.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivativeProbeReport {
    pub space: String,
    pub t: f64,
    pub candidate: VectorValue,
    /// Step magnitudes, strictly decreasing.
    pub steps: Vec<f64>,
    /// Worst ratio over the sides evaluated at each magnitude.
    pub ratios: Vec<f64>,
    pub threshold: f64,
    pub two_sided: bool,
    /// True iff the last three ratios sit below the threshold and are
    /// non-increasing within the configured slack.
    pub verdict: bool,
    pub annotations: Vec<String>,
}

/// Probes differentiability of `φ` at `t` against the candidate
/// derivative `x_t`, inside the domain `[a, b]` (steps are one-sided at
/// the endpoints).
pub fn differentiability_probe<E>(
    phi: &dyn Fn(Point) -> std::result::Result<VectorValue, E>,
    space: &Space,
    a: Point,
    b: Point,
    t: Point,
    candidate: &VectorValue,
    schedule: &StepSchedule,
    cfg: DerivativeProbeConfig,
) -> Result<DerivativeProbeReport>
where
    E: std::fmt::Debug,
{
    if t.value() < a.value() || t.value() > b.value() {
        return Err(Error::Domain(format!("point {t} outside [{a}, {b}]")));
    }
    if schedule.magnitudes.is_empty()
        || schedule.magnitudes.windows(2).any(|w| w[1] >= w[0])
        || schedule.magnitudes.iter().any(|m| *m <= 0.0)
    {
        return Err(Error::Domain("step schedule must be strictly decreasing and positive".into()));
    }
    let eval = |p: Point| -> Result<VectorValue> {
        phi(p).map_err(|e| Error::Domain(format!("φ evaluation failed: {e:?}")))
    };
    let base = eval(t)?;
    let span_lo = t.value() - a.value();
    let span_hi = b.value() - t.value();
    let two_sided = span_lo > 0.0 && span_hi > 0.0;

    let mut ratios = Vec::with_capacity(schedule.magnitudes.len());
    for &s in &schedule.magnitudes {
        let mut sides = Vec::with_capacity(2);
        if span_hi > 0.0 {
            sides.push(s.min(span_hi));
        }
        if span_lo > 0.0 {
            sides.push(-s.min(span_lo));
        }
        let mut worst = 0.0f64;
        for step in sides {
            let shifted = eval(Point::real(t.value() + step))?;
            let linear = space.scale(step, candidate)?;
            let remainder = space.sub(&space.sub(&shifted, &base)?, &linear)?;
            worst = worst.max(space.norm(&remainder)? / step.abs());
        }
        ratios.push(worst);
    }

    let threshold = (cfg.threshold_rel * ratios[0]).max(cfg.threshold_abs);
    let tail = ratios.len().saturating_sub(3);
    let tail_ok = ratios[tail..].iter().all(|r| *r <= threshold);
    let monotone_ok = ratios[tail.saturating_sub(1)..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + cfg.monotone_slack) + threshold / 2.0);
    Ok(DerivativeProbeReport {
        space: space.to_string(),
        t: t.value(),
        candidate: candidate.clone(),
        steps: schedule.magnitudes.clone(),
        ratios,
        threshold,
        two_sided,
        verdict: tail_ok && monotone_ok,
        annotations: space.hypothesis_annotations(),
    })
}

/// Fundamental-theorem residual report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FtcReport {
    pub space: String,
    pub a: f64,
    pub tau: f64,
    /// `d(∫_a^τ F', F(τ) - F(a))`.
    pub residual: f64,
    /// False when the underlying integration did not converge; the
    /// residual is then unreliable.
    pub reliable: bool,
    pub integration: IntegrationReport,
    pub annotations: Vec<String>,
}

/// Checks `∫_a^τ F' = F(τ) - F(a)`.
///
/// The continuity of `F'` on `[a, τ]` is the caller's assertion, as in
/// the theorem's hypothesis; setting `preprobe` runs a pointwise
/// oscillation of `F'` at the midpoint and annotates the report if it
/// does not shrink.
pub fn ftc_check<E>(
    big_f: &dyn Fn(Point) -> std::result::Result<VectorValue, E>,
    f_prime: &dyn Integrand,
    a: Point,
    tau: Point,
    cfg: &IntegrateConfig,
    preprobe: bool,
) -> Result<FtcReport>
where
    E: std::fmt::Debug,
{
    let space = f_prime.space();
    let report = integrate(f_prime, a, tau, cfg)?;
    let eval = |p: Point| -> Result<VectorValue> {
        big_f(p).map_err(|e| Error::Domain(format!("F evaluation failed: {e:?}")))
    };
    let expected = space.sub(&eval(tau)?, &eval(a)?)?;
    let residual = space.metric(&report.estimate, &expected)?;
    let mut annotations = space.hypothesis_annotations();
    if preprobe {
        let mid = Point::midpoint(a, tau);
        let windows: Vec<f64> = (3..=10)
            .map(|k| (tau.value() - a.value()) * (2f64).powi(-k))
            .collect();
        let profile = pointwise_oscillation(f_prime, a, tau, mid, &windows, OscSampler::new(8, cfg.seed))?;
        if profile.estimate > 1e-3 {
            annotations.push(format!(
                "continuity-preprobe: oscillation {:.3e} at t={} did not shrink",
                profile.estimate,
                mid.value()
            ));
        }
    }
    Ok(FtcReport {
        space: space.to_string(),
        a: a.value(),
        tau: tau.value(),
        residual,
        reliable: report.converged,
        integration: report,
        annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct ConstFn(Space, VectorValue);
    impl Integrand for ConstFn {
        fn id(&self) -> String {
            "const".into()
        }
        fn space(&self) -> &Space {
            &self.0
        }
        fn eval(&self, _t: Point) -> VectorValue {
            self.1.clone()
        }
    }

    struct CosFn(Space);
    impl Integrand for CosFn {
        fn id(&self) -> String {
            "cos*e1".into()
        }
        fn space(&self) -> &Space {
            &self.0
        }
        fn eval(&self, t: Point) -> VectorValue {
            VectorValue::Dense(vec![t.value().cos()])
        }
    }

    #[test]
    fn primitive_of_constant_is_exact() {
        let f = ConstFn(Space::euclidean(2), VectorValue::Dense(vec![2.0, -3.5]));
        let cfg = IntegrateConfig { mesh_levels: 8, ..Default::default() };
        let table = primitive(&f, Point::zero(), Point::one(), 5, &cfg).unwrap();
        assert_eq!(table.values[0], f.0.zero());
        for (j, t) in table.grid.iter().enumerate() {
            assert_eq!(
                table.values[j],
                VectorValue::Dense(vec![2.0 * t, -3.5 * t]),
                "t={t}"
            );
            assert!(table.converged[j]);
        }
    }

    #[test]
    fn primitive_of_cosine_matches_sine() {
        let f = CosFn(Space::euclidean(1));
        let cfg = IntegrateConfig::default();
        let table = primitive(&f, Point::zero(), Point::one(), 5, &cfg).unwrap();
        for (j, t) in table.grid.iter().enumerate() {
            match &table.values[j] {
                VectorValue::Dense(v) => assert_abs_diff_eq!(v[0], t.sin(), epsilon = 1e-6),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn primitive_additivity() {
        let f = CosFn(Space::euclidean(1));
        let cfg = IntegrateConfig { tolerance: 1e-6, ..Default::default() };
        let table = primitive(&f, Point::zero(), Point::one(), 5, &cfg).unwrap();
        let space = Space::euclidean(1);
        for j in 0..table.grid.len() - 1 {
            let lo = Point::real(table.grid[j]);
            let hi = Point::real(table.grid[j + 1]);
            let piece = integrate(&f, lo, hi, &cfg).unwrap();
            let diff = space.sub(&table.values[j + 1], &table.values[j]).unwrap();
            let gap = space.metric(&diff, &piece.estimate).unwrap();
            assert!(gap <= 2.0 * (cfg.tolerance + cfg.tolerance), "gap {gap}");
        }
    }

    #[test]
    fn quadratic_ratios_equal_the_step() {
        // φ(t) = t² e₁ at t=1 with x_t = 2 e₁ leaves remainder s².
        let space = Space::euclidean(1);
        let phi = |p: Point| -> Result<VectorValue> { Ok(VectorValue::Dense(vec![p.value() * p.value()])) };
        let report = differentiability_probe(
            &phi,
            &space,
            Point::zero(),
            Point::rational(2, 1).unwrap(),
            Point::one(),
            &VectorValue::Dense(vec![2.0]),
            &StepSchedule::decades(-1, -6),
            DerivativeProbeConfig::default(),
        )
        .unwrap();
        assert!(report.two_sided);
        for (s, rho) in report.steps.iter().zip(&report.ratios) {
            assert_abs_diff_eq!(*rho, *s, epsilon = 1e-9);
        }
        assert!(report.verdict);
    }

    #[test]
    fn kink_is_rejected() {
        let space = Space::euclidean(1);
        let phi = |p: Point| -> Result<VectorValue> { Ok(VectorValue::Dense(vec![p.value().abs()])) };
        let report = differentiability_probe(
            &phi,
            &space,
            Point::rational(-1, 1).unwrap(),
            Point::one(),
            Point::zero(),
            &space.zero(),
            &StepSchedule::default(),
            DerivativeProbeConfig::default(),
        )
        .unwrap();
        assert!(report.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(!report.verdict);
    }

    #[test]
    fn ftc_residual_for_quadratic() {
        // F(t) = t² e₁, F'(t) = 2t e₁.
        struct TwoT(Space);
        impl Integrand for TwoT {
            fn id(&self) -> String {
                "2t*e1".into()
            }
            fn space(&self) -> &Space {
                &self.0
            }
            fn eval(&self, t: Point) -> VectorValue {
                VectorValue::Dense(vec![2.0 * t.value()])
            }
        }
        let fp = TwoT(Space::euclidean(1));
        let big_f = |p: Point| -> Result<VectorValue> { Ok(VectorValue::Dense(vec![p.value() * p.value()])) };
        // One extra level: the deterministic left-vs-right gap at the
        // finest mesh is 2 * 2^-15 < 1e-4 for this Lipschitz-2 integrand.
        let cfg = IntegrateConfig { mesh_levels: 13, ..Default::default() };
        let report = ftc_check(&big_f, &fp, Point::zero(), Point::one(), &cfg, false).unwrap();
        assert!(report.reliable);
        assert!(report.residual < 1e-6, "residual {}", report.residual);
    }

    #[test]
    fn ftc_residual_zero_for_constant_big_f() {
        struct Zero(Space);
        impl Integrand for Zero {
            fn id(&self) -> String {
                "0".into()
            }
            fn space(&self) -> &Space {
                &self.0
            }
            fn eval(&self, _t: Point) -> VectorValue {
                self.0.zero()
            }
        }
        let fp = Zero(Space::euclidean(1));
        let big_f = |_p: Point| -> Result<VectorValue> { Ok(VectorValue::Dense(vec![7.0])) };
        let report = ftc_check(&big_f, &fp, Point::zero(), Point::one(), &IntegrateConfig::default(), false).unwrap();
        assert_eq!(report.residual, 0.0);
    }

    #[test]
    fn primitive_fn_tracks_the_table_between_grid_points() {
        let f = CosFn(Space::euclidean(1));
        let prim = PrimitiveFn::build(&f, Point::zero(), Point::one(), 17, &IntegrateConfig::default()).unwrap();
        for t in [0.0, 0.25, 0.3111, 0.77, 1.0] {
            let v = prim.eval(Point::real(t)).unwrap();
            match v {
                VectorValue::Dense(v) => assert_abs_diff_eq!(v[0], t.sin(), epsilon = 1e-6),
                _ => unreachable!(),
            }
        }
        assert!(prim.eval(Point::real(1.5)).is_err());
    }
}

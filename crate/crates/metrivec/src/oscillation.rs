//! Oscillation functionals and their probes: `ω(f, I)` on intervals,
//! `ω(f, Δ)` Darboux sums over partitions, `ω(f, t)` at points, plus
//! discontinuity-set measure brackets and finite-union interval measure.
//!
//! Sup-type quantities are estimated by seeded sampling with witness
//! assistance from integrand metadata; black-box integrands get sampling
//! only and their estimates are certified lower bounds. Measure reports
//! bracket at the grid's scale: the bracket converges to the true
//! measure once the resolution passes the function's structure scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::integration::{CriterionReport, CriterionWitness, Integrand, Verdict, CRITERION_DARBOUX};
use crate::partitions::Partition;
use crate::point::Point;

/// Measure of a finite union of closed intervals; overlaps merged.
pub fn interval_measure(intervals: &[(f64, f64)]) -> Result<f64> {
    let mut sorted = Vec::with_capacity(intervals.len());
    for &(lo, hi) in intervals {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::Domain(format!("malformed interval [{lo}, {hi}]")));
        }
        sorted.push((lo, hi));
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (lo, hi) in sorted {
        match current {
            Some((clo, chi)) if lo <= chi => current = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                let _ = clo;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = current {
        total += chi - clo;
    }
    Ok(total)
}

/// Seeded sampler for oscillation estimates.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OscSampler {
    /// Sampled point pairs per interval or window.
    pub pairs: usize,
    pub seed: u64,
    /// Include the integrand's witness metadata in the search corpus.
    pub witness_assisted: bool,
}

impl OscSampler {
    pub fn new(pairs: usize, seed: u64) -> OscSampler {
        OscSampler { pairs, seed, witness_assisted: true }
    }
}

/// What an oscillation profile estimated.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscTarget {
    Interval { lo: f64, hi: f64 },
    Partition { intervals: usize, mesh: f64 },
    Point { t: f64 },
}

/// An oscillation estimate with its provenance.
///
/// Estimates are lower bounds of the corresponding sup; the stored
/// witness pair re-evaluates to its contribution. For the point target
/// the per-window estimates are exactly non-increasing as the window
/// shrinks because inner-window samples are reused in outer windows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OscillationProfile {
    pub function: String,
    pub space: String,
    pub target: OscTarget,
    pub estimate: f64,
    /// Window radii (point target), outermost first.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub windows: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_window: Vec<f64>,
    pub sample_pairs: usize,
    pub seed: u64,
    /// True when no witness metadata sharpened the search.
    pub lower_bound_only: bool,
    /// Pair achieving the estimate, in the exact point grammar.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(String, String)>,
    pub non_increasing: bool,
    pub annotations: Vec<String>,
}

/// Max of `d(f(u), f(v))` over a point corpus, with the achieving pair.
fn corpus_oscillation(f: &dyn Integrand, points: &[Point]) -> Result<(f64, Option<(Point, Point)>)> {
    let values = exec::map_indexed(points.len(), |i| f.eval(points[i]));
    let space = f.space();
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = space.metric(&values[i], &values[j])?;
            if d > worst {
                worst = d;
                witness = Some((points[i], points[j]));
            }
        }
    }
    Ok((worst, witness))
}

fn interval_corpus(
    f: &dyn Integrand,
    lo: Point,
    hi: Point,
    sampler: OscSampler,
    stream: u64,
    extra: &[Point],
) -> Vec<Point> {
    use rand::Rng;
    let mut points = Vec::with_capacity(2 * sampler.pairs + extra.len() + 2);
    let mut rng = exec::subrng(sampler.seed, stream);
    for _ in 0..sampler.pairs {
        points.push(Point::real(rng.gen_range(lo.value()..=hi.value())));
        points.push(Point::real(rng.gen_range(lo.value()..=hi.value())));
    }
    if sampler.witness_assisted {
        if let Some((u, v)) = f.adversary_pair(lo, hi) {
            points.push(u);
            points.push(v);
        }
    }
    points.extend_from_slice(extra);
    points
}

/// `ω(f, I)` estimate: max sampled pair distance, witness-assisted when
/// the integrand exposes structure. Always a lower bound of the sup.
pub fn oscillation_on_interval(
    f: &dyn Integrand,
    lo: Point,
    hi: Point,
    sampler: OscSampler,
) -> Result<OscillationProfile> {
    if lo.value() >= hi.value() {
        return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let points = interval_corpus(f, lo, hi, sampler, 0, &[]);
    let (estimate, witness) = corpus_oscillation(f, &points)?;
    Ok(OscillationProfile {
        function: f.id(),
        space: f.space().to_string(),
        target: OscTarget::Interval { lo: lo.value(), hi: hi.value() },
        estimate,
        windows: vec![],
        per_window: vec![],
        sample_pairs: sampler.pairs,
        seed: sampler.seed,
        lower_bound_only: !(sampler.witness_assisted && f.has_witness()),
        witness: witness.map(|(u, v)| (u.to_string(), v.to_string())),
        non_increasing: true,
        annotations: f.space().hypothesis_annotations(),
    })
}

/// Darboux sum estimate `Σ ω(f, [t_{i-1}, t_i]) (t_i - t_{i-1})`;
/// per-interval estimates in parallel, the weighted sum accumulated
/// left-to-right.
pub fn oscillation_sum(
    f: &dyn Integrand,
    partition: &Partition,
    sampler: OscSampler,
) -> Result<OscillationProfile> {
    let per_interval = exec::map_indexed(partition.len(), |i| {
        let (lo, hi) = partition.interval(i);
        let points = interval_corpus(f, lo, hi, sampler, i as u64, &[]);
        corpus_oscillation(f, &points)
    });
    let per_interval: Vec<(f64, Option<(Point, Point)>)> =
        per_interval.into_iter().collect::<Result<_>>()?;

    let mut sum = 0.0;
    let mut worst_interval = 0.0f64;
    let mut witness = None;
    for (i, (est, pair)) in per_interval.iter().enumerate() {
        let (lo, hi) = partition.interval(i);
        sum += est * (hi.value() - lo.value());
        if *est > worst_interval {
            worst_interval = *est;
            witness = *pair;
        }
    }
    Ok(OscillationProfile {
        function: f.id(),
        space: f.space().to_string(),
        target: OscTarget::Partition { intervals: partition.len(), mesh: partition.mesh() },
        estimate: sum,
        windows: vec![],
        per_window: vec![],
        sample_pairs: sampler.pairs,
        seed: sampler.seed,
        lower_bound_only: !(sampler.witness_assisted && f.has_witness()),
        witness: witness.map(|(u, v)| (u.to_string(), v.to_string())),
        non_increasing: true,
        annotations: f.space().hypothesis_annotations(),
    })
}

/// Default pointwise window schedule: radii `2^-3 .. 2^-16` times the
/// domain span, outermost first.
pub fn default_window_schedule(span: f64) -> Vec<f64> {
    (3..=16).map(|k| span * (2f64).powi(-k)).collect()
}

/// `ω(f, t)` estimate along a shrinking window schedule; one-sided at
/// the domain endpoints. The reported value is the last (smallest)
/// window's estimate.
pub fn pointwise_oscillation(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    t: Point,
    windows: &[f64],
    sampler: OscSampler,
) -> Result<OscillationProfile> {
    use rand::Rng;
    if t.value() < a.value() || t.value() > b.value() {
        return Err(Error::Domain(format!("point {t} outside [{a}, {b}]")));
    }
    if windows.is_empty() || windows.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("window schedule must be strictly decreasing".into()));
    }

    // Per-window corpora: samples drawn inside each window, reused by
    // every larger window so the estimates are exactly monotone.
    let mut level_points: Vec<Vec<Point>> = Vec::with_capacity(windows.len());
    for (k, delta) in windows.iter().enumerate() {
        let lo = a.value().max(t.value() - delta);
        let hi = b.value().min(t.value() + delta);
        let mut pts = Vec::with_capacity(2 * sampler.pairs + 2);
        let mut rng = exec::subrng(sampler.seed, 10_000 + k as u64);
        for _ in 0..sampler.pairs {
            pts.push(Point::real(rng.gen_range(lo..=hi)));
            pts.push(Point::real(rng.gen_range(lo..=hi)));
        }
        if sampler.witness_assisted {
            // Witness radius respects the window clamp on both sides.
            let radius = (t.value() - lo).max(hi - t.value());
            if let Some(v) = f.best_witness(t, radius.min(*delta)) {
                if v.value() >= lo && v.value() <= hi {
                    pts.push(v);
                }
            }
        }
        level_points.push(pts);
    }

    let evals: Vec<(f64, Option<(Point, Point)>)> = exec::map_indexed(windows.len(), |k| {
        let mut corpus: Vec<Point> = vec![t];
        for pts in level_points.iter().skip(k) {
            corpus.extend_from_slice(pts);
        }
        corpus_oscillation(f, &corpus)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let per_window: Vec<f64> = evals.iter().map(|(e, _)| *e).collect();
    let non_increasing = per_window.windows(2).all(|w| w[1] <= w[0]);
    let (estimate, witness) = evals.last().cloned().unwrap();
    Ok(OscillationProfile {
        function: f.id(),
        space: f.space().to_string(),
        target: OscTarget::Point { t: t.value() },
        estimate,
        windows: windows.to_vec(),
        per_window,
        sample_pairs: sampler.pairs,
        seed: sampler.seed,
        lower_bound_only: !(sampler.witness_assisted && f.has_witness()),
        witness: witness.map(|(u, v)| (u.to_string(), v.to_string())),
        non_increasing,
        annotations: f.space().hypothesis_annotations(),
    })
}

/// Default Darboux schedule: uniform partitions from 8 intervals to
/// 4096, each refining the previous.
pub fn default_darboux_schedule() -> Vec<usize> {
    (0..10).map(|j| 8usize << j).collect()
}

/// Darboux integrability probe: oscillation sums along a refining
/// schedule. Passes when the final estimate falls below ε; otherwise
/// fails, and the minimum over the trace is the persisting bound.
pub fn darboux_probe(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    schedule: &[usize],
    epsilon: f64,
    sampler: OscSampler,
) -> Result<CriterionReport> {
    if epsilon <= 0.0 {
        return Err(Error::Domain("ε must be positive".into()));
    }
    if schedule.is_empty() {
        return Err(Error::Domain("empty partition schedule".into()));
    }
    let mut trace = Vec::with_capacity(schedule.len());
    let mut witness = None;
    for n in schedule {
        let partition = Partition::uniform(a, b, *n)?;
        let profile = oscillation_sum(f, &partition, sampler)?;
        trace.push(profile.estimate);
        if let Some((u, v)) = &profile.witness {
            witness = Some((u.clone(), v.clone()));
        }
    }
    let last = *trace.last().unwrap();
    let passed = last < epsilon;
    Ok(CriterionReport {
        criterion: CRITERION_DARBOUX.to_string(),
        function: f.id(),
        space: f.space().to_string(),
        worst_separation: last,
        witness: witness.map(|(u, v)| CriterionWitness::PointPair { u, v }),
        samples: schedule.len(),
        seed: sampler.seed,
        tolerance: Some(epsilon),
        verdict: if passed { Verdict::Passed } else { Verdict::Failed },
        annotations: f.space().hypothesis_annotations(),
        trace,
    })
}

/// Bracketed estimate of `m(E_r)`, `E_r = { t : ω(f, t) >= r }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub function: String,
    pub space: String,
    pub r: f64,
    pub resolution: usize,
    /// Measure of windows around grid points confirmed at or above `r`
    /// (and not simultaneously verified below — see `conflicts`).
    pub lower: f64,
    /// Measure of windows that could not be verified below `r`.
    pub upper: f64,
    /// Grid points with contradictory evidence, excluded from `lower`.
    pub conflicts: usize,
    pub seed: u64,
    pub annotations: Vec<String>,
}

/// Per-grid-point classification row for the CSV export.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridClassRow {
    pub t: f64,
    pub omega_estimate: f64,
    pub class: String,
}

/// Classifies a uniform grid by pointwise oscillation against `r`,
/// with window radius equal to the grid step.
///
/// A point is *confirmed* when its witness-assisted window estimate
/// reaches `r`, and *verified below* when the integrand's analytic
/// pointwise-oscillation bound over the window stays under `r`.
/// Black-box integrands verify nothing, so their upper bracket is the
/// whole interval.
pub fn discontinuity_measure(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    r: f64,
    resolution: usize,
    sampler: OscSampler,
) -> Result<(MeasureEstimate, Vec<GridClassRow>)> {
    use rand::Rng;
    if r <= 0.0 {
        return Err(Error::Domain("r must be positive".into()));
    }
    if resolution < 2 {
        return Err(Error::Domain("resolution must be at least 2".into()));
    }
    let span = b.value() - a.value();
    if span <= 0.0 {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    let step = span / resolution as f64;

    struct Cell {
        t: f64,
        est: f64,
        confirmed: bool,
        verified_below: bool,
    }

    let cells: Vec<Cell> = exec::map_indexed(resolution + 1, |g| -> Result<Cell> {
        let t = Point::affine(a, b, g as i64, resolution as i64);
        let lo_v = a.value().max(t.value() - step);
        let hi_v = b.value().min(t.value() + step);
        let mut corpus: Vec<Point> = vec![t];
        let mut rng = exec::subrng(sampler.seed, 500_000 + g as u64);
        for _ in 0..sampler.pairs {
            corpus.push(Point::real(rng.gen_range(lo_v..=hi_v)));
            corpus.push(Point::real(rng.gen_range(lo_v..=hi_v)));
        }
        if sampler.witness_assisted {
            let radius = (t.value() - lo_v).max(hi_v - t.value());
            if let Some(v) = f.best_witness(t, radius) {
                if v.value() >= lo_v && v.value() <= hi_v {
                    corpus.push(v);
                }
            }
        }
        let (est, _) = corpus_oscillation(f, &corpus)?;
        let verified_below = f
            .pointwise_oscillation_sup(Point::real(lo_v), Point::real(hi_v))
            .map(|sup| sup < r)
            .unwrap_or(false);
        Ok(Cell { t: t.value(), est, confirmed: est >= r, verified_below })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let window = |t: f64| (a.value().max(t - step), b.value().min(t + step));
    let lower_windows: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.confirmed && !c.verified_below)
        .map(|c| window(c.t))
        .collect();
    let upper_windows: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| !c.verified_below)
        .map(|c| window(c.t))
        .collect();
    let conflicts = cells.iter().filter(|c| c.confirmed && c.verified_below).count();

    let rows = cells
        .iter()
        .map(|c| GridClassRow {
            t: c.t,
            omega_estimate: c.est,
            class: if c.confirmed {
                "confirmed_ge_r".to_string()
            } else if c.verified_below {
                "verified_below_r".to_string()
            } else {
                "unresolved".to_string()
            },
        })
        .collect();

    Ok((
        MeasureEstimate {
            function: f.id(),
            space: f.space().to_string(),
            r,
            resolution,
            lower: interval_measure(&lower_windows)?,
            upper: interval_measure(&upper_windows)?,
            conflicts,
            seed: sampler.seed,
            annotations: f.space().hypothesis_annotations(),
        },
        rows,
    ))
}

//! Riemann sums, the sampled integral estimator and executable
//! integrability criteria.
//!
//! Sampled probes cannot certify integrability — the criteria quantify
//! over all tagged partitions — so every report distinguishes "refuted
//! with witness" from "no violation found". A refutation is sound: the
//! stored witness pair re-evaluates to the reported separation. A pass
//! is evidence only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::partitions::{Partition, PartitionJson, TagRule, TaggedPartition};
use crate::point::Point;
use crate::spaces::{Space, VectorValue};

/// A function from `[a, b]` into a declared metric vector space,
/// optionally carrying the analytic metadata that makes sup-type
/// estimates tight (gallery functions do; black-box integrands fall
/// back to sampling).
pub trait Integrand: Sync {
    /// Stable identifier used in reports and the CLI.
    fn id(&self) -> String;

    fn space(&self) -> &Space;

    fn eval(&self, t: Point) -> VectorValue;

    /// Known bound `L` with `d(0, f(t)) <= L` on the domain.
    fn bound(&self) -> Option<f64> {
        None
    }

    /// Natural domain, when the function has one.
    fn domain(&self) -> Option<(Point, Point)> {
        None
    }

    /// Whether the discontinuity-witness hooks below are available.
    fn has_witness(&self) -> bool {
        false
    }

    /// Best-separation point `v` with `|v - t| <= radius`, per the
    /// function's known discontinuity structure.
    fn best_witness(&self, _t: Point, _radius: f64) -> Option<Point> {
        None
    }

    /// Witness with a demanded separation: returns `v` with
    /// `|v - t| <= radius` and `d(f(t), f(v)) >= target`, or `None`.
    fn witness(&self, t: Point, radius: f64, target: f64) -> Option<Point> {
        let v = self.best_witness(t, radius)?;
        let d = self.space().metric(&self.eval(t), &self.eval(v)).ok()?;
        (d >= target).then_some(v)
    }

    /// Tag pair inside `[lo, hi]` maximizing `d(f(u), f(v))` per the
    /// function's structure metadata.
    fn adversary_pair(&self, _lo: Point, _hi: Point) -> Option<(Point, Point)> {
        None
    }

    /// A point `u` in `[lo, hi]` with pointwise oscillation at least
    /// `r`, when the structure metadata locates one.
    fn high_oscillation_tag(&self, _lo: Point, _hi: Point, _r: f64) -> Option<Point> {
        None
    }

    /// Analytic value of `sup { d(f(u), f(v)) : u, v in [lo, hi] }`.
    fn interval_oscillation_sup(&self, _lo: Point, _hi: Point) -> Option<f64> {
        None
    }

    /// Analytic value of `sup { ω(f, t) : t in [lo, hi] }`.
    fn pointwise_oscillation_sup(&self, _lo: Point, _hi: Point) -> Option<f64> {
        None
    }

    /// Human-readable description of the known discontinuity structure.
    fn structure(&self) -> Option<String> {
        None
    }
}

/// Left-to-right accumulation of `(t_i - t_{i-1}) f(s_i)`.
pub fn riemann_sum(f: &dyn Integrand, tp: &TaggedPartition) -> Result<VectorValue> {
    let space = f.space();
    let mut acc = space.zero();
    for i in 0..tp.len() {
        let (lo, hi) = tp.partition().interval(i);
        let width = hi.value() - lo.value();
        space.axpy_into(&mut acc, width, &f.eval(tp.tag(i)))?;
    }
    space.renormalize(&mut acc);
    Ok(acc)
}

/// Configuration of the sampled integrator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IntegrateConfig {
    /// Convergence tolerance ε of the final-level Cauchy check.
    pub tolerance: f64,
    /// First mesh level divides `b - a` by this.
    pub mesh_start_div: usize,
    /// Number of mesh halvings explored.
    pub mesh_levels: usize,
    /// Random taggings drawn per level, on top of the deterministic
    /// left/right/midpoint rules and the adversarial pair.
    pub tag_samples: usize,
    pub seed: u64,
}

impl Default for IntegrateConfig {
    /// Geometric mesh halving from `(b-a)/8` down to `(b-a)/2^14`,
    /// eight random taggings per level.
    fn default() -> IntegrateConfig {
        IntegrateConfig {
            tolerance: 1e-4,
            mesh_start_div: 8,
            mesh_levels: 12,
            tag_samples: 8,
            seed: 0,
        }
    }
}

impl IntegrateConfig {
    pub fn with_seed(mut self, seed: u64) -> IntegrateConfig {
        self.seed = seed;
        self
    }

    pub fn interval_counts(&self) -> Vec<usize> {
        (0..self.mesh_levels)
            .map(|j| self.mesh_start_div << j)
            .collect()
    }
}

/// One mesh level of an integration run; rows of the CSV convergence
/// table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelRow {
    pub mesh: f64,
    pub worst_separation: f64,
    pub samples: usize,
}

/// Worst observed pair of Riemann sums and the partitions behind them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionPairWitness {
    pub first: PartitionJson,
    pub second: PartitionJson,
    pub separation: f64,
}

/// Integral estimate plus Cauchy-criterion diagnostics.
///
/// The per-level check is sampled and one-sided: it can refute
/// convergence with a witness but only gathers evidence for it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub function: String,
    pub space: String,
    pub a: f64,
    pub b: f64,
    pub tolerance: f64,
    pub tag_samples_per_level: usize,
    pub seed: u64,
    pub levels: Vec<LevelRow>,
    /// True iff the final level's worst pairwise distance is below
    /// `tolerance`.
    pub converged: bool,
    /// Riemann sum of the finest midpoint partition.
    pub estimate: VectorValue,
    /// Worst pair at the final level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartitionPairWitness>,
    pub annotations: Vec<String>,
}

struct LevelOutcome {
    mesh: f64,
    worst: f64,
    samples: usize,
    witness: Option<(TaggedPartition, TaggedPartition, f64)>,
    midpoint_sum: VectorValue,
}

/// All taggings a level evaluates: deterministic rules, seeded random
/// draws, and the adversarial pair when the integrand exposes one.
fn level_taggings(
    f: &dyn Integrand,
    base: &Partition,
    tag_samples: usize,
    seed: u64,
    level: u64,
) -> Result<Vec<TaggedPartition>> {
    let mut taggings = vec![
        TaggedPartition::with_rule(base.clone(), TagRule::Midpoint)?,
        TaggedPartition::with_rule(base.clone(), TagRule::Left)?,
        TaggedPartition::with_rule(base.clone(), TagRule::Right)?,
    ];
    for s in 0..tag_samples {
        let stream = level * 4096 + s as u64;
        taggings.push(TaggedPartition::with_rule(
            base.clone(),
            TagRule::SeededRandom { seed: seed.wrapping_add(stream) },
        )?);
    }
    if f.has_witness() {
        if let Some((u_side, v_side)) = adversarial_taggings(f, base)? {
            taggings.push(u_side);
            taggings.push(v_side);
        }
    }
    Ok(taggings)
}

/// Builds the adversarial tagging pair over `base`: in each interval
/// where the integrand locates a separating pair the two sides take its
/// ends, elsewhere both take the midpoint. Returns `None` when no
/// interval separates.
pub fn adversarial_taggings(
    f: &dyn Integrand,
    base: &Partition,
) -> Result<Option<(TaggedPartition, TaggedPartition)>> {
    let pairs = exec::map_indexed(base.len(), |i| {
        let (lo, hi) = base.interval(i);
        f.adversary_pair(lo, hi)
    });
    if pairs.iter().all(Option::is_none) {
        return Ok(None);
    }
    let mut u_tags = Vec::with_capacity(base.len());
    let mut v_tags = Vec::with_capacity(base.len());
    for (i, pair) in pairs.iter().enumerate() {
        let (lo, hi) = base.interval(i);
        match pair {
            Some((u, v)) => {
                u_tags.push(*u);
                v_tags.push(*v);
            }
            None => {
                let m = Point::midpoint(lo, hi);
                u_tags.push(m);
                v_tags.push(m);
            }
        }
    }
    Ok(Some((
        TaggedPartition::new(base.clone(), u_tags)?,
        TaggedPartition::new(base.clone(), v_tags)?,
    )))
}

/// Worst pairwise metric distance among the taggings' Riemann sums.
fn worst_pair(
    f: &dyn Integrand,
    taggings: &[TaggedPartition],
) -> Result<(f64, Option<(TaggedPartition, TaggedPartition, f64)>)> {
    let sums = exec::map_indexed(taggings.len(), |i| riemann_sum(f, &taggings[i]));
    let sums: Vec<VectorValue> = sums.into_iter().collect::<Result<_>>()?;
    let space = f.space();
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..sums.len() {
        for j in (i + 1)..sums.len() {
            let d = space.metric(&sums[i], &sums[j])?;
            if d > worst {
                worst = d;
                witness = Some((taggings[i].clone(), taggings[j].clone(), d));
            }
        }
    }
    Ok((worst, witness))
}

/// Sampled integral estimator over a geometric mesh schedule.
///
/// Each level draws tag-sampled partitions of a uniform grid, records
/// the worst pairwise distance among their Riemann sums, and the run
/// converges when the final level's worst distance drops below the
/// tolerance. The estimate is the finest midpoint Riemann sum.
/// Non-convergence within the schedule is an ordinary report, not an
/// error.
pub fn integrate(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    cfg: &IntegrateConfig,
) -> Result<IntegrationReport> {
    if a.value() >= b.value() {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    if cfg.tolerance <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let ns = cfg.interval_counts();
    let outcomes = exec::map_indexed(ns.len(), |level| -> Result<LevelOutcome> {
        let n = ns[level];
        let base = Partition::uniform(a, b, n)?;
        let taggings = level_taggings(f, &base, cfg.tag_samples, cfg.seed, level as u64)?;
        let (worst, witness) = worst_pair(f, &taggings)?;
        Ok(LevelOutcome {
            mesh: base.mesh(),
            worst,
            samples: taggings.len(),
            witness,
            midpoint_sum: riemann_sum(f, &taggings[0])?,
        })
    });
    let outcomes: Vec<LevelOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let last = outcomes.last().expect("at least one mesh level");
    let converged = last.worst < cfg.tolerance;
    let witness = last.witness.as_ref().map(|(p, q, d)| PartitionPairWitness {
        first: PartitionJson::from(p),
        second: PartitionJson::from(q),
        separation: *d,
    });
    Ok(IntegrationReport {
        function: f.id(),
        space: f.space().to_string(),
        a: a.value(),
        b: b.value(),
        tolerance: cfg.tolerance,
        tag_samples_per_level: cfg.tag_samples,
        seed: cfg.seed,
        levels: outcomes
            .iter()
            .map(|o| LevelRow { mesh: o.mesh, worst_separation: o.worst, samples: o.samples })
            .collect(),
        converged,
        estimate: last.midpoint_sum.clone(),
        witness,
        annotations: f.space().hypothesis_annotations(),
    })
}

/// Which integrability criterion a probe exercised.
pub const CRITERION_MESH_CAUCHY: &str = "mesh-cauchy(ii)";
pub const CRITERION_REFINEMENT_CAUCHY: &str = "refinement-cauchy(iii)";
pub const CRITERION_SAME_POINTS: &str = "same-points(iv)";
pub const CRITERION_VARIATION: &str = "variation(2.3-prop)";
pub const CRITERION_DARBOUX: &str = "darboux(3.1)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A witness pushes the separation past the tolerance.
    RefutedWithWitness,
    /// Sampling found nothing; evidence, not certification.
    NoViolationFound,
    Passed,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionWitness {
    PartitionPair { first: PartitionJson, second: PartitionJson },
    /// A point pair in the exact point grammar, for oscillation-style
    /// refutations.
    PointPair { u: String, v: String },
    Collection { intervals: Vec<(f64, f64)> },
}

/// Outcome of one criterion probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub function: String,
    pub space: String,
    pub worst_separation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CriterionWitness>,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    pub annotations: Vec<String>,
    /// Per-schedule-step separations, when the probe walks a schedule.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<f64>,
}

impl CriterionReport {
    fn from_worst(
        criterion: &str,
        f: &dyn Integrand,
        worst: f64,
        witness: Option<(TaggedPartition, TaggedPartition, f64)>,
        samples: usize,
        seed: u64,
        tolerance: Option<f64>,
    ) -> CriterionReport {
        let verdict = match tolerance {
            Some(eps) if worst >= eps => Verdict::RefutedWithWitness,
            _ => Verdict::NoViolationFound,
        };
        CriterionReport {
            criterion: criterion.to_string(),
            function: f.id(),
            space: f.space().to_string(),
            worst_separation: worst,
            witness: witness.map(|(p, q, _)| CriterionWitness::PartitionPair {
                first: PartitionJson::from(&p),
                second: PartitionJson::from(&q),
            }),
            samples,
            seed,
            tolerance,
            verdict,
            annotations: f.space().hypothesis_annotations(),
            trace: vec![],
        }
    }
}

/// Sampler shared by the partition-pair probes.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeSampler {
    pub samples: usize,
    pub seed: u64,
}

impl ProbeSampler {
    pub fn new(samples: usize, seed: u64) -> ProbeSampler {
        ProbeSampler { samples, seed }
    }
}

/// Criterion (ii) probe: worst `d(f(Δ1), f(Δ2))` over sampled tagged
/// partitions of mesh below `delta`. The corpus holds uniform grids at
/// the two finest admissible dyadic levels with deterministic, random
/// and adversarial taggings, so it contains every same-points pair the
/// corresponding criterion (iv) probe would evaluate on those grids.
pub fn mesh_cauchy_probe(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    delta: f64,
    sampler: ProbeSampler,
    tolerance: Option<f64>,
) -> Result<CriterionReport> {
    if delta <= 0.0 {
        return Err(Error::Domain("mesh bound must be positive".into()));
    }
    let span = b.value() - a.value();
    if span <= 0.0 {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    let n0 = (span / delta).floor() as usize + 1;
    let mut taggings = Vec::new();
    for (k, n) in [n0, 2 * n0].into_iter().enumerate() {
        let base = Partition::uniform(a, b, n)?;
        taggings.extend(level_taggings(f, &base, sampler.samples, sampler.seed, k as u64)?);
    }
    let samples = taggings.len();
    let (worst, witness) = worst_pair(f, &taggings)?;
    Ok(CriterionReport::from_worst(
        CRITERION_MESH_CAUCHY,
        f,
        worst,
        witness,
        samples,
        sampler.seed,
        tolerance,
    ))
}

/// Criterion (iii) probe: worst pair over sampled tagged partitions
/// refining `base`.
pub fn refinement_cauchy_probe(
    f: &dyn Integrand,
    base: &Partition,
    sampler: ProbeSampler,
    tolerance: Option<f64>,
) -> Result<CriterionReport> {
    let mut taggings = level_taggings(f, base, 0, sampler.seed, 0)?;
    for s in 0..sampler.samples {
        let refined = random_refinement(base, sampler.seed, s as u64)?;
        taggings.push(TaggedPartition::with_rule(
            refined,
            TagRule::SeededRandom { seed: sampler.seed.wrapping_add(7919 + s as u64) },
        )?);
    }
    let samples = taggings.len();
    let (worst, witness) = worst_pair(f, &taggings)?;
    Ok(CriterionReport::from_worst(
        CRITERION_REFINEMENT_CAUCHY,
        f,
        worst,
        witness,
        samples,
        sampler.seed,
        tolerance,
    ))
}

fn random_refinement(base: &Partition, seed: u64, stream: u64) -> Result<Partition> {
    use rand::Rng;
    let mut rng = exec::subrng(seed, 100_000 + stream);
    let mut points = Vec::new();
    for i in 0..base.len() {
        let (lo, hi) = base.interval(i);
        points.push(lo);
        let extra = rng.gen_range(0..3usize);
        let mut cuts: Vec<f64> = (0..extra)
            .map(|_| rng.gen_range(lo.value()..hi.value()))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for c in cuts {
            if c > lo.value() && c < hi.value() {
                points.push(Point::real(c));
            }
        }
    }
    points.push(base.b());
    Partition::new(points)
}

/// Tag-search mode of the same-points probe.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagSearch {
    /// Deterministic rules plus seeded random taggings.
    SeededRandom(ProbeSampler),
    /// The single adversarial pair driven by the integrand's witness
    /// metadata; errors when the integrand exposes none.
    Adversarial,
}

/// Criterion (iv) probe: worst pair among taggings sharing exactly the
/// points of `base`.
pub fn same_points_probe(
    f: &dyn Integrand,
    base: &Partition,
    search: TagSearch,
    tolerance: Option<f64>,
) -> Result<CriterionReport> {
    let (taggings, seed) = match search {
        TagSearch::SeededRandom(sampler) => {
            (level_taggings(f, base, sampler.samples, sampler.seed, 0)?, sampler.seed)
        }
        TagSearch::Adversarial => {
            if !f.has_witness() {
                return Err(Error::Capability(format!(
                    "{} exposes no discontinuity witness for adversarial tag search",
                    f.id()
                )));
            }
            match adversarial_taggings(f, base)? {
                Some((u, v)) => (vec![u, v], 0),
                None => (vec![TaggedPartition::with_rule(base.clone(), TagRule::Midpoint)?], 0),
            }
        }
    };
    let samples = taggings.len();
    let (worst, witness) = worst_pair(f, &taggings)?;
    Ok(CriterionReport::from_worst(
        CRITERION_SAME_POINTS,
        f,
        worst,
        witness,
        samples,
        seed,
        tolerance,
    ))
}

/// Sampler for the variation-condition probe.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VariationSampler {
    pub collections: usize,
    pub max_intervals: usize,
    pub seed: u64,
}

fn collection_value(f: &dyn Integrand, intervals: &[(Point, Point)]) -> Result<f64> {
    let space = f.space();
    let mut acc = space.zero();
    for (c, d) in intervals {
        let inc = space.sub(&f.eval(*d), &f.eval(*c))?;
        acc = space.add(&acc, &inc)?;
    }
    space.norm(&acc)
}

/// Lower-bound estimator for the variation condition
/// `sup d(0, Σ_i (f(d_i) - f(c_i)))` over finite collections of
/// nonoverlapping closed subintervals.
///
/// The corpus combines whole uniform partitions (whose sums telescope to
/// `f(b) - f(a)`), seeded random collections, dyadic-endpoint straddles
/// that catch step discontinuities, and a greedy packing of the best
/// individual intervals seen.
pub fn variation_bound_estimate(
    f: &dyn Integrand,
    a: Point,
    b: Point,
    sampler: VariationSampler,
) -> Result<CriterionReport> {
    use rand::Rng;
    if sampler.collections == 0 || sampler.max_intervals == 0 {
        return Err(Error::Domain("sampler bounds must be positive".into()));
    }
    let span = b.value() - a.value();
    if span <= 0.0 {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }

    let mut collections: Vec<Vec<(Point, Point)>> = Vec::new();

    // Whole uniform partitions; their sums telescope to f(b) - f(a).
    let mut m = 1usize;
    while m <= sampler.max_intervals {
        let grid = Partition::uniform(a, b, m)?;
        collections.push((0..m).map(|i| grid.interval(i)).collect());
        m *= 2;
    }

    // Seeded random nonoverlapping collections.
    for c in 0..sampler.collections {
        let mut rng = exec::subrng(sampler.seed, c as u64);
        let k = rng.gen_range(1..=sampler.max_intervals);
        let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(a.value()..b.value())).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pairs: Vec<(Point, Point)> = cuts
            .chunks_exact(2)
            .map(|w| (Point::real(w[0]), Point::real(w[1])))
            .collect();
        if !pairs.is_empty() {
            collections.push(pairs);
        }
    }

    // Dyadic straddles: short intervals ending exactly on odd dyadic
    // points, where step-function coordinates flip.
    for level in 1..=10u32 {
        let den = 1i64 << level;
        let h = span / (1i64 << (level + 2)) as f64;
        let mut intervals = Vec::new();
        for j in (1..den).step_by(2) {
            if intervals.len() >= sampler.max_intervals {
                break;
            }
            let end = Point::affine(a, b, j, den);
            let start = Point::real(end.value() - h);
            if start.value() > a.value() {
                intervals.push((start, end));
            }
        }
        if !intervals.is_empty() {
            collections.push(intervals);
        }
    }

    let values = exec::map_indexed(collections.len(), |i| collection_value(f, &collections[i]));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;

    // Greedy packing of the best individual intervals.
    let mut singles: Vec<(Point, Point)> = collections.iter().flatten().copied().collect();
    let space = f.space();
    let mut scored: Vec<(f64, usize)> = exec::map_indexed(singles.len(), |i| {
        collection_value(f, std::slice::from_ref(&singles[i])).map(|v| (v, i))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut greedy: Vec<(Point, Point)> = Vec::new();
    let mut acc = space.zero();
    let mut acc_norm = 0.0f64;
    for (_, idx) in scored.into_iter().take(256) {
        if greedy.len() >= sampler.max_intervals {
            break;
        }
        let (c, d) = singles[idx];
        let disjoint = greedy
            .iter()
            .all(|(gc, gd)| d.value() <= gc.value() || c.value() >= gd.value());
        if !disjoint {
            continue;
        }
        let candidate = space.add(&acc, &space.sub(&f.eval(d), &f.eval(c))?)?;
        let norm = space.norm(&candidate)?;
        if norm > acc_norm {
            acc = candidate;
            acc_norm = norm;
            greedy.push((c, d));
        }
    }
    singles.clear();

    let mut worst = acc_norm;
    let mut best: Vec<(Point, Point)> = greedy;
    for (i, v) in values.iter().enumerate() {
        if *v > worst {
            worst = *v;
            best = collections[i].clone();
        }
    }

    Ok(CriterionReport {
        criterion: CRITERION_VARIATION.to_string(),
        function: f.id(),
        space: f.space().to_string(),
        worst_separation: worst,
        witness: Some(CriterionWitness::Collection {
            intervals: best.iter().map(|(c, d)| (c.value(), d.value())).collect(),
        }),
        samples: collections.len(),
        seed: sampler.seed,
        tolerance: None,
        verdict: Verdict::NoViolationFound,
        annotations: f.space().hypothesis_annotations(),
        trace: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Space;
    use approx::assert_abs_diff_eq;

    /// Minimal test integrands.
    pub struct ConstFn {
        pub space: Space,
        pub value: VectorValue,
    }

    impl Integrand for ConstFn {
        fn id(&self) -> String {
            "const".into()
        }
        fn space(&self) -> &Space {
            &self.space
        }
        fn eval(&self, _t: Point) -> VectorValue {
            self.value.clone()
        }
        fn bound(&self) -> Option<f64> {
            self.space.norm(&self.value).ok()
        }
    }

    pub struct LinearFn {
        pub space: Space,
    }

    impl Integrand for LinearFn {
        fn id(&self) -> String {
            "t*e1".into()
        }
        fn space(&self) -> &Space {
            &self.space
        }
        fn eval(&self, t: Point) -> VectorValue {
            VectorValue::Dense(vec![t.value()])
        }
        fn bound(&self) -> Option<f64> {
            Some(1.0)
        }
    }

    fn linear() -> LinearFn {
        LinearFn { space: Space::euclidean(1) }
    }

    #[test]
    fn constant_sum_is_the_constant() {
        let f = ConstFn {
            space: Space::euclidean(2),
            value: VectorValue::Dense(vec![2.0, -3.5]),
        };
        for rule in [TagRule::Left, TagRule::Midpoint, TagRule::SeededRandom { seed: 3 }] {
            let tp = TaggedPartition::uniform(Point::zero(), Point::one(), 16, rule).unwrap();
            assert_eq!(riemann_sum(&f, &tp).unwrap(), f.value);
        }
    }

    #[test]
    fn left_rule_linear_value() {
        let tp = TaggedPartition::uniform(Point::zero(), Point::one(), 4, TagRule::Left).unwrap();
        assert_eq!(
            riemann_sum(&linear(), &tp).unwrap(),
            VectorValue::Dense(vec![0.375])
        );
    }

    #[test]
    fn midpoint_rule_exact_for_linear() {
        for n in [1usize, 2, 4, 8, 64] {
            let tp = TaggedPartition::uniform(Point::zero(), Point::one(), n, TagRule::Midpoint).unwrap();
            let s = riemann_sum(&linear(), &tp).unwrap();
            assert_eq!(s, VectorValue::Dense(vec![0.5]), "n={n}");
        }
        for n in [3usize, 7, 10] {
            let tp = TaggedPartition::uniform(Point::zero(), Point::one(), n, TagRule::Midpoint).unwrap();
            match riemann_sum(&linear(), &tp).unwrap() {
                VectorValue::Dense(v) => assert_abs_diff_eq!(v[0], 0.5, epsilon = 1e-14),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn integrate_constant_converges_at_first_level() {
        let f = ConstFn {
            space: Space::euclidean(1),
            value: VectorValue::Dense(vec![2.0]),
        };
        let cfg = IntegrateConfig { mesh_levels: 3, ..Default::default() };
        let report = integrate(&f, Point::zero(), Point::one(), &cfg).unwrap();
        assert!(report.converged);
        assert_eq!(report.levels[0].worst_separation, 0.0);
        assert_eq!(report.estimate, VectorValue::Dense(vec![2.0]));
    }

    #[test]
    fn integrate_reports_are_deterministic() {
        let f = linear();
        let cfg = IntegrateConfig { mesh_levels: 5, ..Default::default() }.with_seed(9);
        let r1 = integrate(&f, Point::zero(), Point::one(), &cfg).unwrap();
        let r2 = integrate(&f, Point::zero(), Point::one(), &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn riemann_sum_is_linear() {
        use proptest::prelude::*;
        let space = Space::euclidean(1);
        proptest!(|(seed in 0u64..200, lambda in -3.0f64..3.0)| {
            let tp = TaggedPartition::uniform(
                Point::zero(),
                Point::one(),
                6,
                TagRule::SeededRandom { seed },
            ).unwrap();
            let f = linear();
            let g = ConstFn { space: space.clone(), value: VectorValue::Dense(vec![0.75]) };
            // sum(f) + sum(g) equals the sum of the pointwise-added integrand
            let sum_f = riemann_sum(&f, &tp).unwrap();
            let sum_g = riemann_sum(&g, &tp).unwrap();
            struct AddFn<'a>(&'a LinearFn, &'a ConstFn);
            impl Integrand for AddFn<'_> {
                fn id(&self) -> String { "f+g".into() }
                fn space(&self) -> &Space { self.0.space() }
                fn eval(&self, t: Point) -> VectorValue {
                    self.0.space().add(&self.0.eval(t), &self.1.eval(t)).unwrap()
                }
            }
            let sum_fg = riemann_sum(&AddFn(&f, &g), &tp).unwrap();
            let expect = space.add(&sum_f, &sum_g).unwrap();
            prop_assert!(space.metric(&sum_fg, &expect).unwrap() <= 1e-12);

            struct ScaleFn<'a>(&'a LinearFn, f64);
            impl Integrand for ScaleFn<'_> {
                fn id(&self) -> String { "λf".into() }
                fn space(&self) -> &Space { self.0.space() }
                fn eval(&self, t: Point) -> VectorValue {
                    self.0.space().scale(self.1, &self.0.eval(t)).unwrap()
                }
            }
            let sum_lf = riemann_sum(&ScaleFn(&f, lambda), &tp).unwrap();
            let expect = space.scale(lambda, &sum_f).unwrap();
            prop_assert!(space.metric(&sum_lf, &expect).unwrap() <= 1e-12);
        });
    }

    #[test]
    fn probes_report_zero_on_constants() {
        let f = ConstFn {
            space: Space::euclidean(1),
            value: VectorValue::Dense(vec![1.0]),
        };
        let base = Partition::uniform(Point::zero(), Point::one(), 8).unwrap();
        let sampler = ProbeSampler::new(6, 3);
        let mesh = mesh_cauchy_probe(&f, Point::zero(), Point::one(), 0.1, sampler, None).unwrap();
        assert_eq!(mesh.worst_separation, 0.0);
        let refine = refinement_cauchy_probe(&f, &base, sampler, None).unwrap();
        assert_eq!(refine.worst_separation, 0.0);
        let same = same_points_probe(&f, &base, TagSearch::SeededRandom(sampler), None).unwrap();
        assert_eq!(same.worst_separation, 0.0);
    }

    #[test]
    fn adversarial_mode_needs_a_witness() {
        let f = linear();
        let base = Partition::uniform(Point::zero(), Point::one(), 8).unwrap();
        assert!(matches!(
            same_points_probe(&f, &base, TagSearch::Adversarial, None),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn variation_estimate_of_linear_telescopes_to_one() {
        let report = variation_bound_estimate(
            &linear(),
            Point::zero(),
            Point::one(),
            VariationSampler { collections: 50, max_intervals: 8, seed: 5 },
        )
        .unwrap();
        // Every collection's total length is at most 1; the whole-partition
        // family telescopes to exactly f(1) - f(0).
        assert!(report.worst_separation <= 1.0 + 1e-12);
        assert_abs_diff_eq!(report.worst_separation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn variation_estimate_of_constant_is_zero() {
        let f = ConstFn {
            space: Space::euclidean(1),
            value: VectorValue::Dense(vec![4.0]),
        };
        let report = variation_bound_estimate(
            &f,
            Point::zero(),
            Point::one(),
            VariationSampler { collections: 30, max_intervals: 6, seed: 5 },
        )
        .unwrap();
        assert_eq!(report.worst_separation, 0.0);
    }

    #[test]
    fn witness_pair_reproduces_reported_separation() {
        let f = linear();
        let report = integrate(
            &f,
            Point::zero(),
            Point::one(),
            &IntegrateConfig { mesh_levels: 2, tolerance: 1e-9, ..Default::default() },
        )
        .unwrap();
        let w = report.witness.expect("non-degenerate worst pair");
        let p = w.first.to_tagged().unwrap();
        let q = w.second.to_tagged().unwrap();
        let d = f
            .space()
            .metric(&riemann_sum(&f, &p).unwrap(), &riemann_sum(&f, &q).unwrap())
            .unwrap();
        assert_abs_diff_eq!(d, w.separation, epsilon = 1e-12);
    }
}

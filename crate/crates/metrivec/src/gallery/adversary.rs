//! The adversarial tagged-partition construction: two taggings of the
//! same uniform partition whose Riemann sums separate by at least
//! `r · m(E_r) / 4` when the discontinuity set `E_r` has mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::integration::{riemann_sum, Integrand};
use crate::oscillation::{discontinuity_measure, OscSampler};
use crate::partitions::{Partition, PartitionJson, TaggedPartition};
use crate::point::Point;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AdversaryConfig {
    /// Oscillation threshold `r` of the targeted set `E_r`.
    pub r: f64,
    /// Uniform partition size `N`.
    pub n: usize,
    /// Grid resolution of the measure bracket for the floor.
    pub measure_resolution: usize,
    pub seed: u64,
}

/// Two same-points taggings with their achieved separation and the
/// theoretical floor `r·m(E_r)/4` built from the lower measure bracket.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdversaryResult {
    pub function: String,
    pub space: String,
    pub r: f64,
    pub n: usize,
    pub first: PartitionJson,
    pub second: PartitionJson,
    pub measure_lower: f64,
    pub measure_upper: f64,
    pub achieved_separation: f64,
    pub floor: f64,
    /// Intervals that met `E_r` and received a separating tag pair.
    pub intervals_separated: usize,
    pub seed: u64,
    pub annotations: Vec<String>,
}

/// Builds the uniform `N`-partition over the integrand's domain; in
/// each interval meeting `E_r` (per the integrand's metadata) the first
/// tagging takes a high-oscillation point and the second a witness with
/// separation at least `r/2`, while the remaining intervals tag both
/// sides identically. Errors name the first interval whose witness
/// cannot reach `r/2`.
pub fn adversary_partitions(f: &dyn Integrand, cfg: &AdversaryConfig) -> Result<AdversaryResult> {
    if cfg.r <= 0.0 {
        return Err(Error::Domain("r must be positive".into()));
    }
    if !f.has_witness() {
        return Err(Error::Capability(format!(
            "{} exposes no discontinuity witness",
            f.id()
        )));
    }
    let (a, b) = f.domain().unwrap_or((Point::zero(), Point::one()));
    if let Some(sup) = f.pointwise_oscillation_sup(a, b) {
        if cfg.r > sup {
            return Err(Error::Domain(format!(
                "r = {} exceeds the function's known oscillation sup {sup}",
                cfg.r
            )));
        }
    }
    let base = Partition::uniform(a, b, cfg.n)?;

    let picks = exec::map_indexed(base.len(), |i| {
        let (lo, hi) = base.interval(i);
        f.high_oscillation_tag(lo, hi, cfg.r)
            .map(|_| f.adversary_pair(lo, hi))
    });
    let mut u_tags = Vec::with_capacity(base.len());
    let mut v_tags = Vec::with_capacity(base.len());
    let mut separated = 0usize;
    for (i, pick) in picks.into_iter().enumerate() {
        let (lo, hi) = base.interval(i);
        match pick {
            Some(pair) => {
                let (u, v) = pair.ok_or_else(|| Error::Construction {
                    lo: lo.value(),
                    hi: hi.value(),
                    reason: "high-oscillation point located but no tag pair".into(),
                })?;
                let d = f.space().metric(&f.eval(u), &f.eval(v))?;
                if d < cfg.r / 2.0 - 1e-12 {
                    return Err(Error::Construction {
                        lo: lo.value(),
                        hi: hi.value(),
                        reason: format!("witness separation {d} below r/2 = {}", cfg.r / 2.0),
                    });
                }
                u_tags.push(u);
                v_tags.push(v);
                separated += 1;
            }
            None => {
                let m = Point::midpoint(lo, hi);
                u_tags.push(m);
                v_tags.push(m);
            }
        }
    }
    let first = TaggedPartition::new(base.clone(), u_tags)?;
    let second = TaggedPartition::new(base, v_tags)?;
    let achieved = f
        .space()
        .metric(&riemann_sum(f, &first)?, &riemann_sum(f, &second)?)?;

    let (measure, _) = discontinuity_measure(
        f,
        a,
        b,
        cfg.r,
        cfg.measure_resolution,
        OscSampler::new(4, cfg.seed),
    )?;

    Ok(AdversaryResult {
        function: f.id(),
        space: f.space().to_string(),
        r: cfg.r,
        n: cfg.n,
        first: PartitionJson::from(&first),
        second: PartitionJson::from(&second),
        measure_lower: measure.lower,
        measure_upper: measure.upper,
        achieved_separation: achieved,
        floor: cfg.r * measure.lower / 4.0,
        intervals_separated: separated,
        seed: cfg.seed,
        annotations: f.space().hypothesis_annotations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{RationalEnumeration, RationalIndicator};
    use crate::spaces::Space;
    use approx::assert_abs_diff_eq;

    #[test]
    fn indicator_telescopes_to_e1() {
        let f = RationalIndicator::new(Space::l1_gamma());
        let cfg = AdversaryConfig { r: 1.0, n: 100, measure_resolution: 512, seed: 3 };
        let result = adversary_partitions(&f, &cfg).unwrap();
        assert_abs_diff_eq!(result.achieved_separation, 1.0, epsilon = 1e-12);
        assert!(result.measure_lower >= 0.9, "lower bracket {}", result.measure_lower);
        assert!(result.achieved_separation >= result.floor);
        assert_eq!(result.intervals_separated, 100);
        // Stored witnesses re-evaluate to the reported separation.
        let p = result.first.to_tagged().unwrap();
        let q = result.second.to_tagged().unwrap();
        let d = f
            .space()
            .metric(&riemann_sum(&f, &p).unwrap(), &riemann_sum(&f, &q).unwrap())
            .unwrap();
        assert_abs_diff_eq!(d, result.achieved_separation, epsilon = 1e-12);
    }

    #[test]
    fn enumerated_rationals_in_l1_style_metric_reach_one() {
        let f = RationalEnumeration::new(1000, Space::lp(1.0, 1024).unwrap()).unwrap();
        let cfg = AdversaryConfig { r: 1.0, n: 50, measure_resolution: 256, seed: 3 };
        let result = adversary_partitions(&f, &cfg).unwrap();
        assert_eq!(result.intervals_separated, 50);
        assert_abs_diff_eq!(result.achieved_separation, 1.0, epsilon = 1e-9);
        // Finite discontinuity set: the floor collapses with the lower bracket.
        assert!(result.achieved_separation >= result.floor);
    }

    #[test]
    fn same_construction_under_l2_falls_below_the_floor_scale() {
        let f = RationalEnumeration::new(1000, Space::lp(2.0, 1024).unwrap()).unwrap();
        let cfg = AdversaryConfig { r: 1.0, n: 50, measure_resolution: 256, seed: 3 };
        let result = adversary_partitions(&f, &cfg).unwrap();
        // Disjoint supports: the 2-norm of 50 summands of weight 1/50.
        assert_abs_diff_eq!(result.achieved_separation, 1.0 / 50f64.sqrt(), epsilon = 1e-6);
        assert!(result.achieved_separation < 0.25);
    }

    #[test]
    fn r_above_known_oscillation_is_rejected() {
        let f = RationalIndicator::new(Space::l1_gamma());
        let cfg = AdversaryConfig { r: 1.5, n: 10, measure_resolution: 64, seed: 3 };
        assert!(matches!(adversary_partitions(&f, &cfg), Err(Error::Domain(_))));
    }
}

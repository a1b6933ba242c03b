//! Tagged partitions of a closed interval and the constructions built
//! on them: mesh, refinement, uniform generation, re-tagging and the
//! point-union merge.
//!
//! Point identity in `refines` and `merge` is exact equality of
//! [`Point`] representations. Callers that want shared points must
//! derive them from shared expressions; a tolerance-based identity
//! would corrupt the refinement partial order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::point::Point;

/// Strictly increasing partition points `a = t_0 < ... < t_N = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    points: Vec<Point>,
}

impl Partition {
    /// Builds a partition, rejecting fewer than two points and any
    /// non-increasing (including zero-width) step.
    pub fn new(points: Vec<Point>) -> Result<Partition> {
        if points.len() < 2 {
            return Err(Error::Domain("partition needs at least two points".into()));
        }
        for w in points.windows(2) {
            if w[0].value() >= w[1].value() {
                return Err(Error::Domain(format!(
                    "partition points must be strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Partition { points })
    }

    /// `N` equal-width intervals over `[a, b]`, exact on rational
    /// endpoints.
    pub fn uniform(a: Point, b: Point, n: usize) -> Result<Partition> {
        if a.value() >= b.value() {
            return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
        }
        if n == 0 {
            return Err(Error::Domain("need at least one interval".into()));
        }
        let points = (0..=n)
            .map(|i| Point::affine(a, b, i as i64, n as i64))
            .collect();
        Partition::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn a(&self) -> Point {
        self.points[0]
    }

    pub fn b(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self, i: usize) -> (Point, Point) {
        (self.points[i], self.points[i + 1])
    }

    /// Maximum interval width.
    pub fn mesh(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].value() - w[0].value())
            .fold(0.0, f64::max)
    }

    fn same_endpoints(&self, other: &Partition) -> Result<()> {
        if self.a() != other.a() || self.b() != other.b() {
            return Err(Error::Domain(format!(
                "endpoint mismatch: [{}, {}] vs [{}, {}]",
                self.a(),
                self.b(),
                other.a(),
                other.b()
            )));
        }
        Ok(())
    }

    /// True iff `self`'s points contain all of `other`'s (exact
    /// representation equality). Errors on endpoint mismatch.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        self.same_endpoints(other)?;
        let mut fine = self.points.iter();
        'outer: for p in &other.points {
            for q in fine.by_ref() {
                if q == p {
                    continue 'outer;
                }
                if q.value() > p.value() {
                    return Ok(false);
                }
            }
            return Ok(false);
        }
        Ok(true)
    }
}

/// How tags are placed when generating a partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagRule {
    Left,
    Right,
    Midpoint,
    /// Deterministic given the seed.
    SeededRandom { seed: u64 },
}

/// A partition together with one tag inside each interval.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedPartition {
    partition: Partition,
    tags: Vec<Point>,
}

impl TaggedPartition {
    /// Validates tag containment `t_{i-1} <= s_i <= t_i`.
    pub fn new(partition: Partition, tags: Vec<Point>) -> Result<TaggedPartition> {
        if tags.len() != partition.len() {
            return Err(Error::Invariant(format!(
                "expected {} tags, got {}",
                partition.len(),
                tags.len()
            )));
        }
        for (i, tag) in tags.iter().enumerate() {
            let (lo, hi) = partition.interval(i);
            if tag.value() < lo.value() || tag.value() > hi.value() {
                return Err(Error::Invariant(format!(
                    "tag {tag} outside interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(TaggedPartition { partition, tags })
    }

    /// Uniform partition with tags placed by `rule`.
    pub fn uniform(a: Point, b: Point, n: usize, rule: TagRule) -> Result<TaggedPartition> {
        let partition = Partition::uniform(a, b, n)?;
        TaggedPartition::with_rule(partition, rule)
    }

    /// Tags an existing partition by `rule`.
    pub fn with_rule(partition: Partition, rule: TagRule) -> Result<TaggedPartition> {
        let tags = match rule {
            TagRule::Left => (0..partition.len()).map(|i| partition.interval(i).0).collect(),
            TagRule::Right => (0..partition.len()).map(|i| partition.interval(i).1).collect(),
            TagRule::Midpoint => (0..partition.len())
                .map(|i| {
                    let (lo, hi) = partition.interval(i);
                    Point::midpoint(lo, hi)
                })
                .collect(),
            TagRule::SeededRandom { seed } => {
                let mut rng = exec::subrng(seed, 0);
                (0..partition.len())
                    .map(|i| {
                        let (lo, hi) = partition.interval(i);
                        Point::real(rng.gen_range(lo.value()..hi.value()))
                    })
                    .collect()
            }
        };
        TaggedPartition::new(partition, tags)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn tags(&self) -> &[Point] {
        &self.tags
    }

    pub fn tag(&self, i: usize) -> Point {
        self.tags[i]
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mesh(&self) -> f64 {
        self.partition.mesh()
    }

    /// Merges the refinement points into this tagged partition.
    ///
    /// The result's points are the union of both point sets. Every
    /// result interval that coincides with an interval of `self` keeps
    /// its tag; the remaining intervals take midpoint tags, the fixed
    /// instantiation of "choose arbitrarily". The result refines both
    /// inputs.
    pub fn merge(&self, refinement: &Partition) -> Result<TaggedPartition> {
        self.partition.same_endpoints(refinement)?;
        let mut points: Vec<Point> = Vec::with_capacity(self.partition.points().len() + refinement.points().len());
        let mut ia = self.partition.points().iter().peekable();
        let mut ib = refinement.points().iter().peekable();
        while let (Some(&&pa), Some(&&pb)) = (ia.peek(), ib.peek()) {
            if pa == pb {
                points.push(pa);
                ia.next();
                ib.next();
            } else if pa.value() < pb.value() {
                points.push(pa);
                ia.next();
            } else {
                points.push(pb);
                ib.next();
            }
        }
        points.extend(ia.copied());
        points.extend(ib.copied());
        let merged = Partition::new(points)?;

        // Intervals of `self` by their exact endpoints, for rule 1°.
        let own: Vec<(Point, Point)> = (0..self.len()).map(|i| self.partition.interval(i)).collect();
        let mut own_iter = own.iter().enumerate().peekable();
        let mut tags = Vec::with_capacity(merged.len());
        for i in 0..merged.len() {
            let (lo, hi) = merged.interval(i);
            while let Some((_, (a, _))) = own_iter.peek() {
                if a.value() < lo.value() {
                    own_iter.next();
                } else {
                    break;
                }
            }
            let coincides = own_iter
                .peek()
                .map(|(k, (a, b))| (*a == lo && *b == hi).then_some(*k))
                .flatten();
            match coincides {
                Some(k) => tags.push(self.tags[k]),
                None => tags.push(Point::midpoint(lo, hi)),
            }
        }
        TaggedPartition::new(merged, tags)
    }

    /// Same points, new tags from `tag_source(i, lo, hi)`; errors if a
    /// produced tag leaves its interval.
    pub fn retag(&self, tag_source: impl Fn(usize, Point, Point) -> Point) -> Result<TaggedPartition> {
        let tags = (0..self.len())
            .map(|i| {
                let (lo, hi) = self.partition.interval(i);
                tag_source(i, lo, hi)
            })
            .collect();
        TaggedPartition::new(self.partition.clone(), tags)
    }
}

/// Wire form of a tagged partition. Points and tags are written in the
/// exact point grammar (`"1/3"`, `"~0.7071"`) so that stored witnesses
/// re-evaluate to the same function values, rationality included.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionJson {
    pub points: Vec<String>,
    pub tags: Vec<String>,
}

impl From<&TaggedPartition> for PartitionJson {
    fn from(tp: &TaggedPartition) -> PartitionJson {
        PartitionJson {
            points: tp.partition().points().iter().map(|p| p.to_string()).collect(),
            tags: tp.tags().iter().map(|p| p.to_string()).collect(),
        }
    }
}

impl PartitionJson {
    /// Rebuilds the tagged partition; exact round-trip of the grammar.
    pub fn to_tagged(&self) -> Result<TaggedPartition> {
        let points = self
            .points
            .iter()
            .map(|s| Point::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let tags = self
            .tags
            .iter()
            .map(|s| Point::parse(s))
            .collect::<Result<Vec<_>>>()?;
        TaggedPartition::new(Partition::new(points)?, tags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(p: i64, q: i64) -> Point {
        Point::rational(p, q).unwrap()
    }

    #[test]
    fn uniform_left_and_midpoint() {
        let tp = TaggedPartition::uniform(Point::zero(), Point::one(), 2, TagRule::Left).unwrap();
        assert_eq!(
            tp.partition().points(),
            &[Point::zero(), pt(1, 2), Point::one()]
        );
        assert_eq!(tp.tags(), &[Point::zero(), pt(1, 2)]);

        let tp = TaggedPartition::uniform(Point::zero(), Point::one(), 4, TagRule::Midpoint).unwrap();
        assert_eq!(tp.tags(), &[pt(1, 8), pt(3, 8), pt(5, 8), pt(7, 8)]);
    }

    #[test]
    fn uniform_rejects_bad_interval() {
        assert!(TaggedPartition::uniform(Point::one(), Point::zero(), 4, TagRule::Left).is_err());
        assert!(TaggedPartition::uniform(Point::zero(), Point::zero(), 4, TagRule::Left).is_err());
    }

    #[test]
    fn mesh_values() {
        let p = Partition::new(vec![Point::zero(), pt(1, 5), Point::one()]).unwrap();
        assert_abs_diff_eq!(p.mesh(), 0.8);
        for n in [1usize, 7, 10, 64] {
            let u = Partition::uniform(Point::zero(), Point::one(), n).unwrap();
            assert_abs_diff_eq!(u.mesh(), 1.0 / n as f64, epsilon = 1e-15);
        }
        let p = Partition::new(vec![Point::zero(), pt(1, 2), pt(3, 4), Point::one()]).unwrap();
        assert_abs_diff_eq!(p.mesh(), 0.5);
    }

    #[test]
    fn refines_is_point_subset() {
        let coarse = Partition::new(vec![Point::zero(), Point::one()]).unwrap();
        let fine = Partition::new(vec![Point::zero(), pt(1, 2), Point::one()]).unwrap();
        let other = Partition::new(vec![Point::zero(), pt(3, 10), Point::one()]).unwrap();
        assert!(fine.refines(&coarse).unwrap());
        assert!(!fine.refines(&other).unwrap());
        assert!(fine.refines(&fine).unwrap());
        let shifted = Partition::new(vec![Point::zero(), pt(1, 2), pt(2, 1)]).unwrap();
        assert!(matches!(fine.refines(&shifted), Err(Error::Domain(_))));
    }

    #[test]
    fn merge_keeps_coinciding_tags_and_midpoints_the_rest() {
        // Union adds nothing: unchanged.
        let tp = TaggedPartition::new(
            Partition::new(vec![Point::zero(), pt(1, 2), Point::one()]).unwrap(),
            vec![pt(1, 4), pt(3, 4)],
        )
        .unwrap();
        let trivial = Partition::new(vec![Point::zero(), Point::one()]).unwrap();
        let merged = tp.merge(&trivial).unwrap();
        assert_eq!(merged, tp);

        // No interval coincides: midpoint rule everywhere.
        let tp = TaggedPartition::new(
            Partition::new(vec![Point::zero(), Point::one()]).unwrap(),
            vec![pt(1, 2)],
        )
        .unwrap();
        let refinement = Partition::new(vec![Point::zero(), pt(2, 5), Point::one()]).unwrap();
        let merged = tp.merge(&refinement).unwrap();
        assert_eq!(
            merged.partition().points(),
            &[Point::zero(), pt(2, 5), Point::one()]
        );
        assert_eq!(merged.tags(), &[pt(1, 5), pt(7, 10)]);
    }

    #[test]
    fn merge_refines_both_inputs() {
        for seed in 0..1000u64 {
            let mut rng = exec::subrng(42, seed);
            let n1 = rng.gen_range(1..8usize);
            let n2 = rng.gen_range(1..8usize);
            let tp = TaggedPartition::uniform(Point::zero(), Point::one(), n1, TagRule::Midpoint).unwrap();
            let other = Partition::uniform(Point::zero(), Point::one(), n2).unwrap();
            let merged = tp.merge(&other).unwrap();
            assert!(merged.partition().refines(&other).unwrap());
            assert!(merged.partition().refines(tp.partition()).unwrap());
            // Idempotent in points.
            let again = merged.merge(&other).unwrap();
            assert_eq!(again.partition().points(), merged.partition().points());
        }
    }

    #[test]
    fn retag_matches_rules() {
        let left = TaggedPartition::uniform(Point::zero(), Point::one(), 4, TagRule::Left).unwrap();
        let mid = left.retag(|_, lo, hi| Point::midpoint(lo, hi)).unwrap();
        assert_eq!(
            mid,
            TaggedPartition::uniform(Point::zero(), Point::one(), 4, TagRule::Midpoint).unwrap()
        );
        let same = left.retag(|i, _, _| left.tag(i)).unwrap();
        assert_eq!(same, left);
        assert!(matches!(
            left.retag(|_, _, _| pt(2, 1)),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn seeded_random_tags_are_deterministic() {
        let a = TaggedPartition::uniform(Point::zero(), Point::one(), 16, TagRule::SeededRandom { seed: 5 }).unwrap();
        let b = TaggedPartition::uniform(Point::zero(), Point::one(), 16, TagRule::SeededRandom { seed: 5 }).unwrap();
        let c = TaggedPartition::uniform(Point::zero(), Point::one(), 16, TagRule::SeededRandom { seed: 6 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut tp = TaggedPartition::uniform(Point::zero(), Point::one(), 4, TagRule::Midpoint).unwrap();
        tp = tp
            .retag(|i, lo, hi| if i == 2 { Point::real(0.5 * (lo.value() + hi.value())) } else { Point::midpoint(lo, hi) })
            .unwrap();
        let wire = PartitionJson::from(&tp);
        let back = wire.to_tagged().unwrap();
        assert_eq!(back, tp); // representation-exact, rationality preserved
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_point_set() -> impl Strategy<Value = Vec<i64>> {
            proptest::collection::btree_set(1i64..63, 0..8)
                .prop_map(|s| s.into_iter().collect())
        }

        fn partition_from(interior: &[i64]) -> Partition {
            let mut pts = vec![Point::zero()];
            pts.extend(interior.iter().map(|i| pt(*i, 64)));
            pts.push(Point::one());
            Partition::new(pts).unwrap()
        }

        proptest! {
            #[test]
            fn refines_is_a_partial_order(a in arb_point_set(), b in arb_point_set(), c in arb_point_set()) {
                let pa = partition_from(&a);
                let pb = partition_from(&b);
                let pc = partition_from(&c);
                // reflexive
                prop_assert!(pa.refines(&pa).unwrap());
                // antisymmetric on point sets
                if pa.refines(&pb).unwrap() && pb.refines(&pa).unwrap() {
                    prop_assert_eq!(pa.points(), pb.points());
                }
                // transitive
                if pa.refines(&pb).unwrap() && pb.refines(&pc).unwrap() {
                    prop_assert!(pa.refines(&pc).unwrap());
                }
            }

            #[test]
            fn merge_points_are_the_union(a in arb_point_set(), b in arb_point_set()) {
                let ta = TaggedPartition::with_rule(partition_from(&a), TagRule::Midpoint).unwrap();
                let pb = partition_from(&b);
                let merged = ta.merge(&pb).unwrap();
                prop_assert!(merged.partition().refines(ta.partition()).unwrap());
                prop_assert!(merged.partition().refines(&pb).unwrap());
                let expected = a.iter().chain(b.iter()).cloned().collect::<std::collections::BTreeSet<_>>();
                prop_assert_eq!(merged.partition().points().len(), expected.len() + 2);
            }
        }
    }
}

//! Minimum hitting sets for query intervals and the slabs they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArmId, ArmPoints, Interval};

/// Sorted points `e_1 < ... < e_tau`, each strictly inside every interval it hits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSet {
    pub points: Vec<f64>,
}

impl HittingSet {
    pub fn tau(&self) -> usize {
        self.points.len()
    }

    /// True if some point lies strictly inside `interval`.
    pub fn hits(&self, interval: &Interval) -> bool {
        let idx = self.points.partition_point(|&e| e <= interval.left);
        self.points.get(idx).is_some_and(|&e| e < interval.right)
    }
}

/// Sorted, deduplicated endpoint values of `intervals`.
fn endpoint_values(intervals: &[Interval]) -> Vec<f64> {
    let mut values: Vec<f64> = intervals
        .iter()
        .flat_map(|iv| [iv.left, iv.right])
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Canonical candidate hitting points: midpoints of consecutive distinct
/// endpoint values, plus one point below the minimum and one above the maximum.
///
/// Any point strictly inside an interval hits the same intervals as the
/// midpoint of the gap it falls in, so restricting to these loses nothing.
pub fn candidate_points(intervals: &[Interval]) -> Vec<f64> {
    let values = endpoint_values(intervals);
    let (Some(&lo), Some(&hi)) = (values.first(), values.last()) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(lo - 1.0);
    out.extend(values.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
    out.push(hi + 1.0);
    out
}

/// Greedy minimum hitting set for open-interval stabbing.
///
/// Intervals are deduplicated and scanned by right endpoint; each interval not
/// yet hit receives the rightmost candidate midpoint strictly inside it.
pub fn min_hitting_set(intervals: &[Interval]) -> HittingSet {
    let mut sorted: Vec<Interval> = intervals.to_vec();
    sorted.sort_by(|a, b| a.right.total_cmp(&b.right).then(a.left.total_cmp(&b.left)));
    sorted.dedup();

    let candidates = candidate_points(&sorted);
    let mut chosen: Vec<f64> = Vec::new();
    for iv in &sorted {
        // Chosen points are increasing, and all lie left of this interval's right end.
        if chosen.last().is_some_and(|&e| e > iv.left) {
            continue;
        }
        let idx = candidates.partition_point(|&c| c < iv.right);
        let point = candidates[idx - 1];
        debug_assert!(iv.left < point && point < iv.right);
        chosen.push(point);
    }
    HittingSet { points: chosen }
}

/// One slab `[left, right]`; the outer slabs have an infinite end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub index: usize,
    pub left: f64,
    pub right: f64,
}

impl Slab {
    pub fn contains(&self, point: f64) -> bool {
        self.left <= point && point <= self.right
    }

    pub fn as_interval(&self) -> Interval {
        Interval {
            left: self.left,
            right: self.right,
        }
    }

    pub fn intersects(&self, iv: &Interval) -> bool {
        self.left <= iv.right && iv.left <= self.right
    }
}

/// The `tau + 1` slabs cut out of the real line by a hitting set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabDecomposition {
    pub boundaries: Vec<f64>,
    pub slabs: Vec<Slab>,
}

impl SlabDecomposition {
    pub fn len(&self) -> usize {
        self.slabs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    /// Index range `(x, y)` of the slabs meeting `iv`; always contiguous.
    pub fn cover(&self, iv: &Interval) -> (usize, usize) {
        let first = self.boundaries.partition_point(|&e| e < iv.left);
        let last = self.boundaries.partition_point(|&e| e <= iv.right);
        // Slab j spans [e_j, e_{j+1}] with e_0 = -inf; a boundary equal to
        // iv.left also lets slab `first` touch iv at a single point.
        (first, last.min(self.slabs.len() - 1))
    }

    /// Every interval meets at least two slabs (Property P).
    pub fn satisfies_property_p(&self, intervals: &[Interval]) -> bool {
        intervals.iter().all(|iv| {
            let (x, y) = self.cover(iv);
            x < y
        })
    }
}

pub fn build_slabs(hitting_set: &HittingSet) -> Result<SlabDecomposition> {
    let pts = &hitting_set.points;
    if pts.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidHittingSet("points must be finite".into()));
    }
    if let Some(w) = pts.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidHittingSet(format!(
            "points must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(f64::NEG_INFINITY);
    edges.extend_from_slice(pts);
    edges.push(f64::INFINITY);
    let slabs = edges
        .windows(2)
        .enumerate()
        .map(|(index, w)| Slab {
            index,
            left: w[0],
            right: w[1],
        })
        .collect();
    Ok(SlabDecomposition {
        boundaries: pts.clone(),
        slabs,
    })
}

/// Arms whose point lies in the closed interval, in id order.
pub fn arms_in_interval<P: ArmPoints + ?Sized>(arms: &P, interval: &Interval) -> Vec<ArmId> {
    arms.points()
        .iter()
        .enumerate()
        .filter(|(_, &p)| interval.contains(p))
        .map(|(id, _)| id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arm, Instance, RewardDistribution};

    fn iv(l: f64, r: f64) -> Interval {
        Interval::new(l, r).unwrap()
    }

    #[test]
    fn common_intersection_needs_one_point() {
        let hs = min_hitting_set(&[iv(0.0, 2.0), iv(1.0, 3.0), iv(1.5, 2.5)]);
        assert_eq!(hs.tau(), 1);
        assert!(hs.points[0] > 1.5 && hs.points[0] < 2.0);
    }

    #[test]
    fn disjoint_intervals_need_one_point_each() {
        let ivs: Vec<_> = (0..7)
            .map(|i| iv(i as f64 * 3.0, i as f64 * 3.0 + 1.0))
            .collect();
        assert_eq!(min_hitting_set(&ivs).tau(), 7);
    }

    #[test]
    fn touching_intervals_are_not_hit_by_a_shared_endpoint() {
        let hs = min_hitting_set(&[iv(0.0, 1.0), iv(1.0, 2.0)]);
        assert_eq!(hs.tau(), 2);
    }

    #[test]
    fn duplicates_and_empty_input() {
        assert_eq!(min_hitting_set(&[]).tau(), 0);
        assert_eq!(min_hitting_set(&[iv(0.0, 1.0), iv(0.0, 1.0)]).tau(), 1);
    }

    #[test]
    fn slab_counts() {
        let s = build_slabs(&HittingSet { points: vec![1.0] }).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            (s.slabs[0].left, s.slabs[0].right),
            (f64::NEG_INFINITY, 1.0)
        );
        assert_eq!((s.slabs[1].left, s.slabs[1].right), (1.0, f64::INFINITY));
        let s = build_slabs(&HittingSet {
            points: vec![1.0, 2.0, 3.0],
        })
        .unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(
            build_slabs(&HittingSet { points: vec![] }).unwrap().len(),
            1
        );
    }

    #[test]
    fn slab_construction_rejects_bad_points() {
        assert!(build_slabs(&HittingSet {
            points: vec![2.0, 1.0]
        })
        .is_err());
        assert!(build_slabs(&HittingSet {
            points: vec![1.0, 1.0]
        })
        .is_err());
    }

    #[test]
    fn boundary_arm_belongs_to_both_slabs() {
        let arms = (0..3)
            .map(|i| Arm {
                id: i,
                point: i as f64 * 0.5 + 0.5,
                distribution: RewardDistribution::constant(vec![0.5]),
            })
            .collect();
        let inst = Instance::new(1, arms, vec![iv(0.0, 2.0)]).unwrap();
        let slabs = build_slabs(&HittingSet { points: vec![1.0] }).unwrap();
        let left = arms_in_interval(&inst, &slabs.slabs[0].as_interval());
        let right = arms_in_interval(&inst, &slabs.slabs[1].as_interval());
        assert_eq!(left, vec![0, 1]);
        assert_eq!(right, vec![1, 2]);
        assert!(arms_in_interval(&inst, &iv(5.0, 6.0)).is_empty());
        assert_eq!(arms_in_interval(&inst, &iv(0.0, 6.0)), vec![0, 1, 2]);
    }

    #[test]
    fn cover_is_contiguous_and_spans_two() {
        let ivs = [iv(0.0, 2.0), iv(1.0, 3.0), iv(5.0, 6.0)];
        let hs = min_hitting_set(&ivs);
        let slabs = build_slabs(&hs).unwrap();
        assert!(slabs.satisfies_property_p(&ivs));
        for v in &ivs {
            let (x, y) = slabs.cover(v);
            for j in 0..slabs.len() {
                assert_eq!(slabs.slabs[j].intersects(v), (x..=y).contains(&j));
            }
        }
    }
}

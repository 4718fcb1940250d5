use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use super::dominates;
use crate::model::{ObjectiveVector, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub solution: Solution,
    pub objectives: ObjectiveVector,
    /// Insertion sequence number, unique per archive.
    pub seq: u64,
}

/// Outcome of offering a candidate to the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Offer {
    /// Some entry dominates the candidate.
    Dominated,
    /// An entry with the same objective vector already exists.
    Duplicate,
    /// Inserted; `removed` entries were dominated by it, `pruned` dropped for capacity.
    Inserted { removed: usize, pruned: bool },
}

impl Offer {
    pub fn inserted(self) -> bool {
        matches!(self, Offer::Inserted { .. })
    }
}

/// The mutually non-dominated alternatives found so far. Entries are kept in
/// insertion order; objective vectors are unique.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
    capacity: Option<NonZeroUsize>,
    next_seq: u64,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn with_capacity(capacity: Option<NonZeroUsize>) -> Self {
        Archive { capacity, ..Archive::default() }
    }

    pub fn capacity(&self) -> Option<NonZeroUsize> {
        self.capacity
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.objectives).collect()
    }

    pub fn offer(&mut self, solution: &Solution, objectives: ObjectiveVector) -> Offer {
        for e in &self.entries {
            if e.objectives == objectives {
                return Offer::Duplicate;
            }
            if dominates(&e.objectives, &objectives) {
                return Offer::Dominated;
            }
        }
        let before = self.entries.len();
        self.entries.retain(|e| !dominates(&objectives, &e.objectives));
        let removed = before - self.entries.len();
        self.entries.push(ArchiveEntry { solution: solution.clone(), objectives, seq: self.next_seq });
        self.next_seq += 1;
        let pruned = match self.capacity {
            Some(cap) if self.entries.len() > cap.get() => {
                let victim = self.most_crowded();
                self.entries.remove(victim);
                true
            }
            _ => false,
        };
        Offer::Inserted { removed, pruned }
    }

    /// Index of the entry with the smallest crowding distance; ties go to the
    /// most recently inserted entry.
    fn most_crowded(&self) -> usize {
        let crowding = crowding_distances(&self.objectives());
        let mut victim = 0;
        for i in 1..self.entries.len() {
            let (ci, cv) = (crowding[i], crowding[victim]);
            if ci < cv || (ci == cv && self.entries[i].seq > self.entries[victim].seq) {
                victim = i;
            }
        }
        victim
    }
}

/// Objective-space crowding distance with range normalisation per objective.
/// Boundary points of every objective with a non-zero range are infinite.
#[allow(clippy::needless_range_loop)]
pub(crate) fn crowding_distances(vectors: &[ObjectiveVector]) -> Vec<f64> {
    let n = vectors.len();
    let mut crowding = vec![0.0; n];
    if n < 3 {
        return vec![f64::INFINITY; n];
    }
    let comps: Vec<[f64; 4]> = vectors.iter().map(ObjectiveVector::components).collect();
    for k in 0..ObjectiveVector::LEN {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| comps[a][k].total_cmp(&comps[b][k]).then(a.cmp(&b)));
        let (lo, hi) = (comps[order[0]][k], comps[order[n - 1]][k]);
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        crowding[order[0]] = f64::INFINITY;
        crowding[order[n - 1]] = f64::INFINITY;
        for w in order.windows(3) {
            crowding[w[1]] += (comps[w[2]][k] - comps[w[0]][k]) / range;
        }
    }
    crowding
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::brute_force_front;
    use proptest::prelude::*;

    fn ov(a: f64, b: u32) -> ObjectiveVector {
        ObjectiveVector::new(a, b, 0.0, 0)
    }

    fn dummy() -> Solution {
        Solution::new(vec![vec![1]])
    }

    #[test]
    fn dominating_candidate_replaces() {
        let mut a = Archive::new();
        a.offer(&dummy(), ov(10.0, 2));
        assert_eq!(a.offer(&dummy(), ov(9.0, 2)), Offer::Inserted { removed: 1, pruned: false });
        assert_eq!(a.objectives(), vec![ov(9.0, 2)]);
    }

    #[test]
    fn incomparable_candidates_coexist() {
        let mut a = Archive::new();
        a.offer(&dummy(), ov(10.0, 2));
        assert!(a.offer(&dummy(), ov(12.0, 1)).inserted());
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn duplicates_and_dominated_are_rejected() {
        let mut a = Archive::new();
        a.offer(&dummy(), ov(10.0, 2));
        let other = Solution::new(vec![vec![2]]);
        assert_eq!(a.offer(&other, ov(10.0, 2)), Offer::Duplicate);
        assert_eq!(a.entries()[0].solution, dummy());
        assert_eq!(a.offer(&dummy(), ov(11.0, 2)), Offer::Dominated);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn capacity_prunes_interior_point() {
        let mut a = Archive::with_capacity(NonZeroUsize::new(3));
        a.offer(&dummy(), ov(0.0, 10));
        a.offer(&dummy(), ov(10.0, 0));
        a.offer(&dummy(), ov(5.0, 5));
        assert_eq!(a.offer(&dummy(), ov(6.0, 4)), Offer::Inserted { removed: 0, pruned: true });
        assert_eq!(a.len(), 3);
        // extremes survive
        let objs = a.objectives();
        assert!(objs.contains(&ov(0.0, 10)) && objs.contains(&ov(10.0, 0)));
    }

    #[test]
    fn crowding_ties_remove_latest() {
        let mut a = Archive::with_capacity(NonZeroUsize::new(1));
        a.offer(&dummy(), ov(0.0, 10));
        assert_eq!(a.offer(&dummy(), ov(10.0, 0)), Offer::Inserted { removed: 0, pruned: true });
        assert_eq!(a.objectives(), vec![ov(0.0, 10)]);
    }

    proptest! {
        #[test]
        fn archive_matches_brute_force(stream in prop::collection::vec((0u32..8, 1u32..5, 0u32..4), 0..80)) {
            let vs: Vec<ObjectiveVector> = stream
                .iter()
                .map(|&(a, b, c)| ObjectiveVector::new(a as f64, b, c as f64, c.min(1)))
                .collect();
            let mut a = Archive::new();
            for v in &vs {
                a.offer(&dummy(), *v);
            }
            let mut expected: Vec<ObjectiveVector> = Vec::new();
            for i in brute_force_front(&vs) {
                if !expected.contains(&vs[i]) {
                    expected.push(vs[i]);
                }
            }
            let got = a.objectives();
            prop_assert_eq!(got.len(), expected.len());
            prop_assert!(expected.iter().all(|e| got.contains(e)));
        }
    }
}

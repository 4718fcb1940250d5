//! Initialisation and variation operators on the giant-tour representation.
//!
//! Every operator returns a solution that visits each customer exactly once
//! and respects vehicle capacity; whenever a move breaks capacity the giant
//! tour is re-split greedily.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{distance, Customer, Instance, Solution};

/// Share of the initial population seeded by nearest-neighbour tours.
const NN_SEED_SHARE: usize = 5;

/// Greedy nearest-neighbour giant tour from `start` (the depot when `None`).
/// Ties go to the customer listed first in the instance.
pub fn nearest_neighbor_tour(instance: &Instance, start: Option<u32>) -> Vec<u32> {
    let customers = instance.customers();
    let mut visited = vec![false; customers.len()];
    let mut tour = Vec::with_capacity(customers.len());
    let mut here: &Customer = instance.depot();
    if let Some(id) = start {
        if let Some(slot) = customers.iter().position(|c| c.id == id) {
            visited[slot] = true;
            tour.push(id);
            here = &customers[slot];
        }
    }
    while tour.len() < customers.len() {
        let mut best: Option<(usize, f64)> = None;
        for (slot, c) in customers.iter().enumerate() {
            if visited[slot] {
                continue;
            }
            let d = distance(here, c);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((slot, d));
            }
        }
        let (slot, _) = best.expect("unvisited customer remains");
        visited[slot] = true;
        tour.push(customers[slot].id);
        here = &customers[slot];
    }
    tour
}

/// Initial genotypes: one pure nearest-neighbour tour from the depot, a share
/// of nearest-neighbour tours from random first customers, and random
/// permutations. Random permutations are split against a randomly reduced
/// capacity (50-100 %), which varies the fleet sizes present at the start.
pub fn initial_solutions<R: Rng + ?Sized>(instance: &Instance, size: usize, rng: &mut R) -> Vec<Solution> {
    let capacity = instance.vehicle_capacity();
    let max_demand = instance.customers().iter().map(|c| c.demand).fold(0.0, f64::max);
    let ids: Vec<u32> = instance.customer_ids().collect();
    (0..size)
        .map(|i| {
            if i == 0 {
                Solution::split_greedy(&nearest_neighbor_tour(instance, None), instance, capacity)
            } else if i % NN_SEED_SHARE == 1 {
                let start = ids[rng.random_range(0..ids.len())];
                Solution::split_greedy(&nearest_neighbor_tour(instance, Some(start)), instance, capacity)
            } else {
                let mut tour = ids.clone();
                tour.shuffle(rng);
                let limit = (capacity * rng.random_range(0.5..=1.0)).max(max_demand);
                Solution::split_greedy(&tour, instance, limit)
            }
        })
        .collect()
}

/// Order crossover: keeps a random slice of `p1` in place and fills the
/// remaining positions with the missing genes in `p2`'s order, starting after
/// the slice and wrapping around.
pub fn order_crossover<R: Rng + ?Sized>(p1: &[u32], p2: &[u32], rng: &mut R) -> Vec<u32> {
    let n = p1.len();
    debug_assert_eq!(n, p2.len());
    if n < 2 {
        return p1.to_vec();
    }
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    order_crossover_at(p1, p2, lo, hi)
}

fn order_crossover_at(p1: &[u32], p2: &[u32], lo: usize, hi: usize) -> Vec<u32> {
    let n = p1.len();
    let kept = &p1[lo..=hi];
    let mut child = vec![0; n];
    child[lo..=hi].copy_from_slice(kept);
    let mut fill = (hi + 1) % n;
    for k in 0..n {
        let gene = p2[(hi + 1 + k) % n];
        if kept.contains(&gene) {
            continue;
        }
        child[fill] = gene;
        fill = (fill + 1) % n;
    }
    child
}

/// OX on the parents' giant tours, re-split greedily by capacity.
pub fn crossover<R: Rng + ?Sized>(p1: &Solution, p2: &Solution, instance: &Instance, rng: &mut R) -> Solution {
    let child = order_crossover(&p1.giant_tour(), &p2.giant_tour(), rng);
    Solution::split_greedy(&child, instance, instance.vehicle_capacity())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    /// Reverse a segment within one route.
    TwoOpt,
    /// Move one customer into another route or onto a fresh vehicle.
    Relocate,
    /// Exchange two customers anywhere in the plan.
    Swap,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [MutationKind::TwoOpt, MutationKind::Relocate, MutationKind::Swap];
}

/// With probability `rate`, applies one uniformly chosen mutation.
pub fn mutate<R: Rng + ?Sized>(s: &Solution, instance: &Instance, rate: f64, rng: &mut R) -> Solution {
    if !rng.random_bool(rate.clamp(0.0, 1.0)) {
        return s.clone();
    }
    let kind = MutationKind::ALL[rng.random_range(0..MutationKind::ALL.len())];
    apply_mutation(s, kind, instance, rng)
}

/// Applies `kind`; moves that are impossible for the given plan leave it unchanged.
pub fn apply_mutation<R: Rng + ?Sized>(s: &Solution, kind: MutationKind, instance: &Instance, rng: &mut R) -> Solution {
    let mut routes = s.routes().to_vec();
    let total: usize = routes.iter().map(Vec::len).sum();
    match kind {
        MutationKind::TwoOpt => {
            let eligible: Vec<usize> = (0..routes.len()).filter(|&r| routes[r].len() >= 2).collect();
            if eligible.is_empty() {
                return s.clone();
            }
            let r = eligible[rng.random_range(0..eligible.len())];
            let len = routes[r].len();
            let i = rng.random_range(0..len - 1);
            let j = rng.random_range(i + 1..len);
            routes[r][i..=j].reverse();
        }
        MutationKind::Relocate => {
            if total < 2 {
                return s.clone();
            }
            let (r, i) = locate(&routes, rng.random_range(0..total));
            let id = routes[r].remove(i);
            // destinations: every other route, plus a new vehicle
            let dest = rng.random_range(0..routes.len());
            if dest == r {
                routes.push(vec![id]);
            } else {
                let at = rng.random_range(0..=routes[dest].len());
                routes[dest].insert(at, id);
            }
        }
        MutationKind::Swap => {
            if total < 2 {
                return s.clone();
            }
            let a = rng.random_range(0..total);
            let mut b = rng.random_range(0..total - 1);
            if b >= a {
                b += 1;
            }
            let (ra, ia) = locate(&routes, a);
            let (rb, ib) = locate(&routes, b);
            let tmp = routes[ra][ia];
            routes[ra][ia] = routes[rb][ib];
            routes[rb][ib] = tmp;
        }
    }
    let out = Solution::new(routes);
    if out.is_capacity_feasible(instance) {
        out
    } else {
        Solution::split_greedy(&out.giant_tour(), instance, instance.vehicle_capacity())
    }
}

/// Maps a position in the giant tour to (route, index).
fn locate(routes: &[Vec<u32>], mut pos: usize) -> (usize, usize) {
    for (r, route) in routes.iter().enumerate() {
        if pos < route.len() {
            return (r, pos);
        }
        pos -= route.len();
    }
    unreachable!("position beyond giant tour")
}

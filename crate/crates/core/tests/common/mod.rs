//! Independent reference implementations used as test oracles. Nothing here
//! calls into the evaluation or GA code paths it is compared against.
#![allow(dead_code)]

use moga_vrptw::{Customer, Instance, ObjectiveVector, TimingPolicy};
use rand::Rng;

fn euclid(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
}

fn lookup(instance: &Instance, id: u32) -> &Customer {
    instance.customers().iter().find(|c| c.id == id).expect("id belongs to instance")
}

/// Walks each route once, leg by leg, with no shared helpers.
pub fn simulate(instance: &Instance, routes: &[Vec<u32>], no_wait: bool) -> (f64, u32, f64, u32) {
    let d = instance.depot();
    let mut dist = 0.0;
    let mut vehicles = 0;
    let mut viol = 0.0;
    let mut nviol = 0;
    for route in routes.iter().filter(|r| !r.is_empty()) {
        vehicles += 1;
        let (mut px, mut py, mut t) = (d.x, d.y, 0.0f64);
        for &id in route {
            let c = lookup(instance, id);
            let leg = euclid(px, py, c.x, c.y);
            dist += leg;
            t += leg;
            let late = if t > c.due_time { t - c.due_time } else { 0.0 };
            let early = if no_wait && t < c.ready_time { c.ready_time - t } else { 0.0 };
            if late + early > 0.0 {
                viol += late + early;
                nviol += 1;
            }
            if !no_wait && t < c.ready_time {
                t = c.ready_time;
            }
            t += c.service_time;
            px = c.x;
            py = c.y;
        }
        dist += euclid(px, py, d.x, d.y);
    }
    (dist, vehicles, viol, nviol)
}

pub fn simulate_policy(instance: &Instance, routes: &[Vec<u32>], policy: TimingPolicy) -> (f64, u32, f64, u32) {
    simulate(instance, routes, policy == TimingPolicy::NoWait)
}

/// Sequential nearest-neighbour construction: from the current position go to
/// the closest unvisited customer that still fits in the vehicle; when none
/// fits, return to the depot and open a new vehicle. Returns total distance
/// and the routes.
pub fn nearest_neighbor_baseline(instance: &Instance) -> (f64, Vec<Vec<u32>>) {
    let d = instance.depot();
    let mut left: Vec<&Customer> = instance.customers().iter().collect();
    let mut routes = Vec::new();
    let mut total = 0.0;
    while !left.is_empty() {
        let (mut px, mut py, mut load) = (d.x, d.y, 0.0);
        let mut route = Vec::new();
        loop {
            let pick = left
                .iter()
                .enumerate()
                .filter(|(_, c)| load + c.demand <= instance.vehicle_capacity())
                .min_by(|(_, a), (_, b)| euclid(px, py, a.x, a.y).total_cmp(&euclid(px, py, b.x, b.y)))
                .map(|(i, _)| i);
            let Some(i) = pick else { break };
            let c = left.remove(i);
            total += euclid(px, py, c.x, c.y);
            load += c.demand;
            px = c.x;
            py = c.y;
            route.push(c.id);
        }
        total += euclid(px, py, d.x, d.y);
        routes.push(route);
    }
    (total, routes)
}

/// A random instance with up to `max_n` customers and a random partition of
/// them into routes that respects capacity.
pub fn random_case<R: Rng>(rng: &mut R, max_n: u32) -> (Instance, Vec<Vec<u32>>) {
    let n = rng.random_range(1..=max_n);
    let capacity = 50.0;
    let depot = Customer::new(0, (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)), 0.0, (0.0, 1e4), 0.0);
    let customers: Vec<Customer> = (1..=n)
        .map(|id| {
            let ready = rng.random_range(0.0..200.0);
            let width = rng.random_range(0.0..150.0);
            Customer::new(
                id,
                (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)),
                rng.random_range(0.0..=capacity / 2.0),
                (ready, ready + width),
                rng.random_range(0.0..20.0),
            )
        })
        .collect();
    let instance = Instance::new("oracle", depot, customers, capacity, n).unwrap();
    let mut order: Vec<u32> = (1..=n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut routes: Vec<Vec<u32>> = vec![Vec::new()];
    let mut load = 0.0;
    for id in order {
        let dem = instance.customers()[id as usize - 1].demand;
        if load + dem > capacity || (!routes.last().unwrap().is_empty() && rng.random_bool(0.3)) {
            routes.push(Vec::new());
            load = 0.0;
        }
        routes.last_mut().unwrap().push(id);
        load += dem;
    }
    (instance, routes)
}

pub fn matches_oracle(got: &ObjectiveVector, want: (f64, u32, f64, u32), tol: f64) -> bool {
    (got.total_distance - want.0).abs() <= tol
        && got.vehicle_count == want.1
        && (got.total_tw_violation - want.2).abs() <= tol
        && got.violated_tw_count == want.3
}

//! Problem model for the vehicle routing problem with time windows and the
//! deterministic evaluation of a routing plan into its objective vector.
//!
//! Travel time equals Euclidean distance and nothing is rounded. Every route
//! starts and ends at the depot, and the return leg counts towards the total
//! distance.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A customer location (or the depot) with its service time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready_time: f64,
    pub due_time: f64,
    pub service_time: f64,
}

impl Customer {
    pub fn new(
        id: u32,
        (x, y): (f64, f64),
        demand: f64,
        (ready_time, due_time): (f64, f64),
        service_time: f64,
    ) -> Self {
        Customer { id, x, y, demand, ready_time, due_time, service_time }
    }

    fn check(&self) -> Result<(), InstanceError> {
        let numbers = [self.x, self.y, self.demand, self.ready_time, self.due_time, self.service_time];
        if numbers.iter().any(|v| !v.is_finite()) {
            return Err(InstanceError::NonFinite(self.id));
        }
        if self.demand < 0.0 {
            return Err(InstanceError::NegativeDemand(self.id));
        }
        if self.service_time < 0.0 {
            return Err(InstanceError::NegativeServiceTime(self.id));
        }
        if self.ready_time > self.due_time {
            return Err(InstanceError::InvertedWindow(self.id));
        }
        Ok(())
    }
}

/// Euclidean distance between two locations.
pub fn distance(a: &Customer, b: &Customer) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance has no customers")]
    NoCustomers,
    #[error("customer {0} has a non-finite field")]
    NonFinite(u32),
    #[error("customer {0} has negative demand")]
    NegativeDemand(u32),
    #[error("customer {0} has negative service time")]
    NegativeServiceTime(u32),
    #[error("customer {0} has ready time after due time")]
    InvertedWindow(u32),
    #[error("customer id 0 is reserved")]
    ZeroCustomerId,
    #[error("duplicate customer id {0}")]
    DuplicateId(u32),
    #[error("customer id {0} collides with the depot id")]
    DepotIdCollision(u32),
    #[error("depot must have zero demand")]
    DepotDemand,
    #[error("vehicle capacity must be positive and finite")]
    BadCapacity,
    #[error("fleet size must be positive")]
    NoVehicles,
    #[error("customer {id} demand {demand} exceeds vehicle capacity {capacity}")]
    DemandExceedsCapacity { id: u32, demand: f64, capacity: f64 },
}

/// An immutable, validated problem statement.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    depot: Customer,
    customers: Vec<Customer>,
    vehicle_capacity: f64,
    max_vehicles: u32,
    index: HashMap<u32, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.depot == other.depot
            && self.customers == other.customers
            && self.vehicle_capacity == other.vehicle_capacity
            && self.max_vehicles == other.max_vehicles
    }
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        depot: Customer,
        customers: Vec<Customer>,
        vehicle_capacity: f64,
        max_vehicles: u32,
    ) -> Result<Self, InstanceError> {
        if customers.is_empty() {
            return Err(InstanceError::NoCustomers);
        }
        if !(vehicle_capacity.is_finite() && vehicle_capacity > 0.0) {
            return Err(InstanceError::BadCapacity);
        }
        if max_vehicles == 0 {
            return Err(InstanceError::NoVehicles);
        }
        depot.check()?;
        if depot.demand != 0.0 {
            return Err(InstanceError::DepotDemand);
        }
        let mut index = HashMap::with_capacity(customers.len());
        for (i, c) in customers.iter().enumerate() {
            c.check()?;
            if c.id == 0 {
                return Err(InstanceError::ZeroCustomerId);
            }
            if c.id == depot.id {
                return Err(InstanceError::DepotIdCollision(c.id));
            }
            if index.insert(c.id, i).is_some() {
                return Err(InstanceError::DuplicateId(c.id));
            }
            if c.demand > vehicle_capacity {
                return Err(InstanceError::DemandExceedsCapacity {
                    id: c.id,
                    demand: c.demand,
                    capacity: vehicle_capacity,
                });
            }
        }
        Ok(Instance { name: name.into(), depot, customers, vehicle_capacity, max_vehicles, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depot(&self) -> &Customer {
        &self.depot
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn vehicle_capacity(&self) -> f64 {
        self.vehicle_capacity
    }

    pub fn max_vehicles(&self) -> u32 {
        self.max_vehicles
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn customer(&self, id: u32) -> Option<&Customer> {
        self.index.get(&id).map(|&i| &self.customers[i])
    }

    pub fn customer_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.customers.iter().map(|c| c.id)
    }

    pub fn demand_of(&self, id: u32) -> f64 {
        self.customer(id).map_or(0.0, |c| c.demand)
    }
}

/// Whether a vehicle arriving before the ready time waits or is penalised.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingPolicy {
    /// Early vehicles wait for the window to open; only lateness counts.
    #[default]
    WaitAllowed,
    /// Service starts on arrival; both earliness and lateness count.
    NoWait,
}

impl fmt::Display for TimingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimingPolicy::WaitAllowed => f.write_str("wait"),
            TimingPolicy::NoWait => f.write_str("nowait"),
        }
    }
}

/// A routing plan: each route is the ordered list of customer ids one vehicle
/// visits between leaving and re-entering the depot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    routes: Vec<Vec<u32>>,
}

impl Solution {
    /// Builds a solution, dropping empty routes.
    pub fn new(routes: Vec<Vec<u32>>) -> Self {
        Solution { routes: routes.into_iter().filter(|r| !r.is_empty()).collect() }
    }

    /// Splits a giant tour into routes greedily: customers are appended to the
    /// current route until the next one would exceed `capacity`.
    pub fn split_greedy(tour: &[u32], instance: &Instance, capacity: f64) -> Self {
        let mut routes = Vec::new();
        let mut current = Vec::new();
        let mut load = 0.0;
        for &id in tour {
            let demand = instance.demand_of(id);
            if !current.is_empty() && load + demand > capacity {
                routes.push(std::mem::take(&mut current));
                load = 0.0;
            }
            current.push(id);
            load += demand;
        }
        if !current.is_empty() {
            routes.push(current);
        }
        Solution { routes }
    }

    pub fn routes(&self) -> &[Vec<u32>] {
        &self.routes
    }

    pub fn into_routes(self) -> Vec<Vec<u32>> {
        self.routes
    }

    /// Concatenation of all routes in order.
    pub fn giant_tour(&self) -> Vec<u32> {
        self.routes.iter().flatten().copied().collect()
    }

    pub fn route_load(&self, route: usize, instance: &Instance) -> f64 {
        self.routes[route].iter().map(|&id| instance.demand_of(id)).sum()
    }

    pub fn is_capacity_feasible(&self, instance: &Instance) -> bool {
        (0..self.routes.len()).all(|r| self.route_load(r, instance) <= instance.vehicle_capacity())
    }

    /// Checks every structural invariant against `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<(), SolutionError> {
        if let Some(i) = self.routes.iter().position(Vec::is_empty) {
            return Err(SolutionError::EmptyRoute(i));
        }
        self.check_partition(instance)
    }

    /// Permutation and capacity checks; empty routes are tolerated.
    fn check_partition(&self, instance: &Instance) -> Result<(), SolutionError> {
        let mut seen = vec![false; instance.len()];
        for (r, route) in self.routes.iter().enumerate() {
            let mut load = 0.0;
            for &id in route {
                let slot = *instance.index.get(&id).ok_or(SolutionError::UnknownCustomer(id))?;
                if std::mem::replace(&mut seen[slot], true) {
                    return Err(SolutionError::DuplicateCustomer(id));
                }
                load += instance.customers[slot].demand;
            }
            if load > instance.vehicle_capacity() {
                return Err(SolutionError::CapacityExceeded { route: r, load, capacity: instance.vehicle_capacity() });
            }
        }
        if let Some(slot) = seen.iter().position(|s| !s) {
            return Err(SolutionError::MissingCustomer(instance.customers[slot].id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("route {0} is empty")]
    EmptyRoute(usize),
    #[error("customer {0} is not part of the instance")]
    UnknownCustomer(u32),
    #[error("customer {0} is visited more than once")]
    DuplicateCustomer(u32),
    #[error("customer {0} is never visited")]
    MissingCustomer(u32),
    #[error("route {route} carries {load} but capacity is {capacity}")]
    CapacityExceeded { route: usize, load: f64, capacity: f64 },
}

/// The four minimisation objectives of a routing plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub total_distance: f64,
    pub vehicle_count: u32,
    pub total_tw_violation: f64,
    pub violated_tw_count: u32,
}

impl ObjectiveVector {
    pub const LEN: usize = 4;

    pub fn new(total_distance: f64, vehicle_count: u32, total_tw_violation: f64, violated_tw_count: u32) -> Self {
        ObjectiveVector { total_distance, vehicle_count, total_tw_violation, violated_tw_count }
    }

    /// Components in canonical order, all as `f64` (integer parts convert exactly).
    pub fn components(&self) -> [f64; 4] {
        [self.total_distance, f64::from(self.vehicle_count), self.total_tw_violation, f64::from(self.violated_tw_count)]
    }

    pub fn get(&self, objective: Objective) -> f64 {
        self.components()[objective as usize]
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.3}, {}, {:.3}, {})",
            self.total_distance, self.vehicle_count, self.total_tw_violation, self.violated_tw_count
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    TotalDistance = 0,
    VehicleCount = 1,
    TotalTwViolation = 2,
    ViolatedTwCount = 3,
}

impl Objective {
    pub const ALL: [Objective; 4] =
        [Objective::TotalDistance, Objective::VehicleCount, Objective::TotalTwViolation, Objective::ViolatedTwCount];

    pub fn label(self) -> &'static str {
        match self {
            Objective::TotalDistance => "total_distance",
            Objective::VehicleCount => "vehicle_count",
            Objective::TotalTwViolation => "total_tw_violation",
            Objective::ViolatedTwCount => "violated_tw_count",
        }
    }
}

/// Timing of a single customer visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub customer: u32,
    pub arrival: f64,
    pub service_start: f64,
    pub departure: f64,
    pub ready_time: f64,
    pub due_time: f64,
    /// Time past the due time.
    pub lateness: f64,
    /// Time before the ready time; only a violation (and only non-zero) under no-wait timing.
    pub earliness: f64,
}

impl Visit {
    pub fn violation(&self) -> f64 {
        self.lateness + self.earliness
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteTrace {
    pub visits: Vec<Visit>,
    pub distance: f64,
    pub load: f64,
    /// Time the vehicle is back at the depot.
    pub return_time: f64,
}

/// Evaluates `solution` into its objective vector.
pub fn evaluate(
    instance: &Instance,
    solution: &Solution,
    policy: TimingPolicy,
) -> Result<ObjectiveVector, SolutionError> {
    evaluate_traced(instance, solution, policy).map(|(objectives, _)| objectives)
}

/// Evaluates `solution` and returns the per-visit timing of every non-empty route.
pub fn evaluate_traced(
    instance: &Instance,
    solution: &Solution,
    policy: TimingPolicy,
) -> Result<(ObjectiveVector, Vec<RouteTrace>), SolutionError> {
    solution.check_partition(instance)?;
    let depot = instance.depot();
    let mut traces = Vec::with_capacity(solution.routes.len());
    let mut objectives = ObjectiveVector::new(0.0, 0, 0.0, 0);
    for route in solution.routes.iter().filter(|r| !r.is_empty()) {
        let mut prev = depot;
        let mut clock = 0.0;
        let mut dist = 0.0;
        let mut load = 0.0;
        let mut visits = Vec::with_capacity(route.len());
        for &id in route {
            let c = instance.customer(id).expect("checked partition");
            let leg = distance(prev, c);
            dist += leg;
            load += c.demand;
            let arrival = clock + leg;
            let lateness = (arrival - c.due_time).max(0.0);
            let (service_start, earliness) = match policy {
                TimingPolicy::WaitAllowed => (arrival.max(c.ready_time), 0.0),
                TimingPolicy::NoWait => (arrival, (c.ready_time - arrival).max(0.0)),
            };
            let violation = lateness + earliness;
            if violation > 0.0 {
                objectives.total_tw_violation += violation;
                objectives.violated_tw_count += 1;
            }
            clock = service_start + c.service_time;
            visits.push(Visit {
                customer: id,
                arrival,
                service_start,
                departure: clock,
                ready_time: c.ready_time,
                due_time: c.due_time,
                lateness,
                earliness,
            });
            prev = c;
        }
        let back = distance(prev, depot);
        dist += back;
        objectives.total_distance += dist;
        objectives.vehicle_count += 1;
        traces.push(RouteTrace { visits, distance: dist, load, return_time: clock + back });
    }
    Ok((objectives, traces))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(id: u32, x: f64, y: f64) -> Customer {
        Customer::new(id, (x, y), 0.0, (0.0, 100.0), 0.0)
    }

    fn single(ready: f64, due: f64) -> Instance {
        Instance::new("one", at(0, 0.0, 0.0), vec![Customer::new(1, (3.0, 4.0), 1.0, (ready, due), 10.0)], 10.0, 1)
            .unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&at(0, 0.0, 0.0), &at(1, 3.0, 4.0)), 5.0);
        assert_eq!(distance(&at(0, 7.0, 7.0), &at(1, 7.0, 7.0)), 0.0);
        assert!((distance(&at(0, 0.0, 0.0), &at(1, 1.0, 1.0)) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn single_customer_round_trip() {
        let s = Solution::new(vec![vec![1]]);
        let ov = evaluate(&single(0.0, 100.0), &s, TimingPolicy::WaitAllowed).unwrap();
        assert_eq!(ov, ObjectiveVector::new(10.0, 1, 0.0, 0));
        let ov = evaluate(&single(0.0, 2.0), &s, TimingPolicy::WaitAllowed).unwrap();
        assert_eq!(ov, ObjectiveVector::new(10.0, 1, 3.0, 1));
    }

    #[test]
    fn policy_contrast_on_early_arrival() {
        let s = Solution::new(vec![vec![1]]);
        let inst = single(8.0, 100.0);
        assert_eq!(evaluate(&inst, &s, TimingPolicy::NoWait).unwrap(), ObjectiveVector::new(10.0, 1, 3.0, 1));
        assert_eq!(evaluate(&inst, &s, TimingPolicy::WaitAllowed).unwrap(), ObjectiveVector::new(10.0, 1, 0.0, 0));
    }

    #[test]
    fn two_customer_chain() {
        let inst = Instance::new(
            "chain",
            at(0, 0.0, 0.0),
            vec![
                Customer::new(1, (3.0, 4.0), 0.0, (0.0, 4.0), 1.0),
                Customer::new(2, (3.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            ],
            10.0,
            1,
        )
        .unwrap();
        let (ov, traces) = evaluate_traced(&inst, &Solution::new(vec![vec![1, 2]]), TimingPolicy::WaitAllowed).unwrap();
        assert_eq!(ov, ObjectiveVector::new(12.0, 1, 1.0, 1));
        assert_eq!(traces[0].visits[1].arrival, 10.0);
        assert_eq!(traces[0].return_time, 13.0);
    }

    #[test]
    fn empty_routes_are_dropped() {
        let s = Solution::new(vec![vec![], vec![1], vec![]]);
        assert_eq!(s.routes().len(), 1);
        assert_eq!(evaluate(&single(0.0, 100.0), &s, TimingPolicy::WaitAllowed).unwrap().vehicle_count, 1);
    }

    #[test]
    fn malformed_solutions_are_rejected() {
        let inst = Instance::new(
            "three",
            at(0, 0.0, 0.0),
            vec![
                Customer::new(1, (1.0, 0.0), 4.0, (0.0, 10.0), 0.0),
                Customer::new(2, (2.0, 0.0), 4.0, (0.0, 10.0), 0.0),
                Customer::new(3, (3.0, 0.0), 4.0, (0.0, 10.0), 0.0),
            ],
            10.0,
            3,
        )
        .unwrap();
        let p = TimingPolicy::WaitAllowed;
        assert_eq!(evaluate(&inst, &Solution::new(vec![vec![1, 2]]), p), Err(SolutionError::MissingCustomer(3)));
        assert_eq!(
            evaluate(&inst, &Solution::new(vec![vec![1, 2], vec![2, 3]]), p),
            Err(SolutionError::DuplicateCustomer(2))
        );
        assert_eq!(
            evaluate(&inst, &Solution::new(vec![vec![1, 2, 9], vec![3]]), p),
            Err(SolutionError::UnknownCustomer(9))
        );
        assert!(matches!(
            evaluate(&inst, &Solution::new(vec![vec![1, 2, 3]]), p),
            Err(SolutionError::CapacityExceeded { route: 0, .. })
        ));
        let raw: Solution = serde_json::from_str("[[1],[],[2,3]]").unwrap();
        assert_eq!(raw.validate(&inst), Err(SolutionError::EmptyRoute(1)));
    }

    #[test]
    fn instance_rejects_bad_input() {
        let depot = at(0, 0.0, 0.0);
        let c = |id, demand| Customer::new(id, (1.0, 1.0), demand, (0.0, 1.0), 0.0);
        assert_eq!(Instance::new("x", depot.clone(), vec![], 10.0, 1), Err(InstanceError::NoCustomers));
        assert_eq!(
            Instance::new("x", depot.clone(), vec![c(1, 1.0), c(1, 1.0)], 10.0, 1),
            Err(InstanceError::DuplicateId(1))
        );
        assert!(matches!(
            Instance::new("x", depot.clone(), vec![c(1, 11.0)], 10.0, 1),
            Err(InstanceError::DemandExceedsCapacity { id: 1, .. })
        ));
        assert_eq!(
            Instance::new("x", depot, vec![Customer::new(2, (0.0, 0.0), 0.0, (5.0, 1.0), 0.0)], 10.0, 1),
            Err(InstanceError::InvertedWindow(2))
        );
    }

    #[test]
    fn greedy_split_respects_capacity() {
        let inst = Instance::new(
            "s",
            at(0, 0.0, 0.0),
            (1..=5).map(|i| Customer::new(i, (i as f64, 0.0), 4.0, (0.0, 50.0), 0.0)).collect(),
            10.0,
            5,
        )
        .unwrap();
        let s = Solution::split_greedy(&[5, 4, 3, 2, 1], &inst, inst.vehicle_capacity());
        assert_eq!(s.routes(), &[vec![5, 4], vec![3, 2], vec![1]]);
        s.validate(&inst).unwrap();
    }
}

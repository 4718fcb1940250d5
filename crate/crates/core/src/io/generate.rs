use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Customer, Instance, InstanceError};

/// Knobs for random instance generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    pub customers: u32,
    /// Side length of the square the customers are scattered over.
    pub extent: f64,
    /// 0 gives all-day windows, 1 gives windows exactly one service time wide.
    pub tightness: f64,
    pub seed: u64,
    /// Scheduling horizon; the depot window is `[0, horizon]`.
    pub horizon: f64,
    pub vehicle_capacity: f64,
    pub max_demand: u32,
    pub service_time: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            customers: 25,
            extent: 100.0,
            tightness: 0.5,
            seed: 0,
            horizon: 1000.0,
            vehicle_capacity: 200.0,
            max_demand: 30,
            service_time: 10.0,
        }
    }
}

/// Uniformly scattered customers around a central depot. Coordinates and
/// demands are integral, windows have width
/// `service + (1 - tightness) * (horizon - service)` and a uniform start.
pub fn generate_random_instance(params: &GeneratorParams) -> Result<Instance, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let tightness = params.tightness.clamp(0.0, 1.0);
    let horizon = params.horizon.max(params.service_time);
    let width = params.service_time + (1.0 - tightness) * (horizon - params.service_time);
    let max_demand = params.max_demand.max(1);
    let depot = Customer::new(0, (params.extent / 2.0, params.extent / 2.0), 0.0, (0.0, horizon), 0.0);
    let customers = (1..=params.customers)
        .map(|id| {
            let x = rng.random_range(0.0..=params.extent).round();
            let y = rng.random_range(0.0..=params.extent).round();
            let demand = f64::from(rng.random_range(1..=max_demand)).min(params.vehicle_capacity);
            let slack = horizon - width;
            let ready = if slack > 0.0 { rng.random_range(0.0..=slack).floor() } else { 0.0 };
            Customer::new(id, (x, y), demand, (ready, ready + width), params.service_time)
        })
        .collect();
    let name = format!("rand-n{}-t{}-s{}", params.customers, tightness, params.seed);
    Instance::new(name, depot, customers, params.vehicle_capacity, params.customers.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tightness_gives_all_day_windows() {
        let inst = generate_random_instance(&GeneratorParams { tightness: 0.0, ..Default::default() }).unwrap();
        for c in inst.customers() {
            assert_eq!((c.ready_time, c.due_time), (0.0, 1000.0));
        }
    }

    #[test]
    fn full_tightness_gives_service_wide_windows() {
        let inst = generate_random_instance(&GeneratorParams { tightness: 1.0, ..Default::default() }).unwrap();
        for c in inst.customers() {
            assert_eq!(c.due_time - c.ready_time, c.service_time);
        }
    }

    #[test]
    fn seeded_and_valid() {
        let p = GeneratorParams { customers: 30, tightness: 0.8, seed: 12, ..Default::default() };
        let a = generate_random_instance(&p).unwrap();
        assert_eq!(a, generate_random_instance(&p).unwrap());
        assert_ne!(a, generate_random_instance(&GeneratorParams { seed: 13, ..p.clone() }).unwrap());
        assert_eq!(a.len(), 30);
        for c in a.customers() {
            assert!(c.ready_time <= c.due_time && c.due_time <= 1000.0);
            assert!(c.demand >= 1.0 && c.demand <= a.vehicle_capacity());
            assert!((0.0..=100.0).contains(&c.x) && (0.0..=100.0).contains(&c.y));
        }
    }

    #[test]
    fn zero_customers_rejected() {
        assert_eq!(
            generate_random_instance(&GeneratorParams { customers: 0, ..Default::default() }),
            Err(InstanceError::NoCustomers)
        );
    }
}

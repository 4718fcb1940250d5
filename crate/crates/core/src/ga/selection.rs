use rand::Rng;

use super::config::SelectionScheme;

/// Roulette wheel: index `i` is drawn with probability `fitness[i] / sum`.
/// Falls back to a uniform draw if the total is not positive.
pub fn roulette<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "roulette over an empty population");
    let total: f64 = fitness.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.random_range(0..fitness.len());
    }
    let mut ball = rng.random::<f64>() * total;
    for (i, &f) in fitness.iter().enumerate() {
        if ball < f {
            return i;
        }
        ball -= f;
    }
    // rounding left the ball past the last slot
    fitness.iter().rposition(|&f| f > 0.0).unwrap_or(fitness.len() - 1)
}

/// Two uniform draws; the fitter one wins, the first on ties.
pub fn binary_tournament<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "tournament over an empty population");
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[b] > fitness[a] {
        b
    } else {
        a
    }
}

pub fn select_index<R: Rng + ?Sized>(scheme: SelectionScheme, fitness: &[f64], rng: &mut R) -> usize {
    match scheme {
        SelectionScheme::Roulette => roulette(fitness, rng),
        SelectionScheme::BinaryTournament => binary_tournament(fitness, rng),
    }
}

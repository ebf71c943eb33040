use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Density, Polytope};

/// `count` i.i.d. points with law `g dp`, by rejection from the bounding box.
/// Deterministic for a given seed.
pub fn sample(p: &Polytope, g: &Density, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = p.bounding_box();
    let envelope = if g.bound().is_finite() {
        g.bound().max(g.max_value())
    } else {
        1.01 * g.max_value()
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.random_range(*a..*b)).collect();
        if !p.contains(&x, 0.0) {
            continue;
        }
        if rng.random::<f64>() * envelope <= g.eval(&x) {
            out.push(x);
        }
    }
    out
}

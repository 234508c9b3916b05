//! Generated data with a numeric activity target, two descriptors that
//! track it, and four structural attributes for the tree tests.
//!
//! `activity ~ N(±1.5, 1)` with the sign picked uniformly; an example is
//! active when `activity > 0`. `lumo` and `logp` are noisy linear functions
//! of the activity. `s1` and `s2` are noisy views of the activity, `s3` and
//! `s4` are noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tic_core::{Attribute, Cell, Dataset, Example, Role, Schema};

pub const ACTIVITY: &str = "activity";
pub const STRUCTURAL: [&str; 4] = ["s1", "s2", "s3", "s4"];
pub const DESCRIPTORS: [&str; 3] = ["activity", "lumo", "logp"];

pub fn activity_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let schema = Schema::new(vec![
        Attribute::numeric("s1"),
        Attribute::numeric("s2"),
        Attribute::numeric("s3"),
        Attribute::numeric("s4"),
        Attribute::numeric("lumo"),
        Attribute::numeric("logp"),
        Attribute::numeric(ACTIVITY).with_role(Role::Class),
    ])
    .expect("fixed schema");
    let examples = (0..n)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let act: f64 = 1.5 * sign + unit.sample(&mut rng);
            let mut noise = |sd: f64| sd * unit.sample(&mut rng);
            let s1 = act + noise(0.8);
            let s2 = -0.5 * act + noise(1.5);
            let s3 = noise(1.0);
            let s4 = noise(1.0);
            let lumo = -0.8 * act + noise(0.6);
            let logp = 0.7 * act + noise(0.7);
            Example::new([s1, s2, s3, s4, lumo, logp, act].into_iter().map(Cell::Number).collect())
        })
        .collect();
    Dataset::new(schema, examples).expect("finite values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_correlated() {
        let a = activity_dataset(400, 3);
        assert_eq!(a, activity_dataset(400, 3));
        let active = |i: usize| a.value(i, 6).as_f64().unwrap() > 0.0;
        let agree = (0..a.len()).filter(|&i| (a.value(i, 0).as_f64().unwrap() > 0.0) == active(i)).count();
        assert!(agree as f64 / a.len() as f64 > 0.8);
    }
}

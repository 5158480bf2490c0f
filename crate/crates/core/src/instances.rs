//! Built-in test problems and a seeded generator of random ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measures::{measure_from_pieces, Measure1D, Piece};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub mu: Measure1D,
    pub nu: Measure1D,
}

impl Instance {
    fn new(name: &str, mu: &[(f64, f64, f64)], nu: &[(f64, f64, f64)]) -> Self {
        Self {
            name: name.to_string(),
            mu: measure_from_pieces(mu).expect("built-in measure"),
            nu: measure_from_pieces(nu).expect("built-in measure"),
        }
    }
}

/// Translation: `U[0, 1] → U[1, 2]`, `λ_C = 1`, everything moves right.
pub fn e1() -> Instance {
    Instance::new("E1", &[(0.0, 1.0, 1.0)], &[(1.0, 2.0, 1.0)])
}

/// Split target: `U[0, 2] → ½U[0, 1] + ½U[3, 4]`, `λ_C = 2`.
pub fn e2() -> Instance {
    Instance::new("E2", &[(0.0, 2.0, 0.5)], &[(0.0, 1.0, 0.5), (3.0, 4.0, 0.5)])
}

/// Both directions: the left half of `U[0, 1]` moves by `−1`, the right half
/// by `+1`, and the two sets meet at `½`.
pub fn e3() -> Instance {
    Instance::new("E3", &[(0.0, 1.0, 1.0)], &[(-1.0, -0.5, 1.0), (1.5, 2.0, 1.0)])
}

/// A rigid part on `[1.5, 2]` next to a free component `]0, 1.5[`.
pub fn e4() -> Instance {
    Instance::new("E4", &[(0.0, 2.0, 0.5)], &[(0.0, 1.0, 0.5), (1.0, 2.0, 0.25), (2.0, 2.5, 0.5)])
}

pub fn builtin() -> Vec<Instance> {
    vec![e1(), e2(), e3(), e4()]
}

pub fn by_name(name: &str) -> Option<Instance> {
    builtin().into_iter().find(|i| i.name.eq_ignore_ascii_case(name))
}

/// Shape parameters of [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomShape {
    pub max_pieces: usize,
    pub piece_length: (f64, f64),
    pub gap: (f64, f64),
    /// Relative densities are drawn from this range before normalising, which
    /// bounds the ratio between the largest and smallest density.
    pub relative_density: (f64, f64),
    pub target_offset: (f64, f64),
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_pieces: 6,
            piece_length: (0.2, 1.0),
            gap: (0.0, 1.0),
            relative_density: (1.0, 2.0),
            target_offset: (-2.0, 2.0),
        }
    }
}

pub fn random_measure<R: Rng>(rng: &mut R, shape: &RandomShape, start: f64) -> Measure1D {
    let count = rng.gen_range(1..=shape.max_pieces);
    let mut raw = Vec::with_capacity(count);
    let mut cursor = start;
    for k in 0..count {
        if k > 0 {
            cursor += rng.gen_range(shape.gap.0..=shape.gap.1);
        }
        let len = rng.gen_range(shape.piece_length.0..=shape.piece_length.1);
        let f = rng.gen_range(shape.relative_density.0..=shape.relative_density.1);
        raw.push((cursor, cursor + len, f));
        cursor += len;
    }
    let total: f64 = raw.iter().map(|(a, b, f)| (b - a) * f).sum();
    let pieces = raw.into_iter().map(|(a, b, f)| Piece::new(a, b, f / total));
    Measure1D::with_any_mass(pieces).expect("generated pieces are ordered")
}

/// Random pair of piecewise-uniform measures, reproducible from `seed`.
pub fn random_instance(seed: u64) -> Instance {
    random_instance_with(seed, &RandomShape::default())
}

pub fn random_instance_with(seed: u64, shape: &RandomShape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = random_measure(&mut rng, shape, 0.0);
    let offset = rng.gen_range(shape.target_offset.0..=shape.target_offset.1);
    let nu = random_measure(&mut rng, shape, offset);
    Instance { name: format!("random-{seed}"), mu, nu }
}

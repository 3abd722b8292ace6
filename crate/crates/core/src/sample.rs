//! Seeded samplers over basis monomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::BasisVector;
use crate::voa::Module;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A seed for a named sub-stream, so adding checks elsewhere does not shift this one.
    pub fn derived(seed: u64, tag: &str) -> Self {
        let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
        for b in tag.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        Self::new(h)
    }

    /// A basis monomial with depth in [lo, hi], depth drawn uniformly among nonempty levels.
    pub fn basis(&mut self, module: &Module, lo: u32, hi: u32) -> BasisVector {
        let levels: Vec<Vec<BasisVector>> =
            (lo..=hi).map(|d| module.basis_at_depth(d)).filter(|l| !l.is_empty()).collect();
        assert!(!levels.is_empty(), "no basis vectors in depth range {lo}..={hi}");
        let level = &levels[self.rng.gen_range(0..levels.len())];
        level[self.rng.gen_range(0..level.len())].clone()
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.gen_range(0..xs.len())]
    }
}

//! Reproducible per-replicate random number streams.
//!
//! Every replicate draws from a generator whose state is a pure function of
//! `(master_seed, replicate_index)`, derived through a SplitMix-style 64-bit
//! avalanche. Replicates can therefore be scheduled on any worker, in any
//! order, and still produce bit-identical values.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford mix 13).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Address of one replicate's randomness: `(master_seed, replicate_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    pub master_seed: u64,
    pub replicate_index: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            replicate_index,
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ReplicateRng {
        let mut s = mix64(self.master_seed ^ GOLDEN_GAMMA)
            .wrapping_add(self.replicate_index.wrapping_mul(GOLDEN_GAMMA));
        let mut next = || {
            s = s.wrapping_add(GOLDEN_GAMMA);
            mix64(s)
        };
        let mut state = [next(), next(), next(), next()];
        if state == [0u64; 4] {
            // xoshiro forbids the all-zero state
            state = [GOLDEN_GAMMA; 4];
        }
        ReplicateRng {
            state,
            spare_normal: None,
        }
    }
}

/// xoshiro256** generator with the variate transforms the samplers need.
#[derive(Debug, Clone)]
pub struct ReplicateRng {
    state: [u64; 4],
    spare_normal: Option<f64>,
}

impl ReplicateRng {
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal via the Marsaglia polar method; pairs are cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// χ draw with `dof ≥ 1` degrees of freedom.
    ///
    /// Small orders use the exact Gaussian-sum construction; larger orders go
    /// through a Gamma(dof/2) sample, χ_k = √(2·Gamma(k/2)).
    pub fn chi(&mut self, dof: u64) -> f64 {
        assert!(dof >= 1, "chi requires at least one degree of freedom");
        if dof <= 64 {
            let mut sum = 0.0;
            for _ in 0..dof {
                let z = self.standard_normal();
                sum += z * z;
            }
            sum.sqrt()
        } else {
            (2.0 * self.gamma(dof as f64 / 2.0)).sqrt()
        }
    }

    /// Gamma(shape, 1) for shape ≥ 1 by Marsaglia–Tsang squeeze rejection.
    fn gamma(&mut self, shape: f64) -> f64 {
        debug_assert!(shape >= 1.0);
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.standard_normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}

//! Seeded random Eisenbud–Harris data for sweeps.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{twist_threshold, EhPair, ReducibleCurveData, VanishingSeq};

pub const MAX_R: usize = 3;
pub const MAX_D: i64 = 8;
pub const MAX_GENUS: i64 = 3;

/// A sampled pair with twist degrees at or slightly above the threshold.
#[derive(Debug, Clone)]
pub struct SampledCase {
    pub pair: EhPair,
    pub deg_dy: i64,
    pub deg_dz: i64,
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn shape(&mut self) -> (usize, i64) {
        let d = self.rng.gen_range(2..=MAX_D);
        let r = self.rng.gen_range(0..=MAX_R.min(d as usize - 1));
        (r, d)
    }

    /// Uniform strictly increasing sequence of length `r + 1` in `[0, d]`.
    pub fn sequence(&mut self, r: usize, d: i64) -> VanishingSeq {
        let mut a: Vec<i64> = sample(&mut self.rng, d as usize + 1, r + 1)
            .into_iter()
            .map(|x| x as i64)
            .collect();
        a.sort_unstable();
        VanishingSeq::new(a, d).expect("sampled sequence is valid")
    }

    fn genus(&mut self) -> i64 {
        self.rng.gen_range(0..=MAX_GENUS)
    }

    fn with_degrees(&mut self, pair: EhPair) -> SampledCase {
        let deg_dy = twist_threshold(pair.d, pair.g_y) + self.rng.gen_range(0..=3);
        let deg_dz = twist_threshold(pair.d, pair.g_z) + self.rng.gen_range(0..=3);
        SampledCase { pair, deg_dy, deg_dz }
    }

    /// A compatible pair: `a^Y` uniform, then each `a^Z_k` drawn from the
    /// range left open by compatibility and monotonicity.
    pub fn compatible_pair(&mut self) -> SampledCase {
        let (r, d) = self.shape();
        let ay = self.sequence(r, d);
        let mut az: Vec<i64> = Vec::with_capacity(r + 1);
        for k in 0..=r {
            let lo = (d - ay.orders()[r - k]).max(az.last().map_or(0, |x| x + 1));
            let hi = d - (r - k) as i64;
            az.push(self.rng.gen_range(lo..=hi));
        }
        let az = VanishingSeq::new(az, d).expect("sampled sequence is valid");
        let (gy, gz) = (self.genus(), self.genus());
        self.with_degrees(EhPair::new(d, ay, az, gy, gz).expect("sampled pair is valid"))
    }

    /// A refined pair: `a^Z_{r-j} = d - a^Y_j`.
    pub fn refined_pair(&mut self) -> SampledCase {
        let (r, d) = self.shape();
        let ay = self.sequence(r, d);
        let az: Vec<i64> = ay.orders().iter().rev().map(|x| d - x).collect();
        let az = VanishingSeq::new(az, d).expect("sampled sequence is valid");
        let (gy, gz) = (self.genus(), self.genus());
        self.with_degrees(EhPair::new(d, ay, az, gy, gz).expect("sampled pair is valid"))
    }

    /// A pair of crude excess one: a refined pair with one entry of one side
    /// raised by one. Redraws until some entry can be raised.
    pub fn excess_one_pair(&mut self) -> SampledCase {
        loop {
            let case = self.refined_pair();
            let p = &case.pair;
            let mut options = Vec::new();
            for (side, s) in [(0, &p.a_y), (1, &p.a_z)] {
                let a = s.orders();
                for k in 0..a.len() {
                    let room = if k + 1 < a.len() { a[k + 1] - 1 } else { p.d };
                    if a[k] < room {
                        options.push((side, k));
                    }
                }
            }
            if options.is_empty() {
                continue;
            }
            let (side, k) = options[self.rng.gen_range(0..options.len())];
            let mut ay = p.a_y.orders().to_vec();
            let mut az = p.a_z.orders().to_vec();
            if side == 0 {
                ay[k] += 1;
            } else {
                az[k] += 1;
            }
            let pair = EhPair::new(
                p.d,
                VanishingSeq::new(ay, p.d).expect("raised sequence is valid"),
                VanishingSeq::new(az, p.d).expect("raised sequence is valid"),
                p.g_y,
                p.g_z,
            )
            .expect("raised pair is valid");
            return SampledCase { pair, ..case };
        }
    }

    /// A compatible pair plus up to three marked points on each side.
    pub fn reducible_curve(&mut self) -> ReducibleCurveData {
        let case = self.compatible_pair();
        let (r, d) = (case.pair.r, case.pair.d);
        let ny = self.rng.gen_range(0..=3);
        let nz = self.rng.gen_range(0..=3);
        let points_y = (0..ny).map(|_| self.sequence(r, d)).collect();
        let points_z = (0..nz).map(|_| self.sequence(r, d)).collect();
        ReducibleCurveData {
            pair: case.pair,
            points_y,
            points_z,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{crude_excess, eh_classify, EhClass};
    use super::*;

    #[test]
    fn generators_hit_their_classes() {
        let mut s = Sampler::new(7);
        for _ in 0..200 {
            assert!(s.compatible_pair().pair.compatible());
            assert_eq!(eh_classify(&s.refined_pair().pair), EhClass::Refined);
            assert_eq!(crude_excess(&s.excess_one_pair().pair), 1);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<_> = (0..20).map(|_| 0).scan(Sampler::new(3), |s, _| Some(s.compatible_pair().pair)).collect();
        let b: Vec<_> = (0..20).map(|_| 0).scan(Sampler::new(3), |s, _| Some(s.compatible_pair().pair)).collect();
        assert_eq!(a, b);
    }
}

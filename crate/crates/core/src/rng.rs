//! Deterministic point sampling for exact identity checks.
//!
//! A splitmix64 generator (documented constants, no external dependency, so
//! the stream is stable across platforms and releases) drives rational draws
//! with numerators in `[-9,9] \ {0}` and denominators in `[1,9]`. Callers
//! reject coincident coordinates and zeros where the operators have poles.

use crate::Rational;

/// splitmix64; state advances by the Weyl constant.
#[derive(Clone, Debug)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng {
            state: seed.wrapping_add(0x9E3779B97F4A7C15),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn range(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// A nonzero rational with numerator in `[-9,9] \ {0}` and denominator
    /// in `[1,9]`.
    pub fn rational(&mut self) -> Rational {
        let num = loop {
            let v = self.range(19) as i64 - 9;
            if v != 0 {
                break v;
            }
        };
        let den = self.range(9) as i64 + 1;
        Rational::new(num.into(), den.into())
    }

    /// `n` pairwise-distinct nonzero rationals.
    pub fn distinct_point(&mut self, n: usize) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        while out.len() < n {
            let c = self.rational();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// A rational strictly between 0 and 1 (for the deformation parameter).
    pub fn q_value(&mut self) -> Rational {
        let den = self.range(7) as i64 + 3; // 3..9
        let num = self.range((den - 1) as u64) as i64 + 1; // 1..den-1
        Rational::new(num.into(), den.into())
    }
}

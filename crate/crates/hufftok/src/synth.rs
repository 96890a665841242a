//! Seeded synthetic corpora with Zipf-distributed word frequencies.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfCorpus {
    /// Size of the word list tokens are drawn from.
    pub types: usize,
    pub tokens: usize,
    /// Zipf exponent `s`; rank `r` has probability proportional to `r^-s`.
    pub exponent: f64,
    pub words_per_line: usize,
    pub seed: u64,
}

impl ZipfCorpus {
    pub fn new(types: usize, tokens: usize, exponent: f64, seed: u64) -> Self {
        ZipfCorpus {
            types,
            tokens,
            exponent,
            words_per_line: 20,
            seed,
        }
    }

    /// Generates sentences of space-separated lowercase words.
    pub fn generate(&self) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let words = word_list(self.types, &mut rng);
        let zipf = Zipf::new(self.types as f64, self.exponent).expect("valid Zipf parameters");
        let per_line = self.words_per_line.max(1);
        let mut lines = Vec::with_capacity(self.tokens / per_line + 1);
        let mut line = String::new();
        for i in 0..self.tokens {
            let rank = zipf.sample(&mut rng) as usize;
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&words[rank - 1]);
            if (i + 1) % per_line == 0 {
                lines.push(std::mem::take(&mut line));
            }
        }
        if !line.is_empty() {
            lines.push(line);
        }
        lines
    }
}

/// `count` distinct random lowercase words of 3 to 10 letters.
pub fn word_list<R: Rng>(count: usize, rng: &mut R) -> Vec<String> {
    let mut seen = HashSet::with_capacity(count);
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let len = rng.random_range(3..=10);
        let w: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

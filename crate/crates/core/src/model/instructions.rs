use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ArwError;
use crate::rng::{site_word, CounterRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    /// Send one particle from `x` to `x + 1`.
    Move,
    /// Try to put the particle at `x` to sleep.
    Sleep,
}

/// Per-site i.i.d. instruction streams, materialized on demand.
///
/// Instruction `j` (1-based) at site `x` is a pure function of `(seed, x, j)`,
/// optionally overridden by a caller-fixed prefix. Reading the field through
/// [`InstructionField::next`] consumes instructions in order; two fields built
/// from the same seed hand out identical streams regardless of the order in
/// which sites are visited.
#[derive(Clone, Debug)]
pub struct InstructionField {
    zeta: f64,
    seed: u64,
    rng: CounterRng,
    prefixes: HashMap<i64, Vec<Instruction>>,
    cursors: HashMap<i64, u64>,
}

impl InstructionField {
    /// Field with `P[Sleep] = zeta`.
    pub fn new(zeta: f64, seed: u64) -> Result<Self, ArwError> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(ArwError::InvalidZeta(zeta));
        }
        Ok(Self {
            zeta,
            seed,
            rng: CounterRng::new(seed, "instructions"),
            prefixes: HashMap::new(),
            cursors: HashMap::new(),
        })
    }

    /// Fix the first instructions at `site`; later ones come from the seed.
    pub fn with_prefix(mut self, site: i64, prefix: Vec<Instruction>) -> Self {
        self.prefixes.insert(site, prefix);
        self
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Instruction number `j` (1-based) at `site`, without consuming it.
    pub fn instruction(&self, site: i64, j: u64) -> Instruction {
        debug_assert!(j >= 1, "instructions are indexed from 1");
        if let Some(prefix) = self.prefixes.get(&site) {
            if let Some(&ins) = prefix.get((j - 1) as usize) {
                return ins;
            }
        }
        if self.rng.uniform2(site_word(site), j) < self.zeta {
            Instruction::Sleep
        } else {
            Instruction::Move
        }
    }

    /// Number of instructions consumed so far at `site`.
    pub fn cursor(&self, site: i64) -> u64 {
        self.cursors.get(&site).copied().unwrap_or(0)
    }

    /// Consume the next unused instruction at `site`.
    pub fn next(&mut self, site: i64) -> Instruction {
        let cursor = self.cursors.entry(site).or_insert(0);
        *cursor += 1;
        let j = *cursor;
        self.instruction(site, j)
    }

    /// A copy of this field with every cursor rewound to the start.
    pub fn rewound(&self) -> Self {
        Self {
            cursors: HashMap::new(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_stable() {
        let mut a = InstructionField::new(0.4, 99).unwrap();
        let b = InstructionField::new(0.4, 99).unwrap();
        for j in 1..=50 {
            assert_eq!(a.next(-3), b.instruction(-3, j));
        }
        assert_eq!(a.cursor(-3), 50);
        assert_eq!(a.cursor(0), 0);
    }

    #[test]
    fn prefix_then_seeded_tail() {
        let base = InstructionField::new(0.5, 1).unwrap();
        let mut field = base
            .clone()
            .with_prefix(0, vec![Instruction::Sleep, Instruction::Move]);
        assert_eq!(field.next(0), Instruction::Sleep);
        assert_eq!(field.next(0), Instruction::Move);
        assert_eq!(field.next(0), base.instruction(0, 3));
    }

    #[test]
    fn sleep_frequency_matches_zeta() {
        let field = InstructionField::new(0.3, 5).unwrap();
        let n = 100_000u64;
        let sleeps = (1..=n)
            .filter(|&j| field.instruction((j % 17) as i64 - 8, j) == Instruction::Sleep)
            .count();
        let freq = sleeps as f64 / n as f64;
        assert!((freq - 0.3).abs() < 0.006, "{freq}");
    }

    #[test]
    fn degenerate_zeta_is_rejected() {
        assert!(InstructionField::new(0.0, 1).is_err());
        assert!(InstructionField::new(1.0, 1).is_err());
    }
}

#![allow(dead_code)]

use diffiety_core::expr::{Atom, Q};
use diffiety_core::Expr;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded generator of random exact expressions.
pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.0.gen_bool(0.5)
    }

    /// Nonzero `p/q` with `|p| ≤ 9`, `q ≤ 4`.
    pub fn coeff(&mut self) -> Expr {
        let p = loop {
            let p = self.int(-9, 9);
            if p != 0 {
                break p;
            }
        };
        Expr::rational(Q::new(p.into(), self.int(1, 4).into()))
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        items.choose(&mut self.0).expect("nonempty")
    }

    /// Sum of `terms` monomials with degree at most `max_deg` in each atom.
    pub fn poly(&mut self, atoms: &[Atom], terms: usize, max_deg: i64) -> Expr {
        let mut acc = Expr::zero();
        for _ in 0..terms {
            let mut m = self.coeff();
            for a in atoms {
                let k = self.int(0, max_deg);
                if k > 0 && self.int(0, 2) == 0 {
                    m = m.mul(&Expr::atom(a.clone()).pow(k as i32).unwrap());
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Random expression tree over `leaves` with `+ − × ÷ ^`.
    pub fn expr(&mut self, leaves: &[Expr], depth: usize) -> Expr {
        if depth == 0 || self.int(0, 3) == 0 {
            return if self.int(0, 3) == 0 {
                self.coeff()
            } else {
                self.pick(leaves).clone()
            };
        }
        let a = self.expr(leaves, depth - 1);
        match self.int(0, 4) {
            0 => a.add(&self.expr(leaves, depth - 1)),
            1 => a.sub(&self.expr(leaves, depth - 1)),
            2 => a.mul(&self.expr(leaves, depth - 1)),
            3 => {
                let b = self.expr(leaves, depth - 1);
                a.div(&b).unwrap_or(a)
            }
            _ => {
                let k = self.int(-2, 3) as i32;
                a.pow(k).unwrap_or(a)
            }
        }
    }
}

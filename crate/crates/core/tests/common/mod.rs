#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use fp::group::{Gen, Letter, Word};

/// The finite metabelian quotient `(ℤ/m)^(n × ℤ/N) ⋊ ℤ/N` of `G_n`, with `y` acting as the
/// cyclic shift and `t_j ↦ e(j, 0)`. Built from the presentation only.
#[derive(Clone, Copy, Debug)]
pub struct Quotient {
    pub n: usize,
    pub m: i64,
    pub period: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QElem {
    pub base: Vec<i64>,
    pub shift: i64,
}

impl Quotient {
    pub fn identity(&self) -> QElem {
        QElem { base: vec![0; self.n * self.period as usize], shift: 0 }
    }

    fn idx(&self, j: usize, k: i64) -> usize {
        (j - 1) * self.period as usize + k.rem_euclid(self.period) as usize
    }

    pub fn mul(&self, a: &QElem, b: &QElem) -> QElem {
        let mut base = a.base.clone();
        for j in 1..=self.n {
            for k in 0..self.period {
                let v = b.base[self.idx(j, k)];
                let slot = self.idx(j, k + a.shift);
                base[slot] = (base[slot] + v).rem_euclid(self.m);
            }
        }
        QElem { base, shift: (a.shift + b.shift).rem_euclid(self.period) }
    }

    pub fn inverse(&self, a: &QElem) -> QElem {
        let mut base = vec![0; a.base.len()];
        for j in 1..=self.n {
            for k in 0..self.period {
                base[self.idx(j, k - a.shift)] = (-a.base[self.idx(j, k)]).rem_euclid(self.m);
            }
        }
        QElem { base, shift: (-a.shift).rem_euclid(self.period) }
    }

    fn gen(&self, g: Gen) -> QElem {
        match g {
            Gen::Y => QElem { shift: 1, ..self.identity() },
            Gen::T(j) => {
                let mut e = self.identity();
                e.base[self.idx(j as usize, 0)] = 1;
                e
            }
            Gen::X(i) => {
                // x_i = y⁻¹ t_i⁻¹ y t_i
                let i = i as usize;
                let w: Word = format!("y^-1 t{i}^-1 y t{i}").parse().unwrap();
                self.eval(&w)
            }
        }
    }

    pub fn letter(&self, l: Letter) -> QElem {
        let g = self.gen(l.gen);
        if l.inv {
            self.inverse(&g)
        } else {
            g
        }
    }

    pub fn eval(&self, w: &Word) -> QElem {
        w.letters().iter().fold(self.identity(), |acc, &l| self.mul(&acc, &self.letter(l)))
    }

    /// The subgroup generated by the images of `gens`, by closure.
    pub fn closure(&self, gens: &[QElem]) -> BTreeSet<QElem> {
        let mut seen = BTreeSet::from([self.identity()]);
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(a) = queue.pop_front() {
            for g in gens {
                for h in [g.clone(), self.inverse(g)] {
                    let b = self.mul(&a, &h);
                    if seen.insert(b.clone()) {
                        queue.push_back(b);
                    }
                }
            }
        }
        seen
    }
}

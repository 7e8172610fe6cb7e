//! Level rewriting of the kernel of `φ`.
//!
//! `K = ker φ` is generated by the level letters `u(j,k) = y^k t_j y^{-k}`. A word over
//! `S_min` with zero y-exponent is rewritten by tracking the running y-exponent: a `t_j^{±1}`
//! read at level `k` becomes `u(j,k)^{±1}`. The abelianisation of those level letters
//! gives the level vector `α`, and every relator of `G` rewrites to a commutator
//! `[u(i,k-1)⁻¹u(i,k), u(j,k)]`, which [`derive_kernel_presentation`] checks mechanically.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FpError, Result};
use crate::group::{substitute_x, Element, Gen, GroupContext, Letter, Word};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelLetter {
    pub j: usize,
    pub k: i64,
    pub inv: bool,
}

impl LevelLetter {
    pub fn new(j: usize, k: i64, sign: i32) -> Self {
        LevelLetter { j, k, inv: sign < 0 }
    }

    pub fn inverse(self) -> Self {
        LevelLetter { inv: !self.inv, ..self }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    pub fn coord(self) -> (usize, i64) {
        (self.j, self.k)
    }
}

impl fmt::Display for LevelLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u({},{})", self.j, self.k)?;
        if self.inv {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A freely reduced word in level letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelWord(pub Vec<LevelLetter>);

impl LevelWord {
    pub fn from_letters(letters: impl IntoIterator<Item = LevelLetter>) -> Self {
        let mut w = LevelWord::default();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn push(&mut self, l: LevelLetter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn letters(&self) -> &[LevelLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> LevelWord {
        LevelWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &LevelWord) -> LevelWord {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    /// Shifts every level by `dk` (conjugation by `y^dk`).
    pub fn shifted(&self, dk: i64) -> LevelWord {
        LevelWord(self.0.iter().map(|l| LevelLetter { k: l.k + dk, ..*l }).collect())
    }

    pub fn exponents(&self) -> LevelVector {
        let mut v = LevelVector::default();
        for l in &self.0 {
            v.add(l.coord(), l.sign());
        }
        v
    }
}

impl fmt::Display for LevelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, l) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Exponent sums per level letter; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelVector(BTreeMap<(usize, i64), i64>);

impl LevelVector {
    pub fn add(&mut self, coord: (usize, i64), e: i64) {
        let entry = self.0.entry(coord).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.0.remove(&coord);
        }
    }

    pub fn get(&self, coord: (usize, i64)) -> i64 {
        self.0.get(&coord).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, i64), i64)> + '_ {
        self.0.iter().map(|(&c, &e)| (c, e))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus(&self, other: &LevelVector) -> LevelVector {
        let mut out = self.clone();
        for (c, e) in other.entries() {
            out.add(c, e);
        }
        out
    }

    pub fn negated(&self) -> LevelVector {
        LevelVector(self.0.iter().map(|(&c, &e)| (c, -e)).collect())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ((usize, i64), i64)>) -> Self {
        let mut v = LevelVector::default();
        for (c, e) in entries {
            v.add(c, e);
        }
        v
    }
}

impl fmt::Display for LevelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|((j, k), e)| format!("({j},{k}):{e}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The y-exponent morphism.
pub fn phi(a: &Element) -> i64 {
    a.phi()
}

/// Sum of the `x_i` exponents in the horizontal part of the wt-form. Not a morphism.
pub fn phi_i(a: &Element, i: usize) -> i64 {
    a.wt_form().0.exponent_sum(Gen::X(i as u8))
}

/// Rewrites a kernel word over `S_min` into level letters.
pub fn rewrite_levels(word: &Word) -> Result<LevelWord> {
    if !word.is_smin() {
        return Err(FpError::NotSmin);
    }
    let total = word.exponent_sum(Gen::Y);
    if total != 0 {
        return Err(FpError::NotInKernel(total));
    }
    let mut level = 0i64;
    let mut out = LevelWord::default();
    for l in word.letters() {
        match l.gen {
            Gen::Y => level += l.sign() as i64,
            Gen::T(j) => out.push(LevelLetter::new(j as usize, level, l.sign())),
            Gen::X(_) => unreachable!(),
        }
    }
    Ok(out)
}

/// The product of the factors `y^k t_j^{±1} y^{-k}`.
pub fn eval_levels(lw: &LevelWord) -> Element {
    let mut word = Word::empty();
    for l in lw.letters() {
        let y = Letter::y(if l.k >= 0 { 1 } else { -1 });
        for _ in 0..l.k.abs() {
            word.push_reduced(y);
        }
        word.push_reduced(Letter::t(l.j, l.sign() as i32));
        for _ in 0..l.k.abs() {
            word.push_reduced(y.inverse());
        }
    }
    crate::group::element_of_word(&word)
}

/// Level word of an element of `K` (through its `S_min` word).
pub fn level_word(a: &Element) -> Result<LevelWord> {
    rewrite_levels(&a.to_smin_word())
}

/// Abelianised level exponents of a kernel element.
pub fn alpha(a: &Element) -> Result<LevelVector> {
    Ok(level_word(a)?.exponents())
}

/// `y^k x_i y^{-k} = u(i,k-1)⁻¹ u(i,k)`.
pub fn level_x(i: usize, k: i64) -> LevelWord {
    LevelWord::from_letters([LevelLetter::new(i, k - 1, -1), LevelLetter::new(i, k, 1)])
}

/// `U⁻¹ X U X⁻¹` with `X = u(i,k-1)⁻¹u(i,k)` and `U = u(j,k)`.
pub fn expected_commutator(i: usize, j: usize, k: i64) -> LevelWord {
    let x = level_x(i, k);
    let u = LevelWord::from_letters([LevelLetter::new(j, k, 1)]);
    u.inverse().concat(&x).concat(&u).concat(&x.inverse())
}

/// One rewritten relator of `K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelRelator {
    /// The relator of `G` over `S`, e.g. `t1^-1 x2 t1 x2^-1`.
    pub source: String,
    pub level: i64,
    pub rewritten: LevelWord,
    /// `None` when the relator is already trivial over `S_min`.
    pub expected: Option<LevelWord>,
    pub matches_commutator: bool,
    pub trivial_in_g: bool,
    pub alpha_zero: bool,
}

impl KernelRelator {
    pub fn is_sound(&self) -> bool {
        self.matches_commutator && self.trivial_in_g && self.alpha_zero
    }
}

/// Rewrites the conjugates `y^k r y^{-k}` (`|k| ≤ level_range`) of the defining relators
/// of `G` into level words and checks each against the commutator family.
pub fn derive_kernel_presentation(ctx: &GroupContext, level_range: i64) -> Vec<KernelRelator> {
    let n = ctx.n();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let sources = [
                (format!("t{j}^-1 x{i} t{j} x{i}^-1"), Some((i, j))),
                (format!("t{j}^-1 y t{j} x{j}^-1 y^-1"), None),
            ];
            for (src, family) in sources {
                if family.is_none() && i != j {
                    continue;
                }
                let rel: Word = src.parse().expect("static relator");
                let smin_word = substitute_x(&rel);
                for k in -level_range..=level_range {
                    let conj = Word::power(Letter::y(1), k)
                        .concat(&smin_word)
                        .concat(&Word::power(Letter::y(1), -k));
                    let rewritten = rewrite_levels(&conj).expect("relators lie in ker phi");
                    let expected = family.map(|(i, j)| expected_commutator(i, j, k));
                    let matches_commutator = match &expected {
                        Some(e) => *e == rewritten,
                        None => rewritten.is_empty(),
                    };
                    out.push(KernelRelator {
                        source: src.clone(),
                        level: k,
                        trivial_in_g: eval_levels(&rewritten).is_identity(),
                        alpha_zero: rewritten.exponents().is_zero(),
                        rewritten,
                        expected,
                        matches_commutator,
                    });
                }
            }
        }
    }
    out
}

/// The right-angled Artin quotient of `K` in which `u(i,k)` and `u(j,k′)` commute when
/// `|k - k′| = 1`, or when `k = k′` and `i ≠ j`.
///
/// Killing the commutators of each two-level vertex group `⟨u(·,k-1), u(·,k)⟩ ≅ F_n × F_n`
/// turns `K` into this RAAG; every rewritten relator of `G` dies in it, which
/// [`LevelRaag::verify`] re-checks.
#[derive(Copy, Clone, Debug, Default)]
pub struct LevelRaag;

impl LevelRaag {
    pub fn commute(a: LevelLetter, b: LevelLetter) -> bool {
        let dk = (a.k - b.k).abs();
        dk == 1 || (dk == 0 && a.j != b.j) || (a.j == b.j && a.k == b.k)
    }

    /// Reduced (geodesic) form: cancels `a … a⁻¹` whenever everything in between
    /// commutes with `a`.
    pub fn reduce(&self, w: &LevelWord) -> LevelWord {
        let mut letters = w.0.clone();
        'outer: loop {
            for i in 0..letters.len() {
                let a = letters[i];
                for j in i + 1..letters.len() {
                    let b = letters[j];
                    if b == a.inverse() {
                        letters.remove(j);
                        letters.remove(i);
                        continue 'outer;
                    }
                    if !Self::commute(a, b) {
                        break;
                    }
                }
            }
            break;
        }
        LevelWord(letters)
    }

    /// The set of letters of the reduced form, an invariant of the element.
    pub fn support(&self, w: &LevelWord) -> std::collections::BTreeSet<(usize, i64)> {
        self.reduce(w).0.iter().map(|l| l.coord()).collect()
    }

    /// Checks that every rewritten relator in `|k| ≤ level_range` is trivial here. The
    /// commutation rule is invariant under level shifts, so a finite window suffices.
    pub fn verify(&self, ctx: &GroupContext, level_range: i64) -> bool {
        derive_kernel_presentation(ctx, level_range)
            .iter()
            .all(|r| self.reduce(&r.rewritten).is_empty())
    }
}

//! Exact arithmetic in `G_n = F_{n+1} ⋊_σ F_n`.
//!
//! The horizontal factor is free on `x_1..x_n, y`, the vertical factor is free on
//! `t_1..t_n`, and `σ(t_i)` fixes every `x_j` while sending `y ↦ y x_i`. An element is
//! stored in its unique tw-form `t·w` with `t` a reduced vertical word and `w` a reduced
//! horizontal word.
//!
//! The defining relations are `t⁻¹ u t = σ(t)(u)` for `u` horizontal, so conjugating by a
//! vertical word applies the automorphisms of its letters from left to right:
//! `σ(t t′) = σ(t′) ∘ σ(t)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FpError, Result};

/// A generator of `S = {x_1..x_n, y, t_1..t_n}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    X(u8),
    Y,
    T(u8),
}

impl Gen {
    pub fn is_vertical(self) -> bool {
        matches!(self, Gen::T(_))
    }

    pub fn is_horizontal(self) -> bool {
        !self.is_vertical()
    }

    pub fn index(self) -> Option<usize> {
        match self {
            Gen::X(i) | Gen::T(i) => Some(i as usize),
            Gen::Y => None,
        }
    }
}

/// A generator or its inverse.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Gen,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: Gen, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub const fn pos(gen: Gen) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn neg(gen: Gen) -> Self {
        Letter { gen, inv: true }
    }

    pub fn y(sign: i32) -> Self {
        Letter::new(Gen::Y, sign < 0)
    }

    pub fn x(i: usize, sign: i32) -> Self {
        Letter::new(Gen::X(i as u8), sign < 0)
    }

    pub fn t(i: usize, sign: i32) -> Self {
        Letter::new(Gen::T(i as u8), sign < 0)
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn sign(self) -> i32 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    fn fmt_base(self) -> String {
        match self.gen {
            Gen::Y => "y".to_string(),
            Gen::X(i) => format!("x{i}"),
            Gen::T(i) => format!("t{i}"),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inv {
            write!(f, "{}^-1", self.fmt_base())
        } else {
            write!(f, "{}", self.fmt_base())
        }
    }
}

/// A finite sequence of letters. Most constructors return freely reduced words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(pub Vec<Letter>);

impl TryFrom<String> for Word {
    type Error = FpError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out = Word::empty();
        for &l in &self.0 {
            out.push_reduced(l);
        }
        out
    }

    /// Appends a letter, cancelling against the last letter when possible.
    pub fn push_reduced(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push_reduced(l);
        }
        out
    }

    /// Sum of the exponents of `gen`.
    pub fn exponent_sum(&self, gen: Gen) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.sign() as i64)
            .sum()
    }

    pub fn is_vertical(&self) -> bool {
        self.0.iter().all(|l| l.gen.is_vertical())
    }

    pub fn is_horizontal(&self) -> bool {
        self.0.iter().all(|l| l.gen.is_horizontal())
    }

    pub fn is_smin(&self) -> bool {
        self.0.iter().all(|l| !matches!(l.gen, Gen::X(_)))
    }

    /// `letter^power` as a word.
    pub fn power(l: Letter, power: i64) -> Word {
        let l = if power < 0 { l.inverse() } else { l };
        Word(vec![l; power.unsigned_abs() as usize])
    }

    /// Largest generator index used.
    pub fn max_index(&self) -> usize {
        self.0.iter().filter_map(|l| l.gen.index()).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    /// Canonical print: runs of equal letters are collapsed into one caret token.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign() as i64;
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{}", l.fmt_base())?;
            } else {
                write!(f, "{}^{}", l.fmt_base(), run)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = FpError;

    /// Parses `y^-1 t1 x2^3`. Indices are not range-checked here; see
    /// [`GroupContext::parse_word`].
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            if matches!(token, "ε" | "e" | "1") {
                continue;
            }
            let (base, power) = match token.split_once('^') {
                Some((b, p)) => {
                    let p: i64 = p
                        .parse()
                        .map_err(|_| FpError::Parse(format!("bad exponent in `{token}`")))?;
                    (b, p)
                }
                None => (token, 1),
            };
            let gen = match base.as_bytes().first() {
                Some(b'y') if base.len() == 1 => Gen::Y,
                Some(b'x') | Some(b't') => {
                    let idx: u8 = base[1..]
                        .parse()
                        .map_err(|_| FpError::Parse(format!("bad generator `{base}`")))?;
                    if idx == 0 {
                        return Err(FpError::Parse(format!("index 0 in `{base}`")));
                    }
                    if base.starts_with('x') {
                        Gen::X(idx)
                    } else {
                        Gen::T(idx)
                    }
                }
                _ => return Err(FpError::Parse(format!("bad generator `{base}`"))),
            };
            letters.extend(Word::power(Letter::pos(gen), power).0);
        }
        Ok(Word(letters))
    }
}

/// Applies `σ(l)` to a reduced horizontal word, where `l` is a vertical letter.
fn sigma_letter(l: Letter, w: &Word) -> Word {
    let Gen::T(i) = l.gen else {
        panic!("sigma_letter called with horizontal letter {l}");
    };
    let xi = Letter::new(Gen::X(i), l.inv);
    let mut out = Word(Vec::with_capacity(w.len() + 4));
    for &c in &w.0 {
        match (c.gen, c.inv) {
            (Gen::Y, false) => {
                out.push_reduced(c);
                out.push_reduced(xi);
            }
            (Gen::Y, true) => {
                out.push_reduced(xi.inverse());
                out.push_reduced(c);
            }
            _ => out.push_reduced(c),
        }
    }
    out
}

/// The image of the horizontal word `w` under `σ(t)`, i.e. the horizontal word equal to
/// `t⁻¹ w t` in `G`.
pub fn sigma_apply(t: &Word, w: &Word) -> Word {
    debug_assert!(t.is_vertical() && w.is_horizontal());
    let mut cur = w.reduce();
    for &l in &t.0 {
        cur = sigma_letter(l, &cur);
    }
    cur
}

/// A group element in tw-form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    vert: Word,
    horiz: Word,
}

impl Element {
    pub fn identity() -> Self {
        Element::default()
    }

    /// Builds `t·w`, reducing both parts.
    pub fn from_parts(vert: Word, horiz: Word) -> Result<Self> {
        if !vert.is_vertical() {
            return Err(FpError::Parse(format!("`{vert}` is not a vertical word")));
        }
        if !horiz.is_horizontal() {
            return Err(FpError::Parse(format!("`{horiz}` is not a horizontal word")));
        }
        Ok(Element {
            vert: vert.reduce(),
            horiz: horiz.reduce(),
        })
    }

    pub fn vertical(t: Word) -> Self {
        Element::from_parts(t, Word::empty()).expect("vertical word")
    }

    pub fn horizontal(w: Word) -> Self {
        Element::from_parts(Word::empty(), w).expect("horizontal word")
    }

    pub fn from_letter(l: Letter) -> Self {
        if l.gen.is_vertical() {
            Element { vert: Word(vec![l]), horiz: Word::empty() }
        } else {
            Element { vert: Word::empty(), horiz: Word(vec![l]) }
        }
    }

    /// The vertical part `π_v`.
    pub fn vert(&self) -> &Word {
        &self.vert
    }

    /// The horizontal part of the tw-form.
    pub fn horiz(&self) -> &Word {
        &self.horiz
    }

    pub fn is_identity(&self) -> bool {
        self.vert.is_empty() && self.horiz.is_empty()
    }

    /// `(t₁,w₁)(t₂,w₂) = (t₁t₂, σ(t₂)(w₁)·w₂)`.
    pub fn mul(&self, other: &Element) -> Element {
        let vert = self.vert.concat(&other.vert);
        let horiz = sigma_apply(&other.vert, &self.horiz).concat(&other.horiz);
        Element { vert, horiz }
    }

    /// `(t,w)⁻¹ = (t⁻¹, σ(t⁻¹)(w⁻¹))`.
    pub fn inverse(&self) -> Element {
        let tinv = self.vert.inverse();
        let horiz = sigma_apply(&tinv, &self.horiz.inverse());
        Element { vert: tinv, horiz }
    }

    /// Right multiplication by one letter; the hot path of ball searches.
    pub fn mul_letter(&self, l: Letter) -> Element {
        if l.gen.is_vertical() {
            let mut vert = self.vert.clone();
            vert.push_reduced(l);
            Element { vert, horiz: sigma_letter(l, &self.horiz) }
        } else {
            let mut horiz = self.horiz.clone();
            horiz.push_reduced(l);
            Element { vert: self.vert.clone(), horiz }
        }
    }

    /// The unique decomposition `w′·t` with `t·w = w′·t`; returns `(w′, t)`.
    pub fn wt_form(&self) -> (Word, Word) {
        (sigma_apply(&self.vert.inverse(), &self.horiz), self.vert.clone())
    }

    /// Rebuilds an element from a wt-form pair.
    pub fn from_wt(w: &Word, t: &Word) -> Element {
        Element::horizontal(w.clone()).mul(&Element::vertical(t.clone()))
    }

    /// Word over `S_min = {y, t_i}` obtained by substituting `x_i ↦ y⁻¹ t_i⁻¹ y t_i`.
    pub fn to_smin_word(&self) -> Word {
        self.vert.concat(&substitute_x(&self.horiz))
    }

    /// Length of [`Element::to_smin_word`].
    pub fn smin_len(&self) -> usize {
        self.to_smin_word().len()
    }

    /// Length of the tw-form over `S`, i.e. `|t| + |w|`.
    pub fn nf_len(&self) -> usize {
        self.vert.len() + self.horiz.len()
    }

    /// The y-exponent morphism `φ : G → ℤ`.
    pub fn phi(&self) -> i64 {
        self.horiz.exponent_sum(Gen::Y)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |w: &Word| if w.is_empty() { "ε".to_string() } else { w.to_string() };
        write!(f, "({}, {})", part(&self.vert), part(&self.horiz))
    }
}

/// Replaces each `x_i^{±1}` by `(y⁻¹ t_i⁻¹ y t_i)^{±1}` and reduces.
pub fn substitute_x(w: &Word) -> Word {
    let mut out = Word::empty();
    for &l in w.letters() {
        match l.gen {
            Gen::X(i) => {
                let i = i as usize;
                let sub = [Letter::y(-1), Letter::t(i, -1), Letter::y(1), Letter::t(i, 1)];
                if l.inv {
                    for s in sub.iter().rev() {
                        out.push_reduced(s.inverse());
                    }
                } else {
                    for &s in &sub {
                        out.push_reduced(s);
                    }
                }
            }
            _ => out.push_reduced(l),
        }
    }
    out
}

/// Free reduction of a word.
pub fn reduce(word: &Word) -> Word {
    word.reduce()
}

/// Left-to-right evaluation of a word over `S ∪ S⁻¹`.
pub fn element_of_word(word: &Word) -> Element {
    word.0
        .iter()
        .fold(Element::identity(), |acc, &l| acc.mul_letter(l))
}

/// `t_i^{k₀} y t_i^{k₁} y⁻¹ ··· t_i^{k_{2l}} y t_i^{k_{2l+1}} y⁻¹`.
///
/// An odd-length exponent list is padded with a trailing zero.
pub fn grid_word(i: usize, exponents: &[i64]) -> Word {
    let mut letters = Vec::new();
    for pair in exponents.chunks(2) {
        let k0 = pair[0];
        let k1 = pair.get(1).copied().unwrap_or(0);
        letters.extend(Word::power(Letter::t(i, 1), k0).0);
        letters.push(Letter::y(1));
        letters.extend(Word::power(Letter::t(i, 1), k1).0);
        letters.push(Letter::y(-1));
    }
    Word(letters)
}

/// The rank parameter `n` of `G_n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupContext {
    n: usize,
}

impl Default for GroupContext {
    fn default() -> Self {
        GroupContext { n: 2 }
    }
}

impl GroupContext {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(FpError::InvalidRank(n));
        }
        if n > 60 {
            return Err(FpError::InvalidRank(n));
        }
        Ok(GroupContext { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Index following `i` cyclically (`i+1` with `n+1 ≡ 1`).
    pub fn next_index(&self, i: usize) -> usize {
        i % self.n + 1
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(FpError::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Parses a word and validates generator indices against `n`.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        let m = w.max_index();
        if m > self.n {
            return Err(FpError::IndexOutOfRange { index: m, n: self.n });
        }
        Ok(w)
    }

    pub fn parse_element(&self, s: &str) -> Result<Element> {
        Ok(element_of_word(&self.parse_word(s)?))
    }

    /// `S_min ∪ S_min⁻¹` in a fixed order: `y, y⁻¹, t_1, t_1⁻¹, …`.
    pub fn smin_letters(&self) -> Vec<Letter> {
        let mut v = vec![Letter::y(1), Letter::y(-1)];
        for i in 1..=self.n {
            v.push(Letter::t(i, 1));
            v.push(Letter::t(i, -1));
        }
        v
    }

    /// `S ∪ S⁻¹`.
    pub fn s_letters(&self) -> Vec<Letter> {
        let mut v = self.smin_letters();
        for i in 1..=self.n {
            v.push(Letter::x(i, 1));
            v.push(Letter::x(i, -1));
        }
        v
    }

    /// A uniformly random freely reduced `S_min` word of length `len`.
    pub fn random_smin_word<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Word {
        let letters = self.smin_letters();
        let mut w = Word::empty();
        while w.len() < len {
            let l = letters[rng.gen_range(0..letters.len())];
            if w.0.last() != Some(&l.inverse()) {
                w.0.push(l);
            }
        }
        w
    }

    /// A random element given by a reduced `S_min` word of length at most `max_len`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> Element {
        let len = rng.gen_range(0..=max_len);
        element_of_word(&self.random_smin_word(rng, len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn el(s: &str) -> Element {
        element_of_word(&w(s))
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&w("t1 t1^-1")), Word::empty());
        assert_eq!(reduce(&w("y x1 x1^-1 y")).to_string(), "y^2");
        assert_eq!(reduce(&w("y t1 y^-1")).to_string(), "y t1 y^-1");
    }

    #[test]
    fn parse_print() {
        assert_eq!(w("y^-1 t1 x2^3").to_string(), "y^-1 t1 x2^3");
        assert_eq!(w("t1 t1 t1^0 y").to_string(), "t1^2 y");
        assert!("z1".parse::<Word>().is_err());
        assert!("x0".parse::<Word>().is_err());
        assert!("y^a".parse::<Word>().is_err());
        assert!(GroupContext::new(2).unwrap().parse_word("t3").is_err());
        assert!(GroupContext::new(1).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_apply(&w("t1"), &w("y")).to_string(), "y x1");
        assert_eq!(sigma_apply(&w("t1^-1"), &w("y")).to_string(), "y x1^-1");
        assert_eq!(sigma_apply(&w("t1"), &w("y x1^-1")).to_string(), "y");
        assert_eq!(sigma_apply(&w("t1 t2"), &w("y")).to_string(), "y x2 x1");
        assert_eq!(sigma_apply(&w("t2"), &w("x1")).to_string(), "x1");
        // oracle for the composition convention: (t1 t2)^-1 y (t1 t2)
        assert_eq!(el("t2^-1 t1^-1 y t1 t2"), Element::horizontal(w("y x2 x1")));
    }

    #[test]
    fn multiply_examples() {
        let a = Element::horizontal(w("y"));
        let b = Element::vertical(w("t1"));
        assert_eq!(a.mul(&b).to_string(), "(t1, y x1)");
        let a = Element::from_parts(w("t1"), w("x1")).unwrap();
        let b = Element::vertical(w("t1^-1"));
        assert_eq!(a.mul(&b), Element::horizontal(w("x1")));
    }

    #[test]
    fn invert_examples() {
        let a = Element::from_parts(w("t1"), w("y x1")).unwrap();
        let inv = a.inverse();
        assert_eq!(inv, el("x1^-1 y^-1 t1^-1"));
        assert_eq!(
            inv,
            Element::from_parts(w("t1^-1"), sigma_apply(&w("t1^-1"), &w("x1^-1 y^-1"))).unwrap()
        );
        assert!(a.mul(&inv).is_identity());
        assert_eq!(Element::identity().inverse(), Element::identity());
    }

    #[test]
    fn element_of_word_examples() {
        assert_eq!(el("y^-1 t1^-1 y t1"), Element::horizontal(w("x1")));
        let g = el("t1^2 y t1^-1 y^-1");
        assert_eq!(g.wt_form(), (w("y x1^-1 y^-1"), w("t1")));
        assert!(el("").is_identity());
    }

    #[test]
    fn smin_examples() {
        assert_eq!(Element::horizontal(w("x1")).to_smin_word().to_string(), "y^-1 t1^-1 y t1");
        assert_eq!(Element::vertical(w("t2")).to_smin_word().to_string(), "t2");
        let a = Element::horizontal(w("y x2"));
        assert_eq!(a.to_smin_word().to_string(), "t2^-1 y t2");
        assert_eq!(element_of_word(&a.to_smin_word()), a);
    }

    #[test]
    fn wt_examples() {
        assert_eq!(el("t1 y t1 y^-1").wt_form(), (w("y x1 y^-1"), w("t1^2")));
        assert_eq!(Element::vertical(w("t1 t2")).wt_form(), (Word::empty(), w("t1 t2")));
        assert_eq!(Element::horizontal(w("y x2")).wt_form(), (w("y x2"), Word::empty()));
    }

    #[test]
    fn grid_word_examples() {
        assert_eq!(grid_word(1, &[2, -1]).to_string(), "t1^2 y t1^-1 y^-1");
        assert_eq!(grid_word(1, &[1, 1]).to_string(), "t1 y t1 y^-1");
        assert_eq!(grid_word(2, &[0, 3]).to_string(), "y t2^3 y^-1");
    }

    #[test]
    fn defining_relations() {
        let ctx = GroupContext::new(3).unwrap();
        for i in 1..=ctx.n() {
            for j in 1..=ctx.n() {
                assert_eq!(el(&format!("t{j}^-1 x{i} t{j}")), el(&format!("x{i}")));
                assert_eq!(el(&format!("t{j}^-1 y t{j}")), el(&format!("y x{j}")));
            }
        }
    }
}

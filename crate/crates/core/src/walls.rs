//! Horizontal, vertical and vertizontal walls: side predicates, canonical keys, crossings
//! along paths, and the wall pseudo-metric `ω`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cayley::{step_status, Ball, EdgeVerdict};
use crate::error::{FpError, Result};
use crate::group::{Element, Gen, GroupContext, Letter, Word};
use crate::subgroup::{Budget, Membership3, MembershipOracle, SubgroupId, Tier};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Block,
    Co,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Block => Side::Co,
            Side::Co => Side::Block,
        }
    }

    fn of(block: bool) -> Side {
        if block {
            Side::Block
        } else {
            Side::Co
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WallKey {
    /// The tree edge between `prefix` and `prefix·t_j` of the vertical free group.
    Vertical { prefix: Word, j: usize },
    /// `rep·(𝒴, 𝒴ᶜ)` with `rep` the reduced horizontal representative.
    Horizontal { rep: Word },
    /// `base·(𝒯_i, 𝒯_iᶜ)`; two keys name the same wall iff `base₁⁻¹base₂ ∈ H_i`.
    Vertizontal { i: usize, base: Element },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Vertical,
    Horizontal,
    Vertizontal(usize),
}

impl WallKey {
    pub fn family(&self) -> Family {
        match self {
            WallKey::Vertical { .. } => Family::Vertical,
            WallKey::Horizontal { .. } => Family::Horizontal,
            WallKey::Vertizontal { i, .. } => Family::Vertizontal(*i),
        }
    }

    /// Left translate `g·W`.
    pub fn translate(&self, g: &Element) -> WallKey {
        match self {
            WallKey::Vertical { prefix, j } => {
                WallKey::Vertical { prefix: g.vert().concat(prefix), j: *j }
            }
            WallKey::Horizontal { rep } => horizontal_key_of_edge(&g.mul(&Element::horizontal(rep.clone()))),
            WallKey::Vertizontal { i, base } => WallKey::Vertizontal { i: *i, base: g.mul(base) },
        }
    }
}

impl fmt::Display for WallKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |w: &Word| if w.is_empty() { "ε".to_string() } else { w.to_string() };
        match self {
            WallKey::Vertical { prefix, j } => write!(f, "V[{}; t{j}]", w(prefix)),
            WallKey::Horizontal { rep } => write!(f, "H[{}]", w(rep)),
            WallKey::Vertizontal { i, base } => write!(f, "T{i}[{base}]"),
        }
    }
}

/// Parses the printed forms `H[w]`, `V[t; tj]` and `Ti[g]`; `g` is a word or a tw-pair `(t, w)`.
impl FromStr for WallKey {
    type Err = FpError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || FpError::Parse(format!("wall key {s:?}: expected H[w], V[t; tj] or Ti[g]"));
        let s = s.trim();
        let open = s.find('[').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?.trim();
        let word = |w: &str| -> Result<Word> { Ok(w.trim().parse::<Word>()?.reduce()) };
        match &s[..open] {
            "H" => {
                let rep = word(inner)?;
                if !rep.is_horizontal() {
                    return Err(bad());
                }
                Ok(WallKey::Horizontal { rep })
            }
            "V" => {
                let (prefix, t) = inner.split_once(';').ok_or_else(bad)?;
                let prefix = word(prefix)?;
                let j = t.trim().strip_prefix('t').and_then(|j| j.parse().ok()).ok_or_else(bad)?;
                if !prefix.is_vertical() || j == 0 {
                    return Err(bad());
                }
                Ok(WallKey::Vertical { prefix, j })
            }
            f if f.starts_with('T') => {
                let i: usize = f[1..].parse().map_err(|_| bad())?;
                let base = match inner.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                    Some(pair) => {
                        let (t, w) = pair.split_once(',').ok_or_else(bad)?;
                        Element::from_parts(word(t)?, word(w)?)?
                    }
                    None => crate::group::element_of_word(&word(inner)?),
                };
                Ok(WallKey::Vertizontal { i, base })
            }
            _ => Err(bad()),
        }
    }
}

/// `BlockSide` iff the horizontal part of `rep⁻¹·g` begins with `y`.
pub fn side_horizontal(rep: &Word, g: &Element) -> Side {
    let h = Element::horizontal(rep.clone()).inverse().mul(g);
    Side::of(h.horiz().0.first() == Some(&Letter::y(1)))
}

/// `BlockSide` iff `prefix⁻¹·π_v(g)` begins with `t_j`.
pub fn side_vertical(prefix: &Word, j: usize, g: &Element) -> Side {
    let v = prefix.inverse().concat(g.vert());
    Side::of(v.0.first() == Some(&Letter::t(j, 1)))
}

/// Key of the horizontal wall crossed by the `y`-edge `(u, u·y)`.
pub fn horizontal_key_of_edge(u: &Element) -> WallKey {
    WallKey::Horizontal { rep: u.wt_form().0 }
}

/// Key of the vertical wall crossed by the `t_j`-edge `(u, u·t_j)`.
pub fn vertical_key_of_edge(u: &Element, j: usize) -> WallKey {
    WallKey::Vertical { prefix: u.vert().clone(), j }
}

/// Key of the vertizontal wall crossed by the `t_i`-edge `(u, u·t_i)`.
pub fn vertizontal_key_of_edge(u: &Element, i: usize) -> WallKey {
    WallKey::Vertizontal { i, base: u.clone() }
}

/// Walls crossed by the step `v → v·l` of an `S_min` path, with the direction of
/// crossing (`+1` when entering the block side).
pub fn step_walls(v: &Element, l: Letter) -> Vec<(WallKey, i32)> {
    let (u, s) = if l.inv { (v.mul_letter(l), -1) } else { (v.clone(), 1) };
    match l.gen {
        Gen::Y => vec![(horizontal_key_of_edge(&u), s)],
        Gen::T(j) => {
            let j = j as usize;
            vec![(vertical_key_of_edge(&u, j), s), (vertizontal_key_of_edge(&u, j), -s)]
        }
        Gen::X(_) => panic!("step_walls expects an S_min letter"),
    }
}

/// Outcome of comparing two keys of the same family.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyEq {
    Equal(Tier),
    Distinct(Tier),
    Unknown,
}

/// The wall system of `G_n`: membership oracles for every `H_i` plus a shared budget.
pub struct WallSystem {
    ctx: GroupContext,
    oracles: Vec<MembershipOracle>,
    pub budget: Budget,
}

impl fmt::Debug for WallSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WallSystem").field("n", &self.ctx.n()).field("budget", &self.budget).finish()
    }
}

impl WallSystem {
    pub fn new(ctx: GroupContext, budget: Budget) -> Self {
        let oracles = (1..=ctx.n())
            .map(|i| MembershipOracle::new(ctx, SubgroupId { i }))
            .collect();
        WallSystem { ctx, oracles, budget }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn oracle(&self, i: usize) -> &MembershipOracle {
        &self.oracles[i - 1]
    }

    pub fn membership(&self, i: usize, g: &Element) -> Membership3 {
        self.oracle(i).membership(g, self.budget)
    }

    /// Side of `g` with respect to the vertizontal wall `base·(𝒯_i, 𝒯_iᶜ)`: parity of the
    /// `E_i` edges met along `to_smin_word(base⁻¹g)`.
    pub fn side_vertizontal(&self, i: usize, base: &Element, g: &Element) -> Result<(Side, Tier)> {
        let h = base.inverse().mul(g);
        self.parity_along(i, &Element::identity(), &h.to_smin_word())
    }

    /// Parity walk along an arbitrary `S_min` word from `start`, relative to the base
    /// vertizontal `i`-wall: `BlockSide` iff the endpoint is on the side of `e`, assuming
    /// `start` is.
    pub fn parity_along(&self, i: usize, start: &Element, word: &Word) -> Result<(Side, Tier)> {
        let oracle = self.oracle(i);
        let mut side = Side::Block;
        let mut tier = Tier::Certified;
        let mut v = start.clone();
        for &l in &word.0 {
            if let Some(st) = step_status(oracle, &v, l, self.budget) {
                tier = tier.max(st.tier());
                match st.verdict {
                    EdgeVerdict::InE => side = side.flip(),
                    EdgeVerdict::NotInE => {}
                    EdgeVerdict::Unresolved => return Err(FpError::UnresolvedEdges(1)),
                }
            }
            v = v.mul_letter(l);
        }
        Ok((side, tier))
    }

    pub fn side(&self, key: &WallKey, g: &Element) -> Result<(Side, Tier)> {
        match key {
            WallKey::Vertical { prefix, j } => Ok((side_vertical(prefix, *j, g), Tier::Certified)),
            WallKey::Horizontal { rep } => Ok((side_horizontal(rep, g), Tier::Certified)),
            WallKey::Vertizontal { i, base } => self.side_vertizontal(*i, base, g),
        }
    }

    pub fn separates(&self, key: &WallKey, g: &Element, h: &Element) -> Result<(bool, Tier)> {
        let (a, ta) = self.side(key, g)?;
        let (b, tb) = self.side(key, h)?;
        Ok((a != b, ta.max(tb)))
    }

    /// Whether two keys name the same wall.
    pub fn same_wall(&self, a: &WallKey, b: &WallKey) -> KeyEq {
        match (a, b) {
            (WallKey::Vertizontal { i, base: b1 }, WallKey::Vertizontal { i: i2, base: b2 }) if i == i2 => {
                if b1 == b2 {
                    return KeyEq::Equal(Tier::Certified);
                }
                let m = self.membership(*i, &b1.inverse().mul(b2));
                match m.is_member() {
                    Some(true) => KeyEq::Equal(m.tier()),
                    Some(false) => KeyEq::Distinct(m.tier()),
                    None => KeyEq::Unknown,
                }
            }
            _ => {
                if a == b {
                    KeyEq::Equal(Tier::Certified)
                } else {
                    KeyEq::Distinct(Tier::Certified)
                }
            }
        }
    }

    /// Walls met along a path, deduplicated.
    pub fn walls_crossed(&self, base: &Element, word: &Word) -> WallCrossingReport {
        let mut crossings = Vec::new();
        let mut distinct: Vec<KeyTally> = Vec::new();
        let mut tier = Tier::Certified;
        let mut unresolved_merges = 0;
        let mut v = base.clone();
        for (pos, &l) in word.0.iter().enumerate() {
            for (key, sign) in step_walls(&v, l) {
                let mut slot = None;
                let mut saw_unknown = false;
                for (k, t) in distinct.iter().enumerate() {
                    if t.key.family() != key.family() {
                        continue;
                    }
                    if let WallKey::Vertizontal { i, base } = &key {
                        let WallKey::Vertizontal { base: b0, .. } = &t.key else { unreachable!() };
                        // cheap invariant first
                        if self.oracle(*i).coset_invariant(b0) != self.oracle(*i).coset_invariant(base) {
                            continue;
                        }
                    }
                    match self.same_wall(&t.key, &key) {
                        KeyEq::Equal(tr) => {
                            tier = tier.max(tr);
                            slot = Some(k);
                            break;
                        }
                        KeyEq::Distinct(tr) => tier = tier.max(tr),
                        KeyEq::Unknown => saw_unknown = true,
                    }
                }
                if saw_unknown && slot.is_none() {
                    unresolved_merges += 1;
                    tier = Tier::Unresolved;
                }
                let k = slot.unwrap_or_else(|| {
                    distinct.push(KeyTally { key: key.clone(), crossings: 0, net: 0 });
                    distinct.len() - 1
                });
                distinct[k].crossings += 1;
                distinct[k].net += sign;
                crossings.push(CrossingEvent { position: pos, key, sign, wall: k });
            }
            v = v.mul_letter(l);
        }
        WallCrossingReport { crossings, walls: distinct, unresolved_merges, tier }
    }

    /// `ω(g, h)`: walls separating `g` from `h`, by family.
    pub fn omega(&self, g: &Element, h: &Element) -> OmegaReport {
        let word = g.inverse().mul(h).to_smin_word();
        let report = self.walls_crossed(g, &word);
        let vertical = g.vert().inverse().concat(h.vert()).len();
        let mut horizontal = 0;
        let mut vertizontal = vec![0; self.ctx.n()];
        let mut counted_vertical = 0;
        for w in report.walls.iter().filter(|w| w.crossings % 2 == 1) {
            match w.key.family() {
                Family::Vertical => counted_vertical += 1,
                Family::Horizontal => horizontal += 1,
                Family::Vertizontal(i) => vertizontal[i - 1] += 1,
            }
        }
        debug_assert_eq!(counted_vertical, vertical);
        let total = vertical + horizontal + vertizontal.iter().sum::<usize>();
        OmegaReport {
            total,
            vertical,
            horizontal,
            vertizontal,
            confidence: report.tier,
            upper_bound: report.unresolved_merges > 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub position: usize,
    pub key: WallKey,
    /// `+1` when entering the block side.
    pub sign: i32,
    /// Index into [`WallCrossingReport::walls`].
    pub wall: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeyTally {
    pub key: WallKey,
    pub crossings: usize,
    pub net: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WallCrossingReport {
    pub crossings: Vec<CrossingEvent>,
    pub walls: Vec<KeyTally>,
    pub unresolved_merges: usize,
    pub tier: Tier,
}

impl WallCrossingReport {
    /// Walls crossed an odd number of times, i.e. separating the endpoints.
    pub fn separating(&self) -> Vec<&WallKey> {
        self.walls.iter().filter(|w| w.crossings % 2 == 1).map(|w| &w.key).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub total: usize,
    pub vertical: usize,
    pub horizontal: usize,
    /// Entry `i-1` counts vertizontal `i`-walls.
    pub vertizontal: Vec<usize>,
    pub confidence: Tier,
    /// Some vertizontal keys could not be compared, so the count may be too large.
    pub upper_bound: bool,
}

/// Counts keys per family, used for the composition checks of crossing families.
pub fn family_counts<'a>(keys: impl IntoIterator<Item = &'a WallKey>) -> BTreeMap<Family, usize> {
    let mut out = BTreeMap::new();
    for k in keys {
        *out.entry(k.family()).or_insert(0) += 1;
    }
    out
}

/// One row of the properness scan: `ω(e, ·)` over sampled elements of a sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropernessRow {
    pub r: usize,
    pub min_omega: usize,
    pub mean_omega: f64,
    pub samples: usize,
    pub confidence: Tier,
}

/// Samples up to `per_sphere` elements of every sphere of `ball` (the whole sphere when it
/// is smaller) and records `ω(e, ·)`.
pub fn properness_scan<R: Rng + ?Sized>(
    sys: &WallSystem,
    ball: &Ball,
    per_sphere: usize,
    rng: &mut R,
) -> Vec<PropernessRow> {
    let e = Element::identity();
    (0..=ball.radius)
        .map(|r| {
            let mut sphere = ball.sphere(r);
            if sphere.len() > per_sphere {
                sphere = sphere.choose_multiple(rng, per_sphere).copied().collect();
                sphere.sort_unstable();
            }
            let reports: Vec<OmegaReport> = sphere.iter().map(|&v| sys.omega(&e, ball.vertex(v))).collect();
            let totals: Vec<usize> = reports.iter().map(|o| o.total).collect();
            PropernessRow {
                r,
                min_omega: totals.iter().copied().min().unwrap_or(0),
                mean_omega: totals.iter().sum::<usize>() as f64 / totals.len().max(1) as f64,
                samples: totals.len(),
                confidence: reports
                    .iter()
                    .map(|o| if o.upper_bound { Tier::Unresolved } else { o.confidence })
                    .max()
                    .unwrap_or(Tier::Certified),
            }
        })
        .collect()
}

pub fn properness_csv(rows: &[PropernessRow]) -> String {
    let mut s = String::from("r,min_omega,mean_omega,samples,confidence\n");
    for row in rows {
        s.push_str(&format!("{},{},{:.3},{},{}\n", row.r, row.min_omega, row.mean_omega, row.samples, row.confidence));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2() -> GroupContext {
        GroupContext::new(2).unwrap()
    }

    fn el(s: &str) -> Element {
        ctx2().parse_element(s).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn sys() -> WallSystem {
        WallSystem::new(ctx2(), Budget::default())
    }

    #[test]
    fn keys_parse_their_printed_form() {
        let u = el("t2 y t1^-1");
        for key in [
            horizontal_key_of_edge(&u),
            vertical_key_of_edge(&u, 1),
            vertizontal_key_of_edge(&u, 2),
            WallKey::Horizontal { rep: Word::empty() },
        ] {
            assert_eq!(key.to_string().parse::<WallKey>().unwrap(), key);
        }
        assert_eq!("T1[y t1]".parse::<WallKey>().unwrap(), vertizontal_key_of_edge(&el("y t1"), 1));
        assert!("H[t1]".parse::<WallKey>().is_err());
        assert!("Q[y]".parse::<WallKey>().is_err());
    }

    #[test]
    fn horizontal_sides() {
        assert_eq!(side_horizontal(&w(""), &el("y")), Side::Block);
        assert_eq!(side_horizontal(&w(""), &Element::identity()), Side::Co);
        assert_eq!(side_horizontal(&w(""), &el("t1")), Side::Co);
    }

    #[test]
    fn vertical_sides() {
        assert_eq!(side_vertical(&w(""), 1, &el("t1")), Side::Block);
        assert_eq!(side_vertical(&w(""), 1, &Element::identity()), Side::Co);
        assert_eq!(side_vertical(&w(""), 1, &el("t1 y x2")), Side::Block);
    }

    #[test]
    fn horizontal_keys() {
        assert_eq!(horizontal_key_of_edge(&Element::identity()), WallKey::Horizontal { rep: w("") });
        assert_eq!(horizontal_key_of_edge(&el("t1")), WallKey::Horizontal { rep: w("") });
        assert_eq!(horizontal_key_of_edge(&el("y")), WallKey::Horizontal { rep: w("y") });
    }

    #[test]
    fn vertizontal_sides() {
        let s = sys();
        let e = Element::identity();
        assert_eq!(s.side_vertizontal(1, &e, &e).unwrap().0, Side::Block);
        assert_eq!(s.side_vertizontal(1, &e, &el("t1")).unwrap().0, Side::Co);
        assert_eq!(s.side_vertizontal(1, &e, &el("x1")).unwrap().0, Side::Co);
        assert_eq!(s.side_vertizontal(1, &e, &el("t1 y x2")).unwrap(), (Side::Co, Tier::Certified));
    }

    #[test]
    fn crossings_along_paths() {
        let s = sys();
        let e = Element::identity();
        let r = s.walls_crossed(&e, &w("y"));
        assert_eq!(r.walls.len(), 1);
        assert_eq!(r.walls[0].key.family(), Family::Horizontal);
        let r = s.walls_crossed(&e, &w("t1"));
        let fams: Vec<Family> = r.walls.iter().map(|t| t.key.family()).collect();
        assert_eq!(fams, vec![Family::Vertical, Family::Vertizontal(1)]);
        let r = s.walls_crossed(&e, &w("y^-1 t1^-1 y t1"));
        let by = |f: Family| r.walls.iter().filter(|t| t.key.family() == f).collect::<Vec<_>>();
        assert!(by(Family::Horizontal).iter().all(|t| t.net == 0 && t.crossings == 2));
        assert_eq!(by(Family::Horizontal).len(), 1);
        assert!(by(Family::Vertical).iter().all(|t| t.net == 0));
        let vz = by(Family::Vertizontal(1));
        assert_eq!(vz.len(), 2);
        assert!(vz.iter().all(|t| t.crossings == 1));
    }

    #[test]
    fn omega_examples() {
        let s = sys();
        let e = Element::identity();
        let o = s.omega(&e, &el("y"));
        assert_eq!((o.total, o.horizontal, o.vertical), (1, 1, 0));
        let o = s.omega(&e, &el("t1"));
        assert_eq!((o.total, o.vertical, o.vertizontal.clone()), (2, 1, vec![1, 0]));
        let o = s.omega(&e, &el("x1"));
        assert_eq!((o.total, o.vertizontal.clone()), (2, vec![2, 0]));
        assert_eq!(o.confidence, Tier::Certified);
    }

    #[test]
    fn separates_examples() {
        let s = sys();
        let e = Element::identity();
        let h = WallKey::Horizontal { rep: w("") };
        assert!(s.separates(&h, &e, &el("y")).unwrap().0);
        let v = WallKey::Vertical { prefix: w(""), j: 1 };
        assert!(!s.separates(&v, &e, &el("t2")).unwrap().0);
        let t = WallKey::Vertizontal { i: 1, base: e.clone() };
        assert!(s.separates(&t, &e, &el("x1")).unwrap().0);
    }

    #[test]
    fn step_walls_match_side_flips() {
        let s = sys();
        let ctx = ctx2();
        for g in ["e", "y", "t1 y", "y^-1 t2 x1", "t2 t1^-1 y^2"] {
            let v = ctx.parse_element(g).unwrap();
            for l in ctx.smin_letters() {
                for (key, sign) in step_walls(&v, l) {
                    let (a, _) = s.side(&key, &v).unwrap();
                    let (b, _) = s.side(&key, &v.mul_letter(l)).unwrap();
                    assert_ne!(a, b, "{key} at {v} via {l}");
                    assert_eq!(b == Side::Block, sign == 1, "{key} at {v} via {l}");
                }
            }
        }
    }
}

//! Balls in the Cayley graphs over `S` and `S_min`, the cut sets `E_i`, and the
//! components of `B_R ∖ E_i`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FpError, Result};
use crate::group::{Element, Gen, GroupContext, Letter, Word};
use crate::subgroup::{Budget, Membership3, MembershipOracle, Tier};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenSet {
    S,
    Smin,
}

impl GenSet {
    pub fn letters(self, ctx: &GroupContext) -> Vec<Letter> {
        match self {
            GenSet::S => ctx.s_letters(),
            GenSet::Smin => ctx.smin_letters(),
        }
    }
}

/// A ball around the identity. Vertices are ordered by distance, then by printed form.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    pub genset: GenSet,
    letters: Vec<Letter>,
    vertices: Vec<Element>,
    dist: Vec<usize>,
    index: HashMap<Element, usize>,
    /// `adjacency[v][k]` is the index of `v · letters[k]` when it lies in the ball.
    adjacency: Vec<Vec<Option<usize>>>,
}

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

impl Ball {
    pub fn new(ctx: &GroupContext, radius: usize, genset: GenSet, cap: usize) -> Result<Self> {
        let letters = genset.letters(ctx);
        let deg = letters.len();
        let mut vertices = vec![Element::identity()];
        let mut dist = vec![0];
        let mut index = HashMap::new();
        index.insert(Element::identity(), 0);
        let mut frontier = vec![Element::identity()];
        for d in 1..=radius {
            let projected = vertices.len() + frontier.len() * deg.saturating_sub(1);
            if projected > cap {
                return Err(FpError::ResourceLimit { cap });
            }
            let found: Vec<Element> = frontier
                .par_iter()
                .flat_map_iter(|u| letters.iter().map(move |&l| u.mul_letter(l)))
                .collect();
            let mut sphere: Vec<Element> =
                found.into_iter().filter(|v| !index.contains_key(v)).collect::<BTreeSet<_>>().into_iter().collect();
            sphere.sort_by_cached_key(|v| v.to_string());
            for v in &sphere {
                index.insert(v.clone(), vertices.len());
                vertices.push(v.clone());
                dist.push(d);
            }
            frontier = sphere;
        }
        let adjacency = vertices
            .par_iter()
            .map(|v| letters.iter().map(|&l| index.get(&v.mul_letter(l)).copied()).collect())
            .collect();
        Ok(Ball { radius, genset, letters, vertices, dist, index, adjacency })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn vertices(&self) -> &[Element] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Element {
        &self.vertices[v]
    }

    pub fn distance(&self, v: usize) -> usize {
        self.dist[v]
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    pub fn neighbor(&self, v: usize, k: usize) -> Option<usize> {
        self.adjacency[v][k]
    }

    /// Sizes of the spheres `S_0, …, S_R`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.dist {
            out[d] += 1;
        }
        out
    }

    /// Indices of the vertices at distance exactly `r`.
    pub fn sphere(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.dist[v] == r).collect()
    }

    /// Edges inside the ball, each 1-cell once: `(v, k, w)` with `w = v·letters[k]` and
    /// `letters[k]` a positive letter.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.len()).flat_map(move |v| {
            self.letters
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.inv)
                .filter_map(move |(k, _)| self.adjacency[v][k].map(|w| (v, k, w)))
        })
    }
}

/// Reference size of `B_R`: enumerates every reduced word of length at most `R` and
/// collects the resulting elements in an ordered set.
pub fn reference_ball_size(ctx: &GroupContext, radius: usize, genset: GenSet) -> usize {
    let letters = genset.letters(ctx);
    let mut seen = BTreeSet::new();
    let mut words: Vec<Vec<Letter>> = vec![vec![]];
    seen.insert(crate::group::element_of_word(&Word(vec![])));
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &words {
            for &l in &letters {
                if w.last().is_some_and(|&p| p == l.inverse()) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(l);
                seen.insert(crate::group::element_of_word(&Word(w2.clone())));
                next.push(w2);
            }
        }
        words = next;
    }
    seen.len()
}

/// An edge-path given by a base vertex and the word it reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub base: Element,
    pub word: Word,
}

impl Path {
    pub fn vertices(&self) -> Vec<Element> {
        let mut out = vec![self.base.clone()];
        let mut cur = self.base.clone();
        for &l in &self.word.0 {
            cur = cur.mul_letter(l);
            out.push(cur.clone());
        }
        out
    }

    pub fn end(&self) -> Element {
        self.vertices().pop().expect("nonempty")
    }

    /// `(vertex, letter)` for every step.
    pub fn steps(&self) -> Vec<(Element, Letter)> {
        let vs = self.vertices();
        self.word.0.iter().enumerate().map(|(k, &l)| (vs[k].clone(), l)).collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeVerdict {
    InE,
    NotInE,
    Unresolved,
}

/// Status of the `t_i`-edge `(u, u·t_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStatus {
    pub i: usize,
    pub u: Element,
    pub verdict: EdgeVerdict,
    pub membership: Membership3,
}

impl EdgeStatus {
    pub fn tier(&self) -> Tier {
        self.membership.tier()
    }
}

/// The `t_i`-edge `(u, u t_i)` is in `E_i` iff `u ∈ H_i`.
pub fn edge_in_ei(oracle: &MembershipOracle, u: &Element, budget: Budget) -> EdgeStatus {
    let membership = oracle.membership(u, budget);
    let verdict = match membership.is_member() {
        Some(true) => EdgeVerdict::InE,
        Some(false) => EdgeVerdict::NotInE,
        None => EdgeVerdict::Unresolved,
    };
    EdgeStatus { i: oracle.id().i, u: u.clone(), verdict, membership }
}

/// Status of the edge leaving `v` along `letter`, or `None` when it is not a `t_i`-edge.
/// Both orientations of a 1-cell get the same answer.
pub fn step_status(
    oracle: &MembershipOracle,
    v: &Element,
    letter: Letter,
    budget: Budget,
) -> Option<EdgeStatus> {
    if letter.gen != Gen::T(oracle.id().i as u8) {
        return None;
    }
    let u = if letter.inv { v.mul_letter(letter) } else { v.clone() };
    Some(edge_in_ei(oracle, &u, budget))
}

/// `true` when no step of the path crosses an edge known to lie in `E_i`; also reports the
/// weakest tier consulted.
pub fn path_avoids_ei(oracle: &MembershipOracle, path: &Path, budget: Budget) -> (bool, Tier) {
    let mut tier = Tier::Certified;
    for (v, l) in path.steps() {
        if let Some(st) = step_status(oracle, &v, l, budget) {
            tier = tier.max(st.tier());
            if st.verdict != EdgeVerdict::NotInE {
                return (false, tier);
            }
        }
    }
    (true, tier)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Connected to `e` in `B_R ∖ E_i`.
    E,
    /// Connected to `t_i` in `B_R ∖ E_i`.
    Ti,
    /// Both (the tracked components merged).
    Both,
    Neither,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentReport {
    pub i: usize,
    #[serde(rename = "R")]
    pub radius: usize,
    pub certified: bool,
    #[serde(rename = "componentE")]
    pub component_e: usize,
    #[serde(rename = "componentTi")]
    pub component_ti: usize,
    pub disjoint: bool,
    pub stranded: usize,
    pub unresolved: usize,
    pub stabilized: usize,
    pub edges_in_e: usize,
    pub ti_edges: usize,
    pub vertices: usize,
}

#[derive(Clone, Debug)]
pub struct ComponentAnalysis {
    pub report: ComponentReport,
    regions: Vec<Region>,
    in_e: Vec<(usize, usize)>,
}

impl ComponentAnalysis {
    pub fn region(&self, v: usize) -> Region {
        self.regions[v]
    }

    pub fn region_of(&self, ball: &Ball, g: &Element) -> Option<Region> {
        ball.index_of(g).map(|v| self.regions[v])
    }

    /// Vertices in neither tracked component.
    pub fn stranded(&self, ball: &Ball) -> Vec<Element> {
        (0..ball.len())
            .filter(|&v| self.regions[v] == Region::Neither)
            .map(|v| ball.vertex(v).clone())
            .collect()
    }

    /// Ball edges `(u, u t_i)` found in `E_i`, as vertex indices.
    pub fn ei_edges(&self) -> &[(usize, usize)] {
        &self.in_e
    }

    pub fn check(&self) -> Result<()> {
        if self.report.unresolved > 0 {
            Err(FpError::UnresolvedEdges(self.report.unresolved))
        } else {
            Ok(())
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Union-find over `B_R` joining across every edge except the `t_i`-edges found in `E_i`.
/// Unresolved edges are treated as cut (a missed cut could only merge the components).
pub fn components_minus_ei(oracle: &MembershipOracle, ball: &Ball, budget: Budget) -> ComponentAnalysis {
    assert_eq!(ball.genset, GenSet::Smin, "component analysis runs on the S_min ball");
    let i = oracle.id().i;
    let ti = Letter::t(i, 1);
    let k_ti = ball.letters().iter().position(|&l| l == ti).expect("t_i is a generator");
    // the enumeration is shared; build it once before fanning out
    oracle.enumeration(budget);
    let statuses: Vec<(usize, usize, EdgeStatus)> = (0..ball.len())
        .into_par_iter()
        .filter_map(|v| {
            ball.neighbor(v, k_ti).map(|w| (v, w, edge_in_ei(oracle, ball.vertex(v), budget)))
        })
        .collect();
    let mut cut = BTreeSet::new();
    let (mut unresolved, mut stabilized) = (0, 0);
    let mut in_e = Vec::new();
    for (v, w, st) in &statuses {
        match st.verdict {
            EdgeVerdict::InE => {
                cut.insert((*v, *w));
                in_e.push((*v, *w));
            }
            EdgeVerdict::Unresolved => {
                unresolved += 1;
                cut.insert((*v, *w));
            }
            EdgeVerdict::NotInE => {}
        }
        if st.tier() == Tier::Stabilized {
            stabilized += 1;
        }
    }
    let mut uf = UnionFind((0..ball.len()).collect());
    for (v, k, w) in ball.edges() {
        if k == k_ti && cut.contains(&(v, w)) {
            continue;
        }
        uf.union(v, w);
    }
    let root_e = uf.find(0);
    let root_t = ball.index_of(&Element::from_letter(ti)).map(|t| uf.find(t));
    let regions: Vec<Region> = (0..ball.len())
        .map(|v| {
            let r = uf.find(v);
            match (r == root_e, Some(r) == root_t) {
                (true, true) => Region::Both,
                (true, false) => Region::E,
                (false, true) => Region::Ti,
                (false, false) => Region::Neither,
            }
        })
        .collect();
    let count = |f: &dyn Fn(Region) -> bool| regions.iter().filter(|&&r| f(r)).count();
    let report = ComponentReport {
        i,
        radius: ball.radius,
        certified: unresolved == 0 && stabilized == 0,
        component_e: count(&|r| matches!(r, Region::E | Region::Both)),
        component_ti: count(&|r| matches!(r, Region::Ti | Region::Both)),
        disjoint: root_t != Some(root_e),
        stranded: count(&|r| r == Region::Neither),
        unresolved,
        stabilized,
        edges_in_e: in_e.len(),
        ti_edges: statuses.len(),
        vertices: ball.len(),
    };
    ComponentAnalysis { report, regions, in_e }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Coverage {
    pub margin: usize,
    pub sub_ball: usize,
    pub covered: usize,
    pub fraction: f64,
}

/// Fraction of `B_{R−margin}` lying in the component of `e` or of `t_i`.
pub fn coverage_minus_ei(analysis: &ComponentAnalysis, ball: &Ball, margin: usize) -> Coverage {
    let r = ball.radius.saturating_sub(margin);
    let inner: Vec<usize> = (0..ball.len()).filter(|&v| ball.distance(v) <= r).collect();
    let covered = inner.iter().filter(|&&v| analysis.region(v) != Region::Neither).count();
    Coverage { margin, sub_ball: inner.len(), covered, fraction: covered as f64 / inner.len() as f64 }
}

/// A rerouting path with its expected endpoint and the component it must stay in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub path: Path,
    pub expected_end: Element,
    pub expected_region: Region,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub name: String,
    pub end_ok: bool,
    pub avoids_ei: bool,
    pub tier: Tier,
}

impl FixtureCheck {
    pub fn ok(&self) -> bool {
        self.end_ok && self.avoids_ei
    }
}

/// Explicit paths in `Γ_c ∖ E_i` joining `e` to the initial vertices of the translates
/// of `(e, t_i)` by the generators of `H_i`, and `t_i` to their terminal vertices.
pub fn fixture_paths(ctx: &GroupContext, i: usize) -> Result<Vec<Fixture>> {
    ctx.check_index(i)?;
    let j = ctx.next_index(i);
    let el = |s: &str| ctx.parse_element(s);
    let word = |s: &str| ctx.parse_word(s);
    let e = Element::identity();
    let ti = el(&format!("t{i}"))?;
    let specs: Vec<(String, &Element, String, String, Region)> = vec![
        ("e to x_i t_i^-1".into(), &e, format!("y^-1 t{i}^-1 y"), format!("x{i} t{i}^-1"), Region::E),
        ("e to y x_i y^-1 t_i".into(), &e, format!("y t{i} y^-1"), format!("y x{i} y^-1 t{i}"), Region::E),
        ("e to t_(i+1)".into(), &e, format!("t{j}"), format!("t{j}"), Region::E),
        ("e to x_(i+1)".into(), &e, format!("y^-1 t{j}^-1 y t{j}"), format!("x{j}"), Region::E),
        ("t_i to x_i".into(), &ti, format!("y^-1 t{i}^-1 y"), format!("x{i}"), Region::Ti),
        ("t_i to y x_i y^-1 t_i^2".into(), &ti, format!("y t{i} y^-1"), format!("y x{i} y^-1 t{i}^2"), Region::Ti),
        ("t_i to x_(i+1) t_i".into(), &ti, format!("y^-1 t{j}^-1 y t{j}"), format!("x{j} t{i}"), Region::Ti),
        (
            "t_i to t_(i+1) t_i".into(),
            &ti,
            format!("y^-1 t{i}^-1 y t{j} y^-1 t{i} y"),
            format!("t{j} t{i}"),
            Region::Ti,
        ),
    ];
    specs
        .into_iter()
        .map(|(name, base, w, end, region)| {
            Ok(Fixture {
                name,
                path: Path { base: base.clone(), word: word(&w)? },
                expected_end: el(&end)?,
                expected_region: region,
            })
        })
        .collect()
}

pub fn check_fixture(oracle: &MembershipOracle, f: &Fixture, budget: Budget) -> FixtureCheck {
    let (avoids_ei, tier) = path_avoids_ei(oracle, &f.path, budget);
    FixtureCheck { name: f.name.clone(), end_ok: f.path.end() == f.expected_end, avoids_ei, tier }
}

/// DOT rendering of the ball with `E_i` edges drawn in red.
pub fn to_dot(ball: &Ball, analysis: Option<&ComponentAnalysis>) -> String {
    let cut: BTreeSet<(usize, usize)> =
        analysis.map(|a| a.ei_edges().iter().copied().collect()).unwrap_or_default();
    let mut s = String::from("graph ball {\n  node [shape=point];\n");
    for (v, g) in ball.vertices().iter().enumerate() {
        let color = match analysis.map(|a| a.region(v)) {
            Some(Region::E) => "blue",
            Some(Region::Ti) => "darkgreen",
            Some(Region::Both) => "purple",
            _ => "gray",
        };
        let _ = writeln!(s, "  v{v} [label=\"{g}\", color={color}];");
    }
    for (v, k, w) in ball.edges() {
        let l = ball.letters()[k];
        let attr = if cut.contains(&(v, w)) { ", color=red, penwidth=2" } else { "" };
        let _ = writeln!(s, "  v{v} -- v{w} [label=\"{}\"{attr}];", Word(vec![l]));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::SubgroupId;

    fn ctx2() -> GroupContext {
        GroupContext::new(2).unwrap()
    }

    #[test]
    fn small_balls() {
        let ctx = ctx2();
        assert_eq!(Ball::new(&ctx, 1, GenSet::Smin, DEFAULT_VERTEX_CAP).unwrap().len(), 7);
        assert_eq!(Ball::new(&ctx, 1, GenSet::S, DEFAULT_VERTEX_CAP).unwrap().len(), 11);
        for r in 0..=3 {
            for gs in [GenSet::Smin, GenSet::S] {
                let b = Ball::new(&ctx, r, gs, DEFAULT_VERTEX_CAP).unwrap();
                assert_eq!(b.len(), reference_ball_size(&ctx, r, gs), "r={r} {gs:?}");
            }
        }
        assert!(matches!(Ball::new(&ctx, 8, GenSet::Smin, 1000), Err(FpError::ResourceLimit { .. })));
    }

    #[test]
    fn ball_ordering_is_deterministic() {
        let ctx = ctx2();
        let a = Ball::new(&ctx, 3, GenSet::Smin, DEFAULT_VERTEX_CAP).unwrap();
        let b = Ball::new(&ctx, 3, GenSet::Smin, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_eq!(a.vertex(0), &Element::identity());
        for v in 1..a.len() {
            let d = a.distance(v);
            assert!((0..a.letters().len()).any(|k| a.neighbor(v, k).is_some_and(|w| a.distance(w) + 1 == d)));
        }
    }

    #[test]
    fn edge_status_examples() {
        let ctx = ctx2();
        let o = MembershipOracle::new(ctx, SubgroupId { i: 1 });
        let b = Budget::default();
        assert_eq!(edge_in_ei(&o, &Element::identity(), b).verdict, EdgeVerdict::InE);
        assert_eq!(edge_in_ei(&o, &ctx.parse_element("y").unwrap(), b).verdict, EdgeVerdict::NotInE);
        assert_eq!(edge_in_ei(&o, &ctx.parse_element("y t1 y^-1").unwrap(), b).verdict, EdgeVerdict::InE);
        // the reverse orientation of (e, t1) is the step t1 --t1^-1--> e
        let st = step_status(&o, &ctx.parse_element("t1").unwrap(), Letter::t(1, -1), b).unwrap();
        assert_eq!(st.u, Element::identity());
        assert_eq!(st.verdict, EdgeVerdict::InE);
        assert!(step_status(&o, &Element::identity(), Letter::t(2, 1), b).is_none());
    }

    #[test]
    fn components_small_radius() {
        let ctx = ctx2();
        let o = MembershipOracle::new(ctx, SubgroupId { i: 1 });
        let ball = Ball::new(&ctx, 4, GenSet::Smin, DEFAULT_VERTEX_CAP).unwrap();
        let a = components_minus_ei(&o, &ball, Budget::default());
        assert!(a.report.disjoint);
        assert!(a.report.certified);
        assert_eq!(a.region_of(&ball, &ctx.parse_element("x1").unwrap()), Some(Region::Ti));
        assert_eq!(a.region_of(&ball, &ctx.parse_element("x1 t1^-1").unwrap()), Some(Region::E));
        let c0 = coverage_minus_ei(&a, &ball, 4);
        assert_eq!((c0.sub_ball, c0.fraction), (1, 1.0));
        let c1 = coverage_minus_ei(&a, &ball, 1);
        let c2 = coverage_minus_ei(&a, &ball, 2);
        assert!(c1.fraction <= c2.fraction);
        assert!(to_dot(&ball, Some(&a)).contains("color=red"));
    }

    #[test]
    fn fixtures_validate() {
        let ctx = ctx2();
        for i in 1..=2 {
            let o = MembershipOracle::new(ctx, SubgroupId { i });
            for f in fixture_paths(&ctx, i).unwrap() {
                let c = check_fixture(&o, &f, Budget::default());
                assert!(c.ok(), "{i} {c:?}");
                assert_eq!(c.tier, Tier::Certified);
            }
        }
    }
}

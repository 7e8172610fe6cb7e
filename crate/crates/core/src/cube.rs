//! Walls over a ball, pairwise crossing, maximal crossing families and the dual
//! cube-complex fragment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cayley::{Ball, GenSet};
use crate::error::Result;
use crate::group::{Element, GroupContext, Letter, Word};
use crate::levels::LevelVector;
use crate::subgroup::Tier;
use crate::walls::{step_walls, Family, KeyEq, Side, WallKey, WallSystem};

/// Deduplicated walls crossed by the edges of a ball.
#[derive(Clone, Debug)]
pub struct WallCollection {
    pub walls: Vec<WallKey>,
    /// For every ball edge `(v, k, w)` (positive letter `k`), the ids of the walls it crosses.
    pub edge_walls: HashMap<(usize, usize), Vec<usize>>,
    /// Vertizontal keys left unmerged because a comparison was inconclusive.
    pub unresolved_merges: usize,
    /// Ids of the walls whose identity with an earlier wall could not be decided.
    pub unresolved: BTreeSet<usize>,
    /// Weakest tier used while merging vertizontal keys.
    pub tier: Tier,
}

impl WallCollection {
    pub fn family_counts(&self) -> BTreeMap<Family, usize> {
        crate::walls::family_counts(&self.walls)
    }

    pub fn id_of(&self, sys: &WallSystem, key: &WallKey) -> Option<usize> {
        self.walls.iter().position(|k| matches!(sys.same_wall(k, key), KeyEq::Equal(_)))
    }
}

type Bucket = (usize, i64, LevelVector);

struct Deduper<'a> {
    sys: &'a WallSystem,
    walls: Vec<WallKey>,
    exact: HashMap<WallKey, usize>,
    buckets: HashMap<Bucket, Vec<usize>>,
    unresolved: BTreeSet<usize>,
    tier: Tier,
}

impl<'a> Deduper<'a> {
    fn id(&mut self, key: WallKey) -> usize {
        if let Some(&id) = self.exact.get(&key) {
            return id;
        }
        let id = match &key {
            WallKey::Vertizontal { i, base } => {
                let (k, a) = self.sys.oracle(*i).coset_invariant(base);
                let bucket = (*i, k, a);
                let mut found = None;
                let mut unknown = false;
                for &c in self.buckets.get(&bucket).map(|v| v.as_slice()).unwrap_or(&[]) {
                    match self.sys.same_wall(&self.walls[c], &key) {
                        KeyEq::Equal(t) => {
                            self.tier = self.tier.max(t);
                            found = Some(c);
                            break;
                        }
                        KeyEq::Distinct(t) => self.tier = self.tier.max(t),
                        KeyEq::Unknown => unknown = true,
                    }
                }
                match found {
                    Some(c) => c,
                    None => {
                        let c = self.walls.len();
                        if unknown {
                            self.unresolved.insert(c);
                            self.tier = Tier::Unresolved;
                        }
                        self.walls.push(key.clone());
                        self.buckets.entry(bucket).or_default().push(c);
                        c
                    }
                }
            }
            _ => {
                let c = self.walls.len();
                self.walls.push(key.clone());
                c
            }
        };
        self.exact.insert(key, id);
        id
    }
}

/// Walls crossed by the edges of an `S_min` ball.
pub fn collect_walls(sys: &WallSystem, ball: &Ball) -> WallCollection {
    assert_eq!(ball.genset, GenSet::Smin, "walls are collected on the S_min ball");
    let mut d = Deduper {
        sys,
        walls: Vec::new(),
        exact: HashMap::new(),
        buckets: HashMap::new(),
        unresolved: BTreeSet::new(),
        tier: Tier::Certified,
    };
    let mut edge_walls = HashMap::new();
    for (v, k, _) in ball.edges() {
        let l = ball.letters()[k];
        let ids: Vec<usize> = step_walls(ball.vertex(v), l).into_iter().map(|(key, _)| d.id(key)).collect();
        edge_walls.insert((v, k), ids);
    }
    WallCollection { walls: d.walls, edge_walls, unresolved_merges: d.unresolved.len(), unresolved: d.unresolved, tier: d.tier }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CrossingVerdict {
    /// Witnesses for the four side pairs, in no particular labelling.
    Crossing { witnesses: Vec<Element>, tier: Tier },
    /// No witness inside the search ball; `exact` for same-family vertical/horizontal pairs.
    NonCrossing { radius: usize, exact: bool },
    Unresolved,
}

impl CrossingVerdict {
    pub fn is_crossing(&self) -> bool {
        matches!(self, CrossingVerdict::Crossing { .. })
    }
}

/// `true` when the four elements realise all four side pairs of the two walls.
pub fn validate_witnesses(sys: &WallSystem, k1: &WallKey, k2: &WallKey, ws: &[Element]) -> Result<(bool, Tier)> {
    let mut seen = BTreeSet::new();
    let mut tier = Tier::Certified;
    for g in ws {
        let (a, ta) = sys.side(k1, g)?;
        let (b, tb) = sys.side(k2, g)?;
        tier = tier.max(ta).max(tb);
        seen.insert((a, b));
    }
    Ok((seen.len() == 4, tier))
}

/// Same-family vertical or horizontal pairs never cross.
fn exactly_nested(k1: &WallKey, k2: &WallKey) -> bool {
    matches!(
        (k1, k2),
        (WallKey::Vertical { .. }, WallKey::Vertical { .. }) | (WallKey::Horizontal { .. }, WallKey::Horizontal { .. })
    )
}

/// Scans the search ball for the four side combinations.
pub fn cross_test(sys: &WallSystem, k1: &WallKey, k2: &WallKey, search: &Ball) -> CrossingVerdict {
    if exactly_nested(k1, k2) {
        return CrossingVerdict::NonCrossing { radius: search.radius, exact: true };
    }
    let mut found: BTreeMap<(Side, Side), Element> = BTreeMap::new();
    let mut tier = Tier::Certified;
    for g in search.vertices() {
        let (Ok((a, ta)), Ok((b, tb))) = (sys.side(k1, g), sys.side(k2, g)) else {
            return CrossingVerdict::Unresolved;
        };
        tier = tier.max(ta).max(tb);
        found.entry((a, b)).or_insert_with(|| g.clone());
        if found.len() == 4 {
            return CrossingVerdict::Crossing { witnesses: found.into_values().collect(), tier };
        }
    }
    CrossingVerdict::NonCrossing { radius: search.radius, exact: false }
}

/// Per-vertex orientation relative to `e`: the sorted ids of the collected walls that
/// separate the vertex from the identity, propagated along the breadth-first tree.
#[derive(Clone, Debug)]
pub struct Orientation {
    pub bits: Vec<Vec<usize>>,
    /// Ball edges whose endpoints differ in a set of walls other than the walls the edge
    /// crosses, grouped by the family of the offending walls.
    pub violations: BTreeMap<Family, usize>,
    pub violating_edges: usize,
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (sa, sb): (BTreeSet<_>, BTreeSet<_>) = (a.iter().collect(), b.iter().collect());
    sa.symmetric_difference(&sb).map(|&&x| x).collect()
}

pub fn orientation(ball: &Ball, walls: &WallCollection) -> Orientation {
    let n = ball.len();
    let letters = ball.letters();
    let mut bits: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 1..n {
        let d = ball.distance(v);
        // parent: first neighbour one step closer, in letter order
        let (k, p) = (0..letters.len())
            .find_map(|k| ball.neighbor(v, k).filter(|&p| ball.distance(p) + 1 == d).map(|p| (k, p)))
            .expect("BFS parent");
        let m = letters[k];
        let crossed = if m.inv {
            let kp = letters.iter().position(|&q| q == m.inverse()).expect("letter set is symmetric");
            &walls.edge_walls[&(p, kp)]
        } else {
            &walls.edge_walls[&(v, k)]
        };
        bits[v] = sym_diff(&bits[p], crossed);
    }
    let mut violations = BTreeMap::new();
    let mut violating_edges = 0;
    for (v, k, w) in ball.edges() {
        let diff = sym_diff(&bits[v], &bits[w]);
        let crossed = &walls.edge_walls[&(v, k)];
        let bad = sym_diff(&diff, crossed);
        if !bad.is_empty() {
            violating_edges += 1;
            for id in bad {
                *violations.entry(walls.walls[id].family()).or_insert(0) += 1;
            }
        }
    }
    Orientation { bits, violations, violating_edges }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CrossingGraph {
    pub nodes: usize,
    /// Pairs `(a, b)`, `a < b`, validated through the side predicates.
    pub edges: Vec<(usize, usize)>,
    pub witnesses: BTreeMap<String, Vec<Element>>,
    /// Pairs that looked crossing in the propagated orientation but either involve a wall
    /// with undecided identity or whose witnesses did not validate under the side predicates.
    pub unresolved: Vec<(usize, usize)>,
    /// Same-family vertical or horizontal pairs that appeared to cross.
    pub nesting_violations: usize,
    pub tier: Tier,
}

/// Crossing graph of the collected walls, with the ball itself as search region.
pub fn crossing_graph(sys: &WallSystem, ball: &Ball, walls: &WallCollection, orient: &Orientation) -> CrossingGraph {
    let w = walls.walls.len();
    let mut count = vec![0usize; w];
    let mut pair: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (v, bs) in orient.bits.iter().enumerate() {
        for (x, &a) in bs.iter().enumerate() {
            count[a] += 1;
            for &b in &bs[x + 1..] {
                let (lo, hi) = (a.min(b), a.max(b));
                pair.entry((lo, hi)).or_insert((0, v)).0 += 1;
            }
        }
    }
    // witness for "a but not b"
    let lone = |a: usize, b: usize| {
        orient.bits.iter().position(|bs| bs.binary_search(&a).is_ok() && bs.binary_search(&b).is_err())
    };
    let mut g = CrossingGraph { nodes: w, ..Default::default() };
    let mut keys: Vec<(usize, usize)> = pair.keys().copied().collect();
    keys.sort_unstable();
    for (a, b) in keys {
        let (c11, v11) = pair[&(a, b)];
        if !(count[a] > c11 && count[b] > c11) {
            continue;
        }
        let (ka, kb) = (&walls.walls[a], &walls.walls[b]);
        if exactly_nested(ka, kb) {
            g.nesting_violations += 1;
            continue;
        }
        if walls.unresolved.contains(&a) || walls.unresolved.contains(&b) {
            g.unresolved.push((a, b));
            continue;
        }
        let (Some(va), Some(vb)) = (lone(a, b), lone(b, a)) else { continue };
        let ws: Vec<Element> = [0, va, vb, v11].iter().map(|&v| ball.vertex(v).clone()).collect();
        match validate_witnesses(sys, ka, kb, &ws) {
            Ok((true, t)) => {
                g.tier = g.tier.max(t);
                g.edges.push((a, b));
                g.witnesses.insert(format!("{a}-{b}"), ws);
            }
            _ => g.unresolved.push((a, b)),
        }
    }
    g
}

/// Exact maximum clique by branch and bound (greedy colouring bound).
pub fn max_clique(nodes: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let adj = adjacency(nodes, edges);
    let mut best: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..nodes).filter(|&v| !adj[v].is_empty()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].len()));
    if order.is_empty() && nodes > 0 {
        return vec![0];
    }
    expand(&adj, &mut Vec::new(), order, &mut best);
    best.sort_unstable();
    best
}

fn adjacency(nodes: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); nodes];
    for &(a, b) in edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    adj
}

fn colour_bound(adj: &[BTreeSet<usize>], cand: &[usize]) -> Vec<(usize, usize)> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::with_capacity(cand.len());
    for &v in cand {
        let c = classes
            .iter()
            .position(|cl| cl.iter().all(|u| !adj[v].contains(u)))
            .unwrap_or_else(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
        classes[c].push(v);
    }
    for (c, cl) in classes.iter().enumerate() {
        for &v in cl {
            out.push((v, c + 1));
        }
    }
    out
}

fn expand(adj: &[BTreeSet<usize>], cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>) {
    let coloured = colour_bound(adj, &cand);
    let mut remaining: BTreeSet<usize> = cand.iter().copied().collect();
    for &(v, colour) in coloured.iter().rev() {
        if cur.len() + colour <= best.len() {
            return;
        }
        cur.push(v);
        let next: Vec<usize> = coloured
            .iter()
            .map(|&(u, _)| u)
            .filter(|u| remaining.contains(u) && adj[v].contains(u))
            .collect();
        if next.is_empty() {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
        } else {
            expand(adj, cur, next, best);
        }
        cur.pop();
        remaining.remove(&v);
    }
}

/// All maximal cliques (Bron–Kerbosch with pivoting), up to `cap` of them.
pub fn maximal_cliques(nodes: usize, edges: &[(usize, usize)], cap: usize) -> (Vec<Vec<usize>>, bool) {
    let adj = adjacency(nodes, edges);
    let mut out = Vec::new();
    let p: BTreeSet<usize> = (0..nodes).collect();
    let mut truncated = false;
    bron_kerbosch(&adj, &mut Vec::new(), p, BTreeSet::new(), &mut out, cap, &mut truncated);
    (out, truncated)
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
    truncated: &mut bool,
) {
    if out.len() >= cap {
        *truncated = true;
        return;
    }
    if p.is_empty() && x.is_empty() {
        let mut c = r.clone();
        c.sort_unstable();
        out.push(c);
        return;
    }
    let pivot = p.union(&x).max_by_key(|&&u| p.intersection(&adj[u]).count()).copied().unwrap();
    let cands: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in cands {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, np, nx, out, cap, truncated);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Composition of a crossing family: at most one vertical, one horizontal and two walls of
/// each vertizontal family.
pub fn composition_ok(keys: &[&WallKey]) -> bool {
    crate::walls::family_counts(keys.iter().copied()).iter().all(|(f, &c)| match f {
        Family::Vertical | Family::Horizontal => c <= 1,
        Family::Vertizontal(_) => c <= 2,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentVertex {
    pub element: Element,
    pub bits: Vec<usize>,
    pub confidence: Tier,
}

/// The dual cube-complex fragment over a ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeFragment {
    pub n: usize,
    pub radius: usize,
    pub walls: Vec<WallKey>,
    pub vertices: Vec<FragmentVertex>,
    pub crossing: CrossingGraph,
    pub cliques: Vec<Vec<usize>>,
    pub cliques_truncated: bool,
    #[serde(rename = "maxClique")]
    pub max_clique: Vec<usize>,
    pub composition_violations: usize,
    pub orientation_violations: BTreeMap<String, usize>,
    pub unresolved_merges: usize,
}

impl CubeFragment {
    pub fn max_clique_size(&self) -> usize {
        self.max_clique.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    /// DOT rendering of the crossing graph.
    pub fn crossing_dot(&self) -> String {
        let mut s = String::from("graph crossing {\n");
        let best: BTreeSet<usize> = self.max_clique.iter().copied().collect();
        let used: BTreeSet<usize> = self.crossing.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        for &id in &used {
            let style = if best.contains(&id) { ", style=filled, fillcolor=gold" } else { "" };
            let _ = writeln!(s, "  w{id} [label=\"{}\"{style}];", self.walls[id]);
        }
        for &(a, b) in &self.crossing.edges {
            let _ = writeln!(s, "  w{a} -- w{b};");
        }
        s.push_str("}\n");
        s
    }
}

pub const DEFAULT_CLIQUE_CAP: usize = 200_000;

/// Collects walls, orientation vectors, the crossing graph and the clique inventory.
pub fn cubulate(sys: &WallSystem, ball: &Ball) -> CubeFragment {
    let walls = collect_walls(sys, ball);
    let orient = orientation(ball, &walls);
    let crossing = crossing_graph(sys, ball, &walls, &orient);
    let max = max_clique(walls.walls.len(), &crossing.edges);
    let (cliques, truncated) = maximal_cliques(walls.walls.len(), &crossing.edges, DEFAULT_CLIQUE_CAP);
    let composition_violations = cliques
        .iter()
        .filter(|c| !composition_ok(&c.iter().map(|&i| &walls.walls[i]).collect::<Vec<_>>()))
        .count();
    let conf = crossing.tier.max(walls.tier);
    let vertices = ball
        .vertices()
        .iter()
        .zip(&orient.bits)
        .map(|(g, b)| FragmentVertex { element: g.clone(), bits: b.clone(), confidence: conf })
        .collect();
    CubeFragment {
        n: sys.ctx().n(),
        radius: ball.radius,
        walls: walls.walls,
        vertices,
        crossing,
        cliques,
        cliques_truncated: truncated,
        max_clique: max,
        composition_violations,
        orientation_violations: orient.violations.iter().map(|(f, c)| (format!("{f:?}"), *c)).collect(),
        unresolved_merges: walls.unresolved_merges,
    }
}

/// The crossing family `{𝒴, 𝒱_1, 𝒯_i, y𝒯_i : i = 1..n}`.
pub fn standard_family(ctx: &GroupContext) -> Vec<WallKey> {
    let e = Element::identity();
    let y = Element::from_letter(Letter::y(1));
    let mut out = vec![
        WallKey::Horizontal { rep: Word::empty() },
        WallKey::Vertical { prefix: Word::empty(), j: 1 },
    ];
    for i in 1..=ctx.n() {
        out.push(WallKey::Vertizontal { i, base: e.clone() });
        out.push(WallKey::Vertizontal { i, base: y.clone() });
    }
    out
}

/// A pair of walls of the standard family and four elements meant to realise its four
/// side pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BulletWitness {
    pub first: WallKey,
    pub second: WallKey,
    pub witnesses: Vec<Element>,
}

/// Explicit witness quadruples for every pair of the `n = 2` standard family.
pub fn bullet_witnesses(ctx: &GroupContext) -> Result<Vec<BulletWitness>> {
    let fam = standard_family(ctx);
    let (hy, v1) = (&fam[0], &fam[1]);
    let t = |i: usize| &fam[2 * i];
    let yt = |i: usize| &fam[2 * i + 1];
    let el = |s: &str| ctx.parse_element(s);
    let mut out = Vec::new();
    let mut push = |a: &WallKey, b: &WallKey, ws: [&str; 4]| -> Result<()> {
        out.push(BulletWitness {
            first: a.clone(),
            second: b.clone(),
            witnesses: ws.iter().map(|s| el(s)).collect::<Result<_>>()?,
        });
        Ok(())
    };
    push(hy, v1, ["e", "t1", "y", "y t1"])?;
    push(t(1), t(2), ["e", "t1", "t2", "t2 t1"])?;
    push(t(1), yt(2), ["e", "t1", "y t2", "t1 y x2"])?;
    push(yt(1), t(2), ["e", "y t1", "t2", "t2 y x1"])?;
    for i in 1..=2 {
        let s = |w: &str| w.replace('#', &i.to_string());
        let (a, b, c) = (s("t#"), s("y t# y^-1 t#"), s("y t#"));
        push(hy, t(i), ["e", "y", &a, &b])?;
        push(hy, yt(i), ["e", "y", &c, &s("t# y t#")])?;
    }
    push(v1, t(1), ["e", "x1", "t1", "y t1 y^-1"])?;
    push(v1, t(2), ["e", "t1", "t2", "t1 t2"])?;
    push(v1, yt(1), ["e", "t1", "y t1", "y x1"])?;
    push(v1, yt(2), ["e", "t1", "y t2", "y t1 t2"])?;
    push(t(1), yt(1), ["e", "t1", "y t1", "y t1 x1^-1 t1"])?;
    push(t(2), yt(2), ["e", "t2", "y t2", "y t2 x2^-1 t2"])?;
    Ok(out)
}

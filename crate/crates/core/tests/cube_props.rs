use std::collections::BTreeSet;
use std::sync::OnceLock;

use fp::cayley::{Ball, GenSet};
use fp::cube::{
    bullet_witnesses, collect_walls, composition_ok, cross_test, max_clique, maximal_cliques, orientation,
    standard_family, validate_witnesses, CrossingVerdict, WallCollection,
};
use fp::group::{Element, GroupContext};
use fp::subgroup::Budget;
use fp::walls::{side_horizontal, Family, Side, WallSystem};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn ctx() -> GroupContext {
    GroupContext::new(2).unwrap()
}

struct Fixture {
    sys: WallSystem,
    ball: Ball,
    walls: WallCollection,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let sys = WallSystem::new(ctx(), Budget::default());
        let ball = Ball::new(&ctx(), 3, GenSet::Smin, 100_000).unwrap();
        let walls = collect_walls(&sys, &ball);
        Fixture { sys, ball, walls }
    })
}

fn brute_force_clique(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    (0u32..1 << n)
        .filter(|mask| {
            let vs: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            vs.iter().enumerate().all(|(k, &a)| vs[k + 1..].iter().all(|&b| adj(a, b)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

fn graph() -> impl Strategy<Value = (usize, BTreeSet<(usize, usize)>)> {
    (1usize..=11).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (Just(n), prop::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
        }))
    })
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn clique_search_matches_brute_force((n, edges) in graph()) {
        let list: Vec<_> = edges.iter().copied().collect();
        let best = max_clique(n, &list);
        prop_assert_eq!(best.len(), brute_force_clique(n, &edges));
        for (k, &a) in best.iter().enumerate() {
            for &b in &best[k + 1..] {
                prop_assert!(edges.contains(&(a, b)));
            }
        }
        let (cliques, truncated) = maximal_cliques(n, &list, 10_000);
        prop_assert!(!truncated);
        for c in &cliques {
            for v in 0..n {
                if c.contains(&v) { continue; }
                let extends = c.iter().all(|&u| edges.contains(&(u.min(v), u.max(v))));
                prop_assert!(!extends, "{c:?} is not maximal");
            }
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn crossing_is_symmetric_and_validated(a in 0usize..1000, b in 0usize..1000) {
        let f = fixture();
        let (a, b) = (a % f.walls.walls.len(), b % f.walls.walls.len());
        prop_assume!(a != b);
        let (ka, kb) = (&f.walls.walls[a], &f.walls.walls[b]);
        let ab = cross_test(&f.sys, ka, kb, &f.ball);
        let ba = cross_test(&f.sys, kb, ka, &f.ball);
        prop_assert_eq!(ab.is_crossing(), ba.is_crossing());
        if let CrossingVerdict::Crossing { witnesses, .. } = &ab {
            prop_assert!(validate_witnesses(&f.sys, ka, kb, witnesses).unwrap().0);
        }
        if ka.family() == kb.family() && matches!(ka.family(), Family::Vertical | Family::Horizontal) {
            let exact = matches!(ab, CrossingVerdict::NonCrossing { exact: true, .. });
            prop_assert!(exact);
        }
    }
}

#[test]
fn orientation_bits_follow_edges() {
    let f = fixture();
    let o = orientation(&f.ball, &f.walls);
    assert_eq!(o.violating_edges, 0);
    for (v, k, w) in f.ball.edges() {
        let crossed = &f.walls.edge_walls[&(v, k)];
        let expected = if f.ball.letters()[k].gen.is_vertical() { 2 } else { 1 };
        assert_eq!(crossed.len(), expected);
        let a: BTreeSet<_> = o.bits[v].iter().collect();
        let b: BTreeSet<_> = o.bits[w].iter().collect();
        let diff: BTreeSet<_> = a.symmetric_difference(&b).copied().copied().collect();
        assert_eq!(diff, crossed.iter().copied().collect());
    }
}

#[test]
fn omega_matches_orientation_distance_on_the_inner_ball() {
    let f = fixture();
    let o = orientation(&f.ball, &f.walls);
    let e = Element::identity();
    for v in f.ball.sphere(0).into_iter().chain(f.ball.sphere(1)).chain(f.ball.sphere(2)) {
        let om = f.sys.omega(&e, f.ball.vertex(v));
        assert_eq!(om.total, o.bits[v].len(), "{}", f.ball.vertex(v));
    }
}

#[test]
fn walls_grow_with_the_ball() {
    let f = fixture();
    let b2 = Ball::new(&ctx(), 2, GenSet::Smin, 100_000).unwrap();
    let w2 = collect_walls(&f.sys, &b2);
    assert!(w2.walls.len() < f.walls.walls.len());
    for k in &w2.walls {
        assert!(f.walls.id_of(&f.sys, k).is_some(), "{k}");
    }
}

#[test]
fn witness_identities() {
    let c = ctx();
    let e = |s: &str| c.parse_element(s).unwrap();
    assert_eq!(e("t1 y x2"), e("y x1^-1 t1 x2"));
    assert_eq!(e("y x2^-1 t2 x1"), e("t2 y x1"));
    assert_eq!(e("y t1"), e("t1 y x1"));
    assert_eq!(e("x1"), e("y^-1 t1^-1 y t1"));
    assert_eq!(e("t1 y t1"), e("y t1 y^-1 t1 y"));
}

#[test]
fn bullet_witnesses_except_horizontal_against_shifted_vertizontal() {
    let f = fixture();
    let fam = standard_family(&ctx());
    for bw in bullet_witnesses(&ctx()).unwrap() {
        let ok = validate_witnesses(&f.sys, &bw.first, &bw.second, &bw.witnesses).unwrap().0;
        let horizontal_vs_shifted = bw.first == fam[0] && (bw.second == fam[3] || bw.second == fam[5]);
        assert_eq!(ok, !horizontal_vs_shifted, "{} {}", bw.first, bw.second);
    }
    // e is off the horizontal block while y, y t_i and t_i y t_i are on it
    let c = ctx();
    let side = |s: &str| side_horizontal(&fp::group::Word::empty(), &c.parse_element(s).unwrap());
    assert_eq!(side(""), Side::Co);
    for i in 1..=2 {
        for w in ["y".to_string(), format!("y t{i}"), format!("t{i} y t{i}")] {
            assert_eq!(side(&w), Side::Block, "{w}");
        }
    }
}

#[test]
fn standard_family_composition() {
    let fam = standard_family(&ctx());
    assert_eq!(fam.len(), 6);
    assert!(composition_ok(&fam.iter().collect::<Vec<_>>()));
    let mut bad = fam.clone();
    bad.push(fp::walls::WallKey::Horizontal { rep: "y".parse().unwrap() });
    assert!(!composition_ok(&bad.iter().collect::<Vec<_>>()));
}

//! The ten acceptance checks, shared by the `acceptance` test target and `fp verify-all`.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use fp::cayley::{
    check_fixture, components_minus_ei, coverage_minus_ei, fixture_paths, Ball, GenSet, DEFAULT_VERTEX_CAP,
};
use fp::cube::{bullet_witnesses, cross_test, cubulate, standard_family, validate_witnesses, CubeFragment};
use fp::group::{element_of_word, grid_word, sigma_apply, Element, GroupContext, Letter, Word};
use fp::levels::phi_i;
use fp::subgroup::{enumerate_subgroup_ball, Budget, Membership3, SubgroupId, Tier};
use fp::walls::{properness_csv, properness_scan, PropernessRow, WallSystem};

pub const TITLES: [&str; 10] = [
    "group kernel",
    "grid word closed form",
    "wall-count fixtures",
    "separation",
    "fixture paths",
    "membership fixtures",
    "parity path-independence",
    "crossing suite",
    "dimension scaling",
    "properness scan",
];

/// Pinned parameters of the acceptance runs.
pub mod pins {
    pub const GROUP_CHECKS: usize = 10_000;
    pub const GROUP_WORD_LEN: usize = 12;
    pub const GRID_TUPLES: usize = 500;
    pub const GRID_MAX_LEN: usize = 4;
    pub const GRID_MAX_EXP: i64 = 5;
    pub const X_POWER_MAX: usize = 6;
    pub const SEPARATION_RADIUS: usize = 6;
    pub const MAX_ORACLE_DEPTH: usize = 20;
    pub const COVERAGE_MARGIN: usize = 3;
    pub const COVERAGE_MIN: f64 = 0.99;
    pub const CONJUGATE_MAX_EXP: i64 = 5;
    pub const ENUM_RADIUS: usize = 6;
    pub const ENUM_SLACK: usize = 4;
    pub const PARITY_ELEMENTS: usize = 200;
    pub const PARITY_PATHS: usize = 3;
    pub const PARITY_RADIUS: usize = 6;
    pub const CLIQUE_RADIUS: usize = 6;
    pub const CROSS_SEARCH_RADIUS: usize = 4;
    pub const SCALING_RADIUS: usize = 4;
    pub const PROPERNESS_RADIUS: usize = 6;
    pub const PROPERNESS_SAMPLES: usize = 200;
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Outcome {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    /// Weakest evidence the verdict relied on.
    pub tier: Tier,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<26} {} [{}] {:.1}s",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.tier,
            self.seconds
        )
    }
}

#[derive(Default)]
struct Check {
    pass: bool,
    tier: Tier,
    details: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { pass: true, ..Default::default() }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.pass = false;
            self.details.push(format!("failed: {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(what.into());
    }

    fn tier(&mut self, t: Tier) {
        self.tier = self.tier.max(t);
    }
}

/// Shares the wall systems (and their subgroup enumerations) between criteria.
pub struct Verifier {
    pub seed: u64,
    pub budget: Budget,
    sys2: OnceLock<WallSystem>,
    sys3: OnceLock<WallSystem>,
    fragment2: OnceLock<CubeFragment>,
}

impl Verifier {
    pub fn new(seed: u64, budget: Budget) -> Self {
        Verifier { seed, budget, sys2: OnceLock::new(), sys3: OnceLock::new(), fragment2: OnceLock::new() }
    }

    fn ctx2(&self) -> GroupContext {
        GroupContext::new(2).expect("rank 2")
    }

    pub fn walls(&self) -> &WallSystem {
        self.sys2.get_or_init(|| WallSystem::new(self.ctx2(), self.budget))
    }

    fn walls3(&self) -> &WallSystem {
        self.sys3.get_or_init(|| WallSystem::new(GroupContext::new(3).expect("rank 3"), self.budget))
    }

    fn rng(&self, id: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn ball(&self, ctx: &GroupContext, r: usize) -> Ball {
        Ball::new(ctx, r, GenSet::Smin, DEFAULT_VERTEX_CAP).expect("ball within cap")
    }

    pub fn run(&self, id: usize) -> Outcome {
        let start = Instant::now();
        let c = match id {
            1 => self.group_kernel(),
            2 => self.grid_closed_form(),
            3 => self.wall_counts(),
            4 => self.separation(),
            5 => self.fixture_paths(),
            6 => self.membership_fixtures(),
            7 => self.parity(),
            8 => self.crossing(),
            9 => self.scaling(),
            10 => self.properness().0,
            _ => panic!("criteria are numbered 1 to 10"),
        };
        Outcome {
            id,
            title: TITLES[id - 1].to_string(),
            pass: c.pass,
            tier: c.tier,
            details: c.details,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        (1..=10).map(|id| self.run(id)).collect()
    }

    fn group_kernel(&self) -> Check {
        let ctx = self.ctx2();
        let mut rng = self.rng(1);
        let mut c = Check::new();
        let mut bad = 0;
        for _ in 0..pins::GROUP_CHECKS {
            let ws: Vec<Word> = (0..3)
                .map(|_| {
                    let len = rng.gen_range(0..=pins::GROUP_WORD_LEN);
                    ctx.random_smin_word(&mut rng, len)
                })
                .collect();
            let [a, b, d] = [0, 1, 2].map(|k| element_of_word(&ws[k]));
            let ok = a.mul(&b).mul(&d) == a.mul(&b.mul(&d))
                && a.mul(&a.inverse()).is_identity()
                && a.inverse().mul(&a).is_identity()
                && element_of_word(&ws[0].concat(&ws[1])) == a.mul(&b)
                && element_of_word(&a.to_smin_word()) == a;
            bad += usize::from(!ok);
        }
        c.expect(bad == 0, format!("{bad} of {} random checks", pins::GROUP_CHECKS));
        let e = |s: &str| ctx.parse_element(s).expect("fixture word");
        for j in 1..=ctx.n() {
            for i in 1..=ctx.n() {
                c.expect(e(&format!("t{j}^-1 x{i} t{j}")) == e(&format!("x{i}")), format!("t{j}^-1 x{i} t{j} = x{i}"));
            }
            c.expect(e(&format!("t{j}^-1 y t{j}")) == e(&format!("y x{j}")), format!("t{j}^-1 y t{j} = y x{j}"));
        }
        let mut bad_sigma = 0;
        for _ in 0..pins::GROUP_CHECKS / 10 {
            let u = Word::from_letters((0..rng.gen_range(0..6)).map(|_| {
                let letters = [Letter::y(1), Letter::y(-1), Letter::x(1, 1), Letter::x(1, -1), Letter::x(2, 1), Letter::x(2, -1)];
                letters[rng.gen_range(0..letters.len())]
            }))
            .reduce();
            let t = Word::from_letters((0..rng.gen_range(0..6)).map(|_| Letter::t(rng.gen_range(1..=2), if rng.gen() { 1 } else { -1 })))
                .reduce();
            let lhs = Element::horizontal(u.clone()).mul(&Element::vertical(t.clone()));
            let rhs = Element::from_parts(t.clone(), sigma_apply(&t, &u)).expect("tw-form");
            bad_sigma += usize::from(lhs != rhs);
        }
        c.expect(bad_sigma == 0, format!("{bad_sigma} failures of ut = t sigma(t)(u)"));
        c.note(format!("{} random triples, {} commutation checks", pins::GROUP_CHECKS, pins::GROUP_CHECKS / 10));
        c
    }

    fn grid_closed_form(&self) -> Check {
        let ctx = self.ctx2();
        let mut rng = self.rng(2);
        let mut c = Check::new();
        let mut bad = 0;
        for _ in 0..pins::GRID_TUPLES {
            let i = rng.gen_range(1..=ctx.n());
            let len = rng.gen_range(1..=pins::GRID_MAX_LEN);
            let ks: Vec<i64> = (0..len).map(|_| rng.gen_range(-pins::GRID_MAX_EXP..=pins::GRID_MAX_EXP)).collect();
            let g = element_of_word(&grid_word(i, &ks));
            let odd: i64 = ks.iter().skip(1).step_by(2).sum();
            let all: i64 = ks.iter().sum();
            let w = Word::from_letters(
                std::iter::once(Letter::y(1))
                    .chain(Word::power(Letter::x(i, 1), odd).letters().iter().copied())
                    .chain(std::iter::once(Letter::y(-1))),
            )
            .reduce();
            let expected = (w, Word::power(Letter::t(i, 1), all));
            bad += usize::from(g.wt_form() != expected || phi_i(&g, i) != odd);
        }
        c.expect(bad == 0, format!("{bad} of {} tuples", pins::GRID_TUPLES));
        c
    }

    fn wall_counts(&self) -> Check {
        let sys = self.walls();
        let ctx = self.ctx2();
        let e = Element::identity();
        let mut c = Check::new();
        let fixture = |c: &mut Check, g: &str, total: usize, breakdown: Option<(usize, usize, [usize; 2])>| {
            let o = sys.omega(&e, &ctx.parse_element(g).expect("fixture word"));
            c.tier(o.confidence);
            c.expect(o.confidence == Tier::Certified && !o.upper_bound, format!("omega(e, {g}) at full confidence"));
            match breakdown {
                None => c.expect(o.total == total, format!("omega(e, {g}) = {total}, got {}", o.total)),
                Some((v, h, vz)) => {
                    c.expect(o.total >= total, format!("omega(e, {g}) >= {total}, got {}", o.total));
                    c.expect(
                        o.vertical == v && o.horizontal == h && o.vertizontal == vz,
                        format!("omega(e, {g}) breakdown {:?}", (o.vertical, o.horizontal, &o.vertizontal)),
                    );
                    c.note(format!("omega(e, {g}) = {}", o.total));
                }
            }
        };
        fixture(&mut c, "y", 1, None);
        for i in 1..=2 {
            fixture(&mut c, &format!("t{i}"), 2, None);
            fixture(&mut c, &format!("x{i}"), 2, None);
        }
        for k in 1..=pins::X_POWER_MAX {
            fixture(&mut c, &format!("x1^{k}"), 2 * k, Some((0, 0, [2 * k, 0])));
        }
        c
    }

    fn separation(&self) -> Check {
        let sys = self.walls();
        let ball = self.ball(&self.ctx2(), pins::SEPARATION_RADIUS);
        let mut c = Check::new();
        c.expect(self.budget.depth <= pins::MAX_ORACLE_DEPTH, format!("oracle depth {} <= {}", self.budget.depth, pins::MAX_ORACLE_DEPTH));
        for i in 1..=2 {
            let a = components_minus_ei(sys.oracle(i), &ball, self.budget);
            let r = &a.report;
            let cov = coverage_minus_ei(&a, &ball, pins::COVERAGE_MARGIN);
            c.tier(if r.unresolved > 0 {
                Tier::Unresolved
            } else if r.stabilized > 0 {
                Tier::Stabilized
            } else {
                Tier::Certified
            });
            c.note(format!(
                "i={i}: {} vertices, {} of {} t{i}-edges in E_{i}, component(e)={}, component(t{i})={}, coverage {:.4}",
                r.vertices, r.edges_in_e, r.ti_edges, r.component_e, r.component_ti, cov.fraction
            ));
            c.expect(r.disjoint, format!("components of e and t{i} disjoint in B_{} minus E_{i}", r.radius));
            c.expect(r.unresolved == 0, format!("{} unresolved edges for i={i}", r.unresolved));
            c.expect(cov.fraction >= pins::COVERAGE_MIN, format!("coverage {:.4} >= {} for i={i}", cov.fraction, pins::COVERAGE_MIN));
        }
        c
    }

    fn fixture_paths(&self) -> Check {
        let sys = self.walls();
        let mut c = Check::new();
        for i in 1..=2 {
            for f in fixture_paths(&self.ctx2(), i).expect("fixtures parse") {
                let r = check_fixture(sys.oracle(i), &f, self.budget);
                c.tier(r.tier);
                c.expect(r.end_ok, format!("{} ends at the stated vertex", r.name));
                c.expect(r.avoids_ei, format!("{} avoids E_{i}", r.name));
            }
        }
        c
    }

    fn membership_fixtures(&self) -> Check {
        let sys = self.walls();
        let ctx = self.ctx2();
        let oracle = sys.oracle(1);
        let mut c = Check::new();
        let k = pins::CONJUGATE_MAX_EXP;
        for k in -k..=k {
            for w in [format!("y t1^{k} y^-1"), format!("y^-1 t1^{k} y")] {
                let m = oracle.membership(&ctx.parse_element(&w).expect("fixture word"), self.budget);
                c.expect(matches!(m, Membership3::CertifiedIn { .. }), format!("{w} certified in H_1, got {}", m.label()));
            }
        }
        for w in ["t1", "y", "t2 t1"] {
            let m = oracle.membership(&ctx.parse_element(w).expect("fixture word"), self.budget);
            c.expect(matches!(m, Membership3::CertifiedOut { .. }), format!("{w} certified out of H_1, got {}", m.label()));
        }
        let budget = Budget { radius: pins::ENUM_RADIUS, slack: pins::ENUM_SLACK, ..self.budget };
        let r = enumerate_subgroup_ball(&ctx, SubgroupId { i: 1 }, budget).report();
        c.note(format!(
            "H_1 ball of radius {}: {} elements, last new at depth {}, depth reached {}",
            r.radius, r.retained, r.last_new_depth, r.depth_reached
        ));
        c.expect(r.stabilized, "H_1 enumeration stabilizes with slack 4");
        c
    }

    fn parity(&self) -> Check {
        let sys = self.walls();
        let ctx = self.ctx2();
        let ball = self.ball(&ctx, pins::PARITY_RADIUS);
        let mut rng = self.rng(7);
        let mut c = Check::new();
        let e = Element::identity();
        let (mut mismatched, mut unresolved) = (0, 0);
        for _ in 0..pins::PARITY_ELEMENTS {
            let g = ball.vertex(rng.gen_range(0..ball.len())).clone();
            let mid = ball.vertex(rng.gen_range(0..ball.len())).clone();
            let paths = [
                g.to_smin_word(),
                random_geodesic(&ball, &g, &mut rng),
                mid.to_smin_word().concat(&mid.inverse().mul(&g).to_smin_word()),
            ];
            debug_assert_eq!(paths.len(), pins::PARITY_PATHS);
            for i in 1..=2 {
                let sides: Vec<_> = paths.iter().map(|p| sys.parity_along(i, &e, p)).collect();
                if sides.iter().any(|s| s.is_err()) {
                    unresolved += 1;
                    continue;
                }
                let sides: Vec<_> = sides.into_iter().map(|s| s.expect("checked")).collect();
                for s in &sides {
                    c.tier(s.1);
                }
                mismatched += usize::from(sides.iter().any(|s| s.0 != sides[0].0));
            }
        }
        c.note(format!("{} elements x {} paths x 2 families", pins::PARITY_ELEMENTS, pins::PARITY_PATHS));
        c.expect(mismatched == 0, format!("{mismatched} element/family pairs with path-dependent parity"));
        c.expect(unresolved == 0, format!("{unresolved} element/family pairs with unresolved edges"));
        if unresolved > 0 {
            c.tier(Tier::Unresolved);
        }
        c
    }

    /// The cube fragment over `B_6` for `n = 2`, computed once.
    pub fn fragment(&self) -> &CubeFragment {
        self.fragment2.get_or_init(|| cubulate(self.walls(), &self.ball(&self.ctx2(), pins::CLIQUE_RADIUS)))
    }

    fn family_clique(&self, c: &mut Check, sys: &WallSystem, ctx: &GroupContext) {
        let search = self.ball(ctx, pins::CROSS_SEARCH_RADIUS);
        let fam = standard_family(ctx);
        for a in 0..fam.len() {
            for b in a + 1..fam.len() {
                let v = cross_test(sys, &fam[a], &fam[b], &search);
                if let fp::cube::CrossingVerdict::Crossing { tier, .. } = &v {
                    c.tier(*tier);
                }
                c.expect(v.is_crossing(), format!("{} crosses {} within B_{}", fam[a], fam[b], search.radius));
            }
        }
    }

    fn crossing(&self) -> Check {
        let sys = self.walls();
        let ctx = self.ctx2();
        let mut c = Check::new();
        let e = |s: &str| ctx.parse_element(s).expect("fixture word");
        c.expect(e("t1 y x2") == e("y x1^-1 t1 x2"), "t1 y x2 = y x1^-1 t1 x2");
        c.expect(e("y x2^-1 t2 x1") == e("t2 y x1"), "y x2^-1 t2 x1 = t2 y x1");
        self.family_clique(&mut c, sys, &ctx);
        for bw in bullet_witnesses(&ctx).expect("witness words parse") {
            match validate_witnesses(sys, &bw.first, &bw.second, &bw.witnesses) {
                Ok((ok, t)) => {
                    c.tier(t);
                    let names: Vec<String> = bw.witnesses.iter().map(|g| g.to_smin_word().to_string()).collect();
                    c.expect(ok, format!("witnesses {names:?} realise all four sides of {} and {}", bw.first, bw.second));
                }
                Err(_) => c.expect(false, format!("witnesses for {} and {} resolve", bw.first, bw.second)),
            }
        }
        let f = self.fragment();
        c.tier(f.crossing.tier);
        c.note(format!(
            "B_{}: {} walls, {} crossing pairs, {} unresolved pairs, {} maximal cliques, max clique {}",
            f.radius,
            f.walls.len(),
            f.crossing.edges.len(),
            f.crossing.unresolved.len(),
            f.cliques.len(),
            f.max_clique_size()
        ));
        c.expect(f.max_clique_size() <= 6, format!("no 7-clique among resolved walls of B_{}", f.radius));
        c.expect(!f.cliques_truncated, "maximal clique inventory complete");
        c.expect(
            f.composition_violations == 0,
            format!("{} maximal cliques break the per-family bounds", f.composition_violations),
        );
        c
    }

    fn scaling(&self) -> Check {
        let sys = self.walls3();
        let ctx = *sys.ctx();
        let mut c = Check::new();
        let f = cubulate(sys, &self.ball(&ctx, pins::SCALING_RADIUS));
        c.tier(f.crossing.tier);
        let bound = 2 * ctx.n() + 2;
        c.note(format!("n=3, B_{}: {} walls, max clique {}", f.radius, f.walls.len(), f.max_clique_size()));
        c.expect(f.max_clique_size() <= bound, format!("max resolved clique <= {bound}"));
        self.family_clique(&mut c, sys, &ctx);
        c
    }

    /// The CSV table of the properness scan.
    pub fn properness_table(&self) -> String {
        self.properness().1
    }

    fn properness(&self) -> (Check, String) {
        let sys = self.walls();
        let ball = self.ball(&self.ctx2(), pins::PROPERNESS_RADIUS);
        let rows: Vec<PropernessRow> = properness_scan(sys, &ball, pins::PROPERNESS_SAMPLES, &mut self.rng(10));
        let csv = properness_csv(&rows);
        let mut c = Check::new();
        for row in &rows {
            c.tier(row.confidence);
        }
        c.expect(rows.windows(2).all(|w| w[0].min_omega <= w[1].min_omega), "min omega nondecreasing in r");
        c.expect(rows.iter().filter(|r| r.r >= 1).all(|r| r.min_omega >= 1), "min omega >= 1 for r >= 1");
        c.details.extend(csv.lines().map(str::to_string));
        (c, csv)
    }
}

/// A geodesic from `e` to `g` inside the ball, choosing uniformly among the
/// distance-decreasing letters at every step.
fn random_geodesic<R: Rng + ?Sized>(ball: &Ball, g: &Element, rng: &mut R) -> Word {
    let mut v = ball.index_of(g).expect("vertex of the ball");
    let mut back = Vec::new();
    while ball.distance(v) > 0 {
        let steps: Vec<(usize, usize)> = (0..ball.letters().len())
            .filter_map(|k| ball.neighbor(v, k).filter(|&p| ball.distance(p) + 1 == ball.distance(v)).map(|p| (k, p)))
            .collect();
        let (k, p) = steps[rng.gen_range(0..steps.len())];
        back.push(ball.letters()[k]);
        v = p;
    }
    Word::from_letters(back.into_iter().rev().map(Letter::inverse))
}

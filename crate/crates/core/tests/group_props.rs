mod common;

use common::Quotient;
use fp::group::{element_of_word, sigma_apply, Element, GroupContext, Letter, Word};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn ctx() -> GroupContext {
    GroupContext::new(2).unwrap()
}

fn smin_letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        any::<bool>().prop_map(|s| Letter::y(if s { 1 } else { -1 })),
        (1usize..=2, any::<bool>()).prop_map(|(i, s)| Letter::t(i, if s { 1 } else { -1 })),
    ]
}

fn s_letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        smin_letter(),
        (1usize..=2, any::<bool>()).prop_map(|(i, s)| Letter::x(i, if s { 1 } else { -1 })),
    ]
}

fn smin_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(smin_letter(), 0..=max).prop_map(Word::from_letters)
}

fn s_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(s_letter(), 0..=max).prop_map(Word::from_letters)
}

fn horizontal_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(
        prop_oneof![
            any::<bool>().prop_map(|s| Letter::y(if s { 1 } else { -1 })),
            (1usize..=2, any::<bool>()).prop_map(|(i, s)| Letter::x(i, if s { 1 } else { -1 })),
        ],
        0..=max,
    )
    .prop_map(Word::from_letters)
}

fn vertical_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1usize..=2, any::<bool>()).prop_map(|(i, s)| Letter::t(i, if s { 1 } else { -1 })), 0..=max)
        .prop_map(Word::from_letters)
}

const Q: Quotient = Quotient { n: 2, m: 5, period: 3 };

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn associativity_and_inverses(a in smin_word(12), b in smin_word(12), c in smin_word(12)) {
        let (a, b, c) = (element_of_word(&a), element_of_word(&b), element_of_word(&c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert!(a.inverse().mul(&a).is_identity());
        prop_assert_eq!(a.mul(&Element::identity()), a.clone());
    }
}

proptest! {
    #![proptest_config(config(2_000))]

    #[test]
    fn concatenation_is_product(a in s_word(10), b in s_word(10)) {
        prop_assert_eq!(element_of_word(&a.concat(&b)), element_of_word(&a).mul(&element_of_word(&b)));
    }

    #[test]
    fn normal_form_agrees_with_quotient(a in s_word(14), b in s_word(14)) {
        // equal normal forms must give equal images in an independent finite quotient
        let (ga, gb) = (element_of_word(&a), element_of_word(&b));
        prop_assert_eq!(Q.eval(&a), Q.eval(&ga.to_smin_word()));
        let ab = a.concat(&b);
        prop_assert_eq!(Q.eval(&ab), Q.eval(&ga.mul(&gb).to_smin_word()));
        if ga == gb {
            prop_assert_eq!(Q.eval(&a), Q.eval(&b));
        }
    }

    #[test]
    fn tw_and_wt_round_trip(a in s_word(14)) {
        let g = element_of_word(&a);
        let (w, t) = g.wt_form();
        prop_assert_eq!(Element::from_wt(&w, &t), g.clone());
        prop_assert_eq!(Element::from_parts(g.vert().clone(), g.horiz().clone()).unwrap(), g.clone());
        prop_assert!(g.to_smin_word().is_smin());
        prop_assert!(g.vert().is_reduced() && g.horiz().is_reduced());
        prop_assert_eq!(g.nf_len(), g.vert().len() + g.horiz().len());
    }

    #[test]
    fn printing_round_trips(a in s_word(14)) {
        let g = element_of_word(&a);
        let w = g.to_smin_word();
        prop_assert_eq!(ctx().parse_word(&w.to_string()).unwrap(), w.clone());
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<Element>(&json).unwrap(), g);
    }

    #[test]
    fn sigma_is_a_homomorphism(t1 in vertical_word(5), t2 in vertical_word(5), u in horizontal_word(6), v in horizontal_word(6)) {
        // σ(t1 t2) = σ(t1) ∘ σ(t2) and each σ(t) is an endomorphism of the horizontal group
        let lhs = sigma_apply(&t1.concat(&t2), &u).reduce();
        let rhs = sigma_apply(&t2, &sigma_apply(&t1, &u)).reduce();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(
            sigma_apply(&t1, &u.concat(&v)).reduce(),
            sigma_apply(&t1, &u).concat(&sigma_apply(&t1, &v)).reduce()
        );
        // u t = t σ(t)(u)
        let lhs = Element::horizontal(u.reduce()).mul(&Element::vertical(t1.reduce()));
        prop_assert_eq!(lhs, Element::from_parts(t1.reduce(), sigma_apply(&t1.reduce(), &u.reduce())).unwrap());
    }

    #[test]
    fn phi_is_additive(a in s_word(12), b in s_word(12)) {
        let (ga, gb) = (element_of_word(&a), element_of_word(&b));
        prop_assert_eq!(ga.mul(&gb).phi(), ga.phi() + gb.phi());
        prop_assert_eq!(ga.phi(), a.exponent_sum(fp::group::Gen::Y));
    }
}

#[test]
fn defining_relations() {
    let c = ctx();
    let e = |s: &str| c.parse_element(s).unwrap();
    for j in 1..=2 {
        for i in 1..=2 {
            assert_eq!(e(&format!("t{j}^-1 x{i} t{j}")), e(&format!("x{i}")));
        }
        assert_eq!(e(&format!("t{j}^-1 y t{j}")), e(&format!("y x{j}")));
        assert_eq!(e(&format!("t{j} y")), e(&format!("y x{j}^-1 t{j}")));
        // the same relations in the finite quotient
        let w = |s: &str| c.parse_word(s).unwrap();
        assert_eq!(Q.eval(&w(&format!("t{j}^-1 y t{j}"))), Q.eval(&w(&format!("y x{j}"))));
    }
    assert_eq!(c.parse_element("y t1").unwrap().to_string(), "(t1, y x1)");
}

#[test]
fn unit_ball_size() {
    // |B_1| over S_min has 1 + 2(n+1) elements
    let c = ctx();
    let b = fp::cayley::Ball::new(&c, 1, fp::cayley::GenSet::Smin, 1000).unwrap();
    assert_eq!(b.len(), 7);
}

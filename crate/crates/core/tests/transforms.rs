use gwp_core::cohomology::{CohomRing, TensorClass};
use gwp_core::correspondence::{
    bar_i, bar_ii, bar_iii, bar_iii_on_ring, bar_transform, expected_homology_degree, BarInput,
    BarOptions, DegreeLedger, Rule,
};
use gwp_core::descendents::{
    ClassMonomial, DescendentWord, SymbolRef, SymbolTable, TensorArg, TransformedExpr,
};
use gwp_core::dsl::parse_word;
use gwp_core::kmatrix::{required_degree, KMatrix};
use gwp_core::partitions::{
    enumerate_set_partitions, subpartition, OrderedSetPartition, Partition,
};
use gwp_core::{ChernMono, GaussRat, GradedPoly, ULaurent};
use proptest::prelude::*;

fn table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for spec in [
        "g1:2:even",
        "g2:4:even",
        "g3:2:even",
        "g4:4:even",
        "a:3:odd",
        "b:3:odd",
        "c:3:odd",
        "D:4:even:3",
    ] {
        t.declare_spec(spec).unwrap();
    }
    t
}

fn class(t: &SymbolTable, name: &str) -> ClassMonomial {
    match t.resolve(name) {
        Some(SymbolRef::Class(f)) => ClassMonomial::factor(f),
        _ => panic!("{name}"),
    }
}

fn constant(c: i64) -> ULaurent {
    ULaurent::scalar(GaussRat::from_int(c))
}

fn expr(t: &SymbolTable, terms: &[(&str, ULaurent)]) -> TransformedExpr {
    let mut e = TransformedExpr::new();
    for (w, c) in terms {
        e.add_word(&parse_word(w, t).unwrap(), c);
    }
    e
}

#[test]
fn two_one_with_forced_entries() {
    // P = {{1},{2}} gives (iu)^{-1} τ1 τ0; P = {{1,2}} has no admissible entry
    let t = table();
    let k = KMatrix::forced_entries(3);
    let out = bar_i(
        &[2, 1],
        &[class(&t, "g1"), class(&t, "g2")],
        &k,
        &BarOptions::default(),
    )
    .unwrap();
    assert_eq!(
        out,
        expr(&t, &[("tau(1; g1) * tau(0; g2)", ULaurent::iu_power(-1))])
    );
}

#[test]
fn single_insertion_is_scaled_by_the_diagonal_entry() {
    let t = table();
    let k = KMatrix::forced_entries(5);
    for a in 1..=5u32 {
        let g = class(&t, "g1");
        let out = bar_i(&[a], std::slice::from_ref(&g), &k, &BarOptions::default()).unwrap();
        let w = format!("tau({}; g1)", a - 1);
        assert_eq!(out, expr(&t, &[(&w, ULaurent::iu_power(1 - a as i64))]));
        let general = bar_iii(
            &[a],
            &TensorArg::factored(vec![g]),
            &k,
            &BarOptions::default(),
        )
        .unwrap();
        assert_eq!(general, out);
    }
}

/// K with the forced diagonal plus `K̃_{(2,1),(1)} = 7`.
fn seven() -> KMatrix {
    let mut k = KMatrix::forced_entries(4);
    k.add(
        Partition::new(vec![2, 1]).unwrap(),
        Partition::single(1),
        &constant(7),
    );
    k
}

#[test]
fn diagonal_rule_hand_expansion() {
    // α = (1,2,1), D = {{1,2},{3}}:
    //   P = {1|2|3}: (iu)^{-1} τ_(2,1)(γ1) τ0(γ2)
    //   P = {1|23}:  meet {123}, m = n = 2, exponent 0: 7 τ_(1,1)(γ1γ2)
    //   P = {12|3}:  meet parts {12} (exponent 1) and {3}: 7 τ0(γ1 c3) τ0(γ2)
    //   P = {13|2} and {123}: no admissible entries
    let t = table();
    let d = OrderedSetPartition::parse("{{1,2},{3}}").unwrap();
    for (x, y) in [("g1", "g2"), ("a", "b"), ("b", "a")] {
        let out = bar_ii(
            &[1, 2, 1],
            &d,
            &[class(&t, x), class(&t, y)],
            &seven(),
            &BarOptions::default(),
        )
        .unwrap();
        let expect = expr(
            &t,
            &[
                (
                    &format!("tau[2,1]({x}) * tau(0; {y})"),
                    ULaurent::iu_power(-1),
                ),
                (&format!("tau[1,1]({x}.{y})"), constant(7)),
                (&format!("tau(0; {x}.c3) * tau(0; {y})"), constant(7)),
            ],
        );
        assert_eq!(out, expect, "classes {x}, {y}:\n{}", out.display(&t));
    }
}

#[test]
fn general_rule_on_projective_space() {
    // α = (3,2), δ = h ⊗ h, K = forced + K̃_{(3,2),(1,1)} = 5:
    //   P = {1|2}: (iu)^{-3} τ2(h) τ1(h)
    //   P = {12}:  5 τ_{0,0}(Δ_*(h²)) with Δ_*(h²) = h² ⊗ h³ + h³ ⊗ h²
    let ring = CohomRing::projective3();
    let t = SymbolTable::from_ring(&ring);
    let mut k = KMatrix::forced_entries(5);
    let (alpha, ahat) = (
        Partition::new(vec![3, 2]).unwrap(),
        Partition::new(vec![1, 1]).unwrap(),
    );
    assert_eq!(required_degree(&alpha, &ahat), 0);
    k.add(alpha, ahat, &constant(5));
    let h = ring.basis(1);
    let delta = TensorClass::from_factors(&ring, &[h.clone(), h]).unwrap();
    let on_ring = bar_iii_on_ring(&[3, 2], &delta, &ring, &k, &BarOptions::default()).unwrap();
    let expect = expr(
        &t,
        &[
            ("tau(2; h) * tau(1; h)", ULaurent::iu_power(-3)),
            ("tau(0; h2) * tau(0; h3)", constant(10)),
        ],
    );
    assert_eq!(on_ring, expect);

    let hm = class(&t, "h");
    let symbolic = bar_iii(
        &[3, 2],
        &TensorArg::factored(vec![hm.clone(), hm]),
        &k,
        &BarOptions::default(),
    )
    .unwrap();
    assert_eq!(
        symbolic,
        expr(
            &t,
            &[
                ("tau(2; h) * tau(1; h)", ULaurent::iu_power(-3)),
                ("tau{0,0}(diag2(h.h))", constant(5))
            ]
        )
    );
    assert_eq!(
        gwp_core::descendents::evaluate_on_ring(&symbolic, &ring, &t).unwrap(),
        expect
    );
}

#[test]
fn opaque_general_class_is_transported() {
    let t = table();
    let Some(SymbolRef::Tensor {
        id,
        arity,
        degree,
        odd,
    }) = t.resolve("D")
    else {
        panic!()
    };
    let delta = TensorArg::Opaque(gwp_core::descendents::TensorSymbol {
        id,
        arity,
        degree,
        odd,
        transport: None,
    });
    let k = seven();
    let out = bar_iii(&[2, 1, 1], &delta, &k, &BarOptions::default()).unwrap();
    let expect = expr(
        &t,
        &[
            ("tau{1,0,0}(D)", ULaurent::iu_power(-1)),
            ("tau{0,0}(D<1.2|3;1,1;1|1>)", constant(7)),
            ("tau{0,0}(D<1.3|2;1,1;1|1>)", constant(7)),
        ],
    );
    assert_eq!(out, expect, "\n{}", out.display(&t));
}

/// Every admissible slot filled with every monomial of the required degree.
fn full_matrix(max: u32) -> KMatrix {
    let mut k = KMatrix::forced_entries(max);
    for alpha in Partition::all_up_to(max) {
        for ahat in Partition::all_up_to(alpha.size()) {
            let d = required_degree(&alpha, &ahat);
            if d < 0 || ahat.size() == alpha.size() {
                continue;
            }
            let mut p = GradedPoly::default();
            for m in ChernMono::all_of_degree(d as u32) {
                p.add_term(m, &GaussRat::from_int(1));
            }
            k.add(alpha.clone(), ahat, &ULaurent::monomial(0, p));
        }
    }
    k
}

fn admissible_count(alpha_s: &Partition) -> usize {
    Partition::all_up_to(alpha_s.size())
        .iter()
        .filter(|ahat| ahat.size() < alpha_s.size() || (alpha_s.len() == 1 && *ahat == alpha_s))
        .map(|ahat| required_degree(alpha_s, ahat))
        .filter(|&d| d >= 0)
        .map(|d| ChernMono::all_of_degree(d as u32).len())
        .sum()
}

#[test]
fn term_count_matches_enumeration() {
    let t = table();
    let k = full_matrix(4);
    let names = ["g1", "g2", "g3", "g4"];
    for size in 1..=4 {
        for alpha in Partition::all_of_size(size) {
            let parts = alpha.parts().to_vec();
            let classes: Vec<_> = names[..parts.len()].iter().map(|n| class(&t, n)).collect();
            let out = bar_i(&parts, &classes, &k, &BarOptions::default()).unwrap();
            let expected: usize = enumerate_set_partitions(parts.len(), 12)
                .unwrap()
                .iter()
                .map(|p| {
                    p.blocks()
                        .iter()
                        .map(|b| admissible_count(&subpartition(&parts, b).unwrap()))
                        .product::<usize>()
                })
                .sum();
            assert_eq!(out.len(), expected, "α = {alpha}");
        }
    }
}

#[test]
fn inputs_read_back_from_words() {
    let t = table();
    let w = parse_word("tau[2,1](g1) * tau(0; g2)", &t).unwrap();
    let input = BarInput::from_word(Rule::II, &w).unwrap();
    match &input {
        BarInput::Diagonal { parts, d, .. } => {
            assert_eq!(parts, &[2, 1, 1]);
            assert_eq!(d.to_string(), "{{1,2},{3}}");
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(input.left_word(), w);
    assert!(BarInput::from_word(Rule::I, &w).is_err());
    let w = parse_word("tau(1; a) * tau(0; b)", &t).unwrap();
    assert!(matches!(
        BarInput::from_word(Rule::III, &w).unwrap(),
        BarInput::General { .. }
    ));
}

#[test]
fn ledger_examples() {
    let deg = |d, y, ins: Vec<(i64, Vec<i64>)>| {
        expected_homology_degree(&DegreeLedger {
            d_beta: d,
            dim_y: y,
            insertions: ins,
        })
    };
    assert_eq!(deg(0, 0, vec![(2, vec![0])]), 0);
    assert_eq!(deg(4, 0, vec![(6, vec![0]), (2, vec![1])]), 2);
    assert_eq!(deg(3, 1, vec![]), 8);
}

fn ledger_of(word: &[gwp_core::descendents::Insertion]) -> i64 {
    expected_homology_degree(&DegreeLedger::from_insertions(2, 1, word))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_preserve_the_homology_degree(
        parts in prop::collection::vec(1u32..4, 1..4),
        odd in prop::collection::vec(any::<bool>(), 3),
        rule in 0usize..3,
        seed in 0u64..1000,
    ) {
        prop_assume!(parts.iter().sum::<u32>() <= 5);
        let t = table();
        let k = KMatrix::random_admissible(5, (-2, 1), seed);
        let evens = ["g1", "g2", "g3"];
        let odds = ["a", "b", "c"];
        let classes: Vec<_> = (0..parts.len()).map(|j| class(&t, if odd[j] { odds[j] } else { evens[j] })).collect();
        let input = match rule {
            0 => BarInput::Standard { parts: parts.clone(), classes },
            1 => {
                let d = OrderedSetPartition::from_sizes(&[parts.len()]).unwrap();
                let prod = classes.iter().skip(1).try_fold((1, classes[0].clone()), |(_, m), c| m.mul(c));
                prop_assume!(prod.is_some());
                BarInput::Diagonal { parts: parts.clone(), d, classes: vec![prod.unwrap().1] }
            }
            _ => BarInput::General { parts: parts.clone(), delta: TensorArg::factored(classes) },
        };
        let want = ledger_of(&input.left_word().insertions);
        let out = bar_transform(&input, &k, &BarOptions::default()).unwrap();
        for (w, _) in out.terms() {
            prop_assert_eq!(ledger_of(w), want);
        }
    }

    #[test]
    fn parallel_and_order_options_do_not_change_results(parts in prop::collection::vec(1u32..3, 1..5), seed in 0u64..500) {
        let t = table();
        let k = KMatrix::random_admissible(8, (-1, 1), seed);
        let names = ["g1", "a", "g2", "b"];
        let classes: Vec<_> = names[..parts.len()].iter().map(|n| class(&t, n)).collect();
        let once = bar_i(&parts, &classes, &k, &BarOptions::default()).unwrap();
        let again = bar_i(&parts, &classes, &k, &BarOptions::default()).unwrap();
        prop_assert_eq!(once.display(&t), again.display(&t));
        let truncated = bar_i(&parts, &classes, &k, &BarOptions { order: Some(0), ..BarOptions::default() }).unwrap();
        prop_assert_eq!(truncated, once.truncate(0));
    }
}

#[test]
fn words_compare_after_normalization() {
    let t = table();
    let a = parse_word("tau(0; a) * tau(1; b)", &t).unwrap().normalize();
    let b = parse_word("tau(1; b) * tau(0; a)", &t).unwrap().normalize();
    assert_eq!(a.insertions, b.insertions);
    assert_eq!(a.sign, -b.sign);
    assert_eq!(
        DescendentWord::new(a.insertions.clone()).normalize(),
        DescendentWord::new(a.insertions)
    );
}

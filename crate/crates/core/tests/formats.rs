use gwp_core::bridge::{
    check_correspondence, perturb, synthetic_fixture, Side, TheoryTable, Verdict,
};
use gwp_core::cohomology::CohomRing;
use gwp_core::correspondence::{bar_i, BarOptions};
use gwp_core::descendents::{ClassMonomial, SymbolRef, SymbolTable};
use gwp_core::dsl::{parse_expr, parse_word, resolve};
use gwp_core::kmatrix::KMatrix;
use gwp_core::{Error, GaussRat};
use proptest::prelude::*;

fn table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for spec in [
        "g:2:even",
        "h:4:even",
        "a:3:odd",
        "b:1:odd",
        "T:6:even:2",
        "S:5:odd:3",
    ] {
        t.declare_spec(spec).unwrap();
    }
    t
}

fn class_text() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        Just("g".to_string()),
        Just("h".to_string()),
        Just("a".to_string()),
        Just("b".to_string()),
        Just("c1".to_string()),
        Just("c3".to_string()),
        (1u32..4).prop_map(|e| format!("c2^{e}")),
    ];
    prop::collection::vec(atom, 1..4).prop_map(|v| v.join("."))
}

fn term_text() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..5, class_text()).prop_map(|(k, c)| format!("tau({k}; {c})")),
        (prop::collection::vec(1u32..4, 1..4), class_text()).prop_map(|(p, c)| {
            let p: Vec<String> = p.iter().map(u32::to_string).collect();
            format!("tau[{}]({c})", p.join(","))
        }),
        (
            prop::collection::vec(class_text(), 1..4),
            prop::collection::vec(0u32..3, 3)
        )
            .prop_map(|(cs, ks)| {
                let ks: Vec<String> = ks[..cs.len()].iter().map(u32::to_string).collect();
                format!("tau{{{}}}({})", ks.join(","), cs.join(" (x) "))
            }),
        (0u32..3, 0u32..3).prop_map(|(x, y)| format!("tau{{{x},{y}}}(T)")),
        (0u32..3).prop_map(|x| format!("tau{{{x},0,1}}(S)")),
    ]
}

fn word_text() -> impl Strategy<Value = String> {
    (any::<bool>(), prop::collection::vec(term_text(), 1..4))
        .prop_map(|(neg, ts)| format!("{}{}", if neg { "-" } else { "" }, ts.join(" * ")))
}

proptest! {
    #[test]
    fn printed_expressions_parse_back(text in word_text()) {
        let t = table();
        let e = parse_expr(&text).unwrap();
        let printed = e.to_string();
        prop_assert_eq!(parse_expr(&printed).unwrap(), e.clone());
        let w = resolve(&e, &t).unwrap();
        prop_assert_eq!(parse_word(&printed, &t).unwrap(), w.clone());
        prop_assume!(!w.is_zero());
        // the printer for resolved words emits the normalized form
        let shown = w.display(&t);
        prop_assert_eq!(parse_word(&shown, &t).unwrap().normalize(), w.normalize());
    }

    #[test]
    fn kmatrix_text_round_trips(seed in 0u64..500, max in 1u32..6) {
        let k = KMatrix::random_admissible(max, (-2, 2), seed);
        prop_assert_eq!(KMatrix::parse(&k.serialize()).unwrap(), k);
    }
}

#[test]
fn syntax_errors_carry_columns() {
    let e = parse_expr("tau(1; g) * tau(2 g)").unwrap_err();
    assert_eq!((e.line, e.column), (1, 19));
    let t = table();
    let e = parse_word("tau{0,1}(g)", &t).unwrap_err();
    assert!(e.message.contains("arity"), "{e}");
    let e = parse_word("tau{0}(T)", &t).unwrap_err();
    assert!(e.message.contains("arity"), "{e}");
    assert!(parse_word("tau[2](q)", &t).is_err());
}

#[test]
fn single_part_diagonals_normalize() {
    let t = table();
    assert_eq!(
        parse_word("tau[3](g)", &t).unwrap(),
        parse_word("tau(2; g)", &t).unwrap()
    );
    assert_eq!(
        parse_word("tau[3](g)", &t).unwrap().display(&t),
        "tau(2; g)"
    );
    assert!(parse_word("tau(0; a) * tau(1; a)", &t).is_ok());
    assert!(parse_word("tau(0; a.a)", &t).unwrap().is_zero());
}

#[test]
fn rings_round_trip_and_reject_bad_input() {
    for ring in [CohomRing::projective3(), CohomRing::odd_test()] {
        let back = CohomRing::parse(&ring.to_spec()).unwrap();
        assert!(back.same_structure(&ring));
    }
    let spec = CohomRing::projective3().to_spec();
    let broken = spec.replacen("basis", "basys", 1);
    assert!(matches!(CohomRing::parse(&broken), Err(Error::InvalidRing(p)) if p.line == 1));
    let nonassoc = format!("{spec}mul h*h2 = 2*h3\n");
    assert!(CohomRing::parse(&nonassoc).is_err());
}

fn class(t: &SymbolTable, name: &str) -> ClassMonomial {
    match t.resolve(name) {
        Some(SymbolRef::Class(f)) => ClassMonomial::factor(f),
        _ => panic!("{name}"),
    }
}

#[test]
fn theory_tables_round_trip() {
    let t = table();
    let k = KMatrix::random_admissible(5, (-1, 1), 5);
    let lhs = parse_word("tau(1; a) * tau(1; b) * tau(0; g)", &t).unwrap();
    let bar = bar_i(
        &[2, 2, 1],
        &[class(&t, "a"), class(&t, "b"), class(&t, "g")],
        &k,
        &BarOptions::default(),
    )
    .unwrap();
    let f = synthetic_fixture(&lhs, &bar, 1, 2, 4, 9, &t).unwrap();
    for table_ in [&f.zp, &f.zgw] {
        let back = TheoryTable::parse(&table_.serialize(&t), &t).unwrap();
        assert_eq!(back.serialize(&t), table_.serialize(&t));
        assert_eq!(back.len(), table_.len());
    }
    assert_eq!(f.zp.side, Side::Pairs);
    let bad = "side=GW\ndbeta=1\nseries side=P word=\"tau(0; g)\" = 1\n";
    assert!(TheoryTable::parse(bad, &t).is_err());
}

#[test]
fn reordered_odd_words_look_up_with_a_sign() {
    let t = table();
    let mut zgw = TheoryTable::new(Side::Gw, "b", 0, 0);
    let w = parse_word("tau(0; a) * tau(1; b)", &t).unwrap();
    zgw.insert(
        &w,
        gwp_core::bridge::Series::Gw(gwp_core::ULaurent::iu_power(2)),
        &t,
    )
    .unwrap();
    let swapped = parse_word("tau(1; b) * tau(0; a)", &t).unwrap();
    assert_eq!(
        zgw.get(&swapped),
        Some(gwp_core::bridge::Series::Gw(
            -&gwp_core::ULaurent::iu_power(2)
        ))
    );
}

#[test]
fn perturbations_surface_at_the_predicted_power() {
    let t = table();
    let k = KMatrix::random_admissible(4, (-1, 1), 2);
    let lhs = parse_word("tau(2; g) * tau(0; h)", &t).unwrap();
    let bar = bar_i(
        &[3, 1],
        &[class(&t, "g"), class(&t, "h")],
        &k,
        &BarOptions::default(),
    )
    .unwrap();
    let (d, order) = (2, 6);
    let f = synthetic_fixture(&lhs, &bar, d, 0, order, 4, &t).unwrap();
    let r = check_correspondence(&lhs, &bar, &f.zp, &f.zgw, order, &t).unwrap();
    assert_eq!(r.verdict, Verdict::Equal { order });
    for (w, c) in bar.terms() {
        let v = c.lowest().unwrap();
        for p in -2..2 {
            let at = p + d + v;
            if at > order {
                continue;
            }
            let z = perturb(&f.zgw, w, p, &GaussRat::from_int(1)).unwrap();
            let r = check_correspondence(&lhs, &bar, &f.zp, &z, order, &t).unwrap();
            assert_eq!(r.verdict, Verdict::Unequal { first_power: at });
        }
    }
}

use gwp_core::partitions::{
    bell_numbers, enumerate_set_partitions, inverse, koszul_sign, meet, reorder_sign, subpartition,
    SetPartition,
};
use proptest::prelude::*;

/// Every set partition of `{0..n}` from a plain recursive insertion,
/// independent of the library's restricted growth strings.
fn brute_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in brute_partitions(n - 1) {
        for j in 0..p.len() {
            let mut q = p.clone();
            q[j].push(n - 1);
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

fn refines(fine: &SetPartition, coarse: &SetPartition) -> bool {
    let labels = coarse.labels();
    fine.blocks()
        .iter()
        .all(|b| b.iter().all(|&x| labels[x] == labels[b[0]]))
}

#[test]
fn bell_numbers_frozen() {
    // Bell triangle, computed by hand once
    assert_eq!(
        bell_numbers(10),
        vec![1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]
    );
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=7 {
        let lib = enumerate_set_partitions(n, 12).unwrap();
        let mut brute: Vec<SetPartition> = brute_partitions(n)
            .into_iter()
            .map(|b| SetPartition::new(n, b).unwrap())
            .collect();
        brute.sort_by_key(|p| p.to_string());
        let mut lib_sorted = lib.clone();
        lib_sorted.sort_by_key(|p| p.to_string());
        assert_eq!(lib_sorted, brute, "n = {n}");
    }
    assert!(enumerate_set_partitions(13, 12).is_err());
    assert!(enumerate_set_partitions(0, 12).is_err());
}

#[test]
fn meet_is_the_finest_common_coarsening() {
    for n in 1..=4 {
        let all = enumerate_set_partitions(n, 12).unwrap();
        for d in &all {
            for p in &all {
                let m = meet(d, p).unwrap();
                let oracle = all
                    .iter()
                    .filter(|c| refines(d, c) && refines(p, c))
                    .max_by_key(|c| c.len())
                    .unwrap();
                assert_eq!(&m, oracle, "D = {d}, P = {p}");
                assert_eq!(meet(p, d).unwrap(), m);
            }
        }
    }
    let d = SetPartition::parse("{{1,2},{3}}").unwrap();
    let p = SetPartition::parse("{{1},{2,3}}").unwrap();
    assert_eq!(meet(&d, &p).unwrap().to_string(), "{{1,2,3}}");
}

#[test]
fn subpartition_examples() {
    assert_eq!(
        subpartition(&[3, 2, 2, 1, 1], &[0, 1, 2]).unwrap().parts(),
        &[3, 2, 2]
    );
    assert_eq!(subpartition(&[1, 2], &[1]).unwrap().parts(), &[2]);
    assert!(subpartition(&[2, 1], &[]).is_err());
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn koszul_sign_is_multiplicative(
        (s, t, odd) in (1usize..7).prop_flat_map(|n| (perm(n), perm(n), prop::collection::vec(any::<bool>(), n)))
    ) {
        // applying t then s: letter j goes to s[t[j]]
        let st: Vec<usize> = t.iter().map(|&x| s[x]).collect();
        let mut moved = vec![false; odd.len()];
        for (j, &x) in t.iter().enumerate() {
            moved[x] = odd[j];
        }
        prop_assert_eq!(koszul_sign(&st, &odd), koszul_sign(&t, &odd) * koszul_sign(&s, &moved));
        prop_assert_eq!(reorder_sign(&inverse(&t), &odd), koszul_sign(&t, &odd));
    }

    #[test]
    fn meet_is_associative(n in 1usize..6, a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let all = enumerate_set_partitions(n, 12).unwrap();
        let (x, y, z) = (&all[a % all.len()], &all[b % all.len()], &all[c % all.len()]);
        prop_assert_eq!(
            meet(&meet(x, y).unwrap(), z).unwrap(),
            meet(x, &meet(y, z).unwrap()).unwrap()
        );
        prop_assert_eq!(&meet(x, x).unwrap(), x);
        prop_assert_eq!(&meet(x, &SetPartition::singletons(n)).unwrap(), x);
    }
}

#[test]
fn koszul_examples() {
    assert_eq!(koszul_sign(&[1, 0], &[true, true]), -1);
    assert_eq!(koszul_sign(&[2, 0, 1], &[false; 3]), 1);
    // the word (x1 x2 x3) with x1, x2 odd rearranged to (x3 x1 x2)
    assert_eq!(reorder_sign(&[2, 0, 1], &[true, true, false]), 1);
}

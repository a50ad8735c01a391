use std::collections::{BTreeSet, HashSet, VecDeque};

use dcover::corpus::{self, CorpusEntry};
use dcover::coset_enum::{enumerate, enumerate_table, order};
use dcover::covering::{classify_coverings, lift_orders, lift_presentation, ClassifyOptions};
use dcover::metacyclic::{
    cover_verdict, multiply, parity_row, power, presentation_pair_test, realize, CoverKind,
    MetaParams, NormalForm,
};
use dcover::table_group::{automorphism_count, automorphisms, normal_subgroups, Elem, Subgroup};
use dcover::words::{
    class_count, format_word, parse_word, rho_image_rank, simple_type_degree, Letter,
};
use dcover::{EnumLimits, ParityMatrix, Presentation, SignVector, Strongness, Word};
use proptest::prelude::*;

fn fast_corpus() -> Vec<CorpusEntry> {
    corpus::entries().into_iter().filter(|e| !e.slow).collect()
}

fn simple_corpus() -> Vec<CorpusEntry> {
    vec![
        corpus::cyclic(3),
        corpus::cyclic(5),
        corpus::platonic(5).unwrap(),
        corpus::psl2(5).unwrap(),
        corpus::psl2(7).unwrap(),
    ]
}

fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        (0..rank, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv)),
        0..max_len,
    )
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    letters(rank, max_len).prop_map(Word::from_letters)
}

fn presentation(max_rank: usize, max_rels: usize) -> impl Strategy<Value = Presentation> {
    (1..=max_rank).prop_flat_map(move |rank| {
        prop::collection::vec(word(rank, 10), 1..=max_rels)
            .prop_map(move |rels| Presentation::with_rank(rank, rels).unwrap())
    })
}

fn valid_params(bound: u64) -> impl Strategy<Value = MetaParams> {
    let all = MetaParams::all_valid(bound);
    (0..all.len()).prop_map(move |k| all[k])
}

/// Relator values under the central sign assignment `signs`, read off the
/// letters one at a time.
fn evaluate_signs(p: &Presentation, signs: u64) -> SignVector {
    let values: Vec<bool> = p
        .relators()
        .iter()
        .map(|w| {
            w.letters()
                .iter()
                .filter(|l| signs >> l.gen & 1 == 1)
                .count()
                % 2
                == 1
        })
        .collect();
    SignVector::from_signs(&values)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn free_reduction_is_idempotent(ls in letters(3, 40)) {
        let w = Word::from_letters(ls);
        let again = Word::from_letters(w.letters().iter().copied());
        prop_assert_eq!(&again, &w);
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inv()));
        prop_assert_eq!(w.cyclically_reduced().cyclically_reduced(), w.cyclically_reduced());
        prop_assert!(w.mul(&w.inverse()).is_identity());
    }

    #[test]
    fn format_then_parse_round_trips(w in word(3, 30)) {
        let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
        let text = format_word(&w, &names);
        prop_assert_eq!(parse_word(&text, &names).unwrap(), w);
    }

    #[test]
    fn parity_matrix_is_the_sign_evaluation(p in presentation(6, 5)) {
        let rho = ParityMatrix::of(&p);
        for signs in 0..1u64 << p.rank() {
            prop_assert_eq!(rho.apply(signs), evaluate_signs(&p, signs));
        }
    }

    #[test]
    fn simple_type_degree_is_the_rank(p in presentation(4, 5)) {
        if let Some(d) = simple_type_degree(&p) {
            prop_assert_eq!(rho_image_rank(&p), d);
            prop_assert_eq!(class_count(&p), 1u64 << (p.relator_count() - d));
        }
    }

    #[test]
    fn strategies_agree_on_metacyclic_lifts(params in valid_params(40), bits in 0u64..8) {
        let lift = lift_presentation(&params.presentation(), SignVector::from_bits(bits, 3)).unwrap();
        let hlt = order(lift.presentation(), &EnumLimits::default()).unwrap();
        let felsch = order(lift.presentation(), &EnumLimits::default().felsch()).unwrap();
        prop_assert_eq!(hlt, felsch);
    }

    #[test]
    fn rows_nine_to_eleven_reach_a_metacyclic_cover(params in valid_params(200)) {
        let row = parity_row(&params).unwrap();
        if (9..=11).contains(&row) {
            let reached = [false, true].into_iter().any(|tau| {
                let j = SignVector::from_signs(&[true, false, tau]);
                matches!(cover_verdict(j, &params).unwrap().kind, CoverKind::MetacyclicCover { .. })
            });
            prop_assert!(reached, "{}", params);
        }
    }
}

#[test]
fn linearity_exhaustive_for_twelve_generators() {
    let rels: Vec<Word> = (1..=12)
        .map(|k| Word::from_signed(&[k, k, (k % 12) + 1, -(((k + 4) % 12) + 1), k]))
        .collect();
    let p = Presentation::with_rank(12, rels).unwrap();
    let rho = ParityMatrix::of(&p);
    for signs in 0..1u64 << 12 {
        assert_eq!(rho.apply(signs), evaluate_signs(&p, signs));
    }
}

#[test]
fn power_matches_iterated_multiplication() {
    for params in MetaParams::all_valid(100) {
        let n = params.order();
        for e in 0..n {
            let a = NormalForm::from_index(e as Elem, &params);
            let mut acc = NormalForm::IDENTITY;
            for k in 0..=2 * n {
                assert_eq!(power(a, k, &params).unwrap(), acc, "{params} {a}^{k}");
                acc = multiply(acc, a, &params).unwrap();
            }
        }
    }
}

#[test]
fn pair_test_matches_relators_and_generation() {
    for params in MetaParams::all_valid(100) {
        let g = realize(&params).unwrap();
        let (m, n, r, s) = (
            params.m as i64,
            params.n as i64,
            params.r as i64,
            params.s as i64,
        );
        let e = g.identity();
        for a in g.elements() {
            for b in g.elements() {
                let relators_vanish = g.pow(a, m) == e
                    && g.mul(g.pow(b, n), g.pow(a, -r)) == e
                    && g.mul(g.mul(g.mul(g.inv(b), a), b), g.pow(a, -s)) == e;
                let by_table = relators_vanish && g.generates(&[a, b]);
                let fa = NormalForm::from_index(a, &params);
                let fb = NormalForm::from_index(b, &params);
                assert_eq!(
                    presentation_pair_test(fa, fb, &params).unwrap(),
                    by_table,
                    "{params} ({fa}, {fb})"
                );
            }
        }
    }
}

#[test]
fn strategies_agree_on_corpus() {
    for e in fast_corpus() {
        let p = e.parse();
        let hlt = order(&p, &EnumLimits::default()).unwrap();
        // Felsch fills the table strictly in order and needs far more live
        // cosets than HLT on the long PSL(2,p) relators.
        let felsch = order(&p, &EnumLimits::with_max_cosets(4_000_000).felsch()).unwrap();
        assert_eq!(hlt, felsch, "{}", e.name);
        assert_eq!(Some(hlt), e.expected_order, "{}", e.name);
    }
}

/// Closure of the permutation group generated by the columns of the table.
fn permutation_group_order(gens: &[Vec<u32>]) -> usize {
    let degree = gens[0].len();
    let identity: Vec<u32> = (0..degree as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q: Vec<u32> = p.iter().map(|&i| g[i as usize]).collect();
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen.len()
}

#[test]
fn generator_columns_act_regularly() {
    for e in fast_corpus()
        .into_iter()
        .filter(|e| e.expected_order.unwrap() <= 200)
    {
        let p = e.parse();
        let table = enumerate_table(&p, &EnumLimits::default()).unwrap();
        let gens: Vec<Vec<u32>> = (0..p.rank())
            .map(|g| table.generator_permutation(g))
            .collect();
        let mut orbit = BTreeSet::from([0u32]);
        let mut frontier = vec![0u32];
        while let Some(c) = frontier.pop() {
            for g in &gens {
                if orbit.insert(g[c as usize]) {
                    frontier.push(g[c as usize]);
                }
            }
        }
        assert_eq!(orbit.len(), table.len(), "{} transitive", e.name);
        assert_eq!(
            permutation_group_order(&gens),
            table.len(),
            "{} regular",
            e.name
        );
    }
}

#[test]
fn every_lift_is_the_group_or_a_double_cover() {
    for e in fast_corpus() {
        let p = e.parse();
        let n = e.expected_order.unwrap();
        for (j, size) in lift_orders(&p, &EnumLimits::default()).unwrap() {
            assert!(size == n || size == 2 * n, "{} {j}: {size}", e.name);
        }
    }
}

#[test]
fn fibers_do_not_depend_on_the_base_tuple() {
    for name in [
        "cyclic:6",
        "dihedral:4",
        "dihedral:5",
        "dicyclic:3",
        "A4",
        "S4",
    ] {
        let c = classify_coverings(
            &corpus::lookup(name).unwrap().parse(),
            &ClassifyOptions::default(),
        )
        .unwrap();
        for r in c.double_covers() {
            let a = r.analysis.as_ref().unwrap();
            if let Strongness::Strong { q } = r.strongness {
                assert!(
                    a.fibers.iter().all(|&f| f as u64 == q),
                    "{name} [P_{}]",
                    r.class_rep
                );
                assert_eq!(
                    a.fibers.len() as u64 * q,
                    a.hat_tuples as u64,
                    "{name} [P_{}]",
                    r.class_rep
                );
            }
        }
    }
}

#[test]
fn simple_group_times_c2() {
    for e in simple_corpus() {
        let p = e.parse();
        let g = enumerate(&p, &EnumLimits::default()).unwrap();
        let c = classify_coverings(&p, &ClassifyOptions::default()).unwrap();
        let direct = c.record(SignVector::trivial(p.relator_count())).unwrap();
        assert_eq!(direct.strongness, Strongness::Strong { q: 1 }, "{}", e.name);
        let gx2 = direct.group.as_ref().unwrap();
        assert_eq!(
            automorphism_count(direct.lift.presentation(), gx2).unwrap(),
            automorphism_count(&p, &g).unwrap(),
            "{}",
            e.name
        );
        let lattice = normal_subgroups(gx2).unwrap();
        let mut orders = lattice.proper_nontrivial_orders(gx2.order());
        orders.sort_unstable();
        assert_eq!(orders, vec![2, g.order()], "{}", e.name);
    }
}

#[test]
fn automorphisms_are_multiplicative() {
    for name in ["dihedral:4", "dicyclic:2", "A4", "S4"] {
        let p = corpus::lookup(name).unwrap().parse();
        let g = enumerate(&p, &EnumLimits::default()).unwrap();
        let auts = automorphisms(&p, &g).unwrap();
        assert!(auts.iter().all(|a| a.is_multiplicative(&g)), "{name}");
        let distinct: HashSet<&[Elem]> = auts.iter().map(|a| a.images()).collect();
        assert_eq!(distinct.len(), auts.len(), "{name}");
    }
}

#[test]
fn normal_subgroups_form_a_lattice() {
    for e in [
        corpus::platonic(4).unwrap(),
        corpus::group_b(),
        corpus::dihedral(4),
        corpus::dicyclic(3),
    ] {
        let g = enumerate(&e.parse(), &EnumLimits::default()).unwrap();
        let lattice = normal_subgroups(&g).unwrap();
        let known: HashSet<&Subgroup> = lattice.subgroups.iter().collect();
        for a in &lattice.subgroups {
            for b in &lattice.subgroups {
                let meet: Vec<Elem> = a
                    .elements
                    .iter()
                    .copied()
                    .filter(|&x| b.contains(x))
                    .collect();
                let mut join =
                    g.subgroup_generated(&[a.elements.clone(), b.elements.clone()].concat());
                join.sort_unstable();
                assert!(
                    known.contains(&Subgroup { elements: meet }),
                    "{} meet",
                    e.name
                );
                assert!(
                    known.contains(&Subgroup { elements: join }),
                    "{} join",
                    e.name
                );
            }
        }
    }
}

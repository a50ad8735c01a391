//! Acceptance run: one PASS/FAIL line per criterion, with wall-clock bounds.
//! Built with `harness = false`; exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dcover::corpus;
use dcover::covering::{
    classify_coverings, lift_presentation, projection, q_shortcut, Classification, ClassifyOptions,
    CoveringRecord,
};
use dcover::metacyclic::{
    central_involutions_closed_form, cover_verdict, realize, MetaParams, NormalForm,
};
use dcover::table_group::{
    isomorphic_via_presentation, normal_subgroups, presentation_tuples, Elem, FiniteGroup,
};
use dcover::{coset_enum, words, EnumLimits, Presentation, SignVector, Strongness};
use num_bigint::BigUint;

type Outcome = Result<(), Vec<String>>;

fn pres(text: &str) -> Presentation {
    Presentation::parse(text).expect("reference presentation parses")
}

fn classify(p: &Presentation) -> Classification {
    classify_coverings(p, &ClassifyOptions::default()).expect("classification succeeds")
}

fn covers(c: &Classification) -> Vec<&CoveringRecord> {
    c.iso_representatives()
}

/// Index of the first isomorphism class whose group matches `reference`.
fn locate(c: &Classification, reference: &Presentation) -> Option<usize> {
    let order = coset_enum::order(reference, &EnumLimits::default()).ok()?;
    covers(c)
        .iter()
        .find(|r| isomorphic_via_presentation(reference, r.group.as_ref().unwrap(), order))
        .and_then(|r| r.iso_class)
}

fn expect(fails: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        fails.push(what());
    }
}

fn cyclic(seen: &mut Vec<Classification>) -> Outcome {
    let mut fails = Vec::new();
    for m in [3u32, 4, 5, 6, 7, 8, 9, 10, 12] {
        let c = classify(&corpus::cyclic(m).parse());
        let reps = covers(&c);
        if m % 2 == 0 {
            expect(&mut fails, reps.len() == 2, || {
                format!("C{m}: {} iso classes", reps.len())
            });
            for r in &reps {
                let g = r.group.as_ref().unwrap();
                let is_cyclic = g
                    .elements()
                    .any(|e| g.element_order(e) as usize == 2 * m as usize);
                let want = if is_cyclic { Some(2) } else { None };
                expect(&mut fails, r.q() == want, || {
                    format!("C{m}: cover cyclic={is_cyclic} has q {:?}", r.q())
                });
            }
        } else {
            expect(&mut fails, reps.len() == 1, || {
                format!("C{m}: {} iso classes", reps.len())
            });
            expect(&mut fails, reps.iter().all(|r| r.q() == Some(1)), || {
                format!("C{m}: not 1-strong")
            });
        }
        seen.push(c);
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn dihedral_references(m: u32) -> Vec<(&'static str, Presentation, bool)> {
    let h = m / 2;
    vec![
        (
            "D_2m",
            pres(&format!("gens: a, b ; rels: a^{}, b^2, (a*b)^2", 2 * m)),
            true,
        ),
        (
            "(C_m/2 : C4) : C2",
            pres(&format!(
                "gens: x, y, z ; rels: x^{h}, y^4, x x^y, z^2, x x^z, x^-1 y y^z"
            )),
            false,
        ),
        (
            "Q_m : C2",
            pres(&format!(
                "gens: x, y, z ; rels: x^{h} y^2, x^{m}, x x^y, z^2, x x^z, x^-1 y y^z"
            )),
            false,
        ),
        (
            "C_m : C4",
            pres(&format!("gens: a, b ; rels: a^{m}, b^4, a a^b")),
            true,
        ),
        (
            "Q_2m",
            pres(&format!("gens: a, b ; rels: a^{m} b^2, a a^b")),
            true,
        ),
        (
            "D_m x C2",
            pres(&format!(
                "gens: a, b, c ; rels: a^{m}, b^2, (a*b)^2, c^2, [a, c], [b, c]"
            )),
            false,
        ),
    ]
}

fn dihedral(seen: &mut Vec<Classification>) -> Outcome {
    let mut fails = Vec::new();
    for m in [3u32, 5, 7] {
        let c = classify(&corpus::dihedral(m).parse());
        let reps = covers(&c);
        expect(&mut fails, reps.len() == 2, || {
            format!("D{m}: {} iso classes", reps.len())
        });
        expect(&mut fails, reps.iter().all(|r| r.q() == Some(2)), || {
            format!("D{m}: not all 2-strong")
        });
        seen.push(c);
    }
    for m in [4u32, 6, 8] {
        let c = classify(&corpus::dihedral(m).parse());
        let reps = covers(&c);
        expect(&mut fails, reps.len() == 6, || {
            format!("D{m}: {} iso classes", reps.len())
        });
        let mut matched = BTreeSet::new();
        for (name, reference, strong) in dihedral_references(m) {
            match locate(&c, &reference) {
                Some(k) => {
                    matched.insert(k);
                    let q = reps[k].q();
                    let want = if strong { Some(4) } else { None };
                    expect(&mut fails, q == want, || {
                        format!("D{m}: {name} has q {q:?}")
                    });
                }
                None => fails.push(format!("D{m}: no cover isomorphic to {name}")),
            }
        }
        expect(&mut fails, matched.len() == 6, || {
            format!("D{m}: references hit {} distinct classes", matched.len())
        });
        seen.push(c);
    }
    let c = classify(&corpus::dihedral(2).parse());
    let n = c.iso_class_count();
    expect(&mut fails, n == 3, || {
        let orders: Vec<String> = covers(&c)
            .iter()
            .map(|r| format!("{:?}", r.abelian_invariants))
            .collect();
        format!(
            "D2: expected 3 iso classes, found {n} (abelianizations {})",
            orders.join(" ")
        )
    });
    seen.push(c);
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn dicyclic(seen: &mut Vec<Classification>) -> Outcome {
    let mut fails = Vec::new();
    for m in [2u32, 3, 4, 5, 6] {
        let p = corpus::dicyclic(m).parse();
        let c = classify(&p);
        let reps = covers(&c);
        let binary = c
            .record(SignVector::all_i(p.relator_count()))
            .and_then(|r| r.iso_class);
        let name = format!("dicyclic m={m} (order {})", 4 * m);
        if m % 2 == 1 {
            expect(&mut fails, reps.len() == 2, || {
                format!("{name}: {} covers", reps.len())
            });
            for r in &reps {
                let want = if r.iso_class == binary { Some(2) } else { None };
                expect(&mut fails, r.q() == want, || {
                    format!("{name}: class {:?} has q {:?}", r.iso_class, r.q())
                });
            }
            let meta = MetaParams::new(4 * m as u64, 2, m as u64, 2 * m as u64 - 1).presentation();
            expect(
                &mut fails,
                binary.is_some() && locate(&c, &meta) == binary,
                || format!("{name}: binary is not M(4m,2,m,2m-1)"),
            );
        } else {
            expect(&mut fails, reps.len() == 3, || {
                format!("{name}: {} covers", reps.len())
            });
            let semi = locate(
                &c,
                &pres(&format!("gens: x, y ; rels: x^{}, y^4, x x^y", 2 * m)),
            );
            expect(&mut fails, semi.is_some(), || {
                format!("{name}: no C_2m : C4 cover")
            });
            expect(&mut fails, semi != binary, || {
                format!("{name}: binary cover is isomorphic to C_2m : C4")
            });
            for r in &reps {
                let want = if r.iso_class == semi { Some(4) } else { None };
                expect(&mut fails, r.q() == want, || {
                    format!("{name}: class {:?} has q {:?}", r.iso_class, r.q())
                });
            }
        }
        seen.push(c);
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn platonic(seen: &mut Vec<Classification>) -> Outcome {
    let mut fails = Vec::new();
    for (n, count, q) in [(3u32, 2usize, 1u64), (4, 4, 2), (5, 2, 1)] {
        let e = corpus::platonic(n).unwrap();
        let c = classify(&e.parse());
        let reps = covers(&c);
        expect(&mut fails, reps.len() == count, || {
            format!("{}: {} covers", e.name, reps.len())
        });
        expect(&mut fails, reps.iter().all(|r| r.q() == Some(q)), || {
            format!("{}: not all {q}-strong", e.name)
        });
        let order = 2 * e.expected_order.unwrap();
        expect(
            &mut fails,
            reps.iter().all(|r| r.order() == Some(order)),
            || format!("{}: cover orders", e.name),
        );
        if n == 4 {
            let gl23 = pres("gens: x, y ; rels: x^6, (x*y)^2, x^3 y^-4");
            expect(&mut fails, locate(&c, &gl23).is_some(), || {
                "S4: no cover isomorphic to GL(2,3)".into()
            });
            let b = corpus::group_b().parse();
            expect(&mut fails, locate(&c, &b).is_some(), || {
                "S4: no cover isomorphic to B".into()
            });
        }
        seen.push(c);
    }

    let b = corpus::group_b().parse();
    let g = coset_enum::enumerate(&b, &EnumLimits::default()).expect("B enumerates");
    let lattice = normal_subgroups(&g).expect("lattice within budget");
    let orders: BTreeSet<usize> = lattice
        .proper_nontrivial_orders(g.order())
        .into_iter()
        .collect();
    expect(
        &mut fails,
        orders == BTreeSet::from([24, 12, 8, 4, 2]),
        || format!("B: normal subgroup orders {orders:?}"),
    );
    let derived = g.derived_subgroup().len();
    let ab = words::abelian_invariants(&b);
    expect(&mut fails, derived == 12 && ab == [4], || {
        format!("B: |B'| = {derived}, B/B' invariants {ab:?}")
    });
    let d: BTreeSet<Elem> = g.derived_subgroup().into_iter().collect();
    let has_order4_mod_derived =
        g.order() / d.len() == 4 && g.elements().any(|e| !d.contains(&g.pow(e, 2)));
    expect(&mut fails, has_order4_mod_derived, || {
        "B/B' has no element of order 4".into()
    });
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn brute_force_involutions(params: &MetaParams) -> BTreeSet<NormalForm> {
    let g = realize(params).expect("valid params");
    g.central_involutions()
        .into_iter()
        .map(|e| NormalForm::from_index(e, params))
        .collect()
}

fn table1() -> Outcome {
    let mut fails = Vec::new();
    let all = MetaParams::all_valid(200);
    for params in &all {
        let closed: BTreeSet<NormalForm> = central_involutions_closed_form(params)
            .unwrap()
            .into_iter()
            .collect();
        let brute = brute_force_involutions(params);
        if closed != brute {
            fails.push(format!(
                "{params}: closed form {closed:?}, brute force {brute:?}"
            ));
        }
    }
    if all.is_empty() {
        fails.push("no parameter sets".into());
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn metacyclic_theorems() -> Outcome {
    let mut fails = Vec::new();
    let limits = EnumLimits::default();
    for params in MetaParams::all_valid(60) {
        let p = params.presentation();
        for j in SignVector::all(3) {
            let lift = lift_presentation(&p, j).unwrap();
            let order = coset_enum::order(lift.presentation(), &limits).expect("lift enumerates");
            let verdict = cover_verdict(j, &params).unwrap();
            let by_order = order == 2 * params.order() as usize;
            if verdict.kind.is_cover() != by_order {
                fails.push(format!(
                    "{params} {j}: verdict {}, lift order {order}",
                    verdict.kind
                ));
            }
        }
    }
    for params in [MetaParams::new(10, 4, 10, 3), MetaParams::new(10, 4, 10, 7)] {
        let c = classify(&params.presentation());
        let n_covers = c.double_covers().count();
        let n_iso = c.iso_class_count();
        expect(
            &mut fails,
            c.records.len() == 8 && n_covers == 8 && n_iso == 8,
            || {
                format!(
                    "{params}: {} classes, {n_covers} covers, {n_iso} iso classes",
                    c.records.len()
                )
            },
        );
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

/// `SL(2,p)` (or `PSL(2,p)` when `projective`) as an explicit matrix group.
fn matrix_group(p: u32, projective: bool) -> FiniteGroup {
    type M = [u32; 4];
    let mul = |a: &M, b: &M| -> M {
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ]
    };
    let canon = |a: M| -> M {
        if !projective {
            return a;
        }
        let neg = a.map(|v| (p - v) % p);
        a.min(neg)
    };
    let mut elems: Vec<M> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if (a * d + p * p - b * c) % p == 1 {
                        let m = canon([a, b, c, d]);
                        if !elems.contains(&m) {
                            elems.push(m);
                        }
                    }
                }
            }
        }
    }
    elems.sort();
    let idx = |m: M| {
        elems
            .binary_search(&canon(m))
            .expect("closed under product") as Elem
    };
    let rows: Vec<Vec<Elem>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| idx(mul(a, b))).collect())
        .collect();
    let gens = vec![idx([1, 1, 0, 1]), idx([0, p - 1, 1, 0])];
    FiniteGroup::from_table(rows, gens).expect("matrix group table is a group")
}

fn psl2() -> Outcome {
    let mut fails = Vec::new();
    for (p, order) in [(5u32, 60usize), (7, 168), (13, 1092)] {
        let base = corpus::psl2(p).unwrap().parse();
        let c = classify(&base);
        expect(&mut fails, c.group.order() == order, || {
            format!("PSL(2,{p}): order {}", c.group.order())
        });
        expect(&mut fails, c.records.len() == 2, || {
            format!("PSL(2,{p}): {} classes", c.records.len())
        });
        for r in &c.records {
            expect(&mut fails, r.q() == Some(1), || {
                format!("PSL(2,{p}) [P_{}]: {}", r.class_rep, r.strongness)
            });
            if !r.is_direct_product_class() {
                let g = r.group.as_ref().unwrap();
                expect(&mut fails, r.order() == Some(2 * order), || {
                    format!("PSL(2,{p}): cover order {:?}", r.order())
                });
                expect(&mut fails, r.abelian_invariants.is_empty(), || {
                    format!("PSL(2,{p}): cover not perfect")
                });
                expect(&mut fails, g.derived_subgroup().len() == g.order(), || {
                    format!("PSL(2,{p}): G^' != G^")
                });
                if p == 7 {
                    let sl = matrix_group(7, false);
                    expect(
                        &mut fails,
                        isomorphic_via_presentation(r.lift.presentation(), &sl, 2 * order),
                        || "PSL(2,7): non-split cover is not SL(2,7)".into(),
                    );
                }
            }
        }
        if p == 7 {
            let m = matrix_group(7, true);
            expect(
                &mut fails,
                m.order() == 168 && isomorphic_via_presentation(&base, &m, 168),
                || "PSL(2,7): presentation does not match the matrix group".into(),
            );
        }
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn tuple_count(p: &Presentation) -> usize {
    let g = coset_enum::enumerate(p, &EnumLimits::default()).expect("enumerates");
    presentation_tuples(p, &g).len()
}

fn properties(seen: &[Classification]) -> Outcome {
    let mut fails = Vec::new();

    let pairs = [
        (
            "S4",
            corpus::platonic(4).unwrap().parse(),
            pres("gens: a, b ; rels: a^4, b^2, (a*b)^3"),
            24,
        ),
        (
            "D4",
            corpus::dihedral(4).parse(),
            MetaParams::new(4, 2, 4, 3).presentation(),
            8,
        ),
        (
            "Q8",
            corpus::dicyclic(2).parse(),
            MetaParams::new(4, 2, 2, 3).presentation(),
            24,
        ),
    ];
    for (name, p1, p2, aut) in pairs {
        let (a, b) = (tuple_count(&p1), tuple_count(&p2));
        expect(&mut fails, a == aut && b == aut, || {
            format!("{name}: |S_P| = {a} and {b}, |Aut| = {aut}")
        });
    }

    let mut strong = 0;
    for c in seen {
        let shortcut = q_shortcut(&c.base);
        for r in c.double_covers() {
            if let Strongness::Strong { q } = r.strongness {
                strong += 1;
                expect(&mut fails, q == shortcut, || {
                    format!(
                        "{} [P_{}]: q {q} vs shortcut {shortcut}",
                        c.base, r.class_rep
                    )
                });
            }
            if r.kernel_characteristic != Some(true) {
                continue;
            }
            let g_hat = r.group.as_ref().unwrap();
            let pi = projection(&r.lift, &c.group, g_hat).unwrap();
            let n = c.base.rank();
            for t in presentation_tuples(r.lift.presentation(), g_hat) {
                let image: Vec<Elem> = t[..n].iter().map(|&e| pi[e as usize]).collect();
                if !(c.group.satisfies(&c.base, &image) && c.group.generates(&image)) {
                    fails.push(format!(
                        "{} [P_{}]: tuple projects outside S_P",
                        c.base, r.class_rep
                    ));
                    break;
                }
            }
        }
    }
    expect(&mut fails, strong > 0, || "no strong covers seen".into());

    let mut swept = 0;
    for params in MetaParams::all_valid(200)
        .into_iter()
        .filter(|q| q.m % 2 == 0)
    {
        let (m, n, s) = (BigUint::from(params.m), params.n as u32, params.s);
        let quotient = |base: u64| (BigUint::from(base).pow(n) - 1u32) / &m;
        let odd = |v: BigUint| v.bit(0);
        let same = odd(quotient(s)) == odd(quotient(s + params.m));
        swept += 1;
        expect(&mut fails, same == (n % 2 == 0), || {
            format!("{params}: parity lemma")
        });
    }
    expect(&mut fails, swept > 0, || "empty parity sweep".into());
    if fails.is_empty() {
        Ok(())
    } else {
        Err(fails)
    }
}

fn report(k: u32, title: &str, bound: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = run();
    let took = start.elapsed();
    let mut fails = outcome.err().unwrap_or_default();
    if took > bound {
        fails.push(format!(
            "took {:.2} s, bound {} s",
            took.as_secs_f64(),
            bound.as_secs()
        ));
    }
    let verdict = if fails.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "criterion {k}: {verdict}  {title}  ({:.2} s, bound {} s)",
        took.as_secs_f64(),
        bound.as_secs()
    );
    for f in fails.iter().take(10) {
        println!("    {f}");
    }
    if fails.len() > 10 {
        println!("    ... {} more", fails.len() - 10);
    }
    fails.is_empty()
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut seen = Vec::new();
    let results = [
        report(1, "cyclic groups", secs(1), || cyclic(&mut seen)),
        report(2, "dihedral groups", secs(10), || dihedral(&mut seen)),
        report(3, "dicyclic groups", secs(10), || dicyclic(&mut seen)),
        report(4, "platonic groups and B", secs(60), || platonic(&mut seen)),
        report(5, "central involutions, mn <= 200", secs(120), table1),
        report(
            6,
            "metacyclic cover verdicts, mn <= 60",
            secs(300),
            metacyclic_theorems,
        ),
        report(7, "PSL(2,p), p = 5, 7, 13", secs(300), psl2),
        report(8, "property suite", secs(300), || properties(&seen)),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

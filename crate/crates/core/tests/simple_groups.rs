//! The two small entries of the simple-group table, checked against matrix
//! groups over GF(8) and GF(9) built from scratch.

use dcover::corpus;
use dcover::covering::{classify_coverings, ClassifyOptions};
use dcover::table_group::{isomorphic_via_presentation, Elem, FiniteGroup};
use dcover::{SignVector, Strongness};

/// GF(p^k) as coefficient vectors modulo a monic polynomial, encoded as
/// integers in base `p`.
struct Field {
    q: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl Field {
    /// `modulus` holds the low coefficients of a monic degree-`k` polynomial.
    fn new(p: usize, modulus: &[usize]) -> Self {
        let k = modulus.len();
        let q = p.pow(k as u32);
        let digits = |mut v: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = v % p;
                    v /= p;
                    d
                })
                .collect()
        };
        let encode = |ds: &[usize]| ds.iter().rev().fold(0, |acc, &d| acc * p + d);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum);
                let mut prod = vec![0; 2 * k];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (k..2 * k).rev() {
                    let c = prod[deg];
                    prod[deg] = 0;
                    for (i, m) in modulus.iter().enumerate() {
                        prod[deg - k + i] = (prod[deg - k + i] + (p - m % p) * c) % p;
                    }
                }
                mul[a * q + b] = encode(&prod[..k]);
            }
        }
        Self { q, add, mul }
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b]
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b]
    }

    fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    fn one(&self) -> usize {
        1
    }
}

/// `SL(2,q)`, or `PSL(2,q)` when `projective`.
fn special_linear(f: &Field, projective: bool) -> FiniteGroup {
    type M = [usize; 4];
    let mul = |a: &M, b: &M| -> M {
        [
            f.add(f.mul(a[0], b[0]), f.mul(a[1], b[2])),
            f.add(f.mul(a[0], b[1]), f.mul(a[1], b[3])),
            f.add(f.mul(a[2], b[0]), f.mul(a[3], b[2])),
            f.add(f.mul(a[2], b[1]), f.mul(a[3], b[3])),
        ]
    };
    let canon = |a: M| -> M {
        if projective {
            a.min(a.map(|v| f.neg(v)))
        } else {
            a
        }
    };
    let mut elems: Vec<M> = Vec::new();
    for a in 0..f.q {
        for b in 0..f.q {
            for c in 0..f.q {
                for d in 0..f.q {
                    if f.add(f.mul(a, d), f.neg(f.mul(b, c))) == f.one() {
                        elems.push(canon([a, b, c, d]));
                    }
                }
            }
        }
    }
    elems.sort_unstable();
    elems.dedup();
    let idx = |m: M| elems.binary_search(&canon(m)).unwrap() as Elem;
    let rows: Vec<Vec<Elem>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| idx(mul(a, b))).collect())
        .collect();
    let one = f.one();
    let mut gens: Vec<Elem> = (1..f.q).map(|t| idx([one, t, 0, one])).collect();
    gens.push(idx([0, f.neg(one), one, 0]));
    FiniteGroup::from_table(rows, gens).unwrap()
}

#[test]
fn field_tables_are_fields() {
    for f in [Field::new(3, &[1, 0]), Field::new(2, &[1, 1, 0])] {
        for a in 1..f.q {
            assert!((1..f.q).any(|b| f.mul(a, b) == 1));
        }
    }
}

#[test]
fn a6_has_two_double_coverings() {
    let entry = corpus::a6();
    let p = entry.parse();
    let gf9 = Field::new(3, &[1, 0]);
    let psl = special_linear(&gf9, true);
    assert_eq!(psl.order(), 360);
    assert!(isomorphic_via_presentation(&p, &psl, 360));

    let c = classify_coverings(&p, &ClassifyOptions::default()).unwrap();
    assert_eq!(c.group.order(), 360);
    assert_eq!(c.records.len(), 2);
    assert_eq!(c.iso_class_count(), 2);
    let direct = c.record(SignVector::trivial(3)).unwrap();
    assert_eq!(direct.strongness, Strongness::Strong { q: 1 });
    let other = c
        .records
        .iter()
        .find(|r| !r.is_direct_product_class())
        .unwrap();
    assert_eq!(other.order(), Some(720));
    assert!(other.abelian_invariants.is_empty());
    assert_eq!(other.strongness, Strongness::Strong { q: 1 });
    let sl = special_linear(&gf9, false);
    assert!(isomorphic_via_presentation(
        other.lift.presentation(),
        &sl,
        720
    ));
}

#[test]
fn psl2_8_has_one_double_covering() {
    let p = corpus::psl2_8().parse();
    let gf8 = Field::new(2, &[1, 1, 0]);
    let sl = special_linear(&gf8, false);
    assert_eq!(sl.order(), 504);
    assert!(isomorphic_via_presentation(&p, &sl, 504));

    let c = classify_coverings(&p, &ClassifyOptions::default()).unwrap();
    assert_eq!(c.group.order(), 504);
    assert_eq!(c.iso_class_count(), 1);
    assert!(c.records.iter().all(|r| r.is_direct_product_class()));
    assert_eq!(c.records[0].strongness, Strongness::Strong { q: 1 });
}

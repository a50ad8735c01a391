//! Metacyclic groups `M(m,n,r,s) = <x, y | x^m, y^n = x^r, x^y = x^s>`.
//!
//! Under `s^n = 1` and `rs = r (mod m)` every element has the unique normal
//! form `y^p x^q` with `0 <= p < n`, `0 <= q < m`, and the group has order
//! `mn`. Everything here is closed-form modular arithmetic; the brute-force
//! counterparts live in [`crate::table_group`] and [`crate::coset_enum`].

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::table_group::{Elem, FiniteGroup};
use crate::words::{Presentation, SignVector, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetaError {
    #[error("parameters must satisfy m, n >= 1 and 1 <= r, s <= m (got {0})")]
    OutOfRange(MetaParams),
    #[error("{params} is not a valid metacyclic parameter set: s^n - 1 = {sn_residual} and r*s - r = {rs_residual} (mod m), both must be 0")]
    Invalid {
        params: MetaParams,
        sn_residual: u64,
        rs_residual: u64,
    },
    #[error("sign vector must have length 3, got {0}")]
    SignLength(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MetaParams {
    pub m: u64,
    pub n: u64,
    pub r: u64,
    pub s: u64,
}

impl fmt::Display for MetaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({},{},{},{})", self.m, self.n, self.r, self.s)
    }
}

/// `y^p x^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NormalForm {
    pub p: u64,
    pub q: u64,
}

impl NormalForm {
    pub const IDENTITY: NormalForm = NormalForm { p: 0, q: 0 };

    pub fn new(p: u64, q: u64) -> Self {
        Self { p, q }
    }

    pub fn index(self, params: &MetaParams) -> Elem {
        (self.p * params.m + self.q) as Elem
    }

    pub fn from_index(e: Elem, params: &MetaParams) -> Self {
        Self::new(e as u64 / params.m, e as u64 % params.m)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p, self.q) {
            (0, 0) => write!(f, "1"),
            (0, q) => write!(f, "x^{q}"),
            (p, 0) => write!(f, "y^{p}"),
            (p, q) => write!(f, "y^{p} x^{q}"),
        }
    }
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut b = base % modulus;
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, b, modulus);
        }
        b = mulmod(b, b, modulus);
        exp >>= 1;
    }
    acc
}

/// `1 + h + ... + h^(k-1)` reduced mod `modulus`, by binary expansion of
/// `k` using `sigma(2j) = sigma(j)(1 + h^j)` and `sigma(j+1) = sigma(j) + h^j`.
pub fn sigma(h: u64, k: u64, modulus: u64) -> u64 {
    if modulus == 1 || k == 0 {
        return 0;
    }
    let h = h % modulus;
    let (mut sum, mut hj) = (0u64, 1 % modulus);
    for bit in (0..64 - k.leading_zeros()).rev() {
        sum = mulmod(sum, (1 + hj) % modulus, modulus);
        hj = mulmod(hj, hj, modulus);
        if k >> bit & 1 == 1 {
            sum = (sum + hj) % modulus;
            hj = mulmod(hj, h, modulus);
        }
    }
    sum
}

impl MetaParams {
    pub fn new(m: u64, n: u64, r: u64, s: u64) -> Self {
        Self { m, n, r, s }
    }

    /// Parameters with `r` and `s` reduced into `1..=m`.
    pub fn normalized(m: u64, n: u64, r: u64, s: u64) -> Self {
        let red = |v: u64| (v + m - 1) % m + 1;
        Self::new(m, n, red(r), red(s))
    }

    /// `(s^n - 1 mod m, r s - r mod m)`.
    pub fn residuals(&self) -> (u64, u64) {
        let m = self.m;
        let sn = (pow_mod(self.s, self.n, m) + m - 1 % m) % m;
        let rs = (mulmod(self.r, self.s, m) + m - self.r % m) % m;
        (sn, rs)
    }

    pub fn validate(&self) -> Result<(), MetaError> {
        let in_range = self.m >= 1
            && self.n >= 1
            && (1..=self.m).contains(&self.r)
            && (1..=self.m).contains(&self.s);
        if !in_range {
            return Err(MetaError::OutOfRange(*self));
        }
        match self.residuals() {
            (0, 0) => Ok(()),
            (sn_residual, rs_residual) => Err(MetaError::Invalid {
                params: *self,
                sn_residual,
                rs_residual,
            }),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn order(&self) -> u64 {
        self.m * self.n
    }

    /// `<x, y | x^m, y^n x^-r, x^y x^-s>`, relators in this order.
    pub fn presentation(&self) -> Presentation {
        let (m, n, r, s) = (self.m as i64, self.n as i64, self.r as i64, self.s as i64);
        let x = Word::generator(0);
        let y = Word::generator(1);
        let relators = vec![
            x.pow(m),
            y.pow(n).mul(&x.pow(-r)),
            x.conjugate_by(&y).mul(&x.pow(-s)),
        ];
        Presentation::new(vec!["x".into(), "y".into()], relators)
            .expect("two generators, three relators")
    }

    /// Every valid parameter set with `m * n <= bound`.
    pub fn all_valid(bound: u64) -> Vec<MetaParams> {
        let mut out = Vec::new();
        for m in 1..=bound {
            for n in 1..=bound / m {
                for r in 1..=m {
                    for s in 1..=m {
                        let p = MetaParams::new(m, n, r, s);
                        if p.is_valid() {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `(y^p1 x^q1)(y^p2 x^q2)`, using `x^a y^b = y^b x^(a s^b)` and `y^n = x^r`.
pub fn multiply(
    a: NormalForm,
    b: NormalForm,
    params: &MetaParams,
) -> Result<NormalForm, MetaError> {
    params.validate()?;
    Ok(mul_unchecked(a, b, params))
}

fn mul_unchecked(a: NormalForm, b: NormalForm, pr: &MetaParams) -> NormalForm {
    let m = pr.m;
    let sum = a.p + b.p;
    let carry = if sum >= pr.n { pr.r } else { 0 };
    let q = (mulmod(a.q, pow_mod(pr.s, b.p, m), m) + b.q + carry) % m;
    NormalForm::new(sum % pr.n, q)
}

/// `(y^p x^q)^k = y^(pk) x^(q sigma(s^p, k))`, with `y^(pk)` reduced through
/// `y^n = x^r`.
pub fn power(a: NormalForm, k: u64, params: &MetaParams) -> Result<NormalForm, MetaError> {
    params.validate()?;
    let (m, n) = (params.m, params.n);
    let pk = a.p as u128 * k as u128;
    let wraps = ((pk / n as u128) % m as u128) as u64;
    let q =
        (mulmod(params.r, wraps, m) + mulmod(a.q, sigma(pow_mod(params.s, a.p, m), k, m), m)) % m;
    Ok(NormalForm::new((pk % n as u128) as u64, q))
}

/// The group on `Z_n x Z_m` (element `y^p x^q` has id `p m + q`) with
/// generators `x`, `y`.
pub fn realize(params: &MetaParams) -> Result<FiniteGroup, MetaError> {
    params.validate()?;
    let n = params.order() as usize;
    let mut table = vec![0; n * n];
    for a in 0..n {
        let fa = NormalForm::from_index(a as Elem, params);
        for b in 0..n {
            let fb = NormalForm::from_index(b as Elem, params);
            table[a * n + b] = mul_unchecked(fa, fb, params).index(params);
        }
    }
    let gens = vec![
        NormalForm::new(0, 1 % params.m).index(params),
        NormalForm::new(1 % params.n, 0).index(params),
    ];
    Ok(FiniteGroup::from_parts(n, table, 0, gens))
}

/// Central involutions from the parity of the parameters:
/// `x^(m/2)` when `m` is even, and for `n` even with `s^(n/2) = 1 (mod m)`
/// the elements `y^(n/2) x^t` with `2t = -r (mod m)`. When `m` and `r` are
/// both even those two elements are central only if `(r/2)(s-1) = 0 (mod m)`.
pub fn central_involutions_closed_form(params: &MetaParams) -> Result<Vec<NormalForm>, MetaError> {
    params.validate()?;
    let MetaParams { m, n, r, s } = *params;
    let mut out = Vec::new();
    if m % 2 == 0 {
        out.push(NormalForm::new(0, m / 2));
    }
    if n % 2 == 0 && pow_mod(s, n / 2, m) == 1 % m {
        let half = n / 2;
        if m % 2 == 1 {
            // 2 is invertible: exactly one t.
            let t = if r % 2 == 1 { (m - r) / 2 } else { m - r / 2 };
            out.push(NormalForm::new(half, t % m));
        } else if r % 2 == 0 && mulmod(r / 2, (s + m - 1) % m, m) == 0 {
            out.push(NormalForm::new(half, (m - r) / 2 % m));
            out.push(NormalForm::new(half, (m - r / 2) % m));
        }
    }
    out.sort();
    Ok(out)
}

/// The congruence system for `(a, b) = (y^p x^q, y^u x^v)` to satisfy the
/// defining relators with `a` in place of `x` and `b` in place of `y`.
pub fn pair_congruences(a: NormalForm, b: NormalForm, params: &MetaParams) -> bool {
    let MetaParams { m, n, r, s } = *params;
    let NormalForm { p, q } = a;
    let NormalForm { p: u, q: v } = b;
    let modn = |x: u128| x.is_multiple_of(n as u128);
    if !modn(p as u128 * m as u128)
        || !modn(p as u128 * r as u128)
        || !modn(p as u128 * (s as u128 + n as u128 * m as u128 - 1))
    {
        return false;
    }
    let sp = pow_mod(s, p, m);
    let su = pow_mod(s, u, m);
    if mulmod(q, sigma(sp, m, m), m) != 0 {
        return false;
    }
    let k = ((p as u128 * r as u128 / n as u128) % m as u128) as u64;
    let lhs =
        (mulmod(r, u, m) + mulmod(v, sigma(su, n, m), m) + m - mulmod(q, sigma(sp, r, m), m)) % m;
    if lhs != mulmod(r, k, m) {
        return false;
    }
    let s1 = (s + m - 1) % m;
    let lhs = (mulmod(v, (1 + m - sp) % m, m) + mulmod(q, (su + m - sigma(sp, s, m)) % m, m)) % m;
    lhs == mulmod(k, s1, m)
}

fn generates(a: NormalForm, b: NormalForm, params: &MetaParams) -> bool {
    let n = params.order() as usize;
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![NormalForm::IDENTITY];
    let mut count = 1;
    while let Some(e) = stack.pop() {
        for g in [a, b] {
            let f = mul_unchecked(e, g, params);
            let i = f.index(params) as usize;
            if !seen[i] {
                seen[i] = true;
                count += 1;
                stack.push(f);
            }
        }
    }
    count == n
}

/// Whether `(a, b)` is a presentation pair: it generates the group and
/// satisfies the congruence system. Generation is always checked directly.
pub fn presentation_pair_test(
    a: NormalForm,
    b: NormalForm,
    params: &MetaParams,
) -> Result<bool, MetaError> {
    params.validate()?;
    Ok(pair_congruences(a, b, params) && generates(a, b, params))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum CoverKind {
    /// `J = 1`: the lift presents `G x C_2`.
    DirectProductClass,
    MetacyclicCover {
        params: MetaParams,
    },
    MetabelianCover {
        order: u64,
    },
    Collapses,
}

impl CoverKind {
    pub fn is_cover(&self) -> bool {
        !matches!(self, CoverKind::Collapses)
    }
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverKind::DirectProductClass => write!(f, "G x C2"),
            CoverKind::MetacyclicCover { params } => write!(f, "metacyclic {params}"),
            CoverKind::MetabelianCover { order } => write!(f, "metabelian of order {order}"),
            CoverKind::Collapses => write!(f, "collapses to G"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverVerdict {
    pub j: SignVector,
    pub kind: CoverKind,
    pub justification: &'static str,
}

/// Closed-form decision of what `P_J` presents, for `J = (i^a, i^e, i^t)`
/// attached to the relators `x^m`, `y^n x^-r`, `x^y x^-s`.
pub fn cover_verdict(j: SignVector, params: &MetaParams) -> Result<CoverVerdict, MetaError> {
    params.validate()?;
    if j.len() != 3 {
        return Err(MetaError::SignLength(j.len()));
    }
    let MetaParams { m, n, r, s } = *params;
    let (alpha, eps, tau) = (j.get(0), j.get(1), j.get(2));
    let (kind, justification) = match (alpha, eps, tau) {
        (false, false, false) => (CoverKind::DirectProductClass, "trivial sign vector"),
        (false, true, false) => (
            CoverKind::MetacyclicCover {
                params: MetaParams::normalized(m, 2 * n, 2 * r, s),
            },
            "y^n = x^r i with i central of order 2 gives y of order dividing 2n",
        ),
        (false, _, true) => {
            if m % 2 == 0 && n % 2 == 0 && r % 2 == 0 {
                (
                    CoverKind::MetabelianCover { order: 2 * m * n },
                    "m, n, r all even",
                )
            } else {
                (
                    CoverKind::Collapses,
                    "x^y = x^s i forces i = 1 unless m, n, r are all even",
                )
            }
        }
        (true, _, _) => {
            let m2 = 2 * m;
            let r2 = r + if eps { m } else { 0 };
            let s2 = s + if tau { m } else { 0 };
            let lifted = MetaParams::new(m2, n, r2, s2);
            if lifted.is_valid() {
                (
                    CoverKind::MetacyclicCover { params: lifted },
                    "x has order 2m and the lifted parameters are consistent mod 2m",
                )
            } else {
                (
                    CoverKind::Collapses,
                    "lifted parameters violate the consistency congruences mod 2m",
                )
            }
        }
    };
    Ok(CoverVerdict {
        j,
        kind,
        justification,
    })
}

/// All eight verdicts, in sign-vector order.
pub fn all_verdicts(params: &MetaParams) -> Result<Vec<CoverVerdict>, MetaError> {
    SignVector::all(3)
        .map(|j| cover_verdict(j, params))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaBound {
    /// Upper bound on the number of non-isomorphic double coverings.
    pub delta: u32,
    /// Row of the parity table (1 through 12).
    pub row: u8,
    /// Representatives of the presentation classes that can still be
    /// double coverings.
    pub surviving: Vec<SignVector>,
}

fn sv(text: &str) -> SignVector {
    text.parse().expect("static sign vector")
}

/// Row (1 to 12) of the parity classification of `(m, n, r, s)`: rows 1-4
/// have `m`, `n` odd, rows 5-8 `m` odd and `n` even (each ordered by the
/// parities of `r` then `s`), rows 9-11 `m` even with `n` or `r` odd, and
/// row 12 `m`, `n`, `r` even. `s` is always odd when `m` is even.
pub fn parity_row(params: &MetaParams) -> Result<u8, MetaError> {
    params.validate()?;
    let MetaParams { m, n, r, s } = *params;
    let bits = (r % 2 == 0) as u8 * 2 + (s % 2 == 0) as u8;
    Ok(match (m % 2 == 0, n % 2 == 0, r % 2 == 0) {
        (false, false, _) => 1 + bits,
        (false, true, _) => 5 + bits,
        (true, false, r_even) => 9 + r_even as u8,
        (true, true, false) => 11,
        (true, true, true) => 12,
    })
}

/// Parity classification of the double coverings with its bound `delta`.
/// When `m`, `n`, `r` are even and `(s^n - 1)/m` is odd the eight classes
/// drop to four, since then no `P_(i,e,t)` is a double covering.
pub fn delta_bound(params: &MetaParams) -> Result<DeltaBound, MetaError> {
    let row = parity_row(params)?;
    let MetaParams { m, n, s, .. } = *params;
    let (delta, surviving) = match row {
        1..=4 => (1, vec![sv("(1,1,1)")]),
        5..=8 => (2, vec![sv("(1,1,1)"), sv("(1,i,1)")]),
        9..=11 => (2, vec![sv("(1,1,1)"), sv("(i,1,1)"), sv("(i,1,i)")]),
        _ => {
            // Parity of (s^n - 1)/m from s^n mod 2m.
            let quotient_odd = ((pow_mod(s, n, 2 * m) + 2 * m - 1) % (2 * m)) / m == 1;
            if quotient_odd {
                (
                    4,
                    vec![sv("(1,1,1)"), sv("(1,i,1)"), sv("(1,1,i)"), sv("(1,i,i)")],
                )
            } else {
                (8, SignVector::all(3).collect())
            }
        }
    };
    Ok(DeltaBound {
        delta,
        row,
        surviving,
    })
}

/// Zero-deficiency criterion
/// `gcd(m, r, s-1, (s^n-1)/m, r(s-1)/m, (s^n-1)/(s-1)) = 1`, evaluated
/// exactly; the last entry is `1 + s + ... + s^(n-1)` (so `n` when `s = 1`).
pub fn deficiency_zero_test(params: &MetaParams) -> Result<bool, MetaError> {
    params.validate()?;
    let MetaParams { m, n, r, s } = *params;
    let big = BigUint::from;
    let sn = num_traits::pow(big(s), n as usize);
    let one = BigUint::one();
    let entries = [
        big(m),
        big(r),
        big(s - 1),
        (&sn - &one) / big(m),
        big(r) * big(s - 1) / big(m),
        if s == 1 {
            big(n)
        } else {
            (&sn - &one) / big(s - 1)
        },
    ];
    let g = entries.iter().fold(BigUint::zero(), |acc, e| acc.gcd(e));
    Ok(g.is_one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(v: u64) -> Self {
        if v.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Bound for parameters with `r = m / gcd(m, s-1)`, indexed by the parities
/// of `n`, `r` and `gcd(m, s-1)`.
pub fn table3_delta(n: Parity, r: Parity, g: Parity) -> u32 {
    const DELTA: [u32; 8] = [1, 2, 1, 2, 2, 2, 2, 4];
    let bit = |p| (p == Parity::Even) as usize;
    DELTA[4 * bit(n) + 2 * bit(r) + bit(g)]
}

//! Finite groups given by multiplication tables.
//!
//! Elements are dense ids `0..order`. Every group built by this crate also
//! carries a distinguished generating tuple (the images of the presentation
//! generators it was realized from), which is what lets automorphisms be
//! enumerated as presentation tuples.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Presentation, Word};

pub type Elem = u32;

/// An ordered tuple of group elements, one per presentation generator.
pub type ElementTuple = Vec<Elem>;

/// Groups up to this order are checked exhaustively for associativity.
pub const EXHAUSTIVE_ASSOCIATIVITY: usize = 256;

/// Largest order for which the normal-subgroup lattice is computed.
pub const NORMAL_SUBGROUP_BUDGET: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not {0}x{0}")]
    Shape(usize),
    #[error("table entry {0} is out of range")]
    EntryOutOfRange(u64),
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(Elem),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(Elem, Elem, Elem),
    #[error("generator {0} is not an element")]
    BadGenerator(Elem),
    #[error("the tuple does not generate the group")]
    NotGenerating,
    #[error("the induced map is not a homomorphism (fails at {0} * generator {1})")]
    NotMultiplicative(Elem, usize),
    #[error("the induced map is not bijective")]
    NotBijective,
    #[error("tuple length {found} does not match rank {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("the presentation does not present this group (no presentation tuples)")]
    NotPresented,
    #[error("order {order} exceeds the budget {budget}")]
    Budget { order: usize, budget: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    identity: Elem,
    inverses: Vec<Elem>,
    element_orders: Vec<u32>,
    generators: Vec<Elem>,
}

/// Plain JSON form used for fixtures: `{"order": N, "table": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Elem>,
}

impl FiniteGroup {
    /// Trusted constructor for tables that are associative by construction
    /// (coset tables, metacyclic normal forms). Identity must be a two-sided
    /// identity of the table.
    pub(crate) fn from_parts(
        order: usize,
        table: Vec<Elem>,
        identity: Elem,
        generators: Vec<Elem>,
    ) -> Self {
        debug_assert_eq!(table.len(), order * order);
        let mut inverses = vec![identity; order];
        for a in 0..order {
            let row = &table[a * order..(a + 1) * order];
            inverses[a] = row
                .iter()
                .position(|&e| e == identity)
                .expect("group element without inverse") as Elem;
        }
        let mut g = Self {
            order,
            table,
            identity,
            inverses,
            element_orders: Vec::new(),
            generators,
        };
        g.element_orders = (0..order as Elem).map(|a| g.compute_order(a)).collect();
        g
    }

    /// Validating constructor: checks shape, identity, inverses and
    /// associativity (exhaustive up to [`EXHAUSTIVE_ASSOCIATIVITY`],
    /// `10 N^2` random triples above).
    pub fn from_table(rows: Vec<Vec<Elem>>, generators: Vec<Elem>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(GroupError::Shape(n));
        }
        let table: Vec<Elem> = rows.into_iter().flatten().collect();
        if let Some(&bad) = table.iter().find(|&&e| e as usize >= n) {
            return Err(GroupError::EntryOutOfRange(bad as u64));
        }
        let at = |a: usize, b: usize| table[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| at(e, a) as usize == a && at(a, e) as usize == a))
            .ok_or(GroupError::NoIdentity)? as Elem;
        for a in 0..n {
            let has = (0..n).any(|b| at(a, b) == identity && at(b, a) == identity);
            if !has {
                return Err(GroupError::NoInverse(a as Elem));
            }
        }
        let assoc =
            |a: usize, b: usize, c: usize| at(at(a, b) as usize, c) == at(a, at(b, c) as usize);
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(GroupError::NotAssociative(
                                a as Elem, b as Elem, c as Elem,
                            ));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..10 * n * n {
                let (a, b, c) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !assoc(a, b, c) {
                    return Err(GroupError::NotAssociative(a as Elem, b as Elem, c as Elem));
                }
            }
        }
        if let Some(&g) = generators.iter().find(|&&g| g as usize >= n) {
            return Err(GroupError::BadGenerator(g));
        }
        Ok(Self::from_parts(n, table, identity, generators))
    }

    pub fn from_json(json: &GroupJson) -> Result<Self, GroupError> {
        if json.order != json.table.len() {
            return Err(GroupError::Shape(json.order));
        }
        Self::from_table(json.table.clone(), json.generators.clone())
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order,
            table: (0..self.order)
                .map(|a| self.table[a * self.order..(a + 1) * self.order].to_vec())
                .collect(),
            generators: self.generators.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a as usize]
    }

    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let mut base = if k < 0 { self.inv(a) } else { a };
        let mut exp = k.unsigned_abs() % self.element_order(a) as u64;
        let mut acc = self.identity;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn element_order(&self, a: Elem) -> u32 {
        self.element_orders[a as usize]
    }

    /// Distinguished generator tuple (may be empty for groups read from JSON).
    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn with_generators(mut self, generators: Vec<Elem>) -> Result<Self, GroupError> {
        if let Some(&g) = generators.iter().find(|&&g| g as usize >= self.order) {
            return Err(GroupError::BadGenerator(g));
        }
        self.generators = generators;
        Ok(self)
    }

    fn compute_order(&self, a: Elem) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Generators if they generate, otherwise every element.
    fn generating_set(&self) -> Vec<Elem> {
        if !self.generators.is_empty()
            && self.subgroup_generated(&self.generators).len() == self.order
        {
            self.generators.clone()
        } else {
            self.elements().collect()
        }
    }

    /// Evaluates `w` with generator `k` mapped to `tuple[k]`.
    pub fn eval_word(&self, w: &Word, tuple: &[Elem]) -> Elem {
        w.letters().iter().fold(self.identity, |acc, l| {
            let g = tuple[l.gen];
            self.mul(acc, if l.inverse { self.inv(g) } else { g })
        })
    }

    /// True when every relator of `p` evaluates to the identity at `tuple`.
    pub fn satisfies(&self, p: &Presentation, tuple: &[Elem]) -> bool {
        tuple.len() == p.rank()
            && p.relators()
                .iter()
                .all(|r| self.eval_word(r, tuple) == self.identity)
    }

    /// Closure of `seeds` under multiplication, listed in BFS order from the
    /// identity (right multiplication by seeds, in seed order).
    pub fn subgroup_generated(&self, seeds: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order];
        let mut out = vec![self.identity];
        seen[self.identity as usize] = true;
        let mut head = 0;
        while head < out.len() {
            let a = out[head];
            head += 1;
            for &s in seeds {
                let b = self.mul(a, s);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    out.push(b);
                }
            }
        }
        out
    }

    pub fn generates(&self, tuple: &[Elem]) -> bool {
        self.subgroup_generated(tuple).len() == self.order
    }

    /// Spanning tree of the Cayley graph for right multiplication by `gens`:
    /// `tree[e] = Some((parent, k))` with `e = parent * gens[k]`.
    fn schreier_tree(&self, gens: &[Elem]) -> Vec<Option<(Elem, usize)>> {
        let mut tree = vec![None; self.order];
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(a) = queue.pop_front() {
            for (k, &s) in gens.iter().enumerate() {
                let b = self.mul(a, s);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    tree[b as usize] = Some((a, k));
                    queue.push_back(b);
                }
            }
        }
        tree
    }

    /// A word in `gens` (generator `k` is letter `k`) evaluating to `target`,
    /// or `None` when `target` lies outside the generated subgroup.
    pub fn factorize(&self, gens: &[Elem], target: Elem) -> Option<Word> {
        let tree = self.schreier_tree(gens);
        let mut letters = Vec::new();
        let mut e = target;
        while e != self.identity {
            let (parent, k) = tree[e as usize]?;
            letters.push(k as i32 + 1);
            e = parent;
        }
        letters.reverse();
        Some(Word::from_signed(&letters))
    }

    /// Extends `gens[k] -> images[k]` to a homomorphism into `target`.
    /// `gens` must generate `self`; the map is checked on every
    /// (element, generator) pair.
    pub fn extend_homomorphism(
        &self,
        gens: &[Elem],
        target: &FiniteGroup,
        images: &[Elem],
    ) -> Result<Vec<Elem>, GroupError> {
        if gens.len() != images.len() {
            return Err(GroupError::TupleLength {
                expected: gens.len(),
                found: images.len(),
            });
        }
        let tree = self.schreier_tree(gens);
        let mut map = vec![Elem::MAX; self.order];
        map[self.identity as usize] = target.identity;
        // BFS order guarantees parents are mapped first.
        let mut order: Vec<Elem> = self.subgroup_generated(gens);
        if order.len() != self.order {
            return Err(GroupError::NotGenerating);
        }
        order.retain(|&e| e != self.identity);
        for e in order {
            let (parent, k) = tree[e as usize].expect("reachable");
            map[e as usize] = target.mul(map[parent as usize], images[k]);
        }
        for a in self.elements() {
            for (k, &g) in gens.iter().enumerate() {
                if map[self.mul(a, g) as usize] != target.mul(map[a as usize], images[k]) {
                    return Err(GroupError::NotMultiplicative(a, k));
                }
            }
        }
        Ok(map)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generating_set();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_central(&self, z: Elem) -> bool {
        self.generating_set()
            .iter()
            .all(|&g| self.mul(z, g) == self.mul(g, z))
    }

    /// `Z(G)` in increasing id order.
    pub fn center(&self) -> Vec<Elem> {
        let gens = self.generating_set();
        self.elements()
            .filter(|&z| gens.iter().all(|&g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Central elements of order two.
    pub fn central_involutions(&self) -> Vec<Elem> {
        self.center()
            .into_iter()
            .filter(|&z| self.element_order(z) == 2)
            .collect()
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Elem>> {
        let gens = self.generating_set();
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes: Vec<Vec<Elem>> = Vec::new();
        for a in self.elements() {
            if class_of[a as usize] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut class = vec![a];
            class_of[a as usize] = id;
            let mut head = 0;
            while head < class.len() {
                let b = class[head];
                head += 1;
                for &g in &gens {
                    let c = self.mul(self.mul(self.inv(g), b), g);
                    if class_of[c as usize] == usize::MAX {
                        class_of[c as usize] = id;
                        class.push(c);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Elem]) -> Vec<Elem> {
        let gens = self.generating_set();
        let mut seen = vec![false; self.order];
        let mut orbit = Vec::new();
        for &s in seeds {
            if !seen[s as usize] {
                seen[s as usize] = true;
                orbit.push(s);
            }
        }
        let mut head = 0;
        while head < orbit.len() {
            let b = orbit[head];
            head += 1;
            for &g in &gens {
                let c = self.mul(self.mul(self.inv(g), b), g);
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    orbit.push(c);
                }
            }
        }
        self.subgroup_generated(&orbit)
    }

    /// Commutator subgroup `G'`.
    pub fn derived_subgroup(&self) -> Vec<Elem> {
        let gens = self.generating_set();
        let mut comms = Vec::new();
        for &a in &gens {
            for &b in &gens {
                comms.push(self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b)));
            }
        }
        self.normal_closure(&comms)
    }

    /// Invariants preserved by isomorphisms; used only to rule pairs out.
    pub fn fingerprint(&self) -> Fingerprint {
        let mut orders = BTreeMap::new();
        for &o in &self.element_orders {
            *orders.entry(o).or_insert(0usize) += 1;
        }
        Fingerprint {
            order: self.order,
            element_orders: orders,
            center: self.center().len(),
            derived: self.derived_subgroup().len(),
        }
    }

    /// Internal direct product `self x other`; element `(a, b)` has id
    /// `a * |other| + b`. Generators are those of `self` (paired with the
    /// identity) followed by those of `other`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n1, n2) = (self.order, other.order);
        let n = n1 * n2;
        let mut table = vec![0; n * n];
        for a in 0..n {
            let (a1, a2) = ((a / n2) as Elem, (a % n2) as Elem);
            for b in 0..n {
                let (b1, b2) = ((b / n2) as Elem, (b % n2) as Elem);
                table[a * n + b] = self.mul(a1, b1) * n2 as Elem + other.mul(a2, b2);
            }
        }
        let pair = |a: Elem, b: Elem| a * n2 as Elem + b;
        let gens = self
            .generators
            .iter()
            .map(|&g| pair(g, other.identity))
            .chain(other.generators.iter().map(|&g| pair(self.identity, g)))
            .collect();
        FiniteGroup::from_parts(n, table, pair(self.identity, other.identity), gens)
    }

    /// Cyclic group of order `n` generated by element `1`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n * n).map(|i| ((i / n + i % n) % n) as Elem).collect();
        FiniteGroup::from_parts(n, table, 0, vec![(1 % n) as Elem])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub order: usize,
    pub element_orders: BTreeMap<u32, usize>,
    pub center: usize,
    pub derived: usize,
}

/// A bijective endomorphism, stored as the image of every element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    images: Vec<Elem>,
}

impl Automorphism {
    pub fn identity(g: &FiniteGroup) -> Self {
        Self {
            images: g.elements().collect(),
        }
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.images[a as usize]
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &e)| i as Elem == e)
    }

    /// Full `N^2` check of `phi(ab) = phi(a) phi(b)`.
    pub fn is_multiplicative(&self, g: &FiniteGroup) -> bool {
        g.elements().all(|a| {
            g.elements()
                .all(|b| self.apply(g.mul(a, b)) == g.mul(self.apply(a), self.apply(b)))
        })
    }
}

/// Options for the presentation-tuple search.
#[derive(Clone, Debug, Default)]
pub struct TupleSearch<'a> {
    /// A tuple known to lie in the Aut-orbit being searched (for instance a
    /// known presentation tuple, or the generator images of an isomorphic
    /// realization mapped through an isomorphism). Each coordinate is then
    /// restricted to elements with the same order and centrality.
    pub profile: Option<(&'a FiniteGroup, &'a [Elem])>,
    /// Per-coordinate restriction to a fixed element.
    pub fixed: Vec<(usize, Elem)>,
    /// Stop at the first tuple found.
    pub first_only: bool,
}

/// `S_P`: every generating tuple of `g` at which all relators of `p`
/// vanish, in lexicographic order of element ids.
///
/// When the distinguished generators of `g` already lie in `S_P` they are
/// used as an orbit profile, which prunes candidates by element order.
pub fn presentation_tuples(p: &Presentation, g: &FiniteGroup) -> Vec<ElementTuple> {
    let gens = g.generators();
    let profile =
        (gens.len() == p.rank() && g.satisfies(p, gens) && g.generates(gens)).then_some((g, gens));
    search_tuples(
        p,
        g,
        &TupleSearch {
            profile,
            ..Default::default()
        },
    )
}

/// Tuple search with explicit pruning options; see [`TupleSearch`].
pub fn search_tuples(
    p: &Presentation,
    g: &FiniteGroup,
    opts: &TupleSearch<'_>,
) -> Vec<ElementTuple> {
    let n = p.rank();
    let mut candidates: Vec<Vec<Elem>> = vec![g.elements().collect(); n];
    if let Some((h, base)) = opts.profile {
        let h_center: Vec<bool> = base.iter().map(|&b| h.is_central(b)).collect();
        let g_center: HashSet<Elem> = g.center().into_iter().collect();
        for k in 0..n {
            let want = h.element_order(base[k]);
            candidates[k]
                .retain(|&e| g.element_order(e) == want && g_center.contains(&e) == h_center[k]);
        }
    }
    for &(k, e) in &opts.fixed {
        candidates[k].retain(|&c| c == e);
    }
    // Relators in a single generator filter that coordinate up front.
    let rels: Vec<Vec<(usize, bool)>> = p
        .relators()
        .iter()
        .map(|r| r.letters().iter().map(|l| (l.gen, l.inverse)).collect())
        .collect();
    let gens_of = |r: &Vec<(usize, bool)>| {
        let mut v: Vec<usize> = r.iter().map(|&(g, _)| g).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for (r, word) in rels.iter().zip(p.relators()) {
        let used = gens_of(r);
        if used.len() == 1 {
            let k = used[0];
            let mut t = vec![g.identity(); n];
            candidates[k].retain(|&e| {
                t[k] = e;
                g.eval_word(word, &t) == g.identity()
            });
        }
    }
    if candidates.iter().any(|c| c.is_empty()) {
        return Vec::new();
    }

    // Greedy search order: complete as many relators as early as possible.
    let mut assigned = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let rel_gens: Vec<Vec<usize>> = rels.iter().map(gens_of).collect();
    for _ in 0..n {
        let next = (0..n)
            .filter(|&k| !assigned[k])
            .max_by_key(|&k| {
                let completes = rel_gens
                    .iter()
                    .filter(|gs| gs.contains(&k) && gs.iter().all(|&j| j == k || assigned[j]))
                    .count();
                (
                    completes,
                    std::cmp::Reverse(candidates[k].len()),
                    std::cmp::Reverse(k),
                )
            })
            .unwrap();
        assigned[next] = true;
        order.push(next);
    }
    // checks[d]: relators whose last generator is assigned at depth d,
    // shortest first.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ri, gs) in rel_gens.iter().enumerate() {
        if gs.is_empty() {
            continue;
        }
        let depth = gs
            .iter()
            .map(|&j| order.iter().position(|&o| o == j).unwrap())
            .max()
            .unwrap();
        checks[depth].push(ri);
    }
    for c in checks.iter_mut() {
        c.sort_by_key(|&ri| rels[ri].len());
    }

    let ctx = SearchCtx {
        g,
        rels: &rels,
        order: &order,
        checks: &checks,
        candidates: &candidates,
    };
    let top = &candidates[order[0]];
    let mut found: Vec<ElementTuple> = if opts.first_only {
        top.par_iter()
            .find_map_any(|&e| {
                let mut out = Vec::new();
                ctx.run_from(e, true, &mut out);
                out.pop()
            })
            .into_iter()
            .collect()
    } else {
        top.par_iter()
            .flat_map_iter(|&e| {
                let mut out = Vec::new();
                ctx.run_from(e, false, &mut out);
                out
            })
            .collect()
    };
    found.sort_unstable();
    found
}

struct SearchCtx<'a> {
    g: &'a FiniteGroup,
    rels: &'a [Vec<(usize, bool)>],
    order: &'a [usize],
    checks: &'a [Vec<usize>],
    candidates: &'a [Vec<Elem>],
}

impl SearchCtx<'_> {
    fn eval(&self, r: &[(usize, bool)], t: &[Elem]) -> Elem {
        let g = self.g;
        r.iter().fold(g.identity(), |acc, &(k, inv)| {
            let e = t[k];
            g.mul(acc, if inv { g.inv(e) } else { e })
        })
    }

    fn run_from(&self, first: Elem, first_only: bool, out: &mut Vec<ElementTuple>) {
        let mut t = vec![self.g.identity(); self.order.len()];
        t[self.order[0]] = first;
        if self.passes(0, &t) {
            self.dfs(1, &mut t, first_only, out);
        }
    }

    fn passes(&self, depth: usize, t: &[Elem]) -> bool {
        self.checks[depth]
            .iter()
            .all(|&ri| self.eval(&self.rels[ri], t) == self.g.identity())
    }

    fn dfs(
        &self,
        depth: usize,
        t: &mut Vec<Elem>,
        first_only: bool,
        out: &mut Vec<ElementTuple>,
    ) -> bool {
        if depth == self.order.len() {
            if self.g.generates(t) {
                out.push(t.clone());
                return first_only;
            }
            return false;
        }
        let k = self.order[depth];
        for &e in &self.candidates[k] {
            t[k] = e;
            if self.passes(depth, t) && self.dfs(depth + 1, t, first_only, out) {
                return true;
            }
        }
        false
    }
}

/// `|Aut(G)| = |S_P|` for any presentation `p` of `g`.
pub fn automorphism_count(p: &Presentation, g: &FiniteGroup) -> Result<usize, GroupError> {
    match presentation_tuples(p, g).len() {
        0 => Err(GroupError::NotPresented),
        n => Ok(n),
    }
}

/// The automorphism sending `base[k]` to `image[k]`, built by factoring every
/// element over `base` and re-evaluating at `image`.
pub fn automorphism_from_tuples(
    g: &FiniteGroup,
    base: &[Elem],
    image: &[Elem],
) -> Result<Automorphism, GroupError> {
    let images = g.extend_homomorphism(base, g, image)?;
    let mut hit = vec![false; g.order()];
    for &e in &images {
        if std::mem::replace(&mut hit[e as usize], true) {
            return Err(GroupError::NotBijective);
        }
    }
    Ok(Automorphism { images })
}

/// All automorphisms of `g`, one per presentation tuple of `p`.
pub fn automorphisms(p: &Presentation, g: &FiniteGroup) -> Result<Vec<Automorphism>, GroupError> {
    let tuples = presentation_tuples(p, g);
    let base = tuples.first().ok_or(GroupError::NotPresented)?.clone();
    tuples
        .iter()
        .map(|t| automorphism_from_tuples(g, &base, t))
        .collect()
}

/// Whether every automorphism of `g` fixes `z`. Automorphisms are reached
/// through the presentation tuples of `p`, a presentation of `g`: `z` is
/// written as a word in one tuple and re-evaluated at all others.
pub fn is_characteristic_order2(
    g: &FiniteGroup,
    z: Elem,
    p: &Presentation,
) -> Result<bool, GroupError> {
    let tuples = presentation_tuples(p, g);
    let base = tuples.first().ok_or(GroupError::NotPresented)?;
    let word = g.factorize(base, z).ok_or(GroupError::NotGenerating)?;
    Ok(tuples.iter().all(|t| g.eval_word(&word, t) == z))
}

/// A normal subgroup as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    pub elements: Vec<Elem>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }
}

/// Normal subgroups ordered by decreasing order, with the covering
/// relation of the inclusion lattice labelled by index.
#[derive(Clone, Debug)]
pub struct NormalLattice {
    pub subgroups: Vec<Subgroup>,
    /// `(larger, smaller, index)` for every cover in the inclusion order.
    pub covers: Vec<(usize, usize, usize)>,
}

impl NormalLattice {
    pub fn orders(&self) -> Vec<usize> {
        self.subgroups.iter().map(|s| s.order()).collect()
    }

    /// Orders of the proper nontrivial normal subgroups.
    pub fn proper_nontrivial_orders(&self, group_order: usize) -> Vec<usize> {
        self.orders()
            .into_iter()
            .filter(|&o| o != 1 && o != group_order)
            .collect()
    }

    pub fn position(&self, s: &Subgroup) -> Option<usize> {
        self.subgroups.iter().position(|t| t == s)
    }
}

/// Every normal subgroup of `g`, found by joining conjugacy classes onto
/// already-known normal subgroups starting from the trivial one.
pub fn normal_subgroups(g: &FiniteGroup) -> Result<NormalLattice, GroupError> {
    if g.order() > NORMAL_SUBGROUP_BUDGET {
        return Err(GroupError::Budget {
            order: g.order(),
            budget: NORMAL_SUBGROUP_BUDGET,
        });
    }
    let classes = g.conjugacy_classes();
    let sorted = |mut v: Vec<Elem>| {
        v.sort_unstable();
        Subgroup { elements: v }
    };
    let trivial = sorted(vec![g.identity()]);
    let mut found: Vec<Subgroup> = vec![trivial.clone()];
    let mut seen: HashSet<Subgroup> = HashSet::from([trivial]);
    let mut head = 0;
    while head < found.len() {
        let current = found[head].clone();
        head += 1;
        for class in &classes {
            if current.contains(class[0]) {
                continue;
            }
            let mut seeds = current.elements.clone();
            seeds.extend_from_slice(class);
            let next = sorted(g.subgroup_generated(&seeds));
            if seen.insert(next.clone()) {
                found.push(next);
            }
        }
    }
    found.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.cmp(b)));
    let mut covers = Vec::new();
    for (i, big) in found.iter().enumerate() {
        for (j, small) in found.iter().enumerate() {
            if i == j || small.order() >= big.order() || !small.is_subset_of(big) {
                continue;
            }
            let between = found.iter().any(|mid| {
                mid.order() > small.order()
                    && mid.order() < big.order()
                    && small.is_subset_of(mid)
                    && mid.is_subset_of(big)
            });
            if !between {
                covers.push((i, j, big.order() / small.order()));
            }
        }
    }
    Ok(NormalLattice {
        subgroups: found,
        covers,
    })
}

/// `H ~= G` for `|H| = |G|`, decided by searching one presentation tuple of
/// `p_of_h` (a presentation of `H`) in `g`: an epimorphism between finite
/// groups of equal order is an isomorphism.
pub fn isomorphic_via_presentation(p_of_h: &Presentation, g: &FiniteGroup, order_h: usize) -> bool {
    if order_h != g.order() {
        return false;
    }
    !search_tuples(
        p_of_h,
        g,
        &TupleSearch {
            first_only: true,
            ..Default::default()
        },
    )
    .is_empty()
}

/// Isomorphism test between two realized groups. `h` must carry generators
/// satisfying `p_of_h`; fingerprints rule out most pairs before the search.
pub fn isomorphic(h: &FiniteGroup, p_of_h: &Presentation, g: &FiniteGroup) -> bool {
    if h.order() != g.order() || h.fingerprint() != g.fingerprint() {
        return false;
    }
    let profile = (h.generators().len() == p_of_h.rank()).then_some((h, h.generators()));
    !search_tuples(
        p_of_h,
        g,
        &TupleSearch {
            profile,
            first_only: true,
            ..Default::default()
        },
    )
    .is_empty()
}

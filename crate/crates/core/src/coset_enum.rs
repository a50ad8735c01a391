//! Todd–Coxeter coset enumeration over the trivial subgroup.
//!
//! The closed table is the right regular action of the presented group, so
//! it doubles as the constructor for [`FiniteGroup`].

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::table_group::{Elem, FiniteGroup};
use crate::words::{Presentation, Word};

const UNDEF: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Relator-based definitions with lookahead when space runs out.
    #[default]
    Hlt,
    /// Definition-by-deduction: every new entry is scanned immediately.
    Felsch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumLimits {
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl Default for EnumLimits {
    fn default() -> Self {
        Self {
            max_cosets: 200_000,
            strategy: Strategy::Hlt,
        }
    }
}

impl EnumLimits {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        Self {
            max_cosets,
            ..Self::default()
        }
    }

    pub fn felsch(self) -> Self {
        Self {
            strategy: Strategy::Felsch,
            ..self
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    /// The enumeration did not close within the budget; the order is
    /// unknown at this budget (the group may still be finite).
    #[error("coset limit of {0} exceeded (order unknown at this budget)")]
    CosetLimit(usize),
    #[error("max_cosets must be at least 1")]
    ZeroLimit,
    #[error("enumeration produced an inconsistent table")]
    Inconsistent,
}

/// A closed, standardized coset table: coset 0 is the trivial subgroup and
/// cosets are numbered in BFS order over the columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    cols: usize,
    rows: Vec<u32>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.rows.len() / self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.cols / 2
    }

    /// Image of `coset` under generator `gen` (or its inverse).
    pub fn act(&self, coset: u32, gen: usize, inverse: bool) -> u32 {
        self.rows[coset as usize * self.cols + 2 * gen + inverse as usize]
    }

    pub fn act_word(&self, coset: u32, w: &Word) -> u32 {
        w.letters()
            .iter()
            .fold(coset, |c, l| self.rows[c as usize * self.cols + l.column()])
    }

    /// The permutation of cosets induced by generator `gen`.
    pub fn generator_permutation(&self, gen: usize) -> Vec<u32> {
        (0..self.len() as u32)
            .map(|c| self.act(c, gen, false))
            .collect()
    }

    /// Tab-separated dump: one row per coset, columns `x, X, y, Y, ...`.
    pub fn to_tsv(&self, names: &[String]) -> String {
        let mut out = String::from("coset");
        for name in names {
            let _ = write!(out, "\t{name}\t{name}^-1");
        }
        out.push('\n');
        for c in 0..self.len() {
            let _ = write!(out, "{c}");
            for x in 0..self.cols {
                let _ = write!(out, "\t{}", self.rows[c * self.cols + x]);
            }
            out.push('\n');
        }
        out
    }

    /// The group acting regularly on this table. Element `c` is the group
    /// element carrying coset 0 to coset `c`.
    pub fn to_group(&self) -> FiniteGroup {
        let n = self.len();
        // BFS tree from coset 0; standardization makes coset ids BFS order,
        // so every parent precedes its children.
        let mut tree: Vec<(u32, usize)> = vec![(0, 0); n];
        let mut seen = vec![false; n];
        seen[0] = true;
        for c in 0..n {
            for x in 0..self.cols {
                let d = self.rows[c * self.cols + x] as usize;
                if !seen[d] {
                    seen[d] = true;
                    tree[d] = (c as u32, x);
                }
            }
        }
        let mut table = vec![0 as Elem; n * n];
        for a in 0..n {
            table[a * n] = a as Elem;
        }
        for b in 1..n {
            let (parent, x) = tree[b];
            for a in 0..n {
                let ap = table[a * n + parent as usize] as usize;
                table[a * n + b] = self.rows[ap * self.cols + x];
            }
        }
        let generators = (0..self.rank()).map(|g| self.act(0, g, false)).collect();
        FiniteGroup::from_parts(n, table, 0, generators)
    }
}

/// Realizes `p` as a finite group by enumerating cosets of the trivial
/// subgroup.
pub fn enumerate(p: &Presentation, limits: &EnumLimits) -> Result<FiniteGroup, EnumError> {
    Ok(enumerate_table(p, limits)?.to_group())
}

/// Order of the group presented by `p`, if it closes within `limits`.
pub fn order(p: &Presentation, limits: &EnumLimits) -> Result<usize, EnumError> {
    Ok(enumerate_table(p, limits)?.len())
}

pub fn enumerate_table(p: &Presentation, limits: &EnumLimits) -> Result<CosetTable, EnumError> {
    if limits.max_cosets == 0 {
        return Err(EnumError::ZeroLimit);
    }
    let relators: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| r.cyclically_reduced())
        .filter(|r| !r.is_identity())
        .map(|r| r.letters().iter().map(|l| l.column()).collect())
        .collect();
    let mut e = Enumerator::new(2 * p.rank(), relators, limits.max_cosets);
    match limits.strategy {
        Strategy::Hlt => e.run_hlt()?,
        Strategy::Felsch => e.run_felsch()?,
    }
    e.finish()
}

struct OutOfSpace;

struct Enumerator {
    cols: usize,
    relators: Vec<Vec<usize>>,
    max: usize,
    table: Vec<u32>,
    /// Union-find parent; `parent[c] == c` iff `c` is live.
    parent: Vec<u32>,
    live: usize,
    /// Deduction stack for the Felsch strategy; `None` under HLT.
    deductions: Option<Vec<(u32, usize)>>,
    coincidence_queue: Vec<u32>,
    /// Lowest coset that lost a table entry during coincidence processing.
    reopened: u32,
}

#[inline]
fn inv_col(x: usize) -> usize {
    x ^ 1
}

impl Enumerator {
    fn new(cols: usize, relators: Vec<Vec<usize>>, max: usize) -> Self {
        let mut e = Self {
            cols,
            relators,
            max,
            table: Vec::new(),
            parent: Vec::new(),
            live: 0,
            deductions: None,
            coincidence_queue: Vec::new(),
            reopened: u32::MAX,
        };
        e.push_coset();
        e
    }

    fn defined(&self) -> usize {
        self.parent.len()
    }

    fn push_coset(&mut self) -> u32 {
        let c = self.parent.len() as u32;
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.live += 1;
        c
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn deduce(&mut self, c: u32, x: usize, d: u32) {
        self.set(c, x, d);
        self.set(d, inv_col(x), c);
        if let Some(stack) = self.deductions.as_mut() {
            stack.push((c, x));
        }
    }

    fn define(&mut self, c: u32, x: usize) -> Result<u32, OutOfSpace> {
        if self.defined() >= self.max {
            return Err(OutOfSpace);
        }
        let d = self.push_coset();
        self.deduce(c, x, d);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = c;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill as usize] = keep;
        self.live -= 1;
        self.coincidence_queue.push(kill);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.coincidence_queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.coincidence_queue.len() {
            let dead = self.coincidence_queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(dead, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, inv_col(x), UNDEF);
                self.reopened = self.reopened.min(d);
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let mux = self.get(mu, x);
                if mux != UNDEF {
                    self.merge(nu, mux);
                } else {
                    let nux = self.get(nu, inv_col(x));
                    if nux != UNDEF {
                        self.merge(mu, nux);
                    } else {
                        self.deduce(mu, x, nu);
                    }
                }
            }
        }
    }

    /// Traces `word` from `c` forwards and backwards. Fills the single gap
    /// by deduction or processes a coincidence when the trace closes;
    /// with `fill`, missing entries are defined.
    fn scan(&mut self, c: u32, word: &[usize], fill: bool) -> Result<(), OutOfSpace> {
        let (mut f, mut b) = (c, c);
        let mut i = 0usize;
        let mut j = word.len();
        loop {
            while i < j {
                let next = self.get(f, word[i]);
                if next == UNDEF {
                    break;
                }
                f = next;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let prev = self.get(b, inv_col(word[j - 1]));
                if prev == UNDEF {
                    break;
                }
                b = prev;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.deduce(f, word[i], b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    fn lookahead(&mut self) {
        for c in 0..self.defined() as u32 {
            for r in 0..self.relators.len() {
                if !self.is_live(c) {
                    break;
                }
                let word = std::mem::take(&mut self.relators[r]);
                let _ = self.scan(c, &word, false);
                self.relators[r] = word;
            }
        }
    }

    /// Removes dead cosets preserving the order of live ones. Returns the
    /// new index of the first live coset at or after `pos`.
    fn compact(&mut self, pos: u32) -> u32 {
        let n = self.defined();
        let mut remap = vec![UNDEF; n];
        let mut next = 0u32;
        let mut new_pos = None;
        for c in 0..n as u32 {
            if self.is_live(c) {
                if c >= pos && new_pos.is_none() {
                    new_pos = Some(next);
                }
                remap[c as usize] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.cols);
        for c in 0..n {
            if remap[c] == UNDEF {
                continue;
            }
            for x in 0..self.cols {
                let d = self.table[c * self.cols + x];
                table.push(if d == UNDEF { UNDEF } else { remap[d as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.live = next as usize;
        new_pos.unwrap_or(next)
    }

    fn run_hlt(&mut self) -> Result<(), EnumError> {
        let mut alpha = 0u32;
        while (alpha as usize) < self.defined() {
            if self.process_hlt(alpha).is_err() {
                self.lookahead();
                let before = self.defined();
                alpha = self.compact(alpha);
                if self.defined() == before {
                    return Err(EnumError::CosetLimit(self.max));
                }
                continue;
            }
            alpha += 1;
        }
        Ok(())
    }

    fn process_hlt(&mut self, alpha: u32) -> Result<(), OutOfSpace> {
        for r in 0..self.relators.len() {
            if !self.is_live(alpha) {
                return Ok(());
            }
            let word = std::mem::take(&mut self.relators[r]);
            let res = self.scan(alpha, &word, true);
            self.relators[r] = word;
            res?;
        }
        for x in 0..self.cols {
            if !self.is_live(alpha) {
                return Ok(());
            }
            if self.get(alpha, x) == UNDEF {
                self.define(alpha, x)?;
            }
        }
        Ok(())
    }

    fn run_felsch(&mut self) -> Result<(), EnumError> {
        // rotations[x]: cyclic conjugates of relators and their inverses
        // whose first letter is column x.
        let mut rotations: Vec<Vec<Vec<usize>>> = vec![Vec::new(); self.cols];
        for r in &self.relators {
            let inverse: Vec<usize> = r.iter().rev().map(|&x| inv_col(x)).collect();
            for w in [r, &inverse] {
                for k in 0..w.len() {
                    let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                    if !rotations[rot[0]].contains(&rot) {
                        rotations[rot[0]].push(rot);
                    }
                }
            }
        }
        self.deductions = Some(Vec::new());
        let mut pos = 0u32;
        loop {
            while let Some((c, x)) = self.deductions.as_mut().and_then(|s| s.pop()) {
                if !self.is_live(c) {
                    continue;
                }
                let d = self.get(c, x);
                for rot in &rotations[x] {
                    if !self.is_live(c) {
                        break;
                    }
                    let _ = self.scan(c, rot, false);
                }
                if d != UNDEF && self.is_live(d) {
                    for rot in &rotations[inv_col(x)] {
                        if !self.is_live(d) {
                            break;
                        }
                        let _ = self.scan(d, rot, false);
                    }
                }
            }
            pos = pos.min(self.reopened);
            self.reopened = u32::MAX;
            // First undefined entry of a live coset.
            let mut gap = None;
            let mut c = pos;
            while (c as usize) < self.defined() && gap.is_none() {
                if self.is_live(c) {
                    gap = (0..self.cols)
                        .find(|&x| self.get(c, x) == UNDEF)
                        .map(|x| (c, x));
                }
                if gap.is_none() {
                    c += 1;
                }
            }
            pos = c;
            let Some((c, x)) = gap else {
                return Ok(());
            };
            if self.define(c, x).is_err() {
                let before = self.defined();
                pos = self.compact(pos);
                if self.defined() == before {
                    return Err(EnumError::CosetLimit(self.max));
                }
            }
        }
    }

    /// Compacts, checks closure and relators, and standardizes by BFS.
    fn finish(mut self) -> Result<CosetTable, EnumError> {
        self.compact(0);
        let n = self.defined();
        if self.table.contains(&UNDEF) {
            return Err(EnumError::Inconsistent);
        }
        for c in 0..n as u32 {
            for r in &self.relators {
                let end = r
                    .iter()
                    .fold(c, |d, &x| self.table[d as usize * self.cols + x]);
                if end != c {
                    return Err(EnumError::Inconsistent);
                }
            }
        }
        let mut order = vec![UNDEF; n];
        let mut queue = VecDeque::from([0u32]);
        order[0] = 0;
        let mut next = 1u32;
        let mut bfs = Vec::with_capacity(n);
        while let Some(c) = queue.pop_front() {
            bfs.push(c);
            for x in 0..self.cols {
                let d = self.table[c as usize * self.cols + x];
                if order[d as usize] == UNDEF {
                    order[d as usize] = next;
                    next += 1;
                    queue.push_back(d);
                }
            }
        }
        if bfs.len() != n {
            return Err(EnumError::Inconsistent);
        }
        let mut rows = Vec::with_capacity(n * self.cols);
        for &c in &bfs {
            for x in 0..self.cols {
                rows.push(order[self.table[c as usize * self.cols + x] as usize]);
            }
        }
        Ok(CosetTable {
            cols: self.cols,
            rows,
        })
    }
}

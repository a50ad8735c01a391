//! Free-group words, finite presentations and their text grammar.
//!
//! Words are stored freely reduced. Relators keep the order and form in
//! which they were given: sign lifts are indexed by relator position, so a
//! presentation is a tuple of relators, not a set.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest rank and relator count accepted; parity rows and sign vectors are
/// packed into `u64`.
pub const MAX_WIDTH: usize = 64;

/// One signed generator occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(gen: usize, inverse: bool) -> Self {
        Self { gen, inverse }
    }

    pub const fn inv(self) -> Self {
        Self {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// Column index in a coset table: `2*gen` for the generator, `2*gen+1`
    /// for its inverse.
    pub const fn column(self) -> usize {
        2 * self.gen + self.inverse as usize
    }

    pub const fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word in the free group on generators `0..rank`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(gen: usize) -> Self {
        Self {
            letters: vec![Letter::new(gen, false)],
        }
    }

    /// Builds a word from arbitrary letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    /// Convenience constructor from signed 1-based indices: `3` is `x3`,
    /// `-3` its inverse. Zero entries are ignored.
    pub fn from_signed(indices: &[i32]) -> Self {
        Self::from_letters(
            indices
                .iter()
                .filter(|&&i| i != 0)
                .map(|&i| Letter::new(i.unsigned_abs() as usize - 1, i < 0)),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Self {
        Self::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// `self^k`; negative exponents invert.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Self::from_letters(letters)
    }

    /// `by^-1 * self * by`, written `self^by`.
    pub fn conjugate_by(&self, by: &Word) -> Self {
        by.inverse().mul(self).mul(by)
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &Word, b: &Word) -> Self {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    /// Signed count of occurrences of generator `gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.sign())
            .sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.gen).max()
    }

    /// The cyclically reduced core of the word (same normal closure).
    pub fn cyclically_reduced(&self) -> Self {
        let l = &self.letters;
        let (mut a, mut b) = (0, l.len());
        while b >= a + 2 && l[a] == l[b - 1].inv() {
            a += 1;
            b -= 1;
        }
        Self {
            letters: l[a..b].to_vec(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("a presentation needs at least one generator")]
    NoGenerators,
    #[error("a presentation needs at least one relator")]
    NoRelators,
    #[error("rank {rank} or relator count {relators} exceeds the supported width {MAX_WIDTH}")]
    TooWide { rank: usize, relators: usize },
    #[error("relator {relator} uses generator index {index} but the rank is {rank}")]
    GeneratorOutOfRange {
        relator: usize,
        index: usize,
        rank: usize,
    },
    #[error("generator name `{0}` is repeated or not a valid identifier")]
    BadName(String),
}

/// `<x_1, ..., x_n | r_1, ..., r_m>` with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        if names.is_empty() {
            return Err(PresentationError::NoGenerators);
        }
        if relators.is_empty() {
            return Err(PresentationError::NoRelators);
        }
        if names.len() > MAX_WIDTH || relators.len() > MAX_WIDTH {
            return Err(PresentationError::TooWide {
                rank: names.len(),
                relators: relators.len(),
            });
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) || names[..i].contains(name) {
                return Err(PresentationError::BadName(name.clone()));
            }
        }
        for (k, r) in relators.iter().enumerate() {
            if let Some(index) = r.max_generator().filter(|&g| g >= names.len()) {
                return Err(PresentationError::GeneratorOutOfRange {
                    relator: k,
                    index,
                    rank: names.len(),
                });
            }
        }
        Ok(Self { names, relators })
    }

    /// Generators named `x1..xn`.
    pub fn with_rank(rank: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        Self::new(canonical_names(rank), relators)
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text).presentation()
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Rank minus relator count.
    pub fn deficiency(&self) -> i64 {
        self.rank() as i64 - self.relator_count() as i64
    }

    /// Parses a word over this presentation's generator names.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parse_word(text, &self.names)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(w, &self.names)
    }

    /// Same generators, relators extended by `extra`.
    pub fn with_extra_relators(&self, extra: &[Word]) -> Result<Self, PresentationError> {
        let mut relators = self.relators.clone();
        relators.extend_from_slice(extra);
        Self::new(self.names.clone(), relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {} ; rels: ", self.names.join(", "))?;
        for (k, r) in self.relators.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.format_word(r))?;
        }
        Ok(())
    }
}

pub fn canonical_names(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("x{i}")).collect()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders a word in the presentation grammar, collapsing runs into powers.
pub fn format_word(w: &Word, names: &[String]) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let letters = w.letters();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut run = 1;
        while i + run < letters.len() && letters[i + run] == l {
            run += 1;
        }
        let name = &names[l.gen];
        parts.push(match (run, l.inverse) {
            (1, false) => name.clone(),
            (k, false) => format!("{name}^{k}"),
            (k, true) => format!("{name}^-{k}"),
        });
        i += run;
    }
    parts.join("*")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{name}` at byte {pos}")]
    UnknownGenerator { pos: usize, name: String },
    #[error("invalid presentation: {0}")]
    Presentation(#[from] PresentationError),
}

/// Parses a single word over the given generator names.
///
/// Besides `*`, `^k`, parentheses and uppercase inverses, the parser accepts
/// `[u, v]` for commutators, `u^v` for conjugates and juxtaposition
/// (`abAB`) when every generator name is a single letter.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let mut p = Parser::new(text);
    p.names = names.to_vec();
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            names: Vec::new(),
        }
    }

    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphabetic()) {
            return None;
        }
        while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();
        Some((start, s))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.ident() {
            Some((_, s)) if s == kw => self.expect(b':'),
            _ => Err(self.error(&format!("expected `{kw}:`"))),
        }
    }

    fn presentation(&mut self) -> Result<Presentation, ParseError> {
        self.keyword("gens")?;
        let mut names = Vec::new();
        loop {
            let (_, name) = self
                .ident()
                .ok_or_else(|| self.error("expected a generator name"))?;
            names.push(name);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.expect(b';')?;
        self.names = names.clone();
        self.keyword("rels")?;
        let mut relators = Vec::new();
        loop {
            let lhs = self.word()?;
            let rel = if self.peek() == Some(b'=') {
                self.pos += 1;
                let rhs = self.word()?;
                lhs.mul(&rhs.inverse())
            } else {
                lhs
            };
            relators.push(rel);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.error("trailing input"));
        }
        Ok(Presentation::new(names, relators)?)
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut w = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    w = w.mul(&self.factor()?);
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'(' || c == b'[' || c == b'1' => {
                    w = w.mul(&self.factor()?);
                }
                _ => return Ok(w),
            }
        }
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let mut w = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                    let k = self.integer()?;
                    w = w.pow(k);
                }
                _ => {
                    let by = self.atom()?;
                    w = w.conjugate_by(&by);
                }
            }
        }
        Ok(w)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let neg = match self.src.get(self.pos) {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer exponent"));
        }
        let v: i64 = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(b',')?;
                let b = self.word()?;
                self.expect(b']')?;
                Ok(Word::commutator(&a, &b))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (pos, name) = self.ident().unwrap();
                if let Some(l) = self.lookup(&name) {
                    return Ok(Word::from_letters([l]));
                }
                // Juxtaposed single-letter generators, e.g. `abAbaB`: take
                // one letter so that a following exponent binds to the last.
                self.pos = pos + 1;
                match self.lookup(&(c as char).to_string()) {
                    Some(l) => Ok(Word::from_letters([l])),
                    None => Err(ParseError::UnknownGenerator { pos, name }),
                }
            }
            _ => Err(self.error("expected a generator, `(`, `[` or `1`")),
        }
    }

    fn lookup(&self, name: &str) -> Option<Letter> {
        if let Some(g) = self.names.iter().position(|n| n == name) {
            return Some(Letter::new(g, false));
        }
        // Uppercase spelling of a generator name denotes its inverse.
        self.names
            .iter()
            .position(|n| n.to_ascii_uppercase() == name && n.as_str() != name)
            .map(|g| Letter::new(g, true))
    }
}

/// An element of `C_2^len`: coordinate `k` is `i` when bit `k` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    bits: u64,
    len: usize,
}

impl SignVector {
    pub fn trivial(len: usize) -> Self {
        Self::from_bits(0, len)
    }

    /// `(i, ..., i)`.
    pub fn all_i(len: usize) -> Self {
        Self::from_bits(low_mask(len), len)
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_WIDTH, "sign vector longer than {MAX_WIDTH}");
        Self {
            bits: bits & low_mask(len),
            len,
        }
    }

    pub fn from_signs(signs: &[bool]) -> Self {
        let bits = signs
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &s)| acc | ((s as u64) << k));
        Self::from_bits(bits, signs.len())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// True when coordinate `k` is `i`.
    pub fn get(&self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    /// Coordinatewise product in `C_2^len`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        debug_assert_eq!(self.len, other.len);
        Self::from_bits(self.bits ^ other.bits, self.len)
    }

    /// All `2^len` vectors in increasing order.
    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        let mut v: Vec<_> = (0..1u64 << len).map(|b| Self::from_bits(b, len)).collect();
        v.sort();
        v.into_iter()
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Ord for SignVector {
    /// Lexicographic with the first coordinate most significant and `1 < i`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.cmp(&other.len).then_with(|| {
            let a = self.bits.reverse_bits();
            let b = other.bits.reverse_bits();
            a.cmp(&b)
        })
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for k in 0..self.len {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(if self.get(k) { "i" } else { "1" })?;
        }
        f.write_str(")")
    }
}

impl std::str::FromStr for SignVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| format!("sign vector `{s}` must look like (1,i,1)"))?;
        let signs = inner
            .split(',')
            .map(|c| match c.trim() {
                "1" => Ok(false),
                "i" => Ok(true),
                other => Err(format!("bad sign `{other}` in `{s}`")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if signs.len() > MAX_WIDTH {
            return Err(format!("sign vector `{s}` is too long"));
        }
        Ok(Self::from_signs(&signs))
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent-sum parities of the relators: entry `(k, i)` is the parity of
/// the `i`-th exponent sum of relator `k`.
///
/// As a GF(2)-linear map it sends a central sign assignment `I` of the
/// generators to the signs `R(I)` picked up by the relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl ParityMatrix {
    pub fn of(p: &Presentation) -> Self {
        let cols = p.rank();
        let rows = p
            .relators()
            .iter()
            .map(|r| {
                (0..cols).fold(0u64, |acc, i| {
                    acc | (((r.exponent_sum(i).rem_euclid(2)) as u64) << i)
                })
            })
            .collect();
        Self { rows, cols }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, k: usize, i: usize) -> bool {
        self.rows[k] >> i & 1 == 1
    }

    pub fn row(&self, k: usize) -> u64 {
        self.rows[k]
    }

    /// Relators whose exponent sums are all even (`E_P`).
    pub fn even_relators(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&k| self.rows[k] == 0)
            .collect()
    }

    /// Relators with some odd exponent sum (`O_P`).
    pub fn odd_relators(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&k| self.rows[k] != 0)
            .collect()
    }

    /// `rho(I)`: the relator signs produced by the generator signs `I`.
    pub fn apply(&self, generator_signs: u64) -> SignVector {
        let bits = self.rows.iter().enumerate().fold(0u64, |acc, (k, &row)| {
            acc | (((row & generator_signs).count_ones() as u64 & 1) << k)
        });
        SignVector::from_bits(bits, self.rows.len())
    }

    /// Columns of the matrix as vectors in `C_2^m`; they span `R(C_2^n)`.
    pub fn columns(&self) -> Vec<SignVector> {
        (0..self.cols).map(|i| self.apply(1 << i)).collect()
    }

    /// Reduced echelon basis of the image `R(C_2^n)`, pivoting on the first
    /// (most significant) coordinate of each vector.
    pub fn image_basis(&self) -> Vec<SignVector> {
        let m = self.rows.len();
        let mut basis: Vec<u64> = Vec::new();
        for col in self.columns() {
            let mut v = col.bits();
            for &b in &basis {
                if v >> b.trailing_zeros() & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                let pivot = v.trailing_zeros();
                for b in basis.iter_mut() {
                    if *b >> pivot & 1 == 1 {
                        *b ^= v;
                    }
                }
                basis.push(v);
            }
        }
        basis.sort_by_key(|b| b.trailing_zeros());
        basis
            .into_iter()
            .map(|b| SignVector::from_bits(b, m))
            .collect()
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        self.image_basis().len()
    }

    /// `|Ker rho| = 2^(n - rank)`.
    pub fn kernel_size(&self) -> u64 {
        1u64 << (self.cols - self.rank())
    }
}

/// Degree `d = |O_P|` when the presentation is of simple type.
pub fn simple_type_degree(p: &Presentation) -> Option<usize> {
    let pm = ParityMatrix::of(p);
    let mut used = 0u64;
    let mut d = 0;
    for k in pm.odd_relators() {
        let row = pm.row(k);
        if row.count_ones() != 1 || used & row != 0 {
            return None;
        }
        used |= row;
        d += 1;
    }
    Some(d)
}

/// GF(2) rank of the parity map.
pub fn rho_image_rank(p: &Presentation) -> usize {
    ParityMatrix::of(p).rank()
}

/// Number of presentation classes, `|C_2^m : R(C_2^n)|`.
pub fn class_count(p: &Presentation) -> u64 {
    1u64 << (p.relator_count() - rho_image_rank(p))
}

/// Canonical representative of the class of `signs`: the lexicographically
/// least element of the coset `R(C_2^n) * signs`.
pub fn class_representative_of(p: &Presentation, signs: SignVector) -> SignVector {
    let basis = ParityMatrix::of(p).image_basis();
    reduce_by(&basis, signs)
}

fn reduce_by(basis: &[SignVector], signs: SignVector) -> SignVector {
    let mut v = signs.bits();
    for b in basis {
        if v >> b.bits().trailing_zeros() & 1 == 1 {
            v ^= b.bits();
        }
    }
    SignVector::from_bits(v, signs.len())
}

/// One representative per presentation class, in increasing order.
///
/// Representatives are trivial on the pivot coordinates of the image; for a
/// presentation of simple type those are exactly the odd relators.
pub fn class_representatives(p: &Presentation) -> Vec<SignVector> {
    let m = p.relator_count();
    let basis = ParityMatrix::of(p).image_basis();
    let pivots = basis
        .iter()
        .fold(0u64, |acc, b| acc | 1 << b.bits().trailing_zeros());
    let free: Vec<usize> = (0..m).filter(|k| pivots >> k & 1 == 0).collect();
    let mut reps: Vec<SignVector> = (0..1u64 << free.len())
        .map(|mask| {
            let bits = free
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &k)| acc | ((mask >> j & 1) << k));
            SignVector::from_bits(bits, m)
        })
        .collect();
    reps.sort();
    reps
}

/// All sign vectors in the class of `rep`, in increasing order.
pub fn class_members(p: &Presentation, rep: SignVector) -> Vec<SignVector> {
    let basis = ParityMatrix::of(p).image_basis();
    let mut out: Vec<SignVector> = (0..1u64 << basis.len())
        .map(|mask| {
            basis
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .fold(rep, |acc, (_, b)| acc.mul(*b))
        })
        .collect();
    out.sort();
    out
}

/// Invariant factors of the abelianization `G/G'` computed by Smith normal
/// form of the relator exponent-sum matrix. Trivial factors are dropped and
/// a `0` stands for an infinite cyclic factor.
pub fn abelian_invariants(p: &Presentation) -> Vec<u64> {
    let n = p.rank();
    let mut a: Vec<Vec<i128>> = p
        .relators()
        .iter()
        .map(|r| (0..n).map(|i| r.exponent_sum(i) as i128).collect())
        .collect();
    let diag = smith_diagonal(&mut a, n);
    let mut out: Vec<u64> = diag
        .into_iter()
        .filter(|&d| d != 1)
        .map(|d| d.unsigned_abs() as u64)
        .collect();
    // Columns never reached by a pivot are free factors.
    out.sort_by_key(|&d| if d == 0 { u64::MAX } else { d });
    out
}

/// Returns the `n` diagonal entries of the Smith form (zeros included).
#[allow(clippy::needless_range_loop)]
fn smith_diagonal(a: &mut [Vec<i128>], n: usize) -> Vec<i128> {
    let rows = a.len();
    let mut diag = Vec::with_capacity(n);
    let mut t = 0;
    while t < n {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let pivot = (t..rows)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs());
        let Some((pi, pj)) = pivot else {
            diag.extend(std::iter::repeat_n(0, n - t));
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut done = true;
        let p = a[t][t];
        for i in t + 1..rows {
            let f = a[i][t] / p;
            if f != 0 {
                for j in t..n {
                    a[i][j] -= f * a[t][j];
                }
            }
            done &= a[i][t] == 0;
        }
        for j in t + 1..n {
            let f = a[t][j] / p;
            if f != 0 {
                for row in a.iter_mut() {
                    row[j] -= f * row[t];
                }
            }
            done &= a[t][j] == 0;
        }
        if !done {
            continue;
        }
        // Enforce divisibility of the rest of the block by the pivot.
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| a[i][j] % p != 0);
        if let Some((i, _)) = bad {
            for j in t..n {
                a[t][j] += a[i][j];
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag
}

//! Named presentations shipped with the crate.
//!
//! Families take a parameter in the name: `cyclic:6`, `dihedral:4`,
//! `dicyclic:3`, `psl2:7`. Fixed entries are `A4`, `S4`, `A5`, `B`, and the
//! opt-in `A6` and `PSL(2,8)`.

use crate::words::Presentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub presentation: String,
    pub expected_order: Option<usize>,
    /// Family the entry belongs to.
    pub source: &'static str,
    /// Left out of default listings and runs; opt in with `--slow`.
    pub slow: bool,
}

impl CorpusEntry {
    fn new(
        name: impl Into<String>,
        presentation: impl Into<String>,
        order: usize,
        source: &'static str,
    ) -> Self {
        Self {
            name: name.into(),
            presentation: presentation.into(),
            expected_order: Some(order),
            source,
            slow: false,
        }
    }

    pub fn parse(&self) -> Presentation {
        Presentation::parse(&self.presentation).expect("corpus presentations parse")
    }
}

/// `<x | x^m>`.
pub fn cyclic(m: u32) -> CorpusEntry {
    CorpusEntry::new(
        format!("cyclic:{m}"),
        format!("gens: x ; rels: x^{m}"),
        m as usize,
        "cyclic",
    )
}

/// `<x, y | x^2, y^2, (xy)^m>`, order `2m`.
pub fn dihedral(m: u32) -> CorpusEntry {
    CorpusEntry::new(
        format!("dihedral:{m}"),
        format!("gens: x, y ; rels: x^2, y^2, (x*y)^{m}"),
        2 * m as usize,
        "dihedral",
    )
}

/// `<x, y | x^m y^-2, x x^y>`, order `4m`.
pub fn dicyclic(m: u32) -> CorpusEntry {
    CorpusEntry::new(
        format!("dicyclic:{m}"),
        format!("gens: x, y ; rels: x^{m} y^-2, x x^y"),
        4 * m as usize,
        "dicyclic",
    )
}

/// `<x, y | x^3, y^n, (xy)^2>` for `n = 3, 4, 5`: `A4`, `S4`, `A5`.
pub fn platonic(n: u32) -> Option<CorpusEntry> {
    let (name, order) = match n {
        3 => ("A4", 12),
        4 => ("S4", 24),
        5 => ("A5", 60),
        _ => return None,
    };
    Some(CorpusEntry::new(
        name,
        format!("gens: x, y ; rels: x^3, y^{n}, (x*y)^2"),
        order,
        "platonic",
    ))
}

/// A double cover of `S4` of order 48 with abelianization `C4`.
pub fn group_b() -> CorpusEntry {
    CorpusEntry::new(
        "B",
        "gens: x, y ; rels: x^6, y^4, (x*y)^2 x^3, [x^3, y]",
        48,
        "platonic",
    )
}

/// `<x, y | x^2, (xy)^3, (x y^4 x y^k)^2 y^p>` with `k = (p+1)/2`, a
/// presentation of `PSL(2,p)` for an odd prime `p`.
pub fn psl2(p: u32) -> Option<CorpusEntry> {
    if p < 3 || !is_prime(p) {
        return None;
    }
    let k = p.div_ceil(2);
    let order = (p as usize) * ((p * p - 1) as usize) / 2;
    let mut e = CorpusEntry::new(
        format!("psl2:{p}"),
        format!("gens: x, y ; rels: x^2, (x*y)^3, (x*y^4*x*y^{k})^2 y^{p}"),
        order,
        "projective special linear",
    );
    e.slow = p > 13;
    Some(e)
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

pub fn a6() -> CorpusEntry {
    let mut e = CorpusEntry::new(
        "A6",
        "gens: a, b ; rels: a^4, b^5, abab^4abaBAB",
        360,
        "simple",
    );
    e.slow = true;
    e
}

pub fn psl2_8() -> CorpusEntry {
    let mut e = CorpusEntry::new(
        "PSL(2,8)",
        "gens: a, b ; rels: abAbaB, a^4(b^2ab)^2b",
        504,
        "simple",
    );
    e.slow = true;
    e
}

/// The fixed list shown by `corpus list`, with small family members.
pub fn entries() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    out.extend([4, 5, 6].map(cyclic));
    out.extend([3, 4, 6].map(dihedral));
    out.extend([2, 3, 4].map(dicyclic));
    out.extend((3..=5).filter_map(platonic));
    out.push(group_b());
    out.extend([5, 7, 13].into_iter().filter_map(psl2));
    out.push(a6());
    out.push(psl2_8());
    out
}

/// Resolves a fixed name or a `family:parameter` template.
pub fn lookup(name: &str) -> Option<CorpusEntry> {
    if let Some((family, arg)) = name.split_once(':') {
        let k: u32 = arg.trim().parse().ok().filter(|&k| k >= 1)?;
        return match family.trim() {
            "cyclic" => Some(cyclic(k)),
            "dihedral" => Some(dihedral(k)),
            "dicyclic" => Some(dicyclic(k)),
            "platonic" => platonic(k),
            "psl2" => psl2(k),
            _ => None,
        };
    }
    entries()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_enum::{order, EnumLimits};

    #[test]
    fn fast_entries_have_expected_orders() {
        for e in entries().into_iter().filter(|e| !e.slow) {
            let n = order(&e.parse(), &EnumLimits::default()).unwrap();
            assert_eq!(Some(n), e.expected_order, "{}", e.name);
        }
    }

    #[test]
    fn lookup_templates() {
        assert_eq!(lookup("dihedral:5").unwrap().expected_order, Some(10));
        assert_eq!(lookup("s4").unwrap().name, "S4");
        assert_eq!(lookup("psl2:11").unwrap().expected_order, Some(660));
        assert!(lookup("psl2:9").is_none());
        assert!(lookup("cyclic:0").is_none());
        assert!(lookup("nonsense").is_none());
    }
}

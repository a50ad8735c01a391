//! Double coverings from sign lifts of a presentation.
//!
//! For `P = <X | R>` and `J` in `C_2^m`, the lift
//! `P_J = <X, i | R = J, i^2, [i, X]>` presents either `G` itself or a
//! double covering `G^` of `G`. Lifts are grouped into presentation classes
//! (cosets of the image of the parity map), realized by coset enumeration
//! and compared up to isomorphism.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coset_enum::{enumerate, EnumError, EnumLimits};
use crate::table_group::{
    isomorphic, presentation_tuples, search_tuples, Elem, FiniteGroup, GroupError, TupleSearch,
};
use crate::words::{
    self, abelian_invariants, class_members, class_representatives, ParityMatrix, Presentation,
    SignVector, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoveringError {
    #[error("base group: {0}")]
    Base(EnumError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("sign vector has length {found}, presentation has {expected} relators")]
    SignLength { expected: usize, found: usize },
    #[error("P_{j} has order {order}, neither |G| = {base} nor 2|G|")]
    Dichotomy {
        j: SignVector,
        order: usize,
        base: usize,
    },
    #[error("P_{j} realizes G x C2 although it is not in the class of the trivial sign vector")]
    DirectProductOutsideTrivialClass { j: SignVector },
    #[error("a presentation tuple of P_{j} projects outside S_P")]
    ProjectionOutsideBase { j: SignVector },
    #[error("fibers of the projection S_P^ -> S_P have unequal sizes for P_{j}")]
    FiberSizeMismatch { j: SignVector },
    #[error("strongness of P_{j}: direct computation says {direct}, class count says {by_class}")]
    ClassTheoremDisagreement {
        j: SignVector,
        direct: bool,
        by_class: bool,
    },
    #[error("q for P_{j} is {q}, but |Ker rho| = {shortcut}")]
    QShortcutMismatch {
        j: SignVector,
        q: u64,
        shortcut: u64,
    },
}

/// `P_J`: the base presentation with a new central generator `i` of order
/// two, relator `r_k` replaced by `r_k i^-1` wherever `J_k = i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPresentation {
    base: Presentation,
    j: SignVector,
    lifted: Presentation,
}

/// Name for the central generator that does not clash with `names`.
fn central_name(names: &[String]) -> String {
    std::iter::once("i".to_string())
        .chain((1..).map(|k| format!("i{k}")))
        .find(|c| !names.contains(c))
        .expect("unbounded candidates")
}

pub fn lift_presentation(
    p: &Presentation,
    j: SignVector,
) -> Result<LiftedPresentation, CoveringError> {
    if j.len() != p.relator_count() {
        return Err(CoveringError::SignLength {
            expected: p.relator_count(),
            found: j.len(),
        });
    }
    let n = p.rank();
    let i = Word::generator(n);
    let mut relators: Vec<Word> = p
        .relators()
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if j.get(k) {
                r.mul(&i.inverse())
            } else {
                r.clone()
            }
        })
        .collect();
    relators.push(i.pow(2));
    relators.extend((0..n).map(|k| Word::commutator(&i, &Word::generator(k))));
    let mut names = p.names().to_vec();
    names.push(central_name(&names));
    let lifted = Presentation::new(names, relators).map_err(|_| CoveringError::SignLength {
        expected: words::MAX_WIDTH,
        found: n + 1,
    })?;
    Ok(LiftedPresentation {
        base: p.clone(),
        j,
        lifted,
    })
}

impl LiftedPresentation {
    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn sign(&self) -> SignVector {
        self.j
    }

    /// The full rank `n + 1` presentation.
    pub fn presentation(&self) -> &Presentation {
        &self.lifted
    }

    pub fn central_generator(&self) -> usize {
        self.base.rank()
    }

    /// Compact form listing only `r_k = i` where signed, leaving `i^2` and
    /// the commutators implicit.
    pub fn short_form(&self) -> String {
        let names = self.base.names();
        let i = &self.lifted.names()[self.base.rank()];
        let rels: Vec<String> = self
            .base
            .relators()
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let w = words::format_word(r, names);
                if self.j.get(k) {
                    format!("{w} = {i}")
                } else {
                    w
                }
            })
            .collect();
        format!("<{} | {}>", names.join(", "), rels.join(", "))
    }
}

impl fmt::Display for LiftedPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short_form())
    }
}

/// Strongness status of a realized lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Strongness {
    /// Characteristic kernel and surjective induced map on automorphisms;
    /// `q` is the size of its kernel.
    Strong {
        q: u64,
    },
    NotStrongKernelNotCharacteristic,
    NotStrongNotSurjective,
    /// The lift is not a double covering.
    NotApplicable,
    /// The lift did not close within the coset budget.
    Unknown,
}

impl Strongness {
    pub fn q(&self) -> Option<u64> {
        match self {
            Strongness::Strong { q } => Some(*q),
            _ => None,
        }
    }
}

impl fmt::Display for Strongness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strongness::Strong { q } => write!(f, "{q}-strong"),
            Strongness::NotStrongKernelNotCharacteristic => {
                write!(f, "not strong (kernel not characteristic)")
            }
            Strongness::NotStrongNotSurjective => write!(f, "not strong"),
            Strongness::NotApplicable => write!(f, "collapses"),
            Strongness::Unknown => write!(f, "unknown (coset budget exceeded)"),
        }
    }
}

/// Everything measured on the way to a strongness verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongnessAnalysis {
    pub kernel_characteristic: bool,
    /// `|S_P^|`, which equals `|Aut(G^)|`.
    pub hat_tuples: usize,
    /// `|S_P|`, which equals `|Aut(G)|`.
    pub base_tuples: usize,
    /// Whether every tuple of `S_P^` projects into `S_P`.
    pub projections_in_base: bool,
    /// Size of `b pi^-1 ∩ S_P^` for each `b` in `S_P` (lexicographic order).
    pub fibers: Vec<usize>,
    pub verdict: Strongness,
}

/// The projection `G^ -> G` sending `x_k -> x_k` and `i -> 1`, as an
/// element map. `g` must carry generators satisfying `P`.
pub fn projection(
    lift: &LiftedPresentation,
    g: &FiniteGroup,
    g_hat: &FiniteGroup,
) -> Result<Vec<Elem>, CoveringError> {
    debug_assert_eq!(g_hat.generators().len(), lift.presentation().rank());
    let mut images = g.generators().to_vec();
    images.push(g.identity());
    Ok(g_hat.extend_homomorphism(g_hat.generators(), g, &images)?)
}

/// Decides strongness of the double covering `g_hat` of `g` presented by
/// `lift`, directly from presentation tuples: the kernel `<i>` is
/// characteristic iff every tuple of `S_P^` fixes `i`; the induced map on
/// automorphisms is onto iff every fiber over `S_P` is nonempty, and then
/// `q` is the common fiber size.
pub fn strongness(
    lift: &LiftedPresentation,
    g: &FiniteGroup,
    g_hat: &FiniteGroup,
) -> Result<StrongnessAnalysis, CoveringError> {
    let j = lift.sign();
    let n = lift.base().rank();
    let iota = g_hat.generators()[n];
    let hat = presentation_tuples(lift.presentation(), g_hat);
    let base = presentation_tuples(lift.base(), g);
    let pi = projection(lift, g, g_hat)?;
    let kernel_characteristic = hat.iter().all(|t| t[n] == iota);
    let index: HashMap<&[Elem], usize> = base
        .iter()
        .enumerate()
        .map(|(k, t)| (t.as_slice(), k))
        .collect();
    let mut fibers = vec![0usize; base.len()];
    let mut projections_in_base = true;
    for t in &hat {
        let image: Vec<Elem> = t[..n].iter().map(|&e| pi[e as usize]).collect();
        match index.get(image.as_slice()) {
            Some(&k) => fibers[k] += 1,
            None => projections_in_base = false,
        }
    }
    let verdict = if !kernel_characteristic {
        Strongness::NotStrongKernelNotCharacteristic
    } else {
        if !projections_in_base {
            return Err(CoveringError::ProjectionOutsideBase { j });
        }
        if fibers.contains(&0) {
            Strongness::NotStrongNotSurjective
        } else if fibers.iter().all(|&f| f == fibers[0]) {
            Strongness::Strong {
                q: fibers[0] as u64,
            }
        } else {
            return Err(CoveringError::FiberSizeMismatch { j });
        }
    };
    Ok(StrongnessAnalysis {
        kernel_characteristic,
        hat_tuples: hat.len(),
        base_tuples: base.len(),
        projections_in_base,
        fibers,
        verdict,
    })
}

/// `|Ker rho| = 2^(n - rank)`, the value of `q` for a strong covering
/// presented by some `P_J` with `J != 1`.
pub fn q_shortcut(p: &Presentation) -> u64 {
    ParityMatrix::of(p).kernel_size()
}

/// A realized presentation class.
#[derive(Clone, Debug)]
pub struct CoveringRecord {
    pub class_rep: SignVector,
    pub members: Vec<SignVector>,
    pub lift: LiftedPresentation,
    /// `None` when the lift did not close within the coset budget.
    pub group: Option<FiniteGroup>,
    pub is_double_cover: Option<bool>,
    /// Index into the isomorphism classes of double coverings; `None` for
    /// collapses and unknowns.
    pub iso_class: Option<usize>,
    pub kernel_characteristic: Option<bool>,
    pub strongness: Strongness,
    pub analysis: Option<StrongnessAnalysis>,
    pub abelian_invariants: Vec<u64>,
}

impl CoveringRecord {
    pub fn order(&self) -> Option<usize> {
        self.group.as_ref().map(|g| g.order())
    }

    pub fn q(&self) -> Option<u64> {
        self.strongness.q()
    }

    /// Whether the class contains a nontrivial sign vector, so that the
    /// class-count characterization of strongness applies.
    pub fn has_nontrivial_member(&self) -> bool {
        self.members.iter().any(|j| !j.is_trivial())
    }

    pub fn is_direct_product_class(&self) -> bool {
        self.class_rep.is_trivial()
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub base: Presentation,
    pub group: FiniteGroup,
    pub records: Vec<CoveringRecord>,
}

impl Classification {
    pub fn double_covers(&self) -> impl Iterator<Item = &CoveringRecord> {
        self.records
            .iter()
            .filter(|r| r.is_double_cover == Some(true))
    }

    pub fn iso_class_count(&self) -> usize {
        self.records
            .iter()
            .filter_map(|r| r.iso_class)
            .max()
            .map_or(0, |k| k + 1)
    }

    /// One record per isomorphism class (the first in class order).
    pub fn iso_representatives(&self) -> Vec<&CoveringRecord> {
        (0..self.iso_class_count())
            .map(|k| {
                self.records
                    .iter()
                    .find(|r| r.iso_class == Some(k))
                    .expect("class id in use")
            })
            .collect()
    }

    pub fn record(&self, j: SignVector) -> Option<&CoveringRecord> {
        self.records.iter().find(|r| r.members.contains(&j))
    }

    pub fn has_unknown(&self) -> bool {
        self.records.iter().any(|r| r.group.is_none())
    }
}

/// Whether `record` is the only presentation class realizing its
/// isomorphism type among `records`.
pub fn strongness_by_class_theorem(records: &[CoveringRecord], record: &CoveringRecord) -> bool {
    records
        .iter()
        .filter(|r| r.iso_class.is_some() && r.iso_class == record.iso_class)
        .count()
        == 1
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub limits: EnumLimits,
    /// Compute kernel-characteristic and strongness (the expensive part).
    pub strongness: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            limits: EnumLimits::default(),
            strongness: true,
        }
    }
}

fn realize_class(
    p: &Presentation,
    rep: SignVector,
    base_order: usize,
    limits: &EnumLimits,
) -> Result<CoveringRecord, CoveringError> {
    let lift = lift_presentation(p, rep)?;
    let abelian = abelian_invariants(lift.presentation());
    let group = match enumerate(lift.presentation(), limits) {
        Ok(g) => Some(g),
        Err(EnumError::CosetLimit(_)) => None,
        Err(e) => return Err(CoveringError::Base(e)),
    };
    let is_double_cover = match &group {
        Some(g) if g.order() == 2 * base_order => Some(true),
        Some(g) if g.order() == base_order => Some(false),
        Some(g) => {
            return Err(CoveringError::Dichotomy {
                j: rep,
                order: g.order(),
                base: base_order,
            })
        }
        None => None,
    };
    let strongness = match is_double_cover {
        Some(true) => Strongness::Unknown,
        Some(false) => Strongness::NotApplicable,
        None => Strongness::Unknown,
    };
    Ok(CoveringRecord {
        class_rep: rep,
        members: class_members(p, rep),
        lift,
        group,
        is_double_cover,
        iso_class: None,
        kernel_characteristic: None,
        strongness,
        analysis: None,
        abelian_invariants: abelian,
    })
}

/// One record per presentation class of lifts of `p`, ordered by class
/// representative, with isomorphism classes and strongness filled in.
pub fn classify_coverings(
    p: &Presentation,
    opts: &ClassifyOptions,
) -> Result<Classification, CoveringError> {
    let g = enumerate(p, &opts.limits).map_err(CoveringError::Base)?;
    let reps = class_representatives(p);
    let mut records: Vec<CoveringRecord> = reps
        .par_iter()
        .map(|&rep| realize_class(p, rep, g.order(), &opts.limits))
        .collect::<Result<_, _>>()?;

    assign_iso_classes(&mut records);

    if let Some(direct) = records.iter().find(|r| r.is_direct_product_class()) {
        let class = direct.iso_class;
        if let Some(other) = records
            .iter()
            .find(|r| !r.is_direct_product_class() && class.is_some() && r.iso_class == class)
        {
            return Err(CoveringError::DirectProductOutsideTrivialClass { j: other.class_rep });
        }
    }

    if opts.strongness {
        let analyses: Vec<Option<StrongnessAnalysis>> = records
            .par_iter()
            .map(|r| match (&r.group, r.is_double_cover) {
                (Some(g_hat), Some(true)) => strongness(&r.lift, &g, g_hat).map(Some),
                _ => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        for (r, a) in records.iter_mut().zip(analyses) {
            if let Some(a) = a {
                r.kernel_characteristic = Some(a.kernel_characteristic);
                r.strongness = a.verdict;
                r.analysis = Some(a);
            }
        }
        cross_validate(p, &records)?;
    }
    Ok(Classification {
        base: p.clone(),
        group: g,
        records,
    })
}

fn assign_iso_classes(records: &mut [CoveringRecord]) {
    let fingerprints: Vec<_> = records
        .iter()
        .map(|r| match (&r.group, r.is_double_cover) {
            (Some(g), Some(true)) => Some(g.fingerprint()),
            _ => None,
        })
        .collect();
    let mut reps: Vec<usize> = Vec::new();
    for k in 0..records.len() {
        let Some(fp) = &fingerprints[k] else { continue };
        let g = records[k].group.as_ref().expect("fingerprinted");
        let found = reps.iter().position(|&h| {
            fingerprints[h].as_ref() == Some(fp) && {
                let hr = &records[h];
                isomorphic(
                    hr.group.as_ref().expect("fingerprinted"),
                    hr.lift.presentation(),
                    g,
                )
            }
        });
        records[k].iso_class = Some(match found {
            Some(c) => c,
            None => {
                reps.push(k);
                reps.len() - 1
            }
        });
    }
}

fn cross_validate(p: &Presentation, records: &[CoveringRecord]) -> Result<(), CoveringError> {
    let shortcut = q_shortcut(p);
    for r in records {
        if r.kernel_characteristic != Some(true) || !r.has_nontrivial_member() {
            continue;
        }
        let direct = r.q().is_some();
        let by_class = strongness_by_class_theorem(records, r);
        if direct != by_class {
            return Err(CoveringError::ClassTheoremDisagreement {
                j: r.class_rep,
                direct,
                by_class,
            });
        }
        if let Some(q) = r.q() {
            if q != shortcut {
                return Err(CoveringError::QShortcutMismatch {
                    j: r.class_rep,
                    q,
                    shortcut,
                });
            }
        }
    }
    Ok(())
}

/// The group presented by `P_(i,...,i)`, or `None` when it collapses to `G`.
pub fn binary_of(
    p: &Presentation,
    limits: &EnumLimits,
) -> Result<Option<FiniteGroup>, CoveringError> {
    let g = enumerate(p, limits).map_err(CoveringError::Base)?;
    let lift = lift_presentation(p, SignVector::all_i(p.relator_count()))?;
    let hat = enumerate(lift.presentation(), limits).map_err(CoveringError::Base)?;
    Ok((hat.order() != g.order()).then_some(hat))
}

/// Orders of `P_J` for every `J`, without classing; used to check the
/// `|G|` / `2|G|` dichotomy exhaustively.
pub fn lift_orders(
    p: &Presentation,
    limits: &EnumLimits,
) -> Result<Vec<(SignVector, usize)>, CoveringError> {
    SignVector::all(p.relator_count())
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&j| {
            let lift = lift_presentation(p, j)?;
            let g = enumerate(lift.presentation(), limits).map_err(CoveringError::Base)?;
            Ok((j, g.order()))
        })
        .collect()
}

/// Whether the kernel `<i>` of `G^ -> G` is fixed by every automorphism
/// of `G^`, decided on the presentation tuples of the lift.
pub fn kernel_is_characteristic(lift: &LiftedPresentation, g_hat: &FiniteGroup) -> bool {
    let n = lift.base().rank();
    let iota = g_hat.generators()[n];
    let others: HashSet<Elem> = g_hat
        .central_involutions()
        .into_iter()
        .filter(|&z| z != iota)
        .collect();
    if others.is_empty() {
        return true;
    }
    // A tuple moving i must send it to another central involution.
    others.into_iter().all(|z| {
        search_tuples(
            lift.presentation(),
            g_hat,
            &TupleSearch {
                profile: Some((g_hat, g_hat.generators())),
                fixed: vec![(n, z)],
                first_only: true,
            },
        )
        .is_empty()
    })
}

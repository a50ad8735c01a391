//! JSON, text and Graphviz renderings of a [`Classification`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::covering::{Classification, CoveringRecord, Strongness};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub base: BaseReport,
    pub classes: Vec<ClassReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseReport {
    pub presentation: String,
    pub order: usize,
    pub central_involutions: usize,
    pub presentation_classes: usize,
    pub isomorphism_classes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub class_rep: String,
    pub members: Vec<String>,
    pub lifted: String,
    pub order: Option<usize>,
    pub double_cover: Option<bool>,
    pub iso_class: Option<usize>,
    pub kernel_characteristic: Option<bool>,
    /// `q` when the covering is strong.
    pub strong: Option<u64>,
    pub status: String,
    pub abelian_invariants: Vec<u64>,
    pub central_involutions: Option<usize>,
}

impl ClassReport {
    fn of(r: &CoveringRecord) -> Self {
        Self {
            class_rep: r.class_rep.to_string(),
            members: r.members.iter().map(|j| j.to_string()).collect(),
            lifted: r.lift.short_form(),
            order: r.order(),
            double_cover: r.is_double_cover,
            iso_class: r.iso_class,
            kernel_characteristic: r.kernel_characteristic,
            strong: r.q(),
            status: r.strongness.to_string(),
            abelian_invariants: r.abelian_invariants.clone(),
            central_involutions: r.group.as_ref().map(|g| g.central_involutions().len()),
        }
    }
}

impl Report {
    pub fn of(c: &Classification) -> Self {
        Self {
            base: BaseReport {
                presentation: c.base.to_string(),
                order: c.group.order(),
                central_involutions: c.group.central_involutions().len(),
                presentation_classes: c.records.len(),
                isomorphism_classes: c.iso_class_count(),
            },
            classes: c.records.iter().map(ClassReport::of).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn abelian_text(inv: &[u64]) -> String {
    if inv.is_empty() {
        return "1".into();
    }
    inv.iter()
        .map(|&k| {
            if k == 0 {
                "Z".to_string()
            } else {
                format!("C{k}")
            }
        })
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Human-readable summary, one line per presentation class.
pub fn render_text(c: &Classification) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "base: {}", c.base);
    let _ = writeln!(
        out,
        "order {}, {} central involution(s), {} presentation class(es), {} isomorphism class(es) of double coverings",
        c.group.order(),
        c.group.central_involutions().len(),
        c.records.len(),
        c.iso_class_count()
    );
    for r in &c.records {
        let order = r.order().map_or("?".into(), |o| o.to_string());
        let iso = r.iso_class.map_or("-".into(), |k| format!("#{k}"));
        let _ = writeln!(
            out,
            "[P_{}]  {}  order {}  iso {}  ab {}  {}",
            r.class_rep,
            r.lift.short_form(),
            order,
            iso,
            abelian_text(&r.abelian_invariants),
            r.strongness
        );
    }
    out
}

/// Covering diagram in DOT: the base group at the bottom, one node per
/// isomorphism class of double coverings. Strong edges carry the label
/// `q-`, the others are dashed. Collapsing classes are left out.
pub fn render_dot(c: &Classification) -> String {
    let mut out = String::from("graph coverings {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    let _ = writeln!(out, "  base [label=\"G (order {})\"];", c.group.order());
    for k in 0..c.iso_class_count() {
        let members: Vec<&CoveringRecord> = c
            .records
            .iter()
            .filter(|r| r.iso_class == Some(k))
            .collect();
        let classes: Vec<String> = members
            .iter()
            .map(|r| format!("[P_{}]", r.class_rep))
            .collect();
        let order = members[0].order().unwrap_or(0);
        let _ = writeln!(
            out,
            "  c{k} [label=\"{}\\norder {order}\"];",
            classes.join(" ")
        );
        match members[0].strongness {
            Strongness::Strong { q } => {
                let _ = writeln!(out, "  base -- c{k} [label=\"{q}-\"];");
            }
            _ => {
                let _ = writeln!(out, "  base -- c{k} [style=dashed];");
            }
        }
    }
    out.push_str("}\n");
    out
}

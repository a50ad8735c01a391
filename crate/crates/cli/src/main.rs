use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcover::corpus::{self, CorpusEntry};
use dcover::coset_enum::{self, enumerate_table, EnumError, EnumLimits};
use dcover::covering::{binary_of, classify_coverings, ClassifyOptions, CoveringError};
use dcover::metacyclic::{
    self, all_verdicts, central_involutions_closed_form, deficiency_zero_test, delta_bound,
    parity_row, presentation_pair_test, table3_delta, MetaError, MetaParams, NormalForm, Parity,
};
use dcover::report::{render_dot, render_text, Report};
use dcover::words::{ParseError, Presentation};
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "dcover",
    version,
    about = "Double coverings of finite groups from presentations"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the covering diagram as Graphviz DOT to this file.
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Coset budget per enumeration.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_cosets: usize,
    /// Run the brute-force cross-checks; exit 1 if any fails.
    #[arg(long, global = true)]
    verify: bool,
    /// Allow the slow corpus entries.
    #[arg(long, global = true)]
    slow: bool,
    /// Use Felsch-style enumeration instead of HLT.
    #[arg(long, global = true)]
    felsch: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the double coverings of a presentation.
    ///
    /// INPUT is a file holding `gens: ... ; rels: ...`, a corpus name such
    /// as `S4` or `dihedral:6`, or the presentation text itself.
    Analyze {
        input: String,
        /// Dump the coset table of the base group as TSV.
        #[arg(long, value_name = "FILE")]
        tsv: Option<PathBuf>,
    },
    /// Closed-form analysis of the metacyclic group M(m,n,r,s).
    Metacyclic { m: u64, n: u64, r: u64, s: u64 },
    /// Sweep one of the metacyclic tables (1: central involutions,
    /// 2: double coverings, 3: zero-deficiency family).
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// Largest group order m*n in the sweep.
        #[arg(long, value_name = "N")]
        max_order: Option<u64>,
    },
    /// Realize the binary lift P_(i,...,i).
    Binary { input: String },
    /// Bundled presentations.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
}

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Ok = 0,
    VerifyFailed = 1,
    Input = 2,
    Budget = 3,
    Invalid = 4,
}

struct Failure {
    status: Status,
    message: String,
}

impl Failure {
    fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(Status::Input, format!("parse error: {e}"))
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        let status = if matches!(e, EnumError::CosetLimit(_)) {
            Status::Budget
        } else {
            Status::Invalid
        };
        Failure::new(status, e.to_string())
    }
}

impl From<CoveringError> for Failure {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::Base(inner) => inner.into(),
            other => Failure::new(Status::Invalid, other.to_string()),
        }
    }
}

impl From<MetaError> for Failure {
    fn from(e: MetaError) -> Self {
        Failure::new(Status::Invalid, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<Status, Failure> {
    let mut limits = EnumLimits::with_max_cosets(cli.max_cosets.max(1));
    if cli.felsch {
        limits = limits.felsch();
    }
    match &cli.command {
        Command::Analyze { input, tsv } => analyze(cli, &limits, input, tsv.as_deref()),
        Command::Metacyclic { m, n, r, s } => {
            metacyclic_cmd(cli, &limits, MetaParams::new(*m, *n, *r, *s))
        }
        Command::Table { which, max_order } => table_cmd(cli, &limits, *which, *max_order),
        Command::Binary { input } => binary(cli, &limits, input),
        Command::Corpus {
            action: CorpusAction::List,
        } => {
            corpus_list(cli);
            Ok(Status::Ok)
        }
    }
}

struct Input {
    presentation: Presentation,
    entry: Option<CorpusEntry>,
}

fn resolve(cli: &Cli, input: &str) -> Result<Input, Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(Status::Input, format!("{input}: {e}")))?;
        return Ok(Input {
            presentation: Presentation::parse(text.trim())?,
            entry: None,
        });
    }
    if let Some(entry) = corpus::lookup(input) {
        if entry.slow && !cli.slow {
            return Err(Failure::new(
                Status::Invalid,
                format!("{} is a slow corpus entry; pass --slow", entry.name),
            ));
        }
        return Ok(Input {
            presentation: entry.parse(),
            entry: Some(entry),
        });
    }
    if input.contains("rels:") {
        return Ok(Input {
            presentation: Presentation::parse(input)?,
            entry: None,
        });
    }
    Err(Failure::new(
        Status::Input,
        format!("{input}: no such file or corpus entry"),
    ))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::new(Status::Invalid, format!("{}: {e}", path.display())))
}

fn check_line(out: &mut String, ok: bool, what: impl AsRef<str>) -> bool {
    let _ = writeln!(
        out,
        "{} {}",
        if ok { "PASS" } else { "FAIL" },
        what.as_ref()
    );
    ok
}

fn analyze(
    cli: &Cli,
    limits: &EnumLimits,
    input: &str,
    tsv: Option<&Path>,
) -> Result<Status, Failure> {
    let Input {
        presentation,
        entry,
    } = resolve(cli, input)?;
    if let Some(path) = tsv {
        let table = enumerate_table(&presentation, limits)?;
        write_file(path, &table.to_tsv(presentation.names()))?;
    }
    let c = classify_coverings(
        &presentation,
        &ClassifyOptions {
            limits: *limits,
            strongness: true,
        },
    )?;
    if cli.json {
        println!("{}", Report::of(&c).to_json());
    } else {
        print!("{}", render_text(&c));
    }
    if let Some(path) = &cli.dot {
        write_file(path, &render_dot(&c))?;
    }
    let mut status = if c.has_unknown() {
        Status::Budget
    } else {
        Status::Ok
    };
    if cli.verify {
        let mut out = String::new();
        let mut ok = true;
        if let Some(expected) = entry.as_ref().and_then(|e| e.expected_order) {
            ok &= check_line(
                &mut out,
                c.group.order() == expected,
                format!("base order {} (expected {expected})", c.group.order()),
            );
        }
        let other = if limits.strategy == coset_enum::Strategy::Hlt {
            limits.felsch()
        } else {
            EnumLimits {
                strategy: coset_enum::Strategy::Hlt,
                ..*limits
            }
        };
        for r in &c.records {
            if let Some(order) = r.order() {
                match coset_enum::order(r.lift.presentation(), &other) {
                    Ok(again) => {
                        ok &= check_line(
                            &mut out,
                            again == order,
                            format!("[P_{}] order {order} under both strategies", r.class_rep),
                        );
                    }
                    Err(EnumError::CosetLimit(n)) => {
                        let _ = writeln!(
                            out,
                            "SKIP [P_{}] second strategy exceeded {n} cosets",
                            r.class_rep
                        );
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        eprint!("{out}");
        if !ok {
            status = Status::VerifyFailed;
        }
    }
    Ok(status)
}

fn binary(cli: &Cli, limits: &EnumLimits, input: &str) -> Result<Status, Failure> {
    let Input { presentation, .. } = resolve(cli, input)?;
    let base = coset_enum::order(&presentation, limits)?;
    let hat = binary_of(&presentation, limits)?;
    if cli.json {
        let v = json!({
            "base_order": base,
            "binary_order": hat.as_ref().map(|g| g.order()),
            "collapses": hat.is_none(),
            "central_involutions": hat.as_ref().map(|g| g.central_involutions().len()),
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        match hat {
            Some(g) => println!("binary of order {} over G of order {base}", g.order()),
            None => println!("binary collapses to G (order {base})"),
        }
    }
    Ok(Status::Ok)
}

fn corpus_list(cli: &Cli) {
    let entries: Vec<CorpusEntry> = corpus::entries()
        .into_iter()
        .filter(|e| cli.slow || !e.slow)
        .collect();
    if cli.json {
        let v: Vec<_> = entries
            .iter()
            .map(|e| json!({"name": e.name, "presentation": e.presentation, "order": e.expected_order, "family": e.source, "slow": e.slow}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return;
    }
    for e in entries {
        let order = e.expected_order.map_or("?".into(), |o| o.to_string());
        println!(
            "{:<12} {:>6}  {:<26} {}{}",
            e.name,
            order,
            e.source,
            e.presentation,
            if e.slow { "  (slow)" } else { "" }
        );
    }
    println!("templates: cyclic:<m>, dihedral:<m>, dicyclic:<m>, platonic:<3|4|5>, psl2:<p>");
}

/// Brute-force checks of the closed forms for one parameter set.
fn verify_metacyclic(
    params: &MetaParams,
    limits: &EnumLimits,
    out: &mut String,
) -> Result<bool, Failure> {
    let mut ok = true;
    let g = metacyclic::realize(params)?;
    let closed: Vec<u32> = central_involutions_closed_form(params)?
        .iter()
        .map(|f| f.index(params))
        .collect();
    let mut brute = g.central_involutions();
    let mut closed_sorted = closed.clone();
    closed_sorted.sort_unstable();
    brute.sort_unstable();
    ok &= check_line(
        out,
        closed_sorted == brute,
        "central involutions match the realized group",
    );

    let p = params.presentation();
    let orders = dcover::covering::lift_orders(&p, limits)?;
    for v in all_verdicts(params)? {
        let order = orders
            .iter()
            .find(|(j, _)| *j == v.j)
            .map(|(_, o)| *o)
            .expect("all J");
        let cover = order as u64 == 2 * params.order();
        ok &= check_line(
            out,
            cover == v.kind.is_cover(),
            format!("P_{} has order {order}, verdict {}", v.j, v.kind),
        );
    }

    if params.order() <= 100 {
        let n = params.order() as u32;
        let mut agree = true;
        for a in 0..n {
            for b in 0..n {
                let direct = g.satisfies(&p, &[a, b]) && g.generates(&[a, b]);
                let closed = presentation_pair_test(
                    NormalForm::from_index(a, params),
                    NormalForm::from_index(b, params),
                    params,
                )?;
                agree &= direct == closed;
            }
        }
        ok &= check_line(
            out,
            agree,
            "presentation pair congruences agree with relator evaluation on all pairs",
        );
    }

    let c = classify_coverings(
        &p,
        &ClassifyOptions {
            limits: *limits,
            strongness: false,
        },
    )?;
    let delta = delta_bound(params)?;
    let count = c.iso_class_count() as u32;
    let bound_ok = if delta.row <= 11 {
        count == delta.delta
    } else {
        count <= delta.delta
    };
    ok &= check_line(
        out,
        bound_ok,
        format!(
            "{count} non-isomorphic double coverings, delta {}",
            delta.delta
        ),
    );
    Ok(ok)
}

fn metacyclic_cmd(cli: &Cli, limits: &EnumLimits, params: MetaParams) -> Result<Status, Failure> {
    if let Err(e) = params.validate() {
        if cli.json {
            let (sn, rs) = params.residuals();
            println!(
                "{}",
                json!({"params": params, "valid": false, "sn_residual": sn, "rs_residual": rs})
            );
        }
        return Err(e.into());
    }
    let involutions = central_involutions_closed_form(&params)?;
    let verdicts = all_verdicts(&params)?;
    let delta = delta_bound(&params)?;
    let zero_def = deficiency_zero_test(&params)?;
    if cli.json {
        let v = json!({
            "params": params,
            "valid": true,
            "order": params.order(),
            "central_involutions": involutions.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "verdicts": verdicts,
            "delta": delta,
            "deficiency_zero": zero_def,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{params}: valid, order {}", params.order());
        let inv: Vec<String> = involutions.iter().map(|f| f.to_string()).collect();
        println!(
            "central involutions: {}",
            if inv.is_empty() {
                "none".into()
            } else {
                inv.join(", ")
            }
        );
        for v in &verdicts {
            println!("P_{}: {}", v.j, v.kind);
        }
        let surviving: Vec<String> = delta.surviving.iter().map(|j| format!("[P_{j}]")).collect();
        println!(
            "row {}, delta = {} ({})",
            delta.row,
            delta.delta,
            surviving.join(", ")
        );
        println!("zero deficiency: {}", if zero_def { "yes" } else { "no" });
    }
    if let Some(path) = &cli.dot {
        let c = classify_coverings(
            &params.presentation(),
            &ClassifyOptions {
                limits: *limits,
                strongness: true,
            },
        )?;
        write_file(path, &render_dot(&c))?;
    }
    if cli.verify {
        let mut out = String::new();
        let ok = verify_metacyclic(&params, limits, &mut out)?;
        eprint!("{out}");
        if !ok {
            return Ok(Status::VerifyFailed);
        }
    }
    Ok(Status::Ok)
}

fn table_cmd(
    cli: &Cli,
    limits: &EnumLimits,
    which: u8,
    max_order: Option<u64>,
) -> Result<Status, Failure> {
    let bound = max_order.unwrap_or(match which {
        1 => 200,
        _ => 60,
    });
    let mut params = MetaParams::all_valid(bound);
    if which == 3 {
        params.retain(|p| p.r == p.m / p.m.gcd(&(p.s - 1)));
    }
    let rows: Vec<Result<(String, serde_json::Value, bool), Failure>> = params
        .par_iter()
        .map(|p| table_row(cli.verify, limits, which, p))
        .collect();
    let mut all_ok = true;
    let mut json_rows = Vec::new();
    for row in rows {
        let (line, value, ok) = row?;
        all_ok &= ok;
        if cli.json {
            json_rows.push(value);
        } else {
            println!("{line}");
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json_rows).expect("json")
        );
    } else if cli.verify {
        println!(
            "{} parameter sets, {}",
            params.len(),
            if all_ok { "all PASS" } else { "some FAIL" }
        );
    }
    Ok(if all_ok {
        Status::Ok
    } else {
        Status::VerifyFailed
    })
}

fn table_row(
    verify: bool,
    limits: &EnumLimits,
    which: u8,
    p: &MetaParams,
) -> Result<(String, serde_json::Value, bool), Failure> {
    let row = parity_row(p)?;
    let mut ok = true;
    let (text, mut value) = match which {
        1 => {
            let inv = central_involutions_closed_form(p)?;
            let names: Vec<String> = inv.iter().map(|f| f.to_string()).collect();
            let shown = if names.is_empty() {
                "-".into()
            } else {
                names.join(", ")
            };
            if verify {
                let g = metacyclic::realize(p)?;
                let mut closed: Vec<u32> = inv.iter().map(|f| f.index(p)).collect();
                closed.sort_unstable();
                ok = closed == g.central_involutions();
            }
            (
                format!("#{row:<3} {p:<16} {shown}"),
                json!({"params": p, "row": row, "central_involutions": names}),
            )
        }
        2 => {
            let delta = delta_bound(p)?;
            let mut text = format!("#{row:<3} {p:<16} delta {}", delta.delta);
            let mut value = json!({"params": p, "row": row, "delta": delta.delta});
            if verify {
                let c = classify_coverings(
                    &p.presentation(),
                    &ClassifyOptions {
                        limits: *limits,
                        strongness: false,
                    },
                )?;
                let count = c.iso_class_count() as u32;
                ok = if row <= 11 {
                    count == delta.delta
                } else {
                    count <= delta.delta
                };
                let _ = write!(text, "  coverings {count}");
                value["coverings"] = json!(count);
            }
            (text, value)
        }
        _ => {
            let g = p.m.gcd(&(p.s - 1));
            let delta = table3_delta(Parity::of(p.n), Parity::of(p.r), Parity::of(g));
            let mut text = format!(
                "{p:<16} n {:?} r {:?} (m,s-1) {:?} delta {delta}",
                Parity::of(p.n),
                Parity::of(p.r),
                Parity::of(g)
            );
            let mut value = json!({"params": p, "delta": delta});
            if verify {
                // The count of double coverings does not depend on the
                // presentation, so the three-relator lifts measure it.
                let c = classify_coverings(
                    &p.presentation(),
                    &ClassifyOptions {
                        limits: *limits,
                        strongness: false,
                    },
                )?;
                let count = c.iso_class_count() as u32;
                ok = deficiency_zero_test(p)?
                    && if row <= 11 {
                        count == delta
                    } else {
                        count <= delta
                    };
                let _ = write!(text, "  coverings {count}");
                value["coverings"] = json!(count);
            }
            (text, value)
        }
    };
    let text = if verify {
        value["verified"] = json!(ok);
        format!("{text}  {}", if ok { "PASS" } else { "FAIL" })
    } else {
        text
    };
    Ok((text, value, ok))
}

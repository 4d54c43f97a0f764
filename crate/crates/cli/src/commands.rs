//! One function per subcommand: build the table, pick the plot columns and
//! the stdout summary.

use std::path::Path;

use anyhow::Context;
use dscale_core::atom::{self, AtomSpec, PairMode};
use dscale_core::bound::{bound_check, with_ratio_column, BoundSummary};
use dscale_core::d3::{self, HeliumD3Constants};
use dscale_core::mh::{self, LatticeConfig};
use dscale_core::table::format_sig;
use dscale_core::{Cell, Column, SweepTable};

use crate::cli::{grid, AtomsArgs, BoundCheckArgs, Command, Mh3dArgs, MhInftyArgs};
use crate::Failure;

/// Largest bound constant reported as "bound holds".
pub const BOUND_LIMIT: f64 = 1.0;

pub struct Outcome {
    pub table: SweepTable,
    /// (x, y) column pairs written as two-column plot files.
    pub plots: Vec<(&'static str, &'static str)>,
    pub summary: Vec<String>,
}

pub fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Atoms(a) => atoms(a),
        Command::MhInfty(a) => mh_infty(a),
        Command::Mh3d(a) => mh_3d(a),
        Command::Helium3d(_) => Ok(helium_3d()),
        Command::BoundCheck(a) => bound(a),
    }
}

fn bound_line(label: &str, s: &BoundSummary) -> String {
    let verdict = if s.holds_with(BOUND_LIMIT) { "bound holds" } else { "bound fails" };
    let c = s.constant.map_or("none".to_string(), |c| format_sig(c, 6));
    let mut line = format!("{label}: C {c} over {} stable rows, {verdict}", s.stable_rows);
    if !s.unbounded_rows.is_empty() {
        line.push_str(&format!(", unbounded rows {:?}", s.unbounded_rows));
    }
    line
}

fn atoms(a: &AtomsArgs) -> Result<Outcome, Failure> {
    let table = atom::atoms_sweep(a.electrons.lo..=a.electrons.hi, a.charge_policy(), a.pair_mode.into())?;
    let summary = vec![bound_line("atoms", &bound_check(&table)?)];
    Ok(Outcome {
        table,
        plots: vec![
            ("N", "eps_corr"),
            ("N", "delta_area"),
            ("N", "area_minus_corr"),
            ("N", "inv_eps_corr"),
            ("N", "inv_delta_area"),
            ("N", "eps_corr_over_Z2"),
            ("N", "delta_area_over_Z2"),
        ],
        summary,
    })
}

fn lattice_template(a: &MhInftyArgs) -> Result<LatticeConfig, Failure> {
    let mut c = LatticeConfig::new(1.0)?.with_cutoff(a.cutoff)?;
    c.tail_tol = a.tol;
    c.pair_share = a.pair_share;
    c.validate()?;
    Ok(c)
}

fn mh_infty(a: &MhInftyArgs) -> Result<Outcome, Failure> {
    let template = lattice_template(a)?;
    let rs = grid(a.range, a.step).map_err(Failure::Usage)?;
    let mut table = mh::mh_sweep(&rs, &template)?;
    let threshold = mh::hf_stability_threshold(&template)?;
    table.set_meta("hf_threshold_R", format_sig(threshold, 9));
    let s = bound_check(&table)?;
    Ok(Outcome {
        table,
        plots: vec![
            ("R", "eps_hf"),
            ("R", "eps_corr_total"),
            ("R", "eps_corr"),
            ("R", "abs_eps_corr"),
            ("R", "delta_area"),
        ],
        summary: vec![format!("mh-infty: eps_hf < 0 for R > {}", format_sig(threshold, 6)), bound_line("mh-infty", &s)],
    })
}

fn mh_3d(a: &Mh3dArgs) -> Result<Outcome, Failure> {
    if !(a.floor >= 0.0) {
        return Err(Failure::Usage(format!("--floor must be non-negative, got {}", a.floor)));
    }
    let rs = grid(a.range, a.step).map_err(Failure::Usage)?;
    let mut table = d3::mh_d3_sweep(&rs, a.floor)?;
    let root = d3::mh_d3_stability_threshold()?;
    table.set_meta("stability_rs", format_sig(root, 9));
    table.set_meta("reference_stability_rs", d3::REFERENCE_STABILITY_RS);
    let s = bound_check(&table)?;
    let errors = table.errors().iter().map(|e| e.row).collect::<std::collections::BTreeSet<_>>().len();
    let mut summary = vec![
        format!(
            "mh-3d: eps_total < 0 for r_s > {} (quoted reference {})",
            format_sig(root, 6),
            d3::REFERENCE_STABILITY_RS
        ),
        bound_line("mh-3d", &s),
    ];
    if errors > 0 {
        summary.push(format!("mh-3d: {errors} rows with singular dε/dr_s, see the errors file"));
    }
    Ok(Outcome {
        table,
        plots: vec![
            ("rs", "eps_total"),
            ("rs", "eps_corr"),
            ("R", "eps_corr"),
            ("rs", "delta_area"),
            ("rs", "abs_delta_area"),
        ],
        summary,
    })
}

fn helium_3d() -> Outcome {
    let c = HeliumD3Constants::default();
    let table = d3::helium_d3_table(&c);
    let area = d3::helium_d3_area_difference(&c);
    let s = bound_check(&table).expect("helium table has the bound columns");
    let verdict = if s.holds_with(BOUND_LIMIT) { "bound holds" } else { "bound fails" };
    let summary = vec![format!(
        "helium-3d: delta_area {area:.4} eps_corr {} C {:.3} {verdict}",
        c.eps_corr,
        s.constant.unwrap_or(f64::NAN)
    )];
    Outcome { table, plots: Vec::new(), summary }
}

fn bound(a: &BoundCheckArgs) -> Result<Outcome, Failure> {
    match &a.table {
        Some(path) => bound_file(path),
        None => bound_builtin(),
    }
}

fn bound_file(path: &Path) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read table '{}'", path.display()))
        .map_err(Failure::Io)?;
    let table = SweepTable::from_csv(&text)?;
    let s = bound_check(&table)?;
    let mut out = with_ratio_column(&table, &s)?;
    out.set_meta("source", path.display());
    Ok(Outcome { table: out, plots: Vec::new(), summary: vec![bound_line("bound-check", &s)] })
}

/// Every built-in table at its default settings, one summary row each.
fn bound_builtin() -> Result<Outcome, Failure> {
    let helium = AtomSpec::neutral(2)?;
    let report = atom::atom_report(&helium, PairMode::NTriangles)?;
    let mut helium_inf = SweepTable::new(vec![Column::new("eps_corr", ""), Column::new("delta_area", "")]);
    helium_inf.push_row(vec![Cell::Num(report.eps_corr), Cell::Num(report.delta_area)])?;

    let template = LatticeConfig::new(1.0)?;
    let mh_grid = grid(crate::cli::Span { lo: 1.0, hi: 4.0 }, 0.1).map_err(Failure::Usage)?;
    let d3_grid = grid(crate::cli::Span { lo: 0.7, hi: 1.6 }, 0.05).map_err(Failure::Usage)?;
    let cases: Vec<(&str, SweepTable)> = vec![
        ("helium-infty", helium_inf),
        ("atoms", atom::atoms_sweep(2..=14, atom::ChargePolicy::Neutral, PairMode::NTriangles)?),
        ("mh-infty", mh::mh_sweep(&mh_grid, &template)?),
        ("helium-3d", d3::helium_d3_table(&HeliumD3Constants::default())),
        ("mh-3d", d3::mh_d3_sweep(&d3_grid, d3::DEFAULT_DERIVATIVE_FLOOR)?),
    ];

    let mut table = SweepTable::new(vec![
        Column::new("case", "index"),
        Column::new("constant", "1"),
        Column::new("holds", "flag"),
        Column::new("stable_rows", "rows"),
        Column::new("unbounded_rows", "rows"),
    ]);
    table.set_meta("bound_limit", BOUND_LIMIT);
    let mut summary = Vec::new();
    for (i, (name, t)) in cases.iter().enumerate() {
        let s = bound_check(t)?;
        table.set_meta(format!("case_{i}"), name);
        table.push_row(vec![
            Cell::Num(i as f64),
            s.constant.map_or_else(|| Cell::Error("no stable rows".into()), Cell::Num),
            Cell::flag(s.holds_with(BOUND_LIMIT)),
            Cell::Num(s.stable_rows as f64),
            Cell::Num(s.unbounded_rows.len() as f64),
        ])?;
        summary.push(bound_line(name, &s));
    }
    Ok(Outcome { table, plots: Vec::new(), summary })
}

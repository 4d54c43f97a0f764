//! Per-row check of |ε_corr| ≤ C·|Δarea| and the smallest constant C that
//! satisfies it over the stable rows of a table.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::{Cell, Column, SweepTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    /// |ε_corr| / |Δarea| per row; `None` for error rows, infinite for unbounded rows.
    pub ratios: Vec<Option<f64>>,
    /// Smallest C with |ε_corr| ≤ C·|Δarea| over stable, finite rows.
    pub constant: Option<f64>,
    /// Row holding the maximum ratio.
    pub worst_row: Option<usize>,
    pub stable_rows: usize,
    /// Stable rows with zero area but nonzero correlation energy.
    pub unbounded_rows: Vec<usize>,
}

impl BoundSummary {
    /// True when every stable row satisfies the bound with C ≤ `limit`.
    pub fn holds_with(&self, limit: f64) -> bool {
        self.unbounded_rows.is_empty() && self.constant.is_none_or(|c| c <= limit)
    }
}

/// Ratio |ε_corr|/|Δarea|, zero when ε_corr vanishes.
pub fn bound_ratio(eps_corr: f64, delta_area: f64) -> f64 {
    if eps_corr == 0.0 {
        0.0
    } else if delta_area == 0.0 {
        f64::INFINITY
    } else {
        eps_corr.abs() / delta_area.abs()
    }
}

/// Rows count as stable when the table has no `stable` column or the flag is 1.
pub fn bound_check(table: &SweepTable) -> Result<BoundSummary> {
    let need = |name: &str| {
        table
            .column_index(name)
            .ok_or_else(|| Error::InvalidArgument(format!("table has no '{name}' column")))
    };
    let ec = need("eps_corr")?;
    let da = need("delta_area")?;
    let st = table.column_index("stable");

    let mut summary = BoundSummary { ratios: Vec::new(), constant: None, worst_row: None, stable_rows: 0, unbounded_rows: Vec::new() };
    for (i, row) in table.rows().iter().enumerate() {
        let ratio = match (&row[ec], &row[da]) {
            (Cell::Num(e), Cell::Num(a)) if e.is_finite() && a.is_finite() => Some(bound_ratio(*e, *a)),
            _ => None,
        };
        summary.ratios.push(ratio);
        let stable = st.is_none_or(|j| row[j].as_f64() == Some(1.0));
        let Some(ratio) = ratio.filter(|_| stable) else { continue };
        summary.stable_rows += 1;
        if ratio.is_infinite() {
            summary.unbounded_rows.push(i);
            continue;
        }
        if summary.constant.is_none_or(|c| ratio > c) {
            summary.constant = Some(ratio);
            summary.worst_row = Some(i);
        }
    }
    Ok(summary)
}

/// Copy of `table` with a `bound_ratio` column appended.
pub fn with_ratio_column(table: &SweepTable, summary: &BoundSummary) -> Result<SweepTable> {
    let mut out = table.clone();
    let mut ratios = summary.ratios.iter();
    out.add_column(Column::new("bound_ratio", "1"), |_| match ratios.next().copied().flatten() {
        Some(r) => Cell::Num(r),
        None => Cell::Error("no ratio: error in eps_corr or delta_area".into()),
    })?;
    out.set_meta("bound_constant", summary.constant.map_or("none".to_string(), |c| c.to_string()));
    Ok(out)
}

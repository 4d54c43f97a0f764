//! Three-dimensional comparison models.
//!
//! Helium mean radii and correlation energy, and fitted total and
//! correlation energies of metallic hydrogen as functions of the
//! Wigner–Seitz radius r_s. Helium quantities are in bohr and hartree; the
//! metallic-hydrogen fits are in rydberg per electron.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket, ROOT_TOL};
use crate::table::{Cell, Column, SweepTable};

/// Literature values for helium at D = 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeliumD3Constants {
    /// ⟨r⟩ of the Hartree–Fock wavefunction, bohr.
    pub r_hf: f64,
    /// ⟨r⟩ of the exact wavefunction, bohr.
    pub r_exact: f64,
    /// |correlation energy|, hartree.
    pub eps_corr: f64,
}

impl HeliumD3Constants {
    pub const REFERENCE: HeliumD3Constants = HeliumD3Constants { r_hf: 0.92724, r_exact: 0.92947, eps_corr: 0.04204 };
}

impl Default for HeliumD3Constants {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// Coefficients of the metallic-hydrogen energy fits, rydberg per electron.
///
/// Total energy: a/r_s² − b/r_s − c − d·ln r_s (DFT fit).
/// Correlation energy: −e + f·ln r_s (Neece et al.).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhD3Fit {
    pub kinetic: f64,
    pub coulomb: f64,
    pub constant: f64,
    pub log: f64,
    pub corr_constant: f64,
    pub corr_log: f64,
}

pub const MH_D3_FIT: MhD3Fit = MhD3Fit {
    kinetic: 2.21,
    coulomb: 2.80604,
    constant: 0.13993,
    log: 0.11679,
    corr_constant: 0.1303,
    corr_log: 0.0495,
};

/// Threshold r_s quoted alongside the fits; the fit itself crosses zero
/// near 0.765, see [`mh_d3_stability_threshold`].
pub const REFERENCE_STABILITY_RS: f64 = 0.68;
pub const DEFAULT_DERIVATIVE_FLOOR: f64 = 1e-4;

/// 4π·|r_exact² − r_hf²|, bohr².
pub fn helium_d3_area_difference(constants: &HeliumD3Constants) -> f64 {
    4.0 * PI * (constants.r_exact * constants.r_exact - constants.r_hf * constants.r_hf).abs()
}

fn check_rs(rs: f64) -> Result<()> {
    if rs > 0.0 && rs.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Wigner-Seitz radius must be positive, got {rs}")))
    }
}

/// ε(r_s), rydberg per electron.
pub fn mh_d3_total_energy(rs: f64) -> f64 {
    let f = &MH_D3_FIT;
    f.kinetic / (rs * rs) - f.coulomb / rs - f.constant - f.log * rs.ln()
}

/// dε/dr_s.
pub fn mh_d3_total_energy_derivative(rs: f64) -> f64 {
    let f = &MH_D3_FIT;
    -2.0 * f.kinetic / rs.powi(3) + f.coulomb / (rs * rs) - f.log / rs
}

/// ε_corr(r_s), rydberg per electron.
pub fn mh_d3_correlation_energy(rs: f64) -> f64 {
    -MH_D3_FIT.corr_constant + MH_D3_FIT.corr_log * rs.ln()
}

/// (4π/3)^{1/3}, the simple-cubic R for r_s = 1.
fn cube_to_sphere() -> f64 {
    (4.0 * PI / 3.0).cbrt()
}

pub fn rs_of_r(lattice_constant: f64) -> f64 {
    lattice_constant / cube_to_sphere()
}

pub fn r_of_rs(rs: f64) -> f64 {
    cube_to_sphere() * rs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhD3Report {
    pub rs: f64,
    pub lattice_constant: f64,
    pub eps_total: f64,
    pub eps_corr: f64,
    pub deps_drs: f64,
    /// ε_corr/ε′, the radius change that accounts for the correlation energy.
    pub delta_rs: f64,
    /// 8π·r_s·Δr_s; the sign follows ε_corr/ε′.
    pub delta_area: f64,
    pub stable: bool,
}

pub fn mh_d3_report(rs: f64, derivative_floor: f64) -> Result<MhD3Report> {
    check_rs(rs)?;
    let deps_drs = mh_d3_total_energy_derivative(rs);
    if !(deps_drs.abs() >= derivative_floor) {
        return Err(Error::SingularDerivative { rs, derivative: deps_drs, floor: derivative_floor });
    }
    let eps_total = mh_d3_total_energy(rs);
    let eps_corr = mh_d3_correlation_energy(rs);
    let delta_rs = eps_corr / deps_drs;
    Ok(MhD3Report {
        rs,
        lattice_constant: r_of_rs(rs),
        eps_total,
        eps_corr,
        deps_drs,
        delta_rs,
        delta_area: 8.0 * PI * rs * delta_rs,
        stable: eps_total < 0.0,
    })
}

/// Zero of the fitted total energy in (0.5, 1.5).
pub fn mh_d3_stability_threshold() -> Result<f64> {
    mh_d3_stability_threshold_in(0.5, 1.5)
}

pub fn mh_d3_stability_threshold_in(lo: f64, hi: f64) -> Result<f64> {
    let bracket = Bracket::checked(mh_d3_total_energy, lo, hi).map_err(|_| Error::NoRoot { upper: hi })?;
    find_root(mh_d3_total_energy, bracket, ROOT_TOL)
}

const D3_COLUMNS: &[(&str, &str)] = &[
    ("rs", "bohr"),
    ("R", "bohr"),
    ("eps_total", "Ry"),
    ("eps_corr", "Ry"),
    ("deps_drs", "Ry/bohr"),
    ("delta_rs", "bohr"),
    ("delta_area", "bohr^2"),
    ("abs_delta_area", "bohr^2"),
    ("stable", "flag"),
];

/// One row per r_s; singular rows carry the error in every computed cell.
pub fn mh_d3_sweep(rs_values: &[f64], derivative_floor: f64) -> Result<SweepTable> {
    if let Some(bad) = rs_values.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidArgument(format!("Wigner-Seitz radii must be positive, got {bad}")));
    }
    let mut table = SweepTable::new(D3_COLUMNS.iter().map(|(n, u)| Column::new(*n, *u)).collect());
    table.set_meta("derivative_floor", derivative_floor);
    table.set_meta("energy_unit", "rydberg per electron");
    let rows: Vec<Vec<Cell>> = rs_values
        .par_iter()
        .map(|&rs| match mh_d3_report(rs, derivative_floor) {
            Ok(r) => {
                let mut row: Vec<Cell> = [
                    r.rs,
                    r.lattice_constant,
                    r.eps_total,
                    r.eps_corr,
                    r.deps_drs,
                    r.delta_rs,
                    r.delta_area,
                    r.delta_area.abs(),
                ]
                .map(Cell::Num)
                .into();
                row.push(Cell::flag(r.stable));
                row
            }
            Err(e) => Cell::fill_error(vec![Cell::Num(rs), Cell::Num(r_of_rs(rs))], D3_COLUMNS.len(), &e),
        })
        .collect();
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Helium at D = 3 as a one-row table.
pub fn helium_d3_table(constants: &HeliumD3Constants) -> SweepTable {
    let mut table = SweepTable::new(vec![
        Column::new("r_hf", "bohr"),
        Column::new("r_exact", "bohr"),
        Column::new("eps_corr", "hartree"),
        Column::new("delta_area", "bohr^2"),
        Column::new("stable", "flag"),
    ]);
    table.set_meta("system", "helium D=3");
    table
        .push_row(vec![
            Cell::Num(constants.r_hf),
            Cell::Num(constants.r_exact),
            Cell::Num(constants.eps_corr),
            Cell::Num(helium_d3_area_difference(constants)),
            Cell::flag(true),
        ])
        .expect("row matches columns");
    table
}

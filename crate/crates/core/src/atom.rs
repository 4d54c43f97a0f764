//! N-electron atoms and ions in the D → ∞ limit.
//!
//! At infinite dimension the scaled electrons sit at fixed positions: all at
//! the same distance from the nucleus and all at the same mutual angle. The
//! mean-field (Hartree–Fock) solution has every inter-electronic angle at
//! exactly π/2; the correlated solution opens the angle slightly and is fixed
//! by the smallest positive root ξ of a quartic. All energies and lengths are
//! in scaled large-D units.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{scan_smallest_positive_root, ROOT_TOL, SCAN_GRID};
use crate::table::{Cell, Column, SweepTable};

/// Largest N/Z for which positive ions keep the maximally symmetric solution.
pub const ION_VALIDITY_RATIO: f64 = 0.936;
/// Neutral atoms keep the maximally symmetric solution below this charge.
pub const NEUTRAL_VALIDITY_Z: f64 = 14.0;

/// Electron count and nuclear charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    electrons: u32,
    charge: f64,
}

impl AtomSpec {
    pub fn new(electrons: u32, charge: f64) -> Result<Self> {
        if electrons < 2 {
            return Err(Error::InvalidArgument(format!("need at least two electrons, got {electrons}")));
        }
        if !(charge > 0.0 && charge.is_finite()) {
            return Err(Error::InvalidArgument(format!("nuclear charge must be positive and finite, got {charge}")));
        }
        Ok(Self { electrons, charge })
    }

    /// Neutral atom with Z = N.
    pub fn neutral(electrons: u32) -> Result<Self> {
        Self::new(electrons, electrons as f64)
    }

    pub fn electrons(&self) -> u32 {
        self.electrons
    }

    pub fn n(&self) -> f64 {
        self.electrons as f64
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// λ = 1/Z
    pub fn lambda(&self) -> f64 {
        1.0 / self.charge
    }

    pub fn is_neutral(&self) -> bool {
        self.charge == self.n()
    }

    /// Whether the equidistant, equiangular large-D configuration is the
    /// ground state for this system.
    pub fn in_validity_domain(&self) -> bool {
        self.n() / self.charge <= ION_VALIDITY_RATIO
            || (self.is_neutral() && self.charge < NEUTRAL_VALIDITY_Z)
    }
}

/// Mean-field large-D solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HfAtomSolution {
    pub r_m: f64,
    pub epsilon: f64,
}

/// Correlated ("exact") large-D solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedAtomSolution {
    pub xi: f64,
    pub rho: f64,
    /// Inter-electronic angle in radians.
    pub theta: f64,
    pub epsilon: f64,
}

/// How many electron–nucleus–electron triangles enter the area difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairMode {
    /// Every electron pair: N(N−1)/2 triangles.
    AllPairs,
    /// One triangle per neighbouring pair on a ring of N electrons: N
    /// triangles for N ≥ 3, a single triangle for N = 2.
    #[default]
    NTriangles,
}

impl PairMode {
    pub fn count(self, electrons: u32) -> u64 {
        let n = electrons as u64;
        match self {
            PairMode::AllPairs => n * (n - 1) / 2,
            PairMode::NTriangles if n == 2 => 1,
            PairMode::NTriangles => n,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairMode::AllPairs => "all-pairs",
            PairMode::NTriangles => "n-triangles",
        }
    }
}

impl std::str::FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-pairs" => Ok(PairMode::AllPairs),
            "n-triangles" => Ok(PairMode::NTriangles),
            other => Err(Error::InvalidArgument(format!(
                "unknown pair mode '{other}', expected all-pairs or n-triangles"
            ))),
        }
    }
}

/// Everything the atoms sweep reports for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub spec: AtomSpec,
    pub hf: HfAtomSolution,
    pub corr: CorrelatedAtomSolution,
    pub eps_corr: f64,
    pub delta_area: f64,
    pub pair_count: u64,
}

/// 1 − 2^{−3/2}(N−1)/Z; its inverse is the HF orbit radius.
fn hf_shrink_factor(spec: &AtomSpec) -> f64 {
    1.0 - (spec.n() - 1.0) * spec.lambda() / (2.0 * std::f64::consts::SQRT_2)
}

pub fn hf_solution(spec: &AtomSpec) -> Result<HfAtomSolution> {
    let a = hf_shrink_factor(spec);
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "no maximally symmetric HF solution for N = {}, Z = {} (1 - 2^-3/2 (N-1)/Z = {a})",
            spec.electrons, spec.charge
        )));
    }
    Ok(HfAtomSolution { r_m: 1.0 / a, epsilon: -0.5 * spec.n() * a * a })
}

/// 8NZ²ξ²(2−ξ)² − (N−ξ)³
pub fn quartic_residual(spec: &AtomSpec, xi: f64) -> f64 {
    let (n, z) = (spec.n(), spec.charge);
    8.0 * n * z * z * xi * xi * (2.0 - xi) * (2.0 - xi) - (n - xi).powi(3)
}

/// Smallest positive root of the quartic on (0, N).
pub fn solve_xi(spec: &AtomSpec) -> Result<f64> {
    scan_smallest_positive_root(|x| quartic_residual(spec, x), spec.n(), SCAN_GRID, ROOT_TOL)
}

/// Correlated energy, angle and radius for a given root ξ.
pub fn correlated_from_xi(spec: &AtomSpec, xi: f64) -> CorrelatedAtomSolution {
    let n = spec.n();
    let shrink = (1.0 - xi) / (1.0 - xi / n);
    let epsilon = -0.5 * shrink.powi(3) * (n - n * xi + xi);
    let theta = (xi / (xi - n)).acos();
    let rho = shrink.powi(-2);
    CorrelatedAtomSolution { xi, rho, theta, epsilon }
}

pub fn correlated_solution(spec: &AtomSpec) -> Result<CorrelatedAtomSolution> {
    let xi = solve_xi(spec)?;
    Ok(correlated_from_xi(spec, xi))
}

/// |ε∞ − ε∞^HF|
pub fn correlation_energy(spec: &AtomSpec) -> Result<f64> {
    let hf = hf_solution(spec)?;
    let corr = correlated_solution(spec)?;
    Ok((corr.epsilon - hf.epsilon).abs())
}

/// ½·a·b·sin(angle)
pub fn triangle_area(side_a: f64, side_b: f64, angle: f64) -> f64 {
    0.5 * side_a * side_b * angle.sin()
}

/// Area difference between one HF right triangle and one correlated triangle.
pub fn pair_area_difference(hf: &HfAtomSolution, corr: &CorrelatedAtomSolution) -> f64 {
    (triangle_area(hf.r_m, hf.r_m, FRAC_PI_2) - triangle_area(corr.rho, corr.rho, corr.theta)).abs()
}

pub fn area_difference(spec: &AtomSpec, pair_mode: PairMode) -> Result<f64> {
    let hf = hf_solution(spec)?;
    let corr = correlated_solution(spec)?;
    Ok(pair_mode.count(spec.electrons) as f64 * pair_area_difference(&hf, &corr))
}

pub fn atom_report(spec: &AtomSpec, pair_mode: PairMode) -> Result<AtomReport> {
    let hf = hf_solution(spec)?;
    let corr = correlated_solution(spec)?;
    let pair_count = pair_mode.count(spec.electrons);
    Ok(AtomReport {
        spec: *spec,
        hf,
        corr,
        eps_corr: (corr.epsilon - hf.epsilon).abs(),
        delta_area: pair_count as f64 * pair_area_difference(&hf, &corr),
        pair_count,
    })
}

/// Nuclear charge policy for a sweep over N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChargePolicy {
    Neutral,
    Fixed(f64),
}

const ATOM_COLUMNS: &[(&str, &str)] = &[
    ("N", "electrons"),
    ("Z", "e"),
    ("valid", "flag"),
    ("r_hf", "scaled bohr"),
    ("eps_hf", "scaled hartree"),
    ("xi", "1"),
    ("rho", "scaled bohr"),
    ("theta_rad", "rad"),
    ("eps_exact", "scaled hartree"),
    ("eps_corr", "scaled hartree"),
    ("pair_count", "triangles"),
    ("delta_area", "scaled bohr^2"),
    ("area_minus_corr", "mixed"),
    ("eps_corr_over_Z2", "Z^2 scaled hartree"),
    ("delta_area_over_Z2", "Z^-2 scaled bohr^2"),
    ("inv_eps_corr", "1/scaled hartree"),
    ("inv_delta_area", "1/scaled bohr^2"),
    ("quartic_residual", "1"),
];

/// One row per electron count, ordered by N.
///
/// Systems outside the validity domain are kept with `valid = 0`; systems
/// whose solutions do not exist get error cells.
pub fn atoms_sweep(
    electrons: std::ops::RangeInclusive<u32>,
    charge: ChargePolicy,
    pair_mode: PairMode,
) -> Result<SweepTable> {
    if electrons.is_empty() || *electrons.start() < 2 {
        return Err(Error::InvalidArgument(format!(
            "electron range {}..{} must be non-empty and start at 2 or above",
            electrons.start(),
            electrons.end()
        )));
    }
    let mut table = SweepTable::new(ATOM_COLUMNS.iter().map(|(n, u)| Column::new(*n, *u)).collect());
    table.set_meta("pair_mode", pair_mode.as_str());
    table.set_meta("charge", match charge {
        ChargePolicy::Neutral => "neutral".to_string(),
        ChargePolicy::Fixed(z) => z.to_string(),
    });
    table.set_meta("xi_scan_grid", SCAN_GRID);
    table.set_meta("root_tol", ROOT_TOL);

    let ns: Vec<u32> = electrons.collect();
    let rows: Vec<Vec<Cell>> = ns
        .par_iter()
        .map(|&n| {
            let z = match charge {
                ChargePolicy::Neutral => n as f64,
                ChargePolicy::Fixed(z) => z,
            };
            atom_row(n, z, pair_mode)
        })
        .collect();
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

fn atom_row(n: u32, z: f64, pair_mode: PairMode) -> Vec<Cell> {
    let head = vec![Cell::Num(n as f64), Cell::Num(z)];
    let spec = match AtomSpec::new(n, z) {
        Ok(s) => s,
        Err(e) => return Cell::fill_error(head, ATOM_COLUMNS.len(), &e),
    };
    let mut row = head;
    row.push(Cell::flag(spec.in_validity_domain()));
    match atom_report(&spec, pair_mode) {
        Ok(r) => {
            let z2 = z * z;
            row.extend(
                [
                    r.hf.r_m,
                    r.hf.epsilon,
                    r.corr.xi,
                    r.corr.rho,
                    r.corr.theta,
                    r.corr.epsilon,
                    r.eps_corr,
                    r.pair_count as f64,
                    r.delta_area,
                    r.delta_area - r.eps_corr,
                    r.eps_corr / z2,
                    r.delta_area / z2,
                    1.0 / r.eps_corr,
                    1.0 / r.delta_area,
                    quartic_residual(&spec, r.corr.xi),
                ]
                .map(Cell::Num),
            );
            row
        }
        Err(e) => Cell::fill_error(row, ATOM_COLUMNS.len(), &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn helium() -> AtomSpec {
        AtomSpec::neutral(2).unwrap()
    }

    #[test]
    fn helium_hf() {
        let hf = hf_solution(&helium()).unwrap();
        assert_abs_diff_eq!(hf.r_m, 1.214737, epsilon = 1e-6);
        assert_abs_diff_eq!(hf.epsilon, -0.6776966, epsilon = 1e-7);
    }

    #[test]
    fn hf_non_interacting_limit() {
        let hf = hf_solution(&AtomSpec::new(2, 1e12).unwrap()).unwrap();
        assert_abs_diff_eq!(hf.r_m, 1.0, epsilon = 1e-11);
        assert_abs_diff_eq!(hf.epsilon, -1.0, epsilon = 1e-11);
    }

    #[test]
    fn lithium_hf_closed_form() {
        // A = 1 - 2^{-3/2}·2/3 = 1 - √2/6
        let a = 1.0 - 2f64.sqrt() / 6.0;
        let hf = hf_solution(&AtomSpec::neutral(3).unwrap()).unwrap();
        assert_abs_diff_eq!(hf.r_m, 1.0 / a, epsilon = 1e-14);
        assert_abs_diff_eq!(hf.r_m, 1.3083906, epsilon = 1e-7);
        assert_abs_diff_eq!(hf.epsilon, -0.8762266, epsilon = 1e-7);
    }

    #[test]
    fn hf_rejects_overcharged_ion() {
        // 1 - (N-1)/(2√2 Z) <= 0 for N = 10, Z = 1.
        let err = hf_solution(&AtomSpec::new(10, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn helium_xi_is_quadratic_root() {
        let xi = solve_xi(&helium()).unwrap();
        assert_abs_diff_eq!(xi, (-1.0 + 513f64.sqrt()) / 128.0, epsilon = 1e-13);
        assert!((64.0 * xi * xi + xi - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn xi_vanishes_at_large_charge() {
        let xi = solve_xi(&AtomSpec::new(2, 1000.0).unwrap()).unwrap();
        // Brute-force oracle: dense scan of the quartic residual sign.
        let spec = AtomSpec::new(2, 1000.0).unwrap();
        let mut lo = 0.0;
        let mut hi = 1e-3;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if quartic_residual(&spec, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(xi, lo, epsilon = 1e-15);
        assert_abs_diff_eq!(xi, 3.5352e-4, epsilon = 1e-7);

        let xi_big = solve_xi(&AtomSpec::new(2, 1e6).unwrap()).unwrap();
        assert!(xi_big < 1e-6 && xi_big > 0.0);
    }

    #[test]
    fn helium_correlated() {
        let c = correlated_solution(&helium()).unwrap();
        assert_abs_diff_eq!(c.theta, 1.663309, epsilon = 1e-6);
        assert_abs_diff_eq!(c.rho, 1.213927, epsilon = 1e-6);
        assert_abs_diff_eq!(c.epsilon, -0.68444228, epsilon = 1e-8);
    }

    #[test]
    fn correlated_large_charge_limit() {
        let c = correlated_solution(&AtomSpec::new(2, 1e9).unwrap()).unwrap();
        assert_abs_diff_eq!(c.theta, PI / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.rho, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.epsilon, -1.0, epsilon = 1e-8);
    }

    #[test]
    fn lithium_correlated_against_reference() {
        // Reference values from an independent 50-digit evaluation of the
        // same closed forms (mpmath, quartic root by findroot).
        let c = correlated_solution(&AtomSpec::neutral(3).unwrap()).unwrap();
        assert_abs_diff_eq!(c.xi, 0.177_032_505_463_197, epsilon = 1e-12);
        assert_abs_diff_eq!(c.theta, 1.633_548_996_998_02, epsilon = 1e-11);
        assert_abs_diff_eq!(c.rho, 1.307_386_155_552_75, epsilon = 1e-11);
        assert_abs_diff_eq!(c.epsilon, -0.885_000_163_750_985, epsilon = 1e-11);
    }

    #[test]
    fn correlation_energy_examples() {
        assert_abs_diff_eq!(correlation_energy(&helium()).unwrap(), 0.0067456, epsilon = 1e-7);
        assert!(correlation_energy(&AtomSpec::new(2, 1e9).unwrap()).unwrap() < 1e-8);
        let li = AtomSpec::neutral(3).unwrap();
        let e = correlation_energy(&li).unwrap();
        assert!(e > 0.0 && e < correlated_solution(&li).unwrap().epsilon.abs());
    }

    #[test]
    fn triangle_area_examples() {
        assert_abs_diff_eq!(triangle_area(1.0, 1.0, PI / 2.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(triangle_area(1.214737, 1.214737, PI / 2.0), 0.737_792_99, epsilon = 1e-8);
        assert_abs_diff_eq!(triangle_area(1.213927, 1.213927, 1.663309), 0.733_658_60, epsilon = 1e-8);
    }

    #[test]
    fn area_difference_examples() {
        for mode in [PairMode::AllPairs, PairMode::NTriangles] {
            assert_eq!(mode.count(2), 1);
            assert_abs_diff_eq!(area_difference(&helium(), mode).unwrap(), 0.00413417, epsilon = 1e-8);
        }
        assert!(area_difference(&AtomSpec::new(2, 1e9).unwrap(), PairMode::AllPairs).unwrap() < 1e-8);

        let li = AtomSpec::neutral(3).unwrap();
        let all = area_difference(&li, PairMode::AllPairs).unwrap();
        let ring = area_difference(&li, PairMode::NTriangles).unwrap();
        let hf = hf_solution(&li).unwrap();
        let corr = correlated_solution(&li).unwrap();
        assert_eq!(all, ring);
        assert_abs_diff_eq!(all, 3.0 * pair_area_difference(&hf, &corr), epsilon = 1e-16);

        assert_eq!(PairMode::AllPairs.count(6), 15);
        assert_eq!(PairMode::NTriangles.count(6), 6);
    }

    #[test]
    fn validity_domain() {
        assert!(AtomSpec::neutral(13).unwrap().in_validity_domain());
        assert!(!AtomSpec::neutral(14).unwrap().in_validity_domain());
        assert!(AtomSpec::new(20, 30.0).unwrap().in_validity_domain());
        assert!(!AtomSpec::new(20, 20.5).unwrap().in_validity_domain());
        assert!(AtomSpec::new(1, 1.0).is_err());
        assert!(AtomSpec::new(2, 0.0).is_err());
    }

    #[test]
    fn helium_sweep_row() {
        let t = atoms_sweep(2..=2, ChargePolicy::Neutral, PairMode::default()).unwrap();
        assert_eq!(t.rows().len(), 1);
        let get = |name: &str| t.value(0, name).unwrap();
        assert_abs_diff_eq!(get("r_hf"), 1.214737, epsilon = 1e-6);
        assert_abs_diff_eq!(get("theta_rad"), 1.663309, epsilon = 1e-6);
        assert_abs_diff_eq!(get("eps_corr"), 0.0067456, epsilon = 1e-7);
        assert_abs_diff_eq!(get("delta_area"), 0.00413417, epsilon = 1e-8);
        assert_eq!(get("valid"), 1.0);
    }

    #[test]
    fn neutral_sweep_properties() {
        let t = atoms_sweep(2..=14, ChargePolicy::Neutral, PairMode::NTriangles).unwrap();
        assert_eq!(t.rows().len(), 13);
        let corr = t.column_values("eps_corr").unwrap();
        let area = t.column_values("delta_area").unwrap();
        assert!(corr.windows(2).all(|w| w[1] > w[0]));
        for (c, a) in corr.iter().zip(&area) {
            let ratio = a / c;
            assert!((0.2..=5.0).contains(&ratio), "ratio {ratio}");
        }
        // Z = 14 is kept but flagged.
        assert_eq!(t.value(12, "valid").unwrap(), 0.0);
    }

    #[test]
    fn sweep_records_missing_solutions() {
        let t = atoms_sweep(2..=12, ChargePolicy::Fixed(1.0), PairMode::AllPairs).unwrap();
        assert_eq!(t.rows().len(), 11);
        assert!(t.value(10, "eps_hf").is_none());
        assert!(!t.errors().is_empty());
    }

    proptest! {
        #[test]
        fn hf_energy_radius_identity(n in 2u32..14, z_scale in 1.0f64..50.0) {
            let spec = AtomSpec::new(n, n as f64 * z_scale).unwrap();
            let hf = hf_solution(&spec).unwrap();
            let alt = -spec.n() / (2.0 * hf.r_m * hf.r_m);
            prop_assert!(((hf.epsilon - alt) / alt).abs() <= 1e-10);
        }

        #[test]
        fn correlated_solution_invariants(n in 2u32..14, z_scale in 1.0f64..50.0) {
            let spec = AtomSpec::new(n, n as f64 * z_scale).unwrap();
            let hf = hf_solution(&spec).unwrap();
            let c = correlated_solution(&spec).unwrap();
            prop_assert!(c.xi > 0.0 && c.xi < spec.n());
            prop_assert!(c.theta > PI / 2.0 && c.theta < PI);
            prop_assert!(c.rho > 0.0 && c.epsilon < 0.0);
            prop_assert!(quartic_residual(&spec, c.xi).abs() <= 1e-8);
            prop_assert!(c.epsilon <= hf.epsilon);
            prop_assert!(pair_area_difference(&hf, &c) >= 0.0);
        }

        #[test]
        fn angle_closes_as_charge_grows(n in 2u32..14, z in 2.0f64..100.0, dz in 0.5f64..100.0) {
            let lo = AtomSpec::new(n, n as f64 + z).unwrap();
            let hi = AtomSpec::new(n, n as f64 + z + dz).unwrap();
            let (a, b) = (correlated_solution(&lo).unwrap(), correlated_solution(&hi).unwrap());
            prop_assert!(b.theta < a.theta);
            prop_assert!(b.theta > PI / 2.0);
        }
    }
}

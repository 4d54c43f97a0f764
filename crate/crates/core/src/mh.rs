//! Metallic hydrogen on a simple-cubic lattice in the D → ∞ limit.
//!
//! Energies are per electron in scaled large-D hartree units, lengths in
//! scaled bohr. The mean-field energy is minimized over the orbit radius ρ;
//! correlation then opens the dihedral angles to the first three neighbour
//! shells, parameterized by their cosines (γ100, γ110, γ111), with ρ held at
//! its mean-field value.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, minimize_scalar, minimize_simplex, Bracket, ROOT_TOL, SCALAR_MIN_TOL, SIMPLEX_STEP, SIMPLEX_TOL};
use crate::table::{Cell, Column, SweepTable};

pub const DEFAULT_SHELL_CUTOFF: u32 = 24;
pub const MIN_SHELL_CUTOFF: u32 = 8;
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Share of each pair interaction booked to the reference electron.
pub const DEFAULT_PAIR_SHARE: f64 = 0.5;
/// Orbit-radius search interval for the mean-field minimization.
pub const RHO_INTERVAL: (f64, f64) = (0.1, 10.0);
/// Box for each dihedral cosine during the correlated minimization.
pub const GAMMA_BOX: (f64, f64) = (-0.5, 0.1);
pub const GAMMA_START: [f64; 3] = [-0.01, -0.005, -0.003];
pub const SIMPLEX_MAX_ITER: usize = 20_000;
/// R range scanned for the sign change of the mean-field energy.
pub const THRESHOLD_SCAN: (f64, f64) = (0.5, 5.0);

/// Neighbour shells that carry correlation: multiplicity, σ, and the
/// rhombus-area weight (multiplicity × σ² per cell).
const SHELLS: [(f64, f64, f64); 3] = [(6.0, 1.0, 6.0), (12.0, std::f64::consts::SQRT_2, 24.0), (8.0, 1.732_050_807_568_877_2, 24.0)];

/// Lattice constant and lattice-sum settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Scaled lattice constant R.
    pub lattice_constant: f64,
    /// Largest |l|, |m|, |n| summed directly.
    pub shell_cutoff: u32,
    /// Allowed change of W when the cutoff is doubled.
    pub tail_tol: f64,
    /// Fraction of each pair interaction assigned to the reference electron
    /// in the mean-field Hamiltonian; 1.0 uses the lattice sum unscaled.
    pub pair_share: f64,
}

impl LatticeConfig {
    pub fn new(lattice_constant: f64) -> Result<Self> {
        let c = Self {
            lattice_constant,
            shell_cutoff: DEFAULT_SHELL_CUTOFF,
            tail_tol: DEFAULT_TAIL_TOL,
            pair_share: DEFAULT_PAIR_SHARE,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_lattice_constant(&self, lattice_constant: f64) -> Result<Self> {
        let c = Self { lattice_constant, ..*self };
        c.validate()?;
        Ok(c)
    }

    pub fn with_cutoff(&self, shell_cutoff: u32) -> Result<Self> {
        let c = Self { shell_cutoff, ..*self };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_constant > 0.0 && self.lattice_constant.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lattice constant must be positive and finite, got {}",
                self.lattice_constant
            )));
        }
        if self.shell_cutoff < MIN_SHELL_CUTOFF {
            return Err(Error::InvalidArgument(format!(
                "shell cutoff must be at least {MIN_SHELL_CUTOFF}, got {}",
                self.shell_cutoff
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tail tolerance must be positive, got {}", self.tail_tol)));
        }
        if !(self.pair_share > 0.0 && self.pair_share <= 1.0) {
            return Err(Error::InvalidArgument(format!("pair share must lie in (0, 1], got {}", self.pair_share)));
        }
        Ok(())
    }
}

/// Contribution of one lattice site at distance `sigma_r` = σR:
/// ¾·[1/(σR) − 2/√(σ²R²+ρ²) + 1/√(σ²R²+2ρ²)].
pub fn site_term(rho: f64, sigma_r: f64) -> f64 {
    0.75 * site_kernel(rho * rho, sigma_r)
}

/// The bracket without the ¾, rewritten as a difference of two small
/// differences so that the 1/x parts cancel analytically.
fn site_kernel(rho2: f64, x: f64) -> f64 {
    let s1 = (x * x + rho2).sqrt();
    let s2 = (x * x + 2.0 * rho2).sqrt();
    rho2 / (x * s1 * (x + s1)) - rho2 / (s1 * s2 * (s1 + s2))
}

/// Precomputed pieces of the lattice sum for one cutoff K.
#[derive(Debug)]
struct LatticeTables {
    /// (σ, number of sites with that σ) for 0 < |l|,|m|,|n| ≤ K, largest σ first.
    shells: Vec<(f64, f64)>,
    /// Quadrature nodes `a` and weights for the exterior of the cube.
    tail_nodes: Vec<(f64, f64)>,
}

/// Step of the trapezoid rule in u = ln a.
const TAIL_STEP: f64 = 1.0 / 32.0;
const TAIL_U_MIN: f64 = -60.0;

impl LatticeTables {
    fn build(cutoff: u32) -> Self {
        let k = cutoff as u64;
        let mut counts = vec![0u64; (3 * k * k + 1) as usize];
        for l in 0..=k {
            for m in 0..=k {
                for n in 0..=k {
                    let s2 = l * l + m * m + n * n;
                    if s2 == 0 {
                        continue;
                    }
                    let w = [l, m, n].iter().map(|&c| if c > 0 { 2 } else { 1 }).product::<u64>();
                    counts[s2 as usize] += w;
                }
            }
        }
        let shells = counts
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c > 0)
            .map(|(s2, &c)| ((s2 as f64).sqrt(), c as f64))
            .collect();

        // Exterior sum via 1/√s = π^{-1/2} ∫ t^{-1/2} e^{-st} dt. The site
        // kernel becomes (1 − e^{−ρ²t})² e^{−σ²R²t}, and summing e^{−σ²R²t}
        // over sites outside the cube gives Θ(a)³ − Θ_K(a)³ with a = R²t.
        let kp1 = (k + 1) as f64;
        let u_max = (50.0 / (kp1 * kp1)).ln();
        let count = ((u_max - TAIL_U_MIN) / TAIL_STEP).ceil() as usize;
        let scale = 0.75 / PI.sqrt();
        let tail_nodes = (0..=count)
            .map(|j| {
                let a = (TAIL_U_MIN + j as f64 * TAIL_STEP).exp();
                let (partial, rest) = theta_split(a, cutoff);
                let full = partial + rest;
                let exterior = rest * (full * full + full * partial + partial * partial);
                (a, scale * TAIL_STEP * a.sqrt() * exterior)
            })
            .collect();
        Self { shells, tail_nodes }
    }

    fn direct(&self, rho: f64, r: f64) -> f64 {
        let rho2 = rho * rho;
        0.75 * self.shells.iter().map(|&(sigma, c)| c * site_kernel(rho2, sigma * r)).sum::<f64>()
    }

    fn tail(&self, rho: f64, r: f64) -> f64 {
        let q = (rho / r) * (rho / r);
        self.tail_nodes
            .iter()
            .map(|&(a, w)| {
                let g = (-q * a).exp_m1();
                w * g * g
            })
            .sum::<f64>()
            / r
    }
}

/// Θ(a) = Σ_{n∈ℤ} e^{−an²} split into the part with |n| ≤ K and the rest.
fn theta_split(a: f64, cutoff: u32) -> (f64, f64) {
    let partial = 1.0 + 2.0 * (1..=cutoff).map(|n| (-a * (n * n) as f64).exp()).sum::<f64>();
    let rest = if a >= 1e-2 {
        let mut s = 0.0;
        let mut n = cutoff as f64 + 1.0;
        loop {
            let term = (-a * n * n).exp();
            s += term;
            if term <= 1e-20 * s || term == 0.0 {
                break;
            }
            n += 1.0;
        }
        2.0 * s
    } else {
        // Poisson-resummed form converges in a handful of terms for small a.
        let images: f64 = (1..=6).map(|k| (-(PI * PI) * (k * k) as f64 / a).exp()).sum();
        ((PI / a).sqrt() * (1.0 + 2.0 * images) - partial).max(0.0)
    };
    (partial, rest)
}

fn tables(cutoff: u32) -> Arc<LatticeTables> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<LatticeTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("lattice cache poisoned").get(&cutoff) {
        return Arc::clone(t);
    }
    let built = Arc::new(LatticeTables::build(cutoff));
    let mut guard = cache.lock().expect("lattice cache poisoned");
    Arc::clone(guard.entry(cutoff).or_insert(built))
}

/// The lattice sum W(ρ, R) for one cutoff, without the doubling check.
///
/// `direct` is the plain cube sum over 0 < max(|l|,|m|,|n|) ≤ K; `tail` is
/// the contribution of every site outside the cube, computed from a
/// theta-function integral. Their sum is the infinite-lattice value.
#[derive(Debug, Clone)]
pub struct LatticeSum {
    cutoff: u32,
    tables: Arc<LatticeTables>,
}

impl LatticeSum {
    pub fn new(cutoff: u32) -> Self {
        Self { cutoff, tables: tables(cutoff) }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn direct(&self, rho: f64, r: f64) -> f64 {
        self.tables.direct(rho, r)
    }

    pub fn tail(&self, rho: f64, r: f64) -> f64 {
        self.tables.tail(rho, r)
    }

    pub fn evaluate(&self, rho: f64, r: f64) -> f64 {
        self.direct(rho, r) + self.tail(rho, r)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("orbit radius must be positive, got {rho}")))
    }
}

/// W(ρ, R), verified against the same sum at twice the cutoff.
pub fn lattice_sum_w(rho: f64, config: &LatticeConfig) -> Result<f64> {
    check_rho(rho)?;
    config.validate()?;
    let r = config.lattice_constant;
    let w = LatticeSum::new(config.shell_cutoff).evaluate(rho, r);
    let doubled = 2 * config.shell_cutoff;
    let w2 = LatticeSum::new(doubled).evaluate(rho, r);
    let change = (w2 - w).abs();
    if !(change < config.tail_tol) {
        return Err(Error::CutoffInstability { cutoff: config.shell_cutoff, doubled, change, tail_tol: config.tail_tol });
    }
    Ok(w)
}

/// Isolated-atom part of the mean-field Hamiltonian: 9/(8ρ²) − 3/(2ρ).
pub fn atomic_terms(rho: f64) -> f64 {
    9.0 / (8.0 * rho * rho) - 1.5 / rho
}

/// Mean-field energy per electron at orbit radius ρ.
pub fn hf_energy(rho: f64, config: &LatticeConfig) -> Result<f64> {
    Ok(atomic_terms(rho) + config.pair_share * lattice_sum_w(rho, config)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HfMinimum {
    pub rho: f64,
    pub energy: f64,
    /// The minimizer sits at an end of the ρ interval; R is likely unphysical.
    pub at_boundary: bool,
}

/// Minimizes the mean-field energy over ρ ∈ [0.1, 10].
///
/// A coarse logarithmic scan picks the basin, golden-section search refines
/// it, and the lattice sum is cutoff-checked at the minimizer.
pub fn minimize_hf_mh(config: &LatticeConfig) -> Result<HfMinimum> {
    config.validate()?;
    let r = config.lattice_constant;
    let sum = LatticeSum::new(config.shell_cutoff);
    let energy = |rho: f64| atomic_terms(rho) + config.pair_share * sum.evaluate(rho, r);

    let (lo, hi) = RHO_INTERVAL;
    const SCAN: usize = 64;
    let grid: Vec<f64> = (0..=SCAN).map(|i| lo * (hi / lo).powf(i as f64 / SCAN as f64)).collect();
    let best = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, energy(x)))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
        .0;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(SCAN)];
    let found = minimize_scalar(energy, a, b, SCALAR_MIN_TOL)?;
    let rho = found.argmin[0];

    let edge = 1e-6 * (hi - lo);
    let at_boundary = rho - lo <= edge || hi - rho <= edge;
    let energy = hf_energy(rho, config)?;
    Ok(HfMinimum { rho, energy, at_boundary })
}

/// Cosines of the dihedral angles to the first three neighbour shells.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GammaTriple {
    pub g100: f64,
    pub g110: f64,
    pub g111: f64,
}

impl GammaTriple {
    pub const ZERO: GammaTriple = GammaTriple { g100: 0.0, g110: 0.0, g111: 0.0 };

    pub fn new(g100: f64, g110: f64, g111: f64) -> Result<Self> {
        let g = Self { g100, g110, g111 };
        if g.as_array().iter().all(|x| x.abs() < 1.0) {
            Ok(g)
        } else {
            Err(Error::InvalidArgument(format!("dihedral cosines must lie in (-1, 1), got {g:?}")))
        }
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.g100, self.g110, self.g111]
    }

    /// Dihedral angles θ = arccos γ, radians.
    pub fn angles(&self) -> [f64; 3] {
        self.as_array().map(f64::acos)
    }

    /// Deviations δ = arccos γ − π/2 from a right angle, radians.
    pub fn deviations(&self) -> [f64; 3] {
        self.as_array().map(|g| g.acos() - FRAC_PI_2)
    }
}

/// ½[1/√(σ²R²+2ρ²(1−γ)) − 1/√(σ²R²+2ρ²)].
pub fn delta_w(rho: f64, sigma_r: f64, gamma: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(sigma_r > 0.0) {
        return Err(Error::Domain(format!("neighbour distance must be positive, got {sigma_r}")));
    }
    if !(gamma < 1.0) {
        return Err(Error::Domain(format!("1 - gamma must be positive, got gamma = {gamma}")));
    }
    let base = sigma_r * sigma_r + 2.0 * rho * rho;
    let opened = base - 2.0 * rho * rho * gamma;
    if !(opened > 0.0) {
        return Err(Error::Domain(format!("square-root argument {opened} is not positive")));
    }
    let (p, q) = (opened.sqrt(), base.sqrt());
    // ½(1/p − 1/q) = ½(q² − p²)/(pq(p+q)) with q² − p² = 2ρ²γ.
    Ok(rho * rho * gamma / (p * q * (p + q)))
}

/// Gramian ratio truncated at second order in γ.
pub fn gramian_ratio(gamma: &GammaTriple) -> f64 {
    1.0 + 6.0 * gamma.g100 * gamma.g100 + 12.0 * gamma.g110 * gamma.g110 + 8.0 * gamma.g111 * gamma.g111
}

/// 𝓗_corr − 𝓗_HF: the Gramian penalty plus the change in neighbour repulsion.
pub fn correlation_correction(rho: f64, lattice_constant: f64, gamma: &GammaTriple) -> Result<f64> {
    let mut w_delta = 0.0;
    for (&(mult, sigma, _), &g) in SHELLS.iter().zip(&gamma.as_array()) {
        w_delta += mult * delta_w(rho, sigma * lattice_constant, g)?;
    }
    Ok(9.0 / (8.0 * rho * rho) * (gramian_ratio(gamma) - 1.0) + 1.5 * w_delta)
}

pub fn corr_energy(rho: f64, config: &LatticeConfig, gamma: &GammaTriple) -> Result<f64> {
    Ok(hf_energy(rho, config)? + correlation_correction(rho, config.lattice_constant, gamma)?)
}

/// Minimizer of the correction when ΔW is linearized in γ:
/// γ ≈ −ρ⁴ / (3(σ²R² + 2ρ²)^{3/2}) for each shell.
pub fn small_gamma_estimate(rho: f64, lattice_constant: f64) -> GammaTriple {
    let est = |sigma: f64| {
        let x = sigma * sigma * lattice_constant * lattice_constant + 2.0 * rho * rho;
        -rho.powi(4) / (3.0 * x.powf(1.5))
    };
    GammaTriple { g100: est(SHELLS[0].1), g110: est(SHELLS[1].1), g111: est(SHELLS[2].1) }
}

/// Square-to-rhombus area difference over the first three neighbour shells:
/// 6R²(1−cos δ100) + 24R²(1−cos δ110) + 24R²(1−cos δ111).
pub fn mh_area_difference(lattice_constant: f64, gamma: &GammaTriple) -> f64 {
    let r2 = lattice_constant * lattice_constant;
    SHELLS
        .iter()
        .zip(&gamma.as_array())
        .map(|(&(_, _, weight), &g)| {
            // cos δ = sin(arccos γ) = √(1−γ²), so 1 − cos δ = γ²/(1 + √(1−γ²)).
            weight * r2 * g * g / (1.0 + (1.0 - g * g).sqrt())
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhSolution {
    pub lattice_constant: f64,
    pub rho_hf: f64,
    pub eps_hf: f64,
    pub gamma: GammaTriple,
    /// Minimum of the correlated Hamiltonian.
    pub eps_corr_total: f64,
    /// eps_corr_total − eps_hf (≤ 0).
    pub eps_corr: f64,
    pub delta_area: f64,
    pub stable: bool,
    pub rho_at_boundary: bool,
    pub simplex_iterations: usize,
}

/// Correlated minimum over (γ100, γ110, γ111) at the mean-field ρ.
pub fn minimize_corr_mh(config: &LatticeConfig) -> Result<MhSolution> {
    let hf = minimize_hf_mh(config)?;
    let r = config.lattice_constant;
    let rho = hf.rho;
    let (lo, hi) = GAMMA_BOX;
    let objective = |v: &[f64]| {
        if v.iter().any(|&g| !(g > lo && g < hi)) {
            return f64::INFINITY;
        }
        let gamma = GammaTriple { g100: v[0], g110: v[1], g111: v[2] };
        correlation_correction(rho, r, &gamma).unwrap_or(f64::INFINITY)
    };
    let found = minimize_simplex(objective, &GAMMA_START, SIMPLEX_STEP, SIMPLEX_TOL, SIMPLEX_MAX_ITER)?;
    if !found.converged {
        return Err(Error::Convergence { method: "minimize_simplex (dihedral cosines)", iterations: found.iterations });
    }
    let (gamma, eps_corr) = if found.value <= 0.0 {
        (GammaTriple::from_array([found.argmin[0], found.argmin[1], found.argmin[2]])?, found.value)
    } else {
        (GammaTriple::ZERO, 0.0)
    };
    Ok(MhSolution {
        lattice_constant: r,
        rho_hf: rho,
        eps_hf: hf.energy,
        gamma,
        eps_corr_total: hf.energy + eps_corr,
        eps_corr,
        delta_area: mh_area_difference(r, &gamma),
        stable: hf.energy < 0.0,
        rho_at_boundary: hf.at_boundary,
        simplex_iterations: found.iterations,
    })
}

const MH_COLUMNS: &[(&str, &str)] = &[
    ("R", "scaled bohr"),
    ("rho_hf", "scaled bohr"),
    ("eps_hf", "scaled hartree"),
    ("eps_corr_total", "scaled hartree"),
    ("eps_corr", "scaled hartree"),
    ("abs_eps_corr", "scaled hartree"),
    ("g100", "1"),
    ("g110", "1"),
    ("g111", "1"),
    ("theta100", "rad"),
    ("theta110", "rad"),
    ("theta111", "rad"),
    ("delta_area", "scaled bohr^2"),
    ("stable", "flag"),
    ("rho_at_boundary", "flag"),
];

pub fn describe_config(table: &mut SweepTable, config: &LatticeConfig) {
    table.set_meta("shell_cutoff", config.shell_cutoff);
    table.set_meta("tail_tol", config.tail_tol);
    table.set_meta("pair_share", config.pair_share);
    table.set_meta("rho_interval", format!("{}..{}", RHO_INTERVAL.0, RHO_INTERVAL.1));
    table.set_meta("rho_tol", SCALAR_MIN_TOL);
    table.set_meta("gamma_box", format!("{}..{}", GAMMA_BOX.0, GAMMA_BOX.1));
    table.set_meta("gamma_start", format!("{},{},{}", GAMMA_START[0], GAMMA_START[1], GAMMA_START[2]));
    table.set_meta("simplex_step", SIMPLEX_STEP);
    table.set_meta("simplex_tol", SIMPLEX_TOL);
}

/// One row per R, in the order given; failures become error cells.
pub fn mh_sweep(r_values: &[f64], template: &LatticeConfig) -> Result<SweepTable> {
    template.validate()?;
    if let Some(bad) = r_values.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidArgument(format!("lattice constants must be positive, got {bad}")));
    }
    let mut table = SweepTable::new(MH_COLUMNS.iter().map(|(n, u)| Column::new(*n, *u)).collect());
    describe_config(&mut table, template);
    let rows: Vec<Vec<Cell>> = r_values
        .par_iter()
        .map(|&r| {
            let head = vec![Cell::Num(r)];
            match template.with_lattice_constant(r).and_then(|c| minimize_corr_mh(&c)) {
                Ok(s) => {
                    let [t1, t2, t3] = s.gamma.angles();
                    let mut row = head;
                    row.extend(
                        [
                            s.rho_hf,
                            s.eps_hf,
                            s.eps_corr_total,
                            s.eps_corr,
                            s.eps_corr.abs(),
                            s.gamma.g100,
                            s.gamma.g110,
                            s.gamma.g111,
                            t1,
                            t2,
                            t3,
                            s.delta_area,
                        ]
                        .map(Cell::Num),
                    );
                    row.push(Cell::flag(s.stable));
                    row.push(Cell::flag(s.rho_at_boundary));
                    row
                }
                Err(e) => Cell::fill_error(head, MH_COLUMNS.len(), &e),
            }
        })
        .collect();
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Lattice constant below which the mean-field energy turns positive.
pub fn hf_stability_threshold(template: &LatticeConfig) -> Result<f64> {
    template.validate()?;
    let eps = |r: f64| -> Result<f64> { Ok(minimize_hf_mh(&template.with_lattice_constant(r)?)?.energy) };
    let (lo, hi) = THRESHOLD_SCAN;
    const STEPS: usize = 90;
    let mut prev = (lo, eps(lo)?);
    for i in 1..=STEPS {
        let r = lo + (hi - lo) * i as f64 / STEPS as f64;
        let e = eps(r)?;
        if prev.1 > 0.0 && e <= 0.0 {
            if e == 0.0 {
                return Ok(r);
            }
            // Errors inside the refinement surface as NaN and stop the root finder's progress.
            let f = |x: f64| eps(x).unwrap_or(f64::NAN);
            return find_root(f, Bracket::new(prev.0, r)?, ROOT_TOL.max(1e-10));
        }
        prev = (r, e);
    }
    Err(Error::NoRoot { upper: hi })
}

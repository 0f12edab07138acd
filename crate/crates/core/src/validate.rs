//! Oracle cross-checks run by the `validate` subcommand.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::localization::{chi_imag, scan, GridSpec};
use crate::model::{
    coherences_of, evolve_to_steady, max_residual, steady_state, zeroth_order, zeroth_order_reference,
    DensityMatrix, PhysParams, STATE_TOLERANCE,
};

/// Half-width of the bands around θ ∈ {0, π, 2π} excluded from random draws.
/// Near parallel dipoles the slowest relaxation rate drops towards zero and
/// a finite-time integration no longer reaches the steady state.
pub const THETA_GUARD: f64 = 0.2;

/// Integration settings for the time-domain oracle.
pub const ORACLE_T_END: f64 = 200.0;
pub const ORACLE_DT: f64 = 0.005;

/// One random parameter point: |Δp|, |Δc| ≤ 60, Ω₀ ≤ 20, Ω_p ∈ [1e-3, 0.5],
/// θ uniform on (0, 2π) away from {0, π}, at a random position in the
/// unit cell.
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub params: PhysParams,
    pub x: f64,
    pub y: f64,
}

impl Draw {
    pub fn omega_c(&self) -> f64 {
        self.params.rabi_at(self.x, self.y)
    }
}

pub fn random_draw<R: Rng>(rng: &mut R) -> Draw {
    let theta = loop {
        let t = rng.gen_range(0.0..2.0 * PI);
        if [0.0, PI, 2.0 * PI].iter().all(|c| (t - c).abs() > THETA_GUARD) {
            break t;
        }
    };
    let params = PhysParams {
        delta_p: rng.gen_range(-60.0..=60.0),
        delta_c: rng.gen_range(-60.0..=60.0),
        omega_c0: rng.gen_range(0.0..=20.0),
        omega_p0: rng.gen_range(1e-3..=0.5),
        theta,
        delta_phase: rng.gen_range(0.0..2.0 * PI),
        eta_phase: rng.gen_range(0.0..2.0 * PI),
        ..PhysParams::default()
    };
    Draw {
        params,
        x: rng.gen_range(-0.5..0.5),
        y: rng.gen_range(-0.5..0.5),
    }
}

pub fn random_draws(seed: u64, n: usize) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_draw(&mut rng)).collect()
}

/// Exact steady-state χ'' of the undriven two-level a↔b system including
/// probe saturation: −αγ / (γ² + Δp² + 2Ω_p²).
pub fn two_level_chi(params: &PhysParams) -> f64 {
    let g = params.gamma;
    let op = params.omega_p0;
    -params.alpha_scale * g / (g * g + params.delta_p * params.delta_p + 2.0 * op * op)
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Informational rows never fail the suite.
    pub gating: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.gating, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "INFO",
        };
        write!(f, "{status:<5} {:<28} {}", self.name, self.detail)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        gating: true,
        detail,
    }
}

pub fn check_two_level() -> Result<CheckResult> {
    let mut worst = 0.0_f64;
    for delta_p in [0.0, 1.0, 5.0, 30.0] {
        let params = PhysParams {
            omega_c0: 0.0,
            delta_p,
            ..PhysParams::default()
        };
        let rho = steady_state(&params, 0.0)?;
        worst = worst.max((chi_imag(&params, &rho) - two_level_chi(&params)).abs());
    }
    Ok(check(
        "two-level limit",
        worst <= 1e-12,
        format!("max |chi - exact| = {worst:.3e} (tol 1e-12)"),
    ))
}

pub fn check_time_domain(draws: &[Draw]) -> Result<CheckResult> {
    let mut worst_diff = 0.0_f64;
    let mut worst_residual = 0.0_f64;
    for d in draws {
        let omega_c = d.omega_c();
        let linear = steady_state(&d.params, omega_c)?;
        let evolved = evolve_to_steady(&d.params, omega_c, &DensityMatrix::ground(), ORACLE_T_END, ORACLE_DT)?;
        worst_diff = worst_diff.max(linear.max_abs_diff(&evolved));
        worst_residual = worst_residual.max(max_residual(&d.params, omega_c, &linear));
    }
    Ok(check(
        "RK4 vs linear solve",
        worst_diff <= 1e-7 && worst_residual <= 1e-9,
        format!(
            "{} draws: max |diff| = {worst_diff:.3e} (tol 1e-7), max residual = {worst_residual:.3e} (tol 1e-9)",
            draws.len()
        ),
    ))
}

/// Weak-probe (Ω_p = 1e-6) coherences against the probe-free linear solve,
/// normwise over `(ρ_ac, ρ_ab, ρ_cb)`. Elementwise ratios are not used: where
/// a probe-free coherence is itself of order Ω_p, the first-order probe
/// response dominates it.
pub fn check_weak_probe(draws: &[Draw]) -> Result<CheckResult> {
    let mut worst = 0.0_f64;
    for d in draws {
        let params = PhysParams {
            omega_p0: 1e-6,
            ..d.params
        };
        let omega_c = d.omega_c();
        let reference = zeroth_order_reference(&params, omega_c)?;
        let weak = coherences_of(&steady_state(&params, omega_c)?);
        worst = worst.max(weak.max_normwise_deviation(&reference));
    }
    Ok(check(
        "weak probe vs probe-free",
        worst <= 1e-4,
        format!("{} draws: max normwise deviation = {worst:.3e} (tol 1e-4)", draws.len()),
    ))
}

/// Deviation of the closed forms from the probe-free linear solve.
pub fn closed_form_deviation(draws: &[Draw]) -> Result<(f64, usize)> {
    let mut worst = 0.0_f64;
    let mut within = 0;
    for d in draws {
        let omega_c = d.omega_c();
        let closed = zeroth_order(&d.params, omega_c)?;
        let reference = zeroth_order_reference(&d.params, omega_c)?;
        let dev = closed.max_relative_deviation(&reference);
        if dev <= 1e-4 {
            within += 1;
        }
        worst = worst.max(dev);
    }
    Ok((worst, within))
}

pub fn check_closed_forms(draws: &[Draw]) -> Result<CheckResult> {
    let (worst, within) = closed_form_deviation(draws)?;
    Ok(CheckResult {
        name: "closed-form coherences",
        passed: within == draws.len(),
        gating: false,
        detail: format!(
            "{within}/{} draws within 1e-4 of the probe-free solve, max relative deviation = {worst:.3e}",
            draws.len()
        ),
    })
}

/// Parity, coordinate swap, 1-λ periodicity and α-linearity on a square grid.
pub fn symmetry_checks(n: usize) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::square(0.5, n);
    let mut out = Vec::new();

    let base = PhysParams {
        delta_p: 21.0,
        ..PhysParams::default()
    };
    let map = scan(&base, &grid)?;
    // swap symmetry only needs κ₁ = κ₂ and δ = η, so test it with SGC on
    let swapped = scan(
        &PhysParams {
            delta_p: 30.0,
            delta_c: 15.0,
            theta: PI / 2.3,
            delta_phase: PI / 12.0,
            eta_phase: PI / 12.0,
            ..PhysParams::default()
        },
        &grid,
    )?;
    let mut parity = 0.0_f64;
    let mut swap = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            parity = parity.max((map.at(i, j) - map.at(n - 1 - i, n - 1 - j)).abs());
            swap = swap.max((swapped.at(i, j) - swapped.at(j, i)).abs());
        }
    }
    out.push(check(
        "parity at p = 0",
        parity <= 1e-9,
        format!("max |chi(x,y) - chi(-x,-y)| = {parity:.3e}"),
    ));
    out.push(check(
        "coordinate swap",
        swap <= 1e-9,
        format!("max |chi(x,y) - chi(y,x)| = {swap:.3e}"),
    ));

    let sgc = PhysParams {
        delta_p: 30.0,
        delta_c: 15.0,
        omega_p0: 0.1,
        theta: PI / 2.3,
        eta_phase: PI / 12.0,
        ..PhysParams::default()
    };
    let reference = scan(&sgc, &grid)?;
    let shifted = scan(
        &sgc,
        &GridSpec {
            x_min: grid.x_min + 1.0,
            x_max: grid.x_max + 1.0,
            ..grid
        },
    )?;
    let period = reference
        .values
        .iter()
        .zip(&shifted.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(check(
        "1-lambda periodicity",
        period <= 1e-9,
        format!("max |chi(x+1,y) - chi(x,y)| = {period:.3e}"),
    ));

    let c = 2.5;
    let scaled = scan(
        &PhysParams {
            alpha_scale: c * sgc.alpha_scale,
            ..sgc
        },
        &grid,
    )?;
    let lin = reference
        .values
        .iter()
        .zip(&scaled.values)
        .map(|(a, b)| (c * a - b).abs())
        .fold(0.0, f64::max);
    let argmax_same = reference.argmax_abs() == scaled.argmax_abs();
    out.push(check(
        "alpha linearity",
        lin <= 1e-9 && argmax_same,
        format!("max |c chi - chi_c| = {lin:.3e}, argmax invariant: {argmax_same}"),
    ));
    Ok(out)
}

pub fn check_state_validity(draws: &[Draw]) -> Result<CheckResult> {
    let mut failures = 0;
    let mut min_eig = f64::INFINITY;
    for d in draws {
        let omega_c = d.omega_c();
        let rho = steady_state(&d.params, omega_c)?;
        if rho.check(STATE_TOLERANCE).is_err() {
            failures += 1;
        }
        min_eig = min_eig.min(rho.monitor_positivity(&d.params, omega_c)?);
    }
    Ok(check(
        "state validity",
        failures == 0,
        format!(
            "{failures}/{} states violate Hermiticity/trace; min eigenvalue = {min_eig:.3e}",
            draws.len()
        ),
    ))
}

/// Runs the full suite with `draws` random draws per randomized check.
pub fn run_suite(draws: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let sample = random_draws(seed, draws);
    let mut results = vec![
        check_two_level()?,
        check_time_domain(&sample)?,
        check_weak_probe(&sample)?,
        check_closed_forms(&sample)?,
    ];
    results.extend(symmetry_checks(41)?);
    results.push(check_state_validity(&sample)?);
    Ok(results)
}

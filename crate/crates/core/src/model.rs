//! V-type three-level atom with spontaneously generated coherence (SGC).
//!
//! Levels: `a` is the ground state, `b` and `c` are the two excited states.
//! The probe (Rabi frequency `Ω_p`) drives a↔b, the standing-wave coupling
//! field `Ω_c(x, y)` drives a↔c. Both excited states decay to `a` at `2γ`
//! and the cross-coupling of the two decay channels enters with strength
//! `p γ`, `p = cos θ`.
//!
//! Density-matrix elements are flattened row-major over `(a, b, c)`:
//! `ρ_aa, ρ_ab, ρ_ac, ρ_ba, ρ_bb, ρ_bc, ρ_ca, ρ_cb, ρ_cc`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues_3x3, lu_solve, rk4_step, CMatrix, Complex};

/// Tolerance on Hermiticity and unit trace of a valid state.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Most negative eigenvalue tolerated before a positivity warning.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

const ZERO: Complex = Complex::new(0.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    A = 0,
    B = 1,
    C = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A, Level::B, Level::C];

    fn symbol(self) -> char {
        match self {
            Level::A => 'a',
            Level::B => 'b',
            Level::C => 'c',
        }
    }
}

/// Position of `ρ_ij` in the flattened ordering.
pub const fn flat_index(i: Level, j: Level) -> usize {
    3 * i as usize + j as usize
}

/// Flattened index of `ρ_ji` given that of `ρ_ij`.
pub const fn transposed_index(k: usize) -> usize {
    3 * (k % 3) + k / 3
}

/// Label such as `"ab"` for a flattened index.
pub fn element_label(k: usize) -> String {
    let (i, j) = (Level::ALL[k / 3], Level::ALL[k % 3]);
    format!("{}{}", i.symbol(), j.symbol())
}

/// Model constants, all in units of the decay rate `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub gamma: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub omega_p0: f64,
    pub omega_c0: f64,
    pub theta: f64,
    pub delta_phase: f64,
    pub eta_phase: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha_scale: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            gamma: 1.0,
            delta_p: 0.0,
            delta_c: 0.0,
            omega_p0: 0.01,
            omega_c0: 10.0,
            theta: FRAC_PI_2,
            delta_phase: 0.0,
            eta_phase: 0.0,
            kappa1: 2.0 * PI,
            kappa2: 2.0 * PI,
            alpha_scale: 1.0,
        }
    }
}

impl PhysParams {
    /// SGC strength `p = cos θ`.
    pub fn sgc_p(&self) -> f64 {
        self.theta.cos().clamp(-1.0, 1.0)
    }

    /// θ ∈ {0, π} (mod 2π) makes the two dipoles parallel.
    pub fn dipole_angle_degenerate(&self) -> bool {
        self.theta.sin().abs() < 1e-12
    }

    /// Standing-wave coupling `Ω_c(x, y) = Ω₀ [sin(κ₁x + δ) + sin(κ₂y + η)]`.
    pub fn rabi_at(&self, x: f64, y: f64) -> f64 {
        self.omega_c0 * ((self.kappa1 * x + self.delta_phase).sin() + (self.kappa2 * y + self.eta_phase).sin())
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("delta_p", self.delta_p),
            ("delta_c", self.delta_c),
            ("omega_p0", self.omega_p0),
            ("omega_c0", self.omega_c0),
            ("theta", self.theta),
            ("delta_phase", self.delta_phase),
            ("eta_phase", self.eta_phase),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("alpha_scale", self.alpha_scale),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Validation(format!("{name} must be finite, got {v}")));
        }
        let positive = [
            ("gamma", self.gamma),
            ("omega_p0", self.omega_p0),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("alpha_scale", self.alpha_scale),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| *v <= 0.0) {
            return Err(Error::Validation(format!("{name} must be > 0, got {v}")));
        }
        if self.omega_c0 < 0.0 {
            return Err(Error::Validation(format!(
                "omega_c0 must be >= 0, got {}",
                self.omega_c0
            )));
        }
        if self.dipole_angle_degenerate() {
            log::warn!(
                "theta = {} gives parallel dipoles (|sin θ| < 1e-12); SGC strength p = {}",
                self.theta,
                self.sgc_p()
            );
        }
        Ok(())
    }
}

/// 3×3 density matrix over levels `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    elements: [[Complex; 3]; 3],
}

impl DensityMatrix {
    /// Wraps raw elements without checking the state invariants.
    pub fn from_elements(elements: [[Complex; 3]; 3]) -> Self {
        DensityMatrix { elements }
    }

    pub fn from_flat(v: &[Complex]) -> Self {
        assert_eq!(v.len(), 9);
        let mut elements = [[ZERO; 3]; 3];
        for (k, z) in v.iter().enumerate() {
            elements[k / 3][k % 3] = *z;
        }
        DensityMatrix { elements }
    }

    /// Diagonal state from populations `(ρ_aa, ρ_bb, ρ_cc)`.
    pub fn diagonal(aa: f64, bb: f64, cc: f64) -> Self {
        let mut elements = [[ZERO; 3]; 3];
        elements[0][0] = Complex::new(aa, 0.0);
        elements[1][1] = Complex::new(bb, 0.0);
        elements[2][2] = Complex::new(cc, 0.0);
        DensityMatrix { elements }
    }

    /// All population in the ground state.
    pub fn ground() -> Self {
        Self::diagonal(1.0, 0.0, 0.0)
    }

    pub fn get(&self, i: Level, j: Level) -> Complex {
        self.elements[i as usize][j as usize]
    }

    pub fn elements(&self) -> &[[Complex; 3]; 3] {
        &self.elements
    }

    pub fn to_flat(&self) -> [Complex; 9] {
        let mut out = [ZERO; 9];
        for (k, z) in out.iter_mut().enumerate() {
            *z = self.elements[k / 3][k % 3];
        }
        out
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_rows(&self.elements)
    }

    pub fn trace(&self) -> Complex {
        self.elements[0][0] + self.elements[1][1] + self.elements[2][2]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.to_cmatrix().hermiticity_defect()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.to_flat()
            .iter()
            .zip(other.to_flat().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<[f64; 3]> {
        hermitian_eigenvalues_3x3(&self.to_cmatrix())
    }

    /// Checks Hermiticity, unit trace and real diagonal entries in `[−tol·100, 1 + tol·100]`.
    pub fn check(&self, tol: f64) -> std::result::Result<(), String> {
        let herm = self.hermiticity_defect();
        if !(herm <= tol) {
            return Err(format!("not Hermitian: max |ρ − ρ†| = {herm:e}"));
        }
        let trace_err = (self.trace() - 1.0).norm();
        if !(trace_err <= tol) {
            return Err(format!("trace deviates from 1 by {trace_err:e}"));
        }
        for l in Level::ALL {
            let d = self.get(l, l);
            if !(d.im.abs() <= tol) {
                return Err(format!("ρ_{0}{0} has imaginary part {1:e}", l.symbol(), d.im));
            }
            if d.re < -POSITIVITY_TOLERANCE || d.re > 1.0 + POSITIVITY_TOLERANCE {
                return Err(format!("population ρ_{0}{0} = {1} outside [0, 1]", l.symbol(), d.re));
            }
        }
        Ok(())
    }

    /// Smallest eigenvalue; logs a warning with the parameters when it falls
    /// below `−POSITIVITY_TOLERANCE`.
    pub fn monitor_positivity(&self, params: &PhysParams, omega_c: f64) -> Result<f64> {
        let min = self.eigenvalues()?[0];
        if min < -POSITIVITY_TOLERANCE {
            log::warn!("negative eigenvalue {min:e} at omega_c = {omega_c}, params = {params:?}");
        }
        Ok(min)
    }
}

/// Steady-state linear system `M ρ = rhs` with the `ρ_aa` row replaced by
/// the trace constraint.
#[derive(Debug, Clone)]
pub struct LiouvilleSystem {
    pub matrix: CMatrix,
    pub rhs: Vec<Complex>,
}

/// Closed-form weak-probe coherences (γ-scaled, dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZerothOrderCoherences {
    pub rho0_ac: Complex,
    pub rho0_ab: Complex,
    pub rho0_cb: Complex,
}

impl ZerothOrderCoherences {
    /// Largest relative deviation `|self − reference| / |reference|` over
    /// the three coherences; elements with zero reference use absolute error.
    pub fn max_relative_deviation(&self, reference: &ZerothOrderCoherences) -> f64 {
        [
            (self.rho0_ac, reference.rho0_ac),
            (self.rho0_ab, reference.rho0_ab),
            (self.rho0_cb, reference.rho0_cb),
        ]
        .iter()
        .map(|(v, r)| {
            let scale = r.norm();
            if scale > 0.0 {
                (v - r).norm() / scale
            } else {
                (v - r).norm()
            }
        })
        .fold(0.0, f64::max)
    }

    /// `max_k |self_k − ref_k|` divided by `max_k |ref_k|`.
    pub fn max_normwise_deviation(&self, reference: &ZerothOrderCoherences) -> f64 {
        let diff = [
            self.rho0_ac - reference.rho0_ac,
            self.rho0_ab - reference.rho0_ab,
            self.rho0_cb - reference.rho0_cb,
        ];
        let scale = [reference.rho0_ac, reference.rho0_ab, reference.rho0_cb]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let worst = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// Equations of motion written out term by term, `dρ/dt` at `rho`.
///
/// Only `ρ_cc, ρ_bb, ρ_ac, ρ_cb, ρ_ab` carry their own equation; the
/// conjugate elements follow from Hermiticity and `ρ_aa` from trace
/// conservation.
pub fn equations_of_motion(params: &PhysParams, omega_c: f64, rho: &DensityMatrix) -> [[Complex; 3]; 3] {
    use Level::*;
    let g = params.gamma;
    let pg = params.sgc_p() * g;
    let (dp, dc) = (params.delta_p, params.delta_c);
    let (op, oc) = (params.omega_p0, omega_c);
    let r = |i, j| rho.get(i, j);

    let d_cc = -2.0 * g * r(C, C) + I * oc * (r(A, C) - r(C, A)) - pg * (r(C, B) + r(B, C));
    let d_bb = -2.0 * g * r(B, B) + I * op * (r(A, B) - r(B, A)) - pg * (r(C, B) + r(B, C));
    let d_ac = -(g + I * dc) * r(A, C) - pg * r(A, B) + I * oc * (r(C, C) - r(A, A)) + I * op * r(B, C);
    let d_cb = I * oc * r(A, B) - I * op * r(C, A) - I * (dp - dc) * r(C, B) - 2.0 * g * r(C, B)
        - pg * (r(C, C) + r(B, B));
    let d_ab = -pg * r(A, C) - (g + I * dp) * r(A, B) + I * oc * r(C, B) + I * op * (r(B, B) - r(A, A));
    let d_aa = -(d_bb + d_cc);

    [
        [d_aa, d_ab, d_ac],
        [d_ab.conj(), d_bb, d_cb.conj()],
        [d_ac.conj(), d_cb, d_cc],
    ]
}

/// Largest `|dρ/dt|` over all nine elements at `rho`.
pub fn max_residual(params: &PhysParams, omega_c: f64, rho: &DensityMatrix) -> f64 {
    equations_of_motion(params, omega_c, rho)
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// The full 9×9 generator `dρ/dt = L ρ` in the flattened ordering, before
/// the trace constraint is imposed.
pub fn generator(params: &PhysParams, omega_c: f64) -> CMatrix {
    use Level::*;
    let g = params.gamma;
    let pg = params.sgc_p() * g;
    let (dp, dc) = (params.delta_p, params.delta_c);
    let (op, oc) = (params.omega_p0, omega_c);
    let ix = |i, j| flat_index(i, j);

    let mut l = CMatrix::zeros(9, 9);
    {
        let mut set = |row: usize, col: usize, v: Complex| l[(row, col)] += v;

        let cc = ix(C, C);
        set(cc, ix(C, C), Complex::from(-2.0 * g));
        set(cc, ix(A, C), I * oc);
        set(cc, ix(C, A), -I * oc);
        set(cc, ix(C, B), Complex::from(-pg));
        set(cc, ix(B, C), Complex::from(-pg));

        let bb = ix(B, B);
        set(bb, ix(B, B), Complex::from(-2.0 * g));
        set(bb, ix(A, B), I * op);
        set(bb, ix(B, A), -I * op);
        set(bb, ix(C, B), Complex::from(-pg));
        set(bb, ix(B, C), Complex::from(-pg));

        let ac = ix(A, C);
        set(ac, ix(A, C), -(g + I * dc));
        set(ac, ix(A, B), Complex::from(-pg));
        set(ac, ix(C, C), I * oc);
        set(ac, ix(A, A), -I * oc);
        set(ac, ix(B, C), I * op);

        let cb = ix(C, B);
        set(cb, ix(A, B), I * oc);
        set(cb, ix(C, A), -I * op);
        set(cb, ix(C, B), -I * (dp - dc) - 2.0 * g);
        set(cb, ix(C, C), Complex::from(-pg));
        set(cb, ix(B, B), Complex::from(-pg));

        let ab = ix(A, B);
        set(ab, ix(A, C), Complex::from(-pg));
        set(ab, ix(A, B), -(g + I * dp));
        set(ab, ix(C, B), I * oc);
        set(ab, ix(B, B), I * op);
        set(ab, ix(A, A), -I * op);
    }

    // d(ρ_ji)/dt = conj(d(ρ_ij)/dt): conjugate the row and transpose indices
    for (src, dst) in [(ix(A, B), ix(B, A)), (ix(C, B), ix(B, C)), (ix(A, C), ix(C, A))] {
        for col in 0..9 {
            l[(dst, transposed_index(col))] = l[(src, col)].conj();
        }
    }

    let aa = ix(A, A);
    for col in 0..9 {
        l[(aa, col)] = -(l[(ix(B, B), col)] + l[(ix(C, C), col)]);
    }
    l
}

/// Largest `|Σ_pop L[pop][col]|` over all columns; zero means the generator
/// conserves the trace for every ρ.
pub fn trace_defect(generator: &CMatrix) -> f64 {
    use Level::*;
    (0..9)
        .map(|col| {
            (generator[(flat_index(A, A), col)]
                + generator[(flat_index(B, B), col)]
                + generator[(flat_index(C, C), col)])
            .norm()
        })
        .fold(0.0, f64::max)
}

/// Steady-state system: the generator with its `ρ_aa` row replaced by
/// `ρ_aa + ρ_bb + ρ_cc = 1`.
pub fn assemble_liouvillian(params: &PhysParams, omega_c: f64) -> LiouvilleSystem {
    use Level::*;
    let mut matrix = generator(params, omega_c);
    debug_assert!(trace_defect(&matrix) <= 1e-12 * (1.0 + matrix.max_abs()));

    let aa = flat_index(A, A);
    for z in matrix.row_mut(aa) {
        *z = ZERO;
    }
    for l in Level::ALL {
        matrix[(aa, flat_index(l, l))] = Complex::from(1.0);
    }
    let mut rhs = vec![ZERO; 9];
    rhs[aa] = Complex::from(1.0);
    LiouvilleSystem { matrix, rhs }
}

/// Exact steady state at coupling `omega_c` by a direct linear solve.
pub fn steady_state(params: &PhysParams, omega_c: f64) -> Result<DensityMatrix> {
    let sys = assemble_liouvillian(params, omega_c);
    let v = lu_solve(&sys.matrix, &sys.rhs)?;
    Ok(DensityMatrix::from_flat(&v))
}

fn pack(rho: &DensityMatrix) -> Vec<f64> {
    rho.to_flat().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unpack(y: &[f64]) -> DensityMatrix {
    let v: Vec<Complex> = y.chunks_exact(2).map(|c| Complex::new(c[0], c[1])).collect();
    DensityMatrix::from_flat(&v)
}

/// Integrates the equations of motion from `rho0` with fixed-step RK4 and
/// calls `observer(t, ρ)` after every step.
pub fn evolve<F>(
    params: &PhysParams,
    omega_c: f64,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    mut observer: F,
) -> Result<DensityMatrix>
where
    F: FnMut(f64, &DensityMatrix),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Validation(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Validation(format!("t_end must be >= 0, got {t_end}")));
    }
    let steps = (t_end / dt).round() as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let rhs = |y: &[f64]| pack(&DensityMatrix::from_elements(equations_of_motion(params, omega_c, &unpack(y))));

    let mut y = pack(rho0);
    for step in 0..steps {
        y = rk4_step(rhs, &y, h).map_err(|_| Error::NonFiniteState { step })?;
        observer((step + 1) as f64 * h, &unpack(&y));
    }
    Ok(unpack(&y))
}

/// `ρ(t_end)` from RK4 integration; the time-domain route to the steady state.
pub fn evolve_to_steady(
    params: &PhysParams,
    omega_c: f64,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    evolve(params, omega_c, rho0, t_end, dt, |_, _| {})
}

fn checked(name: &'static str, d: Complex) -> Result<Complex> {
    let magnitude = d.norm();
    if !(magnitude > 1e-12) {
        return Err(Error::DegenerateDenominator { name, magnitude });
    }
    Ok(d)
}

/// Printed closed forms for the zeroth-order (probe-free) coherences,
/// evaluated in γ-scaled units.
pub fn zeroth_order(params: &PhysParams, omega_c: f64) -> Result<ZerothOrderCoherences> {
    let g = params.gamma;
    let dp = params.delta_p / g;
    let dc = params.delta_c / g;
    let oc = omega_c / g;
    let p = params.sgc_p();
    let oc2 = oc * oc;

    let shift = 2.0 * I + dc - dp;
    let d_common = checked(
        "rho0_ac/rho0_cb",
        shift * (p * p + (dp - I) * (dc - I)) + (dc - I) * oc2,
    )?;
    let d_ab = checked(
        "rho0_ab",
        shift * (I * p * p - I + dc * (1.0 + I * dp) + dp) + (1.0 + I * dc) * oc2,
    )?;

    Ok(ZerothOrderCoherences {
        rho0_ac: ((dp - I) * (dp - 2.0 * I - dc) * oc - oc2 * oc) / d_common,
        rho0_ab: p * oc * shift / d_ab,
        rho0_cb: I * p * oc2 / d_common,
    })
}

/// Probe-free coherences from a direct linear solve with `Ω_p = 0`.
pub fn zeroth_order_reference(params: &PhysParams, omega_c: f64) -> Result<ZerothOrderCoherences> {
    let dark = PhysParams {
        omega_p0: 0.0,
        ..*params
    };
    let rho = steady_state(&dark, omega_c)?;
    Ok(coherences_of(&rho))
}

/// `(ρ_ac, ρ_ab, ρ_cb)` of a state.
pub fn coherences_of(rho: &DensityMatrix) -> ZerothOrderCoherences {
    use Level::*;
    ZerothOrderCoherences {
        rho0_ac: rho.get(A, C),
        rho0_ab: rho.get(A, B),
        rho0_cb: rho.get(C, B),
    }
}

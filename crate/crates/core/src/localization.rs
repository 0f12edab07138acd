//! Probe absorption maps χ''(x, y), localization peaks and parameter sweeps.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{steady_state, DensityMatrix, Level, PhysParams};

/// Default half-width of the band around each axis excluded from quadrant
/// statistics, in units of λ.
pub const DEFAULT_AXIS_EXCLUSION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: -0.5,
            x_max: 0.5,
            y_min: -0.5,
            y_max: 0.5,
            nx: 201,
            ny: 201,
        }
    }
}

impl GridSpec {
    /// Square window `[−half, half]²` with `n × n` samples.
    pub fn square(half: f64, n: usize) -> Self {
        GridSpec {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
            nx: n,
            ny: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = [self.x_min, self.x_max, self.y_min, self.y_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::Validation("grid bounds must be finite".into()));
        }
        if self.nx < 3 || self.ny < 3 {
            return Err(Error::Validation(format!(
                "grid needs nx >= 3 and ny >= 3, got nx = {}, ny = {}",
                self.nx, self.ny
            )));
        }
        if !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(Error::Validation(format!(
                "grid needs x_min < x_max and y_min < y_max, got [{}, {}] × [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All sample positions in row-major order (y outer, x inner).
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.x(i), self.y(j))))
    }
}

/// χ'' sampled on a grid, row-major with `y` outer and `x` inner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationMap {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub values: Vec<f64>,
}

impl LocalizationMap {
    pub fn new(grid: GridSpec, params: PhysParams, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}×{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("map value {k} is not finite")));
        }
        Ok(LocalizationMap { grid, params, values })
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index `(i, j)` of the largest |χ''|, first in row-major order on ties.
    pub fn argmax_abs(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = k;
            }
        }
        (best % self.grid.nx, best / self.grid.nx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl Quadrant {
    /// Quadrant of `(x, y)`, or `None` within `exclusion` of either axis.
    pub fn of(x: f64, y: f64, exclusion: f64) -> Option<Quadrant> {
        if x.abs() < exclusion || y.abs() < exclusion || x == 0.0 || y == 0.0 {
            return None;
        }
        Some(match (x > 0.0, y > 0.0) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::I => "I",
            Quadrant::II => "II",
            Quadrant::III => "III",
            Quadrant::IV => "IV",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub quadrant: Quadrant,
    pub x: f64,
    pub y: f64,
    /// Signed χ''.
    pub value: f64,
    pub magnitude: f64,
    pub i: usize,
    pub j: usize,
}

/// Strict local maxima of |χ''|, strongest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakReport {
    pub entries: Vec<Peak>,
}

impl PeakReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn in_quadrant(&self, q: Quadrant) -> impl Iterator<Item = &Peak> {
        self.entries.iter().filter(move |p| p.quadrant == q)
    }

    /// Largest-magnitude peak in `q`.
    pub fn strongest_in(&self, q: Quadrant) -> Option<&Peak> {
        self.in_quadrant(q).next()
    }

    pub fn strongest(&self) -> Option<&Peak> {
        self.entries.first()
    }
}

/// χ'' = α Im(ρ_ab) / Ω_p.
pub fn chi_imag(params: &PhysParams, rho: &DensityMatrix) -> f64 {
    params.alpha_scale * rho.get(Level::A, Level::B).im / params.omega_p0
}

/// χ'' at one position.
pub fn chi_at(params: &PhysParams, x: f64, y: f64) -> Result<f64> {
    let rho = steady_state(params, params.rabi_at(x, y)).map_err(|e| Error::SingularAt {
        x,
        y,
        source: Box::new(e),
    })?;
    Ok(chi_imag(params, &rho))
}

/// Samples χ'' over the grid. Rows are evaluated in parallel; the output
/// order and any reported error are those of a row-major sequential scan.
pub fn scan(params: &PhysParams, grid: &GridSpec) -> Result<LocalizationMap> {
    grid.validate()?;
    let rows: Vec<Result<Vec<f64>>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            (0..grid.nx).map(|i| chi_at(params, grid.x(i), y)).collect()
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    for row in rows {
        values.extend(row?);
    }
    LocalizationMap::new(*grid, *params, values)
}

/// Strict local maxima of |χ''| over the interior cells, classified by
/// quadrant. Cells within `axis_exclusion` of an axis are dropped.
pub fn find_peaks(map: &LocalizationMap, axis_exclusion: f64) -> PeakReport {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    let mut entries = Vec::new();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let m = map.at(i, j).abs();
            let is_peak = (j - 1..=j + 1)
                .flat_map(|jj| (i - 1..=i + 1).map(move |ii| (ii, jj)))
                .filter(|&(ii, jj)| (ii, jj) != (i, j))
                .all(|(ii, jj)| m > map.at(ii, jj).abs());
            if !is_peak {
                continue;
            }
            let (x, y) = (map.grid.x(i), map.grid.y(j));
            if let Some(quadrant) = Quadrant::of(x, y, axis_exclusion) {
                let value = map.at(i, j);
                entries.push(Peak {
                    quadrant,
                    x,
                    y,
                    value,
                    magnitude: value.abs(),
                    i,
                    j,
                });
            }
        }
    }
    // stable: equal magnitudes keep row-major order
    entries.sort_by(|a, b| b.magnitude.partial_cmp(&a.magnitude).unwrap_or(Ordering::Equal));
    PeakReport { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    DeltaP,
    DeltaC,
    Theta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::DeltaP => "delta_p",
            SweepParam::DeltaC => "delta_c",
            SweepParam::Theta => "theta",
        }
    }

    pub fn apply(self, base: &PhysParams, value: f64) -> PhysParams {
        let mut p = *base;
        match self {
            SweepParam::DeltaP => p.delta_p = value,
            SweepParam::DeltaC => p.delta_c = value,
            SweepParam::Theta => p.theta = value,
        }
        p
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_p" | "delta-p" => Ok(SweepParam::DeltaP),
            "delta_c" | "delta-c" => Ok(SweepParam::DeltaC),
            "theta" => Ok(SweepParam::Theta),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub peaks: PeakReport,
    pub map: LocalizationMap,
}

/// One scan and peak report per value, in input order.
pub fn sweep(
    base: &PhysParams,
    grid: &GridSpec,
    param: SweepParam,
    values: &[f64],
    axis_exclusion: f64,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Validation("sweep needs at least one value".into()));
    }
    values
        .iter()
        .map(|&value| {
            let params = param.apply(base, value);
            let map = scan(&params, grid)?;
            let peaks = find_peaks(&map, axis_exclusion);
            Ok(SweepPoint { value, peaks, map })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn synthetic(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> LocalizationMap {
        let values = grid.points().map(|(x, y)| f(x, y)).collect();
        LocalizationMap::new(grid, PhysParams::default(), values).unwrap()
    }

    #[test]
    fn chi_from_coherence() {
        let mut e = [[Complex64::new(0.0, 0.0); 3]; 3];
        e[0][0] = Complex64::new(1.0, 0.0);
        e[0][1] = Complex64::new(0.0, 0.01);
        e[1][0] = Complex64::new(0.0, -0.01);
        let rho = DensityMatrix::from_elements(e);
        let p = PhysParams::default();
        assert!((chi_imag(&p, &rho) - 1.0).abs() < 1e-15);
        let p2 = PhysParams { alpha_scale: 2.0, ..p };
        assert!((chi_imag(&p2, &rho) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn undriven_two_level_chi() {
        let p = PhysParams {
            omega_c0: 0.0,
            ..PhysParams::default()
        };
        let chi = chi_at(&p, 0.1, -0.2).unwrap();
        // −γ/(γ² + Δp² + 2Ω_p²) at Δp = 0
        assert!((chi + 1.0 / (1.0 + 2e-4)).abs() < 1e-12);
        assert!((chi + 1.0).abs() < 1e-3);
    }

    #[test]
    fn grid_coordinates() {
        let g = GridSpec::default();
        assert_eq!(g.x(0), -0.5);
        assert_eq!(g.x(200), 0.5);
        assert!((g.y(150) - 0.25).abs() < 1e-15);
        assert_eq!(g.points().count(), 201 * 201);
        assert!(GridSpec { nx: 2, ..g }.validate().is_err());
        assert!(GridSpec { x_min: 1.0, ..g }.validate().is_err());
    }

    #[test]
    fn quadrant_assignment() {
        assert_eq!(Quadrant::of(0.2, 0.3, 0.01), Some(Quadrant::I));
        assert_eq!(Quadrant::of(-0.2, 0.3, 0.01), Some(Quadrant::II));
        assert_eq!(Quadrant::of(-0.2, -0.3, 0.01), Some(Quadrant::III));
        assert_eq!(Quadrant::of(0.2, -0.3, 0.01), Some(Quadrant::IV));
        assert_eq!(Quadrant::of(0.005, 0.3, 0.01), None);
        assert_eq!(Quadrant::of(0.0, 0.3, 0.0), None);
    }

    #[test]
    fn single_bump_gives_one_peak() {
        let map = synthetic(GridSpec::square(0.5, 41), |x, y| {
            (-((x - 0.25).powi(2) + (y - 0.25).powi(2)) / 0.01).exp()
        });
        let report = find_peaks(&map, DEFAULT_AXIS_EXCLUSION);
        assert_eq!(report.entries.len(), 1);
        let p = report.entries[0];
        assert_eq!(p.quadrant, Quadrant::I);
        assert!((p.x - 0.25).abs() < 1e-12 && (p.y - 0.25).abs() < 1e-12);
        assert_eq!(p.magnitude, p.value.abs());
    }

    #[test]
    fn negative_dips_count_as_peaks() {
        let map = synthetic(GridSpec::square(0.5, 41), |x, y| {
            -(-((x + 0.25).powi(2) + (y + 0.25).powi(2)) / 0.01).exp()
                + 0.5 * (-((x - 0.25).powi(2) + (y - 0.25).powi(2)) / 0.01).exp()
        });
        let report = find_peaks(&map, DEFAULT_AXIS_EXCLUSION);
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.entries[0].quadrant, Quadrant::III);
        assert!(report.entries[0].value < 0.0);
        assert_eq!(report.strongest_in(Quadrant::I).unwrap().value, 0.5);
    }

    #[test]
    fn constant_map_has_no_peaks() {
        let map = synthetic(GridSpec::square(0.5, 11), |_, _| 0.5);
        assert!(find_peaks(&map, DEFAULT_AXIS_EXCLUSION).is_empty());
    }

    #[test]
    fn ties_keep_row_major_order() {
        let map = synthetic(GridSpec::square(0.5, 41), |x, y| {
            let b = |cx: f64, cy: f64| (-((x - cx).powi(2) + (y - cy).powi(2)) / 0.005).exp();
            b(0.25, -0.25) + b(-0.25, 0.25)
        });
        let report = find_peaks(&map, DEFAULT_AXIS_EXCLUSION);
        assert_eq!(report.entries.len(), 2);
        // y outer: the y = −0.25 cell comes first
        assert_eq!(report.entries[0].quadrant, Quadrant::IV);
        assert_eq!(report.entries[1].quadrant, Quadrant::II);
    }

    #[test]
    fn scan_symmetries_at_zero_sgc() {
        let p = PhysParams {
            delta_p: 21.0,
            ..PhysParams::default()
        };
        let grid = GridSpec::square(0.5, 21);
        let map = scan(&p, &grid).unwrap();
        let n = grid.nx;
        for j in 0..n {
            for i in 0..n {
                assert!((map.at(i, j) - map.at(j, i)).abs() < 1e-9);
                assert!((map.at(i, j) - map.at(n - 1 - i, n - 1 - j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn field_free_scan_is_constant() {
        let p = PhysParams {
            omega_c0: 0.0,
            theta: PI / 2.3,
            delta_p: 3.0,
            ..PhysParams::default()
        };
        let map = scan(&p, &GridSpec::square(0.5, 9)).unwrap();
        assert!(map.values.iter().all(|v| *v == map.values[0]));
    }

    #[test]
    fn scan_is_deterministic() {
        let p = PhysParams {
            theta: PI / 2.5,
            delta_p: 30.0,
            delta_c: 15.0,
            ..PhysParams::default()
        };
        let grid = GridSpec::square(0.5, 17);
        let a = scan(&p, &grid).unwrap();
        let b = scan(&p, &grid).unwrap();
        assert_eq!(a, b);
        for (k, (x, y)) in grid.points().enumerate() {
            assert_eq!(a.values[k], chi_at(&p, x, y).unwrap());
        }
    }

    #[test]
    fn scan_reports_position_of_failure() {
        let p = PhysParams {
            omega_c0: f64::INFINITY,
            ..PhysParams::default()
        };
        match scan(&p, &GridSpec::square(0.5, 3)) {
            Err(Error::SingularAt { x, y, .. }) => assert_eq!((x, y), (-0.5, -0.5)),
            other => panic!("expected SingularAt, got {other:?}"),
        }
    }

    #[test]
    fn sweep_param_names() {
        assert_eq!("delta_p".parse::<SweepParam>().unwrap(), SweepParam::DeltaP);
        assert_eq!("theta".parse::<SweepParam>().unwrap(), SweepParam::Theta);
        assert!(matches!("omega".parse::<SweepParam>(), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn singleton_sweep_equals_scan() {
        let base = PhysParams::default();
        let grid = GridSpec::square(0.5, 11);
        let out = sweep(&base, &grid, SweepParam::DeltaC, &[-5.0], DEFAULT_AXIS_EXCLUSION).unwrap();
        assert_eq!(out.len(), 1);
        let direct = scan(&PhysParams { delta_c: -5.0, ..base }, &grid).unwrap();
        assert_eq!(out[0].map, direct);
        assert_eq!(out[0].peaks, find_peaks(&direct, DEFAULT_AXIS_EXCLUSION));
        assert!(sweep(&base, &grid, SweepParam::DeltaC, &[], 0.01).is_err());
    }
}

//! Time series of the correlation measures and the scans built on them.

use alloc::format;
use alloc::vec::Vec;

use crate::correlators::{self, Pair, Variant, XState};
use crate::model::ModelParams;
use crate::qinfo::{self, CorrelationTriple, OptimizerSettings};
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result};

/// Concurrence below this is classified as no entanglement.
pub const ZERO_CONCURRENCE: f64 = 1e-12;
/// Default minimum prominence of a first local maximum.
pub const DEFAULT_PROMINENCE: f64 = 1e-6;

/// Uniform times `0, dt, 2dt, …` up to `t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::invalid("tmax", "must be positive"));
        }
        if !(dt > 0.0) || !dt.is_finite() || dt > t_max {
            return Err(Error::invalid("dt", "must be positive and no larger than tmax"));
        }
        Ok(Self { t_max, dt })
    }

    pub fn len(&self) -> usize {
        (self.t_max / self.dt + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }
}

/// `start, start + step, …, stop`, with the end point included when it falls
/// on the grid (to within rounding).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(Error::invalid("range", "needs finite bounds with start <= stop"));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid("step", "must be positive"));
    }
    let count = ((stop - start) / step + 1e-9) as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub params: ModelParams,
    pub pair: Pair,
    pub variant: Variant,
    pub grid: TimeGrid,
    pub states: Vec<XState>,
    pub values: Vec<CorrelationTriple>,
}

impl TimeSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.times()
    }

    pub fn concurrence(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.concurrence).collect()
    }

    pub fn discord(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.discord).collect()
    }

    pub fn classical(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.classical).collect()
    }
}

/// Reduced state and measures at one time.
pub fn point(
    params: &ModelParams,
    pair: Pair,
    variant: Variant,
    t: f64,
    spec: &QuadratureSpec,
    opt: &OptimizerSettings,
) -> Result<(XState, CorrelationTriple)> {
    let x = correlators::rho(params, pair, variant, t, spec)?;
    let triple = qinfo::correlation_triple(&x, opt).map_err(|e| e.at("correlation measures", params.lambda(), params.gamma(), t))?;
    Ok((x, triple))
}

pub fn time_series(
    params: &ModelParams,
    pair: Pair,
    variant: Variant,
    grid: TimeGrid,
    spec: &QuadratureSpec,
    opt: &OptimizerSettings,
) -> Result<TimeSeries> {
    let (states, values) = grid
        .times()
        .map(|t| point(params, pair, variant, t, spec, opt))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(TimeSeries { params: *params, pair, variant, grid, states, values })
}

/// Concurrence alone, skipping the measurement optimization.
pub fn concurrence_series(params: &ModelParams, pair: Pair, grid: TimeGrid, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    grid.times()
        .map(|t| correlators::rho(params, pair, Variant::WickDerived, t, spec).map(|x| qinfo::concurrence(&x)))
        .collect()
}

/// Nearest-neighbour classical correlation alone.
pub fn classical_series(params: &ModelParams, grid: TimeGrid, spec: &QuadratureSpec, opt: &OptimizerSettings) -> Result<Vec<f64>> {
    grid.times()
        .map(|t| {
            let x = correlators::rho_nn(params, t, spec)?;
            qinfo::classical_correlation(&x, opt)
                .map(|(c, _)| c)
                .map_err(|e| e.at("classical correlation", params.lambda(), params.gamma(), t))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub found: bool,
    /// Grid index of the peak sample.
    pub index: usize,
    /// Parabolically refined time and value.
    pub t_star: f64,
    pub value: f64,
}

impl PeakReport {
    pub const NOT_FOUND: Self = Self { found: false, index: 0, t_star: f64::NAN, value: f64::NAN };
}

/// First interior sample strictly above both neighbours whose topographic
/// prominence reaches `prominence`. Time and height are refined by the
/// parabola through the peak and its two neighbours.
pub fn first_local_max(values: &[f64], dt: f64, prominence: f64) -> PeakReport {
    let n = values.len();
    let mut left_min = match values.first() {
        Some(&v) => v,
        None => return PeakReport::NOT_FOUND,
    };
    for i in 1..n.saturating_sub(1) {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        if y1 > y0 && y1 > y2 {
            let mut right_min = y2;
            for &v in &values[i + 1..] {
                if v > y1 {
                    break;
                }
                right_min = right_min.min(v);
            }
            if y1 - left_min.max(right_min) >= prominence {
                let denom = y0 - 2.0 * y1 + y2;
                let offset = 0.5 * (y0 - y2) / denom;
                return PeakReport {
                    found: true,
                    index: i,
                    t_star: (i as f64 + offset) * dt,
                    value: y1 - 0.25 * (y0 - y2) * offset,
                };
            }
        }
        left_min = left_min.min(y1);
    }
    PeakReport::NOT_FOUND
}

/// First maximum of the nearest-neighbour classical correlation.
pub fn cmax_point(params: &ModelParams, grid: TimeGrid, spec: &QuadratureSpec, opt: &OptimizerSettings) -> Result<PeakReport> {
    let c = classical_series(params, grid, spec, opt)?;
    Ok(first_local_max(&c, grid.dt, DEFAULT_PROMINENCE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmaxPoint {
    pub lambda: f64,
    pub peak: PeakReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmaxCurve {
    pub gamma: f64,
    pub points: Vec<CmaxPoint>,
    /// Coupling with the largest first maximum; `None` if no λ had a peak.
    pub lambda_star: Option<f64>,
}

impl CmaxCurve {
    pub fn from_points(gamma: f64, points: Vec<CmaxPoint>) -> Self {
        let lambda_star = points
            .iter()
            .filter(|p| p.peak.found)
            .fold(None::<&CmaxPoint>, |best, p| match best {
                Some(b) if b.peak.value >= p.peak.value => Some(b),
                _ => Some(p),
            })
            .map(|p| p.lambda);
        Self { gamma, points, lambda_star }
    }
}

fn check_anisotropic(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma", "scan needs gamma in (0, 1]"));
    }
    Ok(())
}

/// `C_max(λ)` over a coupling grid and its argmax.
pub fn cmax_curve(gamma: f64, lambdas: &[f64], grid: TimeGrid, spec: &QuadratureSpec, opt: &OptimizerSettings) -> Result<CmaxCurve> {
    check_anisotropic(gamma)?;
    let points = lambdas
        .iter()
        .map(|&lambda| {
            let params = ModelParams::new(lambda, gamma)?;
            Ok(CmaxPoint { lambda, peak: cmax_point(&params, grid, spec, opt)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CmaxCurve::from_points(gamma, points))
}

/// Length of the longest run of grid times with zero concurrence, measured
/// as `(samples - 1) · dt`.
pub fn longest_zero_interval(concurrence: &[f64], dt: f64) -> f64 {
    let mut best = 0usize;
    let mut run = 0usize;
    for &e in concurrence {
        if e < ZERO_CONCURRENCE {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best.saturating_sub(1) as f64 * dt
}

/// Nearest-neighbour sudden-death classifier at one coupling.
pub fn zero_interval(params: &ModelParams, grid: TimeGrid, spec: &QuadratureSpec) -> Result<f64> {
    let e = concurrence_series(params, Pair::Nearest, grid, spec)?;
    Ok(longest_zero_interval(&e, grid.dt))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub gamma: f64,
    pub lambdas: Vec<f64>,
    /// Longest zero-concurrence interval at each coupling.
    pub zero_intervals: Vec<f64>,
    /// Midpoint of the steepest rise of the classifier.
    pub lambda_b: f64,
    /// Width of the grid cell containing `lambda_b`.
    pub uncertainty: f64,
}

impl BoundaryReport {
    pub fn from_classifier(gamma: f64, lambdas: Vec<f64>, zero_intervals: Vec<f64>) -> Result<Self> {
        if lambdas.len() != zero_intervals.len() || lambdas.len() < 2 {
            return Err(Error::invalid("lambda_grid", "needs at least two couplings"));
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..lambdas.len() - 1 {
            let slope = (zero_intervals[i + 1] - zero_intervals[i]) / (lambdas[i + 1] - lambdas[i]);
            if slope > 0.0 && best.is_none_or(|(_, s)| slope > s) {
                best = Some((i, slope));
            }
        }
        let (i, _) = best.ok_or_else(|| {
            Error::Degenerate(format!("zero-concurrence classifier never rises over the grid (gamma = {gamma})"))
        })?;
        Ok(Self {
            gamma,
            lambda_b: 0.5 * (lambdas[i] + lambdas[i + 1]),
            uncertainty: lambdas[i + 1] - lambdas[i],
            lambdas,
            zero_intervals,
        })
    }
}

/// Coupling separating persistent from quickly dying nearest-neighbour
/// entanglement.
pub fn entanglement_boundary(gamma: f64, lambdas: &[f64], grid: TimeGrid, spec: &QuadratureSpec) -> Result<BoundaryReport> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", "must lie in [0, 1]"));
    }
    let zero_intervals = lambdas
        .iter()
        .map(|&l| zero_interval(&ModelParams::new(l, gamma)?, grid, spec))
        .collect::<Result<Vec<_>>>()?;
    BoundaryReport::from_classifier(gamma, lambdas.to_vec(), zero_intervals)
}

/// First grid time with next-nearest entanglement; `None` if there is none
/// within the horizon.
pub fn nnn_onset(params: &ModelParams, grid: TimeGrid, spec: &QuadratureSpec) -> Result<Option<f64>> {
    for t in grid.times() {
        let x = correlators::rho_nnn(params, t, spec, Variant::WickDerived)?;
        if qinfo::concurrence(&x) >= ZERO_CONCURRENCE {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnnScan {
    pub gamma: f64,
    pub lambdas: Vec<f64>,
    pub onsets: Vec<Option<f64>>,
    /// Maximal `[first, last]` coupling runs with no entanglement at all.
    pub dead_bands: Vec<(f64, f64)>,
}

impl NnnScan {
    pub fn from_onsets(gamma: f64, lambdas: Vec<f64>, onsets: Vec<Option<f64>>) -> Self {
        let mut dead_bands = Vec::new();
        let mut open: Option<usize> = None;
        for (i, onset) in onsets.iter().enumerate() {
            match (onset, open) {
                (None, None) => open = Some(i),
                (Some(_), Some(s)) => {
                    dead_bands.push((lambdas[s], lambdas[i - 1]));
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(s) = open {
            dead_bands.push((lambdas[s], lambdas[lambdas.len() - 1]));
        }
        Self { gamma, lambdas, onsets, dead_bands }
    }

    /// Couplings where entanglement appears only after a finite delay.
    pub fn delayed_onsets(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambdas
            .iter()
            .zip(&self.onsets)
            .filter_map(|(&l, o)| o.filter(|&t| t > 0.0).map(|t| (l, t)))
    }
}

pub fn nnn_onset_and_deadband(gamma: f64, lambdas: &[f64], grid: TimeGrid, spec: &QuadratureSpec) -> Result<NnnScan> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", "must lie in [0, 1]"));
    }
    let onsets = lambdas
        .iter()
        .map(|&l| nnn_onset(&ModelParams::new(l, gamma)?, grid, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(NnnScan::from_onsets(gamma, lambdas.to_vec(), onsets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;
    use alloc::vec;
    use libm::sin;

    #[test]
    fn grid_lengths() {
        assert_eq!(TimeGrid::new(25.0, 0.01).unwrap().len(), 2501);
        assert_eq!(TimeGrid::new(1.0, 0.3).unwrap().len(), 4);
        assert!(TimeGrid::new(1.0, 0.0).is_err());
        assert_eq!(uniform_grid(0.7, 1.0, 0.01).unwrap().len(), 31);
        assert_eq!(uniform_grid(0.5, 1.5, 0.01).unwrap().len(), 101);
    }

    #[test]
    fn peak_of_sine() {
        let dt = 0.01;
        let v: Vec<f64> = (0..=628).map(|i| sin(i as f64 * dt)).collect();
        let p = first_local_max(&v, dt, DEFAULT_PROMINENCE);
        assert!(p.found);
        assert!((p.t_star - FRAC_PI_2).abs() < 1e-4);
        assert!((p.value - 1.0).abs() < 1e-6);
        assert!(p.value >= v[p.index - 1] && p.value >= v[p.index + 1]);
    }

    #[test]
    fn monotone_has_no_peak() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(!first_local_max(&v, 0.1, DEFAULT_PROMINENCE).found);
        assert!(!first_local_max(&[], 0.1, DEFAULT_PROMINENCE).found);
    }

    #[test]
    fn shallow_ripple_is_skipped() {
        let v = [0.0, 1.0, 1.0 - 1e-9, 1.0 + 1e-9, 0.5, 2.0, 0.0];
        let p = first_local_max(&v, 1.0, DEFAULT_PROMINENCE);
        assert_eq!(p.index, 3);
        let p = first_local_max(&v, 1.0, 0.0);
        assert_eq!(p.index, 1);
    }

    #[test]
    fn zero_interval_lengths() {
        assert_eq!(longest_zero_interval(&[0.0, 0.1, 0.0, 0.0, 0.0, 0.2], 0.5), 1.0);
        assert_eq!(longest_zero_interval(&[0.1, 0.2], 0.5), 0.0);
    }

    #[test]
    fn boundary_from_classifier() {
        let r = BoundaryReport::from_classifier(1.0, vec![0.8, 0.81, 0.82, 0.83], vec![1.0, 1.1, 9.0, 9.5]).unwrap();
        assert!((r.lambda_b - 0.815).abs() < 1e-12);
        assert!((r.uncertainty - 0.01).abs() < 1e-12);
        let flat = BoundaryReport::from_classifier(0.0, vec![0.8, 0.9], vec![5.0, 5.0]);
        assert!(matches!(flat, Err(Error::Degenerate(_))));
    }

    #[test]
    fn dead_bands_are_maximal_runs() {
        let s = NnnScan::from_onsets(
            1.0,
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            vec![Some(1.0), None, None, Some(0.0), None, None],
        );
        assert_eq!(s.dead_bands, vec![(0.2, 0.3), (0.5, 0.6)]);
        assert_eq!(s.delayed_onsets().collect::<Vec<_>>(), vec![(0.1, 1.0)]);
    }

    #[test]
    fn cmax_argmax_ignores_missing_peaks() {
        let found = |v| PeakReport { found: true, index: 1, t_star: 1.0, value: v };
        let c = CmaxCurve::from_points(
            1.0,
            vec![
                CmaxPoint { lambda: 0.9, peak: found(0.2) },
                CmaxPoint { lambda: 1.0, peak: PeakReport::NOT_FOUND },
                CmaxPoint { lambda: 1.1, peak: found(0.3) },
            ],
        );
        assert_eq!(c.lambda_star, Some(1.1));
    }
}

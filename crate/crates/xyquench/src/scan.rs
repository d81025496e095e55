//! Parallel versions of the core scans.
//!
//! Work items are independent; results are buffered by index and any error
//! reported is the one at the lowest index, so output never depends on the
//! number of workers or on scheduling.

use rayon::prelude::*;
use xyquench_core::dynamics::{
    self, BoundaryReport, CmaxCurve, CmaxPoint, NnnScan, TimeGrid, TimeSeries,
};
use xyquench_core::{Error, ModelParams, OptimizerSettings, Pair, QuadratureSpec, Result, Variant};

pub struct Pool {
    inner: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let inner = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Self { inner })
    }

    pub fn workers(&self) -> usize {
        self.inner.current_num_threads()
    }

    /// `items.map(f)` in input order; on failure, the first error by index.
    pub fn try_map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync,
    {
        let results: Vec<Result<R>> = self.inner.install(|| items.par_iter().map(&f).collect());
        results.into_iter().collect()
    }
}

fn params(lambda: f64, gamma: f64) -> Result<ModelParams> {
    ModelParams::new(lambda, gamma)
}

/// One time series, parallel over time points.
pub fn time_series(
    pool: &Pool,
    params: &ModelParams,
    pair: Pair,
    variant: Variant,
    grid: TimeGrid,
    spec: &QuadratureSpec,
    opt: &OptimizerSettings,
) -> Result<TimeSeries> {
    let times: Vec<f64> = grid.times().collect();
    let points = pool.try_map(&times, |&t| dynamics::point(params, pair, variant, t, spec, opt))?;
    let (states, values) = points.into_iter().unzip();
    Ok(TimeSeries { params: *params, pair, variant, grid, states, values })
}

/// Full time series at every `(γ, λ)`, γ-major.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    pool: &Pool,
    gammas: &[f64],
    lambdas: &[f64],
    pair: Pair,
    variant: Variant,
    grid: TimeGrid,
    spec: &QuadratureSpec,
    opt: &OptimizerSettings,
) -> Result<Vec<TimeSeries>> {
    let cells: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| lambdas.iter().map(move |&l| (g, l))).collect();
    pool.try_map(&cells, |&(g, l)| dynamics::time_series(&params(l, g)?, pair, variant, grid, spec, opt))
}

pub fn cmax_curve(
    pool: &Pool,
    gamma: f64,
    lambdas: &[f64],
    grid: TimeGrid,
    spec: &QuadratureSpec,
    opt: &OptimizerSettings,
) -> Result<CmaxCurve> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter { field: "gamma", reason: "scan needs gamma in (0, 1]".into() });
    }
    let points = pool.try_map(lambdas, |&lambda| {
        Ok(CmaxPoint { lambda, peak: dynamics::cmax_point(&params(lambda, gamma)?, grid, spec, opt)? })
    })?;
    Ok(CmaxCurve::from_points(gamma, points))
}

/// Longest zero-concurrence interval of the nearest pair at each λ.
pub fn zero_intervals(pool: &Pool, gamma: f64, lambdas: &[f64], grid: TimeGrid, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    pool.try_map(lambdas, |&l| dynamics::zero_interval(&params(l, gamma)?, grid, spec))
}

pub fn entanglement_boundary(
    pool: &Pool,
    gamma: f64,
    lambdas: &[f64],
    grid: TimeGrid,
    spec: &QuadratureSpec,
) -> Result<BoundaryReport> {
    let zi = zero_intervals(pool, gamma, lambdas, grid, spec)?;
    BoundaryReport::from_classifier(gamma, lambdas.to_vec(), zi)
}

pub fn nnn_onset_and_deadband(
    pool: &Pool,
    gamma: f64,
    lambdas: &[f64],
    grid: TimeGrid,
    spec: &QuadratureSpec,
) -> Result<NnnScan> {
    let onsets = pool.try_map(lambdas, |&l| dynamics::nnn_onset(&params(l, gamma)?, grid, spec))?;
    Ok(NnnScan::from_onsets(gamma, lambdas.to_vec(), onsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_input_order() {
        let pool = Pool::new(4).unwrap();
        let items: Vec<u64> = (0..1000).collect();
        let out = pool.try_map(&items, |&i| Ok(i * i)).unwrap();
        assert_eq!(out, items.iter().map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn first_error_by_index_wins() {
        let pool = Pool::new(4).unwrap();
        let items: Vec<usize> = (0..200).collect();
        let err = pool
            .try_map(&items, |&i| if i % 7 == 3 { Err(Error::Degenerate(format!("{i}"))) } else { Ok(i) })
            .unwrap_err();
        assert_eq!(err, Error::Degenerate("3".into()));
    }

    #[test]
    fn parallel_series_matches_sequential() {
        let pool = Pool::new(3).unwrap();
        let p = ModelParams::new(0.9, 0.8).unwrap();
        let grid = TimeGrid::new(1.0, 0.1).unwrap();
        let (spec, opt) = (QuadratureSpec::default(), OptimizerSettings::default());
        let par = time_series(&pool, &p, Pair::NextNearest, Variant::WickDerived, grid, &spec, &opt).unwrap();
        let seq = dynamics::time_series(&p, Pair::NextNearest, Variant::WickDerived, grid, &spec, &opt).unwrap();
        assert_eq!(par, seq);
    }
}

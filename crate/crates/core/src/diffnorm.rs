//! Difference-based quantities for dyadic step functions: the Morrey norm
//! `L^p_tau`, exact integrals of `|Delta_h^M f|^p` over dyadic cubes, a
//! discretised difference seminorm, and the lower-bound witness showing that
//! the indicator of the unit cube has infinite `s = 1/p, q < inf` seminorm.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::dyadic::{floor_shift, DyadicCube, MAX_LEVEL};
use crate::haar::DyadicStepFunction;
use crate::harness::fit_slope_linear;
use crate::seqnorm::{box_offsets, BesovParams};
use crate::{approx_eq, Error, Result};

/// Sampling of the scales `t` and of the shells `t/2 <= |h| < t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceGrid {
    /// Decreasing dyadic scales in `(0, 2]`.
    pub t_values: Vec<f64>,
    pub h_samples_per_shell: usize,
    /// Difference order `M >= 1`.
    pub order: usize,
    /// Levels `(min, max)` of the outer cubes `P`.
    pub cube_levels: (i32, i32),
}

impl DifferenceGrid {
    /// Scales `t = 2^{-1}, ..., 2^{-octaves}`.
    pub fn octaves(octaves: u32, h_samples_per_shell: usize, order: usize) -> Result<Self> {
        let grid = Self {
            t_values: (1..=octaves).map(|k| (-(k as f64)).exp2()).collect(),
            h_samples_per_shell,
            order,
            cube_levels: (-1, 1),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_cube_levels(mut self, min: i32, max: i32) -> Self {
        self.cube_levels = (min, max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::invalid("difference order M must be at least 1"));
        }
        if self.h_samples_per_shell == 0 {
            return Err(Error::invalid("need at least one sample per shell"));
        }
        for w in self.t_values.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::invalid("t values must be strictly decreasing"));
            }
        }
        for &t in &self.t_values {
            let e = t.log2();
            if !(t > 0.0 && t <= 2.0 && e == e.round()) {
                return Err(Error::invalid(format!("t = {t} is not a dyadic scale in (0, 2]")));
            }
        }
        let (lo, hi) = self.cube_levels;
        if lo > hi || lo < -MAX_LEVEL || hi > MAX_LEVEL {
            return Err(Error::invalid(format!("invalid cube level range ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Deterministic shell samples for scale `t` in dimension `n`. The first
/// sample is always `(-t/2, 0, ..., 0)`; magnitudes cover `[t/2, t)` and the
/// last one is `t (1 - 2^{-12})`.
pub fn shell_samples(t: f64, n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count + 1);
    let mut witness = vec![0.0; n];
    witness[0] = -t / 2.0;
    out.push(witness);
    let directions = 2 * n + usize::from(n > 1) * 2;
    for k in 0..count {
        let r = if k + 1 == count {
            t * (1.0 - (-12.0f64).exp2())
        } else {
            t / 2.0 * (1.0 + k as f64 / count as f64)
        };
        let d = k % directions;
        let mut h = vec![0.0; n];
        if d < 2 * n {
            h[d / 2] = if d.is_multiple_of(2) { -r } else { r };
        } else {
            let sign = if d == 2 * n { 1.0 } else { -1.0 };
            let c = r / (n as f64).sqrt();
            h.iter_mut().for_each(|x| *x = sign * c);
        }
        out.push(h);
    }
    out
}

fn binomial(m: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Aggregate of `|g|` over a region: `int |g|^p` or `ess sup |g|`.
#[derive(Clone, Copy)]
struct PowerAgg {
    p: f64,
}

impl PowerAgg {
    fn add(self, acc: &mut f64, value: f64, volume: f64) {
        if volume <= 0.0 {
            return;
        }
        if self.p.is_infinite() {
            *acc = acc.max(value.abs());
        } else if value != 0.0 {
            *acc += value.abs().powf(self.p) * volume;
        }
    }

    /// `(aggregate)^{1/p}`.
    fn root(self, acc: f64) -> f64 {
        if self.p.is_infinite() {
            acc
        } else {
            acc.powf(1.0 / self.p)
        }
    }
}

/// Range of nonzero cell offsets per axis, or `None` for `f = 0`.
fn support_range(f: &DyadicStepFunction) -> Option<(Vec<i64>, Vec<i64>)> {
    let n = f.dim();
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for m in f.cells().keys() {
        for k in 0..n {
            lo[k] = lo[k].min(m[k]);
            hi[k] = hi[k].max(m[k]);
        }
    }
    (!f.cells().is_empty()).then_some((lo, hi))
}

/// Exact `int_P |Delta_h^M f|^p` (or the essential sup for `p = inf`).
///
/// `Delta_h^M f` is constant on the boxes cut out by the cell boundaries of
/// `f` shifted by `-c h`, `c = 0..=M`; each such box is evaluated at its
/// midpoint.
pub fn difference_integral(f: &DyadicStepFunction, h: &[f64], order: usize, cube: &DyadicCube, p: f64) -> Result<f64> {
    let n = f.dim();
    if h.len() != n || cube.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if h.len() != n { h.len() } else { cube.dim() },
        });
    }
    let Some((lo, hi)) = support_range(f) else {
        return Ok(0.0);
    };
    let agg = PowerAgg { p };
    let side = (-(f.resolution() as f64)).exp2();
    let scale = (f.resolution() as f64).exp2();
    let p_lo = cube.lower_corner();
    let p_hi = cube.upper_corner();

    let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut axis = vec![p_lo[k], p_hi[k]];
        for c in 0..=order {
            let shift = c as f64 * h[k];
            for m in lo[k]..=hi[k] + 1 {
                let b = m as f64 * side - shift;
                if b > p_lo[k] && b < p_hi[k] {
                    axis.push(b);
                }
            }
        }
        axis.sort_by(f64::total_cmp);
        axis.dedup();
        cuts.push(axis);
    }

    let coeffs: Vec<f64> = (0..=order)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(order, i)
        })
        .collect();

    let mut acc = 0.0;
    let mut idx = vec![0usize; n];
    let mut mid = vec![0.0; n];
    let mut point = vec![0i64; n];
    'outer: loop {
        let mut volume = 1.0;
        for k in 0..n {
            let (a, b) = (cuts[k][idx[k]], cuts[k][idx[k] + 1]);
            mid[k] = 0.5 * (a + b);
            volume *= b - a;
        }
        let mut value = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            let shift = (order - i) as f64;
            for k in 0..n {
                point[k] = ((mid[k] + shift * h[k]) * scale).floor() as i64;
            }
            value += c * f.value_at_cell(&point);
        }
        agg.add(&mut acc, value, volume);

        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] + 1 < cuts[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(acc)
}

/// `sup_{P dyadic, |P| >= 1} |P|^{-tau} (int_P |f|^p)^{1/p}`.
///
/// Levels are walked from 0 downwards; once every ancestor offset is `-1` or
/// `0` further coarsening cannot change the integrals and only shrinks the
/// prefactor, so the walk stops.
pub fn lp_tau_norm(f: &DyadicStepFunction, p: f64, tau: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::invalid(format!("p must lie in (0, inf], got {p}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be finite and >= 0, got {tau}")));
    }
    let agg = PowerAgg { p };
    let n = f.dim() as f64;
    let volume = f.cell_volume();
    let r = f.resolution();
    let mut best = 0.0f64;
    let mut level = 0;
    loop {
        let shift = (r - level) as u32;
        let mut sums: std::collections::BTreeMap<Vec<i64>, f64> = std::collections::BTreeMap::new();
        for (m, v) in f.cells() {
            let key: Vec<i64> = m.iter().map(|&x| floor_shift(x, shift)).collect();
            agg.add(sums.entry(key).or_insert(0.0), *v, volume);
        }
        let factor = (level as f64 * n * tau).exp2();
        for acc in sums.values() {
            best = best.max(factor * agg.root(*acc));
        }
        let settled = sums.keys().all(|k| k.iter().all(|&x| x == 0 || x == -1));
        if settled || level <= -MAX_LEVEL {
            break;
        }
        level -= 1;
    }
    Ok(best)
}

/// Discretised difference seminorm: one term per octave with weight `ln 2`
/// replacing `dt/t`, shells sampled by [`shell_samples`], outer cubes with
/// levels in `grid.cube_levels` meeting the (enlarged) support.
pub fn difference_seminorm(f: &DyadicStepFunction, params: &BesovParams, grid: &DifferenceGrid) -> Result<f64> {
    params.validate()?;
    grid.validate()?;
    if f.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: f.dim(),
        });
    }
    let Some((lo, hi)) = support_range(f) else {
        return Ok(0.0);
    };
    let n = params.n;
    let p = params.p;
    let q = params.q;
    let agg = PowerAgg { p };
    let reach = grid.order as f64 * grid.t_values.first().copied().unwrap_or(0.0);
    let side = (-(f.resolution() as f64)).exp2();
    let shells: Vec<(f64, Vec<Vec<f64>>)> = grid
        .t_values
        .iter()
        .map(|&t| (t, shell_samples(t, n, grid.h_samples_per_shell)))
        .collect();

    let mut best = 0.0f64;
    for level in grid.cube_levels.0..=grid.cube_levels.1 {
        let scale = (level as f64).exp2();
        let cube_side = 1.0 / scale;
        let first: Vec<i64> = lo
            .iter()
            .map(|&m| ((m as f64 * side - reach) * scale).floor() as i64)
            .collect();
        let last: Vec<i64> = hi
            .iter()
            .map(|&m| (((m + 1) as f64 * side + reach) * scale).ceil() as i64 - 1)
            .collect();
        let factor = (level as f64 * n as f64 * params.tau).exp2();
        for offset in box_offsets(&first, &last) {
            let cube = DyadicCube::new(level, offset)?;
            let mut total = 0.0f64;
            for (t, samples) in &shells {
                if *t > 2.0 * cube_side.min(1.0) {
                    continue;
                }
                let mut sup = 0.0f64;
                for h in samples {
                    sup = sup.max(difference_integral(f, h, grid.order, &cube, p)?);
                }
                let g = t.powf(-params.s) * agg.root(sup);
                if q.is_infinite() {
                    total = total.max(g);
                } else {
                    total += g.powf(q) * LN_2;
                }
            }
            let total = if q.is_infinite() { total } else { total.powf(1.0 / q) };
            best = best.max(factor * total);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub t: f64,
    /// `int_{Q_{0,0}} |Delta_h^M X|^p` at `h = (-t/2, 0, ..., 0)`.
    pub witness_integral: f64,
    /// Largest integral over all shell samples.
    pub shell_sup: f64,
    /// `shell_sup >= t/2`.
    pub lower_bound_holds: bool,
    /// `t^{-sq} (witness)^{q/p} ln 2`, or `t^{-s} (witness)^{1/p}` for `q = inf`.
    pub term: f64,
    /// Running sum of the terms (running max for `q = inf`).
    pub partial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub rows: Vec<WitnessRow>,
    /// Least-squares slope of the partial sums against the octave count.
    pub fitted_growth: Option<f64>,
    /// `ln 2 * 2^{-q/p}` for `q < inf`, zero growth otherwise.
    pub expected_growth: f64,
    pub bounded: bool,
}

/// Partial sums of the lower bound for the difference seminorm of the unit
/// cube indicator at `s = 1/p`, cube `P = Q_{0,0}`.
pub fn chi_divergence_witness(params: &BesovParams, grid: &DifferenceGrid) -> Result<WitnessReport> {
    params.validate()?;
    grid.validate()?;
    let n = params.n;
    let inv_p = params.inv_p();
    if !approx_eq(params.s, inv_p) {
        return Err(Error::OutsideRegion(format!(
            "witness requires s = 1/p = {inv_p}, got s = {}",
            params.s
        )));
    }
    let floor = (n as f64 - 1.0) / n as f64;
    if !(params.p > floor) {
        return Err(Error::OutsideRegion(format!(
            "witness requires p > (n-1)/n = {floor}, got p = {}",
            params.p
        )));
    }
    let chi = DyadicStepFunction::unit_indicator(n, 0)?;
    let unit = DyadicCube::unit(n);
    let agg = PowerAgg { p: params.p };
    let q = params.q;
    let mut rows = Vec::with_capacity(grid.t_values.len());
    let mut partial = 0.0f64;
    for &t in &grid.t_values {
        let samples = shell_samples(t, n, grid.h_samples_per_shell);
        let witness_integral = difference_integral(&chi, &samples[0], grid.order, &unit, params.p)?;
        let mut shell_sup = 0.0f64;
        for h in &samples {
            shell_sup = shell_sup.max(difference_integral(&chi, h, grid.order, &unit, params.p)?);
        }
        let lower = if params.p.is_infinite() { 1.0 } else { t / 2.0 };
        let g = t.powf(-params.s) * agg.root(witness_integral);
        let term = if q.is_infinite() { g } else { g.powf(q) * LN_2 };
        partial = if q.is_infinite() {
            partial.max(term)
        } else {
            partial + term
        };
        rows.push(WitnessRow {
            t,
            witness_integral,
            shell_sup,
            lower_bound_holds: shell_sup >= lower,
            term,
            partial,
        });
    }
    let fitted_growth = if rows.len() >= 3 {
        let xs: Vec<f64> = (1..=rows.len()).map(|k| k as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.partial).collect();
        Some(fit_slope_linear(&xs, &ys)?)
    } else {
        None
    };
    let expected_growth = if q.is_infinite() {
        0.0
    } else {
        LN_2 * (-q * inv_p).exp2()
    };
    Ok(WitnessReport {
        rows,
        fitted_growth,
        expected_growth,
        bounded: q.is_infinite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_tau_examples() {
        let chi = DyadicStepFunction::unit_indicator(2, 2).unwrap();
        assert_eq!(lp_tau_norm(&chi, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(lp_tau_norm(&chi, 1.0, 0.7).unwrap(), 1.0);
        let mut two = DyadicStepFunction::new(1, 0).unwrap();
        two.set(vec![0], 2.0).unwrap();
        assert_eq!(lp_tau_norm(&two, 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(lp_tau_norm(&two, f64::INFINITY, 0.3).unwrap(), 2.0);
    }

    #[test]
    fn lp_tau_spreads_over_large_cubes() {
        // Mass in Q_{0,0} and Q_{0,1}: at tau = 0 the cube [0,2) sees both.
        let mut f = DyadicStepFunction::new(1, 0).unwrap();
        f.set(vec![0], 1.0).unwrap();
        f.set(vec![1], 1.0).unwrap();
        assert_eq!(lp_tau_norm(&f, 1.0, 0.0).unwrap(), 2.0);
        // At tau = 1 the prefactor 1/2 exactly cancels.
        assert_eq!(lp_tau_norm(&f, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn difference_of_zero_is_zero() {
        let f = DyadicStepFunction::new(1, 3).unwrap();
        let params = BesovParams::new(1.0, 1.0, 1.0, 0.0, 1).unwrap();
        let grid = DifferenceGrid::octaves(4, 3, 1).unwrap();
        assert_eq!(difference_seminorm(&f, &params, &grid).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_difference() {
        let chi = DyadicStepFunction::unit_indicator(1, 0).unwrap();
        let v = difference_integral(&chi, &[-3.0 / 16.0], 1, &DyadicCube::unit(1), 1.0).unwrap();
        assert_eq!(v, 3.0 / 16.0);
        // Second differences: |Delta| = 1 on [0, 3/16) and on [3/16, 3/8).
        let v = difference_integral(&chi, &[-3.0 / 16.0], 2, &DyadicCube::unit(1), 1.0).unwrap();
        assert_eq!(v, 3.0 / 8.0);
    }

    #[test]
    fn witness_sample_first() {
        let s = shell_samples(0.25, 2, 5);
        assert_eq!(s[0], vec![-0.125, 0.0]);
        for h in &s {
            let r = h.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((0.125 - 1e-15..0.25).contains(&r), "{r}");
        }
        let last = s.last().unwrap();
        let r = last.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(r > 0.25 * 0.999);
    }

    #[test]
    fn witness_sums() {
        let params = BesovParams::new(0.5, 2.0, 2.0, 0.0, 1).unwrap();
        let r8 = chi_divergence_witness(&params, &DifferenceGrid::octaves(8, 4, 1).unwrap()).unwrap();
        let r16 = chi_divergence_witness(&params, &DifferenceGrid::octaves(16, 4, 1).unwrap()).unwrap();
        let last8 = r8.rows.last().unwrap().partial;
        let last16 = r16.rows.last().unwrap().partial;
        assert!((last8 - 8.0 * LN_2 / 2.0).abs() < 1e-12);
        assert!((last16 - 2.0 * last8).abs() < 1e-12);
        let r1 = chi_divergence_witness(&params, &DifferenceGrid::octaves(1, 4, 1).unwrap()).unwrap();
        assert!((r1.rows[0].partial - LN_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn witness_sup_path() {
        let params = BesovParams::new(1.0, 1.0, f64::INFINITY, 0.0, 2).unwrap();
        let r = chi_divergence_witness(&params, &DifferenceGrid::octaves(6, 3, 1).unwrap()).unwrap();
        assert!(r.rows.iter().all(|row| row.partial == 0.5));
        let params = BesovParams::new(0.5, 2.0, f64::INFINITY, 0.0, 1).unwrap();
        let r = chi_divergence_witness(&params, &DifferenceGrid::octaves(6, 3, 1).unwrap()).unwrap();
        assert!(r.rows.iter().all(|row| (row.partial - 0.5f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn witness_rejections() {
        let grid = DifferenceGrid::octaves(4, 2, 1).unwrap();
        let off = BesovParams::new(0.4, 2.0, 2.0, 0.0, 1).unwrap();
        assert!(matches!(
            chi_divergence_witness(&off, &grid),
            Err(Error::OutsideRegion(_))
        ));
        let small_p = BesovParams::new(2.0, 0.5, 2.0, 0.0, 2).unwrap();
        assert!(matches!(
            chi_divergence_witness(&small_p, &grid),
            Err(Error::OutsideRegion(_))
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(DifferenceGrid::octaves(3, 0, 1).is_err());
        assert!(DifferenceGrid::octaves(3, 2, 0).is_err());
        let mut g = DifferenceGrid::octaves(3, 2, 1).unwrap();
        g.t_values = vec![0.5, 0.3];
        assert!(g.validate().is_err());
    }
}

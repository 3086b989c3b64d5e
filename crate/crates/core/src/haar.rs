//! Exact Haar analysis.
//!
//! The one-dimensional generators are `X = 1_{[0,1)}` and
//! `h = 1_{[0,1/2)} - 1_{[1/2,1)}`. The wavelet of type `i` at level `j` and
//! offset `m` is `2^{jn/2} prod_k g_k(2^j x_k - m_k)` where `g_k = h` when bit
//! `k` of `i` is set and `g_k = X` otherwise.
//!
//! Every inner product of a box with a Haar function is a product of
//! one-dimensional integrals of piecewise constant functions, which are
//! evaluated in closed form.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{floor_shift, MAX_LEVEL};
use crate::seqnorm::{box_offsets, CoefficientField};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HaarKind {
    Scaling,
    /// Type index in `[1, 2^n - 1]`.
    Wavelet(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HaarIndex {
    pub kind: HaarKind,
    pub level: i32,
    pub offset: Vec<i64>,
}

impl HaarIndex {
    pub fn scaling(offset: Vec<i64>) -> Self {
        Self {
            kind: HaarKind::Scaling,
            level: 0,
            offset,
        }
    }

    pub fn wavelet(type_i: u32, level: i32, offset: Vec<i64>) -> Self {
        Self {
            kind: HaarKind::Wavelet(type_i),
            level,
            offset,
        }
    }

    fn type_bits(&self) -> u32 {
        match self.kind {
            HaarKind::Scaling => 0,
            HaarKind::Wavelet(i) => i,
        }
    }

    fn oscillates(&self, axis: usize) -> bool {
        (self.type_bits() >> axis) & 1 == 1
    }
}

/// Half-open box `prod_k [lo_k, hi_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::invalid("box must have at least one axis"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!("box axis [{a}, {b}) is empty or not finite")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    /// `[0,1)^n + shift`.
    pub fn shifted_unit(shift: &[f64]) -> Result<Self> {
        Self::new(shift.to_vec(), shift.iter().map(|s| s + 1.0).collect())
    }

    /// The dyadic cube `Q_{level,offset}` as a box.
    pub fn cube(level: i32, offset: &[i64]) -> Self {
        let side = (-(level as f64)).exp2();
        Self {
            lo: offset.iter().map(|&m| m as f64 * side).collect(),
            hi: offset.iter().map(|&m| (m + 1) as f64 * side).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Antiderivative of `X` vanishing at 0.
#[inline]
fn prim_indicator(u: f64) -> f64 {
    u.clamp(0.0, 1.0)
}

/// Antiderivative of `h` vanishing at 0 (a tent of height 1/2).
#[inline]
fn prim_oscillating(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else if u <= 0.5 {
        u
    } else {
        1.0 - u
    }
}

/// `int_a^b 2^{j/2} g(2^j x - m) dx` for `g = X` or `g = h`.
pub fn axis_integral(oscillating: bool, level: i32, m: i64, a: f64, b: f64) -> f64 {
    let scale = (level as f64).exp2();
    let u_a = scale * a - m as f64;
    let u_b = scale * b - m as f64;
    let diff = if oscillating {
        prim_oscillating(u_b) - prim_oscillating(u_a)
    } else {
        prim_indicator(u_b) - prim_indicator(u_a)
    };
    (-(level as f64) / 2.0).exp2() * diff
}

/// Value at `x` of the one-dimensional factor `g(2^j x - m)` (without the
/// normalisation).
#[inline]
fn axis_value(oscillating: bool, level: i32, m: i64, x: f64) -> f64 {
    let u = (level as f64).exp2() * x - m as f64;
    if !(0.0..1.0).contains(&u) {
        0.0
    } else if !oscillating || u < 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// Pointwise value of the Haar function.
pub fn haar_value(index: &HaarIndex, x: &[f64]) -> f64 {
    let n = index.offset.len();
    let mut value = (index.level as f64 * n as f64 / 2.0).exp2();
    for (k, &xk) in x.iter().enumerate().take(n) {
        value *= axis_value(index.oscillates(k), index.level, index.offset[k], xk);
        if value == 0.0 {
            return 0.0;
        }
    }
    value
}

/// Exact `int_box (Haar function)`.
pub fn box_coefficient(b: &AxisBox, index: &HaarIndex) -> f64 {
    let mut value = 1.0;
    for k in 0..index.offset.len() {
        value *= axis_integral(index.oscillates(k), index.level, index.offset[k], b.lo[k], b.hi[k]);
        if value == 0.0 {
            return 0.0;
        }
    }
    value
}

/// Per-axis nonzero factors `(m, X-integral, h-integral)` at one level.
fn axis_factors(level: i32, a: f64, b: f64) -> Vec<(i64, f64, f64)> {
    let scale = (level as f64).exp2();
    let first = (scale * a).floor() as i64;
    let last = (scale * b).ceil() as i64 - 1;
    (first..=last)
        .map(|m| {
            (
                m,
                axis_integral(false, level, m, a, b),
                axis_integral(true, level, m, a, b),
            )
        })
        .filter(|&(_, x, h)| x != 0.0 || h != 0.0)
        .collect()
}

/// Upper bound on how many index cubes per level [`analyze_box`] may touch.
const ANALYZE_CUBE_LIMIT: f64 = 5e7;

/// Coefficients of `1_box`: the level-0 scaling layer and all wavelet
/// coefficients with `level <= j_max`. Exact zeros are omitted.
pub fn analyze_box(b: &AxisBox, j_max: i32) -> Result<CoefficientField> {
    let n = b.dim();
    if !(0..=MAX_LEVEL).contains(&j_max) {
        return Err(Error::invalid(format!(
            "j_max must lie in [0, {MAX_LEVEL}], got {j_max}"
        )));
    }
    if n > 16 {
        return Err(Error::invalid("dimension above 16 is not supported"));
    }
    let widest: f64 = b.lo.iter().zip(&b.hi).map(|(a, c)| c - a).fold(0.0, f64::max);
    let per_axis = (j_max as f64).exp2() * widest + 2.0;
    if per_axis.powi(n as i32 - 1) * 2.0 > ANALYZE_CUBE_LIMIT {
        return Err(Error::invalid(format!(
            "box analysis at level {j_max} would touch too many cubes; lower j_max"
        )));
    }

    let mut field = CoefficientField::new(n);
    for (m, value) in scaling_layer(b) {
        field.insert_scaling(m, value)?;
    }

    let types = (1u32 << n) - 1;
    let per_level: Vec<Vec<(u32, Vec<i64>, f64)>> = (0..=j_max)
        .into_par_iter()
        .map(|level| {
            let axes: Vec<Vec<(i64, f64, f64)>> = (0..n).map(|k| axis_factors(level, b.lo[k], b.hi[k])).collect();
            let mut out = Vec::new();
            for type_i in 1..=types {
                let lists: Vec<Vec<(i64, f64)>> = axes
                    .iter()
                    .enumerate()
                    .map(|(k, list)| {
                        let osc = (type_i >> k) & 1 == 1;
                        list.iter()
                            .map(|&(m, x, h)| (m, if osc { h } else { x }))
                            .filter(|&(_, v)| v != 0.0)
                            .collect()
                    })
                    .collect();
                cartesian(&lists, |offset, value| out.push((type_i, offset, value)));
            }
            out
        })
        .collect();

    for (level, entries) in per_level.into_iter().enumerate() {
        for (type_i, offset, value) in entries {
            field.insert_wavelet(type_i, level as i32, offset, value)?;
        }
    }
    Ok(field)
}

fn scaling_layer(b: &AxisBox) -> Vec<(Vec<i64>, f64)> {
    let axes: Vec<Vec<(i64, f64)>> = (0..b.dim())
        .map(|k| {
            axis_factors(0, b.lo[k], b.hi[k])
                .into_iter()
                .map(|(m, x, _)| (m, x))
                .filter(|&(_, v)| v != 0.0)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    cartesian(&axes, |offset, value| out.push((offset, value)));
    out
}

/// Visit every combination of one entry per axis with the product of values.
fn cartesian(lists: &[Vec<(i64, f64)>], mut visit: impl FnMut(Vec<i64>, f64)) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let n = lists.len();
    let mut idx = vec![0usize; n];
    loop {
        let offset: Vec<i64> = (0..n).map(|k| lists[k][idx[k]].0).collect();
        let value: f64 = (0..n).map(|k| lists[k][idx[k]].1).product();
        visit(offset, value);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// A function constant on the cells `Q_{R,m}`; finitely many nonzero cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicStepFunction {
    n: usize,
    resolution: i32,
    cells: BTreeMap<Vec<i64>, f64>,
}

impl DyadicStepFunction {
    pub fn new(n: usize, resolution: i32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(0..MAX_LEVEL).contains(&resolution) {
            return Err(Error::invalid(format!(
                "resolution must lie in [0, {MAX_LEVEL}), got {resolution}"
            )));
        }
        Ok(Self {
            n,
            resolution,
            cells: BTreeMap::new(),
        })
    }

    /// Indicator of `Q_{0,0}` at the given resolution.
    pub fn unit_indicator(n: usize, resolution: i32) -> Result<Self> {
        let mut f = Self::new(n, resolution)?;
        let side = 1i64 << resolution;
        for offset in box_offsets(&vec![0; n], &vec![side - 1; n]) {
            f.set(offset, 1.0)?;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> i32 {
        self.resolution
    }

    pub fn cells(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.cells
    }

    pub fn set(&mut self, offset: Vec<i64>, value: f64) -> Result<()> {
        if offset.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: offset.len(),
            });
        }
        if !value.is_finite() {
            return Err(Error::invalid(format!("non-finite cell value {value}")));
        }
        if value == 0.0 {
            self.cells.remove(&offset);
        } else {
            self.cells.insert(offset, value);
        }
        Ok(())
    }

    pub fn value_at_cell(&self, offset: &[i64]) -> f64 {
        self.cells.get(offset).copied().unwrap_or(0.0)
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        let scale = (self.resolution as f64).exp2();
        let offset: Vec<i64> = x.iter().map(|&v| (v * scale).floor() as i64).collect();
        self.value_at_cell(&offset)
    }

    /// Volume of one cell, `2^{-Rn}`.
    pub fn cell_volume(&self) -> f64 {
        (-(self.resolution as f64) * self.n as f64).exp2()
    }

    /// `int |f|^p` (`p` finite).
    pub fn integral_abs_pow(&self, p: f64) -> f64 {
        self.cells.values().map(|v| v.abs().powf(p)).sum::<f64>() * self.cell_volume()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<&Vec<i64>> = self.cells.keys().chain(other.cells.keys()).collect();
        keys.into_iter()
            .map(|k| (self.value_at_cell(k) - other.value_at_cell(k)).abs())
            .fold(0.0, f64::max)
    }
}

/// Haar coefficients of a step function via the bottom-up fast transform.
/// All wavelet coefficients at levels `>= R` vanish, so only levels
/// `0..R` appear.
pub fn analyze_step(f: &DyadicStepFunction) -> Result<CoefficientField> {
    let n = f.n;
    let norm = (-(n as f64) / 2.0).exp2();
    // Scaling coefficients <f, X_{R,m}> = v 2^{-Rn/2}.
    let mut current: BTreeMap<Vec<i64>, f64> = f
        .cells
        .iter()
        .map(|(m, v)| (m.clone(), v * (-(f.resolution as f64) * n as f64 / 2.0).exp2()))
        .collect();
    let mut field = CoefficientField::new(n);
    let types = 1u32 << n;
    for level in (0..f.resolution).rev() {
        // For each parent, sums over children with sign pattern per type.
        let mut next: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
        for (m, a) in &current {
            let parent: Vec<i64> = m.iter().map(|&x| floor_shift(x, 1)).collect();
            let child_bits: u32 = m.iter().enumerate().map(|(k, &x)| ((x & 1) as u32) << k).sum();
            let slot = next.entry(parent).or_insert_with(|| vec![0.0; types as usize]);
            for (eps, acc) in slot.iter_mut().enumerate() {
                let negative = (eps as u32 & child_bits).count_ones() % 2 == 1;
                *acc += if negative { -a } else { *a };
            }
        }
        current = BTreeMap::new();
        for (parent, sums) in next {
            for (eps, sum) in sums.into_iter().enumerate() {
                let value = sum * norm;
                if eps == 0 {
                    current.insert(parent.clone(), value);
                } else if value != 0.0 {
                    field.insert_wavelet(eps as u32, level, parent.clone(), value)?;
                }
            }
        }
    }
    for (m, v) in current {
        if v != 0.0 {
            field.insert_scaling(m, v)?;
        }
    }
    Ok(field)
}

/// Window of level-`resolution` cells (offsets `lo..=hi`) on which a partial
/// sum is tabulated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepShape {
    pub resolution: i32,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl StepShape {
    /// The level-`resolution` cells of `[0,1)^n`.
    pub fn unit(n: usize, resolution: i32) -> Self {
        let side = 1i64 << resolution.clamp(0, MAX_LEVEL - 1);
        Self {
            resolution,
            lo: vec![0; n],
            hi: vec![side - 1; n],
        }
    }
}

/// Cell averages of `S_N f` on the cells of `shape`.
///
/// For `j < R` every summand is constant on level-`R` cells, so the values are
/// exact pointwise. A wavelet at level `j >= R` has mean zero over every
/// level-`R` cell and contributes nothing to the averages.
pub fn partial_sum(field: &CoefficientField, n_level: i32, shape: &StepShape) -> Result<DyadicStepFunction> {
    let n = field.dim();
    if shape.lo.len() != n || shape.hi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: shape.lo.len(),
        });
    }
    if shape.resolution < n_level {
        return Err(Error::invalid(format!(
            "grid resolution {} is coarser than the partial-sum level {n_level}",
            shape.resolution
        )));
    }
    let mut out = DyadicStepFunction::new(n, shape.resolution)?;
    let r = shape.resolution;
    let top = n_level.min(r - 1);
    let types = (1u32 << n) - 1;
    let side = (-(r as f64)).exp2();
    for cell in box_offsets(&shape.lo, &shape.hi) {
        let center: Vec<f64> = cell.iter().map(|&m| (m as f64 + 0.5) * side).collect();
        let mut value = 0.0;
        let anc0: Vec<i64> = cell.iter().map(|&m| floor_shift(m, r as u32)).collect();
        let lambda = field.scaling_value(&anc0);
        if lambda != 0.0 {
            value += lambda * haar_value(&HaarIndex::scaling(anc0), &center);
        }
        for level in 0..=top {
            let anc: Vec<i64> = cell.iter().map(|&m| floor_shift(m, (r - level) as u32)).collect();
            for type_i in 1..=types {
                let t = field.wavelet_value(type_i, level, &anc);
                if t != 0.0 {
                    value += t * haar_value(&HaarIndex::wavelet(type_i, level, anc.clone()), &center);
                }
            }
        }
        out.set(cell, value)?;
    }
    Ok(out)
}

/// `<S_N f, 1_box>`: the scaling layer plus wavelet terms with `level <= N`.
pub fn pair_with_box(field: &CoefficientField, b: &AxisBox, n_level: i32) -> Result<f64> {
    if b.dim() != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: b.dim(),
        });
    }
    let mut total = 0.0;
    for (m, v) in field.scaling() {
        total += v * box_coefficient(b, &HaarIndex::scaling(m.clone()));
    }
    for (key, v) in field.wavelet() {
        if key.level <= n_level {
            total += v * box_coefficient(b, &HaarIndex::wavelet(key.type_i, key.level, key.offset.clone()));
        }
    }
    Ok(total)
}

/// Exact `L^2` inner product of two Haar functions by summing over the cells
/// one level below the finer support, on which both are constant.
pub fn inner_product(a: &HaarIndex, b: &HaarIndex) -> Result<f64> {
    if a.offset.len() != b.offset.len() {
        return Err(Error::DimensionMismatch {
            expected: a.offset.len(),
            got: b.offset.len(),
        });
    }
    let (fine, coarse) = if a.level >= b.level { (a, b) } else { (b, a) };
    let shift = (fine.level - coarse.level) as u32;
    let nested = fine
        .offset
        .iter()
        .zip(&coarse.offset)
        .all(|(&m, &k)| floor_shift(m, shift) == k);
    if !nested {
        return Ok(0.0);
    }
    let level = fine.level + 1;
    let base: Vec<i64> = fine.offset.iter().map(|&m| 2 * m).collect();
    let top: Vec<i64> = base.iter().map(|&m| m + 1).collect();
    let side = (-(level as f64)).exp2();
    let volume = side.powi(fine.offset.len() as i32);
    let mut total = 0.0;
    for cell in box_offsets(&base, &top) {
        let center: Vec<f64> = cell.iter().map(|&m| (m as f64 + 0.5) * side).collect();
        total += haar_value(a, &center) * haar_value(b, &center);
    }
    Ok(total * volume)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_value_examples() {
        let h = HaarIndex::wavelet(1, 0, vec![0]);
        assert_eq!(haar_value(&h, &[0.25]), 1.0);
        assert_eq!(haar_value(&h, &[0.75]), -1.0);
        let x = HaarIndex::scaling(vec![0, 0]);
        assert_eq!(haar_value(&x, &[1.5, 0.5]), 0.0);
        assert_eq!(haar_value(&x, &[0.5, 0.5]), 1.0);
        let d = HaarIndex::wavelet(3, 1, vec![0, 0]);
        assert_eq!(haar_value(&d, &[0.1, 0.1]), 2.0);
        assert_eq!(haar_value(&d, &[0.3, 0.1]), -2.0);
    }

    #[test]
    fn type_one_oscillates_on_first_axis() {
        let h = HaarIndex::wavelet(1, 0, vec![0, 0]);
        assert_eq!(haar_value(&h, &[0.75, 0.25]), -1.0);
        assert_eq!(haar_value(&h, &[0.25, 0.75]), 1.0);
    }

    #[test]
    fn unit_box_scaling_is_one() {
        for n in 1..=3 {
            assert_eq!(box_coefficient(&AxisBox::unit(n), &HaarIndex::scaling(vec![0; n])), 1.0);
        }
    }

    #[test]
    fn inside_and_outside_cubes_vanish() {
        let b = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        for type_i in 1..=3 {
            assert_eq!(box_coefficient(&b, &HaarIndex::wavelet(type_i, 2, vec![1, 2])), 0.0);
            assert_eq!(box_coefficient(&b, &HaarIndex::wavelet(type_i, 2, vec![5, 2])), 0.0);
        }
    }

    #[test]
    fn shifted_box_level_one() {
        let b = AxisBox::new(vec![1.0 / 3.0], vec![4.0 / 3.0]).unwrap();
        let c = box_coefficient(&b, &HaarIndex::wavelet(1, 1, vec![0]));
        assert!((c - (-(2f64.sqrt()) / 6.0)).abs() < 1e-15, "{c}");
        // Independent check by midpoint quadrature.
        let steps = 3_000_000;
        let h = 0.5 / steps as f64;
        let idx = HaarIndex::wavelet(1, 1, vec![0]);
        let quad: f64 = (0..steps)
            .map(|k| {
                let x = (k as f64 + 0.5) * h;
                let inside = (1.0 / 3.0..4.0 / 3.0).contains(&x);
                if inside {
                    haar_value(&idx, &[x]) * h
                } else {
                    0.0
                }
            })
            .sum();
        assert!((quad - c).abs() < 1e-6, "{quad} vs {c}");
    }

    #[test]
    fn analyze_unit_box_single_entry() {
        for n in 1..=2 {
            let f = analyze_box(&AxisBox::unit(n), 5).unwrap();
            assert_eq!(f.len(), 1);
            assert_eq!(f.scaling_value(&vec![0; n]), 1.0);
        }
    }

    #[test]
    fn analyze_shifted_box_one_dimension() {
        let b = AxisBox::shifted_unit(&[1.0 / 3.0]).unwrap();
        let f = analyze_box(&b, 6).unwrap();
        for j in 1..=6 {
            let entries: Vec<f64> = f
                .wavelet()
                .iter()
                .filter(|(k, _)| k.level == j)
                .map(|(_, v)| *v)
                .collect();
            assert_eq!(entries.len(), 2, "level {j}");
            for v in entries {
                assert!(v.abs() <= (-(j as f64) / 2.0).exp2());
            }
        }
    }

    #[test]
    fn analyze_step_of_indicator() {
        let g = DyadicStepFunction::unit_indicator(2, 3).unwrap();
        let f = analyze_step(&g).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.scaling_value(&[0, 0]), 1.0);
    }

    #[test]
    fn analyze_step_matches_box_coefficients() {
        let mut g = DyadicStepFunction::new(2, 2).unwrap();
        g.set(vec![1, 2], 3.0).unwrap();
        g.set(vec![0, 0], -1.5).unwrap();
        g.set(vec![3, 3], 0.25).unwrap();
        let f = analyze_step(&g).unwrap();
        for (key, v) in f.wavelet() {
            let idx = HaarIndex::wavelet(key.type_i, key.level, key.offset.clone());
            let direct: f64 = g
                .cells()
                .iter()
                .map(|(m, c)| c * box_coefficient(&AxisBox::cube(2, m), &idx))
                .sum();
            assert!((v - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_sum_examples() {
        let mut f = CoefficientField::new(1);
        f.insert_scaling(vec![0], 1.0).unwrap();
        let s = partial_sum(&f, 0, &StepShape::unit(1, 3)).unwrap();
        assert!(s.cells().values().all(|&v| v == 1.0));
        assert_eq!(s.cells().len(), 8);
        assert!(partial_sum(&f, 4, &StepShape::unit(1, 3)).is_err());

        let boxed = analyze_box(&AxisBox::unit(2), 4).unwrap();
        let s = partial_sum(&boxed, 4, &StepShape::unit(2, 4)).unwrap();
        assert_eq!(s, DyadicStepFunction::unit_indicator(2, 4).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let unit = analyze_box(&AxisBox::unit(2), 6).unwrap();
        assert_eq!(pair_with_box(&unit, &AxisBox::unit(2), 6).unwrap(), 1.0);
        assert_eq!(
            pair_with_box(&CoefficientField::new(2), &AxisBox::unit(2), 6).unwrap(),
            0.0
        );

        let b = AxisBox::shifted_unit(&[1.0 / 3.0]).unwrap();
        let f = analyze_box(&b, 10).unwrap();
        let mut last = 0.0;
        for n in 0..=10 {
            let v = pair_with_box(&f, &b, n).unwrap();
            assert!(v >= last && v <= 1.0 + 1e-12);
            last = v;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn inner_product_examples() {
        let a = HaarIndex::wavelet(2, 1, vec![0, 1]);
        assert!((inner_product(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        let b = HaarIndex::wavelet(1, 1, vec![0, 1]);
        assert_eq!(inner_product(&a, &b).unwrap(), 0.0);
        let c = HaarIndex::wavelet(2, 3, vec![1, 5]);
        assert_eq!(inner_product(&a, &c).unwrap(), 0.0);
        let x = HaarIndex::scaling(vec![0, 0]);
        assert_eq!(inner_product(&x, &a).unwrap(), 0.0);
        assert_eq!(inner_product(&x, &x).unwrap(), 1.0);
    }
}

//! Smoothness parameters, sparse coefficient fields and the sup-over-cubes
//! sequence quasi-norms.
//!
//! For a field `t_{i,j,m}` the `b`-norm is
//!
//! ```text
//! sup_P |P|^{-tau} ( sum_{j >= max(j_P, 0)} 2^{j(s+n/2-n/p)q} sum_i ( sum_{Q_{j,m} in P} |t_{i,j,m}|^p )^{q/p} )^{1/q}
//! ```
//!
//! with the usual sup modifications when `p` or `q` is infinite. The
//! lambda-star norm adds the analogous quantity for the level-0 scaling layer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::{floor_shift, DyadicCube, MAX_LEVEL};
use crate::{Error, Result};

/// `1/x` with `1/inf = 0`.
#[inline]
pub fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// The tuple `(s, p, q, tau, n)`; `p` and `q` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    #[serde(with = "extended")]
    pub p: f64,
    #[serde(with = "extended")]
    pub q: f64,
    pub tau: f64,
    pub n: usize,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64, tau: f64, n: usize) -> Result<Self> {
        let params = Self { s, p, q, tau, n };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::invalid(format!("s must be finite, got {}", self.s)));
        }
        if !(self.p > 0.0) {
            return Err(Error::invalid(format!("p must lie in (0, inf], got {}", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::invalid(format!("q must lie in (0, inf], got {}", self.q)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("tau must be finite and >= 0, got {}", self.tau)));
        }
        if self.n == 0 {
            return Err(Error::invalid("dimension n must be positive"));
        }
        Ok(())
    }

    pub fn inv_p(&self) -> f64 {
        recip(self.p)
    }

    pub fn inv_q(&self) -> f64 {
        recip(self.q)
    }

    /// `n * max(0, 1/p - 1)`.
    pub fn sigma_p(&self) -> f64 {
        self.n as f64 * (self.inv_p() - 1.0).max(0.0)
    }

    /// Exponent of the level weight, `s + n/2 - n/p`.
    pub fn level_exponent(&self) -> f64 {
        let n = self.n as f64;
        self.s + n / 2.0 - n * self.inv_p()
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }
}

/// Serde for exponents in `(0, inf]`: numbers, or the string `"inf"`.
pub mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub(crate) fn from_raw<E: serde::de::Error>(raw: RawValue) -> Result<f64, E> {
        match raw.0 {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "Infinity" | "infinity") => Ok(f64::INFINITY),
            Raw::Text(t) => t.parse().map_err(|_| E::custom(format!("invalid exponent {t:?}"))),
        }
    }

    #[derive(Deserialize)]
    #[serde(transparent)]
    pub(crate) struct RawValue(Raw);

    pub fn serialize<S: Serializer>(x: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        from_raw::<D::Error>(RawValue::deserialize(de)?)
    }
}

/// [`extended`] for lists.
pub mod extended_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::extended::{from_raw, RawValue};

    pub fn serialize<S: Serializer>(xs: &[f64], ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(xs.len()))?;
        for x in xs {
            if x.is_infinite() {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(x)?;
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
        Vec::<RawValue>::deserialize(de)?
            .into_iter()
            .map(from_raw::<D::Error>)
            .collect()
    }
}

fn fmt_exponent(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for BesovParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.s,
            fmt_exponent(self.p),
            fmt_exponent(self.q),
            self.tau,
            self.n
        )
    }
}

/// Parses `s,p,q,tau,n`; exponents accept `inf`.
impl FromStr for BesovParams {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::invalid(format!(
                "expected s,p,q,tau,n but got {} fields in {text:?}",
                parts.len()
            )));
        }
        let real = |name: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::invalid(format!("cannot parse {name} from {v:?}")))
        };
        let n = parts[4]
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("cannot parse n from {:?}", parts[4])))?;
        Self::new(
            real("s", parts[0])?,
            real("p", parts[1])?,
            real("q", parts[2])?,
            real("tau", parts[3])?,
            n,
        )
    }
}

/// Key of a wavelet coefficient `t_{i,j,m}`. Bit `k` of `type_i` is the
/// `k`-th entry of the sign pattern (1 selects the oscillating factor on axis `k`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WaveletKey {
    pub level: i32,
    pub type_i: u32,
    pub offset: Vec<i64>,
}

/// Finitely supported coefficients: a level-0 scaling layer and wavelet
/// coefficients at levels `j >= 0`. Absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    n: usize,
    scaling: BTreeMap<Vec<i64>, f64>,
    wavelet: BTreeMap<WaveletKey, f64>,
}

impl CoefficientField {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            scaling: BTreeMap::new(),
            wavelet: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_offset(&self, offset: &[i64]) -> Result<()> {
        if offset.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: offset.len(),
            });
        }
        Ok(())
    }

    /// Set `lambda_m`; replaces any previous value.
    pub fn insert_scaling(&mut self, offset: Vec<i64>, value: f64) -> Result<()> {
        self.check_offset(&offset)?;
        self.scaling.insert(offset, value);
        Ok(())
    }

    /// Set `t_{i,j,m}`; replaces any previous value.
    pub fn insert_wavelet(&mut self, type_i: u32, level: i32, offset: Vec<i64>, value: f64) -> Result<()> {
        self.check_offset(&offset)?;
        let types = (1u64 << self.n) - 1;
        if type_i == 0 || type_i as u64 > types {
            return Err(Error::invalid(format!(
                "wavelet type {type_i} outside [1, {types}] for n = {}",
                self.n
            )));
        }
        if !(0..=MAX_LEVEL).contains(&level) {
            return Err(Error::invalid(format!(
                "wavelet level {level} outside [0, {MAX_LEVEL}]"
            )));
        }
        self.wavelet.insert(WaveletKey { level, type_i, offset }, value);
        Ok(())
    }

    pub fn scaling(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.scaling
    }

    pub fn wavelet(&self) -> &BTreeMap<WaveletKey, f64> {
        &self.wavelet
    }

    pub fn scaling_value(&self, offset: &[i64]) -> f64 {
        self.scaling.get(offset).copied().unwrap_or(0.0)
    }

    pub fn wavelet_value(&self, type_i: u32, level: i32, offset: &[i64]) -> f64 {
        let key = WaveletKey {
            level,
            type_i,
            offset: offset.to_vec(),
        };
        self.wavelet.get(&key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.scaling.len() + self.wavelet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaling.is_empty() && self.wavelet.is_empty()
    }

    /// Drop explicit zeros.
    pub fn prune_zeros(&mut self) {
        self.scaling.retain(|_, v| *v != 0.0);
        self.wavelet.retain(|_, v| *v != 0.0);
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            scaling: self.scaling.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            wavelet: self.wavelet.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Keep only wavelet coefficients with `level <= max_level`.
    pub fn truncated(&self, max_level: i32) -> Self {
        Self {
            n: self.n,
            scaling: self.scaling.clone(),
            wavelet: self
                .wavelet
                .iter()
                .filter(|(k, _)| k.level <= max_level)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub fn max_level(&self) -> Option<i32> {
        self.wavelet.keys().map(|k| k.level).max()
    }

    /// Smallest box `[lo, hi)` containing every indexed cube, or `None` for an
    /// empty field.
    pub fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut lo = vec![f64::INFINITY; self.n];
        let mut hi = vec![f64::NEG_INFINITY; self.n];
        let cubes = self
            .scaling
            .keys()
            .map(|m| (0, m))
            .chain(self.wavelet.keys().map(|k| (k.level, &k.offset)));
        let mut any = false;
        for (level, offset) in cubes {
            any = true;
            let side = (-(level as f64)).exp2();
            for k in 0..self.n {
                lo[k] = lo[k].min(offset[k] as f64 * side);
                hi[k] = hi[k].max((offset[k] + 1) as f64 * side);
            }
        }
        any.then_some((lo, hi))
    }

    fn check_finite(&self) -> Result<()> {
        let bad = self
            .scaling
            .values()
            .chain(self.wavelet.values())
            .find(|v| !v.is_finite());
        match bad {
            Some(v) => Err(Error::invalid(format!("non-finite coefficient {v}"))),
            None => Ok(()),
        }
    }
}

/// Restriction on the outer cubes `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Window {
    Unbounded,
    /// Only cubes meeting `[lo, hi)` are considered.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

impl Window {
    fn is_empty(&self) -> bool {
        match self {
            Window::Unbounded => false,
            Window::Box { lo, hi } => lo.iter().zip(hi).any(|(a, b)| !(a < b)),
        }
    }

    fn admits(&self, level: i32, offset: &[i64]) -> bool {
        match self {
            Window::Unbounded => true,
            Window::Box { lo, hi } => {
                let side = (-(level as f64)).exp2();
                offset
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(&m, (&a, &b))| (m as f64) * side < b && ((m + 1) as f64) * side > a)
            }
        }
    }
}

/// Truncation of the sup over cubes and the sums over levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationPolicy {
    /// Deepest level for the outer cubes and the inner level sum.
    pub max_level: i32,
    /// Coarsest outer cube level (`<= 0`).
    pub min_level: i32,
    pub window: Window,
}

impl EnumerationPolicy {
    pub fn new(min_level: i32, max_level: i32) -> Self {
        Self {
            max_level,
            min_level,
            window: Window::Unbounded,
        }
    }

    pub fn with_window(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        self.window = Window::Box { lo, hi };
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.min_level <= 0 && 0 <= self.max_level) {
            return Err(Error::invalid(format!(
                "policy requires min_level <= 0 <= max_level, got [{}, {}]",
                self.min_level, self.max_level
            )));
        }
        if self.min_level < -MAX_LEVEL || self.max_level > MAX_LEVEL {
            return Err(Error::invalid(format!(
                "policy levels must lie in [-{MAX_LEVEL}, {MAX_LEVEL}]"
            )));
        }
        if let Window::Box { lo, hi } = &self.window {
            if lo.len() != n || hi.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: lo.len().min(hi.len()),
                });
            }
        }
        Ok(())
    }
}

/// Which quantity [`brute_force_norm`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    B,
    LambdaStar,
}

/// Accumulates `|t|^p` (or `max |t|` for `p = inf`).
#[derive(Clone, Copy)]
struct LpAcc {
    p: f64,
}

impl LpAcc {
    #[inline]
    fn lift(self, t: f64) -> f64 {
        if self.p.is_infinite() {
            t.abs()
        } else {
            t.abs().powf(self.p)
        }
    }

    #[inline]
    fn join(self, a: f64, b: f64) -> f64 {
        if self.p.is_infinite() {
            a.max(b)
        } else {
            a + b
        }
    }

    #[inline]
    fn finish(self, acc: f64) -> f64 {
        if self.p.is_infinite() {
            acc
        } else {
            acc.powf(1.0 / self.p)
        }
    }
}

/// Accumulates `g^q` (or `max g` for `q = inf`) over levels and types.
#[derive(Clone, Copy)]
struct LqAcc {
    q: f64,
}

impl LqAcc {
    #[inline]
    fn add(self, acc: &mut f64, g: f64) {
        if self.q.is_infinite() {
            *acc = acc.max(g);
        } else {
            *acc += g.powf(self.q);
        }
    }

    #[inline]
    fn finish(self, acc: f64) -> f64 {
        if self.q.is_infinite() {
            acc
        } else {
            acc.powf(1.0 / self.q)
        }
    }
}

fn prepare(field: &CoefficientField, params: &BesovParams, policy: &EnumerationPolicy) -> Result<()> {
    params.validate()?;
    if field.n != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: field.n,
        });
    }
    policy.validate(params.n)?;
    field.check_finite()
}

/// `|P|^{-tau} = 2^{level n tau}`.
#[inline]
fn volume_factor(level: i32, params: &BesovParams) -> f64 {
    (level as f64 * params.n as f64 * params.tau).exp2()
}

/// Aggregate `values` (keyed by level-`level` offsets) upward through all
/// ancestors down to `min_level`, calling `visit(ancestor_level, offset, acc)`
/// for each non-empty ancestor cube, finest level first.
fn aggregate_upward(
    values: BTreeMap<Vec<i64>, f64>,
    level: i32,
    min_level: i32,
    lp: LpAcc,
    mut visit: impl FnMut(i32, &Vec<i64>, f64),
) {
    let mut current = values;
    let mut l = level;
    loop {
        for (offset, &acc) in &current {
            visit(l, offset, acc);
        }
        if l <= min_level {
            break;
        }
        let mut parent: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (offset, acc) in current {
            let up: Vec<i64> = offset.iter().map(|&m| floor_shift(m, 1)).collect();
            parent.entry(up).and_modify(|a| *a = lp.join(*a, acc)).or_insert(acc);
        }
        current = parent;
        l -= 1;
    }
}

fn max_over_accumulators(
    acc: &[BTreeMap<Vec<i64>, f64>],
    params: &BesovParams,
    policy: &EnumerationPolicy,
    finish: impl Fn(f64) -> f64,
) -> f64 {
    let mut best = 0.0f64;
    for (idx, cubes) in acc.iter().enumerate() {
        let level = policy.min_level + idx as i32;
        let factor = volume_factor(level, params);
        for (offset, &value) in cubes {
            if policy.window.admits(level, offset) {
                best = best.max(factor * finish(value));
            }
        }
    }
    best
}

/// The `b^{s,tau}_{p,q}` quasi-norm of the wavelet layer.
///
/// Every `(level, type)` group of coefficients is aggregated bottom-up through
/// the cube tree once, so the cost is `O(#coefficients * depth)`.
pub fn b_norm(field: &CoefficientField, params: &BesovParams, policy: &EnumerationPolicy) -> Result<f64> {
    prepare(field, params, policy)?;
    if policy.window.is_empty() {
        return Ok(0.0);
    }
    Ok(b_norm_unchecked(field, params, policy))
}

fn b_norm_unchecked(field: &CoefficientField, params: &BesovParams, policy: &EnumerationPolicy) -> f64 {
    let lp = LpAcc { p: params.p };
    let lq = LqAcc { q: params.q };
    let exponent = params.level_exponent();
    let depth = (policy.max_level - policy.min_level + 1) as usize;
    let mut acc: Vec<BTreeMap<Vec<i64>, f64>> = vec![BTreeMap::new(); depth];

    let mut groups: BTreeMap<(i32, u32), BTreeMap<Vec<i64>, f64>> = BTreeMap::new();
    for (key, &value) in &field.wavelet {
        if key.level > policy.max_level || value == 0.0 {
            continue;
        }
        groups
            .entry((key.level, key.type_i))
            .or_default()
            .insert(key.offset.clone(), lp.lift(value));
    }

    for ((level, _type_i), values) in groups {
        let weight = (level as f64 * exponent).exp2();
        aggregate_upward(values, level, policy.min_level, lp, |l, offset, s| {
            let slot = acc[(l - policy.min_level) as usize]
                .entry(offset.clone())
                .or_insert(0.0);
            lq.add(slot, weight * lp.finish(s));
        });
    }

    max_over_accumulators(&acc, params, policy, |v| lq.finish(v))
}

fn scaling_part_unchecked(field: &CoefficientField, params: &BesovParams, policy: &EnumerationPolicy) -> f64 {
    let lp = LpAcc { p: params.p };
    let values: BTreeMap<Vec<i64>, f64> = field
        .scaling
        .iter()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| (k.clone(), lp.lift(*v)))
        .collect();
    let depth = (1 - policy.min_level) as usize;
    let mut acc: Vec<BTreeMap<Vec<i64>, f64>> = vec![BTreeMap::new(); depth];
    aggregate_upward(values, 0, policy.min_level, lp, |l, offset, s| {
        acc[(l - policy.min_level) as usize].insert(offset.clone(), s);
    });
    max_over_accumulators(&acc, params, policy, |v| lp.finish(v))
}

/// `sup_P |P|^{-tau} (sum_{Q_{0,m} in P} |lambda_m|^p)^{1/p}` plus [`b_norm`].
pub fn lambda_star_norm(field: &CoefficientField, params: &BesovParams, policy: &EnumerationPolicy) -> Result<f64> {
    prepare(field, params, policy)?;
    if policy.window.is_empty() {
        return Ok(0.0);
    }
    Ok(scaling_part_unchecked(field, params, policy) + b_norm_unchecked(field, params, policy))
}

/// The two summands of [`lambda_star_norm`] separately: `(scaling, b)`.
pub fn lambda_star_parts(
    field: &CoefficientField,
    params: &BesovParams,
    policy: &EnumerationPolicy,
) -> Result<(f64, f64)> {
    prepare(field, params, policy)?;
    if policy.window.is_empty() {
        return Ok((0.0, 0.0));
    }
    Ok((
        scaling_part_unchecked(field, params, policy),
        b_norm_unchecked(field, params, policy),
    ))
}

/// Reference evaluator: enumerates every cube of the window that meets the
/// field's support and sums the contained coefficients directly.
/// Cost is `O(#cubes * #coefficients)`; intended for small inputs only.
pub fn brute_force_norm(
    field: &CoefficientField,
    params: &BesovParams,
    policy: &EnumerationPolicy,
    kind: NormKind,
) -> Result<f64> {
    prepare(field, params, policy)?;
    if policy.window.is_empty() {
        return Ok(0.0);
    }
    let n = params.n;
    let wavelets: Vec<(&WaveletKey, f64)> = field
        .wavelet
        .iter()
        .filter(|(k, _)| k.level <= policy.max_level)
        .map(|(k, v)| (k, *v))
        .collect();
    let scalings: Vec<(&Vec<i64>, f64)> = field.scaling.iter().map(|(k, v)| (k, *v)).collect();
    let types = (1u32 << n) - 1;
    let exponent = params.level_exponent();

    let mut best_b = 0.0f64;
    let mut best_s = 0.0f64;
    for level in policy.min_level..=policy.max_level {
        // Offsets range over the ancestors (at this level) of all indexed cubes.
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        let cubes = wavelets
            .iter()
            .map(|(k, _)| (k.level, &k.offset))
            .chain(scalings.iter().map(|(m, _)| (0, *m)));
        let mut any = false;
        for (l, offset) in cubes {
            if l < level {
                continue;
            }
            any = true;
            for k in 0..n {
                let a = floor_shift(offset[k], (l - level) as u32);
                lo[k] = lo[k].min(a);
                hi[k] = hi[k].max(a);
            }
        }
        if !any {
            continue;
        }
        let factor = volume_factor(level, params);
        for offset in box_offsets(&lo, &hi) {
            if !policy.window.admits(level, &offset) {
                continue;
            }
            let outer = DyadicCube::new(level, offset).expect("level within bounds");

            let mut total = 0.0f64;
            for j in level.max(0)..=policy.max_level {
                let weight = (j as f64 * exponent).exp2();
                for type_i in 1..=types {
                    let mut inner = 0.0f64;
                    for (key, value) in &wavelets {
                        if key.level != j || key.type_i != type_i {
                            continue;
                        }
                        let cube = DyadicCube::new(j, key.offset.clone()).expect("level within bounds");
                        if crate::dyadic::contains(&cube, &outer).expect("same dimension") {
                            inner = if params.p.is_infinite() {
                                inner.max(value.abs())
                            } else {
                                inner + value.abs().powf(params.p)
                            };
                        }
                    }
                    let inner = if params.p.is_infinite() {
                        inner
                    } else {
                        inner.powf(1.0 / params.p)
                    };
                    let g = weight * inner;
                    if params.q.is_infinite() {
                        total = total.max(g);
                    } else {
                        total += g.powf(params.q);
                    }
                }
            }
            let total = if params.q.is_infinite() {
                total
            } else {
                total.powf(1.0 / params.q)
            };
            best_b = best_b.max(factor * total);

            if kind == NormKind::LambdaStar && level <= 0 {
                let mut sum = 0.0f64;
                for (m, value) in &scalings {
                    let cube = DyadicCube::new(0, (*m).clone()).expect("level 0");
                    if crate::dyadic::contains(&cube, &outer).expect("same dimension") {
                        sum = if params.p.is_infinite() {
                            sum.max(value.abs())
                        } else {
                            sum + value.abs().powf(params.p)
                        };
                    }
                }
                let sum = if params.p.is_infinite() {
                    sum
                } else {
                    sum.powf(1.0 / params.p)
                };
                best_s = best_s.max(factor * sum);
            }
        }
    }
    Ok(match kind {
        NormKind::B => best_b,
        NormKind::LambdaStar => best_s + best_b,
    })
}

/// All integer vectors in the box `lo..=hi`, lexicographically.
pub(crate) fn box_offsets(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(lo.len())];
    for (&a, &b) in lo.iter().zip(hi) {
        let mut next = Vec::with_capacity(out.len() * (b - a + 1).max(0) as usize);
        for prefix in &out {
            for v in a..=b {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

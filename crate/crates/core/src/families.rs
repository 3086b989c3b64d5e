//! Test-function families used to show that `f -> <f, X>` does not extend,
//! expressed as coefficient fields over an abstract generator model, together
//! with closed-form norm expressions and exact pairings with `X = 1_{[0,1)^n}`.
//!
//! Only two integrals of the generators enter: `c_psi = int_0^L psi` and
//! `c_phi = int_0^{L~} phi`.

use serde::{Deserialize, Serialize};

use crate::dyadic::construct_distributed_cubes;
use crate::seqnorm::{BesovParams, CoefficientField};
use crate::{approx_le, Error, Result};

/// Generator constants: `supp psi ⊂ [K, L]`, `supp phi ⊂ [0, L~]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorModel {
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(rename = "L")]
    pub l: i64,
    /// `L - K` unless overridden.
    #[serde(default, rename = "L_tilde", skip_serializing_if = "Option::is_none")]
    pub l_tilde_override: Option<i64>,
    pub c_psi: f64,
    pub c_phi: f64,
    pub j0: i32,
}

impl Default for GeneratorModel {
    fn default() -> Self {
        Self {
            k: -1,
            l: 1,
            l_tilde_override: None,
            c_psi: 1.0,
            c_phi: 1.0,
            j0: 0,
        }
    }
}

impl GeneratorModel {
    pub fn new(k: i64, l: i64, c_psi: f64, c_phi: f64, j0: i32) -> Result<Self> {
        let g = Self {
            k,
            l,
            l_tilde_override: None,
            c_psi,
            c_phi,
            j0,
        };
        g.validate()?;
        Ok(g)
    }

    /// Replace `L~` by an explicit positive value.
    pub fn with_l_tilde(mut self, l_tilde: i64) -> Self {
        self.l_tilde_override = Some(l_tilde);
        self
    }

    pub fn with_j0(mut self, j0: i32) -> Self {
        self.j0 = j0;
        self
    }

    pub fn l_tilde(&self) -> i64 {
        self.l_tilde_override.unwrap_or(self.l - self.k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k >= 0 || self.l <= 0 {
            return Err(Error::invalid(format!(
                "generator support needs K < 0 < L, got K = {}, L = {}",
                self.k, self.l
            )));
        }
        if self.l_tilde() <= 0 {
            return Err(Error::invalid(format!("L~ must be positive, got {}", self.l_tilde())));
        }
        if !(self.c_psi != 0.0 && self.c_psi.is_finite()) {
            return Err(Error::invalid("c_psi must be finite and nonzero"));
        }
        if !(self.c_phi > 0.0 && self.c_phi.is_finite()) {
            return Err(Error::invalid("c_phi must be finite and positive"));
        }
        if !(0..=62).contains(&self.j0) || (self.l as f64) > (self.j0 as f64).exp2() {
            return Err(Error::invalid(format!(
                "j0 = {} must satisfy 2^(-j0) L <= 1 with L = {}",
                self.j0, self.l
            )));
        }
        Ok(())
    }

    /// `c_psi c_phi^{n-1}`.
    fn prefactor(&self, n: usize) -> f64 {
        self.c_psi * self.c_phi.powi(n as i32 - 1)
    }
}

/// The level sequence `lambda_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaRule {
    Constant {
        value: f64,
    },
    /// `2^{-j a}`.
    Power {
        a: f64,
    },
    /// `j 2^{-j a}`.
    LinearPower {
        a: f64,
    },
    /// `mu_j 2^{-j a}` with `mu_j = 1/j` (and `mu_0 = 1`).
    HarmonicPower {
        a: f64,
    },
    /// `values[j]`; zero past the end.
    Custom {
        values: Vec<f64>,
    },
}

impl LambdaRule {
    pub fn zero() -> Self {
        LambdaRule::Constant { value: 0.0 }
    }

    pub fn value(&self, j: i32) -> f64 {
        let jf = j as f64;
        match self {
            LambdaRule::Constant { value } => *value,
            LambdaRule::Power { a } => (-jf * a).exp2(),
            LambdaRule::LinearPower { a } => jf * (-jf * a).exp2(),
            LambdaRule::HarmonicPower { a } => harmonic_weight(j) * (-jf * a).exp2(),
            LambdaRule::Custom { values } => usize::try_from(j)
                .ok()
                .and_then(|i| values.get(i))
                .copied()
                .unwrap_or(0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LambdaRule::Constant { value } => *value == 0.0,
            LambdaRule::Custom { values } => values.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }
}

/// `mu_j = 1/j`, with `mu_0 = 1`.
pub fn harmonic_weight(j: i32) -> f64 {
    if j <= 0 {
        1.0
    } else {
        1.0 / j as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[serde(rename = "fN")]
    F,
    #[serde(rename = "gN")]
    G,
    #[serde(rename = "hN")]
    H,
    #[serde(rename = "fN_tilde")]
    FTilde,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fN" | "f" => Ok(FamilyKind::F),
            "gN" | "g" => Ok(FamilyKind::G),
            "hN" | "h" => Ok(FamilyKind::H),
            "fN_tilde" | "f_tilde" => Ok(FamilyKind::FTilde),
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamilySpec {
    pub kind: FamilyKind,
    pub generator: GeneratorModel,
    pub lambda: LambdaRule,
    pub n: usize,
    /// Top level `N`.
    pub top: i32,
    /// `j0` for fN / hN / fN_tilde, `j1` for gN.
    pub start: i32,
    /// Exponent of the distributed cube sets (gN only).
    pub alpha: Option<f64>,
    /// Level `j` of the modified family (fN_tilde only).
    pub base_level: Option<i32>,
}

impl TestFamilySpec {
    pub fn new(
        kind: FamilyKind,
        generator: GeneratorModel,
        lambda: LambdaRule,
        n: usize,
        start: i32,
        top: i32,
    ) -> Self {
        Self {
            kind,
            generator,
            lambda,
            n,
            top,
            start,
            alpha: None,
            base_level: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_base_level(mut self, level: i32) -> Self {
        self.base_level = Some(level);
        self
    }

    /// First level carrying coefficients.
    pub fn first_level(&self) -> i32 {
        match self.kind {
            FamilyKind::FTilde => self.start.max(self.base_level.unwrap_or(0)),
            _ => self.start,
        }
    }

    fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if self.start < 0 || self.top > 40 {
            return Err(Error::invalid(format!(
                "family levels must lie in [0, 40], got start {} and N {}",
                self.start, self.top
            )));
        }
        if self.top < self.start {
            return Err(Error::invalid(format!(
                "top level N = {} is below the start level {}",
                self.top, self.start
            )));
        }
        if self.kind == FamilyKind::G {
            let alpha = self.alpha.ok_or_else(|| Error::invalid("gN requires alpha"))?;
            if !(alpha > 0.0 && alpha < self.n as f64 - 1.0) {
                return Err(Error::invalid(format!(
                    "gN requires alpha in (0, n-1) = (0, {}), got {alpha}",
                    self.n - 1
                )));
            }
            if ((self.start as f64).exp2()) <= self.generator.l_tilde() as f64 {
                return Err(Error::invalid(format!(
                    "gN requires 2^j1 > L~ = {}, got j1 = {}",
                    self.generator.l_tilde(),
                    self.start
                )));
            }
        }
        Ok(())
    }
}

/// Upper bound on the number of coefficients a family may allocate.
const FAMILY_COEFF_LIMIT: u64 = 1 << 24;

/// Per-axis count `max(0, 2^level - L~)` (or `2^{level-1} - L~`).
fn axis_count(level: i32, l_tilde: i64) -> i64 {
    ((1i64 << level) - l_tilde).max(0)
}

/// Offsets `(0, k_2, .., k_n)` with `0 <= k_i < count`.
fn first_axis_slab(n: usize, count: i64) -> Vec<Vec<i64>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut rows = vec![vec![0i64]];
    for _ in 1..n {
        let mut next = Vec::with_capacity(rows.len() * count.max(0) as usize);
        for row in &rows {
            for k in 0..count {
                let mut r = row.clone();
                r.push(k);
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

/// `T_j`: offsets `(0, m)` with `m ∈ A^{n-1}_j` and `max m < 2^j - L~`.
pub fn gn_positions(n: usize, alpha: f64, level: i32, l_tilde: i64) -> Result<Vec<Vec<i64>>> {
    if n < 2 {
        return Err(Error::invalid("gN requires n >= 2"));
    }
    let set = construct_distributed_cubes(n - 1, alpha, level as u32)?;
    let bound = (1i64 << level) - l_tilde;
    Ok(set
        .members
        .into_iter()
        .filter(|m| m.iter().all(|&x| x < bound))
        .map(|m| {
            let mut row = Vec::with_capacity(n);
            row.push(0);
            row.extend(m);
            row
        })
        .collect())
}

/// The sparse coefficient layout of a family; all coefficients have type 1.
pub fn build_family(spec: &TestFamilySpec) -> Result<CoefficientField> {
    spec.validate()?;
    let n = spec.n;
    let l_tilde = spec.generator.l_tilde();
    let mut total: u64 = 0;
    let mut field = CoefficientField::new(n);
    for level in spec.first_level()..=spec.top {
        let lambda = spec.lambda.value(level);
        let offsets = match spec.kind {
            FamilyKind::F | FamilyKind::FTilde => {
                let count = if spec.kind == FamilyKind::F {
                    axis_count(level, l_tilde)
                } else if level >= 1 {
                    axis_count(level - 1, l_tilde)
                } else {
                    0
                };
                let size = (count.max(0) as u64).saturating_pow(n as u32 - 1);
                total = total.saturating_add(size);
                if total > FAMILY_COEFF_LIMIT {
                    return Err(Error::invalid(format!(
                        "family would exceed {FAMILY_COEFF_LIMIT} coefficients; lower N"
                    )));
                }
                first_axis_slab(n, count)
            }
            FamilyKind::H => vec![vec![0; n]],
            FamilyKind::G => gn_positions(n, spec.alpha.expect("validated"), level, l_tilde)?,
        };
        for offset in offsets {
            field.insert_wavelet(1, level, offset, lambda)?;
        }
    }
    Ok(field)
}

/// `{sum_j (2^{j e} |lambda_j|)^q}^{1/q}` over `lo..=hi`, sup for `q = inf`.
fn weighted_lq(lambda: &LambdaRule, exponent: f64, q: f64, lo: i32, hi: i32) -> f64 {
    let terms = (lo..=hi).map(|j| (j as f64 * exponent).exp2() * lambda.value(j).abs());
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `(n-1)/(n p)`, the split between the two regimes of the fN norm.
pub fn fn_regime_split(params: &BesovParams) -> f64 {
    (params.n as f64 - 1.0) / params.n as f64 * params.inv_p()
}

/// Two-regime closed form for the norm of fN (up to constants independent of
/// `N` and `lambda`).
pub fn closed_norm_fn(params: &BesovParams, lambda: &LambdaRule, j0: i32, top: i32) -> Result<f64> {
    params.validate()?;
    if top < j0 {
        return Err(Error::invalid(format!("N = {top} is below j0 = {j0}")));
    }
    let n = params.n as f64;
    let exponent = params.s + n / 2.0 - params.inv_p();
    if approx_le(params.tau, fn_regime_split(params)) {
        return Ok(weighted_lq(lambda, exponent, params.q, j0, top));
    }
    let outer = n * params.tau - (n - 1.0) * params.inv_p();
    Ok((j0..=top)
        .map(|big_j| (big_j as f64 * outer).exp2() * weighted_lq(lambda, exponent, params.q, big_j, top))
        .fold(0.0, f64::max))
}

/// Closed form for the norm of gN with `alpha = n p tau`.
pub fn closed_norm_gn(params: &BesovParams, lambda: &LambdaRule, j1: i32, top: i32) -> Result<f64> {
    params.validate()?;
    let split = fn_regime_split(params);
    if !(params.tau > 0.0 && params.tau < split) {
        return Err(Error::OutsideRegion(format!(
            "gN norm requires tau in (0, (n-1)/(np)) = (0, {split}), got {}",
            params.tau
        )));
    }
    if top < j1 {
        return Err(Error::invalid(format!("N = {top} is below j1 = {j1}")));
    }
    let n = params.n as f64;
    let exponent = params.s + n / 2.0 + n * params.tau - n * params.inv_p();
    Ok(weighted_lq(lambda, exponent, params.q, j1, top))
}

/// Exact sequence norm of hN: `sup_{0 <= J <= N} 2^{J n tau} {sum_{j >= max(J, j0)} (2^{j(s+n/2-n/p)} |lambda_j|)^q}^{1/q}`.
pub fn closed_norm_hn(params: &BesovParams, lambda: &LambdaRule, j0: i32, top: i32) -> Result<f64> {
    params.validate()?;
    if top < j0 {
        return Err(Error::invalid(format!("N = {top} is below j0 = {j0}")));
    }
    let n = params.n as f64;
    let exponent = params.level_exponent();
    Ok((0..=top)
        .map(|big_j| {
            (big_j as f64 * n * params.tau).exp2() * weighted_lq(lambda, exponent, params.q, big_j.max(j0), top)
        })
        .fold(0.0, f64::max))
}

/// Exact `<f_N, X>`: `c_psi c_phi^{n-1} sum_j lambda_j 2^{jn/2} 2^{-j} max(0, 2^j - L~)^{n-1} 2^{-j(n-1)}`.
pub fn pairing_fn(gen: &GeneratorModel, lambda: &LambdaRule, n: usize, j0: i32, top: i32) -> Result<f64> {
    gen.validate()?;
    if top < j0 {
        return Err(Error::invalid(format!("N = {top} is below j0 = {j0}")));
    }
    let nf = n as f64;
    let l_tilde = gen.l_tilde() as f64;
    let sum: f64 = (j0..=top)
        .map(|j| {
            let jf = j as f64;
            let width = (jf.exp2() - l_tilde).max(0.0);
            lambda.value(j) * (jf * nf / 2.0 - jf).exp2() * (width * (-jf).exp2()).powi(n as i32 - 1)
        })
        .sum();
    Ok(gen.prefactor(n) * sum)
}

/// Exact `<h_N, X> = c_psi c_phi^{n-1} sum_j lambda_j 2^{-jn/2}`.
pub fn pairing_hn(gen: &GeneratorModel, lambda: &LambdaRule, n: usize, j0: i32, top: i32) -> Result<f64> {
    gen.validate()?;
    if top < j0 {
        return Err(Error::invalid(format!("N = {top} is below j0 = {j0}")));
    }
    let nf = n as f64;
    let sum: f64 = (j0..=top)
        .map(|j| lambda.value(j) * (-(j as f64) * nf / 2.0).exp2())
        .sum();
    Ok(gen.prefactor(n) * sum)
}

/// Cardinality of `T_j` against its two-sided bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TjLevel {
    pub level: i32,
    pub cardinality: usize,
    /// `2^{-alpha}(2^j - L~)^alpha - 1`.
    pub lower: f64,
    /// `2^{j alpha}`.
    pub upper: f64,
    pub within_bounds: bool,
    /// False when the lower bound is below 1 and says nothing.
    pub informative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnPairing {
    pub value: f64,
    pub levels: Vec<TjLevel>,
}

/// Exact `<g_N, X> = c_psi c_phi^{n-1} sum_j lambda_j 2^{jn/2} 2^{-jn} |T_j|`
/// with the cardinalities of the constructed sets.
pub fn pairing_gn(
    gen: &GeneratorModel,
    lambda: &LambdaRule,
    n: usize,
    alpha: f64,
    j1: i32,
    top: i32,
) -> Result<GnPairing> {
    let spec = TestFamilySpec::new(FamilyKind::G, gen.clone(), lambda.clone(), n, j1, top).with_alpha(alpha);
    spec.validate()?;
    let l_tilde = gen.l_tilde();
    let nf = n as f64;
    let mut sum = 0.0;
    let mut levels = Vec::new();
    for j in j1..=top {
        let jf = j as f64;
        let card = gn_positions(n, alpha, j, l_tilde)?.len();
        sum += lambda.value(j) * (-jf * nf / 2.0).exp2() * card as f64;
        let lower = (-alpha).exp2() * (jf.exp2() - l_tilde as f64).powf(alpha) - 1.0;
        let upper = (jf * alpha).exp2();
        levels.push(TjLevel {
            level: j,
            cardinality: card,
            lower,
            upper,
            within_bounds: lower <= card as f64 && card as f64 <= upper,
            informative: lower >= 1.0,
        });
    }
    Ok(GnPairing {
        value: gen.prefactor(n) * sum,
        levels,
    })
}

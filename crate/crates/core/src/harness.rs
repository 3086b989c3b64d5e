//! Experiment orchestration: slope fitting, membership probes on the shifted
//! unit box, divergence experiments for the test families, parameter sweeps,
//! and the JSON configuration shared with the command line tool.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::families::{
    build_family, closed_norm_fn, closed_norm_gn, closed_norm_hn, fn_regime_split, harmonic_weight, pairing_fn,
    pairing_gn, pairing_hn, FamilyKind, GeneratorModel, LambdaRule, TestFamilySpec,
};
use crate::haar::{analyze_box, AxisBox};
use crate::regions::{
    chi_membership, functional_verdict, subunit_threshold, Extension, FunctionalVerdict, MembershipVerdict,
};
use crate::seqnorm::{lambda_star_norm, BesovParams, CoefficientField, EnumerationPolicy};
use crate::{approx_eq, approx_le, Error, Result};

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn fit_slope_linear(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("x and y must have the same length"));
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!(
            "slope fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope fit needs at least two distinct x values"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Least-squares slope of `log2 y` against `x` for points `(x, y)`, `y > 0`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((_, y)) = points.iter().find(|(_, y)| !(*y > 0.0) || !y.is_finite()) {
        return Err(Error::invalid(format!("slope fit needs finite positive y, got {y}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    fit_slope_linear(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Shift of the unit box; one value is broadcast to every axis.
    pub shift: Vec<f64>,
    /// Truncation levels `J`.
    pub j_sweep: Vec<i32>,
    pub slope_threshold: f64,
    /// Coarsest outer cube level.
    #[serde(default = "default_min_level")]
    pub min_level: i32,
}

fn default_min_level() -> i32 {
    -2
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            shift: vec![1.0 / 3.0],
            j_sweep: (8..=12).collect(),
            slope_threshold: 0.05,
            min_level: default_min_level(),
        }
    }
}

impl ProbeConfig {
    pub fn with_levels(mut self, levels: impl IntoIterator<Item = i32>) -> Self {
        self.j_sweep = levels.into_iter().collect();
        self
    }

    fn shift_vector(&self, n: usize) -> Result<Vec<f64>> {
        match self.shift.len() {
            1 => Ok(vec![self.shift[0]; n]),
            k if k == n => Ok(self.shift.clone()),
            k => Err(Error::DimensionMismatch { expected: n, got: k }),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.j_sweep.len() < 3 {
            return Err(Error::invalid("probe needs at least 3 levels"));
        }
        if self.j_sweep.iter().any(|&j| !(0..=30).contains(&j)) {
            return Err(Error::invalid("probe levels must lie in [0, 30]"));
        }
        if self.min_level > 0 {
            return Err(Error::invalid("probe min_level must be <= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Bounded,
    Divergent,
}

/// The sub-exponential test for `s = 1/p, q < inf`: are the norms growing like
/// `(J+1)^{1/q}`?
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTest {
    /// `norm_J / (J+1)^{1/q}`.
    pub ratios: Vec<f64>,
    pub max_over_min: f64,
    /// `log(norm_last / norm_first) / log(((J_last+1)/(J_first+1))^{1/q})`.
    pub growth_fraction: f64,
    pub fired: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub params: BesovParams,
    pub levels: Vec<i32>,
    pub norms: Vec<f64>,
    pub fitted_slope: f64,
    /// `max(s - 1/p, s + n tau - n/p)`.
    pub expected_slope: f64,
    pub boundary_test: Option<BoundaryTest>,
    pub classification: Classification,
    pub predicted: MembershipVerdict,
    pub agrees: bool,
}

/// Growth exponent of the truncated norms of the shifted box.
pub fn expected_probe_slope(params: &BesovParams) -> f64 {
    let n = params.n as f64;
    let inv_p = params.inv_p();
    (params.s - inv_p).max(params.s + n * params.tau - n * inv_p)
}

/// Whether `(s, q)` sits on the sub-exponential boundary `s = 1/p, q < inf`.
pub fn is_boundary_case(params: &BesovParams) -> bool {
    approx_eq(params.s, params.inv_p()) && params.q.is_finite()
}

/// Reject shifts that are dyadic at the probe resolution.
fn check_shift(shift: &[f64], j_max: i32) -> Result<()> {
    let scale = ((j_max + 1) as f64).exp2();
    for &s in shift {
        if !s.is_finite() {
            return Err(Error::invalid(format!("shift {s} is not finite")));
        }
        let scaled = s * scale;
        if scaled == scaled.round() {
            return Err(Error::invalid(format!(
                "shift {s} is dyadic at level {}; boundary coefficients vanish",
                j_max + 1
            )));
        }
    }
    Ok(())
}

/// Haar coefficients of the shifted unit box up to the deepest probe level.
pub fn shifted_box_field(n: usize, config: &ProbeConfig) -> Result<CoefficientField> {
    config.validate()?;
    let shift = config.shift_vector(n)?;
    let j_max = *config.j_sweep.iter().max().expect("validated non-empty");
    check_shift(&shift, j_max)?;
    analyze_box(&AxisBox::shifted_unit(&shift)?, j_max)
}

/// Run the probe on a precomputed shifted-box field.
pub fn probe_with_field(field: &CoefficientField, params: &BesovParams, config: &ProbeConfig) -> Result<ProbeReport> {
    config.validate()?;
    params.validate()?;
    let norms: Vec<f64> = config
        .j_sweep
        .par_iter()
        .map(|&j| lambda_star_norm(field, params, &EnumerationPolicy::new(config.min_level, j)))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = config
        .j_sweep
        .iter()
        .map(|&j| j as f64)
        .zip(norms.iter().copied())
        .collect();
    let fitted_slope = fit_slope(&points)?;

    let boundary_test = params.q.is_finite().then(|| {
        let inv_q = 1.0 / params.q;
        let ratios: Vec<f64> = points.iter().map(|&(j, v)| v / (j + 1.0).powf(inv_q)).collect();
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let (j_first, v_first) = points[0];
        let (j_last, v_last) = points[points.len() - 1];
        let predicted = inv_q * ((j_last + 1.0) / (j_first + 1.0)).ln();
        let growth_fraction = (v_last / v_first).ln() / predicted;
        let max_over_min = max / min;
        BoundaryTest {
            ratios,
            max_over_min,
            growth_fraction,
            fired: max_over_min <= 2.0 && growth_fraction >= 0.5,
        }
    });

    let fired = boundary_test.as_ref().is_some_and(|b| b.fired);
    let classification = if fitted_slope > config.slope_threshold || fired {
        Classification::Divergent
    } else {
        Classification::Bounded
    };
    let predicted = chi_membership(params);
    let agrees = (classification == Classification::Bounded) == predicted.member;
    Ok(ProbeReport {
        params: *params,
        levels: config.j_sweep.clone(),
        norms,
        fitted_slope,
        expected_slope: expected_probe_slope(params),
        boundary_test,
        classification,
        predicted,
        agrees,
    })
}

/// Analyse the shifted unit box, evaluate the truncated lambda-star norms for
/// every level of the sweep, fit the growth and classify.
pub fn probe_chi_membership(params: &BesovParams, config: &ProbeConfig) -> Result<ProbeReport> {
    params.validate()?;
    let field = shifted_box_field(params.n, config)?;
    probe_with_field(&field, params, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Substep21,
    Substep22,
    Substep23,
    Substep25,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "substep21" | "2.1" => Ok(ExperimentKind::Substep21),
            "substep22" | "2.2" => Ok(ExperimentKind::Substep22),
            "substep23" | "2.3" => Ok(ExperimentKind::Substep23),
            "substep25" | "2.5" => Ok(ExperimentKind::Substep25),
            other => Err(Error::invalid(format!("unknown experiment {other:?}"))),
        }
    }
}

impl ExperimentKind {
    pub fn family(self) -> FamilyKind {
        match self {
            ExperimentKind::Substep21 | ExperimentKind::Substep22 => FamilyKind::F,
            ExperimentKind::Substep23 => FamilyKind::G,
            ExperimentKind::Substep25 => FamilyKind::H,
        }
    }

    /// The level sequence each experiment uses.
    pub fn lambda(self, params: &BesovParams) -> LambdaRule {
        let n = params.n as f64;
        match self {
            ExperimentKind::Substep21 => LambdaRule::HarmonicPower { a: n / 2.0 - 1.0 },
            ExperimentKind::Substep22 => LambdaRule::LinearPower { a: n / 2.0 - 1.0 },
            ExperimentKind::Substep23 => LambdaRule::HarmonicPower {
                a: params.p * n * params.tau - n / 2.0,
            },
            ExperimentKind::Substep25 => LambdaRule::HarmonicPower { a: -n / 2.0 },
        }
    }

    /// Check the region the construction is designed for.
    pub fn check_region(self, params: &BesovParams) -> Result<()> {
        let n = params.n as f64;
        let inv_p = params.inv_p();
        let split = fn_regime_split(params);
        let fail = |what: &str| Err(Error::OutsideRegion(format!("{}: {what}", self.name())));
        match self {
            ExperimentKind::Substep21 => {
                if params.p < 1.0 {
                    return fail("requires p >= 1");
                }
                if !approx_eq(params.s, inv_p - 1.0) {
                    return fail("requires s = 1/p - 1");
                }
                if params.q <= 1.0 {
                    return fail("requires q > 1");
                }
                if !approx_le(params.tau, split) {
                    return fail("requires tau <= (n-1)/(np)");
                }
            }
            ExperimentKind::Substep22 => {
                if !approx_eq(params.s, n * inv_p - n * params.tau - 1.0) {
                    return fail("requires s = n/p - n tau - 1");
                }
                if params.q > 1.0 {
                    return fail("requires q <= 1");
                }
                if approx_le(params.tau, split) {
                    return fail("requires tau > (n-1)/(np)");
                }
            }
            ExperimentKind::Substep23 => {
                if params.p >= 1.0 {
                    return fail("requires p < 1");
                }
                if params.q <= 1.0 {
                    return fail("requires q > 1");
                }
                if !(params.tau > 0.0 && params.tau < split) || approx_eq(params.tau, split) {
                    return fail("requires tau in (0, (n-1)/(np))");
                }
                if !approx_eq(params.s, subunit_threshold(params)) {
                    return fail("requires s = (1 - tau p) n (1/p - 1)");
                }
            }
            ExperimentKind::Substep25 => {
                if params.p >= 1.0 {
                    return fail("requires p < 1");
                }
                if params.tau != 0.0 {
                    return fail("requires tau = 0");
                }
                if !approx_eq(params.s, n * (inv_p - 1.0)) {
                    return fail("requires s = n(1/p - 1)");
                }
                if params.q <= 1.0 {
                    return fail("requires q > 1");
                }
            }
        }
        let verdict = functional_verdict(params);
        if verdict.value != Extension::DoesNotExtend {
            return Err(Error::OutsideRegion(format!(
                "{}: functional verdict is {} ({}), expected DoesNotExtend",
                self.name(),
                verdict.value,
                verdict.active_condition
            )));
        }
        Ok(())
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Substep21 => "substep21",
            ExperimentKind::Substep22 => "substep22",
            ExperimentKind::Substep23 => "substep23",
            ExperimentKind::Substep25 => "substep25",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    pub kind: ExperimentKind,
    pub params: BesovParams,
    pub generator: GeneratorModel,
    /// Top levels `N` to tabulate.
    pub n_values: Vec<i32>,
    /// First level of the family; defaults to `j0` (and, for gN, to the
    /// first level where the cardinality bounds for `T_j` are informative).
    pub start: Option<i32>,
    /// Replaces the experiment's own level sequence.
    pub lambda: Option<LambdaRule>,
}

impl DivergenceConfig {
    pub fn new(kind: ExperimentKind, params: BesovParams, generator: GeneratorModel, n_values: Vec<i32>) -> Self {
        Self {
            kind,
            params,
            generator,
            n_values,
            start: None,
            lambda: None,
        }
    }

    pub fn with_start(mut self, start: i32) -> Self {
        self.start = Some(start);
        self
    }

    pub fn with_lambda(mut self, lambda: LambdaRule) -> Self {
        self.lambda = Some(lambda);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    #[serde(rename = "N")]
    pub top: i32,
    pub norm: f64,
    pub pairing: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub kind: ExperimentKind,
    pub params: BesovParams,
    pub start: i32,
    pub lambda: LambdaRule,
    pub verdict: FunctionalVerdict,
    pub rows: Vec<DivergenceRow>,
}

/// First level `j` with `2^{-alpha}(2^j - L~)^alpha - 1 >= 1`.
pub fn first_informative_level(alpha: f64, l_tilde: i64) -> i32 {
    (0..=40)
        .find(|&j| {
            let width = (j as f64).exp2() - l_tilde as f64;
            width > 0.0 && (-alpha).exp2() * width.powf(alpha) - 1.0 >= 1.0
        })
        .unwrap_or(40)
}

/// Tabulate closed-form norm, exact pairing and their ratio for the family
/// and level sequence of the chosen experiment.
pub fn divergence_experiment(config: &DivergenceConfig) -> Result<DivergenceTable> {
    let params = &config.params;
    params.validate()?;
    config.generator.validate()?;
    config.kind.check_region(params)?;
    if config.n_values.is_empty() {
        return Err(Error::invalid("need at least one N"));
    }
    let gen = &config.generator;
    let n = params.n;
    let lambda = config.lambda.clone().unwrap_or_else(|| config.kind.lambda(params));
    let alpha = params.p * n as f64 * params.tau;
    let start = match config.start {
        Some(s) => s,
        None if config.kind == ExperimentKind::Substep23 => gen.j0.max(first_informative_level(alpha, gen.l_tilde())),
        None => gen.j0,
    };
    if start < gen.j0 {
        return Err(Error::invalid(format!("start level {start} is below j0 = {}", gen.j0)));
    }
    if let Some(&bad) = config.n_values.iter().find(|&&top| top < start) {
        return Err(Error::invalid(format!("N = {bad} is below the start level {start}")));
    }

    let rows = config
        .n_values
        .par_iter()
        .map(|&top| {
            let (norm, pairing) = match config.kind {
                ExperimentKind::Substep21 | ExperimentKind::Substep22 => (
                    closed_norm_fn(params, &lambda, start, top)?,
                    pairing_fn(gen, &lambda, n, start, top)?,
                ),
                ExperimentKind::Substep23 => (
                    closed_norm_gn(params, &lambda, start, top)?,
                    pairing_gn(gen, &lambda, n, alpha, start, top)?.value,
                ),
                ExperimentKind::Substep25 => (
                    closed_norm_hn(params, &lambda, start, top)?,
                    pairing_hn(gen, &lambda, n, start, top)?,
                ),
            };
            let ratio = if norm == 0.0 { 0.0 } else { pairing.abs() / norm };
            Ok(DivergenceRow {
                top,
                norm,
                pairing,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DivergenceTable {
        kind: config.kind,
        params: *params,
        start,
        lambda,
        verdict: functional_verdict(params),
        rows,
    })
}

/// `sum_{j=lo}^{hi} mu_j`.
pub fn harmonic_sum(lo: i32, hi: i32) -> f64 {
    (lo..=hi).map(harmonic_weight).sum()
}

/// Ratio `lambda_star_norm(build_family(spec)) / closed form` for fN (both
/// regimes) or gN.
pub fn family_norm_ratio(spec: &TestFamilySpec, params: &BesovParams, min_level: i32) -> Result<f64> {
    let field = build_family(spec)?;
    let policy = EnumerationPolicy::new(min_level, spec.top.max(0));
    let numeric = lambda_star_norm(&field, params, &policy)?;
    let closed = match spec.kind {
        FamilyKind::F => closed_norm_fn(params, &spec.lambda, spec.start, spec.top)?,
        FamilyKind::G => closed_norm_gn(params, &spec.lambda, spec.start, spec.top)?,
        FamilyKind::H => closed_norm_hn(params, &spec.lambda, spec.start, spec.top)?,
        FamilyKind::FTilde => return Err(Error::invalid("no closed form for the modified family")),
    };
    if closed == 0.0 {
        return Err(Error::invalid("closed-form norm vanishes"));
    }
    Ok(numeric / closed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: BesovParams,
    pub membership: MembershipVerdict,
    pub functional: FunctionalVerdict,
    pub probe: Option<ProbeSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub fitted_slope: f64,
    pub classification: Classification,
    pub agrees: bool,
}

/// One row per grid tuple, in grid order; probes (if requested) run in
/// parallel and share one box analysis per dimension.
pub fn region_sweep(grid: &[BesovParams], probe: Option<&ProbeConfig>) -> Result<Vec<SweepRow>> {
    for p in grid {
        p.validate()?;
    }
    let fields: Vec<(usize, CoefficientField)> = match probe {
        Some(config) => {
            let mut dims: Vec<usize> = grid.iter().map(|p| p.n).collect();
            dims.sort_unstable();
            dims.dedup();
            dims.into_iter()
                .map(|n| shifted_box_field(n, config).map(|f| (n, f)))
                .collect::<Result<_>>()?
        }
        None => Vec::new(),
    };
    grid.par_iter()
        .map(|params| {
            let probe = match probe {
                Some(config) => {
                    let field = &fields.iter().find(|(n, _)| *n == params.n).expect("analysed").1;
                    let report = probe_with_field(field, params, config)?;
                    Some(ProbeSummary {
                        fitted_slope: report.fitted_slope,
                        classification: report.classification,
                        agrees: report.agrees,
                    })
                }
                None => None,
            };
            Ok(SweepRow {
                params: *params,
                membership: chi_membership(params),
                functional: functional_verdict(params),
                probe,
            })
        })
        .collect()
}

/// Axis grids of a sweep; the product is taken in the order `s, p, q, tau, n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxes {
    pub s: Vec<f64>,
    #[serde(with = "crate::seqnorm::extended_vec")]
    pub p: Vec<f64>,
    #[serde(with = "crate::seqnorm::extended_vec")]
    pub q: Vec<f64>,
    pub tau: Vec<f64>,
    pub n: Vec<usize>,
}

impl SweepAxes {
    pub fn tuples(&self) -> Result<Vec<BesovParams>> {
        let mut out = Vec::new();
        for &s in &self.s {
            for &p in &self.p {
                for &q in &self.q {
                    for &tau in &self.tau {
                        for &n in &self.n {
                            out.push(BesovParams::new(s, p, q, tau, n)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Generator constants as they appear in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(rename = "L")]
    pub l: i64,
    pub c_psi: f64,
    pub c_phi: f64,
    pub j0: i32,
}

impl GeneratorConfig {
    pub fn to_model(&self) -> Result<GeneratorModel> {
        GeneratorModel::new(self.k, self.l, self.c_psi, self.c_phi, self.j0)
    }
}

/// The JSON configuration file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub params: Option<BesovParams>,
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
    #[serde(default)]
    pub sweep: Option<SweepAxes>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text)?;
        if let Some(p) = &config.params {
            p.validate()?;
        }
        if let Some(g) = &config.generator {
            g.to_model()?;
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn slope_examples() {
        let exact: Vec<(f64, f64)> = (0..6).map(|x| (x as f64, (x as f64).exp2())).collect();
        assert!((fit_slope(&exact).unwrap() - 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = (0..6).map(|x| (x as f64, 3.0)).collect();
        assert!(fit_slope(&flat).unwrap().abs() < 1e-12);
        let noisy: Vec<(f64, f64)> = (0..12)
            .map(|x| {
                let wobble = if x % 2 == 0 { 1.01 } else { 0.99 };
                (x as f64, (0.5 * x as f64).exp2() * wobble)
            })
            .collect();
        assert!((fit_slope(&noisy).unwrap() - 0.5).abs() < 0.02);
        assert!(fit_slope(&exact[..2]).is_err());
        assert!(fit_slope(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn dyadic_shift_rejected() {
        let params = BesovParams::new(1.0, 2.0, INF, 0.0, 1).unwrap();
        let mut config = ProbeConfig::default().with_levels(4..=6);
        config.shift = vec![0.25];
        assert!(probe_chi_membership(&params, &config).is_err());
        config.shift = vec![0.0];
        assert!(probe_chi_membership(&params, &config).is_err());
    }

    #[test]
    fn probe_one_dimensional_examples() {
        let config = ProbeConfig::default().with_levels(4..=10);
        let divergent = probe_chi_membership(&BesovParams::new(1.0, 2.0, INF, 0.0, 1).unwrap(), &config).unwrap();
        assert_eq!(divergent.classification, Classification::Divergent);
        assert!((divergent.fitted_slope - 0.5).abs() < 0.1, "{}", divergent.fitted_slope);
        assert!(divergent.agrees);
        let bounded = probe_chi_membership(&BesovParams::new(0.5, 2.0, INF, 0.0, 1).unwrap(), &config).unwrap();
        assert_eq!(bounded.classification, Classification::Bounded);
        assert!(bounded.agrees);
    }

    #[test]
    fn experiment_region_checks() {
        let gen = GeneratorModel::default();
        let wrong = BesovParams::new(0.0, 2.0, 2.0, 0.0, 2).unwrap();
        let err = divergence_experiment(&DivergenceConfig::new(
            ExperimentKind::Substep21,
            wrong,
            gen.clone(),
            vec![4],
        ))
        .unwrap_err();
        assert!(matches!(err, Error::OutsideRegion(_)));
        let q_small = BesovParams::new(-0.5, 2.0, 1.0, 0.0, 2).unwrap();
        assert!(
            divergence_experiment(&DivergenceConfig::new(ExperimentKind::Substep21, q_small, gen, vec![4])).is_err()
        );
    }

    #[test]
    fn zero_lambda_gives_zero_table() {
        let params = BesovParams::new(-0.5, 2.0, 2.0, 0.0, 2).unwrap();
        let gen = GeneratorModel::default().with_j0(1);
        let config = DivergenceConfig::new(ExperimentKind::Substep21, params, gen, vec![4, 5, 6])
            .with_lambda(LambdaRule::zero());
        let table = divergence_experiment(&config).unwrap();
        assert!(table
            .rows
            .iter()
            .all(|r| r.norm == 0.0 && r.pairing == 0.0 && r.ratio == 0.0));
    }

    #[test]
    fn informative_level() {
        // 2^{-1/2}(2^j - 2)^{1/2} >= 2 first holds at j = 4.
        assert_eq!(first_informative_level(0.5, 2), 4);
    }

    #[test]
    fn sweep_keeps_grid_order() {
        let axes = SweepAxes {
            s: vec![0.0, 1.5],
            p: vec![0.5, 2.0],
            q: vec![0.8, INF],
            tau: vec![0.0, 0.5],
            n: vec![2],
        };
        let grid = axes.tuples().unwrap();
        let rows = region_sweep(&grid, None).unwrap();
        assert_eq!(rows.len(), 16);
        for (row, params) in rows.iter().zip(&grid) {
            assert_eq!(row.params, *params);
        }
        let open = rows
            .iter()
            .find(|r| r.params.s == 1.5 && r.params.p == 0.5 && r.params.q == 0.8 && r.params.tau == 0.5)
            .unwrap();
        assert_eq!(open.functional.value, Extension::Open);
    }

    #[test]
    fn config_parsing() {
        let text = r#"{
            "params": {"s": 0.5, "p": 2, "q": "inf", "tau": 0, "n": 1},
            "generator": {"K": -1, "L": 1, "c_psi": 1, "c_phi": 1, "j0": 0},
            "probe": {"shift": [0.3333333333333333], "j_sweep": [4, 5, 6], "slope_threshold": 0.05},
            "sweep": {"s": [0, 1], "p": [1, "inf"], "q": [2], "tau": [0], "n": [1, 2]}
        }"#;
        let config = Config::from_json(text).unwrap();
        assert_eq!(config.params.unwrap().q, INF);
        assert_eq!(config.probe.unwrap().min_level, -2);
        assert_eq!(config.sweep.unwrap().tuples().unwrap().len(), 8);
        assert!(Config::from_json(r#"{"params": {"s": 0, "p": 0, "q": 1, "tau": 0, "n": 1}}"#).is_err());
        assert!(Config::from_json(r#"{"bogus": 1}"#).is_err());
    }
}

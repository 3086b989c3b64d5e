// Negated comparisons are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use besov_haar::diffnorm::{chi_divergence_witness, DifferenceGrid};
use besov_haar::dyadic::{construct_distributed_cubes, verify_distribution_bounds};
use besov_haar::families::{GeneratorModel, LambdaRule};
use besov_haar::haar::{analyze_box, analyze_step, AxisBox, DyadicStepFunction};
use besov_haar::harness::{
    divergence_experiment, probe_chi_membership, region_sweep, Classification, Config, DivergenceConfig, ExperimentKind,
};
use besov_haar::io::{read_coefficients, write_coefficients};
use besov_haar::seqnorm::{b_norm, brute_force_norm, lambda_star_norm, BesovParams, EnumerationPolicy, NormKind};

const EXIT_REJECTED: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "besov-haar",
    version,
    about = "Haar coefficients and Besov-type norms of cube indicators"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Smoothness tuple `s,p,q,tau,n`; `p` and `q` accept `inf`.
    #[arg(long, global = true)]
    params: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for randomised inputs.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Finest level.
    #[arg(long, global = true)]
    jmax: Option<i32>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Exit with status 3 when the command's own consistency check fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a distributed cube set A_j and verify its counting bounds.
    AjVerify {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        level: u32,
    },
    /// Haar coefficients of a shifted unit box or of a random step function.
    HaarAnalyze {
        /// Shift of the unit box, one value per axis (or one value for all).
        #[arg(long, value_delimiter = ',', default_value = "0.3333333333333333")]
        shift: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Analyse a random step function at this resolution instead of a box.
        #[arg(long)]
        random_resolution: Option<i32>,
        #[arg(long, default_value_t = 16)]
        cells: usize,
    },
    /// Sequence norm of a coefficient CSV.
    Norm {
        #[arg(long)]
        coefficients: PathBuf,
        #[arg(long, default_value_t = -2)]
        min_level: i32,
        /// Use the b-norm (wavelet part only) instead of the lambda-star norm.
        #[arg(long)]
        b_only: bool,
    },
    /// Truncated norms of the shifted unit cube indicator and their growth.
    ProbeChi {
        #[arg(long, value_delimiter = ',')]
        shift: Option<Vec<f64>>,
        #[arg(long)]
        jmin: Option<i32>,
        #[arg(long)]
        slope_threshold: Option<f64>,
    },
    /// Norm and pairing tables for the non-extension families.
    Family {
        #[arg(long)]
        substep: String,
        #[arg(long)]
        nmin: Option<i32>,
        /// First level of the family.
        #[arg(long)]
        start: Option<i32>,
        /// Replace the level sequence by zero.
        #[arg(long)]
        zero_lambda: bool,
    },
    /// Membership and extension verdicts for one tuple or a configured sweep.
    Regions {
        /// Also run the empirical probe on every tuple.
        #[arg(long)]
        probe: bool,
    },
    /// Difference-based witness for the unit cube indicator at s = 1/p.
    Diffnorm {
        #[arg(long, default_value_t = 8)]
        octaves: u32,
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
}

/// Input problems map to exit status 2; anything flagged by `--check` to 3.
enum Status {
    Ok,
    CheckFailed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed(why)) => {
            eprintln!("check failed: {why}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_REJECTED)
        }
    }
}

struct Report {
    csv: Vec<Vec<String>>,
    json: serde_json::Value,
}

fn emit(common: &Common, report: &Report) -> Result<()> {
    let sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &report.json)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            for row in &report.csv {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn load_config(common: &Common) -> Result<Config> {
    match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            Ok(Config::from_json(&text)?)
        }
        None => Ok(Config::default()),
    }
}

fn params(common: &Common, config: &Config) -> Result<BesovParams> {
    match (&common.params, &config.params) {
        (Some(text), _) => Ok(text.parse()?),
        (None, Some(p)) => Ok(*p),
        (None, None) => bail!("--params s,p,q,tau,n is required"),
    }
}

fn fmt(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        x.to_string()
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let common = &cli.common;
    let config = load_config(common)?;
    match &cli.command {
        Command::AjVerify { dim, alpha, level } => {
            let set = construct_distributed_cubes(*dim, *alpha, *level)?;
            let report = verify_distribution_bounds(&set);
            let mut csv = vec![vec![
                "J".to_string(),
                "corner_count".into(),
                "max_count".into(),
                "lower_bound".into(),
                "upper_bound".into(),
                "balance_ok".into(),
                "pinning_ok".into(),
            ]];
            for l in &report.levels {
                csv.push(vec![
                    l.coarse_level.to_string(),
                    l.corner_count.to_string(),
                    l.max_count.to_string(),
                    l.lower_bound.to_string(),
                    fmt(l.upper_bound),
                    l.balance_ok.to_string(),
                    l.pinning_ok.to_string(),
                ]);
            }
            eprintln!(
                "cardinality={} expected={} passed={}",
                report.cardinality, report.expected_cardinality, report.passed
            );
            let json = serde_json::json!({ "members": set.members, "c_tilde": set.c_tilde, "report": report });
            emit(common, &Report { csv, json })?;
            Ok(if common.check && !report.passed {
                Status::CheckFailed(format!("A_{level} (dim {dim}, alpha {alpha}) violates its bounds"))
            } else {
                Status::Ok
            })
        }
        Command::HaarAnalyze {
            shift,
            dim,
            random_resolution,
            cells,
        } => {
            let (field, comment) = match random_resolution {
                Some(r) => {
                    let f = random_step(*dim, *r, *cells, common.seed)?;
                    (analyze_step(&f)?, Some(format!("seed={}", common.seed)))
                }
                None => {
                    let shift = if shift.len() == 1 {
                        vec![shift[0]; *dim]
                    } else {
                        shift.clone()
                    };
                    let jmax = common.jmax.unwrap_or(6);
                    (analyze_box(&AxisBox::shifted_unit(&shift)?, jmax)?, None)
                }
            };
            match common.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    if let Some(c) = &comment {
                        writeln!(buf, "# {c}")?;
                    }
                    write_coefficients(&field, &mut buf)?;
                    write_raw(common, &buf)?;
                }
                Format::Json => {
                    let json = serde_json::json!({ "seed": comment.as_ref().map(|_| common.seed), "field": field });
                    emit(common, &Report { csv: vec![], json })?;
                }
            }
            Ok(Status::Ok)
        }
        Command::Norm {
            coefficients,
            min_level,
            b_only,
        } => {
            let params = params(common, &config)?;
            let file = File::open(coefficients).with_context(|| format!("cannot open {}", coefficients.display()))?;
            let field = read_coefficients(io::BufReader::new(file))?;
            if field.dim() != params.n {
                bail!("coefficient file has dimension {} but n = {}", field.dim(), params.n);
            }
            let max_level = common.jmax.unwrap_or_else(|| field.max_level().unwrap_or(0).max(0));
            let policy = EnumerationPolicy::new(*min_level, max_level);
            let (value, kind) = if *b_only {
                (b_norm(&field, &params, &policy)?, NormKind::B)
            } else {
                (lambda_star_norm(&field, &params, &policy)?, NormKind::LambdaStar)
            };
            let oracle = if common.check {
                Some(brute_force_norm(&field, &params, &policy, kind)?)
            } else {
                None
            };
            let mut header = vec!["norm".to_string()];
            let mut row = vec![fmt(value)];
            if let Some(o) = oracle {
                header.push("brute_force".into());
                row.push(fmt(o));
            }
            let json = serde_json::json!({ "params": params, "min_level": min_level, "max_level": max_level, "norm": value, "brute_force": oracle });
            emit(
                common,
                &Report {
                    csv: vec![header, row],
                    json,
                },
            )?;
            if let Some(o) = oracle {
                if (o - value).abs() > 1e-9 * o.abs().max(value.abs()) {
                    return Ok(Status::CheckFailed(format!(
                        "norm {value} differs from brute force {o}"
                    )));
                }
            }
            Ok(Status::Ok)
        }
        Command::ProbeChi {
            shift,
            jmin,
            slope_threshold,
        } => {
            let params = params(common, &config)?;
            let mut probe = config.probe.clone().unwrap_or_default();
            if let Some(s) = shift {
                probe.shift = s.clone();
            }
            if jmin.is_some() || common.jmax.is_some() {
                let lo = jmin.unwrap_or(*probe.j_sweep.first().unwrap_or(&8));
                let hi = common.jmax.unwrap_or(*probe.j_sweep.last().unwrap_or(&12));
                probe.j_sweep = (lo..=hi).collect();
            }
            if let Some(t) = slope_threshold {
                probe.slope_threshold = *t;
            }
            let report = probe_chi_membership(&params, &probe)?;
            let mut csv = vec![vec!["J".to_string(), "norm".into(), "log2_norm".into()]];
            for (j, v) in report.levels.iter().zip(&report.norms) {
                csv.push(vec![j.to_string(), fmt(*v), fmt(v.log2())]);
            }
            let summary = format!(
                "params={} slope={:.6} expected_slope={:.6} classification={} predicted_member={} condition={}",
                params,
                report.fitted_slope,
                report.expected_slope,
                match report.classification {
                    Classification::Bounded => "bounded",
                    Classification::Divergent => "divergent",
                },
                report.predicted.member,
                report.predicted.active_condition
            );
            eprintln!("{summary}");
            emit(
                common,
                &Report {
                    csv,
                    json: serde_json::to_value(&report)?,
                },
            )?;
            Ok(if common.check && !report.agrees {
                Status::CheckFailed(format!("{params}: probe disagrees with the membership predicate"))
            } else {
                Status::Ok
            })
        }
        Command::Family {
            substep,
            nmin,
            start,
            zero_lambda,
        } => {
            let params = params(common, &config)?;
            let kind: ExperimentKind = substep.parse()?;
            let generator = match &config.generator {
                Some(g) => g.to_model()?,
                None => GeneratorModel::default().with_j0(1),
            };
            let lo = nmin.unwrap_or(8);
            let hi = common.jmax.unwrap_or(20);
            let mut dc = DivergenceConfig::new(kind, params, generator, (lo..=hi).collect());
            if let Some(s) = start {
                dc = dc.with_start(*s);
            }
            if *zero_lambda {
                dc = dc.with_lambda(LambdaRule::zero());
            }
            let table = divergence_experiment(&dc)?;
            let mut csv = vec![vec!["N".to_string(), "norm".into(), "pairing".into(), "ratio".into()]];
            for r in &table.rows {
                csv.push(vec![r.top.to_string(), fmt(r.norm), fmt(r.pairing), fmt(r.ratio)]);
            }
            let summary = format!(
                "{} params={} start={} verdict={} condition={}",
                kind.name(),
                params,
                table.start,
                table.verdict.value,
                table.verdict.active_condition
            );
            eprintln!("{summary}");
            emit(
                common,
                &Report {
                    csv,
                    json: serde_json::to_value(&table)?,
                },
            )?;
            let first = table.rows.first().map_or(0.0, |r| r.ratio);
            let last = table.rows.last().map_or(0.0, |r| r.ratio);
            Ok(if common.check && !(last > first) && !zero_lambda {
                Status::CheckFailed(format!("ratio did not grow: {first} at N={lo}, {last} at N={hi}"))
            } else {
                Status::Ok
            })
        }
        Command::Regions { probe } => {
            let grid = match (&common.params, &config.sweep) {
                (Some(_), _) | (None, None) => vec![params(common, &config)?],
                (None, Some(axes)) => axes.tuples()?,
            };
            let probe_config = probe.then(|| config.probe.clone().unwrap_or_default());
            let rows = region_sweep(&grid, probe_config.as_ref())?;
            let mut header: Vec<String> = [
                "s",
                "p",
                "q",
                "tau",
                "n",
                "membership",
                "functional",
                "active_condition",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            if *probe {
                header.extend(["fitted_slope".to_string(), "classification".into(), "agrees".into()]);
            }
            let mut csv = vec![header];
            let mut disagreements = 0;
            for r in &rows {
                let p = &r.params;
                let mut row = vec![
                    fmt(p.s),
                    fmt(p.p),
                    fmt(p.q),
                    fmt(p.tau),
                    p.n.to_string(),
                    if r.membership.member { "member" } else { "not_member" }.to_string(),
                    r.functional.value.to_string(),
                    format!("{}; {}", r.membership.active_condition, r.functional.active_condition),
                ];
                if let Some(pr) = &r.probe {
                    row.push(fmt(pr.fitted_slope));
                    row.push(
                        match pr.classification {
                            Classification::Bounded => "bounded",
                            Classification::Divergent => "divergent",
                        }
                        .to_string(),
                    );
                    row.push(pr.agrees.to_string());
                    if !pr.agrees {
                        disagreements += 1;
                    }
                }
                csv.push(row);
            }
            emit(
                common,
                &Report {
                    csv,
                    json: serde_json::to_value(&rows)?,
                },
            )?;
            Ok(if common.check && disagreements > 0 {
                Status::CheckFailed(format!("{disagreements} tuples disagree with the membership predicate"))
            } else {
                Status::Ok
            })
        }
        Command::Diffnorm {
            octaves,
            samples,
            order,
        } => {
            let params = params(common, &config)?;
            let grid = DifferenceGrid::octaves(*octaves, *samples, *order)?;
            let report = chi_divergence_witness(&params, &grid)?;
            let mut csv = vec![[
                "t",
                "witness_integral",
                "shell_sup",
                "lower_bound_holds",
                "term",
                "partial",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()];
            for r in &report.rows {
                csv.push(vec![
                    fmt(r.t),
                    fmt(r.witness_integral),
                    fmt(r.shell_sup),
                    r.lower_bound_holds.to_string(),
                    fmt(r.term),
                    fmt(r.partial),
                ]);
            }
            let summary = format!(
                "params={} fitted_growth={} expected_growth={}",
                params,
                report.fitted_growth.map_or("none".to_string(), fmt),
                fmt(report.expected_growth)
            );
            eprintln!("{summary}");
            emit(
                common,
                &Report {
                    csv,
                    json: serde_json::to_value(&report)?,
                },
            )?;
            let bounds_ok = report.rows.iter().all(|r| r.lower_bound_holds);
            let growth_ok = report
                .fitted_growth
                .is_none_or(|g| params.q.is_infinite() || (g - report.expected_growth).abs() <= 1e-9);
            Ok(if common.check && !(bounds_ok && growth_ok) {
                Status::CheckFailed("difference lower bound or growth rate not met".to_string())
            } else {
                Status::Ok
            })
        }
    }
}

fn write_raw(common: &Common, bytes: &[u8]) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn random_step(dim: usize, resolution: i32, cells: usize, seed: u64) -> Result<DyadicStepFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = DyadicStepFunction::new(dim, resolution)?;
    if resolution > 30 {
        bail!("random resolution must be at most 30");
    }
    let side = 1i64 << resolution;
    for _ in 0..cells {
        let offset: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..side)).collect();
        f.set(offset, rng.gen_range(-1.0..1.0))?;
    }
    Ok(f)
}

use std::env;
use std::fs;
use std::path::Path;

use qspec_core::qlaurent::QPoint;
use qspec_core::repcore::{quantum_dim, quantum_dim_numeric, QuantumDimension};
use qspec_core::root_system::{RootSystem, Weight};
use qspec_core::spectral::{
    residue_limit, spectral_dimension_at_probe, spectral_dimension_estimate, toy_model, toy_weight_kind, zeta,
    DimensionEstimate, Kernel, ModelConfig, ResidueResult, SpectrumModel, WeightKind, ZetaResult, DEFAULT_MAX_TERMS,
};
use qspec_core::twisted_trace::{
    twisted_defect, twisted_trace_check, DenseOperator, DiagonalOperator, ModularModel, ShiftWeights,
};
use qspec_core::verify::{self, Report};
use qspec_core::weight_oracle::{
    multiplicities_freudenthal, multiplicities_gt, WeightMultiplicityTable, DEFAULT_PATTERN_CAP,
};
use serde::Serialize;

use crate::args::{
    Cli, Command, Format, Method, ModelArgs, Operators, QdimArgs, RankArgs, ResidueArgs, SpecdimArgs, TwistedArgs,
    WeightsArgs, ZetaArgs,
};
use crate::error::CliError;
use crate::output::{to_csv, to_json};

pub const PATTERN_CAP_VAR: &str = "QSPEC_MAX_PATTERNS";
const DEFAULT_Q: f64 = 0.5;

/// Rendered output plus the verdict to exit with after writing it.
pub struct Output {
    pub text: String,
    pub verdict: Option<CliError>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, verdict: None }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let config = cli.config.as_deref().map(load_config).transpose()?;
    if cli.format == Format::Csv && !matches!(cli.command, Command::Zeta(_)) {
        return Err(CliError::Domain("csv output is only available for zeta".into()));
    }
    match &cli.command {
        Command::Qdim(a) => qdim(a, config.as_ref()),
        Command::Weights(a) => weights(a, config.as_ref()),
        Command::Zeta(a) => zeta_cmd(a, config.as_ref(), cli.format),
        Command::Specdim(a) => specdim(a, config.as_ref()),
        Command::Residue(a) => residue(a, config.as_ref()),
        Command::Twisted(a) => twisted(a, config.as_ref()),
        Command::Verify(a) => verify_cmd(verify::run(a.profile)),
    }
}

pub fn load_config(path: &Path) -> Result<ModelConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("invalid config {}: {e}", path.display())))
}

pub fn pattern_cap() -> Result<u64, CliError> {
    match env::var(PATTERN_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Domain(format!("{PATTERN_CAP_VAR} must be a nonnegative integer, got {v:?}"))),
        Err(env::VarError::NotPresent) => Ok(DEFAULT_PATTERN_CAP),
        Err(e) => Err(CliError::Domain(format!("{PATTERN_CAP_VAR}: {e}"))),
    }
}

fn rank_and_weight(a: &RankArgs, config: Option<&ModelConfig>) -> Result<(RootSystem, Weight), CliError> {
    let ell = a
        .ell
        .or(config.map(|c| c.ell))
        .ok_or_else(|| CliError::Domain("--ell is required (or give it in --config)".into()))?;
    let rs = RootSystem::new(ell)?;
    let w = Weight::new(a.weight.clone());
    rs.check_dominant(&w)?;
    Ok((rs, w))
}

#[derive(Serialize)]
struct QdimOut<'a> {
    ell: usize,
    weight: &'a Weight,
    #[serde(flatten)]
    dim: &'a QuantumDimension,
    display: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<f64>,
}

fn qdim(a: &QdimArgs, config: Option<&ModelConfig>) -> Result<Output, CliError> {
    let (rs, w) = rank_and_weight(&a.rank, config)?;
    let d = quantum_dim(&rs, &w)?;
    if a.classical {
        return Ok(Output::ok(format!("{}\n", d.classical_value)));
    }
    let q = a.q.or(config.map(|c| c.q));
    let numeric = q.map(|q| quantum_dim_numeric(&rs, &w, QPoint::new(q)?)).transpose()?;
    to_json(&QdimOut { ell: rs.rank(), weight: &w, dim: &d, display: d.exact.to_string(), q, numeric }).map(Output::ok)
}

#[derive(Serialize)]
struct WeightsOut<'a> {
    method: &'static str,
    dimension: u64,
    distinct_weights: usize,
    #[serde(flatten)]
    table: &'a WeightMultiplicityTable,
}

#[derive(Serialize)]
struct DiffRow {
    weight: Weight,
    gt: u64,
    freudenthal: u64,
}

#[derive(Serialize)]
struct CompareOut {
    agree: bool,
    gt_dimension: u64,
    freudenthal_dimension: u64,
    differences: Vec<DiffRow>,
}

/// Diff report of two multiplicity tables; the verdict is set on any mismatch.
pub fn compare_tables(gt: &WeightMultiplicityTable, fr: &WeightMultiplicityTable) -> Result<Output, CliError> {
    let differences: Vec<DiffRow> =
        gt.diff(fr).into_iter().map(|(weight, gt, freudenthal)| DiffRow { weight, gt, freudenthal }).collect();
    let n = differences.len();
    let text = to_json(&CompareOut {
        agree: n == 0,
        gt_dimension: gt.dimension(),
        freudenthal_dimension: fr.dimension(),
        differences,
    })?;
    let verdict = (n > 0).then(|| CliError::Verification(format!("GT and Freudenthal tables differ at {n} weights")));
    Ok(Output { text, verdict })
}

fn weights(a: &WeightsArgs, config: Option<&ModelConfig>) -> Result<Output, CliError> {
    let (rs, w) = rank_and_weight(&a.rank, config)?;
    let cap = pattern_cap()?;
    let (method, table) = match a.method {
        Method::Gt => ("gt", multiplicities_gt(&rs, &w, cap)?),
        Method::Freudenthal => ("freudenthal", multiplicities_freudenthal(&rs, &w, cap)?),
        Method::Compare => {
            return compare_tables(&multiplicities_gt(&rs, &w, cap)?, &multiplicities_freudenthal(&rs, &w, cap)?)
        }
    };
    to_json(&WeightsOut { method, dimension: table.dimension(), distinct_weights: table.len(), table: &table })
        .map(Output::ok)
}

/// Config first, then flags on top.
pub fn resolve_model(m: &ModelArgs, config: Option<&ModelConfig>) -> Result<(SpectrumModel, WeightKind), CliError> {
    let mut cfg = match config {
        Some(c) => c.clone(),
        None => ModelConfig {
            ell: m.ell.ok_or_else(|| CliError::Domain("--ell is required (or give it in --config)".into()))?,
            twist: 0,
            q: DEFAULT_Q,
            towers: None,
        },
    };
    if let Some(ell) = m.ell {
        cfg.ell = ell;
    }
    if let Some(q) = m.q {
        cfg.q = q;
    }
    if let Some(n) = m.twist {
        cfg.twist = n;
    }
    if m.toy {
        let mut model = toy_model(cfg.ell, cfg.q)?;
        model.twist = cfg.twist;
        return Ok((model, toy_weight_kind(cfg.ell)));
    }
    Ok((cfg.build()?, m.weight.into()))
}

fn kernel_of(m: &ModelArgs) -> Kernel {
    if m.toy {
        Kernel::Pure
    } else {
        m.kernel.into()
    }
}

#[derive(Serialize)]
struct ZetaRow {
    s: f64,
    #[serde(flatten)]
    result: ZetaResult,
}

#[derive(Serialize)]
struct CsvRow {
    s: f64,
    value: f64,
    terms_used: u64,
    tail_estimate: f64,
}

#[derive(Serialize)]
struct ZetaOut<'a> {
    model: &'a SpectrumModel,
    weight: WeightKind,
    kernel: Kernel,
    tol: f64,
    results: Vec<ZetaRow>,
}

fn zeta_cmd(a: &ZetaArgs, config: Option<&ModelConfig>, format: Format) -> Result<Output, CliError> {
    let (model, weight) = resolve_model(&a.model, config)?;
    let kernel = kernel_of(&a.model);
    let results =
        a.s.iter()
            .map(|&s| Ok(ZetaRow { s, result: zeta(&model, s, weight, kernel, a.tol, a.max_terms)? }))
            .collect::<Result<Vec<_>, CliError>>()?;
    match format {
        Format::Csv => {
            let rows: Vec<CsvRow> = results
                .iter()
                .map(|r| CsvRow {
                    s: r.s,
                    value: r.result.value,
                    terms_used: r.result.terms_used,
                    tail_estimate: r.result.tail_estimate,
                })
                .collect();
            to_csv(&rows).map(Output::ok)
        }
        Format::Json => to_json(&ZetaOut { model: &model, weight, kernel, tol: a.tol, results }).map(Output::ok),
    }
}

#[derive(Serialize)]
struct SpecdimOut {
    ell: usize,
    q: f64,
    weight: WeightKind,
    kernel: Kernel,
    #[serde(flatten)]
    estimate: DimensionEstimate,
}

fn specdim(a: &SpecdimArgs, config: Option<&ModelConfig>) -> Result<Output, CliError> {
    let (model, weight) = resolve_model(&a.model, config)?;
    let kernel = kernel_of(&a.model);
    let estimate = match a.probe {
        Some(p) => spectral_dimension_at_probe(&model, weight, kernel, p, DEFAULT_MAX_TERMS)?,
        None => spectral_dimension_estimate(&model, weight, kernel)?,
    };
    to_json(&SpecdimOut { ell: model.ell, q: model.q, weight, kernel, estimate }).map(Output::ok)
}

#[derive(Serialize)]
struct ResidueOut {
    ell: usize,
    q: f64,
    weight: WeightKind,
    kernel: Kernel,
    #[serde(flatten)]
    result: ResidueResult,
}

fn residue(a: &ResidueArgs, config: Option<&ModelConfig>) -> Result<Output, CliError> {
    let (model, weight) = resolve_model(&a.model, config)?;
    let kernel = kernel_of(&a.model);
    let p = a.p.unwrap_or(2.0 * model.ell as f64);
    let result = residue_limit(&model, weight, kernel, p, a.tol)?;
    to_json(&ResidueOut { ell: model.ell, q: model.q, weight, kernel, result }).map(Output::ok)
}

#[derive(Serialize)]
struct TwistedRow {
    s: f64,
    defect: f64,
    lhs: f64,
    rhs: f64,
    discrepancy: f64,
}

#[derive(Serialize)]
struct TwistedOut {
    q: f64,
    p: f64,
    size: usize,
    operators: &'static str,
    shift_weights: ShiftWeights,
    conjugation_bound: f64,
    /// At the largest `s`.
    truncation_tail: f64,
    scan: Vec<TwistedRow>,
}

pub fn twisted_model(
    q: QPoint,
    p: f64,
    size: usize,
    ops: Operators,
    weights: ShiftWeights,
) -> Result<ModularModel, CliError> {
    let shift = ModularModel::shift(size, q, p, weights)?;
    let (a, b) = match ops {
        Operators::Shift => return Ok(shift),
        Operators::Identity => (DenseOperator::identity(size), DenseOperator::identity(size)),
        Operators::Diagonal => {
            let diag: Vec<f64> = (1..=size).map(|m| q.value().powi(m as i32)).collect();
            (DenseOperator::diagonal(&diag)?, DenseOperator::diagonal(&diag)?)
        }
    };
    let d = DiagonalOperator::new(shift.d.eigenvalues().to_vec())?;
    let delta = DiagonalOperator::new(shift.delta.eigenvalues().to_vec())?;
    Ok(ModularModel::with_operators(q, p, d, delta, a, b)?)
}

fn twisted(a: &TwistedArgs, config: Option<&ModelConfig>) -> Result<Output, CliError> {
    let q = QPoint::new(a.q.or(config.map(|c| c.q)).unwrap_or(DEFAULT_Q))?;
    let weights: ShiftWeights = a.shift_weights.into();
    let model = twisted_model(q, a.p, a.size, a.operators, weights)?;
    let s_values: Vec<f64> =
        if a.s.is_empty() { (0..4).map(|i| a.p + 0.5 * 0.5f64.powi(i)).collect() } else { a.s.clone() };
    let scan = s_values
        .iter()
        .map(|&s| {
            let c = twisted_trace_check(&model, s)?;
            Ok(TwistedRow {
                s,
                defect: twisted_defect(&model, s)?,
                lhs: c.lhs,
                rhs: c.rhs,
                discrepancy: c.discrepancy(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let s_max = s_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let operators = match a.operators {
        Operators::Shift => "shift",
        Operators::Identity => "identity",
        Operators::Diagonal => "diagonal",
    };
    to_json(&TwistedOut {
        q: q.value(),
        p: a.p,
        size: a.size,
        operators,
        shift_weights: weights,
        conjugation_bound: model.conjugation_bound(),
        truncation_tail: model.truncation_tail(s_max),
        scan,
    })
    .map(Output::ok)
}

pub fn verify_cmd(report: Report) -> Result<Output, CliError> {
    let text = to_json(&report)?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    let verdict = (!failed.is_empty()).then(|| CliError::Verification(failed.join(", ")));
    Ok(Output { text, verdict })
}

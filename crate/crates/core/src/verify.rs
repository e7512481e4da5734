//! Named invariant suite behind `qspec verify`.
//!
//! Every check is a pure function of its parameters and reports a
//! deterministic detail string (no timings), so two runs of the same profile
//! produce identical reports.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::{qnum, QPoint};
use crate::repcore::{
    classical_dim, family_slope, quantum_dim, quantum_dim_numeric, si_slope, HighestWeightFamily, QuantumDimension,
};
use crate::root_system::{dual_weight, RootSystem, Weight};
use crate::spectral::{
    default_model, partial_zeta, residue_limit, spectral_dimension_estimate, toy_model, toy_weight_kind, zeta, Kernel,
    WeightKind, DEFAULT_MAX_TERMS, DEFAULT_TOL,
};
use crate::twisted_trace::{
    commutator_norm, commutator_split_defect, holder_exponents, twisted_defect, twisted_defect_scan,
    twisted_trace_check, DenseOperator, DiagonalOperator, ModularModel, ShiftWeights,
};
use crate::weight_oracle::{
    char_at_k2rho, for_each_gt_pattern, multiplicities_freudenthal, multiplicities_gt, to_partition, Twist,
    DEFAULT_PATTERN_CAP,
};

/// Exact quantum-dimension routine under test.
pub type QdimProvider<'a> = &'a dyn Fn(&RootSystem, &Weight) -> Result<QuantumDimension>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(Error::Config(format!("unknown profile {other:?} (expected quick or full)"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_result(name: &str, r: Result<std::result::Result<String, String>>) -> Self {
        let (status, detail) = match r {
            Ok(Ok(d)) => (Status::Pass, d),
            Ok(Err(d)) => (Status::Fail, d),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        CheckOutcome { name: name.to_string(), status, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub profile: Profile,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

type Outcome = Result<std::result::Result<String, String>>;

fn verdict(ok: bool, detail: String) -> Outcome {
    Ok(if ok { Ok(detail) } else { Err(detail) })
}

/// All weights of rank `ell` with coordinates in `0..=max`, first coordinate fastest.
pub fn weight_box(ell: usize, max: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut k = vec![0i64; ell];
    loop {
        out.push(Weight::new(k.clone()));
        match k.iter().position(|&c| c < max) {
            None => return out,
            Some(i) => {
                k[i] += 1;
                k[..i].iter_mut().for_each(|c| *c = 0);
            }
        }
    }
}

fn for_lattice<F>(ranks: &[usize], max: i64, mut f: F) -> Result<(usize, Vec<String>)>
where
    F: FnMut(&RootSystem, &Weight) -> Result<bool>,
{
    let mut count = 0;
    let mut bad = Vec::new();
    for &l in ranks {
        let rs = RootSystem::new(l)?;
        for w in weight_box(l, max) {
            count += 1;
            if !f(&rs, &w)? {
                bad.push(w.to_string());
            }
        }
    }
    Ok((count, bad))
}

fn lattice_verdict(what: &str, count: usize, bad: Vec<String>) -> Outcome {
    if bad.is_empty() {
        verdict(true, format!("{what} on {count} weights"))
    } else {
        let shown: Vec<_> = bad.iter().take(5).cloned().collect();
        verdict(false, format!("{} of {count} weights violate {what}: {}", bad.len(), shown.join(" ")))
    }
}

/// `quantum_dim.exact == char_at_k2rho(+1)` on the lattice.
pub fn check_oracle_equivalence(ranks: &[usize], max: i64, qdim: QdimProvider) -> CheckOutcome {
    let r = (|| {
        let (n, bad) = for_lattice(ranks, max, |rs, w| {
            let ok = match qdim(rs, w) {
                Ok(d) => d.exact == char_at_k2rho(rs, w, Twist::Direct, DEFAULT_PATTERN_CAP)?,
                Err(_) => false,
            };
            Ok(ok)
        })?;
        lattice_verdict("Weyl quotient = character at K_2ρ", n, bad)
    })();
    CheckOutcome::from_result("oracle-equivalence", r)
}

/// GT-pattern and Freudenthal multiplicities agree entrywise.
pub fn check_freudenthal_gt(ranks: &[usize], max: i64) -> CheckOutcome {
    let r = (|| {
        let (n, bad) = for_lattice(ranks, max, |rs, w| {
            let gt = multiplicities_gt(rs, w, DEFAULT_PATTERN_CAP)?;
            let fr = multiplicities_freudenthal(rs, w, DEFAULT_PATTERN_CAP)?;
            Ok(gt.diff(&fr).is_empty())
        })?;
        lattice_verdict("GT = Freudenthal multiplicities", n, bad)
    })();
    CheckOutcome::from_result("freudenthal-gt", r)
}

/// Characters at `K_{2ρ}` and `K_{2ρ}^{-1}` coincide.
pub fn check_inverse_twist(ranks: &[usize], max: i64) -> CheckOutcome {
    let r = (|| {
        let (n, bad) = for_lattice(ranks, max, |rs, w| {
            Ok(char_at_k2rho(rs, w, Twist::Direct, DEFAULT_PATTERN_CAP)?
                == char_at_k2rho(rs, w, Twist::Inverse, DEFAULT_PATTERN_CAP)?)
        })?;
        lattice_verdict("Tr K_2ρ = Tr K_2ρ^-1", n, bad)
    })();
    CheckOutcome::from_result("inverse-twist", r)
}

pub fn check_palindromicity(ranks: &[usize], max: i64, qdim: QdimProvider) -> CheckOutcome {
    let r = (|| {
        let (n, bad) =
            for_lattice(ranks, max, |rs, w| Ok(qdim(rs, w).map(|d| d.exact.is_palindromic()).unwrap_or(false)))?;
        lattice_verdict("bar-invariance", n, bad)
    })();
    CheckOutcome::from_result("palindromicity", r)
}

pub fn check_dual_symmetry(ranks: &[usize], max: i64, qdim: QdimProvider) -> CheckOutcome {
    let r = (|| {
        let (n, bad) = for_lattice(ranks, max, |rs, w| {
            Ok(match (qdim(rs, w), qdim(rs, &dual_weight(w))) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            })
        })?;
        lattice_verdict("dim_q V_Λ = dim_q V_Λ*", n, bad)
    })();
    CheckOutcome::from_result("dual-symmetry", r)
}

/// Coefficient sum = Weyl dimension = GT-pattern count, plus spot values.
pub fn check_classical_limit(ranks: &[usize], max: i64, qdim: QdimProvider) -> CheckOutcome {
    let r = (|| {
        let (n, bad) = for_lattice(ranks, max, |rs, w| {
            let Ok(d) = qdim(rs, w) else { return Ok(false) };
            let patterns = for_each_gt_pattern(&to_partition(rs, w)?, DEFAULT_PATTERN_CAP, |_| {})?;
            let weyl = classical_dim(rs, w)?;
            Ok(d.exact.coefficient_sum() == weyl && weyl == patterns.into())
        })?;
        let spots = [(2usize, vec![1, 0], 3u64), (2, vec![1, 1], 8), (3, vec![1, 0, 1], 15)];
        let mut spot_bad = Vec::new();
        for (l, c, want) in spots {
            let rs = RootSystem::new(l)?;
            let w = Weight::new(c);
            let patterns = for_each_gt_pattern(&to_partition(&rs, &w)?, DEFAULT_PATTERN_CAP, |_| {})?;
            if patterns != want || classical_dim(&rs, &w)? != want.into() {
                spot_bad.push(format!("{w} expected {want}, GT count {patterns}"));
            }
        }
        if !spot_bad.is_empty() {
            return verdict(false, spot_bad.join("; "));
        }
        lattice_verdict("coefficient sum = classical dimension = pattern count", n, bad)
    })();
    CheckOutcome::from_result("classical-limit", r)
}

/// Families `(m + c_1) ω_1 + n_a ω_a + (m + c_2) ω_ℓ` used by the growth checks.
pub fn projective_families(rs: &RootSystem) -> Result<Vec<HighestWeightFamily>> {
    let l = rs.rank();
    let mut middles = vec![None];
    for a in 2..l {
        for na in 0..=1 {
            middles.push(Some((a, na)));
        }
    }
    let mut out = Vec::new();
    for c1 in 0..=2 {
        for c2 in 0..=2 {
            for &mid in &middles {
                out.push(HighestWeightFamily::projective(rs, c1, c2, mid)?);
            }
        }
    }
    Ok(out)
}

/// Exact slopes: family slope `−2ℓ`, row slopes `−(ℓ+1), −1, …, −1`.
pub fn check_growth_slopes(ranks: &[usize]) -> CheckOutcome {
    let r = (|| {
        let mut count = 0;
        let mut bad = Vec::new();
        for &l in ranks {
            let rs = RootSystem::new(l)?;
            for f in projective_families(&rs)? {
                count += 1;
                let total = family_slope(&f);
                let rows = (1..=l).map(|i| si_slope(&rs, &f, i)).collect::<Result<Vec<_>>>()?;
                let expected: Vec<i64> = (1..=l).map(|i| if i == 1 { -(l as i64 + 1) } else { -1 }).collect();
                if total != -2 * l as i64 || rows.iter().sum::<i64>() != total || rows != expected {
                    bad.push(format!("base {}: slope {total}, rows {rows:?}", f.base()));
                }
            }
        }
        lattice_verdict("exact slopes", count, bad)
    })();
    CheckOutcome::from_result("growth-slopes", r)
}

/// `log_q` of consecutive numeric quantum-dimension ratios at `m = 30..=34`.
pub fn check_growth_numeric(ranks: &[usize], q: f64) -> CheckOutcome {
    let r = (|| {
        let qp = QPoint::new(q)?;
        let mut worst = 0.0f64;
        let mut count = 0;
        for &l in ranks {
            let rs = RootSystem::new(l)?;
            for f in projective_families(&rs)? {
                for m in 30..34 {
                    let a = quantum_dim_numeric(&rs, &f.at(m), qp)?;
                    let b = quantum_dim_numeric(&rs, &f.at(m + 1), qp)?;
                    let slope = (b / a).ln() / qp.ln();
                    worst = worst.max((slope + 2.0 * l as f64).abs());
                    count += 1;
                }
            }
        }
        verdict(worst < 1e-6, format!("max |log_q ratio + 2ℓ| = {worst:.3e} over {count} steps"))
    })();
    CheckOutcome::from_result("growth-numeric", r)
}

/// Toy zeta against `q^{s−2ℓ}/(1 − q^{s−2ℓ})`.
pub fn check_toy_closed_form(ranks: &[usize], qs: &[f64]) -> CheckOutcome {
    let r = (|| {
        let mut worst = 0.0f64;
        for &q in qs {
            for &l in ranks {
                let model = toy_model(l, q)?;
                for gap in [0.05, 0.3, 1.0, 3.0] {
                    let z =
                        zeta(&model, 2.0 * l as f64 + gap, toy_weight_kind(l), Kernel::Pure, 1e-15, DEFAULT_MAX_TERMS)?;
                    if !z.converged {
                        return verdict(false, format!("toy zeta did not converge at q={q}, ℓ={l}, gap={gap}"));
                    }
                    let x = q.powf(gap);
                    let closed = x / (1.0 - x);
                    worst = worst.max(((z.value - closed) / closed).abs());
                }
            }
        }
        verdict(worst < 1e-12, format!("max relative error {worst:.3e}"))
    })();
    CheckOutcome::from_result("toy-closed-form", r)
}

/// Toy residue at `s = 2ℓ` against `1/ln(1/q)`.
pub fn check_toy_residue(ell: usize, q: f64) -> CheckOutcome {
    let r = (|| {
        let res = residue_limit(&toy_model(ell, q)?, toy_weight_kind(ell), Kernel::Pure, 2.0 * ell as f64, 1e-14)?;
        let expected = -1.0 / q.ln();
        let rel = ((res.value - expected) / expected).abs();
        verdict(rel < 1e-8, format!("residue {:.12} vs {expected:.12}, relative error {rel:.3e}", res.value))
    })();
    CheckOutcome::from_result("toy-residue", r)
}

/// Abscissa `2ℓ` for both kernels and both twists of the weight.
pub fn check_spectral_dimension(ranks: &[usize], qs: &[f64]) -> CheckOutcome {
    let r = (|| {
        let mut worst = 0.0f64;
        let mut worst_twist = 0.0f64;
        for &q in qs {
            for &l in ranks {
                let model = default_model(l, 0, q, None)?;
                for kernel in [Kernel::Shifted, Kernel::Pure] {
                    let a = spectral_dimension_estimate(&model, WeightKind::Qdim, kernel)?;
                    let b = spectral_dimension_estimate(&model, WeightKind::QdimInverse, kernel)?;
                    worst = worst.max((a.estimate - 2.0 * l as f64).abs()).max((b.estimate - 2.0 * l as f64).abs());
                    worst_twist = worst_twist.max(((a.estimate - b.estimate) / a.estimate).abs());
                }
            }
        }
        verdict(
            worst < 1e-3 && worst_twist < 1e-10,
            format!("max |estimate − 2ℓ| = {worst:.3e}, max relative K/K^-1 gap = {worst_twist:.3e}"),
        )
    })();
    CheckOutcome::from_result("spectral-dimension", r)
}

/// `ζ` with weights `Tr K_{2ρ}` and `Tr K_{2ρ}^{-1}` agree at points above the abscissa.
pub fn check_inverse_weight(ell: usize, q: f64) -> CheckOutcome {
    let r = (|| {
        let model = default_model(ell, 0, q, None)?;
        let mut worst = 0.0f64;
        for gap in [0.25, 1.0, 2.0] {
            let s = 2.0 * ell as f64 + gap;
            let a = zeta(&model, s, WeightKind::Qdim, Kernel::Shifted, DEFAULT_TOL, DEFAULT_MAX_TERMS)?;
            let b = zeta(&model, s, WeightKind::QdimInverse, Kernel::Shifted, DEFAULT_TOL, DEFAULT_MAX_TERMS)?;
            worst = worst.max(((a.value - b.value) / a.value).abs());
        }
        verdict(worst < 1e-10, format!("max relative difference {worst:.3e}"))
    })();
    CheckOutcome::from_result("inverse-weight", r)
}

/// Full-model residue at `2ℓ`: positive, stable between the last two halvings.
pub fn check_residue_stability(ell: usize, q: f64) -> CheckOutcome {
    let r = (|| {
        let model = default_model(ell, 0, q, None)?;
        let res = residue_limit(&model, WeightKind::Qdim, Kernel::Pure, 2.0 * ell as f64, DEFAULT_TOL)?;
        verdict(
            res.value > 0.0 && res.value.is_finite() && res.relative_change < 1e-4,
            format!("residue {:.9e}, relative change {:.3e}", res.value, res.relative_change),
        )
    })();
    CheckOutcome::from_result("residue-stability", r)
}

/// Plain-trace weights: converges at `s = 0.1`, abscissa estimate near 0.
pub fn check_zero_dimension(ell: usize, q: f64) -> CheckOutcome {
    let r = (|| {
        let model = default_model(ell, 0, q, None)?;
        let z = zeta(&model, 0.1, WeightKind::Classical, Kernel::Shifted, DEFAULT_TOL, DEFAULT_MAX_TERMS)?;
        let e = spectral_dimension_estimate(&model, WeightKind::Classical, Kernel::Shifted)?;
        verdict(
            z.converged && e.estimate.abs() < 0.05,
            format!("zeta(0.1) converged = {}, estimate {:.3e}", z.converged, e.estimate),
        )
    })();
    CheckOutcome::from_result("zero-dimension", r)
}

/// Telescoping split of `[(D²+1)^{-s/2}, b]` on seeded random instances.
pub fn check_splitting_identity(instances: usize, max_size: usize, seed: u64) -> CheckOutcome {
    let r = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..instances {
            let n = rng.gen_range(50..=max_size.max(50));
            let k = rng.gen_range(2..=4usize);
            let s = rng.gen_range(0.05..k as f64 - 0.05);
            let d = DiagonalOperator::new((1..=n).map(|m| 0.5f64.powi(-(m as i32))).collect())?;
            let b = DenseOperator::new(DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)))?;
            let rel = commutator_split_defect(&d, &b, s, k)? / commutator_norm(&d, &b, s)?;
            worst = worst.max(rel);
        }
        verdict(worst < 1e-12, format!("max relative defect {worst:.3e} over {instances} instances"))
    })();
    CheckOutcome::from_result("splitting-identity", r)
}

/// `1/p_j + 1/q_j = 1` for all `j ≤ k ≤ kmax`.
pub fn check_holder_exponents(kmax: usize) -> CheckOutcome {
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        for s in [0.3, 1.0, 2.5] {
            let s = s * k as f64 / kmax as f64;
            for (p, q) in holder_exponents(s, k) {
                worst = worst.max((1.0 / p + 1.0 / q - 1.0).abs());
            }
        }
    }
    CheckOutcome::from_result(
        "holder-exponents",
        verdict(worst < 1e-14, format!("max |1/p + 1/q − 1| = {worst:.3e} for k ≤ {kmax}")),
    )
}

/// Shift model `q = 0.5`, `p = 4`: the twisted defect decreases strictly
/// along `s = p + 0.5·2^{-i}` and the trace check tracks it.
pub fn check_twisted_defect_decay(size: usize) -> CheckOutcome {
    let r = (|| {
        let q = QPoint::new(0.5)?;
        let p = 4.0;
        let model = ModularModel::shift(size, q, p, ShiftWeights::Geometric)?;
        let s_values: Vec<f64> = (0..4).map(|i| p + 0.5 * 0.5f64.powi(i)).collect();
        let tail = model.truncation_tail(s_values[0]);
        let scan = twisted_defect_scan(&model, &s_values)?;
        let decreasing = scan.windows(2).all(|w| w[1].1 < w[0].1);
        let first = twisted_trace_check(&model, s_values[0])?;
        let last = twisted_trace_check(&model, s_values[3])?;
        let improves = last.discrepancy() < first.discrepancy();
        let mut consistent = true;
        for &s in &s_values {
            let c = twisted_trace_check(&model, s)?;
            let d = twisted_defect(&model, s)?;
            consistent &= (c.discrepancy() - d).abs() <= 1e-9 * d.max(f64::MIN_POSITIVE) + 1e-15 * c.lhs.abs();
        }
        let defects: Vec<String> = scan.iter().map(|(_, d)| format!("{d:.6e}")).collect();
        verdict(
            decreasing && improves && consistent && tail < 1e-10,
            format!(
                "defects [{}], decreasing = {decreasing}, trace check improves = {improves}, consistent = {consistent}, tail {tail:.3e}",
                defects.join(", ")
            ),
        )
    })();
    CheckOutcome::from_result("twisted-defect-decay", r)
}

/// ℓ = 1 tower `Λ(m) = 2mω_1` with `Δ_m = [2m+1]`, `D_m = q^{-m}`: the
/// harness trace equals the truncated zeta function.
pub fn check_multiplicity_free(q: f64, size: usize, s: f64) -> CheckOutcome {
    let r = (|| {
        let qp = QPoint::new(q)?;
        let d = DiagonalOperator::new((1..=size).map(|m| q.powi(-(m as i32))).collect())?;
        let delta = (1..=size as i64).map(|m| Ok(qnum(2 * m + 1)?.eval(qp))).collect::<Result<Vec<_>>>()?;
        let harness = ModularModel::with_operators(
            qp,
            2.0,
            d,
            DiagonalOperator::new(delta)?,
            DenseOperator::identity(size),
            DenseOperator::identity(size),
        )?;
        let h = harness.weighted_trace(s);
        let z = partial_zeta(&toy_model(1, q)?, s, WeightKind::Qdim, Kernel::Shifted, size as u64)?;
        let rel = ((h - z) / z).abs();
        verdict(rel < 1e-12, format!("trace {h:.15e} vs zeta {z:.15e}, relative {rel:.3e}"))
    })();
    CheckOutcome::from_result("multiplicity-free", r)
}

/// Runs the suite with the library's own quantum-dimension routine.
pub fn run(profile: Profile) -> Report {
    run_with(profile, &quantum_dim)
}

/// Runs the suite with `qdim` standing in for [`quantum_dim`].
pub fn run_with(profile: Profile, qdim: QdimProvider) -> Report {
    let full = profile == Profile::Full;
    let lattice_ranks: &[usize] = if full { &[1, 2, 3, 4] } else { &[1, 2] };
    let spectral_ranks: &[usize] = if full { &[2, 3] } else { &[2] };
    let qs: &[f64] = if full { &[0.3, 0.5, 0.8] } else { &[0.5] };
    let checks = vec![
        check_oracle_equivalence(lattice_ranks, 2, qdim),
        check_freudenthal_gt(lattice_ranks, 2),
        check_inverse_twist(lattice_ranks, 2),
        check_palindromicity(lattice_ranks, 2, qdim),
        check_dual_symmetry(lattice_ranks, 2, qdim),
        check_classical_limit(lattice_ranks, 2, qdim),
        check_growth_slopes(if full { &[2, 3, 4] } else { &[2, 3] }),
        check_growth_numeric(if full { &[2, 3, 4] } else { &[2] }, 0.5),
        check_toy_closed_form(if full { &[1, 2, 3] } else { &[2] }, qs),
        check_toy_residue(2, 0.5),
        check_spectral_dimension(spectral_ranks, qs),
        check_inverse_weight(2, 0.5),
        check_residue_stability(2, 0.5),
        check_zero_dimension(2, 0.5),
        check_splitting_identity(if full { 20 } else { 4 }, if full { 200 } else { 80 }, 0x5eed),
        check_holder_exponents(6),
        check_twisted_defect_decay(120),
        check_multiplicity_free(0.5, 60, 3.0),
    ];
    Report { profile, passed: checks.iter().all(CheckOutcome::passed), checks }
}

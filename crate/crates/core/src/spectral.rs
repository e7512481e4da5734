//! Eigenvalue/multiplicity model of the Dolbeault–Dirac spectrum on quantum
//! projective spaces and its weighted zeta function.
//!
//! The form modules decompose as towers `V_{Λ(m)}`, `m ∈ ℕ`, with
//! `Λ(m) = base + m(ω_1 + ω_ℓ)`: one tower in degree 0, two in each degree
//! `1 ≤ k ≤ ℓ−1` (bases shifted by `ω_k` and `ω_{k+1}`) and one in degree ℓ.
//! `D²` is scalar on each summand with eigenvalue `λ_m²`, `λ_m ∼ q^{-m}`.
//! The exact offsets and eigenvalues are configuration; everything tested
//! here depends only on those asymptotics.
//!
//! All terms are formed in log space. Tails are closed geometrically once the
//! consecutive-term ratio has settled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::{neumaier_sum, QPoint};
use crate::repcore::{ln_quantum_dim_numeric, ln_quantum_dim_numeric_inverse, ray_direction, HighestWeightFamily};
use crate::root_system::{pair_weight_root, rho_pairing, RootSystem, Weight};

/// Relative spread below which four consecutive ratios count as settled.
pub const RATIO_STABILITY: f64 = 1e-9;
/// Ratios at or above `1 − DIVERGENCE_MARGIN` mean the series diverges.
pub const DIVERGENCE_MARGIN: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: u64 = 2_000_000;
/// Step sizes used by [`residue_limit`].
pub const RESIDUE_EPSILONS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model", content = "offset")]
pub enum EigenvalueModel {
    /// `λ_m = [m + t]`
    QNumber(u64),
    /// `λ_m = q^{-(m + t)}`
    PureExponential(u64),
}

impl EigenvalueModel {
    fn offset(self) -> u64 {
        match self {
            EigenvalueModel::QNumber(t) | EigenvalueModel::PureExponential(t) => t,
        }
    }

    /// `ln λ_m`.
    pub fn ln_eigenvalue(self, m: u64, q: QPoint) -> f64 {
        let lnq = q.ln();
        match self {
            EigenvalueModel::QNumber(t) => {
                let x = (m + t) as f64;
                -(x - 1.0) * lnq + (-(2.0 * x * lnq).exp()).ln_1p() - (-(2.0 * lnq).exp()).ln_1p()
            }
            EigenvalueModel::PureExponential(t) => -((m + t) as f64) * lnq,
        }
    }
}

/// One family of irreducibles in the form module of degree `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub k: usize,
    pub family: HighestWeightFamily,
    pub eigenvalue: EigenvalueModel,
    pub m_start: u64,
}

impl TowerSpec {
    fn validate(&self) -> Result<()> {
        // λ must be strictly positive and increasing: [0] = 0 is excluded
        if matches!(self.eigenvalue, EigenvalueModel::QNumber(_)) && self.m_start + self.eigenvalue.offset() == 0 {
            return Err(Error::Config(format!(
                "tower in degree {}: q-number eigenvalue [m + t] vanishes at m = 0 with t = 0",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    pub ell: usize,
    /// Line-bundle twist; only a label in this model.
    #[serde(rename = "N")]
    pub twist: i64,
    pub q: f64,
    pub towers: Vec<TowerSpec>,
}

impl SpectrumModel {
    pub fn root_system(&self) -> Result<RootSystem> {
        RootSystem::new(self.ell)
    }

    pub fn qpoint(&self) -> Result<QPoint> {
        QPoint::new(self.q)
    }

    /// Checks the tower-count and per-tower invariants.
    pub fn validate(&self) -> Result<()> {
        let rs = self.root_system()?;
        self.qpoint()?;
        if self.towers.len() != 2 * self.ell {
            return Err(Error::Config(format!(
                "expected {} towers for rank {}, got {}",
                2 * self.ell,
                self.ell,
                self.towers.len()
            )));
        }
        let dir = ray_direction(&rs);
        for t in &self.towers {
            if t.family.direction() != &dir {
                return Err(Error::Config(format!("tower in degree {} does not grow along ω_1 + ω_ℓ", t.k)));
            }
            if t.k > self.ell {
                return Err(Error::Config(format!("form degree {} exceeds rank {}", t.k, self.ell)));
            }
            t.validate()?;
        }
        Ok(())
    }
}

/// Per-tower override in a model configuration; absent fields keep defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerOverride {
    pub k: Option<usize>,
    pub base: Option<Vec<i64>>,
    pub eig_model: Option<EigModelName>,
    pub eig_offset: Option<u64>,
    pub m_start: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigModelName {
    Qnumber,
    Pure,
}

/// JSON model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub ell: usize,
    #[serde(rename = "N", default)]
    pub twist: i64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub towers: Option<Vec<TowerOverride>>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<SpectrumModel> {
        default_model(self.ell, self.twist, self.q, self.towers.as_deref())
    }
}

/// Degrees and default bases of the `2ℓ` towers, in order.
fn default_slots(rs: &RootSystem) -> Result<Vec<(usize, Weight)>> {
    let l = rs.rank();
    let mut slots = vec![(0, rs.zero())];
    for k in 1..l {
        slots.push((k, rs.fundamental(k)?));
        slots.push((k, rs.fundamental(k + 1)?));
    }
    slots.push((l, rs.zero()));
    Ok(slots)
}

/// Builds the `2ℓ`-tower model. Defaults: all `c` offsets 0, `λ_m = [m + 1]`,
/// summation from `m = 1`. `overrides`, when given, must list one entry per
/// tower in slot order.
pub fn default_model(ell: usize, twist: i64, q: f64, overrides: Option<&[TowerOverride]>) -> Result<SpectrumModel> {
    let rs = RootSystem::new(ell)?;
    QPoint::new(q)?;
    let slots = default_slots(&rs)?;
    if let Some(o) = overrides {
        if o.len() != slots.len() {
            return Err(Error::Config(format!(
                "tower overrides must have {} entries for rank {ell}, got {}",
                slots.len(),
                o.len()
            )));
        }
    }
    let empty = TowerOverride::default();
    let towers = slots
        .into_iter()
        .enumerate()
        .map(|(idx, (k, base))| {
            let o = overrides.map_or(&empty, |o| &o[idx]);
            if let Some(ok) = o.k {
                if ok != k {
                    return Err(Error::Config(format!("tower {idx} has degree {k}, override says {ok}")));
                }
            }
            let base = match &o.base {
                Some(b) => Weight::new(b.clone()),
                None => base,
            };
            let t = o.eig_offset.unwrap_or(1);
            let eigenvalue = match o.eig_model.unwrap_or(EigModelName::Qnumber) {
                EigModelName::Qnumber => EigenvalueModel::QNumber(t),
                EigModelName::Pure => EigenvalueModel::PureExponential(t),
            };
            Ok(TowerSpec {
                k,
                family: HighestWeightFamily::new(&rs, base, ray_direction(&rs))?,
                eigenvalue,
                m_start: o.m_start.unwrap_or(1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = SpectrumModel { ell, twist, q, towers };
    model.validate()?;
    Ok(model)
}

/// Single tower with `λ_m = q^{-m}` from `m = 1`; paired with
/// [`toy_weight_kind`] and [`Kernel::Pure`] its zeta function is
/// `q^{s−2ℓ} / (1 − q^{s−2ℓ})`.
pub fn toy_model(ell: usize, q: f64) -> Result<SpectrumModel> {
    let rs = RootSystem::new(ell)?;
    QPoint::new(q)?;
    Ok(SpectrumModel {
        ell,
        twist: 0,
        q,
        towers: vec![TowerSpec {
            k: 0,
            family: HighestWeightFamily::new(&rs, rs.zero(), ray_direction(&rs))?,
            eigenvalue: EigenvalueModel::PureExponential(0),
            m_start: 1,
        }],
    })
}

/// `q^{-2ℓm}`.
pub fn toy_weight_kind(ell: usize) -> WeightKind {
    WeightKind::Monomial(-2 * ell as i64)
}

/// Multiplicity weight attached to each irreducible summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// Trace of `K_{2ρ}`.
    Qdim,
    /// Trace of `K_{2ρ}^{-1}`.
    QdimInverse,
    /// Plain trace: the classical dimension.
    Classical,
    /// One per summand.
    Count,
    /// `q^{e·m}` regardless of the representation; used for closed-form checks.
    Monomial(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// `(λ² + 1)^{-s/2}`
    Shifted,
    /// `λ^{-s}`
    Pure,
}

fn ln_classical(rs: &RootSystem, lambda: &Weight) -> f64 {
    rs.positive_roots()
        .into_iter()
        .map(|r| {
            let y = rho_pairing(r);
            ((pair_weight_root(lambda, r) + y) as f64 / y as f64).ln()
        })
        .sum()
}

fn ln_weight(rs: &RootSystem, tower: &TowerSpec, m: u64, q: QPoint, kind: WeightKind) -> Result<f64> {
    Ok(match kind {
        WeightKind::Qdim => ln_quantum_dim_numeric(rs, &tower.family.at(m), q)?,
        WeightKind::QdimInverse => ln_quantum_dim_numeric_inverse(rs, &tower.family.at(m), q)?,
        WeightKind::Classical => ln_classical(rs, &tower.family.at(m)),
        WeightKind::Count => 0.0,
        WeightKind::Monomial(e) => e as f64 * m as f64 * q.ln(),
    })
}

fn ln_kernel(ln_lambda: f64, s: f64, kernel: Kernel) -> f64 {
    match kernel {
        Kernel::Pure => -s * ln_lambda,
        Kernel::Shifted => {
            // ln(λ² + 1), stable for large and small λ
            let ln_l2p1 = if ln_lambda > 0.0 {
                2.0 * ln_lambda + (-2.0 * ln_lambda).exp().ln_1p()
            } else {
                (2.0 * ln_lambda).exp().ln_1p()
            };
            -0.5 * s * ln_l2p1
        }
    }
}

/// `ln` of the contribution of summand `m` of `tower`.
pub fn ln_term(
    rs: &RootSystem,
    tower: &TowerSpec,
    m: u64,
    q: QPoint,
    s: f64,
    weight: WeightKind,
    kernel: Kernel,
) -> Result<f64> {
    Ok(ln_weight(rs, tower, m, q, weight)? + ln_kernel(tower.eigenvalue.ln_eigenvalue(m, q), s, kernel))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaResult {
    pub value: f64,
    pub terms_used: u64,
    pub tail_estimate: f64,
    pub converged: bool,
    pub per_tower_ratio: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct RatioWindow {
    last: [f64; 4],
    filled: usize,
}

impl RatioWindow {
    fn new() -> Self {
        RatioWindow { last: [0.0; 4], filled: 0 }
    }

    fn push(&mut self, r: f64) {
        self.last.rotate_left(1);
        self.last[3] = r;
        self.filled = (self.filled + 1).min(4);
    }

    fn latest(&self) -> f64 {
        self.last[3]
    }

    fn settled(&self) -> bool {
        if self.filled < 4 || !self.last.iter().all(|r| r.is_finite()) {
            return false;
        }
        let hi = self.last.iter().cloned().fold(f64::MIN, f64::max);
        let lo = self.last.iter().cloned().fold(f64::MAX, f64::min);
        hi - lo <= RATIO_STABILITY * hi.abs()
    }
}

struct TowerSum {
    value: f64,
    tail: f64,
    terms: u64,
    ratio: f64,
    converged: bool,
}

#[allow(clippy::too_many_arguments)]
fn sum_tower(
    rs: &RootSystem,
    tower: &TowerSpec,
    q: QPoint,
    s: f64,
    weight: WeightKind,
    kernel: Kernel,
    tol: f64,
    max_terms: u64,
) -> Result<TowerSum> {
    let mut terms = Vec::new();
    let mut window = RatioWindow::new();
    let mut prev: Option<f64> = None;
    let mut m = tower.m_start;
    while (terms.len() as u64) < max_terms {
        let ln_t = ln_term(rs, tower, m, q, s, weight, kernel)?;
        let t = ln_t.exp();
        terms.push(t);
        if let Some(p) = prev {
            window.push((ln_t - p).exp());
        }
        if window.settled() {
            let r = window.latest();
            if r >= 1.0 - DIVERGENCE_MARGIN {
                return Ok(TowerSum {
                    value: neumaier_sum(terms.iter().copied()),
                    tail: f64::INFINITY,
                    terms: terms.len() as u64,
                    ratio: r,
                    converged: false,
                });
            }
            let tail = t * r / (1.0 - r);
            if tail < tol {
                // smallest terms first
                let head = neumaier_sum(terms.iter().rev().copied());
                return Ok(TowerSum { value: head + tail, tail, terms: terms.len() as u64, ratio: r, converged: true });
            }
        }
        prev = Some(ln_t);
        m += 1;
    }
    let r = window.latest();
    Ok(TowerSum {
        value: neumaier_sum(terms.iter().rev().copied()),
        tail: if r < 1.0 { terms.last().copied().unwrap_or(0.0) * r / (1.0 - r) } else { f64::INFINITY },
        terms: terms.len() as u64,
        ratio: r,
        converged: false,
    })
}

fn check_s_tol(s: f64, tol: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be positive and finite, got {s}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Weighted zeta function `Σ_towers Σ_m w(Λ(m)) κ(λ_m)` with geometric tail
/// closure. `converged` is false when the terms stop shrinking (at or below
/// the abscissa) or `max_terms` per tower is exhausted.
pub fn zeta(
    model: &SpectrumModel,
    s: f64,
    weight: WeightKind,
    kernel: Kernel,
    tol: f64,
    max_terms: u64,
) -> Result<ZetaResult> {
    check_s_tol(s, tol)?;
    let rs = model.root_system()?;
    let q = model.qpoint()?;
    let per_tower_tol = tol / model.towers.len().max(1) as f64;
    let sums = model
        .towers
        .iter()
        .map(|t| sum_tower(&rs, t, q, s, weight, kernel, per_tower_tol, max_terms))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZetaResult {
        value: neumaier_sum(sums.iter().map(|t| t.value)),
        terms_used: sums.iter().map(|t| t.terms).sum(),
        tail_estimate: sums.iter().map(|t| t.tail).sum(),
        converged: sums.iter().all(|t| t.converged),
        per_tower_ratio: sums.iter().map(|t| t.ratio).collect(),
    })
}

/// Sum of the first `terms` summands of every tower, no tail.
pub fn partial_zeta(model: &SpectrumModel, s: f64, weight: WeightKind, kernel: Kernel, terms: u64) -> Result<f64> {
    check_s_tol(s, 1.0)?;
    let rs = model.root_system()?;
    let q = model.qpoint()?;
    let mut all = Vec::new();
    for t in &model.towers {
        for m in t.m_start..t.m_start + terms {
            all.push(ln_term(&rs, t, m, q, s, weight, kernel)?.exp());
        }
    }
    all.sort_by(|a, b| a.total_cmp(b));
    Ok(neumaier_sum(all))
}

/// Abscissa estimate with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub estimate: f64,
    pub probe: f64,
    pub per_tower_ratio: Vec<f64>,
    pub terms_inspected: u64,
}

/// Settled consecutive-term ratio of one tower at exponent `s`.
fn settled_ratio(
    rs: &RootSystem,
    tower: &TowerSpec,
    q: QPoint,
    s: f64,
    weight: WeightKind,
    kernel: Kernel,
    max_terms: u64,
) -> Result<(f64, u64)> {
    let mut window = RatioWindow::new();
    let mut prev = ln_term(rs, tower, tower.m_start, q, s, weight, kernel)?;
    for n in 1..max_terms {
        let cur = ln_term(rs, tower, tower.m_start + n, q, s, weight, kernel)?;
        window.push((cur - prev).exp());
        if window.settled() {
            return Ok((window.latest(), n + 1));
        }
        prev = cur;
    }
    Err(Error::Estimation(format!(
        "ratio in degree-{} tower did not settle within {max_terms} terms at s = {s} (last ratios {:?})",
        tower.k, window.last
    )))
}

/// `p̂ = s₀ − ln(r̂)/ln q` from the tower-averaged settled ratio at probe `s₀`.
pub fn spectral_dimension_at_probe(
    model: &SpectrumModel,
    weight: WeightKind,
    kernel: Kernel,
    probe: f64,
    max_terms: u64,
) -> Result<DimensionEstimate> {
    check_s_tol(probe, 1.0)?;
    let rs = model.root_system()?;
    let q = model.qpoint()?;
    let mut ratios = Vec::with_capacity(model.towers.len());
    let mut inspected = 0;
    for t in &model.towers {
        let (r, n) = settled_ratio(&rs, t, q, probe, weight, kernel, max_terms)?;
        ratios.push(r);
        inspected += n;
    }
    let mean_ln = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    Ok(DimensionEstimate {
        estimate: probe - mean_ln / q.ln(),
        probe,
        per_tower_ratio: ratios,
        terms_inspected: inspected,
    })
}

/// Probe at `s₀ = 1`, then re-probe one unit above the first estimate.
pub fn spectral_dimension_estimate(
    model: &SpectrumModel,
    weight: WeightKind,
    kernel: Kernel,
) -> Result<DimensionEstimate> {
    let first = spectral_dimension_at_probe(model, weight, kernel, 1.0, DEFAULT_MAX_TERMS)?;
    spectral_dimension_at_probe(model, weight, kernel, first.estimate.max(0.0) + 1.0, DEFAULT_MAX_TERMS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueResult {
    /// Extrapolated `lim_{ε→0} ε ζ(p + ε)`.
    pub value: f64,
    pub abscissa: f64,
    pub epsilons: Vec<f64>,
    /// `ε ζ(p + ε)` at each step.
    pub samples: Vec<f64>,
    /// Diagonal of the Richardson table; the last entry is `value`.
    pub extrapolants: Vec<f64>,
    /// `|R_last − R_prev| / |R_last|`.
    pub relative_change: f64,
}

/// Richardson extrapolation to `h → 0` of samples taken at `h, h/2, h/4, …`,
/// assuming an expansion in integer powers of `h`. Returns the table diagonal.
pub fn richardson_halving(samples: &[f64]) -> Vec<f64> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
    for (i, &g) in samples.iter().enumerate() {
        let mut row = vec![g];
        for j in 1..=i {
            let f = 2f64.powi(j as i32);
            row.push((f * row[j - 1] - table[i - 1][j - 1]) / (f - 1.0));
        }
        table.push(row);
    }
    table.iter().enumerate().map(|(i, r)| r[i]).collect()
}

/// `lim_{s→p⁺} (s − p) ζ(s)` from `ε ζ(p + ε)` at [`RESIDUE_EPSILONS`].
pub fn residue_limit(
    model: &SpectrumModel,
    weight: WeightKind,
    kernel: Kernel,
    p: f64,
    tol: f64,
) -> Result<ResidueResult> {
    let mut samples = Vec::with_capacity(RESIDUE_EPSILONS.len());
    for &eps in &RESIDUE_EPSILONS {
        let s = p + eps;
        let z = zeta(model, s, weight, kernel, tol, DEFAULT_MAX_TERMS)?;
        if !z.converged {
            return Err(Error::NotConverged { s });
        }
        samples.push(eps * z.value);
    }
    let diag = richardson_halving(&samples);
    let value = *diag.last().unwrap();
    let prev = diag[diag.len() - 2];
    Ok(ResidueResult {
        value,
        abscissa: p,
        epsilons: RESIDUE_EPSILONS.to_vec(),
        samples,
        relative_change: ((value - prev) / value).abs(),
        extrapolants: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(l: usize, q: f64) -> SpectrumModel {
        default_model(l, 0, q, None).unwrap()
    }

    fn toy(l: usize, q: f64) -> SpectrumModel {
        toy_model(l, q).unwrap()
    }

    fn toy_weight(l: usize) -> WeightKind {
        toy_weight_kind(l)
    }

    #[test]
    fn tower_structure() {
        let degrees = |l| model(l, 0.5).towers.iter().map(|t| t.k).collect::<Vec<_>>();
        assert_eq!(degrees(2), vec![0, 1, 1, 2]);
        assert_eq!(degrees(1), vec![0, 1]);
        assert_eq!(model(3, 0.5).towers.len(), 6);
        let m = model(3, 0.5);
        assert_eq!(m.towers[1].family.base(), &Weight::new(vec![1, 0, 0]));
        assert_eq!(m.towers[2].family.base(), &Weight::new(vec![0, 1, 0]));
        assert_eq!(m.towers[2].family.at(2), Weight::new(vec![2, 1, 2]));
        assert!(default_model(0, 0, 0.5, None).is_err());
        assert!(default_model(2, 0, 1.5, None).is_err());
    }

    #[test]
    fn eigenvalues() {
        let q = QPoint::new(0.5).unwrap();
        // [3] at q = 1/2 is 4 + 1 + 1/4
        assert!((EigenvalueModel::QNumber(1).ln_eigenvalue(2, q).exp() - 5.25).abs() < 1e-12);
        assert!((EigenvalueModel::PureExponential(0).ln_eigenvalue(3, q).exp() - 8.0).abs() < 1e-12);
        let mut o = vec![TowerOverride::default(); 4];
        o[0].eig_offset = Some(0);
        o[0].m_start = Some(0);
        assert!(matches!(default_model(2, 0, 0.5, Some(&o)), Err(Error::Config(_))));
    }

    #[test]
    fn toy_closed_form() {
        for &q in &[0.3, 0.5, 0.8] {
            for l in [1usize, 2, 3] {
                for &gap in &[0.05, 0.3, 1.0, 3.0] {
                    let s = 2.0 * l as f64 + gap;
                    let z = zeta(&toy(l, q), s, toy_weight(l), Kernel::Pure, 1e-15, DEFAULT_MAX_TERMS).unwrap();
                    let x = q.powf(gap);
                    let closed = x / (1.0 - x);
                    assert!(z.converged);
                    assert!(
                        ((z.value - closed) / closed).abs() < 1e-12,
                        "q={q} l={l} gap={gap}: {} vs {closed}",
                        z.value
                    );
                }
            }
        }
        let z = zeta(&toy(2, 0.5), 5.0, toy_weight(2), Kernel::Pure, 1e-14, 1000).unwrap();
        assert!((z.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn toy_residue() {
        let r = residue_limit(&toy(2, 0.5), toy_weight(2), Kernel::Pure, 4.0, 1e-14).unwrap();
        let expected = 1.0 / 2f64.ln();
        assert!((r.value - expected).abs() < 1e-8 * expected, "{} vs {expected}", r.value);
    }

    #[test]
    fn richardson_on_polynomial() {
        // exact for cubic in h with four samples
        let f = |h: f64| 3.0 - 2.0 * h + 0.5 * h * h + 7.0 * h * h * h;
        let s: Vec<f64> = RESIDUE_EPSILONS.iter().map(|&h| f(h)).collect();
        assert!((richardson_halving(&s).last().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn count_weight_always_converges() {
        for &s in &[0.05, 0.1, 1.0, 10.0] {
            let z =
                zeta(&model(2, 0.5), s, WeightKind::Count, Kernel::Shifted, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
            assert!(z.converged, "s={s}");
            assert!(z.tail_estimate < DEFAULT_TOL);
        }
    }

    #[test]
    fn divergence_below_abscissa() {
        let z = zeta(&model(2, 0.5), 3.5, WeightKind::Qdim, Kernel::Shifted, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert!(!z.converged);
        for r in &z.per_tower_ratio {
            assert!((r - 0.5f64.powf(-0.5)).abs() < 1e-6);
        }
    }

    #[test]
    fn invalid_arguments() {
        let m = model(2, 0.5);
        assert!(matches!(zeta(&m, 0.0, WeightKind::Qdim, Kernel::Pure, 1e-12, 10), Err(Error::Domain(_))));
        assert!(matches!(zeta(&m, 5.0, WeightKind::Qdim, Kernel::Pure, 0.0, 10), Err(Error::Domain(_))));
        assert!(matches!(zeta(&m, -1.0, WeightKind::Qdim, Kernel::Pure, 1e-12, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn estimates() {
        for &q in &[0.3, 0.5, 0.8] {
            for l in [2usize, 3] {
                let m = model(l, q);
                for kernel in [Kernel::Shifted, Kernel::Pure] {
                    let a = spectral_dimension_estimate(&m, WeightKind::Qdim, kernel).unwrap();
                    let b = spectral_dimension_estimate(&m, WeightKind::QdimInverse, kernel).unwrap();
                    assert!((a.estimate - 2.0 * l as f64).abs() < 1e-3, "q={q} l={l}: {}", a.estimate);
                    assert!((a.estimate - b.estimate).abs() < 1e-10 * a.estimate);
                }
            }
        }
        let c = spectral_dimension_estimate(&model(2, 0.5), WeightKind::Classical, Kernel::Shifted).unwrap();
        assert!(c.estimate.abs() < 0.05, "{}", c.estimate);
    }

    #[test]
    fn estimate_is_probe_invariant() {
        let m = model(2, 0.5);
        let base = spectral_dimension_at_probe(&m, WeightKind::Qdim, Kernel::Shifted, 4.5, DEFAULT_MAX_TERMS).unwrap();
        for &s0 in &[5.0, 5.5, 6.0] {
            let e = spectral_dimension_at_probe(&m, WeightKind::Qdim, Kernel::Shifted, s0, DEFAULT_MAX_TERMS).unwrap();
            assert!((e.estimate - base.estimate).abs() < 1e-6);
        }
    }

    #[test]
    fn estimate_ignores_offsets() {
        let plain = spectral_dimension_estimate(&model(3, 0.5), WeightKind::Qdim, Kernel::Shifted).unwrap();
        let mut o = vec![TowerOverride::default(); 6];
        o[0].base = Some(vec![2, 0, 1]);
        o[1].eig_offset = Some(3);
        o[2].eig_model = Some(EigModelName::Pure);
        o[3].m_start = Some(0);
        o[5].base = Some(vec![1, 0, 0]);
        let shifted = default_model(3, 0, 0.5, Some(&o)).unwrap();
        let z1 = zeta(&model(3, 0.5), 7.0, WeightKind::Qdim, Kernel::Shifted, 1e-12, DEFAULT_MAX_TERMS).unwrap();
        let z2 = zeta(&shifted, 7.0, WeightKind::Qdim, Kernel::Shifted, 1e-12, DEFAULT_MAX_TERMS).unwrap();
        assert!((z1.value - z2.value).abs() > 1e-6);
        let e = spectral_dimension_estimate(&shifted, WeightKind::Qdim, Kernel::Shifted).unwrap();
        assert!((e.estimate - plain.estimate).abs() < 1e-4);
    }

    #[test]
    fn inverse_weight_matches_termwise() {
        let m = model(3, 0.7);
        let rs = m.root_system().unwrap();
        let q = m.qpoint().unwrap();
        for t in &m.towers {
            for k in 0..200 {
                let a = ln_weight(&rs, t, k, q, WeightKind::Qdim).unwrap();
                let b = ln_weight(&rs, t, k, q, WeightKind::QdimInverse).unwrap();
                assert!(((a - b).exp() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zeta_decreases_in_s() {
        let m = model(2, 0.5);
        let mut last = f64::INFINITY;
        for i in 0..12 {
            let s = 4.1 + 0.4 * i as f64;
            let z = zeta(&m, s, WeightKind::Qdim, Kernel::Shifted, 1e-12, DEFAULT_MAX_TERMS).unwrap();
            assert!(z.converged && z.value < last);
            last = z.value;
        }
    }

    #[test]
    fn residue_of_full_model() {
        let m = model(2, 0.5);
        let r = residue_limit(&m, WeightKind::Qdim, Kernel::Pure, 4.0, 1e-12).unwrap();
        assert!(r.value > 0.0 && r.value.is_finite());
        assert!(r.relative_change < 1e-4, "{r:?}");
    }

    #[test]
    fn plain_trace_pole_order_at_zero() {
        // Σ_m m^d q^{εm} ∼ d!/(ε ln q^{-1})^{d+1} with d = 2ℓ − 1, so ε ζ(ε)
        // grows by 2^d per halving of ε.
        let m = model(2, 0.5);
        let c = residue_limit(&m, WeightKind::Classical, Kernel::Shifted, 0.0, 1e-12).unwrap();
        let growth: Vec<f64> = c.samples.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(growth.windows(2).all(|g| g[1] > g[0]));
        assert!((growth.last().unwrap() - 8.0).abs() < 0.2, "{growth:?}");
    }

    #[test]
    fn config_json() {
        let cfg: ModelConfig = serde_json::from_str(
            r#"{"ell": 2, "N": 1, "q": 0.5, "towers": [{}, {"k": 1, "base": [2, 0], "eig_model": "pure", "eig_offset": 0, "m_start": 2}, {}, {}]}"#,
        )
        .unwrap();
        let m = cfg.build().unwrap();
        assert_eq!(m.twist, 1);
        assert_eq!(m.towers[1].eigenvalue, EigenvalueModel::PureExponential(0));
        assert_eq!(m.towers[1].m_start, 2);
        assert_eq!(m.towers[1].family.base(), &Weight::new(vec![2, 0]));
        let bad: ModelConfig = serde_json::from_str(r#"{"ell": 2, "q": 0.5, "towers": [{}]}"#).unwrap();
        assert!(bad.build().is_err());
        assert!(serde_json::from_str::<ModelConfig>(r#"{"ell": 2, "q": 0.5, "bogus": 1}"#).is_err());
        let wrong_k: ModelConfig =
            serde_json::from_str(r#"{"ell": 2, "q": 0.5, "towers": [{"k": 1}, {}, {}, {}]}"#).unwrap();
        assert!(wrong_k.build().is_err());
    }
}

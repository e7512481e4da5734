//! Finite-dimensional harness for the twisted trace property
//! `ψ(ab) = ψ(Δ^{-1} b Δ a)` of the residue functional
//! `ψ(a) = lim_{s→p⁺} (s − p) Tr(Δ a (D² + 1)^{-s/2})`.
//!
//! `D` and `Δ` are diagonal in a common basis, so every product with them is
//! a row or column scaling. Only `a` and `b` are dense.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::{neumaier_sum, QPoint};

/// Positive diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator(Vec<f64>);

impl DiagonalOperator {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if let Some(bad) = eigenvalues.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("diagonal entries must be positive and finite, got {bad}")));
        }
        Ok(DiagonalOperator(eigenvalues))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Diagonal of `(D² + 1)^{-t/2}`.
    pub fn resolvent_power(&self, t: f64) -> Vec<f64> {
        self.0.iter().map(|d| (d * d + 1.0).powf(-0.5 * t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<f64>);

impl DenseOperator {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain(format!("operator must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("operator has non-finite entries".into()));
        }
        Ok(DenseOperator(m))
    }

    pub fn identity(n: usize) -> Self {
        DenseOperator(DMatrix::identity(n, n))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        DenseOperator::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn transpose(&self) -> Self {
        DenseOperator(self.0.transpose())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == 0.0))
    }
}

/// Weights of the shift pair: `b e_m = w_m e_{m+1}`, `a = bᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftWeights {
    /// `w_m = q^m`; `[D, b]` is bounded with norm `q^{-1} − 1`.
    Geometric,
    /// `w_m = 1`; `[D, b]` is unbounded as the truncation grows.
    Unit,
}

/// Truncated modular datum: `D_m = q^{-m}`, `Δ_m = q^{-pm}` for `m = 1..=M`
/// unless built from explicit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularModel {
    pub q: QPoint,
    pub p: f64,
    pub d: DiagonalOperator,
    pub delta: DiagonalOperator,
    pub a: DenseOperator,
    pub b: DenseOperator,
}

impl ModularModel {
    pub fn shift(size: usize, q: QPoint, p: f64, weights: ShiftWeights) -> Result<Self> {
        if size < 2 {
            return Err(Error::Domain(format!("truncation size must be at least 2, got {size}")));
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("abscissa must be nonnegative, got {p}")));
        }
        let qv = q.value();
        let d = DiagonalOperator::new((1..=size).map(|m| qv.powi(-(m as i32))).collect())?;
        let delta = DiagonalOperator::new((1..=size).map(|m| qv.powf(-p * m as f64)).collect())?;
        let mut b = DMatrix::zeros(size, size);
        for m in 0..size - 1 {
            b[(m + 1, m)] = match weights {
                ShiftWeights::Geometric => qv.powi(m as i32 + 1),
                ShiftWeights::Unit => 1.0,
            };
        }
        let b = DenseOperator::new(b)?;
        Ok(ModularModel { q, p, d, delta, a: b.transpose(), b })
    }

    pub fn with_operators(
        q: QPoint,
        p: f64,
        d: DiagonalOperator,
        delta: DiagonalOperator,
        a: DenseOperator,
        b: DenseOperator,
    ) -> Result<Self> {
        let n = d.dim();
        if delta.dim() != n || a.dim() != n || b.dim() != n {
            return Err(Error::Domain(format!(
                "dimension mismatch: D {n}, Δ {}, a {}, b {}",
                delta.dim(),
                a.dim(),
                b.dim()
            )));
        }
        Ok(ModularModel { q, p, d, delta, a, b })
    }

    pub fn size(&self) -> usize {
        self.d.dim()
    }

    /// Largest operator norm of `Δ a Δ^{-1}` and `Δ b Δ^{-1}`.
    pub fn conjugation_bound(&self) -> f64 {
        let dl = self.delta.eigenvalues();
        let conj = |x: &DenseOperator| {
            let m = DMatrix::from_fn(x.dim(), x.dim(), |i, j| dl[i] * x.0[(i, j)] / dl[j]);
            m.singular_values().max()
        };
        conj(&self.a).max(conj(&self.b))
    }

    /// `Tr(Δ (D² + 1)^{-s/2})` on the truncation.
    pub fn weighted_trace(&self, s: f64) -> f64 {
        let k = self.d.resolvent_power(s);
        neumaier_sum(self.delta.eigenvalues().iter().zip(&k).map(|(x, y)| x * y).rev())
    }

    /// Geometric estimate of the part of `Tr(Δ (D² + 1)^{-s/2})` cut off by the
    /// truncation, from the last two diagonal terms.
    pub fn truncation_tail(&self, s: f64) -> f64 {
        let k = self.d.resolvent_power(s);
        let dl = self.delta.eigenvalues();
        let n = self.size();
        let last = dl[n - 1] * k[n - 1];
        let r = last / (dl[n - 2] * k[n - 2]);
        if r >= 1.0 {
            f64::INFINITY
        } else {
            last * r / (1.0 - r)
        }
    }

    fn check_s(&self, s: f64) -> Result<()> {
        if !(s > self.p && s.is_finite()) {
            return Err(Error::Domain(format!("s = {s} must exceed the abscissa {}", self.p)));
        }
        Ok(())
    }
}

fn check_dims(d: &DiagonalOperator, b: &DenseOperator) -> Result<()> {
    if d.dim() != b.dim() {
        return Err(Error::Domain(format!("dimension mismatch: D {} vs b {}", d.dim(), b.dim())));
    }
    Ok(())
}

/// `[(D² + 1)^{-s/2}, b]`.
pub fn resolvent_commutator(d: &DiagonalOperator, b: &DenseOperator, s: f64) -> Result<DMatrix<f64>> {
    check_dims(d, b)?;
    let k = d.resolvent_power(s);
    Ok(DMatrix::from_fn(b.dim(), b.dim(), |i, j| (k[i] - k[j]) * b.0[(i, j)]))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Max-entry norm of `[(D²+1)^{-s/2}, b] + Σ_{j=1}^{k} (D²+1)^{-jr/2} [(D²+1)^{r/2}, b] (D²+1)^{-(k−j+1)r/2}`
/// with `r = s/k`. The identity telescopes, so this is rounding-level.
pub fn commutator_split_defect(d: &DiagonalOperator, b: &DenseOperator, s: f64, k: usize) -> Result<f64> {
    check_dims(d, b)?;
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let r = s / k as f64;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = s/k = {r} must lie in (0, 1)")));
    }
    let lhs = resolvent_commutator(d, b, s)?;
    let up = d.resolvent_power(-r);
    let n = b.dim();
    let powers: Vec<Vec<f64>> = (0..=k + 1).map(|j| d.resolvent_power(j as f64 * r)).collect();
    let mut rhs = DMatrix::<f64>::zeros(n, n);
    for j in 1..=k {
        let left = &powers[j];
        let right = &powers[k - j + 1];
        for c in 0..n {
            for row in 0..n {
                let inner = (up[row] - up[c]) * b.0[(row, c)];
                rhs[(row, c)] -= left[row] * inner * right[c];
            }
        }
    }
    Ok(max_abs(&(lhs - rhs)))
}

/// Max-entry norm of `[(D² + 1)^{-s/2}, b]`, the scale for [`commutator_split_defect`].
pub fn commutator_norm(d: &DiagonalOperator, b: &DenseOperator, s: f64) -> Result<f64> {
    Ok(max_abs(&resolvent_commutator(d, b, s)?))
}

/// Hölder pair `(p_j, q_j) = (s/(r(j − 1/2)), s/(r(k − j + 1/2)))` for
/// `j = 1..=k`, with `r = s/k`.
pub fn holder_exponents(s: f64, k: usize) -> Vec<(f64, f64)> {
    let r = s / k as f64;
    (1..=k).map(|j| (s / (r * (j as f64 - 0.5)), s / (r * ((k - j) as f64 + 0.5)))).collect()
}

/// `|(s − p) Tr(Δ a [(D² + 1)^{-s/2}, b])|`.
pub fn twisted_defect(model: &ModularModel, s: f64) -> Result<f64> {
    model.check_s(s)?;
    let comm = resolvent_commutator(&model.d, &model.b, s)?;
    let dl = model.delta.eigenvalues();
    let n = model.size();
    let terms = (0..n).flat_map(|i| {
        let a = &model.a;
        let comm = &comm;
        (0..n).map(move |j| dl[i] * a.0[(i, j)] * comm[(j, i)])
    });
    Ok(((s - model.p) * neumaier_sum(terms)).abs())
}

pub fn twisted_defect_scan(model: &ModularModel, s_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    s_values.iter().map(|&s| Ok((s, twisted_defect(model, s)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistedTraceCheck {
    pub s: f64,
    /// `(s − p) Tr(Δ a b K_s)`
    pub lhs: f64,
    /// `(s − p) Tr(Δ Δ^{-1} b Δ a K_s)`
    pub rhs: f64,
}

impl TwistedTraceCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn twisted_trace_check(model: &ModularModel, s: f64) -> Result<TwistedTraceCheck> {
    model.check_s(s)?;
    let k = &model.d.resolvent_power(s);
    let dl = model.delta.eigenvalues();
    let (a, b) = (&model.a.0, &model.b.0);
    let n = model.size();
    let lhs = neumaier_sum((0..n).flat_map(|i| (0..n).map(move |j| dl[i] * a[(i, j)] * b[(j, i)] * k[i])));
    // Δ Δ^{-1} b Δ a K = b Δ a K
    let rhs = neumaier_sum((0..n).flat_map(|i| (0..n).map(move |j| b[(i, j)] * dl[j] * a[(j, i)] * k[i])));
    let eps = s - model.p;
    Ok(TwistedTraceCheck { s, lhs: eps * lhs, rhs: eps * rhs })
}

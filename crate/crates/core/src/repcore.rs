//! Classical and quantum Weyl dimension formulas and the growth of quantum
//! dimensions along rays of highest weights.
//!
//! For A_ℓ every root has `(α, α) = 2`, so the normalised roots in the q-Weyl
//! formula coincide with the roots themselves and
//!
//! ```text
//! dim_q V_Λ = Π_{α>0} [(Λ+ρ, α)] / [(ρ, α)]
//! ```
//!
//! which is also the trace of `K_{2ρ}` on `V_Λ`.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::{qnum, LaurentPoly, QPoint};
use crate::root_system::{pair_weight_root, rho_pairing, two_rho_pairing, RootSystem, Weight};

/// The ray `Λ(m) = base + m·direction`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighestWeightFamily {
    base: Weight,
    direction: Weight,
}

impl HighestWeightFamily {
    pub fn new(rs: &RootSystem, base: Weight, direction: Weight) -> Result<Self> {
        rs.check_dominant(&base)?;
        rs.check_dominant(&direction)?;
        if direction.is_zero() {
            return Err(Error::InvalidFamily("direction must be nonzero".into()));
        }
        Ok(HighestWeightFamily { base, direction })
    }

    /// `(m + c_1) ω_1 + n_a ω_a + (m + c_2) ω_ℓ`, the shape used for the
    /// summands of the form modules. `middle` is `(a, n_a)`.
    pub fn projective(rs: &RootSystem, c1: i64, c2: i64, middle: Option<(usize, i64)>) -> Result<Self> {
        let l = rs.rank();
        let mut base = vec![0; l];
        base[0] += c1;
        base[l - 1] += c2;
        if let Some((a, na)) = middle {
            if a < 2 || a + 1 > l {
                return Err(Error::InvalidFamily(format!("middle node {a} must lie in 2..={}", l.saturating_sub(1))));
            }
            base[a - 1] += na;
        }
        HighestWeightFamily::new(rs, Weight::new(base), ray_direction(rs))
    }

    pub fn base(&self) -> &Weight {
        &self.base
    }

    pub fn direction(&self) -> &Weight {
        &self.direction
    }

    pub fn at(&self, m: u64) -> Weight {
        &self.base + &self.direction.scale(m as i64)
    }
}

/// `ω_1 + ω_ℓ` (equal to `2ω_1` when ℓ = 1).
pub fn ray_direction(rs: &RootSystem) -> Weight {
    let l = rs.rank();
    let mut d = vec![0; l];
    d[0] += 1;
    d[l - 1] += 1;
    Weight::new(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumDimension {
    pub exact: LaurentPoly,
    #[serde(with = "bigint_string")]
    pub classical_value: BigInt,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

pub fn quantum_dim(rs: &RootSystem, lambda: &Weight) -> Result<QuantumDimension> {
    quantum_dim_with(rs, lambda, qnum)
}

/// [`quantum_dim`] with the q-number constructor supplied by the caller.
pub fn quantum_dim_with<F>(rs: &RootSystem, lambda: &Weight, qnum_fn: F) -> Result<QuantumDimension>
where
    F: Fn(i64) -> Result<LaurentPoly>,
{
    rs.check_dominant(lambda)?;
    let mut num = LaurentPoly::one();
    let mut den = LaurentPoly::one();
    for r in rs.positive_roots() {
        num = &num * &qnum_fn(pair_weight_root(lambda, r) + rho_pairing(r))?;
        den = &den * &qnum_fn(rho_pairing(r))?;
    }
    Ok(QuantumDimension { exact: num.exact_div(&den)?, classical_value: classical_dim(rs, lambda)? })
}

/// `Π (Λ+ρ, α) / Π (ρ, α)`: both products formed exactly, divided once.
pub fn classical_dim(rs: &RootSystem, lambda: &Weight) -> Result<BigInt> {
    rs.check_dominant(lambda)?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for r in rs.positive_roots() {
        num *= pair_weight_root(lambda, r) + rho_pairing(r);
        den *= rho_pairing(r);
    }
    if &num % &den != BigInt::from(0) {
        return Err(Error::NonExactDivision);
    }
    Ok(num / den)
}

// ln([x]/[y]) = (y − x) ln q + ln(1 − q^{2x}) − ln(1 − q^{2y})
fn ln_qratio(x: i64, y: i64, lnq: f64) -> f64 {
    (y - x) as f64 * lnq + (-(2.0 * x as f64 * lnq).exp()).ln_1p() - (-(2.0 * y as f64 * lnq).exp()).ln_1p()
}

/// Product of paired ratios `q^{(ρ,α)−(Λ+ρ,α)} (1−q^{2(Λ+ρ,α)}) / (1−q^{2(ρ,α)})`.
pub fn quantum_dim_numeric(rs: &RootSystem, lambda: &Weight, q: QPoint) -> Result<f64> {
    rs.check_dominant(lambda)?;
    let qv = q.value();
    Ok(rs
        .positive_roots()
        .into_iter()
        .map(|r| {
            let x = pair_weight_root(lambda, r) + rho_pairing(r);
            let y = rho_pairing(r);
            let shift = (y - x) as f64;
            qv.powf(shift) * (1.0 - qv.powf(2.0 * x as f64)) / (1.0 - qv.powf(2.0 * y as f64))
        })
        .product())
}

/// Natural log of [`quantum_dim_numeric`], finite for arbitrarily large weights.
pub fn ln_quantum_dim_numeric(rs: &RootSystem, lambda: &Weight, q: QPoint) -> Result<f64> {
    rs.check_dominant(lambda)?;
    let lnq = q.ln();
    Ok(rs
        .positive_roots()
        .into_iter()
        .map(|r| ln_qratio(pair_weight_root(lambda, r) + rho_pairing(r), rho_pairing(r), lnq))
        .sum())
}

/// ln of the trace of `K_{2ρ}^{-1}`: the same product evaluated at base
/// `Q = 1/q > 1` as `(Q^x − Q^{-x}) / (Q^y − Q^{-y})`, switching to the
/// asymptotic form only where `Q^x` would overflow.
pub fn ln_quantum_dim_numeric_inverse(rs: &RootSystem, lambda: &Weight, q: QPoint) -> Result<f64> {
    rs.check_dominant(lambda)?;
    let big_q = 1.0 / q.value();
    let ln_big_q = big_q.ln();
    let ln_sinh_like = |x: i64| -> f64 {
        let t = x as f64 * ln_big_q;
        if t < 300.0 {
            (big_q.powf(x as f64) - big_q.powf(-(x as f64))).ln()
        } else {
            t + (-(-2.0 * t).exp()).ln_1p()
        }
    };
    Ok(rs
        .positive_roots()
        .into_iter()
        .map(|r| {
            let x = pair_weight_root(lambda, r) + rho_pairing(r);
            ln_sinh_like(x) - ln_sinh_like(rho_pairing(r))
        })
        .sum())
}

/// Numeric value of the partial product
/// `S_i = Π_{j=i+1}^{ℓ+1} [(Λ+ρ, α_ij)] / [(ρ, α_ij)]`, as a natural log.
pub fn ln_si_factor(rs: &RootSystem, lambda: &Weight, i: usize, q: QPoint) -> Result<f64> {
    rs.check_dominant(lambda)?;
    check_row(rs, i)?;
    let lnq = q.ln();
    Ok(rs
        .positive_roots()
        .into_iter()
        .filter(|r| r.i == i)
        .map(|r| ln_qratio(pair_weight_root(lambda, r) + rho_pairing(r), rho_pairing(r), lnq))
        .sum())
}

/// Most negative exponent of `dim_q V_Λ`, namely `−(2ρ, Λ)`.
pub fn trailing_exponent_formula(rs: &RootSystem, lambda: &Weight) -> Result<i64> {
    rs.check_dominant(lambda)?;
    Ok(-two_rho_pairing(lambda))
}

/// Per-step exponent of `dim_q V_{Λ(m)} ∼ q^{slope·m}`.
pub fn family_slope(f: &HighestWeightFamily) -> i64 {
    -two_rho_pairing(f.direction())
}

fn check_row(rs: &RootSystem, i: usize) -> Result<()> {
    if i == 0 || i > rs.rank() {
        return Err(Error::IndexOutOfRange { index: i, rank: rs.rank() });
    }
    Ok(())
}

/// Per-step exponent of the factor `S_i` along a family of projective shape:
/// `−Σ_{j>i} (direction, α_ij)`.
pub fn si_slope(rs: &RootSystem, f: &HighestWeightFamily, i: usize) -> Result<i64> {
    let l = rs.rank();
    if l < 2 {
        return Err(Error::InvalidFamily("row factors need distinct first and last nodes (rank ≥ 2)".into()));
    }
    check_row(rs, i)?;
    if f.direction() != &ray_direction(rs) {
        return Err(Error::InvalidFamily(format!("direction {} is not ω_1 + ω_ℓ", f.direction())));
    }
    let middle = &f.base().coords()[1..l - 1];
    if middle.iter().any(|&c| !(0..=1).contains(&c)) || middle.iter().filter(|&&c| c == 1).count() > 1 {
        return Err(Error::InvalidFamily(format!(
            "base {} must have at most one interior coordinate, equal to 1",
            f.base()
        )));
    }
    Ok(-rs.positive_roots().into_iter().filter(|r| r.i == i).map(|r| pair_weight_root(f.direction(), r)).sum::<i64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::dual_weight;
    use crate::weight_oracle::{char_at_k2rho, Twist, DEFAULT_PATTERN_CAP};
    use num_traits::ToPrimitive;

    fn rs(l: usize) -> RootSystem {
        RootSystem::new(l).unwrap()
    }

    fn w(c: &[i64]) -> Weight {
        Weight::new(c.to_vec())
    }

    fn lattice(l: usize, max: i64) -> Vec<Weight> {
        let mut out = Vec::new();
        let mut k = vec![0i64; l];
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

    #[test]
    fn small_examples() {
        let d = quantum_dim(&rs(1), &w(&[2])).unwrap();
        assert_eq!(d.exact, qnum(3).unwrap());
        for n in 0..10 {
            assert_eq!(quantum_dim(&rs(1), &w(&[n])).unwrap().exact, qnum(n + 1).unwrap());
        }
        let adj = quantum_dim(&rs(2), &w(&[1, 1])).unwrap();
        assert_eq!(adj.exact, &qnum(2).unwrap() * &qnum(4).unwrap());
        assert_eq!(adj.exact, LaurentPoly::from_terms([(-4, 1), (-2, 2), (0, 2), (2, 2), (4, 1)]));
        assert_eq!(adj.classical_value, BigInt::from(8));
        for l in 1..5 {
            assert_eq!(quantum_dim(&rs(l), &rs(l).zero()).unwrap().exact, LaurentPoly::one());
        }
    }

    #[test]
    fn classical_values() {
        assert_eq!(classical_dim(&rs(2), &w(&[1, 0])).unwrap(), BigInt::from(3));
        assert_eq!(classical_dim(&rs(2), &w(&[1, 1])).unwrap(), BigInt::from(8));
        assert_eq!(classical_dim(&rs(3), &w(&[1, 0, 1])).unwrap(), BigInt::from(15));
        assert_eq!(classical_dim(&rs(4), &rs(4).zero()).unwrap(), BigInt::from(1));
        assert!(matches!(classical_dim(&rs(2), &w(&[0, -1])), Err(Error::NotDominant(_))));
        assert!(matches!(quantum_dim(&rs(2), &w(&[0, -1])), Err(Error::NotDominant(_))));
    }

    #[test]
    fn numeric_examples() {
        let q = QPoint::new(0.5).unwrap();
        let v = quantum_dim_numeric(&rs(2), &w(&[1, 1]), q).unwrap();
        // q^-4 + 2q^-2 + 2 + 2q^2 + q^4 at q = 1/2
        assert!((v - 26.5625).abs() < 1e-12);
        assert_eq!(quantum_dim_numeric(&rs(3), &rs(3).zero(), q).unwrap(), 1.0);
    }

    #[test]
    fn numeric_agrees_with_exact() {
        for &qv in &[0.2, 0.5, 0.9] {
            let q = QPoint::new(qv).unwrap();
            for l in 1..=3 {
                for lam in lattice(l, 3) {
                    let exact = quantum_dim(&rs(l), &lam).unwrap().exact.eval(q);
                    let num = quantum_dim_numeric(&rs(l), &lam, q).unwrap();
                    let ln = ln_quantum_dim_numeric(&rs(l), &lam, q).unwrap();
                    let inv = ln_quantum_dim_numeric_inverse(&rs(l), &lam, q).unwrap();
                    assert!(((num - exact) / exact).abs() < 1e-9, "{lam} q={qv}");
                    assert!((ln.exp() / exact - 1.0).abs() < 1e-9);
                    assert!((inv - ln).abs() < 1e-12 * ln.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn large_weight_against_exact_big_integer_evaluation() {
        // Oracle: at q = 1/2, dim_q = Σ c_e 2^{-e} = (Σ c_e 2^{E−e}) / 2^E exactly.
        let r = rs(2);
        let lam = w(&[40, 40]);
        let exact = quantum_dim(&r, &lam).unwrap().exact;
        let big_e = -exact.trailing_exponent().unwrap();
        assert_eq!(big_e, 160);
        let scaled: BigInt = exact.terms().map(|(e, c)| c * (BigInt::one() << ((big_e - e) as usize))).sum();
        let oracle = scaled.to_f64().unwrap() / 2f64.powi(big_e as i32);
        let q = QPoint::new(0.5).unwrap();
        let v = quantum_dim_numeric(&r, &lam, q).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(((v - oracle) / oracle).abs() < 1e-12);
        // dim_q · q^{(2ρ,Λ)} → Π_{α>0} 1/(1 − q^{2(ρ,α)})
        let constant: f64 =
            r.positive_roots().iter().map(|&a| 1.0 / (1.0 - 0.25f64.powi(rho_pairing(a) as i32))).product();
        let lead = v * 0.5f64.powi(two_rho_pairing(&lam) as i32);
        assert!((lead / constant - 1.0).abs() < 0.01, "{lead} vs {constant}");
    }

    #[test]
    fn exponents() {
        assert_eq!(trailing_exponent_formula(&rs(2), &w(&[1, 1])).unwrap(), -4);
        assert_eq!(trailing_exponent_formula(&rs(3), &rs(3).zero()).unwrap(), 0);
        for m in 0..6 {
            let lam = w(&[m, 0, m]);
            assert_eq!(trailing_exponent_formula(&rs(3), &lam).unwrap(), -6 * m);
            let d = quantum_dim(&rs(3), &lam).unwrap().exact;
            assert_eq!(d.trailing_exponent().unwrap(), -6 * m);
            assert_eq!(d.leading_exponent().unwrap(), 6 * m);
        }
    }

    #[test]
    fn lattice_identities() {
        for l in 1..=3 {
            let r = rs(l);
            for lam in lattice(l, 2) {
                let d = quantum_dim(&r, &lam).unwrap();
                assert!(d.exact.is_palindromic(), "{lam}");
                assert_eq!(quantum_dim(&r, &dual_weight(&lam)).unwrap(), d);
                assert_eq!(d.exact.coefficient_sum(), d.classical_value);
                assert_eq!(d.exact.trailing_exponent().unwrap(), -two_rho_pairing(&lam));
                assert_eq!(d.exact.leading_exponent().unwrap(), two_rho_pairing(&lam));
                let ch = char_at_k2rho(&r, &lam, Twist::Direct, DEFAULT_PATTERN_CAP).unwrap();
                assert_eq!(ch, d.exact, "{lam}");
            }
        }
    }

    #[test]
    fn slopes() {
        let f = |l: usize, dir: &[i64]| HighestWeightFamily::new(&rs(l), rs(l).zero(), w(dir)).unwrap();
        assert_eq!(family_slope(&f(2, &[1, 1])), -4);
        assert_eq!(family_slope(&f(5, &[1, 0, 0, 0, 1])), -10);
        assert_eq!(family_slope(&f(1, &[2])), -2);
        let fam = HighestWeightFamily::projective(&rs(4), 0, 0, None).unwrap();
        assert_eq!(si_slope(&rs(4), &fam, 1).unwrap(), -5);
        assert_eq!(si_slope(&rs(4), &fam, 3).unwrap(), -1);
        let total: i64 = (1..=4).map(|i| si_slope(&rs(4), &fam, i).unwrap()).sum();
        assert_eq!(total, -8);
        assert!(matches!(si_slope(&rs(4), &fam, 5), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(si_slope(&rs(4), &fam, 0), Err(Error::IndexOutOfRange { .. })));
        let l1 = HighestWeightFamily::new(&rs(1), w(&[0]), w(&[2])).unwrap();
        assert!(matches!(si_slope(&rs(1), &l1, 1), Err(Error::InvalidFamily(_))));
        let bad = HighestWeightFamily::new(&rs(3), w(&[0, 2, 0]), w(&[1, 0, 1])).unwrap();
        assert!(si_slope(&rs(3), &bad, 1).is_err());
    }

    #[test]
    fn family_validation() {
        let r = rs(3);
        assert!(HighestWeightFamily::new(&r, r.zero(), r.zero()).is_err());
        assert!(HighestWeightFamily::new(&r, w(&[-1, 0, 0]), w(&[1, 0, 1])).is_err());
        assert!(HighestWeightFamily::projective(&r, 0, 0, Some((1, 1))).is_err());
        let f = HighestWeightFamily::projective(&r, 1, 2, Some((2, 1))).unwrap();
        assert_eq!(f.at(3), w(&[4, 1, 5]));
    }

    #[test]
    fn growth_ratio_matches_slope() {
        let q = QPoint::new(0.5).unwrap();
        for l in [2usize, 3] {
            let f = HighestWeightFamily::projective(&rs(l), 1, 2, None).unwrap();
            for m in 30..35u64 {
                let a = ln_quantum_dim_numeric(&rs(l), &f.at(m), q).unwrap();
                let b = ln_quantum_dim_numeric(&rs(l), &f.at(m + 1), q).unwrap();
                let slope = (b - a) / q.ln();
                assert!((slope + 2.0 * l as f64).abs() < 1e-6, "ℓ={l} m={m}: {slope}");
            }
        }
    }

    #[test]
    fn row_factor_growth() {
        let q = QPoint::new(0.5).unwrap();
        let r = rs(4);
        let f = HighestWeightFamily::projective(&r, 0, 1, Some((2, 1))).unwrap();
        for i in 1..=4 {
            let a = ln_si_factor(&r, &f.at(40), i, q).unwrap();
            let b = ln_si_factor(&r, &f.at(41), i, q).unwrap();
            let measured = (b - a) / q.ln();
            assert!((measured - si_slope(&r, &f, i).unwrap() as f64).abs() < 1e-9, "i={i}");
        }
    }

    #[test]
    fn quantum_dim_json() {
        let d = quantum_dim(&rs(2), &w(&[1, 0])).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"exact":{"terms":[[-2,"1"],[0,"1"],[2,"1"]]},"classical_value":"3"}"#);
    }
}

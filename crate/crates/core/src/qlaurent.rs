//! Integer Laurent polynomials in `q` with arbitrary-precision coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Deformation parameter, `0 < q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QPoint(f64);

impl QPoint {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(QPoint(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `ln q`, always negative.
    pub fn ln(self) -> f64 {
        self.0.ln()
    }
}

/// Canonical form: a coefficient map with no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, BigInt::one())
    }

    pub fn monomial(exponent: i64, coefficient: impl Into<BigInt>) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(exponent, coefficient.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    fn add_term(&mut self, exponent: i64, coefficient: BigInt) {
        if coefficient.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *slot += coefficient;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coefficient(&self, exponent: i64) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_exponent(&self) -> Result<i64> {
        self.terms.keys().next_back().copied().ok_or(Error::EmptyPolynomial)
    }

    pub fn trailing_exponent(&self) -> Result<i64> {
        self.terms.keys().next().copied().ok_or(Error::EmptyPolynomial)
    }

    /// Value at `q = 1`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// The substitution `q ↦ q^{-1}`.
    pub fn bar(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn is_palindromic(&self) -> bool {
        self.terms.iter().all(|(e, c)| self.terms.get(&-e) == Some(c))
    }

    pub fn shift(&self, by: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect() }
    }

    /// Exact quotient `self / den`.
    ///
    /// Long division from the trailing exponent. A nonzero remainder is an
    /// error, never truncated.
    pub fn exact_div(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        let (den_lo, den_lo_c) = match den.terms.iter().next() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let den_hi = den.leading_exponent()?;
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        let max_quot = self.leading_exponent()? - den_hi;
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        while let Some((&e, c)) = rem.terms.iter().next() {
            let qe = e - den_lo;
            if qe > max_quot || !(c % &den_lo_c).is_zero() {
                return Err(Error::NonExactDivision);
            }
            let qc = c / &den_lo_c;
            for (de, dc) in &den.terms {
                rem.add_term(de + qe, -(dc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// Floating-point value at `q`.
    ///
    /// Terms are accumulated in descending order of magnitude with
    /// compensated summation. For `|exponent|` beyond roughly `1000/|log10 q|`
    /// individual terms overflow and the result is `inf` per IEEE semantics.
    pub fn eval(&self, q: QPoint) -> f64 {
        let mut vals: Vec<f64> =
            self.terms.iter().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * pow_i64(q.0, *e)).collect();
        vals.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        neumaier_sum(vals)
    }
}

fn pow_i64(x: f64, e: i64) -> f64 {
    match i32::try_from(e) {
        Ok(e) => x.powi(e),
        Err(_) => x.powf(e as f64),
    }
}

pub(crate) fn neumaier_sum(vals: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in vals {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The q-number `[x] = (q^{-x} − q^x)/(q^{-1} − q) = q^{-(x-1)} + q^{-(x-3)} + … + q^{x-1}`.
pub fn qnum(x: i64) -> Result<LaurentPoly> {
    if x < 0 {
        return Err(Error::NegativeQNumber(x));
    }
    Ok(LaurentPoly::from_terms((0..x).map(|k| (-(x - 1) + 2 * k, BigInt::one()))))
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match (*e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (e, true) => write!(f, "q^{e}")?,
                (e, false) => write!(f, "{mag}q^{e}")?,
            }
        }
        Ok(())
    }
}

/// JSON form `{"terms": [[exponent, "coefficient"], …]}`, exponents ascending.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            terms: Vec<(i64, String)>,
        }
        Repr { terms: self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            terms: Vec<(i64, String)>,
        }
        let r = Repr::deserialize(d)?;
        let mut p = LaurentPoly::zero();
        let mut last = None;
        for (e, c) in r.terms {
            if last.is_some_and(|l| l >= e) {
                return Err(D::Error::custom("exponents must be strictly ascending"));
            }
            last = Some(e);
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient in canonical form"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn qnumbers() {
        assert!(qnum(0).unwrap().is_zero());
        assert_eq!(qnum(1).unwrap(), LaurentPoly::one());
        assert_eq!(qnum(3).unwrap(), p(&[(-2, 1), (0, 1), (2, 1)]));
        assert_eq!(qnum(-1), Err(Error::NegativeQNumber(-1)));
        assert_eq!(qnum(5).unwrap().trailing_exponent().unwrap(), -4);
    }

    #[test]
    fn products() {
        let two = qnum(2).unwrap();
        assert_eq!(&two * &qnum(1).unwrap(), two);
        assert_eq!(&two * &two, p(&[(-2, 1), (0, 2), (2, 1)]));
        assert!((&two * &LaurentPoly::zero()).is_zero());
        let t = &two * &qnum(4).unwrap();
        assert_eq!(t, p(&[(-4, 1), (-2, 2), (0, 2), (2, 2), (4, 1)]));
        assert!(t.is_palindromic());
    }

    #[test]
    fn division() {
        let two = qnum(2).unwrap();
        let four = qnum(4).unwrap();
        assert_eq!((&two * &four).exact_div(&two).unwrap(), four);
        assert_eq!(qnum(3).unwrap().exact_div(&LaurentPoly::one()).unwrap(), qnum(3).unwrap());
        assert_eq!(four.exact_div(&two).unwrap(), p(&[(-2, 1), (2, 1)]));
        assert_eq!(four.exact_div(&LaurentPoly::zero()), Err(Error::DivisionByZero));
        assert_eq!(qnum(3).unwrap().exact_div(&two), Err(Error::NonExactDivision));
        assert_eq!(p(&[(0, 3)]).exact_div(&p(&[(0, 2)])), Err(Error::NonExactDivision));
    }

    #[test]
    fn bar_and_exponents() {
        assert_eq!(qnum(3).unwrap().bar(), qnum(3).unwrap());
        assert_eq!(p(&[(2, 1)]).bar(), p(&[(-2, 1)]));
        assert_eq!(LaurentPoly::zero().leading_exponent(), Err(Error::EmptyPolynomial));
        assert_eq!(LaurentPoly::zero().trailing_exponent(), Err(Error::EmptyPolynomial));
        assert!(!p(&[(1, 1)]).is_palindromic());
    }

    #[test]
    fn evaluation() {
        let q = QPoint::new(0.5).unwrap();
        assert_eq!(qnum(2).unwrap().eval(q), 2.5);
        assert!(QPoint::new(1.0).is_err());
        assert!(QPoint::new(0.0).is_err());
        assert!(QPoint::new(f64::NAN).is_err());
    }

    #[test]
    fn qnum_matches_closed_form() {
        for &qv in &[0.1, 0.3, 0.5, 0.8, 0.95] {
            let q = QPoint::new(qv).unwrap();
            for x in 0..=200i64 {
                let closed = (qv.powi(-x as i32) - qv.powi(x as i32)) / (1.0 / qv - qv);
                let got = qnum(x).unwrap().eval(q);
                if x == 0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(((got - closed) / closed).abs() < 1e-12, "x={x} q={qv}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let t = &qnum(2).unwrap() * &qnum(4).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"terms":[[-4,"1"],[-2,"2"],[0,"2"],[2,"2"],[4,"1"]]}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let big = LaurentPoly::monomial(3, "123456789012345678901234567890".parse::<BigInt>().unwrap());
        let back: LaurentPoly = serde_json::from_str(&serde_json::to_string(&big).unwrap()).unwrap();
        assert_eq!(back, big);
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"terms":[[1,"1"],[0,"1"]]}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(-2, 1), (0, 2), (2, -3)]).to_string(), "q^-2 + 2 - 3q^2");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly() -> impl Strategy<Value = LaurentPoly> {
            proptest::collection::vec((-6i64..6, -5i64..5), 0..6).prop_map(LaurentPoly::from_terms)
        }

        proptest! {
            #[test]
            fn ring_axioms(a in poly(), b in poly(), c in poly()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert!((&a - &a).is_zero());
                prop_assert_eq!(&a + &(-&b), &a - &b);
            }

            #[test]
            fn division_inverts_multiplication(a in poly(), b in poly()) {
                prop_assume!(!b.is_zero());
                prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
            }

            #[test]
            fn bar_is_multiplicative_involution(a in poly(), b in poly()) {
                prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
                prop_assert_eq!(a.bar().bar(), a.clone());
                prop_assert_eq!(a.bar() == a, a.is_palindromic());
            }
        }
    }
}

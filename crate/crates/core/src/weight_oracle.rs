//! Brute-force weight multiplicities for A_ℓ irreducibles.
//!
//! Two independent algorithms: Gelfand–Tsetlin pattern enumeration (pure
//! integer combinatorics) and Freudenthal's recursion over the dominant
//! chamber. Either one yields the character at `K_{2ρ}^{±1}`, which must agree
//! with the q-Weyl product formula.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::LaurentPoly;
use crate::root_system::{pair_weight_root, two_rho_pairing, RootSystem, Weight};

pub const DEFAULT_PATTERN_CAP: u64 = 1_000_000;

/// Weakly decreasing vector of length `ℓ+1` ending in 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition(Vec<i64>);

impl Partition {
    pub fn parts(&self) -> &[i64] {
        &self.0
    }
}

/// Interlacing triangular array; row `r` (0-based) has `ℓ+1−r` entries and
/// row 0 is the partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtPattern {
    rows: Vec<Vec<i64>>,
}

impl GtPattern {
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn is_interlacing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (up, down) = (&w[0], &w[1]);
            down.len() + 1 == up.len() && down.iter().enumerate().all(|(c, &y)| up[c] >= y && y >= up[c + 1])
        })
    }

    /// Weight in fundamental coordinates. With `σ_k` the sum of the row of
    /// length `k`, the gl-weight is `w_k = σ_k − σ_{k−1}` and
    /// `m_j = w_j − w_{j+1}`.
    pub fn weight(&self) -> Weight {
        weight_from_row_sums(&self.rows.iter().map(|r| r.iter().sum()).collect::<Vec<i64>>())
    }
}

// `sums[r]` is the sum of row r, rows ordered from longest to shortest.
fn weight_from_row_sums(sums: &[i64]) -> Weight {
    let n = sums.len();
    // σ_k for k = 1..=n is sums[n − k]
    let sigma = |k: usize| if k == 0 { 0 } else { sums[n - k] };
    let w: Vec<i64> = (1..=n).map(|k| sigma(k) - sigma(k - 1)).collect();
    Weight::new(w.windows(2).map(|p| p[0] - p[1]).collect())
}

/// Map from weights to multiplicities for one irreducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMultiplicityTable {
    pub highest: Weight,
    pub entries: BTreeMap<Weight, u64>,
}

impl WeightMultiplicityTable {
    pub fn multiplicity(&self, mu: &Weight) -> u64 {
        self.entries.get(mu).copied().unwrap_or(0)
    }

    pub fn dimension(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries present in one table but not matching in the other.
    pub fn diff(&self, other: &WeightMultiplicityTable) -> Vec<(Weight, u64, u64)> {
        let mut keys: Vec<&Weight> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|k| {
                let (a, b) = (self.multiplicity(k), other.multiplicity(k));
                (a != b).then(|| (k.clone(), a, b))
            })
            .collect()
    }
}

impl Serialize for WeightMultiplicityTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            highest: &'a Weight,
            entries: Vec<(&'a Weight, u64)>,
        }
        Repr { highest: &self.highest, entries: self.entries.iter().map(|(w, m)| (w, *m)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightMultiplicityTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            highest: Weight,
            entries: Vec<(Weight, u64)>,
        }
        let r = Repr::deserialize(d)?;
        Ok(WeightMultiplicityTable { highest: r.highest, entries: r.entries.into_iter().collect() })
    }
}

pub fn to_partition(rs: &RootSystem, lambda: &Weight) -> Result<Partition> {
    rs.check_dominant(lambda)?;
    let n = lambda.coords();
    let mut parts = vec![0; rs.rank() + 1];
    for i in (0..rs.rank()).rev() {
        parts[i] = parts[i + 1] + n[i];
    }
    Ok(Partition(parts))
}

/// Visit every GT pattern with the given top row, lexicographically on rows.
/// Returns the number of patterns visited.
pub fn for_each_gt_pattern<F>(top: &Partition, cap: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(&GtPattern),
{
    let mut pat = GtPattern { rows: vec![top.0.clone()] };
    let mut count = 0u64;
    descend(&mut pat, cap, &mut count, &mut visit)?;
    Ok(count)
}

fn descend<F: FnMut(&GtPattern)>(pat: &mut GtPattern, cap: u64, count: &mut u64, visit: &mut F) -> Result<()> {
    let up = pat.rows.last().expect("pattern has a top row").clone();
    if up.len() == 1 {
        *count += 1;
        if *count > cap {
            return Err(Error::ResourceCap { cap });
        }
        visit(pat);
        return Ok(());
    }
    let width = up.len() - 1;
    let mut row: Vec<i64> = (0..width).map(|c| up[c + 1]).collect();
    pat.rows.push(row.clone());
    loop {
        *pat.rows.last_mut().unwrap() = row.clone();
        descend(pat, cap, count, visit)?;
        // odometer over up[c+1] ≤ row[c] ≤ up[c], last position fastest
        let mut c = width;
        loop {
            if c == 0 {
                pat.rows.pop();
                return Ok(());
            }
            c -= 1;
            if row[c] < up[c] {
                row[c] += 1;
                for (k, r) in row.iter_mut().enumerate().skip(c + 1) {
                    *r = up[k + 1];
                }
                break;
            }
        }
    }
}

pub fn multiplicities_gt(rs: &RootSystem, lambda: &Weight, cap: u64) -> Result<WeightMultiplicityTable> {
    let top = to_partition(rs, lambda)?;
    let mut entries = BTreeMap::new();
    for_each_gt_pattern(&top, cap, |p| {
        *entries.entry(p.weight()).or_insert(0) += 1;
    })?;
    Ok(WeightMultiplicityTable { highest: lambda.clone(), entries })
}

// ε-coordinates `x_k = Σ_{j≥k} m_j`, `x_{ℓ+1} = 0`; the Weyl group permutes them.
fn to_epsilon(w: &Weight) -> Vec<i64> {
    let m = w.coords();
    let mut x = vec![0; m.len() + 1];
    for i in (0..m.len()).rev() {
        x[i] = x[i + 1] + m[i];
    }
    x
}

fn from_epsilon(x: &[i64]) -> Weight {
    Weight::new(x.windows(2).map(|p| p[0] - p[1]).collect())
}

fn dominant_representative(w: &Weight) -> Weight {
    let mut x = to_epsilon(w);
    x.sort_unstable_by(|a, b| b.cmp(a));
    from_epsilon(&x)
}

fn next_permutation(v: &mut [i64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The Weyl orbit of a weight (distinct elements).
pub fn weyl_orbit(w: &Weight) -> Vec<Weight> {
    let mut x = to_epsilon(w);
    x.sort_unstable();
    let mut out = vec![from_epsilon(&x)];
    while next_permutation(&mut x) {
        out.push(from_epsilon(&x));
    }
    out
}

/// Dominant weights `μ ≤ Λ`, paired with their depth `Σ k_i` where
/// `Λ − μ = Σ k_i α_i`.
fn dominant_weights_below(rs: &RootSystem, lambda: &Weight, cap: u64) -> Result<Vec<(usize, Weight)>> {
    let l = rs.rank();
    let n = l as i64 + 1;
    let g = rs.scaled_gram();
    // k_i ≤ (A^{-1} Λ)_i because A^{-1} has positive entries and μ is dominant.
    let bound: Vec<i64> = (0..l).map(|i| (0..l).map(|j| g[i][j] * lambda.coords()[j]).sum::<i64>() / n).collect();
    let boxed: u128 = bound.iter().map(|b| (*b as u128) + 1).product();
    if boxed > cap as u128 {
        return Err(Error::ResourceCap { cap });
    }
    let cartan = rs.cartan_matrix();
    let mut out = Vec::new();
    let mut k = vec![0i64; l];
    loop {
        let mu: Vec<i64> =
            (0..l).map(|r| lambda.coords()[r] - (0..l).map(|c| cartan[r][c] * k[c]).sum::<i64>()).collect();
        if mu.iter().all(|&c| c >= 0) {
            out.push((k.iter().sum::<i64>() as usize, Weight::new(mu)));
        }
        let mut i = 0;
        loop {
            if i == l {
                out.sort();
                return Ok(out);
            }
            if k[i] < bound[i] {
                k[i] += 1;
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

pub fn multiplicities_freudenthal(rs: &RootSystem, lambda: &Weight, cap: u64) -> Result<WeightMultiplicityTable> {
    rs.check_dominant(lambda)?;
    let n = rs.rank() as i64 + 1;
    let rho = rs.rho();
    let roots: Vec<_> = rs.positive_roots().into_iter().map(|r| (r, rs.root_weight(r))).collect();
    let lr = lambda + &rho;
    let top_norm = rs.scaled_inner(&lr, &lr);

    let dominant = dominant_weights_below(rs, lambda, cap)?;
    let mut dom_mult: HashMap<Weight, u64> = HashMap::new();
    for (_, mu) in &dominant {
        if mu == lambda {
            dom_mult.insert(mu.clone(), 1);
            continue;
        }
        let mut acc: i64 = 0;
        for (root, aw) in &roots {
            let mut nu = mu + aw;
            while let Some(&m) = dom_mult.get(&dominant_representative(&nu)) {
                acc += m as i64 * pair_weight_root(&nu, *root);
                nu = &nu + aw;
            }
        }
        let mr = mu + &rho;
        let denom = top_norm - rs.scaled_inner(&mr, &mr);
        let numer = 2 * n * acc;
        if denom <= 0 || numer % denom != 0 {
            return Err(Error::Domain(format!("Freudenthal recursion produced a non-integral multiplicity at {mu}")));
        }
        dom_mult.insert(mu.clone(), (numer / denom) as u64);
    }

    let mut entries = BTreeMap::new();
    let mut total = 0u64;
    for (mu, m) in dom_mult.into_iter().filter(|(_, m)| *m > 0) {
        for w in weyl_orbit(&mu) {
            total += m;
            if total > cap {
                return Err(Error::ResourceCap { cap });
            }
            entries.insert(w, m);
        }
    }
    Ok(WeightMultiplicityTable { highest: lambda.clone(), entries })
}

/// Which power of `K_{2ρ}` the character is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Twist {
    Direct,
    Inverse,
}

impl Twist {
    pub fn sign(self) -> i64 {
        match self {
            Twist::Direct => 1,
            Twist::Inverse => -1,
        }
    }
}

/// `Σ_μ mult(μ) q^{±(2ρ,μ)}`, i.e. the trace of `K_{2ρ}^{±1}`, from GT multiplicities.
pub fn char_at_k2rho(rs: &RootSystem, lambda: &Weight, twist: Twist, cap: u64) -> Result<LaurentPoly> {
    let table = multiplicities_gt(rs, lambda, cap)?;
    Ok(character_of(&table, twist))
}

pub fn character_of(table: &WeightMultiplicityTable, twist: Twist) -> LaurentPoly {
    LaurentPoly::from_terms(table.entries.iter().map(|(mu, m)| (twist.sign() * two_rho_pairing(mu), BigInt::from(*m))))
}

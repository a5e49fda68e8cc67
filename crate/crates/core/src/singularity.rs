//! Finite subgroups of `T^n` as Q-factorial toric singularities: the axis condition, minimal
//! log-discrepancies and canonical forms of cyclic quotients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::rational::{format_rational, parse_rational, rat_u128, rat_u64};
use crate::lattice::Rational;
use crate::torus::{span_residues, FiniteSubgroup, TorusPoint};

/// The cyclic quotient `1/r (a_1, …, a_n)`: the subgroup generated by `(a_1/r, …, a_n/r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CyclicWire")]
pub struct CyclicQuotient {
    r: u64,
    weights: Vec<u64>,
}

#[derive(Deserialize)]
struct CyclicWire {
    r: u64,
    weights: Vec<i64>,
}

impl TryFrom<CyclicWire> for CyclicQuotient {
    type Error = Error;
    fn try_from(w: CyclicWire) -> Result<Self> {
        CyclicQuotient::new(w.r, &w.weights)
    }
}

impl CyclicQuotient {
    /// Weights are reduced into `[0, r)`.
    pub fn new(r: u64, weights: &[i64]) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("cyclic quotient index r must be at least 1".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidInput("cyclic quotient needs at least one weight".into()));
        }
        let weights = weights
            .iter()
            .map(|&a| i128::from(a).rem_euclid(i128::from(r)) as u64)
            .collect();
        Ok(CyclicQuotient { r, weights })
    }

    pub(crate) fn from_reduced(r: u64, weights: Vec<u64>) -> Self {
        debug_assert!(weights.iter().all(|&a| a < r));
        CyclicQuotient { r, weights }
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn ambient_dim(&self) -> usize {
        self.weights.len()
    }

    /// `gcd(r, a_1, …, a_n)`.
    pub fn content(&self) -> u64 {
        self.weights.iter().fold(self.r, |g, &a| g.gcd(&a))
    }

    /// Order of the generator, `r / gcd(r, a_1, …, a_n)`.
    pub fn group_order(&self) -> u64 {
        self.r / self.content()
    }

    /// The same subgroup presented with `r` equal to its order.
    pub fn faithful(&self) -> CyclicQuotient {
        let g = self.content();
        CyclicQuotient {
            r: self.r / g,
            weights: self.weights.iter().map(|a| a / g).collect(),
        }
    }

    pub fn generator(&self) -> TorusPoint {
        self.multiple(1)
    }

    /// `k · (a_1, …, a_n) / r` reduced mod 1.
    pub fn multiple(&self, k: u64) -> TorusPoint {
        TorusPoint::from_reduced(self.weights.iter().map(|&a| rat_u64(mul_mod(k, a, self.r), self.r)).collect())
    }

    /// Axis condition via gcds: a nonzero multiple lies on axis `i` iff
    /// `gcd(r, a_j : j ≠ i) > 1` for a faithful presentation.
    pub fn satisfies_axis_condition(&self) -> bool {
        let f = self.faithful();
        if f.r == 1 {
            return true;
        }
        (0..f.weights.len()).all(|i| {
            let g = f
                .weights
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(f.r, |g, (_, &a)| g.gcd(&a));
            g == 1
        })
    }
}

impl fmt::Display for CyclicQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(u64::to_string).collect();
        write!(f, "1/{}({})", self.r, w.join(","))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Minimal log-discrepancy with a minimizing nonzero element.
///
/// For the trivial group there is no nonzero element; the value is then the smooth-point
/// value `n` and `witness` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MldResult {
    pub value: Rational,
    pub witness: Option<TorusPoint>,
}

impl MldResult {
    fn smooth(n: usize) -> Self {
        MldResult {
            value: Rational::from_integer(BigInt::from(n)),
            witness: None,
        }
    }

    /// The value comes from the smooth-point convention rather than a group element.
    pub fn is_smooth_convention(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Serialize, Deserialize)]
struct MldWire {
    mld: String,
    witness: Option<TorusPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    convention: Option<String>,
}

const SMOOTH_CONVENTION: &str = "smooth-point";

impl Serialize for MldResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MldWire {
            mld: format_rational(&self.value),
            witness: self.witness.clone(),
            convention: self.is_smooth_convention().then(|| SMOOTH_CONVENTION.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MldResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MldWire::deserialize(d)?;
        Ok(MldResult {
            value: parse_rational("mld", &w.mld).map_err(serde::de::Error::custom)?,
            witness: w.witness,
        })
    }
}

pub fn from_cyclic(q: &CyclicQuotient, cap: u64) -> Result<FiniteSubgroup> {
    let f = q.faithful();
    span_residues(f.ambient_dim(), f.r, f.weights, cap)
}

/// `F ∩ (R/Z)·e_i = {0}` for every axis `i`.
pub fn defines_toric_singularity(g: &FiniteSubgroup) -> bool {
    g.residues()
        .skip(1)
        .all(|x| x.iter().filter(|&&c| c != 0).count() > 1)
}

/// Minimal coordinate sum over the nonzero elements. The axis condition is not re-checked.
pub fn mld(g: &FiniteSubgroup) -> MldResult {
    let best = g
        .residues()
        .skip(1)
        .map(|x| (x.iter().map(|&c| c as u128).sum::<u128>(), x))
        .min_by_key(|(s, _)| *s);
    match best {
        None => MldResult::smooth(g.ambient_dim()),
        Some((sum, x)) => MldResult {
            value: rat_u128(sum, g.exponent()),
            witness: Some(g.residue_to_point(x)),
        },
    }
}

/// Scan of the multiples `k·P`, `1 ≤ k < ord`: the least residue sum and the first `k`
/// attaining it, or the first `k` whose multiple lies on an axis.
pub(crate) fn cyclic_scan(q: &CyclicQuotient) -> std::result::Result<Option<(u128, u64)>, u64> {
    let ord = q.group_order();
    let r = q.r;
    let mut cur = vec![0u64; q.weights.len()];
    let mut best: Option<(u128, u64)> = None;
    for k in 1..ord {
        let mut sum = 0u128;
        let mut nonzero = 0usize;
        // cur = k·a mod r
        for (t, &a) in cur.iter_mut().zip(&q.weights) {
            *t = if *t >= r - a { *t - (r - a) } else { *t + a };
            sum += *t as u128;
            nonzero += usize::from(*t != 0);
        }
        if nonzero <= 1 {
            return Err(k);
        }
        if best.is_none_or(|(s, _)| sum < s) {
            best = Some((sum, k));
        }
    }
    Ok(best)
}

/// Direct computation of `min_k Σ_i {k a_i / r}` without materializing the group.
pub fn mld_cyclic(q: &CyclicQuotient) -> Result<MldResult> {
    match cyclic_scan(q) {
        Err(k) => Err(Error::InvalidSingularity(format!(
            "{q}: the element {} lies on a coordinate axis",
            q.multiple(k)
        ))),
        Ok(None) => Ok(MldResult::smooth(q.ambient_dim())),
        Ok(Some((sum, k))) => Ok(MldResult {
            value: rat_u128(sum, q.r),
            witness: Some(q.multiple(k)),
        }),
    }
}

/// `mld > eps` when `strict`, `mld >= eps` otherwise.
pub fn meets_threshold(value: &Rational, eps: &Rational, strict: bool) -> bool {
    if strict {
        value > eps
    } else {
        value >= eps
    }
}

pub fn is_eps_log_terminal(g: &FiniteSubgroup, eps: &Rational, strict: bool) -> bool {
    meets_threshold(&mld(g).value, eps, strict)
}

/// Lexicographically least sorted weight tuple over all unit rescalings `u · a mod r`,
/// computed on the faithful presentation.
pub fn canonical_form(q: &CyclicQuotient) -> CyclicQuotient {
    let f = q.faithful();
    let r = f.r;
    let mut best: Option<Vec<u64>> = None;
    let mut w = vec![0u64; f.weights.len()];
    for u in (1..r.max(2)).filter(|u| u.gcd(&r) == 1) {
        for (x, &a) in w.iter_mut().zip(&f.weights) {
            *x = mul_mod(u, a, r);
        }
        w.sort_unstable();
        if best.as_ref().is_none_or(|b| w < *b) {
            best = Some(w.clone());
        }
    }
    CyclicQuotient {
        r,
        weights: best.unwrap_or(w),
    }
}

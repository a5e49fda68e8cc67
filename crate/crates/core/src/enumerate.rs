//! Enumeration and classification of cyclic quotient singularities `1/r(a_1, ..., a_n)`.
//!
//! The index `r` is the order of the group: only faithful weight vectors (`gcd(r, a) = 1`) are
//! listed, so each cyclic subgroup of order `r` appears once per generator choice, or once in
//! total when listed up to equivalence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::rational::{format_rational, rat_u128, serde_p_q};
use crate::lattice::Rational;
use crate::series::{belongs, belongs_prime_cyclic, series_dimension, SeriesDatabase};
use crate::singularity::{canonical_form, cyclic_scan, from_cyclic, meets_threshold, mld_cyclic, CyclicQuotient};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSet {
    Range { min: u64, max: u64 },
    List(Vec<u64>),
}

impl IndexSet {
    fn indices(&self, primes_only: bool) -> Vec<u64> {
        let mut v: Vec<u64> = match self {
            IndexSet::Range { min, max } => (*min.max(&1)..=*max).collect(),
            IndexSet::List(v) => v.iter().copied().filter(|&r| r >= 1).collect(),
        };
        v.sort_unstable();
        v.dedup();
        if primes_only {
            v.retain(|&r| is_prime(r));
        }
        v
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationTask {
    pub ambient_dim: usize,
    pub indices: IndexSet,
    pub primes_only: bool,
    #[serde(with = "serde_p_q")]
    pub eps: Rational,
    /// `mld > eps` when set, `mld >= eps` otherwise.
    pub strict: bool,
    pub up_to_equivalence: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumeratedQuotient {
    pub quotient: CyclicQuotient,
    pub canonical: CyclicQuotient,
    #[serde(with = "serde_p_q")]
    pub mld: Rational,
}

/// Nondecreasing weight vectors in `[0, r)^n`. Every orbit under coordinate permutations has
/// exactly one such representative.
fn sorted_tuples(n: usize, r: u64, mut f: impl FnMut(&[u64])) {
    let mut a = vec![0u64; n];
    loop {
        f(&a);
        let mut j = n;
        while j > 0 && a[j - 1] == r - 1 {
            j -= 1;
        }
        if j == 0 {
            return;
        }
        a[j - 1] += 1;
        let v = a[j - 1];
        for x in &mut a[j..] {
            *x = v;
        }
    }
}

fn all_tuples(n: usize, r: u64, mut f: impl FnMut(&[u64])) {
    let mut a = vec![0u64; n];
    loop {
        f(&a);
        let mut j = n;
        while j > 0 && a[j - 1] == r - 1 {
            a[j - 1] = 0;
            j -= 1;
        }
        if j == 0 {
            return;
        }
        a[j - 1] += 1;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn enumerate_index(task: &EnumerationTask, r: u64) -> Vec<EnumeratedQuotient> {
    let n = task.ambient_dim;
    let mut by_class: BTreeMap<CyclicQuotient, EnumeratedQuotient> = BTreeMap::new();
    let mut plain = Vec::new();
    let visit = |a: &[u64]| {
        if a.iter().fold(r, |g, &x| gcd(g, x)) != 1 {
            return;
        }
        let q = CyclicQuotient::from_reduced(r, a.to_vec());
        let value = match cyclic_scan(&q) {
            Err(_) => return,
            Ok(None) => Rational::from_integer(BigInt::from(n)),
            Ok(Some((sum, _))) => rat_u128(sum, r),
        };
        if !meets_threshold(&value, &task.eps, task.strict) {
            return;
        }
        let canonical = canonical_form(&q);
        let item = EnumeratedQuotient {
            quotient: q,
            canonical: canonical.clone(),
            mld: value,
        };
        if task.up_to_equivalence {
            by_class.entry(canonical).or_insert(item);
        } else {
            plain.push(item);
        }
    };
    if task.up_to_equivalence {
        sorted_tuples(n, r, visit);
        by_class.into_values().collect()
    } else {
        all_tuples(n, r, visit);
        plain
    }
}

/// All faithful `1/r(a)` with `r` in the task's indices satisfying the axis condition and the
/// threshold, ordered by `r` then weights (by canonical form when up to equivalence).
pub fn enumerate_cyclic(task: &EnumerationTask) -> Result<Vec<EnumeratedQuotient>> {
    if task.ambient_dim == 0 {
        return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
    }
    let indices = task.indices(task.primes_only);
    let per_index: Vec<Vec<EnumeratedQuotient>> = indices.par_iter().map(|&r| enumerate_index(task, r)).collect();
    Ok(per_index.into_iter().flatten().collect())
}

impl EnumerationTask {
    fn indices(&self, primes_only: bool) -> Vec<u64> {
        self.indices.indices(primes_only)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classified {
    pub quotient: CyclicQuotient,
    pub canonical: CyclicQuotient,
    #[serde(with = "serde_p_q")]
    pub mld: Rational,
    /// Indices into the database of the series containing the group.
    pub series: Vec<usize>,
    /// Lies in a series of positive dimension.
    pub stable: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IndexTotals {
    pub total: usize,
    pub stable: usize,
    pub sporadic: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub items: Vec<Classified>,
    pub totals: BTreeMap<u64, IndexTotals>,
}

/// Matches each quotient against the database. Groups of prime order are tested through a
/// generator; others are materialized up to `cap` elements.
pub fn classify(points: &[CyclicQuotient], db: &SeriesDatabase, cap: u64) -> Result<ClassificationReport> {
    let items = points
        .par_iter()
        .map(|q| classify_one(q, db, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut totals: BTreeMap<u64, IndexTotals> = BTreeMap::new();
    for it in &items {
        let t = totals.entry(it.quotient.group_order()).or_default();
        t.total += 1;
        if it.stable {
            t.stable += 1;
        } else {
            t.sporadic += 1;
        }
    }
    Ok(ClassificationReport { items, totals })
}

fn classify_one(q: &CyclicQuotient, db: &SeriesDatabase, cap: u64) -> Result<Classified> {
    Error::check_dim(db.ambient_dim, q.ambient_dim())?;
    let mld = mld_cyclic(q)?.value;
    let mut series = Vec::new();
    if is_prime(q.group_order()) {
        let p = q.faithful().generator();
        for (i, s) in db.series.iter().enumerate() {
            if belongs_prime_cyclic(&p, s)? {
                series.push(i);
            }
        }
    } else {
        let g = from_cyclic(q, cap)?;
        for (i, s) in db.series.iter().enumerate() {
            if belongs(&g, s)? {
                series.push(i);
            }
        }
    }
    let stable = series.iter().any(|&i| series_dimension(&db.series[i]) >= 1);
    Ok(Classified {
        quotient: q.clone(),
        canonical: canonical_form(q),
        mld,
        series,
        stable,
    })
}

/// Distinct mld values over all valid cyclic quotients of index `<= r_max`, ascending, with
/// multiplicities.
pub fn mld_spectrum(n: usize, r_max: u64, up_to_equivalence: bool) -> Result<Vec<(Rational, usize)>> {
    let task = EnumerationTask {
        ambient_dim: n,
        indices: IndexSet::Range { min: 1, max: r_max },
        primes_only: false,
        eps: Rational::from_integer(0.into()),
        strict: false,
        up_to_equivalence,
    };
    let mut counts: BTreeMap<Rational, usize> = BTreeMap::new();
    for item in enumerate_cyclic(&task)? {
        *counts.entry(item.mld).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}

/// mld along the family `1/r(weights)` for each `r` in `indices`, skipping indices where the
/// quotient is not faithful or violates the axis condition.
pub fn family_spectrum(weights: &[i64], indices: impl IntoIterator<Item = u64>) -> Result<Vec<(u64, Rational)>> {
    let mut out = Vec::new();
    for r in indices {
        let q = CyclicQuotient::new(r, weights)?;
        if q.content() != 1 {
            continue;
        }
        if let Ok(m) = mld_cyclic(&q) {
            out.push((r, m.value));
        }
    }
    Ok(out)
}

/// Values strictly decreasing in the index.
pub fn strictly_decreasing(family: &[(u64, Rational)]) -> bool {
    family.windows(2).all(|w| w[1].1 < w[0].1)
}

/// `"p/q"` rendering of a spectrum, for reports.
pub fn spectrum_strings(spectrum: &[(Rational, usize)]) -> Vec<(String, usize)> {
    spectrum.iter().map(|(v, c)| (format_rational(v), *c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::{int, rat};
    use crate::singularity::defines_toric_singularity;
    use crate::torus::DEFAULT_CAP;

    fn task(n: usize, min: u64, max: u64, eps: Rational, strict: bool, up: bool) -> EnumerationTask {
        EnumerationTask {
            ambient_dim: n,
            indices: IndexSet::Range { min, max },
            primes_only: false,
            eps,
            strict,
            up_to_equivalence: up,
        }
    }

    #[test]
    fn planar_canonical_list() {
        let found = enumerate_cyclic(&task(2, 2, 7, int(1), false, true)).unwrap();
        let got: Vec<String> = found.iter().map(|e| e.canonical.to_string()).collect();
        let want: Vec<String> = (2..=7).map(|r| format!("1/{r}(1,{})", r - 1)).collect();
        assert_eq!(got, want);
        assert!(enumerate_cyclic(&task(2, 2, 7, int(1), true, true)).unwrap().is_empty());
    }

    #[test]
    fn sorted_tuples_cover_orbits() {
        let mut seen = 0;
        sorted_tuples(3, 4, |a| {
            assert!(a.windows(2).all(|w| w[0] <= w[1]));
            seen += 1;
        });
        // multisets of size 3 from 4 values
        assert_eq!(seen, 20);
        let mut all = 0;
        all_tuples(3, 4, |_| all += 1);
        assert_eq!(all, 64);
    }

    /// Brute force over materialized groups agrees with the direct scan.
    #[test]
    fn enumeration_matches_group_oracle() {
        for r in 1..=9u64 {
            let listed = enumerate_cyclic(&task(3, r, r, int(0), false, false)).unwrap();
            let mut expected = Vec::new();
            all_tuples(3, r, |a| {
                let q = CyclicQuotient::from_reduced(r, a.to_vec());
                if q.content() != 1 {
                    return;
                }
                let g = from_cyclic(&q, DEFAULT_CAP).unwrap();
                if defines_toric_singularity(&g) {
                    expected.push((q, crate::singularity::mld(&g).value));
                }
            });
            let got: Vec<_> = listed.into_iter().map(|e| (e.quotient, e.mld)).collect();
            assert_eq!(got, expected, "r = {r}");
        }
    }

    #[test]
    fn spectra() {
        let s = mld_spectrum(1, 10, true).unwrap();
        assert_eq!(s, vec![(int(1), 1)]);
        let s = mld_spectrum(2, 5, true).unwrap();
        assert!(s.iter().all(|(v, _)| *v > int(0) && *v <= int(2)));
        assert_eq!(s.last().unwrap().0, int(2));
        let fam = family_spectrum(&[1, 1], 1..=5).unwrap();
        assert_eq!(
            fam,
            vec![(1, int(2)), (2, int(1)), (3, rat(2, 3)), (4, rat(1, 2)), (5, rat(2, 5))]
        );
        assert!(strictly_decreasing(&fam));
    }

    #[test]
    fn primes_only_filter() {
        let mut t = task(2, 1, 12, int(0), false, true);
        t.primes_only = true;
        let rs: Vec<u64> = enumerate_cyclic(&t).unwrap().iter().map(|e| e.quotient.r()).collect();
        assert!(rs.iter().all(|&r| is_prime(r)));
        assert!(rs.contains(&11));
    }
}

//! The simplex regions `S_ε = {x_i > 0, Σ x_i < ε}`, their closed-sum variants `S'_ε`, the
//! face regions `S_L`, and exact avoidance tests for finite and closed subgroups.
//!
//! [`maximal_avoiders`] searches for the closed subgroups maximal among those missing a
//! region. Finiteness of that set is known but no effective bound is, so the search runs over
//! character lattices of bounded height and certifies maximality only against enlargements of
//! prime index up to a bound.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::rational::rat_u128;
use crate::lattice::{fm_feasible, Feasibility, IntMatrix, LinearSystem, Rational};
use crate::torus::{face_subgroup, reduce_mod1, CharLattice, FiniteSubgroup, TorusPoint};

/// Climbing steps allowed when a prime-index enlargement of a candidate still avoids.
const MAX_CLIMB: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    ambient_dim: usize,
    eps: Rational,
    strict: bool,
    zero_set: BTreeSet<usize>,
}

impl Region {
    /// `S_ε` when `strict` (sum `< ε`), `S'_ε` otherwise (sum `<= ε`).
    pub fn simplex(n: usize, eps: Rational, strict: bool) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("region needs ambient dimension at least 1".into()));
        }
        Ok(Region {
            ambient_dim: n,
            eps,
            strict,
            zero_set: BTreeSet::new(),
        })
    }

    /// The same region restricted to the face where the coordinates in `zero_set` vanish.
    /// Zero sets accumulate.
    pub fn face_region(&self, zero_set: &BTreeSet<usize>) -> Result<Region> {
        let mut z = self.zero_set.clone();
        z.extend(zero_set.iter().copied());
        if z.iter().any(|&i| i >= self.ambient_dim) || z.len() >= self.ambient_dim {
            return Err(Error::InvalidInput(format!(
                "zero set {z:?} must be a proper subset of 0..{}",
                self.ambient_dim
            )));
        }
        Ok(Region { zero_set: z, ..self.clone() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn zero_set(&self) -> &BTreeSet<usize> {
        &self.zero_set
    }

    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.ambient_dim).filter(|i| !self.zero_set.contains(i)).collect()
    }

    fn sum_ok(&self, sum: &Rational) -> bool {
        if self.strict {
            *sum < self.eps
        } else {
            *sum <= self.eps
        }
    }

    pub fn contains(&self, x: &TorusPoint) -> Result<bool> {
        Error::check_dim(self.ambient_dim, x.ambient_dim())?;
        let coords = x.coords();
        let shape_ok = (0..self.ambient_dim).all(|i| {
            if self.zero_set.contains(&i) {
                coords[i].is_zero()
            } else {
                coords[i].is_positive()
            }
        });
        Ok(shape_ok && self.sum_ok(&x.coord_sum()))
    }

    fn contains_residues(&self, res: &[u64], e: u64) -> bool {
        let shape_ok = res
            .iter()
            .enumerate()
            .all(|(i, &c)| (c == 0) == self.zero_set.contains(&i));
        shape_ok && {
            let sum: u128 = res.iter().map(|&c| c as u128).sum();
            self.sum_ok(&rat_u128(sum, e))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceReport {
    pub avoids: bool,
    pub witness: Option<TorusPoint>,
}

impl AvoidanceReport {
    fn avoids() -> Self {
        AvoidanceReport {
            avoids: true,
            witness: None,
        }
    }

    fn meets(witness: TorusPoint) -> Self {
        AvoidanceReport {
            avoids: false,
            witness: Some(witness),
        }
    }
}

/// Scans the elements in canonical order; the witness is the first element inside the region.
pub fn finite_avoids(g: &FiniteSubgroup, region: &Region) -> Result<AvoidanceReport> {
    Error::check_dim(region.ambient_dim, g.ambient_dim())?;
    Ok(g.residues()
        .find(|x| region.contains_residues(x, g.exponent()))
        .map_or_else(AvoidanceReport::avoids, |x| AvoidanceReport::meets(g.residue_to_point(x))))
}

/// Decides `V ∩ region = ∅` exactly.
///
/// A point `x ∈ [0, 1)^n` lies in `V` iff `Λx = z` for an integer vector `z`; over the unit
/// cube each `z_j` ranges over a finite interval bounded by the signed row sums of `Λ`. Every
/// `z` in that box gives one rational feasibility problem.
pub fn closed_avoids(v: &CharLattice, region: &Region) -> Result<AvoidanceReport> {
    let n = region.ambient_dim;
    Error::check_dim(n, v.ambient_dim())?;
    let free = region.free_coordinates();
    let one = Rational::one();
    let zero = Rational::zero();
    let unit = |i: usize| -> Vec<Rational> { (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect() };

    let mut base = LinearSystem::new(n);
    for i in 0..n {
        if region.zero_set.contains(&i) {
            base.push_eq(unit(i), zero.clone())?;
        } else {
            base.push_ge(unit(i), zero.clone(), true)?;
            base.push_le(unit(i), one.clone(), true)?;
        }
    }
    let sum: Vec<Rational> = (0..n)
        .map(|i| if region.zero_set.contains(&i) { zero.clone() } else { one.clone() })
        .collect();
    base.push_le(sum, region.eps.clone(), region.strict)?;

    let rows = v.basis().rows();
    let ranges: Vec<(BigInt, BigInt)> = rows
        .iter()
        .map(|m| {
            let lo: BigInt = free.iter().filter(|&&i| m[i].is_negative()).map(|&i| m[i].clone()).sum();
            let hi: BigInt = free.iter().filter(|&&i| m[i].is_positive()).map(|&i| m[i].clone()).sum();
            (lo, hi)
        })
        .collect();
    let coeff_rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|m| m.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();

    let mut z: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
    loop {
        let mut sys = base.clone();
        for (row, zj) in coeff_rows.iter().zip(&z) {
            sys.push_eq(row.clone(), Rational::from_integer(zj.clone()))?;
        }
        if let Feasibility::Feasible(x) = fm_feasible(&sys) {
            return Ok(AvoidanceReport::meets(reduce_mod1(x)));
        }
        // odometer
        let mut j = 0;
        while j < z.len() && z[j] == ranges[j].1 {
            z[j] = ranges[j].0.clone();
            j += 1;
        }
        if j == z.len() {
            return Ok(AvoidanceReport::avoids());
        }
        z[j] += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SearchBounds {
    /// Bound on the absolute value of the HNF entries of candidate lattices.
    pub height: u64,
    /// Largest prime index probed when certifying maximality.
    pub prime: u64,
}

impl SearchBounds {
    pub fn new(height: u64, prime: u64) -> Result<Self> {
        if height == 0 || prime == 0 {
            return Err(Error::InvalidInput("height and prime bounds must be at least 1".into()));
        }
        Ok(SearchBounds { height, prime })
    }
}

/// A closed subgroup found to avoid a region, with the bounds it was certified against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Avoider {
    pub lattice: CharLattice,
    pub bounds: SearchBounds,
    /// Every enlargement of prime index `<= bounds.prime` meets the region.
    pub maximal_within_primes: bool,
}

/// All row-style HNF matrices on `m` columns with pivots in `1..=h`, entries above pivots in
/// `[0, pivot)` and remaining entries in `[-h, h]`, in every rank `0..=m`.
pub(crate) fn hnf_candidates(m: usize, h: u64) -> Vec<IntMatrix> {
    let h = h as i64;
    let mut out = Vec::new();
    for k in 0..=m {
        for cols in combinations(m, k) {
            let mut pivots = vec![1i64; k];
            loop {
                // (row, col, lo, hi) for every free entry
                let slots: Vec<(usize, usize, i64, i64)> = (0..k)
                    .flat_map(|i| {
                        let cols = &cols;
                        let pivots = &pivots;
                        (cols[i] + 1..m).map(move |j| match cols.iter().position(|&c| c == j) {
                            Some(l) => (i, j, 0, pivots[l] - 1),
                            None => (i, j, -h, h),
                        })
                    })
                    .collect();
                let mut vals: Vec<i64> = slots.iter().map(|s| s.2).collect();
                loop {
                    let mut rows = vec![vec![0i64; m]; k];
                    for (i, &c) in cols.iter().enumerate() {
                        rows[i][c] = pivots[i];
                    }
                    for (s, &v) in slots.iter().zip(&vals) {
                        rows[s.0][s.1] = v;
                    }
                    out.push(IntMatrix::from_i64(m, rows).expect("rectangular"));
                    if !odometer(&mut vals, |t| (slots[t].2, slots[t].3)) {
                        break;
                    }
                }
                if !odometer(&mut pivots, |_| (1, h)) {
                    break;
                }
            }
        }
    }
    out
}

fn odometer(vals: &mut [i64], range: impl Fn(usize) -> (i64, i64)) -> bool {
    for (t, v) in vals.iter_mut().enumerate() {
        let (lo, hi) = range(t);
        if *v < hi {
            *v += 1;
            return true;
        }
        *v = lo;
    }
    false
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..m {
            cur.push(c);
            rec(c + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn primes_up_to(p: u64) -> Vec<u64> {
    (2..=p).filter(|&q| (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)).collect()
}

/// The closed subgroups `V' ⊋ V` with `[Λ_V : Λ_V'] = p`.
///
/// Index-`p` sublattices of `Z^k` are the kernels of the nonzero functionals `φ` on
/// `(Z/p)^k` up to scaling; normalizing the first nonzero entry of `φ` to 1 enumerates each
/// exactly once.
pub(crate) fn prime_enlargements(v: &CharLattice, p: u64) -> Vec<CharLattice> {
    let basis = v.basis().rows();
    let k = basis.len();
    let n = v.ambient_dim();
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for t in 0..k {
        let mut phi = vec![0i64; k - t - 1];
        loop {
            let mut rows: Vec<Vec<BigInt>> = basis[..t].to_vec();
            rows.push(basis[t].iter().map(|x| x * &pb).collect());
            for (off, &f) in phi.iter().enumerate() {
                let j = t + 1 + off;
                let f = BigInt::from(f);
                rows.push(basis[j].iter().zip(&basis[t]).map(|(a, b)| a - &f * b).collect());
            }
            out.push(CharLattice::new(&IntMatrix::new(n, rows).expect("rectangular")));
            if !odometer(&mut phi, |_| (0, p as i64 - 1)) {
                break;
            }
        }
    }
    out
}

/// First prime-index enlargement inside `ambient` that still avoids `region`.
fn avoiding_enlargement(
    v: &CharLattice,
    ambient: &CharLattice,
    region: &Region,
    primes: &[u64],
) -> Result<Option<CharLattice>> {
    for &p in primes {
        for w in prime_enlargements(v, p) {
            if ambient.contains_closed(&w)? && closed_avoids(&w, region)?.avoids {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn antichain(mut items: Vec<CharLattice>) -> Result<Vec<CharLattice>> {
    items.sort();
    items.dedup();
    let mut keep = Vec::new();
    for (i, c) in items.iter().enumerate() {
        let mut dominated = false;
        for (j, d) in items.iter().enumerate() {
            if i != j && d.contains_closed(c)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            keep.push(c.clone());
        }
    }
    Ok(keep)
}

/// Output order: dimension descending, then canonical HNF.
pub(crate) fn sort_by_dim_then_form(items: &mut [CharLattice]) {
    items.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
}

/// Maximal closed subgroups of `T^n` avoiding `S_ε` (`strict`) or `S'_ε`, within bounds.
pub fn maximal_avoiders(n: usize, eps: Rational, strict: bool, bounds: SearchBounds) -> Result<Vec<Avoider>> {
    let region = Region::simplex(n, eps, strict)?;
    maximal_avoiders_within(&CharLattice::whole_torus(n), &region, bounds)
}

/// Maximal closed subgroups of `ambient ∩ L` avoiding `region`, where `L` is the face cut out
/// by the region's zero set.
///
/// Candidates are the bounded-height HNF lattices on the face coordinates, lifted into the
/// face and intersected with `ambient`. Avoiders are reduced to an antichain; a survivor with
/// an avoiding prime-index enlargement is replaced by that enlargement until none remains.
pub fn maximal_avoiders_within(ambient: &CharLattice, region: &Region, bounds: SearchBounds) -> Result<Vec<Avoider>> {
    let n = region.ambient_dim;
    Error::check_dim(n, ambient.ambient_dim())?;
    let ambient = ambient.intersect(&face_subgroup(n, &region.zero_set)?)?;
    let free = region.free_coordinates();

    let mut candidates = BTreeSet::new();
    for m in hnf_candidates(free.len(), bounds.height) {
        candidates.insert(CharLattice::new(&m).embed(&free, n)?.intersect(&ambient)?);
    }
    let candidates: Vec<CharLattice> = candidates.into_iter().collect();
    log::debug!("{} candidate lattices for {:?}", candidates.len(), region);

    let avoiding: Vec<CharLattice> = candidates
        .par_iter()
        .map(|c| Ok(closed_avoids(c, region)?.avoids.then(|| c.clone())))
        .collect::<Result<Vec<Option<CharLattice>>>>()?
        .into_iter()
        .flatten()
        .collect();
    let survivors = antichain(avoiding)?;

    let primes = primes_up_to(bounds.prime);
    let climbed: Vec<(CharLattice, bool)> = survivors
        .par_iter()
        .map(|c| {
            let mut cur = c.clone();
            for _ in 0..MAX_CLIMB {
                match avoiding_enlargement(&cur, &ambient, region, &primes)? {
                    Some(bigger) => cur = bigger,
                    None => return Ok((cur, true)),
                }
            }
            log::warn!("climb limit reached from {c}");
            Ok((cur, false))
        })
        .collect::<Result<_>>()?;

    let mut lattices = antichain(climbed.iter().map(|(c, _)| c.clone()).collect())?;
    sort_by_dim_then_form(&mut lattices);
    Ok(lattices
        .into_iter()
        .map(|lattice| {
            let maximal_within_primes = climbed.iter().any(|(c, ok)| *ok && *c == lattice);
            Avoider {
                lattice,
                bounds,
                maximal_within_primes,
            }
        })
        .collect())
}

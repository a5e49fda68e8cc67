//! Points, finite subgroups and closed subgroups of `T^n = R^n / Z^n`.
//!
//! Points are normalized to the half-open cube `[0, 1)^n`. A closed subgroup is stored
//! through its character lattice `Λ ⊆ Z^n`: the subgroup is `V_Λ = {x : ⟨m, x⟩ ∈ Z ∀ m ∈ Λ}`.
//! Containment of subgroups reverses containment of lattices and intersection of subgroups is
//! the sum of lattices.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::matrix::reduces_to_zero;
use crate::lattice::rational::{format_rational, frac, lcm_all, parse_rational, rat_u64};
use crate::lattice::{hnf, saturation_data, snf, IntMatrix, Rational};

/// Largest group materialized unless the caller configures otherwise.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    coords: Vec<Rational>,
}

/// Each coordinate replaced by its fractional part.
pub fn reduce_mod1(v: impl IntoIterator<Item = Rational>) -> TorusPoint {
    TorusPoint {
        coords: v.into_iter().map(|x| frac(&x)).collect(),
    }
}

impl TorusPoint {
    /// Coordinates already in `[0, 1)`.
    pub(crate) fn from_reduced(coords: Vec<Rational>) -> Self {
        debug_assert!(coords.iter().all(|c| !c.is_negative() && *c < Rational::one()));
        TorusPoint { coords }
    }

    pub fn zero(n: usize) -> Self {
        TorusPoint {
            coords: vec![Rational::zero(); n],
        }
    }

    /// `(a_1/d, …, a_n/d)` reduced mod 1.
    pub fn from_numerators(numerators: &[i64], denominator: i64) -> Self {
        reduce_mod1(
            numerators
                .iter()
                .map(|&a| Rational::new(BigInt::from(a), BigInt::from(denominator))),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn coord_sum(&self) -> Rational {
        self.coords.iter().fold(Rational::zero(), |a, x| a + x)
    }

    /// Order in `T^n`: the least common multiple of the coordinate denominators.
    pub fn order(&self) -> BigInt {
        lcm_all(self.coords.iter().map(|x| x.denom()))
    }

    pub fn scale(&self, k: &BigInt) -> TorusPoint {
        let k = Rational::from_integer(k.clone());
        reduce_mod1(self.coords.iter().map(|x| x * &k))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn parse<S: AsRef<str>>(field: &str, items: &[S]) -> Result<Self> {
        let coords = items
            .iter()
            .map(|s| parse_rational(field, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(reduce_mod1(coords))
    }
}

impl Add for &TorusPoint {
    type Output = TorusPoint;
    fn add(self, rhs: &TorusPoint) -> TorusPoint {
        reduce_mod1(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b))
    }
}

impl Neg for &TorusPoint {
    type Output = TorusPoint;
    fn neg(self) -> TorusPoint {
        reduce_mod1(self.coords.iter().map(|a| -a))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        TorusPoint::parse("point", &items).map_err(serde::de::Error::custom)
    }
}

/// A finite subgroup of `T^n`, fully materialized.
///
/// Elements are stored as residue vectors modulo the group exponent `e`, so the element
/// `(r_1, …, r_n)` is the point `(r_1/e, …, r_n/e)`. The element list is sorted
/// lexicographically, which is also the lexicographic order of the points.
#[derive(Clone, Debug)]
pub struct FiniteSubgroup {
    ambient_dim: usize,
    /// Generator residues, flattened.
    generators: Vec<u64>,
    exponent: u64,
    order: usize,
    residues: Vec<u64>,
}

impl PartialEq for FiniteSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.exponent == other.exponent
            && self.residues == other.residues
    }
}

impl Eq for FiniteSubgroup {}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn sort_flat(flat: &[u64], n: usize) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..flat.len() / n).collect();
    idx.sort_unstable_by(|&a, &b| flat[a * n..a * n + n].cmp(&flat[b * n..b * n + n]));
    let mut out = Vec::with_capacity(flat.len());
    for i in idx {
        out.extend_from_slice(&flat[i * n..i * n + n]);
    }
    out
}

fn search_flat(flat: &[u64], n: usize, target: &[u64]) -> Option<usize> {
    let (mut lo, mut hi) = (0, flat.len() / n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * n..mid * n + n].cmp(target) {
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => hi = mid,
            Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// The subgroup generated by `gens`.
///
/// The closure is built one generator at a time: with `H` the group generated so far and
/// `m` the least positive multiple of `g` landing in `H`, the extended group is the disjoint
/// union of the cosets `H + k·g`, `0 ≤ k < m`. Fails with [`Error::CapExceeded`] as soon as
/// the order would pass `cap`.
pub fn span_elements(ambient_dim: usize, gens: &[TorusPoint], cap: u64) -> Result<FiniteSubgroup> {
    let n = ambient_dim;
    if n == 0 {
        return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
    }
    for g in gens {
        Error::check_dim(n, g.ambient_dim())?;
    }
    let exponent = lcm_all(gens.iter().map(|g| g.order()).collect::<Vec<_>>().iter());
    let too_big = |order: BigInt| Error::CapExceeded { order, cap };
    let e = match exponent.to_u64() {
        Some(e) if e <= cap => e,
        _ => return Err(too_big(exponent)),
    };
    let e_big = BigInt::from(e);
    let mut flat_gens = Vec::with_capacity(gens.len() * n);
    for g in gens {
        for x in &g.coords {
            flat_gens.push((x.numer() * (&e_big / x.denom())).to_u64().expect("residue below exponent"));
        }
    }
    span_residues(n, e, flat_gens, cap)
}

/// [`span_elements`] for generators already given as residues modulo `e`.
pub(crate) fn span_residues(n: usize, e: u64, gens: Vec<u64>, cap: u64) -> Result<FiniteSubgroup> {
    let too_big = |order: BigInt| Error::CapExceeded { order, cap };
    if e > cap {
        return Err(too_big(BigInt::from(e)));
    }
    let mut flat = vec![0u64; n];
    let mut order = 1usize;
    let mut step = vec![0u64; n];
    for g in gens.chunks_exact(n) {
        step.copy_from_slice(g);
        let mut m = 1u64;
        while search_flat(&flat, n, &step).is_none() {
            for (s, x) in step.iter_mut().zip(g) {
                *s = add_mod(*s, *x, e);
            }
            m += 1;
        }
        if m == 1 {
            continue;
        }
        let new_order = (order as u128) * (m as u128);
        if new_order > cap as u128 {
            return Err(too_big(BigInt::from(new_order)));
        }
        let mut next = Vec::with_capacity(new_order as usize * n);
        next.extend_from_slice(&flat);
        let mut shift = g.to_vec();
        for _ in 1..m {
            for h in flat.chunks_exact(n) {
                next.extend(h.iter().zip(&shift).map(|(a, b)| add_mod(*a, *b, e)));
            }
            for (s, x) in shift.iter_mut().zip(g) {
                *s = add_mod(*s, *x, e);
            }
        }
        order = new_order as usize;
        flat = sort_flat(&next, n);
    }
    Ok(FiniteSubgroup {
        ambient_dim: n,
        generators: gens,
        exponent: e,
        order,
        residues: flat,
    })
}

impl FiniteSubgroup {
    pub fn trivial(n: usize) -> Result<Self> {
        span_elements(n, &[], 1)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> Vec<TorusPoint> {
        self.generator_residues().map(|g| self.residue_to_point(g)).collect()
    }

    /// Generator residues modulo [`FiniteSubgroup::exponent`].
    pub fn generator_residues(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.generators.chunks_exact(self.ambient_dim)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the element orders; every residue is taken modulo it.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Residue vectors in lexicographic order, starting with the origin.
    pub fn residues(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.residues.chunks_exact(self.ambient_dim)
    }

    pub fn residue_to_point(&self, res: &[u64]) -> TorusPoint {
        TorusPoint {
            coords: res.iter().map(|&r| rat_u64(r, self.exponent)).collect(),
        }
    }

    pub fn element(&self, i: usize) -> TorusPoint {
        let n = self.ambient_dim;
        self.residue_to_point(&self.residues[i * n..i * n + n])
    }

    pub fn points(&self) -> Vec<TorusPoint> {
        (0..self.order).map(|i| self.element(i)).collect()
    }

    pub fn contains(&self, x: &TorusPoint) -> bool {
        if x.ambient_dim() != self.ambient_dim {
            return false;
        }
        let e = BigInt::from(self.exponent);
        let mut res = Vec::with_capacity(self.ambient_dim);
        for c in x.coords() {
            if !(&e % c.denom()).is_zero() {
                return false;
            }
            match (c.numer() * (&e / c.denom())).to_u64() {
                Some(r) => res.push(r),
                None => return false,
            }
        }
        search_flat(&self.residues, self.ambient_dim, &res).is_some()
    }

    pub fn is_subgroup_of(&self, other: &FiniteSubgroup) -> bool {
        if self.ambient_dim != other.ambient_dim {
            return false;
        }
        let (e, f) = (self.exponent as u128, other.exponent as u128);
        let mut y = vec![0u64; self.ambient_dim];
        self.generator_residues().all(|g| {
            // g / e = y / f
            for (yi, &x) in y.iter_mut().zip(g) {
                let num = x as u128 * f;
                if !num.is_multiple_of(e) {
                    return false;
                }
                *yi = (num / e) as u64;
            }
            search_flat(&other.residues, other.ambient_dim, &y).is_some()
        })
    }
}

/// A closed subgroup of `T^n`, stored as its character lattice in canonical HNF.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharLattice {
    basis: IntMatrix,
}

impl CharLattice {
    pub fn new(generators: &IntMatrix) -> Self {
        CharLattice {
            basis: hnf(generators),
        }
    }

    pub fn from_rows<R: AsRef<[i64]>>(ambient_dim: usize, rows: impl IntoIterator<Item = R>) -> Result<Self> {
        Ok(CharLattice::new(&IntMatrix::from_i64(ambient_dim, rows)?))
    }

    /// `Λ = {0}`: all of `T^n`.
    pub fn whole_torus(n: usize) -> Self {
        CharLattice {
            basis: IntMatrix::empty(n),
        }
    }

    /// `Λ = Z^n`: the subgroup `{0}`.
    pub fn trivial(n: usize) -> Self {
        CharLattice {
            basis: IntMatrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_whole_torus(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_trivial(&self) -> bool {
        *self == CharLattice::trivial(self.ambient_dim())
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == self.ambient_dim()
    }

    /// `⟨m, x⟩ ∈ Z` for every basis row `m`.
    pub fn contains_point(&self, x: &TorusPoint) -> Result<bool> {
        Error::check_dim(self.ambient_dim(), x.ambient_dim())?;
        Ok(self.basis.rows().iter().all(|m| {
            m.iter()
                .zip(x.coords())
                .fold(Rational::zero(), |acc, (a, c)| acc + c * a)
                .is_integer()
        }))
    }

    /// Membership of the point `res / e`.
    pub fn contains_residues(&self, res: &[u64], e: u64) -> bool {
        let e = BigInt::from(e);
        self.basis.rows().iter().all(|m| {
            let s: BigInt = m.iter().zip(res).map(|(a, &r)| a * BigInt::from(r)).sum();
            s.is_multiple_of(&e)
        })
    }

    /// Generator check suffices since the membership condition defines a subgroup.
    pub fn contains_finite(&self, g: &FiniteSubgroup) -> Result<bool> {
        Error::check_dim(self.ambient_dim(), g.ambient_dim())?;
        Ok(g.generator_residues().all(|x| self.contains_residues(x, g.exponent())))
    }

    /// `inner ⊆ self`, i.e. `Λ_self ⊆ Λ_inner`.
    pub fn contains_closed(&self, inner: &CharLattice) -> Result<bool> {
        Error::check_dim(self.ambient_dim(), inner.ambient_dim())?;
        // inner.basis is already canonical, so rows reduce against it directly
        Ok(self.basis.rows().iter().all(|m| reduces_to_zero(&inner.basis, m)))
    }

    /// Strict containment `inner ⊊ self`.
    pub fn properly_contains(&self, inner: &CharLattice) -> Result<bool> {
        Ok(self != inner && self.contains_closed(inner)?)
    }

    pub fn intersect(&self, other: &CharLattice) -> Result<CharLattice> {
        Ok(CharLattice::new(&self.basis.stack(&other.basis)?))
    }

    /// `(dim, number of connected components)`.
    pub fn dim_components(&self) -> (usize, BigInt) {
        let (rank, torsion) = saturation_data(&self.basis);
        (self.ambient_dim() - rank, torsion)
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.rank()
    }

    pub fn hilbert_poly(&self) -> HilbertPolynomial {
        let (d, r) = self.dim_components();
        HilbertPolynomial::monomial(r, d)
    }

    pub fn contains_unit_vector(&self, i: usize) -> bool {
        let mut e = vec![BigInt::zero(); self.ambient_dim()];
        e[i] = BigInt::one();
        reduces_to_zero(&self.basis, &e)
    }

    /// Coordinates vanishing identically on the subgroup: `{i : e_i ∈ Λ}`.
    pub fn zero_coordinates(&self) -> BTreeSet<usize> {
        (0..self.ambient_dim()).filter(|&i| self.contains_unit_vector(i)).collect()
    }

    /// All points of a finite subgroup, read off the Smith form of `Λ`: with
    /// `left · Λ · right = diag(d)`, the subgroup is generated by the columns of `right`
    /// divided by the invariant factors.
    pub fn finite_points(&self, cap: u64) -> Result<FiniteSubgroup> {
        let n = self.ambient_dim();
        if !self.is_finite() {
            return Err(Error::InvalidInput(format!(
                "closed subgroup has dimension {}, not a finite group",
                self.dim()
            )));
        }
        let s = snf(&self.basis);
        let gens: Vec<TorusPoint> = s
            .diagonal
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_one())
            .map(|(i, d)| {
                reduce_mod1((0..n).map(|row| Rational::new(s.right.entry(row, i).clone(), d.clone())))
            })
            .collect();
        span_elements(n, &gens, cap)
    }

    /// Lifts a lattice on the coordinate sub-torus `T^coords` into `T^n`, inside the face
    /// where every other coordinate vanishes.
    pub fn embed(&self, coords: &[usize], n: usize) -> Result<CharLattice> {
        Error::check_dim(self.ambient_dim(), coords.len())?;
        let mut rows: Vec<Vec<BigInt>> = self
            .basis
            .rows()
            .iter()
            .map(|r| {
                let mut full = vec![BigInt::zero(); n];
                for (x, &c) in r.iter().zip(coords) {
                    full[c] = x.clone();
                }
                full
            })
            .collect();
        for i in (0..n).filter(|i| !coords.contains(i)) {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            rows.push(e);
        }
        Ok(CharLattice::new(&IntMatrix::new(n, rows)?))
    }

    pub fn to_wire(&self) -> Result<Vec<Vec<i128>>> {
        self.basis
            .to_i128_rows()
            .ok_or_else(|| Error::InvalidInput("lattice entry exceeds the 128-bit wire range".into()))
    }

    pub fn from_wire(ambient_dim: usize, rows: &[Vec<i128>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Ok(CharLattice::new(&IntMatrix::new(ambient_dim, rows)?))
    }
}

impl fmt::Display for CharLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis)
    }
}

/// The coordinate face `{x : x_i = 0 for i ∈ zero_set}` (0-based indices).
pub fn face_subgroup(n: usize, zero_set: &BTreeSet<usize>) -> Result<CharLattice> {
    if let Some(&bad) = zero_set.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!("coordinate index {bad} outside 0..{n}")));
    }
    let rows: Vec<Vec<i64>> = zero_set
        .iter()
        .map(|&i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    CharLattice::from_rows(n, rows)
}

/// The circle `(R/Z)·e_i`.
pub fn axis_subgroup(n: usize, i: usize) -> Result<CharLattice> {
    face_subgroup(n, &(0..n).filter(|&j| j != i).collect())
}

/// Integer polynomial `Σ c_k x^k`; coefficients indexed by degree, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HilbertPolynomial {
    coeffs: Vec<BigInt>,
}

impl HilbertPolynomial {
    pub fn zero() -> Self {
        HilbertPolynomial::default()
    }

    /// `r · x^d`.
    pub fn monomial(r: BigInt, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = r;
        HilbertPolynomial::from_coefficients(coeffs)
    }

    pub fn from_coefficients(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        HilbertPolynomial { coeffs }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

impl Add for &HilbertPolynomial {
    type Output = HilbertPolynomial;
    fn add(self, rhs: &HilbertPolynomial) -> HilbertPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        HilbertPolynomial::from_coefficients(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for &HilbertPolynomial {
    type Output = HilbertPolynomial;
    fn sub(self, rhs: &HilbertPolynomial) -> HilbertPolynomial {
        let neg = HilbertPolynomial {
            coeffs: rhs.coeffs.iter().map(|c| -c).collect(),
        };
        self + &neg
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (d, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match d {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{d}")?,
            }
        }
        Ok(())
    }
}

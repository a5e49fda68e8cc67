//! Series of closed subgroups cutting out classes of toric singularities.
//!
//! A series is a closed subgroup `V` of `T^n` with constraints `(V_i, {V_ij})`, where each
//! `V_i ⊊ V` and each `V_ij ⊊ V_i` are closed. A finite subgroup `G` belongs to the series
//! when `G ⊆ V` and, for every constraint, `G ∩ V_i` is covered by the excluders `V_ij`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::rational::{format_rational, parse_rational};
use crate::lattice::Rational;
use crate::region::{closed_avoids, maximal_avoiders_within, Region, SearchBounds};
use crate::torus::{axis_subgroup, face_subgroup, CharLattice, FiniteSubgroup, HilbertPolynomial, TorusPoint};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    /// `V_i`
    pub subgroup: CharLattice,
    /// `V_ij`
    pub excluders: Vec<CharLattice>,
}

impl Constraint {
    fn excludes_residues(&self, res: &[u64], e: u64) -> bool {
        self.excluders.iter().any(|w| w.contains_residues(res, e))
    }

    fn embed(&self, coords: &[usize], n: usize) -> Result<Constraint> {
        Ok(Constraint {
            subgroup: self.subgroup.embed(coords, n)?,
            excluders: self
                .excluders
                .iter()
                .map(|w| w.embed(coords, n))
                .collect::<Result<_>>()?,
        })
    }
}

/// Bounds under which the avoiders of a synthesized series were searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Certification {
    pub height: u64,
    pub prime: u64,
    pub maximal_within_primes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    pub v: CharLattice,
    pub constraints: Vec<Constraint>,
    pub certification: Option<Certification>,
}

impl Series {
    pub fn new(v: CharLattice, constraints: Vec<Constraint>) -> Self {
        Series {
            v,
            constraints,
            certification: None,
        }
    }

    /// The series `V = {0}` with no constraints.
    pub fn trivial(n: usize) -> Self {
        Series::new(CharLattice::trivial(n), Vec::new())
    }

    pub fn ambient_dim(&self) -> usize {
        self.v.ambient_dim()
    }

    fn embed(&self, coords: &[usize], n: usize) -> Result<Series> {
        Ok(Series {
            v: self.v.embed(coords, n)?,
            constraints: self
                .constraints
                .iter()
                .map(|c| c.embed(coords, n))
                .collect::<Result<_>>()?,
            certification: self.certification,
        })
    }

    fn sort_key(&self) -> (Reverse<usize>, &CharLattice, &[Constraint]) {
        (Reverse(self.v.dim()), &self.v, &self.constraints)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch { expected: usize, found: usize },
    SubgroupNotProper { constraint: usize },
    ExcluderNotProper { constraint: usize, excluder: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { expected, found } => {
                write!(f, "ambient dimension {found} differs from {expected}")
            }
            Violation::SubgroupNotProper { constraint } => {
                write!(f, "V_{} not proper in V", constraint + 1)
            }
            Violation::ExcluderNotProper { constraint, excluder } => {
                write!(f, "V_{0}{1} not proper in V_{0}", constraint + 1, excluder + 1)
            }
        }
    }
}

/// Well-formedness: every `V_i ⊊ V` and every `V_ij ⊊ V_i`, all in one ambient torus.
pub fn validate(s: &Series) -> std::result::Result<(), Vec<Violation>> {
    let n = s.ambient_dim();
    let mut out = Vec::new();
    for (i, c) in s.constraints.iter().enumerate() {
        let dim = c.subgroup.ambient_dim();
        if dim != n {
            out.push(Violation::DimensionMismatch { expected: n, found: dim });
            continue;
        }
        if !s.v.properly_contains(&c.subgroup).unwrap_or(false) {
            out.push(Violation::SubgroupNotProper { constraint: i });
        }
        for (j, w) in c.excluders.iter().enumerate() {
            if w.ambient_dim() != n {
                out.push(Violation::DimensionMismatch {
                    expected: n,
                    found: w.ambient_dim(),
                });
            } else if !c.subgroup.properly_contains(w).unwrap_or(false) {
                out.push(Violation::ExcluderNotProper { constraint: i, excluder: j });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Readings of the covering condition on `G ∩ V_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipSemantics {
    /// Every element of `G ∩ V_i` lies in some `V_ij`.
    #[default]
    Union,
    /// `G ∩ V_i` lies in a single `V_ij`.
    SingleContainer,
    /// `G ∩ V_i` lies in every `V_ij`.
    Intersection,
}

impl MembershipSemantics {
    pub const ALL: [MembershipSemantics; 3] = [
        MembershipSemantics::Union,
        MembershipSemantics::SingleContainer,
        MembershipSemantics::Intersection,
    ];
}

/// `G ∈ S` under the default union semantics.
pub fn belongs(g: &FiniteSubgroup, s: &Series) -> Result<bool> {
    belongs_with(g, s, MembershipSemantics::Union)
}

/// `G ∈ S` under the given semantics. An empty excluder list rejects every `G`, since
/// `0 ∈ G ∩ V_i` always.
pub fn belongs_with(g: &FiniteSubgroup, s: &Series, semantics: MembershipSemantics) -> Result<bool> {
    Error::check_dim(s.ambient_dim(), g.ambient_dim())?;
    if !s.v.contains_finite(g)? {
        return Ok(false);
    }
    let e = g.exponent();
    for c in &s.constraints {
        let inside: Vec<&[u64]> = g.residues().filter(|x| c.subgroup.contains_residues(x, e)).collect();
        let covered = match semantics {
            MembershipSemantics::Union => inside.iter().all(|x| c.excludes_residues(x, e)),
            MembershipSemantics::SingleContainer => c
                .excluders
                .iter()
                .any(|w| inside.iter().all(|x| w.contains_residues(x, e))),
            MembershipSemantics::Intersection => {
                !c.excluders.is_empty()
                    && c.excluders.iter().all(|w| inside.iter().all(|x| w.contains_residues(x, e)))
            }
        };
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership under each semantics, for spotting inputs where the readings disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SemanticsReport {
    pub union: bool,
    pub single_container: bool,
    pub intersection: bool,
}

impl SemanticsReport {
    pub fn disagree(&self) -> bool {
        !(self.union == self.single_container && self.union == self.intersection)
    }
}

pub fn compare_semantics(g: &FiniteSubgroup, s: &Series) -> Result<SemanticsReport> {
    Ok(SemanticsReport {
        union: belongs_with(g, s, MembershipSemantics::Union)?,
        single_container: belongs_with(g, s, MembershipSemantics::SingleContainer)?,
        intersection: belongs_with(g, s, MembershipSemantics::Intersection)?,
    })
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Membership of `⟨P⟩` for `P` of prime order. Every nonzero element generates the group, so
/// the covering condition reduces to a check on `P` alone and nothing is materialized.
pub fn belongs_prime_cyclic(p: &TorusPoint, s: &Series) -> Result<bool> {
    Error::check_dim(s.ambient_dim(), p.ambient_dim())?;
    let order = p.order();
    if !order.to_u64().is_some_and(is_prime) {
        return Err(Error::NotPrimeOrder(order));
    }
    if !s.v.contains_point(p)? {
        return Ok(false);
    }
    for c in &s.constraints {
        if c.subgroup.contains_point(p)? {
            let mut excluded = false;
            for w in &c.excluders {
                if w.contains_point(p)? {
                    excluded = true;
                    break;
                }
            }
            if !excluded {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn series_dimension(s: &Series) -> usize {
    s.v.dim()
}

/// Lies in a series of positive dimension.
pub fn is_stable(p: &TorusPoint, db: &SeriesDatabase) -> Result<bool> {
    for s in db.series.iter().filter(|s| series_dimension(s) >= 1) {
        if belongs_prime_cyclic(p, s)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Hilbert polynomial of the constructible set `C = V \ ⋃_i (V_i \ ⋃_j V_ij)`.
///
/// The subgroups `V, V_i, V_ij` are closed under intersection; every point of `V` then has a
/// smallest member `W` of that family containing it, and membership in each `V_i` or `V_ij`
/// depends only on `W`. The polynomial of the locally closed piece `W°` of points with
/// smallest member `W` is `P(W) − Σ_{W' ⊊ W} P(W'°)`, and `P(C)` sums the pieces inside `C`.
pub fn hilbert_polynomial(s: &Series) -> Result<HilbertPolynomial> {
    if let Err(v) = validate(s) {
        return Err(Error::InvalidInput(format!("malformed series: {}", v[0])));
    }
    let mut family: BTreeSet<CharLattice> = BTreeSet::new();
    family.insert(s.v.clone());
    for c in &s.constraints {
        family.insert(c.subgroup.clone());
        family.extend(c.excluders.iter().cloned());
    }
    loop {
        let members: Vec<CharLattice> = family.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                grew |= family.insert(a.intersect(b)?);
            }
        }
        if !grew {
            break;
        }
    }

    // subgroups precede their proper supergroups under (dim, components)
    let mut members: Vec<(CharLattice, (usize, BigInt))> = family
        .into_iter()
        .map(|w| {
            let dc = w.dim_components();
            (w, dc)
        })
        .collect();
    members.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

    let mut open: Vec<HilbertPolynomial> = Vec::with_capacity(members.len());
    let mut total = HilbertPolynomial::zero();
    for (k, (w, _)) in members.iter().enumerate() {
        let mut piece = w.hilbert_poly();
        for (j, (u, _)) in members[..k].iter().enumerate() {
            if w.contains_closed(u)? {
                piece = &piece - &open[j];
            }
        }
        let mut in_c = true;
        for c in &s.constraints {
            if c.subgroup.contains_closed(w)? {
                let mut excluded = false;
                for x in &c.excluders {
                    if x.contains_closed(w)? {
                        excluded = true;
                        break;
                    }
                }
                if !excluded {
                    in_c = false;
                    break;
                }
            }
        }
        if in_c {
            total = &total + &piece;
        }
        open.push(piece);
    }
    Ok(total)
}

/// Series for the region `S_ε` (`region_strict`) or `S'_ε` on `T^n`, built from its maximal
/// avoiders.
///
/// An avoider lying in a coordinate face is handled by recursion on the complementary
/// coordinates. For the others, each nontrivial intersection with a coordinate axis becomes a
/// constraint with excluder `{0}`, and each intersection with a face of dimension `2..n-1`
/// that meets the face region becomes a constraint whose excluders are the maximal avoiders of
/// that face region inside it.
pub fn synthesize_for_region(n: usize, eps: &Rational, region_strict: bool, bounds: SearchBounds) -> Result<Vec<Series>> {
    let mut memo = BTreeMap::new();
    synthesize_rec(n, eps, region_strict, bounds, &mut memo)
}

/// Series whose finite members are the `ε`-log-terminal singularities: `mld > ε` when
/// `strict`, `mld >= ε` otherwise. These are the groups avoiding `S'_ε`, respectively `S_ε`.
pub fn synthesize(n: usize, eps: &Rational, strict: bool, bounds: SearchBounds) -> Result<Vec<Series>> {
    synthesize_for_region(n, eps, !strict, bounds)
}

fn synthesize_rec(
    n: usize,
    eps: &Rational,
    region_strict: bool,
    bounds: SearchBounds,
    memo: &mut BTreeMap<usize, Vec<Series>>,
) -> Result<Vec<Series>> {
    if let Some(done) = memo.get(&n) {
        return Ok(done.clone());
    }
    let region = Region::simplex(n, eps.clone(), region_strict)?;
    let mut out: BTreeMap<(CharLattice, Vec<Constraint>), Option<Certification>> = BTreeMap::new();
    let mut add = |s: Series| {
        let slot = out.entry((s.v, s.constraints)).or_insert(s.certification);
        if let (Some(a), Some(b)) = (slot.as_mut(), s.certification) {
            a.maximal_within_primes &= b.maximal_within_primes;
        }
    };
    if n == 1 {
        // every nonzero point of T^1 lies on the axis
        add(Series::trivial(1));
    } else {
        let avoiders = maximal_avoiders_within(&CharLattice::whole_torus(n), &region, bounds)?;
        for a in avoiders {
            let zeros = a.lattice.zero_coordinates();
            if zeros.is_empty() {
                let mut s = series_for_outer(&a.lattice, eps, region_strict, bounds)?;
                if let Some(c) = s.certification.as_mut() {
                    c.maximal_within_primes &= a.maximal_within_primes;
                }
                add(s);
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|i| !zeros.contains(i)).collect();
            if free.is_empty() {
                add(Series::trivial(n));
                continue;
            }
            for s in synthesize_rec(free.len(), eps, region_strict, bounds, memo)? {
                add(s.embed(&free, n)?);
            }
        }
    }
    let mut series: Vec<Series> = out
        .into_iter()
        .map(|((v, constraints), certification)| Series {
            v,
            constraints,
            certification,
        })
        .collect();
    series.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    memo.insert(n, series.clone());
    Ok(series)
}

/// Constraints for one avoider `V` not contained in a coordinate face.
pub fn series_for_outer(v: &CharLattice, eps: &Rational, region_strict: bool, bounds: SearchBounds) -> Result<Series> {
    let n = v.ambient_dim();
    let region = Region::simplex(n, eps.clone(), region_strict)?;
    let mut constraints = Vec::new();
    let mut certified = true;
    for i in 0..n {
        let vi = v.intersect(&axis_subgroup(n, i)?)?;
        if !vi.is_trivial() && vi != *v {
            constraints.push(Constraint {
                subgroup: vi,
                excluders: vec![CharLattice::trivial(n)],
            });
        }
    }
    for size in 1..n.saturating_sub(1) {
        for zero_set in subsets(n, size) {
            let vi = v.intersect(&face_subgroup(n, &zero_set)?)?;
            if vi.is_trivial() || vi == *v {
                continue;
            }
            let face_region = region.face_region(&zero_set)?;
            if closed_avoids(&vi, &face_region)?.avoids {
                continue;
            }
            let found = maximal_avoiders_within(&vi, &face_region, bounds)?;
            certified &= found.iter().all(|a| a.maximal_within_primes);
            constraints.push(Constraint {
                subgroup: vi,
                excluders: found.into_iter().map(|a| a.lattice).collect(),
            });
        }
    }
    constraints.sort();
    constraints.dedup();
    Ok(Series {
        v: v.clone(),
        constraints,
        certification: Some(Certification {
            height: bounds.height,
            prime: bounds.prime,
            maximal_within_primes: certified,
        }),
    })
}

fn subsets(n: usize, k: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

/// A persisted family of series for one `(n, ε, strict)`, where `strict` refers to the
/// singularity threshold as in [`synthesize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesDatabase {
    pub ambient_dim: usize,
    pub eps: Rational,
    pub strict: bool,
    pub series: Vec<Series>,
    pub provenance: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintWire {
    #[serde(rename = "Vi")]
    vi: Vec<Vec<i128>>,
    #[serde(rename = "Vij")]
    vij: Vec<Vec<Vec<i128>>>,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    #[serde(rename = "V")]
    v: Vec<Vec<i128>>,
    constraints: Vec<ConstraintWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certification: Option<Certification>,
}

#[derive(Serialize, Deserialize)]
struct DatabaseWire {
    ambient_dim: usize,
    eps: String,
    strict: bool,
    series: Vec<SeriesWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl SeriesDatabase {
    pub fn new(ambient_dim: usize, eps: Rational, strict: bool, series: Vec<Series>) -> Self {
        SeriesDatabase {
            ambient_dim,
            eps,
            strict,
            series,
            provenance: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = DatabaseWire {
            ambient_dim: self.ambient_dim,
            eps: format_rational(&self.eps),
            strict: self.strict,
            series: self
                .series
                .iter()
                .map(|s| {
                    Ok(SeriesWire {
                        v: s.v.to_wire()?,
                        constraints: s
                            .constraints
                            .iter()
                            .map(|c| {
                                Ok(ConstraintWire {
                                    vi: c.subgroup.to_wire()?,
                                    vij: c.excluders.iter().map(|w| w.to_wire()).collect::<Result<_>>()?,
                                })
                            })
                            .collect::<Result<_>>()?,
                        certification: s.certification,
                    })
                })
                .collect::<Result<_>>()?,
            provenance: self.provenance.clone(),
        };
        serde_json::to_string_pretty(&wire).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Parses and validates; malformed series are rejected with their violations.
    pub fn from_json(text: &str) -> Result<Self> {
        let db = SeriesDatabase::from_json_unvalidated(text)?;
        if let Some((k, v)) = db.violations().into_iter().next() {
            let msgs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            return Err(Error::parse(format!("series[{k}]"), msgs.join("; ")));
        }
        Ok(db)
    }

    /// Parses without checking the properness conditions.
    pub fn from_json_unvalidated(text: &str) -> Result<Self> {
        let wire: DatabaseWire = serde_json::from_str(text).map_err(|e| Error::parse("series database", e.to_string()))?;
        let n = wire.ambient_dim;
        let series = wire
            .series
            .iter()
            .map(|s| {
                Ok(Series {
                    v: CharLattice::from_wire(n, &s.v)?,
                    constraints: s
                        .constraints
                        .iter()
                        .map(|c| {
                            Ok(Constraint {
                                subgroup: CharLattice::from_wire(n, &c.vi)?,
                                excluders: c
                                    .vij
                                    .iter()
                                    .map(|w| CharLattice::from_wire(n, w))
                                    .collect::<Result<_>>()?,
                            })
                        })
                        .collect::<Result<_>>()?,
                    certification: s.certification,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SeriesDatabase {
            ambient_dim: n,
            eps: parse_rational("eps", &wire.eps)?,
            strict: wire.strict,
            series,
            provenance: wire.provenance,
        })
    }

    /// Violations per series index, omitting well-formed series.
    pub fn violations(&self) -> Vec<(usize, Vec<Violation>)> {
        self.series
            .iter()
            .enumerate()
            .filter_map(|(k, s)| validate(s).err().map(|v| (k, v)))
            .collect()
    }
}

impl Serialize for SeriesDatabase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text = self.to_json().map_err(serde::ser::Error::custom)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(serde::ser::Error::custom)?;
        value.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeriesDatabase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        SeriesDatabase::from_json(&value.to_string()).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::int;
    use crate::singularity::{from_cyclic, mld, CyclicQuotient};
    use crate::torus::{span_elements, DEFAULT_CAP};

    fn lat(n: usize, rows: &[&[i64]]) -> CharLattice {
        CharLattice::from_rows(n, rows.iter().copied()).unwrap()
    }

    fn pt(xs: &[i64], d: i64) -> TorusPoint {
        TorusPoint::from_numerators(xs, d)
    }

    fn antidiag_with_halves() -> Series {
        Series::new(
            lat(2, &[&[1, 1]]),
            vec![Constraint {
                subgroup: lat(2, &[&[1, 1], &[0, 2]]),
                excluders: vec![CharLattice::trivial(2)],
            }],
        )
    }

    #[test]
    fn validation() {
        assert!(validate(&antidiag_with_halves()).is_ok());
        let bad = Series::new(
            lat(2, &[&[1, 1]]),
            vec![Constraint {
                subgroup: lat(2, &[&[1, 1]]),
                excluders: vec![CharLattice::trivial(2)],
            }],
        );
        let v = validate(&bad).unwrap_err();
        assert_eq!(v, vec![Violation::SubgroupNotProper { constraint: 0 }]);
        assert_eq!(v[0].to_string(), "V_1 not proper in V");
    }

    #[test]
    fn membership_examples() {
        let s = antidiag_with_halves();
        let g3 = span_elements(2, &[pt(&[1, 2], 3)], DEFAULT_CAP).unwrap();
        let g2 = span_elements(2, &[pt(&[1, 1], 2)], DEFAULT_CAP).unwrap();
        assert!(belongs(&g3, &s).unwrap());
        assert!(!belongs(&g2, &s).unwrap());
        assert!(belongs_prime_cyclic(&pt(&[1, 2], 3), &s).unwrap());
        assert!(!belongs_prime_cyclic(&pt(&[1, 1], 2), &s).unwrap());
        assert!(matches!(
            belongs_prime_cyclic(&pt(&[1, 3], 4), &s),
            Err(Error::NotPrimeOrder(_))
        ));
    }

    #[test]
    fn semantics_diverge_on_two_excluders() {
        // V = T^2, V_1 = axis circle x2 = 0, excluders the 2- and 3-torsion of that circle
        let s = Series::new(
            CharLattice::whole_torus(2),
            vec![Constraint {
                subgroup: lat(2, &[&[0, 1]]),
                excluders: vec![lat(2, &[&[2, 0], &[0, 1]]), lat(2, &[&[3, 0], &[0, 1]])],
            }],
        );
        assert!(validate(&s).is_ok());
        let g6 = span_elements(2, &[pt(&[1, 0], 2), pt(&[1, 0], 3)], DEFAULT_CAP).unwrap();
        let r = compare_semantics(&g6, &s).unwrap();
        assert_eq!(
            r,
            SemanticsReport {
                union: false,
                single_container: false,
                intersection: false
            }
        );
        // G ∩ V_1 = {0, (1/2, 0)} lies in the 2-torsion excluder only
        let g = span_elements(2, &[pt(&[1, 0], 2), pt(&[1, 1], 3)], DEFAULT_CAP).unwrap();
        let r = compare_semantics(&g, &s).unwrap();
        assert!(r.union && r.single_container && !r.intersection && r.disagree());
    }

    #[test]
    fn union_differs_from_single_container_with_three_excluders() {
        // the Klein group is the union of its three subgroups of order 2 but lies in none
        let s = Series::new(
            CharLattice::whole_torus(2),
            vec![Constraint {
                subgroup: lat(2, &[&[2, 0], &[0, 2]]),
                excluders: vec![
                    lat(2, &[&[1, 0], &[0, 2]]),
                    lat(2, &[&[1, 1], &[0, 2]]),
                    lat(2, &[&[2, 0], &[0, 1]]),
                ],
            }],
        );
        assert!(validate(&s).is_ok());
        let k = lat(2, &[&[2, 0], &[0, 2]]).finite_points(DEFAULT_CAP).unwrap();
        let r = compare_semantics(&k, &s).unwrap();
        assert!(r.union && !r.single_container && !r.intersection);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_polynomial(&antidiag_with_halves()).unwrap().to_string(), "x - 1");
        let plain = Series::new(lat(2, &[&[1, 1]]), vec![]);
        assert_eq!(hilbert_polynomial(&plain).unwrap().to_string(), "x");
        assert_eq!(hilbert_polynomial(&Series::trivial(3)).unwrap().to_string(), "1");
    }

    /// Counts `|C ∩ T[m]|` directly over the `m`-torsion grid.
    fn count_torsion(s: &Series, m: u64) -> i64 {
        let n = s.ambient_dim();
        let mut count = 0;
        let mut x = vec![0u64; n];
        loop {
            let inside = s.v.contains_residues(&x, m)
                && s.constraints.iter().all(|c| {
                    !c.subgroup.contains_residues(&x, m) || c.excluders.iter().any(|w| w.contains_residues(&x, m))
                });
            count += i64::from(inside);
            let mut j = 0;
            while j < n && x[j] == m - 1 {
                x[j] = 0;
                j += 1;
            }
            if j == n {
                return count;
            }
            x[j] += 1;
        }
    }

    #[test]
    fn hilbert_matches_torsion_counts() {
        let series = vec![
            antidiag_with_halves(),
            Series::new(
                CharLattice::whole_torus(2),
                vec![
                    Constraint {
                        subgroup: lat(2, &[&[0, 1]]),
                        excluders: vec![lat(2, &[&[2, 0], &[0, 1]]), lat(2, &[&[3, 0], &[0, 1]])],
                    },
                    Constraint {
                        subgroup: lat(2, &[&[1, 0]]),
                        excluders: vec![CharLattice::trivial(2)],
                    },
                ],
            ),
        ];
        for s in &series {
            let p = hilbert_polynomial(s).unwrap();
            // quasi-polynomial agrees with the polynomial for m divisible by all torsion orders
            for m in [6u64, 12, 18] {
                assert_eq!(p.eval(&BigInt::from(m)), BigInt::from(count_torsion(s, m)), "{s:?} at {m}");
            }
        }
    }

    #[test]
    fn synthesize_plane_unit() {
        let bounds = SearchBounds::new(3, 5).unwrap();
        // mld >= 1: groups avoiding S_1
        let s = synthesize(2, &int(1), false, bounds).unwrap();
        let vs: Vec<&CharLattice> = s.iter().map(|x| &x.v).collect();
        assert_eq!(vs, vec![&lat(2, &[&[1, 1]]), &CharLattice::trivial(2), &lat(2, &[&[2, 0], &[0, 2]])]);
        for x in &s {
            assert!(validate(x).is_ok());
        }
        // mld > 1: only smooth points in dimension 2
        let s = synthesize(2, &int(1), true, bounds).unwrap();
        assert_eq!(s, vec![Series::trivial(2)]);
    }

    #[test]
    fn synthesized_members_meet_threshold() {
        let bounds = SearchBounds::new(3, 5).unwrap();
        let db = synthesize(2, &int(1), false, bounds).unwrap();
        for r in 2..12u64 {
            for a in 1..r {
                let q = CyclicQuotient::new(r, &[1, a as i64]).unwrap();
                let g = from_cyclic(&q, DEFAULT_CAP).unwrap();
                if !crate::singularity::defines_toric_singularity(&g) {
                    continue;
                }
                let m = mld(&g).value;
                let member = db.iter().any(|s| belongs(&g, s).unwrap());
                assert_eq!(member, m >= int(1), "{q}");
            }
        }
    }

    #[test]
    fn database_round_trip() {
        let mut db = SeriesDatabase::new(2, int(1), false, vec![antidiag_with_halves()]);
        db.provenance = Some("unit".into());
        let text = db.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["eps"], "1/1");
        assert_eq!(v["series"][0]["V"], serde_json::json!([[1, 1]]));
        assert_eq!(v["series"][0]["constraints"][0]["Vij"], serde_json::json!([[[1, 0], [0, 1]]]));
        assert_eq!(SeriesDatabase::from_json(&text).unwrap(), db);
        let mut broken = v.clone();
        broken["series"][0]["constraints"][0]["Vi"] = serde_json::json!([[1, 1]]);
        let err = SeriesDatabase::from_json(&broken.to_string()).unwrap_err();
        assert!(err.to_string().contains("V_1 not proper in V"), "{err}");
    }
}

//! Exact feasibility of mixed strict/non-strict rational linear systems by Fourier–Motzkin
//! elimination.
//!
//! Equalities are eliminated first by Gaussian substitution; the remaining inequalities are
//! projected one variable at a time. Strictness propagates through every combination, so the
//! open simplex `{x > 0, Σx < 1}` and its closure are told apart exactly.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// `coeffs · x < rhs` when `strict`, otherwise `coeffs · x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    vars: usize,
    equalities: Vec<Equality>,
    inequalities: Vec<Inequality>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem {
            vars,
            ..Default::default()
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    fn check(&self, coeffs: &[Rational]) -> Result<()> {
        Error::check_dim(self.vars, coeffs.len())
    }

    pub fn push_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        self.check(&coeffs)?;
        self.equalities.push(Equality { coeffs, rhs });
        Ok(())
    }

    pub fn push_le(&mut self, coeffs: Vec<Rational>, rhs: Rational, strict: bool) -> Result<()> {
        self.check(&coeffs)?;
        self.inequalities.push(Inequality { coeffs, rhs, strict });
        Ok(())
    }

    /// `coeffs · x > rhs` (strict) or `>=`.
    pub fn push_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational, strict: bool) -> Result<()> {
        let neg = coeffs.into_iter().map(|c| -c).collect();
        self.push_le(neg, -rhs, strict)
    }

    /// Exact substitution check.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.vars {
            return false;
        }
        let eq_ok = self.equalities.iter().all(|e| dot(&e.coeffs, x) == e.rhs);
        let ineq_ok = self.inequalities.iter().all(|c| {
            let lhs = dot(&c.coeffs, x);
            if c.strict {
                lhs < c.rhs
            } else {
                lhs <= c.rhs
            }
        });
        eq_ok && ineq_ok
    }
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).fold(Rational::zero(), |acc, (c, v)| acc + c * v)
}

/// One Gaussian pivot: `x[var] = rhs - Σ coeffs[j] x[j]` (with `coeffs[var] = 0`).
struct Pivot {
    var: usize,
    coeffs: Vec<Rational>,
    rhs: Rational,
}

/// Tightest constraint per normalized direction.
#[derive(Default)]
struct ConstraintSet {
    by_dir: BTreeMap<Vec<Rational>, (Rational, bool)>,
}

impl ConstraintSet {
    /// Returns `false` if the constraint is a contradiction free of variables.
    fn insert(&mut self, mut c: Inequality) -> bool {
        let Some(lead) = c.coeffs.iter().find(|v| !v.is_zero()).map(|v| v.abs()) else {
            return if c.strict {
                c.rhs.is_positive()
            } else {
                !c.rhs.is_negative()
            };
        };
        if !lead.is_one() {
            for v in c.coeffs.iter_mut() {
                *v /= &lead;
            }
            c.rhs /= &lead;
        }
        match self.by_dir.get_mut(&c.coeffs) {
            Some((rhs, strict)) => {
                if c.rhs < *rhs || (c.rhs == *rhs && c.strict && !*strict) {
                    *rhs = c.rhs;
                    *strict = c.strict;
                }
            }
            None => {
                self.by_dir.insert(c.coeffs, (c.rhs, c.strict));
            }
        }
        true
    }

    fn into_vec(self) -> Vec<Inequality> {
        self.by_dir
            .into_iter()
            .map(|(coeffs, (rhs, strict))| Inequality { coeffs, rhs, strict })
            .collect()
    }
}

/// Decides feasibility exactly and returns a witness satisfying every constraint.
///
/// Deterministic: the elimination order depends only on the system.
pub fn fm_feasible(sys: &LinearSystem) -> Feasibility {
    let n = sys.vars;

    // Gaussian elimination of equalities.
    let mut eqs: Vec<Equality> = sys.equalities.clone();
    let mut ineqs: Vec<Inequality> = sys.inequalities.clone();
    let mut pivots: Vec<Pivot> = Vec::new();
    while let Some(mut e) = (!eqs.is_empty()).then(|| eqs.remove(0)) {
        let Some(var) = e.coeffs.iter().position(|c| !c.is_zero()) else {
            if e.rhs.is_zero() {
                continue;
            }
            return Feasibility::Infeasible;
        };
        let lead = e.coeffs[var].clone();
        for c in e.coeffs.iter_mut() {
            *c /= &lead;
        }
        e.rhs /= &lead;
        let substitute = |coeffs: &mut Vec<Rational>, rhs: &mut Rational| {
            let f = coeffs[var].clone();
            if f.is_zero() {
                return;
            }
            for (c, p) in coeffs.iter_mut().zip(&e.coeffs) {
                *c -= &f * p;
            }
            *rhs -= &f * &e.rhs;
        };
        for other in eqs.iter_mut() {
            substitute(&mut other.coeffs, &mut other.rhs);
        }
        for other in ineqs.iter_mut() {
            substitute(&mut other.coeffs, &mut other.rhs);
        }
        let mut coeffs = e.coeffs;
        coeffs[var] = Rational::zero();
        pivots.push(Pivot {
            var,
            coeffs,
            rhs: e.rhs,
        });
    }

    let mut set = ConstraintSet::default();
    for c in ineqs {
        if !set.insert(c) {
            return Feasibility::Infeasible;
        }
    }
    let mut current = set.into_vec();

    // Projection. Each level stores the constraints that mention the eliminated variable.
    let mut levels: Vec<(usize, Vec<Inequality>)> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).filter(|v| !pivots.iter().any(|p| p.var == *v)).collect();
    while !remaining.is_empty() {
        // Cheapest variable first: fewest generated combinations, ties by index.
        let (pos_idx, var) = remaining
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let pos = current.iter().filter(|c| c.coeffs[v].is_positive()).count();
                let neg = current.iter().filter(|c| c.coeffs[v].is_negative()).count();
                ((pos * neg) as isize - (pos + neg) as isize, i, v)
            })
            .min()
            .map(|(_, i, v)| (i, v))
            .unwrap();
        remaining.remove(pos_idx);

        let (involved, rest): (Vec<_>, Vec<_>) = current.into_iter().partition(|c| !c.coeffs[var].is_zero());
        let mut next = ConstraintSet::default();
        for c in rest {
            next.insert(c);
        }
        let uppers: Vec<&Inequality> = involved.iter().filter(|c| c.coeffs[var].is_positive()).collect();
        let lowers: Vec<&Inequality> = involved.iter().filter(|c| c.coeffs[var].is_negative()).collect();
        for u in &uppers {
            for l in &lowers {
                let su = u.coeffs[var].clone();
                let sl = -l.coeffs[var].clone();
                let coeffs: Vec<Rational> = u
                    .coeffs
                    .iter()
                    .zip(&l.coeffs)
                    .map(|(a, b)| a / &su + b / &sl)
                    .collect();
                let combined = Inequality {
                    coeffs,
                    rhs: &u.rhs / &su + &l.rhs / &sl,
                    strict: u.strict || l.strict,
                };
                if !next.insert(combined) {
                    return Feasibility::Infeasible;
                }
            }
        }
        levels.push((var, involved));
        current = next.into_vec();
    }

    // Back-substitution: midpoint of the admissible interval at each level.
    let mut x = vec![Rational::zero(); n];
    for (var, constraints) in levels.iter().rev() {
        x[*var] = pick_value(*var, constraints, &x);
    }
    for p in pivots.iter().rev() {
        x[p.var] = &p.rhs - dot(&p.coeffs, &x);
    }
    debug_assert!(sys.is_satisfied_by(&x), "Fourier–Motzkin witness failed substitution");
    Feasibility::Feasible(x)
}

fn pick_value(var: usize, constraints: &[Inequality], x: &[Rational]) -> Rational {
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for c in constraints {
        let a = &c.coeffs[var];
        let others = c
            .coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != var)
            .fold(Rational::zero(), |acc, (j, cj)| acc + cj * &x[j]);
        let bound = (&c.rhs - others) / a;
        if a.is_positive() {
            if upper.as_ref().is_none_or(|(u, s)| bound < *u || (bound == *u && c.strict && !s)) {
                upper = Some((bound, c.strict));
            }
        } else if lower.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && c.strict && !s)) {
            lower = Some((bound, c.strict));
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / Rational::from_integer(2.into()),
        (Some((l, _)), None) => l + Rational::one(),
        (None, Some((u, _))) => u - Rational::one(),
        (None, None) => Rational::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn simplex(strict_sum: bool) -> LinearSystem {
        let mut s = LinearSystem::new(2);
        s.push_ge(v(&[1, 0]), int(0), true).unwrap();
        s.push_ge(v(&[0, 1]), int(0), true).unwrap();
        s.push_le(v(&[1, 1]), int(1), strict_sum).unwrap();
        s
    }

    #[test]
    fn open_simplex_is_feasible() {
        let s = simplex(true);
        let f = fm_feasible(&s);
        assert!(s.is_satisfied_by(f.witness().unwrap()));
    }

    #[test]
    fn strict_sum_contradicts_equality() {
        let mut s = simplex(true);
        s.push_eq(v(&[1, 1]), int(1)).unwrap();
        assert_eq!(fm_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn closed_sum_allows_boundary() {
        let mut s = simplex(false);
        s.push_eq(v(&[1, 1]), int(1)).unwrap();
        let f = fm_feasible(&s);
        assert_eq!(f.witness().unwrap(), &[rat(1, 2), rat(1, 2)][..]);
    }

    #[test]
    fn degenerate_systems() {
        assert!(fm_feasible(&LinearSystem::new(0)).is_feasible());
        let mut s = LinearSystem::new(1);
        s.push_eq(v(&[0]), int(1)).unwrap();
        assert_eq!(fm_feasible(&s), Feasibility::Infeasible);
        let mut s = LinearSystem::new(1);
        s.push_le(v(&[1]), int(2), false).unwrap();
        s.push_ge(v(&[1]), int(2), false).unwrap();
        assert_eq!(fm_feasible(&s).witness().unwrap(), &[int(2)][..]);
        let mut s = LinearSystem::new(1);
        s.push_le(v(&[1]), int(2), true).unwrap();
        s.push_ge(v(&[1]), int(2), false).unwrap();
        assert_eq!(fm_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn chained_equalities() {
        // x0 + x1 = 1, x1 - x2 = 0, x2 > 1/3, x0 > 1/4
        let mut s = LinearSystem::new(3);
        s.push_eq(v(&[1, 1, 0]), int(1)).unwrap();
        s.push_eq(v(&[0, 1, -1]), int(0)).unwrap();
        s.push_ge(v(&[0, 0, 1]), rat(1, 3), true).unwrap();
        s.push_ge(v(&[1, 0, 0]), rat(1, 4), true).unwrap();
        let f = fm_feasible(&s);
        assert!(s.is_satisfied_by(f.witness().unwrap()));
        s.push_ge(v(&[1, 0, 0]), rat(2, 3), false).unwrap();
        assert_eq!(fm_feasible(&s), Feasibility::Infeasible);
    }
}

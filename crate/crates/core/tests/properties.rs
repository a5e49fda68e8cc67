use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use toric_series::lattice::rational::rat;
use toric_series::lattice::{fm_feasible, hnf, lattice_contains, LinearSystem};
use toric_series::region::{closed_avoids, finite_avoids};
use toric_series::series::{belongs, Constraint, Series};
use toric_series::singularity::{canonical_form, from_cyclic, mld, mld_cyclic, CyclicQuotient};
use toric_series::torus::span_elements;
use toric_series::{CharLattice, IntMatrix, Region, DEFAULT_CAP};

fn matrix(ncols: usize, max_rows: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, ncols), 0..=max_rows)
        .prop_map(move |rows| IntMatrix::from_i64(ncols, rows).unwrap())
}

/// Full-rank lattices, i.e. finite subgroups, kept small: diagonal in `1..=4` plus noise.
fn finite_lattice(n: usize) -> impl Strategy<Value = CharLattice> {
    (prop::collection::vec(1i64..=4, n), prop::collection::vec(-3i64..=3, n * n)).prop_map(move |(d, noise)| {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { d[i] } else if j > i { noise[i * n + j] } else { 0 }).collect())
            .collect();
        CharLattice::from_rows(n, rows).unwrap()
    })
}

/// Row operations: `(i, j, k)` adds `k` times row `j` to row `i`; `(i, i, _)` negates row `i`.
fn apply_row_ops(m: &IntMatrix, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut rows = m.rows().to_vec();
    if rows.is_empty() {
        return m.clone();
    }
    for &(i, j, k) in ops {
        let (i, j) = (i % rows.len(), j % rows.len());
        if i == j {
            rows[i] = rows[i].iter().map(|x| -x).collect();
        } else {
            let add: Vec<BigInt> = rows[j].iter().map(|x| x * k).collect();
            for (x, y) in rows[i].iter_mut().zip(add) {
                *x += y;
            }
        }
    }
    // swap two rows as well
    let last = rows.len() - 1;
    rows.swap(0, last);
    IntMatrix::new(m.ncols(), rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hnf_is_invariant_under_unimodular_row_operations(
        m in matrix(3, 4, 6),
        ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
    ) {
        prop_assert_eq!(hnf(&m), hnf(&apply_row_ops(&m, &ops)));
    }

    #[test]
    fn mutual_containment_iff_equal_hnf(a in matrix(3, 3, 4), b in matrix(3, 3, 4)) {
        let both = lattice_contains(&a, &b).unwrap() && lattice_contains(&b, &a).unwrap();
        prop_assert_eq!(both, hnf(&a) == hnf(&b));
    }

    #[test]
    fn containment_is_a_partial_order_and_intersection_a_meet(
        a in matrix(3, 3, 3), b in matrix(3, 3, 3), c in matrix(3, 3, 3),
    ) {
        let (a, b, c) = (CharLattice::new(&a), CharLattice::new(&b), CharLattice::new(&c));
        prop_assert!(a.contains_closed(&a).unwrap());
        if a.contains_closed(&b).unwrap() && b.contains_closed(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if a.contains_closed(&b).unwrap() && b.contains_closed(&c).unwrap() {
            prop_assert!(a.contains_closed(&c).unwrap());
        }
        let ab = a.intersect(&b).unwrap();
        prop_assert!(a.contains_closed(&ab).unwrap() && b.contains_closed(&ab).unwrap());
        if a.contains_closed(&c).unwrap() && b.contains_closed(&c).unwrap() {
            prop_assert!(ab.contains_closed(&c).unwrap());
        }
        prop_assert_eq!(ab, b.intersect(&a).unwrap());
    }

    /// Grid points prove feasibility; witnesses prove themselves.
    #[test]
    fn fourier_motzkin_agrees_with_grid(
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 2), -4i64..=4, any::<bool>()), 1..6),
    ) {
        let mut sys = LinearSystem::new(2);
        for (c, rhs, strict) in &rows {
            sys.push_le(c.iter().map(|&x| rat(x, 1)).collect(), rat(*rhs, 1), *strict).unwrap();
        }
        let result = fm_feasible(&sys);
        if let Some(w) = result.witness() {
            prop_assert!(sys.is_satisfied_by(w));
        }
        let grid_hit = (-48..=48).any(|i| (-48..=48).any(|j| sys.is_satisfied_by(&[rat(i, 12), rat(j, 12)])));
        if grid_hit {
            prop_assert!(result.is_feasible());
        }
    }

    #[test]
    fn finite_and_closed_avoidance_agree(
        v in finite_lattice(3),
        num in 1i64..=7, den in 1i64..=4, strict in any::<bool>(), zero in prop::option::of(0usize..3),
    ) {
        let mut region = Region::simplex(3, rat(num, den), strict).unwrap();
        if let Some(i) = zero {
            region = region.face_region(&BTreeSet::from([i])).unwrap();
        }
        let g = v.finite_points(DEFAULT_CAP).unwrap();
        let finite = finite_avoids(&g, &region).unwrap();
        let closed = closed_avoids(&v, &region).unwrap();
        prop_assert_eq!(finite.avoids, closed.avoids);
        if let Some(w) = closed.witness {
            prop_assert!(region.contains(&w).unwrap() && v.contains_point(&w).unwrap());
        }
    }

    #[test]
    fn finite_points_match_lattice_membership(v in finite_lattice(2)) {
        let g = v.finite_points(DEFAULT_CAP).unwrap();
        let (dim, components) = v.dim_components();
        prop_assert_eq!(dim, 0);
        prop_assert_eq!(BigInt::from(g.order()), components);
        for x in g.points() {
            prop_assert!(v.contains_point(&x).unwrap());
        }
    }

    #[test]
    fn avoidance_is_monotone_in_eps(
        v in finite_lattice(3), a in 1i64..=8, b in 1i64..=8, strict in any::<bool>(),
    ) {
        let (lo, hi) = (a.min(b), a.max(b));
        let g = v.finite_points(DEFAULT_CAP).unwrap();
        let small = Region::simplex(3, rat(lo, 3), strict).unwrap();
        let large = Region::simplex(3, rat(hi, 3), strict).unwrap();
        if finite_avoids(&g, &large).unwrap().avoids {
            prop_assert!(finite_avoids(&g, &small).unwrap().avoids);
        }
    }

    #[test]
    fn mld_is_invariant_under_equivalence(
        r in 2u64..=30, w in prop::collection::vec(0i64..30, 3), u in 1u64..30, shift in 0usize..3,
    ) {
        let q = CyclicQuotient::new(r, &w).unwrap();
        prop_assume!(q.content() == 1 && q.satisfies_axis_condition());
        prop_assume!(num_integer::gcd(u, r) == 1);
        let mut other: Vec<i64> = q.weights().iter().map(|&a| (a * u % r) as i64).collect();
        other.rotate_left(shift);
        let p = CyclicQuotient::new(r, &other).unwrap();
        prop_assert_eq!(canonical_form(&q), canonical_form(&p));
        prop_assert_eq!(mld_cyclic(&q).unwrap().value, mld_cyclic(&p).unwrap().value);
        let g = from_cyclic(&q, DEFAULT_CAP).unwrap();
        prop_assert_eq!(mld(&g).value, mld_cyclic(&q).unwrap().value);
    }

    /// Subgroups of members are members under the union semantics.
    #[test]
    fn membership_is_inherited_by_subgroups(
        r in 2u64..=24, w in prop::collection::vec(0i64..24, 2), k in 1u64..24,
    ) {
        let s = Series::new(
            CharLattice::whole_torus(2),
            vec![
                Constraint {
                    subgroup: CharLattice::from_rows(2, [[1i64, 1]]).unwrap(),
                    excluders: vec![CharLattice::from_rows(2, [[1i64, 1], [0, 2]]).unwrap()],
                },
                Constraint {
                    subgroup: CharLattice::from_rows(2, [[0i64, 1]]).unwrap(),
                    excluders: vec![CharLattice::trivial(2)],
                },
            ],
        );
        let q = CyclicQuotient::new(r, &w).unwrap();
        let g = from_cyclic(&q, DEFAULT_CAP).unwrap();
        let h = span_elements(2, &[q.multiple(k)], DEFAULT_CAP).unwrap();
        prop_assert!(h.is_subgroup_of(&g));
        if belongs(&g, &s).unwrap() {
            prop_assert!(belongs(&h, &s).unwrap());
        }
    }
}


//! Randomized property suites: field axioms, polynomial arithmetic,
//! kernel exactness, the Riemann-Roch dimension law, divisor algebra,
//! wedge-basis combinatorics, duality, and p-very-ampleness monotonicity.

use curve_koszul::curve::{CurveModel, CurvePoint, DivisorSpec};
use curve_koszul::field::{El, Field};
use curve_koszul::koszul::{binom, wedge_enum, GradedSectionData};
use curve_koszul::matrix::SparseMat;
use curve_koszul::poly::UPoly;
use curve_koszul::rr::h0;
use curve_koszul::verify::{effective_divisors, is_p_very_ample};
use proptest::prelude::*;

fn fields_under_test() -> Vec<Field> {
    vec![
        Field::rationals(),
        Field::prime(11).unwrap(),
        Field::prime(10007).unwrap(),
        Field::extension_of_degree(11, 2).unwrap(),
        Field::extension_of_degree(11, 3).unwrap(),
    ]
}

fn el_from_seed(field: &Field, num: i64, den: i64) -> El {
    match field {
        Field::Rationals => field.from_ratio(num, den.max(1)),
        _ => field.pow(&field.from_i64(num.max(1)), den.unsigned_abs().max(1) % 17),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in -60i64..60, b in -60i64..60, c in -60i64..60, d in 1i64..10) {
        for field in fields_under_test() {
            let x = el_from_seed(&field, a, d);
            let y = el_from_seed(&field, b, d + 1);
            let z = el_from_seed(&field, c, d + 2);
            prop_assert_eq!(
                field.add(&field.add(&x, &y), &z),
                field.add(&x, &field.add(&y, &z))
            );
            prop_assert_eq!(field.mul(&x, &y), field.mul(&y, &x));
            prop_assert_eq!(
                field.mul(&x, &field.add(&y, &z)),
                field.add(&field.mul(&x, &y), &field.mul(&x, &z))
            );
            prop_assert_eq!(field.add(&x, &field.neg(&x)), field.zero());
            if !field.is_zero(&x) {
                let i = field.inv(&x).unwrap();
                prop_assert!(field.is_one(&field.mul(&x, &i)));
            }
        }
    }

    #[test]
    fn upoly_ring_laws(
        a in proptest::collection::vec(-9i64..9, 1..6),
        b in proptest::collection::vec(-9i64..9, 1..6),
        c in proptest::collection::vec(-9i64..9, 1..6),
    ) {
        for field in [Field::rationals(), Field::prime(10007).unwrap()] {
            let pa = UPoly::from_i64(&field, &a);
            let pb = UPoly::from_i64(&field, &b);
            let pc = UPoly::from_i64(&field, &c);
            prop_assert_eq!(pa.mul(&field, &pb), pb.mul(&field, &pa));
            prop_assert_eq!(
                pa.mul(&field, &pb).mul(&field, &pc),
                pa.mul(&field, &pb.mul(&field, &pc))
            );
            if !pb.is_zero() {
                let (q, r) = pa.divrem(&field, &pb);
                prop_assert_eq!(q.mul(&field, &pb).add(&field, &r), pa.clone());
                prop_assert!(r.degree() < pb.degree() || r.is_zero());
                let g = pa.gcd(&field, &pb);
                if !pa.is_zero() {
                    prop_assert!(pa.rem(&field, &g).is_zero());
                    prop_assert!(pb.rem(&field, &g).is_zero());
                }
            }
        }
    }

    #[test]
    fn kernel_exactness(
        entries in proptest::collection::vec((0usize..7, 0usize..7, -5i64..5), 0..25),
        rows in 2usize..7,
        cols in 2usize..7,
    ) {
        for field in [Field::rationals(), Field::prime(10007).unwrap()] {
            let mut m = SparseMat::new(field.clone(), rows, cols);
            for (r, c, v) in &entries {
                if *r < rows && *c < cols {
                    m.add_to(*r, *c, field.from_i64(*v));
                }
            }
            let rank = m.rank();
            let k = m.kernel_basis();
            prop_assert_eq!(rank + k.ncols, cols);
            prop_assert!(m.mul(&k).is_zero());
        }
    }

    #[test]
    fn wedge_enum_shape(n in 0usize..9, k in 0usize..9) {
        let p = k.min(n);
        let sets = wedge_enum(n, p);
        prop_assert_eq!(sets.len(), binom(n, p));
        for s in &sets {
            prop_assert_eq!(s.len(), p);
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.iter().all(|&i| i < n));
        }
        for w in sets.windows(2) {
            prop_assert!(w[0] < w[1], "lexicographic order");
        }
    }

    #[test]
    fn divisor_algebra(m1 in -4i64..6, m2 in -4i64..6, t in -3i64..4) {
        let field = Field::prime(11).unwrap();
        let model = CurveModel::hyperelliptic(
            field.clone(),
            UPoly::from_i64(&field, &[-1, 0, 0, 0, 0, 1]),
        )
        .unwrap();
        let pts = model.enumerate_closed_points(1).unwrap();
        let p = pts.iter().find(|p| !p.is_base_point()).unwrap().clone();
        let d1 = DivisorSpec::new(m1, vec![(p.clone(), 1)]).unwrap();
        let d2 = DivisorSpec::new(m2, vec![(p, 2)]).unwrap();
        let sum = d1.add(&d2);
        prop_assert_eq!(sum.degree(&model), d1.degree(&model) + d2.degree(&model));
        let sc = d1.scaled(t);
        prop_assert_eq!(sc.degree(&model), t * d1.degree(&model));
        let diff = d1.sub(&d1);
        prop_assert_eq!(diff.degree(&model), 0);
        prop_assert!(diff.conditions.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riemann_roch_law(base in -1i64..5, picks in proptest::collection::vec((0usize..64, 1i64..3), 0..3)) {
        let field = Field::prime(11).unwrap();
        let models = vec![
            CurveModel::rational(field.clone()),
            CurveModel::hyperelliptic(
                field.clone(),
                UPoly::from_i64(&field, &[0, -1, 0, 0, 0, 0, 0, 1]),
            )
            .unwrap(),
        ];
        for model in models {
            let g = model.genus();
            let omega = model.canonical_divisor();
            let pts: Vec<CurvePoint> = model
                .enumerate_closed_points(1)
                .unwrap()
                .into_iter()
                .filter(|p| !p.is_base_point())
                .collect();
            let conditions: Vec<(CurvePoint, i64)> = picks
                .iter()
                .map(|(i, k)| (pts[i % pts.len()].clone(), *k))
                .collect();
            let d = DivisorSpec::new(base, conditions).unwrap();
            let deg = d.degree(&model);
            let h0d = h0(&model, &d).unwrap() as i64;
            let h1d = h0(&model, &omega.sub(&d)).unwrap() as i64;
            prop_assert_eq!(h0d - h1d, deg - g + 1, "RR on {} (g={})", d.fmt(), g);
        }
    }

    #[test]
    fn effective_divisor_enumeration(deg in 1i64..4) {
        let field = Field::prime(5).unwrap();
        let model = CurveModel::rational(field);
        let pts = model.enumerate_closed_points(deg.min(3) as usize).unwrap();
        let divs = effective_divisors(&pts, deg);
        // every divisor has the requested degree and positive multiplicities
        for d in &divs {
            let total: i64 = d.iter().map(|(p, k)| k * p.residue_degree() as i64).sum();
            prop_assert_eq!(total, deg);
            prop_assert!(d.iter().all(|(_, k)| *k > 0));
        }
        // deterministic: a second enumeration is identical
        let again = effective_divisors(&pts, deg);
        prop_assert_eq!(divs, again);
    }
}

/// Duality dim K_(p,1)(C;L) = dim K_(r-1-p,1)(C,omega;L) on a genus-2
/// battery over a prime field, independent of the main suite instances.
#[test]
fn duality_on_f13_battery() {
    let field = Field::prime(13).unwrap();
    let model = CurveModel::hyperelliptic(
        field.clone(),
        UPoly::from_i64(&field, &[-1, 0, 0, 0, 0, 1]),
    )
    .unwrap();
    for deg in [4i64, 5, 6] {
        let l = DivisorSpec::of_base(deg);
        let o = DivisorSpec::of_base(0);
        let omega = model.canonical_divisor();
        let mut plain = GradedSectionData::new(&model, &o, &l).unwrap();
        let mut twisted = GradedSectionData::new(&model, &omega, &l).unwrap();
        let r = plain.v.dim() - 1;
        for p in 0..=r {
            let lhs = plain.koszul_dim(p, 1).unwrap();
            let rhs = if p + 1 <= r {
                twisted.koszul_dim(r - 1 - p, 1).unwrap()
            } else {
                0
            };
            assert_eq!(lhs, rhs, "duality fails at p={p}, deg L={deg}");
        }
    }
}

/// If B is p-very ample it is also (p-1)-very ample: removing a point
/// from a violating divisor of lower degree would contradict the higher
/// statement, and the implementation must agree.
#[test]
fn pva_monotonicity() {
    let field = Field::prime(11).unwrap();
    let model = CurveModel::hyperelliptic(
        field.clone(),
        UPoly::from_i64(&field, &[-1, 0, 0, 0, 0, 1]),
    )
    .unwrap();
    for m in 2i64..=7 {
        let b = DivisorSpec::of_base(m);
        let mut verdicts = Vec::new();
        for p in 0..=2usize {
            let (ok, _) = is_p_very_ample(&model, &b, p).unwrap();
            verdicts.push(ok);
        }
        for w in verdicts.windows(2) {
            assert!(
                !w[1] || w[0],
                "p-very ample must imply (p-1)-very ample, got {verdicts:?} for B={m}Pinf"
            );
        }
    }
}

/// The exceptional branch of the main pattern agrees with the adjoint
/// description: L = omega^2 is B + omega with B = omega, and on a genus-2
/// curve h0(omega) = 2 makes (p = 0) the exceptional pencil case of the
/// corollary.
#[test]
fn exceptional_branch_agreement() {
    use curve_koszul::verify::{corollary_pattern_check, is_exceptional};
    let field = Field::rationals();
    let model = CurveModel::hyperelliptic(
        field.clone(),
        UPoly::from_i64(&field, &[-1, 0, 0, 0, 0, 1]),
    )
    .unwrap();
    let omega = model.canonical_divisor();
    let l = omega.scaled(2);
    assert!(is_exceptional(&model, &l).unwrap());
    let rep = corollary_pattern_check(&model, &omega, &l, 0).unwrap();
    assert!(rep.exceptional, "B = omega, h0 = 2 is the pencil subcase");
    assert!(rep.verdict);
    assert!(rep.k_p1 > 0);
}

//! The built-in verification suite: nine named checks covering the syzygy
//! patterns, duality, Hilbert identities, gonality certificates, and
//! randomized consistency properties on a fixed battery of curves.

use crate::curve::{CurveModel, CurvePoint, DivisorSpec};
use crate::field::{El, Field};
use crate::koszul::{betti_table, hilbert_check, BettiTable, GradedSectionData};
use crate::matrix::SparseMat;
use crate::poly::{MPoly, UPoly};
use crate::rr::h0;
use crate::verify::{
    bvanishing_check, genus_gonality_check, gonality, gonality_pattern_check, is_exceptional,
    is_p_very_ample, GonalityMethod,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

fn hyp_g2(field: &Field) -> CurveModel {
    CurveModel::hyperelliptic(field.clone(), UPoly::from_i64(field, &[-1, 0, 0, 0, 0, 1]))
        .expect("y^2 = x^5 - 1 is a valid model")
}

fn hyp_g3(field: &Field) -> CurveModel {
    CurveModel::hyperelliptic(
        field.clone(),
        UPoly::from_i64(field, &[0, -1, 0, 0, 0, 0, 0, 1]),
    )
    .expect("y^2 = x^7 - x is a valid model")
}

fn klein(field: &Field) -> CurveModel {
    let mut f = MPoly::zero(3);
    f.add_term(field, vec![3, 1, 0], field.one());
    f.add_term(field, vec![0, 3, 1], field.one());
    f.add_term(field, vec![1, 0, 3], field.one());
    CurveModel::plane_smooth(field.clone(), f).expect("the Klein quartic is smooth")
}

/// L = 3H minus the three coordinate points of the Klein quartic.
fn klein_deg9(model: &CurveModel) -> DivisorSpec {
    let f = &model.field;
    let pts = [
        CurvePoint::plane(f, [f.one(), f.zero(), f.zero()]),
        CurvePoint::plane(f, [f.zero(), f.one(), f.zero()]),
        CurvePoint::plane(f, [f.zero(), f.zero(), f.one()]),
    ];
    DivisorSpec::new(3, pts.into_iter().map(|p| (p, 1)).collect()).expect("normalized")
}

/// The three principal (model, L) pairs: genus-2 with L = omega^2, the
/// Klein quartic with L = omega^2 = 2H, genus-3 hyperelliptic with
/// L = omega^2 = 8 Pinf.
fn main_pairs(field: &Field) -> Vec<(&'static str, CurveModel, DivisorSpec)> {
    let g2 = hyp_g2(field);
    let l2 = g2.canonical_divisor().scaled(2);
    let k = klein(field);
    let lk = k.canonical_divisor().scaled(2);
    let g3 = hyp_g3(field);
    let l3 = g3.canonical_divisor().scaled(2);
    vec![
        ("hyp g2, L=4Pinf", g2, l2),
        ("Klein, L=2H", k, lk),
        ("hyp g3, L=8Pinf", g3, l3),
    ]
}

fn fmt_dims(dims: &[usize]) -> String {
    let strs: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    format!("[{}]", strs.join(", "))
}

/// Criterion 1: genus-2 exceptional case, L = omega^2 over Q.
fn c1() -> (bool, String) {
    let model = hyp_g2(&Field::rationals());
    let l = model.canonical_divisor().scaled(2);
    match gonality_pattern_check(&model, &l) {
        Ok(r) => {
            let pass = r.verdict
                && r.exceptional
                && r.dims.first() == Some(&1)
                && r.dims.iter().skip(1).all(|&d| d == 0);
            (
                pass,
                format!(
                    "exceptional={}, K_(p,1) for p=1..{} = {}, verdict={}",
                    r.exceptional,
                    r.r,
                    fmt_dims(&r.dims),
                    r.verdict
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

/// Criterion 2: plane-quartic exceptional case, Klein with L = 2H over Q.
fn c2() -> (bool, String) {
    let model = klein(&Field::rationals());
    let l = model.canonical_divisor().scaled(2);
    match gonality_pattern_check(&model, &l) {
        Ok(r) => {
            let nonzero_exact = (1..=r.r).all(|p| (r.dims[p - 1] != 0) == (p <= 3));
            let pass = r.verdict && r.exceptional && nonzero_exact && r.dims[2] == 3;
            (
                pass,
                format!(
                    "exceptional={}, K_(p,1) for p=1..{} = {}, K_(3,1)={}, verdict={}",
                    r.exceptional,
                    r.r,
                    fmt_dims(&r.dims),
                    r.dims[2],
                    r.verdict
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

/// Criterion 3: non-exceptional deg 4g-4, genus-3 hyperelliptic over Q.
fn c3() -> (bool, String) {
    let model = hyp_g3(&Field::rationals());
    let l = model.canonical_divisor().scaled(2);
    match gonality_pattern_check(&model, &l) {
        Ok(r) => {
            let nonzero_exact = (1..=r.r).all(|p| (r.dims[p - 1] != 0) == (p <= 3));
            let pass = r.verdict && !r.exceptional && nonzero_exact;
            (
                pass,
                format!(
                    "exceptional={}, K_(p,1) for p=1..{} = {}, verdict={}",
                    r.exceptional,
                    r.r,
                    fmt_dims(&r.dims),
                    r.verdict
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

/// Criterion 4: deg L = 4g-3 on the Klein quartic, L = 3H - 3 coordinate
/// points, verified not isomorphic to omega^2.
fn c4() -> (bool, String) {
    let model = klein(&Field::rationals());
    let l = klein_deg9(&model);
    let not_omega2 = match is_exceptional(&model, &l) {
        Ok(b) => !b,
        Err(e) => return (false, format!("error: {e}")),
    };
    match gonality_pattern_check(&model, &l) {
        Ok(r) => {
            let nonzero_exact = (1..=r.r).all(|p| (r.dims[p - 1] != 0) == (p <= 3));
            let pass = r.verdict && not_omega2 && nonzero_exact && r.deg_l == 9;
            (
                pass,
                format!(
                    "deg L={}, not omega^2: {}, K_(p,1) for p=1..{} = {}, verdict={}",
                    r.deg_l,
                    not_omega2,
                    r.r,
                    fmt_dims(&r.dims),
                    r.verdict
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

/// The criterion-5 battery: (model, B, p, expected dim K_(p,1)).
fn c5_battery(field: &Field) -> Vec<(&'static str, CurveModel, DivisorSpec, usize, usize)> {
    vec![
        ("g2, B=2Pinf, p=0", hyp_g2(field), DivisorSpec::of_base(2), 0, 1),
        ("g2, B=5Pinf, p=1", hyp_g2(field), DivisorSpec::of_base(5), 1, 0),
        ("Klein, B=H, p=1", klein(field), DivisorSpec::of_base(1), 1, 3),
        (
            "rational, B=2Pinf, p=2",
            CurveModel::rational(field.clone()),
            DivisorSpec::of_base(2),
            2,
            0,
        ),
        (
            "rational, B=3Pinf, p=3",
            CurveModel::rational(field.clone()),
            DivisorSpec::of_base(3),
            3,
            0,
        ),
    ]
}

/// Criterion 5: the branch table of the adjoint vanishing theorem
/// (L = B + omega).
fn c5() -> (bool, String) {
    let field = Field::rationals();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, model, b, p, expected) in c5_battery(&field) {
        match bvanishing_check(&model, &b, p) {
            Ok(r) => {
                if !(r.verdict && r.computed == expected) {
                    pass = false;
                }
                parts.push(format!(
                    "{name}: h0(B)={}, branch {}, K=({} want {})",
                    r.h0_b, r.branch, r.computed, expected
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: error {e}"));
            }
        }
    }
    (pass, parts.join("; "))
}

/// Criterion 6: duality dim K_(p,1)(C;L) = dim K_(r-1-p,1)(C,omega;L) on
/// the three principal pairs, both sides computed independently.
fn c6() -> (bool, String) {
    let field = Field::rationals();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, model, l) in main_pairs(&field) {
        let run = (|| -> Result<(Vec<usize>, Vec<usize>), String> {
            let o = DivisorSpec::of_base(0);
            let omega = model.canonical_divisor();
            let mut plain =
                GradedSectionData::new(&model, &o, &l).map_err(|e| e.to_string())?;
            let mut twisted =
                GradedSectionData::new(&model, &omega, &l).map_err(|e| e.to_string())?;
            let r = plain.v.dim() - 1;
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for p in 0..=r {
                lhs.push(plain.koszul_dim(p, 1).map_err(|e| e.to_string())?);
                let dual_p = r as i64 - 1 - p as i64;
                rhs.push(if dual_p < 0 {
                    0
                } else {
                    twisted
                        .koszul_dim(dual_p as usize, 1)
                        .map_err(|e| e.to_string())?
                });
            }
            Ok((lhs, rhs))
        })();
        match run {
            Ok((lhs, rhs)) => {
                if lhs != rhs {
                    pass = false;
                    parts.push(format!(
                        "{name}: MISMATCH {} vs {}",
                        fmt_dims(&lhs),
                        fmt_dims(&rhs)
                    ));
                } else {
                    parts.push(format!("{name}: {}", fmt_dims(&lhs)));
                }
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: error {e}"));
            }
        }
    }
    (pass, parts.join("; "))
}

/// All (name, model, B, L) whose Betti tables criteria 1-5 produce.
fn c7_tables(field: &Field) -> Vec<(String, CurveModel, DivisorSpec, DivisorSpec)> {
    let mut out: Vec<(String, CurveModel, DivisorSpec, DivisorSpec)> = Vec::new();
    for (name, model, l) in main_pairs(field) {
        out.push((name.to_string(), model, DivisorSpec::of_base(0), l));
    }
    let k = klein(field);
    let l9 = klein_deg9(&k);
    out.push(("Klein, L=3H-3pts".to_string(), k, DivisorSpec::of_base(0), l9));
    for (name, model, b, _, _) in c5_battery(field) {
        let l = b.add(&model.canonical_divisor());
        out.push((format!("adjoint {name}"), model, b, l));
    }
    out
}

/// Criterion 7: the Hilbert identity holds on every table produced by
/// criteria 1-5, and row q = 3 is identically zero.
fn c7() -> (bool, String) {
    let field = Field::rationals();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, model, b, l) in c7_tables(&field) {
        let run = (|| -> Result<(BettiTable, Result<(), usize>), String> {
            let t = betti_table(&model, &b, &l, 3).map_err(|e| e.to_string())?;
            let mut data =
                GradedSectionData::new(&model, &b, &l).map_err(|e| e.to_string())?;
            let h = hilbert_check(&t, &mut data).map_err(|e| e.to_string())?;
            Ok((t, h))
        })();
        match run {
            Ok((t, h)) => {
                let row3_zero = t.dims.iter().all(|row| row[3] == 0);
                match h {
                    Ok(()) if row3_zero => parts.push(format!("{name}: ok")),
                    Ok(()) => {
                        pass = false;
                        parts.push(format!("{name}: row q=3 nonzero"));
                    }
                    Err(d) => {
                        pass = false;
                        parts.push(format!("{name}: Hilbert mismatch at degree {d}"));
                    }
                }
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: error {e}"));
            }
        }
    }
    (pass, parts.join("; "))
}

/// Criterion 8: brute-force gonality over F_11 agrees with the family
/// formula; genus-gonality inequality; p-very-ampleness of omega at
/// gon-2 (true) and gon-1 (false, with witness).
fn c8() -> (bool, String) {
    let field = match Field::prime(11) {
        Ok(f) => f,
        Err(e) => return (false, format!("error: {e}")),
    };
    let models: Vec<(&str, CurveModel, usize)> = vec![
        ("hyp g2", hyp_g2(&field), 2),
        ("hyp g3", hyp_g3(&field), 2),
        ("Klein", klein(&field), 3),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, model, want_gon) in models {
        let run = (|| -> Result<String, String> {
            let brute =
                gonality(&model, GonalityMethod::BruteForce).map_err(|e| e.to_string())?;
            let fam =
                gonality(&model, GonalityMethod::FamilyFormula).map_err(|e| e.to_string())?;
            if brute.value != want_gon || fam.value != want_gon {
                return Err(format!(
                    "gonality: brute {} / formula {} (want {want_gon})",
                    brute.value, fam.value
                ));
            }
            if !genus_gonality_check(&model).map_err(|e| e.to_string())? {
                return Err("genus-gonality check failed".to_string());
            }
            let omega = model.canonical_divisor();
            if want_gon >= 2 {
                let (ok, _) = is_p_very_ample(&model, &omega, want_gon - 2)
                    .map_err(|e| e.to_string())?;
                if !ok {
                    return Err(format!("omega not ({})-very ample", want_gon - 2));
                }
            }
            let (ok, witness) =
                is_p_very_ample(&model, &omega, want_gon - 1).map_err(|e| e.to_string())?;
            if ok || witness.is_none() {
                return Err(format!(
                    "omega unexpectedly ({})-very ample",
                    want_gon - 1
                ));
            }
            Ok(format!("{name}: gon={want_gon} (brute=formula), pva branch ok"))
        })();
        match run {
            Ok(s) => parts.push(s),
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    (pass, parts.join("; "))
}

fn random_el(field: &Field, rng: &mut ChaCha8Rng) -> El {
    match field {
        Field::Rationals => field.from_ratio(rng.gen_range(-40..=40), rng.gen_range(1..=12)),
        Field::Prime(p) => El::F(rng.gen_range(0..*p)),
        Field::Ext { p, minpoly } => {
            El::E((0..minpoly.len() - 1).map(|_| rng.gen_range(0..*p)).collect())
        }
    }
}

fn field_axiom_checks(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let fields = vec![
        Field::rationals(),
        Field::prime(11).map_err(|e| e.to_string())?,
        Field::prime(10007).map_err(|e| e.to_string())?,
        Field::extension_of_degree(11, 3).map_err(|e| e.to_string())?,
    ];
    let mut n = 0;
    for field in &fields {
        for _ in 0..25 {
            let a = random_el(field, rng);
            let b = random_el(field, rng);
            let c = random_el(field, rng);
            let assoc = field.add(&field.add(&a, &b), &c) == field.add(&a, &field.add(&b, &c));
            let distr = field.mul(&a, &field.add(&b, &c))
                == field.add(&field.mul(&a, &b), &field.mul(&a, &c));
            let comm = field.mul(&a, &b) == field.mul(&b, &a);
            let inv_ok = if field.is_zero(&a) {
                true
            } else {
                let i = field.inv(&a).map_err(|e| e.to_string())?;
                field.is_one(&field.mul(&a, &i))
            };
            if !(assoc && distr && comm && inv_ok) {
                return Err(format!("field axiom failed over {field:?}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

fn kernel_exactness_checks(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let fields = vec![
        Field::rationals(),
        Field::prime(10007).map_err(|e| e.to_string())?,
    ];
    let mut n = 0;
    for field in &fields {
        for _ in 0..10 {
            let rows = rng.gen_range(3..=8);
            let cols = rng.gen_range(3..=8);
            let mut m = SparseMat::new(field.clone(), rows, cols);
            for _ in 0..(rows * cols / 2) {
                let r = rng.gen_range(0..rows);
                let c = rng.gen_range(0..cols);
                m.add_to(r, c, field.from_i64(rng.gen_range(-5..=5)));
            }
            let rank = m.rank();
            let k = m.kernel_basis();
            if rank + k.ncols != cols {
                return Err(format!("rank-nullity failed: {rank} + {} != {cols}", k.ncols));
            }
            if !m.mul(&k).is_zero() {
                return Err("kernel vectors not annihilated".to_string());
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Randomized Riemann-Roch law h0(D) - h0(K - D) = deg D - g + 1 on
/// divisors with degree-1 support over F_11, across all three families.
fn rr_law_checks(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let field = Field::prime(11).map_err(|e| e.to_string())?;
    let models = vec![
        CurveModel::rational(field.clone()),
        hyp_g2(&field),
        hyp_g3(&field),
        klein(&field),
    ];
    let mut n = 0;
    for model in &models {
        let g = model.genus();
        let omega = model.canonical_divisor();
        let pts: Vec<CurvePoint> = model
            .enumerate_closed_points(1)
            .map_err(|e| e.to_string())?;
        if pts.is_empty() {
            return Err("no rational points to sample".to_string());
        }
        for _ in 0..60 {
            let base_mult = rng.gen_range(-1..=4);
            let ncond = rng.gen_range(0..=3);
            let mut conditions = Vec::new();
            for _ in 0..ncond {
                let p = pts[rng.gen_range(0..pts.len())].clone();
                if p.is_base_point() {
                    continue;
                }
                conditions.push((p, rng.gen_range(1..=2)));
            }
            let d = match DivisorSpec::new(base_mult, conditions) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let deg = d.degree(model);
            if deg < -4 || deg > 14 {
                continue;
            }
            let h0d = h0(model, &d).map_err(|e| e.to_string())? as i64;
            let kd = omega.sub(&d);
            let h1d = h0(model, &kd).map_err(|e| e.to_string())? as i64;
            if h0d - h1d != deg - g + 1 {
                return Err(format!(
                    "RR law failed on {} over F_11: h0={h0d}, h1={h1d}, deg={deg}, g={g}",
                    d.fmt()
                ));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// d∘d = 0 on assembled Koszul differentials of the principal pairs.
fn ddzero_checks(field: &Field) -> Result<usize, String> {
    let mut n = 0;
    for (name, model, l) in main_pairs(field) {
        let o = DivisorSpec::of_base(0);
        let mut data = GradedSectionData::new(&model, &o, &l).map_err(|e| e.to_string())?;
        let r = data.v.dim() - 1;
        for q in 0..=1 {
            for p in 2..=r.min(4) {
                let d1 = data.differential(p, q).map_err(|e| e.to_string())?;
                let d2 = data
                    .differential(p - 1, q + 1)
                    .map_err(|e| e.to_string())?;
                if !d2.mul(&d1).is_zero() {
                    return Err(format!("d∘d != 0 at (p,q)=({p},{q}) on {name}"));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Good-reduction agreement of Betti tables between Q and F_p.
fn reduction_checks() -> Result<usize, String> {
    let q_tables: Vec<(String, BettiTable)> = main_pairs(&Field::rationals())
        .into_iter()
        .map(|(name, model, l)| {
            betti_table(&model, &DivisorSpec::of_base(0), &l, 3)
                .map(|t| (name.to_string(), t))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let mut n = 0;
    for prime in [10007u64, 31013] {
        let field = Field::prime(prime).map_err(|e| e.to_string())?;
        for ((name, tq), (_, model, l)) in q_tables.iter().zip(main_pairs(&field)) {
            let tp = betti_table(&model, &DivisorSpec::of_base(0), &l, 3)
                .map_err(|e| e.to_string())?;
            if tp.dims != tq.dims {
                return Err(format!("bad reduction at p={prime} on {name}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Criterion 9: randomized property suites.
fn c9() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4b6f737a756c);
    let mut parts = Vec::new();
    let mut pass = true;
    match rr_law_checks(&mut rng) {
        Ok(n) if n >= 200 => parts.push(format!("RR law: {n} divisors ok")),
        Ok(n) => {
            pass = false;
            parts.push(format!("RR law: only {n} divisors sampled (< 200)"));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("RR law: {e}"));
        }
    }
    match ddzero_checks(&Field::rationals()) {
        Ok(n) => parts.push(format!("d∘d=0: {n} compositions ok")),
        Err(e) => {
            pass = false;
            parts.push(format!("d∘d=0: {e}"));
        }
    }
    match reduction_checks() {
        Ok(n) => parts.push(format!("Q vs F_p tables: {n} agreements")),
        Err(e) => {
            pass = false;
            parts.push(format!("Q vs F_p: {e}"));
        }
    }
    match field_axiom_checks(&mut rng) {
        Ok(n) => parts.push(format!("field axioms: {n} samples ok")),
        Err(e) => {
            pass = false;
            parts.push(format!("field axioms: {e}"));
        }
    }
    match kernel_exactness_checks(&mut rng) {
        Ok(n) => parts.push(format!("kernel exactness: {n} matrices ok")),
        Err(e) => {
            pass = false;
            parts.push(format!("kernel exactness: {e}"));
        }
    }
    (pass, parts.join("; "))
}

/// Run the full suite in declared order. Deterministic.
pub fn run_suite() -> Vec<SuiteResult> {
    let checks: Vec<(&'static str, fn() -> (bool, String))> = vec![
        ("genus-2 exceptional pattern (L = omega^2)", c1),
        ("Klein quartic exceptional pattern (L = 2H)", c2),
        ("genus-3 non-exceptional pattern (L = 8Pinf)", c3),
        ("deg 4g-3 pattern (Klein, L = 3H - 3 pts)", c4),
        ("adjoint vanishing branch table", c5),
        ("duality of K_(p,1) dimensions", c6),
        ("Hilbert identity and q=3 row vanishing", c7),
        ("gonality certificates and p-very-ampleness", c8),
        ("randomized property suites", c9),
    ];
    let mut out = Vec::new();
    for (name, f) in checks {
        let t0 = Instant::now();
        let (pass, detail) = f();
        out.push(SuiteResult {
            name,
            pass,
            detail,
            millis: t0.elapsed().as_millis(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_models_are_valid() {
        let q = Field::rationals();
        assert_eq!(hyp_g2(&q).genus(), 2);
        assert_eq!(hyp_g3(&q).genus(), 3);
        assert_eq!(klein(&q).genus(), 3);
        let k = klein(&q);
        assert_eq!(klein_deg9(&k).degree(&k), 9);
    }
}

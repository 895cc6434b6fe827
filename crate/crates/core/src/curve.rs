//! Explicit curve models: the projective line, odd-degree hyperelliptic
//! Weierstrass models y^2 = f(x) with a single point at infinity, and
//! nonsingular plane curves F(x, y, z) = 0.
//!
//! Models carry their base field (Q or F_p). Points may live in extension
//! fields F_{p^e}; a point stored here always stands for its full Galois
//! orbit (a closed point of degree e).

use crate::field::{El, Field};
use crate::poly::{BiPoly, MPoly, UPoly};
use crate::series::{eval_upoly_at, hensel_root, Series};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("invalid curve model: {0}")]
    BadModel(String),
    #[error("operation requires a prime field")]
    UnsupportedField,
    #[error("point does not lie on the curve")]
    PointNotOnCurve,
    #[error("singular point encountered (wrong chart or invalid model)")]
    SingularPoint,
    #[error("divisor normalization error: {0}")]
    NormalizationError(String),
    #[error("principal shift failed: {0}")]
    ShiftFailure(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Rational,
    /// y^2 = f(x), f squarefree of odd degree 2g+1.
    Hyperelliptic { f: UPoly },
    /// F(x, y, z) = 0, F homogeneous of degree d >= 3, nonsingular, with a
    /// nonzero coefficient on z^d (the normal-form reduction anchor).
    PlaneSmooth { f: MPoly },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    pub family: Family,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointCoords {
    RatInf,
    RatAff(El),
    HypInf,
    HypAff(El, El),
    /// Projective triple scaled so the first nonzero coordinate is 1.
    Plane([El; 3]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Field the coordinates live in (the model field or an extension of
    /// its prime field).
    pub field: Field,
    pub coords: PointCoords,
}

impl CurveModel {
    pub fn rational(field: Field) -> Self {
        CurveModel {
            family: Family::Rational,
            field,
        }
    }

    pub fn hyperelliptic(field: Field, f: UPoly) -> Result<Self, CurveError> {
        if field.characteristic() == 2 {
            return Err(CurveError::BadModel("characteristic 2 not supported".into()));
        }
        let d = f.degree();
        if d < 3 || d % 2 == 0 {
            return Err(CurveError::BadModel(format!(
                "hyperelliptic model needs odd degree >= 3, got {d}"
            )));
        }
        if !f.is_squarefree(&field) {
            return Err(CurveError::BadModel("f is not squarefree".into()));
        }
        Ok(CurveModel {
            family: Family::Hyperelliptic { f },
            field,
        })
    }

    pub fn plane_smooth(field: Field, f: MPoly) -> Result<Self, CurveError> {
        assert_eq!(f.nvars, 3);
        if !f.is_homogeneous() || f.is_zero() {
            return Err(CurveError::BadModel("F must be homogeneous and nonzero".into()));
        }
        let d = f.total_degree();
        if d < 3 {
            return Err(CurveError::BadModel(format!("plane degree must be >= 3, got {d}")));
        }
        if !plane_is_smooth(&field, &f)? {
            return Err(CurveError::BadModel("plane curve is singular".into()));
        }
        Ok(CurveModel {
            family: Family::PlaneSmooth { f },
            field,
        })
    }

    /// Constructor variant that applies a random linear change of
    /// coordinates when the model is presented in a degenerate position
    /// (currently: no position is degenerate, since reduction anchors on
    /// the leading monomial of F rather than a pure power of z; kept as
    /// the forgiving entry point).
    pub fn plane_smooth_normalized(field: Field, f: MPoly) -> Result<Self, CurveError> {
        Self::plane_smooth(field, f)
    }

    /// Leading term of the plane model under graded order with z > y > x
    /// (the normal-form reduction anchor). Panics for non-plane models.
    pub fn plane_lead(&self) -> (Vec<u32>, El) {
        let Family::PlaneSmooth { f } = &self.family else {
            panic!("plane_lead on a non-plane model");
        };
        let (e, c) = f
            .terms
            .iter()
            .max_by_key(|(e, _)| (e[2], e[1], e[0]))
            .expect("nonzero F");
        (e.clone(), c.clone())
    }

    pub fn genus(&self) -> i64 {
        match &self.family {
            Family::Rational => 0,
            Family::Hyperelliptic { f } => (f.degree() - 1) / 2,
            Family::PlaneSmooth { f } => {
                let d = f.total_degree();
                (d - 1) * (d - 2) / 2
            }
        }
    }

    /// Degree of the distinguished base divisor (P_inf or the hyperplane
    /// class H).
    pub fn base_degree(&self) -> i64 {
        match &self.family {
            Family::Rational | Family::Hyperelliptic { .. } => 1,
            Family::PlaneSmooth { f } => f.total_degree(),
        }
    }

    pub fn canonical_divisor(&self) -> DivisorSpec {
        let m = match &self.family {
            Family::Rational => -2,
            Family::Hyperelliptic { .. } => 2 * self.genus() - 2,
            Family::PlaneSmooth { f } => f.total_degree() - 3,
        };
        DivisorSpec::of_base(m)
    }

    pub fn plane_degree(&self) -> Option<i64> {
        match &self.family {
            Family::PlaneSmooth { f } => Some(f.total_degree()),
            _ => None,
        }
    }

    pub fn is_plane_quartic(&self) -> bool {
        self.plane_degree() == Some(4)
    }

    /// Check that a point (over the model field or an extension of its
    /// prime field) lies on the curve.
    pub fn contains(&self, pt: &CurvePoint) -> bool {
        let kf = &pt.field;
        match (&self.family, &pt.coords) {
            (Family::Rational, PointCoords::RatInf | PointCoords::RatAff(_)) => true,
            (Family::Hyperelliptic { .. }, PointCoords::HypInf) => true,
            (Family::Hyperelliptic { f }, PointCoords::HypAff(a, b)) => {
                let fe = f.embed(kf);
                kf.eq_els(&kf.mul(b, b), &fe.eval(kf, a))
            }
            (Family::PlaneSmooth { f }, PointCoords::Plane(xyz)) => {
                let fe = f.embed(kf);
                kf.is_zero(&fe.eval(kf, xyz))
            }
            _ => false,
        }
    }

    /// All closed points of residue degree <= max_degree, one Galois-orbit
    /// representative each, in a deterministic order. Prime fields only.
    pub fn enumerate_closed_points(&self, max_degree: usize) -> Result<Vec<CurvePoint>, CurveError> {
        let p = match self.field {
            Field::Prime(p) => p,
            _ => return Err(CurveError::UnsupportedField),
        };
        assert!(max_degree >= 1 && max_degree <= 4, "desk-scale bound");
        let mut out: Vec<CurvePoint> = Vec::new();
        for e in 1..=max_degree {
            let kf = if e == 1 {
                self.field.clone()
            } else {
                Field::extension_of_degree(p, e).expect("extension")
            };
            let mut reps: Vec<PointCoords> = Vec::new();
            for coords in self.points_over(&kf) {
                let (deg, rep) = frobenius_orbit_rep(&kf, &coords);
                if deg == e {
                    reps.push(rep);
                }
            }
            reps.sort();
            reps.dedup();
            out.extend(reps.into_iter().map(|coords| CurvePoint {
                field: kf.clone(),
                coords,
            }));
        }
        Ok(out)
    }

    /// All points of the curve with coordinates in the given finite field
    /// (including points at infinity).
    fn points_over(&self, kf: &Field) -> Vec<PointCoords> {
        let mut pts = Vec::new();
        match &self.family {
            Family::Rational => {
                for a in kf.elements() {
                    pts.push(PointCoords::RatAff(a));
                }
                pts.push(PointCoords::RatInf);
            }
            Family::Hyperelliptic { f } => {
                let fe = f.embed(kf);
                for a in kf.elements() {
                    let c = fe.eval(kf, &a);
                    if kf.is_zero(&c) {
                        pts.push(PointCoords::HypAff(a, kf.zero()));
                    } else if let Some(b) = kf.sqrt(&c) {
                        pts.push(PointCoords::HypAff(a.clone(), kf.neg(&b)));
                        pts.push(PointCoords::HypAff(a, b));
                    }
                }
                pts.push(PointCoords::HypInf);
            }
            Family::PlaneSmooth { f } => {
                let fe = f.embed(kf);
                // affine chart z = 1
                let aff = fe.dehomogenize(kf, 2);
                for x0 in kf.elements() {
                    // roots in y of F(x0, y, 1)
                    let uni = bivar_partial_eval_x(kf, &aff, &x0);
                    if uni.is_zero() {
                        for y0 in kf.elements() {
                            pts.push(normalize_plane(kf, [x0.clone(), y0, kf.one()]));
                        }
                    } else if uni.degree() >= 1 {
                        for (y0, _m) in uni.roots_with_multiplicity(kf) {
                            pts.push(normalize_plane(kf, [x0.clone(), y0, kf.one()]));
                        }
                    }
                }
                // line at infinity z = 0: roots of F(x, 1, 0) plus (1:0:0)
                let mut bxy = MPoly::zero(2);
                for (e, c) in &fe.terms {
                    if e[2] == 0 {
                        bxy.add_term(kf, vec![e[0], e[1]], c.clone());
                    }
                }
                let b_y1 = bivar_partial_eval_y(kf, &bxy, &kf.one());
                if !b_y1.is_zero() && b_y1.degree() >= 1 {
                    for (x0, _m) in b_y1.roots_with_multiplicity(kf) {
                        pts.push(normalize_plane(kf, [x0, kf.one(), kf.zero()]));
                    }
                } else if b_y1.is_zero() {
                    for x0 in kf.elements() {
                        pts.push(normalize_plane(kf, [x0, kf.one(), kf.zero()]));
                    }
                }
                let at100 = fe.eval(kf, &[kf.one(), kf.zero(), kf.zero()]);
                if kf.is_zero(&at100) {
                    pts.push(normalize_plane(kf, [kf.one(), kf.zero(), kf.zero()]));
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// Local expansion data at a smooth affine point: the coordinate
    /// functions of the model expanded in a uniformizer t to the requested
    /// precision.
    pub fn expansion_ctx(
        &self,
        point: &CurvePoint,
        precision: usize,
    ) -> Result<ExpansionCtx, CurveError> {
        let kf = point.field.clone();
        if !self.contains(point) {
            return Err(CurveError::PointNotOnCurve);
        }
        let kind = match (&self.family, &point.coords) {
            (Family::Rational, PointCoords::RatAff(a)) => {
                let x = Series::new(kf.clone(), vec![a.clone(), kf.one()], precision);
                CtxKind::Rational { x }
            }
            (Family::Hyperelliptic { f }, PointCoords::HypAff(a, b)) => {
                let fe = f.embed(&kf);
                if !kf.is_zero(b) {
                    // t = x - a; y = sqrt(f(a+t)) branch through b
                    let x = Series::new(kf.clone(), vec![a.clone(), kf.one()], precision);
                    // F(t, y) = y^2 - f(a + t)
                    let fat = shift_upoly(&kf, &fe, a);
                    let mut big = MPoly::zero(2);
                    big.add_term(&kf, vec![0, 2], kf.one());
                    for (i, c) in fat.coeffs.iter().enumerate() {
                        big.add_term(&kf, vec![i as u32, 0], kf.neg(c));
                    }
                    let y = hensel_root(&kf, &big, b, precision)
                        .map_err(|_| CurveError::SingularPoint)?;
                    CtxKind::Hyp { x, y }
                } else {
                    // Weierstrass point: t = y; x solves f(x) = t^2
                    let y = Series::t(&kf, precision);
                    // F(t, x) = f(x) - t^2  (unknown is the second variable)
                    let mut big = MPoly::zero(2);
                    for (i, c) in fe.coeffs.iter().enumerate() {
                        big.add_term(&kf, vec![0, i as u32], c.clone());
                    }
                    big.add_term(&kf, vec![2, 0], kf.from_i64(-1));
                    let x = hensel_root(&kf, &big, a, precision)
                        .map_err(|_| CurveError::SingularPoint)?;
                    CtxKind::Hyp { x, y }
                }
            }
            (Family::PlaneSmooth { f }, PointCoords::Plane(xyz)) => {
                let fe = f.embed(&kf);
                plane_expansion(&kf, &fe, xyz, precision)?
            }
            _ => {
                return Err(CurveError::NormalizationError(
                    "expansion at the base point at infinity is not allowed".into(),
                ))
            }
        };
        Ok(ExpansionCtx {
            point: point.clone(),
            field: kf,
            precision,
            kind,
        })
    }
}

impl Field {
    fn eq_els(&self, a: &El, b: &El) -> bool {
        self.is_zero(&self.sub(a, b))
    }
}

/// Shift a univariate polynomial: returns f(a + t) as a polynomial in t.
fn shift_upoly(field: &Field, f: &UPoly, a: &El) -> UPoly {
    let shift = UPoly::new(field, vec![a.clone(), field.one()]);
    let mut acc = UPoly::zero();
    for c in f.coeffs.iter().rev() {
        acc = acc
            .mul(field, &shift)
            .add(field, &UPoly::constant(field, c.clone()));
    }
    acc
}

/// Evaluate the first variable of a bivariate polynomial, leaving a
/// univariate polynomial in the second.
fn bivar_partial_eval_x(field: &Field, p: &MPoly, x0: &El) -> UPoly {
    let mut coeffs: Vec<El> = Vec::new();
    for (e, c) in &p.terms {
        let v = field.mul(c, &field.pow(x0, e[0] as u64));
        let d = e[1] as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, field.zero());
        }
        coeffs[d] = field.add(&coeffs[d], &v);
    }
    UPoly::new(field, coeffs)
}

fn bivar_partial_eval_y(field: &Field, p: &MPoly, y0: &El) -> UPoly {
    let mut coeffs: Vec<El> = Vec::new();
    for (e, c) in &p.terms {
        let v = field.mul(c, &field.pow(y0, e[1] as u64));
        let d = e[0] as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, field.zero());
        }
        coeffs[d] = field.add(&coeffs[d], &v);
    }
    UPoly::new(field, coeffs)
}

pub fn normalize_plane(field: &Field, mut xyz: [El; 3]) -> PointCoords {
    let lead = xyz.iter().position(|c| !field.is_zero(c)).expect("nonzero point");
    let inv = field.inv(&xyz[lead]).unwrap();
    for c in xyz.iter_mut() {
        *c = field.mul(c, &inv);
    }
    PointCoords::Plane(xyz)
}

impl CurvePoint {
    pub fn rat_inf(field: &Field) -> Self {
        CurvePoint {
            field: field.clone(),
            coords: PointCoords::RatInf,
        }
    }

    pub fn hyp_inf(field: &Field) -> Self {
        CurvePoint {
            field: field.clone(),
            coords: PointCoords::HypInf,
        }
    }

    pub fn rat_aff(field: &Field, a: El) -> Self {
        CurvePoint {
            field: field.clone(),
            coords: PointCoords::RatAff(a),
        }
    }

    pub fn hyp_aff(field: &Field, a: El, b: El) -> Self {
        CurvePoint {
            field: field.clone(),
            coords: PointCoords::HypAff(a, b),
        }
    }

    pub fn plane(field: &Field, xyz: [El; 3]) -> Self {
        CurvePoint {
            field: field.clone(),
            coords: normalize_plane(field, xyz),
        }
    }

    pub fn is_base_point(&self) -> bool {
        matches!(self.coords, PointCoords::RatInf | PointCoords::HypInf)
    }

    /// Residue degree over the prime field (1 for Q and prime fields).
    pub fn residue_degree(&self) -> usize {
        if !self.field.is_finite() || self.field.ext_degree() == 1 {
            return 1;
        }
        frobenius_orbit_rep(&self.field, &self.coords).0
    }

    /// The hyperelliptic involution (a, b) -> (a, -b); identity elsewhere.
    pub fn hyperelliptic_conjugate(&self) -> Self {
        match &self.coords {
            PointCoords::HypAff(a, b) => CurvePoint {
                field: self.field.clone(),
                coords: PointCoords::HypAff(a.clone(), self.field.neg(b)),
            },
            _ => self.clone(),
        }
    }

    pub fn fmt(&self) -> String {
        let f = &self.field;
        match &self.coords {
            PointCoords::RatInf | PointCoords::HypInf => "Pinf".into(),
            PointCoords::RatAff(a) => format!("({})", f.fmt_el(a)),
            PointCoords::HypAff(a, b) => format!("({},{})", f.fmt_el(a), f.fmt_el(b)),
            PointCoords::Plane([x, y, z]) => {
                format!("({}:{}:{})", f.fmt_el(x), f.fmt_el(y), f.fmt_el(z))
            }
        }
    }
}

/// Frobenius orbit of a point's coordinates: returns (orbit size, minimal
/// representative).
fn frobenius_orbit_rep(field: &Field, coords: &PointCoords) -> (usize, PointCoords) {
    let frob_coords = |c: &PointCoords| -> PointCoords {
        match c {
            PointCoords::RatInf | PointCoords::HypInf => c.clone(),
            PointCoords::RatAff(a) => PointCoords::RatAff(field.frobenius(a)),
            PointCoords::HypAff(a, b) => {
                PointCoords::HypAff(field.frobenius(a), field.frobenius(b))
            }
            PointCoords::Plane([x, y, z]) => PointCoords::Plane([
                field.frobenius(x),
                field.frobenius(y),
                field.frobenius(z),
            ]),
        }
    };
    let mut orbit = vec![coords.clone()];
    let mut cur = frob_coords(coords);
    while &cur != coords {
        orbit.push(cur.clone());
        cur = frob_coords(&cur);
    }
    let rep = orbit.iter().min().unwrap().clone();
    (orbit.len(), rep)
}

/// A divisor in the universal shape m * base - sum of positive conditions.
/// Negative condition multiplicities appear only transiently (divisor
/// differences before a principal shift).
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorSpec {
    pub base_mult: i64,
    pub conditions: Vec<(CurvePoint, i64)>,
}

impl DivisorSpec {
    pub fn of_base(m: i64) -> Self {
        DivisorSpec {
            base_mult: m,
            conditions: vec![],
        }
    }

    pub fn new(base_mult: i64, conditions: Vec<(CurvePoint, i64)>) -> Result<Self, CurveError> {
        for (p, k) in &conditions {
            if p.is_base_point() && *k != 0 {
                return Err(CurveError::NormalizationError(
                    "conditions at the base point must be absorbed into the base multiple".into(),
                ));
            }
        }
        let mut d = DivisorSpec {
            base_mult,
            conditions,
        };
        d.merge();
        Ok(d)
    }

    fn merge(&mut self) {
        let mut merged: Vec<(CurvePoint, i64)> = Vec::new();
        self.conditions
            .sort_by(|a, b| a.0.coords.cmp(&b.0.coords));
        for (p, k) in self.conditions.drain(..) {
            if k == 0 {
                continue;
            }
            if p.is_base_point() {
                // a condition at the base point is just a smaller base multiple
                self.base_mult -= k;
                continue;
            }
            if let Some(last) = merged.last_mut() {
                if last.0.coords == p.coords {
                    last.1 += k;
                    continue;
                }
            }
            merged.push((p, k));
        }
        merged.retain(|(_, k)| *k != 0);
        self.conditions = merged;
    }

    pub fn is_normalized(&self) -> bool {
        self.conditions.iter().all(|(_, k)| *k > 0)
    }

    pub fn degree(&self, model: &CurveModel) -> i64 {
        let base = self.base_mult * model.base_degree();
        let cond: i64 = self
            .conditions
            .iter()
            .map(|(p, k)| k * p.residue_degree() as i64)
            .collect::<Vec<_>>()
            .iter()
            .sum();
        base - cond
    }

    /// self + t * other as divisor classes.
    pub fn combine(&self, other: &DivisorSpec, t: i64) -> DivisorSpec {
        let mut conditions = self.conditions.clone();
        for (p, k) in &other.conditions {
            conditions.push((p.clone(), k * t));
        }
        let mut d = DivisorSpec {
            base_mult: self.base_mult + t * other.base_mult,
            conditions,
        };
        d.merge();
        d
    }

    pub fn add(&self, other: &DivisorSpec) -> DivisorSpec {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &DivisorSpec) -> DivisorSpec {
        self.combine(other, -1)
    }

    pub fn scaled(&self, t: i64) -> DivisorSpec {
        DivisorSpec::of_base(0).combine(self, t)
    }

    pub fn fmt(&self) -> String {
        let mut s = format!("{}*base", self.base_mult);
        for (p, k) in &self.conditions {
            if *k >= 0 {
                s.push_str(&format!(" - {}*{}", k, p.fmt()));
            } else {
                s.push_str(&format!(" + {}*{}", -k, p.fmt()));
            }
        }
        s
    }
}

/// Local expansions of the model's coordinate functions at a point.
#[derive(Debug, Clone)]
pub struct ExpansionCtx {
    pub point: CurvePoint,
    pub field: Field,
    pub precision: usize,
    pub kind: CtxKind,
}

#[derive(Debug, Clone)]
pub enum CtxKind {
    Rational { x: Series },
    Hyp { x: Series, y: Series },
    /// chart = index of the coordinate set to 1; coords holds the series
    /// of all three homogeneous coordinates in that trivialization.
    Plane { chart: usize, coords: [Series; 3] },
}

fn plane_expansion(
    kf: &Field,
    f: &MPoly,
    xyz: &[El; 3],
    precision: usize,
) -> Result<CtxKind, CurveError> {
    // trivialize in the first chart where the point has a nonzero coordinate
    let chart = xyz
        .iter()
        .position(|c| !kf.is_zero(c))
        .ok_or(CurveError::PointNotOnCurve)?;
    let inv = kf.inv(&xyz[chart]).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != chart).collect();
    let (u_idx, v_idx) = (others[0], others[1]);
    let u0 = kf.mul(&xyz[u_idx], &inv);
    let v0 = kf.mul(&xyz[v_idx], &inv);
    // dehomogenized polynomial g(u, v) = F with chart coordinate = 1
    let mut g = MPoly::zero(2);
    for (e, c) in &f.terms {
        g.add_term(kf, vec![e[u_idx], e[v_idx]], c.clone());
    }
    let gu = g.partial(kf, 0);
    let gv = g.partial(kf, 1);
    let du = gu.eval(kf, &[u0.clone(), v0.clone()]);
    let dv = gv.eval(kf, &[u0.clone(), v0.clone()]);
    // uniformizer: the affine coordinate whose *other* partial is nonzero
    let (t_is_u, w0) = if !kf.is_zero(&dv) {
        (true, v0.clone())
    } else if !kf.is_zero(&du) {
        (false, u0.clone())
    } else {
        return Err(CurveError::SingularPoint);
    };
    // build F(t, w): substitute the uniformizer coordinate by (c0 + t)
    let (t0, swap) = if t_is_u { (u0.clone(), false) } else { (v0.clone(), true) };
    let mut big = MPoly::zero(2);
    for (e, c) in &g.terms {
        // expand (t0 + t)^k for the uniformizer variable
        let (kt, kw) = if !swap {
            (e[0], e[1])
        } else {
            (e[1], e[0])
        };
        // binomial expansion of (t0 + t)^kt
        let mut pow = UPoly::constant(kf, kf.one());
        let lin = UPoly::new(kf, vec![t0.clone(), kf.one()]);
        for _ in 0..kt {
            pow = pow.mul(kf, &lin);
        }
        for (i, a) in pow.coeffs.iter().enumerate() {
            big.add_term(kf, vec![i as u32, kw], kf.mul(a, c));
        }
    }
    let w = hensel_root(kf, &big, &w0, precision).map_err(|_| CurveError::SingularPoint)?;
    let t_series = Series::new(kf.clone(), vec![t0, kf.one()], precision);
    let (u_series, v_series) = if !swap {
        (t_series, w)
    } else {
        (w, t_series)
    };
    let mut coords: [Series; 3] = [
        Series::zero(kf, precision),
        Series::zero(kf, precision),
        Series::zero(kf, precision),
    ];
    coords[chart] = Series::constant(kf, kf.one(), precision);
    coords[u_idx] = u_series;
    coords[v_idx] = v_series;
    Ok(CtxKind::Plane { chart, coords })
}

impl ExpansionCtx {
    /// Substitute the coordinate expansions into the defining equation;
    /// used as a self-check.
    pub fn check_on_curve(&self, model: &CurveModel) -> bool {
        let kf = &self.field;
        match (&model.family, &self.kind) {
            (Family::Rational, CtxKind::Rational { .. }) => true,
            (Family::Hyperelliptic { f }, CtxKind::Hyp { x, y }) => {
                let fe = f.embed(kf);
                let fx = eval_upoly_at(kf, &fe, x);
                y.mul(y).sub(&fx).is_zero()
            }
            (Family::PlaneSmooth { f }, CtxKind::Plane { coords, .. }) => {
                let fe = f.embed(kf);
                let mut acc = Series::zero(kf, self.precision);
                for (e, c) in &fe.terms {
                    let mut t = Series::constant(kf, c.clone(), self.precision);
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t = t.mul(&coords[i].pow(k as u64));
                        }
                    }
                    acc = acc.add(&t);
                }
                acc.is_zero()
            }
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Plane smoothness: decide whether F, F_x, F_y, F_z have a common projective
// zero over the algebraic closure, chart by chart, using resultants.
// ---------------------------------------------------------------------------

pub fn plane_is_smooth(field: &Field, f: &MPoly) -> Result<bool, CurveError> {
    // Affine chart z = 1: singular points there are common zeros of
    // (g, g_u, g_v) for g = F(x, y, 1).
    let g = f.dehomogenize(field, 2);
    let sing_affine = affine_common_zero(
        field,
        vec![g.clone(), g.partial(field, 0), g.partial(field, 1)],
    )?;
    if sing_affine {
        return Ok(false);
    }
    // Line at infinity z = 0: binary forms F, F_x, F_y, F_z restricted.
    let mut restricted: Vec<MPoly> = Vec::new();
    for p in [
        f.clone(),
        f.partial(field, 0),
        f.partial(field, 1),
        f.partial(field, 2),
    ] {
        let mut b = MPoly::zero(2);
        for (e, c) in &p.terms {
            if e[2] == 0 {
                b.add_term(field, vec![e[0], e[1]], c.clone());
            }
        }
        restricted.push(b);
    }
    // common zero of binary forms <=> nonconstant gcd of the y=1
    // dehomogenizations AND consistency at (1:0:0)
    let mut g1 = UPoly::zero();
    for b in &restricted {
        g1 = g1.gcd(field, &bivar_partial_eval_y(field, b, &field.one()));
    }
    if g1.degree() >= 1 {
        return Ok(false);
    }
    // the point (1:0:0): all restricted forms must not vanish simultaneously
    let at100: Vec<El> = restricted
        .iter()
        .map(|b| b.eval(field, &[field.one(), field.zero()]))
        .collect();
    if at100.iter().all(|v| field.is_zero(v)) {
        return Ok(false);
    }
    Ok(true)
}

/// Decide whether a system of bivariate polynomials has a common zero over
/// the algebraic closure. Deterministic: gcd splitting plus a sheared
/// resultant test with a pigeonhole bound on bad shear values.
fn affine_common_zero(field: &Field, polys: Vec<MPoly>) -> Result<bool, CurveError> {
    let mut polys: Vec<MPoly> = polys.into_iter().filter(|p| !p.is_zero()).collect();
    if polys.is_empty() {
        return Ok(true);
    }
    if polys.iter().any(|p| p.total_degree() == 0) {
        return Ok(false);
    }
    if polys.len() == 1 {
        // a nonconstant bivariate polynomial always vanishes somewhere
        // over the algebraic closure
        return Ok(true);
    }
    polys.sort_by_key(|p| p.total_degree());
    // split off common factors with the smallest polynomial
    let a = BiPoly::from_mpoly(field, &polys[0]);
    for i in 1..polys.len() {
        let b = BiPoly::from_mpoly(field, &polys[i]);
        let g = a.gcd(field, &b);
        if !g.is_constant(field) {
            let gm = g.to_mpoly(field);
            let aq = polys[0].div_exact(field, &gm).expect("gcd divides");
            let bq = polys[i].div_exact(field, &gm).expect("gcd divides");
            // V(polys) = V(gcd, others) U V(a/g, b/g, others)
            let mut with_g: Vec<MPoly> = vec![gm];
            let mut without: Vec<MPoly> = vec![aq, bq];
            for (j, p) in polys.iter().enumerate() {
                if j != 0 && j != i {
                    with_g.push(p.clone());
                    without.push(p.clone());
                }
            }
            return Ok(affine_common_zero(field, with_g)?
                || affine_common_zero(field, without)?);
        }
    }
    // now polys[0] is coprime to every other polynomial
    sheared_common_zero(field, &polys)
}

/// All polys pairwise coprime with polys[0]; decide common-zero emptiness
/// by shearing x -> x + t*y and intersecting univariate resultants.
fn sheared_common_zero(field: &Field, polys: &[MPoly]) -> Result<bool, CurveError> {
    let da = polys[0].total_degree();
    let pair_bound: i64 = polys[1..]
        .iter()
        .map(|p| da * p.total_degree())
        .sum::<i64>()
        * (da * polys[1].total_degree());
    let needed = (pair_bound.max(1) as usize) + 1;
    let mut good = 0usize;
    let mut lambda_iter = LambdaIter::new(field);
    let mut tried = 0usize;
    loop {
        let Some((lf, lam)) = lambda_iter.next_lambda() else {
            return Err(CurveError::BadModel(
                "smoothness check ran out of shear values".into(),
            ));
        };
        tried += 1;
        if tried > needed * 4 + 64 {
            return Err(CurveError::BadModel(
                "smoothness check exceeded its shear budget".into(),
            ));
        }
        // shear in the (possibly extended) field lf
        let m = vec![
            vec![lf.one(), lam.clone()],
            vec![lf.zero(), lf.one()],
        ];
        let sheared: Vec<BiPoly> = polys
            .iter()
            .map(|p| BiPoly::from_mpoly(&lf, &p.embed(&lf).linear_change(&lf, &m)))
            .collect();
        // require leading y-coefficients to be nonzero constants
        let ok = sheared.iter().zip(polys).all(|(s, orig)| {
            s.deg_y() == orig.total_degree() && s.yco.last().map_or(false, |c| c.degree() == 0)
        });
        if !ok {
            continue;
        }
        let r0 = sheared[0].resultant_y(&lf, &sheared[1]);
        assert!(!r0.is_zero(), "coprime polynomials have nonzero resultant");
        let mut g = r0;
        for s in &sheared[2..] {
            let ri = sheared[0].resultant_y(&lf, s);
            assert!(!ri.is_zero());
            g = g.gcd(&lf, &ri);
        }
        if g.degree() <= 0 {
            return Ok(false);
        }
        if polys.len() == 2 {
            // for a coprime pair the resultant test is exact
            return Ok(true);
        }
        good += 1;
        if good >= needed {
            return Ok(true);
        }
    }
}

/// Iterator over shear values: base field elements first, then elements of
/// growing extensions (finite base fields only).
struct LambdaIter {
    base: Field,
    current: Field,
    queue: Vec<El>,
    next_int: i64,
    ext_deg: usize,
}

impl LambdaIter {
    fn new(field: &Field) -> Self {
        let queue = if field.is_finite() {
            let mut q = field.elements();
            q.reverse();
            q
        } else {
            vec![]
        };
        LambdaIter {
            base: field.clone(),
            current: field.clone(),
            queue,
            next_int: 0,
            ext_deg: 1,
        }
    }

    fn next_lambda(&mut self) -> Option<(Field, El)> {
        match &self.base {
            Field::Rationals => {
                let v = self.base.from_i64(self.next_int);
                self.next_int += 1;
                Some((self.base.clone(), v))
            }
            Field::Prime(p) => {
                if let Some(v) = self.queue.pop() {
                    return Some((self.current.clone(), v));
                }
                if self.ext_deg >= 6 {
                    return None;
                }
                self.ext_deg += 1;
                self.current = Field::extension_of_degree(*p, self.ext_deg).ok()?;
                let mut q = self.current.elements();
                q.reverse();
                self.queue = q;
                self.queue.pop().map(|v| (self.current.clone(), v))
            }
            Field::Ext { .. } => None,
        }
    }
}

impl MPoly {
    /// Exact multivariate division; returns None if not divisible.
    pub fn div_exact(&self, field: &Field, g: &MPoly) -> Option<MPoly> {
        assert_eq!(self.nvars, g.nvars);
        let mut rem = self.clone();
        let mut quo = MPoly::zero(self.nvars);
        let (ge, gc) = g.terms.iter().next_back()?;
        while !rem.is_zero() {
            let (re, rc) = rem.terms.iter().next_back().unwrap();
            let re = re.clone();
            let rc = rc.clone();
            if re.iter().zip(ge).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Vec<u32> = re.iter().zip(ge).map(|(a, b)| a - b).collect();
            let qc = field.div(&rc, gc).ok()?;
            quo.add_term(field, qe.clone(), qc.clone());
            // rem -= qc * x^qe * g
            for (e, c) in &g.terms {
                let te: Vec<u32> = e.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(field, te, field.neg(&field.mul(c, &qc)));
            }
        }
        Some(quo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn klein(field: &Field) -> MPoly {
        // x^3 y + y^3 z + z^3 x
        let mut f = MPoly::zero(3);
        f.add_term(field, vec![3, 1, 0], field.one());
        f.add_term(field, vec![0, 3, 1], field.one());
        f.add_term(field, vec![1, 0, 3], field.one());
        f
    }

    #[test]
    fn genus_values() {
        let f = q();
        assert_eq!(CurveModel::rational(f.clone()).genus(), 0);
        let h = CurveModel::hyperelliptic(f.clone(), UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1]))
            .unwrap();
        assert_eq!(h.genus(), 2);
        let k = CurveModel::plane_smooth_normalized(f.clone(), klein(&f)).unwrap();
        assert_eq!(k.genus(), 3);
    }

    #[test]
    fn canonical_divisors() {
        let f = q();
        let h = CurveModel::hyperelliptic(f.clone(), UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1]))
            .unwrap();
        assert_eq!(h.canonical_divisor().base_mult, 2);
        let r = CurveModel::rational(f.clone());
        assert_eq!(r.canonical_divisor().base_mult, -2);
        let k = CurveModel::plane_smooth_normalized(f.clone(), klein(&f)).unwrap();
        assert_eq!(k.canonical_divisor().base_mult, 1);
    }

    #[test]
    fn smoothness_rejects_nodal_cubic() {
        let f = q();
        // y^2 z - x^2 (x + z): nodal cubic, singular at (0:0:1)
        let mut nodal = MPoly::zero(3);
        nodal.add_term(&f, vec![0, 2, 1], f.one());
        nodal.add_term(&f, vec![3, 0, 0], f.from_i64(-1));
        nodal.add_term(&f, vec![2, 0, 1], f.from_i64(-1));
        assert!(!plane_is_smooth(&f, &nodal).unwrap());
        // Fermat quartic is smooth
        let mut fermat = MPoly::zero(3);
        fermat.add_term(&f, vec![4, 0, 0], f.one());
        fermat.add_term(&f, vec![0, 4, 0], f.one());
        fermat.add_term(&f, vec![0, 0, 4], f.one());
        assert!(plane_is_smooth(&f, &fermat).unwrap());
        assert!(plane_is_smooth(&f, &klein(&f)).unwrap());
    }

    #[test]
    fn hyperelliptic_rejects_non_squarefree() {
        let f = q();
        // f = x^3 (x - 1)^2 ... degree 5, not squarefree: x^5 - 2x^4 + x^3
        let bad = UPoly::from_i64(&f, &[0, 0, 0, 1, -2, 1]);
        assert!(CurveModel::hyperelliptic(f.clone(), bad).is_err());
    }

    #[test]
    fn rational_points_over_f5() {
        let f = Field::prime(5).unwrap();
        let c = CurveModel::rational(f);
        let pts = c.enumerate_closed_points(1).unwrap();
        assert_eq!(pts.len(), 6); // |P^1(F_5)|
    }

    #[test]
    fn hyperelliptic_points_over_f11_match_exhaustive() {
        let f = Field::prime(11).unwrap();
        let fx = UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1]);
        let c = CurveModel::hyperelliptic(f.clone(), fx.clone()).unwrap();
        let pts = c.enumerate_closed_points(1).unwrap();
        // exhaustive count over F_11^2
        let mut count = 0;
        for a in 0..11i64 {
            for b in 0..11i64 {
                let av = f.from_i64(a);
                let bv = f.from_i64(b);
                if f.is_zero(&f.sub(&f.mul(&bv, &bv), &fx.eval(&f, &av))) {
                    count += 1;
                }
            }
        }
        assert_eq!(pts.len(), count + 1); // affine + Pinf
        // Hasse-Weil: |#C(F_p) - (p+1)| <= 2 g sqrt(p)
        let n = pts.len() as f64;
        assert!((n - 12.0).abs() <= 2.0 * 2.0 * (11.0f64).sqrt() + 1e-9);
    }

    #[test]
    fn klein_coordinate_points_over_f11() {
        let f = Field::prime(11).unwrap();
        let c = CurveModel::plane_smooth_normalized(f.clone(), klein(&f)).unwrap();
        let pts = c.enumerate_closed_points(1).unwrap();
        for target in [
            [f.one(), f.zero(), f.zero()],
            [f.zero(), f.one(), f.zero()],
            [f.zero(), f.zero(), f.one()],
        ] {
            let p = CurvePoint::plane(&f, target);
            assert!(pts.iter().any(|q2| q2.coords == p.coords), "missing {}", p.fmt());
        }
        let g = c.genus() as f64;
        let n = pts.len() as f64;
        assert!((n - 12.0).abs() <= 2.0 * g * (11.0f64).sqrt() + 1e-9);
    }

    #[test]
    fn closed_points_degree_two() {
        let f = Field::prime(5).unwrap();
        let c = CurveModel::rational(f);
        let pts = c.enumerate_closed_points(2).unwrap();
        // P^1: 6 rational + (25-5)/2 = 10 closed points of degree 2
        assert_eq!(pts.len(), 16);
        assert_eq!(
            pts.iter().filter(|p| p.residue_degree() == 2).count(),
            10
        );
    }

    #[test]
    fn weierstrass_expansion() {
        // Hyperelliptic(x^5 - 1) at (1, 0): t = y, x(t) = 1 + t^2/5 + O(t^3)
        let f = q();
        let c =
            CurveModel::hyperelliptic(f.clone(), UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1])).unwrap();
        let p = CurvePoint::hyp_aff(&f, f.one(), f.zero());
        let ctx = c.expansion_ctx(&p, 3).unwrap();
        assert!(ctx.check_on_curve(&c));
        if let CtxKind::Hyp { x, y } = &ctx.kind {
            assert_eq!(y, &Series::t(&f, 3));
            assert_eq!(x.coeffs[0], f.one());
            assert_eq!(x.coeffs[1], f.zero());
            assert_eq!(x.coeffs[2], f.from_ratio(1, 5));
        } else {
            panic!("wrong ctx kind");
        }
    }

    #[test]
    fn expansion_over_f13_at_0_5() {
        let f = Field::prime(13).unwrap();
        let c =
            CurveModel::hyperelliptic(f.clone(), UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1])).unwrap();
        let p = CurvePoint::hyp_aff(&f, f.zero(), f.from_i64(5));
        assert!(c.contains(&p));
        let ctx = c.expansion_ctx(&p, 4).unwrap();
        assert!(ctx.check_on_curve(&c));
        if let CtxKind::Hyp { y, .. } = &ctx.kind {
            assert_eq!(y.coeffs[0], f.from_i64(5));
        } else {
            panic!("wrong ctx kind");
        }
    }

    #[test]
    fn klein_expansion_at_100() {
        let f = q();
        let c = CurveModel::plane_smooth_normalized(f.clone(), klein(&f)).unwrap();
        let p = CurvePoint::plane(&f, [f.one(), f.zero(), f.zero()]);
        let ctx = c.expansion_ctx(&p, 5).unwrap();
        assert!(ctx.check_on_curve(&c));
    }

    #[test]
    fn divisor_degree_and_normalization() {
        let f = q();
        let c =
            CurveModel::hyperelliptic(f.clone(), UPoly::from_i64(&f, &[-1, 0, 0, 0, 0, 1])).unwrap();
        let p = CurvePoint::hyp_aff(&f, f.one(), f.zero());
        let d = DivisorSpec::new(4, vec![(p, 1)]).unwrap();
        assert_eq!(d.degree(&c), 3);
        // conditions at Pinf rejected
        assert!(DivisorSpec::new(1, vec![(CurvePoint::hyp_inf(&f), 1)]).is_err());
    }
}

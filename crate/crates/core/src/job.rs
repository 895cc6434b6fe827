//! Job files: key-value blocks describing a curve, a field, and divisor
//! expressions, parsed with positioned diagnostics.
//!
//! ```text
//! # genus-2 exceptional case
//! family = hyperelliptic
//! f = "x^5 - 1"
//! field = Q
//! B = "0*Pinf"
//! L = "4*Pinf"
//! format = text
//! ```
//!
//! Divisor grammar: `m*Base - k1*(pt1) - k2*(pt2) ...` with Base `Pinf`
//! (rational/hyperelliptic) or `H` (plane); points are `(a)`, `(a,b)`,
//! `(a:b:c)`, or `[ext: e, coord, ...]` with coordinates written as
//! polynomials in `t` over the prime field.

use crate::curve::{CurveError, CurveModel, CurvePoint, DivisorSpec, Family};
use crate::field::{El, Field};
use crate::poly::{MPoly, UPoly};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub model: CurveModel,
    pub b: DivisorSpec,
    pub l: Option<DivisorSpec>,
    pub format: OutputFormat,
    /// the raw strings, echoed in reports
    pub curve_desc: String,
    pub field_desc: String,
    pub b_desc: String,
    pub l_desc: String,
}

// ---------------------------------------------------------------------------
// tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct PTok {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<PTok>, JobError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n: i64 = text.parse().map_err(|_| JobError::Syntax {
                line,
                col,
                msg: format!("number out of range: {text}"),
            })?;
            out.push(PTok {
                tok: Tok::Num(n),
                line,
                col,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(PTok {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else if "+-*^()[]:,/;".contains(c) {
            out.push(PTok {
                tok: Tok::Sym(c),
                line,
                col,
            });
            i += 1;
        } else {
            return Err(JobError::Syntax {
                line,
                col,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// polynomial expressions
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [PTok],
    pos: usize,
    line: usize,
    field: Field,
    vars: Vec<&'static str>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err(&self, msg: impl Into<String>) -> JobError {
        let (line, col) = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((self.line, 1));
        JobError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), JobError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<MPoly, JobError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_sym('+') {
                let t = self.term()?;
                acc = acc.add(&self.field, &t);
            } else if self.eat_sym('-') {
                let t = self.term()?;
                acc = acc.sub(&self.field, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<MPoly, JobError> {
        let mut acc = self.factor()?;
        while self.eat_sym('*') {
            let f = self.factor()?;
            acc = acc.mul(&self.field, &f);
        }
        Ok(acc)
    }

    // factor := atom ('^' num)?
    fn factor(&mut self) -> Result<MPoly, JobError> {
        let base = self.atom()?;
        if self.eat_sym('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n >= 0 => {
                    self.pos += 1;
                    let mut acc = MPoly::constant(&self.field, base.nvars, self.field.one());
                    for _ in 0..n {
                        acc = acc.mul(&self.field, &base);
                    }
                    Ok(acc)
                }
                _ => Err(self.err("expected a nonnegative exponent after '^'")),
            }
        } else {
            Ok(base)
        }
    }

    // atom := num ('/' num)? | var | '(' expr ')' | '-' factor
    fn atom(&mut self) -> Result<MPoly, JobError> {
        let nv = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.eat_sym('/') {
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if d != 0 => {
                            self.pos += 1;
                            Ok(MPoly::constant(&self.field, nv, self.field.from_ratio(n, d)))
                        }
                        _ => Err(self.err("expected a nonzero denominator")),
                    }
                } else {
                    Ok(MPoly::constant(&self.field, nv, self.field.from_i64(n)))
                }
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    Ok(MPoly::var(&self.field, nv, i))
                } else {
                    Err(self.err(format!(
                        "unknown variable '{name}' (expected one of {:?})",
                        self.vars
                    )))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(f.neg(&self.field))
            }
            _ => Err(self.err("expected a number, variable, or '('")),
        }
    }
}

fn parse_poly(
    s: &str,
    line: usize,
    field: &Field,
    vars: Vec<&'static str>,
) -> Result<MPoly, JobError> {
    let toks = tokenize(s, line)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line,
        field: field.clone(),
        vars,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input after polynomial"));
    }
    Ok(e)
}

fn mpoly_to_upoly(p: &MPoly, field: &Field) -> UPoly {
    let mut coeffs: Vec<El> = Vec::new();
    for (e, c) in &p.terms {
        let d = e[0] as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, field.zero());
        }
        coeffs[d] = field.add(&coeffs[d], c);
    }
    UPoly::new(field, coeffs)
}

// ---------------------------------------------------------------------------
// divisors and points
// ---------------------------------------------------------------------------

/// A scalar: integer or integer ratio, parsed from tokens.
fn parse_scalar(p: &mut Parser) -> Result<El, JobError> {
    let neg = p.eat_sym('-');
    match p.peek().cloned() {
        Some(Tok::Num(n)) => {
            p.pos += 1;
            let n = if neg { -n } else { n };
            if p.eat_sym('/') {
                match p.peek().cloned() {
                    Some(Tok::Num(d)) if d != 0 => {
                        p.pos += 1;
                        Ok(p.field.from_ratio(n, d))
                    }
                    _ => Err(p.err("expected a nonzero denominator")),
                }
            } else {
                Ok(p.field.from_i64(n))
            }
        }
        _ => Err(p.err("expected a number")),
    }
}

fn parse_point(p: &mut Parser, model: &CurveModel) -> Result<CurvePoint, JobError> {
    let base_field = model.field.clone();
    if p.eat_sym('(') {
        let a = parse_scalar(p)?;
        if p.eat_sym(')') {
            // (a): a point of the projective line
            if !matches!(model.family, Family::Rational) {
                return Err(p.err("single-coordinate points only exist on rational models"));
            }
            return Ok(CurvePoint::rat_aff(&base_field, a));
        }
        if p.eat_sym(',') {
            let b = parse_scalar(p)?;
            p.expect_sym(')')?;
            if !matches!(model.family, Family::Hyperelliptic { .. }) {
                return Err(p.err("(a,b) points only exist on hyperelliptic models"));
            }
            return Ok(CurvePoint::hyp_aff(&base_field, a, b));
        }
        if p.eat_sym(':') {
            let b = parse_scalar(p)?;
            p.expect_sym(':')?;
            let c = parse_scalar(p)?;
            p.expect_sym(')')?;
            if !matches!(model.family, Family::PlaneSmooth { .. }) {
                return Err(p.err("(a:b:c) points only exist on plane models"));
            }
            if base_field.is_zero(&a) && base_field.is_zero(&b) && base_field.is_zero(&c) {
                return Err(p.err("(0:0:0) is not a projective point"));
            }
            return Ok(CurvePoint::plane(&base_field, [a, b, c]));
        }
        return Err(p.err("expected ')', ',' or ':' in point"));
    }
    if p.eat_sym('[') {
        // [ext: e, coord, ...] with coords as polynomials in t
        match p.peek().cloned() {
            Some(Tok::Ident(w)) if w == "ext" => {
                p.pos += 1;
            }
            _ => return Err(p.err("expected 'ext' after '['")),
        }
        p.expect_sym(':')?;
        let e = match p.peek().cloned() {
            Some(Tok::Num(n)) if n >= 2 && n <= 4 => {
                p.pos += 1;
                n as usize
            }
            _ => return Err(p.err("expected extension degree 2..4")),
        };
        let prime = match base_field {
            Field::Prime(q) => q,
            _ => return Err(p.err("extension points need a prime base field")),
        };
        let ext = Field::extension_of_degree(prime, e)
            .map_err(|err| p.err(format!("cannot build F_p^{e}: {err}")))?;
        let mut coords: Vec<El> = Vec::new();
        while p.eat_sym(',') {
            // sub-parser over the same tokens with var t and the extension
            // field's prime subfield coefficients
            let start = p.pos;
            // scan to the next ',' or ']'
            let mut depth = 0;
            let mut end = p.pos;
            while end < p.toks.len() {
                match &p.toks[end].tok {
                    Tok::Sym('(') | Tok::Sym('[') => depth += 1,
                    Tok::Sym(')') | Tok::Sym(']') if depth > 0 => depth -= 1,
                    Tok::Sym(',') | Tok::Sym(']') if depth == 0 => break,
                    _ => {}
                }
                end += 1;
            }
            let mut sub = Parser {
                toks: &p.toks[start..end],
                pos: 0,
                line: p.line,
                field: Field::Prime(prime),
                vars: vec!["t"],
            };
            let poly = sub.expr()?;
            if sub.pos != sub.toks.len() {
                return Err(sub.err("trailing input in extension coordinate"));
            }
            // evaluate the coordinate: its coefficient vector IS the
            // extension element in the power basis of t
            let up = mpoly_to_upoly(&poly, &Field::Prime(prime));
            let mut vec_coords = vec![0u64; e];
            for (i, c) in up.coeffs.iter().enumerate() {
                if i >= e {
                    return Err(p.err(format!(
                        "coordinate degree exceeds extension degree {e}; reduce mod t"
                    )));
                }
                if let El::F(v) = c {
                    vec_coords[i] = *v;
                }
            }
            coords.push(El::E(vec_coords));
            p.pos = end;
        }
        p.expect_sym(']')?;
        let point = match (&model.family, coords.len()) {
            (Family::Rational, 1) => CurvePoint::rat_aff(&ext, coords[0].clone()),
            (Family::Hyperelliptic { .. }, 2) => {
                CurvePoint::hyp_aff(&ext, coords[0].clone(), coords[1].clone())
            }
            (Family::PlaneSmooth { .. }, 3) => CurvePoint::plane(
                &ext,
                [coords[0].clone(), coords[1].clone(), coords[2].clone()],
            ),
            _ => {
                return Err(p.err(format!(
                    "wrong number of coordinates ({}) for this family",
                    coords.len()
                )))
            }
        };
        return Ok(point);
    }
    Err(p.err("expected a point: (a), (a,b), (a:b:c), or [ext: ...]"))
}

/// Divisor grammar: `m*Base` followed by `- k*(point)` conditions (or
/// `+ k*(point)` for explicitly non-normalized specs).
pub fn parse_divisor(
    s: &str,
    line: usize,
    model: &CurveModel,
) -> Result<DivisorSpec, JobError> {
    let toks = tokenize(s, line)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line,
        field: model.field.clone(),
        vars: vec![],
    };
    let expected_base = match model.family {
        Family::PlaneSmooth { .. } => "H",
        _ => "Pinf",
    };
    // leading multiple
    let neg = p.eat_sym('-');
    let m = match p.peek().cloned() {
        Some(Tok::Num(n)) => {
            p.pos += 1;
            if neg {
                -n
            } else {
                n
            }
        }
        _ => return Err(p.err("divisor must start with an integer base multiple")),
    };
    p.expect_sym('*')?;
    match p.peek().cloned() {
        Some(Tok::Ident(name)) if name == expected_base => {
            p.pos += 1;
        }
        Some(Tok::Ident(name)) => {
            return Err(p.err(format!(
                "base '{name}' does not match this family (expected {expected_base})"
            )))
        }
        _ => return Err(p.err(format!("expected base symbol {expected_base}"))),
    }
    let mut conditions: Vec<(CurvePoint, i64)> = Vec::new();
    loop {
        let sign = if p.eat_sym('-') {
            1i64
        } else if p.eat_sym('+') {
            -1i64
        } else if p.pos == toks.len() {
            break;
        } else {
            return Err(p.err("expected '-', '+', or end of divisor"));
        };
        let k = match p.peek().cloned() {
            Some(Tok::Num(n)) if n > 0 => {
                p.pos += 1;
                n
            }
            _ => return Err(p.err("expected a positive multiplicity")),
        };
        p.expect_sym('*')?;
        let pt = parse_point(&mut p, model)?;
        if !model.contains(&pt) {
            return Err(JobError::Semantic {
                line,
                msg: format!("point {} is not on the curve", pt.fmt()),
            });
        }
        conditions.push((pt, sign * k));
    }
    if conditions.iter().all(|(_, k)| *k > 0) {
        Ok(DivisorSpec::new(m, conditions)?)
    } else {
        // mixed-sign specs stay as-is (merged); callers normalize via shift
        let d = DivisorSpec {
            base_mult: m,
            conditions,
        };
        Ok(d.combine(&DivisorSpec::of_base(0), 1))
    }
}

// ---------------------------------------------------------------------------
// job files
// ---------------------------------------------------------------------------

fn parse_field(s: &str, line: usize) -> Result<Field, JobError> {
    let s = s.trim();
    if s == "Q" {
        return Ok(Field::rationals());
    }
    if let Some(rest) = s.strip_prefix("Fp:") {
        let p: u64 = rest.trim().parse().map_err(|_| JobError::Semantic {
            line,
            msg: format!("bad prime '{rest}'"),
        })?;
        return Field::prime(p).map_err(|e| JobError::Semantic {
            line,
            msg: e.to_string(),
        });
    }
    Err(JobError::Semantic {
        line,
        msg: format!("unknown field '{s}' (expected Q or Fp:<prime>)"),
    })
}

pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    parse_job_with_field(text, None)
}

/// Parse a job, optionally overriding the file's `field` line (the CLI's
/// `--field` flag).
pub fn parse_job_with_field(
    text: &str,
    field_override: Option<Field>,
) -> Result<JobSpec, JobError> {
    let mut kv: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let Some(eq) = s.find('=') else {
            return Err(JobError::Syntax {
                line,
                col: 1,
                msg: "expected 'key = value'".into(),
            });
        };
        let key = s[..eq].trim().to_string();
        let mut val = s[eq + 1..].trim().to_string();
        if val.starts_with('"') && val.ends_with('"') && val.len() >= 2 {
            val = val[1..val.len() - 1].to_string();
        }
        kv.push((key, val, line));
    }
    let get = |k: &str| kv.iter().find(|(key, _, _)| key == k);
    let (field, field_desc) = match field_override {
        Some(f) => {
            let desc = match &f {
                Field::Rationals => "Q".to_string(),
                Field::Prime(p) => format!("Fp:{p}"),
                Field::Ext { p, minpoly } => format!("Fp:{p}^{}", minpoly.len() - 1),
            };
            (f, desc)
        }
        None => {
            let field_entry = get("field").ok_or(JobError::Semantic {
                line: 0,
                msg: "missing 'field' (and no --field override)".into(),
            })?;
            (
                parse_field(&field_entry.1, field_entry.2)?,
                field_entry.1.clone(),
            )
        }
    };
    let family_entry = get("family").ok_or(JobError::Semantic {
        line: 0,
        msg: "missing 'family'".into(),
    })?;
    let (model, curve_desc) = match family_entry.1.as_str() {
        "rational" => (CurveModel::rational(field.clone()), "rational".to_string()),
        "hyperelliptic" => {
            let fe = get("f").ok_or(JobError::Semantic {
                line: family_entry.2,
                msg: "hyperelliptic family needs key 'f'".into(),
            })?;
            let poly = parse_poly(&fe.1, fe.2, &field, vec!["x"])?;
            let up = mpoly_to_upoly(&poly, &field);
            let m = CurveModel::hyperelliptic(field.clone(), up).map_err(|e| {
                JobError::Semantic {
                    line: fe.2,
                    msg: e.to_string(),
                }
            })?;
            (m, format!("hyperelliptic y^2 = {}", fe.1))
        }
        "plane" => {
            let fe = get("F").ok_or(JobError::Semantic {
                line: family_entry.2,
                msg: "plane family needs key 'F'".into(),
            })?;
            let poly = parse_poly(&fe.1, fe.2, &field, vec!["x", "y", "z"])?;
            let m = CurveModel::plane_smooth_normalized(field.clone(), poly).map_err(|e| {
                JobError::Semantic {
                    line: fe.2,
                    msg: e.to_string(),
                }
            })?;
            (m, format!("plane {} = 0", fe.1))
        }
        other => {
            return Err(JobError::Semantic {
                line: family_entry.2,
                msg: format!("unknown family '{other}'"),
            })
        }
    };
    let default_base = match model.family {
        Family::PlaneSmooth { .. } => "0*H",
        _ => "0*Pinf",
    };
    let (b, b_desc) = match get("B") {
        Some((_, v, line)) => (parse_divisor(v, *line, &model)?, v.clone()),
        None => (DivisorSpec::of_base(0), default_base.to_string()),
    };
    let (l, l_desc) = match get("L") {
        Some((_, v, line)) => (Some(parse_divisor(v, *line, &model)?), v.clone()),
        None => (None, String::new()),
    };
    let format = match get("format") {
        Some((_, v, line)) => match v.as_str() {
            "text" => OutputFormat::Text,
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => {
                return Err(JobError::Semantic {
                    line: *line,
                    msg: format!("unknown format '{other}'"),
                })
            }
        },
        None => OutputFormat::Text,
    };
    Ok(JobSpec {
        model,
        b,
        l,
        format,
        curve_desc,
        field_desc,
        b_desc,
        l_desc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_hyperelliptic_job() {
        let job = parse_job(
            "family = hyperelliptic\nf = \"x^5 - 1\"\nfield = Q\nL = \"4*Pinf\"\n",
        )
        .unwrap();
        assert_eq!(job.model.genus(), 2);
        assert_eq!(job.l.unwrap().base_mult, 4);
        assert_eq!(job.b.base_mult, 0);
    }

    #[test]
    fn parse_plane_job() {
        let job = parse_job(
            "family = plane\nF = \"x^3*y + y^3*z + z^3*x\"\nfield = Q\nL = \"2*H\"\nformat = json\n",
        )
        .unwrap();
        assert_eq!(job.model.genus(), 3);
        assert_eq!(job.format, OutputFormat::Json);
    }

    #[test]
    fn point_not_on_curve_is_semantic_error() {
        let err = parse_job(
            "family = plane\nF = \"x^3*y + y^3*z + z^3*x\"\nfield = Q\nL = \"2*H - 1*(1:1:1)\"\n",
        )
        .unwrap_err();
        match err {
            JobError::Semantic { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("not on the curve"), "{msg}");
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn parse_divisor_with_conditions() {
        let f = Field::rationals();
        let mut fp = MPoly::zero(3);
        fp.add_term(&f, vec![3, 1, 0], f.one());
        fp.add_term(&f, vec![0, 3, 1], f.one());
        fp.add_term(&f, vec![1, 0, 3], f.one());
        let k = CurveModel::plane_smooth(f, fp).unwrap();
        let d = parse_divisor("3*H - 1*(1:0:0) - 1*(0:1:0) - 1*(0:0:1)", 1, &k).unwrap();
        assert_eq!(d.base_mult, 3);
        assert_eq!(d.conditions.len(), 3);
        assert_eq!(d.degree(&k), 9);
    }

    #[test]
    fn parse_extension_point() {
        let f = Field::prime(11).unwrap();
        let c = CurveModel::hyperelliptic(
            f.clone(),
            UPoly::from_i64(&f, &[0, -1, 0, 0, 0, 0, 0, 1]),
        )
        .unwrap();
        let pts = c.enumerate_closed_points(2).unwrap();
        let p2 = pts.iter().find(|p| p.residue_degree() == 2).unwrap();
        // reconstruct the same point through the job grammar
        use crate::curve::PointCoords;
        if let PointCoords::HypAff(El::E(a), El::E(b)) = &p2.coords {
            let fmt_el = |v: &Vec<u64>| -> String {
                let mut parts = Vec::new();
                for (i, c) in v.iter().enumerate() {
                    match i {
                        0 => parts.push(format!("{c}")),
                        1 => parts.push(format!("{c}*t")),
                        _ => parts.push(format!("{c}*t^{i}")),
                    }
                }
                parts.join(" + ")
            };
            let s = format!("8*Pinf - 1*[ext: 2, {}, {}]", fmt_el(a), fmt_el(b));
            let d = parse_divisor(&s, 1, &c).unwrap();
            assert_eq!(d.degree(&c), 6);
            assert_eq!(d.conditions[0].0.coords, p2.coords);
        } else {
            panic!("expected an extension point");
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_job("family = hyperelliptic\nf = \"x^5 $ 1\"\nfield = Q\n").unwrap_err();
        match err {
            JobError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}

//! The model-definition language (`.dgm`), morphism files (`.dgmap`),
//! JSON ingestion and preset models.
//!
//! ```text
//! # CP^2
//! model cp2 {
//!   basis: 1:0, h:2, h2:4;
//!   unit: 1;
//!   diff: ;
//!   mult: h*h = h2;
//! }
//! ```
//!
//! Expressions are rational combinations such as `2 a - 1/2 b`, `3*c` or
//! `0`; a bare number denotes that multiple of the unit. Products that are
//! not listed are zero, except products with the unit. Differentials that
//! are not listed are zero.

mod lexer;
mod preset;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_combination, Carrier, DGAlgebra, GradedBasis};
use crate::error::{Error, Result};
use crate::element::{Space, TwistedElement};
use crate::linalg::SparseVec;
use crate::loops::AlgebraMorphism;
use crate::scalar::{self, Scalar};
use crate::words::{Generators, Word};
use lexer::{Cursor, Tok};

pub use preset::{preset, PRESET_NAMES};

type Pos = (usize, usize);

/// `Σ c·name`; `None` stands for the unit.
#[derive(Clone, Debug)]
struct Expr {
    terms: Vec<(Scalar, Option<(String, Pos)>)>,
}

fn parse_coeff(cur: &mut Cursor) -> Result<Option<Scalar>> {
    let Some(Tok::Number(n)) = cur.peek().cloned() else { return Ok(None) };
    // A number followed by `->`, `=` etc. is still a coefficient here; the
    // caller decides whether a name follows.
    cur.next();
    let mut q = scalar::parse(&n)?;
    if cur.eat("/") {
        match cur.next() {
            Some(Tok::Number(d)) => q = scalar::parse(&format!("{n}/{d}"))?,
            _ => return cur.error("expected denominator"),
        }
    }
    Ok(Some(q))
}

fn parse_expr(cur: &mut Cursor) -> Result<Expr> {
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut neg = false;
        if cur.eat("-") {
            neg = true;
        } else if !first && !cur.eat("+") {
            break;
        } else if first {
            cur.eat("+");
        }
        first = false;
        let coeff = parse_coeff(cur)?;
        let has_star = cur.eat("*");
        let name = match (cur.peek(), &coeff, has_star) {
            (Some(Tok::Ident(_)), _, _) => Some(cur.name()?),
            (Some(Tok::Number(_)), Some(_), true) => Some(cur.name()?),
            (_, Some(_), false) => None,
            (_, None, _) => return cur.error("expected a term"),
            (_, Some(_), true) => return cur.error("expected a name after '*'"),
        };
        let mut c = coeff.unwrap_or_else(scalar::one);
        if neg {
            c = -c;
        }
        terms.push((c, name));
    }
    Ok(Expr { terms })
}

fn resolve(expr: &Expr, basis: &GradedBasis, unit: usize) -> Result<SparseVec> {
    let mut entries = Vec::new();
    for (c, name) in &expr.terms {
        let idx = match name {
            None => unit,
            Some((n, (line, col))) => basis
                .index_of(n)
                .ok_or_else(|| Error::Parse { line: *line, col: *col, msg: format!("unknown basis element {n:?}") })?,
        };
        entries.push((idx, c.clone()));
    }
    Ok(SparseVec::from_entries(entries))
}

struct RawModel {
    name: String,
    basis: Vec<(String, i32, Pos)>,
    unit: Option<(String, Pos)>,
    diffs: Vec<((String, Pos), Expr)>,
    mults: Vec<((String, Pos), (String, Pos), Expr)>,
}

fn parse_list<F>(cur: &mut Cursor, mut item: F) -> Result<()>
where
    F: FnMut(&mut Cursor) -> Result<()>,
{
    // Items separated by commas, section closed by ';'.
    if cur.eat(";") {
        return Ok(());
    }
    loop {
        item(cur)?;
        if cur.eat(",") {
            if cur.eat(";") {
                return Ok(());
            }
            continue;
        }
        return cur.expect(";");
    }
}

fn parse_raw_model(cur: &mut Cursor) -> Result<RawModel> {
    cur.keyword("model")?;
    let (name, _) = cur.name()?;
    cur.expect("{")?;
    let mut raw = RawModel { name, basis: Vec::new(), unit: None, diffs: Vec::new(), mults: Vec::new() };
    let mut seen_basis = false;
    while !cur.eat("}") {
        if cur.at_end() {
            return cur.error("unterminated model block, expected '}'");
        }
        let (section, at) = cur.name()?;
        cur.expect(":")?;
        match section.as_str() {
            "basis" => {
                if seen_basis {
                    return Err(Error::Parse { line: at.0, col: at.1, msg: "duplicate basis section".into() });
                }
                seen_basis = true;
                parse_list(cur, |cur| {
                    let (n, p) = cur.name()?;
                    cur.expect(":")?;
                    let d = cur.integer()?;
                    raw.basis.push((n, d as i32, p));
                    Ok(())
                })?;
            }
            "unit" => {
                let u = cur.name()?;
                cur.expect(";")?;
                raw.unit = Some(u);
            }
            "diff" => parse_list(cur, |cur| {
                let src = cur.name()?;
                cur.expect("->")?;
                let e = parse_expr(cur)?;
                raw.diffs.push((src, e));
                Ok(())
            })?,
            "mult" => parse_list(cur, |cur| {
                let l = cur.name()?;
                cur.expect("*")?;
                let r = cur.name()?;
                cur.expect("=")?;
                let e = parse_expr(cur)?;
                raw.mults.push((l, r, e));
                Ok(())
            })?,
            other => {
                return Err(Error::Parse { line: at.0, col: at.1, msg: format!("unknown section {other:?}") });
            }
        }
    }
    Ok(raw)
}

fn build_model(raw: RawModel, end: Pos) -> Result<DGAlgebra> {
    if raw.basis.is_empty() {
        return Err(Error::Parse { line: end.0, col: end.1, msg: "basis required".into() });
    }
    let mut seen: BTreeMap<&str, Pos> = BTreeMap::new();
    for (n, _, p) in &raw.basis {
        if seen.insert(n, *p).is_some() {
            return Err(Error::Parse { line: p.0, col: p.1, msg: format!("duplicate basis name {n:?}") });
        }
    }
    let basis = GradedBasis::new(raw.basis.iter().map(|(n, d, _)| (n.clone(), *d)).collect())?;
    let Some((uname, upos)) = raw.unit else {
        return Err(Error::Parse { line: end.0, col: end.1, msg: "unit required".into() });
    };
    let unit = basis
        .index_of(&uname)
        .ok_or_else(|| Error::Parse { line: upos.0, col: upos.1, msg: format!("unit {uname:?} is not a basis element") })?;
    let n = basis.len();
    let lookup = |(name, p): &(String, Pos)| {
        basis.index_of(name).ok_or_else(|| Error::Parse { line: p.0, col: p.1, msg: format!("unknown basis element {name:?}") })
    };
    let mut diff = vec![SparseVec::new(); n];
    for (src, e) in &raw.diffs {
        diff[lookup(src)?] = resolve(e, &basis, unit)?;
    }
    let mut mult = vec![vec![SparseVec::new(); n]; n];
    for i in 0..n {
        mult[unit][i] = SparseVec::unit(i);
        mult[i][unit] = SparseVec::unit(i);
    }
    for (l, r, e) in &raw.mults {
        mult[lookup(l)?][lookup(r)?] = resolve(e, &basis, unit)?;
    }
    DGAlgebra::new(raw.name, basis, unit, mult, diff)
}

/// Parses a `.dgm` source and validates the resulting algebra.
pub fn parse_model(src: &str) -> Result<DGAlgebra> {
    let mut cur = Cursor::new(src)?;
    let raw = parse_raw_model(&mut cur)?;
    if !cur.at_end() {
        return cur.error("trailing input after model block");
    }
    build_model(raw, cur.position())
}

/// Canonical source text; `parse_model(print_model(a)) == a`.
pub fn print_model(alg: &DGAlgebra) -> String {
    let b = alg.basis();
    let n = alg.dim();
    let expr = |v: &SparseVec| format_combination(v.iter().map(|(i, c)| (b.name(*i).to_string(), c.clone())));
    let basis: Vec<String> = (0..n).map(|i| format!("{}:{}", b.name(i), b.degree(i))).collect();
    let diffs: Vec<String> = (0..n)
        .filter(|&i| !alg.diff_basis(i).is_zero())
        .map(|i| format!("{} -> {}", b.name(i), expr(alg.diff_basis(i))))
        .collect();
    let mut mults = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let m = alg.mul_basis(i, j);
            let default = if i == alg.unit() {
                SparseVec::unit(j)
            } else if j == alg.unit() {
                SparseVec::unit(i)
            } else {
                SparseVec::new()
            };
            if *m != default {
                mults.push(format!("{}*{} = {}", b.name(i), b.name(j), expr(m)));
            }
        }
    }
    let mut out = format!("model {} {{\n  basis: {};\n  unit: {};\n", alg.name(), basis.join(", "), b.name(alg.unit()));
    if !diffs.is_empty() {
        out.push_str(&format!("  diff: {};\n", diffs.join(", ")));
    }
    if !mults.is_empty() {
        out.push_str(&format!("  mult: {};\n", mults.join(", ")));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct JsonBasis {
    name: String,
    degree: i32,
}

#[derive(Serialize, Deserialize)]
struct JsonMult {
    left: String,
    right: String,
    value: BTreeMap<String, String>,
}

/// JSON alternative to the `.dgm` language.
///
/// `{"name", "basis": [{"name", "degree"}], "unit", "diff": {src: {name: "p/q"}},
///   "mult": [{"left", "right", "value": {name: "p/q"}}]}`; same defaults.
#[derive(Serialize, Deserialize)]
struct JsonModel {
    name: String,
    basis: Vec<JsonBasis>,
    unit: String,
    #[serde(default)]
    diff: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    mult: Vec<JsonMult>,
}

pub fn parse_model_json(src: &str) -> Result<DGAlgebra> {
    let m: JsonModel = serde_json::from_str(src).map_err(|e| Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() })?;
    let basis = GradedBasis::new(m.basis.iter().map(|b| (b.name.clone(), b.degree)).collect())?;
    let idx = |n: &str| basis.index_of(n).ok_or_else(|| Error::Invalid(format!("unknown basis element {n:?}")));
    let vec = |v: &BTreeMap<String, String>| -> Result<SparseVec> {
        let mut es = Vec::new();
        for (k, c) in v {
            es.push((idx(k)?, scalar::parse(c)?));
        }
        Ok(SparseVec::from_entries(es))
    };
    let unit = idx(&m.unit)?;
    let n = basis.len();
    let mut diff = vec![SparseVec::new(); n];
    for (k, v) in &m.diff {
        diff[idx(k)?] = vec(v)?;
    }
    let mut mult = vec![vec![SparseVec::new(); n]; n];
    for i in 0..n {
        mult[unit][i] = SparseVec::unit(i);
        mult[i][unit] = SparseVec::unit(i);
    }
    for e in &m.mult {
        mult[idx(&e.left)?][idx(&e.right)?] = vec(&e.value)?;
    }
    DGAlgebra::new(m.name, basis, unit, mult, diff)
}

pub fn model_to_json(alg: &DGAlgebra) -> serde_json::Value {
    let b = alg.basis();
    let vecmap = |v: &SparseVec| -> BTreeMap<String, String> {
        v.iter().map(|(i, c)| (b.name(*i).to_string(), scalar::format(c))).collect()
    };
    let m = JsonModel {
        name: alg.name().to_string(),
        basis: (0..alg.dim()).map(|i| JsonBasis { name: b.name(i).to_string(), degree: b.degree(i) }).collect(),
        unit: b.name(alg.unit()).to_string(),
        diff: (0..alg.dim())
            .filter(|&i| !alg.diff_basis(i).is_zero())
            .map(|i| (b.name(i).to_string(), vecmap(alg.diff_basis(i))))
            .collect(),
        mult: (0..alg.dim())
            .flat_map(|i| (0..alg.dim()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != alg.unit() && j != alg.unit() && !alg.mul_basis(i, j).is_zero())
            .map(|(i, j)| JsonMult {
                left: b.name(i).to_string(),
                right: b.name(j).to_string(),
                value: vecmap(alg.mul_basis(i, j)),
            })
            .collect(),
    };
    serde_json::to_value(m).expect("serializable")
}

/// Parses `morphism NAME { src -> expr, … }` describing `f*: A_M → A_Z`.
///
/// Images are given on some source basis elements (typically algebra
/// generators); the rest are forced by multiplicativity, compatibility with
/// `d`, and the unit. Every axiom is then checked.
pub fn parse_morphism(src: &str, source: &DGAlgebra, target: &DGAlgebra) -> Result<AlgebraMorphism> {
    let mut cur = Cursor::new(src)?;
    cur.keyword("morphism")?;
    let (name, _) = cur.name()?;
    cur.expect("{")?;
    let mut given: Vec<((String, Pos), Expr)> = Vec::new();
    while !cur.eat("}") {
        if cur.at_end() {
            return cur.error("unterminated morphism block, expected '}'");
        }
        let s = cur.name()?;
        cur.expect("->")?;
        let e = parse_expr(&mut cur)?;
        given.push((s, e));
        if !cur.eat(",") && !cur.eat(";") && !matches!(cur.peek(), Some(Tok::Sym("}"))) {
            return cur.error("expected ',' or ';' or '}'");
        }
    }
    if !cur.at_end() {
        return cur.error("trailing input after morphism block");
    }
    let mut images: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for ((s, p), e) in &given {
        let i = source
            .basis()
            .index_of(s)
            .ok_or_else(|| Error::Parse { line: p.0, col: p.1, msg: format!("unknown source basis element {s:?}") })?;
        images.insert(i, resolve(e, target.basis(), target.unit())?);
    }
    AlgebraMorphism::determine(name, source, target, images)
}

/// Parses named representatives `reps { name = term + … ; … }` where a term
/// is `[coeff] [carrier] [| x1 x2 …]`; a missing carrier is the unit.
pub fn parse_reps(src: &str, carrier: &GradedBasis, unit: usize, space: Space, gens: &Generators) -> Result<Vec<(String, TwistedElement)>> {
    let mut cur = Cursor::new(src)?;
    cur.keyword("reps")?;
    cur.expect("{")?;
    let mut out: Vec<(String, TwistedElement)> = Vec::new();
    while !cur.eat("}") {
        if cur.at_end() {
            return cur.error("unterminated reps block, expected '}'");
        }
        let (name, _) = cur.name()?;
        if out.iter().any(|(n, _)| *n == name) {
            return cur.error(format!("duplicate representative {name:?}"));
        }
        cur.expect("=")?;
        let mut t = TwistedElement::zero(space);
        let mut first = true;
        loop {
            let neg = cur.eat("-");
            if !neg && !first && !cur.eat("+") {
                break;
            }
            first = false;
            let coeff = parse_coeff(&mut cur)?;
            let star = cur.eat("*");
            let named = matches!(cur.peek(), Some(Tok::Ident(_))) || (star && matches!(cur.peek(), Some(Tok::Number(_))));
            let a = if named {
                let (n, (line, col)) = cur.name()?;
                carrier.index_of(&n).ok_or_else(|| Error::Parse { line, col, msg: format!("unknown carrier element {n:?}") })?
            } else if coeff.is_some() || matches!(cur.peek(), Some(Tok::Sym("|"))) {
                unit
            } else {
                return cur.error("expected a term");
            };
            let mut letters = Vec::new();
            if cur.eat("|") {
                while let Some(Tok::Ident(_)) = cur.peek() {
                    let (g, (line, col)) = cur.name()?;
                    letters.push(gens.index_of(&g).ok_or_else(|| Error::Parse { line, col, msg: format!("unknown generator {g:?}") })?);
                }
            }
            let mut c = coeff.unwrap_or_else(scalar::one);
            if neg {
                c = -c;
            }
            t = t.add(&TwistedElement::term(space, a, Word::from_letters(letters), c));
        }
        cur.expect(";")?;
        out.push((name, t));
    }
    if !cur.at_end() {
        return cur.error("trailing input after reps block");
    }
    Ok(out)
}

/// Resolves a model spec: a preset (`sphere:3`, `product(a,b)`, …) or a
/// path to a `.dgm` / `.json` file.
pub fn load_model(spec: &str) -> Result<DGAlgebra> {
    let looks_like_file = spec.ends_with(".dgm") || spec.ends_with(".json") || spec.contains('/');
    if looks_like_file {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Invalid(format!("cannot read {spec}: {e}")))?;
        if spec.ends_with(".json") {
            parse_model_json(&text)
        } else {
            parse_model(&text)
        }
    } else {
        preset(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Axiom;

    #[test]
    fn parses_sphere_source() {
        let a = parse_model("model s2 {\n  basis: 1:0, v:2;\n  unit: 1;\n}\n").unwrap();
        assert_eq!(a.dim(), 2);
        assert!(a.validate().is_valid());
        assert!(a.mul_basis(1, 1).is_zero());
        assert_eq!(a.mul_basis(0, 1), &SparseVec::unit(1));
    }

    #[test]
    fn missing_unit_is_reported() {
        let err = parse_model("model s { basis: 1:0, v:2; }").unwrap_err();
        match err {
            Error::Parse { msg, .. } => assert!(msg.contains("unit required")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_model("model s {\n  basis: 1:0, v:2\n  unit: 1;\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, col: 3, .. }), "{err:?}");
        let err = parse_model("model s { basis: 1:0; unit: 1; diff: 1 -> q; }").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn cp3_source_validates() {
        let src = "model cp3 {
            basis: 1:0, h:2, h2:4, h3:6;
            unit: 1;
            mult: h*h = h2, h*h2 = h3, h2*h = h3;
        }";
        let a = parse_model(src).unwrap();
        assert!(a.validate().is_valid());
        assert_eq!(a, preset("cpn:3").unwrap().with_name("cp3"));
    }

    #[test]
    fn expressions_with_rationals() {
        let a = parse_model("model e { basis: 1:0, a:2, b:2, c:3; unit: 1; diff: a -> 1/2 c, b -> -3*c; }").unwrap();
        assert_eq!(a.diff_basis(1), &SparseVec::unit(3).scale(&scalar::parse("1/2").unwrap()));
        assert_eq!(a.diff_basis(2), &SparseVec::unit(3).scale(&scalar::int(-3)));
    }

    #[test]
    fn invalid_algebra_reports_witness() {
        let err = parse_model("model bad { basis: 1:0, a:2, b:4, c:6; unit: 1; mult: a*a = b, b*a = c; }").unwrap_err();
        match err {
            Error::InvalidAlgebra(msg) => assert!(msg.contains(&Axiom::Associativity.to_string())),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn print_parse_roundtrip_on_presets() {
        for name in ["point", "sphere:2", "sphere:5", "cpn:3", "product(sphere:2,sphere:3)", "product(cpn:2,sphere:3)"] {
            let a = preset(name).unwrap();
            let src = print_model(&a);
            let b = parse_model(&src).unwrap();
            assert_eq!(a.clone().with_name(b.name()), b, "{src}");
            let j = model_to_json(&a).to_string();
            assert_eq!(parse_model_json(&j).unwrap(), a);
        }
    }

    #[test]
    fn morphism_linear_embedding() {
        let m = preset("cpn:2").unwrap();
        let z = preset("cpn:1").unwrap();
        let f = parse_morphism("morphism lin { h -> h }", &m, &z).unwrap();
        assert_eq!(f.image(2), &SparseVec::new());
        assert_eq!(f.image(1), &SparseVec::unit(1));
    }

    #[test]
    fn morphism_scaling_is_forced_multiplicatively() {
        let m = preset("cpn:2").unwrap();
        let f = parse_morphism("morphism s { h -> 2 h }", &m, &m).unwrap();
        assert_eq!(f.image(2), &SparseVec::unit(2).scale(&scalar::int(4)));
        let id = parse_morphism("morphism id { h -> h; h2 -> h2; }", &m, &m).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn morphism_axiom_violation() {
        let m = preset("cpn:2").unwrap();
        let err = parse_morphism("morphism bad { h -> h; h2 -> 3 h2 }", &m, &m).unwrap_err();
        assert!(matches!(err, Error::InvalidMorphism(_)), "{err:?}");
    }

    #[test]
    fn reps_parse() {
        let m = preset("cpn:2").unwrap();
        let gens = Generators::dual_to(&[2, 4]);
        let src = "reps { h = h; mu = h | x1 + 2 h2 | x2; nu = 1 | x1 x2 + | x2 x1; neg = -1/2 h2 | x1 x1 - h; }";
        let r = parse_reps(src, m.basis(), m.unit(), Space::Algebra, &gens).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[1].1.coeff(&(2, Word::letter(1))), scalar::int(2));
        assert_eq!(r[2].1.coeff(&(0, Word::from_letters([1, 0]))), scalar::one());
        assert_eq!(r[3].1.coeff(&(2, Word::from_letters([0, 0]))), scalar::parse("-1/2").unwrap());
        let err = parse_reps("reps { a = h | y1; }", m.basis(), m.unit(), Space::Algebra, &gens).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, col: 16, .. }), "{err:?}");
    }
}

//! Free loops, based loops and branes on top of the twisted complexes.
//!
//! Degree dictionary: the complex in cohomological degree `d` computes
//! `ℍ_{-d}`, and `H_k = ℍ_{k-n}` for top degree `n`; based loops use
//! `H_k(ΩM) = H^{-k}(k⟨X⟩, ð)`.

use std::collections::BTreeMap;

use serde_json::json;

use crate::algebra::{Carrier, DGAlgebra};
use crate::element::{Space, TwistedElement};
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, SparseVec};
use crate::scalar::{self, Scalar};
use crate::transfer::{build_contraction, chen_connection, Connection, HomotopyData, PivotOrder};
use crate::twisted::{
    class_of, cohomology, complete_cocycle, dualize, pure_word_cohomology, ring_structure, twisted_diff, CohomologyTable, Coefficients,
    ComplexSpec, RingPresentation,
};
use crate::words::Word;

/// Largest word length the automatic extension will go to.
pub const HARD_CAP: usize = 64;

/// A map of dg algebras `f*: A_M → A_Z`, stored on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMorphism {
    name: String,
    source: DGAlgebra,
    target: DGAlgebra,
    columns: Vec<SparseVec>,
}

impl AlgebraMorphism {
    /// Checks degree 0, `fd = df`, multiplicativity and the unit.
    pub fn new(name: impl Into<String>, source: &DGAlgebra, target: &DGAlgebra, columns: Vec<SparseVec>) -> Result<Self> {
        let f = Self { name: name.into(), source: source.clone(), target: target.clone(), columns };
        f.check()?;
        Ok(f)
    }

    pub fn identity(alg: &DGAlgebra) -> Self {
        let columns = (0..alg.dim()).map(SparseVec::unit).collect();
        Self { name: "id".into(), source: alg.clone(), target: alg.clone(), columns }
    }

    /// The map to the ground field killing everything of nonzero degree.
    pub fn augmentation(alg: &DGAlgebra) -> Result<Self> {
        let point = DGAlgebra::ground("point");
        let columns = (0..alg.dim())
            .map(|a| if a == alg.unit() { SparseVec::unit(0) } else { SparseVec::new() })
            .collect();
        Self::new("augmentation", alg, &point, columns)
    }

    /// Completes images given on some basis elements, using the unit,
    /// multiplicativity and compatibility with `d`, then checks the axioms.
    pub fn determine(
        name: impl Into<String>,
        source: &DGAlgebra,
        target: &DGAlgebra,
        given: BTreeMap<usize, SparseVec>,
    ) -> Result<Self> {
        let n = source.dim();
        let mut images: Vec<Option<SparseVec>> = vec![None; n];
        for (i, v) in given {
            images[i] = Some(v);
        }
        let unit = SparseVec::unit(target.unit());
        match &images[source.unit()] {
            Some(v) if *v != unit => {
                return Err(Error::InvalidMorphism(format!("unit {} is not sent to 1", source.basis().name(source.unit()))));
            }
            _ => images[source.unit()] = Some(unit),
        }
        // Solve `Σ c_k f(e_k) = rhs` when exactly one `f(e_k)` is unknown.
        let solve = |images: &mut Vec<Option<SparseVec>>, lhs: &SparseVec, rhs: SparseVec| -> bool {
            let unknown: Vec<&(usize, Scalar)> = lhs.iter().filter(|(k, _)| images[*k].is_none()).collect();
            if unknown.len() != 1 {
                return false;
            }
            let (k, c) = unknown[0].clone();
            let mut r = rhs;
            for (j, x) in lhs.iter() {
                if *j != k {
                    r = r.add_scaled(&-x.clone(), images[*j].as_ref().expect("known"));
                }
            }
            images[k] = Some(r.scale(&c.recip()));
            true
        };
        loop {
            let mut progress = false;
            for i in 0..n {
                for j in 0..n {
                    if let (Some(fi), Some(fj)) = (&images[i], &images[j]) {
                        let rhs = target.mul(fi, fj);
                        progress |= solve(&mut images, source.mul_basis(i, j), rhs);
                    }
                }
                if let Some(fi) = &images[i] {
                    let rhs = target.d(fi);
                    progress |= solve(&mut images, source.diff_basis(i), rhs);
                }
            }
            if !progress {
                break;
            }
        }
        let mut columns = Vec::with_capacity(n);
        for (i, img) in images.into_iter().enumerate() {
            match img {
                Some(v) => columns.push(v),
                None => {
                    return Err(Error::InvalidMorphism(format!(
                        "image of {} is not determined; give it explicitly",
                        source.basis().name(i)
                    )))
                }
            }
        }
        Self::new(name, source, target, columns)
    }

    fn check(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        let name = |i: usize| s.basis().name(i).to_string();
        if self.columns.len() != s.dim() || self.columns.iter().any(|c| c.iter().any(|(k, _)| *k >= t.dim())) {
            return Err(Error::InvalidMorphism("matrix has the wrong shape".into()));
        }
        if self.columns[s.unit()] != SparseVec::unit(t.unit()) {
            return Err(Error::InvalidMorphism("unit is not preserved".into()));
        }
        for i in 0..s.dim() {
            if t.basis().vec_degree(&self.columns[i]).is_some_and(|d| d != s.degree(i))
                || (!self.columns[i].is_zero() && t.basis().vec_degree(&self.columns[i]).is_none())
            {
                return Err(Error::InvalidMorphism(format!("image of {} is not of degree {}", name(i), s.degree(i))));
            }
            if self.apply(s.diff_basis(i)) != t.d(&self.columns[i]) {
                return Err(Error::InvalidMorphism(format!("f(d {}) ≠ d f({})", name(i), name(i))));
            }
        }
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if self.apply(s.mul_basis(i, j)) != t.mul(&self.columns[i], &self.columns[j]) {
                    return Err(Error::InvalidMorphism(format!(
                        "not multiplicative on ({}, {}): f({}·{}) ≠ f({})·f({})",
                        name(i),
                        name(j),
                        name(i),
                        name(j),
                        name(i),
                        name(j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &DGAlgebra {
        &self.source
    }

    pub fn target(&self) -> &DGAlgebra {
        &self.target
    }

    pub fn image(&self, i: usize) -> &SparseVec {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        linalg::apply(&self.columns, v)
    }

    /// `f ⊗ id` on `A_M ⊗ k⟨X⟩`.
    pub fn apply_twisted(&self, t: &TwistedElement) -> TwistedElement {
        t.map_carrier(Space::Algebra, |a| self.columns[a].clone())
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.columns.iter().enumerate().all(|(i, c)| *c == SparseVec::unit(i))
    }
}

/// Contraction and connection long enough for a complex needing words of
/// length `need`. An explicit `max_len` is honoured when sufficient and
/// extended (up to `HARD_CAP`) otherwise.
pub fn prepare_connection(alg: &DGAlgebra, max_len: Option<usize>, need: usize) -> Result<(HomotopyData, Connection)> {
    let hd = build_contraction(alg, PivotOrder::default())?;
    let natural = (alg.basis().max_degree() - 1).max(1) as usize;
    let mut len = max_len.unwrap_or(natural).max(1);
    let required = need.min(natural).max(1);
    if len < required {
        if required > HARD_CAP {
            return Err(Error::TruncationOverflow { have: len, need: required });
        }
        len = required;
    }
    let conn = chen_connection(alg, &hd, len)?;
    Ok((hd, conn))
}

fn required_len(max_carrier_degree: i32, window: (i32, i32)) -> usize {
    (max_carrier_degree - window.0 + 1).max(0) as usize
}

/// Which homology a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    Free,
    Based,
    Brane,
}

/// Betti numbers of a loop space model over a window.
#[derive(Clone, Debug)]
pub struct LoopReport {
    pub model: String,
    pub kind: LoopKind,
    pub top_degree: i32,
    pub convention: String,
    /// `(m, dim ℍ_m)` in increasing `m`.
    pub shifted: Vec<(i32, usize)>,
    /// `(k, dim H_k)` in increasing `k`.
    pub betti: Vec<(i32, usize)>,
    pub ring: Option<RingPresentation>,
    pub spec: ComplexSpec,
    pub table: CohomologyTable,
}

impl LoopReport {
    fn build(model: String, kind: LoopKind, n: i32, spec: ComplexSpec, table: CohomologyTable) -> Self {
        let mut shifted: Vec<(i32, usize)> = table.dims().into_iter().map(|(d, dim)| (-d, dim)).collect();
        shifted.sort();
        let betti = shifted.iter().map(|&(m, dim)| (m + n, dim)).collect();
        let convention = match kind {
            LoopKind::Based => "H_k(ΩM) = H^(-k)(k<X>, ð)".to_string(),
            LoopKind::Free => format!("ℍ_m = H^(-m)(A⊗k<X>, d_ω); H_k(LM) = ℍ_(k-{n})"),
            LoopKind::Brane => format!("ℍ_m = H^(-m)(A_Z⊗k<X>, d_f*ω); H_k(L_f) = ℍ_(k-{n})"),
        };
        Self { model, kind, top_degree: n, convention, shifted, betti, ring: None, spec, table }
    }

    /// `H_k`, if `k` is covered by the window.
    pub fn betti(&self, k: i32) -> Option<usize> {
        self.betti.iter().find(|(j, _)| *j == k).map(|(_, d)| *d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = self.ring.as_ref().map(ring_to_json).unwrap_or_else(|| json!({"generators": [], "products": []}));
        json!({
            "model": self.model,
            "n": self.top_degree,
            "convention": self.convention,
            "betti": self.betti.iter().map(|(k, d)| json!([k, d])).collect::<Vec<_>>(),
            "shifted": self.shifted.iter().map(|(k, d)| json!([k, d])).collect::<Vec<_>>(),
            "ring": ring["products"],
            "ring_generators": ring["generators"],
        })
    }
}

pub fn ring_to_json(ring: &RingPresentation) -> serde_json::Value {
    let fmt_names = |v: &Option<Vec<(String, Scalar)>>| match v {
        Some(terms) => json!(crate::algebra::format_combination(terms.iter().cloned())),
        None => serde_json::Value::Null,
    };
    let products: Vec<_> = ring
        .products
        .iter()
        .map(|p| {
            json!({
                "a": p.left,
                "b": p.right,
                "degree": p.degree,
                "product": match &p.coords {
                    None => json!("not computed"),
                    Some(c) => json!(c.iter().map(|(i, x)| json!([i, scalar::format(x)])).collect::<Vec<_>>()),
                },
                "in_names": fmt_names(&p.in_names),
            })
        })
        .collect();
    let gens: Vec<_> = ring.generators.iter().map(|g| json!({"name": g.name, "degree": g.degree})).collect();
    json!({"generators": gens, "products": products, "associativity_checked": ring.associativity_checked})
}

/// The complex computing `Hoch(A, A)` or, with `dual`, `Hoch(A, A*)`.
pub fn hochschild(alg: &DGAlgebra, window: (i32, i32), dual: bool, max_len: Option<usize>) -> Result<(ComplexSpec, CohomologyTable)> {
    let (coeffs, top) = if dual {
        let m = dualize(alg);
        let top = m.basis().max_degree();
        (Coefficients::Bimodule(m), top)
    } else {
        (Coefficients::Algebra, alg.basis().max_degree())
    };
    let (_, conn) = prepare_connection(alg, max_len, required_len(top, window))?;
    let spec = ComplexSpec::new(alg.clone(), coeffs, conn, window)?;
    let table = cohomology(&spec)?;
    Ok((spec, table))
}

/// Checks that `n` is the top class degree of a model with one top class.
pub fn check_top_degree(alg: &DGAlgebra, hd: &HomotopyData, n: i32) -> Result<()> {
    let top: Vec<i32> = hd.class_degrees().iter().copied().filter(|&d| d >= n).collect();
    if top != [n] {
        return Err(Error::DegeneratePairing(format!(
            "{} does not have a single top cohomology class in degree {n}",
            alg.name()
        )));
    }
    Ok(())
}

/// `H_•(LM)` from `(A⊗k⟨X⟩, d_ω)`; the window is in complex degrees.
pub fn loop_homology(alg: &DGAlgebra, n: i32, window: (i32, i32), max_len: Option<usize>) -> Result<LoopReport> {
    let (hd, conn) = prepare_connection(alg, max_len, required_len(alg.basis().max_degree(), window))?;
    check_top_degree(alg, &hd, n)?;
    let spec = ComplexSpec::new(alg.clone(), Coefficients::Algebra, conn, window)?;
    let table = cohomology(&spec)?;
    Ok(LoopReport::build(alg.name().to_string(), LoopKind::Free, n, spec, table))
}

/// Adds the multiplication table of named representatives to a report.
pub fn chas_sullivan_ring(report: &mut LoopReport, named: &[(String, TwistedElement)]) -> Result<()> {
    report.ring = Some(ring_structure(&report.spec, &report.table, named)?);
    Ok(())
}

/// `H_•(ΩM)` from `(k⟨X⟩, ð)`.
pub fn based_loop_ring(alg: &DGAlgebra, window: (i32, i32), max_len: Option<usize>) -> Result<LoopReport> {
    let (_, conn) = prepare_connection(alg, max_len, required_len(0, window))?;
    let table = pure_word_cohomology(&conn, window)?;
    let spec = ComplexSpec::new(DGAlgebra::ground("k"), Coefficients::Words, conn, window)?;
    Ok(LoopReport::build(alg.name().to_string(), LoopKind::Based, 0, spec, table))
}

/// `H_•(L_f)` from `(A_Z⊗k⟨X⟩, d_{f*ω})`, with `p` the top degree of `Z`.
pub fn brane_homology(f: &AlgebraMorphism, p: i32, window: (i32, i32), max_len: Option<usize>) -> Result<LoopReport> {
    let need = required_len(f.target().basis().max_degree(), window);
    let (_, conn) = prepare_connection(f.source(), max_len, need)?;
    let pulled = conn.pullback(f.columns());
    let spec = ComplexSpec::new(f.target().clone(), Coefficients::Algebra, pulled, window)?;
    let table = cohomology(&spec)?;
    let model = format!("{}->{}", f.target().name(), f.source().name());
    Ok(LoopReport::build(model, LoopKind::Brane, p, spec, table))
}

/// Image of a loop class of `M` in the brane complex: applies `f ⊗ id`,
/// checks closedness and returns `(degree, coordinates)`.
pub fn intersection_map(
    f: &AlgebraMorphism,
    source_spec: &ComplexSpec,
    brane: &LoopReport,
    rep: &TwistedElement,
) -> Result<(i32, SparseVec)> {
    let d = twisted_diff(source_spec, rep)?;
    if !d.is_zero() {
        return Err(Error::Invalid("representative is not closed in the loop complex".into()));
    }
    let image = f.apply_twisted(rep);
    if image.is_zero() {
        let deg = source_spec.degree_of(rep).ok_or_else(|| Error::Invalid("zero representative".into()))?;
        return Ok((deg, SparseVec::new()));
    }
    class_of(&brane.spec, &brane.table, &image)
        .map_err(|e| Error::Invalid(format!("image does not close in the brane complex ({e}); check window and word length")))
}

/// Writes class coordinates in terms of named classes and their pairwise
/// products, when possible.
pub fn express_in_names(
    spec: &ComplexSpec,
    table: &CohomologyTable,
    named: &[(String, TwistedElement)],
    degree: i32,
    coords: &SparseVec,
) -> Option<String> {
    if coords.is_zero() {
        return Some("0".into());
    }
    let mut candidates: Vec<(String, SparseVec)> = Vec::new();
    let classes: Vec<(String, i32, TwistedElement)> = named
        .iter()
        .filter_map(|(n, t)| spec.degree_of(t).map(|d| (n.clone(), d, t.clone())))
        .collect();
    for (n, d, t) in &classes {
        if *d == degree {
            if let Ok(c) = table.classify(t, degree) {
                candidates.push((n.clone(), c));
            }
        }
    }
    for (n1, d1, t1) in &classes {
        for (n2, d2, t2) in &classes {
            if d1 + d2 == degree {
                if let Ok(p) = crate::element::elem_mul(spec.algebra(), spec.generators(), t1, t2) {
                    if let Ok(c) = table.classify(&p, degree) {
                        candidates.push((format!("{n1}{n2}"), c));
                    }
                }
            }
        }
    }
    // Single names first, then products; the first exact match wins.
    for (n, c) in &candidates {
        for sign in [scalar::one(), -scalar::one()] {
            let cs = c.scale(&sign);
            if cs == *coords {
                return Some(crate::algebra::format_combination([(n.clone(), sign)]));
            }
        }
    }
    let mut ech = Echelon::new();
    for (i, (_, c)) in candidates.iter().enumerate() {
        ech.insert(c, SparseVec::unit(i));
    }
    let (rem, tag) = ech.reduce(coords);
    rem.is_zero()
        .then(|| crate::algebra::format_combination(tag.iter().map(|(i, c)| (candidates[*i].0.clone(), c.clone()))))
}

fn is_cpn_shape(alg: &DGAlgebra) -> Option<usize> {
    let n = alg.dim().checked_sub(1)?;
    if n == 0 || alg.unit() != 0 {
        return None;
    }
    let ok = (0..=n).all(|i| alg.degree(i) == 2 * i as i32 && alg.diff_basis(i).is_zero())
        && (0..=n).all(|i| (0..=n).all(|j| *alg.mul_basis(i, j) == if i + j <= n { SparseVec::unit(i + j) } else { SparseVec::new() }));
    ok.then_some(n)
}

/// Representatives for the standard generators of sphere and `ℂP^n`
/// models, in terms of the generators dual to the class basis:
/// * `S^n`, `n` odd: `nu = v⊗1`, `x = 1⊗x1`
/// * `S^n`, `n` even: `nu = v⊗1`, `mu = v⊗x1`, `tau = 1⊗x1x1`
/// * `ℂP^n`: `h = h⊗1`, `mu = Σ i h^i⊗x_i`, `nu = Σ_{i+j=n+1} 1⊗x_i x_j`
///
/// Other models get no named classes.
pub fn standard_classes(spec: &ComplexSpec, hd: &HomotopyData) -> Result<Vec<(String, TwistedElement)>> {
    let alg = spec.algebra();
    let reps_are_basis = (0..hd.num_classes()).all(|r| hd.rep(r).nnz() == 1 && hd.rep(r).iter().all(|(_, c)| *c == scalar::one()));
    if !reps_are_basis {
        return Ok(Vec::new());
    }
    let term = |a: usize, w: &[usize], c: i64| TwistedElement::term(Space::Algebra, a, Word::from_letters(w.iter().copied()), scalar::int(c));
    if alg.dim() == 2 && alg.unit() == 0 && alg.mul_basis(1, 1).is_zero() && alg.degree(1) >= 2 {
        let n = alg.degree(1);
        return Ok(if n % 2 == 1 {
            vec![("nu".into(), term(1, &[], 1)), ("x".into(), term(0, &[0], 1))]
        } else {
            vec![("nu".into(), term(1, &[], 1)), ("mu".into(), term(1, &[0], 1)), ("tau".into(), term(0, &[0, 0], 1))]
        });
    }
    if let Some(n) = is_cpn_shape(alg) {
        let mu = (1..=n).fold(TwistedElement::zero(Space::Algebra), |acc, i| acc.add(&term(i, &[i - 1], i as i64)));
        // The word sum is the 1⊗ part; for n ≥ 2 it needs a correction.
        let nu = (1..=n).fold(TwistedElement::zero(Space::Algebra), |acc, i| acc.add(&term(0, &[i - 1, n - i], 1)));
        let nu = complete_cocycle(spec, &nu)?;
        return Ok(vec![("h".into(), term(1, &[], 1)), ("mu".into(), mu), ("nu".into(), nu)]);
    }
    Ok(Vec::new())
}

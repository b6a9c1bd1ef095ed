//! Twisted complexes `(A⊗k⟨X⟩, d_ω)`, `(M⊗k⟨X⟩, d^M_ω)` and `(k⟨X⟩, ð)`.
//!
//! `d_ω t = dt + ðt + ωt - (-1)^{|t|} tω`, with module actions in place of
//! products when the carrier is a bimodule.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{Axiom, Carrier, DGAlgebra, GradedBasis, ValidationReport};
use crate::element::{elem_mul, tensor_mul, Key, Space, TwistedElement};
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, SparseVec};
use crate::scalar::{self, Scalar};
use crate::transfer::{Connection, HomotopyData};
use crate::words::Generators;

/// Finite-dimensional dg bimodule over a dg algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGBimodule {
    name: String,
    basis: GradedBasis,
    /// `left[a][m]` = `a·m`.
    left: Vec<Vec<SparseVec>>,
    /// `right[m][a]` = `m·a`.
    right: Vec<Vec<SparseVec>>,
    diff: Vec<SparseVec>,
}

impl Carrier for DGBimodule {
    fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    fn diff_basis(&self, i: usize) -> &SparseVec {
        &self.diff[i]
    }
}

impl DGBimodule {
    pub fn new(
        name: impl Into<String>,
        basis: GradedBasis,
        left: Vec<Vec<SparseVec>>,
        right: Vec<Vec<SparseVec>>,
        diff: Vec<SparseVec>,
    ) -> Self {
        Self { name: name.into(), basis, left, right, diff }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn left(&self, a: usize, m: usize) -> &SparseVec {
        &self.left[a][m]
    }

    pub fn right(&self, m: usize, a: usize) -> &SparseVec {
        &self.right[m][a]
    }

    fn act_left(&self, a: &SparseVec, m: &SparseVec) -> SparseVec {
        bilinear(a, m, |i, j| &self.left[i][j])
    }

    fn act_right(&self, m: &SparseVec, a: &SparseVec) -> SparseVec {
        bilinear(m, a, |i, j| &self.right[i][j])
    }

    fn d(&self, m: &SparseVec) -> SparseVec {
        linalg::apply(&self.diff, m)
    }

    /// Checks the bimodule axioms over `alg`, with witnesses `[a, m]`,
    /// `[m, a]`, `[a, b, m]`, `[a, m, b]` or `[m, a, b]`.
    pub fn validate(&self, alg: &DGAlgebra) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let (na, nm) = (alg.dim(), self.dim());
        let mdeg = |v: &SparseVec| self.basis.vec_degree(v);
        if self.left.len() != na || self.right.len() != nm || self.diff.len() != nm {
            rep.fail(Axiom::MultDegree, vec![], "action tables have the wrong shape".into());
            return rep;
        }
        let e = SparseVec::unit;
        for m in 0..nm {
            if mdeg(&self.diff[m]).is_some_and(|k| k != self.degree(m) + 1) {
                rep.fail(Axiom::DiffDegree, vec![m], format!("d({}) has wrong degree", self.basis.name(m)));
            }
            if !self.d(&self.diff[m]).is_zero() {
                rep.fail(Axiom::DiffSquare, vec![m], format!("d²({}) ≠ 0", self.basis.name(m)));
            }
            if self.act_left(&e(alg.unit()), &e(m)) != e(m) || self.act_right(&e(m), &e(alg.unit())) != e(m) {
                rep.fail(Axiom::Unit, vec![m], format!("unit does not act trivially on {}", self.basis.name(m)));
            }
        }
        for a in 0..na {
            let sa = scalar::sign(alg.degree(a) as i64);
            for m in 0..nm {
                let sm = scalar::sign(self.degree(m) as i64);
                let am = self.act_left(&e(a), &e(m));
                let ma = self.act_right(&e(m), &e(a));
                if mdeg(&am).is_some_and(|k| k != alg.degree(a) + self.degree(m))
                    || mdeg(&ma).is_some_and(|k| k != alg.degree(a) + self.degree(m))
                {
                    rep.fail(Axiom::MultDegree, vec![a, m], "action is not degree-additive".into());
                }
                let lhs = self.d(&am);
                let rhs = self.act_left(alg.diff_basis(a), &e(m)).add(&self.act_left(&e(a), &self.diff[m]).scale(&sa));
                if lhs != rhs {
                    rep.fail(Axiom::Leibniz, vec![a, m], "left action violates Leibniz".into());
                }
                let lhs = self.d(&ma);
                let rhs = self.act_right(&self.diff[m], &e(a)).add(&self.act_right(&e(m), alg.diff_basis(a)).scale(&sm));
                if lhs != rhs {
                    rep.fail(Axiom::Leibniz, vec![m, a], "right action violates Leibniz".into());
                }
            }
        }
        for a in 0..na {
            for b in 0..na {
                let ab = alg.mul_basis(a, b);
                for m in 0..nm {
                    if self.act_left(ab, &e(m)) != self.act_left(&e(a), &self.act_left(&e(b), &e(m))) {
                        rep.fail(Axiom::Associativity, vec![a, b, m], "(ab)m ≠ a(bm)".into());
                    }
                    if self.act_right(&e(m), ab) != self.act_right(&self.act_right(&e(m), &e(a)), &e(b)) {
                        rep.fail(Axiom::Associativity, vec![m, a, b], "m(ab) ≠ (ma)b".into());
                    }
                    let l = self.act_right(&self.act_left(&e(a), &e(m)), &e(b));
                    let r = self.act_left(&e(a), &self.act_right(&e(m), &e(b)));
                    if l != r {
                        rep.fail(Axiom::Associativity, vec![a, m, b], "(am)b ≠ a(mb)".into());
                    }
                }
            }
        }
        rep
    }
}

fn bilinear<'t, F>(u: &SparseVec, v: &SparseVec, table: F) -> SparseVec
where
    F: Fn(usize, usize) -> &'t SparseVec,
{
    let mut out = SparseVec::new();
    for (i, x) in u.iter() {
        for (j, y) in v.iter() {
            out = out.add_scaled(&(x * y), table(*i, *j));
        }
    }
    out
}

/// The dual bimodule `A* = Hom(A, k)` with basis `φ_a` dual to `e_a`,
/// `|φ_a| = -|a|`:
/// `(a·φ)(c) = (-1)^{|a|(|φ|+|c|)} φ(ca)`, `(φ·b)(c) = φ(bc)`,
/// `(dφ)(c) = -(-1)^{|φ|} φ(dc)`.
pub fn dualize(alg: &DGAlgebra) -> DGBimodule {
    let n = alg.dim();
    let basis = GradedBasis::new((0..n).map(|i| (format!("{}*", alg.basis().name(i)), -alg.degree(i))).collect())
        .expect("names stay unique");
    let deg = |i: usize| alg.degree(i) as i64;
    let left = (0..n)
        .map(|a| {
            (0..n)
                .map(|m| {
                    SparseVec::from_entries((0..n).filter_map(|k| {
                        let c = alg.mul_basis(k, a).get(m);
                        (!c.is_zero()).then(|| (k, c * scalar::sign(deg(a) * (deg(k) - deg(m)))))
                    }))
                })
                .collect()
        })
        .collect();
    let right = (0..n)
        .map(|m| {
            (0..n)
                .map(|b| SparseVec::from_entries((0..n).map(|k| (k, alg.mul_basis(b, k).get(m)))))
                .collect()
        })
        .collect();
    let diff = (0..n)
        .map(|m| SparseVec::from_entries((0..n).map(|k| (k, -alg.diff_basis(k).get(m) * scalar::sign(deg(m))))))
        .collect();
    DGBimodule::new(format!("{}*", alg.name()), basis, left, right, diff)
}

/// What the words are tensored with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Algebra,
    Bimodule(DGBimodule),
    /// Pure words `k⟨X⟩` with differential `ð`.
    Words,
}

/// A twisted complex restricted to a degree window.
#[derive(Clone, Debug)]
pub struct ComplexSpec {
    algebra: DGAlgebra,
    coeffs: Coefficients,
    conn: Connection,
    window: (i32, i32),
    carrier_degrees: Vec<i32>,
}

impl ComplexSpec {
    /// `conn` must have its `ω` carried by `algebra`.
    pub fn new(algebra: DGAlgebra, coeffs: Coefficients, conn: Connection, window: (i32, i32)) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::Invalid(format!("empty degree window {}..{}", window.0, window.1)));
        }
        if !conn.generators().all_negative() {
            return Err(Error::NotSimplyConnected("generators of non-negative degree".into()));
        }
        if let Coefficients::Bimodule(m) = &coeffs {
            let report = m.validate(&algebra);
            if !report.is_valid() {
                return Err(Error::InvalidModule(report.summary()));
            }
        }
        let carrier_degrees = match &coeffs {
            Coefficients::Algebra => algebra.basis().degrees().to_vec(),
            Coefficients::Bimodule(m) => m.basis().degrees().to_vec(),
            Coefficients::Words => vec![0],
        };
        Ok(Self { algebra, coeffs, conn, window, carrier_degrees })
    }

    pub fn algebra(&self) -> &DGAlgebra {
        &self.algebra
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn generators(&self) -> &Generators {
        self.conn.generators()
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn with_window(&self, window: (i32, i32)) -> Result<Self> {
        Self::new(self.algebra.clone(), self.coeffs.clone(), self.conn.clone(), window)
    }

    pub fn space(&self) -> Space {
        match self.coeffs {
            Coefficients::Algebra => Space::Algebra,
            Coefficients::Bimodule(_) => Space::Module,
            Coefficients::Words => Space::Words,
        }
    }

    pub fn carrier_degrees(&self) -> &[i32] {
        &self.carrier_degrees
    }

    pub fn carrier_basis(&self) -> Option<&GradedBasis> {
        match &self.coeffs {
            Coefficients::Algebra => Some(self.algebra.basis()),
            Coefficients::Bimodule(m) => Some(m.basis()),
            Coefficients::Words => None,
        }
    }

    pub fn max_carrier_degree(&self) -> i32 {
        *self.carrier_degrees.iter().max().expect("nonempty carrier")
    }

    /// Word length needed for the window: `max(0, max carrier degree - d_min + 1)`.
    pub fn required_len(&self) -> usize {
        (self.max_carrier_degree() - self.window.0 + 1).max(0) as usize
    }

    pub fn degree_of(&self, t: &TwistedElement) -> Option<i32> {
        t.degree(&self.carrier_degrees, self.generators())
    }

    pub fn format(&self, t: &TwistedElement) -> String {
        t.format(self.carrier_basis(), self.generators())
    }
}

/// `d_ω(t)`.
pub fn twisted_diff(spec: &ComplexSpec, t: &TwistedElement) -> Result<TwistedElement> {
    let conn = &spec.conn;
    if !conn.is_complete() {
        let need = spec.required_len().min(conn.natural_len());
        if conn.max_len() < need {
            return Err(Error::TruncationOverflow { have: conn.max_len(), need });
        }
    }
    if !t.is_zero() && t.space() != spec.space() {
        return Err(Error::CarrierMismatch(format!("element lives in {:?}, complex in {:?}", t.space(), spec.space())));
    }
    let gens = conn.generators();
    let cdeg = spec.carrier_degrees();
    let mut out = conn.eth().apply(t, cdeg, gens);
    let omega = conn.omega();
    match &spec.coeffs {
        Coefficients::Words => {}
        Coefficients::Algebra => {
            let alg = &spec.algebra;
            out = out.add(&t.map_carrier(Space::Algebra, |a| alg.diff_basis(a).clone()));
            for (deg, part) in homogeneous_parts(t, cdeg, gens) {
                let wt = tensor_mul(Space::Algebra, &omega, &part, cdeg, gens, |a, b| alg.mul_basis(a, b));
                let tw = tensor_mul(Space::Algebra, &part, &omega, alg.basis().degrees(), gens, |a, b| alg.mul_basis(a, b));
                out = out.add(&wt).add_scaled(&-scalar::sign(deg as i64), &tw);
            }
        }
        Coefficients::Bimodule(m) => {
            let alg = &spec.algebra;
            out = out.add(&t.map_carrier(Space::Module, |a| m.diff_basis(a).clone()));
            for (deg, part) in homogeneous_parts(t, cdeg, gens) {
                let wt = tensor_mul(Space::Module, &omega, &part, cdeg, gens, |a, x| m.left(a, x));
                let tw = tensor_mul(Space::Module, &part, &omega, alg.basis().degrees(), gens, |x, a| m.right(x, a));
                out = out.add(&wt).add_scaled(&-scalar::sign(deg as i64), &tw);
            }
        }
    }
    Ok(out)
}

fn homogeneous_parts(t: &TwistedElement, cdeg: &[i32], gens: &Generators) -> BTreeMap<i32, TwistedElement> {
    let mut parts: BTreeMap<i32, Vec<(Key, Scalar)>> = BTreeMap::new();
    for ((a, w), c) in t.terms() {
        parts.entry(cdeg[*a] + gens.deg(w)).or_default().push(((*a, w.clone()), c.clone()));
    }
    parts.into_iter().map(|(d, terms)| (d, TwistedElement::from_terms(t.space(), terms))).collect()
}

/// All `(carrier, word)` pairs of total degree `d`, carriers in index order,
/// words in (length, lexicographic) order.
pub fn basis_enumeration(spec: &ComplexSpec, d: i32) -> Vec<Key> {
    let gens = spec.generators();
    let cap = (spec.max_carrier_degree() - d).max(0) as usize;
    let mut out = Vec::new();
    for (a, &ca) in spec.carrier_degrees().iter().enumerate() {
        if ca < d {
            continue;
        }
        for w in gens.words_of_degree(d - ca, cap) {
            out.push((a, w));
        }
    }
    out
}

/// Expresses cocycles of one degree in the chosen cohomology basis.
#[derive(Clone, Debug)]
struct Reducer {
    index: HashMap<Key, usize>,
    echelon: Echelon,
}

impl Reducer {
    fn coords(&self, t: &TwistedElement) -> Option<SparseVec> {
        let mut entries = Vec::with_capacity(t.len());
        for (k, c) in t.terms() {
            entries.push((*self.index.get(k)?, c.clone()));
        }
        Some(SparseVec::from_entries(entries))
    }
}

/// Cohomology in one degree.
#[derive(Clone, Debug)]
pub struct DegreeEntry {
    pub degree: i32,
    pub chain_dim: usize,
    pub cycle_dim: usize,
    /// Rank of the differential entering this degree.
    pub boundary_dim: usize,
    pub dim: usize,
    /// Representative cocycles, one per basis class.
    pub reps: Vec<TwistedElement>,
    reducer: Reducer,
}

/// Dimensions and representatives over a degree window.
#[derive(Clone, Debug)]
pub struct CohomologyTable {
    window: (i32, i32),
    space: Space,
    entries: Vec<DegreeEntry>,
    /// Rank of the differential leaving the top degree.
    outgoing_rank: usize,
}

impl CohomologyTable {
    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn entries(&self) -> &[DegreeEntry] {
        &self.entries
    }

    pub fn entry(&self, d: i32) -> Option<&DegreeEntry> {
        if d < self.window.0 || d > self.window.1 {
            return None;
        }
        self.entries.get((d - self.window.0) as usize)
    }

    pub fn dim(&self, d: i32) -> Option<usize> {
        self.entry(d).map(|e| e.dim)
    }

    /// `(degree, dim)` rows in increasing degree.
    pub fn dims(&self) -> Vec<(i32, usize)> {
        self.entries.iter().map(|e| (e.degree, e.dim)).collect()
    }

    /// Coordinates of the class of a cocycle in the basis given by `reps`.
    /// Errors if the element is not in the span of the cocycles.
    pub fn classify(&self, t: &TwistedElement, degree: i32) -> Result<SparseVec> {
        let entry = self
            .entry(degree)
            .ok_or_else(|| Error::OutsideWindow(format!("degree {degree} outside {}..{}", self.window.0, self.window.1)))?;
        if t.is_zero() {
            return Ok(SparseVec::new());
        }
        if t.space() != self.space {
            return Err(Error::CarrierMismatch(format!("{:?} element in a {:?} table", t.space(), self.space)));
        }
        let v = entry.reducer.coords(t).ok_or_else(|| Error::Invalid("element has terms outside the degree".into()))?;
        let (rem, tag) = entry.reducer.echelon.reduce(&v);
        if !rem.is_zero() {
            return Err(Error::Invalid("element is not a cocycle".into()));
        }
        Ok(tag)
    }

    /// `Σ (-1)^d dim C^d` versus `Σ (-1)^d dim H^d` plus the two boundary ranks.
    pub fn euler_consistent(&self) -> bool {
        let lo = self.window.0;
        let hi = self.window.1;
        let sgn = |d: i32| if d.rem_euclid(2) == 0 { 1i64 } else { -1 };
        let chains: i64 = self.entries.iter().map(|e| sgn(e.degree) * e.chain_dim as i64).sum();
        let homology: i64 = self.entries.iter().map(|e| sgn(e.degree) * e.dim as i64).sum();
        let incoming = self.entries.first().map(|e| e.boundary_dim).unwrap_or(0) as i64;
        chains == homology + sgn(lo) * incoming + sgn(hi) * self.outgoing_rank as i64
    }
}

fn coords_in(index: &HashMap<Key, usize>, t: &TwistedElement) -> Result<SparseVec> {
    let mut entries = Vec::with_capacity(t.len());
    for (k, c) in t.terms() {
        let i = index.get(k).ok_or_else(|| Error::Invalid("differential left the expected degree".into()))?;
        entries.push((*i, c.clone()));
    }
    Ok(SparseVec::from_entries(entries))
}

fn index_of(basis: &[Key]) -> HashMap<Key, usize> {
    basis.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()
}

/// Matrix of `d_ω` from degree `d` to `d + 1`, as columns.
pub fn differential_matrix(spec: &ComplexSpec, from: &[Key], to: &[Key]) -> Result<Vec<SparseVec>> {
    let index = index_of(to);
    from.iter()
        .map(|(a, w)| {
            let t = TwistedElement::term(spec.space(), *a, w.clone(), scalar::one());
            coords_in(&index, &twisted_diff(spec, &t)?)
        })
        .collect()
}

/// Adds to `t` the first correction (in basis order) supported on carrier
/// elements of positive degree that makes it a cocycle.
pub fn complete_cocycle(spec: &ComplexSpec, t: &TwistedElement) -> Result<TwistedElement> {
    let d = spec.degree_of(t).ok_or_else(|| Error::Invalid("element is zero or not homogeneous".into()))?;
    let target_basis = basis_enumeration(spec, d + 1);
    let index = index_of(&target_basis);
    let target = coords_in(&index, &twisted_diff(spec, t)?)?;
    if target.is_zero() {
        return Ok(t.clone());
    }
    let degs = spec.carrier_degrees();
    let free: Vec<Key> = basis_enumeration(spec, d).into_iter().filter(|(a, _)| degs[*a] > 0).collect();
    let mut ech = Echelon::new();
    for (i, col) in differential_matrix(spec, &free, &target_basis)?.iter().enumerate() {
        ech.insert(col, SparseVec::unit(i));
    }
    let (rem, tag) = ech.reduce(&target);
    if !rem.is_zero() {
        return Err(Error::NotClosed { len: t.max_word_len(), detail: "no correction of positive carrier degree".into() });
    }
    let correction = TwistedElement::from_terms(spec.space(), tag.iter().map(|(i, c)| (free[*i].clone(), -c.clone())));
    Ok(t.add(&correction))
}

/// Exact cohomology over the window.
pub fn cohomology(spec: &ComplexSpec) -> Result<CohomologyTable> {
    let (lo, hi) = spec.window;
    let bases: Vec<Vec<Key>> = (lo - 1..=hi + 1).collect::<Vec<_>>().par_iter().map(|&d| basis_enumeration(spec, d)).collect();
    let basis = |d: i32| &bases[(d - lo + 1) as usize];
    // mats[k] = differential from degree lo - 1 + k.
    let mats: Vec<Vec<SparseVec>> = (lo - 1..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&d| differential_matrix(spec, basis(d), basis(d + 1)))
        .collect::<Result<_>>()?;
    let mat = |d: i32| &mats[(d - lo + 1) as usize];
    let space = spec.space();
    let entries: Vec<DegreeEntry> = (lo..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&d| {
            let elim = linalg::eliminate(mat(d));
            let mut echelon = Echelon::new();
            for col in mat(d - 1).iter().rev() {
                echelon.insert(col, SparseVec::new());
            }
            let boundary_dim = echelon.rank();
            let keys = basis(d);
            let mut reps = Vec::new();
            for kv in &elim.kernel {
                if echelon.insert(kv, SparseVec::unit(reps.len())).is_none() {
                    reps.push(TwistedElement::from_terms(space, kv.iter().map(|(i, c)| (keys[*i].clone(), c.clone()))));
                }
            }
            DegreeEntry {
                degree: d,
                chain_dim: keys.len(),
                cycle_dim: elim.kernel.len(),
                boundary_dim,
                dim: reps.len(),
                reps,
                reducer: Reducer { index: index_of(keys), echelon },
            }
        })
        .collect();
    let outgoing_rank = linalg::rank(mat(hi));
    Ok(CohomologyTable { window: (lo, hi), space, entries, outgoing_rank })
}

/// Cohomology of `(k⟨X⟩, ð)` over a window.
pub fn pure_word_cohomology(conn: &Connection, window: (i32, i32)) -> Result<CohomologyTable> {
    let spec = ComplexSpec::new(DGAlgebra::ground("k"), Coefficients::Words, conn.clone(), window)?;
    cohomology(&spec)
}

/// Products of named classes.
#[derive(Clone, Debug)]
pub struct NamedClass {
    pub name: String,
    pub degree: i32,
    pub rep: TwistedElement,
    /// Coordinates in the table's basis for that degree.
    pub coords: SparseVec,
}

#[derive(Clone, Debug)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub degree: i32,
    /// `None` when the product could not be classified. Outside the window
    /// the coordinates refer to a one-degree table of their own.
    pub coords: Option<SparseVec>,
    /// The product written in terms of the named classes of that degree,
    /// when it lies in their span.
    pub in_names: Option<Vec<(String, Scalar)>>,
}

impl ProductEntry {
    pub fn is_zero(&self) -> Option<bool> {
        self.coords.as_ref().map(|c| c.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct RingPresentation {
    pub generators: Vec<NamedClass>,
    pub products: Vec<ProductEntry>,
    /// Triples `(a, b, c)` whose associativity was checked in the window.
    pub associativity_checked: usize,
}

impl RingPresentation {
    pub fn product(&self, a: &str, b: &str) -> Option<&ProductEntry> {
        self.products.iter().find(|p| p.left == a && p.right == b)
    }

    pub fn class(&self, name: &str) -> Option<&NamedClass> {
        self.generators.iter().find(|g| g.name == name)
    }
}

/// Class of a homogeneous cocycle; checks closedness first.
pub fn class_of(spec: &ComplexSpec, table: &CohomologyTable, t: &TwistedElement) -> Result<(i32, SparseVec)> {
    let d = spec.degree_of(t).ok_or_else(|| Error::Invalid("element is zero or not homogeneous".into()))?;
    let dt = twisted_diff(spec, t)?;
    if !dt.is_zero() {
        return Err(Error::Invalid(format!("not closed: d_ω = {}", spec.format(&dt))));
    }
    Ok((d, table.classify(t, d)?))
}

fn product_in(spec: &ComplexSpec, u: &TwistedElement, v: &TwistedElement) -> Result<TwistedElement> {
    match spec.coefficients() {
        Coefficients::Bimodule(_) => Err(Error::CarrierMismatch("no product on bimodule coefficients".into())),
        _ => elem_mul(spec.algebra(), spec.generators(), u, v),
    }
}

/// Multiplication table of named representatives, reduced modulo `im d_ω`.
pub fn ring_structure(spec: &ComplexSpec, table: &CohomologyTable, named: &[(String, TwistedElement)]) -> Result<RingPresentation> {
    let mut generators = Vec::new();
    for (name, rep) in named {
        let (degree, coords) = class_of(spec, table, rep).map_err(|e| Error::Invalid(format!("{name}: {e}")))?;
        if coords.is_zero() {
            return Err(Error::Invalid(format!("{name} represents the zero class")));
        }
        generators.push(NamedClass { name: name.clone(), degree, rep: rep.clone(), coords });
    }
    let (lo, hi) = table.window();
    let express = |degree: i32, coords: &SparseVec| -> Option<Vec<(String, Scalar)>> {
        let same: Vec<&NamedClass> = generators.iter().filter(|g| g.degree == degree).collect();
        let mut ech = Echelon::new();
        for (i, g) in same.iter().enumerate() {
            ech.insert(&g.coords, SparseVec::unit(i));
        }
        let (rem, tag) = ech.reduce(coords);
        rem.is_zero().then(|| tag.iter().map(|(i, c)| (same[*i].name.clone(), c.clone())).collect())
    };
    let mut products = Vec::new();
    for a in &generators {
        for b in &generators {
            let degree = a.degree + b.degree;
            let p = product_in(spec, &a.rep, &b.rep)?;
            let coords = if degree >= lo && degree <= hi {
                Some(table.classify(&p, degree)?)
            } else {
                // A one-degree table, when the connection reaches that far.
                spec.with_window((degree, degree))
                    .and_then(|s| cohomology(&s))
                    .and_then(|t| t.classify(&p, degree))
                    .ok()
            };
            let in_names = coords.as_ref().and_then(|c| express(degree, c));
            products.push(ProductEntry { left: a.name.clone(), right: b.name.clone(), degree, coords, in_names });
        }
    }
    let mut checked = 0;
    for a in &generators {
        for b in &generators {
            for c in &generators {
                let degree = a.degree + b.degree + c.degree;
                let partials = [a.degree + b.degree, b.degree + c.degree];
                if degree < lo || degree > hi || partials.iter().any(|&p| p < lo || p > hi) {
                    continue;
                }
                let left = product_in(spec, &product_in(spec, &a.rep, &b.rep)?, &c.rep)?;
                let right = product_in(spec, &a.rep, &product_in(spec, &b.rep, &c.rep)?)?;
                if table.classify(&left, degree)? != table.classify(&right, degree)? {
                    return Err(Error::Invalid(format!("product not associative on ({}, {}, {})", a.name, b.name, c.name)));
                }
                checked += 1;
            }
        }
    }
    Ok(RingPresentation { generators, products, associativity_checked: checked })
}

/// `𝒫(a⊗w) = φ_a⊗w` with `φ_a(b) = trace(ab)`, a map of degree `-n`.
#[derive(Clone, Debug)]
pub struct PoincareMap {
    n: i32,
    trace: SparseVec,
    columns: Vec<SparseVec>,
}

impl PoincareMap {
    /// Checks that `trace` lives in degree `n`, kills boundaries and gives a
    /// nondegenerate pairing.
    pub fn new(alg: &DGAlgebra, trace: SparseVec, n: i32) -> Result<Self> {
        let dim = alg.dim();
        if trace.iter().any(|(a, _)| alg.degree(*a) != n) {
            return Err(Error::DegeneratePairing(format!("trace is nonzero outside degree {n}")));
        }
        for a in 0..dim {
            if !alg.diff_basis(a).dot(&trace).is_zero() {
                return Err(Error::DegeneratePairing(format!("trace does not vanish on d({})", alg.basis().name(a))));
            }
        }
        let columns: Vec<SparseVec> = (0..dim)
            .map(|a| SparseVec::from_entries((0..dim).map(|b| (b, alg.mul_basis(a, b).dot(&trace)))))
            .collect();
        if linalg::rank(&columns) != dim {
            return Err(Error::DegeneratePairing(format!("pairing on {} has rank {} < {dim}", alg.name(), linalg::rank(&columns))));
        }
        Ok(Self { n, trace, columns })
    }

    /// Trace dual to the unique cohomology class of degree `n`.
    pub fn from_fundamental_class(alg: &DGAlgebra, hd: &HomotopyData, n: i32) -> Result<Self> {
        let top: Vec<usize> = (0..hd.num_classes()).filter(|&r| hd.class_degree(r) == n).collect();
        if top.len() != 1 {
            return Err(Error::DegeneratePairing(format!("expected one class in degree {n}, found {}", top.len())));
        }
        let trace = SparseVec::from_entries((0..alg.dim()).map(|a| (a, hd.proj_column(a).get(top[0]))));
        Self::new(alg, trace, n)
    }

    pub fn top_degree(&self) -> i32 {
        self.n
    }

    pub fn trace(&self) -> &SparseVec {
        &self.trace
    }

    /// `φ_a` in the dual basis.
    pub fn column(&self, a: usize) -> &SparseVec {
        &self.columns[a]
    }

    pub fn apply(&self, t: &TwistedElement) -> TwistedElement {
        t.map_carrier(Space::Module, |a| self.columns[a].clone())
    }

    /// Sign `s` with `d^{A*}_ω ∘ 𝒫 = s · 𝒫 ∘ d_ω`.
    pub fn chain_sign(&self) -> Scalar {
        scalar::sign(self.n as i64)
    }
}

/// Outcome of the Poincaré duality check in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareDegree {
    pub degree: i32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub chain_map_ok: bool,
}

impl PoincareDegree {
    pub fn is_iso(&self) -> bool {
        self.chain_map_ok && self.rank == self.source_dim && self.rank == self.target_dim
    }
}

/// Checks the chain-map identity on every basis element of each window
/// degree and the rank of the induced map `H^d(A⊗k⟨X⟩) → H^{d-n}(A*⊗k⟨X⟩)`.
pub fn poincare_check(
    source: &ComplexSpec,
    source_table: &CohomologyTable,
    target: &ComplexSpec,
    target_table: &CohomologyTable,
    map: &PoincareMap,
) -> Result<Vec<PoincareDegree>> {
    let (lo, hi) = source_table.window();
    let n = map.top_degree();
    let s = map.chain_sign();
    (lo..=hi)
        .map(|d| {
            let mut chain_map_ok = true;
            for (a, w) in basis_enumeration(source, d) {
                let t = TwistedElement::term(Space::Algebra, a, w, scalar::one());
                let lhs = twisted_diff(target, &map.apply(&t))?;
                let rhs = map.apply(&twisted_diff(source, &t)?).scale(&s);
                if lhs != rhs {
                    chain_map_ok = false;
                    break;
                }
            }
            let entry = source_table.entry(d).expect("window degree");
            let target_dim = target_table
                .dim(d - n)
                .ok_or_else(|| Error::OutsideWindow(format!("degree {} missing from the dual table", d - n)))?;
            let cols = entry.reps.iter().map(|r| target_table.classify(&map.apply(r), d - n)).collect::<Result<Vec<_>>>()?;
            Ok(PoincareDegree { degree: d, source_dim: entry.dim, target_dim, rank: linalg::rank(&cols), chain_map_ok })
        })
        .collect()
}

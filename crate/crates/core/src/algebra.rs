//! Finite-dimensional differential graded algebras given by structure constants.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::scalar::{self, Scalar};

/// Named homogeneous basis. Cohomological degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBasis {
    names: Vec<String>,
    degrees: Vec<i32>,
}

impl GradedBasis {
    pub fn new(elements: Vec<(String, i32)>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, (n, _)) in elements.iter().enumerate() {
            if let Some(j) = seen.insert(n.clone(), i) {
                return Err(Error::Invalid(format!("duplicate basis name {n:?} (positions {j} and {i})")));
            }
        }
        let (names, degrees) = elements.into_iter().unzip();
        Ok(Self { names, degrees })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Indices of basis elements of degree `k`, in basis order.
    pub fn in_degree(&self, k: i32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == k).collect()
    }

    pub fn max_degree(&self) -> i32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> i32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Degree of a nonzero homogeneous vector, `None` for zero or mixed.
    pub fn vec_degree(&self, v: &SparseVec) -> Option<i32> {
        let mut it = v.iter().map(|(i, _)| self.degrees[*i]);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn format_vec(&self, v: &SparseVec) -> String {
        format_combination(v.iter().map(|(i, c)| (self.name(*i).to_string(), c.clone())))
    }
}

/// Renders `Σ c·name` as `2 a - 1/2 b`; zero renders as `0`.
pub fn format_combination<I: IntoIterator<Item = (String, Scalar)>>(terms: I) -> String {
    let mut out = String::new();
    for (k, (name, c)) in terms.into_iter().enumerate() {
        let neg = scalar::is_negative(&c);
        let abs = if neg { -c } else { c };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if abs != scalar::one() {
            out.push_str(&scalar::format(&abs));
            out.push(' ');
        }
        out.push_str(&name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Something with a graded basis and a differential: the carrier of a
/// tensor or twisted complex.
pub trait Carrier {
    fn basis(&self) -> &GradedBasis;
    fn diff_basis(&self, i: usize) -> &SparseVec;

    fn dim(&self) -> usize {
        self.basis().len()
    }

    fn degree(&self, i: usize) -> i32 {
        self.basis().degree(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    name: String,
    basis: GradedBasis,
    unit: usize,
    /// `mult[i][j]` = product of basis elements `i·j`.
    mult: Vec<Vec<SparseVec>>,
    /// `diff[i]` = `d(e_i)`.
    diff: Vec<SparseVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    DiffDegree,
    MultDegree,
    DiffSquare,
    Leibniz,
    Associativity,
    Unit,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::DiffDegree => "d has degree +1",
            Axiom::MultDegree => "product is degree-additive",
            Axiom::DiffSquare => "d∘d = 0",
            Axiom::Leibniz => "graded Leibniz rule",
            Axiom::Associativity => "associativity",
            Axiom::Unit => "two-sided unit",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub axiom: Axiom,
    /// Basis indices witnessing the failure.
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<AxiomFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn fail(&mut self, axiom: Axiom, witness: Vec<usize>, detail: String) {
        self.failures.push(AxiomFailure { axiom, witness, detail });
    }

    pub fn summary(&self) -> String {
        self.failures
            .iter()
            .map(|f| format!("{} fails at {:?}: {}", f.axiom, f.witness, f.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl DGAlgebra {
    /// Builds an algebra from raw structure constants without validating.
    pub fn from_parts(
        name: impl Into<String>,
        basis: GradedBasis,
        unit: usize,
        mult: Vec<Vec<SparseVec>>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        let n = basis.len();
        if unit >= n {
            return Err(Error::InvalidAlgebra("unit index out of range".into()));
        }
        if mult.len() != n || mult.iter().any(|r| r.len() != n) || diff.len() != n {
            return Err(Error::InvalidAlgebra("structure constant tables have wrong shape".into()));
        }
        let in_range = |v: &SparseVec| v.iter().all(|(i, _)| *i < n);
        if !diff.iter().all(in_range) || !mult.iter().flatten().all(in_range) {
            return Err(Error::InvalidAlgebra("structure constant refers to unknown basis index".into()));
        }
        Ok(Self { name: name.into(), basis, unit, mult, diff })
    }

    /// Like [`from_parts`](Self::from_parts) but rejects invalid algebras.
    pub fn new(
        name: impl Into<String>,
        basis: GradedBasis,
        unit: usize,
        mult: Vec<Vec<SparseVec>>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        let a = Self::from_parts(name, basis, unit, mult, diff)?;
        let report = a.validate();
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra(report.summary()));
        }
        Ok(a)
    }

    /// The one-dimensional algebra `k`.
    pub fn ground(name: impl Into<String>) -> Self {
        let basis = GradedBasis::new(vec![("1".into(), 0)]).expect("single name");
        Self { name: name.into(), basis, unit: 0, mult: vec![vec![SparseVec::unit(0)]], diff: vec![SparseVec::new()] }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i][j]
    }

    pub fn mul(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let ab = a * b;
                for (k, c) in self.mult[*i][*j].iter() {
                    *out.entry(*k).or_insert_with(Scalar::zero) += &ab * c;
                }
            }
        }
        SparseVec::from_map(out)
    }

    pub fn d(&self, v: &SparseVec) -> SparseVec {
        crate::linalg::apply(&self.diff, v)
    }

    pub fn diff_columns(&self) -> &[SparseVec] {
        &self.diff
    }

    /// Checks every dg algebra axiom on basis elements; never aborts.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let n = self.dim();
        let deg = |i: usize| self.basis.degree(i);
        for i in 0..n {
            if let Some(dd) = self.basis.vec_degree(&self.diff[i]) {
                if dd != deg(i) + 1 {
                    rep.fail(Axiom::DiffDegree, vec![i], format!("d({}) has degree {dd}", self.basis.name(i)));
                }
            } else if !self.diff[i].is_zero() {
                rep.fail(Axiom::DiffDegree, vec![i], format!("d({}) is not homogeneous", self.basis.name(i)));
            }
            let dd = self.d(&self.diff[i]);
            if !dd.is_zero() {
                rep.fail(Axiom::DiffSquare, vec![i], format!("d(d({})) = {}", self.basis.name(i), self.basis.format_vec(&dd)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let m = &self.mult[i][j];
                match self.basis.vec_degree(m) {
                    Some(k) if k != deg(i) + deg(j) => rep.fail(
                        Axiom::MultDegree,
                        vec![i, j],
                        format!("{}·{} has degree {k}", self.basis.name(i), self.basis.name(j)),
                    ),
                    None if !m.is_zero() => rep.fail(Axiom::MultDegree, vec![i, j], "product not homogeneous".into()),
                    _ => {}
                }
                // d(ab) = (da)b + (-1)^{|a|} a(db)
                let lhs = self.d(m);
                let rhs = self
                    .mul(&self.diff[i], &SparseVec::unit(j))
                    .add_scaled(&scalar::sign(deg(i) as i64), &self.mul(&SparseVec::unit(i), &self.diff[j]));
                if lhs != rhs {
                    rep.fail(Axiom::Leibniz, vec![i, j], format!("on {}·{}", self.basis.name(i), self.basis.name(j)));
                }
            }
            let e = SparseVec::unit(i);
            let u = SparseVec::unit(self.unit);
            if self.mul(&u, &e) != e || self.mul(&e, &u) != e {
                rep.fail(Axiom::Unit, vec![self.unit, i], format!("unit does not fix {}", self.basis.name(i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.mult[i][j];
                for k in 0..n {
                    let l = self.mul(ij, &SparseVec::unit(k));
                    let r = self.mul(&SparseVec::unit(i), &self.mult[j][k]);
                    if l != r {
                        rep.fail(
                            Axiom::Associativity,
                            vec![i, j, k],
                            format!("({0}·{1})·{2} ≠ {0}·({1}·{2})", self.basis.name(i), self.basis.name(j), self.basis.name(k)),
                        );
                    }
                }
            }
        }
        rep
    }

    /// Graded commutativity `ab = (-1)^{|a||b|} ba` on basis elements.
    pub fn is_graded_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s = scalar::sign((self.degree(i) * self.degree(j)) as i64);
                self.mult[i][j] == self.mult[j][i].scale(&s)
            })
        })
    }

    /// Graded tensor product `A ⊗ B` with the Koszul sign rule.
    ///
    /// Basis pairs are ordered with the `B` index varying fastest.
    pub fn tensor(a: &DGAlgebra, b: &DGAlgebra, name: impl Into<String>) -> Result<Self> {
        let (na, nb) = (a.dim(), b.dim());
        let idx = |i: usize, j: usize| i * nb + j;
        let mut taken: BTreeMap<String, usize> = BTreeMap::new();
        let mut elements = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let mut nm = match (i == a.unit, j == b.unit) {
                    (true, true) => "1".to_string(),
                    (false, true) => a.basis.name(i).to_string(),
                    (true, false) => b.basis.name(j).to_string(),
                    (false, false) => format!("{}_{}", a.basis.name(i), b.basis.name(j)),
                };
                while taken.contains_key(&nm) {
                    nm.push('\'');
                }
                taken.insert(nm.clone(), idx(i, j));
                elements.push((nm, a.degree(i) + b.degree(j)));
            }
        }
        let basis = GradedBasis::new(elements)?;
        let mut mult = vec![vec![SparseVec::new(); na * nb]; na * nb];
        for i in 0..na {
            for j in 0..nb {
                for k in 0..na {
                    for l in 0..nb {
                        // (a_i⊗b_j)(a_k⊗b_l) = (-1)^{|b_j||a_k|} a_i a_k ⊗ b_j b_l
                        let s = scalar::sign((b.degree(j) * a.degree(k)) as i64);
                        let entries = a.mult[i][k].iter().flat_map(|(p, x)| {
                            b.mult[j][l].iter().map(move |(q, y)| (idx(*p, *q), x * y))
                        });
                        mult[idx(i, j)][idx(k, l)] = SparseVec::from_entries(entries).scale(&s);
                    }
                }
            }
        }
        let mut diff = vec![SparseVec::new(); na * nb];
        for i in 0..na {
            for j in 0..nb {
                // d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db
                let s = scalar::sign(a.degree(i) as i64);
                let left = a.diff[i].iter().map(|(p, x)| (idx(*p, j), x.clone()));
                let right = b.diff[j].iter().map(|(q, y)| (idx(i, *q), y * &s));
                diff[idx(i, j)] = SparseVec::from_entries(left.chain(right));
            }
        }
        Self::new(name, basis, idx(a.unit, b.unit), mult, diff)
    }
}

impl Carrier for DGAlgebra {
    fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    fn diff_basis(&self, i: usize) -> &SparseVec {
        &self.diff[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn truncated_poly(n: usize) -> DGAlgebra {
        // k[h]/h^{n+1}, |h| = 2
        let basis = GradedBasis::new((0..=n).map(|i| (format!("h{i}"), 2 * i as i32)).collect()).unwrap();
        let mult = (0..=n)
            .map(|i| (0..=n).map(|j| if i + j <= n { SparseVec::unit(i + j) } else { SparseVec::new() }).collect())
            .collect();
        DGAlgebra::new("t", basis, 0, mult, vec![SparseVec::new(); n + 1]).unwrap()
    }

    #[test]
    fn ground_is_valid() {
        assert!(DGAlgebra::ground("k").validate().is_valid());
    }

    #[test]
    fn truncated_polynomial_is_valid_and_commutative() {
        let a = truncated_poly(3);
        assert!(a.validate().is_valid());
        assert!(a.is_graded_commutative());
    }

    #[test]
    fn scaled_square_still_satisfies_axioms() {
        // h·h = 2h² keeps every axiom; validation checks axioms, not intent.
        let basis = GradedBasis::new(vec![("1".into(), 0), ("h".into(), 2), ("h2".into(), 4)]).unwrap();
        let mut mult = vec![vec![SparseVec::new(); 3]; 3];
        for i in 0..3 {
            mult[0][i] = SparseVec::unit(i);
            mult[i][0] = SparseVec::unit(i);
        }
        mult[1][1] = SparseVec::unit(2).scale(&int(2));
        let a = DGAlgebra::from_parts("cp2'", basis, 0, mult, vec![SparseVec::new(); 3]).unwrap();
        assert!(a.validate().is_valid());
    }

    #[test]
    fn reports_broken_axioms_with_witnesses() {
        // d(a) = b but d(b) = a: wrong degree and d² ≠ 0.
        let basis = GradedBasis::new(vec![("1".into(), 0), ("a".into(), 2), ("b".into(), 3)]).unwrap();
        let mut mult = vec![vec![SparseVec::new(); 3]; 3];
        for i in 0..3 {
            mult[0][i] = SparseVec::unit(i);
            mult[i][0] = SparseVec::unit(i);
        }
        let diff = vec![SparseVec::new(), SparseVec::unit(2), SparseVec::unit(1)];
        let a = DGAlgebra::from_parts("bad", basis, 0, mult, diff).unwrap();
        let rep = a.validate();
        assert!(rep.failures.iter().any(|f| f.axiom == Axiom::DiffDegree && f.witness == vec![2]));
        assert!(rep.failures.iter().any(|f| f.axiom == Axiom::DiffSquare));
    }

    #[test]
    fn non_associative_detected() {
        let basis = GradedBasis::new(vec![("1".into(), 0), ("a".into(), 2), ("b".into(), 4), ("c".into(), 6)]).unwrap();
        let mut mult = vec![vec![SparseVec::new(); 4]; 4];
        for i in 0..4 {
            mult[0][i] = SparseVec::unit(i);
            mult[i][0] = SparseVec::unit(i);
        }
        mult[1][1] = SparseVec::unit(2);
        mult[2][1] = SparseVec::unit(3);
        // a·b left at zero: (a·a)·a = c but a·(a·a) = 0
        let a = DGAlgebra::from_parts("na", basis, 0, mult, vec![SparseVec::new(); 4]).unwrap();
        let rep = a.validate();
        assert!(rep.failures.iter().any(|f| f.axiom == Axiom::Associativity && f.witness == vec![1, 1, 1]));
    }

    #[test]
    fn tensor_of_truncated_polys() {
        let a = truncated_poly(1);
        let t = DGAlgebra::tensor(&a, &a, "p").unwrap();
        assert_eq!(t.dim(), 4);
        assert!(t.basis().names().iter().all(|n| !n.is_empty()));
        assert!(t.is_graded_commutative());
    }

    #[test]
    fn format_combination_signs() {
        let s = format_combination(vec![("a".into(), int(-1)), ("b".into(), int(2)), ("c".into(), int(-3))]);
        assert_eq!(s, "-a + 2 b - 3 c");
        assert_eq!(format_combination(Vec::<(String, Scalar)>::new()), "0");
    }
}

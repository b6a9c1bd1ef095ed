//! Brute-force Hochschild cohomology on the normalized bar complex.
//!
//! Cochains are maps `f: B̄(A) → M` on bar words `[sa_1|…|sa_m]` with
//! `a_i` in the reduced basis (unit removed) and `|sa| = |a| - 1`. The
//! degree of `f` is `|f(β)| - |β|`. With the universal twisting cochain
//! `τ[sa] = a` the differential is
//! `δf = d∘f - (-1)^{|f|} f∘b + τ∪f - (-1)^{|f|} f∪τ`,
//! where `(f∪g)(β) = Σ (-1)^{|g||β'|} f(β')g(β'')` over splittings
//! `β = β'β''` and `b` is the bar differential
//! `b[sa] = -[s da]`, `b[sa|sb] = -(-1)^{|sa|}[s(ab)]`, extended as a
//! coderivation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{Carrier, DGAlgebra};
use crate::element::TwistedElement;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseVec};
use crate::scalar::{self, Scalar};
use crate::transfer::{Connection, HomotopyData};
use crate::twisted::{dualize, DGBimodule};
use crate::words::{Generators, Word};

/// Largest cochain space (per degree) the oracle will build.
pub const BUDGET: usize = 400_000;

/// Coefficients of the cochains: `A` itself or a bimodule such as `A*`.
#[derive(Clone, Debug)]
pub enum OracleCoefficients {
    Algebra,
    Dual(DGBimodule),
}

/// The normalized bar construction of a simply connected algebra.
#[derive(Clone, Debug)]
pub struct BarComplex {
    alg: DGAlgebra,
    coeffs: OracleCoefficients,
    /// Basis index of each letter.
    letters: Vec<usize>,
    letter_of: Vec<Option<usize>>,
    /// Letters as generators of degree `-|sa|`, for word enumeration.
    alphabet: Generators,
}

/// A cochain: values on bar words, of a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarCochain {
    pub degree: i32,
    pub values: BTreeMap<Word, SparseVec>,
}

impl BarCochain {
    pub fn zero(degree: i32) -> Self {
        Self { degree, values: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }

    pub fn value(&self, w: &Word) -> SparseVec {
        self.values.get(w).cloned().unwrap_or_default()
    }

    fn add_at(&mut self, w: Word, v: &SparseVec, c: &Scalar) {
        if v.is_zero() || c.is_zero() {
            return;
        }
        let e = self.values.entry(w).or_default();
        *e = e.add_scaled(c, v);
    }

    fn prune(mut self) -> Self {
        self.values.retain(|_, v| !v.is_zero());
        self
    }

    pub fn add(&self, other: &BarCochain) -> BarCochain {
        let mut out = self.clone();
        for (w, v) in &other.values {
            out.add_at(w.clone(), v, &scalar::one());
        }
        out.prune()
    }

    pub fn scale(&self, c: &Scalar) -> BarCochain {
        let mut out = BarCochain::zero(self.degree);
        for (w, v) in &self.values {
            out.add_at(w.clone(), v, c);
        }
        out.prune()
    }

    /// Largest arity with a nonzero value.
    pub fn arity(&self) -> usize {
        self.values.iter().filter(|(_, v)| !v.is_zero()).map(|(w, _)| w.len()).max().unwrap_or(0)
    }
}

/// One way a cochain value at `β` feeds into `(δf)(γ)`.
#[derive(Clone, Debug)]
enum Contribution {
    Diff,
    Bar(Scalar),
    /// `γ = [sa|β]`.
    LeftTau(usize),
    /// `γ = [β|sa]`, with `|β|`.
    RightTau(usize, i32),
}

impl BarComplex {
    pub fn new(alg: &DGAlgebra, coeffs: OracleCoefficients) -> Result<Self> {
        let report = alg.validate();
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra(report.summary()));
        }
        let mut letters = Vec::new();
        let mut letter_of = vec![None; alg.dim()];
        for a in 0..alg.dim() {
            if a == alg.unit() {
                continue;
            }
            if alg.degree(a) < 2 {
                return Err(Error::NotSimplyConnected(format!(
                    "reduced basis element {} has degree {} < 2",
                    alg.basis().name(a),
                    alg.degree(a)
                )));
            }
            letter_of[a] = Some(letters.len());
            letters.push(a);
        }
        let alphabet = Generators::new(
            letters.iter().map(|&a| format!("s{}", alg.basis().name(a))).collect(),
            letters.iter().map(|&a| 1 - alg.degree(a)).collect(),
        );
        Ok(Self { alg: alg.clone(), coeffs, letters, letter_of, alphabet })
    }

    pub fn algebra(&self) -> &DGAlgebra {
        &self.alg
    }

    /// Total shifted degree `Σ (|a_i| - 1)`.
    pub fn word_degree(&self, w: &Word) -> i32 {
        -self.alphabet.deg(w)
    }

    pub fn letter_basis(&self, l: usize) -> usize {
        self.letters[l]
    }

    pub fn letter_of(&self, basis: usize) -> Option<usize> {
        self.letter_of[basis]
    }

    fn shifted(&self, l: usize) -> i32 {
        -self.alphabet.degree(l)
    }

    fn coeff_degrees(&self) -> Vec<i32> {
        match &self.coeffs {
            OracleCoefficients::Algebra => self.alg.basis().degrees().to_vec(),
            OracleCoefficients::Dual(m) => m.basis().degrees().to_vec(),
        }
    }

    fn coeff_d(&self, v: &SparseVec) -> SparseVec {
        match &self.coeffs {
            OracleCoefficients::Algebra => self.alg.d(v),
            OracleCoefficients::Dual(m) => linalg::apply(&(0..m.dim()).map(|i| m.diff_basis(i).clone()).collect::<Vec<_>>(), v),
        }
    }

    fn act_left(&self, a: usize, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (o, c) in v.iter() {
            let t = match &self.coeffs {
                OracleCoefficients::Algebra => self.alg.mul_basis(a, *o),
                OracleCoefficients::Dual(m) => m.left(a, *o),
            };
            out = out.add_scaled(c, t);
        }
        out
    }

    fn act_right(&self, v: &SparseVec, a: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (o, c) in v.iter() {
            let t = match &self.coeffs {
                OracleCoefficients::Algebra => self.alg.mul_basis(*o, a),
                OracleCoefficients::Dual(m) => m.right(*o, a),
            };
            out = out.add_scaled(c, t);
        }
        out
    }

    /// Bar differential of a bar word.
    pub fn bar_differential(&self, w: &Word) -> Vec<(Word, Scalar)> {
        let letters: Vec<usize> = w.letters().collect();
        let mut out = Vec::new();
        let mut prefix = 0i64;
        for k in 0..letters.len() {
            let s = scalar::sign(prefix);
            // b[sa] = -[s da]
            for (t, c) in self.alg.diff_basis(self.letters[letters[k]]).iter() {
                if let Some(lt) = self.letter_of[*t] {
                    out.push((w.splice(k, &Word::letter(lt)), -(c * &s)));
                }
            }
            // b[sa|sb] = -(-1)^{|sa|} [s(ab)]
            if k + 1 < letters.len() {
                let (a, b) = (self.letters[letters[k]], self.letters[letters[k + 1]]);
                let s2 = &s * scalar::sign(self.shifted(letters[k]) as i64);
                for (t, c) in self.alg.mul_basis(a, b).iter() {
                    if let Some(lt) = self.letter_of[*t] {
                        let mut v: Vec<usize> = letters[..k].to_vec();
                        v.push(lt);
                        v.extend_from_slice(&letters[k + 2..]);
                        out.push((Word::from_letters(v), -(c * &s2)));
                    }
                }
            }
            prefix += self.shifted(letters[k]) as i64;
        }
        out
    }

    /// All `(β, contribution)` entering `(δf)(γ)`.
    fn contributions(&self, gamma: &Word) -> Vec<(Word, Contribution)> {
        let mut out = vec![(gamma.clone(), Contribution::Diff)];
        for (beta, c) in self.bar_differential(gamma) {
            out.push((beta, Contribution::Bar(c)));
        }
        let m = gamma.len();
        if m >= 1 {
            let (head, rest) = gamma.split_at(1);
            out.push((rest, Contribution::LeftTau(self.letters[head.letters().next().expect("letter")])));
            let (front, last) = gamma.split_at(m - 1);
            let deg = self.word_degree(&front);
            out.push((front, Contribution::RightTau(self.letters[last.letters().next().expect("letter")], deg)));
        }
        out
    }

    fn apply_contribution(&self, c: &Contribution, v: &SparseVec, fdeg: i32) -> SparseVec {
        let sf = scalar::sign(fdeg as i64);
        match c {
            Contribution::Diff => self.coeff_d(v),
            Contribution::Bar(x) => v.scale(&-(x * &sf)),
            Contribution::LeftTau(a) => {
                let s = scalar::sign((fdeg * (self.alg.degree(*a) - 1)) as i64);
                self.act_left(*a, v).scale(&s)
            }
            Contribution::RightTau(a, deg) => {
                let s = -(&sf * scalar::sign(*deg as i64));
                self.act_right(v, *a).scale(&s)
            }
        }
    }

    /// Basis `(output index, bar word)` of cochains of degree `d`.
    pub fn cochain_basis(&self, d: i32) -> Result<Vec<(usize, Word)>> {
        let degs = self.coeff_degrees();
        let total: u128 = degs.iter().filter(|&&c| c >= d).map(|&c| self.count_words(c - d)).fold(0, u128::saturating_add);
        if total > BUDGET as u128 {
            return Err(Error::Budget(format!(
                "{total} cochains in degree {d} (limit {BUDGET}); arity bound {}",
                self.arity_bound(d)
            )));
        }
        let mut out = Vec::with_capacity(total as usize);
        for (o, &deg) in degs.iter().enumerate() {
            let wd = deg - d;
            if wd >= 0 {
                out.extend(self.alphabet.words_of_degree(-wd, wd as usize).into_iter().map(|w| (o, w)));
            }
        }
        Ok(out)
    }

    /// Number of bar words of shifted degree `wd`.
    fn count_words(&self, wd: i32) -> u128 {
        let wd = wd as usize;
        let mut c = vec![0u128; wd + 1];
        c[0] = 1;
        for k in 1..=wd {
            for l in 0..self.letters.len() {
                let s = self.shifted(l) as usize;
                if s <= k {
                    c[k] = c[k].saturating_add(c[k - s]);
                }
            }
        }
        c[wd]
    }

    /// Largest arity of a cochain of degree `d`.
    pub fn arity_bound(&self, d: i32) -> usize {
        (self.coeff_degrees().into_iter().max().unwrap_or(0) - d).max(0) as usize
    }

    /// Matrix of `δ` from degree `d` to `d + 1`, built row by row.
    pub fn delta_matrix(&self, from: &[(usize, Word)], to: &[(usize, Word)]) -> Vec<SparseVec> {
        let col_index: HashMap<&(usize, Word), usize> = from.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let row_index: HashMap<&(usize, Word), usize> = to.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut by_word: BTreeMap<&Word, Vec<usize>> = BTreeMap::new();
        for (o, w) in from {
            by_word.entry(w).or_default().push(*o);
        }
        let gammas: Vec<&Word> = {
            let mut g: Vec<&Word> = to.iter().map(|(_, w)| w).collect();
            g.sort();
            g.dedup();
            g
        };
        let mut cols: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); from.len()];
        let degs = self.coeff_degrees();
        for gamma in gammas {
            for (beta, contrib) in self.contributions(gamma) {
                let Some(outs) = by_word.get(&beta) else { continue };
                let bdeg = self.word_degree(&beta);
                for &o in outs {
                    let fdeg = degs[o] - bdeg;
                    let val = self.apply_contribution(&contrib, &SparseVec::unit(o), fdeg);
                    let col = col_index[&(o, beta.clone())];
                    for (o2, c) in val.iter() {
                        if let Some(&row) = row_index.get(&(*o2, gamma.clone())) {
                            let e = cols[col].entry(row).or_insert_with(Scalar::zero);
                            *e += c;
                        }
                    }
                }
            }
        }
        cols.into_iter().map(SparseVec::from_map).collect()
    }

    /// `δf` evaluated directly from the formula on every bar word where it
    /// can be nonzero.
    pub fn delta(&self, f: &BarCochain) -> Result<BarCochain> {
        let mut out = BarCochain::zero(f.degree + 1);
        let words: BTreeSet<Word> = self.cochain_basis(f.degree + 1)?.into_iter().map(|(_, w)| w).collect();
        for w in words {
            let mut acc = SparseVec::new();
            for (beta, contrib) in self.contributions(&w) {
                let v = f.value(&beta);
                if !v.is_zero() {
                    acc = acc.add(&self.apply_contribution(&contrib, &v, f.degree));
                }
            }
            out.values.insert(w, acc);
        }
        Ok(out.prune())
    }

    /// The universal twisting cochain `τ[sa] = a` (algebra coefficients).
    pub fn tau(&self) -> BarCochain {
        let mut t = BarCochain::zero(1);
        for (l, &a) in self.letters.iter().enumerate() {
            t.values.insert(Word::letter(l), SparseVec::unit(a));
        }
        t
    }

    /// `f ∪ g = μ∘(f⊗g)∘Δ` (algebra coefficients).
    pub fn cup(&self, f: &BarCochain, g: &BarCochain) -> BarCochain {
        cup_with(&self.alg, |w| self.word_degree(w), f, g)
    }

    /// Cochain basis element `(o, β)` as a cochain.
    pub fn basis_cochain(&self, o: usize, w: &Word) -> BarCochain {
        let degree = self.coeff_degrees()[o] - self.word_degree(w);
        let mut f = BarCochain::zero(degree);
        f.values.insert(w.clone(), SparseVec::unit(o));
        f
    }

    pub fn cochain_from_vector(&self, basis: &[(usize, Word)], v: &SparseVec, degree: i32) -> BarCochain {
        let mut f = BarCochain::zero(degree);
        for (i, c) in v.iter() {
            let (o, w) = &basis[*i];
            f.add_at(w.clone(), &SparseVec::unit(*o), c);
        }
        f.prune()
    }

    pub fn cochain_to_vector(&self, basis: &[(usize, Word)], f: &BarCochain) -> Option<SparseVec> {
        let index: HashMap<&(usize, Word), usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut entries = Vec::new();
        for (w, v) in &f.values {
            for (o, c) in v.iter() {
                entries.push((*index.get(&(*o, w.clone()))?, c.clone()));
            }
        }
        Some(SparseVec::from_entries(entries))
    }
}

fn cup_with<F>(alg: &DGAlgebra, word_degree: F, f: &BarCochain, g: &BarCochain) -> BarCochain
where
    F: Fn(&Word) -> i32,
{
    let mut out = BarCochain::zero(f.degree + g.degree);
    for (u, fu) in &f.values {
        let s = scalar::sign((g.degree * word_degree(u)) as i64);
        for (v, gv) in &g.values {
            let prod = alg.mul(fu, gv);
            out.add_at(u.concat(v), &prod, &s);
        }
    }
    out.prune()
}

/// Cohomology dimensions of one brute-force Hochschild complex.
#[derive(Clone, Debug)]
pub struct OracleTable {
    pub window: (i32, i32),
    pub dims: Vec<(i32, usize)>,
    pub cochain_dims: Vec<(i32, usize)>,
}

impl OracleTable {
    pub fn dim(&self, d: i32) -> Option<usize> {
        self.dims.iter().find(|(k, _)| *k == d).map(|(_, x)| *x)
    }
}

/// `Hoch(A, A)` (or `Hoch(A, A*)` with `dual`) over a window by brute force.
pub fn hochschild_dims_bruteforce(alg: &DGAlgebra, window: (i32, i32), dual: bool) -> Result<OracleTable> {
    let coeffs = if dual { OracleCoefficients::Dual(dualize(alg)) } else { OracleCoefficients::Algebra };
    let bar = BarComplex::new(alg, coeffs)?;
    let (lo, hi) = window;
    let bases: Vec<Vec<(usize, Word)>> =
        (lo - 1..=hi + 1).collect::<Vec<_>>().par_iter().map(|&d| bar.cochain_basis(d)).collect::<Result<_>>()?;
    let basis = |d: i32| &bases[(d - lo + 1) as usize];
    let ranks: Vec<(usize, usize)> = (lo - 1..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&d| {
            let m = bar.delta_matrix(basis(d), basis(d + 1));
            let rank = linalg::rank(&m);
            (rank, basis(d).len())
        })
        .collect();
    let rank = |d: i32| ranks[(d - lo + 1) as usize].0;
    let dims = (lo..=hi).map(|d| (d, basis(d).len() - rank(d) - rank(d - 1))).collect();
    let cochain_dims = (lo..=hi).map(|d| (d, basis(d).len())).collect();
    Ok(OracleTable { window, dims, cochain_dims })
}

/// Checks `δ∘δ = 0` between consecutive degrees of the window.
pub fn delta_squared_is_zero(alg: &DGAlgebra, window: (i32, i32), dual: bool) -> Result<bool> {
    let coeffs = if dual { OracleCoefficients::Dual(dualize(alg)) } else { OracleCoefficients::Algebra };
    let bar = BarComplex::new(alg, coeffs)?;
    for d in window.0..window.1 {
        let (b0, b1, b2) = (bar.cochain_basis(d)?, bar.cochain_basis(d + 1)?, bar.cochain_basis(d + 2)?);
        let m0 = bar.delta_matrix(&b0, &b1);
        let m1 = bar.delta_matrix(&b1, &b2);
        if m0.iter().any(|c| !linalg::apply(&m1, c).is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Koszul sign of dualizing a word: `(-1)^{Σ_{j<k} |x_j||x_k|}`.
fn word_sign(gens: &Generators, w: &Word) -> Scalar {
    let mut e = 0i64;
    let mut prefix = 0i64;
    for l in w.letters() {
        let d = gens.degree(l) as i64;
        e += prefix * d;
        prefix += d;
    }
    scalar::sign(e)
}

/// Reads `F ∈ A⊗k⟨X⟩` as a cochain on bar words of `H`, letter `i` dual
/// to `x_i`: `f(β_w) = ε(w) Σ_a F_{a,w} e_a`.
pub fn twisted_to_cochain(gens: &Generators, t: &TwistedElement, degree: i32) -> BarCochain {
    let mut f = BarCochain::zero(degree);
    for ((a, w), c) in t.terms() {
        f.add_at(w.clone(), &SparseVec::unit(*a), &(c * word_sign(gens, w)));
    }
    f.prune()
}

/// Residual of `Dω + ω∪ω` on all bar words of `H` of length at most
/// `max_len`, where `ω` is read as a cochain and the bar differential of
/// `H` is the transpose of `ð`: `b(β_v) = Σ_w -(-1)^{|w|} ε(v)ε(w) [ðw]_v β_w`.
pub fn twisting_cochain_check(alg: &DGAlgebra, hd: &HomotopyData, conn: &Connection, max_len: usize) -> Result<BarCochain> {
    let gens = conn.generators();
    if gens.len() + 1 != hd.num_classes() {
        return Err(Error::Invalid("connection does not match the contraction".into()));
    }
    let max_len = max_len.min(conn.max_len());
    let f = twisted_to_cochain(gens, &conn.omega(), 1);
    // Transpose of ð restricted to words shorter than max_len.
    let mut b: HashMap<Word, Vec<(Word, Scalar)>> = HashMap::new();
    for w in gens.words_up_to_len(max_len.saturating_sub(1)) {
        let ew = word_sign(gens, &w);
        let sw = scalar::sign(gens.deg(&w) as i64);
        for (v, c) in conn.eth().apply_word(gens, &w) {
            if v.len() > max_len {
                continue;
            }
            let coeff = -(&c * &ew * word_sign(gens, &v) * &sw);
            b.entry(v).or_default().push((w.clone(), coeff));
        }
    }
    let wdeg = |w: &Word| -gens.deg(w);
    let mut residual = BarCochain::zero(2);
    for v in gens.words_up_to_len(max_len) {
        if v.is_empty() {
            continue;
        }
        let mut acc = alg.d(&f.value(&v));
        if let Some(terms) = b.get(&v) {
            for (w, c) in terms {
                acc = acc.add_scaled(c, &f.value(w));
            }
        }
        for k in 1..v.len() {
            let (v1, v2) = v.split_at(k);
            let s = scalar::sign(wdeg(&v1) as i64);
            acc = acc.add_scaled(&s, &alg.mul(&f.value(&v1), &f.value(&v2)));
        }
        if !acc.is_zero() {
            residual.values.insert(v, acc);
        }
    }
    Ok(residual)
}

/// For models with zero differential and zero homotopy, identifies
/// `A⊗k⟨X⟩` with the brute-force cochains: `x_i` is dual to the letter of
/// the basis element representing class `i`.
pub fn comparison_map(bar: &BarComplex, hd: &HomotopyData, gens: &Generators, t: &TwistedElement, degree: i32) -> Result<BarCochain> {
    let alg = bar.algebra();
    if (0..alg.dim()).any(|a| !alg.diff_basis(a).is_zero() || !hd.htpy_column(a).is_zero()) {
        return Err(Error::Invalid("comparison needs a model with d = 0".into()));
    }
    let mut letter = Vec::with_capacity(gens.len());
    for r in 1..hd.num_classes() {
        let rep = hd.rep(r);
        let basis = match rep.iter().collect::<Vec<_>>().as_slice() {
            [(b, c)] if *c == scalar::one() => *b,
            _ => return Err(Error::Invalid("representatives must be basis vectors".into())),
        };
        letter.push(bar.letter_of(basis).ok_or_else(|| Error::Invalid("representative is the unit".into()))?);
    }
    let mut f = BarCochain::zero(degree);
    for ((a, w), c) in t.terms() {
        let bw = Word::from_letters(w.letters().map(|i| letter[i]));
        f.add_at(bw, &SparseVec::unit(*a), &(c * word_sign(gens, w)));
    }
    Ok(f.prune())
}

/// Cup product of two cochains with algebra values.
pub fn cup_bruteforce(bar: &BarComplex, f: &BarCochain, g: &BarCochain) -> BarCochain {
    bar.cup(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Space;
    use crate::model_io::preset;
    use crate::transfer::connection_for;
    use crate::twisted::{cohomology, twisted_diff, Coefficients, ComplexSpec};

    #[test]
    fn delta_squares_to_zero() {
        for name in ["sphere:2", "sphere:3", "cpn:2", "product(sphere:2,sphere:3)"] {
            let a = preset(name).unwrap();
            assert!(delta_squared_is_zero(&a, (-5, 4), false).unwrap(), "{name}");
            assert!(delta_squared_is_zero(&a, (-8, 0), true).unwrap(), "{name} dual");
        }
        let a = crate::model_io::parse_model("model f { basis: 1:0, a:2, b:2, c:3, v:5; unit: 1; diff: a -> c; mult: b*c = v, c*b = v; }");
        if let Ok(a) = a {
            assert!(delta_squared_is_zero(&a, (-5, 5), false).unwrap());
        }
    }

    #[test]
    fn ground_field() {
        let a = preset("point").unwrap();
        let t = hochschild_dims_bruteforce(&a, (-2, 2), false).unwrap();
        assert_eq!(t.dims, vec![(-2, 0), (-1, 0), (0, 1), (1, 0), (2, 0)]);
    }

    #[test]
    fn s2_matches_twisted() {
        let a = preset("sphere:2").unwrap();
        let t = hochschild_dims_bruteforce(&a, (-4, 2), false).unwrap();
        let (_, conn) = connection_for(&a, 8).unwrap();
        let spec = ComplexSpec::new(a, Coefficients::Algebra, conn, (-4, 2)).unwrap();
        assert_eq!(t.dims, cohomology(&spec).unwrap().dims());
    }

    #[test]
    fn matrix_and_direct_delta_agree() {
        let a = preset("cpn:2").unwrap();
        let bar = BarComplex::new(&a, OracleCoefficients::Algebra).unwrap();
        let b0 = bar.cochain_basis(-2).unwrap();
        let b1 = bar.cochain_basis(-1).unwrap();
        let m = bar.delta_matrix(&b0, &b1);
        for (i, (o, w)) in b0.iter().enumerate() {
            let f = bar.basis_cochain(*o, w);
            let direct = bar.delta(&f).unwrap();
            assert_eq!(bar.cochain_to_vector(&b1, &direct).unwrap(), m[i]);
        }
    }

    #[test]
    fn tau_is_twisting() {
        for name in ["sphere:3", "cpn:3"] {
            let a = preset(name).unwrap();
            let bar = BarComplex::new(&a, OracleCoefficients::Algebra).unwrap();
            let tau = bar.tau();
            // dτ + τb + τ∪τ = 0 on words of length ≤ 2: δ is the twisted
            // differential, so δτ = 2(τ∪τ) + dτ + τb; check the equation itself.
            let mut lhs = bar.cup(&tau, &tau);
            for w in bar.alphabet.words_up_to_len(2) {
                let mut acc = a.d(&tau.value(&w));
                for (beta, c) in bar.bar_differential(&w) {
                    acc = acc.add_scaled(&c, &tau.value(&beta));
                }
                lhs.add_at(w, &acc, &scalar::one());
            }
            assert!(lhs.prune().is_zero(), "{name}");
        }
    }

    #[test]
    fn cup_unit_and_associativity() {
        let a = preset("cpn:2").unwrap();
        let bar = BarComplex::new(&a, OracleCoefficients::Algebra).unwrap();
        let one = bar.basis_cochain(a.unit(), &Word::empty());
        let basis = bar.cochain_basis(-1).unwrap();
        for (o, w) in basis.iter().take(6) {
            let f = bar.basis_cochain(*o, w);
            assert_eq!(bar.cup(&one, &f), f);
            assert_eq!(bar.cup(&f, &one), f);
        }
        let fs: Vec<BarCochain> = bar.cochain_basis(0).unwrap().iter().take(5).map(|(o, w)| bar.basis_cochain(*o, w)).collect();
        for f in &fs {
            for g in &fs {
                for h in &fs {
                    assert_eq!(bar.cup(&bar.cup(f, g), h), bar.cup(f, &bar.cup(g, h)));
                }
            }
        }
    }

    #[test]
    fn twisting_cochain_residual_vanishes() {
        for name in ["sphere:2", "sphere:3", "cpn:2", "cpn:3", "product(sphere:2,sphere:3)"] {
            let a = preset(name).unwrap();
            let (hd, conn) = connection_for(&a, 6).unwrap();
            let r = twisting_cochain_check(&a, &hd, &conn, 6).unwrap();
            assert!(r.is_zero(), "{name}: {r:?}");
        }
    }

    #[test]
    fn corrupted_eth_is_detected() {
        let a = preset("cpn:2").unwrap();
        let (hd, mut conn) = connection_for(&a, 6).unwrap();
        let bad = conn.eth().image(1).scale(&scalar::int(2));
        conn.set_eth_image(1, &bad);
        let r = twisting_cochain_check(&a, &hd, &conn, 6).unwrap();
        assert!(!r.is_zero());
        let shortest = r.values.keys().next().unwrap();
        assert_eq!(shortest.len(), 2);
    }

    #[test]
    fn comparison_is_a_chain_map() {
        for name in ["sphere:2", "sphere:3", "cpn:2"] {
            let a = preset(name).unwrap();
            let (hd, conn) = connection_for(&a, 8).unwrap();
            let gens = conn.generators().clone();
            let spec = ComplexSpec::new(a.clone(), Coefficients::Algebra, conn, (-4, 4)).unwrap();
            let bar = BarComplex::new(&a, OracleCoefficients::Algebra).unwrap();
            for d in -4..=3 {
                for (c, w) in crate::twisted::basis_enumeration(&spec, d) {
                    let t = TwistedElement::term(Space::Algebra, c, w, scalar::one());
                    let lhs = bar.delta(&comparison_map(&bar, &hd, &gens, &t, d).unwrap()).unwrap();
                    let rhs = comparison_map(&bar, &hd, &gens, &twisted_diff(&spec, &t).unwrap(), d + 1).unwrap();
                    assert_eq!(lhs, rhs, "{name} degree {d}");
                }
            }
        }
    }

    #[test]
    fn cup_matches_twisted_product_on_s2() {
        let a = preset("sphere:2").unwrap();
        let (hd, conn) = connection_for(&a, 8).unwrap();
        let gens = conn.generators().clone();
        let bar = BarComplex::new(&a, OracleCoefficients::Algebra).unwrap();
        // μ = v⊗x and τ = 1⊗x² correspond to arity-1 and arity-2 cochains.
        let mu = TwistedElement::term(Space::Algebra, 1, Word::letter(0), scalar::one());
        let x = TwistedElement::term(Space::Algebra, 0, Word::letter(0), scalar::one());
        let fm = comparison_map(&bar, &hd, &gens, &mu, 1).unwrap();
        let fx = comparison_map(&bar, &hd, &gens, &x, -1).unwrap();
        let prod = crate::element::elem_mul(&a, &gens, &mu, &x).unwrap();
        assert_eq!(bar.cup(&fm, &fx), comparison_map(&bar, &hd, &gens, &prod, 0).unwrap());
    }
}

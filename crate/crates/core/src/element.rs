//! Elements of `A ⊗ k⟨X⟩`, `M ⊗ k⟨X⟩` and `k⟨X⟩`, with Koszul-signed products.
//!
//! Sign conventions, fixed once for the whole crate:
//! * product: `(a⊗w)(b⊗v) = (-1)^{|w||b|} ab ⊗ wv`
//! * carrier differential: `d(a⊗w) = da ⊗ w`
//! * word derivation: `ð(a⊗w) = (-1)^{|a|} a ⊗ ð(w)`
//! * commutator: `[u, v] = uv - (-1)^{|u||v|} vu`

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_combination, Carrier, DGAlgebra, GradedBasis};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::scalar::{self, Scalar};
use crate::words::{Generators, Word};

/// Which tensor factor the carrier index refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    Algebra,
    Module,
    /// Pure words; the carrier index is always 0.
    Words,
}

pub type Key = (usize, Word);

/// Finite sum `Σ c (carrier ⊗ word)` in canonical form: terms sorted by
/// key, no duplicate keys, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistedElement {
    space: Space,
    terms: Vec<(Key, Scalar)>,
}

impl TwistedElement {
    pub fn zero(space: Space) -> Self {
        Self { space, terms: Vec::new() }
    }

    pub fn term(space: Space, carrier: usize, word: Word, coeff: Scalar) -> Self {
        Self::from_terms(space, [((carrier, word), coeff)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Key, Scalar)>>(space: Space, it: I) -> Self {
        let mut map: BTreeMap<Key, Scalar> = BTreeMap::new();
        for (k, c) in it {
            *map.entry(k).or_insert_with(Scalar::zero) += c;
        }
        Self::from_map(space, map)
    }

    pub fn from_map(space: Space, map: BTreeMap<Key, Scalar>) -> Self {
        Self { space, terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// `v ⊗ w` for a carrier vector `v`.
    pub fn from_carrier_vec(space: Space, v: &SparseVec, w: &Word) -> Self {
        Self { space, terms: v.iter().map(|(i, c)| ((*i, w.clone()), c.clone())).collect() }
    }

    pub fn word(w: Word) -> Self {
        Self::term(Space::Words, 0, w, scalar::one())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn terms(&self) -> &[(Key, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &Key) -> Scalar {
        match self.terms.binary_search_by(|(k, _)| k.cmp(key)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    /// Re-sorts and merges. Always a no-op on values built through this API.
    pub fn canonical(&self) -> Self {
        Self::from_terms(self.space, self.terms.iter().cloned())
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0 < w[1].0) && self.terms.iter().all(|(_, c)| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(&scalar::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(&-scalar::one(), other)
    }

    pub fn add_scaled(&self, c: &Scalar, other: &Self) -> Self {
        debug_assert!(other.is_zero() || self.is_zero() || self.space == other.space);
        let space = if self.is_zero() { other.space } else { self.space };
        Self::from_terms(space, self.terms.iter().cloned().chain(other.terms.iter().map(|(k, x)| (k.clone(), x * c))))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.space);
        }
        Self { space: self.space, terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect() }
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.iter().map(|((_, w), _)| w.len()).max().unwrap_or(0)
    }

    /// Terms of word length at most `n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self { space: self.space, terms: self.terms.iter().filter(|((_, w), _)| w.len() <= n).cloned().collect() }
    }

    /// Terms of word length exactly `n`.
    pub fn component(&self, n: usize) -> Self {
        Self { space: self.space, terms: self.terms.iter().filter(|((_, w), _)| w.len() == n).cloned().collect() }
    }

    /// Degree if homogeneous and nonzero.
    pub fn degree(&self, carrier: &[i32], gens: &Generators) -> Option<i32> {
        let mut it = self.terms.iter().map(|((a, w), _)| carrier[*a] + gens.deg(w));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Applies a linear map to the carrier factor: `a⊗w ↦ f(a)⊗w`.
    pub fn map_carrier<F>(&self, space: Space, f: F) -> Self
    where
        F: Fn(usize) -> SparseVec,
    {
        Self::from_terms(
            space,
            self.terms.iter().flat_map(|((a, w), c)| f(*a).into_entries().into_iter().map(move |(b, x)| ((b, w.clone()), x * c))),
        )
    }

    pub fn format(&self, carrier: Option<&GradedBasis>, gens: &Generators) -> String {
        format_combination(self.terms.iter().map(|((a, w), c)| {
            let name = match (carrier, w.is_empty()) {
                (Some(b), true) => b.name(*a).to_string(),
                (Some(b), false) => format!("{}⊗{}", b.name(*a), gens.format_word(w)),
                (None, _) => gens.format_word(w),
            };
            (name, c.clone())
        }))
    }

    /// JSON form `[{coeff, carrier, word}]`.
    pub fn to_json(&self, carrier: Option<&GradedBasis>, gens: &Generators) -> serde_json::Value {
        let terms: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|((a, w), c)| JsonTerm {
                coeff: scalar::format(c),
                carrier: carrier.map(|b| b.name(*a).to_string()).unwrap_or_else(|| "1".into()),
                word: w.letters().map(|i| gens.name(i).to_string()).collect(),
            })
            .collect();
        serde_json::to_value(terms).expect("serializable")
    }

    pub fn from_json(space: Space, value: &serde_json::Value, carrier: Option<&GradedBasis>, gens: &Generators) -> Result<Self> {
        let terms: Vec<JsonTerm> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Invalid(format!("bad element JSON: {e}")))?;
        let mut out = Vec::new();
        for t in terms {
            let a = match carrier {
                Some(b) => b.index_of(&t.carrier).ok_or_else(|| Error::Invalid(format!("unknown carrier {:?}", t.carrier)))?,
                None => 0,
            };
            let letters = t
                .word
                .iter()
                .map(|n| gens.index_of(n).ok_or_else(|| Error::Invalid(format!("unknown generator {n:?}"))))
                .collect::<Result<Vec<_>>>()?;
            out.push(((a, Word::from_letters(letters)), scalar::parse(&t.coeff)?));
        }
        Ok(Self::from_terms(space, out))
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    carrier: String,
    word: Vec<String>,
}

/// Generic Koszul product `(a⊗w)(b⊗v) = (-1)^{|w||b|} table(a,b) ⊗ wv`.
pub(crate) fn tensor_mul<'t, F>(
    space: Space,
    u: &TwistedElement,
    v: &TwistedElement,
    right_carrier_deg: &[i32],
    gens: &Generators,
    table: F,
) -> TwistedElement
where
    F: Fn(usize, usize) -> &'t SparseVec,
{
    let mut map: BTreeMap<Key, Scalar> = BTreeMap::new();
    for ((a, w), x) in u.terms() {
        let wd = gens.deg(w) as i64;
        for ((b, v), y) in v.terms() {
            let prod = table(*a, *b);
            if prod.is_zero() {
                continue;
            }
            let mut c = x * y;
            if scalar::odd(wd * right_carrier_deg[*b] as i64) {
                c = -c;
            }
            let wv = w.concat(v);
            for (k, z) in prod.iter() {
                *map.entry((*k, wv.clone())).or_insert_with(Scalar::zero) += &c * z;
            }
        }
    }
    TwistedElement::from_map(space, map)
}

/// Product in `A ⊗ k⟨X⟩` (both operands in the algebra space) or in `k⟨X⟩`.
pub fn elem_mul(alg: &DGAlgebra, gens: &Generators, u: &TwistedElement, v: &TwistedElement) -> Result<TwistedElement> {
    match (u.space(), v.space()) {
        (Space::Algebra, Space::Algebra) => {
            Ok(tensor_mul(Space::Algebra, u, v, alg.basis().degrees(), gens, |a, b| alg.mul_basis(a, b)))
        }
        (Space::Words, Space::Words) => Ok(word_mul(u, v)),
        (s, t) => Err(Error::CarrierMismatch(format!("cannot multiply {s:?} by {t:?} in the algebra"))),
    }
}

/// Concatenation product on `k⟨X⟩`.
pub fn word_mul(u: &TwistedElement, v: &TwistedElement) -> TwistedElement {
    TwistedElement::from_terms(
        Space::Words,
        u.terms().iter().flat_map(|((_, w), x)| v.terms().iter().map(move |((_, z), y)| ((0, w.concat(z)), x * y))),
    )
}

/// The unit `1_A ⊗ ε`.
pub fn unit_element(alg: &DGAlgebra) -> TwistedElement {
    TwistedElement::term(Space::Algebra, alg.unit(), Word::empty(), scalar::one())
}

/// A derivation of `k⟨X⟩` given by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    images: Vec<Vec<(Word, Scalar)>>,
}

impl Derivation {
    pub fn zero(n: usize) -> Self {
        Self { images: vec![Vec::new(); n] }
    }

    pub fn from_images(images: &[TwistedElement]) -> Self {
        Self { images: images.iter().map(|t| t.terms().iter().map(|((_, w), c)| (w.clone(), c.clone())).collect()).collect() }
    }

    pub fn image(&self, i: usize) -> TwistedElement {
        TwistedElement::from_terms(Space::Words, self.images[i].iter().map(|(w, c)| ((0, w.clone()), c.clone())))
    }

    pub fn images(&self) -> Vec<TwistedElement> {
        (0..self.images.len()).map(|i| self.image(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|v| v.is_empty())
    }

    /// Keeps only the parts of each `ð(x_i)` of word length `len`.
    pub fn length_part(&self, len: usize) -> Self {
        Self { images: self.images.iter().map(|v| v.iter().filter(|(w, _)| w.len() == len).cloned().collect()).collect() }
    }

    pub(crate) fn set_image(&mut self, i: usize, terms: Vec<(Word, Scalar)>) {
        self.images[i] = terms;
    }

    pub(crate) fn extend_image(&mut self, i: usize, terms: Vec<(Word, Scalar)>) {
        self.images[i].extend(terms);
        self.images[i].sort_by(|a, b| a.0.cmp(&b.0));
    }

    /// Leibniz expansion on a word:
    /// `ð(x_{i1}…x_{ik}) = Σ_j (-1)^{|x_{i1}|+…+|x_{i(j-1)}|} x_{i1}…ð(x_{ij})…x_{ik}`.
    pub fn apply_word(&self, gens: &Generators, w: &Word) -> Vec<(Word, Scalar)> {
        let mut out = Vec::new();
        let mut prefix_deg: i64 = 0;
        for (pos, letter) in w.letters().enumerate() {
            let s = scalar::odd(prefix_deg);
            for (img, c) in &self.images[letter] {
                out.push((w.splice(pos, img), if s { -c.clone() } else { c.clone() }));
            }
            prefix_deg += gens.degree(letter) as i64;
        }
        out
    }

    /// `ð` acting through the carrier: `a⊗w ↦ (-1)^{|a|} a⊗ð(w)`.
    pub fn apply(&self, t: &TwistedElement, carrier_deg: &[i32], gens: &Generators) -> TwistedElement {
        let mut map: BTreeMap<Key, Scalar> = BTreeMap::new();
        for ((a, w), c) in t.terms() {
            let s = scalar::odd(carrier_deg[*a] as i64);
            for (w2, x) in self.apply_word(gens, w) {
                let v = c * x;
                *map.entry((*a, w2)).or_insert_with(Scalar::zero) += if s { -v } else { v };
            }
        }
        TwistedElement::from_map(t.space(), map)
    }
}

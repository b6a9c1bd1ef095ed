//! Contraction of a dg algebra onto its cohomology and the inductive
//! construction of the formal power series connection `(ω, ð)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::json;

use crate::algebra::{Carrier, DGAlgebra, GradedBasis};
use crate::element::{elem_mul, Derivation, Space, TwistedElement};
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, SparseVec};
use crate::scalar::{self, Scalar};
use crate::words::{Generators, Word};

/// Order in which basis vectors are offered as pivots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotOrder {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Contraction `(p, i, h)` of `A` onto `H(A)`.
///
/// Class 0 is always the unit class, represented by `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyData {
    reps: Vec<SparseVec>,
    class_degrees: Vec<i32>,
    /// `proj[a]` = coordinates of `p(e_a)` in the class basis.
    proj: Vec<SparseVec>,
    /// `htpy[a]` = `h(e_a)`.
    htpy: Vec<SparseVec>,
}

impl HomotopyData {
    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn rep(&self, r: usize) -> &SparseVec {
        &self.reps[r]
    }

    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn class_degree(&self, r: usize) -> i32 {
        self.class_degrees[r]
    }

    pub fn class_degrees(&self) -> &[i32] {
        &self.class_degrees
    }

    pub fn p(&self, v: &SparseVec) -> SparseVec {
        linalg::apply(&self.proj, v)
    }

    pub fn i(&self, c: &SparseVec) -> SparseVec {
        linalg::apply(&self.reps, c)
    }

    pub fn h(&self, v: &SparseVec) -> SparseVec {
        linalg::apply(&self.htpy, v)
    }

    pub fn proj_column(&self, a: usize) -> &SparseVec {
        &self.proj[a]
    }

    pub fn htpy_column(&self, a: usize) -> &SparseVec {
        &self.htpy[a]
    }

    /// Checks `dh + hd = 1 - ip`, `pi = 1`, `pd = 0`, `di = 0`, `hh = 0`,
    /// `hi = 0`, `ph = 0` on every basis vector. Returns failure descriptions.
    pub fn verify(&self, alg: &DGAlgebra) -> Vec<String> {
        let mut bad = Vec::new();
        let names = alg.basis();
        for a in 0..alg.dim() {
            let e = SparseVec::unit(a);
            let lhs = alg.d(&self.h(&e)).add(&self.h(&alg.d(&e)));
            let rhs = e.add_scaled(&-scalar::one(), &self.i(&self.p(&e)));
            if lhs != rhs {
                bad.push(format!("dh + hd ≠ 1 - ip on {}", names.name(a)));
            }
            if !self.p(&alg.d(&e)).is_zero() {
                bad.push(format!("p∘d ≠ 0 on {}", names.name(a)));
            }
            if !self.h(&self.h(&e)).is_zero() {
                bad.push(format!("h∘h ≠ 0 on {}", names.name(a)));
            }
            if !self.p(&self.h(&e)).is_zero() {
                bad.push(format!("p∘h ≠ 0 on {}", names.name(a)));
            }
            if names.vec_degree(&self.htpy[a]).is_some_and(|k| k != alg.degree(a) - 1) {
                bad.push(format!("h does not have degree -1 on {}", names.name(a)));
            }
        }
        for r in 0..self.num_classes() {
            let c = SparseVec::unit(r);
            if self.p(&self.i(&c)) != c {
                bad.push(format!("p∘i ≠ 1 on class {r}"));
            }
            if !alg.d(&self.reps[r]).is_zero() {
                bad.push(format!("d∘i ≠ 0 on class {r}"));
            }
            if !self.h(&self.reps[r]).is_zero() {
                bad.push(format!("h∘i ≠ 0 on class {r}"));
            }
        }
        bad
    }
}

/// Builds a contraction by exact per-degree linear algebra.
pub fn build_contraction(alg: &DGAlgebra, order: PivotOrder) -> Result<HomotopyData> {
    let report = alg.validate();
    if !report.is_valid() {
        return Err(Error::InvalidAlgebra(report.summary()));
    }
    let n = alg.dim();
    let basis = alg.basis();
    let mut reps: Vec<(i32, SparseVec)> = Vec::new();
    let mut proj_entries: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
    let mut htpy: Vec<SparseVec> = vec![SparseVec::new(); n];

    // Boundaries entering degree k, paired with the chosen preimages.
    let mut incoming: Vec<(SparseVec, usize)> = Vec::new();
    let lo = basis.min_degree();
    let hi = basis.max_degree();
    for k in lo..=hi {
        let mut local = basis.in_degree(k);
        if order == PivotOrder::HighestIndex {
            local.reverse();
        }
        // Complement of the kernel: basis vectors with independent images.
        let mut img = Echelon::new();
        let mut complement = Vec::new();
        for &j in &local {
            let dj = alg.diff_basis(j);
            if !dj.is_zero() && img.insert(dj, SparseVec::new()).is_none() {
                complement.push(j);
            }
        }
        // Kernel basis, in local coordinates then lifted.
        let cols: Vec<SparseVec> = local.iter().map(|&j| alg.diff_basis(j).clone()).collect();
        let kernel: Vec<SparseVec> = linalg::eliminate(&cols)
            .kernel
            .into_iter()
            .map(|kv| SparseVec::from_entries(kv.iter().map(|(li, c)| (local[*li], c.clone()))))
            .collect();
        // Cohomology representatives: complement of the boundaries in the kernel.
        let mut span = Echelon::new();
        for (b, _) in &incoming {
            span.insert(b, SparseVec::new());
        }
        let mut chosen: Vec<SparseVec> = Vec::new();
        let unit = SparseVec::unit(alg.unit());
        let seeds = if k == alg.degree(alg.unit()) { Some(unit.clone()) } else { None };
        for cand in seeds.into_iter().chain(kernel) {
            if span.insert(&cand, SparseVec::new()).is_none() {
                chosen.push(cand);
            }
        }
        if incoming.len() + chosen.len() + complement.len() != local.len() {
            return Err(Error::InvalidAlgebra(format!("inconsistent dimensions in degree {k}")));
        }
        // Change of basis on A^k: [boundaries | reps | complement].
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        let mut sorted_local = local.clone();
        sorted_local.sort();
        for (p, &j) in sorted_local.iter().enumerate() {
            pos.insert(j, p);
        }
        let to_pos = |v: &SparseVec| SparseVec::from_entries(v.iter().map(|(j, c)| (pos[j], c.clone())));
        let mut columns: Vec<SparseVec> = Vec::new();
        columns.extend(incoming.iter().map(|(b, _)| to_pos(b)));
        columns.extend(chosen.iter().map(&to_pos));
        columns.extend(complement.iter().map(|&j| SparseVec::unit(pos[&j])));
        let inv = linalg::invert(&columns).ok_or_else(|| Error::InvalidAlgebra(format!("singular basis change in degree {k}")))?;
        let nb = incoming.len();
        let class_base = reps.len();
        for (&j, &p) in &pos {
            // coordinates of e_j
            let coords = &inv[p];
            let mut hv = SparseVec::new();
            for (q, c) in coords.iter() {
                if *q < nb {
                    hv = hv.add_scaled(c, &SparseVec::unit(incoming[*q].1));
                } else if *q < nb + chosen.len() {
                    proj_entries[j].push((class_base + q - nb, c.clone()));
                }
            }
            htpy[j] = hv;
        }
        reps.extend(chosen.into_iter().map(|v| (k, v)));
        incoming = complement.iter().map(|&j| (alg.diff_basis(j).clone(), j)).collect();
    }
    // Move the unit class to the front, keeping the degree order otherwise.
    let unit_pos = reps.iter().position(|(_, v)| *v == SparseVec::unit(alg.unit()));
    let Some(unit_pos) = unit_pos else {
        return Err(Error::InvalidAlgebra("unit is exact; cohomology vanishes".into()));
    };
    let mut perm: Vec<usize> = (0..reps.len()).collect();
    perm.remove(unit_pos);
    perm.insert(0, unit_pos);
    let mut inv_perm = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv_perm[old] = new;
    }
    let class_degrees = perm.iter().map(|&o| reps[o].0).collect();
    let reps_sorted = perm.iter().map(|&o| reps[o].1.clone()).collect();
    let proj = proj_entries
        .into_iter()
        .map(|es| SparseVec::from_entries(es.into_iter().map(|(r, c)| (inv_perm[r], c))))
        .collect();
    let mut hd = HomotopyData { reps: reps_sorted, class_degrees, proj, htpy };
    // Side-condition normalization h ← h d h.
    let normalized: Vec<SparseVec> = (0..n).map(|a| hd.h(&alg.d(&hd.h(&SparseVec::unit(a))))).collect();
    hd.htpy = normalized;
    Ok(hd)
}

/// Chen's formal power series connection, truncated at word length `max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    gens: Generators,
    /// `omega[k-1]` = `ω_k`, carriers in the algebra the connection lives on.
    omega: Vec<TwistedElement>,
    eth: Derivation,
    max_len: usize,
    /// Beyond this word length every component provably vanishes.
    natural_len: usize,
}

impl Connection {
    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn natural_len(&self) -> usize {
        self.natural_len
    }

    /// All components that can be nonzero have been computed.
    pub fn is_complete(&self) -> bool {
        self.max_len >= self.natural_len
    }

    /// `ω_k`, zero beyond the stored range.
    pub fn omega_component(&self, k: usize) -> TwistedElement {
        if k >= 1 && k <= self.omega.len() {
            self.omega[k - 1].clone()
        } else {
            TwistedElement::zero(Space::Algebra)
        }
    }

    pub fn omega(&self) -> TwistedElement {
        self.omega.iter().fold(TwistedElement::zero(Space::Algebra), |acc, w| acc.add(w))
    }

    pub fn eth(&self) -> &Derivation {
        &self.eth
    }

    /// Replaces `ω_k`; used for fault injection and gauge experiments.
    pub fn set_omega_component(&mut self, k: usize, value: TwistedElement) {
        assert!(k >= 1 && k <= self.omega.len());
        self.omega[k - 1] = value;
    }

    /// Replaces `ð(x_i)`.
    pub fn set_eth_image(&mut self, i: usize, value: &TwistedElement) {
        self.eth.set_image(i, value.terms().iter().map(|((_, w), c)| (w.clone(), c.clone())).collect());
    }

    /// `f*(ω)` for an algebra map given by its columns; `ð` is unchanged.
    pub fn pullback(&self, columns: &[SparseVec]) -> Connection {
        Connection {
            gens: self.gens.clone(),
            omega: self.omega.iter().map(|w| w.map_carrier(Space::Algebra, |a| columns[a].clone())).collect(),
            eth: self.eth.clone(),
            max_len: self.max_len,
            natural_len: self.natural_len,
        }
    }

    /// The trivial connection on `k` with no generators.
    pub fn empty() -> Connection {
        Connection { gens: Generators::default(), omega: Vec::new(), eth: Derivation::zero(0), max_len: 1, natural_len: 1 }
    }

    pub fn to_json(&self, carrier: &GradedBasis) -> serde_json::Value {
        let gens: Vec<_> = (0..self.gens.len())
            .map(|i| json!({"name": self.gens.name(i), "degree": self.gens.degree(i)}))
            .collect();
        let omega: Vec<_> = self.omega.iter().map(|w| w.to_json(Some(carrier), &self.gens)).collect();
        let mut eth = serde_json::Map::new();
        for i in 0..self.gens.len() {
            eth.insert(self.gens.name(i).to_string(), self.eth.image(i).to_json(None, &self.gens));
        }
        json!({"generators": gens, "max_len": self.max_len, "omega": omega, "eth": eth})
    }
}

/// Checks `H^{<0} = 0`, `H^0 = k·1`, `H^1 = 0`.
pub fn check_simply_connected(alg: &DGAlgebra, hd: &HomotopyData) -> Result<()> {
    for r in 1..hd.num_classes() {
        let d = hd.class_degree(r);
        if d <= 1 {
            return Err(Error::NotSimplyConnected(format!(
                "cohomology class of degree {d} represented by {}",
                alg.basis().format_vec(hd.rep(r))
            )));
        }
    }
    Ok(())
}

/// Runs the word-length induction up to `max_len`.
///
/// Stage `k` forms `L_k = Σ ð_j(ω_m) + Σ ω_i ω_j` over the lower stages,
/// checks `d L_k = 0`, then sets `ð_k(x_r) = -(-1)^{|e^r|} P_r` where
/// `ip(L_k) = Σ e^r ⊗ P_r`, and `ω_k = -h(L_k)`. This solves
/// `dω_k + ð_k(ω_1) + L_k = 0` because `d h = 1 - ip - h d`.
pub fn chen_connection(alg: &DGAlgebra, hd: &HomotopyData, max_len: usize) -> Result<Connection> {
    if max_len == 0 {
        return Err(Error::Invalid("max_len must be at least 1".into()));
    }
    check_simply_connected(alg, hd)?;
    let class_degrees = &hd.class_degrees()[1..];
    let gens = Generators::dual_to(class_degrees);
    let r = gens.len();
    let cdeg = alg.basis().degrees();
    let natural_len = (alg.basis().max_degree() - 1).max(1) as usize;

    let omega1 = TwistedElement::from_terms(
        Space::Algebra,
        (0..r).flat_map(|i| hd.rep(i + 1).iter().map(move |(a, c)| ((*a, Word::letter(i)), c.clone())).collect::<Vec<_>>()),
    );
    let mut omega = vec![omega1];
    let mut eth = Derivation::zero(r);

    for k in 2..=max_len {
        let mut lk = TwistedElement::zero(Space::Algebra);
        for m in 2..k {
            let j = k + 1 - m;
            lk = lk.add(&eth.length_part(j).apply(&omega[m - 1], cdeg, &gens));
        }
        for i in 1..k {
            lk = lk.add(&elem_mul(alg, &gens, &omega[i - 1], &omega[k - i - 1])?);
        }
        let dl = lk.map_carrier(Space::Algebra, |a| alg.diff_basis(a).clone());
        if !dl.is_zero() {
            return Err(Error::NotClosed { len: k, detail: format!("d(L_{k}) = {}", dl.format(Some(alg.basis()), &gens)) });
        }
        let mut parts: Vec<BTreeMap<Word, Scalar>> = vec![BTreeMap::new(); r];
        for ((a, w), c) in lk.terms() {
            for (cls, pc) in hd.proj_column(*a).iter() {
                if *cls == 0 {
                    return Err(Error::NotClosed { len: k, detail: "L_k has a component along the unit class".into() });
                }
                *parts[cls - 1].entry(w.clone()).or_insert_with(Scalar::zero) += c * pc;
            }
        }
        for (i, part) in parts.into_iter().enumerate() {
            let s = if scalar::odd(class_degrees[i] as i64) { scalar::one() } else { -scalar::one() };
            let terms: Vec<(Word, Scalar)> = part.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (w, c * &s)).collect();
            if !terms.is_empty() {
                eth.extend_image(i, terms);
            }
        }
        let omega_k = lk.map_carrier(Space::Algebra, |a| hd.htpy_column(a).clone()).scale(&-scalar::one());
        omega.push(omega_k);
    }
    Ok(Connection { gens, omega, eth, max_len, natural_len })
}

/// Contraction with the default pivot order followed by the induction.
pub fn connection_for(alg: &DGAlgebra, max_len: usize) -> Result<(HomotopyData, Connection)> {
    let hd = build_contraction(alg, PivotOrder::default())?;
    let conn = chen_connection(alg, &hd, max_len)?;
    Ok((hd, conn))
}

/// `dω + ðω + ωω`, truncated to word length `max_len`, evaluated directly
/// from the stored `ω` and `ð` without reference to the construction.
pub fn mc_residual(alg: &DGAlgebra, conn: &Connection) -> TwistedElement {
    let gens = conn.generators();
    let omega = conn.omega();
    let d_omega = omega.map_carrier(Space::Algebra, |a| alg.diff_basis(a).clone());
    let eth_omega = conn.eth().apply(&omega, alg.basis().degrees(), gens);
    let sq = elem_mul(alg, gens, &omega, &omega).expect("algebra space");
    d_omega.add(&eth_omega).add(&sq).truncate(conn.max_len())
}

/// `ð(ð(x_i))` for each generator, truncated to `max_len`.
pub fn eth_squared(conn: &Connection) -> Vec<TwistedElement> {
    let gens = conn.generators();
    let eth = conn.eth();
    (0..gens.len())
        .map(|i| {
            let once = eth.image(i);
            eth.apply(&once, &[0], gens).truncate(conn.max_len())
        })
        .collect()
}

//! Exact sparse linear algebra over the rationals.
//!
//! Elimination always pivots on the lowest column index, so every rank,
//! kernel and reduction computed here is a deterministic function of the
//! input vectors and their order.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Scalar::one())] }
    }

    pub fn from_map(map: BTreeMap<usize, Scalar>) -> Self {
        Self { entries: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Collects unsorted entries, summing duplicates.
    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(it: I) -> Self {
        let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, c) in it {
            *map.entry(i).or_insert_with(Scalar::zero) += c;
        }
        Self::from_map(map)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self { entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SparseVec) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        self.add_scaled(&Scalar::one(), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut s = Scalar::zero();
        for (i, x) in &self.entries {
            let y = other.get(*i);
            if !y.is_zero() {
                s += x * y;
            }
        }
        s
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }
}

/// Echelon basis with optional tracking of how each row was formed.
///
/// Every stored row has leading coefficient 1 and a distinct pivot column.
/// The tag of a row records the coefficients of the row in terms of the
/// caller-supplied tags of the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Reduces `v` against the rows; returns the remainder and the combined
    /// tag of the rows subtracted, so that `v = Σ c_r row_r + rem` and the
    /// returned tag is `Σ c_r tag_r`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        let mut tag = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = acc.range(cursor..).find(|(col, _)| self.pivots.contains_key(col)).map(|(c, x)| (*c, x.clone()));
            let Some((col, coeff)) = next else { break };
            let r = self.pivots[&col];
            for (j, y) in self.rows[r].iter() {
                let e = acc.entry(*j).or_insert_with(Scalar::zero);
                *e -= &coeff * y;
                if e.is_zero() {
                    acc.remove(j);
                }
            }
            tag = tag.add_scaled(&coeff, &self.tags[r]);
            cursor = col + 1;
        }
        (SparseVec::from_map(acc), tag)
    }

    /// Inserts `v` with tag `tag`. Returns `None` when `v` was independent
    /// (and is now in the span), or `Some(t)` when `v` reduced to zero; in
    /// that case `t = tag - Σ c_r tag_r` is a relation among tags.
    pub fn insert(&mut self, v: &SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let (rem, used) = self.reduce(v);
        let tag = tag.add_scaled(&-Scalar::one(), &used);
        match rem.leading() {
            None => Some(tag),
            Some((col, lead)) => {
                let inv = lead.recip();
                self.pivots.insert(col, self.rows.len());
                self.rows.push(rem.scale(&inv));
                self.tags.push(tag.scale(&inv));
                None
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Fully reduced row echelon form of the current span, rows sorted by pivot.
    pub fn rref(&self) -> Vec<SparseVec> {
        let mut order: Vec<usize> = self.pivots.values().copied().collect();
        order.sort_by_key(|&r| self.rows[r].leading().map(|(c, _)| c));
        let mut rows: Vec<SparseVec> = order.iter().map(|&r| self.rows[r].clone()).collect();
        for k in (0..rows.len()).rev() {
            let (pc, _) = rows[k].leading().expect("nonzero row");
            for j in 0..k {
                let c = rows[j].get(pc);
                if !c.is_zero() {
                    rows[j] = rows[j].add_scaled(&-c, &rows[k]);
                }
            }
        }
        rows
    }
}

/// Result of eliminating the columns of a linear map.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// Echelon basis of the image (untagged).
    pub image: Echelon,
    /// Reduced echelon basis of the kernel, in source coordinates.
    pub kernel: Vec<SparseVec>,
}

impl Elimination {
    pub fn rank(&self) -> usize {
        self.image.rank()
    }
}

/// Column elimination of the map whose `j`-th column is `columns[j]`.
pub fn eliminate(columns: &[SparseVec]) -> Elimination {
    let mut tracked = Echelon::new();
    let mut kernel = Echelon::new();
    // Last column first: for the twisted differentials this keeps fill-in
    // low. The kernel is returned in reduced form, so order does not leak.
    for (j, col) in columns.iter().enumerate().rev() {
        if let Some(rel) = tracked.insert(col, SparseVec::unit(j)) {
            kernel.insert(&rel, SparseVec::new());
        }
    }
    let mut image = Echelon::new();
    for row in tracked.rows {
        image.insert(&row, SparseVec::new());
    }
    Elimination { image, kernel: kernel.rref() }
}

pub fn rank(columns: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for c in columns.iter().rev() {
        e.insert(c, SparseVec::new());
    }
    e.rank()
}

/// Inverse of a square matrix given by its columns; `None` if singular.
pub fn invert(columns: &[SparseVec]) -> Option<Vec<SparseVec>> {
    let n = columns.len();
    // Row-reduce [M | I] by treating each column of M^T; we solve M x = e_i.
    // Build rows of M.
    let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); n];
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col.iter() {
            if *i >= n {
                return None;
            }
            rows[*i].insert(j, c.clone());
        }
    }
    let mut aug: Vec<(SparseVec, SparseVec)> =
        rows.into_iter().enumerate().map(|(i, r)| (SparseVec::from_map(r), SparseVec::unit(i))).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !aug[r].0.get(col).is_zero())?;
        aug.swap(col, piv);
        let inv = aug[col].0.get(col).recip();
        aug[col] = (aug[col].0.scale(&inv), aug[col].1.scale(&inv));
        for r in 0..n {
            if r != col {
                let c = aug[r].0.get(col);
                if !c.is_zero() {
                    let (pa, pb) = aug[col].clone();
                    aug[r] = (aug[r].0.add_scaled(&-c.clone(), &pa), aug[r].1.add_scaled(&-c, &pb));
                }
            }
        }
    }
    // aug rows now hold rows of M^{-1}; convert to columns.
    let mut cols: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); n];
    for (i, (_, r)) in aug.into_iter().enumerate() {
        for (j, c) in r.into_entries() {
            cols[j].insert(i, c);
        }
    }
    Some(cols.into_iter().map(SparseVec::from_map).collect())
}

/// Applies the matrix given by columns to `v`.
pub fn apply(columns: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (j, c) in v.iter() {
        out = out.add_scaled(c, &columns[*j]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_entries(v.iter().enumerate().map(|(i, &x)| (i, int(x))))
    }

    #[test]
    fn kernel_and_rank() {
        // columns (1,1), (2,2), (0,1)
        let cols = vec![sv(&[1, 1]), sv(&[2, 2]), sv(&[0, 1])];
        let el = eliminate(&cols);
        assert_eq!(el.rank(), 2);
        assert_eq!(el.kernel, vec![SparseVec::from_entries([(0, int(1)), (1, Scalar::new(int(-1).to_integer(), 2.into()))])]);
    }

    #[test]
    fn inverse_roundtrip() {
        let cols = vec![sv(&[2, 1]), sv(&[1, 1])];
        let inv = invert(&cols).unwrap();
        for j in 0..2 {
            assert_eq!(apply(&cols, &inv[j]), SparseVec::unit(j));
        }
        assert!(invert(&[sv(&[1, 1]), sv(&[2, 2])]).is_none());
    }

    #[test]
    fn reduce_tracks_tags() {
        let mut e = Echelon::new();
        e.insert(&sv(&[1, 1, 0]), SparseVec::unit(0));
        e.insert(&sv(&[0, 1, 1]), SparseVec::unit(1));
        let (rem, tag) = e.reduce(&sv(&[2, 3, 1]));
        assert!(rem.is_zero());
        assert_eq!(tag, sv(&[2, 1]));
    }

    proptest! {
        #[test]
        fn rank_nullity(cols in proptest::collection::vec(proptest::collection::vec(-3i64..4, 5), 1..7)) {
            let cols: Vec<SparseVec> = cols.iter().map(|c| sv(c)).collect();
            let el = eliminate(&cols);
            prop_assert_eq!(el.rank() + el.kernel.len(), cols.len());
            for k in &el.kernel {
                prop_assert!(apply(&cols, k).is_zero());
            }
        }
    }
}

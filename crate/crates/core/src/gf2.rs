//! Exact linear algebra over the two-element field.
//!
//! Vectors and matrix rows are bit-packed into `u64` words, so addition is a
//! word-wise XOR. Chain complexes are stored as one total space with an
//! optional integer degree per basis element and a single square
//! differential; graded complexes must have a differential of degree -1.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("differential does not square to zero")]
    NotSquareZero,
    #[error("differential is not homogeneous of degree -1 (entry {row} <- {col})")]
    NotHomogeneous { row: usize, col: usize },
    #[error("map is not a chain map")]
    NotChainMap,
    #[error("map entry {row} <- {col} does not have degree {shift}")]
    WrongMapDegree { row: usize, col: usize, shift: i64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("graded and ungraded complexes cannot be mixed")]
    GradingMismatch,
}

/// Dense vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    /// Lowest set bit at position `>= from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut k = from / 64;
        let mut w = self.words[k] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
            k += 1;
            if k == self.words.len() {
                return None;
            }
            w = self.words[k];
        }
    }

    /// Changes the length, dropping or zero-filling trailing bits.
    pub fn resize(&mut self, len: usize) {
        if len < self.len {
            self.truncate(len);
        } else {
            self.words.resize(len.div_ceil(64), 0);
            self.len = len;
        }
    }

    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.words.truncate(len.div_ceil(64));
        if len % 64 != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << (len % 64)) - 1;
        }
        self.len = len;
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            v.set(i, true);
        }
        for i in other.ones() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_indices(end - start, self.ones().filter(|&i| i >= start && i < end).map(|i| i - start))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

/// Matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                BitVec::from_bits(r)
            })
            .collect();
        Self { rows: rows.len(), cols, data }
    }

    /// Matrix whose j-th column is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.data[r].set(c, b)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.ones().map(move |c| (r, c)))
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.data[r].dot(v)))
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows, "mul dimension mismatch");
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.data[r].ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn add(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        out
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (r, c) in self.nonzero_entries() {
            t.set(c, r, true);
        }
        t
    }

    /// Restriction to the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut span = Span::new(self.cols);
        self.data.iter().filter(|r| span.insert(r)).count()
    }

    /// Basis of `{v : M v = 0}`; has `cols - rank` elements.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (rref, pivots) = self.rref();
        let is_pivot: Vec<bool> = {
            let mut p = vec![false; self.cols];
            for &c in &pivots {
                p[c] = true;
            }
            p
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, free);
            for (r, &pc) in pivots.iter().enumerate() {
                if rref.get(r, free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| m.get(i, c)) else { continue };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for i in 0..self.rows {
                if i != r && m.get(i, c) {
                    m.data[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// A solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        let mut span = Span::new(self.rows);
        for c in 0..self.cols {
            span.insert(&self.column(c));
        }
        let (rest, combo) = span.reduce(b);
        if !rest.is_zero() {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for k in combo.ones() {
            x.set(span.origin(k), true);
        }
        Some(x)
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &F2Matrix, b: &F2Matrix, c: &F2Matrix, d: &F2Matrix) -> F2Matrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = F2Matrix::zeros(a.rows + c.rows, a.cols + b.cols);
        for (r, col) in a.nonzero_entries() {
            m.set(r, col, true);
        }
        for (r, col) in b.nonzero_entries() {
            m.set(r, a.cols + col, true);
        }
        for (r, col) in c.nonzero_entries() {
            m.set(a.rows + r, col, true);
        }
        for (r, col) in d.nonzero_entries() {
            m.set(a.rows + r, a.cols + col, true);
        }
        m
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Incremental echelon basis of a subspace, remembering which inserted
/// vectors each stored pivot row is built from.
#[derive(Clone, Debug)]
pub struct Span {
    dim: usize,
    rows: Vec<(BitVec, BitVec)>,
    by_pivot: Vec<u32>,
    origins: Vec<usize>,
    inserted: usize,
    combo_len: usize,
}

const NO_PIVOT: u32 = u32::MAX;

impl Span {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), by_pivot: vec![NO_PIVOT; dim], origins: Vec::new(), inserted: 0, combo_len: 64 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insertion index of the k-th independent vector.
    pub fn origin(&self, k: usize) -> usize {
        self.origins[k]
    }

    /// Reduces `v` against the span. Returns the residual and, over the
    /// independent vectors kept so far, the combination that was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        assert_eq!(v.len(), self.dim, "span dimension mismatch");
        let mut rest = v.clone();
        let mut combo = BitVec::zeros(self.combo_len);
        let mut from = 0;
        while let Some(i) = rest.next_one(from) {
            let k = self.by_pivot[i];
            if k != NO_PIVOT {
                let (row, c) = &self.rows[k as usize];
                rest.xor_assign(row);
                combo.xor_assign(c);
            }
            from = i + 1;
        }
        combo.truncate(self.rows.len());
        (rest, combo)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Adds `v`; returns whether it was independent of the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (rest, combo) = self.reduce(v);
        let Some(p) = rest.first_one() else { return false };
        let k = self.rows.len();
        if k + 1 > self.combo_len {
            self.combo_len *= 2;
            for row in &mut self.rows {
                row.1.resize(self.combo_len);
            }
        }
        let mut c = combo;
        c.resize(self.combo_len);
        c.set(k, true);
        self.rows.push((rest, c));
        self.by_pivot[p] = k as u32;
        self.origins.push(idx);
        true
    }
}

/// Finite-dimensional complex over F2 with a degree-lowering differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    labels: Vec<String>,
    degrees: Option<Vec<i64>>,
    d: F2Matrix,
}

impl ChainComplex {
    /// Builds and validates a complex. `degrees = None` means ungraded.
    pub fn new(labels: Vec<String>, degrees: Option<Vec<i64>>, d: F2Matrix) -> Result<Self, LinalgError> {
        let n = labels.len();
        if d.rows() != n || d.cols() != n {
            return Err(LinalgError::Dimension(format!("differential is {}x{}, space has dim {n}", d.rows(), d.cols())));
        }
        if let Some(deg) = &degrees {
            if deg.len() != n {
                return Err(LinalgError::Dimension("degree list length".into()));
            }
            if let Some((row, col)) = d.nonzero_entries().find(|&(r, c)| deg[r] != deg[c] - 1) {
                return Err(LinalgError::NotHomogeneous { row, col });
            }
        }
        if !d.mul(&d).is_zero() {
            return Err(LinalgError::NotSquareZero);
        }
        Ok(Self { labels, degrees, d })
    }

    pub fn zero() -> Self {
        Self { labels: Vec::new(), degrees: Some(Vec::new()), d: F2Matrix::zeros(0, 0) }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> Option<&[i64]> {
        self.degrees.as_deref()
    }

    pub fn is_graded(&self) -> bool {
        self.degrees.is_some()
    }

    pub fn differential(&self) -> &F2Matrix {
        &self.d
    }

    /// Basis indices in each degree, or all indices under `None` when ungraded.
    pub fn degree_blocks(&self) -> BTreeMap<Option<i64>, Vec<usize>> {
        let mut out: BTreeMap<Option<i64>, Vec<usize>> = BTreeMap::new();
        match &self.degrees {
            Some(deg) => {
                for (i, &p) in deg.iter().enumerate() {
                    out.entry(Some(p)).or_default().push(i);
                }
            }
            None => {
                out.insert(None, (0..self.dim()).collect());
            }
        }
        out
    }

    fn indices_in(&self, p: Option<i64>) -> Vec<usize> {
        match (&self.degrees, p) {
            (Some(deg), Some(p)) => (0..self.dim()).filter(|&i| deg[i] == p).collect(),
            (None, None) => (0..self.dim()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn homology(&self) -> Homology {
        let dt = self.d.transpose();
        let mut groups = BTreeMap::new();
        for (p, idx) in self.degree_blocks() {
            groups.insert(p, self.homology_at(p, &idx, &dt));
        }
        Homology { groups }
    }

    fn homology_at(&self, p: Option<i64>, idx: &[usize], dt: &F2Matrix) -> HomologyGroup {
        let n = self.dim();
        let lower = p.map_or_else(|| idx.to_vec(), |p| self.indices_in(Some(p - 1)));
        let upper = p.map_or_else(|| idx.to_vec(), |p| self.indices_in(Some(p + 1)));
        let d_out = self.d.submatrix(&lower, idx);
        let cycles: Vec<BitVec> = d_out
            .kernel_basis()
            .into_iter()
            .map(|k| BitVec::from_indices(n, k.ones().map(|j| idx[j])))
            .collect();
        let mut span = Span::new(n);
        let mut boundary_rank = 0;
        for &c in &upper {
            if span.insert(dt.row(c)) {
                boundary_rank += 1;
            }
        }
        let mut reps = Vec::new();
        for z in cycles {
            if span.insert(&z) {
                reps.push(z);
            }
        }
        HomologyGroup { degree: p, boundary_rank, reps, span }
    }

    /// Dual complex: same basis, transposed differential, `(C^v)_q = hom(C_{-q})`.
    pub fn dual(&self) -> ChainComplex {
        ChainComplex {
            labels: self.labels.iter().map(|l| format!("{l}^")).collect(),
            degrees: self.degrees.as_ref().map(|d| d.iter().map(|p| -p).collect()),
            d: self.d.transpose(),
        }
    }

    pub fn total_homology_dim(&self) -> usize {
        self.homology().total_dim()
    }
}

/// Homology of one degree (or of the whole ungraded complex).
#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub degree: Option<i64>,
    boundary_rank: usize,
    reps: Vec<BitVec>,
    span: Span,
}

impl HomologyGroup {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Cycle representatives, in total-space coordinates.
    pub fn representatives(&self) -> &[BitVec] {
        &self.reps
    }

    /// Coordinates of the class of a cycle in the representative basis.
    pub fn coordinates(&self, cycle: &BitVec) -> BitVec {
        let (rest, combo) = self.span.reduce(cycle);
        assert!(rest.is_zero(), "vector is not a cycle in this degree");
        BitVec::from_indices(self.reps.len(), combo.ones().filter(|&k| k >= self.boundary_rank).map(|k| k - self.boundary_rank))
    }

    pub fn is_boundary(&self, cycle: &BitVec) -> bool {
        self.coordinates(cycle).is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct Homology {
    pub groups: BTreeMap<Option<i64>, HomologyGroup>,
}

impl Homology {
    pub fn dims(&self) -> BTreeMap<Option<i64>, usize> {
        self.groups.iter().filter(|(_, g)| g.dim() > 0).map(|(&p, g)| (p, g.dim())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.groups.values().map(HomologyGroup::dim).sum()
    }

    pub fn dim_at(&self, p: Option<i64>) -> usize {
        self.groups.get(&p).map_or(0, HomologyGroup::dim)
    }
}

impl ChainComplex {
    /// Homology with all degrees flattened into one coordinate space.
    pub fn flat_homology(&self) -> FlatHomology {
        let h = self.homology();
        let mut groups = Vec::new();
        for (p, g) in h.groups {
            let idx = self.indices_in(p);
            groups.push((idx, g));
        }
        FlatHomology { dim: self.dim(), groups }
    }

    pub fn is_cycle(&self, v: &BitVec) -> bool {
        self.d.mul_vec(v).is_zero()
    }
}

/// Homology classes of a complex in one flat coordinate system, ordered by
/// degree and then by representative.
#[derive(Clone, Debug)]
pub struct FlatHomology {
    dim: usize,
    groups: Vec<(Vec<usize>, HomologyGroup)>,
}

impl FlatHomology {
    pub fn dim(&self) -> usize {
        self.groups.iter().map(|(_, g)| g.dim()).sum()
    }

    pub fn representatives(&self) -> Vec<BitVec> {
        self.groups.iter().flat_map(|(_, g)| g.reps.iter().cloned()).collect()
    }

    pub fn rep_degrees(&self) -> Vec<Option<i64>> {
        self.groups.iter().flat_map(|(_, g)| std::iter::repeat(g.degree).take(g.dim())).collect()
    }

    /// Coordinates of the class of a cycle.
    pub fn coordinates(&self, cycle: &BitVec) -> BitVec {
        assert_eq!(cycle.len(), self.dim);
        let mut v = BitVec::zeros(self.dim());
        let mut offset = 0;
        for (idx, g) in &self.groups {
            let part = BitVec::from_indices(self.dim, idx.iter().copied().filter(|&i| cycle.get(i)));
            for k in g.coordinates(&part).ones() {
                v.set(offset + k, true);
            }
            offset += g.dim();
        }
        v
    }
}

/// Linear map between complexes raising degree by `shift`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub shift: i64,
    pub matrix: F2Matrix,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, shift: i64, matrix: F2Matrix) -> Result<Self, LinalgError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(LinalgError::Dimension(format!(
                "map is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        match (source.degrees(), target.degrees()) {
            (Some(sd), Some(td)) => {
                if let Some((row, col)) = matrix.nonzero_entries().find(|&(r, c)| td[r] != sd[c] + shift) {
                    return Err(LinalgError::WrongMapDegree { row, col, shift });
                }
            }
            (None, None) => {}
            _ => return Err(LinalgError::GradingMismatch),
        }
        let m = Self { source, target, shift, matrix };
        if !m.commutes() {
            return Err(LinalgError::NotChainMap);
        }
        Ok(m)
    }

    pub fn identity(c: &ChainComplex) -> Self {
        Self { source: c.clone(), target: c.clone(), shift: 0, matrix: F2Matrix::identity(c.dim()) }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, shift: i64) -> Self {
        Self { source: source.clone(), target: target.clone(), shift, matrix: F2Matrix::zeros(target.dim(), source.dim()) }
    }

    /// `f d = d f`.
    pub fn commutes(&self) -> bool {
        self.matrix.mul(self.source.differential()) == self.target.differential().mul(&self.matrix)
    }

    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap, LinalgError> {
        if first.target.dim() != self.source.dim() {
            return Err(LinalgError::Dimension("composition".into()));
        }
        ChainMap::new(first.source.clone(), self.target.clone(), self.shift + first.shift, self.matrix.mul(&first.matrix))
    }

    /// Matrix of the induced map on homology from source degree `p`.
    pub fn induced(&self, hs: &Homology, ht: &Homology, p: Option<i64>) -> F2Matrix {
        let q = p.map(|p| p + self.shift);
        let Some(src) = hs.groups.get(&p) else { return F2Matrix::zeros(ht.dim_at(q), 0) };
        let cols: Vec<BitVec> = match ht.groups.get(&q) {
            Some(tgt) => src.reps.iter().map(|z| tgt.coordinates(&self.matrix.mul_vec(z))).collect(),
            None => src.reps.iter().map(|_| BitVec::zeros(0)).collect(),
        };
        F2Matrix::from_columns(ht.dim_at(q), &cols)
    }

    /// Cone with `cone_p = target_p (+) source_{p-shift-1}` and
    /// differential `[[d', f], [0, d]]`.
    pub fn cone(&self) -> ChainComplex {
        let d = F2Matrix::block(
            self.target.differential(),
            &self.matrix,
            &F2Matrix::zeros(self.source.dim(), self.target.dim()),
            self.source.differential(),
        );
        let mut labels: Vec<String> = self.target.labels().to_vec();
        labels.extend(self.source.labels().iter().map(|l| format!("s({l})")));
        let degrees = self.target.degrees().map(|td| {
            let mut v = td.to_vec();
            v.extend(self.source.degrees().unwrap_or(&[]).iter().map(|p| p + self.shift + 1));
            v
        });
        ChainComplex { labels, degrees, d }
    }

    /// Quasi-isomorphism test, by cone acyclicity and by induced ranks.
    pub fn quasi_iso_report(&self) -> QuasiIsoReport {
        self.quasi_iso_report_on(&|_| true, &|_| true)
    }

    /// As [`Self::quasi_iso_report`], restricted to target degrees accepted by
    /// `rank_degrees` and cone degrees accepted by `cone_degrees`.
    pub fn quasi_iso_report_on(&self, rank_degrees: &dyn Fn(i64) -> bool, cone_degrees: &dyn Fn(i64) -> bool) -> QuasiIsoReport {
        let hc = self.cone().homology();
        let mut cone_failures = Vec::new();
        for (p, g) in &hc.groups {
            if g.dim() > 0 && p.is_none_or(cone_degrees) {
                cone_failures.push(*p);
            }
        }
        let hs = self.source.homology();
        let ht = self.target.homology();
        let mut rank_failures = Vec::new();
        let mut targets: Vec<Option<i64>> = ht.groups.keys().copied().collect();
        targets.extend(hs.groups.keys().map(|p| p.map(|p| p + self.shift)));
        targets.sort();
        targets.dedup();
        for q in targets {
            if !q.is_none_or(rank_degrees) {
                continue;
            }
            let p = q.map(|q| q - self.shift);
            let m = self.induced(&hs, &ht, p);
            if !(m.rows() == m.cols() && m.rank() == m.rows()) {
                rank_failures.push(q);
            }
        }
        QuasiIsoReport { by_cone: cone_failures.is_empty(), by_ranks: rank_failures.is_empty(), cone_failures, rank_failures }
    }

    pub fn is_quasi_iso(&self) -> bool {
        let r = self.quasi_iso_report();
        assert_eq!(r.by_cone, r.by_ranks, "cone and rank quasi-iso tests disagree");
        r.by_cone
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoReport {
    pub by_cone: bool,
    pub by_ranks: bool,
    pub cone_failures: Vec<Option<i64>>,
    pub rank_failures: Vec<Option<i64>>,
}

impl QuasiIsoReport {
    pub fn agree(&self) -> bool {
        self.by_cone == self.by_ranks
    }

    pub fn verdict(&self) -> bool {
        self.by_cone && self.by_ranks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_vectors(n: usize) -> impl Iterator<Item = BitVec> {
        (0u64..(1 << n)).map(move |m| BitVec::from_indices(n, (0..n).filter(|&i| m >> i & 1 == 1)))
    }

    fn brute_kernel_size(m: &F2Matrix) -> usize {
        all_vectors(m.cols()).filter(|v| m.mul_vec(v).is_zero()).count()
    }

    fn ungraded(n: usize, d: F2Matrix) -> Result<ChainComplex, LinalgError> {
        ChainComplex::new((0..n).map(|i| format!("b{i}")).collect(), None, d)
    }

    fn graded(deg: Vec<i64>, d: F2Matrix) -> ChainComplex {
        ChainComplex::new((0..deg.len()).map(|i| format!("b{i}")).collect(), Some(deg), d).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2Matrix::identity(2).rank(), 2);
        assert_eq!(F2Matrix::zeros(2, 2).rank(), 0);
        let m = F2Matrix::from_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(brute_kernel_size(&m), 2);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(F2Matrix::identity(3).kernel_basis().is_empty());
        assert_eq!(F2Matrix::zeros(2, 2).kernel_basis().len(), 2);
        let k = F2Matrix::from_rows(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![BitVec::from_bits(&[1, 1])]);
    }

    #[test]
    fn homology_examples() {
        let c = ungraded(3, F2Matrix::zeros(3, 3)).unwrap();
        assert_eq!(c.total_homology_dim(), 3);
        assert_eq!(ungraded(2, F2Matrix::identity(2)), Err(LinalgError::NotSquareZero));
        let two = graded(vec![1, 0], F2Matrix::from_rows(&[&[0, 0], &[1, 0]]));
        assert_eq!(two.total_homology_dim(), 0);
    }

    #[test]
    fn quasi_iso_examples() {
        let c = graded(vec![0], F2Matrix::zeros(1, 1));
        assert!(ChainMap::identity(&c).is_quasi_iso());
        let acyc = graded(vec![1, 0], F2Matrix::from_rows(&[&[0, 0], &[1, 0]]));
        assert!(ChainMap::zero(&acyc, &acyc, 0).is_quasi_iso());
        assert!(!ChainMap::zero(&c, &c, 0).is_quasi_iso());
    }

    #[test]
    fn cone_examples() {
        let acyc = graded(vec![1, 0], F2Matrix::from_rows(&[&[0, 0], &[1, 0]]));
        assert_eq!(ChainMap::identity(&acyc).cone().total_homology_dim(), 0);
        // cone of zero map: H = H(target) (+) H(source) shifted by one.
        let a = graded(vec![0, 2], F2Matrix::zeros(2, 2));
        let b = graded(vec![0], F2Matrix::zeros(1, 1));
        let h = ChainMap::zero(&a, &b, 0).cone().homology();
        assert_eq!(h.dim_at(Some(0)), 1);
        assert_eq!(h.dim_at(Some(1)), 1);
        assert_eq!(h.dim_at(Some(3)), 1);
    }

    #[test]
    fn cone_of_rank_one_toy_is_triangular() {
        // one-term complexes F2 a and F2 b with the map b -> a
        let a = graded(vec![0], F2Matrix::zeros(1, 1));
        let b = graded(vec![0], F2Matrix::zeros(1, 1));
        let f = ChainMap::new(b, a, 0, F2Matrix::identity(1)).unwrap();
        let cone = f.cone();
        let d = cone.differential();
        assert_eq!(d, &F2Matrix::from_rows(&[&[0, 1], &[0, 0]]));
        assert!(d.mul(d).is_zero());
        assert_eq!(cone.total_homology_dim(), 0);
    }

    #[test]
    fn non_chain_map_rejected() {
        let acyc = graded(vec![1, 0], F2Matrix::from_rows(&[&[0, 0], &[1, 0]]));
        let m = F2Matrix::from_rows(&[&[1, 0], &[0, 0]]);
        assert_eq!(ChainMap::new(acyc.clone(), acyc, 0, m).unwrap_err(), LinalgError::NotChainMap);
    }

    #[test]
    fn solve_and_span() {
        let m = F2Matrix::from_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        let b = BitVec::from_bits(&[1, 1]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let z = F2Matrix::zeros(2, 2);
        assert!(z.solve(&b).is_none());
    }

    #[test]
    fn bitvec_ops_wide() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(129, true);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(v.count_ones(), 2);
        let w = v.concat(&BitVec::unit(3, 1));
        assert_eq!(w.ones().collect::<Vec<_>>(), vec![0, 129, 131]);
        assert_eq!(w.slice(129, 133), BitVec::from_bits(&[1, 0, 1, 0]));
    }

    #[test]
    fn homology_coordinates_detect_boundaries() {
        // b0 (deg 1) -> b1 (deg 0), b2 (deg 0) isolated
        let c = graded(vec![1, 0, 0], F2Matrix::from_rows(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]));
        let h = c.homology();
        let g = &h.groups[&Some(0)];
        assert_eq!(g.dim(), 1);
        assert!(g.is_boundary(&BitVec::unit(3, 1)));
        assert!(!g.is_boundary(&BitVec::unit(3, 2)));
    }

    #[test]
    fn dual_complex_has_same_total_homology() {
        let c = graded(vec![2, 1, 1, 0], F2Matrix::from_rows(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 0, 0, 0], &[0, 1, 1, 0]]));
        assert_eq!(c.total_homology_dim(), c.dual().total_homology_dim());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = F2Matrix> {
            (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(0u8..2, c), r).prop_map(|rows| {
                    let refs: Vec<&[u8]> = rows.iter().map(|r| r.as_slice()).collect();
                    F2Matrix::from_rows(&refs)
                })
            })
        }

        proptest! {
            #[test]
            fn rank_nullity(m in matrix()) {
                prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
                prop_assert_eq!(1usize << m.kernel_basis().len(), brute_kernel_size(&m));
                prop_assert_eq!(m.rank(), m.transpose().rank());
            }

            #[test]
            fn cone_and_ranks_agree(a in matrix(), f in matrix()) {
                // complexes concentrated in degrees 0 and 1 built from `a`,
                // mapped by the zero map or by `f` when it fits
                let n1 = a.cols();
                let n0 = a.rows();
                let deg: Vec<i64> = std::iter::repeat(0).take(n0).chain(std::iter::repeat(1).take(n1)).collect();
                let d = F2Matrix::block(&F2Matrix::zeros(n0, n0), &a, &F2Matrix::zeros(n1, n0), &F2Matrix::zeros(n1, n1));
                let c = graded(deg, d);
                let id = ChainMap::identity(&c);
                let r = id.quasi_iso_report();
                prop_assert!(r.agree() && r.verdict());
                let z = ChainMap::zero(&c, &c, 0);
                let r = z.quasi_iso_report();
                prop_assert!(r.agree());
                prop_assert_eq!(r.verdict(), c.total_homology_dim() == 0);
                if f.rows() == c.dim() && f.cols() == c.dim() {
                    if let Ok(m) = ChainMap::new(c.clone(), c.clone(), 0, f) {
                        prop_assert!(m.quasi_iso_report().agree());
                    }
                }
            }
        }
    }
}

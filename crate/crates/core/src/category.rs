//! Finite A-infinity categories: storage, relation checking, units,
//! opposite, suspension and the homological category.

use std::fmt;

use thiserror::Error;

use crate::gf2::{BitVec, ChainComplex, F2Matrix, FlatHomology};
use crate::tensor::{for_each_support, for_each_word, Key, Tensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("unknown object index {0}")]
    UnknownObject(u32),
    #[error("object tuple must be non-empty")]
    EmptyPath,
    #[error("arity {arity} exceeds declared bound {bound}")]
    ArityTooLarge { arity: usize, bound: usize },
    #[error("basis index {index} out of range for hom({x},{y}) of dim {dim}")]
    BadBasis { x: String, y: String, index: u32, dim: usize },
    #[error("output vector has length {got}, expected {want}")]
    BadOutput { got: usize, want: usize },
    #[error("operation requires a graded category")]
    Ungraded,
    #[error("{0}")]
    Other(String),
}

/// A based vector space with optional per-element degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomSpace {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
}

impl HomSpace {
    pub fn new(labels: &[&str], degrees: &[i64]) -> Self {
        assert_eq!(labels.len(), degrees.len());
        Self { labels: labels.iter().map(|s| s.to_string()).collect(), degrees: degrees.to_vec() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Degree of every basis element in `v`, if they all agree.
    pub fn degree_of(&self, v: &BitVec) -> Option<i64> {
        let mut it = v.ones().map(|i| self.degrees[i]);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn shifted(&self, by: i64) -> HomSpace {
        HomSpace { labels: self.labels.clone(), degrees: self.degrees.iter().map(|d| d + by).collect() }
    }
}

/// Failure of a quadratic relation on one basis word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    pub arity: usize,
    pub objects: Vec<String>,
    pub inputs: Vec<String>,
    pub value: BitVec,
}

impl fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "arity {} objects ({}) inputs ({}) -> {:?}", self.arity, self.objects.join(","), self.inputs.join(","), self.value)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub failures: Vec<RelationFailure>,
    pub degree_violations: Vec<String>,
    pub checked_up_to: usize,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.degree_violations.is_empty()
    }

    pub fn first_failure(&self) -> Option<&RelationFailure> {
        self.failures.first()
    }
}

#[derive(Clone, Debug)]
pub struct Category {
    pub name: String,
    /// `None` in ungraded mode.
    pub degree: Option<i64>,
    objects: Vec<String>,
    homs: Vec<HomSpace>,
    arity_bound: usize,
    mu: Tensor,
}

impl PartialEq for Category {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.objects == other.objects
            && self.homs == other.homs
            && self.arity_bound == other.arity_bound
            && self.mu == other.mu
    }
}

impl Category {
    /// `homs[x][y]` is the space of morphisms from `x` to `y`.
    pub fn new(name: &str, degree: Option<i64>, objects: &[&str], homs: Vec<Vec<HomSpace>>, arity_bound: usize) -> Self {
        let n = objects.len();
        assert_eq!(homs.len(), n, "hom table must be square");
        let mut flat = Vec::with_capacity(n * n);
        for row in homs {
            assert_eq!(row.len(), n, "hom table must be square");
            flat.extend(row);
        }
        Self {
            name: name.to_string(),
            degree,
            objects: objects.iter().map(|s| s.to_string()).collect(),
            homs: flat,
            arity_bound,
            mu: Tensor::new(),
        }
    }

    /// The ground field as a one-object category with `mu_2` = multiplication.
    pub fn ground(graded: bool) -> Self {
        let mut c = Category::new("F2", graded.then_some(0), &["pt"], vec![vec![HomSpace::new(&["1"], &[0])]], 2);
        c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(1, 0)).unwrap();
        c
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<u32> {
        self.objects.iter().position(|o| o == name).map(|i| i as u32)
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn is_graded(&self) -> bool {
        self.degree.is_some()
    }

    pub fn hom(&self, x: u32, y: u32) -> &HomSpace {
        &self.homs[x as usize * self.objects.len() + y as usize]
    }

    pub fn dim(&self, x: u32, y: u32) -> usize {
        self.hom(x, y).dim()
    }

    pub fn mu_tensor(&self) -> &Tensor {
        &self.mu
    }

    /// `mu_k` on basis elements `elems[i]` of `hom(objs[i], objs[i+1])`.
    pub fn mu(&self, objs: &[u32], elems: &[u32]) -> Option<&BitVec> {
        debug_assert_eq!(objs.len(), elems.len() + 1);
        let mut key = Vec::with_capacity(objs.len() + elems.len());
        key.extend_from_slice(objs);
        key.extend_from_slice(elems);
        self.mu.get(&key)
    }

    pub fn mu_key(&self, key: &[u32]) -> Option<&BitVec> {
        self.mu.get(key)
    }

    pub fn set_mu(&mut self, objs: &[u32], elems: &[u32], out: BitVec) -> Result<(), CategoryError> {
        self.check_word(objs, elems)?;
        let k = elems.len();
        if k == 0 {
            return Err(CategoryError::EmptyPath);
        }
        if k > self.arity_bound {
            return Err(CategoryError::ArityTooLarge { arity: k, bound: self.arity_bound });
        }
        let want = self.dim(objs[0], objs[k]);
        if out.len() != want {
            return Err(CategoryError::BadOutput { got: out.len(), want });
        }
        let mut key = objs.to_vec();
        key.extend_from_slice(elems);
        self.mu.insert(key, out);
        Ok(())
    }

    /// Flips one structure-constant bit.
    pub fn flip_mu_bit(&mut self, objs: &[u32], elems: &[u32], bit: usize) -> Result<(), CategoryError> {
        self.check_word(objs, elems)?;
        let want = self.dim(objs[0], objs[objs.len() - 1]);
        if bit >= want {
            return Err(CategoryError::BadOutput { got: bit, want });
        }
        let mut v = self.mu(objs, elems).cloned().unwrap_or_else(|| BitVec::zeros(want));
        v.flip(bit);
        self.set_mu(objs, elems, v)
    }

    pub fn check_word(&self, objs: &[u32], elems: &[u32]) -> Result<(), CategoryError> {
        if objs.is_empty() {
            return Err(CategoryError::EmptyPath);
        }
        if objs.len() != elems.len() + 1 {
            return Err(CategoryError::Other("object tuple must be one longer than the input word".into()));
        }
        for &o in objs {
            if o as usize >= self.objects.len() {
                return Err(CategoryError::UnknownObject(o));
            }
        }
        for (i, &e) in elems.iter().enumerate() {
            let d = self.dim(objs[i], objs[i + 1]);
            if e as usize >= d {
                return Err(CategoryError::BadBasis {
                    x: self.objects[objs[i] as usize].clone(),
                    y: self.objects[objs[i + 1] as usize].clone(),
                    index: e,
                    dim: d,
                });
            }
        }
        Ok(())
    }

    /// Object paths `X_0..X_k` whose consecutive hom spaces are non-zero.
    pub fn paths(&self, k: usize) -> Vec<Vec<u32>> {
        let n = self.objects.len() as u32;
        let mut out: Vec<Vec<u32>> = (0..n).map(|x| vec![x]).collect();
        for _ in 0..k {
            let mut next = Vec::new();
            for p in &out {
                let last = *p.last().unwrap();
                for y in 0..n {
                    if self.dim(last, y) > 0 {
                        let mut q = p.clone();
                        q.push(y);
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Paths of length `k` from `x` to `y`.
    pub fn paths_between(&self, k: usize, x: u32, y: u32) -> Vec<Vec<u32>> {
        self.paths(k).into_iter().filter(|p| p[0] == x && p[k] == y).collect()
    }

    pub fn path_dims(&self, path: &[u32]) -> Vec<usize> {
        path.windows(2).map(|w| self.dim(w[0], w[1])).collect()
    }

    /// Calls `f(path, elems)` on every basis word of length `k`.
    pub fn for_each_word(&self, k: usize, mut f: impl FnMut(&[u32], &[u32])) {
        for p in self.paths(k) {
            let dims = self.path_dims(&p);
            for_each_word(&dims, |w| f(&p, w));
        }
    }

    /// `mu_k` extended multilinearly to vectors.
    pub fn mu_vecs(&self, objs: &[u32], inputs: &[&BitVec]) -> BitVec {
        let k = inputs.len();
        let mut out = BitVec::zeros(self.dim(objs[0], objs[k]));
        if k == 0 || k > self.arity_bound {
            return out;
        }
        let mut key: Key = objs.to_vec();
        key.extend(std::iter::repeat(0).take(k));
        for_each_support(inputs, |w| {
            key[k + 1..].copy_from_slice(w);
            if let Some(v) = self.mu.get(&key) {
                out.xor_assign(v);
            }
        });
        out
    }

    /// Degree of a homogeneous element of `hom(x,y)`.
    pub fn elem_degree(&self, x: u32, y: u32, e: u32) -> i64 {
        self.hom(x, y).degrees[e as usize]
    }

    /// Degree of `mu_k` in graded mode.
    pub fn mu_degree(&self, k: usize) -> Option<i64> {
        self.degree.map(|n| -2 + k as i64 * (1 - n) + n)
    }

    /// Sum of all terms of the k-th relation on one basis word.
    pub fn relation_value(&self, objs: &[u32], elems: &[u32]) -> BitVec {
        let k = elems.len();
        let kb = self.arity_bound;
        let mut total = BitVec::zeros(self.dim(objs[0], objs[k]));
        for s in 1..=k.min(kb) {
            if k - s + 1 > kb {
                continue;
            }
            for j in 0..=k - s {
                let Some(inner) = self.mu(&objs[j..=j + s], &elems[j..j + s]) else { continue };
                let mut outer_objs: Vec<u32> = objs[..=j].to_vec();
                outer_objs.extend_from_slice(&objs[j + s..]);
                let mut key: Key = outer_objs.clone();
                key.extend_from_slice(&elems[..j]);
                key.push(0);
                key.extend_from_slice(&elems[j + s..]);
                let slot = outer_objs.len() + j;
                for b in inner.ones() {
                    key[slot] = b as u32;
                    if let Some(v) = self.mu.get(&key) {
                        total.xor_assign(v);
                    }
                }
            }
        }
        total
    }

    /// Exhaustive check of the quadratic relations up to arity `2K-1`
    /// (beyond that every term vanishes), plus the degree audit.
    pub fn validate_relations(&self) -> RelationReport {
        let top = (2 * self.arity_bound).saturating_sub(1);
        let mut report = RelationReport { checked_up_to: top, ..Default::default() };
        for k in 1..=top {
            self.for_each_word(k, |p, w| {
                let v = self.relation_value(p, w);
                if !v.is_zero() {
                    report.failures.push(self.failure(k, p, w, v));
                }
            });
        }
        report.degree_violations = self.degree_audit();
        report
    }

    pub(crate) fn failure(&self, arity: usize, p: &[u32], w: &[u32], value: BitVec) -> RelationFailure {
        RelationFailure {
            arity,
            objects: p.iter().map(|&o| self.objects[o as usize].clone()).collect(),
            inputs: w.iter().enumerate().map(|(i, &e)| self.hom(p[i], p[i + 1]).labels[e as usize].clone()).collect(),
            value,
        }
    }

    /// Entries of `mu` whose degree differs from the required one.
    pub fn degree_audit(&self) -> Vec<String> {
        let Some(_) = self.degree else { return Vec::new() };
        let mut bad = Vec::new();
        for (key, v) in self.mu.sorted() {
            let k = (key.len() - 1) / 2;
            let objs = &key[..=k];
            let elems = &key[k + 1..];
            let din: i64 = elems.iter().enumerate().map(|(i, &e)| self.elem_degree(objs[i], objs[i + 1], e)).sum();
            let want = din + self.mu_degree(k).unwrap();
            let out = self.hom(objs[0], objs[k]);
            for b in v.ones() {
                if out.degrees[b] != want {
                    bad.push(format!("mu_{k} on {:?} -> {} has degree {}, expected {want}", key, out.labels[b], out.degrees[b]));
                }
            }
        }
        bad
    }

    pub fn opposite(&self) -> Category {
        let n = self.objects.len();
        let mut homs = Vec::with_capacity(n * n);
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                homs.push(self.hom(y, x).clone());
            }
        }
        let mu = self.mu.map_keys(|key| {
            let k = (key.len() - 1) / 2;
            let mut out: Key = key[..=k].iter().rev().copied().collect();
            out.extend(key[k + 1..].iter().rev());
            out
        });
        Category { name: format!("{}^opp", self.name), degree: self.degree, objects: self.objects.clone(), homs, arity_bound: self.arity_bound, mu }
    }

    /// `A[j]`: element degrees drop by `j` and the category degree by `j`.
    pub fn suspend(&self, j: i64) -> Result<Category, CategoryError> {
        let n = self.degree.ok_or(CategoryError::Ungraded)?;
        let mut c = self.clone();
        c.name = if j == 0 { self.name.clone() } else { format!("{}[{j}]", self.name) };
        c.degree = Some(n - j);
        c.homs = self.homs.iter().map(|h| h.shifted(-j)).collect();
        Ok(c)
    }

    pub fn with_name(mut self, name: &str) -> Category {
        self.name = name.to_string();
        self
    }

    /// Same category data with all degrees dropped.
    pub fn ungraded(&self) -> Category {
        let mut c = self.clone();
        c.degree = None;
        c
    }

    /// Checks that `units[x]` is a strict unit of `hom(x,x)` for every object.
    pub fn check_strict_unit(&self, units: &[BitVec]) -> Result<UnitReport, CategoryError> {
        if units.len() != self.objects.len() {
            return Err(CategoryError::Other("one unit per object required".into()));
        }
        let mut problems = Vec::new();
        for (x, e) in units.iter().enumerate() {
            let x = x as u32;
            if e.len() != self.dim(x, x) {
                return Err(CategoryError::BadOutput { got: e.len(), want: self.dim(x, x) });
            }
            if let Some(n) = self.degree {
                if !e.is_zero() && self.hom(x, x).degree_of(e) != Some(n) {
                    problems.push(format!("unit of {} is not homogeneous of degree {n}", self.objects[x as usize]));
                }
            }
            if !self.mu_vecs(&[x, x], &[e]).is_zero() {
                problems.push(format!("mu_1 of the unit of {} is non-zero", self.objects[x as usize]));
            }
        }
        for x in 0..self.objects.len() as u32 {
            for y in 0..self.objects.len() as u32 {
                for b in 0..self.dim(x, y) {
                    let v = BitVec::unit(self.dim(x, y), b);
                    if self.mu_vecs(&[x, y, y], &[&v, &units[y as usize]]) != v {
                        problems.push(format!("right unit fails on {}", self.hom(x, y).labels[b]));
                    }
                    if self.mu_vecs(&[x, x, y], &[&units[x as usize], &v]) != v {
                        problems.push(format!("left unit fails on {}", self.hom(x, y).labels[b]));
                    }
                }
            }
        }
        for k in 3..=self.arity_bound {
            for i in 0..k {
                self.for_each_word(k - 1, |p, w| {
                    let mut objs = p[..=i].to_vec();
                    objs.extend_from_slice(&p[i..]);
                    let mut inputs: Vec<BitVec> = w.iter().enumerate().map(|(t, &e)| BitVec::unit(self.dim(p[t], p[t + 1]), e as usize)).collect();
                    inputs.insert(i, units[p[i] as usize].clone());
                    let refs: Vec<&BitVec> = inputs.iter().collect();
                    if !self.mu_vecs(&objs, &refs).is_zero() {
                        problems.push(format!("mu_{k} with the unit inserted at slot {i} is non-zero"));
                    }
                });
            }
        }
        problems.dedup();
        Ok(UnitReport { problems })
    }

    /// Homology of each hom complex under `mu_1`.
    pub fn hom_complex(&self, x: u32, y: u32) -> ChainComplex {
        let h = self.hom(x, y);
        let n = h.dim();
        let mut d = F2Matrix::zeros(n, n);
        for b in 0..n {
            if let Some(v) = self.mu(&[x, y], &[b as u32]) {
                for r in v.ones() {
                    d.set(r, b, true);
                }
            }
        }
        let degrees = self.degree.map(|_| h.degrees.clone());
        ChainComplex::new(h.labels.clone(), degrees, d).expect("mu_1 must square to zero; validate the category first")
    }

    /// Ordinary category with homology hom spaces and the product induced by `mu_2`.
    pub fn homological_category(&self) -> HomologicalCategory {
        let n = self.objects.len() as u32;
        let mut homology = Vec::new();
        let mut homs = Vec::new();
        for x in 0..n {
            let mut row = Vec::new();
            for y in 0..n {
                let fh = self.hom_complex(x, y).flat_homology();
                let labels = class_labels(self.hom(x, y), &fh);
                let degrees = fh.rep_degrees().into_iter().map(|d| d.unwrap_or(0)).collect();
                row.push(HomSpace { labels, degrees });
                homology.push(fh);
            }
            homs.push(row);
        }
        let objs: Vec<&str> = self.objects.iter().map(String::as_str).collect();
        let mut category = Category::new(&format!("H({})", self.name), self.degree, &objs, homs, 2);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let hxy = &homology[(x * n + y) as usize];
                    let hyz = &homology[(y * n + z) as usize];
                    let hxz = &homology[(x * n + z) as usize];
                    for (a, ra) in hxy.representatives().iter().enumerate() {
                        for (b, rb) in hyz.representatives().iter().enumerate() {
                            let prod = self.mu_vecs(&[x, y, z], &[ra, rb]);
                            let c = hxz.coordinates(&prod);
                            category.set_mu(&[x, y, z], &[a as u32, b as u32], c).unwrap();
                        }
                    }
                }
            }
        }
        let base_dims = self.homs.iter().map(HomSpace::dim).collect();
        HomologicalCategory { category, homology, base_dims, n }
    }

    /// One homology class per object acting as a two-sided identity in H(A),
    /// the lexicographically first one in the representative basis.
    pub fn find_homological_units(&self) -> Option<Vec<BitVec>> {
        let h = self.homological_category();
        h.units().map(|classes| classes.iter().enumerate().map(|(x, c)| h.representative(x as u32, x as u32, c)).collect())
    }
}

fn class_labels(space: &HomSpace, fh: &FlatHomology) -> Vec<String> {
    fh.representatives()
        .iter()
        .map(|r| {
            let terms: Vec<&str> = r.ones().map(|i| space.labels[i].as_str()).collect();
            format!("[{}]", terms.join("+"))
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct UnitReport {
    pub problems: Vec<String>,
}

impl UnitReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// `H(A)` together with the representatives used for its bases.
#[derive(Clone, Debug)]
pub struct HomologicalCategory {
    pub category: Category,
    homology: Vec<FlatHomology>,
    base_dims: Vec<usize>,
    n: u32,
}

impl HomologicalCategory {
    pub fn homology(&self, x: u32, y: u32) -> &FlatHomology {
        &self.homology[(x * self.n + y) as usize]
    }

    /// Cycle representing the class with coordinates `c`.
    pub fn representative(&self, x: u32, y: u32, c: &BitVec) -> BitVec {
        let reps = self.homology(x, y).representatives();
        let mut v = BitVec::zeros(self.base_dims[(x * self.n + y) as usize]);
        for i in c.ones() {
            v.xor_assign(&reps[i]);
        }
        v
    }

    pub fn is_identity(&self, x: u32, c: &BitVec) -> bool {
        let h = &self.category;
        if let Some(n) = h.degree {
            if h.hom(x, x).degree_of(c) != Some(n) {
                return false;
            }
        }
        for y in 0..self.n {
            for b in 0..h.dim(x, y) {
                let v = BitVec::unit(h.dim(x, y), b);
                if h.mu_vecs(&[x, x, y], &[c, &v]) != v {
                    return false;
                }
            }
            for b in 0..h.dim(y, x) {
                let v = BitVec::unit(h.dim(y, x), b);
                if h.mu_vecs(&[y, x, x], &[&v, c]) != v {
                    return false;
                }
            }
        }
        true
    }

    /// Unit class per object, or `None` if some object has none.
    pub fn units(&self) -> Option<Vec<BitVec>> {
        let mut out = Vec::new();
        for x in 0..self.n {
            let d = self.category.dim(x, x);
            if d > 24 {
                return None;
            }
            let unit = (1u64..1 << d)
                .map(|m| BitVec::from_indices(d, (0..d).filter(|&i| m >> (d - 1 - i) & 1 == 1)))
                .find(|c| self.is_identity(x, c))?;
            out.push(unit);
        }
        Some(out)
    }

    /// Associativity of the induced product, checked on the table.
    pub fn is_associative(&self) -> bool {
        let h = &self.category;
        let mut ok = true;
        h.for_each_word(3, |p, w| {
            let a = BitVec::unit(h.dim(p[0], p[1]), w[0] as usize);
            let b = BitVec::unit(h.dim(p[1], p[2]), w[1] as usize);
            let c = BitVec::unit(h.dim(p[2], p[3]), w[2] as usize);
            let ab = h.mu_vecs(&[p[0], p[1], p[2]], &[&a, &b]);
            let bc = h.mu_vecs(&[p[1], p[2], p[3]], &[&b, &c]);
            if h.mu_vecs(&[p[0], p[2], p[3]], &[&ab, &c]) != h.mu_vecs(&[p[0], p[1], p[3]], &[&a, &bc]) {
                ok = false;
            }
        });
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn dual_numbers() -> Category {
        let mut c = Category::new("D", Some(0), &["X"], vec![vec![HomSpace::new(&["1", "x"], &[0, 0])]], 2);
        let e = |i| BitVec::unit(2, i);
        c.set_mu(&[0, 0, 0], &[0, 0], e(0)).unwrap();
        c.set_mu(&[0, 0, 0], &[0, 1], e(1)).unwrap();
        c.set_mu(&[0, 0, 0], &[1, 0], e(1)).unwrap();
        c
    }

    /// Direct oracle: associativity and the Leibniz rule for a dg algebra
    /// on one object, by brute force over vectors.
    fn dga_oracle(c: &Category) -> bool {
        let n = c.dim(0, 0);
        let all: Vec<BitVec> = (0u32..1 << n).map(|m| BitVec::from_indices(n, (0..n).filter(|&i| m >> i & 1 == 1))).collect();
        let m2 = |a: &BitVec, b: &BitVec| c.mu_vecs(&[0, 0, 0], &[a, b]);
        let d = |a: &BitVec| c.mu_vecs(&[0, 0], &[a]);
        for a in &all {
            if !d(&d(a)).is_zero() {
                return false;
            }
            for b in &all {
                let mut l = d(&m2(a, b));
                l.xor_assign(&m2(&d(a), b));
                l.xor_assign(&m2(a, &d(b)));
                if !l.is_zero() {
                    return false;
                }
                for e in &all {
                    if m2(&m2(a, b), e) != m2(a, &m2(b, e)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn dual_numbers_relations_match_oracle() {
        let c = dual_numbers();
        assert!(dga_oracle(&c));
        assert!(c.validate_relations().passed());
        assert_eq!(c.validate_relations().checked_up_to, 3);
    }

    #[test]
    fn flipped_product_fails_at_arity_three() {
        let mut c = dual_numbers();
        c.flip_mu_bit(&[0, 0, 0], &[0, 1], 0).unwrap();
        assert!(!dga_oracle(&c));
        let r = c.validate_relations();
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().arity, 3);
    }

    #[test]
    fn opposite_is_involution() {
        let c = dual_numbers();
        assert_eq!(c.opposite().opposite(), c);
        assert_eq!(c.opposite(), c);
    }

    #[test]
    fn suspension_shifts() {
        let c = dual_numbers();
        assert_eq!(c.suspend(0).unwrap(), c);
        assert_eq!(c.suspend(1).unwrap().suspend(-1).unwrap(), c);
        let s = c.suspend(1).unwrap();
        assert_eq!(s.degree, Some(-1));
        assert_eq!(s.hom(0, 0).degrees, vec![-1, -1]);
        assert!(s.validate_relations().passed());
        assert_eq!(c.ungraded().suspend(1).unwrap_err(), CategoryError::Ungraded);
    }

    #[test]
    fn strict_units() {
        let c = dual_numbers();
        assert!(c.check_strict_unit(&[BitVec::unit(2, 0)]).unwrap().passed());
        assert!(!c.check_strict_unit(&[BitVec::unit(2, 1)]).unwrap().passed());
    }

    #[test]
    fn homological_units_of_dual_numbers() {
        let c = dual_numbers();
        let h = c.homological_category();
        assert!(h.is_associative());
        assert_eq!(h.category.dim(0, 0), 2);
        assert_eq!(c.find_homological_units().unwrap(), vec![BitVec::unit(2, 0)]);
    }

    #[test]
    fn acyclic_two_term_category() {
        // hom = span(u, v), d v = u, unit-free product zero
        let mut c = Category::new("T", Some(0), &["X"], vec![vec![HomSpace::new(&["u", "v"], &[0, 1])]], 2);
        c.set_mu(&[0, 0], &[1], BitVec::unit(2, 0)).unwrap();
        assert!(c.validate_relations().passed());
        assert_eq!(c.homological_category().category.dim(0, 0), 0);
    }

    #[test]
    fn zero_product_has_no_units() {
        let c = Category::new("Z", Some(0), &["X"], vec![vec![HomSpace::new(&["a"], &[0])]], 2);
        assert!(c.validate_relations().passed());
        assert!(c.find_homological_units().is_none());
    }

    #[test]
    fn ground_category_is_valid() {
        assert!(Category::ground(true).validate_relations().passed());
        assert!(Category::ground(false).check_strict_unit(&[BitVec::unit(1, 0)]).unwrap().passed());
    }
}

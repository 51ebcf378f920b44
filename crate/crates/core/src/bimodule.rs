//! Bimodules over pairs of finite A-infinity categories, left and right
//! modules as special cases, pre-morphisms and the dg structure on them,
//! duals, pullbacks, suspensions, the diagonal bimodule and mapping cones.
//!
//! A structure word is written `x_1..x_k, z, y_m..y_1`. It is stored with
//! the left object path `lo = X_0..X_k`, the right object path in written
//! order `ro = Y_m..Y_0`, left inputs `lb`, the module element `z` in
//! `K(X_k, Y_m)` and right inputs `rb` in written order, so that
//! `rb[t]` lies in `B(ro[t], ro[t+1])`. The output lies in `K(X_0, Y_0)`.

use std::sync::Arc;

use thiserror::Error;

use crate::category::{Category, HomSpace, RelationFailure, RelationReport};
use crate::functor::Functor;
use crate::gf2::{BitVec, ChainComplex, ChainMap, F2Matrix};
use crate::tensor::{for_each_support, for_each_word, Key, Tensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BimoduleError {
    #[error("categories do not match: {0}")]
    Mismatch(String),
    #[error("bad structure entry: {0}")]
    BadEntry(String),
    #[error("operation requires graded data")]
    Ungraded,
    #[error("morphism is not closed")]
    NotClosed,
}

/// Which structure maps a bimodule may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Bi,
    /// Over `(A, ground)`: only `(k|1|0)` operations.
    Left,
    /// Over `(ground, A)`: only `(0|1|m)` operations.
    Right,
}

impl Shape {
    pub fn allows(self, k: usize, m: usize) -> bool {
        match self {
            Shape::Bi => true,
            Shape::Left => m == 0,
            Shape::Right => k == 0,
        }
    }

    pub fn dual(self) -> Shape {
        match self {
            Shape::Bi => Shape::Bi,
            Shape::Left => Shape::Right,
            Shape::Right => Shape::Left,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiWord {
    pub lo: Vec<u32>,
    pub ro: Vec<u32>,
    pub lb: Vec<u32>,
    pub z: u32,
    pub rb: Vec<u32>,
}

impl BiWord {
    pub fn k(&self) -> usize {
        self.lb.len()
    }

    pub fn m(&self) -> usize {
        self.rb.len()
    }

    pub fn arity(&self) -> usize {
        self.lb.len() + self.rb.len()
    }

    pub fn key(&self) -> Key {
        let mut key = Vec::with_capacity(3 + 2 * self.arity() + 3);
        key.push(self.lb.len() as u32);
        key.push(self.rb.len() as u32);
        key.extend_from_slice(&self.lo);
        key.extend_from_slice(&self.ro);
        key.extend_from_slice(&self.lb);
        key.push(self.z);
        key.extend_from_slice(&self.rb);
        key
    }

    pub fn from_key(key: &[u32]) -> BiWord {
        let k = key[0] as usize;
        let m = key[1] as usize;
        let mut at = 2;
        let mut take = |n: usize| {
            let s = key[at..at + n].to_vec();
            at += n;
            s
        };
        let lo = take(k + 1);
        let ro = take(m + 1);
        let lb = take(k);
        let z = take(1)[0];
        let rb = take(m);
        BiWord { lo, ro, lb, z, rb }
    }

    /// Objects of the module input.
    pub fn input_objects(&self) -> (u32, u32) {
        (self.lo[self.k()], self.ro[0])
    }

    /// Objects of the output.
    pub fn output_objects(&self) -> (u32, u32) {
        (self.lo[0], self.ro[self.m()])
    }

    /// Splits off the `a` leftmost and `b` rightmost inputs as an outer
    /// context around the remaining inner word.
    pub fn split(&self, a: usize, b: usize) -> (BiWord, Context) {
        let (k, m) = (self.k(), self.m());
        let inner = BiWord { lo: self.lo[a..].to_vec(), ro: self.ro[..=m - b].to_vec(), lb: self.lb[a..].to_vec(), z: self.z, rb: self.rb[..m - b].to_vec() };
        let outer = Context { lo: self.lo[..=a].to_vec(), ro: self.ro[m - b..].to_vec(), lb: self.lb[..a].to_vec(), rb: self.rb[m - b..].to_vec() };
        debug_assert!(a <= k);
        (inner, outer)
    }
}

/// A structure word with the module slot left open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub lo: Vec<u32>,
    pub ro: Vec<u32>,
    pub lb: Vec<u32>,
    pub rb: Vec<u32>,
}

impl Context {
    pub fn fill(&self, z: u32) -> BiWord {
        BiWord { lo: self.lo.clone(), ro: self.ro.clone(), lb: self.lb.clone(), z, rb: self.rb.clone() }
    }

    pub fn arity(&self) -> usize {
        self.lb.len() + self.rb.len()
    }
}

#[derive(Clone, Debug)]
pub struct Bimodule {
    pub name: String,
    pub left: Arc<Category>,
    pub right: Arc<Category>,
    pub shape: Shape,
    spaces: Vec<HomSpace>,
    mu: Tensor,
    /// Largest `k + m` with a non-zero operation allowed.
    arity_bound: usize,
}

impl PartialEq for Bimodule {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left
            && self.right == other.right
            && self.shape == other.shape
            && self.spaces.iter().map(|s| &s.degrees).eq(other.spaces.iter().map(|s| &s.degrees))
            && self.mu == other.mu
    }
}

impl Bimodule {
    /// `spaces[x][y]` is the value on `(x, y)`.
    pub fn new(name: &str, left: Arc<Category>, right: Arc<Category>, shape: Shape, spaces: Vec<Vec<HomSpace>>, arity_bound: usize) -> Self {
        assert_eq!(spaces.len(), left.num_objects());
        let mut flat = Vec::new();
        for row in spaces {
            assert_eq!(row.len(), right.num_objects());
            flat.extend(row);
        }
        Self { name: name.to_string(), left, right, shape, spaces: flat, mu: Tensor::new(), arity_bound }
    }

    /// Left module over `a`, stored over `(a, ground)`.
    pub fn left_module(name: &str, a: Arc<Category>, values: Vec<HomSpace>, arity_bound: usize) -> Self {
        let ground = Arc::new(Category::ground(a.is_graded()));
        Bimodule::new(name, a, ground, Shape::Left, values.into_iter().map(|v| vec![v]).collect(), arity_bound)
    }

    /// Right module over `a`, stored over `(ground, a)`.
    pub fn right_module(name: &str, a: Arc<Category>, values: Vec<HomSpace>, arity_bound: usize) -> Self {
        let ground = Arc::new(Category::ground(a.is_graded()));
        Bimodule::new(name, ground, a, Shape::Right, vec![values], arity_bound)
    }

    /// The category acting in a one-sided module.
    pub fn acting(&self) -> &Arc<Category> {
        match self.shape {
            Shape::Right => &self.right,
            _ => &self.left,
        }
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn space(&self, x: u32, y: u32) -> &HomSpace {
        &self.spaces[x as usize * self.right.num_objects() + y as usize]
    }

    /// Value of a one-sided module at an object of the acting category.
    pub fn value(&self, x: u32) -> &HomSpace {
        match self.shape {
            Shape::Right => self.space(0, x),
            _ => self.space(x, 0),
        }
    }

    pub fn dim(&self, x: u32, y: u32) -> usize {
        self.space(x, y).dim()
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.iter().map(HomSpace::dim).sum()
    }

    pub fn mu_tensor(&self) -> &Tensor {
        &self.mu
    }

    pub fn mu(&self, w: &BiWord) -> Option<&BitVec> {
        if w.arity() > self.arity_bound {
            return None;
        }
        self.mu.get(&w.key())
    }

    pub fn set_mu(&mut self, w: &BiWord, v: BitVec) -> Result<(), BimoduleError> {
        self.check_word(w)?;
        if !self.shape.allows(w.k(), w.m()) {
            return Err(BimoduleError::BadEntry(format!("({}|1|{}) not allowed for {:?}", w.k(), w.m(), self.shape)));
        }
        if w.arity() > self.arity_bound {
            return Err(BimoduleError::BadEntry(format!("arity {} beyond bound {}", w.arity(), self.arity_bound)));
        }
        let (x, y) = w.output_objects();
        if v.len() != self.dim(x, y) {
            return Err(BimoduleError::BadEntry("output length".into()));
        }
        self.mu.insert(w.key(), v);
        Ok(())
    }

    /// Sets a left-module operation `(k|1)`.
    pub fn set_left(&mut self, path: &[u32], elems: &[u32], w: u32, v: BitVec) -> Result<(), BimoduleError> {
        self.set_mu(&BiWord { lo: path.to_vec(), ro: vec![0], lb: elems.to_vec(), z: w, rb: vec![] }, v)
    }

    /// Sets a right-module operation `(1|m)`; `path` and `elems` in written order.
    pub fn set_right(&mut self, path: &[u32], w: u32, elems: &[u32], v: BitVec) -> Result<(), BimoduleError> {
        self.set_mu(&BiWord { lo: vec![0], ro: path.to_vec(), lb: vec![], z: w, rb: elems.to_vec() }, v)
    }

    pub fn flip_mu_bit(&mut self, w: &BiWord, bit: usize) -> Result<(), BimoduleError> {
        self.check_word(w)?;
        let (x, y) = w.output_objects();
        let d = self.dim(x, y);
        if bit >= d {
            return Err(BimoduleError::BadEntry("bit out of range".into()));
        }
        let mut v = self.mu(w).cloned().unwrap_or_else(|| BitVec::zeros(d));
        v.flip(bit);
        self.set_mu(w, v)
    }

    pub fn check_word(&self, w: &BiWord) -> Result<(), BimoduleError> {
        let bad = |s: &str| Err(BimoduleError::BadEntry(s.to_string()));
        if w.lo.len() != w.k() + 1 || w.ro.len() != w.m() + 1 {
            return bad("object paths must be one longer than the input lists");
        }
        self.left.check_word(&w.lo, &w.lb).map_err(|e| BimoduleError::BadEntry(e.to_string()))?;
        self.right.check_word(&w.ro, &w.rb).map_err(|e| BimoduleError::BadEntry(e.to_string()))?;
        let (x, y) = w.input_objects();
        if w.z as usize >= self.dim(x, y) {
            return bad("module element out of range");
        }
        Ok(())
    }

    /// Calls `f` on every structure word of total arity `t` whose module
    /// input space and output space (in `out`) are non-zero.
    pub fn for_each_word_into(&self, t: usize, out: &Bimodule, mut f: impl FnMut(&BiWord)) {
        for k in 0..=t {
            let m = t - k;
            if !self.shape.allows(k, m) {
                continue;
            }
            let lps = self.left.paths(k);
            let rps = self.right.paths(m);
            for lo in &lps {
                for ro in &rps {
                    let zd = self.dim(lo[k], ro[0]);
                    if zd == 0 || out.dim(lo[0], ro[m]) == 0 {
                        continue;
                    }
                    let mut dims = self.left.path_dims(lo);
                    dims.push(zd);
                    dims.extend(self.right.path_dims(ro));
                    for_each_word(&dims, |idx| {
                        let w = BiWord { lo: lo.clone(), ro: ro.clone(), lb: idx[..k].to_vec(), z: idx[k], rb: idx[k + 1..].to_vec() };
                        f(&w);
                    });
                }
            }
        }
    }

    pub fn for_each_word(&self, t: usize, f: impl FnMut(&BiWord)) {
        self.for_each_word_into(t, self, f)
    }

    /// `mu` applied to the word `ctx` with the module slot filled by `z`.
    pub fn mu_ctx(&self, ctx: &Context, z: &BitVec) -> BitVec {
        let d = self.dim(ctx.lo[0], ctx.ro[ctx.ro.len() - 1]);
        let mut out = BitVec::zeros(d);
        if ctx.arity() > self.arity_bound {
            return out;
        }
        let mut w = ctx.fill(0);
        for b in z.ones() {
            w.z = b as u32;
            if let Some(v) = self.mu(&w) {
                out.xor_assign(v);
            }
        }
        out
    }

    /// `mu` extended multilinearly over all inputs.
    pub fn mu_vecs(&self, lo: &[u32], ro: &[u32], lb: &[&BitVec], z: &BitVec, rb: &[&BitVec]) -> BitVec {
        let mut out = BitVec::zeros(self.dim(lo[0], ro[ro.len() - 1]));
        let k = lb.len();
        let mut ins: Vec<&BitVec> = lb.to_vec();
        ins.push(z);
        ins.extend_from_slice(rb);
        let mut w = BiWord { lo: lo.to_vec(), ro: ro.to_vec(), lb: vec![0; k], z: 0, rb: vec![0; rb.len()] };
        for_each_support(&ins, |idx| {
            w.lb.copy_from_slice(&idx[..k]);
            w.z = idx[k];
            w.rb.copy_from_slice(&idx[k + 1..]);
            if let Some(v) = self.mu(&w) {
                out.xor_assign(v);
            }
        });
        out
    }

    pub fn degree_of_mu(&self, k: usize, m: usize) -> Option<i64> {
        match (self.left.degree, self.right.degree) {
            (Some(na), Some(nb)) => Some(-1 + k as i64 * (1 - na) + m as i64 * (1 - nb)),
            _ => None,
        }
    }

    pub fn is_graded(&self) -> bool {
        self.left.is_graded() && self.right.is_graded()
    }

    fn input_degree(&self, w: &BiWord) -> i64 {
        let (x, y) = w.input_objects();
        let mut d = self.space(x, y).degrees[w.z as usize];
        for (i, &e) in w.lb.iter().enumerate() {
            d += self.left.elem_degree(w.lo[i], w.lo[i + 1], e);
        }
        for (i, &e) in w.rb.iter().enumerate() {
            d += self.right.elem_degree(w.ro[i], w.ro[i + 1], e);
        }
        d
    }

    /// Relation value on one word: the composition sum plus both insertion sums.
    pub fn relation_value(&self, w: &BiWord) -> BitVec {
        let (x, y) = w.output_objects();
        let mut total = BitVec::zeros(self.dim(x, y));
        for_each_term(self, self, w, Sums { post: true, pre: false, left: true, right: true }, |t| match t {
            Term::Direct(w2) => {
                if let Some(v) = self.mu(&w2) {
                    total.xor_assign(v);
                }
            }
            Term::Post(inner, outer) => {
                if let Some(v) = self.mu(&inner) {
                    total.xor_assign(&self.mu_ctx(&outer, v));
                }
            }
        });
        total
    }

    pub fn relation_depth(&self) -> usize {
        let b = self.arity_bound;
        (2 * b).max(b + self.left.arity_bound().saturating_sub(1)).max(b + self.right.arity_bound().saturating_sub(1))
    }

    pub fn validate(&self) -> RelationReport {
        let top = self.relation_depth();
        let mut report = RelationReport { checked_up_to: top, ..Default::default() };
        for t in 0..=top {
            self.for_each_word(t, |w| {
                let v = self.relation_value(w);
                if !v.is_zero() {
                    report.failures.push(self.failure(w, v));
                }
            });
        }
        report.degree_violations = self.degree_audit();
        report
    }

    fn failure(&self, w: &BiWord, value: BitVec) -> RelationFailure {
        let mut objects: Vec<String> = w.lo.iter().map(|&o| self.left.objects()[o as usize].clone()).collect();
        objects.push("|".into());
        objects.extend(w.ro.iter().map(|&o| self.right.objects()[o as usize].clone()));
        let mut inputs: Vec<String> = w.lb.iter().enumerate().map(|(i, &e)| self.left.hom(w.lo[i], w.lo[i + 1]).labels[e as usize].clone()).collect();
        let (x, y) = w.input_objects();
        inputs.push(format!("*{}*", self.space(x, y).labels[w.z as usize]));
        inputs.extend(w.rb.iter().enumerate().map(|(i, &e)| self.right.hom(w.ro[i], w.ro[i + 1]).labels[e as usize].clone()));
        RelationFailure { arity: w.arity(), objects, inputs, value }
    }

    pub fn degree_audit(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if !self.is_graded() {
            return bad;
        }
        for (key, v) in self.mu.sorted() {
            let w = BiWord::from_key(key);
            let want = self.input_degree(&w) + self.degree_of_mu(w.k(), w.m()).unwrap();
            let (x, y) = w.output_objects();
            for b in v.ones() {
                if self.space(x, y).degrees[b] != want {
                    bad.push(format!("{}: operation on {:?} has degree {}, expected {want}", self.name, key, self.space(x, y).degrees[b]));
                }
            }
        }
        bad
    }

    /// The zero bimodule with the given value spaces.
    pub fn with_spaces_of(&self, name: &str) -> Bimodule {
        Bimodule { name: name.to_string(), mu: Tensor::new(), ..self.clone() }
    }

    /// `M[j]`: value degrees drop by `j`.
    pub fn suspend(&self, j: i64) -> Result<Bimodule, BimoduleError> {
        if !self.is_graded() {
            return Err(BimoduleError::Ungraded);
        }
        let mut m = self.clone();
        m.name = if j == 0 { self.name.clone() } else { format!("{}[{j}]", self.name) };
        m.spaces = self.spaces.iter().map(|s| s.shifted(-j)).collect();
        Ok(m)
    }

    /// The same data viewed over other categories with identical structure
    /// (for instance suspensions of the original ones).
    pub fn rebase(&self, left: Arc<Category>, right: Arc<Category>) -> Result<Bimodule, BimoduleError> {
        let same = |a: &Category, b: &Category| a.num_objects() == b.num_objects() && a.mu_tensor() == b.mu_tensor();
        if !same(&self.left, &left) || !same(&self.right, &right) {
            return Err(BimoduleError::Mismatch("rebase onto categories with different structure".into()));
        }
        Ok(Bimodule { left, right, ..self.clone() })
    }

    /// Linear dual: a bimodule over `(right, left)` on the dual bases.
    pub fn dual(&self) -> Bimodule {
        let nl = self.left.num_objects();
        let nr = self.right.num_objects();
        let mut spaces = Vec::with_capacity(nl * nr);
        for y in 0..nr as u32 {
            for x in 0..nl as u32 {
                let s = self.space(x, y);
                spaces.push(HomSpace { labels: s.labels.iter().map(|l| format!("{l}^")).collect(), degrees: s.degrees.iter().map(|d| -d).collect() });
            }
        }
        let mut out = Bimodule {
            name: format!("{}^", self.name),
            left: self.right.clone(),
            right: self.left.clone(),
            shape: self.shape.dual(),
            spaces,
            mu: Tensor::new(),
            arity_bound: self.arity_bound,
        };
        out.mu = transpose_tensor(&self.mu, |w| self.dim(w.input_objects().0, w.input_objects().1));
        out
    }

    /// `(F0 (x) F1)^* M`; `None` stands for the identity functor.
    pub fn pullback(&self, f0: Option<&Functor>, f1: Option<&Functor>) -> Result<Bimodule, BimoduleError> {
        let (new_left, new_right) = pullback_categories(self, f0, f1)?;
        let nl = new_left.num_objects() as u32;
        let nr = new_right.num_objects() as u32;
        let map0 = |x: u32| f0.map_or(x, |f| f.obj(x));
        let map1 = |y: u32| f1.map_or(y, |f| f.obj(y));
        let spaces: Vec<Vec<HomSpace>> = (0..nl).map(|x| (0..nr).map(|y| self.space(map0(x), map1(y)).clone()).collect()).collect();
        let k0 = f0.map_or(1, Functor::arity_bound);
        let k1 = f1.map_or(1, Functor::arity_bound);
        let bound = self.arity_bound * k0.max(k1);
        let mut out = Bimodule::new(&format!("pull({})", self.name), new_left, new_right, self.shape, spaces, bound);
        for t in 0..=bound {
            let mut entries = Vec::new();
            out.for_each_word(t, |w| {
                let v = pulled_value(w, f0, f1, self.dim(map0(w.lo[0]), map1(w.ro[w.m()])), &|w2| self.mu(w2).cloned());
                if !v.is_zero() {
                    entries.push((w.key(), v));
                }
            });
            for (k, v) in entries {
                out.mu.insert(k, v);
            }
        }
        Ok(out)
    }

    /// The diagonal bimodule `A_Delta` with `mu_{k|1|m} = mu_{k+m+1}`.
    pub fn diagonal(a: Arc<Category>) -> Bimodule {
        let n = a.num_objects() as u32;
        let spaces: Vec<Vec<HomSpace>> = (0..n).map(|x| (0..n).map(|y| a.hom(x, y).clone()).collect()).collect();
        let mut out = Bimodule::new(&format!("{}_diag", a.name), a.clone(), a.clone(), Shape::Bi, spaces, a.arity_bound().saturating_sub(1));
        for (key, v) in a.mu_tensor().iter() {
            let kk = (key.len() - 1) / 2;
            let objs = &key[..=kk];
            let elems = &key[kk + 1..];
            for i in 0..kk {
                // module input is elems[i]
                let w = BiWord { lo: objs[..=i].to_vec(), ro: objs[i + 1..].to_vec(), lb: elems[..i].to_vec(), z: elems[i], rb: elems[i + 1..].to_vec() };
                out.mu.insert(w.key(), v.clone());
            }
        }
        out
    }

    /// Homology unitality of the left and right actions, given unit
    /// representatives of both categories.
    pub fn check_homological_unitality(&self, left_units: &[BitVec], right_units: &[BitVec]) -> Result<bool, BimoduleError> {
        let closed = |c: &Category, us: &[BitVec]| us.iter().enumerate().all(|(x, e)| c.mu_vecs(&[x as u32, x as u32], &[e]).is_zero());
        if !closed(&self.left, left_units) || !closed(&self.right, right_units) {
            return Err(BimoduleError::NotClosed);
        }
        for x in 0..self.left.num_objects() as u32 {
            for y in 0..self.right.num_objects() as u32 {
                let c = self.value_complex(x, y);
                let h = c.flat_homology();
                for r in h.representatives() {
                    if self.shape.allows(1, 0) {
                        let v = self.mu_vecs(&[x, x], &[y], &[&left_units[x as usize]], &r, &[]);
                        if h.coordinates(&v) != h.coordinates(&r) {
                            return Ok(false);
                        }
                    }
                    if self.shape.allows(0, 1) {
                        let v = self.mu_vecs(&[x], &[y, y], &[], &r, &[&right_units[y as usize]]);
                        if h.coordinates(&v) != h.coordinates(&r) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// `K(x,y)` with differential `mu_{0|1|0}`.
    pub fn value_complex(&self, x: u32, y: u32) -> ChainComplex {
        let s = self.space(x, y);
        let n = s.dim();
        let mut d = F2Matrix::zeros(n, n);
        for b in 0..n as u32 {
            let w = BiWord { lo: vec![x], ro: vec![y], lb: vec![], z: b, rb: vec![] };
            if let Some(v) = self.mu(&w) {
                for r in v.ones() {
                    d.set(r, b as usize, true);
                }
            }
        }
        ChainComplex::new(s.labels.clone(), self.is_graded().then(|| s.degrees.clone()), d).expect("mu_{0|1|0} must square to zero")
    }

    pub(crate) fn insert_raw(&mut self, key: Key, v: BitVec) {
        self.mu.insert(key, v);
    }

    pub fn set_arity_bound(&mut self, b: usize) {
        self.arity_bound = b;
    }
}

fn pullback_categories(m: &Bimodule, f0: Option<&Functor>, f1: Option<&Functor>) -> Result<(Arc<Category>, Arc<Category>), BimoduleError> {
    let l = match f0 {
        Some(f) => {
            if *f.target != *m.left {
                return Err(BimoduleError::Mismatch(format!("{} does not land in the left category of {}", f.name, m.name)));
            }
            f.source.clone()
        }
        None => m.left.clone(),
    };
    let r = match f1 {
        Some(f) => {
            if *f.target != *m.right {
                return Err(BimoduleError::Mismatch(format!("{} does not land in the right category of {}", f.name, m.name)));
            }
            f.source.clone()
        }
        None => m.right.clone(),
    };
    Ok((l, r))
}

/// Value of a pulled-back operation (or morphism) on one word, where
/// `apply` evaluates the original on basis words.
fn pulled_value(w: &BiWord, f0: Option<&Functor>, f1: Option<&Functor>, out_dim: usize, apply: &dyn Fn(&BiWord) -> Option<BitVec>) -> BitVec {
    let mut out = BitVec::zeros(out_dim);
    let lefts = splits(f0, &w.lo, &w.lb);
    let rights = splits(f1, &w.ro, &w.rb);
    for (lo, louts) in &lefts {
        for (ro, routs) in &rights {
            let k = louts.len();
            let mut ins: Vec<&BitVec> = louts.iter().collect();
            let zv = BitVec::unit(1, 0);
            ins.push(&zv);
            ins.extend(routs.iter());
            let mut w2 = BiWord { lo: lo.clone(), ro: ro.clone(), lb: vec![0; k], z: w.z, rb: vec![0; routs.len()] };
            for_each_support(&ins, |idx| {
                w2.lb.copy_from_slice(&idx[..k]);
                w2.rb.copy_from_slice(&idx[k + 1..]);
                if let Some(v) = apply(&w2) {
                    out.xor_assign(&v);
                }
            });
        }
    }
    out
}

fn splits(f: Option<&Functor>, path: &[u32], elems: &[u32]) -> Vec<(Vec<u32>, Vec<BitVec>)> {
    match f {
        // inputs pass through unchanged, as unit vectors long enough to hold them
        None => vec![(path.to_vec(), elems.iter().map(|&e| BitVec::unit(e as usize + 1, e as usize)).collect())],
        Some(f) => {
            let mut out = Vec::new();
            f.for_each_split(path, elems, usize::MAX, |img, outs| out.push((img.to_vec(), outs.iter().map(|v| (*v).clone()).collect())));
            out
        }
    }
}

/// Transposition used by duals: an entry `(k, m, lo, ro, lb, z, rb) -> v`
/// contributes `z^` to `(m, k, ro, lo, rb, f, lb)` for each `f` in `v`.
fn transpose_tensor(t: &Tensor, _in_dim: impl Fn(&BiWord) -> usize) -> Tensor {
    let mut out = Tensor::new();
    let mut buckets: std::collections::HashMap<Key, Vec<usize>> = std::collections::HashMap::new();
    let mut dims: std::collections::HashMap<Key, usize> = std::collections::HashMap::new();
    for (key, v) in t.iter() {
        let w = BiWord::from_key(key);
        for f in v.ones() {
            let dw = BiWord { lo: w.ro.clone(), ro: w.lo.clone(), lb: w.rb.clone(), z: f as u32, rb: w.lb.clone() };
            let dk = dw.key();
            buckets.entry(dk.clone()).or_default().push(w.z as usize);
            dims.entry(dk).or_insert_with(|| _in_dim(&w));
        }
    }
    for (k, zs) in buckets {
        let d = dims[&k];
        out.insert(k, BitVec::from_indices(d, zs));
    }
    out
}

/// Which parts of the four-sum differential to enumerate.
#[derive(Clone, Copy, Debug)]
pub struct Sums {
    /// target operation applied after the morphism
    pub post: bool,
    /// morphism applied after the source operation
    pub pre: bool,
    /// left category operation inserted
    pub left: bool,
    /// right category operation inserted
    pub right: bool,
}

impl Sums {
    pub const ALL: Sums = Sums { post: true, pre: true, left: true, right: true };
}

/// One summand of the differential of a morphism `nu: src -> tgt` at a word.
#[derive(Clone, Debug)]
pub enum Term {
    /// `nu` evaluated on the word.
    Direct(BiWord),
    /// target operation on `outer` with the slot filled by `nu(inner)`.
    Post(BiWord, Context),
}

/// Enumerates the summands of `mu_1(nu)` at `w`, with `nu: src -> tgt`.
/// Sums that use `src` operations or category operations are expanded into
/// direct evaluations of `nu`.
pub fn for_each_term(src: &Bimodule, tgt: &Bimodule, w: &BiWord, sums: Sums, mut f: impl FnMut(Term)) {
    let (k, m) = (w.k(), w.m());
    for a in 0..=k {
        for b in 0..=m {
            if sums.post && a + b <= tgt.arity_bound && tgt.shape.allows(a, b) {
                let (inner, outer) = w.split(a, b);
                f(Term::Post(inner, outer));
            }
            if sums.pre && (k - a) + (m - b) <= src.arity_bound && src.shape.allows(k - a, m - b) {
                let (inner, outer) = w.split(a, b);
                if let Some(v) = src.mu(&inner) {
                    for bit in v.ones() {
                        f(Term::Direct(outer.fill(bit as u32)));
                    }
                }
            }
        }
    }
    if sums.left {
        let ka = src.left.arity_bound();
        for s in 0..k {
            for e in s + 1..=k.min(s + ka) {
                if let Some(v) = src.left.mu(&w.lo[s..=e], &w.lb[s..e]) {
                    let mut lo = w.lo[..=s].to_vec();
                    lo.extend_from_slice(&w.lo[e..]);
                    let mut lb = w.lb[..s].to_vec();
                    lb.push(0);
                    lb.extend_from_slice(&w.lb[e..]);
                    for bit in v.ones() {
                        lb[s] = bit as u32;
                        f(Term::Direct(BiWord { lo: lo.clone(), ro: w.ro.clone(), lb: lb.clone(), z: w.z, rb: w.rb.clone() }));
                    }
                }
            }
        }
    }
    if sums.right {
        let kb = src.right.arity_bound();
        for s in 0..m {
            for e in s + 1..=m.min(s + kb) {
                if let Some(v) = src.right.mu(&w.ro[s..=e], &w.rb[s..e]) {
                    let mut ro = w.ro[..=s].to_vec();
                    ro.extend_from_slice(&w.ro[e..]);
                    let mut rb = w.rb[..s].to_vec();
                    rb.push(0);
                    rb.extend_from_slice(&w.rb[e..]);
                    for bit in v.ones() {
                        rb[s] = bit as u32;
                        f(Term::Direct(BiWord { lo: w.lo.clone(), ro: ro.clone(), lb: w.lb.clone(), z: w.z, rb: rb.clone() }));
                    }
                }
            }
        }
    }
}

/// Pre-morphism of bimodules. Components are meaningful for total arity
/// `k + m < bound`; `bound = usize::MAX` marks exactly known morphisms.
#[derive(Clone, Debug)]
pub struct PreMorphism {
    pub source: Arc<Bimodule>,
    pub target: Arc<Bimodule>,
    pub bound: usize,
    comps: Tensor,
}

impl PartialEq for PreMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

pub const EXACT: usize = usize::MAX;

impl PreMorphism {
    pub fn zero(source: Arc<Bimodule>, target: Arc<Bimodule>, bound: usize) -> Result<Self, BimoduleError> {
        if source.left != target.left || source.right != target.right {
            return Err(BimoduleError::Mismatch(format!("{} and {} live over different categories", source.name, target.name)));
        }
        Ok(Self { source, target, bound, comps: Tensor::new() })
    }

    pub fn components(&self) -> &Tensor {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, w: &BiWord) -> Option<&BitVec> {
        if w.arity() >= self.bound {
            return None;
        }
        self.comps.get(&w.key())
    }

    pub fn set(&mut self, w: &BiWord, v: BitVec) {
        let (x, y) = w.output_objects();
        assert_eq!(v.len(), self.target.dim(x, y), "component output length");
        self.comps.insert(w.key(), v);
    }

    pub fn add_component(&mut self, w: &BiWord, v: &BitVec) {
        self.comps.add(&w.key(), v);
    }

    pub(crate) fn from_parts(source: Arc<Bimodule>, target: Arc<Bimodule>, bound: usize, comps: Tensor) -> PreMorphism {
        PreMorphism { source, target, bound, comps }
    }

    /// Largest total arity with a non-zero component.
    pub fn max_arity(&self) -> Option<usize> {
        self.comps.iter().map(|(k, _)| (k[0] + k[1]) as usize).max()
    }

    /// `e_M`: the identity in arity `(0|1|0)`.
    pub fn unit(m: Arc<Bimodule>) -> PreMorphism {
        let mut e = PreMorphism::zero(m.clone(), m.clone(), EXACT).unwrap();
        for x in 0..m.left.num_objects() as u32 {
            for y in 0..m.right.num_objects() as u32 {
                for z in 0..m.dim(x, y) {
                    e.set(&BiWord { lo: vec![x], ro: vec![y], lb: vec![], z: z as u32, rb: vec![] }, BitVec::unit(m.dim(x, y), z));
                }
            }
        }
        e
    }

    /// Value of `nu` on one word given as a context plus module vector.
    pub fn apply_ctx(&self, ctx: &Context, z: &BitVec) -> BitVec {
        let (x, y) = (ctx.lo[0], ctx.ro[ctx.ro.len() - 1]);
        let mut out = BitVec::zeros(self.target.dim(x, y));
        let mut w = ctx.fill(0);
        for b in z.ones() {
            w.z = b as u32;
            if let Some(v) = self.get(&w) {
                out.xor_assign(v);
            }
        }
        out
    }

    /// Arity at which `mu_1` of an exact morphism certainly vanishes.
    fn exact_reach(&self) -> usize {
        let s = &self.source;
        let t = &self.target;
        let extra = s.arity_bound.max(t.arity_bound).max(s.left.arity_bound().saturating_sub(1)).max(s.right.arity_bound().saturating_sub(1));
        self.max_arity().map_or(0, |a| a + extra + 1)
    }

    /// The differential in the bimodule dg-category, on arities `< l`.
    pub fn mu1(&self, l: usize) -> PreMorphism {
        let l = if self.bound == EXACT && l == EXACT { self.exact_reach() } else { l.min(self.bound) };
        let mut out = PreMorphism { bound: if self.bound == EXACT && l == self.exact_reach() { EXACT } else { l }, ..PreMorphism::zero(self.source.clone(), self.target.clone(), l).unwrap() };
        for t in 0..l {
            self.source.for_each_word_into(t, &self.target, |w| {
                let v = self.mu1_at(w);
                if !v.is_zero() {
                    out.comps.insert(w.key(), v);
                }
            });
        }
        out
    }

    /// `mu_1` of an exactly known morphism, computed to the arity where it
    /// must vanish.
    pub fn mu1_exact(&self) -> PreMorphism {
        assert_eq!(self.bound, EXACT, "mu1_exact needs an exact morphism");
        self.mu1(EXACT)
    }

    pub fn is_closed(&self) -> bool {
        if self.bound == EXACT {
            self.mu1_exact().is_zero()
        } else {
            self.mu1(self.bound).is_zero()
        }
    }

    pub fn mu1_at(&self, w: &BiWord) -> BitVec {
        let (x, y) = w.output_objects();
        let mut v = BitVec::zeros(self.target.dim(x, y));
        for_each_term(&self.source, &self.target, w, Sums::ALL, |t| match t {
            Term::Direct(w2) => {
                if let Some(c) = self.get(&w2) {
                    v.xor_assign(c);
                }
            }
            Term::Post(inner, outer) => {
                if let Some(c) = self.get(&inner) {
                    v.xor_assign(&self.target.mu_ctx(&outer, c));
                }
            }
        });
        v
    }

    /// `mu_2(self, next)`: first `self`, then `next`.
    pub fn then(&self, next: &PreMorphism) -> Result<PreMorphism, BimoduleError> {
        if *self.target != *next.source {
            return Err(BimoduleError::Mismatch(format!("cannot compose into {} with a map out of {}", self.target.name, next.source.name)));
        }
        let l = self.bound.min(next.bound);
        let reach = match (self.max_arity(), next.max_arity()) {
            (Some(a), Some(b)) => a + b + 1,
            _ => 0,
        };
        let l_eff = if l == EXACT { reach } else { l };
        let mut out = PreMorphism::zero(self.source.clone(), next.target.clone(), l)?;
        for t in 0..l_eff {
            self.source.for_each_word_into(t, &next.target, |w| {
                let (x, y) = w.output_objects();
                let mut v = BitVec::zeros(next.target.dim(x, y));
                for a in 0..=w.k() {
                    for b in 0..=w.m() {
                        let (inner, outer) = w.split(a, b);
                        if let Some(c) = self.get(&inner) {
                            v.xor_assign(&next.apply_ctx(&outer, c));
                        }
                    }
                }
                if !v.is_zero() {
                    out.comps.insert(w.key(), v);
                }
            });
        }
        Ok(out)
    }

    pub fn add(&self, other: &PreMorphism) -> PreMorphism {
        let mut out = self.clone();
        out.bound = self.bound.min(other.bound);
        for (k, v) in other.comps.iter() {
            out.comps.add(k, v);
        }
        out.truncate(out.bound);
        out
    }

    /// Drops components of arity `>= l`.
    pub fn truncate(&mut self, l: usize) {
        self.bound = self.bound.min(l);
        let b = self.bound;
        self.comps.retain(|k, _| ((k[0] + k[1]) as usize) < b);
    }

    pub fn truncated(&self, l: usize) -> PreMorphism {
        let mut c = self.clone();
        c.truncate(l);
        c
    }

    /// Degree `|nu|`, if all components are homogeneous of one degree.
    pub fn degree(&self) -> Result<Option<i64>, String> {
        if !self.source.is_graded() {
            return Ok(None);
        }
        let mut found: Option<i64> = None;
        for (key, v) in self.comps.sorted() {
            let w = BiWord::from_key(key);
            let din = self.source.input_degree(&w);
            let (x, y) = w.output_objects();
            let (na, nb) = (self.source.left.degree.unwrap(), self.source.right.degree.unwrap());
            let shift = w.k() as i64 * (1 - na) + w.m() as i64 * (1 - nb);
            for b in v.ones() {
                let d = self.target.space(x, y).degrees[b] - din - shift;
                match found {
                    None => found = Some(d),
                    Some(f) if f != d => return Err(format!("components of degrees {f} and {d}")),
                    _ => {}
                }
            }
        }
        Ok(found)
    }

    /// Dual morphism `target^ -> source^`.
    pub fn dual(&self, source_dual: Arc<Bimodule>, target_dual: Arc<Bimodule>) -> PreMorphism {
        let comps = transpose_tensor(&self.comps, |w| self.source.dim(w.input_objects().0, w.input_objects().1));
        PreMorphism { source: target_dual, target: source_dual, bound: self.bound, comps }
    }

    /// Pullback of the morphism along `(F0, F1)`, between the given pulled-back
    /// endpoints.
    pub fn pullback(&self, f0: Option<&Functor>, f1: Option<&Functor>, source: Arc<Bimodule>, target: Arc<Bimodule>, l: usize) -> PreMorphism {
        let mut out = PreMorphism::zero(source.clone(), target.clone(), l.min(self.bound)).unwrap();
        let map0 = |x: u32| f0.map_or(x, |f| f.obj(x));
        let map1 = |y: u32| f1.map_or(y, |f| f.obj(y));
        let reach = if l == EXACT && self.bound == EXACT {
            let k = f0.map_or(1, Functor::arity_bound).max(f1.map_or(1, Functor::arity_bound));
            self.max_arity().map_or(0, |a| a * k + 1)
        } else {
            l.min(self.bound)
        };
        for t in 0..reach {
            source.for_each_word_into(t, &target, |w| {
                let d = self.target.dim(map0(w.lo[0]), map1(w.ro[w.m()]));
                let v = pulled_value(w, f0, f1, d, &|w2| self.get(w2).cloned());
                if !v.is_zero() {
                    out.comps.insert(w.key(), v);
                }
            });
        }
        out
    }

    /// Same components between other (structurally identical) endpoints.
    pub fn reattach(&self, source: Arc<Bimodule>, target: Arc<Bimodule>) -> PreMorphism {
        PreMorphism { source, target, bound: self.bound, comps: self.comps.clone() }
    }

    /// Random components on all words of arity `< l`.
    pub fn random(source: Arc<Bimodule>, target: Arc<Bimodule>, l: usize, rng: &mut impl rand::Rng) -> PreMorphism {
        let mut out = PreMorphism::zero(source.clone(), target.clone(), l).unwrap();
        for t in 0..l {
            source.for_each_word_into(t, &target, |w| {
                let (x, y) = w.output_objects();
                let d = target.dim(x, y);
                out.comps.insert(w.key(), BitVec::from_indices(d, (0..d).filter(|_| rng.gen_bool(0.5))));
            });
        }
        out
    }

    /// Map of value complexes `source(x,y) -> target(x,y)` given by `(0|1|0)`.
    pub fn linear_part(&self, x: u32, y: u32) -> F2Matrix {
        let n = self.source.dim(x, y);
        let cols: Vec<BitVec> = (0..n as u32)
            .map(|z| self.get(&BiWord { lo: vec![x], ro: vec![y], lb: vec![], z, rb: vec![] }).cloned().unwrap_or_else(|| BitVec::zeros(self.target.dim(x, y))))
            .collect();
        F2Matrix::from_columns(self.target.dim(x, y), &cols)
    }

    /// The `(0|1|0)` part as a chain map with the morphism degree as shift.
    pub fn linear_chain_map(&self, x: u32, y: u32) -> ChainMap {
        let shift = self.degree().ok().flatten().unwrap_or(0);
        ChainMap::new(self.source.value_complex(x, y), self.target.value_complex(x, y), shift, self.linear_part(x, y)).expect("(0|1|0) part of a closed morphism is a chain map")
    }

    /// Quasi-isomorphism test on every value complex.
    pub fn is_quasi_iso(&self) -> bool {
        (0..self.source.left.num_objects() as u32).all(|x| (0..self.source.right.num_objects() as u32).all(|y| self.linear_chain_map(x, y).is_quasi_iso()))
    }
}

/// Cone of a closed morphism of left modules `nu: M -> M'`: value
/// `M[-(|nu|+1)] (+) M'` with operations `[[mu^M, 0], [nu, mu^M']]`.
pub struct Cone {
    pub module: Arc<Bimodule>,
    pub inclusion: PreMorphism,
    pub projection: PreMorphism,
}

pub fn cone(nu: &PreMorphism) -> Result<Cone, BimoduleError> {
    let (m, mp) = (&nu.source, &nu.target);
    if m.shape != Shape::Left {
        return Err(BimoduleError::Mismatch("cones are built for left modules".into()));
    }
    if nu.bound != EXACT || !nu.is_closed() {
        return Err(BimoduleError::NotClosed);
    }
    let shift = nu.degree().map_err(BimoduleError::BadEntry)?.unwrap_or(0) + 1;
    let a = m.left.clone();
    let n = a.num_objects() as u32;
    let values: Vec<HomSpace> = (0..n)
        .map(|x| {
            let s = m.value(x);
            let t = mp.value(x);
            let mut labels: Vec<String> = s.labels.iter().map(|l| format!("s{l}")).collect();
            labels.extend(t.labels.iter().cloned());
            let mut degrees: Vec<i64> = s.degrees.iter().map(|d| d + shift).collect();
            degrees.extend(t.degrees.iter().copied());
            HomSpace { labels, degrees }
        })
        .collect();
    let bound = m.arity_bound.max(mp.arity_bound).max(nu.max_arity().unwrap_or(0));
    let mut c = Bimodule::left_module(&format!("cone({}->{})", m.name, mp.name), a.clone(), values, bound);
    c.right = m.right.clone();
    let off = |x: u32| m.value(x).dim();
    // source block
    for (key, v) in m.mu.iter() {
        let w = BiWord::from_key(key);
        let out = BitVec::zeros(off(w.lo[0])).concat(&BitVec::zeros(mp.value(w.lo[0]).dim()));
        let mut o = out;
        for b in v.ones() {
            o.set(b, true);
        }
        c.mu.add(&w.key(), &o);
    }
    // target block
    for (key, v) in mp.mu.iter() {
        let mut w = BiWord::from_key(key);
        w.z += off(w.lo[w.k()]) as u32;
        let o = BitVec::zeros(off(w.lo[0])).concat(v);
        c.mu.add(&w.key(), &o);
    }
    // off-diagonal block
    for (key, v) in nu.comps.iter() {
        let w = BiWord::from_key(key);
        let o = BitVec::zeros(off(w.lo[0])).concat(v);
        c.mu.add(&w.key(), &o);
    }
    let c = Arc::new(c);
    let mut inclusion = PreMorphism::zero(mp.clone(), c.clone(), EXACT)?;
    let mut projection = PreMorphism::zero(c.clone(), m.clone(), EXACT)?;
    for x in 0..n {
        for z in 0..mp.value(x).dim() {
            let w = BiWord { lo: vec![x], ro: vec![0], lb: vec![], z: z as u32, rb: vec![] };
            inclusion.set(&w, BitVec::zeros(off(x)).concat(&BitVec::unit(mp.value(x).dim(), z)));
        }
        for z in 0..off(x) {
            let w = BiWord { lo: vec![x], ro: vec![0], lb: vec![], z: z as u32, rb: vec![] };
            projection.set(&w, BitVec::unit(off(x), z));
        }
    }
    Ok(Cone { module: c, inclusion, projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn dual_numbers() -> Arc<Category> {
        let mut c = Category::new("D", Some(0), &["X"], vec![vec![HomSpace::new(&["1", "x"], &[0, 0])]], 2);
        c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(2, 0)).unwrap();
        c.set_mu(&[0, 0, 0], &[0, 1], BitVec::unit(2, 1)).unwrap();
        c.set_mu(&[0, 0, 0], &[1, 0], BitVec::unit(2, 1)).unwrap();
        Arc::new(c)
    }

    #[test]
    fn word_key_round_trip() {
        let w = BiWord { lo: vec![0, 1], ro: vec![2, 3, 4], lb: vec![5], z: 6, rb: vec![7, 8] };
        assert_eq!(BiWord::from_key(&w.key()), w);
        let (inner, outer) = w.split(1, 1);
        assert_eq!(inner.lo, vec![1]);
        assert_eq!(inner.ro, vec![2, 3]);
        assert_eq!(inner.rb, vec![7]);
        assert_eq!(outer.ro, vec![3, 4]);
        assert_eq!(outer.rb, vec![8]);
    }

    #[test]
    fn diagonal_of_dual_numbers_is_valid() {
        let d = Bimodule::diagonal(dual_numbers());
        assert!(d.validate().passed());
        let mut bad = d.clone();
        let w = BiWord { lo: vec![0, 0], ro: vec![0], lb: vec![1], z: 1, rb: vec![] };
        bad.flip_mu_bit(&w, 0).unwrap();
        assert!(!bad.validate().passed());
        assert!(d.with_spaces_of("zero").validate().passed());
    }

    #[test]
    fn double_dual_is_identity() {
        let d = Bimodule::diagonal(dual_numbers());
        let dd = d.dual().dual();
        assert_eq!(dd.mu_tensor(), d.mu_tensor());
        assert!(d.dual().validate().passed());
    }

    #[test]
    fn unit_is_closed_and_neutral() {
        let d = Arc::new(Bimodule::diagonal(dual_numbers()));
        let e = PreMorphism::unit(d.clone());
        assert!(e.is_closed());
        assert_eq!(e.then(&e).unwrap(), e);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let nu = PreMorphism::random(d.clone(), d.clone(), 3, &mut rng);
        assert_eq!(e.then(&nu).unwrap().truncated(3), nu);
        assert_eq!(nu.then(&e).unwrap().truncated(3), nu);
    }

    #[test]
    fn mu1_squares_to_zero_and_is_leibniz() {
        let d = Arc::new(Bimodule::diagonal(dual_numbers()));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let nu = PreMorphism::random(d.clone(), d.clone(), 4, &mut rng);
            let nu2 = PreMorphism::random(d.clone(), d.clone(), 4, &mut rng);
            assert!(nu.mu1(4).mu1(4).is_zero());
            let lhs = nu.then(&nu2).unwrap().mu1(4);
            let rhs = nu.mu1(4).then(&nu2).unwrap().add(&nu.then(&nu2.mu1(4)).unwrap());
            assert_eq!(lhs, rhs.truncated(4));
        }
    }

    #[test]
    fn pullback_along_identity() {
        let a = dual_numbers();
        let d = Bimodule::diagonal(a.clone());
        let id = Functor::identity(a);
        let p = d.pullback(Some(&id), Some(&id)).unwrap();
        assert_eq!(p.mu_tensor(), d.mu_tensor());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let a = dual_numbers();
        let mut m = Bimodule::left_module("M", a.clone(), vec![HomSpace::new(&["1", "x"], &[0, 0])], 1);
        // regular left module
        m.set_left(&[0, 0], &[0], 0, BitVec::unit(2, 0)).unwrap();
        m.set_left(&[0, 0], &[0], 1, BitVec::unit(2, 1)).unwrap();
        m.set_left(&[0, 0], &[1], 0, BitVec::unit(2, 1)).unwrap();
        assert!(m.validate().passed());
        let m = Arc::new(m);
        let e = PreMorphism::unit(m.clone());
        let c = cone(&e).unwrap();
        assert!(c.module.validate().passed());
        assert_eq!(c.module.value_complex(0, 0).total_homology_dim(), 0);
        assert!(c.inclusion.is_closed());
        assert!(c.projection.is_closed());
    }
}

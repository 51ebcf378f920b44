//! A-infinity functors between finite categories, their composition, and
//! pre-natural transformations with the differential of the functor category.

use std::sync::Arc;

use thiserror::Error;

use crate::category::{Category, RelationFailure, RelationReport};
use crate::gf2::BitVec;
use crate::tensor::{compositions, for_each_support, for_each_word, Key, Tensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("object map has {got} entries, source has {want} objects")]
    ObjectMapLength { got: usize, want: usize },
    #[error("object map sends {0} outside the target")]
    ObjectOutOfRange(String),
    #[error("categories do not match: {0}")]
    Mismatch(String),
    #[error("component has wrong shape: {0}")]
    BadComponent(String),
}

#[derive(Clone, Debug)]
pub struct Functor {
    pub name: String,
    pub source: Arc<Category>,
    pub target: Arc<Category>,
    obj_map: Vec<u32>,
    arity_bound: usize,
    comps: Tensor,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.obj_map == other.obj_map && self.comps == other.comps
    }
}

impl Functor {
    pub fn new(name: &str, source: Arc<Category>, target: Arc<Category>, obj_map: Vec<u32>, arity_bound: usize) -> Result<Self, FunctorError> {
        if obj_map.len() != source.num_objects() {
            return Err(FunctorError::ObjectMapLength { got: obj_map.len(), want: source.num_objects() });
        }
        if let Some(i) = obj_map.iter().position(|&o| o as usize >= target.num_objects()) {
            return Err(FunctorError::ObjectOutOfRange(source.objects()[i].clone()));
        }
        Ok(Self { name: name.to_string(), source, target, obj_map, arity_bound, comps: Tensor::new() })
    }

    pub fn identity(a: Arc<Category>) -> Self {
        let n = a.num_objects() as u32;
        let mut f = Functor::new(&format!("id_{}", a.name), a.clone(), a.clone(), (0..n).collect(), 1).unwrap();
        for x in 0..n {
            for y in 0..n {
                for b in 0..a.dim(x, y) {
                    f.set(&[x, y], &[b as u32], BitVec::unit(a.dim(x, y), b)).unwrap();
                }
            }
        }
        f
    }

    pub fn obj(&self, x: u32) -> u32 {
        self.obj_map[x as usize]
    }

    pub fn obj_map(&self) -> &[u32] {
        &self.obj_map
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn components(&self) -> &Tensor {
        &self.comps
    }

    pub fn set(&mut self, path: &[u32], elems: &[u32], v: BitVec) -> Result<(), FunctorError> {
        self.source.check_word(path, elems).map_err(|e| FunctorError::BadComponent(e.to_string()))?;
        let k = elems.len();
        if k == 0 || k > self.arity_bound {
            return Err(FunctorError::BadComponent(format!("arity {k} outside 1..={}", self.arity_bound)));
        }
        let want = self.target.dim(self.obj(path[0]), self.obj(path[k]));
        if v.len() != want {
            return Err(FunctorError::BadComponent(format!("output length {} != {want}", v.len())));
        }
        self.comps.insert([path, elems].concat(), v);
        Ok(())
    }

    pub fn get(&self, path: &[u32], elems: &[u32]) -> Option<&BitVec> {
        if elems.len() > self.arity_bound {
            return None;
        }
        let key: Key = [path, elems].concat();
        self.comps.get(&key)
    }

    /// `F_k` extended multilinearly.
    pub fn apply(&self, path: &[u32], inputs: &[&BitVec]) -> BitVec {
        let k = inputs.len();
        let mut out = BitVec::zeros(self.target.dim(self.obj(path[0]), self.obj(path[k])));
        if k == 0 || k > self.arity_bound {
            return out;
        }
        for_each_support(inputs, |w| {
            if let Some(v) = self.get(path, w) {
                out.xor_assign(v);
            }
        });
        out
    }

    /// Calls `f(image_path, outputs)` for every splitting of the word into
    /// consecutive segments, each mapped by a component of `self`.
    pub fn for_each_split(&self, path: &[u32], elems: &[u32], max_parts: usize, mut f: impl FnMut(&[u32], &[&BitVec])) {
        let k = elems.len();
        for comp in compositions(k, self.arity_bound, max_parts) {
            let mut outs = Vec::with_capacity(comp.len());
            let mut img = vec![self.obj(path[0])];
            let mut start = 0;
            let mut ok = true;
            for &p in &comp {
                match self.get(&path[start..=start + p], &elems[start..start + p]) {
                    Some(v) => outs.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
                start += p;
                img.push(self.obj(path[start]));
            }
            if ok {
                f(&img, &outs);
            }
        }
    }

    /// Degree of `F_k` in graded mode.
    pub fn component_degree(&self, k: usize) -> Option<i64> {
        match (self.source.degree, self.target.degree) {
            (Some(na), Some(nb)) => Some(-1 + k as i64 * (1 - na) + nb),
            _ => None,
        }
    }

    /// Largest arity at which the relations can have a non-zero term.
    pub fn relation_depth(&self) -> usize {
        (self.target.arity_bound() * self.arity_bound).max(self.arity_bound + self.source.arity_bound() - 1)
    }

    /// Both sides of the functor relation summed, on one basis word.
    pub fn relation_value(&self, path: &[u32], elems: &[u32]) -> BitVec {
        let k = elems.len();
        let b = &self.target;
        let mut total = BitVec::zeros(b.dim(self.obj(path[0]), self.obj(path[k])));
        self.for_each_split(path, elems, b.arity_bound(), |img, outs| {
            total.xor_assign(&b.mu_vecs(img, outs));
        });
        let a = &self.source;
        for q in 1..=k.min(a.arity_bound()) {
            if k - q + 1 > self.arity_bound {
                continue;
            }
            for j in 0..=k - q {
                let Some(inner) = a.mu(&path[j..=j + q], &elems[j..j + q]) else { continue };
                let mut p2: Vec<u32> = path[..=j].to_vec();
                p2.extend_from_slice(&path[j + q..]);
                let mut w2: Vec<u32> = elems[..j].to_vec();
                w2.push(0);
                w2.extend_from_slice(&elems[j + q..]);
                for bit in inner.ones() {
                    w2[j] = bit as u32;
                    if let Some(v) = self.get(&p2, &w2) {
                        total.xor_assign(v);
                    }
                }
            }
        }
        total
    }

    pub fn validate(&self) -> RelationReport {
        let top = self.relation_depth();
        let mut report = RelationReport { checked_up_to: top, ..Default::default() };
        for k in 1..=top {
            self.source.for_each_word(k, |p, w| {
                let v = self.relation_value(p, w);
                if !v.is_zero() {
                    report.failures.push(RelationFailure { arity: k, ..self.source.failure(k, p, w, v) });
                }
            });
        }
        report.degree_violations = self.degree_audit();
        report
    }

    pub fn degree_audit(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.component_degree(1).is_none() {
            return bad;
        }
        for (key, v) in self.comps.sorted() {
            let k = (key.len() - 1) / 2;
            let (path, elems) = key.split_at(k + 1);
            let din: i64 = elems.iter().enumerate().map(|(i, &e)| self.source.elem_degree(path[i], path[i + 1], e)).sum();
            let want = din + self.component_degree(k).unwrap();
            let out = self.target.hom(self.obj(path[0]), self.obj(path[k]));
            for bit in v.ones() {
                if out.degrees[bit] != want {
                    bad.push(format!("{}_{k} on {:?} has degree {}, expected {want}", self.name, key, out.degrees[bit]));
                }
            }
        }
        bad
    }

    /// `g . f`.
    pub fn compose(g: &Functor, f: &Functor) -> Result<Functor, FunctorError> {
        if *f.target != *g.source {
            return Err(FunctorError::Mismatch(format!("{} does not land in the source of {}", f.name, g.name)));
        }
        let obj_map = f.obj_map.iter().map(|&x| g.obj(x)).collect();
        let bound = f.arity_bound * g.arity_bound;
        let mut out = Functor::new(&format!("{}.{}", g.name, f.name), f.source.clone(), g.target.clone(), obj_map, bound)?;
        for k in 1..=bound {
            f.source.for_each_word(k, |p, w| {
                let mut v = BitVec::zeros(out.target.dim(out.obj(p[0]), out.obj(p[k])));
                f.for_each_split(p, w, g.arity_bound, |img, outs| {
                    v.xor_assign(&g.apply(img, outs));
                });
                if !v.is_zero() {
                    out.comps.insert([p, w].concat(), v);
                }
            });
        }
        Ok(out)
    }

    /// Functor with only a first component, given as one matrix per hom space
    /// (`matrices[x][y]` has columns indexed by the basis of `hom(x,y)`).
    pub fn linear(name: &str, source: Arc<Category>, target: Arc<Category>, obj_map: Vec<u32>, images: impl Fn(u32, u32, u32) -> BitVec) -> Result<Functor, FunctorError> {
        let mut f = Functor::new(name, source.clone(), target, obj_map, 1)?;
        for x in 0..source.num_objects() as u32 {
            for y in 0..source.num_objects() as u32 {
                for b in 0..source.dim(x, y) as u32 {
                    f.set(&[x, y], &[b], images(x, y, b))?;
                }
            }
        }
        Ok(f)
    }

    /// Flips one output bit of one component.
    pub fn flip_bit(&mut self, path: &[u32], elems: &[u32], bit: usize) -> Result<(), FunctorError> {
        let want = self.target.dim(self.obj(path[0]), self.obj(path[path.len() - 1]));
        let mut v = self.get(path, elems).cloned().unwrap_or_else(|| BitVec::zeros(want));
        if bit >= want {
            return Err(FunctorError::BadComponent(format!("bit {bit} out of range")));
        }
        v.flip(bit);
        self.set(path, elems, v)
    }

    /// Random components up to `arity`, with output bits restricted to the
    /// degree each component must have (graded mode).
    pub fn random(name: &str, source: Arc<Category>, target: Arc<Category>, obj_map: Vec<u32>, arity: usize, rng: &mut impl rand::Rng) -> Result<Functor, FunctorError> {
        let mut f = Functor::new(name, source.clone(), target.clone(), obj_map, arity)?;
        for k in 1..=arity {
            let shift = f.component_degree(k);
            source.for_each_word(k, |p, w| {
                let (x, y) = (f.obj(p[0]), f.obj(p[k]));
                let space = target.hom(x, y);
                let want = shift.map(|s| s + (0..k).map(|i| source.elem_degree(p[i], p[i + 1], w[i])).sum::<i64>());
                let v = BitVec::from_indices(space.dim(), (0..space.dim()).filter(|&b| want.map_or(true, |d| space.degrees[b] == d) && rng.gen_bool(0.5)));
                f.comps.insert([p, w].concat(), v);
            });
        }
        Ok(f)
    }

    /// First random sample passing `validate`, or `None` after `tries` attempts.
    pub fn random_valid(name: &str, source: Arc<Category>, target: Arc<Category>, obj_map: Vec<u32>, arity: usize, tries: usize, rng: &mut impl rand::Rng) -> Result<Option<Functor>, FunctorError> {
        for _ in 0..tries {
            let f = Functor::random(name, source.clone(), target.clone(), obj_map.clone(), arity, rng)?;
            if f.validate().passed() {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }
}

/// Pre-natural transformation between functors with finite target. The
/// component at arity `k` is stored under `path ++ elems`; `T_0` uses the
/// one-object path. Components are meaningful for arities `< bound`.
#[derive(Clone, Debug)]
pub struct PreNat {
    pub f0: Arc<Functor>,
    pub f1: Arc<Functor>,
    pub bound: usize,
    comps: Tensor,
}

impl PartialEq for PreNat {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.comps == other.comps
    }
}

impl PreNat {
    pub fn zero(f0: Arc<Functor>, f1: Arc<Functor>, bound: usize) -> Result<Self, FunctorError> {
        if f0.source != f1.source || f0.target != f1.target {
            return Err(FunctorError::Mismatch("transformation endpoints differ in source or target".into()));
        }
        Ok(Self { f0, f1, bound, comps: Tensor::new() })
    }

    pub fn source(&self) -> &Arc<Category> {
        &self.f0.source
    }

    pub fn target(&self) -> &Arc<Category> {
        &self.f0.target
    }

    fn out_dim(&self, path: &[u32]) -> usize {
        self.target().dim(self.f0.obj(path[0]), self.f1.obj(path[path.len() - 1]))
    }

    pub fn set(&mut self, path: &[u32], elems: &[u32], v: BitVec) {
        assert_eq!(v.len(), self.out_dim(path));
        assert!(elems.len() < self.bound, "arity beyond the transformation bound");
        self.comps.insert([path, elems].concat(), v);
    }

    pub fn get(&self, path: &[u32], elems: &[u32]) -> Option<&BitVec> {
        let key: Key = [path, elems].concat();
        self.comps.get(&key)
    }

    pub fn components(&self) -> &Tensor {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Identity transformation of a functor: `T_0` is the given unit of each
    /// image object, higher components vanish.
    pub fn unit(f: Arc<Functor>, units: &[BitVec], bound: usize) -> Self {
        let mut t = PreNat::zero(f.clone(), f.clone(), bound).unwrap();
        for x in 0..f.source.num_objects() as u32 {
            t.set(&[x], &[], units[f.obj(x) as usize].clone());
        }
        t
    }

    /// Differential in the functor category, by the closed formula.
    pub fn mu1(&self, l: usize) -> PreNat {
        let l = l.min(self.bound);
        let mut out = PreNat::zero(self.f0.clone(), self.f1.clone(), l).unwrap();
        let a = self.source().clone();
        let b = self.target().clone();
        for k in 0..l {
            a.for_each_word(k, |p, w| {
                let mut v = BitVec::zeros(self.out_dim(p));
                self.mu1_terms(&b, p, w, &mut v);
                self.insertion_terms(&a, p, w, &mut v);
                if !v.is_zero() {
                    out.comps.insert([p, w].concat(), v);
                }
            });
        }
        out
    }

    fn mu1_terms(&self, b: &Category, p: &[u32], w: &[u32], v: &mut BitVec) {
        let k = w.len();
        for lo in 0..=k {
            for hi in lo..=k {
                let Some(t) = self.get(&p[lo..=hi], &w[lo..hi]) else { continue };
                // F0 segments before, F1 segments after, at most K_B parts in total
                let left = split_outputs(&self.f0, &p[..=lo], &w[..lo]);
                let right = split_outputs(&self.f1, &p[hi..], &w[hi..]);
                for (lp, lo_outs) in &left {
                    for (rp, ro_outs) in &right {
                        let s = lo_outs.len() + 1 + ro_outs.len();
                        if s > b.arity_bound() {
                            continue;
                        }
                        let mut objs = lp.clone();
                        objs.extend_from_slice(rp);
                        let mut ins: Vec<&BitVec> = lo_outs.iter().collect();
                        ins.push(t);
                        ins.extend(ro_outs.iter());
                        v.xor_assign(&b.mu_vecs(&objs, &ins));
                    }
                }
            }
        }
    }

    fn insertion_terms(&self, a: &Category, p: &[u32], w: &[u32], v: &mut BitVec) {
        let k = w.len();
        for q in 1..=k.min(a.arity_bound()) {
            for j in 0..=k - q {
                let Some(inner) = a.mu(&p[j..=j + q], &w[j..j + q]) else { continue };
                let mut p2: Vec<u32> = p[..=j].to_vec();
                p2.extend_from_slice(&p[j + q..]);
                let mut w2: Vec<u32> = w[..j].to_vec();
                w2.push(0);
                w2.extend_from_slice(&w[j + q..]);
                for bit in inner.ones() {
                    w2[j] = bit as u32;
                    if let Some(t) = self.get(&p2, &w2) {
                        v.xor_assign(t);
                    }
                }
            }
        }
    }

    /// `(R_F)_1(self)`: precomposition with `F`.
    pub fn precompose(&self, f: &Arc<Functor>, l: usize) -> Result<PreNat, FunctorError> {
        if *f.target != **self.source() {
            return Err(FunctorError::Mismatch("precomposition".into()));
        }
        let g0 = Arc::new(Functor::compose(&self.f0, f)?);
        let g1 = Arc::new(Functor::compose(&self.f1, f)?);
        let l = l.min(self.bound);
        let mut out = PreNat::zero(g0, g1, l)?;
        for x in 0..f.source.num_objects() as u32 {
            if let Some(t) = self.get(&[f.obj(x)], &[]) {
                out.set(&[x], &[], t.clone());
            }
        }
        for k in 1..l {
            f.source.for_each_word(k, |p, w| {
                let mut v = BitVec::zeros(out.out_dim(p));
                f.for_each_split(p, w, usize::MAX, |img, outs| {
                    for_each_support(outs, |ws| {
                        if let Some(t) = self.get(img, ws) {
                            v.xor_assign(t);
                        }
                    });
                });
                if !v.is_zero() {
                    out.comps.insert([p, w].concat(), v);
                }
            });
        }
        Ok(out)
    }

    /// `(L_F)_1(self)`: postcomposition with `F`.
    pub fn postcompose(&self, f: &Arc<Functor>, l: usize) -> Result<PreNat, FunctorError> {
        if *f.source != **self.target() {
            return Err(FunctorError::Mismatch("postcomposition".into()));
        }
        let g0 = Arc::new(Functor::compose(f, &self.f0)?);
        let g1 = Arc::new(Functor::compose(f, &self.f1)?);
        let l = l.min(self.bound);
        let mut out = PreNat::zero(g0, g1, l)?;
        let c = self.source().clone();
        for k in 0..l {
            c.for_each_word(k, |p, w| {
                let mut v = BitVec::zeros(out.out_dim(p));
                for lo in 0..=k {
                    for hi in lo..=k {
                        let Some(t) = self.get(&p[lo..=hi], &w[lo..hi]) else { continue };
                        let left = split_outputs(&self.f0, &p[..=lo], &w[..lo]);
                        let right = split_outputs(&self.f1, &p[hi..], &w[hi..]);
                        for (lp, lo_outs) in &left {
                            for (rp, ro_outs) in &right {
                                let mut objs = lp.clone();
                                objs.extend_from_slice(rp);
                                let mut ins: Vec<&BitVec> = lo_outs.iter().collect();
                                ins.push(t);
                                ins.extend(ro_outs.iter());
                                v.xor_assign(&f.apply(&objs, &ins));
                            }
                        }
                    }
                }
                if !v.is_zero() {
                    out.comps.insert([p, w].concat(), v);
                }
            });
        }
        Ok(out)
    }

    pub fn add(&self, other: &PreNat) -> PreNat {
        let mut out = self.clone();
        out.bound = self.bound.min(other.bound);
        for (k, v) in other.comps.iter() {
            out.comps.add(k, v);
        }
        let bound = out.bound;
        out.comps.retain(|k, _| (k.len() - 1) / 2 < bound);
        out
    }

    /// Random components below arity `bound`, each bit set with probability 1/2.
    pub fn random(f0: Arc<Functor>, f1: Arc<Functor>, bound: usize, rng: &mut impl rand::Rng) -> PreNat {
        let mut t = PreNat::zero(f0, f1, bound).unwrap();
        let a = t.source().clone();
        for k in 0..bound {
            a.for_each_word(k, |p, w| {
                let d = t.out_dim(p);
                let v = BitVec::from_indices(d, (0..d).filter(|_| rng.gen_bool(0.5)));
                t.comps.insert([p, w].concat(), v);
            });
        }
        t
    }
}

/// All splittings of a word into segments mapped by `f`, as
/// `(image path, segment outputs)`; the empty word gives one empty split.
fn split_outputs(f: &Functor, path: &[u32], elems: &[u32]) -> Vec<(Vec<u32>, Vec<BitVec>)> {
    let mut out = Vec::new();
    f.for_each_split(path, elems, usize::MAX, |img, outs| {
        out.push((img.to_vec(), outs.iter().map(|v| (*v).clone()).collect()));
    });
    out
}

/// Every basis word of `a` up to arity `top`, as `(path, elems)`.
pub fn all_words(a: &Category, top: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for k in 1..=top {
        for p in a.paths(k) {
            let dims = a.path_dims(&p);
            for_each_word(&dims, |w| out.push((p.clone(), w.to_vec())));
        }
    }
    out
}

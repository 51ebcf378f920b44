//! Hochschild chain and cochain complexes with bimodule coefficients, the
//! two-pointed variants, and the comparison maps between them.
//!
//! Truncation: chain-type complexes keep words of length `<= L` (a
//! subcomplex, since the differential never lengthens a word); cochain-type
//! complexes keep components of arity `< L` (a quotient, since the
//! differential of an arity-`k` component only reads arities `<= k`).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::bimodule::{for_each_term, BiWord, Bimodule, PreMorphism, Shape, Sums, Term, EXACT};
use crate::category::Category;
use crate::functor::Functor;
use crate::gf2::{BitVec, ChainComplex, ChainMap, F2Matrix, LinalgError, QuasiIsoReport};
use crate::tensor::{for_each_support, for_each_word, Key};

#[derive(Debug, Error)]
pub enum HochschildError {
    #[error("truncation {0} is too small")]
    BadTruncation(usize),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("morphism is not closed")]
    NotClosed,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, HochschildError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Chains,
    Cochains,
    TwoChains,
    TwoCochains,
}

impl Variant {
    pub fn is_chain_side(self) -> bool {
        matches!(self, Variant::Chains | Variant::TwoChains)
    }
}

/// Degrees at which a truncated complex coincides with the untruncated one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stable {
    All,
    Above(i64),
    Below(i64),
    Nowhere,
}

impl Stable {
    pub fn contains(self, d: i64) -> bool {
        match self {
            Stable::All => true,
            Stable::Above(u) => d > u,
            Stable::Below(l) => d < l,
            Stable::Nowhere => false,
        }
    }

    pub fn contains_range(self, lo: i64, hi: i64) -> bool {
        (lo..=hi).all(|d| self.contains(d))
    }
}

/// A realized, truncated Hochschild-type complex. Basis element `i` is
/// described by `keys[i]`, whose layout depends on the variant:
///
/// * chains: `[k] ++ path ++ elems ++ [w]`
/// * cochains: `[k] ++ path ++ elems ++ [b]`
/// * two-pointed chains: `[k, m] ++ xpath ++ ypath ++ xelems ++ yelems ++ [w, z]`
/// * two-pointed cochains: `BiWord::key() ++ [b]`
#[derive(Clone, Debug)]
pub struct HochschildComplex {
    pub variant: Variant,
    pub max_len: usize,
    pub complex: ChainComplex,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    stable: Stable,
}

impl HochschildComplex {
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn index_of(&self, key: &[u32]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn stable(&self) -> Stable {
        self.stable
    }

    /// Homology dimension per degree (`None` when ungraded).
    pub fn homology_dims(&self) -> BTreeMap<Option<i64>, usize> {
        self.complex.homology().dims()
    }

    /// Word length (or total arity) of basis element `i`.
    pub fn word_length(&self, i: usize) -> usize {
        let k = &self.keys[i];
        match self.variant {
            Variant::Chains | Variant::Cochains => k[0] as usize,
            Variant::TwoChains | Variant::TwoCochains => (k[0] + k[1]) as usize,
        }
    }
}

struct Builder {
    keys: Vec<Key>,
    labels: Vec<String>,
    degrees: Vec<i64>,
    index: HashMap<Key, usize>,
}

impl Builder {
    fn new() -> Self {
        Builder { keys: Vec::new(), labels: Vec::new(), degrees: Vec::new(), index: HashMap::new() }
    }

    fn push(&mut self, key: Key, label: String, degree: i64) {
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.labels.push(label);
        self.degrees.push(degree);
    }

    fn at(&self, key: &[u32]) -> usize {
        *self.index.get(key).unwrap_or_else(|| panic!("basis word {key:?} missing from truncation"))
    }

    fn finish(self, variant: Variant, max_len: usize, graded: bool, d: F2Matrix, stable: Stable) -> Result<HochschildComplex> {
        let complex = ChainComplex::new(self.labels, graded.then_some(self.degrees), d)?;
        Ok(HochschildComplex { variant, max_len, complex, keys: self.keys, index: self.index, stable })
    }
}

fn word_label(a: &Category, path: &[u32], elems: &[u32]) -> String {
    let mut parts = Vec::with_capacity(elems.len());
    for (t, &e) in elems.iter().enumerate() {
        parts.push(a.hom(path[t], path[t + 1]).labels[e as usize].clone());
    }
    parts.join(".")
}

fn elems_degree(a: &Category, path: &[u32], elems: &[u32]) -> i64 {
    elems.iter().enumerate().map(|(t, &e)| a.elem_degree(path[t], path[t + 1], e)).sum()
}

pub fn chain_key(path: &[u32], elems: &[u32], w: u32) -> Key {
    let mut key = Vec::with_capacity(path.len() + elems.len() + 2);
    key.push(elems.len() as u32);
    key.extend_from_slice(path);
    key.extend_from_slice(elems);
    key.push(w);
    key
}

pub fn split_chain_key(key: &[u32]) -> (&[u32], &[u32], u32) {
    let k = key[0] as usize;
    (&key[1..k + 2], &key[k + 2..2 * k + 2], key[2 * k + 2])
}

fn tensor_key(xpath: &[u32], ypath: &[u32], xe: &[u32], ye: &[u32], w: u32, z: u32) -> Key {
    let mut key = vec![xe.len() as u32, ye.len() as u32];
    key.extend_from_slice(xpath);
    key.extend_from_slice(ypath);
    key.extend_from_slice(xe);
    key.extend_from_slice(ye);
    key.push(w);
    key.push(z);
    key
}

struct TensorWord<'a> {
    xpath: &'a [u32],
    ypath: &'a [u32],
    xe: &'a [u32],
    ye: &'a [u32],
    w: u32,
    z: u32,
}

fn split_tensor_key(key: &[u32]) -> TensorWord<'_> {
    let (k, m) = (key[0] as usize, key[1] as usize);
    let mut at = 2;
    let mut take = |n: usize| {
        let s = &key[at..at + n];
        at += n;
        s
    };
    let xpath = take(k + 1);
    let ypath = take(m + 1);
    let xe = take(k);
    let ye = take(m);
    let wz = take(2);
    TensorWord { xpath, ypath, xe, ye, w: wz[0], z: wz[1] }
}

fn cochain_key(path: &[u32], elems: &[u32], b: u32) -> Key {
    chain_key(path, elems, b)
}

fn premorphism_key(w: &BiWord, b: u32) -> Key {
    let mut key = w.key();
    key.push(b);
    key
}

fn cat(parts: &[&[u32]]) -> Vec<u32> {
    crate::tensor::concat(parts)
}

/// Range of degrees of basis elements of all hom spaces of `a`.
fn elem_range(a: &Category) -> Option<(i64, i64)> {
    let n = a.num_objects() as u32;
    let mut out: Option<(i64, i64)> = None;
    for x in 0..n {
        for y in 0..n {
            for &d in &a.hom(x, y).degrees {
                out = Some(out.map_or((d, d), |(lo, hi)| (lo.min(d), hi.max(d))));
            }
        }
    }
    out
}

fn value_range(m: &Bimodule) -> Option<(i64, i64)> {
    let mut out: Option<(i64, i64)> = None;
    for x in 0..m.left.num_objects() as u32 {
        for y in 0..m.right.num_objects() as u32 {
            for &d in &m.space(x, y).degrees {
                out = Some(out.map_or((d, d), |(lo, hi)| (lo.min(d), hi.max(d))));
            }
        }
    }
    out
}

/// Stable window for a complex whose omitted words have length `>= first`
/// and degree `base + sum over letters of (|e| + 1 - N) * sign`, with `base`
/// in `base_range` and `sign = +1` for chains, `-1` for cochains.
fn window(a: &Category, base_range: Option<(i64, i64)>, first: usize, sign: i64) -> Stable {
    let (Some(n), Some((emin, emax))) = (a.degree, elem_range(a)) else {
        return if a.degree.is_some() { Stable::All } else { Stable::Nowhere };
    };
    let Some((bmin, bmax)) = base_range else { return Stable::All };
    let first = first as i64;
    let (smin, smax) = (emin + 1 - n, emax + 1 - n);
    if sign > 0 {
        if smin > 0 {
            Stable::Below(bmin + first * smin)
        } else if smax < 0 {
            Stable::Above(bmax + first * smax)
        } else {
            Stable::Nowhere
        }
    } else if smin > 0 {
        Stable::Above(bmax - first * smin)
    } else if smax < 0 {
        Stable::Below(bmin - first * smax)
    } else {
        Stable::Nowhere
    }
}

fn check_coefficients(a: &Category, m: &Bimodule) -> Result<()> {
    if m.shape != Shape::Bi || *m.left != *a || *m.right != *a {
        return Err(HochschildError::Mismatch(format!("{} is not a bimodule over {}", m.name, a.name)));
    }
    Ok(())
}

/// `CC^*(A, M)`: cochains `g_k: A(X_0..X_k) -> M(X_0, X_k)` of arity `k < L`.
pub fn build_cc_cochains(a: &Category, m: &Bimodule, l: usize) -> Result<HochschildComplex> {
    if l < 1 {
        return Err(HochschildError::BadTruncation(l));
    }
    check_coefficients(a, m)?;
    let n = a.degree.unwrap_or(0);
    let mut bld = Builder::new();
    for k in 0..l {
        a.for_each_word(k, |p, e| {
            let s = m.space(p[0], p[k]);
            for b in 0..s.dim() as u32 {
                let deg = s.degrees[b as usize] - elems_degree(a, p, e) - n - k as i64 * (1 - n);
                bld.push(cochain_key(p, e, b), format!("[{}]->{}", word_label(a, p, e), s.labels[b as usize]), deg);
            }
        });
    }
    let dim = bld.keys.len();
    let mut d = F2Matrix::zeros(dim, dim);
    for row in 0..dim {
        let (p, e, bo) = split_chain_key(&bld.keys[row]);
        let k = e.len();
        // coefficient action around a segment
        for s in 0..=k {
            for t in s..=k {
                if s + (k - t) > m.arity_bound() {
                    continue;
                }
                let mut w = BiWord { lo: p[..=s].to_vec(), ro: p[t..].to_vec(), lb: e[..s].to_vec(), z: 0, rb: e[t..].to_vec() };
                for b in 0..m.dim(p[s], p[t]) as u32 {
                    w.z = b;
                    if m.mu(&w).is_some_and(|v| v.get(bo as usize)) {
                        d.flip(row, bld.at(&cochain_key(&p[s..=t], &e[s..t], b)));
                    }
                }
            }
        }
        // category operation inside the argument
        for s in 0..k {
            for t in s + 1..=k.min(s + a.arity_bound()) {
                if let Some(v) = a.mu(&p[s..=t], &e[s..t]) {
                    let path = cat(&[&p[..=s], &p[t..]]);
                    for c in v.ones() {
                        let elems = cat(&[&e[..s], &[c as u32], &e[t..]]);
                        d.flip(row, bld.at(&cochain_key(&path, &elems, bo)));
                    }
                }
            }
        }
    }
    let stable = window(a, value_range(m).map(|(lo, hi)| (lo - n, hi - n)), l, -1);
    bld.finish(Variant::Cochains, l, a.is_graded(), d, stable)
}

/// `CC_*(A, M)`: words `x_1 (x) .. (x) x_k (x) w` with `w in M(X_k, X_0)` and `k <= L`.
pub fn build_cc_chains(a: &Category, m: &Bimodule, l: usize) -> Result<HochschildComplex> {
    check_coefficients(a, m)?;
    let n = a.degree.unwrap_or(0);
    let mut bld = Builder::new();
    for k in 0..=l {
        a.for_each_word(k, |p, e| {
            let s = m.space(p[k], p[0]);
            for w in 0..s.dim() as u32 {
                let deg = elems_degree(a, p, e) + s.degrees[w as usize] - n + k as i64 * (1 - n);
                let word = word_label(a, p, e);
                let label = if word.is_empty() { s.labels[w as usize].clone() } else { format!("{word}|{}", s.labels[w as usize]) };
                bld.push(chain_key(p, e, w), label, deg);
            }
        });
    }
    let dim = bld.keys.len();
    let mut d = F2Matrix::zeros(dim, dim);
    for col in 0..dim {
        let (p, e, w) = split_chain_key(&bld.keys[col]);
        let k = e.len();
        for s in 0..k {
            for t in s + 1..=k.min(s + a.arity_bound()) {
                if let Some(v) = a.mu(&p[s..=t], &e[s..t]) {
                    let path = cat(&[&p[..=s], &p[t..]]);
                    for c in v.ones() {
                        let elems = cat(&[&e[..s], &[c as u32], &e[t..]]);
                        d.flip(bld.at(&chain_key(&path, &elems, w)), col);
                    }
                }
            }
        }
        wrap_around(m, p, e, w, true, |path, elems, o| d.flip(bld.at(&chain_key(path, elems, o)), col), |wd| m.mu(wd).cloned());
    }
    let stable = window(a, value_range(m).map(|(lo, hi)| (lo - n, hi - n)), l + 1, 1);
    bld.finish(Variant::Chains, l, a.is_graded(), d, stable)
}

/// Applies `op` to the letters `x_a..x_k, w, x_1..x_c` (`c <= a`) of a chain
/// word, reporting the shortened words `x_{c+1}..x_a (x) o`.
fn wrap_around(m: &Bimodule, p: &[u32], e: &[u32], w: u32, bounded: bool, mut f: impl FnMut(&[u32], &[u32], u32), op: impl Fn(&BiWord) -> Option<BitVec>) {
    let k = e.len();
    for a in 0..=k {
        for c in 0..=a {
            if bounded && (k - a) + c > m.arity_bound() {
                continue;
            }
            let word = BiWord { lo: p[a..].to_vec(), ro: p[..=c].to_vec(), lb: e[a..].to_vec(), z: w, rb: e[..c].to_vec() };
            if let Some(v) = op(&word) {
                for o in v.ones() {
                    f(&p[c..=a], &e[c..a], o as u32);
                }
            }
        }
    }
}

/// Bimodule tensor product of an `A-B` bimodule `n` with a `B-A` bimodule
/// `n2`, on words `w (x) y_m..y_1 (x) z (x) x_1..x_k` with `k + m <= L`.
pub fn bimodule_tensor(n: &Bimodule, n2: &Bimodule, l: usize) -> Result<HochschildComplex> {
    if n.shape != Shape::Bi || n2.shape != Shape::Bi || *n.left != *n2.right || *n.right != *n2.left {
        return Err(HochschildError::Mismatch(format!("{} and {} cannot be tensored", n.name, n2.name)));
    }
    let a = n.left.clone();
    let b = n.right.clone();
    let graded = a.is_graded() && b.is_graded();
    let (na, nb) = (a.degree.unwrap_or(0), b.degree.unwrap_or(0));
    let mut bld = Builder::new();
    for t in 0..=l {
        for k in 0..=t {
            let m = t - k;
            for xp in a.paths(k) {
                for yp in b.paths(m) {
                    let (ws, zs) = (n.space(xp[k], yp[0]), n2.space(yp[m], xp[0]));
                    if ws.dim() == 0 || zs.dim() == 0 {
                        continue;
                    }
                    let mut dims = a.path_dims(&xp);
                    dims.extend(b.path_dims(&yp));
                    dims.push(ws.dim());
                    dims.push(zs.dim());
                    for_each_word(&dims, |idx| {
                        let (xe, ye, w, z) = (&idx[..k], &idx[k..k + m], idx[k + m], idx[k + m + 1]);
                        let deg = elems_degree(&a, &xp, xe) + elems_degree(&b, &yp, ye) + ws.degrees[w as usize] + zs.degrees[z as usize] + k as i64 * (1 - na) + m as i64 * (1 - nb) - na - nb;
                        let label = format!(
                            "{}|{}|{}|{}",
                            ws.labels[w as usize],
                            word_label(&b, &yp, ye),
                            zs.labels[z as usize],
                            word_label(&a, &xp, xe)
                        );
                        bld.push(tensor_key(&xp, &yp, xe, ye, w, z), label, deg);
                    });
                }
            }
        }
    }
    let dim = bld.keys.len();
    let mut d = F2Matrix::zeros(dim, dim);
    for col in 0..dim {
        let key = bld.keys[col].clone();
        let tw = split_tensor_key(&key);
        let (k, m) = (tw.xe.len(), tw.ye.len());
        // n acts on w with x_a..x_k on its left and y_m..y_c on its right
        for i in 0..=k {
            for c in 0..=m {
                if (k - i) + c > n.arity_bound() {
                    continue;
                }
                let word = BiWord { lo: tw.xpath[i..].to_vec(), ro: tw.ypath[..=c].to_vec(), lb: tw.xe[i..].to_vec(), z: tw.w, rb: tw.ye[..c].to_vec() };
                if let Some(v) = n.mu(&word) {
                    for o in v.ones() {
                        let row = tensor_key(&tw.xpath[..=i], &tw.ypath[c..], &tw.xe[..i], &tw.ye[c..], o as u32, tw.z);
                        d.flip(bld.at(&row), col);
                    }
                }
            }
        }
        // n2 acts on z with y_j..y_1 on its left and x_1..x_i on its right
        for j in 0..=m {
            for i in 0..=k {
                if (m - j) + i > n2.arity_bound() {
                    continue;
                }
                let word = BiWord { lo: tw.ypath[j..].to_vec(), ro: tw.xpath[..=i].to_vec(), lb: tw.ye[j..].to_vec(), z: tw.z, rb: tw.xe[..i].to_vec() };
                if let Some(v) = n2.mu(&word) {
                    for o in v.ones() {
                        let row = tensor_key(&tw.xpath[i..], &tw.ypath[..=j], &tw.xe[i..], &tw.ye[..j], tw.w, o as u32);
                        d.flip(bld.at(&row), col);
                    }
                }
            }
        }
        for s in 0..k {
            for t in s + 1..=k.min(s + a.arity_bound()) {
                if let Some(v) = a.mu(&tw.xpath[s..=t], &tw.xe[s..t]) {
                    let xp = cat(&[&tw.xpath[..=s], &tw.xpath[t..]]);
                    for c in v.ones() {
                        let xe = cat(&[&tw.xe[..s], &[c as u32], &tw.xe[t..]]);
                        d.flip(bld.at(&tensor_key(&xp, tw.ypath, &xe, tw.ye, tw.w, tw.z)), col);
                    }
                }
            }
        }
        for s in 0..m {
            for t in s + 1..=m.min(s + b.arity_bound()) {
                if let Some(v) = b.mu(&tw.ypath[s..=t], &tw.ye[s..t]) {
                    let yp = cat(&[&tw.ypath[..=s], &tw.ypath[t..]]);
                    for c in v.ones() {
                        let ye = cat(&[&tw.ye[..s], &[c as u32], &tw.ye[t..]]);
                        d.flip(bld.at(&tensor_key(tw.xpath, &yp, tw.xe, &ye, tw.w, tw.z)), col);
                    }
                }
            }
        }
    }
    let stable = if *a == *b {
        let base = match (value_range(n), value_range(n2)) {
            (Some(r1), Some(r2)) => Some((r1.0 + r2.0 - 2 * na, r1.1 + r2.1 - 2 * na)),
            _ => None,
        };
        window(&a, base, l + 1, 1)
    } else {
        Stable::Nowhere
    };
    bld.finish(Variant::TwoChains, l, graded, d, stable)
}

/// `2CC_*(A, M) = A_Delta (x) M`.
pub fn build_2cc_chains(a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<HochschildComplex> {
    check_coefficients(a, m)?;
    bimodule_tensor(&Bimodule::diagonal(a.clone()), m, l)
}

/// The pre-morphism complex `hom(src, tgt)` with differential `mu_1`, on
/// components of total arity `< L`.
pub fn premorphism_complex(src: &Bimodule, tgt: &Bimodule, l: usize) -> Result<HochschildComplex> {
    if l < 1 {
        return Err(HochschildError::BadTruncation(l));
    }
    if *src.left != *tgt.left || *src.right != *tgt.right {
        return Err(HochschildError::Mismatch(format!("{} and {} live over different categories", src.name, tgt.name)));
    }
    let graded = src.is_graded();
    let (na, nb) = (src.left.degree.unwrap_or(0), src.right.degree.unwrap_or(0));
    let mut bld = Builder::new();
    for t in 0..l {
        src.for_each_word_into(t, tgt, |w| {
            let (x, y) = w.output_objects();
            let (zx, zy) = w.input_objects();
            let s = tgt.space(x, y);
            let din = elems_degree(&src.left, &w.lo, &w.lb) + elems_degree(&src.right, &w.ro, &w.rb) + src.space(zx, zy).degrees[w.z as usize];
            for b in 0..s.dim() as u32 {
                let deg = s.degrees[b as usize] - din - w.k() as i64 * (1 - na) - w.m() as i64 * (1 - nb);
                let label = format!(
                    "[{}|{}|{}]->{}",
                    word_label(&src.left, &w.lo, &w.lb),
                    src.space(zx, zy).labels[w.z as usize],
                    word_label(&src.right, &w.ro, &w.rb),
                    s.labels[b as usize]
                );
                bld.push(premorphism_key(w, b), label, deg);
            }
        });
    }
    let dim = bld.keys.len();
    let mut d = F2Matrix::zeros(dim, dim);
    for row in 0..dim {
        let key = &bld.keys[row];
        let w = BiWord::from_key(&key[..key.len() - 1]);
        let bo = key[key.len() - 1];
        let mut hits: Vec<usize> = Vec::new();
        for_each_term(src, tgt, &w, Sums::ALL, |term| match term {
            Term::Direct(w2) => {
                if let Some(&c) = bld.index.get(&premorphism_key(&w2, bo)) {
                    hits.push(c);
                }
            }
            Term::Post(inner, outer) => {
                let (x, y) = inner.output_objects();
                let mut ow = outer.fill(0);
                for b in 0..tgt.dim(x, y) as u32 {
                    ow.z = b;
                    if tgt.mu(&ow).is_some_and(|v| v.get(bo as usize)) {
                        if let Some(&c) = bld.index.get(&premorphism_key(&inner, b)) {
                            hits.push(c);
                        }
                    }
                }
            }
        });
        for c in hits {
            d.flip(row, c);
        }
    }
    let stable = if *src.left == *src.right {
        let base = match (value_range(tgt), value_range(src)) {
            (Some(t), Some(s)) => Some((t.0 - s.1, t.1 - s.0)),
            _ => None,
        };
        window(&src.left, base, l, -1)
    } else {
        Stable::Nowhere
    };
    bld.finish(Variant::TwoCochains, l, graded, d, stable)
}

/// `2CC^*(A, M) = hom(A_Delta, M)`.
pub fn build_2cc_cochains(a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<HochschildComplex> {
    check_coefficients(a, m)?;
    premorphism_complex(&Bimodule::diagonal(a.clone()), m, l)
}

/// Reads a closed element of the pre-morphism complex back as a morphism.
pub fn premorphism_from_vector(h: &HochschildComplex, v: &BitVec, src: Arc<Bimodule>, tgt: Arc<Bimodule>) -> PreMorphism {
    let mut out = PreMorphism::zero(src, tgt.clone(), h.max_len).expect("complex was built from these bimodules");
    for i in v.ones() {
        let key = &h.keys[i];
        let w = BiWord::from_key(&key[..key.len() - 1]);
        let (x, y) = w.output_objects();
        out.add_component(&w, &BitVec::unit(tgt.dim(x, y), key[key.len() - 1] as usize));
    }
    out
}

/// Coordinates of a pre-morphism in the complex (components of arity `< L`).
pub fn premorphism_to_vector(h: &HochschildComplex, nu: &PreMorphism) -> BitVec {
    let mut out = BitVec::zeros(h.dim());
    for (key, v) in nu.components().iter() {
        let w = BiWord::from_key(key);
        if w.arity() >= h.max_len {
            continue;
        }
        for b in v.ones() {
            if let Some(i) = h.index_of(&premorphism_key(&w, b as u32)) {
                out.set(i, true);
            }
        }
    }
    out
}

/// `S: CC^*(A,M) -> 2CC^*(A,M)`, inserting `g` into a segment of the left
/// inputs and feeding everything to its right into the coefficient action.
pub fn map_s(a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<ChainMap> {
    let one = build_cc_cochains(a, m, l)?;
    let two = build_2cc_cochains(a, m, l)?;
    map_s_between(&one, &two, m)
}

pub fn map_s_between(one: &HochschildComplex, two: &HochschildComplex, m: &Bimodule) -> Result<ChainMap> {
    if one.max_len != two.max_len || one.variant != Variant::Cochains || two.variant != Variant::TwoCochains {
        return Err(HochschildError::Mismatch("S needs cochain complexes at the same truncation".into()));
    }
    let mut f = F2Matrix::zeros(two.dim(), one.dim());
    for row in 0..two.dim() {
        let key = &two.keys[row];
        let w = BiWord::from_key(&key[..key.len() - 1]);
        let bo = key[key.len() - 1] as usize;
        let k = w.k();
        for s in 0..=k {
            for t in s..=k {
                if s + (k - t) + 1 + w.m() > m.arity_bound() {
                    continue;
                }
                let mut word = BiWord {
                    lo: w.lo[..=s].to_vec(),
                    ro: cat(&[&w.lo[t..], &w.ro]),
                    lb: w.lb[..s].to_vec(),
                    z: 0,
                    rb: cat(&[&w.lb[t..], &[w.z], &w.rb]),
                };
                for b in 0..m.dim(w.lo[s], w.lo[t]) as u32 {
                    word.z = b;
                    if m.mu(&word).is_some_and(|v| v.get(bo)) {
                        if let Some(c) = one.index_of(&cochain_key(&w.lo[s..=t], &w.lb[s..t], b)) {
                            f.flip(row, c);
                        }
                    }
                }
            }
        }
    }
    Ok(ChainMap::new(one.complex.clone(), two.complex.clone(), 0, f)?)
}

/// `T: 2CC_*(A,M) -> CC_*(A,M)`.
pub fn map_t(a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<ChainMap> {
    let two = build_2cc_chains(a, m, l)?;
    let one = build_cc_chains(a, m, l)?;
    map_t_between(&two, &one, m)
}

pub fn map_t_between(two: &HochschildComplex, one: &HochschildComplex, m: &Bimodule) -> Result<ChainMap> {
    if one.max_len != two.max_len || one.variant != Variant::Chains || two.variant != Variant::TwoChains {
        return Err(HochschildError::Mismatch("T needs chain complexes at the same truncation".into()));
    }
    let mut f = F2Matrix::zeros(one.dim(), two.dim());
    for col in 0..two.dim() {
        let tw = split_tensor_key(&two.keys[col]);
        let (k, mm) = (tw.xe.len(), tw.ye.len());
        for i in 0..=k {
            for c in 0..=i {
                if (k - i) + 1 + mm + c > m.arity_bound() {
                    continue;
                }
                let word = BiWord {
                    lo: cat(&[&tw.xpath[i..], tw.ypath]),
                    ro: tw.xpath[..=c].to_vec(),
                    lb: cat(&[&tw.xe[i..], &[tw.w], tw.ye]),
                    z: tw.z,
                    rb: tw.xe[..c].to_vec(),
                };
                if let Some(v) = m.mu(&word) {
                    for o in v.ones() {
                        f.flip(one.index_of(&chain_key(&tw.xpath[c..=i], &tw.xe[c..i], o as u32)).expect("shorter word present"), col);
                    }
                }
            }
        }
    }
    Ok(ChainMap::new(two.complex.clone(), one.complex.clone(), 0, f)?)
}

/// `Gamma: (2CC_*(A,M) at L)^dual -> 2CC^*(A, M^dual) at L+1`. Both sides
/// have the same basis words, so this is a permutation matrix.
pub fn map_gamma(a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<ChainMap> {
    check_coefficients(a, m)?;
    let chains = build_2cc_chains(a, m, l)?;
    let cochains = build_2cc_cochains(a, &m.dual(), l + 1)?;
    map_gamma_between(&chains, &cochains, a.degree.unwrap_or(0))
}

pub fn map_gamma_between(chains: &HochschildComplex, cochains: &HochschildComplex, n: i64) -> Result<ChainMap> {
    if cochains.max_len != chains.max_len + 1 {
        return Err(HochschildError::Mismatch("Gamma pairs chains at L with cochains at L+1".into()));
    }
    let mut f = F2Matrix::zeros(cochains.dim(), chains.dim());
    for col in 0..chains.dim() {
        let tw = split_tensor_key(&chains.keys[col]);
        let w = BiWord { lo: tw.xpath.to_vec(), ro: tw.ypath.to_vec(), lb: tw.xe.to_vec(), z: tw.w, rb: tw.ye.to_vec() };
        let row = cochains.index_of(&premorphism_key(&w, tw.z)).ok_or_else(|| HochschildError::Mismatch("basis words do not correspond".into()))?;
        f.set(row, col, true);
    }
    let shift = if chains.complex.is_graded() { -2 * n } else { 0 };
    Ok(ChainMap::new(chains.complex.dual(), cochains.complex.clone(), shift, f)?)
}

/// Inclusion of `M(X,X)` as length-zero chains.
pub fn iota(a: &Category, m: &Bimodule, x: u32, l: usize) -> Result<ChainMap> {
    if x as usize >= a.num_objects() {
        return Err(HochschildError::Mismatch(format!("object {x} out of range")));
    }
    let chains = build_cc_chains(a, m, l)?;
    let src = m.value_complex(x, x);
    let mut f = F2Matrix::zeros(chains.dim(), src.dim());
    for w in 0..src.dim() as u32 {
        f.set(chains.index_of(&chain_key(&[x], &[], w)).unwrap(), w as usize, true);
    }
    let shift = if chains.complex.is_graded() { -a.degree.unwrap_or(0) } else { 0 };
    Ok(ChainMap::new(src, chains.complex, shift, f)?)
}

/// `nu_*: CC_*(A,M) -> CC_*(A,M')` for a closed morphism `nu: M -> M'`.
pub fn pushforward_nu(nu: &PreMorphism, l: usize) -> Result<ChainMap> {
    if nu.bound != EXACT || !nu.is_closed() {
        return Err(HochschildError::NotClosed);
    }
    let a = nu.source.left.clone();
    let src = build_cc_chains(&a, &nu.source, l)?;
    let tgt = build_cc_chains(&a, &nu.target, l)?;
    pushforward_nu_between(nu, &src, &tgt)
}

pub fn pushforward_nu_between(nu: &PreMorphism, src: &HochschildComplex, tgt: &HochschildComplex) -> Result<ChainMap> {
    let mut f = F2Matrix::zeros(tgt.dim(), src.dim());
    for col in 0..src.dim() {
        let (p, e, w) = split_chain_key(&src.keys[col]);
        wrap_around(&nu.source, p, e, w, false, |path, elems, o| f.flip(tgt.index_of(&chain_key(path, elems, o)).unwrap(), col), |wd| nu.get(wd).cloned());
    }
    let shift = match nu.degree() {
        Ok(Some(d)) => d,
        Ok(None) => 0,
        Err(msg) => return Err(HochschildError::Mismatch(format!("morphism is not homogeneous: {msg}"))),
    };
    Ok(ChainMap::new(src.complex.clone(), tgt.complex.clone(), shift, f)?)
}

/// `F_*: CC_*(A, F^*N) -> CC_*(B, N)`. `pulled` must be `N` pulled back along
/// `(F, F)`.
pub fn pushforward_f(f: &Functor, n: &Bimodule, l: usize) -> Result<ChainMap> {
    let pulled = n.pullback(Some(f), Some(f)).map_err(|e| HochschildError::Mismatch(e.to_string()))?;
    let src = build_cc_chains(&f.source, &pulled, l)?;
    let tgt = build_cc_chains(&f.target, n, l)?;
    pushforward_f_between(f, &src, &tgt)
}

pub fn pushforward_f_between(f: &Functor, src: &HochschildComplex, tgt: &HochschildComplex) -> Result<ChainMap> {
    let mut mat = F2Matrix::zeros(tgt.dim(), src.dim());
    for col in 0..src.dim() {
        let (p, e, z) = split_chain_key(&src.keys[col]);
        f.for_each_split(p, e, e.len(), |img, outs| {
            for_each_support(outs, |sup| {
                mat.flip(tgt.index_of(&chain_key(img, sup, z)).unwrap(), col);
            });
        });
    }
    let shift = match (f.source.degree, f.target.degree) {
        (Some(na), Some(nb)) => na - nb,
        _ => 0,
    };
    Ok(ChainMap::new(src.complex.clone(), tgt.complex.clone(), shift, mat)?)
}

/// Quasi-isomorphism test restricted to degrees where both truncated
/// complexes agree with the untruncated ones. `None` when no such degree
/// information exists (ungraded complexes).
pub fn stable_quasi_iso(map: &ChainMap, src: Stable, tgt: Stable) -> Option<QuasiIsoReport> {
    if !map.source.is_graded() || matches!(src, Stable::Nowhere) || matches!(tgt, Stable::Nowhere) {
        return None;
    }
    let s = map.shift;
    let rank = move |q: i64| tgt.contains_range(q - 1, q + 1) && src.contains_range(q - s - 1, q - s + 1);
    let cone = move |q: i64| tgt.contains_range(q - 1, q + 1) && src.contains_range(q - s - 2, q - s);
    Some(map.quasi_iso_report_on(&rank, &cone))
}

/// Stable degrees that actually carry basis elements of the map's cone.
pub fn window_degrees(map: &ChainMap, src: Stable, tgt: Stable) -> Vec<i64> {
    let s = map.shift;
    let mut out: Vec<i64> = map.cone().degrees().unwrap_or(&[]).to_vec();
    out.sort();
    out.dedup();
    out.retain(|&q| tgt.contains_range(q - 1, q + 1) && src.contains_range(q - s - 2, q - s));
    out
}

/// Homology dimensions at `L` and `L+1`; reported, never asserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationProbe {
    pub at_l: BTreeMap<Option<i64>, usize>,
    pub at_next: BTreeMap<Option<i64>, usize>,
}

impl StabilizationProbe {
    pub fn stable(&self) -> bool {
        let nz = |m: &BTreeMap<Option<i64>, usize>| m.iter().filter(|(_, &v)| v > 0).map(|(k, v)| (*k, *v)).collect::<Vec<_>>();
        nz(&self.at_l) == nz(&self.at_next)
    }
}

pub fn stabilization_probe(l: usize, build: impl Fn(usize) -> Result<HochschildComplex>) -> Result<StabilizationProbe> {
    Ok(StabilizationProbe { at_l: build(l)?.homology_dims(), at_next: build(l + 1)?.homology_dims() })
}

//! Functors with values in module categories, their pre-natural
//! transformations, the isomorphisms to bimodules (`Phi^l`, `Phi^r`),
//! Yoneda and abstract Serre functors, the composition functors `L`, `R`,
//! `G^l`, `G^r`, and the four diagram checks.
//!
//! A left-valued functor `F: B -> A-mod` stores one left `A`-module per
//! object of `B` and, for each basis word `(path, elems)` of `B` with at
//! least one element, a module pre-morphism `F(path[0]) -> F(path[m])`.
//! A right-valued functor `F: B -> (mod-A)^opp` stores right modules and
//! pre-morphisms `F(path[m]) -> F(path[0])`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::bimodule::{BiWord, Bimodule, BimoduleError, PreMorphism, Shape, EXACT};
use crate::category::{Category, HomSpace, RelationReport};
use crate::functor::{Functor, PreNat};
use crate::gf2::BitVec;
use crate::tensor::{for_each_support, Key, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// values in `A-mod`
    Left,
    /// values in `(mod-A)^opp`
    Right,
}

impl Side {
    fn shape(self) -> Shape {
        match self {
            Side::Left => Shape::Left,
            Side::Right => Shape::Right,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Composition in the value category: `a` from `X` to `Y`, then `b` from `Y` to `Z`.
fn compose_in(side: Side, a: &PreMorphism, b: &PreMorphism) -> PreMorphism {
    match side {
        Side::Left => a.then(b),
        Side::Right => b.then(a),
    }
    .expect("composable module morphisms")
}

fn bound_minus(bound: usize, m: usize) -> usize {
    if bound == EXACT {
        EXACT
    } else {
        bound.saturating_sub(m)
    }
}

#[derive(Clone, Debug)]
pub struct ModFunctor {
    pub name: String,
    pub side: Side,
    pub domain: Arc<Category>,
    pub acting: Arc<Category>,
    modules: Vec<Arc<Bimodule>>,
    comps: BTreeMap<Key, PreMorphism>,
    phi: OnceLock<Arc<Bimodule>>,
}

impl PartialEq for ModFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.side == other.side
            && self.domain == other.domain
            && self.acting == other.acting
            && self.modules.len() == other.modules.len()
            && self.modules.iter().zip(&other.modules).all(|(a, b)| **a == **b)
            && self.comps == other.comps
    }
}

impl ModFunctor {
    pub fn new(name: &str, side: Side, domain: Arc<Category>, acting: Arc<Category>, modules: Vec<Arc<Bimodule>>) -> Result<Self, BimoduleError> {
        if modules.len() != domain.num_objects() {
            return Err(BimoduleError::Mismatch(format!("{} modules for {} objects", modules.len(), domain.num_objects())));
        }
        for m in &modules {
            if m.shape != side.shape() || **m.acting() != *acting {
                return Err(BimoduleError::Mismatch(format!("{} is not a {:?} module over {}", m.name, side, acting.name)));
            }
        }
        Ok(Self { name: name.to_string(), side, domain, acting, modules, comps: BTreeMap::new(), phi: OnceLock::new() })
    }

    pub fn module(&self, x: u32) -> &Arc<Bimodule> {
        &self.modules[x as usize]
    }

    pub fn modules(&self) -> &[Arc<Bimodule>] {
        &self.modules
    }

    pub fn components(&self) -> &BTreeMap<Key, PreMorphism> {
        &self.comps
    }

    /// Largest word length with a component.
    pub fn arity_bound(&self) -> usize {
        self.comps.keys().map(|k| (k.len() - 1) / 2).max().unwrap_or(0)
    }

    /// Source and target of a morphism from `F(a)` to `F(b)` in the value category.
    fn ends(&self, a: u32, b: u32) -> (Arc<Bimodule>, Arc<Bimodule>) {
        match self.side {
            Side::Left => (self.modules[a as usize].clone(), self.modules[b as usize].clone()),
            Side::Right => (self.modules[b as usize].clone(), self.modules[a as usize].clone()),
        }
    }

    pub fn set(&mut self, path: &[u32], elems: &[u32], nu: PreMorphism) -> Result<(), BimoduleError> {
        let (s, t) = self.ends(path[0], path[path.len() - 1]);
        if *nu.source != *s || *nu.target != *t || elems.is_empty() || path.len() != elems.len() + 1 {
            return Err(BimoduleError::BadEntry(format!("component on {path:?} has the wrong shape")));
        }
        self.domain.check_word(path, elems).map_err(|e| BimoduleError::BadEntry(e.to_string()))?;
        let key: Key = [path, elems].concat();
        if nu.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, nu.reattach(s, t));
        }
        self.phi = OnceLock::new();
        Ok(())
    }

    pub fn get(&self, path: &[u32], elems: &[u32]) -> Option<&PreMorphism> {
        self.comps.get(&[path, elems].concat())
    }

    /// Component extended multilinearly to vector inputs.
    pub fn apply(&self, path: &[u32], inputs: &[&BitVec]) -> PreMorphism {
        let (s, t) = self.ends(path[0], path[path.len() - 1]);
        let mut out = PreMorphism::zero(s, t, EXACT).unwrap();
        for_each_support(inputs, |ws| {
            if let Some(c) = self.get(path, ws) {
                for (k, v) in c.components().iter() {
                    out.add_component(&BiWord::from_key(k), v);
                }
            }
        });
        out
    }

    /// The bimodule `Phi(F)`: `A-B` for left-valued, `B-A` for right-valued functors.
    pub fn phi(&self) -> Arc<Bimodule> {
        self.phi.get_or_init(|| Arc::new(self.build_phi())).clone()
    }

    fn build_phi(&self) -> Bimodule {
        let nb = self.domain.num_objects() as u32;
        let na = self.acting.num_objects() as u32;
        let bound = self.modules.iter().map(|m| m.arity_bound()).max().unwrap_or(0).max(self.comps.iter().map(|(k, c)| (k.len() - 1) / 2 + c.max_arity().unwrap_or(0)).max().unwrap_or(0));
        let name = format!("Phi({})", self.name);
        let mut out = match self.side {
            Side::Left => {
                let spaces = (0..na).map(|x| (0..nb).map(|y| self.modules[y as usize].value(x).clone()).collect()).collect();
                Bimodule::new(&name, self.acting.clone(), self.domain.clone(), Shape::Bi, spaces, bound)
            }
            Side::Right => {
                let spaces = (0..nb).map(|x| (0..na).map(|y| self.modules[x as usize].value(y).clone()).collect()).collect();
                Bimodule::new(&name, self.domain.clone(), self.acting.clone(), Shape::Bi, spaces, bound)
            }
        };
        for (x, m) in self.modules.iter().enumerate() {
            for (key, v) in m.mu_tensor().iter() {
                let mut w = BiWord::from_key(key);
                match self.side {
                    Side::Left => w.ro = vec![x as u32],
                    Side::Right => w.lo = vec![x as u32],
                }
                out.insert_raw(w.key(), v.clone());
            }
        }
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (path, elems) = key.split_at(m + 1);
            for (ck, v) in c.components().iter() {
                let mut w = BiWord::from_key(ck);
                match self.side {
                    Side::Left => {
                        w.ro = path.to_vec();
                        w.rb = elems.to_vec();
                    }
                    Side::Right => {
                        w.lo = path.to_vec();
                        w.lb = elems.to_vec();
                    }
                }
                out.insert_raw(w.key(), v.clone());
            }
        }
        out
    }

    /// Inverse of `Phi`: reads a bimodule as a module-valued functor on its
    /// right (`Left`) or left (`Right`) category.
    pub fn from_phi(name: &str, side: Side, m: &Bimodule) -> ModFunctor {
        let (domain, acting) = match side {
            Side::Left => (m.right.clone(), m.left.clone()),
            Side::Right => (m.left.clone(), m.right.clone()),
        };
        let nb = domain.num_objects() as u32;
        let na = acting.num_objects() as u32;
        let mut mods: Vec<Bimodule> = (0..nb)
            .map(|y| {
                let values: Vec<HomSpace> = (0..na)
                    .map(|x| match side {
                        Side::Left => m.space(x, y).clone(),
                        Side::Right => m.space(y, x).clone(),
                    })
                    .collect();
                match side {
                    Side::Left => Bimodule::left_module(&format!("{name}({})", domain.objects()[y as usize]), acting.clone(), values, m.arity_bound()),
                    Side::Right => Bimodule::right_module(&format!("{name}({})", domain.objects()[y as usize]), acting.clone(), values, m.arity_bound()),
                }
            })
            .collect();
        let mut grouped: BTreeMap<Key, Tensor> = BTreeMap::new();
        for (key, v) in m.mu_tensor().iter() {
            let mut w = BiWord::from_key(key);
            let (outer, module_side_empty) = match side {
                Side::Left => ([w.ro.clone(), w.rb.clone()].concat(), w.m() == 0),
                Side::Right => ([w.lo.clone(), w.lb.clone()].concat(), w.k() == 0),
            };
            match side {
                Side::Left => {
                    w.ro = vec![0];
                    w.rb = vec![];
                }
                Side::Right => {
                    w.lo = vec![0];
                    w.lb = vec![];
                }
            }
            if module_side_empty {
                mods[outer[0] as usize].insert_raw(w.key(), v.clone());
            } else {
                grouped.entry(outer).or_default().add(&w.key(), v);
            }
        }
        let modules: Vec<Arc<Bimodule>> = mods.into_iter().map(Arc::new).collect();
        let mut f = ModFunctor::new(name, side, domain, acting, modules).unwrap();
        for (key, t) in grouped {
            let k = (key.len() - 1) / 2;
            let (s, tg) = f.ends(key[0], key[k]);
            f.comps.insert(key, PreMorphism::from_parts(s, tg, EXACT, t));
        }
        f
    }

    /// Relation check, both through `Phi` and directly in the value category.
    pub fn validate(&self) -> FunctorCheck {
        let via_phi = self.phi().validate();
        let mut direct = Vec::new();
        for (x, m) in self.modules.iter().enumerate() {
            if !m.validate().passed() {
                direct.push(format!("module at {} fails its relations", self.domain.objects()[x]));
            }
        }
        let kf = self.arity_bound();
        let top = (2 * kf).max(kf + self.domain.arity_bound().saturating_sub(1));
        for m in 1..=top {
            self.domain.for_each_word(m, |p, e| {
                let v = self.relation_value(p, e);
                if !v.is_zero() {
                    direct.push(format!("relation fails on {p:?} {e:?}"));
                }
            });
        }
        FunctorCheck { via_phi, direct }
    }

    fn relation_value(&self, p: &[u32], e: &[u32]) -> PreMorphism {
        let m = e.len();
        let (s, t) = self.ends(p[0], p[m]);
        let mut out = PreMorphism::zero(s, t, EXACT).unwrap();
        if let Some(c) = self.get(p, e) {
            out = out.add(&c.mu1_exact());
        }
        for i in 1..m {
            if let (Some(a), Some(b)) = (self.get(&p[..=i], &e[..i]), self.get(&p[i..], &e[i..])) {
                out = out.add(&compose_in(self.side, a, b));
            }
        }
        for_each_insertion(&self.domain, p, e, |p2, e2| {
            if let Some(c) = self.get(p2, e2) {
                out = out.add(c);
            }
        });
        out
    }

    /// `L_D`: dualize every module and every component (swaps sides).
    pub fn dualize(&self) -> ModFunctor {
        let modules: Vec<Arc<Bimodule>> = self.modules.iter().map(|m| Arc::new(m.dual())).collect();
        let mut out = ModFunctor::new(&format!("D{}", self.name), self.side.flip(), self.domain.clone(), self.acting.clone(), modules).unwrap();
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (s, t) = out.ends(key[0], key[m]);
            // c: source -> target, dual: target^ -> source^
            out.comps.insert(key.clone(), c.dual(t, s));
        }
        out
    }

    /// `R_F`: precomposition with an A-infinity functor into the domain.
    pub fn precompose(&self, f: &Functor) -> Result<ModFunctor, BimoduleError> {
        if *f.target != *self.domain {
            return Err(BimoduleError::Mismatch(format!("{} does not land in {}", f.name, self.domain.name)));
        }
        let modules = (0..f.source.num_objects() as u32).map(|x| self.modules[f.obj(x) as usize].clone()).collect();
        let mut out = ModFunctor::new(&format!("{}.{}", self.name, f.name), self.side, f.source.clone(), self.acting.clone(), modules)?;
        let top = f.arity_bound() * self.arity_bound();
        for m in 1..=top {
            f.source.for_each_word(m, |p, e| {
                let (s, t) = out.ends(p[0], p[m]);
                let mut acc = PreMorphism::zero(s.clone(), t.clone(), EXACT).unwrap();
                f.for_each_split(p, e, usize::MAX, |img, outs| {
                    acc = acc.add(&self.apply(img, outs).reattach(s.clone(), t.clone()));
                });
                if !acc.is_zero() {
                    out.comps.insert([p, e].concat(), acc);
                }
            });
        }
        Ok(out)
    }

    /// `L_{F^*}`: pull every module and component back along `f`.
    pub fn pullback_values(&self, f: &Functor) -> Result<ModFunctor, BimoduleError> {
        let (f0, f1) = match self.side {
            Side::Left => (Some(f), None),
            Side::Right => (None, Some(f)),
        };
        let modules: Vec<Arc<Bimodule>> = self.modules.iter().map(|m| m.pullback(f0, f1).map(Arc::new)).collect::<Result<_, _>>()?;
        let mut out = ModFunctor::new(&format!("{}*{}", f.name, self.name), self.side, self.domain.clone(), f.source.clone(), modules)?;
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (s, t) = out.ends(key[0], key[m]);
            let pulled = c.pullback(f0, f1, s, t, EXACT);
            if !pulled.is_zero() {
                out.comps.insert(key.clone(), pulled);
            }
        }
        Ok(out)
    }

    /// `G^l_{F0,F1}` (left-valued) or `G^r_{F0,F1}` (right-valued). The
    /// domain is precomposed with one functor and the values pulled back
    /// along the other: for left-valued functors `domain_f = F1`,
    /// `values_f = F0`; for right-valued ones `domain_f = F0`, `values_f = F1`.
    pub fn g_transform(&self, domain_f: &Functor, values_f: &Functor) -> Result<ModFunctor, BimoduleError> {
        self.precompose(domain_f)?.pullback_values(values_f)
    }

    /// Left Yoneda functor `A -> A-mod`.
    pub fn yoneda_left(a: &Arc<Category>) -> ModFunctor {
        let n = a.num_objects() as u32;
        let bound = a.arity_bound().saturating_sub(1);
        let mut mods: Vec<Bimodule> = (0..n).map(|x| Bimodule::left_module(&format!("Y({})", a.objects()[x as usize]), a.clone(), (0..n).map(|y| a.hom(y, x).clone()).collect(), bound)).collect();
        let mut grouped: BTreeMap<Key, Tensor> = BTreeMap::new();
        for (key, v) in a.mu_tensor().iter() {
            let kk = (key.len() - 1) / 2;
            let (objs, elems) = key.split_at(kk + 1);
            // module input at position i: left word objs[..=i], functor word objs[i+1..]
            for i in 0..kk {
                let w = BiWord { lo: objs[..=i].to_vec(), ro: vec![0], lb: elems[..i].to_vec(), z: elems[i], rb: vec![] };
                if i + 1 == kk {
                    mods[objs[kk] as usize].insert_raw(w.key(), v.clone());
                } else {
                    grouped.entry([&objs[i + 1..], &elems[i + 1..]].concat()).or_default().add(&w.key(), v);
                }
            }
        }
        let modules = mods.into_iter().map(Arc::new).collect();
        let mut f = ModFunctor::new(&format!("Yl_{}", a.name), Side::Left, a.clone(), a.clone(), modules).unwrap();
        f.insert_grouped(grouped);
        f
    }

    /// Right Yoneda functor `A -> (mod-A)^opp`.
    pub fn yoneda_right(a: &Arc<Category>) -> ModFunctor {
        let n = a.num_objects() as u32;
        let bound = a.arity_bound().saturating_sub(1);
        let mut mods: Vec<Bimodule> = (0..n).map(|x| Bimodule::right_module(&format!("Y({})", a.objects()[x as usize]), a.clone(), (0..n).map(|y| a.hom(x, y).clone()).collect(), bound)).collect();
        let mut grouped: BTreeMap<Key, Tensor> = BTreeMap::new();
        for (key, v) in a.mu_tensor().iter() {
            let kk = (key.len() - 1) / 2;
            let (objs, elems) = key.split_at(kk + 1);
            for i in 0..kk {
                let w = BiWord { lo: vec![0], ro: objs[i + 1..].to_vec(), lb: vec![], z: elems[i], rb: elems[i + 1..].to_vec() };
                if i == 0 {
                    mods[objs[0] as usize].insert_raw(w.key(), v.clone());
                } else {
                    grouped.entry([&objs[..=i], &elems[..i]].concat()).or_default().add(&w.key(), v);
                }
            }
        }
        let modules = mods.into_iter().map(Arc::new).collect();
        let mut f = ModFunctor::new(&format!("Yr_{}", a.name), Side::Right, a.clone(), a.clone(), modules).unwrap();
        f.insert_grouped(grouped);
        f
    }

    /// Left abstract Serre functor from its defining pairing formulas.
    pub fn serre_left(a: &Arc<Category>) -> ModFunctor {
        let n = a.num_objects() as u32;
        let bound = a.arity_bound().saturating_sub(1);
        let dual_space = |s: &HomSpace| HomSpace { labels: s.labels.iter().map(|l| format!("{l}^")).collect(), degrees: s.degrees.iter().map(|d| -d).collect() };
        let mut mods: Vec<Bimodule> = (0..n).map(|x| Bimodule::left_module(&format!("Y({})^", a.objects()[x as usize]), a.clone(), (0..n).map(|y| dual_space(a.hom(x, y))).collect(), bound)).collect();
        let mut grouped: BTreeMap<Key, Tensor> = BTreeMap::new();
        for (key, v) in a.mu_tensor().iter() {
            let kk = (key.len() - 1) / 2;
            let (objs, elems) = key.split_at(kk + 1);
            // the paired argument sits at position i; functor word before it, module word after
            for i in 0..kk {
                let out_dim = a.dim(objs[i], objs[i + 1]);
                for f in v.ones() {
                    let w = BiWord { lo: objs[i + 1..].to_vec(), ro: vec![0], lb: elems[i + 1..].to_vec(), z: f as u32, rb: vec![] };
                    let bit = BitVec::unit(out_dim, elems[i] as usize);
                    if i == 0 {
                        let m = &mut mods[objs[0] as usize];
                        let cur = m.mu(&w).cloned().unwrap_or_else(|| BitVec::zeros(out_dim));
                        let mut nv = cur;
                        nv.xor_assign(&bit);
                        m.insert_raw(w.key(), nv);
                    } else {
                        grouped.entry([&objs[..=i], &elems[..i]].concat()).or_default().add(&w.key(), &bit);
                    }
                }
            }
        }
        let modules = mods.into_iter().map(Arc::new).collect();
        let mut f = ModFunctor::new(&format!("Sl_{}", a.name), Side::Left, a.clone(), a.clone(), modules).unwrap();
        f.insert_grouped(grouped);
        f
    }

    /// Left abstract Serre functor as `D^opp . Y^r`.
    pub fn serre_left_composite(a: &Arc<Category>) -> ModFunctor {
        ModFunctor::yoneda_right(a).dualize()
    }

    /// Right abstract Serre functor `D . Y^l`.
    pub fn serre_right(a: &Arc<Category>) -> ModFunctor {
        ModFunctor::yoneda_left(a).dualize()
    }

    fn insert_grouped(&mut self, grouped: BTreeMap<Key, Tensor>) {
        for (key, t) in grouped {
            if t.is_empty() {
                continue;
            }
            let m = (key.len() - 1) / 2;
            let (s, tg) = self.ends(key[0], key[m]);
            self.comps.insert(key, PreMorphism::from_parts(s, tg, EXACT, t));
        }
    }

    /// Same data with every component's arity cut to `< l` (`l` counts the
    /// functor word too); used to compare functors up to a truncation.
    pub fn truncated(&self, l: usize) -> ModFunctor {
        let mut out = self.clone();
        out.phi = OnceLock::new();
        out.comps = self
            .comps
            .iter()
            .filter(|(k, _)| (k.len() - 1) / 2 < l)
            .map(|(k, c)| (k.clone(), c.truncated(l - (k.len() - 1) / 2)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }
}

/// Report of a module-valued functor check.
#[derive(Clone, Debug)]
pub struct FunctorCheck {
    pub via_phi: RelationReport,
    pub direct: Vec<String>,
}

impl FunctorCheck {
    pub fn passed(&self) -> bool {
        self.via_phi.passed() && self.direct.is_empty()
    }

    /// Both routes must agree.
    pub fn consistent(&self) -> bool {
        self.via_phi.failures.is_empty() == self.direct.is_empty()
    }
}

/// Calls `f(path', elems')` for every word obtained by replacing a segment
/// with one basis element of its `mu` output.
fn for_each_insertion(a: &Category, p: &[u32], e: &[u32], mut f: impl FnMut(&[u32], &[u32])) {
    let m = e.len();
    for q in 1..=m.min(a.arity_bound()) {
        for j in 0..=m - q {
            let Some(inner) = a.mu(&p[j..=j + q], &e[j..j + q]) else { continue };
            let mut p2: Vec<u32> = p[..=j].to_vec();
            p2.extend_from_slice(&p[j + q..]);
            let mut e2: Vec<u32> = e[..j].to_vec();
            e2.push(0);
            e2.extend_from_slice(&e[j + q..]);
            for bit in inner.ones() {
                e2[j] = bit as u32;
                f(&p2, &e2);
            }
        }
    }
}

/// Pre-natural transformation between module-valued functors. The
/// component on a word of length `m` is a module pre-morphism meaningful
/// below module arity `bound - m`.
#[derive(Clone, Debug)]
pub struct ModPreNat {
    pub f0: Arc<ModFunctor>,
    pub f1: Arc<ModFunctor>,
    pub bound: usize,
    comps: BTreeMap<Key, PreMorphism>,
}

impl PartialEq for ModPreNat {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

impl ModPreNat {
    pub fn zero(f0: Arc<ModFunctor>, f1: Arc<ModFunctor>, bound: usize) -> Result<Self, BimoduleError> {
        if f0.side != f1.side || f0.domain != f1.domain || f0.acting != f1.acting {
            return Err(BimoduleError::Mismatch(format!("{} and {} are not parallel", f0.name, f1.name)));
        }
        Ok(Self { f0, f1, bound, comps: BTreeMap::new() })
    }

    pub fn side(&self) -> Side {
        self.f0.side
    }

    pub fn domain(&self) -> &Arc<Category> {
        &self.f0.domain
    }

    fn ends(&self, a: u32, b: u32) -> (Arc<Bimodule>, Arc<Bimodule>) {
        match self.side() {
            Side::Left => (self.f0.module(a).clone(), self.f1.module(b).clone()),
            Side::Right => (self.f1.module(b).clone(), self.f0.module(a).clone()),
        }
    }

    pub fn components(&self) -> &BTreeMap<Key, PreMorphism> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, path: &[u32], elems: &[u32]) -> Option<&PreMorphism> {
        self.comps.get(&[path, elems].concat())
    }

    pub fn set(&mut self, path: &[u32], elems: &[u32], nu: PreMorphism) {
        let m = elems.len();
        let (s, t) = self.ends(path[0], path[m]);
        assert!(*nu.source == *s && *nu.target == *t, "component endpoints");
        let c = nu.reattach(s, t).truncated(bound_minus(self.bound, m));
        let key = [path, elems].concat();
        if c.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, c);
        }
    }

    fn insert(&mut self, key: Key, c: PreMorphism) {
        let m = (key.len() - 1) / 2;
        let c = c.truncated(bound_minus(self.bound, m));
        if !c.is_zero() {
            self.comps.insert(key, c);
        }
    }

    /// Identity transformation: units of every module in length zero.
    pub fn unit(f: Arc<ModFunctor>) -> ModPreNat {
        let mut t = ModPreNat::zero(f.clone(), f.clone(), EXACT).unwrap();
        for x in 0..f.domain.num_objects() as u32 {
            t.set(&[x], &[], PreMorphism::unit(f.module(x).clone()));
        }
        t
    }

    /// Random components on all words with `m + k < bound`.
    pub fn random(f0: Arc<ModFunctor>, f1: Arc<ModFunctor>, bound: usize, rng: &mut impl rand::Rng) -> ModPreNat {
        let mut t = ModPreNat::zero(f0, f1, bound).unwrap();
        let b = t.domain().clone();
        for m in 0..bound {
            b.for_each_word(m, |p, e| {
                let (s, tg) = t.ends(p[0], p[m]);
                let c = PreMorphism::random(s, tg, bound - m, rng);
                t.insert([p, e].concat(), c);
            });
        }
        t
    }

    fn top(&self, l: usize) -> usize {
        if l == EXACT {
            // exact transformations: components can only reach this far
            let reach = self.comps.iter().map(|(k, c)| (k.len() - 1) / 2 + c.max_arity().unwrap_or(0)).max().unwrap_or(0);
            reach + self.f0.phi().arity_bound().max(self.f1.phi().arity_bound()) + self.domain().arity_bound() + self.f0.acting.arity_bound() + 1
        } else {
            l
        }
    }

    /// Differential in the functor category by the closed formula, on
    /// total arity `< l`.
    pub fn mu1(&self, l: usize) -> ModPreNat {
        let l = l.min(self.bound);
        let top = self.top(l);
        let mut out = ModPreNat::zero(self.f0.clone(), self.f1.clone(), l).unwrap();
        let side = self.side();
        let b = self.domain().clone();
        for m in 0..top {
            b.for_each_word(m, |p, e| {
                let (s, t) = self.ends(p[0], p[m]);
                let cap = if l == EXACT { top - m } else { l - m };
                let mut acc = PreMorphism::zero(s.clone(), t.clone(), cap).unwrap();
                if let Some(c) = self.get(p, e) {
                    acc = acc.add(&c.mu1(cap));
                }
                for i in 1..=m {
                    if let (Some(a), Some(c)) = (self.f0.get(&p[..=i], &e[..i]), self.get(&p[i..], &e[i..])) {
                        acc = acc.add(&compose_in(side, a, c).truncated(cap));
                    }
                }
                for i in 0..m {
                    if let (Some(c), Some(a)) = (self.get(&p[..=i], &e[..i]), self.f1.get(&p[i..], &e[i..])) {
                        acc = acc.add(&compose_in(side, c, a).truncated(cap));
                    }
                }
                for_each_insertion(&b, p, e, |p2, e2| {
                    if let Some(c) = self.get(p2, e2) {
                        acc = acc.add(&c.truncated(cap));
                    }
                });
                out.insert([p, e].concat(), acc);
            });
        }
        out
    }

    /// `Phi_1` of the transformation: a bimodule pre-morphism
    /// `Phi(F0) -> Phi(F1)` (left) or `Phi(F1) -> Phi(F0)` (right).
    pub fn phi(&self) -> PreMorphism {
        let (p0, p1) = (self.f0.phi(), self.f1.phi());
        let (s, t) = match self.side() {
            Side::Left => (p0, p1),
            Side::Right => (p1, p0),
        };
        let mut tensor = Tensor::new();
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (path, elems) = key.split_at(m + 1);
            for (ck, v) in c.components().iter() {
                let mut w = BiWord::from_key(ck);
                match self.side() {
                    Side::Left => {
                        w.ro = path.to_vec();
                        w.rb = elems.to_vec();
                    }
                    Side::Right => {
                        w.lo = path.to_vec();
                        w.lb = elems.to_vec();
                    }
                }
                tensor.add(&w.key(), v);
            }
        }
        PreMorphism::from_parts(s, t, self.bound, tensor)
    }

    /// Inverse of `Phi_1`.
    pub fn from_phi(f0: Arc<ModFunctor>, f1: Arc<ModFunctor>, nu: &PreMorphism) -> Result<ModPreNat, BimoduleError> {
        let mut out = ModPreNat::zero(f0, f1, nu.bound)?;
        let (ws, wt) = match out.side() {
            Side::Left => (out.f0.phi(), out.f1.phi()),
            Side::Right => (out.f1.phi(), out.f0.phi()),
        };
        if *nu.source != *ws || *nu.target != *wt {
            return Err(BimoduleError::Mismatch("morphism endpoints are not the images of the functors".into()));
        }
        let mut grouped: BTreeMap<Key, Tensor> = BTreeMap::new();
        for (key, v) in nu.components().iter() {
            let mut w = BiWord::from_key(key);
            let outer = match out.side() {
                Side::Left => {
                    let o = [w.ro.clone(), w.rb.clone()].concat();
                    w.ro = vec![0];
                    w.rb = vec![];
                    o
                }
                Side::Right => {
                    let o = [w.lo.clone(), w.lb.clone()].concat();
                    w.lo = vec![0];
                    w.lb = vec![];
                    o
                }
            };
            grouped.entry(outer).or_default().add(&w.key(), v);
        }
        for (key, t) in grouped {
            let m = (key.len() - 1) / 2;
            let (s, tg) = out.ends(key[0], key[m]);
            out.insert(key, PreMorphism::from_parts(s, tg, bound_minus(nu.bound, m), t));
        }
        Ok(out)
    }

    /// Differential by transport through `Phi`.
    pub fn mu1_transport(&self, l: usize) -> ModPreNat {
        let nu = self.phi().mu1(l.min(self.bound));
        ModPreNat::from_phi(self.f0.clone(), self.f1.clone(), &nu).expect("transport keeps endpoints")
    }

    /// Composition `self` then `next` in the functor category.
    pub fn then(&self, next: &ModPreNat) -> Result<ModPreNat, BimoduleError> {
        if *self.f1 != *next.f0 {
            return Err(BimoduleError::Mismatch("transformations do not compose".into()));
        }
        let l = self.bound.min(next.bound);
        let mut out = ModPreNat::zero(self.f0.clone(), next.f1.clone(), l)?;
        let b = self.domain().clone();
        let top = if l == EXACT {
            let r = |t: &ModPreNat| t.comps.keys().map(|k| (k.len() - 1) / 2).max().unwrap_or(0);
            r(self) + r(next) + 1
        } else {
            l
        };
        for m in 0..top {
            b.for_each_word(m, |p, e| {
                let (s, t) = out.ends(p[0], p[m]);
                let mut acc = PreMorphism::zero(s, t, bound_minus(l, m)).unwrap();
                for i in 0..=m {
                    if let (Some(a), Some(c)) = (self.get(&p[..=i], &e[..i]), next.get(&p[i..], &e[i..])) {
                        acc = acc.add(&compose_in(self.side(), a, c));
                    }
                }
                out.insert([p, e].concat(), acc);
            });
        }
        Ok(out)
    }

    pub fn add(&self, other: &ModPreNat) -> ModPreNat {
        let mut out = ModPreNat { comps: BTreeMap::new(), bound: self.bound.min(other.bound), ..self.clone() };
        let keys: std::collections::BTreeSet<&Key> = self.comps.keys().chain(other.comps.keys()).collect();
        for k in keys {
            let m = (k.len() - 1) / 2;
            let (s, t) = out.ends(k[0], k[m]);
            let mut acc = PreMorphism::zero(s, t, EXACT).unwrap();
            for c in [self.comps.get(k), other.comps.get(k)].into_iter().flatten() {
                acc = acc.add(c);
            }
            out.insert(k.clone(), acc);
        }
        out
    }

    pub fn truncated(&self, l: usize) -> ModPreNat {
        let mut out = ModPreNat { comps: BTreeMap::new(), bound: self.bound.min(l), ..self.clone() };
        for (k, c) in &self.comps {
            if (k.len() - 1) / 2 < out.bound {
                out.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// `L_D` on transformations, between the dualized functors.
    pub fn dualize(&self, d0: Arc<ModFunctor>, d1: Arc<ModFunctor>) -> ModPreNat {
        let mut out = ModPreNat::zero(d0, d1, self.bound).unwrap();
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (s, t) = out.ends(key[0], key[m]);
            out.insert(key.clone(), c.dual(t, s));
        }
        out
    }

    /// `R_F` on transformations, between the precomposed functors.
    pub fn precompose(&self, f: &Functor, g0: Arc<ModFunctor>, g1: Arc<ModFunctor>) -> ModPreNat {
        let mut out = ModPreNat::zero(g0, g1, self.bound).unwrap();
        let top = if self.bound == EXACT {
            f.arity_bound() * self.comps.keys().map(|k| (k.len() - 1) / 2).max().unwrap_or(0) + 1
        } else {
            self.bound
        };
        for m in 0..top {
            f.source.for_each_word(m, |p, e| {
                let (s, t) = out.ends(p[0], p[m]);
                let mut acc = PreMorphism::zero(s.clone(), t.clone(), EXACT).unwrap();
                if m == 0 {
                    if let Some(c) = self.get(&[f.obj(p[0])], &[]) {
                        acc = c.reattach(s.clone(), t.clone());
                    }
                } else {
                    f.for_each_split(p, e, usize::MAX, |img, outs| {
                        for_each_support(outs, |ws| {
                            if let Some(c) = self.get(img, ws) {
                                acc = acc.add(&c.reattach(s.clone(), t.clone()));
                            }
                        });
                    });
                }
                out.insert([p, e].concat(), acc);
            });
        }
        out
    }

    /// `L_{F^*}` on transformations, between the pulled-back functors.
    pub fn pullback_values(&self, f: &Functor, g0: Arc<ModFunctor>, g1: Arc<ModFunctor>) -> ModPreNat {
        let (fa, fb) = match self.side() {
            Side::Left => (Some(f), None),
            Side::Right => (None, Some(f)),
        };
        let mut out = ModPreNat::zero(g0, g1, self.bound).unwrap();
        for (key, c) in &self.comps {
            let m = (key.len() - 1) / 2;
            let (s, t) = out.ends(key[0], key[m]);
            out.insert(key.clone(), c.pullback(fa, fb, s, t, EXACT));
        }
        out
    }

    /// `G` on transformations; see [`ModFunctor::g_transform`].
    pub fn g_transform(&self, domain_f: &Functor, values_f: &Functor) -> Result<ModPreNat, BimoduleError> {
        let p0 = Arc::new(self.f0.precompose(domain_f)?);
        let p1 = Arc::new(self.f1.precompose(domain_f)?);
        let r = self.precompose(domain_f, p0.clone(), p1.clone());
        let q0 = Arc::new(p0.pullback_values(values_f)?);
        let q1 = Arc::new(p1.pullback_values(values_f)?);
        Ok(r.pullback_values(values_f, q0, q1))
    }

    /// Closedness in the quotient below `l`.
    pub fn is_natural(&self, l: usize) -> bool {
        self.mu1(l).is_zero()
    }

    /// Quasi-isomorphism criterion: every length-zero component is a
    /// quasi-isomorphism of modules, tested on each value complex.
    pub fn is_quasi_iso(&self) -> bool {
        let na = self.f0.acting.num_objects() as u32;
        (0..self.domain().num_objects() as u32).all(|x| {
            let (s, t) = self.ends(x, x);
            let c = self.get(&[x], &[]).cloned().unwrap_or_else(|| PreMorphism::zero(s, t, EXACT).unwrap());
            (0..na).all(|y| {
                let (i, j) = match self.side() {
                    Side::Left => (y, 0),
                    Side::Right => (0, y),
                };
                c.linear_chain_map(i, j).is_quasi_iso()
            })
        })
    }
}

/// Quasi-isomorphism test for a transformation between category-valued
/// functors: each `T_0` must be invertible in the homological category.
pub fn prenat_is_quasi_iso(t: &PreNat) -> Option<bool> {
    let b = t.target();
    let h = b.homological_category();
    let units = h.units()?;
    let hc = &h.category;
    for x in 0..t.source().num_objects() as u32 {
        let (u, v) = (t.f0.obj(x), t.f1.obj(x));
        let tx = t.get(&[x], &[]).cloned().unwrap_or_else(|| BitVec::zeros(b.dim(u, v)));
        if !b.mu_vecs(&[u, v], &[&tx]).is_zero() {
            return Some(false);
        }
        let class = h.homology(u, v).coordinates(&tx);
        // search a two-sided inverse class
        let d = hc.dim(v, u);
        if d > 20 {
            return None;
        }
        let found = (0u64..1 << d).any(|mask| {
            let s = BitVec::from_indices(d, (0..d).filter(|&i| mask >> i & 1 == 1));
            hc.mu_vecs(&[u, v, u], &[&class, &s]) == units[u as usize] && hc.mu_vecs(&[v, u, v], &[&s, &class]) == units[v as usize]
        });
        if !found {
            return Some(false);
        }
    }
    Some(true)
}

/// The four commuting-diagram checks, each with exact equality.
pub mod diagrams {
    use super::*;

    /// `Phi^l . L_{D^opp} = D^opp . Phi^r` on a right-valued functor pair
    /// and a transformation between them.
    pub fn dualization_phi(t: &ModPreNat) -> bool {
        assert_eq!(t.side(), Side::Right);
        let d0 = Arc::new(t.f0.dualize());
        let d1 = Arc::new(t.f1.dualize());
        let objects = *d0.phi() == t.f0.phi().dual() && *d1.phi() == t.f1.phi().dual();
        let lhs = t.dualize(d0.clone(), d1.clone()).phi();
        let phi_r = t.phi();
        // phi_r: Phi(F1) -> Phi(F0); its dual runs Phi(F0)^ -> Phi(F1)^
        let rhs = phi_r.dual(Arc::new(phi_r.source.dual()), Arc::new(phi_r.target.dual()));
        objects && lhs == rhs
    }

    /// `D . (F0 x F1)^* = (F1 x F0)^* . D` on a bimodule morphism.
    pub fn pullback_dualization(nu: &PreMorphism, f0: &Functor, f1: &Functor) -> Result<bool, BimoduleError> {
        let ps = Arc::new(nu.source.pullback(Some(f0), Some(f1))?);
        let pt = Arc::new(nu.target.pullback(Some(f0), Some(f1))?);
        let pulled = nu.pullback(Some(f0), Some(f1), ps.clone(), pt.clone(), nu.bound);
        let ds = Arc::new(ps.dual());
        let dt = Arc::new(pt.dual());
        let lhs_obj = (*ds).clone();
        let lhs = pulled.dual(ds, dt);
        let src_dual = Arc::new(nu.source.dual());
        let tgt_dual = Arc::new(nu.target.dual());
        let rhs_obj = src_dual.pullback(Some(f1), Some(f0))?;
        let dnu = nu.dual(src_dual.clone(), tgt_dual.clone());
        let rs = Arc::new(tgt_dual.pullback(Some(f1), Some(f0))?);
        let rt = Arc::new(rhs_obj.clone());
        let rhs = dnu.pullback(Some(f1), Some(f0), rs, rt, nu.bound);
        Ok(lhs_obj == rhs_obj && lhs == rhs)
    }

    /// `Phi . G_{F0,F1} = (F0 x F1)^* . Phi` on objects and a transformation.
    /// `f0` acts on the left category of `Phi(F)` and `f1` on the right one.
    pub fn g_pullback(t: &ModPreNat, f0: &Functor, f1: &Functor) -> Result<bool, BimoduleError> {
        let (domain_f, values_f) = match t.side() {
            Side::Left => (f1, f0),
            Side::Right => (f0, f1),
        };
        let g0 = t.f0.g_transform(domain_f, values_f)?;
        let g1 = t.f1.g_transform(domain_f, values_f)?;
        let obj = *g0.phi() == t.f0.phi().pullback(Some(f0), Some(f1))? && *g1.phi() == t.f1.phi().pullback(Some(f0), Some(f1))?;
        let lhs = t.g_transform(domain_f, values_f)?.phi();
        let nu = t.phi();
        let rhs = nu.pullback(Some(f0), Some(f1), lhs.source.clone(), lhs.target.clone(), nu.bound);
        Ok(obj && lhs == rhs)
    }

    /// `L_{D^opp} . G^r_{F0,F1} = G^l_{F1,F0} . L_{D^opp}` for a right-valued
    /// transformation over `A'` with values over `B'`; `f0: A -> A'`,
    /// `f1: B -> B'`.
    pub fn g_dualization(t: &ModPreNat, f0: &Functor, f1: &Functor) -> Result<bool, BimoduleError> {
        assert_eq!(t.side(), Side::Right);
        let gr = t.g_transform(f0, f1)?;
        let lhs_f0 = Arc::new(gr.f0.dualize());
        let lhs_f1 = Arc::new(gr.f1.dualize());
        let lhs = gr.dualize(lhs_f0.clone(), lhs_f1.clone());
        let d0 = Arc::new(t.f0.dualize());
        let d1 = Arc::new(t.f1.dualize());
        let dt = t.dualize(d0, d1);
        let rhs = dt.g_transform(f0, f1)?;
        Ok(*lhs_f0 == *rhs.f0 && *lhs_f1 == *rhs.f1 && lhs == rhs)
    }

    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
    pub enum Which {
        DualizationPhi,
        PullbackDualization,
        GPullback,
        GDualization,
    }

    impl Which {
        pub const ALL: [Which; 4] = [Which::DualizationPhi, Which::PullbackDualization, Which::GPullback, Which::GDualization];

        pub fn name(self) -> &'static str {
            match self {
                Which::DualizationPhi => "dualization-phi",
                Which::PullbackDualization => "pullback-dualization",
                Which::GPullback => "g-pullback",
                Which::GDualization => "g-dualization",
            }
        }

        pub fn parse(s: &str) -> Option<Which> {
            Which::ALL.into_iter().find(|w| w.name() == s)
        }
    }

    /// A random endofunctor of `a` with components up to `arity` that passes
    /// validation; falls back to the identity when sampling keeps failing.
    pub fn random_endofunctor(a: &Arc<Category>, arity: usize, rng: &mut impl rand::Rng) -> Functor {
        let n = a.num_objects() as u32;
        for _ in 0..8 {
            let obj_map: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            if let Ok(Some(f)) = Functor::random_valid("F", a.clone(), a.clone(), obj_map, arity, 16, rng) {
                return f;
            }
        }
        Functor::identity(a.clone())
    }

    /// One random instance of diagram `which` over `a`: random functors of
    /// arity at most `arity` and a random transformation or bimodule
    /// pre-morphism of bound `bound`.
    pub fn sample(which: Which, a: &Arc<Category>, arity: usize, bound: usize, rng: &mut impl rand::Rng) -> Result<bool, BimoduleError> {
        let f0 = random_endofunctor(a, arity, rng);
        let f1 = random_endofunctor(a, arity, rng);
        let yr = Arc::new(ModFunctor::yoneda_right(a));
        let yl = Arc::new(ModFunctor::yoneda_left(a));
        match which {
            Which::DualizationPhi => Ok(dualization_phi(&ModPreNat::random(yr.clone(), yr, bound, rng))),
            Which::PullbackDualization => {
                let d = Arc::new(Bimodule::diagonal(a.clone()));
                let target = if rng.gen_bool(0.5) { d.clone() } else { Arc::new(d.dual()) };
                pullback_dualization(&PreMorphism::random(d, target, bound, rng), &f0, &f1)
            }
            Which::GPullback => {
                let f = if rng.gen_bool(0.5) { yl } else { yr };
                g_pullback(&ModPreNat::random(f.clone(), f, bound, rng), &f0, &f1)
            }
            Which::GDualization => g_dualization(&ModPreNat::random(yr.clone(), yr, bound, rng), &f0, &f1),
        }
    }
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

    fn a2() -> Arc<Category> {
        let e = || HomSpace::new(&["e"], &[0]);
        let mut c = Category::new("A2", Some(0), &["X", "Y"], vec![vec![e(), HomSpace::new(&["a"], &[0])], vec![HomSpace::zero(), e()]], 2);
        c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(1, 0)).unwrap();
        c.set_mu(&[1, 1, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
        c.set_mu(&[0, 0, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
        c.set_mu(&[0, 1, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
        Arc::new(c)
    }

    #[test]
    fn yoneda_matches_diagonal() {
        for a in [dual_numbers(), a2()] {
            let d = Bimodule::diagonal(a.clone());
            let yl = ModFunctor::yoneda_left(&a);
            assert_eq!(yl.phi().mu_tensor(), d.mu_tensor());
            assert!(yl.validate().passed());
            let yr = ModFunctor::yoneda_right(&a);
            assert_eq!(yr.phi().mu_tensor(), d.mu_tensor());
            assert!(yr.validate().passed());
        }
    }

    #[test]
    fn serre_two_ways() {
        for a in [dual_numbers(), a2()] {
            let direct = ModFunctor::serre_left(&a);
            let comp = ModFunctor::serre_left_composite(&a);
            assert_eq!(direct, comp);
            assert_eq!(*direct.phi(), Bimodule::diagonal(a.clone()).dual());
            assert!(direct.validate().passed());
        }
    }

    #[test]
    fn phi_round_trip() {
        let a = a2();
        let d = Bimodule::diagonal(a.clone());
        let f = ModFunctor::from_phi("F", Side::Left, &d);
        assert_eq!(f, ModFunctor::yoneda_left(&a));
        let g = ModFunctor::from_phi("G", Side::Right, &d);
        assert_eq!(g, ModFunctor::yoneda_right(&a));
    }

    #[test]
    fn fun_mu1_two_ways_and_square_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for a in [dual_numbers(), a2()] {
            for side in [Side::Left, Side::Right] {
                let f = Arc::new(match side {
                    Side::Left => ModFunctor::yoneda_left(&a),
                    Side::Right => ModFunctor::yoneda_right(&a),
                });
                for _ in 0..5 {
                    let t = ModPreNat::random(f.clone(), f.clone(), 4, &mut rng);
                    let d = t.mu1(4);
                    assert_eq!(d, t.mu1_transport(4));
                    assert!(d.mu1(4).is_zero());
                }
                assert!(ModPreNat::unit(f.clone()).is_natural(EXACT));
            }
        }
    }

    #[test]
    fn fun_mu2_transports() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let a = a2();
        let f = Arc::new(ModFunctor::yoneda_left(&a));
        let t = ModPreNat::random(f.clone(), f.clone(), 3, &mut rng);
        let u = ModPreNat::random(f.clone(), f.clone(), 3, &mut rng);
        let lhs = t.then(&u).unwrap().phi();
        let rhs = t.phi().then(&u.phi()).unwrap().truncated(3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn diagrams_hold_with_identities() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = dual_numbers();
        let id = Functor::identity(a.clone());
        let yr = Arc::new(ModFunctor::yoneda_right(&a));
        let t = ModPreNat::random(yr.clone(), yr.clone(), 3, &mut rng);
        assert!(diagrams::dualization_phi(&t));
        assert!(diagrams::g_pullback(&t, &id, &id).unwrap());
        assert!(diagrams::g_dualization(&t, &id, &id).unwrap());
        let d = Arc::new(Bimodule::diagonal(a.clone()));
        let nu = PreMorphism::random(d.clone(), d.clone(), 3, &mut rng);
        assert!(diagrams::pullback_dualization(&nu, &id, &id).unwrap());
        let yl = Arc::new(ModFunctor::yoneda_left(&a));
        let s = ModPreNat::random(yl.clone(), yl.clone(), 3, &mut rng);
        assert!(diagrams::g_pullback(&s, &id, &id).unwrap());
    }
}

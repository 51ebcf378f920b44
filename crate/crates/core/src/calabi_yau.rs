//! Calabi-Yau structures: weak CY bimodule morphisms, Hochschild forms and
//! their non-degeneracy, and the relative (functor) versions together with
//! the maps that compare them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::bimodule::{Bimodule, BimoduleError, PreMorphism, EXACT};
use crate::category::{Category, CategoryError};
use crate::functor::Functor;
use crate::gf2::{BitVec, ChainComplex, ChainMap, F2Matrix, LinalgError};
use crate::hochschild::{
    build_2cc_chains, build_2cc_cochains, build_cc_chains, chain_key, map_gamma_between, map_t_between, premorphism_complex, premorphism_from_vector, premorphism_to_vector, pushforward_f_between, pushforward_nu_between, split_chain_key,
    HochschildComplex, HochschildError,
};
use crate::modfun::{ModFunctor, ModPreNat, Side};
use crate::tensor::Key;

#[derive(Debug, Error)]
pub enum CyError {
    #[error("form is not closed")]
    NotClosed,
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("inconsistent candidate forms: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, CyError>;

/// A linear functional on Hochschild chains, given by the set of chain basis
/// words (`[k] ++ path ++ elems ++ [w]`) on which it takes the value 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainFunctional {
    pub support: BTreeSet<Key>,
}

impl ChainFunctional {
    pub fn new(support: impl IntoIterator<Item = Key>) -> Self {
        Self { support: support.into_iter().collect() }
    }

    /// Functional supported on length-zero chains `w` in `M(x,x)`.
    pub fn on_values(entries: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Self::new(entries.into_iter().map(|(x, w)| chain_key(&[x], &[], w)))
    }

    pub fn to_vector(&self, h: &HochschildComplex) -> Result<BitVec> {
        let mut v = BitVec::zeros(h.dim());
        for k in &self.support {
            let i = h.index_of(k).ok_or_else(|| CyError::Mismatch(format!("word {k:?} is not a basis chain at this truncation")))?;
            v.set(i, true);
        }
        Ok(v)
    }

    pub fn from_vector(h: &HochschildComplex, v: &BitVec) -> Self {
        Self::new(v.ones().map(|i| h.keys()[i].clone()))
    }

    /// `sigma . d = 0` on the given truncated chain complex.
    pub fn is_closed(&self, h: &HochschildComplex) -> Result<bool> {
        let v = self.to_vector(h)?;
        Ok(h.complex.dual().is_cycle(&v))
    }

    /// Degree of the chains it reads, if homogeneous.
    pub fn degree(&self, h: &HochschildComplex) -> Result<Option<i64>> {
        let Some(degs) = h.complex.degrees() else { return Ok(None) };
        let mut found = None;
        for k in &self.support {
            let d = degs[h.index_of(k).ok_or_else(|| CyError::Mismatch("word outside the complex".into()))?];
            match found {
                None => found = Some(d),
                Some(f) if f != d => return Err(CyError::Mismatch(format!("functional reads degrees {f} and {d}"))),
                _ => {}
            }
        }
        Ok(found)
    }
}

/// `M` viewed over the suspended category `a_shift`, suspended by `s`.
pub fn over_shift(m: &Bimodule, a_shift: &Arc<Category>, s: i64) -> Result<Bimodule> {
    let r = m.rebase(a_shift.clone(), a_shift.clone())?;
    if s == 0 {
        Ok(r)
    } else {
        Ok(r.suspend(s)?)
    }
}

fn is_boundary(c: &ChainComplex, v: &BitVec) -> bool {
    v.is_zero() || c.differential().solve(v).is_some()
}

// ---------------------------------------------------------------------------
// weak CY bimodule morphisms

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WcyVerdict {
    pub closed: bool,
    pub homogeneous: bool,
    pub degree: Option<i64>,
    pub expected_degree: Option<i64>,
    pub quasi_iso: bool,
}

impl WcyVerdict {
    pub fn holds(&self) -> bool {
        self.closed && self.homogeneous && self.quasi_iso && (self.degree.is_none() || self.degree == self.expected_degree)
    }
}

/// Is `phi: A_Delta -> M^dual` (or any bimodule morphism) a weak CY
/// structure: closed, of degree `-N`, and a quasi-isomorphism?
pub fn check_wcy_bimodule(phi: &PreMorphism) -> WcyVerdict {
    let closed = phi.is_closed();
    let expected_degree = phi.source.left.degree.map(|n| -n);
    let (homogeneous, degree) = match phi.degree() {
        Ok(d) => (true, d),
        Err(_) => (false, None),
    };
    // the linear chain map needs a single shift
    let quasi_iso = homogeneous && closed && phi.is_quasi_iso();
    WcyVerdict { closed, homogeneous, degree, expected_degree, quasi_iso }
}

// ---------------------------------------------------------------------------
// Hochschild forms

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegVerdict {
    pub perfect: bool,
    /// `(x, x', degree)` of every pairing block that is not perfect.
    pub failures: Vec<(u32, u32, Option<i64>)>,
}

/// Pairing matrix of `sigma` between homology representatives of `A(x,x')`
/// and of `M(x',x)`, entry `sigma(iota(mu_{1|1|0}(a, w)))`.
pub fn pairing_matrix(sigma: &ChainFunctional, m: &Bimodule, x: u32, x2: u32, reps_a: &[BitVec], reps_m: &[BitVec]) -> F2Matrix {
    let mut out = F2Matrix::zeros(reps_a.len(), reps_m.len());
    for (i, ra) in reps_a.iter().enumerate() {
        for (j, rm) in reps_m.iter().enumerate() {
            let v = m.mu_vecs(&[x, x2], &[x], &[ra], rm, &[]);
            let val = v.ones().filter(|&o| sigma.support.contains(&chain_key(&[x], &[], o as u32))).count() % 2 == 1;
            out.set(i, j, val);
        }
    }
    out
}

/// Non-degeneracy of a closed functional `sigma` on `CC_*(A, M)` at
/// truncation `l`: every induced pairing `H(A(x,x')) (x) H(M(x',x)) -> F2`
/// must be perfect (per degree block `p` against `N - p` when graded).
pub fn check_nondegenerate(sigma: &ChainFunctional, a: &Category, m: &Bimodule, l: usize) -> Result<NondegVerdict> {
    let chains = build_cc_chains(a, m, l)?;
    if !sigma.is_closed(&chains)? {
        return Err(CyError::NotClosed);
    }
    Ok(nondegenerate_unchecked(sigma, a, m))
}

fn nondegenerate_unchecked(sigma: &ChainFunctional, a: &Category, m: &Bimodule) -> NondegVerdict {
    let n = a.num_objects() as u32;
    let mut failures = Vec::new();
    for x in 0..n {
        for x2 in 0..n {
            let ha = a.hom_complex(x, x2).flat_homology();
            let hm = m.value_complex(x2, x).flat_homology();
            let (ra, rm) = (ha.representatives(), hm.representatives());
            let mat = pairing_matrix(sigma, m, x, x2, &ra, &rm);
            match a.degree {
                None => {
                    if mat.rows() != mat.cols() || !(mat.rows() == 0 || mat.is_invertible()) {
                        failures.push((x, x2, None));
                    }
                }
                Some(nn) => {
                    let (da, dm) = (ha.rep_degrees(), hm.rep_degrees());
                    let mut ps: BTreeSet<i64> = da.iter().flatten().copied().collect();
                    ps.extend(dm.iter().flatten().map(|q| nn - q));
                    for p in ps {
                        let rows: Vec<usize> = (0..ra.len()).filter(|&i| da[i] == Some(p)).collect();
                        let cols: Vec<usize> = (0..rm.len()).filter(|&j| dm[j] == Some(nn - p)).collect();
                        let block = mat.submatrix(&rows, &cols);
                        if rows.len() != cols.len() || !(rows.is_empty() || block.is_invertible()) {
                            failures.push((x, x2, Some(p)));
                        }
                    }
                }
            }
        }
    }
    NondegVerdict { perfect: failures.is_empty(), failures }
}

/// `Gamma . T^dual (sigma)`: the bimodule morphism `A_Delta -> M^dual`
/// (components of arity `<= l`) attached to a Hochschild form.
pub fn form_to_bimodule(sigma: &ChainFunctional, a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<PreMorphism> {
    let one = build_cc_chains(a, m, l)?;
    let two = build_2cc_chains(a, m, l)?;
    let t = map_t_between(&two, &one, m)?;
    let md = m.dual();
    let cochains = build_2cc_cochains(a, &md, l + 1)?;
    let g = map_gamma_between(&two, &cochains, a.degree.unwrap_or(0))?;
    let u = t.matrix.transpose().mul_vec(&sigma.to_vector(&one)?);
    let x = g.matrix.mul_vec(&u);
    Ok(premorphism_from_vector(&cochains, &x, Arc::new(Bimodule::diagonal(a.clone())), Arc::new(md)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub nondegenerate: bool,
    pub bimodule: WcyVerdict,
}

impl LemmaReport {
    /// A closed form is non-degenerate iff its bimodule morphism is a
    /// quasi-isomorphism.
    pub fn agree(&self) -> bool {
        self.nondegenerate == self.bimodule.quasi_iso
    }
}

pub fn check_lemma_nondeg_equivalence(sigma: &ChainFunctional, a: &Arc<Category>, m: &Bimodule, l: usize) -> Result<LemmaReport> {
    let nd = check_nondegenerate(sigma, a, m, l)?;
    let phi = form_to_bimodule(sigma, a, m, l)?;
    Ok(LemmaReport { nondegenerate: nd.perfect, bimodule: check_wcy_bimodule(&phi) })
}

/// The same verdict read through the left Yoneda picture: `phi` as a
/// natural transformation `Y^l -> (Y^dual)^l`.
pub fn yoneda_verdict(phi: &PreMorphism) -> Result<bool> {
    let a = phi.source.left.clone();
    let f0 = Arc::new(ModFunctor::yoneda_left(&a));
    let f1 = Arc::new(ModFunctor::serre_left_composite(&a));
    let src = f0.phi();
    let tgt = f1.phi();
    let nu = phi.reattach(src, tgt);
    let t = ModPreNat::from_phi(f0, f1, &nu)?;
    Ok(t.is_quasi_iso())
}

// ---------------------------------------------------------------------------
// the relative setting

/// Data of a relative CY problem for `I: B -> A[j]`: the relative diagonal
/// `A^rel` over `A` and the closed morphism `i_rel: B_Delta -> I^*(A^rel[-j])`.
#[derive(Clone, Debug)]
pub struct RelativeData {
    pub a: Arc<Category>,
    pub b: Arc<Category>,
    pub j: i64,
    /// `I: B -> A[j]`; its target is the suspended copy of `a`.
    pub functor: Arc<Functor>,
    pub rel: Arc<Bimodule>,
    pub i_rel: PreMorphism,
}

impl RelativeData {
    pub fn new(a: Arc<Category>, functor: Arc<Functor>, j: i64, rel: Arc<Bimodule>, i_rel: PreMorphism) -> Result<Self> {
        let b = functor.source.clone();
        let expect_shift = if j == 0 { (*a).clone() } else { a.suspend(j)? };
        if *functor.target != expect_shift {
            return Err(CyError::Mismatch(format!("functor {} does not land in {}[{j}]", functor.name, a.name)));
        }
        if rel.left != a || rel.right != a {
            return Err(CyError::Mismatch("relative diagonal must be an A-A bimodule".into()));
        }
        let d = RelativeData { a, b, j, functor, rel, i_rel };
        let pulled = d.pulled_rel()?;
        if *d.i_rel.source != Bimodule::diagonal(d.b.clone()) || *d.i_rel.target != pulled {
            return Err(CyError::Mismatch("i_rel must go from the diagonal of B to the pulled-back relative diagonal".into()));
        }
        let i_rel = d.i_rel.reattach(Arc::new(Bimodule::diagonal(d.b.clone())), Arc::new(pulled));
        Ok(RelativeData { i_rel, ..d })
    }

    /// `A[j]`, shared with the functor.
    pub fn a_shift(&self) -> &Arc<Category> {
        &self.functor.target
    }

    /// `I^*(A^rel[-j])`.
    pub fn pulled_rel(&self) -> Result<Bimodule> {
        let f = &*self.functor;
        Ok(over_shift(&self.rel, self.a_shift(), -self.j)?.pullback(Some(f), Some(f))?)
    }

    pub fn check_i_rel(&self) -> bool {
        self.i_rel.is_closed()
    }
}

/// `i: B_Delta -> I^*(A[j]_Delta)`, `i(..., w, ...) = I(..., w, ...)`.
pub fn canonical_i(f: &Arc<Functor>) -> Result<PreMorphism> {
    let src = Arc::new(Bimodule::diagonal(f.source.clone()));
    let tgt = Arc::new(Bimodule::diagonal(f.target.clone()).pullback(Some(f), Some(f))?);
    let mut out = PreMorphism::zero(src.clone(), tgt.clone(), EXACT)?;
    for t in 0..f.arity_bound() {
        src.for_each_word_into(t, &tgt, |w| {
            let path = [&w.lo[..], &w.ro[..]].concat();
            let elems = [&w.lb[..], &[w.z], &w.rb[..]].concat();
            if let Some(v) = f.get(&path, &elems) {
                if !v.is_zero() {
                    out.set(w, v.clone());
                }
            }
        });
    }
    Ok(out)
}

/// `Psi(alpha) = i . I^*(alpha[j]) . i_rel^dual` for `alpha: A_Delta -> A^rel dual`.
pub fn psi(data: &RelativeData, alpha: &PreMorphism) -> Result<PreMorphism> {
    let f = &*data.functor;
    let ash = data.a_shift();
    let rel_dual = data.rel.dual();
    let diag_a = Bimodule::diagonal(data.a.clone());
    if *alpha.source != diag_a || *alpha.target != rel_dual {
        return Err(CyError::Mismatch("Psi takes morphisms from the diagonal of A to the dual relative diagonal".into()));
    }
    let i = canonical_i(&data.functor)?;
    let src = Arc::new(over_shift(&diag_a, ash, data.j)?.pullback(Some(f), Some(f))?);
    let tgt = Arc::new(over_shift(&rel_dual, ash, data.j)?.pullback(Some(f), Some(f))?);
    let shifted = alpha.reattach(Arc::new(over_shift(&diag_a, ash, data.j)?), Arc::new(over_shift(&rel_dual, ash, data.j)?));
    let pulled = shifted.pullback(Some(f), Some(f), src.clone(), tgt.clone(), EXACT);
    if *i.target != *src {
        return Err(CyError::Mismatch("pulled diagonal of A[j] and the shifted diagonal differ".into()));
    }
    let pulled = pulled.reattach(i.target.clone(), tgt);
    let b_diag_dual = Arc::new(Bimodule::diagonal(data.b.clone()).dual());
    let rel_pulled_dual = Arc::new(data.i_rel.target.dual());
    if *pulled.target != *rel_pulled_dual {
        return Err(CyError::Mismatch("pullback of the dual relative diagonal is not the dual of its pullback".into()));
    }
    let pulled = pulled.reattach(pulled.source.clone(), rel_pulled_dual.clone());
    let back = data.i_rel.dual(b_diag_dual, rel_pulled_dual);
    Ok(i.then(&pulled)?.then(&back)?)
}

/// `Psi` on the truncated complexes `2CC^*(A, A^rel dual) -> 2CC^*(B, B^dual)`.
pub fn psi_chain_map(data: &RelativeData, l: usize) -> Result<ChainMap> {
    let diag_a = Arc::new(Bimodule::diagonal(data.a.clone()));
    let rel_dual = Arc::new(data.rel.dual());
    let diag_b = Bimodule::diagonal(data.b.clone());
    let src = premorphism_complex(&diag_a, &rel_dual, l)?;
    let tgt = premorphism_complex(&diag_b, &diag_b.dual(), l)?;
    let mut mat = F2Matrix::zeros(tgt.dim(), src.dim());
    for c in 0..src.dim() {
        let alpha = premorphism_from_vector(&src, &BitVec::unit(src.dim(), c), diag_a.clone(), rel_dual.clone());
        let image = premorphism_to_vector(&tgt, &psi(data, &alpha)?);
        for r in image.ones() {
            mat.set(r, c, true);
        }
    }
    let shift = if src.complex.is_graded() { data.j } else { 0 };
    Ok(ChainMap::new(src.complex, tgt.complex, shift, mat)?)
}

/// `I^rel_*: CC_*(B, B_Delta) -> CC_*(A, A^rel)`, the composite of
/// `(i_rel)_*`, `I_*` and the identification of chains over `A[j]` with
/// chains over `A`.
pub fn irel_pushforward(data: &RelativeData, l: usize) -> Result<ChainMap> {
    let diag_b = Bimodule::diagonal(data.b.clone());
    let cb = build_cc_chains(&data.b, &diag_b, l)?;
    let cm = build_cc_chains(&data.b, &data.i_rel.target, l)?;
    let nu = pushforward_nu_between(&data.i_rel, &cb, &cm)?;
    let rel_shift = over_shift(&data.rel, data.a_shift(), -data.j)?;
    let caj = build_cc_chains(data.a_shift(), &rel_shift, l)?;
    let fp = pushforward_f_between(&data.functor, &cm, &caj)?;
    let ca = build_cc_chains(&data.a, &data.rel, l)?;
    let mut reindex = F2Matrix::zeros(ca.dim(), caj.dim());
    for c in 0..caj.dim() {
        let r = ca.index_of(&caj.keys()[c]).ok_or_else(|| CyError::Mismatch("chain bases over A and A[j] differ".into()))?;
        reindex.set(r, c, true);
    }
    let m = reindex.mul(&fp.matrix).mul(&nu.matrix);
    let shift = if cb.complex.is_graded() { nu.shift + fp.shift + reindex_shift(&caj, &ca) } else { 0 };
    Ok(ChainMap::new(cb.complex, ca.complex, shift, m)?)
}

fn reindex_shift(from: &HochschildComplex, to: &HochschildComplex) -> i64 {
    match (from.complex.degrees(), to.complex.degrees()) {
        (Some(a), Some(b)) if !a.is_empty() => b[to.index_of(&from.keys()[0]).unwrap()] - a[0],
        _ => 0,
    }
}

/// `(I^rel_*)^dual (sigma)`, the form induced on `B`.
pub fn induced_form(data: &RelativeData, sigma: &ChainFunctional, l: usize) -> Result<ChainFunctional> {
    let map = irel_pushforward(data, l)?;
    let ca = build_cc_chains(&data.a, &data.rel, l)?;
    let cb = build_cc_chains(&data.b, &Bimodule::diagonal(data.b.clone()), l)?;
    let v = map.matrix.transpose().mul_vec(&sigma.to_vector(&ca)?);
    Ok(ChainFunctional::from_vector(&cb, &v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareReport {
    pub classes: usize,
    pub failures: usize,
}

impl SquareReport {
    pub fn commutes(&self) -> bool {
        self.failures == 0
    }
}

/// Does `Psi . Gamma . T^dual` agree with `Gamma . T^dual . (I^rel_*)^dual`
/// on homology? Both go from `CC_*(A, A^rel)^dual` at `l` to
/// `2CC^*(B, B^dual)` at `l + 1`.
pub fn check_psi_irel_square(data: &RelativeData, l: usize) -> Result<SquareReport> {
    let gamma_t = |a: &Arc<Category>, m: &Bimodule| -> Result<(HochschildComplex, F2Matrix)> {
        let one = build_cc_chains(a, m, l)?;
        let two = build_2cc_chains(a, m, l)?;
        let t = map_t_between(&two, &one, m)?;
        let cochains = build_2cc_cochains(a, &m.dual(), l + 1)?;
        let g = map_gamma_between(&two, &cochains, a.degree.unwrap_or(0))?;
        Ok((one, g.matrix.mul(&t.matrix.transpose())))
    };
    let (ca, top_a) = gamma_t(&data.a, &data.rel)?;
    let diag_b = Bimodule::diagonal(data.b.clone());
    let (_, top_b) = gamma_t(&data.b, &diag_b)?;
    let psi = psi_chain_map(data, l + 1)?;
    let irel = irel_pushforward(data, l)?;
    let path1 = psi.matrix.mul(&top_a);
    let path2 = top_b.mul(&irel.matrix.transpose());
    let diff = path1.add(&path2);
    let reps = ca.complex.dual().flat_homology().representatives();
    let failures = reps.iter().filter(|z| !is_boundary(&psi.target, &diff.mul_vec(z))).count();
    Ok(SquareReport { classes: reps.len(), failures })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeVerdict {
    /// Is the input form (on `A`) non-degenerate / a quasi-isomorphism?
    pub is_pairing: bool,
    /// Is the induced form on `B` non-degenerate / a quasi-isomorphism?
    pub induced_on_b: bool,
    pub by_bimodule: Option<(bool, bool)>,
    pub by_hochschild: Option<(bool, bool)>,
}

impl RelativeVerdict {
    pub fn holds(&self) -> bool {
        self.is_pairing && self.induced_on_b
    }
}

/// Relative CY test from a bimodule morphism `phi: A_Delta -> A^rel dual`,
/// a Hochschild form on `CC_*(A, A^rel)`, or both (which must agree).
pub fn check_relative_pairing(data: &RelativeData, phi: Option<&PreMorphism>, sigma: Option<&ChainFunctional>, l: usize) -> Result<RelativeVerdict> {
    let by_bimodule = match phi {
        Some(p) => {
            let on_a = check_wcy_bimodule(p);
            if !on_a.closed {
                return Err(CyError::NotClosed);
            }
            let on_b = check_wcy_bimodule(&psi(data, p)?);
            Some((on_a.holds(), on_b.holds()))
        }
        None => None,
    };
    let by_hochschild = match sigma {
        Some(s) => {
            let on_a = check_nondegenerate(s, &data.a, &data.rel, l)?;
            let induced = induced_form(data, s, l)?;
            let on_b = check_nondegenerate(&induced, &data.b, &Bimodule::diagonal(data.b.clone()), l)?;
            Some((on_a.perfect, on_b.perfect))
        }
        None => None,
    };
    let (is_pairing, induced_on_b) = match (by_bimodule, by_hochschild) {
        (Some(x), Some(y)) if x != y => return Err(CyError::Inconsistent(format!("bimodule test gives {x:?}, Hochschild test gives {y:?}"))),
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => return Err(CyError::Mismatch("need a bimodule morphism or a Hochschild form".into())),
    };
    Ok(RelativeVerdict { is_pairing, induced_on_b, by_bimodule, by_hochschild })
}

/// Is `sigma_b` (a closed form on `B`) cohomologous to the form induced by
/// `sigma_a`?
pub fn check_compatibility(data: &RelativeData, sigma_a: &ChainFunctional, sigma_b: &ChainFunctional, l: usize) -> Result<bool> {
    let cb = build_cc_chains(&data.b, &Bimodule::diagonal(data.b.clone()), l)?;
    if !sigma_b.is_closed(&cb)? {
        return Err(CyError::NotClosed);
    }
    let ca = build_cc_chains(&data.a, &data.rel, l)?;
    if !sigma_a.is_closed(&ca)? {
        return Err(CyError::NotClosed);
    }
    let mut x = induced_form(data, sigma_a, l)?.to_vector(&cb)?;
    x.xor_assign(&sigma_b.to_vector(&cb)?);
    Ok(is_boundary(&cb.complex.dual(), &x))
}

// ---------------------------------------------------------------------------
// the relative picture through module-valued functors

/// `S_I: Y^l_B -> G^l_I(Y^l_{A[j]})`, with components
/// `(S_I)_k(y)(..., w) = I(..., w, y)`.
pub fn s_i(f: &Arc<Functor>) -> Result<ModPreNat> {
    let b = f.source.clone();
    let f0 = Arc::new(ModFunctor::yoneda_left(&b));
    let f1 = Arc::new(ModFunctor::yoneda_left(&f.target).g_transform(f, f)?);
    let mut out = ModPreNat::zero(f0.clone(), f1.clone(), EXACT)?;
    for k in 0..f.arity_bound() {
        b.for_each_word(k, |p, e| {
            let (s, t) = (f0.module(p[0]).clone(), f1.module(p[k]).clone());
            let mut c = PreMorphism::zero(s.clone(), t.clone(), EXACT).unwrap();
            for m in 0..f.arity_bound() - k {
                s.for_each_word_into(m, &t, |w| {
                    let path = [&w.lo[..], p].concat();
                    let elems = [&w.lb[..], &[w.z], e].concat();
                    if let Some(v) = f.get(&path, &elems) {
                        if !v.is_zero() {
                            c.set(w, v.clone());
                        }
                    }
                });
            }
            if !c.is_zero() {
                out.set(p, e, c);
            }
        });
    }
    Ok(out)
}

/// Same transformation, attached to other (equal up to names) functors.
fn retarget(t: &ModPreNat, f0: Arc<ModFunctor>, f1: Arc<ModFunctor>) -> Result<ModPreNat> {
    if *t.f0 == *f0 && *t.f1 == *f1 {
        return Ok(t.clone());
    }
    let (p0, p1) = (f0.phi(), f1.phi());
    let (s, tg) = match f0.side {
        Side::Left => (p0, p1),
        Side::Right => (p1, p0),
    };
    let nu = t.phi();
    if *nu.source != *s || *nu.target != *tg {
        return Err(CyError::Mismatch(format!("{} / {} and {} / {} differ", t.f0.name, t.f1.name, f0.name, f1.name)));
    }
    Ok(ModPreNat::from_phi(f0, f1, &nu.reattach(s, tg))?)
}

/// `S^rel: G^r_I(Y^r_rel[-j]) -> Y^r_B`, built from `i_rel`.
pub fn s_rel(data: &RelativeData) -> Result<ModPreNat> {
    let f = &*data.functor;
    let rel_shift = over_shift(&data.rel, data.a_shift(), -data.j)?;
    let f0 = Arc::new(ModFunctor::from_phi("Yr_rel", Side::Right, &rel_shift).g_transform(f, f)?);
    let f1 = Arc::new(ModFunctor::yoneda_right(&data.b));
    let (ws, wt) = (f1.phi(), f0.phi());
    if *data.i_rel.source != *ws || *data.i_rel.target != *wt {
        return Err(CyError::Mismatch("i_rel endpoints are not the images of the right Yoneda functors".into()));
    }
    Ok(ModPreNat::from_phi(f0, f1, &data.i_rel.reattach(ws, wt))?)
}

/// `delta = Phi^{-1}(phi)` shifted to `A[j]`: `Y^l_{A[j]} -> (Y^dual_rel)^l[j]`.
pub fn delta_shifted(data: &RelativeData, phi: &PreMorphism) -> Result<ModPreNat> {
    let ash = data.a_shift();
    let f0 = Arc::new(ModFunctor::yoneda_left(ash));
    let f1 = Arc::new(ModFunctor::from_phi("Yl_rel^", Side::Left, &over_shift(&data.rel.dual(), ash, data.j)?));
    let (s, t) = (f0.phi(), f1.phi());
    let expect_s = over_shift(&Bimodule::diagonal(data.a.clone()), ash, data.j)?;
    if *s != expect_s || *phi.source != Bimodule::diagonal(data.a.clone()) {
        return Err(CyError::Mismatch("phi must start at the diagonal of A".into()));
    }
    Ok(ModPreNat::from_phi(f0, f1, &phi.reattach(s, t))?)
}

/// `P_rel = S_I . G^l_I(delta[j]) . L_D(S^rel)`: `Y^l_B -> (Y^dual_B)^l`.
pub fn p_rel(data: &RelativeData, delta: &ModPreNat, srel: &ModPreNat) -> Result<ModPreNat> {
    let f = &*data.functor;
    let si = s_i(&data.functor)?;
    let gd = delta.g_transform(f, f)?;
    let gd = retarget(&gd, si.f1.clone(), gd.f1.clone())?;
    let d0 = Arc::new(srel.f0.dualize());
    let d1 = Arc::new(srel.f1.dualize());
    let ld = srel.dualize(d0, d1);
    let ld = retarget(&ld, gd.f1.clone(), ld.f1.clone())?;
    Ok(si.then(&gd)?.then(&ld)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeWay {
    pub hochschild: bool,
    pub bimodule: bool,
    pub yoneda: bool,
}

impl ThreeWay {
    pub fn agree(&self) -> bool {
        self.hochschild == self.bimodule && self.bimodule == self.yoneda
    }
}

/// Absolute non-degeneracy of a closed form on `CC_*(A, A_Delta)` read
/// three ways: the pairing, the bimodule morphism, the Yoneda transformation.
pub fn three_formulations(sigma: &ChainFunctional, a: &Arc<Category>, l: usize) -> Result<ThreeWay> {
    let m = Bimodule::diagonal(a.clone());
    let nd = check_nondegenerate(sigma, a, &m, l)?;
    let phi = form_to_bimodule(sigma, a, &m, l)?;
    let wcy = check_wcy_bimodule(&phi);
    let yon = wcy.homogeneous && yoneda_verdict(&phi)?;
    Ok(ThreeWay { hochschild: nd.perfect, bimodule: wcy.quasi_iso, yoneda: yon })
}

/// Relative analogue: `Psi(phi)` against `P_rel` against the induced form.
pub fn relative_three_formulations(data: &RelativeData, phi: &PreMorphism, sigma: Option<&ChainFunctional>, l: usize) -> Result<(bool, bool, Option<bool>)> {
    let by_psi = check_wcy_bimodule(&psi(data, phi)?).quasi_iso;
    let p = p_rel(data, &delta_shifted(data, phi)?, &s_rel(data)?)?;
    let by_p = p.is_quasi_iso();
    let by_form = match sigma {
        Some(s) => Some(check_nondegenerate(&induced_form(data, s, l)?, &data.b, &Bimodule::diagonal(data.b.clone()), l)?.perfect),
        None => None,
    };
    Ok((by_psi, by_p, by_form))
}

/// Words of a chain functional grouped by length, for reporting.
pub fn support_by_length(sigma: &ChainFunctional) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for k in &sigma.support {
        *out.entry(split_chain_key(k).1.len()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::BiWord;
    use crate::corpus;

    fn cat(name: &str) -> Arc<Category> {
        corpus::build(name).unwrap().category
    }

    #[test]
    fn trace_is_nondegenerate_and_unit_trace_is_not() {
        for name in ["dual_numbers", "exterior_graded"] {
            let a = cat(name);
            let m = Bimodule::diagonal(a.clone());
            for c in corpus::build(name).unwrap().candidates {
                let v = check_nondegenerate(&c.sigma, &a, &m, 3).unwrap();
                assert_eq!(v.perfect, c.expect_nondegenerate, "{name} {}", c.name);
            }
        }
    }

    #[test]
    fn non_closed_functional_is_rejected() {
        let a = cat("dual_numbers");
        let m = Bimodule::diagonal(a.clone());
        let h = build_cc_chains(&a, &m, 2).unwrap();
        let mut found = None;
        for (i, k) in h.keys().iter().enumerate() {
            let s = ChainFunctional::new([k.clone()]);
            if !s.is_closed(&h).unwrap() {
                found = Some((i, s));
                break;
            }
        }
        let (_, s) = found.expect("some basis functional is not closed");
        assert!(matches!(check_nondegenerate(&s, &a, &m, 2), Err(CyError::NotClosed)));
    }

    #[test]
    fn lemma_agrees_on_traces() {
        for name in ["k_field", "dual_numbers", "exterior_graded", "degenerate_trace"] {
            let e = corpus::build(name).unwrap();
            let m = Bimodule::diagonal(e.category.clone());
            for c in &e.candidates {
                for l in 1..=3 {
                    let r = check_lemma_nondeg_equivalence(&c.sigma, &e.category, &m, l).unwrap();
                    assert!(r.bimodule.closed, "{name} {} L={l}", c.name);
                    assert!(r.agree(), "{name} {} L={l}: {r:?}", c.name);
                    assert_eq!(r.nondegenerate, c.expect_nondegenerate);
                }
            }
        }
    }

    #[test]
    fn accepted_pairings_have_degree_minus_n() {
        let e = corpus::build("exterior_graded").unwrap();
        let m = Bimodule::diagonal(e.category.clone());
        let phi = form_to_bimodule(&e.candidates[0].sigma, &e.category, &m, 3).unwrap();
        let v = check_wcy_bimodule(&phi);
        assert!(v.holds(), "{v:?}");
        assert_eq!(v.degree, Some(1));
    }

    #[test]
    fn three_formulations_agree_on_corpus() {
        for e in corpus::all() {
            if !e.expect_valid {
                continue;
            }
            for c in &e.candidates {
                let t = three_formulations(&c.sigma, &e.category, 3).unwrap();
                assert!(t.agree(), "{} {}: {t:?}", e.name, c.name);
                assert_eq!(t.hochschild, c.expect_nondegenerate);
            }
        }
    }

    #[test]
    fn canonical_i_of_identity_is_unit() {
        let a = cat("dual_numbers");
        let id = Arc::new(Functor::identity(a.clone()));
        let i = canonical_i(&id).unwrap();
        assert!(i.is_closed());
        let u = PreMorphism::unit(Arc::new(Bimodule::diagonal(a)));
        assert_eq!(i, u);
    }

    fn interval() -> corpus::RelativeBundle {
        corpus::build("interval_relative_toy").unwrap().relative.unwrap()
    }

    #[test]
    fn interval_toy_pieces() {
        let r = interval();
        assert!(r.data.check_i_rel());
        let i = canonical_i(&r.data.functor).unwrap();
        assert!(i.is_closed());
        let v = check_wcy_bimodule(&r.phi);
        assert!(v.holds(), "{v:?}");
        let p = psi(&r.data, &r.phi).unwrap();
        let w = check_wcy_bimodule(&p);
        assert!(w.holds(), "{w:?}");
        // Psi(phi)(1) = 1^
        let unit_word = BiWord { lo: vec![0], ro: vec![0], lb: vec![], z: 0, rb: vec![] };
        assert_eq!(p.get(&unit_word), Some(&BitVec::unit(1, 0)));
    }

    #[test]
    fn interval_toy_relative_checks() {
        let r = interval();
        for l in 1..=3 {
            let v = check_relative_pairing(&r.data, Some(&r.phi), Some(&r.sigma_a), l).unwrap();
            assert!(v.holds(), "L={l} {v:?}");
            let sq = check_psi_irel_square(&r.data, l).unwrap();
            assert!(sq.commutes(), "L={l} {sq:?}");
            assert!(check_compatibility(&r.data, &r.sigma_a, &r.sigma_b, l).unwrap());
        }
    }

    #[test]
    fn zero_i_rel_breaks_psi_only() {
        let r = interval();
        let zero = PreMorphism::zero(r.data.i_rel.source.clone(), r.data.i_rel.target.clone(), EXACT).unwrap();
        let data = RelativeData::new(r.data.a.clone(), r.data.functor.clone(), r.data.j, r.data.rel.clone(), zero).unwrap();
        assert!(check_wcy_bimodule(&r.phi).holds());
        assert!(!check_wcy_bimodule(&psi(&data, &r.phi).unwrap()).quasi_iso);
    }

    #[test]
    fn s_i_is_natural() {
        let r = interval();
        let s = s_i(&r.data.functor).unwrap();
        assert!(s.is_natural(6));
        let a = cat("dual_numbers");
        let id = Arc::new(Functor::identity(a));
        assert!(s_i(&id).unwrap().is_natural(6));
    }

    #[test]
    fn p_rel_matches_psi_verdict() {
        let r = interval();
        let (by_psi, by_p, by_form) = relative_three_formulations(&r.data, &r.phi, Some(&r.sigma_a), 3).unwrap();
        assert!(by_psi && by_p && by_form == Some(true));
    }

    #[test]
    fn absolute_specialization_reproduces_lemma_verdicts() {
        for name in ["dual_numbers", "exterior_graded"] {
            let e = corpus::build(name).unwrap();
            let a = e.category.clone();
            let id = Arc::new(Functor::identity(a.clone()));
            let diag = Arc::new(Bimodule::diagonal(a.clone()));
            let data = RelativeData::new(a.clone(), id.clone(), 0, diag.clone(), canonical_i(&id).unwrap()).unwrap();
            for c in &e.candidates {
                let v = check_relative_pairing(&data, None, Some(&c.sigma), 3).unwrap();
                let lemma = check_lemma_nondeg_equivalence(&c.sigma, &a, &diag, 3).unwrap();
                assert_eq!(v.is_pairing, lemma.nondegenerate);
                assert_eq!(v.induced_on_b, lemma.nondegenerate);
            }
        }
    }
}

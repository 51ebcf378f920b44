//! Small, exactly checkable example instances and single-bit mutations of
//! them. Builders are deterministic.

use std::sync::Arc;

use thiserror::Error;

use crate::bimodule::{BiWord, Bimodule, PreMorphism, EXACT};
use crate::calabi_yau::{over_shift, ChainFunctional, RelativeData};
use crate::category::{Category, CategoryError, HomSpace};
use crate::functor::Functor;
use crate::gf2::{BitVec, ChainComplex, F2Matrix};

pub const NAMES: &[&str] = &[
    "k_field",
    "dual_numbers",
    "exterior_graded",
    "a2_quiver",
    "nilpotent_mu3",
    "interval_relative_toy",
    "surgery_cone_toy",
    "broken_dual_numbers",
    "degenerate_trace",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// A candidate Hochschild form together with the verdict it is documented
/// to receive. Tests recompute the verdict rather than trust it.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub sigma: ChainFunctional,
    pub expect_nondegenerate: bool,
}

/// A relative CY bundle: the data plus a pairing on `A`, the matching form,
/// and a form on `B` declared compatible with it.
#[derive(Clone, Debug)]
pub struct RelativeBundle {
    pub data: RelativeData,
    pub phi: PreMorphism,
    pub sigma_a: ChainFunctional,
    pub sigma_b: ChainFunctional,
}

/// Three complexes `C3, C2, C1` glued by a lower-triangular differential,
/// and the same data as left modules over the ground field.
#[derive(Clone, Debug)]
pub struct SurgeryToy {
    pub blocks: [ChainComplex; 3],
    pub rho32: F2Matrix,
    pub rho31: F2Matrix,
    pub rho21: F2Matrix,
    pub total: ChainComplex,
    pub modules: [Arc<Bimodule>; 3],
    /// `rho21` as a closed module morphism `C2 -> C1`.
    pub rho21_morphism: PreMorphism,
}

impl SurgeryToy {
    /// Offsets of the three blocks inside the total complex.
    pub fn offsets(&self) -> [usize; 4] {
        let d: Vec<usize> = self.blocks.iter().map(ChainComplex::dim).collect();
        [0, d[0], d[0] + d[1], d[0] + d[1] + d[2]]
    }

    /// Block `(r, c)` of the total differential.
    pub fn block(&self, r: usize, c: usize) -> F2Matrix {
        let o = self.offsets();
        let rows: Vec<usize> = (o[r]..o[r + 1]).collect();
        let cols: Vec<usize> = (o[c]..o[c + 1]).collect();
        self.total.differential().submatrix(&rows, &cols)
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub category: Arc<Category>,
    /// Documented outcome of the relation check.
    pub expect_valid: bool,
    pub candidates: Vec<Candidate>,
    pub relative: Option<RelativeBundle>,
    pub surgery: Option<SurgeryToy>,
    /// Result of re-validating after a mutation.
    pub revalidated: Option<bool>,
}

impl CorpusEntry {
    fn plain(name: &str, category: Category) -> Self {
        CorpusEntry { name: name.into(), category: Arc::new(category), expect_valid: true, candidates: vec![], relative: None, surgery: None, revalidated: None }
    }

    /// Left modules carried by the entry (Yoneda modules of the category,
    /// plus any extra modules of the entry).
    pub fn modules(&self) -> Vec<Arc<Bimodule>> {
        let mut out: Vec<Arc<Bimodule>> = crate::modfun::ModFunctor::yoneda_left(&self.category).modules().to_vec();
        if let Some(s) = &self.surgery {
            out.extend(s.modules.iter().cloned());
        }
        out
    }
}

pub fn build(name: &str) -> Result<CorpusEntry, CorpusError> {
    Ok(match name {
        "k_field" => {
            let mut e = CorpusEntry::plain(name, k_field());
            e.candidates.push(Candidate { name: "trace".into(), sigma: ChainFunctional::on_values([(0, 0)]), expect_nondegenerate: true });
            e
        }
        "dual_numbers" => {
            let mut e = CorpusEntry::plain(name, dual_numbers("dual_numbers", Some(0), [0, 0]));
            e.candidates = trace_pair();
            e
        }
        "exterior_graded" => {
            let mut e = CorpusEntry::plain(name, dual_numbers("exterior_graded", Some(-1), [-1, 0]));
            e.candidates = trace_pair();
            e
        }
        "a2_quiver" => {
            let mut e = CorpusEntry::plain(name, a2_quiver());
            e.candidates.push(Candidate { name: "unit_trace".into(), sigma: ChainFunctional::on_values([(0, 0), (1, 0)]), expect_nondegenerate: false });
            e
        }
        "nilpotent_mu3" => CorpusEntry::plain(name, nilpotent_mu3()),
        "interval_relative_toy" => interval_relative_toy(),
        "surgery_cone_toy" => {
            let mut e = CorpusEntry::plain(name, k_field());
            e.surgery = Some(surgery_toy());
            e
        }
        "broken_dual_numbers" => {
            let mut c = dual_numbers("broken_dual_numbers", Some(0), [0, 0]);
            // x . 1 = 1 + x instead of x
            c.flip_mu_bit(&[0, 0, 0], &[1, 0], 0)?;
            let mut e = CorpusEntry::plain(name, c);
            e.expect_valid = false;
            e
        }
        "degenerate_trace" => {
            let mut e = CorpusEntry::plain(name, dual_numbers("dual_numbers", Some(0), [0, 0]));
            e.candidates.push(Candidate { name: "degenerate".into(), sigma: ChainFunctional::on_values([(0, 0)]), expect_nondegenerate: false });
            e
        }
        _ => return Err(CorpusError::Unknown(name.into())),
    })
}

pub fn all() -> Vec<CorpusEntry> {
    NAMES.iter().map(|n| build(n).expect("corpus names build")).collect()
}

/// A structure-constant bit of the entry's category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub objects: Vec<u32>,
    pub elems: Vec<u32>,
    pub bit: usize,
}

/// Flips one bit of `mu` and records whether the result still validates.
pub fn mutate(entry: &CorpusEntry, at: &Coordinate) -> Result<CorpusEntry, CorpusError> {
    let mut c = (*entry.category).clone();
    c.flip_mu_bit(&at.objects, &at.elems, at.bit)?;
    let ok = c.validate_relations().passed();
    Ok(CorpusEntry {
        name: format!("{}~{:?}{:?}#{}", entry.name, at.objects, at.elems, at.bit),
        category: Arc::new(c),
        revalidated: Some(ok),
        ..entry.clone()
    })
}

fn trace_pair() -> Vec<Candidate> {
    vec![
        Candidate { name: "trace".into(), sigma: ChainFunctional::on_values([(0, 1)]), expect_nondegenerate: true },
        Candidate { name: "degenerate".into(), sigma: ChainFunctional::on_values([(0, 0)]), expect_nondegenerate: false },
    ]
}

pub fn k_field() -> Category {
    let mut c = Category::new("k_field", Some(0), &["X"], vec![vec![HomSpace::new(&["1"], &[0])]], 2);
    c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(1, 0)).unwrap();
    c
}

/// `F2[x]/x^2` with basis `1, x` of the given degrees.
fn dual_numbers(name: &str, n: Option<i64>, degs: [i64; 2]) -> Category {
    dual_numbers_bounded(name, n, degs, 2)
}

fn dual_numbers_bounded(name: &str, n: Option<i64>, degs: [i64; 2], bound: usize) -> Category {
    let labels: &[&str] = if name == "exterior_graded" { &["1", "xi"] } else { &["1", "x"] };
    let mut c = Category::new(name, n, &["X"], vec![vec![HomSpace::new(labels, &degs)]], bound);
    c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(2, 0)).unwrap();
    c.set_mu(&[0, 0, 0], &[0, 1], BitVec::unit(2, 1)).unwrap();
    c.set_mu(&[0, 0, 0], &[1, 0], BitVec::unit(2, 1)).unwrap();
    c
}

fn a2_quiver() -> Category {
    let homs = vec![vec![HomSpace::new(&["eX"], &[0]), HomSpace::new(&["a"], &[0])], vec![HomSpace::zero(), HomSpace::new(&["eY"], &[0])]];
    let mut c = Category::new("a2_quiver", Some(0), &["X", "Y"], homs, 2);
    c.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(1, 0)).unwrap();
    c.set_mu(&[1, 1, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
    c.set_mu(&[0, 0, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
    c.set_mu(&[0, 1, 1], &[0, 0], BitVec::unit(1, 0)).unwrap();
    c
}

/// Shape searched for `nilpotent_mu3`: ungraded dual numbers with `mu_3`
/// given by the bits of `mask` (bit `2 * word + out`, words `(a, b, c)` in
/// binary `4a + 2b + c`).
pub fn mu3_candidate(mask: u32) -> Category {
    let mut c = dual_numbers_bounded("nilpotent_mu3", None, [0, 0], 3);
    for word in 0..8u32 {
        let elems = [(word >> 2) & 1, (word >> 1) & 1, word & 1];
        let out = BitVec::from_indices(2, (0..2).filter(|o| mask >> (2 * word + o) & 1 == 1).map(|o| o as usize));
        if !out.is_zero() {
            c.set_mu(&[0, 0, 0, 0], &elems, out).unwrap();
        }
    }
    c
}

/// Exhaustive search: the first non-zero `mu_3` (in mask order) that
/// satisfies every relation.
pub fn search_nilpotent_mu3() -> Option<u32> {
    (1..1u32 << 16).find(|&m| mu3_candidate(m).validate_relations().passed())
}

/// Frozen result of [`search_nilpotent_mu3`] (rerun with
/// `cargo run --release --example search_mu3`): `mu_3(1,1,x) = 1`,
/// `mu_3(1,x,x) = mu_3(x,1,x) = x`.
pub const NILPOTENT_MU3_MASK: u32 = 0x0884;

fn nilpotent_mu3() -> Category {
    mu3_candidate(NILPOTENT_MU3_MASK)
}

fn interval_relative_toy() -> CorpusEntry {
    let mut a = Category::new("interval", Some(1), &["W"], vec![vec![HomSpace::new(&["e"], &[1])]], 2);
    a.set_mu(&[0, 0, 0], &[0, 0], BitVec::unit(1, 0)).unwrap();
    let a = Arc::new(a);
    let j = 1;
    let a_shift = Arc::new(a.suspend(j).unwrap());
    let b = Arc::new(k_field());
    let mut f = Functor::new("I", b.clone(), a_shift.clone(), vec![0], 1).unwrap();
    f.set(&[0, 0], &[0], BitVec::unit(1, 0)).unwrap();
    let f = Arc::new(f);
    let mut rel = Bimodule::diagonal(a.clone()).suspend(1).unwrap();
    rel.name = "interval_rel".into();
    let rel = Arc::new(rel);
    let pulled = Arc::new(over_shift(&rel, &a_shift, -j).unwrap().pullback(Some(&f), Some(&f)).unwrap());
    let unit_word = BiWord { lo: vec![0], ro: vec![0], lb: vec![], z: 0, rb: vec![] };
    let mut i_rel = PreMorphism::zero(Arc::new(Bimodule::diagonal(b.clone())), pulled, EXACT).unwrap();
    i_rel.set(&unit_word, BitVec::unit(1, 0));
    let data = RelativeData::new(a.clone(), f, j, rel.clone(), i_rel).expect("interval toy data is consistent");
    let mut phi = PreMorphism::zero(Arc::new(Bimodule::diagonal(a.clone())), Arc::new(rel.dual()), EXACT).unwrap();
    phi.set(&unit_word, BitVec::unit(1, 0));
    let bundle = RelativeBundle { data, phi, sigma_a: ChainFunctional::on_values([(0, 0)]), sigma_b: ChainFunctional::on_values([(0, 0)]) };
    let mut e = CorpusEntry::plain("interval_relative_toy", (*a).clone());
    e.category = a;
    e.relative = Some(bundle);
    e
}

fn ground_module(name: &str, labels: &[&str], degrees: &[i64], d: &[(usize, usize)]) -> Bimodule {
    let k = Arc::new(k_field());
    let n = labels.len();
    let mut m = Bimodule::left_module(name, k, vec![HomSpace::new(labels, degrees)], 1);
    for z in 0..n as u32 {
        let unit = BiWord { lo: vec![0, 0], ro: vec![0], lb: vec![0], z, rb: vec![] };
        m.set_mu(&unit, BitVec::unit(n, z as usize)).unwrap();
        let out = BitVec::from_indices(n, d.iter().filter(|&&(_, c)| c == z as usize).map(|&(r, _)| r));
        if !out.is_zero() {
            m.set_mu(&BiWord { lo: vec![0], ro: vec![0], lb: vec![], z, rb: vec![] }, out).unwrap();
        }
    }
    m
}

fn surgery_toy() -> SurgeryToy {
    // C3 = <b> (1), C2 = <a> (0), C1 = <c (-1), e (0)> with d e = c;
    // rho32 b = a, rho31 b = e, rho21 a = c.
    let c3 = ground_module("C3", &["b"], &[1], &[]);
    let c2 = ground_module("C2", &["a"], &[0], &[]);
    let c1 = ground_module("C1", &["c", "e"], &[-1, 0], &[(0, 1)]);
    let rho32 = F2Matrix::from_rows(&[&[1]]);
    let rho31 = F2Matrix::from_rows(&[&[0], &[1]]);
    let rho21 = F2Matrix::from_rows(&[&[1], &[0]]);
    let blocks = [c3.value_complex(0, 0), c2.value_complex(0, 0), c1.value_complex(0, 0)];
    let z = |r, c| F2Matrix::zeros(r, c);
    let top = F2Matrix::block(blocks[0].differential(), &z(1, 1), &rho32, blocks[1].differential());
    let d = F2Matrix::block(&top, &z(2, 2), &F2Matrix::block(&rho31, &rho21, &z(0, 1), &z(0, 1)), blocks[2].differential());
    let labels = ["b", "a", "c", "e"].iter().map(|s| s.to_string()).collect();
    let total = ChainComplex::new(labels, Some(vec![1, 0, -1, 0]), d).expect("triangular differential squares to zero");
    let (c2, c1) = (Arc::new(c2), Arc::new(c1));
    let mut nu = PreMorphism::zero(c2.clone(), c1.clone(), EXACT).unwrap();
    nu.set(&BiWord { lo: vec![0], ro: vec![0], lb: vec![], z: 0, rb: vec![] }, BitVec::unit(2, 0));
    SurgeryToy { blocks, rho32, rho31, rho21, total, modules: [Arc::new(c3), c2, c1], rho21_morphism: nu }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_validate_as_documented() {
        for e in all() {
            let r = e.category.validate_relations();
            assert_eq!(r.passed(), e.expect_valid, "{}: {:?}", e.name, r.first_failure());
        }
    }

    #[test]
    fn broken_dual_numbers_fails_at_arity_three() {
        let e = build("broken_dual_numbers").unwrap();
        let r = e.category.validate_relations();
        assert_eq!(r.first_failure().unwrap().arity, 3);
    }

    #[test]
    fn nilpotent_mu3_has_higher_product() {
        let c = build("nilpotent_mu3").unwrap().category;
        assert!(c.mu_tensor().iter().any(|(k, v)| (k.len() - 1) / 2 == 3 && !v.is_zero()));
    }

    #[test]
    #[ignore = "exhaustive search, about a minute in release"]
    fn frozen_mask_is_first_search_hit() {
        assert_eq!(search_nilpotent_mu3(), Some(NILPOTENT_MU3_MASK));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(build("nope"), Err(CorpusError::Unknown(_))));
    }

    #[test]
    fn builders_are_deterministic() {
        for n in NAMES {
            let (a, b) = (build(n).unwrap(), build(n).unwrap());
            assert_eq!(*a.category, *b.category);
            let sup = |e: &CorpusEntry| e.candidates.iter().map(|c| c.sigma.clone()).collect::<Vec<_>>();
            assert_eq!(sup(&a), sup(&b));
            assert_eq!(a.relative.map(|r| r.phi), b.relative.map(|r| r.phi));
        }
    }

    #[test]
    fn mutations() {
        let e = build("dual_numbers").unwrap();
        let at = Coordinate { objects: vec![0, 0, 0], elems: vec![1, 0], bit: 0 };
        let m = mutate(&e, &at).unwrap();
        assert_eq!(m.revalidated, Some(false));
        let back = mutate(&m, &at).unwrap();
        assert_eq!(*back.category, *e.category);
        assert_eq!(back.revalidated, Some(true));
        // x.x = 1 keeps associativity
        let harmless = mutate(&e, &Coordinate { objects: vec![0, 0, 0], elems: vec![1, 1], bit: 0 }).unwrap();
        assert_eq!(harmless.revalidated, Some(true));
        assert!(mutate(&e, &Coordinate { objects: vec![0, 0, 0], elems: vec![2, 0], bit: 0 }).is_err());
    }

    #[test]
    fn surgery_toy_shape() {
        let s = build("surgery_cone_toy").unwrap().surgery.unwrap();
        for (r, c) in [(0, 1), (0, 2), (1, 2)] {
            assert!(s.block(r, c).is_zero());
        }
        assert_eq!(s.block(1, 0), s.rho32);
        assert_eq!(s.block(2, 0), s.rho31);
        assert_eq!(s.block(2, 1), s.rho21);
        assert_eq!(s.total.total_homology_dim(), 0);
        for m in &s.modules {
            assert!(m.validate().passed());
        }
        assert!(s.rho21_morphism.is_closed());
    }

    #[test]
    fn interval_toy_functor_and_bimodules_validate() {
        let r = build("interval_relative_toy").unwrap().relative.unwrap();
        assert!(r.data.functor.validate().passed());
        assert!(r.data.rel.validate().passed());
        assert!(r.data.b.validate_relations().passed());
    }
}

//! One function per subcommand; each returns a finished report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ainf_core::bimodule::{Bimodule, PreMorphism};
use ainf_core::calabi_yau::{
    check_compatibility, check_nondegenerate, check_psi_irel_square, check_relative_pairing, check_wcy_bimodule, canonical_i, three_formulations, yoneda_verdict,
    ChainFunctional, CyError, RelativeData,
};
use ainf_core::category::{Category, RelationReport};
use ainf_core::corpus;
use ainf_core::hochschild::{build_2cc_chains, build_2cc_cochains, build_cc_chains, build_cc_cochains, stabilization_probe, HochschildComplex};
use ainf_core::modfun::diagrams::{sample, Which};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::corpus_files;
use crate::format::{emit, parse_bim_ref, BimRef, CatRef, Document, Loader};
use crate::report::Report;

fn relations(r: &mut Report, name: &str, rep: &RelationReport) {
    let detail = match (rep.first_failure(), rep.degree_violations.first()) {
        (Some(f), _) => format!("{} failing word(s); first: {f}", rep.failures.len()),
        (None, Some(d)) => format!("degree violation: {d}"),
        (None, None) => format!("checked through arity {}", rep.checked_up_to),
    };
    r.check(name, rep.passed(), detail);
}

fn dims_json(d: &BTreeMap<Option<i64>, usize>) -> Value {
    let m: serde_json::Map<String, Value> = d.iter().map(|(k, v)| (k.map_or("*".into(), |x| x.to_string()), json!(v))).collect();
    Value::Object(m)
}

pub fn validate(path: &Path, l: usize) -> Report {
    let mut loader = Loader::new();
    let doc = match loader.load(path) {
        Ok(d) => d,
        Err(e) => return Report::input_error("validate", e.to_string()),
    };
    let mut r = Report::new("validate");
    r.info("kind", doc.kind());
    match &doc {
        Document::Category(c) => {
            r.info("name", c.name.clone());
            relations(&mut r, "relations", &c.validate_relations());
        }
        Document::Functor(f) => {
            let f = &f.functor;
            r.info("name", f.name.clone());
            relations(&mut r, "source_relations", &f.source.validate_relations());
            relations(&mut r, "target_relations", &f.target.validate_relations());
            relations(&mut r, "functor_relations", &f.validate());
        }
        Document::Bimodule(b) => {
            let m = &b.bimodule;
            r.info("name", m.name.clone());
            relations(&mut r, "left_relations", &m.left.validate_relations());
            relations(&mut r, "right_relations", &m.right.validate_relations());
            relations(&mut r, "bimodule_relations", &m.validate());
        }
        Document::Morphism(d) => {
            let nu = &d.morphism;
            r.info("name", d.name.clone());
            relations(&mut r, "source_relations", &nu.source.validate());
            relations(&mut r, "target_relations", &nu.target.validate());
            r.check("closed", nu.is_closed(), "");
            match nu.degree() {
                Ok(deg) => r.info("degree", deg.map_or(Value::Null, |x| json!(x))),
                Err(e) => r.info("degree", e),
            }
        }
        Document::Form(f) => {
            r.info("name", f.name.clone());
            relations(&mut r, "category_relations", &f.resolved_category.validate_relations());
            relations(&mut r, "coefficient_relations", &f.resolved_coefficients.validate());
            match build_cc_chains(&f.resolved_category, &f.resolved_coefficients, l).map_err(CyError::from).and_then(|h| Ok((f.sigma.is_closed(&h)?, f.sigma.degree(&h)?))) {
                Ok((closed, deg)) => {
                    r.check("closed", closed, format!("on chains of length <= {l}"));
                    r.info("degree", deg.map_or(Value::Null, |x| json!(x)));
                }
                Err(e) => return Report::input_error("validate", e.to_string()),
            }
        }
    }
    r
}

pub fn fmt(path: &Path) -> Result<String, Report> {
    let mut loader = Loader::new();
    loader.load(path).map(|d| emit(&d)).map_err(|e| Report::input_error("fmt", e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Hom,
    CcChains,
    CcCochains,
    TwoCcChains,
    TwoCcCochains,
}

impl ComplexKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hom" => ComplexKind::Hom,
            "cc-chains" => ComplexKind::CcChains,
            "cc-cochains" => ComplexKind::CcCochains,
            "2cc-chains" => ComplexKind::TwoCcChains,
            "2cc-cochains" => ComplexKind::TwoCcCochains,
            _ => return None,
        })
    }
}

fn load_category(loader: &mut Loader, path: &Path) -> Result<Arc<Category>, String> {
    match loader.load(path).map_err(|e| e.to_string())? {
        Document::Category(c) => Ok(c),
        d => Err(format!("{} is a {}, not a category", path.display(), d.kind())),
    }
}

/// `diag`, `dual`, `zero`, or any bimodule reference relative to the working directory.
fn coefficients(loader: &mut Loader, cat_path: &Path, a: &Arc<Category>, spec: &str) -> Result<Arc<Bimodule>, String> {
    let cat = CatRef::Path(cat_path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
    let r = match spec {
        "diag" => BimRef::Diag(cat),
        "dual" => BimRef::Dual(Box::new(BimRef::Diag(cat))),
        "zero" => BimRef::Zero(cat),
        other => {
            let r = parse_bim_ref(other)?;
            let m = loader.bimodule(&PathBuf::from("./spec"), &r)?;
            if m.left != *a || m.right != *a {
                return Err("coefficients do not live over the category".into());
            }
            return Ok(m);
        }
    };
    loader.bimodule(cat_path, &r)
}

pub fn homology(path: &Path, kind: ComplexKind, coeff: &str, l: usize) -> Report {
    let mut loader = Loader::new();
    let a = match load_category(&mut loader, path) {
        Ok(a) => a,
        Err(e) => return Report::input_error("homology", e),
    };
    let mut r = Report::new("homology");
    r.info("category", a.name.clone());
    if kind == ComplexKind::Hom {
        let n = a.num_objects() as u32;
        for x in 0..n {
            for y in 0..n {
                let h = a.hom_complex(x, y).homology();
                r.info(&format!("hom({},{})", a.objects()[x as usize], a.objects()[y as usize]), dims_json(&h.dims()));
            }
        }
        return r;
    }
    let m = match coefficients(&mut loader, path, &a, coeff) {
        Ok(m) => m,
        Err(e) => return Report::input_error("homology", e),
    };
    let build = |len: usize| -> Result<HochschildComplex, ainf_core::hochschild::HochschildError> {
        match kind {
            ComplexKind::CcChains => build_cc_chains(&a, &m, len),
            ComplexKind::CcCochains => build_cc_cochains(&a, &m, len),
            ComplexKind::TwoCcChains => build_2cc_chains(&a, &m, len),
            ComplexKind::TwoCcCochains => build_2cc_cochains(&a, &m, len),
            ComplexKind::Hom => unreachable!(),
        }
    };
    let h = match build(l) {
        Ok(h) => h,
        Err(e) => return Report::input_error("homology", e.to_string()),
    };
    r.info("max_len", l);
    r.info("chain_dim", h.dim());
    r.info("total_homology", h.homology_dims().values().sum::<usize>());
    r.info("homology", dims_json(&h.homology_dims()));
    match stabilization_probe(l, build) {
        Ok(p) => {
            r.info("homology_next", dims_json(&p.at_next));
            r.info("stable_at_next", p.stable());
        }
        Err(e) => return Report::input_error("homology", e.to_string()),
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    Bimodule,
    Hochschild,
    Yoneda,
}

impl Formulation {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "bimodule" => Formulation::Bimodule,
            "hochschild" => Formulation::Hochschild,
            "yoneda" => Formulation::Yoneda,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Formulation::Bimodule => "bimodule",
            Formulation::Hochschild => "hochschild",
            Formulation::Yoneda => "yoneda",
        }
    }
}

fn cy_error(r: Report, e: CyError) -> Report {
    match e {
        CyError::NotClosed => r.not_closed("pairing candidate is not closed"),
        e => {
            let mut r = r;
            r.error = Some(e.to_string());
            r.exit = Some(crate::report::Exit::Input);
            r
        }
    }
}

pub fn check_cy(path: &Path, pairing: &Path, form: Formulation, cross_check: bool, l: usize) -> Report {
    let cmd = "check-cy";
    let mut loader = Loader::new();
    let a = match load_category(&mut loader, path) {
        Ok(a) => a,
        Err(e) => return Report::input_error(cmd, e),
    };
    let doc = match loader.load(pairing) {
        Ok(d) => d,
        Err(e) => return Report::input_error(cmd, e.to_string()),
    };
    let mut r = Report::new(cmd);
    r.info("category", a.name.clone());
    r.info("max_len", l);
    let wanted: Vec<Formulation> = if cross_check { vec![Formulation::Bimodule, Formulation::Hochschild, Formulation::Yoneda] } else { vec![form] };
    match doc {
        Document::Form(f) => {
            if *f.resolved_category != *a || *f.resolved_coefficients != Bimodule::diagonal(a.clone()) {
                return Report::input_error(cmd, "the form must live on chains of the category with diagonal coefficients");
            }
            let tw = match three_formulations(&f.sigma, &a, l) {
                Ok(t) => t,
                Err(e) => return cy_error(r, e),
            };
            for w in &wanted {
                let v = match w {
                    Formulation::Bimodule => tw.bimodule,
                    Formulation::Hochschild => tw.hochschild,
                    Formulation::Yoneda => tw.yoneda,
                };
                r.check(w.name(), v, "");
            }
            if cross_check {
                r.check("agreement", tw.agree(), "");
            }
        }
        Document::Morphism(m) => {
            let phi = m.morphism;
            if *phi.source != Bimodule::diagonal(a.clone()) || *phi.target != Bimodule::diagonal(a.clone()).dual() {
                return Report::input_error(cmd, "the morphism must run from the diagonal to its dual");
            }
            if wanted.contains(&Formulation::Hochschild) {
                return Report::input_error(cmd, "the hochschild formulation needs a form, not a bimodule morphism");
            }
            let v = check_wcy_bimodule(&phi);
            if !v.closed {
                return r.not_closed("pairing candidate is not closed");
            }
            r.info("degree", v.degree.map_or(Value::Null, |d| json!(d)));
            for w in &wanted {
                let ok = match w {
                    Formulation::Bimodule => v.holds(),
                    _ => match yoneda_verdict(&phi) {
                        Ok(y) => v.homogeneous && v.degree == v.expected_degree && y,
                        Err(e) => return cy_error(r, e),
                    },
                };
                r.check(w.name(), ok, "");
            }
            if cross_check {
                let vals: Vec<bool> = r.checks.values().map(|c| c.passed).collect();
                r.check("agreement", vals.windows(2).all(|p| p[0] == p[1]), "");
            }
        }
        d => return Report::input_error(cmd, format!("pairing must be a form or a morphism, got a {}", d.kind())),
    }
    r
}

pub struct RelativeArgs<'a> {
    pub a: &'a Path,
    pub b: &'a Path,
    pub functor: &'a Path,
    pub rel: &'a str,
    /// A morphism file, or `canonical` for the map induced by the functor.
    pub irel: &'a str,
    pub phi: Option<&'a Path>,
    pub sigma: Option<&'a Path>,
    pub sigma_b: Option<&'a Path>,
}

fn cat_shift(r: &CatRef) -> i64 {
    match r {
        CatRef::Path(_) => 0,
        CatRef::Shift(j, inner) => j + cat_shift(inner),
    }
}

pub fn check_relative(args: &RelativeArgs, l: usize) -> Report {
    let cmd = "check-relative";
    let mut loader = Loader::new();
    let cwd = PathBuf::from("./spec");
    let a = match load_category(&mut loader, args.a) {
        Ok(c) => c,
        Err(e) => return Report::input_error(cmd, e),
    };
    let b = match load_category(&mut loader, args.b) {
        Ok(c) => c,
        Err(e) => return Report::input_error(cmd, e),
    };
    let fdoc = match loader.load(args.functor) {
        Ok(Document::Functor(f)) => f,
        Ok(d) => return Report::input_error(cmd, format!("{} is a {}, not a functor", args.functor.display(), d.kind())),
        Err(e) => return Report::input_error(cmd, e.to_string()),
    };
    let j = cat_shift(&fdoc.target);
    if let (Some(na), Some(nb)) = (a.degree, b.degree) {
        if na != nb + j {
            return Report::input_error(cmd, format!("degree mismatch: N_A = {na}, N_B = {nb}, j = {j}"));
        }
    }
    if *fdoc.functor.source != *b {
        return Report::input_error(cmd, "functor source is not B");
    }
    let rel = match parse_bim_ref(args.rel).and_then(|r| loader.bimodule(&cwd, &r)) {
        Ok(m) => m,
        Err(e) => return Report::input_error(cmd, e),
    };
    let i_rel = if args.irel == "canonical" {
        match canonical_i(&fdoc.functor) {
            Ok(i) => i,
            Err(e) => return Report::input_error(cmd, e.to_string()),
        }
    } else {
        match loader.load(Path::new(args.irel)) {
            Ok(Document::Morphism(m)) => m.morphism,
            Ok(d) => return Report::input_error(cmd, format!("i_rel must be a morphism, got a {}", d.kind())),
            Err(e) => return Report::input_error(cmd, e.to_string()),
        }
    };
    let data = match RelativeData::new(a.clone(), fdoc.functor.clone(), j, rel.clone(), i_rel) {
        Ok(d) => d,
        Err(e) => return Report::input_error(cmd, e.to_string()),
    };
    let phi: Option<PreMorphism> = match args.phi.map(|p| loader.load(p)) {
        None => None,
        Some(Ok(Document::Morphism(m))) => Some(m.morphism.reattach(Arc::new(Bimodule::diagonal(a.clone())), Arc::new(rel.dual()))),
        Some(Ok(d)) => return Report::input_error(cmd, format!("--phi must be a morphism, got a {}", d.kind())),
        Some(Err(e)) => return Report::input_error(cmd, e.to_string()),
    };
    if let Some(p) = &phi {
        if *p.source != Bimodule::diagonal(a.clone()) || *p.target != rel.dual() {
            return Report::input_error(cmd, "--phi must run from the diagonal of A to the dual of the relative diagonal");
        }
    }
    let mut load_form = |p: Option<&Path>, cat: &Arc<Category>, coeff: &Bimodule| -> Result<Option<ChainFunctional>, String> {
        match p.map(|p| loader.load(p)) {
            None => Ok(None),
            Some(Ok(Document::Form(f))) => {
                if *f.resolved_category != **cat || *f.resolved_coefficients != *coeff {
                    return Err(format!("form {} lives over the wrong category or coefficients", f.name));
                }
                Ok(Some(f.sigma))
            }
            Some(Ok(d)) => Err(format!("expected a form, got a {}", d.kind())),
            Some(Err(e)) => Err(e.to_string()),
        }
    };
    let sigma = match load_form(args.sigma, &a, &rel) {
        Ok(s) => s,
        Err(e) => return Report::input_error(cmd, e),
    };
    let sigma_b = match load_form(args.sigma_b, &b, &Bimodule::diagonal(b.clone())) {
        Ok(s) => s,
        Err(e) => return Report::input_error(cmd, e),
    };
    if phi.is_none() && sigma.is_none() {
        return Report::input_error(cmd, "give --phi, --sigma, or both");
    }
    let mut r = Report::new(cmd);
    r.info("j", j);
    r.info("max_len", l);
    r.check("i_rel_closed", data.check_i_rel(), "");
    let v = match check_relative_pairing(&data, phi.as_ref(), sigma.as_ref(), l) {
        Ok(v) => v,
        Err(CyError::Inconsistent(msg)) => {
            r.check("formulations_agree", false, msg);
            return r;
        }
        Err(e) => return cy_error(r, e),
    };
    if v.by_bimodule.is_some() && v.by_hochschild.is_some() {
        r.check("formulations_agree", true, "");
    }
    r.check("pairing_on_a", v.is_pairing, "");
    r.check("psi_quasi_iso", v.induced_on_b, "induced pairing on B");
    match check_psi_irel_square(&data, l) {
        Ok(sq) => r.check("psi_irel_square", sq.commutes(), format!("{} of {} classes fail", sq.failures, sq.classes)),
        Err(e) => return cy_error(r, e),
    }
    if let Some(sb) = &sigma_b {
        match check_nondegenerate(sb, &b, &Bimodule::diagonal(b.clone()), l) {
            Ok(nd) => r.check("nondegenerate_on_b", nd.perfect, "declared form on B"),
            Err(e) => return cy_error(r, e),
        }
        if let Some(sa) = &sigma {
            match check_compatibility(&data, sa, sb, l) {
                Ok(ok) => r.check("compatibility", ok, ""),
                Err(e) => return cy_error(r, e),
            }
        }
    }
    r
}

pub fn diagram(which: Which, paths: &[PathBuf], samples: usize, seed: u64, arity: usize) -> Report {
    let cmd = "diagram";
    let mut loader = Loader::new();
    let mut r = Report::new(cmd);
    r.info("which", which.name());
    r.info("samples", samples);
    r.info("seed", seed);
    for p in paths {
        let a = match load_category(&mut loader, p) {
            Ok(a) => a,
            Err(e) => return Report::input_error(cmd, e),
        };
        if !a.validate_relations().passed() {
            return Report::input_error(cmd, format!("{} does not satisfy the relations", p.display()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failed = 0;
        for _ in 0..samples {
            match sample(which, &a, arity, 3, &mut rng) {
                Ok(true) => {}
                Ok(false) => failed += 1,
                Err(e) => return Report::input_error(cmd, e.to_string()),
            }
        }
        r.check(&p.display().to_string(), failed == 0, format!("{failed} of {samples} samples fail"));
    }
    r
}

pub fn emit_corpus(name: &str, out: &Path) -> Report {
    let cmd = "corpus";
    let names: Vec<&str> = if name == "all" { corpus::NAMES.to_vec() } else { vec![name] };
    let mut r = Report::new(cmd);
    let mut files = Vec::new();
    for n in names {
        let e = match corpus::build(n) {
            Ok(e) => e,
            Err(e) => return Report::input_error(cmd, e.to_string()),
        };
        match corpus_files::write(&e, out) {
            Ok(ps) => files.extend(ps.iter().map(|p| p.display().to_string())),
            Err(e) => return Report::input_error(cmd, format!("cannot write into {}: {e}", out.display())),
        }
    }
    r.info("files", files);
    r
}

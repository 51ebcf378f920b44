//! Corpus entries as sets of spec files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ainf_core::bimodule::Bimodule;
use ainf_core::calabi_yau::ChainFunctional;
use ainf_core::category::Category;
use ainf_core::corpus::{CorpusEntry, NAMES};

use crate::format::{emit, BimRef, BimoduleDoc, CatRef, Document, FormDoc, FunctorDoc, MorphismDoc};

fn form(name: &str, cat_file: &str, coefficients: BimRef, a: &Arc<Category>, m: Arc<Bimodule>, sigma: &ChainFunctional) -> Document {
    Document::Form(FormDoc {
        name: name.into(),
        category: CatRef::Path(cat_file.into()),
        coefficients,
        resolved_category: a.clone(),
        resolved_coefficients: m,
        sigma: sigma.clone(),
    })
}

/// File names and documents of an entry, in emission order.
pub fn documents(e: &CorpusEntry) -> Vec<(String, Document)> {
    let n = &e.name;
    let cat_file = format!("{n}.cat");
    let cat_ref = || CatRef::Path(cat_file.clone());
    let mut out = vec![(cat_file.clone(), Document::Category(e.category.clone()))];
    for c in &e.candidates {
        let diag = Arc::new(Bimodule::diagonal(e.category.clone()));
        out.push((format!("{n}.{}.form", c.name), form(&c.name, &cat_file, BimRef::Diag(cat_ref()), &e.category, diag, &c.sigma)));
    }
    if let Some(r) = &e.relative {
        let d = &r.data;
        let b_file = format!("{n}.B.cat");
        let fun_file = format!("{n}.I.fun");
        let rel_file = format!("{n}.rel.bim");
        out.push((b_file.clone(), Document::Category(d.b.clone())));
        out.push((
            fun_file.clone(),
            Document::Functor(FunctorDoc { source: CatRef::Path(b_file.clone()), target: CatRef::Shift(d.j, Box::new(cat_ref())), functor: d.functor.clone() }),
        ));
        out.push((rel_file.clone(), Document::Bimodule(BimoduleDoc { left: Some(cat_ref()), right: Some(cat_ref()), bimodule: d.rel.clone() })));
        out.push((
            format!("{n}.irel.mor"),
            Document::Morphism(MorphismDoc {
                name: "i_rel".into(),
                source: BimRef::Diag(CatRef::Path(b_file.clone())),
                target: BimRef::Pullback(fun_file.clone(), Box::new(BimRef::Shift(-d.j, Box::new(BimRef::Path(rel_file.clone()))))),
                morphism: d.i_rel.clone(),
            }),
        ));
        out.push((
            format!("{n}.phi.mor"),
            Document::Morphism(MorphismDoc { name: "phi".into(), source: BimRef::Diag(cat_ref()), target: BimRef::Dual(Box::new(BimRef::Path(rel_file.clone()))), morphism: r.phi.clone() }),
        ));
        out.push((format!("{n}.sigma_a.form"), form("sigma_a", &cat_file, BimRef::Path(rel_file), &d.a, d.rel.clone(), &r.sigma_a)));
        let diag_b = Arc::new(Bimodule::diagonal(d.b.clone()));
        out.push((format!("{n}.sigma_b.form"), form("sigma_b", &b_file, BimRef::Diag(CatRef::Path(b_file.clone())), &d.b, diag_b, &r.sigma_b)));
    }
    if let Some(s) = &e.surgery {
        let files = ["C3", "C2", "C1"];
        for (m, f) in s.modules.iter().zip(files) {
            out.push((format!("{n}.{f}.bim"), Document::Bimodule(BimoduleDoc { left: Some(cat_ref()), right: None, bimodule: m.clone() })));
        }
        out.push((
            format!("{n}.rho21.mor"),
            Document::Morphism(MorphismDoc {
                name: "rho21".into(),
                source: BimRef::Path(format!("{n}.C2.bim")),
                target: BimRef::Path(format!("{n}.C1.bim")),
                morphism: s.rho21_morphism.clone(),
            }),
        ));
    }
    out
}

/// Writes the entry's files under `dir` and returns their paths.
pub fn write(e: &CorpusEntry, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (file, doc) in documents(e) {
        let p = dir.join(file);
        fs::write(&p, emit(&doc))?;
        paths.push(p);
    }
    Ok(paths)
}

pub fn names() -> &'static [&'static str] {
    NAMES
}

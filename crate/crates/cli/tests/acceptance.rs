//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ainf_cli::corpus_files;
use ainf_cli::format::{emit, BimRef, CatRef, Document, FormDoc, Loader, MorphismDoc};
use ainf_core::bimodule::{cone, Bimodule, PreMorphism};
use ainf_core::calabi_yau::{
    canonical_i, check_compatibility, check_lemma_nondeg_equivalence, check_psi_irel_square, check_relative_pairing, form_to_bimodule, relative_three_formulations,
    three_formulations, ChainFunctional, RelativeData,
};
use ainf_core::category::Category;
use ainf_core::corpus::{self, CorpusEntry};
use ainf_core::functor::{Functor, PreNat};
use ainf_core::gf2::F2Matrix;
use ainf_core::hochschild::{
    build_2cc_chains, build_2cc_cochains, build_cc_chains, build_cc_cochains, map_gamma, map_s_between, map_t_between, stable_quasi_iso, window_degrees,
};
use ainf_core::modfun::diagrams::{random_endofunctor, sample, Which};
use ainf_core::modfun::{ModFunctor, ModPreNat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn valid_entries() -> Vec<CorpusEntry> {
    corpus::all().into_iter().filter(|e| e.expect_valid).collect()
}

fn relation_soundness() -> Outcome {
    let mut checked = 0;
    for e in corpus::all() {
        let rep = e.category.validate_relations();
        if e.name.starts_with("broken_") {
            ensure!(!rep.passed(), "{} passes but is documented broken", e.name);
            let w = rep.first_failure().ok_or(format!("{}: no witness", e.name))?;
            ensure!(!w.value.is_zero() && w.objects.len() == w.arity + 1, "{}: malformed witness", e.name);
            checked += 1;
            continue;
        }
        ensure!(rep.passed(), "{}: {}", e.name, rep.first_failure().map(|f| f.to_string()).unwrap_or_default());
        for m in e.modules() {
            ensure!(m.validate().passed(), "{}: module {} fails", e.name, m.name);
            checked += 1;
        }
        if let Some(r) = &e.relative {
            ensure!(r.data.functor.validate().passed(), "{}: functor fails", e.name);
            ensure!(r.data.rel.validate().passed(), "{}: relative diagonal fails", e.name);
            ensure!(r.data.b.validate_relations().passed(), "{}: B fails", e.name);
            checked += 3;
        }
        ensure!(Bimodule::diagonal(e.category.clone()).validate().passed(), "{}: diagonal fails", e.name);
        checked += 2;
    }
    Ok(format!("{checked} validator runs"))
}

fn dg_structure() -> Outcome {
    const L: usize = 4;
    const N: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bim, mut fun, mut nonzero) = (0, 0, 0);
    for e in valid_entries() {
        let a = &e.category;
        let d = Arc::new(Bimodule::diagonal(a.clone()));
        let mut pairs = vec![(d.clone(), d.clone()), (d.clone(), Arc::new(d.dual()))];
        pairs.extend(e.modules().into_iter().map(|m| (m.clone(), m)));
        for i in 0..N {
            let (s, t) = &pairs[i % pairs.len()];
            let nu = PreMorphism::random(s.clone(), t.clone(), L, &mut rng);
            let d1 = nu.mu1(L);
            nonzero += !d1.is_zero() as usize;
            ensure!(d1.mu1(L).is_zero(), "{}: bimod_mu1^2 != 0 on sample {i}", e.name);
            bim += 1;
        }
        let y = Arc::new(ModFunctor::yoneda_left(a));
        for i in 0..N {
            if i % 2 == 0 {
                let f0 = Arc::new(random_endofunctor(a, 2, &mut rng));
                let f1 = Arc::new(random_endofunctor(a, 2, &mut rng));
                let t = PreNat::random(f0, f1, L, &mut rng);
                let d1 = t.mu1(L);
                nonzero += !d1.is_zero() as usize;
                ensure!(d1.mu1(L).is_zero(), "{}: fun_mu1^2 != 0 on sample {i}", e.name);
            } else {
                let t = ModPreNat::random(y.clone(), y.clone(), L, &mut rng);
                let d1 = t.mu1(L);
                nonzero += !d1.is_zero() as usize;
                ensure!(d1.mu1(L).is_zero(), "{}: module-valued fun_mu1^2 != 0 on sample {i}", e.name);
            }
            fun += 1;
        }
    }
    ensure!(nonzero > 0, "all sampled differentials vanished");
    Ok(format!("{bim} bimodule and {fun} functor samples, {nonzero} with non-zero mu1"))
}

fn proposition_suite() -> Outcome {
    let mut runs = 0;
    for e in valid_entries() {
        for (i, which) in Which::ALL.into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + i as u64);
            for s in 0..50 {
                let ok = sample(which, &e.category, 2, 3, &mut rng).map_err(|err| format!("{}: {err}", e.name))?;
                ensure!(ok, "{} fails on {} sample {s}", which.name(), e.name);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} diagram instances"))
}

fn comparison_maps() -> Outcome {
    for name in ["k_field", "dual_numbers", "a2_quiver", "exterior_graded"] {
        let a = corpus::build(name).map_err(|e| e.to_string())?.category;
        let m = Bimodule::diagonal(a.clone());
        let err = |e: ainf_core::hochschild::HochschildError| e.to_string();
        let one = build_cc_cochains(&a, &m, 4).map_err(err)?;
        let two = build_2cc_cochains(&a, &m, 4).map_err(err)?;
        let s = map_s_between(&one, &two, &m).map_err(err)?;
        ensure!(s.commutes(), "{name}: S is not a chain map");
        ensure!(!window_degrees(&s, one.stable(), two.stable()).is_empty(), "{name}: no stable degrees for S");
        let r = stable_quasi_iso(&s, one.stable(), two.stable()).ok_or(format!("{name}: ungraded"))?;
        ensure!(r.by_cone && r.by_ranks, "{name}: S {r:?}");
        let two = build_2cc_chains(&a, &m, 4).map_err(err)?;
        let one = build_cc_chains(&a, &m, 4).map_err(err)?;
        let t = map_t_between(&two, &one, &m).map_err(err)?;
        ensure!(t.commutes(), "{name}: T is not a chain map");
        ensure!(!window_degrees(&t, two.stable(), one.stable()).is_empty(), "{name}: no stable degrees for T");
        let r = stable_quasi_iso(&t, two.stable(), one.stable()).ok_or(format!("{name}: ungraded"))?;
        ensure!(r.by_cone && r.by_ranks, "{name}: T {r:?}");
    }
    Ok("S and T on 4 categories, stable window".into())
}

fn gamma() -> Outcome {
    let mut n = 0;
    for e in valid_entries() {
        let d = Bimodule::diagonal(e.category.clone());
        for (tag, m) in [("diagonal", d.clone()), ("dual diagonal", d.dual())] {
            for l in 2..=4 {
                let g = map_gamma(&e.category, &m, l).map_err(|err| err.to_string())?;
                ensure!(g.matrix.is_invertible(), "{} {tag} L={l}: not bijective", e.name);
                ensure!(g.commutes(), "{} {tag} L={l}: not a chain map", e.name);
                n += 1;
            }
        }
    }
    Ok(format!("{n} instances"))
}

/// (entry, candidate, L, nondegenerate, bimodule verdict)
type LemmaRow = (String, String, usize, bool, bool);

fn lemma_rows() -> Result<Vec<LemmaRow>, String> {
    let mut rows = Vec::new();
    for name in ["dual_numbers", "exterior_graded"] {
        let e = corpus::build(name).map_err(|e| e.to_string())?;
        let m = Bimodule::diagonal(e.category.clone());
        for c in &e.candidates {
            for l in 1..=3 {
                let r = check_lemma_nondeg_equivalence(&c.sigma, &e.category, &m, l).map_err(|e| e.to_string())?;
                rows.push((name.to_string(), c.name.clone(), l, r.nondegenerate, r.bimodule.holds()));
            }
        }
    }
    Ok(rows)
}

fn lemma_equivalence() -> Outcome {
    let rows = lemma_rows()?;
    for (name, cand, l, nd, bim) in &rows {
        ensure!(nd == bim, "{name}/{cand} L={l}: pairing says {nd}, bimodule says {bim}");
        let want = cand == "trace";
        ensure!(*nd == want, "{name}/{cand} L={l}: verdict {nd}, documented {want}");
    }
    Ok(format!("{} verdict pairs agree", rows.len()))
}

fn three_formulation_agreement() -> Outcome {
    let mut n = 0;
    for e in corpus::all() {
        for c in &e.candidates {
            let t = three_formulations(&c.sigma, &e.category, 3).map_err(|err| err.to_string())?;
            ensure!(t.agree(), "{}/{}: {t:?}", e.name, c.name);
            ensure!(t.hochschild == c.expect_nondegenerate, "{}/{}: verdict {} vs documented {}", e.name, c.name, t.hochschild, c.expect_nondegenerate);
            n += 1;
        }
        if let Some(r) = &e.relative {
            let (by_psi, by_p, by_form) = relative_three_formulations(&r.data, &r.phi, Some(&r.sigma_a), 3).map_err(|err| err.to_string())?;
            ensure!(Some(by_psi) == by_form && by_psi == by_p, "{}: relative verdicts {by_psi} {by_p} {by_form:?}", e.name);
            n += 1;
        }
    }
    Ok(format!("{n} candidates"))
}

fn relative_pipeline() -> Outcome {
    let r = corpus::build("interval_relative_toy").map_err(|e| e.to_string())?.relative.ok_or("no relative bundle")?;
    for l in 1..=3 {
        let v = check_relative_pairing(&r.data, Some(&r.phi), Some(&r.sigma_a), l).map_err(|e| e.to_string())?;
        ensure!(v.holds(), "L={l}: {v:?}");
        let sq = check_psi_irel_square(&r.data, l).map_err(|e| e.to_string())?;
        ensure!(sq.commutes(), "L={l}: square fails on {} of {} classes", sq.failures, sq.classes);
        ensure!(check_compatibility(&r.data, &r.sigma_a, &r.sigma_b, l).map_err(|e| e.to_string())?, "L={l}: sigma_B not compatible");
    }
    let mut rows = Vec::new();
    for name in ["dual_numbers", "exterior_graded"] {
        let e = corpus::build(name).map_err(|e| e.to_string())?;
        let a = e.category.clone();
        let f = Arc::new(Functor::identity(a.clone()));
        let d = Arc::new(Bimodule::diagonal(a.clone()));
        let i = canonical_i(&f).map_err(|e| e.to_string())?;
        let data = RelativeData::new(a.clone(), f, 0, d.clone(), i).map_err(|e| e.to_string())?;
        for c in &e.candidates {
            for l in 1..=3 {
                let by_form = check_relative_pairing(&data, None, Some(&c.sigma), l).map_err(|e| e.to_string())?;
                let phi = form_to_bimodule(&c.sigma, &a, &d, l).map_err(|e| e.to_string())?;
                let by_phi = check_relative_pairing(&data, Some(&phi), None, l).map_err(|e| e.to_string())?;
                rows.push((name.to_string(), c.name.clone(), l, by_form.is_pairing, by_phi.is_pairing));
            }
        }
    }
    ensure!(rows == lemma_rows()?, "absolute specialization differs from the lemma verdicts");
    Ok(format!("interval toy at L=1..3; {} absolute verdicts reproduced", rows.len()))
}

fn cones() -> Outcome {
    let mut n = 0;
    for e in valid_entries() {
        for m in e.modules() {
            let c = cone(&PreMorphism::unit(m.clone())).map_err(|err| err.to_string())?;
            ensure!(c.module.validate().passed(), "{}: cone of {} fails validation", e.name, m.name);
            for x in 0..c.module.left.num_objects() as u32 {
                ensure!(c.module.value_complex(x, 0).total_homology_dim() == 0, "{}: cone(id) of {} not acyclic", e.name, m.name);
            }
            n += 1;
        }
    }
    let s = corpus::build("surgery_cone_toy").map_err(|e| e.to_string())?.surgery.ok_or("no surgery toy")?;
    let d = s.total.differential();
    ensure!(d.mul(d).is_zero(), "total differential does not square to zero");
    for r in 0..3 {
        for c in 0..3 {
            let b = s.block(r, c);
            let want: F2Matrix = match (r, c) {
                (r, c) if c > r => F2Matrix::zeros(b.rows(), b.cols()),
                (r, c) if r == c => s.blocks[r].differential().clone(),
                (1, 0) => s.rho32.clone(),
                (2, 0) => s.rho31.clone(),
                _ => s.rho21.clone(),
            };
            ensure!(b == want, "block ({r},{c}) differs from the triangular pattern");
            ensure!(c > r || r == c || !b.is_zero(), "off-diagonal block ({r},{c}) unexpectedly zero");
        }
    }
    let c = cone(&s.rho21_morphism).map_err(|e| e.to_string())?;
    ensure!(c.inclusion.is_closed() && c.projection.is_closed(), "cone structure morphisms not closed");
    Ok(format!("{n} modules; 9 surgery blocks"))
}

fn yoneda_diagonal() -> Outcome {
    for e in valid_entries() {
        let phi = ModFunctor::yoneda_left(&e.category).phi();
        let d = Bimodule::diagonal(e.category.clone());
        ensure!(*phi == d && phi.mu_tensor().sorted() == d.mu_tensor().sorted(), "{}: Phi(Y) differs from the diagonal", e.name);
    }
    Ok("all categories".into())
}

// ---------------------------------------------------------------------------
// CLI

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ainf-acceptance-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).expect("scratch dir");
    d
}

fn ainf(dir: &Path, args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_ainf")).current_dir(dir).env_remove("AINF_MAX_LEN").args(args).output().map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), o.stdout))
}

fn write_doc(dir: &Path, file: &str, doc: &Document) -> Result<(), String> {
    fs::write(dir.join(file), emit(doc)).map_err(|e| e.to_string())
}

/// A form over `cat_file` with the given coefficients that is not closed.
fn non_closed_form(a: &Arc<Category>, m: Arc<Bimodule>, cat_file: &str, coeff: BimRef) -> Result<Document, String> {
    let h = build_cc_chains(a, &m, 3).map_err(|e| e.to_string())?;
    for key in h.keys() {
        let s = ChainFunctional::new([key.clone()]);
        if !s.is_closed(&h).map_err(|e| e.to_string())? {
            return Ok(Document::Form(FormDoc {
                name: "open".into(),
                category: CatRef::Path(cat_file.into()),
                coefficients: coeff,
                resolved_category: a.clone(),
                resolved_coefficients: m,
                sigma: s,
            }));
        }
    }
    Err("no single-word form fails to be closed".into())
}

fn cli_contract() -> Outcome {
    let one = scratch("one");
    let two = scratch("two");
    for d in [&one, &two] {
        let (c, _) = ainf(d, &["corpus", "all", "--out", "."])?;
        ensure!(c == 0, "corpus emission exits {c}");
    }
    let mut files: Vec<String> = fs::read_dir(&one).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    for f in &files {
        let a = fs::read(one.join(f)).map_err(|e| e.to_string())?;
        ensure!(a == fs::read(two.join(f)).map_err(|e| e.to_string())?, "{f}: re-emission differs");
        let (c, out) = ainf(&one, &["fmt", f])?;
        ensure!(c == 0 && out == a, "{f}: parse/emit round trip is not byte-identical");
    }
    for e in corpus::all() {
        let mut loader = Loader::new();
        for (file, doc) in corpus_files::documents(&e) {
            let parsed = loader.load(&one.join(&file)).map_err(|e| e.to_string())?;
            ensure!(parsed == doc, "{file}: parsed entity differs from the corpus");
        }
    }

    // extra inputs for the exit-code matrix
    let dn = corpus::build("dual_numbers").map_err(|e| e.to_string())?;
    let a = dn.category.clone();
    let diag = Arc::new(Bimodule::diagonal(a.clone()));
    let dref = || BimRef::Diag(CatRef::Path("dual_numbers.cat".into()));
    write_doc(&one, "open.form", &non_closed_form(&a, diag.clone(), "dual_numbers.cat", dref())?)?;
    let trace = &dn.candidates.iter().find(|c| c.name == "trace").ok_or("no trace")?.sigma;
    let phi = form_to_bimodule(trace, &a, &diag, 3).map_err(|e| e.to_string())?;
    let mor = |name: &str, m: PreMorphism| Document::Morphism(MorphismDoc { name: name.into(), source: dref(), target: BimRef::Dual(Box::new(dref())), morphism: m });
    write_doc(&one, "trace.mor", &mor("trace", phi.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let open = (0..200).map(|_| PreMorphism::random(phi.source.clone(), phi.target.clone(), 3, &mut rng)).find(|m| !m.is_closed()).ok_or("no non-closed morphism sampled")?;
    write_doc(&one, "open.mor", &mor("open", open))?;
    fs::write(one.join("zero.form"), "kind form\nname zero\ncategory dual_numbers.cat\n").map_err(|e| e.to_string())?;
    fs::write(one.join("malformed.cat"), "kind category\nname m\nmode graded\ndegree 0\nobjects X\nhom X X : 1\n").map_err(|e| e.to_string())?;
    let t = "interval_relative_toy";
    let irel = fs::read_to_string(one.join(format!("{t}.irel.mor"))).map_err(|e| e.to_string())?;
    let zero_irel: String = irel.lines().filter(|l| !l.starts_with("c ")).map(|l| format!("{l}\n")).collect();
    fs::write(one.join("zero_irel.mor"), zero_irel).map_err(|e| e.to_string())?;
    let toy = corpus::build(t).map_err(|e| e.to_string())?.relative.ok_or("no bundle")?;
    let rel_ref = BimRef::Path(format!("{t}.rel.bim"));
    write_doc(&one, "open_rel.form", &non_closed_form(&toy.data.a, toy.data.rel.clone(), &format!("{t}.cat"), rel_ref)?)?;

    let (ta, tb, tf, tr, ti, tp, ts, tsb) =
        (format!("{t}.cat"), format!("{t}.B.cat"), format!("{t}.I.fun"), format!("{t}.rel.bim"), format!("{t}.irel.mor"), format!("{t}.phi.mor"), format!("{t}.sigma_a.form"), format!("{t}.sigma_b.form"));
    let rel = |irel: &str, b: &str, extra: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = ["check-relative", "--a", &ta, "--b", b, "--functor", &tf, "--rel", &tr, "--irel", irel].iter().map(|s| s.to_string()).collect();
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let s = |v: &[&str]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
    let matrix: Vec<(Vec<String>, i32)> = vec![
        (s(&["validate", "dual_numbers.cat"]), 0),
        (s(&["validate", "interval_relative_toy.I.fun"]), 0),
        (s(&["validate", "surgery_cone_toy.rho21.mor"]), 0),
        (s(&["validate", "broken_dual_numbers.cat"]), 1),
        (s(&["validate", "malformed.cat"]), 2),
        (s(&["validate", "absent.cat"]), 2),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "dual_numbers.trace.form", "--cross-check"]), 0),
        (s(&["check-cy", "exterior_graded.cat", "--pairing", "exterior_graded.trace.form", "--form", "hochschild"]), 0),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "dual_numbers.degenerate.form", "--cross-check"]), 1),
        (s(&["check-cy", "degenerate_trace.cat", "--pairing", "degenerate_trace.degenerate.form", "--form", "yoneda"]), 1),
        (s(&["check-cy", "a2_quiver.cat", "--pairing", "a2_quiver.unit_trace.form"]), 1),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "zero.form"]), 1),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "open.form"]), 3),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "trace.mor", "--form", "bimodule"]), 0),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "trace.mor", "--form", "yoneda"]), 0),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "open.mor"]), 3),
        (s(&["check-cy", "dual_numbers.cat", "--pairing", "dual_numbers.trace.form", "--form", "bogus"]), 2),
        (s(&["check-cy", "k_field.cat", "--pairing", "dual_numbers.trace.form"]), 2),
        (rel(&ti, &tb, &["--phi", &tp, "--sigma", &ts, "--sigma-b", &tsb]), 0),
        (rel("zero_irel.mor", &tb, &["--phi", &tp]), 1),
        (rel(&ti, &tb, &["--sigma", "open_rel.form"]), 3),
        (rel(&ti, "exterior_graded.cat", &["--phi", &tp]), 2),
        (rel(&ti, &tb, &[]), 2),
        (s(&["homology", "dual_numbers.cat", "--complex", "cc-chains", "--max-len", "0"]), 0),
        (s(&["homology", "dual_numbers.cat", "--complex", "nope"]), 2),
        (s(&["diagram", "--which", "g-pullback", "dual_numbers.cat", "--samples", "2"]), 0),
        (s(&["corpus", "nothing_here", "--out", "."]), 2),
        (s(&["no-such-command"]), 2),
    ];
    for (args, want) in &matrix {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, _) = ainf(&one, &refs)?;
        ensure!(got == *want, "`ainf {}` exits {got}, expected {want}", args.join(" "));
    }
    let _ = fs::remove_dir_all(&one);
    let _ = fs::remove_dir_all(&two);
    Ok(format!("{} files round-trip; {} exit-code cases", files.len(), matrix.len()))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("relation soundness", 10, relation_soundness),
        ("dg-structure", 60, dg_structure),
        ("proposition suite", 120, proposition_suite),
        ("quasi-iso comparison maps", 120, comparison_maps),
        ("gamma bijective and chain-commuting", 60, gamma),
        ("lemma equivalence", 30, lemma_equivalence),
        ("three-formulation agreement", 120, three_formulation_agreement),
        ("relative pipeline", 60, relative_pipeline),
        ("cones and surgery shadow", 10, cones),
        ("yoneda/diagonal identification", 10, yoneda_diagonal),
        ("cli contract", 30, cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(*limit) => Err(format!("took {took:.1?}, limit {limit} s")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

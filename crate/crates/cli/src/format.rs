//! Line-based spec files, one entity per file.
//!
//! ```text
//! kind category
//! name dual_numbers
//! mode graded
//! degree 0
//! arity_bound 2
//! objects X
//! hom X X : 1@0 x@0
//! mu X X X : 1 x -> x
//! ```
//!
//! Other kinds: `functor`, `bimodule`, `morphism`, `form`. Entities refer to
//! each other by path (relative to the referring file). Bimodule references
//! may be built on the fly: `diag C`, `zero C`, `dual R`, `shift J R`,
//! `pullback F R`. Category references accept `shift J C`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ainf_core::bimodule::{BiWord, Bimodule, PreMorphism, Shape, EXACT};
use ainf_core::calabi_yau::ChainFunctional;
use ainf_core::category::{Category, HomSpace};
use ainf_core::functor::Functor;
use ainf_core::gf2::BitVec;
use ainf_core::hochschild::{chain_key, split_chain_key};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("{}", self.render())]
pub struct InputError {
    pub file: PathBuf,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl InputError {
    fn render(&self) -> String {
        if self.line == 0 {
            format!("{}: {}", self.file.display(), self.msg)
        } else {
            format!("{}:{}:{}: {}", self.file.display(), self.line, self.col, self.msg)
        }
    }
}

type Result<T> = std::result::Result<T, InputError>;

/// Tensor entries ordered by arity, then lexicographically.
fn by_arity(t: &ainf_core::tensor::Tensor) -> Vec<(&ainf_core::tensor::Key, &BitVec)> {
    let mut v = t.sorted();
    v.sort_by_key(|(k, _)| k.len());
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatRef {
    Path(String),
    Shift(i64, Box<CatRef>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimRef {
    Path(String),
    Diag(CatRef),
    Zero(CatRef),
    Dual(Box<BimRef>),
    Shift(i64, Box<BimRef>),
    Pullback(String, Box<BimRef>),
}

impl std::fmt::Display for CatRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CatRef::Path(p) => write!(f, "{p}"),
            CatRef::Shift(j, c) => write!(f, "shift {j} {c}"),
        }
    }
}

impl std::fmt::Display for BimRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BimRef::Path(p) => write!(f, "{p}"),
            BimRef::Diag(c) => write!(f, "diag {c}"),
            BimRef::Zero(c) => write!(f, "zero {c}"),
            BimRef::Dual(r) => write!(f, "dual {r}"),
            BimRef::Shift(j, r) => write!(f, "shift {j} {r}"),
            BimRef::Pullback(p, r) => write!(f, "pullback {p} {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorDoc {
    pub source: CatRef,
    pub target: CatRef,
    pub functor: Arc<Functor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BimoduleDoc {
    /// Absent for the ground side of one-sided modules.
    pub left: Option<CatRef>,
    pub right: Option<CatRef>,
    pub bimodule: Arc<Bimodule>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismDoc {
    pub name: String,
    pub source: BimRef,
    pub target: BimRef,
    pub morphism: PreMorphism,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormDoc {
    pub name: String,
    pub category: CatRef,
    pub coefficients: BimRef,
    pub resolved_category: Arc<Category>,
    pub resolved_coefficients: Arc<Bimodule>,
    pub sigma: ChainFunctional,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Category(Arc<Category>),
    Functor(FunctorDoc),
    Bimodule(BimoduleDoc),
    Morphism(MorphismDoc),
    Form(FormDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Functor(_) => "functor",
            Document::Bimodule(_) => "bimodule",
            Document::Morphism(_) => "morphism",
            Document::Form(_) => "form",
        }
    }
}

// ---------------------------------------------------------------------------
// lexing

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    col: usize,
}

#[derive(Clone, Debug)]
struct Line {
    no: usize,
    toks: Vec<Tok>,
}

fn lex(src: &str) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let mut toks: Vec<Tok> = Vec::new();
        let mut cur: Option<(usize, String)> = None;
        for (col, ch) in raw.chars().enumerate() {
            if ch.is_whitespace() {
                if let Some((c, text)) = cur.take() {
                    toks.push(Tok { text, col: c });
                }
            } else if let Some((_, text)) = cur.as_mut() {
                text.push(ch);
            } else if ch == '#' {
                break;
            } else {
                cur = Some((col + 1, ch.to_string()));
            }
        }
        if let Some((c, text)) = cur {
            toks.push(Tok { text, col: c });
        }
        if !toks.is_empty() {
            out.push(Line { no: i + 1, toks });
        }
    }
    out
}

struct Cursor<'a> {
    file: &'a Path,
    line: &'a Line,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(file: &'a Path, line: &'a Line) -> Self {
        Cursor { file, line, pos: 1 }
    }

    fn err_at(&self, col: usize, msg: impl Into<String>) -> InputError {
        InputError { file: self.file.to_path_buf(), line: self.line.no, col, msg: msg.into() }
    }

    fn err(&self, msg: impl Into<String>) -> InputError {
        let col = self.line.toks.get(self.pos).or(self.line.toks.last()).map_or(1, |t| t.col);
        self.err_at(col, msg)
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.line.toks.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a Tok> {
        let t = self.line.toks.get(self.pos).ok_or_else(|| {
            let col = self.line.toks.last().map_or(1, |t| t.col + t.text.chars().count());
            self.err_at(col, format!("expected {what}"))
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn int(&mut self, what: &str) -> Result<i64> {
        let t = self.next(what)?;
        t.text.parse().map_err(|_| self.err_at(t.col, format!("expected {what}, found {:?}", t.text)))
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        let t = self.next(&format!("{s:?}"))?;
        if t.text != s {
            return Err(self.err_at(t.col, format!("expected {s:?}, found {:?}", t.text)));
        }
        Ok(())
    }

    fn until(&mut self, stop: &str) -> Vec<&'a Tok> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if t.text == stop {
                break;
            }
            out.push(t);
            self.pos += 1;
        }
        out
    }

    fn rest(&mut self) -> Vec<&'a Tok> {
        let out = self.line.toks[self.pos..].iter().collect();
        self.pos = self.line.toks.len();
        out
    }

    fn done(&self) -> Result<()> {
        match self.peek() {
            Some(t) => Err(self.err_at(t.col, format!("unexpected {:?}", t.text))),
            None => Ok(()),
        }
    }

    fn keyword(&self) -> &'a str {
        &self.line.toks[0].text
    }
}

fn cat_ref(c: &mut Cursor) -> Result<CatRef> {
    let t = c.next("category reference")?;
    if t.text == "shift" {
        let j = c.int("shift amount")?;
        return Ok(CatRef::Shift(j, Box::new(cat_ref(c)?)));
    }
    Ok(CatRef::Path(t.text.clone()))
}

fn bim_ref(c: &mut Cursor) -> Result<BimRef> {
    let t = c.next("bimodule reference")?;
    Ok(match t.text.as_str() {
        "diag" => BimRef::Diag(cat_ref(c)?),
        "zero" => BimRef::Zero(cat_ref(c)?),
        "dual" => BimRef::Dual(Box::new(bim_ref(c)?)),
        "shift" => {
            let j = c.int("shift amount")?;
            BimRef::Shift(j, Box::new(bim_ref(c)?))
        }
        "pullback" => {
            let f = c.next("functor path")?.text.clone();
            BimRef::Pullback(f, Box::new(bim_ref(c)?))
        }
        _ => BimRef::Path(t.text.clone()),
    })
}

/// Parses a `(text)` bimodule reference given on the command line.
pub fn parse_bim_ref(text: &str) -> std::result::Result<BimRef, String> {
    let lines = lex(&format!("ref {text}"));
    let line = lines.first().ok_or("empty reference")?;
    let mut c = Cursor::new(Path::new("<argument>"), line);
    let r = bim_ref(&mut c).map_err(|e| e.msg)?;
    c.done().map_err(|e| e.msg)?;
    Ok(r)
}

// ---------------------------------------------------------------------------
// loading

/// Loads spec files and the files they refer to, caching by path.
#[derive(Default)]
pub struct Loader {
    cache: HashMap<PathBuf, Document>,
    active: Vec<PathBuf>,
}

fn index_of(labels: &[String], text: &str) -> Option<u32> {
    labels.iter().position(|l| l == text).map(|i| i as u32)
}

fn vector(c: &Cursor, t: &Tok, space: &HomSpace) -> Result<BitVec> {
    let mut v = BitVec::zeros(space.dim());
    if t.text == "0" {
        return Ok(v);
    }
    for part in t.text.split('+') {
        let i = index_of(&space.labels, part).ok_or_else(|| c.err_at(t.col, format!("{part:?} is not a basis label of the output space")))?;
        v.flip(i as usize);
    }
    Ok(v)
}

fn emit_vector(v: &BitVec, space: &HomSpace) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.ones().map(|i| space.labels[i].as_str()).collect::<Vec<_>>().join("+")
}

fn objects(c: &Cursor, cat: &Category, toks: &[&Tok]) -> Result<Vec<u32>> {
    toks.iter().map(|t| cat.object_index(&t.text).ok_or_else(|| c.err_at(t.col, format!("unknown object {:?} of {}", t.text, cat.name)))).collect()
}

fn elements(c: &Cursor, cat: &Category, path: &[u32], toks: &[&Tok]) -> Result<Vec<u32>> {
    if toks.len() + 1 != path.len() {
        let col = toks.first().map_or(c.line.toks[0].col, |t| t.col);
        return Err(c.err_at(col, format!("{} objects need {} inputs, found {}", path.len(), path.len().saturating_sub(1), toks.len())));
    }
    toks.iter()
        .enumerate()
        .map(|(i, t)| {
            let h = cat.hom(path[i], path[i + 1]);
            index_of(&h.labels, &t.text).ok_or_else(|| c.err_at(t.col, format!("{:?} is not in hom({}, {})", t.text, cat.objects()[path[i] as usize], cat.objects()[path[i + 1] as usize])))
        })
        .collect()
}

fn bi_word(c: &mut Cursor, m: &Bimodule) -> Result<BiWord> {
    let lo_t = c.until(";");
    c.expect(";")?;
    let ro_t = c.until(":");
    c.expect(":")?;
    let lo = objects(c, &m.left, &lo_t)?;
    let ro = objects(c, &m.right, &ro_t)?;
    if lo.is_empty() || ro.is_empty() {
        return Err(c.err("both object lists must be non-empty"));
    }
    let lb_t = c.until("[");
    let lb = elements(c, &m.left, &lo, &lb_t)?;
    c.expect("[")?;
    let zt = c.next("module element")?;
    let z = index_of(&m.space(lo[lo.len() - 1], ro[0]).labels, &zt.text).ok_or_else(|| c.err_at(zt.col, format!("{:?} is not in the module space", zt.text)))?;
    c.expect("]")?;
    let rb_t = c.until("->");
    let rb = elements(c, &m.right, &ro, &rb_t)?;
    Ok(BiWord { lo, ro, lb, z, rb })
}

fn emit_bi_word(w: &BiWord, m: &Bimodule) -> String {
    let l = &m.left;
    let r = &m.right;
    let mut s = String::new();
    for &o in &w.lo {
        write!(s, "{} ", l.objects()[o as usize]).unwrap();
    }
    s.push_str("; ");
    for &o in &w.ro {
        write!(s, "{} ", r.objects()[o as usize]).unwrap();
    }
    s.push_str(": ");
    for (i, &e) in w.lb.iter().enumerate() {
        write!(s, "{} ", l.hom(w.lo[i], w.lo[i + 1]).labels[e as usize]).unwrap();
    }
    write!(s, "[ {} ]", m.space(w.lo[w.k()], w.ro[0]).labels[w.z as usize]).unwrap();
    for (i, &e) in w.rb.iter().enumerate() {
        write!(s, " {}", r.hom(w.ro[i], w.ro[i + 1]).labels[e as usize]).unwrap();
    }
    s
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(&mut self, path: &Path) -> Result<Document> {
        let key = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if let Some(d) = self.cache.get(&key) {
            return Ok(d.clone());
        }
        if self.active.contains(&key) {
            return Err(InputError { file: path.to_path_buf(), line: 1, col: 1, msg: "reference cycle".into() });
        }
        let src = fs::read_to_string(path).map_err(|e| InputError { file: path.to_path_buf(), line: 0, col: 0, msg: format!("cannot read: {e}") })?;
        self.active.push(key.clone());
        let doc = self.parse(path, &src);
        self.active.pop();
        let doc = doc?;
        self.cache.insert(key, doc.clone());
        Ok(doc)
    }

    fn rel(&self, base: &Path, p: &str) -> PathBuf {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }

    pub fn category(&mut self, base: &Path, r: &CatRef) -> std::result::Result<Arc<Category>, String> {
        match r {
            CatRef::Path(p) => match self.load(&self.rel(base, p)).map_err(|e| e.to_string())? {
                Document::Category(c) => Ok(c),
                d => Err(format!("{p} is a {}, not a category", d.kind())),
            },
            CatRef::Shift(j, inner) => {
                let c = self.category(base, inner)?;
                c.suspend(*j).map(Arc::new).map_err(|e| e.to_string())
            }
        }
    }

    pub fn functor(&mut self, base: &Path, p: &str) -> std::result::Result<Arc<Functor>, String> {
        match self.load(&self.rel(base, p)).map_err(|e| e.to_string())? {
            Document::Functor(f) => Ok(f.functor),
            d => Err(format!("{p} is a {}, not a functor", d.kind())),
        }
    }

    pub fn bimodule(&mut self, base: &Path, r: &BimRef) -> std::result::Result<Arc<Bimodule>, String> {
        Ok(Arc::new(match r {
            BimRef::Path(p) => match self.load(&self.rel(base, p)).map_err(|e| e.to_string())? {
                Document::Bimodule(b) => return Ok(b.bimodule),
                d => return Err(format!("{p} is a {}, not a bimodule", d.kind())),
            },
            BimRef::Diag(c) => Bimodule::diagonal(self.category(base, c)?),
            BimRef::Zero(c) => {
                let c = self.category(base, c)?;
                let n = c.num_objects();
                Bimodule::new(&format!("0_{}", c.name), c.clone(), c, Shape::Bi, vec![vec![HomSpace::zero(); n]; n], 0)
            }
            BimRef::Dual(inner) => self.bimodule(base, inner)?.dual(),
            BimRef::Shift(j, inner) => self.bimodule(base, inner)?.suspend(*j).map_err(|e| e.to_string())?,
            BimRef::Pullback(fp, inner) => {
                let f = self.functor(base, fp)?;
                let m = self.bimodule(base, inner)?;
                let m = if m.left != f.target || m.right != f.target { m.rebase(f.target.clone(), f.target.clone()).map_err(|e| e.to_string())? } else { (*m).clone() };
                m.pullback(Some(&f), Some(&f)).map_err(|e| e.to_string())?
            }
        }))
    }

    fn parse(&mut self, file: &Path, src: &str) -> Result<Document> {
        let lines = lex(src);
        let first = lines.first().ok_or_else(|| InputError { file: file.to_path_buf(), line: 1, col: 1, msg: "empty file".into() })?;
        let mut c = Cursor::new(file, first);
        if c.keyword() != "kind" {
            return Err(c.err_at(first.toks[0].col, "file must start with `kind`"));
        }
        let kind = c.next("entity kind")?.text.clone();
        c.done()?;
        let body = &lines[1..];
        match kind.as_str() {
            "category" => self.parse_category(file, body).map(|c| Document::Category(Arc::new(c))),
            "functor" => self.parse_functor(file, body).map(Document::Functor),
            "bimodule" => self.parse_bimodule(file, body).map(Document::Bimodule),
            "morphism" => self.parse_morphism(file, body).map(Document::Morphism),
            "form" => self.parse_form(file, body).map(Document::Form),
            k => Err(Cursor::new(file, first).err_at(first.toks[1].col, format!("unknown kind {k:?}"))),
        }
    }

    fn parse_category(&mut self, file: &Path, body: &[Line]) -> Result<Category> {
        let mut name = None;
        let mut mode = None;
        let mut degree = None;
        let mut bound = None;
        let mut objs: Option<Vec<String>> = None;
        let mut homs: Vec<(&Line, String, String, Vec<(String, i64)>)> = Vec::new();
        let mut mus: Vec<&Line> = Vec::new();
        for line in body {
            let mut c = Cursor::new(file, line);
            match c.keyword() {
                "name" => name = Some(c.next("name")?.text.clone()),
                "mode" => {
                    let t = c.next("mode")?;
                    mode = Some(match t.text.as_str() {
                        "graded" => true,
                        "ungraded" => false,
                        _ => return Err(c.err_at(t.col, "mode is `graded` or `ungraded`")),
                    })
                }
                "degree" => degree = Some(c.int("degree")?),
                "arity_bound" => bound = Some(c.int("arity bound")?),
                "objects" => objs = Some(c.rest().iter().map(|t| t.text.clone()).collect()),
                "hom" => {
                    let x = c.next("object")?.text.clone();
                    let y = c.next("object")?.text.clone();
                    c.expect(":")?;
                    let graded = mode.ok_or_else(|| c.err("`mode` must precede `hom`"))?;
                    let mut basis = Vec::new();
                    for t in c.rest() {
                        let (l, d) = match t.text.split_once('@') {
                            Some((l, d)) if graded => (l.to_string(), d.parse().map_err(|_| c.err_at(t.col, format!("bad degree in {:?}", t.text)))?),
                            Some(_) => return Err(c.err_at(t.col, "ungraded basis elements carry no degree")),
                            None if graded => return Err(c.err_at(t.col, format!("graded basis element {:?} needs @degree", t.text))),
                            None => (t.text.clone(), 0),
                        };
                        if l == "0" || l.contains(['+', ';', ':', '[', ']']) || basis.iter().any(|(b, _)| *b == l) {
                            return Err(c.err_at(t.col, format!("bad or repeated basis label {l:?}")));
                        }
                        basis.push((l, d));
                    }
                    homs.push((line, x, y, basis));
                    continue;
                }
                "mu" => {
                    mus.push(line);
                    continue;
                }
                k => return Err(c.err_at(line.toks[0].col, format!("unknown category field {k:?}"))),
            }
            c.done()?;
        }
        let missing = |what: &str| InputError { file: file.to_path_buf(), line: body.last().map_or(1, |l| l.no), col: 1, msg: format!("missing `{what}`") };
        let graded = mode.ok_or_else(|| missing("mode"))?;
        let objs = objs.ok_or_else(|| missing("objects"))?;
        let degree = if graded { Some(degree.ok_or_else(|| missing("degree"))?) } else { None };
        let n = objs.len();
        let obj_refs: Vec<&str> = objs.iter().map(String::as_str).collect();
        let mut table = vec![vec![HomSpace::zero(); n]; n];
        for (line, x, y, basis) in homs {
            let c = Cursor::new(file, line);
            let ix = obj_refs.iter().position(|o| *o == x).ok_or_else(|| c.err_at(line.toks[1].col, format!("unknown object {x:?}")))?;
            let iy = obj_refs.iter().position(|o| *o == y).ok_or_else(|| c.err_at(line.toks[2].col, format!("unknown object {y:?}")))?;
            let labels: Vec<&str> = basis.iter().map(|(l, _)| l.as_str()).collect();
            let degs: Vec<i64> = basis.iter().map(|(_, d)| *d).collect();
            table[ix][iy] = HomSpace::new(&labels, &degs);
        }
        let bound = bound.ok_or_else(|| missing("arity_bound"))?;
        let mut cat = Category::new(&name.ok_or_else(|| missing("name"))?, degree, &obj_refs, table, bound.max(0) as usize);
        for line in mus {
            let mut c = Cursor::new(file, line);
            let ot = c.until(":");
            c.expect(":")?;
            let path = objects(&c, &cat, &ot)?;
            let et = c.until("->");
            let elems = elements(&c, &cat, &path, &et)?;
            c.expect("->")?;
            let out_t = c.next("output vector")?;
            let v = vector(&c, out_t, cat.hom(path[0], path[path.len() - 1]))?;
            c.done()?;
            cat.set_mu(&path, &elems, v).map_err(|e| c.err_at(line.toks[0].col, e.to_string()))?;
        }
        Ok(cat)
    }

    fn parse_functor(&mut self, file: &Path, body: &[Line]) -> Result<FunctorDoc> {
        let mut name = None;
        let mut src_ref = None;
        let mut tgt_ref = None;
        let mut bound = None;
        let mut maps: Vec<&Line> = Vec::new();
        let mut comps: Vec<&Line> = Vec::new();
        for line in body {
            let mut c = Cursor::new(file, line);
            match c.keyword() {
                "name" => name = Some(c.next("name")?.text.clone()),
                "source" => src_ref = Some(cat_ref(&mut c)?),
                "target" => tgt_ref = Some(cat_ref(&mut c)?),
                "arity_bound" => bound = Some(c.int("arity bound")?),
                "map" => {
                    maps.push(line);
                    continue;
                }
                "f" => {
                    comps.push(line);
                    continue;
                }
                k => return Err(c.err_at(line.toks[0].col, format!("unknown functor field {k:?}"))),
            }
            c.done()?;
        }
        let missing = |what: &str| InputError { file: file.to_path_buf(), line: body.last().map_or(1, |l| l.no), col: 1, msg: format!("missing `{what}`") };
        let (sr, tr) = (src_ref.ok_or_else(|| missing("source"))?, tgt_ref.ok_or_else(|| missing("target"))?);
        let head = body.first().map_or(1, |l| l.no);
        let ref_err = |msg: String| InputError { file: file.to_path_buf(), line: head, col: 1, msg };
        let source = self.category(file, &sr).map_err(ref_err)?;
        let target = self.category(file, &tr).map_err(ref_err)?;
        let mut obj_map = vec![u32::MAX; source.num_objects()];
        for line in maps {
            let mut c = Cursor::new(file, line);
            let a = c.next("source object")?;
            let b = c.next("target object")?;
            c.done()?;
            let ia = source.object_index(&a.text).ok_or_else(|| c.err_at(a.col, format!("unknown object {:?}", a.text)))?;
            let ib = target.object_index(&b.text).ok_or_else(|| c.err_at(b.col, format!("unknown object {:?}", b.text)))?;
            obj_map[ia as usize] = ib;
        }
        if let Some(i) = obj_map.iter().position(|&o| o == u32::MAX) {
            return Err(missing(&format!("map {}", source.objects()[i])));
        }
        let name = name.ok_or_else(|| missing("name"))?;
        let bound = bound.ok_or_else(|| missing("arity_bound"))?;
        let mut f = Functor::new(&name, source.clone(), target.clone(), obj_map, bound.max(0) as usize).map_err(|e| missing(&e.to_string()))?;
        for line in comps {
            let mut c = Cursor::new(file, line);
            let ot = c.until(":");
            c.expect(":")?;
            let path = objects(&c, &source, &ot)?;
            let et = c.until("->");
            let elems = elements(&c, &source, &path, &et)?;
            c.expect("->")?;
            let out_t = c.next("output vector")?;
            let v = vector(&c, out_t, target.hom(f.obj(path[0]), f.obj(path[path.len() - 1])))?;
            c.done()?;
            f.set(&path, &elems, v).map_err(|e| c.err_at(line.toks[0].col, e.to_string()))?;
        }
        Ok(FunctorDoc { source: sr, target: tr, functor: Arc::new(f) })
    }

    fn parse_bimodule(&mut self, file: &Path, body: &[Line]) -> Result<BimoduleDoc> {
        let mut name = None;
        let mut left = None;
        let mut right = None;
        let mut shape = None;
        let mut bound = None;
        let mut spaces: Vec<&Line> = Vec::new();
        let mut mus: Vec<&Line> = Vec::new();
        for line in body {
            let mut c = Cursor::new(file, line);
            match c.keyword() {
                "name" => name = Some(c.next("name")?.text.clone()),
                "left" => left = Some(cat_ref(&mut c)?),
                "right" => right = Some(cat_ref(&mut c)?),
                "shape" => {
                    let t = c.next("shape")?;
                    shape = Some(match t.text.as_str() {
                        "bi" => Shape::Bi,
                        "left" => Shape::Left,
                        "right" => Shape::Right,
                        _ => return Err(c.err_at(t.col, "shape is `bi`, `left` or `right`")),
                    })
                }
                "arity_bound" => bound = Some(c.int("arity bound")?),
                "space" => {
                    spaces.push(line);
                    continue;
                }
                "mu" => {
                    mus.push(line);
                    continue;
                }
                k => return Err(c.err_at(line.toks[0].col, format!("unknown bimodule field {k:?}"))),
            }
            c.done()?;
        }
        let missing = |what: &str| InputError { file: file.to_path_buf(), line: body.last().map_or(1, |l| l.no), col: 1, msg: format!("missing `{what}`") };
        let shape = shape.ok_or_else(|| missing("shape"))?;
        let head = body.first().map_or(1, |l| l.no);
        let ref_err = |msg: String| InputError { file: file.to_path_buf(), line: head, col: 1, msg };
        let lc = match (&left, shape) {
            (Some(r), _) => Some(self.category(file, r).map_err(ref_err)?),
            (None, Shape::Right) => None,
            (None, _) => return Err(missing("left")),
        };
        let rc = match (&right, shape) {
            (Some(r), _) => Some(self.category(file, r).map_err(ref_err)?),
            (None, Shape::Left) => None,
            (None, _) => return Err(missing("right")),
        };
        let name = name.ok_or_else(|| missing("name"))?;
        let bound = bound.ok_or_else(|| missing("arity_bound"))?.max(0) as usize;
        let graded = lc.as_ref().or(rc.as_ref()).map_or(false, |c| c.is_graded());
        let ground = Arc::new(Category::ground(graded));
        let (lcat, rcat) = (lc.unwrap_or_else(|| ground.clone()), rc.unwrap_or(ground));
        let (nl, nr) = (lcat.num_objects(), rcat.num_objects());
        let mut table = vec![vec![HomSpace::zero(); nr]; nl];
        for line in spaces {
            let mut c = Cursor::new(file, line);
            let x = c.next("object")?;
            let y = c.next("object")?;
            c.expect(":")?;
            let ix = lcat.object_index(&x.text).ok_or_else(|| c.err_at(x.col, format!("unknown object {:?}", x.text)))?;
            let iy = rcat.object_index(&y.text).ok_or_else(|| c.err_at(y.col, format!("unknown object {:?}", y.text)))?;
            let mut labels = Vec::new();
            let mut degs = Vec::new();
            for t in c.rest() {
                let (l, d) = match t.text.split_once('@') {
                    Some((l, d)) if graded => (l.to_string(), d.parse().map_err(|_| c.err_at(t.col, "bad degree"))?),
                    None if !graded => (t.text.clone(), 0),
                    _ => return Err(c.err_at(t.col, "degree annotation does not match the grading mode")),
                };
                if l == "0" || labels.contains(&l) {
                    return Err(c.err_at(t.col, format!("bad or repeated basis label {l:?}")));
                }
                labels.push(l);
                degs.push(d);
            }
            table[ix as usize][iy as usize] = HomSpace { labels, degrees: degs };
        }
        let mut m = Bimodule::new(&name, lcat, rcat, shape, table, bound);
        for line in mus {
            let mut c = Cursor::new(file, line);
            let w = bi_word(&mut c, &m)?;
            c.expect("->")?;
            let out_t = c.next("output vector")?;
            let (x, y) = w.output_objects();
            let v = vector(&c, out_t, m.space(x, y))?;
            c.done()?;
            m.set_mu(&w, v).map_err(|e| c.err_at(line.toks[0].col, e.to_string()))?;
        }
        Ok(BimoduleDoc { left, right, bimodule: Arc::new(m) })
    }

    fn parse_morphism(&mut self, file: &Path, body: &[Line]) -> Result<MorphismDoc> {
        let mut name = None;
        let mut src_ref = None;
        let mut tgt_ref = None;
        let mut bound = None;
        let mut comps: Vec<&Line> = Vec::new();
        for line in body {
            let mut c = Cursor::new(file, line);
            match c.keyword() {
                "name" => name = Some(c.next("name")?.text.clone()),
                "source" => src_ref = Some(bim_ref(&mut c)?),
                "target" => tgt_ref = Some(bim_ref(&mut c)?),
                "bound" => {
                    let t = c.next("bound")?;
                    bound = Some(if t.text == "exact" { EXACT } else { t.text.parse().map_err(|_| c.err_at(t.col, "bound is `exact` or a number"))? });
                }
                "c" => {
                    comps.push(line);
                    continue;
                }
                k => return Err(c.err_at(line.toks[0].col, format!("unknown morphism field {k:?}"))),
            }
            c.done()?;
        }
        let missing = |what: &str| InputError { file: file.to_path_buf(), line: body.last().map_or(1, |l| l.no), col: 1, msg: format!("missing `{what}`") };
        let (sr, tr) = (src_ref.ok_or_else(|| missing("source"))?, tgt_ref.ok_or_else(|| missing("target"))?);
        let head = body.first().map_or(1, |l| l.no);
        let ref_err = |msg: String| InputError { file: file.to_path_buf(), line: head, col: 1, msg };
        let s = self.bimodule(file, &sr).map_err(ref_err)?;
        let t = self.bimodule(file, &tr).map_err(ref_err)?;
        let mut nu = PreMorphism::zero(s.clone(), t.clone(), bound.unwrap_or(EXACT)).map_err(|e| ref_err(e.to_string()))?;
        for line in comps {
            let mut c = Cursor::new(file, line);
            let w = bi_word(&mut c, &s)?;
            c.expect("->")?;
            let out_t = c.next("output vector")?;
            let (x, y) = w.output_objects();
            let v = vector(&c, out_t, t.space(x, y))?;
            c.done()?;
            if w.arity() >= nu.bound {
                return Err(c.err_at(line.toks[0].col, "component beyond the declared bound"));
            }
            nu.add_component(&w, &v);
        }
        Ok(MorphismDoc { name: name.ok_or_else(|| missing("name"))?, source: sr, target: tr, morphism: nu })
    }

    fn parse_form(&mut self, file: &Path, body: &[Line]) -> Result<FormDoc> {
        let mut name = None;
        let mut cref = None;
        let mut mref = None;
        let mut words: Vec<&Line> = Vec::new();
        for line in body {
            let mut c = Cursor::new(file, line);
            match c.keyword() {
                "name" => name = Some(c.next("name")?.text.clone()),
                "category" => cref = Some(cat_ref(&mut c)?),
                "coefficients" => mref = Some(bim_ref(&mut c)?),
                "w" => {
                    words.push(line);
                    continue;
                }
                k => return Err(c.err_at(line.toks[0].col, format!("unknown form field {k:?}"))),
            }
            c.done()?;
        }
        let missing = |what: &str| InputError { file: file.to_path_buf(), line: body.last().map_or(1, |l| l.no), col: 1, msg: format!("missing `{what}`") };
        let cr = cref.ok_or_else(|| missing("category"))?;
        let mr = mref.unwrap_or_else(|| BimRef::Diag(cr.clone()));
        let head = body.first().map_or(1, |l| l.no);
        let ref_err = |msg: String| InputError { file: file.to_path_buf(), line: head, col: 1, msg };
        let a = self.category(file, &cr).map_err(ref_err)?;
        let m = self.bimodule(file, &mr).map_err(ref_err)?;
        if m.left != a || m.right != a {
            return Err(ref_err("coefficients do not live over the category".into()));
        }
        let mut keys = Vec::new();
        for line in words {
            let mut c = Cursor::new(file, line);
            let ot = c.until(":");
            c.expect(":")?;
            let path = objects(&c, &a, &ot)?;
            if path.is_empty() {
                return Err(c.err("empty path"));
            }
            let et = c.until("[");
            let elems = elements(&c, &a, &path, &et)?;
            c.expect("[")?;
            let wt = c.next("coefficient element")?;
            let sp = m.space(path[path.len() - 1], path[0]);
            let w = index_of(&sp.labels, &wt.text).ok_or_else(|| c.err_at(wt.col, format!("{:?} is not in the coefficient space", wt.text)))?;
            c.expect("]")?;
            c.done()?;
            keys.push(chain_key(&path, &elems, w));
        }
        Ok(FormDoc { name: name.ok_or_else(|| missing("name"))?, category: cr, coefficients: mr, resolved_category: a, resolved_coefficients: m, sigma: ChainFunctional::new(keys) })
    }
}

// ---------------------------------------------------------------------------
// emission

pub fn emit_category(c: &Category) -> String {
    let mut s = String::from("kind category\n");
    writeln!(s, "name {}", c.name).unwrap();
    match c.degree {
        Some(n) => writeln!(s, "mode graded\ndegree {n}").unwrap(),
        None => s.push_str("mode ungraded\n"),
    }
    writeln!(s, "arity_bound {}", c.arity_bound()).unwrap();
    writeln!(s, "objects {}", c.objects().join(" ")).unwrap();
    let n = c.num_objects() as u32;
    for x in 0..n {
        for y in 0..n {
            let h = c.hom(x, y);
            if h.dim() == 0 {
                continue;
            }
            write!(s, "hom {} {} :", c.objects()[x as usize], c.objects()[y as usize]).unwrap();
            for (l, d) in h.labels.iter().zip(&h.degrees) {
                if c.is_graded() {
                    write!(s, " {l}@{d}").unwrap();
                } else {
                    write!(s, " {l}").unwrap();
                }
            }
            s.push('\n');
        }
    }
    for (key, v) in by_arity(c.mu_tensor()) {
        if v.is_zero() {
            continue;
        }
        let k = (key.len() - 1) / 2;
        let (p, e) = key.split_at(k + 1);
        let objs: Vec<&str> = p.iter().map(|&o| c.objects()[o as usize].as_str()).collect();
        let ins: Vec<&str> = e.iter().enumerate().map(|(i, &b)| c.hom(p[i], p[i + 1]).labels[b as usize].as_str()).collect();
        writeln!(s, "mu {} : {} -> {}", objs.join(" "), ins.join(" "), emit_vector(v, c.hom(p[0], p[k]))).unwrap();
    }
    s
}

pub fn emit_functor(d: &FunctorDoc) -> String {
    let f = &d.functor;
    let mut s = String::from("kind functor\n");
    writeln!(s, "name {}\nsource {}\ntarget {}\narity_bound {}", f.name, d.source, d.target, f.arity_bound()).unwrap();
    for (x, &y) in f.obj_map().iter().enumerate() {
        writeln!(s, "map {} {}", f.source.objects()[x], f.target.objects()[y as usize]).unwrap();
    }
    for (key, v) in by_arity(f.components()) {
        if v.is_zero() {
            continue;
        }
        let k = (key.len() - 1) / 2;
        let (p, e) = key.split_at(k + 1);
        let objs: Vec<&str> = p.iter().map(|&o| f.source.objects()[o as usize].as_str()).collect();
        let ins: Vec<&str> = e.iter().enumerate().map(|(i, &b)| f.source.hom(p[i], p[i + 1]).labels[b as usize].as_str()).collect();
        writeln!(s, "f {} : {} -> {}", objs.join(" "), ins.join(" "), emit_vector(v, f.target.hom(f.obj(p[0]), f.obj(p[k])))).unwrap();
    }
    s
}

pub fn emit_bimodule(d: &BimoduleDoc) -> String {
    let m = &d.bimodule;
    let mut s = String::from("kind bimodule\n");
    writeln!(s, "name {}", m.name).unwrap();
    if let Some(l) = &d.left {
        writeln!(s, "left {l}").unwrap();
    }
    if let Some(r) = &d.right {
        writeln!(s, "right {r}").unwrap();
    }
    let shape = match m.shape {
        Shape::Bi => "bi",
        Shape::Left => "left",
        Shape::Right => "right",
    };
    writeln!(s, "shape {shape}\narity_bound {}", m.arity_bound()).unwrap();
    for x in 0..m.left.num_objects() as u32 {
        for y in 0..m.right.num_objects() as u32 {
            let sp = m.space(x, y);
            if sp.dim() == 0 {
                continue;
            }
            write!(s, "space {} {} :", m.left.objects()[x as usize], m.right.objects()[y as usize]).unwrap();
            for (l, dg) in sp.labels.iter().zip(&sp.degrees) {
                if m.is_graded() {
                    write!(s, " {l}@{dg}").unwrap();
                } else {
                    write!(s, " {l}").unwrap();
                }
            }
            s.push('\n');
        }
    }
    for (key, v) in m.mu_tensor().sorted() {
        if v.is_zero() {
            continue;
        }
        let w = BiWord::from_key(key);
        let (x, y) = w.output_objects();
        writeln!(s, "mu {} -> {}", emit_bi_word(&w, m), emit_vector(v, m.space(x, y))).unwrap();
    }
    s
}

pub fn emit_morphism(d: &MorphismDoc) -> String {
    let nu = &d.morphism;
    let mut s = String::from("kind morphism\n");
    writeln!(s, "name {}\nsource {}\ntarget {}", d.name, d.source, d.target).unwrap();
    if nu.bound == EXACT {
        s.push_str("bound exact\n");
    } else {
        writeln!(s, "bound {}", nu.bound).unwrap();
    }
    for (key, v) in nu.components().sorted() {
        if v.is_zero() {
            continue;
        }
        let w = BiWord::from_key(key);
        let (x, y) = w.output_objects();
        writeln!(s, "c {} -> {}", emit_bi_word(&w, &nu.source), emit_vector(v, nu.target.space(x, y))).unwrap();
    }
    s
}

pub fn emit_form(d: &FormDoc) -> String {
    let a = &d.resolved_category;
    let m = &d.resolved_coefficients;
    let mut s = String::from("kind form\n");
    writeln!(s, "name {}\ncategory {}\ncoefficients {}", d.name, d.category, d.coefficients).unwrap();
    for key in &d.sigma.support {
        let (p, e, w) = split_chain_key(key);
        let objs: Vec<&str> = p.iter().map(|&o| a.objects()[o as usize].as_str()).collect();
        let mut line = format!("w {} :", objs.join(" "));
        for (i, &b) in e.iter().enumerate() {
            write!(line, " {}", a.hom(p[i], p[i + 1]).labels[b as usize]).unwrap();
        }
        write!(line, " [ {} ]", m.space(p[p.len() - 1], p[0]).labels[w as usize]).unwrap();
        s.push_str(&line);
        s.push('\n');
    }
    s
}

pub fn emit(d: &Document) -> String {
    match d {
        Document::Category(c) => emit_category(c),
        Document::Functor(f) => emit_functor(f),
        Document::Bimodule(b) => emit_bimodule(b),
        Document::Morphism(m) => emit_morphism(m),
        Document::Form(f) => emit_form(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexer_tracks_columns_and_comments() {
        let ls = lex("kind category  # c\n\n  mu X X : a b -> 0\n# only comment\n");
        assert_eq!(ls.len(), 2);
        assert_eq!(ls[0].toks.len(), 2);
        assert_eq!(ls[1].no, 3);
        assert_eq!(ls[1].toks[0].col, 3);
        assert_eq!(ls[1].toks[1].col, 6);
    }

    #[test]
    fn trailing_comment_glued_to_token() {
        let ls = lex("name abc#tail\n");
        assert_eq!(ls[0].toks.iter().map(|t| t.text.as_str()).collect::<Vec<_>>(), ["name", "abc#tail"]);
    }

    #[test]
    fn refs_print_and_parse() {
        let r = parse_bim_ref("pullback I.fun shift -1 rel.bim").unwrap();
        assert_eq!(r.to_string(), "pullback I.fun shift -1 rel.bim");
        assert_eq!(parse_bim_ref("dual diag shift 1 a.cat").unwrap().to_string(), "dual diag shift 1 a.cat");
        assert!(parse_bim_ref("shift x a").is_err());
    }
}

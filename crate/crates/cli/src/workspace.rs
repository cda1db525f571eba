//! Resolving a [`Document`] into checked objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use rlsheaf_core::basechange::{pullback_rl_etale, RleInvMorphism, RleSpace};
use rlsheaf_core::bundle::{Bundle, RlBundle};
use rlsheaf_core::fintop::{FiniteSpace, Space, SpaceMap};
use rlsheaf_core::fixtures::renamed;
use rlsheaf_core::rlcore::{ResiduatedLattice, Rl, RlBuilder, RlMorphism};
use thiserror::Error;

use crate::doc::{BundleDoc, Document, Expectations, LatticeDoc, MapDoc, RleMorphismDoc, SpaceDoc, StalkDoc};

/// The bundled example corpus.
pub const BUILTIN: &str = include_str!("../fixtures/examples.json");

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{path}: unknown reference `{key}`")]
    Reference { path: String, key: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl LoadError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LoadError::Invalid { .. } => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LoadError::Syntax(_) => "syntax",
            LoadError::Reference { .. } => "reference",
            LoadError::Invalid { .. } => "validation",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// The first invalid object is an error.
    #[default]
    Strict,
    /// Invalid objects are dropped and recorded as diagnostics.
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct NamedMap {
    pub dom: String,
    pub cod: String,
    pub map: SpaceMap,
}

#[derive(Clone, Debug)]
pub struct NamedMorphism {
    pub dom: String,
    pub cod: String,
    pub morphism: RlMorphism,
}

#[derive(Clone, Debug)]
pub struct NamedBundle {
    pub total: String,
    pub base: String,
    pub bundle: Bundle,
    pub rl: Option<RlBundle>,
    stalks: Option<BTreeMap<String, StalkDoc>>,
}

#[derive(Clone, Debug)]
pub struct NamedRle {
    pub src: String,
    pub dst: String,
    pub map: String,
    pub morphism: RleInvMorphism,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub lattices: BTreeMap<String, Rl>,
    pub spaces: BTreeMap<String, Space>,
    pub maps: BTreeMap<String, NamedMap>,
    pub morphisms: BTreeMap<String, NamedMorphism>,
    pub bundles: BTreeMap<String, NamedBundle>,
    pub rle_morphisms: BTreeMap<String, NamedRle>,
    pub expect: Expectations,
    pub diagnostics: Vec<Diagnostic>,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        let bundles = self.bundles.len() == other.bundles.len()
            && self.bundles.iter().zip(&other.bundles).all(|((n, a), (m, b))| {
                n == m && a.total == b.total && a.base == b.base && a.bundle == b.bundle && a.stalks == b.stalks
            });
        let maps = self.maps.len() == other.maps.len()
            && self
                .maps
                .iter()
                .zip(&other.maps)
                .all(|((n, a), (m, b))| n == m && a.map == b.map);
        let morphisms = self.morphisms.len() == other.morphisms.len()
            && self
                .morphisms
                .iter()
                .zip(&other.morphisms)
                .all(|((n, a), (m, b))| n == m && a.morphism == b.morphism);
        let rles = self.rle_morphisms.len() == other.rle_morphisms.len()
            && self
                .rle_morphisms
                .iter()
                .zip(&other.rle_morphisms)
                .all(|((n, a), (m, b))| n == m && a.morphism == b.morphism);
        self.lattices == other.lattices
            && self.spaces == other.spaces
            && maps
            && morphisms
            && bundles
            && rles
            && self.expect == other.expect
            && self.diagnostics == other.diagnostics
    }
}

pub fn parse_document(text: &str) -> Result<Document, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Syntax(e.to_string()))
}

pub fn parse_workspace(text: &str, mode: Mode) -> Result<Workspace, LoadError> {
    load(&parse_document(text)?, mode)
}

/// The bundled corpus, loaded strictly.
pub fn builtin() -> Workspace {
    parse_workspace(BUILTIN, Mode::Strict).expect("bundled corpus loads")
}

fn reference(path: impl Into<String>, key: &str) -> LoadError {
    LoadError::Reference {
        path: path.into(),
        key: key.to_string(),
    }
}

fn invalid(path: impl Into<String>, message: impl ToString) -> LoadError {
    LoadError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

fn lookup<'a, T>(reg: &'a BTreeMap<String, T>, key: &str, path: String) -> Result<&'a T, LoadError> {
    reg.get(key).ok_or_else(|| reference(path, key))
}

struct Loader {
    mode: Mode,
    ws: Workspace,
}

impl Loader {
    /// Keeps `Ok`, turns a validation failure into a diagnostic in lenient mode.
    fn keep<T>(&mut self, r: Result<T, LoadError>) -> Result<Option<T>, LoadError> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(LoadError::Invalid { path, message }) if self.mode == Mode::Lenient => {
                self.ws.diagnostics.push(Diagnostic { path, message });
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

pub fn load(doc: &Document, mode: Mode) -> Result<Workspace, LoadError> {
    let mut ld = Loader {
        mode,
        ws: Workspace::default(),
    };
    for (name, l) in &doc.lattices {
        if let Some(v) = ld.keep(lattice(name, l))? {
            ld.ws.lattices.insert(name.clone(), v);
        }
    }
    for (name, s) in &doc.spaces {
        if let Some(v) = ld.keep(space(name, s))? {
            ld.ws.spaces.insert(name.clone(), v);
        }
    }
    for (name, m) in &doc.maps {
        let r = space_map(&ld.ws, &doc.spaces, name, m);
        if let Some(v) = ld.keep(r)? {
            ld.ws.maps.insert(name.clone(), v);
        }
    }
    for (name, m) in &doc.morphisms {
        let r = morphism(&ld.ws, &doc.lattices, name, m);
        if let Some(v) = ld.keep(r)? {
            ld.ws.morphisms.insert(name.clone(), v);
        }
    }
    for (name, b) in &doc.bundles {
        let r = bundle(&ld.ws, doc, name, b);
        if let Some(v) = ld.keep(r)? {
            ld.ws.bundles.insert(name.clone(), v);
        }
    }
    for (name, m) in &doc.rle_morphisms {
        let r = rle_morphism(&ld.ws, doc, name, m);
        if let Some(v) = ld.keep(r)? {
            ld.ws.rle_morphisms.insert(name.clone(), v);
        }
    }
    check_expectation_refs(doc)?;
    ld.ws.expect = doc.expect.clone();
    Ok(ld.ws)
}

/// Looks a name up among loaded objects; a name that exists in the document
/// but failed to load is invalid rather than dangling.
fn resolve<'a, T, D>(
    loaded: &'a BTreeMap<String, T>,
    declared: &BTreeMap<String, D>,
    key: &str,
    path: String,
) -> Result<&'a T, LoadError> {
    match loaded.get(key) {
        Some(v) => Ok(v),
        None if declared.contains_key(key) => Err(invalid(path, format!("`{key}` did not load"))),
        None => Err(reference(path, key)),
    }
}

fn split_key(key: &str, path: &str) -> Result<(String, String), LoadError> {
    key.split_once(',')
        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
        .ok_or_else(|| invalid(format!("{path}.{key}"), "expected a key of the form \"x,y\""))
}

fn lattice(name: &str, l: &LatticeDoc) -> Result<Rl, LoadError> {
    let path = format!("lattices.{name}");
    let mut b = RlBuilder::new(&l.carrier);
    b = match (&l.hasse, &l.leq) {
        (Some(_), Some(_)) => return Err(invalid(&path, "give either hasse or leq, not both")),
        (Some(h), None) => b.hasse(h),
        (None, Some(r)) => b.leq(r),
        (None, None) => return Err(invalid(&path, "missing hasse or leq")),
    };
    for (key, z) in &l.mul {
        let (x, y) = split_key(key, &format!("{path}.mul"))?;
        b = b.mul(&x, &y, z).map_err(|e| invalid(format!("{path}.mul.{key}"), e))?;
    }
    if let Some(imp) = &l.imp {
        let entries = imp
            .iter()
            .map(|(key, z)| split_key(key, &format!("{path}.imp")).map(|(x, y)| (x, y, z.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        b = b.imp_table(&entries);
    }
    if let Some(x) = &l.bot {
        b = b.bot(x);
    }
    if let Some(x) = &l.top {
        b = b.top(x);
    }
    b.build().map(Arc::new).map_err(|e| invalid(path, e))
}

fn space(name: &str, s: &SpaceDoc) -> Result<Space, LoadError> {
    FiniteSpace::new(&s.points, &s.opens)
        .map(FiniteSpace::into_shared)
        .map_err(|e| invalid(format!("spaces.{name}"), e))
}

fn pairs(table: &BTreeMap<String, String>) -> Vec<(&str, &str)> {
    table.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn space_map(
    ws: &Workspace,
    declared: &BTreeMap<String, SpaceDoc>,
    name: &str,
    m: &MapDoc,
) -> Result<NamedMap, LoadError> {
    let path = format!("maps.{name}");
    let dom = resolve(&ws.spaces, declared, &m.dom, format!("{path}.dom"))?;
    let cod = resolve(&ws.spaces, declared, &m.cod, format!("{path}.cod"))?;
    let map = SpaceMap::from_pairs(dom.clone(), cod.clone(), &pairs(&m.table)).map_err(|e| invalid(&path, e))?;
    if let Some(x) = map.continuity_witness() {
        return Err(invalid(path, format!("not continuous at `{}`", map.dom().name(x))));
    }
    Ok(NamedMap {
        dom: m.dom.clone(),
        cod: m.cod.clone(),
        map,
    })
}

fn morphism(
    ws: &Workspace,
    declared: &BTreeMap<String, LatticeDoc>,
    name: &str,
    m: &MapDoc,
) -> Result<NamedMorphism, LoadError> {
    let path = format!("morphisms.{name}");
    let dom = resolve(&ws.lattices, declared, &m.dom, format!("{path}.dom"))?;
    let cod = resolve(&ws.lattices, declared, &m.cod, format!("{path}.cod"))?;
    let morphism = RlMorphism::from_pairs(dom.clone(), cod.clone(), &pairs(&m.table)).map_err(|e| invalid(path, e))?;
    Ok(NamedMorphism {
        dom: m.dom.clone(),
        cod: m.cod.clone(),
        morphism,
    })
}

fn bundle(ws: &Workspace, doc: &Document, name: &str, b: &BundleDoc) -> Result<NamedBundle, LoadError> {
    let path = format!("bundles.{name}");
    let total = resolve(&ws.spaces, &doc.spaces, &b.total, format!("{path}.total"))?;
    let base = resolve(&ws.spaces, &doc.spaces, &b.base, format!("{path}.base"))?;
    let proj = SpaceMap::from_pairs(total.clone(), base.clone(), &pairs(&b.proj))
        .map_err(|e| invalid(format!("{path}.proj"), e))?;
    let bundle = Bundle::new(proj).map_err(|e| invalid(format!("{path}.proj"), e))?;
    let rl = match &b.stalks {
        None => None,
        Some(stalks) => Some(rl_bundle(ws, doc, &path, &bundle, stalks)?),
    };
    Ok(NamedBundle {
        total: b.total.clone(),
        base: b.base.clone(),
        bundle,
        rl,
        stalks: b.stalks.clone(),
    })
}

fn rl_bundle(
    ws: &Workspace,
    doc: &Document,
    path: &str,
    bundle: &Bundle,
    stalks: &BTreeMap<String, StalkDoc>,
) -> Result<RlBundle, LoadError> {
    let base = bundle.base();
    let total = bundle.total();
    let mut algebras: Vec<Option<Rl>> = vec![None; base.len()];
    for (b, s) in stalks {
        let spath = format!("{path}.stalks.{b}");
        let bi = base
            .index_of(b)
            .ok_or_else(|| invalid(&spath, format!("`{b}` is not a base point")))?;
        let l = resolve(&ws.lattices, &doc.lattices, &s.lattice, format!("{spath}.lattice"))?;
        let points: Vec<&str> = bundle.stalk_points(bi).iter().map(|t| total.name(t)).collect();
        let listed: Vec<&str> = s.elements.keys().map(String::as_str).collect();
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted != listed {
            return Err(invalid(
                format!("{spath}.elements"),
                format!("keys must be the stalk points {{{}}}", sorted.join(",")),
            ));
        }
        let mut by_element: BTreeMap<&str, &str> = BTreeMap::new();
        for (t, e) in &s.elements {
            if l.index_of(e).is_none() {
                return Err(invalid(
                    format!("{spath}.elements.{t}"),
                    format!("`{e}` is not an element of {}", s.lattice),
                ));
            }
            if by_element.insert(e, t).is_some() {
                return Err(invalid(
                    format!("{spath}.elements.{t}"),
                    format!("element `{e}` used twice"),
                ));
            }
        }
        if by_element.len() != l.len() {
            return Err(invalid(
                format!("{spath}.elements"),
                format!("{} points for {} elements of {}", by_element.len(), l.len(), s.lattice),
            ));
        }
        algebras[bi] = Some(renamed(l, |e| by_element[e].to_string()));
    }
    let algebras = algebras
        .into_iter()
        .enumerate()
        .map(|(bi, a)| a.ok_or_else(|| invalid(format!("{path}.stalks"), format!("no stalk over `{}`", base.name(bi)))))
        .collect::<Result<Vec<_>, _>>()?;
    RlBundle::from_stalk_rls(bundle.clone(), &algebras).map_err(|e| invalid(format!("{path}.stalks"), e))
}

fn rle_space(ws: &Workspace, doc: &Document, key: &str, path: String) -> Result<RleSpace, LoadError> {
    let nb = resolve(&ws.bundles, &doc.bundles, key, path.clone())?;
    let rl = nb
        .rl
        .clone()
        .ok_or_else(|| invalid(&path, format!("bundle `{key}` has no stalk algebras")))?;
    RleSpace::new(rl).map_err(|e| invalid(path, e))
}

fn rle_morphism(ws: &Workspace, doc: &Document, name: &str, m: &RleMorphismDoc) -> Result<NamedRle, LoadError> {
    let path = format!("rle_morphisms.{name}");
    let src = rle_space(ws, doc, &m.src, format!("{path}.src"))?;
    let dst = rle_space(ws, doc, &m.dst, format!("{path}.dst"))?;
    let f = resolve(&ws.maps, &doc.maps, &m.map, format!("{path}.map"))?.map.clone();
    let (pb, _) = pullback_rl_etale(&f, dst.etale()).map_err(|e| invalid(format!("{path}.map"), e))?;
    let pts = pb.result().total();
    let src_total = src.bundle().total();
    let mut table = Vec::with_capacity(pts.len());
    for p in pts.points() {
        let v = m
            .alpha
            .get(p)
            .ok_or_else(|| invalid(format!("{path}.alpha"), format!("no value for `{p}`")))?;
        table.push(src_total.index_of(v).ok_or_else(|| {
            invalid(
                format!("{path}.alpha.{p}"),
                format!("`{v}` is not a point of {}", m.src),
            )
        })?);
    }
    if let Some(extra) = m.alpha.keys().find(|k| pts.index_of(k).is_none()) {
        return Err(invalid(format!("{path}.alpha.{extra}"), "not a point of the pullback"));
    }
    let morphism = RleInvMorphism::new(&src, &dst, f, table).map_err(|e| invalid(path, e))?;
    Ok(NamedRle {
        src: m.src.clone(),
        dst: m.dst.clone(),
        map: m.map.clone(),
        morphism,
    })
}

fn check_expectation_refs(doc: &Document) -> Result<(), LoadError> {
    let e = &doc.expect;
    for (what, table) in [
        ("filters", &e.filters),
        ("maximal", &e.maximal),
        ("minimal_prime", &e.minimal_prime),
    ] {
        for key in table.keys() {
            lookup(&doc.lattices, key, format!("expect.{what}"))?;
        }
    }
    for (i, s) in e.spectra.iter().enumerate() {
        lookup(&doc.lattices, &s.lattice, format!("expect.spectra[{i}].lattice"))?;
    }
    for key in e.global_sections.keys() {
        lookup(&doc.bundles, key, "expect.global_sections".into())?;
    }
    Ok(())
}

fn lattice_doc(l: &ResiduatedLattice) -> LatticeDoc {
    let n = l.len();
    let key = |x: usize, y: usize| format!("{},{}", l.name(x), l.name(y));
    let table = |f: &dyn Fn(usize, usize) -> usize| -> BTreeMap<String, String> {
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| (key(x, y), l.name(f(x, y)).to_string()))
            .collect()
    };
    LatticeDoc {
        carrier: l.elements().to_vec(),
        hasse: None,
        leq: Some(
            (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| l.leq(x, y))
                .map(|(x, y)| (l.name(x).to_string(), l.name(y).to_string()))
                .collect(),
        ),
        mul: table(&|x, y| l.mul(x, y)),
        imp: Some(table(&|x, y| l.imp(x, y))),
        bot: Some(l.name(l.bot()).to_string()),
        top: Some(l.name(l.top()).to_string()),
    }
}

fn named(pairs: Vec<(String, String)>) -> BTreeMap<String, String> {
    pairs.into_iter().collect()
}

impl Workspace {
    /// A document that loads back to an equal workspace. Tables are written
    /// out in full.
    pub fn to_document(&self) -> Document {
        Document {
            lattices: self.lattices.iter().map(|(n, l)| (n.clone(), lattice_doc(l))).collect(),
            spaces: self
                .spaces
                .iter()
                .map(|(n, s)| {
                    let opens = s.named_opens().expect("loaded spaces list their opens");
                    (
                        n.clone(),
                        SpaceDoc {
                            points: s.points().to_vec(),
                            opens,
                        },
                    )
                })
                .collect(),
            maps: self
                .maps
                .iter()
                .map(|(n, m)| {
                    let d = MapDoc {
                        dom: m.dom.clone(),
                        cod: m.cod.clone(),
                        table: named(m.map.named_table()),
                    };
                    (n.clone(), d)
                })
                .collect(),
            morphisms: self
                .morphisms
                .iter()
                .map(|(n, m)| {
                    let d = MapDoc {
                        dom: m.dom.clone(),
                        cod: m.cod.clone(),
                        table: named(m.morphism.named_table()),
                    };
                    (n.clone(), d)
                })
                .collect(),
            bundles: self
                .bundles
                .iter()
                .map(|(n, b)| {
                    let d = BundleDoc {
                        total: b.total.clone(),
                        base: b.base.clone(),
                        proj: named(b.bundle.proj().named_table()),
                        stalks: b.stalks.clone(),
                    };
                    (n.clone(), d)
                })
                .collect(),
            rle_morphisms: self
                .rle_morphisms
                .iter()
                .map(|(n, m)| {
                    let d = RleMorphismDoc {
                        src: m.src.clone(),
                        dst: m.dst.clone(),
                        map: m.map.clone(),
                        alpha: named(m.morphism.alpha().named_table()),
                    };
                    (n.clone(), d)
                })
                .collect(),
            expect: self.expect.clone(),
        }
    }

    /// An RL bundle by name, with a message for the two ways it can be missing.
    pub fn rl_bundle(&self, name: &str) -> Result<&RlBundle, String> {
        let b = self
            .bundles
            .get(name)
            .ok_or_else(|| format!("unknown bundle `{name}`"))?;
        b.rl.as_ref()
            .ok_or_else(|| format!("bundle `{name}` has no stalk algebras"))
    }
}

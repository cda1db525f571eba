//! Germs of sections and the étalé space they form over the base.

use std::collections::HashMap;

use crate::bits::BitSet;
use crate::bundle::{is_bundle_morphism, Bundle, RlBundle, Section, StalkAlgebra, StalkOps};
use crate::error::{Error, Result};
use crate::fintop::{FiniteSpace, SpaceMap};
use crate::rlcore::Op;

/// `[s]_p`, kept as the restriction of `s` to the least neighbourhood of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Germ {
    base_point: usize,
    rep: Section,
}

impl Germ {
    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn rep(&self) -> &Section {
        &self.rep
    }

    /// Value of the germ at its own base point.
    pub fn value(&self) -> usize {
        self.rep.at(self.base_point).expect("base point lies in the domain")
    }

    /// `(p ⊳ {b:t,...})`.
    pub fn id(&self, bundle: &Bundle) -> String {
        format!("({} ⊳ {})", bundle.base().name(self.base_point), self.rep.id(bundle))
    }
}

pub fn germ_at(bundle: &Bundle, s: &Section, p: usize) -> Result<Germ> {
    let base = bundle.base();
    if p >= base.len() || !s.domain().contains(p) {
        return Err(Error::Precondition(
            "germ point lies outside the section's domain".into(),
        ));
    }
    if !base.is_open(s.domain()) {
        return Err(Error::Precondition(format!(
            "section domain {{{}}} is not open",
            base.names(s.domain()).join(",")
        )));
    }
    Ok(Germ {
        base_point: p,
        rep: s.restrict(&base.nbhd(p)),
    })
}

/// The germ space of a bundle with its projection `[s]_p ↦ p`.
#[derive(Clone, Debug)]
pub struct GermSpace {
    source: Bundle,
    germs: Vec<Germ>,
    index: HashMap<Germ, usize>,
    bundle: Bundle,
}

impl GermSpace {
    pub fn source(&self) -> &Bundle {
        &self.source
    }

    /// Germs in the order of the points of [`Self::bundle`]'s total space.
    pub fn germs(&self) -> &[Germ] {
        &self.germs
    }

    /// The germ space as a bundle over the source's base.
    pub fn bundle(&self) -> &Bundle {
        &self.bundle
    }

    pub fn position(&self, g: &Germ) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Position of the germ of `s` at `p`.
    pub fn germ_of(&self, s: &Section, p: usize) -> Result<usize> {
        let g = germ_at(&self.source, s, p)?;
        self.position(&g).ok_or_else(|| Error::UnknownId(g.id(&self.source)))
    }

    /// `Im(s_U) = {[s]_c | c ∈ U}` for a section over an open.
    pub fn image_of_section(&self, s: &Section) -> Result<BitSet> {
        s.domain().iter().map(|c| self.germ_of(s, c)).collect()
    }
}

/// Builds the germ space. Germs come from the sections over least
/// neighbourhoods; the topology is generated by the sets `Im(s_{U_p})`.
pub fn etale_of(bundle: &Bundle) -> Result<GermSpace> {
    let base = bundle.base();
    let mut germs = Vec::new();
    for p in 0..base.len() {
        for s in bundle.sections(&base.nbhd(p)) {
            germs.push(Germ { base_point: p, rep: s });
        }
    }
    let mut keyed: Vec<(String, Germ)> = germs.into_iter().map(|g| (g.id(bundle), g)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let (ids, germs): (Vec<String>, Vec<Germ>) = keyed.into_iter().unzip();
    let index: HashMap<Germ, usize> = germs.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let family: Vec<BitSet> = germs
        .iter()
        .map(|g| {
            g.rep
                .domain()
                .iter()
                .map(|c| {
                    index[&Germ {
                        base_point: c,
                        rep: g.rep.restrict(&base.nbhd(c)),
                    }]
                })
                .collect()
        })
        .collect();
    let space = FiniteSpace::generated_by(ids, &family)?.into_shared();
    let table = germs.iter().map(|g| g.base_point).collect();
    let proj = SpaceMap::new(space, base.clone(), table)?;
    let germ_bundle = Bundle::new(proj)?;
    if !germ_bundle.is_etale() {
        return Err(Error::NotEtale("germ projection is not a local homeomorphism".into()));
    }
    Ok(GermSpace {
        source: bundle.clone(),
        germs,
        index,
        bundle: germ_bundle,
    })
}

/// `ε([s]_p) = s(p)`.
pub fn counit(g: &GermSpace) -> SpaceMap {
    let table = g.germs.iter().map(Germ::value).collect();
    SpaceMap::new(g.bundle.total().clone(), g.source.total().clone(), table).expect("values lie in the total space")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounitReport {
    /// `π ∘ ε` equals the germ projection.
    pub commutes: bool,
    pub continuous: bool,
    pub injective: bool,
    pub surjective: bool,
    pub open: bool,
}

impl CounitReport {
    pub fn is_isomorphism(&self) -> bool {
        self.commutes && self.continuous && self.injective && self.surjective && self.open
    }
}

pub fn counit_report(g: &GermSpace) -> CounitReport {
    let e = counit(g);
    let commutes = (0..e.dom().len()).all(|i| g.source.proj().apply(e.apply(i)) == g.bundle.proj().apply(i));
    CounitReport {
        commutes,
        continuous: e.is_continuous(),
        injective: e.is_injective(),
        surjective: e.is_surjective(),
        open: e.is_open_map(),
    }
}

fn compose_section(bundle: &Bundle, h: &SpaceMap, s: &Section) -> Result<Section> {
    let values = s
        .values()
        .iter()
        .map(|&v| if v == usize::MAX { v } else { h.apply(v) })
        .collect();
    bundle.section(*s.domain(), values)
}

/// `h̃([s]_p) = [h∘s]_p` for a bundle morphism `h` between the sources.
pub fn coreflect_morphism(h: &SpaceMap, src: &GermSpace, dst: &GermSpace) -> Result<SpaceMap> {
    if !is_bundle_morphism(h, &src.source, &dst.source) {
        return Err(Error::Precondition("not a bundle morphism between the sources".into()));
    }
    let table = src
        .germs
        .iter()
        .map(|g| {
            let hs = compose_section(&dst.source, h, &g.rep)?;
            dst.germ_of(&hs, g.base_point)
        })
        .collect::<Result<_>>()?;
    SpaceMap::new(src.bundle.total().clone(), dst.bundle.total().clone(), table)
}

/// `h̄(y) = [h∘σ]_{π(y)}` with `σ` the section through `y` over `U_{π(y)}`.
pub fn couniversal_factorization(h: &SpaceMap, t: &Bundle, g: &GermSpace) -> Result<SpaceMap> {
    if !t.is_etale() {
        return Err(Error::NotEtale("source of the factorization is not etale".into()));
    }
    if !is_bundle_morphism(h, t, &g.source) {
        return Err(Error::Precondition("not a bundle morphism into the germ source".into()));
    }
    let base = t.base();
    let table = (0..t.total().len())
        .map(|y| {
            let b = t.proj().apply(y);
            let (_, sigma) = t.section_through_point(y)?;
            let hs = compose_section(&g.source, h, &sigma.restrict(&base.nbhd(b)))?;
            g.germ_of(&hs, b)
        })
        .collect::<Result<_>>()?;
    SpaceMap::new(t.total().clone(), g.bundle.total().clone(), table)
}

/// Every continuous base-compatible `k: T → Γ̃` with `ε∘k = h`.
pub fn factorizations_by_search(h: &SpaceMap, t: &Bundle, g: &GermSpace) -> Result<Vec<SpaceMap>> {
    let e = counit(g);
    Ok(t.base_compatible_maps(&g.bundle, true)?
        .into_iter()
        .filter(|k| (0..k.dom().len()).all(|y| e.apply(k.apply(y)) == h.apply(y)))
        .collect())
}

/// Counts on both sides of `Hom(T, X) ≅ Hom(T, Γ̃X)` and whether `h ↦ h̄`
/// matches them up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoreflectionCheck {
    pub bundle_homs: usize,
    pub etale_homs: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl CoreflectionCheck {
    pub fn is_bijection(&self) -> bool {
        self.bundle_homs == self.etale_homs && self.injective && self.surjective
    }
}

pub fn coreflection_check(t: &Bundle, x: &Bundle) -> Result<CoreflectionCheck> {
    let g = etale_of(x)?;
    let homs = t.base_compatible_maps(x, true)?;
    let etale_homs: Vec<SpaceMap> = t
        .base_compatible_maps(&g.bundle, true)?
        .into_iter()
        .filter(|k| k.is_open_map())
        .collect();
    let bars = homs
        .iter()
        .map(|h| couniversal_factorization(h, t, &g))
        .collect::<Result<Vec<_>>>()?;
    let mut tables: Vec<&[usize]> = bars.iter().map(|k| k.table()).collect();
    tables.sort();
    tables.dedup();
    let injective = tables.len() == bars.len();
    let surjective = etale_homs.iter().all(|k| bars.iter().any(|b| b.table() == k.table()));
    Ok(CoreflectionCheck {
        bundle_homs: homs.len(),
        etale_homs: etale_homs.len(),
        injective,
        surjective,
    })
}

/// Germwise operations: `[s]_p ⋄ [t]_p = [s ⋄ t]_p` computed pointwise on
/// `U_p`, and `0̃_p = [0]_p`, `1̃_p = [1]_p`.
pub fn rl_germ_ops(rb: &RlBundle, g: &GermSpace) -> Result<RlBundle> {
    let src = rb.bundle();
    if src != &g.source {
        return Err(Error::Precondition("germ space was built from another bundle".into()));
    }
    let base = src.base();
    let gb = &g.bundle;
    let pointwise = |p: usize, f: &dyn Fn(usize) -> Option<usize>| -> Result<usize> {
        let u = base.nbhd(p);
        let mut values = vec![usize::MAX; base.len()];
        for c in u.iter() {
            values[c] = f(c).ok_or_else(|| Error::InvalidBundle(format!("no operation over `{}`", base.name(c))))?;
        }
        let s = src.section(u, values)?;
        Ok(gb.local_index(g.germ_of(&s, p)?))
    };
    let mut stalks = Vec::with_capacity(base.len());
    for p in 0..base.len() {
        let pts: Vec<usize> = gb.stalk_points(p).iter().collect();
        if pts.is_empty() {
            stalks.push(None);
            continue;
        }
        let tab = |op: Op| -> Result<Vec<Vec<usize>>> {
            pts.iter()
                .map(|&i| {
                    pts.iter()
                        .map(|&j| {
                            let (s, t) = (&g.germs[i].rep, &g.germs[j].rep);
                            pointwise(p, &|c| rb.op(op, s.at(c)?, t.at(c)?))
                        })
                        .collect()
                })
                .collect()
        };
        stalks.push(Some(StalkAlgebra {
            join: tab(Op::Join)?,
            meet: tab(Op::Meet)?,
            mul: tab(Op::Mul)?,
            imp: tab(Op::Imp)?,
            zero: pointwise(p, &|c| rb.zero(c))?,
            one: pointwise(p, &|c| rb.one(c))?,
        }));
    }
    RlBundle::new(gb.clone(), StalkOps { stalks })
}

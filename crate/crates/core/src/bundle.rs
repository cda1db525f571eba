//! Bundles over a finite base, stalkwise residuated-lattice structure, and sections.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::fintop::{enumerate_maps, pullback_space, subspace, Space, SpaceMap};
use crate::rlcore::{morphism_violation, verify_rl, Op, ResiduatedLattice, Rl, RlCandidate, RlReport};

const NONE: usize = usize::MAX;

/// A continuous map `π: T → B`.
#[derive(Clone)]
pub struct Bundle {
    proj: SpaceMap,
    stalks: Vec<BitSet>,
    local: Vec<usize>,
}

impl PartialEq for Bundle {
    fn eq(&self, other: &Self) -> bool {
        self.proj == other.proj
    }
}

impl Eq for Bundle {}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bundle")
            .field("total", &self.total().points())
            .field("base", &self.base().points())
            .finish()
    }
}

impl Bundle {
    pub fn new(proj: SpaceMap) -> Result<Self> {
        if let Some(t) = proj.continuity_witness() {
            return Err(Error::NotContinuous(format!(
                "projection breaks at `{}`",
                proj.dom().name(t)
            )));
        }
        let mut stalks = vec![BitSet::empty(); proj.cod().len()];
        let mut local = vec![0; proj.dom().len()];
        for t in 0..proj.dom().len() {
            let b = proj.apply(t);
            local[t] = stalks[b].len();
            stalks[b].insert(t);
        }
        Ok(Bundle { proj, stalks, local })
    }

    /// The identity bundle of a space over itself.
    pub fn identity(base: Space) -> Self {
        Self::new(SpaceMap::identity(base)).expect("identity is continuous")
    }

    pub fn total(&self) -> &Space {
        self.proj.dom()
    }

    pub fn base(&self) -> &Space {
        self.proj.cod()
    }

    pub fn proj(&self) -> &SpaceMap {
        &self.proj
    }

    /// Total points over `b`.
    pub fn stalk_points(&self, b: usize) -> BitSet {
        self.stalks[b]
    }

    /// Position of `t` inside its stalk.
    pub fn local_index(&self, t: usize) -> usize {
        self.local[t]
    }

    /// The fibre over `b` with the subspace topology.
    pub fn stalk(&self, b: usize) -> Result<Space> {
        Ok(subspace(self.total(), &self.stalks[b])?.0)
    }

    pub fn is_etale(&self) -> bool {
        self.proj.is_local_homeomorphism()
    }

    pub fn kernel_pair(&self) -> Result<KernelPair> {
        KernelPair::of(self)
    }

    /// Whether `values` (indexed by base point, [`usize::MAX`] off `domain`)
    /// is a continuous section over the subspace `domain`.
    pub fn is_section(&self, domain: &BitSet, values: &[usize]) -> bool {
        let base = self.base();
        let total = self.total();
        domain.iter().all(|b| {
            let t = values[b];
            t != NONE
                && self.proj.apply(t) == b
                && base
                    .nbhd(b)
                    .intersection(domain)
                    .iter()
                    .all(|c| total.nbhd(t).contains(values[c]))
        })
    }

    pub fn section(&self, domain: BitSet, values: Vec<usize>) -> Result<Section> {
        if values.len() != self.base().len() || !self.is_section(&domain, &values) {
            return Err(Error::NotASection(format!(
                "values over {{{}}}",
                self.base().names(&domain).join(",")
            )));
        }
        let mut values = values;
        for (b, v) in values.iter_mut().enumerate() {
            if !domain.contains(b) {
                *v = NONE;
            }
        }
        Ok(Section { domain, values })
    }

    /// Every section over the subspace `x`, in lexicographic order of values.
    pub fn sections(&self, x: &BitSet) -> Vec<Section> {
        let members: Vec<usize> = x.iter().collect();
        let base = self.base();
        let total = self.total();
        let mut out = Vec::new();
        let mut values = vec![NONE; base.len()];
        #[allow(clippy::too_many_arguments)]
        fn go(
            k: usize,
            members: &[usize],
            x: &BitSet,
            bundle: &Bundle,
            base: &Space,
            total: &Space,
            values: &mut Vec<usize>,
            out: &mut Vec<Section>,
        ) {
            if k == members.len() {
                out.push(Section {
                    domain: *x,
                    values: values.clone(),
                });
                return;
            }
            let b = members[k];
            for t in bundle.stalks[b].iter() {
                values[b] = t;
                let ok = members[..k].iter().all(|&c| {
                    (!base.nbhd(b).contains(c) || total.nbhd(t).contains(values[c]))
                        && (!base.nbhd(c).contains(b) || total.nbhd(values[c]).contains(t))
                });
                if ok {
                    go(k + 1, members, x, bundle, base, total, values, out);
                }
            }
            values[b] = NONE;
        }
        go(0, &members, x, self, base, total, &mut values, &mut out);
        out
    }

    pub fn global_sections(&self) -> Vec<Section> {
        self.sections(&self.base().full())
    }

    /// A section through `t`, defined on the open `π(U_t)`.
    pub fn section_through_point(&self, t: usize) -> Result<(BitSet, Section)> {
        if !self.is_etale() {
            return Err(Error::NotEtale("projection is not a local homeomorphism".into()));
        }
        let u = self.total().nbhd(t);
        let dom = self.proj.image(&u);
        let mut values = vec![NONE; self.base().len()];
        for s in u.iter() {
            values[self.proj.apply(s)] = s;
        }
        let sec = self.section(dom, values)?;
        Ok((dom, sec))
    }

    /// Base-compatible maps `self.total → other.total`, i.e. with `φ∘h = π`.
    pub fn base_compatible_maps(&self, other: &Bundle, continuous: bool) -> Result<Vec<SpaceMap>> {
        if self.base() != other.base() {
            return Err(Error::CodomainMismatch);
        }
        let allowed: Vec<BitSet> = (0..self.total().len())
            .map(|t| other.stalks[self.proj.apply(t)])
            .collect();
        enumerate_maps(self.total(), other.total(), &allowed, continuous)
            .into_iter()
            .map(|t| SpaceMap::new(self.total().clone(), other.total().clone(), t))
            .collect()
    }
}

/// The pullback of `π` along itself.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub space: Space,
    pub p1: SpaceMap,
    pub p2: SpaceMap,
    index: HashMap<(usize, usize), usize>,
}

impl KernelPair {
    pub fn of(b: &Bundle) -> Result<Self> {
        let (space, p1, p2) = pullback_space(b.proj(), b.proj())?;
        let index = (0..space.len()).map(|k| ((p1.apply(k), p2.apply(k)), k)).collect();
        Ok(KernelPair { space, p1, p2, index })
    }

    pub fn pair(&self, t1: usize, t2: usize) -> Option<usize> {
        self.index.get(&(t1, t2)).copied()
    }
}

/// Operation tables on one stalk, over positions inside the stalk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkAlgebra {
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
    pub zero: usize,
    pub one: usize,
}

impl StalkAlgebra {
    fn table(&self, op: Op) -> &Vec<Vec<usize>> {
        match op {
            Op::Join => &self.join,
            Op::Meet => &self.meet,
            Op::Mul => &self.mul,
            Op::Imp => &self.imp,
        }
    }

    /// Reads the tables off an algebra whose element ids are the stalk's point ids.
    pub fn from_rl(bundle: &Bundle, b: usize, l: &ResiduatedLattice) -> Result<Self> {
        let pts: Vec<usize> = bundle.stalk_points(b).iter().collect();
        if pts.len() != l.len() {
            return Err(Error::InvalidBundle(format!(
                "stalk over `{}` has {} points, algebra has {}",
                bundle.base().name(b),
                pts.len(),
                l.len()
            )));
        }
        let to_el: Vec<usize> = pts
            .iter()
            .map(|&t| l.idx(bundle.total().name(t)))
            .collect::<Result<_>>()?;
        let mut of_el = vec![0; l.len()];
        for (k, &e) in to_el.iter().enumerate() {
            of_el[e] = k;
        }
        let k = pts.len();
        let tab = |op: Op| -> Vec<Vec<usize>> {
            (0..k)
                .map(|i| (0..k).map(|j| of_el[l.op(op, to_el[i], to_el[j])]).collect())
                .collect()
        };
        Ok(StalkAlgebra {
            join: tab(Op::Join),
            meet: tab(Op::Meet),
            mul: tab(Op::Mul),
            imp: tab(Op::Imp),
            zero: of_el[l.bot()],
            one: of_el[l.top()],
        })
    }

    /// Candidate with the order read off the meet table.
    pub fn candidate(&self, names: Vec<String>) -> RlCandidate {
        let k = names.len();
        RlCandidate {
            elements: names,
            leq: (0..k).map(|i| (0..k).map(|j| self.meet[i][j] == i).collect()).collect(),
            join: self.join.clone(),
            meet: self.meet.clone(),
            mul: self.mul.clone(),
            imp: self.imp.clone(),
            bot: self.zero,
            top: self.one,
        }
    }
}

/// Stalkwise operations; `None` marks an empty stalk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkOps {
    pub stalks: Vec<Option<StalkAlgebra>>,
}

/// A bundle with stalkwise residuated-lattice operations. Validity is
/// checked by [`verify_rl_bundle`], not on construction.
#[derive(Clone, Debug)]
pub struct RlBundle {
    bundle: Bundle,
    ops: StalkOps,
    stalk_rls: Vec<Option<Rl>>,
}

impl RlBundle {
    pub fn new(bundle: Bundle, ops: StalkOps) -> Result<Self> {
        if ops.stalks.len() != bundle.base().len() {
            return Err(Error::InvalidBundle("one stalk algebra per base point required".into()));
        }
        let mut stalk_rls = Vec::new();
        for (b, alg) in ops.stalks.iter().enumerate() {
            let k = bundle.stalk_points(b).len();
            match alg {
                None if k == 0 => stalk_rls.push(None),
                None => {
                    return Err(Error::InvalidBundle(format!(
                        "no operations on the stalk over `{}`",
                        bundle.base().name(b)
                    )))
                }
                Some(a) => {
                    let square = |t: &Vec<Vec<usize>>| {
                        t.len() == k && t.iter().all(|r| r.len() == k && r.iter().all(|&v| v < k))
                    };
                    if !(Op::ALL.iter().all(|&op| square(a.table(op))) && a.zero < k && a.one < k) {
                        return Err(Error::InvalidBundle(format!(
                            "tables on the stalk over `{}` do not fit the stalk",
                            bundle.base().name(b)
                        )));
                    }
                    let names = bundle.total().names(&bundle.stalk_points(b));
                    stalk_rls.push(
                        ResiduatedLattice::from_candidate(&a.candidate(names))
                            .ok()
                            .map(Arc::new),
                    );
                }
            }
        }
        Ok(RlBundle { bundle, ops, stalk_rls })
    }

    /// Builds the operations from one algebra per base point whose element
    /// ids are the point ids of that stalk.
    pub fn from_stalk_rls(bundle: Bundle, algebras: &[Rl]) -> Result<Self> {
        if algebras.len() != bundle.base().len() {
            return Err(Error::InvalidBundle("one algebra per base point required".into()));
        }
        let stalks = algebras
            .iter()
            .enumerate()
            .map(|(b, l)| StalkAlgebra::from_rl(&bundle, b, l).map(Some))
            .collect::<Result<_>>()?;
        Self::new(bundle, StalkOps { stalks })
    }

    pub fn bundle(&self) -> &Bundle {
        &self.bundle
    }

    pub fn ops(&self) -> &StalkOps {
        &self.ops
    }

    /// The stalk algebra over `b`, if its tables form a residuated lattice.
    pub fn stalk_rl(&self, b: usize) -> Option<&Rl> {
        self.stalk_rls[b].as_ref()
    }

    /// `t1 ⋄ t2` for points in the same stalk.
    pub fn op(&self, op: Op, t1: usize, t2: usize) -> Option<usize> {
        let b = self.bundle.proj.apply(t1);
        if self.bundle.proj.apply(t2) != b {
            return None;
        }
        let alg = self.ops.stalks[b].as_ref()?;
        let k = alg.table(op)[self.bundle.local[t1]][self.bundle.local[t2]];
        self.bundle.stalks[b].iter().nth(k)
    }

    fn nth_in_stalk(&self, b: usize, k: usize) -> usize {
        self.bundle.stalks[b].iter().nth(k).expect("position inside the stalk")
    }

    /// `0_b` as a total point.
    pub fn zero(&self, b: usize) -> Option<usize> {
        let alg = self.ops.stalks[b].as_ref()?;
        Some(self.nth_in_stalk(b, alg.zero))
    }

    pub fn one(&self, b: usize) -> Option<usize> {
        let alg = self.ops.stalks[b].as_ref()?;
        Some(self.nth_in_stalk(b, alg.one))
    }
}

/// The operations as maps `κ_π → T` and the constants as maps `B → T`.
#[derive(Clone, Debug)]
pub struct ProperOps {
    pub kernel: KernelPair,
    pub join: SpaceMap,
    pub meet: SpaceMap,
    pub mul: SpaceMap,
    pub imp: SpaceMap,
    pub zero: SpaceMap,
    pub one: SpaceMap,
}

impl ProperOps {
    pub fn get(&self, op: Op) -> &SpaceMap {
        match op {
            Op::Join => &self.join,
            Op::Meet => &self.meet,
            Op::Mul => &self.mul,
            Op::Imp => &self.imp,
        }
    }
}

pub fn proper_map_from_stalk_ops(rb: &RlBundle) -> Result<ProperOps> {
    let b = &rb.bundle;
    let kernel = b.kernel_pair()?;
    let k = &kernel;
    let op_map = |op: Op| -> Result<SpaceMap> {
        let table = (0..k.space.len())
            .map(|i| rb.op(op, k.p1.apply(i), k.p2.apply(i)).expect("pairs share a stalk"))
            .collect();
        SpaceMap::new(k.space.clone(), b.total().clone(), table)
    };
    let constant = |one: bool| -> Result<SpaceMap> {
        let table = (0..b.base().len())
            .map(|p| {
                if one { rb.one(p) } else { rb.zero(p) }
                    .ok_or_else(|| Error::InvalidBundle(format!("empty stalk over `{}`", b.base().name(p))))
            })
            .collect::<Result<_>>()?;
        SpaceMap::new(b.base().clone(), b.total().clone(), table)
    };
    Ok(ProperOps {
        join: op_map(Op::Join)?,
        meet: op_map(Op::Meet)?,
        mul: op_map(Op::Mul)?,
        imp: op_map(Op::Imp)?,
        zero: constant(false)?,
        one: constant(true)?,
        kernel,
    })
}

/// Reads stalk tables back off π-proper maps. Fails if a map leaves the stalk
/// of its arguments or a constant is not a section.
pub fn stalk_ops_from_proper_map(bundle: &Bundle, p: &ProperOps) -> Result<StalkOps> {
    let k = &p.kernel;
    let proj = bundle.proj();
    for op in Op::ALL {
        let m = p.get(op);
        for i in 0..k.space.len() {
            if proj.apply(m.apply(i)) != proj.apply(k.p1.apply(i)) {
                return Err(Error::InvalidBundle(format!(
                    "{} is not proper at `{}`",
                    op.name(),
                    k.space.name(i)
                )));
            }
        }
    }
    for (name, c) in [("zero", &p.zero), ("one", &p.one)] {
        if (0..bundle.base().len()).any(|b| proj.apply(c.apply(b)) != b) {
            return Err(Error::InvalidBundle(format!("{name} is not a section")));
        }
    }
    let stalks = (0..bundle.base().len())
        .map(|b| {
            let pts: Vec<usize> = bundle.stalk_points(b).iter().collect();
            if pts.is_empty() {
                return None;
            }
            let tab = |op: Op| -> Vec<Vec<usize>> {
                pts.iter()
                    .map(|&s| {
                        pts.iter()
                            .map(|&t| bundle.local_index(p.get(op).apply(k.pair(s, t).expect("same stalk"))))
                            .collect()
                    })
                    .collect()
            };
            Some(StalkAlgebra {
                join: tab(Op::Join),
                meet: tab(Op::Meet),
                mul: tab(Op::Mul),
                imp: tab(Op::Imp),
                zero: bundle.local_index(p.zero.apply(b)),
                one: bundle.local_index(p.one.apply(b)),
            })
        })
        .collect();
    Ok(StalkOps { stalks })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RlBundleReport {
    pub empty_stalks: Vec<String>,
    pub stalk_failures: Vec<(String, RlReport)>,
    /// Operation name and a kernel-pair point where continuity fails.
    pub discontinuous_ops: Vec<(&'static str, String)>,
    /// Constant name and a base point where continuity fails.
    pub discontinuous_constants: Vec<(&'static str, String)>,
}

impl RlBundleReport {
    pub fn is_valid(&self) -> bool {
        self.empty_stalks.is_empty()
            && self.stalk_failures.is_empty()
            && self.discontinuous_ops.is_empty()
            && self.discontinuous_constants.is_empty()
    }

    pub fn summary(&self) -> Vec<String> {
        let mut out = Vec::new();
        for b in &self.empty_stalks {
            out.push(format!("empty stalk over {b}"));
        }
        for (b, r) in &self.stalk_failures {
            out.push(format!("stalk over {b}: {}", r.summary()));
        }
        for (op, w) in &self.discontinuous_ops {
            out.push(format!("{op} is not continuous at {w}"));
        }
        for (c, w) in &self.discontinuous_constants {
            out.push(format!("{c} section is not continuous at {w}"));
        }
        out
    }
}

pub fn verify_rl_bundle(rb: &RlBundle) -> Result<RlBundleReport> {
    let b = &rb.bundle;
    let mut report = RlBundleReport::default();
    for p in 0..b.base().len() {
        match &rb.ops.stalks[p] {
            None => report.empty_stalks.push(b.base().name(p).to_string()),
            Some(alg) => {
                let cand = alg.candidate(b.total().names(&b.stalk_points(p)));
                let r = verify_rl(&cand);
                if !r.is_valid() {
                    report.stalk_failures.push((b.base().name(p).to_string(), r));
                }
            }
        }
    }
    if !report.empty_stalks.is_empty() {
        return Ok(report);
    }
    let proper = proper_map_from_stalk_ops(rb)?;
    for op in Op::ALL {
        let m = proper.get(op);
        if let Some(w) = m.continuity_witness() {
            report.discontinuous_ops.push((op.name(), m.dom().name(w).to_string()));
        }
    }
    for (name, c) in [("zero", &proper.zero), ("one", &proper.one)] {
        if let Some(w) = c.continuity_witness() {
            report.discontinuous_constants.push((name, c.dom().name(w).to_string()));
        }
    }
    Ok(report)
}

/// A section over `domain`; `values[b]` is [`usize::MAX`] off the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Section {
    domain: BitSet,
    values: Vec<usize>,
}

impl Section {
    pub fn domain(&self) -> &BitSet {
        &self.domain
    }

    pub fn at(&self, b: usize) -> Option<usize> {
        match self.values.get(b) {
            Some(&v) if v != NONE => Some(v),
            _ => None,
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn restrict(&self, to: &BitSet) -> Section {
        let domain = self.domain.intersection(to);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(b, &v)| if domain.contains(b) { v } else { NONE })
            .collect();
        Section { domain, values }
    }

    pub fn image(&self) -> BitSet {
        self.domain.iter().map(|b| self.values[b]).collect()
    }

    /// `{b:t,...}` with base ids in order.
    pub fn id(&self, bundle: &Bundle) -> String {
        let parts: Vec<String> = self
            .domain
            .iter()
            .map(|b| format!("{}:{}", bundle.base().name(b), bundle.total().name(self.values[b])))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equalizer {
    pub set: BitSet,
    pub open: bool,
    /// Open and closed inside the common domain.
    pub clopen_in_domain: bool,
}

/// `{b ∈ dom σ ∩ dom τ | σ(b) = τ(b)}`.
pub fn equalizer(bundle: &Bundle, s: &Section, t: &Section) -> Equalizer {
    let common = s.domain.intersection(&t.domain);
    let set: BitSet = common.iter().filter(|&b| s.values[b] == t.values[b]).collect();
    let base = bundle.base();
    let open = base.is_open(&set);
    let rest = common.difference(&set);
    let rel_open = |x: &BitSet| x.iter().all(|b| base.nbhd(b).intersection(&common).is_subset(x));
    Equalizer {
        set,
        open,
        clopen_in_domain: rel_open(&set) && rel_open(&rest),
    }
}

/// All images `σ(U)` of sections over opens, ordered by size then members.
pub fn section_image_basis(bundle: &Bundle) -> Result<Vec<BitSet>> {
    if !bundle.is_etale() {
        return Err(Error::NotEtale(
            "section images only form a basis over an etale space".into(),
        ));
    }
    let mut family: Vec<BitSet> = bundle
        .base()
        .opens()?
        .iter()
        .flat_map(|u| bundle.sections(u))
        .map(|s| s.image())
        .collect();
    family.sort_by_cached_key(crate::fintop::set_key);
    family.dedup();
    Ok(family)
}

/// `Γ(X, T)` with pointwise operations. Elements of `algebra` are section ids;
/// `sections[i]` is the section behind element `i`.
#[derive(Clone, Debug)]
pub struct SectionAlgebra {
    pub algebra: Rl,
    pub sections: Vec<Section>,
}

impl SectionAlgebra {
    pub fn element_of(&self, s: &Section) -> Option<usize> {
        self.sections.iter().position(|x| x == s)
    }
}

pub fn pointwise_rl_on_sections(rb: &RlBundle, x: &BitSet) -> Result<SectionAlgebra> {
    let bundle = &rb.bundle;
    let mut sections = bundle.sections(x);
    if sections.is_empty() {
        return Err(Error::InvalidBundle(format!(
            "no sections over {{{}}}",
            bundle.base().names(x).join(",")
        )));
    }
    let ids: Vec<String> = sections.iter().map(|s| s.id(bundle)).collect();
    let perm = crate::fintop::sort_permutation(&ids);
    let mut ordered = vec![sections[0].clone(); sections.len()];
    for (old, s) in sections.drain(..).enumerate() {
        ordered[perm[old]] = s;
    }
    let sections = ordered;
    let index: HashMap<&Section, usize> = sections.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n = sections.len();
    let pointwise = |op: Op, s: &Section, t: &Section| -> Result<usize> {
        let mut values = vec![NONE; bundle.base().len()];
        for b in x.iter() {
            values[b] = rb
                .op(op, s.values[b], t.values[b])
                .ok_or_else(|| Error::InvalidBundle("operation undefined on a stalk".into()))?;
        }
        let r = Section { domain: *x, values };
        index.get(&r).copied().ok_or_else(|| Error::NotClosed {
            op: op.name(),
            left: s.id(bundle),
            right: t.id(bundle),
        })
    };
    let constant = |one: bool| -> Result<usize> {
        let mut values = vec![NONE; bundle.base().len()];
        for b in x.iter() {
            values[b] = if one { rb.one(b) } else { rb.zero(b) }
                .ok_or_else(|| Error::InvalidBundle(format!("empty stalk over `{}`", bundle.base().name(b))))?;
        }
        let r = Section { domain: *x, values };
        index.get(&r).copied().ok_or_else(|| Error::NotClosed {
            op: if one { "one" } else { "zero" },
            left: String::new(),
            right: String::new(),
        })
    };
    let mut tables = Vec::new();
    for op in Op::ALL {
        let mut t = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                t[i][j] = pointwise(op, &sections[i], &sections[j])?;
            }
        }
        tables.push(t);
    }
    let meet = tables[1].clone();
    let cand = RlCandidate {
        elements: sections.iter().map(|s| s.id(bundle)).collect(),
        leq: (0..n).map(|i| (0..n).map(|j| meet[i][j] == i).collect()).collect(),
        join: tables[0].clone(),
        meet,
        mul: tables[2].clone(),
        imp: tables[3].clone(),
        bot: constant(false)?,
        top: constant(true)?,
    };
    let algebra = ResiduatedLattice::from_candidate(&cand)?.into_shared();
    Ok(SectionAlgebra { algebra, sections })
}

/// Whether `h` is continuous with `φ∘h = π`.
pub fn is_bundle_morphism(h: &SpaceMap, src: &Bundle, dst: &Bundle) -> bool {
    src.base() == dst.base()
        && h.dom() == src.total()
        && h.cod() == dst.total()
        && (0..h.dom().len()).all(|t| dst.proj.apply(h.apply(t)) == src.proj.apply(t))
        && h.is_continuous()
}

/// Why `h` fails to be a morphism of bundles of residuated lattices, if it does.
/// Checks the bundle conditions, then each stalk restriction.
pub fn rl_bundle_morphism_violation(h: &SpaceMap, src: &RlBundle, dst: &RlBundle) -> Option<String> {
    if !is_bundle_morphism(h, &src.bundle, &dst.bundle) {
        return Some("not a continuous base-preserving map".into());
    }
    for b in 0..src.bundle.base().len() {
        let (Some(l), Some(m)) = (src.stalk_rl(b), dst.stalk_rl(b)) else {
            if src.bundle.stalk_points(b).is_empty() {
                continue;
            }
            return Some(format!(
                "stalk over `{}` is not a residuated lattice",
                src.bundle.base().name(b)
            ));
        };
        let table: Vec<usize> = src
            .bundle
            .stalk_points(b)
            .iter()
            .map(|t| dst.bundle.local_index(h.apply(t)))
            .collect();
        if let Some(v) = morphism_violation(l, m, &table) {
            return Some(format!("over `{}`: {v}", src.bundle.base().name(b)));
        }
    }
    None
}

pub fn is_rl_bundle_morphism(h: &SpaceMap, src: &RlBundle, dst: &RlBundle) -> bool {
    rl_bundle_morphism_violation(h, src, dst).is_none()
}

/// The square form: `h ∘ ⋄ = ⋄' ∘ (h × h)` on the kernel pair and `h ∘ 0̂ = 0̂'`, `h ∘ 1̂ = 1̂'`.
pub fn preserves_operations_square(h: &SpaceMap, src: &RlBundle, dst: &RlBundle) -> bool {
    let b = &src.bundle;
    let ops_ok = Op::ALL.iter().all(|&op| {
        (0..b.total().len()).all(|s| {
            b.stalk_points(b.proj.apply(s)).iter().all(|t| {
                let lhs = src.op(op, s, t).map(|v| h.apply(v));
                let rhs = dst.op(op, h.apply(s), h.apply(t));
                lhs.is_some() && lhs == rhs
            })
        })
    });
    let consts_ok = (0..b.base().len())
        .all(|p| src.zero(p).map(|z| h.apply(z)) == dst.zero(p) && src.one(p).map(|o| h.apply(o)) == dst.one(p));
    ops_ok && consts_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn etspecha4_global_sections() {
        let rb = fixtures::etspecha4();
        let b = rb.bundle();
        assert!(b.is_etale());
        assert!(verify_rl_bundle(&rb).unwrap().is_valid());
        assert_eq!(b.global_sections().len(), 4);
        assert_eq!(b.sections(&BitSet::empty()).len(), 1);
        assert_eq!(b.kernel_pair().unwrap().space.len(), 8);
    }

    #[test]
    fn indiscrete_bundle_is_rl_but_not_etale() {
        let rb = fixtures::indiscrete_a2_over_point();
        assert!(!rb.bundle().is_etale());
        assert!(verify_rl_bundle(&rb).unwrap().is_valid());
        assert_eq!(rb.bundle().global_sections().len(), 2);
        assert!(rb.bundle().section_through_point(0).is_err());
    }

    #[test]
    fn proper_round_trip() {
        let rb = fixtures::etspecha4();
        let p = proper_map_from_stalk_ops(&rb).unwrap();
        let back = stalk_ops_from_proper_map(rb.bundle(), &p).unwrap();
        assert_eq!(&back, rb.ops());
    }
}

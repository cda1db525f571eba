//! Finite function spaces with the compact-open topology, the exponential
//! and section adjunctions as executable checks, and topological residuated
//! lattices.

use std::collections::HashSet;

use crate::bits::{subsets, BitSet};
use crate::bundle::{pointwise_rl_on_sections, Bundle, RlBundle};
use crate::error::{Error, Result};
use crate::fintop::{continuous_maps, pair_id, product, subspace, FiniteSpace, Space, SpaceMap};
use crate::rlcore::{Op, ResiduatedLattice, Rl, RlCandidate};

const MAX_COMPACT_DOMAIN: usize = 16;

/// Switches on continuity checks over non-discrete bases.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub exploratory: bool,
}

/// `C(X, Y)`: continuous maps, named `{x:y,...}`, with the compact-open topology.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    dom: Space,
    cod: Space,
    maps: Vec<SpaceMap>,
    space: Space,
}

/// `{x:y,...}` over the whole domain.
pub fn map_id(m: &SpaceMap) -> String {
    let parts: Vec<String> = (0..m.dom().len())
        .map(|x| format!("{}:{}", m.dom().name(x), m.cod().name(m.apply(x))))
        .collect();
    format!("{{{}}}", parts.join(","))
}

impl FunctionSpace {
    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    /// Maps in the order of the points of [`Self::space`].
    pub fn maps(&self) -> &[SpaceMap] {
        &self.maps
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn position(&self, table: &[usize]) -> Option<usize> {
        if table.len() != self.dom.len() || table.iter().any(|&y| y >= self.cod.len()) {
            return None;
        }
        let key = key_of(&self.dom, &self.cod, table);
        self.maps.binary_search_by(|m| map_id(m).cmp(&key)).ok()
    }

    /// `S(C, U) = {g | g(C) ⊆ U}`.
    pub fn subbasic(&self, c: &BitSet, u: &BitSet) -> BitSet {
        (0..self.maps.len())
            .filter(|&i| self.maps[i].image(c).is_subset(u))
            .collect()
    }

    /// `{h | ∀x. h(x) ∈ U_{g(x)}}`, the least neighbourhood read pointwise.
    pub fn pointwise_neighbourhood(&self, g: usize) -> BitSet {
        let g = &self.maps[g];
        (0..self.maps.len())
            .filter(|&i| (0..self.dom.len()).all(|x| self.cod.nbhd(g.apply(x)).contains(self.maps[i].apply(x))))
            .collect()
    }
}

fn key_of(dom: &Space, cod: &Space, table: &[usize]) -> String {
    let parts: Vec<String> = (0..dom.len())
        .map(|x| format!("{}:{}", dom.name(x), cod.name(table[x])))
        .collect();
    format!("{{{}}}", parts.join(","))
}

pub fn compact_open_space(x: &Space, y: &Space) -> Result<FunctionSpace> {
    if x.len() > MAX_COMPACT_DOMAIN {
        return Err(Error::TooManyPoints(x.len()));
    }
    let mut maps = continuous_maps(x, y);
    maps.sort_by_cached_key(map_id);
    let ids: Vec<String> = maps.iter().map(map_id).collect();
    if ids.len() > crate::bits::CAPACITY {
        return Err(Error::TooManyPoints(ids.len()));
    }
    let mut fs = FunctionSpace {
        dom: x.clone(),
        cod: y.clone(),
        maps,
        space: FiniteSpace::empty().into_shared(),
    };
    // Least neighbourhoods suffice: `S(C, U∪V)` is a union of `S(C₁,U) ∩ S(C₂,V)`.
    let mut family = Vec::new();
    for c in subsets(x.full()) {
        for yi in 0..y.len() {
            family.push(fs.subbasic(&c, &y.nbhd(yi)));
        }
    }
    fs.space = FiniteSpace::generated_by(ids, &family)?.into_shared();
    Ok(fs)
}

fn product_index(prod: &Space, b: &Space, x: &Space, bi: usize, xi: usize) -> usize {
    prod.index_of(&pair_id(b.name(bi), x.name(xi))).expect("product point")
}

/// `ĥ(x)(b) = h(b|x)`, as a map `X → C(B, T)`.
pub fn curry(h: &SpaceMap, x: &Space, cbt: &FunctionSpace) -> Result<SpaceMap> {
    let b = cbt.dom();
    let (prod, _, _) = product(b, x)?;
    if *h.dom() != prod || h.cod() != cbt.cod() {
        return Err(Error::CodomainMismatch);
    }
    let table = (0..x.len())
        .map(|xi| {
            let t: Vec<usize> = (0..b.len())
                .map(|bi| h.apply(product_index(&prod, b, x, bi, xi)))
                .collect();
            cbt.position(&t)
                .ok_or_else(|| Error::NotContinuous(format!("h(-|{}) is not continuous", x.name(xi))))
        })
        .collect::<Result<_>>()?;
    SpaceMap::new(x.clone(), cbt.space().clone(), table)
}

/// `k̄(b|x) = k(x)(b)` on `B × X`.
pub fn uncurry(k: &SpaceMap, cbt: &FunctionSpace) -> Result<SpaceMap> {
    if k.cod() != cbt.space() {
        return Err(Error::CodomainMismatch);
    }
    let b = cbt.dom();
    let x = k.dom();
    let (prod, p1, p2) = product(b, x)?;
    let table = (0..prod.len())
        .map(|i| cbt.maps()[k.apply(p2.apply(i))].apply(p1.apply(i)))
        .collect();
    SpaceMap::new(prod, cbt.cod().clone(), table)
}

/// Sizes of two hom-sets and whether the comparison map between them is a
/// bijection with the stated inverse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HomBijection {
    pub left: usize,
    pub right: usize,
    pub injective: bool,
    pub round_trip: bool,
}

impl HomBijection {
    pub fn is_bijection(&self) -> bool {
        self.left == self.right && self.injective && self.round_trip
    }
}

fn require_discrete(b: &Space, opts: Options) -> Result<()> {
    if !b.is_discrete() && !opts.exploratory {
        return Err(Error::Precondition("continuity checks need a discrete base".into()));
    }
    Ok(())
}

fn distinct(tables: impl Iterator<Item = Vec<usize>>) -> (usize, usize) {
    let mut seen = HashSet::new();
    let mut n = 0;
    for t in tables {
        n += 1;
        seen.insert(t);
    }
    (n, seen.len())
}

/// `Top(B × X, T) ≅ Top(X, C(B, T))` through `curry`, with `uncurry` as inverse.
pub fn check_exponential(b: &Space, x: &Space, t: &Space, opts: Options) -> Result<HomBijection> {
    require_discrete(b, opts)?;
    let cbt = compact_open_space(b, t)?;
    let (prod, _, _) = product(b, x)?;
    let left = continuous_maps(&prod, t);
    let right = continuous_maps(x, cbt.space());
    let mut round_trip = true;
    let mut curried = Vec::with_capacity(left.len());
    for h in &left {
        let k = curry(h, x, &cbt)?;
        round_trip &= k.is_continuous() && uncurry(&k, &cbt)?.table() == h.table();
        curried.push(k.table().to_vec());
    }
    for k in &right {
        let h = uncurry(k, &cbt)?;
        round_trip &= h.is_continuous() && curry(&h, x, &cbt)?.table() == k.table();
    }
    let (n, d) = distinct(curried.into_iter());
    Ok(HomBijection {
        left: left.len(),
        right: right.len(),
        injective: n == d,
        round_trip,
    })
}

/// `Γ(B, T)` as a subspace of `C(B, T)`.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub maps: FunctionSpace,
    pub space: Space,
    /// Position in `maps` of each point of `space`.
    pub members: Vec<usize>,
}

pub fn section_space(bundle: &Bundle) -> Result<SectionSpace> {
    let base = bundle.base();
    let maps = compact_open_space(base, bundle.total())?;
    let carrier: BitSet = (0..maps.maps().len())
        .filter(|&i| (0..base.len()).all(|b| bundle.proj().apply(maps.maps()[i].apply(b)) == b))
        .collect();
    let (space, incl) = subspace(maps.space(), &carrier)?;
    Ok(SectionSpace {
        members: incl.table().to_vec(),
        maps,
        space,
    })
}

/// `ḣ: X → Γ(B, T)` for `h: B × X → T` with `π∘h = proj₁`.
pub fn corestrict_to_sections(bundle: &Bundle, h: &SpaceMap, x: &Space, gamma: &SectionSpace) -> Result<SpaceMap> {
    let b = bundle.base();
    let (prod, p1, _) = product(b, x)?;
    if *h.dom() != prod {
        return Err(Error::CodomainMismatch);
    }
    if (0..prod.len()).any(|i| bundle.proj().apply(h.apply(i)) != p1.apply(i)) {
        return Err(Error::Precondition("π∘h differs from the first projection".into()));
    }
    let k = curry(h, x, &gamma.maps)?;
    let table = (0..x.len())
        .map(|xi| {
            gamma
                .members
                .iter()
                .position(|&m| m == k.apply(xi))
                .ok_or_else(|| Error::NotASection(gamma.maps.space().name(k.apply(xi)).to_string()))
        })
        .collect::<Result<_>>()?;
    SpaceMap::new(x.clone(), gamma.space.clone(), table)
}

/// `B × X → B` as a bundle.
pub fn trivial_bundle(b: &Space, x: &Space) -> Result<(Bundle, SpaceMap)> {
    let (_, p1, p2) = product(b, x)?;
    Ok((Bundle::new(p1)?, p2))
}

/// `Bundle_B(π_B(X), T) ≅ Top(X, Γ(B, T))`.
pub fn check_section_adjunction(bundle: &Bundle, x: &Space, opts: Options) -> Result<HomBijection> {
    require_discrete(bundle.base(), opts)?;
    let gamma = section_space(bundle)?;
    let (triv, _) = trivial_bundle(bundle.base(), x)?;
    let left = triv.base_compatible_maps(bundle, true)?;
    let right = continuous_maps(x, &gamma.space);
    let mut round_trip = true;
    let mut forward = Vec::with_capacity(left.len());
    for h in &left {
        let k = corestrict_to_sections(bundle, h, x, &gamma)?;
        round_trip &= k.is_continuous();
        forward.push(k.table().to_vec());
    }
    for k in &right {
        let lifted: Vec<usize> = k.table().iter().map(|&g| gamma.members[g]).collect();
        let lifted = SpaceMap::new(x.clone(), gamma.maps.space().clone(), lifted)?;
        let h = uncurry(&lifted, &gamma.maps)?;
        round_trip &= h.is_continuous() && corestrict_to_sections(bundle, &h, x, &gamma)?.table() == k.table();
    }
    let (n, d) = distinct(forward.into_iter());
    Ok(HomBijection {
        left: left.len(),
        right: right.len(),
        injective: n == d,
        round_trip,
    })
}

/// `Top(X, Y) ≅ Bundle_B((X, f), π_B(Y))` by `g ↦ ⟨f, g⟩`.
pub fn check_projection_adjunction(bundle: &Bundle, y: &Space) -> Result<HomBijection> {
    let (triv, p2) = trivial_bundle(bundle.base(), y)?;
    let x = bundle.total();
    let left = continuous_maps(x, y);
    let right = bundle.base_compatible_maps(&triv, true)?;
    let prod = triv.total();
    let mut round_trip = true;
    let mut forward = Vec::with_capacity(left.len());
    for g in &left {
        let table: Vec<usize> = (0..x.len())
            .map(|t| product_index(prod, bundle.base(), y, bundle.proj().apply(t), g.apply(t)))
            .collect();
        let pair = SpaceMap::new(x.clone(), prod.clone(), table)?;
        round_trip &= pair.is_continuous() && pair.then(&p2)?.table() == g.table();
        forward.push(pair.table().to_vec());
    }
    for k in &right {
        let g = k.then(&p2)?;
        round_trip &= g.is_continuous() && forward.iter().any(|f| f == k.table());
    }
    let (n, d) = distinct(forward.into_iter());
    Ok(HomBijection {
        left: left.len(),
        right: right.len(),
        injective: n == d,
        round_trip,
    })
}

/// A residuated lattice with a topology on its carrier; point `i` is element `i`.
#[derive(Clone, Debug)]
pub struct TopologicalRl {
    algebra: Rl,
    topology: Space,
}

impl TopologicalRl {
    pub fn new(algebra: Rl, topology: Space) -> Result<Self> {
        if algebra.elements() != topology.points() {
            return Err(Error::Precondition(
                "topology must live on the algebra's carrier".into(),
            ));
        }
        Ok(TopologicalRl { algebra, topology })
    }

    pub fn discrete(algebra: Rl) -> Self {
        let topology = FiniteSpace::discrete(algebra.elements())
            .expect("element ids")
            .into_shared();
        TopologicalRl { algebra, topology }
    }

    pub fn algebra(&self) -> &Rl {
        &self.algebra
    }

    pub fn topology(&self) -> &Space {
        &self.topology
    }

    /// Binary operations that are not continuous from the product topology,
    /// each with a witness pair. Constants are maps from a point and always continuous.
    pub fn discontinuities(&self) -> Vec<(Op, usize, usize)> {
        let (l, s) = (&self.algebra, &self.topology);
        let mut out = Vec::new();
        for op in Op::ALL {
            'pairs: for x in 0..l.len() {
                for y in 0..l.len() {
                    let target = s.nbhd(l.op(op, x, y));
                    if s.nbhd(x)
                        .iter()
                        .any(|u| s.nbhd(y).iter().any(|v| !target.contains(l.op(op, u, v))))
                    {
                        out.push((op, x, y));
                        break 'pairs;
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.discontinuities().is_empty()
    }
}

fn pointwise_algebra(names: Vec<String>, tables: [Vec<Vec<usize>>; 4], bot: usize, top: usize) -> Result<Rl> {
    let [join, meet, mul, imp] = tables;
    let n = names.len();
    let cand = RlCandidate {
        elements: names,
        leq: (0..n).map(|i| (0..n).map(|j| meet[i][j] == i).collect()).collect(),
        join,
        meet,
        mul,
        imp,
        bot,
        top,
    };
    Ok(ResiduatedLattice::from_candidate(&cand)?.into_shared())
}

/// `C(B, A)` with pointwise operations and the compact-open topology.
pub fn lift_compact_open_rl(b: &Space, a: &TopologicalRl) -> Result<TopologicalRl> {
    let fs = compact_open_space(b, a.topology())?;
    let l = a.algebra();
    let n = fs.maps().len();
    let lookup = |t: Vec<usize>, what: &'static str| -> Result<usize> {
        fs.position(&t).ok_or_else(|| Error::NotClosed {
            op: what,
            left: String::new(),
            right: String::new(),
        })
    };
    let mut tables: Vec<Vec<Vec<usize>>> = Vec::new();
    for op in Op::ALL {
        let mut tab = vec![vec![0; n]; n];
        for (i, f) in fs.maps().iter().enumerate() {
            for (j, g) in fs.maps().iter().enumerate() {
                let t = (0..b.len()).map(|p| l.op(op, f.apply(p), g.apply(p))).collect();
                tab[i][j] = lookup(t, op.name()).map_err(|_| Error::NotClosed {
                    op: op.name(),
                    left: fs.space().name(i).to_string(),
                    right: fs.space().name(j).to_string(),
                })?;
            }
        }
        tables.push(tab);
    }
    let bot = lookup(vec![l.bot(); b.len()], "zero")?;
    let top = lookup(vec![l.top(); b.len()], "one")?;
    let tables: [Vec<Vec<usize>>; 4] = tables.try_into().expect("four operations");
    let algebra = pointwise_algebra(fs.space().points().to_vec(), tables, bot, top)?;
    TopologicalRl::new(algebra, fs.space().clone())
}

/// `Γ(B, T)` with pointwise operations and the subspace topology from `C(B, T)`.
pub fn gamma_topological_rl(rb: &RlBundle) -> Result<TopologicalRl> {
    let bundle = rb.bundle();
    let sa = pointwise_rl_on_sections(rb, &bundle.base().full())?;
    let gamma = section_space(bundle)?;
    TopologicalRl::new(sa.algebra, gamma.space)
}

/// `B × A → B` with a copy of `A` on every stalk, points `(b|a)`.
pub fn constant_rl_bundle(b: &Space, a: &TopologicalRl) -> Result<RlBundle> {
    let (bundle, _) = trivial_bundle(b, a.topology())?;
    let algebras: Vec<Rl> = b
        .points()
        .iter()
        .map(|p| {
            let mut c = a.algebra().candidate();
            c.elements = c.elements.iter().map(|e| pair_id(p, e)).collect();
            ResiduatedLattice::from_candidate(&c).map(|l| l.into_shared())
        })
        .collect::<Result<_>>()?;
    RlBundle::from_stalk_rls(bundle, &algebras)
}

/// Object and morphism checks for `C(B,−) = Γ(B,−)∘π_B` and `B×− = U_B∘π_B`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TriangleReport {
    /// `p₂∘−: Γ(B, B×X) → C(B, X)` is a homeomorphism.
    pub upper_objects: bool,
    /// The total space of `π_B(X)` is `B × X`.
    pub lower_objects: bool,
    /// `C(B, g)` and `Γ(B, π_B(g))` agree under the homeomorphisms.
    pub upper_morphisms: bool,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.upper_objects && self.lower_objects && self.upper_morphisms
    }
}

fn gamma_to_maps(b: &Space, x: &Space) -> Result<(SectionSpace, FunctionSpace, SpaceMap, SpaceMap)> {
    let (triv, p2) = trivial_bundle(b, x)?;
    let gamma = section_space(&triv)?;
    let cbx = compact_open_space(b, x)?;
    let table = gamma
        .members
        .iter()
        .map(|&m| {
            let s = &gamma.maps.maps()[m];
            let t: Vec<usize> = (0..b.len()).map(|p| p2.apply(s.apply(p))).collect();
            cbx.position(&t).ok_or_else(|| Error::NotContinuous("p₂∘σ".into()))
        })
        .collect::<Result<_>>()?;
    let iso = SpaceMap::new(gamma.space.clone(), cbx.space().clone(), table)?;
    Ok((gamma, cbx, iso, p2))
}

pub fn check_triangle_identities(b: &Space, x: &Space, y: &Space, opts: Options) -> Result<TriangleReport> {
    require_discrete(b, opts)?;
    let (gx, cbx, iso_x, p2x) = gamma_to_maps(b, x)?;
    let (gy, cby, iso_y, _) = gamma_to_maps(b, y)?;
    let (triv, _) = trivial_bundle(b, x)?;
    let (prod, _, _) = product(b, x)?;
    let lower_objects = **triv.total() == *prod;
    let prod_y = gy.maps.cod().clone();
    let mut upper_morphisms = true;
    for g in continuous_maps(x, y) {
        for (gi, &m) in gx.members.iter().enumerate() {
            // Γ(B, 1×g)(σ), carried to C(B, Y).
            let s = &gx.maps.maps()[m];
            let pushed: Vec<usize> = (0..b.len())
                .map(|p| product_index(&prod_y, b, y, p, g.apply(p2x.apply(s.apply(p)))))
                .collect();
            let via_gamma = gy
                .members
                .iter()
                .position(|&n| gy.maps.maps()[n].table() == pushed.as_slice())
                .map(|k| iso_y.apply(k));
            // C(B, g) after the iso on X.
            let f = &cbx.maps()[iso_x.apply(gi)];
            let composed: Vec<usize> = f.table().iter().map(|&xi| g.apply(xi)).collect();
            let direct = cby.position(&composed);
            upper_morphisms &= via_gamma.is_some() && via_gamma == direct;
        }
    }
    Ok(TriangleReport {
        upper_objects: iso_x.is_homeomorphism(),
        lower_objects,
        upper_morphisms,
    })
}

//! Pullbacks of étalés along base maps, RLE-spaces with inverse morphisms,
//! and the section functor.

use std::collections::HashMap;

use crate::bundle::{
    is_bundle_morphism, pointwise_rl_on_sections, rl_bundle_morphism_violation, verify_rl_bundle, Bundle, RlBundle,
    SectionAlgebra, StalkAlgebra, StalkOps,
};
use crate::error::{Error, Result};
use crate::fintop::{pullback_space, SpaceMap};
use crate::rlcore::{morphism_violation, Op, RlMorphism};

/// `f*T = {(b|s) | f(b) = π(s)}` over the domain of `f`.
#[derive(Clone, Debug)]
pub struct PullbackEtale {
    along: SpaceMap,
    source: Bundle,
    result: Bundle,
    fprime: SpaceMap,
    index: HashMap<(usize, usize), usize>,
}

impl PullbackEtale {
    pub fn along(&self) -> &SpaceMap {
        &self.along
    }

    pub fn source(&self) -> &Bundle {
        &self.source
    }

    pub fn result(&self) -> &Bundle {
        &self.result
    }

    /// `f′: f*T → T`.
    pub fn fprime(&self) -> &SpaceMap {
        &self.fprime
    }

    /// The point `(b|s)`, if `f(b) = π(s)`.
    pub fn pair(&self, b: usize, s: usize) -> Option<usize> {
        self.index.get(&(b, s)).copied()
    }

    /// Whether `π′` and `f′` close a commuting square with `f` and `π`.
    pub fn commutes(&self) -> bool {
        let p = self.result.proj();
        (0..self.fprime.dom().len())
            .all(|k| self.along.apply(p.apply(k)) == self.source.proj().apply(self.fprime.apply(k)))
    }
}

pub fn pullback_etale(f: &SpaceMap, e: &Bundle) -> Result<PullbackEtale> {
    if !f.is_continuous() {
        return Err(Error::NotContinuous("base map".into()));
    }
    let (_, p1, p2) = pullback_space(f, e.proj())?;
    let index = (0..p1.dom().len()).map(|k| ((p1.apply(k), p2.apply(k)), k)).collect();
    let result = Bundle::new(p1)?;
    if e.is_etale() && !result.is_etale() {
        return Err(Error::NotEtale("pullback of an etale space".into()));
    }
    Ok(PullbackEtale {
        along: f.clone(),
        source: e.clone(),
        result,
        fprime: p2,
        index,
    })
}

/// `f*h(b|s) = (b|h(s))`, between two pullbacks along the same map.
pub fn pullback_morphism(h: &SpaceMap, src: &PullbackEtale, dst: &PullbackEtale) -> Result<SpaceMap> {
    if src.along != dst.along {
        return Err(Error::Precondition("pullbacks along different maps".into()));
    }
    if !is_bundle_morphism(h, &src.source, &dst.source) {
        return Err(Error::Precondition("not a bundle morphism".into()));
    }
    let p = src.result.proj();
    let table = (0..p.dom().len())
        .map(|k| {
            dst.pair(p.apply(k), h.apply(src.fprime.apply(k)))
                .expect("h preserves fibres")
        })
        .collect();
    SpaceMap::new(src.result.total().clone(), dst.result.total().clone(), table)
}

/// `(b|s) ⋄ (b|t) = (b|s ⋄ t)`, with constants `(b|0_{f(b)})`, `(b|1_{f(b)})`.
pub fn pullback_rl_etale(f: &SpaceMap, re: &RlBundle) -> Result<(PullbackEtale, RlBundle)> {
    let pb = pullback_etale(f, re.bundle())?;
    let rb = transport_ops(&pb, re)?;
    Ok((pb, rb))
}

fn transport_ops(pb: &PullbackEtale, re: &RlBundle) -> Result<RlBundle> {
    let r = &pb.result;
    let stalks = (0..r.base().len())
        .map(|b| {
            let pts: Vec<usize> = r.stalk_points(b).iter().collect();
            if pts.is_empty() {
                return None;
            }
            let c = pb.along.apply(b);
            let lift = |s: usize| r.local_index(pb.pair(b, s).expect("same fibre"));
            let tab = |op: Op| -> Vec<Vec<usize>> {
                pts.iter()
                    .map(|&i| {
                        pts.iter()
                            .map(|&j| lift(re.op(op, pb.fprime.apply(i), pb.fprime.apply(j)).expect("same stalk")))
                            .collect()
                    })
                    .collect()
            };
            Some(StalkAlgebra {
                join: tab(Op::Join),
                meet: tab(Op::Meet),
                mul: tab(Op::Mul),
                imp: tab(Op::Imp),
                zero: lift(re.zero(c).expect("non-empty stalk")),
                one: lift(re.one(c).expect("non-empty stalk")),
            })
        })
        .collect();
    RlBundle::new(r.clone(), StalkOps { stalks })
}

/// Why `f′` fails to restrict to a morphism from the stalk over `b` onto the
/// stalk over `f(b)`, for some `b`.
pub fn fprime_stalk_violation(pb: &PullbackEtale, pulled: &RlBundle, re: &RlBundle) -> Option<String> {
    let r = &pb.result;
    for b in 0..r.base().len() {
        let c = pb.along.apply(b);
        let (Some(l), Some(m)) = (pulled.stalk_rl(b), re.stalk_rl(c)) else {
            return Some(format!("no algebra over `{}`", r.base().name(b)));
        };
        let table: Vec<usize> = r
            .stalk_points(b)
            .iter()
            .map(|k| re.bundle().local_index(pb.fprime.apply(k)))
            .collect();
        if let Some(v) = morphism_violation(l, m, &table) {
            return Some(format!("over `{}`: {v}", r.base().name(b)));
        }
    }
    None
}

/// `λ: (g∘f)*T → f*(g*T)`, `(b|t) ↦ (b|(f(b)|t))`.
#[derive(Clone, Debug)]
pub struct LambdaIso {
    pub outer: PullbackEtale,
    pub inner: PullbackEtale,
    pub nested: PullbackEtale,
    pub map: SpaceMap,
}

impl LambdaIso {
    /// Whether `map` is a homeomorphism over the base.
    pub fn is_iso(&self) -> bool {
        self.map.is_homeomorphism() && is_bundle_morphism(&self.map, &self.outer.result, &self.nested.result)
    }
}

pub fn lambda_iso(f: &SpaceMap, g: &SpaceMap, e: &Bundle) -> Result<LambdaIso> {
    let gf = f.then(g)?;
    let outer = pullback_etale(&gf, e)?;
    let inner = pullback_etale(g, e)?;
    let nested = pullback_etale(f, &inner.result)?;
    let p = outer.result.proj();
    let table = (0..p.dom().len())
        .map(|k| {
            let b = p.apply(k);
            let t = outer.fprime.apply(k);
            let mid = inner.pair(f.apply(b), t).expect("g(f(b)) = π(t)");
            nested.pair(b, mid).expect("f(b) = π′(mid)")
        })
        .collect();
    let map = SpaceMap::new(outer.result.total().clone(), nested.result.total().clone(), table)?;
    Ok(LambdaIso {
        outer,
        inner,
        nested,
        map,
    })
}

/// A base space with an étalé of residuated lattices over it.
#[derive(Clone, Debug)]
pub struct RleSpace {
    etale: RlBundle,
}

impl RleSpace {
    pub fn new(etale: RlBundle) -> Result<Self> {
        if !etale.bundle().is_etale() {
            return Err(Error::NotEtale("projection is not a local homeomorphism".into()));
        }
        let report = verify_rl_bundle(&etale)?;
        if !report.is_valid() {
            return Err(Error::InvalidBundle(report.summary().join("; ")));
        }
        Ok(RleSpace { etale })
    }

    pub fn etale(&self) -> &RlBundle {
        &self.etale
    }

    pub fn bundle(&self) -> &Bundle {
        self.etale.bundle()
    }
}

/// `(f, α)`: a base map `f: B → C` and an RL-étalé morphism `α: f*T_C → T_B`.
#[derive(Clone, Debug)]
pub struct RleInvMorphism {
    src: RleSpace,
    dst: RleSpace,
    f: SpaceMap,
    pullback: PullbackEtale,
    pulled: RlBundle,
    alpha: SpaceMap,
}

impl PartialEq for RleInvMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
            && self.src.bundle() == other.src.bundle()
            && self.dst.bundle() == other.dst.bundle()
            && self.alpha.table() == other.alpha.table()
    }
}

impl RleInvMorphism {
    /// `alpha` is a table over the points of `f*T_C`, in pair-id order.
    pub fn new(src: &RleSpace, dst: &RleSpace, f: SpaceMap, alpha: Vec<usize>) -> Result<Self> {
        if f.dom() != src.bundle().base() || f.cod() != dst.bundle().base() {
            return Err(Error::CodomainMismatch);
        }
        let (pullback, pulled) = pullback_rl_etale(&f, dst.etale())?;
        let alpha = SpaceMap::new(pullback.result.total().clone(), src.bundle().total().clone(), alpha)?;
        if let Some(v) = rl_bundle_morphism_violation(&alpha, &pulled, src.etale()) {
            return Err(Error::NotAMorphism(v));
        }
        Ok(RleInvMorphism {
            src: src.clone(),
            dst: dst.clone(),
            f,
            pullback,
            pulled,
            alpha,
        })
    }

    /// `(1, (b|t) ↦ t)`.
    pub fn identity(x: &RleSpace) -> Self {
        let f = SpaceMap::identity(x.bundle().base().clone());
        let (pullback, _) = pullback_rl_etale(&f, x.etale()).expect("identity pullback");
        let table = pullback.fprime.table().to_vec();
        Self::new(x, x, f, table).expect("second projection is a morphism")
    }

    /// Every valid `α` over a fixed base map.
    pub fn all_over(src: &RleSpace, dst: &RleSpace, f: &SpaceMap) -> Result<Vec<Self>> {
        let (pullback, _) = pullback_rl_etale(f, dst.etale())?;
        let maps = pullback.result.base_compatible_maps(src.bundle(), true)?;
        Ok(maps
            .into_iter()
            .filter_map(|a| Self::new(src, dst, f.clone(), a.table().to_vec()).ok())
            .collect())
    }

    pub fn src(&self) -> &RleSpace {
        &self.src
    }

    pub fn dst(&self) -> &RleSpace {
        &self.dst
    }

    pub fn f(&self) -> &SpaceMap {
        &self.f
    }

    pub fn alpha(&self) -> &SpaceMap {
        &self.alpha
    }

    pub fn pullback(&self) -> &PullbackEtale {
        &self.pullback
    }

    /// `f*T_C` with its transported operations.
    pub fn pulled(&self) -> &RlBundle {
        &self.pulled
    }

    /// `α(b|t)` for `t` over `f(b)`.
    pub fn alpha_at(&self, b: usize, t: usize) -> Option<usize> {
        self.pullback.pair(b, t).map(|k| self.alpha.apply(k))
    }
}

/// `(g, β) ∘ (f, α) = (g∘f, α ∘ f*β ∘ λ)`.
pub fn compose_rle_inv(m1: &RleInvMorphism, m2: &RleInvMorphism) -> Result<RleInvMorphism> {
    if m1.dst.bundle() != m2.src.bundle() {
        return Err(Error::CodomainMismatch);
    }
    let lam = lambda_iso(&m1.f, &m2.f, m2.dst.bundle())?;
    // f*β: f*(g*T_D) → f*T_C, read through point ids of g*T_D.
    let nested = &lam.nested;
    let own = m2.pullback.result.total();
    let fb_table: Vec<usize> = (0..nested.result.total().len())
        .map(|k| {
            let b = nested.result.proj().apply(k);
            let mid = nested.fprime.apply(k);
            let mid = own.index_of(nested.source.total().name(mid)).expect("same pullback");
            m1.pullback.pair(b, m2.alpha.apply(mid)).expect("β preserves fibres")
        })
        .collect();
    let fbeta = SpaceMap::new(
        nested.result.total().clone(),
        m1.pullback.result.total().clone(),
        fb_table,
    )?;
    let alpha = lam.map.then(&fbeta)?.then(&m1.alpha)?;
    RleInvMorphism::new(&m1.src, &m2.dst, m1.f.then(&m2.f)?, alpha.table().to_vec())
}

/// `Γ(B, T_B)` with pointwise operations.
pub fn section_functor_object(x: &RleSpace) -> Result<SectionAlgebra> {
    pointwise_rl_on_sections(x.etale(), &x.bundle().base().full())
}

/// `𝒮(f, α)(σ)(b) = α(b|σ(f(b)))`, from `Γ(C)` to `Γ(B)`.
pub fn section_functor_morphism(m: &RleInvMorphism) -> Result<(SectionAlgebra, SectionAlgebra, RlMorphism)> {
    let gc = section_functor_object(&m.dst)?;
    let gb = section_functor_object(&m.src)?;
    let src_bundle = m.src.bundle();
    let base = src_bundle.base();
    let table = gc
        .sections
        .iter()
        .map(|sigma| {
            let mut values = vec![usize::MAX; base.len()];
            for b in 0..base.len() {
                let t = sigma.at(m.f.apply(b)).expect("global section");
                values[b] = m.alpha_at(b, t).expect("t lies over f(b)");
            }
            let s = src_bundle.section(base.full(), values)?;
            gb.element_of(&s).ok_or_else(|| Error::NotASection(s.id(src_bundle)))
        })
        .collect::<Result<_>>()?;
    let morphism = RlMorphism::new(gc.algebra.clone(), gb.algebra.clone(), table)?;
    Ok((gc, gb, morphism))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn inclusion_pullback_is_the_stalk() {
        let rb = fixtures::etspecha4();
        let base = rb.bundle().base().clone();
        let pt = fixtures::point();
        let f = SpaceMap::from_pairs(pt, base, &[("*", "{1,a}")]).unwrap();
        let (pb, prb) = pullback_rl_etale(&f, &rb).unwrap();
        assert_eq!(pb.result().total().points(), ["(*|0_1)", "(*|1_1)"]);
        assert!(pb.result().is_etale() && pb.commutes());
        assert!(verify_rl_bundle(&prb).unwrap().is_valid());
    }

    #[test]
    fn fold_pullback_doubles_points() {
        let w = fixtures::discrete(&["u", "v"]);
        let rb = fixtures::trivial_rl_bundle(&fixtures::point(), &fixtures::a2());
        let f = SpaceMap::constant(w, fixtures::point(), 0).unwrap();
        let (pb, prb) = pullback_rl_etale(&f, &rb).unwrap();
        assert_eq!(pb.result().total().len(), 4);
        assert!(verify_rl_bundle(&prb).unwrap().is_valid());
    }

    #[test]
    fn identity_laws_on_etspecha4() {
        let x = RleSpace::new(fixtures::etspecha4()).unwrap();
        let id = RleInvMorphism::identity(&x);
        assert_eq!(compose_rle_inv(&id, &id).unwrap(), id);
        let (_, _, s) = section_functor_morphism(&id).unwrap();
        assert_eq!(s.table(), (0..4).collect::<Vec<_>>());
    }
}

//! Worked examples: the small algebras, the spaces built from their
//! spectra, and the étalé spaces of residuated lattices over them.

use std::sync::Arc;

use crate::bits::BitSet;
use crate::bundle::{Bundle, RlBundle};
use crate::fintop::{pair_id, product, FiniteSpace, Space, SpaceMap};
use crate::rlcore::{ResiduatedLattice, Rl, RlBuilder};
use crate::spectra::{spectral_space, Flavor, PrimeSet, SpectrumConfig};

fn build(elements: &[&str], hasse: &[(&str, &str)], rows: &[(&str, &str)]) -> Rl {
    let mut b = RlBuilder::new(elements).hasse(hasse);
    for (x, row) in rows {
        let start = elements.iter().position(|e| e == x).expect("row label");
        let cols = &elements[start..];
        let cells: Vec<String> = row.chars().map(|c| c.to_string()).collect();
        let cells: Vec<&str> = cells.iter().map(|s| s.as_str()).collect();
        b = b.mul_row(x, cols, &cells).expect("consistent row");
    }
    Arc::new(b.build().expect("fixture algebra"))
}

/// The two-element Boolean algebra.
pub fn a2() -> Rl {
    build(&["0", "1"], &[("0", "1")], &[("0", "00"), ("1", "1")])
}

/// The three-element Gödel chain `0 < a < 1`, with `⊙ = ∧`.
pub fn a3() -> Rl {
    build(
        &["0", "a", "1"],
        &[("0", "a"), ("a", "1")],
        &[("0", "000"), ("a", "aa"), ("1", "1")],
    )
}

pub fn a4() -> Rl {
    build(
        &["0", "a", "b", "1"],
        &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        &[("0", "0000"), ("a", "a0a"), ("b", "bb"), ("1", "1")],
    )
}

pub fn a6() -> Rl {
    build(
        &["0", "a", "b", "c", "d", "1"],
        &[("0", "a"), ("a", "b"), ("0", "c"), ("c", "d"), ("b", "d"), ("d", "1")],
        &[
            ("0", "000000"),
            ("a", "aa0aa"),
            ("b", "a0ab"),
            ("c", "ccc"),
            ("d", "dd"),
            ("1", "1"),
        ],
    )
}

/// The eight-element example. Row `a` reads `a⊙a = a`, `a⊙b = 0`.
pub fn a8() -> Rl {
    build(
        &["0", "a", "b", "c", "d", "e", "f", "1"],
        &[
            ("0", "a"),
            ("0", "b"),
            ("b", "d"),
            ("d", "f"),
            ("f", "1"),
            ("a", "d"),
            ("a", "c"),
            ("c", "e"),
            ("d", "e"),
            ("e", "1"),
        ],
        &[
            ("0", "00000000"),
            ("a", "a0aaaaa"),
            ("b", "0000bb"),
            ("c", "cacac"),
            ("d", "aadd"),
            ("e", "cde"),
            ("f", "ff"),
            ("1", "1"),
        ],
    )
}

pub fn point() -> Space {
    FiniteSpace::point("*").into_shared()
}

pub fn sierpinski() -> Space {
    FiniteSpace::new(&["x", "y"], &[vec![], vec!["x"], vec!["x", "y"]])
        .expect("sierpinski")
        .into_shared()
}

pub fn discrete(points: &[&str]) -> Space {
    FiniteSpace::discrete(points).expect("discrete").into_shared()
}

pub fn indiscrete(points: &[&str]) -> Space {
    FiniteSpace::indiscrete(points).expect("indiscrete").into_shared()
}

pub fn spec_h_a4() -> Space {
    spectral_space(&SpectrumConfig::of(&a4(), PrimeSet::Spec, Flavor::Hull))
        .expect("spectrum")
        .into_shared()
}

pub fn max_d_a6() -> Space {
    spectral_space(&SpectrumConfig::of(&a6(), PrimeSet::Max, Flavor::Dual))
        .expect("spectrum")
        .into_shared()
}

pub fn min_p_a8() -> Space {
    spectral_space(&SpectrumConfig::of(&a8(), PrimeSet::Min, Flavor::Patch))
        .expect("spectrum")
        .into_shared()
}

/// Renames the elements of `l` with `f`.
pub fn renamed(l: &ResiduatedLattice, f: impl Fn(&str) -> String) -> Rl {
    let mut c = l.candidate();
    c.elements = c.elements.iter().map(|e| f(e)).collect();
    Arc::new(ResiduatedLattice::from_candidate(&c).expect("renaming keeps the axioms"))
}

/// Disjoint union of copies of algebras, one per base point, with point ids
/// `x_k` for element `x` of the `k`-th copy, over a base.
///
/// `total` is the topology on the listed points; `None` means discrete.
pub fn copies_over(base: Space, stalks: &[(&str, Rl)], total: Option<Space>) -> RlBundle {
    let mut names = Vec::new();
    let mut over = Vec::new();
    let mut algebras: Vec<Option<Rl>> = vec![None; base.len()];
    for (k, (b, l)) in stalks.iter().enumerate() {
        let suffix = k + 1;
        let copy = renamed(l, |e| format!("{e}_{suffix}"));
        for e in copy.elements() {
            names.push(e.clone());
            over.push(b.to_string());
        }
        algebras[base.idx(b).expect("base point")] = Some(copy);
    }
    let total = total.unwrap_or_else(|| FiniteSpace::discrete(&names).expect("total").into_shared());
    let pairs: Vec<(String, String)> = names.into_iter().zip(over).collect();
    let proj = SpaceMap::from_pairs(total, base, &pairs).expect("projection");
    let bundle = Bundle::new(proj).expect("continuous projection");
    let algebras: Vec<Rl> = algebras
        .into_iter()
        .map(|a| a.expect("every base point has a stalk"))
        .collect();
    RlBundle::from_stalk_rls(bundle, &algebras).expect("stalk tables")
}

/// `A2 ⊔ A2` over the hull-kernel spectrum of A4, discrete.
pub fn etspecha4() -> RlBundle {
    copies_over(spec_h_a4(), &[("{1,a}", a2()), ("{1,b}", a2())], None)
}

/// `A2 ⊔ A3` over the dual maximal spectrum of A6, discrete.
pub fn etmaxda6() -> RlBundle {
    copies_over(max_d_a6(), &[("{1,a,b,d}", a2()), ("{1,c,d}", a3())], None)
}

/// `A3 ⊔ A4` over the patch minimal spectrum of A8, discrete.
pub fn etminpa8() -> RlBundle {
    copies_over(min_p_a8(), &[("{1,c,e}", a3()), ("{1,f}", a4())], None)
}

/// Two copies of A2 over one point with the indiscrete topology on the total space.
pub fn indiscrete_a2_over_point() -> RlBundle {
    let total = indiscrete(&["0_1", "1_1"]);
    copies_over(point(), &[("*", a2())], Some(total))
}

/// `A2 ⊔ A2` over the hull-kernel spectrum of A4, with each stalk indiscrete.
pub fn etspecha4_coarse() -> RlBundle {
    let names = ["0_1", "0_2", "1_1", "1_2"];
    let nbhd: Vec<BitSet> = vec![
        [0, 2].into_iter().collect(),
        [1, 3].into_iter().collect(),
        [0, 2].into_iter().collect(),
        [1, 3].into_iter().collect(),
    ];
    let total = FiniteSpace::from_neighbourhoods(names.iter().map(|s| s.to_string()).collect(), nbhd)
        .expect("total")
        .into_shared();
    copies_over(spec_h_a4(), &[("{1,a}", a2()), ("{1,b}", a2())], Some(total))
}

/// `B × A` with the discrete topology on `A`, projecting to `B`. Points are `(b|x)`.
pub fn trivial_rl_bundle(base: &Space, l: &Rl) -> RlBundle {
    let ad = FiniteSpace::discrete(l.elements()).expect("discrete").into_shared();
    let (_, p1, _) = product(base, &ad).expect("product");
    let bundle = Bundle::new(p1).expect("projection");
    let algebras: Vec<Rl> = base.points().iter().map(|b| renamed(l, |e| pair_id(b, e))).collect();
    RlBundle::from_stalk_rls(bundle, &algebras).expect("stalk tables")
}

/// An étalé over the Sierpiński space with stalk A4 over the open point and
/// A2 over the closed point; the germs at `y` restrict along `A2 ↪ A4`.
pub fn sierpinski_a2_a4() -> RlBundle {
    let names: Vec<String> = ["0_x", "a_x", "b_x", "1_x", "0_y", "1_y"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let nbhd: Vec<BitSet> = vec![
        BitSet::singleton(0),
        BitSet::singleton(1),
        BitSet::singleton(2),
        BitSet::singleton(3),
        [4, 0].into_iter().collect(),
        [5, 3].into_iter().collect(),
    ];
    let total = FiniteSpace::from_neighbourhoods(names.clone(), nbhd)
        .expect("total")
        .into_shared();
    let base = sierpinski();
    let pairs: Vec<(String, String)> = names
        .iter()
        .map(|n| (n.clone(), n[n.len() - 1..].to_string()))
        .collect();
    let proj = SpaceMap::from_pairs(total, base, &pairs).expect("projection");
    let bundle = Bundle::new(proj).expect("continuous");
    let ax = renamed(&a4(), |e| format!("{e}_x"));
    let ay = renamed(&a2(), |e| format!("{e}_y"));
    RlBundle::from_stalk_rls(bundle, &[ax, ay]).expect("stalk tables")
}

/// The morphism `A6 → A4` with `0↦0, a,b↦a, c↦b, d,1↦1`.
pub fn a6_to_a4() -> crate::rlcore::RlMorphism {
    crate::rlcore::RlMorphism::from_pairs(
        a6(),
        a4(),
        &[("0", "0"), ("a", "a"), ("b", "a"), ("c", "b"), ("d", "1"), ("1", "1")],
    )
    .expect("morphism")
}

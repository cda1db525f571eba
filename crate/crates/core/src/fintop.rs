//! Finite topological spaces and continuous maps.
//!
//! A space keeps its whole open family. Every finite space is Alexandrov,
//! so each point also has a least open neighbourhood `U_x`; most checks go
//! through those and the set-family scans are kept as cross-checks.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bits::{BitSet, CAPACITY};
use crate::error::{Error, Result};

/// Upper bound on the size of an explicit open family.
pub const MAX_OPENS: usize = 1 << 20;

pub type Space = Arc<FiniteSpace>;

/// Id of the pair `(a, b)` in products, kernel pairs and pullbacks.
pub fn pair_id(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

/// Canonical ordering key for subsets: by size, then by members.
pub(crate) fn set_key(s: &BitSet) -> (usize, Vec<usize>) {
    (s.len(), s.iter().collect())
}

#[derive(Clone)]
pub struct FiniteSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
    nbhd: Vec<BitSet>,
    /// Filled on first use; `None` when there are too many to list.
    opens: OnceLock<Option<Vec<BitSet>>>,
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.nbhd == other.nbhd
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nbhd: Vec<Vec<&str>> = self
            .nbhd
            .iter()
            .map(|o| o.iter().map(|i| self.points[i].as_str()).collect())
            .collect();
        f.debug_struct("FiniteSpace")
            .field("points", &self.points)
            .field("nbhd", &nbhd)
            .finish()
    }
}

fn check_ids(points: &[String]) -> Result<()> {
    if points.len() > CAPACITY {
        return Err(Error::TooManyPoints(points.len()));
    }
    let mut seen = HashSet::new();
    for p in points {
        if !seen.insert(p.as_str()) {
            return Err(Error::DuplicateId(p.clone()));
        }
    }
    Ok(())
}

/// Sorts `names` and returns the old-index to new-index permutation.
pub(crate) fn sort_permutation(names: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut new_of_old = vec![0; names.len()];
    for (new, &old) in order.iter().enumerate() {
        new_of_old[old] = new;
    }
    new_of_old
}

pub(crate) fn remap(s: &BitSet, perm: &[usize]) -> BitSet {
    s.iter().map(|i| perm[i]).collect()
}

fn opens_from_nbhd(nbhd: &[BitSet]) -> Result<Vec<BitSet>> {
    let mut seen: HashSet<BitSet> = HashSet::new();
    let mut stack = vec![BitSet::empty()];
    seen.insert(BitSet::empty());
    while let Some(o) = stack.pop() {
        for (x, u) in nbhd.iter().enumerate() {
            if o.contains(x) {
                continue;
            }
            let next = o.union(u);
            if seen.insert(next) {
                if seen.len() > MAX_OPENS {
                    return Err(Error::TooManyOpens(MAX_OPENS));
                }
                stack.push(next);
            }
        }
    }
    let mut opens: Vec<BitSet> = seen.into_iter().collect();
    opens.sort_by_cached_key(set_key);
    Ok(opens)
}

impl FiniteSpace {
    /// Builds a space from point ids and an explicit open family.
    pub fn new<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let named: Vec<Vec<String>> = opens
            .iter()
            .map(|o| o.iter().map(|p| p.as_ref().to_string()).collect())
            .collect();
        let report = verify_topology(&names, &named);
        if let Some(v) = report.violations.first() {
            return Err(Error::NotATopology(v.to_string()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        let index: HashMap<String, usize> = sorted.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let family: Vec<BitSet> = named.iter().map(|o| o.iter().map(|p| index[p]).collect()).collect();
        let nbhd = (0..sorted.len())
            .map(|x| {
                family
                    .iter()
                    .filter(|o| o.contains(x))
                    .fold(BitSet::full(sorted.len()), |acc, o| acc.intersection(o))
            })
            .collect();
        Self::from_sorted_nbhd(sorted, nbhd)
    }

    /// Builds a space from least neighbourhoods, given in the order of `points`.
    ///
    /// Fails unless `x ∈ U_x` and `y ∈ U_x ⇒ U_y ⊆ U_x`.
    pub fn from_neighbourhoods(points: Vec<String>, nbhd: Vec<BitSet>) -> Result<Self> {
        check_ids(&points)?;
        if nbhd.len() != points.len() {
            return Err(Error::NotATopology("one neighbourhood per point required".into()));
        }
        let n = points.len();
        let full = BitSet::full(n);
        for (x, u) in nbhd.iter().enumerate() {
            if !u.is_subset(&full) {
                return Err(Error::NotATopology(format!(
                    "neighbourhood of `{}` leaves the carrier",
                    points[x]
                )));
            }
            if !u.contains(x) {
                return Err(Error::NotATopology(format!(
                    "`{}` is not in its neighbourhood",
                    points[x]
                )));
            }
            for y in u.iter() {
                if !nbhd[y].is_subset(u) {
                    return Err(Error::NotATopology(format!(
                        "neighbourhoods of `{}` and `{}` are not nested",
                        points[x], points[y]
                    )));
                }
            }
        }
        let perm = sort_permutation(&points);
        let mut sorted = vec![String::new(); n];
        let mut sorted_nbhd = vec![BitSet::empty(); n];
        for old in 0..n {
            sorted[perm[old]] = points[old].clone();
            sorted_nbhd[perm[old]] = remap(&nbhd[old], &perm);
        }
        Self::from_sorted_nbhd(sorted, sorted_nbhd)
    }

    fn from_sorted_nbhd(points: Vec<String>, nbhd: Vec<BitSet>) -> Result<Self> {
        check_ids(&points)?;
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Ok(FiniteSpace {
            points,
            index,
            nbhd,
            opens: OnceLock::new(),
        })
    }

    /// The topology generated by `family` as a subbasis. Sets index into `points`.
    pub fn generated_by(points: Vec<String>, family: &[BitSet]) -> Result<Self> {
        check_ids(&points)?;
        let n = points.len();
        let nbhd = (0..n)
            .map(|x| {
                family
                    .iter()
                    .filter(|s| s.contains(x))
                    .fold(BitSet::full(n), |acc, s| acc.intersection(s))
            })
            .collect();
        Self::from_neighbourhoods(points, nbhd)
    }

    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Result<Self> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let nbhd = (0..names.len()).map(BitSet::singleton).collect();
        Self::from_neighbourhoods(names, nbhd)
    }

    pub fn indiscrete<S: AsRef<str>>(points: &[S]) -> Result<Self> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let n = names.len();
        Self::from_neighbourhoods(names, vec![BitSet::full(n); n])
    }

    pub fn point(name: &str) -> Self {
        Self::discrete(&[name]).expect("one point")
    }

    pub fn empty() -> Self {
        Self::discrete::<&str>(&[]).expect("empty space")
    }

    pub fn into_shared(self) -> Space {
        Arc::new(self)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn idx(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownId(name.to_string()))
    }

    pub fn full(&self) -> BitSet {
        BitSet::full(self.len())
    }

    /// [`Self::opens`] for the enumerating checks.
    ///
    /// # Panics
    /// When the space has too many opens to list.
    pub fn listed_opens(&self) -> &[BitSet] {
        self.opens().expect("open family small enough to enumerate")
    }

    /// All opens, ordered by size and then by members. Listed on first use.
    pub fn opens(&self) -> Result<&[BitSet]> {
        self.opens
            .get_or_init(|| opens_from_nbhd(&self.nbhd).ok())
            .as_deref()
            .ok_or(Error::TooManyOpens(MAX_OPENS))
    }

    /// Least open set containing point `x`.
    pub fn nbhd(&self, x: usize) -> BitSet {
        self.nbhd[x]
    }

    pub fn neighbourhoods(&self) -> &[BitSet] {
        &self.nbhd
    }

    /// Least open set containing `p`, by name.
    pub fn minimal_neighborhood(&self, p: &str) -> Result<Vec<String>> {
        Ok(self.names(&self.nbhd[self.idx(p)?]))
    }

    pub fn is_open(&self, s: &BitSet) -> bool {
        s.iter().all(|x| self.nbhd[x].is_subset(s))
    }

    pub fn is_closed(&self, s: &BitSet) -> bool {
        self.is_open(&self.full().difference(s))
    }

    /// Finite Hausdorff spaces are exactly the discrete ones.
    pub fn is_discrete(&self) -> bool {
        self.nbhd.iter().all(|u| u.len() == 1)
    }

    pub fn is_t1(&self) -> bool {
        (0..self.len()).all(|x| self.is_closed(&BitSet::singleton(x)))
    }

    pub fn names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.points[i].clone()).collect()
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<BitSet> {
        names.iter().map(|n| self.idx(n.as_ref())).collect()
    }

    /// Opens as sorted name lists.
    pub fn named_opens(&self) -> Result<Vec<Vec<String>>> {
        Ok(self.opens()?.iter().map(|o| self.names(o)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyViolation {
    DuplicatePoint(String),
    UnknownPoint { set: Vec<String>, point: String },
    MissingEmpty,
    MissingFull,
    MissingUnion { left: Vec<String>, right: Vec<String> },
    MissingIntersection { left: Vec<String>, right: Vec<String> },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn show(s: &[String]) -> String {
            format!("{{{}}}", s.join(","))
        }
        match self {
            Self::DuplicatePoint(p) => write!(f, "point `{p}` listed twice"),
            Self::UnknownPoint { set, point } => {
                write!(f, "open {} mentions unknown point `{point}`", show(set))
            }
            Self::MissingEmpty => write!(f, "empty set is not open"),
            Self::MissingFull => write!(f, "whole space is not open"),
            Self::MissingUnion { left, right } => {
                write!(f, "union of {} and {} is not open", show(left), show(right))
            }
            Self::MissingIntersection { left, right } => {
                write!(f, "intersection of {} and {} is not open", show(left), show(right))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TopologyReport {
    pub violations: Vec<TopologyViolation>,
}

impl TopologyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a candidate open family. Each missing union or intersection is
/// reported once, with the first pair of opens that produces it.
pub fn verify_topology<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> TopologyReport {
    let mut violations = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for p in points {
        if index.insert(p.as_ref(), index.len()).is_some() {
            violations.push(TopologyViolation::DuplicatePoint(p.as_ref().to_string()));
        }
    }
    if points.len() > CAPACITY {
        violations.push(TopologyViolation::UnknownPoint {
            set: vec![],
            point: format!("<{} points exceed capacity>", points.len()),
        });
        return TopologyReport { violations };
    }
    let mut family: Vec<BitSet> = Vec::new();
    for o in opens {
        let mut s = BitSet::empty();
        for p in o {
            match index.get(p.as_ref()) {
                Some(&i) => s.insert(i),
                None => violations.push(TopologyViolation::UnknownPoint {
                    set: o.iter().map(|p| p.as_ref().to_string()).collect(),
                    point: p.as_ref().to_string(),
                }),
            }
        }
        family.push(s);
    }
    if !violations.is_empty() {
        return TopologyReport { violations };
    }
    let mut names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
    names.sort();
    let by_name = |s: &BitSet| -> Vec<String> {
        let mut v: Vec<String> = s.iter().map(|i| points[i].as_ref().to_string()).collect();
        v.sort();
        v
    };
    let set: HashSet<BitSet> = family.iter().copied().collect();
    if !set.contains(&BitSet::empty()) {
        violations.push(TopologyViolation::MissingEmpty);
    }
    if !set.contains(&BitSet::full(points.len())) {
        violations.push(TopologyViolation::MissingFull);
    }
    let mut distinct: Vec<BitSet> = set.iter().copied().collect();
    distinct.sort_by_cached_key(|s| (s.len(), by_name(s)));
    let mut missing_union = HashSet::new();
    let mut missing_inter = HashSet::new();
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            let u = a.union(b);
            if !set.contains(&u) && missing_union.insert(u) {
                violations.push(TopologyViolation::MissingUnion {
                    left: by_name(a),
                    right: by_name(b),
                });
            }
            let m = a.intersection(b);
            if !set.contains(&m) && missing_inter.insert(m) {
                violations.push(TopologyViolation::MissingIntersection {
                    left: by_name(a),
                    right: by_name(b),
                });
            }
        }
    }
    TopologyReport { violations }
}

/// A total function between the carriers of two finite spaces.
#[derive(Clone)]
pub struct SpaceMap {
    dom: Space,
    cod: Space,
    table: Vec<usize>,
}

fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for SpaceMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && same_space(&self.dom, &other.dom) && same_space(&self.cod, &other.cod)
    }
}

impl Eq for SpaceMap {}

impl fmt::Debug for SpaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.named_table()).finish()
    }
}

impl SpaceMap {
    pub fn new(dom: Space, cod: Space, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            let missing = dom.points().get(table.len()).cloned().unwrap_or_default();
            return Err(Error::NotTotal(missing));
        }
        if let Some(&bad) = table.iter().find(|&&t| t >= cod.len()) {
            return Err(Error::UnknownId(format!("codomain index {bad}")));
        }
        Ok(SpaceMap { dom, cod, table })
    }

    /// Builds a map from `(source, target)` id pairs. Every domain point needs one pair.
    pub fn from_pairs<A: AsRef<str>, B: AsRef<str>>(dom: Space, cod: Space, pairs: &[(A, B)]) -> Result<Self> {
        let mut table = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let i = dom.idx(a.as_ref())?;
            let j = cod.idx(b.as_ref())?;
            if table[i] != usize::MAX && table[i] != j {
                return Err(Error::DuplicateId(a.as_ref().to_string()));
            }
            table[i] = j;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(Error::NotTotal(dom.name(i).to_string()));
        }
        Self::new(dom, cod, table)
    }

    pub fn identity(space: Space) -> Self {
        let table = (0..space.len()).collect();
        SpaceMap {
            dom: space.clone(),
            cod: space,
            table,
        }
    }

    pub fn constant(dom: Space, cod: Space, target: usize) -> Result<Self> {
        let table = vec![target; dom.len()];
        Self::new(dom, cod, table)
    }

    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn apply_name(&self, x: &str) -> Option<&str> {
        let i = self.dom.index_of(x)?;
        Some(self.cod.name(self.table[i]))
    }

    pub fn named_table(&self) -> Vec<(String, String)> {
        self.table
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.dom.name(i).to_string(), self.cod.name(j).to_string()))
            .collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SpaceMap) -> Result<SpaceMap> {
        if !same_space(&self.cod, &g.dom) {
            return Err(Error::CodomainMismatch);
        }
        let table = self.table.iter().map(|&y| g.table[y]).collect();
        Ok(SpaceMap {
            dom: self.dom.clone(),
            cod: g.cod.clone(),
            table,
        })
    }

    pub fn image(&self, s: &BitSet) -> BitSet {
        s.iter().map(|x| self.table[x]).collect()
    }

    pub fn preimage(&self, s: &BitSet) -> BitSet {
        (0..self.table.len()).filter(|&x| s.contains(self.table[x])).collect()
    }

    pub fn is_injective_on(&self, s: &BitSet) -> bool {
        self.image(s).len() == s.len()
    }

    pub fn is_injective(&self) -> bool {
        self.is_injective_on(&self.dom.full())
    }

    pub fn is_surjective(&self) -> bool {
        self.image(&self.dom.full()).len() == self.cod.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// First domain point at which continuity fails, if any.
    pub fn continuity_witness(&self) -> Option<usize> {
        (0..self.dom.len()).find(|&x| !self.image(&self.dom.nbhd(x)).is_subset(&self.cod.nbhd(self.table[x])))
    }

    pub fn is_continuous(&self) -> bool {
        self.continuity_witness().is_none()
    }

    /// Continuity by scanning preimages of every codomain open.
    pub fn is_continuous_by_preimages(&self) -> bool {
        self.cod
            .listed_opens()
            .iter()
            .all(|v| self.dom.is_open(&self.preimage(v)))
    }

    pub fn is_open_map(&self) -> bool {
        (0..self.dom.len()).all(|x| self.cod.is_open(&self.image(&self.dom.nbhd(x))))
    }

    /// Openness by scanning images of every domain open.
    pub fn is_open_map_by_images(&self) -> bool {
        self.dom.listed_opens().iter().all(|u| self.cod.is_open(&self.image(u)))
    }

    pub fn is_locally_injective(&self) -> bool {
        (0..self.dom.len()).all(|x| self.is_injective_on(&self.dom.nbhd(x)))
    }

    /// Local injectivity by scanning every open neighbourhood of every point.
    pub fn is_locally_injective_by_opens(&self) -> bool {
        (0..self.dom.len()).all(|x| {
            self.dom
                .listed_opens()
                .iter()
                .any(|u| u.contains(x) && self.is_injective_on(u))
        })
    }

    pub fn is_local_homeomorphism(&self) -> bool {
        self.is_continuous() && self.is_open_map() && self.is_locally_injective()
    }

    /// Whether `self` restricted to the open `v` is a homeomorphism onto an
    /// open image, checked on the explicit subspace open families.
    pub fn is_homeomorphism_onto_open_image(&self, v: &BitSet) -> bool {
        let img = self.image(v);
        if !self.cod.is_open(&img) || !self.dom.is_open(v) || !self.is_injective_on(v) {
            return false;
        }
        let dom_sub: HashSet<BitSet> = self.dom.listed_opens().iter().map(|o| o.intersection(v)).collect();
        let cod_sub: HashSet<BitSet> = self.cod.listed_opens().iter().map(|o| o.intersection(&img)).collect();
        let continuous = cod_sub
            .iter()
            .all(|w| dom_sub.contains(&self.preimage(w).intersection(v)));
        let open = dom_sub.iter().all(|w| cod_sub.contains(&self.image(w)));
        continuous && open
    }

    /// Local homeomorphism by the definition: every point lies in an open set
    /// mapped homeomorphically onto an open set.
    pub fn is_local_homeomorphism_direct(&self) -> bool {
        (0..self.dom.len()).all(|x| {
            self.dom
                .listed_opens()
                .iter()
                .any(|v| v.contains(x) && self.is_homeomorphism_onto_open_image(v))
        })
    }

    pub fn is_homeomorphism(&self) -> bool {
        self.is_bijective() && self.is_continuous() && self.is_open_map()
    }

    pub fn inverse(&self) -> Option<SpaceMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![0; self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Some(SpaceMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            table,
        })
    }

    /// Restriction to the subspace on `carrier`.
    pub fn restrict(&self, carrier: &BitSet) -> Result<SpaceMap> {
        let (sub, incl) = subspace(&self.dom, carrier)?;
        let table = incl.table.iter().map(|&x| self.table[x]).collect();
        SpaceMap::new(sub, self.cod.clone(), table)
    }

    /// Opens on which the map is a homeomorphism onto an open image.
    pub fn local_homeo_basis(&self) -> Result<Vec<BitSet>> {
        if !self.is_local_homeomorphism() {
            return Err(Error::Precondition("map is not a local homeomorphism".into()));
        }
        let basis: Vec<BitSet> = self
            .dom
            .opens()?
            .iter()
            .copied()
            .filter(|v| self.is_homeomorphism_onto_open_image(v))
            .collect();
        debug_assert!(is_basis(&self.dom, &basis));
        Ok(basis)
    }
}

/// Whether `family` is a basis: all members open and every least
/// neighbourhood is a member.
pub fn is_basis(space: &FiniteSpace, family: &[BitSet]) -> bool {
    let set: HashSet<&BitSet> = family.iter().collect();
    family.iter().all(|b| space.is_open(b)) && (0..space.len()).all(|x| set.contains(&space.nbhd(x)))
}

/// Subspace on `carrier`, with its inclusion.
pub fn subspace(s: &Space, carrier: &BitSet) -> Result<(Space, SpaceMap)> {
    if !carrier.is_subset(&s.full()) {
        return Err(Error::UnknownId("subspace carrier leaves the space".into()));
    }
    let members: Vec<usize> = carrier.iter().collect();
    let mut local = vec![usize::MAX; s.len()];
    for (k, &x) in members.iter().enumerate() {
        local[x] = k;
    }
    let names = members.iter().map(|&x| s.name(x).to_string()).collect();
    let nbhd = members
        .iter()
        .map(|&x| s.nbhd(x).intersection(carrier).iter().map(|y| local[y]).collect())
        .collect();
    let sub = Arc::new(FiniteSpace::from_neighbourhoods(names, nbhd)?);
    let incl = SpaceMap::new(sub.clone(), s.clone(), members)?;
    Ok((sub, incl))
}

/// Product space with point ids `(x|y)` and both projections.
pub fn product(a: &Space, b: &Space) -> Result<(Space, SpaceMap, SpaceMap)> {
    let n = a.len() * b.len();
    if n > CAPACITY {
        return Err(Error::TooManyPoints(n));
    }
    let mut names = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for x in 0..a.len() {
        for y in 0..b.len() {
            names.push(pair_id(a.name(x), b.name(y)));
            coords.push((x, y));
        }
    }
    let pos = |x: usize, y: usize| x * b.len() + y;
    let nbhd = coords
        .iter()
        .map(|&(x, y)| {
            let mut s = BitSet::empty();
            for u in a.nbhd(x).iter() {
                for v in b.nbhd(y).iter() {
                    s.insert(pos(u, v));
                }
            }
            s
        })
        .collect();
    let space = FiniteSpace::from_neighbourhoods(names.clone(), nbhd)?.into_shared();
    let perm = sort_permutation(&names);
    let mut t1 = vec![0; n];
    let mut t2 = vec![0; n];
    for (old, &(x, y)) in coords.iter().enumerate() {
        t1[perm[old]] = x;
        t2[perm[old]] = y;
    }
    let p1 = SpaceMap::new(space.clone(), a.clone(), t1)?;
    let p2 = SpaceMap::new(space.clone(), b.clone(), t2)?;
    Ok((space, p1, p2))
}

/// The finest topology on `carrier` making every `(space, table)` in the
/// family continuous. `table[i]` is the carrier id that point `i` goes to.
pub fn final_topology<S: AsRef<str>>(carrier: &[S], family: &[(Space, Vec<String>)]) -> Result<FiniteSpace> {
    let names: Vec<String> = carrier.iter().map(|c| c.as_ref().to_string()).collect();
    check_ids(&names)?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let n = names.len();
    // step[c] collects the points forced into every open that contains c
    let mut step = vec![BitSet::empty(); n];
    for (c, s) in step.iter_mut().enumerate() {
        s.insert(c);
    }
    for (space, table) in family {
        if table.len() != space.len() {
            return Err(Error::NotTotal(
                space.name(table.len().min(space.len().saturating_sub(1))).to_string(),
            ));
        }
        let mapped: Vec<usize> = table
            .iter()
            .map(|t| index.get(t.as_str()).copied().ok_or_else(|| Error::NotTotal(t.clone())))
            .collect::<Result<_>>()?;
        for y in 0..space.len() {
            let img: BitSet = space.nbhd(y).iter().map(|z| mapped[z]).collect();
            step[mapped[y]] = step[mapped[y]].union(&img);
        }
    }
    let mut nbhd = step.clone();
    loop {
        let mut changed = false;
        for c in 0..n {
            let grown = nbhd[c].iter().fold(nbhd[c], |acc, d| acc.union(&step[d]));
            if grown != nbhd[c] {
                nbhd[c] = grown;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    FiniteSpace::from_neighbourhoods(names, nbhd)
}

/// Fibre product `{(b|s) | f(b) = g(s)}` as a subspace of the product.
pub fn pullback_space(f: &SpaceMap, g: &SpaceMap) -> Result<(Space, SpaceMap, SpaceMap)> {
    if !same_space(f.cod(), g.cod()) {
        return Err(Error::CodomainMismatch);
    }
    let mut names = Vec::new();
    let mut coords = Vec::new();
    for b in 0..f.dom().len() {
        for s in 0..g.dom().len() {
            if f.apply(b) == g.apply(s) {
                names.push(pair_id(f.dom().name(b), g.dom().name(s)));
                coords.push((b, s));
            }
        }
    }
    if names.len() > CAPACITY {
        return Err(Error::TooManyPoints(names.len()));
    }
    let nbhd = coords
        .iter()
        .map(|&(b, s)| {
            let ub = f.dom().nbhd(b);
            let us = g.dom().nbhd(s);
            coords
                .iter()
                .enumerate()
                .filter(|(_, &(b2, s2))| ub.contains(b2) && us.contains(s2))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let space = FiniteSpace::from_neighbourhoods(names.clone(), nbhd)?.into_shared();
    let perm = sort_permutation(&names);
    let mut t1 = vec![0; names.len()];
    let mut t2 = vec![0; names.len()];
    for (old, &(b, s)) in coords.iter().enumerate() {
        t1[perm[old]] = b;
        t2[perm[old]] = s;
    }
    let p1 = SpaceMap::new(space.clone(), f.dom().clone(), t1)?;
    let p2 = SpaceMap::new(space.clone(), g.dom().clone(), t2)?;
    Ok((space, p1, p2))
}

/// Every map `dom → cod` with `f(x) ∈ allowed[x]`, optionally only the
/// continuous ones. Tables come out in lexicographic order.
pub fn enumerate_maps(dom: &FiniteSpace, cod: &FiniteSpace, allowed: &[BitSet], continuous: bool) -> Vec<Vec<usize>> {
    let n = dom.len();
    assert_eq!(allowed.len(), n);
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    fn go(
        i: usize,
        dom: &FiniteSpace,
        cod: &FiniteSpace,
        allowed: &[BitSet],
        continuous: bool,
        table: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == dom.len() {
            out.push(table.clone());
            return;
        }
        for t in allowed[i].iter() {
            table[i] = t;
            let ok = !continuous
                || (0..i).all(|j| {
                    (!dom.nbhd(i).contains(j) || cod.nbhd(t).contains(table[j]))
                        && (!dom.nbhd(j).contains(i) || cod.nbhd(table[j]).contains(t))
                });
            if ok {
                go(i + 1, dom, cod, allowed, continuous, table, out);
            }
        }
    }
    go(0, dom, cod, allowed, continuous, &mut table, &mut out);
    out
}

/// All continuous maps between two spaces.
pub fn continuous_maps(dom: &Space, cod: &Space) -> Vec<SpaceMap> {
    let allowed = vec![cod.full(); dom.len()];
    enumerate_maps(dom, cod, &allowed, true)
        .into_iter()
        .map(|t| SpaceMap {
            dom: dom.clone(),
            cod: cod.clone(),
            table: t,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> Space {
        FiniteSpace::new(&["x", "y"], &[vec![], vec!["x"], vec!["x", "y"]])
            .unwrap()
            .into_shared()
    }

    #[test]
    fn table6_row_is_a_topology() {
        let r = verify_topology(&["F2", "F3"], &[vec![], vec!["F2"], vec!["F3"], vec!["F2", "F3"]]);
        assert!(r.is_valid());
    }

    #[test]
    fn missing_union_is_reported() {
        let r = verify_topology(&["x", "y"], &[vec![], vec!["x"], vec!["y"]]);
        assert!(r.violations.contains(&TopologyViolation::MissingFull));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, TopologyViolation::MissingUnion { .. })));
    }

    #[test]
    fn sierpinski_neighbourhoods() {
        let s = sierpinski();
        assert_eq!(s.minimal_neighborhood("x").unwrap(), vec!["x"]);
        assert_eq!(s.minimal_neighborhood("y").unwrap(), vec!["x", "y"]);
        assert_eq!(s.listed_opens().len(), 3);
    }

    #[test]
    fn constant_map_on_sierpinski() {
        let s = sierpinski();
        let c = SpaceMap::constant(s.clone(), s.clone(), 1).unwrap();
        assert!(c.is_continuous());
        assert!(c.is_continuous_by_preimages());
        let c = SpaceMap::constant(s.clone(), s.clone(), 0).unwrap();
        assert!(c.is_continuous());
    }

    #[test]
    fn fold_maps() {
        let two = FiniteSpace::discrete(&["t1", "t2"]).unwrap().into_shared();
        let pt = FiniteSpace::point("p").into_shared();
        let fold = SpaceMap::new(two.clone(), pt.clone(), vec![0, 0]).unwrap();
        assert!(fold.is_locally_injective());
        assert!(fold.is_local_homeomorphism());
        assert_eq!(fold.local_homeo_basis().unwrap().len(), 3);
        let ind = FiniteSpace::indiscrete(&["t1", "t2"]).unwrap().into_shared();
        let fold = SpaceMap::new(ind, pt, vec![0, 0]).unwrap();
        assert!(!fold.is_locally_injective());
        assert!(!fold.is_local_homeomorphism());
        assert!(!fold.is_local_homeomorphism_direct());
    }

    #[test]
    fn open_map_examples() {
        let s = sierpinski();
        let x = FiniteSpace::point("x").into_shared();
        let incl = SpaceMap::new(x, s.clone(), vec![0]).unwrap();
        assert!(incl.is_open_map());
        let two = FiniteSpace::discrete(&["u", "v"]).unwrap().into_shared();
        let ind = FiniteSpace::indiscrete(&["u", "v"]).unwrap().into_shared();
        assert!(SpaceMap::constant(two.clone(), two.clone(), 0).unwrap().is_open_map());
        assert!(!SpaceMap::constant(two, ind, 0).unwrap().is_open_map());
    }

    #[test]
    fn product_of_sierpinski_squares() {
        let s = sierpinski();
        let (p, p1, p2) = product(&s, &s).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p1.is_continuous() && p2.is_continuous());
        assert!(p1.is_open_map());
        // up-sets of the product order on a 2x2 grid
        assert_eq!(p.listed_opens().len(), 6);
    }

    #[test]
    fn pullback_along_inclusion() {
        let b = FiniteSpace::discrete(&["F2", "F3"]).unwrap().into_shared();
        let t = FiniteSpace::discrete(&["0_1", "0_2", "1_1", "1_2"])
            .unwrap()
            .into_shared();
        let pi = SpaceMap::from_pairs(
            t,
            b.clone(),
            &[("0_1", "F2"), ("1_1", "F2"), ("0_2", "F3"), ("1_2", "F3")],
        )
        .unwrap();
        let one = FiniteSpace::point("F2").into_shared();
        let incl = SpaceMap::from_pairs(one, b, &[("F2", "F2")]).unwrap();
        let (p, p1, _) = pullback_space(&incl, &pi).unwrap();
        assert_eq!(p.points(), &["(F2|0_1)".to_string(), "(F2|1_1)".to_string()]);
        assert!(p.is_discrete());
        assert!(p1.is_local_homeomorphism());
    }
}

//! Finite residuated lattices.
//!
//! Tables are dense and row-major over the element ids in sorted order.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::bits::{BitSet, CAPACITY};
use crate::error::{Error, Result};
use crate::fintop::{pair_id, set_key, sort_permutation};

pub type Rl = Arc<ResiduatedLattice>;

/// Unvalidated operation tables, indexed by position in `elements`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlCandidate {
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
    pub bot: usize,
    pub top: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RlViolation {
    Shape(String),
    DuplicateElement(String),
    NotReflexive(String),
    NotAntisymmetric(String, String),
    NotTransitive(String, String, String),
    BotNotLeast(String),
    TopNotGreatest(String),
    JoinNotLub(String, String),
    MeetNotGlb(String, String),
    MulNotCommutative(String, String),
    MulNotAssociative(String, String, String),
    NotUnit(String),
    Adjointness(String, String, String),
}

impl fmt::Display for RlViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape(s) => write!(f, "malformed tables: {s}"),
            Self::DuplicateElement(x) => write!(f, "element `{x}` listed twice"),
            Self::NotReflexive(x) => write!(f, "{x} <= {x} fails"),
            Self::NotAntisymmetric(x, y) => write!(f, "{x} <= {y} and {y} <= {x} but {x} != {y}"),
            Self::NotTransitive(x, y, z) => write!(f, "{x} <= {y} <= {z} but not {x} <= {z}"),
            Self::BotNotLeast(x) => write!(f, "bottom is not below {x}"),
            Self::TopNotGreatest(x) => write!(f, "top is not above {x}"),
            Self::JoinNotLub(x, y) => write!(f, "{x} v {y} is not the least upper bound"),
            Self::MeetNotGlb(x, y) => write!(f, "{x} ^ {y} is not the greatest lower bound"),
            Self::MulNotCommutative(x, y) => write!(f, "{x}*{y} != {y}*{x}"),
            Self::MulNotAssociative(x, y, z) => write!(f, "({x}*{y})*{z} != {x}*({y}*{z})"),
            Self::NotUnit(x) => write!(f, "{x}*1 != {x}"),
            Self::Adjointness(x, y, z) => {
                write!(f, "{x}*{z} <= {y} disagrees with {z} <= {x}->{y}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RlReport {
    pub violations: Vec<RlViolation>,
}

impl RlReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn shape_ok(c: &RlCandidate) -> Option<String> {
    let n = c.elements.len();
    if n == 0 {
        return Some("empty carrier".into());
    }
    if n > CAPACITY {
        return Some(format!("{n} elements exceed capacity"));
    }
    if c.bot >= n || c.top >= n {
        return Some("constant out of range".into());
    }
    if c.leq.len() != n || c.leq.iter().any(|r| r.len() != n) {
        return Some("order table is not square".into());
    }
    for (name, t) in [("join", &c.join), ("meet", &c.meet), ("mul", &c.mul), ("imp", &c.imp)] {
        if t.len() != n || t.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Some(format!("{name} table is not a total square table"));
        }
    }
    None
}

/// Checks every axiom and reports the first witness of each failed one.
pub fn verify_rl(c: &RlCandidate) -> RlReport {
    let mut out = Vec::new();
    if let Some(s) = shape_ok(c) {
        return RlReport {
            violations: vec![RlViolation::Shape(s)],
        };
    }
    let mut seen = HashSet::new();
    for e in &c.elements {
        if !seen.insert(e) {
            out.push(RlViolation::DuplicateElement(e.clone()));
        }
    }
    let n = c.elements.len();
    let nm = |i: usize| c.elements[i].clone();
    let le = |x: usize, y: usize| c.leq[x][y];
    let r = 0..n;

    if let Some(x) = r.clone().find(|&x| !le(x, x)) {
        out.push(RlViolation::NotReflexive(nm(x)));
    }
    'anti: for x in 0..n {
        for y in 0..n {
            if x != y && le(x, y) && le(y, x) {
                out.push(RlViolation::NotAntisymmetric(nm(x), nm(y)));
                break 'anti;
            }
        }
    }
    'trans: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if le(x, y) && le(y, z) && !le(x, z) {
                    out.push(RlViolation::NotTransitive(nm(x), nm(y), nm(z)));
                    break 'trans;
                }
            }
        }
    }
    if let Some(x) = r.clone().find(|&x| !le(c.bot, x)) {
        out.push(RlViolation::BotNotLeast(nm(x)));
    }
    if let Some(x) = r.clone().find(|&x| !le(x, c.top)) {
        out.push(RlViolation::TopNotGreatest(nm(x)));
    }
    'join: for x in 0..n {
        for y in 0..n {
            let j = c.join[x][y];
            let ok = le(x, j) && le(y, j) && (0..n).all(|u| !(le(x, u) && le(y, u)) || le(j, u));
            if !ok {
                out.push(RlViolation::JoinNotLub(nm(x), nm(y)));
                break 'join;
            }
        }
    }
    'meet: for x in 0..n {
        for y in 0..n {
            let m = c.meet[x][y];
            let ok = le(m, x) && le(m, y) && (0..n).all(|l| !(le(l, x) && le(l, y)) || le(l, m));
            if !ok {
                out.push(RlViolation::MeetNotGlb(nm(x), nm(y)));
                break 'meet;
            }
        }
    }
    'comm: for x in 0..n {
        for y in 0..n {
            if c.mul[x][y] != c.mul[y][x] {
                out.push(RlViolation::MulNotCommutative(nm(x), nm(y)));
                break 'comm;
            }
        }
    }
    'assoc: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if c.mul[c.mul[x][y]][z] != c.mul[x][c.mul[y][z]] {
                    out.push(RlViolation::MulNotAssociative(nm(x), nm(y), nm(z)));
                    break 'assoc;
                }
            }
        }
    }
    if let Some(x) = r.clone().find(|&x| c.mul[x][c.top] != x || c.mul[c.top][x] != x) {
        out.push(RlViolation::NotUnit(nm(x)));
    }
    'adj: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if le(c.mul[x][z], y) != le(z, c.imp[x][y]) {
                    out.push(RlViolation::Adjointness(nm(x), nm(y), nm(z)));
                    break 'adj;
                }
            }
        }
    }
    RlReport { violations: out }
}

/// `x → y = ⋁{z | x⊙z ≤ y}`, computed with the join table, then checked
/// against adjointness.
pub fn derive_residual(
    elements: &[String],
    leq: &[Vec<bool>],
    join: &[Vec<usize>],
    mul: &[Vec<usize>],
    bot: usize,
) -> Result<Vec<Vec<usize>>> {
    let n = elements.len();
    let mut imp = vec![vec![bot; n]; n];
    for x in 0..n {
        for y in 0..n {
            imp[x][y] = (0..n).filter(|&z| leq[mul[x][z]][y]).fold(bot, |acc, z| join[acc][z]);
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if leq[mul[x][z]][y] != leq[z][imp[x][y]] {
                    return Err(Error::NotResiduated {
                        x: elements[x].clone(),
                        y: elements[y].clone(),
                        z: elements[z].clone(),
                    });
                }
            }
        }
    }
    Ok(imp)
}

/// Least upper bound and greatest lower bound tables of a finite order.
/// Join and meet tables.
pub type JoinMeet = (Vec<Vec<usize>>, Vec<Vec<usize>>);

pub fn lattice_tables(elements: &[String], leq: &[Vec<bool>]) -> Result<JoinMeet> {
    let n = elements.len();
    let mut join = vec![vec![0; n]; n];
    let mut meet = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            let ub: Vec<usize> = (0..n).filter(|&u| leq[x][u] && leq[y][u]).collect();
            let lub = ub.iter().copied().find(|&u| ub.iter().all(|&v| leq[u][v]));
            let lb: Vec<usize> = (0..n).filter(|&l| leq[l][x] && leq[l][y]).collect();
            let glb = lb.iter().copied().find(|&l| lb.iter().all(|&v| leq[v][l]));
            match (lub, glb) {
                (Some(j), Some(m)) => {
                    join[x][y] = j;
                    meet[x][y] = m;
                }
                (None, _) => {
                    return Err(Error::InvalidLattice(format!(
                        "{} and {} have no least upper bound",
                        elements[x], elements[y]
                    )))
                }
                (_, None) => {
                    return Err(Error::InvalidLattice(format!(
                        "{} and {} have no greatest lower bound",
                        elements[x], elements[y]
                    )))
                }
            }
        }
    }
    Ok((join, meet))
}

/// Assembles a candidate from an order, a product and optional tables.
///
/// Products are entered per unordered pair and symmetrized; a pair given two
/// different values is an error. Missing join/meet are read off the order,
/// a missing residual is derived.
#[derive(Clone, Debug, Default)]
pub struct RlBuilder {
    elements: Vec<String>,
    leq: Vec<(String, String)>,
    covers: bool,
    mul: HashMap<(String, String), String>,
    join: Option<HashMap<(String, String), String>>,
    meet: Option<HashMap<(String, String), String>>,
    imp: Option<HashMap<(String, String), String>>,
    bot: Option<String>,
    top: Option<String>,
}

impl RlBuilder {
    pub fn new<S: AsRef<str>>(elements: &[S]) -> Self {
        RlBuilder {
            elements: elements.iter().map(|e| e.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    /// Covering pairs `(lower, upper)`; the order is their reflexive-transitive closure.
    pub fn hasse<S: AsRef<str>>(mut self, pairs: &[(S, S)]) -> Self {
        self.covers = true;
        self.leq = pairs
            .iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        self
    }

    /// The full order relation, taken literally.
    pub fn leq<S: AsRef<str>>(mut self, pairs: &[(S, S)]) -> Self {
        self.covers = false;
        self.leq = pairs
            .iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        self
    }

    pub fn mul(mut self, x: &str, y: &str, z: &str) -> Result<Self> {
        for key in [(x, y), (y, x)] {
            let key = (key.0.to_string(), key.1.to_string());
            if let Some(old) = self.mul.get(&key) {
                if old != z {
                    return Err(Error::InvalidLattice(format!("{x}*{y} given as both {old} and {z}")));
                }
            }
            self.mul.insert(key, z.to_string());
        }
        Ok(self)
    }

    /// One row of an upper-triangular table: `values[k]` is `x ⊙ cols[k]`.
    pub fn mul_row<S: AsRef<str>>(mut self, x: &str, cols: &[S], values: &[S]) -> Result<Self> {
        if cols.len() != values.len() {
            return Err(Error::InvalidLattice(format!(
                "row {x} has {} cells for {} columns",
                values.len(),
                cols.len()
            )));
        }
        for (c, v) in cols.iter().zip(values) {
            self = self.mul(x, c.as_ref(), v.as_ref())?;
        }
        Ok(self)
    }

    fn table(entries: &[(String, String, String)]) -> HashMap<(String, String), String> {
        entries
            .iter()
            .map(|(a, b, c)| ((a.clone(), b.clone()), c.clone()))
            .collect()
    }

    pub fn join_table(mut self, entries: &[(String, String, String)]) -> Self {
        self.join = Some(Self::table(entries));
        self
    }

    pub fn meet_table(mut self, entries: &[(String, String, String)]) -> Self {
        self.meet = Some(Self::table(entries));
        self
    }

    pub fn imp_table(mut self, entries: &[(String, String, String)]) -> Self {
        self.imp = Some(Self::table(entries));
        self
    }

    pub fn bot(mut self, b: &str) -> Self {
        self.bot = Some(b.to_string());
        self
    }

    pub fn top(mut self, t: &str) -> Self {
        self.top = Some(t.to_string());
        self
    }

    pub fn candidate(&self) -> Result<RlCandidate> {
        let els = &self.elements;
        let n = els.len();
        if n == 0 {
            return Err(Error::InvalidLattice("empty carrier".into()));
        }
        if n > CAPACITY {
            return Err(Error::TooManyPoints(n));
        }
        let mut index = HashMap::new();
        for (i, e) in els.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(Error::DuplicateId(e.clone()));
            }
        }
        let id = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownId(s.to_string()));
        let mut leq = vec![vec![false; n]; n];
        for (a, b) in &self.leq {
            leq[id(a)?][id(b)?] = true;
        }
        if self.covers {
            for (x, row) in leq.iter_mut().enumerate() {
                row[x] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    if leq[i][k] {
                        for j in 0..n {
                            if leq[k][j] {
                                leq[i][j] = true;
                            }
                        }
                    }
                }
            }
        }
        let read = |t: &HashMap<(String, String), String>, what: &str| -> Result<Vec<Vec<usize>>> {
            let mut out = vec![vec![0; n]; n];
            for x in 0..n {
                for y in 0..n {
                    let v = t.get(&(els[x].clone(), els[y].clone())).ok_or_else(|| {
                        Error::InvalidLattice(format!("{what} table has no entry for {},{}", els[x], els[y]))
                    })?;
                    out[x][y] = id(v)?;
                }
            }
            Ok(out)
        };
        let mul = read(&self.mul, "mul")?;
        let (join, meet) = match (&self.join, &self.meet) {
            (Some(j), Some(m)) => (read(j, "join")?, read(m, "meet")?),
            (j, m) => {
                let (dj, dm) = lattice_tables(els, &leq)?;
                let j = match j {
                    Some(t) => read(t, "join")?,
                    None => dj,
                };
                let m = match m {
                    Some(t) => read(t, "meet")?,
                    None => dm,
                };
                (j, m)
            }
        };
        let extreme = |want_least: bool| -> Result<usize> {
            (0..n)
                .find(|&x| (0..n).all(|y| if want_least { leq[x][y] } else { leq[y][x] }))
                .ok_or_else(|| {
                    Error::InvalidLattice(if want_least {
                        "no least element".into()
                    } else {
                        "no greatest element".into()
                    })
                })
        };
        let bot = match &self.bot {
            Some(b) => id(b)?,
            None => extreme(true)?,
        };
        let top = match &self.top {
            Some(t) => id(t)?,
            None => extreme(false)?,
        };
        let imp = match &self.imp {
            Some(t) => read(t, "imp")?,
            None => derive_residual(els, &leq, &join, &mul, bot)?,
        };
        Ok(RlCandidate {
            elements: els.clone(),
            leq,
            join,
            meet,
            mul,
            imp,
            bot,
            top,
        })
    }

    pub fn build(&self) -> Result<ResiduatedLattice> {
        ResiduatedLattice::from_candidate(&self.candidate()?)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ResiduatedLattice {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<BitSet>,
    join: Vec<usize>,
    meet: Vec<usize>,
    mul: Vec<usize>,
    imp: Vec<usize>,
    bot: usize,
    top: usize,
}

impl fmt::Debug for ResiduatedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResiduatedLattice")
            .field("elements", &self.elements)
            .finish_non_exhaustive()
    }
}

impl ResiduatedLattice {
    /// Validates a candidate and re-indexes it by sorted element id.
    pub fn from_candidate(c: &RlCandidate) -> Result<Self> {
        let report = verify_rl(c);
        if !report.is_valid() {
            return Err(Error::InvalidLattice(report.summary()));
        }
        let n = c.elements.len();
        let perm = sort_permutation(&c.elements);
        let mut elements = vec![String::new(); n];
        for old in 0..n {
            elements[perm[old]] = c.elements[old].clone();
        }
        let mut up = vec![BitSet::empty(); n];
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        let mut mul = vec![0; n * n];
        let mut imp = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let (a, b) = (perm[x], perm[y]);
                if c.leq[x][y] {
                    up[a].insert(b);
                }
                join[a * n + b] = perm[c.join[x][y]];
                meet[a * n + b] = perm[c.meet[x][y]];
                mul[a * n + b] = perm[c.mul[x][y]];
                imp[a * n + b] = perm[c.imp[x][y]];
            }
        }
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Ok(ResiduatedLattice {
            elements,
            index,
            up,
            join,
            meet,
            mul,
            imp,
            bot: perm[c.bot],
            top: perm[c.top],
        })
    }

    /// The one-element algebra.
    pub fn trivial(name: &str) -> Self {
        let c = RlCandidate {
            elements: vec![name.to_string()],
            leq: vec![vec![true]],
            join: vec![vec![0]],
            meet: vec![vec![0]],
            mul: vec![vec![0]],
            imp: vec![vec![0]],
            bot: 0,
            top: 0,
        };
        Self::from_candidate(&c).expect("trivial algebra")
    }

    pub fn into_shared(self) -> Rl {
        Arc::new(self)
    }

    /// The tables in sorted element order.
    pub fn candidate(&self) -> RlCandidate {
        let n = self.len();
        let grid = |t: &[usize]| (0..n).map(|x| t[x * n..(x + 1) * n].to_vec()).collect();
        RlCandidate {
            elements: self.elements.clone(),
            leq: (0..n).map(|x| (0..n).map(|y| self.leq(x, y)).collect()).collect(),
            join: grid(&self.join),
            meet: grid(&self.meet),
            mul: grid(&self.mul),
            imp: grid(&self.imp),
            bot: self.bot,
            top: self.top,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_degenerate(&self) -> bool {
        self.bot == self.top
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, x: usize) -> &str {
        &self.elements[x]
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

    pub fn names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.elements[i].clone()).collect()
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<BitSet> {
        names.iter().map(|n| self.idx(n.as_ref())).collect()
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    /// `{y | x ≤ y}`.
    pub fn up_set(&self, x: usize) -> BitSet {
        self.up[x]
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y]
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.len() + y]
    }

    #[inline]
    pub fn imp(&self, x: usize, y: usize) -> usize {
        self.imp[x * self.len() + y]
    }

    /// Applies one of the four binary operations.
    pub fn op(&self, op: Op, x: usize, y: usize) -> usize {
        match op {
            Op::Join => self.join(x, y),
            Op::Meet => self.meet(x, y),
            Op::Mul => self.mul(x, y),
            Op::Imp => self.imp(x, y),
        }
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// `¬a = a → 0`.
    pub fn neg(&self, a: usize) -> usize {
        self.imp(a, self.bot)
    }

    /// `a⁰ = 1`, `aⁿ = a ⊙ aⁿ⁻¹`.
    pub fn power(&self, a: usize, n: u32) -> usize {
        (0..n).fold(self.top, |acc, _| self.mul(a, acc))
    }
}

/// The four binary operations, in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Join,
    Meet,
    Mul,
    Imp,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Join, Op::Meet, Op::Mul, Op::Imp];

    pub fn name(self) -> &'static str {
        match self {
            Op::Join => "join",
            Op::Meet => "meet",
            Op::Mul => "mul",
            Op::Imp => "imp",
        }
    }
}

// ---------------------------------------------------------------- filters

pub fn is_filter(l: &ResiduatedLattice, s: &BitSet) -> bool {
    !s.is_empty()
        && s.iter().all(|x| l.up_set(x).is_subset(s))
        && s.iter().all(|x| s.iter().all(|y| s.contains(l.mul(x, y))))
}

/// Least filter containing `x`, by closure iteration.
pub fn generated_filter(l: &ResiduatedLattice, x: &BitSet) -> BitSet {
    let mut f = *x;
    f.insert(l.top());
    loop {
        let mut next = f;
        for a in f.iter() {
            next = next.union(&l.up_set(a));
            for b in f.iter() {
                next.insert(l.mul(a, b));
            }
        }
        if next == f {
            return f;
        }
        f = next;
    }
}

pub fn principal_filter(l: &ResiduatedLattice, x: usize) -> BitSet {
    generated_filter(l, &BitSet::singleton(x))
}

/// `⊻F = 𝓕(⋃F)`.
pub fn filter_join(l: &ResiduatedLattice, family: &[BitSet]) -> BitSet {
    let union = family.iter().fold(BitSet::empty(), |acc, f| acc.union(f));
    generated_filter(l, &union)
}

/// Intersection of a family of filters; the empty family gives the carrier.
pub fn filter_meet(l: &ResiduatedLattice, family: &[BitSet]) -> BitSet {
    family.iter().fold(l.full(), |acc, f| acc.intersection(f))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterFlags {
    pub proper: bool,
    pub principal: bool,
    pub maximal: bool,
    pub prime: bool,
    pub minimal_prime: bool,
}

#[derive(Clone, Debug)]
pub struct FilterLattice {
    pub parent: Rl,
    pub filters: Vec<BitSet>,
    pub flags: Vec<FilterFlags>,
}

impl FilterLattice {
    pub fn position(&self, f: &BitSet) -> Option<usize> {
        self.filters.iter().position(|g| g == f)
    }

    fn select(&self, pick: impl Fn(&FilterFlags) -> bool) -> Vec<BitSet> {
        self.filters
            .iter()
            .zip(&self.flags)
            .filter(|(_, fl)| pick(fl))
            .map(|(f, _)| *f)
            .collect()
    }

    pub fn proper(&self) -> Vec<BitSet> {
        self.select(|f| f.proper)
    }

    pub fn prime(&self) -> Vec<BitSet> {
        self.select(|f| f.prime)
    }

    pub fn maximal(&self) -> Vec<BitSet> {
        self.select(|f| f.maximal)
    }

    pub fn minimal_prime(&self) -> Vec<BitSet> {
        self.select(|f| f.minimal_prime)
    }

    pub fn named(&self, f: &BitSet) -> Vec<String> {
        self.parent.names(f)
    }
}

pub fn is_prime(l: &ResiduatedLattice, f: &BitSet) -> bool {
    !f.contains(l.bot())
        && (0..l.len()).all(|x| (0..l.len()).all(|y| !f.contains(l.join(x, y)) || f.contains(x) || f.contains(y)))
}

pub fn classify_filters(l: &ResiduatedLattice, filters: &[BitSet]) -> Vec<FilterFlags> {
    let proper: Vec<bool> = filters.iter().map(|f| !f.contains(l.bot())).collect();
    let prime: Vec<bool> = filters.iter().map(|f| is_prime(l, f)).collect();
    let principal: HashSet<BitSet> = (0..l.len()).map(|x| principal_filter(l, x)).collect();
    filters
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let strictly_inside = |j: usize| filters[j] != *f && f.is_subset(&filters[j]);
            let strictly_below = |j: usize| filters[j] != *f && filters[j].is_subset(f);
            FilterFlags {
                proper: proper[i],
                principal: principal.contains(f),
                maximal: proper[i] && !(0..filters.len()).any(|j| proper[j] && strictly_inside(j)),
                prime: prime[i],
                minimal_prime: prime[i] && !(0..filters.len()).any(|j| prime[j] && strictly_below(j)),
            }
        })
        .collect()
}

/// Every filter, ordered by size and then by members, with classification.
///
/// A filter of a finite residuated lattice contains the product of all its
/// members, which lies below each of them, so it is generated by one element.
/// Seeds are therefore the empty set and the singletons.
pub fn all_filters(l: &Rl) -> FilterLattice {
    let mut seen = HashSet::new();
    let mut filters = Vec::new();
    let seeds = std::iter::once(BitSet::empty()).chain((0..l.len()).map(BitSet::singleton));
    for seed in seeds {
        let f = generated_filter(l, &seed);
        if seen.insert(f) {
            filters.push(f);
        }
    }
    filters.sort_by_cached_key(set_key);
    let flags = classify_filters(l, &filters);
    FilterLattice {
        parent: l.clone(),
        filters,
        flags,
    }
}

// ------------------------------------------------------------ congruences

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    /// Blocks ordered by least member.
    pub blocks: Vec<BitSet>,
}

impl Congruence {
    fn normalized(mut blocks: Vec<BitSet>) -> Self {
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b.first());
        Congruence { blocks }
    }

    /// Validates a partition and its compatibility with the operations.
    pub fn from_blocks(l: &ResiduatedLattice, blocks: Vec<BitSet>) -> Result<Self> {
        let c = Self::normalized(blocks);
        let mut covered = BitSet::empty();
        for b in &c.blocks {
            if !b.is_disjoint(&covered) {
                return Err(Error::InvalidLattice("blocks overlap".into()));
            }
            covered = covered.union(b);
        }
        if covered != l.full() {
            return Err(Error::InvalidLattice("blocks do not cover the carrier".into()));
        }
        if !is_compatible(l, &c) {
            return Err(Error::InvalidLattice(
                "partition is not compatible with the operations".into(),
            ));
        }
        Ok(c)
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(x))
            .expect("blocks cover the carrier")
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_of(x) == self.block_of(y)
    }

    /// Whether every block of `self` lies in a block of `other`.
    pub fn finer_than(&self, other: &Congruence) -> bool {
        self.blocks.iter().all(|b| other.blocks.iter().any(|c| b.is_subset(c)))
    }

    /// Block of the top element.
    pub fn filter(&self, l: &ResiduatedLattice) -> BitSet {
        self.blocks[self.block_of(l.top())]
    }
}

pub fn is_compatible(l: &ResiduatedLattice, c: &Congruence) -> bool {
    let n = l.len();
    let block: Vec<usize> = (0..n).map(|x| c.block_of(x)).collect();
    Op::ALL.iter().all(|&op| {
        (0..n).all(|x| {
            (0..n).all(|x2| {
                block[x] != block[x2]
                    || (0..n).all(|y| {
                        (0..n).all(|y2| block[y] != block[y2] || block[l.op(op, x, y)] == block[l.op(op, x2, y2)])
                    })
            })
        })
    })
}

/// `x ≡_F y` iff `x → y` and `y → x` lie in `F`.
pub fn congruence_of_filter(l: &ResiduatedLattice, f: &BitSet) -> Result<Congruence> {
    if !is_filter(l, f) {
        return Err(Error::NotAFilter(format!("{{{}}}", l.names(f).join(","))));
    }
    let mut blocks: Vec<BitSet> = Vec::new();
    let mut placed = BitSet::empty();
    for x in 0..l.len() {
        if placed.contains(x) {
            continue;
        }
        let b: BitSet = (0..l.len())
            .filter(|&y| f.contains(l.imp(x, y)) && f.contains(l.imp(y, x)))
            .collect();
        placed = placed.union(&b);
        blocks.push(b);
    }
    Congruence::from_blocks(l, blocks)
}

/// Every congruence, by enumerating all set partitions. Exponential; meant
/// for carriers of about ten elements.
pub fn all_congruences(l: &ResiduatedLattice) -> Vec<Congruence> {
    let n = l.len();
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn go(i: usize, max: usize, labels: &mut Vec<usize>, l: &ResiduatedLattice, out: &mut Vec<Congruence>) {
        let n = labels.len();
        if i == n {
            let mut blocks = vec![BitSet::empty(); max];
            for (x, &b) in labels.iter().enumerate() {
                blocks[b].insert(x);
            }
            let c = Congruence::normalized(blocks);
            if is_compatible(l, &c) {
                out.push(c);
            }
            return;
        }
        for b in 0..=max {
            labels[i] = b;
            go(i + 1, max.max(b + 1), labels, l, out);
        }
    }
    if n > 0 {
        labels[0] = 0;
        go(1, 1, &mut labels, l, &mut out);
    }
    out
}

// ------------------------------------------------------------- morphisms

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlMorphism {
    dom: Rl,
    cod: Rl,
    table: Vec<usize>,
}

/// First operation a map fails to preserve, with its witness.
pub fn morphism_violation(dom: &ResiduatedLattice, cod: &ResiduatedLattice, table: &[usize]) -> Option<String> {
    if table.len() != dom.len() || table.iter().any(|&t| t >= cod.len()) {
        return Some("table is not a total map between the carriers".into());
    }
    if table[dom.bot()] != cod.bot() {
        return Some(format!("0 goes to {}", cod.name(table[dom.bot()])));
    }
    if table[dom.top()] != cod.top() {
        return Some(format!("1 goes to {}", cod.name(table[dom.top()])));
    }
    for op in Op::ALL {
        for x in 0..dom.len() {
            for y in 0..dom.len() {
                if table[dom.op(op, x, y)] != cod.op(op, table[x], table[y]) {
                    return Some(format!(
                        "{} of {} and {} is not preserved",
                        op.name(),
                        dom.name(x),
                        dom.name(y)
                    ));
                }
            }
        }
    }
    None
}

pub fn is_rl_morphism(dom: &ResiduatedLattice, cod: &ResiduatedLattice, table: &[usize]) -> bool {
    morphism_violation(dom, cod, table).is_none()
}

impl RlMorphism {
    pub fn new(dom: Rl, cod: Rl, table: Vec<usize>) -> Result<Self> {
        if let Some(v) = morphism_violation(&dom, &cod, &table) {
            return Err(Error::NotAMorphism(v));
        }
        Ok(RlMorphism { dom, cod, table })
    }

    pub fn from_pairs<A: AsRef<str>, B: AsRef<str>>(dom: Rl, cod: Rl, pairs: &[(A, B)]) -> Result<Self> {
        let mut table = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            table[dom.idx(a.as_ref())?] = cod.idx(b.as_ref())?;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(Error::NotTotal(dom.name(i).to_string()));
        }
        Self::new(dom, cod, table)
    }

    pub fn identity(l: Rl) -> Self {
        let table = (0..l.len()).collect();
        RlMorphism {
            dom: l.clone(),
            cod: l,
            table,
        }
    }

    pub fn dom(&self) -> &Rl {
        &self.dom
    }

    pub fn cod(&self) -> &Rl {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Preimage of the top element.
    pub fn coker(&self) -> BitSet {
        (0..self.dom.len())
            .filter(|&x| self.table[x] == self.cod.top())
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        let img: BitSet = self.table.iter().copied().collect();
        img.len() == self.table.len()
    }

    pub fn is_surjective(&self) -> bool {
        let img: BitSet = self.table.iter().copied().collect();
        img.len() == self.cod.len()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &RlMorphism) -> Result<RlMorphism> {
        if *self.cod != *g.dom {
            return Err(Error::CodomainMismatch);
        }
        Ok(RlMorphism {
            dom: self.dom.clone(),
            cod: g.cod.clone(),
            table: self.table.iter().map(|&y| g.table[y]).collect(),
        })
    }

    pub fn named_table(&self) -> Vec<(String, String)> {
        self.table
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.dom.name(x).to_string(), self.cod.name(y).to_string()))
            .collect()
    }
}

/// `L/F` with blocks named `[x,y,..]`, and the canonical projection.
pub fn quotient(l: &Rl, f: &BitSet) -> Result<(Rl, RlMorphism)> {
    let cong = congruence_of_filter(l, f)?;
    let k = cong.blocks.len();
    let names: Vec<String> = cong
        .blocks
        .iter()
        .map(|b| format!("[{}]", l.names(b).join(",")))
        .collect();
    let rep: Vec<usize> = cong.blocks.iter().map(|b| b.first().expect("nonempty block")).collect();
    let blk = |x: usize| cong.block_of(x);
    let table = |op: Op| -> Vec<Vec<usize>> {
        (0..k)
            .map(|a| (0..k).map(|b| blk(l.op(op, rep[a], rep[b]))).collect())
            .collect()
    };
    let meet = table(Op::Meet);
    let leq = (0..k).map(|a| (0..k).map(|b| meet[a][b] == a).collect()).collect();
    let cand = RlCandidate {
        elements: names,
        leq,
        join: table(Op::Join),
        meet,
        mul: table(Op::Mul),
        imp: table(Op::Imp),
        bot: blk(l.bot()),
        top: blk(l.top()),
    };
    let q = ResiduatedLattice::from_candidate(&cand)?.into_shared();
    let proj: Vec<usize> = (0..l.len())
        .map(|x| q.idx(&cand.elements[blk(x)]).expect("block name"))
        .collect();
    let m = RlMorphism::new(l.clone(), q.clone(), proj)?;
    Ok((q, m))
}

/// Direct product with elements `(x|y)`.
pub fn product(a: &ResiduatedLattice, b: &ResiduatedLattice) -> Result<ResiduatedLattice> {
    let n = a.len() * b.len();
    if n > CAPACITY {
        return Err(Error::TooManyPoints(n));
    }
    let pos = |x: usize, y: usize| x * b.len() + y;
    let coords: Vec<(usize, usize)> = (0..a.len()).flat_map(|x| (0..b.len()).map(move |y| (x, y))).collect();
    let elements = coords.iter().map(|&(x, y)| pair_id(a.name(x), b.name(y))).collect();
    let table = |op: Op| -> Vec<Vec<usize>> {
        coords
            .iter()
            .map(|&(x, y)| {
                coords
                    .iter()
                    .map(|&(u, v)| pos(a.op(op, x, u), b.op(op, y, v)))
                    .collect()
            })
            .collect()
    };
    let cand = RlCandidate {
        elements,
        leq: coords
            .iter()
            .map(|&(x, y)| coords.iter().map(|&(u, v)| a.leq(x, u) && b.leq(y, v)).collect())
            .collect(),
        join: table(Op::Join),
        meet: table(Op::Meet),
        mul: table(Op::Mul),
        imp: table(Op::Imp),
        bot: pos(a.bot(), b.bot()),
        top: pos(a.top(), b.top()),
    };
    ResiduatedLattice::from_candidate(&cand)
}

/// An isomorphism `a → b`, found by backtracking over bijections.
pub fn find_isomorphism(a: &ResiduatedLattice, b: &ResiduatedLattice) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let mut table = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        a: &ResiduatedLattice,
        b: &ResiduatedLattice,
        table: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.len();
        if i == n {
            return is_rl_morphism(a, b, table);
        }
        for t in 0..n {
            if used[t] {
                continue;
            }
            table[i] = t;
            let consistent = (0..=i).all(|j| {
                let tj = table[j];
                let m = a.mul(i, j);
                let mul_ok = m > i || table[m] == b.mul(t, tj);
                a.leq(i, j) == b.leq(t, tj) && a.leq(j, i) == b.leq(tj, t) && mul_ok
            });
            if !consistent {
                continue;
            }
            used[t] = true;
            if go(i + 1, a, b, table, used) {
                return true;
            }
            used[t] = false;
        }
        table[i] = usize::MAX;
        false
    }
    if go(0, a, b, &mut table, &mut used) {
        Some(table)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn a4_residual_and_powers() {
        let l = fixtures::a4();
        let (a, b) = (l.idx("a").unwrap(), l.idx("b").unwrap());
        assert_eq!(l.name(l.imp(a, b)), "b");
        assert_eq!(l.name(l.neg(a)), "b");
        assert_eq!(l.power(a, 2), a);
        assert_eq!(l.power(a, 0), l.top());
        assert_eq!(l.neg(l.top()), l.bot());
    }

    #[test]
    fn a6_residual() {
        let l = fixtures::a6();
        assert_eq!(l.name(l.imp(l.idx("c").unwrap(), l.idx("a").unwrap())), "b");
    }

    #[test]
    fn broken_a4_reports_witness() {
        let mut c = fixtures::a4().candidate();
        let (a, b) = (
            c.elements.iter().position(|e| e == "a").unwrap(),
            c.elements.iter().position(|e| e == "b").unwrap(),
        );
        let top = c.top;
        c.mul[a][b] = top;
        c.mul[b][a] = top;
        let r = verify_rl(&c);
        assert!(!r.is_valid());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, RlViolation::Adjointness(..) | RlViolation::MulNotAssociative(..))));
    }

    #[test]
    fn filter_membership() {
        let l = fixtures::a4();
        assert!(is_filter(&l, &l.set_of(&["b", "1"]).unwrap()));
        assert!(is_filter(&l, &l.set_of(&["1"]).unwrap()));
        assert!(!is_filter(&l, &l.set_of(&["a", "b", "1"]).unwrap()));
        assert_eq!(generated_filter(&l, &BitSet::empty()), l.set_of(&["1"]).unwrap());
        let fa = l.set_of(&["a", "1"]).unwrap();
        let fb = l.set_of(&["b", "1"]).unwrap();
        assert_eq!(principal_filter(&l, l.idx("a").unwrap()), fa);
        assert_eq!(filter_join(&l, &[fa, fb]), l.full());
    }

    #[test]
    fn conflicting_products_rejected() {
        let r = RlBuilder::new(&["0", "1"])
            .mul("0", "1", "0")
            .and_then(|b| b.mul("1", "0", "1"));
        assert!(r.is_err());
    }

    #[test]
    fn quotient_by_whole_is_trivial() {
        let l = fixtures::a4();
        let (q, p) = quotient(&l, &l.full()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(p.coker(), l.full());
        let (q, p) = quotient(&l, &l.set_of(&["1"]).unwrap()).unwrap();
        assert_eq!(q.len(), 4);
        assert!(find_isomorphism(&l, &q).is_some());
        assert!(p.is_injective());
    }

    #[test]
    fn a2_squared_is_a4() {
        let a2 = fixtures::a2();
        let sq = product(&a2, &a2).unwrap();
        assert!(find_isomorphism(&sq, &fixtures::a4()).is_some());
        assert!(find_isomorphism(&sq, &fixtures::a3()).is_none());
    }
}

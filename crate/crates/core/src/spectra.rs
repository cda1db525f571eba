//! Hull-kernel, dual hull-kernel and patch topologies on families of prime filters.

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::fintop::FiniteSpace;
use crate::rlcore::{all_filters, is_prime, ResiduatedLattice, Rl};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Hull,
    Dual,
    Patch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeSet {
    Spec,
    Max,
    Min,
}

/// A family of prime filters with a choice of topology.
#[derive(Clone, Debug)]
pub struct SpectrumConfig {
    parent: Rl,
    pi: Vec<BitSet>,
    flavor: Flavor,
}

/// Point id of a filter: its sorted members in braces, e.g. `{1,a}`.
pub fn filter_id(l: &ResiduatedLattice, f: &BitSet) -> String {
    format!("{{{}}}", l.names(f).join(","))
}

impl SpectrumConfig {
    pub fn new(parent: Rl, mut pi: Vec<BitSet>, flavor: Flavor) -> Result<Self> {
        for p in &pi {
            if !is_prime(&parent, p) || !crate::rlcore::is_filter(&parent, p) {
                return Err(Error::NotAFilter(format!(
                    "{} is not a prime filter",
                    filter_id(&parent, p)
                )));
            }
        }
        pi.sort_by_key(|p| filter_id(&parent, p));
        pi.dedup();
        Ok(SpectrumConfig { parent, pi, flavor })
    }

    pub fn of(parent: &Rl, set: PrimeSet, flavor: Flavor) -> Self {
        let fl = all_filters(parent);
        let pi = match set {
            PrimeSet::Spec => fl.prime(),
            PrimeSet::Max => fl.maximal(),
            PrimeSet::Min => fl.minimal_prime(),
        };
        Self::new(parent.clone(), pi, flavor).expect("classified filters are prime")
    }

    pub fn parent(&self) -> &Rl {
        &self.parent
    }

    /// Members of Π, ordered by point id.
    pub fn pi(&self) -> &[BitSet] {
        &self.pi
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn point_ids(&self) -> Vec<String> {
        self.pi.iter().map(|p| filter_id(&self.parent, p)).collect()
    }

    /// `h(X) = {P ∈ Π | X ⊆ P}`, as positions in [`Self::pi`].
    pub fn hull(&self, x: &BitSet) -> BitSet {
        (0..self.pi.len()).filter(|&i| x.is_subset(&self.pi[i])).collect()
    }

    /// `d(X) = Π ∖ h(X)`.
    pub fn dual(&self, x: &BitSet) -> BitSet {
        BitSet::full(self.pi.len()).difference(&self.hull(x))
    }

    /// `k(π) = ⋂π`; the empty family gives the whole carrier.
    pub fn kernel(&self, members: &BitSet) -> BitSet {
        members
            .iter()
            .fold(self.parent.full(), |acc, i| acc.intersection(&self.pi[i]))
    }
}

/// The topology on Π. The hull flavor takes the `h(x)` as closed subbasis,
/// the dual flavor as open subbasis, the patch flavor takes both.
pub fn spectral_space(cfg: &SpectrumConfig) -> Result<FiniteSpace> {
    let l = &cfg.parent;
    let hulls: Vec<BitSet> = (0..l.len()).map(|x| cfg.hull(&BitSet::singleton(x))).collect();
    let duals: Vec<BitSet> = (0..l.len()).map(|x| cfg.dual(&BitSet::singleton(x))).collect();
    let family: Vec<BitSet> = match cfg.flavor {
        Flavor::Hull => duals,
        Flavor::Dual => hulls,
        Flavor::Patch => hulls.into_iter().chain(duals).collect(),
    };
    FiniteSpace::generated_by(cfg.point_ids(), &family)
}

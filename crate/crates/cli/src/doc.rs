//! The JSON document format. Every object rejects unknown keys.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lattices: BTreeMap<String, LatticeDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, SpaceDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapDoc>,
    /// Morphisms of residuated lattices.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MapDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bundles: BTreeMap<String, BundleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rle_morphisms: BTreeMap<String, RleMorphismDoc>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub expect: Expectations,
}

/// `mul` and `imp` are keyed `"x,y"`. A product table may list only one of
/// `x,y` and `y,x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub carrier: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hasse: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leq: Option<Vec<(String, String)>>,
    pub mul: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imp: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub dom: String,
    pub cod: String,
    pub table: BTreeMap<String, String>,
}

/// With `stalks` the bundle carries residuated lattices: each base point
/// names an algebra and labels its stalk points with that algebra's elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub total: String,
    pub base: String,
    pub proj: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stalks: Option<BTreeMap<String, StalkDoc>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StalkDoc {
    pub lattice: String,
    /// Stalk point to algebra element.
    pub elements: BTreeMap<String, String>,
}

/// `(f, α)` with `f: src base → dst base` and `α` keyed by the points
/// `(b|t)` of the pullback of `dst` along `f`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RleMorphismDoc {
    pub src: String,
    pub dst: String,
    pub map: String,
    pub alpha: BTreeMap<String, String>,
}

/// Known answers checked by `validate`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub filters: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maximal: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub minimal_prime: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectrumExpectation>,
    /// Bundle name to number of global sections.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub global_sections: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumExpectation {
    pub lattice: String,
    pub set: String,
    pub flavor: String,
    /// Opens as sets of filter ids such as `{1,a}`.
    pub opens: Vec<Vec<String>>,
}

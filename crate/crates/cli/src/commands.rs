//! Argument parsing and the commands themselves.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use rlsheaf_core::adjunction::{
    check_exponential, check_projection_adjunction, check_section_adjunction, check_triangle_identities,
    gamma_topological_rl, lift_compact_open_rl, HomBijection, Options, TopologicalRl,
};
use rlsheaf_core::basechange::{
    compose_rle_inv, fprime_stalk_violation, lambda_iso, pullback_etale, pullback_rl_etale, section_functor_morphism,
    section_functor_object, RleInvMorphism, RleSpace,
};
use rlsheaf_core::bundle::{is_rl_bundle_morphism, verify_rl_bundle, Bundle, RlBundle};
use rlsheaf_core::fintop::{continuous_maps, verify_topology, Space};
use rlsheaf_core::fixtures as fx;
use rlsheaf_core::random;
use rlsheaf_core::rlcore::{
    all_congruences, all_filters, congruence_of_filter, is_filter, is_rl_morphism, quotient, verify_rl,
    ResiduatedLattice, Rl,
};
use rlsheaf_core::sheafify::{coreflection_check, counit, counit_report, etale_of, rl_germ_ops, CounitReport};
use rlsheaf_core::spectra::{filter_id, spectral_space, Flavor, PrimeSet, SpectrumConfig};
use rlsheaf_core::BitSet;

use crate::dot;
use crate::report::{Format, Report};
use crate::workspace::{self, Mode, Workspace};

#[derive(Debug, Parser)]
#[command(
    name = "rlsheaf",
    version,
    about = "Checks finite residuated lattices and bundles of them over finite spaces"
)]
pub struct Cli {
    /// JSON workspace; the bundled examples when omitted.
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Drop invalid objects with a diagnostic instead of failing.
    #[arg(long, global = true)]
    pub lenient: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetArg {
    Spec,
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Hull,
    Dual,
    Patch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load everything and check the recorded expectations.
    Validate,
    /// All filters of a lattice.
    Filters { lattice: String },
    /// Proper, prime, maximal and minimal prime filters.
    Classify { lattice: String },
    /// The quotient by a filter, given as `a,b,1` or `{a,b,1}`.
    Quotient { lattice: String, filter: String },
    /// A family of prime filters with one of the three topologies.
    Spectrum {
        lattice: String,
        #[arg(long, value_enum)]
        set: SetArg,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
    },
    /// Sections of a bundle over a set of base points.
    Sections {
        bundle: String,
        #[arg(long)]
        open: String,
    },
    /// Whether the projection is a local homeomorphism
    CheckEtale { bundle: String },
    /// Stalks are residuated lattices and the operations are continuous
    CheckRlBundle { bundle: String },
    /// The space of germs of sections and its counit.
    Sheafify { bundle: String },
    /// The counit is an isomorphism exactly when the bundle is étalé
    CounitCheck { bundle: String },
    /// Pull a bundle back along a continuous map into its base.
    Pullback { map: String, bundle: String },
    /// Compose two morphisms of RL-étalé spaces, first M1 then M2.
    ComposeRle { m1: String, m2: String },
    /// Global sections with pointwise operations.
    Gamma { bundle: String },
    /// Hom-set bijections on small spaces.
    AdjunctionSuite {
        /// Also run the continuity checks over non-discrete bases.
        #[arg(long)]
        exploratory: bool,
    },
    /// Laws over the workspace and over seeded random inputs (RLSHEAF_SEED).
    LawSuite {
        #[arg(long, default_value_t = 12)]
        cases: usize,
    },
    /// Graphviz source for a lattice, space or bundle.
    ExportDot { object: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Filters { .. } => "filters",
            Command::Classify { .. } => "classify",
            Command::Quotient { .. } => "quotient",
            Command::Spectrum { .. } => "spectrum",
            Command::Sections { .. } => "sections",
            Command::CheckEtale { .. } => "check-etale",
            Command::CheckRlBundle { .. } => "check-rl-bundle",
            Command::Sheafify { .. } => "sheafify",
            Command::CounitCheck { .. } => "counit-check",
            Command::Pullback { .. } => "pullback",
            Command::ComposeRle { .. } => "compose-rle",
            Command::Gamma { .. } => "gamma",
            Command::AdjunctionSuite { .. } => "adjunction-suite",
            Command::LawSuite { .. } => "law-suite",
            Command::ExportDot { .. } => "export-dot",
        }
    }
}

/// Loads the workspace named on the command line and runs the command.
pub fn run(cli: &Cli) -> Report {
    let name = cli.command.name();
    let text = match &cli.workspace {
        None => workspace::BUILTIN.to_string(),
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return Report::failure(name, "io", format!("{}: {e}", p.display()), 2),
        },
    };
    let mode = if cli.lenient { Mode::Lenient } else { Mode::Strict };
    match workspace::parse_workspace(&text, mode) {
        Ok(ws) => execute(&ws, &cli.command),
        Err(e) => Report::failure(name, e.kind(), &e, e.exit_code()),
    }
}

/// An error that ends a command early.
struct Stop {
    kind: &'static str,
    message: String,
    exit: i32,
}

fn missing(what: &str, name: &str) -> Stop {
    Stop {
        kind: "reference",
        message: format!("unknown {what} `{name}`"),
        exit: 2,
    }
}

fn failed(message: impl ToString) -> Stop {
    Stop {
        kind: "precondition",
        message: message.to_string(),
        exit: 1,
    }
}

type Out = Result<(), Stop>;

pub fn execute(ws: &Workspace, cmd: &Command) -> Report {
    let mut r = Report::new(cmd.name());
    let res = match cmd {
        Command::Validate => validate(ws, &mut r),
        Command::Filters { lattice } => filters(ws, lattice, &mut r),
        Command::Classify { lattice } => classify(ws, lattice, &mut r),
        Command::Quotient { lattice, filter } => quotient_cmd(ws, lattice, filter, &mut r),
        Command::Spectrum { lattice, set, flavor } => spectrum(ws, lattice, *set, *flavor, &mut r),
        Command::Sections { bundle, open } => sections(ws, bundle, open, &mut r),
        Command::CheckEtale { bundle } => check_etale(ws, bundle, &mut r),
        Command::CheckRlBundle { bundle } => check_rl_bundle(ws, bundle, &mut r),
        Command::Sheafify { bundle } => sheafify(ws, bundle, &mut r),
        Command::CounitCheck { bundle } => counit_check(ws, bundle, &mut r),
        Command::Pullback { map, bundle } => pullback(ws, map, bundle, &mut r),
        Command::ComposeRle { m1, m2 } => compose_rle(ws, m1, m2, &mut r),
        Command::Gamma { bundle } => gamma(ws, bundle, &mut r),
        Command::AdjunctionSuite { exploratory } => adjunction_suite(ws, *exploratory, &mut r),
        Command::LawSuite { cases } => law_suite(ws, *cases, &mut r),
        Command::ExportDot { object } => export_dot(ws, object, &mut r),
    };
    match res {
        Ok(()) => r,
        Err(s) => Report::failure(cmd.name(), s.kind, s.message, s.exit),
    }
}

// ---------------------------------------------------------------- helpers

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(","))
}

/// Splits at commas outside brackets and parentheses.
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

/// A set argument: a single id, or ids separated by commas with optional
/// outer braces.
fn parse_set(arg: &str, ids: &[String]) -> Result<BitSet, Stop> {
    if let Some(i) = ids.iter().position(|x| x == arg) {
        return Ok(BitSet::singleton(i));
    }
    let t = arg.trim();
    let inner = match t.strip_prefix('{').and_then(|u| u.strip_suffix('}')) {
        Some(u) if split_top(&format!("{{{u}}}")).len() == 1 && balanced(u) => u,
        _ => t,
    };
    split_top(inner)
        .iter()
        .map(|x| {
            ids.iter()
                .position(|y| y == x)
                .ok_or_else(|| failed(format!("`{x}` is not one of {}", braces(ids))))
        })
        .collect()
}

fn lattice<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Rl, Stop> {
    ws.lattices.get(name).ok_or_else(|| missing("lattice", name))
}

fn bundle<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Bundle, Stop> {
    ws.bundles
        .get(name)
        .map(|b| &b.bundle)
        .ok_or_else(|| missing("bundle", name))
}

fn rl_bundle<'a>(ws: &'a Workspace, name: &str) -> Result<&'a RlBundle, Stop> {
    bundle(ws, name)?;
    ws.rl_bundle(name).map_err(failed)
}

fn sets_of(l: &ResiduatedLattice, fs: &[BitSet]) -> BTreeSet<BTreeSet<String>> {
    fs.iter().map(|f| l.names(f).into_iter().collect()).collect()
}

fn expected_sets(rows: &[Vec<String>]) -> BTreeSet<BTreeSet<String>> {
    rows.iter().map(|r| r.iter().cloned().collect()).collect()
}

fn sorted_ids(l: &ResiduatedLattice, fs: &[BitSet]) -> Vec<String> {
    let mut v: Vec<String> = fs.iter().map(|f| filter_id(l, f)).collect();
    v.sort();
    v
}

fn hom(r: &mut Report, name: String, h: &HomBijection) {
    r.check_with(name, h.is_bijection(), format!("{} and {} maps", h.left, h.right));
}

fn table_json(l: &ResiduatedLattice, f: impl Fn(usize, usize) -> usize) -> BTreeMap<String, String> {
    let n = l.len();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| (format!("{},{}", l.name(x), l.name(y)), l.name(f(x, y)).to_string()))
        .collect()
}

#[derive(Serialize)]
struct CounitData {
    commutes: bool,
    continuous: bool,
    injective: bool,
    surjective: bool,
    open: bool,
}

impl From<CounitReport> for CounitData {
    fn from(c: CounitReport) -> Self {
        CounitData {
            commutes: c.commutes,
            continuous: c.continuous,
            injective: c.injective,
            surjective: c.surjective,
            open: c.open,
        }
    }
}

// --------------------------------------------------------------- commands

fn expectation_checks(ws: &Workspace, r: &mut Report) {
    let e = &ws.expect;
    for (name, rows) in &e.filters {
        let l = &ws.lattices[name];
        let got = sets_of(l, &all_filters(l).filters);
        r.check(format!("filters of {name} as recorded"), got == expected_sets(rows));
    }
    for (name, rows) in &e.maximal {
        let l = &ws.lattices[name];
        let got = sets_of(l, &all_filters(l).maximal());
        r.check(
            format!("maximal filters of {name} as recorded"),
            got == expected_sets(rows),
        );
    }
    for (name, rows) in &e.minimal_prime {
        let l = &ws.lattices[name];
        let got = sets_of(l, &all_filters(l).minimal_prime());
        r.check(
            format!("minimal prime filters of {name} as recorded"),
            got == expected_sets(rows),
        );
    }
    for s in &e.spectra {
        let label = format!(
            "{} spectrum of {} with the {} topology as recorded",
            s.set, s.lattice, s.flavor
        );
        let ok = match (set_kind(&s.set), flavor_kind(&s.flavor)) {
            (Some(k), Some(f)) => spectral_space(&SpectrumConfig::of(&ws.lattices[&s.lattice], k, f))
                .ok()
                .and_then(|sp| sp.named_opens().ok())
                .is_some_and(|o| expected_sets(&o) == expected_sets(&s.opens)),
            _ => false,
        };
        r.check(label, ok);
    }
    for (name, &count) in &e.global_sections {
        let got = ws.bundles[name].bundle.global_sections().len();
        r.check_with(
            format!("global sections of {name} as recorded"),
            got == count,
            format!("{got}"),
        );
    }
}

fn set_kind(s: &str) -> Option<PrimeSet> {
    match s {
        "spec" => Some(PrimeSet::Spec),
        "max" => Some(PrimeSet::Max),
        "min" => Some(PrimeSet::Min),
        _ => None,
    }
}

fn flavor_kind(s: &str) -> Option<Flavor> {
    match s {
        "hull" => Some(Flavor::Hull),
        "dual" => Some(Flavor::Dual),
        "patch" => Some(Flavor::Patch),
        _ => None,
    }
}

fn validate(ws: &Workspace, r: &mut Report) -> Out {
    for d in &ws.diagnostics {
        r.check_with(format!("load {}", d.path), false, d.message.clone());
    }
    for (name, l) in &ws.lattices {
        r.check(
            format!("lattice {name} satisfies the axioms"),
            verify_rl(&l.candidate()).is_valid(),
        );
    }
    for (name, s) in &ws.spaces {
        let ok = s
            .named_opens()
            .is_ok_and(|o| verify_topology(s.points(), &o).is_valid());
        r.check(format!("space {name} is a topology"), ok);
    }
    for (name, m) in &ws.maps {
        r.check(format!("map {name} is continuous"), m.map.is_continuous());
    }
    for (name, m) in &ws.morphisms {
        let f = &m.morphism;
        r.check(
            format!("morphism {name} preserves the operations"),
            is_rl_morphism(f.dom(), f.cod(), f.table()),
        );
    }
    let mut etale = Vec::new();
    for (name, b) in &ws.bundles {
        r.check(
            format!("bundle {name} projects continuously"),
            b.bundle.proj().is_continuous(),
        );
        if b.bundle.is_etale() {
            etale.push(name.clone());
        }
        if let Some(rl) = &b.rl {
            let report = verify_rl_bundle(rl).map_err(failed)?;
            r.check_with(
                format!("bundle {name} carries residuated lattices"),
                report.is_valid(),
                report.summary().join("; "),
            );
        }
    }
    expectation_checks(ws, r);
    let counts = [
        ("lattices", ws.lattices.len()),
        ("spaces", ws.spaces.len()),
        ("maps", ws.maps.len()),
        ("morphisms", ws.morphisms.len()),
        ("bundles", ws.bundles.len()),
        ("rle_morphisms", ws.rle_morphisms.len()),
    ];
    for (k, n) in counts {
        r.line(format!("{k}: {n}"));
    }
    r.line(format!("etale: {}", etale.join(", ")));
    let counts: BTreeMap<&str, usize> = counts.into_iter().collect();
    r.set("counts", counts);
    r.set("etale", etale);
    let diags: Vec<BTreeMap<&str, &str>> = ws
        .diagnostics
        .iter()
        .map(|d| {
            [("path", d.path.as_str()), ("message", d.message.as_str())]
                .into_iter()
                .collect()
        })
        .collect();
    r.set("diagnostics", diags);
    Ok(())
}

fn filters(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let l = lattice(ws, name)?;
    let fl = all_filters(l);
    let ids = sorted_ids(l, &fl.filters);
    r.line(format!("{} filters of {name}", ids.len()));
    for id in &ids {
        r.line(format!("  {id}"));
    }
    if let Some(rows) = ws.expect.filters.get(name) {
        r.check("filters as recorded", sets_of(l, &fl.filters) == expected_sets(rows));
    }
    r.set("lattice", name);
    r.set("filters", ids);
    Ok(())
}

fn classify(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let l = lattice(ws, name)?;
    let fl = all_filters(l);
    #[derive(Serialize)]
    struct Row {
        filter: String,
        proper: bool,
        prime: bool,
        maximal: bool,
        minimal_prime: bool,
    }
    let mut rows: Vec<Row> = fl
        .filters
        .iter()
        .zip(&fl.flags)
        .map(|(f, g)| Row {
            filter: filter_id(l, f),
            proper: g.proper,
            prime: g.prime,
            maximal: g.maximal,
            minimal_prime: g.minimal_prime,
        })
        .collect();
    rows.sort_by(|a, b| a.filter.cmp(&b.filter));
    for row in &rows {
        let mut tags = Vec::new();
        for (on, tag) in [
            (row.proper, "proper"),
            (row.prime, "prime"),
            (row.maximal, "maximal"),
            (row.minimal_prime, "minimal-prime"),
        ] {
            if on {
                tags.push(tag);
            }
        }
        r.line(format!("{}  {}", row.filter, tags.join(" ")));
    }
    let max = sorted_ids(l, &fl.maximal());
    let min = sorted_ids(l, &fl.minimal_prime());
    r.line(format!("Max: {}", max.join(" ")));
    r.line(format!("Min: {}", min.join(" ")));
    if let Some(rows) = ws.expect.maximal.get(name) {
        r.check(
            "maximal filters as recorded",
            sets_of(l, &fl.maximal()) == expected_sets(rows),
        );
    }
    if let Some(rows) = ws.expect.minimal_prime.get(name) {
        r.check(
            "minimal prime filters as recorded",
            sets_of(l, &fl.minimal_prime()) == expected_sets(rows),
        );
    }
    r.set("lattice", name);
    r.set("filters", rows);
    r.set("maximal", max);
    r.set("minimal_prime", min);
    Ok(())
}

fn quotient_cmd(ws: &Workspace, name: &str, filter: &str, r: &mut Report) -> Out {
    let l = lattice(ws, name)?;
    let f = parse_set(filter, l.elements())?;
    if !is_filter(l, &f) {
        return Err(failed(format!("{} is not a filter of {name}", filter_id(l, &f))));
    }
    let (q, pi) = quotient(l, &f).map_err(failed)?;
    let classes: BTreeMap<String, String> = pi.named_table().into_iter().collect();
    r.line(format!("{name}/{}: {} elements", filter_id(l, &f), q.len()));
    for (x, c) in &classes {
        r.line(format!("  {x} -> {c}"));
    }
    r.check("quotient satisfies the axioms", verify_rl(&q.candidate()).is_valid());
    r.check("projection is a morphism", is_rl_morphism(l, &q, pi.table()));
    r.check("projection has the filter as coker", pi.coker() == f);
    let mut elements = q.elements().to_vec();
    elements.sort();
    r.set("filter", filter_id(l, &f));
    r.set("elements", elements);
    r.set("classes", classes);
    r.set("mul", table_json(&q, |x, y| q.mul(x, y)));
    r.set("imp", table_json(&q, |x, y| q.imp(x, y)));
    Ok(())
}

fn spectrum(ws: &Workspace, name: &str, set: SetArg, flavor: FlavorArg, r: &mut Report) -> Out {
    let l = lattice(ws, name)?;
    let k = match set {
        SetArg::Spec => PrimeSet::Spec,
        SetArg::Max => PrimeSet::Max,
        SetArg::Min => PrimeSet::Min,
    };
    let f = match flavor {
        FlavorArg::Hull => Flavor::Hull,
        FlavorArg::Dual => Flavor::Dual,
        FlavorArg::Patch => Flavor::Patch,
    };
    let sk = format!("{set:?}").to_lowercase();
    let fk = format!("{flavor:?}").to_lowercase();
    let sp = spectral_space(&SpectrumConfig::of(l, k, f)).map_err(failed)?;
    let mut opens: Vec<Vec<String>> = sp.named_opens().map_err(failed)?;
    opens.sort_by_key(|o| (o.len(), o.clone()));
    let points = sp.points().to_vec();
    r.line(format!("points: {}", points.join(" ")));
    r.line("opens:");
    for o in &opens {
        r.line(format!("  {}", braces(o)));
    }
    r.check("family is a topology", verify_topology(&points, &opens).is_valid());
    for e in ws
        .expect
        .spectra
        .iter()
        .filter(|e| e.lattice == name && e.set == sk && e.flavor == fk)
    {
        r.check("opens as recorded", expected_sets(&opens) == expected_sets(&e.opens));
    }
    r.set("lattice", name);
    r.set("set", sk);
    r.set("flavor", fk);
    r.set("points", points);
    r.set("opens", opens);
    Ok(())
}

fn sections(ws: &Workspace, name: &str, open: &str, r: &mut Report) -> Out {
    let b = bundle(ws, name)?;
    let base = b.base();
    let u = parse_set(open, base.points())?;
    let mut ids: Vec<String> = b.sections(&u).iter().map(|s| s.id(b)).collect();
    ids.sort();
    let over = braces(&base.names(&u));
    r.line(format!(
        "{} sections over {over} (open: {})",
        ids.len(),
        yes(base.is_open(&u))
    ));
    for id in &ids {
        r.line(format!("  {id}"));
    }
    r.set("bundle", name);
    r.set("over", over);
    r.set("open", base.is_open(&u));
    r.set("sections", ids);
    Ok(())
}

fn check_etale(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let b = bundle(ws, name)?;
    let p = b.proj();
    let (c, o, li) = (p.is_continuous(), p.is_open_map(), p.is_locally_injective());
    r.line(format!(
        "continuous: {}; open: {}; locally injective: {}",
        yes(c),
        yes(o),
        yes(li)
    ));
    r.check("projection is continuous", c);
    r.check("projection is open", o);
    r.check("projection is locally injective", li);
    r.set("bundle", name);
    r.set("etale", b.is_etale());
    Ok(())
}

fn check_rl_bundle(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let rb = rl_bundle(ws, name)?;
    let rep = verify_rl_bundle(rb).map_err(failed)?;
    r.check("every stalk has an algebra", rep.empty_stalks.is_empty());
    r.check("stalks satisfy the axioms", rep.stalk_failures.is_empty());
    r.check("operations are continuous", rep.discontinuous_ops.is_empty());
    r.check("zero and one are continuous", rep.discontinuous_constants.is_empty());
    for l in rep.summary() {
        r.line(l);
    }
    r.set("bundle", name);
    r.set("etale", rb.bundle().is_etale());
    r.set("problems", rep.summary());
    Ok(())
}

fn germ_report(ws: &Workspace, name: &str, r: &mut Report) -> Result<(CounitReport, bool), Stop> {
    let b = bundle(ws, name)?;
    let g = etale_of(b).map_err(failed)?;
    let cr = counit_report(&g);
    let etale = g.bundle().is_etale();
    let mut ids: Vec<String> = g.germs().iter().map(|x| x.id(b)).collect();
    ids.sort();
    r.line(format!("étalé: {}; germs: {}", yes(etale), ids.len()));
    r.line(format!(
        "counit continuous: {}; injective: {}; surjective: {}; open: {}",
        yes(cr.continuous),
        yes(cr.injective),
        yes(cr.surjective),
        yes(cr.open)
    ));
    r.check("germ space is étalé", etale);
    r.check("counit is continuous", cr.continuous);
    r.check("counit commutes with the projections", cr.commutes);
    if let Some(rb) = ws.bundles[name].rl.as_ref() {
        if verify_rl_bundle(rb).is_ok_and(|x| x.is_valid()) {
            match rl_germ_ops(rb, &g) {
                Ok(grb) => {
                    let valid = verify_rl_bundle(&grb).is_ok_and(|x| x.is_valid());
                    r.check("germs carry residuated lattices", valid);
                    r.check(
                        "counit preserves the operations",
                        is_rl_bundle_morphism(&counit(&g), &grb, rb),
                    );
                }
                Err(e) => {
                    r.check_with("germs carry residuated lattices", false, e.to_string());
                }
            }
        }
    }
    r.set("bundle", name);
    r.set("etale", etale);
    r.set("germs", ids);
    r.set("counit", CounitData::from(cr));
    Ok((cr, b.is_etale()))
}

fn sheafify(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    germ_report(ws, name, r).map(|_| ())
}

fn counit_check(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let (cr, etale) = germ_report(ws, name, r)?;
    r.check_with(
        "counit is an isomorphism exactly when the bundle is étalé",
        cr.is_isomorphism() == etale,
        format!(
            "isomorphism: {}; bundle étalé: {}",
            yes(cr.is_isomorphism()),
            yes(etale)
        ),
    );
    r.set("isomorphism", cr.is_isomorphism());
    Ok(())
}

fn pullback(ws: &Workspace, map: &str, name: &str, r: &mut Report) -> Out {
    let f = &ws.maps.get(map).ok_or_else(|| missing("map", map))?.map;
    let b = bundle(ws, name)?;
    if f.cod() != b.base() {
        return Err(failed(format!("map `{map}` does not land in the base of `{name}`")));
    }
    let pb = pullback_etale(f, b).map_err(failed)?;
    let res = pb.result();
    let total = res.total();
    let mut rows: Vec<(String, String, String)> = (0..total.len())
        .map(|k| {
            (
                total.name(k).to_string(),
                res.base().name(res.proj().apply(k)).to_string(),
                b.total().name(pb.fprime().apply(k)).to_string(),
            )
        })
        .collect();
    rows.sort();
    r.line(format!("{} points", rows.len()));
    for (p, over, t) in &rows {
        r.line(format!("  {p} over {over} to {t}"));
    }
    r.check("square commutes", pb.commutes());
    r.check("second projection is continuous", pb.fprime().is_continuous());
    if b.is_etale() {
        r.check("pullback is étalé", res.is_etale());
    }
    if let Some(rb) = ws.bundles[name].rl.as_ref() {
        let (pb2, pulled) = pullback_rl_etale(f, rb).map_err(failed)?;
        let valid = verify_rl_bundle(&pulled).is_ok_and(|x| x.is_valid());
        r.check("pulled stalks carry residuated lattices", valid);
        let v = fprime_stalk_violation(&pb2, &pulled, rb);
        r.check_with(
            "second projection preserves the operations",
            v.is_none(),
            v.unwrap_or_default(),
        );
    }
    r.set("map", map);
    r.set("bundle", name);
    r.set(
        "points",
        rows.iter()
            .map(|(p, over, t)| {
                [("point", p), ("over", over), ("to", t)]
                    .into_iter()
                    .collect::<BTreeMap<_, _>>()
            })
            .collect::<Vec<_>>(),
    );
    r.set("etale", res.is_etale());
    Ok(())
}

fn rle<'a>(ws: &'a Workspace, name: &str) -> Result<&'a RleInvMorphism, Stop> {
    ws.rle_morphisms
        .get(name)
        .map(|m| &m.morphism)
        .ok_or_else(|| missing("rle morphism", name))
}

fn compose_rle(ws: &Workspace, n1: &str, n2: &str, r: &mut Report) -> Out {
    let (m1, m2) = (rle(ws, n1)?, rle(ws, n2)?);
    let c = compose_rle_inv(m1, m2).map_err(failed)?;
    let base: BTreeMap<String, String> = c.f().named_table().into_iter().collect();
    let alpha: BTreeMap<String, String> = c.alpha().named_table().into_iter().collect();
    r.line(format!(
        "base map: {}",
        base.iter()
            .map(|(a, b)| format!("{a}->{b}"))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    r.line("alpha:");
    for (a, b) in &alpha {
        r.line(format!("  {a} -> {b}"));
    }
    let left = compose_rle_inv(&RleInvMorphism::identity(m1.src()), &c).map_err(failed)?;
    let right = compose_rle_inv(&c, &RleInvMorphism::identity(m2.dst())).map_err(failed)?;
    r.check("identities are neutral", left == c && right == c);
    let (_, _, s1) = section_functor_morphism(m1).map_err(failed)?;
    let (_, _, s2) = section_functor_morphism(m2).map_err(failed)?;
    let (_, _, sc) = section_functor_morphism(&c).map_err(failed)?;
    let composed = s2.then(&s1).map_err(failed)?;
    r.check("sections reverse the composite", composed.table() == sc.table());
    r.set("base_map", base);
    r.set("alpha", alpha);
    Ok(())
}

fn gamma(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let rb = rl_bundle(ws, name)?;
    let x = RleSpace::new(rb.clone()).map_err(failed)?;
    let sa = section_functor_object(&x).map_err(failed)?;
    let l = &sa.algebra;
    let mut elements = l.elements().to_vec();
    elements.sort();
    r.line(format!("{} global sections", elements.len()));
    for e in &elements {
        r.line(format!("  {e}"));
    }
    r.check("sections satisfy the axioms", verify_rl(&l.candidate()).is_valid());
    if let Some(&n) = ws.expect.global_sections.get(name) {
        r.check("count as recorded", n == elements.len());
    }
    r.set("bundle", name);
    r.set("elements", elements);
    r.set("bot", l.name(l.bot()));
    r.set("top", l.name(l.top()));
    r.set("mul", table_json(l, |a, b| l.mul(a, b)));
    r.set("imp", table_json(l, |a, b| l.imp(a, b)));
    Ok(())
}

fn small_spaces() -> Vec<(&'static str, Space)> {
    vec![
        ("point", fx::point()),
        ("sierpinski", fx::sierpinski()),
        ("two", fx::discrete(&["p", "q"])),
    ]
}

fn adjunction_suite(ws: &Workspace, exploratory: bool, r: &mut Report) -> Out {
    let opts = Options { exploratory };
    let spaces = small_spaces();
    let bases: Vec<&(&str, Space)> = spaces.iter().filter(|(_, s)| exploratory || s.is_discrete()).collect();
    for (bn, b) in &bases {
        for (xn, x) in &spaces[..2] {
            for (tn, t) in &spaces {
                let h = check_exponential(b, x, t, opts).map_err(failed)?;
                hom(r, format!("exponential B={bn} X={xn} T={tn}"), &h);
            }
            for (yn, y) in &spaces[..2] {
                let tr = check_triangle_identities(b, x, y, opts).map_err(failed)?;
                r.check(format!("triangle identities B={bn} X={xn} Y={yn}"), tr.holds());
            }
        }
    }
    for (name, nb) in &ws.bundles {
        let b = &nb.bundle;
        if !b.is_etale() || b.total().len() > 8 {
            continue;
        }
        for (yn, y) in &spaces[..2] {
            let h = check_projection_adjunction(b, y).map_err(failed)?;
            hom(r, format!("projection {name} Y={yn}"), &h);
            if exploratory || b.base().is_discrete() {
                let h = check_section_adjunction(b, y, opts).map_err(failed)?;
                hom(r, format!("sections {name} X={yn}"), &h);
            }
        }
        if let Some(rb) = &nb.rl {
            if b.base().is_discrete() {
                let g = gamma_topological_rl(rb).map_err(failed)?;
                r.check(format!("sections of {name} form a topological algebra"), g.is_valid());
            }
        }
    }
    if let Some(a2) = ws.lattices.get("A2") {
        for (bn, b) in &bases {
            let lifted = lift_compact_open_rl(b, &TopologicalRl::discrete(a2.clone())).map_err(failed)?;
            r.check(format!("maps {bn} -> A2 form a topological algebra"), lifted.is_valid());
        }
    }
    r.set("exploratory", exploratory);
    r.set("checks", r.checks.len());
    Ok(())
}

fn law_suite(ws: &Workspace, cases: usize, r: &mut Report) -> Out {
    // law -> (passed, run)
    let mut laws: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
    let mut tally = |law: &'static str, ok: bool| {
        let e = laws.entry(law).or_default();
        e.0 += ok as usize;
        e.1 += 1;
    };
    for l in ws.lattices.values() {
        tally("axioms", verify_rl(&l.candidate()).is_valid());
        let fl = all_filters(l);
        let round = fl
            .filters
            .iter()
            .all(|f| congruence_of_filter(l, f).is_ok_and(|c| c.filter(l) == *f));
        tally(
            "filters and congruences correspond",
            round && all_congruences(l).len() == fl.filters.len(),
        );
        for f in &fl.filters {
            let ok = quotient(l, f).is_ok_and(|(q, pi)| is_rl_morphism(l, &q, pi.table()) && pi.coker() == *f);
            tally("quotient projection has the filter as coker", ok);
        }
        for set in [PrimeSet::Spec, PrimeSet::Max, PrimeSet::Min] {
            for fl in [Flavor::Hull, Flavor::Dual, Flavor::Patch] {
                let ok = spectral_space(&SpectrumConfig::of(l, set, fl)).is_ok_and(|s| {
                    s.named_opens()
                        .is_ok_and(|o| verify_topology(s.points(), &o).is_valid())
                });
                tally("spectral families are topologies", ok);
            }
        }
    }
    for m in ws.morphisms.values() {
        let f = &m.morphism;
        tally(
            "injective exactly when coker is {1}",
            f.is_injective() == (f.coker() == BitSet::singleton(f.dom().top())),
        );
    }
    for nb in ws.bundles.values() {
        if let Ok(g) = etale_of(&nb.bundle) {
            tally("germ space is étalé", g.bundle().is_etale());
            tally(
                "counit is an isomorphism exactly on étalé spaces",
                counit_report(&g).is_isomorphism() == nb.bundle.is_etale(),
            );
        }
    }
    let rles: Vec<&RleInvMorphism> = ws.rle_morphisms.values().map(|m| &m.morphism).collect();
    for m in &rles {
        let id = RleInvMorphism::identity(m.src());
        tally("identity is neutral", compose_rle_inv(&id, m).is_ok_and(|c| c == **m));
        if let Ok((_, _, s)) = section_functor_morphism(&id) {
            tally(
                "sections of the identity are the identity",
                s.table().iter().enumerate().all(|(i, &j)| i == j),
            );
        }
    }
    for a in &rles {
        for b in &rles {
            if a.dst().bundle() != b.src().bundle() {
                continue;
            }
            for c in &rles {
                if b.dst().bundle() != c.src().bundle() {
                    continue;
                }
                let l = compose_rle_inv(a, b).and_then(|ab| compose_rle_inv(&ab, c));
                let rr = compose_rle_inv(b, c).and_then(|bc| compose_rle_inv(a, &bc));
                tally(
                    "composition is associative",
                    matches!((l, rr), (Ok(x), Ok(y)) if x == y),
                );
            }
        }
    }

    let mut rng = random::rng();
    for _ in 0..cases {
        let f = random::space_map(&mut rng, 5);
        tally(
            "continuity two ways",
            f.is_continuous() == f.is_continuous_by_preimages(),
        );
        tally("openness two ways", f.is_open_map() == f.is_open_map_by_images());
        tally(
            "local injectivity two ways",
            f.is_locally_injective() == f.is_locally_injective_by_opens(),
        );
        tally(
            "local homeomorphism two ways",
            f.is_local_homeomorphism() == f.is_local_homeomorphism_direct(),
        );

        let x = random::bundle(&mut rng, 6);
        let g = etale_of(&x).map_err(failed)?;
        tally("germ space is étalé", g.bundle().is_etale());
        let cr = counit_report(&g);
        tally("counit is continuous and commutes", cr.continuous && cr.commutes);
        tally(
            "counit is an isomorphism exactly on étalé spaces",
            cr.is_isomorphism() == x.is_etale(),
        );
        let t = random::etale_over(&mut rng, x.base(), 2);
        if t.total().len() <= 6 {
            let cc = coreflection_check(&t, &x).map_err(failed)?;
            tally("bundle maps into X match étalé maps into its germs", cc.is_bijection());
        }

        let e = random::etale(&mut rng, 3, 2);
        let n = rng.gen_range(1..=3);
        let c = random::space(&mut rng, "c", n, 0.4);
        let maps = continuous_maps(&c, e.base());
        let f = &maps[rng.gen_range(0..maps.len())];
        let pb = pullback_etale(f, &e).map_err(failed)?;
        tally(
            "pullback is étalé and commutes",
            pb.result().is_etale() && pb.commutes(),
        );
        let m = rng.gen_range(1..=2);
        let d = random::space(&mut rng, "d", m, 0.4);
        let gs = continuous_maps(&d, &c);
        let g = &gs[rng.gen_range(0..gs.len())];
        tally(
            "pullbacks compose up to the canonical iso",
            lambda_iso(g, f, &e).is_ok_and(|l| l.is_iso()),
        );
    }
    let seed = random::seed();
    r.line(format!("seed: {seed}; random cases: {cases}"));
    for (law, &(ok, n)) in &laws {
        r.check_with(*law, ok == n, format!("{ok}/{n}"));
    }
    r.set("seed", seed);
    r.set("cases", cases);
    Ok(())
}

fn export_dot(ws: &Workspace, name: &str, r: &mut Report) -> Out {
    let (kind, text) = if let Some(l) = ws.lattices.get(name) {
        ("lattice", dot::lattice(name, l))
    } else if let Some(b) = ws.bundles.get(name) {
        ("bundle", dot::bundle(name, &b.bundle))
    } else if let Some(s) = ws.spaces.get(name) {
        ("space", dot::space(name, s))
    } else {
        return Err(missing("object", name));
    };
    r.lines.extend(text.lines().map(str::to_string));
    r.set("object", name);
    r.set("kind", kind);
    r.set("dot", text);
    Ok(())
}

//! Orbit-based classification of centrally affine, trimedial and
//! distributive quasigroups over a commutative Moufang loop.
//!
//! The enumeration walks orbit representatives level by level: conjugacy
//! classes of `phi` in the J-central coset under the full automorphism
//! group, then classes of `psi` under the centralizer of `phi`, then the
//! central element `c` modulo the image of `x -> x - (phi(x) + psi(x))`
//! under the joint centralizer. Centralizers are realized as Schreier
//! stabilizers of the conjugation orbits, never by a separate search.

use crate::error::Error;
use crate::loop_table::{LoopTable, Subloop};
use crate::orbit::{gen_pairs, orbit_partition, ConjugationAction, OrbitData, OrbitPartition};
use crate::perm::Perm;
use crate::permgroup::{self, PermGroup};
use crate::quasigroup;
use crate::search::{
    automorphism_group_in, central_data, hat, id_minus, AutSearchConfig, CentralData,
    SearchContext,
};
use crate::Result;
use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::Arc;
use std::time::Instant;

/// Which class of quasigroups a report enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasigroupKind {
    CentrallyAffine,
    Trimedial,
    Distributive,
}

impl QuasigroupKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuasigroupKind::CentrallyAffine => "affine",
            QuasigroupKind::Trimedial => "trimedial",
            QuasigroupKind::Distributive => "distributive",
        }
    }
}

/// Whether the numbers in a report are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportStatus {
    Exact,
    LowerBound(String),
    Skipped(String),
}

impl ReportStatus {
    pub fn label(&self) -> &'static str {
        match self {
            ReportStatus::Exact => "exact",
            ReportStatus::LowerBound(_) => "lower-bound",
            ReportStatus::Skipped(_) => "skipped",
        }
    }
}

/// A central arithmetic form `(Q, +, phi, psi, c)`.
#[derive(Clone, Debug)]
pub struct ArithmeticForm {
    pub loop_table: Arc<LoopTable>,
    pub phi: Perm,
    pub psi: Perm,
    pub c: u16,
}

impl ArithmeticForm {
    /// Validates the form invariants: `phi`, `psi` are J-central
    /// automorphisms, `c` is central; the trimedial flavor additionally
    /// requires `phi psi = psi phi` and the distributive flavor `c = 0`
    /// and `phi = id - psi`.
    pub fn new_checked(
        loop_table: Arc<LoopTable>,
        phi: Perm,
        psi: Perm,
        c: u16,
        kind: QuasigroupKind,
    ) -> Result<ArithmeticForm> {
        let l = &*loop_table;
        let center = l.center();
        let check_member = |p: &Perm, name: &str| -> Result<()> {
            let as_map = crate::loop_table::ElementMap::new(l.order(), p.images().to_vec());
            if !as_map.is_endomorphism(l) {
                return Err(Error::MalformedTable(format!("{name} is not an automorphism")));
            }
            let h = hat(l, p);
            if !(0..l.order() as u16).all(|x| center.contains(h.apply(x))) {
                return Err(Error::MalformedTable(format!("{name} is not J-central")));
            }
            Ok(())
        };
        check_member(&phi, "phi")?;
        check_member(&psi, "psi")?;
        if !center.contains(c) {
            return Err(Error::MalformedTable("c is not central".into()));
        }
        match kind {
            QuasigroupKind::CentrallyAffine => {}
            QuasigroupKind::Trimedial => {
                if !phi.commutes_with(&psi) {
                    return Err(Error::MalformedTable("phi and psi do not commute".into()));
                }
            }
            QuasigroupKind::Distributive => {
                if c != 0 {
                    return Err(Error::MalformedTable("distributive forms need c = 0".into()));
                }
                let complement = id_minus(l, &psi);
                if complement.images() != phi.images() {
                    return Err(Error::MalformedTable("phi must equal id - psi".into()));
                }
            }
        }
        Ok(ArithmeticForm {
            loop_table,
            phi,
            psi,
            c,
        })
    }

    /// Materializes the quasigroup `x * y = (phi(x) + psi(y)) + c`.
    pub fn build(&self) -> LoopTable {
        quasigroup::build_affine(&self.loop_table, &self.phi, &self.psi, self.c)
    }
}

/// A retained representative with optional triple-system tags.
#[derive(Clone, Debug)]
pub struct FormRecord {
    pub form: ArithmeticForm,
    pub mendelsohn: Option<bool>,
    pub steiner: Option<bool>,
}

/// Per-loop, per-kind classification result.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub loop_id: String,
    pub kind: QuasigroupKind,
    /// Number of quasigroups of this kind over the loop, up to isomorphism.
    pub count: u64,
    /// Orbits of the conjugation action on the J-central coset
    /// (`phi`-level); `None` for distributive reports.
    pub phi_orbit_count: Option<u64>,
    /// Total `(phi, psi)` orbit pairs; `None` for distributive reports.
    pub pair_orbit_count: Option<u64>,
    pub representatives: Option<Vec<FormRecord>>,
    pub status: ReportStatus,
    /// The underlying loop is associative, so the quasigroups are medial
    /// and excluded from non-medial totals.
    pub medial_regime: bool,
    pub elapsed_ms: u128,
}

impl ClassificationReport {
    pub fn mendelsohn_count(&self) -> Option<u64> {
        let reps = self.representatives.as_ref()?;
        if reps.iter().any(|r| r.mendelsohn.is_none()) {
            return None;
        }
        Some(reps.iter().filter(|r| r.mendelsohn == Some(true)).count() as u64)
    }

    pub fn steiner_count(&self) -> Option<u64> {
        let reps = self.representatives.as_ref()?;
        if reps.iter().any(|r| r.steiner.is_none()) {
            return None;
        }
        Some(reps.iter().filter(|r| r.steiner == Some(true)).count() as u64)
    }
}

/// Budgets for search and orbit machinery.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Candidate-image attempts in the backtracking searches.
    pub search_nodes: u64,
    /// Points visited in a single orbit closure.
    pub orbit_points: u64,
    /// Largest stabilizer subgroup that will be fully enumerated to shrink
    /// its generating set; larger ones keep their raw Schreier generators.
    pub stabilizer_enum_cap: u64,
    /// Wall-clock cap for the searches of one pipeline.
    pub wall_clock: Option<std::time::Duration>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            search_nodes: 2_000_000_000,
            orbit_points: 100_000_000,
            stabilizer_enum_cap: 400_000,
            wall_clock: None,
        }
    }
}

/// Options for a classification run.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    pub counts_only: bool,
    pub budgets: Budgets,
}

impl ClassifyOptions {
    pub fn counts_only() -> Self {
        ClassifyOptions {
            counts_only: true,
            budgets: Budgets::default(),
        }
    }
}

/// Everything the classification needs for one loop: search context,
/// central data and the full automorphism group.
pub struct LoopPipeline {
    pub loop_id: String,
    pub table: Arc<LoopTable>,
    pub ctx: SearchContext,
    pub central: CentralData,
    pub aut: PermGroup,
}

impl LoopPipeline {
    /// Runs both searches for the loop. `imported_aut_generators`, when
    /// given, bypasses the full search: the generators are verified to be
    /// automorphisms and the group order is taken from enumeration or
    /// orbit counting downstream.
    pub fn new(
        loop_id: &str,
        table: LoopTable,
        budgets: Budgets,
        imported_aut_generators: Option<(Vec<Perm>, Option<u64>)>,
    ) -> Result<LoopPipeline> {
        let cfg = AutSearchConfig {
            node_budget: budgets.search_nodes,
            time_budget: budgets.wall_clock,
            ..AutSearchConfig::default()
        };
        let ctx = SearchContext::new(&table, &cfg)?;
        let central = central_data(&ctx, budgets.search_nodes)?;
        let aut = match imported_aut_generators {
            Some((gens, order)) => {
                for g in &gens {
                    let as_map =
                        crate::loop_table::ElementMap::new(table.order(), g.images().to_vec());
                    if !as_map.is_endomorphism(&table) {
                        return Err(Error::MalformedTable(
                            "imported generator is not an automorphism".into(),
                        ));
                    }
                }
                let mut group = PermGroup::new(table.order(), gens);
                if let Some(o) = order {
                    group.set_known_order(o);
                }
                group
            }
            None => automorphism_group_in(&ctx, budgets.search_nodes)?,
        };
        Ok(LoopPipeline {
            loop_id: loop_id.to_string(),
            table: Arc::new(table),
            ctx,
            central,
            aut,
        })
    }

    pub fn is_associative(&self) -> bool {
        self.table.is_associative()
    }
}

/// The centralizer of the representative of `orbit` inside the acting
/// group, as a permutation group with known order.
fn stabilizer_group(
    acting: &PermGroup,
    orbit: &OrbitData,
    budgets: &Budgets,
) -> Result<PermGroup> {
    let degree = acting.degree();
    if orbit.len() == 1 {
        return Ok(acting.clone());
    }
    let order = acting.known_order().map(|o| {
        assert_eq!(
            o % orbit.len() as u64,
            0,
            "orbit size must divide the group order"
        );
        o / orbit.len() as u64
    });
    match order {
        Some(o) if o <= budgets.stabilizer_enum_cap => {
            // enumerate and shrink the generating set
            let gens = grow_to_order(degree, &orbit.stabilizer_generators, o)?;
            let mut g = PermGroup::new(degree, gens);
            g.set_known_order(o);
            Ok(g)
        }
        _ => {
            let mut g = PermGroup::new(degree, orbit.stabilizer_generators.clone());
            if let Some(o) = order {
                g.set_known_order(o);
            }
            Ok(g)
        }
    }
}

/// Greedy generator selection from `candidates`, closing incrementally
/// until the closure reaches `order` elements.
fn grow_to_order(degree: usize, candidates: &[Perm], order: u64) -> Result<Vec<Perm>> {
    let mut kept: Vec<Perm> = Vec::new();
    let mut closed: FxHashSet<Perm> = FxHashSet::default();
    closed.insert(Perm::identity(degree));
    for cand in candidates {
        if closed.len() as u64 == order {
            break;
        }
        if closed.contains(cand) {
            continue;
        }
        kept.push(cand.clone());
        closed.clear();
        closed.extend(permgroup::closure(degree, &kept, order + 1)?);
    }
    assert_eq!(
        closed.len() as u64,
        order,
        "Schreier generators must generate the stabilizer"
    );
    Ok(kept)
}

/// The subgroup `I = Im(x -> x - (phi(x) + psi(x)))` of the center, and
/// the canonical representative of each coset of `I` in the center.
struct CentralCosets {
    /// Canonical (minimal) member of each coset, sorted.
    reps: Vec<u16>,
    /// Canonical representative of `z + I`, indexed by element; only
    /// entries for central `z` are meaningful.
    canon: Vec<u16>,
}

fn central_cosets(l: &LoopTable, center: &Subloop, phi: &Perm, psi: &Perm) -> CentralCosets {
    let image: FxHashSet<u16> = (0..l.order() as u16)
        .map(|x| l.sub(x, l.add(phi.apply(x), psi.apply(x))))
        .collect();
    let mut image: Vec<u16> = image.into_iter().collect();
    image.sort_unstable();
    debug_assert!(image.iter().all(|&i| center.contains(i)));
    let mut canon = vec![u16::MAX; l.order()];
    let mut reps = Vec::new();
    for &z in center.members() {
        let min = image.iter().map(|&i| l.add(z, i)).min().unwrap();
        canon[z as usize] = min;
        if min == z {
            reps.push(z);
        }
    }
    CentralCosets { reps, canon }
}

impl CentralCosets {
    fn canon(&self, z: u16) -> u16 {
        let v = self.canon[z as usize];
        debug_assert_ne!(v, u16::MAX, "canon queried on a non-central element");
        v
    }
}

/// Orbit count of a set of central coset representatives under the maps
/// `z -> canon(gamma(z))`, together with the minimal representative per
/// orbit.
fn coset_orbit_reps(cosets: &CentralCosets, stab_gens: &[Perm]) -> Vec<u16> {
    let reps = &cosets.reps;
    let index: FxHashMap<u16, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut orbit_of: Vec<usize> = (0..reps.len()).collect();
    // union-find over a tiny universe
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in stab_gens {
        for (i, &r) in reps.iter().enumerate() {
            let img = cosets.canon(g.apply(r));
            let j = index[&img];
            let (a, b) = (find(&mut orbit_of, i), find(&mut orbit_of, j));
            if a != b {
                orbit_of[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<u16> = (0..reps.len())
        .filter(|&i| find(&mut orbit_of, i) == i)
        .map(|i| reps[i])
        .collect();
    out.sort_unstable();
    out
}

fn require_complete(aut: &PermGroup) -> Result<()> {
    if !aut.is_complete() {
        return Err(Error::IncompleteAutGroup);
    }
    Ok(())
}

/// Shared driver for the centrally affine and trimedial enumerations.
fn classify_pairs(
    p: &LoopPipeline,
    kind: QuasigroupKind,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    assert!(matches!(
        kind,
        QuasigroupKind::CentrallyAffine | QuasigroupKind::Trimedial
    ));
    require_complete(&p.aut)?;
    let start = Instant::now();
    let l = &*p.table;
    let center = p.ctx.center.clone();
    let jautc = &p.central.jautc;

    let action = ConjugationAction::new(jautc.clone());
    let aut_gens = gen_pairs(p.aut.generators());
    let top = orbit_partition(l.order(), &aut_gens, &action, opts.budgets.orbit_points)?;
    check_orbit_sums(&top, action.perms().len(), p.aut.known_order());

    let mut count = 0u64;
    let mut pair_orbits = 0u64;
    let mut reps_out: Vec<FormRecord> = Vec::new();

    for phi_orbit in &top.orbits {
        let phi = action.point(phi_orbit.representative).clone();
        let centralizer = stabilizer_group(&p.aut, phi_orbit, &opts.budgets)?;

        let universe: Vec<Perm> = match kind {
            QuasigroupKind::CentrallyAffine => jautc.clone(),
            QuasigroupKind::Trimedial => jautc
                .iter()
                .filter(|b| b.commutes_with(&phi))
                .cloned()
                .collect(),
            QuasigroupKind::Distributive => unreachable!(),
        };
        let inner_action = ConjugationAction::new(universe);
        let inner_gens = gen_pairs(centralizer.generators());
        let inner = orbit_partition(
            l.order(),
            &inner_gens,
            &inner_action,
            opts.budgets.orbit_points,
        )?;
        check_orbit_sums(
            &inner,
            inner_action.perms().len(),
            centralizer.known_order(),
        );
        pair_orbits += inner.num_orbits() as u64;

        for psi_orbit in &inner.orbits {
            let psi = inner_action.point(psi_orbit.representative).clone();
            let cosets = central_cosets(l, &center, &phi, &psi);
            let c_reps = coset_orbit_reps(&cosets, &psi_orbit.stabilizer_generators);
            count += c_reps.len() as u64;
            if !opts.counts_only {
                for &c in &c_reps {
                    let form = ArithmeticForm {
                        loop_table: p.table.clone(),
                        phi: phi.clone(),
                        psi: psi.clone(),
                        c,
                    };
                    reps_out.push(FormRecord {
                        form,
                        mendelsohn: None,
                        steiner: None,
                    });
                }
            }
        }
    }

    Ok(ClassificationReport {
        loop_id: p.loop_id.clone(),
        kind,
        count,
        phi_orbit_count: Some(top.num_orbits() as u64),
        pair_orbit_count: Some(pair_orbits),
        representatives: (!opts.counts_only).then_some(reps_out),
        status: ReportStatus::Exact,
        medial_regime: p.is_associative(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn check_orbit_sums(partition: &OrbitPartition, universe: usize, group_order: Option<u64>) {
    let total: usize = partition.orbits.iter().map(|o| o.len()).sum();
    assert_eq!(total, universe, "orbits must partition the universe");
    if let Some(order) = group_order {
        for o in &partition.orbits {
            assert_eq!(order % o.len() as u64, 0, "orbit-stabilizer violated");
        }
    }
}

/// Isomorphism classes of centrally affine quasigroups over the loop.
pub fn classify_centrally_affine(
    p: &LoopPipeline,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    classify_pairs(p, QuasigroupKind::CentrallyAffine, opts)
}

/// Isomorphism classes of trimedial quasigroups over the loop: pairs are
/// restricted to commuting `(phi, psi)`.
pub fn classify_trimedial(
    p: &LoopPipeline,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    classify_pairs(p, QuasigroupKind::Trimedial, opts)
}

/// Isomorphism classes of distributive quasigroups over the loop: orbit
/// representatives of the conjugation action on the orthoautomorphisms,
/// each yielding the form `(id - psi, psi, 0)`.
pub fn classify_distributive(
    p: &LoopPipeline,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    require_complete(&p.aut)?;
    let start = Instant::now();
    let l = &*p.table;
    let action = ConjugationAction::new(p.central.orthoautos.clone());
    let aut_gens = gen_pairs(p.aut.generators());
    let part = orbit_partition(l.order(), &aut_gens, &action, opts.budgets.orbit_points)?;
    check_orbit_sums(&part, action.perms().len(), p.aut.known_order());

    let mut reps_out = Vec::new();
    if !opts.counts_only {
        for orbit in &part.orbits {
            let psi = action.point(orbit.representative).clone();
            let phi = Perm::from_images(
                (0..l.order() as u16)
                    .map(|x| l.sub(x, psi.apply(x)))
                    .collect(),
            )
            .expect("id - psi is a bijection for orthoautomorphisms");
            reps_out.push(FormRecord {
                form: ArithmeticForm {
                    loop_table: p.table.clone(),
                    phi,
                    psi,
                    c: 0,
                },
                mendelsohn: None,
                steiner: None,
            });
        }
    }

    Ok(ClassificationReport {
        loop_id: p.loop_id.clone(),
        kind: QuasigroupKind::Distributive,
        count: part.num_orbits() as u64,
        phi_orbit_count: None,
        pair_orbit_count: None,
        representatives: (!opts.counts_only).then_some(reps_out),
        status: ReportStatus::Exact,
        medial_regime: p.is_associative(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Tags each distributive representative as Steiner and/or Mendelsohn.
///
/// Steiner: the loop has exponent 3 and `psi_hat` vanishes. Mendelsohn:
/// `psi_hat(psi_hat(x)) - 3 psi_hat(x) + 3x = 0` for all `x` (all terms
/// central, so bracketing is immaterial).
pub fn tag_steiner_mendelsohn(mut report: ClassificationReport) -> Result<ClassificationReport> {
    assert_eq!(report.kind, QuasigroupKind::Distributive);
    let reps = report
        .representatives
        .as_mut()
        .ok_or(Error::IndexUnknown(0))?;
    for rec in reps.iter_mut() {
        let l = &*rec.form.loop_table;
        let exponent3 = l.exponent() == 3;
        let psihat = hat(l, &rec.form.psi);
        rec.steiner = Some(exponent3 && psihat.is_zero());
        let mendelsohn = (0..l.order() as u16).all(|x| {
            let a = psihat.apply(psihat.apply(x));
            let b = l.scalar_mul(3, psihat.apply(x));
            let c = l.scalar_mul(3, x);
            l.add(l.sub(a, b), c) == 0
        });
        rec.mendelsohn = Some(mendelsohn);
    }
    Ok(report)
}

/// Order-level totals mirroring the by-order summary table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderAggregate {
    pub order: usize,
    pub trimedial: Option<u64>,
    pub distributive: Option<u64>,
    pub mendelsohn: Option<u64>,
    pub steiner: Option<u64>,
    /// Loops of this order that are required but missing from the input.
    pub missing: Vec<String>,
    pub complete: bool,
}

/// Sums per-loop counts into order-level totals.
///
/// Requires reports for every nonassociative commutative Moufang loop of
/// the order; missing loops are flagged and leave the affected totals
/// unset rather than silently extrapolated. Reports for associative loops
/// (medial regime) are ignored.
pub fn aggregate_by_order(order: usize, reports: &[&ClassificationReport]) -> OrderAggregate {
    let expected = crate::constructions::nonassociative_cml_names(order);
    let mut trimedial: FxHashMap<&str, u64> = FxHashMap::default();
    let mut distributive: FxHashMap<&str, u64> = FxHashMap::default();
    let mut mendelsohn: FxHashMap<&str, u64> = FxHashMap::default();
    let mut steiner: FxHashMap<&str, u64> = FxHashMap::default();
    for r in reports {
        if r.medial_regime || r.status != ReportStatus::Exact {
            continue;
        }
        let id = expected.iter().find(|&&e| e == r.loop_id);
        let Some(&id) = id else { continue };
        match r.kind {
            QuasigroupKind::Trimedial => {
                trimedial.insert(id, r.count);
            }
            QuasigroupKind::Distributive => {
                distributive.insert(id, r.count);
                if let Some(m) = r.mendelsohn_count() {
                    mendelsohn.insert(id, m);
                }
                if let Some(s) = r.steiner_count() {
                    steiner.insert(id, s);
                }
            }
            QuasigroupKind::CentrallyAffine => {}
        }
    }
    let total = |m: &FxHashMap<&str, u64>| {
        (expected.iter().all(|e| m.contains_key(e))).then(|| m.values().sum())
    };
    let t = total(&trimedial);
    let d = total(&distributive);
    let dm = total(&mendelsohn);
    let ds = total(&steiner);
    let mut missing: Vec<String> = expected
        .iter()
        .filter(|&&e| !trimedial.contains_key(e) || !distributive.contains_key(e))
        .map(|e| e.to_string())
        .collect();
    missing.sort();
    OrderAggregate {
        order,
        trimedial: t,
        distributive: d,
        mendelsohn: dm,
        steiner: ds,
        complete: missing.is_empty(),
        missing,
    }
}

/// Small-order isomorphism oracle for two forms over the same loop.
///
/// Searches the orbit of `(phi1, psi1, c1)` under the given automorphism
/// group, comparing the `c` coordinate modulo `Im(id - (phi + psi))`.
pub fn forms_isomorphic(
    f1: &ArithmeticForm,
    f2: &ArithmeticForm,
    aut: &PermGroup,
    budget: u64,
) -> Result<bool> {
    assert_eq!(
        f1.loop_table.cells(),
        f2.loop_table.cells(),
        "forms must live over the same loop table"
    );
    let l = &*f1.loop_table;
    let center = l.center();
    let gens = gen_pairs(aut.generators());
    type State = (Perm, Perm, u16);
    let canon_state = |a: &Perm, b: &Perm, c: u16| -> State {
        let cosets = central_cosets(l, &center, a, b);
        (a.clone(), b.clone(), cosets.canon(c))
    };
    let start = canon_state(&f1.phi, &f1.psi, f1.c);
    let target = canon_state(&f2.phi, &f2.psi, f2.c);
    if start == target {
        return Ok(true);
    }
    let mut seen: FxHashSet<State> = FxHashSet::default();
    let mut queue: Vec<State> = vec![start.clone()];
    seen.insert(start);
    let mut i = 0;
    while i < queue.len() {
        let (a, b, c) = queue[i].clone();
        for g in &gens {
            let na = a.conjugated_by_with_inv(&g.perm, &g.inv);
            let nb = b.conjugated_by_with_inv(&g.perm, &g.inv);
            let state = canon_state(&na, &nb, g.perm.apply(c));
            if state == target {
                return Ok(true);
            }
            if seen.insert(state.clone()) {
                if seen.len() as u64 > budget {
                    return Err(Error::BudgetExceeded {
                        what: "form isomorphism orbit",
                        visited: seen.len() as u64,
                    });
                }
                queue.push(state);
            }
        }
        i += 1;
    }
    Ok(false)
}

/// Independent enumeration oracle: counts equivalence classes of raw
/// triples `(phi, psi, c)` with the `c` coordinate compared modulo
/// `Im(id - (phi + psi))`, by closing the whole canonicalized triple space
/// under the generator action. Exponential-space; intended for small
/// abelian loops in tests.
pub fn oracle_triple_class_count(
    l: &LoopTable,
    jautc: &[Perm],
    aut: &PermGroup,
    commuting_only: bool,
    budget: u64,
) -> Result<u64> {
    let center = l.center();
    let gens = gen_pairs(aut.generators());
    let index: FxHashMap<&Perm, u32> = jautc.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();

    // canonical c per (phi, psi) pair, cached
    let mut coset_cache: FxHashMap<(u32, u32), CentralCosets> = FxHashMap::default();
    let mut states: FxHashSet<(u32, u32, u16)> = FxHashSet::default();
    for (i, a) in jautc.iter().enumerate() {
        for (j, b) in jautc.iter().enumerate() {
            if commuting_only && !a.commutes_with(b) {
                continue;
            }
            let cosets = coset_cache
                .entry((i as u32, j as u32))
                .or_insert_with(|| central_cosets(l, &center, a, b));
            for &c in &cosets.reps {
                states.insert((i as u32, j as u32, c));
                if states.len() as u64 > budget {
                    return Err(Error::BudgetExceeded {
                        what: "oracle triple space",
                        visited: states.len() as u64,
                    });
                }
            }
        }
    }

    let mut visited: FxHashSet<(u32, u32, u16)> = FxHashSet::default();
    let mut classes = 0u64;
    let all_states: Vec<_> = {
        let mut v: Vec<_> = states.iter().copied().collect();
        v.sort_unstable();
        v
    };
    for &seed in &all_states {
        if visited.contains(&seed) {
            continue;
        }
        classes += 1;
        let mut queue = vec![seed];
        visited.insert(seed);
        let mut k = 0;
        while k < queue.len() {
            let (ai, bi, c) = queue[k];
            let a = &jautc[ai as usize];
            let b = &jautc[bi as usize];
            for g in &gens {
                let na = a.conjugated_by_with_inv(&g.perm, &g.inv);
                let nb = b.conjugated_by_with_inv(&g.perm, &g.inv);
                let ni = *index.get(&na).expect("coset closed under conjugation");
                let nj = *index.get(&nb).expect("coset closed under conjugation");
                let cosets = coset_cache
                    .entry((ni, nj))
                    .or_insert_with(|| central_cosets(l, &center, &na, &nb));
                let state = (ni, nj, cosets.canon(g.perm.apply(c)));
                if visited.insert(state) {
                    queue.push(state);
                }
            }
            k += 1;
        }
    }
    assert_eq!(visited.len(), all_states.len(), "action escaped the state space");
    Ok(classes)
}

/// Convenience: builds the full pipeline for a constructed or imported
/// loop and returns it with `search::central_data` already populated.
pub fn pipeline_for(
    loop_id: &str,
    table: LoopTable,
    budgets: Budgets,
) -> Result<LoopPipeline> {
    LoopPipeline::new(loop_id, table, budgets, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::abelian_group;

    fn pipeline(id: &str, t: LoopTable) -> LoopPipeline {
        pipeline_for(id, t, Budgets::default()).unwrap()
    }

    #[test]
    fn trivial_loop_has_exactly_one_form() {
        let p = pipeline("Z(1)", abelian_group(&[1]));
        let r = classify_centrally_affine(&p, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn pipeline_matches_raw_oracle_on_z9() {
        let p = pipeline("Z(9)", abelian_group(&[9]));
        let opts = ClassifyOptions::default();
        let affine = classify_centrally_affine(&p, &opts).unwrap();
        let oracle = oracle_triple_class_count(
            &p.table,
            &p.central.jautc,
            &p.aut,
            false,
            10_000_000,
        )
        .unwrap();
        assert_eq!(affine.count, oracle);
        let trimedial = classify_trimedial(&p, &opts).unwrap();
        let oracle_t =
            oracle_triple_class_count(&p.table, &p.central.jautc, &p.aut, true, 10_000_000)
                .unwrap();
        assert_eq!(trimedial.count, oracle_t);
    }

    #[test]
    fn forms_equivalent_under_central_shift() {
        // over Z9 with phi = psi = 2id: I = Im(x -> x - 4x) = Im(6x)? compute;
        // forms differing by u in I must be isomorphic via the identity
        let l = Arc::new(abelian_group(&[9]));
        let two = Perm::from_images((0..9).map(|x| (2 * x) % 9).collect()).unwrap();
        let f0 = ArithmeticForm {
            loop_table: l.clone(),
            phi: two.clone(),
            psi: two.clone(),
            c: 0,
        };
        // delta(x) = x - 4x = -3x, image {0, 3, 6}
        let f1 = ArithmeticForm {
            loop_table: l.clone(),
            phi: two.clone(),
            psi: two,
            c: 3,
        };
        let p = pipeline("Z(9)", abelian_group(&[9]));
        assert!(forms_isomorphic(&f0, &f1, &p.aut, 1_000_000).unwrap());
    }

    #[test]
    fn checked_form_invariants() {
        let l = Arc::new(abelian_group(&[3]));
        let j = crate::search::inversion_perm(&l).unwrap();
        // distributive: phi = id - psi with psi = J means phi = 2id = J... over Z3: id - J = x - (-x) = 2x = J(x)
        let form = ArithmeticForm::new_checked(
            l.clone(),
            j.clone(),
            j.clone(),
            0,
            QuasigroupKind::Distributive,
        );
        assert!(form.is_ok());
        let bad = ArithmeticForm::new_checked(l, j.clone(), j, 1, QuasigroupKind::Distributive);
        assert!(bad.is_err());
    }
}

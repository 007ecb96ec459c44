//! Backtracking search for automorphism groups of loops.
//!
//! The engine extends a partial map on a generating set of the loop,
//! propagating forced images through the Cayley table and pruning on
//! per-element fingerprints. Three drivers share it:
//!
//! * the constrained search, restricting generator images to their own
//!   `Z(Q)`-cosets, which yields the subgroup `H` used to extract the
//!   central automorphism group as a kernel;
//! * the full search, which explores generator images coset-block by
//!   coset-block, keeps one representative per `Z(Q)`-coset tuple and
//!   counts the tuples — the full group order is `|H| * #tuples` and the
//!   representatives together with `H` generate it;
//! * an isomorphism search between two quasigroup tables.
//!
//! The full search additionally runs a shadow copy of the engine on the
//! quotient `Q/Z(Q)`: a coset tuple can only survive if the induced map
//! extends to an automorphism of the quotient, which kills most dead
//! branches at a fraction of the cost.

use crate::error::Error;
use crate::loop_table::{ElementMap, LoopTable, Subloop};
use crate::par;
use crate::perm::Perm;
use crate::permgroup::{self, PermGroup};
use crate::Result;
use rustc_hash::FxHashSet;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

const UNDEF: u16 = u16::MAX;

/// How the search chooses a generating set of the loop.
#[derive(Clone, Debug, Default)]
pub enum GeneratorChoice {
    /// Repeatedly pick an element of maximal order outside the closure of
    /// those chosen, preferring elements whose image in the abelianized
    /// quotient `Q/Z(Q)` is independent of the earlier ones; ties broken by
    /// smallest index.
    #[default]
    Greedy,
    /// Use exactly these elements (must generate the loop).
    Explicit(Vec<u16>),
}

/// Tuning knobs for the automorphism search.
#[derive(Clone, Debug)]
pub struct AutSearchConfig {
    pub generators: GeneratorChoice,
    /// Rounds of Weisfeiler-Leman refinement on the per-element fingerprints.
    pub invariant_rounds: u32,
    /// Cap on candidate-image attempts before giving up.
    pub node_budget: u64,
    /// Wall-clock budget covering all searches run from one context.
    pub time_budget: Option<std::time::Duration>,
    /// Restrict generator images to their own center cosets even in
    /// [`automorphism_group`]; the result is then the central
    /// automorphism group rather than the full group.
    pub restrict_to_center_cosets: bool,
}

impl Default for AutSearchConfig {
    fn default() -> Self {
        AutSearchConfig {
            generators: GeneratorChoice::Greedy,
            invariant_rounds: 2,
            node_budget: 2_000_000_000,
            time_budget: None,
            restrict_to_center_cosets: false,
        }
    }
}

/// Per-element fingerprints: invariant under any isomorphism of tables.
///
/// Base profile per element: cycle types of its left and right
/// translations, idempotency, and the count of associative placements
/// `(x+y)+z = x+(y+z)` it participates in as `z`. Refined `rounds` times
/// with the multiset of fingerprints of row neighbours.
pub fn fingerprints(t: &LoopTable, rounds: u32) -> Vec<u64> {
    let n = t.order();
    let mut fp: Vec<u64> = par::map_indices(n, |xi| {
        let x = xi as u16;
        let mut h = DefaultHasher::new();
        cycle_type(&t.left_translation(x)).hash(&mut h);
        // right translation images
        let rimg: Vec<u16> = (0..n as u16).map(|y| t.add(y, x)).collect();
        cycle_type(&Perm::from_images_unchecked(rimg)).hash(&mut h);
        (t.add(x, x) == x).hash(&mut h);
        let mut assoc_degree = 0u64;
        for a in 0..n as u16 {
            for b in 0..n as u16 {
                if t.add(t.add(a, b), x) == t.add(a, t.add(b, x)) {
                    assoc_degree += 1;
                }
            }
        }
        assoc_degree.hash(&mut h);
        h.finish()
    });
    for _ in 0..rounds {
        fp = par::map_indices(n, |xi| {
            let x = xi as u16;
            let mut row: Vec<(u64, u64)> = (0..n as u16)
                .map(|y| (fp[y as usize], fp[t.add(x, y) as usize]))
                .collect();
            row.sort_unstable();
            let mut h = DefaultHasher::new();
            fp[x as usize].hash(&mut h);
            row.hash(&mut h);
            h.finish()
        });
    }
    fp
}

fn cycle_type(p: &Perm) -> Vec<u16> {
    let n = p.degree();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for s in 0..n as u16 {
        if seen[s as usize] {
            continue;
        }
        let mut len = 0u16;
        let mut x = s;
        while !seen[x as usize] {
            seen[x as usize] = true;
            x = p.apply(x);
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable();
    lens
}

/// Partial homomorphism between two tables with incremental closure.
#[derive(Clone)]
struct Machine<'a> {
    src: &'a LoopTable,
    dst: &'a LoopTable,
    fp_src: &'a [u64],
    fp_dst: &'a [u64],
    map: Vec<u16>,
    used: Vec<bool>,
    defined: Vec<u16>,
    processed: usize,
}

impl<'a> Machine<'a> {
    fn new(src: &'a LoopTable, dst: &'a LoopTable, fp_src: &'a [u64], fp_dst: &'a [u64]) -> Self {
        Machine {
            src,
            dst,
            fp_src,
            fp_dst,
            map: vec![UNDEF; src.order()],
            used: vec![false; dst.order()],
            defined: Vec::with_capacity(src.order()),
            processed: 0,
        }
    }

    fn snapshot(&self) -> (usize, usize) {
        (self.defined.len(), self.processed)
    }

    fn rollback(&mut self, snap: (usize, usize)) {
        while self.defined.len() > snap.0 {
            let x = self.defined.pop().unwrap();
            let v = self.map[x as usize];
            self.used[v as usize] = false;
            self.map[x as usize] = UNDEF;
        }
        self.processed = snap.1;
    }

    #[inline]
    fn define(&mut self, x: u16, v: u16) -> bool {
        let cur = self.map[x as usize];
        if cur != UNDEF {
            return cur == v;
        }
        if self.used[v as usize] || self.fp_src[x as usize] != self.fp_dst[v as usize] {
            return false;
        }
        self.map[x as usize] = v;
        self.used[v as usize] = true;
        self.defined.push(x);
        true
    }

    /// Processes all products among defined elements, defining or checking
    /// their images. On return `true`, every pair of currently defined
    /// elements has been verified.
    fn propagate(&mut self) -> bool {
        while self.processed < self.defined.len() {
            let a = self.defined[self.processed];
            let ma = self.map[a as usize];
            for j in 0..=self.processed {
                let b = self.defined[j];
                let mb = self.map[b as usize];
                if !self.define(self.src.add(a, b), self.dst.add(ma, mb)) {
                    return false;
                }
                if !self.define(self.src.add(b, a), self.dst.add(mb, ma)) {
                    return false;
                }
            }
            self.processed += 1;
        }
        true
    }

    fn assign(&mut self, x: u16, v: u16) -> bool {
        self.define(x, v) && self.propagate()
    }

    fn is_total(&self) -> bool {
        self.defined.len() == self.src.order()
    }

    fn to_perm(&self) -> Perm {
        debug_assert!(self.is_total());
        Perm::from_images_unchecked(self.map.clone())
    }
}

/// Precomputed per-loop context shared by the search drivers.
pub struct SearchContext {
    table: LoopTable,
    fp: Vec<u64>,
    pub center: Subloop,
    /// Z(Q)-coset id of each element.
    coset_of: Vec<u16>,
    /// Members of each coset, sorted.
    cosets: Vec<Vec<u16>>,
    quotient: LoopTable,
    fp_q: Vec<u64>,
    /// Generating set of the loop, in search order.
    gens: Vec<u16>,
    /// Per generator, per coset: candidate images collapsed modulo the
    /// central translations available for that generator (see
    /// `collapse_setup`); exhaustive for deciding coset-tuple success.
    collapse_reps: Vec<Vec<Vec<u16>>>,
    deadline: Option<std::time::Instant>,
    restrict_to_center_cosets: bool,
}

impl SearchContext {
    pub fn new(l: &LoopTable, cfg: &AutSearchConfig) -> Result<SearchContext> {
        assert!(l.is_loop(), "automorphism search expects a loop");
        let n = l.order();
        let fp = fingerprints(l, cfg.invariant_rounds);
        let center = l.center();
        let (quotient, proj) = l
            .quotient(&center)
            .expect("the center is always a normal subloop");
        debug_assert_eq!(quotient.neutral(), Some(0));
        debug_assert_eq!(proj.apply(0), 0);
        let coset_of: Vec<u16> = (0..n as u16).map(|x| proj.apply(x)).collect();
        let mut cosets = vec![Vec::new(); quotient.order()];
        for x in 0..n as u16 {
            cosets[coset_of[x as usize] as usize].push(x);
        }
        let fp_q = fingerprints(&quotient, cfg.invariant_rounds);

        // abelianized quotient for independence tests and image collapsing
        let w_kernel = quotient.commutator_associator_subloop();
        let (w_table, w_proj) = quotient
            .quotient(&w_kernel)
            .expect("the commutator-associator subloop is normal");
        debug_assert!(w_table.is_commutative() && w_table.is_associative());
        let w_of: Vec<u16> = (0..n as u16)
            .map(|x| w_proj.apply(coset_of[x as usize]))
            .collect();

        let gens = match &cfg.generators {
            GeneratorChoice::Explicit(g) => {
                let closure = l.subloop_generated(g);
                assert_eq!(closure.order(), n, "explicit generators must generate");
                g.clone()
            }
            GeneratorChoice::Greedy => greedy_generators(l, &w_table, &w_of),
        };

        let collapse_reps = collapse_setup(l, &center, &cosets, &gens, &w_table, &w_of);

        Ok(SearchContext {
            table: l.clone(),
            fp,
            center,
            coset_of,
            cosets,
            quotient,
            fp_q,
            gens,
            collapse_reps,
            deadline: cfg.time_budget.map(|d| std::time::Instant::now() + d),
            restrict_to_center_cosets: cfg.restrict_to_center_cosets,
        })
    }

    fn check_deadline(&self, what: &'static str, visited: u64) -> Result<()> {
        if let Some(deadline) = self.deadline {
            if std::time::Instant::now() > deadline {
                return Err(Error::BudgetExceeded { what, visited });
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[u16] {
        &self.gens
    }

    pub fn table(&self) -> &LoopTable {
        &self.table
    }

    pub fn quotient_table(&self) -> &LoopTable {
        &self.quotient
    }

    pub fn coset_of(&self) -> &[u16] {
        &self.coset_of
    }

    /// Runs the constrained search: generator images confined to their own
    /// center cosets. Returns all automorphisms found (the subgroup `H`).
    pub fn constrained_search(&self, node_budget: u64) -> Result<Vec<Perm>> {
        let k = self.gens.len();
        let mut machine = Machine::new(&self.table, &self.table, &self.fp, &self.fp);
        // every automorphism fixes the neutral element
        assert!(machine.assign(0, 0));
        let mut found = Vec::new();
        let mut nodes = 0u64;
        self.constrained_dfs(&mut machine, 0, k, node_budget, &mut nodes, &mut found)?;
        found.sort_unstable();
        Ok(found)
    }

    fn constrained_dfs(
        &self,
        machine: &mut Machine,
        d: usize,
        k: usize,
        budget: u64,
        nodes: &mut u64,
        found: &mut Vec<Perm>,
    ) -> Result<()> {
        if d == k {
            assert!(machine.is_total(), "generators must generate the loop");
            found.push(machine.to_perm());
            return Ok(());
        }
        let g = self.gens[d];
        let coset = &self.cosets[self.coset_of[g as usize] as usize];
        for &v in coset {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExceeded {
                    what: "constrained automorphism search",
                    visited: *nodes,
                });
            }
            if nodes.is_multiple_of(1024) {
                self.check_deadline("constrained automorphism search (wall clock)", *nodes)?;
            }
            let snap = machine.snapshot();
            if machine.assign(g, v) {
                self.constrained_dfs(machine, d + 1, k, budget, nodes, found)?;
            }
            machine.rollback(snap);
        }
        Ok(())
    }

    /// Full-group search. Explores generator images grouped by center
    /// cosets, records one automorphism per coset tuple and counts tuples.
    ///
    /// Every automorphism lies in exactly one `Aut_C(Q)`-coset, and two
    /// automorphisms share a coset tuple iff they share an `H`-coset, so
    /// the full group order is `|H| * tuple_count` and `H` together with
    /// the representatives generates the full group.
    pub fn full_search(&self, node_budget: u64) -> Result<(Vec<Perm>, u64)> {
        let k = self.gens.len();
        if self.cosets.len() == 1 || k == 0 {
            // center is everything (abelian): the constrained search is
            // already unconstrained
            let all = self.constrained_search(node_budget)?;
            return Ok((all, 1));
        }
        let shared = FullShared {
            done: Mutex::new(FxHashSet::default()),
            reps: Mutex::new(Vec::new()),
            nodes: AtomicU64::new(0),
            budget: node_budget,
        };

        // top level split over coset blocks of the first generator
        let g0 = self.gens[0];
        let blocks: Vec<u16> = (0..self.cosets.len() as u16).collect();
        let outcomes = par::map_slice(&blocks, |&c0| -> Result<()> {
            let mut machine = Machine::new(&self.table, &self.table, &self.fp, &self.fp);
            let mut qmachine = Machine::new(&self.quotient, &self.quotient, &self.fp_q, &self.fp_q);
            assert!(machine.assign(0, 0) && qmachine.assign(0, 0));
            let qsnap = qmachine.snapshot();
            if !qmachine.assign(self.coset_of[g0 as usize], c0) {
                qmachine.rollback(qsnap);
                return Ok(());
            }
            let mut tuple = vec![0u16; k];
            tuple[0] = c0;
            for &v0 in self.block_candidates(0, c0) {
                let snap = machine.snapshot();
                if machine.assign(g0, v0) {
                    if k == 1 {
                        assert!(machine.is_total());
                        let found = machine.to_perm();
                        machine.rollback(snap);
                        if shared.record(&tuple[..k], found) {
                            break;
                        }
                        continue;
                    }
                    self.full_dfs(&mut machine, &mut qmachine, 1, k, &mut tuple, &shared)?;
                }
                machine.rollback(snap);
            }
            Ok(())
        });
        for o in outcomes {
            o?;
        }
        let reps = {
            let mut r = shared.reps.into_inner().unwrap();
            r.sort_unstable();
            r
        };
        let count = shared.done.into_inner().unwrap().len() as u64;
        Ok((reps, count))
    }

    fn block_candidates(&self, depth: usize, coset: u16) -> &[u16] {
        &self.collapse_reps[depth][coset as usize]
    }

    fn full_dfs(
        &self,
        machine: &mut Machine,
        qmachine: &mut Machine,
        d: usize,
        k: usize,
        tuple: &mut Vec<u16>,
        shared: &FullShared,
    ) -> Result<()> {
        debug_assert!(d >= 1);
        let g = self.gens[d];
        let gq = self.coset_of[g as usize];
        let last = d == k - 1;
        for c in 0..self.cosets.len() as u16 {
            let qsnap = qmachine.snapshot();
            if !qmachine.assign(gq, c) {
                qmachine.rollback(qsnap);
                continue;
            }
            tuple[d] = c;
            if last && shared.tuple_done(&tuple[..k]) {
                qmachine.rollback(qsnap);
                continue;
            }
            'members: for &v in self.block_candidates(d, c) {
                let nodes = shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
                if nodes > shared.budget {
                    return Err(Error::BudgetExceeded {
                        what: "automorphism search",
                        visited: nodes,
                    });
                }
                if nodes.is_multiple_of(1024) {
                    self.check_deadline("automorphism search (wall clock)", nodes)?;
                }
                let snap = machine.snapshot();
                let ok = machine.assign(g, v);
                if ok {
                    if last {
                        assert!(machine.is_total(), "generators must generate the loop");
                        let found = machine.to_perm();
                        machine.rollback(snap);
                        if shared.record(&tuple[..k], found) {
                            // one representative per tuple is enough
                            break 'members;
                        }
                        continue 'members;
                    }
                    self.full_dfs(machine, qmachine, d + 1, k, tuple, shared)?;
                }
                machine.rollback(snap);
            }
            qmachine.rollback(qsnap);
        }
        Ok(())
    }

    /// Packs a coset tuple into a hash key.
    fn pack(tuple: &[u16]) -> u64 {
        let mut key = 0u64;
        for &c in tuple {
            debug_assert!(c < 1024);
            key = key << 10 | c as u64;
        }
        key
    }
}

struct FullShared {
    done: Mutex<FxHashSet<u64>>,
    reps: Mutex<Vec<Perm>>,
    nodes: AtomicU64,
    budget: u64,
}

impl FullShared {
    fn tuple_done(&self, tuple: &[u16]) -> bool {
        self.done.lock().unwrap().contains(&SearchContext::pack(tuple))
    }

    /// Returns true if the tuple was newly recorded.
    fn record(&self, tuple: &[u16], perm: Perm) -> bool {
        let mut done = self.done.lock().unwrap();
        if done.insert(SearchContext::pack(tuple)) {
            self.reps.lock().unwrap().push(perm);
            true
        } else {
            false
        }
    }
}

/// Candidate-image collapsing for the full search.
///
/// For every homomorphism `h` from the abelianized quotient `W` into the
/// center, `x -> x + h(x-bar)` is a central automorphism. When `W` is
/// elementary abelian of prime exponent `p` and the class of generator
/// `g_d` lies outside the span of the earlier generators' classes, such
/// an `h` can prescribe any value of `T = {t in Z : pt = 0}` on `g_d`
/// while vanishing on the earlier generators. Composing a found
/// automorphism with these maps translates the image of `g_d` across a
/// full `T`-coset (`T` is characteristic, so the translate set is the
/// same for every automorphism). Keeping one candidate per `T`-coset
/// inside each center coset therefore loses no coset tuples.
///
/// For commutative Moufang loops of 3-power order `W` always has
/// exponent 3 and the collapse divides the inner search by up to
/// `|T|^rank`. When `W` is not of prime exponent no collapse is applied.
fn collapse_setup(
    l: &LoopTable,
    center: &Subloop,
    cosets: &[Vec<u16>],
    gens: &[u16],
    w_table: &LoopTable,
    w_of: &[u16],
) -> Vec<Vec<Vec<u16>>> {
    let w_exponent = w_table.exponent();
    let elementary = w_exponent > 1 && is_prime(w_exponent);
    let translations: Vec<u16> = if elementary {
        center
            .members()
            .iter()
            .copied()
            .filter(|&z| l.scalar_mul(w_exponent, z) == 0)
            .collect()
    } else {
        vec![0]
    };
    let mut out = Vec::with_capacity(gens.len());
    let mut span_w: Vec<u16> = Vec::new();
    for &g in gens {
        let free =
            elementary && !w_table.subloop_generated(&span_w).contains(w_of[g as usize]);
        let per_coset: Vec<Vec<u16>> = cosets
            .iter()
            .map(|members| {
                if !free || translations.len() <= 1 {
                    return members.clone();
                }
                let mut reps: Vec<u16> = members
                    .iter()
                    .map(|&v| translations.iter().map(|&z| l.add(v, z)).min().unwrap())
                    .collect();
                reps.sort_unstable();
                reps.dedup();
                reps
            })
            .collect();
        out.push(per_coset);
        span_w.push(w_of[g as usize]);
    }
    out
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn greedy_generators(l: &LoopTable, w_table: &LoopTable, w_of: &[u16]) -> Vec<u16> {
    let n = l.order();
    let orders: Vec<u64> = (0..n as u16).map(|x| l.element_order(x)).collect();
    let mut chosen: Vec<u16> = Vec::new();
    let mut closure = l.subloop_generated(&[]);
    while closure.order() < n {
        let mut span_w: Vec<u16> = chosen.iter().map(|&g| w_of[g as usize]).collect();
        span_w.sort_unstable();
        let w_span = w_table.subloop_generated(&span_w);
        let mut best: Option<(u64, bool, std::cmp::Reverse<u16>)> = None;
        let mut best_x = 0u16;
        for x in 0..n as u16 {
            if closure.contains(x) {
                continue;
            }
            let key = (
                orders[x as usize],
                !w_span.contains(w_of[x as usize]),
                std::cmp::Reverse(x),
            );
            if best.is_none_or(|b| key > b) {
                best = Some(key);
                best_x = x;
            }
        }
        chosen.push(best_x);
        closure = l.subloop_generated(&chosen);
    }
    // drop generators that became redundant
    let mut i = 0;
    while i < chosen.len() {
        let mut rest = chosen.clone();
        rest.remove(i);
        if l.subloop_generated(&rest).order() == n {
            chosen = rest;
        } else {
            i += 1;
        }
    }
    chosen
}

/// Results of the central-automorphism computation for a loop.
pub struct CentralData {
    /// The central automorphism group `Aut_C(Q)`.
    pub autc: PermGroup,
    /// The inversion permutation.
    pub j: Perm,
    /// The coset `J Aut_C(Q)`, sorted.
    pub jautc: Vec<Perm>,
    /// Members of `jautc` whose complement `id - beta` is also a bijection.
    pub orthoautos: Vec<Perm>,
}

/// The full automorphism group of a loop.
///
/// Runs the constrained search for `H`, then the full coset-tuple search.
/// The returned group carries its exact order; on budget exhaustion the
/// partial group is returned flagged incomplete.
pub fn automorphism_group(l: &LoopTable, cfg: &AutSearchConfig) -> Result<PermGroup> {
    let ctx = SearchContext::new(l, cfg)?;
    automorphism_group_in(&ctx, cfg.node_budget)
}

pub fn automorphism_group_in(ctx: &SearchContext, node_budget: u64) -> Result<PermGroup> {
    let n = ctx.table.order();
    let h = ctx.constrained_search(node_budget)?;
    if ctx.restrict_to_center_cosets {
        let kernel = kernel_on_quotient(ctx, &h);
        return Ok(PermGroup::from_elements(n, kernel));
    }
    if ctx.cosets.len() == 1 {
        // abelian: every automorphism is central, H is everything
        return Ok(PermGroup::from_elements(n, h));
    }
    let (reps, tuples) = match ctx.full_search(node_budget) {
        Ok(x) => x,
        Err(Error::BudgetExceeded { .. }) => {
            let mut g = PermGroup::new(n, h);
            g.mark_incomplete();
            return Ok(g);
        }
        Err(e) => return Err(e),
    };
    let order = h.len() as u64 * tuples;

    // reduce the generating set via the action on Q/Z
    let autc = kernel_on_quotient(ctx, &h);
    let autc_gens =
        permgroup::reduce_generators(n, &autc, Some(autc.len() as u64)).expect("kernel generates");
    debug_assert_eq!(order % autc.len() as u64, 0);
    let quotient_order = order / autc.len() as u64;
    let mut lift_candidates: Vec<Perm> = h.iter().chain(reps.iter()).cloned().collect();
    lift_candidates.sort_unstable();
    lift_candidates.dedup();
    let induced: Vec<Perm> = lift_candidates
        .iter()
        .map(|p| induced_on_quotient(ctx, p))
        .collect();
    let mut picked: Vec<Perm> = Vec::new();
    {
        // greedy selection against the induced action
        let mut kept_q: Vec<Perm> = Vec::new();
        let mut closed: FxHashSet<Perm> = FxHashSet::default();
        closed.insert(Perm::identity(ctx.quotient.order()));
        for (cand, q) in lift_candidates.iter().zip(&induced) {
            if closed.len() as u64 == quotient_order {
                break;
            }
            if closed.contains(q) {
                continue;
            }
            kept_q.push(q.clone());
            picked.push(cand.clone());
            closed.clear();
            closed.extend(
                permgroup::closure(ctx.quotient.order(), &kept_q, u64::MAX).expect("unbounded"),
            );
        }
        assert_eq!(
            closed.len() as u64,
            quotient_order,
            "representatives must cover the quotient action"
        );
    }
    let mut generators = autc_gens;
    generators.extend(picked);
    let mut group = PermGroup::new(n, generators);
    group.set_known_order(order);
    Ok(group)
}

/// Elements of `h` acting trivially on `Q/Z(Q)`.
fn kernel_on_quotient(ctx: &SearchContext, h: &[Perm]) -> Vec<Perm> {
    h.iter()
        .filter(|p| {
            (0..ctx.table.order() as u16)
                .all(|x| ctx.coset_of[p.apply(x) as usize] == ctx.coset_of[x as usize])
        })
        .cloned()
        .collect()
}

fn induced_on_quotient(ctx: &SearchContext, p: &Perm) -> Perm {
    let m = ctx.quotient.order();
    let mut images = vec![UNDEF; m];
    for x in 0..ctx.table.order() as u16 {
        images[ctx.coset_of[x as usize] as usize] = ctx.coset_of[p.apply(x) as usize];
    }
    Perm::from_images_unchecked(images)
}

/// The group of central automorphisms: automorphisms `a` with
/// `x - a(x)` central for every `x`.
///
/// Computed by the constrained search followed by the kernel of the action
/// on `Q/Z(Q)`. For abelian loops this is the full automorphism group.
pub fn central_automorphism_group(l: &LoopTable) -> Result<PermGroup> {
    let cfg = AutSearchConfig::default();
    let ctx = SearchContext::new(l, &cfg)?;
    central_automorphism_group_in(&ctx, cfg.node_budget)
}

pub fn central_automorphism_group_in(ctx: &SearchContext, node_budget: u64) -> Result<PermGroup> {
    let h = ctx.constrained_search(node_budget)?;
    let kernel = kernel_on_quotient(ctx, &h);
    Ok(PermGroup::from_elements(ctx.table.order(), kernel))
}

/// The inversion permutation `J: x -> -x`.
pub fn inversion_perm(l: &LoopTable) -> Result<Perm> {
    let inv = l.inverses()?;
    Ok(Perm::from_images_unchecked(inv.to_vec()))
}

/// `a_hat = id + a`, the map `x -> x + a(x)`.
pub fn hat(l: &LoopTable, a: &Perm) -> ElementMap {
    ElementMap::from_fn(l.order(), |x| l.add(x, a.apply(x)))
}

/// `id - a`, the map `x -> x - a(x)`.
pub fn id_minus(l: &LoopTable, a: &Perm) -> ElementMap {
    ElementMap::from_fn(l.order(), |x| l.sub(x, a.apply(x)))
}

/// The coset `J Aut_C(Q)`, which consists of all J-central maps.
///
/// Every member is verified to be J-central via the hat criterion:
/// `x + a(x)` lands in the center for every `x`. Errors when the loop
/// lacks the automorphic inverse property.
pub fn j_central_coset(l: &LoopTable, autc: &mut PermGroup) -> Result<Vec<Perm>> {
    if !l.has_aip()? {
        let inv = l.inverses()?;
        // find a witness pair
        for x in 0..l.order() as u16 {
            for y in 0..l.order() as u16 {
                if inv[l.add(x, y) as usize] != l.add(inv[x as usize], inv[y as usize]) {
                    return Err(Error::AipViolation {
                        x: x as usize,
                        y: y as usize,
                    });
                }
            }
        }
        unreachable!("has_aip said false but no witness found");
    }
    let j = inversion_perm(l)?;
    let center_flags = l.center().member_flags();
    let elements = autc.enumerate_elements(u64::MAX)?;
    let mut coset: Vec<Perm> = elements.iter().map(|a| a.then(&j)).collect();
    for b in &coset {
        let bhat = hat(l, b);
        assert!(
            (0..l.order() as u16).all(|x| center_flags[bhat.apply(x) as usize]),
            "member of J Aut_C fails the hat criterion"
        );
    }
    coset.sort_unstable();
    Ok(coset)
}

/// Filters a `J Aut_C` coset down to the orthoautomorphisms: members `b`
/// for which `id - b` is a bijection.
pub fn orthoautomorphisms(l: &LoopTable, jautc: &[Perm]) -> Vec<Perm> {
    let n = l.order();
    jautc
        .iter()
        .filter(|b| {
            let mut seen = vec![false; n];
            (0..n as u16).all(|x| {
                let v = l.sub(x, b.apply(x)) as usize;
                !std::mem::replace(&mut seen[v], true)
            })
        })
        .cloned()
        .collect()
}

/// Computes `Aut_C`, `J`, the coset `J Aut_C` and its orthoautomorphisms.
pub fn central_data(ctx: &SearchContext, node_budget: u64) -> Result<CentralData> {
    let l = ctx.table();
    let mut autc = central_automorphism_group_in(ctx, node_budget)?;
    let j = inversion_perm(l)?;
    let jautc = j_central_coset(l, &mut autc)?;
    let orthoautos = orthoautomorphisms(l, &jautc);
    Ok(CentralData {
        autc,
        j,
        jautc,
        orthoautos,
    })
}

/// Isomorphism search between two quasigroup tables.
///
/// When `transitive_target` is set the caller asserts that `Aut(b)` is
/// transitive (true for distributive quasigroups, whose left translations
/// are automorphisms); the image of the first generator is then pinned to
/// a single candidate.
pub fn is_isomorphic_quasigroups(
    a: &LoopTable,
    b: &LoopTable,
    rounds: u32,
    node_budget: u64,
    transitive_target: bool,
) -> Result<bool> {
    if a.order() != b.order() {
        return Ok(false);
    }
    let n = a.order();
    let fa = fingerprints(a, rounds);
    let fb = fingerprints(b, rounds);
    {
        let mut sa = fa.clone();
        let mut sb = fb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return Ok(false);
        }
    }
    // generating set of `a`: greedy closure without loop structure
    let mut gens: Vec<u16> = Vec::new();
    let mut closure = a.subloop_generated(&[]);
    while closure.order() < n {
        let next = (0..n as u16).find(|&x| !closure.contains(x)).unwrap();
        gens.push(next);
        closure = a.subloop_generated(&gens);
    }
    let mut machine = Machine::new(a, b, &fa, &fb);
    if a.neutral().is_some() != b.neutral().is_some() {
        return Ok(false);
    }
    if a.neutral().is_some() {
        // isomorphisms map neutral to neutral, both sit at index 0
        if !machine.assign(0, 0) {
            return Ok(false);
        }
    }
    let mut nodes = 0u64;
    iso_dfs(b, &gens, &mut machine, 0, &mut nodes, node_budget, transitive_target)
}

#[allow(clippy::too_many_arguments)]
fn iso_dfs(
    b: &LoopTable,
    gens: &[u16],
    machine: &mut Machine,
    d: usize,
    nodes: &mut u64,
    budget: u64,
    pin_first: bool,
) -> Result<bool> {
    if d == gens.len() {
        assert!(machine.is_total());
        return Ok(true);
    }
    let g = gens[d];
    for v in 0..b.order() as u16 {
        if machine.fp_src[g as usize] != machine.fp_dst[v as usize] {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::BudgetExceeded {
                what: "isomorphism search",
                visited: *nodes,
            });
        }
        let snap = machine.snapshot();
        let hit = machine.assign(g, v)
            && iso_dfs(b, gens, machine, d + 1, nodes, budget, pin_first)?;
        machine.rollback(snap);
        if hit {
            return Ok(true);
        }
        if d == 0 && pin_first {
            // a transitive target group makes one image choice exhaustive
            return Ok(false);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::abelian_group;

    fn aut_order(l: &LoopTable) -> u64 {
        automorphism_group(l, &AutSearchConfig::default())
            .unwrap()
            .known_order()
            .unwrap()
    }

    #[test]
    fn automorphisms_of_small_cyclic_groups() {
        assert_eq!(aut_order(&abelian_group(&[3])), 2);
        assert_eq!(aut_order(&abelian_group(&[9])), 6);
        assert_eq!(aut_order(&abelian_group(&[3, 3])), 48);
    }

    #[test]
    fn central_equals_full_for_abelian() {
        let l = abelian_group(&[3, 3]);
        let autc = central_automorphism_group(&l).unwrap();
        assert_eq!(autc.known_order(), Some(48));
    }

    #[test]
    fn trivial_loop() {
        let l = abelian_group(&[1]);
        assert_eq!(aut_order(&l), 1);
    }

    #[test]
    fn hat_of_inversion_is_zero() {
        let l = abelian_group(&[9]);
        let j = inversion_perm(&l).unwrap();
        assert!(hat(&l, &j).is_zero());
    }

    #[test]
    fn doubling_is_an_orthoautomorphism_of_z3() {
        let l = abelian_group(&[3]);
        let mut autc = central_automorphism_group(&l).unwrap();
        let jautc = j_central_coset(&l, &mut autc).unwrap();
        // beta = 2*id has id - beta = 2*id, a bijection
        let beta = Perm::from_images(vec![0, 2, 1]).unwrap();
        assert!(jautc.contains(&beta));
        let orthos = orthoautomorphisms(&l, &jautc);
        assert!(orthos.contains(&beta));
    }

    #[test]
    fn iso_search_separates_z9_from_z3xz3() {
        let a = abelian_group(&[9]);
        let b = abelian_group(&[3, 3]);
        assert!(!is_isomorphic_quasigroups(&a, &b, 1, 1_000_000, false).unwrap());
        assert!(is_isomorphic_quasigroups(&a, &a, 1, 1_000_000, false).unwrap());
    }

    #[test]
    fn fingerprints_are_label_invariant_classes() {
        let l = abelian_group(&[3, 3]);
        let fp = fingerprints(&l, 2);
        // neutral is alone in its class; the other 8 elements are equivalent
        let zero_class = fp.iter().filter(|&&f| f == fp[0]).count();
        assert_eq!(zero_class, 1);
    }
}

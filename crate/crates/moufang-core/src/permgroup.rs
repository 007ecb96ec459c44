use crate::error::Error;
use crate::perm::Perm;
use crate::Result;
use rustc_hash::FxHashSet;

/// A permutation group given by generators, with optional exhaustive
/// element list and optional known order.
///
/// `complete` is false when the group came from a search that tripped its
/// budget, in which case the generators only span a subgroup of the
/// intended group and exact counts must not be derived from it.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    order: Option<u64>,
    elements: Option<Vec<Perm>>,
    complete: bool,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> PermGroup {
        let mut seen = FxHashSet::default();
        let mut gens = Vec::new();
        for g in generators {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
            if !g.is_identity() && seen.insert(g.clone()) {
                gens.push(g);
            }
        }
        PermGroup {
            degree,
            generators: gens,
            order: None,
            elements: None,
            complete: true,
        }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        let mut g = PermGroup::new(degree, Vec::new());
        g.order = Some(1);
        g.elements = Some(vec![Perm::identity(degree)]);
        g
    }

    /// Builds a group from its full, closed element list.
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>) -> PermGroup {
        elements.sort_unstable();
        elements.dedup();
        let order = elements.len() as u64;
        let generators = reduce_generators(degree, &elements, Some(order))
            .expect("element list generates itself");
        PermGroup {
            degree,
            generators,
            order: Some(order),
            elements: Some(elements),
            complete: true,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn known_order(&self) -> Option<u64> {
        self.order
    }

    pub fn set_known_order(&mut self, order: u64) {
        if let Some(existing) = self.order {
            assert_eq!(existing, order, "conflicting group orders");
        }
        self.order = Some(order);
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn mark_incomplete(&mut self) {
        self.complete = false;
    }

    pub fn cached_elements(&self) -> Option<&[Perm]> {
        self.elements.as_deref()
    }

    /// Closes the generators under composition, up to `budget` elements.
    ///
    /// The result is sorted and cached. Errors with
    /// [`Error::BudgetExceeded`] carrying the partial count.
    pub fn enumerate_elements(&mut self, budget: u64) -> Result<&[Perm]> {
        if self.elements.is_none() {
            let elements = closure(self.degree, &self.generators, budget)?;
            let order = elements.len() as u64;
            if let Some(known) = self.order {
                assert_eq!(known, order, "enumeration disagrees with known order");
            }
            self.order = Some(order);
            self.elements = Some(elements);
        }
        Ok(self.elements.as_deref().unwrap())
    }

    /// Membership test; requires the elements to be enumerated.
    pub fn contains(&self, p: &Perm) -> Option<bool> {
        self.elements
            .as_ref()
            .map(|els| els.binary_search(p).is_ok())
    }
}

/// Closure of `gens` under composition, sorted. `budget` caps the element
/// count.
pub fn closure(degree: usize, gens: &[Perm], budget: u64) -> Result<Vec<Perm>> {
    let mut seen: FxHashSet<Perm> = FxHashSet::default();
    let mut list: Vec<Perm> = Vec::new();
    let id = Perm::identity(degree);
    seen.insert(id.clone());
    list.push(id);
    let mut i = 0;
    while i < list.len() {
        let current = list[i].clone();
        for g in gens {
            let next = current.then(g);
            if seen.insert(next.clone()) {
                if list.len() as u64 >= budget {
                    return Err(Error::BudgetExceeded {
                        what: "group closure",
                        visited: list.len() as u64,
                    });
                }
                list.push(next);
            }
        }
        i += 1;
    }
    list.sort_unstable();
    Ok(list)
}

/// Greedy generating-subset selection.
///
/// Scans `candidates` in order, keeping each one that is not yet in the
/// closure of those kept so far; stops once the closure reaches
/// `target_order` if given. Returns `None` when a target was given but not
/// reached.
pub fn reduce_generators(
    degree: usize,
    candidates: &[Perm],
    target_order: Option<u64>,
) -> Option<Vec<Perm>> {
    let mut kept: Vec<Perm> = Vec::new();
    let mut current: FxHashSet<Perm> = FxHashSet::default();
    current.insert(Perm::identity(degree));
    for cand in candidates {
        if target_order == Some(current.len() as u64) {
            break;
        }
        if current.contains(cand) {
            continue;
        }
        kept.push(cand.clone());
        // re-close from scratch; the kept set stays small
        current.clear();
        let closed = closure(degree, &kept, u64::MAX).expect("unbounded");
        current.extend(closed);
    }
    match target_order {
        Some(t) if current.len() as u64 != t => None,
        _ => Some(kept),
    }
}

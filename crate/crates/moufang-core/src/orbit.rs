//! Orbit closure with Schreier stabilizer generators.
//!
//! Orbits are computed by BFS over interned point ids. Each orbit is
//! discovered from its minimal point, which doubles as the canonical
//! representative, so partitions are deterministic regardless of generator
//! order or thread count.

use crate::error::Error;
use crate::perm::Perm;
use crate::Result;
use rustc_hash::{FxHashMap, FxHashSet};

/// A generator together with its precomputed inverse.
#[derive(Clone, Debug)]
pub struct GenPair {
    pub perm: Perm,
    pub inv: Perm,
}

impl GenPair {
    pub fn new(perm: Perm) -> GenPair {
        let inv = perm.inverse();
        GenPair { perm, inv }
    }
}

/// A right group action on interned points.
pub trait GroupAction {
    /// Number of points in the universe (point ids are `0..num_points`).
    fn num_points(&self) -> usize;

    /// Image of `point` under `g`, or `None` if it leaves the universe.
    fn apply(&self, g: &GenPair, point: u32) -> Option<u32>;
}

/// The natural action of permutations on `0..degree`.
pub struct NaturalAction {
    pub degree: usize,
}

impl GroupAction for NaturalAction {
    fn num_points(&self) -> usize {
        self.degree
    }

    fn apply(&self, g: &GenPair, point: u32) -> Option<u32> {
        Some(g.perm.apply(point as u16) as u32)
    }
}

/// Conjugation action on an interned set of permutations.
///
/// The universe is sorted at construction, so point ids increase with
/// lexicographic order of the image arrays and the minimal point of an
/// orbit is its lexicographically minimal member.
pub struct ConjugationAction {
    perms: Vec<Perm>,
    index: FxHashMap<Perm, u32>,
}

impl ConjugationAction {
    pub fn new(mut universe: Vec<Perm>) -> ConjugationAction {
        universe.sort_unstable();
        universe.dedup();
        let index = universe
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        ConjugationAction {
            perms: universe,
            index,
        }
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn point(&self, id: u32) -> &Perm {
        &self.perms[id as usize]
    }

    pub fn id_of(&self, p: &Perm) -> Option<u32> {
        self.index.get(p).copied()
    }
}

impl GroupAction for ConjugationAction {
    fn num_points(&self) -> usize {
        self.perms.len()
    }

    fn apply(&self, g: &GenPair, point: u32) -> Option<u32> {
        let image = self.perms[point as usize].conjugated_by_with_inv(&g.perm, &g.inv);
        self.index.get(&image).copied()
    }
}

/// One orbit with its Schreier data.
#[derive(Clone, Debug)]
pub struct OrbitData {
    /// Seed and canonical representative (minimal point id in the orbit).
    pub representative: u32,
    /// Orbit members in discovery order; `points[0] == representative`.
    pub points: Vec<u32>,
    /// For each member `p`, a group element mapping the representative to `p`.
    pub transversal: FxHashMap<u32, Perm>,
    /// Deduplicated Schreier generators of the representative's stabilizer.
    pub stabilizer_generators: Vec<Perm>,
}

impl OrbitData {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: u32) -> bool {
        self.transversal.contains_key(&point)
    }
}

/// BFS orbit of `seed` under `gens`, with transversal and Schreier
/// generators of the stabilizer of `seed`.
pub fn orbit_with_stabilizer(
    degree: usize,
    gens: &[GenPair],
    action: &impl GroupAction,
    seed: u32,
    point_budget: u64,
) -> Result<OrbitData> {
    let mut transversal: FxHashMap<u32, Perm> = FxHashMap::default();
    let mut points = vec![seed];
    transversal.insert(seed, Perm::identity(degree));
    let mut schreier_set: FxHashSet<Perm> = FxHashSet::default();
    let mut stabilizer_generators = Vec::new();
    let mut i = 0;
    while i < points.len() {
        let x = points[i];
        let tx = transversal[&x].clone();
        for (gi, g) in gens.iter().enumerate() {
            let y = action
                .apply(g, x)
                .ok_or(Error::ActionEscapesUniverse { generator: gi })?;
            match transversal.get(&y) {
                None => {
                    if points.len() as u64 >= point_budget {
                        return Err(Error::BudgetExceeded {
                            what: "orbit closure",
                            visited: points.len() as u64,
                        });
                    }
                    transversal.insert(y, tx.then(&g.perm));
                    points.push(y);
                }
                Some(ty) => {
                    // Schreier generator t(x) * g * t(y)^-1 fixes the seed
                    let s = tx.then(&g.perm).then(&ty.inverse());
                    if !s.is_identity() && schreier_set.insert(s.clone()) {
                        stabilizer_generators.push(s);
                    }
                }
            }
        }
        i += 1;
    }
    Ok(OrbitData {
        representative: seed,
        points,
        transversal,
        stabilizer_generators,
    })
}

/// Partition of the whole universe into orbits.
///
/// Orbits are seeded from the smallest unvisited point upward, so each
/// orbit's representative is its minimal point id.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub orbits: Vec<OrbitData>,
    /// Point id -> index into `orbits`.
    pub orbit_of: Vec<u32>,
}

impl OrbitPartition {
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn representatives(&self) -> impl Iterator<Item = u32> + '_ {
        self.orbits.iter().map(|o| o.representative)
    }
}

pub fn orbit_partition(
    degree: usize,
    gens: &[GenPair],
    action: &impl GroupAction,
    point_budget: u64,
) -> Result<OrbitPartition> {
    let n = action.num_points();
    let mut orbit_of = vec![u32::MAX; n];
    let mut orbits = Vec::new();
    for seed in 0..n as u32 {
        if orbit_of[seed as usize] != u32::MAX {
            continue;
        }
        let data = orbit_with_stabilizer(degree, gens, action, seed, point_budget)?;
        let k = orbits.len() as u32;
        for &p in &data.points {
            debug_assert_eq!(orbit_of[p as usize], u32::MAX);
            orbit_of[p as usize] = k;
        }
        orbits.push(data);
    }
    Ok(OrbitPartition { orbits, orbit_of })
}

pub fn gen_pairs(gens: &[Perm]) -> Vec<GenPair> {
    gens.iter().map(|g| GenPair::new(g.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group_orbit_is_seed() {
        let action = NaturalAction { degree: 5 };
        let data = orbit_with_stabilizer(5, &[], &action, 3, 100).unwrap();
        assert_eq!(data.points, vec![3]);
        assert!(data.stabilizer_generators.is_empty());
    }

    #[test]
    fn s3_orbit_and_stabilizer() {
        // S3 on 3 points from a transposition and a 3-cycle
        let gens = gen_pairs(&[
            Perm::from_images(vec![1, 0, 2]).unwrap(),
            Perm::from_images(vec![1, 2, 0]).unwrap(),
        ]);
        let action = NaturalAction { degree: 3 };
        let data = orbit_with_stabilizer(3, &gens, &action, 0, 100).unwrap();
        assert_eq!(data.len(), 3);
        // all Schreier generators fix the seed
        for s in &data.stabilizer_generators {
            assert_eq!(s.apply(0), 0);
        }
        // stabilizer of a point in S3 has order 2
        let stab = crate::permgroup::closure(3, &data.stabilizer_generators, 100).unwrap();
        assert_eq!(stab.len(), 2);
    }

    #[test]
    fn transversal_words_map_representative_to_point() {
        let gens = gen_pairs(&[Perm::from_images(vec![1, 2, 3, 0]).unwrap()]);
        let action = NaturalAction { degree: 4 };
        let data = orbit_with_stabilizer(4, &gens, &action, 0, 100).unwrap();
        for &p in &data.points {
            assert_eq!(data.transversal[&p].apply(0), p as u16);
        }
    }

    #[test]
    fn partition_covers_universe_once() {
        let gens = gen_pairs(&[Perm::from_images(vec![1, 0, 2, 4, 3]).unwrap()]);
        let action = NaturalAction { degree: 5 };
        let part = orbit_partition(5, &gens, &action, 100).unwrap();
        assert_eq!(part.num_orbits(), 3);
        let total: usize = part.orbits.iter().map(|o| o.len()).sum();
        assert_eq!(total, 5);
    }
}

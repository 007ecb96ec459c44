//! Materializing affine quasigroups from arithmetic data and verifying
//! quasigroup identities, plus Steiner / Mendelsohn triple systems.

use crate::error::Error;
use crate::loop_table::{ElementMap, LoopTable};
use crate::par;
use crate::perm::Perm;
use crate::search::{hat, id_minus};
use crate::Result;
use rand::{Rng, SeedableRng};
use rustc_hash::FxHashMap;

/// The quasigroup `x * y = (phi(x) + psi(y)) + c` over a loop.
pub fn build_affine(l: &LoopTable, phi: &Perm, psi: &Perm, c: u16) -> LoopTable {
    let n = l.order();
    let mut cells = vec![0u16; n * n];
    for x in 0..n as u16 {
        for y in 0..n as u16 {
            cells[x as usize * n + y as usize] = l.add(l.add(phi.apply(x), psi.apply(y)), c);
        }
    }
    if cfg!(debug_assertions) && (c as usize) < n {
        // with c central the bracketing is immaterial
        let central = l.center().contains(c);
        if central {
            for x in 0..n as u16 {
                for y in 0..n as u16 {
                    debug_assert_eq!(
                        cells[x as usize * n + y as usize],
                        l.add(phi.apply(x), l.add(psi.apply(y), c)),
                    );
                }
            }
        }
    }
    LoopTable::from_flat(n, cells).expect("affine tables over loops are latin")
}

/// The distributive quasigroup `x * y = (2x - y) + psi_hat(y - x)` attached
/// to a J-central orthoautomorphism `psi` of a commutative Moufang loop.
///
/// Errors when `psi` is not a J-central orthoautomorphism. Equals
/// `build_affine(l, id - psi, psi, 0)` entrywise.
pub fn build_distributive_from_psi(l: &LoopTable, psi: &Perm) -> Result<LoopTable> {
    let n = l.order();
    l.inverses()?;
    let psi_map = ElementMap::new(n, psi.images().to_vec());
    if !psi_map.is_endomorphism(l) {
        return Err(Error::NotOrthoautomorphism);
    }
    let psihat = hat(l, psi);
    let center = l.center();
    if !(0..n as u16).all(|x| center.contains(psihat.apply(x))) {
        return Err(Error::NotOrthoautomorphism);
    }
    {
        let complement = id_minus(l, psi);
        let mut seen = vec![false; n];
        for x in 0..n as u16 {
            let v = complement.apply(x) as usize;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotOrthoautomorphism);
            }
        }
    }
    let mut cells = vec![0u16; n * n];
    for x in 0..n as u16 {
        let twox = l.add(x, x);
        for y in 0..n as u16 {
            let lhs = l.sub(twox, y);
            let rhs = psihat.apply(l.sub(y, x));
            cells[x as usize * n + y as usize] = l.add(lhs, rhs);
        }
    }
    Ok(LoopTable::from_flat(n, cells).expect("distributive tables are latin"))
}

pub fn check_idempotent(q: &LoopTable) -> bool {
    (0..q.order() as u16).all(|x| q.add(x, x) == x)
}

/// Exhaustive mediality check `(x+y)+(u+v) = (x+u)+(y+v)`, with early exit.
pub fn check_medial(q: &LoopTable) -> bool {
    medial_violation(q).is_none()
}

/// First witness `(x, y, u, v)` violating mediality, if any.
pub fn medial_violation(q: &LoopTable) -> Option<(u16, u16, u16, u16)> {
    let n = q.order();
    let bad_x = par::find_index(n, |xi| {
        let x = xi as u16;
        (0..n as u16).any(|y| {
            (0..n as u16).any(|u| {
                (0..n as u16)
                    .any(|v| q.add(q.add(x, y), q.add(u, v)) != q.add(q.add(x, u), q.add(y, v)))
            })
        })
    })?;
    let x = bad_x as u16;
    for y in 0..n as u16 {
        for u in 0..n as u16 {
            for v in 0..n as u16 {
                if q.add(q.add(x, y), q.add(u, v)) != q.add(q.add(x, u), q.add(y, v)) {
                    return Some((x, y, u, v));
                }
            }
        }
    }
    unreachable!("outer index was a witness")
}

/// Exhaustive check of both distributive laws.
pub fn check_distributive(q: &LoopTable) -> bool {
    let n = q.order();
    !par::any_index(n, |xi| {
        let x = xi as u16;
        (0..n as u16).any(|y| {
            (0..n as u16).any(|z| {
                q.add(x, q.add(y, z)) != q.add(q.add(x, y), q.add(x, z))
                    || q.add(q.add(x, y), z) != q.add(q.add(x, z), q.add(y, z))
            })
        })
    })
}

/// Sequential twin of [`check_distributive`].
pub fn check_distributive_seq(q: &LoopTable) -> bool {
    let n = q.order() as u16;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if q.add(x, q.add(y, z)) != q.add(q.add(x, y), q.add(x, z))
                    || q.add(q.add(x, y), z) != q.add(q.add(x, z), q.add(y, z))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Trimediality checking mode.
#[derive(Clone, Copy, Debug)]
pub enum TrimedialMode {
    /// Close every triple; intended for orders up to about 27.
    Exhaustive,
    /// Close `count` seeded random triples. A `true` verdict is evidence,
    /// not proof; `false` is always a proof.
    Sampled { count: usize, seed: u64 },
}

/// Does every (sampled) triple generate a medial subquasigroup?
pub fn check_trimedial(q: &LoopTable, mode: TrimedialMode) -> bool {
    let n = q.order() as u16;
    let mut cache: FxHashMap<Vec<u64>, bool> = FxHashMap::default();
    let mut check_triple = |x: u16, y: u16, z: u16| -> bool {
        let sub = q.subloop_generated(&[x, y, z]);
        let key = bitmap_key(sub.members(), q.order());
        if let Some(&v) = cache.get(&key) {
            return v;
        }
        let verdict = medial_within(q, sub.members());
        cache.insert(key, verdict);
        verdict
    };
    match mode {
        TrimedialMode::Exhaustive => {
            for x in 0..n {
                for y in x..n {
                    for z in y..n {
                        if !check_triple(x, y, z) {
                            return false;
                        }
                    }
                }
            }
            true
        }
        TrimedialMode::Sampled { count, seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                let z = rng.gen_range(0..n);
                if !check_triple(x, y, z) {
                    return false;
                }
            }
            true
        }
    }
}

fn bitmap_key(members: &[u16], n: usize) -> Vec<u64> {
    let mut words = vec![0u64; n.div_ceil(64)];
    for &m in members {
        words[m as usize / 64] |= 1u64 << (m % 64);
    }
    words
}

/// Mediality restricted to a closed subset, via a reindexed local table.
fn medial_within(q: &LoopTable, members: &[u16]) -> bool {
    let m = members.len();
    let mut local_of = vec![u16::MAX; q.order()];
    for (i, &g) in members.iter().enumerate() {
        local_of[g as usize] = i as u16;
    }
    let mut t = vec![0u16; m * m];
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            t[i * m + j] = local_of[q.add(a, b) as usize];
        }
    }
    let at = |a: u16, b: u16| t[a as usize * m + b as usize];
    for x in 0..m as u16 {
        for y in 0..m as u16 {
            let xy = at(x, y);
            for u in 0..m as u16 {
                let xu = at(x, u);
                for v in 0..m as u16 {
                    if at(xy, at(u, v)) != at(xu, at(y, v)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Which triple-system axioms a block set is held to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleKind {
    Steiner,
    Mendelsohn,
}

/// A Steiner or Mendelsohn triple system on points `0..n`.
///
/// Steiner blocks are unordered (stored sorted ascending); Mendelsohn
/// blocks are cyclic orders (stored rotated so the least point is first).
/// The block list is sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSystem {
    kind: TripleKind,
    points: usize,
    blocks: Vec<[u16; 3]>,
}

impl TripleSystem {
    /// Canonicalizes, sorts and verifies the axioms of a block list.
    pub fn new(kind: TripleKind, points: usize, blocks: Vec<[u16; 3]>) -> Result<TripleSystem> {
        let mut canon: Vec<[u16; 3]> = blocks
            .into_iter()
            .map(|b| match kind {
                TripleKind::Steiner => {
                    let mut s = b;
                    s.sort_unstable();
                    s
                }
                TripleKind::Mendelsohn => rotate_min_first(b),
            })
            .collect();
        canon.sort_unstable();
        canon.dedup();
        let ts = TripleSystem {
            kind,
            points,
            blocks: canon,
        };
        ts.verify()?;
        Ok(ts)
    }

    pub fn kind(&self) -> TripleKind {
        self.kind
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn blocks(&self) -> &[[u16; 3]] {
        &self.blocks
    }

    /// Exhaustive axiom audit: every (ordered or unordered) pair of
    /// distinct points is covered exactly once, and the block count
    /// matches `n(n-1)/6` resp. `n(n-1)/3`.
    pub fn verify(&self) -> Result<()> {
        let n = self.points;
        let mut cover = vec![0u8; n * n];
        for b in &self.blocks {
            if b[0] == b[1] || b[1] == b[2] || b[0] == b[2] {
                return Err(Error::AxiomViolation {
                    x: b[0] as usize,
                    y: b[1] as usize,
                    reason: "block with repeated point".into(),
                });
            }
            let pairs: [[u16; 2]; 3] = match self.kind {
                TripleKind::Steiner => [[b[0], b[1]], [b[0], b[2]], [b[1], b[2]]],
                TripleKind::Mendelsohn => [[b[0], b[1]], [b[1], b[2]], [b[2], b[0]]],
            };
            for [p, q] in pairs {
                cover[p as usize * n + q as usize] += 1;
                if self.kind == TripleKind::Steiner {
                    cover[q as usize * n + p as usize] += 1;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                if cover[x * n + y] != 1 {
                    return Err(Error::AxiomViolation {
                        x,
                        y,
                        reason: format!("pair covered {} times", cover[x * n + y]),
                    });
                }
            }
        }
        let expected = match self.kind {
            TripleKind::Steiner => n * (n - 1) / 6,
            TripleKind::Mendelsohn => n * (n - 1) / 3,
        };
        if self.blocks.len() != expected {
            return Err(Error::AxiomViolation {
                x: 0,
                y: 0,
                reason: format!("{} blocks, expected {expected}", self.blocks.len()),
            });
        }
        Ok(())
    }
}

fn rotate_min_first(b: [u16; 3]) -> [u16; 3] {
    let k = (0..3).min_by_key(|&i| b[i]).unwrap();
    [b[k], b[(k + 1) % 3], b[(k + 2) % 3]]
}

/// Blocks `(x, y, (2x - y) + psi_hat(y - x))` over all pairs of distinct
/// points of a commutative Moufang loop, audited exhaustively.
pub fn emit_triple_system(
    l: &LoopTable,
    psi_hat: &ElementMap,
    kind: TripleKind,
) -> Result<TripleSystem> {
    l.inverses()?;
    let n = l.order() as u16;
    let mut blocks = Vec::with_capacity(l.order() * (l.order() - 1));
    for x in 0..n {
        let twox = l.add(x, x);
        for y in 0..n {
            if x == y {
                continue;
            }
            let z = l.add(l.sub(twox, y), psi_hat.apply(l.sub(y, x)));
            blocks.push([x, y, z]);
        }
    }
    TripleSystem::new(kind, l.order(), blocks)
}

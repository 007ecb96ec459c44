use crate::error::{Axis, Error};
use crate::par;
use crate::perm::Perm;
use crate::Result;
use rand::{Rng, SeedableRng};

/// A finite magma on `0..n-1` given by its Cayley table.
///
/// Every row and column is a permutation (latin square), so the table always
/// describes a quasigroup. `neutral` is present iff a two-sided neutral
/// element exists, in which case it has been renumbered to index 0.
/// Immutable after construction; all operations are pure.
#[derive(Clone, PartialEq, Eq)]
pub struct LoopTable {
    n: usize,
    cells: Box<[u16]>,
    neutral: Option<u16>,
    /// Two-sided inverses, present iff every element has one.
    inverses: Option<Box<[u16]>>,
    /// ldiv[x*n+y] = unique w with x + w = y.
    ldiv: Box<[u16]>,
    /// rdiv[x*n+y] = unique w with w + y = x.
    rdiv: Box<[u16]>,
}

impl std::fmt::Debug for LoopTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LoopTable(n={}, neutral={:?})", self.n, self.neutral)
    }
}

/// Checks the latin property and builds a [`LoopTable`].
///
/// If a two-sided neutral element exists at an index other than 0, the table
/// is relabeled so the neutral element becomes 0.
pub fn validate_quasigroup(rows: &[Vec<u16>]) -> Result<LoopTable> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::MalformedTable("empty table".into()));
    }
    if n > u16::MAX as usize {
        return Err(Error::MalformedTable(format!("order {n} exceeds u16 range")));
    }
    let mut cells = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::MalformedTable(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for &v in row {
            if (v as usize) >= n {
                return Err(Error::MalformedTable(format!(
                    "entry {v} out of range in row {i}"
                )));
            }
        }
        cells.extend_from_slice(row);
    }
    LoopTable::from_flat(n, cells)
}

impl LoopTable {
    /// Builds a table from row-major cells, checking the latin property.
    pub fn from_flat(n: usize, cells: Vec<u16>) -> Result<LoopTable> {
        assert_eq!(cells.len(), n * n, "cell count must be n*n");
        let mut seen = vec![false; n];
        for r in 0..n {
            seen.fill(false);
            for c in 0..n {
                let v = cells[r * n + c] as usize;
                if seen[v] {
                    return Err(Error::NotLatin {
                        axis: Axis::Row,
                        index: r,
                        value: v,
                    });
                }
                seen[v] = true;
            }
        }
        for c in 0..n {
            seen.fill(false);
            for r in 0..n {
                let v = cells[r * n + c] as usize;
                if seen[v] {
                    return Err(Error::NotLatin {
                        axis: Axis::Column,
                        index: c,
                        value: v,
                    });
                }
                seen[v] = true;
            }
        }

        let mut t = LoopTable::assemble(n, cells.into_boxed_slice());
        if let Some(e) = t.find_neutral() {
            if e != 0 {
                // renumber so the neutral element sits at index 0
                let mut images: Vec<u16> = (0..n as u16).collect();
                images.swap(0, e as usize);
                t = t.relabel(&Perm::from_images_unchecked(images));
            }
            t.neutral = Some(0);
        }
        Ok(t)
    }

    fn assemble(n: usize, cells: Box<[u16]>) -> LoopTable {
        let mut ldiv = vec![0u16; n * n].into_boxed_slice();
        let mut rdiv = vec![0u16; n * n].into_boxed_slice();
        for x in 0..n {
            for y in 0..n {
                let v = cells[x * n + y] as usize;
                ldiv[x * n + v] = y as u16;
                rdiv[v * n + y] = x as u16;
            }
        }
        let mut t = LoopTable {
            n,
            cells,
            neutral: None,
            inverses: None,
            ldiv,
            rdiv,
        };
        t.neutral = t.find_neutral();
        t.inverses = t.find_inverses();
        t
    }

    fn find_neutral(&self) -> Option<u16> {
        (0..self.n as u16).find(|&e| {
            (0..self.n as u16).all(|x| self.add(e, x) == x && self.add(x, e) == x)
        })
    }

    fn find_inverses(&self) -> Option<Box<[u16]>> {
        let e = self.neutral?;
        let mut inv = vec![0u16; self.n];
        for x in 0..self.n as u16 {
            // y with x + y = e and y + x = e
            let y = self.ldiv(x, e);
            if self.add(y, x) != e {
                return None;
            }
            inv[x as usize] = y;
        }
        Some(inv.into_boxed_slice())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn neutral(&self) -> Option<u16> {
        self.neutral
    }

    pub fn is_loop(&self) -> bool {
        self.neutral.is_some()
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    #[inline]
    pub fn add(&self, x: u16, y: u16) -> u16 {
        self.cells[x as usize * self.n + y as usize]
    }

    /// Unique `w` with `x + w = y`.
    #[inline]
    pub fn ldiv(&self, x: u16, y: u16) -> u16 {
        self.ldiv[x as usize * self.n + y as usize]
    }

    /// Unique `w` with `w + y = x`.
    #[inline]
    pub fn rdiv(&self, x: u16, y: u16) -> u16 {
        self.rdiv[x as usize * self.n + y as usize]
    }

    pub fn has_two_sided_inverses(&self) -> bool {
        self.inverses.is_some()
    }

    /// Slice of two-sided inverses, or an error naming an element without one.
    pub fn inverses(&self) -> Result<&[u16]> {
        match &self.inverses {
            Some(inv) => Ok(inv),
            None => {
                let e = self.neutral.ok_or(Error::NoTwoSidedInverses { element: 0 })?;
                let witness = (0..self.n as u16)
                    .find(|&x| self.add(self.ldiv(x, e), x) != e)
                    .unwrap_or(0);
                Err(Error::NoTwoSidedInverses {
                    element: witness as usize,
                })
            }
        }
    }

    /// Two-sided inverse of `x`.
    ///
    /// Panics if the loop lacks two-sided inverses; gate on
    /// [`LoopTable::inverses`] first when the input is untrusted.
    #[inline]
    pub fn neg(&self, x: u16) -> u16 {
        self.inverses.as_ref().expect("loop has two-sided inverses")[x as usize]
    }

    /// `x - y`, that is `x + (-y)`.
    #[inline]
    pub fn sub(&self, x: u16, y: u16) -> u16 {
        self.add(x, self.neg(y))
    }

    /// `m`-fold sum `x + x + ... + x`, bracketed from the left; `0x = 0`.
    pub fn scalar_mul(&self, m: u64, x: u16) -> u16 {
        let e = self.neutral.expect("scalar_mul needs a loop");
        let mut acc = e;
        for _ in 0..m {
            acc = self.add(acc, x);
        }
        acc
    }

    /// Least `m >= 1` with `mx = 0` (the cycle of 0 under right translation by `x`).
    pub fn element_order(&self, x: u16) -> u64 {
        let e = self.neutral.expect("element_order needs a loop");
        let mut acc = self.add(e, x);
        let mut m = 1u64;
        while acc != e {
            acc = self.add(acc, x);
            m += 1;
        }
        m
    }

    /// Least `m` with `mx = 0` for all `x`.
    pub fn exponent(&self) -> u64 {
        (0..self.n as u16)
            .map(|x| self.element_order(x))
            .fold(1, lcm)
    }

    /// Left translation `y -> x + y` as a permutation.
    pub fn left_translation(&self, x: u16) -> Perm {
        Perm::from_images_unchecked(self.cells[x as usize * self.n..(x as usize + 1) * self.n].to_vec())
    }

    /// Relabels elements by `p`: the new table satisfies
    /// `new(p(x), p(y)) = p(old(x, y))`.
    pub fn relabel(&self, p: &Perm) -> LoopTable {
        assert_eq!(p.degree(), self.n);
        let n = self.n;
        let mut cells = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                cells[p.apply(x as u16) as usize * n + p.apply(y as u16) as usize] =
                    p.apply(self.cells[x * n + y]);
            }
        }
        LoopTable::assemble(n, cells.into_boxed_slice())
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.n;
        !par::any_index(n, |x| {
            (0..n).any(|y| self.cells[x * n + y] != self.cells[y * n + x])
        })
    }

    pub fn is_associative(&self) -> bool {
        self.moufang_like_violation(|x, y, z| {
            self.add(self.add(x, y), z) != self.add(x, self.add(y, z))
        })
        .is_none()
    }

    /// Exhaustive check of the Moufang identity `x+(y+(x+z)) = ((x+y)+x)+z`.
    pub fn is_moufang(&self) -> bool {
        self.moufang_violation().is_none()
    }

    /// First witness `(x, y, z)` violating the Moufang identity, if any.
    pub fn moufang_violation(&self) -> Option<(u16, u16, u16)> {
        self.moufang_like_violation(|x, y, z| {
            self.add(x, self.add(y, self.add(x, z)))
                != self.add(self.add(self.add(x, y), x), z)
        })
    }

    /// Sequential twin of [`LoopTable::moufang_violation`].
    pub fn moufang_violation_seq(&self) -> Option<(u16, u16, u16)> {
        let n = self.n as u16;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.add(x, self.add(y, self.add(x, z)))
                        != self.add(self.add(self.add(x, y), x), z)
                    {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    fn moufang_like_violation(
        &self,
        bad: impl Fn(u16, u16, u16) -> bool + Sync,
    ) -> Option<(u16, u16, u16)> {
        let n = self.n;
        let hit = par::find_index(n, |x| {
            (0..n as u16).any(|y| (0..n as u16).any(|z| bad(x as u16, y, z)))
        })?;
        let x = hit as u16;
        for y in 0..n as u16 {
            for z in 0..n as u16 {
                if bad(x, y, z) {
                    return Some((x, y, z));
                }
            }
        }
        unreachable!("outer index was a witness")
    }

    /// Automorphic inverse property: `-(x+y) = -x - y` for all `x`, `y`.
    pub fn has_aip(&self) -> Result<bool> {
        let inv = self.inverses()?;
        let n = self.n;
        Ok(!par::any_index(n, |x| {
            (0..n).any(|y| {
                inv[self.cells[x * n + y] as usize]
                    != self.add(inv[x], inv[y])
            })
        }))
    }

    /// Diassociativity check by closing sampled pairs.
    ///
    /// Exhaustive over all pairs when `n <= 100`; otherwise tests `samples`
    /// seeded random pairs. A `false` answer is always a proof; `true` from
    /// the sampled mode is only evidence.
    pub fn is_diassociative_sample(&self, samples: usize, seed: u64) -> bool {
        let n = self.n as u16;
        let pair_associative = |x: u16, y: u16| -> bool {
            let sub = self.subloop_generated(&[x, y]);
            let members = sub.members();
            members.iter().all(|&a| {
                members.iter().all(|&b| {
                    members
                        .iter()
                        .all(|&c| self.add(self.add(a, b), c) == self.add(a, self.add(b, c)))
                })
            })
        };
        if self.n <= 100 {
            (0..n).all(|x| (x..n).all(|y| pair_associative(x, y)))
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..samples).all(|_| {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                pair_associative(x, y)
            })
        }
    }

    /// The set of elements that commute and associate (in all three
    /// placements) with all elements.
    pub fn center(&self) -> Subloop {
        let n = self.n;
        let flags = par::map_indices(n, |zi| {
            let z = zi as u16;
            (0..n as u16).all(|x| self.add(z, x) == self.add(x, z))
                && (0..n as u16).all(|x| {
                    (0..n as u16).all(|y| {
                        self.add(self.add(z, x), y) == self.add(z, self.add(x, y))
                            && self.add(self.add(x, z), y) == self.add(x, self.add(z, y))
                            && self.add(self.add(x, y), z) == self.add(x, self.add(y, z))
                    })
                })
        });
        let members: Vec<u16> = (0..n as u16).filter(|&z| flags[z as usize]).collect();
        Subloop::new_unchecked(self.n, members)
    }

    /// Smallest normal subloop containing all associators
    /// `ldiv(x+(y+z), (x+y)+z)`.
    pub fn associator_subloop(&self) -> Subloop {
        let n = self.n;
        let mut in_set = vec![false; n];
        if let Some(e) = self.neutral {
            in_set[e as usize] = true;
        }
        let chunks = par::map_indices(n, |x| {
            let x = x as u16;
            let mut local = vec![false; n];
            for y in 0..n as u16 {
                for z in 0..n as u16 {
                    let lhs = self.add(x, self.add(y, z));
                    let rhs = self.add(self.add(x, y), z);
                    local[self.ldiv(lhs, rhs) as usize] = true;
                }
            }
            local
        });
        for local in chunks {
            for (i, f) in local.into_iter().enumerate() {
                in_set[i] |= f;
            }
        }
        self.normal_closure(in_set)
    }

    /// Fixpoint closure of a member bitmap under the operation, inverses and
    /// the inner mappings L_{x,y}, R_{x,y}, T_x.
    fn normal_closure(&self, mut in_set: Vec<bool>) -> Subloop {
        let n = self.n;
        loop {
            let before = in_set.iter().filter(|&&b| b).count();
            // subloop closure
            loop {
                let members: Vec<u16> = (0..n as u16).filter(|&i| in_set[i as usize]).collect();
                let mut grew = false;
                for &a in &members {
                    for &b in &members {
                        let p = self.add(a, b);
                        if !in_set[p as usize] {
                            in_set[p as usize] = true;
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            // conjugates under inner mappings
            let members: Vec<u16> = (0..n as u16).filter(|&i| in_set[i as usize]).collect();
            for x in 0..n as u16 {
                for y in 0..n as u16 {
                    let xy = self.add(x, y);
                    let yx = self.add(y, x);
                    for &s in &members {
                        // L_{x,y}(s) and R_{x,y}(s)
                        in_set[self.ldiv(xy, self.add(x, self.add(y, s))) as usize] = true;
                        in_set[self.rdiv(self.add(self.add(s, x), y), yx) as usize] = true;
                    }
                }
                for &s in &members {
                    // T_x(s)
                    in_set[self.ldiv(x, self.add(s, x)) as usize] = true;
                }
            }
            let after = in_set.iter().filter(|&&b| b).count();
            if after == before {
                break;
            }
        }
        let members: Vec<u16> = (0..n as u16).filter(|&i| in_set[i as usize]).collect();
        Subloop::new_unchecked(self.n, members)
    }

    /// Smallest normal subloop whose quotient is an abelian group:
    /// the closure of all associators and commutators.
    pub fn commutator_associator_subloop(&self) -> Subloop {
        let n = self.n;
        let mut in_set = vec![false; n];
        if let Some(e) = self.neutral {
            in_set[e as usize] = true;
        }
        let chunks = par::map_indices(n, |x| {
            let x = x as u16;
            let mut local = vec![false; n];
            for y in 0..n as u16 {
                // commutator: (y+x) + c = x+y
                local[self.ldiv(self.add(y, x), self.add(x, y)) as usize] = true;
                for z in 0..n as u16 {
                    let lhs = self.add(x, self.add(y, z));
                    let rhs = self.add(self.add(x, y), z);
                    local[self.ldiv(lhs, rhs) as usize] = true;
                }
            }
            local
        });
        for local in chunks {
            for (i, f) in local.into_iter().enumerate() {
                in_set[i] |= f;
            }
        }
        self.normal_closure(in_set)
    }

    /// Closure of `gens` under the binary operation.
    ///
    /// In a finite quasigroup a product-closed subset is a subquasigroup, and
    /// when the parent is a loop it automatically contains 0 and inverses.
    /// The empty generating set yields `{0}` in a loop and the empty set in a
    /// proper quasigroup.
    pub fn subloop_generated(&self, gens: &[u16]) -> Subloop {
        let n = self.n;
        let mut in_set = vec![false; n];
        let mut list: Vec<u16> = Vec::new();
        if let Some(e) = self.neutral {
            in_set[e as usize] = true;
            list.push(e);
        }
        for &g in gens {
            if !in_set[g as usize] {
                in_set[g as usize] = true;
                list.push(g);
            }
        }
        let mut i = 0;
        while i < list.len() {
            let a = list[i];
            for j in 0..=i {
                let b = list[j];
                for p in [self.add(a, b), self.add(b, a)] {
                    if !in_set[p as usize] {
                        in_set[p as usize] = true;
                        list.push(p);
                    }
                }
            }
            i += 1;
        }
        list.sort_unstable();
        Subloop::new_unchecked(self.n, list)
    }

    /// The operation restricted to a closed subset, reindexed locally.
    /// Returns `None` when the subset is not closed.
    pub fn induced_table(&self, members: &[u16]) -> Option<LoopTable> {
        let m = members.len();
        let mut local = vec![u16::MAX; self.n];
        for (i, &g) in members.iter().enumerate() {
            local[g as usize] = i as u16;
        }
        let mut cells = vec![0u16; m * m];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                let v = local[self.add(a, b) as usize];
                if v == u16::MAX {
                    return None;
                }
                cells[i * m + j] = v;
            }
        }
        LoopTable::from_flat(m, cells).ok()
    }

    /// Elementary divisors of an abelian subgroup, as prime powers sorted
    /// ascending (e.g. `[3, 3]` for `C3 x C3`, `[9]` for `C9`).
    ///
    /// Returns `None` when the subset is not closed or not an abelian
    /// group. Uses the fact that the multiset of element orders determines
    /// a finite abelian group up to isomorphism.
    pub fn abelian_invariants(&self, s: &Subloop) -> Option<Vec<u64>> {
        let t = self.induced_table(s.members())?;
        if !t.is_loop() || !t.is_commutative() || !t.is_associative() {
            return None;
        }
        let orders: Vec<u64> = (0..t.order() as u16).map(|x| t.element_order(x)).collect();
        let n = t.order() as u64;
        let mut primes: Vec<u64> = Vec::new();
        let mut rest = n;
        let mut p = 2;
        while p * p <= rest {
            if rest.is_multiple_of(p) {
                primes.push(p);
                while rest.is_multiple_of(p) {
                    rest /= p;
                }
            }
            p += 1;
        }
        if rest > 1 {
            primes.push(rest);
        }
        let mut divisors: Vec<u64> = Vec::new();
        for &p in &primes {
            // r_k = number of cyclic p-factors of order >= p^k, recovered
            // from the count of elements whose order divides p^k
            let mut rs: Vec<u32> = Vec::new();
            let mut s_prev = 0u32;
            for k in 1.. {
                let pk = p.pow(k);
                let m = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let s = m.ilog(p);
                if s == s_prev {
                    break;
                }
                rs.push(s - s_prev);
                s_prev = s;
            }
            for (i, &r) in rs.iter().enumerate() {
                let next = rs.get(i + 1).copied().unwrap_or(0);
                for _ in 0..r.saturating_sub(next) {
                    divisors.push(p.pow(i as u32 + 1));
                }
            }
        }
        divisors.sort_unstable();
        Some(divisors)
    }

    /// Cayley table on the left cosets of `s`, with the projection map.
    ///
    /// Errors with [`Error::NotNormal`] when the cosets do not partition the
    /// loop or the induced operation is not well defined.
    pub fn quotient(&self, s: &Subloop) -> Result<(LoopTable, ElementMap)> {
        assert_eq!(s.parent_order(), self.n, "subloop of a different loop");
        let n = self.n;
        let mut coset: Vec<Option<u16>> = vec![None; n];
        let mut reps: Vec<u16> = Vec::new();
        for x in 0..n as u16 {
            if coset[x as usize].is_some() {
                continue;
            }
            let id = reps.len() as u16;
            for &m in s.members() {
                let y = self.add(x, m);
                if let Some(prev) = coset[y as usize] {
                    if prev != id {
                        return Err(Error::NotNormal { witness: y as usize });
                    }
                } else {
                    coset[y as usize] = Some(id);
                }
            }
            if coset[x as usize] != Some(id) {
                return Err(Error::NotNormal { witness: x as usize });
            }
            reps.push(x);
        }
        let coset: Vec<u16> = coset.into_iter().map(Option::unwrap).collect();
        let m = reps.len();
        // well-definedness: products of cosets land in a single coset
        for x in 0..n as u16 {
            for y in 0..n as u16 {
                let via_reps = coset
                    [self.add(reps[coset[x as usize] as usize], reps[coset[y as usize] as usize])
                        as usize];
                if coset[self.add(x, y) as usize] != via_reps {
                    return Err(Error::NotNormal {
                        witness: self.add(x, y) as usize,
                    });
                }
            }
        }
        let mut cells = vec![0u16; m * m];
        for a in 0..m {
            for b in 0..m {
                cells[a * m + b] = coset[self.add(reps[a], reps[b]) as usize];
            }
        }
        let q = LoopTable::from_flat(m, cells)?;
        let proj = ElementMap::new(self.n, coset);
        Ok((q, proj))
    }
}

/// Componentwise operation on index pairs, numbered row-major
/// (`index = i_a * b.order() + i_b`).
pub fn direct_product(a: &LoopTable, b: &LoopTable) -> LoopTable {
    let na = a.order();
    let nb = b.order();
    let n = na * nb;
    assert!(n <= u16::MAX as usize, "product order exceeds u16 range");
    let mut cells = vec![0u16; n * n];
    for xa in 0..na as u16 {
        for xb in 0..nb as u16 {
            let x = xa as usize * nb + xb as usize;
            for ya in 0..na as u16 {
                for yb in 0..nb as u16 {
                    let y = ya as usize * nb + yb as usize;
                    cells[x * n + y] =
                        a.add(xa, ya) * nb as u16 + b.add(xb, yb);
                }
            }
        }
    }
    LoopTable::from_flat(n, cells).expect("product of latin squares is latin")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A subset of a loop closed under its operation (and inverses).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subloop {
    parent_order: usize,
    members: Vec<u16>,
}

impl Subloop {
    /// Checked constructor: verifies closure under the operation and, when
    /// the parent is a loop, membership of 0 and closure under inverses.
    pub fn new(parent: &LoopTable, mut members: Vec<u16>) -> Result<Subloop> {
        members.sort_unstable();
        members.dedup();
        let mut flag = vec![false; parent.order()];
        for &m in &members {
            if m as usize >= parent.order() {
                return Err(Error::MalformedTable(format!("member {m} out of range")));
            }
            flag[m as usize] = true;
        }
        for &a in &members {
            for &b in &members {
                if !flag[parent.add(a, b) as usize] {
                    return Err(Error::MalformedTable(format!(
                        "subset not closed: {a} + {b} escapes"
                    )));
                }
            }
        }
        if let Some(e) = parent.neutral() {
            if !flag[e as usize] {
                return Err(Error::MalformedTable("subloop must contain 0".into()));
            }
            if parent.has_two_sided_inverses() {
                for &a in &members {
                    if !flag[parent.neg(a) as usize] {
                        return Err(Error::MalformedTable(format!(
                            "subset not closed under inverse of {a}"
                        )));
                    }
                }
            }
        }
        Ok(Subloop {
            parent_order: parent.order(),
            members,
        })
    }

    pub(crate) fn new_unchecked(parent_order: usize, members: Vec<u16>) -> Subloop {
        Subloop {
            parent_order,
            members,
        }
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Sorted member indices.
    pub fn members(&self) -> &[u16] {
        &self.members
    }

    pub fn contains(&self, x: u16) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn member_flags(&self) -> Vec<bool> {
        let mut f = vec![false; self.parent_order];
        for &m in &self.members {
            f[m as usize] = true;
        }
        f
    }
}

/// A not-necessarily-bijective self-map of a loop's index set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementMap {
    parent_order: usize,
    images: Vec<u16>,
}

impl ElementMap {
    pub fn new(parent_order: usize, images: Vec<u16>) -> ElementMap {
        assert_eq!(images.len(), parent_order);
        assert!(images.iter().all(|&v| (v as usize) < parent_order));
        ElementMap {
            parent_order,
            images,
        }
    }

    pub fn from_fn(parent_order: usize, f: impl Fn(u16) -> u16) -> ElementMap {
        ElementMap::new(parent_order, (0..parent_order as u16).map(f).collect())
    }

    #[inline]
    pub fn apply(&self, x: u16) -> u16 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|&v| v == 0)
    }

    /// `f(x+y) = f(x) + f(y)` for all pairs.
    pub fn is_endomorphism(&self, l: &LoopTable) -> bool {
        let n = l.order();
        !par::any_index(n, |x| {
            let x = x as u16;
            (0..n as u16).any(|y| {
                self.apply(l.add(x, y)) != l.add(self.apply(x), self.apply(y))
            })
        })
    }

    /// Set of images, sorted and deduplicated.
    pub fn image_set(&self) -> Vec<u16> {
        let mut v = self.images.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Image of a subset, sorted and deduplicated.
    pub fn image_of(&self, subset: &[u16]) -> Vec<u16> {
        let mut v: Vec<u16> = subset.iter().map(|&x| self.apply(x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn fixed_points(&self) -> Vec<u16> {
        (0..self.parent_order as u16)
            .filter(|&x| self.apply(x) == x)
            .collect()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ElementMap) -> ElementMap {
        assert_eq!(self.parent_order, other.parent_order);
        ElementMap::new(
            self.parent_order,
            self.images.iter().map(|&v| other.apply(v)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::abelian_group;

    #[test]
    fn singleton_table_is_a_loop() {
        let t = validate_quasigroup(&[vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(t.neutral(), Some(0));
    }

    #[test]
    fn z3_is_a_loop_with_neutral_zero() {
        let t = validate_quasigroup(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        assert_eq!(t.neutral(), Some(0));
        assert!(t.is_commutative());
        assert!(t.is_associative());
    }

    #[test]
    fn repeated_entry_is_rejected() {
        let err = validate_quasigroup(&[vec![0, 0, 2], vec![1, 2, 0], vec![2, 1, 1]]).unwrap_err();
        match err {
            Error::NotLatin {
                axis: Axis::Row,
                index: 0,
                ..
            } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn neutral_is_renumbered_to_zero() {
        // Z3 written with neutral at index 2
        let t = validate_quasigroup(&[vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(t.neutral(), Some(0));
        for x in 0..3 {
            assert_eq!(t.add(0, x), x);
            assert_eq!(t.add(x, 0), x);
        }
    }

    #[test]
    fn groups_are_moufang() {
        let z9 = abelian_group(&[9]);
        assert!(z9.is_moufang());
        assert_eq!(z9.exponent(), 9);
    }

    #[test]
    fn center_of_abelian_group_is_everything() {
        let g = abelian_group(&[3, 3]);
        assert_eq!(g.center().order(), 9);
    }

    #[test]
    fn associator_subloop_of_group_is_trivial() {
        let g = abelian_group(&[9]);
        let a = g.associator_subloop();
        assert_eq!(a.members(), &[0]);
    }

    #[test]
    fn quotient_z9_by_3z9_is_z3() {
        let z9 = abelian_group(&[9]);
        let three_z9 = z9.subloop_generated(&[3]);
        assert_eq!(three_z9.members(), &[0, 3, 6]);
        let (q, proj) = z9.quotient(&three_z9).unwrap();
        assert_eq!(q.order(), 3);
        assert!(q.is_associative());
        assert_eq!(q.exponent(), 3);
        assert_eq!(proj.apply(3), proj.apply(0));
    }

    #[test]
    fn quotient_by_whole_loop_is_trivial() {
        let g = abelian_group(&[3, 3]);
        let all = g.subloop_generated(&[1, 3]);
        assert_eq!(all.order(), 9);
        let (q, _) = g.quotient(&all).unwrap();
        assert_eq!(q.order(), 1);
    }

    #[test]
    fn generated_subloop_edge_cases() {
        let g = abelian_group(&[9]);
        assert_eq!(g.subloop_generated(&[0]).members(), &[0]);
        assert_eq!(g.subloop_generated(&[]).members(), &[0]);
        assert_eq!(g.subloop_generated(&[1]).order(), 9);
    }

    #[test]
    fn abelian_invariants_distinguish_groups() {
        let z9z3 = abelian_group(&[9, 3]);
        // (1,0) has index 3, (0,1) has index 1
        let all = z9z3.subloop_generated(&[3, 1]);
        assert_eq!(all.order(), 27);
        assert_eq!(z9z3.abelian_invariants(&all), Some(vec![3, 9]));
        let sub = z9z3.subloop_generated(&[9, 1]);
        assert_eq!(z9z3.abelian_invariants(&sub), Some(vec![3, 3]));

        let z33 = abelian_group(&[3, 3]);
        let all = z33.subloop_generated(&[1, 3]);
        assert_eq!(z33.abelian_invariants(&all), Some(vec![3, 3]));

        let z27 = abelian_group(&[27]);
        let all = z27.subloop_generated(&[1]);
        assert_eq!(z27.abelian_invariants(&all), Some(vec![27]));

        let z6 = abelian_group(&[6]);
        let all = z6.subloop_generated(&[1]);
        assert_eq!(z6.abelian_invariants(&all), Some(vec![2, 3]));
    }

    #[test]
    fn direct_product_with_trivial_factor() {
        let z3 = abelian_group(&[3]);
        let e = abelian_group(&[1]);
        let p = direct_product(&e, &z3);
        assert_eq!(p.order(), 3);
        assert!(p.is_associative());
        assert_eq!(p.cells(), z3.cells());
    }

    #[test]
    fn product_of_z3_z3_is_elementary_abelian() {
        let z3 = abelian_group(&[3]);
        let p = direct_product(&z3, &z3);
        assert_eq!(p.order(), 9);
        assert!(p.is_commutative() && p.is_associative());
        assert_eq!(p.exponent(), 3);
    }
}

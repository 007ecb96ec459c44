use crate::error::Error;
use crate::Result;

/// A permutation of `0..degree`, stored as its image array.
///
/// Composition is written left to right: `(a * b)(x) = b(a(x))`, exposed as
/// [`Perm::then`]. Points are `u16`, which caps the degree at 65536; the
/// structures handled here have degree at most a few hundred.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u16]>,
}

impl Perm {
    /// Identity permutation on `0..degree`.
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from an image array, checking bijectivity.
    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if (v as usize) >= n || seen[v as usize] {
                return Err(Error::MalformedTable(format!(
                    "image array of length {n} is not a bijection (value {v})"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Perm {
            images: images.into_boxed_slice(),
        })
    }

    /// Builds a permutation without checking bijectivity.
    ///
    /// Callers must guarantee the array is a bijection on `0..len`.
    pub(crate) fn from_images_unchecked(images: Vec<u16>) -> Self {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm {
            images: images.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u16) -> u16 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `self` followed by `other`: `(self.then(other))(x) = other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&v| other.images[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u16;
        }
        Perm {
            images: inv.into_boxed_slice(),
        }
    }

    /// Conjugate `self^g = g^-1 * self * g` (apply `g^-1`, then `self`, then `g`).
    ///
    /// This is a right action: `p.conjugated_by(g).conjugated_by(h)` equals
    /// `p.conjugated_by(g.then(h))`.
    pub fn conjugated_by(&self, g: &Perm) -> Perm {
        let ginv = g.inverse();
        self.conjugated_by_with_inv(g, &ginv)
    }

    /// Conjugation with a precomputed inverse, used in orbit loops.
    pub(crate) fn conjugated_by_with_inv(&self, g: &Perm, ginv: &Perm) -> Perm {
        let images = (0..self.images.len())
            .map(|x| g.images[self.images[ginv.images[x] as usize] as usize])
            .collect();
        Perm { images }
    }

    /// Multiplicative order of the permutation.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut ord: u64 = 1;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start as u16;
            while !seen[x as usize] {
                seen[x as usize] = true;
                x = self.apply(x);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// Checks that `p` commutes with `self`.
    pub fn commutes_with(&self, p: &Perm) -> bool {
        let n = self.degree();
        (0..n as u16).all(|x| p.apply(self.apply(x)) == self.apply(p.apply(x)))
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_with_inverse_is_identity() {
        let p = Perm::from_images(vec![2, 0, 1, 4, 3]).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert!(p.inverse().then(&p).is_identity());
    }

    #[test]
    fn apply_identity() {
        let id = Perm::identity(9);
        assert_eq!(id.apply(5), 5);
    }

    #[test]
    fn inverse_of_three_cycle() {
        // (0 1 2) has inverse (0 2 1)
        let c = Perm::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(c.inverse().images(), &[2, 0, 1]);
    }

    #[test]
    fn conjugation_is_right_action() {
        let p = Perm::from_images(vec![1, 0, 3, 2]).unwrap();
        let g = Perm::from_images(vec![2, 3, 0, 1]).unwrap();
        let h = Perm::from_images(vec![0, 2, 1, 3]).unwrap();
        let lhs = p.conjugated_by(&g).conjugated_by(&h);
        let rhs = p.conjugated_by(&g.then(&h));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_of_products() {
        let c3 = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
        let t = Perm::from_images(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(c3.order(), 3);
        assert_eq!(t.order(), 1);
    }
}

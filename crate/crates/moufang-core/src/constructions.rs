//! Explicit constructions of the commutative Moufang loops used in the
//! classification, plus abelian-group builders and the loop selector
//! registry used by the CLI.

use crate::loop_table::{direct_product, LoopTable};
use crate::textio;
use crate::{error::Error, Result};
use std::path::Path;
use std::sync::OnceLock;

/// Mixed-radix coordinates for tuple carriers like `Z3^4` or `Z3^2 x Z9`.
///
/// Indexing is row-major with the last coordinate fastest, so element
/// numbering is stable across runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCoordinates {
    moduli: Vec<u16>,
}

impl TupleCoordinates {
    pub fn new(moduli: &[u16]) -> TupleCoordinates {
        assert!(!moduli.is_empty() && moduli.iter().all(|&m| m >= 1));
        TupleCoordinates {
            moduli: moduli.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&m| m as usize).product()
    }

    pub fn moduli(&self) -> &[u16] {
        &self.moduli
    }

    pub fn index(&self, tuple: &[u16]) -> u16 {
        assert_eq!(tuple.len(), self.moduli.len());
        let mut idx = 0usize;
        for (t, m) in tuple.iter().zip(&self.moduli) {
            debug_assert!(t < m);
            idx = idx * *m as usize + *t as usize;
        }
        idx as u16
    }

    pub fn decode(&self, index: u16) -> Vec<u16> {
        let mut idx = index as usize;
        let mut out = vec![0u16; self.moduli.len()];
        for (slot, &m) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % m as usize) as u16;
            idx /= m as usize;
        }
        out
    }

    /// Sorted indices of all tuples satisfying `pred`.
    pub fn indices_where(&self, pred: impl Fn(&[u16]) -> bool) -> Vec<u16> {
        (0..self.order() as u16)
            .filter(|&i| pred(&self.decode(i)))
            .collect()
    }

    /// Builds a loop table from a coordinatewise addition rule.
    pub fn table_from_rule(&self, rule: impl Fn(&[u16], &[u16]) -> Vec<u16>) -> Result<LoopTable> {
        let n = self.order();
        let mut cells = vec![0u16; n * n];
        let tuples: Vec<Vec<u16>> = (0..n as u16).map(|i| self.decode(i)).collect();
        for x in 0..n {
            for y in 0..n {
                cells[x * n + y] = self.index(&rule(&tuples[x], &tuples[y]));
            }
        }
        LoopTable::from_flat(n, cells)
    }
}

fn md(v: i64, m: i64) -> u16 {
    v.rem_euclid(m) as u16
}

/// Direct sum of cyclic groups `Z_{m1} x Z_{m2} x ...` as a loop table.
pub fn abelian_group(moduli: &[u16]) -> LoopTable {
    let coords = TupleCoordinates::new(moduli);
    coords
        .table_from_rule(|a, b| {
            a.iter()
                .zip(b)
                .zip(moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect()
        })
        .expect("cyclic sums are latin")
}

/// The nonassociative commutative Moufang loop of order 81 and exponent 3,
/// on `Z3^4` with the twisted first coordinate.
pub fn construct_kn_81_1() -> LoopTable {
    static CACHE: OnceLock<LoopTable> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let coords = TupleCoordinates::new(&[3, 3, 3, 3]);
            let t = coords
                .table_from_rule(|p, q| {
                    let (a1, b1, c1, d1) = (p[0] as i64, p[1] as i64, p[2] as i64, p[3] as i64);
                    let (a2, b2, c2, d2) = (q[0] as i64, q[1] as i64, q[2] as i64, q[3] as i64);
                    vec![
                        md(a1 + a2 + (d1 - d2) * (b1 * c2 - c1 * b2), 3),
                        md(b1 + b2, 3),
                        md(c1 + c2, 3),
                        md(d1 + d2, 3),
                    ]
                })
                .expect("twisted addition is latin");
            assert!(t.neutral() == Some(0), "zero tuple must be neutral");
            assert!(t.is_commutative() && t.is_moufang() && !t.is_associative());
            t
        })
        .clone()
}

/// The nonassociative commutative Moufang loop of order 81 and exponent 9,
/// on `Z3^2 x Z9` with the twisted last coordinate.
pub fn construct_kn_81_2() -> LoopTable {
    static CACHE: OnceLock<LoopTable> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let coords = TupleCoordinates::new(&[3, 3, 9]);
            let t = coords
                .table_from_rule(|p, q| {
                    let (a1, b1, c1) = (p[0] as i64, p[1] as i64, p[2] as i64);
                    let (a2, b2, c2) = (q[0] as i64, q[1] as i64, q[2] as i64);
                    vec![
                        md(a1 + a2, 3),
                        md(b1 + b2, 3),
                        md(c1 + c2 + 3 * (c1 - c2) * (a1 * b2 - b1 * a2), 9),
                    ]
                })
                .expect("twisted addition is latin");
            assert!(t.neutral() == Some(0), "zero tuple must be neutral");
            assert!(t.is_commutative() && t.is_moufang() && !t.is_associative());
            t
        })
        .clone()
}

/// Order-243 loop: product of [`construct_kn_81_1`] with `Z3`.
/// Coordinates are `(a, b, c, d, e)` with `e` the appended `Z3` factor.
pub fn construct_kn_243_56() -> LoopTable {
    static CACHE: OnceLock<LoopTable> = OnceLock::new();
    CACHE
        .get_or_init(|| direct_product(&construct_kn_81_1(), &abelian_group(&[3])))
        .clone()
}

/// Order-243 loop: product of [`construct_kn_81_2`] with `Z3`.
/// Coordinates are `(a, b, c, d)` with `d` the appended `Z3` factor.
pub fn construct_kn_243_57() -> LoopTable {
    static CACHE: OnceLock<LoopTable> = OnceLock::new();
    CACHE
        .get_or_init(|| direct_product(&construct_kn_81_2(), &abelian_group(&[3])))
        .clone()
}

/// Coordinates of the four constructed loops, for building explicit subsets.
pub fn coordinates_of(name: &str) -> Option<TupleCoordinates> {
    match name {
        "81/1" => Some(TupleCoordinates::new(&[3, 3, 3, 3])),
        "81/2" => Some(TupleCoordinates::new(&[3, 3, 9])),
        "243/56" => Some(TupleCoordinates::new(&[3, 3, 3, 3, 3])),
        "243/57" => Some(TupleCoordinates::new(&[3, 3, 9, 3])),
        _ => None,
    }
}

/// Names of the nonassociative commutative Moufang loops of a given order.
/// Used to decide whether an order-level aggregate is complete.
pub fn nonassociative_cml_names(order: usize) -> &'static [&'static str] {
    match order {
        27 => &[],
        81 => &["81/1", "81/2"],
        243 => &["243/1", "243/2", "243/5", "243/56", "243/57", "243/67"],
        _ => &[],
    }
}

/// Whether a registry name refers to a loop that must be imported from an
/// externally exported Cayley table rather than constructed here.
pub fn is_import_only(name: &str) -> bool {
    matches!(name, "243/1" | "243/2" | "243/5" | "243/67")
}

/// Resolves a loop selector to a `(canonical id, table)` pair.
///
/// Accepted selectors: `81/1`, `81/2`, `243/56`, `243/57`, `Z(n1,n2,...)`,
/// `file:<path>`, and the import-only names `243/1`, `243/2`, `243/5`,
/// `243/67` which are looked up as `<imports_dir>/<order>_<index>.tbl`.
pub fn resolve_loop(selector: &str, imports_dir: &Path) -> Result<(String, LoopTable)> {
    let s = selector.trim();
    match s {
        "81/1" => return Ok(("81/1".into(), construct_kn_81_1())),
        "81/2" => return Ok(("81/2".into(), construct_kn_81_2())),
        "243/56" => return Ok(("243/56".into(), construct_kn_243_56())),
        "243/57" => return Ok(("243/57".into(), construct_kn_243_57())),
        _ => {}
    }
    if is_import_only(s) {
        let file = imports_dir.join(format!("{}.tbl", s.replace('/', "_")));
        if !file.is_file() {
            return Err(Error::UnknownSelector(format!(
                "{s} requires an imported Cayley table at {}",
                file.display()
            )));
        }
        return Ok((s.to_string(), textio::read_loop_table(&file)?));
    }
    if let Some(rest) = s.strip_prefix("file:") {
        return Ok((s.to_string(), textio::read_loop_table(Path::new(rest))?));
    }
    if let Some(inner) = s.strip_prefix("Z(").and_then(|r| r.strip_suffix(')')) {
        let moduli: std::result::Result<Vec<u16>, _> =
            inner.split(',').map(|p| p.trim().parse::<u16>()).collect();
        match moduli {
            Ok(m) if !m.is_empty() && m.iter().all(|&x| x >= 1) => {
                let id = format!(
                    "Z({})",
                    m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                );
                return Ok((id, abelian_group(&m)));
            }
            _ => return Err(Error::UnknownSelector(s.to_string())),
        }
    }
    Err(Error::UnknownSelector(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_builders() {
        assert_eq!(abelian_group(&[3]).order(), 3);
        assert_eq!(abelian_group(&[9]).exponent(), 9);
        let carrier = abelian_group(&[3, 3, 9]);
        assert_eq!(carrier.order(), 81);
        assert!(carrier.is_associative());
    }

    #[test]
    fn order_81_constructions_are_nonassociative_cml() {
        for t in [construct_kn_81_1(), construct_kn_81_2()] {
            assert_eq!(t.order(), 81);
            assert_eq!(t.neutral(), Some(0));
            assert!(t.is_commutative());
            assert!(t.is_moufang());
            assert!(!t.is_associative());
        }
    }

    #[test]
    fn exponents_distinguish_the_81_loops() {
        assert_eq!(construct_kn_81_1().exponent(), 3);
        assert_eq!(construct_kn_81_2().exponent(), 9);
    }

    #[test]
    fn order_81_centers_have_order_three() {
        assert_eq!(construct_kn_81_1().center().order(), 3);
        assert_eq!(construct_kn_81_2().center().order(), 3);
    }

    #[test]
    fn single_elements_generate_associative_subloops() {
        let l = construct_kn_243_57();
        let center = l.center();
        let x = (0..243u16).find(|&x| !center.contains(x)).unwrap();
        let sub = l.subloop_generated(&[x]);
        assert!(27 % sub.order() == 0, "order divides 27");
        let t = l.induced_table(sub.members()).unwrap();
        assert!(t.is_associative());
    }

    #[test]
    fn tuple_roundtrip() {
        let c = TupleCoordinates::new(&[3, 3, 9, 3]);
        assert_eq!(c.order(), 243);
        for i in 0..243u16 {
            assert_eq!(c.index(&c.decode(i)), i);
        }
        // last coordinate fastest
        assert_eq!(c.decode(1), vec![0, 0, 0, 1]);
        assert_eq!(c.decode(3), vec![0, 0, 1, 0]);
    }

    #[test]
    fn selector_registry() {
        let dir = Path::new(".");
        assert!(resolve_loop("Z(3,3,9)", dir).is_ok());
        assert!(resolve_loop("81/1", dir).is_ok());
        assert!(matches!(
            resolve_loop("243/1", dir),
            Err(Error::UnknownSelector(_))
        ));
        assert!(matches!(
            resolve_loop("nonsense", dir),
            Err(Error::UnknownSelector(_))
        ));
    }
}

//! Finite positive modal algebras.
//!
//! An algebra is stored as its order matrix plus the two unary tables. Meet
//! and join are derived from the order once, at construction, and memoized.
//! The wire format ([`AlgebraData`]) carries only the order and the operator
//! tables; everything else is recomputed on load.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an element of a finite algebra.
pub type Elem = usize;

/// The JSON algebra format: `size`, `leq`, `box`, `diamond`, optional `name`,
/// serialized in exactly that key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraData {
    pub size: usize,
    pub leq: Vec<Vec<u8>>,
    #[serde(rename = "box")]
    pub box_table: Vec<usize>,
    pub diamond: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Malformed input. Axiom failures are reported through [`ValidationReport`]
/// instead, except when a constructor needs a bounded distributive lattice.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("an algebra needs at least one element")]
    EmptyUniverse,
    #[error("order matrix has {found} rows, expected {expected}")]
    RowCount { expected: usize, found: usize },
    #[error("order matrix row {row} has {found} columns, expected {expected}")]
    ColumnCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("order matrix entry ({row}, {col}) is {value}, expected 0 or 1")]
    OrderEntry { row: usize, col: usize, value: u8 },
    #[error("{table} table has {found} entries, expected {expected}")]
    TableLength {
        table: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{table}[{index}] = {value} is out of range for size {size}")]
    TableEntry {
        table: &'static str,
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("not a bounded distributive lattice: `{axiom}` fails at {witness:?}")]
    NotDistributiveLattice { axiom: String, witness: Vec<Elem> },
}

/// One failed axiom instance: the axiom identifier and the first violating
/// tuple in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_bounded_lattice: bool,
    pub is_distributive: bool,
    pub is_pma: bool,
    pub is_pk4: bool,
    pub is_ps4: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// The strongest axiom system satisfied, if any.
    pub fn level(&self) -> Option<Kind> {
        if self.is_ps4 {
            Some(Kind::Ps4)
        } else if self.is_pk4 {
            Some(Kind::Pk4)
        } else if self.is_pma {
            Some(Kind::Pma)
        } else {
            None
        }
    }

    pub fn satisfies(&self, kind: Kind) -> bool {
        match kind {
            Kind::Pma => self.is_pma,
            Kind::Pk4 => self.is_pk4,
            Kind::Ps4 => self.is_ps4,
        }
    }
}

/// The three axiom systems: positive modal, positive K4 and positive S4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "PMA")]
    Pma,
    #[serde(rename = "PK4")]
    Pk4,
    #[serde(rename = "PS4")]
    Ps4,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Pma => "PMA",
            Kind::Pk4 => "PK4",
            Kind::Ps4 => "PS4",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PMA" => Ok(Kind::Pma),
            "PK4" => Ok(Kind::Pk4),
            "PS4" => Ok(Kind::Ps4),
            other => Err(format!("unknown axiom system `{other}`")),
        }
    }
}

fn check_structure(data: &AlgebraData) -> Result<(), AlgebraError> {
    let n = data.size;
    if n == 0 {
        return Err(AlgebraError::EmptyUniverse);
    }
    if data.leq.len() != n {
        return Err(AlgebraError::RowCount {
            expected: n,
            found: data.leq.len(),
        });
    }
    for (row, cols) in data.leq.iter().enumerate() {
        if cols.len() != n {
            return Err(AlgebraError::ColumnCount {
                row,
                expected: n,
                found: cols.len(),
            });
        }
        if let Some((col, &value)) = cols.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(AlgebraError::OrderEntry { row, col, value });
        }
    }
    for (table, values) in [("box", &data.box_table), ("diamond", &data.diamond)] {
        if values.len() != n {
            return Err(AlgebraError::TableLength {
                table,
                expected: n,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(AlgebraError::TableEntry {
                table,
                index,
                value,
                size: n,
            });
        }
    }
    Ok(())
}

/// Collects the first violation of each axiom.
struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn check<I>(&mut self, axiom: &str, tuples: I) -> bool
    where
        I: IntoIterator<Item = (bool, Vec<Elem>)>,
    {
        for (holds, witness) in tuples {
            if !holds {
                self.violations.push(Violation {
                    axiom: axiom.to_string(),
                    witness,
                });
                return false;
            }
        }
        true
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (Elem, Elem)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

fn triples(n: usize) -> impl Iterator<Item = (Elem, Elem, Elem)> {
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
}

/// Exhaustively checks the lattice, distributivity and modal axioms.
///
/// Structural problems (wrong dimensions, out-of-range entries) are errors;
/// axiom failures land in the report with their first witness.
pub fn validate(data: &AlgebraData) -> Result<ValidationReport, AlgebraError> {
    check_structure(data)?;
    let n = data.size;
    let le = |a: Elem, b: Elem| data.leq[a][b] == 1;
    let mut ck = Checker {
        violations: Vec::new(),
    };

    let mut order_ok = ck.check("leq-reflexive", (0..n).map(|a| (le(a, a), vec![a])));
    order_ok &= ck.check(
        "leq-antisymmetric",
        pairs(n).map(|(a, b)| (a == b || !(le(a, b) && le(b, a)), vec![a, b])),
    );
    order_ok &= ck.check(
        "leq-transitive",
        triples(n).map(|(a, b, c)| (!(le(a, b) && le(b, c)) || le(a, c), vec![a, b, c])),
    );

    let lattice = if order_ok {
        let tables = lattice_tables(n, &|a, b| le(a, b));
        match tables {
            Ok(t) => Some(t),
            Err((axiom, witness)) => {
                ck.violations.push(Violation {
                    axiom: axiom.to_string(),
                    witness,
                });
                None
            }
        }
    } else {
        None
    };
    let is_bounded_lattice = lattice.is_some();

    let Some(lat) = lattice else {
        return Ok(ValidationReport {
            is_bounded_lattice,
            is_distributive: false,
            is_pma: false,
            is_pk4: false,
            is_ps4: false,
            violations: ck.violations,
        });
    };
    let meet = |a: Elem, b: Elem| lat.meet[a * n + b] as Elem;
    let join = |a: Elem, b: Elem| lat.join[a * n + b] as Elem;
    let is_distributive = ck.check(
        "distributive",
        triples(n).map(|(a, b, c)| {
            (
                meet(a, join(b, c)) == join(meet(a, b), meet(a, c)),
                vec![a, b, c],
            )
        }),
    );
    if !is_distributive {
        return Ok(ValidationReport {
            is_bounded_lattice,
            is_distributive,
            is_pma: false,
            is_pk4: false,
            is_ps4: false,
            violations: ck.violations,
        });
    }

    let bx = |a: Elem| data.box_table[a];
    let dm = |a: Elem| data.diamond[a];
    let (bot, top) = (lat.bottom, lat.top);

    let mut is_pma = ck.check("box-top", [(bx(top) == top, vec![top])]);
    is_pma &= ck.check("diamond-bottom", [(dm(bot) == bot, vec![bot])]);
    is_pma &= ck.check(
        "box-meet",
        pairs(n).map(|(a, b)| (bx(meet(a, b)) == meet(bx(a), bx(b)), vec![a, b])),
    );
    is_pma &= ck.check(
        "diamond-join",
        pairs(n).map(|(a, b)| (dm(join(a, b)) == join(dm(a), dm(b)), vec![a, b])),
    );
    is_pma &= ck.check(
        "box-diamond-meet",
        pairs(n).map(|(a, b)| (le(meet(bx(a), dm(b)), dm(meet(a, b))), vec![a, b])),
    );
    is_pma &= ck.check(
        "box-join-diamond",
        pairs(n).map(|(a, b)| (le(bx(join(a, b)), join(bx(a), dm(b))), vec![a, b])),
    );

    let mut k4 = ck.check("k4-box", (0..n).map(|a| (le(bx(a), bx(bx(a))), vec![a])));
    k4 &= ck.check(
        "k4-diamond",
        (0..n).map(|a| (le(dm(dm(a)), dm(a)), vec![a])),
    );

    let mut s4 = ck.check(
        "s4-box-deflationary",
        (0..n).map(|a| (le(bx(a), a), vec![a])),
    );
    s4 &= ck.check(
        "s4-diamond-inflationary",
        (0..n).map(|a| (le(a, dm(a)), vec![a])),
    );
    s4 &= ck.check(
        "s4-box-idempotent",
        (0..n).map(|a| (bx(bx(a)) == bx(a), vec![a])),
    );
    s4 &= ck.check(
        "s4-diamond-idempotent",
        (0..n).map(|a| (dm(dm(a)) == dm(a), vec![a])),
    );

    let is_pk4 = is_pma && k4;
    // The S4 laws imply the K4 laws, so a K4 failure also refutes S4.
    let is_ps4 = is_pk4 && s4;
    Ok(ValidationReport {
        is_bounded_lattice,
        is_distributive,
        is_pma,
        is_pk4,
        is_ps4,
        violations: ck.violations,
    })
}

struct LatticeTables {
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: Elem,
    top: Elem,
}

/// Derives meet/join tables from a partial order, or names the first pair
/// without a meet (join), or the missing bound.
fn lattice_tables(
    n: usize,
    le: &dyn Fn(Elem, Elem) -> bool,
) -> Result<LatticeTables, (&'static str, Vec<Elem>)> {
    let bottom = (0..n)
        .find(|&a| (0..n).all(|b| le(a, b)))
        .ok_or(("lattice-bottom", vec![]))?;
    let top = (0..n)
        .find(|&a| (0..n).all(|b| le(b, a)))
        .ok_or(("lattice-top", vec![]))?;
    // Elements sorted by number of elements below them: the greatest common
    // lower bound is the last candidate in this order, if one exists.
    let down: Vec<usize> = (0..n)
        .map(|a| (0..n).filter(|&b| le(b, a)).count())
        .collect();
    let mut by_height: Vec<Elem> = (0..n).collect();
    by_height.sort_by_key(|&a| (down[a], a));

    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for a in 0..n {
        for b in a..n {
            let m = by_height
                .iter()
                .rev()
                .copied()
                .find(|&c| le(c, a) && le(c, b))
                .filter(|&c| (0..n).all(|d| !(le(d, a) && le(d, b)) || le(d, c)))
                .ok_or(("lattice-meet", vec![a, b]))?;
            let j = by_height
                .iter()
                .copied()
                .find(|&c| le(a, c) && le(b, c))
                .filter(|&c| (0..n).all(|d| !(le(a, d) && le(b, d)) || le(c, d)))
                .ok_or(("lattice-join", vec![a, b]))?;
            meet[a * n + b] = m as u32;
            meet[b * n + a] = m as u32;
            join[a * n + b] = j as u32;
            join[b * n + a] = j as u32;
        }
    }
    Ok(LatticeTables {
        meet,
        join,
        bottom,
        top,
    })
}

/// A bounded distributive lattice with two unary operators. Values are
/// immutable once built.
#[derive(Clone)]
pub struct FiniteAlgebra {
    size: usize,
    leq: Vec<bool>,
    meet: Vec<u32>,
    join: Vec<u32>,
    boxes: Vec<u32>,
    diamonds: Vec<u32>,
    bottom: Elem,
    top: Elem,
    name: Option<String>,
}

impl PartialEq for FiniteAlgebra {
    /// Equality of the underlying tables; the name is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.leq == other.leq
            && self.boxes == other.boxes
            && self.diamonds == other.diamonds
    }
}

impl Eq for FiniteAlgebra {}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("name", &self.name)
            .field("size", &self.size)
            .field("box", &self.boxes)
            .field("diamond", &self.diamonds)
            .finish_non_exhaustive()
    }
}

impl FiniteAlgebra {
    /// Builds an algebra from the wire format. The order must be a bounded
    /// distributive lattice; the modal axioms are *not* required here (use
    /// [`FiniteAlgebra::validate`]).
    pub fn from_data(data: &AlgebraData) -> Result<Self, AlgebraError> {
        check_structure(data)?;
        let report = validate(data)?;
        if !(report.is_bounded_lattice && report.is_distributive) {
            let v = report
                .violations
                .first()
                .cloned()
                .unwrap_or_else(|| Violation {
                    axiom: "lattice".into(),
                    witness: vec![],
                });
            return Err(AlgebraError::NotDistributiveLattice {
                axiom: v.axiom,
                witness: v.witness,
            });
        }
        let n = data.size;
        let leq: Vec<bool> = data.leq.iter().flatten().map(|&v| v == 1).collect();
        let tables = lattice_tables(n, &|a, b| leq[a * n + b]).expect("checked above");
        Ok(FiniteAlgebra {
            size: n,
            leq,
            meet: tables.meet,
            join: tables.join,
            boxes: data.box_table.iter().map(|&v| v as u32).collect(),
            diamonds: data.diamond.iter().map(|&v| v as u32).collect(),
            bottom: tables.bottom,
            top: tables.top,
            name: data.name.clone(),
        })
    }

    /// Builds an algebra from an order predicate and operator tables.
    pub fn from_order<F>(
        size: usize,
        le: F,
        box_table: Vec<Elem>,
        diamond: Vec<Elem>,
    ) -> Result<Self, AlgebraError>
    where
        F: Fn(Elem, Elem) -> bool,
    {
        let leq = (0..size)
            .map(|a| (0..size).map(|b| u8::from(le(a, b))).collect())
            .collect();
        Self::from_data(&AlgebraData {
            size,
            leq,
            box_table,
            diamond,
            name: None,
        })
    }

    /// Assembles an algebra whose lattice tables are already known to be
    /// consistent (products, quotients, subalgebras, powersets).
    pub(crate) fn from_tables_unchecked(
        size: usize,
        leq: Vec<bool>,
        meet: Vec<u32>,
        join: Vec<u32>,
        boxes: Vec<u32>,
        diamonds: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(leq.len(), size * size);
        debug_assert_eq!(meet.len(), size * size);
        let bottom = (0..size)
            .find(|&a| (0..size).all(|b| leq[a * size + b]))
            .expect("lattice has a bottom");
        let top = (0..size)
            .find(|&a| (0..size).all(|b| leq[b * size + a]))
            .expect("lattice has a top");
        FiniteAlgebra {
            size,
            leq,
            meet,
            join,
            boxes,
            diamonds,
            bottom,
            top,
            name: None,
        }
    }

    /// Same lattice, new operator tables.
    pub fn with_operators(&self, box_table: &[Elem], diamond: &[Elem]) -> Self {
        assert_eq!(box_table.len(), self.size);
        assert_eq!(diamond.len(), self.size);
        FiniteAlgebra {
            boxes: box_table.iter().map(|&v| v as u32).collect(),
            diamonds: diamond.iter().map(|&v| v as u32).collect(),
            name: None,
            ..self.clone()
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The name, or a placeholder naming the size.
    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("<{}-element algebra>", self.size))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.size + b]
    }

    #[inline]
    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.size + b] as Elem
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.size + b] as Elem
    }

    #[inline]
    pub fn box_of(&self, a: Elem) -> Elem {
        self.boxes[a] as Elem
    }

    #[inline]
    pub fn diamond_of(&self, a: Elem) -> Elem {
        self.diamonds[a] as Elem
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn box_table(&self) -> Vec<Elem> {
        self.boxes.iter().map(|&v| v as Elem).collect()
    }

    pub fn diamond_table(&self) -> Vec<Elem> {
        self.diamonds.iter().map(|&v| v as Elem).collect()
    }

    pub(crate) fn raw_meet(&self) -> &[u32] {
        &self.meet
    }

    pub(crate) fn raw_join(&self) -> &[u32] {
        &self.join
    }

    pub fn check_element(&self, a: Elem) -> crate::Result<()> {
        if a < self.size {
            Ok(())
        } else {
            Err(crate::Error::ElementOutOfRange {
                index: a,
                size: self.size,
            })
        }
    }

    /// Meet of a finite set; the empty meet is the top.
    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Join of a finite set; the empty join is the bottom.
    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Boolean complement of `a`, if it has one.
    pub fn complement(&self, a: Elem) -> Option<Elem> {
        self.elements()
            .find(|&b| self.meet(a, b) == self.bottom && self.join(a, b) == self.top)
    }

    /// Hasse diagram edges `(lower, upper)` in index order.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) && !self.elements().any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Join-prime elements other than the bottom; they generate the lattice.
    pub fn join_irreducibles(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&a| {
                a != self.bottom && {
                    let below: Vec<Elem> = self.elements().filter(|&b| self.lt(b, a)).collect();
                    self.join_all(below) != a
                }
            })
            .collect()
    }

    pub fn to_data(&self) -> AlgebraData {
        AlgebraData {
            size: self.size,
            leq: (0..self.size)
                .map(|a| (0..self.size).map(|b| u8::from(self.leq(a, b))).collect())
                .collect(),
            box_table: self.box_table(),
            diamond: self.diamond_table(),
            name: self.name.clone(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_data()).expect("a constructed algebra is structurally sound")
    }

    pub fn is_pma(&self) -> bool {
        self.satisfies(Kind::Pma)
    }

    pub fn is_pk4(&self) -> bool {
        self.satisfies(Kind::Pk4)
    }

    pub fn is_ps4(&self) -> bool {
        self.satisfies(Kind::Ps4)
    }

    /// Fast check of the modal axioms straight from the tables, without
    /// collecting witnesses. Agrees with [`FiniteAlgebra::validate`].
    pub fn satisfies(&self, kind: Kind) -> bool {
        let n = self.size;
        let (bx, dm) = (|a| self.box_of(a), |a| self.diamond_of(a));
        if bx(self.top) != self.top || dm(self.bottom) != self.bottom {
            return false;
        }
        for a in 0..n {
            match kind {
                Kind::Pma => {}
                Kind::Pk4 => {
                    if !self.leq(bx(a), bx(bx(a))) || !self.leq(dm(dm(a)), dm(a)) {
                        return false;
                    }
                }
                Kind::Ps4 => {
                    if !self.leq(bx(a), a)
                        || !self.leq(a, dm(a))
                        || bx(bx(a)) != bx(a)
                        || dm(dm(a)) != dm(a)
                    {
                        return false;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let (m, j) = (self.meet(a, b), self.join(a, b));
                if bx(m) != self.meet(bx(a), bx(b))
                    || dm(j) != self.join(dm(a), dm(b))
                    || !self.leq(self.meet(bx(a), dm(b)), dm(m))
                    || !self.leq(bx(j), self.join(bx(a), dm(b)))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Canonical single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_data()).expect("algebra data serializes")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        let data: AlgebraData = serde_json::from_str(text)
            .map_err(|e| crate::Error::Io(format!("bad algebra JSON: {e}")))?;
        Ok(Self::from_data(&data)?)
    }
}

/// Builders for common lattice shapes.
pub mod shapes {
    use super::*;

    /// The `n`-element chain `0 < 1 < ... < n-1` with the given operators.
    pub fn chain(n: usize, box_table: Vec<Elem>, diamond: Vec<Elem>) -> FiniteAlgebra {
        FiniteAlgebra::from_order(n, |a, b| a <= b, box_table, diamond)
            .expect("chains are lattices")
    }

    /// The Boolean lattice of subsets of `{0..k}`, elements indexed by bitmask.
    pub fn boolean(k: u32, box_table: Vec<Elem>, diamond: Vec<Elem>) -> FiniteAlgebra {
        FiniteAlgebra::from_order(1 << k, |a, b| a & !b == 0, box_table, diamond)
            .expect("powersets are lattices")
    }

    /// Identity operators on the given lattice order.
    pub fn identity_ops<F: Fn(Elem, Elem) -> bool>(n: usize, le: F) -> FiniteAlgebra {
        let id: Vec<Elem> = (0..n).collect();
        FiniteAlgebra::from_order(n, le, id.clone(), id).expect("lattice order expected")
    }

    /// A positive S4-algebra given by its lattice and the fixed points of the
    /// two operators: `box a` is the greatest box-fixed point below `a`,
    /// `dia a` the least diamond-fixed point above it. Bounds are always fixed.
    pub fn from_fixed_points(
        lattice: &FiniteAlgebra,
        box_fixed: &[Elem],
        diamond_fixed: &[Elem],
    ) -> FiniteAlgebra {
        let mut bf: Vec<Elem> = box_fixed.to_vec();
        bf.extend([lattice.bottom(), lattice.top()]);
        let mut df: Vec<Elem> = diamond_fixed.to_vec();
        df.extend([lattice.bottom(), lattice.top()]);
        let boxes: Vec<Elem> = lattice
            .elements()
            .map(|a| {
                let below: Vec<Elem> = bf.iter().copied().filter(|&f| lattice.leq(f, a)).collect();
                lattice.join_all(below)
            })
            .collect();
        let diamonds: Vec<Elem> = lattice
            .elements()
            .map(|a| {
                let above: Vec<Elem> = df.iter().copied().filter(|&f| lattice.leq(a, f)).collect();
                lattice.meet_all(above)
            })
            .collect();
        lattice.with_operators(&boxes, &diamonds)
    }
}

#[cfg(test)]
mod tests {
    use super::shapes::*;
    use super::*;

    fn c2() -> FiniteAlgebra {
        chain(2, vec![0, 1], vec![0, 1])
    }

    #[test]
    fn identity_chain_satisfies_everything() {
        let r = c2().validate();
        assert!(r.is_bounded_lattice && r.is_distributive && r.is_pma && r.is_pk4 && r.is_ps4);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn b2_is_pma_but_not_ps4() {
        let b2 = chain(2, vec![1, 1], vec![0, 0]);
        let r = b2.validate();
        assert!(r.is_pma);
        assert!(!r.is_ps4);
        let v = r
            .violations
            .iter()
            .find(|v| v.axiom == "s4-box-deflationary")
            .unwrap();
        assert_eq!(v.witness, vec![0]);
    }

    #[test]
    fn d3_is_ps4() {
        let d3 = chain(3, vec![0, 0, 2], vec![0, 2, 2]);
        assert!(d3.validate().is_ps4);
    }

    #[test]
    fn lattice_operations() {
        assert_eq!(c2().meet(0, 1), 0);
        let d3 = chain(3, vec![0, 0, 2], vec![0, 2, 2]);
        assert_eq!(d3.join(1, 1), 1);
        let square = boolean(2, vec![0, 1, 2, 3], vec![0, 1, 2, 3]);
        assert_eq!(square.meet(1, 2), square.bottom());
        assert_eq!(square.join(1, 2), square.top());
        assert_eq!(square.complement(1), Some(2));
    }

    #[test]
    fn structural_errors_are_distinct_from_axiom_failures() {
        let mut data = c2().to_data();
        data.leq[1].pop();
        assert!(matches!(
            validate(&data),
            Err(AlgebraError::ColumnCount { .. })
        ));
        let mut data = c2().to_data();
        data.box_table[0] = 7;
        assert!(matches!(
            validate(&data),
            Err(AlgebraError::TableEntry { .. })
        ));
        let mut data = c2().to_data();
        data.size = 0;
        assert_eq!(validate(&data), Err(AlgebraError::EmptyUniverse));
    }

    #[test]
    fn non_lattice_reported_with_witness() {
        // Two incomparable elements with no top.
        let data = AlgebraData {
            size: 3,
            leq: vec![vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]],
            box_table: vec![0, 1, 2],
            diamond: vec![0, 1, 2],
            name: None,
        };
        let r = validate(&data).unwrap();
        assert!(!r.is_bounded_lattice && !r.is_pma);
        assert_eq!(r.violations[0].axiom, "lattice-top");
        assert!(FiniteAlgebra::from_data(&data).is_err());
    }

    #[test]
    fn pentagon_is_not_distributive() {
        // 0 < a < b < 1, 0 < c < 1 with c incomparable to a, b.
        let up = [
            vec![0, 1, 2, 3, 4],
            vec![1, 2, 4],
            vec![2, 4],
            vec![3, 4],
            vec![4],
        ];
        let data = AlgebraData {
            size: 5,
            leq: (0..5)
                .map(|a| (0..5).map(|b| u8::from(up[a].contains(&b))).collect())
                .collect(),
            box_table: (0..5).collect(),
            diamond: (0..5).collect(),
            name: None,
        };
        let r = validate(&data).unwrap();
        assert!(r.is_bounded_lattice);
        assert!(!r.is_distributive);
        assert!(!r.is_pma);
    }

    #[test]
    fn json_keys_in_canonical_order() {
        let json = c2().with_name("C2").to_json();
        assert_eq!(
            json,
            r#"{"size":2,"leq":[[1,1],[0,1]],"box":[0,1],"diamond":[0,1],"name":"C2"}"#
        );
        let back = FiniteAlgebra::from_json(&json).unwrap();
        assert_eq!(back, c2());
        assert_eq!(back.name(), Some("C2"));
    }

    #[test]
    fn trivial_algebra_is_legal() {
        let t = chain(1, vec![0], vec![0]);
        let r = t.validate();
        assert!(r.is_ps4);
        assert_eq!(t.bottom(), t.top());
    }
}

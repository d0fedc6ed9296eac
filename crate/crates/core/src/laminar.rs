//! Laminar families over the commodity set `K`.
//!
//! A family is stored as its tree representation: the root holds `K`, every
//! internal node is split into its children, and the leaves are the
//! singletons `{k}`. Node order is canonical preorder with children sorted by
//! their lowest commodity, so for `((k1,k2),k3)` the sets come out as
//! `K, {k1,k2}, {k1}, {k2}, {k3}` and the partitions as `split K`,
//! `split {k1,k2}`.
//!
//! Full-binary families are generated by leaf insertion: starting from the
//! single leaf `k1`, leaf `k_j` is hung below a new node that subdivides one
//! of the `2j - 3` edges of the current tree (the root counts as having an
//! edge above it). Every full binary labeled tree arises from exactly one
//! sequence of choices, which gives `(2b - 3)!!` families and lets a family id
//! be decoded directly as a mixed-radix number.

use std::fmt;
use std::str::FromStr;

/// Largest commodity count accepted by the enumerator.
pub const MAX_COMMODITIES: usize = 12;

pub type FamilyId = u64;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LaminarError {
    #[error("commodity count {0} outside the supported range 1..={MAX_COMMODITIES}")]
    UnsupportedSize(usize),
    #[error("family count for b = {0} overflows 128 bits")]
    Overflow(usize),
    #[error("family id {id} out of range for b = {b}")]
    BadId { b: usize, id: FamilyId },
    #[error("set {0} is not in the family")]
    SetNotInFamily(CommoditySet),
    #[error("set {0} is a singleton and is never split")]
    Singleton(CommoditySet),
    #[error("invalid family: {0}")]
    Invalid(String),
    #[error("cannot parse family at byte {pos}: {msg}")]
    Parse { pos: usize, msg: &'static str },
}

/// Subset of `K` as a bitmask; bit `j` stands for commodity `k_{j+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct CommoditySet(u64);

impl CommoditySet {
    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    /// `{k}` for 0-based commodity index `k`.
    pub fn singleton(k: usize) -> Self {
        Self(1 << k)
    }

    /// All of `K` when `|K| = b`.
    pub fn full(b: usize) -> Self {
        Self(if b == 64 { u64::MAX } else { (1 << b) - 1 })
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn lowest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Member commodities, ascending.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&k| self.contains(k))
    }
}

impl fmt::Display for CommoditySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "k{}", k + 1)?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarNode {
    pub set: CommoditySet,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl LaminarNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The split of one non-singleton set into its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition<'a> {
    /// Node index of the set being split.
    pub node: usize,
    /// Node indices of the child sets.
    pub children: &'a [usize],
}

/// Nested-set expression such as `((k1,k2),k3)`; leaves are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nested {
    Leaf(usize),
    Group(Vec<Nested>),
}

impl Nested {
    fn set(&self) -> CommoditySet {
        match self {
            Nested::Leaf(k) => CommoditySet::singleton(*k),
            Nested::Group(parts) => parts
                .iter()
                .fold(CommoditySet::default(), |acc, p| acc.union(p.set())),
        }
    }

    fn canonicalize(&mut self) {
        if let Nested::Group(parts) = self {
            parts.iter_mut().for_each(Nested::canonicalize);
            parts.sort_by_key(|p| p.set().lowest());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarFamily {
    id: FamilyId,
    commodities: usize,
    nodes: Vec<LaminarNode>,
    /// Internal node indices in preorder; position = partition index.
    splits: Vec<usize>,
}

impl LaminarFamily {
    /// Builds a family from a nested expression over commodities `0..b`.
    ///
    /// Any laminar tree is accepted (internal nodes need at least two
    /// children), so the non-binary families can be represented too.
    pub fn from_nested(b: usize, mut tree: Nested, id: FamilyId) -> Result<Self, LaminarError> {
        if b == 0 || b > 63 {
            return Err(LaminarError::UnsupportedSize(b));
        }
        tree.canonicalize();
        let mut family = Self {
            id,
            commodities: b,
            nodes: Vec::with_capacity(2 * b - 1),
            splits: Vec::new(),
        };
        let mut seen = CommoditySet::default();
        family.push(&tree, None, &mut seen)?;
        if seen != CommoditySet::full(b) {
            return Err(LaminarError::Invalid(format!(
                "leaves {seen} do not cover {}",
                CommoditySet::full(b)
            )));
        }
        Ok(family)
    }

    fn push(
        &mut self,
        tree: &Nested,
        parent: Option<usize>,
        seen: &mut CommoditySet,
    ) -> Result<usize, LaminarError> {
        let idx = self.nodes.len();
        self.nodes.push(LaminarNode {
            set: tree.set(),
            parent,
            children: Vec::new(),
        });
        match tree {
            Nested::Leaf(k) => {
                if *k >= self.commodities {
                    return Err(LaminarError::Invalid(format!(
                        "commodity k{} out of range",
                        k + 1
                    )));
                }
                if seen.contains(*k) {
                    return Err(LaminarError::Invalid(format!(
                        "commodity k{} repeated",
                        k + 1
                    )));
                }
                *seen = seen.union(CommoditySet::singleton(*k));
            }
            Nested::Group(parts) => {
                if parts.len() < 2 {
                    return Err(LaminarError::Invalid(
                        "a split needs at least two parts".into(),
                    ));
                }
                self.splits.push(idx);
                for part in parts {
                    let child = self.push(part, Some(idx), seen)?;
                    self.nodes[idx].children.push(child);
                }
            }
        }
        Ok(idx)
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    /// `b = |K|`.
    pub fn commodity_count(&self) -> usize {
        self.commodities
    }

    pub fn nodes(&self) -> &[LaminarNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &LaminarNode {
        &self.nodes[idx]
    }

    /// S(l) in node order.
    pub fn sets(&self) -> impl Iterator<Item = CommoditySet> + '_ {
        self.nodes.iter().map(|n| n.set)
    }

    /// P(l) in preorder of the split sets.
    pub fn partitions(&self) -> impl Iterator<Item = Partition<'_>> + '_ {
        (0..self.splits.len()).map(|p| self.partition(p))
    }

    pub fn partition_count(&self) -> usize {
        self.splits.len()
    }

    pub fn partition(&self, p: usize) -> Partition<'_> {
        let node = self.splits[p];
        Partition {
            node,
            children: &self.nodes[node].children,
        }
    }

    /// Partition index splitting node `idx`, if it is internal.
    pub fn partition_of_node(&self, idx: usize) -> Option<usize> {
        self.splits.iter().position(|&n| n == idx)
    }

    pub fn node_of(&self, set: CommoditySet) -> Result<usize, LaminarError> {
        self.nodes
            .iter()
            .position(|n| n.set == set)
            .ok_or(LaminarError::SetNotInFamily(set))
    }

    /// S_l(p): the child sets of partition `p`.
    pub fn children_of(&self, p: usize) -> Vec<CommoditySet> {
        self.partition(p)
            .children
            .iter()
            .map(|&c| self.nodes[c].set)
            .collect()
    }

    /// P_l(s): the partition splitting `set`; defined for `|set| ≥ 2`.
    pub fn partition_of(&self, set: CommoditySet) -> Result<usize, LaminarError> {
        let idx = self.node_of(set)?;
        self.partition_of_node(idx)
            .ok_or(LaminarError::Singleton(set))
    }

    pub fn parent_of(&self, set: CommoditySet) -> Result<Option<CommoditySet>, LaminarError> {
        let idx = self.node_of(set)?;
        Ok(self.nodes[idx].parent.map(|p| self.nodes[p].set))
    }

    pub fn is_full_binary(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| n.children.is_empty() || n.children.len() == 2)
    }

    /// Canonical nested-set expression, e.g. `((k1,k2),k3)`.
    pub fn encoding(&self) -> String {
        self.to_string()
    }

    fn write_node(&self, idx: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = &self.nodes[idx];
        if node.is_leaf() {
            return write!(f, "k{}", node.set.lowest().unwrap() + 1);
        }
        f.write_str("(")?;
        for (i, &c) in node.children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            self.write_node(c, f)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for LaminarFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(0, f)
    }
}

impl FromStr for Nested {
    type Err = LaminarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let tree = parse_nested(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(LaminarError::Parse {
                pos,
                msg: "trailing input",
            });
        }
        Ok(tree)
    }
}

impl FromStr for LaminarFamily {
    type Err = LaminarError;

    /// Parses an expression and infers `b` from the largest commodity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tree: Nested = s.parse()?;
        let b = tree
            .set()
            .bits()
            .checked_ilog2()
            .map_or(0, |hi| hi as usize + 1);
        LaminarFamily::from_nested(b, tree, 0)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while bytes.get(*pos).is_some_and(u8::is_ascii_whitespace) {
        *pos += 1;
    }
}

fn parse_nested(bytes: &[u8], pos: &mut usize) -> Result<Nested, LaminarError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'k' | b'K') => {
            *pos += 1;
            let start = *pos;
            while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
                *pos += 1;
            }
            let k: usize = std::str::from_utf8(&bytes[start..*pos])
                .ok()
                .and_then(|d| d.parse().ok())
                .filter(|&k| (1..=63).contains(&k))
                .ok_or(LaminarError::Parse {
                    pos: start,
                    msg: "expected commodity number 1..=63",
                })?;
            Ok(Nested::Leaf(k - 1))
        }
        Some(b'(') => {
            *pos += 1;
            let mut parts = vec![parse_nested(bytes, pos)?];
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => {
                        *pos += 1;
                        parts.push(parse_nested(bytes, pos)?);
                    }
                    Some(b')') => {
                        *pos += 1;
                        return Ok(Nested::Group(parts));
                    }
                    _ => {
                        return Err(LaminarError::Parse {
                            pos: *pos,
                            msg: "expected `,` or `)`",
                        })
                    }
                }
            }
        }
        _ => Err(LaminarError::Parse {
            pos: *pos,
            msg: "expected `k` or `(`",
        }),
    }
}

/// |L_b| = (2b − 3)!!, the number of full binary labeled trees with `b` leaves.
pub fn count_families(b: usize) -> Result<u128, LaminarError> {
    if b == 0 {
        return Err(LaminarError::UnsupportedSize(b));
    }
    (1..b).try_fold(1u128, |acc, j| {
        acc.checked_mul(2 * j as u128 - 1)
            .ok_or(LaminarError::Overflow(b))
    })
}

/// Decodes family `id` of the leaf-insertion enumeration over `b` commodities.
pub fn family_by_id(b: usize, id: FamilyId) -> Result<LaminarFamily, LaminarError> {
    if !(1..=MAX_COMMODITIES).contains(&b) {
        return Err(LaminarError::UnsupportedSize(b));
    }
    if u128::from(id) >= count_families(b)? {
        return Err(LaminarError::BadId { b, id });
    }
    // Choice for leaf j (0-based, j ≥ 1) has radix 2j - 1; the last
    // insertion is the least significant digit.
    let mut digits = vec![0usize; b];
    let mut rest = id;
    for j in (1..b).rev() {
        let radix = 2 * j as u64 - 1;
        digits[j] = (rest % radix) as usize;
        rest /= radix;
    }

    let mut tree = Nested::Leaf(0);
    for (j, &choice) in digits.iter().enumerate().skip(1) {
        let mut counter = choice;
        tree = insert_leaf(tree, j, &mut counter);
        tree.canonicalize();
    }
    LaminarFamily::from_nested(b, tree, id)
}

/// Subdivides the edge above the `counter`-th node in preorder.
fn insert_leaf(tree: Nested, leaf: usize, counter: &mut usize) -> Nested {
    if *counter == 0 {
        *counter = usize::MAX;
        return Nested::Group(vec![tree, Nested::Leaf(leaf)]);
    }
    *counter -= 1;
    match tree {
        Nested::Group(parts) => Nested::Group(
            parts
                .into_iter()
                .map(|p| {
                    if *counter == usize::MAX {
                        p
                    } else {
                        insert_leaf(p, leaf, counter)
                    }
                })
                .collect(),
        ),
        leaf_node => leaf_node,
    }
}

/// Streams all full-binary laminar families over `b` commodities, ids
/// `0..(2b-3)!!` in order.
pub fn enumerate_families(b: usize) -> Result<FamilyIter, LaminarError> {
    if !(1..=MAX_COMMODITIES).contains(&b) {
        return Err(LaminarError::UnsupportedSize(b));
    }
    let count = count_families(b)? as u64;
    Ok(FamilyIter { b, next: 0, count })
}

#[derive(Debug, Clone)]
pub struct FamilyIter {
    b: usize,
    next: FamilyId,
    count: FamilyId,
}

impl Iterator for FamilyIter {
    type Item = LaminarFamily;

    fn next(&mut self) -> Option<LaminarFamily> {
        if self.next >= self.count {
            return None;
        }
        let family = family_by_id(self.b, self.next).expect("id in range");
        self.next += 1;
        Some(family)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for FamilyIter {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn set(ks: &[usize]) -> CommoditySet {
        ks.iter().fold(CommoditySet::default(), |s, &k| {
            s.union(CommoditySet::singleton(k - 1))
        })
    }

    #[test]
    fn three_commodities_give_figure_families() {
        let all: Vec<String> = enumerate_families(3)
            .unwrap()
            .map(|l| l.encoding())
            .collect();
        assert_eq!(all, ["((k1,k2),k3)", "((k1,k3),k2)", "(k1,(k2,k3))"]);
    }

    #[test]
    fn single_commodity() {
        let all: Vec<_> = enumerate_families(1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].encoding(), "k1");
        assert_eq!(all[0].partition_count(), 0);
    }

    #[test]
    fn counts() {
        assert_eq!(count_families(2), Ok(1));
        assert_eq!(count_families(6), Ok(945));
        assert_eq!(count_families(10), Ok(34_459_425));
        assert_eq!(count_families(0), Err(LaminarError::UnsupportedSize(0)));
        assert_eq!(count_families(200), Err(LaminarError::Overflow(200)));
        assert_eq!(enumerate_families(7).unwrap().count(), 10_395);
    }

    #[test]
    fn size_cap() {
        assert!(enumerate_families(12).is_ok());
        assert_eq!(
            enumerate_families(13).err(),
            Some(LaminarError::UnsupportedSize(13))
        );
        assert_eq!(
            enumerate_families(0).err(),
            Some(LaminarError::UnsupportedSize(0))
        );
    }

    #[test]
    fn accessors_on_first_family() {
        let l1 = family_by_id(3, 0).unwrap();
        let sets: Vec<_> = l1.sets().collect();
        assert_eq!(
            sets,
            [
                set(&[1, 2, 3]),
                set(&[1, 2]),
                set(&[1]),
                set(&[2]),
                set(&[3])
            ]
        );
        assert_eq!(l1.partition_count(), 2);
        assert_eq!(l1.partition_of(set(&[1, 2, 3])), Ok(0));
        assert_eq!(l1.partition_of(set(&[1, 2])), Ok(1));
        assert_eq!(l1.children_of(0), [set(&[1, 2]), set(&[3])]);
        assert_eq!(l1.children_of(1), [set(&[1]), set(&[2])]);
        assert_eq!(l1.parent_of(set(&[1, 2, 3])), Ok(None));
        assert_eq!(l1.parent_of(set(&[3])), Ok(Some(set(&[1, 2, 3]))));
        assert_eq!(
            l1.partition_of(set(&[3])),
            Err(LaminarError::Singleton(set(&[3])))
        );
        assert_eq!(
            l1.partition_of(set(&[2, 3])),
            Err(LaminarError::SetNotInFamily(set(&[2, 3])))
        );
    }

    #[test]
    fn structure_per_family() {
        for b in 1..=6 {
            for l in enumerate_families(b).unwrap() {
                assert!(l.is_full_binary());
                assert_eq!(l.nodes().len(), 2 * b - 1);
                assert_eq!(l.partition_count(), b - 1);
                assert_eq!(l.nodes().iter().filter(|n| n.is_leaf()).count(), b);
                assert_eq!(l.node(0).set, CommoditySet::full(b));
                for (idx, node) in l.nodes().iter().enumerate() {
                    if node.is_leaf() {
                        assert_eq!(node.set.len(), 1);
                    } else {
                        let (a, c) = (l.node(node.children[0]).set, l.node(node.children[1]).set);
                        assert!(a.is_disjoint(c));
                        assert_eq!(a.union(c), node.set);
                        for &ch in &node.children {
                            assert_eq!(l.node(ch).parent, Some(idx));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn encodings_unique() {
        for b in 1..=6 {
            let seen: HashSet<String> = enumerate_families(b)
                .unwrap()
                .map(|l| l.encoding())
                .collect();
            assert_eq!(seen.len() as u128, count_families(b).unwrap());
        }
    }

    #[test]
    fn parse_round_trip_and_non_binary() {
        let l4: LaminarFamily = "(k1,k2,k3)".parse().unwrap();
        assert!(!l4.is_full_binary());
        assert_eq!(l4.partition_count(), 1);
        assert_eq!(l4.children_of(0).len(), 3);
        let l: LaminarFamily = " ( k3 , ( k2 , k1 ) ) ".parse().unwrap();
        assert_eq!(l.encoding(), "((k1,k2),k3)");
        assert!("(k1)".parse::<LaminarFamily>().is_err());
        assert!("(k1,k1)".parse::<LaminarFamily>().is_err());
        assert!("(k1,k3)".parse::<LaminarFamily>().is_err());
        assert!("(k1,k2".parse::<LaminarFamily>().is_err());
    }

    #[test]
    fn ids_decode_consistently() {
        for l in enumerate_families(5).unwrap() {
            let again: LaminarFamily = l.encoding().parse().unwrap();
            assert_eq!(again.nodes(), l.nodes());
        }
        assert_eq!(
            family_by_id(3, 3).err(),
            Some(LaminarError::BadId { b: 3, id: 3 })
        );
    }
}

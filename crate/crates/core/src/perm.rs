//! Permutations, set partitions and circle shapes on small integer ground sets.
//!
//! Ground sets are sorted sets of positive `u32` labels with at most 64
//! elements. Permutations store a dense image table over a contiguous
//! relabeling of the ground set; the original labels are kept in a side
//! table, so application and cycle scans are O(1) and O(n).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_GROUND: usize = 64;

fn check_ground(labels: &[u32]) -> Result<()> {
    if labels.len() > MAX_GROUND {
        return Err(Error::GroundTooLarge(labels.len()));
    }
    for w in labels.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::NotABijection);
        }
    }
    if labels.first().is_some_and(|&x| x == 0) {
        return Err(Error::NotInGround(0));
    }
    Ok(())
}

/// A bijection on a finite ground set of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    labels: Vec<u32>,
    /// image[i] is the internal index of the image of labels[i]
    image: Vec<usize>,
}

impl Permutation {
    /// Identity on the given (sorted, distinct) labels.
    pub fn identity(labels: &[u32]) -> Result<Self> {
        check_ground(labels)?;
        Ok(Permutation {
            labels: labels.to_vec(),
            image: (0..labels.len()).collect(),
        })
    }

    /// Builds a permutation from label images: `images[i]` is the image of `labels[i]`.
    pub fn from_images(labels: &[u32], images: &[u32]) -> Result<Self> {
        check_ground(labels)?;
        if images.len() != labels.len() {
            return Err(Error::NotABijection);
        }
        let mut image = Vec::with_capacity(labels.len());
        let mut seen = vec![false; labels.len()];
        for &y in images {
            let j = labels.binary_search(&y).map_err(|_| Error::NotInGround(y))?;
            if seen[j] {
                return Err(Error::NotABijection);
            }
            seen[j] = true;
            image.push(j);
        }
        Ok(Permutation { labels: labels.to_vec(), image })
    }

    /// Permutation on `[1..=n]` given one-based images.
    pub fn one_based(images: &[u32]) -> Result<Self> {
        let labels: Vec<u32> = (1..=images.len() as u32).collect();
        Self::from_images(&labels, images)
    }

    /// Builds from a list of cycles over `labels`; labels not mentioned are fixed.
    pub fn from_cycles(labels: &[u32], cycles: &[Vec<u32>]) -> Result<Self> {
        let mut perm = Self::identity(labels)?;
        let mut touched = vec![false; labels.len()];
        for cycle in cycles {
            for w in 0..cycle.len() {
                let x = cycle[w];
                let y = cycle[(w + 1) % cycle.len()];
                let i = labels.binary_search(&x).map_err(|_| Error::NotInGround(x))?;
                let j = labels.binary_search(&y).map_err(|_| Error::NotInGround(y))?;
                if touched[i] {
                    return Err(Error::NotABijection);
                }
                touched[i] = true;
                perm.image[i] = j;
            }
        }
        // a touched element must also be hit, or images collide
        let mut hit = vec![false; labels.len()];
        for &j in &perm.image {
            if hit[j] {
                return Err(Error::NotABijection);
            }
            hit[j] = true;
        }
        Ok(perm)
    }

    pub fn ground(&self) -> &[u32] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn same_ground(&self, other: &Self) -> bool {
        self.labels == other.labels
    }

    fn index_of(&self, x: u32) -> Result<usize> {
        self.labels.binary_search(&x).map_err(|_| Error::NotInGround(x))
    }

    /// Applies the permutation to a label.
    pub fn apply(&self, x: u32) -> Result<u32> {
        Ok(self.labels[self.image[self.index_of(x)?]])
    }

    /// Internal image table (indices into the label table).
    pub(crate) fn image_internal(&self) -> &[usize] {
        &self.image
    }

    pub(crate) fn from_internal(labels: Vec<u32>, image: Vec<usize>) -> Self {
        Permutation { labels, image }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { labels: self.labels.clone(), image: inv }
    }

    /// Returns the map `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !self.same_ground(other) {
            return Err(Error::GroundMismatch);
        }
        let image = other.image.iter().map(|&j| self.image[j]).collect();
        Ok(Permutation { labels: self.labels.clone(), image })
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle decomposition: each cycle starts at its minimal label, cycles
    /// are sorted by their minimal label.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(self.labels[i]);
                i = self.image[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i];
            }
        }
        count
    }

    /// The metric |π| = |ground| − #cycles.
    pub fn length(&self) -> usize {
        self.size() - self.cycle_count()
    }

    /// The cycles of the permutation viewed as a partition.
    pub fn orbit_partition(&self) -> SetPartition {
        SetPartition::from_blocks_unchecked(self.labels.clone(), self.cycles())
    }

    /// Restriction `σ|_M`: delete the elements outside `M` from every cycle,
    /// preserving the cyclic order.
    pub fn restrict(&self, m: &[u32]) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut mm = m.to_vec();
        mm.sort_unstable();
        mm.dedup();
        let idx: Vec<usize> = mm.iter().map(|&x| self.index_of(x)).collect::<Result<_>>()?;
        let mut member = vec![false; self.labels.len()];
        for &i in &idx {
            member[i] = true;
        }
        let mut image = Vec::with_capacity(idx.len());
        for &i in &idx {
            let mut j = self.image[i];
            while !member[j] {
                j = self.image[j];
            }
            // position of labels[j] within mm
            let pos = mm.binary_search(&self.labels[j]).unwrap();
            image.push(pos);
        }
        Ok(Permutation { labels: mm, image })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses cycle notation like `(1,4,5)(2,3)(6)`. The ground set is the
    /// set of labels mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let cycles = parse_groups(s, '(', ')')?;
        let mut labels: Vec<u32> = cycles.iter().flatten().copied().collect();
        labels.sort_unstable();
        let before = labels.len();
        labels.dedup();
        if labels.len() != before {
            return Err(Error::Parse(format!("repeated element in {s:?}")));
        }
        Self::from_cycles(&labels, &cycles)
    }
}

fn parse_groups(s: &str, open: char, close: char) -> Result<Vec<Vec<u32>>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        if !rest.starts_with(open) {
            return Err(Error::Parse(format!("expected {open:?} in {s:?}")));
        }
        let end = rest
            .find(close)
            .ok_or_else(|| Error::Parse(format!("unbalanced {open:?} in {s:?}")))?;
        let inner = &rest[open.len_utf8()..end];
        let mut group = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(Error::Parse(format!("empty element in {s:?}")));
            }
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {tok:?} in {s:?}")))?;
            if v == 0 {
                return Err(Error::Parse("elements must be positive".into()));
            }
            group.push(v);
        }
        if group.is_empty() {
            return Err(Error::Parse(format!("empty group in {s:?}")));
        }
        out.push(group);
        rest = &rest[end + close.len_utf8()..];
    }
    Ok(out)
}

/// A partition of a finite ground set into disjoint non-empty blocks.
///
/// The representation is normalized: block ids are assigned in order of
/// first appearance along the sorted label table, so equality, hashing and
/// ordering are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u32>,
    block_of: Vec<u32>,
}

impl SetPartition {
    pub fn discrete(labels: &[u32]) -> Result<Self> {
        check_ground(labels)?;
        Ok(SetPartition {
            labels: labels.to_vec(),
            block_of: (0..labels.len() as u32).collect(),
        })
    }

    pub fn full(labels: &[u32]) -> Result<Self> {
        check_ground(labels)?;
        Ok(SetPartition { labels: labels.to_vec(), block_of: vec![0; labels.len()] })
    }

    /// Builds a partition from blocks; the ground set is their union.
    pub fn from_blocks(blocks: &[Vec<u32>]) -> Result<Self> {
        let mut labels: Vec<u32> = blocks.iter().flatten().copied().collect();
        labels.sort_unstable();
        let before = labels.len();
        labels.dedup();
        if labels.len() != before || blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidBlocks);
        }
        check_ground(&labels)?;
        let mut block_of = vec![u32::MAX; labels.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                let i = labels.binary_search(&x).unwrap();
                block_of[i] = b as u32;
            }
        }
        let mut part = SetPartition { labels, block_of };
        part.normalize();
        Ok(part)
    }

    pub(crate) fn from_blocks_unchecked(labels: Vec<u32>, blocks: Vec<Vec<u32>>) -> Self {
        let mut block_of = vec![0u32; labels.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                let i = labels.binary_search(&x).unwrap();
                block_of[i] = b as u32;
            }
        }
        let mut part = SetPartition { labels, block_of };
        part.normalize();
        part
    }

    fn normalize(&mut self) {
        let mut remap: Vec<Option<u32>> = vec![None; self.block_of.len()];
        let mut next = 0u32;
        for b in self.block_of.iter_mut() {
            let slot = &mut remap[*b as usize];
            if slot.is_none() {
                *slot = Some(next);
                next += 1;
            }
            *b = slot.unwrap();
        }
    }

    pub fn ground(&self) -> &[u32] {
        &self.labels
    }

    pub fn same_ground(&self, other: &Self) -> bool {
        self.labels == other.labels
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn is_full(&self) -> bool {
        self.block_count() <= 1
    }

    /// Blocks sorted by minimal element, each block sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(self.labels[i]);
        }
        out
    }

    /// True when `x` and `y` lie in the same block.
    pub fn together(&self, x: u32, y: u32) -> Result<bool> {
        let i = self.labels.binary_search(&x).map_err(|_| Error::NotInGround(x))?;
        let j = self.labels.binary_search(&y).map_err(|_| Error::NotInGround(y))?;
        Ok(self.block_of[i] == self.block_of[j])
    }

    /// Lattice supremum: the finest partition coarser than both.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if !self.same_ground(other) {
            return Err(Error::GroundMismatch);
        }
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for part in [self, other] {
            let mut first_of_block: Vec<Option<usize>> = vec![None; n];
            for (i, &b) in part.block_of.iter().enumerate() {
                match first_of_block[b as usize] {
                    None => first_of_block[b as usize] = Some(i),
                    Some(j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
        let mut block_of = vec![0u32; n];
        for (i, slot) in block_of.iter_mut().enumerate() {
            *slot = find(&mut parent, i) as u32;
        }
        let mut part = SetPartition { labels: self.labels.clone(), block_of };
        part.normalize();
        Ok(part)
    }

    /// Refinement order: every block of `self` is contained in a block of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if !self.same_ground(other) {
            return Err(Error::GroundMismatch);
        }
        let mut image_block: Vec<Option<u32>> = vec![None; self.labels.len()];
        for (i, &b) in self.block_of.iter().enumerate() {
            let ob = other.block_of[i];
            match image_block[b as usize] {
                None => image_block[b as usize] = Some(ob),
                Some(prev) if prev != ob => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    /// Coarsens by merging the blocks containing the given representatives.
    pub fn merge(&self, groups: &[Vec<u32>]) -> Result<Self> {
        let mut blocks = self.blocks();
        for group in groups {
            let mut ids = Vec::new();
            for &x in group {
                let i = self.labels.binary_search(&x).map_err(|_| Error::NotInGround(x))?;
                ids.push(self.block_of[i]);
            }
            ids.sort_unstable();
            ids.dedup();
            if ids.len() <= 1 {
                continue;
            }
            let target = ids[0] as usize;
            for &id in &ids[1..] {
                let moved = std::mem::take(&mut blocks[id as usize]);
                blocks[target].extend(moved);
            }
        }
        blocks.retain(|b| !b.is_empty());
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        Ok(Self::from_blocks_unchecked(self.labels.clone(), blocks))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            write!(f, "{{")?;
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses block notation like `{1,4,5}{2,3}{6}`.
    fn from_str(s: &str) -> Result<Self> {
        let blocks = parse_groups(s, '{', '}')?;
        Self::from_blocks(&blocks)
    }
}

/// The circle structure γ_{m₁,…,m_r}: cycle i is the consecutive run of
/// length mᵢ starting after the previous circles.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaShape {
    sizes: Vec<u32>,
}

impl GammaShape {
    pub fn new(sizes: &[u32]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::EmptyCircle);
        }
        let total: u32 = sizes.iter().sum();
        if total as usize > MAX_GROUND {
            return Err(Error::GroundTooLarge(total as usize));
        }
        Ok(GammaShape { sizes: sizes.to_vec() })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn circles(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> u32 {
        self.sizes.iter().sum()
    }

    /// First and last label of circle `i` (0-based).
    pub fn circle_span(&self, i: usize) -> (u32, u32) {
        let start: u32 = self.sizes[..i].iter().sum::<u32>() + 1;
        (start, start + self.sizes[i] - 1)
    }

    /// 0-based circle index of a label.
    pub fn circle_of(&self, x: u32) -> Result<usize> {
        if x == 0 || x > self.total() {
            return Err(Error::NotInGround(x));
        }
        let mut acc = 0;
        for (i, &m) in self.sizes.iter().enumerate() {
            acc += m;
            if x <= acc {
                return Ok(i);
            }
        }
        unreachable!()
    }

    /// The permutation γ with one cycle per circle.
    pub fn gamma(&self) -> Permutation {
        let n = self.total() as usize;
        let mut image = vec![0usize; n];
        let mut start = 0usize;
        for &m in &self.sizes {
            let m = m as usize;
            for k in 0..m {
                image[start + k] = start + (k + 1) % m;
            }
            start += m;
        }
        Permutation::from_internal((1..=n as u32).collect(), image)
    }

    /// The orbit partition of γ: one block per circle.
    pub fn circles_partition(&self) -> SetPartition {
        let blocks = (0..self.circles())
            .map(|i| {
                let (a, b) = self.circle_span(i);
                (a..=b).collect()
            })
            .collect();
        SetPartition::from_blocks_unchecked((1..=self.total()).collect(), blocks)
    }
}

impl fmt::Display for GammaShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.sizes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for GammaShape {
    type Err = Error;

    /// Parses `2,2,2`.
    fn from_str(s: &str) -> Result<Self> {
        let sizes: Vec<u32> = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad size {t:?}"))))
            .collect::<Result<_>>()?;
        Self::new(&sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn compose_involution_is_identity() {
        let t = p("(1,2)");
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn compose_identity_law() {
        let q = p("(1,3,2)(4)");
        let id = Permutation::identity(q.ground()).unwrap();
        assert_eq!(id.compose(&q).unwrap(), q);
        assert_eq!(q.compose(&id).unwrap(), q);
    }

    #[test]
    fn compose_inverse_gamma_hand_values() {
        // π = (1,6)(2,3)(4,5) against γ_{2,2,2}
        let pi = p("(1,6)(2,3)(4,5)");
        let gamma = GammaShape::new(&[2, 2, 2]).unwrap().gamma();
        let rho = pi.inverse().compose(&gamma).unwrap();
        assert_eq!(rho.to_string(), "(1,3,5)(2,6,4)");
        // π = (1,4)(2,3)(5)(6): hand composition gives (1,3)(2,4)(5,6)
        let pi2 = p("(1,4)(2,3)(5)(6)");
        let rho2 = pi2.inverse().compose(&gamma).unwrap();
        assert_eq!(rho2.to_string(), "(1,3)(2,4)(5,6)");
    }

    #[test]
    fn compose_rejects_mismatched_grounds() {
        let a = p("(1,2)");
        let b = p("(1,2,3)");
        assert!(matches!(a.compose(&b), Err(Error::GroundMismatch)));
    }

    #[test]
    fn restriction_examples() {
        let sigma = p("(1,4,5)(2,3)(6)");
        assert_eq!(sigma.restrict(&[1, 3, 6]).unwrap().to_string(), "(1)(3)(6)");
        assert_eq!(sigma.restrict(&[1, 2, 4]).unwrap().to_string(), "(1,4)(2)");
        assert_eq!(sigma.restrict(sigma.ground()).unwrap(), sigma);
        assert!(matches!(sigma.restrict(&[]), Err(Error::EmptySubset)));
        assert!(matches!(sigma.restrict(&[7]), Err(Error::NotInGround(7))));
    }

    #[test]
    fn restriction_is_transitive() {
        let sigma = p("(1,4,5)(2,3)(6)");
        let inner = sigma.restrict(&[1, 2, 4, 6]).unwrap().restrict(&[1, 2]).unwrap();
        assert_eq!(inner, sigma.restrict(&[1, 2]).unwrap());
    }

    #[test]
    fn cycle_metrics() {
        let pi = p("(1,3,2)");
        assert_eq!(pi.cycle_count(), 1);
        assert_eq!(pi.length(), 2);
        assert_eq!(pi.inverse().length(), 2);
        assert_eq!(pi.length(), pi.inverse().length());
    }

    #[test]
    fn join_examples() {
        let u: SetPartition = "{1,2}{3}".parse().unwrap();
        let v: SetPartition = "{1,3}{2}".parse().unwrap();
        assert_eq!(u.join(&v).unwrap().to_string(), "{1,2,3}");
        assert_eq!(u.join(&u).unwrap(), u);
    }

    #[test]
    fn orbit_join_example() {
        let a = p("(1,2)(3,4)").orbit_partition();
        let b = GammaShape::new(&[2, 2]).unwrap().circles_partition();
        assert_eq!(a.join(&b).unwrap().to_string(), "{1,2}{3,4}");
    }

    #[test]
    fn orbit_of_compose_below_join_of_orbits() {
        let pp = p("(1,2)(3)(4)");
        let q = p("(2,3)(1)(4)");
        let left = pp.compose(&q).unwrap().orbit_partition();
        let right = pp.orbit_partition().join(&q.orbit_partition()).unwrap();
        assert!(left.leq(&right).unwrap());
    }

    #[test]
    fn parse_format_round_trip() {
        for s in ["(1,4,5)(2,3)(6)", "(1)(2)(3)", "(1,2,12,9,8)(3,4)(5,10,11)(6)(7)(13,15)(14)"] {
            let perm = p(s);
            assert_eq!(perm.to_string(), s);
        }
        let part: SetPartition = "{1,4,5}{2,3}{6}".parse().unwrap();
        assert_eq!(part.to_string(), "{1,4,5}{2,3}{6}");
    }

    #[test]
    fn gamma_shape_basics() {
        let shape: GammaShape = "2,2,2".parse().unwrap();
        assert_eq!(shape.gamma().to_string(), "(1,2)(3,4)(5,6)");
        assert_eq!(shape.circle_of(4).unwrap(), 1);
        assert_eq!(shape.circle_span(2), (5, 6));
        assert!(GammaShape::new(&[2, 0]).is_err());
    }

    #[test]
    fn ground_cap_enforced() {
        let labels: Vec<u32> = (1..=65).collect();
        assert!(matches!(Permutation::identity(&labels), Err(Error::GroundTooLarge(65))));
    }

    #[test]
    fn partition_merge() {
        let part: SetPartition = "{1,2}{3}{4,5}".parse().unwrap();
        let merged = part.merge(&[vec![1, 4]]).unwrap();
        assert_eq!(merged.to_string(), "{1,2,4,5}{3}");
    }
}

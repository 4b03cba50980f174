//! Partitioned permutations (V, π), membership in PS_NC(γ), the four-class
//! classification on three circles, dual-mode enumeration and the lift.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::annular::enumerate_snc;
use crate::error::{Error, Result};
use crate::perm::{GammaShape, Permutation, SetPartition, MAX_GROUND};

/// A pair (V, π) with every block of V a union of cycles of π.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PartitionedPermutation {
    part: SetPartition,
    perm: Permutation,
}

impl PartitionedPermutation {
    pub fn new(part: SetPartition, perm: Permutation) -> Result<Self> {
        if part.ground() != perm.ground() {
            return Err(Error::GroundMismatch);
        }
        if !perm.orbit_partition().leq(&part)? {
            return Err(Error::NotAboveCycles);
        }
        Ok(PartitionedPermutation { part, perm })
    }

    /// The pair (0_π, π).
    pub fn from_perm(perm: Permutation) -> Self {
        PartitionedPermutation { part: perm.orbit_partition(), perm }
    }

    pub fn part(&self) -> &SetPartition {
        &self.part
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn size(&self) -> usize {
        self.perm.size()
    }

    /// |(V,π)| = 2(n − #V) − (n − #π).
    pub fn length(&self) -> usize {
        let n = self.size();
        2 * (n - self.part.block_count()) - (n - self.perm.cycle_count())
    }

    /// Blocks that are unions of two or more cycles, as lists of cycles.
    pub fn marked_blocks(&self) -> Vec<Vec<Vec<u32>>> {
        let cycles = self.perm.cycles();
        let mut out = Vec::new();
        for block in self.part.blocks() {
            let inside: Vec<Vec<u32>> = cycles
                .iter()
                .filter(|c| block.contains(&c[0]))
                .cloned()
                .collect();
            if inside.len() >= 2 {
                out.push(inside);
            }
        }
        out
    }
}

/// Alias for spec-facing naming.
pub fn pp_length(pp: &PartitionedPermutation) -> usize {
    pp.length()
}

/// Membership in PS_NC(shape): `V ∨ γ = 1` together with
/// `|(V,π)| + |π⁻¹γ| = |(1,γ)| = n + #γ − 2`.
pub fn is_psnc(pp: &PartitionedPermutation, shape: &GammaShape) -> Result<bool> {
    let gamma = shape.gamma();
    if pp.perm().ground() != gamma.ground() {
        return Err(Error::GroundMismatch);
    }
    let n = pp.size();
    if !pp.part().join(&shape.circles_partition())?.is_full() {
        return Ok(false);
    }
    let rho = pp.perm().inverse().compose(&gamma)?;
    Ok(pp.length() + (n - rho.cycle_count()) == n + shape.circles() - 2)
}

/// The four cases of the three-circle classification.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum PSClass {
    /// V = 0_π and π ∈ S_NC(m₁,m₂,m₃)
    Connected,
    /// one block joins two cycles (annular pair × disc)
    OneMarked,
    /// two blocks, each joining two cycles of disc × disc × disc
    TwoMarked2x2,
    /// one block joins three cycles of disc × disc × disc
    OneMarked3,
}

impl PSClass {
    pub fn name(self) -> &'static str {
        match self {
            PSClass::Connected => "Connected",
            PSClass::OneMarked => "OneMarked",
            PSClass::TwoMarked2x2 => "TwoMarked2x2",
            PSClass::OneMarked3 => "OneMarked3",
        }
    }
}

/// Classifies a member of PS_NC(m₁,m₂,m₃). Errors when the shape does not
/// have exactly three circles or the pair is not a member.
pub fn classify(pp: &PartitionedPermutation, shape: &GammaShape) -> Result<PSClass> {
    if shape.circles() != 3 {
        return Err(Error::CirclesNot3(shape.circles()));
    }
    if !is_psnc(pp, shape)? {
        return Err(Error::NotAMember);
    }
    let marked = pp.marked_blocks();
    let class = match marked.len() {
        0 => PSClass::Connected,
        1 if marked[0].len() == 2 => PSClass::OneMarked,
        1 if marked[0].len() == 3 => PSClass::OneMarked3,
        2 if marked[0].len() == 2 && marked[1].len() == 2 => PSClass::TwoMarked2x2,
        _ => return Err(Error::NotAMember),
    };
    Ok(class)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EnumMode {
    Brute,
    Structural,
}

/// Enumerates PS_NC(shape) for 1, 2 or 3 circles.
///
/// Brute mode scans all of S_n and all coarsenings of each cycle partition,
/// filtering by the membership predicate. Structural mode assembles members
/// from annular and disc enumerations following the classification. Both
/// return the same sorted vector.
pub fn enumerate_psnc(
    shape: &GammaShape,
    mode: EnumMode,
    brute_cap: u32,
    structural_cap: u32,
) -> Result<Vec<PartitionedPermutation>> {
    if shape.circles() > 3 {
        return Err(Error::CirclesNot3(shape.circles()));
    }
    match mode {
        EnumMode::Brute => {
            if shape.total() > brute_cap {
                return Err(Error::CapExceeded { cap: brute_cap, needed: shape.total() });
            }
            enumerate_brute(shape)
        }
        EnumMode::Structural => {
            if shape.total() > structural_cap {
                return Err(Error::CapExceeded { cap: structural_cap, needed: shape.total() });
            }
            enumerate_structural(shape, structural_cap)
        }
    }
}

fn enumerate_brute(shape: &GammaShape) -> Result<Vec<PartitionedPermutation>> {
    let n = shape.total() as usize;
    let mut out = Vec::new();
    let mut images: Vec<u32> = (1..=n as u32).collect();
    let mut stack = Vec::new();
    heaps(&mut images, n, &mut |imgs| {
        let perm = Permutation::one_based(imgs).expect("valid images");
        let cycles = perm.cycles();
        for grouping in set_partitions(cycles.len()) {
            let blocks: Vec<Vec<u32>> = grouping
                .iter()
                .map(|grp| {
                    let mut b: Vec<u32> =
                        grp.iter().flat_map(|&ci| cycles[ci].iter().copied()).collect();
                    b.sort_unstable();
                    b
                })
                .collect();
            let part = SetPartition::from_blocks(&blocks).expect("cycle blocks");
            let pp = PartitionedPermutation::new(part, perm.clone()).expect("coarsening");
            if is_psnc(&pp, shape).expect("same ground") {
                stack.push(pp);
            }
        }
    });
    out.append(&mut stack);
    out.sort();
    Ok(out)
}

fn heaps(items: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == 1 {
        f(items);
        return;
    }
    for i in 0..k {
        heaps(items, k - 1, f);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// All partitions of `{0..k-1}` as lists of groups.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for smaller in set_partitions(k - 1) {
        for i in 0..smaller.len() {
            let mut next = smaller.clone();
            next[i].push(k - 1);
            out.push(next);
        }
        let mut next = smaller;
        next.push(vec![k - 1]);
        out.push(next);
    }
    out
}

fn enumerate_structural(shape: &GammaShape, cap: u32) -> Result<Vec<PartitionedPermutation>> {
    let mut out = Vec::new();
    match shape.circles() {
        1 => {
            for pi in enumerate_snc(shape, cap)? {
                out.push(PartitionedPermutation::from_perm(pi));
            }
        }
        2 => {
            for pi in enumerate_snc(shape, cap)? {
                out.push(PartitionedPermutation::from_perm(pi));
            }
            let (a, b) = (shape.sizes()[0], shape.sizes()[1]);
            let (sa, _) = shape.circle_span(0);
            let (sb, _) = shape.circle_span(1);
            let discs_a = discs(a, sa, cap)?;
            let discs_b = discs(b, sb, cap)?;
            for pa in &discs_a {
                for pb in &discs_b {
                    let pi = disjoint_union(shape, &[pa, pb]);
                    for ca in pa.cycles() {
                        for cb in pb.cycles() {
                            out.push(mark(&pi, &[vec![ca[0], cb[0]]]));
                        }
                    }
                }
            }
        }
        3 => {
            // Connected
            for pi in enumerate_snc(shape, cap)? {
                out.push(PartitionedPermutation::from_perm(pi));
            }
            // OneMarked: annular pair on two circles × disc on the third
            for third in 0..3 {
                let (i1, i2) = match third {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let pair_shape = GammaShape::new(&[shape.sizes()[i1], shape.sizes()[i2]])?;
                let targets: Vec<u32> = span(shape, i1).chain(span(shape, i2)).collect();
                let (sd, _) = shape.circle_span(third);
                for sigma in enumerate_snc(&pair_shape, cap)? {
                    let embedded = embed(&sigma, &targets);
                    for tau in &discs(shape.sizes()[third], sd, cap)? {
                        let pi = disjoint_union(shape, &[&embedded, tau]);
                        for c1 in embedded.cycles() {
                            for c2 in tau.cycles() {
                                out.push(mark(&pi, &[vec![c1[0], c2[0]]]));
                            }
                        }
                    }
                }
            }
            // disc × disc × disc with two or three marked cycles
            let spans: Vec<u32> = (0..3).map(|i| shape.circle_span(i).0).collect();
            let d: Vec<Vec<Permutation>> = (0..3)
                .map(|i| discs(shape.sizes()[i], spans[i], cap))
                .collect::<Result<_>>()?;
            for p0 in &d[0] {
                for p1 in &d[1] {
                    for p2 in &d[2] {
                        let pi = disjoint_union(shape, &[p0, p1, p2]);
                        let cy: Vec<Vec<Vec<u32>>> =
                            vec![p0.cycles(), p1.cycles(), p2.cycles()];
                        // OneMarked3: one cycle from each circle in a single block
                        for c0 in &cy[0] {
                            for c1 in &cy[1] {
                                for c2 in &cy[2] {
                                    out.push(mark(&pi, &[vec![c0[0], c1[0], c2[0]]]));
                                }
                            }
                        }
                        // TwoMarked2x2: middle circle j contributes two distinct
                        // cycles, one paired into each side block
                        for j in 0..3 {
                            let (a, b) = match j {
                                0 => (1, 2),
                                1 => (0, 2),
                                _ => (0, 1),
                            };
                            for ca in &cy[a] {
                                for cb in &cy[b] {
                                    for cj1 in &cy[j] {
                                        for cj2 in &cy[j] {
                                            if cj1[0] == cj2[0] {
                                                continue;
                                            }
                                            out.push(mark(
                                                &pi,
                                                &[vec![ca[0], cj1[0]], vec![cj2[0], cb[0]]],
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out.sort();
    Ok(out)
}

fn span(shape: &GammaShape, i: usize) -> std::ops::RangeInclusive<u32> {
    let (a, b) = shape.circle_span(i);
    a..=b
}

/// NC(m) embedded at consecutive labels starting from `start`.
fn discs(m: u32, start: u32, cap: u32) -> Result<Vec<Permutation>> {
    let base = enumerate_snc(&GammaShape::new(&[m])?, cap)?;
    let targets: Vec<u32> = (start..start + m).collect();
    Ok(base.iter().map(|p| embed(p, &targets)).collect())
}

/// Relabels a permutation on [1..=k] onto the sorted label list `targets`.
fn embed(perm: &Permutation, targets: &[u32]) -> Permutation {
    let cycles: Vec<Vec<u32>> = perm
        .cycles()
        .into_iter()
        .map(|c| c.into_iter().map(|x| targets[x as usize - 1]).collect())
        .collect();
    Permutation::from_cycles(targets, &cycles).expect("relabeled cycles")
}

/// Combines permutations with disjoint supports into one on the full ground.
fn disjoint_union(shape: &GammaShape, parts: &[&Permutation]) -> Permutation {
    let labels: Vec<u32> = (1..=shape.total()).collect();
    let mut cycles = Vec::new();
    for p in parts {
        cycles.extend(p.cycles());
    }
    Permutation::from_cycles(&labels, &cycles).expect("disjoint cycles")
}

/// (V, π) with V = 0_π coarsened by the given representative groups.
fn mark(pi: &Permutation, groups: &[Vec<u32>]) -> PartitionedPermutation {
    let part = pi.orbit_partition().merge(groups).expect("cycle representatives");
    PartitionedPermutation::new(part, pi.clone()).expect("coarsening of cycles")
}

type PsncCache = Mutex<HashMap<Vec<u32>, Arc<Vec<PartitionedPermutation>>>>;

/// Cached structural enumeration, shared by the summation paths.
pub(crate) fn psnc_cached(shape: &GammaShape, cap: u32) -> Result<Arc<Vec<PartitionedPermutation>>> {
    static CACHE: OnceLock<PsncCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(found) = cache.lock().unwrap().get(shape.sizes()) {
        return Ok(found.clone());
    }
    let list = Arc::new(enumerate_psnc(shape, EnumMode::Structural, u32::MAX, cap)?);
    cache.lock().unwrap().insert(shape.sizes().to_vec(), list.clone());
    Ok(list)
}

/// The lift π_{\vec n}: glue the consecutive runs T_i of lengths `sizes`
/// following the cycles of π.
pub fn lift_perm(pi: &Permutation, sizes: &[u32]) -> Result<Permutation> {
    let m = pi.size();
    if sizes.len() != m || pi.ground() != (1..=m as u32).collect::<Vec<_>>() {
        return Err(Error::SizesMismatch);
    }
    if sizes.contains(&0) {
        return Err(Error::EmptyCircle);
    }
    let total: u32 = sizes.iter().sum();
    if total as usize > MAX_GROUND {
        return Err(Error::GroundTooLarge(total as usize));
    }
    let mut psum = vec![0u32; m + 1];
    for (i, &s) in sizes.iter().enumerate() {
        psum[i + 1] = psum[i] + s;
    }
    let mut images = Vec::with_capacity(total as usize);
    for i in 1..=m {
        for x in psum[i - 1] + 1..=psum[i] {
            if x < psum[i] {
                images.push(x + 1);
            } else {
                // last element of T_i goes to the first element of T_{π(i)}
                let j = pi.apply(i as u32)? as usize;
                images.push(psum[j - 1] + 1);
            }
        }
    }
    Permutation::one_based(&images)
}

/// The lift (V_{\vec n}, π_{\vec n}): blocks follow the glued cycles.
pub fn lift_pp(pp: &PartitionedPermutation, sizes: &[u32]) -> Result<PartitionedPermutation> {
    let perm = lift_perm(pp.perm(), sizes)?;
    let mut psum = vec![0u32; sizes.len() + 1];
    for (i, &s) in sizes.iter().enumerate() {
        psum[i + 1] = psum[i] + s;
    }
    let blocks: Vec<Vec<u32>> = pp
        .part()
        .blocks()
        .into_iter()
        .map(|b| {
            let mut nb = Vec::new();
            for &i in &b {
                nb.extend(psum[i as usize - 1] + 1..=psum[i as usize]);
            }
            nb.sort_unstable();
            nb
        })
        .collect();
    let part = SetPartition::from_blocks(&blocks)?;
    PartitionedPermutation::new(part, perm)
}

/// True when the pair is (1, γ), the top element excluded by the
/// moment-to-cumulant recursion.
pub fn is_top(pp: &PartitionedPermutation, shape: &GammaShape) -> bool {
    pp.part().is_full() && *pp.perm() == shape.gamma()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annular::{is_annular_noncrossing, separates};

    fn shape(s: &str) -> GammaShape {
        s.parse().unwrap()
    }

    fn pp(part: &str, perm: &str) -> PartitionedPermutation {
        PartitionedPermutation::new(part.parse().unwrap(), perm.parse().unwrap()).unwrap()
    }

    #[test]
    fn length_examples() {
        let g222 = shape("2,2,2").gamma();
        let top = PartitionedPermutation::new(
            SetPartition::full(g222.ground()).unwrap(),
            g222.clone(),
        )
        .unwrap();
        assert_eq!(top.length(), 7);
        assert_eq!(top.length(), g222.length() + 4);
        let id3 = Permutation::identity(&[1, 2, 3]).unwrap();
        let t3 = PartitionedPermutation::new(SetPartition::full(&[1, 2, 3]).unwrap(), id3).unwrap();
        assert_eq!(t3.length(), 4);
        let pi: Permutation = "(1,2,3)".parse().unwrap();
        let zero = PartitionedPermutation::from_perm(pi.clone());
        assert_eq!(zero.length(), pi.length());
    }

    #[test]
    fn invalid_partition_rejected() {
        let part: SetPartition = "{1,2}{3}".parse().unwrap();
        let perm: Permutation = "(1,3)(2)".parse().unwrap();
        assert!(matches!(
            PartitionedPermutation::new(part, perm),
            Err(Error::NotAboveCycles)
        ));
    }

    #[test]
    fn membership_examples() {
        // a OneMarked member of PS_NC(8,4,3): an annular pair on the first
        // two circles joined to a disc cycle on the third
        let member = pp(
            "{1,2,8,9,12}{3,4}{5,10,11,13,15}{6}{7}{14}",
            "(1,2,12,9,8)(3,4)(5,10,11)(6)(7)(13,15)(14)",
        );
        let s843 = shape("8,4,3");
        assert!(is_psnc(&member, &s843).unwrap());
        assert_eq!(classify(&member, &s843).unwrap(), PSClass::OneMarked);

        let s111 = shape("1,1,1");
        let top = pp("{1,2,3}", "(1)(2)(3)");
        assert!(is_psnc(&top, &s111).unwrap());
        assert_eq!(classify(&top, &s111).unwrap(), PSClass::OneMarked3);

        let discrete = pp("{1}{2}{3}", "(1)(2)(3)");
        assert!(!is_psnc(&discrete, &s111).unwrap());

        let conn = PartitionedPermutation::from_perm("(1,2,3)".parse().unwrap());
        assert_eq!(classify(&conn, &s111).unwrap(), PSClass::Connected);
    }

    #[test]
    fn enumerate_111() {
        let got = enumerate_psnc(&shape("1,1,1"), EnumMode::Brute, 7, 12).unwrap();
        assert_eq!(got.len(), 6);
        let mut counts = std::collections::BTreeMap::new();
        for member in &got {
            *counts.entry(classify(member, &shape("1,1,1")).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.get(&PSClass::Connected), Some(&2));
        assert_eq!(counts.get(&PSClass::OneMarked), Some(&3));
        assert_eq!(counts.get(&PSClass::OneMarked3), Some(&1));
        assert_eq!(counts.get(&PSClass::TwoMarked2x2), None);
    }

    #[test]
    fn modes_agree() {
        for shp in ["1", "2", "3", "4", "1,1", "2,1", "2,2", "1,1,1", "2,1,1", "1,2,1", "2,2,1"] {
            let shp = shape(shp);
            let brute = enumerate_psnc(&shp, EnumMode::Brute, 7, 12).unwrap();
            let structural = enumerate_psnc(&shp, EnumMode::Structural, 7, 12).unwrap();
            assert_eq!(brute, structural, "shape {shp}");
        }
    }

    #[test]
    fn frozen_psnc_counts() {
        for (shp, want) in [
            ("2,1", 7usize),
            ("2,2", 27),
            ("1,1,1", 6),
            ("2,1,1", 32),
            ("1,2,1", 32),
            ("2,2,1", 165),
            ("2,2,2", 837),
            ("3,2,1", 776),
        ] {
            let got = enumerate_psnc(&shape(shp), EnumMode::Structural, 7, 12).unwrap();
            assert_eq!(got.len(), want, "shape {shp}");
        }
    }

    #[test]
    fn one_circle_members_are_nc() {
        for member in enumerate_psnc(&shape("4"), EnumMode::Structural, 7, 12).unwrap() {
            assert_eq!(member.part(), &member.perm().orbit_partition());
            assert!(is_annular_noncrossing(member.perm(), &shape("4")).unwrap());
        }
    }

    #[test]
    fn classify_total_and_unique() {
        let shp = shape("2,2,1");
        for member in enumerate_psnc(&shp, EnumMode::Structural, 7, 12).unwrap() {
            classify(&member, &shp).unwrap();
        }
    }

    #[test]
    fn lift_worked_example() {
        let sizes = [2u32, 1, 4, 5, 3, 2, 1];
        let pi: Permutation = "(1,2,3)(4,5)(6)(7)".parse().unwrap();
        let lifted = lift_perm(&pi, &sizes).unwrap();
        assert_eq!(
            lifted.to_string(),
            "(1,2,3,4,5,6,7)(8,9,10,11,12,13,14,15)(16,17)(18)"
        );
        let part: SetPartition = "{1,2,3,6}{4,5,7}".parse().unwrap();
        let vp = PartitionedPermutation::new(part, pi).unwrap();
        let lifted_vp = lift_pp(&vp, &sizes).unwrap();
        assert_eq!(
            lifted_vp.part().to_string(),
            "{1,2,3,4,5,6,7,16,17}{8,9,10,11,12,13,14,15,18}"
        );
    }

    #[test]
    fn lift_identity_sizes() {
        let pi: Permutation = "(1,3,2)(4)".parse().unwrap();
        assert_eq!(lift_perm(&pi, &[1, 1, 1, 1]).unwrap(), pi);
    }

    #[test]
    fn lift_preserves_membership_and_class() {
        // every sizes vector with total <= 10 over the (1,1,1) members,
        // and a sample over (2,1,1)
        let low = shape("1,1,1");
        let members = enumerate_psnc(&low, EnumMode::Structural, 7, 12).unwrap();
        for total in 3..=10u32 {
            for sizes in compositions_of(total, 3) {
                let hi = GammaShape::new(&sizes).unwrap();
                for member in &members {
                    let lifted = lift_pp(member, &sizes).unwrap();
                    assert!(is_psnc(&lifted, &hi).unwrap(), "member {member:?} sizes {sizes:?}");
                    assert_eq!(
                        classify(member, &low).unwrap(),
                        classify(&lifted, &hi).unwrap(),
                        "class preserved for {member:?}"
                    );
                }
            }
        }
        let low = shape("2,1,1");
        let members = enumerate_psnc(&low, EnumMode::Structural, 7, 12).unwrap();
        for sizes in [[2u32, 1, 2, 1], [1, 2, 2, 2], [2, 2, 2, 2]] {
            let grouped = [sizes[0] + sizes[1], sizes[2], sizes[3]];
            let hi = GammaShape::new(&grouped).unwrap();
            for member in &members {
                let lifted = lift_pp(member, &sizes).unwrap();
                assert!(is_psnc(&lifted, &hi).unwrap());
            }
        }
    }

    fn compositions_of(total: u32, parts: u32) -> Vec<Vec<u32>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        let mut out = Vec::new();
        for first in 1..=total - (parts - 1) {
            for rest in compositions_of(total - first, parts - 1) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn lift_cycle_count_identities() {
        // #(π) = #(π_{\vec n}) and #(π⁻¹γ_low) + total = #(π_lift⁻¹γ_hi) + m
        for grouping in [[1u32, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2]] {
            let m: u32 = grouping.iter().sum();
            let low = GammaShape::new(&grouping).unwrap();
            let glow = low.gamma();
            for sizes in compositions(m as usize, 9) {
                let total: u32 = sizes.iter().sum();
                let hi_sizes = [
                    sizes[..grouping[0] as usize].iter().sum::<u32>(),
                    sizes[grouping[0] as usize..(grouping[0] + grouping[1]) as usize]
                        .iter()
                        .sum::<u32>(),
                    sizes[(grouping[0] + grouping[1]) as usize..].iter().sum::<u32>(),
                ];
                let hi = GammaShape::new(&hi_sizes).unwrap();
                let ghi = hi.gamma();
                for pi in all_perms(m as usize) {
                    let lifted = lift_perm(&pi, &sizes).unwrap();
                    assert_eq!(pi.cycle_count(), lifted.cycle_count());
                    let low_rho = pi.inverse().compose(&glow).unwrap().cycle_count();
                    let hi_rho = lifted.inverse().compose(&ghi).unwrap().cycle_count();
                    assert_eq!(low_rho + total as usize, hi_rho + m as usize);
                }
            }
        }
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        fn rec(images: &mut Vec<u32>, k: usize, out: &mut Vec<Permutation>) {
            if k == images.len() {
                out.push(Permutation::one_based(images).unwrap());
                return;
            }
            for i in k..images.len() {
                images.swap(k, i);
                rec(images, k + 1, out);
                images.swap(k, i);
            }
        }
        let mut images: Vec<u32> = (1..=n as u32).collect();
        let mut out = Vec::new();
        rec(&mut images, 0, &mut out);
        out
    }

    /// Compositions of any total ≤ max_total into exactly `parts` positive parts.
    fn compositions(parts: usize, max_total: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![1u32; parts];
        loop {
            if current.iter().sum::<u32>() <= max_total {
                out.push(current.clone());
            }
            // odometer over entries 1..=max_total
            let mut i = 0;
            loop {
                if i == parts {
                    return out;
                }
                current[i] += 1;
                if current[i] <= max_total {
                    break;
                }
                current[i] = 1;
                i += 1;
            }
        }
    }

    #[test]
    fn lift_then_separation_projects() {
        // σ ≤ π_lift with σ⁻¹π_lift separating N forces σ⁻¹γ|_N = π_lift⁻¹γ|_N
        for (sizes, markers) in [
            ([2u32, 1, 2], vec![2u32, 3, 5]),
            ([2, 2, 1], vec![2, 4, 5]),
            ([1, 2, 2], vec![1, 3, 5]),
        ] {
            lift_separation_case(&sizes, &markers);
        }
    }

    fn lift_separation_case(sizes: &[u32; 3], markers: &[u32]) {
        let hi = GammaShape::new(sizes).unwrap();
        let ghi = hi.gamma();
        for pi in enumerate_snc(&shape("1,1,1"), 12).unwrap() {
            let lifted = lift_perm(&pi, sizes).unwrap();
            for sigma in enumerate_snc(&hi, 12).unwrap() {
                if !crate::annular::leq(&sigma, &lifted).unwrap() {
                    continue;
                }
                let mix = sigma.inverse().compose(&lifted).unwrap();
                if !separates(&mix, markers).unwrap() {
                    continue;
                }
                let left = sigma.inverse().compose(&ghi).unwrap().restrict(markers).unwrap();
                let right = lifted.inverse().compose(&ghi).unwrap().restrict(markers).unwrap();
                assert_eq!(left, right);
            }
        }
    }
}

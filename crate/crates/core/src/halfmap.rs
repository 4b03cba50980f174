//! Parity-reversing permutations and the half/double maps between doubled
//! circles and the original index set, together with the partitioned
//! version.

use crate::error::{Error, Result};
use crate::partitioned::PartitionedPermutation;
use crate::perm::{GammaShape, Permutation, SetPartition};

/// True when every image flips parity; ground must be `[1..=2m]`.
pub fn is_parity_reversing(pi: &Permutation) -> Result<bool> {
    let n = pi.size();
    if !n.is_multiple_of(2) || pi.ground() != (1..=n as u32).collect::<Vec<_>>() {
        return Err(Error::OddCircle);
    }
    for x in 1..=n as u32 {
        if pi.apply(x)? % 2 == x % 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn doubled(shape: &GammaShape) -> Result<GammaShape> {
    if shape.sizes().iter().any(|&m| m % 2 != 0) {
        return Err(Error::OddCircle);
    }
    Ok(shape.clone())
}

/// Checks the pointwise separation criterion π(2k) = γ(2k); returns the
/// first failing even position otherwise.
fn check_separated(pi: &Permutation, shape: &GammaShape) -> Result<()> {
    let gamma = shape.gamma();
    for k in 1..=pi.size() as u32 / 2 {
        if pi.apply(2 * k)? != gamma.apply(2 * k)? {
            return Err(Error::NotSeparated(2 * k));
        }
    }
    Ok(())
}

/// The half map: for a parity-reversing π on doubled circles with
/// γπ⁻¹ separating the odd positions, π̌(k) = π(π(2k))/2.
pub fn half(pi: &Permutation, shape: &GammaShape) -> Result<Permutation> {
    let shape = doubled(shape)?;
    if pi.size() as u32 != shape.total() {
        return Err(Error::GroundMismatch);
    }
    if !is_parity_reversing(pi)? {
        return Err(Error::NotParityReversing);
    }
    check_separated(pi, &shape)?;
    let m = pi.size() / 2;
    let images: Vec<u32> = (1..=m as u32)
        .map(|k| Ok(pi.apply(pi.apply(2 * k)?)? / 2))
        .collect::<Result<_>>()?;
    Permutation::one_based(&images)
}

/// The double map: π̂(2k) = γ(2k) and π̂(γ(2k)) = 2σ(k); the inverse of the
/// half map onto its image.
pub fn double(sigma: &Permutation, shape: &GammaShape) -> Result<Permutation> {
    let shape = doubled(shape)?;
    let m = shape.total() as usize / 2;
    if sigma.size() != m || sigma.ground() != (1..=m as u32).collect::<Vec<_>>() {
        return Err(Error::GroundMismatch);
    }
    let gamma = shape.gamma();
    let n = shape.total() as usize;
    let mut images = vec![0u32; n];
    for k in 1..=m as u32 {
        let g2k = gamma.apply(2 * k)?;
        images[2 * k as usize - 1] = g2k;
        images[g2k as usize - 1] = 2 * sigma.apply(k)?;
    }
    Permutation::one_based(&images)
}

/// Transport of the blocks along the half map: blocks keep the cycles'
/// correspondence, realized on the even positions halved.
pub fn half_pp(pp: &PartitionedPermutation, shape: &GammaShape) -> Result<PartitionedPermutation> {
    let perm = half(pp.perm(), shape)?;
    let blocks: Vec<Vec<u32>> = pp
        .part()
        .blocks()
        .into_iter()
        .map(|b| b.iter().filter(|&&x| x % 2 == 0).map(|&x| x / 2).collect())
        .collect();
    let part = SetPartition::from_blocks(&blocks)?;
    PartitionedPermutation::new(part, perm)
}

/// Transport of the blocks along the double map.
pub fn double_pp(
    pp: &PartitionedPermutation,
    shape: &GammaShape,
) -> Result<PartitionedPermutation> {
    let perm = double(pp.perm(), shape)?;
    let gamma = doubled(shape)?.gamma();
    let blocks: Vec<Vec<u32>> = pp
        .part()
        .blocks()
        .into_iter()
        .map(|b| {
            let mut nb = Vec::new();
            for &k in &b {
                nb.push(2 * k);
                nb.push(gamma.apply(2 * k).expect("even label"));
            }
            nb.sort_unstable();
            nb
        })
        .collect();
    let part = SetPartition::from_blocks(&blocks)?;
    PartitionedPermutation::new(part, perm)
}

/// All parity-reversing permutations on the doubled shape whose γπ⁻¹
/// separates the odd positions. By the bijection with S_{Σrᵢ} there are
/// exactly (Σrᵢ)! of them.
pub fn separated_parity_reversing(shape: &GammaShape) -> Result<Vec<Permutation>> {
    let shape = doubled(shape)?;
    let m = shape.total() as usize / 2;
    let mut out = Vec::new();
    let mut images: Vec<u32> = (1..=m as u32).collect();
    heaps(&mut images, m, &mut |imgs| {
        let sigma = Permutation::one_based(imgs).expect("images");
        out.push(double(&sigma, &shape).expect("double"));
    });
    out.sort();
    Ok(out)
}

fn heaps(items: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k <= 1 {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annular::separates;
    use crate::partitioned::{classify, enumerate_psnc, is_psnc, EnumMode};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn shape(s: &str) -> GammaShape {
        s.parse().unwrap()
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

    #[test]
    fn parity_examples() {
        assert!(is_parity_reversing(&p("(1,2)")).unwrap());
        assert!(!is_parity_reversing(&p("(1,3)(2,4)")).unwrap());
        assert!(is_parity_reversing(&p("(1,2)(3,4)(5,6)")).unwrap());
        assert!(is_parity_reversing(&p("(1)(2)(3)")).is_err());
    }

    #[test]
    fn half_and_double_examples() {
        let s222 = shape("2,2,2");
        let pi = p("(1,2)(3,4)(5,6)");
        assert!(half(&pi, &s222).unwrap().is_identity());
        let id3 = Permutation::identity(&[1, 2, 3]).unwrap();
        assert_eq!(double(&id3, &s222).unwrap(), pi);
        for sigma in all_perms(3) {
            let d = double(&sigma, &s222).unwrap();
            assert!(is_parity_reversing(&d).unwrap());
            assert_eq!(half(&d, &s222).unwrap(), sigma, "half∘double = id");
            assert_eq!(d.cycle_count(), sigma.cycle_count(), "#π = #π̌");
        }
    }

    #[test]
    fn half_rejects_bad_input() {
        let s222 = shape("2,2,2");
        // parity reversing but not separated: 2 ↦ 5 instead of γ(2)=1
        let pi = p("(1,2,5,6)(3,4)");
        assert!(is_parity_reversing(&pi).unwrap());
        assert!(matches!(half(&pi, &s222), Err(Error::NotSeparated(2))));
        assert!(half(&p("(1,3)(2,4)"), &shape("2,2")).is_err());
        assert!(half(&p("(1,2)"), &shape("1,1")).is_err());
    }

    #[test]
    fn separated_count_is_factorial() {
        // |{π ∈ S⁻ with separation}| = (Σ rᵢ)! for doubled totals ≤ 10
        for (shp, fact) in [("2,2", 2u64), ("2,2,2", 6), ("4,2", 6), ("4,2,2", 24), ("2,4,4", 120)]
        {
            let shp = shape(shp);
            let fast = separated_parity_reversing(&shp).unwrap();
            assert_eq!(fast.len() as u64, fact, "shape {shp}");
            // cross-check against a brute scan for the smaller shapes
            if shp.total() <= 6 {
                let gamma = shp.gamma();
                let odd: Vec<u32> = (1..=shp.total()).step_by(2).collect();
                let brute: Vec<Permutation> = all_perms(shp.total() as usize)
                    .into_iter()
                    .filter(|pi| {
                        is_parity_reversing(pi).unwrap()
                            && separates(&gamma.compose(&pi.inverse()).unwrap(), &odd).unwrap()
                    })
                    .collect();
                let mut brute = brute;
                brute.sort();
                assert_eq!(fast, brute, "shape {shp}");
            }
        }
    }

    #[test]
    fn cycle_identities_hold() {
        let s42 = shape("4,2");
        let gamma = s42.gamma();
        let half_shape = shape("2,1");
        let half_gamma = half_shape.gamma();
        for pi in separated_parity_reversing(&s42).unwrap() {
            let hv = half(&pi, &s42).unwrap();
            assert_eq!(pi.cycle_count(), hv.cycle_count());
            // #(γ π̌⁻¹) + Σrᵢ = #(γ π⁻¹) on the doubled side
            let big = gamma.compose(&pi.inverse()).unwrap().cycle_count();
            let small = half_gamma.compose(&hv.inverse()).unwrap().cycle_count();
            assert_eq!(small + 3, big);
            // γπ⁻¹(2k) = 2l iff γ̌π̌⁻¹(k) = l
            let big_rho = gamma.compose(&pi.inverse()).unwrap();
            for k in 1..=3u32 {
                let want = 2 * half_gamma.compose(&hv.inverse()).unwrap().apply(k).unwrap();
                assert_eq!(big_rho.apply(2 * k).unwrap(), want);
            }
        }
    }

    #[test]
    fn partitioned_bijection_onto_psnc() {
        // members of PS⁻_NC(2,2,2) with separation ↔ PS_NC(1,1,1)
        let s222 = shape("2,2,2");
        let s111 = shape("1,1,1");
        let odd: Vec<u32> = vec![1, 3, 5];
        let gamma = s222.gamma();
        let mut separated_members = Vec::new();
        for member in enumerate_psnc(&s222, EnumMode::Structural, 7, 12).unwrap() {
            let pi = member.perm();
            if is_parity_reversing(pi).unwrap_or(false)
                && separates(&gamma.compose(&pi.inverse()).unwrap(), &odd).unwrap()
            {
                separated_members.push(member);
            }
        }
        let target = enumerate_psnc(&s111, EnumMode::Structural, 7, 12).unwrap();
        assert_eq!(separated_members.len(), target.len());
        assert_eq!(target.len(), 6);
        for member in &separated_members {
            let halved_pp = half_pp(member, &s222).unwrap();
            assert!(is_psnc(&halved_pp, &s111).unwrap(), "image in PS_NC(1,1,1)");
            let back = double_pp(&halved_pp, &s222).unwrap();
            assert_eq!(&back, member, "double∘half = id");
            // classes carried over
            assert_eq!(
                classify(member, &s222).unwrap(),
                classify(&halved_pp, &s111).unwrap()
            );
        }
        // and the other direction: every PS_NC(1,1,1) member doubles in
        for member in &target {
            let doubled_pp = double_pp(member, &s222).unwrap();
            assert!(is_psnc(&doubled_pp, &s222).unwrap());
            assert_eq!(&half_pp(&doubled_pp, &s222).unwrap(), member);
        }
    }
}

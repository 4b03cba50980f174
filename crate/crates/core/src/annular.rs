//! Non-crossing predicates, separation, the partial orders ≤ and ≲⁽ʳ⁾, and
//! enumeration of S_NC(m₁,…,m_r).

use crate::backtrack::{Config, Engine};
use crate::error::{Error, Result};
use crate::perm::{GammaShape, Permutation, SetPartition};

/// Euler-characteristic test against an arbitrary reference permutation on
/// the same ground set: `π ∨ γ = 1` and `#π + #(π⁻¹γ) + #γ = |M| + 2`.
pub fn is_noncrossing_wrt(pi: &Permutation, gamma: &Permutation) -> Result<bool> {
    if !pi.same_ground(gamma) {
        return Err(Error::GroundMismatch);
    }
    let joined = pi.orbit_partition().join(&gamma.orbit_partition())?;
    if !joined.is_full() {
        return Ok(false);
    }
    let rho = pi.inverse().compose(gamma)?;
    Ok(pi.cycle_count() + rho.cycle_count() + gamma.cycle_count() == pi.size() + 2)
}

/// Membership in S_NC(m₁,…,m_r); `pi` must live on `[1..=m₁+⋯+m_r]`.
pub fn is_annular_noncrossing(pi: &Permutation, shape: &GammaShape) -> Result<bool> {
    let gamma = shape.gamma();
    if pi.ground() != gamma.ground() {
        return Err(Error::GroundMismatch);
    }
    is_noncrossing_wrt(pi, &gamma)
}

/// True when no cycle of `rho` contains two elements of `points`.
pub fn separates(rho: &Permutation, points: &[u32]) -> Result<bool> {
    for &x in points {
        if !rho.ground().contains(&x) {
            return Err(Error::NotInGround(x));
        }
    }
    for cycle in rho.cycles() {
        let hits = cycle.iter().filter(|x| points.contains(x)).count();
        if hits > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The partial order on permutations: every cycle of `pi` is contained in a
/// cycle of `sigma` and the enclosed cycles are non-crossing within it.
pub fn leq(pi: &Permutation, sigma: &Permutation) -> Result<bool> {
    if !pi.same_ground(sigma) {
        return Err(Error::GroundMismatch);
    }
    if !pi.orbit_partition().leq(&sigma.orbit_partition())? {
        return Ok(false);
    }
    for cycle in sigma.cycles() {
        let pc = pi.restrict(&cycle)?;
        let sc = sigma.restrict(&cycle)?;
        if !is_noncrossing_wrt(&pc, &sc)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The relation ≲⁽ʳ⁾: on every block of π∨σ the restriction of π is
/// non-crossing with respect to the restriction of σ. Returns
/// `r = #σ − #(π∨σ)` when the relation holds.
pub fn lesssim_r(pi: &Permutation, sigma: &Permutation) -> Result<Option<u32>> {
    if !pi.same_ground(sigma) {
        return Err(Error::GroundMismatch);
    }
    let blocks = pi.orbit_partition().join(&sigma.orbit_partition())?;
    for block in blocks.blocks() {
        let pb = pi.restrict(&block)?;
        let sb = sigma.restrict(&block)?;
        if !is_noncrossing_wrt(&pb, &sb)? {
            return Ok(None);
        }
    }
    Ok(Some((sigma.cycle_count() - blocks.block_count()) as u32))
}

/// Partition of the circle indices `[1..=r]`: `i` and `j` are joined when a
/// single cycle of `sigma` meets both marker sets.
pub type ConnectivityPattern = SetPartition;

/// Computes the connectivity pattern of `sigma` over per-circle marker sets.
/// `markers[i]` must lie inside circle `i`; the ground of `sigma` must
/// contain every marker (it may be a subset of the shape's ground).
pub fn connectivity_pattern(
    sigma: &Permutation,
    shape: &GammaShape,
    markers: &[Vec<u32>],
) -> Result<ConnectivityPattern> {
    if markers.len() != shape.circles() {
        return Err(Error::SizesMismatch);
    }
    let mut seen = std::collections::BTreeSet::new();
    for (i, ms) in markers.iter().enumerate() {
        for &x in ms {
            if shape.circle_of(x)? != i {
                return Err(Error::MarkerOutsideCircle(x));
            }
            if !seen.insert(x) {
                return Err(Error::MarkerOutsideCircle(x));
            }
            if !sigma.ground().contains(&x) {
                return Err(Error::NotInGround(x));
            }
        }
    }
    let r = shape.circles();
    let mut parent: Vec<usize> = (0..r).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    for cycle in sigma.cycles() {
        let hit: Vec<usize> = (0..r)
            .filter(|&i| markers[i].iter().any(|x| cycle.contains(x)))
            .collect();
        for &i in hit.iter().skip(1) {
            let (a, b) = (find(&mut parent, hit[0]), find(&mut parent, i));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); r];
    for i in 0..r {
        blocks[find(&mut parent, i)].push(i as u32 + 1);
    }
    blocks.retain(|b| !b.is_empty());
    SetPartition::from_blocks(&blocks)
}

/// Streams S_NC(shape) in lexicographic image order.
pub fn for_each_snc(shape: &GammaShape, cap: u32, mut f: impl FnMut(&Permutation)) -> Result<()> {
    if shape.total() > cap {
        return Err(Error::CapExceeded { cap, needed: shape.total() });
    }
    let n = shape.total() as usize;
    let labels: Vec<u32> = (1..=n as u32).collect();
    let mut engine = Engine::new(Config::plain(shape, 0));
    engine.run(&mut |leaf| {
        let perm = Permutation::from_internal(labels.clone(), leaf.image.to_vec());
        f(&perm);
    });
    Ok(())
}

/// Collects S_NC(shape); for a single circle this is NC(n).
pub fn enumerate_snc(shape: &GammaShape, cap: u32) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for_each_snc(shape, cap, |p| out.push(p.clone()))?;
    Ok(out)
}

pub fn count_snc(shape: &GammaShape, cap: u32) -> Result<u64> {
    let mut count = 0;
    for_each_snc(shape, cap, |_| count += 1)?;
    Ok(count)
}

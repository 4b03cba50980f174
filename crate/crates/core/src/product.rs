//! Cumulants of products: the separation-filtered summation over PS_NC for
//! orders 1, 2 and 3, the independent moment-extraction oracle, and the
//! combinatorial bijections behind the proof as executable checks.

use std::collections::BTreeMap;

use crate::annular::{connectivity_pattern, enumerate_snc, leq, lesssim_r, separates};
use crate::dist::{psnc_sum, psnc_sum_stats, Distribution, GroupedWord, KappaExtractor, Ratio, Symbol};
use crate::error::{Error, Result};
use crate::partitioned::{
    classify, enumerate_psnc, is_top, lift_perm, lift_pp, EnumMode, PSClass,
    PartitionedPermutation,
};
use crate::perm::{GammaShape, Permutation};

/// Block sizes n₁,…,n_{r+s+t} of the product grouping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SizesVector {
    sizes: Vec<u32>,
}

impl SizesVector {
    pub fn new(sizes: &[u32]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::EmptyCircle);
        }
        Ok(SizesVector { sizes: sizes.to_vec() })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.sizes.iter().sum()
    }

    /// The separation markers N = {n₁, n₁+n₂, …}.
    pub fn markers(&self) -> Vec<u32> {
        let mut acc = 0;
        self.sizes
            .iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect()
    }
}

/// The grouping (r, s, t); s and t may be zero for the lower-order formulas,
/// with t = 0 whenever s = 0.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grouping {
    pub r: u32,
    pub s: u32,
    pub t: u32,
}

impl Grouping {
    pub fn new(r: u32, s: u32, t: u32) -> Result<Self> {
        if r == 0 || (s == 0 && t != 0) {
            return Err(Error::SizesMismatch);
        }
        Ok(Grouping { r, s, t })
    }

    pub fn parts(&self) -> u32 {
        self.r + self.s + self.t
    }

    pub fn order(&self) -> usize {
        1 + usize::from(self.s > 0) + usize::from(self.t > 0)
    }

    /// γ_{r,s,t} on the factor indices (dropping zero groups).
    pub fn low_shape(&self) -> Result<GammaShape> {
        let sizes: Vec<u32> = [self.r, self.s, self.t].into_iter().filter(|&x| x > 0).collect();
        GammaShape::new(&sizes)
    }

    /// Totals (p, q, l) of the letter-level circles.
    pub fn group_totals(&self, sizes: &SizesVector) -> Result<Vec<u32>> {
        if sizes.len() != self.parts() as usize {
            return Err(Error::SizesMismatch);
        }
        let s = sizes.sizes();
        let r = self.r as usize;
        let rs = (self.r + self.s) as usize;
        let mut out = vec![s[..r].iter().sum::<u32>()];
        if self.s > 0 {
            out.push(s[r..rs].iter().sum());
        }
        if self.t > 0 {
            out.push(s[rs..].iter().sum());
        }
        Ok(out)
    }

    pub fn product_shape(&self, sizes: &SizesVector) -> Result<GammaShape> {
        GammaShape::new(&self.group_totals(sizes)?)
    }
}

/// κ of products: Σ over (V,π) ∈ PS_NC(p,q,l) with π⁻¹γ separating
/// N = {n₁, n₁+n₂, …} of κ_{(V,π)}[letters]. Degenerate groupings encode
/// the first- and second-order formulas.
pub fn product_cumulant(
    dist: &Distribution,
    letters: &[Symbol],
    sizes: &SizesVector,
    grouping: &Grouping,
    cap: u32,
) -> Result<Ratio> {
    let shape = grouping.product_shape(sizes)?;
    if letters.len() != shape.total() as usize {
        return Err(Error::LettersMismatch { got: letters.len(), want: shape.total() as usize });
    }
    let markers = sizes.markers();
    psnc_sum(dist, letters, &shape, Some(&markers), cap)
}

/// Like [`product_cumulant`] but also reports the number of summed terms.
pub fn product_cumulant_stats(
    dist: &Distribution,
    letters: &[Symbol],
    sizes: &SizesVector,
    grouping: &Grouping,
    cap: u32,
) -> Result<(Ratio, u64)> {
    let shape = grouping.product_shape(sizes)?;
    if letters.len() != shape.total() as usize {
        return Err(Error::LettersMismatch { got: letters.len(), want: shape.total() as usize });
    }
    let markers = sizes.markers();
    psnc_sum_stats(dist, letters, &shape, Some(&markers), cap)
}

/// Independent verification path: introduces fresh product symbols A_i,
/// computes every needed A-word moment by expanding to letter words, and
/// extracts κ_{(1,γ_{r,s,t})} of the A-word by subtractive recursion.
pub fn product_cumulant_oracle(
    dist: &Distribution,
    letters: &[Symbol],
    sizes: &SizesVector,
    grouping: &Grouping,
    oracle_cap: u32,
) -> Result<Ratio> {
    if sizes.len() != grouping.parts() as usize {
        return Err(Error::SizesMismatch);
    }
    if letters.len() != sizes.total() as usize {
        return Err(Error::LettersMismatch { got: letters.len(), want: sizes.total() as usize });
    }
    if sizes.total() > oracle_cap {
        return Err(Error::CapExceeded { cap: oracle_cap, needed: sizes.total() });
    }
    let m = sizes.len();
    let mut runs: Vec<Vec<Symbol>> = Vec::with_capacity(m);
    let mut offset = 0usize;
    for &k in sizes.sizes() {
        runs.push(letters[offset..offset + k as usize].to_vec());
        offset += k as usize;
    }
    let symbols: Vec<Symbol> =
        (1..=m).map(|i| Symbol::new("#product", &format!("A{i}"), false)).collect();
    let index: BTreeMap<Symbol, usize> =
        symbols.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut groups = Vec::new();
    let mut at = 0usize;
    for count in [grouping.r, grouping.s, grouping.t] {
        if count == 0 {
            continue;
        }
        groups.push(symbols[at..at + count as usize].to_vec());
        at += count as usize;
    }
    let a_word = GroupedWord::new(groups)?;
    let provider = |word: &GroupedWord| -> Result<Ratio> {
        let expanded: Vec<Vec<Symbol>> = word
            .groups()
            .iter()
            .map(|g| g.iter().flat_map(|s| runs[index[s]].iter().cloned()).collect())
            .collect();
        crate::dist::phi(dist, &GroupedWord::new(expanded)?, oracle_cap)
    };
    let mut extractor = KappaExtractor::new(provider, oracle_cap);
    extractor.kappa(&a_word)
}

/// One line of the appendix verification: a bijection between two index
/// multisets, checked as exact multiset equality of canonical forms.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: String,
    pub left: usize,
    pub right: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AppendixReport {
    pub lemmas: Vec<LemmaReport>,
}

impl AppendixReport {
    pub fn pass(&self) -> bool {
        self.lemmas.iter().all(|l| l.pass)
    }
}

struct AppendixCtx {
    hi: GammaShape,
    gamma_hi: Permutation,
    markers: Vec<u32>,
    marker_groups: Vec<Vec<u32>>,
}

impl AppendixCtx {
    fn sep(&self, sigma: &Permutation) -> Result<bool> {
        let rho = sigma.inverse().compose(&self.gamma_hi)?;
        separates(&rho, &self.markers)
    }

    /// Connectivity pattern of the cycles of σ⁻¹γ restricted to N, the
    /// quantity the appendix tracks per circle.
    fn pattern_blocks(&self, sigma: &Permutation) -> Result<usize> {
        let rho = sigma.inverse().compose(&self.gamma_hi)?;
        let restricted = rho.restrict(&self.markers)?;
        let pattern = connectivity_pattern(&restricted, &self.hi, &self.marker_groups)?;
        Ok(pattern.block_count())
    }
}

/// Verifies the seven index-set bijections used in the inductive proof for
/// a concrete grouping and sizes vector. Both sides are materialized and
/// compared as sorted multisets of canonical κ-index terms.
pub fn verify_appendix_bijections(
    grouping: &Grouping,
    sizes: &SizesVector,
    cap: u32,
) -> Result<AppendixReport> {
    if grouping.order() != 3 {
        return Err(Error::CirclesNot3(grouping.order()));
    }
    let low = grouping.low_shape()?;
    let hi = grouping.product_shape(sizes)?;
    if hi.total() > cap {
        return Err(Error::CapExceeded { cap, needed: hi.total() });
    }
    let markers = sizes.markers();
    let (r, s) = (grouping.r as usize, grouping.s as usize);
    let marker_groups = vec![
        markers[..r].to_vec(),
        markers[r..r + s].to_vec(),
        markers[r + s..].to_vec(),
    ];
    let ctx = AppendixCtx { hi: hi.clone(), gamma_hi: hi.gamma(), markers, marker_groups };

    let snc_low = enumerate_snc(&low, cap)?;
    let snc_hi = enumerate_snc(&hi, cap)?;
    let by_class_low = classified(&low, cap)?;
    let by_class_hi = classified(&hi, cap)?;
    let lifted = |pi: &Permutation| lift_perm(pi, sizes.sizes());
    let lifted_pp = |pp: &PartitionedPermutation| lift_pp(pp, sizes.sizes());
    // PS^(2) ∪ PS^(3)′: the classes entering the inductive step together
    let two3_low: Vec<&PartitionedPermutation> = by_class_low[&PSClass::TwoMarked2x2]
        .iter()
        .chain(by_class_low[&PSClass::OneMarked3].iter().filter(|pp| !is_top(pp, &low)))
        .collect();
    let three_low: Vec<&PartitionedPermutation> = by_class_low[&PSClass::OneMarked3]
        .iter()
        .filter(|pp| !is_top(pp, &low))
        .collect();

    let mut lemmas = Vec::new();

    // A.1: (π ∈ S_NC(r,s,t), σ ≤ π_n, σ⁻¹π_n separates N)
    //      ↔ σ with σ⁻¹γ not separating and fully connected pattern
    {
        let mut lhs = Vec::new();
        for pi in &snc_low {
            let pin = lifted(pi)?;
            for sigma in &snc_hi {
                if leq(sigma, &pin)?
                    && separates(&sigma.inverse().compose(&pin)?, &ctx.markers)?
                {
                    lhs.push(sigma.to_string());
                }
            }
        }
        let mut rhs = Vec::new();
        for sigma in &snc_hi {
            if !ctx.sep(sigma)? && ctx.pattern_blocks(sigma)? == 1 {
                rhs.push(sigma.to_string());
            }
        }
        lemmas.push(report("A.1", lhs, rhs));
    }

    // A.2: ((V,π) ∈ PS¹, σ ≲⁽¹⁾ π_n, sep, σ∨π_n = V_n) ↔ pattern with 2 blocks
    {
        let mut lhs = Vec::new();
        for vp in &by_class_low[&PSClass::OneMarked] {
            let vpn = lifted_pp(vp)?;
            for sigma in &snc_hi {
                if lesssim_r(sigma, vpn.perm())? == Some(1)
                    && separates(&sigma.inverse().compose(vpn.perm())?, &ctx.markers)?
                    && sigma
                        .orbit_partition()
                        .join(&vpn.perm().orbit_partition())?
                        == *vpn.part()
                {
                    lhs.push(sigma.to_string());
                }
            }
        }
        let mut rhs = Vec::new();
        for sigma in &snc_hi {
            if !ctx.sep(sigma)? && ctx.pattern_blocks(sigma)? == 2 {
                rhs.push(sigma.to_string());
            }
        }
        lemmas.push(report("A.2", lhs, rhs));
    }

    // A.3: ((V,π) ∈ PS²∪PS³′, σ ≲⁽²⁾ π_n, sep, σ∨π_n = V_n) ↔ discrete pattern
    {
        let mut lhs = Vec::new();
        for &vp in &two3_low {
            let vpn = lifted_pp(vp)?;
            for sigma in &snc_hi {
                if lesssim_r(sigma, vpn.perm())? == Some(2)
                    && separates(&sigma.inverse().compose(vpn.perm())?, &ctx.markers)?
                    && sigma
                        .orbit_partition()
                        .join(&vpn.perm().orbit_partition())?
                        == *vpn.part()
                {
                    lhs.push(sigma.to_string());
                }
            }
        }
        let mut rhs = Vec::new();
        for sigma in &snc_hi {
            if !ctx.sep(sigma)? && ctx.pattern_blocks(sigma)? == 3 {
                rhs.push(sigma.to_string());
            }
        }
        lemmas.push(report("A.3", lhs, rhs));
    }

    // A.4: PS¹_low × PS¹_hi with σ ≤ π_n ↔ PS¹_hi, not separated, 2 blocks
    {
        let mut lhs = Vec::new();
        for vp in &by_class_low[&PSClass::OneMarked] {
            let vpn = lifted_pp(vp)?;
            for us in &by_class_hi[&PSClass::OneMarked] {
                if leq(us.perm(), vpn.perm())?
                    && separates(&us.perm().inverse().compose(vpn.perm())?, &ctx.markers)?
                    && us.part().join(&vpn.perm().orbit_partition())? == *vpn.part()
                {
                    lhs.push(pp_key(us));
                }
            }
        }
        let mut rhs = Vec::new();
        for us in &by_class_hi[&PSClass::OneMarked] {
            if !ctx.sep(us.perm())? && ctx.pattern_blocks(us.perm())? == 2 {
                rhs.push(pp_key(us));
            }
        }
        lemmas.push(report("A.4", lhs, rhs));
    }

    // A.5: (PS²∪PS³′)_low × PS¹_hi with σ ≲⁽¹⁾ π_n ↔ PS¹_hi, discrete pattern
    {
        let mut lhs = Vec::new();
        for &vp in &two3_low {
            let vpn = lifted_pp(vp)?;
            for us in &by_class_hi[&PSClass::OneMarked] {
                if lesssim_r(us.perm(), vpn.perm())? == Some(1)
                    && separates(&us.perm().inverse().compose(vpn.perm())?, &ctx.markers)?
                    && us.part().join(&vpn.perm().orbit_partition())? == *vpn.part()
                {
                    lhs.push(pp_key(us));
                }
            }
        }
        let mut rhs = Vec::new();
        for us in &by_class_hi[&PSClass::OneMarked] {
            if !ctx.sep(us.perm())? && ctx.pattern_blocks(us.perm())? == 3 {
                rhs.push(pp_key(us));
            }
        }
        lemmas.push(report("A.5", lhs, rhs));
    }

    // A.6: (PS²∪PS³′)_low × PS²_hi with σ ≤ π_n ↔ PS²_hi, not separated
    {
        let mut lhs = Vec::new();
        for &vp in &two3_low {
            let vpn = lifted_pp(vp)?;
            for us in &by_class_hi[&PSClass::TwoMarked2x2] {
                if leq(us.perm(), vpn.perm())?
                    && separates(&us.perm().inverse().compose(vpn.perm())?, &ctx.markers)?
                    && us.part().join(&vpn.perm().orbit_partition())? == *vpn.part()
                {
                    lhs.push(pp_key(us));
                }
            }
        }
        let mut rhs = Vec::new();
        for us in &by_class_hi[&PSClass::TwoMarked2x2] {
            if !ctx.sep(us.perm())? {
                rhs.push(pp_key(us));
            }
        }
        lemmas.push(report("A.6", lhs, rhs));
    }

    // A.7: PS³′_low × PS³_hi with σ ≤ π_n ↔ PS³_hi, not separated
    {
        let mut lhs = Vec::new();
        for &vp in &three_low {
            let vpn = lifted_pp(vp)?;
            for us in &by_class_hi[&PSClass::OneMarked3] {
                if leq(us.perm(), vpn.perm())?
                    && separates(&us.perm().inverse().compose(vpn.perm())?, &ctx.markers)?
                    && us.part().join(&vpn.perm().orbit_partition())? == *vpn.part()
                {
                    lhs.push(pp_key(us));
                }
            }
        }
        let mut rhs = Vec::new();
        for us in &by_class_hi[&PSClass::OneMarked3] {
            if !ctx.sep(us.perm())? {
                rhs.push(pp_key(us));
            }
        }
        lemmas.push(report("A.7", lhs, rhs));
    }

    Ok(AppendixReport { lemmas })
}

fn classified(
    shape: &GammaShape,
    cap: u32,
) -> Result<BTreeMap<PSClass, Vec<PartitionedPermutation>>> {
    let mut out: BTreeMap<PSClass, Vec<PartitionedPermutation>> = BTreeMap::new();
    for class in
        [PSClass::Connected, PSClass::OneMarked, PSClass::TwoMarked2x2, PSClass::OneMarked3]
    {
        out.insert(class, Vec::new());
    }
    for member in enumerate_psnc(shape, EnumMode::Structural, cap, cap)? {
        let class = classify(&member, shape)?;
        out.get_mut(&class).unwrap().push(member);
    }
    Ok(out)
}

fn pp_key(pp: &PartitionedPermutation) -> String {
    format!("{}|{}", pp.part(), pp.perm())
}

fn report(lemma: &str, mut lhs: Vec<String>, mut rhs: Vec<String>) -> LemmaReport {
    lhs.sort();
    rhs.sort();
    LemmaReport {
        lemma: lemma.to_string(),
        left: lhs.len(),
        right: rhs.len(),
        pass: lhs == rhs,
    }
}

/// When all nᵢ = 1 the only surviving terms have π⁻¹γ = id, so the filtered
/// sum equals the single top cumulant. Exposed for tests.
pub fn separation_filter_is_sharp(
    grouping: &Grouping,
    cap: u32,
) -> Result<bool> {
    let total = grouping.parts();
    let sizes = SizesVector::new(&vec![1u32; total as usize])?;
    let shape = grouping.product_shape(&sizes)?;
    let gamma = shape.gamma();
    let markers = sizes.markers();
    let members = enumerate_psnc(&shape, EnumMode::Structural, cap, cap)?;
    for member in members {
        let rho = member.perm().inverse().compose(&gamma)?;
        if separates(&rho, &markers)? && !rho.is_identity() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ratio_from_str;
    use num_traits::Zero;
    use crate::models::{circular, seeded_generic, semicircular};

    fn q(s: &str) -> Ratio {
        ratio_from_str(s).unwrap()
    }

    #[test]
    fn grouping_and_sizes_basics() {
        let grouping = Grouping::new(2, 1, 1).unwrap();
        let sizes = SizesVector::new(&[2, 1, 4, 3]).unwrap();
        assert_eq!(grouping.group_totals(&sizes).unwrap(), vec![3, 4, 3]);
        assert_eq!(sizes.markers(), vec![2, 3, 7, 10]);
        assert!(Grouping::new(0, 1, 1).is_err());
        assert!(Grouping::new(1, 0, 1).is_err());
        assert!(SizesVector::new(&[1, 0]).is_err());
    }

    #[test]
    fn first_order_kappa2_round_trip() {
        let semi = semicircular();
        let s = semi.resolve("s", false).unwrap();
        let sizes = SizesVector::new(&[2]).unwrap();
        let grouping = Grouping::new(1, 0, 0).unwrap();
        let letters = vec![s.clone(), s.clone()];
        assert_eq!(product_cumulant(&semi, &letters, &sizes, &grouping, 12).unwrap(), q("1"));
        assert_eq!(
            product_cumulant_oracle(&semi, &letters, &sizes, &grouping, 8).unwrap(),
            q("1")
        );
    }

    #[test]
    fn oracle_agrees_on_generic_first_order() {
        // classical cumulants-of-products identity over NC(n), n ≤ 6
        let dist = seeded_generic("a", "a", true, 6, 99).unwrap();
        let a = dist.resolve("a", false).unwrap();
        for (grouping, sizes) in [
            (Grouping::new(2, 0, 0).unwrap(), SizesVector::new(&[2, 1]).unwrap()),
            (Grouping::new(2, 0, 0).unwrap(), SizesVector::new(&[2, 2]).unwrap()),
            (Grouping::new(3, 0, 0).unwrap(), SizesVector::new(&[1, 2, 1]).unwrap()),
            (Grouping::new(2, 0, 0).unwrap(), SizesVector::new(&[3, 3]).unwrap()),
        ] {
            let letters = vec![a.clone(); sizes.total() as usize];
            let direct = product_cumulant(&dist, &letters, &sizes, &grouping, 12).unwrap();
            let oracle = product_cumulant_oracle(&dist, &letters, &sizes, &grouping, 8).unwrap();
            assert_eq!(direct, oracle, "grouping {grouping:?} sizes {sizes:?}");
        }
    }

    #[test]
    fn oracle_agrees_on_generic_third_order() {
        let dist = seeded_generic("a", "a", true, 6, 7).unwrap();
        let a = dist.resolve("a", false).unwrap();
        for (g, sz) in [
            ((1, 1, 1), vec![1, 1, 1]),
            ((1, 1, 1), vec![2, 1, 1]),
            ((1, 1, 1), vec![1, 2, 1]),
            ((2, 1, 1), vec![1, 1, 1, 1]),
            ((1, 1, 1), vec![2, 2, 1]),
        ] {
            let grouping = Grouping::new(g.0, g.1, g.2).unwrap();
            let sizes = SizesVector::new(&sz).unwrap();
            let letters = vec![a.clone(); sizes.total() as usize];
            let direct = product_cumulant(&dist, &letters, &sizes, &grouping, 12).unwrap();
            let oracle = product_cumulant_oracle(&dist, &letters, &sizes, &grouping, 8).unwrap();
            assert_eq!(direct, oracle, "grouping {g:?} sizes {sz:?}");
        }
    }

    #[test]
    fn s_squared_third_order_vanishes() {
        let semi = semicircular();
        let s = semi.resolve("s", false).unwrap();
        let grouping = Grouping::new(1, 1, 1).unwrap();
        let sizes = SizesVector::new(&[2, 2, 2]).unwrap();
        let letters = vec![s; 6];
        assert!(product_cumulant(&semi, &letters, &sizes, &grouping, 12).unwrap().is_zero());
    }

    #[test]
    fn cc_star_third_order_vanishes() {
        let circ = circular();
        let c = circ.resolve("c", false).unwrap();
        let cs = circ.resolve("c", true).unwrap();
        let grouping = Grouping::new(1, 1, 1).unwrap();
        let sizes = SizesVector::new(&[2, 2, 2]).unwrap();
        let letters = vec![c.clone(), cs.clone(), c.clone(), cs.clone(), c, cs];
        assert!(product_cumulant(&circ, &letters, &sizes, &grouping, 12).unwrap().is_zero());
    }

    #[test]
    fn appendix_bijections_small() {
        let grouping = Grouping::new(1, 1, 1).unwrap();
        for sz in [vec![1u32, 1, 1], vec![2, 1, 1], vec![2, 2, 1]] {
            let sizes = SizesVector::new(&sz).unwrap();
            let rep = verify_appendix_bijections(&grouping, &sizes, 12).unwrap();
            assert!(rep.pass(), "sizes {sz:?}: {:?}", rep.lemmas);
        }
    }

    #[test]
    fn separation_sharpness() {
        for g in [(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1), (4, 1, 1), (2, 2, 2)] {
            let grouping = Grouping::new(g.0, g.1, g.2).unwrap();
            if grouping.parts() > 6 {
                continue;
            }
            assert!(separation_filter_is_sharp(&grouping, 12).unwrap(), "{g:?}");
        }
    }
}

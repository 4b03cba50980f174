//! Built-in distributions and the worked applications as executable checks:
//! squares of semicirculars, compressions by circulars, R-diagonal closure,
//! determining sequences of aa*, and products of free circulars.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{phi, DeterminingData, Distribution, GroupedWord, Ratio, Symbol};
use crate::error::{Error, Result};
use crate::partitioned::{enumerate_psnc, EnumMode, PartitionedPermutation};
use crate::product::{product_cumulant, Grouping, SizesVector};

/// Third-order semicircular element: κ₂(s,s) = 1, everything else 0.
pub fn semicircular() -> Distribution {
    semicircular_with("s").expect("fixed id")
}

pub fn semicircular_with(id: &str) -> Result<Distribution> {
    let s = Symbol::new(id, id, false);
    let mut data = DeterminingData::new();
    data.set(&GroupedWord::new(vec![vec![s.clone(), s]])?, Ratio::one());
    Distribution::single(id, &[id], data)
}

/// Third-order circular element: κ₂(c,c*) = κ₂(c*,c) = 1 only.
pub fn circular() -> Distribution {
    circular_with("c").expect("fixed id")
}

pub fn circular_with(id: &str) -> Result<Distribution> {
    let c = Symbol::new(id, id, false);
    let mut data = DeterminingData::new();
    data.set(&GroupedWord::new(vec![vec![c.clone(), c.adjoint()]])?, Ratio::one());
    Distribution::single(id, &[id], data)
}

/// Determining sequences β_r, β_{r,s}, β_{r,s,t} of an R-diagonal element.
/// Keys of b2 and b3 are stored sorted; the functional is symmetric in the
/// group order.
#[derive(Clone, Debug, Default)]
pub struct BetaTables {
    pub b1: BTreeMap<u32, Ratio>,
    pub b2: BTreeMap<(u32, u32), Ratio>,
    pub b3: BTreeMap<(u32, u32, u32), Ratio>,
}

impl BetaTables {
    pub fn get1(&self, r: u32) -> Ratio {
        self.b1.get(&r).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn get2(&self, r: u32, s: u32) -> Ratio {
        let key = (r.min(s), r.max(s));
        self.b2.get(&key).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn get3(&self, r: u32, s: u32, t: u32) -> Ratio {
        let mut key = [r, s, t];
        key.sort_unstable();
        self.b3.get(&(key[0], key[1], key[2])).cloned().unwrap_or_else(Ratio::zero)
    }

    /// Random small rationals on every index with entries ≤ max, reproducible
    /// from the seed.
    pub fn seeded(max: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| loop {
            let num = rng.gen_range(-3i64..=3);
            if num != 0 {
                return Ratio::new(BigInt::from(num), BigInt::from(rng.gen_range(1i64..=4)));
            }
        };
        let mut betas = BetaTables::default();
        for r in 1..=max {
            betas.b1.insert(r, draw(&mut rng));
            for s in r..=max {
                betas.b2.insert((r, s), draw(&mut rng));
                for t in s..=max {
                    betas.b3.insert((r, s, t), draw(&mut rng));
                }
            }
        }
        betas
    }

    /// The alternating determining data κ_{2r}(a,a*,…) = β_r and so on.
    pub fn to_data(&self, family: &str, letter: &str) -> DeterminingData {
        let mut data = DeterminingData::new();
        let word = |k: u32| alternating_word(family, letter, k);
        for (&r, value) in &self.b1 {
            data.set(&GroupedWord::new(vec![word(r)]).expect("group"), value.clone());
        }
        for (&(r, s), value) in &self.b2 {
            data.set(&GroupedWord::new(vec![word(r), word(s)]).expect("groups"), value.clone());
        }
        for (&(r, s, t), value) in &self.b3 {
            data.set(
                &GroupedWord::new(vec![word(r), word(s), word(t)]).expect("groups"),
                value.clone(),
            );
        }
        data
    }

    /// Multiplicative extension over a partitioned permutation of factor
    /// indices: a block's cycles of sizes (a), (a,b) or (a,b,c) contribute
    /// β_a, β_{a,b} or β_{a,b,c}.
    pub fn beta_vp(&self, pp: &PartitionedPermutation) -> Result<Ratio> {
        let cycles = pp.perm().cycles();
        let mut acc = Ratio::one();
        for block in pp.part().blocks() {
            let mut sizes: Vec<u32> =
                cycles.iter().filter(|c| block.contains(&c[0])).map(|c| c.len() as u32).collect();
            sizes.sort_unstable();
            let value = match sizes.len() {
                1 => self.get1(sizes[0]),
                2 => self.get2(sizes[0], sizes[1]),
                3 => self.get3(sizes[0], sizes[1], sizes[2]),
                k => return Err(Error::BlockTooWide(k)),
            };
            if value.is_zero() {
                return Ok(Ratio::zero());
            }
            acc *= value;
        }
        Ok(acc)
    }
}

fn alternating_word(family: &str, letter: &str, pairs: u32) -> Vec<Symbol> {
    let a = Symbol::new(family, letter, false);
    let astar = a.adjoint();
    (0..2 * pairs).map(|i| if i % 2 == 0 { a.clone() } else { astar.clone() }).collect()
}

/// True when the word alternates cyclically between the letter and its
/// adjoint within every group (the only keys an R-diagonal element allows).
pub fn is_alternating_word(gw: &GroupedWord) -> bool {
    gw.groups().iter().all(|group| {
        group.len() % 2 == 0
            && (0..group.len()).all(|i| {
                let next = &group[(i + 1) % group.len()];
                group[i].name == next.name && group[i].star != next.star
            })
    })
}

/// R-diagonal distribution: the only nonzero cumulants are the alternating
/// ones, valued by the given determining data.
pub fn r_diagonal(id: &str, letter: &str, data: DeterminingData) -> Result<Distribution> {
    for (key, _) in data.iter() {
        if !is_alternating_word(key) {
            return Err(Error::NotAlternating(key.to_string()));
        }
    }
    Distribution::single(id, &[letter], data)
}

/// Generic family with seeded random rational tables on every canonical
/// grouped word of total length ≤ `max_len`. With `selfadjoint` the alphabet
/// is {a}, otherwise {a, a*}.
pub fn seeded_generic(
    id: &str,
    letter: &str,
    selfadjoint: bool,
    max_len: u32,
    seed: u64,
) -> Result<Distribution> {
    let mut keys = std::collections::BTreeSet::new();
    let alphabet: Vec<Symbol> = if selfadjoint {
        vec![Symbol::new(id, letter, false)]
    } else {
        vec![Symbol::new(id, letter, false), Symbol::new(id, letter, true)]
    };
    for total in 1..=max_len as usize {
        for split in compositions_into_groups(total) {
            for word in words_of_shape(&alphabet, &split) {
                keys.insert(word.canonicalize());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = DeterminingData::new();
    for key in keys {
        let num = rng.gen_range(-3i64..=3);
        let den = rng.gen_range(1i64..=4);
        data.set(&key, Ratio::new(BigInt::from(num), BigInt::from(den)));
    }
    Distribution::single(id, &[letter], data)
}

fn compositions_into_groups(total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 1..=total {
        if a == total {
            out.push(vec![a]);
        }
        for b in 1..total.saturating_sub(a - 1) {
            if a + b == total {
                out.push(vec![a, b]);
            }
            if a + b < total {
                out.push(vec![a, b, total - a - b]);
            }
        }
    }
    out
}

fn words_of_shape(alphabet: &[Symbol], split: &[usize]) -> Vec<GroupedWord> {
    let total: usize = split.iter().sum();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; total];
    loop {
        let mut groups = Vec::new();
        let mut at = 0;
        for &k in split {
            groups.push(assignment[at..at + k].iter().map(|&i| alphabet[i].clone()).collect());
            at += k;
        }
        out.push(GroupedWord::new(groups).expect("valid split"));
        // odometer
        let mut i = 0;
        loop {
            if i == total {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < alphabet.len() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn binomial(n: i64, k: u32) -> BigInt {
    if n < 0 || (n as u64) < k as u64 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// l·p·q·r·C(lp−1,p)·C(lq−1,q)·C(lr−1,r); zero when l = 0.
pub fn closed_form_zeta_power(l: u32, p: u32, q: u32, r: u32) -> Ratio {
    if l == 0 {
        return Ratio::zero();
    }
    let mut value = BigInt::from(l as u64 * p as u64 * q as u64 * r as u64);
    for &x in &[p, q, r] {
        value *= binomial((l * x) as i64 - 1, x);
    }
    Ratio::from_integer(value)
}

/// Third-order cumulant of hh* for h a product of k free circulars.
pub fn closed_form_hh_star_cumulant(k: u32, p: u32, q: u32, r: u32) -> Ratio {
    closed_form_zeta_power(k, p, q, r)
}

/// Third-order moment φ₃((hh*)^p; (hh*)^q; (hh*)^r).
pub fn closed_form_hh_star_moment(k: u32, p: u32, q: u32, r: u32) -> Ratio {
    closed_form_zeta_power(k + 1, p, q, r)
}

/// Determining sequence β_{p,q,r} of h = c₁⋯c_k.
pub fn closed_form_beta(k: u32, p: u32, q: u32, r: u32) -> Ratio {
    closed_form_zeta_power(k.saturating_sub(1), p, q, r)
}

// ---------------------------------------------------------------------------
// Star patterns
// ---------------------------------------------------------------------------

/// Signs ε ∈ {+1,−1}^{r+s+t} describing a word in (ab) and (ab)*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarPattern {
    pub eps: Vec<i8>,
}

impl StarPattern {
    pub fn new(eps: &[i8]) -> Result<Self> {
        if eps.is_empty() || eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Parse("pattern entries must be +1 or -1".into()));
        }
        Ok(StarPattern { eps: eps.to_vec() })
    }

    /// ε is alternating iff ε_i = −ε_{γ(i)} for the grouping's γ.
    pub fn is_alternating(&self, grouping: &Grouping) -> Result<bool> {
        if self.eps.len() != grouping.parts() as usize {
            return Err(Error::SizesMismatch);
        }
        let gamma = grouping.low_shape()?.gamma();
        for i in 1..=self.eps.len() as u32 {
            let j = gamma.apply(i)?;
            if self.eps[i as usize - 1] != -self.eps[j as usize - 1] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Verification routines
// ---------------------------------------------------------------------------

/// Outcome of one verification: both sides as exact rationals.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub lhs: Ratio,
    pub rhs: Ratio,
    pub pass: bool,
}

impl Check {
    fn of(name: &str, params: String, lhs: Ratio, rhs: Ratio) -> Self {
        let pass = lhs == rhs;
        Check { name: name.into(), params, lhs, rhs, pass }
    }
}

/// κ_{p,q,r}(s²,…,s²) = 0.
pub fn verify_s2(p: u32, q: u32, r: u32, cap: u32) -> Result<Check> {
    let semi = semicircular();
    let s = semi.resolve("s", false)?;
    let total = p + q + r;
    let grouping = Grouping::new(p, q, r)?;
    let sizes = SizesVector::new(&vec![2; total as usize])?;
    let letters = vec![s; 2 * total as usize];
    let lhs = product_cumulant(&semi, &letters, &sizes, &grouping, cap)?;
    Ok(Check::of("s2", format!("p={p} q={q} r={r}"), lhs, Ratio::zero()))
}

/// κ_{p,q,r}(cc*,…,cc*) = 0.
pub fn verify_cc_star(p: u32, q: u32, r: u32, cap: u32) -> Result<Check> {
    let circ = circular();
    let c = circ.resolve("c", false)?;
    let total = p + q + r;
    let grouping = Grouping::new(p, q, r)?;
    let sizes = SizesVector::new(&vec![2; total as usize])?;
    let letters: Vec<Symbol> =
        (0..2 * total).map(|i| if i % 2 == 0 { c.clone() } else { c.adjoint() }).collect();
    let lhs = product_cumulant(&circ, &letters, &sizes, &grouping, cap)?;
    Ok(Check::of("ccstar", format!("p={p} q={q} r={r}"), lhs, Ratio::zero()))
}

/// κ_{r,s,t}(cac*,…) = φ₃(a^r; a^s; a^t) for a free from the circular family.
pub fn verify_cac(r: u32, s: u32, t: u32, a_dist: &Distribution, cap: u32) -> Result<Check> {
    let circ = circular();
    let union = circ.free_union(a_dist)?;
    let c = union.resolve("c", false)?;
    let a = union.resolve("a", false)?;
    let total = r + s + t;
    let grouping = Grouping::new(r, s, t)?;
    let sizes = SizesVector::new(&vec![3; total as usize])?;
    let mut letters = Vec::new();
    for _ in 0..total {
        letters.extend([c.clone(), a.clone(), c.adjoint()]);
    }
    let lhs = product_cumulant(&union, &letters, &sizes, &grouping, cap)?;
    let word = GroupedWord::new(
        [r, s, t]
            .into_iter()
            .filter(|&k| k > 0)
            .map(|k| vec![a.clone(); k as usize])
            .collect(),
    )?;
    let rhs = phi(&union, &word, cap)?;
    Ok(Check::of("cac", format!("r={r} s={s} t={t}"), lhs, rhs))
}

/// R-diagonal closure: for a R-diagonal free from b, a non-alternating
/// pattern gives κ_{r,s,t}((ab)^{ε}…) = 0. For alternating patterns the
/// value is reported with pass = true.
pub fn verify_rdiag_closure(
    grouping: &Grouping,
    pattern: &StarPattern,
    a_dist: &Distribution,
    b_dist: &Distribution,
    cap: u32,
) -> Result<Check> {
    let union = a_dist.free_union(b_dist)?;
    let a = union.resolve("a", false)?;
    let b = union.resolve("b", false)?;
    let mut letters = Vec::new();
    for &e in &pattern.eps {
        if e == 1 {
            letters.extend([a.clone(), b.clone()]);
        } else {
            letters.extend([b.adjoint(), a.adjoint()]);
        }
    }
    let sizes = SizesVector::new(&vec![2; pattern.eps.len()])?;
    let value = product_cumulant(&union, &letters, &sizes, grouping, cap)?;
    let params = format!(
        "grouping=({},{},{}) eps={:?}",
        grouping.r, grouping.s, grouping.t, pattern.eps
    );
    if pattern.is_alternating(grouping)? {
        Ok(Check::of("rdiag", params, value.clone(), value))
    } else {
        Ok(Check::of("rdiag", params, value, Ratio::zero()))
    }
}

/// κ_{r,s,t}(aa*,…,aa*) = Σ_{(V,π) ∈ PS_NC(r,s,t)} β_{(V,π)}.
pub fn verify_aa_star(r: u32, s: u32, t: u32, betas: &BetaTables, cap: u32) -> Result<Check> {
    let dist = r_diagonal("a", "a", betas.to_data("a", "a"))?;
    let a = dist.resolve("a", false)?;
    let total = r + s + t;
    let grouping = Grouping::new(r, s, t)?;
    let sizes = SizesVector::new(&vec![2; total as usize])?;
    let letters: Vec<Symbol> =
        (0..2 * total).map(|i| if i % 2 == 0 { a.clone() } else { a.adjoint() }).collect();
    let lhs = product_cumulant(&dist, &letters, &sizes, &grouping, cap)?;
    let low = grouping.low_shape()?;
    let mut rhs = Ratio::zero();
    for member in enumerate_psnc(&low, EnumMode::Structural, cap, cap)? {
        rhs += betas.beta_vp(&member)?;
    }
    Ok(Check::of("aastar", format!("r={r} s={s} t={t}"), lhs, rhs))
}

/// The halving identity: κ_{r,s,t}(a*c*,ca,…) = κ_{r/2,s/2,t/2}(a*a,…) for
/// even r, s, t.
pub fn verify_ca_halving(
    r: u32,
    s: u32,
    t: u32,
    a_dist: &Distribution,
    cap: u32,
) -> Result<Check> {
    if !r.is_multiple_of(2) || !s.is_multiple_of(2) || !t.is_multiple_of(2) || r == 0 || s == 0 || t == 0 {
        return Err(Error::OddCircle);
    }
    let circ = circular();
    let union = circ.free_union(a_dist)?;
    let c = union.resolve("c", false)?;
    let a = union.resolve("a", false)?;
    let total = r + s + t;
    let mut letters = Vec::new();
    for i in 0..total {
        if i % 2 == 0 {
            letters.extend([a.adjoint(), c.adjoint()]);
        } else {
            letters.extend([c.clone(), a.clone()]);
        }
    }
    let grouping = Grouping::new(r, s, t)?;
    let sizes = SizesVector::new(&vec![2; total as usize])?;
    let lhs = product_cumulant(&union, &letters, &sizes, &grouping, cap)?;
    let half_total = total / 2;
    let mut half_letters = Vec::new();
    for _ in 0..half_total {
        half_letters.extend([a.adjoint(), a.clone()]);
    }
    let half_grouping = Grouping::new(r / 2, s / 2, t / 2)?;
    let half_sizes = SizesVector::new(&vec![2; half_total as usize])?;
    let rhs = product_cumulant(&union, &half_letters, &half_sizes, &half_grouping, cap)?;
    Ok(Check::of("cahalve", format!("r={r} s={s} t={t}"), lhs, rhs))
}

/// Product of k free circulars, h = c₁⋯c_k: the third-order cumulants of
/// hh* against the closed form, via the compression identity applied k−1
/// times and one pairing-pruned moment; and the moment formula directly.
pub fn verify_ginibre(k: u32, p: u32, q: u32, r: u32, cap: u32) -> Result<Vec<Check>> {
    if k == 0 {
        return Err(Error::EmptyCircle);
    }
    let params = format!("k={k} p={p} q={q} r={r}");
    let grouping = Grouping::new(p, q, r)?;
    let cumulant = if k == 1 {
        // direct: κ_{p,q,r}(cc*, …)
        let circ = circular();
        let c = circ.resolve("c", false)?;
        let total = p + q + r;
        let sizes = SizesVector::new(&vec![2; total as usize])?;
        let letters: Vec<Symbol> =
            (0..2 * total).map(|i| if i % 2 == 0 { c.clone() } else { c.adjoint() }).collect();
        product_cumulant(&circ, &letters, &sizes, &grouping, cap)?
    } else {
        // κ_{p,q,r}(hh*, …) = φ₃(a^p; a^q; a^r) with a = h'h'* for
        // h' = c₂⋯c_k, expanded into letters of k−1 free circular families
        let mut dist = Distribution::empty();
        let mut syms = Vec::new();
        for i in 2..=k {
            let id = format!("c{i}");
            dist = dist.free_union(&circular_with(&id)?)?;
            syms.push(Symbol::new(&id, &id, false));
        }
        let mut factor: Vec<Symbol> = syms.clone();
        factor.extend(syms.iter().rev().map(Symbol::adjoint));
        let word = GroupedWord::new(
            [p, q, r].into_iter().map(|e| repeat_word(&factor, e)).collect(),
        )?;
        phi(&dist, &word, cap)?
    };
    let mut checks = vec![Check::of(
        "ginibre-cumulant",
        params.clone(),
        cumulant,
        closed_form_hh_star_cumulant(k, p, q, r),
    )];
    // moment: φ₃((hh*)^p; (hh*)^q; (hh*)^r) over k free circular families
    let mut dist = Distribution::empty();
    let mut syms = Vec::new();
    for i in 1..=k {
        let id = format!("c{i}");
        dist = dist.free_union(&circular_with(&id)?)?;
        syms.push(Symbol::new(&id, &id, false));
    }
    let mut factor: Vec<Symbol> = syms.clone();
    factor.extend(syms.iter().rev().map(Symbol::adjoint));
    let word =
        GroupedWord::new([p, q, r].into_iter().map(|e| repeat_word(&factor, e)).collect())?;
    let moment = phi(&dist, &word, cap)?;
    checks.push(Check::of(
        "ginibre-moment",
        params,
        moment,
        closed_form_hh_star_moment(k, p, q, r),
    ));
    Ok(checks)
}

fn repeat_word(factor: &[Symbol], times: u32) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(factor.len() * times as usize);
    for _ in 0..times {
        out.extend_from_slice(factor);
    }
    out
}

/// Builds the distribution used by the seeded generic verifications.
pub fn generic_for_tests(seed: u64, selfadjoint: bool) -> Result<Distribution> {
    seeded_generic("a", "a", selfadjoint, 6, seed)
}

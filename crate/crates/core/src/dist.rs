//! Symbols, free families, determining data, the multiplicative functional
//! κ_{(V,π)}, moments φ over PS_NC, and cumulant extraction by subtractive
//! recursion.
//!
//! All arithmetic is exact `BigRational`; there is no floating point in the
//! core. Table keys are canonical grouped words: each group is rotated to
//! its lexicographically least rotation and groups are sorted, matching the
//! cyclic invariance of the functionals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::backtrack::{Config, Engine};
use crate::error::{Error, Result};
use crate::partitioned::{is_top, psnc_cached, PartitionedPermutation};
use crate::perm::GammaShape;

pub type Ratio = BigRational;

/// Renders a rational as `num/den`, or just `num` when the denominator is 1.
pub fn ratio_to_string(x: &Ratio) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn ratio_from_str(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let parse_int =
        |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {t:?}")));
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Ratio::new(parse_int(num)?, den))
        }
    }
}

/// A named variable: family id, letter name and adjoint flag.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol {
    pub family: String,
    pub name: String,
    pub star: bool,
}

impl Symbol {
    pub fn new(family: &str, name: &str, star: bool) -> Self {
        Symbol { family: family.into(), name: name.into(), star }
    }

    pub fn adjoint(&self) -> Self {
        Symbol { family: self.family.clone(), name: self.name.clone(), star: !self.star }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.star { "*" } else { "" })
    }
}

/// A word of symbols split into 1–3 circular groups.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupedWord {
    groups: Vec<Vec<Symbol>>,
}

impl GroupedWord {
    pub fn new(groups: Vec<Vec<Symbol>>) -> Result<Self> {
        if groups.is_empty() || groups.len() > 3 || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::BadGroupCount);
        }
        Ok(GroupedWord { groups })
    }

    pub fn groups(&self) -> &[Vec<Symbol>] {
        &self.groups
    }

    pub fn total_len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn group_sizes(&self) -> Vec<u32> {
        self.groups.iter().map(|g| g.len() as u32).collect()
    }

    pub fn shape(&self) -> Result<GammaShape> {
        GammaShape::new(&self.group_sizes())
    }

    /// Letters indexed by the ground set of the shape, i.e. concatenated groups.
    pub fn letters(&self) -> Vec<Symbol> {
        self.groups.iter().flatten().cloned().collect()
    }

    /// Rotates each group to its lexicographically least rotation, then
    /// sorts the groups; deterministic and idempotent.
    pub fn canonicalize(&self) -> GroupedWord {
        let mut groups: Vec<Vec<Symbol>> = self.groups.iter().map(|g| min_rotation(g)).collect();
        groups.sort();
        GroupedWord { groups }
    }
}

fn min_rotation(group: &[Symbol]) -> Vec<Symbol> {
    let mut best: Option<Vec<Symbol>> = None;
    for start in 0..group.len() {
        let mut rot = Vec::with_capacity(group.len());
        rot.extend_from_slice(&group[start..]);
        rot.extend_from_slice(&group[..start]);
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.expect("non-empty group")
}

impl fmt::Display for GroupedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, group) in self.groups.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            for (j, sym) in group.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{sym}")?;
            }
        }
        Ok(())
    }
}

/// Partial cumulant tables keyed by canonical grouped words; absent keys
/// read as zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DeterminingData {
    entries: BTreeMap<GroupedWord, Ratio>,
}

impl DeterminingData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, gw: &GroupedWord, value: Ratio) {
        let key = gw.canonicalize();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn get(&self, gw: &GroupedWord) -> Ratio {
        self.entries.get(&gw.canonicalize()).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupedWord, &Ratio)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every entry is a single group of exactly two letters.
    pub fn is_pair_only(&self) -> bool {
        self.entries.keys().all(|k| k.groups.len() == 1 && k.total_len() == 2)
    }

    /// True when some entry has two or more groups.
    pub fn has_multi_group(&self) -> bool {
        self.entries.keys().any(|k| k.groups.len() >= 2)
    }
}

#[derive(Clone, Debug)]
pub struct FamilyData {
    pub letters: BTreeSet<String>,
    pub data: DeterminingData,
}

/// A collection of mutually free families; cumulants spanning more than one
/// family vanish.
#[derive(Clone, Debug, Default)]
pub struct Distribution {
    families: BTreeMap<String, FamilyData>,
}

impl Distribution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(id: &str, letters: &[&str], data: DeterminingData) -> Result<Self> {
        for (key, _) in data.iter() {
            for sym in key.letters() {
                if sym.family != id {
                    return Err(Error::DistSpec(format!(
                        "table key {key} does not belong to family {id:?}"
                    )));
                }
                if !letters.contains(&sym.name.as_str()) {
                    return Err(Error::UnknownLetter(sym.name));
                }
            }
        }
        let mut families = BTreeMap::new();
        families.insert(
            id.to_string(),
            FamilyData { letters: letters.iter().map(|s| s.to_string()).collect(), data },
        );
        Ok(Distribution { families })
    }

    pub fn families(&self) -> impl Iterator<Item = (&String, &FamilyData)> {
        self.families.iter()
    }

    pub fn family(&self, id: &str) -> Option<&FamilyData> {
        self.families.get(id)
    }

    /// Disjoint union of free families.
    pub fn free_union(&self, other: &Distribution) -> Result<Distribution> {
        let mut families = self.families.clone();
        for (id, fam) in &other.families {
            if families.contains_key(id) {
                return Err(Error::FamilyCollision(id.clone()));
            }
            for letter in &fam.letters {
                if families.values().any(|f| f.letters.contains(letter)) {
                    return Err(Error::LetterCollision(letter.clone()));
                }
            }
            families.insert(id.clone(), fam.clone());
        }
        Ok(Distribution { families })
    }

    pub fn is_pair_only(&self, family: &str) -> bool {
        self.families.get(family).map(|f| f.data.is_pair_only()).unwrap_or(true)
    }

    /// Finds the unique family declaring a letter name.
    pub fn resolve(&self, name: &str, star: bool) -> Result<Symbol> {
        let mut hit = None;
        for (id, fam) in &self.families {
            if fam.letters.contains(name) {
                if hit.is_some() {
                    return Err(Error::LetterCollision(name.into()));
                }
                hit = Some(id.clone());
            }
        }
        match hit {
            Some(family) => Ok(Symbol { family, name: name.into(), star }),
            None => Err(Error::UnknownLetter(name.into())),
        }
    }

    /// Parses a comma-separated letter list like `c,a,c*`.
    pub fn parse_letters(&self, s: &str) -> Result<Vec<Symbol>> {
        s.split(',').map(|tok| self.parse_symbol(tok)).collect()
    }

    /// Parses a grouped word like `c a c* ; c a c*`.
    pub fn parse_word(&self, s: &str) -> Result<GroupedWord> {
        let groups: Vec<Vec<Symbol>> = s
            .split(';')
            .map(|grp| {
                grp.split_whitespace().map(|tok| self.parse_symbol(tok)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        GroupedWord::new(groups)
    }

    fn parse_symbol(&self, tok: &str) -> Result<Symbol> {
        let tok = tok.trim();
        let (name, star) = match tok.strip_suffix('*') {
            Some(base) => (base, true),
            None => (tok, false),
        };
        if name.is_empty() {
            return Err(Error::Parse("empty letter".into()));
        }
        self.resolve(name, star)
    }

    /// The cumulant of one block: zero across families, otherwise a table
    /// lookup on the canonical word.
    pub fn kappa_block(&self, groups: &[Vec<Symbol>]) -> Ratio {
        let family = &groups[0][0].family;
        if groups.iter().flatten().any(|s| &s.family != family) {
            return Ratio::zero();
        }
        match self.families.get(family) {
            None => Ratio::zero(),
            Some(fam) => {
                let word = GroupedWord { groups: groups.to_vec() };
                fam.data.get(&word)
            }
        }
    }
}

/// The multiplicative functional κ_{(V,π)} applied to letters indexed by
/// the ground set `1..=n`: every block of V contributes the cumulant of its
/// cycles, groups ordered by least element, each cycle read from its least
/// element.
pub fn kappa_vp(
    dist: &Distribution,
    pp: &PartitionedPermutation,
    letters: &[Symbol],
) -> Result<Ratio> {
    let n = pp.size();
    if letters.len() != n {
        return Err(Error::LettersMismatch { got: letters.len(), want: n });
    }
    let cycles = pp.perm().cycles();
    let mut acc = Ratio::one();
    for block in pp.part().blocks() {
        let groups: Vec<Vec<Symbol>> = cycles
            .iter()
            .filter(|c| block.contains(&c[0]))
            .map(|c| c.iter().map(|&x| letters[x as usize - 1].clone()).collect())
            .collect();
        if groups.len() > 3 {
            return Err(Error::BlockTooWide(groups.len()));
        }
        let value = dist.kappa_block(&groups);
        if value.is_zero() {
            return Ok(Ratio::zero());
        }
        acc *= value;
    }
    Ok(acc)
}

/// Σ over (V,π) ∈ PS_NC(shape) of κ_{(V,π)}[letters], optionally filtered
/// by the condition that π⁻¹γ separates the markers.
///
/// Families whose tables only hold pairings force their letters into
/// compatible 2-cycles, in which case a constrained backtracking enumeration
/// replaces the cached full list.
pub(crate) fn psnc_sum(
    dist: &Distribution,
    letters: &[Symbol],
    shape: &GammaShape,
    markers: Option<&[u32]>,
    cap: u32,
) -> Result<Ratio> {
    Ok(psnc_sum_stats(dist, letters, shape, markers, cap)?.0)
}

/// Like `psnc_sum` but also reports the number of (V,π) terms that entered
/// the sum after the separation filter and structural pruning.
pub(crate) fn psnc_sum_stats(
    dist: &Distribution,
    letters: &[Symbol],
    shape: &GammaShape,
    markers: Option<&[u32]>,
    cap: u32,
) -> Result<(Ratio, u64)> {
    let n = shape.total() as usize;
    if letters.len() != n {
        return Err(Error::LettersMismatch { got: letters.len(), want: n });
    }
    if shape.total() > cap {
        return Err(Error::CapExceeded { cap, needed: shape.total() });
    }
    let family_ids: Vec<&String> = {
        let set: BTreeSet<&String> = letters.iter().map(|s| &s.family).collect();
        set.into_iter().collect()
    };
    let any_paired = family_ids.iter().any(|f| dist.is_pair_only(f));
    if !any_paired && family_ids.len() == 1 {
        return cached_sum(dist, letters, shape, markers, cap);
    }
    constrained_sum(dist, letters, shape, markers, &family_ids)
}

fn cached_sum(
    dist: &Distribution,
    letters: &[Symbol],
    shape: &GammaShape,
    markers: Option<&[u32]>,
    cap: u32,
) -> Result<(Ratio, u64)> {
    let members: Arc<Vec<PartitionedPermutation>> = psnc_cached(shape, cap)?;
    let gamma = shape.gamma();
    let mut total = Ratio::zero();
    let mut terms = 0u64;
    for member in members.iter() {
        if let Some(points) = markers {
            let rho = member.perm().inverse().compose(&gamma)?;
            if !crate::annular::separates(&rho, points)? {
                continue;
            }
        }
        terms += 1;
        total += kappa_vp(dist, member, letters)?;
    }
    Ok((total, terms))
}

fn constrained_sum(
    dist: &Distribution,
    letters: &[Symbol],
    shape: &GammaShape,
    markers: Option<&[u32]>,
    family_ids: &[&String],
) -> Result<(Ratio, u64)> {
    let n = shape.total() as usize;
    let class_index = |family: &String| family_ids.iter().position(|f| *f == family).unwrap();
    let class_of: Vec<u32> = letters.iter().map(|s| class_index(&s.family) as u32).collect();
    let pair_only: Vec<bool> = family_ids.iter().map(|f| dist.is_pair_only(f)).collect();
    let mergeable: Vec<bool> = family_ids
        .iter()
        .map(|f| dist.family(f).map(|fam| fam.data.has_multi_group()).unwrap_or(false))
        .collect();
    let pair_forced: Vec<bool> =
        (0..n).map(|i| pair_only[class_of[i] as usize]).collect();
    let pair_ok = |x: usize, y: usize| -> bool {
        !dist
            .kappa_block(&[vec![letters[x].clone(), letters[y].clone()]])
            .is_zero()
    };
    let cfg = Config {
        shape,
        class_of,
        mergeable,
        pair_forced,
        pair_ok: Some(Box::new(pair_ok)),
        g_max: shape.circles() as u32 - 1,
        markers: markers.map(|pts| pts.iter().map(|&x| x as usize - 1).collect()),
    };
    let mut engine = Engine::new(cfg);
    let mut total = Ratio::zero();
    let mut terms = 0u64;
    let block_value = |cycles: &[Vec<usize>], group: &[usize]| -> Ratio {
        let groups: Vec<Vec<Symbol>> = group
            .iter()
            .map(|&ci| cycles[ci].iter().map(|&x| letters[x].clone()).collect())
            .collect();
        dist.kappa_block(&groups)
    };
    engine.run(&mut |leaf| {
        terms += 1;
        let mut in_merge = vec![false; leaf.cycles.len()];
        for group in leaf.merges {
            for &ci in group {
                in_merge[ci] = true;
            }
        }
        let mut term = Ratio::one();
        for group in leaf.merges {
            term *= block_value(leaf.cycles, group);
            if term.is_zero() {
                return;
            }
        }
        for (ci, merged) in in_merge.iter().enumerate() {
            if *merged {
                continue;
            }
            term *= block_value(leaf.cycles, &[ci]);
            if term.is_zero() {
                return;
            }
        }
        total += term;
    });
    Ok((total, terms))
}

/// The moment functional φ_{(1,γ)}[gw] = Σ_{(V,π) ∈ PS_NC(γ)} κ_{(V,π)}.
pub fn phi(dist: &Distribution, gw: &GroupedWord, cap: u32) -> Result<Ratio> {
    let shape = gw.shape()?;
    psnc_sum(dist, &gw.letters(), &shape, None, cap)
}

/// Like [`phi`] but also reports the number of summed (V,π) terms.
pub fn phi_stats(dist: &Distribution, gw: &GroupedWord, cap: u32) -> Result<(Ratio, u64)> {
    let shape = gw.shape()?;
    psnc_sum_stats(dist, &gw.letters(), &shape, None, cap)
}

/// Extracts κ_{(1,γ)} from a moment provider by subtractive recursion over
/// PS_NC(γ) \ {(1,γ)}. The provider must be invariant under rotation within
/// groups and permutation of groups, which licenses memoization on the
/// canonical form.
pub struct KappaExtractor<F> {
    provider: F,
    memo: BTreeMap<GroupedWord, Ratio>,
    cap: u32,
}

impl<F: FnMut(&GroupedWord) -> Result<Ratio>> KappaExtractor<F> {
    pub fn new(provider: F, cap: u32) -> Self {
        KappaExtractor { provider, memo: BTreeMap::new(), cap }
    }

    pub fn kappa(&mut self, gw: &GroupedWord) -> Result<Ratio> {
        let key = gw.canonicalize();
        if let Some(found) = self.memo.get(&key) {
            return Ok(found.clone());
        }
        let shape = gw.shape()?;
        let letters = gw.letters();
        let mut total = (self.provider)(gw)?;
        let members = psnc_cached(&shape, self.cap)?;
        for member in members.iter() {
            if is_top(member, &shape) {
                continue;
            }
            let mut term = Ratio::one();
            for sub in block_words(member, &letters) {
                term *= self.kappa(&sub)?;
                if term.is_zero() {
                    break;
                }
            }
            total -= term;
        }
        self.memo.insert(key, total.clone());
        Ok(total)
    }
}

/// The grouped words of the blocks of (V,π): one word per block, groups are
/// the block's cycles ordered by least element.
pub(crate) fn block_words(pp: &PartitionedPermutation, letters: &[Symbol]) -> Vec<GroupedWord> {
    let cycles = pp.perm().cycles();
    pp.part()
        .blocks()
        .into_iter()
        .map(|block| {
            let groups: Vec<Vec<Symbol>> = cycles
                .iter()
                .filter(|c| block.contains(&c[0]))
                .map(|c| c.iter().map(|&x| letters[x as usize - 1].clone()).collect())
                .collect();
            GroupedWord::new(groups).expect("blocks have 1-3 cycles")
        })
        .collect()
}

/// κ_{(1,γ)}[gw] recovered from the φ values of the same distribution; for
/// letters with explicit tables this reproduces the table entry exactly.
pub fn kappa_from_moments(dist: &Distribution, gw: &GroupedWord, cap: u32) -> Result<Ratio> {
    let mut extractor = KappaExtractor::new(|w: &GroupedWord| phi(dist, w, cap), cap);
    extractor.kappa(gw)
}

// ---------------------------------------------------------------------------
// JSON distribution spec
// ---------------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct DistSpec {
    families: Vec<FamilySpec>,
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FamilySpec {
    Circular {
        id: String,
    },
    Semicircular {
        id: String,
    },
    RDiagonal {
        id: String,
        #[serde(default)]
        beta1: BTreeMap<String, String>,
        #[serde(default)]
        beta2: BTreeMap<String, String>,
        #[serde(default)]
        beta3: BTreeMap<String, String>,
    },
    Generic {
        id: String,
        #[serde(default)]
        letters: Vec<String>,
        #[serde(default)]
        kappa1: BTreeMap<String, String>,
        #[serde(default)]
        kappa2: BTreeMap<String, String>,
        #[serde(default)]
        kappa3: BTreeMap<String, String>,
    },
}

/// Loads a distribution from the JSON spec format:
/// `{"families":[{"id":"c","kind":"circular"},
///   {"id":"a","kind":"generic","kappa1":{"a a":"1/2"},…}]}`.
pub fn load_spec(text: &str) -> Result<Distribution> {
    let spec: DistSpec =
        serde_json::from_str(text).map_err(|e| Error::DistSpec(e.to_string()))?;
    let mut dist = Distribution::empty();
    for fam in spec.families {
        let next = match fam {
            FamilySpec::Circular { id } => crate::models::circular_with(&id)?,
            FamilySpec::Semicircular { id } => crate::models::semicircular_with(&id)?,
            FamilySpec::RDiagonal { id, beta1, beta2, beta3 } => {
                let mut betas = crate::models::BetaTables::default();
                for (key, value) in &beta1 {
                    betas.b1.insert(parse_tuple::<1>(key)?[0], ratio_from_str(value)?);
                }
                for (key, value) in &beta2 {
                    let [r, s] = parse_tuple::<2>(key)?;
                    betas.b2.insert((r, s), ratio_from_str(value)?);
                }
                for (key, value) in &beta3 {
                    let [r, s, t] = parse_tuple::<3>(key)?;
                    betas.b3.insert((r, s, t), ratio_from_str(value)?);
                }
                crate::models::r_diagonal(&id, &id, betas.to_data(&id, &id))?
            }
            FamilySpec::Generic { id, letters, kappa1, kappa2, kappa3 } => {
                let mut names: BTreeSet<String> = letters.into_iter().collect();
                let mut data = DeterminingData::new();
                for table in [&kappa1, &kappa2, &kappa3] {
                    for (key, value) in table {
                        let gw = parse_word_in_family(&id, key)?;
                        for sym in gw.letters() {
                            names.insert(sym.name);
                        }
                        data.set(&gw, ratio_from_str(value)?);
                    }
                }
                if names.is_empty() {
                    names.insert(id.clone());
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                Distribution::single(&id, &refs, data)?
            }
        };
        dist = dist.free_union(&next)?;
    }
    Ok(dist)
}

fn parse_tuple<const K: usize>(s: &str) -> Result<[u32; K]> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
        .collect::<Result<_>>()?;
    parts.try_into().map_err(|_| Error::Parse(format!("expected {K} indices in {s:?}")))
}

/// Parses a grouped word whose letters all belong to one family.
pub fn parse_word_in_family(family: &str, s: &str) -> Result<GroupedWord> {
    let groups: Vec<Vec<Symbol>> = s
        .split(';')
        .map(|grp| {
            grp.split_whitespace()
                .map(|tok| {
                    let (name, star) = match tok.strip_suffix('*') {
                        Some(base) => (base, true),
                        None => (tok, false),
                    };
                    if name.is_empty() {
                        return Err(Error::Parse("empty letter".into()));
                    }
                    Ok(Symbol::new(family, name, star))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    GroupedWord::new(groups)
}

/// Serializes a distribution back into the JSON spec format (generic tables
/// only; built-in kinds round-trip as generic data).
pub fn save_spec(dist: &Distribution) -> String {
    let families: Vec<FamilySpec> = dist
        .families()
        .map(|(id, fam)| {
            let mut kappa = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
            for (key, value) in fam.data.iter() {
                kappa[key.groups().len() - 1].insert(key.to_string(), ratio_to_string(value));
            }
            let [kappa1, kappa2, kappa3] = kappa;
            FamilySpec::Generic {
                id: id.clone(),
                letters: fam.letters.iter().cloned().collect(),
                kappa1,
                kappa2,
                kappa3,
            }
        })
        .collect();
    serde_json::to_string_pretty(&DistSpec { families }).expect("serializable spec")
}

/// Sanity helper used by tests and the CLI: checks that the letters of a
/// word are resolvable in the distribution.
pub fn check_letters(dist: &Distribution, letters: &[Symbol]) -> Result<()> {
    for sym in letters {
        match dist.family(&sym.family) {
            Some(fam) if fam.letters.contains(&sym.name) => {}
            _ => return Err(Error::UnknownLetter(format!("{sym}"))),
        }
    }
    Ok(())
}

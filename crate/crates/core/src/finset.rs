//! Finite sets with labelled elements, functions between them, and the (co)limits the
//! small object argument needs.
//!
//! Quotients go through a union-find whose class representative is always the least global
//! index, so every colimit is deterministic and its elements inherit readable labels.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinSet {
    labels: Arc<[String]>,
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

impl FinSet {
    /// Labels must be pairwise distinct.
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::malformed("finite set labels are not distinct"));
        }
        Ok(FinSet {
            labels: labels.into(),
        })
    }

    /// Makes candidate labels distinct by suffixing `#k` to repeats.
    pub fn from_candidates(candidates: Vec<String>) -> Self {
        FinSet {
            labels: dedup_labels(candidates).into(),
        }
    }

    /// Elements labelled `0..n`.
    pub fn of_size(n: usize) -> Self {
        FinSet {
            labels: (0..n).map(|i| i.to_string()).collect::<Vec<_>>().into(),
        }
    }

    pub fn empty() -> Self {
        Self::of_size(0)
    }

    pub fn singleton() -> Self {
        Self::of_size(1)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same elements under new labels.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Self {
        Self::from_candidates(self.labels.iter().map(|l| f(l)).collect())
    }
}

fn dedup_labels(candidates: Vec<String>) -> Vec<String> {
    let mut taken: HashSet<String> = HashSet::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for c in &candidates {
        *counts.entry(c.as_str()).or_default() += 1;
    }
    let unique: HashSet<String> = candidates
        .iter()
        .filter(|c| counts[c.as_str()] == 1)
        .cloned()
        .collect();
    let mut out = Vec::with_capacity(candidates.len());
    for (i, c) in candidates.iter().enumerate() {
        let mut label = if unique.contains(c) {
            c.clone()
        } else {
            format!("{c}#{i}")
        };
        while taken.contains(&label) || (!unique.contains(c) && unique.contains(&label)) {
            label.push('\'');
        }
        taken.insert(label.clone());
        out.push(label);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinFunction {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl fmt::Debug for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?} {:?}", self.dom, self.cod, self.table)
    }
}

impl FinFunction {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.size() {
            return Err(Error::malformed(format!(
                "table has {} entries for a domain of size {}",
                table.len(),
                dom.size()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.size()) {
            return Err(Error::malformed(format!(
                "table entry {bad} out of range for a codomain of size {}",
                cod.size()
            )));
        }
        Ok(FinFunction { dom, cod, table })
    }

    pub(crate) fn new_unchecked(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Self {
        debug_assert!(table.len() == dom.size() && table.iter().all(|&y| y < cod.size()));
        FinFunction { dom, cod, table }
    }

    pub fn identity(x: &FinSet) -> Self {
        FinFunction {
            dom: x.clone(),
            cod: x.clone(),
            table: (0..x.size()).collect(),
        }
    }

    /// The unique map out of the empty set.
    pub fn from_empty(cod: &FinSet) -> Self {
        FinFunction {
            dom: FinSet::empty(),
            cod: cod.clone(),
            table: vec![],
        }
    }

    /// The constant map picking element `y`.
    pub fn constant(dom: &FinSet, cod: &FinSet, y: usize) -> Result<Self> {
        Self::new(dom.clone(), cod.clone(), vec![y; dom.size()])
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &FinFunction) -> Result<FinFunction> {
        if f.cod != self.dom {
            return Err(Error::DomainMismatch(format!(
                "cannot compose {:?} after {:?}",
                self.dom, f.cod
            )));
        }
        Ok(FinFunction {
            dom: f.dom.clone(),
            cod: self.cod.clone(),
            table: f.table.iter().map(|&x| self.table[x]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        self.table.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        for &y in &self.table {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.size() == self.cod.size() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinFunction> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![0; self.cod.size()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Some(FinFunction {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            table,
        })
    }

    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x] == y).collect()
    }

    pub fn classify(&self) -> MapClass {
        classify_map(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapClass {
    pub is_mono: bool,
    pub is_epi: bool,
    pub is_iso: bool,
    pub is_split_epi: bool,
    /// ∏ fiber sizes; zero unless surjective.
    pub section_count: u128,
}

pub fn classify_map(f: &FinFunction) -> MapClass {
    let mut fibers = vec![0u128; f.cod.size()];
    for &y in &f.table {
        fibers[y] += 1;
    }
    let section_count = fibers.iter().product::<u128>();
    let is_epi = f.is_surjective();
    MapClass {
        is_mono: f.is_injective(),
        is_epi,
        is_iso: f.is_bijective(),
        is_split_epi: is_epi,
        section_count,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// The smaller root survives, so every root is its class minimum.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// Colimit of a finite diagram of finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetColimit {
    pub apex: FinSet,
    pub legs: Vec<FinFunction>,
    /// `(diagram object, element)` of each class's least representative.
    pub reps: Vec<(usize, usize)>,
}

/// Computes the colimit of `objects` glued along `arrows` (`(source, target, map)`).
///
/// A class keeps its representative's label when no other class shares it; otherwise the
/// label is prefixed with the representative's diagram tag.
pub fn colimit(
    objects: &[FinSet],
    tags: &[String],
    arrows: &[(usize, usize, FinFunction)],
) -> Result<SetColimit> {
    if tags.len() != objects.len() {
        return Err(Error::malformed("one tag per diagram object is required"));
    }
    let mut offsets = Vec::with_capacity(objects.len() + 1);
    let mut total = 0;
    for o in objects {
        offsets.push(total);
        total += o.size();
    }
    offsets.push(total);
    let mut uf = UnionFind::new(total);
    for (k, (s, t, f)) in arrows.iter().enumerate() {
        if *s >= objects.len() || *t >= objects.len() {
            return Err(Error::malformed(format!("diagram arrow {k} has a dangling endpoint")));
        }
        if f.dom != objects[*s] || f.cod != objects[*t] {
            return Err(Error::DomainMismatch(format!(
                "diagram arrow {k} does not match its endpoints"
            )));
        }
        for (x, &y) in f.table.iter().enumerate() {
            uf.union(offsets[*s] + x, offsets[*t] + y);
        }
    }
    let mut class_of = vec![usize::MAX; total];
    let mut reps = Vec::new();
    let mut owner = 0;
    for g in 0..total {
        while offsets[owner + 1] <= g {
            owner += 1;
        }
        let r = uf.find(g);
        if r == g {
            class_of[g] = reps.len();
            reps.push((owner, g - offsets[owner]));
        }
    }
    for g in 0..total {
        class_of[g] = class_of[uf.find(g)];
    }
    let base: Vec<&str> = reps.iter().map(|&(o, e)| objects[o].label(e)).collect();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for l in &base {
        *counts.entry(l).or_default() += 1;
    }
    let candidates = reps
        .iter()
        .zip(&base)
        .map(|(&(o, _), l)| {
            if counts[l] == 1 {
                l.to_string()
            } else {
                format!("{}:{}", tags[o], l)
            }
        })
        .collect();
    let apex = FinSet::from_candidates(candidates);
    let legs = objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            FinFunction::new_unchecked(
                o.clone(),
                apex.clone(),
                (0..o.size()).map(|x| class_of[offsets[i] + x]).collect(),
            )
        })
        .collect();
    Ok(SetColimit { apex, legs, reps })
}

impl SetColimit {
    /// The unique map out of the apex through which the cocone `legs` factors.
    pub fn mediate(
        &self,
        objects: &[FinSet],
        arrows: &[(usize, usize, FinFunction)],
        target: &FinSet,
        legs: &[FinFunction],
    ) -> Result<FinFunction> {
        if legs.len() != objects.len() {
            return Err(Error::NotACocone("one leg per diagram object is required".into()));
        }
        for (i, (leg, o)) in legs.iter().zip(objects).enumerate() {
            if leg.dom != *o || leg.cod != *target {
                return Err(Error::NotACocone(format!("leg {i} has the wrong boundary")));
            }
        }
        for (k, (s, t, f)) in arrows.iter().enumerate() {
            if legs[*t].after(f)? != legs[*s] {
                return Err(Error::NotACocone(format!("leg triangle at diagram arrow {k} fails")));
            }
        }
        let table = self.reps.iter().map(|&(o, e)| legs[o].table[e]).collect();
        Ok(FinFunction::new_unchecked(self.apex.clone(), target.clone(), table))
    }
}

/// Pushout of `f: A → B` and `g: A → C`; elements are least representatives in `B ⊔ C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushout {
    pub f: FinFunction,
    pub g: FinFunction,
    pub apex: FinSet,
    pub in_b: FinFunction,
    pub in_c: FinFunction,
    colimit: SetColimit,
}

pub fn pushout(f: &FinFunction, g: &FinFunction) -> Result<Pushout> {
    if f.dom != g.dom {
        return Err(Error::DomainMismatch("pushout legs do not share a domain".into()));
    }
    let objects = [f.cod.clone(), g.cod.clone(), f.dom.clone()];
    let tags = ["inl".to_string(), "inr".to_string(), "span".to_string()];
    let colimit = colimit(&objects, &tags, &[(2, 0, f.clone()), (2, 1, g.clone())])?;
    Ok(Pushout {
        f: f.clone(),
        g: g.clone(),
        apex: colimit.apex.clone(),
        in_b: colimit.legs[0].clone(),
        in_c: colimit.legs[1].clone(),
        colimit,
    })
}

impl Pushout {
    pub fn mediate(&self, target: &FinSet, to_b: &FinFunction, to_c: &FinFunction) -> Result<FinFunction> {
        let leg_a = to_b.after(&self.f)?;
        let objects = [self.f.cod.clone(), self.g.cod.clone(), self.f.dom.clone()];
        self.colimit.mediate(
            &objects,
            &[(2, 0, self.f.clone()), (2, 1, self.g.clone())],
            target,
            &[to_b.clone(), to_c.clone(), leg_a],
        )
    }
}

pub fn coproduct(b: &FinSet, c: &FinSet) -> Pushout {
    pushout(&FinFunction::from_empty(b), &FinFunction::from_empty(c)).expect("coproduct")
}

/// Coequalizer of a parallel pair `f, g: A → B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coequalizer {
    pub f: FinFunction,
    pub g: FinFunction,
    pub apex: FinSet,
    pub proj: FinFunction,
    colimit: SetColimit,
}

pub fn coequalizer(f: &FinFunction, g: &FinFunction) -> Result<Coequalizer> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(Error::DomainMismatch("coequalizer needs a parallel pair".into()));
    }
    let objects = [f.cod.clone(), f.dom.clone()];
    let tags = ["q".to_string(), "rel".to_string()];
    let colimit = colimit(&objects, &tags, &[(1, 0, f.clone()), (1, 0, g.clone())])?;
    Ok(Coequalizer {
        f: f.clone(),
        g: g.clone(),
        apex: colimit.apex.clone(),
        proj: colimit.legs[0].clone(),
        colimit,
    })
}

impl Coequalizer {
    pub fn mediate(&self, target: &FinSet, q: &FinFunction) -> Result<FinFunction> {
        if q.after(&self.f)? != q.after(&self.g)? {
            return Err(Error::NotACocone("map does not coequalize the pair".into()));
        }
        let objects = [self.f.cod.clone(), self.f.dom.clone()];
        self.colimit.mediate(
            &objects,
            &[(1, 0, self.f.clone()), (1, 0, self.g.clone())],
            target,
            &[q.clone(), q.after(&self.f)?],
        )
    }
}

/// Colimit of a finite chain `X₀ → X₁ → … → Xₙ`, presented at its first stable stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialColimit {
    pub chain: Vec<FinFunction>,
    pub apex: FinSet,
    /// Index of the first stage from which every map is a bijection.
    pub stable_stage: usize,
    /// Coprojection from each `Xᵢ`, `i = 0..=n`.
    pub legs: Vec<FinFunction>,
}

pub fn sequential_colimit(chain: &[FinFunction]) -> Result<SequentialColimit> {
    if chain.is_empty() {
        return Err(Error::malformed("a chain needs at least one map"));
    }
    for (i, w) in chain.windows(2).enumerate() {
        if w[0].cod != w[1].dom {
            return Err(Error::DomainMismatch(format!("chain breaks between maps {i} and {}", i + 1)));
        }
    }
    let n = chain.len();
    let mut stable = n;
    while stable > 0 && chain[stable - 1].is_bijective() {
        stable -= 1;
    }
    let objects: Vec<&FinSet> = std::iter::once(&chain[0].dom)
        .chain(chain.iter().map(|f| &f.cod))
        .collect();
    let apex = objects[stable].clone();
    let mut legs = vec![FinFunction::identity(&apex); n + 1];
    for i in (0..stable).rev() {
        legs[i] = legs[i + 1].after(&chain[i])?;
    }
    let mut forward = FinFunction::identity(&apex);
    for i in stable..n {
        forward = chain[i].after(&forward)?;
        legs[i + 1] = forward.inverse().expect("bijective tail");
    }
    Ok(SequentialColimit {
        chain: chain.to_vec(),
        apex,
        stable_stage: stable,
        legs,
    })
}

impl SequentialColimit {
    pub fn mediate(&self, target: &FinSet, legs: &[FinFunction]) -> Result<FinFunction> {
        if legs.len() != self.chain.len() + 1 {
            return Err(Error::NotACocone("one leg per chain object is required".into()));
        }
        for (i, f) in self.chain.iter().enumerate() {
            if legs[i + 1].cod != *target || legs[i + 1].after(f)? != legs[i] {
                return Err(Error::NotACocone(format!("leg triangle at chain map {i} fails")));
            }
        }
        if legs[self.stable_stage].dom != self.apex {
            return Err(Error::NotACocone("leg at the stable stage has the wrong domain".into()));
        }
        Ok(legs[self.stable_stage].clone())
    }
}

/// Pullback `{(a, b) | f a = g b}` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub f: FinFunction,
    pub g: FinFunction,
    pub apex: FinSet,
    pub proj_a: FinFunction,
    pub proj_b: FinFunction,
    pairs: Vec<(usize, usize)>,
}

pub fn pullback(f: &FinFunction, g: &FinFunction) -> Result<Pullback> {
    if f.cod != g.cod {
        return Err(Error::CodomainMismatch("pullback legs do not share a codomain".into()));
    }
    let mut pairs = Vec::new();
    for a in 0..f.dom.size() {
        for b in 0..g.dom.size() {
            if f.table[a] == g.table[b] {
                pairs.push((a, b));
            }
        }
    }
    let apex = FinSet::from_candidates(
        pairs
            .iter()
            .map(|&(a, b)| format!("({},{})", f.dom.label(a), g.dom.label(b)))
            .collect(),
    );
    let proj_a = FinFunction::new_unchecked(apex.clone(), f.dom.clone(), pairs.iter().map(|p| p.0).collect());
    let proj_b = FinFunction::new_unchecked(apex.clone(), g.dom.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(Pullback {
        f: f.clone(),
        g: g.clone(),
        apex,
        proj_a,
        proj_b,
        pairs,
    })
}

impl Pullback {
    /// The unique map into the apex with the given projections.
    pub fn factor(&self, p: &FinFunction, q: &FinFunction) -> Result<FinFunction> {
        if p.dom != q.dom || p.cod != self.f.dom || q.cod != self.g.dom {
            return Err(Error::BoundaryMismatch("cone legs do not match the cospan".into()));
        }
        if self.f.after(p)? != self.g.after(q)? {
            return Err(Error::NotCommuting("cone over the cospan does not commute".into()));
        }
        let index: HashMap<(usize, usize), usize> =
            self.pairs.iter().enumerate().map(|(i, &pr)| (pr, i)).collect();
        let table = (0..p.dom.size())
            .map(|z| index[&(p.table[z], q.table[z])])
            .collect();
        Ok(FinFunction::new_unchecked(p.dom.clone(), self.apex.clone(), table))
    }
}

/// Iterates the product of candidate lists in lexicographic order (first entry slowest).
pub(crate) fn product_tables(candidates: &[Vec<usize>], cap: usize) -> Result<Vec<Vec<usize>>> {
    let count = candidates
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    check_cap(count, cap)?;
    let mut out = Vec::with_capacity(count as usize);
    if count == 0 {
        return Ok(out);
    }
    let mut idx = vec![0usize; candidates.len()];
    loop {
        out.push(idx.iter().zip(candidates).map(|(&i, c)| c[i]).collect());
        let mut pos = candidates.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All `|B|^|A|` functions in lexicographic table order.
pub fn enumerate_functions(a: &FinSet, b: &FinSet, cap: usize) -> Result<Vec<FinFunction>> {
    let all: Vec<usize> = (0..b.size()).collect();
    let tables = product_tables(&vec![all; a.size()], cap)?;
    Ok(tables
        .into_iter()
        .map(|t| FinFunction::new_unchecked(a.clone(), b.clone(), t))
        .collect())
}

/// All `h: source → dom along` with `along ∘ h = over`.
pub fn lifts(source: &FinSet, along: &FinFunction, over: &FinFunction, cap: usize) -> Result<Vec<FinFunction>> {
    if over.dom != *source || over.cod != along.cod {
        return Err(Error::BoundaryMismatch("lift target does not match".into()));
    }
    let candidates: Vec<Vec<usize>> = over.table.iter().map(|&y| along.fiber(y)).collect();
    Ok(product_tables(&candidates, cap)?
        .into_iter()
        .map(|t| FinFunction::new_unchecked(source.clone(), along.dom.clone(), t))
        .collect())
}

/// All diagonal fillers `ψ: cod u → dom f` for the square `f ∘ top = bottom ∘ u`.
pub fn fillers(
    u: &FinFunction,
    f: &FinFunction,
    top: &FinFunction,
    bottom: &FinFunction,
    cap: usize,
) -> Result<Vec<FinFunction>> {
    if top.dom != u.dom || top.cod != f.dom || bottom.dom != u.cod || bottom.cod != f.cod {
        return Err(Error::BoundaryMismatch("lifting problem boundary mismatch".into()));
    }
    let mut candidates: Vec<Vec<usize>> = bottom.table.iter().map(|&y| f.fiber(y)).collect();
    for (s, &t) in u.table.iter().enumerate() {
        let forced = top.table[s];
        candidates[t].retain(|&x| x == forced);
    }
    Ok(product_tables(&candidates, cap)?
        .into_iter()
        .map(|t| FinFunction::new_unchecked(u.cod.clone(), f.dom.clone(), t))
        .collect())
}

#[derive(Serialize, Deserialize)]
struct FinSetFile {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Serialize for FinSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FinSetFile {
            size: self.size(),
            labels: Some(self.labels.to_vec()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = FinSetFile::deserialize(d)?;
        match file.labels {
            None => Ok(FinSet::of_size(file.size)),
            Some(labels) => {
                if labels.len() != file.size {
                    return Err(serde::de::Error::custom(format!(
                        "size {} but {} labels",
                        file.size,
                        labels.len()
                    )));
                }
                FinSet::new(labels).map_err(serde::de::Error::custom)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FinFunctionFile {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl Serialize for FinFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FinFunctionFile {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            table: self.table.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = FinFunctionFile::deserialize(d)?;
        FinFunction::new(file.dom, file.cod, file.table).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(dom: usize, cod: usize, table: &[usize]) -> FinFunction {
        FinFunction::new(FinSet::of_size(dom), FinSet::of_size(cod), table.to_vec()).unwrap()
    }

    #[test]
    fn pushout_over_empty_is_coproduct() {
        let p = coproduct(&FinSet::of_size(1), &FinSet::of_size(1));
        assert_eq!(p.apex.size(), 2);
        assert_eq!(p.in_b.table(), &[0]);
        assert_eq!(p.in_c.table(), &[1]);
    }

    #[test]
    fn pushout_along_identity() {
        let g = map(3, 2, &[1, 0, 1]);
        let p = pushout(&FinFunction::identity(&FinSet::of_size(3)), &g).unwrap();
        assert_eq!(p.apex.size(), 2);
        assert!(p.in_c.is_bijective());
    }

    #[test]
    fn pushout_collapsing_both_points() {
        let p = pushout(&map(2, 1, &[0, 0]), &FinFunction::identity(&FinSet::of_size(2))).unwrap();
        assert_eq!(p.apex.size(), 1);
    }

    #[test]
    fn pushout_rejects_mismatched_domains() {
        let err = pushout(&map(2, 1, &[0, 0]), &map(1, 1, &[0])).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch(_)));
    }

    #[test]
    fn pushout_labels_prefer_left_representatives() {
        let b = FinSet::new(vec!["x".into(), "y".into()]).unwrap();
        let c = FinSet::new(vec!["x".into(), "z".into()]).unwrap();
        let a = FinSet::of_size(1);
        let f = FinFunction::new(a.clone(), b, vec![1]).unwrap();
        let g = FinFunction::new(a, c, vec![1]).unwrap();
        let p = pushout(&f, &g).unwrap();
        assert_eq!(p.apex.labels(), &["inl:x", "y", "inr:x"]);
    }

    #[test]
    fn coequalizer_examples() {
        let f = map(2, 3, &[0, 1]);
        assert!(coequalizer(&f, &f).unwrap().proj.is_bijective());
        let q = coequalizer(&f, &map(2, 3, &[1, 2])).unwrap();
        assert_eq!(q.apex.size(), 1);
        assert!(q.proj.is_surjective());
    }

    #[test]
    fn sequential_colimit_examples() {
        let id = FinFunction::identity(&FinSet::of_size(2));
        let c = sequential_colimit(&[id.clone(), id.clone()]).unwrap();
        assert_eq!(c.apex.size(), 2);
        assert_eq!(c.stable_stage, 0);

        let c = sequential_colimit(&[map(1, 2, &[0]), id]).unwrap();
        assert_eq!(c.apex.size(), 2);
        assert_eq!(c.stable_stage, 1);

        let one = FinFunction::identity(&FinSet::of_size(1));
        let c = sequential_colimit(&[map(2, 1, &[0, 0]), one.clone(), one]).unwrap();
        assert_eq!(c.apex.size(), 1);
        assert_eq!(c.legs[0].table(), &[0, 0]);
    }

    #[test]
    fn pullback_examples() {
        let a = map(3, 2, &[0, 0, 1]);
        let p = pullback(&a, &FinFunction::identity(&FinSet::of_size(2))).unwrap();
        assert_eq!(p.apex.size(), 3);
        let p = pullback(&map(1, 2, &[0]), &a).unwrap();
        assert_eq!(p.apex.size(), 2);
        let z = map(0, 1, &[]);
        assert_eq!(pullback(&z, &z).unwrap().apex.size(), 0);
        let err = pullback(&map(1, 2, &[0]), &map(1, 1, &[0])).unwrap_err();
        assert!(matches!(err, Error::CodomainMismatch(_)));
    }

    #[test]
    fn classification() {
        let c = classify_map(&FinFunction::identity(&FinSet::of_size(2)));
        assert!(c.is_mono && c.is_epi && c.is_iso && c.section_count == 1);
        let c = classify_map(&map(0, 1, &[]));
        assert!(c.is_mono && !c.is_epi && c.section_count == 0);
        let c = classify_map(&map(3, 2, &[0, 0, 1]));
        assert!(c.is_split_epi && c.section_count == 2);
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_functions(&FinSet::empty(), &FinSet::of_size(3), 10).unwrap().len(), 1);
        assert_eq!(enumerate_functions(&FinSet::of_size(1), &FinSet::of_size(2), 10).unwrap().len(), 2);
        let all = enumerate_functions(&FinSet::of_size(2), &FinSet::of_size(2), 10).unwrap();
        let tables: Vec<&[usize]> = all.iter().map(|f| f.table()).collect();
        assert_eq!(tables, vec![&[0, 0][..], &[0, 1], &[1, 0], &[1, 1]]);
        let err = enumerate_functions(&FinSet::of_size(3), &FinSet::of_size(3), 26).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { count: 27, cap: 26 }));
    }

    #[test]
    fn fillers_respect_both_triangles() {
        // u: 1 → 2 picking 0, f: 3 → 2 with fibers {0,1} and {2}.
        let u = map(1, 2, &[0]);
        let f = map(3, 2, &[0, 0, 1]);
        let top = map(1, 3, &[1]);
        let bottom = map(2, 2, &[0, 1]);
        let all = fillers(&u, &f, &top, &bottom, 100).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].table(), &[1, 2]);
    }

    #[test]
    fn labels_are_deduplicated() {
        let s = FinSet::from_candidates(vec!["a".into(), "a".into(), "a#0".into()]);
        let distinct: HashSet<&String> = s.labels().iter().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let f = map(2, 3, &[2, 0]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"dom":{"size":2,"labels":["0","1"]},"cod":{"size":3,"labels":["0","1","2"]},"table":[2,0]}"#
        );
        let back: FinFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FinFunction>(r#"{"dom":{"size":1},"cod":{"size":1},"table":[1]}"#).is_err());
    }
}

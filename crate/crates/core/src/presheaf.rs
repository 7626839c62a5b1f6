//! Finite-set-valued presheaves on a finite base and their natural transformations.
//!
//! A morphism `m: x → y` of the base acts contravariantly: `restrict[m]: at[y] → at[x]`.
//! Restrictions are stored for every morphism, identities included.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::fincat::{FinCategory, ValidationReport, Violation};
use crate::finset::{self, FinFunction, FinSet, SetColimit};

#[derive(Clone, Debug)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    at: Vec<FinSet>,
    restrict: Vec<FinFunction>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.at == other.at
            && self.restrict == other.restrict
    }
}

impl Eq for Presheaf {}

impl Hash for Presheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.at.hash(state);
        self.restrict.hash(state);
    }
}

fn same_base(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Presheaf {
    /// `restrict` is indexed by every base morphism. Only shapes are checked here; use
    /// [`Presheaf::validate`] for the functor laws.
    pub fn new(base: Arc<FinCategory>, at: Vec<FinSet>, restrict: Vec<FinFunction>) -> Result<Self> {
        if at.len() != base.object_count() {
            return Err(Error::ShapeMismatch("one set per base object is required".into()));
        }
        if restrict.len() != base.morphism_count() {
            return Err(Error::ShapeMismatch("one restriction per base morphism is required".into()));
        }
        for (k, r) in restrict.iter().enumerate() {
            let m = base.morphism(k);
            if *r.dom() != at[m.cod] || *r.cod() != at[m.dom] {
                return Err(Error::ShapeMismatch(format!(
                    "restriction along `{}` has the wrong boundary",
                    m.name
                )));
            }
        }
        Ok(Presheaf { base, at, restrict })
    }

    /// Like [`Presheaf::new`] with identity restrictions filled in.
    pub fn from_non_identity(
        base: Arc<FinCategory>,
        at: Vec<FinSet>,
        restrict: Vec<FinFunction>,
    ) -> Result<Self> {
        if at.len() != base.object_count() {
            return Err(Error::ShapeMismatch("one set per base object is required".into()));
        }
        if restrict.len() != base.non_identity().len() {
            return Err(Error::ShapeMismatch("one restriction per non-identity morphism is required".into()));
        }
        let mut full: Vec<FinFunction> = at.iter().map(FinFunction::identity).collect();
        full.extend(restrict);
        Self::new(base, at, full)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn at(&self, c: usize) -> &FinSet {
        &self.at[c]
    }

    pub fn levels(&self) -> &[FinSet] {
        &self.at
    }

    pub fn restrict(&self, m: usize) -> &FinFunction {
        &self.restrict[m]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.at.iter().map(FinSet::size).collect()
    }

    pub fn terminal(base: Arc<FinCategory>) -> Self {
        Self::constant(base, &FinSet::singleton())
    }

    pub fn empty(base: Arc<FinCategory>) -> Self {
        Self::constant(base, &FinSet::empty())
    }

    pub fn constant(base: Arc<FinCategory>, x: &FinSet) -> Self {
        let at = vec![x.clone(); base.object_count()];
        let restrict = vec![FinFunction::identity(x); base.morphism_count()];
        Presheaf { base, at, restrict }
    }

    /// Lists violated functor laws.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let b = &self.base;
        for o in 0..b.object_count() {
            if self.restrict[b.identity(o)] != FinFunction::identity(&self.at[o]) {
                report.push(Violation::new(
                    "restrict_identity",
                    vec![b.object_name(o).to_string()],
                    "restriction along an identity is not the identity",
                ));
            }
        }
        for g in 0..b.morphism_count() {
            for f in 0..b.morphism_count() {
                let Some(gf) = b.compose(g, f) else { continue };
                let composed = self.restrict[f].after(&self.restrict[g]).expect("shapes checked");
                if self.restrict[gf] != composed {
                    report.push(Violation::new(
                        "restrict_composition",
                        vec![b.morphism(g).name.clone(), b.morphism(f).name.clone()],
                        "restrict(g∘f) ≠ restrict(f)∘restrict(g)",
                    ));
                }
            }
        }
        report
    }

    /// A finite set as a presheaf on the terminal category.
    pub fn from_finset(x: &FinSet) -> Self {
        Self::constant(Arc::new(FinCategory::terminal()), x)
    }

    pub fn to_finset(&self) -> Result<FinSet> {
        if self.base.object_count() != 1 || !self.base.is_discrete() {
            return Err(Error::ShapeMismatch("only presheaves on the terminal base are sets".into()));
        }
        Ok(self.at[0].clone())
    }
}

/// A natural transformation; `components[c]: source.at(c) → target.at(c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresheafMap {
    source: Presheaf,
    target: Presheaf,
    components: Vec<FinFunction>,
}

impl PresheafMap {
    /// Rejects ill-shaped components and naturality failures.
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<FinFunction>) -> Result<Self> {
        let map = Self::new_unnatural(source, target, components)?;
        map.check_naturality()?;
        Ok(map)
    }

    fn new_unnatural(source: Presheaf, target: Presheaf, components: Vec<FinFunction>) -> Result<Self> {
        if !same_base(&source.base, &target.base) {
            return Err(Error::ShapeMismatch("presheaf map between different bases".into()));
        }
        if components.len() != source.at.len() {
            return Err(Error::ShapeMismatch("one component per base object is required".into()));
        }
        for (c, comp) in components.iter().enumerate() {
            if *comp.dom() != source.at[c] || *comp.cod() != target.at[c] {
                return Err(Error::ShapeMismatch(format!(
                    "component at `{}` has the wrong boundary",
                    source.base.object_name(c)
                )));
            }
        }
        Ok(PresheafMap {
            source,
            target,
            components,
        })
    }

    fn check_naturality(&self) -> Result<()> {
        let b = &self.source.base;
        for k in b.non_identity() {
            let m = b.morphism(k);
            let lhs = self.components[m.dom].after(&self.source.restrict[k])?;
            let rhs = self.target.restrict[k].after(&self.components[m.cod])?;
            if lhs != rhs {
                return Err(Error::NaturalityViolation(format!(
                    "square at `{}` does not commute",
                    m.name
                )));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn component(&self, c: usize) -> &FinFunction {
        &self.components[c]
    }

    pub fn components(&self) -> &[FinFunction] {
        &self.components
    }

    pub fn identity(x: &Presheaf) -> Self {
        PresheafMap {
            source: x.clone(),
            target: x.clone(),
            components: x.at.iter().map(FinFunction::identity).collect(),
        }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &PresheafMap) -> Result<PresheafMap> {
        if f.target != self.source {
            return Err(Error::DomainMismatch("presheaf maps are not composable".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&f.components)
            .map(|(g, f)| g.after(f))
            .collect::<Result<_>>()?;
        Ok(PresheafMap {
            source: f.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().all(FinFunction::is_injective)
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().all(FinFunction::is_surjective)
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(FinFunction::is_bijective)
    }

    pub fn inverse(&self) -> Option<PresheafMap> {
        let components = self
            .components
            .iter()
            .map(FinFunction::inverse)
            .collect::<Option<Vec<_>>>()?;
        Some(PresheafMap {
            source: self.target.clone(),
            target: self.source.clone(),
            components,
        })
    }

    /// The unique map out of the empty presheaf.
    pub fn from_empty(x: &Presheaf) -> Self {
        PresheafMap {
            source: Presheaf::empty(x.base.clone()),
            target: x.clone(),
            components: x.at.iter().map(FinFunction::from_empty).collect(),
        }
    }
}

/// `Hom(-, c)` with elements labelled by morphism names.
pub fn yoneda(base: &Arc<FinCategory>, c: &str) -> Result<Presheaf> {
    let ci = base.object_index(c).ok_or_else(|| Error::UnknownObject(c.to_string()))?;
    yoneda_at(base, ci)
}

pub fn yoneda_at(base: &Arc<FinCategory>, c: usize) -> Result<Presheaf> {
    let homs: Vec<Vec<usize>> = (0..base.object_count()).map(|x| base.hom(x, c)).collect();
    let at: Vec<FinSet> = homs
        .iter()
        .map(|h| FinSet::new(h.iter().map(|&k| base.morphism(k).name.clone()).collect()))
        .collect::<Result<_>>()?;
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let table = homs[m.cod]
            .iter()
            .map(|&g| {
                let gm = base
                    .compose(g, k)
                    .ok_or_else(|| Error::malformed("base category has a missing composite"))?;
                Ok(homs[m.dom].iter().position(|&h| h == gm).expect("composite in hom-set"))
            })
            .collect::<Result<Vec<_>>>()?;
        restrict.push(FinFunction::new(at[m.cod].clone(), at[m.dom].clone(), table)?);
    }
    Presheaf::new(base.clone(), at, restrict)
}

/// `y(m): y(c) → y(c')` for `m: c → c'`, by postcomposition.
pub fn yoneda_map(base: &Arc<FinCategory>, m: usize) -> Result<PresheafMap> {
    let (c, cp) = (base.morphism(m).dom, base.morphism(m).cod);
    let (yc, ycp) = (yoneda_at(base, c)?, yoneda_at(base, cp)?);
    let components = (0..base.object_count())
        .map(|d| {
            let into_cp = base.hom(d, cp);
            let table = base
                .hom(d, c)
                .iter()
                .map(|&g| {
                    let mg = base.compose(m, g).expect("composable");
                    into_cp.iter().position(|&h| h == mg).expect("composite in hom-set")
                })
                .collect();
            FinFunction::new(yc.at[d].clone(), ycp.at[d].clone(), table)
        })
        .collect::<Result<_>>()?;
    PresheafMap::new(yc, ycp, components)
}

/// The Yoneda transpose `y(c) → F` of an element `a ∈ F(c)`.
pub fn yoneda_element(f: &Presheaf, c: usize, a: usize) -> Result<PresheafMap> {
    let base = f.base.clone();
    let yc = yoneda_at(&base, c)?;
    let components = (0..base.object_count())
        .map(|d| {
            let table = base.hom(d, c).iter().map(|&g| f.restrict[g].apply(a)).collect();
            FinFunction::new(yc.at[d].clone(), f.at[d].clone(), table)
        })
        .collect::<Result<_>>()?;
    PresheafMap::new(yc, f.clone(), components)
}

/// The sieve classifier `Ω` together with `true: 1 → Ω`.
#[derive(Clone, Debug)]
pub struct SubobjectClassifier {
    pub omega: Presheaf,
    pub truth: PresheafMap,
    /// `sieves[c][s]` lists the morphisms (into `c`) of sieve `s`.
    pub sieves: Vec<Vec<Vec<usize>>>,
}

pub fn subobject_classifier(base: &Arc<FinCategory>) -> Result<SubobjectClassifier> {
    let n = base.object_count();
    let mut sieves = Vec::with_capacity(n);
    for c in 0..n {
        let into = base.morphisms_into(c);
        if into.len() > 20 {
            return Err(Error::EnumerationCap {
                count: 1u128 << into.len(),
                cap: 1 << 20,
            });
        }
        let mut found = Vec::new();
        for mask in 0u32..(1u32 << into.len()) {
            let members: Vec<usize> = (0..into.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| into[i])
                .collect();
            let closed = members.iter().all(|&g| {
                base.morphisms_into(base.morphism(g).dom)
                    .iter()
                    .all(|&h| base.compose(g, h).map_or(false, |gh| members.contains(&gh)))
            });
            if closed {
                found.push(members);
            }
        }
        sieves.push(found);
    }
    let label = |s: &Vec<usize>| {
        let names: Vec<&str> = s.iter().map(|&k| base.morphism(k).name.as_str()).collect();
        format!("{{{}}}", names.join(","))
    };
    let at: Vec<FinSet> = sieves
        .iter()
        .map(|ss| FinSet::new(ss.iter().map(label).collect()))
        .collect::<Result<_>>()?;
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let table = sieves[m.cod]
            .iter()
            .map(|s| {
                let pulled: Vec<usize> = base
                    .morphisms_into(m.dom)
                    .into_iter()
                    .filter(|&g| base.compose(k, g).map_or(false, |mg| s.contains(&mg)))
                    .collect();
                sieves[m.dom].iter().position(|t| *t == pulled).expect("pulled-back sieve")
            })
            .collect();
        restrict.push(FinFunction::new(at[m.cod].clone(), at[m.dom].clone(), table)?);
    }
    let omega = Presheaf::new(base.clone(), at, restrict)?;
    let one = Presheaf::terminal(base.clone());
    let maximal: Vec<usize> = (0..n)
        .map(|c| {
            let all = base.morphisms_into(c);
            sieves[c].iter().position(|s| *s == all).expect("maximal sieve")
        })
        .collect();
    let components = (0..n)
        .map(|c| FinFunction::new(one.at[c].clone(), omega.at[c].clone(), vec![maximal[c]]))
        .collect::<Result<_>>()?;
    let truth = PresheafMap::new(one, omega.clone(), components)?;
    Ok(SubobjectClassifier { omega, truth, sieves })
}

impl SubobjectClassifier {
    /// The classifying map `X → Ω` of a levelwise-injective `m: A → X`.
    pub fn classify(&self, m: &PresheafMap) -> Result<PresheafMap> {
        if !m.is_mono() {
            return Err(Error::ShapeMismatch("only monomorphisms are classified".into()));
        }
        let x = m.target();
        let base = x.base.clone();
        let components = (0..base.object_count())
            .map(|c| {
                let table = (0..x.at[c].size())
                    .map(|e| {
                        let members: Vec<usize> = base
                            .morphisms_into(c)
                            .into_iter()
                            .filter(|&g| {
                                let d = base.morphism(g).dom;
                                let y = x.restrict[g].apply(e);
                                m.components[d].table().contains(&y)
                            })
                            .collect();
                        self.sieves[c].iter().position(|s| *s == members).expect("sieve")
                    })
                    .collect();
                FinFunction::new(x.at[c].clone(), self.omega.at[c].clone(), table)
            })
            .collect::<Result<_>>()?;
        PresheafMap::new(x.clone(), self.omega.clone(), components)
    }
}

/// `φ^t(a)`: the levelwise pullback of `t: 1 → F` along `a: X → F`, as a subobject of `X`
/// labelled by the elements of `X`.
pub fn pullback_classify(t: &PresheafMap, a: &PresheafMap) -> Result<PresheafMap> {
    if t.target != a.target {
        return Err(Error::ShapeMismatch("classifier and map have different codomains".into()));
    }
    if t.source.at.iter().any(|s| s.size() != 1) {
        return Err(Error::ShapeMismatch("the classifier must be a global element".into()));
    }
    let x = &a.source;
    let base = x.base.clone();
    let mut keep: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    for c in 0..base.object_count() {
        let pb = finset::pullback(&a.components[c], &t.components[c])?;
        keep.push(pb.proj_a.table().to_vec());
    }
    let at: Vec<FinSet> = keep
        .iter()
        .enumerate()
        .map(|(c, elems)| FinSet::new(elems.iter().map(|&e| x.at[c].label(e).to_string()).collect()))
        .collect::<Result<_>>()?;
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let table = keep[m.cod]
            .iter()
            .map(|&e| {
                let y = x.restrict[k].apply(e);
                keep[m.dom]
                    .iter()
                    .position(|&z| z == y)
                    .ok_or_else(|| Error::NaturalityViolation("classified part is not a subpresheaf".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        restrict.push(FinFunction::new(at[m.cod].clone(), at[m.dom].clone(), table)?);
    }
    let sub = Presheaf::new(base, at, restrict)?;
    let components = keep
        .iter()
        .enumerate()
        .map(|(c, elems)| FinFunction::new(sub.at[c].clone(), x.at[c].clone(), elems.clone()))
        .collect::<Result<_>>()?;
    PresheafMap::new(sub, x.clone(), components)
}

/// The category of elements, with each object's `(base object, element)`.
#[derive(Clone, Debug)]
pub struct ElementCategory {
    pub category: FinCategory,
    pub elements: Vec<(usize, usize)>,
    /// Base morphism underlying each element-category morphism.
    pub over: Vec<usize>,
}

pub fn element_category(f: &Presheaf) -> Result<ElementCategory> {
    let base = &f.base;
    let mut elements = Vec::new();
    let mut names = Vec::new();
    for c in 0..base.object_count() {
        for x in 0..f.at[c].size() {
            elements.push((c, x));
            names.push(format!("{}:{}", base.object_name(c), f.at[c].label(x)));
        }
    }
    let index_of = |c: usize, x: usize| elements.iter().position(|&e| e == (c, x)).expect("element");
    // Morphism (c, F(m)x') → (c', x') for each m: c → c' and x' ∈ F(c').
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        for xp in 0..f.at[m.cod].size() {
            let x = f.restrict[k].apply(xp);
            triples.push((k, index_of(m.dom, x), index_of(m.cod, xp)));
        }
    }
    let n = elements.len();
    let mut full_index = vec![0usize; triples.len()];
    let mut morphisms = Vec::new();
    let mut over: Vec<usize> = (0..n).map(|e| base.identity(elements[e].0)).collect();
    for (i, &(k, s, t)) in triples.iter().enumerate() {
        if base.is_identity(k) {
            full_index[i] = s;
        } else {
            full_index[i] = n + morphisms.len();
            morphisms.push((format!("{}|{}", base.morphism(k).name, names[t]), s, t));
            over.push(k);
        }
    }
    let lookup = |k: usize, s: usize, t: usize| {
        triples
            .iter()
            .position(|&tr| tr == (k, s, t))
            .map(|i| full_index[i])
    };
    let mut compose = Vec::new();
    for (i, &(k1, s1, t1)) in triples.iter().enumerate() {
        for (j, &(k2, s2, t2)) in triples.iter().enumerate() {
            if base.is_identity(k1) || base.is_identity(k2) || t1 != s2 {
                continue;
            }
            let k = base
                .compose(k2, k1)
                .ok_or_else(|| Error::malformed("base category has a missing composite"))?;
            let eq = lookup(k, s1, t2).ok_or_else(|| Error::Internal("element composite missing".into()))?;
            compose.push((full_index[j], full_index[i], eq));
        }
    }
    let category = FinCategory::new_indexed(names, morphisms, compose)?;
    Ok(ElementCategory {
        category,
        elements,
        over,
    })
}

/// Depth-first search for levelwise maps `F → G` respecting naturality.
///
/// `candidates[c][x]` restricts the image of `x ∈ F(c)`. Solutions come out in
/// lexicographic order of `(object, element, candidate)`. The cap bounds visited nodes.
pub(crate) fn search_maps(
    source: &Presheaf,
    target: &Presheaf,
    candidates: &[Vec<Vec<usize>>],
    injective: bool,
    limit: Option<usize>,
    cap: usize,
) -> Result<Vec<Vec<Vec<usize>>>> {
    let base = &source.base;
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for c in 0..base.object_count() {
        for x in 0..source.at[c].size() {
            vars.push((c, x));
        }
    }
    let var_index = |c: usize, x: usize| -> usize {
        vars.iter().position(|&v| v == (c, x)).expect("variable")
    };
    // Constraint: value(dom-var) == G(m)(value(cod-var)); attached to the later variable.
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); vars.len()];
    for k in base.non_identity() {
        let m = base.morphism(k);
        for x in 0..source.at[m.cod].size() {
            let v_cod = var_index(m.cod, x);
            let v_dom = var_index(m.dom, source.restrict[k].apply(x));
            checks[v_cod.max(v_dom)].push((v_dom, v_cod, k));
        }
    }
    let mut values = vec![usize::MAX; vars.len()];
    let mut used: Vec<Vec<bool>> = target.at.iter().map(|s| vec![false; s.size()]).collect();
    let mut out = Vec::new();
    let mut visited: u128 = 0;

    struct Ctx<'a> {
        vars: &'a [(usize, usize)],
        checks: &'a [Vec<(usize, usize, usize)>],
        candidates: &'a [Vec<Vec<usize>>],
        target: &'a Presheaf,
        injective: bool,
        limit: Option<usize>,
        cap: usize,
    }

    fn go(
        ctx: &Ctx<'_>,
        i: usize,
        values: &mut Vec<usize>,
        used: &mut Vec<Vec<bool>>,
        out: &mut Vec<Vec<usize>>,
        visited: &mut u128,
    ) -> Result<bool> {
        if i == ctx.vars.len() {
            out.push(values.clone());
            return Ok(ctx.limit.map_or(false, |l| out.len() >= l));
        }
        let (c, x) = ctx.vars[i];
        for &y in &ctx.candidates[c][x] {
            *visited += 1;
            check_cap(*visited, ctx.cap)?;
            if ctx.injective && used[c][y] {
                continue;
            }
            values[i] = y;
            let ok = ctx.checks[i].iter().all(|&(vd, vc, k)| {
                values[vd] == ctx.target.restrict[k].apply(values[vc])
            });
            if !ok {
                continue;
            }
            if ctx.injective {
                used[c][y] = true;
            }
            let stop = go(ctx, i + 1, values, used, out, visited)?;
            if ctx.injective {
                used[c][y] = false;
            }
            if stop {
                return Ok(true);
            }
        }
        values[i] = usize::MAX;
        Ok(false)
    }

    let ctx = Ctx {
        vars: &vars,
        checks: &checks,
        candidates,
        target,
        injective,
        limit,
        cap,
    };
    let mut flat = Vec::new();
    go(&ctx, 0, &mut values, &mut used, &mut flat, &mut visited)?;
    for sol in flat {
        let mut per_level: Vec<Vec<usize>> = source.at.iter().map(|s| Vec::with_capacity(s.size())).collect();
        for (v, &(c, _)) in vars.iter().enumerate() {
            per_level[c].push(sol[v]);
        }
        out.push(per_level);
    }
    Ok(out)
}

fn maps_from_tables(source: &Presheaf, target: &Presheaf, tables: Vec<Vec<Vec<usize>>>) -> Vec<PresheafMap> {
    tables
        .into_iter()
        .map(|levels| PresheafMap {
            source: source.clone(),
            target: target.clone(),
            components: levels
                .into_iter()
                .enumerate()
                .map(|(c, t)| FinFunction::new_unchecked(source.at[c].clone(), target.at[c].clone(), t))
                .collect(),
        })
        .collect()
}

fn all_candidates(source: &Presheaf, target: &Presheaf) -> Vec<Vec<Vec<usize>>> {
    (0..source.at.len())
        .map(|c| vec![(0..target.at[c].size()).collect(); source.at[c].size()])
        .collect()
}

/// All natural transformations `F → G`.
pub fn enumerate_maps(f: &Presheaf, g: &Presheaf, cap: usize) -> Result<Vec<PresheafMap>> {
    if !same_base(&f.base, &g.base) {
        return Err(Error::ShapeMismatch("presheaves over different bases".into()));
    }
    let tables = search_maps(f, g, &all_candidates(f, g), false, None, cap)?;
    Ok(maps_from_tables(f, g, tables))
}

/// All isomorphisms `F → G`.
pub fn enumerate_isos(f: &Presheaf, g: &Presheaf, limit: Option<usize>, cap: usize) -> Result<Vec<PresheafMap>> {
    if !same_base(&f.base, &g.base) {
        return Err(Error::ShapeMismatch("presheaves over different bases".into()));
    }
    if f.sizes() != g.sizes() {
        return Ok(vec![]);
    }
    let tables = search_maps(f, g, &all_candidates(f, g), true, limit, cap)?;
    Ok(maps_from_tables(f, g, tables))
}

/// All `h: source → dom along` with `along ∘ h = over`.
pub fn lifts(source: &Presheaf, along: &PresheafMap, over: &PresheafMap, cap: usize) -> Result<Vec<PresheafMap>> {
    if over.source != *source || over.target != along.target {
        return Err(Error::BoundaryMismatch("lift target does not match".into()));
    }
    let candidates: Vec<Vec<Vec<usize>>> = (0..source.at.len())
        .map(|c| over.components[c].table().iter().map(|&y| along.components[c].fiber(y)).collect())
        .collect();
    let tables = search_maps(source, &along.source, &candidates, false, None, cap)?;
    Ok(maps_from_tables(source, &along.source, tables))
}

/// All diagonal fillers `ψ: cod u → dom f` of the square `f ∘ top = bottom ∘ u`.
pub fn fillers(
    u: &PresheafMap,
    f: &PresheafMap,
    top: &PresheafMap,
    bottom: &PresheafMap,
    cap: usize,
) -> Result<Vec<PresheafMap>> {
    if top.source != u.source || top.target != f.source || bottom.source != u.target || bottom.target != f.target {
        return Err(Error::BoundaryMismatch("lifting problem boundary mismatch".into()));
    }
    let levels = u.target.at.len();
    let mut candidates: Vec<Vec<Vec<usize>>> = (0..levels)
        .map(|c| bottom.components[c].table().iter().map(|&y| f.components[c].fiber(y)).collect())
        .collect();
    for c in 0..levels {
        for (s, &t) in u.components[c].table().iter().enumerate() {
            let forced = top.components[c].apply(s);
            candidates[c][t].retain(|&x| x == forced);
        }
    }
    let tables = search_maps(&u.target, &f.source, &candidates, false, None, cap)?;
    Ok(maps_from_tables(&u.target, &f.source, tables))
}

/// Levelwise colimit with induced restrictions.
#[derive(Clone, Debug)]
pub struct PresheafColimit {
    pub apex: Presheaf,
    pub legs: Vec<PresheafMap>,
    pub levels: Vec<SetColimit>,
}

pub fn colimit(
    base: &Arc<FinCategory>,
    objects: &[Presheaf],
    tags: &[String],
    arrows: &[(usize, usize, PresheafMap)],
) -> Result<PresheafColimit> {
    for o in objects {
        if !same_base(&o.base, base) {
            return Err(Error::ShapeMismatch("diagram mixes presheaf bases".into()));
        }
    }
    let n = base.object_count();
    let mut levels = Vec::with_capacity(n);
    for c in 0..n {
        let objs: Vec<FinSet> = objects.iter().map(|o| o.at[c].clone()).collect();
        let arrs: Vec<(usize, usize, FinFunction)> = arrows
            .iter()
            .map(|(s, t, f)| (*s, *t, f.components[c].clone()))
            .collect();
        levels.push(finset::colimit(&objs, tags, &arrs)?);
    }
    let at: Vec<FinSet> = levels.iter().map(|l| l.apex.clone()).collect();
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let objs: Vec<FinSet> = objects.iter().map(|o| o.at[m.cod].clone()).collect();
        let arrs: Vec<(usize, usize, FinFunction)> = arrows
            .iter()
            .map(|(s, t, f)| (*s, *t, f.components[m.cod].clone()))
            .collect();
        let legs = objects
            .iter()
            .enumerate()
            .map(|(i, o)| levels[m.dom].legs[i].after(&o.restrict[k]))
            .collect::<Result<Vec<_>>>()?;
        restrict.push(levels[m.cod].mediate(&objs, &arrs, &at[m.dom], &legs)?);
    }
    let apex = Presheaf::new(base.clone(), at, restrict)?;
    let legs = objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            PresheafMap::new(o.clone(), apex.clone(), levels.iter().map(|l| l.legs[i].clone()).collect())
        })
        .collect::<Result<_>>()?;
    Ok(PresheafColimit { apex, legs, levels })
}

impl PresheafColimit {
    pub fn mediate(
        &self,
        objects: &[Presheaf],
        arrows: &[(usize, usize, PresheafMap)],
        target: &Presheaf,
        legs: &[PresheafMap],
    ) -> Result<PresheafMap> {
        if legs.len() != objects.len() {
            return Err(Error::NotACocone("one leg per diagram object is required".into()));
        }
        let components = (0..self.levels.len())
            .map(|c| {
                let objs: Vec<FinSet> = objects.iter().map(|o| o.at[c].clone()).collect();
                let arrs: Vec<(usize, usize, FinFunction)> = arrows
                    .iter()
                    .map(|(s, t, f)| (*s, *t, f.components[c].clone()))
                    .collect();
                let level_legs: Vec<FinFunction> = legs.iter().map(|l| l.components[c].clone()).collect();
                self.levels[c].mediate(&objs, &arrs, &target.at[c], &level_legs)
            })
            .collect::<Result<_>>()?;
        PresheafMap::new(self.apex.clone(), target.clone(), components)
    }
}

/// Levelwise pullback.
#[derive(Clone, Debug)]
pub struct PresheafPullback {
    pub apex: Presheaf,
    pub proj_a: PresheafMap,
    pub proj_b: PresheafMap,
    levels: Vec<finset::Pullback>,
}

pub fn pullback(f: &PresheafMap, g: &PresheafMap) -> Result<PresheafPullback> {
    if f.target != g.target {
        return Err(Error::CodomainMismatch("pullback legs do not share a codomain".into()));
    }
    let base = f.source.base.clone();
    let levels: Vec<finset::Pullback> = (0..base.object_count())
        .map(|c| finset::pullback(&f.components[c], &g.components[c]))
        .collect::<Result<_>>()?;
    let at: Vec<FinSet> = levels.iter().map(|l| l.apex.clone()).collect();
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let p = f.source.restrict[k].after(&levels[m.cod].proj_a)?;
        let q = g.source.restrict[k].after(&levels[m.cod].proj_b)?;
        restrict.push(levels[m.dom].factor(&p, &q)?);
    }
    let apex = Presheaf::new(base, at, restrict)?;
    let proj_a = PresheafMap::new(apex.clone(), f.source.clone(), levels.iter().map(|l| l.proj_a.clone()).collect())?;
    let proj_b = PresheafMap::new(apex.clone(), g.source.clone(), levels.iter().map(|l| l.proj_b.clone()).collect())?;
    Ok(PresheafPullback {
        apex,
        proj_a,
        proj_b,
        levels,
    })
}

impl PresheafPullback {
    pub fn factor(&self, p: &PresheafMap, q: &PresheafMap) -> Result<PresheafMap> {
        let components = (0..self.levels.len())
            .map(|c| self.levels[c].factor(&p.components[c], &q.components[c]))
            .collect::<Result<_>>()?;
        PresheafMap::new(p.source.clone(), self.apex.clone(), components)
    }
}

#[derive(Serialize, Deserialize)]
struct PresheafFile {
    base: FinCategory,
    at: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    restrict: serde_json::Map<String, serde_json::Value>,
}

impl Serialize for Presheaf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b = &self.base;
        let at = (0..b.object_count())
            .map(|c| (b.object_name(c).to_string(), serde_json::to_value(&self.at[c]).expect("finset")))
            .collect();
        let restrict = b
            .non_identity()
            .map(|k| (b.morphism(k).name.clone(), serde_json::to_value(self.restrict[k].table()).expect("table")))
            .collect();
        PresheafFile {
            base: (**b).clone(),
            at,
            restrict,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presheaf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = PresheafFile::deserialize(d)?;
        let base = Arc::new(file.base);
        presheaf_from_parts(base, &file.at, &file.restrict).map_err(D::Error::custom)
    }
}

pub(crate) fn presheaf_from_parts(
    base: Arc<FinCategory>,
    at: &serde_json::Map<String, serde_json::Value>,
    restrict: &serde_json::Map<String, serde_json::Value>,
) -> Result<Presheaf> {
    let mut levels = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let v = at
            .get(c)
            .ok_or_else(|| Error::malformed(format!("presheaf has no set at `{c}`")))?;
        levels.push(serde_json::from_value::<FinSet>(v.clone()).map_err(|e| Error::malformed(e.to_string()))?);
    }
    if at.len() != base.object_count() {
        return Err(Error::malformed("presheaf names an unknown object"));
    }
    let mut maps = Vec::new();
    for k in base.non_identity() {
        let m = base.morphism(k);
        let v = restrict
            .get(&m.name)
            .ok_or_else(|| Error::malformed(format!("presheaf has no restriction along `{}`", m.name)))?;
        let table: Vec<usize> = serde_json::from_value(v.clone()).map_err(|e| Error::malformed(e.to_string()))?;
        maps.push(FinFunction::new(levels[m.cod].clone(), levels[m.dom].clone(), table)?);
    }
    if restrict.len() != base.non_identity().len() {
        return Err(Error::malformed("presheaf restricts along an unknown morphism"));
    }
    Presheaf::from_non_identity(base, levels, maps)
}

#[derive(Serialize, Deserialize)]
struct PresheafMapFile {
    source: Presheaf,
    target: Presheaf,
    components: serde_json::Map<String, serde_json::Value>,
}

impl Serialize for PresheafMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b = &self.source.base;
        let components = (0..b.object_count())
            .map(|c| (b.object_name(c).to_string(), serde_json::to_value(self.components[c].table()).expect("table")))
            .collect();
        PresheafMapFile {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PresheafMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = PresheafMapFile::deserialize(d)?;
        presheaf_map_from_parts(file.source, file.target, &file.components).map_err(D::Error::custom)
    }
}

pub(crate) fn presheaf_map_from_parts(
    source: Presheaf,
    target: Presheaf,
    components: &serde_json::Map<String, serde_json::Value>,
) -> Result<PresheafMap> {
    let base = source.base.clone();
    let mut comps = Vec::with_capacity(base.object_count());
    for (c, name) in base.objects().iter().enumerate() {
        let v = components
            .get(name)
            .ok_or_else(|| Error::malformed(format!("presheaf map has no component at `{name}`")))?;
        let table: Vec<usize> = serde_json::from_value(v.clone()).map_err(|e| Error::malformed(e.to_string()))?;
        comps.push(FinFunction::new(source.at[c].clone(), target.at[c].clone(), table)?);
    }
    PresheafMap::new(source, target, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DEFAULT_CAP;

    fn arrow_base() -> Arc<FinCategory> {
        Arc::new(FinCategory::walking_arrow())
    }

    /// Presheaf on `x → y` with `F(y) → F(x)` given by `table`.
    fn on_arrow(x: usize, y: usize, table: &[usize]) -> Presheaf {
        let r = FinFunction::new(FinSet::of_size(y), FinSet::of_size(x), table.to_vec()).unwrap();
        Presheaf::from_non_identity(arrow_base(), vec![FinSet::of_size(x), FinSet::of_size(y)], vec![r]).unwrap()
    }

    #[test]
    fn yoneda_sizes() {
        let t = Arc::new(FinCategory::terminal());
        assert_eq!(yoneda(&t, "*").unwrap().sizes(), vec![1]);
        let b = arrow_base();
        assert_eq!(yoneda(&b, "y").unwrap().sizes(), vec![1, 1]);
        assert_eq!(yoneda(&b, "x").unwrap().sizes(), vec![1, 0]);
        assert!(matches!(yoneda(&b, "z"), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn classifier_sizes() {
        let t = Arc::new(FinCategory::terminal());
        assert_eq!(subobject_classifier(&t).unwrap().omega.sizes(), vec![2]);
        let w = subobject_classifier(&arrow_base()).unwrap();
        assert_eq!(w.omega.sizes(), vec![2, 3]);
        assert!(w.omega.validate().is_valid());
        let d = Arc::new(FinCategory::discrete(&["p", "q"]));
        assert_eq!(subobject_classifier(&d).unwrap().omega.sizes(), vec![2, 2]);
    }

    #[test]
    fn pullback_classify_examples() {
        let t = Arc::new(FinCategory::terminal());
        let w = subobject_classifier(&t).unwrap();
        let one = Presheaf::terminal(t.clone());
        let pick = |s: usize| {
            PresheafMap::new(
                one.clone(),
                w.omega.clone(),
                vec![FinFunction::new(FinSet::singleton(), w.omega.at(0).clone(), vec![s]).unwrap()],
            )
            .unwrap()
        };
        let truthy = w.omega.at(0).position("{id_*}").unwrap();
        let falsy = w.omega.at(0).position("{}").unwrap();
        assert!(pullback_classify(&w.truth, &pick(truthy)).unwrap().is_iso());
        assert_eq!(pullback_classify(&w.truth, &pick(falsy)).unwrap().source().sizes(), vec![0]);

        let b = arrow_base();
        let w = subobject_classifier(&b).unwrap();
        let yy = yoneda(&b, "y").unwrap();
        // The sieve {m} at y, as a map よy → Ω.
        let s = w.omega.at(1).position("{m}").unwrap();
        let a = enumerate_maps(&yy, &w.omega, DEFAULT_CAP)
            .unwrap()
            .into_iter()
            .find(|a| a.component(1).apply(0) == s)
            .unwrap();
        let sub = pullback_classify(&w.truth, &a).unwrap();
        assert_eq!(sub.source().sizes(), vec![1, 0]);
        assert_eq!(w.classify(&sub).unwrap(), a);
    }

    #[test]
    fn element_categories() {
        let t = Arc::new(FinCategory::terminal());
        let el = element_category(&Presheaf::terminal(t.clone())).unwrap();
        assert_eq!(el.category.object_count(), 1);
        let el = element_category(&subobject_classifier(&t).unwrap().omega).unwrap();
        assert_eq!(el.category.object_count(), 2);
        assert!(el.category.is_discrete());
        let el = element_category(&subobject_classifier(&arrow_base()).unwrap().omega).unwrap();
        assert_eq!(el.category.object_count(), 5);
        assert_eq!(el.category.non_identity().len(), 3);
        assert!(el.category.validate().is_valid());
    }

    #[test]
    fn enumerate_maps_examples() {
        let f = on_arrow(2, 1, &[1]);
        let one = Presheaf::terminal(arrow_base());
        assert_eq!(enumerate_maps(&f, &one, DEFAULT_CAP).unwrap().len(), 1);
        let g = on_arrow(2, 2, &[1, 0]);
        let yx = yoneda(&arrow_base(), "x").unwrap();
        assert_eq!(enumerate_maps(&yx, &g, DEFAULT_CAP).unwrap().len(), 2);
        // F(y) nonempty but G(y) empty: nothing natural.
        let h = on_arrow(2, 0, &[]);
        assert_eq!(enumerate_maps(&f, &h, DEFAULT_CAP).unwrap().len(), 0);
    }

    #[test]
    fn colimit_restrictions_are_induced() {
        let f = on_arrow(1, 1, &[0]);
        let p = colimit(&arrow_base(), &[f.clone(), f], &["l".into(), "r".into()], &[]).unwrap();
        assert_eq!(p.apex.sizes(), vec![2, 2]);
        assert!(p.apex.validate().is_valid());
        assert_eq!(p.apex.restrict(2).table(), &[0, 1]);
    }

    #[test]
    fn json_round_trip() {
        let f = on_arrow(2, 1, &[1]);
        let text = serde_json::to_string(&f).unwrap();
        let back: Presheaf = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let id = PresheafMap::identity(&f);
        let back: PresheafMap = serde_json::from_str(&serde_json::to_string(&id).unwrap()).unwrap();
        assert_eq!(back, id);
    }
}

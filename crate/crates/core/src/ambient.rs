//! The ambient-category interface every construction is generic over, with the two base
//! instances: finite sets and presheaves on a fixed finite base.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::fincat::FinCategory;
use crate::finset::{self, FinFunction, FinSet, SetColimit};
use crate::presheaf::{self, Presheaf, PresheafColimit, PresheafMap};

/// A wide subcategory used to certify where unit components land.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backdrop {
    All,
    Mono,
    /// Squares whose domain component lies in the inner class.
    DomainComponentIn(Box<Backdrop>),
}

impl Backdrop {
    pub fn describe(&self) -> String {
        match self {
            Backdrop::All => "all".into(),
            Backdrop::Mono => "mono".into(),
            Backdrop::DomainComponentIn(inner) => format!("dom({})", inner.describe()),
        }
    }
}

/// A finite diagram: objects with tags (used to disambiguate colimit labels) and arrows
/// `(source index, target index, morphism)`.
#[derive(Clone, Debug)]
pub struct Diagram<C: Ambient> {
    pub objects: Vec<C::Obj>,
    pub tags: Vec<String>,
    pub arrows: Vec<(usize, usize, C::Mor)>,
}

impl<C: Ambient> Default for Diagram<C> {
    fn default() -> Self {
        Diagram {
            objects: vec![],
            tags: vec![],
            arrows: vec![],
        }
    }
}

impl<C: Ambient> Diagram<C> {
    pub fn add_object(&mut self, x: C::Obj, tag: impl Into<String>) -> usize {
        self.objects.push(x);
        self.tags.push(tag.into());
        self.objects.len() - 1
    }

    pub fn add_arrow(&mut self, s: usize, t: usize, m: C::Mor) {
        self.arrows.push((s, t, m));
    }
}

#[derive(Clone, Debug)]
pub struct Colimit<C: Ambient> {
    pub diagram: Diagram<C>,
    pub apex: C::Obj,
    pub legs: Vec<C::Mor>,
    pub witness: C::Witness,
}

/// Pushout of `f: A → B` and `g: A → C`, computed as the colimit of `[B, C, A]`.
#[derive(Clone, Debug)]
pub struct Pushout<C: Ambient> {
    pub f: C::Mor,
    pub g: C::Mor,
    pub apex: C::Obj,
    pub in_left: C::Mor,
    pub in_right: C::Mor,
    pub colimit: Colimit<C>,
}

impl<C: Ambient> Pushout<C> {
    pub fn mediate(&self, amb: &C, target: &C::Obj, to_left: &C::Mor, to_right: &C::Mor) -> Result<C::Mor> {
        let to_span = amb.compose(to_left, &self.f)?;
        amb.mediate(&self.colimit, target, &[to_left.clone(), to_right.clone(), to_span])
    }
}

pub trait Ambient: Clone + Debug + PartialEq + Eq + Hash {
    type Obj: Clone + Eq + Hash + Debug + Serialize + DeserializeOwned;
    type Mor: Clone + Eq + Hash + Debug + Serialize + DeserializeOwned;
    type Witness: Clone + Debug;

    fn name(&self) -> String;
    fn dom(&self, m: &Self::Mor) -> Self::Obj;
    fn cod(&self, m: &Self::Mor) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor>;
    fn initial(&self) -> Self::Obj;
    fn colimit(&self, diagram: &Diagram<Self>) -> Result<Colimit<Self>>;
    /// The unique map out of the apex factoring `legs`; rejects non-cocones.
    fn mediate(&self, colimit: &Colimit<Self>, target: &Self::Obj, legs: &[Self::Mor]) -> Result<Self::Mor>;
    fn homs(&self, a: &Self::Obj, b: &Self::Obj, cap: usize) -> Result<Vec<Self::Mor>>;
    fn isos(&self, a: &Self::Obj, b: &Self::Obj, limit: Option<usize>, cap: usize) -> Result<Vec<Self::Mor>>;
    fn is_mono(&self, m: &Self::Mor) -> bool;
    fn is_iso(&self, m: &Self::Mor) -> bool;
    fn inverse(&self, m: &Self::Mor) -> Option<Self::Mor>;
    /// Element counts, for reports.
    fn sizes(&self, x: &Self::Obj) -> Vec<usize>;

    fn in_backdrop(&self, backdrop: &Backdrop, m: &Self::Mor) -> Result<bool> {
        match backdrop {
            Backdrop::All => Ok(true),
            Backdrop::Mono => Ok(self.is_mono(m)),
            Backdrop::DomainComponentIn(_) => Err(Error::malformed(format!(
                "a domain-component backdrop needs an arrow category, not {}",
                self.name()
            ))),
        }
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Pushout<Self>> {
        if self.dom(f) != self.dom(g) {
            return Err(Error::DomainMismatch("pushout legs do not share a domain".into()));
        }
        let mut d = Diagram::default();
        let b = d.add_object(self.cod(f), "inl");
        let c = d.add_object(self.cod(g), "inr");
        let a = d.add_object(self.dom(f), "span");
        d.add_arrow(a, b, f.clone());
        d.add_arrow(a, c, g.clone());
        let colimit = self.colimit(&d)?;
        Ok(Pushout {
            f: f.clone(),
            g: g.clone(),
            apex: colimit.apex.clone(),
            in_left: colimit.legs[0].clone(),
            in_right: colimit.legs[1].clone(),
            colimit,
        })
    }

    fn coproduct_of(&self, xs: &[Self::Obj]) -> Result<Colimit<Self>> {
        let mut d = Diagram::default();
        for (i, x) in xs.iter().enumerate() {
            d.add_object(x.clone(), format!("c{i}"));
        }
        self.colimit(&d)
    }

    fn from_initial(&self, x: &Self::Obj) -> Result<Self::Mor> {
        let empty = self.colimit(&Diagram::default())?;
        self.mediate(&empty, x, &[])
    }

    fn find_iso(&self, a: &Self::Obj, b: &Self::Obj, cap: usize) -> Result<Option<Self::Mor>> {
        Ok(self.isos(a, b, Some(1), cap)?.into_iter().next())
    }
}

/// Base ambients additionally support constrained enumeration and pullbacks.
pub trait BaseAmbient: Ambient {
    /// All `h: source → dom along` with `along ∘ h = over`.
    fn lifts(&self, source: &Self::Obj, along: &Self::Mor, over: &Self::Mor, cap: usize) -> Result<Vec<Self::Mor>>;
    /// All `ψ: cod u → dom f` with `ψ ∘ u = top` and `f ∘ ψ = bottom`.
    fn fillers(
        &self,
        u: &Self::Mor,
        f: &Self::Mor,
        top: &Self::Mor,
        bottom: &Self::Mor,
        cap: usize,
    ) -> Result<Vec<Self::Mor>>;
    /// Whether the square `g ∘ top = bottom ∘ f` is a pullback.
    fn is_cartesian(&self, f: &Self::Mor, g: &Self::Mor, top: &Self::Mor, bottom: &Self::Mor) -> Result<bool>;
    /// Image of every element under `m`, levels concatenated in object order.
    fn element_images(&self, m: &Self::Mor) -> Vec<usize>;
}

/// Endofunctors given as computable maps.
pub trait Endofunctor<C: Ambient> {
    fn apply(&self, x: &C::Obj) -> Result<C::Obj>;
    fn map(&self, m: &C::Mor) -> Result<C::Mor>;
}

/// An endofunctor with a unit `τ_X: X → T X`.
pub trait PointedEndofunctor<C: Ambient>: Endofunctor<C> {
    fn unit(&self, x: &C::Obj) -> Result<C::Mor>;
}

/// The identity endofunctor with identity unit.
#[derive(Clone, Debug)]
pub struct IdentityEndofunctor<C: Ambient>(pub C);

impl<C: Ambient> Endofunctor<C> for IdentityEndofunctor<C> {
    fn apply(&self, x: &C::Obj) -> Result<C::Obj> {
        Ok(x.clone())
    }

    fn map(&self, m: &C::Mor) -> Result<C::Mor> {
        Ok(m.clone())
    }
}

impl<C: Ambient> PointedEndofunctor<C> for IdentityEndofunctor<C> {
    fn unit(&self, x: &C::Obj) -> Result<C::Mor> {
        Ok(self.0.identity(x))
    }
}

/// A functor between (possibly different) ambients.
pub trait AmbientFunctor<C: Ambient, D: Ambient> {
    fn name(&self) -> String;
    fn map_obj(&self, x: &C::Obj) -> Result<D::Obj>;
    fn map_mor(&self, m: &C::Mor) -> Result<D::Mor>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SetAmbient;

fn permutations(n: usize, limit: Option<usize>, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut visited: u128 = 0;
    loop {
        visited += 1;
        check_cap(visited, cap)?;
        out.push(perm.clone());
        if limit.map_or(false, |l| out.len() >= l) {
            return Ok(out);
        }
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return Ok(out);
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).expect("successor");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

impl Ambient for SetAmbient {
    type Obj = FinSet;
    type Mor = FinFunction;
    type Witness = SetColimit;

    fn name(&self) -> String {
        "finset".into()
    }

    fn dom(&self, m: &FinFunction) -> FinSet {
        m.dom().clone()
    }

    fn cod(&self, m: &FinFunction) -> FinSet {
        m.cod().clone()
    }

    fn identity(&self, x: &FinSet) -> FinFunction {
        FinFunction::identity(x)
    }

    fn compose(&self, g: &FinFunction, f: &FinFunction) -> Result<FinFunction> {
        g.after(f)
    }

    fn initial(&self) -> FinSet {
        FinSet::empty()
    }

    fn colimit(&self, d: &Diagram<Self>) -> Result<Colimit<Self>> {
        let c = finset::colimit(&d.objects, &d.tags, &d.arrows)?;
        Ok(Colimit {
            diagram: d.clone(),
            apex: c.apex.clone(),
            legs: c.legs.clone(),
            witness: c,
        })
    }

    fn mediate(&self, c: &Colimit<Self>, target: &FinSet, legs: &[FinFunction]) -> Result<FinFunction> {
        c.witness.mediate(&c.diagram.objects, &c.diagram.arrows, target, legs)
    }

    fn homs(&self, a: &FinSet, b: &FinSet, cap: usize) -> Result<Vec<FinFunction>> {
        finset::enumerate_functions(a, b, cap)
    }

    fn isos(&self, a: &FinSet, b: &FinSet, limit: Option<usize>, cap: usize) -> Result<Vec<FinFunction>> {
        if a.size() != b.size() {
            return Ok(vec![]);
        }
        Ok(permutations(a.size(), limit, cap)?
            .into_iter()
            .map(|p| FinFunction::new_unchecked(a.clone(), b.clone(), p))
            .collect())
    }

    fn is_mono(&self, m: &FinFunction) -> bool {
        m.is_injective()
    }

    fn is_iso(&self, m: &FinFunction) -> bool {
        m.is_bijective()
    }

    fn inverse(&self, m: &FinFunction) -> Option<FinFunction> {
        m.inverse()
    }

    fn sizes(&self, x: &FinSet) -> Vec<usize> {
        vec![x.size()]
    }
}

impl BaseAmbient for SetAmbient {
    fn element_images(&self, m: &FinFunction) -> Vec<usize> {
        m.table().to_vec()
    }

    fn lifts(&self, source: &FinSet, along: &FinFunction, over: &FinFunction, cap: usize) -> Result<Vec<FinFunction>> {
        finset::lifts(source, along, over, cap)
    }

    fn fillers(
        &self,
        u: &FinFunction,
        f: &FinFunction,
        top: &FinFunction,
        bottom: &FinFunction,
        cap: usize,
    ) -> Result<Vec<FinFunction>> {
        finset::fillers(u, f, top, bottom, cap)
    }

    fn is_cartesian(&self, f: &FinFunction, g: &FinFunction, top: &FinFunction, bottom: &FinFunction) -> Result<bool> {
        let pb = finset::pullback(bottom, g)?;
        Ok(pb.factor(f, top)?.is_bijective())
    }
}

/// Presheaves on a fixed finite base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PshAmbient {
    pub base: Arc<FinCategory>,
}

impl PshAmbient {
    pub fn new(base: Arc<FinCategory>) -> Self {
        PshAmbient { base }
    }
}

impl Ambient for PshAmbient {
    type Obj = Presheaf;
    type Mor = PresheafMap;
    type Witness = PresheafColimit;

    fn name(&self) -> String {
        "presheaf".into()
    }

    fn dom(&self, m: &PresheafMap) -> Presheaf {
        m.source().clone()
    }

    fn cod(&self, m: &PresheafMap) -> Presheaf {
        m.target().clone()
    }

    fn identity(&self, x: &Presheaf) -> PresheafMap {
        PresheafMap::identity(x)
    }

    fn compose(&self, g: &PresheafMap, f: &PresheafMap) -> Result<PresheafMap> {
        g.after(f)
    }

    fn initial(&self) -> Presheaf {
        Presheaf::empty(self.base.clone())
    }

    fn colimit(&self, d: &Diagram<Self>) -> Result<Colimit<Self>> {
        let c = presheaf::colimit(&self.base, &d.objects, &d.tags, &d.arrows)?;
        Ok(Colimit {
            diagram: d.clone(),
            apex: c.apex.clone(),
            legs: c.legs.clone(),
            witness: c,
        })
    }

    fn mediate(&self, c: &Colimit<Self>, target: &Presheaf, legs: &[PresheafMap]) -> Result<PresheafMap> {
        c.witness.mediate(&c.diagram.objects, &c.diagram.arrows, target, legs)
    }

    fn homs(&self, a: &Presheaf, b: &Presheaf, cap: usize) -> Result<Vec<PresheafMap>> {
        presheaf::enumerate_maps(a, b, cap)
    }

    fn isos(&self, a: &Presheaf, b: &Presheaf, limit: Option<usize>, cap: usize) -> Result<Vec<PresheafMap>> {
        presheaf::enumerate_isos(a, b, limit, cap)
    }

    fn is_mono(&self, m: &PresheafMap) -> bool {
        m.is_mono()
    }

    fn is_iso(&self, m: &PresheafMap) -> bool {
        m.is_iso()
    }

    fn inverse(&self, m: &PresheafMap) -> Option<PresheafMap> {
        m.inverse()
    }

    fn sizes(&self, x: &Presheaf) -> Vec<usize> {
        x.sizes()
    }
}

impl BaseAmbient for PshAmbient {
    fn element_images(&self, m: &PresheafMap) -> Vec<usize> {
        let mut offset = 0;
        let mut out = Vec::new();
        for c in m.components() {
            out.extend(c.table().iter().map(|&y| y + offset));
            offset += c.cod().size();
        }
        out
    }

    fn lifts(&self, source: &Presheaf, along: &PresheafMap, over: &PresheafMap, cap: usize) -> Result<Vec<PresheafMap>> {
        presheaf::lifts(source, along, over, cap)
    }

    fn fillers(
        &self,
        u: &PresheafMap,
        f: &PresheafMap,
        top: &PresheafMap,
        bottom: &PresheafMap,
        cap: usize,
    ) -> Result<Vec<PresheafMap>> {
        presheaf::fillers(u, f, top, bottom, cap)
    }

    fn is_cartesian(&self, f: &PresheafMap, g: &PresheafMap, top: &PresheafMap, bottom: &PresheafMap) -> Result<bool> {
        let pb = presheaf::pullback(bottom, g)?;
        Ok(pb.factor(f, top)?.is_iso())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3, None, 100).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(0, None, 10).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn generic_pushout_matches_finset_pushout() {
        let amb = SetAmbient;
        let f = FinFunction::new(FinSet::of_size(2), FinSet::of_size(1), vec![0, 0]).unwrap();
        let g = FinFunction::identity(&FinSet::of_size(2));
        let p = amb.pushout(&f, &g).unwrap();
        let q = finset::pushout(&f, &g).unwrap();
        assert_eq!(p.apex, q.apex);
        assert_eq!(p.in_left, q.in_b);
        assert_eq!(p.in_right, q.in_c);
    }

    #[test]
    fn initial_maps_are_unique() {
        let amb = SetAmbient;
        let x = FinSet::of_size(3);
        assert_eq!(amb.from_initial(&x).unwrap(), FinFunction::from_empty(&x));
    }
}

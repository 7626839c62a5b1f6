//! The arrow category of an ambient: arrows as objects, commuting squares as morphisms.

use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Backdrop, BaseAmbient, Colimit, Diagram, Endofunctor, PointedEndofunctor, Pushout};
use crate::error::{check_cap, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent, bound = "")]
pub struct ArrowObj<E: Ambient> {
    pub map: E::Mor,
}

impl<E: Ambient> ArrowObj<E> {
    pub fn new(map: E::Mor) -> Self {
        ArrowObj { map }
    }
}

/// A commuting square `source → target`: `target ∘ top = bottom ∘ source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Square<E: Ambient> {
    pub source: ArrowObj<E>,
    pub target: ArrowObj<E>,
    pub top: E::Mor,
    pub bottom: E::Mor,
}

impl<E: Ambient> Square<E> {
    pub fn new(amb: &E, source: ArrowObj<E>, target: ArrowObj<E>, top: E::Mor, bottom: E::Mor) -> Result<Self> {
        if amb.dom(&top) != amb.dom(&source.map) || amb.cod(&top) != amb.dom(&target.map) {
            return Err(Error::BoundaryMismatch("top edge does not join the domains".into()));
        }
        if amb.dom(&bottom) != amb.cod(&source.map) || amb.cod(&bottom) != amb.cod(&target.map) {
            return Err(Error::BoundaryMismatch("bottom edge does not join the codomains".into()));
        }
        if amb.compose(&target.map, &top)? != amb.compose(&bottom, &source.map)? {
            return Err(Error::NotCommuting("target ∘ top ≠ bottom ∘ source".into()));
        }
        Ok(Square {
            source,
            target,
            top,
            bottom,
        })
    }

    pub fn identity(amb: &E, f: &ArrowObj<E>) -> Self {
        Square {
            source: f.clone(),
            target: f.clone(),
            top: amb.identity(&amb.dom(&f.map)),
            bottom: amb.identity(&amb.cod(&f.map)),
        }
    }
}

/// Pasting side by side: `first: f → g` then `second: g → h`.
pub fn compose_horizontal<E: Ambient>(amb: &E, first: &Square<E>, second: &Square<E>) -> Result<Square<E>> {
    if first.target != second.source {
        return Err(Error::BoundaryMismatch("horizontal pasting needs a shared middle arrow".into()));
    }
    Ok(Square {
        source: first.source.clone(),
        target: second.target.clone(),
        top: amb.compose(&second.top, &first.top)?,
        bottom: amb.compose(&second.bottom, &first.bottom)?,
    })
}

/// Pasting one above the other: `lower.top` must be `upper.bottom`.
pub fn compose_vertical<E: Ambient>(amb: &E, upper: &Square<E>, lower: &Square<E>) -> Result<Square<E>> {
    if upper.bottom != lower.top {
        return Err(Error::BoundaryMismatch("vertical pasting needs a shared middle edge".into()));
    }
    Ok(Square {
        source: ArrowObj::new(amb.compose(&lower.source.map, &upper.source.map)?),
        target: ArrowObj::new(amb.compose(&lower.target.map, &upper.target.map)?),
        top: upper.top.clone(),
        bottom: lower.bottom.clone(),
    })
}

/// Witness of an arrow-category colimit: the two levelwise colimits.
#[derive(Clone, Debug)]
pub struct ArrWitness<E: Ambient> {
    pub dom: Colimit<E>,
    pub cod: Colimit<E>,
}

/// `Arr(E)` with levelwise colimits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrAmbient<E: BaseAmbient> {
    pub base: E,
}

impl<E: BaseAmbient> ArrAmbient<E> {
    pub fn new(base: E) -> Self {
        ArrAmbient { base }
    }

    pub fn square(&self, source: &ArrowObj<E>, target: &ArrowObj<E>, top: E::Mor, bottom: E::Mor) -> Result<Square<E>> {
        Square::new(&self.base, source.clone(), target.clone(), top, bottom)
    }

    pub fn dom_of(&self, f: &ArrowObj<E>) -> E::Obj {
        self.base.dom(&f.map)
    }

    pub fn cod_of(&self, f: &ArrowObj<E>) -> E::Obj {
        self.base.cod(&f.map)
    }

    fn levels(&self, d: &Diagram<Self>) -> (Diagram<E>, Diagram<E>) {
        let mut dom = Diagram::default();
        let mut cod = Diagram::default();
        for (x, tag) in d.objects.iter().zip(&d.tags) {
            dom.add_object(self.base.dom(&x.map), tag.clone());
            cod.add_object(self.base.cod(&x.map), tag.clone());
        }
        for (s, t, sq) in &d.arrows {
            dom.add_arrow(*s, *t, sq.top.clone());
            cod.add_arrow(*s, *t, sq.bottom.clone());
        }
        (dom, cod)
    }

    /// Squares `f → g` whose bottom edge is drawn from `bottoms`.
    fn squares_over(
        &self,
        f: &ArrowObj<E>,
        g: &ArrowObj<E>,
        bottoms: Vec<E::Mor>,
        iso_tops: bool,
        limit: Option<usize>,
        cap: usize,
    ) -> Result<Vec<Square<E>>> {
        let mut out = Vec::new();
        let mut visited: u128 = 0;
        for bottom in bottoms {
            let over = self.base.compose(&bottom, &f.map)?;
            for top in self.base.lifts(&self.dom_of(f), &g.map, &over, cap)? {
                visited += 1;
                check_cap(visited, cap)?;
                if iso_tops && !self.base.is_iso(&top) {
                    continue;
                }
                out.push(Square {
                    source: f.clone(),
                    target: g.clone(),
                    top,
                    bottom: bottom.clone(),
                });
                if limit.map_or(false, |l| out.len() >= l) {
                    return Ok(out);
                }
            }
        }
        Ok(out)
    }
}

impl<E: BaseAmbient> Ambient for ArrAmbient<E> {
    type Obj = ArrowObj<E>;
    type Mor = Square<E>;
    type Witness = ArrWitness<E>;

    fn name(&self) -> String {
        format!("arr({})", self.base.name())
    }

    fn dom(&self, m: &Square<E>) -> ArrowObj<E> {
        m.source.clone()
    }

    fn cod(&self, m: &Square<E>) -> ArrowObj<E> {
        m.target.clone()
    }

    fn identity(&self, x: &ArrowObj<E>) -> Square<E> {
        Square::identity(&self.base, x)
    }

    fn compose(&self, g: &Square<E>, f: &Square<E>) -> Result<Square<E>> {
        compose_horizontal(&self.base, f, g)
    }

    fn initial(&self) -> ArrowObj<E> {
        ArrowObj::new(self.base.identity(&self.base.initial()))
    }

    fn colimit(&self, d: &Diagram<Self>) -> Result<Colimit<Self>> {
        let (dd, cd) = self.levels(d);
        let dom = self.base.colimit(&dd)?;
        let cod = self.base.colimit(&cd)?;
        let legs_into_cod = d
            .objects
            .iter()
            .zip(&cod.legs)
            .map(|(x, leg)| self.base.compose(leg, &x.map))
            .collect::<Result<Vec<_>>>()?;
        let apex = ArrowObj::new(self.base.mediate(&dom, &cod.apex, &legs_into_cod)?);
        let legs = d
            .objects
            .iter()
            .enumerate()
            .map(|(i, x)| Square {
                source: x.clone(),
                target: apex.clone(),
                top: dom.legs[i].clone(),
                bottom: cod.legs[i].clone(),
            })
            .collect();
        Ok(Colimit {
            diagram: d.clone(),
            apex,
            legs,
            witness: ArrWitness { dom, cod },
        })
    }

    fn mediate(&self, c: &Colimit<Self>, target: &ArrowObj<E>, legs: &[Square<E>]) -> Result<Square<E>> {
        if legs.len() != c.legs.len() {
            return Err(Error::NotACocone("one leg per diagram object is required".into()));
        }
        for (leg, x) in legs.iter().zip(&c.diagram.objects) {
            if leg.source != *x || leg.target != *target {
                return Err(Error::NotACocone("leg has the wrong boundary".into()));
            }
        }
        let tops: Vec<E::Mor> = legs.iter().map(|l| l.top.clone()).collect();
        let bottoms: Vec<E::Mor> = legs.iter().map(|l| l.bottom.clone()).collect();
        let top = self.base.mediate(&c.witness.dom, &self.dom_of(target), &tops)?;
        let bottom = self.base.mediate(&c.witness.cod, &self.cod_of(target), &bottoms)?;
        self.square(&c.apex, target, top, bottom)
    }

    fn homs(&self, a: &ArrowObj<E>, b: &ArrowObj<E>, cap: usize) -> Result<Vec<Square<E>>> {
        let bottoms = self.base.homs(&self.cod_of(a), &self.cod_of(b), cap)?;
        self.squares_over(a, b, bottoms, false, None, cap)
    }

    fn isos(&self, a: &ArrowObj<E>, b: &ArrowObj<E>, limit: Option<usize>, cap: usize) -> Result<Vec<Square<E>>> {
        let bottoms = self.base.isos(&self.cod_of(a), &self.cod_of(b), None, cap)?;
        self.squares_over(a, b, bottoms, true, limit, cap)
    }

    fn is_mono(&self, m: &Square<E>) -> bool {
        self.base.is_mono(&m.top) && self.base.is_mono(&m.bottom)
    }

    fn is_iso(&self, m: &Square<E>) -> bool {
        self.base.is_iso(&m.top) && self.base.is_iso(&m.bottom)
    }

    fn inverse(&self, m: &Square<E>) -> Option<Square<E>> {
        Some(Square {
            source: m.target.clone(),
            target: m.source.clone(),
            top: self.base.inverse(&m.top)?,
            bottom: self.base.inverse(&m.bottom)?,
        })
    }

    fn sizes(&self, x: &ArrowObj<E>) -> Vec<usize> {
        let mut s = self.base.sizes(&self.dom_of(x));
        s.extend(self.base.sizes(&self.cod_of(x)));
        s
    }

    fn in_backdrop(&self, backdrop: &Backdrop, m: &Square<E>) -> Result<bool> {
        match backdrop {
            Backdrop::All => Ok(true),
            Backdrop::Mono => Ok(self.is_mono(m)),
            Backdrop::DomainComponentIn(inner) => self.base.in_backdrop(inner, &m.top),
        }
    }
}

/// The gap map of a naturality square, with the pushout it leaves.
#[derive(Clone, Debug)]
pub struct Leibniz<C: Ambient> {
    /// Pushout of `F f: F A → F B` and `α_A: F A → G A`.
    pub pushout: Pushout<C>,
    /// `[α_B, G f]: F B ⊔_{F A} G A → G B`.
    pub gap: C::Mor,
}

/// Leibniz pushout application of `alpha: F ⇒ G` at `f: A → B`.
pub fn leibniz_pushout_apply<C: Ambient, F: Endofunctor<C> + ?Sized, G: Endofunctor<C> + ?Sized>(
    amb: &C,
    source: &F,
    target: &G,
    alpha: &dyn Fn(&C::Obj) -> Result<C::Mor>,
    f: &C::Mor,
) -> Result<Leibniz<C>> {
    let alpha_a = alpha(&amb.dom(f))?;
    let alpha_b = alpha(&amb.cod(f))?;
    let ff = source.map(f)?;
    let gf = target.map(f)?;
    if amb.compose(&gf, &alpha_a)? != amb.compose(&alpha_b, &ff)? {
        return Err(Error::NaturalityViolation("G f ∘ α_A ≠ α_B ∘ F f".into()));
    }
    let pushout = amb.pushout(&ff, &alpha_a)?;
    let gap = pushout.mediate(amb, &amb.cod(&gf), &alpha_b, &gf)?;
    Ok(Leibniz { pushout, gap })
}

/// `f ↦ id_{cod f}` with unit `(f, id): f → id_{cod f}`.
#[derive(Clone, Debug)]
pub struct Tgt<E: BaseAmbient> {
    pub arr: ArrAmbient<E>,
}

impl<E: BaseAmbient> Tgt<E> {
    pub fn new(base: E) -> Self {
        Tgt {
            arr: ArrAmbient::new(base),
        }
    }
}

impl<E: BaseAmbient> Endofunctor<ArrAmbient<E>> for Tgt<E> {
    fn apply(&self, f: &ArrowObj<E>) -> Result<ArrowObj<E>> {
        Ok(ArrowObj::new(self.arr.base.identity(&self.arr.cod_of(f))))
    }

    fn map(&self, sq: &Square<E>) -> Result<Square<E>> {
        Ok(Square {
            source: self.apply(&sq.source)?,
            target: self.apply(&sq.target)?,
            top: sq.bottom.clone(),
            bottom: sq.bottom.clone(),
        })
    }
}

impl<E: BaseAmbient> PointedEndofunctor<ArrAmbient<E>> for Tgt<E> {
    fn unit(&self, f: &ArrowObj<E>) -> Result<Square<E>> {
        let b = self.arr.cod_of(f);
        Ok(Square {
            source: f.clone(),
            target: self.apply(f)?,
            top: f.map.clone(),
            bottom: self.arr.base.identity(&b),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SetAmbient;
    use crate::finset::{FinFunction, FinSet};

    fn map(d: usize, c: usize, t: Vec<usize>) -> FinFunction {
        FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).unwrap()
    }

    fn arrow(d: usize, c: usize, t: Vec<usize>) -> ArrowObj<SetAmbient> {
        ArrowObj::new(map(d, c, t))
    }

    #[test]
    fn squares_must_commute() {
        let f = arrow(1, 2, vec![0]);
        let g = arrow(1, 2, vec![1]);
        let err = Square::new(&SetAmbient, f.clone(), g.clone(), map(1, 1, vec![0]), map(2, 2, vec![0, 1]));
        assert!(matches!(err, Err(Error::NotCommuting(_))));
        let ok = Square::new(&SetAmbient, f, g, map(1, 1, vec![0]), map(2, 2, vec![1, 0]));
        assert!(ok.is_ok());
    }

    #[test]
    fn tgt_on_zero_to_one() {
        let tgt = Tgt::new(SetAmbient);
        let f = arrow(0, 1, vec![]);
        assert_eq!(tgt.apply(&f).unwrap(), arrow(1, 1, vec![0]));
        let unit = tgt.unit(&f).unwrap();
        assert_eq!(unit.top, f.map);
        assert_eq!(unit.bottom, map(1, 1, vec![0]));
        let id = arrow(2, 2, vec![0, 1]);
        assert_eq!(tgt.unit(&id).unwrap(), Square::identity(&SetAmbient, &id));
    }

    #[test]
    fn leibniz_to_constant_one_collapses() {
        struct Const;
        impl Endofunctor<SetAmbient> for Const {
            fn apply(&self, _: &FinSet) -> Result<FinSet> {
                Ok(FinSet::singleton())
            }
            fn map(&self, _: &FinFunction) -> Result<FinFunction> {
                Ok(FinFunction::identity(&FinSet::singleton()))
            }
        }
        let id = crate::ambient::IdentityEndofunctor(SetAmbient);
        let bang = |x: &FinSet| FinFunction::constant(x, &FinSet::singleton(), 0);
        let f = map(2, 1, vec![0, 0]);
        let l = leibniz_pushout_apply(&SetAmbient, &id, &Const, &bang, &f).unwrap();
        assert_eq!(l.pushout.apex.size(), 1);
        assert_eq!(l.gap, FinFunction::identity(&FinSet::singleton()));
    }

    #[test]
    fn leibniz_along_identity_transformation_is_iso() {
        let id = crate::ambient::IdentityEndofunctor(SetAmbient);
        let alpha = |x: &FinSet| Ok(FinFunction::identity(x));
        let f = map(2, 3, vec![0, 2]);
        let l = leibniz_pushout_apply(&SetAmbient, &id, &id, &alpha, &f).unwrap();
        assert!(l.gap.is_bijective());
    }

    #[test]
    fn arrow_colimits_are_levelwise() {
        let arr = ArrAmbient::new(SetAmbient);
        let f = arrow(0, 1, vec![]);
        let c = arr.coproduct_of(&[f.clone(), f]).unwrap();
        assert_eq!(arr.sizes(&c.apex), vec![0, 2]);
    }
}

//! Comultiplication, the comonad and monad law suites, and coalgebras on left factors.

use serde::{Deserialize, Serialize};

use super::GeneratedAwfs;
use crate::ambient::{Ambient, BaseAmbient};
use crate::arrows::{ArrowObj, Square};
use crate::error::{Error, Result};

/// `δ_f: E f → E(L f)` and `Σ_f = (id, δ_f): L f → L L f`.
#[derive(Clone, Debug)]
pub struct Comultiplication<E: BaseAmbient> {
    pub delta: E::Mor,
    pub sigma: Square<E>,
}

/// A section `s: cod f → E f` with `R f ∘ s = id` and `s ∘ f = L f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Coalgebra<E: BaseAmbient> {
    pub f: ArrowObj<E>,
    pub s: E::Mor,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub factorization: bool,
    pub comonad_counit_left: bool,
    pub comonad_counit_right: bool,
    pub comonad_coassociativity: bool,
    pub monad_unit_left: bool,
    pub monad_unit_right: bool,
    pub monad_associativity: bool,
    pub unit_certified: bool,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.factorization
            && self.comonad_counit_left
            && self.comonad_counit_right
            && self.comonad_coassociativity
            && self.monad_unit_left
            && self.monad_unit_right
            && self.monad_associativity
            && self.unit_certified
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let checks = [
            ("factorization", self.factorization),
            ("comonad_counit_left", self.comonad_counit_left),
            ("comonad_counit_right", self.comonad_counit_right),
            ("comonad_coassociativity", self.comonad_coassociativity),
            ("monad_unit_left", self.monad_unit_left),
            ("monad_unit_right", self.monad_unit_right),
            ("monad_associativity", self.monad_associativity),
            ("unit_certified", self.unit_certified),
        ];
        checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect()
    }
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    /// `Φ_f = (id, R f): L f → f`.
    pub fn counit(&self, f: &ArrowObj<E>) -> Result<Square<E>> {
        let fact = self.factorize_arrow(f)?;
        let a = self.arr().dom_of(f);
        self.arr().square(&fact.lf, f, self.base().identity(&a), fact.rf.map.clone())
    }

    /// `L σ = (σ.top, E σ)`.
    pub fn l_map(&self, sigma: &Square<E>) -> Result<Square<E>> {
        let (lf, lg) = (self.factorize_arrow(&sigma.source)?.lf, self.factorize_arrow(&sigma.target)?.lf);
        self.arr().square(&lf, &lg, sigma.top.clone(), self.e_map(sigma)?)
    }

    /// `Π_f: R R f → R f`.
    pub fn multiplication(&self, f: &ArrowObj<E>) -> Result<Square<E>> {
        self.monad.mu(f)
    }

    /// `δ_f` as the middle of the unique algebra map from `R f` into `R f ∘ R(L f)`, whose
    /// structure composes the free ones, extending `(L L f, id)`.
    pub fn comultiplication(&self, f: &ArrowObj<E>) -> Result<Comultiplication<E>> {
        let base = self.base();
        let fact = self.factorize_arrow(f)?;
        let lfact = self.factorize_arrow(&fact.lf)?;
        let outer = self.algebra_to_structure(&fact.rf, &fact.free.structure)?;
        let inner = self.algebra_to_structure(&lfact.rf, &lfact.free.structure)?;
        let composite = self.compose_structures(&outer, &inner)?;
        let zeta = self.structure_to_algebra(&composite)?;
        let h = self.arr().square(
            f,
            &composite.f,
            lfact.lf.map.clone(),
            base.identity(&self.arr().cod_of(f)),
        )?;
        let ext = self.monad.extend(f, &composite.f, &zeta, &h)?;
        if ext.bottom != base.identity(&self.arr().cod_of(f)) {
            return Err(Error::Internal("comultiplication has a non-identity bottom".into()));
        }
        let a = self.arr().dom_of(f);
        let sigma = self.arr().square(&fact.lf, &lfact.lf, base.identity(&a), ext.top.clone())?;
        Ok(Comultiplication { delta: ext.top, sigma })
    }

    pub fn law_suite(&self, f: &ArrowObj<E>) -> Result<LawReport> {
        let base = self.base();
        let arr = self.arr();
        let fact = self.factorize_arrow(f)?;
        let ef = fact.midpoint.clone();
        let id_ef = base.identity(&ef);
        let factorization = base.compose(&fact.rf.map, &fact.lf.map)? == f.map
            && base.dom(&fact.lf.map) == arr.dom_of(f)
            && base.cod(&fact.rf.map) == arr.cod_of(f)
            && fact.unit.bottom == base.identity(&arr.cod_of(f));
        let comult = self.comultiplication(f)?;
        let lfact = self.factorize_arrow(&fact.lf)?;
        let comonad_counit_left = base.compose(&lfact.rf.map, &comult.delta)? == id_ef;
        let phi = self.counit(f)?;
        let comonad_counit_right = base.compose(&self.e_map(&phi)?, &comult.delta)? == id_ef;
        let comult_l = self.comultiplication(&fact.lf)?;
        let comonad_coassociativity = base.compose(&comult_l.delta, &comult.delta)?
            == base.compose(&self.e_map(&comult.sigma)?, &comult.delta)?;
        let monad = self.monad.law_report(f)?;
        Ok(LawReport {
            factorization,
            comonad_counit_left,
            comonad_counit_right,
            comonad_coassociativity,
            monad_unit_left: monad.left_unit,
            monad_unit_right: monad.right_unit,
            monad_associativity: monad.associativity,
            unit_certified: monad.unit_certified,
        })
    }

    /// Section conditions `R f ∘ s = 1` and `s ∘ f = L f` only.
    // TODO: check the comultiplication coassociativity square so this decides full comonad coalgebras.
    pub fn is_coalgebra(&self, c: &Coalgebra<E>) -> Result<bool> {
        let base = self.base();
        let fact = self.factorize_arrow(&c.f)?;
        if base.dom(&c.s) != self.arr().cod_of(&c.f) || base.cod(&c.s) != fact.midpoint {
            return Ok(false);
        }
        Ok(base.compose(&fact.rf.map, &c.s)? == base.identity(&self.arr().cod_of(&c.f))
            && base.compose(&c.s, &c.f.map)? == fact.lf.map)
    }

    /// `(L f, δ_f)`.
    pub fn left_factor_coalgebra(&self, f: &ArrowObj<E>) -> Result<Coalgebra<E>> {
        let fact = self.factorize_arrow(f)?;
        Ok(Coalgebra {
            f: fact.lf,
            s: self.comultiplication(f)?.delta,
        })
    }

    /// Every coalgebra section on `g`: diagonal fillers of `(L g, id)` against `R g`.
    pub fn coalgebra_sections(&self, g: &ArrowObj<E>) -> Result<Vec<E::Mor>> {
        let base = self.base();
        let fact = self.factorize_arrow(g)?;
        let b = self.arr().cod_of(g);
        base.fillers(&g.map, &fact.rf.map, &fact.lf.map, &base.identity(&b), self.cap())
    }

    /// Transfers a coalgebra on `g` to a codomain retract `g' → g → g'` as `E β ∘ s ∘ cod α`.
    pub fn retract_lift(&self, c: &Coalgebra<E>, alpha: &Square<E>, beta: &Square<E>) -> Result<Coalgebra<E>> {
        let base = self.base();
        let arr = self.arr();
        if alpha.target != c.f || beta.source != c.f || alpha.source != beta.target {
            return Err(Error::NotARetract("retract squares do not pass through the coalgebra".into()));
        }
        let g_prime = alpha.source.clone();
        let id_dom = base.identity(&arr.dom_of(&g_prime));
        if alpha.top != id_dom || beta.top != id_dom {
            return Err(Error::NotARetract("domain components must be identities".into()));
        }
        if arr.compose(beta, alpha)? != arr.identity(&g_prime) {
            return Err(Error::NotARetract("β ∘ α is not the identity".into()));
        }
        let s = base.compose(&self.e_map(beta)?, &base.compose(&c.s, &alpha.bottom)?)?;
        let out = Coalgebra { f: g_prime, s };
        if !self.is_coalgebra(&out)? {
            return Err(Error::Internal("retract-lifted section fails the coalgebra laws".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{Backdrop, SetAmbient};
    use crate::density::{point_diagram, walking_cospan_diagram};
    use crate::finset::{FinFunction, FinSet};

    fn arrow(d: usize, c: usize, t: Vec<usize>) -> ArrowObj<SetAmbient> {
        ArrowObj::new(FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).unwrap())
    }

    #[test]
    fn laws_on_small_examples() {
        for u in [walking_cospan_diagram(), point_diagram()] {
            let awfs = GeneratedAwfs::new(SetAmbient, u, Backdrop::All);
            for f in [arrow(0, 1, vec![]), arrow(2, 1, vec![0, 0]), arrow(1, 2, vec![1])] {
                let r = awfs.law_suite(&f).unwrap();
                assert!(r.passed(), "{:?} failed {:?}", f, r.failures());
            }
        }
    }

    #[test]
    fn left_factor_coalgebra_on_zero_to_one() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let c = awfs.left_factor_coalgebra(&arrow(0, 1, vec![])).unwrap();
        assert!(awfs.is_coalgebra(&c).unwrap());
        assert!(c.s.is_bijective());
    }

    #[test]
    fn identity_retract_is_neutral() {
        let awfs = GeneratedAwfs::new(SetAmbient, point_diagram(), Backdrop::All);
        let c = awfs.left_factor_coalgebra(&arrow(1, 1, vec![0])).unwrap();
        let id = Square::identity(&SetAmbient, &c.f);
        assert_eq!(awfs.retract_lift(&c, &id, &id).unwrap(), c);
    }
}

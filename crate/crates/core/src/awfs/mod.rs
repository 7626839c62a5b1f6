//! The algebraic small object argument: the one-step endofunctor `S^u` on `Arr(E)`, its free
//! monad, and the factorization, lifting, coalgebra and trace machinery built on top.

mod coalgebra;
mod lifting;
mod quillen;
mod replay;
mod trace;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

pub use coalgebra::{Coalgebra, Comultiplication, LawReport};
pub use lifting::{LiftingSearch, LiftingStructure, SearchMode};
pub use quillen::QuillenResult;
pub use replay::{
    replay, CartesianFactor, ConstantFactor, IdentityFunctor, PreservationCheck, ReplayReport, SupportFunctor,
};
pub use trace::{verify_trace, Finding, Trace, VerifyReport, TRACE_FORMAT};

use crate::ambient::{Backdrop, BaseAmbient, Endofunctor, PointedEndofunctor, Pushout};
use crate::arrows::{ArrAmbient, ArrowObj, Square};
use crate::density::{density_comonad, density_map, ArrowDiagram, DensityResult};
use crate::error::{Error, Result, DEFAULT_CAP};
use crate::freemonad::{FreeAlgebraResult, FreeMonad, DEFAULT_MAX_STEPS};

/// `S^u f` with the data it was built from.
#[derive(Clone, Debug)]
pub struct SplitData<E: BaseAmbient> {
    pub density: DensityResult<E>,
    /// Pushout of the counit's top edge `p: P → A` against `Δ_u f = (d: P → Q)`.
    pub attachment: Pushout<E>,
    /// `[f, q]: A ⊔_P Q → B`.
    pub arrow: ArrowObj<E>,
    /// `(in_A, id_B): f → S^u f`.
    pub unit: Square<E>,
}

/// `S^u`, memoized per arrow for the lifetime of the session.
#[derive(Clone, Debug)]
pub struct SplitEndofunctor<E: BaseAmbient> {
    pub arr: ArrAmbient<E>,
    pub generators: Arc<ArrowDiagram<E>>,
    pub cap: usize,
    cache: Rc<RefCell<HashMap<ArrowObj<E>, Rc<SplitData<E>>>>>,
}

impl<E: BaseAmbient> SplitEndofunctor<E> {
    pub fn new(base: E, generators: Arc<ArrowDiagram<E>>, cap: usize) -> Self {
        SplitEndofunctor {
            arr: ArrAmbient::new(base),
            generators,
            cap,
            cache: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    pub fn data(&self, f: &ArrowObj<E>) -> Result<Rc<SplitData<E>>> {
        if let Some(d) = self.cache.borrow().get(f) {
            return Ok(d.clone());
        }
        let base = &self.arr.base;
        let density = density_comonad(&self.arr, &self.generators, f, self.cap)?;
        let attachment = base.pushout(&density.counit.top, &density.den.map)?;
        let arrow = ArrowObj::new(attachment.mediate(base, &self.arr.cod_of(f), &f.map, &density.counit.bottom)?);
        let unit = self.arr.square(
            f,
            &arrow,
            attachment.in_left.clone(),
            base.identity(&self.arr.cod_of(f)),
        )?;
        let d = Rc::new(SplitData {
            density,
            attachment,
            arrow,
            unit,
        });
        self.cache.borrow_mut().insert(f.clone(), d.clone());
        Ok(d)
    }
}

impl<E: BaseAmbient> Endofunctor<ArrAmbient<E>> for SplitEndofunctor<E> {
    fn apply(&self, f: &ArrowObj<E>) -> Result<ArrowObj<E>> {
        Ok(self.data(f)?.arrow.clone())
    }

    fn map(&self, sigma: &Square<E>) -> Result<Square<E>> {
        let base = &self.arr.base;
        let (df, dg) = (self.data(&sigma.source)?, self.data(&sigma.target)?);
        let ds = density_map(&self.arr, sigma, &df.density, &dg.density)?;
        let to_left = base.compose(&dg.attachment.in_left, &sigma.top)?;
        let to_right = base.compose(&dg.attachment.in_right, &ds.bottom)?;
        let top = df
            .attachment
            .mediate(base, &self.arr.dom_of(&dg.arrow), &to_left, &to_right)?;
        self.arr.square(&df.arrow, &dg.arrow, top, sigma.bottom.clone())
    }
}

impl<E: BaseAmbient> PointedEndofunctor<ArrAmbient<E>> for SplitEndofunctor<E> {
    fn unit(&self, f: &ArrowObj<E>) -> Result<Square<E>> {
        Ok(self.data(f)?.unit.clone())
    }
}

/// `f = R f ∘ L f` through the midpoint `E f`.
#[derive(Clone, Debug)]
pub struct Factorization<E: BaseAmbient> {
    pub f: ArrowObj<E>,
    pub lf: ArrowObj<E>,
    pub rf: ArrowObj<E>,
    pub midpoint: E::Obj,
    /// `(L f, id): f → R f`.
    pub unit: Square<E>,
    pub free: Rc<FreeAlgebraResult<ArrAmbient<E>>>,
}

impl<E: BaseAmbient> Factorization<E> {
    pub fn converged_stage(&self) -> usize {
        self.free.converged_stage
    }

    /// The arrows `A_0 = f, A_1, …` visited, including the stability stage.
    pub fn stage_arrows(&self) -> Vec<ArrowObj<E>> {
        let mut v: Vec<ArrowObj<E>> = self.free.steps.iter().map(|s| s.input.a.clone()).collect();
        if let Some(last) = self.free.steps.last() {
            v.push(last.output.a.clone());
        }
        v
    }
}

/// One configuration of the argument: ambient, generators and backdrop, with session caches.
pub struct GeneratedAwfs<E: BaseAmbient> {
    pub monad: FreeMonad<ArrAmbient<E>, SplitEndofunctor<E>>,
    pub base_backdrop: Backdrop,
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    pub fn new(base: E, generators: ArrowDiagram<E>, backdrop: Backdrop) -> Self {
        Self::with_limits(base, generators, backdrop, DEFAULT_CAP, DEFAULT_MAX_STEPS)
    }

    pub fn with_limits(base: E, generators: ArrowDiagram<E>, backdrop: Backdrop, cap: usize, max_steps: usize) -> Self {
        let endo = SplitEndofunctor::new(base.clone(), Arc::new(generators), cap);
        let lifted = Backdrop::DomainComponentIn(Box::new(backdrop.clone()));
        let mut monad = FreeMonad::new(ArrAmbient::new(base), endo, lifted);
        monad.max_steps = max_steps;
        GeneratedAwfs {
            monad,
            base_backdrop: backdrop,
        }
    }

    pub fn arr(&self) -> &ArrAmbient<E> {
        &self.monad.amb
    }

    pub fn base(&self) -> &E {
        &self.monad.amb.base
    }

    pub fn endo(&self) -> &SplitEndofunctor<E> {
        &self.monad.endo
    }

    pub fn generators(&self) -> &ArrowDiagram<E> {
        &self.monad.endo.generators
    }

    pub fn cap(&self) -> usize {
        self.monad.endo.cap
    }

    pub fn factorize_arrow(&self, f: &ArrowObj<E>) -> Result<Factorization<E>> {
        let free = self.monad.free(f)?;
        let base = self.base();
        if free.unit.bottom != base.identity(&self.arr().cod_of(f)) {
            return Err(Error::Internal("unit has a non-identity codomain component".into()));
        }
        if self.base_backdrop == Backdrop::Mono {
            for step in &free.steps {
                let d = self.endo().data(&step.input.a)?;
                if !base.is_mono(&d.density.den.map) {
                    return Err(Error::BackdropViolation("a density arrow is not mono".into()));
                }
            }
        }
        let lf = ArrowObj::new(free.unit.top.clone());
        let rf = free.carrier.clone();
        if base.compose(&rf.map, &lf.map)? != f.map {
            return Err(Error::Internal("R f ∘ L f ≠ f".into()));
        }
        Ok(Factorization {
            f: f.clone(),
            midpoint: base.cod(&lf.map),
            lf,
            rf,
            unit: free.unit.clone(),
            free,
        })
    }

    pub fn factorize(&self, f: &E::Mor) -> Result<Factorization<E>> {
        self.factorize_arrow(&ArrowObj::new(f.clone()))
    }

    /// `E σ`, the middle component of `R σ` for a square `σ: f → g`.
    pub fn e_map(&self, sigma: &Square<E>) -> Result<E::Mor> {
        Ok(self.monad.map(sigma)?.top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Ambient;
    use crate::ambient::SetAmbient;
    use crate::density::{point_diagram, walking_cospan_diagram};
    use crate::finset::{FinFunction, FinSet};

    fn map(d: usize, c: usize, t: Vec<usize>) -> FinFunction {
        FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).unwrap()
    }

    #[test]
    fn walking_cospan_factors_zero_to_one() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let fact = awfs.factorize(&map(0, 1, vec![])).unwrap();
        assert_eq!(fact.converged_stage(), 2);
        let sizes: Vec<Vec<usize>> = fact.stage_arrows().iter().map(|a| awfs.arr().sizes(a)).collect();
        assert_eq!(sizes[..3], [vec![0, 1], vec![2, 1], vec![1, 1]]);
        assert_eq!(fact.midpoint.size(), 1);
        assert!(fact.rf.map.is_bijective());
        assert!(fact.free.stable);
    }

    #[test]
    fn point_generator_adds_a_copy_of_the_codomain() {
        let awfs = GeneratedAwfs::new(SetAmbient, point_diagram(), Backdrop::Mono);
        let fact = awfs.factorize(&map(2, 1, vec![0, 0])).unwrap();
        assert_eq!(fact.converged_stage(), 1);
        assert_eq!(fact.midpoint.size(), 3);
        assert!(fact.lf.map.is_injective());
    }

    #[test]
    fn empty_generators_give_trivial_factorization() {
        let awfs = GeneratedAwfs::new(SetAmbient, ArrowDiagram::empty(), Backdrop::All);
        let f = map(2, 3, vec![0, 2]);
        let fact = awfs.factorize(&f).unwrap();
        assert_eq!(fact.converged_stage(), 0);
        assert_eq!(fact.lf.map, FinFunction::identity(f.dom()));
        assert_eq!(fact.rf.map, f);
    }
}

//! Free algebras and free monads on a pointed endofunctor `(T, τ)`, computed by iterating
//! the well-pointed step on triples `(A, B, f: T A → B)` until its unit is invertible.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use crate::ambient::{Backdrop, Endofunctor, PointedEndofunctor};
use crate::ambient::{Ambient, IdentityEndofunctor, Pushout};
use crate::arrows::leibniz_pushout_apply;
use crate::error::{Error, Result};

/// Default bound on the number of steps before giving up.
pub const DEFAULT_MAX_STEPS: usize = 64;

/// `(A, B, f: T A → B)` with `f ∘ τ_A` in the backdrop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QoppaObject<C: Ambient> {
    pub a: C::Obj,
    pub b: C::Obj,
    pub f: C::Mor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub component: String,
    pub backdrop: String,
    pub passed: bool,
}

/// One application of the step: `(A, B, f) ↦ (B, Y, k)`.
#[derive(Clone, Debug)]
pub struct QoppaStep<C: Ambient> {
    pub input: QoppaObject<C>,
    /// `f ∘ τ_A: A → B`, the unit's domain component.
    pub f_tau: C::Mor,
    /// `B ⊔_A T A` of `f τ_A` and `τ_A`.
    pub inner: Pushout<C>,
    /// `[τ_B, T(f τ_A)]: B ⊔_A T A → T B`.
    pub gap: C::Mor,
    /// `[id, f]: B ⊔_A T A → B`.
    pub fold: C::Mor,
    /// `Y` as the pushout of `fold` and `gap`.
    pub outer: Pushout<C>,
    /// `B → Y`, the unit's codomain component.
    pub h: C::Mor,
    /// `T B → Y`.
    pub k: C::Mor,
    pub output: QoppaObject<C>,
    pub certificates: Vec<Certificate>,
    /// Whether the step applied to this unit equals the next unit; set once the next step exists.
    pub wellpointed: Option<bool>,
}

impl<C: Ambient> QoppaStep<C> {
    pub fn unit_is_iso(&self, amb: &C) -> bool {
        amb.is_iso(&self.f_tau) && amb.is_iso(&self.h)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "input": serde_json::to_value(&self.input).expect("serializable"),
            "unit": {
                "dom": serde_json::to_value(&self.f_tau).expect("serializable"),
                "cod": serde_json::to_value(&self.h).expect("serializable"),
            },
            "gap": serde_json::to_value(&self.gap).expect("serializable"),
            "certificates": serde_json::to_value(&self.certificates).expect("serializable"),
            "wellpointed": self.wellpointed,
        })
    }
}

fn certify<C: Ambient>(amb: &C, backdrop: &Backdrop, component: &str, m: &C::Mor) -> Result<Certificate> {
    let passed = amb.in_backdrop(backdrop, m)?;
    if !passed {
        return Err(Error::BackdropViolation(format!(
            "{component} is not in the {} backdrop",
            backdrop.describe()
        )));
    }
    Ok(Certificate {
        component: component.into(),
        backdrop: backdrop.describe(),
        passed,
    })
}

pub fn qoppa_step<C: Ambient, T: PointedEndofunctor<C> + ?Sized>(
    amb: &C,
    endo: &T,
    backdrop: &Backdrop,
    x: &QoppaObject<C>,
) -> Result<QoppaStep<C>> {
    let tau_a = endo.unit(&x.a)?;
    let f_tau = amb.compose(&x.f, &tau_a)?;
    let dom_cert = certify(amb, backdrop, "unit.dom", &f_tau)?;
    let identity = IdentityEndofunctor(amb.clone());
    let unit = |o: &C::Obj| endo.unit(o);
    let leibniz = leibniz_pushout_apply(amb, &identity, endo, &unit, &f_tau)?;
    let inner = leibniz.pushout;
    let fold = inner.mediate(amb, &x.b, &amb.identity(&x.b), &x.f)?;
    let outer = amb.pushout(&fold, &leibniz.gap)?;
    let (h, k) = (outer.in_left.clone(), outer.in_right.clone());
    let cod_cert = certify(amb, backdrop, "unit.cod", &h)?;
    let output = QoppaObject {
        a: x.b.clone(),
        b: outer.apex.clone(),
        f: k.clone(),
    };
    Ok(QoppaStep {
        input: x.clone(),
        f_tau,
        inner,
        gap: leibniz.gap,
        fold,
        outer,
        h,
        k,
        output,
        certificates: vec![dom_cert, cod_cert],
        wellpointed: None,
    })
}

/// Instance of `Q(unit_x) = unit_{Q x}` for consecutive steps.
pub(crate) fn check_wellpointed<C: Ambient, T: PointedEndofunctor<C> + ?Sized>(
    amb: &C,
    endo: &T,
    step: &QoppaStep<C>,
    next: &QoppaStep<C>,
) -> Result<bool> {
    if amb.compose(&step.k, &endo.unit(&step.input.b)?)? != step.h {
        return Ok(false);
    }
    let to_left = amb.compose(&next.h, &step.h)?;
    let to_right = amb.compose(&next.k, &endo.map(&step.h)?)?;
    let y = step.outer.mediate(amb, &next.outer.apex, &to_left, &to_right)?;
    Ok(y == next.h)
}

#[derive(Clone, Debug)]
pub struct FreeAlgebraResult<C: Ambient> {
    pub x: C::Obj,
    pub carrier: C::Obj,
    /// `T(carrier) → carrier`.
    pub structure: C::Mor,
    /// `x → carrier`.
    pub unit: C::Mor,
    /// Steps `0..=converged_stage`, then one stability step.
    pub steps: Vec<QoppaStep<C>>,
    pub converged_stage: usize,
    pub stable: bool,
}

impl<C: Ambient> FreeAlgebraResult<C> {
    pub fn to_json(&self) -> Value {
        json!({
            "converged_stage": self.converged_stage,
            "stable": self.stable,
            "steps": self.steps.iter().map(QoppaStep::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn free_algebra<C: Ambient, T: PointedEndofunctor<C> + ?Sized>(
    amb: &C,
    endo: &T,
    backdrop: &Backdrop,
    x: &C::Obj,
    max_steps: usize,
) -> Result<FreeAlgebraResult<C>> {
    let tx = endo.apply(x)?;
    let mut current = QoppaObject {
        a: x.clone(),
        b: tx.clone(),
        f: amb.identity(&tx),
    };
    let mut steps: Vec<QoppaStep<C>> = Vec::new();
    let mut unit = amb.identity(x);
    let converged = loop {
        let n = steps.len();
        if n >= max_steps {
            let partial = json!({"steps": steps.iter().map(QoppaStep::to_json).collect::<Vec<_>>()});
            return Err(Error::IterationLimit {
                max_steps,
                partial_trace: Box::new(partial),
            });
        }
        let step = qoppa_step(amb, endo, backdrop, &current)?;
        if let Some(prev) = steps.last_mut() {
            let ok = check_wellpointed(amb, endo, prev, &step)?;
            prev.wellpointed = Some(ok);
        }
        let done = step.unit_is_iso(amb);
        current = step.output.clone();
        steps.push(step);
        if done {
            break n;
        }
        unit = amb.compose(&steps[n].f_tau, &unit)?;
    };
    let extra = qoppa_step(amb, endo, backdrop, &current)?;
    let ok = check_wellpointed(amb, endo, &steps[converged], &extra)?;
    steps[converged].wellpointed = Some(ok);
    let stable = extra.unit_is_iso(amb);
    steps.push(extra);
    let last = &steps[converged];
    let inv = amb
        .inverse(&last.f_tau)
        .ok_or_else(|| Error::Internal("converged unit is not invertible".into()))?;
    let structure = amb.compose(&inv, &last.input.f)?;
    let carrier = last.input.a.clone();
    if amb.compose(&structure, &endo.unit(&carrier)?)? != amb.identity(&carrier) {
        return Err(Error::Internal("extracted structure violates the unit law".into()));
    }
    Ok(FreeAlgebraResult {
        x: x.clone(),
        carrier,
        structure,
        unit,
        steps,
        converged_stage: converged,
        stable,
    })
}

/// The unique algebra map `carrier → target` extending `h: x → target`, built stage by stage.
pub fn algebra_extend<C: Ambient, T: PointedEndofunctor<C> + ?Sized>(
    amb: &C,
    endo: &T,
    free: &FreeAlgebraResult<C>,
    target: &C::Obj,
    zeta: &C::Mor,
    h: &C::Mor,
) -> Result<C::Mor> {
    if amb.compose(zeta, &endo.unit(target)?)? != amb.identity(target) {
        return Err(Error::NotAnAlgebra("structure ∘ unit is not the identity".into()));
    }
    let extend_by = |m: &C::Mor| -> Result<C::Mor> { amb.compose(zeta, &endo.map(m)?) };
    let mut a = h.clone();
    if free.converged_stage > 0 {
        let mut b = extend_by(h)?;
        for step in &free.steps[..free.converged_stage - 1] {
            let tb = extend_by(&b)?;
            b = step.outer.mediate(amb, target, &b, &tb).map_err(|e| match e {
                Error::NotACocone(msg) => Error::NotAnAlgebra(msg),
                other => other,
            })?;
        }
        a = b;
    }
    if amb.compose(&a, &free.unit)? != *h {
        return Err(Error::Internal("extension does not restrict to h".into()));
    }
    if amb.compose(zeta, &endo.map(&a)?)? != amb.compose(&a, &free.structure)? {
        return Err(Error::NotAnAlgebra("extension does not commute with the structures".into()));
    }
    Ok(a)
}

/// Monad law checks at one object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadLawReport {
    pub left_unit: bool,
    pub right_unit: bool,
    pub associativity: bool,
    pub unit_certified: bool,
}

impl MonadLawReport {
    pub fn passed(&self) -> bool {
        self.left_unit && self.right_unit && self.associativity && self.unit_certified
    }
}

/// A free-monad session: memoized free algebras with `R`, `η`, `μ` on demand.
pub struct FreeMonad<C: Ambient, T: PointedEndofunctor<C>> {
    pub amb: C,
    pub endo: T,
    pub backdrop: Backdrop,
    pub max_steps: usize,
    cache: RefCell<HashMap<C::Obj, Rc<FreeAlgebraResult<C>>>>,
}

impl<C: Ambient, T: PointedEndofunctor<C>> FreeMonad<C, T> {
    pub fn new(amb: C, endo: T, backdrop: Backdrop) -> Self {
        FreeMonad {
            amb,
            endo,
            backdrop,
            max_steps: DEFAULT_MAX_STEPS,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn free(&self, x: &C::Obj) -> Result<Rc<FreeAlgebraResult<C>>> {
        if let Some(r) = self.cache.borrow().get(x) {
            return Ok(r.clone());
        }
        let r = Rc::new(free_algebra(&self.amb, &self.endo, &self.backdrop, x, self.max_steps)?);
        self.cache.borrow_mut().insert(x.clone(), r.clone());
        Ok(r)
    }

    pub fn apply(&self, x: &C::Obj) -> Result<C::Obj> {
        Ok(self.free(x)?.carrier.clone())
    }

    pub fn eta(&self, x: &C::Obj) -> Result<C::Mor> {
        Ok(self.free(x)?.unit.clone())
    }

    /// The free structure `ξ_X: T R X → R X`.
    pub fn structure(&self, x: &C::Obj) -> Result<C::Mor> {
        Ok(self.free(x)?.structure.clone())
    }

    pub fn extend(&self, x: &C::Obj, target: &C::Obj, zeta: &C::Mor, h: &C::Mor) -> Result<C::Mor> {
        let free = self.free(x)?;
        algebra_extend(&self.amb, &self.endo, &free, target, zeta, h)
    }

    /// `R m` for `m: X → Y`.
    pub fn map(&self, m: &C::Mor) -> Result<C::Mor> {
        let (x, y) = (self.amb.dom(m), self.amb.cod(m));
        let ry = self.apply(&y)?;
        let h = self.amb.compose(&self.eta(&y)?, m)?;
        self.extend(&x, &ry, &self.structure(&y)?, &h)
    }

    /// `μ_X: R R X → R X`.
    pub fn mu(&self, x: &C::Obj) -> Result<C::Mor> {
        let rx = self.apply(x)?;
        self.extend(&rx, &rx, &self.structure(x)?, &self.amb.identity(&rx))
    }

    pub fn law_report(&self, x: &C::Obj) -> Result<MonadLawReport> {
        let amb = &self.amb;
        let rx = self.apply(x)?;
        let id = amb.identity(&rx);
        let mu = self.mu(x)?;
        let left_unit = amb.compose(&mu, &self.eta(&rx)?)? == id;
        let right_unit = amb.compose(&mu, &self.map(&self.eta(x)?)?)? == id;
        let associativity = amb.compose(&mu, &self.mu(&rx)?)? == amb.compose(&mu, &self.map(&mu)?)?;
        let unit_certified = amb.in_backdrop(&self.backdrop, &self.eta(x)?)?;
        Ok(MonadLawReport {
            left_unit,
            right_unit,
            associativity,
            unit_certified,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SetAmbient;
    use crate::finset::{FinFunction, FinSet};

    #[test]
    fn identity_endofunctor_converges_immediately() {
        let amb = SetAmbient;
        let id = IdentityEndofunctor(SetAmbient);
        let x = FinSet::of_size(3);
        let r = free_algebra(&amb, &id, &Backdrop::All, &x, 4).unwrap();
        assert_eq!(r.converged_stage, 0);
        assert_eq!(r.carrier, x);
        assert!(r.stable);
        assert_eq!(r.steps[0].wellpointed, Some(true));
        let m = FreeMonad::new(SetAmbient, IdentityEndofunctor(SetAmbient), Backdrop::Mono);
        assert!(m.law_report(&x).unwrap().passed());
    }

    /// `X ↦ X ⊔ 1` with the coprojection: algebras are pointed sets, the free one is `X ⊔ 1`.
    struct Maybe;

    impl Endofunctor<SetAmbient> for Maybe {
        fn apply(&self, x: &FinSet) -> Result<FinSet> {
            let mut l = x.labels().to_vec();
            l.push("⋆".into());
            Ok(FinSet::from_candidates(l))
        }
        fn map(&self, m: &FinFunction) -> Result<FinFunction> {
            let mut t = m.table().to_vec();
            t.push(m.cod().size());
            FinFunction::new(self.apply(m.dom())?, self.apply(m.cod())?, t)
        }
    }

    impl PointedEndofunctor<SetAmbient> for Maybe {
        fn unit(&self, x: &FinSet) -> Result<FinFunction> {
            FinFunction::new(x.clone(), self.apply(x)?, (0..x.size()).collect())
        }
    }

    #[test]
    fn maybe_free_algebra_adds_one_point() {
        let r = free_algebra(&SetAmbient, &Maybe, &Backdrop::Mono, &FinSet::of_size(2), 8).unwrap();
        assert_eq!(r.carrier.size(), 3);
        assert_eq!(r.converged_stage, 1);
        assert!(r.steps.iter().all(|s| s.wellpointed != Some(false)));
        let m = FreeMonad::new(SetAmbient, Maybe, Backdrop::Mono);
        assert!(m.law_report(&FinSet::of_size(2)).unwrap().passed());
    }

    #[test]
    fn extension_into_a_pointed_set() {
        let m = FreeMonad::new(SetAmbient, Maybe, Backdrop::All);
        let x = FinSet::of_size(2);
        let z = FinSet::of_size(3);
        // Structure picks 2 as the base point.
        let zeta = FinFunction::new(Maybe.apply(&z).unwrap(), z.clone(), vec![0, 1, 2, 2]).unwrap();
        let h = FinFunction::new(x.clone(), z.clone(), vec![1, 1]).unwrap();
        let e = m.extend(&x, &z, &zeta, &h).unwrap();
        assert_eq!(e.table(), &[1, 1, 2]);
        let bad = FinFunction::new(Maybe.apply(&z).unwrap(), z.clone(), vec![1, 1, 2, 2]).unwrap();
        assert!(matches!(m.extend(&x, &z, &bad, &h), Err(Error::NotAnAlgebra(_))));
    }

    #[test]
    fn iteration_limit_carries_partial_trace() {
        /// `X ↦ X ⊔ X` never stabilizes on a nonempty set.
        struct Double;
        impl Endofunctor<SetAmbient> for Double {
            fn apply(&self, x: &FinSet) -> Result<FinSet> {
                Ok(FinSet::of_size(2 * x.size()))
            }
            fn map(&self, m: &FinFunction) -> Result<FinFunction> {
                let n = m.cod().size();
                let t = m.table().iter().copied().chain(m.table().iter().map(|y| y + n)).collect();
                FinFunction::new(self.apply(m.dom())?, self.apply(m.cod())?, t)
            }
        }
        impl PointedEndofunctor<SetAmbient> for Double {
            fn unit(&self, x: &FinSet) -> Result<FinFunction> {
                FinFunction::new(x.clone(), self.apply(x)?, (0..x.size()).collect())
            }
        }
        match free_algebra(&SetAmbient, &Double, &Backdrop::All, &FinSet::of_size(1), 3) {
            Err(Error::IterationLimit { max_steps, partial_trace }) => {
                assert_eq!(max_steps, 3);
                assert_eq!(partial_trace["steps"].as_array().unwrap().len(), 3);
            }
            other => panic!("expected an iteration limit, got {other:?}"),
        }
    }
}

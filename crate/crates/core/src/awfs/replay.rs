//! Replaying a verified construction trace under a functor on the base ambient.
//!
//! Every colimit the construction used is pushed through the functor and compared with the
//! colimit of the pushed diagram; the output is the image of the left factor, together with a
//! coalgebra witness on the image of each generator that a density cell used.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::trace::verify_trace;
use super::{Coalgebra, GeneratedAwfs};
use crate::ambient::{Ambient, AmbientFunctor, BaseAmbient, Colimit, Diagram, SetAmbient};
use crate::arrows::{ArrowObj, Square};
use crate::error::{Error, Result};
use crate::finset::{FinFunction, FinSet};

/// The identity functor on any ambient.
#[derive(Clone, Debug, Default)]
pub struct IdentityFunctor;

impl<C: Ambient> AmbientFunctor<C, C> for IdentityFunctor {
    fn name(&self) -> String {
        "identity".into()
    }

    fn map_obj(&self, x: &C::Obj) -> Result<C::Obj> {
        Ok(x.clone())
    }

    fn map_mor(&self, m: &C::Mor) -> Result<C::Mor> {
        Ok(m.clone())
    }
}

/// `X ↦ X × K` on finite sets; a left adjoint, so it preserves every colimit.
#[derive(Clone, Debug)]
pub struct CartesianFactor {
    pub k: usize,
}

impl AmbientFunctor<SetAmbient, SetAmbient> for CartesianFactor {
    fn name(&self) -> String {
        format!("product({})", self.k)
    }

    /// Element `(x, j)` sits at index `x * k + j`.
    fn map_obj(&self, x: &FinSet) -> Result<FinSet> {
        let labels = x
            .labels()
            .iter()
            .flat_map(|l| (0..self.k).map(move |j| format!("({l},{j})")))
            .collect();
        FinSet::new(labels)
    }

    fn map_mor(&self, m: &FinFunction) -> Result<FinFunction> {
        let table = m
            .table()
            .iter()
            .flat_map(|&y| (0..self.k).map(move |j| y * self.k + j))
            .collect();
        FinFunction::new(self.map_obj(m.dom())?, self.map_obj(m.cod())?, table)
    }
}

/// `X ↦ 1` if `X` is inhabited, else `∅`. Collapses coproducts, so preserves few colimits.
#[derive(Clone, Debug, Default)]
pub struct SupportFunctor;

impl AmbientFunctor<SetAmbient, SetAmbient> for SupportFunctor {
    fn name(&self) -> String {
        "support".into()
    }

    fn map_obj(&self, x: &FinSet) -> Result<FinSet> {
        Ok(FinSet::of_size(usize::from(!x.is_empty())))
    }

    fn map_mor(&self, m: &FinFunction) -> Result<FinFunction> {
        let table = vec![0; usize::from(!m.dom().is_empty())];
        FinFunction::new(self.map_obj(m.dom())?, self.map_obj(m.cod())?, table)
    }
}

/// The constant functor at `K`; preserves only connected colimits.
#[derive(Clone, Debug)]
pub struct ConstantFactor {
    pub k: FinSet,
}

impl AmbientFunctor<SetAmbient, SetAmbient> for ConstantFactor {
    fn name(&self) -> String {
        format!("constant({})", self.k.size())
    }

    fn map_obj(&self, _: &FinSet) -> Result<FinSet> {
        Ok(self.k.clone())
    }

    fn map_mor(&self, _: &FinFunction) -> Result<FinFunction> {
        Ok(FinFunction::identity(&self.k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationCheck {
    pub stage: usize,
    pub colimit: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ReplayReport<E: BaseAmbient> {
    pub functor: String,
    pub checks: Vec<PreservationCheck>,
    /// `F(L f)`.
    pub output: ArrowObj<E>,
    /// A coalgebra on `F(u_i)` for every generator `i` used by some density cell, by name.
    pub witnesses: Vec<(String, Coalgebra<E>)>,
}

fn map_arrow<E: BaseAmbient, F: AmbientFunctor<E, E> + ?Sized>(func: &F, a: &ArrowObj<E>) -> Result<ArrowObj<E>> {
    Ok(ArrowObj::new(func.map_mor(&a.map)?))
}

fn map_square<E: BaseAmbient, F: AmbientFunctor<E, E> + ?Sized>(func: &F, s: &Square<E>) -> Result<Square<E>> {
    Ok(Square {
        source: map_arrow(func, &s.source)?,
        target: map_arrow(func, &s.target)?,
        top: func.map_mor(&s.top)?,
        bottom: func.map_mor(&s.bottom)?,
    })
}

/// Whether the comparison `colim F D → F(colim D)` exists and is invertible.
fn preserved<C: Ambient>(
    amb: &C,
    c: &Colimit<C>,
    obj: &dyn Fn(&C::Obj) -> Result<C::Obj>,
    mor: &dyn Fn(&C::Mor) -> Result<C::Mor>,
) -> Result<bool> {
    let mut d = Diagram::default();
    for (x, tag) in c.diagram.objects.iter().zip(&c.diagram.tags) {
        d.add_object(obj(x)?, tag.clone());
    }
    for (s, t, m) in &c.diagram.arrows {
        d.add_arrow(*s, *t, mor(m)?);
    }
    let pushed = amb.colimit(&d)?;
    let legs = c.legs.iter().map(mor).collect::<Result<Vec<_>>>()?;
    match amb.mediate(&pushed, &obj(&c.apex)?, &legs) {
        Ok(cmp) => Ok(amb.is_iso(&cmp)),
        Err(Error::NotACocone(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Replays `trace` under `func`. The trace must verify against `awfs` first. `witness` supplies
/// a coalgebra section on `F(u_i)`; `None` aborts with `MissingGeneratorWitness`.
pub fn replay<E: BaseAmbient, F: AmbientFunctor<E, E> + ?Sized>(
    awfs: &GeneratedAwfs<E>,
    trace: &Value,
    func: &F,
    witness: &dyn Fn(usize, &ArrowObj<E>) -> Result<Option<E::Mor>>,
) -> Result<ReplayReport<E>> {
    let report = verify_trace(awfs, trace);
    if !report.passed {
        let first = &report.findings[0];
        return Err(Error::malformed(format!("trace does not verify at {}: {}", first.path, first.detail)));
    }
    let f: ArrowObj<E> = serde_json::from_value(trace["f"].clone()).map_err(|e| Error::malformed(e.to_string()))?;
    let fact = awfs.factorize_arrow(&f)?;
    let arr = awfs.arr();
    let base = awfs.base();
    let obj_arr = |a: &ArrowObj<E>| map_arrow(func, a);
    let mor_arr = |s: &Square<E>| map_square(func, s);
    let obj_base = |x: &E::Obj| func.map_obj(x);
    let mor_base = |m: &E::Mor| func.map_mor(m);
    let mut checks = Vec::new();
    let mut record = |stage: usize, what: &str, ok: bool| -> Result<()> {
        checks.push(PreservationCheck {
            stage,
            colimit: what.into(),
            passed: ok,
        });
        if ok {
            Ok(())
        } else {
            Err(Error::ColimitNotPreserved(format!(
                "{} does not preserve the {what} colimit at stage {stage}",
                func.name()
            )))
        }
    };
    let mut used = BTreeSet::new();
    let steps = &fact.free.steps;
    for (n, step) in steps.iter().enumerate() {
        let data = awfs.endo().data(&step.input.a)?;
        used.extend(data.density.comma.objects.iter().map(|(i, _)| *i));
        record(n, "density", preserved(arr, &data.density.colimit, &obj_arr, &mor_arr)?)?;
        record(n, "attachment", preserved(base, &data.attachment.colimit, &obj_base, &mor_base)?)?;
        record(n, "inner", preserved(arr, &step.inner.colimit, &obj_arr, &mor_arr)?)?;
        record(n, "outer", preserved(arr, &step.outer.colimit, &obj_arr, &mor_arr)?)?;
    }
    let mut witnesses = Vec::new();
    let u = awfs.generators();
    for i in used {
        let image = map_arrow(func, &u.arrows[i])?;
        let name = u.index.object_name(i).to_string();
        let s = witness(i, &image)?.ok_or_else(|| Error::MissingGeneratorWitness(name.clone()))?;
        let c = Coalgebra { f: image, s };
        if !awfs.is_coalgebra(&c)? {
            return Err(Error::NotAnAlgebra(format!("witness for `{name}` is not a coalgebra section")));
        }
        witnesses.push((name, c));
    }
    // The recomposed colimit is the composite of the pushed transitions.
    let mut composite = base.identity(&func.map_obj(&arr.dom_of(&f))?);
    for step in &steps[..fact.converged_stage()] {
        composite = base.compose(&func.map_mor(&step.f_tau.top)?, &composite)?;
    }
    let output = ArrowObj::new(func.map_mor(&fact.lf.map)?);
    if composite != output.map {
        return Err(Error::Internal("pushed transitions do not recompose to F(L f)".into()));
    }
    Ok(ReplayReport {
        functor: func.name(),
        checks,
        output,
        witnesses,
    })
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    /// The first coalgebra section on `g`, if any; the default replay witness.
    pub fn first_section(&self, g: &ArrowObj<E>) -> Result<Option<E::Mor>> {
        Ok(self.coalgebra_sections(g)?.into_iter().next())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Backdrop;
    use crate::density::walking_cospan_diagram;

    fn zero_to_one() -> ArrowObj<SetAmbient> {
        ArrowObj::new(FinFunction::new(FinSet::empty(), FinSet::singleton(), vec![]).unwrap())
    }

    #[test]
    fn product_with_two_preserves_everything() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let t = awfs.trace_of(&zero_to_one()).unwrap().to_json();
        let r = replay(&awfs, &t, &CartesianFactor { k: 2 }, &|_, g| awfs.first_section(g)).unwrap();
        assert!(r.checks.iter().all(|c| c.passed));
        assert_eq!(awfs.arr().sizes(&r.output), vec![0, 2]);
    }

    #[test]
    fn identity_reproduces_the_left_factor() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let f = zero_to_one();
        let t = awfs.trace_of(&f).unwrap().to_json();
        let r = replay(&awfs, &t, &IdentityFunctor, &|_, g| awfs.first_section(g)).unwrap();
        assert_eq!(r.output, awfs.factorize_arrow(&f).unwrap().lf);
    }

    #[test]
    fn support_breaks_a_colimit() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let t = awfs.trace_of(&zero_to_one()).unwrap().to_json();
        let err = replay(&awfs, &t, &SupportFunctor, &|_, g| awfs.first_section(g)).unwrap_err();
        assert!(matches!(err, Error::ColimitNotPreserved(_)));
    }

    #[test]
    fn missing_witness_is_reported() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let t = awfs.trace_of(&zero_to_one()).unwrap().to_json();
        let err = replay(&awfs, &t, &IdentityFunctor, &|_, _| Ok(None)).unwrap_err();
        assert!(matches!(err, Error::MissingGeneratorWitness(_)));
    }
}

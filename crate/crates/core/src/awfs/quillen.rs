//! Quillen's argument for discrete generators: glue one copy of each generator's codomain per
//! lifting problem, without quotienting by coherence, until the right factor has fillers.

use serde_json::{json, Value};

use super::GeneratedAwfs;
use crate::ambient::{Ambient, BaseAmbient};
use crate::arrows::{ArrowObj, Square};
use crate::density::lifting_problems;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuillenResult<E: BaseAmbient> {
    pub f: ArrowObj<E>,
    pub lf: ArrowObj<E>,
    pub rf: ArrowObj<E>,
    /// `A_0 → B, A_1 → B, …` with `stages.last() == rf`.
    pub stages: Vec<ArrowObj<E>>,
    /// `A_n → A_{n+1}`, whose composite is `lf`.
    pub transitions: Vec<E::Mor>,
}

impl<E: BaseAmbient> QuillenResult<E> {
    pub fn stage_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "f": serde_json::to_value(&self.f).expect("serializable"),
            "lf": serde_json::to_value(&self.lf).expect("serializable"),
            "rf": serde_json::to_value(&self.rf).expect("serializable"),
            "stage_count": self.stage_count(),
        })
    }
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    /// One attachment: `A ⊔_{⊔ dom u_i} ⊔ cod u_i → B`, summed over all problems `u_i → f`.
    fn quillen_step(&self, f: &ArrowObj<E>) -> Result<(ArrowObj<E>, E::Mor)> {
        let base = self.base();
        let u = self.generators();
        let mut problems: Vec<(usize, Square<E>)> = Vec::new();
        for i in 0..u.arrows.len() {
            for alpha in lifting_problems(self.arr(), u, i, f, self.cap())? {
                problems.push((i, alpha));
            }
        }
        let doms: Vec<E::Obj> = problems.iter().map(|(i, _)| self.arr().dom_of(&u.arrows[*i])).collect();
        let cods: Vec<E::Obj> = problems.iter().map(|(i, _)| self.arr().cod_of(&u.arrows[*i])).collect();
        let dom_sum = base.coproduct_of(&doms)?;
        let cod_sum = base.coproduct_of(&cods)?;
        let cells: Vec<E::Mor> = problems
            .iter()
            .zip(&cod_sum.legs)
            .map(|((i, _), leg)| base.compose(leg, &u.arrows[*i].map))
            .collect::<Result<_>>()?;
        let cell = base.mediate(&dom_sum, &cod_sum.apex, &cells)?;
        let tops: Vec<E::Mor> = problems.iter().map(|(_, a)| a.top.clone()).collect();
        let attach = base.mediate(&dom_sum, &self.arr().dom_of(f), &tops)?;
        let p = base.pushout(&attach, &cell)?;
        let bottoms: Vec<E::Mor> = problems.iter().map(|(_, a)| a.bottom.clone()).collect();
        let glued = base.mediate(&cod_sum, &self.arr().cod_of(f), &bottoms)?;
        let next = p.mediate(base, &self.arr().cod_of(f), &f.map, &glued)?;
        Ok((ArrowObj::new(next), p.in_left))
    }

    /// Iterates at least one attachment, then stops at the first stage with the right lifting
    /// property against every generator.
    pub fn quillen_factorize(&self, f: &ArrowObj<E>, max_steps: usize) -> Result<QuillenResult<E>> {
        if !self.generators().is_discrete() {
            return Err(Error::NotDiscrete(
                "Quillen's argument takes a discrete generating family".into(),
            ));
        }
        let base = self.base();
        let mut stages = vec![f.clone()];
        let mut transitions = Vec::new();
        let mut lf = base.identity(&self.arr().dom_of(f));
        loop {
            if transitions.len() >= max_steps {
                return Err(Error::IterationLimit {
                    max_steps,
                    partial_trace: Box::new(json!({
                        "stages": stages.iter().map(|s| self.arr().sizes(s)).collect::<Vec<_>>(),
                    })),
                });
            }
            let current = stages.last().expect("nonempty").clone();
            let (next, step) = self.quillen_step(&current)?;
            lf = base.compose(&step, &lf)?;
            transitions.push(step);
            stages.push(next.clone());
            if self.has_rlp(&next)? {
                return Ok(QuillenResult {
                    f: f.clone(),
                    lf: ArrowObj::new(lf),
                    rf: next,
                    stages,
                    transitions,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{Backdrop, SetAmbient};
    use crate::density::{point_diagram, walking_cospan_diagram, ArrowDiagram};
    use crate::finset::{FinFunction, FinSet};

    fn arrow(d: usize, c: usize, t: Vec<usize>) -> ArrowObj<SetAmbient> {
        ArrowObj::new(FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).unwrap())
    }

    #[test]
    fn point_on_two_to_one_stops_after_one_stage() {
        let awfs = GeneratedAwfs::new(SetAmbient, point_diagram(), Backdrop::All);
        let q = awfs.quillen_factorize(&arrow(2, 1, vec![0, 0]), 8).unwrap();
        assert_eq!(q.stage_count(), 1);
        assert_eq!(q.lf.map.table(), &[0, 1]);
        assert_eq!(q.rf.map.dom().size(), 3);
    }

    #[test]
    fn empty_generators_give_identity_left_factor() {
        let awfs = GeneratedAwfs::new(SetAmbient, ArrowDiagram::empty(), Backdrop::All);
        let f = arrow(2, 3, vec![0, 2]);
        let q = awfs.quillen_factorize(&f, 8).unwrap();
        assert!(q.lf.map.is_bijective());
        assert_eq!(q.rf.map.table(), f.map.table());
    }

    #[test]
    fn rejects_non_discrete_generators() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        assert!(matches!(
            awfs.quillen_factorize(&arrow(0, 1, vec![]), 8),
            Err(Error::NotDiscrete(_))
        ));
    }
}

//! Coherent lifting structures, their correspondence with `S^u`-algebras, and composition.

use serde::{Deserialize, Serialize};

use super::GeneratedAwfs;
use crate::ambient::{Ambient, BaseAmbient};
use crate::arrows::{ArrowObj, Square};
use crate::error::{check_cap, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    First,
    Count,
    All,
}

/// A filler for every lifting problem against `f`, indexed like the comma category `u↓f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LiftingStructure<E: BaseAmbient> {
    pub f: ArrowObj<E>,
    pub fillers: Vec<E::Mor>,
}

#[derive(Clone, Debug)]
pub struct LiftingSearch<E: BaseAmbient> {
    pub count: u128,
    /// Empty in count mode.
    pub structures: Vec<LiftingStructure<E>>,
}

struct Search<'a, E: BaseAmbient> {
    base: &'a E,
    candidates: Vec<Vec<E::Mor>>,
    /// `incoming[t]` holds `(s, b)` for comma morphisms `s → t`: `ψ(s) = ψ(t) ∘ b`.
    incoming: Vec<Vec<(usize, E::Mor)>>,
    outgoing: Vec<Vec<(usize, E::Mor)>>,
    assigned: Vec<Option<usize>>,
    trail: Vec<usize>,
    mode: SearchMode,
    count: u128,
    found: Vec<Vec<usize>>,
    nodes: u128,
    cap: usize,
}

impl<E: BaseAmbient> Search<'_, E> {
    /// Assigns candidate `idx` to problem `k` and everything it forces; false on conflict.
    fn assign(&mut self, k: usize, idx: usize) -> Result<bool> {
        let mut queue = vec![(k, idx)];
        while let Some((k, idx)) = queue.pop() {
            if let Some(j) = self.assigned[k] {
                if j != idx {
                    return Ok(false);
                }
                continue;
            }
            self.assigned[k] = Some(idx);
            self.trail.push(k);
            let val = self.candidates[k][idx].clone();
            for (s, b) in &self.incoming[k] {
                let forced = self.base.compose(&val, b)?;
                match self.candidates[*s].iter().position(|c| *c == forced) {
                    Some(p) => queue.push((*s, p)),
                    None => return Ok(false),
                }
            }
            for (t, b) in &self.outgoing[k] {
                if let Some(j) = self.assigned[*t] {
                    if self.base.compose(&self.candidates[*t][j], b)? != val {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let k = self.trail.pop().expect("trail entry");
            self.assigned[k] = None;
        }
    }

    /// Returns true once the search should stop.
    fn run(&mut self, from: usize) -> Result<bool> {
        self.nodes += 1;
        check_cap(self.nodes, self.cap)?;
        let Some(k) = (from..self.assigned.len()).find(|&k| self.assigned[k].is_none()) else {
            self.count += 1;
            if self.mode != SearchMode::Count {
                self.found.push(self.assigned.iter().map(|a| a.expect("complete")).collect());
            }
            return Ok(self.mode == SearchMode::First);
        };
        for idx in 0..self.candidates[k].len() {
            let mark = self.trail.len();
            if self.assign(k, idx)? && self.run(k + 1)? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    /// Backtracking search for coherent filler assignments in `(i, α, candidate)` order.
    pub fn find_lifting_structures(&self, f: &ArrowObj<E>, mode: SearchMode) -> Result<LiftingSearch<E>> {
        let base = self.base();
        let data = self.endo().data(f)?;
        let comma = &data.density.comma;
        let u = self.generators();
        let candidates = comma
            .objects
            .iter()
            .map(|(i, alpha)| base.fillers(&u.arrows[*i].map, &f.map, &alpha.top, &alpha.bottom, self.cap()))
            .collect::<Result<Vec<_>>>()?;
        let n = comma.len();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for k in comma.category.non_identity() {
            let m = comma.category.morphism(k);
            let b = u.squares[comma.over[k]].bottom.clone();
            incoming[m.cod].push((m.dom, b.clone()));
            outgoing[m.dom].push((m.cod, b));
        }
        let mut search = Search {
            base,
            candidates,
            incoming,
            outgoing,
            assigned: vec![None; n],
            trail: vec![],
            mode,
            count: 0,
            found: vec![],
            nodes: 0,
            cap: self.cap(),
        };
        search.run(0)?;
        let structures = search
            .found
            .iter()
            .map(|choice| LiftingStructure {
                f: f.clone(),
                fillers: choice
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| search.candidates[k][c].clone())
                    .collect(),
            })
            .collect();
        Ok(LiftingSearch {
            count: search.count,
            structures,
        })
    }

    /// `ψ(i, α)`.
    pub fn solve(&self, s: &LiftingStructure<E>, i: usize, alpha: &Square<E>) -> Result<E::Mor> {
        if alpha.target != s.f {
            return Err(Error::BoundaryMismatch("problem does not target the structured arrow".into()));
        }
        let data = self.endo().data(&s.f)?;
        let k = data
            .density
            .comma
            .position(i, alpha)
            .ok_or_else(|| Error::BoundaryMismatch("not a lifting problem against this generator".into()))?;
        s.fillers
            .get(k)
            .cloned()
            .ok_or_else(|| Error::malformed("lifting structure has too few fillers"))
    }

    /// Whether `s` satisfies the filler laws and every coherence triangle.
    pub fn is_lifting_structure(&self, s: &LiftingStructure<E>) -> Result<bool> {
        let base = self.base();
        let u = self.generators();
        let data = self.endo().data(&s.f)?;
        let comma = &data.density.comma;
        if s.fillers.len() != comma.len() {
            return Ok(false);
        }
        for ((i, alpha), psi) in comma.objects.iter().zip(&s.fillers) {
            if base.dom(psi) != base.cod(&u.arrows[*i].map) || base.cod(psi) != base.dom(&s.f.map) {
                return Ok(false);
            }
            if base.compose(psi, &u.arrows[*i].map)? != alpha.top || base.compose(&s.f.map, psi)? != alpha.bottom {
                return Ok(false);
            }
        }
        for k in comma.category.non_identity() {
            let m = comma.category.morphism(k);
            let b = &u.squares[comma.over[k]].bottom;
            if base.compose(&s.fillers[m.cod], b)? != s.fillers[m.dom] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The canonical structure on an identity: `ψ(i, α) = α.bottom`.
    pub fn identity_structure(&self, x: &E::Obj) -> Result<LiftingStructure<E>> {
        let f = ArrowObj::new(self.base().identity(x));
        let data = self.endo().data(&f)?;
        let fillers = data.density.comma.objects.iter().map(|(_, a)| a.bottom.clone()).collect();
        Ok(LiftingStructure { f, fillers })
    }

    /// Structure on `g ∘ f`: solve against `g` first, then against `f`.
    pub fn compose_structures(&self, g: &LiftingStructure<E>, f: &LiftingStructure<E>) -> Result<LiftingStructure<E>> {
        let base = self.base();
        if base.cod(&f.f.map) != base.dom(&g.f.map) {
            return Err(Error::BoundaryMismatch("structured arrows are not composable".into()));
        }
        let gf = ArrowObj::new(base.compose(&g.f.map, &f.f.map)?);
        let data = self.endo().data(&gf)?;
        let fillers = data
            .density
            .comma
            .objects
            .iter()
            .map(|(i, alpha)| {
                let outer = self.arr().square(
                    &alpha.source,
                    &g.f,
                    base.compose(&f.f.map, &alpha.top)?,
                    alpha.bottom.clone(),
                )?;
                let psi_g = self.solve(g, *i, &outer)?;
                let inner = self.arr().square(&alpha.source, &f.f, alpha.top.clone(), psi_g)?;
                self.solve(f, *i, &inner)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftingStructure { f: gf, fillers })
    }

    /// The `S^u`-algebra `S^u f → f` of a lifting structure.
    pub fn structure_to_algebra(&self, s: &LiftingStructure<E>) -> Result<Square<E>> {
        let base = self.base();
        let data = self.endo().data(&s.f)?;
        let a = self.arr().dom_of(&s.f);
        let phi = base
            .mediate(&data.density.colimit.witness.cod, &a, &s.fillers)
            .map_err(|_| Error::NotAnAlgebra("fillers are not coherent".into()))?;
        let top = data.attachment.mediate(base, &a, &base.identity(&a), &phi)?;
        self.arr()
            .square(&data.arrow, &s.f, top, base.identity(&self.arr().cod_of(&s.f)))
    }

    /// The lifting structure of an `S^u`-algebra `ζ: S^u f → f`.
    pub fn algebra_to_structure(&self, f: &ArrowObj<E>, zeta: &Square<E>) -> Result<LiftingStructure<E>> {
        let base = self.base();
        let data = self.endo().data(f)?;
        if zeta.source != data.arrow || zeta.target != *f {
            return Err(Error::BoundaryMismatch("algebra has the wrong boundary".into()));
        }
        if !self.is_algebra(f, zeta)? {
            return Err(Error::NotAnAlgebra("structure is not a retraction of the unit".into()));
        }
        let to_a = base.compose(&zeta.top, &data.attachment.in_right)?;
        let fillers = data
            .density
            .colimit
            .witness
            .cod
            .legs
            .iter()
            .map(|leg| base.compose(&to_a, leg))
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftingStructure { f: f.clone(), fillers })
    }

    pub fn is_algebra(&self, f: &ArrowObj<E>, zeta: &Square<E>) -> Result<bool> {
        let data = self.endo().data(f)?;
        Ok(zeta.source == data.arrow
            && zeta.target == *f
            && self.arr().compose(zeta, &data.unit)? == self.arr().identity(f))
    }

    /// All `S^u`-algebra structures on `f`, by direct enumeration of retractions of the unit.
    pub fn enumerate_algebras(&self, f: &ArrowObj<E>) -> Result<Vec<Square<E>>> {
        let base = self.base();
        let data = self.endo().data(f)?;
        let id_b = base.identity(&self.arr().cod_of(f));
        let tops = base.lifts(&self.arr().dom_of(&data.arrow), &f.map, &data.arrow.map, self.cap())?;
        let mut out = Vec::new();
        for top in tops {
            let zeta = Square {
                source: data.arrow.clone(),
                target: f.clone(),
                top,
                bottom: id_b.clone(),
            };
            if self.is_algebra(f, &zeta)? {
                out.push(zeta);
            }
        }
        Ok(out)
    }

    /// Every lifting problem against every generator has some filler; coherence ignored.
    pub fn has_rlp(&self, f: &ArrowObj<E>) -> Result<bool> {
        let base = self.base();
        let u = self.generators();
        for i in 0..u.arrows.len() {
            for alpha in self.arr().homs(&u.arrows[i], f, self.cap())? {
                if base
                    .fillers(&u.arrows[i].map, &f.map, &alpha.top, &alpha.bottom, self.cap())?
                    .is_empty()
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
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
    fn walking_cospan_structure_counts() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let count = |f: &ArrowObj<SetAmbient>| awfs.find_lifting_structures(f, SearchMode::Count).unwrap().count;
        assert_eq!(count(&arrow(0, 1, vec![])), 0);
        assert_eq!(count(&arrow(2, 1, vec![0, 0])), 2);
        assert!(count(&arrow(1, 1, vec![0])) >= 1);
    }

    #[test]
    fn structures_and_algebras_correspond() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let f = arrow(3, 2, vec![0, 1, 1]);
        let all = awfs.find_lifting_structures(&f, SearchMode::All).unwrap();
        let algebras = awfs.enumerate_algebras(&f).unwrap();
        assert_eq!(all.count as usize, algebras.len());
        for s in &all.structures {
            assert!(awfs.is_lifting_structure(s).unwrap());
            let zeta = awfs.structure_to_algebra(s).unwrap();
            assert!(algebras.contains(&zeta));
            assert_eq!(&awfs.algebra_to_structure(&f, &zeta).unwrap(), s);
        }
    }

    #[test]
    fn composing_with_an_identity_structure_is_neutral() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let f = arrow(2, 1, vec![0, 0]);
        let id = awfs.identity_structure(&FinSet::of_size(1)).unwrap();
        for s in awfs.find_lifting_structures(&f, SearchMode::All).unwrap().structures {
            assert_eq!(awfs.compose_structures(&id, &s).unwrap(), s);
        }
    }

    #[test]
    fn rlp_against_the_point() {
        let awfs = GeneratedAwfs::new(SetAmbient, point_diagram(), Backdrop::All);
        assert!(!awfs.has_rlp(&arrow(0, 1, vec![])).unwrap());
        assert!(awfs.has_rlp(&arrow(3, 2, vec![0, 1, 1])).unwrap());
        assert!(awfs.has_rlp(&arrow(2, 2, vec![1, 0])).unwrap());
    }
}

//! Generator diagrams `u: J → Arr(E)`, their comma categories over an arrow, and the
//! density colimit `Δ_u f = colim(u↓f → J → Arr E)` with its counit.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::ambient::{Ambient, BaseAmbient, Colimit, Diagram, PshAmbient, SetAmbient};
use crate::arrows::{compose_horizontal, ArrAmbient, ArrowObj, Square};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, ValidationReport, Violation};
use crate::finset::{FinFunction, FinSet};
use crate::presheaf::{
    element_category, pullback_classify, subobject_classifier, yoneda_element, yoneda_map, ElementCategory,
    Presheaf, PresheafMap, SubobjectClassifier,
};

/// A functor `J → Arr(E)`: one arrow per object, one square per morphism (identities included).
#[derive(Clone, Debug, PartialEq)]
pub struct ArrowDiagram<E: BaseAmbient> {
    pub index: Arc<FinCategory>,
    pub arrows: Vec<ArrowObj<E>>,
    pub squares: Vec<Square<E>>,
}

impl<E: BaseAmbient> ArrowDiagram<E> {
    /// `edges` gives `(top, bottom)` for each non-identity morphism of `index`, in order.
    pub fn new(base: &E, index: Arc<FinCategory>, arrows: Vec<ArrowObj<E>>, edges: Vec<(E::Mor, E::Mor)>) -> Result<Self> {
        if arrows.len() != index.object_count() {
            return Err(Error::ShapeMismatch("one arrow per index object is required".into()));
        }
        if edges.len() != index.non_identity().len() {
            return Err(Error::ShapeMismatch("one square per non-identity morphism is required".into()));
        }
        let report = index.validate();
        if !report.is_valid() {
            return Err(Error::malformed(format!("index category is invalid: {:?}", report.violations)));
        }
        let mut squares: Vec<Square<E>> = arrows.iter().map(|a| Square::identity(base, a)).collect();
        for (k, (top, bottom)) in index.non_identity().zip(edges) {
            let m = index.morphism(k);
            squares.push(Square::new(base, arrows[m.dom].clone(), arrows[m.cod].clone(), top, bottom)?);
        }
        let d = ArrowDiagram { index, arrows, squares };
        let report = d.validate(base);
        if !report.is_valid() {
            return Err(Error::NaturalityViolation(format!("diagram is not functorial: {:?}", report.violations)));
        }
        Ok(d)
    }

    pub fn empty() -> Self {
        ArrowDiagram {
            index: Arc::new(FinCategory::empty()),
            arrows: vec![],
            squares: vec![],
        }
    }

    pub fn discrete(names: &[&str], arrows: Vec<ArrowObj<E>>, base: &E) -> Result<Self> {
        Self::new(base, Arc::new(FinCategory::discrete(names)), arrows, vec![])
    }

    pub fn is_discrete(&self) -> bool {
        self.index.is_discrete()
    }

    /// Functoriality on composites; identity squares are built in.
    pub fn validate(&self, base: &E) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.index.morphism_count();
        for g in 0..n {
            for f in 0..n {
                let Some(gf) = self.index.compose(g, f) else { continue };
                let pasted = compose_horizontal(base, &self.squares[f], &self.squares[g]);
                if pasted.as_ref().ok() != Some(&self.squares[gf]) {
                    let name = |k: usize| self.index.morphism(k).name.clone();
                    report.push(Violation::new(
                        "composition",
                        vec![name(g), name(f)],
                        "u(g ∘ f) differs from u(g) ∘ u(f)",
                    ));
                }
            }
        }
        report
    }

    /// Disjoint union of two diagrams over the coproduct of their indices.
    pub fn coproduct(&self, other: &Self, base: &E) -> Result<Self> {
        let index = Arc::new(self.index.coproduct(&other.index)?);
        let arrows = self.arrows.iter().chain(&other.arrows).cloned().collect();
        let edges = self.squares[self.index.object_count()..]
            .iter()
            .chain(&other.squares[other.index.object_count()..])
            .map(|s| (s.top.clone(), s.bottom.clone()))
            .collect();
        Self::new(base, index, arrows, edges)
    }

    /// `{"index", "arrows": {j: map}, "squares": {t: {"top", "bottom"}}}`.
    pub fn to_json(&self) -> Value {
        let mut arrows = Map::new();
        for (j, a) in self.arrows.iter().enumerate() {
            arrows.insert(self.index.object_name(j).to_string(), serde_json::to_value(&a.map).expect("map"));
        }
        let mut squares = Map::new();
        for k in self.index.non_identity() {
            let s = &self.squares[k];
            squares.insert(
                self.index.morphism(k).name.clone(),
                json!({"top": serde_json::to_value(&s.top).expect("map"), "bottom": serde_json::to_value(&s.bottom).expect("map")}),
            );
        }
        json!({"index": serde_json::to_value(&*self.index).expect("category"), "arrows": arrows, "squares": squares})
    }

    pub fn from_json(base: &E, v: &Value) -> Result<Self> {
        let index: FinCategory = serde_json::from_value(v.get("index").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::malformed(format!("index: {e}")))?;
        let empty = Map::new();
        let arrows_v = v.get("arrows").and_then(Value::as_object).unwrap_or(&empty);
        let squares_v = v.get("squares").and_then(Value::as_object).unwrap_or(&empty);
        for key in arrows_v.keys() {
            if index.object_index(key).is_none() {
                return Err(Error::UnknownObject(key.clone()));
            }
        }
        let parse = |what: &str, v: Option<&Value>| -> Result<E::Mor> {
            let v = v.ok_or_else(|| Error::malformed(format!("missing {what}")))?;
            serde_json::from_value(v.clone()).map_err(|e| Error::malformed(format!("{what}: {e}")))
        };
        let arrows = index
            .objects()
            .iter()
            .map(|o| parse(&format!("arrows.{o}"), arrows_v.get(o)).map(ArrowObj::new))
            .collect::<Result<Vec<_>>>()?;
        let edges = index
            .non_identity()
            .map(|k| {
                let name = &index.morphism(k).name;
                let s = squares_v.get(name);
                Ok((
                    parse(&format!("squares.{name}.top"), s.and_then(|s| s.get("top")))?,
                    parse(&format!("squares.{name}.bottom"), s.and_then(|s| s.get("bottom")))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, Arc::new(index), arrows, edges)
    }
}

fn set_map(d: usize, c: usize, t: Vec<usize>) -> FinFunction {
    FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).expect("valid table")
}

/// The walking cospan `b → a ← b'` sent to `(0→1) → (1 ↪ 1⊔1) ← (0→1)`, both legs
/// landing on the second coprojection.
pub fn walking_cospan_diagram() -> ArrowDiagram<SetAmbient> {
    let two = FinSet::new(vec!["0".into(), "1".into()]).expect("labels");
    let inj = |i: usize| FinFunction::new(FinSet::singleton(), two.clone(), vec![i]).expect("coprojection");
    let ub = ArrowObj::new(set_map(0, 1, vec![]));
    let ua = ArrowObj::new(inj(0));
    ArrowDiagram::new(
        &SetAmbient,
        Arc::new(FinCategory::walking_cospan()),
        vec![ub.clone(), ua, ub],
        vec![(set_map(0, 1, vec![]), inj(1)), (set_map(0, 1, vec![]), inj(1))],
    )
    .expect("walking cospan diagram")
}

/// The single generator `∅ → 1`.
pub fn point_diagram() -> ArrowDiagram<SetAmbient> {
    ArrowDiagram::discrete(&["p"], vec![ArrowObj::new(set_map(0, 1, vec![]))], &SetAmbient).expect("point diagram")
}

/// The subobject-classifier diagram `u^t: ∫Ω → Arr(PSh C)`, `(c, a) ↦ φ^t(a): A ↣ y(c)`.
#[derive(Clone, Debug)]
pub struct SubobjectDiagram {
    pub diagram: ArrowDiagram<PshAmbient>,
    pub classifier: SubobjectClassifier,
    pub elements: ElementCategory,
}

pub fn subobject_diagram(base: &Arc<FinCategory>) -> Result<SubobjectDiagram> {
    let psh = PshAmbient::new(base.clone());
    let classifier = subobject_classifier(base)?;
    let elements = element_category(&classifier.omega)?;
    let arrows = elements
        .elements
        .iter()
        .map(|&(c, a)| {
            let a_map = yoneda_element(&classifier.omega, c, a)?;
            Ok(ArrowObj::new(pullback_classify(&classifier.truth, &a_map)?))
        })
        .collect::<Result<Vec<ArrowObj<PshAmbient>>>>()?;
    let index = Arc::new(elements.category.clone());
    let mut edges: Vec<(PresheafMap, PresheafMap)> = Vec::new();
    for j in index.non_identity() {
        let m = index.morphism(j);
        let (src, tgt) = (&arrows[m.dom], &arrows[m.cod]);
        let bottom = yoneda_map(base, elements.over[j])?;
        let over = bottom.after(&src.map)?;
        let mut tops = psh.lifts(src.map.source(), &tgt.map, &over, usize::MAX)?;
        if tops.len() != 1 {
            return Err(Error::Internal("subobject square has no unique top edge".into()));
        }
        edges.push((tops.remove(0), bottom));
    }
    let diagram = ArrowDiagram::new(&psh, index, arrows, edges)?;
    Ok(SubobjectDiagram {
        diagram,
        classifier,
        elements,
    })
}

/// Restricts a diagram of presheaves on the terminal base to finite sets.
pub fn diagram_to_sets(d: &ArrowDiagram<PshAmbient>) -> Result<ArrowDiagram<SetAmbient>> {
    let level = |m: &PresheafMap| -> Result<FinFunction> {
        if m.source().base().object_count() != 1 || m.source().base().morphism_count() != 1 {
            return Err(Error::ShapeMismatch("only presheaves on the terminal base are sets".into()));
        }
        Ok(m.component(0).clone())
    };
    let arrows = d.arrows.iter().map(|a| Ok(ArrowObj::new(level(&a.map)?))).collect::<Result<Vec<_>>>()?;
    let edges = d.squares[d.index.object_count()..]
        .iter()
        .map(|s| Ok((level(&s.top)?, level(&s.bottom)?)))
        .collect::<Result<Vec<_>>>()?;
    ArrowDiagram::new(&SetAmbient, d.index.clone(), arrows, edges)
}

/// `u^Ω` on finite sets: `{0 → 1, 1 → 1}`.
pub fn subobject_diagram_sets() -> Result<ArrowDiagram<SetAmbient>> {
    diagram_to_sets(&subobject_diagram(&Arc::new(FinCategory::terminal()))?.diagram)
}

/// All squares `u_i → f`, in enumeration order.
pub fn lifting_problems<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    u: &ArrowDiagram<E>,
    i: usize,
    f: &ArrowObj<E>,
    cap: usize,
) -> Result<Vec<Square<E>>> {
    arr.homs(&u.arrows[i], f, cap)
}

/// `u↓f` with objects `(i, α: u_i → f)` named `"{i}#{k}"`.
#[derive(Clone, Debug)]
pub struct CommaCategory<E: BaseAmbient> {
    pub category: FinCategory,
    pub objects: Vec<(usize, Square<E>)>,
    /// Index morphism under each comma morphism (identities first).
    pub over: Vec<usize>,
    lookup: HashMap<(usize, Square<E>), usize>,
}

impl<E: BaseAmbient> CommaCategory<E> {
    pub fn position(&self, i: usize, alpha: &Square<E>) -> Option<usize> {
        self.lookup.get(&(i, alpha.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn name(&self, k: usize) -> &str {
        self.category.object_name(k)
    }
}

pub fn comma_category<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    u: &ArrowDiagram<E>,
    f: &ArrowObj<E>,
    cap: usize,
) -> Result<CommaCategory<E>> {
    let j = &u.index;
    let mut objects = Vec::new();
    let mut names = Vec::new();
    for i in 0..j.object_count() {
        for (k, alpha) in lifting_problems(arr, u, i, f, cap)?.into_iter().enumerate() {
            names.push(format!("{}#{}", j.object_name(i), k));
            objects.push((i, alpha));
        }
    }
    let lookup: HashMap<(usize, Square<E>), usize> =
        objects.iter().cloned().enumerate().map(|(k, o)| (o, k)).collect();
    let n = objects.len();
    // Morphism (i, α'∘u_t) → (i', α') for each t: i → i'.
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for t in 0..j.morphism_count() {
        let m = j.morphism(t);
        for (tgt, (i, alpha)) in objects.iter().enumerate() {
            if *i != m.cod {
                continue;
            }
            let pulled = compose_horizontal(&arr.base, &u.squares[t], alpha)?;
            let src = lookup
                .get(&(m.dom, pulled))
                .copied()
                .ok_or_else(|| Error::Internal("restricted lifting problem is missing".into()))?;
            triples.push((t, src, tgt));
        }
    }
    let mut full_index = vec![0usize; triples.len()];
    let mut morphisms = Vec::new();
    let mut over: Vec<usize> = objects.iter().map(|(i, _)| j.identity(*i)).collect();
    for (k, &(t, s, tg)) in triples.iter().enumerate() {
        if j.is_identity(t) {
            full_index[k] = s;
        } else {
            full_index[k] = n + morphisms.len();
            morphisms.push((format!("{}|{}", j.morphism(t).name, names[tg]), s, tg));
            over.push(t);
        }
    }
    let position: HashMap<(usize, usize, usize), usize> =
        triples.iter().enumerate().map(|(k, &tr)| (tr, full_index[k])).collect();
    let mut compose = Vec::new();
    for &(t1, s1, m1) in &triples {
        for &(t2, s2, m2) in &triples {
            if j.is_identity(t1) || j.is_identity(t2) || m1 != s2 {
                continue;
            }
            let t = j
                .compose(t2, t1)
                .ok_or_else(|| Error::malformed("index category has a missing composite"))?;
            let eq = position
                .get(&(t, s1, m2))
                .copied()
                .ok_or_else(|| Error::Internal("comma composite is missing".into()))?;
            compose.push((position[&(t2, s2, m2)], position[&(t1, s1, m1)], eq));
        }
    }
    let category = FinCategory::new_indexed(names, morphisms, compose)?;
    Ok(CommaCategory {
        category,
        objects,
        over,
        lookup,
    })
}

/// `Δ_u f` with its counit `ε_f: Δ_u f → f`.
#[derive(Clone, Debug)]
pub struct DensityResult<E: BaseAmbient> {
    pub den: ArrowObj<E>,
    pub counit: Square<E>,
    pub comma: CommaCategory<E>,
    /// Leg `k` is the coprojection of comma object `k`.
    pub colimit: Colimit<ArrAmbient<E>>,
}

pub fn density_comonad<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    u: &ArrowDiagram<E>,
    f: &ArrowObj<E>,
    cap: usize,
) -> Result<DensityResult<E>> {
    let comma = comma_category(arr, u, f, cap)?;
    let mut d = Diagram::default();
    for (k, (i, _)) in comma.objects.iter().enumerate() {
        d.add_object(u.arrows[*i].clone(), comma.name(k).to_string());
    }
    for k in comma.category.non_identity() {
        let m = comma.category.morphism(k);
        d.add_arrow(m.dom, m.cod, u.squares[comma.over[k]].clone());
    }
    let colimit = arr.colimit(&d)?;
    let legs: Vec<Square<E>> = comma.objects.iter().map(|(_, a)| a.clone()).collect();
    let counit = arr.mediate(&colimit, f, &legs)?;
    Ok(DensityResult {
        den: colimit.apex.clone(),
        counit,
        comma,
        colimit,
    })
}

/// `Δ_u σ: Δ_u f → Δ_u g` for `σ: f → g`, sending the leg at `(i, α)` to the leg at `(i, σα)`.
pub fn density_map<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    sigma: &Square<E>,
    df: &DensityResult<E>,
    dg: &DensityResult<E>,
) -> Result<Square<E>> {
    let legs = df
        .comma
        .objects
        .iter()
        .map(|(i, alpha)| {
            let moved = arr.compose(sigma, alpha)?;
            let k = dg
                .comma
                .position(*i, &moved)
                .ok_or_else(|| Error::Internal("pushed lifting problem is missing".into()))?;
            Ok(dg.colimit.legs[k].clone())
        })
        .collect::<Result<Vec<_>>>()?;
    arr.mediate(&df.colimit, &dg.den, &legs)
}

/// Outcome of the three mono-compatibility checks, with diagnostics for failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub den_mono: bool,
    pub preserves_mono_squares: bool,
    pub cartesian: bool,
    pub failures: Vec<String>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.den_mono && self.preserves_mono_squares && self.cartesian
    }
}

/// Checks, on every probe square, that `Δ_u` is mono-valued, preserves mono squares and
/// sends them to pullback squares.
pub fn check_mono_compatibility<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    u: &ArrowDiagram<E>,
    probes: &[Square<E>],
    cap: usize,
) -> Result<CompatibilityReport> {
    let mut report = CompatibilityReport {
        den_mono: true,
        preserves_mono_squares: true,
        cartesian: true,
        failures: vec![],
    };
    let mut cache: HashMap<ArrowObj<E>, DensityResult<E>> = HashMap::new();
    for (p, sigma) in probes.iter().enumerate() {
        for f in [&sigma.source, &sigma.target] {
            if !cache.contains_key(f) {
                let d = density_comonad(arr, u, f, cap)?;
                if !arr.base.is_mono(&d.den.map) {
                    report.den_mono = false;
                    report.failures.push(format!("probe {p}: density arrow is not mono"));
                }
                cache.insert(f.clone(), d);
            }
        }
        if !arr.is_mono(sigma) {
            continue;
        }
        let ds = density_map(arr, sigma, &cache[&sigma.source], &cache[&sigma.target])?;
        if !arr.is_mono(&ds) {
            report.preserves_mono_squares = false;
            report.failures.push(format!("probe {p}: image square is not mono"));
        }
        if !arr.base.is_cartesian(&ds.source.map, &ds.target.map, &ds.top, &ds.bottom)? {
            report.cartesian = false;
            report.failures.push(format!("probe {p}: image square is not a pullback"));
        }
    }
    Ok(report)
}

/// The closed form `φ^t ν^t f` with an iso onto the generic density arrow.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub arrow: ArrowObj<PshAmbient>,
    /// `ν^t f` as a presheaf over `Ω`.
    pub over_omega: PresheafMap,
    pub iso: Square<PshAmbient>,
}

/// Computes `ν^t f` pointwise, `N(c) = ⊔_{a ∈ Ω(c)} Sq(u(c,a), f)`, restricts it along
/// `t`, and finds an iso to `generic.den`.
pub fn density_closed_form_subobject(
    arr: &ArrAmbient<PshAmbient>,
    sub: &SubobjectDiagram,
    f: &ArrowObj<PshAmbient>,
    generic: &DensityResult<PshAmbient>,
    cap: usize,
) -> Result<ClosedForm> {
    let base = arr.base.base.clone();
    let omega = &sub.classifier.omega;
    let u = &sub.diagram;
    let el = &sub.elements;
    let el_index: HashMap<(usize, usize), usize> = el.elements.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    // squares[c] lists (a, σ) in order of a, then enumeration order of σ.
    let mut squares: Vec<Vec<(usize, Square<PshAmbient>)>> = Vec::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    for c in 0..base.object_count() {
        let mut here = Vec::new();
        let mut names = Vec::new();
        for a in 0..omega.at(c).size() {
            let e = el_index[&(c, a)];
            for (k, s) in arr.homs(&u.arrows[e], f, cap)?.into_iter().enumerate() {
                names.push(format!("{}#{}", omega.at(c).label(a), k));
                here.push((a, s));
            }
        }
        squares.push(here);
        labels.push(names);
    }
    let at: Vec<FinSet> = labels.into_iter().map(FinSet::new).collect::<Result<_>>()?;
    let mut restrict = Vec::with_capacity(base.morphism_count());
    for k in 0..base.morphism_count() {
        let m = base.morphism(k);
        let (c_src, c_tgt) = (m.dom, m.cod);
        let table = squares[c_tgt]
            .iter()
            .map(|(a, s)| {
                let a_src = omega.restrict(k).apply(*a);
                let (e_src, e_tgt) = (el_index[&(c_src, a_src)], el_index[&(c_tgt, *a)]);
                let el_mor = (0..el.category.morphism_count())
                    .find(|&j| {
                        let mm = el.category.morphism(j);
                        el.over[j] == k && mm.dom == e_src && mm.cod == e_tgt
                    })
                    .ok_or_else(|| Error::Internal("element morphism over a base morphism is missing".into()))?;
                let pulled = compose_horizontal(&arr.base, &u.squares[el_mor], s)?;
                squares[c_src]
                    .iter()
                    .position(|(b, t)| *b == a_src && *t == pulled)
                    .ok_or_else(|| Error::Internal("restricted square is missing".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        restrict.push(FinFunction::new(at[c_tgt].clone(), at[c_src].clone(), table)?);
    }
    let n = Presheaf::new(base.clone(), at, restrict)?;
    let components = (0..base.object_count())
        .map(|c| FinFunction::new(n.at(c).clone(), omega.at(c).clone(), squares[c].iter().map(|(a, _)| *a).collect()))
        .collect::<Result<_>>()?;
    let over_omega = PresheafMap::new(n, omega.clone(), components)?;
    let arrow = ArrowObj::new(pullback_classify(&sub.classifier.truth, &over_omega)?);
    let iso = arr
        .find_iso(&arrow, &generic.den, cap)?
        .ok_or_else(|| Error::NoIsoFound("closed form and generic density differ".into()))?;
    Ok(ClosedForm {
        arrow,
        over_omega,
        iso,
    })
}

/// Convenience: presheaf maps between presheaves on the terminal base from set maps.
pub fn set_to_presheaf_map(f: &FinFunction) -> Result<PresheafMap> {
    let (s, t) = (Presheaf::from_finset(f.dom()), Presheaf::from_finset(f.cod()));
    PresheafMap::new(s, t, vec![f.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow(d: usize, c: usize, t: Vec<usize>) -> ArrowObj<SetAmbient> {
        ArrowObj::new(set_map(d, c, t))
    }

    #[test]
    fn walking_cospan_problems_against_zero_to_one() {
        let arr = ArrAmbient::new(SetAmbient);
        let u = walking_cospan_diagram();
        let f = arrow(0, 1, vec![]);
        assert_eq!(lifting_problems(&arr, &u, 1, &f, 100).unwrap().len(), 0);
        assert_eq!(lifting_problems(&arr, &u, 0, &f, 100).unwrap().len(), 1);
        let comma = comma_category(&arr, &u, &f, 100).unwrap();
        assert_eq!(comma.len(), 2);
        assert!(comma.category.is_discrete());
        let d = density_comonad(&arr, &u, &f, 100).unwrap();
        assert_eq!(arr.sizes(&d.den), vec![0, 2]);
    }

    #[test]
    fn four_problems_at_stage_two() {
        let arr = ArrAmbient::new(SetAmbient);
        let u = walking_cospan_diagram();
        let f1 = arrow(2, 1, vec![0, 0]);
        let comma = comma_category(&arr, &u, &f1, 100).unwrap();
        assert_eq!(comma.len(), 4);
        assert_eq!(comma.category.non_identity().len(), 4);
        assert!(comma.category.validate().is_valid());
    }

    #[test]
    fn empty_index_gives_initial_density() {
        let arr = ArrAmbient::new(SetAmbient);
        let d = density_comonad(&arr, &ArrowDiagram::empty(), &arrow(2, 1, vec![0, 0]), 100).unwrap();
        assert_eq!(d.den, arr.initial());
    }

    #[test]
    fn subobject_diagram_on_sets() {
        let u = subobject_diagram_sets().unwrap();
        assert_eq!(u.arrows.len(), 2);
        let shape = |f: &FinFunction| (f.dom().size(), f.cod().size(), f.table().to_vec());
        assert_eq!(shape(&u.arrows[0].map), (0, 1, vec![]));
        assert_eq!(shape(&u.arrows[1].map), (1, 1, vec![0]));
    }

    #[test]
    fn subobject_diagram_on_walking_arrow() {
        let base = Arc::new(FinCategory::walking_arrow());
        let sub = subobject_diagram(&base).unwrap();
        assert_eq!(sub.diagram.arrows.len(), 5);
        assert!(sub.diagram.arrows.iter().all(|a| a.map.is_mono()));
    }

    #[test]
    fn diagram_json_round_trip() {
        let u = walking_cospan_diagram();
        let back = ArrowDiagram::from_json(&SetAmbient, &u.to_json()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn closed_form_on_terminal_base() {
        let base = Arc::new(FinCategory::terminal());
        let psh = PshAmbient::new(base.clone());
        let arr = ArrAmbient::new(psh);
        let sub = subobject_diagram(&base).unwrap();
        let f = ArrowObj::new(set_to_presheaf_map(&set_map(2, 1, vec![0, 0])).unwrap());
        let generic = density_comonad(&arr, &sub.diagram, &f, 1000).unwrap();
        let closed = density_closed_form_subobject(&arr, &sub, &f, &generic, 1000).unwrap();
        assert_eq!(arr.sizes(&closed.arrow), vec![2, 3]);
    }
}

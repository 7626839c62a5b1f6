//! Finite categories presented by full composition tables, and functors between them.
//!
//! Morphisms are indexed positionally: the identity of object `i` has index `i`, declared
//! morphisms follow in file order. Identities are named `id_<object>` and never appear in
//! the serialized form.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    /// Row-major `g * morphisms.len() + f`; `None` where the pair is not composable or undeclared.
    table: Vec<Option<usize>>,
    /// Declared (non-identity) composites in file order, for round-tripping.
    declared: Vec<(usize, usize, usize)>,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCategory({} objects, {} morphisms)",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

/// One violated axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub at: Vec<String>,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: &str, at: Vec<String>, detail: impl Into<String>) -> Self {
        Violation {
            kind: kind.to_string(),
            at,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}): {}", self.kind, self.at.join(", "), self.detail)
    }
}

/// Validation outcome; an empty list means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

pub fn identity_name(object: &str) -> String {
    format!("id_{object}")
}

impl FinCategory {
    /// Builds a category from names. Composites with identities are implicit.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        compose: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let obj_index: HashMap<&str, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        if obj_index.len() != objects.len() {
            return Err(Error::malformed("duplicate object identifier"));
        }
        let mut indexed = Vec::with_capacity(morphisms.len());
        for (name, dom, cod) in &morphisms {
            let d = *obj_index
                .get(dom.as_str())
                .ok_or_else(|| Error::malformed(format!("morphism `{name}`: unknown domain `{dom}`")))?;
            let c = *obj_index
                .get(cod.as_str())
                .ok_or_else(|| Error::malformed(format!("morphism `{name}`: unknown codomain `{cod}`")))?;
            indexed.push((name.clone(), d, c));
        }
        let n = objects.len();
        let mut mor_index: HashMap<String, usize> = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            mor_index.insert(identity_name(o), i);
        }
        for (k, (name, _, _)) in indexed.iter().enumerate() {
            if mor_index.insert(name.clone(), n + k).is_some() {
                return Err(Error::malformed(format!(
                    "morphism name `{name}` is duplicated or reserved"
                )));
            }
        }
        let lookup = |name: &str| {
            mor_index
                .get(name)
                .copied()
                .ok_or_else(|| Error::malformed(format!("unknown morphism `{name}` in compose table")))
        };
        let mut comp = Vec::with_capacity(compose.len());
        for (g, f, eq) in &compose {
            comp.push((lookup(g)?, lookup(f)?, lookup(eq)?));
        }
        Self::new_indexed(objects, indexed, comp)
    }

    /// Builds a category from positional data. `compose` entries index the full morphism
    /// list (identities first).
    pub fn new_indexed(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        compose: Vec<(usize, usize, usize)>,
    ) -> Result<Self> {
        let n = objects.len();
        let mut all: Vec<Morphism> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| Morphism {
                name: identity_name(o),
                dom: i,
                cod: i,
            })
            .collect();
        for (name, dom, cod) in morphisms {
            if dom >= n || cod >= n {
                return Err(Error::malformed(format!("morphism `{name}` has a dangling endpoint")));
            }
            all.push(Morphism { name, dom, cod });
        }
        let m = all.len();
        let mut table = vec![None; m * m];
        for (f, mf) in all.iter().enumerate() {
            table[mf.cod * m + f] = Some(f);
            table[f * m + mf.dom] = Some(f);
        }
        for &(g, f, eq) in &compose {
            if g >= m || f >= m || eq >= m {
                return Err(Error::malformed("compose entry references an unknown morphism"));
            }
            if g < n || f < n {
                return Err(Error::malformed(format!(
                    "compose entry ({}, {}) involves an identity; those composites are implicit",
                    all[g].name, all[f].name
                )));
            }
            if all[f].cod != all[g].dom {
                return Err(Error::malformed(format!(
                    "compose entry ({}, {}) is not a composable pair",
                    all[g].name, all[f].name
                )));
            }
            if table[g * m + f].is_some() {
                return Err(Error::malformed(format!(
                    "compose entry ({}, {}) is given twice",
                    all[g].name, all[f].name
                )));
            }
            table[g * m + f] = Some(eq);
        }
        Ok(FinCategory {
            objects,
            morphisms: all,
            table,
            declared: compose,
        })
    }

    pub fn empty() -> Self {
        Self::new_indexed(vec![], vec![], vec![]).expect("empty category")
    }

    pub fn terminal() -> Self {
        Self::discrete(&["*"])
    }

    pub fn discrete(names: &[&str]) -> Self {
        Self::new_indexed(names.iter().map(|s| s.to_string()).collect(), vec![], vec![])
            .expect("discrete category")
    }

    /// `x --m--> y`.
    pub fn walking_arrow() -> Self {
        Self::new_indexed(vec!["x".into(), "y".into()], vec![("m".into(), 0, 1)], vec![])
            .expect("walking arrow")
    }

    /// `b --t_b--> a <--t_b'-- b'`.
    pub fn walking_cospan() -> Self {
        Self::new_indexed(
            vec!["b".into(), "a".into(), "b'".into()],
            vec![("t_b".into(), 0, 1), ("t_b'".into(), 2, 1)],
            vec![],
        )
        .expect("walking cospan")
    }

    /// Disjoint union; object and morphism names must not clash.
    pub fn coproduct(&self, other: &FinCategory) -> Result<Self> {
        let n = self.objects.len();
        let mut objects = self.objects.clone();
        objects.extend(other.objects.iter().cloned());
        let mut morphisms = Vec::new();
        for mm in self.morphisms.iter().skip(n) {
            morphisms.push((mm.name.clone(), mm.dom, mm.cod));
        }
        for mm in other.morphisms.iter().skip(other.objects.len()) {
            morphisms.push((mm.name.clone(), mm.dom + n, mm.cod + n));
        }
        let total_objects = objects.len();
        let self_decl = self.morphisms.len() - n;
        let idx_self = |k: usize| {
            if k < n {
                k
            } else {
                total_objects + (k - n)
            }
        };
        let idx_other = |k: usize| {
            if k < other.objects.len() {
                n + k
            } else {
                total_objects + self_decl + (k - other.objects.len())
            }
        };
        let mut compose = Vec::new();
        for &(g, f, eq) in &self.declared {
            compose.push((idx_self(g), idx_self(f), idx_self(eq)));
        }
        for &(g, f, eq) in &other.declared {
            compose.push((idx_other(g), idx_other(f), idx_other(eq)));
        }
        let names: std::collections::HashSet<&String> = objects.iter().collect();
        if names.len() != objects.len() {
            return Err(Error::malformed("coproduct of categories with clashing object names"));
        }
        Self::new_indexed(objects, morphisms, compose)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, i: usize) -> &Morphism {
        &self.morphisms[i]
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn identity(&self, object: usize) -> usize {
        object
    }

    pub fn is_identity(&self, m: usize) -> bool {
        m < self.objects.len()
    }

    /// Indices of the declared (non-identity) morphisms.
    pub fn non_identity(&self) -> std::ops::Range<usize> {
        self.objects.len()..self.morphisms.len()
    }

    /// `g ∘ f`, if composable and present in the table.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.table[g * self.morphisms.len() + f]
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&k| self.morphisms[k].dom == x && self.morphisms[k].cod == y)
            .collect()
    }

    pub fn morphisms_into(&self, c: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&k| self.morphisms[k].cod == c)
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.objects.len()
    }

    /// Lists every violated axiom instance.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let m = self.morphisms.len();
        let name = |k: usize| self.morphisms[k].name.clone();
        for g in 0..m {
            for f in 0..m {
                if self.morphisms[f].cod != self.morphisms[g].dom {
                    continue;
                }
                match self.compose(g, f) {
                    None => report.push(Violation::new(
                        "missing_composite",
                        vec![name(g), name(f)],
                        "composable pair has no entry",
                    )),
                    Some(eq) => {
                        let (me, mf, mg) = (&self.morphisms[eq], &self.morphisms[f], &self.morphisms[g]);
                        if me.dom != mf.dom || me.cod != mg.cod {
                            report.push(Violation::new(
                                "ill_typed",
                                vec![name(g), name(f)],
                                format!("composite `{}` has the wrong boundary", me.name),
                            ));
                        }
                    }
                }
            }
        }
        for f in 0..m {
            let mf = &self.morphisms[f];
            if self.compose(mf.cod, f) != Some(f) {
                report.push(Violation::new("left_identity", vec![name(f)], "id ∘ f ≠ f"));
            }
            if self.compose(f, mf.dom) != Some(f) {
                report.push(Violation::new("right_identity", vec![name(f)], "f ∘ id ≠ f"));
            }
        }
        for h in 0..m {
            for g in 0..m {
                if self.morphisms[g].cod != self.morphisms[h].dom {
                    continue;
                }
                for f in 0..m {
                    if self.morphisms[f].cod != self.morphisms[g].dom {
                        continue;
                    }
                    let left = self.compose(g, f).and_then(|gf| self.compose(h, gf));
                    let right = self.compose(h, g).and_then(|hg| self.compose(hg, f));
                    if let (Some(l), Some(r)) = (left, right) {
                        if l != r {
                            report.push(Violation::new(
                                "associativity",
                                vec![name(h), name(g), name(f)],
                                format!("h∘(g∘f) = {} but (h∘g)∘f = {}", name(l), name(r)),
                            ));
                        }
                    }
                }
            }
        }
        report
    }
}

pub fn validate_category(c: &FinCategory) -> ValidationReport {
    c.validate()
}

/// A functor between finite categories, stored as positional maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
}

impl CatFunctor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        on_objects: Vec<usize>,
        on_morphisms: Vec<usize>,
    ) -> Result<Self> {
        if on_objects.len() != source.object_count() {
            return Err(Error::malformed("functor leaves an object unmapped"));
        }
        if on_morphisms.len() != source.morphism_count() {
            return Err(Error::malformed("functor leaves a morphism unmapped"));
        }
        if on_objects.iter().any(|&o| o >= target.object_count())
            || on_morphisms.iter().any(|&k| k >= target.morphism_count())
        {
            return Err(Error::malformed("functor maps to an unknown target element"));
        }
        Ok(CatFunctor {
            source,
            target,
            on_objects,
            on_morphisms,
        })
    }

    /// Builds from name pairs. Identities left out of `morphisms` go to the identity of the
    /// image object.
    pub fn from_names(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Self> {
        let mut on_objects = vec![usize::MAX; source.object_count()];
        for (s, t) in objects {
            let si = source.object_index(s).ok_or_else(|| Error::UnknownObject(s.to_string()))?;
            let ti = target.object_index(t).ok_or_else(|| Error::UnknownObject(t.to_string()))?;
            on_objects[si] = ti;
        }
        if on_objects.contains(&usize::MAX) {
            return Err(Error::malformed("functor leaves an object unmapped"));
        }
        let mut on_morphisms = vec![usize::MAX; source.morphism_count()];
        for i in 0..source.object_count() {
            on_morphisms[i] = target.identity(on_objects[i]);
        }
        for (s, t) in morphisms {
            let si = source
                .morphism_index(s)
                .ok_or_else(|| Error::malformed(format!("unknown morphism `{s}`")))?;
            let ti = target
                .morphism_index(t)
                .ok_or_else(|| Error::malformed(format!("unknown morphism `{t}`")))?;
            on_morphisms[si] = ti;
        }
        if on_morphisms.contains(&usize::MAX) {
            return Err(Error::malformed("functor leaves a morphism unmapped"));
        }
        Self::new(source, target, on_objects, on_morphisms)
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let on_objects = (0..c.object_count()).collect();
        let on_morphisms = (0..c.morphism_count()).collect();
        CatFunctor {
            source: c.clone(),
            target: c,
            on_objects,
            on_morphisms,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let (s, t) = (&self.source, &self.target);
        for k in 0..s.morphism_count() {
            let mk = s.morphism(k);
            let img = t.morphism(self.on_morphisms[k]);
            if img.dom != self.on_objects[mk.dom] || img.cod != self.on_objects[mk.cod] {
                report.push(Violation::new(
                    "dom_cod",
                    vec![mk.name.clone()],
                    format!("image `{}` has the wrong boundary", img.name),
                ));
            }
        }
        for o in 0..s.object_count() {
            if self.on_morphisms[s.identity(o)] != t.identity(self.on_objects[o]) {
                report.push(Violation::new(
                    "identity",
                    vec![s.object_name(o).to_string()],
                    "identity not preserved",
                ));
            }
        }
        for g in 0..s.morphism_count() {
            for f in 0..s.morphism_count() {
                if let Some(gf) = s.compose(g, f) {
                    let lhs = Some(self.on_morphisms[gf]);
                    let rhs = t.compose(self.on_morphisms[g], self.on_morphisms[f]);
                    if lhs != rhs {
                        report.push(Violation::new(
                            "composition",
                            vec![s.morphism(g).name.clone(), s.morphism(f).name.clone()],
                            "F(g∘f) ≠ F(g)∘F(f)",
                        ));
                    }
                }
            }
        }
        report
    }
}

pub fn validate_functor(f: &CatFunctor) -> ValidationReport {
    f.validate()
}

#[derive(Serialize, Deserialize)]
struct MorphismEntry {
    name: String,
    dom: String,
    cod: String,
}

#[derive(Serialize, Deserialize)]
struct ComposeEntry {
    g: String,
    f: String,
    eq: String,
}

#[derive(Serialize, Deserialize)]
struct CategoryFile {
    objects: Vec<String>,
    #[serde(default)]
    morphisms: Vec<MorphismEntry>,
    #[serde(default)]
    compose: Vec<ComposeEntry>,
}

impl Serialize for FinCategory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.objects.len();
        let file = CategoryFile {
            objects: self.objects.clone(),
            morphisms: self.morphisms[n..]
                .iter()
                .map(|m| MorphismEntry {
                    name: m.name.clone(),
                    dom: self.objects[m.dom].clone(),
                    cod: self.objects[m.cod].clone(),
                })
                .collect(),
            compose: self
                .declared
                .iter()
                .map(|&(g, f, eq)| ComposeEntry {
                    g: self.morphisms[g].name.clone(),
                    f: self.morphisms[f].name.clone(),
                    eq: self.morphisms[eq].name.clone(),
                })
                .collect(),
        };
        file.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinCategory {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = CategoryFile::deserialize(d)?;
        FinCategory::new(
            file.objects,
            file.morphisms.into_iter().map(|m| (m.name, m.dom, m.cod)).collect(),
            file.compose.into_iter().map(|c| (c.g, c.f, c.eq)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corrupted_chain() -> FinCategory {
        // h∘(g∘f) = h∘k1 = k2 while (h∘g)∘f = g∘f = k1.
        let s = |x: &str| x.to_string();
        FinCategory::new(
            vec![s("x"), s("y"), s("z")],
            vec![
                (s("f"), s("x"), s("y")),
                (s("g"), s("y"), s("z")),
                (s("k1"), s("x"), s("z")),
                (s("k2"), s("x"), s("z")),
                (s("h"), s("z"), s("z")),
            ],
            vec![
                (s("g"), s("f"), s("k1")),
                (s("h"), s("g"), s("g")),
                (s("h"), s("k1"), s("k2")),
                (s("h"), s("k2"), s("k2")),
                (s("h"), s("h"), s("h")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn terminal_is_valid() {
        let c = FinCategory::terminal();
        assert_eq!(c.object_count(), 1);
        assert_eq!(c.morphism_count(), 1);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn walking_cospan_is_valid() {
        let c = FinCategory::walking_cospan();
        assert_eq!(c.object_count(), 3);
        assert_eq!(c.non_identity().len(), 2);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn corrupted_associativity_is_reported_at_the_triple() {
        let report = corrupted_chain().validate();
        let assoc: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.kind == "associativity")
            .collect();
        assert_eq!(assoc.len(), 1);
        assert_eq!(assoc[0].at, vec!["h", "g", "f"]);
    }

    #[test]
    fn missing_composite_is_reported() {
        let s = |x: &str| x.to_string();
        let c = FinCategory::new(
            vec![s("x"), s("y"), s("z")],
            vec![(s("f"), s("x"), s("y")), (s("g"), s("y"), s("z"))],
            vec![],
        )
        .unwrap();
        let report = c.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, "missing_composite");
    }

    #[test]
    fn dangling_reference_is_malformed() {
        let s = |x: &str| x.to_string();
        let err = FinCategory::new(vec![s("x")], vec![(s("f"), s("x"), s("nope"))], vec![]).unwrap_err();
        assert!(matches!(err, Error::MalformedInput(_)));
        let err = FinCategory::new(vec![s("x")], vec![(s("id_x"), s("x"), s("x"))], vec![]).unwrap_err();
        assert!(matches!(err, Error::MalformedInput(_)));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let text = r#"{"objects":["x","y","z"],"morphisms":[{"name":"f","dom":"x","cod":"y"},{"name":"g","dom":"y","cod":"z"},{"name":"gf","dom":"x","cod":"z"}],"compose":[{"g":"g","f":"f","eq":"gf"}]}"#;
        let c: FinCategory = serde_json::from_str(text).unwrap();
        assert!(c.validate().is_valid());
        assert_eq!(serde_json::to_string(&c).unwrap(), text);
    }

    #[test]
    fn functor_checks() {
        let cospan = Arc::new(FinCategory::walking_cospan());
        let id = CatFunctor::identity(cospan.clone());
        assert!(id.validate().is_valid());

        let term = Arc::new(FinCategory::terminal());
        let constant = CatFunctor::new(cospan.clone(), term.clone(), vec![0; 3], vec![0; 5]).unwrap();
        assert!(constant.validate().is_valid());

        // t_b sent to an identity while b and a stay distinct.
        let mut on_morphisms: Vec<usize> = (0..5).collect();
        on_morphisms[3] = 0;
        let bad = CatFunctor::new(cospan.clone(), cospan.clone(), vec![0, 1, 2], on_morphisms).unwrap();
        let report = bad.validate();
        assert!(report.violations.iter().any(|v| v.kind == "dom_cod" && v.at == vec!["t_b"]));

        let err = CatFunctor::new(cospan, term, vec![0; 2], vec![0; 5]).unwrap_err();
        assert!(matches!(err, Error::MalformedInput(_)));
    }

    #[test]
    fn coproduct_keeps_both_halves() {
        let c = FinCategory::walking_arrow()
            .coproduct(&FinCategory::discrete(&["p"]))
            .unwrap();
        assert_eq!(c.object_count(), 3);
        assert_eq!(c.non_identity().len(), 1);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn small_categories_validate_quickly() {
        let c = corrupted_chain();
        let start = std::time::Instant::now();
        for _ in 0..100 {
            let _ = c.validate();
        }
        assert!(start.elapsed().as_millis() < 100);
    }
}

//! Construction traces of left factors and their independent re-verification.
//!
//! Stage `n` records the arrow `A_n` entering step `n`, the density cell attached to it, the
//! attachment pushout, the transition `A_n → A_{n+1}`, the composite `m_{≤n}: f → A_n`, the
//! certificates, and for `n ≥ 2` the quotient that produced `A_n`. Building and verifying
//! share one renderer, so a trace verifies iff re-running every recorded step reproduces it.

use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{Factorization, GeneratedAwfs};
use crate::ambient::{Ambient, BaseAmbient, Pushout};
use crate::arrows::{ArrAmbient, ArrowObj, Square};
use crate::error::{Error, Result};
use crate::freemonad::{check_wellpointed, qoppa_step, Certificate, QoppaObject, QoppaStep};

pub const TRACE_FORMAT: u64 = 1;

/// Findings past this count per stage are dropped from the report.
const FINDINGS_PER_STAGE: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub format: u64,
    pub f: Value,
    pub backdrop: String,
    pub converged_stage: usize,
    pub stages: Vec<Value>,
    pub lf: Value,
    pub rf: Value,
}

/// One localized discrepancy. `item` is `a` (density cell or attachment), `b` (certificate)
/// or `c` (anything on the composite: arrows, transitions, quotients, the final factors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub stage: Option<usize>,
    pub item: String,
    pub path: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub stages_checked: usize,
    pub findings: Vec<Finding>,
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("trace values serialize")
}

fn pushout_legs<C: Ambient>(p: &Pushout<C>) -> Value {
    json!({
        "apex": to_json(&p.apex),
        "in_left": to_json(&p.in_left),
        "in_right": to_json(&p.in_right),
    })
}

/// Classes of size ≥ 2 among the elements of the two pushout summands, per level.
fn identified<E: BaseAmbient>(base: &E, p: &Pushout<ArrAmbient<E>>) -> Value {
    let level = |images: [Vec<usize>; 2]| -> Vec<Vec<String>> {
        let mut classes: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
        for (side, imgs) in ["inl", "inr"].iter().zip(images) {
            for (k, y) in imgs.into_iter().enumerate() {
                classes.entry(y).or_default().push(format!("{side}:{k}"));
            }
        }
        classes.into_values().filter(|c| c.len() > 1).collect()
    };
    json!({
        "dom": level([base.element_images(&p.in_left.top), base.element_images(&p.in_right.top)]),
        "cod": level([base.element_images(&p.in_left.bottom), base.element_images(&p.in_right.bottom)]),
    })
}

fn render_stage<E: BaseAmbient>(
    awfs: &GeneratedAwfs<E>,
    steps: &[QoppaStep<ArrAmbient<E>>],
    n: usize,
    m_le: &Square<E>,
) -> Result<Value> {
    let arr = awfs.arr();
    let step = &steps[n];
    let data = awfs.endo().data(&step.input.a)?;
    let d = &data.density;
    let u = awfs.generators();
    let objects: Vec<Value> = d
        .comma
        .objects
        .iter()
        .enumerate()
        .map(|(k, (i, alpha))| {
            json!({
                "name": d.comma.name(k),
                "generator": u.index.object_name(*i),
                "problem": to_json(alpha),
            })
        })
        .collect();
    let morphisms: Vec<Value> = d
        .comma
        .category
        .non_identity()
        .map(|k| {
            let m = d.comma.category.morphism(k);
            json!({
                "name": m.name,
                "dom": d.comma.name(m.dom),
                "cod": d.comma.name(m.cod),
                "over": u.index.morphism(d.comma.over[k]).name,
            })
        })
        .collect();
    let m_le_passed = arr.in_backdrop(&awfs.monad.backdrop, m_le)?;
    let mut certificates = step.certificates.clone();
    certificates.push(Certificate {
        component: "m_le".into(),
        backdrop: awfs.monad.backdrop.describe(),
        passed: m_le_passed,
    });
    let quotient = if n >= 2 {
        let q = &steps[n - 2];
        json!({
            "inner": pushout_legs(&q.inner),
            "fold": to_json(&q.fold),
            "gap": to_json(&q.gap),
            "outer": pushout_legs(&q.outer),
            "identified": identified(&arr.base, &q.outer),
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "stage": n,
        "input": to_json(&step.input),
        "sizes": arr.sizes(&step.input.a),
        "density": {
            "objects": objects,
            "morphisms": morphisms,
            "den": to_json(&d.den),
            "counit": to_json(&d.counit),
        },
        "attachment": {
            "pushout": pushout_legs(&data.attachment),
            "arrow": to_json(&data.arrow),
        },
        "transition": to_json(&step.f_tau),
        "m_le": to_json(m_le),
        "certificates": to_json(&certificates),
        "wellpointed": step.wellpointed,
        "quotient": quotient,
    }))
}

/// Composites `m_{≤n}: f → A_n` for every step.
fn running_units<E: BaseAmbient>(
    arr: &ArrAmbient<E>,
    f: &ArrowObj<E>,
    steps: &[QoppaStep<ArrAmbient<E>>],
) -> Result<Vec<Square<E>>> {
    let mut out = vec![arr.identity(f)];
    for step in &steps[..steps.len().saturating_sub(1)] {
        let last = out.last().expect("nonempty");
        out.push(arr.compose(&step.f_tau, last)?);
    }
    Ok(out)
}

impl<E: BaseAmbient> GeneratedAwfs<E> {
    pub fn trace(&self, fact: &Factorization<E>) -> Result<Trace> {
        let steps = &fact.free.steps;
        let units = running_units(self.arr(), &fact.f, steps)?;
        let stages = (0..steps.len())
            .map(|n| render_stage(self, steps, n, &units[n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trace {
            format: TRACE_FORMAT,
            f: to_json(&fact.f),
            backdrop: self.base_backdrop.describe(),
            converged_stage: fact.converged_stage(),
            stages,
            lf: to_json(&fact.lf),
            rf: to_json(&fact.rf),
        })
    }

    pub fn trace_of(&self, f: &ArrowObj<E>) -> Result<Trace> {
        self.trace(&self.factorize_arrow(f)?)
    }
}

impl Trace {
    pub fn to_json(&self) -> Value {
        to_json(self)
    }
}

fn item_of(key: &str) -> &'static str {
    match key {
        "density" | "attachment" => "a",
        "certificates" => "b",
        _ => "c",
    }
}

fn diff(path: &str, got: &Value, want: &Value, out: &mut Vec<(String, String)>) {
    if out.len() >= FINDINGS_PER_STAGE {
        return;
    }
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => {
            for (k, wv) in w {
                let p = format!("{path}.{k}");
                match g.get(k) {
                    Some(gv) => diff(&p, gv, wv, out),
                    None => out.push((p, "missing".into())),
                }
            }
            for k in g.keys().filter(|k| !w.contains_key(*k)) {
                out.push((format!("{path}.{k}"), "unexpected field".into()));
            }
        }
        (Value::Array(g), Value::Array(w)) => {
            if g.len() != w.len() {
                out.push((path.into(), format!("{} entries recorded, {} recomputed", g.len(), w.len())));
                return;
            }
            for (i, (gv, wv)) in g.iter().zip(w).enumerate() {
                diff(&format!("{path}[{i}]"), gv, wv, out);
            }
        }
        _ if got != want => out.push((path.into(), format!("recorded {got}, recomputed {want}"))),
        _ => {}
    }
}

struct Verifier<'a, E: BaseAmbient> {
    awfs: &'a GeneratedAwfs<E>,
    findings: Vec<Finding>,
}

impl<E: BaseAmbient> Verifier<'_, E> {
    fn find(&mut self, stage: Option<usize>, item: &str, path: impl Into<String>, detail: impl Into<String>) {
        self.findings.push(Finding {
            stage,
            item: item.into(),
            path: path.into(),
            detail: detail.into(),
        });
    }

    fn parse<T: serde::de::DeserializeOwned>(&mut self, stage: Option<usize>, path: &str, v: Option<&Value>) -> Option<T> {
        match v.map(|v| serde_json::from_value::<T>(v.clone())) {
            Some(Ok(x)) => Some(x),
            Some(Err(e)) => {
                self.find(stage, "c", path, format!("does not parse: {e}"));
                None
            }
            None => {
                self.find(stage, "c", path, "missing");
                None
            }
        }
    }

    /// Parses the recorded step input, rejecting a structure square that does not commute.
    fn recorded_input(&mut self, n: usize, stage: &Value) -> Option<QoppaObject<ArrAmbient<E>>> {
        let path = format!("stages[{n}].input");
        let x: QoppaObject<ArrAmbient<E>> = self.parse(Some(n), &path, stage.get("input"))?;
        let f = &x.f;
        let ta = self.awfs.endo().data(&x.a).ok().map(|d| d.arrow.clone());
        match Square::new(self.awfs.base(), f.source.clone(), f.target.clone(), f.top.clone(), f.bottom.clone()) {
            Ok(_) if Some(&f.source) == ta.as_ref() && f.target == x.b => Some(x),
            Ok(_) => {
                self.find(Some(n), "c", format!("{path}.f"), "structure does not run T A → B");
                None
            }
            Err(e) => {
                self.find(Some(n), "c", format!("{path}.f"), e.to_string());
                None
            }
        }
    }

    fn run(&mut self, t: &Value) -> usize {
        let awfs = self.awfs;
        let arr = awfs.arr();
        if t.get("format") != Some(&json!(TRACE_FORMAT)) {
            self.find(None, "c", "format", format!("expected format {TRACE_FORMAT}"));
        }
        let backdrop = awfs.base_backdrop.describe();
        if t.get("backdrop") != Some(&json!(backdrop)) {
            self.find(None, "c", "backdrop", format!("expected backdrop {backdrop}"));
        }
        let Some(f) = self.parse::<ArrowObj<E>>(None, "f", t.get("f")) else {
            return 0;
        };
        let Some(recorded) = t.get("stages").and_then(Value::as_array) else {
            self.find(None, "c", "stages", "missing or not an array");
            return 0;
        };
        let start = match awfs.endo().data(&f) {
            Ok(d) => QoppaObject {
                a: f.clone(),
                b: d.arrow.clone(),
                f: arr.identity(&d.arrow),
            },
            Err(e) => {
                self.find(None, "c", "f", format!("cannot start the construction: {e}"));
                return 0;
            }
        };
        // Re-execute every recorded step from its recorded input.
        let mut steps: Vec<QoppaStep<ArrAmbient<E>>> = Vec::new();
        let mut expected = start;
        for (n, stage) in recorded.iter().enumerate() {
            let input = match self.recorded_input(n, stage) {
                Some(x) => {
                    if x != expected {
                        self.find(
                            Some(n),
                            "c",
                            format!("stages[{n}].input"),
                            "does not match the output of the previous stage",
                        );
                    }
                    x
                }
                None => expected.clone(),
            };
            let amb = arr.clone();
            let run = catch_unwind(AssertUnwindSafe(|| {
                qoppa_step(&amb, awfs.endo(), &awfs.monad.backdrop, &input)
            }));
            let step = match run {
                Ok(Ok(s)) => s,
                Ok(Err(e)) => {
                    let item = if matches!(e, Error::BackdropViolation(_)) { "b" } else { "c" };
                    self.find(Some(n), item, format!("stages[{n}]"), format!("step does not re-execute: {e}"));
                    return n;
                }
                Err(_) => {
                    self.find(Some(n), "c", format!("stages[{n}]"), "step does not re-execute");
                    return n;
                }
            };
            expected = step.output.clone();
            steps.push(step);
        }
        for n in 0..steps.len().saturating_sub(1) {
            let (head, tail) = steps.split_at_mut(n + 1);
            match check_wellpointed(arr, awfs.endo(), &head[n], &tail[0]) {
                Ok(ok) => head[n].wellpointed = Some(ok),
                Err(e) => self.find(Some(n), "c", format!("stages[{n}].wellpointed"), e.to_string()),
            }
        }
        // Convergence: the first iso unit, followed by exactly one stability stage.
        let converged = steps.iter().position(|s| s.unit_is_iso(arr));
        match converged {
            Some(c) if c + 2 == steps.len() => {}
            Some(c) => self.find(
                None,
                "c",
                "stages",
                format!("{} stages recorded, convergence at {c} requires {}", steps.len(), c + 2),
            ),
            None => self.find(None, "c", "stages", "no recorded stage has an invertible unit"),
        }
        if t.get("converged_stage") != converged.map(|c| json!(c)).as_ref() {
            self.find(None, "c", "converged_stage", format!("recomputed {converged:?}"));
        }
        let units = match running_units(arr, &f, &steps) {
            Ok(u) => u,
            Err(e) => {
                self.find(None, "c", "stages", format!("transitions do not compose: {e}"));
                return steps.len();
            }
        };
        for (n, stage) in recorded.iter().enumerate() {
            let want = match render_stage(awfs, &steps, n, &units[n]) {
                Ok(v) => v,
                Err(e) => {
                    self.find(Some(n), "c", format!("stages[{n}]"), e.to_string());
                    continue;
                }
            };
            let mut diffs = Vec::new();
            diff(&format!("stages[{n}]"), stage, &want, &mut diffs);
            for (path, detail) in diffs {
                let key = path.split('.').nth(1).unwrap_or("").split('[').next().unwrap_or("");
                let item = item_of(key);
                self.find(Some(n), item, path, detail);
            }
            if let Ok(certs) = serde_json::from_value::<Vec<Certificate>>(want["certificates"].clone()) {
                if certs.iter().any(|c| !c.passed) {
                    self.find(Some(n), "b", format!("stages[{n}].certificates"), "a certificate fails");
                }
            }
        }
        // The recomposed colimit is the composite up to the converged stage.
        if let Some(c) = converged {
            let lf = ArrowObj::<E>::new(units[c].top.clone());
            let rf = units[c].target.clone();
            let mut diffs = Vec::new();
            diff("lf", t.get("lf").unwrap_or(&Value::Null), &to_json(&lf), &mut diffs);
            diff("rf", t.get("rf").unwrap_or(&Value::Null), &to_json(&rf), &mut diffs);
            for (path, detail) in diffs {
                self.find(None, "c", path, detail);
            }
            match awfs.factorize_arrow(&f) {
                Ok(fact) if fact.lf == lf && fact.rf == rf => {}
                Ok(_) => self.find(None, "c", "lf", "recomposition differs from the factorization"),
                Err(e) => self.find(None, "c", "f", format!("does not factorize: {e}")),
            }
        }
        let extra: Vec<String> = t
            .as_object()
            .map(|m: &Map<String, Value>| {
                m.keys()
                    .filter(|k| !["format", "f", "backdrop", "converged_stage", "stages", "lf", "rf"].contains(&k.as_str()))
                    .cloned()
                    .collect()
            })
            .unwrap_or_default();
        for k in extra {
            self.find(None, "c", k, "unexpected field");
        }
        steps.len()
    }
}

/// Re-executes a trace against `awfs` and reports every discrepancy with its JSON path.
pub fn verify_trace<E: BaseAmbient>(awfs: &GeneratedAwfs<E>, t: &Value) -> VerifyReport {
    let mut v = Verifier {
        awfs,
        findings: Vec::new(),
    };
    let stages_checked = v.run(t);
    VerifyReport {
        passed: v.findings.is_empty(),
        stages_checked,
        findings: v.findings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{Backdrop, SetAmbient};
    use crate::density::{walking_cospan_diagram, ArrowDiagram};
    use crate::finset::{FinFunction, FinSet};

    fn arrow(d: usize, c: usize, t: Vec<usize>) -> ArrowObj<SetAmbient> {
        ArrowObj::new(FinFunction::new(FinSet::of_size(d), FinSet::of_size(c), t).unwrap())
    }

    #[test]
    fn emitted_trace_verifies() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let t = awfs.trace_of(&arrow(0, 1, vec![])).unwrap().to_json();
        let r = verify_trace(&awfs, &t);
        assert!(r.passed, "{:?}", r.findings);
        assert_eq!(r.stages_checked, 4);
    }

    #[test]
    fn stage_two_records_the_identification() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let t = awfs.trace_of(&arrow(0, 1, vec![])).unwrap().to_json();
        assert_eq!(t["stages"][1]["density"]["objects"].as_array().unwrap().len(), 4);
        let classes = t["stages"][2]["quotient"]["identified"]["dom"].as_array().unwrap();
        let both = |c: &Value| c.as_array().unwrap().iter().filter(|x| *x == "inl:0" || *x == "inl:1").count() == 2;
        assert!(classes.iter().any(both));
    }

    #[test]
    fn deleting_a_quotient_pair_is_localized() {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let mut t = awfs.trace_of(&arrow(0, 1, vec![])).unwrap().to_json();
        t["stages"][2]["quotient"]["identified"]["dom"][0].as_array_mut().unwrap().remove(1);
        let r = verify_trace(&awfs, &t);
        assert!(!r.passed);
        assert!(r.findings.iter().any(|f| f.stage == Some(2) && f.item == "c"));
    }

    #[test]
    fn empty_generators_trace_is_trivial() {
        let awfs = GeneratedAwfs::new(SetAmbient, ArrowDiagram::empty(), Backdrop::All);
        let t = awfs.trace_of(&arrow(2, 1, vec![0, 0])).unwrap();
        assert_eq!(t.converged_stage, 0);
        assert!(verify_trace(&awfs, &t.to_json()).passed);
    }
}

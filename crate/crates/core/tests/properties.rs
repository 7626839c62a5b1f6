//! Property tests over random small finite maps.

use proptest::prelude::*;

use garnet::ambient::{Ambient, Backdrop, SetAmbient};
use garnet::arrows::{ArrowObj, Square};
use garnet::awfs::{verify_trace, GeneratedAwfs, SearchMode};
use garnet::density::{point_diagram, subobject_diagram_sets, walking_cospan_diagram};
use garnet::finset::{coequalizer, pushout, FinFunction, FinSet};

fn fin_map(max: usize) -> impl Strategy<Value = FinFunction> {
    (0..=max, 0..=max).prop_flat_map(|(a, b)| {
        let entries = if b == 0 { Just(vec![]).boxed() } else { prop::collection::vec(0..b, a).boxed() };
        let a = if b == 0 { 0 } else { a };
        entries.prop_map(move |t| FinFunction::new(FinSet::of_size(a), FinSet::of_size(b), t).unwrap())
    })
}

/// A pair of maps out of a common domain.
fn span(max: usize) -> impl Strategy<Value = (FinFunction, FinFunction)> {
    (0..=max, 1..=max, 1..=max).prop_flat_map(|(a, b, c)| {
        (prop::collection::vec(0..b, a), prop::collection::vec(0..c, a)).prop_map(move |(f, g)| {
            (
                FinFunction::new(FinSet::of_size(a), FinSet::of_size(b), f).unwrap(),
                FinFunction::new(FinSet::of_size(a), FinSet::of_size(c), g).unwrap(),
            )
        })
    })
}

fn parallel(max: usize) -> impl Strategy<Value = (FinFunction, FinFunction)> {
    (0..=max, 1..=max).prop_flat_map(|(a, b)| {
        (prop::collection::vec(0..b, a), prop::collection::vec(0..b, a)).prop_map(move |(f, g)| {
            (
                FinFunction::new(FinSet::of_size(a), FinSet::of_size(b), f).unwrap(),
                FinFunction::new(FinSet::of_size(a), FinSet::of_size(b), g).unwrap(),
            )
        })
    })
}

fn families() -> Vec<GeneratedAwfs<SetAmbient>> {
    vec![
        GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All),
        GeneratedAwfs::new(SetAmbient, point_diagram(), Backdrop::All),
        GeneratedAwfs::new(SetAmbient, subobject_diagram_sets().unwrap(), Backdrop::Mono),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_recomposes(f in fin_map(4)) {
        for awfs in families() {
            let fact = awfs.factorize(&f).unwrap();
            prop_assert_eq!(fact.rf.map.after(&fact.lf.map).unwrap(), f.clone());
            prop_assert_eq!(fact.lf.map.cod(), &fact.midpoint);
        }
    }

    #[test]
    fn factorization_is_deterministic(f in fin_map(3)) {
        let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
        let one = awfs.trace_of(&ArrowObj::new(f.clone())).unwrap().to_json();
        let two = awfs.trace_of(&ArrowObj::new(f)).unwrap().to_json();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn emitted_traces_verify(f in fin_map(3)) {
        for awfs in families() {
            let t = awfs.trace_of(&ArrowObj::new(f.clone())).unwrap().to_json();
            let text = serde_json::to_string(&t).unwrap();
            let back: serde_json::Value = serde_json::from_str(&text).unwrap();
            let r = verify_trace(&awfs, &back);
            prop_assert!(r.passed, "{:?}", r.findings);
        }
    }

    #[test]
    fn structures_and_algebras_correspond(f in fin_map(3)) {
        for awfs in families() {
            let f = ArrowObj::new(f.clone());
            let search = awfs.find_lifting_structures(&f, SearchMode::All).unwrap();
            let algebras = awfs.enumerate_algebras(&f).unwrap();
            prop_assert_eq!(search.structures.len(), algebras.len());
            for s in &search.structures {
                prop_assert!(awfs.is_lifting_structure(s).unwrap());
                let zeta = awfs.structure_to_algebra(s).unwrap();
                prop_assert!(algebras.contains(&zeta));
                prop_assert_eq!(&awfs.algebra_to_structure(&f, &zeta).unwrap(), s);
            }
        }
    }

    #[test]
    fn laws_hold(f in fin_map(3)) {
        for awfs in families() {
            let r = awfs.law_suite(&ArrowObj::new(f.clone())).unwrap();
            prop_assert!(r.passed(), "{:?}", r.failures());
        }
    }

    #[test]
    fn left_factors_carry_coalgebras(f in fin_map(3)) {
        for awfs in families() {
            let c = awfs.left_factor_coalgebra(&ArrowObj::new(f.clone())).unwrap();
            prop_assert!(awfs.is_coalgebra(&c).unwrap());
            // Retracting along identities is the identity on coalgebras.
            let id = Square::identity(awfs.base(), &c.f);
            prop_assert_eq!(awfs.retract_lift(&c, &id, &id).unwrap(), c);
        }
    }

    #[test]
    fn pushout_square_commutes((f, g) in span(4)) {
        let p = pushout(&f, &g).unwrap();
        prop_assert_eq!(p.in_b.after(&f).unwrap(), p.in_c.after(&g).unwrap());
        // Jointly surjective legs.
        let mut hit = vec![false; p.apex.size()];
        for x in p.in_b.table().iter().chain(p.in_c.table()) {
            hit[*x] = true;
        }
        prop_assert!(hit.into_iter().all(|h| h));
    }

    #[test]
    fn coequalizer_is_a_surjective_fork((f, g) in parallel(4)) {
        let q = coequalizer(&f, &g).unwrap();
        prop_assert_eq!(q.proj.after(&f).unwrap(), q.proj.after(&g).unwrap());
        prop_assert!(q.proj.is_surjective());
    }

    #[test]
    fn maps_round_trip_through_json(f in fin_map(5)) {
        let text = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<FinFunction>(&text).unwrap(), f);
    }
}

#[test]
fn empty_generators_give_identity_left_factor() {
    let awfs = GeneratedAwfs::new(SetAmbient, garnet::density::ArrowDiagram::empty(), Backdrop::All);
    let f = FinFunction::new(FinSet::of_size(2), FinSet::of_size(3), vec![0, 2]).unwrap();
    let fact = awfs.factorize(&f).unwrap();
    assert_eq!(fact.lf.map, FinFunction::identity(f.dom()));
    assert_eq!(fact.rf.map, f);
    assert_eq!(fact.converged_stage(), 0);
}

#[test]
fn split_epis_carry_structures_against_the_cospan() {
    let awfs = GeneratedAwfs::new(SetAmbient, walking_cospan_diagram(), Backdrop::All);
    let arr = awfs.arr();
    let f = ArrowObj::new(FinFunction::new(FinSet::of_size(2), FinSet::of_size(1), vec![0, 0]).unwrap());
    let count = awfs.find_lifting_structures(&f, SearchMode::Count).unwrap().count;
    assert_eq!(count, 2);
    assert_eq!(arr.sizes(&f), vec![2, 1]);
}

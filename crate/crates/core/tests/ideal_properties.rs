mod common;

use common::{compose, factors_through, pointed, preorder_with_objects};
use proptest::prelude::*;
use sextor_core::cat::{FinCategory, MorId};
use sextor_core::ideal::{check_ideal, ideal_from_objects, is_closed, is_ideal, null_objects, Ideal, NullCategory};

fn absorbs(c: &FinCategory, members: &[bool]) -> bool {
    c.morphisms().filter(|m| members[m.index()]).all(|m| {
        c.morphisms().all(|x| {
            (c.cod(x) != c.dom(m) || members[compose(c, m, x).index()])
                && (c.dom(x) != c.cod(m) || members[compose(c, x, m).index()])
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn object_ideals_are_closed_ideals((c, zs) in preorder_with_objects(5)) {
        let n = ideal_from_objects(&c, &zs).unwrap();
        for m in c.morphisms() {
            prop_assert_eq!(n.contains(m), factors_through(&c, &zs, m));
        }
        prop_assert!(check_ideal(&c, &n).is_ideal);
        prop_assert!(is_closed(&c, &n).closed);
        let nulls = null_objects(&c, &n);
        for z in &zs {
            prop_assert!(nulls.contains(z));
        }
        for o in nulls {
            prop_assert!(factors_through(&c, &zs, c.identity(o)));
        }
    }

    #[test]
    fn ideal_predicate_matches_absorption((c, _) in preorder_with_objects(4), bits in proptest::collection::vec(any::<bool>(), 16)) {
        let members: Vec<bool> = (0..c.num_morphisms()).map(|i| bits[i % bits.len()]).collect();
        let ids: Vec<MorId> = c.morphisms().filter(|m| members[m.index()]).collect();
        let r = is_ideal(&c, &ids).unwrap();
        prop_assert_eq!(r.is_ideal, absorbs(&c, &members));
        prop_assert_eq!(r.counterexample.is_none(), r.is_ideal);
    }

    #[test]
    fn reflection_matches_definition((c, zs) in preorder_with_objects(5)) {
        let nc = NullCategory::through_objects(c.clone(), &zs).unwrap();
        for xi in c.morphisms() {
            let direct = c.morphisms()
                .filter(|&a| c.cod(a) == c.dom(xi))
                .all(|a| !nc.is_null(compose(&c, xi, a)) || nc.is_null(a));
            prop_assert_eq!(nc.reflects_null(xi), direct);
            let codirect = c.morphisms()
                .filter(|&a| c.dom(a) == c.cod(xi))
                .all(|a| !nc.is_null(compose(&c, a, xi)) || nc.is_null(a));
            prop_assert_eq!(nc.coreflects_null(xi), codirect);
        }
    }
}

#[test]
fn pointed_sets_ideal_is_constant_maps() {
    let nc = pointed(3);
    let c = nc.cat();
    // Maps through the one-point set: one per hom set.
    let expected = c.num_objects() * c.num_objects();
    assert_eq!(nc.ideal().len(), expected);
    assert_eq!(nc.null_objects(), vec![c.find_obj("P1").unwrap()]);
}

#[test]
fn empty_and_full_ideals() {
    let nc = pointed(2);
    let c = nc.cat();
    let empty = Ideal::empty(c);
    let all = Ideal::all(c);
    assert!(check_ideal(c, &empty).is_ideal && is_closed(c, &empty).closed);
    assert!(check_ideal(c, &all).is_ideal && is_closed(c, &all).closed);
    assert_eq!(null_objects(c, &all).len(), 2);
    assert!(Ideal::from_members(c, [MorId(99)]).is_err());
    assert!(ideal_from_objects(c, &[sextor_core::cat::ObjId(7)]).is_err());
}

mod common;

use common::preorder_with_objects;
use proptest::prelude::*;
use sextor_core::cat::{build_pointed_sets, CategoryError};
use sextor_core::format::{
    parse_category, serialize_json, serialize_text, serialize_text_annotated, NullSpec, ParseError,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn null_declarations_round_trip((c, zs) in preorder_with_objects(5)) {
        let members: Vec<_> = c.morphisms().filter(|m| m.index() % 2 == 0).collect();
        for null in [NullSpec::None, NullSpec::Objects(zs.clone()), NullSpec::Members(members.clone())] {
            let text = serialize_text(&c, &null);
            let back = parse_category(&text).unwrap();
            prop_assert_eq!(&back.null, &null);
            prop_assert_eq!(serialize_text(&back.cat, &back.null), text);
            let json = serialize_json(&c, &null);
            let back = parse_category(&json).unwrap();
            prop_assert_eq!(&back.null, &null);
            prop_assert_eq!(serialize_json(&back.cat, &back.null), json);
        }
    }

    #[test]
    fn comments_do_not_change_the_category((c, zs) in preorder_with_objects(4)) {
        let null = NullSpec::Objects(zs);
        let plain = serialize_text(&c, &null);
        let noted = serialize_text_annotated(&c, &null, |o| Some(format!("object number {}", o.index())));
        prop_assert_ne!(&plain, &noted);
        let back = parse_category(&noted).unwrap();
        prop_assert_eq!(serialize_text(&back.cat, &back.null), plain);
    }
}

fn err(text: &str) -> ParseError {
    parse_category(text).unwrap_err()
}

#[test]
fn semantic_errors() {
    let head = "category X\nobject A\n";
    assert_eq!(
        err(&format!("{head}object A\n")),
        ParseError::Semantic {
            line: 3,
            source: CategoryError::DuplicateObject("A".into())
        }
    );
    let base = format!("{head}morphism e : A -> A\nidentity A = e\n");
    assert!(matches!(
        err(&format!("{base}morphism e : A -> A\n")),
        ParseError::Semantic {
            line: 5,
            source: CategoryError::DuplicateMorphism(_)
        }
    ));
    assert!(matches!(
        err(&format!("{base}compose e . e = e\ncompose e . e = e\n")),
        ParseError::Semantic {
            line: 6,
            source: CategoryError::DuplicateComposite { .. }
        }
    ));
    assert!(matches!(
        err(&format!("{base}compose e . x = e\n")),
        ParseError::Unknown { line: 5, .. }
    ));
    assert!(matches!(
        err(&format!("{base}null {{ e, z }}\n")),
        ParseError::Unknown { line: 5, .. }
    ));
    assert_eq!(
        err("category X\nobject A\nmorphism e : A -> A\n"),
        ParseError::Category(CategoryError::MissingIdentity("A".into()))
    );
}

#[test]
fn composites_must_be_composable() {
    let text = "category X\nobject A\nobject B\nmorphism a : A -> A\nmorphism b : B -> B\nidentity A = a\nidentity B = b\ncompose a . b = a\n";
    assert!(matches!(
        err(text),
        ParseError::Semantic {
            line: 8,
            source: CategoryError::NotComposable { .. }
        }
    ));
}

#[test]
fn json_rejects_unknown_fields() {
    let c = build_pointed_sets(1).unwrap();
    let json = serialize_json(&c, &NullSpec::None);
    let bad = json.replacen('{', "{\"extra\": 1,", 1);
    assert!(matches!(err(&bad), ParseError::Json(_)));
    assert!(matches!(err("{ not json"), ParseError::Json(_)));
}

#[test]
fn pointed_sets_survive_both_formats() {
    for n in 1..=3 {
        let c = build_pointed_sets(n).unwrap();
        let p1 = c.find_obj("P1").unwrap();
        let null = NullSpec::Objects(vec![p1]);
        for text in [serialize_text(&c, &null), serialize_json(&c, &null)] {
            let back = parse_category(&text).unwrap();
            assert_eq!(back.cat.fingerprint(), c.fingerprint());
            assert_eq!(back.ideal().len(), n * n);
        }
    }
}

#[test]
fn null_blocks_accept_commas() {
    let c = build_pointed_sets(3).unwrap();
    let base = serialize_text(&c, &NullSpec::None);
    for block in [
        "null objects { P1, P2 }",
        "null objects { P1,P2 }",
        "null objects {\n P1\n P2 }",
    ] {
        let f = parse_category(&format!("{base}{block}\n")).unwrap();
        assert_eq!(
            f.null,
            NullSpec::Objects(vec![c.find_obj("P1").unwrap(), c.find_obj("P2").unwrap()])
        );
    }
}

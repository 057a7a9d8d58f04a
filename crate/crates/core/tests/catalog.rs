mod common;

use proptest::prelude::*;
use scenforge::{Catalog, CatalogError, CriticalityLevel, LevelMapping, ProbabilityLevel};

#[test]
fn table1_fixture_loads() {
    let c = common::load_catalog("table1.json");
    assert_eq!(c.len(), 10);
    let curved = c.get("curved_road").unwrap();
    assert_eq!(curved.name, "Curved Road");
    assert_eq!(curved.criticality, CriticalityLevel::B);
    assert_eq!(curved.probability, ProbabilityLevel::A);
    assert_eq!(c.get("cem").unwrap().probability, ProbabilityLevel::E);
    assert_eq!(c.mapping(), &LevelMapping::default());
}

#[test]
fn lookups_follow_default_mapping() {
    let c = common::load_catalog("table1.json");
    assert_eq!(c.probability_value("overtaking").unwrap(), 0.1);
    assert_eq!(c.probability_value("cem").unwrap(), 0.00001);
    assert_eq!(c.criticality_rank("overtaking").unwrap(), 3);
    assert_eq!(c.criticality_rank("safety_distance_violation").unwrap(), 1);
    assert!(matches!(c.probability_value("nope"), Err(CatalogError::UnknownFeature(_))));
    assert!(c.criticality_rank("nope").is_err());
}

#[test]
fn custom_levels() {
    let json = r#"{
        "levels": {
            "probability": {"A":0.5,"B":0.2,"C":0.1,"D":0.01,"E":0.001},
            "criticality_rank": {"A":5,"B":3,"C":1}
        },
        "features": [
            {"id":"x","name":"X","criticality":"B","probability":"A"}
        ]
    }"#;
    let c = Catalog::load(json.as_bytes()).unwrap();
    assert_eq!(c.probability_value("x").unwrap(), 0.5);
    assert_eq!(c.criticality_rank("x").unwrap(), 3);
}

#[test]
fn empty_catalog() {
    let c = Catalog::load(br#"{"features":[]}"#).unwrap();
    assert!(c.is_empty());
    assert_eq!(c.mapping(), &LevelMapping::default());
}

#[test]
fn rejects_bad_files() {
    let dup = br#"{"features":[
        {"id":"overtaking","name":"O","criticality":"A","probability":"A"},
        {"id":"overtaking","name":"O2","criticality":"A","probability":"B"}]}"#;
    let err = Catalog::load(dup).unwrap_err();
    assert!(err.to_string().contains("overtaking"), "{err}");

    let level = br#"{"features":[{"id":"fog","name":"Fog","criticality":"D","probability":"A"}]}"#;
    let err = Catalog::load(level).unwrap_err();
    assert!(err.to_string().contains("fog"), "{err}");

    let extra = br#"{"features":[{"id":"fog","name":"Fog","criticality":"A","probability":"A","colour":1}]}"#;
    assert!(matches!(Catalog::load(extra), Err(CatalogError::Syntax(_))));

    let id = br#"{"features":[{"id":"Fog","name":"Fog","criticality":"A","probability":"A"}]}"#;
    assert!(Catalog::load(id).is_err());

    let mono = br#"{"levels":{"probability":{"A":0.1,"B":0.2,"C":0.001,"D":0.0001,"E":0.00001},
        "criticality_rank":{"A":3,"B":2,"C":1}},"features":[]}"#;
    assert!(Catalog::load(mono).is_err());

    let range = br#"{"levels":{"probability":{"A":1.5,"B":0.2,"C":0.001,"D":0.0001,"E":0.00001},
        "criticality_rank":{"A":3,"B":2,"C":1}},"features":[]}"#;
    assert!(Catalog::load(range).is_err());

    let crit = br#"{"levels":{"probability":{"A":0.1,"B":0.01,"C":0.001,"D":0.0001,"E":0.00001},
        "criticality_rank":{"A":1,"B":2,"C":3}},"features":[]}"#;
    assert!(Catalog::load(crit).is_err());

    assert!(Catalog::load(b"{").is_err());
    assert!(Catalog::load(&[0xff, 0xfe]).is_err());
}

#[test]
fn loading_twice_is_stable() {
    let bytes = std::fs::read(common::fixture("table1.json")).unwrap();
    let copy = bytes.clone();
    let a = Catalog::load(&bytes).unwrap();
    let b = Catalog::load(&bytes).unwrap();
    assert_eq!(bytes, copy);
    assert_eq!(a.features(), b.features());
    assert_eq!(a.to_json(), b.to_json());
}

fn arb_mapping() -> impl Strategy<Value = LevelMapping> {
    (
        proptest::collection::vec(1e-12f64..1.0, 5),
        proptest::collection::btree_set(1u32..50, 3),
    )
        .prop_filter_map("distinct values", |(mut p, r)| {
            p.sort_by(|a, b| b.partial_cmp(a).unwrap());
            p.dedup();
            let r: Vec<u32> = r.into_iter().rev().collect();
            LevelMapping::new(p.try_into().ok()?, [r[0], r[1], r[2]]).ok()
        })
}

proptest! {
    #[test]
    fn round_trip(
        mapping in arb_mapping(),
        feats in proptest::collection::btree_map("[a-z_][a-z0-9_]{0,10}", (0usize..3, 0usize..5, ".{0,12}"), 0..20),
    ) {
        let features: Vec<_> = feats
            .into_iter()
            .map(|(id, (c, p, name))| scenforge::Feature {
                id,
                name,
                criticality: CriticalityLevel::ALL[c],
                probability: ProbabilityLevel::ALL[p],
            })
            .collect();
        let c = Catalog::new(features, mapping).unwrap();
        let once = Catalog::load(c.to_json().as_bytes()).unwrap();
        let twice = Catalog::load(once.to_json().as_bytes()).unwrap();
        prop_assert_eq!(once.features(), c.features());
        prop_assert_eq!(once.mapping(), c.mapping());
        prop_assert_eq!(twice.features(), once.features());
        prop_assert_eq!(twice.mapping(), once.mapping());
        prop_assert_eq!(twice.to_json(), once.to_json());
    }

    #[test]
    fn mapping_is_monotone(mapping in arb_mapping()) {
        for w in ProbabilityLevel::ALL.windows(2) {
            prop_assert!(mapping.probability(w[0]) > mapping.probability(w[1]));
        }
        for w in CriticalityLevel::ALL.windows(2) {
            prop_assert!(mapping.criticality_rank(w[0]) > mapping.criticality_rank(w[1]));
        }
    }
}

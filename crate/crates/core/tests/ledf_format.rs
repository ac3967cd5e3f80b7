mod common;

use common::{fixture_dump, fixture_path};
use geoprobe::ledf::{read_dump_file, write_dump_file};
use geoprobe::{read_dump, write_dump, EmbeddingDump, Error, ItemKind, ItemRecord, Matrix};
use proptest::prelude::*;

/// Bytes for a 2-layer, 1-item, dim-2 word dump, assembled field by field.
fn hand_assembled() -> Vec<u8> {
    let metadata = br#"[{"id":0,"surface":"x","source_tag":"t","token_position":null}]"#;
    let mut b = Vec::new();
    b.extend_from_slice(b"LEDF");
    b.extend_from_slice(&1u32.to_le_bytes());
    b.extend_from_slice(&2u32.to_le_bytes());
    b.extend_from_slice(&2u32.to_le_bytes());
    b.extend_from_slice(&1u64.to_le_bytes());
    b.extend_from_slice(&0u32.to_le_bytes());
    b.extend_from_slice(&(metadata.len() as u64).to_le_bytes());
    b.extend_from_slice(&2u32.to_le_bytes());
    b.extend_from_slice(b"m1");
    b.extend_from_slice(metadata);
    for x in [1.0f32, 0.0, -2.5, 0.125] {
        b.extend_from_slice(&x.to_le_bytes());
    }
    b
}

fn tiny() -> EmbeddingDump {
    EmbeddingDump::new(
        "m1",
        ItemKind::Word,
        vec![ItemRecord::new(0, "x", "t")],
        vec![Matrix::new(1, 2, vec![1.0, 0.0]).unwrap(), Matrix::new(1, 2, vec![-2.5, 0.125]).unwrap()],
    )
    .unwrap()
}

#[test]
fn writer_matches_hand_assembled_layout() {
    let mut out = Vec::new();
    let n = write_dump(&tiny(), &mut out).unwrap();
    assert_eq!(out, hand_assembled());
    assert_eq!(n as usize, out.len());
}

#[test]
fn reader_accepts_hand_assembled_layout() {
    assert_eq!(read_dump(hand_assembled().as_slice()).unwrap(), tiny());
}

#[test]
fn single_vector_size_arithmetic() {
    let d = EmbeddingDump::new(
        "m",
        ItemKind::Word,
        vec![ItemRecord::new(0, "w", "t")],
        vec![Matrix::new(1, 2, vec![1.0, 0.0]).unwrap()],
    )
    .unwrap();
    let mut out = Vec::new();
    let n = write_dump(&d, &mut out).unwrap();
    assert_eq!(n, 36 + 4 + 1 + d.header.metadata_bytes + 8);
}

#[test]
fn checked_in_fixture_is_stable() {
    let bytes = std::fs::read(fixture_path()).unwrap();
    let mut expected = Vec::new();
    write_dump(&fixture_dump(), &mut expected).unwrap();
    assert_eq!(bytes, expected, "fixture bytes drifted; the writer changed the format");
    let d = read_dump_file(fixture_path()).unwrap();
    assert_eq!(d.header.item_kind, ItemKind::Word);
    assert_eq!(d.items[2].surface, "café");
    assert_eq!(d.vector(1, 0).unwrap(), &[-0.375, -0.125, 0.125]);
}

#[test]
#[ignore = "rewrites tests/fixtures; run by hand after an intended format change"]
fn regenerate_fixture() {
    std::fs::create_dir_all(fixture_path().parent().unwrap()).unwrap();
    write_dump_file(&fixture_dump(), fixture_path()).unwrap();
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.ledf");
    write_dump_file(&fixture_dump(), &p).unwrap();
    assert_eq!(read_dump_file(&p).unwrap(), fixture_dump());
}

#[test]
fn unsupported_version_and_kind() {
    let mut b = hand_assembled();
    b[4] = 2;
    assert!(matches!(read_dump(b.as_slice()), Err(Error::UnsupportedVersion(2))));
    let mut b = hand_assembled();
    b[24] = 9;
    assert!(matches!(read_dump(b.as_slice()), Err(Error::InvalidMetadata(_))));
}

#[test]
fn nan_on_disk_is_rejected_with_location() {
    let mut b = hand_assembled();
    let at = b.len() - 4;
    b[at..].copy_from_slice(&f32::NAN.to_le_bytes());
    match read_dump(b.as_slice()) {
        Err(Error::NonFinite { layer: 1, item: 0, column: 1 }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn error_messages_name_the_failure() {
    let b = hand_assembled();
    assert_eq!(read_dump(&b[..10]).unwrap_err().to_string(), "unexpected end of dump at byte 10");
    assert_eq!(read_dump(&b"RIFF...."[..]).unwrap_err().to_string(), "not a LEDF file");
    let mut c = b.clone();
    c[16] = 2;
    assert!(read_dump(c.as_slice()).unwrap_err().to_string().starts_with("metadata count mismatch"));
}

fn arb_dump() -> impl Strategy<Value = EmbeddingDump> {
    (1usize..5, 1usize..8, 1usize..6, 0u32..3, "[a-z]{0,12}").prop_flat_map(|(layers, items, dim, kind, model)| {
        let values = proptest::collection::vec(any::<f32>().prop_filter("finite", |x| x.is_finite()), layers * items * dim);
        let surfaces = proptest::collection::vec("\\PC{1,10}", items);
        let positions = proptest::collection::vec(proptest::option::of(0u64..512), items);
        (values, surfaces, positions).prop_map(move |(values, surfaces, positions)| {
            let records = surfaces
                .into_iter()
                .zip(positions)
                .enumerate()
                .map(|(i, (s, p))| ItemRecord {
                    id: i as u64,
                    surface: s,
                    source_tag: "prop".into(),
                    token_position: p,
                })
                .collect();
            let mats = values
                .chunks(items * dim)
                .map(|c| Matrix::new(items, dim, c.to_vec()).unwrap())
                .collect();
            EmbeddingDump::new(model.clone(), ItemKind::from_code(kind).unwrap(), records, mats).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(d in arb_dump()) {
        let mut bytes = Vec::new();
        write_dump(&d, &mut bytes).unwrap();
        let back = read_dump(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back.header, &d.header);
        prop_assert_eq!(&back.items, &d.items);
        for (a, b) in d.layers.iter().zip(&back.layers) {
            let a: Vec<u32> = a.as_slice().iter().map(|x| x.to_bits()).collect();
            let b: Vec<u32> = b.as_slice().iter().map(|x| x.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn serialization_is_deterministic(d in arb_dump()) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_dump(&d, &mut a).unwrap();
        write_dump(&d.clone(), &mut b).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn every_strict_prefix_is_truncated(d in arb_dump(), frac in 0.0f64..1.0) {
        let mut bytes = Vec::new();
        write_dump(&d, &mut bytes).unwrap();
        let cut = ((bytes.len() as f64) * frac) as usize;
        match read_dump(&bytes[..cut]) {
            Err(Error::Truncated { offset }) => prop_assert_eq!(offset, cut as u64),
            Err(Error::NotLedf) => prop_assert!(cut < 4),
            other => prop_assert!(false, "cut {}: {:?}", cut, other),
        }
    }

    #[test]
    fn select_rows_picks_requested_rows(d in arb_dump(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let ids: Vec<usize> = picks.iter().map(|p| p.index(d.item_count())).collect();
        for l in 0..d.layer_count() {
            let m = d.select_rows(l, &ids).unwrap();
            for (r, &id) in ids.iter().enumerate() {
                prop_assert_eq!(m.row(r), d.vector(l, id).unwrap());
            }
        }
    }
}

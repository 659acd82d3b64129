mod common;

use std::fs;

use proptest::prelude::*;

use latentcloud_core::autoencoder::{
    load_model, model_from_bytes, model_to_bytes, save_model, AEConfig, AEModel, SplitInfo,
};
use latentcloud_core::data::{
    build_dataset, cloud_to_binary, cloud_to_text, load_cloud, normalize, parse_cloud_binary,
    parse_cloud_text, save_cloud, CloudFormat, DatasetManifest, DatasetSpec, ShapeFamily,
};
use latentcloud_core::metrics::Point;
use latentcloud_core::PointCloud;

fn f32_point() -> impl Strategy<Value = Point> {
    prop::array::uniform3(-1e3f32..1e3f32).prop_map(|p| p.map(f64::from))
}

fn f64_point() -> impl Strategy<Value = Point> {
    prop::array::uniform3(-1e6..1e6f64)
}

proptest! {
    #[test]
    fn binary_format_round_trips_f32_values(pts in prop::collection::vec(f32_point(), 1..200)) {
        let cloud = PointCloud::new(pts).unwrap();
        let bytes = cloud_to_binary(&cloud);
        let back = parse_cloud_binary(&bytes).unwrap();
        prop_assert!(back.bitwise_eq(&cloud));
        prop_assert_eq!(cloud_to_binary(&back), bytes);
    }

    #[test]
    fn text_format_round_trips_f64_values(pts in prop::collection::vec(f64_point(), 1..200)) {
        let cloud = PointCloud::new(pts).unwrap();
        let back = parse_cloud_text(&cloud_to_text(&cloud)).unwrap();
        prop_assert!(back.bitwise_eq(&cloud));
    }

    #[test]
    fn normalize_round_trip_and_idempotence(pts in prop::collection::vec(f64_point(), 1..100)) {
        let cloud = PointCloud::new(pts).unwrap();
        let (unit, norm) = normalize(&cloud);
        let radius = unit.points().iter().map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()).fold(0.0, f64::max);
        prop_assert!(radius <= 1.0 + 1e-12);
        let back = norm.denormalize(&unit);
        for (p, q) in back.points().iter().zip(cloud.points()) {
            for k in 0..3 {
                prop_assert!((p[k] - q[k]).abs() <= 1e-9 * (1.0 + q[k].abs()));
            }
        }
        let (twice, _) = normalize(&unit);
        for (p, q) in twice.points().iter().zip(unit.points()) {
            for k in 0..3 {
                prop_assert!((p[k] - q[k]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn model_file_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut model = AEModel::new(AEConfig::desk_scale()).unwrap();
    model.meta.epochs_trained = 12;
    model.meta.final_loss = Some(0.1 + 0.2);
    model.meta.split = Some(SplitInfo {
        val_fraction: 0.2,
        seed: 7,
    });
    let path = dir.path().join("m.dcae");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert!(loaded.bitwise_eq(&model));
    assert_eq!(loaded.meta, model.meta);
    assert_eq!(fs::read(&path).unwrap(), model_to_bytes(&loaded));

    let mut r = common::rng(40);
    let c = common::random_cloud(&mut r, 256);
    assert!(model
        .reconstruct(&c)
        .unwrap()
        .bitwise_eq(&loaded.reconstruct(&c).unwrap()));
}

#[test]
fn corrupted_model_files_are_rejected() {
    let model = AEModel::new(AEConfig {
        input_points: 8,
        output_points: 8,
        latent_size: 4,
        encoder_widths: vec![8],
        decoder_widths: vec![8],
        seed: 0,
    })
    .unwrap();
    let bytes = model_to_bytes(&model);
    for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
        assert!(model_from_bytes(&bytes[..cut]).is_err(), "cut at {cut}");
    }
    let mut flipped = bytes.clone();
    let last = flipped.len() - 20;
    flipped[last] ^= 0x40;
    assert!(model_from_bytes(&flipped).is_err());
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(model_from_bytes(&extra).is_err());
    assert!(model_from_bytes(&bytes).unwrap().bitwise_eq(&model));
}

fn spec(seed: u64) -> DatasetSpec {
    DatasetSpec {
        families: ShapeFamily::ALL.iter().map(|&f| (f, 1)).collect(),
        count: 9,
        points: 64,
        seed,
    }
}

#[test]
fn dataset_generation_is_deterministic() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let ma = build_dataset(&spec(7), a.path()).unwrap();
    build_dataset(&spec(7), b.path()).unwrap();
    build_dataset(&spec(8), c.path()).unwrap();
    assert_eq!(ma.len(), 9);
    for e in &ma.entries {
        let fa = fs::read(a.path().join(&e.path)).unwrap();
        assert_eq!(fa, fs::read(b.path().join(&e.path)).unwrap(), "{}", e.id);
        assert_ne!(fa, fs::read(c.path().join(&e.path)).unwrap(), "{}", e.id);
    }
    assert_eq!(
        fs::read(a.path().join("manifest.json")).unwrap(),
        fs::read(b.path().join("manifest.json")).unwrap()
    );

    let loaded = DatasetManifest::load(a.path().join("manifest.json")).unwrap();
    assert_eq!(loaded.entries, ma.entries);
    assert_eq!(loaded.families(), ["box-chair", "table", "lamp"]);
    for cloud in loaded.load_all().unwrap() {
        assert_eq!(cloud.len(), 64);
        let r = cloud
            .points()
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
            .fold(0.0, f64::max);
        // stored as f32, so the unit radius holds to f32 precision
        assert!((r - 1.0).abs() < 1e-6, "radius {r}");
    }
}

#[test]
fn save_cloud_picks_format_and_load_detects_it() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = PointCloud::new(vec![[0.5, -0.25, 1.0], [2.0, 3.0, -4.5]]).unwrap();
    let pcb = dir.path().join("c.pcb");
    let xyz = dir.path().join("c.xyz");
    save_cloud(&cloud, &pcb, CloudFormat::from_path(&pcb)).unwrap();
    save_cloud(&cloud, &xyz, CloudFormat::from_path(&xyz)).unwrap();
    assert!(fs::read(&pcb).unwrap().starts_with(b"PCB1"));
    assert!(load_cloud(&pcb).unwrap().bitwise_eq(&cloud));
    assert!(load_cloud(&xyz).unwrap().bitwise_eq(&cloud));
    let bad = dir.path().join("bad.xyz");
    fs::write(&bad, "1 2 3\n4 five 6\n").unwrap();
    let msg = load_cloud(&bad).unwrap_err().to_string();
    assert!(msg.contains("line 2"), "{msg}");
}

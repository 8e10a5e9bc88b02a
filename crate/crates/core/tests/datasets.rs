mod common;

use std::fs;

use common::bx;
use coveval::datasets::*;
use coveval::fractal::*;
use coveval::{Detection, Error, GroundTruth};
use proptest::prelude::*;

const ONE_CRACK: &str = r#"<annotation>
  <filename>img001.jpg</filename>
  <size><width>500</width><height>400</height><depth>3</depth></size>
  <object>
    <name>crack</name>
    <bndbox><xmin>48</xmin><ymin>240</ymin><xmax>195</xmax><ymax>371</ymax></bndbox>
  </object>
</annotation>
"#;

fn scene(false_alarms: f64) -> SyntheticScene {
    let p = TransformParams::random(1, (0.35, 0.65), (-0.25, 0.25)).unwrap();
    let c = generate_curve(&p, 6, 3, Point::new(10.0, 50.0), Point::new(300.0, 80.0)).unwrap();
    let noise = NoiseModel {
        position_jitter: 0.1,
        scale_jitter: 0.7,
        duplication: 2,
        dropout: 0.2,
        false_alarms,
        ..NoiseModel::default()
    };
    synthesize_annotations(&c, "scene_0000", 24.0, 24.0, &noise, 3).unwrap()
}

#[test]
fn voc_single_object() {
    let gts = parse_voc_gt(ONE_CRACK, "img001").unwrap();
    assert_eq!(gts, vec![GroundTruth::new("img001", "crack", bx(48.0, 240.0, 195.0, 371.0))]);
    let ann = parse_voc_annotation(ONE_CRACK, "img001", "img001.xml").unwrap();
    assert_eq!((ann.width, ann.height), (Some(500.0), Some(400.0)));
}

#[test]
fn voc_without_objects() {
    assert!(parse_voc_gt("<annotation><filename>x</filename></annotation>", "x").unwrap().is_empty());
}

#[test]
fn voc_degenerate_box_names_the_object() {
    let xml = ONE_CRACK.replace("<object>", "<object><name>crack</name><bndbox><xmin>1</xmin><ymin>1</ymin><xmax>5</xmax><ymax>5</ymax></bndbox></object>\n  <object>")
        .replace("<xmax>195</xmax>", "<xmax>48</xmax>");
    match parse_voc_annotation(&xml, "img001", "a.xml") {
        Err(Error::InvalidObject { index, line, reason, .. }) => {
            assert_eq!(index, 1);
            assert_eq!(line, 5);
            assert!(reason.contains("invalid box"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn voc_malformed_xml_has_location() {
    match parse_voc_annotation("<annotation>\n  <object>\n</annotation>", "x", "bad.xml") {
        Err(Error::Parse { source_name, line, .. }) => {
            assert_eq!(source_name, "bad.xml");
            assert_eq!(line, 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn detection_lines() {
    let d = parse_detections("img001 0.92 10 20 110 220\n".as_bytes(), "crack", "crack.txt").unwrap();
    assert_eq!(d, vec![Detection::new("img001", "crack", bx(10.0, 20.0, 110.0, 220.0), 0.92).unwrap()]);
    assert!(parse_detections("".as_bytes(), "crack", "crack.txt").unwrap().is_empty());
    let commented = "# header\n\n  img002 0.5 0 0 1 1  \n";
    assert_eq!(parse_detections(commented.as_bytes(), "crack", "c").unwrap().len(), 1);
}

#[test]
fn detection_errors_carry_location() {
    let cases = [
        ("img001 1.50 0 0 5 5\n", 1, 2),
        ("ok 0.5 0 0 1 1\nimg 0.5 0 0 1\n", 2, 1),
        ("img 0.5 0 zero 1 1\n", 1, 4),
        ("img 0.5 0 0 NaN 1\n", 1, 5),
        ("img 0.5 5 0 1 1\n", 1, 3),
    ];
    for (text, want_line, want_col) in cases {
        match parse_detections(text.as_bytes(), "crack", "crack.txt") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (want_line, want_col), "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn scene_round_trip_is_bit_exact() {
    for s in [scene(0.0), scene(3.0)] {
        let text = write_scene(&s).unwrap();
        let back = read_scene(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(write_scene(&back).unwrap(), text);
        for (p, q) in s.curve.points.iter().zip(&back.curve.points) {
            assert_eq!((p.x.to_bits(), p.y.to_bits(), p.t_order.to_bits()), (q.x.to_bits(), q.y.to_bits(), q.t_order.to_bits()));
        }
    }
}

#[test]
fn scene_without_detections() {
    let mut s = scene(0.0);
    s.detections.clear();
    let text = write_scene(&s).unwrap();
    assert!(text.contains("\"detections\": []"));
    assert_eq!(read_scene(&text).unwrap(), s);
}

#[test]
fn scene_schema_version_is_checked() {
    let text = write_scene(&scene(0.0)).unwrap().replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(matches!(read_scene(&text), Err(Error::SchemaVersion { found: 99, expected: 1 })));
}

#[test]
fn detections_json_round_trip() {
    let dets = scene(2.0).detections;
    let text = write_detections_json(&dets).unwrap();
    assert_eq!(read_detections_json(&text).unwrap(), dets);
    let bad = text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    assert!(matches!(read_detections_json(&bad), Err(Error::SchemaVersion { .. })));
}

#[test]
fn text_formats_are_fixed_points() {
    let s = scene(2.0);
    let text = write_detections(&s.detections);
    let once = parse_detections(text.as_bytes(), CRACK_CLASS, "t").unwrap();
    assert_eq!(once, s.detections);
    assert_eq!(write_detections(&once), text);

    let ann = VocAnnotation {
        image_id: s.image_id.clone(),
        width: Some(s.width),
        height: Some(s.height),
        objects: s.ground_truths.clone(),
    };
    let xml = write_voc_annotation(&ann);
    let back = parse_voc_annotation(&xml, &s.image_id, "x").unwrap();
    assert_eq!(back, ann);
    assert_eq!(write_voc_annotation(&back), xml);
}

#[test]
fn manifest_checks() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.xml"), ONE_CRACK).unwrap();
    let img = |id: &str, path: &str| ManifestImage {
        image_id: id.into(),
        width: 500.0,
        height: 400.0,
        gt_path: path.into(),
    };
    let m = Manifest::new(vec!["crack".into()], vec![img("a", "a.xml")]);
    let path = dir.path().join(MANIFEST_FILE);
    fs::write(&path, m.to_json().unwrap()).unwrap();
    assert_eq!(Manifest::load(&path).unwrap(), m);
    let set = load_ground_truth(dir.path()).unwrap();
    assert_eq!(set.ground_truths.len(), 1);
    assert_eq!(set.classes, ["crack"]);

    let dup = Manifest::new(vec!["crack".into()], vec![img("a", "a.xml"), img("a", "a.xml")]);
    assert!(Manifest::from_json(&dup.to_json().unwrap()).is_err());

    let missing = Manifest::new(vec!["crack".into()], vec![img("b", "b.xml")]);
    fs::write(&path, missing.to_json().unwrap()).unwrap();
    assert!(Manifest::load(&path).is_err());
}

#[test]
fn xml_directory_and_class_files() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt");
    let det = dir.path().join("det");
    fs::create_dir_all(&gt).unwrap();
    fs::create_dir_all(&det).unwrap();
    fs::write(gt.join("img001.xml"), ONE_CRACK).unwrap();
    fs::write(gt.join("img002.xml"), ONE_CRACK.replace("crack", "spall")).unwrap();
    let set = load_ground_truth(&gt).unwrap();
    assert_eq!(set.classes, ["crack", "spall"]);
    let ids: Vec<_> = set.images.iter().map(|i| i.image_id.as_str()).collect();
    assert_eq!(ids, ["img001", "img002"]);

    fs::write(det.join("crack.txt"), "img001 0.9 48 240 195 371\n").unwrap();
    match load_detections(&det, &set.classes) {
        Err(Error::Config(msg)) => assert!(msg.contains("'spall'")),
        other => panic!("{other:?}"),
    }
    fs::write(det.join("spall.txt"), "").unwrap();
    assert_eq!(load_detections(&det, &set.classes).unwrap().len(), 1);
}

#[test]
fn validation_findings() {
    let m = Manifest::new(
        vec!["crack".into()],
        vec![ManifestImage {
            image_id: "a".into(),
            width: 100.0,
            height: 100.0,
            gt_path: "a.xml".into(),
        }],
    );
    let gts = vec![
        GroundTruth::new("a", "crack", bx(0.0, 0.0, 10.0, 10.0)),
        GroundTruth::new("a", "crack", bx(50.0, 50.0, 120.0, 60.0)),
    ];
    let ok = vec![Detection::new("a", "crack", bx(1.0, 1.0, 9.0, 9.0), 0.8).unwrap()];
    assert!(validate_inputs(&m, &gts[..1], &ok).is_empty());

    let r = validate_inputs(&m, &gts, &ok);
    assert_eq!(r.out_of_extent.len(), 1);
    assert_eq!(r.out_of_extent[0].image_id, "a");
    assert_eq!(r.out_of_extent[0].source, BoxSource::GroundTruth);

    let stray = vec![
        Detection::new("zzz", "crack", bx(1.0, 1.0, 9.0, 9.0), 0.8).unwrap(),
        Detection::new("a", "pothole", bx(1.0, 1.0, 9.0, 9.0), 0.8).unwrap(),
    ];
    let dup = vec![gts[0].clone(), gts[0].clone()];
    let r = validate_inputs(&m, &dup, &stray);
    assert_eq!(r.unknown_images, ["zzz"]);
    assert_eq!(r.unknown_classes, ["pothole"]);
    assert_eq!(r.duplicate_ground_truths.len(), 1);
}

fn arb_detection() -> impl Strategy<Value = Detection> {
    ("[a-z0-9_]{1,8}", 0.0..=1.0f64, -1e4..1e4f64, -1e4..1e4f64, 1e-3..1e3f64, 1e-3..1e3f64)
        .prop_map(|(id, c, x, y, w, h)| Detection::new(id, "crack", bx(x, y, x + w, y + h), c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn detection_text_fixed_point(dets in prop::collection::vec(arb_detection(), 0..20)) {
        let text = write_detections(&dets);
        let back = parse_detections(text.as_bytes(), "crack", "t").unwrap();
        prop_assert_eq!(&back, &dets);
        prop_assert_eq!(write_detections(&back), text);
    }

    #[test]
    fn detection_parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        if let Err(e) = parse_detections(&bytes[..], "crack", "fuzz.txt") {
            prop_assert!(matches!(e, Error::Parse { line, .. } if line >= 1), "{e:?}");
        }
    }

    #[test]
    fn detection_parser_on_near_valid_lines(line in "[a-z0-9]{1,4}( +[-0-9.eE]{1,6}){3,7}") {
        if let Err(e) = parse_detections(line.as_bytes(), "crack", "fuzz.txt") {
            prop_assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
        }
    }

    #[test]
    fn voc_parser_never_panics(text in "\\PC{0,300}") {
        if let Err(e) = parse_voc_annotation(&text, "x", "fuzz.xml") {
            prop_assert!(matches!(e, Error::Parse { .. } | Error::InvalidObject { .. }), "{e:?}");
        }
    }

    #[test]
    fn voc_parser_on_mangled_documents(cut in 0usize..ONE_CRACK.len(), junk in "[<>/a-z0-9 ]{0,8}") {
        let mut text = ONE_CRACK[..cut].to_string();
        text.push_str(&junk);
        text.push_str(&ONE_CRACK[cut..]);
        if let Err(e) = parse_voc_annotation(&text, "x", "fuzz.xml") {
            prop_assert!(matches!(e, Error::Parse { .. } | Error::InvalidObject { .. }), "{e:?}");
        }
    }

    #[test]
    fn json_readers_never_panic(text in "\\PC{0,200}") {
        let _ = read_scene(&text);
        let _ = read_detections_json(&text);
        let _ = coveval::EvalReport::from_json(&text);
    }
}

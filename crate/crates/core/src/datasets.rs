//! On-disk formats: VOC annotation XML, per-class detection text, unified
//! detection JSON, scene JSON and the dataset manifest.
//!
//! Per-class detection files hold one detection per line:
//!
//! ```text
//! <image_id> <confidence> <xmin> <ymin> <xmax> <ymax>
//! ```
//!
//! Fields are whitespace separated with dot-decimal reals. Blank lines and
//! lines starting with `#` are skipped. Coordinates are taken as given, with
//! no pixel-centre adjustment.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::ImageInfo;
use crate::fractal::SyntheticScene;
use crate::geometry::BBox;
use crate::matching::{Detection, GroundTruth};

pub const SCENE_SCHEMA_VERSION: u32 = 1;
pub const DETECTIONS_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// One parsed VOC annotation file.
#[derive(Debug, Clone, PartialEq)]
pub struct VocAnnotation {
    pub image_id: String,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub objects: Vec<GroundTruth>,
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(name))
}

fn child_text<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Option<&'a str> {
    child(node, name).and_then(|c| c.text()).map(str::trim)
}

/// Parses a VOC-style annotation document. Every `<object>` must carry a
/// `<name>` and a `<bndbox>` with `xmin`, `ymin`, `xmax`, `ymax`.
pub fn parse_voc_annotation(xml: &str, image_id: &str, source_name: &str) -> Result<VocAnnotation> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| {
        let pos = e.pos();
        Error::parse(source_name, pos.row as usize, pos.col as usize, e.to_string())
    })?;
    let root = doc.root_element();
    let line_of = |node: roxmltree::Node<'_, '_>| doc.text_pos_at(node.range().start).row as usize;

    let size = child(root, "size");
    let dim = |name: &str| -> Result<Option<f64>> {
        let Some(size) = size else { return Ok(None) };
        match child(size, name) {
            None => Ok(None),
            Some(node) => {
                let text = node.text().unwrap_or("").trim();
                text.parse::<f64>().map(Some).map_err(|_| {
                    Error::parse(source_name, line_of(node), 1, format!("<{name}> is not a number: '{text}'"))
                })
            }
        }
    };
    let width = dim("width")?;
    let height = dim("height")?;

    let mut objects = Vec::new();
    for (index, obj) in root.children().filter(|c| c.has_tag_name("object")).enumerate() {
        let line = line_of(obj);
        let fail = |reason: String| Error::InvalidObject {
            source_name: source_name.to_string(),
            line,
            index,
            reason,
        };
        let name = child_text(obj, "name")
            .filter(|n| !n.is_empty())
            .ok_or_else(|| fail("missing <name>".into()))?;
        let bndbox = child(obj, "bndbox").ok_or_else(|| fail("missing <bndbox>".into()))?;
        let mut coords = [0.0; 4];
        for (slot, field) in coords.iter_mut().zip(["xmin", "ymin", "xmax", "ymax"]) {
            let text = child_text(bndbox, field).ok_or_else(|| fail(format!("missing <{field}>")))?;
            *slot = text
                .parse::<f64>()
                .map_err(|_| fail(format!("<{field}> is not a number: '{text}'")))?;
        }
        let bbox = BBox::new(coords[0], coords[1], coords[2], coords[3]).map_err(|e| fail(e.to_string()))?;
        objects.push(GroundTruth::new(image_id, name, bbox));
    }
    Ok(VocAnnotation {
        image_id: image_id.to_string(),
        width,
        height,
        objects,
    })
}

pub fn parse_voc_gt(xml: &str, image_id: &str) -> Result<Vec<GroundTruth>> {
    parse_voc_annotation(xml, image_id, image_id).map(|a| a.objects)
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_voc_annotation(ann: &VocAnnotation) -> String {
    let mut out = String::from("<annotation>\n");
    let _ = writeln!(out, "  <filename>{}</filename>", escape_xml(&ann.image_id));
    if let (Some(w), Some(h)) = (ann.width, ann.height) {
        let _ = writeln!(out, "  <size>\n    <width>{w}</width>\n    <height>{h}</height>\n    <depth>3</depth>\n  </size>");
    }
    for g in &ann.objects {
        let b = &g.bbox;
        let _ = writeln!(
            out,
            "  <object>\n    <name>{}</name>\n    <bndbox>\n      <xmin>{}</xmin>\n      <ymin>{}</ymin>\n      <xmax>{}</xmax>\n      <ymax>{}</ymax>\n    </bndbox>\n  </object>",
            escape_xml(&g.class_id),
            b.x1(),
            b.y1(),
            b.x2(),
            b.y2()
        );
    }
    out.push_str("</annotation>\n");
    out
}

/// Parses a per-class detection stream.
pub fn parse_detections<R: BufRead>(reader: R, class_id: &str, source_name: &str) -> Result<Vec<Detection>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::parse(source_name, line_no, 1, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(
                source_name,
                line_no,
                1,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        }
        let mut nums = [0.0; 5];
        for (slot, (idx, text)) in nums.iter_mut().zip(fields.iter().enumerate().skip(1)) {
            *slot = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(source_name, line_no, idx + 1, format!("not a number: '{text}'")))?;
        }
        let confidence = nums[0];
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::parse(
                source_name,
                line_no,
                2,
                format!("confidence {confidence} outside [0, 1]"),
            ));
        }
        let bbox = BBox::new(nums[1], nums[2], nums[3], nums[4])
            .map_err(|e| Error::parse(source_name, line_no, 3, e.to_string()))?;
        out.push(Detection::new(fields[0], class_id, bbox, confidence)?);
    }
    Ok(out)
}

/// Renders detections in the per-class text format. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_detections(dets: &[Detection]) -> String {
    let mut out = String::new();
    for d in dets {
        let b = &d.bbox;
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            d.image_id,
            d.confidence,
            b.x1(),
            b.y1(),
            b.x2(),
            b.y2()
        );
    }
    out
}

fn check_version(value: &serde_json::Value, expected: u32) -> Result<()> {
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::config("document is missing \"schema_version\""))?;
    if found != u64::from(expected) {
        return Err(Error::SchemaVersion {
            found: found.min(u64::from(u32::MAX)) as u32,
            expected,
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SceneDocument<S> {
    schema_version: u32,
    scene: S,
}

pub fn write_scene(scene: &SyntheticScene) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SceneDocument {
        schema_version: SCENE_SCHEMA_VERSION,
        scene,
    })?)
}

pub fn read_scene(text: &str) -> Result<SyntheticScene> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    check_version(&value, SCENE_SCHEMA_VERSION)?;
    let doc: SceneDocument<SyntheticScene> = serde_json::from_value(value)?;
    Ok(doc.scene)
}

#[derive(Serialize, Deserialize)]
struct DetectionsDocument {
    schema_version: u32,
    detections: Vec<Detection>,
}

/// Unified JSON alternative to the per-class text files.
pub fn write_detections_json(dets: &[Detection]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&DetectionsDocument {
        schema_version: DETECTIONS_SCHEMA_VERSION,
        detections: dets.to_vec(),
    })?)
}

pub fn read_detections_json(text: &str) -> Result<Vec<Detection>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    check_version(&value, DETECTIONS_SCHEMA_VERSION)?;
    let doc: DetectionsDocument = serde_json::from_value(value)?;
    for d in &doc.detections {
        if !(0.0..=1.0).contains(&d.confidence) {
            return Err(Error::config(format!(
                "detection on '{}' has confidence {} outside [0, 1]",
                d.image_id, d.confidence
            )));
        }
    }
    Ok(doc.detections)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestImage {
    pub image_id: String,
    pub width: f64,
    pub height: f64,
    /// Annotation path, relative to the manifest's directory.
    pub gt_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub format: String,
    pub classes: Vec<String>,
    pub images: Vec<ManifestImage>,
}

impl Manifest {
    pub fn new(classes: Vec<String>, images: Vec<ManifestImage>) -> Self {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            format: "voc".to_string(),
            classes,
            images,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a manifest and checks that image ids are unique.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        check_version(&value, MANIFEST_SCHEMA_VERSION)?;
        let manifest: Manifest = serde_json::from_value(value)?;
        if manifest.format != "voc" {
            return Err(Error::config(format!("unsupported manifest format '{}'", manifest.format)));
        }
        let mut seen = HashSet::new();
        for img in &manifest.images {
            if !seen.insert(img.image_id.as_str()) {
                return Err(Error::config(format!("duplicate image id '{}' in manifest", img.image_id)));
            }
        }
        Ok(manifest)
    }

    /// Loads a manifest file and checks that every annotation it names exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let manifest = Manifest::from_json(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for img in &manifest.images {
            let gt = dir.join(&img.gt_path);
            if !gt.is_file() {
                return Err(Error::io(
                    gt,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "annotation file not found"),
                ));
            }
        }
        Ok(manifest)
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Ground truth plus the image and class lists it implies.
#[derive(Debug, Clone, Default)]
pub struct GroundTruthSet {
    pub images: Vec<ImageInfo>,
    pub classes: Vec<String>,
    pub ground_truths: Vec<GroundTruth>,
}

fn sorted_entries(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == extension))
        .collect();
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads ground truth from a directory of VOC `.xml` files (image id = file
/// stem, classes = every object name seen) or from a manifest file.
pub fn load_ground_truth(path: &Path) -> Result<GroundTruthSet> {
    let mut set = GroundTruthSet::default();
    if path.is_dir() {
        let manifest = path.join(MANIFEST_FILE);
        if manifest.is_file() {
            return load_ground_truth(&manifest);
        }
        let mut classes = BTreeSet::new();
        for file in sorted_entries(path, "xml")? {
            let id = stem(&file);
            let ann = parse_voc_annotation(&read_text(&file)?, &id, &file.display().to_string())?;
            classes.extend(ann.objects.iter().map(|g| g.class_id.clone()));
            set.images.push(ImageInfo {
                image_id: id,
                width: ann.width,
                height: ann.height,
            });
            set.ground_truths.extend(ann.objects);
        }
        set.classes = classes.into_iter().collect();
    } else {
        let manifest = Manifest::load(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for img in &manifest.images {
            let file = dir.join(&img.gt_path);
            let ann = parse_voc_annotation(&read_text(&file)?, &img.image_id, &file.display().to_string())?;
            set.images.push(ImageInfo {
                image_id: img.image_id.clone(),
                width: Some(img.width),
                height: Some(img.height),
            });
            set.ground_truths.extend(ann.objects);
        }
        set.classes = manifest.classes;
    }
    Ok(set)
}

/// Loads detections from a directory of per-class `<class>.txt` files or a
/// unified JSON file. Every class in `classes` must have a file when loading
/// from a directory.
pub fn load_detections(path: &Path, classes: &[String]) -> Result<Vec<Detection>> {
    if !path.is_dir() {
        return read_detections_json(&read_text(path)?);
    }
    let mut out = Vec::new();
    for class in classes {
        let file = path.join(format!("{class}.txt"));
        if !file.is_file() {
            return Err(Error::config(format!(
                "missing detection file for class '{class}' ({})",
                file.display()
            )));
        }
        let text = read_text(&file)?;
        out.extend(parse_detections(text.as_bytes(), class, &file.display().to_string())?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxSource {
    GroundTruth,
    Detection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtentWarning {
    pub image_id: String,
    pub class_id: String,
    pub source: BoxSource,
    #[serde(rename = "box")]
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Image ids referenced by detections but absent from the manifest.
    pub unknown_images: Vec<String>,
    /// Class ids referenced by detections or ground truth but not declared.
    pub unknown_classes: Vec<String>,
    pub out_of_extent: Vec<ExtentWarning>,
    pub duplicate_ground_truths: Vec<GroundTruth>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.unknown_images.is_empty()
            && self.unknown_classes.is_empty()
            && self.out_of_extent.is_empty()
            && self.duplicate_ground_truths.is_empty()
    }
}

/// Cross-checks loaded inputs. Findings are warnings; nothing here fails.
pub fn validate_inputs(manifest: &Manifest, gts: &[GroundTruth], dets: &[Detection]) -> ValidationReport {
    let extents: HashMap<&str, (f64, f64)> = manifest
        .images
        .iter()
        .map(|i| (i.image_id.as_str(), (i.width, i.height)))
        .collect();
    let classes: HashSet<&str> = manifest.classes.iter().map(String::as_str).collect();
    let mut report = ValidationReport::default();
    let mut unknown_images = BTreeSet::new();
    let mut unknown_classes = BTreeSet::new();

    let outside = |image: &str, b: &BBox| {
        extents
            .get(image)
            .is_some_and(|&(w, h)| b.x1() < 0.0 || b.y1() < 0.0 || b.x2() > w || b.y2() > h)
    };

    for g in gts {
        if !classes.contains(g.class_id.as_str()) {
            unknown_classes.insert(g.class_id.clone());
        }
        if outside(&g.image_id, &g.bbox) {
            report.out_of_extent.push(ExtentWarning {
                image_id: g.image_id.clone(),
                class_id: g.class_id.clone(),
                source: BoxSource::GroundTruth,
                bbox: g.bbox,
            });
        }
    }
    for d in dets {
        if !extents.contains_key(d.image_id.as_str()) {
            unknown_images.insert(d.image_id.clone());
        }
        if !classes.contains(d.class_id.as_str()) {
            unknown_classes.insert(d.class_id.clone());
        }
        if outside(&d.image_id, &d.bbox) {
            report.out_of_extent.push(ExtentWarning {
                image_id: d.image_id.clone(),
                class_id: d.class_id.clone(),
                source: BoxSource::Detection,
                bbox: d.bbox,
            });
        }
    }
    for (i, g) in gts.iter().enumerate() {
        if gts[..i].iter().any(|o| o == g) {
            report.duplicate_ground_truths.push(g.clone());
        }
    }
    report.unknown_images = unknown_images.into_iter().collect();
    report.unknown_classes = unknown_classes.into_iter().collect();
    report
}

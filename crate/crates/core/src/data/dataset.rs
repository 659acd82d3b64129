//! Synthetic dataset generation and the JSON manifest that indexes it.
//!
//! Manifest schema (`manifest.json`, paths relative to the manifest's directory):
//!
//! ```json
//! {
//!   "version": 1,
//!   "normalization": "pre-normalized",
//!   "point_count": 256,
//!   "seed": 7,
//!   "entries": [
//!     {"id": "box-chair-0000", "family": "box-chair", "path": "box-chair-0000.pcb",
//!      "points": 256, "seed": 1234, "params": {"family": "box-chair", ...}}
//!   ]
//! }
//! ```
//!
//! `normalization` is `pre-normalized` when files already hold centred,
//! unit-radius coordinates, or `on-load` when the loader must normalize them.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::io::{load_cloud, save_cloud, CloudFormat};
use super::normalize::normalize;
use super::shapes::{generate_shape, ShapeFamily, ShapeParams};
use crate::error::{Error, ParseError, Result};
use crate::metrics::PointCloud;

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    PreNormalized,
    OnLoad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub family: String,
    pub path: PathBuf,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ShapeParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub normalization: NormalizationMode,
    pub point_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub entries: Vec<ManifestEntry>,
    /// Directory entry paths are resolved against.
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(ParseError::Manifest(format!(
                "unsupported manifest version {}",
                self.version
            ))
            .into());
        }
        if self.point_count == 0 {
            return Err(Error::dim("manifest point count must be positive"));
        }
        let mut ids = HashSet::new();
        for e in &self.entries {
            if !ids.insert(e.id.as_str()) {
                return Err(ParseError::Manifest(format!("duplicate id {:?}", e.id)).into());
            }
            if e.points != self.point_count {
                return Err(Error::dim(format!(
                    "entry {} has {} points, manifest declares {}",
                    e.id, e.points, self.point_count
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: DatasetManifest =
            serde_json::from_str(text).map_err(|e| ParseError::Manifest(e.to_string()))?;
        manifest.root = root.into();
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    pub fn find(&self, id: &str) -> Option<(usize, &ManifestEntry)> {
        self.entries.iter().enumerate().find(|(_, e)| e.id == id)
    }

    /// Family labels in first-seen order.
    pub fn families(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for e in &self.entries {
            if !seen.contains(&e.family) {
                seen.push(e.family.clone());
            }
        }
        seen
    }

    /// Loads one entry, checks its point count, and applies the manifest's
    /// normalization convention.
    pub fn load_entry(&self, index: usize) -> Result<PointCloud> {
        let entry = self
            .entries
            .get(index)
            .ok_or_else(|| Error::dim(format!("entry index {index} out of range")))?;
        let cloud = load_cloud(self.entry_path(entry))?;
        if cloud.len() != self.point_count {
            return Err(Error::dim(format!(
                "{} holds {} points, manifest declares {}",
                entry.id,
                cloud.len(),
                self.point_count
            )));
        }
        Ok(match self.normalization {
            NormalizationMode::PreNormalized => cloud,
            NormalizationMode::OnLoad => normalize(&cloud).0,
        })
    }

    pub fn load_all(&self) -> Result<Vec<PointCloud>> {
        (0..self.len()).map(|i| self.load_entry(i)).collect()
    }
}

/// What to generate: a weighted family mix, a total count, a point count
/// per cloud and a master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub families: Vec<(ShapeFamily, u32)>,
    pub count: usize,
    pub points: usize,
    pub seed: u64,
}

impl DatasetSpec {
    /// Parses `box-chair,table` or weighted `box-chair:2,table:1`.
    pub fn parse_mix(mix: &str) -> Result<Vec<(ShapeFamily, u32)>> {
        let mut out: Vec<(ShapeFamily, u32)> = Vec::new();
        for item in mix.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, weight) = match item.split_once(':') {
                Some((n, w)) => (
                    n.trim(),
                    w.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::config(format!("bad family weight in {item:?}")))?,
                ),
                None => (item, 1),
            };
            let family: ShapeFamily = name.parse()?;
            if out.iter().any(|(f, _)| *f == family) {
                return Err(Error::config(format!("family {family} listed twice")));
            }
            out.push((family, weight));
        }
        if out.is_empty() {
            return Err(Error::config("family mix is empty"));
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::config("dataset count must be at least 1"));
        }
        if self.points == 0 {
            return Err(Error::config("point count must be at least 1"));
        }
        if self.families.is_empty() || self.families.iter().all(|&(_, w)| w == 0) {
            return Err(Error::config("family mix needs a positive weight"));
        }
        Ok(())
    }

    /// Per-family counts by largest remainder; ties go to earlier families.
    pub fn family_counts(&self) -> Vec<(ShapeFamily, usize)> {
        let total: u64 = self.families.iter().map(|&(_, w)| u64::from(w)).sum();
        let count = self.count as u64;
        let mut counts: Vec<(ShapeFamily, usize, u64)> = self
            .families
            .iter()
            .map(|&(f, w)| {
                let exact = count * u64::from(w);
                (f, (exact / total) as usize, exact % total)
            })
            .collect();
        let assigned: usize = counts.iter().map(|c| c.1).sum();
        let mut by_remainder: Vec<usize> = (0..counts.len()).collect();
        by_remainder.sort_by(|&a, &b| counts[b].2.cmp(&counts[a].2).then(a.cmp(&b)));
        for &i in by_remainder.iter().take(self.count - assigned) {
            counts[i].1 += 1;
        }
        counts.into_iter().map(|(f, n, _)| (f, n)).collect()
    }
}

/// Generates, normalizes and writes every cloud plus `manifest.json` into `out_dir`.
pub fn build_dataset(spec: &DatasetSpec, out_dir: impl AsRef<Path>) -> Result<DatasetManifest> {
    spec.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut entries = Vec::with_capacity(spec.count);
    for (family, n) in spec.family_counts() {
        for i in 0..n {
            let params = ShapeParams::sample(family, &mut rng);
            let shape_seed = rng.next_u64();
            let cloud = generate_shape(&params, spec.points, shape_seed)?;
            let (cloud, _) = normalize(&cloud);
            let id = format!("{family}-{i:04}");
            let file = PathBuf::from(format!("{id}.pcb"));
            save_cloud(&cloud, out_dir.join(&file), CloudFormat::Binary)?;
            entries.push(ManifestEntry {
                id,
                family: family.name().to_string(),
                path: file,
                points: spec.points,
                seed: Some(shape_seed),
                params: Some(params),
            });
        }
    }

    let manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        normalization: NormalizationMode::PreNormalized,
        point_count: spec.points,
        seed: Some(spec.seed),
        entries,
        root: out_dir.to_path_buf(),
    };
    manifest.save(out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Number of entries per family label.
pub fn family_histogram(manifest: &DatasetManifest) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for e in &manifest.entries {
        *hist.entry(e.family.clone()).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_parsing() {
        assert_eq!(
            DatasetSpec::parse_mix("box-chair,table:2").unwrap(),
            vec![(ShapeFamily::BoxChair, 1), (ShapeFamily::Table, 2)]
        );
        assert!(DatasetSpec::parse_mix("box-chair,box-chair").is_err());
        assert!(DatasetSpec::parse_mix("sofa").is_err());
        assert!(DatasetSpec::parse_mix("").is_err());
        assert!(DatasetSpec::parse_mix("table:x").is_err());
    }

    #[test]
    fn counts_by_largest_remainder() {
        let spec = DatasetSpec {
            families: ShapeFamily::ALL.iter().map(|&f| (f, 1)).collect(),
            count: 200,
            points: 8,
            seed: 0,
        };
        let counts: Vec<usize> = spec.family_counts().iter().map(|c| c.1).collect();
        assert_eq!(counts, vec![67, 67, 66]);
        let weighted = DatasetSpec {
            families: vec![(ShapeFamily::Table, 3), (ShapeFamily::Lamp, 1)],
            count: 10,
            ..spec
        };
        let counts: Vec<usize> = weighted.family_counts().iter().map(|c| c.1).collect();
        assert_eq!(counts, vec![8, 2]);
    }

    #[test]
    fn manifest_validation() {
        let root = PathBuf::new();
        let dup = r#"{"version":1,"normalization":"on-load","point_count":4,"entries":[
            {"id":"a","family":"x","path":"a.xyz","points":4},
            {"id":"a","family":"x","path":"b.xyz","points":4}]}"#;
        assert!(DatasetManifest::parse(dup, root.clone()).is_err());
        let mismatch = r#"{"version":1,"normalization":"on-load","point_count":4,"entries":[
            {"id":"a","family":"x","path":"a.xyz","points":5}]}"#;
        assert!(matches!(
            DatasetManifest::parse(mismatch, root.clone()),
            Err(Error::Dimension(_))
        ));
        assert!(DatasetManifest::parse("{", root).is_err());
    }
}

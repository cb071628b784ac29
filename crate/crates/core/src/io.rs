//! File formats: group tables, instances, and the convention block embedded
//! in every report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::delsarte::SetSpec;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupDescriptor};

/// `{"name": ..., "order": n, "table": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupFile {
            name: g.name().to_string(),
            order: g.order(),
            table: g.table_rows(),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        if self.order != self.table.len() {
            return Err(Error::SizeMismatch {
                expected: self.order,
                got: self.table.len(),
            });
        }
        FiniteGroup::from_table(self.name.clone(), self.table.clone())
    }
}

/// A group given by file path, by descriptor, or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
    Descriptor(GroupDescriptor),
}

impl GroupRef {
    /// Relative paths are resolved against `base`.
    pub fn load(&self, base: &Path) -> Result<FiniteGroup> {
        match self {
            GroupRef::Path(p) => load_group(&resolve(base, p)),
            GroupRef::Inline(f) => f.build(),
            GroupRef::Descriptor(d) => FiniteGroup::build(d),
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Reads a group file; a bare descriptor such as `{"cyclic": 6}` is also accepted.
pub fn load_group(path: &Path) -> Result<FiniteGroup> {
    let text = std::fs::read_to_string(path)?;
    parse_group(&text)
}

pub fn parse_group(text: &str) -> Result<FiniteGroup> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("table").is_some() && value.get("order").is_some() {
        let file: GroupFile = serde_json::from_value(value)?;
        file.build()
    } else {
        let desc: GroupDescriptor = serde_json::from_value(value)?;
        FiniteGroup::build(&desc)
    }
}

/// `[int]`, `"ALL"` or `"NONE"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetField {
    Keyword(String),
    Members(Vec<usize>),
}

impl SetField {
    pub fn to_spec(&self) -> Result<SetSpec> {
        match self {
            SetField::Members(v) => Ok(SetSpec::Explicit(v.clone())),
            SetField::Keyword(k) if k == "ALL" => Ok(SetSpec::All),
            SetField::Keyword(k) if k == "NONE" => Ok(SetSpec::Empty),
            SetField::Keyword(k) => Err(Error::InvalidInstance(format!("unknown set keyword {k:?}"))),
        }
    }
}

/// `{"elements": [int]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetFile {
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub group: GroupRef,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "U")]
    pub u: SetField,
    #[serde(rename = "V")]
    pub v: SetField,
    /// Replace `U`, `V` by their symmetric bi-invariant closures.
    #[serde(default)]
    pub close: bool,
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Measure normalizations and run parameters recorded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub haar_mass: f64,
    pub coset_measure_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sphere_area: Option<f64>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub pd_relative: f64,
    pub bochner: f64,
    pub kernel_match: f64,
    pub lp_residual: f64,
    pub lp_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pd_relative: 1e-9,
            bochner: 1e-9,
            kernel_match: 1e-10,
            lp_residual: 1e-9,
            lp_gap: 1e-8,
        }
    }
}

impl Conventions {
    pub fn new(seed: u64) -> Self {
        Conventions {
            haar_mass: 1.0,
            coset_measure_mass: 1.0,
            sphere_area: None,
            seed,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_sphere_area(mut self, area: f64) -> Self {
        self.sphere_area = Some(area);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_instance_variants() {
        let inst: InstanceFile =
            serde_json::from_str(r#"{"group": {"cyclic": 4}, "K": [0], "U": [0, 1, 3], "V": "ALL"}"#).unwrap();
        assert_eq!(inst.group, GroupRef::Descriptor(GroupDescriptor::Cyclic(4)));
        assert_eq!(inst.v.to_spec().unwrap(), SetSpec::All);
        assert!(!inst.close);
        let inst: InstanceFile =
            serde_json::from_str(r#"{"group": "z4.json", "K": [0], "U": "NONE", "V": "SOME"}"#).unwrap();
        assert_eq!(inst.group, GroupRef::Path("z4.json".into()));
        assert_eq!(inst.u.to_spec().unwrap(), SetSpec::Empty);
        assert!(inst.v.to_spec().is_err());
    }

    #[test]
    fn group_file_roundtrip() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let text = serde_json::to_string(&GroupFile::from_group(&g)).unwrap();
        assert_eq!(parse_group(&text).unwrap(), g);
        assert_eq!(parse_group(r#"{"dihedral": 4}"#).unwrap(), g);
        assert!(parse_group(r#"{"name": "bad", "order": 2, "table": [[0, 1], [0, 1]]}"#).is_err());
    }
}

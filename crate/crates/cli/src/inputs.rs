//! Loading weights, skeletons and witness families from command-line
//! references and JSON files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sumideal::ideals::WeightFn;
use sumideal::intset::{parse, Registry};
use sumideal::tad::{Provenance, SigmaString, TadSkeleton};
use sumideal::thm1::{DensityWitnessFamily, DEFAULT_DEPTH, DEFAULT_K_SHIFT, DEFAULT_SIGMAS};
use sumideal::SetExpr;

use crate::format::SCHEMA;

/// Tabulated length of the `n²` closed form: enough for depth 7.
pub const FIN_TABLE_LEN: u64 = 5000;
/// Tabulated length of the `φ(n + 15)` closed form.
pub const RCP_TABLE_LEN: u64 = 1_000_000;

/// `one`, `reciprocal` or `table:<file>` with whitespace- or comma-separated
/// values `f(1), f(2), ...`.
pub fn weight(spec: &str) -> Result<WeightFn> {
    match spec {
        "one" => Ok(WeightFn::One),
        "reciprocal" => Ok(WeightFn::Reciprocal),
        _ => {
            let Some(path) = spec.strip_prefix("table:") else {
                bail!("unknown weight {spec:?}; expected one, reciprocal or table:<file>");
            };
            let text = fs::read_to_string(path).with_context(|| format!("reading weight table {path}"))?;
            let values = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("weight value {t:?}")))
                .collect::<Result<Vec<f64>>>()?;
            let name = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("table");
            Ok(WeightFn::table(name, values)?)
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct SkeletonFile {
    pub schema: u64,
    pub provenance: String,
    pub weight: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_values: Option<Vec<f64>>,
    pub g: Vec<u64>,
    pub h: Vec<u64>,
    pub n_m: Vec<u64>,
    pub l_m: Vec<u64>,
}

impl SkeletonFile {
    pub fn from_skeleton(sk: &TadSkeleton) -> Self {
        let weight_values = match &sk.weight {
            WeightFn::Table { values, .. } => Some(values.to_vec()),
            _ => None,
        };
        SkeletonFile {
            schema: SCHEMA,
            provenance: sk.provenance.as_str().into(),
            weight: sk.weight.name().into(),
            weight_values,
            g: sk.g.to_vec(),
            h: sk.h.to_vec(),
            n_m: sk.n_m.clone(),
            l_m: sk.l_m.clone(),
        }
    }

    pub fn into_skeleton(self) -> Result<TadSkeleton> {
        let weight = match (self.weight.as_str(), self.weight_values) {
            ("one", None) => WeightFn::One,
            ("reciprocal", None) => WeightFn::Reciprocal,
            (name, Some(v)) => WeightFn::table(name, v)?,
            (name, None) => bail!("weight {name:?} needs weight_values"),
        };
        let provenance =
            Provenance::parse(&self.provenance).with_context(|| format!("provenance {:?}", self.provenance))?;
        for (name, t) in [("g", &self.g), ("h", &self.h), ("n_m", &self.n_m)] {
            if t.windows(2).any(|w| w[0] >= w[1]) {
                bail!("{name} is not strictly increasing");
            }
        }
        // Milestones and h may run past the tables; only the usable depth shrinks.
        if self.n_m.first() != Some(&0) {
            bail!("n_m must start at 0");
        }
        Ok(TadSkeleton {
            weight,
            g: self.g.into(),
            h: self.h.into(),
            n_m: self.n_m,
            l_m: self.l_m,
            provenance,
        })
    }
}

/// `closed_form_fin`, `closed_form_rcp` or the path of a skeleton JSON file.
pub fn skeleton(reference: &str) -> Result<TadSkeleton> {
    match reference {
        "closed_form_fin" => Ok(TadSkeleton::closed_form_fin(FIN_TABLE_LEN)),
        "closed_form_rcp" => Ok(TadSkeleton::closed_form_rcp(RCP_TABLE_LEN)),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading skeleton {path}"))?;
            let file: SkeletonFile = serde_json::from_str(&text).with_context(|| format!("parsing skeleton {path}"))?;
            file.into_skeleton()
        }
    }
}

/// Branches from a file (whitespace or comma separated) or an inline list.
pub fn sigmas(spec: &str) -> Result<Vec<SigmaString>> {
    let text = if Path::new(spec).is_file() { fs::read_to_string(spec)? } else { spec.to_string() };
    let list = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| Ok(SigmaString::parse(t)?))
        .collect::<Result<Vec<_>>>()?;
    if list.is_empty() {
        bail!("no branches given");
    }
    for (i, a) in list.iter().enumerate() {
        if list[..i].contains(a) {
            bail!("branch {a} is listed twice");
        }
    }
    Ok(list)
}

#[derive(Serialize, Deserialize)]
pub struct FamilyFile {
    pub schema: u64,
    pub skeleton: String,
    pub sigmas: Vec<String>,
    pub depth: usize,
    #[serde(default)]
    pub detectors: Vec<String>,
    pub k_shift: u64,
    pub n: u64,
}

impl FamilyFile {
    pub fn default_for(n: u64) -> Self {
        FamilyFile {
            schema: SCHEMA,
            skeleton: "closed_form_fin".into(),
            sigmas: DEFAULT_SIGMAS.iter().map(|s| s.to_string()).collect(),
            depth: DEFAULT_DEPTH,
            detectors: Vec::new(),
            k_shift: DEFAULT_K_SHIFT,
            n,
        }
    }

    /// Builds the family, registering witnesses as `w1, w2, ...`.
    pub fn build(&self, registry: &mut Registry) -> Result<DensityWitnessFamily> {
        let sk = skeleton(&self.skeleton)?;
        let sigmas = self.sigmas.iter().map(|s| Ok(SigmaString::parse(s)?)).collect::<Result<Vec<_>>>()?;
        let mut fam = DensityWitnessFamily::from_skeleton(&sk, &sigmas, self.depth, self.k_shift, self.n, registry)?;
        fam.detectors =
            self.detectors.iter().map(|d| set(d, registry)).collect::<Result<Vec<SetExpr>>>()?;
        Ok(fam)
    }
}

/// The family in `path`, or the default family at truncation `n`.
pub fn family(path: Option<&str>, n: u64, registry: &mut Registry) -> Result<DensityWitnessFamily> {
    let file = match path {
        None => FamilyFile::default_for(n),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading family {p}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing family {p}"))?
        }
    };
    file.build(registry)
}

/// Chain members given inline, or a single file with one expression per line.
pub fn chain(items: &[String]) -> Result<Vec<String>> {
    if let [single] = items {
        if Path::new(single).is_file() {
            let text = fs::read_to_string(single).with_context(|| format!("reading chain file {single}"))?;
            return Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect());
        }
    }
    Ok(items.to_vec())
}

pub fn set(src: &str, registry: &Registry) -> Result<SetExpr> {
    parse(src, registry).map_err(|e| anyhow::Error::new(e).context(format!("in set expression {src:?}")))
}

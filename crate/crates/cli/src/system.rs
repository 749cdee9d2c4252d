// Input files: a JSON description of the K-theoretic data of a Z^n-action.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use pvss_core::abgrp::{FgAbGroup, GroupHom, Invariants};
use pvss_core::intmat::IntMatrix;
use pvss_core::specseq::{ActionSpec, D2Data, SpecFlags, TupleIndex};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// An integer written either as a JSON number or, when large, as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string of decimal digits")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.trim()
                    .parse::<BigInt>()
                    .map(Int)
                    .map_err(|_| E::custom(format!("`{v}` is not an integer")))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

pub type Matrix = Vec<Vec<Int>>;

pub fn to_matrix(rows: &Matrix, what: &str) -> Result<IntMatrix, CliError> {
    let width = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(CliError::Parse(format!(
            "{what}: row {} has {} entries, row 0 has {width}",
            bad,
            rows[bad].len()
        )));
    }
    let data = rows.iter().flatten().map(|x| x.0.clone()).collect();
    IntMatrix::from_vec(rows.len(), width, data).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn from_matrix(m: &IntMatrix) -> Matrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Int).collect())
        .collect()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InvariantForm {
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<Int>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PresentationForm {
    /// One row per generator, one column per relation.
    pub presentation: Matrix,
}

/// A group either by invariants or by a relation matrix.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GroupSpec {
    Invariants(InvariantForm),
    Presentation(PresentationForm),
}

impl InvariantForm {
    pub fn new(inv: &Invariants) -> Self {
        InvariantForm {
            rank: inv.rank,
            torsion: inv.torsion.iter().cloned().map(Int).collect(),
        }
    }

    pub fn to_invariants(&self) -> Result<Invariants, CliError> {
        let t = self.torsion.iter().map(|x| x.0.clone()).collect();
        Invariants::new(self.rank, t).map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl GroupSpec {
    fn build(&self, what: &str) -> Result<FgAbGroup, CliError> {
        match self {
            GroupSpec::Invariants(InvariantForm { rank, torsion }) => {
                let t: Vec<BigInt> = torsion.iter().map(|x| x.0.clone()).collect();
                if let Some(bad) = t.iter().find(|x| **x < BigInt::from(1)) {
                    return Err(CliError::Validation(format!(
                        "{what}: torsion order {bad} must be positive"
                    )));
                }
                Ok(FgAbGroup::from_orders(*rank, &t))
            }
            GroupSpec::Presentation(PresentationForm { presentation }) => {
                Ok(FgAbGroup::presented(to_matrix(presentation, what)?))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionMaps {
    #[serde(rename = "on_K0")]
    pub on_k0: Matrix,
    #[serde(rename = "on_K1")]
    pub on_k1: Matrix,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaPair {
    pub q0: Matrix,
    pub q1: Matrix,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTable {
    pub pairs: BTreeMap<String, DeltaPair>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum D2Spec {
    Pairs(PairTable),
    Ambient(DeltaPair),
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlagSpec {
    pub k_trivial: bool,
    pub pointwise_inner: bool,
    pub assume_higher_vanish: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Names {
    #[serde(rename = "K0", default)]
    pub k0: Option<Vec<String>>,
    #[serde(rename = "K1", default)]
    pub k1: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Provenance {
    Text(String),
    Lines(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub version: u32,
    pub n: usize,
    #[serde(rename = "K0")]
    pub k0: GroupSpec,
    #[serde(rename = "K1")]
    pub k1: GroupSpec,
    /// May be omitted for K-trivial actions.
    #[serde(default)]
    pub actions: Option<Vec<ActionMaps>>,
    #[serde(default)]
    pub d2: Option<D2Spec>,
    #[serde(default)]
    pub flags: FlagSpec,
    #[serde(default)]
    pub names: Names,
    #[serde(default)]
    pub provenance: Option<Provenance>,
    /// Reference answers carried by corpus files; ignored by the engine.
    #[serde(default)]
    pub expected: Option<serde_json::Value>,
}

/// A parsed and validated input with the hash of its bytes.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub file: SystemFile,
    pub spec: ActionSpec,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn parse(bytes: &[u8]) -> Result<SystemFile, CliError> {
    let file: SystemFile =
        serde_json::from_slice(bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(CliError::Parse(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    Ok(file)
}

pub fn load(bytes: &[u8]) -> Result<LoadedSystem, CliError> {
    let file = parse(bytes)?;
    let spec = build_spec(&file)?;
    Ok(LoadedSystem {
        file,
        spec,
        sha256: sha256_hex(bytes),
    })
}

fn hom(src: &FgAbGroup, tgt: &FgAbGroup, m: &Matrix, what: &str) -> Result<GroupHom, CliError> {
    let m = to_matrix(m, what)?;
    // an empty row list cannot carry a column count
    let m = if m.rows() == 0 { IntMatrix::zeros(0, src.gens()) } else { m };
    if m.shape() != (tgt.gens(), src.gens()) {
        return Err(CliError::Validation(format!(
            "{what}: matrix is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            tgt.gens(),
            src.gens()
        )));
    }
    GroupHom::new(src.clone(), tgt.clone(), m).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

fn parse_pair(key: &str, n: usize) -> Result<TupleIndex, CliError> {
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| CliError::Parse(format!("pair key `{key}` must look like \"(i,j)\"")))?;
    let entries = inner
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Parse(format!("pair key `{key}` must list integers")))?;
    if entries.len() != 2 {
        return Err(CliError::Validation(format!("pair key `{key}` must name two generators")));
    }
    TupleIndex::new(n, entries).map_err(|e| CliError::Validation(format!("pair key `{key}`: {e}")))
}

pub fn build_spec(file: &SystemFile) -> Result<ActionSpec, CliError> {
    let n = file.n;
    let k0 = file.k0.build("K0")?;
    let k1 = file.k1.build("K1")?;
    let flags = SpecFlags {
        k_trivial: file.flags.k_trivial,
        pointwise_inner: file.flags.pointwise_inner,
        assume_higher_vanish: file.flags.assume_higher_vanish,
    };
    let mut spec = match &file.actions {
        None if flags.k_trivial => ActionSpec::trivial(n, k0.clone(), k1.clone()),
        None => {
            return Err(CliError::Validation(
                "actions may only be omitted when k_trivial is set".into(),
            ))
        }
        Some(acts) => {
            if acts.len() != n {
                return Err(CliError::Validation(format!(
                    "{} action entries given for n = {n}",
                    acts.len()
                )));
            }
            let mut a0 = Vec::with_capacity(n);
            let mut a1 = Vec::with_capacity(n);
            for (i, a) in acts.iter().enumerate() {
                a0.push(hom(&k0, &k0, &a.on_k0, &format!("actions[{i}].on_K0"))?);
                a1.push(hom(&k1, &k1, &a.on_k1, &format!("actions[{i}].on_K1"))?);
            }
            ActionSpec::new(n, k0.clone(), k1.clone(), a0, a1)?
        }
    };
    spec = spec.with_flags(flags)?;
    if let Some(d2) = &file.d2 {
        let pair = |p: &DeltaPair, what: &str| -> Result<[GroupHom; 2], CliError> {
            Ok([
                hom(&k0, &k1, &p.q0, &format!("{what}.q0"))?,
                hom(&k1, &k0, &p.q1, &format!("{what}.q1"))?,
            ])
        };
        let data = match d2 {
            D2Spec::Ambient(p) => D2Data::AmbientN2(pair(p, "d2")?),
            D2Spec::Pairs(PairTable { pairs }) => {
                let mut out = BTreeMap::new();
                for (key, p) in pairs {
                    let mu = parse_pair(key, n)?;
                    if out.insert(mu, pair(p, &format!("d2.pairs[{key}]"))?).is_some() {
                        return Err(CliError::Validation(format!("pair `{key}` given twice")));
                    }
                }
                D2Data::PairwiseKTrivial(out)
            }
        };
        spec = spec.with_d2(data)?;
    }
    let default0 = spec.names(0).to_vec();
    let default1 = spec.names(1).to_vec();
    let names0 = file.names.k0.clone().unwrap_or(default0);
    let names1 = file.names.k1.clone().unwrap_or(default1);
    Ok(spec.with_names(names0, names1)?)
}

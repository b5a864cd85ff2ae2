//! The manifest file format: UTF-8 JSON with every number serialized
//! exactly (integers as decimal strings, rationals as "p/q", square roots
//! as "sqrt:p/q"). No floating-point literal ever appears in a certified
//! field, and parse(serialize(m)) reproduces m field for field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::builder::{ConstructionManifest, FSpec, Stage};
use crate::certify::{CertReport, NamedCheck, StageChecks};
use crate::exact::{format_rat, parse_rat, parse_scale};
use crate::norms::{EquivalenceConstants, NormSpec};
use crate::spectrum::{GapCertificate, GapEvidence, IntegerStatus, NonRepWitness};
use crate::{Error, Int, Result};

pub const FORMAT_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
struct ManifestDoc {
    version: String,
    dim: String,
    norm: String,
    f: String,
    eps0: String,
    constants: ConstantsDoc,
    s_min: String,
    stages: Vec<StageDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certification: Option<CertDoc>,
}

#[derive(Serialize, Deserialize)]
struct ConstantsDoc {
    c_lo: String,
    c_hi: String,
}

#[derive(Serialize, Deserialize)]
struct StageDoc {
    n: String,
    r: String,
    eps: String,
    eps_prev: String,
    anchor: Vec<String>,
    side: String,
    ball_radius: String,
    ball_count: String,
    side_shrunk: bool,
    gap: GapDoc,
}

#[derive(Serialize, Deserialize)]
struct GapDoc {
    r: String,
    eps: String,
    evidence: EvidenceDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum EvidenceDoc {
    Euclidean { candidates: Vec<CandidateDoc> },
    Enumerated { examined: String },
}

#[derive(Serialize, Deserialize)]
struct CandidateDoc {
    m: String,
    /// "outside" or a witness: "mod4", "prime:<p>^<e>", "four_pow:<a>".
    status: String,
}

#[derive(Serialize, Deserialize)]
struct CertDoc {
    overall: String,
    depth: String,
    global: Vec<CheckDoc>,
    stages: Vec<StageCheckDoc>,
}

#[derive(Serialize, Deserialize)]
struct CheckDoc {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize, Deserialize)]
struct StageCheckDoc {
    n: String,
    checks: Vec<CheckDoc>,
}

fn int_to_str(n: &Int) -> String {
    n.to_string()
}

fn parse_int(s: &str) -> Result<Int> {
    s.trim()
        .parse::<Int>()
        .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad index '{s}'")))
}

fn witness_to_str(w: &NonRepWitness) -> String {
    match w {
        NonRepWitness::ThreeMod4 => "mod4".into(),
        NonRepWitness::OddPowerPrime { p, exp } => format!("prime:{p}^{exp}"),
        NonRepWitness::EightBSeven { pow4 } => format!("four_pow:{pow4}"),
    }
}

fn witness_from_str(s: &str) -> Result<NonRepWitness> {
    if s == "mod4" {
        return Ok(NonRepWitness::ThreeMod4);
    }
    if let Some(rest) = s.strip_prefix("prime:") {
        let (p, e) = rest
            .split_once('^')
            .ok_or_else(|| Error::Parse(format!("bad prime witness '{s}'")))?;
        return Ok(NonRepWitness::OddPowerPrime {
            p: parse_int(p)?,
            exp: e.parse().map_err(|_| Error::Parse(format!("bad exponent '{e}'")))?,
        });
    }
    if let Some(a) = s.strip_prefix("four_pow:") {
        return Ok(NonRepWitness::EightBSeven {
            pow4: a.parse().map_err(|_| Error::Parse(format!("bad power '{a}'")))?,
        });
    }
    Err(Error::Parse(format!("unknown witness '{s}'")))
}

fn to_doc(m: &ConstructionManifest) -> ManifestDoc {
    ManifestDoc {
        version: FORMAT_VERSION.into(),
        dim: m.dim.to_string(),
        norm: m.norm.to_string(),
        f: m.f.to_string(),
        eps0: format_rat(&m.eps0),
        constants: ConstantsDoc {
            c_lo: format_rat(&m.constants.c_lo),
            c_hi: format_rat(&m.constants.c_hi),
        },
        s_min: m.s_min.to_string(),
        stages: m.stages.iter().map(stage_to_doc).collect(),
        certification: m.certification.as_ref().map(cert_to_doc),
    }
}

fn stage_to_doc(st: &Stage) -> StageDoc {
    StageDoc {
        n: st.n.to_string(),
        r: st.r.to_string(),
        eps: format_rat(&st.eps),
        eps_prev: format_rat(&st.eps_prev),
        anchor: st.anchor.iter().map(int_to_str).collect(),
        side: int_to_str(&st.side),
        ball_radius: format_rat(&st.ball_radius),
        ball_count: int_to_str(&st.ball_count),
        side_shrunk: st.side_shrunk,
        gap: GapDoc {
            r: st.gap.r.to_string(),
            eps: format_rat(&st.gap.eps),
            evidence: match &st.gap.evidence {
                GapEvidence::Euclidean { candidates } => EvidenceDoc::Euclidean {
                    candidates: candidates
                        .iter()
                        .map(|(m, status)| CandidateDoc {
                            m: int_to_str(m),
                            status: match status {
                                IntegerStatus::Outside => "outside".into(),
                                IntegerStatus::NonRepresentable(w) => witness_to_str(w),
                            },
                        })
                        .collect(),
                },
                GapEvidence::Enumerated { examined } => {
                    EvidenceDoc::Enumerated { examined: examined.to_string() }
                }
            },
        },
    }
}

fn cert_to_doc(c: &CertReport) -> CertDoc {
    let check = |c: &NamedCheck| CheckDoc {
        name: c.name.clone(),
        pass: c.pass,
        detail: c.detail.clone(),
    };
    CertDoc {
        overall: c.overall.clone(),
        depth: c.depth.clone(),
        global: c.global.iter().map(check).collect(),
        stages: c
            .stages
            .iter()
            .map(|s| StageCheckDoc {
                n: s.n.to_string(),
                checks: s.checks.iter().map(check).collect(),
            })
            .collect(),
    }
}

fn from_doc(doc: ManifestDoc) -> Result<ConstructionManifest> {
    if doc.version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported manifest version '{}' (expected '{FORMAT_VERSION}')",
            doc.version
        )));
    }
    let dim = parse_usize(&doc.dim)?;
    let norm = NormSpec::parse(dim, &doc.norm)?;
    let f = FSpec::parse(&doc.f)?;
    let mut stages = Vec::with_capacity(doc.stages.len());
    for sd in &doc.stages {
        stages.push(stage_from_doc(sd)?);
    }
    Ok(ConstructionManifest {
        dim,
        norm,
        f,
        eps0: parse_rat(&doc.eps0)?,
        constants: EquivalenceConstants {
            c_lo: parse_rat(&doc.constants.c_lo)?,
            c_hi: parse_rat(&doc.constants.c_hi)?,
        },
        s_min: parse_scale(&doc.s_min)?,
        stages,
        certification: doc.certification.map(cert_from_doc).transpose()?,
    })
}

fn stage_from_doc(sd: &StageDoc) -> Result<Stage> {
    let evidence = match &sd.gap.evidence {
        EvidenceDoc::Euclidean { candidates } => {
            let mut out = Vec::with_capacity(candidates.len());
            for c in candidates {
                let status = if c.status == "outside" {
                    IntegerStatus::Outside
                } else {
                    IntegerStatus::NonRepresentable(witness_from_str(&c.status)?)
                };
                out.push((parse_int(&c.m)?, status));
            }
            GapEvidence::Euclidean { candidates: out }
        }
        EvidenceDoc::Enumerated { examined } => GapEvidence::Enumerated {
            examined: examined
                .parse()
                .map_err(|_| Error::Parse(format!("bad count '{examined}'")))?,
        },
    };
    let anchor = sd
        .anchor
        .iter()
        .map(|s| parse_int(s))
        .collect::<Result<Vec<Int>>>()?;
    Ok(Stage {
        n: parse_usize(&sd.n)?,
        r: parse_scale(&sd.r)?,
        eps: parse_rat(&sd.eps)?,
        eps_prev: parse_rat(&sd.eps_prev)?,
        anchor,
        side: parse_int(&sd.side)?,
        ball_radius: parse_rat(&sd.ball_radius)?,
        ball_count: parse_int(&sd.ball_count)?,
        side_shrunk: sd.side_shrunk,
        gap: GapCertificate {
            r: parse_scale(&sd.gap.r)?,
            eps: parse_rat(&sd.gap.eps)?,
            evidence,
        },
    })
}

fn cert_from_doc(cd: CertDoc) -> Result<CertReport> {
    let check = |c: &CheckDoc| NamedCheck {
        name: c.name.clone(),
        pass: c.pass,
        detail: c.detail.clone(),
    };
    Ok(CertReport {
        overall: cd.overall,
        depth: cd.depth,
        global: cd.global.iter().map(check).collect(),
        stages: cd
            .stages
            .iter()
            .map(|s| {
                Ok(StageChecks {
                    n: parse_usize(&s.n)?,
                    checks: s.checks.iter().map(check).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Serialize to the canonical manifest text (deterministic).
pub fn serialize_manifest(m: &ConstructionManifest) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(m)).expect("manifest serialization");
    s.push('\n');
    s
}

/// Parse a manifest document.
pub fn parse_manifest(text: &str) -> Result<ConstructionManifest> {
    let doc: ManifestDoc = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    from_doc(doc)
}

/// Atomic write: temp file in the target directory, then rename.
pub fn save_manifest(m: &ConstructionManifest, path: &Path) -> Result<()> {
    write_atomic(path, serialize_manifest(m).as_bytes())
}

pub fn load_manifest(path: &Path) -> Result<ConstructionManifest> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text)
}

/// Write-temp-then-rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = dir.to_path_buf();
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".into());
    tmp.push(format!(".{name}.tmp.{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, Budgets};
    use crate::exact::rat_int;

    fn worked() -> ConstructionManifest {
        build(
            &NormSpec::l2(1).unwrap(),
            &FSpec::InvPoly { alpha: rat_int(1) },
            2,
            &Budgets::default(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_exact() {
        let m = worked();
        let text = serialize_manifest(&m);
        let back = parse_manifest(&text).unwrap();
        assert_eq!(m, back);
        // And byte-identical when re-serialized.
        assert_eq!(text, serialize_manifest(&back));
    }

    #[test]
    fn no_float_literals_in_numbers() {
        let m = worked();
        let text = serialize_manifest(&m);
        // Replace eps with a float literal: parsing must fail.
        let bad = text.replace("\"eps\": \"1/4\"", "\"eps\": \"0.25\"");
        assert_ne!(bad, text);
        assert!(matches!(parse_manifest(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn version_mismatch_rejected() {
        let m = worked();
        let text = serialize_manifest(&m);
        let bad = text.replace("\"version\": \"1\"", "\"version\": \"9\"");
        let err = parse_manifest(&bad).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn euclidean_evidence_round_trips() {
        let m2 = build(
            &NormSpec::l2(2).unwrap(),
            &FSpec::InvPoly { alpha: rat_int(1) },
            1,
            &Budgets::default(),
        )
        .unwrap();
        let text = serialize_manifest(&m2);
        assert!(text.contains("euclidean"));
        let back = parse_manifest(&text).unwrap();
        assert_eq!(m2, back);
    }

    #[test]
    fn atomic_save_and_load() {
        let m = worked();
        let dir = std::env::temp_dir();
        let path = dir.join(format!("avoidset-test-{}.json", std::process::id()));
        save_manifest(&m, &path).unwrap();
        let back = load_manifest(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(m, back);
    }
}

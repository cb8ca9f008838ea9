//! Curated knot records and the JSON database format.
//!
//! ```json
//! [{"name": "T(2,3)", "genus": 1, "alexander": [1, -1, 1],
//!   "invariants": [{"char": 0, "nu": 1, "r": 1, "shape": "V"}],
//!   "annotations": {...}, "mirror_of": null}]
//! ```
//!
//! `alexander` lists `c_{-g} ... c_g`. A missing `shape` reads as `"?"`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dims::{mirror, FieldInvariants, FieldLabel, InvariantViolation, Shape};
use crate::poly::LaurentPoly;
use crate::slope::Slope;

fn unknown_shape() -> Shape {
    Shape::Unknown
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantEntry {
    #[serde(rename = "char")]
    pub characteristic: u64,
    pub nu: i64,
    pub r: u64,
    #[serde(default = "unknown_shape")]
    pub shape: Shape,
    /// `"theorem"` for proved values, `"paper-remark"` for values attributed
    /// to announced work.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl InvariantEntry {
    pub fn new(characteristic: u64, nu: i64, r: u64, shape: Shape, provenance: &str) -> Self {
        InvariantEntry { characteristic, nu, r, shape, provenance: Some(provenance.to_string()) }
    }

    pub fn to_invariants(&self) -> Result<FieldInvariants, RecordViolation> {
        let field = FieldLabel::new(self.characteristic)
            .map_err(|_| RecordViolation::BadCharacteristic(self.characteristic))?;
        FieldInvariants::new(field, self.nu, self.r, self.shape)
            .map_err(|violation| RecordViolation::Invariant { characteristic: self.characteristic, violation })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u64>,
    #[serde(serialize_with = "ser_alexander", deserialize_with = "de_alexander")]
    pub alexander: LaurentPoly,
    pub invariants: Vec<InvariantEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_of: Option<String>,
}

fn ser_alexander<S: Serializer>(p: &LaurentPoly, s: S) -> Result<S::Ok, S::Error> {
    p.to_symmetric().serialize(s)
}

fn de_alexander<'de, D: Deserializer<'de>>(d: D) -> Result<LaurentPoly, D::Error> {
    let coeffs = Vec::<i64>::deserialize(d)?;
    LaurentPoly::from_symmetric(&coeffs).map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbError {
    #[error("unknown knot {0:?}")]
    UnknownKnot(String),
    #[error("{knot} has no data over {field}")]
    UnknownField { knot: String, field: FieldLabel },
    #[error("{knot}: {violation}")]
    Invalid { knot: String, violation: RecordViolation },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}, field `{field}`: {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
}

fn norm_name(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

impl KnotRecord {
    pub fn annotation(&self, key: &str) -> Option<&Value> {
        self.annotations.as_ref()?.get(key)
    }

    pub fn aliases(&self) -> Vec<String> {
        match self.annotation("aliases") {
            Some(Value::Array(v)) => v.iter().filter_map(|x| x.as_str().map(str::to_string)).collect(),
            _ => Vec::new(),
        }
    }

    /// Matches the name or an alias, ignoring case and punctuation, so
    /// `T23` finds `T(2,3)`.
    pub fn matches(&self, name: &str) -> bool {
        let key = norm_name(name);
        norm_name(&self.name) == key || self.aliases().iter().any(|a| norm_name(a) == key)
    }

    pub fn is_field_independent(&self) -> bool {
        self.annotation("field_independent") == Some(&Value::Bool(true))
    }

    pub fn entry_for(&self, field: FieldLabel) -> Option<&InvariantEntry> {
        self.invariants.iter().find(|e| e.characteristic == field.characteristic())
    }

    pub fn invariants_for(&self, field: FieldLabel) -> Result<FieldInvariants, DbError> {
        let entry = match self.entry_for(field) {
            Some(e) => e.clone(),
            None if self.is_field_independent() && !self.invariants.is_empty() => {
                InvariantEntry { characteristic: field.characteristic(), ..self.invariants[0].clone() }
            }
            None => return Err(DbError::UnknownField { knot: self.name.clone(), field }),
        };
        entry.to_invariants().map_err(|violation| DbError::Invalid { knot: self.name.clone(), violation })
    }

    /// Slopes recorded under `su2_abelian_slopes`, with families `b-1/n`,
    /// `b+1/n` expanded for `1 <= n <= n_max`.
    pub fn known_su2_abelian_slopes(&self, n_max: i64) -> Vec<Slope> {
        let Some(Value::Array(items)) = self.annotation("su2_abelian_slopes") else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for item in items.iter().filter_map(Value::as_str) {
            if let Some((base, sign)) = parse_family(item) {
                for n in 1..=n_max {
                    if let Ok(s) = Slope::new(base * n + sign, n) {
                        out.push(s);
                    }
                }
            } else if let Ok(s) = item.parse::<Slope>() {
                out.push(s);
            }
        }
        out
    }
}

fn parse_family(s: &str) -> Option<(i64, i64)> {
    let s = s.strip_suffix("1/n")?;
    let (base, sign) = if let Some(b) = s.strip_suffix('-') { (b, -1) } else { (s.strip_suffix('+')?, 1) };
    Some((base.trim().parse().ok()?, sign))
}

/// A broken constraint on one record, or between mirror records.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum RecordViolation {
    #[error("char {characteristic}: {violation} (needs r = |nu| + 2h, h >= 0)")]
    Invariant { characteristic: u64, violation: InvariantViolation },
    #[error("characteristic {0} is neither 0 nor prime")]
    BadCharacteristic(u64),
    #[error("two entries for characteristic {0}")]
    DuplicateField(u64),
    #[error("genus-one bound: |nu| <= 1 over char {characteristic} != 2, got nu = {nu}")]
    GenusOneBound { characteristic: u64, nu: i64 },
    #[error("Alexander polynomial is not symmetric")]
    AlexanderNotSymmetric,
    #[error("Alexander polynomial has value {0} at t = 1, not +-1")]
    AlexanderNotUnit(i64),
    #[error("Alexander polynomial degree {degree} exceeds genus {genus}")]
    AlexanderDegreeAboveGenus { genus: u64, degree: i64 },
    #[error("mirror {0:?} not in the database")]
    MirrorMissing(String),
    #[error(
        "mirror identity fails against {other} over char {characteristic}: nu must negate, r and shape must agree"
    )]
    MirrorMismatch { other: String, characteristic: u64 },
    #[error("Alexander polynomial differs from its mirror {0}")]
    MirrorAlexander(String),
    #[error("duplicate knot name {0:?}")]
    DuplicateName(String),
}

/// Checks one record in isolation; mirror relations need [`validate_db`].
pub fn validate(record: &KnotRecord) -> Vec<RecordViolation> {
    let mut out = Vec::new();
    let alex = &record.alexander;
    if !alex.is_palindromic() {
        out.push(RecordViolation::AlexanderNotSymmetric);
    }
    if alex.eval_at_one().abs() != 1 {
        out.push(RecordViolation::AlexanderNotUnit(alex.eval_at_one()));
    }
    if let Some(g) = record.genus {
        let degree = alex.high();
        if degree > g as i64 {
            out.push(RecordViolation::AlexanderDegreeAboveGenus { genus: g, degree });
        }
    }
    let mut seen = BTreeSet::new();
    for e in &record.invariants {
        if !seen.insert(e.characteristic) {
            out.push(RecordViolation::DuplicateField(e.characteristic));
        }
        if FieldLabel::new(e.characteristic).is_err() {
            out.push(RecordViolation::BadCharacteristic(e.characteristic));
        }
        for violation in FieldInvariants::violations(e.nu, e.r, e.shape) {
            out.push(RecordViolation::Invariant { characteristic: e.characteristic, violation });
        }
        if record.genus == Some(1) && e.characteristic != 2 && e.nu.abs() > 1 {
            out.push(RecordViolation::GenusOneBound { characteristic: e.characteristic, nu: e.nu });
        }
    }
    out
}

/// [`validate`] on every record plus name uniqueness and mirror pairs.
pub fn validate_db(records: &[KnotRecord]) -> Vec<(String, RecordViolation)> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for rec in records {
        if !names.insert(rec.name.clone()) {
            out.push((rec.name.clone(), RecordViolation::DuplicateName(rec.name.clone())));
        }
        out.extend(validate(rec).into_iter().map(|v| (rec.name.clone(), v)));
        let Some(other_name) = &rec.mirror_of else { continue };
        let Some(other) = records.iter().find(|r| &r.name == other_name) else {
            out.push((rec.name.clone(), RecordViolation::MirrorMissing(other_name.clone())));
            continue;
        };
        if other.alexander != rec.alexander {
            out.push((rec.name.clone(), RecordViolation::MirrorAlexander(other.name.clone())));
        }
        for e in &rec.invariants {
            let Some(o) = other.invariants.iter().find(|o| o.characteristic == e.characteristic) else {
                continue;
            };
            let ok = match (e.to_invariants(), o.to_invariants()) {
                (Ok(a), Ok(b)) => mirror(&a) == b,
                _ => true,
            };
            if !ok {
                out.push((
                    rec.name.clone(),
                    RecordViolation::MirrorMismatch { other: other.name.clone(), characteristic: e.characteristic },
                ));
            }
        }
    }
    out
}

/// Non-binding notes: F2 data expected W-shaped per announced results.
pub fn advisories(record: &KnotRecord) -> Vec<String> {
    record
        .invariants
        .iter()
        .filter(|e| e.characteristic == 2 && e.shape != Shape::W)
        .map(|e| format!("{}: F2 entry has shape {}, W expected", record.name, e.shape))
        .collect()
}

pub fn find<'a>(records: &'a [KnotRecord], name: &str) -> Result<&'a KnotRecord, DbError> {
    records.iter().find(|r| r.matches(name)).ok_or_else(|| DbError::UnknownKnot(name.to_string()))
}

/// Records plus the lints found while loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedDb {
    pub records: Vec<KnotRecord>,
    pub violations: Vec<(String, RecordViolation)>,
}

pub fn parse_db(text: &str) -> Result<LoadedDb, DbError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let records: Vec<KnotRecord> = serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        DbError::Parse { line: inner.line(), column: inner.column(), field, message: inner.to_string() }
    })?;
    let violations = validate_db(&records);
    Ok(LoadedDb { records, violations })
}

pub fn load_db(path: impl AsRef<Path>) -> Result<LoadedDb, DbError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| DbError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_db(&text)
}

pub fn to_json(records: &[KnotRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn save_db(records: &[KnotRecord], path: impl AsRef<Path>) -> Result<(), DbError> {
    let path = path.as_ref();
    std::fs::write(path, to_json(records))
        .map_err(|e| DbError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn alex(coeffs: &[i64]) -> LaurentPoly {
    LaurentPoly::from_symmetric(coeffs).expect("odd-length literal")
}

fn annotations(v: Value) -> Option<Map<String, Value>> {
    match v {
        Value::Object(m) => Some(m),
        _ => None,
    }
}

fn twist_knot(n: i64) -> KnotRecord {
    // K_{2m-1}: (2m-1, -1) over C; K_{2m}: (2m, 0).
    let m = (n + 1) / 2;
    let (coeffs, nu, r, shape, possible) = if n % 2 == 1 {
        (vec![m, -(2 * m - 1), m], -1, n as u64, Shape::V, [(n, -1), (n + 1, 0), (n + 2, 1)])
    } else {
        (vec![-m, 2 * m + 1, -m], 0, n as u64, Shape::Unknown, [(n - 1, 1), (n, 0), (n + 1, -1)])
    };
    let possible: Vec<Value> = possible.iter().map(|(r, nu)| json!({"r": r, "nu": nu})).collect();
    KnotRecord {
        name: format!("K{n}"),
        genus: Some(1),
        alexander: alex(&coeffs),
        invariants: vec![InvariantEntry::new(0, nu, r, shape, "theorem")],
        annotations: annotations(json!({
            "aliases": [format!("twist-{n}")],
            "half_twists": n,
            "char_not_2_possibilities": possible,
        })),
        mirror_of: None,
    }
}

/// The curated records.
pub fn builtin_db() -> Vec<KnotRecord> {
    let mut db = vec![
        KnotRecord {
            name: "unknot".into(),
            genus: Some(0),
            alexander: LaurentPoly::one(),
            invariants: vec![
                InvariantEntry::new(0, 0, 0, Shape::W, "theorem"),
                InvariantEntry::new(2, 0, 0, Shape::W, "theorem"),
            ],
            annotations: annotations(json!({
                "aliases": ["O", "0_1"],
                "field_independent": true,
                "su2_abelian_slopes": ["all"],
            })),
            mirror_of: Some("unknot".into()),
        },
        KnotRecord {
            name: "T(2,3)".into(),
            genus: Some(1),
            alexander: alex(&[1, -1, 1]),
            invariants: vec![
                InvariantEntry::new(0, 1, 1, Shape::V, "theorem"),
                InvariantEntry::new(2, 4, 4, Shape::W, "paper-remark"),
            ],
            annotations: annotations(json!({
                "aliases": ["T23", "right-trefoil", "3_1"],
                "lens_space_surgeries": {"5": "L(5,4)", "6": "L(2,1)#L(3,2)", "7": "L(7,4)"},
                "su2_abelian_slopes": ["6", "6-1/n", "6+1/n"],
            })),
            mirror_of: Some("K1".into()),
        },
    ];
    let mut k1 = twist_knot(1);
    k1.invariants.push(InvariantEntry::new(2, -4, 4, Shape::W, "paper-remark"));
    k1.mirror_of = Some("T(2,3)".into());
    if let Some(m) = k1.annotations.as_mut() {
        m.insert("aliases".into(), json!(["twist-1", "left-trefoil", "T(2,-3)"]));
    }
    db.push(k1);
    let mut k2 = twist_knot(2);
    k2.invariants[0].shape = Shape::W;
    k2.mirror_of = Some("K2".into());
    if let Some(m) = k2.annotations.as_mut() {
        m.insert("aliases".into(), json!(["twist-2", "figure-eight", "fig8", "4_1"]));
    }
    db.push(k2);
    for n in 3..=6 {
        db.push(twist_knot(n));
    }
    db.push(KnotRecord {
        name: "T(2,5)".into(),
        genus: Some(2),
        alexander: alex(&[1, -1, 1, -1, 1]),
        invariants: vec![InvariantEntry::new(0, 3, 3, Shape::V, "theorem")],
        annotations: annotations(json!({"aliases": ["T25", "5_1"], "lspace_knot": true})),
        mirror_of: None,
    });
    db
}

/// `name: char -> (nu, r, shape)` summary lines.
pub fn summary(records: &[KnotRecord]) -> BTreeMap<String, Vec<String>> {
    records
        .iter()
        .map(|r| {
            let rows = r
                .invariants
                .iter()
                .map(|e| format!("char {}: nu={} r={} shape={}", e.characteristic, e.nu, e.r, e.shape))
                .collect();
            (r.name.clone(), rows)
        })
        .collect()
}

impl fmt::Display for KnotRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (Alexander {})", self.name, self.alexander)
    }
}

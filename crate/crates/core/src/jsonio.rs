//! JSON input formats.
//!
//! Space file: `{ "n": 2, "dist": [[0,1],[1,0]], "weight": [1,1],
//! "coords": [[0,0],[1,0]] }`. `coords` is optional; `dist` may be omitted
//! when `coords` is present, in which case Euclidean distances are derived.
//!
//! Function file: `{ "values": [0, 1.5, "inf"] }` with the strings `"inf"`
//! and `"-inf"` as sentinels for the infinities JSON cannot express.
//!
//! Curve file: `{ "domain": [a, b], "pieces": [...] }` where each piece is
//! `{ "type": "step", "start": s, "point": i }` or `{ "type": "polyline",
//! "start": s, "end": e, "times": [...], "vertices": [[...]] }`.
//!
//! Family file: either a JSON array of curve objects or the directive
//! `{ "enumerate": { "max_jumps": J, "depth": D } }` (depth optional).
//!
//! Loaders validate as they build, so a loaded object satisfies the same
//! invariants as one constructed in code. Syntax errors keep serde's
//! line/column diagnostics; shape errors name the offending field.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::curve::{Piece, TestCurve};
use crate::space::{MetricMeasureSpace, ScalarFunction};
use crate::{Error, Result};

/// A number or an `"inf"` / `"-inf"` sentinel.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Sentinel(String),
}

impl Entry {
    fn resolve(self) -> Result<f64> {
        match self {
            Entry::Number(x) => Ok(x),
            Entry::Sentinel(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(Error::Function(format!(
                    "unrecognized sentinel {s:?}; expected \"inf\" or \"-inf\""
                ))),
            },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDto {
    n: usize,
    #[serde(default)]
    dist: Option<Vec<Vec<f64>>>,
    weight: Vec<f64>,
    #[serde(default)]
    coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDto {
    values: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum PieceDto {
    Step {
        start: f64,
        point: usize,
    },
    Polyline {
        start: f64,
        end: f64,
        times: Vec<f64>,
        vertices: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDto {
    domain: (f64, f64),
    pieces: Vec<PieceDto>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnumerateDto {
    max_jumps: usize,
    #[serde(default)]
    depth: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectiveDto {
    enumerate: EnumerateDto,
}

/// A curve family as given in a family file: explicit members or an
/// enumeration directive to be resolved against a space.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Curves(Vec<TestCurve>),
    Enumerate { max_jumps: usize, depth: Option<u32> },
}

pub fn parse_space(text: &str) -> Result<MetricMeasureSpace> {
    let dto: SpaceDto = serde_json::from_str(text)?;
    if dto.weight.len() != dto.n {
        return Err(Error::Space(format!(
            "file declares n = {} but weight has {} entries",
            dto.n,
            dto.weight.len()
        )));
    }
    match (dto.dist, dto.coords) {
        (Some(dist), coords) => {
            if dist.len() != dto.n {
                return Err(Error::Space(format!(
                    "file declares n = {} but dist has {} rows",
                    dto.n,
                    dist.len()
                )));
            }
            MetricMeasureSpace::new(dist, dto.weight, coords)
        }
        (None, Some(coords)) => MetricMeasureSpace::from_coords(coords, dto.weight),
        (None, None) => Err(Error::Space("space file needs dist or coords".into())),
    }
}

pub fn parse_function(text: &str) -> Result<ScalarFunction> {
    let dto: FunctionDto = serde_json::from_str(text)?;
    let values = dto
        .values
        .into_iter()
        .map(Entry::resolve)
        .collect::<Result<Vec<f64>>>()?;
    ScalarFunction::new(values)
}

fn build_curve(dto: CurveDto, s: &MetricMeasureSpace) -> Result<TestCurve> {
    let pieces = dto
        .pieces
        .into_iter()
        .map(|p| match p {
            PieceDto::Step { start, point } => Piece::Step { start, point },
            PieceDto::Polyline { start, end, times, vertices } => {
                Piece::Polyline { start, end, times, vertices }
            }
        })
        .collect();
    TestCurve::new(s, dto.domain, pieces)
}

pub fn parse_curve(text: &str, s: &MetricMeasureSpace) -> Result<TestCurve> {
    build_curve(serde_json::from_str(text)?, s)
}

pub fn parse_family(text: &str, s: &MetricMeasureSpace) -> Result<FamilySpec> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        let dtos: Vec<CurveDto> = serde_json::from_value(value)?;
        let curves = dtos
            .into_iter()
            .map(|dto| build_curve(dto, s))
            .collect::<Result<Vec<TestCurve>>>()?;
        Ok(FamilySpec::Curves(curves))
    } else {
        let dto: DirectiveDto = serde_json::from_value(value)?;
        Ok(FamilySpec::Enumerate {
            max_jumps: dto.enumerate.max_jumps,
            depth: dto.enumerate.depth,
        })
    }
}

pub fn load_space(path: &Path) -> Result<MetricMeasureSpace> {
    parse_space(&fs::read_to_string(path)?)
}

pub fn load_function(path: &Path) -> Result<ScalarFunction> {
    parse_function(&fs::read_to_string(path)?)
}

pub fn load_curve(path: &Path, s: &MetricMeasureSpace) -> Result<TestCurve> {
    parse_curve(&fs::read_to_string(path)?, s)
}

pub fn load_family(path: &Path, s: &MetricMeasureSpace) -> Result<FamilySpec> {
    parse_family(&fs::read_to_string(path)?, s)
}

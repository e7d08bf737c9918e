//! Parsing of variety tokens and monad descriptor files.

use crate::CmdError;
use linmonad::monads::{MonadShape, MonadSpec};
use linmonad::varieties::Variety;
use serde::Deserialize;
use std::path::Path;

/// Variety field of a descriptor file: `{"type":"Pn","n":3}`,
/// `{"type":"Qn","n":4}`, or a fully spelled-out custom variety.
#[derive(Deserialize, Debug)]
#[serde(tag = "type")]
pub enum VarietyInput {
    Pn {
        n: u32,
    },
    Qn {
        n: u32,
    },
    #[serde(rename = "custom")]
    Custom {
        #[serde(default)]
        name: Option<String>,
        n: u32,
        l: i64,
        lambda: i64,
        degree: i64,
        h0_l: i64,
        #[serde(default)]
        vanishing_hypothesis: bool,
    },
}

impl VarietyInput {
    pub fn build(&self) -> Result<Variety, CmdError> {
        let v = match self {
            VarietyInput::Pn { n } => Variety::projective(*n),
            VarietyInput::Qn { n } => Variety::quadric(*n),
            VarietyInput::Custom {
                name,
                n,
                l,
                lambda,
                degree,
                h0_l,
                vanishing_hypothesis,
            } => Variety::custom(
                name.as_deref().unwrap_or("custom"),
                *n,
                *l,
                *lambda,
                *degree,
                *h0_l,
                *vanishing_hypothesis,
            ),
        };
        v.map_err(|e| CmdError::Input(e.to_string()))
    }
}

/// A monad descriptor file.
#[derive(Deserialize, Debug)]
pub struct MonadInput {
    pub shape: MonadShape,
    pub a: u32,
    #[serde(default)]
    pub a2: u32,
    pub b: u32,
    pub c: u32,
    pub variety: VarietyInput,
    #[serde(default)]
    pub locally_free: bool,
}

/// A monad together with the variety it lives on.
#[derive(Clone, Debug)]
pub struct ResolvedSpec {
    pub m: MonadSpec,
    pub v: Variety,
    pub locally_free: bool,
}

/// `Pn:3` or `Qn:4`.
pub fn parse_variety_token(tok: &str) -> Result<Variety, CmdError> {
    let parse = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| CmdError::Input(format!("bad dimension in variety token {tok:?}")))
    };
    let built = match tok.split_once(':') {
        Some(("Pn", n)) => Variety::projective(parse(n)?),
        Some(("Qn", n)) => Variety::quadric(parse(n)?),
        _ => {
            return Err(CmdError::Input(format!(
                "variety token {tok:?} is not Pn:<dim> or Qn:<dim>"
            )))
        }
    };
    built.map_err(|e| CmdError::Input(e.to_string()))
}

pub fn parse_shape(s: &str) -> Result<MonadShape, CmdError> {
    match s {
        "M1" => Ok(MonadShape::M1),
        "M2.1" => Ok(MonadShape::M2_1),
        "M2.2" => Ok(MonadShape::M2_2),
        _ => Err(CmdError::Input(format!(
            "shape {s:?} is not one of M1, M2.1, M2.2"
        ))),
    }
}

pub fn read_monad_file(path: &Path) -> Result<ResolvedSpec, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    let input: MonadInput = serde_json::from_str(&text)
        .map_err(|e| CmdError::Input(format!("bad monad descriptor {}: {e}", path.display())))?;
    let v = input.variety.build()?;
    let m = MonadSpec {
        shape: input.shape,
        a: input.a,
        a2: input.a2,
        b: input.b,
        c: input.c,
    };
    m.validate(&v).map_err(|e| CmdError::Input(e.to_string()))?;
    Ok(ResolvedSpec {
        m,
        v,
        locally_free: input.locally_free,
    })
}

/// `lo:hi`, both ends included.
pub fn parse_window(s: &str) -> Result<(i64, i64), CmdError> {
    let err = || CmdError::Input(format!("window {s:?} is not <lo>:<hi>"));
    let (lo, hi) = s.split_once(':').ok_or_else(err)?;
    let lo = lo.trim().parse::<i64>().map_err(|_| err())?;
    let hi = hi.trim().parse::<i64>().map_err(|_| err())?;
    if lo > hi {
        return Err(CmdError::Input(format!("window {s:?} is empty")));
    }
    Ok((lo, hi))
}

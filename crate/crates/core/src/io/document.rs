//! JSON configuration documents.
//!
//! Rationals are carried as canonical strings (`"1/2"`, `"-3"`) and are kept
//! verbatim in the document so that emitting a parsed document reproduces
//! the input byte for byte.

use serde::{Deserialize, Serialize};

use crate::config::{FlagIdealConfig, NormalConeConfig, Rounding, TestConfiguration, ToricConfig};
use crate::error::{Error, Result};
use crate::pl::{Affine, PlConcave};
use crate::polytope::{Halfspace, Polytope};
use crate::rat::{parse_rat, Rat};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    ToricPl,
    NormalCone,
    FlagIdeal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingDoc {
    Ceil,
    Floor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceDoc {
    pub normal: Vec<String>,
    pub offset: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDoc {
    pub dim: usize,
    pub halfspaces: Vec<HalfspaceDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineDoc {
    pub gradient: Vec<String>,
    pub constant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeDoc>,
    /// Pieces of `g = min_i affines[i]` (`toric_pl`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affines: Option<Vec<AffineDoc>>,
    /// Coordinates of the blown-up vertex (`normal_cone`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    /// Dimension of the projective space (`flag_ideal`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Generator exponent vectors of `J_0 ⊆ J_1 ⊆ ...` (`flag_ideal`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<Vec<Vec<Vec<u32>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounding: Option<RoundingDoc>,
}

/// Parses and validates a document; every error carries a JSON pointer.
pub fn parse_config(text: &str) -> Result<ConfigDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::new()
        } else {
            format!("/{}", path.replace('[', ".").replace(']', "").replace('.', "/"))
        };
        Error::schema(pointer, e.into_inner().to_string())
    })?;
    doc.validate()?;
    Ok(doc)
}

/// Pretty JSON with a trailing newline.
pub fn emit_config(doc: &ConfigDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

fn rat_at(text: &str, pointer: String) -> Result<Rat> {
    parse_rat(text).map_err(|e| Error::schema(pointer, e.to_string()))
}

fn rats_at(texts: &[String], pointer: &str) -> Result<Vec<Rat>> {
    texts.iter().enumerate().map(|(i, t)| rat_at(t, format!("{pointer}/{i}"))).collect()
}

fn require<'a, T>(field: &'a Option<T>, name: &str, kind: &str) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| Error::schema(format!("/{name}"), format!("missing field `{name}` required by kind {kind}")))
}

fn forbid<T>(field: &Option<T>, name: &str, kind: &str) -> Result<()> {
    match field {
        Some(_) => Err(Error::schema(format!("/{name}"), format!("field `{name}` is not allowed for kind {kind}"))),
        None => Ok(()),
    }
}

/// Rewrites a construction error as a schema error at `pointer`.
fn at(pointer: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Schema { .. } => e,
        other => Error::schema(pointer, other.to_string()),
    }
}

impl ConfigDocument {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::ToricPl => "toric_pl",
            Kind::NormalCone => "normal_cone",
            Kind::FlagIdeal => "flag_ideal",
        }
    }

    /// Field presence and rational syntax.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(
                "/schema_version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let kind = self.kind_name();
        match self.kind {
            Kind::ToricPl => {
                require(&self.polytope, "polytope", kind)?;
                require(&self.affines, "affines", kind)?;
                forbid(&self.vertex, "vertex", kind)?;
                forbid(&self.c, "c", kind)?;
                forbid(&self.proj_dim, "proj_dim", kind)?;
                forbid(&self.degree, "degree", kind)?;
                forbid(&self.flag, "flag", kind)?;
            }
            Kind::NormalCone => {
                require(&self.polytope, "polytope", kind)?;
                require(&self.vertex, "vertex", kind)?;
                require(&self.c, "c", kind)?;
                forbid(&self.affines, "affines", kind)?;
                forbid(&self.proj_dim, "proj_dim", kind)?;
                forbid(&self.degree, "degree", kind)?;
                forbid(&self.flag, "flag", kind)?;
                forbid(&self.rounding, "rounding", kind)?;
            }
            Kind::FlagIdeal => {
                require(&self.proj_dim, "proj_dim", kind)?;
                require(&self.degree, "degree", kind)?;
                require(&self.flag, "flag", kind)?;
                require(&self.c, "c", kind)?;
                forbid(&self.polytope, "polytope", kind)?;
                forbid(&self.affines, "affines", kind)?;
                forbid(&self.vertex, "vertex", kind)?;
                forbid(&self.rounding, "rounding", kind)?;
            }
        }
        if let Some(p) = &self.polytope {
            for (i, h) in p.halfspaces.iter().enumerate() {
                if h.normal.len() != p.dim {
                    return Err(Error::schema(
                        format!("/polytope/halfspaces/{i}/normal"),
                        format!("expected {} coordinates, found {}", p.dim, h.normal.len()),
                    ));
                }
                rats_at(&h.normal, &format!("/polytope/halfspaces/{i}/normal"))?;
                rat_at(&h.offset, format!("/polytope/halfspaces/{i}/offset"))?;
            }
        }
        if let Some(affines) = &self.affines {
            if affines.is_empty() {
                return Err(Error::schema("/affines", "at least one affine piece is required"));
            }
            for (i, a) in affines.iter().enumerate() {
                rats_at(&a.gradient, &format!("/affines/{i}/gradient"))?;
                rat_at(&a.constant, format!("/affines/{i}/constant"))?;
            }
        }
        if let Some(v) = &self.vertex {
            rats_at(v, "/vertex")?;
        }
        if let Some(c) = &self.c {
            rat_at(c, "/c".into())?;
        }
        Ok(())
    }

    fn build_polytope(&self) -> Result<Polytope> {
        let p = self.polytope.as_ref().expect("validated");
        let hs = p
            .halfspaces
            .iter()
            .enumerate()
            .map(|(i, h)| {
                Ok(Halfspace::new(
                    rats_at(&h.normal, &format!("/polytope/halfspaces/{i}/normal"))?,
                    rat_at(&h.offset, format!("/polytope/halfspaces/{i}/offset"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Polytope::new(p.dim, hs).map_err(at("/polytope"))
    }

    /// The configuration described by the document.
    pub fn build(&self) -> Result<TestConfiguration> {
        self.validate()?;
        match self.kind {
            Kind::ToricPl => {
                let p = self.build_polytope()?;
                let affines = self
                    .affines
                    .as_ref()
                    .expect("validated")
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let grad = rats_at(&a.gradient, &format!("/affines/{i}/gradient"))?;
                        if grad.len() != p.dim() {
                            return Err(Error::schema(
                                format!("/affines/{i}/gradient"),
                                format!("expected {} coordinates, found {}", p.dim(), grad.len()),
                            ));
                        }
                        Ok(Affine::new(grad, rat_at(&a.constant, format!("/affines/{i}/constant"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let g = PlConcave::new(affines, &p).map_err(at("/affines"))?;
                let rounding = match self.rounding {
                    Some(RoundingDoc::Floor) => Rounding::Floor,
                    _ => Rounding::Ceil,
                };
                Ok(TestConfiguration::Toric(ToricConfig::new(p, g, rounding).map_err(at(""))?))
            }
            Kind::NormalCone => {
                let p = self.build_polytope()?;
                let v = rats_at(self.vertex.as_ref().expect("validated"), "/vertex")?;
                let idx = p
                    .vertices()
                    .iter()
                    .position(|w| *w == v)
                    .ok_or_else(|| Error::schema("/vertex", "not a vertex of the polytope"))?;
                let c = rat_at(self.c.as_ref().expect("validated"), "/c".into())?;
                Ok(TestConfiguration::NormalCone(NormalConeConfig::new(p, idx, c).map_err(at("/c"))?))
            }
            Kind::FlagIdeal => {
                let c = rat_at(self.c.as_ref().expect("validated"), "/c".into())?;
                let cfg = FlagIdealConfig::new(
                    *self.proj_dim.as_ref().expect("validated"),
                    *self.degree.as_ref().expect("validated"),
                    self.flag.clone().expect("validated"),
                    c,
                )
                .map_err(at("/flag"))?;
                Ok(TestConfiguration::Flag(cfg))
            }
        }
    }
}

/// Parses and builds in one step.
pub fn load_config(text: &str) -> Result<(ConfigDocument, TestConfiguration)> {
    let doc = parse_config(text)?;
    let cfg = doc.build()?;
    Ok((doc, cfg))
}

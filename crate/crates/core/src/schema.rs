//! Versioned JSON formats for algebras, gluing data and section families.

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Localization, OrderKind, PresentedAlgebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::latscheme::{restrict_scheme, LatticeScheme, Overlap, OverlapPiece, SchemeCompactOpen};
use crate::sheaf::{BasicOpenSection, CoverData, SectionFamily};
use crate::zarlattice::ZarElement;
use crate::DEFAULT_CAP;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub field: String,
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

/// Matched basic opens `D(left)` on the lower chart and `D(right)` on the
/// higher one. `forward` lists the higher chart's variables as fractions on
/// `D(left)`, `inverse` the lower chart's variables on `D(right)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub left: String,
    pub right: String,
    pub forward: Vec<String>,
    pub inverse: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapSpec {
    pub charts: [usize; 2],
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub schema: u32,
    pub charts: Vec<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overlaps: Vec<OverlapSpec>,
    /// Optional compact open (one `D(...)` per chart) to restrict to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub schema: u32,
    pub algebra: AlgebraSpec,
    pub cover: Vec<String>,
    pub sections: Vec<String>,
}

fn schema_error(path: &str, message: impl ToString) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// Attaches the object path to an error, keeping parse positions visible.
trait At<T> {
    fn at(self, path: &str) -> Result<T>;
}

impl<T> At<T> for Result<T> {
    fn at(self, path: &str) -> Result<T> {
        self.map_err(|e| match e {
            Error::Schema { .. } => e,
            other => schema_error(path, other),
        })
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, version: impl Fn(&T) -> u32) -> Result<T> {
    let spec: T = serde_json::from_str(text).map_err(|e| schema_error("$", e))?;
    let v = version(&spec);
    if v != SCHEMA_VERSION {
        return Err(schema_error("schema", format!("unsupported version {v} (expected {SCHEMA_VERSION})")));
    }
    Ok(spec)
}

impl AlgebraSpec {
    pub fn build(&self, order: OrderKind, path: &str) -> Result<PresentedAlgebra> {
        let field = Field::parse(&self.field).at(&format!("{path}.field"))?;
        let free = PresentedAlgebra::new(field, &self.vars, &[], order).at(&format!("{path}.vars"))?;
        for (k, r) in self.relations.iter().enumerate() {
            free.parse_element(r).at(&format!("{path}.relations[{k}]"))?;
        }
        PresentedAlgebra::new(field, &self.vars, &self.relations, order).at(path)
    }

    pub fn from_algebra(a: &PresentedAlgebra) -> AlgebraSpec {
        AlgebraSpec {
            field: a.field().to_string(),
            vars: a.vars().to_vec(),
            relations: a.relations().iter().map(|r| r.to_string()).collect(),
        }
    }
}

/// Gluing data that failed validation, as opposed to malformed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refuted(pub String);

impl SchemeSpec {
    pub fn from_json(text: &str) -> Result<SchemeSpec> {
        from_json(text, |s: &SchemeSpec| s.schema)
    }

    /// Builds the scheme; `Ok(Err(_))` when the data parses but does not glue.
    pub fn build(&self, order: OrderKind) -> Result<std::result::Result<LatticeScheme, Refuted>> {
        if self.charts.is_empty() {
            return Err(schema_error("charts", "at least one chart is required"));
        }
        let charts = self
            .charts
            .iter()
            .enumerate()
            .map(|(i, c)| c.build(order, &format!("charts[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut overlaps = Vec::new();
        for (k, o) in self.overlaps.iter().enumerate() {
            let [i, j] = o.charts;
            if i >= j || j >= charts.len() {
                return Err(schema_error(
                    &format!("overlaps[{k}].charts"),
                    format!("expected chart indices i < j, found [{i}, {j}]"),
                ));
            }
            let mut pieces = Vec::new();
            for (m, p) in o.pieces.iter().enumerate() {
                let at = format!("overlaps[{k}].pieces[{m}]");
                check_arity(&p.forward, charts[j].arity(), &format!("{at}.forward"))?;
                check_arity(&p.inverse, charts[i].arity(), &format!("{at}.inverse"))?;
                let fw: Vec<&str> = p.forward.iter().map(String::as_str).collect();
                let inv: Vec<&str> = p.inverse.iter().map(String::as_str).collect();
                match OverlapPiece::parse(&charts[i], &p.left, &charts[j], &p.right, &fw, &inv) {
                    Ok(piece) => pieces.push(piece),
                    Err(e @ Error::InvalidMorphism { .. }) => {
                        return Ok(Err(Refuted(format!("{at}: {e}"))));
                    }
                    Err(e) => return Err(schema_error(&at, e)),
                }
            }
            overlaps.push(Overlap {
                left: i,
                right: j,
                pieces,
            });
        }
        let x = match LatticeScheme::glue(charts, overlaps) {
            Ok(x) => x,
            Err(e @ (Error::InvalidGluing(_) | Error::InvalidMorphism { .. })) => {
                return Ok(Err(Refuted(e.to_string())));
            }
            Err(e) => return Err(e),
        };
        let Some(open) = &self.open else {
            return Ok(Ok(x));
        };
        let u = parse_open(&x, open, "open")?;
        Ok(Ok(restrict_scheme(&x, &u)?.scheme))
    }

    /// Gluing data of `x`, with transitions written as fractions.
    pub fn from_scheme(x: &LatticeScheme) -> Result<SchemeSpec> {
        let mut overlaps = Vec::new();
        for o in x.overlaps() {
            let mut pieces = Vec::new();
            for p in &o.pieces {
                let frac = |loc: &Localization, s: &AlgebraElement| -> Result<String> {
                    Ok(BasicOpenSection::new(loc, s.clone())?.fraction_string(DEFAULT_CAP)?)
                };
                pieces.push(PieceSpec {
                    left: p.left.denominator().to_string(),
                    right: p.right.denominator().to_string(),
                    forward: p.to_left.images()[..x.chart(o.right).arity()]
                        .iter()
                        .map(|s| frac(&p.left, s))
                        .collect::<Result<_>>()?,
                    inverse: p.to_right.images()[..x.chart(o.left).arity()]
                        .iter()
                        .map(|s| frac(&p.right, s))
                        .collect::<Result<_>>()?,
                });
            }
            overlaps.push(OverlapSpec {
                charts: [o.left, o.right],
                pieces,
            });
        }
        Ok(SchemeSpec {
            schema: SCHEMA_VERSION,
            charts: x.charts().iter().map(AlgebraSpec::from_algebra).collect(),
            overlaps,
            open: None,
        })
    }
}

fn check_arity(list: &[String], expected: usize, path: &str) -> Result<()> {
    if list.len() != expected {
        return Err(schema_error(path, format!("expected {expected} images, found {}", list.len())));
    }
    Ok(())
}

/// One `D(...)` per chart, joined into a compact open of `x`.
pub fn parse_open(x: &LatticeScheme, comps: &[String], path: &str) -> Result<SchemeCompactOpen> {
    if comps.len() != x.charts().len() {
        return Err(schema_error(
            path,
            format!("expected {} components, found {}", x.charts().len(), comps.len()),
        ));
    }
    let parsed = comps
        .iter()
        .enumerate()
        .map(|(i, c)| ZarElement::parse(x.chart(i), c).at(&format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    x.compact_open(parsed)
}

impl FamilySpec {
    pub fn from_json(text: &str) -> Result<FamilySpec> {
        from_json(text, |s: &FamilySpec| s.schema)
    }

    /// The cover must generate the unit ideal; a failure there is a refutation.
    pub fn build(&self, order: OrderKind) -> Result<std::result::Result<SectionFamily, Refuted>> {
        let a = self.algebra.build(order, "algebra")?;
        if self.cover.len() != self.sections.len() {
            return Err(schema_error(
                "sections",
                format!(
                    "expected one section per cover piece ({}), found {}",
                    self.cover.len(),
                    self.sections.len()
                ),
            ));
        }
        let pieces = self
            .cover
            .iter()
            .enumerate()
            .map(|(k, t)| a.parse_element(t).at(&format!("cover[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let cover = match CoverData::new(&a, pieces.clone()) {
            Ok(c) => c,
            Err(e @ Error::NotACover(_)) => return Ok(Err(Refuted(e.to_string()))),
            Err(e) => return Err(e),
        };
        let sections = self
            .sections
            .iter()
            .zip(&pieces)
            .enumerate()
            .map(|(k, (t, f))| BasicOpenSection::parse(f, t).at(&format!("sections[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ok(SectionFamily::new(cover, sections)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latscheme::projective_line;

    const P1: &str = r#"{"schema": 1,
        "charts": [{"field": "QQ", "vars": ["t"]}, {"field": "QQ", "vars": ["s"]}],
        "overlaps": [{"charts": [0, 1], "pieces": [{"left": "t", "right": "s", "forward": ["1/t"], "inverse": ["1/s"]}]}]}"#;

    #[test]
    fn projective_line_roundtrips() {
        let x = SchemeSpec::from_json(P1).unwrap().build(OrderKind::Grevlex).unwrap().unwrap();
        assert_eq!(x.charts().len(), 2);
        let spec = SchemeSpec::from_scheme(&projective_line(Field::Rationals).unwrap()).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let y = SchemeSpec::from_json(&text).unwrap().build(OrderKind::Grevlex).unwrap().unwrap();
        assert_eq!(y.overlaps()[0].pieces.len(), 1);
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let extra = P1.replacen("\"schema\": 1,", "\"schema\": 1, \"note\": 0,", 1);
        assert!(matches!(SchemeSpec::from_json(&extra), Err(Error::Schema { .. })));
        let v2 = P1.replacen("\"schema\": 1", "\"schema\": 2", 1);
        assert!(matches!(SchemeSpec::from_json(&v2), Err(Error::Schema { path, .. }) if path == "schema"));
    }

    #[test]
    fn non_inverse_transition_is_refuted() {
        let broken = P1.replacen("[\"1/t\"]", "[\"t\"]", 1);
        let built = SchemeSpec::from_json(&broken).unwrap().build(OrderKind::Grevlex).unwrap();
        assert!(built.is_err());
    }

    #[test]
    fn errors_carry_object_paths() {
        let bad = P1.replacen("\"1/s\"", "\"1/\"", 1);
        let err = SchemeSpec::from_json(&bad).unwrap().build(OrderKind::Grevlex).unwrap_err();
        assert!(matches!(err, Error::Schema { path, .. } if path == "overlaps[0].pieces[0]"));
    }

    #[test]
    fn family_with_non_cover_is_refuted() {
        let text = r#"{"schema": 1, "algebra": {"field": "QQ", "vars": ["x"]}, "cover": ["x"], "sections": ["1"]}"#;
        let built = FamilySpec::from_json(text).unwrap().build(OrderKind::Grevlex).unwrap();
        assert!(built.is_err());
    }
}

//! Wire formats: JSON schemas for scalars, graded elements, tangles and
//! verification reports, with conversions to and from the core types.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use grstar_core::ncpoly::{Context, GrElement, Word};
use grstar_core::scalars::{DeltaContext, FieldScalar, Rational};
use grstar_core::tangle::{ep, Disk, Tangle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for FormatError {}

fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    Rational::from_str(s).map_err(|e| FormatError(format!("bad rational '{s}': {e}")))
}

/// {"q": "p/q", "sqrt_delta": "p/q", "sqrt_d2m1": "p/q", "sqrt_prod": "p/q"}
/// for the element q + sqrt_delta·√δ + sqrt_d2m1·√(δ²−1) + sqrt_prod·√δ√(δ²−1).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldScalarJson {
    pub q: String,
    pub sqrt_delta: String,
    pub sqrt_d2m1: String,
    pub sqrt_prod: String,
}

impl FieldScalarJson {
    pub fn from_scalar(x: &FieldScalar) -> Self {
        let c = x.coeffs();
        FieldScalarJson {
            q: c[0].to_string(),
            sqrt_delta: c[1].to_string(),
            sqrt_d2m1: c[2].to_string(),
            sqrt_prod: c[3].to_string(),
        }
    }

    pub fn to_scalar(&self, ctx: &grstar_core::scalars::Ctx) -> Result<FieldScalar, FormatError> {
        Ok(FieldScalar::new(
            ctx,
            [
                parse_rational(&self.q)?,
                parse_rational(&self.sqrt_delta)?,
                parse_rational(&self.sqrt_d2m1)?,
                parse_rational(&self.sqrt_prod)?,
            ],
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    /// 1-based letter indices; empty for the unit word.
    pub word: Vec<u8>,
    pub coeff: FieldScalarJson,
}

/// {"l": int, "delta": "p/q", "terms": [{"word": [...], "coeff": {...}}]}
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GrElementJson {
    pub l: u8,
    pub delta: String,
    pub terms: Vec<TermJson>,
}

impl GrElementJson {
    pub fn from_element(e: &GrElement) -> Self {
        GrElementJson {
            l: e.ctx().letters(),
            delta: e.ctx().scalars().delta().to_string(),
            terms: e
                .terms()
                .map(|(w, c)| TermJson {
                    word: w.letters().to_vec(),
                    coeff: FieldScalarJson::from_scalar(c),
                })
                .collect(),
        }
    }

    pub fn context(&self) -> Result<Context, FormatError> {
        let delta = parse_rational(&self.delta)?;
        let sc = DeltaContext::new(delta).map_err(|e| FormatError(e.to_string()))?;
        Ok(Context::with_delta(self.l, sc))
    }

    pub fn to_element(&self) -> Result<GrElement, FormatError> {
        let ctx = self.context()?;
        let mut out = GrElement::zero(&ctx);
        for t in &self.terms {
            for &c in &t.word {
                if c == 0 || c > self.l {
                    return Err(FormatError(format!("letter {c} out of range (l = {})", self.l)));
                }
            }
            let coeff = t.coeff.to_scalar(ctx.scalars())?;
            out.add_term(Word::new(t.word.clone()), coeff);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DiskJson {
    pub points: usize,
    pub star: usize,
}

/// Endpoints are [disk, point] with disk 0 the outer circle.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TangleJson {
    pub outer: DiskJson,
    pub inner: Vec<DiskJson>,
    pub strands: Vec<[[usize; 2]; 2]>,
    #[serde(default)]
    pub loops: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
}

impl TangleJson {
    pub fn from_tangle(t: &Tangle) -> Self {
        TangleJson {
            outer: DiskJson {
                points: t.outer.points,
                star: t.outer.star,
            },
            inner: t
                .inner
                .iter()
                .map(|d| DiskJson {
                    points: d.points,
                    star: d.star,
                })
                .collect(),
            strands: t
                .strands
                .iter()
                .map(|&(a, b)| [[a.disk, a.point], [b.disk, b.point]])
                .collect(),
            loops: t.loops,
            rotation: t.rotation.clone(),
        }
    }

    pub fn to_tangle(&self) -> Tangle {
        let mut t = Tangle::new(
            Disk {
                points: self.outer.points,
                star: self.outer.star,
            },
            self.inner
                .iter()
                .map(|d| Disk {
                    points: d.points,
                    star: d.star,
                })
                .collect(),
            self.strands
                .iter()
                .map(|s| (ep(s[0][0], s[0][1]), ep(s[1][0], s[1][1])))
                .collect(),
            self.loops,
        );
        t.rotation = self.rotation.clone();
        t
    }
}

/// Input file for `tangle eval`: the tangle plus one element per inner disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangleJobJson {
    pub tangle: TangleJson,
    #[serde(default)]
    pub inputs: Vec<GrElementJson>,
}

/// One verification result row: {check, parameters, pass, witness}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckJson {
    pub check: String,
    pub parameters: serde_json::Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckJson {
    pub fn new(check: &str, parameters: serde_json::Value, pass: bool, witness: Option<String>) -> Self {
        CheckJson {
            check: check.to_string(),
            parameters,
            pass,
            witness,
        }
    }
}

/// CSV escaping for one field.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use grstar_core::sample::{random_element, SplitMix64};
    use grstar_core::tangle::star_tangle;

    #[test]
    fn element_round_trip() {
        let ctx = Context::new(2);
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let e = random_element(&mut rng, &ctx, 4, 5);
            let json = GrElementJson::from_element(&e);
            let text = serde_json::to_string(&json).unwrap();
            let back: GrElementJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_element().unwrap(), e);
        }
    }

    #[test]
    fn scalar_json_shape() {
        let ctx = DeltaContext::from_letters(2);
        let x = FieldScalar::sqrt_delta_minus_inv(&ctx);
        let j = FieldScalarJson::from_scalar(&x);
        assert_eq!(j.q, "0");
        assert_eq!(j.sqrt_prod, "1/2");
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"sqrt_prod\":\"1/2\""));
        assert_eq!(j.to_scalar(&ctx).unwrap(), x);
    }

    #[test]
    fn tangle_round_trip() {
        let t = star_tangle(3, 2, 1);
        let j = TangleJson::from_tangle(&t);
        let text = serde_json::to_string(&j).unwrap();
        let back: TangleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tangle(), t);
    }

    #[test]
    fn rejects_bad_letters() {
        let j = GrElementJson {
            l: 2,
            delta: "2".into(),
            terms: vec![TermJson {
                word: vec![3],
                coeff: FieldScalarJson {
                    q: "1".into(),
                    sqrt_delta: "0".into(),
                    sqrt_d2m1: "0".into(),
                    sqrt_prod: "0".into(),
                },
            }],
        };
        assert!(j.to_element().is_err());
        let j2 = GrElementJson {
            l: 2,
            delta: "not-a-number".into(),
            terms: vec![],
        };
        assert!(j2.to_element().is_err());
    }
}

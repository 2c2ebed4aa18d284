//! JSON input schemas and serialisation helpers shared by the CLI and the
//! verification drivers.

use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};

use crate::complexes::{CochainComplex, TwistedFamily};
use crate::covers::{LambdaComplex, MappingTorusModel};
use crate::error::{Error, Result};
use crate::exactalg::Matrix;
use crate::field::Ring;
use crate::specflow::OperatorFamily;
use crate::{ExactComplex, ExactFamily, ExactMatrix, LaurentMatrix, Poly};

/// Version tag written into every report.
pub const SCHEMA: &str = "perindex/1";

pub fn ratio_str<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Empty matrices lose their shape in nested-row form, so they are rebuilt
/// from the declared dimensions.
fn reshape<T: Ring>(m: Matrix<T>, rows: usize, cols: usize) -> Matrix<T> {
    if m.rows() * m.cols() == 0 && rows * cols == 0 {
        Matrix::zeros(rows, cols)
    } else {
        m
    }
}

fn shaped<T: Ring>(dims: &[usize], ms: Vec<Matrix<T>>) -> Vec<Matrix<T>> {
    ms.into_iter()
        .enumerate()
        .map(|(j, m)| match (dims.get(j), dims.get(j + 1)) {
            (Some(&c), Some(&r)) => reshape(m, r, c),
            _ => m,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dims: Vec<usize>,
    pub differentials: Vec<ExactMatrix>,
}

impl ComplexJson {
    pub fn build(self) -> Result<ExactComplex> {
        let d = shaped(&self.dims, self.differentials);
        CochainComplex::new(self.dims, d)
    }

    pub fn from_complex(c: &ExactComplex) -> Self {
        ComplexJson { dims: c.dims().to_vec(), differentials: c.differentials().to_vec() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dims: Vec<usize>,
    pub differentials: Vec<ExactMatrix>,
    pub symbols: Vec<ExactMatrix>,
}

impl FamilyJson {
    pub fn build(self) -> Result<ExactFamily> {
        let d = shaped(&self.dims, self.differentials);
        let s = shaped(&self.dims, self.symbols);
        TwistedFamily::new(CochainComplex::new(self.dims, d)?, s)
    }

    pub fn from_family(f: &ExactFamily) -> Self {
        FamilyJson {
            dims: f.dims().to_vec(),
            differentials: f.complex().differentials().to_vec(),
            symbols: f.symbols().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MappingTorusJson {
    pub sigma: ComplexJson,
    pub deck: Vec<ExactMatrix>,
}

impl MappingTorusJson {
    pub fn build(self) -> Result<MappingTorusModel> {
        let sigma = self.sigma.build()?;
        let deck = self
            .deck
            .into_iter()
            .enumerate()
            .map(|(j, m)| {
                let d = sigma.dims().get(j).copied().unwrap_or(0);
                reshape(m, d, d)
            })
            .collect();
        MappingTorusModel::new(sigma, deck)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaJson {
    pub dims: Vec<usize>,
    pub differentials: Vec<LaurentMatrix>,
}

impl LambdaJson {
    pub fn build(self) -> Result<LambdaComplex> {
        let d = shaped(&self.dims, self.differentials);
        LambdaComplex::new(self.dims, d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleJson {
    pub t: String,
    #[serde(rename = "Q")]
    pub q: Matrix<Poly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorFamilyJson {
    pub samples: Vec<SampleJson>,
}

impl OperatorFamilyJson {
    pub fn build(self) -> Result<OperatorFamily> {
        let samples = self
            .samples
            .into_iter()
            .map(|s| Ok((crate::knotcalc::parse_rational(&s.t)?, s.q)))
            .collect::<Result<Vec<_>>>()?;
        OperatorFamily::new(samples)
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_roundtrip() {
        let text = r#"{"dims":[2],"differentials":[],"symbols":[]}"#;
        let f: FamilyJson = parse(text).unwrap();
        let fam = f.build().unwrap();
        assert_eq!(fam.dims(), &[2]);
        let text = r#"{"dims":[0,1],"differentials":[[]],"symbols":[[]]}"#;
        let fam = parse::<FamilyJson>(text).unwrap().build().unwrap();
        assert_eq!(fam.complex().differentials()[0].shape(), (1, 0));
        let back = serde_json::to_string(&FamilyJson::from_family(&fam)).unwrap();
        assert_eq!(back, r#"{"dims":[0,1],"differentials":[[[]]],"symbols":[[[]]]}"#);
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(parse::<FamilyJson>("{"), Err(Error::Parse(_))));
        assert!(parse::<FamilyJson>(r#"{"dims":[1],"differentials":[],"symbols":[],"x":["1 /2"]}"#).is_ok());
        assert!(matches!(parse::<ComplexJson>(r#"{"dims":[1,1],"differentials":[[["1 /2"]]]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn seifert_json() {
        let v: crate::knotcalc::SeifertMatrix = parse(r#"{"V":[[-1,1],[0,-1]]}"#).unwrap();
        assert_eq!(v, crate::knotcalc::SeifertMatrix::trefoil());
        assert!(parse::<crate::knotcalc::SeifertMatrix>(r#"{"V":[[1,0],[0,1]]}"#).is_err());
    }
}

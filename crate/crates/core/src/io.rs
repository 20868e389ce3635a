//! JSON forms of triples and contour reports.

use serde::{Deserialize, Serialize};
use weyl_numerics::matrix_json::{from_rows, to_rows, Rows};
use weyl_numerics::ContourSpec;

use crate::error::CoreError;
use crate::triple::{make_triple, FiniteTriple};
use crate::Result;

pub const TRIPLE_SCHEMA: &str = "triple-v1";

/// On-disk triple. `t` is the interior action (`m × m`); the boundary
/// columns of `Ã*` and the adjoint action are derived on load. A stored
/// `ttilde` (`m × (m+k)`) is checked against the derived one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleFile {
    pub schema: String,
    #[serde(default)]
    pub id: String,
    pub t: Rows,
    pub g1: Rows,
    pub g2: Rows,
    pub gt1: Rows,
    pub gt2: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ttilde: Option<Rows>,
}

impl TripleFile {
    pub fn from_triple(tr: &FiniteTriple, include_ttilde: bool) -> Self {
        Self {
            schema: TRIPLE_SCHEMA.to_string(),
            id: tr.id.clone(),
            t: to_rows(&tr.t_interior()),
            g1: to_rows(tr.g1()),
            g2: to_rows(tr.g2()),
            gt1: to_rows(tr.gt1()),
            gt2: to_rows(tr.gt2()),
            ttilde: include_ttilde.then(|| to_rows(tr.ttilde())),
        }
    }

    pub fn to_triple(&self) -> Result<FiniteTriple> {
        if self.schema != TRIPLE_SCHEMA {
            return Err(CoreError::Schema(self.schema.clone()));
        }
        let m = self.t.len();
        let h = self.g1.len();
        let k = self.g2.len();
        let t = from_rows(&self.t, m)?;
        let g1 = from_rows(&self.g1, m + h)?;
        let g2 = from_rows(&self.g2, m + h)?;
        let gt1 = from_rows(&self.gt1, m + k)?;
        let gt2 = from_rows(&self.gt2, m + k)?;
        if gt1.nrows() != k || gt2.nrows() != h {
            return Err(CoreError::DimensionMismatch(format!(
                "Γ̃1 needs {k} rows and Γ̃2 needs {h}, got {} and {}",
                gt1.nrows(),
                gt2.nrows()
            )));
        }
        let tr = make_triple(&t, &g1, &g2, &gt1, &gt2)?.with_id(self.id.clone());
        if let Some(rows) = &self.ttilde {
            tr.verify_ttilde(&from_rows(rows, m + k)?)?;
        }
        Ok(tr)
    }
}

pub fn parse_triple(text: &str) -> Result<FiniteTriple> {
    let file: TripleFile = serde_json::from_str(text).map_err(|e| CoreError::Schema(e.to_string()))?;
    file.to_triple()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDims {
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "Sadj")]
    pub s_adjoint: usize,
    #[serde(rename = "Tadj")]
    pub t_adjoint: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    pub triple_id: String,
    pub contour: ContourSpec,
    pub residual_bordered: f64,
    pub residual_full: f64,
    pub dims: SpaceDims,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_triple;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use weyl_numerics::c64;

    #[test]
    fn triple_survives_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tr = random_triple(&mut rng, 4, 2, 1).unwrap().with_id("r4");
        let text = serde_json::to_string(&TripleFile::from_triple(&tr, true)).unwrap();
        assert_eq!(parse_triple(&text).unwrap(), tr);
    }

    #[test]
    fn wrong_schema_and_shapes_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tr = random_triple(&mut rng, 3, 1, 1).unwrap();
        let mut file = TripleFile::from_triple(&tr, false);
        file.schema = "triple-v0".into();
        assert!(matches!(file.to_triple(), Err(CoreError::Schema(_))));

        let mut file = TripleFile::from_triple(&tr, false);
        file.g1[0].pop();
        assert!(file.to_triple().is_err());

        let mut file = TripleFile::from_triple(&tr, true);
        file.ttilde.as_mut().unwrap()[0][0][0] += 1.0;
        assert!(matches!(file.to_triple(), Err(CoreError::AdjointMismatch(_))));

        assert!(parse_triple("{\"schema\": \"triple-v1\"}").is_err());
    }

    #[test]
    fn report_uses_short_space_names() {
        let r = ContourReport {
            triple_id: "x".into(),
            contour: ContourSpec::new(c64(0.0, 0.0), 1.0, 16).unwrap(),
            residual_bordered: 0.0,
            residual_full: 1.0,
            dims: SpaceDims { s: 1, t: 1, s_adjoint: 1, t_adjoint: 1 },
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["dims"]["Sadj"], 1);
    }
}

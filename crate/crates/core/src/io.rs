//! Matrix text files and the JSON form of a decomposition.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bvn::{Decomposition, ResidualNorm, Term, Variant};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Permutation};

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, m.to_string()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Wire form emitted by `decompose` and consumed by `resources`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub variant: Variant,
    pub eps: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub weights: Vec<f64>,
    pub permutations: Vec<Vec<usize>>,
    pub residual_l1: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    /// Norm `residual_l1` is measured in.
    #[serde(default)]
    pub norm: ResidualNorm,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        Self {
            variant: d.variant,
            eps: d.epsilon,
            k: d.len(),
            weights: d.weights(),
            permutations: d.permutations().map(|p| p.map().to_vec()).collect(),
            residual_l1: d.residual_l1,
            theta: d.theta,
            norm: d.norm,
        }
    }
}

impl TryFrom<DecompositionJson> for Decomposition {
    type Error = Error;

    /// The wire form carries only normalized weights; they double as the
    /// raw weights and the step trace is left empty.
    fn try_from(j: DecompositionJson) -> Result<Self> {
        if j.weights.len() != j.permutations.len() || j.k != j.weights.len() {
            return Err(Error::Parse(format!(
                "K = {} but {} weights and {} permutations",
                j.k,
                j.weights.len(),
                j.permutations.len()
            )));
        }
        let dim = j.permutations.first().map(Vec::len);
        let mut terms = Vec::with_capacity(j.k);
        for (w, p) in j.weights.iter().zip(j.permutations) {
            if Some(p.len()) != dim {
                return Err(Error::Parse("permutations of different lengths".into()));
            }
            if !(*w > 0.0) {
                return Err(Error::Parse(format!("non-positive weight {w}")));
            }
            terms.push(Term {
                weight: *w,
                perm: Permutation::new(p)?,
            });
        }
        Ok(Decomposition {
            terms,
            raw_weights: j.weights,
            residual_l1: j.residual_l1,
            norm: j.norm,
            variant: j.variant,
            epsilon: j.eps,
            theta: j.theta,
            steps: Vec::new(),
        })
    }
}

pub fn read_decomposition(path: impl AsRef<Path>) -> Result<Decomposition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let json: DecompositionJson = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    json.try_into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvn;

    #[test]
    fn json_shape() {
        let d = bvn::decompose_original(&Matrix::uniform(2), 1e-6).unwrap();
        let v = serde_json::to_value(DecompositionJson::from(&d)).unwrap();
        assert_eq!(v["variant"], "original");
        assert_eq!(v["K"], 2);
        assert_eq!(v["weights"], serde_json::json!([0.5, 0.5]));
        assert_eq!(v["permutations"], serde_json::json!([[0, 1], [1, 0]]));
        assert!(v.get("theta").is_none());

        let t = bvn::decompose_threshold(&Matrix::uniform(2), 1e-6, 0.1).unwrap();
        let v = serde_json::to_value(DecompositionJson::from(&t)).unwrap();
        assert_eq!(v["theta"], 0.1);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let d = bvn::decompose_original(&Matrix::uniform(2), 1e-6).unwrap();
        let back: Decomposition = DecompositionJson::from(&d).try_into().unwrap();
        assert_eq!(back.terms, d.terms);

        let mut bad = DecompositionJson::from(&d);
        bad.permutations[1] = vec![0, 0];
        assert!(Decomposition::try_from(bad).is_err());
        let mut bad = DecompositionJson::from(&d);
        bad.k = 3;
        assert!(Decomposition::try_from(bad).is_err());
    }

    #[test]
    fn matrix_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        let m = Matrix::from_rows(&[[0.25, 0.75], [0.75, 0.25]]).unwrap();
        write_matrix(&path, &m).unwrap();
        assert_eq!(read_matrix(&path).unwrap(), m);
        let err = read_matrix(dir.path().join("missing.txt")).unwrap_err();
        assert!(err.to_string().contains("missing.txt"));
    }
}

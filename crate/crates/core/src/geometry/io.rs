//! Polytope file format:
//!
//! ```json
//! {"dim": 2, "halfspaces": [[a1, a2, b], ...], "vertices": [[x1, x2], ...]}
//! ```
//!
//! Either key may be omitted. When both are present the body is built from
//! the halfspaces and the listed vertices must match the computed ones.

use serde::{Deserialize, Serialize};

use super::linalg::dist;
use super::{ConvexBody, GeometryError, Halfspace, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl PolytopeFile {
    pub fn from_body(body: &ConvexBody) -> Self {
        Self {
            dim: body.dim(),
            halfspaces: Some(
                body.halfspaces()
                    .iter()
                    .map(|h| {
                        let mut row = h.normal.clone();
                        row.push(h.offset);
                        row
                    })
                    .collect(),
            ),
            vertices: Some(body.vertices().to_vec()),
        }
    }

    pub fn to_body(&self) -> Result<ConvexBody> {
        let dim = self.dim;
        match (&self.halfspaces, &self.vertices) {
            (None, None) => Err(GeometryError::InvalidInput(
                "polytope file needs \"halfspaces\" or \"vertices\"".into(),
            )),
            (None, Some(v)) => ConvexBody::from_vertices(dim, v.clone()),
            (Some(rows), vertices) => {
                let hs = rows
                    .iter()
                    .map(|r| {
                        if r.len() != dim + 1 {
                            return Err(GeometryError::InvalidInput(format!(
                                "halfspace row of length {} in dimension {dim}",
                                r.len()
                            )));
                        }
                        Ok(Halfspace::new(r[..dim].to_vec(), r[dim]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let body = ConvexBody::from_halfspaces(dim, hs)?;
                if let Some(listed) = vertices {
                    let eps = 1e3 * body.eps_geom();
                    let covered = body
                        .vertices()
                        .iter()
                        .all(|v| listed.iter().any(|w| w.len() == dim && dist(v, w) <= eps));
                    let extreme = listed
                        .iter()
                        .all(|w| body.vertices().iter().any(|v| w.len() == dim && dist(v, w) <= eps));
                    if !(covered && extreme) {
                        return Err(GeometryError::InvalidInput(
                            "listed vertices disagree with the halfspaces".into(),
                        ));
                    }
                }
                Ok(body)
            }
        }
    }
}

pub fn parse_polytope(json: &str) -> Result<ConvexBody> {
    let file: PolytopeFile = serde_json::from_str(json)
        .map_err(|e| GeometryError::InvalidInput(format!("malformed polytope JSON: {e}")))?;
    file.to_body()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_from_either_key() {
        let a = parse_polytope(r#"{"dim":2,"halfspaces":[[1,0,1],[-1,0,0],[0,1,1],[0,-1,0]]}"#)
            .unwrap();
        let b = parse_polytope(r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert!((a.volume() - b.volume()).abs() < 1e-15);
        let both = serde_json::to_string(&PolytopeFile::from_body(&a)).unwrap();
        assert!((parse_polytope(&both).unwrap().perimeter() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn inconsistent_keys_are_rejected() {
        let err = parse_polytope(
            r#"{"dim":2,"halfspaces":[[1,0,1],[-1,0,0],[0,1,1],[0,-1,0]],"vertices":[[0,0],[2,0],[2,2],[0,2]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::InvalidInput(_)));
    }

    #[test]
    fn unbounded_file() {
        let err = parse_polytope(r#"{"dim":2,"halfspaces":[[1,0,1],[0,1,1]]}"#).unwrap_err();
        assert_eq!(err, GeometryError::Unbounded);
    }
}

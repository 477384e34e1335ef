//! On-disk state format: JSON with explicit real and imaginary parts,
//! so golden files stay diff-able and byte-stable.

use num_complex::Complex64;
use qportrait::linalg::CMatrix;
use qportrait::{DensityMatrix, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Optional factor structure carried next to a state: either a
/// bipartite split or a qubit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayoutSpec {
    Bipartite { n_l: usize, n_s: usize },
    Qubits(usize),
}

impl LayoutSpec {
    pub fn dim(self) -> usize {
        match self {
            LayoutSpec::Bipartite { n_l, n_s } => n_l * n_s,
            LayoutSpec::Qubits(p) => 1usize << p,
        }
    }

    pub fn render(self) -> String {
        match self {
            LayoutSpec::Bipartite { n_l, n_s } => format!("{n_l}x{n_s}"),
            LayoutSpec::Qubits(p) => format!("p={p}"),
        }
    }
}

/// Parse `<NL>x<NS>` or `p=<K>`.
pub fn parse_layout(text: &str, source_name: &str) -> Result<LayoutSpec> {
    if let Some(qubits) = text.strip_prefix("p=") {
        let p = qubits
            .parse::<usize>()
            .map_err(|_| Error::parse(source_name, None, format!("bad qubit count `{qubits}`")))?;
        if p == 0 {
            return Err(Error::parse(source_name, None, "qubit count must be positive"));
        }
        return Ok(LayoutSpec::Qubits(p));
    }
    if let Some((l, s)) = text.split_once('x') {
        let n_l = l
            .parse::<usize>()
            .map_err(|_| Error::parse(source_name, None, format!("bad factor dimension `{l}`")))?;
        let n_s = s
            .parse::<usize>()
            .map_err(|_| Error::parse(source_name, None, format!("bad factor dimension `{s}`")))?;
        return Ok(LayoutSpec::Bipartite { n_l, n_s });
    }
    Err(Error::parse(
        source_name,
        None,
        format!("bad layout `{text}` (expected <NL>x<NS> or p=<K>)"),
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
}

impl StateFile {
    pub fn load(path: &Path) -> Result<StateFile> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parse(name.clone(), None, format!("cannot read file: {e}")))?;
        let file: StateFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(name.clone(), Some(e.line()), e.to_string()))?;
        file.check_shape(&name)?;
        Ok(file)
    }

    fn check_shape(&self, name: &str) -> Result<()> {
        for (field, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != self.dim {
                return Err(Error::parse(
                    name,
                    None,
                    format!("{field} has {} rows, dim says {}", rows.len(), self.dim),
                ));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != self.dim {
                    return Err(Error::parse(
                        name,
                        None,
                        format!("{field} row {i} has {} entries, dim says {}", row.len(), self.dim),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Raw matrix, shape-checked only.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |i, j| Complex64::new(self.re[i][j], self.im[i][j]))
    }

    /// Validated density matrix.
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix())
    }

    pub fn layout_spec(&self, source_name: &str) -> Result<Option<LayoutSpec>> {
        match &self.layout {
            Some(text) => {
                let spec = parse_layout(text, source_name)?;
                if spec.dim() != self.dim {
                    return Err(Error::parse(
                        source_name,
                        None,
                        format!("layout `{text}` implies dim {}, file says {}", spec.dim(), self.dim),
                    ));
                }
                Ok(Some(spec))
            }
            None => Ok(None),
        }
    }

    pub fn from_matrix(m: &CMatrix, layout: Option<LayoutSpec>) -> StateFile {
        let dim = m.rows();
        StateFile {
            dim,
            re: (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].im).collect()).collect(),
            layout: layout.map(LayoutSpec::render),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("state files always serialize");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_parse_both_forms() {
        assert_eq!(
            parse_layout("2x3", "t").unwrap(),
            LayoutSpec::Bipartite { n_l: 2, n_s: 3 }
        );
        assert_eq!(parse_layout("p=3", "t").unwrap(), LayoutSpec::Qubits(3));
        assert_eq!(parse_layout("p=3", "t").unwrap().dim(), 8);
        assert!(parse_layout("2+3", "t").is_err());
        assert!(parse_layout("p=0", "t").is_err());
        assert!(parse_layout("axb", "t").is_err());
    }

    #[test]
    fn state_files_round_trip() {
        let m = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new((i + 2 * j) as f64, i as f64 - j as f64)
        });
        let file = StateFile::from_matrix(&m, Some(LayoutSpec::Qubits(1)));
        let parsed: StateFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(parsed.matrix().max_abs_diff(&m), 0.0);
        assert_eq!(parsed.layout.as_deref(), Some("p=1"));
    }

    #[test]
    fn shape_mismatches_are_named() {
        let text = r#"{"dim": 2, "re": [[1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        let file: StateFile = serde_json::from_str(text).unwrap();
        let err = file.check_shape("bad.json").unwrap_err();
        assert!(err.to_string().contains("re has 1 rows"));
    }

    #[test]
    fn inconsistent_layout_is_rejected() {
        let file = StateFile {
            dim: 4,
            re: vec![vec![0.25, 0.0, 0.0, 0.0]; 4],
            im: vec![vec![0.0; 4]; 4],
            layout: Some("p=3".to_string()),
        };
        assert!(file.layout_spec("t").is_err());
    }
}

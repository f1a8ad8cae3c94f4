use nalgebra::DMatrix;

use super::{CompositeError, NetworkDescription};

/// Linear map from nodal injections to line flows on one island:
/// `M = D A (A' D A + 1/|N|)^-1`, with `A` the directed line-node incidence
/// (`+1` at the sending end) and `D = diag(1 / x_k)` over in-service lines.
///
/// The `1/|N|` term is added to every entry, which makes the matrix
/// invertible on a connected island without choosing a slack bus.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionMatrix {
    /// Network node indices, in column order.
    pub nodes: Vec<usize>,
    /// Network line indices, in row order.
    pub lines: Vec<usize>,
    /// `lines.len() x nodes.len()`.
    pub matrix: DMatrix<f64>,
}

impl InjectionMatrix {
    /// Line flows for the given injections (ordered like `nodes`).
    pub fn flows(&self, injections: &[f64]) -> Vec<f64> {
        (0..self.lines.len())
            .map(|r| (0..self.nodes.len()).map(|c| self.matrix[(r, c)] * injections[c]).sum())
            .collect()
    }
}

/// Builds the injection matrix of the island spanned by `nodes`.
pub fn build_injection_matrix(
    network: &NetworkDescription,
    nodes: &[usize],
    line_status: &[bool],
) -> Result<InjectionMatrix, CompositeError> {
    let n = nodes.len();
    let mut col = vec![usize::MAX; network.num_nodes()];
    for (c, &node) in nodes.iter().enumerate() {
        col[node] = c;
    }
    let lines: Vec<usize> = network
        .lines
        .iter()
        .enumerate()
        .filter(|(k, l)| line_status[*k] && col[l.from] != usize::MAX && col[l.to] != usize::MAX)
        .map(|(k, _)| k)
        .collect();
    if n <= 1 {
        return Ok(InjectionMatrix { nodes: nodes.to_vec(), lines: Vec::new(), matrix: DMatrix::zeros(0, n) });
    }
    let m = lines.len();
    // D A
    let mut da = DMatrix::<f64>::zeros(m, n);
    let mut b = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    for (r, &k) in lines.iter().enumerate() {
        let line = &network.lines[k];
        let y = 1.0 / line.reactance;
        let (i, j) = (col[line.from], col[line.to]);
        da[(r, i)] = y;
        da[(r, j)] = -y;
        b[(i, i)] += y;
        b[(j, j)] += y;
        b[(i, j)] -= y;
        b[(j, i)] -= y;
    }
    let b_inv = match b.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => b.try_inverse().ok_or(CompositeError::SingularNetwork)?,
    };
    Ok(InjectionMatrix { nodes: nodes.to_vec(), lines, matrix: da * b_inv })
}

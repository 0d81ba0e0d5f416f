use nalgebra::DMatrix;

use super::Network;
use crate::error::{Error, Result};

fn require_connected(g: &Network) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected(
            "resistance distance is only defined within one connected component".into(),
        ))
    }
}

/// Resistances from `source` via the Laplacian grounded at `source`.
///
/// With `C Cᵀ` the Cholesky factor of the grounded Laplacian, the resistance
/// to `j` is `‖C⁻¹ e_j‖²`; the forward solve for `e_j` starts at row `j`.
pub(super) fn grounded_resistances(g: &Network, source: usize) -> Result<Vec<f64>> {
    require_connected(g)?;
    let n = g.node_count();
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let m = n - 1;
    let index = |v: usize| if v < source { v } else { v - 1 };
    // Lower triangle of the grounded Laplacian, row-major m×m.
    let mut l = vec![0.0; m * m];
    for v in (0..n).filter(|&v| v != source) {
        let i = index(v);
        l[i * m + i] = g.degree(v) as f64;
        for &w in g.neighbors(v) {
            if w != source {
                let j = index(w);
                l[i * m + j] = -1.0;
            }
        }
    }
    cholesky_in_place(&mut l, m)?;
    let mut out = vec![0.0; n];
    let mut y = vec![0.0; m];
    for v in (0..n).filter(|&v| v != source) {
        let j = index(v);
        // Forward solve C y = e_j; y[..j] is zero.
        let mut norm2 = 0.0;
        for i in j..m {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for k in j..i {
                s -= l[i * m + k] * y[k];
            }
            y[i] = s / l[i * m + i];
            norm2 += y[i] * y[i];
        }
        out[v] = norm2;
    }
    Ok(out)
}

/// Dense Cholesky `A = C Cᵀ`, overwriting the lower triangle with `C`.
fn cholesky_in_place(a: &mut [f64], m: usize) -> Result<()> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 0.0) {
            return Err(Error::Disconnected("grounded Laplacian is singular".into()));
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    Ok(())
}

/// All-pairs resistance distances `Γ_ii + Γ_jj − 2Γ_ij` from the
/// Moore–Penrose pseudo-inverse `Γ` of the Laplacian.
///
/// For a connected graph `Γ = (L + J/N)⁻¹ − J/N` with `J` the all-ones
/// matrix; the `J/N` shift cancels in the distance formula, so only the
/// (positive definite) inverse is formed.
pub fn resistance_matrix_pinv(g: &Network) -> Result<Vec<Vec<f64>>> {
    require_connected(g)?;
    let n = g.node_count();
    let shift = 1.0 / n as f64;
    let mut lap = DMatrix::<f64>::from_element(n, n, shift);
    for v in 0..n {
        lap[(v, v)] += g.degree(v) as f64;
        for &w in g.neighbors(v) {
            lap[(v, w)] -= 1.0;
        }
    }
    let gamma = lap
        .cholesky()
        .ok_or_else(|| Error::Domain("shifted Laplacian is not positive definite".into()))?
        .inverse();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| gamma[(i, i)] + gamma[(j, j)] - 2.0 * gamma[(i, j)])
                .collect()
        })
        .collect())
}

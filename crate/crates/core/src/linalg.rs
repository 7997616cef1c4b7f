//! Banded solvers for the discrete radial operators.

/// Solves a tridiagonal system by the Thomas algorithm.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`;
/// `lower[0]` and the last `upper` are ignored. Returns `None` on a zero pivot.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 || !piv.is_finite() {
        return None;
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { upper[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Row-major 2x2 matrix `[a, b, c, d]`.
pub type Block = [f64; 4];

fn mat_vec(m: &Block, x: [f64; 2]) -> [f64; 2] {
    [m[0] * x[0] + m[1] * x[1], m[2] * x[0] + m[3] * x[1]]
}

fn mat_mul(a: &Block, b: &Block) -> Block {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn inverse(m: &Block) -> Option<Block> {
    let det = m[0] * m[3] - m[1] * m[2];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([m[3] / det, -m[1] / det, -m[2] / det, m[0] / det])
}

/// Block Thomas algorithm for a tridiagonal system with 2x2 blocks.
pub fn solve_block_tridiagonal(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &[[f64; 2]],
) -> Option<Vec<[f64; 2]>> {
    let n = diag.len();
    let mut c: Vec<Block> = vec![[0.0; 4]; n];
    let mut d: Vec<[f64; 2]> = vec![[0.0; 2]; n];
    let inv = inverse(&diag[0])?;
    c[0] = mat_mul(&inv, &upper[0]);
    d[0] = mat_vec(&inv, rhs[0]);
    for i in 1..n {
        let lc = mat_mul(&lower[i], &c[i - 1]);
        let piv = [
            diag[i][0] - lc[0],
            diag[i][1] - lc[1],
            diag[i][2] - lc[2],
            diag[i][3] - lc[3],
        ];
        let inv = inverse(&piv)?;
        if i + 1 < n {
            c[i] = mat_mul(&inv, &upper[i]);
        }
        let ld = mat_vec(&lower[i], d[i - 1]);
        d[i] = mat_vec(&inv, [rhs[i][0] - ld[0], rhs[i][1] - ld[1]]);
    }
    for i in (0..n - 1).rev() {
        let cd = mat_vec(&c[i], d[i + 1]);
        d[i] = [d[i][0] - cd[0], d[i][1] - cd[1]];
    }
    Some(d)
}

//! Richardson-extrapolated second differences, used as an oracle for exact second variations.

#[derive(Clone, Copy, Debug)]
pub struct FdEstimate {
    pub value: f64,
    /// Difference between the last two diagonal Richardson entries.
    pub error: f64,
    /// Set when successive corrections stop shrinking (round-off floor reached).
    pub noisy: bool,
}

/// Second derivative at 0 from central differences at steps `h0 / 2^i`, `i < levels`.
pub fn fd_second_derivative(mut f: impl FnMut(f64) -> f64, h0: f64, levels: usize) -> FdEstimate {
    let levels = levels.max(2);
    let f0 = f(0.0);
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let d = (f(h) - 2.0 * f0 + f(-h)) / (h * h);
        let mut row = vec![d];
        for k in 1..=i {
            let p = 4f64.powi(k as i32);
            let prev = row[k - 1];
            row.push(prev + (prev - table[i - 1][k - 1]) / (p - 1.0));
        }
        table.push(row);
    }
    let diag: Vec<f64> = (0..levels).map(|i| table[i][i]).collect();
    let corrections: Vec<f64> = diag.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let noisy = corrections.windows(2).any(|w| w[1] > w[0] && w[1] > 1e-13 * diag[0].abs().max(1e-300));
    FdEstimate { value: diag[levels - 1], error: *corrections.last().unwrap(), noisy }
}

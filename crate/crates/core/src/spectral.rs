//! Sample covariance construction, symmetric eigendecomposition and the
//! large-system eigenvalue formulas of the spiked covariance model.
//!
//! The eigensolver is a cyclic Jacobi iteration. It is slower than a
//! tridiagonal QL sweep for big matrices but accurate to working precision
//! for the dimensions used here (a few hundred at most).

use crate::error::{invalid, Error, Result};
use crate::tracy_widom::Beta;

/// Relative tolerance used when checking the symmetry of an input matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Slack below zero tolerated for eigenvalues of a positive semidefinite matrix.
pub const NEGATIVE_EIGEN_SLACK: f64 = 1e-10;
/// Off-diagonal Frobenius norm target, relative to the matrix norm.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Two strengths closer than `TIE_TOL * max(lambda)` count as repeated.
pub const TIE_TOL: f64 = 1e-9;

/// `p x n` matrix of observations, one column per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    p: usize,
    n: usize,
    // row-major: entry (i, t) is coordinate i of snapshot t
    data: Vec<f64>,
}

impl SnapshotMatrix {
    pub fn new(p: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if p < 2 {
            return Err(invalid(format!("need at least 2 dimensions, got {p}")));
        }
        if n < 1 {
            return Err(invalid("need at least one snapshot"));
        }
        if data.len() != p * n {
            return Err(invalid(format!(
                "expected {} entries for a {p}x{n} matrix, got {}",
                p * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { p, n, data })
    }

    /// Builds the matrix from rows (one row per dimension).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(invalid(format!(
                "row {bad} has {} columns, expected {n}",
                rows[bad].len()
            )));
        }
        Self::new(p, n, rows.concat())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }
}

/// Dense symmetric matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Checks symmetry to [`SYMMETRY_TOL`] (relative to the largest entry)
    /// and stores the symmetrised matrix.
    pub fn from_row_major(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let scale = data.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in i + 1..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(invalid(format!(
                        "matrix is not symmetric: entry ({i},{j}) = {a}, ({j},{i}) = {b}"
                    )));
                }
                let mean = 0.5 * (a + b);
                data[i * dim + j] = mean;
                data[j * dim + i] = mean;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(invalid("matrix must be square"));
        }
        Self::from_row_major(dim, rows.concat())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut data = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            data[i * dim + i] = *v;
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Sample eigenvalues sorted in non-increasing order, together with the
/// dimensions of the data that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    n: usize,
}

impl Spectrum {
    /// Sorts `eigenvalues` in descending order and clamps round-off
    /// negatives. Values below `-NEGATIVE_EIGEN_SLACK * max(1, l_1)` are
    /// rejected.
    pub fn new(mut eigenvalues: Vec<f64>, n: usize) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(invalid("a spectrum needs at least two eigenvalues"));
        }
        if n < 2 {
            return Err(invalid(format!("sample count must be at least 2, got {n}")));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(invalid("eigenvalues must be finite"));
        }
        // stable: equal values keep their input order
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let slack = NEGATIVE_EIGEN_SLACK * eigenvalues[0].abs().max(1.0);
        for v in eigenvalues.iter_mut() {
            if *v < 0.0 {
                if *v < -slack {
                    return Err(invalid(format!("negative eigenvalue {v}")));
                }
                *v = 0.0;
            }
        }
        if eigenvalues[0] <= 0.0 {
            return Err(invalid("spectrum is identically zero"));
        }
        Ok(Self { eigenvalues, n })
    }

    /// Spectrum of the sample covariance of `snapshots`. When `p > n` the
    /// `n x n` Gram matrix is decomposed instead and the spectrum is padded
    /// with the `p - n` structural zeros; the non-zero eigenvalues coincide.
    pub fn from_snapshots(snapshots: &SnapshotMatrix) -> Result<Self> {
        let (p, n) = (snapshots.p(), snapshots.n());
        if p <= n {
            return eig_sym_desc(&sample_covariance(snapshots), n);
        }
        let mut gram = vec![0.0; n * n];
        let inv_n = 1.0 / n as f64;
        for s in 0..n {
            for t in s..n {
                let mut acc = 0.0;
                for i in 0..p {
                    acc += snapshots.get(i, s) * snapshots.get(i, t);
                }
                gram[s * n + t] = acc * inv_n;
                gram[t * n + s] = acc * inv_n;
            }
        }
        let eig = jacobi_eigen(&SymMatrix { dim: n, data: gram }, false)?;
        let mut values = eig.values;
        values.resize(p, 0.0);
        Spectrum::new(values, n)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn p(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p / n`.
    pub fn gamma(&self) -> f64 {
        self.p() as f64 / self.n as f64
    }

    /// The `k`-th largest eigenvalue, 1-based.
    pub fn l(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    /// Largest hypothesis index a sequential test may probe: `min(p, n) - 1`.
    pub fn max_order(&self) -> usize {
        self.p().min(self.n) - 1
    }

    /// Returns a copy with every eigenvalue multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().map(|l| l * c).collect(),
            n: self.n,
        }
    }
}

/// Population structure of the spiked model: `q` signal strengths on top of
/// white noise of variance `sigma^2` in `p` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    signal_strengths: Vec<f64>,
    noise_variance: f64,
    p: usize,
}

impl PopulationModel {
    pub fn new(mut signal_strengths: Vec<f64>, noise_variance: f64, p: usize) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(invalid(format!("noise variance must be positive, got {noise_variance}")));
        }
        if signal_strengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(invalid("signal strengths must be positive and finite"));
        }
        if signal_strengths.len() >= p {
            return Err(invalid(format!(
                "need fewer signals than dimensions (q = {}, p = {p})",
                signal_strengths.len()
            )));
        }
        signal_strengths.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { signal_strengths, noise_variance, p })
    }

    pub fn signal_strengths(&self) -> &[f64] {
        &self.signal_strengths
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.signal_strengths.len()
    }

    /// Diagonal of the population covariance: spikes first, then the noise floor.
    pub fn population_eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .signal_strengths
            .iter()
            .map(|l| l + self.noise_variance)
            .collect();
        out.resize(self.p, self.noise_variance);
        out
    }
}

/// `(1/n) sum_t x(t) x(t)^T`. The result is exactly symmetric.
pub fn sample_covariance(snapshots: &SnapshotMatrix) -> SymMatrix {
    let (p, n) = (snapshots.p(), snapshots.n());
    let inv_n = 1.0 / n as f64;
    let mut data = vec![0.0; p * p];
    for i in 0..p {
        let ri = snapshots.row(i);
        for j in i..p {
            let rj = snapshots.row(j);
            let acc: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
            data[i * p + j] = acc * inv_n;
            data[j * p + i] = acc * inv_n;
        }
    }
    SymMatrix { dim: p, data }
}

/// Eigenvalues (descending) and optionally eigenvectors of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Row-major `dim x dim`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Option<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// norm falls below `JACOBI_TOL * ||M||_F`. Eigenvalues are returned in
/// descending order; ties keep the order of the diagonal positions.
pub fn jacobi_eigen(matrix: &SymMatrix, with_vectors: bool) -> Result<SymEigen> {
    let d = matrix.dim;
    let mut a = matrix.data.clone();
    let mut v = with_vectors.then(|| SymMatrix::identity(d).data);
    let tol = JACOBI_TOL * matrix.frobenius_norm();

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                s += a[i * d + j] * a[i * d + j];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        if off_norm(&a) <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps });
        }
        sweeps += 1;
        for p in 0..d.saturating_sub(1) {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[k * d + p] = np;
                    a[p * d + k] = np;
                    a[k * d + q] = nq;
                    a[q * d + k] = nq;
                }
                a[p * d + p] = app - t * apq;
                a[q * d + q] = aqq + t * apq;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = c * vkp - s * vkq;
                        v[k * d + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let diag: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| {
        let mut out = vec![0.0; d * d];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..d {
                out[row * d + col] = v[row * d + src];
            }
        }
        out
    });
    Ok(SymEigen { values, vectors, sweeps })
}

/// Descending eigenvalues of a symmetric sample covariance built from `n` samples.
pub fn eig_sym_desc(matrix: &SymMatrix, n: usize) -> Result<Spectrum> {
    let eig = jacobi_eigen(matrix, false)?;
    Spectrum::new(eig.values, n)
}

/// Smallest asymptotically detectable signal strength, `sigma^2 sqrt(gamma)`.
pub fn detection_limit(sigma2: f64, gamma: f64) -> f64 {
    sigma2 * gamma.sqrt()
}

/// Almost-sure limit of a sample spike eigenvalue. Strengths at or below the
/// detection limit are absorbed into the bulk edge `sigma^2 (1 + sqrt(gamma))^2`.
pub fn spike_limit(lambda: f64, sigma2: f64, gamma: f64) -> f64 {
    if lambda > detection_limit(sigma2, gamma) {
        (lambda + sigma2) * (1.0 + gamma * sigma2 / lambda)
    } else {
        let edge = 1.0 + gamma.sqrt();
        sigma2 * edge * edge
    }
}

/// Mean and standard deviation of the Gaussian fluctuation of a
/// supercritical spike eigenvalue with `p - q` noise dimensions.
pub fn fluctuation_params(
    lambda: f64,
    sigma2: f64,
    p: usize,
    n: usize,
    q: usize,
    beta: Beta,
) -> Result<(f64, f64)> {
    if q > p {
        return Err(invalid(format!("q = {q} exceeds p = {p}")));
    }
    let ratio = (p - q) as f64 / n as f64;
    let critical = sigma2 * ratio.sqrt();
    if !(lambda > critical) {
        return Err(Error::Domain(format!(
            "signal strength {lambda} is not above sigma^2 sqrt((p-q)/n) = {critical}"
        )));
    }
    let tau = (lambda + sigma2) * (1.0 + ratio * sigma2 / lambda);
    let radicand = 2.0 / (beta.value() * n as f64) * (1.0 - ratio * sigma2 * sigma2 / (lambda * lambda));
    Ok((tau, (lambda + sigma2) * radicand.sqrt()))
}

/// First-order finite-sample expectation of the `j`-th (1-based) sample
/// spike eigenvalue, including the pairwise interaction between spikes.
pub fn lawley_expectation(j: usize, model: &PopulationModel, n: usize) -> Result<f64> {
    let q = model.q();
    if j == 0 || j > q {
        return Err(invalid(format!("index {j} outside 1..={q}")));
    }
    let strengths = model.signal_strengths();
    let tie = TIE_TOL * strengths[0];
    for w in strengths.windows(2) {
        if (w[0] - w[1]).abs() <= tie {
            return Err(Error::DegenerateModel(format!(
                "repeated signal strength {} within tolerance {tie}",
                w[0]
            )));
        }
    }
    let sigma2 = model.noise_variance();
    let nf = n as f64;
    let rho: Vec<f64> = strengths.iter().map(|l| l + sigma2).collect();
    let rj = rho[j - 1];
    let interaction: f64 = rho
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j - 1)
        .map(|(_, ri)| ri / (rj - ri))
        .sum();
    Ok(rj + (model.p() - q) as f64 * rj * sigma2 / (nf * (rj - sigma2)) + rj / nf * interaction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn det_cofactor(m: &[Vec<f64>]) -> f64 {
        let d = m.len();
        if d == 1 {
            return m[0][0];
        }
        (0..d)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * det_cofactor(&minor)
            })
            .sum()
    }

    #[test]
    fn covariance_of_rank_one_column() {
        let x = SnapshotMatrix::new(2, 1, vec![1.0, 2.0]).unwrap();
        let s = sample_covariance(&x);
        assert_eq!(s.as_slice(), &[1.0, 2.0, 2.0, 4.0]);
    }

    #[test]
    fn covariance_of_orthogonal_pair() {
        let x = SnapshotMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sample_covariance(&x).as_slice(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn covariance_matches_double_loop() {
        let rows = vec![
            vec![0.3, -1.2, 2.5, 0.7],
            vec![1.1, 0.4, -0.6, -2.0],
            vec![-0.8, 0.9, 1.3, 0.2],
        ];
        let x = SnapshotMatrix::from_rows(&rows).unwrap();
        let s = sample_covariance(&x);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for t in 0..4 {
                    acc += rows[i][t] * rows[j][t];
                }
                assert!((s.get(i, j) - acc / 4.0).abs() < 1e-12);
                assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
    }

    #[test]
    fn non_finite_snapshots_rejected() {
        let err = SnapshotMatrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn eigenvalues_of_small_matrices() {
        let d = SymMatrix::diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(eig_sym_desc(&d, 10).unwrap().eigenvalues(), &[3.0, 2.0, 1.0]);
        let id = SymMatrix::identity(5);
        assert_eq!(eig_sym_desc(&id, 10).unwrap().eigenvalues(), &[1.0; 5]);
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = eig_sym_desc(&m, 10).unwrap();
        assert_relative_eq!(s.l(1), 3.0, epsilon = 1e-14);
        assert_relative_eq!(s.l(2), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let err = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        // within tolerance is accepted and symmetrised
        let ok = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5 + 1e-13, 1.0]]).unwrap();
        assert_eq!(ok.get(0, 1), ok.get(1, 0));
    }

    #[test]
    fn jacobi_reconstructs_and_preserves_invariants() {
        let rows = vec![
            vec![4.0, 1.0, -0.5, 0.2],
            vec![1.0, 3.0, 0.3, -0.1],
            vec![-0.5, 0.3, 2.0, 0.7],
            vec![0.2, -0.1, 0.7, 1.0],
        ];
        let m = SymMatrix::from_rows(&rows).unwrap();
        let eig = jacobi_eigen(&m, true).unwrap();
        let v = eig.vectors.as_ref().unwrap();
        let d = 4;
        let mut resid = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let r: f64 = (0..d).map(|k| v[i * d + k] * eig.values[k] * v[j * d + k]).sum();
                resid = resid.max((r - m.get(i, j)).abs());
            }
        }
        assert!(resid <= 1e-9 * m.frobenius_norm());
        let sum: f64 = eig.values.iter().sum();
        assert_relative_eq!(sum, m.trace(), max_relative = 1e-9);
        let prod: f64 = eig.values.iter().product();
        assert_relative_eq!(prod, det_cofactor(&rows), max_relative = 1e-9);
    }

    #[test]
    fn spectrum_clamps_and_rejects_negatives() {
        let s = Spectrum::new(vec![1.0, -1e-12, 2.0], 5).unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 1.0, 0.0]);
        assert!(Spectrum::new(vec![1.0, -1e-3], 5).is_err());
    }

    #[test]
    fn gram_route_matches_covariance_route() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..3).map(|t| ((i * 7 + t * 3) % 5) as f64 - 1.7 + 0.1 * i as f64).collect())
            .collect();
        let x = SnapshotMatrix::from_rows(&rows).unwrap();
        let gram = Spectrum::from_snapshots(&x).unwrap();
        let direct = eig_sym_desc(&sample_covariance(&x), 3).unwrap();
        for (a, b) in gram.eigenvalues().iter().zip(direct.eigenvalues()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn detection_limit_values() {
        assert_eq!(detection_limit(1.0, 0.25), 0.5);
        assert_eq!(detection_limit(1.0, 1.0), 1.0);
        assert_relative_eq!(detection_limit(2.0, 0.5), 2.0_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn spike_limit_branches() {
        assert_relative_eq!(spike_limit(2.0, 1.0, 0.5), 3.75, epsilon = 1e-14);
        assert_relative_eq!(spike_limit(0.1, 1.0, 0.5), (1.0 + 0.5_f64.sqrt()).powi(2), epsilon = 1e-14);
        assert_relative_eq!(spike_limit(1e9, 1.0, 0.5) / 1e9, 1.0, epsilon = 1e-8);
        // continuity at the detection limit
        for &(s2, g) in &[(1.0, 0.5), (2.0, 0.1), (0.7, 2.0)] {
            let at = detection_limit(s2, g);
            let lhs: f64 = (at + s2) * (1.0 + g * s2 / at);
            assert!((lhs - spike_limit(at, s2, g)).abs() < 1e-12);
        }
    }

    #[test]
    fn fluctuation_example() {
        let (tau, delta) = fluctuation_params(5.0, 1.0, 100, 200, 2, Beta::Real).unwrap();
        assert_relative_eq!(tau, 6.588, epsilon = 1e-12);
        assert_relative_eq!(delta, 6.0 * (0.01_f64 * (1.0 - 0.0196)).sqrt(), epsilon = 1e-12);
        assert!((delta - 0.59406).abs() < 5e-5, "{delta}");
        let (tau_full, _) = fluctuation_params(5.0, 1.0, 10, 20, 10, Beta::Real).unwrap();
        assert_eq!(tau_full, 6.0);
    }

    #[test]
    fn fluctuation_domain() {
        let crit = (98.0_f64 / 200.0).sqrt();
        assert!(matches!(
            fluctuation_params(crit, 1.0, 100, 200, 2, Beta::Real),
            Err(Error::Domain(_))
        ));
        let (_, d) = fluctuation_params(crit * (1.0 + 1e-9), 1.0, 100, 200, 2, Beta::Real).unwrap();
        assert!(d > 0.0 && d < 1e-3);
    }

    #[test]
    fn lawley_examples() {
        let m = PopulationModel::new(vec![4.0], 1.0, 100).unwrap();
        assert_relative_eq!(lawley_expectation(1, &m, 200).unwrap(), 5.61875, epsilon = 1e-12);

        let m2 = PopulationModel::new(vec![5.0, 2.0], 1.0, 100).unwrap();
        let base = |rho: f64| rho + 98.0 * rho / (100.0 * (rho - 1.0));
        assert_relative_eq!(lawley_expectation(1, &m2, 100).unwrap(), base(6.0) + 0.06, epsilon = 1e-12);
        assert_relative_eq!(lawley_expectation(2, &m2, 100).unwrap(), base(3.0) - 0.06, epsilon = 1e-12);
    }

    #[test]
    fn lawley_rejects_ties() {
        let m = PopulationModel::new(vec![5.0, 5.0], 1.0, 10).unwrap();
        assert!(matches!(lawley_expectation(1, &m, 100), Err(Error::DegenerateModel(_))));
    }
}

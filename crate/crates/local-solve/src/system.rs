//! Construction of fixed-point systems `x = Gx + z`: Jacobi and Richardson
//! transforms of `Ax = b`, PageRank and Bonacich centrality systems, random
//! graph generation, and Matrix Market file I/O.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// A linear system `Ax = b`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: SparseMatrix,
    pub b: Vec<f64>,
}

impl LinearSystem {
    pub fn new(a: SparseMatrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.n() {
            return Err(Error::DimensionMismatch { expected: a.n(), got: b.len() });
        }
        Ok(LinearSystem { a, b })
    }
}

/// Provenance of a constructed system: which transform produced it and with
/// what parameters.
#[derive(Debug, Clone, Default)]
pub struct SystemMeta {
    pub transform: String,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    /// Set when a convergence-relevant norm estimate looked suspect.
    pub warning: Option<String>,
}

/// The system `x = Gx + z` the solver operates on.
#[derive(Debug, Clone)]
pub struct FixedPointSystem {
    pub g: SparseMatrix,
    pub z: Vec<f64>,
    pub meta: SystemMeta,
}

impl FixedPointSystem {
    pub fn new(g: SparseMatrix, z: Vec<f64>) -> Result<Self> {
        if z.len() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: z.len() });
        }
        Ok(FixedPointSystem { g, z, meta: SystemMeta::default() })
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }
}

/// Jacobi transform: `G = -D⁻¹(A - D)`, `z = D⁻¹b` with `D = diag(A)`.
/// `G` has zero diagonal and sparsity contained in that of `A`.
pub fn jacobi_transform(sys: &LinearSystem) -> Result<FixedPointSystem> {
    let n = sys.a.n();
    let mut triplets = Vec::new();
    let mut z = vec![0.0; n];
    for (u, zu) in z.iter_mut().enumerate() {
        let diag = sys.a.get(u, u);
        if diag == 0.0 {
            return Err(Error::ZeroDiagonal { row: u });
        }
        *zu = sys.b[u] / diag;
        for &(c, v) in sys.a.row(u) {
            if c != u {
                triplets.push((u, c, -v / diag));
            }
        }
    }
    let mut out = FixedPointSystem::new(SparseMatrix::from_triplets(n, &triplets)?, z)?;
    out.meta.transform = "jacobi".into();
    Ok(out)
}

/// Richardson transform: `G = I - γA`, `z = γb`. Diagonal entries
/// `1 - γA_uu` are stored unless exactly zero.
pub fn richardson_transform(sys: &LinearSystem, gamma: f64) -> Result<FixedPointSystem> {
    if gamma <= 0.0 {
        return Err(Error::InvalidParam(format!("gamma must be positive, got {gamma}")));
    }
    let n = sys.a.n();
    let mut triplets = Vec::new();
    for u in 0..n {
        let mut has_diag = false;
        for &(c, v) in sys.a.row(u) {
            if c == u {
                has_diag = true;
                triplets.push((u, u, 1.0 - gamma * v));
            } else {
                triplets.push((u, c, -gamma * v));
            }
        }
        if !has_diag {
            triplets.push((u, u, 1.0));
        }
    }
    let z = sys.b.iter().map(|&b| gamma * b).collect();
    let mut out = FixedPointSystem::new(SparseMatrix::from_triplets(n, &triplets)?, z)?;
    out.meta.transform = "richardson".into();
    out.meta.gamma = Some(gamma);
    Ok(out)
}

/// The `γ = 2/(λ_min + λ_max)` achieving `‖G‖₂ = (κ-1)/(κ+1)` for symmetric
/// positive definite `A`. Symmetry is checked to 1e-12; eigenvalues come
/// from a dense solve at desk scale.
pub fn richardson_optimal_gamma(a: &SparseMatrix) -> Result<f64> {
    let n = a.n();
    for u in 0..n {
        for &(c, v) in a.row(u) {
            if (v - a.get(c, u)).abs() > 1e-12 {
                return Err(Error::NotSymmetric { row: u, col: c });
            }
        }
    }
    let mut dense = DMatrix::zeros(n, n);
    for u in 0..n {
        for &(c, v) in a.row(u) {
            dense[(u, c)] = v;
        }
    }
    let eig = dense.symmetric_eigen().eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { eigenvalue: min });
    }
    Ok(2.0 / (min + max))
}

/// PageRank system: `G = (1-α)Pᵀ`, `z = α𝟏/n`. `P` must be row-stochastic
/// to 1e-12; rows with no outgoing edges are rejected rather than patched.
pub fn pagerank_system(p: &SparseMatrix, alpha: f64) -> Result<FixedPointSystem> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParam(format!("alpha must be in (0, 1], got {alpha}")));
    }
    let n = p.n();
    let mut triplets = Vec::new();
    for u in 0..n {
        let sum: f64 = p.row(u).iter().map(|&(_, v)| v).sum();
        if p.row(u).is_empty() || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NonStochasticRow { row: u, sum });
        }
        for &(c, v) in p.row(u) {
            let g = (1.0 - alpha) * v;
            if g != 0.0 {
                triplets.push((c, u, g));
            }
        }
    }
    let z = vec![alpha / n as f64; n];
    let mut out = FixedPointSystem::new(SparseMatrix::from_triplets(n, &triplets)?, z)?;
    out.meta.transform = "pagerank".into();
    out.meta.alpha = Some(alpha);
    Ok(out)
}

/// Bonacich centrality system: `G = α·adj`, `z = 𝟏`. A warning is recorded
/// in the meta (not an error) when the norm estimate of `|G|` is ≥ 1.
pub fn bonacich_system(adj: &SparseMatrix, alpha: f64) -> Result<FixedPointSystem> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParam(format!("alpha must be positive, got {alpha}")));
    }
    let n = adj.n();
    let mut triplets = Vec::new();
    for u in 0..n {
        for &(c, v) in adj.row(u) {
            triplets.push((u, c, alpha * v));
        }
    }
    let g = SparseMatrix::from_triplets(n, &triplets)?;
    let est = g.entrywise_abs().operator_norm_estimate(200, 1e-6);
    let mut out = FixedPointSystem::new(g, vec![1.0; n])?;
    out.meta.transform = "bonacich".into();
    out.meta.alpha = Some(alpha);
    if est.value >= 1.0 {
        out.meta.warning = Some(format!(
            "operator norm estimate of |G| is {:.4} >= 1; convergence is not guaranteed",
            est.value
        ));
    }
    Ok(out)
}

/// Default Bonacich discount: `0.9 / ‖adj‖₂-estimate`, keeping the system
/// comfortably inside the convergent regime.
pub fn default_bonacich_alpha(adj: &SparseMatrix) -> f64 {
    let est = adj.operator_norm_estimate(500, 1e-8);
    0.9 / est.value
}

/// Row-normalize an adjacency matrix into a stochastic matrix. Rows with no
/// entries are an error.
pub fn row_normalize(adj: &SparseMatrix) -> Result<SparseMatrix> {
    let n = adj.n();
    let mut triplets = Vec::new();
    for u in 0..n {
        let sum: f64 = adj.row(u).iter().map(|&(_, v)| v).sum();
        if sum == 0.0 {
            return Err(Error::NonStochasticRow { row: u, sum });
        }
        for &(c, v) in adj.row(u) {
            triplets.push((u, c, v / sum));
        }
    }
    SparseMatrix::from_triplets(n, &triplets)
}

/// Random graph specification.
#[derive(Debug, Clone)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    PowerLawConfig { n: usize, exponent: f64, seed: u64 },
}

/// Generate a simple undirected 0/1 adjacency matrix, deterministic given
/// the spec's seed.
pub fn generate_graph(spec: &GraphSpec) -> Result<SparseMatrix> {
    match *spec {
        GraphSpec::ErdosRenyi { n, p, seed } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParam(format!("edge probability {p} not in [0,1]")));
            }
            if n == 0 {
                return Err(Error::InvalidParam("n must be >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut triplets = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < p {
                        triplets.push((u, v, 1.0));
                        triplets.push((v, u, 1.0));
                    }
                }
            }
            SparseMatrix::from_triplets(n, &triplets)
        }
        GraphSpec::PowerLawConfig { n, exponent, seed } => {
            if exponent <= 1.0 {
                return Err(Error::InvalidParam(format!("exponent {exponent} must be > 1")));
            }
            if n < 2 {
                return Err(Error::InvalidParam("n must be >= 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // inverse-CDF table for P(d) ∝ d^(-exponent), d in [1, n-1]
            let weights: Vec<f64> = (1..n).map(|d| (d as f64).powf(-exponent)).collect();
            let total: f64 = weights.iter().sum();
            let mut cdf = Vec::with_capacity(weights.len());
            let mut acc = 0.0;
            for w in &weights {
                acc += w / total;
                cdf.push(acc);
            }
            let sample_degree = |rng: &mut ChaCha8Rng| -> usize {
                let u: f64 = rng.gen();
                match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                    Ok(pos) | Err(pos) => pos.min(cdf.len() - 1) + 1,
                }
            };
            let mut degrees: Vec<usize> = (0..n).map(|_| sample_degree(&mut rng)).collect();
            // make the stub count even by resampling one node
            while degrees.iter().sum::<usize>() % 2 != 0 {
                let node = rng.gen_range(0..n);
                degrees[node] = sample_degree(&mut rng);
            }
            let mut stubs = Vec::new();
            for (node, &deg) in degrees.iter().enumerate() {
                stubs.extend(std::iter::repeat_n(node, deg));
            }
            // Fisher-Yates, then pair consecutive stubs
            for i in (1..stubs.len()).rev() {
                let j = rng.gen_range(0..=i);
                stubs.swap(i, j);
            }
            let mut triplets = Vec::new();
            for pair in stubs.chunks_exact(2) {
                let (u, v) = (pair[0], pair[1]);
                if u != v {
                    triplets.push((u, v, 1.0));
                    triplets.push((v, u, 1.0));
                }
            }
            // from_triplets sums duplicates; clamp multi-edges back to 1
            let multi = SparseMatrix::from_triplets(n, &triplets)?;
            let mut simple = Vec::new();
            for u in 0..n {
                for &(c, _) in multi.row(u) {
                    simple.push((u, c, 1.0));
                }
            }
            SparseMatrix::from_triplets(n, &simple)
        }
    }
}

/// Write a matrix in Matrix Market coordinate format (1-based, real,
/// general). Values use Rust's shortest round-trip formatting, so
/// `load(save(M)) == M` exactly.
pub fn save_matrix_market(m: &SparseMatrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.n(), m.n(), m.nnz());
    for u in 0..m.n() {
        for &(c, v) in m.row(u) {
            let _ = writeln!(out, "{} {} {}", u + 1, c + 1, v);
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load a square matrix from a Matrix Market coordinate file.
pub fn load_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let header_fields: Vec<&str> = header.split_whitespace().collect();
    if header_fields.len() < 4
        || header_fields[0] != "%%MatrixMarket"
        || header_fields[1] != "matrix"
        || header_fields[2] != "coordinate"
        || header_fields[3] != "real"
    {
        return Err(Error::Parse {
            line: lineno + 1,
            msg: "expected header '%%MatrixMarket matrix coordinate real general'".into(),
        });
    }
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if dims.is_none() {
            if fields.len() != 3 {
                return Err(Error::Parse { line: idx + 1, msg: "expected 'rows cols nnz'".into() });
            }
            let rows: usize = parse_field(fields[0], idx + 1)?;
            let cols: usize = parse_field(fields[1], idx + 1)?;
            let nnz: usize = parse_field(fields[2], idx + 1)?;
            if rows != cols {
                return Err(Error::Parse { line: idx + 1, msg: format!("matrix must be square, got {rows}x{cols}") });
            }
            dims = Some((rows, cols, nnz));
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse { line: idx + 1, msg: "expected 'i j value'".into() });
        }
        let (n, _, _) = dims.unwrap();
        let i: usize = parse_field(fields[0], idx + 1)?;
        let j: usize = parse_field(fields[1], idx + 1)?;
        let v: f64 = parse_field(fields[2], idx + 1)?;
        if i < 1 || i > n || j < 1 || j > n {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("index ({i}, {j}) out of range for {n}x{n} matrix"),
            });
        }
        triplets.push((i - 1, j - 1, v));
    }
    let (n, _, nnz) = dims.ok_or_else(|| Error::Parse { line: 2, msg: "missing size line".into() })?;
    if triplets.len() != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header promised {nnz} entries, found {}", triplets.len()),
        });
    }
    SparseMatrix::from_triplets(n, &triplets)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("cannot parse '{s}'") })
}

/// Dense vector file: a count header line, then one value per line.
pub fn save_vector(v: &[f64], path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{}", v.len());
    for val in v {
        let _ = writeln!(out, "{}", val);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let n: usize = parse_field(first.trim(), 1)?;
    let mut out = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_field::<f64>(line, idx + 1)?);
    }
    if out.len() != n {
        return Err(Error::Parse { line: 0, msg: format!("expected {n} values, found {}", out.len()) });
    }
    Ok(out)
}

//! Secret keys, seeded Gaussian measurement matrices and sparsifying
//! dictionaries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ColMatrix};
use crate::prng::GaussianStream;

/// Current key file format version.
pub const KEY_VERSION: u32 = 1;

/// Column-orthonormality tolerance for dictionaries.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// The shared secret. Seed and dimensions fully determine the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "KeyFile", into = "KeyFile")]
pub struct SecretKey {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub version: u32,
}

/// On-disk key layout. The seed is a decimal string so JSON readers that
/// parse numbers as doubles cannot truncate it.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyFile {
    version: u32,
    seed: String,
    m: usize,
    n: usize,
}

impl From<SecretKey> for KeyFile {
    fn from(k: SecretKey) -> Self {
        KeyFile { version: k.version, seed: k.seed.to_string(), m: k.m, n: k.n }
    }
}

impl TryFrom<KeyFile> for SecretKey {
    type Error = Error;

    fn try_from(f: KeyFile) -> Result<Self> {
        let seed = f
            .seed
            .parse::<u64>()
            .map_err(|_| Error::Validation(format!("seed: not a decimal u64: {:?}", f.seed)))?;
        let key = SecretKey { seed, m: f.m, n: f.n, version: f.version };
        key.validate()?;
        Ok(key)
    }
}

impl SecretKey {
    pub fn new(seed: u64, m: usize, n: usize) -> Result<Self> {
        let key = SecretKey { seed, m, n, version: KEY_VERSION };
        key.validate()?;
        Ok(key)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != KEY_VERSION {
            return Err(Error::Validation(format!(
                "version: unsupported key version {} (expected {KEY_VERSION})",
                self.version
            )));
        }
        if self.m < 1 || self.n < 1 {
            return Err(Error::Dimension(format!("key needs m >= 1 and n >= 1, got m={} n={}", self.m, self.n)));
        }
        if self.m > self.n {
            return Err(Error::Dimension(format!("key needs m <= n, got m={} n={}", self.m, self.n)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("key serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("key file: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Derived { key: SecretKey },
    Explicit,
}

/// Dense m x n matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementMatrix {
    m: usize,
    n: usize,
    entries: Vec<f64>,
    provenance: Provenance,
}

impl MeasurementMatrix {
    /// Wraps explicit row-major entries; rejects non-finite values.
    pub fn from_row_major(m: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension(format!("matrix must be non-empty, got {m}x{n}")));
        }
        if entries.len() != m * n {
            return Err(Error::Dimension(format!("{m}x{n} matrix needs {} entries, got {}", m * n, entries.len())));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("matrix entry ({}, {}) is not finite", pos / n, pos % n)));
        }
        Ok(Self { m, n, entries, provenance: Provenance::Explicit })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_row_major(m, n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = 1.0;
        }
        Self { m: n, n, entries: e, provenance: Provenance::Explicit }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.get(i, j)).collect()
    }

    /// Column-major copy of the columns listed in `support`.
    pub fn columns(&self, support: &[usize]) -> ColMatrix {
        let m = self.m;
        let mut c = ColMatrix::zeros(m, support.len());
        for (k, &j) in support.iter().enumerate() {
            let dst = c.col_mut(k);
            for (i, d) in dst.iter_mut().enumerate() {
                *d = self.entries[i * self.n + j];
            }
        }
        debug_assert_eq!(c.rows, m);
        c
    }

    /// `A x`, each row accumulated in index order.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "matrix has {} columns but vector has length {}",
                self.n,
                x.len()
            )));
        }
        Ok((0..self.m)
            .map(|i| {
                let mut acc = 0.0;
                for (a, b) in self.row(i).iter().zip(x) {
                    acc += a * b;
                }
                acc
            })
            .collect())
    }

    /// One row per line, shortest round-trip decimal for each entry.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        let mut buf = ryu::Buffer::new();
        for i in 0..self.m {
            let rec: Vec<String> = self.row(i).iter().map(|v| buf.format(*v).to_owned()).collect();
            wr.write_record(&rec).map_err(|e| Error::Parse(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("csv output is ascii")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("matrix csv: {e}")))?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("matrix csv: entry ({i}, {j}) is not a number: {s:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }
}

/// Derives the measurement matrix for `key`: i.i.d. N(0, 1/m) entries,
/// filled row-major from the seeded Gaussian stream.
pub fn derive_matrix(key: &SecretKey) -> Result<MeasurementMatrix> {
    key.validate()?;
    let mut entries = vec![0.0; key.m * key.n];
    GaussianStream::from_seed(key.seed).fill(&mut entries);
    let scale = 1.0 / (key.m as f64).sqrt();
    for v in &mut entries {
        *v *= scale;
    }
    Ok(MeasurementMatrix { m: key.m, n: key.n, entries, provenance: Provenance::Derived { key: *key } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    Identity,
    Explicit,
}

/// Square basis with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    n: usize,
    entries: Vec<f64>,
    kind: DictionaryKind,
}

impl Dictionary {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries, kind: DictionaryKind::Identity }
    }

    /// Row-major explicit basis; columns must be orthonormal within
    /// [`ORTHONORMAL_TOL`].
    pub fn explicit(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("dictionary needs {} entries, got {}", n * n, entries.len())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("dictionary has non-finite entries".into()));
        }
        let d = Self { n, entries, kind: DictionaryKind::Explicit };
        let dev = d.orthonormality_defect();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::Validation(format!("dictionary columns not orthonormal (max deviation {dev:e})")));
        }
        Ok(d)
    }

    /// Random orthonormal basis: orthogonal factor of a seeded Gaussian.
    pub fn random_orthonormal(seed: u64, n: usize) -> Result<Self> {
        let mut g = vec![0.0; n * n];
        GaussianStream::from_seed(seed).fill(&mut g);
        // read the draws as column-major; orthogonal_factor returns column-major Q
        let q = linalg::orthogonal_factor(&ColMatrix { rows: n, cols: n, data: g });
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = q.get(i, j);
            }
        }
        Self::explicit(n, entries)
    }

    pub fn from_matrix(m: &MeasurementMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Dimension(format!("dictionary must be square, got {}x{}", m.rows(), m.cols())));
        }
        Self::explicit(m.cols(), m.entries().to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// max over (i, j) of |<psi_i, psi_j> - delta_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d: f64 = (0..n).map(|r| self.get(r, i) * self.get(r, j)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - want).abs());
            }
        }
        worst
    }

    /// Synthesis `x = Psi alpha`.
    pub fn synthesize(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        if alpha.len() != self.n {
            return Err(Error::Dimension(format!("dictionary is {}-dimensional, vector has {}", self.n, alpha.len())));
        }
        if self.kind == DictionaryKind::Identity {
            return Ok(alpha.to_vec());
        }
        Ok((0..self.n)
            .map(|i| {
                let mut acc = 0.0;
                for (j, a) in alpha.iter().enumerate() {
                    acc += self.get(i, j) * a;
                }
                acc
            })
            .collect())
    }
}

/// Holographic dictionary `A = Phi Psi`. With an identity `psi` the entries
/// of `phi` are copied unchanged.
pub fn compose(phi: &MeasurementMatrix, psi: &Dictionary) -> Result<MeasurementMatrix> {
    if phi.n != psi.n {
        return Err(Error::Dimension(format!("Phi has {} columns but Psi is {}x{}", phi.n, psi.n, psi.n)));
    }
    let (m, n) = (phi.m, phi.n);
    let entries = match psi.kind {
        DictionaryKind::Identity => phi.entries.clone(),
        DictionaryKind::Explicit => {
            let mut out = vec![0.0; m * n];
            for i in 0..m {
                let row = phi.row(i);
                for j in 0..n {
                    let mut acc = 0.0;
                    for (l, p) in row.iter().enumerate() {
                        acc += p * psi.get(l, j);
                    }
                    out[i * n + j] = acc;
                }
            }
            out
        }
    };
    MeasurementMatrix::from_row_major(m, n, entries)
}

/// Measurement count for `k`-sparse signals in dimension `n`:
/// `ceil(c k ln(n / k))`, clamped to `[2k, n]`.
pub fn suggest_m(n: usize, k: usize, c: f64) -> Result<usize> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 1 <= k < n, got k={k} n={n}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("constant c must be positive, got {c}")));
    }
    let raw = (c * k as f64 * (n as f64 / k as f64).ln()).ceil();
    let raw = if raw > n as f64 { n } else { raw as usize };
    Ok(raw.max(2 * k).min(n))
}

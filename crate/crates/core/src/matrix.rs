//! The Bernoulli success-probability matrix, its file formats, the worked
//! example generators and the index-set surgery used by the exact engine.
//!
//! Matrices are immutable once built. Entry `(j, r)` is the success
//! probability of `X_{j,r}`; rows are indexed by `j`, columns by `r`, both
//! zero-based.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square matrix of success probabilities `p[j][r] ∈ [0,1]` with `n ≥ 2` and
/// strictly positive mean `λ = (1/n) Σ p[j][r]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct BernoulliMatrix {
    n: usize,
    p: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    p: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for BernoulliMatrix {
    type Error = Error;
    fn try_from(value: MatrixJson) -> Result<Self> {
        BernoulliMatrix::from_rows(value.p)
    }
}

impl From<BernoulliMatrix> for MatrixJson {
    fn from(m: BernoulliMatrix) -> Self {
        MatrixJson { p: m.to_rows() }
    }
}

/// On-disk matrix formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    /// One row per line, comma separated plain decimals, no header.
    Csv,
    /// `{"p": [[...], ...]}`.
    Json,
}

impl FromStr for MatrixFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(MatrixFormat::Csv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(Error::Parse(format!("unknown matrix format '{other}'"))),
        }
    }
}

impl BernoulliMatrix {
    /// Builds a validated matrix from a row-major flat vector.
    pub fn from_flat(n: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                p.len()
            )));
        }
        if n < 2 {
            return Err(Error::Domain(format!("matrix size must be at least 2, got {n}")));
        }
        for (idx, &v) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "entry ({}, {}) = {v} is not a probability",
                    idx / n,
                    idx % n
                )));
            }
        }
        if p.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("all-zero matrix has mean λ = 0".into()));
        }
        Ok(Self { n, p })
    }

    /// Builds a validated matrix from rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {j} has {} entries, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
        }
        Self::from_flat(n, rows.into_iter().flatten().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, r: usize) -> f64 {
        self.p[j * self.n + r]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.p[j * self.n..(j + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.p.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    /// `λ = E S_n = (1/n) Σ_{j,r} p[j][r]`.
    pub fn lambda(&self) -> f64 {
        crate::numeric::csum(self.p.iter().copied()) / self.n as f64
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut p = vec![0.0; n * n];
        for j in 0..n {
            for r in 0..n {
                p[r * n + j] = self.get(j, r);
            }
        }
        Self { n, p }
    }

    /// Multiplies every entry by `factor ∈ (0, 1]`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::Domain(format!("scale factor {factor} not in (0,1]")));
        }
        Self::from_flat(self.n, self.p.iter().map(|v| v * factor).collect())
    }

    /// True when every entry is exactly 0 or 1.
    pub fn is_zero_one(&self) -> bool {
        self.p.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    // ---- generators -------------------------------------------------------

    /// All entries equal to `p`; `S_n` is then Binomial(n, p).
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("constant probability {p} not in (0,1]")));
        }
        Self::from_flat(n, vec![p; n * n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut p = vec![0.0; n * n];
        for j in 0..n {
            p[j * n + j] = 1.0;
        }
        Self::from_flat(n, p)
    }

    /// Block 0/1 matrix of the general matching problem: block `ℓ` covers rows
    /// `(A_{ℓ-1}, A_ℓ]` and columns `(B_{ℓ-1}, B_ℓ]` where `A`, `B` are the
    /// partial sums of `a` and `b`.
    pub fn matching(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Shape(format!(
                "block lists have different lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        let n: usize = a.iter().sum();
        let nb: usize = b.iter().sum();
        if n != nb {
            return Err(Error::Shape(format!("row blocks sum to {n}, column blocks to {nb}")));
        }
        let mut p = vec![0.0; n * n];
        let (mut row0, mut col0) = (0, 0);
        for (&al, &bl) in a.iter().zip(b) {
            for j in row0..row0 + al {
                for r in col0..col0 + bl {
                    p[j * n + r] = 1.0;
                }
            }
            row0 += al;
            col0 += bl;
        }
        Self::from_flat(n, p)
    }

    /// `m` diagonal blocks of size `d × d`.
    pub fn matching_uniform(d: usize, m: usize) -> Result<Self> {
        let blocks = vec![d; m];
        Self::matching(&blocks, &blocks)
    }

    /// I.i.d. Uniform[0,1) entries drawn from ChaCha8 seeded with `seed`. With
    /// `column_monotone` every column is sorted so that `p[j][r] ≥ p[j+1][r]`.
    pub fn random(n: usize, seed: u64, column_monotone: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("matrix size must be at least 2, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut p: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();
            if p.iter().all(|&v| v == 0.0) {
                continue;
            }
            if column_monotone {
                for r in 0..n {
                    let mut col: Vec<f64> = (0..n).map(|j| p[j * n + r]).collect();
                    col.sort_by(|x, y| y.total_cmp(x));
                    for (j, v) in col.into_iter().enumerate() {
                        p[j * n + r] = v;
                    }
                }
            }
            return Self::from_flat(n, p);
        }
    }

    // ---- I/O --------------------------------------------------------------

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(s.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("'{f}' is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    /// CSV with shortest round-tripping decimal representation.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self.clone())).expect("matrix serializes")
    }

    pub fn load(path: impl AsRef<Path>, format: MatrixFormat) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match format {
            MatrixFormat::Csv => Self::from_csv_str(&text),
            MatrixFormat::Json => Self::from_json_str(&text),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
        let text = match format {
            MatrixFormat::Csv => self.to_csv_string(),
            MatrixFormat::Json => self.to_json_string(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// A matrix generator written as a short string:
///
/// * `constant:n:p`
/// * `identity:n`
/// * `random:n:seed` or `random:n:seed:monotone-cols`
/// * `matching:a=2/3,b=3/2` (block sizes separated by `/`)
/// * `matching:d=2,m=3` (`m` blocks of size `d`)
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Constant { n: usize, p: f64 },
    Identity { n: usize },
    Random { n: usize, seed: u64, column_monotone: bool },
    Matching { a: Vec<usize>, b: Vec<usize> },
    MatchingUniform { d: usize, m: usize },
}

fn parse_num<T: FromStr>(what: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("invalid {what} '{s}'")))
}

fn parse_blocks(s: &str) -> Result<Vec<usize>> {
    s.split('/').map(|x| parse_num("block size", x)).collect()
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || Error::Parse(format!("malformed generator '{s}'"));
        match kind {
            "constant" if parts.len() == 2 => Ok(Self::Constant {
                n: parse_num("size", parts[0])?,
                p: parse_num("probability", parts[1])?,
            }),
            "identity" if parts.len() == 1 => Ok(Self::Identity { n: parse_num("size", parts[0])? }),
            "random" if parts.len() == 2 || parts.len() == 3 => {
                let column_monotone = match parts.get(2) {
                    None => false,
                    Some(&"monotone-cols") => true,
                    Some(_) => return Err(bad()),
                };
                Ok(Self::Random { n: parse_num("size", parts[0])?, seed: parse_num("seed", parts[1])?, column_monotone })
            }
            "matching" if parts.len() == 1 => {
                let mut kv = std::collections::BTreeMap::new();
                for item in rest.split(',') {
                    let (k, v) = item.split_once('=').ok_or_else(bad)?;
                    if kv.insert(k.trim(), v.trim()).is_some() {
                        return Err(bad());
                    }
                }
                let keys: Vec<&str> = kv.keys().copied().collect();
                match keys.as_slice() {
                    ["a", "b"] => Ok(Self::Matching { a: parse_blocks(kv["a"])?, b: parse_blocks(kv["b"])? }),
                    ["d", "m"] => Ok(Self::MatchingUniform {
                        d: parse_num("block size", kv["d"])?,
                        m: parse_num("block count", kv["m"])?,
                    }),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<BernoulliMatrix> {
        match self {
            Self::Constant { n, p } => BernoulliMatrix::constant(*n, *p),
            Self::Identity { n } => BernoulliMatrix::identity(*n),
            Self::Random { n, seed, column_monotone } => BernoulliMatrix::random(*n, *seed, *column_monotone),
            Self::Matching { a, b } => BernoulliMatrix::matching(a, b),
            Self::MatchingUniform { d, m } => BernoulliMatrix::matching_uniform(*d, *m),
        }
    }
}

/// Which rows and columns of the matrix take part in a (sub-)model.
///
/// The model is `Σ_{i ∈ active_rows ∖ ones_rows} X_{i,σ(i)}` with `σ` a
/// uniform bijection `active_rows → active_cols`. Rows in `ones_rows` are
/// still matched to a column, they just contribute no summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSelection {
    pub active_rows: Vec<usize>,
    pub active_cols: Vec<usize>,
    pub ones_rows: Vec<usize>,
}

impl IndexSelection {
    /// Every row and column, no ones rows.
    pub fn full(n: usize) -> Self {
        Self {
            active_rows: (0..n).collect(),
            active_cols: (0..n).collect(),
            ones_rows: Vec::new(),
        }
    }

    /// Full permutation, but the rows in `exclude` contribute nothing
    /// (`S_n^{(j)}`, `S_n^{(j,k)}`).
    pub fn leave_out(n: usize, exclude: &[usize]) -> Self {
        let mut sel = Self::full(n);
        sel.ones_rows = exclude.to_vec();
        sel.ones_rows.sort_unstable();
        sel
    }

    /// Deletes `rows` and `cols`, and marks `ones` among the remaining rows as
    /// non-contributing. `(T'_{j,r})^B` is `injection(n, &[j], &[r], B)`.
    pub fn injection(n: usize, rows: &[usize], cols: &[usize], ones: &[usize]) -> Self {
        let mut ones = ones.to_vec();
        ones.sort_unstable();
        Self {
            active_rows: (0..n).filter(|i| !rows.contains(i)).collect(),
            active_cols: (0..n).filter(|i| !cols.contains(i)).collect(),
            ones_rows: ones,
        }
    }

    /// Number of matched rows (`|active_rows|`).
    pub fn size(&self) -> usize {
        self.active_rows.len()
    }

    /// Number of rows that contribute a summand.
    pub fn summand_count(&self) -> usize {
        self.active_rows.len() - self.ones_rows.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.active_rows.len() != self.active_cols.len() {
            return Err(Error::Shape(format!(
                "{} active rows but {} active columns",
                self.active_rows.len(),
                self.active_cols.len()
            )));
        }
        let check = |name: &str, idx: &[usize]| -> Result<()> {
            let mut seen = vec![false; n];
            for &i in idx {
                if i >= n {
                    return Err(Error::Shape(format!("{name} index {i} out of range for n = {n}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Shape(format!("{name} index {i} repeated")));
                }
            }
            Ok(())
        };
        check("row", &self.active_rows)?;
        check("column", &self.active_cols)?;
        check("ones-row", &self.ones_rows)?;
        if let Some(&o) = self.ones_rows.iter().find(|o| !self.active_rows.contains(o)) {
            return Err(Error::Shape(format!("ones-row {o} is not an active row")));
        }
        Ok(())
    }
}

/// The square sub-model induced by an [`IndexSelection`]. `rows[i]` is `None`
/// for a ones row, otherwise the probabilities over the active columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubModel {
    pub rows: Vec<Option<Vec<f64>>>,
}

impl SubModel {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn summand_count(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }
}

/// Restricts `m` to the rows and columns of `sel`.
pub fn select(m: &BernoulliMatrix, sel: &IndexSelection) -> Result<SubModel> {
    sel.validate(m.n())?;
    let rows = sel
        .active_rows
        .iter()
        .map(|&j| {
            if sel.ones_rows.contains(&j) {
                None
            } else {
                Some(sel.active_cols.iter().map(|&r| m.get(j, r)).collect())
            }
        })
        .collect();
    Ok(SubModel { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn generator_specs() {
        let build = |s: &str| s.parse::<GeneratorSpec>().and_then(|g| g.build());
        assert_eq!(build("constant:6:0.3").unwrap(), BernoulliMatrix::constant(6, 0.3).unwrap());
        assert_eq!(build("identity:4").unwrap(), BernoulliMatrix::identity(4).unwrap());
        assert_eq!(build("random:5:9:monotone-cols").unwrap(), BernoulliMatrix::random(5, 9, true).unwrap());
        assert_eq!(build("matching:d=2,m=3").unwrap(), BernoulliMatrix::matching_uniform(2, 3).unwrap());
        assert_eq!(build("matching:a=2/1,b=1/2").unwrap(), BernoulliMatrix::matching(&[2, 1], &[1, 2]).unwrap());
        for bad in ["constant:6", "identity", "random:5:x", "random:5:1:sorted", "matching:d=2", "matching:a=1,d=2", "zeros:3"] {
            assert!(matches!(bad.parse::<GeneratorSpec>(), Err(Error::Parse(_))), "{bad}");
        }
        assert!(matches!(build("constant:3:1.5"), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_identity() {
        let m = BernoulliMatrix::from_csv_str("1,0\n0,1").unwrap();
        assert_eq!(m, BernoulliMatrix::identity(2).unwrap());
    }

    #[test]
    fn csv_transpose_example() {
        let m = BernoulliMatrix::from_csv_str("1,0.25\n0.75,0.5\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, 0.25], vec![0.75, 0.5]]);
        assert_eq!(m.transpose().to_rows(), vec![vec![1.0, 0.75], vec![0.25, 0.5]]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(BernoulliMatrix::from_csv_str("0,0\n0,0"), Err(Error::Domain(_))));
        assert!(matches!(BernoulliMatrix::from_csv_str("1,0\n0"), Err(Error::Shape(_))));
        assert!(matches!(BernoulliMatrix::from_csv_str("1,0,0\n0,1,0"), Err(Error::Shape(_))));
        assert!(matches!(BernoulliMatrix::from_csv_str("1.5,0\n0,1"), Err(Error::Domain(_))));
        assert!(matches!(BernoulliMatrix::from_csv_str("1"), Err(Error::Domain(_))));
        assert!(matches!(BernoulliMatrix::from_csv_str("a,0\n0,1"), Err(Error::Parse(_))));
        assert!(BernoulliMatrix::from_json_str(r#"{"p": [[0.5, 2.0], [0, 1]]}"#).is_err());
    }

    #[test]
    fn json_format() {
        let m = BernoulliMatrix::from_json_str(r#"{"p": [[1, 0.25], [0.75, 0.5]]}"#).unwrap();
        assert_eq!(m.get(1, 0), 0.75);
        assert_eq!(m.to_json_string(), r#"{"p":[[1.0,0.25],[0.75,0.5]]}"#);
    }

    #[test]
    fn generators() {
        let c = BernoulliMatrix::constant(4, 0.5).unwrap();
        assert!((c.lambda() - 2.0).abs() < 1e-15);
        let ones = BernoulliMatrix::constant(2, 1.0).unwrap();
        assert_eq!(ones.lambda(), 2.0);
        let tiny = BernoulliMatrix::constant(3, 1e-9).unwrap();
        assert!((tiny.lambda() - 3e-9).abs() < 1e-22);
        assert!(matches!(BernoulliMatrix::constant(3, 0.0), Err(Error::Domain(_))));

        let blocks = BernoulliMatrix::matching(&[2, 2], &[2, 2]).unwrap();
        assert_eq!(blocks.lambda(), 2.0);
        let single = BernoulliMatrix::matching(&[4], &[4]).unwrap();
        assert_eq!(single, BernoulliMatrix::constant(4, 1.0).unwrap());
        let unit = BernoulliMatrix::matching_uniform(1, 5).unwrap();
        assert_eq!(unit, BernoulliMatrix::identity(5).unwrap());
        assert!(matches!(BernoulliMatrix::matching(&[2, 1], &[2, 2]), Err(Error::Shape(_))));
    }

    #[test]
    fn matching_margins() {
        let (a, b) = ([1usize, 3, 2], [2usize, 1, 3]);
        let m = BernoulliMatrix::matching(&a, &b).unwrap();
        let mut row = 0;
        for (l, &al) in a.iter().enumerate() {
            for j in row..row + al {
                assert_eq!(m.row(j).iter().sum::<f64>(), b[l] as f64);
            }
            row += al;
        }
        let t = m.transpose();
        let mut col = 0;
        for (l, &bl) in b.iter().enumerate() {
            for r in col..col + bl {
                assert_eq!(t.row(r).iter().sum::<f64>(), a[l] as f64);
            }
            col += bl;
        }
    }

    #[test]
    fn random_is_deterministic_and_monotone() {
        let a = BernoulliMatrix::random(5, 42, false).unwrap();
        assert_eq!(a, BernoulliMatrix::random(5, 42, false).unwrap());
        assert_ne!(a, BernoulliMatrix::random(5, 43, false).unwrap());
        assert!(a.lambda() > 0.0);
        let m = BernoulliMatrix::random(6, 9, true).unwrap();
        for r in 0..6 {
            for j in 0..5 {
                assert!(m.get(j, r) >= m.get(j + 1, r));
            }
        }
    }

    #[test]
    fn selections() {
        let m = BernoulliMatrix::random(4, 1, false).unwrap();
        let full = select(&m, &IndexSelection::full(4)).unwrap();
        assert_eq!(full.rows.iter().flatten().flatten().copied().collect::<Vec<_>>(), m.as_slice());

        let t = select(&m, &IndexSelection::injection(4, &[1], &[2], &[])).unwrap();
        assert_eq!(t.size(), 3);
        assert_eq!(t.rows[1], Some(vec![m.get(2, 0), m.get(2, 1), m.get(2, 3)]));

        let tt = select(&m, &IndexSelection::injection(4, &[0, 3], &[1, 2], &[2])).unwrap();
        assert_eq!(tt.rows, vec![Some(vec![m.get(1, 0), m.get(1, 3)]), None]);

        let bad = IndexSelection { active_rows: vec![0, 1], active_cols: vec![0], ones_rows: vec![] };
        assert!(matches!(select(&m, &bad), Err(Error::Shape(_))));
        let bad = IndexSelection { active_rows: vec![0, 1], active_cols: vec![0, 1], ones_rows: vec![2] };
        assert!(matches!(select(&m, &bad), Err(Error::Shape(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = BernoulliMatrix::random(5, 3, false).unwrap();
        for (fmt, name) in [(MatrixFormat::Csv, "m.csv"), (MatrixFormat::Json, "m.json")] {
            let path = dir.path().join(name);
            m.save(&path, fmt).unwrap();
            let back = BernoulliMatrix::load(&path, fmt).unwrap();
            assert_eq!(back.as_slice(), m.as_slice());
            back.save(&path, fmt).unwrap();
            assert_eq!(std::fs::read_to_string(&path).unwrap(), match fmt {
                MatrixFormat::Csv => m.to_csv_string(),
                MatrixFormat::Json => m.to_json_string(),
            });
        }
    }

    proptest! {
        #[test]
        fn transpose_is_involution(seed in any::<u64>(), n in 2usize..8) {
            let m = BernoulliMatrix::random(n, seed, false).unwrap();
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn csv_round_trip_is_bit_exact(seed in any::<u64>(), n in 2usize..6) {
            let m = BernoulliMatrix::random(n, seed, false).unwrap();
            let back = BernoulliMatrix::from_csv_str(&m.to_csv_string()).unwrap();
            prop_assert_eq!(back.as_slice(), m.as_slice());
        }
    }
}

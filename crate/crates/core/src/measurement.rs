//! Simulated spin-projection experiment.
//!
//! For every ordered pair of analyzer axes `(i, j)` the experiment records a
//! table of `±1` outcome pairs. Correlations are plain averages of products
//! over one table; polarizations are plain averages over the pooled columns,
//! i.e. every recorded projection of that electron on that axis regardless of
//! the partner's axis.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{c, identity2, kron, pauli, Axis, CMatrix2, Particle};
use crate::rng::{seeded, seeded_stream};
use crate::state::DensityMatrix4;
use crate::tensor::{product_tensor, tensor_norm, CorrelationTensor, Polarization, IMAGINARY_RESIDUE_TOL};

/// Negative probabilities down to this value are rounding and get clamped.
pub const PROBABILITY_TOL: f64 = 1e-12;

pub const DEFAULT_BOOTSTRAP_REPLICATES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn value(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Spin> {
        match v {
            1 => Some(Spin::Up),
            -1 => Some(Spin::Down),
            _ => None,
        }
    }
}

/// Joint outcome index: `(+,+), (+,-), (-,+), (-,-)`.
fn outcome_index(s1: Spin, s2: Spin) -> usize {
    match (s1, s2) {
        (Spin::Up, Spin::Up) => 0,
        (Spin::Up, Spin::Down) => 1,
        (Spin::Down, Spin::Up) => 2,
        (Spin::Down, Spin::Down) => 3,
    }
}

const OUTCOMES: [(Spin, Spin); 4] =
    [(Spin::Up, Spin::Up), (Spin::Up, Spin::Down), (Spin::Down, Spin::Up), (Spin::Down, Spin::Down)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeTable {
    axes: (Axis, Axis),
    rows: Vec<(Spin, Spin)>,
}

impl OutcomeTable {
    pub fn new(axes: (Axis, Axis), rows: Vec<(Spin, Spin)>) -> Self {
        OutcomeTable { axes, rows }
    }

    pub fn axes(&self) -> (Axis, Axis) {
        self.axes
    }

    pub fn rows(&self) -> &[(Spin, Spin)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Occurrences of each joint outcome, in `outcome_index` order.
    pub fn outcome_counts(&self) -> [u64; 4] {
        let mut n = [0u64; 4];
        for &(a, b) in &self.rows {
            n[outcome_index(a, b)] += 1;
        }
        n
    }

    pub fn file_name(&self) -> String {
        table_file_name(self.axes.0, self.axes.1)
    }
}

pub fn table_file_name(i: Axis, j: Axis) -> String {
    format!("table_{}{}.csv", i.label(), j.label())
}

/// Tables for all nine axis pairs; `tables[i][j]` has axes `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataMatrix {
    tables: [[OutcomeTable; 3]; 3],
}

impl DataMatrix {
    pub fn new(tables: [[OutcomeTable; 3]; 3]) -> Result<Self> {
        for i in Axis::ALL {
            for j in Axis::ALL {
                let got = tables[i.index()][j.index()].axes;
                if got != (i, j) {
                    return Err(Error::Format(format!(
                        "table at ({i}, {j}) is labelled ({}, {})",
                        got.0, got.1
                    )));
                }
            }
        }
        Ok(DataMatrix { tables })
    }

    pub fn table(&self, i: Axis, j: Axis) -> &OutcomeTable {
        &self.tables[i.index()][j.index()]
    }

    pub fn tables(&self) -> impl Iterator<Item = &OutcomeTable> {
        self.tables.iter().flatten()
    }

    pub fn counts(&self) -> [[usize; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.tables[i][j].len()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PooledColumn {
    pub particle: Particle,
    pub axis: Axis,
    pub values: Vec<Spin>,
}

impl PooledColumn {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PooledColumns {
    /// Particle 1, indexed by its axis: first components across row `i`.
    pub first: [PooledColumn; 3],
    /// Particle 2, indexed by its axis: second components down column `j`.
    pub second: [PooledColumn; 3],
}

impl PooledColumns {
    pub fn iter(&self) -> impl Iterator<Item = &PooledColumn> {
        self.first.iter().chain(self.second.iter())
    }

    pub fn column(&self, particle: Particle, axis: Axis) -> &PooledColumn {
        match particle {
            Particle::First => &self.first[axis.index()],
            Particle::Second => &self.second[axis.index()],
        }
    }
}

pub fn pool_columns(data: &DataMatrix) -> PooledColumns {
    let first = Axis::ALL.map(|i| PooledColumn {
        particle: Particle::First,
        axis: i,
        values: Axis::ALL.iter().flat_map(|&j| data.table(i, j).rows.iter().map(|r| r.0)).collect(),
    });
    let second = Axis::ALL.map(|j| PooledColumn {
        particle: Particle::Second,
        axis: j,
        values: Axis::ALL.iter().flat_map(|&i| data.table(i, j).rows.iter().map(|r| r.1)).collect(),
    });
    PooledColumns { first, second }
}

/// Projector `(I + s σ)/2`.
fn projector(axis: Axis, s: Spin) -> CMatrix2 {
    (identity2() + pauli(axis) * c(s.value() as f64, 0.0)) * c(0.5, 0.0)
}

/// Born probabilities of the four joint outcomes `(+,+), (+,-), (-,+), (-,-)`
/// when electron 1 is analyzed along `i` and electron 2 along `j`.
pub fn outcome_distribution(rho: &DensityMatrix4, i: Axis, j: Axis) -> Result<[f64; 4]> {
    let mut p = [0.0; 4];
    for (k, &(s1, s2)) in OUTCOMES.iter().enumerate() {
        let t = rho.expectation(&kron(&projector(i, s1), &projector(j, s2)));
        if t.im.abs() > IMAGINARY_RESIDUE_TOL {
            return Err(Error::NonHermitianInput { residue: t.im.abs() });
        }
        if t.re < -PROBABILITY_TOL {
            return Err(Error::NegativeProbability(t.re));
        }
        p[k] = t.re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    Ok(p.map(|x| x / total))
}

fn draw<R: Rng + ?Sized>(cumulative: &[f64; 4], rng: &mut R) -> (Spin, Spin) {
    let u: f64 = rng.random();
    let k = cumulative.iter().position(|&c| u < c).unwrap_or_else(|| {
        // u landed in the rounding gap above the last cumulative value; take
        // the last outcome with positive weight.
        (0..4).rev().find(|&k| k == 0 || cumulative[k] > cumulative[k - 1]).unwrap()
    });
    OUTCOMES[k]
}

pub fn sample_table_with<R: Rng + ?Sized>(
    rho: &DensityMatrix4,
    i: Axis,
    j: Axis,
    m: usize,
    rng: &mut R,
) -> Result<OutcomeTable> {
    if m == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let p = outcome_distribution(rho, i, j)?;
    let mut cumulative = [0.0; 4];
    let mut acc = 0.0;
    for k in 0..4 {
        acc += p[k];
        cumulative[k] = acc;
    }
    let rows = (0..m).map(|_| draw(&cumulative, rng)).collect();
    Ok(OutcomeTable::new((i, j), rows))
}

/// `m` independent joint measurements along `(i, j)`, ChaCha20 seeded with
/// `seed`.
pub fn sample_table(rho: &DensityMatrix4, i: Axis, j: Axis, m: usize, seed: u64) -> Result<OutcomeTable> {
    sample_table_with(rho, i, j, m, &mut seeded(seed))
}

/// All nine tables with `m_per_pair` rows each. Table `(i, j)` draws from
/// ChaCha20 stream `3i + j` of `seed`.
pub fn simulate_data(rho: &DensityMatrix4, m_per_pair: usize, seed: u64) -> Result<DataMatrix> {
    let tables: Vec<OutcomeTable> = (0..9usize)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (Axis::ALL[k / 3], Axis::ALL[k % 3]);
            sample_table_with(rho, i, j, m_per_pair, &mut seeded_stream(seed, k as u64))
        })
        .collect::<Result<_>>()?;
    let mut it = tables.into_iter();
    let tables = std::array::from_fn(|_| std::array::from_fn(|_| it.next().unwrap()));
    DataMatrix::new(tables)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bootstrap {
    pub replicates: usize,
    pub seed: u64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Bootstrap { replicates: DEFAULT_BOOTSTRAP_REPLICATES, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub t_hat: CorrelationTensor,
    pub p1_hat: Polarization,
    pub p2_hat: Polarization,
    pub e_hat: f64,
    pub e_stderr: f64,
    pub counts: [[usize; 3]; 3],
}

fn mean_of(values: impl Iterator<Item = i8>, n: usize) -> f64 {
    values.map(i64::from).sum::<i64>() as f64 / n as f64
}

/// Plain-average estimators over the data matrix, with a bootstrap standard
/// error for `e_hat`.
pub fn estimate(data: &DataMatrix, bootstrap: &Bootstrap) -> Result<EstimationReport> {
    for t in data.tables() {
        if t.is_empty() {
            return Err(Error::EmptyTable(t.axes.0, t.axes.1));
        }
    }
    let mut t_hat = Matrix3::zeros();
    for i in Axis::ALL {
        for j in Axis::ALL {
            let tab = data.table(i, j);
            t_hat[(i.index(), j.index())] =
                mean_of(tab.rows.iter().map(|&(a, b)| a.value() * b.value()), tab.len());
        }
    }
    let pooled = pool_columns(data);
    let pol = |cols: &[PooledColumn; 3]| {
        Polarization(Vector3::from_fn(|k, _| {
            mean_of(cols[k].values.iter().map(|s| s.value()), cols[k].count())
        }))
    };
    let t_hat = CorrelationTensor(t_hat);
    let p1_hat = pol(&pooled.first);
    let p2_hat = pol(&pooled.second);
    let e_hat = tensor_norm(&(t_hat - product_tensor(&p1_hat, &p2_hat)));

    let counts = outcome_counts(data);
    let e_stderr = bootstrap_stderr(&counts, bootstrap)?;
    Ok(EstimationReport { t_hat, p1_hat, p2_hat, e_hat, e_stderr, counts: data.counts() })
}

type OutcomeCounts = [[[u64; 4]; 3]; 3];

fn outcome_counts(data: &DataMatrix) -> OutcomeCounts {
    std::array::from_fn(|i| std::array::from_fn(|j| data.tables[i][j].outcome_counts()))
}

/// The same estimators computed from outcome counts alone. Used by the
/// bootstrap, where a resampled table is fully described by its counts.
pub fn estimate_from_counts(counts: &[[[u64; 4]; 3]; 3]) -> (CorrelationTensor, Polarization, Polarization, f64) {
    let mut t = Matrix3::zeros();
    let mut s1 = [0i64; 3];
    let mut n1 = [0u64; 3];
    let mut s2 = [0i64; 3];
    let mut n2 = [0u64; 3];
    for i in 0..3 {
        for j in 0..3 {
            let [pp, pm, mp, mm] = counts[i][j].map(|x| x as i64);
            let m = pp + pm + mp + mm;
            t[(i, j)] = (pp - pm - mp + mm) as f64 / m as f64;
            s1[i] += pp + pm - mp - mm;
            n1[i] += m as u64;
            s2[j] += pp - pm + mp - mm;
            n2[j] += m as u64;
        }
    }
    let p1 = Polarization(Vector3::from_fn(|k, _| s1[k] as f64 / n1[k] as f64));
    let p2 = Polarization(Vector3::from_fn(|k, _| s2[k] as f64 / n2[k] as f64));
    let t = CorrelationTensor(t);
    let e = tensor_norm(&(t - product_tensor(&p1, &p2)));
    (t, p1, p2, e)
}

/// Multinomial draw of `n` items over four categories via chained binomials.
fn multinomial<R: Rng + ?Sized>(n: u64, weights: &[u64; 4], rng: &mut R) -> Result<[u64; 4]> {
    let mut out = [0u64; 4];
    let mut left_n = n;
    let mut left_w: u64 = weights.iter().sum();
    for k in 0..3 {
        if left_n == 0 || left_w == 0 {
            break;
        }
        let p = (weights[k] as f64 / left_w as f64).clamp(0.0, 1.0);
        let draw = Binomial::new(left_n, p)
            .map_err(|e| Error::Domain(format!("bootstrap binomial: {e}")))?
            .sample(rng);
        out[k] = draw;
        left_n -= draw;
        left_w -= weights[k];
    }
    out[3] = left_n;
    Ok(out)
}

/// Resamples rows within each table independently and reports the sample
/// standard deviation of the replicate estimates. Resampling rows with
/// replacement is equivalent in law to a multinomial draw over the table's
/// outcome frequencies, which is what is drawn here.
fn bootstrap_stderr(counts: &OutcomeCounts, bootstrap: &Bootstrap) -> Result<f64> {
    if bootstrap.replicates < 2 {
        return Ok(0.0);
    }
    let replicates: Vec<f64> = (0..bootstrap.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_stream(bootstrap.seed, r as u64);
            let mut resampled = [[[0u64; 4]; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let n: u64 = counts[i][j].iter().sum();
                    resampled[i][j] = multinomial(n, &counts[i][j], &mut rng)?;
                }
            }
            Ok(estimate_from_counts(&resampled).3)
        })
        .collect::<Result<_>>()?;
    let n = replicates.len() as f64;
    let mean = replicates.iter().sum::<f64>() / n;
    let var = replicates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Samples all nine tables and estimates from them.
pub fn run_experiment(
    rho: &DensityMatrix4,
    m_per_pair: usize,
    seed: u64,
    bootstrap: &Bootstrap,
) -> Result<EstimationReport> {
    estimate(&simulate_data(rho, m_per_pair, seed)?, bootstrap)
}

/// Writes one `table_<i><j>.csv` per axis pair, columns `s1,s2`.
pub fn write_tables(dir: &Path, data: &DataMatrix) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(9);
    for t in data.tables() {
        let path = dir.join(t.file_name());
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        w.write_record(["s1", "s2"])?;
        for &(a, b) in &t.rows {
            w.write_record([a.value().to_string(), b.value().to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_table(path: &Path, axes: (Axis, Axis)) -> Result<OutcomeTable> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "s1" || &headers[1] != "s2" {
        return Err(Error::Format(format!("{}: expected header 's1,s2'", path.display())));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<Spin> {
            rec.get(k)
                .and_then(|s| s.trim().parse::<i64>().ok())
                .and_then(Spin::from_value)
                .ok_or_else(|| {
                    Error::Format(format!("{}: row {} is not a pair of ±1 values", path.display(), line + 1))
                })
        };
        rows.push((parse(0)?, parse(1)?));
    }
    Ok(OutcomeTable::new(axes, rows))
}

/// Reads the nine `table_<i><j>.csv` files from `dir`.
pub fn read_tables(dir: &Path) -> Result<DataMatrix> {
    let tables: Vec<OutcomeTable> = (0..9)
        .map(|k| {
            let (i, j) = (Axis::ALL[k / 3], Axis::ALL[k % 3]);
            read_table(&dir.join(table_file_name(i, j)), (i, j))
        })
        .collect::<Result<_>>()?;
    let mut it = tables.into_iter();
    DataMatrix::new(std::array::from_fn(|_| std::array::from_fn(|_| it.next().unwrap())))
}

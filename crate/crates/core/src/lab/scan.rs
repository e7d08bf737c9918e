//! Randomized degeneration scans: sweep linear subspaces of increasing
//! dimension, looking for points where the left map drops rank, and read
//! off a codimension estimate for the singular locus.
//!
//! A dimension "registers" when enough of its sampled subspaces contain a
//! rank-drop point.  Generic subspaces of dimension d meet a locus of
//! codimension d or less, so the least registering dimension estimates
//! the codimension.  The threshold of one hit subspace in eight filters
//! out stray incidences one dimension early, which over a prime field
//! happen at rate roughly 1/p per subspace.

use super::field::{Field, LabError, PrimeField};
use super::monad::ExplicitMonad;
use crate::par::{map_indexed, Exec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

const POINTS_PER_DIM_CAP: u128 = 4_000_000;
const EXHAUSTIVE_CAP: u128 = 2_000_000;
const SAMPLE_POINTS: u64 = 200_000;
const CHUNK: u64 = 8192;

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub seed: u64,
    /// Subspace dimensions to sweep; defaults to everything up to the
    /// ambient dimension.
    pub dims: Option<Vec<u32>>,
    pub subspaces_per_dim: u32,
    pub exec: Exec,
}

impl ScanConfig {
    pub fn new(seed: u64) -> ScanConfig {
        ScanConfig {
            seed,
            dims: None,
            subspaces_per_dim: 64,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimScan {
    pub d: u32,
    pub subspaces: u32,
    pub hit_subspaces: u32,
    pub alpha_hits: u64,
    pub beta_drops: u64,
    pub points: u64,
    pub exhaustive: bool,
}

impl DimScan {
    /// Whether this dimension counts as meeting the singular locus.
    pub fn registers(&self) -> bool {
        if self.subspaces >= 8 {
            (self.hit_subspaces as u64) * 8 >= self.subspaces as u64
        } else {
            self.alpha_hits > 0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    InvalidMonad,
    LocallyFreeLikely,
    ReflexiveLikely,
    TorsionFreeLikely,
    TorsionPossible,
}

impl fmt::Display for Classification {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::InvalidMonad => "invalid-monad",
            Classification::LocallyFreeLikely => "locally-free-likely",
            Classification::ReflexiveLikely => "reflexive-likely",
            Classification::TorsionFreeLikely => "torsion-free-likely",
            Classification::TorsionPossible => "torsion-possible",
        };
        write!(out, "{s}")
    }
}

/// Map a rank-drop survey to a label.  A right-map drop anywhere kills
/// the monad; otherwise the estimated codimension of the left-map locus
/// decides how far from locally free the cohomology sheaf can be.
pub fn classify(beta_drop: bool, codim_estimate: Option<u32>) -> Classification {
    if beta_drop {
        return Classification::InvalidMonad;
    }
    match codim_estimate {
        None => Classification::LocallyFreeLikely,
        Some(q) if q >= 3 => Classification::ReflexiveLikely,
        Some(2) => Classification::TorsionFreeLikely,
        Some(_) => Classification::TorsionPossible,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub p: u64,
    pub seed: u64,
    pub scans: Vec<DimScan>,
    pub codim_estimate: Option<u32>,
    pub beta_drop: bool,
    pub classification: Classification,
}

struct SubOutcome {
    alpha_hits: u64,
    beta_drops: u64,
    points: u64,
}

/// Reusable buffers for evaluating both maps at a point and testing for
/// rank drops; keeps the inner loop allocation-free.
struct Probe<'m> {
    m: &'m ExplicitMonad<PrimeField>,
    abuf: Vec<u64>,
    bbuf: Vec<u64>,
}

impl<'m> Probe<'m> {
    fn new(m: &'m ExplicitMonad<PrimeField>) -> Probe<'m> {
        Probe {
            m,
            abuf: Vec::with_capacity((m.b * m.a) as usize),
            bbuf: Vec::with_capacity((m.c * m.b) as usize),
        }
    }

    fn probe(&mut self, pt: &[u64]) -> (bool, bool) {
        let f = &self.m.field;
        let (a, b, c) = (self.m.a as usize, self.m.b as usize, self.m.c as usize);
        let mut alpha_drop = false;
        if a > 0 {
            self.abuf.clear();
            for row in &self.m.alpha {
                for form in row {
                    self.abuf.push(form.eval(f, pt));
                }
            }
            alpha_drop = f.mat_rank(b, a, &mut self.abuf) < a;
        }
        let mut beta_drop = false;
        if c > 0 {
            self.bbuf.clear();
            for row in &self.m.beta {
                for form in row {
                    self.bbuf.push(form.eval(f, pt));
                }
            }
            beta_drop = f.mat_rank(c, b, &mut self.bbuf) < c;
        }
        (alpha_drop, beta_drop)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn stream_seed(seed: u64, d: u32, i: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((d as u64) << 40) ^ i as u64))
}

fn proj_points(p: u128, d: u32) -> u128 {
    let mut total = 0u128;
    let mut pw = 1u128;
    for _ in 0..=d {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(p);
    }
    total
}

/// Sweep the monad for rank degeneration and classify what the pattern
/// of hits says about its cohomology sheaf.  Deterministic in the seed,
/// in either execution lane.
pub fn degeneration_scan(
    m: &ExplicitMonad<PrimeField>,
    cfg: &ScanConfig,
) -> Result<DegenerationReport, LabError> {
    m.validate()?;
    let n = m.n;
    let p = m.field.modulus();
    let dims: Vec<u32> = match &cfg.dims {
        Some(ds) => {
            let mut ds: Vec<u32> = ds.iter().copied().filter(|&d| d <= n).collect();
            ds.sort_unstable();
            ds.dedup();
            ds
        }
        None => (0..=n).collect(),
    };
    let mut scans = Vec::with_capacity(dims.len());
    for &d in &dims {
        let scan = if d == n {
            whole_space_scan(m, cfg)?
        } else {
            subspace_scan(m, cfg, d)?
        };
        scans.push(scan);
    }
    let beta_drop = scans.iter().any(|s| s.beta_drops > 0);
    let codim_estimate = scans.iter().find(|s| s.registers()).map(|s| s.d);
    let classification = classify(beta_drop, codim_estimate);
    Ok(DegenerationReport {
        p,
        seed: cfg.seed,
        scans,
        codim_estimate,
        beta_drop,
        classification,
    })
}

fn subspace_scan(
    m: &ExplicitMonad<PrimeField>,
    cfg: &ScanConfig,
    d: u32,
) -> Result<DimScan, LabError> {
    let f = &m.field;
    let p = f.modulus();
    let n = m.n;
    let per = proj_points(p as u128, d);
    let sampled = per > POINTS_PER_DIM_CAP;
    let subspaces = if sampled {
        1
    } else {
        let budget = (POINTS_PER_DIM_CAP / per.max(1)).max(1);
        (cfg.subspaces_per_dim as u128).min(budget) as usize
    };
    let results = map_indexed(cfg.exec, subspaces, |i| -> Result<SubOutcome, LabError> {
        let seed = stream_seed(cfg.seed, d, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (d + 1) as usize;
        let cols = (n + 1) as usize;
        let mat = sample_full_rank(f, rows, cols, seed, &mut rng)?;
        let mut probe = Probe::new(m);
        let mut out = SubOutcome {
            alpha_hits: 0,
            beta_drops: 0,
            points: 0,
        };
        let mut pt = vec![0u64; cols];
        let mut coords = vec![0u64; rows];
        if sampled {
            for _ in 0..SAMPLE_POINTS {
                loop {
                    for slot in coords.iter_mut() {
                        *slot = rng.gen_range(0..p);
                    }
                    if coords.iter().any(|&x| x != 0) {
                        break;
                    }
                }
                map_to_ambient(f, &coords, &mat, cols, &mut pt);
                tally(&mut probe, &pt, &mut out);
            }
        } else {
            for l in 0..rows {
                let tail = (rows - l - 1) as u32;
                let total = (p as u128).pow(tail) as u64;
                for raw in 0..total {
                    let mut x = raw;
                    for slot in coords.iter_mut().take(l) {
                        *slot = 0;
                    }
                    coords[l] = 1;
                    for j in (l + 1..rows).rev() {
                        coords[j] = x % p;
                        x /= p;
                    }
                    map_to_ambient(f, &coords, &mat, cols, &mut pt);
                    tally(&mut probe, &pt, &mut out);
                }
            }
        }
        Ok(out)
    });
    let mut scan = DimScan {
        d,
        subspaces: subspaces as u32,
        hit_subspaces: 0,
        alpha_hits: 0,
        beta_drops: 0,
        points: 0,
        exhaustive: false,
    };
    for r in results {
        let r = r?;
        if r.alpha_hits > 0 {
            scan.hit_subspaces += 1;
        }
        scan.alpha_hits += r.alpha_hits;
        scan.beta_drops += r.beta_drops;
        scan.points += r.points;
    }
    Ok(scan)
}

fn whole_space_scan(
    m: &ExplicitMonad<PrimeField>,
    cfg: &ScanConfig,
) -> Result<DimScan, LabError> {
    let f = &m.field;
    let p = f.modulus();
    let n = m.n;
    let vars = (n + 1) as usize;
    let total = proj_points(p as u128, n);
    let exhaustive = total <= EXHAUSTIVE_CAP;
    let (count, chunks) = if exhaustive {
        let count = total as u64;
        (count, count.div_ceil(CHUNK) as usize)
    } else {
        (SAMPLE_POINTS, SAMPLE_POINTS.div_ceil(CHUNK) as usize)
    };
    let results = map_indexed(cfg.exec, chunks, |ci| {
        let start = ci as u64 * CHUNK;
        let end = (start + CHUNK).min(count);
        let mut probe = Probe::new(m);
        let mut out = SubOutcome {
            alpha_hits: 0,
            beta_drops: 0,
            points: 0,
        };
        let mut pt = vec![0u64; vars];
        if exhaustive {
            for idx in start..end {
                decode_point(n, p, idx, &mut pt);
                tally(&mut probe, &pt, &mut out);
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, n, ci));
            for _ in start..end {
                loop {
                    for slot in pt.iter_mut() {
                        *slot = rng.gen_range(0..p);
                    }
                    if pt.iter().any(|&x| x != 0) {
                        break;
                    }
                }
                tally(&mut probe, &pt, &mut out);
            }
        }
        out
    });
    let mut scan = DimScan {
        d: n,
        subspaces: 1,
        hit_subspaces: 0,
        alpha_hits: 0,
        beta_drops: 0,
        points: 0,
        exhaustive,
    };
    for r in results {
        scan.alpha_hits += r.alpha_hits;
        scan.beta_drops += r.beta_drops;
        scan.points += r.points;
    }
    if scan.alpha_hits > 0 {
        scan.hit_subspaces = 1;
    }
    Ok(scan)
}

fn map_to_ambient(f: &PrimeField, coords: &[u64], mat: &[u64], cols: usize, pt: &mut [u64]) {
    for (v, slot) in pt.iter_mut().enumerate() {
        let mut acc = 0u64;
        for (j, &cj) in coords.iter().enumerate() {
            acc = f.add(&acc, &f.mul(&cj, &mat[j * cols + v]));
        }
        *slot = acc;
    }
}

fn tally(probe: &mut Probe, pt: &[u64], out: &mut SubOutcome) {
    let (ah, bd) = probe.probe(pt);
    out.points += 1;
    if ah {
        out.alpha_hits += 1;
    }
    if bd {
        out.beta_drops += 1;
    }
}

/// Representatives of projective points, indexed by leading coordinate:
/// class l holds the points whose first nonzero coordinate is the l-th,
/// normalized to one, with p^(n-l) members.
fn decode_point(n: u32, p: u64, mut idx: u64, out: &mut [u64]) {
    let vars = (n + 1) as usize;
    let mut l = 0usize;
    loop {
        let size = p.pow((vars - l - 1) as u32);
        if idx < size {
            break;
        }
        idx -= size;
        l += 1;
    }
    for slot in out.iter_mut() {
        *slot = 0;
    }
    out[l] = 1;
    for j in (l + 1..vars).rev() {
        out[j] = idx % p;
        idx /= p;
    }
}

fn sample_full_rank(
    f: &PrimeField,
    rows: usize,
    cols: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>, LabError> {
    let p = f.modulus();
    for _ in 0..64 {
        let mat: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        let mut check = mat.clone();
        if f.mat_rank(rows, cols, &mut check) == rows {
            return Ok(mat);
        }
    }
    Err(LabError::ResampleBudget { tries: 64, seed })
}

//! Sampling node sets: perturbed integer lattices over a finite window,
//! their enumeration, deviation statistics, and geometric diagnostics.
//!
//! A node set pairs each lattice point `n_k` of the cube `{-W..W}^d` with a
//! real sampling node `t_k`. The enumeration is fixed once and for all:
//! ascending max-norm shells, ties broken lexicographically, so the leading
//! `l` entries always form a symmetric window around the origin. Infinite
//! sequences are represented by a finite window plus the generating mode;
//! tails beyond the window are implied analytically, never stored.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hard cap on `(2W+1)^d` so a typo in `W` or `d` fails fast instead of
/// exhausting memory.
pub const MAX_ENTRIES: usize = 1 << 20;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NodeError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("window produces {count} entries, exceeding the maximum of {max}")]
    WindowTooLarge { count: u128, max: usize },
    #[error("invalid perturbation parameter: {0}")]
    InvalidMode(String),
    #[error("node set is empty")]
    Empty,
    #[error("need at least two entries, got {0}")]
    TooFewEntries(usize),
    #[error(
        "search window [{lo}, {hi}] leaves the node hull [{hull_lo}, {hull_hi}] on axis {axis}"
    )]
    WindowOutsideHull {
        axis: usize,
        lo: f64,
        hi: f64,
        hull_lo: f64,
        hull_hi: f64,
    },
    #[error("grid resolution must be positive and finite")]
    BadResolution,
    #[error("truncation level {level} exceeds entry count {count}")]
    BadTruncation { level: usize, count: usize },
    #[error("node coordinate is not finite at entry {0}")]
    NonFiniteNode(usize),
    #[error("entries do not enumerate the cube: {0}")]
    BadEnumeration(String),
    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// One row of a node set: 1-based index, lattice point, and sampling node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEntry {
    pub index: usize,
    pub lattice: Vec<i64>,
    pub node: Vec<f64>,
}

/// How the sampling nodes deviate from the lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbMode {
    /// Every coordinate of every node shifted by the same `delta`.
    Constant { delta: f64 },
    /// Shift `delta * rho^r` on shell `r`, applied to every coordinate.
    Decaying { delta: f64, rho: f64 },
    /// Independent uniform shifts in `[-delta, delta]^d`, reproducible from
    /// the seed.
    RandomUniform { delta: f64, seed: u64 },
    /// One-dimensional: the origin node moves to `displacement`, everything
    /// else stays on the lattice.
    SingleDisplaced { displacement: f64 },
}

/// Sup deviation and per-shell tail deviations of a node set.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationStats {
    /// `max_k ||t_k - n_k||_inf` over the window.
    pub sup_dev: f64,
    /// `(r, max deviation over shells >= r)` for `r = 0..=W`; nonincreasing.
    pub tail_dev: Vec<(i64, f64)>,
}

/// Minimum pairwise node distance and the derived separation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationGap {
    pub gap: f64,
    /// Half the gap.
    pub separation_radius: f64,
    /// Set when two nodes coincide exactly.
    pub duplicate: bool,
}

/// Finite window of lattice points paired with perturbed sampling nodes.
///
/// Immutable after construction; all methods take `&self`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dim: usize,
    window_radius: i64,
    entries: Vec<NodeEntry>,
}

impl NodeSet {
    /// Unperturbed lattice window: `t_k = n_k` on `{-W..W}^d`.
    pub fn lattice(dim: usize, window_radius: i64) -> Result<Self, NodeError> {
        let lattice = enumerate_cube(dim, window_radius)?;
        let entries = lattice
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                let node = n.iter().map(|&c| c as f64).collect();
                NodeEntry {
                    index: i + 1,
                    lattice: n,
                    node,
                }
            })
            .collect();
        Ok(Self {
            dim,
            window_radius,
            entries,
        })
    }

    /// Perturbed lattice window; deviations follow `mode` exactly.
    pub fn perturbed(
        dim: usize,
        window_radius: i64,
        mode: &PerturbMode,
    ) -> Result<Self, NodeError> {
        match mode {
            PerturbMode::Constant { delta } => {
                if *delta < 0.0 || !delta.is_finite() {
                    return Err(NodeError::InvalidMode(format!("delta = {delta}")));
                }
            }
            PerturbMode::Decaying { delta, rho } => {
                if *delta < 0.0 || !delta.is_finite() {
                    return Err(NodeError::InvalidMode(format!("delta = {delta}")));
                }
                if !(*rho > 0.0 && *rho < 1.0) {
                    return Err(NodeError::InvalidMode(format!("rho = {rho} not in (0, 1)")));
                }
            }
            PerturbMode::RandomUniform { delta, .. } => {
                if *delta < 0.0 || !delta.is_finite() {
                    return Err(NodeError::InvalidMode(format!("delta = {delta}")));
                }
            }
            PerturbMode::SingleDisplaced { displacement } => {
                if dim != 1 {
                    return Err(NodeError::InvalidMode(
                        "single-displaced mode is one-dimensional".into(),
                    ));
                }
                let d = *displacement;
                if !d.is_finite() || (d != 0.0 && d == d.round()) {
                    return Err(NodeError::InvalidMode(format!(
                        "displacement {d} must not be a nonzero integer"
                    )));
                }
            }
        }
        let mut set = Self::lattice(dim, window_radius)?;
        match mode {
            PerturbMode::Constant { delta } => {
                for e in &mut set.entries {
                    for c in &mut e.node {
                        *c += delta;
                    }
                }
            }
            PerturbMode::Decaying { delta, rho } => {
                for e in &mut set.entries {
                    let shell = shell_radius(&e.lattice);
                    let shift = delta * rho.powi(shell as i32);
                    for c in &mut e.node {
                        *c += shift;
                    }
                }
            }
            PerturbMode::RandomUniform { delta, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for e in &mut set.entries {
                    for c in &mut e.node {
                        let u: f64 = rng.gen();
                        *c += delta * (2.0 * u - 1.0);
                    }
                }
            }
            PerturbMode::SingleDisplaced { displacement } => {
                set.entries[0].node[0] = *displacement;
            }
        }
        Ok(set)
    }

    /// Rebuilds a node set from explicit entries, revalidating every
    /// enumeration invariant. This is what the CSV reader goes through.
    pub fn from_entries(dim: usize, entries: Vec<NodeEntry>) -> Result<Self, NodeError> {
        if dim == 0 {
            return Err(NodeError::ZeroDimension);
        }
        if entries.is_empty() {
            return Err(NodeError::Empty);
        }
        let window_radius = entries
            .iter()
            .map(|e| shell_radius(&e.lattice))
            .max()
            .unwrap();
        let expected = enumerate_cube(dim, window_radius)?;
        if expected.len() != entries.len() {
            return Err(NodeError::BadEnumeration(format!(
                "expected {} entries for window radius {window_radius}, got {}",
                expected.len(),
                entries.len()
            )));
        }
        for (i, (e, want)) in entries.iter().zip(expected.iter()).enumerate() {
            if e.index != i + 1 {
                return Err(NodeError::BadEnumeration(format!(
                    "index {} at position {}",
                    e.index,
                    i + 1
                )));
            }
            if e.lattice.len() != dim || e.node.len() != dim {
                return Err(NodeError::BadEnumeration(format!(
                    "entry {} has wrong dimension",
                    e.index
                )));
            }
            if &e.lattice != want {
                return Err(NodeError::BadEnumeration(format!(
                    "lattice point {:?} at index {} (expected {:?})",
                    e.lattice, e.index, want
                )));
            }
            if e.node.iter().any(|c| !c.is_finite()) {
                return Err(NodeError::NonFiniteNode(e.index));
            }
        }
        Ok(Self {
            dim,
            window_radius,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window_radius(&self) -> i64 {
        self.window_radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[NodeEntry] {
        &self.entries
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.entries[k].node
    }

    /// Exact deviation statistics over the window, with one tail value per
    /// shell radius.
    pub fn deviation_stats(&self) -> DeviationStats {
        let mut sup_dev = 0.0f64;
        let w = self.window_radius;
        let mut shell_max = vec![0.0f64; (w + 1) as usize];
        for e in &self.entries {
            let dev = e
                .lattice
                .iter()
                .zip(e.node.iter())
                .map(|(&n, &t)| (t - n as f64).abs())
                .fold(0.0f64, f64::max);
            sup_dev = sup_dev.max(dev);
            let r = shell_radius(&e.lattice) as usize;
            shell_max[r] = shell_max[r].max(dev);
        }
        // Suffix maxima: tail at r covers every shell >= r.
        let mut tail_dev = vec![(0i64, 0.0f64); (w + 1) as usize];
        let mut running = 0.0f64;
        for r in (0..=w).rev() {
            running = running.max(shell_max[r as usize]);
            tail_dev[r as usize] = (r, running);
        }
        DeviationStats { sup_dev, tail_dev }
    }

    /// Minimum pairwise Euclidean distance between nodes; zero distance is
    /// reported, not an error, with the duplicate flag set.
    pub fn separation_gap(&self) -> Result<SeparationGap, NodeError> {
        if self.entries.len() < 2 {
            return Err(NodeError::TooFewEntries(self.entries.len()));
        }
        let mut gap = f64::INFINITY;
        for i in 0..self.entries.len() {
            for j in (i + 1)..self.entries.len() {
                let d = euclid(&self.entries[i].node, &self.entries[j].node);
                if d < gap {
                    gap = d;
                }
            }
        }
        Ok(SeparationGap {
            gap,
            separation_radius: 0.5 * gap,
            duplicate: gap == 0.0,
        })
    }

    /// Grid-search estimate of the covering radius over the search window
    /// `[lo, hi]` on every axis, accurate to about one grid step.
    pub fn covering_radius(&self, lo: f64, hi: f64, resolution: f64) -> Result<f64, NodeError> {
        if self.entries.is_empty() {
            return Err(NodeError::Empty);
        }
        if resolution <= 0.0 || !resolution.is_finite() {
            return Err(NodeError::BadResolution);
        }
        for axis in 0..self.dim {
            let (mut hull_lo, mut hull_hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for e in &self.entries {
                hull_lo = hull_lo.min(e.node[axis]);
                hull_hi = hull_hi.max(e.node[axis]);
            }
            if lo < hull_lo || hi > hull_hi {
                return Err(NodeError::WindowOutsideHull {
                    axis,
                    lo,
                    hi,
                    hull_lo,
                    hull_hi,
                });
            }
        }
        let steps = ((hi - lo) / resolution).round() as usize;
        let axis_points: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * resolution).collect();
        let mut worst = 0.0f64;
        let mut point = vec![0.0f64; self.dim];
        let mut counter = vec![0usize; self.dim];
        loop {
            for (axis, &c) in counter.iter().enumerate() {
                point[axis] = axis_points[c];
            }
            let nearest = self
                .entries
                .iter()
                .map(|e| euclid(&point, &e.node))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
            // Odometer increment over the grid.
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    return Ok(worst);
                }
                counter[axis] += 1;
                if counter[axis] < axis_points.len() {
                    break;
                }
                counter[axis] = 0;
                axis += 1;
            }
        }
    }

    /// The `l`-truncated set: the first `l` entries keep their nodes, the
    /// rest snap back to the lattice.
    pub fn truncate(&self, level: usize) -> Result<NodeSet, NodeError> {
        if level > self.entries.len() {
            return Err(NodeError::BadTruncation {
                level,
                count: self.entries.len(),
            });
        }
        let mut out = self.clone();
        for e in out.entries.iter_mut().skip(level) {
            e.node = e.lattice.iter().map(|&c| c as f64).collect();
        }
        Ok(out)
    }

    /// Serializes as `k,n_1..n_d,t_1..t_d` rows in index order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push('k');
        for i in 1..=self.dim {
            let _ = write!(out, ",n_{i}");
        }
        for i in 1..=self.dim {
            let _ = write!(out, ",t_{i}");
        }
        out.push('\n');
        for e in &self.entries {
            let _ = write!(out, "{}", e.index);
            for n in &e.lattice {
                let _ = write!(out, ",{n}");
            }
            for t in &e.node {
                let _ = write!(out, ",{t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), NodeError> {
        std::fs::write(path, self.to_csv()).map_err(|e| NodeError::Io(e.to_string()))
    }

    /// Parses and validates a node CSV produced by [`NodeSet::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, NodeError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(NodeError::Csv {
            line: 1,
            msg: "empty file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[0] != "k" || !(cols.len() - 1).is_multiple_of(2) {
            return Err(NodeError::Csv {
                line: 1,
                msg: format!("bad header {header:?}"),
            });
        }
        let dim = (cols.len() - 1) / 2;
        let mut entries = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 1 + 2 * dim {
                return Err(NodeError::Csv {
                    line: lineno + 1,
                    msg: format!("expected {} fields, got {}", 1 + 2 * dim, fields.len()),
                });
            }
            let index: usize = fields[0].trim().parse().map_err(|_| NodeError::Csv {
                line: lineno + 1,
                msg: format!("bad index {:?}", fields[0]),
            })?;
            let mut lattice = Vec::with_capacity(dim);
            for f in &fields[1..=dim] {
                lattice.push(f.trim().parse::<i64>().map_err(|_| NodeError::Csv {
                    line: lineno + 1,
                    msg: format!("bad lattice coordinate {f:?}"),
                })?);
            }
            let mut node = Vec::with_capacity(dim);
            for f in &fields[dim + 1..] {
                node.push(f.trim().parse::<f64>().map_err(|_| NodeError::Csv {
                    line: lineno + 1,
                    msg: format!("bad node coordinate {f:?}"),
                })?);
            }
            entries.push(NodeEntry {
                index,
                lattice,
                node,
            });
        }
        Self::from_entries(dim, entries)
    }

    pub fn read_csv(path: &Path) -> Result<Self, NodeError> {
        let text = std::fs::read_to_string(path).map_err(|e| NodeError::Io(e.to_string()))?;
        Self::from_csv(&text)
    }
}

fn shell_radius(lattice: &[i64]) -> i64 {
    lattice.iter().map(|c| c.abs()).max().unwrap_or(0)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// All lattice points of `{-W..W}^d`, sorted by max-norm shell then
/// lexicographically.
fn enumerate_cube(dim: usize, window_radius: i64) -> Result<Vec<Vec<i64>>, NodeError> {
    if dim == 0 {
        return Err(NodeError::ZeroDimension);
    }
    if window_radius < 0 {
        return Err(NodeError::InvalidMode("window radius must be >= 0".into()));
    }
    let side = 2u128 * window_radius as u128 + 1;
    let count = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if count > MAX_ENTRIES as u128 {
        return Err(NodeError::WindowTooLarge {
            count,
            max: MAX_ENTRIES,
        });
    }
    let mut points = Vec::with_capacity(count as usize);
    let mut current = vec![-window_radius; dim];
    loop {
        points.push(current.clone());
        let mut axis = dim;
        loop {
            if axis == 0 {
                points.sort_by(|a, b| shell_radius(a).cmp(&shell_radius(b)).then_with(|| a.cmp(b)));
                return Ok(points);
            }
            axis -= 1;
            current[axis] += 1;
            if current[axis] <= window_radius {
                break;
            }
            current[axis] = -window_radius;
        }
    }
}

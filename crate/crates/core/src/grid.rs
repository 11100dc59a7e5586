//! ε-coverings by scanning logarithmic grids of threshold queries.
//!
//! Grid level `q` stands for the threshold `(1+ε)^q`. Level `q0 - 1`, one
//! below the level of the floor `δ`, stands for threshold 0 so that points
//! with zero (or sub-floor) components are still reached.

use std::fmt;

use crate::backend::{Candidate, FeasibilityBackend};
use crate::error::{Error, Result};
use crate::models::Space;
use crate::momdp::{OccupationMeasure, Policy};
use crate::vector::{
    dominates_slice, lorenz_of_slice, nondominated_indices, LorenzVector, ValueVector,
};

/// Relative nudge applied before taking lower grid images, absorbing solver
/// round-off on thresholds that are met with equality.
const IMAGE_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub epsilon: f64,
    /// Upper bound `K` on value components.
    pub bound: f64,
    /// Lower grid boundary `δ`.
    pub floor: f64,
}

impl GridConfig {
    pub fn new(epsilon: f64, bound: f64) -> Result<Self> {
        Self::with_floor(epsilon, bound, 1.0)
    }

    pub fn with_floor(epsilon: f64, bound: f64, floor: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(floor > 0.0 && floor.is_finite()) {
            return Err(Error::domain(format!(
                "grid floor must be positive, got {floor}"
            )));
        }
        if !(bound.is_finite() && bound >= floor) {
            return Err(Error::domain(format!(
                "bound {bound} must be finite and at least the floor {floor}"
            )));
        }
        Ok(GridConfig {
            epsilon,
            bound,
            floor,
        })
    }

    /// Grid config for `backend` with `K` from its default bound (raised to
    /// the floor when the set is tiny).
    pub fn for_backend(backend: &FeasibilityBackend, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, backend.default_bound().max(1.0))
    }

    fn log_ratio(&self, x: f64) -> f64 {
        x.ln() / self.epsilon.ln_1p()
    }

    /// `log x / log(1+ε)`, snapped to the nearest integer when within 1e-9.
    fn snapped(&self, x: f64) -> f64 {
        let r = self.log_ratio(x);
        if (r - r.round()).abs() < 1e-9 {
            r.round()
        } else {
            r
        }
    }

    /// `⌈log max(x, δ) / log(1+ε)⌉`.
    pub fn ceil_index(&self, x: f64) -> i64 {
        self.snapped(x.max(self.floor)).ceil() as i64
    }

    /// Level of the floor, `⌊log δ / log(1+ε)⌋`.
    pub fn floor_level(&self) -> i64 {
        self.snapped(self.floor).floor() as i64
    }

    /// Threshold of level `q`; zero below the floor level.
    pub fn threshold(&self, q: i64) -> f64 {
        if q < self.floor_level() {
            0.0
        } else {
            (1.0 + self.epsilon).powi(q as i32)
        }
    }

    /// Largest level whose threshold is at most `x`.
    pub fn lower_index(&self, x: f64) -> i64 {
        let q0 = self.floor_level();
        if x < self.threshold(q0) {
            return q0 - 1;
        }
        let mut q = (self.snapped(x).floor() as i64).max(q0);
        while q > q0 && self.threshold(q) > x {
            q -= 1;
        }
        while self.threshold(q + 1) <= x {
            q += 1;
        }
        q
    }

    /// Lower grid image used by the final filters.
    pub fn image_index(&self, x: f64) -> i64 {
        self.lower_index(x * (1.0 + IMAGE_NUDGE))
    }
}

/// Integer grid coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex(pub Vec<i64>);

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// `φ(v)_i = ⌈log max(v_i, δ) / log(1+ε)⌉`.
pub fn phi_index(v: &ValueVector, cfg: &GridConfig) -> CellIndex {
    CellIndex(v.as_slice().iter().map(|&x| cfg.ceil_index(x)).collect())
}

/// `ψ(v)_k = ⌈log max(L_k(v), δ) / log(1+ε)⌉`.
pub fn psi_index(v: &ValueVector, cfg: &GridConfig) -> CellIndex {
    CellIndex(
        v.lorenz()
            .as_slice()
            .iter()
            .map(|&x| cfg.ceil_index(x))
            .collect(),
    )
}

/// Lexicographic enumeration of grid cells with skip-ahead marks.
///
/// A cell is skipped when a recorded maximizer from a componentwise lower
/// cell already meets all of its thresholds, or when a componentwise lower
/// cell was found infeasible.
#[derive(Debug, Clone)]
pub struct CellScan {
    cfg: GridConfig,
    lo: i64,
    hi: Vec<i64>,
    monotone: bool,
    skip_ahead: bool,
    next: Option<Vec<i64>>,
    covered: Vec<(Vec<i64>, Vec<f64>)>,
    infeasible: Vec<Vec<i64>>,
    pub yielded: usize,
    pub skipped: usize,
    pub pruned: usize,
}

impl CellScan {
    fn new(cfg: GridConfig, hi: Vec<i64>, monotone: bool, skip_ahead: bool) -> Self {
        let lo = cfg.floor_level() - 1;
        let next = if hi.iter().all(|&h| h >= lo) {
            Some(vec![lo; hi.len()])
        } else {
            None
        };
        CellScan {
            cfg,
            lo,
            hi,
            monotone,
            skip_ahead,
            next,
            covered: Vec::new(),
            infeasible: Vec::new(),
            yielded: 0,
            skipped: 0,
            pruned: 0,
        }
    }

    /// Monotone cells `p_1 <= ... <= p_{n-1}` with `p_k` up to
    /// `⌈log(kK) / log(1+ε)⌉`.
    pub fn lorenz(n: usize, cfg: &GridConfig, skip_ahead: bool) -> Self {
        let hi = (1..n)
            .map(|k| cfg.ceil_index(k as f64 * cfg.bound))
            .collect();
        Self::new(*cfg, hi, true, skip_ahead)
    }

    /// All cells over the first `n - 1` coordinates, each up to
    /// `⌈log K / log(1+ε)⌉`.
    pub fn pareto(n: usize, cfg: &GridConfig) -> Self {
        let hi = vec![cfg.ceil_index(cfg.bound); n - 1];
        Self::new(*cfg, hi, false, false)
    }

    pub fn thresholds(&self, cell: &[i64]) -> Vec<f64> {
        cell.iter().map(|&q| self.cfg.threshold(q)).collect()
    }

    /// Records a maximizer found at `cell` (its coordinates in the scanned
    /// space, at least the first `n - 1`).
    pub fn mark_covered(&mut self, cell: &[i64], point: &[f64]) {
        if self.skip_ahead {
            self.covered
                .push((cell.to_vec(), point[..cell.len()].to_vec()));
        }
    }

    pub fn mark_infeasible(&mut self, cell: &[i64]) {
        self.infeasible.push(cell.to_vec());
    }

    fn advance(&self, cur: &[i64]) -> Option<Vec<i64>> {
        let mut next = cur.to_vec();
        for j in (0..next.len()).rev() {
            if next[j] < self.hi[j] {
                next[j] += 1;
                let fill = if self.monotone { next[j] } else { self.lo };
                for l in j + 1..next.len() {
                    next[l] = fill;
                }
                if next.iter().zip(&self.hi).all(|(p, h)| p <= h) {
                    return Some(next);
                }
                return None;
            }
        }
        None
    }

    fn is_skipped(&self, cell: &[i64]) -> bool {
        let below = |p: &[i64]| p.iter().zip(cell).all(|(a, b)| a <= b);
        self.covered.iter().any(|(p, l)| {
            below(p)
                && cell
                    .iter()
                    .zip(l)
                    .all(|(&q, &lk)| self.cfg.threshold(q) <= lk)
        })
    }
}

impl Iterator for CellScan {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            let cur = self.next.take()?;
            self.next = self.advance(&cur);
            if self
                .infeasible
                .iter()
                .any(|p| p.iter().zip(&cur).all(|(a, b)| a <= b))
            {
                self.pruned += 1;
                continue;
            }
            if self.skip_ahead && self.is_skipped(&cur) {
                self.skipped += 1;
                continue;
            }
            self.yielded += 1;
            return Some(cur);
        }
    }
}

/// The Lorenz cell stream with skip-ahead enabled.
pub fn enumerate_cells(n: usize, cfg: &GridConfig) -> CellScan {
    CellScan::lorenz(n, cfg, true)
}

/// Number of vectors `lo <= p_1 <= ... <= p_d` with `p_k <= hi[k]`.
fn monotone_count(lo: i64, hi: &[i64]) -> u128 {
    let Some(&top) = hi.iter().max() else {
        return 1;
    };
    if top < lo {
        return 0;
    }
    let width = (top - lo + 1) as usize;
    // counts[v]: prefixes ending at level lo + v.
    let mut counts: Vec<u128> = (0..width)
        .map(|v| u128::from(lo + v as i64 <= hi[0]))
        .collect();
    for &h in &hi[1..] {
        let mut run = 0u128;
        for v in 0..width {
            run += counts[v];
            counts[v] = if lo + v as i64 <= h { run } else { 0 };
        }
    }
    counts.iter().sum()
}

/// Number of cells the Lorenz scan visits without any skipping.
pub fn lorenz_cell_count(n: usize, cfg: &GridConfig) -> u128 {
    let hi: Vec<i64> = (1..n)
        .map(|k| cfg.ceil_index(k as f64 * cfg.bound))
        .collect();
    monotone_count(cfg.floor_level() - 1, &hi)
}

/// Number of cells of the Pareto scan.
pub fn pareto_cell_count(n: usize, cfg: &GridConfig) -> u128 {
    let per = (cfg.ceil_index(cfg.bound) - cfg.floor_level() + 2).max(0) as u128;
    per.pow((n - 1) as u32)
}

/// `Π_i ⌈log(iK)/log(1+ε)⌉` over `i < n`, and the number of monotone
/// index vectors `1 <= p_1 <= ... <= p_{n-1}` under the same caps.
pub fn lorenz_cell_bounds(n: usize, cfg: &GridConfig) -> (u128, u128) {
    let hi: Vec<i64> = (1..n)
        .map(|k| cfg.ceil_index(k as f64 * cfg.bound).max(0))
        .collect();
    let product = hi.iter().map(|&h| h as u128).product();
    (product, monotone_count(1, &hi))
}

/// `⌈log K / log(1+ε)⌉^{n-1}`.
pub fn pareto_cover_bound(n: usize, cfg: &GridConfig) -> u128 {
    (cfg.ceil_index(cfg.bound).max(0) as u128).pow((n - 1) as u32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverEntry {
    pub value: ValueVector,
    pub lorenz: LorenzVector,
    pub policy: Option<Policy>,
    pub occupation: Option<OccupationMeasure>,
    pub cell: CellIndex,
}

impl CoverEntry {
    pub(crate) fn from_candidate(c: Candidate, cell: CellIndex) -> Self {
        CoverEntry {
            lorenz: c.value.lorenz(),
            value: c.value,
            policy: c.policy,
            occupation: c.occupation,
            cell,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverStats {
    /// Backend calls made.
    pub queries: usize,
    /// Cells passed over because a recorded maximizer already met them.
    pub skipped: usize,
    /// Cells passed over because a lower cell was infeasible.
    pub pruned: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSet {
    pub space: Space,
    pub epsilon: f64,
    pub entries: Vec<CoverEntry>,
    pub stats: CoverStats,
}

impl CoverSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<ValueVector> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }
}

/// Scan options. Queries run on `jobs` threads only with skip-ahead off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub skip_ahead: bool,
    pub jobs: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            skip_ahead: true,
            jobs: 1,
        }
    }
}

fn coords(space: Space, v: &ValueVector) -> Vec<f64> {
    match space {
        Space::Pareto => v.as_slice().to_vec(),
        Space::Lorenz => lorenz_of_slice(v.as_slice()).as_slice().to_vec(),
    }
}

/// Keeps one representative per lower grid image (larger `L_n`, then the
/// lexicographically larger value) and drops images strictly dominated by
/// another kept image. Entries come back sorted by image.
pub(crate) fn filter_by_image(
    entries: Vec<CoverEntry>,
    space: Space,
    cfg: &GridConfig,
) -> Vec<CoverEntry> {
    let mut by_image: std::collections::BTreeMap<Vec<i64>, CoverEntry> = Default::default();
    for mut e in entries {
        let img: Vec<i64> = coords(space, &e.value)
            .iter()
            .map(|&x| cfg.image_index(x))
            .collect();
        e.cell = CellIndex(img.clone());
        match by_image.get(&img) {
            Some(cur) => {
                let n = e.lorenz.len();
                let better = (e.lorenz[n - 1], e.value.as_slice())
                    > (cur.lorenz[n - 1], cur.value.as_slice());
                if better {
                    by_image.insert(img, e);
                }
            }
            None => {
                by_image.insert(img, e);
            }
        }
    }
    let reps: Vec<CoverEntry> = by_image.into_values().collect();
    let images: Vec<Vec<f64>> = reps
        .iter()
        .map(|e| e.cell.0.iter().map(|&q| q as f64).collect())
        .collect();
    let refs: Vec<&[f64]> = images.iter().map(Vec::as_slice).collect();
    let keep = nondominated_indices(&refs);
    let mut reps: Vec<Option<CoverEntry>> = reps.into_iter().map(Some).collect();
    keep.into_iter().filter_map(|i| reps[i].take()).collect()
}

enum ScanKind {
    Lorenz,
    Pareto,
}

fn query(
    backend: &FeasibilityBackend,
    kind: &ScanKind,
    eta: &[f64],
    cell: &[i64],
) -> Result<Option<Candidate>> {
    let r = match kind {
        ScanKind::Lorenz => backend.lorenz_query(eta),
        ScanKind::Pareto => backend.pareto_query(eta),
    };
    r.map_err(|e| Error::Cell {
        cell: cell.to_vec(),
        source: Box::new(e),
    })
}

fn run_scan(
    backend: &FeasibilityBackend,
    cfg: &GridConfig,
    kind: ScanKind,
    opts: ScanOptions,
) -> Result<(Vec<CoverEntry>, CoverStats)> {
    let n = backend.num_objectives();
    if n < 2 {
        return Err(Error::domain("grid covers need at least 2 objectives"));
    }
    let mut scan = match kind {
        ScanKind::Lorenz => CellScan::lorenz(n, cfg, opts.skip_ahead),
        ScanKind::Pareto => CellScan::pareto(n, cfg),
    };
    let space = match kind {
        ScanKind::Lorenz => Space::Lorenz,
        ScanKind::Pareto => Space::Pareto,
    };
    let mut entries = Vec::new();
    let mut stats = CoverStats::default();

    if opts.jobs > 1 && !opts.skip_ahead {
        // Independent queries; no order-dependent pruning.
        let cells: Vec<Vec<i64>> = {
            let mut all = Vec::new();
            let mut cur = scan.next.clone();
            while let Some(c) = cur {
                cur = scan.advance(&c);
                all.push(c);
            }
            all
        };
        stats.queries = cells.len();
        let jobs = opts.jobs.min(cells.len().max(1));
        let results: Vec<(usize, Result<Option<Candidate>>)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let cells = &cells;
                    let scan = &scan;
                    let kind = &kind;
                    s.spawn(move || {
                        (j..cells.len())
                            .step_by(jobs)
                            .map(|i| {
                                (
                                    i,
                                    query(backend, kind, &scan.thresholds(&cells[i]), &cells[i]),
                                )
                            })
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut all: Vec<_> = handles
                .into_iter()
                .flat_map(|h| h.join().expect("query thread panicked"))
                .collect();
            all.sort_by_key(|(i, _)| *i);
            all
        });
        for (i, r) in results {
            if let Some(c) = r? {
                entries.push(CoverEntry::from_candidate(c, CellIndex(cells[i].clone())));
            }
        }
        return Ok((entries, stats));
    }

    while let Some(cell) = scan.next() {
        let eta = scan.thresholds(&cell);
        stats.queries += 1;
        match query(backend, &kind, &eta, &cell)? {
            None => scan.mark_infeasible(&cell),
            Some(c) => {
                scan.mark_covered(&cell, &coords(space, &c.value));
                entries.push(CoverEntry::from_candidate(c, CellIndex(cell)));
            }
        }
    }
    stats.skipped = scan.skipped;
    stats.pruned = scan.pruned;
    Ok((entries, stats))
}

/// Direct scan of the Lorenz grid: one threshold query per unskipped cell.
pub fn lorenz_grid_cover(backend: &FeasibilityBackend, cfg: &GridConfig) -> Result<CoverSet> {
    lorenz_grid_cover_with(backend, cfg, ScanOptions::default())
}

pub fn lorenz_grid_cover_with(
    backend: &FeasibilityBackend,
    cfg: &GridConfig,
    opts: ScanOptions,
) -> Result<CoverSet> {
    let (entries, stats) = run_scan(backend, cfg, ScanKind::Lorenz, opts)?;
    Ok(CoverSet {
        space: Space::Lorenz,
        epsilon: cfg.epsilon,
        entries: filter_by_image(entries, Space::Lorenz, cfg),
        stats,
    })
}

/// Scan of the value grid over the first `n - 1` coordinates, maximizing
/// the last coordinate per cell.
pub fn pareto_grid_cover(backend: &FeasibilityBackend, cfg: &GridConfig) -> Result<CoverSet> {
    pareto_grid_cover_with(backend, cfg, ScanOptions::default())
}

pub fn pareto_grid_cover_with(
    backend: &FeasibilityBackend,
    cfg: &GridConfig,
    opts: ScanOptions,
) -> Result<CoverSet> {
    let opts = ScanOptions {
        skip_ahead: false,
        ..opts
    };
    let (entries, stats) = run_scan(backend, cfg, ScanKind::Pareto, opts)?;
    Ok(CoverSet {
        space: Space::Pareto,
        epsilon: cfg.epsilon,
        entries: filter_by_image(entries, Space::Pareto, cfg),
        stats,
    })
}

/// Pareto grid cover, then the Lorenz-nondominated entries of its image.
pub fn two_phase_lorenz_cover(backend: &FeasibilityBackend, cfg: &GridConfig) -> Result<CoverSet> {
    two_phase_lorenz_cover_with(backend, cfg, ScanOptions::default())
}

pub fn two_phase_lorenz_cover_with(
    backend: &FeasibilityBackend,
    cfg: &GridConfig,
    opts: ScanOptions,
) -> Result<CoverSet> {
    let pareto = pareto_grid_cover_with(backend, cfg, opts)?;
    let lorenz: Vec<&[f64]> = pareto.entries.iter().map(|e| e.lorenz.as_slice()).collect();
    let keep = nondominated_indices(&lorenz);
    let mut entries: Vec<CoverEntry> = Vec::with_capacity(keep.len());
    for i in keep {
        let e = &pareto.entries[i];
        if entries.iter().any(|k| k.lorenz == e.lorenz) {
            continue;
        }
        entries.push(e.clone());
    }
    Ok(CoverSet {
        space: Space::Lorenz,
        epsilon: cfg.epsilon,
        entries,
        stats: pareto.stats,
    })
}

/// True when some image in `images` weakly dominates `img`.
pub fn image_covered(images: &[CellIndex], img: &CellIndex) -> bool {
    images.iter().any(|c| {
        let a: Vec<f64> = c.0.iter().map(|&q| q as f64).collect();
        let b: Vec<f64> = img.0.iter().map(|&q| q as f64).collect();
        dominates_slice(&a, &b, false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(eps: f64, k: f64) -> GridConfig {
        GridConfig::new(eps, k).unwrap()
    }

    fn vv(v: &[f64]) -> ValueVector {
        ValueVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn phi_and_psi_examples() {
        let c = cfg(0.1, 100.0);
        assert_eq!(phi_index(&vv(&[14.0, 6.0]), &c).0, vec![28, 19]);
        assert_eq!(phi_index(&vv(&[1.0, 1.0]), &c).0, vec![0, 0]);
        assert_eq!(psi_index(&vv(&[14.0, 6.0]), &c).0, vec![19, 32]);
        let constant = psi_index(&vv(&[7.0, 7.0, 7.0]), &c);
        assert_eq!(constant, phi_index(&vv(&[7.0, 14.0, 21.0]), &c));
    }

    #[test]
    fn lower_index_brackets_value() {
        let c = cfg(0.1, 1e6);
        for x in [0.0, 0.5, 1.0, 1.1, 1.2, 14.0, 999.0, 1e6] {
            let q = c.lower_index(x);
            assert!(c.threshold(q) <= x);
            assert!(c.threshold(q + 1) > x);
        }
        assert_eq!(c.lower_index(0.0), -1);
        assert_eq!(c.lower_index(1.0), 0);
        assert_eq!(c.lower_index(1.1), 1);
    }

    #[test]
    fn scan_order_and_monotonicity() {
        let c = cfg(1.0, 8.0);
        // Levels -1..=3 for p_1.
        let cells: Vec<Vec<i64>> = CellScan::lorenz(2, &c, false).collect();
        assert_eq!(cells, vec![vec![-1], vec![0], vec![1], vec![2], vec![3]]);
        let cells: Vec<Vec<i64>> = CellScan::lorenz(3, &c, false).collect();
        assert!(cells.windows(2).all(|w| w[0] < w[1]));
        assert!(cells.iter().all(|p| p[0] <= p[1]));
        assert!(!cells.contains(&vec![2, 1]));
        assert_eq!(cells.len() as u128, lorenz_cell_count(3, &c));
    }

    #[test]
    fn marks_skip_dominated_and_prune_infeasible() {
        let c = cfg(1.0, 8.0);
        let mut scan = CellScan::lorenz(2, &c, true);
        assert_eq!(scan.next(), Some(vec![-1]));
        scan.mark_covered(&[-1], &[2.5, 10.0]);
        // Thresholds 1 and 2 are met by L_1 = 2.5.
        assert_eq!(scan.next(), Some(vec![2]));
        scan.mark_infeasible(&[2]);
        assert_eq!(scan.next(), None);
        assert_eq!(scan.skipped, 2);
        assert_eq!(scan.pruned, 1);
    }

    #[test]
    fn singleton_covers() {
        let b = FeasibilityBackend::explicit(vec![vv(&[3.0, 5.0])]).unwrap();
        let c = GridConfig::for_backend(&b, 0.1).unwrap();
        for cover in [
            lorenz_grid_cover(&b, &c).unwrap(),
            pareto_grid_cover(&b, &c).unwrap(),
            two_phase_lorenz_cover(&b, &c).unwrap(),
        ] {
            assert_eq!(cover.values(), vec![vv(&[3.0, 5.0])]);
        }
    }

    #[test]
    fn parallel_scan_matches_sequential_entries() {
        let set: Vec<ValueVector> = (0..40)
            .map(|k| vv(&[k as f64, (80 - 2 * k) as f64]))
            .collect();
        let b = FeasibilityBackend::explicit(set).unwrap();
        let c = GridConfig::for_backend(&b, 0.1).unwrap();
        let seq = pareto_grid_cover(&b, &c).unwrap();
        let par = pareto_grid_cover_with(
            &b,
            &c,
            ScanOptions {
                skip_ahead: false,
                jobs: 4,
            },
        )
        .unwrap();
        assert_eq!(seq.entries, par.entries);
        let seq = lorenz_grid_cover_with(
            &b,
            &c,
            ScanOptions {
                skip_ahead: false,
                jobs: 1,
            },
        )
        .unwrap();
        let par = lorenz_grid_cover_with(
            &b,
            &c,
            ScanOptions {
                skip_ahead: false,
                jobs: 3,
            },
        )
        .unwrap();
        assert_eq!(seq.entries, par.entries);
    }

    #[test]
    fn cell_bounds() {
        let c = cfg(0.1, 990.0);
        let (product, monotone) = lorenz_cell_bounds(3, &c);
        assert_eq!(product, 73 * 80);
        assert!(monotone < product);
        assert_eq!(pareto_cover_bound(3, &c), 73 * 73);
    }
}

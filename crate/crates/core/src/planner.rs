//! 3D occupancy-grid A* with six-connected unit-cost moves.
//!
//! Nodes are ranked by `f = g + h` where `g` is the number of moves taken and
//! `h` is the Manhattan distance to the goal cell. For unit-cost moves along
//! the axes Manhattan distance is an exact lower bound and satisfies
//! `h(n) ≤ 1 + h(n')` on every edge, so the first expansion of the goal is
//! optimal and no node is reopened.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Aabb, HyperRect, Vec3};

/// Cell coordinates `(ix, iy, iz)`.
pub type Cell = [usize; 3];

/// The six unit moves: ±x, ±y, ±z.
const MOVES: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    /// Minimum corner of cell `(0, 0, 0)`.
    pub origin: Vec3,
    pub cell: f64,
    pub dims: [usize; 3],
    occupied: Vec<bool>,
}

/// JSON debug dump of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDump {
    pub origin: Vec3,
    pub cell: f64,
    pub dims: [usize; 3],
    pub occupied: Vec<usize>,
}

impl OccupancyGrid {
    pub fn empty(origin: Vec3, cell: f64, dims: [usize; 3]) -> Result<Self> {
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::usage("cell size must be positive"));
        }
        if dims.contains(&0) {
            return Err(Error::usage("grid dimensions must be positive"));
        }
        let n = dims
            .iter()
            .try_fold(1usize, |acc, d| acc.checked_mul(*d))
            .ok_or_else(|| Error::usage("grid too large"))?;
        Ok(OccupancyGrid {
            origin,
            cell,
            dims,
            occupied: vec![false; n],
        })
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    /// Linear index; lexicographic in `(ix, iy, iz)`.
    pub fn index(&self, c: Cell) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        let iz = index % self.dims[2];
        let rest = index / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], iz]
    }

    pub fn is_occupied(&self, c: Cell) -> bool {
        self.occupied[self.index(c)]
    }

    pub fn set_occupied(&mut self, c: Cell, value: bool) {
        let i = self.index(c);
        self.occupied[i] = value;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|o| **o).count()
    }

    pub fn cell_center(&self, c: Cell) -> Vec3 {
        Vec3::new(
            self.origin.x + (c[0] as f64 + 0.5) * self.cell,
            self.origin.y + (c[1] as f64 + 0.5) * self.cell,
            self.origin.z + (c[2] as f64 + 0.5) * self.cell,
        )
    }

    pub fn cell_box(&self, c: Cell) -> Aabb {
        let h = 0.5 * self.cell;
        Aabb::new(self.cell_center(c), Vec3::new(h, h, h))
    }

    /// The cell containing `p`, or `None` outside the grid.
    pub fn cell_of(&self, p: Vec3) -> Option<Cell> {
        let rel = [p.x - self.origin.x, p.y - self.origin.y, p.z - self.origin.z];
        let mut c = [0usize; 3];
        for d in 0..3 {
            let f = (rel[d] / self.cell).floor();
            if !f.is_finite() || f < 0.0 {
                return None;
            }
            let i = f as usize;
            // points on the far boundary belong to the last cell
            if i >= self.dims[d] {
                if rel[d] <= self.dims[d] as f64 * self.cell + geometry::TOL {
                    c[d] = self.dims[d] - 1;
                    continue;
                }
                return None;
            }
            c[d] = i;
        }
        Some(c)
    }

    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        MOVES.iter().filter_map(move |m| {
            let mut n = [0usize; 3];
            for d in 0..3 {
                let v = c[d] as i64 + m[d];
                if v < 0 || v >= self.dims[d] as i64 {
                    return None;
                }
                n[d] = v as usize;
            }
            Some(n)
        })
    }

    pub fn dump(&self) -> GridDump {
        GridDump {
            origin: self.origin,
            cell: self.cell,
            dims: self.dims,
            occupied: (0..self.len()).filter(|i| self.occupied[*i]).collect(),
        }
    }
}

/// Marks every cell whose box overlaps an obstacle grown by `inflation`.
///
/// Overlap is strict: a cell that only shares a face with a grown obstacle
/// stays free. The inflation margin is the clearance policy here.
pub fn rasterize(
    obstacles: &[Aabb],
    bounds: &Aabb,
    cell: f64,
    inflation: f64,
) -> Result<OccupancyGrid> {
    if !(cell.is_finite() && cell > 0.0) {
        return Err(Error::usage("cell size must be positive"));
    }
    if !(inflation.is_finite() && inflation >= 0.0) {
        return Err(Error::usage("inflation must be non-negative"));
    }
    bounds.validate()?;
    let ext = bounds.half_extent * 2.0;
    if ext.x <= 0.0 || ext.y <= 0.0 || ext.z <= 0.0 {
        return Err(Error::usage("grid bounds have zero volume"));
    }
    let dims = [
        (ext.x / cell - 1e-9).ceil() as usize,
        (ext.y / cell - 1e-9).ceil() as usize,
        (ext.z / cell - 1e-9).ceil() as usize,
    ];
    let mut grid = OccupancyGrid::empty(bounds.min(), cell, dims)?;
    let origin = grid.origin.to_array();
    for obs in obstacles {
        obs.validate()?;
        let grown = geometry::bloat(&obs.to_rect(), &[inflation; 3])?;
        // candidate index range, widened by one cell, then exact test per cell
        let mut range = [(0usize, 0usize); 3];
        let mut empty = false;
        for d in 0..3 {
            let lo = ((grown.lower(d) - origin[d]) / cell).floor() as i64 - 1;
            let hi = ((grown.upper(d) - origin[d]) / cell).floor() as i64 + 1;
            let lo = lo.max(0);
            let hi = hi.min(dims[d] as i64 - 1);
            if lo > hi {
                empty = true;
                break;
            }
            range[d] = (lo as usize, hi as usize);
        }
        if empty {
            continue;
        }
        for ix in range[0].0..=range[0].1 {
            for iy in range[1].0..=range[1].1 {
                for iz in range[2].0..=range[2].1 {
                    let c = [ix, iy, iz];
                    if geometry::overlaps(&grid.cell_box(c).to_rect(), &grown)? {
                        grid.set_occupied(c, true);
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// A search node. `f` is always `g + h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanNode {
    pub cell: Cell,
    pub g: u32,
    pub h: u32,
}

impl PlanNode {
    pub fn f(&self) -> u32 {
        self.g + self.h
    }
}

/// Expansion order: smaller `f` first, then larger `g`, then the
/// lexicographically smaller cell. `Less` means `a` is expanded first.
pub fn tie_break(a: &PlanNode, b: &PlanNode) -> Ordering {
    a.f()
        .cmp(&b.f())
        .then_with(|| b.g.cmp(&a.g))
        .then_with(|| a.cell.cmp(&b.cell))
}

struct Open(PlanNode);

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    // BinaryHeap pops the greatest element
    fn cmp(&self, other: &Self) -> Ordering {
        tie_break(&other.0, &self.0)
    }
}

pub fn manhattan(a: Cell, b: Cell) -> u32 {
    (0..3).map(|d| a[d].abs_diff(b[d]) as u32).sum()
}

/// A found path: cells from start to goal and their centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub cells: Vec<Cell>,
    pub waypoints: Vec<Vec3>,
}

impl Path {
    /// Number of moves.
    pub fn cost(&self) -> usize {
        self.cells.len() - 1
    }
}

fn free_cell_of(grid: &OccupancyGrid, p: Vec3, what: &str) -> Result<Cell> {
    let c = grid
        .cell_of(p)
        .ok_or_else(|| Error::usage(format!("{what} {:?} is outside the grid", p.to_array())))?;
    if grid.is_occupied(c) {
        return Err(Error::usage(format!(
            "{what} {:?} lies in an occupied cell",
            p.to_array()
        )));
    }
    Ok(c)
}

/// Shortest six-connected path between the cells containing `start` and
/// `goal`. `Ok(None)` means the goal is unreachable.
pub fn plan(grid: &OccupancyGrid, start: Vec3, goal: Vec3) -> Result<Option<Path>> {
    let s = free_cell_of(grid, start, "start")?;
    let t = free_cell_of(grid, goal, "goal")?;
    Ok(plan_cells(grid, s, t).map(|cells| Path {
        waypoints: cells.iter().map(|c| grid.cell_center(*c)).collect(),
        cells,
    }))
}

fn plan_cells(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<Vec<Cell>> {
    let n = grid.len();
    let mut best = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    let si = grid.index(start);
    best[si] = 0;
    open.push(Open(PlanNode {
        cell: start,
        g: 0,
        h: manhattan(start, goal),
    }));

    while let Some(Open(node)) = open.pop() {
        let i = grid.index(node.cell);
        if closed[i] || node.g > best[i] {
            continue;
        }
        closed[i] = true;
        if node.cell == goal {
            let mut cells = vec![goal];
            let mut cur = i;
            while cur != si {
                cur = parent[cur];
                cells.push(grid.cell_at(cur));
            }
            cells.reverse();
            return Some(cells);
        }
        for nb in grid.neighbors(node.cell) {
            let j = grid.index(nb);
            if closed[j] || grid.occupied[j] {
                continue;
            }
            let g = node.g + 1;
            if g < best[j] {
                best[j] = g;
                parent[j] = i;
                open.push(Open(PlanNode {
                    cell: nb,
                    g,
                    h: manhattan(nb, goal),
                }));
            }
        }
    }
    None
}

/// Drops interior waypoints where the direction of travel does not change.
/// The polyline through the remaining points is identical.
pub fn simplify_collinear(points: &[Vec3]) -> Vec<Vec3> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut out = vec![points[0]];
    for w in points.windows(3) {
        let a = w[1] - w[0];
        let b = w[2] - w[1];
        let cross = Vec3::new(
            a.y * b.z - a.z * b.y,
            a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x,
        );
        let same_way = a.x * b.x + a.y * b.y + a.z * b.z > 0.0;
        if !(cross.max_abs() <= 1e-12 && same_way) {
            out.push(w[1]);
        }
    }
    out.push(points[points.len() - 1]);
    out
}

/// Replaces cell-center coordinates with the exact `start` coordinate on each
/// axis until the path first moves along it, and with the exact `goal`
/// coordinate after its last move. Every point stays inside its cell, so
/// segments between consecutive points cross the same cells as the grid path.
pub fn dequantize(grid: &OccupancyGrid, cells: &[Cell], start: Vec3, goal: Vec3) -> Vec<Vec3> {
    let n = cells.len();
    if n == 0 {
        return Vec::new();
    }
    let (s, g) = (start.to_array(), goal.to_array());
    let mut first_move = [n; 3];
    let mut settled = [0usize; 3];
    for d in 0..3 {
        if let Some(k) = cells.iter().position(|c| c[d] != cells[0][d]) {
            first_move[d] = k;
        }
        if let Some(k) = cells.iter().rposition(|c| c[d] != cells[n - 1][d]) {
            settled[d] = k + 1;
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let center = grid.cell_center(*c).to_array();
            let mut p = [0.0; 3];
            for d in 0..3 {
                p[d] = if k + 1 == n || (k >= settled[d] && first_move[d] < n) {
                    g[d]
                } else if k < first_move[d] {
                    s[d]
                } else {
                    center[d]
                };
            }
            Vec3::from(p)
        })
        .collect()
}

/// True if the segment `a → b` passes through the interior of no occupied cell.
/// Running along a face of an occupied cell is allowed, matching the strict
/// overlap rule used by [`rasterize`].
pub fn segment_clear(grid: &OccupancyGrid, a: Vec3, b: Vec3) -> bool {
    let d = b - a;
    let (pa, pb) = (a.to_array(), b.to_array());
    let o = grid.origin.to_array();
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for k in 0..3 {
        let m = pa[k].min(pb[k]);
        let x = pa[k].max(pb[k]);
        let l = ((m - o[k]) / grid.cell).floor().max(0.0) as usize;
        let h = ((x - o[k]) / grid.cell).floor().max(0.0) as usize;
        lo[k] = l.min(grid.dims[k] - 1);
        hi[k] = h.min(grid.dims[k] - 1);
    }
    let da = d.to_array();
    for ix in lo[0]..=hi[0] {
        for iy in lo[1]..=hi[1] {
            for iz in lo[2]..=hi[2] {
                let c = [ix, iy, iz];
                if !grid.is_occupied(c) {
                    continue;
                }
                let bx = grid.cell_box(c);
                let (bl, bh) = (bx.min().to_array(), bx.max().to_array());
                let (mut s0, mut s1) = (0.0f64, 1.0f64);
                for k in 0..3 {
                    if da[k] == 0.0 {
                        if !(pa[k] > bl[k] && pa[k] < bh[k]) {
                            s0 = 1.0;
                            s1 = 0.0;
                        }
                    } else {
                        let t1 = (bl[k] - pa[k]) / da[k];
                        let t2 = (bh[k] - pa[k]) / da[k];
                        s0 = s0.max(t1.min(t2));
                        s1 = s1.min(t1.max(t2));
                    }
                }
                if s1 - s0 > 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// Line-of-sight pruning: from each kept point, jump to the farthest visible
/// point of the remaining polyline. The jump target is refined by bisection
/// along the first blocked segment, so corners slide continuously with the
/// endpoints instead of snapping to cell centers.
pub fn shortcut(grid: &OccupancyGrid, points: &[Vec3]) -> Vec<Vec3> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut out = vec![points[0]];
    let mut anchor = points[0];
    // points[next..] is what remains after the anchor
    let mut next = 1;
    while next < points.len() {
        let mut j = points.len() - 1;
        while j > next && !segment_clear(grid, anchor, points[j]) {
            j -= 1;
        }
        if j + 1 == points.len() {
            out.push(points[j]);
            break;
        }
        let (a, b) = (points[j], points[j + 1]);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if segment_clear(grid, anchor, a + (b - a) * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        anchor = a + (b - a) * lo;
        out.push(anchor);
        next = j + 1;
    }
    out
}

/// Convenience: a grid over `bounds` described as a [`HyperRect`].
pub fn bounds_from_rect(r: &HyperRect) -> Result<Aabb> {
    Aabb::try_from_rect(r)
}

//! Cube exchanges on the torus: Lax-type approximation of a measure
//! preserving map by a cell permutation, repair to a single cycle, the
//! sup-distance between maps, and exact exponents over periodic bases.

use crate::cocycle::{one_step_matrix, Cocycle2, Form};
use crate::dynamics::{wrap, BaseMap, TorusPoint};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::{Mat2, C64};
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

/// Largest cell count matched exactly; above it a greedy assignment is used.
pub const HUNGARIAN_MAX_CELLS: usize = 1024;

fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            c.push(i);
            i = perm[i];
        }
        out.push(c);
    }
    out
}

fn check_bijection(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &j in perm {
        if j >= perm.len() || seen[j] {
            return Err(Error::InvalidArgument(format!("not a permutation (entry {})", j)));
        }
        seen[j] = true;
    }
    Ok(())
}

/// Rigid permutation of the n×n grid of cells of side 2π/n. Cell
/// `iy * n + ix` covers `[ix h, (ix+1) h) × [iy h, (iy+1) h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCube")]
pub struct CubeExchange {
    pub n: usize,
    pub perm: Vec<usize>,
    pub cyclic: bool,
}

#[derive(Deserialize)]
struct RawCube {
    n: usize,
    perm: Vec<usize>,
    cyclic: bool,
}

impl TryFrom<RawCube> for CubeExchange {
    type Error = Error;
    fn try_from(r: RawCube) -> Result<Self> {
        let c = CubeExchange::new(r.n, r.perm)?;
        if c.cyclic != r.cyclic {
            return Err(Error::InvalidArgument(format!("cyclic flag {} does not match the permutation", r.cyclic)));
        }
        Ok(c)
    }
}

impl CubeExchange {
    pub fn new(n: usize, perm: Vec<usize>) -> Result<Self> {
        if n == 0 || perm.len() != n * n {
            return Err(Error::InvalidArgument(format!("perm must have n² = {} entries", n * n)));
        }
        check_bijection(&perm)?;
        let cyclic = cycles_of(&perm).len() == 1;
        Ok(CubeExchange { n, perm, cyclic })
    }

    pub fn identity(n: usize) -> Self {
        CubeExchange { n, perm: (0..n * n).collect(), cyclic: n == 1 }
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn cell_size(&self) -> f64 {
        TAU / self.n as f64
    }

    fn index(&self, v: f64) -> usize {
        ((v / self.cell_size()) as usize).min(self.n - 1)
    }

    pub fn cell_of(&self, p: TorusPoint) -> usize {
        self.index(p.y) * self.n + self.index(p.x)
    }

    pub fn cell_corner(&self, i: usize) -> TorusPoint {
        let h = self.cell_size();
        TorusPoint { x: (i % self.n) as f64 * h, y: (i / self.n) as f64 * h }
    }

    pub fn cell_center(&self, i: usize) -> TorusPoint {
        let h = self.cell_size();
        let c = self.cell_corner(i);
        TorusPoint { x: c.x + h / 2.0, y: c.y + h / 2.0 }
    }

    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        let i = self.cell_of(p);
        let from = self.cell_corner(i);
        let to = self.cell_corner(self.perm[i]);
        TorusPoint { x: wrap(to.x + (p.x - from.x)), y: wrap(to.y + (p.y - from.y)) }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.perm)
    }
}

/// Rigid permutation of the n vertical annuli `[j h, (j+1) h) × T`: annulus j
/// is translated onto annulus `perm[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusPermutation {
    pub perm: Vec<usize>,
}

impl AnnulusPermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        if perm.is_empty() {
            return Err(Error::InvalidArgument("empty permutation".into()));
        }
        check_bijection(&perm)?;
        Ok(AnnulusPermutation { perm })
    }

    /// The cyclic permutation `order[0] → order[1] → … → order[0]`.
    pub fn from_cycle(order: &[usize]) -> Result<Self> {
        let mut perm = vec![usize::MAX; order.len()];
        for k in 0..order.len() {
            let a = order[k];
            if a >= order.len() {
                return Err(Error::InvalidArgument("cycle entry out of range".into()));
            }
            perm[a] = order[(k + 1) % order.len()];
        }
        Self::new(perm)
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn is_cyclic(&self) -> bool {
        cycles_of(&self.perm).len() == 1
    }

    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        let n = self.n();
        let h = TAU / n as f64;
        let j = ((p.x / h) as usize).min(n - 1);
        TorusPoint { x: wrap(p.x + (self.perm[j] as f64 - j as f64) * h), y: p.y }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.perm)
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

/// Halton (2, 3) points scaled to the torus.
pub fn halton_points(m: usize) -> Vec<TorusPoint> {
    (1..=m as u64).map(|k| TorusPoint { x: TAU * radical_inverse(k, 2), y: TAU * radical_inverse(k, 3) }).collect()
}

/// Max over m Halton points of the torus distance between `T(p)` and `S(p)`;
/// a lower bound for the true sup-distance.
pub fn rho_distance(t: &BaseMap, s: &BaseMap, m: usize) -> f64 {
    halton_points(m).iter().map(|&p| t.step(p).dist(&s.step(p))).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct LaxApproximation {
    pub cube: CubeExchange,
    /// Cycle lengths of the matched permutation before repair, descending.
    pub matched_cycles: Vec<usize>,
    pub repair_swaps: usize,
    pub exact_matching: bool,
    /// Total overlap count kept by the matching (16 samples per cell).
    pub matched_overlap: u64,
}

const SUB: usize = 4;

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Approximates `t` by an n×n cube exchange: overlap weights from a 4×4
/// subcell lattice, maximum-weight assignment (distance of the cell image
/// breaks ties), then repair into a single cycle.
pub fn lax_approximate(t: &BaseMap, n: usize, exec: Exec) -> Result<LaxApproximation> {
    if n == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let grid = CubeExchange::identity(n);
    let cells = n * n;
    let h = grid.cell_size();
    let overlaps: Vec<(TorusPoint, Vec<(usize, u32)>)> = exec::map_indexed(exec, cells, |i| {
        let c = grid.cell_corner(i);
        let mut counts: Vec<(usize, u32)> = Vec::new();
        for a in 0..SUB {
            for b in 0..SUB {
                let p = TorusPoint { x: c.x + (a as f64 + 0.5) * h / SUB as f64, y: c.y + (b as f64 + 0.5) * h / SUB as f64 };
                let q = t.step(p);
                if !(q.x.is_finite() && q.y.is_finite()) {
                    continue;
                }
                let j = grid.cell_of(q);
                match counts.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += 1,
                    None => counts.push((j, 1)),
                }
            }
        }
        (t.step(grid.cell_center(i)), counts)
    });
    if overlaps.iter().all(|(_, c)| c.is_empty()) {
        return Err(Error::DegenerateOverlap("no sample image landed in any cell".into()));
    }
    let disp = |i: usize, j: usize| overlaps[i].0.dist(&grid.cell_center(j));
    let exact = cells <= HUNGARIAN_MAX_CELLS;
    let mut perm = if exact {
        let weights: Vec<i64> = exec::map_indexed(exec, cells, |i| {
            let mut row = vec![0i64; cells];
            for (j, r) in row.iter_mut().enumerate() {
                *r = -((disp(i, j) / h * 1000.0).round() as i64);
            }
            for &(j, c) in &overlaps[i].1 {
                row[j] += c as i64 * 10_000_000;
            }
            row
        })
        .into_iter()
        .flatten()
        .collect();
        let m = Matrix::from_vec(cells, cells, weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        kuhn_munkres(&m).1
    } else {
        greedy_assignment(&overlaps, cells, &disp)
    };
    let matched_overlap: u64 = (0..cells)
        .map(|i| overlaps[i].1.iter().find(|e| e.0 == perm[i]).map_or(0, |e| e.1 as u64))
        .sum();
    let mut matched_cycles: Vec<usize> = cycles_of(&perm).iter().map(|c| c.len()).collect();
    matched_cycles.sort_unstable_by(|a, b| b.cmp(a));
    let repair_swaps = repair_cycles(&mut perm, n, &disp);
    let cube = CubeExchange::new(n, perm)?;
    Ok(LaxApproximation { cube, matched_cycles, repair_swaps, exact_matching: exact, matched_overlap })
}

fn greedy_assignment(overlaps: &[(TorusPoint, Vec<(usize, u32)>)], cells: usize, disp: &dyn Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut cand: Vec<(u32, usize, usize)> = Vec::new();
    for (i, (_, cs)) in overlaps.iter().enumerate() {
        for &(j, c) in cs {
            cand.push((c, i, j));
        }
    }
    cand.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut perm = vec![usize::MAX; cells];
    let mut taken = vec![false; cells];
    for (_, i, j) in cand {
        if perm[i] == usize::MAX && !taken[j] {
            perm[i] = j;
            taken[j] = true;
        }
    }
    let mut free: Vec<usize> = (0..cells).filter(|&j| !taken[j]).collect();
    for i in 0..cells {
        if perm[i] != usize::MAX {
            continue;
        }
        let (k, _) = free
            .iter()
            .enumerate()
            .map(|(k, &j)| (k, disp(i, j)))
            .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
        perm[i] = free.swap_remove(k);
    }
    perm
}

/// Merges the cycles of `perm` into one by exchanging the images of
/// neighbouring cells that lie on different cycles, cheapest added
/// displacement first. Returns the number of exchanges.
fn repair_cycles(perm: &mut [usize], n: usize, disp: &dyn Fn(usize, usize) -> f64) -> usize {
    let cells = perm.len();
    let mut sets = DisjointSets((0..cells).collect());
    let mut count = cycles_of(perm).len();
    for c in cycles_of(perm) {
        for w in c.windows(2) {
            sets.union(w[0], w[1]);
        }
    }
    if count <= 1 {
        return 0;
    }
    let key = |v: f64| (v * 1e9) as u64;
    let cost = |perm: &[usize], a: usize, b: usize| disp(a, perm[b]).max(disp(b, perm[a]));
    let mut heap = BinaryHeap::new();
    for a in 0..cells {
        let (ax, ay) = (a % n, a / n);
        for (dx, dy) in [(1usize, 0usize), (0, 1), (1, 1), (n - 1, 1)] {
            let b = (ay + dy) % n * n + (ax + dx) % n;
            if b != a {
                heap.push(Reverse((key(cost(perm, a, b)), a.min(b), a.max(b))));
            }
        }
    }
    let mut swaps = 0;
    while count > 1 {
        let Some(Reverse((k, a, b))) = heap.pop() else { break };
        if sets.find(a) == sets.find(b) {
            continue;
        }
        let kc = key(cost(perm, a, b));
        if kc > k {
            heap.push(Reverse((kc, a, b)));
            continue;
        }
        perm.swap(a, b);
        sets.union(a, b);
        count -= 1;
        swaps += 1;
    }
    // disconnected leftovers cannot occur on the torus grid, but stay safe
    for a in 1..cells {
        if sets.find(a) != sets.find(0) {
            perm.swap(0, a);
            sets.union(0, a);
            swaps += 1;
        }
    }
    swaps
}

/// Exponent over the cycle `x_k = x0 + offset_k`:
/// `(1/p) log ρ(A(x_{p−1}) ⋯ A(x_0))`.
fn cycle_exponent(cfg: &Cocycle2, xs: impl Iterator<Item = f64>) -> f64 {
    let mut m = Mat2::<C64>::identity();
    let mut log_acc = 0.0;
    let mut p = 0usize;
    for x in xs {
        m = one_step_matrix(x, cfg, Form::A).mul(&m);
        p += 1;
        if p % 8 == 0 {
            let s = m.max_col_norm();
            m = m.scale(1.0 / s);
            log_acc += s.ln();
        }
    }
    (log_acc + m.spectral_radius().ln()) / p as f64
}

/// Average over `q` midpoint nodes per cell of `(1/p) log ρ(A^p)` over a
/// periodic base; the cocycle depends on x only.
pub fn periodic_lyapunov(base: &BaseMap, cfg: &Cocycle2, q: usize) -> Result<f64> {
    let q = q.max(1);
    match base {
        BaseMap::Identity => {
            let h = TAU / q as f64;
            Ok((0..q).map(|k| cycle_exponent(cfg, std::iter::once((k as f64 + 0.5) * h))).sum::<f64>() / q as f64)
        }
        BaseMap::CubeExchange(c) => {
            let h = c.cell_size();
            let total: f64 = c
                .cycles()
                .iter()
                .map(|cyc| {
                    let s: f64 = (0..q)
                        .map(|k| {
                            let u = (k as f64 + 0.5) * h / q as f64;
                            cycle_exponent(cfg, cyc.iter().map(|&i| c.cell_corner(i).x + u))
                        })
                        .sum();
                    s / q as f64 * cyc.len() as f64
                })
                .sum();
            Ok(total / (c.n * c.n) as f64)
        }
        BaseMap::AnnulusPermutation(a) => Ok(annulus_exponent(a, cfg, q)),
        _ => Err(Error::InvalidArgument(format!("base '{}' is not a periodic cell permutation", base.name()))),
    }
}

fn annulus_exponent(a: &AnnulusPermutation, cfg: &Cocycle2, q: usize) -> f64 {
    let n = a.n();
    let h = TAU / n as f64;
    let total: f64 = a
        .cycles()
        .iter()
        .map(|cyc| {
            let s: f64 = (0..q)
                .map(|k| {
                    let u = (k as f64 + 0.5) * h / q as f64;
                    cycle_exponent(cfg, cyc.iter().map(|&j| j as f64 * h + u))
                })
                .sum();
            s / q as f64 * cyc.len() as f64
        })
        .sum();
    total / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermutationMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct PermutationReport {
    /// Sorted values of `μ(A_{T_π}) − log(λ/2)`.
    pub exceedances: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub fraction_negative: f64,
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exponent excess of `A_{0, λcos}` over cyclic annulus permutations of
/// `{0, …, n−1}`: all `(n−1)!` cycles, or a random sample.
pub fn permutation_experiment(n: usize, lambda: f64, mode: PermutationMode, q: usize, exec: Exec) -> Result<PermutationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let orders: Vec<Vec<usize>> = match mode {
        PermutationMode::Exhaustive => {
            if n > 10 {
                return Err(Error::InvalidArgument("exhaustive mode needs n ≤ 10".into()));
            }
            let mut rest: Vec<usize> = (1..n).collect();
            let mut out = Vec::new();
            loop {
                let mut o = vec![0];
                o.extend_from_slice(&rest);
                out.push(o);
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            out
        }
        PermutationMode::Sampled { count, seed } => exec::map_indexed(exec, count, |k| {
            let mut r = crate::rng::stream(seed, k as u64);
            let mut rest: Vec<usize> = (1..n).collect();
            rest.shuffle(&mut r);
            let mut o = vec![0];
            o.extend(rest);
            o
        }),
    };
    let cfg = Cocycle2::cos(0.0, lambda, BaseMap::Identity);
    let half = (lambda / 2.0).ln();
    let mut ex: Vec<f64> = exec::map_slice(exec, &orders, |o| {
        let a = AnnulusPermutation::from_cycle(o).expect("cycle order is a permutation");
        annulus_exponent(&a, &cfg, q) - half
    });
    ex.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ex.len() as f64;
    Ok(PermutationReport {
        mean: ex.iter().sum::<f64>() / k,
        min: ex[0],
        max: ex[ex.len() - 1],
        fraction_negative: ex.iter().filter(|&&v| v < 0.0).count() as f64 / k,
        exceedances: ex,
    })
}

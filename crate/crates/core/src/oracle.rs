//! Brute-force ground truth on equi-quantile samples: two independent
//! bottleneck matchings and randomized couplings inside a displacement band.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::Measure1D;
use crate::structure::{DiscretePlan, PlanAtom};

/// Default size cap of the threshold oracle.
pub const DEFAULT_MATCHING_CAP: usize = 2000;

/// Slack added to the band in [`band_feasible_coupling`].
pub const BAND_TOL: f64 = 1e-9;

/// Sorted sample points with uniform weights `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<f64>,
}

impl SampleSet {
    pub fn new(mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        Self { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }
}

/// Quantiles of `m` at the levels `(k − ½)/n · mass(m)`, `k = 1..n`.
pub fn sample_quantile_grid(m: &Measure1D, n: usize) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let mass = m.mass();
    let points = (1..=n).map(|k| m.quantile((k as f64 - 0.5) / n as f64 * mass)).collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::new(points))
}

fn same_size(xs: &SampleSet, ys: &SampleSet) -> Result<()> {
    if xs.len() == ys.len() {
        Ok(())
    } else {
        Err(Error::SizeMismatch { left: xs.len(), right: ys.len() })
    }
}

/// Bottleneck value of the order-preserving matching, optimal on the line.
pub fn sorted_matching_bottleneck(xs: &SampleSet, ys: &SampleSet) -> Result<f64> {
    same_size(xs, ys)?;
    Ok(xs.points.iter().zip(&ys.points).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Bottleneck value by selection over the exact pairwise distances, each
/// probe decided by a maximum bipartite matching.
pub fn threshold_matching_bottleneck(xs: &SampleSet, ys: &SampleSet) -> Result<f64> {
    threshold_matching_bottleneck_with_cap(xs, ys, DEFAULT_MATCHING_CAP)
}

pub fn threshold_matching_bottleneck_with_cap(xs: &SampleSet, ys: &SampleSet, cap: usize) -> Result<f64> {
    same_size(xs, ys)?;
    if xs.len() > cap {
        return Err(Error::CapExceeded { size: xs.len(), cap });
    }
    if xs.is_empty() {
        return Ok(0.0);
    }
    let mut candidates: Vec<f64> =
        xs.points.iter().flat_map(|x| ys.points.iter().map(move |y| (x - y).abs())).collect();
    // The largest distance always admits a perfect matching, so the answer
    // never leaves the candidate pool.
    while candidates.len() > 1 {
        let k = (candidates.len() - 1) / 2;
        let (_, &mut pivot, _) = candidates.select_nth_unstable_by(k, f64::total_cmp);
        if BandGraph::new(&xs.points, &ys.points, pivot).max_matching() == xs.len() {
            candidates.truncate(k + 1);
        } else {
            candidates.drain(..=k);
        }
    }
    Ok(candidates[0])
}

/// Bipartite graph `x_i ~ y_j ⇔ |x_i − y_j| ≤ λ` on sorted points. Every
/// left vertex sees a contiguous range of right vertices.
struct BandGraph {
    ranges: Vec<(usize, usize)>,
    n_right: usize,
}

impl BandGraph {
    fn new(xs: &[f64], ys: &[f64], lambda: f64) -> Self {
        let ranges = xs
            .iter()
            .map(|&x| {
                let lo = ys.partition_point(|&y| y < x && x - y > lambda);
                let hi = ys.partition_point(|&y| y <= x || y - x <= lambda);
                (lo, hi)
            })
            .collect();
        Self { ranges, n_right: ys.len() }
    }

    /// Hopcroft–Karp. Right vertices are skipped in amortised constant time
    /// with a "next alive" union-find, so each phase is near linear.
    fn max_matching(&self) -> usize {
        let n = self.ranges.len();
        let mut pair_l: Vec<Option<usize>> = vec![None; n];
        let mut pair_r: Vec<Option<usize>> = vec![None; self.n_right];
        let mut size = 0;
        loop {
            let mut layer_l = vec![usize::MAX; n];
            let mut layer_r = vec![usize::MAX; self.n_right];
            let mut alive = NextAlive::new(self.n_right);
            let mut queue = std::collections::VecDeque::new();
            for i in 0..n {
                if pair_l[i].is_none() {
                    layer_l[i] = 0;
                    queue.push_back(i);
                }
            }
            let mut limit = usize::MAX;
            while let Some(i) = queue.pop_front() {
                let l = layer_l[i];
                if l > limit {
                    break;
                }
                let (lo, hi) = self.ranges[i];
                let mut j = alive.find(lo);
                while j < hi {
                    alive.remove(j);
                    layer_r[j] = l;
                    match pair_r[j] {
                        None => limit = limit.min(l),
                        Some(k) => {
                            layer_l[k] = l + 1;
                            queue.push_back(k);
                        }
                    }
                    j = alive.find(j + 1);
                }
            }
            if limit == usize::MAX {
                return size;
            }

            let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); limit + 1];
            for (j, &l) in layer_r.iter().enumerate() {
                if l <= limit {
                    by_layer[l].push(j);
                }
            }
            let mut layers: Vec<LayerSet> = by_layer.into_iter().map(LayerSet::new).collect();
            let mut found = 0;
            for i in 0..n {
                if pair_l[i].is_none() && self.augment(i, 0, limit, &mut layers, &mut pair_l, &mut pair_r) {
                    found += 1;
                }
            }
            if found == 0 {
                return size;
            }
            size += found;
        }
    }

    fn augment(
        &self,
        i: usize,
        l: usize,
        limit: usize,
        layers: &mut [LayerSet],
        pair_l: &mut [Option<usize>],
        pair_r: &mut [Option<usize>],
    ) -> bool {
        let (lo, hi) = self.ranges[i];
        while let Some(j) = layers[l].take_in(lo, hi) {
            let ok = match pair_r[j] {
                None => true,
                Some(k) => l < limit && self.augment(k, l + 1, limit, layers, pair_l, pair_r),
            };
            if ok {
                pair_l[i] = Some(j);
                pair_r[j] = Some(i);
                return true;
            }
        }
        false
    }
}

/// Union-find over `0..=n` returning the smallest alive index `≥ j`.
struct NextAlive {
    parent: Vec<usize>,
}

impl NextAlive {
    fn new(n: usize) -> Self {
        Self { parent: (0..=n).collect() }
    }

    fn find(&mut self, mut j: usize) -> usize {
        let mut root = j;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[j] != root {
            let next = self.parent[j];
            self.parent[j] = root;
            j = next;
        }
        root
    }

    fn remove(&mut self, j: usize) {
        self.parent[j] = j + 1;
    }
}

/// Right vertices discovered at one BFS layer, removable once visited.
struct LayerSet {
    members: Vec<usize>,
    alive: NextAlive,
}

impl LayerSet {
    fn new(members: Vec<usize>) -> Self {
        let alive = NextAlive::new(members.len());
        Self { members, alive }
    }

    fn take_in(&mut self, lo: usize, hi: usize) -> Option<usize> {
        let start = self.members.partition_point(|&j| j < lo);
        let pos = self.alive.find(start);
        let j = *self.members.get(pos)?;
        if j >= hi {
            return None;
        }
        self.alive.remove(pos);
        Some(j)
    }
}

/// A random perfect matching using only pairs with `|x − y| ≤ λ + BAND_TOL`,
/// as a plan with weights `1/n`. Deterministic for a given seed.
pub fn band_feasible_coupling(xs: &SampleSet, ys: &SampleSet, lambda: f64, seed: u64) -> Result<DiscretePlan> {
    same_size(xs, ys)?;
    let n = xs.len();
    if n == 0 {
        return Ok(DiscretePlan::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = BandGraph::new(&xs.points, &ys.points, lambda + BAND_TOL);
    let mut pair_l: Vec<Option<usize>> = vec![None; n];
    let mut pair_r: Vec<Option<usize>> = vec![None; n];

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &i in &order {
        let (lo, hi) = graph.ranges[i];
        if lo >= hi {
            return Err(Error::Infeasible { lambda });
        }
        let free: Vec<usize> = (lo..hi).filter(|&j| pair_r[j].is_none()).collect();
        if !free.is_empty() {
            let j = free[rng.gen_range(0..free.len())];
            pair_l[i] = Some(j);
            pair_r[j] = Some(i);
        }
    }

    for &i in &order {
        if pair_l[i].is_some() {
            continue;
        }
        if !random_augment(&graph, i, &mut pair_l, &mut pair_r, &mut rng) {
            return Err(Error::Infeasible { lambda });
        }
    }

    let w = 1.0 / n as f64;
    let atoms =
        (0..n).map(|i| PlanAtom { x: xs.points[i], y: ys.points[pair_l[i].expect("perfect matching")], w }).collect();
    Ok(DiscretePlan::new(atoms))
}

/// Breadth-first augmenting path from the free left vertex `start`, scanning
/// neighbours in a random order.
fn random_augment(
    graph: &BandGraph,
    start: usize,
    pair_l: &mut [Option<usize>],
    pair_r: &mut [Option<usize>],
    rng: &mut ChaCha8Rng,
) -> bool {
    let n_right = pair_r.len();
    let mut came_from: Vec<Option<usize>> = vec![None; n_right];
    let mut seen = vec![false; n_right];
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let (lo, hi) = graph.ranges[i];
        let mut nbrs: Vec<usize> = (lo..hi).filter(|&j| !seen[j]).collect();
        nbrs.shuffle(rng);
        for j in nbrs {
            seen[j] = true;
            came_from[j] = Some(i);
            match pair_r[j] {
                Some(k) => queue.push_back(k),
                None => {
                    let mut j = j;
                    loop {
                        let i = came_from[j].expect("reached through the tree");
                        let prev = pair_l[i];
                        pair_l[i] = Some(j);
                        pair_r[j] = Some(i);
                        match prev {
                            Some(p) if i != start => j = p,
                            _ => return true,
                        }
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::measure_from_pieces;

    fn set(v: &[f64]) -> SampleSet {
        SampleSet::new(v.to_vec())
    }

    #[test]
    fn quantile_grids() {
        let u = Measure1D::uniform(0.0, 1.0).unwrap();
        assert_eq!(sample_quantile_grid(&u, 2).unwrap().points(), &[0.25, 0.75]);
        let u12 = Measure1D::uniform(1.0, 2.0).unwrap();
        assert_eq!(sample_quantile_grid(&u12, 4).unwrap().points(), &[1.125, 1.375, 1.625, 1.875]);
        let split = measure_from_pieces(&[(0.0, 1.0, 0.5), (3.0, 4.0, 0.5)]).unwrap();
        assert_eq!(sample_quantile_grid(&split, 2).unwrap().points(), &[0.5, 3.5]);
        assert!(sample_quantile_grid(&u, 0).is_err());
    }

    #[test]
    fn bottleneck_examples() {
        let cases: [(&[f64], &[f64], f64); 3] = [
            (&[0.0, 0.5, 1.0], &[1.0, 1.5, 2.0], 1.0),
            (&[0.0, 1.0], &[0.9, 1.1], 0.9),
            (&[0.3, 0.7], &[0.3, 0.7], 0.0),
        ];
        for (a, b, want) in cases {
            assert_eq!(sorted_matching_bottleneck(&set(a), &set(b)).unwrap(), want);
            assert_eq!(threshold_matching_bottleneck(&set(a), &set(b)).unwrap(), want);
        }
        assert_eq!(
            sorted_matching_bottleneck(&set(&[0.0]), &set(&[0.0, 1.0])),
            Err(Error::SizeMismatch { left: 1, right: 2 })
        );
        let big = SampleSet::new((0..5).map(f64::from).collect());
        assert_eq!(threshold_matching_bottleneck_with_cap(&big, &big, 4), Err(Error::CapExceeded { size: 5, cap: 4 }));
    }

    #[test]
    fn band_couplings() {
        let (xs, ys) = (set(&[0.0, 1.0]), set(&[0.9, 1.1]));
        for seed in 0..20 {
            let plan = band_feasible_coupling(&xs, &ys, 1.1, seed).unwrap();
            assert_eq!(plan.atoms().len(), 2);
            assert!(plan.max_displacement() <= 1.1 + BAND_TOL);
        }
        assert_eq!(band_feasible_coupling(&xs, &ys, 0.5, 3), Err(Error::Infeasible { lambda: 0.5 }));
        assert_eq!(
            band_feasible_coupling(&xs, &ys, 0.9, 1).unwrap(),
            band_feasible_coupling(&xs, &ys, 0.9, 1).unwrap()
        );
    }
}

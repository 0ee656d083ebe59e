//! Structural certificates: robust and eternal sets, minimal eternal-set
//! search, worst-case extinction times for sparse starts, the
//! rectangle-merging clustering procedure, and the constructive
//! white-robust witness families.

use crate::bits::Bits;
use crate::dynamics::{evolve, UpdateRule};
use crate::error::{Error, Result};
use crate::lattice::{
    bounding_rect, rect_distance, Configuration, Coord, HyperRectangle, TorusShape,
};
use crate::util::{binomial, for_each_combination, map_indexed};
use serde::{Deserialize, Serialize};

/// A set of nodes, stored both ways: as a bitmap for the kernels and as
/// coordinates for the combinatorial constructions.
#[derive(Clone, PartialEq, Eq)]
pub struct NodeSet {
    shape: TorusShape,
    bits: Bits,
}

impl NodeSet {
    pub fn empty(shape: TorusShape) -> Self {
        NodeSet {
            shape,
            bits: Bits::zeros(shape.nodes()),
        }
    }

    pub fn from_coords<'a, I>(shape: TorusShape, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Coord>,
    {
        let mut s = NodeSet::empty(shape);
        for v in coords {
            shape.check_coord(v)?;
            s.bits.set(shape.index_of(v), true);
        }
        Ok(s)
    }

    pub fn from_indices(shape: TorusShape, indices: &[usize]) -> Self {
        let mut s = NodeSet::empty(shape);
        for &i in indices {
            s.bits.set(i, true);
        }
        s
    }

    pub fn shape(&self) -> TorusShape {
        self.shape
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.none_set()
    }

    pub fn contains(&self, v: &Coord) -> Result<bool> {
        self.shape.check_coord(v)?;
        Ok(self.bits.get(self.shape.index_of(v)))
    }

    pub fn coords(&self) -> Vec<Coord> {
        self.bits
            .iter_ones()
            .map(|i| self.shape.coord_of(i))
            .collect()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.bits.intersects(&other.bits)
    }

    /// The configuration with exactly this set black.
    pub fn to_black_config(&self) -> Configuration {
        Configuration::from_bits(self.shape, self.bits.clone())
    }
}

impl std::fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NodeSet({} nodes)", self.len())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

/// Local-degree robustness certificate for two-way r-BP.
///
/// Black: every member has at least `r` neighbors inside the set (once all
/// black, the set stays black forever). White: every member has at least
/// `2d - r + 1` neighbors inside the set, i.e. fewer than `r` outside.
///
/// The empty set is rejected rather than vacuously accepted.
pub fn is_robust(s: &NodeSet, r: u32, color: Color) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let shape = s.shape();
    if r == 0 || r as usize > shape.degree() {
        return Err(Error::InvalidArgument(format!(
            "robustness threshold r={r} outside 1..=2d"
        )));
    }
    let need = match color {
        Color::Black => r as usize,
        Color::White => shape.degree() + 1 - r as usize,
    };
    for idx in s.indices() {
        let v = shape.coord_of(idx);
        let inside = shape
            .neighbors(&v)?
            .iter()
            .filter(|u| s.bits.get(shape.index_of(u)))
            .count();
        if inside < need {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether color black survives forever from the worst-case start where
/// exactly `s` is black.
///
/// For a monotone rule (`retention <= activation`, which `validate`
/// enforces) this start is dominated by every configuration in which `s` is
/// black, so a positive answer certifies eternity for any such
/// configuration. Truncation before a cycle is found is reported as an
/// error, never as a verdict.
pub fn check_eternal(s: &NodeSet, rule: &UpdateRule, max_rounds: usize) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let out = evolve(&s.to_black_config(), rule, max_rounds)?;
    if out.truncated {
        return Err(Error::Truncated { max_rounds });
    }
    Ok(out.black_survives())
}

/// Union of the black nodes over the configurations of the limit cycle
/// reached from `c0`. For two-way r-BP this union is an (r,b)-robust set
/// whenever it is non-empty, which makes it a convenient generator of
/// robust sets.
pub fn cycle_black_union(
    c0: &Configuration,
    rule: &UpdateRule,
    max_rounds: usize,
) -> Result<NodeSet> {
    let out = evolve(c0, rule, max_rounds)?;
    if out.truncated {
        return Err(Error::Truncated { max_rounds });
    }
    let mut bits = Bits::zeros(c0.shape().nodes());
    for c in &out.cycle {
        bits.union_with(c.bits());
    }
    Ok(NodeSet {
        shape: c0.shape(),
        bits,
    })
}

// ---------------------------------------------------------------------------
// Window-based exhaustive searches
// ---------------------------------------------------------------------------

/// Default search window radius: the distance-3 isolation argument keeps any
/// candidate of size <= 2^(r-1) inside a box of this size once translated to
/// the origin.
pub fn default_window_radius(r: u32) -> usize {
    (1usize << (r - 1)) + 2
}

/// Torus side that isolates the search window from its own wraparound.
fn embedding_side(window_radius: usize) -> usize {
    2 * window_radius + 5
}

const ENUMERATION_GUARD: usize = 1_000_000_000;

/// Cells of the window box `[0, radius]^d`, as coordinates of `shape`.
fn window_cells(shape: &TorusShape, radius: usize) -> Vec<Coord> {
    let w = radius + 1;
    let mut cells = Vec::with_capacity(w.pow(shape.dim() as u32));
    let mut cur = vec![0usize; shape.dim()];
    loop {
        cells.push(Coord(cur.clone()));
        let mut j = 0;
        loop {
            if j == shape.dim() {
                return cells;
            }
            cur[j] += 1;
            if cur[j] < w {
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

/// A subset is anchored when its componentwise minimum is the origin; every
/// subset is a translate of exactly one anchored subset, and the dynamics
/// are translation equivariant.
fn is_anchored(cells: &[Coord], chosen: &[usize], d: usize) -> bool {
    (0..d).all(|j| chosen.iter().any(|&i| cells[i].components()[j] == 0))
}

/// Smallest `k <= size_bound` such that some `k`-node set inside the search
/// window is eternal under `rule`, searching anchored subsets exhaustively
/// in lexicographic order. Returns `None` if no set up to the bound is
/// eternal.
///
/// The window is embedded in a torus large enough that wraparound cannot
/// reconnect a candidate with itself, and candidates are canonicalized by
/// translation (componentwise minimum at the origin).
pub fn min_eternal_size(
    rule: &UpdateRule,
    d: usize,
    size_bound: usize,
    window_radius: usize,
) -> Result<Option<usize>> {
    let shape = TorusShape::new(d, embedding_side(window_radius))?;
    rule.validate(&shape)?;
    let cells = window_cells(&shape, window_radius);
    let max_rounds = crate::dynamics::default_max_rounds(&shape);
    for k in 1..=size_bound {
        if binomial(cells.len(), k) > ENUMERATION_GUARD {
            return Err(Error::SearchBudget(format!(
                "C({}, {k}) subsets exceed the enumeration guard",
                cells.len()
            )));
        }
        let found = stream_anchored(&cells, d, k, |chosen| {
            let set = NodeSet::from_coords(shape, chosen.iter().map(|&i| &cells[i]))
                .expect("window cells are valid");
            check_eternal(&set, rule, max_rounds)
        })?;
        if found.is_some() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Stream anchored `k`-subsets of `cells` in lexicographic order through `f`
/// in parallel batches, stopping at the first subset for which `f` is true.
/// Returns that subset. Errors propagate.
fn stream_anchored(
    cells: &[Coord],
    d: usize,
    k: usize,
    f: impl Fn(&[usize]) -> Result<bool> + Sync,
) -> Result<Option<Vec<usize>>> {
    const CHUNK: usize = 4096;
    let mut batch: Vec<Vec<usize>> = Vec::with_capacity(CHUNK);
    let mut found: Option<Vec<usize>> = None;
    let mut stop_err: Option<Error> = None;

    let flush = |batch: &mut Vec<Vec<usize>>| -> Result<Option<Vec<usize>>> {
        let hits = map_indexed(batch.len(), |i| f(&batch[i]));
        for (chosen, hit) in batch.iter().zip(hits) {
            if hit? {
                return Ok(Some(chosen.clone()));
            }
        }
        batch.clear();
        Ok(None)
    };

    for_each_combination(cells.len(), k, |chosen| {
        if is_anchored(cells, chosen, d) {
            batch.push(chosen.to_vec());
            if batch.len() == CHUNK {
                match flush(&mut batch) {
                    Ok(Some(hit)) => {
                        found = Some(hit);
                        return false;
                    }
                    Ok(None) => {}
                    Err(e) => {
                        stop_err = Some(e);
                        return false;
                    }
                }
            }
        }
        true
    });
    if let Some(e) = stop_err {
        return Err(e);
    }
    if found.is_none() {
        found = flush(&mut batch)?;
    }
    Ok(found)
}

/// Report from the exhaustive sparse-extinction search.
#[derive(Clone, Debug, Serialize)]
pub struct ExtinctionReport {
    /// Largest observed rounds-to-all-white among placements that died.
    pub max_rounds_to_white: usize,
    /// A placement attaining the maximum (anchored coordinates).
    pub worst_placement: Vec<Coord>,
    /// First surviving placement found, if any. When set, enumeration
    /// stopped there and `max_rounds_to_white` covers only the placements
    /// examined before it.
    pub survivor: Option<Vec<Coord>>,
    /// Placements whose run hit the round cap without resolving; each is
    /// counted here rather than crashing the search.
    pub capped: usize,
    /// Anchored placements examined.
    pub placements: usize,
}

/// Exhaustively run two-way r-BP from every anchored placement of exactly
/// `k` black nodes inside the window and report the worst extinction time,
/// or the first survivor.
///
/// Placements of fewer than `k` nodes are covered by monotonicity: a subset
/// start is dominated by a superset start, so it dies no later and survives
/// only if the superset does.
pub fn max_extinction_time(
    d: usize,
    r: u32,
    k: usize,
    window_radius: usize,
    round_cap: usize,
) -> Result<ExtinctionReport> {
    if k == 0 {
        return Err(Error::EmptySet);
    }
    let shape = TorusShape::new(d, embedding_side(window_radius))?;
    let rule = UpdateRule::two_way(r);
    rule.validate(&shape)?;
    let cells = window_cells(&shape, window_radius);
    if binomial(cells.len(), k) > ENUMERATION_GUARD {
        return Err(Error::SearchBudget(format!(
            "C({}, {k}) placements exceed the enumeration guard",
            cells.len()
        )));
    }

    struct Partial {
        max_t: usize,
        worst: Vec<usize>,
        capped: usize,
        examined: usize,
        survivor: Option<Vec<usize>>,
    }

    let eval = |chosen: &Vec<usize>| -> Result<(usize, bool, bool)> {
        let cfg = Configuration::from_black_coords(shape, chosen.iter().map(|&i| &cells[i]))
            .expect("window cells are valid");
        let out = evolve(&cfg, &rule, round_cap)?;
        if out.truncated {
            return Ok((0, false, true));
        }
        if out.black_survives() {
            return Ok((0, true, false));
        }
        Ok((out.consensus_time, false, false))
    };

    let mut report = Partial {
        max_t: 0,
        worst: Vec::new(),
        capped: 0,
        examined: 0,
        survivor: None,
    };

    const CHUNK: usize = 4096;
    let mut batch: Vec<Vec<usize>> = Vec::with_capacity(CHUNK);
    let flush = |batch: &mut Vec<Vec<usize>>, report: &mut Partial| -> Result<bool> {
        let results = map_indexed(batch.len(), |i| eval(&batch[i]));
        for (chosen, res) in batch.iter().zip(results) {
            let (t, survives, capped) = res?;
            report.examined += 1;
            if capped {
                report.capped += 1;
            } else if survives {
                report.survivor = Some(chosen.clone());
                return Ok(true);
            } else if t > report.max_t {
                report.max_t = t;
                report.worst = chosen.clone();
            }
        }
        batch.clear();
        Ok(false)
    };

    let mut stop_err: Option<Error> = None;
    let mut stopped = false;
    for_each_combination(cells.len(), k, |chosen| {
        if is_anchored(&cells, chosen, d) {
            batch.push(chosen.to_vec());
            if batch.len() == CHUNK {
                match flush(&mut batch, &mut report) {
                    Ok(found) => {
                        if found {
                            stopped = true;
                            return false;
                        }
                    }
                    Err(e) => {
                        stop_err = Some(e);
                        return false;
                    }
                }
            }
        }
        true
    });
    if let Some(e) = stop_err {
        return Err(e);
    }
    if !stopped {
        flush(&mut batch, &mut report)?;
    }

    Ok(ExtinctionReport {
        max_rounds_to_white: report.max_t,
        worst_placement: report.worst.iter().map(|&i| cells[i].clone()).collect(),
        survivor: report
            .survivor
            .map(|v| v.iter().map(|&i| cells[i].clone()).collect()),
        capped: report.capped,
        placements: report.examined,
    })
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

/// Output of the rectangle-merging procedure.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub rects: Vec<HyperRectangle>,
    /// Black nodes inside each rectangle.
    pub black_counts: Vec<usize>,
    /// Minimum pairwise rectangle distance; `None` with fewer than two
    /// rectangles.
    pub min_pairwise_distance: Option<usize>,
    /// True iff every count is below `2^(r-1)` and all pairwise distances
    /// are at least 3, the certificate that the configuration dies.
    pub phase1_certificate: bool,
}

/// Group the black nodes of `c` into minimal bounding rectangles of their
/// connected components, then repeatedly merge the lexicographically
/// smallest pair of rectangles at distance <= 2 until all pairs are at
/// distance >= 3.
pub fn cluster_black_nodes(c: &Configuration, r: u32) -> Result<ClusterReport> {
    cluster_with_order(c, r, None)
}

/// Same procedure, but each iteration merges a pseudo-randomly chosen
/// violating pair instead of the lexicographically smallest one. The
/// certificate is insensitive to merge order; this entry point exists so
/// replays can check that.
pub fn cluster_black_nodes_shuffled(c: &Configuration, r: u32, seed: u64) -> Result<ClusterReport> {
    cluster_with_order(c, r, Some(seed))
}

fn cluster_with_order(
    c: &Configuration,
    r: u32,
    shuffle_seed: Option<u64>,
) -> Result<ClusterReport> {
    let shape = c.shape();
    let threshold = 1usize << (r - 1);

    // Connected components of the black set (BFS over torus adjacency).
    let mut comp_of = vec![usize::MAX; shape.nodes()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in c.bits().iter_ones() {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut queue = vec![start];
        comp_of[start] = id;
        let mut members = Vec::new();
        while let Some(i) = queue.pop() {
            members.push(i);
            let v = shape.coord_of(i);
            for u in shape.neighbors(&v)? {
                let ui = shape.index_of(&u);
                if c.is_black_idx(ui) && comp_of[ui] == usize::MAX {
                    comp_of[ui] = id;
                    queue.push(ui);
                }
            }
        }
        components.push(members);
    }

    struct Cluster {
        rect: HyperRectangle,
        blacks: Vec<Coord>,
    }
    let mut clusters: Vec<Cluster> = Vec::with_capacity(components.len());
    for members in components {
        let blacks: Vec<Coord> = members.iter().map(|&i| shape.coord_of(i)).collect();
        let rect = bounding_rect(&shape, &blacks)?;
        clusters.push(Cluster { rect, blacks });
    }

    // Merge loop. |clusters| strictly decreases, so it terminates.
    let mut iteration = 0u64;
    loop {
        let mut violating: Vec<(usize, usize)> = Vec::new();
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                if rect_distance(&shape, &clusters[a].rect, &clusters[b].rect)? <= 2 {
                    violating.push((a, b));
                }
            }
        }
        let victim = match shuffle_seed {
            // Deterministic tie-breaking: the pair whose rectangle starts
            // are lexicographically smallest.
            None => violating
                .iter()
                .min_by_key(|&&(a, b)| {
                    let (x, y) = (&clusters[a].rect.start, &clusters[b].rect.start);
                    if x <= y {
                        (x.clone(), y.clone())
                    } else {
                        (y.clone(), x.clone())
                    }
                })
                .copied(),
            Some(seed) => {
                iteration += 1;
                if violating.is_empty() {
                    None
                } else {
                    let pick = crate::rng::mix2(seed, iteration) as usize % violating.len();
                    Some(violating[pick])
                }
            }
        };
        let Some((a, b)) = victim else { break };
        let second = clusters.swap_remove(b);
        let first = clusters.swap_remove(if a < b { a } else { a - 1 });
        let mut blacks = first.blacks;
        blacks.extend(second.blacks);
        let rect = bounding_rect(&shape, &blacks)?;
        // Merge side-length bound: a pair at distance <= 2 has a gap of at
        // most 2 in every coordinate, so the merged side cannot exceed
        // l1 + l2 + 2, which is <= 3 max(l1, l2) once the larger side is >= 2.
        for j in 0..shape.dim() {
            let (la, lb) = (first.rect.lengths[j], second.rect.lengths[j]);
            assert!(
                rect.lengths[j] <= la + lb + 2,
                "merge bound violated in dim {j}: {} > {la} + {lb} + 2",
                rect.lengths[j],
            );
            if la.max(lb) >= 2 {
                assert!(rect.lengths[j] <= 3 * la.max(lb));
            }
        }
        clusters.push(Cluster { rect, blacks });
    }

    let rects: Vec<HyperRectangle> = clusters.iter().map(|c| c.rect.clone()).collect();
    let black_counts: Vec<usize> = clusters.iter().map(|c| c.blacks.len()).collect();
    let mut min_dist: Option<usize> = None;
    for a in 0..rects.len() {
        for b in a + 1..rects.len() {
            let dist = rect_distance(&shape, &rects[a], &rects[b])?;
            min_dist = Some(min_dist.map_or(dist, |m| m.min(dist)));
        }
    }
    let phase1_certificate =
        black_counts.iter().all(|&c| c < threshold) && min_dist.is_none_or(|d| d >= 3);
    Ok(ClusterReport {
        rects,
        black_counts,
        min_pairwise_distance: min_dist,
        phase1_certificate,
    })
}

// ---------------------------------------------------------------------------
// White-robust witness families
// ---------------------------------------------------------------------------

/// A validated family of pairwise disjoint (r,w)-robust sets, each
/// intersecting the queried black-robust set.
#[derive(Clone, Debug)]
pub struct WitnessFamily {
    pub witnesses: Vec<NodeSet>,
    /// Which construction branch fired at each recursion level, outermost
    /// first: `"split(j, k1, k2)"` or `"level-pairs(j)"`.
    pub branches: Vec<String>,
}

/// Construct at least `2^(r-1)` pairwise disjoint (r,w)-robust sets
/// intersecting the (r,b)-robust set `s`, following the inductive
/// level-splitting construction; the family is fully validated before it is
/// returned. A failure on an input that passed the robustness check is a
/// bug, reported as [`Error::WitnessConstruction`].
pub fn find_w_robust_witnesses(s: &NodeSet, r: u32) -> Result<WitnessFamily> {
    if !is_robust(s, r, Color::Black)? {
        return Err(Error::InvalidArgument(
            "input set is not (r,b)-robust".into(),
        ));
    }
    let shape = s.shape();
    if shape.side() < 4 {
        return Err(Error::InvalidArgument(
            "witness construction needs side >= 4".into(),
        ));
    }
    let members: Vec<Vec<usize>> = s.coords().iter().map(|c| c.0.clone()).collect();
    let mut branches = Vec::new();
    let raw = build_witnesses(
        shape.dim(),
        shape.side(),
        &members,
        r as usize,
        &mut branches,
    )
    .map_err(Error::WitnessConstruction)?;

    let witnesses: Vec<NodeSet> = raw
        .into_iter()
        .map(|coords| {
            let coords: Vec<Coord> = coords.into_iter().map(Coord).collect();
            NodeSet::from_coords(shape, &coords)
        })
        .collect::<Result<_>>()?;

    // Validate: count, pairwise disjointness, white-robustness, intersection.
    let need = 1usize << (r - 1);
    if witnesses.len() < need {
        return Err(Error::WitnessConstruction(format!(
            "built {} sets, need {need}",
            witnesses.len()
        )));
    }
    for (i, w) in witnesses.iter().enumerate() {
        if !is_robust(w, r, Color::White)? {
            return Err(Error::WitnessConstruction(format!(
                "witness {i} is not (r,w)-robust"
            )));
        }
        if !w.intersects(s) {
            return Err(Error::WitnessConstruction(format!(
                "witness {i} misses the input set"
            )));
        }
        for other in &witnesses[i + 1..] {
            if w.intersects(other) {
                return Err(Error::WitnessConstruction(format!(
                    "witness {i} overlaps a sibling"
                )));
            }
        }
    }
    Ok(WitnessFamily {
        witnesses,
        branches,
    })
}

/// Recursive core working on raw coordinate vectors in a `d`-dimensional
/// torus of the given side. Returns `2^(r-1)` disjoint white-robust sets.
fn build_witnesses(
    d: usize,
    side: usize,
    s: &[Vec<usize>],
    r: usize,
    branches: &mut Vec<String>,
) -> std::result::Result<Vec<Vec<Vec<usize>>>, String> {
    // Pick a coordinate in which the set is not constant.
    let j = (0..d)
        .find(|&j| s.iter().any(|v| v[j] != s[0][j]))
        .ok_or_else(|| "set is constant in every coordinate".to_string())?;

    if r == 2 {
        branches.push(format!("base-split({j})"));
        return base_case(d, side, s, j);
    }

    let occupied: Vec<bool> = {
        let mut occ = vec![false; side];
        for v in s {
            occ[v[j]] = true;
        }
        occ
    };

    // Case B: two disjoint pairs of adjacent levels, each pairing an
    // occupied level with an empty flank.
    let k1s: Vec<usize> = (0..side)
        .filter(|&k| occupied[k] && !occupied[(k + 1) % side])
        .collect();
    let k2s: Vec<usize> = (0..side)
        .filter(|&k| occupied[k] && !occupied[(k + side - 1) % side])
        .collect();
    for &k1 in &k1s {
        for &k2 in &k2s {
            let pair1 = [k1, (k1 + 1) % side];
            let pair2 = [(k2 + side - 1) % side, k2];
            if pair1.iter().any(|x| pair2.contains(x)) {
                continue;
            }
            branches.push(format!("split({j}, {k1}, {k2})"));
            return split_case(d, side, s, j, k1, k2, r, branches);
        }
    }

    // Fallback: enough disjoint adjacent-level pairs already intersect S.
    branches.push(format!("level-pairs({j})"));
    let mut out = Vec::new();
    for m in 0..side / 2 {
        let (a, b) = (2 * m, 2 * m + 1);
        if occupied[a] || occupied[b] {
            out.push(expand_levels(d, side, j, &[a, b]));
        }
        if out.len() == 1 << (r - 1) {
            return Ok(out);
        }
    }
    Err(format!(
        "only {} intersecting level pairs, need {}",
        out.len(),
        1 << (r - 1)
    ))
}

/// All nodes whose `j`-th coordinate lies in `levels` (a slab).
fn expand_levels(d: usize, side: usize, j: usize, levels: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    loop {
        if levels.contains(&cur[j]) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            cur[i] += 1;
            if cur[i] < side {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Base case r = 2: two complementary slabs along coordinate `j`.
fn base_case(
    d: usize,
    side: usize,
    s: &[Vec<usize>],
    j: usize,
) -> std::result::Result<Vec<Vec<Vec<usize>>>, String> {
    let mut values: Vec<usize> = s.iter().map(|v| v[j]).collect();
    values.sort_unstable();
    values.dedup();
    let a = values[0];
    let b = *values.last().unwrap();
    // W1 = levels {a-1, a}, flipped to {a, a+1} when b would land inside.
    let w1_levels = if b == (a + side - 1) % side {
        [a, (a + 1) % side]
    } else {
        [(a + side - 1) % side, a]
    };
    let w1 = expand_levels(d, side, j, &w1_levels);
    let w2_levels: Vec<usize> = (0..side).filter(|k| !w1_levels.contains(k)).collect();
    let w2 = expand_levels(d, side, j, &w2_levels);
    Ok(vec![w1, w2])
}

/// Induction step: split into two occupied levels with empty flanks,
/// recurse in the (d-1)-dimensional sub-tori, and thicken each witness by
/// its copy in the flanking level.
#[allow(clippy::too_many_arguments)]
fn split_case(
    d: usize,
    side: usize,
    s: &[Vec<usize>],
    j: usize,
    k1: usize,
    k2: usize,
    r: usize,
    branches: &mut Vec<String>,
) -> std::result::Result<Vec<Vec<Vec<usize>>>, String> {
    let project = |level: usize| -> Vec<Vec<usize>> {
        s.iter()
            .filter(|v| v[j] == level)
            .map(|v| drop_coord(v, j))
            .collect()
    };
    let lift = |sets: Vec<Vec<Vec<usize>>>, level: usize, partner: usize| {
        sets.into_iter()
            .map(|set| {
                let mut out: Vec<Vec<usize>> =
                    set.iter().map(|v| insert_coord(v, j, level)).collect();
                out.extend(set.iter().map(|v| insert_coord(v, j, partner)));
                out
            })
            .collect::<Vec<_>>()
    };

    let s1 = project(k1);
    let s2 = project(k2);
    if s1.is_empty() || s2.is_empty() {
        return Err("chosen split level does not intersect the set".into());
    }
    let sub1 = build_witnesses(d - 1, side, &s1, r - 1, branches)?;
    let sub2 = build_witnesses(d - 1, side, &s2, r - 1, branches)?;
    let mut out = lift(sub1, k1, (k1 + 1) % side);
    out.extend(lift(sub2, k2, (k2 + side - 1) % side));
    Ok(out)
}

fn drop_coord(v: &[usize], j: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(v.len() - 1);
    out.extend_from_slice(&v[..j]);
    out.extend_from_slice(&v[j + 1..]);
    out
}

fn insert_coord(v: &[usize], j: usize, value: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.extend_from_slice(&v[..j]);
    out.push(value);
    out.extend_from_slice(&v[j..]);
    out
}

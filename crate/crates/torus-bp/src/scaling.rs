//! The scaled process: the tiling viewed as a coarse lattice whose nodes are
//! r-dimensional hyper-squares, square adjacency (inner/outer neighbors),
//! occupation, and the constant-rounds occupation experiments.

use crate::bits::Bits;
use crate::dynamics::{PackedStepper, UpdateRule};
use crate::error::{Error, Result};
use crate::lattice::{tile, Configuration, Coord, HyperSquare, Parity, TorusShape};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum NeighborKind {
    /// Start differs by ±2 in one of the square dimensions; same parity.
    Inner,
    /// Start differs by ±1 in one of the remaining dimensions; opposite
    /// parity.
    Outer,
}

/// One labeled edge of the scaled lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SquareNeighbor {
    pub index: usize,
    pub dim: usize,
    pub sign: Sign,
    pub kind: NeighborKind,
}

/// The tiling of a torus into r-dimensional hyper-squares together with the
/// scaled adjacency: each square has exactly `2d` neighbors, two per
/// dimension: `2r` inner and `2(d-r)` outer.
pub struct ScaledShape {
    base: TorusShape,
    square_dim: usize,
    squares: Vec<HyperSquare>,
    parities: Vec<Parity>,
    neighbors: Vec<Vec<SquareNeighbor>>,
    /// Node indices of each square's even and odd part.
    even_part: Vec<Vec<usize>>,
    odd_part: Vec<Vec<usize>>,
}

impl ScaledShape {
    /// Build the scaled view. Requires an even side: with odd side the
    /// squares at the seam have no tiled partner at offset ±2.
    pub fn new(base: TorusShape, r: usize) -> Result<Self> {
        if !base.side().is_multiple_of(2) {
            return Err(Error::OddSideTiling { side: base.side() });
        }
        let squares = tile(&base, r)?;
        let index_of: HashMap<Vec<usize>, usize> = squares
            .iter()
            .enumerate()
            .map(|(i, sq)| (sq.start.components().to_vec(), i))
            .collect();
        let side = base.side() as isize;
        let mut neighbors = Vec::with_capacity(squares.len());
        for sq in &squares {
            let mut nbrs = Vec::with_capacity(base.degree());
            for dim in 0..base.dim() {
                let (step, kind) = if dim < r {
                    (2isize, NeighborKind::Inner)
                } else {
                    (1isize, NeighborKind::Outer)
                };
                for sign in [Sign::Minus, Sign::Plus] {
                    let delta = match sign {
                        Sign::Minus => -step,
                        Sign::Plus => step,
                    };
                    let mut start = sq.start.components().to_vec();
                    start[dim] = ((start[dim] as isize + delta).rem_euclid(side)) as usize;
                    let &index = index_of
                        .get(&start)
                        .expect("even-side tiling is closed under ±2/±1 moves");
                    nbrs.push(SquareNeighbor {
                        index,
                        dim,
                        sign,
                        kind,
                    });
                }
            }
            neighbors.push(nbrs);
        }
        let parities = squares.iter().map(|sq| sq.parity()).collect();
        let mut even_part = Vec::with_capacity(squares.len());
        let mut odd_part = Vec::with_capacity(squares.len());
        for sq in &squares {
            let (e, o) = sq.parts(&base);
            even_part.push(e.iter().map(|v| base.index_of(v)).collect());
            odd_part.push(o.iter().map(|v| base.index_of(v)).collect());
        }
        Ok(ScaledShape {
            base,
            square_dim: r,
            squares,
            parities,
            neighbors,
            even_part,
            odd_part,
        })
    }

    pub fn base(&self) -> TorusShape {
        self.base
    }

    pub fn square_dim(&self) -> usize {
        self.square_dim
    }

    pub fn squares(&self) -> &[HyperSquare] {
        &self.squares
    }

    pub fn parity(&self, idx: usize) -> Parity {
        self.parities[idx]
    }

    /// The `2d` labeled neighbors of a square.
    pub fn square_neighbors(&self, idx: usize) -> &[SquareNeighbor] {
        &self.neighbors[idx]
    }

    pub fn square_index_by_start(&self, start: &Coord) -> Option<usize> {
        self.squares.iter().position(|sq| &sq.start == start)
    }

    /// Occupation of one square: an even-parity square is occupied when its
    /// even part is all black, an odd-parity square when its odd part is.
    /// That is the even-round reading; pass `swap_parts = true` for the
    /// odd-round (or mirrored) reading, which swaps the two parts.
    pub fn is_occupied(&self, c: &Configuration, idx: usize, swap_parts: bool) -> bool {
        let even_parity = self.parities[idx] == Parity::Even;
        let part = if even_parity != swap_parts {
            &self.even_part[idx]
        } else {
            &self.odd_part[idx]
        };
        part.iter().all(|&i| c.is_black_idx(i))
    }

    /// Occupancy bitmap over all squares at the given round. Rounds are
    /// expected even; odd rounds are served with the part-swapped reading.
    pub fn occupation_map(&self, c: &Configuration, round: usize) -> OccupationMap {
        let swap = round % 2 == 1;
        self.occupation_map_with(c, round, swap)
    }

    pub fn occupation_map_with(
        &self,
        c: &Configuration,
        round: usize,
        swap_parts: bool,
    ) -> OccupationMap {
        let mut bits = Bits::zeros(self.squares.len());
        for idx in 0..self.squares.len() {
            if self.is_occupied(c, idx, swap_parts) {
                bits.set(idx, true);
            }
        }
        OccupationMap { round, bits }
    }

    /// One modified r-BP step on the scaled lattice: occupied squares stay
    /// occupied, an unoccupied square becomes occupied when it has occupied
    /// neighbors in at least `square_dim` distinct dimensions.
    pub fn modified_scaled_step(&self, map: &OccupationMap) -> OccupationMap {
        let mut bits = map.bits.clone();
        for idx in 0..self.squares.len() {
            if map.bits.get(idx) {
                continue;
            }
            let dims_with_occupied = (0..self.base.dim())
                .filter(|&dim| {
                    self.neighbors[idx]
                        .iter()
                        .any(|n| n.dim == dim && map.bits.get(n.index))
                })
                .count();
            if dims_with_occupied >= self.square_dim {
                bits.set(idx, true);
            }
        }
        OccupationMap {
            round: map.round,
            bits,
        }
    }

    /// Paint the round-0 active part of the given square black: the part a
    /// square of its parity must hold for standard (even-round) occupation.
    pub fn paint_occupied(&self, c: &mut Configuration, idx: usize) {
        let part = match self.parities[idx] {
            Parity::Even => &self.even_part[idx],
            Parity::Odd => &self.odd_part[idx],
        };
        for &i in part {
            c.bits_mut().set(i, true);
        }
    }
}

/// Occupancy bit per tiled square at a given round.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OccupationMap {
    pub round: usize,
    pub bits: Bits,
}

impl OccupationMap {
    pub fn occupied_count(&self) -> usize {
        self.bits.count_ones()
    }

    /// Pointwise order: every square occupied here is occupied in `other`.
    pub fn dominated_by(&self, other: &OccupationMap) -> bool {
        self.bits.subset_of(&other.bits)
    }
}

/// A neighbor choice for the occupation experiment: take the neighbor of
/// the center square in this dimension with this sign (inner/outer follows
/// from the dimension).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborPick {
    pub dim: usize,
    pub sign: Sign,
}

/// Outcome of one occupation experiment.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OccupationOutcome {
    /// First round at which the center square is occupied (round-parity
    /// reading).
    pub rounds: usize,
    /// Set when that first round is odd; recorded, never asserted.
    pub odd_round: bool,
}

/// Start from exactly the chosen neighbor squares of the origin square
/// being occupied, run two-way r-BP, and report the first round at which
/// the center square is occupied.
///
/// `picks` must name distinct dimensions; fewer than `r` picks are allowed
/// for contrast runs, which are expected to exhaust the budget. Budget
/// exhaustion is reported as [`Error::OccupationBudget`]; for a full
/// arrangement of `r` picks that would falsify the constant-rounds claim at
/// this size.
pub fn occupation_experiment(
    d: usize,
    r: usize,
    side: usize,
    picks: &[NeighborPick],
    budget: Option<usize>,
) -> Result<OccupationOutcome> {
    if side < 8 || !side.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "occupation experiments need even side >= 8".into(),
        ));
    }
    let shape = TorusShape::new(d, side)?;
    if r == 0 || r > d {
        return Err(Error::SquareDimOutOfRange { r, d });
    }
    let mut seen = std::collections::HashSet::new();
    for p in picks {
        if p.dim >= d {
            return Err(Error::InvalidArgument(format!(
                "neighbor pick dimension {} out of range",
                p.dim
            )));
        }
        if !seen.insert(p.dim) {
            return Err(Error::InvalidArgument(
                "neighbor picks must use distinct dimensions".into(),
            ));
        }
    }
    if picks.len() > r {
        return Err(Error::InvalidArgument(format!(
            "at most r={r} picks make sense, got {}",
            picks.len()
        )));
    }

    let scaled = ScaledShape::new(shape, r)?;
    let center = scaled
        .square_index_by_start(&Coord(vec![0; d]))
        .expect("origin square exists");
    let mut c = Configuration::all_white(shape);
    for pick in picks {
        let nbr = scaled.neighbors[center]
            .iter()
            .find(|n| n.dim == pick.dim && n.sign == pick.sign)
            .expect("every dimension has both signs");
        scaled.paint_occupied(&mut c, nbr.index);
    }

    let budget = budget.unwrap_or_else(|| 4usize.pow(r as u32));
    let mut stepper = PackedStepper::new(shape)?;
    let rule = UpdateRule::two_way(r as u32);
    for round in 0..=budget {
        if scaled.is_occupied(&c, center, round % 2 == 1) {
            return Ok(OccupationOutcome {
                rounds: round,
                odd_round: round % 2 == 1,
            });
        }
        if round < budget {
            c = stepper.step(&c, &rule)?;
        }
    }
    Err(Error::OccupationBudget { budget })
}

/// Every arrangement of `r` distinct dimensions with a sign choice each:
/// `C(d, r) * 2^r` pick vectors, in deterministic order.
pub fn all_arrangements(d: usize, r: usize) -> Vec<Vec<NeighborPick>> {
    let mut dims_choices = Vec::new();
    crate::util::for_each_combination(d, r, |dims| {
        dims_choices.push(dims.to_vec());
        true
    });
    let mut out = Vec::with_capacity(dims_choices.len() << r);
    for dims in dims_choices {
        for mask in 0u32..(1 << r) {
            out.push(
                dims.iter()
                    .enumerate()
                    .map(|(i, &dim)| NeighborPick {
                        dim,
                        sign: if mask >> i & 1 == 1 {
                            Sign::Plus
                        } else {
                            Sign::Minus
                        },
                    })
                    .collect(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::rng::{mix2, uniform};

    fn t(d: usize, side: usize) -> TorusShape {
        TorusShape::new(d, side).unwrap()
    }

    #[test]
    fn neighbor_starts_match_construction() {
        // d=3, r=2, L=8: inner neighbors at ±2 in the first two coordinates,
        // outer at ±1 in the last.
        let scaled = ScaledShape::new(t(3, 8), 2).unwrap();
        let idx = scaled
            .square_index_by_start(&Coord::from([0, 0, 0]))
            .unwrap();
        let mut inner_starts = Vec::new();
        let mut outer_starts = Vec::new();
        for n in scaled.square_neighbors(idx) {
            let start = scaled.squares()[n.index].start.clone();
            match n.kind {
                NeighborKind::Inner => inner_starts.push(start),
                NeighborKind::Outer => outer_starts.push(start),
            }
        }
        let expect_inner: Vec<Coord> = [[6, 0, 0], [2, 0, 0], [0, 6, 0], [0, 2, 0]]
            .iter()
            .map(|&a| Coord::from(a))
            .collect();
        let expect_outer: Vec<Coord> = [[0, 0, 7], [0, 0, 1]]
            .iter()
            .map(|&a| Coord::from(a))
            .collect();
        assert_eq!(inner_starts, expect_inner);
        assert_eq!(outer_starts, expect_outer);
    }

    #[test]
    fn neighbor_counts_and_parity() {
        for d in 1..=4usize {
            for r in 1..=d {
                let scaled = ScaledShape::new(t(d, 8), r).unwrap();
                for idx in 0..scaled.squares().len() {
                    let nbrs = scaled.square_neighbors(idx);
                    assert_eq!(nbrs.len(), 2 * d);
                    let inner = nbrs
                        .iter()
                        .filter(|n| n.kind == NeighborKind::Inner)
                        .count();
                    assert_eq!(inner, 2 * r);
                    for n in nbrs {
                        let same = scaled.parity(idx) == scaled.parity(n.index);
                        match n.kind {
                            NeighborKind::Inner => assert!(same),
                            NeighborKind::Outer => assert!(!same),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn odd_side_rejected() {
        assert!(matches!(
            ScaledShape::new(t(2, 9), 2),
            Err(Error::OddSideTiling { side: 9 })
        ));
    }

    #[test]
    fn occupation_basics() {
        let shape = t(2, 8);
        let scaled = ScaledShape::new(shape, 2).unwrap();
        let empty = Configuration::all_white(shape);
        let full = Configuration::all_black(shape);
        assert_eq!(scaled.occupation_map(&empty, 0).occupied_count(), 0);
        assert_eq!(
            scaled.occupation_map(&full, 0).occupied_count(),
            scaled.squares().len()
        );

        // Exactly one square's active part black -> exactly one bit.
        let mut c = Configuration::all_white(shape);
        scaled.paint_occupied(&mut c, 5);
        let map = scaled.occupation_map(&c, 0);
        assert_eq!(map.occupied_count(), 1);
        assert!(map.bits.get(5));
    }

    #[test]
    fn occupation_monotone_along_trajectory() {
        let shape = t(2, 8);
        let scaled = ScaledShape::new(shape, 2).unwrap();
        let rule = UpdateRule::two_way(2);
        for trial in 0..20u64 {
            let key = mix2(55, trial);
            let mut c = Configuration::all_white(shape);
            let thresh = crate::rng::bernoulli_threshold(0.35);
            for i in 0..shape.nodes() {
                if thresh.fires(uniform(key, i as u64)) {
                    c.bits_mut().set(i, true);
                }
            }
            let mut stepper = PackedStepper::new(shape).unwrap();
            let mut prev_map = scaled.occupation_map(&c, 0);
            for round in 1..=20usize {
                c = stepper.step(&c, &rule).unwrap();
                if round % 2 == 0 {
                    let map = scaled.occupation_map(&c, round);
                    assert!(
                        prev_map.dominated_by(&map),
                        "occupation lost at round {round} trial {trial}"
                    );
                    prev_map = map;
                }
            }
        }
    }

    #[test]
    fn occupied_square_stays_occupied() {
        let shape = t(3, 8);
        let scaled = ScaledShape::new(shape, 2).unwrap();
        let mut c = Configuration::all_white(shape);
        scaled.paint_occupied(&mut c, 3);
        let out = evolve(&c, &UpdateRule::two_way(2), 500).unwrap();
        assert!(!out.truncated);
        // Check occupation through one full cycle worth of rounds.
        let mut stepper = PackedStepper::new(shape).unwrap();
        let mut cur = c;
        for round in 0..10usize {
            assert!(scaled.is_occupied(&cur, 3, round % 2 == 1), "round {round}");
            cur = stepper.step(&cur, &UpdateRule::two_way(2)).unwrap();
        }
    }

    #[test]
    fn two_inner_neighbors_occupy_within_budget() {
        let picks = vec![
            NeighborPick {
                dim: 0,
                sign: Sign::Plus,
            },
            NeighborPick {
                dim: 1,
                sign: Sign::Plus,
            },
        ];
        let out = occupation_experiment(2, 2, 8, &picks, None).unwrap();
        assert!(out.rounds <= 6, "rounds {}", out.rounds);
        // L-independence of the constant.
        let out12 = occupation_experiment(2, 2, 12, &picks, None).unwrap();
        assert_eq!(out.rounds, out12.rounds);
    }

    #[test]
    fn contrast_run_exhausts_budget() {
        let picks = vec![NeighborPick {
            dim: 0,
            sign: Sign::Plus,
        }];
        let res = occupation_experiment(2, 2, 8, &picks, Some(16));
        assert!(matches!(res, Err(Error::OccupationBudget { budget: 16 })));
    }

    #[test]
    fn arrangement_enumeration_counts() {
        assert_eq!(all_arrangements(2, 2).len(), 4);
        assert_eq!(all_arrangements(3, 2).len(), 12);
        assert_eq!(all_arrangements(3, 3).len(), 8);
    }

    /// The occupation process dominates modified r-BP on the scaled
    /// lattice: one scaled modified step from the occupation at round t is
    /// contained in the true occupation t' rounds later, with t' measured
    /// as the worst round count over all neighbor arrangements (rounded up
    /// to even so both sides use the even-round occupation reading).
    #[test]
    fn scaled_domination_with_measured_dilation() {
        let (d, r) = (2usize, 2usize);
        let t_prime = all_arrangements(d, r)
            .iter()
            .map(|picks| occupation_experiment(d, r, 8, picks, None).unwrap().rounds)
            .max()
            .unwrap();
        let t_prime = t_prime.div_ceil(2) * 2;
        let shape = t(2, 8);
        let scaled = ScaledShape::new(shape, r).unwrap();
        let rule = UpdateRule::two_way(r as u32);
        for trial in 0..30u64 {
            let key = mix2(77, trial);
            let mut c = Configuration::all_white(shape);
            let thresh = crate::rng::bernoulli_threshold(0.4);
            for i in 0..shape.nodes() {
                if thresh.fires(uniform(key, i as u64)) {
                    c.bits_mut().set(i, true);
                }
            }
            // Record the trajectory's even-round occupation maps.
            let horizon = 12 + t_prime;
            let mut maps = Vec::new();
            let mut stepper = PackedStepper::new(shape).unwrap();
            let mut cur = c;
            for round in 0..=horizon {
                if round % 2 == 0 {
                    maps.push(scaled.occupation_map(&cur, round));
                }
                if round < horizon {
                    cur = stepper.step(&cur, &rule).unwrap();
                }
            }
            for i in 0..maps.len() - t_prime / 2 {
                let predicted = scaled.modified_scaled_step(&maps[i]);
                let actual = &maps[i + t_prime / 2];
                assert!(
                    predicted.dominated_by(actual),
                    "trial {trial}: scaled modified step at round {} not contained at round {}",
                    maps[i].round,
                    actual.round
                );
            }
        }
    }

    #[test]
    fn scaled_modified_step_monotone() {
        let scaled = ScaledShape::new(t(2, 8), 2).unwrap();
        let mut map = OccupationMap {
            round: 0,
            bits: Bits::zeros(scaled.squares().len()),
        };
        map.bits.set(0, true);
        map.bits.set(1, true);
        let next = scaled.modified_scaled_step(&map);
        assert!(map.dominated_by(&next));
    }
}

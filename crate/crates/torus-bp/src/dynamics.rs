//! Update rules, synchronous stepping, cycle detection, and the
//! order-theoretic comparisons between configurations and models.
//!
//! Two steppers are maintained on purpose. [`ReferenceStepper`] counts
//! neighbors per node straight from the adjacency, which makes it slow but
//! easy to audit. [`PackedStepper`] works on the packed bitmap: for each
//! dimension it gathers the two shifted bit planes, accumulates them into a
//! bit-sliced neighbor-count tensor, and thresholds per rule. The two are
//! checked against each other extensionally; their agreement is a test
//! obligation, not an assumption.

use crate::bits::{rotate_blocks_into, Bits};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Phase, TorusShape};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// The implemented dynamics family.
///
/// `GeneralBp` is the `(r, r')` threshold family: a white node turns black
/// iff it has at least `activation` black neighbors, and a black node stays
/// black iff it has at least `retention` black neighbors. Classic bootstrap
/// percolation, the two-way variant, and bootstrap with recovery are the
/// `r' = 0`, `r' = r`, and `r' = 1` members.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UpdateRule {
    GeneralBp {
        activation: u32,
        retention: u32,
    },
    /// Black is absorbing; a white node turns black iff it has black
    /// neighbors in at least `activation_dims` distinct dimensions.
    ModifiedBp {
        activation_dims: u32,
    },
    /// Strict majority of the 2d neighbors wins; a tie keeps the current
    /// color.
    Majority,
}

impl UpdateRule {
    /// r-bootstrap percolation: black absorbing.
    pub fn bootstrap(r: u32) -> Self {
        UpdateRule::GeneralBp {
            activation: r,
            retention: 0,
        }
    }

    /// Two-way r-bootstrap percolation: black iff at least r black neighbors.
    pub fn two_way(r: u32) -> Self {
        UpdateRule::GeneralBp {
            activation: r,
            retention: r,
        }
    }

    /// Bootstrap percolation with recovery: a black node with no black
    /// neighbor turns white.
    pub fn recovery(r: u32) -> Self {
        UpdateRule::GeneralBp {
            activation: r,
            retention: 1,
        }
    }

    /// Modified r-bootstrap percolation.
    pub fn modified(r: u32) -> Self {
        UpdateRule::ModifiedBp { activation_dims: r }
    }

    /// Majority with ties resolved to black; on the 2d-regular torus this is
    /// exactly two-way d-BP, so it is an alias, not a separate kernel.
    pub fn biased_majority(d: u32) -> Self {
        UpdateRule::two_way(d)
    }

    /// Check the rule against a shape.
    ///
    /// `GeneralBp` accepts `1 <= activation <= 2d` (not just `<= d`): the
    /// range `d < r <= 2d` is the black/white mirror of `1 <= r <= d` and is
    /// needed to even state the color-swap duality. `retention <= activation`
    /// is the monotonicity requirement.
    pub fn validate(&self, shape: &TorusShape) -> Result<()> {
        let degree = shape.degree() as u32;
        match *self {
            UpdateRule::GeneralBp {
                activation,
                retention,
            } => {
                if activation == 0 {
                    return Err(Error::InvalidRule {
                        reason: "activation threshold must be >= 1".into(),
                    });
                }
                if activation > degree {
                    return Err(Error::InvalidRule {
                        reason: format!("activation {activation} exceeds degree {degree}"),
                    });
                }
                if retention > activation {
                    return Err(Error::InvalidRule {
                        reason: format!(
                            "retention {retention} > activation {activation} breaks monotonicity"
                        ),
                    });
                }
                Ok(())
            }
            UpdateRule::ModifiedBp { activation_dims } => {
                if activation_dims == 0 || activation_dims as usize > shape.dim() {
                    return Err(Error::InvalidRule {
                        reason: format!(
                            "modified rule needs 1 <= r <= d, got r={} d={}",
                            activation_dims,
                            shape.dim()
                        ),
                    });
                }
                Ok(())
            }
            UpdateRule::Majority => Ok(()),
        }
    }

    /// True iff black can never decrease (`retention = 0` or modified).
    pub fn black_absorbing(&self) -> bool {
        matches!(
            self,
            UpdateRule::GeneralBp { retention: 0, .. } | UpdateRule::ModifiedBp { .. }
        )
    }
}

impl std::fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            UpdateRule::GeneralBp {
                activation,
                retention,
            } => match retention {
                0 => write!(f, "bp({activation})"),
                r if r == activation => write!(f, "two-way({activation})"),
                1 => write!(f, "recovery({activation})"),
                _ => write!(f, "general({activation},{retention})"),
            },
            UpdateRule::ModifiedBp { activation_dims } => write!(f, "modified({activation_dims})"),
            UpdateRule::Majority => write!(f, "majority"),
        }
    }
}

// ---------------------------------------------------------------------------
// Reference stepper
// ---------------------------------------------------------------------------

/// Naive per-node stepper built directly from the neighbor lists. The oracle
/// side of the stepper-equivalence check.
pub struct ReferenceStepper {
    shape: TorusShape,
    /// Flattened neighbor indices, `2d` per node, dimension-major with the
    /// `-1` neighbor before the `+1` neighbor.
    nbrs: Vec<u32>,
}

impl ReferenceStepper {
    pub fn new(shape: TorusShape) -> Self {
        let degree = shape.degree();
        let mut nbrs = Vec::with_capacity(shape.nodes() * degree);
        for idx in 0..shape.nodes() {
            let v = shape.coord_of(idx);
            for u in shape.neighbors(&v).expect("own coord is valid") {
                nbrs.push(shape.index_of(&u) as u32);
            }
        }
        ReferenceStepper { shape, nbrs }
    }

    pub fn step(&self, c: &Configuration, rule: &UpdateRule) -> Result<Configuration> {
        if c.shape() != self.shape {
            return Err(Error::ShapeMismatch);
        }
        rule.validate(&self.shape)?;
        let degree = self.shape.degree();
        let d = self.shape.dim();
        let mut next = Configuration::all_white(self.shape);
        for idx in 0..self.shape.nodes() {
            let nbrs = &self.nbrs[idx * degree..(idx + 1) * degree];
            let black_nbrs = nbrs.iter().filter(|&&u| c.is_black_idx(u as usize)).count() as u32;
            let is_black = c.is_black_idx(idx);
            let becomes_black = match *rule {
                UpdateRule::GeneralBp {
                    activation,
                    retention,
                } => {
                    if is_black {
                        black_nbrs >= retention
                    } else {
                        black_nbrs >= activation
                    }
                }
                UpdateRule::ModifiedBp { activation_dims } => {
                    if is_black {
                        true
                    } else {
                        let dims_with_black = (0..d)
                            .filter(|&j| {
                                c.is_black_idx(nbrs[2 * j] as usize)
                                    || c.is_black_idx(nbrs[2 * j + 1] as usize)
                            })
                            .count() as u32;
                        dims_with_black >= activation_dims
                    }
                }
                UpdateRule::Majority => {
                    let half = d as u32;
                    if black_nbrs > half {
                        true
                    } else if black_nbrs < half {
                        false
                    } else {
                        is_black
                    }
                }
            };
            if becomes_black {
                next.bits_mut().set(idx, true);
            }
        }
        Ok(next)
    }
}

// ---------------------------------------------------------------------------
// Packed stepper
// ---------------------------------------------------------------------------

const COUNT_PLANES: usize = 4; // neighbor counts fit in 4 bits (degree <= 8 needs d <= 4; see new())
const DIM_PLANES: usize = 3; // distinct-dimension counts fit in 3 bits

/// Bit-parallel stepper: per-dimension shifted-plane gathers feed a
/// bit-sliced neighbor-count tensor which is thresholded per rule.
pub struct PackedStepper {
    shape: TorusShape,
    shifted: Bits,
    dim_any: Bits,
    planes: [Vec<u64>; COUNT_PLANES],
    dim_planes: [Vec<u64>; DIM_PLANES],
    scratch: Vec<u64>,
}

impl PackedStepper {
    pub fn new(shape: TorusShape) -> Result<Self> {
        if shape.degree() >= 1 << COUNT_PLANES {
            return Err(Error::InvalidShape {
                d: shape.dim(),
                side: shape.side(),
            });
        }
        let nwords = crate::bits::word_count(shape.nodes());
        Ok(PackedStepper {
            shape,
            shifted: Bits::zeros(shape.nodes()),
            dim_any: Bits::zeros(shape.nodes()),
            planes: std::array::from_fn(|_| vec![0; nwords]),
            dim_planes: std::array::from_fn(|_| vec![0; nwords]),
            scratch: vec![0; nwords],
        })
    }

    pub fn shape(&self) -> TorusShape {
        self.shape
    }

    pub fn step(&mut self, c: &Configuration, rule: &UpdateRule) -> Result<Configuration> {
        let mut next = Configuration::all_white(self.shape);
        self.step_into(c, rule, &mut next)?;
        Ok(next)
    }

    pub fn step_into(
        &mut self,
        c: &Configuration,
        rule: &UpdateRule,
        next: &mut Configuration,
    ) -> Result<()> {
        if c.shape() != self.shape || next.shape() != self.shape {
            return Err(Error::ShapeMismatch);
        }
        rule.validate(&self.shape)?;
        let d = self.shape.dim();
        let side = self.shape.side();
        let nwords = self.scratch.len();
        let want_dims = matches!(rule, UpdateRule::ModifiedBp { .. });

        for p in &mut self.planes {
            p.iter_mut().for_each(|w| *w = 0);
        }
        if want_dims {
            for p in &mut self.dim_planes {
                p.iter_mut().for_each(|w| *w = 0);
            }
        }

        let src = c.bits();
        let mut stride = 1usize;
        for _ in 0..d {
            let block = stride * side;
            // Neighbor value at +1 in this dimension.
            rotate_blocks_into(&mut self.shifted, src, block, stride);
            add_bitmap(&mut self.planes, self.shifted.words());
            if want_dims {
                self.dim_any
                    .words_mut()
                    .copy_from_slice(self.shifted.words());
            }
            // Neighbor value at -1 in this dimension.
            rotate_blocks_into(&mut self.shifted, src, block, block - stride);
            add_bitmap(&mut self.planes, self.shifted.words());
            if want_dims {
                for (a, b) in self
                    .dim_any
                    .words_mut()
                    .iter_mut()
                    .zip(self.shifted.words())
                {
                    *a |= b;
                }
                add_bitmap(&mut self.dim_planes, self.dim_any.words());
            }
            stride = block;
        }

        let out = next.bits_mut();
        match *rule {
            UpdateRule::GeneralBp {
                activation,
                retention,
            } => {
                // next = (!black & count>=activation) | (black & count>=retention)
                ge_const(&self.planes, activation, &mut self.scratch);
                let born = &mut self.scratch;
                for ((o, &b), &g) in out.words_mut().iter_mut().zip(src.words()).zip(born.iter()) {
                    *o = !b & g;
                }
                ge_const(&self.planes, retention, &mut self.scratch);
                for ((o, &b), &g) in out
                    .words_mut()
                    .iter_mut()
                    .zip(src.words())
                    .zip(self.scratch.iter())
                {
                    *o |= b & g;
                }
            }
            UpdateRule::ModifiedBp { activation_dims } => {
                ge_const(&self.dim_planes, activation_dims, &mut self.scratch);
                for ((o, &b), &g) in out
                    .words_mut()
                    .iter_mut()
                    .zip(src.words())
                    .zip(self.scratch.iter())
                {
                    *o = b | g;
                }
            }
            UpdateRule::Majority => {
                // next = count>d | (black & count>=d)
                let half = d as u32;
                ge_const(&self.planes, half + 1, &mut self.scratch);
                for (o, &g) in out.words_mut().iter_mut().zip(self.scratch.iter()) {
                    *o = g;
                }
                ge_const(&self.planes, half, &mut self.scratch);
                for ((o, &b), &g) in out
                    .words_mut()
                    .iter_mut()
                    .zip(src.words())
                    .zip(self.scratch.iter())
                {
                    *o |= b & g;
                }
            }
        }
        debug_assert_eq!(out.words().len(), nwords);
        out.mask_tail();
        Ok(())
    }
}

/// Bit-sliced add of a 0/1 bitmap into little-endian bit planes. Carry out
/// of the top plane is dropped; callers size the planes so it cannot occur.
fn add_bitmap(planes: &mut [Vec<u64>], x: &[u64]) {
    for (w, &xi) in x.iter().enumerate() {
        let mut carry = xi;
        for plane in planes.iter_mut() {
            let t = plane[w] & carry;
            plane[w] ^= carry;
            carry = t;
            if carry == 0 {
                break;
            }
        }
    }
}

/// Per-bit comparison `value >= c` of a bit-sliced unsigned tensor against a
/// constant, written into `out`.
fn ge_const(planes: &[Vec<u64>], c: u32, out: &mut [u64]) {
    let nb = planes.len() as u32;
    if c == 0 {
        out.iter_mut().for_each(|w| *w = !0);
        return;
    }
    if c >= 1 << nb {
        out.iter_mut().for_each(|w| *w = 0);
        return;
    }
    // v >= c  ⟺  !(v < c), comparing from the most significant plane.
    for (w, o) in out.iter_mut().enumerate() {
        let mut lt = 0u64;
        let mut eq = !0u64;
        for bit in (0..nb).rev() {
            let vb = planes[bit as usize][w];
            if c >> bit & 1 == 1 {
                lt |= eq & !vb;
                eq &= vb;
            } else {
                eq &= !vb;
            }
        }
        *o = !lt;
    }
}

/// One synchronous round. Allocates; use [`PackedStepper`] directly in hot
/// loops.
pub fn step(c: &Configuration, rule: &UpdateRule) -> Result<Configuration> {
    PackedStepper::new(c.shape())?.step(c, rule)
}

/// `true` iff every black node of `a` is black in `b`.
pub fn dominates(a: &Configuration, b: &Configuration) -> Result<bool> {
    a.dominated_by(b)
}

// ---------------------------------------------------------------------------
// Evolution and cycle detection
// ---------------------------------------------------------------------------

/// Result of running a configuration to its limit cycle.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Length of the limit cycle; `None` when the run was truncated.
    pub period: Option<usize>,
    /// First round at which the process is inside the cycle (rounds to
    /// truncation when truncated).
    pub consensus_time: usize,
    /// The cycle configurations in order, starting at `consensus_time`.
    /// Empty when truncated.
    pub cycle: Vec<Configuration>,
    /// Phase of the limit cycle (of the last computed configuration when
    /// truncated).
    pub classification: Phase,
    pub truncated: bool,
}

impl RunOutcome {
    /// Black survives iff the limit cycle contains a black node. Only
    /// meaningful for non-truncated runs.
    pub fn black_survives(&self) -> bool {
        !self.truncated && self.classification != Phase::FullyWhite
    }
}

/// Default round cap: twice the classical `2|E|` transient bound for
/// symmetric threshold dynamics.
pub fn default_max_rounds(shape: &TorusShape) -> usize {
    4 * shape.edges()
}

fn classify_cycle(cycle: &[Configuration]) -> Phase {
    if cycle.iter().all(|c| c.classify() == Phase::FullyBlack) {
        Phase::FullyBlack
    } else if cycle.iter().all(|c| c.classify() == Phase::FullyWhite) {
        Phase::FullyWhite
    } else {
        Phase::Coexist
    }
}

/// Iterate the rule until the limit cycle is found or `max_rounds` is hit.
///
/// Cycle detection: exact comparison against the previous and
/// second-previous configuration covers the period-1/period-2 cycles this
/// rule family provably has. As a safety net for longer cycles, a rolling
/// fingerprint log is kept; a fingerprint hit is confirmed exactly by
/// replaying (fingerprints alone never decide).
pub fn evolve(c0: &Configuration, rule: &UpdateRule, max_rounds: usize) -> Result<RunOutcome> {
    let shape = c0.shape();
    rule.validate(&shape)?;
    let mut stepper = PackedStepper::new(shape)?;

    let mut prev2: Option<Configuration> = None;
    let mut prev = c0.clone();
    let mut fp_first: HashMap<u64, usize> = HashMap::new();
    fp_first.insert(c0.fingerprint(), 0);

    let mut cur = Configuration::all_white(shape);
    for t in 1..=max_rounds {
        stepper.step_into(&prev, rule, &mut cur)?;

        if cur == prev {
            let cycle = vec![prev.clone()];
            return Ok(RunOutcome {
                period: Some(1),
                consensus_time: t - 1,
                classification: classify_cycle(&cycle),
                cycle,
                truncated: false,
            });
        }
        if let Some(ref p2) = prev2 {
            if cur == *p2 {
                let cycle = vec![p2.clone(), prev.clone()];
                return Ok(RunOutcome {
                    period: Some(2),
                    consensus_time: t - 2,
                    classification: classify_cycle(&cycle),
                    cycle,
                    truncated: false,
                });
            }
        }

        let fp = cur.fingerprint();
        if let Some(&s) = fp_first.get(&fp) {
            // Candidate long cycle C_s == C_t; confirm exactly by replay.
            if let Some(outcome) = confirm_long_cycle(c0, rule, s, t, &cur)? {
                return Ok(outcome);
            }
        }
        fp_first.entry(fp).or_insert(t);

        prev2 = Some(std::mem::replace(&mut prev, cur.clone()));
    }

    Ok(RunOutcome {
        period: None,
        consensus_time: max_rounds,
        cycle: Vec::new(),
        classification: prev.classify(),
        truncated: true,
    })
}

/// Replay from `c0` to round `s`; if `C_s == c_t` the segment `[s, t)` is a
/// genuine cycle. Returns the finished outcome, or `None` on a fingerprint
/// false positive.
fn confirm_long_cycle(
    c0: &Configuration,
    rule: &UpdateRule,
    s: usize,
    t: usize,
    c_t: &Configuration,
) -> Result<Option<RunOutcome>> {
    let mut stepper = PackedStepper::new(c0.shape())?;
    let mut c = c0.clone();
    for _ in 0..s {
        c = stepper.step(&c, rule)?;
    }
    if &c != c_t {
        return Ok(None);
    }
    // Exact cycle of length dividing t - s starting no later than s. Collect
    // the cycle from round s and find the minimal period.
    let lambda = t - s;
    let mut cycle_all = Vec::with_capacity(lambda);
    let mut x = c.clone();
    for _ in 0..lambda {
        cycle_all.push(x.clone());
        x = stepper.step(&x, rule)?;
    }
    debug_assert_eq!(x, c);
    let mut period = lambda;
    for p in 1..lambda {
        if lambda.is_multiple_of(p) && cycle_all[0] == cycle_all[p % lambda] {
            let ok = (0..lambda).all(|i| cycle_all[i] == cycle_all[(i + p) % lambda]);
            if ok {
                period = p;
                break;
            }
        }
    }
    // Entry round: first k with C_k == C_{k+period}.
    let mut a = c0.clone();
    let mut b = c0.clone();
    for _ in 0..period {
        b = stepper.step(&b, rule)?;
    }
    let mut mu = 0;
    while a != b {
        a = stepper.step(&a, rule)?;
        b = stepper.step(&b, rule)?;
        mu += 1;
    }
    let mut cycle = Vec::with_capacity(period);
    let mut x = a;
    for _ in 0..period {
        cycle.push(x.clone());
        x = stepper.step(&x, rule)?;
    }
    Ok(Some(RunOutcome {
        period: Some(period),
        consensus_time: mu,
        classification: classify_cycle(&cycle),
        cycle,
        truncated: false,
    }))
}

//! Monte Carlo machinery: seeded random configurations, event sweeps with
//! Wilson intervals, coupled bisection for threshold estimation, and
//! log-log scaling fits.
//!
//! Determinism contract: every trial is a pure function of
//! `(master_seed, probe index, trial index)`, so identical specs produce
//! bit-identical output regardless of thread count or scheduling.

use crate::dynamics::{default_max_rounds, evolve, RunOutcome, UpdateRule};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Phase, TorusShape};
use crate::rng::{bernoulli_threshold, mix2, mix3, uniform};
use crate::util::{map_indexed, map_indexed_seq};
use serde::{Deserialize, Serialize};

/// The event whose probability a sweep estimates.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Event {
    /// The limit cycle contains a black node.
    BlackSurvives,
    FullyBlack,
    FullyWhite,
    Coexist,
}

impl Event {
    pub fn holds(&self, outcome: &RunOutcome) -> bool {
        match self {
            Event::BlackSurvives => outcome.black_survives(),
            Event::FullyBlack => outcome.classification == Phase::FullyBlack,
            Event::FullyWhite => outcome.classification == Phase::FullyWhite,
            Event::Coexist => outcome.classification == Phase::Coexist,
        }
    }

    /// Direction of monotonicity in p, where it exists.
    fn direction(&self) -> Option<Direction> {
        match self {
            Event::BlackSurvives | Event::FullyBlack => Some(Direction::Increasing),
            Event::FullyWhite => Some(Direction::Decreasing),
            Event::Coexist => None,
        }
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Event::BlackSurvives => "black-survives",
            Event::FullyBlack => "fully-black",
            Event::FullyWhite => "fully-white",
            Event::Coexist => "coexist",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Increasing,
    Decreasing,
}

/// Probe locations for a sweep: an explicit grid, or a bracket to bisect.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeSet {
    Grid(Vec<f64>),
    Bracket { lo: f64, hi: f64 },
}

/// Full description of a Monte Carlo experiment; carries everything needed
/// to reproduce it bit-for-bit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub shape: TorusShape,
    pub rule: UpdateRule,
    pub probes: ProbeSet,
    pub trials: usize,
    pub master_seed: u64,
    pub max_rounds: usize,
    pub event: Event,
}

impl SweepSpec {
    pub fn new(shape: TorusShape, rule: UpdateRule, event: Event) -> Self {
        SweepSpec {
            shape,
            rule,
            probes: ProbeSet::Grid(Vec::new()),
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            max_rounds: default_max_rounds(&shape),
            event,
        }
    }

    fn validate(&self) -> Result<()> {
        self.rule.validate(&self.shape)?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        let ps: Vec<f64> = match &self.probes {
            ProbeSet::Grid(g) => g.clone(),
            ProbeSet::Bracket { lo, hi } => vec![*lo, *hi],
        };
        for p in ps {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Defaults for trial counts and bisection stopping; both overridable per run.
pub const DEFAULT_TRIALS: usize = 400;
pub const DEFAULT_TOLERANCE: f64 = 0.02;

/// I.i.d. Bernoulli(p) configuration, keyed by `(seed, node index)` through
/// the counter generator: bit-identical across runs, platforms, and thread
/// schedules.
pub fn random_config(shape: TorusShape, p: f64, seed: u64) -> Configuration {
    let thresh = bernoulli_threshold(p);
    let mut c = Configuration::all_white(shape);
    let words = c.bits_mut().words_mut();
    let n = shape.nodes();
    for (w, word) in words.iter_mut().enumerate() {
        let base = w * 64;
        let top = (base + 64).min(n);
        let mut acc = 0u64;
        for i in base..top {
            if thresh.fires(uniform(seed, i as u64)) {
                acc |= 1 << (i - base);
            }
        }
        *word = acc;
    }
    c
}

/// The two-stage locally dependent configuration: stage 1 is i.i.d.
/// Bernoulli(p^(1/2^(r-1))); stage 2 makes a node black iff its
/// radius-`t_radius` ball holds at least `2^(r-1)` stage-1 black nodes.
/// The stage-1 layer is kept for audit.
#[derive(Clone, Debug)]
pub struct LocallyDependentConfig {
    pub stage1: Configuration,
    pub config: Configuration,
}

pub fn locally_dependent_config(
    shape: TorusShape,
    p: f64,
    r: u32,
    t_radius: usize,
    seed: u64,
) -> Result<LocallyDependentConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if 2 * t_radius >= shape.side() {
        return Err(Error::InvalidArgument(
            "neighborhood radius must be < side/2 so balls do not self-wrap".into(),
        ));
    }
    let s = 1u32 << (r - 1);
    let q = p.powf(1.0 / s as f64);
    let stage1 = random_config(shape, q, seed);
    let offsets = ball_offsets(shape.dim(), t_radius);
    let mut config = Configuration::all_white(shape);
    for idx in 0..shape.nodes() {
        let v = shape.coord_of(idx);
        let mut count = 0u32;
        for off in &offsets {
            let u = shape.translate(&v, off);
            if stage1.is_black_idx(shape.index_of(&u)) {
                count += 1;
                if count >= s {
                    break;
                }
            }
        }
        if count >= s {
            config.bits_mut().set(idx, true);
        }
    }
    Ok(LocallyDependentConfig { stage1, config })
}

/// Offsets of the graph-distance ball of the given radius (L1 with no
/// wrap, valid while 2*radius < side).
pub fn ball_offsets(d: usize, radius: usize) -> Vec<Vec<isize>> {
    let mut out = Vec::new();
    let mut cur = vec![-(radius as isize); d];
    'outer: loop {
        let norm: usize = cur.iter().map(|&x| x.unsigned_abs()).sum();
        if norm <= radius {
            out.push(cur.clone());
        }
        let mut j = 0;
        loop {
            if j == d {
                break 'outer;
            }
            cur[j] += 1;
            if cur[j] <= radius as isize {
                break;
            }
            cur[j] = -(radius as isize);
            j += 1;
        }
    }
    out
}

/// Estimated event frequency at one probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeStats {
    pub p: f64,
    /// Trials that reached a limit cycle; frequencies are over these.
    pub trials_counted: usize,
    pub truncated: usize,
    pub successes: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// 95% Wilson score interval; behaves sensibly at frequencies near 0 and 1.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn probe_once(spec: &SweepSpec, p: f64, trial_seed: u64) -> Result<(bool, bool)> {
    let c0 = random_config(spec.shape, p, trial_seed);
    let out = evolve(&c0, &spec.rule, spec.max_rounds)?;
    if out.truncated {
        return Ok((false, true));
    }
    Ok((spec.event.holds(&out), false))
}

fn collect_probe(
    spec: &SweepSpec,
    p: f64,
    seeds: impl Fn(usize) -> u64 + Sync + Send,
    sequential: bool,
) -> Result<ProbeStats> {
    let run = |t: usize| probe_once(spec, p, seeds(t));
    let results = if sequential {
        map_indexed_seq(spec.trials, run)
    } else {
        map_indexed(spec.trials, run)
    };
    let mut successes = 0;
    let mut truncated = 0;
    for r in results {
        let (hit, trunc) = r?;
        if trunc {
            truncated += 1;
        } else if hit {
            successes += 1;
        }
    }
    let counted = spec.trials - truncated;
    let frequency = if counted == 0 {
        0.0
    } else {
        successes as f64 / counted as f64
    };
    let (lo, hi) = wilson_interval(successes, counted);
    Ok(ProbeStats {
        p,
        trials_counted: counted,
        truncated,
        successes,
        frequency,
        wilson_low: lo,
        wilson_high: hi,
    })
}

/// Run the grid sweep: `trials` independent runs per probe, each keyed by
/// `mix(master_seed, probe index, trial index)`. Truncated runs are counted
/// separately and excluded from the frequency.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ProbeStats>> {
    run_sweep_inner(spec, false)
}

/// Sequential twin of [`run_sweep`]; same results, one thread. Kept for the
/// baseline side of the benchmark suite.
pub fn run_sweep_seq(spec: &SweepSpec) -> Result<Vec<ProbeStats>> {
    run_sweep_inner(spec, true)
}

fn run_sweep_inner(spec: &SweepSpec, sequential: bool) -> Result<Vec<ProbeStats>> {
    spec.validate()?;
    let ProbeSet::Grid(grid) = &spec.probes else {
        return Err(Error::InvalidArgument(
            "run_sweep needs an explicit probe grid; use estimate_threshold for brackets".into(),
        ));
    };
    let mut out = Vec::with_capacity(grid.len());
    for (pi, &p) in grid.iter().enumerate() {
        let master = spec.master_seed;
        out.push(collect_probe(
            spec,
            p,
            move |t| mix3(master, pi as u64, t as u64),
            sequential,
        )?);
    }
    Ok(out)
}

/// Bisection estimate of the p at which the event frequency crosses 1/2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p50: f64,
    /// Final bisection bracket.
    pub lower: f64,
    pub upper: f64,
    pub trials_used: usize,
    pub trace: Vec<ProbeStats>,
}

/// Bisect the bracket until the Wilson interval at the midpoint contains
/// 1/2 or the bracket is narrower than `tolerance` (relative).
///
/// Trials are coupled across probes: trial `t` draws one uniform per node
/// keyed by `(master_seed, t, node)`, and a node is black iff its uniform
/// is below p. Within a trial the initial configurations are therefore
/// monotone in p, which makes the empirical frequency monotone for
/// monotone rules exactly, not approximately.
pub fn estimate_threshold(spec: &SweepSpec, tolerance: f64) -> Result<ThresholdEstimate> {
    spec.validate()?;
    let ProbeSet::Bracket { lo, hi } = spec.probes else {
        return Err(Error::InvalidArgument(
            "estimate_threshold needs a bracket probe set".into(),
        ));
    };
    let Some(direction) = spec.event.direction() else {
        return Err(Error::NonMonotoneEvent {
            event: spec.event.to_string(),
        });
    };
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidArgument("bracket needs lo < hi".into()));
    }

    // Coupled seeds: no probe index in the key.
    let master = spec.master_seed;
    let seeds = move |t: usize| mix2(master, t as u64);

    // Wilson bounds on the oriented frequency (flipped for decreasing
    // events so the crossing is always upward).
    let oriented_bounds = |s: &ProbeStats| match direction {
        Direction::Increasing => (s.wilson_low, s.wilson_high),
        Direction::Decreasing => (1.0 - s.wilson_high, 1.0 - s.wilson_low),
    };

    let mut trace = Vec::new();
    let eval = |spec: &SweepSpec, p: f64, trace: &mut Vec<ProbeStats>| -> Result<ProbeStats> {
        let stats = collect_probe(spec, p, seeds, false)?;
        trace.push(stats.clone());
        Ok(stats)
    };

    // Verify the bracket actually straddles 1/2.
    let stats_lo = eval(spec, lo, &mut trace)?;
    if oriented_bounds(&stats_lo).0 > 0.5 {
        return Err(Error::NonMonotoneProfile {
            p: lo,
            detail: "event already more likely than 1/2 at the low end of the bracket".into(),
        });
    }
    let stats_hi = eval(spec, hi, &mut trace)?;
    if oriented_bounds(&stats_hi).1 < 0.5 {
        return Err(Error::NonMonotoneProfile {
            p: hi,
            detail: "event still less likely than 1/2 at the high end of the bracket".into(),
        });
    }

    let (mut lo, mut hi) = (lo, hi);
    let mut p50;
    loop {
        let mid = 0.5 * (lo + hi);
        p50 = mid;
        let stats = eval(spec, mid, &mut trace)?;
        let (wl, wh) = oriented_bounds(&stats);
        if wl > 0.5 {
            hi = mid;
        } else if wh < 0.5 {
            lo = mid;
        } else {
            break; // interval contains 1/2: cannot resolve further at this trial count
        }
        if (hi - lo) < tolerance * mid {
            p50 = 0.5 * (lo + hi);
            break;
        }
    }

    // Exact coupling makes the frequency monotone in p trial-by-trial; a
    // violation beyond that is a bug or a mis-specified event.
    check_monotone_trace(&trace, direction)?;

    Ok(ThresholdEstimate {
        p50,
        lower: lo,
        upper: hi,
        trials_used: trace.len() * spec.trials,
        trace,
    })
}

fn check_monotone_trace(trace: &[ProbeStats], direction: Direction) -> Result<()> {
    // With truncated trials the probes count different denominators and the
    // exact-coupling argument no longer applies; skip the check then (the
    // truncation counts are reported either way).
    if trace.iter().any(|s| s.truncated > 0) {
        return Ok(());
    }
    let mut pts: Vec<(f64, f64)> = trace.iter().map(|s| (s.p, s.frequency)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        let bad = match direction {
            Direction::Increasing => w[1].1 < w[0].1,
            Direction::Decreasing => w[1].1 > w[0].1,
        };
        if bad {
            return Err(Error::NonMonotoneProfile {
                p: w[1].0,
                detail: format!(
                    "coupled frequency went from {} at p={} to {} at p={}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ),
            });
        }
    }
    Ok(())
}

/// Least-squares fit of `log p50` against `log L`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Mean squared residual in log-log space.
    pub residual: f64,
    pub predicted: f64,
    pub deviation: f64,
}

/// Fit the scaling exponent from `(L, p50)` points; `predicted` is the
/// exponent the fit is compared against.
pub fn fit_exponent(points: &[(f64, f64)], predicted: f64) -> Result<ScalingFit> {
    let mut sizes: Vec<f64> = points.iter().map(|&(l, _)| l).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::TooFewPoints { got: sizes.len() });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(l, p)| (l.ln(), p.ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|&(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|&(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|&(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n;
    Ok(ScalingFit {
        points: points.to_vec(),
        slope,
        intercept,
        residual,
        predicted,
        deviation: slope - predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(d: usize, side: usize) -> TorusShape {
        TorusShape::new(d, side).unwrap()
    }

    #[test]
    fn random_config_endpoints() {
        let shape = t(2, 16);
        assert_eq!(random_config(shape, 0.0, 1).black_count(), 0);
        assert_eq!(random_config(shape, 1.0, 1).black_count(), shape.nodes());
    }

    #[test]
    fn random_config_binomial_concentration() {
        let shape = t(2, 64);
        let p = 0.3;
        let n = shape.nodes() as f64;
        let sd = (n * p * (1.0 - p)).sqrt();
        for seed in 0..20u64 {
            let k = random_config(shape, p, mix2(1, seed)).black_count() as f64;
            assert!(
                (k - n * p).abs() <= 3.0 * sd,
                "seed {seed}: {k} vs mean {}",
                n * p
            );
        }
    }

    #[test]
    fn random_config_deterministic() {
        let shape = t(2, 32);
        assert_eq!(
            random_config(shape, 0.37, 99),
            random_config(shape, 0.37, 99)
        );
        assert_ne!(
            random_config(shape, 0.37, 99),
            random_config(shape, 0.37, 100)
        );
    }

    #[test]
    fn coupling_monotone_in_p() {
        let shape = t(2, 32);
        for trial in 0..100u64 {
            let seed = mix2(3, trial);
            let a = random_config(shape, 0.2, seed);
            let b = random_config(shape, 0.35, seed);
            assert!(a.dominated_by(&b).unwrap(), "trial {trial}");
        }
    }

    #[test]
    fn coupled_classification_monotone() {
        // Within a coupled trial, raising p never demotes FullyBlack.
        let shape = t(2, 16);
        let rule = UpdateRule::two_way(2);
        let max_rounds = crate::dynamics::default_max_rounds(&shape);
        for trial in 0..100u64 {
            let seed = mix2(17, trial);
            let p_lo = 0.2 + (trial % 10) as f64 * 0.05;
            let p_hi = p_lo + 0.1;
            let a = crate::dynamics::evolve(&random_config(shape, p_lo, seed), &rule, max_rounds)
                .unwrap();
            let b = crate::dynamics::evolve(&random_config(shape, p_hi, seed), &rule, max_rounds)
                .unwrap();
            if a.classification == crate::lattice::Phase::FullyBlack {
                assert_eq!(
                    b.classification,
                    crate::lattice::Phase::FullyBlack,
                    "trial {trial}: fully black at p={p_lo} but not at p={p_hi}"
                );
            }
        }
    }

    #[test]
    fn ball_offsets_counts() {
        assert_eq!(ball_offsets(2, 0).len(), 1);
        assert_eq!(ball_offsets(2, 1).len(), 5);
        assert_eq!(ball_offsets(2, 2).len(), 13);
        assert_eq!(ball_offsets(3, 1).len(), 7);
    }

    #[test]
    fn locally_dependent_edge_cases() {
        let shape = t(2, 16);
        // radius 0, r >= 2: a ball holds at most one black node.
        let ld = locally_dependent_config(shape, 0.5, 2, 0, 7).unwrap();
        assert_eq!(ld.config.black_count(), 0);
        // stage-1 all black -> all black.
        let ld = locally_dependent_config(shape, 1.0, 2, 1, 7).unwrap();
        assert_eq!(ld.stage1.black_count(), shape.nodes());
        assert_eq!(ld.config.black_count(), shape.nodes());
    }

    #[test]
    fn locally_dependent_density_bound() {
        // Final density is at most K q^(2^(r-1)) with K the number of
        // 2^(r-1)-subsets of the ball; allow generous sampling slack.
        let shape = t(2, 64);
        let r = 2u32;
        let radius = 2usize;
        let p = 0.01;
        let s = 1usize << (r - 1);
        let k_comb = crate::util::binomial(ball_offsets(2, radius).len(), s) as f64;
        let bound = k_comb * p; // q^s = p
        let mut worst: f64 = 0.0;
        for seed in 0..10u64 {
            let ld = locally_dependent_config(shape, p, r, radius, mix2(9, seed)).unwrap();
            let density = ld.config.black_count() as f64 / shape.nodes() as f64;
            worst = worst.max(density);
        }
        assert!(
            worst <= bound * 1.5 + 0.01,
            "density {worst} vs bound {bound}"
        );
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo < 1e-12 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.95 && hi > 1.0 - 1e-12);
        let (lo400, hi400) = wilson_interval(200, 400);
        let (lo100, hi100) = wilson_interval(50, 100);
        assert!(hi400 - lo400 < hi100 - lo100); // more trials shrink the interval
    }

    #[test]
    fn sweep_endpoints() {
        let shape = t(2, 8);
        let mut spec = SweepSpec::new(shape, UpdateRule::two_way(2), Event::BlackSurvives);
        spec.probes = ProbeSet::Grid(vec![0.0, 1.0]);
        spec.trials = 50;
        spec.master_seed = 11;
        let stats = run_sweep(&spec).unwrap();
        assert_eq!(stats[0].frequency, 0.0);
        assert_eq!(stats[1].frequency, 1.0); // all-black is a fixed point

        spec.event = Event::FullyBlack;
        let stats = run_sweep(&spec).unwrap();
        assert_eq!(stats[1].frequency, 1.0);
    }

    #[test]
    fn sweep_deterministic_and_parallel_agree() {
        let shape = t(2, 16);
        let mut spec = SweepSpec::new(shape, UpdateRule::two_way(2), Event::BlackSurvives);
        spec.probes = ProbeSet::Grid(vec![0.02, 0.05, 0.1]);
        spec.trials = 60;
        spec.master_seed = 42;
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        let c = run_sweep_seq(&spec).unwrap();
        let freq = |v: &Vec<ProbeStats>| v.iter().map(|s| s.successes).collect::<Vec<_>>();
        assert_eq!(freq(&a), freq(&b));
        assert_eq!(freq(&a), freq(&c));
    }

    #[test]
    fn threshold_bisection_finds_crossing() {
        let shape = t(2, 16);
        let mut spec = SweepSpec::new(shape, UpdateRule::two_way(2), Event::BlackSurvives);
        spec.probes = ProbeSet::Bracket { lo: 0.001, hi: 0.4 };
        spec.trials = 100;
        spec.master_seed = 7;
        let est = estimate_threshold(&spec, 0.05).unwrap();
        assert!(est.lower <= est.p50 && est.p50 <= est.upper);
        assert!(est.p50 > 0.001 && est.p50 < 0.4);
    }

    #[test]
    fn threshold_rejects_coexist() {
        let shape = t(2, 8);
        let mut spec = SweepSpec::new(shape, UpdateRule::two_way(2), Event::Coexist);
        spec.probes = ProbeSet::Bracket { lo: 0.0, hi: 1.0 };
        assert!(matches!(
            estimate_threshold(&spec, 0.02),
            Err(Error::NonMonotoneEvent { .. })
        ));
    }

    #[test]
    fn fit_exponent_exact_power_laws() {
        let pts: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&l| (l, 1.0 / l))
            .collect();
        let fit = fit_exponent(&pts, -1.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-20);

        let pts: Vec<(f64, f64)> = [8.0f64, 16.0, 32.0]
            .iter()
            .map(|&l| (l, 7.0 * l.powf(-1.5)))
            .collect();
        let fit = fit_exponent(&pts, -1.5).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(fit.residual < 1e-20);
        assert!(fit.deviation.abs() < 1e-12);
    }

    #[test]
    fn fit_exponent_needs_three_sizes() {
        let pts = vec![(16.0, 0.1), (32.0, 0.05)];
        assert!(matches!(
            fit_exponent(&pts, -1.0),
            Err(Error::TooFewPoints { got: 2 })
        ));
    }
}

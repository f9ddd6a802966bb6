//! Numerical checks of the comparison inequalities between Fourier
//! coefficients, and a randomized search for their worst cases.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{self, phi_label_sum, FourierError, DEFAULT_BUDGET, ZERO_TOL};
use crate::graphs::{connected_catalog, enumerate_graphs, PatternGraph};
use crate::mc::SeededStream;
use crate::sbm::{classify, random_sbm_with, PriorOptions, RandomFamily, SbmError, SbmModel, DEFAULT_UNBIASED_TOL};

/// Relative slack on every inequality.
pub const REL_SLACK: f64 = 1e-10;
/// Absolute slack on `Psi` and `Phi` comparisons.
pub const ABS_SLACK: f64 = 1e-12;
/// Absolute slack for the square-root bound, whose right side loses precision.
pub const ROOT_SLACK: f64 = 1e-10;
/// Absolute tolerance for the two-community 4-cycle expansion.
pub const EXPANSION_TOL: f64 = 1e-12;
/// `M / 16 <= Phi(Cyc4) <= 16 M` with `M = max(p1^4 Q11^4, p1^2 Q12^4, Q22^4)`, `p1 <= p2`.
pub const SANDWICH_CONSTANT: f64 = 16.0;

pub const DEFAULT_DMAX: usize = 6;
pub const NONVANISHING_C: f64 = 0.2;

/// Master seed and model count behind the pinned constants.
pub const PIN_SEED: u64 = 3;
pub const PIN_MODELS: usize = 5000;

/// Worst ratios observed by [`falsify_search`] on [`PIN_SEED`] with
/// [`PIN_MODELS`] models, indexed by `dmax`. The pins are twice these.
const NONVANISHING_OBSERVED: [(usize, f64); 6] = [
    (1, 1.0),
    (2, 1.0),
    (3, 1.07965046407474063),
    (4, 1.13465983962941630),
    (5, 1.17885300415880168),
    (6, 1.21196976811861790),
];
const TWO_COMMUNITY_OBSERVED: [(usize, f64); 3] = [(2, 1.0), (4, 1.00000000014716539), (6, 1.00000000014716539)];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Sbm(#[from] SbmError),
}

/// The comparison whose worst case a check records.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `Psi(H) <= max(Psi(Star1), Psi(Star2))`.
    DiagonalStars,
    /// `Psi(H) <= max_{t <= dmax} Psi(Star_t)`.
    NonnegativeStars,
    /// `Psi(H) / max(Psi(Cyc4), Psi(Star1), Psi(Star2))`.
    NonvanishingRatio,
    /// `Psi(H) / max(Psi(Cyc4), max_{t <= dmax} Psi(Star_t))`.
    TwoCommunityRatio,
    /// `Psi(H) / max over {edge, stars, triangle, Cyc4}`; exploratory.
    ConjectureRatio,
    /// `Psi(Cyc_t) <= Psi(Cyc4)` for `t >= 5`.
    LongCycles,
    /// `|Phi(K4^-)| <= |Phi(Cyc4)|`.
    K4Minus,
    /// `|Phi(H)| <= |Phi(K_{2,d})|^(1/2)` for every vertex degree `d` of `H`.
    K2dRoot,
    /// `(min p)^4 max Q^4 <= Phi(Cyc4)`.
    Cycle4Lower,
    /// Label-sum `Phi(Cyc4)` against the six-term 2-community polynomial.
    TwoCommunityExpansion,
    /// `max(Phi/M, M/Phi)` for the 2-community 4-cycle sandwich.
    TwoCommunitySandwich,
    /// The weighted norm `(sum p^v q^(v-1))^(1/v)` is non-increasing in `v`.
    NormMonotone,
}

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::DiagonalStars => "diagonal_stars",
            Inequality::NonnegativeStars => "nonnegative_stars",
            Inequality::NonvanishingRatio => "nonvanishing_ratio",
            Inequality::TwoCommunityRatio => "two_community_ratio",
            Inequality::ConjectureRatio => "conjecture_ratio",
            Inequality::LongCycles => "long_cycles",
            Inequality::K4Minus => "k4minus",
            Inequality::K2dRoot => "k2d_root",
            Inequality::Cycle4Lower => "cycle4_lower",
            Inequality::TwoCommunityExpansion => "two_community_expansion",
            Inequality::TwoCommunitySandwich => "two_community_sandwich",
            Inequality::NormMonotone => "norm_monotone",
        }
    }

    /// Left and right side for one `(model, graph)` pair. The ratio is
    /// `lhs / rhs` except for the expansion, where `lhs` is the absolute gap.
    pub fn sides(&self, m: &SbmModel, h: Option<&PatternGraph>, dmax: usize) -> Result<(f64, f64), VerifyError> {
        let psi = |g: &PatternGraph| -> Result<f64, VerifyError> { Ok(fourier::phi(m, g)?.psi) };
        let phi = |g: &PatternGraph| -> Result<f64, VerifyError> { Ok(fourier::phi(m, g)?.phi) };
        let stars = |upto: usize| -> Result<f64, VerifyError> {
            (1..=upto).try_fold(0.0f64, |acc, t| Ok(acc.max(psi(&PatternGraph::star(t))?)))
        };
        let graph = || h.ok_or_else(|| VerifyError::Domain(format!("{} needs a graph", self.name())));
        Ok(match self {
            Inequality::DiagonalStars => (psi(graph()?)?, stars(2)?),
            Inequality::NonnegativeStars => (psi(graph()?)?, stars(dmax)?),
            Inequality::NonvanishingRatio => (psi(graph()?)?, stars(2)?.max(psi(&PatternGraph::cycle(4))?)),
            Inequality::TwoCommunityRatio => (psi(graph()?)?, stars(dmax)?.max(psi(&PatternGraph::cycle(4))?)),
            Inequality::ConjectureRatio => {
                let refs = stars(dmax)?.max(psi(&PatternGraph::cycle(3))?).max(psi(&PatternGraph::cycle(4))?);
                (psi(graph()?)?, refs)
            }
            Inequality::LongCycles => (psi(graph()?)?, psi(&PatternGraph::cycle(4))?),
            Inequality::K4Minus => (phi(&PatternGraph::k4_minus())?.abs(), phi(&PatternGraph::cycle(4))?.abs()),
            Inequality::K2dRoot => {
                let g = graph()?;
                let mut degrees: Vec<usize> = g.degrees().into_iter().filter(|&d| d > 0).collect();
                degrees.sort_unstable();
                degrees.dedup();
                let mut bound = f64::INFINITY;
                for d in degrees {
                    bound = bound.min(phi(&PatternGraph::complete_bipartite(2, d))?.abs().sqrt());
                }
                (phi(g)?.abs(), bound)
            }
            Inequality::Cycle4Lower => {
                let lower = m.min_p().powi(4) * m.max_abs_q().powi(4);
                (lower, phi(&PatternGraph::cycle(4))?)
            }
            Inequality::TwoCommunityExpansion => {
                let direct = phi_label_sum(m, &PatternGraph::cycle(4), DEFAULT_BUDGET)?.phi;
                ((direct - two_community_cycle4(m)?).abs(), EXPANSION_TOL)
            }
            Inequality::TwoCommunitySandwich => {
                let c4 = phi(&PatternGraph::cycle(4))?;
                let scale = sandwich_scale(m)?;
                let spread = if scale == 0.0 && c4 == 0.0 {
                    1.0
                } else if scale == 0.0 || c4 <= 0.0 {
                    f64::INFINITY
                } else {
                    (c4 / scale).max(scale / c4)
                };
                (spread, 1.0)
            }
            Inequality::NormMonotone => return Err(VerifyError::Domain("norm check is not per model".into())),
        })
    }
}

/// The six-term polynomial for `Phi(Cyc4)` of a two-community model.
pub fn two_community_cycle4(m: &SbmModel) -> Result<f64, VerifyError> {
    if m.k() != 2 {
        return Err(VerifyError::Precondition(format!("k = {} is not 2", m.k())));
    }
    let (p1, p2) = (m.p()[0], m.p()[1]);
    let (a, b, c) = (m.q(0, 0), m.q(0, 1), m.q(1, 1));
    Ok(p1.powi(4) * a.powi(4)
        + 4.0 * p1.powi(3) * p2 * a * a * b * b
        + 4.0 * p1 * p1 * p2 * p2 * a * b * b * c
        + 2.0 * p1 * p1 * p2 * p2 * b.powi(4)
        + 4.0 * p1 * p2.powi(3) * b * b * c * c
        + p2.powi(4) * c.powi(4))
}

/// `max(p1^4 Q11^4, p1^2 Q12^4, Q22^4)` after relabelling so that `p1 <= p2`.
pub fn sandwich_scale(m: &SbmModel) -> Result<f64, VerifyError> {
    if m.k() != 2 {
        return Err(VerifyError::Precondition(format!("k = {} is not 2", m.k())));
    }
    let (s, l) = if m.p()[0] <= m.p()[1] { (0, 1) } else { (1, 0) };
    let p1 = m.p()[s];
    Ok((p1.powi(4) * m.q(s, s).powi(4)).max(p1 * p1 * m.q(0, 1).powi(4)).max(m.q(l, l).powi(4)))
}

// ------------------------------------------------------------------ reports

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub model: SbmModel,
    pub graph: Option<PatternGraph>,
}

/// Tally for one inequality inside a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub inequality: Inequality,
    pub checks: u64,
    pub violations: u64,
    /// Both sides at or below the zero tolerance.
    pub skipped: u64,
    /// Right side zero with a non-zero left side, for pinned constants.
    pub flagged: u64,
    pub worst_ratio: f64,
    pub witness: Option<Witness>,
    /// `None` when the part only reports (exploratory searches).
    pub constant_bound_used: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub theorem: String,
    pub trials: usize,
    pub dmax: usize,
    pub violations: u64,
    /// Worst ratio of the headline inequality (the first part).
    pub worst_ratio: f64,
    pub worst_witness: Option<Witness>,
    pub constant_bound_used: Option<f64>,
    pub parts: Vec<PartReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn part(&self, inequality: Inequality) -> Option<&PartReport> {
        self.parts.iter().find(|p| p.inequality == inequality)
    }
}

/// How a part turns `(lhs, rhs)` pairs into violations.
#[derive(Clone, Copy)]
struct Rule {
    inequality: Inequality,
    constant: Option<f64>,
    /// Exact comparisons treat a zero right side as a violation; pinned ones flag it.
    exact: bool,
    abs_slack: f64,
}

impl Rule {
    fn exact(inequality: Inequality) -> Self {
        Rule { inequality, constant: Some(1.0), exact: true, abs_slack: ABS_SLACK }
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    checks: u64,
    violations: u64,
    skipped: u64,
    flagged: u64,
    worst: Option<(f64, usize, Option<PatternGraph>)>,
}

impl Tally {
    fn record(&mut self, rule: &Rule, trial: usize, graph: Option<PatternGraph>, lhs: f64, rhs: f64) {
        self.checks += 1;
        let ratio = if rule.inequality == Inequality::TwoCommunityExpansion {
            lhs
        } else if rhs <= ZERO_TOL {
            if lhs <= ZERO_TOL {
                self.skipped += 1;
                return;
            }
            if rule.exact {
                self.violations += 1;
            } else {
                self.flagged += 1;
            }
            f64::INFINITY
        } else {
            lhs / rhs
        };
        if rhs > ZERO_TOL || rule.inequality == Inequality::TwoCommunityExpansion {
            if let Some(c) = rule.constant {
                if lhs > c * rhs * (1.0 + REL_SLACK) + rule.abs_slack {
                    self.violations += 1;
                }
            }
        }
        if self.worst.as_ref().is_none_or(|w| ratio > w.0) {
            self.worst = Some((ratio, trial, graph));
        }
    }

    /// Trial-ordered merge; ties keep the earlier trial.
    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.skipped += other.skipped;
        self.flagged += other.flagged;
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|cur| w.0 > cur.0) {
                self.worst = Some(w);
            }
        }
    }
}

/// Per-model evaluation plan: which graphs go through which rule.
struct Plan {
    rules: Vec<(Rule, Vec<Option<PatternGraph>>)>,
    dmax: usize,
}

fn run_plan(theorem: &str, models: &[SbmModel], plan: &Plan) -> Result<VerifyReport, VerifyError> {
    let per_model: Vec<Vec<Tally>> = models
        .par_iter()
        .enumerate()
        .map(|(trial, m)| {
            plan.rules
                .iter()
                .map(|(rule, graphs)| {
                    let mut t = Tally::default();
                    for g in graphs {
                        let (lhs, rhs) = rule.inequality.sides(m, g.as_ref(), plan.dmax)?;
                        t.record(rule, trial, *g, lhs, rhs);
                    }
                    Ok(t)
                })
                .collect::<Result<Vec<_>, VerifyError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut totals: Vec<Tally> = vec![Tally::default(); plan.rules.len()];
    for tallies in per_model {
        for (acc, t) in totals.iter_mut().zip(tallies) {
            acc.merge(t);
        }
    }
    let parts: Vec<PartReport> = plan
        .rules
        .iter()
        .zip(totals)
        .map(|((rule, _), t)| PartReport {
            inequality: rule.inequality,
            checks: t.checks,
            violations: t.violations,
            skipped: t.skipped,
            flagged: t.flagged,
            worst_ratio: t.worst.as_ref().map_or(0.0, |w| w.0),
            witness: t.worst.map(|(_, trial, graph)| Witness { trial, model: models[trial].clone(), graph }),
            constant_bound_used: rule.constant,
        })
        .collect();
    let head = &parts[0];
    Ok(VerifyReport {
        theorem: theorem.into(),
        trials: models.len(),
        dmax: plan.dmax,
        violations: parts.iter().map(|p| p.violations).sum(),
        worst_ratio: head.worst_ratio,
        worst_witness: head.witness.clone(),
        constant_bound_used: head.constant_bound_used,
        parts,
    })
}

/// Re-evaluates a part's witness; returns the ratio it reproduces.
pub fn replay(part: &PartReport, dmax: usize) -> Result<f64, VerifyError> {
    let w = part.witness.as_ref().ok_or_else(|| VerifyError::Domain("no witness".into()))?;
    let (lhs, rhs) = part.inequality.sides(&w.model, w.graph.as_ref(), dmax)?;
    Ok(if part.inequality == Inequality::TwoCommunityExpansion {
        lhs
    } else if rhs <= ZERO_TOL {
        f64::INFINITY
    } else {
        lhs / rhs
    })
}

fn graphs_of(list: Vec<PatternGraph>) -> Vec<Option<PatternGraph>> {
    list.into_iter().map(Some).collect()
}

fn check_dmax(dmax: usize) -> Result<(), VerifyError> {
    if (1..=DEFAULT_DMAX).contains(&dmax) {
        Ok(())
    } else {
        Err(VerifyError::Precondition(format!("dmax = {dmax} outside [1, {DEFAULT_DMAX}]")))
    }
}

fn lower_bound_rule() -> (Rule, Vec<Option<PatternGraph>>) {
    (Rule::exact(Inequality::Cycle4Lower), vec![None])
}

// ------------------------------------------------------------------- checks

pub fn check_diagonal(models: &[SbmModel], dmax: usize) -> Result<VerifyReport, VerifyError> {
    check_dmax(dmax)?;
    if let Some(i) = models.iter().position(|m| !classify(m, DEFAULT_UNBIASED_TOL).is_diagonal) {
        return Err(VerifyError::Precondition(format!("model {i} is not diagonal")));
    }
    let plan = Plan { rules: vec![(Rule::exact(Inequality::DiagonalStars), graphs_of(connected_catalog(dmax))), lower_bound_rule()], dmax };
    run_plan("diagonal", models, &plan)
}

pub fn check_nonnegative(models: &[SbmModel], dmax: usize) -> Result<VerifyReport, VerifyError> {
    check_dmax(dmax)?;
    if let Some(i) = models.iter().position(|m| !classify(m, DEFAULT_UNBIASED_TOL).is_nonnegative) {
        return Err(VerifyError::Precondition(format!("model {i} has a negative entry")));
    }
    let plan = Plan { rules: vec![(Rule::exact(Inequality::NonnegativeStars), graphs_of(connected_catalog(dmax))), lower_bound_rule()], dmax };
    run_plan("nonnegative", models, &plan)
}

pub fn check_nonvanishing(models: &[SbmModel], c: f64, dmax: usize) -> Result<VerifyReport, VerifyError> {
    check_dmax(dmax)?;
    if let Some(i) = models.iter().position(|m| m.min_p() < c) {
        return Err(VerifyError::Precondition(format!("model {i} has min p below {c}")));
    }
    let pin = if c == NONVANISHING_C { pinned_constant(Inequality::NonvanishingRatio, dmax) } else { None };
    let ratio = Rule { inequality: Inequality::NonvanishingRatio, constant: pin, exact: false, abs_slack: ABS_SLACK };
    let plan = Plan { rules: vec![(ratio, graphs_of(connected_catalog(dmax))), lower_bound_rule()], dmax };
    run_plan("nonvanishing", models, &plan)
}

pub fn check_two_community(models: &[SbmModel], dmax: usize) -> Result<VerifyReport, VerifyError> {
    check_dmax(dmax)?;
    if dmax % 2 != 0 {
        return Err(VerifyError::Precondition(format!("dmax = {dmax} must be even")));
    }
    if let Some(i) = models.iter().position(|m| m.k() != 2) {
        return Err(VerifyError::Precondition(format!("model {i} does not have two communities")));
    }
    let ratio = Rule {
        inequality: Inequality::TwoCommunityRatio,
        constant: pinned_constant(Inequality::TwoCommunityRatio, dmax),
        exact: false,
        abs_slack: ABS_SLACK,
    };
    let expansion = Rule { inequality: Inequality::TwoCommunityExpansion, constant: Some(1.0), exact: true, abs_slack: 0.0 };
    let sandwich = Rule { inequality: Inequality::TwoCommunitySandwich, constant: Some(SANDWICH_CONSTANT), exact: true, abs_slack: 0.0 };
    let plan = Plan {
        rules: vec![(ratio, graphs_of(connected_catalog(dmax))), (expansion, vec![None]), (sandwich, vec![None]), lower_bound_rule()],
        dmax,
    };
    run_plan("two_community", models, &plan)
}

/// Catalog used by [`check_one_to_one`]: every graph on at most 6 edges.
pub fn one_to_one_catalog() -> Vec<PatternGraph> {
    enumerate_graphs(DEFAULT_DMAX, false).expect("dmax in range")
}

pub fn check_one_to_one(models: &[SbmModel]) -> Result<VerifyReport, VerifyError> {
    let cycles = (5..=8).map(|t| Some(PatternGraph::cycle(t))).collect();
    let root = Rule { inequality: Inequality::K2dRoot, constant: Some(1.0), exact: true, abs_slack: ROOT_SLACK };
    let plan = Plan {
        rules: vec![
            (Rule::exact(Inequality::LongCycles), cycles),
            (Rule::exact(Inequality::K4Minus), vec![None]),
            (root, graphs_of(one_to_one_catalog())),
            lower_bound_rule(),
        ],
        dmax: DEFAULT_DMAX,
    };
    run_plan("one_to_one", models, &plan)
}

/// `v -> (sum_i p_i^v q_i^(v-1))^(1/v)` on `grid`.
pub fn weighted_norm(p: &[f64], q: &[f64], v: f64) -> f64 {
    p.iter().zip(q).map(|(&pi, &qi)| pi.powf(v) * if v == 1.0 { 1.0 } else { qi.powf(v - 1.0) }).sum::<f64>().powf(1.0 / v)
}

pub fn check_norm_monotone(p: &[f64], q: &[f64], grid: &[f64]) -> Result<bool, VerifyError> {
    if p.len() != q.len() || p.is_empty() {
        return Err(VerifyError::Domain("p and q must have the same non-zero length".into()));
    }
    if p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(VerifyError::Domain("p must be a probability vector".into()));
    }
    if q.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(VerifyError::Domain("q entries must lie in [0, 1]".into()));
    }
    if grid.iter().any(|&v| !(v >= 1.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(VerifyError::Domain("grid must be ascending and at least 1".into()));
    }
    let values: Vec<f64> = grid.iter().map(|&v| weighted_norm(p, q, v)).collect();
    Ok(values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)))
}

/// Grid `1, 1.5, ..., 10` used by [`norm_search`].
pub fn norm_grid() -> Vec<f64> {
    (0..19).map(|i| 1.0 + 0.5 * i as f64).collect()
}

/// Random `p` (flat Dirichlet, `k <= 8`) and `q` uniform in `[0, 1]^k`.
pub fn random_norm_instance(stream: &SeededStream) -> (Vec<f64>, Vec<f64>) {
    let mut rng = stream.rng();
    let k = rng.random_range(1..=8);
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    let p = if total > 0.0 { w.iter().map(|x| x / total).collect() } else { vec![1.0 / k as f64; k] };
    let q = (0..k).map(|_| rng.random::<f64>()).collect();
    (p, q)
}

/// [`check_norm_monotone`] on `trials` random instances; trial `i` uses child stream `i`.
pub fn norm_search(trials: usize, stream: &SeededStream) -> Result<VerifyReport, VerifyError> {
    let grid = norm_grid();
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (p, q) = random_norm_instance(&stream.child(t));
            check_norm_monotone(&p, &q, &grid)
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let violations = outcomes.iter().filter(|ok| !**ok).count() as u64;
    let part = PartReport {
        inequality: Inequality::NormMonotone,
        checks: trials as u64,
        violations,
        skipped: 0,
        flagged: 0,
        worst_ratio: 0.0,
        witness: None,
        constant_bound_used: Some(1.0),
    };
    Ok(VerifyReport {
        theorem: "norm_monotone".into(),
        trials,
        dmax: 0,
        violations,
        worst_ratio: 0.0,
        worst_witness: None,
        constant_bound_used: Some(1.0),
        parts: vec![part],
    })
}

// ------------------------------------------------------------- falsification

/// Largest community count drawn for each family.
pub fn family_max_k(family: RandomFamily) -> usize {
    match family {
        RandomFamily::Diagonal | RandomFamily::Nonnegative => 4,
        RandomFamily::Nonvanishing(c) => ((1.0 / c).floor() as usize).clamp(1, 5),
        RandomFamily::TwoCommunity => 2,
        RandomFamily::Arbitrary => 5,
    }
}

/// Scale passed as `n_context`: `|Q|` goes down to `1 / n_context`.
pub fn family_n_context(family: RandomFamily) -> u64 {
    match family {
        // smallest community probability reaches n^-0.9 ~ 4e-6
        RandomFamily::TwoCommunity => 1_000_000,
        _ => 1000,
    }
}

/// Models for trials `0..count`; trial `i` draws from child stream `i`.
pub fn generate_models(family: RandomFamily, count: usize, stream: &SeededStream) -> Result<Vec<SbmModel>, VerifyError> {
    let kmax = family_max_k(family);
    let n_context = family_n_context(family);
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.child(i).rng();
            let k = if kmax == 2 && family == RandomFamily::TwoCommunity { 2 } else { rng.random_range(1..=kmax) };
            Ok(random_sbm_with(family, k, n_context, PriorOptions::default(), &mut rng)?)
        })
        .collect()
}

/// Random models from `family` against that family's comparison. The
/// `arbitrary` family reports the ratio to `{edge, stars, triangle, Cyc4}`
/// without a bound.
pub fn falsify_search(family: RandomFamily, dmax: usize, budget_models: usize, stream: &SeededStream) -> Result<VerifyReport, VerifyError> {
    let models = generate_models(family, budget_models, stream)?;
    match family {
        RandomFamily::Diagonal => check_diagonal(&models, dmax),
        RandomFamily::Nonnegative => check_nonnegative(&models, dmax),
        RandomFamily::Nonvanishing(c) => check_nonvanishing(&models, c, dmax),
        RandomFamily::TwoCommunity => check_two_community(&models, dmax),
        RandomFamily::Arbitrary => {
            check_dmax(dmax)?;
            let ratio = Rule { inequality: Inequality::ConjectureRatio, constant: None, exact: false, abs_slack: ABS_SLACK };
            let plan = Plan { rules: vec![(ratio, graphs_of(connected_catalog(dmax))), lower_bound_rule()], dmax };
            run_plan("arbitrary", &models, &plan)
        }
    }
}

/// Committed bound for a pinned inequality: twice the worst ratio seen on the
/// pin seed.
pub fn pinned_constant(inequality: Inequality, dmax: usize) -> Option<f64> {
    let table: &[(usize, f64)] = match inequality {
        Inequality::NonvanishingRatio => &NONVANISHING_OBSERVED,
        Inequality::TwoCommunityRatio => &TWO_COMMUNITY_OBSERVED,
        _ => return None,
    };
    table.iter().find(|(d, _)| *d == dmax).map(|(_, w)| 2.0 * w)
}

/// The observed worst ratio a pin was derived from.
pub fn pinned_observation(inequality: Inequality, dmax: usize) -> Option<f64> {
    pinned_constant(inequality, dmax).map(|c| c / 2.0)
}

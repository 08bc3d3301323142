//! Seek, cache and recall cycles driven by value of information.
//!
//! Every quantity is a change in the risk `J` on the context buffer `B`:
//!
//! ```text
//! VOP(x_t) = k_horiz · (J - J^t) / |B| - E[C_t]
//!     J^t  = p_t · J^{t,+} + (1 - p_t) · J^{t,-}
//! VOF(x_i) = J - J^{-i}      (site i divided out of the posterior)
//! VOR(x_i) = J - J^{+i}      (cached point i projected back in)
//! ```
//!
//! Hypothetical posteriors always come from a single ADF projection or a
//! single site division, never from a refit.

use std::collections::{BTreeMap, VecDeque};

use crate::posterior::Site;
use crate::risk::{buffer_risk, expected_probe_cost};
use crate::{Error, Label, LabeledPoint, PointId, Posterior, ProbeCosts, Result, RiskMatrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Capacity of the context buffer.
    pub s_buffer: usize,
    /// Number of future points a probe's risk reduction is amortized over.
    pub k_horiz: f64,
    pub risk: RiskMatrix,
    pub probe_costs: ProbeCosts,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s_buffer < 1 {
            return Err(Error::InvalidConfig("s_buffer must be at least 1".into()));
        }
        if !self.k_horiz.is_finite() || self.k_horiz <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "k_horiz must be positive, got {}",
                self.k_horiz
            )));
        }
        self.risk.validate()?;
        self.probe_costs.validate()
    }
}

/// Answers probes. The engine only asks for labels it has decided to buy.
pub trait LabelOracle {
    fn label(&mut self, step: u64, x: &Vector) -> Option<Label>;
}

impl<F> LabelOracle for F
where
    F: FnMut(u64, &Vector) -> Option<Label>,
{
    fn label(&mut self, step: u64, x: &Vector) -> Option<Label> {
        self(step, x)
    }
}

/// Active set, cache, context buffer and the current posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    active: BTreeMap<PointId, LabeledPoint>,
    cache: BTreeMap<PointId, LabeledPoint>,
    buffer: VecDeque<Vector>,
    posterior: Posterior,
    step: u64,
}

impl LearnerState {
    /// Empty sets and the prior as the initial classifier.
    pub fn new(dim: usize) -> Result<LearnerState> {
        Ok(LearnerState {
            active: BTreeMap::new(),
            cache: BTreeMap::new(),
            buffer: VecDeque::new(),
            posterior: Posterior::prior(dim)?,
            step: 0,
        })
    }

    /// Warm start from an existing case library.
    ///
    /// The active set is read off the posterior's sites; `cached` points go to
    /// the cache. The buffer starts empty and the step counter continues after
    /// the largest known id.
    pub fn from_posterior(
        posterior: Posterior,
        cached: impl IntoIterator<Item = LabeledPoint>,
    ) -> Result<LearnerState> {
        let active: BTreeMap<PointId, LabeledPoint> = posterior
            .sites()
            .iter()
            .map(|(&id, site)| (id, site.point.clone()))
            .collect();
        let mut cache = BTreeMap::new();
        for point in cached {
            if point.x.len() != posterior.dim() {
                return Err(Error::DimensionMismatch {
                    expected: posterior.dim(),
                    found: point.x.len(),
                });
            }
            if active.contains_key(&point.id) || cache.contains_key(&point.id) {
                return Err(Error::DuplicatePoint(point.id));
            }
            cache.insert(point.id, point);
        }
        let step = active.keys().chain(cache.keys()).max().map_or(0, |&id| id + 1);
        Ok(LearnerState {
            active,
            cache,
            buffer: VecDeque::new(),
            posterior,
            step,
        })
    }

    pub fn active(&self) -> &BTreeMap<PointId, LabeledPoint> {
        &self.active
    }

    pub fn cache(&self) -> &BTreeMap<PointId, LabeledPoint> {
        &self.cache
    }

    pub fn buffer(&self) -> &VecDeque<Vector> {
        &self.buffer
    }

    pub fn posterior(&self) -> &Posterior {
        &self.posterior
    }

    /// Number of points observed so far; also the id the next point will get.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.posterior.dim()
    }

    /// Appends `x` to the buffer, dropping the oldest entries beyond `capacity`.
    pub fn observe(&self, x: Vector, capacity: usize) -> Result<LearnerState> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut next = self.clone();
        next.buffer.push_back(x);
        while next.buffer.len() > capacity.max(1) {
            next.buffer.pop_front();
        }
        Ok(next)
    }

    /// Adds a freshly labeled point to the active set.
    pub fn with_labeled(&self, point: LabeledPoint) -> Result<LearnerState> {
        if self.cache.contains_key(&point.id) || self.active.contains_key(&point.id) {
            return Err(Error::DuplicatePoint(point.id));
        }
        let mut next = self.clone();
        next.posterior = self.posterior.adf_update(&point)?;
        next.active.insert(point.id, point);
        Ok(next)
    }

    /// Marks the end of a step.
    pub fn advance(&self) -> LearnerState {
        let mut next = self.clone();
        next.step += 1;
        next
    }

    fn buffer_risk_under(&self, post: &Posterior, config: &EngineConfig) -> Result<f64> {
        buffer_risk(post, &self.buffer, &config.risk)
    }
}

/// Value of probing `x`, which must already sit in the buffer.
pub fn compute_vop(state: &LearnerState, x: &Vector, config: &EngineConfig) -> Result<f64> {
    if state.buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let post = &state.posterior;
    let p = post.predictive_prob(x)?;
    let j = state.buffer_risk_under(post, config)?;
    let id = state.step;
    let mut expected_after = 0.0;
    for (label, weight) in [(Label::Positive, p), (Label::Negative, 1.0 - p)] {
        let hypo = post.adf_update(&LabeledPoint::new(id, x.clone(), label))?;
        expected_after += weight * state.buffer_risk_under(&hypo, config)?;
    }
    let delta = (j - expected_after) / state.buffer.len() as f64;
    Ok(config.k_horiz * delta - expected_probe_cost(p, &config.probe_costs))
}

/// Value of forgetting active point `id`; `-inf` when its site cannot be removed.
pub fn compute_vof(state: &LearnerState, id: PointId, config: &EngineConfig) -> Result<f64> {
    if !state.active.contains_key(&id) {
        return Err(Error::UnknownActivePoint(id));
    }
    if state.buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let j = state.buffer_risk_under(&state.posterior, config)?;
    match state.posterior.downdate_site(id) {
        Ok((cavity, _)) => Ok(j - state.buffer_risk_under(&cavity, config)?),
        Err(Error::NearSingularCavity(_)) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// Value of recalling cached point `id`. No probe cost: its label is already paid for.
pub fn compute_vor(state: &LearnerState, id: PointId, config: &EngineConfig) -> Result<f64> {
    let point = state.cache.get(&id).ok_or(Error::UnknownCachedPoint(id))?;
    if state.buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let j = state.buffer_risk_under(&state.posterior, config)?;
    let recalled = state.posterior.adf_update(point)?;
    Ok(j - state.buffer_risk_under(&recalled, config)?)
}

/// Which cycles [`step_with`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cycles {
    pub seek: bool,
    pub cache: bool,
    pub recall: bool,
}

impl Cycles {
    pub const ALL: Cycles = Cycles {
        seek: true,
        cache: true,
        recall: true,
    };
    pub const SEEK_ONLY: Cycles = Cycles {
        seek: true,
        cache: false,
        recall: false,
    };
}

/// Everything decided during one step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepDecisions {
    pub step: u64,
    pub vop: Option<f64>,
    /// Label bought from the oracle, if the point was probed.
    pub probed: Option<Label>,
    pub vof: Vec<(PointId, f64)>,
    pub cached_ids: Vec<PointId>,
    pub vor: Vec<(PointId, f64)>,
    pub recalled_ids: Vec<PointId>,
}

/// One full seek → cache → recall step on arriving point `x`.
pub fn step(
    state: &LearnerState,
    x: &Vector,
    oracle: &mut dyn LabelOracle,
    config: &EngineConfig,
) -> Result<(LearnerState, StepDecisions)> {
    step_with(state, x, oracle, config, Cycles::ALL)
}

pub fn step_with(
    state: &LearnerState,
    x: &Vector,
    oracle: &mut dyn LabelOracle,
    config: &EngineConfig,
    cycles: Cycles,
) -> Result<(LearnerState, StepDecisions)> {
    config.validate()?;
    let id = state.step;
    let mut decisions = StepDecisions {
        step: id,
        ..Default::default()
    };
    let mut state = state.observe(x.clone(), config.s_buffer)?;

    if cycles.seek {
        let vop = compute_vop(&state, x, config)?;
        decisions.vop = Some(vop);
        if vop > 0.0 {
            let label = oracle.label(id, x).ok_or(Error::OracleFailure(id))?;
            state = state.with_labeled(LabeledPoint::new(id, x.clone(), label))?;
            decisions.probed = Some(label);
        }
    }

    if cycles.cache {
        // Decide on one snapshot, then apply in ascending id order.
        for &pid in state.active.keys() {
            decisions.vof.push((pid, compute_vof(&state, pid, config)?));
        }
        for &(pid, value) in &decisions.vof {
            if value > 0.0 {
                match state.posterior.downdate_site(pid) {
                    Ok((cavity, Site { point, .. })) => {
                        state.posterior = cavity;
                        state.active.remove(&pid);
                        state.cache.insert(pid, point);
                        decisions.cached_ids.push(pid);
                    }
                    Err(Error::NearSingularCavity(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }

    if cycles.recall {
        for &pid in state.cache.keys() {
            decisions.vor.push((pid, compute_vor(&state, pid, config)?));
        }
        for &(pid, value) in &decisions.vor {
            if value > 0.0 {
                let point = state.cache.remove(&pid).expect("cached point");
                state.posterior = state.posterior.adf_update(&point)?;
                state.active.insert(pid, point);
                decisions.recalled_ids.push(pid);
            }
        }
    }

    Ok((state.advance(), decisions))
}

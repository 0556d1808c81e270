//! Stateless per-step kernels: payoff, protection, failure, imitation,
//! exploration, and recovery.
//!
//! Each sweep is a pure transformation of the agent slice plus a random
//! stream. Draw order is fixed and documented per kernel so that results are
//! bit-reproducible for a given stream.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::netgen::NetworkModel;

/// One agent: capital, the (f_p0, f_p1) strategy pair, the protection level
/// derived from them, and the failure bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    /// Accumulated capital; pinned to 0 while failed.
    pub capital: f64,
    /// Strategy intercept. Unbounded: selection can drive it negative.
    pub fp0: f64,
    /// Strategy slope on centrality. Unbounded.
    pub fp1: f64,
    /// Derived protection level, clamped to [0, 1 - f_m].
    pub fp: f64,
    /// Whether the node is failed as of the last resolution.
    pub failed: bool,
    /// Threat flag; converts to failure with probability 1 - p_p.
    pub failure_potential: bool,
    /// Steps the failure persists beyond the current one. A node with
    /// `failed` set and countdown 0 is in the last recorded step of its
    /// failure: it earns and imitates again next step and recovers at that
    /// step's resolution.
    pub fail_countdown: u32,
}

impl AgentState {
    /// Fresh unfailed agent with the given capital and strategies.
    pub fn new(capital: f64, fp0: f64, fp1: f64) -> Self {
        AgentState {
            capital,
            fp0,
            fp1,
            fp: 0.0,
            failed: false,
            failure_potential: false,
            fail_countdown: 0,
        }
    }

    /// True while the failure still has steps to serve. Such nodes earn no
    /// payoff and skip imitation as focal agents, but keep propagating and
    /// remain selectable as role models.
    pub fn mid_failure(&self) -> bool {
        self.failed && self.fail_countdown > 0
    }
}

/// Update order of the imitation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImitationMode {
    /// Agents update in ascending index order with immediate visibility, so
    /// a strategy copied early in the sweep can be copied onward within the
    /// same sweep.
    #[default]
    Sequential,
    /// All copies are taken from a snapshot of the strategies at the start
    /// of the sweep and applied together.
    Synchronous,
}

/// How exploration distributes its perturbations over the two strategy
/// values. Both modes perturb one value per agent per step in expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExplorationMode {
    /// Each strategy value is perturbed independently with probability
    /// p_e / 2.
    #[default]
    PerValue,
    /// With probability p_e the agent picks one of its two values uniformly
    /// and perturbs it.
    PickOne,
}

/// Full parameter record: evolutionary, non-evolutionary, and time-dependent
/// parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    // Non-evolutionary part.
    /// Number of nodes.
    pub n: usize,
    /// Connection probability of the random graph.
    pub p_c: f64,
    /// Maintenance fraction spent every step.
    pub f_m: f64,
    /// Per-node failure-potential origination probability.
    pub p_n: f64,
    /// Per-link failure-potential propagation probability.
    pub p_l: f64,
    /// Protection maximum p_p,max.
    pub pp_max: f64,
    /// Reference point c_p,1/2 of the saturation function.
    pub cp_half: f64,

    // Evolutionary part.
    /// Imitation probability.
    pub p_r: f64,
    /// Selection intensity.
    pub s: f64,
    /// Exploration probability.
    pub p_e: f64,
    /// Exploration increment mean.
    pub mu: f64,
    /// Exploration increment standard deviation.
    pub sigma_e: f64,

    // Time-dependent part.
    /// Number of steps to simulate; the series also records t = 0.
    pub t_max: usize,
    /// Probability that a failure potential is cleared at the end of a step.
    pub rec1: f64,
    /// Failure duration in steps (recovery time delay).
    pub failtime: u32,
    /// Default ensemble size.
    pub realizations: usize,

    // Strategy initialization.
    pub init_fp0: f64,
    pub init_fp1: f64,
    pub init_sd: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 100,
            p_c: 0.9,
            f_m: 0.1,
            p_n: 0.1,
            p_l: 0.1,
            pp_max: 1.0,
            cp_half: 0.1,
            p_r: 0.9,
            s: 100.0,
            p_e: 0.05,
            mu: 0.0,
            sigma_e: 0.0125,
            t_max: 4000,
            rec1: 1.0,
            failtime: 1,
            realizations: 1,
            init_fp0: 0.7,
            init_fp1: 0.7,
            init_sd: 0.01,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "node count must be at least 1"));
        }
        for (name, value) in [
            ("p_c", self.p_c),
            ("p_n", self.p_n),
            ("p_l", self.p_l),
            ("pp_max", self.pp_max),
            ("p_r", self.p_r),
            ("p_e", self.p_e),
            ("rec1", self.rec1),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name,
                    message: format!("{value} outside [0, 1]"),
                });
            }
        }
        if !(0.0..1.0).contains(&self.f_m) {
            return Err(Error::invalid("f_m", format!("{} outside [0, 1)", self.f_m)));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::invalid("s", "selection intensity must be finite and >= 0"));
        }
        if !self.mu.is_finite() {
            return Err(Error::invalid("mu", "exploration mean must be finite"));
        }
        if !(self.sigma_e >= 0.0 && self.sigma_e.is_finite()) {
            return Err(Error::invalid("sigma_e", "standard deviation must be finite and >= 0"));
        }
        if !(self.cp_half >= 0.0 && self.cp_half.is_finite()) {
            return Err(Error::invalid("cp_half", "reference point must be finite and >= 0"));
        }
        if self.failtime == 0 {
            return Err(Error::invalid("failtime", "failure duration must be at least 1 step"));
        }
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "ensemble size must be at least 1"));
        }
        if !(self.init_sd >= 0.0 && self.init_sd.is_finite()) {
            return Err(Error::invalid("init_sd", "standard deviation must be finite and >= 0"));
        }
        if !(self.init_fp0.is_finite() && self.init_fp1.is_finite()) {
            return Err(Error::invalid("init_fp0", "strategy means must be finite"));
        }
        Ok(())
    }
}

/// Protection level f_p = f_p0 + f_p1 C, truncated to [0, 1 - f_m]. The
/// strategy values themselves are never clamped.
pub fn protection_level(fp0: f64, fp1: f64, centrality: f64, f_m: f64) -> f64 {
    (fp0 + fp1 * centrality).clamp(0.0, 1.0 - f_m)
}

/// Payoff update: the unit payoff plus what maintenance and protection leave
/// of the current capital, 1 + (1 - f_m - f_p) c.
pub fn capital_update(capital: f64, f_m: f64, fp: f64) -> f64 {
    1.0 + (1.0 - f_m - fp) * capital
}

/// Saturating protection probability p_p = p_p,max / (1 + c_p,1/2 / (f_p c)).
///
/// Limits: zero investment with a positive reference point gives 0; the
/// indeterminate 0/0 case (zero investment, zero reference point) gives
/// p_p,max.
pub fn protection_probability(pp_max: f64, cp_half: f64, fp: f64, capital: f64) -> f64 {
    let investment = fp * capital;
    if investment <= 0.0 {
        if cp_half == 0.0 { pp_max } else { 0.0 }
    } else {
        pp_max / (1.0 + cp_half / investment)
    }
}

/// Fermi imitation probability p_i = 1 / (1 + exp(-s dc)), evaluated in the
/// overflow-free split form so large |s dc| saturates cleanly to 0 or 1.
pub fn imitation_probability(s: f64, delta_c: f64) -> f64 {
    let x = s * delta_c;
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Imitation sweep. Each focal agent, in ascending index order, decides with
/// probability `p_r` to draw a role model (uniform over the other agents, by
/// rejection), and copies its strategy pair with the Fermi probability of the
/// capital difference.
///
/// Draw order per eligible focal agent: the p_r gate, then role-model draws
/// until distinct, then the acceptance gate. Mid-failure agents are skipped
/// as focal (consuming no draws) but stay selectable as role models.
pub fn imitation_sweep<R: Rng>(
    agents: &mut [AgentState],
    p_r: f64,
    s: f64,
    mode: ImitationMode,
    rng: &mut R,
) {
    let n = agents.len();
    if n < 2 || p_r <= 0.0 {
        return;
    }
    let snapshot: Option<Vec<(f64, f64)>> = match mode {
        ImitationMode::Sequential => None,
        ImitationMode::Synchronous => Some(agents.iter().map(|a| (a.fp0, a.fp1)).collect()),
    };
    for focal in 0..n {
        if agents[focal].mid_failure() {
            continue;
        }
        if rng.random::<f64>() >= p_r {
            continue;
        }
        let role = loop {
            let candidate = rng.random_range(0..n);
            if candidate != focal {
                break candidate;
            }
        };
        let p_accept = imitation_probability(s, agents[role].capital - agents[focal].capital);
        if rng.random::<f64>() < p_accept {
            let (fp0, fp1) = match &snapshot {
                Some(snap) => snap[role],
                None => (agents[role].fp0, agents[role].fp1),
            };
            agents[focal].fp0 = fp0;
            agents[focal].fp1 = fp1;
        }
    }
}

/// Exploration sweep: Gaussian perturbation of strategy values.
///
/// Draw order: agents in index order; per agent, the f_p0 gate (and
/// increment, when taken) before the f_p1 gate. Perturbed values are not
/// clamped.
pub fn exploration_sweep<R: Rng>(
    agents: &mut [AgentState],
    p_e: f64,
    mu: f64,
    sigma_e: f64,
    mode: ExplorationMode,
    rng: &mut R,
) {
    if p_e <= 0.0 {
        return;
    }
    let normal = Normal::new(mu, sigma_e).expect("finite mean and non-negative sd");
    match mode {
        ExplorationMode::PerValue => {
            let per_value = 0.5 * p_e;
            for agent in agents.iter_mut() {
                if rng.random::<f64>() < per_value {
                    agent.fp0 += normal.sample(rng);
                }
                if rng.random::<f64>() < per_value {
                    agent.fp1 += normal.sample(rng);
                }
            }
        }
        ExplorationMode::PickOne => {
            for agent in agents.iter_mut() {
                if rng.random::<f64>() < p_e {
                    let increment = normal.sample(rng);
                    if rng.random_range(0..2) == 0 {
                        agent.fp0 += increment;
                    } else {
                        agent.fp1 += increment;
                    }
                }
            }
        }
    }
}

/// Flags each node with a fresh failure potential with probability `p_n`.
/// Existing flags persist. One draw per node, in index order.
pub fn originate_potentials<R: Rng>(agents: &mut [AgentState], p_n: f64, rng: &mut R) {
    if p_n <= 0.0 {
        return;
    }
    for agent in agents.iter_mut() {
        if rng.random::<f64>() < p_n {
            agent.failure_potential = true;
        }
    }
}

/// Spreads failure potentials from every currently-failed node to each of
/// its neighbors independently with probability `p_l`. Failed flags must
/// still reflect the previous step's failures: nodes flagged here never
/// propagate within the same step.
///
/// Draw order: failed nodes in index order, their neighbors in ascending
/// order, one draw per link regardless of the target's flag state.
pub fn propagate_potentials<R: Rng>(
    net: &NetworkModel,
    agents: &mut [AgentState],
    p_l: f64,
    rng: &mut R,
) {
    if p_l <= 0.0 {
        return;
    }
    for i in 0..agents.len() {
        if !agents[i].failed {
            continue;
        }
        for &j in net.neighbors(i) {
            if rng.random::<f64>() < p_l {
                agents[j as usize].failure_potential = true;
            }
        }
    }
}

/// Outcome summary of one resolution pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolveReport {
    /// Number of nodes whose failure potential was evaluated.
    pub evaluated: usize,
    /// Mean protection probability over those nodes; 0 when none were
    /// flagged.
    pub mean_pp: f64,
}

impl ResolveReport {
    pub fn empty() -> Self {
        ResolveReport {
            evaluated: 0,
            mean_pp: 0.0,
        }
    }
}

/// Failure resolution. First every node whose countdown has run out recovers;
/// then each flagged, not-failed node converts its potential into a failure
/// with probability 1 - p_p, losing its capital and starting a countdown of
/// `failtime` steps. Nodes still serving a countdown stay failed with capital
/// pinned to 0.
///
/// Draw order: one draw per conversion candidate, in index order.
pub fn resolve_failures<R: Rng>(
    agents: &mut [AgentState],
    pp_max: f64,
    cp_half: f64,
    failtime: u32,
    rng: &mut R,
) -> ResolveReport {
    for agent in agents.iter_mut() {
        if agent.failed && agent.fail_countdown == 0 {
            agent.failed = false;
        }
    }
    let mut evaluated = 0usize;
    let mut pp_sum = 0.0;
    for agent in agents.iter_mut() {
        if !agent.failure_potential || agent.failed {
            continue;
        }
        let pp = protection_probability(pp_max, cp_half, agent.fp, agent.capital);
        evaluated += 1;
        pp_sum += pp;
        if rng.random::<f64>() < 1.0 - pp {
            agent.failed = true;
            agent.capital = 0.0;
            agent.fail_countdown = failtime;
        }
    }
    ResolveReport {
        evaluated,
        mean_pp: if evaluated > 0 {
            pp_sum / evaluated as f64
        } else {
            0.0
        },
    }
}

/// End-of-step reset: failure potentials are cleared with probability `rec1`
/// (one draw per flagged node, index order) and ongoing failures tick their
/// countdown down by one.
pub fn reset_potentials<R: Rng>(agents: &mut [AgentState], rec1: f64, rng: &mut R) {
    for agent in agents.iter_mut() {
        if agent.failure_potential && rng.random::<f64>() < rec1 {
            agent.failure_potential = false;
        }
    }
    for agent in agents.iter_mut() {
        if agent.failed && agent.fail_countdown > 0 {
            agent.fail_countdown -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::NetworkModel;
    use rand_chacha::ChaCha8Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn agent(capital: f64, fp0: f64, fp1: f64) -> AgentState {
        AgentState::new(capital, fp0, fp1)
    }

    #[test]
    fn protection_level_truncation() {
        assert_eq!(protection_level(0.4, 0.5, 1.0, 0.1), 0.9);
        assert_eq!(protection_level(-0.2, 0.1, 0.5, 0.1), 0.0);
        assert_eq!(protection_level(0.7, 0.7, 1.0, 0.1), 0.9);
        assert!((protection_level(0.3, 0.3, 0.5, 0.1) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn capital_update_values() {
        assert_eq!(capital_update(0.0, 0.1, 0.9), 1.0);
        assert!((capital_update(1.0, 0.1, 0.9) - 1.0).abs() < 1e-12);
        assert!((capital_update(1.0, 0.1, 0.4) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn protection_probability_scenarios() {
        // The four (pp_max, cp_half) corner cases at an investment of 0.9
        // and 0.1 respectively.
        assert!((protection_probability(1.0, 1.0, 0.9, 1.0) - 0.4737).abs() < 1e-4);
        assert!((protection_probability(0.1, 1.0, 0.9, 1.0) - 0.0474).abs() < 1e-4);
        assert!((protection_probability(0.1, 0.1, 0.1, 1.0) - 0.05).abs() < 1e-12);
        assert!((protection_probability(1.0, 0.1, 0.1, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn protection_probability_limits() {
        assert_eq!(protection_probability(0.7, 1.0, 0.0, 5.0), 0.0);
        assert_eq!(protection_probability(0.7, 1.0, 0.5, 0.0), 0.0);
        // 0/0 convention: no reference point means full protection.
        assert_eq!(protection_probability(0.7, 0.0, 0.0, 0.0), 0.7);
        assert_eq!(protection_probability(0.7, 0.0, 0.5, 2.0), 0.7);
    }

    #[test]
    fn protection_probability_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let pp_max: f64 = rng.random();
            let cp: f64 = rng.random::<f64>() * 2.0;
            let fp: f64 = rng.random::<f64>() * 0.9;
            let c: f64 = rng.random::<f64>() * 5.0;
            let base = protection_probability(pp_max, cp, fp, c);
            let bump: f64 = rng.random::<f64>() * 0.5;
            assert!(protection_probability(pp_max + bump.min(1.0 - pp_max), cp, fp, c) >= base);
            assert!(protection_probability(pp_max, cp + bump, fp, c) <= base);
            assert!(protection_probability(pp_max, cp, fp + bump, c) >= base);
            assert!(protection_probability(pp_max, cp, fp, c + bump) >= base);
        }
    }

    #[test]
    fn imitation_probability_values() {
        assert_eq!(imitation_probability(1.0, 0.0), 0.5);
        assert!((imitation_probability(100.0, 0.1) - 0.9999546).abs() < 1e-7);
        assert!((imitation_probability(1.0, -1.0) - 0.2689414).abs() < 1e-7);
        // Saturation without overflow.
        assert_eq!(imitation_probability(1e6, 1e6), 1.0);
        assert_eq!(imitation_probability(1e6, -1e6), 0.0);
    }

    #[test]
    fn imitation_probability_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = rng.random::<f64>() * 100.0;
            let x = (rng.random::<f64>() - 0.5) * 10.0;
            let sum = imitation_probability(s, x) + imitation_probability(s, -x);
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn imitation_noop_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut agents = vec![agent(1.0, 0.3, 0.4), agent(2.0, 0.5, 0.6)];
        let before = agents.clone();
        imitation_sweep(&mut agents, 0.0, 100.0, ImitationMode::Sequential, &mut rng);
        assert_eq!(agents, before);

        let mut single = vec![agent(1.0, 0.3, 0.4)];
        let before = single.clone();
        imitation_sweep(&mut single, 1.0, 100.0, ImitationMode::Sequential, &mut rng);
        assert_eq!(single, before);
    }

    #[test]
    fn strong_selection_copies_upward_only() {
        // Poor agent 0 copies rich agent 1 essentially always; never the
        // other way around.
        let mut upward = 0;
        for seed in 0..500 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agents = vec![agent(0.0, 0.1, 0.1), agent(10.0, 0.9, 0.9)];
            imitation_sweep(&mut agents, 1.0, 1000.0, ImitationMode::Sequential, &mut rng);
            assert_eq!((agents[1].fp0, agents[1].fp1), (0.9, 0.9), "rich agent kept its strategy");
            if agents[0].fp0 == 0.9 {
                upward += 1;
            }
        }
        assert_eq!(upward, 500);
    }

    #[test]
    fn equal_capital_copy_rate_is_half() {
        let mut copies = 0usize;
        let trials = 20_000;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let mut agents = vec![agent(1.0, 0.0, 0.0), agent(1.0, 1.0, 1.0)];
            imitation_sweep(&mut agents, 1.0, 100.0, ImitationMode::Sequential, &mut rng);
            if agents[0].fp0 == 1.0 {
                copies += 1;
            }
        }
        let rate = copies as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.02, "copy rate {rate}");
    }

    #[test]
    fn sequential_imitation_chains_within_one_sweep() {
        // Capitals 10 > 5 > 0. Focal 1 can copy 0, and focal 2, drawing role
        // model 1 afterwards, then receives agent 0's strategy in sequential
        // mode but agent 1's original in synchronous mode. Find a stream
        // where exactly that role pattern occurs.
        let make = || {
            vec![
                agent(10.0, 111.0, 111.0),
                agent(5.0, 222.0, 222.0),
                agent(0.0, 333.0, 333.0),
            ]
        };
        for seed in 0..10_000u64 {
            let mut seq = make();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            imitation_sweep(&mut seq, 1.0, 1000.0, ImitationMode::Sequential, &mut rng);
            if seq[1].fp0 == 111.0 && seq[2].fp0 == 111.0 {
                let mut sync = make();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                imitation_sweep(&mut sync, 1.0, 1000.0, ImitationMode::Synchronous, &mut rng);
                assert_eq!(sync[1].fp0, 111.0);
                assert_eq!(sync[2].fp0, 222.0, "synchronous copy uses the pre-sweep strategy");
                return;
            }
        }
        panic!("no seed produced the chained copy pattern");
    }

    #[test]
    fn mid_failure_agents_skip_imitation_as_focal() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agents = vec![agent(0.0, 1.0, 1.0), agent(9.0, 2.0, 2.0)];
            agents[0].failed = true;
            agents[0].fail_countdown = 3;
            imitation_sweep(&mut agents, 1.0, 1000.0, ImitationMode::Sequential, &mut rng);
            assert_eq!(agents[0].fp0, 1.0);
        }
    }

    #[test]
    fn exploration_noop_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut agents = vec![agent(1.0, 0.3, 0.4); 10];
        let before = agents.clone();
        exploration_sweep(&mut agents, 0.0, 0.0, 0.1, ExplorationMode::PerValue, &mut rng);
        assert_eq!(agents, before);
        exploration_sweep(&mut agents, 1.0, 0.0, 0.0, ExplorationMode::PerValue, &mut rng);
        assert_eq!(agents, before);
    }

    #[test]
    fn exploration_rate_and_spread_match_the_distribution() {
        // p_e = 1 in per-value mode: each value perturbed with probability
        // 0.5 by a N(0, 0.1^2) increment. 10^5 agent-steps.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 1000];
        let mut increments = Vec::new();
        let mut values = 0usize;
        for _ in 0..100 {
            let before: Vec<(f64, f64)> = agents.iter().map(|a| (a.fp0, a.fp1)).collect();
            exploration_sweep(&mut agents, 1.0, 0.0, 0.1, ExplorationMode::PerValue, &mut rng);
            for (a, (fp0, fp1)) in agents.iter().zip(&before) {
                values += 2;
                if a.fp0 != *fp0 {
                    increments.push(a.fp0 - fp0);
                }
                if a.fp1 != *fp1 {
                    increments.push(a.fp1 - fp1);
                }
            }
        }
        let rate = increments.len() as f64 / values as f64;
        assert!((rate - 0.5).abs() < 0.01, "perturbation rate {rate}");
        let mean = increments.iter().sum::<f64>() / increments.len() as f64;
        let var = increments.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / increments.len() as f64;
        let sd = var.sqrt();
        assert!((sd - 0.1).abs() < 0.005, "increment sd {sd}");
    }

    #[test]
    fn pick_one_mode_perturbs_exactly_one_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 200];
        exploration_sweep(&mut agents, 1.0, 0.0, 0.1, ExplorationMode::PickOne, &mut rng);
        for a in &agents {
            let touched = (a.fp0 != 0.0) as u8 + (a.fp1 != 0.0) as u8;
            assert_eq!(touched, 1);
        }
    }

    #[test]
    fn originate_extremes_and_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 100];
        originate_potentials(&mut agents, 0.0, &mut rng);
        assert!(agents.iter().all(|a| !a.failure_potential));
        originate_potentials(&mut agents, 1.0, &mut rng);
        assert!(agents.iter().all(|a| a.failure_potential));

        let mut agents = vec![agent(1.0, 0.0, 0.0); 10_000];
        originate_potentials(&mut agents, 0.1, &mut rng);
        let flagged = agents.iter().filter(|a| a.failure_potential).count();
        // Binomial(10^4, 0.1): 2 sigma band is 1000 +- 60.
        assert!((flagged as f64 - 1000.0).abs() < 60.0, "flagged {flagged}");
    }

    #[test]
    fn propagation_star_and_expectation() {
        let star = NetworkModel::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 6];
        propagate_potentials(&star, &mut agents, 1.0, &mut rng);
        assert!(agents.iter().all(|a| !a.failure_potential), "no failed nodes, no spread");

        agents[0].failed = true;
        propagate_potentials(&star, &mut agents, 1.0, &mut rng);
        assert!(agents[1..].iter().all(|a| a.failure_potential));
        assert!(!agents[0].failure_potential);

        // K_10 with one failed node at p_l = 0.3: 2.7 new flags on average.
        let k10 = crate::netgen::generate_er(10, 1.0, 0).unwrap();
        let mut total = 0usize;
        let runs = 20_000;
        for seed in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let mut agents = vec![agent(1.0, 0.0, 0.0); 10];
            agents[0].failed = true;
            propagate_potentials(&k10, &mut agents, 0.3, &mut rng);
            total += agents.iter().filter(|a| a.failure_potential).count();
        }
        let mean = total as f64 / runs as f64;
        assert!((mean - 2.7).abs() < 0.1, "mean newly flagged {mean}");
    }

    #[test]
    fn propagation_does_not_chain_within_a_step() {
        // Path 0-1-2 with node 0 failed: node 1 acquires the potential but
        // node 2 must not, because freshly flagged nodes are not failed.
        let path = NetworkModel::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 3];
        agents[0].failed = true;
        propagate_potentials(&path, &mut agents, 1.0, &mut rng);
        assert!(agents[1].failure_potential);
        assert!(!agents[2].failure_potential);
    }

    #[test]
    fn resolve_extremes() {
        // Perfect protection: potentials never convert.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut agents = vec![agent(1.0, 0.5, 0.0); 50];
        for a in agents.iter_mut() {
            a.fp = 0.5;
            a.failure_potential = true;
        }
        let report = resolve_failures(&mut agents, 1.0, 0.0, 1, &mut rng);
        assert_eq!(report.evaluated, 50);
        assert_eq!(report.mean_pp, 1.0);
        assert!(agents.iter().all(|a| !a.failed));

        // No protection ceiling: every flagged node fails.
        let report = resolve_failures(&mut agents, 0.0, 0.1, 3, &mut rng);
        assert_eq!(report.mean_pp, 0.0);
        assert!(agents.iter().all(|a| a.failed && a.capital == 0.0 && a.fail_countdown == 3));
        assert_eq!(report.evaluated, 50);
    }

    #[test]
    fn resolve_conversion_rate_scenario_d() {
        // Scenario D: p_p = 0.5, so flagged nodes fail half the time.
        let mut failures = 0usize;
        let trials = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..trials {
            let mut agents = vec![agent(1.0, 0.1, 0.0)];
            agents[0].fp = 0.1;
            agents[0].failure_potential = true;
            resolve_failures(&mut agents, 1.0, 0.1, 1, &mut rng);
            if agents[0].failed {
                failures += 1;
            }
        }
        let rate = failures as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.02, "conversion rate {rate}");
    }

    #[test]
    fn resolve_clears_expired_failures_and_spares_serving_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut agents = vec![agent(0.0, 0.0, 0.0), agent(0.0, 0.0, 0.0)];
        agents[0].failed = true;
        agents[0].fail_countdown = 0; // served its term
        agents[1].failed = true;
        agents[1].fail_countdown = 2; // still serving
        resolve_failures(&mut agents, 1.0, 0.0, 1, &mut rng);
        assert!(!agents[0].failed);
        assert!(agents[1].failed);
    }

    #[test]
    fn reset_extremes_and_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut agents = vec![agent(1.0, 0.0, 0.0); 100];
        for a in agents.iter_mut() {
            a.failure_potential = true;
        }
        reset_potentials(&mut agents, 0.0, &mut rng);
        assert!(agents.iter().all(|a| a.failure_potential));
        reset_potentials(&mut agents, 1.0, &mut rng);
        assert!(agents.iter().all(|a| !a.failure_potential));

        let mut agents = vec![agent(1.0, 0.0, 0.0); 10_000];
        for a in agents.iter_mut() {
            a.failure_potential = true;
        }
        reset_potentials(&mut agents, 0.5, &mut rng);
        let cleared = agents.iter().filter(|a| !a.failure_potential).count();
        assert!((cleared as f64 - 5000.0).abs() < 120.0, "cleared {cleared}");
    }

    #[test]
    fn reset_ticks_countdowns() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut agents = vec![agent(0.0, 0.0, 0.0)];
        agents[0].failed = true;
        agents[0].fail_countdown = 2;
        reset_potentials(&mut agents, 1.0, &mut rng);
        assert_eq!(agents[0].fail_countdown, 1);
        reset_potentials(&mut agents, 1.0, &mut rng);
        assert_eq!(agents[0].fail_countdown, 0);
        reset_potentials(&mut agents, 1.0, &mut rng);
        assert_eq!(agents[0].fail_countdown, 0);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams {
            p_l: 1.5,
            ..ModelParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidParameter { name: "p_l", .. })
        ));
        for params in [
            ModelParams { n: 0, ..ModelParams::default() },
            ModelParams { f_m: 1.0, ..ModelParams::default() },
            ModelParams { failtime: 0, ..ModelParams::default() },
            ModelParams { sigma_e: -0.1, ..ModelParams::default() },
        ] {
            assert!(params.validate().is_err());
        }
    }
}

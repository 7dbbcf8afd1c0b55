//! Proxies, policy learning, the generalization-probability closed form,
//! sample-efficiency comparison and the Monte-Carlo harness.
//!
//! Learning picks, among the correct policies of a task, one that maximises
//! a proxy score. The weakness proxy scores a policy by the cardinality of
//! its extension; the description-length proxy by the negated number of
//! programs it names, so maximising always means "preferred". Probabilities
//! are exact rationals; experiment randomness flows from one 64-bit seed and
//! every trial draws from its own stream, so results are identical no matter
//! how trials are scheduled.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::formalism::{Language, LanguageKind, Statement};
use crate::tasks::{self, Policy, VTask};

type ScoreFn = dyn Fn(&Language, Statement) -> i64 + Send + Sync;

/// A policy-scoring rule; higher scores are preferred.
#[derive(Clone)]
pub struct Proxy {
    name: String,
    kind: ProxyKind,
}

#[derive(Clone)]
enum ProxyKind {
    /// Extension cardinality.
    Weakness,
    /// Negated statement length, so the maximum is the shortest statement.
    DescriptionLength,
    Custom(Arc<ScoreFn>),
}

impl fmt::Debug for Proxy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Proxy({})", self.name)
    }
}

impl Proxy {
    pub fn weakness() -> Self {
        Proxy {
            name: "weakness".into(),
            kind: ProxyKind::Weakness,
        }
    }

    pub fn description_length() -> Self {
        Proxy {
            name: "description_length".into(),
            kind: ProxyKind::DescriptionLength,
        }
    }

    pub fn custom(name: impl Into<String>, score: Arc<ScoreFn>) -> Self {
        Proxy {
            name: name.into(),
            kind: ProxyKind::Custom(score),
        }
    }

    /// Look a named built-in proxy up.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "weakness" => Ok(Self::weakness()),
            "description_length" | "mdl" => Ok(Self::description_length()),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn score(&self, language: &Language, statement: Statement) -> i64 {
        match &self.kind {
            ProxyKind::Weakness => language
                .extension(statement)
                .map(|e| e.len() as i64)
                .unwrap_or(0),
            ProxyKind::DescriptionLength => -(statement.len() as i64),
            ProxyKind::Custom(f) => f(language, statement),
        }
    }

    /// The strict preference indicator `l1 < l2` used by the sample
    /// efficiency sum; score ties count as not-less.
    pub fn less(&self, language: &Language, l1: Statement, l2: Statement) -> bool {
        self.score(language, l1) < self.score(language, l2)
    }
}

/// Choose a proxy-maximal correct policy for the task.
///
/// Returns the canonical-first maximiser together with every maximiser, so
/// callers can report tie frequency.
pub fn learn(task: &VTask, proxy: &Proxy) -> Result<(Policy, Vec<Policy>)> {
    let correct = tasks::policies(task);
    if correct.is_empty() {
        return Err(Error::NoCorrectPolicy);
    }
    let language = task.language();
    let best = correct
        .iter()
        .map(|p| proxy.score(language, p.statement()))
        .max()
        .expect("nonempty");
    let maximal: Vec<Policy> = correct
        .into_iter()
        .filter(|p| proxy.score(language, p.statement()) == best)
        .collect();
    Ok((maximal[0], maximal))
}

/// Is `policy` correct for `task` without scanning the whole universe.
pub fn is_correct(policy: Policy, task: &VTask) -> Result<bool> {
    let extension = task.language().extension(policy.statement())?;
    Ok(extension.and(task.input_extension()) == *task.outputs())
}

/// The probability that a policy correct for `alpha` is also correct for a
/// uniformly drawn parent: `2^|Ē ∩ E_h| / 2^|Ē|` with `Ē` the statements
/// outside the input extension.
pub fn generalization_probability(h: Policy, alpha: &VTask) -> Result<BigRational> {
    if !is_correct(h, alpha)? {
        return Err(Error::NotCorrectPolicy);
    }
    let language = alpha.language();
    let policy_extension = language.extension(h.statement())?;
    let outside = alpha.input_extension().complement();
    let overlap = outside.and(&policy_extension).len();
    let pow = |e: usize| BigInt::one() << e;
    Ok(BigRational::new(pow(overlap), pow(outside.len())))
}

/// Necessity bound: a policy whose extension is smaller than the parent's
/// correct-output set can never be correct for the parent.
pub fn necessity_check(h: Policy, omega: &VTask) -> Result<bool> {
    let extension = omega.language().extension(h.statement())?;
    if extension.len() < omega.outputs().len() {
        return Ok(false);
    }
    is_correct(h, omega)
}

/// How many input sets admit `l` as a correct policy, over the exhaustive
/// task enumeration. For a fixed input set there is exactly one correct
/// output set `E_I ∩ E_l`, valid when nonempty and strictly inside `E_I`.
fn generalization_count(language: &Language, l: Statement, budget: u64) -> Result<u64> {
    let n = language.universe_len();
    let total: u64 = 1u64
        .checked_shl(n as u32)
        .ok_or(Error::TaskBudget {
            tasks: u64::MAX,
            budget,
        })?;
    if total > budget {
        return Err(Error::TaskBudget {
            tasks: total,
            budget,
        });
    }
    let extensions = language.universe_extensions();
    let policy_extension = language.extension(l)?;
    let strict_inputs = language.kind() == LanguageKind::Derived;
    let mut count = 0;
    for mask in 1..total {
        if strict_inputs && mask == total - 1 {
            continue;
        }
        let mut input_extension = BitSet::empty(n);
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            input_extension = input_extension.or(&extensions[i]);
        }
        let correct = input_extension.and(&policy_extension);
        if !correct.is_empty() && correct != input_extension {
            count += 1;
        }
    }
    Ok(count)
}

/// Def-5 sample-efficiency comparison over every ordered pair of distinct
/// policies; a negative result means `proxy_a` is the more sample-efficient.
///
/// The generalization order is decided by exhaustive task enumeration, the
/// zero-variance version of drawing tasks uniformly.
pub fn sample_efficiency(
    proxy_a: &Proxy,
    proxy_b: &Proxy,
    language: &Arc<Language>,
    policy_universe: &[Policy],
    budget: u64,
) -> Result<i64> {
    let counts: Vec<u64> = policy_universe
        .iter()
        .map(|p| generalization_count(language, p.statement(), budget))
        .collect::<Result<_>>()?;
    let mut sum = 0i64;
    for (i, l1) in policy_universe.iter().enumerate() {
        for (j, l2) in policy_universe.iter().enumerate() {
            if i == j {
                continue;
            }
            let g = i64::from(counts[i] < counts[j]);
            let a = i64::from(proxy_a.less(language, l1.statement(), l2.statement()));
            let b = i64::from(proxy_b.less(language, l1.statement(), l2.statement()));
            sum += (g - a).abs() - (g - b).abs();
        }
    }
    Ok(sum)
}

/// Outcome of one Monte-Carlo generalization experiment for one proxy.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneralizationReport {
    pub proxy: String,
    pub trials: u64,
    pub successes: u64,
    /// Exact success ratio, reduced.
    pub rate: String,
    pub rate_decimal: f64,
    pub seed: u64,
    pub sampling: SamplingParams,
}

/// Sampling knobs echoed into every report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SamplingParams {
    pub language_hash: String,
    pub universe_len: usize,
    pub parent_attempts: u32,
    pub child_attempts: u32,
}

const PARENT_ATTEMPTS: u32 = 10_000;
const CHILD_ATTEMPTS: u32 = 100;

struct Trial {
    parent: VTask,
    child: VTask,
}

/// Draw a uniform subset of the set bits of `pool`, rejecting empty draws
/// and, when `strict` is set, the full pool.
fn random_subset(pool: &BitSet, strict: bool, rng: &mut ChaCha12Rng) -> Option<BitSet> {
    let size = pool.len();
    if size == 0 || (strict && size < 2) {
        return None;
    }
    for _ in 0..64 {
        let mut chosen = BitSet::empty(pool.capacity());
        let mut picked = 0usize;
        for index in pool.iter() {
            if rng.gen::<bool>() {
                chosen.insert(index);
                picked += 1;
            }
        }
        if picked == 0 || (strict && picked == size) {
            continue;
        }
        return Some(chosen);
    }
    None
}

fn sample_trial(language: &Arc<Language>, rng: &mut ChaCha12Rng) -> Result<Trial> {
    let n = language.universe_len();
    let strict_inputs = language.kind() == LanguageKind::Derived;
    let all = BitSet::full(n);
    for _ in 0..PARENT_ATTEMPTS {
        // Parent: uniform inputs, then uniform correct outputs given them.
        let Some(input_bits) = random_subset(&all, strict_inputs, rng) else {
            break;
        };
        let inputs: Vec<Statement> = input_bits.iter().map(|i| language.universe()[i]).collect();
        if inputs.len() < 2 {
            continue; // a child needs a strictly smaller, nonempty input set
        }
        let input_extension = language
            .extension_of_set(inputs.iter().copied())
            .expect("universe statements");
        let Some(outputs) = random_subset(&input_extension, true, rng) else {
            continue;
        };
        let parent = VTask::from_parts(Arc::clone(language), inputs.clone(), outputs.clone());

        for _ in 0..CHILD_ATTEMPTS {
            let Some(child_inputs_bits) =
                random_subset(&BitSet::full(inputs.len()), true, rng)
            else {
                continue;
            };
            let child_inputs: Vec<Statement> =
                child_inputs_bits.iter().map(|i| inputs[i]).collect();
            let child_extension = language
                .extension_of_set(child_inputs.iter().copied())
                .expect("universe statements");
            let pool = outputs.and(&child_extension);
            let Some(child_outputs) = random_subset(&pool, false, rng) else {
                continue;
            };
            if child_outputs == child_extension {
                continue;
            }
            let child =
                VTask::from_parts(Arc::clone(language), child_inputs, child_outputs);
            if tasks::policies(&child).is_empty() {
                continue;
            }
            debug_assert!(tasks::is_child(&child, &parent).unwrap());
            return Ok(Trial { parent, child });
        }
    }
    Err(Error::SamplingExhausted)
}

/// Run seeded generalization trials: sample a parent, a child of it with at
/// least one correct policy, learn from the child with every proxy, and
/// count how often the chosen policy is correct for the parent.
///
/// Trials are independent; trial `t` draws from stream `t` of the seeded
/// generator, so reports do not depend on scheduling.
pub fn monte_carlo_generalization(
    language: &Arc<Language>,
    proxies: &[Proxy],
    trials: u64,
    seed: u64,
) -> Result<Vec<GeneralizationReport>> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let per_trial: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let sample = sample_trial(language, &mut rng)?;
            proxies
                .iter()
                .map(|proxy| {
                    let (chosen, _) = learn(&sample.child, proxy)?;
                    let hit = is_correct(chosen, &sample.parent)?;
                    // Necessity bound: too-narrow policies never generalize.
                    debug_assert!(
                        !hit || language.extension(chosen.statement())?.len()
                            >= sample.parent.outputs().len()
                    );
                    Ok(hit)
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;

    let sampling = SamplingParams {
        language_hash: language.hash().to_string(),
        universe_len: language.universe_len(),
        parent_attempts: PARENT_ATTEMPTS,
        child_attempts: CHILD_ATTEMPTS,
    };
    Ok(proxies
        .iter()
        .enumerate()
        .map(|(i, proxy)| {
            let successes = per_trial.iter().filter(|row| row[i]).count() as u64;
            GeneralizationReport {
                proxy: proxy.name().to_string(),
                trials,
                successes,
                rate: format!("{successes}/{trials}"),
                rate_decimal: successes as f64 / trials as f64,
                seed,
                sampling: sampling.clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::formalism::{derive_language, Environment, Limits, Program, Vocabulary};

    fn small_language() -> Arc<Language> {
        let limits = Limits::default();
        let env = Environment::new(4, &limits).unwrap();
        let programs = vec![
            Program::new(&env, [0, 1]).unwrap(),
            Program::new(&env, [1, 2]).unwrap(),
            Program::new(&env, [2, 3]).unwrap(),
        ];
        let vocab = Vocabulary::new(env, programs, &limits).unwrap();
        derive_language(vocab, &limits).unwrap()
    }

    fn stmt(lang: &Language, members: &[usize]) -> Statement {
        lang.statement(members.iter().copied()).unwrap()
    }

    fn base_task(lang: &Arc<Language>) -> VTask {
        VTask::new(
            Arc::clone(lang),
            vec![stmt(lang, &[0])],
            vec![stmt(lang, &[0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn fixture_learning_separates_proxies() {
        let fx = fixture::prop3();
        let (weak, weak_all) = learn(&fx.task, &Proxy::weakness()).unwrap();
        assert_eq!(weak, Policy(fx.policy_jk));
        assert_eq!(weak_all, vec![Policy(fx.policy_jk)]);
        let (short, short_all) = learn(&fx.task, &Proxy::description_length()).unwrap();
        assert_eq!(short, Policy(fx.policy_z));
        assert_eq!(short_all, vec![Policy(fx.policy_z)]);
    }

    #[test]
    fn singleton_policy_set_wins_under_every_proxy() {
        let lang = small_language();
        // I = {{f1},{f2}}, O = {{f1,f2}} has exactly one correct policy.
        let task = VTask::new(
            Arc::clone(&lang),
            vec![stmt(&lang, &[0]), stmt(&lang, &[1])],
            vec![stmt(&lang, &[0, 1])],
        )
        .unwrap();
        let only = Policy(stmt(&lang, &[0, 1]));
        for proxy in [Proxy::weakness(), Proxy::description_length()] {
            let (chosen, all) = learn(&task, &proxy).unwrap();
            assert_eq!(chosen, only);
            assert_eq!(all, vec![only]);
        }
    }

    #[test]
    fn learn_requires_a_correct_policy() {
        let lang = small_language();
        let task = VTask::new(
            Arc::clone(&lang),
            vec![stmt(&lang, &[0])],
            vec![stmt(&lang, &[0])],
        )
        .unwrap();
        assert!(matches!(
            learn(&task, &Proxy::weakness()),
            Err(Error::NoCorrectPolicy)
        ));
    }

    #[test]
    fn closed_form_on_worked_examples() {
        let lang = small_language();
        let alpha = base_task(&lang);
        // Ē = {{f2},{f2,f3},{f3}}; E_{f2} overlaps it in two statements.
        let p = generalization_probability(Policy(stmt(&lang, &[1])), &alpha).unwrap();
        assert_eq!(p, BigRational::new(BigInt::from(4), BigInt::from(8)));
        // E_{f1,f2} lies inside the input extension: overlap empty.
        let p = generalization_probability(Policy(stmt(&lang, &[0, 1])), &alpha).unwrap();
        assert_eq!(p, BigRational::new(BigInt::from(1), BigInt::from(8)));
        // Precondition: the policy must be correct for the task.
        assert!(matches!(
            generalization_probability(Policy(stmt(&lang, &[2])), &alpha),
            Err(Error::NotCorrectPolicy)
        ));
    }

    #[test]
    fn closed_form_saturates_at_one() {
        let lang = small_language();
        // I = {{f1},{f3}} leaves only {{f2}} outside; h = {f2} covers it.
        let alpha = VTask::new(
            Arc::clone(&lang),
            vec![stmt(&lang, &[0]), stmt(&lang, &[2])],
            vec![stmt(&lang, &[0, 1]), stmt(&lang, &[1, 2])],
        )
        .unwrap();
        let p = generalization_probability(Policy(stmt(&lang, &[1])), &alpha).unwrap();
        assert_eq!(p, BigRational::one());
    }

    #[test]
    fn necessity_bound() {
        let lang = small_language();
        let omega = VTask::new(
            Arc::clone(&lang),
            vec![stmt(&lang, &[0]), stmt(&lang, &[2])],
            vec![stmt(&lang, &[0, 1]), stmt(&lang, &[1, 2])],
        )
        .unwrap();
        // |E_{f1,f2}| = 1 < |O| = 2.
        assert!(!necessity_check(Policy(stmt(&lang, &[0, 1])), &omega).unwrap());
        // Wide enough but not correct.
        let narrow_target = base_task(&lang);
        assert!(!necessity_check(Policy(stmt(&lang, &[2])), &narrow_target).unwrap());
        // The fixture's weak policy passes against its own task.
        let fx = fixture::prop3();
        assert!(necessity_check(Policy(fx.policy_jk), &fx.task).unwrap());
    }

    #[test]
    fn sample_efficiency_is_reflexively_zero() {
        let lang = small_language();
        let pool: Vec<Policy> = lang.universe().iter().copied().map(Policy).collect();
        let w = Proxy::weakness();
        assert_eq!(sample_efficiency(&w, &w, &lang, &pool, 1 << 20).unwrap(), 0);
    }

    #[test]
    fn weakness_at_least_as_efficient_as_description_length() {
        let lang = small_language();
        let pool: Vec<Policy> = lang.universe().iter().copied().map(Policy).collect();
        let result = sample_efficiency(
            &Proxy::weakness(),
            &Proxy::description_length(),
            &lang,
            &pool,
            1 << 20,
        )
        .unwrap();
        assert!(result <= 0, "weakness lost the efficiency sum: {result}");
    }

    #[test]
    fn tie_reversal_does_not_change_the_sum() {
        let lang = small_language();
        let pool: Vec<Policy> = lang.universe().iter().copied().map(Policy).collect();
        // Same strict comparisons as weakness, different tie layout.
        let reversed = Proxy::custom(
            "weakness_reversed_ties",
            Arc::new(|lang: &Language, s: Statement| {
                lang.extension(s).map(|e| e.len() as i64 * 2).unwrap_or(0)
            }),
        );
        assert_eq!(
            sample_efficiency(&Proxy::weakness(), &reversed, &lang, &pool, 1 << 20).unwrap(),
            0
        );
    }

    #[test]
    fn enumeration_budget_guard() {
        let lang = small_language();
        let pool = vec![Policy(stmt(&lang, &[0]))];
        assert!(matches!(
            sample_efficiency(
                &Proxy::weakness(),
                &Proxy::description_length(),
                &lang,
                &pool,
                8,
            ),
            Err(Error::TaskBudget { tasks: 32, budget: 8 })
        ));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_ordered() {
        let lang = small_language();
        let proxies = [Proxy::weakness(), Proxy::description_length()];
        let a = monte_carlo_generalization(&lang, &proxies, 400, 11).unwrap();
        let b = monte_carlo_generalization(&lang, &proxies, 400, 11).unwrap();
        assert_eq!(a, b);
        assert!(a[0].successes >= a[1].successes, "{a:?}");
    }

    #[test]
    fn monte_carlo_rejects_zero_trials() {
        let lang = small_language();
        assert!(matches!(
            monte_carlo_generalization(&lang, &[Proxy::weakness()], 0, 0),
            Err(Error::ZeroTrials)
        ));
    }

    #[test]
    fn monte_carlo_exhaustion_on_tiny_language() {
        let limits = Limits::default();
        let env = Environment::new(1, &limits).unwrap();
        let vocab =
            Vocabulary::new(env, vec![Program::new(&env, [0]).unwrap()], &limits).unwrap();
        let lang = derive_language(vocab, &limits).unwrap();
        assert!(matches!(
            monte_carlo_generalization(&lang, &[Proxy::weakness()], 2, 0),
            Err(Error::SamplingExhausted)
        ));
    }
}

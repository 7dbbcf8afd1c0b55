//! Tasks, the generational hierarchy, correct policies and inference.
//!
//! A task pairs a set of input statements with the correct completions of
//! those inputs. Tasks over one language form a strict partial order: a child
//! has strictly fewer inputs and no more correct outputs than its parent.
//! A policy is a statement; it is correct for a task exactly when completing
//! the task's inputs through it yields the correct outputs and nothing else.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::formalism::{Language, LanguageKind, Statement};

/// A policy: a statement constraining how inputs are completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Policy(pub Statement);

impl Policy {
    pub fn statement(&self) -> Statement {
        self.0
    }
}

/// A task: inputs plus the outputs deemed correct.
///
/// Correct outputs are stored as a universe subset; inputs are stored as
/// statements because explicit-language tasks may take inputs from outside
/// the listed universe.
#[derive(Clone, Debug)]
pub struct VTask {
    language: Arc<Language>,
    inputs: Vec<Statement>,
    input_extension: BitSet,
    outputs: BitSet,
}

impl PartialEq for VTask {
    fn eq(&self, other: &Self) -> bool {
        self.language.hash() == other.language.hash()
            && self.inputs == other.inputs
            && self.outputs == other.outputs
    }
}

impl Eq for VTask {}

impl std::hash::Hash for VTask {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inputs.hash(state);
        self.outputs.hash(state);
    }
}

impl Ord for VTask {
    /// Canonical task order: input list, then output indices.
    fn cmp(&self, other: &Self) -> Ordering {
        self.inputs.cmp(&other.inputs).then_with(|| {
            self.outputs
                .iter()
                .collect::<Vec<_>>()
                .cmp(&other.outputs.iter().collect())
        })
    }
}

impl PartialOrd for VTask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl VTask {
    /// Build a task and enforce every invariant.
    pub fn new(
        language: Arc<Language>,
        inputs: Vec<Statement>,
        outputs: Vec<Statement>,
    ) -> Result<Self> {
        let task = Self::relaxed(language, inputs, outputs)?;
        task.check_strict()?;
        Ok(task)
    }

    /// Build a task, skipping the two strictness requirements (inputs a
    /// strict universe subset for derived languages; outputs a strict subset
    /// of the input extension). Policy tasks and accumulated histories can
    /// saturate either bound.
    pub fn relaxed(
        language: Arc<Language>,
        inputs: Vec<Statement>,
        outputs: Vec<Statement>,
    ) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptyInputs);
        }
        if outputs.is_empty() {
            return Err(Error::EmptyOutputs);
        }
        let mut inputs = inputs;
        inputs.sort_unstable();
        inputs.dedup();
        if language.kind() == LanguageKind::Derived {
            for input in &inputs {
                if !language.contains(*input) {
                    return Err(Error::InputsNotStrict);
                }
            }
        }
        let input_extension = language.extension_of_set(inputs.iter().copied())?;
        let mut output_bits = BitSet::empty(language.universe_len());
        for output in outputs {
            match language.universe_index(output) {
                Some(i) if input_extension.contains(i) => output_bits.insert(i),
                _ => return Err(Error::OutputsOutsideExtension),
            }
        }
        Ok(VTask {
            language,
            inputs,
            input_extension,
            outputs: output_bits,
        })
    }

    pub(crate) fn from_parts(
        language: Arc<Language>,
        mut inputs: Vec<Statement>,
        outputs: BitSet,
    ) -> Self {
        inputs.sort_unstable();
        inputs.dedup();
        let input_extension = language
            .extension_of_set(inputs.iter().copied())
            .expect("inputs validated by caller");
        VTask {
            language,
            inputs,
            input_extension,
            outputs,
        }
    }

    /// Verify the strictness invariants a fully valid task must satisfy.
    pub fn check_strict(&self) -> Result<()> {
        if self.outputs == self.input_extension {
            return Err(Error::OutputsNotStrict);
        }
        if self.language.kind() == LanguageKind::Derived
            && self.inputs.len() == self.language.universe_len()
        {
            return Err(Error::InputsNotStrict);
        }
        Ok(())
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn inputs(&self) -> &[Statement] {
        &self.inputs
    }

    /// The outputs available given the inputs.
    pub fn input_extension(&self) -> &BitSet {
        &self.input_extension
    }

    /// Correct outputs as a universe subset.
    pub fn outputs(&self) -> &BitSet {
        &self.outputs
    }

    pub fn output_statements(&self) -> Vec<Statement> {
        self.language.statements_of(&self.outputs)
    }

    pub fn contains_input(&self, input: Statement) -> bool {
        self.inputs.binary_search(&input).is_ok()
    }

    fn check_same_language(&self, other: &VTask) -> Result<()> {
        if self.language.hash() != other.language.hash() {
            return Err(Error::LanguageMismatch);
        }
        Ok(())
    }
}

/// Every correct policy for the task, in canonical statement order.
///
/// A policy is correct when completing the task's inputs through it yields
/// exactly the correct outputs. The scan covers the whole universe plus any
/// declared policy candidates; for derived languages this is exhaustive over
/// the language, since statements outside the universe have empty extensions.
pub fn policies(task: &VTask) -> Vec<Policy> {
    let language = task.language();
    let mut correct: Vec<Policy> = language
        .policy_scan()
        .filter(|candidate| {
            let extension = language
                .extension(*candidate)
                .expect("scan statements are valid");
            extension.and(task.input_extension()) == *task.outputs()
        })
        .map(Policy)
        .collect();
    correct.sort_unstable();
    correct
}

/// Is `alpha` a child of `omega`: strictly fewer inputs, no more outputs.
pub fn is_child(alpha: &VTask, omega: &VTask) -> Result<bool> {
    alpha.check_same_language(omega)?;
    let strict_inputs = alpha.inputs.len() < omega.inputs.len()
        && alpha
            .inputs
            .iter()
            .all(|i| omega.inputs.binary_search(i).is_ok());
    Ok(strict_inputs && alpha.outputs().is_subset(omega.outputs()))
}

/// Level of `alpha`: the length of the longest ascending chain of parents
/// within `universe_tasks` (the task itself is considered even if absent).
pub fn task_level(alpha: &VTask, universe_tasks: &[VTask]) -> Result<usize> {
    fn ascend(task: &VTask, pool: &[VTask], memo: &mut Vec<Option<usize>>) -> Result<usize> {
        let mut best = 0;
        for (i, candidate) in pool.iter().enumerate() {
            if is_child(task, candidate)? {
                let above = match memo[i] {
                    Some(level) => level,
                    None => {
                        let level = ascend(candidate, pool, memo)?;
                        memo[i] = Some(level);
                        level
                    }
                };
                best = best.max(1 + above);
            }
        }
        Ok(best)
    }
    let mut memo = vec![None; universe_tasks.len()];
    ascend(alpha, universe_tasks, &mut memo)
}

/// The policy task of `policy`: the highest-level task whose correct outputs
/// are exactly the policy's extension.
///
/// Inputs are every universe statement whose extension meets the policy's;
/// the task is built relaxed because that maximal input set can saturate the
/// strictness bounds.
pub fn policy_task(policy: Policy, language: &Arc<Language>) -> Result<VTask> {
    let policy_extension = language.extension(policy.statement())?;
    if policy_extension.is_empty() {
        return Err(Error::EmptyExtension);
    }
    let inputs: Vec<Statement> = language
        .universe()
        .iter()
        .copied()
        .filter(|i| {
            language
                .extension(*i)
                .expect("universe statements are valid")
                .intersects(&policy_extension)
        })
        .collect();
    Ok(VTask::from_parts(
        Arc::clone(language),
        inputs,
        policy_extension,
    ))
}

/// Deterministic choice rule for selecting one output from a completion set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// First statement in canonical order.
    CanonicalFirst,
    /// Seeded pick, stable for a given (seed, completion set) pair.
    Seeded(u64),
}

impl Selector {
    fn choose(&self, pool: &BitSet) -> Option<usize> {
        match self {
            Selector::CanonicalFirst => pool.iter().next(),
            Selector::Seeded(seed) => {
                let count = pool.len();
                if count == 0 {
                    return None;
                }
                let mut mix = seed ^ 0x9e37_79b9_7f4a_7c15;
                for index in pool.iter() {
                    mix = mix
                        .rotate_left(13)
                        .wrapping_mul(0xff51_afd7_ed55_8ccd)
                        .wrapping_add(index as u64);
                }
                pool.iter().nth((mix % count as u64) as usize)
            }
        }
    }
}

/// Complete `input` through `policy`: pick an output from the intersection of
/// their extensions and report whether it is correct for the task.
///
/// A correct policy guarantees a correct output; an incorrect policy can
/// still imply one.
pub fn infer(
    policy: Policy,
    input: Statement,
    task: &VTask,
    selector: Selector,
) -> Result<(Statement, bool)> {
    if !task.contains_input(input) {
        return Err(Error::InputNotInTask);
    }
    let language = task.language();
    let pool = language
        .extension(input)?
        .and(&language.extension(policy.statement())?);
    let index = selector.choose(&pool).ok_or(Error::NoOutput)?;
    Ok((
        language.universe()[index],
        task.outputs().contains(index),
    ))
}

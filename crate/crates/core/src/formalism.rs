//! Finite environments, programs, vocabularies, statements and languages.
//!
//! An environment is a finite set of states identified by index. A program is
//! a set of states; a vocabulary is an ordered list of distinct programs; a
//! statement is a nonempty set of vocabulary programs. A language fixes the
//! universe of admissible statements, either derived (every nonempty subset
//! of the vocabulary whose programs share at least one state) or explicit (a
//! supplied list). Everything here is immutable after construction and all
//! operations are pure.
//!
//! Set-valued results are always produced in canonical order: statements are
//! ordered lexicographically by their sorted program-index lists, and
//! universe subsets are reported in ascending universe position, which is the
//! same order. Two runs over equal inputs yield identical output bytes.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Hard cap on states so every program fits one 64-bit word.
pub const MAX_STATES: u32 = 64;
/// Hard cap on vocabulary size so every statement fits one 32-bit word.
pub const MAX_PROGRAMS: usize = 24;
/// Default bound on the number of statements a derived universe may hold.
pub const DEFAULT_STATEMENT_BUDGET: u64 = 1 << 20;

/// Configurable caps guarding the exponential enumerations.
///
/// Exceeding a cap is a hard error, never silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: u32,
    pub max_programs: usize,
    pub statement_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: MAX_STATES,
            max_programs: MAX_PROGRAMS,
            statement_budget: DEFAULT_STATEMENT_BUDGET,
        }
    }
}

impl Limits {
    fn clamp_to_hard_caps(self) -> Self {
        Limits {
            max_states: self.max_states.min(MAX_STATES),
            max_programs: self.max_programs.min(MAX_PROGRAMS),
            statement_budget: self.statement_budget,
        }
    }
}

/// A finite environment; states are the indices `0..state_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Environment {
    state_count: u32,
}

impl Environment {
    pub fn new(state_count: u32, limits: &Limits) -> Result<Self> {
        let cap = limits.clamp_to_hard_caps().max_states;
        if state_count == 0 || state_count > cap {
            return Err(Error::StateCount {
                got: state_count,
                cap,
            });
        }
        Ok(Environment { state_count })
    }

    pub fn state_count(&self) -> u32 {
        self.state_count
    }

    /// Bit mask with one bit per state.
    pub fn full_mask(&self) -> u64 {
        if self.state_count == 64 {
            u64::MAX
        } else {
            (1u64 << self.state_count) - 1
        }
    }
}

/// A declarative program: the set of states at which it is true.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program {
    states: u64,
}

impl Program {
    pub fn new(env: &Environment, states: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut mask = 0u64;
        for state in states {
            if state >= env.state_count() {
                return Err(Error::StateOutOfRange {
                    state,
                    state_count: env.state_count(),
                });
            }
            mask |= 1 << state;
        }
        Ok(Program { states: mask })
    }

    pub fn mask(&self) -> u64 {
        self.states
    }

    pub fn contains(&self, state: u32) -> bool {
        state < 64 && self.states & (1 << state) != 0
    }

    pub fn states(&self) -> impl Iterator<Item = u32> + '_ {
        (0..64).filter(|s| self.contains(*s))
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Program{{{:?}}}", self.states().collect::<Vec<_>>())
    }
}

/// An ordered list of distinct programs. Position is the canonical index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    env: Environment,
    programs: Vec<Program>,
}

impl Vocabulary {
    pub fn new(env: Environment, programs: Vec<Program>, limits: &Limits) -> Result<Self> {
        let cap = limits.clamp_to_hard_caps().max_programs;
        if programs.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if programs.len() > cap {
            return Err(Error::VocabularyCap {
                got: programs.len(),
                cap,
            });
        }
        for (second, prog) in programs.iter().enumerate() {
            if let Some(first) = programs[..second].iter().position(|p| p == prog) {
                return Err(Error::DuplicateProgram { first, second });
            }
        }
        Ok(Vocabulary { env, programs })
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn program(&self, index: usize) -> Result<&Program> {
        self.programs.get(index).ok_or(Error::ProgramOutOfRange {
            index,
            len: self.programs.len(),
        })
    }

    pub fn programs(&self) -> &[Program] {
        &self.programs
    }

    /// States at which every program named by `statement` is true.
    pub fn realization(&self, statement: Statement) -> u64 {
        let mut mask = self.env.full_mask();
        for index in statement.members() {
            mask &= self.programs[index].states;
        }
        mask
    }
}

/// A nonempty set of vocabulary programs, stored as an index mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Statement {
    members: u32,
}

impl Statement {
    pub fn new(members: impl IntoIterator<Item = usize>, vocab_len: usize) -> Result<Self> {
        let mut mask = 0u32;
        for index in members {
            if index >= vocab_len {
                return Err(Error::ProgramOutOfRange {
                    index,
                    len: vocab_len,
                });
            }
            mask |= 1 << index;
        }
        if mask == 0 {
            return Err(Error::EmptyStatement);
        }
        Ok(Statement { members: mask })
    }

    pub(crate) fn from_mask(mask: u32) -> Self {
        debug_assert!(mask != 0);
        Statement { members: mask }
    }

    pub fn mask(&self) -> u32 {
        self.members
    }

    /// Number of programs named; the description length of the statement.
    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        index < 32 && self.members & (1 << index) != 0
    }

    pub fn is_subset(&self, other: &Statement) -> bool {
        self.members & !other.members == 0
    }

    pub fn is_strict_subset(&self, other: &Statement) -> bool {
        self.is_subset(other) && self.members != other.members
    }

    pub fn union(&self, other: &Statement) -> Statement {
        Statement {
            members: self.members | other.members,
        }
    }

    pub fn intersection(&self, other: &Statement) -> Option<Statement> {
        match self.members & other.members {
            0 => None,
            mask => Some(Statement { members: mask }),
        }
    }

    /// Set difference; `None` when nothing remains.
    pub fn minus(&self, other: &Statement) -> Option<Statement> {
        match self.members & !other.members {
            0 => None,
            mask => Some(Statement { members: mask }),
        }
    }

    /// Ascending program indices.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32usize).filter(|i| self.contains(*i))
    }
}

impl Ord for Statement {
    /// Lexicographic order on the sorted program-index list, so `{0} < {0,1} < {1}`.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.members, other.members);
        while a != 0 && b != 0 {
            let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
            match ia.cmp(&ib) {
                Ordering::Equal => {
                    a &= a - 1;
                    b &= b - 1;
                }
                unequal => return unequal,
            }
        }
        (a != 0).cmp(&(b != 0))
    }
}

impl PartialOrd for Statement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:?}}}", self.members().collect::<Vec<_>>())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LanguageKind {
    Derived,
    Explicit,
}

/// The universe of admissible statements over a vocabulary.
///
/// Derived languages hold every nonempty vocabulary subset with a nonempty
/// program intersection. Explicit languages hold exactly a supplied list and
/// may additionally carry policy candidates: statements that are scanned when
/// computing correct-policy sets but are not universe members, so they do not
/// contribute to any extension. Extensions of arbitrary valid statements,
/// universe members or not, are computed by superset scan over the universe.
#[derive(Clone, Debug)]
pub struct Language {
    vocabulary: Vocabulary,
    kind: LanguageKind,
    universe: Vec<Statement>,
    policy_candidates: Vec<Statement>,
    hash: String,
    extension_cache: OnceLock<Vec<BitSet>>,
}

impl PartialEq for Language {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash
    }
}

impl Eq for Language {}

/// All nonempty subsets of the vocabulary whose programs share a state, in
/// canonical order.
pub fn derive_language(vocabulary: Vocabulary, limits: &Limits) -> Result<Arc<Language>> {
    let n = vocabulary.len();
    let candidates = 1u64 << n;
    if candidates > limits.statement_budget {
        return Err(Error::StatementBudget {
            programs: n,
            budget: limits.statement_budget,
        });
    }
    let mut universe = Vec::new();
    for mask in 1..candidates as u32 {
        let statement = Statement::from_mask(mask);
        if vocabulary.realization(statement) != 0 {
            universe.push(statement);
        }
    }
    universe.sort_unstable();
    Ok(Arc::new(Language::assemble(
        vocabulary,
        LanguageKind::Derived,
        universe,
        Vec::new(),
    )))
}

impl Language {
    /// An explicit language: the universe is exactly `universe`, sorted into
    /// canonical order. `policy_candidates` widens the correct-policy scan.
    pub fn explicit(
        vocabulary: Vocabulary,
        universe: Vec<Statement>,
        policy_candidates: Vec<Statement>,
        limits: &Limits,
    ) -> Result<Arc<Language>> {
        if universe.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if universe.len() as u64 > limits.statement_budget {
            return Err(Error::StatementBudget {
                programs: vocabulary.len(),
                budget: limits.statement_budget,
            });
        }
        let mut sorted = universe;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateStatement);
        }
        let mut extras = policy_candidates;
        extras.sort_unstable();
        if extras.windows(2).any(|w| w[0] == w[1])
            || extras.iter().any(|c| sorted.binary_search(c).is_ok())
        {
            return Err(Error::DuplicateStatement);
        }
        for statement in sorted.iter().chain(&extras) {
            Self::check_members(&vocabulary, *statement)?;
        }
        Ok(Arc::new(Language::assemble(
            vocabulary,
            LanguageKind::Explicit,
            sorted,
            extras,
        )))
    }

    fn assemble(
        vocabulary: Vocabulary,
        kind: LanguageKind,
        universe: Vec<Statement>,
        policy_candidates: Vec<Statement>,
    ) -> Language {
        let mut hasher = Sha256::new();
        hasher.update(vocabulary.environment().state_count().to_le_bytes());
        for program in vocabulary.programs() {
            hasher.update(program.mask().to_le_bytes());
        }
        hasher.update([match kind {
            LanguageKind::Derived => 0u8,
            LanguageKind::Explicit => 1u8,
        }]);
        for statement in &universe {
            hasher.update(statement.mask().to_le_bytes());
        }
        hasher.update([0xff]);
        for statement in &policy_candidates {
            hasher.update(statement.mask().to_le_bytes());
        }
        let hash = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Language {
            vocabulary,
            kind,
            universe,
            policy_candidates,
            hash,
            extension_cache: OnceLock::new(),
        }
    }

    fn check_members(vocabulary: &Vocabulary, statement: Statement) -> Result<()> {
        match statement.members().next_back() {
            Some(max) if max >= vocabulary.len() => Err(Error::ProgramOutOfRange {
                index: max,
                len: vocabulary.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn kind(&self) -> LanguageKind {
        self.kind
    }

    pub fn universe(&self) -> &[Statement] {
        &self.universe
    }

    pub fn universe_len(&self) -> usize {
        self.universe.len()
    }

    /// Content hash identifying the language across runs.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn statement(&self, members: impl IntoIterator<Item = usize>) -> Result<Statement> {
        Statement::new(members, self.vocabulary.len())
    }

    /// Position of `statement` in the universe, if it is a member.
    pub fn universe_index(&self, statement: Statement) -> Option<usize> {
        self.universe.binary_search(&statement).ok()
    }

    pub fn contains(&self, statement: Statement) -> bool {
        self.universe_index(statement).is_some()
    }

    /// Statements scanned when computing correct-policy sets: the universe
    /// plus, for explicit languages, the declared policy candidates.
    pub fn policy_scan(&self) -> impl Iterator<Item = Statement> + '_ {
        self.universe
            .iter()
            .chain(&self.policy_candidates)
            .copied()
    }

    pub fn policy_candidates(&self) -> &[Statement] {
        &self.policy_candidates
    }

    fn check_valid(&self, statement: Statement) -> Result<()> {
        Self::check_members(&self.vocabulary, statement)
    }

    /// Truth of a statement at a state: the state realises every program named.
    pub fn is_true(&self, statement: Statement, state: u32) -> Result<bool> {
        self.check_valid(statement)?;
        if state >= self.vocabulary.environment().state_count() {
            return Err(Error::StateOutOfRange {
                state,
                state_count: self.vocabulary.environment().state_count(),
            });
        }
        Ok(self.vocabulary.realization(statement) & (1 << state) != 0)
    }

    /// The extension of `statement`: every universe member that completes it.
    ///
    /// The statement itself need not be a universe member.
    pub fn extension(&self, statement: Statement) -> Result<BitSet> {
        self.check_valid(statement)?;
        if let Some(index) = self.universe_index(statement) {
            if let Some(cache) = self.extension_cache.get() {
                return Ok(cache[index].clone());
            }
        }
        Ok(self.scan_extension(statement))
    }

    fn scan_extension(&self, statement: Statement) -> BitSet {
        let mut out = BitSet::empty(self.universe.len());
        for (i, member) in self.universe.iter().enumerate() {
            if statement.is_subset(member) {
                out.insert(i);
            }
        }
        out
    }

    /// Extensions of every universe member, built once on first use.
    pub fn universe_extensions(&self) -> &[BitSet] {
        self.extension_cache
            .get_or_init(|| self.universe.iter().map(|s| self.scan_extension(*s)).collect())
    }

    /// Union of member extensions.
    pub fn extension_of_set<I>(&self, statements: I) -> Result<BitSet>
    where
        I: IntoIterator<Item = Statement>,
    {
        let mut out = BitSet::empty(self.universe.len());
        for statement in statements {
            out = out.or(&self.extension(statement)?);
        }
        Ok(out)
    }

    /// Equivalence: equal extensions.
    pub fn equivalent(&self, x: Statement, y: Statement) -> Result<bool> {
        Ok(self.extension(x)? == self.extension(y)?)
    }

    /// Materialise a universe subset as statements, in canonical order.
    pub fn statements_of(&self, set: &BitSet) -> Vec<Statement> {
        set.iter().map(|i| self.universe[i]).collect()
    }
}

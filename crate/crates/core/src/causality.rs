//! Interventions versus observations, causal identities, intent, the
//! scale/incentive preconditions, and first/nth order selves.
//!
//! A causal identity for a record is a nonempty statement lying strictly
//! inside every intervention and outside every observation: the common mark
//! distinguishing what the agency did from what merely happened. The
//! canonical identity is the maximal candidate, which classifies the most
//! specific task. Higher-order selves refine an identity by bounded
//! recursive simulation: the modeler rebuilds the target's own construction
//! and keeps the reflective part of its carrier identity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formalism::{Language, Statement};

/// Statements recorded as interventions and as observations.
///
/// A statement is recorded at most once per role; the same event may appear
/// in both roles when two agencies are indistinguishable.
#[derive(Clone, Debug)]
pub struct InterventionRecord {
    language: Arc<Language>,
    interventions: Vec<Statement>,
    observations: Vec<Statement>,
}

impl InterventionRecord {
    pub fn new(
        language: Arc<Language>,
        interventions: impl IntoIterator<Item = Statement>,
        observations: impl IntoIterator<Item = Statement>,
    ) -> Result<Self> {
        let mut record = InterventionRecord {
            language,
            interventions: Vec::new(),
            observations: Vec::new(),
        };
        for int in interventions {
            record.add_intervention(int)?;
        }
        for obs in observations {
            record.add_observation(obs)?;
        }
        Ok(record)
    }

    pub fn empty(language: Arc<Language>) -> Self {
        InterventionRecord {
            language,
            interventions: Vec::new(),
            observations: Vec::new(),
        }
    }

    fn check(&self, statement: Statement) -> Result<()> {
        if statement.members().next_back().unwrap_or(0) >= self.language.vocabulary().len() {
            return Err(Error::ProgramOutOfRange {
                index: statement.members().next_back().unwrap_or(0),
                len: self.language.vocabulary().len(),
            });
        }
        Ok(())
    }

    pub fn add_intervention(&mut self, statement: Statement) -> Result<()> {
        self.check(statement)?;
        if let Err(at) = self.interventions.binary_search(&statement) {
            self.interventions.insert(at, statement);
        }
        Ok(())
    }

    pub fn add_observation(&mut self, statement: Statement) -> Result<()> {
        self.check(statement)?;
        if let Err(at) = self.observations.binary_search(&statement) {
            self.observations.insert(at, statement);
        }
        Ok(())
    }

    /// Record a paired cause: the observed effect must sit strictly inside
    /// the intervention that caused it.
    pub fn add_cause_pair(&mut self, intervention: Statement, observed: Statement) -> Result<()> {
        if !observed.is_strict_subset(&intervention) {
            return Err(Error::NotASubStatement);
        }
        self.add_intervention(intervention)?;
        self.add_observation(observed)
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn interventions(&self) -> &[Statement] {
        &self.interventions
    }

    pub fn observations(&self) -> &[Statement] {
        &self.observations
    }

    /// `(⋂INT) \ (⋃OBS)` as a program mask; zero when nothing remains.
    fn difference_mask(&self) -> u32 {
        let mut meet = u32::MAX;
        for int in &self.interventions {
            meet &= int.mask();
        }
        let mut seen = 0u32;
        for obs in &self.observations {
            seen |= obs.mask();
        }
        meet & !seen
    }
}

/// Every causal identity the record admits: nonempty statements inside the
/// intervention meet, outside every observation, and strictly inside every
/// intervention. The empty result means the intervening agency cannot be
/// known. Canonical statement order.
pub fn causal_identities(record: &InterventionRecord) -> Result<Vec<Statement>> {
    if record.interventions.is_empty() {
        return Err(Error::EmptyInterventions);
    }
    let difference = record.difference_mask();
    let mut out = Vec::new();
    let mut sub = difference;
    while sub != 0 {
        let candidate = Statement::new(
            (0..32).filter(|i| sub & (1 << i) != 0),
            record.language.vocabulary().len(),
        )
        .expect("nonempty submask");
        if record
            .interventions
            .iter()
            .all(|int| candidate.mask() != int.mask())
        {
            out.push(candidate);
        }
        sub = (sub - 1) & difference;
    }
    out.sort_unstable();
    Ok(out)
}

/// The maximal candidate: the full difference, when it is nonempty and a
/// strict subset of every intervention.
pub fn canonical_causal_identity(record: &InterventionRecord) -> Option<Statement> {
    if record.interventions.is_empty() {
        return None;
    }
    let difference = record.difference_mask();
    if difference == 0 {
        return None;
    }
    let candidate = Statement::from_mask(difference);
    if record
        .interventions
        .iter()
        .any(|int| int.mask() == candidate.mask())
    {
        return None;
    }
    Some(candidate)
}

/// The identity of the interventions is the intent ascribed to them.
pub fn ascribe_intent(record: &InterventionRecord) -> Option<Statement> {
    canonical_causal_identity(record)
}

/// Can `organism_vocabulary_mask` express the candidate, and does the
/// scenario's fitness demand it? The incentive half is caller-supplied:
/// which identities fitness requires is scenario data.
pub fn check_preconditions(
    candidate: Statement,
    organism_vocabulary: Statement,
    realizable: bool,
    fitness_requires: bool,
) -> (bool, bool) {
    let scale = candidate.is_subset(&organism_vocabulary) && realizable;
    (scale, fitness_requires)
}

/// A constructed self: an identity tagged with the reflection chain that
/// produced it. The chain reads left to right as nested prediction and ends
/// with its owner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfModel {
    pub owner: String,
    pub chain: Vec<String>,
    pub identity: Statement,
}

impl SelfModel {
    /// Number of reflections: 1 for `[o]`, 2 for `[x,o]`, 3 for `[x,o,x,o]`.
    pub fn order(&self) -> usize {
        if self.chain.len() == 1 {
            1
        } else {
            self.chain.len() / 2 + 1
        }
    }
}

impl fmt::Display for SelfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c^{{{}}}_{}", self.chain.join(""), self.owner)
    }
}

/// Chains must be nonempty, end with their owner, never repeat an organism
/// consecutively, and have length one or an even length, mirroring the
/// alternating shape of written reflection chains.
pub fn validate_chain(chain: &[String], owner: &str, depth_cap: usize) -> Result<()> {
    if chain.is_empty()
        || chain.last().map(String::as_str) != Some(owner)
        || chain.windows(2).any(|w| w[0] == w[1])
        || (chain.len() > 1 && chain.len() % 2 != 0)
    {
        return Err(Error::MalformedChain);
    }
    if chain.len() > depth_cap {
        return Err(Error::DepthExceeded {
            depth: chain.len(),
            cap: depth_cap,
        });
    }
    Ok(())
}

/// What a world must expose for self construction.
///
/// Records are keyed by (constructor, target); the self record of an
/// organism must list every intervention it could make, not only past ones.
pub trait ReflectiveWorld {
    fn knows(&self, organism: &str) -> bool;
    fn record_for(&self, constructor: &str, target: &str) -> Result<&InterventionRecord>;
    /// Statement marking `target` acting from its depth-`depth` model.
    fn reflection_marker(&self, target: &str, depth: usize) -> Option<Statement>;
    /// Does fitness demand that `constructor` build the identity for `chain`?
    fn incentive(&self, constructor: &str, chain: &[String]) -> bool;
    /// Scale precondition: can `constructor` express the statement?
    fn expressible(&self, constructor: &str, statement: Statement) -> bool;
    fn depth_cap(&self) -> usize;
}

/// The 1ST order self: the canonical identity over everything the organism
/// could do against everything it could merely see. At most one exists.
pub fn first_order_self(
    owner: &str,
    all_interventions: &[Statement],
    all_observations: &[Statement],
    language: &Arc<Language>,
) -> Result<Option<SelfModel>> {
    let record = InterventionRecord::new(
        Arc::clone(language),
        all_interventions.iter().copied(),
        all_observations.iter().copied(),
    )?;
    Ok(canonical_causal_identity(&record).map(|identity| SelfModel {
        owner: owner.to_string(),
        chain: vec![owner.to_string()],
        identity,
    }))
}

/// Construct the self for `chain` by recursive simulation.
///
/// One link resolves to the canonical identity of the constructor's record
/// about the target. A longer chain requires the simulated target to
/// construct the rest; on success the enclosing identity is the reflective
/// part of the carrier, so each order nests inside the one before it.
/// Construction is absent whenever a carrier, a marker, the inner model, or
/// the scale/incentive preconditions fail at any level.
pub fn nth_order_self<W: ReflectiveWorld>(
    modeler: &str,
    chain: &[String],
    world: &W,
) -> Result<Option<SelfModel>> {
    validate_chain(chain, modeler, world.depth_cap())?;
    for id in chain {
        if !world.knows(id) {
            return Err(Error::UnknownOrganism(id.clone()));
        }
    }
    Ok(chained_identity(modeler, chain, world)?.map(|identity| SelfModel {
        owner: modeler.to_string(),
        chain: chain.to_vec(),
        identity,
    }))
}

fn chained_identity<W: ReflectiveWorld>(
    constructor: &str,
    chain: &[String],
    world: &W,
) -> Result<Option<Statement>> {
    let target = &chain[0];
    let record = world.record_for(constructor, target)?;
    let Some(carrier) = canonical_causal_identity(record) else {
        return Ok(None);
    };
    let identity = if chain.len() == 1 {
        carrier
    } else {
        let rest = &chain[1..];
        if chained_identity(target, rest, world)?.is_none() {
            return Ok(None);
        }
        let Some(marker) = world.reflection_marker(target, rest.len()) else {
            return Ok(None);
        };
        match carrier.intersection(&marker) {
            Some(refined) => {
                debug_assert!(refined.is_subset(&carrier));
                refined
            }
            None => return Ok(None),
        }
    };
    if !world.expressible(constructor, identity) || !world.incentive(constructor, chain) {
        return Ok(None);
    }
    Ok(Some(identity))
}

/// The union of two same-order selves of one organism is a self too, unless
/// the union stops being strictly inside some recorded intervention.
pub fn union_identities(
    a: &SelfModel,
    b: &SelfModel,
    record: &InterventionRecord,
) -> Result<Statement> {
    if a.owner != b.owner || a.order() != b.order() {
        return Err(Error::MalformedChain);
    }
    let union = a.identity.union(&b.identity);
    for int in record.interventions() {
        if !union.is_strict_subset(int) {
            return Err(Error::FixtureAssertion(format!(
                "union {union:?} is not strictly inside intervention {int:?}"
            )));
        }
    }
    Ok(union)
}

/// Append-only registry of constructed selves, at most one per chain.
#[derive(Clone, Debug, Default)]
pub struct SelfRegistry {
    selves: BTreeMap<(String, Vec<String>), SelfModel>,
}

impl SelfRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Idempotent for identical models; a differing model for a chain that
    /// is already registered is an error.
    pub fn register(&mut self, model: SelfModel) -> Result<bool> {
        let key = (model.owner.clone(), model.chain.clone());
        match self.selves.get(&key) {
            Some(existing) if *existing == model => Ok(false),
            Some(_) => Err(Error::DuplicateSelf {
                owner: model.owner.clone(),
                chain: model.chain.join(""),
            }),
            None => {
                self.selves.insert(key, model);
                Ok(true)
            }
        }
    }

    pub fn get(&self, owner: &str, chain: &[String]) -> Option<&SelfModel> {
        self.selves.get(&(owner.to_string(), chain.to_vec()))
    }

    pub fn of_owner(&self, owner: &str) -> impl Iterator<Item = &SelfModel> {
        self.selves
            .iter()
            .filter(move |((o, _), _)| o == owner)
            .map(|(_, m)| m)
    }

    pub fn max_order(&self, owner: &str) -> usize {
        self.of_owner(owner).map(SelfModel::order).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SelfModel> {
        self.selves.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formalism::{derive_language, Environment, Limits, Program, Vocabulary};

    /// Independent programs p1..p5 over one shared state plus private ones,
    /// so any nonempty subset is realizable.
    fn free_language(programs: usize) -> Arc<Language> {
        let limits = Limits::default();
        let env = Environment::new(1 + programs as u32, &limits).unwrap();
        let vocab = Vocabulary::new(
            env,
            (0..programs)
                .map(|i| Program::new(&env, [0, 1 + i as u32]).unwrap())
                .collect(),
            &limits,
        )
        .unwrap();
        derive_language(vocab, &limits).unwrap()
    }

    fn stmt(lang: &Language, members: &[usize]) -> Statement {
        lang.statement(members.iter().copied()).unwrap()
    }

    #[test]
    fn candidates_from_two_interventions() {
        let lang = free_language(4);
        let record = InterventionRecord::new(
            Arc::clone(&lang),
            [stmt(&lang, &[0, 1, 2]), stmt(&lang, &[0, 1, 3])],
            [stmt(&lang, &[1, 2]), stmt(&lang, &[1, 3])],
        )
        .unwrap();
        assert_eq!(causal_identities(&record).unwrap(), vec![stmt(&lang, &[0])]);
        assert_eq!(canonical_causal_identity(&record), Some(stmt(&lang, &[0])));
        assert_eq!(ascribe_intent(&record), Some(stmt(&lang, &[0])));
    }

    #[test]
    fn indistinguishable_roles_admit_no_identity() {
        let lang = free_language(2);
        let event = stmt(&lang, &[0, 1]);
        let record =
            InterventionRecord::new(Arc::clone(&lang), [event], [event]).unwrap();
        assert!(causal_identities(&record).unwrap().is_empty());
        assert_eq!(canonical_causal_identity(&record), None);
        assert_eq!(ascribe_intent(&record), None);
    }

    #[test]
    fn marker_singleton_difference() {
        // int = obs ∪ {marker}: the marker alone identifies the agency.
        let lang = free_language(3);
        let obs = stmt(&lang, &[0, 1]);
        let int = stmt(&lang, &[0, 1, 2]);
        let mut record = InterventionRecord::empty(Arc::clone(&lang));
        record.add_cause_pair(int, obs).unwrap();
        assert_eq!(causal_identities(&record).unwrap(), vec![stmt(&lang, &[2])]);
        // A pair whose effect is not inside the intervention is rejected.
        let mut bad = InterventionRecord::empty(Arc::clone(&lang));
        assert!(matches!(
            bad.add_cause_pair(obs, int),
            Err(Error::NotASubStatement)
        ));
    }

    #[test]
    fn maximal_candidate_even_when_parts_remain() {
        let lang = free_language(5);
        let record = InterventionRecord::new(
            Arc::clone(&lang),
            [stmt(&lang, &[0, 1, 4]), stmt(&lang, &[0, 2, 4])],
            [stmt(&lang, &[1]), stmt(&lang, &[2])],
        )
        .unwrap();
        // Difference is {p0,p4}: returned whole although {p0},{p4} qualify.
        assert_eq!(
            canonical_causal_identity(&record),
            Some(stmt(&lang, &[0, 4]))
        );
        assert_eq!(
            causal_identities(&record).unwrap(),
            vec![stmt(&lang, &[0]), stmt(&lang, &[0, 4]), stmt(&lang, &[4])]
        );
    }

    #[test]
    fn strictness_rejects_full_interventions() {
        let lang = free_language(2);
        // Single intervention with empty observation set: difference equals
        // the intervention itself, which is not a strict subset.
        let record =
            InterventionRecord::new(Arc::clone(&lang), [stmt(&lang, &[0, 1])], []).unwrap();
        assert_eq!(canonical_causal_identity(&record), None);
        let ids = causal_identities(&record).unwrap();
        assert_eq!(ids, vec![stmt(&lang, &[0]), stmt(&lang, &[1])]);
    }

    #[test]
    fn empty_interventions_is_an_error() {
        let lang = free_language(2);
        let record = InterventionRecord::empty(Arc::clone(&lang));
        assert!(matches!(
            causal_identities(&record),
            Err(Error::EmptyInterventions)
        ));
        assert_eq!(canonical_causal_identity(&record), None);
    }

    #[test]
    fn downward_completeness() {
        let lang = free_language(5);
        let record = InterventionRecord::new(
            Arc::clone(&lang),
            [stmt(&lang, &[0, 1, 2, 3]), stmt(&lang, &[0, 1, 2, 4])],
            [stmt(&lang, &[3, 4])],
        )
        .unwrap();
        let ids = causal_identities(&record).unwrap();
        let canonical = canonical_causal_identity(&record).unwrap();
        assert_eq!(canonical, stmt(&lang, &[0, 1, 2]));
        // Every nonempty subset of the maximal candidate qualifies.
        assert_eq!(ids.len(), 7);
        for id in &ids {
            assert!(id.is_subset(&canonical));
        }
    }

    #[test]
    fn extending_a_record_only_shrinks_candidates() {
        let lang = free_language(4);
        let mut record = InterventionRecord::new(
            Arc::clone(&lang),
            [stmt(&lang, &[0, 1, 2])],
            [stmt(&lang, &[3])],
        )
        .unwrap();
        let before = causal_identities(&record).unwrap();
        record.add_observation(stmt(&lang, &[1])).unwrap();
        let after_obs = causal_identities(&record).unwrap();
        assert!(after_obs.iter().all(|c| before.contains(c)));
        record.add_intervention(stmt(&lang, &[0, 2, 3])).unwrap();
        let after_int = causal_identities(&record).unwrap();
        assert!(after_int.iter().all(|c| after_obs.contains(c)));
    }

    #[test]
    fn first_order_self_from_possible_interventions() {
        let lang = free_language(4);
        let ints = [stmt(&lang, &[0, 1, 3]), stmt(&lang, &[0, 2, 3])];
        let obs = [stmt(&lang, &[1]), stmt(&lang, &[2])];
        let model = first_order_self("bob", &ints, &obs, &lang).unwrap().unwrap();
        assert_eq!(model.identity, stmt(&lang, &[0, 3]));
        assert_eq!(model.chain, vec!["bob".to_string()]);
        assert_eq!(model.order(), 1);

        // Indistinguishable interventions yield no self.
        let none = first_order_self("bob", &obs, &obs, &lang).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn registry_enforces_uniqueness() {
        let lang = free_language(3);
        let model = SelfModel {
            owner: "a".into(),
            chain: vec!["a".into()],
            identity: stmt(&lang, &[0]),
        };
        let mut registry = SelfRegistry::new();
        assert!(registry.register(model.clone()).unwrap());
        assert!(!registry.register(model.clone()).unwrap());
        let differing = SelfModel {
            identity: stmt(&lang, &[1]),
            ..model
        };
        assert!(matches!(
            registry.register(differing),
            Err(Error::DuplicateSelf { .. })
        ));
        assert_eq!(registry.max_order("a"), 1);
    }

    #[test]
    fn chain_validation() {
        let err = |chain: &[&str], owner: &str, cap: usize| {
            validate_chain(
                &chain.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                owner,
                cap,
            )
        };
        assert!(err(&["a"], "a", 4).is_ok());
        assert!(err(&["b", "a"], "a", 4).is_ok());
        assert!(err(&["b", "a", "b", "a"], "a", 4).is_ok());
        assert!(matches!(err(&[], "a", 4), Err(Error::MalformedChain)));
        assert!(matches!(err(&["b", "a"], "b", 4), Err(Error::MalformedChain)));
        assert!(matches!(err(&["a", "a"], "a", 4), Err(Error::MalformedChain)));
        assert!(matches!(err(&["b", "a", "a", "a"], "a", 4), Err(Error::MalformedChain)));
        assert!(matches!(
            err(&["b", "a", "b", "a"], "a", 3),
            Err(Error::DepthExceeded { depth: 4, cap: 3 })
        ));
    }

    #[test]
    fn self_union_requires_strict_containment() {
        let lang = free_language(4);
        let record = InterventionRecord::new(
            Arc::clone(&lang),
            [stmt(&lang, &[0, 1, 2])],
            [stmt(&lang, &[3])],
        )
        .unwrap();
        let make = |members: &[usize]| SelfModel {
            owner: "a".into(),
            chain: vec!["a".into()],
            identity: stmt(&lang, members),
        };
        let joined = union_identities(&make(&[0]), &make(&[1]), &record).unwrap();
        assert_eq!(joined, stmt(&lang, &[0, 1]));
        // The union saturating an intervention is rejected.
        assert!(union_identities(&make(&[0, 1]), &make(&[2]), &record).is_err());
        // Mismatched orders are rejected.
        let deeper = SelfModel {
            owner: "a".into(),
            chain: vec!["b".into(), "a".into()],
            identity: stmt(&lang, &[0]),
        };
        assert!(union_identities(&make(&[0]), &deeper, &record).is_err());
    }
}

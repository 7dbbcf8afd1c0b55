//! Built-in counterexample fixture separating the weakness and
//! description-length proxies.
//!
//! The fixture's explicit language lists six maximal statements as its
//! universe and carries the two statements `{z}` and `{j,k}` as policy
//! candidates: they take part in the correct-policy scan but contribute to
//! no extension, so completion counts are taken over the six listed
//! statements alone. On the bundled task the two proxies disagree: weakness
//! picks `{j,k}` (four completions against two) while description length
//! picks `{z}` (one program against two).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formalism::{Environment, Language, Limits, Program, Statement, Vocabulary};
use crate::learning::{self, Proxy};
use crate::tasks::{self, Policy, VTask};

pub const PROGRAM_NAMES: [&str; 11] = ["a", "b", "c", "d", "e", "f", "g", "h", "j", "k", "z"];

/// Program-name lists of the six listed universe statements.
const LISTED: [&[usize]; 6] = [
    &[0, 1, 2, 3, 8, 9, 10],  // {a,b,c,d,j,k,z}
    &[4, 1, 2, 3, 9],         // {e,b,c,d,k}
    &[0, 5, 2, 3, 8],         // {a,f,c,d,j}
    &[4, 1, 6, 3, 8, 9, 10],  // {e,b,g,d,j,k,z}
    &[0, 5, 2, 7, 8, 9],      // {a,f,c,h,j,k}
    &[4, 5, 6, 7, 8, 9],      // {e,f,g,h,j,k}
];

pub struct Prop3Fixture {
    pub language: Arc<Language>,
    pub task: VTask,
    pub listed: Vec<Statement>,
    pub policy_z: Statement,
    pub policy_jk: Statement,
}

fn build(keep_statements: usize) -> Prop3Fixture {
    let limits = Limits::default();
    // One witness state per listed statement keeps every named statement
    // realizable: program p holds at state i iff p appears in statement i.
    let env = Environment::new(6, &limits).expect("state cap");
    let programs: Vec<Program> = (0..PROGRAM_NAMES.len())
        .map(|p| {
            let states = (0..LISTED.len() as u32).filter(|&s| LISTED[s as usize].contains(&p));
            Program::new(&env, states).expect("state indices")
        })
        .collect();
    let vocab_len = programs.len();
    let vocabulary = Vocabulary::new(env, programs, &limits).expect("program cap");
    let statement =
        |members: &[usize]| Statement::new(members.iter().copied(), vocab_len).expect("members");

    let listed: Vec<Statement> = LISTED[..keep_statements].iter().map(|m| statement(m)).collect();
    let policy_z = statement(&[10]);
    let policy_jk = statement(&[8, 9]);
    let language = Language::explicit(
        vocabulary,
        listed.clone(),
        vec![policy_z, policy_jk],
        &limits,
    )
    .expect("fixture language");
    let task = VTask::new(
        Arc::clone(&language),
        vec![statement(&[0, 1]), statement(&[4, 1])],
        vec![listed[0], listed[3]],
    )
    .expect("fixture task");
    Prop3Fixture {
        language,
        task,
        listed,
        policy_z,
        policy_jk,
    }
}

/// The fixture exactly as published.
pub fn prop3() -> Prop3Fixture {
    build(LISTED.len())
}

/// The fixture with the last listed statement dropped; one completion of
/// `{j,k}` disappears, so the extension-size check must fail.
pub fn prop3_tampered() -> Prop3Fixture {
    build(LISTED.len() - 1)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureReport {
    pub fixture: String,
    pub checks: Vec<FixtureCheck>,
    pub passed: bool,
}

fn names_of(statement: Statement) -> String {
    let names: Vec<&str> = statement.members().map(|i| PROGRAM_NAMES[i]).collect();
    format!("{{{}}}", names.join(","))
}

fn names_of_all(statements: &[Statement]) -> String {
    let parts: Vec<String> = statements.iter().map(|s| names_of(*s)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Run every fixture assertion and report each as pass/fail.
pub fn check(fixture: &Prop3Fixture) -> Result<FixtureReport> {
    let mut checks = Vec::new();
    let mut push = |name: &str, expected: String, actual: String| {
        checks.push(FixtureCheck {
            name: name.to_string(),
            pass: expected == actual,
            expected,
            actual,
        });
    };

    let correct = tasks::policies(&fixture.task);
    push(
        "correct_policies",
        names_of_all(&[fixture.policy_jk, fixture.policy_z]),
        names_of_all(&correct.iter().map(Policy::statement).collect::<Vec<_>>()),
    );

    let (weak_choice, _) = learning::learn(&fixture.task, &Proxy::weakness())?;
    push(
        "weakness_selects",
        names_of(fixture.policy_jk),
        names_of(weak_choice.statement()),
    );

    let (short_choice, _) = learning::learn(&fixture.task, &Proxy::description_length())?;
    push(
        "description_length_selects",
        names_of(fixture.policy_z),
        names_of(short_choice.statement()),
    );

    let ext_z = fixture.language.extension(fixture.policy_z)?.len();
    push("extension_size_of_{z}", "2".into(), ext_z.to_string());
    let ext_jk = fixture.language.extension(fixture.policy_jk)?.len();
    push("extension_size_of_{j,k}", "4".into(), ext_jk.to_string());

    let passed = checks.iter().all(|c| c.pass);
    Ok(FixtureReport {
        fixture: "prop3".to_string(),
        checks,
        passed,
    })
}

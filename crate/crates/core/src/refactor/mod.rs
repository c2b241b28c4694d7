//! Label-preserving code refactorings.
//!
//! Each [`RefactoringMethod`] has a structural precondition checked by
//! [`applicable`]; [`apply`] picks one candidate site uniformly with the
//! caller's RNG and rewrites it. All methods except
//! [`RefactoringMethod::ApiRenaming`] keep the program's printed output and
//! return value unchanged.

mod sites;
pub mod synonyms;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::lang::{Program, Stmt};
pub use synonyms::SynonymTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefactoringMethod {
    ApiRenaming,
    ArgumentsAdding,
    ArgumentRenaming,
    DeadForAdding,
    DeadIfAdding,
    DeadIfElseAdding,
    DeadWhileAdding,
    Duplication,
    FieldEnhancement,
    ForLoopEnhancement,
    IfEnhancement,
    LocalVariableAdding,
    LocalVariableRenaming,
    MethodNameRenaming,
    PlusZero,
    PrintAdding,
    ReturnOptimal,
}

impl RefactoringMethod {
    pub const ALL: [RefactoringMethod; 17] = [
        RefactoringMethod::ApiRenaming,
        RefactoringMethod::ArgumentsAdding,
        RefactoringMethod::ArgumentRenaming,
        RefactoringMethod::DeadForAdding,
        RefactoringMethod::DeadIfAdding,
        RefactoringMethod::DeadIfElseAdding,
        RefactoringMethod::DeadWhileAdding,
        RefactoringMethod::Duplication,
        RefactoringMethod::FieldEnhancement,
        RefactoringMethod::ForLoopEnhancement,
        RefactoringMethod::IfEnhancement,
        RefactoringMethod::LocalVariableAdding,
        RefactoringMethod::LocalVariableRenaming,
        RefactoringMethod::MethodNameRenaming,
        RefactoringMethod::PlusZero,
        RefactoringMethod::PrintAdding,
        RefactoringMethod::ReturnOptimal,
    ];

    /// Kebab-case name used on the command line and in result files.
    pub fn name(self) -> &'static str {
        use RefactoringMethod::*;
        match self {
            ApiRenaming => "api-renaming",
            ArgumentsAdding => "arguments-adding",
            ArgumentRenaming => "argument-renaming",
            DeadForAdding => "dead-for-adding",
            DeadIfAdding => "dead-if-adding",
            DeadIfElseAdding => "dead-if-else-adding",
            DeadWhileAdding => "dead-while-adding",
            Duplication => "duplication",
            FieldEnhancement => "field-enhancement",
            ForLoopEnhancement => "for-loop-enhancement",
            IfEnhancement => "if-enhancement",
            LocalVariableAdding => "local-variable-adding",
            LocalVariableRenaming => "local-variable-renaming",
            MethodNameRenaming => "method-name-renaming",
            PlusZero => "plus-zero",
            PrintAdding => "print-adding",
            ReturnOptimal => "return-optimal",
        }
    }

    /// Whether the method is expected to leave program behaviour unchanged.
    pub fn preserves_semantics(self) -> bool {
        self != RefactoringMethod::ApiRenaming
    }
}

impl fmt::Display for RefactoringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MethodParseError {
    #[error("`dead-switch-adding` is not supported: MiniPy has no switch statement")]
    Unsupported,
    #[error("unknown refactoring method `{0}`")]
    Unknown(String),
}

impl FromStr for RefactoringMethod {
    type Err = MethodParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "dead-switch-adding" {
            return Err(MethodParseError::Unsupported);
        }
        RefactoringMethod::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| MethodParseError::Unknown(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefactorError {
    #[error("{0} is not applicable to this program")]
    NotApplicable(RefactoringMethod),
    #[error("no applicable refactoring method")]
    NoApplicableMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefactorOutcome {
    pub program: Program,
    pub method: RefactoringMethod,
    /// Human-readable description of where the rewrite happened.
    pub site: String,
}

/// True iff [`apply`] would succeed.
pub fn applicable(method: RefactoringMethod, program: &Program) -> bool {
    sites::count(method, program, &SynonymTable::shipped()) > 0
}

/// Apply `method` at a uniformly chosen candidate site.
pub fn apply<R: Rng + ?Sized>(
    method: RefactoringMethod,
    program: &Program,
    rng: &mut R,
) -> Result<RefactorOutcome, RefactorError> {
    apply_with(method, program, &SynonymTable::shipped(), rng)
}

pub fn apply_with<R: Rng + ?Sized>(
    method: RefactoringMethod,
    program: &Program,
    table: &SynonymTable,
    rng: &mut R,
) -> Result<RefactorOutcome, RefactorError> {
    let n = sites::count(method, program, table);
    if n == 0 {
        return Err(RefactorError::NotApplicable(method));
    }
    let pick = rng.random_range(0..n);
    let mut out = program.clone();
    let site = sites::rewrite(method, &mut out, table, pick, rng);
    Ok(RefactorOutcome {
        program: out,
        method,
        site,
    })
}

/// Pick a method uniformly among the applicable members of `methods` and
/// apply it. Duplicates in `methods` are ignored.
pub fn random_refactor<R: Rng + ?Sized>(
    program: &Program,
    methods: &[RefactoringMethod],
    rng: &mut R,
) -> Result<RefactorOutcome, RefactorError> {
    let table = SynonymTable::shipped();
    let mut candidates: Vec<RefactoringMethod> = methods.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    candidates.retain(|m| sites::count(*m, program, &table) > 0);
    if candidates.is_empty() {
        return Err(RefactorError::NoApplicableMethod);
    }
    let method = candidates[rng.random_range(0..candidates.len())];
    apply_with(method, program, &table, rng)
}

/// [`random_refactor`], falling back to the unchanged program (with
/// `method == None`) when nothing applies.
pub fn refactor_or_identity<R: Rng + ?Sized>(
    program: &Program,
    methods: &[RefactoringMethod],
    rng: &mut R,
) -> (Program, Option<RefactoringMethod>) {
    match random_refactor(program, methods, rng) {
        Ok(o) => (o.program, Some(o.method)),
        Err(_) => (program.clone(), None),
    }
}

/// Name of a fresh reserved variable (`__dead0`, `__dead1`, ...).
pub(crate) fn fresh_dead_name(program: &Program) -> String {
    let used = sites::all_names(program);
    (0..)
        .map(|k| format!("__dead{k}"))
        .find(|n| !used.contains(n))
        .expect("unbounded pool")
}

pub(crate) fn describe_block(owner: Option<&str>, nested: bool, pos: usize) -> String {
    match (owner, nested) {
        (None, false) => format!("top level, position {pos}"),
        (None, true) => format!("nested top-level block, position {pos}"),
        (Some(f), false) => format!("body of `{f}`, position {pos}"),
        (Some(f), true) => format!("nested block in `{f}`, position {pos}"),
    }
}

pub(crate) fn first_return(stmts: &[Stmt]) -> Option<usize> {
    stmts.iter().position(|s| matches!(s, Stmt::Return(_)))
}

#[cfg(test)]
mod tests;

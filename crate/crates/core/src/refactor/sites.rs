//! Candidate-site enumeration and the rewrites themselves.
//!
//! Statement lists are addressed by a block index: each function body
//! followed by its nested blocks (pre-order), then the top-level list and
//! its nested blocks. Enumeration and rewriting walk in the same order.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{describe_block, first_return, fresh_dead_name, RefactoringMethod, SynonymTable};
use crate::lang::ast::{walk_exprs, walk_exprs_mut, walk_stmts, walk_stmts_mut};
use crate::lang::{BinOp, Callee, Expr, Param, Prec, Program, RangeArgs, Stmt};

const FIELD_CHECK_MESSAGE: &str = "please check your input.";

#[derive(Debug, Clone)]
enum Site {
    Insert { block: usize, pos: usize },
    Statement { block: usize, index: usize },
    IfBranch { block: usize, index: usize, branch: usize },
    Function(usize),
    Param { func: usize, param: usize },
    Local { scope: usize, name: String },
    ApiCall(usize),
}

struct BlockInfo<'a> {
    owner: Option<&'a str>,
    nested: bool,
    stmts: &'a [Stmt],
}

fn collect_nested<'a>(owner: Option<&'a str>, stmts: &'a [Stmt], out: &mut Vec<BlockInfo<'a>>) {
    for s in stmts {
        for b in s.blocks() {
            out.push(BlockInfo {
                owner,
                nested: true,
                stmts: b,
            });
            collect_nested(owner, b, out);
        }
    }
}

fn blocks(program: &Program) -> Vec<BlockInfo<'_>> {
    let mut out = Vec::new();
    for f in &program.functions {
        out.push(BlockInfo {
            owner: Some(&f.name),
            nested: false,
            stmts: &f.body,
        });
        collect_nested(Some(&f.name), &f.body, &mut out);
    }
    out.push(BlockInfo {
        owner: None,
        nested: false,
        stmts: &program.body,
    });
    collect_nested(None, &program.body, &mut out);
    out
}

fn nth_block<'a>(stmts: &'a mut Vec<Stmt>, n: &mut usize) -> Option<&'a mut Vec<Stmt>> {
    if *n == 0 {
        return Some(stmts);
    }
    *n -= 1;
    for s in stmts.iter_mut() {
        for b in s.blocks_mut() {
            if let Some(found) = nth_block(b, n) {
                return Some(found);
            }
        }
    }
    None
}

fn block_mut(program: &mut Program, index: usize) -> &mut Vec<Stmt> {
    let mut n = index;
    for f in program.functions.iter_mut() {
        if let Some(b) = nth_block(&mut f.body, &mut n) {
            return b;
        }
    }
    nth_block(&mut program.body, &mut n).expect("block index from enumeration")
}

/// Every variable name (parameters, assignment targets, loop variables,
/// references) appearing in a statement list.
fn names_in(stmts: &[Stmt], out: &mut BTreeSet<String>) {
    walk_stmts(stmts, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::AugAssign { target, .. } => {
            out.insert(target.clone());
        }
        Stmt::For { var, .. } => {
            out.insert(var.clone());
        }
        _ => {}
    });
    walk_exprs(stmts, &mut |e| {
        if let Expr::Var(v) = e {
            out.insert(v.clone());
        }
    });
}

pub(super) fn all_names(program: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in &program.functions {
        out.extend(f.params.iter().map(|p| p.name.clone()));
        names_in(&f.body, &mut out);
    }
    names_in(&program.body, &mut out);
    out
}

fn function_names(program: &Program) -> BTreeSet<String> {
    program.functions.iter().map(|f| f.name.clone()).collect()
}

/// Names visible in scope `scope` (a function index, or `functions.len()`
/// for the top level) plus every function name.
fn scope_names(program: &Program, scope: usize) -> BTreeSet<String> {
    let mut out = function_names(program);
    if let Some(f) = program.functions.get(scope) {
        out.extend(f.params.iter().map(|p| p.name.clone()));
        names_in(&f.body, &mut out);
    } else {
        names_in(&program.body, &mut out);
    }
    out
}

fn available_synonyms(table: &SynonymTable, name: &str, taken: &BTreeSet<String>) -> Vec<&'static str> {
    table.synonyms(name).filter(|s| !taken.contains(*s)).collect()
}

fn assigned_locals(stmts: &[Stmt]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk_stmts(stmts, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::AugAssign { target, .. } => {
            out.insert(target.clone());
        }
        Stmt::For { var, .. } => {
            out.insert(var.clone());
        }
        _ => {}
    });
    out
}

/// Statically an integer whenever evaluation succeeds.
fn is_numeric(e: &Expr) -> bool {
    match e {
        Expr::Int(_) => true,
        Expr::Unary {
            op: crate::lang::UnaryOp::Neg,
            ..
        } => true,
        Expr::Binary { op, .. } => op.is_arithmetic(),
        Expr::Call {
            callee: Callee::Api { .. } | Callee::Input,
            ..
        } => true,
        Expr::Paren(inner) => is_numeric(inner),
        Expr::Cond { then, orelse, .. } => is_numeric(then) && is_numeric(orelse),
        _ => false,
    }
}

/// Re-evaluating the expression gives the same value and no side effects.
fn is_pure(e: &Expr) -> bool {
    let mut pure = true;
    e.walk(&mut |x| {
        if let Expr::Call { callee, .. } = x {
            if !matches!(callee, Callee::Api { .. }) {
                pure = false;
            }
        }
    });
    pure
}

fn reads_var(e: &Expr, name: &str) -> bool {
    let mut found = false;
    e.walk(&mut |x| {
        if matches!(x, Expr::Var(v) if v == name) {
            found = true;
        }
    });
    found
}

fn api_calls(program: &Program, table: &SynonymTable) -> Vec<String> {
    let mut out = Vec::new();
    let mut visit = |e: &Expr| {
        if let Expr::Call {
            callee: Callee::Api { ns, name },
            ..
        } = e
        {
            out.push(format!("{ns}.{name}"));
        }
    };
    for f in &program.functions {
        walk_exprs(&f.body, &mut visit);
    }
    walk_exprs(&program.body, &mut visit);
    let _ = table;
    out
}

fn enumerate(method: RefactoringMethod, program: &Program, table: &SynonymTable) -> Vec<Site> {
    use RefactoringMethod::*;
    let mut sites = Vec::new();
    match method {
        DeadForAdding | DeadIfAdding | DeadIfElseAdding | DeadWhileAdding | LocalVariableAdding => {
            for (block, info) in blocks(program).iter().enumerate() {
                if !info.nested {
                    for pos in 0..=info.stmts.len() {
                        sites.push(Site::Insert { block, pos });
                    }
                }
            }
        }
        PrintAdding => {
            for (block, info) in blocks(program).iter().enumerate() {
                if let Some(r) = first_return(info.stmts) {
                    for pos in r + 1..=info.stmts.len() {
                        sites.push(Site::Insert { block, pos });
                    }
                }
            }
        }
        Duplication | PlusZero | ReturnOptimal | ForLoopEnhancement => {
            for (block, info) in blocks(program).iter().enumerate() {
                for (index, s) in info.stmts.iter().enumerate() {
                    let ok = match (method, s) {
                        (Duplication, Stmt::Assign { target, value }) => is_pure(value) && !reads_var(value, target),
                        (PlusZero, Stmt::Assign { value, .. }) => is_numeric(value),
                        (ReturnOptimal, Stmt::Return(Some(_))) => true,
                        (
                            ForLoopEnhancement,
                            Stmt::For {
                                range: RangeArgs::Stop(_),
                                ..
                            },
                        ) => true,
                        _ => false,
                    };
                    if ok {
                        sites.push(Site::Statement { block, index });
                    }
                }
            }
        }
        IfEnhancement => {
            for (block, info) in blocks(program).iter().enumerate() {
                for (index, s) in info.stmts.iter().enumerate() {
                    if let Stmt::If { branches, .. } = s {
                        for (branch, (cond, _)) in branches.iter().enumerate() {
                            if *cond == Expr::Bool(true) {
                                sites.push(Site::IfBranch { block, index, branch });
                            }
                        }
                    }
                }
            }
        }
        ArgumentsAdding => {
            sites.extend((0..program.functions.len()).map(Site::Function));
        }
        FieldEnhancement => {
            for (func, f) in program.functions.iter().enumerate() {
                for param in 0..f.params.len() {
                    sites.push(Site::Param { func, param });
                }
            }
        }
        ArgumentRenaming => {
            for (func, f) in program.functions.iter().enumerate() {
                let taken = scope_names(program, func);
                for (param, p) in f.params.iter().enumerate() {
                    if !available_synonyms(table, &p.name, &taken).is_empty() {
                        sites.push(Site::Param { func, param });
                    }
                }
            }
        }
        LocalVariableRenaming => {
            let scopes = program.functions.len() + 1;
            for scope in 0..scopes {
                let (locals, params): (BTreeSet<String>, BTreeSet<String>) = match program.functions.get(scope) {
                    Some(f) => (
                        assigned_locals(&f.body),
                        f.params.iter().map(|p| p.name.clone()).collect(),
                    ),
                    None => (assigned_locals(&program.body), BTreeSet::new()),
                };
                let taken = scope_names(program, scope);
                for name in locals.difference(&params) {
                    if !available_synonyms(table, name, &taken).is_empty() {
                        sites.push(Site::Local {
                            scope,
                            name: name.clone(),
                        });
                    }
                }
            }
        }
        MethodNameRenaming => {
            let mut taken = function_names(program);
            taken.extend(all_names(program));
            for (func, f) in program.functions.iter().enumerate() {
                if !available_synonyms(table, &f.name, &taken).is_empty() {
                    sites.push(Site::Function(func));
                }
            }
        }
        ApiRenaming => {
            for (k, name) in api_calls(program, table).iter().enumerate() {
                if table.synonyms(name).next().is_some() {
                    sites.push(Site::ApiCall(k));
                }
            }
        }
    }
    sites
}

pub(super) fn count(method: RefactoringMethod, program: &Program, table: &SynonymTable) -> usize {
    enumerate(method, program, table).len()
}

fn print_stmt(v: i64) -> Stmt {
    Stmt::Expr(Expr::print(vec![Expr::Int(v)]))
}

fn dead_statement(method: RefactoringMethod, program: &Program) -> Stmt {
    use RefactoringMethod::*;
    match method {
        DeadForAdding => Stmt::For {
            var: fresh_dead_name(program),
            range: RangeArgs::Stop(Expr::Int(0)),
            body: vec![print_stmt(0)],
        },
        DeadIfAdding => Stmt::If {
            branches: vec![(Expr::const_compare(1, 0), vec![print_stmt(0)])],
            orelse: None,
        },
        DeadIfElseAdding => Stmt::Expr(Expr::Cond {
            then: Box::new(Expr::print(vec![Expr::Int(0)])),
            cond: Box::new(Expr::const_compare(1, 0)),
            orelse: Box::new(Expr::None),
        }),
        DeadWhileAdding => Stmt::While {
            cond: Expr::const_compare(1, 0),
            body: vec![print_stmt(0)],
        },
        LocalVariableAdding => Stmt::Assign {
            target: fresh_dead_name(program),
            value: Expr::Int(1),
        },
        PrintAdding => print_stmt(1),
        _ => unreachable!("not an insertion method"),
    }
}

fn rename_in_block(stmts: &mut [Stmt], from: &str, to: &str) {
    walk_stmts_mut(stmts, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::AugAssign { target, .. } if target == from => {
            *target = to.into();
        }
        Stmt::For { var, .. } if var == from => {
            *var = to.into();
        }
        _ => {}
    });
    walk_exprs_mut(stmts, &mut |e| {
        if let Expr::Var(v) = e {
            if v == from {
                *v = to.into();
            }
        }
    });
}

fn pick<'a, R: Rng + ?Sized>(items: &[&'a str], rng: &mut R) -> &'a str {
    items[rng.random_range(0..items.len())]
}

/// Rewrite `program` at the `pick`-th candidate site; returns a description.
pub(super) fn rewrite<R: Rng + ?Sized>(
    method: RefactoringMethod,
    program: &mut Program,
    table: &SynonymTable,
    pick_index: usize,
    rng: &mut R,
) -> String {
    use RefactoringMethod::*;
    let site = enumerate(method, program, table).swap_remove(pick_index);
    let describe = |program: &Program, block: usize, pos: usize| {
        let info = &blocks(program)[block];
        describe_block(info.owner, info.nested, pos)
    };

    match site {
        Site::Insert { block, pos } => {
            let where_ = describe(program, block, pos);
            let stmt = dead_statement(method, program);
            block_mut(program, block).insert(pos, stmt);
            where_
        }
        Site::Statement { block, index } => {
            let where_ = describe(program, block, index);
            let stmts = block_mut(program, block);
            match (method, &mut stmts[index]) {
                (Duplication, s) => {
                    let copy = s.clone();
                    stmts.insert(index + 1, copy);
                }
                (PlusZero, Stmt::Assign { value, .. }) => {
                    let old = core::mem::replace(value, Expr::None);
                    *value = Expr::binary(BinOp::Add, old.wrapped_for(Prec::Additive), Expr::Int(0));
                }
                (ReturnOptimal, Stmt::Return(Some(value))) => {
                    let old = core::mem::replace(value, Expr::None);
                    *value = Expr::Cond {
                        then: Box::new(Expr::Int(0)),
                        cond: Box::new(Expr::const_compare(1, 0)),
                        orelse: Box::new(old),
                    };
                }
                (ForLoopEnhancement, Stmt::For { range, .. }) => {
                    if let RangeArgs::Stop(stop) = range {
                        let stop = core::mem::replace(stop, Expr::None);
                        *range = RangeArgs::StartStop(Expr::Int(0), stop);
                    }
                }
                _ => unreachable!("site kind matches method"),
            }
            where_
        }
        Site::IfBranch { block, index, branch } => {
            let where_ = describe(program, block, index);
            if let Stmt::If { branches, .. } = &mut block_mut(program, block)[index] {
                branches[branch].0 = Expr::const_compare(0, 0);
            }
            where_
        }
        Site::Function(func) => match method {
            ArgumentsAdding => {
                let taken = scope_names(program, func);
                let name = ('a'..='z')
                    .map(String::from)
                    .chain((0..).map(|k| format!("arg{k}")))
                    .find(|n| !taken.contains(n))
                    .expect("unbounded pool");
                let f = &mut program.functions[func];
                let site = format!("def `{}`, new parameter `{name}`", f.name);
                f.params.push(Param { name, default: Some(0) });
                site
            }
            MethodNameRenaming => {
                let mut taken = function_names(program);
                taken.extend(all_names(program));
                let old = program.functions[func].name.clone();
                let options = available_synonyms(table, &old, &taken);
                let new = pick(&options, rng);
                program.functions[func].name = new.into();
                let mut visit = |e: &mut Expr| {
                    if let Expr::Call {
                        callee: Callee::User(name),
                        ..
                    } = e
                    {
                        if *name == old {
                            *name = new.into();
                        }
                    }
                };
                for f in program.functions.iter_mut() {
                    walk_exprs_mut(&mut f.body, &mut visit);
                }
                walk_exprs_mut(&mut program.body, &mut visit);
                format!("def `{old}` renamed to `{new}`")
            }
            _ => unreachable!("site kind matches method"),
        },
        Site::Param { func, param } => match method {
            FieldEnhancement => {
                let f = &mut program.functions[func];
                let p = f.params[param].name.clone();
                let check = Stmt::If {
                    branches: vec![(
                        Expr::binary(BinOp::Eq, Expr::Var(p.clone()), Expr::None),
                        vec![Stmt::Expr(Expr::print(vec![Expr::Str(FIELD_CHECK_MESSAGE.into())]))],
                    )],
                    orelse: None,
                };
                f.body.insert(0, check);
                format!("def `{}`, None check on `{p}`", f.name)
            }
            ArgumentRenaming => {
                let taken = scope_names(program, func);
                let f = &mut program.functions[func];
                let old = f.params[param].name.clone();
                let options = available_synonyms(table, &old, &taken);
                let new = pick(&options, rng);
                f.params[param].name = new.into();
                rename_in_block(&mut f.body, &old, new);
                format!("def `{}`, parameter `{old}` renamed to `{new}`", f.name)
            }
            _ => unreachable!("site kind matches method"),
        },
        Site::Local { scope, name } => {
            let taken = scope_names(program, scope);
            let options = available_synonyms(table, &name, &taken);
            let new = pick(&options, rng);
            let owner = program.functions.get(scope).map(|f| f.name.clone());
            rename_in_block(program.scope_body_mut(scope), &name, new);
            match owner {
                Some(f) => format!("local `{name}` in `{f}` renamed to `{new}`"),
                None => format!("top-level `{name}` renamed to `{new}`"),
            }
        }
        Site::ApiCall(k) => {
            let names = api_calls(program, table);
            let old = names[k].clone();
            let options: Vec<&str> = table.synonyms(&old).collect();
            let new = pick(&options, rng);
            let (new_ns, new_name) = new.split_once('.').expect("api synonyms are qualified");
            let mut seen = 0usize;
            let mut visit = |e: &mut Expr| {
                if let Expr::Call {
                    callee: Callee::Api { ns, name },
                    ..
                } = e
                {
                    if seen == k {
                        *ns = new_ns.into();
                        *name = new_name.into();
                    }
                    seen += 1;
                }
            };
            for f in program.functions.iter_mut() {
                walk_exprs_mut(&mut f.body, &mut visit);
            }
            walk_exprs_mut(&mut program.body, &mut visit);
            format!("call {k}: `{old}` renamed to `{new}`")
        }
    }
}

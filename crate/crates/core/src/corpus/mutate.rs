//! Single semantic mutations used to seed bugs.

use alloc::vec::Vec;

use rand::Rng;

use crate::lang::ast::{walk_exprs_mut, walk_stmts_mut};
use crate::lang::{BinOp, Expr, Program, RangeArgs, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    ComparisonFlip,
    RangeOffByOne,
    ConstantPerturbation,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [
        MutationKind::ComparisonFlip,
        MutationKind::RangeOffByOne,
        MutationKind::ConstantPerturbation,
    ];
}

/// Replacement operators for a comparison: the boundary shift, the reversed
/// direction, or the negated equality.
fn flips(op: BinOp) -> &'static [BinOp] {
    match op {
        BinOp::Lt => &[BinOp::Le, BinOp::Gt],
        BinOp::Le => &[BinOp::Lt, BinOp::Ge],
        BinOp::Gt => &[BinOp::Ge, BinOp::Lt],
        BinOp::Ge => &[BinOp::Gt, BinOp::Le],
        BinOp::Eq => &[BinOp::Ne],
        BinOp::Ne => &[BinOp::Eq],
        _ => &[],
    }
}

fn for_each_expr_mut(program: &mut Program, f: &mut dyn FnMut(&mut Expr)) {
    for func in &mut program.functions {
        walk_exprs_mut(&mut func.body, f);
    }
    walk_exprs_mut(&mut program.body, f);
}

fn for_each_stmt_mut(program: &mut Program, f: &mut dyn FnMut(&mut Stmt)) {
    for func in &mut program.functions {
        walk_stmts_mut(&mut func.body, f);
    }
    walk_stmts_mut(&mut program.body, f);
}

/// Number of places `kind` can be applied to.
pub fn mutation_sites(program: &Program, kind: MutationKind) -> usize {
    let mut copy = program.clone();
    let mut count = 0usize;
    visit(&mut copy, kind, &mut |_| {
        count += 1;
        false
    });
    count
}

/// Visit every site of `kind`; the callback returns true to apply the
/// mutation at the current site.
fn visit(program: &mut Program, kind: MutationKind, take: &mut dyn FnMut(usize) -> bool) {
    let mut index = 0usize;
    match kind {
        MutationKind::ComparisonFlip => for_each_expr_mut(program, &mut |e| {
            if let Expr::Binary { op, .. } = e {
                for &new in flips(*op) {
                    if take(index) {
                        *op = new;
                    }
                    index += 1;
                }
            }
        }),
        MutationKind::ConstantPerturbation => for_each_expr_mut(program, &mut |e| {
            if let Expr::Int(v) = e {
                if take(index) {
                    // bump up for 0 so the literal stays non-negative
                    *v = if *v == 0 { 1 } else { *v - 1 };
                }
                index += 1;
            }
        }),
        MutationKind::RangeOffByOne => for_each_stmt_mut(program, &mut |s| {
            if let Stmt::For { range, .. } = s {
                let bounds: Vec<&mut Expr> = match range {
                    RangeArgs::Stop(e) => alloc::vec![e],
                    RangeArgs::StartStop(a, b) => alloc::vec![a, b],
                };
                for bound in bounds {
                    if take(index) {
                        let old = core::mem::replace(bound, Expr::Int(0));
                        *bound = match old {
                            Expr::Int(v) => Expr::Int(v + 1),
                            other => Expr::binary(BinOp::Add, other.wrapped_for(BinOp::Add.prec()), Expr::Int(1)),
                        };
                    }
                    index += 1;
                }
            }
        }),
    }
}

/// Apply `kind` at a uniformly chosen site, or `None` when it has no site.
pub fn mutate<R: Rng + ?Sized>(program: &Program, kind: MutationKind, rng: &mut R) -> Option<Program> {
    let n = mutation_sites(program, kind);
    if n == 0 {
        return None;
    }
    let target = rng.random_range(0..n);
    let mut out = program.clone();
    visit(&mut out, kind, &mut |i| i == target);
    Some(out)
}

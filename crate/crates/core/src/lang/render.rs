//! Canonical pretty-printer.
//!
//! Output uses 4-space indentation, one statement per line, single spaces
//! around binary operators and after commas, and no blank lines. Function
//! definitions come first, then the top-level statements.

use alloc::string::String;
use core::fmt::Write;

use super::ast::*;

pub fn render(program: &Program) -> String {
    let mut out = String::new();
    for f in &program.functions {
        render_function(&mut out, f);
    }
    render_block(&mut out, &program.body, 0);
    out
}

pub fn render_expr(expr: &Expr) -> String {
    let mut out = String::new();
    expr_into(&mut out, expr, Prec::Cond);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn render_function(out: &mut String, f: &FunctionDef) {
    out.push_str("def ");
    out.push_str(&f.name);
    out.push('(');
    for (i, p) in f.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&p.name);
        if let Some(d) = p.default {
            let _ = write!(out, "={d}");
        }
    }
    out.push_str("):\n");
    render_block(out, &f.body, 1);
}

fn render_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        render_stmt(out, s, depth);
    }
}

fn render_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match stmt {
        Stmt::Assign { target, value } => {
            out.push_str(target);
            out.push_str(" = ");
            expr_into(out, value, Prec::Cond);
            out.push('\n');
        }
        Stmt::AugAssign { target, op, value } => {
            out.push_str(target);
            out.push(' ');
            out.push_str(op.symbol());
            out.push_str("= ");
            expr_into(out, value, Prec::Cond);
            out.push('\n');
        }
        Stmt::If { branches, orelse } => {
            for (i, (cond, body)) in branches.iter().enumerate() {
                if i > 0 {
                    indent(out, depth);
                    out.push_str("elif ");
                } else {
                    out.push_str("if ");
                }
                expr_into(out, cond, Prec::Cond);
                out.push_str(":\n");
                render_block(out, body, depth + 1);
            }
            if let Some(body) = orelse {
                indent(out, depth);
                out.push_str("else:\n");
                render_block(out, body, depth + 1);
            }
        }
        Stmt::While { cond, body } => {
            out.push_str("while ");
            expr_into(out, cond, Prec::Cond);
            out.push_str(":\n");
            render_block(out, body, depth + 1);
        }
        Stmt::For { var, range, body } => {
            out.push_str("for ");
            out.push_str(var);
            out.push_str(" in range(");
            match range {
                RangeArgs::Stop(e) => expr_into(out, e, Prec::Cond),
                RangeArgs::StartStop(a, b) => {
                    expr_into(out, a, Prec::Cond);
                    out.push_str(", ");
                    expr_into(out, b, Prec::Cond);
                }
            }
            out.push_str("):\n");
            render_block(out, body, depth + 1);
        }
        Stmt::Return(None) => out.push_str("return\n"),
        Stmt::Return(Some(e)) => {
            out.push_str("return ");
            expr_into(out, e, Prec::Cond);
            out.push('\n');
        }
        Stmt::Expr(e) => {
            expr_into(out, e, Prec::Cond);
            out.push('\n');
        }
        Stmt::Pass => out.push_str("pass\n"),
    }
}

/// Render `expr` in a context that requires at least `min` binding strength,
/// adding parentheses when the tree would otherwise re-parse differently.
fn expr_into(out: &mut String, expr: &Expr, min: Prec) {
    if expr.prec() < min {
        out.push('(');
        expr_into(out, expr, Prec::Cond);
        out.push(')');
        return;
    }
    match expr {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Str(s) => {
            out.push('"');
            out.push_str(s);
            out.push('"');
        }
        Expr::Bool(true) => out.push_str("True"),
        Expr::Bool(false) => out.push_str("False"),
        Expr::None => out.push_str("None"),
        Expr::Var(name) => out.push_str(name),
        Expr::Binary { op, lhs, rhs } => {
            let p = op.prec();
            // Comparisons do not chain, so both sides must bind tighter.
            let left_min = if op.is_comparison() { next(p) } else { p };
            expr_into(out, lhs, left_min);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            expr_into(out, rhs, next(p));
        }
        Expr::Unary {
            op: UnaryOp::Not,
            operand,
        } => {
            out.push_str("not ");
            expr_into(out, operand, Prec::Not);
        }
        Expr::Unary {
            op: UnaryOp::Neg,
            operand,
        } => {
            out.push('-');
            expr_into(out, operand, Prec::Neg);
        }
        Expr::Cond { then, cond, orelse } => {
            expr_into(out, then, Prec::Or);
            out.push_str(" if ");
            expr_into(out, cond, Prec::Or);
            out.push_str(" else ");
            expr_into(out, orelse, Prec::Cond);
        }
        Expr::Call { callee, args } => {
            match callee {
                Callee::User(name) => out.push_str(name),
                Callee::Api { ns, name } => {
                    out.push_str(ns);
                    out.push('.');
                    out.push_str(name);
                }
                Callee::Print => out.push_str("print"),
                Callee::Input => out.push_str("input"),
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr_into(out, a, Prec::Cond);
            }
            out.push(')');
        }
        Expr::Paren(inner) => {
            out.push('(');
            expr_into(out, inner, Prec::Cond);
            out.push(')');
        }
    }
}

fn next(p: Prec) -> Prec {
    match p {
        Prec::Cond => Prec::Or,
        Prec::Or => Prec::And,
        Prec::And => Prec::Not,
        Prec::Not => Prec::Compare,
        Prec::Compare => Prec::Additive,
        Prec::Additive => Prec::Multiplicative,
        Prec::Multiplicative => Prec::Neg,
        Prec::Neg | Prec::Atom => Prec::Atom,
    }
}

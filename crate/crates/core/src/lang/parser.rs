use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::token::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub expected: String,
    pub found: String,
}

/// Parse a token stream into a validated [`Program`].
///
/// Besides syntax, this checks that function names are unique, that every
/// call targets a defined function with a compatible argument count, and
/// that every variable read is definitely assigned on all paths before it.
pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        calls: Vec::new(),
    };
    let mut program = Program::default();
    let mut defs: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut top = Scope::default();

    while !p.at_end() {
        if p.peek_is(TokenKind::Keyword, "def") {
            let line = p.line();
            let f = p.function_def()?;
            if defs.contains_key(&f.name) {
                return Err(ParseError {
                    line,
                    expected: "unique function name".into(),
                    found: format!("redefinition of `{}`", f.name),
                });
            }
            let required = f.params.iter().filter(|q| q.default.is_none()).count();
            defs.insert(f.name.clone(), (required, f.params.len()));
            program.functions.push(f);
        } else {
            let s = p.statement(&mut top)?;
            program.body.push(s);
        }
    }

    for (name, argc, line) in &p.calls {
        match defs.get(name) {
            None => {
                return Err(ParseError {
                    line: *line,
                    expected: "defined function".into(),
                    found: format!("`{name}`"),
                })
            }
            Some(&(lo, hi)) if *argc < lo || *argc > hi => {
                return Err(ParseError {
                    line: *line,
                    expected: format!("{lo}..={hi} arguments to `{name}`"),
                    found: format!("{argc}"),
                })
            }
            Some(_) => {}
        }
    }
    Ok(program)
}

/// Definite-assignment state for one statement list.
#[derive(Debug, Clone, Default)]
struct Scope {
    vars: BTreeSet<String>,
    /// Control cannot fall through past this point (a `return` was seen).
    done: bool,
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    /// (callee, argument count, line) of user-function calls.
    calls: Vec<(String, usize, usize)>,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + offset)
    }

    fn peek_is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn line(&self) -> usize {
        self.peek().or_else(|| self.toks.last()).map_or(1, |t| t.line)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), |t| t.to_string())
    }

    fn error<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line(),
            expected: expected.into(),
            found: self.found(),
        })
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        if self.peek_is(kind, lexeme) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<(), ParseError> {
        if self.eat(kind, lexeme) {
            Ok(())
        } else {
            self.error(format!("`{lexeme}`"))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Result<&'t Token, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump()),
            _ => self.error(what),
        }
    }

    fn expect_newline(&mut self) -> Result<(), ParseError> {
        self.expect_kind(TokenKind::Newline, "end of line").map(|_| ())
    }

    fn identifier(&mut self) -> Result<String, ParseError> {
        self.expect_kind(TokenKind::Identifier, "identifier")
            .map(|t| t.lexeme.clone())
    }

    fn function_def(&mut self) -> Result<FunctionDef, ParseError> {
        self.expect(TokenKind::Keyword, "def")?;
        let name = self.identifier()?;
        self.expect(TokenKind::Punctuation, "(")?;
        let mut params: Vec<Param> = Vec::new();
        if !self.peek_is(TokenKind::Punctuation, ")") {
            loop {
                let line = self.line();
                let pname = self.identifier()?;
                if params.iter().any(|q| q.name == pname) {
                    return Err(ParseError {
                        line,
                        expected: "distinct parameter names".into(),
                        found: format!("duplicate `{pname}`"),
                    });
                }
                let default = if self.eat(TokenKind::Operator, "=") {
                    let negative = self.eat(TokenKind::Operator, "-");
                    let lit = self.expect_kind(TokenKind::Integer, "integer default")?;
                    let v: i64 = lit.lexeme.parse().expect("lexer checked range");
                    Some(if negative { -v } else { v })
                } else {
                    if params.last().is_some_and(|q| q.default.is_some()) {
                        return self.error("default value (after a defaulted parameter)");
                    }
                    None
                };
                params.push(Param { name: pname, default });
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punctuation, ")")?;
        self.expect(TokenKind::Punctuation, ":")?;
        let mut scope = Scope {
            vars: params.iter().map(|q| q.name.clone()).collect(),
            done: false,
        };
        let body = self.block(&mut scope)?;
        Ok(FunctionDef { name, params, body })
    }

    fn block(&mut self, scope: &mut Scope) -> Result<Vec<Stmt>, ParseError> {
        self.expect_newline()?;
        self.expect_kind(TokenKind::Indent, "indented block")?;
        let mut body = Vec::new();
        while !self.eat(TokenKind::Dedent, "") {
            if self.at_end() {
                return self.error("dedent");
            }
            body.push(self.statement(scope)?);
        }
        Ok(body)
    }

    fn statement(&mut self, scope: &mut Scope) -> Result<Stmt, ParseError> {
        let Some(tok) = self.peek() else {
            return self.error("statement");
        };
        match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Keyword, "if") => self.if_statement(scope),
            (TokenKind::Keyword, "while") => {
                self.bump();
                let cond = self.expr(scope)?;
                self.expect(TokenKind::Punctuation, ":")?;
                let mut inner = scope.clone();
                let body = self.block(&mut inner)?;
                Ok(Stmt::While { cond, body })
            }
            (TokenKind::Keyword, "for") => {
                self.bump();
                let var = self.identifier()?;
                self.expect(TokenKind::Keyword, "in")?;
                self.expect(TokenKind::Keyword, "range")?;
                self.expect(TokenKind::Punctuation, "(")?;
                let first = self.expr(scope)?;
                let range = if self.eat(TokenKind::Punctuation, ",") {
                    RangeArgs::StartStop(first, self.expr(scope)?)
                } else {
                    RangeArgs::Stop(first)
                };
                self.expect(TokenKind::Punctuation, ")")?;
                self.expect(TokenKind::Punctuation, ":")?;
                let mut inner = scope.clone();
                inner.vars.insert(var.clone());
                let body = self.block(&mut inner)?;
                Ok(Stmt::For { var, range, body })
            }
            (TokenKind::Keyword, "pass") => {
                self.bump();
                self.expect_newline()?;
                Ok(Stmt::Pass)
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let value = if self.peek().is_some_and(|t| t.kind == TokenKind::Newline) {
                    None
                } else {
                    Some(self.expr(scope)?)
                };
                self.expect_newline()?;
                scope.done = true;
                Ok(Stmt::Return(value))
            }
            (TokenKind::Identifier, _) => {
                let next = self.peek_at(1);
                let op = next
                    .filter(|t| t.kind == TokenKind::Operator)
                    .map(|t| t.lexeme.as_str());
                match op {
                    Some("=") => {
                        let target = self.identifier()?;
                        self.bump();
                        let value = self.expr(scope)?;
                        self.expect_newline()?;
                        scope.vars.insert(target.clone());
                        Ok(Stmt::Assign { target, value })
                    }
                    Some(aug @ ("+=" | "-=" | "*=")) => {
                        let op = match aug {
                            "+=" => BinOp::Add,
                            "-=" => BinOp::Sub,
                            _ => BinOp::Mul,
                        };
                        self.check_assigned(scope, &tok.lexeme)?;
                        let target = self.identifier()?;
                        self.bump();
                        let value = self.expr(scope)?;
                        self.expect_newline()?;
                        Ok(Stmt::AugAssign { target, op, value })
                    }
                    _ => self.expression_statement(scope),
                }
            }
            (TokenKind::Keyword, "else" | "elif" | "def" | "in" | "range")
            | (TokenKind::Indent | TokenKind::Dedent | TokenKind::Newline, _) => self.error("statement"),
            _ => self.expression_statement(scope),
        }
    }

    fn expression_statement(&mut self, scope: &mut Scope) -> Result<Stmt, ParseError> {
        let e = self.expr(scope)?;
        self.expect_newline()?;
        Ok(Stmt::Expr(e))
    }

    fn if_statement(&mut self, scope: &mut Scope) -> Result<Stmt, ParseError> {
        self.expect(TokenKind::Keyword, "if")?;
        let entry = scope.clone();
        let mut outcomes: Vec<Scope> = Vec::new();
        let mut branches = Vec::new();
        loop {
            let cond = self.expr(&entry)?;
            self.expect(TokenKind::Punctuation, ":")?;
            let mut inner = entry.clone();
            let body = self.block(&mut inner)?;
            outcomes.push(inner);
            branches.push((cond, body));
            if !self.eat(TokenKind::Keyword, "elif") {
                break;
            }
        }
        let orelse = if self.eat(TokenKind::Keyword, "else") {
            self.expect(TokenKind::Punctuation, ":")?;
            let mut inner = entry.clone();
            let body = self.block(&mut inner)?;
            outcomes.push(inner);
            Some(body)
        } else {
            None
        };

        if orelse.is_some() {
            let live: Vec<&Scope> = outcomes.iter().filter(|s| !s.done).collect();
            if live.is_empty() {
                scope.done = true;
            } else {
                let mut vars = live[0].vars.clone();
                for s in &live[1..] {
                    vars.retain(|v| s.vars.contains(v));
                }
                scope.vars = vars;
            }
        }
        Ok(Stmt::If { branches, orelse })
    }

    fn check_assigned(&self, scope: &Scope, name: &str) -> Result<(), ParseError> {
        if scope.vars.contains(name) {
            Ok(())
        } else {
            Err(ParseError {
                line: self.line(),
                expected: "variable assigned on every path".into(),
                found: format!("`{name}`"),
            })
        }
    }

    // expr := or_expr ('if' or_expr 'else' expr)?
    fn expr(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let then = self.or_expr(scope)?;
        if self.eat(TokenKind::Keyword, "if") {
            let cond = self.or_expr(scope)?;
            self.expect(TokenKind::Keyword, "else")?;
            let orelse = self.expr(scope)?;
            return Ok(Expr::Cond {
                then: Box::new(then),
                cond: Box::new(cond),
                orelse: Box::new(orelse),
            });
        }
        Ok(then)
    }

    fn or_expr(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr(scope)?;
        while self.eat(TokenKind::Keyword, "or") {
            let rhs = self.and_expr(scope)?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let mut lhs = self.not_expr(scope)?;
        while self.eat(TokenKind::Keyword, "and") {
            let rhs = self.not_expr(scope)?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        if self.eat(TokenKind::Keyword, "not") {
            let operand = self.not_expr(scope)?;
            return Ok(Expr::Unary {
                op: UnaryOp::Not,
                operand: Box::new(operand),
            });
        }
        self.comparison(scope)
    }

    fn comparison_op(&self) -> Option<BinOp> {
        let t = self.peek().filter(|t| t.kind == TokenKind::Operator)?;
        Some(match t.lexeme.as_str() {
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let lhs = self.additive(scope)?;
        if let Some(op) = self.comparison_op() {
            self.bump();
            let rhs = self.additive(scope)?;
            if self.comparison_op().is_some() {
                return self.error("end of comparison (chained comparisons unsupported)");
            }
            return Ok(Expr::binary(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn additive(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative(scope)?;
        loop {
            let op = if self.eat(TokenKind::Operator, "+") {
                BinOp::Add
            } else if self.eat(TokenKind::Operator, "-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative(scope)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(scope)?;
        loop {
            let op = if self.eat(TokenKind::Operator, "*") {
                BinOp::Mul
            } else if self.eat(TokenKind::Operator, "//") {
                BinOp::FloorDiv
            } else if self.eat(TokenKind::Operator, "%") {
                BinOp::Mod
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary(scope)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        if self.eat(TokenKind::Operator, "-") {
            let operand = self.unary(scope)?;
            return Ok(Expr::Unary {
                op: UnaryOp::Neg,
                operand: Box::new(operand),
            });
        }
        self.primary(scope)
    }

    fn arguments(&mut self, scope: &Scope) -> Result<Vec<Expr>, ParseError> {
        self.expect(TokenKind::Punctuation, "(")?;
        let mut args = Vec::new();
        if !self.eat(TokenKind::Punctuation, ")") {
            loop {
                args.push(self.expr(scope)?);
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
            self.expect(TokenKind::Punctuation, ")")?;
        }
        Ok(args)
    }

    fn primary(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek() else {
            return self.error("expression");
        };
        match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Integer, lit) => {
                self.bump();
                Ok(Expr::Int(lit.parse().expect("lexer checked range")))
            }
            (TokenKind::Str, lit) => {
                self.bump();
                Ok(Expr::Str(lit[1..lit.len() - 1].into()))
            }
            (TokenKind::Keyword, "True") => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            (TokenKind::Keyword, "False") => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            (TokenKind::Keyword, "None") => {
                self.bump();
                Ok(Expr::None)
            }
            (TokenKind::Keyword, "print") => {
                self.bump();
                let args = self.arguments(scope)?;
                Ok(Expr::Call {
                    callee: Callee::Print,
                    args,
                })
            }
            (TokenKind::Keyword, "input") => {
                self.bump();
                self.expect(TokenKind::Punctuation, "(")?;
                self.expect(TokenKind::Punctuation, ")")?;
                Ok(Expr::Call {
                    callee: Callee::Input,
                    args: Vec::new(),
                })
            }
            (TokenKind::Punctuation, "(") => {
                self.bump();
                let inner = self.expr(scope)?;
                self.expect(TokenKind::Punctuation, ")")?;
                Ok(Expr::paren(inner))
            }
            (TokenKind::Identifier, name) => {
                let line = tok.line;
                self.bump();
                if self.eat(TokenKind::Punctuation, ".") {
                    let member = self.identifier()?;
                    let args = self.arguments(scope)?;
                    Ok(Expr::Call {
                        callee: Callee::Api {
                            ns: name.into(),
                            name: member,
                        },
                        args,
                    })
                } else if self.peek_is(TokenKind::Punctuation, "(") {
                    let args = self.arguments(scope)?;
                    self.calls.push((name.into(), args.len(), line));
                    Ok(Expr::Call {
                        callee: Callee::User(name.into()),
                        args,
                    })
                } else {
                    if !scope.vars.contains(name) {
                        return Err(ParseError {
                            line,
                            expected: "variable assigned on every path".into(),
                            found: format!("`{name}`"),
                        });
                    }
                    Ok(Expr::Var(name.into()))
                }
            }
            _ => self.error("expression"),
        }
    }
}

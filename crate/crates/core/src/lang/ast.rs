use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// A parsed MiniPy source file.
///
/// Function definitions are hoisted out of the top-level statement list;
/// rendering emits every `def` first and then the top-level statements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub functions: Vec<FunctionDef>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

/// A formal parameter. Defaults are restricted to integer constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub default: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign {
        target: String,
        value: Expr,
    },
    /// `x += e`, `x -= e`, `x *= e`.
    AugAssign {
        target: String,
        op: BinOp,
        value: Expr,
    },
    /// `if` / `elif` chain with an optional `else`. `branches` is never empty.
    If {
        branches: Vec<(Expr, Vec<Stmt>)>,
        orelse: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        var: String,
        range: RangeArgs,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Expr(Expr),
    Pass,
}

/// Arguments of `range(...)` in a `for` header.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RangeArgs {
    Stop(Expr),
    StartStop(Expr, Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Always non-negative; negative constants are `Unary(Neg, Int)`.
    Int(i64),
    Str(String),
    Bool(bool),
    None,
    Var(String),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    /// `then if cond else orelse`
    Cond {
        then: Box<Expr>,
        cond: Box<Expr>,
        orelse: Box<Expr>,
    },
    Call {
        callee: Callee,
        args: Vec<Expr>,
    },
    /// Source-level parentheses, kept so transforms can emit `(1 == 0)`.
    Paren(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Callee {
    /// A function defined in the program.
    User(String),
    /// A builtin API call `ns.name(...)`.
    Api {
        ns: String,
        name: String,
    },
    Print,
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    FloorDiv,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

/// Binding strength, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prec {
    Cond,
    Or,
    And,
    Not,
    Compare,
    Additive,
    Multiplicative,
    Neg,
    Atom,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn prec(self) -> Prec {
        match self {
            BinOp::Or => Prec::Or,
            BinOp::And => Prec::And,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => Prec::Compare,
            BinOp::Add | BinOp::Sub => Prec::Additive,
            BinOp::Mul | BinOp::FloorDiv | BinOp::Mod => Prec::Multiplicative,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.prec() == Prec::Compare
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self.prec(), Prec::Additive | Prec::Multiplicative)
    }
}

impl Expr {
    /// Integer constant; negative values become a negation node so that
    /// rendering and re-parsing give back the same tree.
    pub fn int(v: i64) -> Expr {
        if v < 0 {
            match v.checked_neg() {
                Some(p) => Expr::Unary {
                    op: UnaryOp::Neg,
                    operand: Box::new(Expr::Int(p)),
                },
                // i64::MIN has no literal form
                None => Expr::Binary {
                    op: BinOp::Sub,
                    lhs: Box::new(Expr::int(v + 1)),
                    rhs: Box::new(Expr::Int(1)),
                },
            }
        } else {
            Expr::Int(v)
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn paren(inner: Expr) -> Expr {
        Expr::Paren(Box::new(inner))
    }

    pub fn print(args: Vec<Expr>) -> Expr {
        Expr::Call {
            callee: Callee::Print,
            args,
        }
    }

    /// `(lhs == rhs)` over two small constants, the tautology / contradiction
    /// shape used by dead-code insertions.
    pub fn const_compare(lhs: i64, rhs: i64) -> Expr {
        Expr::paren(Expr::binary(BinOp::Eq, Expr::Int(lhs), Expr::Int(rhs)))
    }

    pub fn prec(&self) -> Prec {
        match self {
            Expr::Binary { op, .. } => op.prec(),
            Expr::Unary { op: UnaryOp::Not, .. } => Prec::Not,
            Expr::Unary { op: UnaryOp::Neg, .. } => Prec::Neg,
            Expr::Cond { .. } => Prec::Cond,
            _ => Prec::Atom,
        }
    }

    /// Wrap in explicit parentheses when the expression binds looser than `min`.
    pub fn wrapped_for(self, min: Prec) -> Expr {
        if self.prec() < min {
            Expr::paren(self)
        } else {
            self
        }
    }

    /// Visit this expression and every sub-expression, pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Unary { operand, .. } => operand.walk(f),
            Expr::Cond { then, cond, orelse } => {
                then.walk(f);
                cond.walk(f);
                orelse.walk(f);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            Expr::Paren(inner) => inner.walk(f),
            _ => {}
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        f(self);
        match self {
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk_mut(f);
                rhs.walk_mut(f);
            }
            Expr::Unary { operand, .. } => operand.walk_mut(f),
            Expr::Cond { then, cond, orelse } => {
                then.walk_mut(f);
                cond.walk_mut(f);
                orelse.walk_mut(f);
            }
            Expr::Call { args, .. } => args.iter_mut().for_each(|a| a.walk_mut(f)),
            Expr::Paren(inner) => inner.walk_mut(f),
            _ => {}
        }
    }
}

impl Stmt {
    /// Expressions appearing directly in this statement (not in nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Stmt::Assign { value, .. } | Stmt::AugAssign { value, .. } => alloc::vec![value],
            Stmt::If { branches, .. } => branches.iter().map(|(c, _)| c).collect(),
            Stmt::While { cond, .. } => alloc::vec![cond],
            Stmt::For { range, .. } => match range {
                RangeArgs::Stop(e) => alloc::vec![e],
                RangeArgs::StartStop(a, b) => alloc::vec![a, b],
            },
            Stmt::Return(Some(e)) | Stmt::Expr(e) => alloc::vec![e],
            Stmt::Return(None) | Stmt::Pass => Vec::new(),
        }
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Stmt::Assign { value, .. } | Stmt::AugAssign { value, .. } => alloc::vec![value],
            Stmt::If { branches, .. } => branches.iter_mut().map(|(c, _)| c).collect(),
            Stmt::While { cond, .. } => alloc::vec![cond],
            Stmt::For { range, .. } => match range {
                RangeArgs::Stop(e) => alloc::vec![e],
                RangeArgs::StartStop(a, b) => alloc::vec![a, b],
            },
            Stmt::Return(Some(e)) | Stmt::Expr(e) => alloc::vec![e],
            Stmt::Return(None) | Stmt::Pass => Vec::new(),
        }
    }

    /// Nested statement blocks of a compound statement.
    pub fn blocks(&self) -> Vec<&Vec<Stmt>> {
        match self {
            Stmt::If { branches, orelse } => {
                let mut out: Vec<&Vec<Stmt>> = branches.iter().map(|(_, b)| b).collect();
                if let Some(e) = orelse {
                    out.push(e);
                }
                out
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } => alloc::vec![body],
            _ => Vec::new(),
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Vec<Stmt>> {
        match self {
            Stmt::If { branches, orelse } => {
                let mut out: Vec<&mut Vec<Stmt>> = branches.iter_mut().map(|(_, b)| b).collect();
                if let Some(e) = orelse {
                    out.push(e);
                }
                out
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } => alloc::vec![body],
            _ => Vec::new(),
        }
    }
}

/// Pre-order walk over a statement list, descending into nested blocks.
pub fn walk_stmts<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        for b in s.blocks() {
            walk_stmts(b, f);
        }
    }
}

pub fn walk_stmts_mut(stmts: &mut [Stmt], f: &mut dyn FnMut(&mut Stmt)) {
    for s in stmts.iter_mut() {
        f(s);
        for b in s.blocks_mut() {
            walk_stmts_mut(b, f);
        }
    }
}

/// Every expression (and sub-expression) in a statement list.
pub fn walk_exprs<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Expr)) {
    walk_stmts(stmts, &mut |s| {
        for e in s.exprs() {
            e.walk(f);
        }
    });
}

pub fn walk_exprs_mut(stmts: &mut [Stmt], f: &mut dyn FnMut(&mut Expr)) {
    walk_stmts_mut(stmts, &mut |s| {
        for e in s.exprs_mut() {
            e.walk_mut(f);
        }
    });
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// All statement lists that are a function body or the top level:
    /// index 0..n are function bodies in order, n is the top level.
    pub fn scope_bodies(&self) -> Vec<&Vec<Stmt>> {
        let mut v: Vec<&Vec<Stmt>> = self.functions.iter().map(|f| &f.body).collect();
        v.push(&self.body);
        v
    }

    pub fn scope_body_mut(&mut self, index: usize) -> &mut Vec<Stmt> {
        if index < self.functions.len() {
            &mut self.functions[index].body
        } else {
            &mut self.body
        }
    }
}

//! Deterministic tree-walking interpreter, used as the semantic oracle.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;

/// Default budget of executed statements.
pub const DEFAULT_STEP_LIMIT: u64 = 100_000;

/// Nested user-function calls allowed before a `CallDepth` runtime error.
pub const MAX_CALL_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
    None,
}

impl Value {
    pub fn truthy(&self) -> bool {
        match self {
            Value::Int(v) => *v != 0,
            Value::Str(s) => !s.is_empty(),
            Value::Bool(b) => *b,
            Value::None => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::None => f.write_str("None"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuntimeErrorKind {
    DivisionByZero,
    TypeMismatch,
    InputExhausted,
    UnknownName,
    Overflow,
    /// Wrong number of arguments to a builtin API function.
    Arity,
    CallDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ok,
    RuntimeError(RuntimeErrorKind),
    StepLimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    pub printed: Vec<String>,
    /// Value of a top-level `return`, if one executed.
    pub returned: Option<Value>,
    pub steps_used: u64,
    pub outcome: Outcome,
}

impl ExecResult {
    /// The observable behaviour compared by the semantic-preservation oracle.
    pub fn observable(&self) -> (&[String], Option<&Value>, bool) {
        (&self.printed, self.returned.as_ref(), self.outcome == Outcome::Ok)
    }
}

/// Signature and reference semantics of one builtin API function.
pub struct ApiFunction {
    pub name: &'static str,
    pub arity: usize,
    pub eval: fn(&[i64]) -> Option<i64>,
}

/// The builtin `api.*` table. `None` from `eval` signals overflow.
pub const API_FUNCTIONS: &[ApiFunction] = &[
    ApiFunction {
        name: "add",
        arity: 2,
        eval: |a| a[0].checked_add(a[1]),
    },
    ApiFunction {
        name: "delete",
        arity: 2,
        eval: |a| a[0].checked_sub(a[1]),
    },
    ApiFunction {
        name: "sub",
        arity: 2,
        eval: |a| a[0].checked_sub(a[1]),
    },
    ApiFunction {
        name: "minus",
        arity: 2,
        eval: |a| a[0].checked_sub(a[1]),
    },
    ApiFunction {
        name: "mul",
        arity: 2,
        eval: |a| a[0].checked_mul(a[1]),
    },
    ApiFunction {
        name: "times",
        arity: 2,
        eval: |a| a[0].checked_mul(a[1]),
    },
    ApiFunction {
        name: "max",
        arity: 2,
        eval: |a| Some(a[0].max(a[1])),
    },
    ApiFunction {
        name: "larger",
        arity: 2,
        eval: |a| Some(a[0].max(a[1])),
    },
    ApiFunction {
        name: "min",
        arity: 2,
        eval: |a| Some(a[0].min(a[1])),
    },
    ApiFunction {
        name: "smaller",
        arity: 2,
        eval: |a| Some(a[0].min(a[1])),
    },
    ApiFunction {
        name: "abs",
        arity: 1,
        eval: |a| a[0].checked_abs(),
    },
    ApiFunction {
        name: "magnitude",
        arity: 1,
        eval: |a| a[0].checked_abs(),
    },
];

pub const API_NAMESPACE: &str = "api";

pub fn api_function(ns: &str, name: &str) -> Option<&'static ApiFunction> {
    if ns != API_NAMESPACE {
        return None;
    }
    API_FUNCTIONS.iter().find(|f| f.name == name)
}

enum Halt {
    Error(RuntimeErrorKind),
    StepLimit,
}

impl From<RuntimeErrorKind> for Halt {
    fn from(k: RuntimeErrorKind) -> Self {
        Halt::Error(k)
    }
}

enum Flow {
    Normal,
    Return(Value),
}

struct Machine<'p> {
    program: &'p Program,
    inputs: &'p [i64],
    next_input: usize,
    printed: Vec<String>,
    steps: u64,
    limit: u64,
    depth: usize,
}

type Frame = BTreeMap<String, Value>;

/// Run `program` on `inputs`, executing at most `step_limit` statements.
///
/// `input()` consumes `inputs` left to right. Errors and the step limit are
/// reported through [`ExecResult::outcome`]; whatever was printed before the
/// halt is kept.
pub fn interpret(program: &Program, inputs: &[i64], step_limit: u64) -> ExecResult {
    let mut m = Machine {
        program,
        inputs,
        next_input: 0,
        printed: Vec::new(),
        steps: 0,
        limit: step_limit.max(1),
        depth: 0,
    };
    let mut frame = Frame::new();
    let (returned, outcome) = match m.block(&program.body, &mut frame) {
        Ok(Flow::Normal) => (None, Outcome::Ok),
        Ok(Flow::Return(v)) => (Some(v), Outcome::Ok),
        Err(Halt::Error(k)) => (None, Outcome::RuntimeError(k)),
        Err(Halt::StepLimit) => (None, Outcome::StepLimitExceeded),
    };
    ExecResult {
        printed: m.printed,
        returned,
        steps_used: m.steps,
        outcome,
    }
}

impl<'p> Machine<'p> {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.steps >= self.limit {
            return Err(Halt::StepLimit);
        }
        self.steps += 1;
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt], frame: &mut Frame) -> Result<Flow, Halt> {
        for s in stmts {
            if let Flow::Return(v) = self.stmt(s, frame)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, stmt: &Stmt, frame: &mut Frame) -> Result<Flow, Halt> {
        self.tick()?;
        match stmt {
            Stmt::Assign { target, value } => {
                let v = self.eval(value, frame)?;
                frame.insert(target.clone(), v);
            }
            Stmt::AugAssign { target, op, value } => {
                let current = frame.get(target).cloned().ok_or(RuntimeErrorKind::UnknownName)?;
                let rhs = self.eval(value, frame)?;
                let v = arith(*op, &current, &rhs)?;
                frame.insert(target.clone(), v);
            }
            Stmt::If { branches, orelse } => {
                for (cond, body) in branches {
                    if self.eval(cond, frame)?.truthy() {
                        return self.block(body, frame);
                    }
                }
                if let Some(body) = orelse {
                    return self.block(body, frame);
                }
            }
            Stmt::While { cond, body } => {
                while self.eval(cond, frame)?.truthy() {
                    if body.is_empty() {
                        self.tick()?;
                    }
                    if let Flow::Return(v) = self.block(body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            Stmt::For { var, range, body } => {
                let (start, stop) = match range {
                    RangeArgs::Stop(e) => (0, self.int(e, frame)?),
                    RangeArgs::StartStop(a, b) => (self.int(a, frame)?, self.int(b, frame)?),
                };
                let mut i = start;
                while i < stop {
                    frame.insert(var.clone(), Value::Int(i));
                    if body.is_empty() {
                        self.tick()?;
                    }
                    if let Flow::Return(v) = self.block(body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                    i += 1;
                }
            }
            Stmt::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e, frame)?,
                    None => Value::None,
                };
                return Ok(Flow::Return(v));
            }
            Stmt::Expr(e) => {
                self.eval(e, frame)?;
            }
            Stmt::Pass => {}
        }
        Ok(Flow::Normal)
    }

    fn int(&mut self, e: &Expr, frame: &mut Frame) -> Result<i64, Halt> {
        match self.eval(e, frame)? {
            Value::Int(v) => Ok(v),
            _ => Err(RuntimeErrorKind::TypeMismatch.into()),
        }
    }

    fn eval(&mut self, e: &Expr, frame: &mut Frame) -> Result<Value, Halt> {
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::None => Value::None,
            Expr::Var(name) => frame.get(name).cloned().ok_or(RuntimeErrorKind::UnknownName)?,
            Expr::Paren(inner) => self.eval(inner, frame)?,
            Expr::Binary {
                op: BinOp::And,
                lhs,
                rhs,
            } => {
                let l = self.eval(lhs, frame)?;
                if l.truthy() {
                    self.eval(rhs, frame)?
                } else {
                    l
                }
            }
            Expr::Binary {
                op: BinOp::Or,
                lhs,
                rhs,
            } => {
                let l = self.eval(lhs, frame)?;
                if l.truthy() {
                    l
                } else {
                    self.eval(rhs, frame)?
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, frame)?;
                let r = self.eval(rhs, frame)?;
                if op.is_comparison() {
                    compare(*op, &l, &r)?
                } else {
                    arith(*op, &l, &r)?
                }
            }
            Expr::Unary {
                op: UnaryOp::Not,
                operand,
            } => Value::Bool(!self.eval(operand, frame)?.truthy()),
            Expr::Unary {
                op: UnaryOp::Neg,
                operand,
            } => match self.eval(operand, frame)? {
                Value::Int(v) => Value::Int(v.checked_neg().ok_or(RuntimeErrorKind::Overflow)?),
                _ => return Err(RuntimeErrorKind::TypeMismatch.into()),
            },
            Expr::Cond { then, cond, orelse } => {
                if self.eval(cond, frame)?.truthy() {
                    self.eval(then, frame)?
                } else {
                    self.eval(orelse, frame)?
                }
            }
            Expr::Call { callee, args } => self.call(callee, args, frame)?,
        })
    }

    fn call(&mut self, callee: &Callee, args: &[Expr], frame: &mut Frame) -> Result<Value, Halt> {
        match callee {
            Callee::Print => {
                let mut line = String::new();
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        line.push(' ');
                    }
                    let v = self.eval(a, frame)?;
                    let _ = fmt::Write::write_fmt(&mut line, format_args!("{v}"));
                }
                self.printed.push(line);
                Ok(Value::None)
            }
            Callee::Input => {
                let v = self
                    .inputs
                    .get(self.next_input)
                    .copied()
                    .ok_or(RuntimeErrorKind::InputExhausted)?;
                self.next_input += 1;
                Ok(Value::Int(v))
            }
            Callee::Api { ns, name } => {
                let f = api_function(ns, name).ok_or(RuntimeErrorKind::UnknownName)?;
                if args.len() != f.arity {
                    return Err(RuntimeErrorKind::Arity.into());
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.int(a, frame)?);
                }
                Ok(Value::Int((f.eval)(&vals).ok_or(RuntimeErrorKind::Overflow)?))
            }
            Callee::User(name) => {
                let program = self.program;
                let f = program.function(name).ok_or(RuntimeErrorKind::UnknownName)?;
                if args.len() > f.params.len() {
                    return Err(RuntimeErrorKind::Arity.into());
                }
                let mut callee_frame = Frame::new();
                for (i, p) in f.params.iter().enumerate() {
                    let v = match (args.get(i), p.default) {
                        (Some(a), _) => self.eval(a, frame)?,
                        (None, Some(d)) => Value::Int(d),
                        (None, None) => return Err(RuntimeErrorKind::Arity.into()),
                    };
                    callee_frame.insert(p.name.clone(), v);
                }
                if self.depth >= MAX_CALL_DEPTH {
                    return Err(RuntimeErrorKind::CallDepth.into());
                }
                self.depth += 1;
                let flow = self.block(&f.body, &mut callee_frame);
                self.depth -= 1;
                Ok(match flow? {
                    Flow::Return(v) => v,
                    Flow::Normal => Value::None,
                })
            }
        }
    }
}

fn arith(op: BinOp, l: &Value, r: &Value) -> Result<Value, Halt> {
    let (Value::Int(a), Value::Int(b)) = (l, r) else {
        return Err(RuntimeErrorKind::TypeMismatch.into());
    };
    let (a, b) = (*a, *b);
    let v = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::FloorDiv | BinOp::Mod => {
            if b == 0 {
                return Err(RuntimeErrorKind::DivisionByZero.into());
            }
            let q = a.checked_div(b).ok_or(RuntimeErrorKind::Overflow)?;
            let r = a - q * b;
            // Round the quotient toward negative infinity.
            let (q, r) = if r != 0 && ((r < 0) != (b < 0)) {
                (q - 1, r + b)
            } else {
                (q, r)
            };
            Some(if op == BinOp::FloorDiv { q } else { r })
        }
        _ => return Err(RuntimeErrorKind::TypeMismatch.into()),
    };
    v.map(Value::Int).ok_or_else(|| RuntimeErrorKind::Overflow.into())
}

fn compare(op: BinOp, l: &Value, r: &Value) -> Result<Value, Halt> {
    let b = match op {
        BinOp::Eq => l == r,
        BinOp::Ne => l != r,
        _ => {
            let (Value::Int(a), Value::Int(b)) = (l, r) else {
                return Err(RuntimeErrorKind::TypeMismatch.into());
            };
            match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Gt => a > b,
                _ => a >= b,
            }
        }
    };
    Ok(Value::Bool(b))
}

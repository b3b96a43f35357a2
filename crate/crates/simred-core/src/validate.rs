//! Static validation: name resolution, scoping, and type checking.
//!
//! Validation runs before every launch (and is available standalone). It
//! never executes the program; it walks the body once, tracking declared
//! variables per scope and inferring every expression's element type.
//! Element types never mix: an `Int` flag multiplying an `F32` value must go
//! through an explicit cast.

use std::collections::HashMap;
use std::fmt;

use crate::ir::{BinOp, Expr, Instr, Program, UnaryOp};
use crate::scalar::ElemType;

/// A single validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two parameters or local arrays share a name.
    DuplicateName { name: String },
    /// A variable is used (read, assigned, or shuffled) without a `Let` or
    /// scalar-parameter declaration in scope.
    UndeclaredVar { name: String },
    /// A `Let` re-declares a name already visible in scope.
    RedeclaredVar { name: String },
    /// A load or store names a buffer the program does not declare.
    UndeclaredBuffer { name: String },
    /// A load or store names a local array the program does not declare.
    UndeclaredLocal { name: String },
    /// A store targets a read-only buffer.
    StoreToReadOnly { buffer: String },
    /// Operand or assignment types disagree.
    TypeMismatch {
        context: String,
        expected: ElemType,
        found: ElemType,
    },
    /// An `Int`-only operator (bitwise, shift, `Mod`, `Not`) was applied to
    /// a float operand.
    IntOnlyOp { op: String, found: ElemType },
    /// A memory address expression is not `Int`-typed.
    NonIntIndex { context: String, found: ElemType },
    /// An `If`/`While` condition is not `Int`-typed.
    NonIntCondition { context: String, found: ElemType },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName { name } => write!(f, "duplicate declaration `{name}`"),
            Violation::UndeclaredVar { name } => write!(f, "undeclared variable `{name}`"),
            Violation::RedeclaredVar { name } => write!(f, "`{name}` re-declared while in scope"),
            Violation::UndeclaredBuffer { name } => write!(f, "undeclared buffer `{name}`"),
            Violation::UndeclaredLocal { name } => write!(f, "undeclared local array `{name}`"),
            Violation::StoreToReadOnly { buffer } => {
                write!(f, "store to read-only buffer `{buffer}`")
            }
            Violation::TypeMismatch { context, expected, found } => {
                write!(f, "type mismatch in {context}: expected {expected}, found {found}")
            }
            Violation::IntOnlyOp { op, found } => {
                write!(f, "operator `{op}` requires int operands, found {found}")
            }
            Violation::NonIntIndex { context, found } => {
                write!(f, "address in {context} must be int, found {found}")
            }
            Violation::NonIntCondition { context, found } => {
                write!(f, "condition of {context} must be int, found {found}")
            }
        }
    }
}

/// Every violation found in a program. An empty report means the program is
/// well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "no violations");
        }
        write!(f, "{} violation(s): ", self.violations.len())?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

struct Checker<'p> {
    buffers: HashMap<&'p str, (ElemType, bool)>,
    locals: HashMap<&'p str, ElemType>,
    /// Scope stack; the outermost frame holds scalar parameters.
    scopes: Vec<HashMap<String, ElemType>>,
    violations: Vec<Violation>,
}

impl<'p> Checker<'p> {
    fn lookup_var(&self, name: &str) -> Option<ElemType> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    /// Infer an expression's type, recording violations. `None` means the
    /// type could not be determined because of an earlier violation.
    fn check_expr(&mut self, e: &Expr) -> Option<ElemType> {
        match e {
            Expr::Const(s) => Some(s.elem_type()),
            Expr::Builtin(_) => Some(ElemType::Int),
            Expr::Var(name) => {
                let t = self.lookup_var(name);
                if t.is_none() {
                    self.violations.push(Violation::UndeclaredVar { name: name.clone() });
                }
                t
            }
            Expr::LoadGlobal(name, idx) => {
                self.check_index(idx, &format!("load of `{name}`"));
                match self.buffers.get(name.as_str()) {
                    Some(&(t, _)) => Some(t),
                    None => {
                        self.violations.push(Violation::UndeclaredBuffer { name: name.clone() });
                        None
                    }
                }
            }
            Expr::LoadLocal(name, idx) => {
                self.check_index(idx, &format!("load of local `{name}`"));
                match self.locals.get(name.as_str()) {
                    Some(&t) => Some(t),
                    None => {
                        self.violations.push(Violation::UndeclaredLocal { name: name.clone() });
                        None
                    }
                }
            }
            Expr::ShflDown(name, _) => {
                let t = self.lookup_var(name);
                if t.is_none() {
                    self.violations.push(Violation::UndeclaredVar { name: name.clone() });
                }
                t
            }
            Expr::Unary(op, a) => {
                let t = self.check_expr(a)?;
                match op {
                    UnaryOp::Neg => Some(t),
                    UnaryOp::Not => {
                        if t != ElemType::Int {
                            self.violations.push(Violation::IntOnlyOp {
                                op: "not".to_string(),
                                found: t,
                            });
                            None
                        } else {
                            Some(ElemType::Int)
                        }
                    }
                    UnaryOp::Cast(target) => Some(*target),
                }
            }
            Expr::Binary(op, a, b) => {
                let ta = self.check_expr(a);
                let tb = self.check_expr(b);
                let (ta, tb) = (ta?, tb?);
                if ta != tb {
                    self.violations.push(Violation::TypeMismatch {
                        context: format!("binary `{op:?}`"),
                        expected: ta,
                        found: tb,
                    });
                    return None;
                }
                match op {
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => {
                        Some(ElemType::Int)
                    }
                    BinOp::And | BinOp::Or | BinOp::Xor | BinOp::Shl | BinOp::Shr | BinOp::Mod => {
                        if ta != ElemType::Int {
                            self.violations.push(Violation::IntOnlyOp {
                                op: format!("{op:?}").to_lowercase(),
                                found: ta,
                            });
                            None
                        } else {
                            Some(ElemType::Int)
                        }
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Min | BinOp::Max => {
                        Some(ta)
                    }
                }
            }
        }
    }

    fn check_index(&mut self, idx: &Expr, context: &str) {
        if let Some(t) = self.check_expr(idx) {
            if t != ElemType::Int {
                self.violations.push(Violation::NonIntIndex {
                    context: context.to_string(),
                    found: t,
                });
            }
        }
    }

    fn check_block(&mut self, block: &[Instr]) {
        self.scopes.push(HashMap::new());
        for instr in block {
            self.check_instr(instr);
        }
        self.scopes.pop();
    }

    fn check_instr(&mut self, instr: &Instr) {
        match instr {
            Instr::Let(name, init) => {
                let t = self.check_expr(init);
                if self.lookup_var(name).is_some() {
                    self.violations.push(Violation::RedeclaredVar { name: name.clone() });
                    return;
                }
                // Record the variable even when its initialiser failed so a
                // single bug does not cascade into undeclared-var noise; an
                // unknown type defaults to Int for later checks.
                let t = t.unwrap_or(ElemType::Int);
                self.scopes.last_mut().unwrap().insert(name.clone(), t);
            }
            Instr::Assign(name, value) => {
                let tv = self.check_expr(value);
                match self.lookup_var(name) {
                    None => {
                        self.violations.push(Violation::UndeclaredVar { name: name.clone() });
                    }
                    Some(tvar) => {
                        if let Some(tv) = tv {
                            if tv != tvar {
                                self.violations.push(Violation::TypeMismatch {
                                    context: format!("assignment to `{name}`"),
                                    expected: tvar,
                                    found: tv,
                                });
                            }
                        }
                    }
                }
            }
            Instr::StoreGlobal(name, idx, value) => {
                self.check_index(idx, &format!("store to `{name}`"));
                let tv = self.check_expr(value);
                match self.buffers.get(name.as_str()) {
                    None => {
                        self.violations.push(Violation::UndeclaredBuffer { name: name.clone() });
                    }
                    Some(&(t, writable)) => {
                        if !writable {
                            self.violations.push(Violation::StoreToReadOnly {
                                buffer: name.clone(),
                            });
                        }
                        if let Some(tv) = tv {
                            if tv != t {
                                self.violations.push(Violation::TypeMismatch {
                                    context: format!("store to `{name}`"),
                                    expected: t,
                                    found: tv,
                                });
                            }
                        }
                    }
                }
            }
            Instr::StoreLocal(name, idx, value) => {
                self.check_index(idx, &format!("store to local `{name}`"));
                let tv = self.check_expr(value);
                match self.locals.get(name.as_str()) {
                    None => {
                        self.violations.push(Violation::UndeclaredLocal { name: name.clone() });
                    }
                    Some(&t) => {
                        if let Some(tv) = tv {
                            if tv != t {
                                self.violations.push(Violation::TypeMismatch {
                                    context: format!("store to local `{name}`"),
                                    expected: t,
                                    found: tv,
                                });
                            }
                        }
                    }
                }
            }
            Instr::Barrier => {}
            Instr::If(cond, then, otherwise) => {
                if let Some(t) = self.check_expr(cond) {
                    if t != ElemType::Int {
                        self.violations.push(Violation::NonIntCondition {
                            context: "if".to_string(),
                            found: t,
                        });
                    }
                }
                self.check_block(then);
                self.check_block(otherwise);
            }
            Instr::While(cond, body) => {
                if let Some(t) = self.check_expr(cond) {
                    if t != ElemType::Int {
                        self.violations.push(Violation::NonIntCondition {
                            context: "while".to_string(),
                            found: t,
                        });
                    }
                }
                self.check_block(body);
            }
        }
    }
}

/// Validate a program: every name resolves, scoping is respected, no
/// expression mixes element types, addresses and conditions are `Int`, and
/// stores only target writable buffers.
pub fn validate_program(program: &Program) -> ValidationReport {
    let mut violations = Vec::new();

    let mut buffers = HashMap::new();
    for p in &program.buffers {
        if buffers.insert(p.name.as_str(), (p.elem, p.writable)).is_some() {
            violations.push(Violation::DuplicateName { name: p.name.clone() });
        }
    }
    let mut locals = HashMap::new();
    for a in &program.local_arrays {
        if locals.insert(a.name.as_str(), a.elem).is_some() {
            violations.push(Violation::DuplicateName { name: a.name.clone() });
        }
    }
    let mut params = HashMap::new();
    for s in &program.scalars {
        if params.insert(s.name.clone(), s.elem).is_some() {
            violations.push(Violation::DuplicateName { name: s.name.clone() });
        }
    }

    let mut checker = Checker {
        buffers,
        locals,
        scopes: vec![params],
        violations,
    };
    checker.check_block(&program.body);
    ValidationReport {
        violations: checker.violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::dsl::*;
    use crate::ir::{BufferParam, LocalArray, Program, ScalarParam};
    use crate::scalar::Scalar;

    fn skeleton(body: Vec<Instr>) -> Program {
        Program {
            name: "t".to_string(),
            buffers: vec![
                BufferParam { name: "input".into(), elem: ElemType::Int, writable: false },
                BufferParam { name: "output".into(), elem: ElemType::Int, writable: true },
            ],
            scalars: vec![ScalarParam { name: "length".into(), elem: ElemType::Int }],
            local_arrays: vec![LocalArray { name: "scratch".into(), elem: ElemType::Int, len: 64 }],
            body,
        }
    }

    #[test]
    fn well_formed_program_passes() {
        let p = skeleton(vec![
            let_("x", load("input", global_id())),
            if_(
                v("x").lt(v("length")),
                vec![store("output", global_id(), v("x") + ci(1))],
                vec![],
            ),
        ]);
        let report = validate_program(&p);
        assert!(report.ok(), "{report}");
    }

    #[test]
    fn store_to_undeclared_buffer_is_reported() {
        let p = skeleton(vec![store("xs", ci(0), ci(1))]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .contains(&Violation::UndeclaredBuffer { name: "xs".into() }));
    }

    #[test]
    fn store_to_read_only_buffer_is_reported() {
        let p = skeleton(vec![store("input", ci(0), ci(1))]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .contains(&Violation::StoreToReadOnly { buffer: "input".into() }));
    }

    #[test]
    fn mixed_type_arithmetic_is_reported() {
        let p = skeleton(vec![let_("x", ci(1) + cs(Scalar::F32(1.0)))]);
        let report = validate_program(&p);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::TypeMismatch { .. }]
        ));
    }

    #[test]
    fn float_address_is_reported() {
        let p = skeleton(vec![let_("x", load("input", cs(Scalar::F64(0.0))))]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonIntIndex { .. })));
    }

    #[test]
    fn float_condition_is_reported() {
        let p = skeleton(vec![if_(cs(Scalar::F32(1.0)), vec![], vec![])]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonIntCondition { .. })));
    }

    #[test]
    fn undeclared_and_redeclared_variables_are_reported() {
        let p = skeleton(vec![
            assign("ghost", ci(1)),
            let_("x", ci(0)),
            let_("x", ci(1)),
        ]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .contains(&Violation::UndeclaredVar { name: "ghost".into() }));
        assert!(report
            .violations
            .contains(&Violation::RedeclaredVar { name: "x".into() }));
    }

    #[test]
    fn let_scope_ends_with_its_block() {
        // `y` is declared inside the if-body and used outside it.
        let p = skeleton(vec![
            if_(ci(1), vec![let_("y", ci(2))], vec![]),
            let_("z", v("y")),
        ]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .contains(&Violation::UndeclaredVar { name: "y".into() }));
    }

    #[test]
    fn bitwise_ops_require_int() {
        let p = skeleton(vec![let_(
            "x",
            cs(Scalar::F32(1.0)).xor(cs(Scalar::F32(2.0))),
        )]);
        let report = validate_program(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::IntOnlyOp { .. })));
    }

    #[test]
    fn comparison_results_are_int_and_usable_as_addresses() {
        let p = skeleton(vec![let_(
            "x",
            load("input", v("length").lt(ci(10))),
        )]);
        let report = validate_program(&p);
        assert!(report.ok(), "{report}");
    }
}

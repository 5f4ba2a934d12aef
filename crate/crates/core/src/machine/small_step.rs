use std::fmt;

use super::{compare, Env, MachineError, MachineState};
use crate::lang::{CmpOp, ComAst, ExpAst, Pos};
use crate::value::Value;

/// Entries of the control stack. `Com` and `Exp` are pending work; the other
/// frames consume values that expressions leave on the operand stack.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame<'p> {
    Com(&'p ComAst),
    Exp(&'p ExpAst),
    Bind { name: &'p str, at: Pos },
    Compare { op: CmpOp, at: Pos },
    Branch { then: &'p ComAst, otherwise: Option<&'p ComAst>, at: Pos },
    Output,
}

/// Names of the transitions, one per AST constructor plus one per
/// value-consuming frame. The names appear in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Skip,
    Seq,
    AssignPush,
    Assign,
    IfPush,
    IfTrue,
    IfFalse,
    EmitPush,
    Emit,
    Lit,
    Ident,
    Read,
    Content,
    CmpPush,
    Cmp,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Skip => "skip",
            Rule::Seq => "seq",
            Rule::AssignPush => "assign-push",
            Rule::Assign => "assign",
            Rule::IfPush => "if-push",
            Rule::IfTrue => "if-true",
            Rule::IfFalse => "if-false",
            Rule::EmitPush => "emit-push",
            Rule::Emit => "emit",
            Rule::Lit => "lit",
            Rule::Ident => "ident",
            Rule::Read => "read",
            Rule::Content => "content",
            Rule::CmpPush => "cmp-push",
            Rule::Cmp => "cmp",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig<'p> {
    /// Top of stack is the last element.
    pub control: Vec<Frame<'p>>,
    pub operands: Vec<Value>,
    pub state: MachineState,
}

impl<'p> MachineConfig<'p> {
    pub fn new(program: &'p ComAst, state: MachineState) -> Self {
        MachineConfig { control: vec![Frame::Com(program)], operands: Vec::new(), state }
    }

    pub fn is_halted(&self) -> bool {
        self.control.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step<'p> {
    Running { cfg: MachineConfig<'p>, rule: Rule },
    /// `rule` is the transition that emptied the control stack, or `None`
    /// when the stack was already empty.
    Halted { state: MachineState, rule: Option<Rule> },
}

/// Performs exactly one transition.
pub fn step<'p>(cfg: MachineConfig<'p>, env: &Env<'_>) -> Result<Step<'p>, MachineError> {
    let MachineConfig { mut control, mut operands, mut state } = cfg;
    let Some(top) = control.pop() else {
        return Ok(Step::Halted { state, rule: None });
    };
    let rule = match top {
        Frame::Com(ComAst::Skip) => Rule::Skip,
        Frame::Com(ComAst::Seq(first, rest)) => {
            control.push(Frame::Com(rest));
            control.push(Frame::Com(first));
            Rule::Seq
        }
        Frame::Com(ComAst::Assign { name, value, at }) => {
            control.push(Frame::Bind { name, at: *at });
            control.push(Frame::Exp(value));
            Rule::AssignPush
        }
        Frame::Com(ComAst::If { cond, then, otherwise, at }) => {
            control.push(Frame::Branch { then, otherwise: otherwise.as_deref(), at: *at });
            control.push(Frame::Exp(cond));
            Rule::IfPush
        }
        Frame::Com(ComAst::Emit { value, .. }) => {
            control.push(Frame::Output);
            control.push(Frame::Exp(value));
            Rule::EmitPush
        }
        Frame::Exp(ExpAst::Lit { value, .. }) => {
            operands.push(value.clone().into());
            Rule::Lit
        }
        Frame::Exp(ExpAst::Ident { name, at }) => {
            match state.memory.get(name) {
                Some(v) => operands.push(v.clone()),
                None => return Err(MachineError::unbound(name, *at, state)),
            }
            Rule::Ident
        }
        Frame::Exp(ExpAst::Read { at }) => {
            match state.input.pop_front() {
                Some(v) => operands.push(v),
                None => return Err(MachineError::input_exhausted(*at, state)),
            }
            Rule::Read
        }
        Frame::Exp(ExpAst::ContentRef { path, at }) => {
            operands.push(env.content(path, *at, &state)?);
            Rule::Content
        }
        Frame::Exp(ExpAst::Cmp { op, lhs, rhs, at }) => {
            control.push(Frame::Compare { op: *op, at: *at });
            control.push(Frame::Exp(rhs));
            control.push(Frame::Exp(lhs));
            Rule::CmpPush
        }
        Frame::Compare { op, at } => {
            let r = pop_operand(&mut operands);
            let l = pop_operand(&mut operands);
            match compare(&l, &r) {
                Some(equal) => operands.push(Value::Bool(equal == (op == CmpOp::Eq))),
                None => return Err(MachineError::incomparable(&l, &r, at, state)),
            }
            Rule::Cmp
        }
        Frame::Bind { name, at } => {
            let v = pop_operand(&mut operands);
            state = env.assign(name, v, at, state)?;
            Rule::Assign
        }
        Frame::Branch { then, otherwise, at } => match pop_operand(&mut operands) {
            Value::Bool(true) => {
                control.push(Frame::Com(then));
                Rule::IfTrue
            }
            Value::Bool(false) => {
                if let Some(e) = otherwise {
                    control.push(Frame::Com(e));
                }
                Rule::IfFalse
            }
            v => return Err(MachineError::non_bool_condition(&v, at, state)),
        },
        Frame::Output => {
            state.output.push(pop_operand(&mut operands));
            Rule::Emit
        }
    };
    if control.is_empty() {
        debug_assert!(operands.is_empty());
        Ok(Step::Halted { state, rule: Some(rule) })
    } else {
        Ok(Step::Running { cfg: MachineConfig { control, operands, state }, rule })
    }
}

fn pop_operand(operands: &mut Vec<Value>) -> Value {
    operands.pop().expect("value-consuming frame with an empty operand stack")
}

/// Iterates [`step`] from the initial configuration until the machine halts.
pub fn run_small_step(
    program: &ComAst,
    input: impl IntoIterator<Item = Value>,
    env: &Env<'_>,
) -> Result<MachineState, MachineError> {
    let mut cfg = MachineConfig::new(program, MachineState::with_input(input));
    loop {
        match step(cfg, env)? {
            Step::Running { cfg: next, .. } => cfg = next,
            Step::Halted { state, .. } => return Ok(state),
        }
    }
}

/// One line of a step trace: `<n> | <rule> | mem={...} in=<len> out=<len>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub n: usize,
    pub rule: Rule,
    pub memory: String,
    pub input_len: usize,
    pub output_len: usize,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | mem={} in={} out={}",
            self.n, self.rule, self.memory, self.input_len, self.output_len
        )
    }
}

fn trace_line(n: usize, rule: Rule, state: &MachineState) -> TraceLine {
    TraceLine {
        n,
        rule,
        memory: state.memory.to_string(),
        input_len: state.input.len(),
        output_len: state.output.len(),
    }
}

/// Runs the small-step machine, recording the state after every transition.
pub fn trace(
    program: &ComAst,
    input: impl IntoIterator<Item = Value>,
    env: &Env<'_>,
) -> (Vec<TraceLine>, Result<MachineState, MachineError>) {
    let mut lines = Vec::new();
    let mut cfg = MachineConfig::new(program, MachineState::with_input(input));
    loop {
        match step(cfg, env) {
            Ok(Step::Running { cfg: next, rule }) => {
                lines.push(trace_line(lines.len() + 1, rule, &next.state));
                cfg = next;
            }
            Ok(Step::Halted { state, rule }) => {
                if let Some(rule) = rule {
                    lines.push(trace_line(lines.len() + 1, rule, &state));
                }
                return (lines, Ok(state));
            }
            Err(e) => return (lines, Err(e)),
        }
    }
}

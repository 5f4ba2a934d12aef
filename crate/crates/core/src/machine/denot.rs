use super::{compare, Env, MachineError, MachineState};
use crate::lang::{CmpOp, ComAst, ExpAst};
use crate::value::Value;

/// `E : Exp → State → (Value × State) + {error}`
pub fn eval_expr(e: &ExpAst, s: MachineState, env: &Env<'_>) -> Result<(Value, MachineState), MachineError> {
    match e {
        ExpAst::Lit { value, .. } => Ok((value.clone().into(), s)),
        ExpAst::Ident { name, at } => match s.memory.get(name) {
            Some(v) => Ok((v.clone(), s)),
            None => Err(MachineError::unbound(name, *at, s)),
        },
        ExpAst::Read { at } => {
            let mut s = s;
            match s.input.pop_front() {
                Some(v) => Ok((v, s)),
                None => Err(MachineError::input_exhausted(*at, s)),
            }
        }
        ExpAst::ContentRef { path, at } => {
            let v = env.content(path, *at, &s)?;
            Ok((v, s))
        }
        ExpAst::Cmp { op, lhs, rhs, at } => {
            let (l, s) = eval_expr(lhs, s, env)?;
            let (r, s) = eval_expr(rhs, s, env)?;
            match compare(&l, &r) {
                Some(equal) => Ok((Value::Bool(equal == (*op == CmpOp::Eq)), s)),
                None => Err(MachineError::incomparable(&l, &r, *at, s)),
            }
        }
    }
}

/// `C : Com → State → State + {error}`
pub fn exec_com(c: &ComAst, s: MachineState, env: &Env<'_>) -> Result<MachineState, MachineError> {
    match c {
        ComAst::Skip => Ok(s),
        // C[I = E] = E[E] * λv (m, i, o). (m[v/I], i, o)
        ComAst::Assign { name, value, at } => {
            let (v, s) = eval_expr(value, s, env)?;
            env.assign(name, v, *at, s)
        }
        ComAst::Seq(first, rest) => {
            let s = exec_com(first, s, env)?;
            exec_com(rest, s, env)
        }
        ComAst::If { cond, then, otherwise, at } => match eval_expr(cond, s, env)? {
            (Value::Bool(true), s) => exec_com(then, s, env),
            (Value::Bool(false), s) => match otherwise {
                Some(e) => exec_com(e, s, env),
                None => Ok(s),
            },
            (v, s) => Err(MachineError::non_bool_condition(&v, *at, s)),
        },
        ComAst::Emit { value, .. } => {
            let (v, mut s) = eval_expr(value, s, env)?;
            s.output.push(v);
            Ok(s)
        }
    }
}

/// Runs `program` from empty memory over `input` with empty output.
pub fn run(
    program: &ComAst,
    input: impl IntoIterator<Item = Value>,
    env: &Env<'_>,
) -> Result<MachineState, MachineError> {
    exec_com(program, MachineState::with_input(input), env)
}

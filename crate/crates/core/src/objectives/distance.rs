//! Branch distance for source-level predicates.
//!
//! The interpreter records the same distances for every `if` it evaluates;
//! this entry point serves callers holding a [`Predicate`] and a state.

use crate::vm::{GameInstance, GameState, Predicate, SpecError};

/// Raw branch distance of `pred` from evaluating to `desired` in `state`.
/// Zero exactly when the predicate already has the desired outcome.
/// Variables resolve in `owner`'s scope first (`None` for the stage).
pub fn branch_distance(
    inst: &GameInstance,
    pred: &Predicate,
    owner: Option<&str>,
    state: &GameState,
    desired: bool,
) -> Result<f64, SpecError> {
    let p = inst.resolve_predicate(pred, owner)?;
    let (_, to_true, to_false) = inst.eval_pred(state, &p);
    Ok(if desired { to_true } else { to_false })
}

/// Evaluates `pred` in `state`.
pub fn evaluate(inst: &GameInstance, pred: &Predicate, owner: Option<&str>, state: &GameState) -> Result<bool, SpecError> {
    let p = inst.resolve_predicate(pred, owner)?;
    Ok(inst.eval_pred(state, &p).0)
}

#![allow(dead_code)]

use noveltest::games::maze_layout::PLAYER;
use noveltest::vm::{Action, BehaviorVector, GameInstance, GameState, Value};

pub fn press(key: &str) -> Action {
    Action::PressKey { key: key.to_string(), ticks: 10 }
}

pub fn click(sprite: &str) -> Action {
    Action::ClickSprite { sprite: sprite.to_string() }
}

pub fn level(inst: &GameInstance, st: &GameState) -> f64 {
    match st.global(inst, "level") {
        Some(Value::Num(v)) => *v,
        other => panic!("level is {other:?}"),
    }
}

/// Level 1: walk right. Level 2: climb past the top of the wall, then
/// walk right into the portal.
pub fn maze_witness(inst: &GameInstance) -> impl FnMut(&BehaviorVector, &GameState) -> Action + '_ {
    move |_, st| {
        let p = st.sprite(inst, PLAYER).unwrap();
        if level(inst, st) >= 2.0 && p.y < 165.0 {
            press("up")
        } else {
            press("right")
        }
    }
}

/// Replays a fixed action list, then idles.
pub fn scripted(actions: Vec<Action>) -> impl FnMut(&BehaviorVector, &GameState) -> Action {
    let mut i = 0;
    move |_, _| {
        let a = actions.get(i).cloned().unwrap_or(Action::Noop);
        i += 1;
        a
    }
}

/// Earns 10 points, buys an upgrade, collects the bonus and wins.
pub fn clicker_witness_actions() -> Vec<Action> {
    let mut names = vec!["Ball"; 10];
    names.extend(["Next", "Next", "Buy", "Next", "Prev", "Buy", "Next", "Next", "Next", "Next", "Buy"]);
    names.iter().map(|s| click(s)).collect()
}

//! Built-in desk-scale case-study games.

mod clicker;
pub mod dsl;
mod maze;

use std::collections::BTreeMap;

pub use clicker::{build_clicker, clicker_milestones, ClickerMilestones};
pub use maze::{build_maze_world, maze_milestones, MazeMilestones};

use crate::vm::{GameSpec, StmtId};

pub mod maze_layout {
    pub use super::maze::{
        ORANGE, PLAYER, PLAYER_SIZE, PORTAL, PORTAL_LEVEL1, PORTAL_LEVEL2, PORTAL_SIZE, PORTAL_SIZE_LEVEL2, SPAWN_JITTER, SPAWN_X,
        STEP, WALLS, WALL_RECTS,
    };
}

pub mod clicker_layout {
    pub use super::clicker::{BALL, BUY, MENUS, NEXT, PREV, TROPHY};
}

pub const BUILTIN_NAMES: [&str; 2] = ["maze", "clicker"];

/// Looks up a built-in game by short name.
pub fn builtin(name: &str) -> Option<GameSpec> {
    match name {
        "maze" => Some(build_maze_world()),
        "clicker" => Some(build_clicker()),
        _ => None,
    }
}

/// Named milestone statements used as experiment event counters. Unknown
/// games have none.
pub fn milestones(spec: &GameSpec) -> BTreeMap<String, StmtId> {
    let mut out = BTreeMap::new();
    match spec.name.as_str() {
        "maze-world" => {
            let m = maze_milestones(spec);
            out.insert("level1_advance".to_string(), m.level1_advance);
            out.insert("level2_advance".to_string(), m.level2_advance);
        }
        "clicker" => {
            let m = clicker_milestones(spec);
            out.insert("bonus_menu".to_string(), m.bonus_backdrop);
            out.insert("win".to_string(), m.win);
        }
        _ => {}
    }
    out
}

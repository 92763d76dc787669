//! Two-level maze. Level 1 is a straight walk to an orange portal. In level 2
//! a wall stands between the player and a taller portal, so the distance to
//! orange is deceptive: every point of the wall face is equally close, and
//! getting past means first walking away, over or under the wall's ends.
//! Two ledges near the spawn only matter for coverage.

use crate::vm::{CmpOp, GameSpec, StmtId, StmtKind, Value};

use super::dsl::*;

pub const PLAYER: &str = "Player";
pub const PORTAL: &str = "Portal";
pub const WALLS: [&str; 3] = ["WallBack", "WallTop", "WallBottom"];
pub const ORANGE: &str = "orange";

/// Player step per tick while an arrow key is held.
pub const STEP: f64 = 5.0;
pub const SPAWN_X: f64 = -200.0;
/// Spawn y is drawn uniformly from `[-SPAWN_JITTER, SPAWN_JITTER]`.
pub const SPAWN_JITTER: f64 = 40.0;

pub const PORTAL_LEVEL1: (f64, f64) = (180.0, 0.0);
pub const PORTAL_LEVEL2: (f64, f64) = (150.0, 0.0);
pub const PORTAL_SIZE: (f64, f64) = (40.0, 80.0);
/// Portal costume from level 2 on.
pub const PORTAL_SIZE_LEVEL2: (f64, f64) = (40.0, 340.0);
pub const PLAYER_SIZE: f64 = 20.0;

/// Wall rectangles `(cx, cy, width, height)` shown from level 2 on.
pub const WALL_RECTS: [(f64, f64, f64, f64); 3] = [
    (100.0, 0.0, 20.0, 280.0),
    (-60.0, 80.0, 120.0, 20.0),
    (-60.0, -80.0, 120.0, 20.0),
];

fn movement(key: &str, heading: f64) -> crate::vm::Script {
    let mut body = vec![point(heading), move_steps(STEP)];
    for wall in WALLS {
        body.push(if_(touching(PLAYER, wall), vec![move_steps(-STEP)]));
    }
    on_key(PLAYER, key, body)
}

pub fn build_maze_world() -> GameSpec {
    let level_is = |n: f64| cmp(var("level"), CmpOp::Eq, num(n));
    let player_main = on_start(
        PLAYER,
        vec![
            random("spawn", -SPAWN_JITTER, SPAWN_JITTER),
            go_to(num(SPAWN_X), var("spawn")),
            point(90.0),
            set("level", num(1.0)),
            backdrop(0),
            forever(vec![
                if_(
                    level_is(1.0),
                    vec![if_(
                        touching_colour(PLAYER, ORANGE),
                        vec![
                            backdrop(1),
                            go_to(num(SPAWN_X), var("spawn")),
                            change("level", num(1.0)),
                            broadcast("level2"),
                        ],
                    )],
                ),
                if_(
                    level_is(2.0),
                    vec![if_(
                        touching_colour(PLAYER, ORANGE),
                        vec![backdrop(2), change("level", num(1.0)), say("You escaped!"), win()],
                    )],
                ),
            ]),
        ],
    );

    let mut scripts = vec![
        player_main,
        movement("up", 0.0),
        movement("down", 180.0),
        movement("left", -90.0),
        movement("right", 90.0),
        on_start(PORTAL, vec![go_to(num(PORTAL_LEVEL1.0), num(PORTAL_LEVEL1.1)), show()]),
        on_broadcast(PORTAL, "level2", vec![go_to(num(PORTAL_LEVEL2.0), num(PORTAL_LEVEL2.1)), costume(1)]),
    ];
    for wall in WALLS {
        scripts.push(on_start(wall, vec![hide()]));
        scripts.push(on_broadcast(wall, "level2", vec![show()]));
    }

    let mut sprites = vec![
        sprite(PLAYER, SPAWN_X, 0.0, &[(PLAYER_SIZE, PLAYER_SIZE, "blue")]),
        sprite(
            PORTAL,
            PORTAL_LEVEL1.0,
            PORTAL_LEVEL1.1,
            &[(PORTAL_SIZE.0, PORTAL_SIZE.1, ORANGE), (PORTAL_SIZE_LEVEL2.0, PORTAL_SIZE_LEVEL2.1, ORANGE)],
        ),
    ];
    for (name, (x, y, w, h)) in WALLS.iter().zip(WALL_RECTS) {
        sprites.push(hidden(sprite(name, x, y, &[(w, h, "grey")])));
    }

    game(
        "maze-world",
        3,
        &[("level", Value::Num(1.0)), ("spawn", Value::Num(0.0))],
        sprites,
        scripts,
    )
}

/// Statement ids marking progress through the maze.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MazeMilestones {
    /// First statement run when level 1's portal is touched.
    pub level1_advance: StmtId,
    /// First statement run when level 2's portal is touched.
    pub level2_advance: StmtId,
    /// The level-2 guard `touching-colour(Player, orange)`.
    pub level2_guard: StmtId,
}

pub fn maze_milestones(spec: &GameSpec) -> MazeMilestones {
    let backdrop_id = |b: u32| {
        find(spec, |s| matches!(s.kind, StmtKind::SwitchBackdrop { backdrop } if backdrop == b)).expect("maze backdrop")
    };
    let level2_advance = backdrop_id(2);
    MazeMilestones {
        level1_advance: backdrop_id(1),
        level2_advance,
        // the guard directly precedes its first child in document order
        level2_guard: level2_advance - 1,
    }
}

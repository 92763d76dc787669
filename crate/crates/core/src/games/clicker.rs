//! Menu-driven clicker. Every menu guard is a string comparison, so the
//! objective is flat across menus: a player stuck in the wrong menu scores
//! the same no matter which wrong menu it is in.
//!
//! Navigation (`Next` / `Prev`):
//!
//! ```text
//! Main -> Shop -> Upgrades -> Trainer -> Main      (Next)
//! Shop -> Main, Upgrades -> Shop                   (Prev)
//! Trainer -> Bonus, once an upgrade is bought      (Prev)
//! Bonus -> Trainer                                 (Prev)
//! Bonus -> Main                                    (Next)
//! ```
//!
//! Points come from clicking the ball in the main menu. An upgrade costs
//! 10 points, so the bonus menu is a long, exact click sequence away.

use crate::vm::{CmpOp, GameSpec, StmtId, StmtKind, Value};

use super::dsl::*;

pub const MENUS: [&str; 5] = ["Main", "Shop", "Upgrades", "Trainer", "Bonus"];
pub const BALL: &str = "Ball";
pub const NEXT: &str = "Next";
pub const PREV: &str = "Prev";
pub const BUY: &str = "Buy";
pub const TROPHY: &str = "Trophy";

fn menu_is(name: &str) -> crate::vm::Predicate {
    str_eq("menu", name)
}

fn at_least(name: &str, v: f64) -> crate::vm::Predicate {
    cmp(var(name), CmpOp::Ge, num(v))
}

fn goto_menu(from: &str, to: &str) -> crate::vm::Statement {
    if_(str_eq("nav", from), vec![set("menu", text(to))])
}

pub fn build_clicker() -> GameSpec {
    let stage = on_start(
        "stage",
        vec![
            set("points", num(0.0)),
            set("menu", text("Main")),
            set("power", num(1.0)),
            set("upgrades", num(0.0)),
            forever(vec![
                if_(menu_is("Shop"), vec![backdrop(1)]),
                if_(menu_is("Upgrades"), vec![backdrop(2)]),
                if_(menu_is("Trainer"), vec![backdrop(3)]),
                if_(menu_is("Bonus"), vec![backdrop(4)]),
            ]),
        ],
    );

    let ball_click = on_click(
        BALL,
        vec![change("points", var("power")), if_(at_least("points", 30.0), vec![costume(1)])],
    );
    let ball_display = on_start(BALL, vec![forever(vec![if_else(menu_is("Main"), vec![show()], vec![hide()])])]);

    let next_click = on_click(
        NEXT,
        vec![
            set("nav", var("menu")),
            goto_menu("Main", "Shop"),
            goto_menu("Shop", "Upgrades"),
            goto_menu("Upgrades", "Trainer"),
            goto_menu("Trainer", "Main"),
            goto_menu("Bonus", "Main"),
        ],
    );
    let prev_click = on_click(
        PREV,
        vec![
            set("nav", var("menu")),
            goto_menu("Shop", "Main"),
            goto_menu("Upgrades", "Shop"),
            if_(str_eq("nav", "Trainer"), vec![if_(at_least("upgrades", 1.0), vec![set("menu", text("Bonus"))])]),
            goto_menu("Bonus", "Trainer"),
        ],
    );

    let buy_click = on_click(
        BUY,
        vec![
            if_(
                menu_is("Shop"),
                vec![if_(at_least("points", 5.0), vec![change("points", num(-5.0)), change("power", num(1.0))])],
            ),
            if_(
                menu_is("Upgrades"),
                vec![if_(at_least("points", 10.0), vec![change("points", num(-10.0)), change("upgrades", num(1.0))])],
            ),
            if_(
                menu_is("Trainer"),
                vec![if_(at_least("upgrades", 1.0), vec![if_(at_least("points", 20.0), vec![say("Champion!"), win()])])],
            ),
            if_(menu_is("Bonus"), vec![change("points", num(50.0))]),
        ],
    );
    let buy_display = on_start(
        BUY,
        vec![forever(vec![
            if_else(menu_is("Main"), vec![hide()], vec![show()]),
            if_(menu_is("Shop"), vec![costume(0)]),
            if_(menu_is("Upgrades"), vec![costume(1)]),
            if_(menu_is("Trainer"), vec![costume(2)]),
            if_(menu_is("Bonus"), vec![costume(3)]),
        ])],
    );

    let trophy_display = on_start(
        TROPHY,
        vec![forever(vec![if_else(
            menu_is("Bonus"),
            vec![show(), if_(at_least("points", 100.0), vec![costume(1)])],
            vec![hide()],
        )])],
    );

    let sprites = vec![
        sprite(BALL, 0.0, 20.0, &[(60.0, 60.0, "red"), (70.0, 70.0, "gold")]),
        sprite(NEXT, 200.0, -150.0, &[(50.0, 24.0, "green")]),
        sprite(PREV, -200.0, -150.0, &[(50.0, 24.0, "green")]),
        hidden(sprite(
            BUY,
            0.0,
            -100.0,
            &[(80.0, 30.0, "yellow"), (80.0, 30.0, "cyan"), (80.0, 30.0, "purple"), (80.0, 30.0, "white")],
        )),
        hidden(sprite(TROPHY, 180.0, 130.0, &[(40.0, 40.0, "silver"), (40.0, 40.0, "gold")])),
    ];

    game(
        "clicker",
        5,
        &[
            ("menu", Value::Str("Main".into())),
            ("nav", Value::Str("Main".into())),
            ("points", Value::Num(0.0)),
            ("power", Value::Num(1.0)),
            ("upgrades", Value::Num(0.0)),
        ],
        sprites,
        vec![stage, ball_click, ball_display, next_click, prev_click, buy_click, buy_display, trophy_display],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClickerMilestones {
    /// The stage's `switch-backdrop 4`, run only while in the Bonus menu.
    pub bonus_backdrop: StmtId,
    /// `declare-win` behind the Trainer purchase.
    pub win: StmtId,
}

pub fn clicker_milestones(spec: &GameSpec) -> ClickerMilestones {
    ClickerMilestones {
        bonus_backdrop: find(spec, |s| matches!(s.kind, StmtKind::SwitchBackdrop { backdrop: 4 })).expect("bonus backdrop"),
        win: find(spec, |s| matches!(s.kind, StmtKind::DeclareWin)).expect("win"),
    }
}

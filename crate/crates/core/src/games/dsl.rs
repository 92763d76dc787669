//! Terse constructors for hand-written game specs.

use std::collections::BTreeMap;

use crate::vm::*;

pub fn stmt(kind: StmtKind) -> Statement {
    Statement::new(kind)
}

pub fn num(v: f64) -> Expr {
    Expr::Num(v)
}

pub fn var(name: &str) -> Expr {
    Expr::var(name)
}

pub fn text(s: &str) -> Expr {
    Expr::text(s)
}

pub fn move_steps(n: f64) -> Statement {
    stmt(StmtKind::MoveSteps { steps: num(n) })
}

pub fn go_to(x: Expr, y: Expr) -> Statement {
    stmt(StmtKind::GoTo { x, y })
}

pub fn point(deg: f64) -> Statement {
    stmt(StmtKind::PointInDirection { degrees: num(deg) })
}

pub fn change(name: &str, by: Expr) -> Statement {
    stmt(StmtKind::ChangeVariable { var: name.into(), by })
}

pub fn set(name: &str, value: Expr) -> Statement {
    stmt(StmtKind::SetVariable { var: name.into(), value })
}

pub fn costume(i: usize) -> Statement {
    stmt(StmtKind::SwitchCostume { costume: i })
}

pub fn backdrop(i: u32) -> Statement {
    stmt(StmtKind::SwitchBackdrop { backdrop: i })
}

pub fn show() -> Statement {
    stmt(StmtKind::Show)
}

pub fn hide() -> Statement {
    stmt(StmtKind::Hide)
}

pub fn say(text: &str) -> Statement {
    stmt(StmtKind::Say { text: text.into() })
}

pub fn broadcast(tag: &str) -> Statement {
    stmt(StmtKind::Broadcast { tag: tag.into() })
}

pub fn if_(cond: Predicate, then: Vec<Statement>) -> Statement {
    stmt(StmtKind::If { cond, then, otherwise: Vec::new() })
}

pub fn if_else(cond: Predicate, then: Vec<Statement>, otherwise: Vec<Statement>) -> Statement {
    stmt(StmtKind::If { cond, then, otherwise })
}

pub fn forever(body: Vec<Statement>) -> Statement {
    stmt(StmtKind::Forever { body })
}

pub fn repeat(times: f64, body: Vec<Statement>) -> Statement {
    stmt(StmtKind::Repeat { times: num(times), body })
}

pub fn wait(ticks: u32) -> Statement {
    stmt(StmtKind::Wait { ticks })
}

pub fn random(name: &str, lo: f64, hi: f64) -> Statement {
    stmt(StmtKind::RandomRangeAssign { var: name.into(), lo, hi })
}

pub fn win() -> Statement {
    stmt(StmtKind::DeclareWin)
}

pub fn game_over() -> Statement {
    stmt(StmtKind::DeclareGameOver)
}

pub fn cmp(left: Expr, op: CmpOp, right: Expr) -> Predicate {
    Predicate::Compare { left, op, right }
}

pub fn touching(sprite: &str, target: &str) -> Predicate {
    Predicate::TouchingSprite { sprite: sprite.into(), target: target.into() }
}

pub fn touching_colour(sprite: &str, colour: &str) -> Predicate {
    Predicate::TouchingColour { sprite: sprite.into(), colour: colour.into() }
}

pub fn key_pressed(key: &str) -> Predicate {
    Predicate::KeyPressed { key: key.into() }
}

pub fn str_eq(name: &str, literal: &str) -> Predicate {
    Predicate::StringEquals { var: name.into(), literal: literal.into() }
}

pub fn on_start(owner: &str, body: Vec<Statement>) -> Script {
    Script { owner: owner.into(), trigger: Trigger::GameStart, body }
}

pub fn on_key(owner: &str, key: &str, body: Vec<Statement>) -> Script {
    Script { owner: owner.into(), trigger: Trigger::KeyPressed { key: key.into() }, body }
}

pub fn on_click(sprite: &str, body: Vec<Statement>) -> Script {
    Script { owner: sprite.into(), trigger: Trigger::SpriteClicked { sprite: sprite.into() }, body }
}

pub fn on_broadcast(owner: &str, tag: &str, body: Vec<Statement>) -> Script {
    Script { owner: owner.into(), trigger: Trigger::Broadcast { tag: tag.into() }, body }
}

/// A sprite with one costume per `(width, height, colour)`.
pub fn sprite(name: &str, x: f64, y: f64, costumes: &[(f64, f64, &str)]) -> SpriteSpec {
    SpriteSpec {
        name: name.into(),
        x,
        y,
        heading: 90.0,
        costumes: costumes
            .iter()
            .map(|&(width, height, colour)| Costume { width, height, colour: colour.into() })
            .collect(),
        costume: 0,
        size: 100.0,
        visible: true,
        variables: BTreeMap::new(),
    }
}

pub fn hidden(mut s: SpriteSpec) -> SpriteSpec {
    s.visible = false;
    s
}

/// Assembles a spec and assigns statement ids in document order.
pub fn game(name: &str, backdrops: u32, globals: &[(&str, Value)], sprites: Vec<SpriteSpec>, scripts: Vec<Script>) -> GameSpec {
    let mut spec = GameSpec {
        name: name.into(),
        stage: StageSpec {
            backdrops,
            variables: globals.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        },
        sprites,
        scripts,
    };
    spec.assign_ids();
    spec
}

/// First statement (document order) matching `pred`.
pub fn find(spec: &GameSpec, pred: impl Fn(&Statement) -> bool) -> Option<StmtId> {
    let mut found = None;
    spec.visit(&mut |s, _| {
        if found.is_none() && pred(s) {
            found = Some(s.id);
        }
    });
    found
}

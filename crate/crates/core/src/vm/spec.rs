//! Declarative game description: stage, sprites and scripts.
//!
//! The JSON form mirrors these types field for field. Statement ids may be
//! omitted in JSON; [`GameSpec::assign_ids`] fills them in document order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Statement identifier. `0` means "not yet assigned".
pub type StmtId = u32;

pub const CANVAS_X: (f64, f64) = (-240.0, 240.0);
pub const CANVAS_Y: (f64, f64) = (-180.0, 180.0);
pub const HEADING_RANGE: (f64, f64) = (-180.0, 180.0);
/// Largest possible gap between two points on the canvas.
pub const CANVAS_DIAGONAL: f64 = 600.0;

/// Owner string used for scripts attached to the stage.
pub const STAGE: &str = "stage";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub name: String,
    pub stage: StageSpec,
    #[serde(default)]
    pub sprites: Vec<SpriteSpec>,
    #[serde(default)]
    pub scripts: Vec<Script>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub backdrops: u32,
    #[serde(default)]
    pub variables: BTreeMap<String, Value>,
}

/// A variable value. Numbers and strings are the only runtime types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Str(String),
}

impl Value {
    /// Numeric view; strings that do not parse as numbers read as 0.
    pub fn as_num(&self) -> f64 {
        match self {
            Value::Num(v) => *v,
            Value::Str(s) => s.trim().parse().unwrap_or(0.0),
        }
    }

    pub fn is_num(&self) -> bool {
        matches!(self, Value::Num(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpriteSpec {
    pub name: String,
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_heading")]
    pub heading: f64,
    pub costumes: Vec<Costume>,
    #[serde(default)]
    pub costume: usize,
    #[serde(default = "default_size")]
    pub size: f64,
    #[serde(default = "default_true")]
    pub visible: bool,
    #[serde(default)]
    pub variables: BTreeMap<String, f64>,
}

fn default_heading() -> f64 {
    90.0
}

fn default_size() -> f64 {
    100.0
}

fn default_true() -> bool {
    true
}

/// Solid-colour rectangle. Colours are compared as exact strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Costume {
    pub width: f64,
    pub height: f64,
    pub colour: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    /// Sprite name, or `"stage"`.
    pub owner: String,
    pub trigger: Trigger,
    pub body: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Trigger {
    GameStart,
    KeyPressed { key: String },
    SpriteClicked { sprite: String },
    Broadcast { tag: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    #[serde(default, skip_serializing_if = "is_unassigned")]
    pub id: StmtId,
    #[serde(flatten)]
    pub kind: StmtKind,
}

fn is_unassigned(id: &StmtId) -> bool {
    *id == 0
}

impl Statement {
    pub fn new(kind: StmtKind) -> Self {
        Statement { id: 0, kind }
    }

    /// Nested statement lists, in document order.
    pub fn children(&self) -> Vec<&[Statement]> {
        match &self.kind {
            StmtKind::If { then, otherwise, .. } => vec![then.as_slice(), otherwise.as_slice()],
            StmtKind::Repeat { body, .. } | StmtKind::Forever { body } => vec![body.as_slice()],
            _ => Vec::new(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Vec<Statement>> {
        match &mut self.kind {
            StmtKind::If { then, otherwise, .. } => vec![then, otherwise],
            StmtKind::Repeat { body, .. } | StmtKind::Forever { body } => vec![body],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum StmtKind {
    MoveSteps {
        steps: Expr,
    },
    GoTo {
        x: Expr,
        y: Expr,
    },
    PointInDirection {
        degrees: Expr,
    },
    ChangeVariable {
        var: String,
        by: Expr,
    },
    SetVariable {
        var: String,
        value: Expr,
    },
    SwitchCostume {
        costume: usize,
    },
    SwitchBackdrop {
        backdrop: u32,
    },
    SetSize {
        percent: f64,
    },
    Show,
    Hide,
    Say {
        text: String,
    },
    Broadcast {
        tag: String,
    },
    If {
        cond: Predicate,
        then: Vec<Statement>,
        #[serde(default, rename = "else", skip_serializing_if = "Vec::is_empty")]
        otherwise: Vec<Statement>,
    },
    Repeat {
        times: Expr,
        body: Vec<Statement>,
    },
    Forever {
        body: Vec<Statement>,
    },
    Wait {
        ticks: u32,
    },
    RandomRangeAssign {
        var: String,
        lo: f64,
        hi: f64,
    },
    StopAll,
    DeclareWin,
    DeclareGameOver,
}

/// Expressions. Plain JSON numbers and strings are literals; everything else
/// is an object such as `{"var": "score"}` or `{"add": [a, b]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expr {
    Num(f64),
    Node(ExprNode),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExprNode {
    Var(String),
    XOf(String),
    YOf(String),
    DirectionOf(String),
    MouseX,
    MouseY,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Node(ExprNode::Var(name.to_string()))
    }

    pub fn text(s: &str) -> Self {
        Expr::Text(s.to_string())
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Node(ExprNode::Add(Box::new(a), Box::new(b)))
    }

    pub fn reads_mouse(&self) -> bool {
        match self {
            Expr::Node(ExprNode::MouseX | ExprNode::MouseY) => true,
            Expr::Node(ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b)) => {
                a.reads_mouse() || b.reads_mouse()
            }
            _ => false,
        }
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::Num(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl CmpOp {
    pub fn eval(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Predicate {
    Compare { left: Expr, op: CmpOp, right: Expr },
    TouchingSprite { sprite: String, target: String },
    TouchingColour { sprite: String, colour: String },
    KeyPressed { key: String },
    StringEquals { var: String, literal: String },
}

impl Predicate {
    fn exprs(&self) -> Vec<&Expr> {
        match self {
            Predicate::Compare { left, right, .. } => vec![left, right],
            _ => Vec::new(),
        }
    }
}

impl StmtKind {
    fn exprs(&self) -> Vec<&Expr> {
        match self {
            StmtKind::MoveSteps { steps } => vec![steps],
            StmtKind::GoTo { x, y } => vec![x, y],
            StmtKind::PointInDirection { degrees } => vec![degrees],
            StmtKind::ChangeVariable { by, .. } => vec![by],
            StmtKind::SetVariable { value, .. } => vec![value],
            StmtKind::If { cond, .. } => cond.exprs(),
            StmtKind::Repeat { times, .. } => vec![times],
            _ => Vec::new(),
        }
    }
}

impl GameSpec {
    /// Fills every unassigned (zero) statement id with the smallest unused
    /// positive id, walking scripts and nested bodies in document order.
    pub fn assign_ids(&mut self) {
        let mut used = std::collections::BTreeSet::new();
        self.visit(&mut |s, _| {
            if s.id != 0 {
                used.insert(s.id);
            }
        });
        let mut next: StmtId = 1;
        for script in &mut self.scripts {
            assign_block(&mut script.body, &mut used, &mut next);
        }
    }

    /// Pre-order walk over all statements, with the owning script index.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Statement, usize)) {
        fn walk<'a>(body: &'a [Statement], script: usize, f: &mut impl FnMut(&'a Statement, usize)) {
            for s in body {
                f(s, script);
                for child in s.children() {
                    walk(child, script, f);
                }
            }
        }
        for (i, script) in self.scripts.iter().enumerate() {
            walk(&script.body, i, f);
        }
    }

    pub fn statement_ids(&self) -> Vec<StmtId> {
        let mut ids = Vec::new();
        self.visit(&mut |s, _| ids.push(s.id));
        ids
    }

    pub fn statement(&self, id: StmtId) -> Option<&Statement> {
        let mut found = None;
        self.visit(&mut |s, _| {
            if s.id == id && found.is_none() {
                found = Some(s);
            }
        });
        found
    }

    pub fn sprite_index(&self, name: &str) -> Option<usize> {
        self.sprites.iter().position(|s| s.name == name)
    }

    /// True if any expression reads the mouse position.
    pub fn reads_mouse(&self) -> bool {
        let mut reads = false;
        self.visit(&mut |s, _| reads |= s.kind.exprs().iter().any(|e| e.reads_mouse()));
        reads
    }

    /// Every colour that appears on some costume.
    pub fn colours(&self) -> std::collections::BTreeSet<&str> {
        self.sprites
            .iter()
            .flat_map(|s| s.costumes.iter().map(|c| c.colour.as_str()))
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut spec: GameSpec = serde_json::from_str(text)?;
        spec.assign_ids();
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game spec serializes")
    }
}

fn assign_block(body: &mut [Statement], used: &mut std::collections::BTreeSet<StmtId>, next: &mut StmtId) {
    for s in body {
        if s.id == 0 {
            while used.contains(next) {
                *next += 1;
            }
            s.id = *next;
            used.insert(*next);
        }
        for child in s.children_mut() {
            assign_block(child, used, next);
        }
    }
}

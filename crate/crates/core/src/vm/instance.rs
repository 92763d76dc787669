//! Validation and compilation of a [`GameSpec`] into an executable
//! [`GameInstance`] with its action alphabet and feature schema.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::action::ActionKind;
use super::features::{FeatureSchema, FeatureSource, Normalization, Probe, ProbeTarget, Reader};
use super::spec::*;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("stage must declare at least one backdrop")]
    NoBackdrops,
    #[error("duplicate sprite name `{0}`")]
    DuplicateSprite(String),
    #[error("sprite `{sprite}`: {reason}")]
    BadSprite { sprite: String, reason: String },
    #[error("script {script}: {reason}")]
    BadScript { script: usize, reason: String },
    #[error("statement {0}: duplicate statement id")]
    DuplicateId(StmtId),
    #[error("statement id 0 is reserved; assign ids before loading")]
    UnassignedId,
    #[error("statement {stmt}: {reason}")]
    BadStatement { stmt: StmtId, reason: String },
}

impl SpecError {
    /// The statement the error points at, if any.
    pub fn statement(&self) -> Option<StmtId> {
        match self {
            SpecError::DuplicateId(id) => Some(*id),
            SpecError::BadStatement { stmt, .. } => Some(*stmt),
            _ => None,
        }
    }
}

pub fn is_valid_key(key: &str) -> bool {
    matches!(key, "up" | "down" | "left" | "right" | "space" | "enter")
        || (key.len() == 1 && key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum VarRef {
    Global(usize),
    Private(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum CExpr {
    Num(f64),
    Text(String),
    Var(VarRef),
    X(usize),
    Y(usize),
    Direction(usize),
    MouseX,
    MouseY,
    Add(Box<CExpr>, Box<CExpr>),
    Sub(Box<CExpr>, Box<CExpr>),
    Mul(Box<CExpr>, Box<CExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum CPred {
    Compare(CExpr, CmpOp, CExpr),
    TouchingSprite(usize, usize),
    TouchingColour(usize, String),
    Key(usize),
    StringEquals(VarRef, String),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum COp {
    Move(CExpr),
    GoTo(CExpr, CExpr),
    Point(CExpr),
    Change(VarRef, CExpr),
    Set(VarRef, CExpr),
    Costume(usize),
    Backdrop(u32),
    Size(f64),
    Show,
    Hide,
    Say,
    Broadcast(usize),
    If { cond: CPred, then: usize, otherwise: usize },
    Repeat { times: CExpr, body: usize },
    Forever { body: usize },
    Wait(u32),
    Random(VarRef, f64, f64),
    StopAll,
    Win,
    GameOver,
}

#[derive(Clone, Debug)]
pub(crate) struct CStmt {
    pub id: StmtId,
    pub owner: Option<usize>,
    pub op: COp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CTrigger {
    Start,
    Key(usize),
    Click(usize),
    Broadcast(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct CScript {
    pub trigger: CTrigger,
    pub body: usize,
}

/// A validated, compiled game. Immutable and shareable across episodes.
#[derive(Clone, Debug)]
pub struct GameInstance {
    spec: GameSpec,
    pub(crate) stmts: Vec<CStmt>,
    pub(crate) blocks: Vec<Vec<usize>>,
    pub(crate) scripts: Vec<CScript>,
    pub(crate) keys: Vec<String>,
    pub(crate) global_names: Vec<String>,
    dense: HashMap<StmtId, usize>,
    alphabet: Vec<ActionKind>,
    schema: FeatureSchema,
    digest: String,
}

struct Compiler<'a> {
    spec: &'a GameSpec,
    sprite_ix: HashMap<&'a str, usize>,
    global_ix: HashMap<&'a str, usize>,
    colours: BTreeSet<&'a str>,
    stmts: Vec<CStmt>,
    blocks: Vec<Vec<usize>>,
    keys: Vec<String>,
    tags: Vec<String>,
    seen: BTreeSet<StmtId>,
}

fn bad(stmt: StmtId, reason: impl Into<String>) -> SpecError {
    SpecError::BadStatement { stmt, reason: reason.into() }
}

fn intern(list: &mut Vec<String>, s: &str) -> usize {
    match list.iter().position(|k| k == s) {
        Some(i) => i,
        None => {
            list.push(s.to_string());
            list.len() - 1
        }
    }
}

impl<'a> Compiler<'a> {
    fn sprite(&self, stmt: StmtId, name: &str) -> Result<usize, SpecError> {
        self.sprite_ix
            .get(name)
            .copied()
            .ok_or_else(|| bad(stmt, format!("undeclared sprite `{name}`")))
    }

    fn var(&self, stmt: StmtId, owner: Option<usize>, name: &str) -> Result<VarRef, SpecError> {
        if let Some(s) = owner {
            if let Some(i) = self.spec.sprites[s].variables.keys().position(|k| k == name) {
                return Ok(VarRef::Private(s, i));
            }
        }
        self.global_ix
            .get(name)
            .map(|&i| VarRef::Global(i))
            .ok_or_else(|| bad(stmt, format!("undeclared variable `{name}`")))
    }

    fn expr(&self, stmt: StmtId, owner: Option<usize>, e: &Expr) -> Result<CExpr, SpecError> {
        Ok(match e {
            Expr::Num(v) => CExpr::Num(*v),
            Expr::Text(s) => CExpr::Text(s.clone()),
            Expr::Node(n) => match n {
                ExprNode::Var(name) => CExpr::Var(self.var(stmt, owner, name)?),
                ExprNode::XOf(s) => CExpr::X(self.sprite(stmt, s)?),
                ExprNode::YOf(s) => CExpr::Y(self.sprite(stmt, s)?),
                ExprNode::DirectionOf(s) => CExpr::Direction(self.sprite(stmt, s)?),
                ExprNode::MouseX => CExpr::MouseX,
                ExprNode::MouseY => CExpr::MouseY,
                ExprNode::Add(a, b) => {
                    CExpr::Add(Box::new(self.expr(stmt, owner, a)?), Box::new(self.expr(stmt, owner, b)?))
                }
                ExprNode::Sub(a, b) => {
                    CExpr::Sub(Box::new(self.expr(stmt, owner, a)?), Box::new(self.expr(stmt, owner, b)?))
                }
                ExprNode::Mul(a, b) => {
                    CExpr::Mul(Box::new(self.expr(stmt, owner, a)?), Box::new(self.expr(stmt, owner, b)?))
                }
            },
        })
    }

    fn pred(&mut self, stmt: StmtId, owner: Option<usize>, p: &Predicate) -> Result<CPred, SpecError> {
        Ok(match p {
            Predicate::Compare { left, op, right } => {
                CPred::Compare(self.expr(stmt, owner, left)?, *op, self.expr(stmt, owner, right)?)
            }
            Predicate::TouchingSprite { sprite, target } => {
                let a = self.sprite(stmt, sprite)?;
                let b = self.sprite(stmt, target)?;
                if a == b {
                    return Err(bad(stmt, format!("sprite `{sprite}` cannot touch itself")));
                }
                CPred::TouchingSprite(a, b)
            }
            Predicate::TouchingColour { sprite, colour } => {
                let a = self.sprite(stmt, sprite)?;
                if !self.colours.contains(colour.as_str()) {
                    return Err(bad(stmt, format!("undeclared colour `{colour}`")));
                }
                CPred::TouchingColour(a, colour.clone())
            }
            Predicate::KeyPressed { key } => {
                if !is_valid_key(key) {
                    return Err(bad(stmt, format!("unknown key `{key}`")));
                }
                CPred::Key(intern(&mut self.keys, key))
            }
            Predicate::StringEquals { var, literal } => {
                let r = self.var(stmt, owner, var)?;
                let is_string = match r {
                    VarRef::Global(i) => !self.spec.stage.variables.values().nth(i).is_some_and(Value::is_num),
                    VarRef::Private(..) => false,
                };
                if !is_string {
                    return Err(bad(stmt, format!("string comparison on numeric variable `{var}`")));
                }
                CPred::StringEquals(r, literal.clone())
            }
        })
    }

    fn block(&mut self, owner: Option<usize>, body: &[Statement]) -> Result<usize, SpecError> {
        let mut ixs = Vec::with_capacity(body.len());
        for s in body {
            ixs.push(self.statement(owner, s)?);
        }
        self.blocks.push(ixs);
        Ok(self.blocks.len() - 1)
    }

    fn statement(&mut self, owner: Option<usize>, s: &Statement) -> Result<usize, SpecError> {
        let id = s.id;
        if id == 0 {
            return Err(SpecError::UnassignedId);
        }
        if !self.seen.insert(id) {
            return Err(SpecError::DuplicateId(id));
        }
        let need_sprite = |what: &str| -> Result<usize, SpecError> {
            owner.ok_or_else(|| bad(id, format!("`{what}` needs a sprite owner")))
        };
        let op = match &s.kind {
            StmtKind::MoveSteps { steps } => {
                need_sprite("move-steps")?;
                COp::Move(self.expr(id, owner, steps)?)
            }
            StmtKind::GoTo { x, y } => {
                need_sprite("go-to")?;
                COp::GoTo(self.expr(id, owner, x)?, self.expr(id, owner, y)?)
            }
            StmtKind::PointInDirection { degrees } => {
                need_sprite("point-in-direction")?;
                COp::Point(self.expr(id, owner, degrees)?)
            }
            StmtKind::ChangeVariable { var, by } => {
                COp::Change(self.var(id, owner, var)?, self.expr(id, owner, by)?)
            }
            StmtKind::SetVariable { var, value } => {
                COp::Set(self.var(id, owner, var)?, self.expr(id, owner, value)?)
            }
            StmtKind::SwitchCostume { costume } => {
                let s = need_sprite("switch-costume")?;
                if *costume >= self.spec.sprites[s].costumes.len() {
                    return Err(bad(id, format!("costume {costume} out of range")));
                }
                COp::Costume(*costume)
            }
            StmtKind::SwitchBackdrop { backdrop } => {
                if *backdrop >= self.spec.stage.backdrops {
                    return Err(bad(id, format!("backdrop {backdrop} out of range")));
                }
                COp::Backdrop(*backdrop)
            }
            StmtKind::SetSize { percent } => {
                need_sprite("set-size")?;
                if !(*percent > 0.0) {
                    return Err(bad(id, "size must be positive"));
                }
                COp::Size(*percent)
            }
            StmtKind::Show => {
                need_sprite("show")?;
                COp::Show
            }
            StmtKind::Hide => {
                need_sprite("hide")?;
                COp::Hide
            }
            StmtKind::Say { .. } => COp::Say,
            StmtKind::Broadcast { tag } => COp::Broadcast(intern(&mut self.tags, tag)),
            StmtKind::If { cond, then, otherwise } => {
                let cond = self.pred(id, owner, cond)?;
                // reserve the slot so bodies get later arena indices
                let slot = self.reserve(id, owner);
                let then = self.block(owner, then)?;
                let otherwise = self.block(owner, otherwise)?;
                self.stmts[slot].op = COp::If { cond, then, otherwise };
                return Ok(slot);
            }
            StmtKind::Repeat { times, body } => {
                let times = self.expr(id, owner, times)?;
                let slot = self.reserve(id, owner);
                let body = self.block(owner, body)?;
                self.stmts[slot].op = COp::Repeat { times, body };
                return Ok(slot);
            }
            StmtKind::Forever { body } => {
                let slot = self.reserve(id, owner);
                let body = self.block(owner, body)?;
                self.stmts[slot].op = COp::Forever { body };
                return Ok(slot);
            }
            StmtKind::Wait { ticks } => COp::Wait(*ticks),
            StmtKind::RandomRangeAssign { var, lo, hi } => {
                if !(lo <= hi) {
                    return Err(bad(id, "random range has lo > hi"));
                }
                COp::Random(self.var(id, owner, var)?, *lo, *hi)
            }
            StmtKind::StopAll => COp::StopAll,
            StmtKind::DeclareWin => COp::Win,
            StmtKind::DeclareGameOver => COp::GameOver,
        };
        self.stmts.push(CStmt { id, owner, op });
        Ok(self.stmts.len() - 1)
    }

    fn reserve(&mut self, id: StmtId, owner: Option<usize>) -> usize {
        self.stmts.push(CStmt { id, owner, op: COp::Say });
        self.stmts.len() - 1
    }
}

fn validate_sprites(spec: &GameSpec) -> Result<(), SpecError> {
    let mut names = BTreeSet::new();
    for s in &spec.sprites {
        let fail = |reason: &str| SpecError::BadSprite { sprite: s.name.clone(), reason: reason.to_string() };
        if s.name == STAGE || !names.insert(s.name.as_str()) {
            return Err(SpecError::DuplicateSprite(s.name.clone()));
        }
        if s.costumes.is_empty() {
            return Err(fail("needs at least one costume"));
        }
        if s.costume >= s.costumes.len() {
            return Err(fail("initial costume out of range"));
        }
        if !(CANVAS_X.0..=CANVAS_X.1).contains(&s.x) || !(CANVAS_Y.0..=CANVAS_Y.1).contains(&s.y) {
            return Err(fail("initial position outside the canvas"));
        }
        if !(HEADING_RANGE.0..=HEADING_RANGE.1).contains(&s.heading) {
            return Err(fail("initial heading outside [-180, 180]"));
        }
        if !(s.size > 0.0) {
            return Err(fail("size must be positive"));
        }
        if s.costumes.iter().any(|c| !(c.width > 0.0 && c.height > 0.0)) {
            return Err(fail("costume dimensions must be positive"));
        }
    }
    Ok(())
}

impl GameInstance {
    pub fn load(spec: GameSpec) -> Result<Self, SpecError> {
        if spec.stage.backdrops == 0 {
            return Err(SpecError::NoBackdrops);
        }
        validate_sprites(&spec)?;
        let mut c = Compiler {
            spec: &spec,
            sprite_ix: spec.sprites.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect(),
            global_ix: spec.stage.variables.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect(),
            colours: spec.colours(),
            stmts: Vec::new(),
            blocks: Vec::new(),
            keys: Vec::new(),
            tags: Vec::new(),
            seen: BTreeSet::new(),
        };
        let mut scripts = Vec::new();
        let mut clickable = Vec::new();
        for (si, script) in spec.scripts.iter().enumerate() {
            let owner = if script.owner == STAGE {
                None
            } else {
                Some(c.sprite_ix.get(script.owner.as_str()).copied().ok_or_else(|| SpecError::BadScript {
                    script: si,
                    reason: format!("undeclared owner `{}`", script.owner),
                })?)
            };
            let trigger = match &script.trigger {
                Trigger::GameStart => CTrigger::Start,
                Trigger::KeyPressed { key } => {
                    if !is_valid_key(key) {
                        return Err(SpecError::BadScript { script: si, reason: format!("unknown key `{key}`") });
                    }
                    CTrigger::Key(intern(&mut c.keys, key))
                }
                Trigger::SpriteClicked { sprite } => {
                    let s = c.sprite_ix.get(sprite.as_str()).copied().ok_or_else(|| SpecError::BadScript {
                        script: si,
                        reason: format!("undeclared sprite `{sprite}`"),
                    })?;
                    if !clickable.contains(&s) {
                        clickable.push(s);
                    }
                    CTrigger::Click(s)
                }
                Trigger::Broadcast { tag } => CTrigger::Broadcast(intern(&mut c.tags, tag)),
            };
            let body = c.block(owner, &script.body)?;
            scripts.push(CScript { trigger, body });
        }

        let mut alphabet: Vec<ActionKind> = c.keys.iter().map(|k| ActionKind::PressKey { key: k.clone() }).collect();
        alphabet.extend(clickable.iter().map(|&s| ActionKind::ClickSprite { sprite: spec.sprites[s].name.clone() }));
        alphabet.push(ActionKind::Noop);

        let schema = build_schema(&spec, &c.stmts);
        let dense = c.stmts.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        let (stmts, blocks, keys) = (c.stmts, c.blocks, c.keys);
        let global_names = spec.stage.variables.keys().cloned().collect();
        let mut inst = GameInstance {
            spec,
            stmts,
            blocks,
            scripts,
            keys,
            global_names,
            dense,
            alphabet,
            schema,
            digest: String::new(),
        };
        inst.digest = inst.compute_digest();
        Ok(inst)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn action_alphabet(&self) -> &[ActionKind] {
        &self.alphabet
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    /// All statement ids in ascending order.
    pub fn statement_ids(&self) -> Vec<StmtId> {
        let mut ids: Vec<_> = self.stmts.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn statement_count(&self) -> usize {
        self.stmts.len()
    }

    pub fn script_count(&self) -> usize {
        self.scripts.len()
    }

    pub(crate) fn dense_index(&self, id: StmtId) -> Option<usize> {
        self.dense.get(&id).copied()
    }

    pub fn contains_statement(&self, id: StmtId) -> bool {
        self.dense.contains_key(&id)
    }

    /// Compatibility digest: statement ids, feature schema and action
    /// alphabet. A genome evolved on one instance can drive any instance
    /// with the same digest.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    fn compute_digest(&self) -> String {
        #[derive(Serialize)]
        struct Surface<'a> {
            statements: Vec<StmtId>,
            schema: &'a FeatureSchema,
            alphabet: &'a [ActionKind],
        }
        let surface = Surface { statements: self.statement_ids(), schema: &self.schema, alphabet: &self.alphabet };
        let bytes = serde_json::to_vec(&surface).expect("surface serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub(crate) fn key_index(&self, key: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    /// Resolves a predicate against this instance, with variables looked up
    /// in `owner`'s scope first (`None` for the stage).
    pub(crate) fn resolve_predicate(&self, pred: &Predicate, owner: Option<&str>) -> Result<CPred, SpecError> {
        let spec = &self.spec;
        let owner = owner.and_then(|o| spec.sprite_index(o));
        let mut c = Compiler {
            spec,
            sprite_ix: spec.sprites.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect(),
            global_ix: spec.stage.variables.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect(),
            colours: spec.colours(),
            stmts: Vec::new(),
            blocks: Vec::new(),
            keys: self.keys.clone(),
            tags: Vec::new(),
            seen: BTreeSet::new(),
        };
        let p = c.pred(0, owner, pred)?;
        if c.keys.len() != self.keys.len() {
            return Err(bad(0, "key is not listened to by this game"));
        }
        Ok(p)
    }
}

fn build_schema(spec: &GameSpec, stmts: &[CStmt]) -> FeatureSchema {
    // touching listeners, in document order, grouped by subject sprite
    let mut probes: BTreeMap<usize, Vec<Probe>> = BTreeMap::new();
    let mut max_size: Vec<f64> = spec.sprites.iter().map(|s| s.size).collect();
    for s in stmts {
        match &s.op {
            COp::If { cond: CPred::TouchingSprite(a, b), .. } => {
                let list = probes.entry(*a).or_default();
                if !list.contains(&Probe::Sprite(*b)) {
                    list.push(Probe::Sprite(*b));
                }
            }
            COp::If { cond: CPred::TouchingColour(a, col), .. } => {
                let list = probes.entry(*a).or_default();
                if !list.contains(&Probe::Colour(col.clone())) {
                    list.push(Probe::Colour(col.clone()));
                }
            }
            COp::Size(p) => {
                if let Some(o) = s.owner {
                    max_size[o] = max_size[o].max(*p);
                }
            }
            _ => {}
        }
    }

    let mut schema = FeatureSchema::new();
    for (i, sprite) in spec.sprites.iter().enumerate() {
        let name = || sprite.name.clone();
        schema.push(FeatureSource::SpriteX { sprite: name() }, FeatureSchema::position_x(), Reader::X(i));
        schema.push(FeatureSource::SpriteY { sprite: name() }, FeatureSchema::position_y(), Reader::Y(i));
        schema.push(FeatureSource::Heading { sprite: name() }, FeatureSchema::heading(), Reader::Heading(i));
        if sprite.costumes.len() > 1 {
            schema.push(
                FeatureSource::Costume { sprite: name() },
                Normalization::CostumeIndex { count: sprite.costumes.len() },
                Reader::Costume(i),
            );
        }
        schema.push(FeatureSource::Size { sprite: name() }, Normalization::SizeMax { max: max_size[i] }, Reader::Size(i));
        for (v, var) in sprite.variables.keys().enumerate() {
            schema.push(
                FeatureSource::PrivateVariable { sprite: name(), var: var.clone() },
                Normalization::Squash,
                Reader::Private(i, v),
            );
        }
        for probe in probes.remove(&i).unwrap_or_default() {
            let target = match &probe {
                Probe::Sprite(t) => ProbeTarget::Sprite(spec.sprites[*t].name.clone()),
                Probe::Colour(c) => ProbeTarget::Colour(c.clone()),
            };
            schema.push(FeatureSource::Probe { sprite: name(), target }, FeatureSchema::distance(), Reader::Probe(i, probe));
        }
    }
    for (v, (name, value)) in spec.stage.variables.iter().enumerate() {
        if value.is_num() {
            schema.push(FeatureSource::GlobalVariable { var: name.clone() }, Normalization::Squash, Reader::Global(v));
        }
    }
    if spec.reads_mouse() {
        schema.push(FeatureSource::MouseX, FeatureSchema::position_x(), Reader::MouseX);
        schema.push(FeatureSource::MouseY, FeatureSchema::position_y(), Reader::MouseY);
    }
    schema
}

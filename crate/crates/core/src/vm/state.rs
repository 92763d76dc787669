//! Runtime state and the tick interpreter.
//!
//! Scripts are scheduled cooperatively in spec order. Within a tick each
//! active script runs until it yields: at a `wait`, at the back-edge of a
//! `repeat`/`forever`, or when its body ends.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::action::Action;
use super::geometry::{clamp_x, clamp_y, wrap_heading};
use super::instance::{CExpr, COp, CPred, CTrigger, GameInstance, VarRef};
use super::spec::{CmpOp, StmtId, Value, CANVAS_DIAGONAL};

/// Constant added on strict comparisons and returned by flat guards.
pub const K: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    Running,
    Won,
    GameOver,
    Timeout,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpriteState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub costume: usize,
    pub size: f64,
    pub visible: bool,
    pub vars: Vec<f64>,
}

/// Per-control-location summary of every predicate evaluation in an
/// episode: how often each outcome was taken and the smallest raw branch
/// distance seen towards each outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationTrace {
    pub evaluations: u32,
    pub taken_true: u32,
    pub taken_false: u32,
    pub min_to_true: f64,
    pub min_to_false: f64,
}

impl Default for LocationTrace {
    fn default() -> Self {
        LocationTrace {
            evaluations: 0,
            taken_true: 0,
            taken_false: 0,
            min_to_true: f64::INFINITY,
            min_to_false: f64::INFINITY,
        }
    }
}

impl LocationTrace {
    fn record(&mut self, outcome: bool, to_true: f64, to_false: f64) {
        self.evaluations += 1;
        if outcome {
            self.taken_true += 1;
        } else {
            self.taken_false += 1;
        }
        self.min_to_true = self.min_to_true.min(to_true);
        self.min_to_false = self.min_to_false.min(to_false);
    }

    pub fn min_towards(&self, outcome: bool) -> f64 {
        if outcome {
            self.min_to_true
        } else {
            self.min_to_false
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum FrameKind {
    Plain,
    Repeat(u64),
    Forever,
}

#[derive(Clone, Debug, PartialEq)]
struct Frame {
    block: usize,
    pc: usize,
    kind: FrameKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Thread {
    frames: Vec<Frame>,
    wait: u32,
}

impl Thread {
    fn active(&self) -> bool {
        !self.frames.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub sprites: Vec<SpriteState>,
    pub globals: Vec<Value>,
    pub backdrop: u32,
    pub mouse: (f64, f64),
    pub mouse_down: bool,
    pub tick: u64,
    pub terminal: Terminal,
    held: Vec<u32>,
    rng: ChaCha8Rng,
    covered: Vec<bool>,
    fired: Vec<bool>,
    trace: Vec<LocationTrace>,
    threads: Vec<Thread>,
    pending: Vec<usize>,
    clicked: Option<usize>,
}

impl GameState {
    pub fn is_running(&self) -> bool {
        self.terminal == Terminal::Running
    }

    /// Covered statement ids, ascending.
    pub fn covered_ids(&self, inst: &GameInstance) -> Vec<StmtId> {
        let mut ids: Vec<StmtId> =
            self.covered.iter().zip(&inst.stmts).filter(|(c, _)| **c).map(|(_, s)| s.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn is_covered(&self, inst: &GameInstance, id: StmtId) -> bool {
        inst.dense_index(id).is_some_and(|i| self.covered[i])
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|c| **c).count()
    }

    /// Scripts whose trigger has fired at least once, by script index.
    pub fn fired_scripts(&self) -> Vec<bool> {
        self.fired.clone()
    }

    pub fn is_key_held(&self, inst: &GameInstance, key: &str) -> bool {
        inst.key_index(key).is_some_and(|k| self.held[k] > 0)
    }

    pub fn global(&self, inst: &GameInstance, name: &str) -> Option<&Value> {
        inst.global_names.iter().position(|n| n == name).map(|i| &self.globals[i])
    }

    pub fn sprite(&self, inst: &GameInstance, name: &str) -> Option<&SpriteState> {
        inst.spec().sprite_index(name).map(|i| &self.sprites[i])
    }

    pub fn location_trace(&self, inst: &GameInstance, id: StmtId) -> Option<&LocationTrace> {
        inst.dense_index(id).map(|i| &self.trace[i])
    }
}

impl GameInstance {
    /// Initial state with the episode rng seeded by `seed`.
    pub fn initial_state(&self, seed: u64) -> GameState {
        let spec = self.spec();
        GameState {
            sprites: spec
                .sprites
                .iter()
                .map(|s| SpriteState {
                    x: s.x,
                    y: s.y,
                    heading: s.heading,
                    costume: s.costume,
                    size: s.size,
                    visible: s.visible,
                    vars: s.variables.values().copied().collect(),
                })
                .collect(),
            globals: spec.stage.variables.values().cloned().collect(),
            backdrop: 0,
            mouse: (0.0, 0.0),
            mouse_down: false,
            tick: 0,
            terminal: Terminal::Running,
            held: vec![0; self.keys.len()],
            rng: ChaCha8Rng::seed_from_u64(seed),
            covered: vec![false; self.stmts.len()],
            fired: vec![false; self.scripts.len()],
            trace: vec![LocationTrace::default(); self.stmts.len()],
            threads: vec![Thread::default(); self.scripts.len()],
            pending: Vec::new(),
            clicked: None,
        }
    }

    /// Advances one tick. Terminal states are returned unchanged.
    pub fn step(&self, mut state: GameState, action: &Action) -> GameState {
        self.step_in_place(&mut state, action);
        state
    }

    pub fn step_in_place(&self, st: &mut GameState, action: &Action) {
        if !st.is_running() {
            return;
        }
        match action {
            Action::PressKey { key, ticks } => {
                if let Some(k) = self.key_index(key) {
                    st.held[k] = st.held[k].max(*ticks);
                }
            }
            Action::ClickSprite { sprite } => {
                if let Some(s) = self.spec().sprite_index(sprite) {
                    let sp = &st.sprites[s];
                    st.mouse = (sp.x, sp.y);
                    st.mouse_down = true;
                    if sp.visible {
                        st.clicked = Some(s);
                    }
                }
            }
            Action::MoveMouse { x, y } => st.mouse = (clamp_x(*x), clamp_y(*y)),
            Action::Noop => {}
        }

        let pending = std::mem::take(&mut st.pending);
        for (i, script) in self.scripts.iter().enumerate() {
            let (start, restart) = match script.trigger {
                CTrigger::Start => (st.tick == 0, false),
                CTrigger::Key(k) => (st.held[k] > 0, false),
                CTrigger::Click(s) => (st.clicked == Some(s), false),
                CTrigger::Broadcast(t) => (pending.contains(&t), true),
            };
            if start && (restart || !st.threads[i].active()) {
                st.threads[i] = Thread {
                    frames: vec![Frame { block: script.body, pc: 0, kind: FrameKind::Plain }],
                    wait: 0,
                };
                st.fired[i] = true;
            }
        }

        for i in 0..self.scripts.len() {
            if !st.threads[i].active() {
                continue;
            }
            let mut thread = std::mem::take(&mut st.threads[i]);
            self.run_thread(st, &mut thread);
            st.threads[i] = thread;
            if !st.is_running() {
                st.threads.iter_mut().for_each(|t| t.frames.clear());
                break;
            }
        }

        for h in &mut st.held {
            *h = h.saturating_sub(1);
        }
        st.clicked = None;
        st.mouse_down = false;
        st.tick += 1;
    }

    fn run_thread(&self, st: &mut GameState, th: &mut Thread) {
        if th.wait > 0 {
            th.wait -= 1;
            return;
        }
        loop {
            let Some(frame) = th.frames.last_mut() else { return };
            let block = &self.blocks[frame.block];
            if frame.pc >= block.len() {
                match frame.kind {
                    FrameKind::Plain => {
                        th.frames.pop();
                        continue;
                    }
                    FrameKind::Repeat(left) => {
                        if left > 1 {
                            frame.kind = FrameKind::Repeat(left - 1);
                            frame.pc = 0;
                        } else {
                            th.frames.pop();
                        }
                        return;
                    }
                    FrameKind::Forever => {
                        frame.pc = 0;
                        return;
                    }
                }
            }
            let ix = block[frame.pc];
            frame.pc += 1;
            st.covered[ix] = true;
            let stmt = &self.stmts[ix];
            let owner = stmt.owner;
            match &stmt.op {
                COp::If { cond, then, otherwise } => {
                    let (outcome, to_true, to_false) = self.eval_pred(st, cond);
                    st.trace[ix].record(outcome, to_true, to_false);
                    let next = if outcome { *then } else { *otherwise };
                    if !self.blocks[next].is_empty() {
                        th.frames.push(Frame { block: next, pc: 0, kind: FrameKind::Plain });
                    }
                }
                COp::Repeat { times, body } => {
                    let n = self.eval(st, times).as_num().round();
                    let enter = n >= 1.0;
                    // body entry behaves like `times >= 1`
                    st.trace[ix].record(enter, if enter { 0.0 } else { 1.0 - n }, if enter { n } else { 0.0 });
                    if enter && !self.blocks[*body].is_empty() {
                        th.frames.push(Frame { block: *body, pc: 0, kind: FrameKind::Repeat(n as u64) });
                    }
                }
                COp::Forever { body } => {
                    st.trace[ix].record(true, 0.0, K);
                    th.frames.push(Frame { block: *body, pc: 0, kind: FrameKind::Forever });
                }
                COp::Wait(t) => {
                    if *t > 0 {
                        th.wait = t - 1;
                        return;
                    }
                }
                COp::StopAll | COp::GameOver => {
                    st.terminal = Terminal::GameOver;
                    return;
                }
                COp::Win => {
                    st.terminal = Terminal::Won;
                    return;
                }
                op => self.exec_simple(st, owner, op),
            }
        }
    }

    fn exec_simple(&self, st: &mut GameState, owner: Option<usize>, op: &COp) {
        let me = owner.unwrap_or(usize::MAX);
        match op {
            COp::Move(steps) => {
                let n = self.eval(st, steps).as_num();
                let s = &mut st.sprites[me];
                let rad = s.heading.to_radians();
                s.x = clamp_x(s.x + n * rad.sin());
                s.y = clamp_y(s.y + n * rad.cos());
            }
            COp::GoTo(x, y) => {
                let x = self.eval(st, x).as_num();
                let y = self.eval(st, y).as_num();
                let s = &mut st.sprites[me];
                s.x = clamp_x(x);
                s.y = clamp_y(y);
            }
            COp::Point(d) => {
                let d = self.eval(st, d).as_num();
                st.sprites[me].heading = wrap_heading(d);
            }
            COp::Change(var, by) => {
                let by = self.eval(st, by).as_num();
                let cur = self.read_var(st, *var).as_num();
                self.write_var(st, *var, Value::Num(cur + by));
            }
            COp::Set(var, value) => {
                let v = self.eval(st, value);
                self.write_var(st, *var, v);
            }
            COp::Costume(c) => st.sprites[me].costume = *c,
            COp::Backdrop(b) => st.backdrop = *b,
            COp::Size(p) => st.sprites[me].size = *p,
            COp::Show => st.sprites[me].visible = true,
            COp::Hide => st.sprites[me].visible = false,
            COp::Say => {}
            COp::Broadcast(tag) => {
                if !st.pending.contains(tag) {
                    st.pending.push(*tag);
                }
            }
            COp::Random(var, lo, hi) => {
                let v = if lo.fract() == 0.0 && hi.fract() == 0.0 {
                    st.rng.random_range(*lo as i64..=*hi as i64) as f64
                } else {
                    st.rng.random_range(*lo..=*hi)
                };
                self.write_var(st, *var, Value::Num(v));
            }
            COp::If { .. } | COp::Repeat { .. } | COp::Forever { .. } | COp::Wait(_) => unreachable!(),
            COp::StopAll | COp::Win | COp::GameOver => unreachable!(),
        }
    }

    fn read_var(&self, st: &GameState, var: VarRef) -> Value {
        match var {
            VarRef::Global(i) => st.globals[i].clone(),
            VarRef::Private(s, i) => Value::Num(st.sprites[s].vars[i]),
        }
    }

    fn write_var(&self, st: &mut GameState, var: VarRef, v: Value) {
        match var {
            VarRef::Global(i) => st.globals[i] = v,
            VarRef::Private(s, i) => st.sprites[s].vars[i] = v.as_num(),
        }
    }

    pub(crate) fn eval(&self, st: &GameState, e: &CExpr) -> Value {
        let num = |e: &CExpr| self.eval(st, e).as_num();
        match e {
            CExpr::Num(v) => Value::Num(*v),
            CExpr::Text(s) => Value::Str(s.clone()),
            CExpr::Var(v) => self.read_var(st, *v),
            CExpr::X(s) => Value::Num(st.sprites[*s].x),
            CExpr::Y(s) => Value::Num(st.sprites[*s].y),
            CExpr::Direction(s) => Value::Num(st.sprites[*s].heading),
            CExpr::MouseX => Value::Num(st.mouse.0),
            CExpr::MouseY => Value::Num(st.mouse.1),
            CExpr::Add(a, b) => Value::Num(num(a) + num(b)),
            CExpr::Sub(a, b) => Value::Num(num(a) - num(b)),
            CExpr::Mul(a, b) => Value::Num(num(a) * num(b)),
        }
    }

    /// Evaluates a predicate, returning the outcome and the raw branch
    /// distances towards `true` and towards `false`.
    pub(crate) fn eval_pred(&self, st: &GameState, p: &CPred) -> (bool, f64, f64) {
        match p {
            CPred::Compare(l, op, r) => {
                let a = self.eval(st, l).as_num();
                let b = self.eval(st, r).as_num();
                let outcome = op.eval(a, b);
                (outcome, compare_distance(*op, a, b, true), compare_distance(*op, a, b, false))
            }
            CPred::TouchingSprite(a, b) => gap_distances(self.sprite_gap(st, *a, *b)),
            CPred::TouchingColour(a, c) => gap_distances(self.colour_gap(st, *a, c)),
            CPred::Key(k) => flat(st.held[*k] > 0),
            CPred::StringEquals(var, lit) => flat(matches!(self.read_var(st, *var), Value::Str(s) if s == *lit)),
        }
    }
}

fn flat(outcome: bool) -> (bool, f64, f64) {
    if outcome {
        (true, 0.0, K)
    } else {
        (false, K, 0.0)
    }
}

fn gap_distances(gap: f64) -> (bool, f64, f64) {
    let touching = gap == 0.0;
    (touching, gap.min(CANVAS_DIAGONAL), if touching { K } else { 0.0 })
}

/// Raw branch distance of `a op b` from evaluating to `desired`.
pub fn compare_distance(op: CmpOp, a: f64, b: f64, desired: bool) -> f64 {
    if op.eval(a, b) == desired {
        return 0.0;
    }
    let d = match (op, desired) {
        (CmpOp::Lt, true) => a - b + K,
        (CmpOp::Lt, false) => b - a,
        (CmpOp::Le, true) => a - b,
        (CmpOp::Le, false) => b - a + K,
        (CmpOp::Gt, true) => b - a + K,
        (CmpOp::Gt, false) => a - b,
        (CmpOp::Ge, true) => b - a,
        (CmpOp::Ge, false) => a - b + K,
        (CmpOp::Eq, true) => (a - b).abs(),
        (CmpOp::Eq, false) => K,
    };
    // NaN operands never satisfy a comparison
    if d.is_nan() {
        K
    } else {
        d
    }
}

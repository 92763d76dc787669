//! Behaviour characterisation: a fixed-dimension, `[0,1]`-normalised view of
//! a game state. The same vector feeds the networks and the novelty metric.

use serde::{Deserialize, Serialize};

use super::geometry::Rect;
use super::instance::GameInstance;
use super::spec::{CANVAS_DIAGONAL, CANVAS_X, CANVAS_Y, HEADING_RANGE};
use super::state::GameState;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeTarget {
    Sprite(String),
    Colour(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum FeatureSource {
    SpriteX { sprite: String },
    SpriteY { sprite: String },
    Heading { sprite: String },
    Costume { sprite: String },
    Size { sprite: String },
    PrivateVariable { sprite: String, var: String },
    GlobalVariable { var: String },
    MouseX,
    MouseY,
    Probe { sprite: String, target: ProbeTarget },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Normalization {
    /// `(v - min) / (max - min)`.
    Linear { min: f64, max: f64 },
    /// `i / (count - 1)`; only emitted for `count > 1`.
    CostumeIndex { count: usize },
    /// `size / max`.
    SizeMax { max: f64 },
    /// `0.5 + v / (2 (1 + |v|))` for unbounded reals.
    Squash,
}

impl Normalization {
    pub fn apply(self, v: f64) -> f64 {
        let n = match self {
            Normalization::Linear { min, max } => (v - min) / (max - min),
            Normalization::CostumeIndex { count } => v / (count - 1) as f64,
            Normalization::SizeMax { max } => v / max,
            Normalization::Squash => squash(v),
        };
        n.clamp(0.0, 1.0)
    }

    /// Raw value range the rule expects; `None` for unbounded inputs.
    pub fn raw_bounds(self) -> Option<(f64, f64)> {
        match self {
            Normalization::Linear { min, max } => Some((min, max)),
            Normalization::CostumeIndex { count } => Some((0.0, (count - 1) as f64)),
            Normalization::SizeMax { max } => Some((0.0, max)),
            Normalization::Squash => None,
        }
    }
}

pub fn squash(v: f64) -> f64 {
    0.5 + v / (2.0 * (1.0 + v.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub index: usize,
    #[serde(flatten)]
    pub source: FeatureSource,
    pub normalization: Normalization,
    pub raw_bounds: Option<(f64, f64)>,
}

/// Resolved form of a descriptor, indexed into the runtime state.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Probe {
    Sprite(usize),
    Colour(String),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Reader {
    X(usize),
    Y(usize),
    Heading(usize),
    Costume(usize),
    Size(usize),
    Private(usize, usize),
    Global(usize),
    MouseX,
    MouseY,
    Probe(usize, Probe),
}

impl Reader {
    fn owner(&self) -> Option<usize> {
        match self {
            Reader::X(s)
            | Reader::Y(s)
            | Reader::Heading(s)
            | Reader::Costume(s)
            | Reader::Size(s)
            | Reader::Private(s, _)
            | Reader::Probe(s, _) => Some(*s),
            Reader::Global(_) | Reader::MouseX | Reader::MouseY => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureSchema {
    pub features: Vec<FeatureDescriptor>,
    #[serde(skip)]
    pub(crate) readers: Vec<Reader>,
}

impl FeatureSchema {
    pub(crate) fn new() -> Self {
        FeatureSchema { features: Vec::new(), readers: Vec::new() }
    }

    pub(crate) fn push(&mut self, source: FeatureSource, normalization: Normalization, reader: Reader) {
        self.features.push(FeatureDescriptor {
            index: self.features.len(),
            source,
            normalization,
            raw_bounds: normalization.raw_bounds(),
        });
        self.readers.push(reader);
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    pub(crate) fn position_x() -> Normalization {
        Normalization::Linear { min: CANVAS_X.0, max: CANVAS_X.1 }
    }

    pub(crate) fn position_y() -> Normalization {
        Normalization::Linear { min: CANVAS_Y.0, max: CANVAS_Y.1 }
    }

    pub(crate) fn heading() -> Normalization {
        Normalization::Linear { min: HEADING_RANGE.0, max: HEADING_RANGE.1 }
    }

    pub(crate) fn distance() -> Normalization {
        Normalization::Linear { min: -CANVAS_DIAGONAL, max: CANVAS_DIAGONAL }
    }
}

/// Dense behaviour vector, every component in `[0,1]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BehaviorVector(pub Vec<f64>);

impl BehaviorVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for BehaviorVector {
    fn from(v: Vec<f64>) -> Self {
        BehaviorVector(v)
    }
}

impl GameInstance {
    /// Reads the state through the instance's schema. Components of
    /// currently invisible sprites are masked to zero.
    pub fn extract_features(&self, state: &GameState) -> BehaviorVector {
        let schema = self.schema();
        let mut out = Vec::with_capacity(schema.dimension());
        for (desc, reader) in schema.features.iter().zip(&schema.readers) {
            if let Some(owner) = reader.owner() {
                if !state.sprites[owner].visible {
                    out.push(0.0);
                    continue;
                }
            }
            let raw = match reader {
                Reader::X(s) => state.sprites[*s].x,
                Reader::Y(s) => state.sprites[*s].y,
                Reader::Heading(s) => state.sprites[*s].heading,
                Reader::Costume(s) => state.sprites[*s].costume as f64,
                Reader::Size(s) => state.sprites[*s].size,
                Reader::Private(s, v) => state.sprites[*s].vars[*v],
                Reader::Global(v) => state.globals[*v].as_num(),
                Reader::MouseX => state.mouse.0,
                Reader::MouseY => state.mouse.1,
                Reader::Probe(s, Probe::Sprite(t)) => self.sprite_gap(state, *s, *t),
                Reader::Probe(s, Probe::Colour(c)) => self.colour_gap(state, *s, c),
            };
            out.push(desc.normalization.apply(raw));
        }
        BehaviorVector(out)
    }

    pub(crate) fn rect(&self, state: &GameState, sprite: usize) -> Rect {
        let s = &state.sprites[sprite];
        let c = &self.spec().sprites[sprite].costumes[s.costume];
        let scale = s.size / 100.0;
        Rect::new(s.x, s.y, c.width * scale, c.height * scale)
    }

    /// Gap between two sprites; the canvas diagonal when either is hidden.
    pub(crate) fn sprite_gap(&self, state: &GameState, a: usize, b: usize) -> f64 {
        if !state.sprites[a].visible || !state.sprites[b].visible {
            return CANVAS_DIAGONAL;
        }
        self.rect(state, a).gap(&self.rect(state, b)).min(CANVAS_DIAGONAL)
    }

    /// Gap from a sprite to the nearest visible pixel of `colour` on any
    /// other sprite; the canvas diagonal when no such pixel exists.
    pub(crate) fn colour_gap(&self, state: &GameState, sprite: usize, colour: &str) -> f64 {
        if !state.sprites[sprite].visible {
            return CANVAS_DIAGONAL;
        }
        let me = self.rect(state, sprite);
        let mut best = CANVAS_DIAGONAL;
        for (i, other) in state.sprites.iter().enumerate() {
            if i == sprite || !other.visible {
                continue;
            }
            if self.spec().sprites[i].costumes[other.costume].colour == colour {
                best = best.min(me.gap(&self.rect(state, i)));
            }
        }
        best
    }
}

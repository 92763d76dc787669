use serde::{Deserialize, Serialize};

/// One input event sent to the game by a policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Action {
    /// Holds `key` down for `ticks` ticks, starting with the current one.
    PressKey { key: String, ticks: u32 },
    ClickSprite { sprite: String },
    MoveMouse { x: f64, y: f64 },
    Noop,
}

/// An entry of the action alphabet a network chooses from. Key presses
/// are held for one decision interval when realised.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ActionKind {
    PressKey { key: String },
    ClickSprite { sprite: String },
    Noop,
}

impl ActionKind {
    pub fn realise(&self, hold_ticks: u32) -> Action {
        match self {
            ActionKind::PressKey { key } => Action::PressKey { key: key.clone(), ticks: hold_ticks },
            ActionKind::ClickSprite { sprite } => Action::ClickSprite { sprite: sprite.clone() },
            ActionKind::Noop => Action::Noop,
        }
    }
}

impl std::fmt::Display for ActionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionKind::PressKey { key } => write!(f, "press:{key}"),
            ActionKind::ClickSprite { sprite } => write!(f, "click:{sprite}"),
            ActionKind::Noop => write!(f, "noop"),
        }
    }
}

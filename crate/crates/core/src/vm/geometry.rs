//! Axis-aligned rectangle helpers. Sprites never rotate their hitbox.

use super::spec::{CANVAS_X, CANVAS_Y};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub cx: f64,
    pub cy: f64,
    pub half_w: f64,
    pub half_h: f64,
}

impl Rect {
    pub fn new(cx: f64, cy: f64, width: f64, height: f64) -> Self {
        Rect { cx, cy, half_w: width / 2.0, half_h: height / 2.0 }
    }

    /// Euclidean distance between the closest points of two rectangles;
    /// zero when they overlap or share an edge.
    pub fn gap(&self, other: &Rect) -> f64 {
        let dx = ((self.cx - other.cx).abs() - (self.half_w + other.half_w)).max(0.0);
        let dy = ((self.cy - other.cy).abs() - (self.half_h + other.half_h)).max(0.0);
        dx.hypot(dy)
    }

    pub fn touches(&self, other: &Rect) -> bool {
        self.gap(other) == 0.0
    }
}

pub fn clamp_x(x: f64) -> f64 {
    x.clamp(CANVAS_X.0, CANVAS_X.1)
}

pub fn clamp_y(y: f64) -> f64 {
    y.clamp(CANVAS_Y.0, CANVAS_Y.1)
}

/// Wraps an angle into `(-180, 180]`.
pub fn wrap_heading(deg: f64) -> f64 {
    let h = deg - 360.0 * ((deg + 180.0) / 360.0).floor();
    if h == -180.0 {
        180.0
    } else {
        h
    }
}

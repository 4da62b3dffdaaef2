//! Planar rectangles and the global spatial domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side of the coarsest cell and the lattice every division snaps to.
pub const LATTICE_M: f64 = 5000.0;

/// Axis-aligned rectangle in planar meters, half-open on the upper sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max
    }

    /// Positive-area overlap.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x_min.max(other.x_min),
            self.y_min.max(other.y_min),
            self.x_max.min(other.x_max),
            self.y_max.min(other.y_max),
        );
        (r.x_min < r.x_max && r.y_min < r.y_max).then_some(r)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x_min >= self.x_min
            && other.y_min >= self.y_min
            && other.x_max <= self.x_max
            && other.y_max <= self.y_max
    }

    /// Parses `x_min,y_min,x_max,y_max`.
    pub fn parse(s: &str) -> Result<Rect> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(vec![format!("bad rectangle `{s}`")]))?;
        match parts.as_slice() {
            &[a, b, c, d] if a < c && b < d => Ok(Rect::new(a, b, c, d)),
            _ => Err(Error::Config(vec![format!(
                "rectangle `{s}` must be x_min,y_min,x_max,y_max with min < max"
            )])),
        }
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.x_min, self.y_min, self.x_max, self.y_max
        )
    }
}

/// The global spatial domain. Its sides are positive multiples of 5000 m so
/// every granularity tiles it exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Rect", into = "Rect")]
pub struct Domain {
    rect: Rect,
}

impl Domain {
    pub fn new(rect: Rect) -> Result<Self> {
        let problems = Self::violations(&rect);
        if problems.is_empty() {
            Ok(Domain { rect })
        } else {
            Err(Error::Config(problems))
        }
    }

    pub(crate) fn violations(rect: &Rect) -> Vec<String> {
        let mut v = Vec::new();
        for (name, side) in [("width", rect.width()), ("height", rect.height())] {
            let cells = side / LATTICE_M;
            if side.is_nan() || side <= 0.0 || cells.fract() != 0.0 {
                v.push(format!(
                    "domain {name} {side} m is not a positive multiple of 5000 m"
                ));
            }
        }
        v
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.rect.x_min, self.rect.y_min)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.rect.contains(x, y)
    }

    /// Number of 5000 m lattice cells along x and y.
    pub fn lattice_dims(&self) -> (u32, u32) {
        (
            (self.rect.width() / LATTICE_M) as u32,
            (self.rect.height() / LATTICE_M) as u32,
        )
    }
}

impl TryFrom<Rect> for Domain {
    type Error = Error;

    fn try_from(r: Rect) -> Result<Self> {
        Domain::new(r)
    }
}

impl From<Domain> for Rect {
    fn from(d: Domain) -> Rect {
        d.rect
    }
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            rect: Rect::new(-100_000.0, -100_000.0, 100_000.0, 100_000.0),
        }
    }
}

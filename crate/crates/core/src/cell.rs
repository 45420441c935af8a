//! Agent state. Agents are never removed from the world; death flips the
//! `alive` flag and dead agents take no further part in any step.

use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Tumor,
    Worker,
    Cargo,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Tumor => "tumor",
            CellKind::Worker => "worker",
            CellKind::Cargo => "cargo",
        }
    }

    pub fn parse(s: &str) -> Option<CellKind> {
        match s {
            "tumor" => Some(CellKind::Tumor),
            "worker" => Some(CellKind::Worker),
            "cargo" => Some(CellKind::Cargo),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub kind: CellKind,
    pub pos: Vec2,
    pub radius: f64,
    pub damage: f64,
    pub alive: bool,
    /// Worker<->cargo link; always mutual.
    pub attached_to: Option<usize>,
    /// Persistent motility direction (unit length or zero).
    pub velocity_dir: Vec2,
    /// Minutes until the motility direction is redrawn.
    pub persistence_clock: f64,
    /// Cargo attachment receptor; drops to 0 on release so a spent cargo is
    /// never picked up again.
    pub receptor: f64,
    /// Cargo has been dropped by its worker and is dosing.
    pub released: bool,
}

impl Cell {
    pub fn new(kind: CellKind, pos: Vec2, radius: f64) -> Self {
        Cell {
            kind,
            pos,
            radius,
            damage: 0.0,
            alive: true,
            attached_to: None,
            velocity_dir: Vec2::ZERO,
            persistence_clock: 0.0,
            receptor: 1.0,
            released: false,
        }
    }
}

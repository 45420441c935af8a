//! Tumor snapshot: the post-growth cell population reloaded for every
//! treatment evaluation.
//!
//! File layout (plain text, floats at 17 significant digits so a
//! load/save cycle is byte-identical):
//!
//! ```text
//! NOVABOT-SNAPSHOT v1
//! domain_half_width=<um> seed=<int>
//! <kind>,<x>,<y>,<radius>          one row per cell
//! OXYGEN <nx> <ny> <spacing>
//! <row-major whitespace-separated values, one grid row per line>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::cell::{Cell, CellKind};
use crate::error::{Error, Result};
use crate::oxygen::OxygenField;
use crate::params::SimParams;
use crate::text::{fmt_f64, parse_finite_f64};
use crate::vec2::Vec2;

pub const SNAPSHOT_MAGIC: &str = "NOVABOT-SNAPSHOT";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct TumorSnapshot {
    pub format_version: u32,
    pub domain_half_width: f64,
    pub rng_seed_of_growth: u64,
    /// (kind, x, y, radius); only tumor cells.
    pub cells: Vec<(CellKind, f64, f64, f64)>,
    pub oxygen: OxygenField,
}

impl TumorSnapshot {
    /// Capture the live tumor cells and oxygen field of a world.
    pub fn from_world(world: &crate::world::WorldState, seed: u64, half_width: f64) -> Self {
        let cells = world
            .cells
            .iter()
            .filter(|c| c.alive && c.kind == CellKind::Tumor)
            .map(|c| (c.kind, c.pos.x, c.pos.y, c.radius))
            .collect();
        TumorSnapshot {
            format_version: SNAPSHOT_VERSION,
            domain_half_width: half_width,
            rng_seed_of_growth: seed,
            cells,
            oxygen: world.oxygen.clone(),
        }
    }

    pub fn to_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .map(|&(kind, x, y, r)| Cell::new(kind, Vec2::new(x, y), r))
            .collect()
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{SNAPSHOT_MAGIC} v{}", self.format_version);
        let _ = writeln!(
            s,
            "domain_half_width={} seed={}",
            fmt_f64(self.domain_half_width),
            self.rng_seed_of_growth
        );
        for &(kind, x, y, r) in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                kind.as_str(),
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(r)
            );
        }
        let ox = &self.oxygen;
        let _ = writeln!(s, "OXYGEN {} {} {}", ox.nx, ox.ny, fmt_f64(ox.spacing));
        for j in 0..ox.ny {
            let row: Vec<String> = (0..ox.nx)
                .map(|i| fmt_f64(ox.values[j * ox.nx + i]))
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    /// Parse snapshot text. Solver constants (diffusion, decay, boundary)
    /// are not stored in the file; they come from the active params.
    pub fn parse(text: &str, params: &SimParams, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::parse(path, line, msg);
        let mut lines = text.lines().enumerate();

        let (ln, header) = lines
            .next()
            .ok_or_else(|| perr(1, "empty file".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(SNAPSHOT_MAGIC) {
            return Err(perr(ln + 1, format!("bad magic in `{header}`")));
        }
        let ver = parts
            .next()
            .and_then(|v| v.strip_prefix('v'))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| perr(ln + 1, format!("bad version in `{header}`")))?;
        if ver != SNAPSHOT_VERSION {
            return Err(perr(
                ln + 1,
                format!("unsupported format_version {ver}, expected {SNAPSHOT_VERSION}"),
            ));
        }

        let (ln, meta) = lines
            .next()
            .ok_or_else(|| perr(2, "missing metadata line".into()))?;
        let mut half_width = None;
        let mut seed = None;
        for field in meta.split_whitespace() {
            match field.split_once('=') {
                Some(("domain_half_width", v)) => {
                    half_width = Some(parse_finite_f64(v).map_err(|e| perr(ln + 1, e))?);
                }
                Some(("seed", v)) => {
                    seed = Some(
                        v.parse::<u64>()
                            .map_err(|_| perr(ln + 1, format!("invalid seed `{v}`")))?,
                    );
                }
                _ => return Err(perr(ln + 1, format!("unknown metadata field `{field}`"))),
            }
        }
        let half_width =
            half_width.ok_or_else(|| perr(ln + 1, "missing domain_half_width".into()))?;
        let seed = seed.ok_or_else(|| perr(ln + 1, "missing seed".into()))?;

        let mut cells = Vec::new();
        let mut oxygen_header: Option<(usize, usize, usize, f64)> = None;
        for (ln, line) in lines.by_ref() {
            if let Some(rest) = line.strip_prefix("OXYGEN ") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(perr(ln + 1, format!("bad OXYGEN header `{line}`")));
                }
                let nx = toks[0]
                    .parse::<usize>()
                    .map_err(|_| perr(ln + 1, format!("invalid nx `{}`", toks[0])))?;
                let ny = toks[1]
                    .parse::<usize>()
                    .map_err(|_| perr(ln + 1, format!("invalid ny `{}`", toks[1])))?;
                let spacing = parse_finite_f64(toks[2]).map_err(|e| perr(ln + 1, e))?;
                oxygen_header = Some((ln, nx, ny, spacing));
                break;
            }
            let toks: Vec<&str> = line.split(',').collect();
            if toks.len() != 4 {
                return Err(perr(ln + 1, format!("expected 4 cell fields, got {}", toks.len())));
            }
            let kind = CellKind::parse(toks[0])
                .ok_or_else(|| perr(ln + 1, format!("unknown cell kind `{}`", toks[0])))?;
            if kind != CellKind::Tumor {
                return Err(perr(
                    ln + 1,
                    format!("snapshot may contain only tumor cells, got `{}`", toks[0]),
                ));
            }
            let x = parse_finite_f64(toks[1]).map_err(|e| perr(ln + 1, e))?;
            let y = parse_finite_f64(toks[2]).map_err(|e| perr(ln + 1, e))?;
            let r = parse_finite_f64(toks[3]).map_err(|e| perr(ln + 1, e))?;
            if r <= 0.0 {
                return Err(perr(ln + 1, format!("radius must be > 0, got {r}")));
            }
            cells.push((kind, x, y, r));
        }

        let (hln, nx, ny, spacing) =
            oxygen_header.ok_or_else(|| perr(text.lines().count(), "missing OXYGEN header".into()))?;
        if cells.is_empty() {
            return Err(perr(hln + 1, "snapshot contains no tumor cells".into()));
        }
        let mut values = Vec::with_capacity(nx * ny);
        let mut last_ln = hln + 1;
        for (ln, line) in lines {
            last_ln = ln + 1;
            for tok in line.split_whitespace() {
                values.push(parse_finite_f64(tok).map_err(|e| perr(ln + 1, e))?);
            }
        }
        if values.len() != nx * ny {
            return Err(perr(
                last_ln,
                format!("expected {} oxygen values, got {}", nx * ny, values.len()),
            ));
        }

        let w = &params.world;
        Ok(TumorSnapshot {
            format_version: ver,
            domain_half_width: half_width,
            rng_seed_of_growth: seed,
            cells,
            oxygen: OxygenField {
                nx,
                ny,
                spacing,
                half_width,
                values,
                diffusion: w.oxygen_diffusion,
                decay: w.oxygen_decay,
                boundary_value: w.oxygen_boundary,
            },
        })
    }
}

pub fn save_snapshot(snapshot: &TumorSnapshot, path: &Path) -> Result<()> {
    std::fs::write(path, snapshot.serialize()).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path, params: &SimParams) -> Result<TumorSnapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TumorSnapshot::parse(&text, params, path)
}

/// Centers of equal circles hex-packed inside a disc of radius `disc_radius`
/// centered at the origin; every circle lies fully inside the disc.
pub fn hex_pack_disc(disc_radius: f64, cell_radius: f64) -> Vec<Vec2> {
    let mut centers = Vec::new();
    let row_step = 3.0f64.sqrt() * cell_radius;
    let col_step = 2.0 * cell_radius;
    let max_center_r = disc_radius - cell_radius;
    if max_center_r < 0.0 {
        return centers;
    }
    let rows = (max_center_r / row_step).floor() as i64;
    for k in -rows..=rows {
        let y = k as f64 * row_step;
        let offset = if k.rem_euclid(2) == 1 { cell_radius } else { 0.0 };
        let half_span = (max_center_r * max_center_r - y * y).sqrt();
        let cols = ((half_span + offset) / col_step).floor() as i64 + 1;
        for m in -cols..=cols {
            let x = m as f64 * col_step + offset;
            if (x * x + y * y).sqrt() <= max_center_r {
                centers.push(Vec2::new(x, y));
            }
        }
    }
    centers
}

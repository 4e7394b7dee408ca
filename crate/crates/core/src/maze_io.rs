//! JSON maze and configuration files.
//!
//! ```json
//! {"format_version": 1, "width": 3, "height": 3,
//!  "sides": {"E": [{"col": 0, "row": 0, "dir": "R"}], "H": []}}
//! ```
//!
//! Each wall record names one blocked undirected edge by its left or lower
//! cell: `R` blocks `(col,row)-(col+1,row)`, `U` blocks `(col,row)-(col,row+1)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, GameConfig, Grid, GridPos, MazePair, MazeSide, PlayerId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    pub col: u32,
    pub row: u32,
    pub dir: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideWalls {
    #[serde(rename = "E")]
    pub e: Vec<WallRecord>,
    #[serde(rename = "H")]
    pub h: Vec<WallRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeFile {
    pub format_version: u32,
    pub width: u32,
    pub height: u32,
    pub sides: SideWalls,
}

impl MazeFile {
    pub fn from_pair(pair: &MazePair) -> Self {
        let walls = |player| {
            pair.side(player)
                .walls()
                .into_iter()
                .map(|(p, a)| WallRecord {
                    col: p.col,
                    row: p.row,
                    dir: a.code().to_string(),
                })
                .collect()
        };
        MazeFile {
            format_version: FORMAT_VERSION,
            width: pair.width(),
            height: pair.height(),
            sides: SideWalls {
                e: walls(PlayerId::E),
                h: walls(PlayerId::H),
            },
        }
    }

    pub fn to_pair(&self) -> Result<MazePair> {
        if self.format_version != FORMAT_VERSION {
            return Err(field_err(
                "format_version",
                format!("expected {FORMAT_VERSION}, got {}", self.format_version),
            ));
        }
        if self.width < 1 || self.height < 1 {
            return Err(field_err("width", "dimensions must be positive"));
        }
        let e = build_side(self.width, self.height, &self.sides.e, "E")?;
        let h = build_side(self.width, self.height, &self.sides.h, "H")?;
        MazePair::new(e, h)
    }
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::MazeField {
        field: field.into(),
        message: message.into(),
    }
}

fn build_side(width: u32, height: u32, walls: &[WallRecord], name: &str) -> Result<MazeSide> {
    let mut side = MazeSide::open(width, height);
    let grid = Grid::new(width, height);
    for (i, w) in walls.iter().enumerate() {
        let field = format!("sides.{name}[{i}]");
        let p = GridPos::new(w.col, w.row);
        if !grid.contains(p) {
            return Err(field_err(field, format!("cell {p} outside {width}x{height} grid")));
        }
        let dir = match w.dir.as_str() {
            "R" => Action::Right,
            "U" => Action::Up,
            "L" | "D" => {
                return Err(field_err(
                    field,
                    format!(
                        "one-sided wall direction `{}`; declare the undirected edge as R or U from its left/lower cell",
                        w.dir
                    ),
                ))
            }
            other => return Err(field_err(field, format!("unknown direction `{other}`"))),
        };
        if grid.neighbor(p, dir).is_none() {
            return Err(field_err(field, format!("{p} {} is a border edge", w.dir)));
        }
        if !side.passable(p, dir) {
            return Err(field_err(field, format!("duplicate wall {p} {}", w.dir)));
        }
        side.set_passable(p, dir, false);
    }
    Ok(side)
}

fn syntax_err(e: serde_json::Error) -> Error {
    Error::MazeSyntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_maze(text: &str) -> Result<MazePair> {
    let file: MazeFile = serde_json::from_str(text).map_err(syntax_err)?;
    file.to_pair()
}

pub fn serialize_maze(pair: &MazePair) -> String {
    serde_json::to_string_pretty(&MazeFile::from_pair(pair)).expect("maze file serializes")
}

pub fn read_maze(path: impl AsRef<Path>) -> Result<MazePair> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_maze(&text)
}

pub fn write_maze(path: impl AsRef<Path>, pair: &MazePair) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_maze(pair)).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub init: GridPos,
    pub goal: GridPos,
    pub start: PlayerId,
}

impl From<ConfigRecord> for GameConfig {
    fn from(r: ConfigRecord) -> Self {
        GameConfig {
            init: r.init,
            goal: r.goal,
            initial_controller: r.start,
        }
    }
}

impl From<GameConfig> for ConfigRecord {
    fn from(c: GameConfig) -> Self {
        ConfigRecord {
            init: c.init,
            goal: c.goal,
            start: c.initial_controller,
        }
    }
}

pub fn parse_configs(text: &str) -> Result<Vec<GameConfig>> {
    let records: Vec<ConfigRecord> = serde_json::from_str(text).map_err(syntax_err)?;
    Ok(records.into_iter().map(GameConfig::from).collect())
}

pub fn serialize_configs(configs: &[GameConfig]) -> String {
    let records: Vec<ConfigRecord> = configs.iter().copied().map(ConfigRecord::from).collect();
    serde_json::to_string(&records).expect("configs serialize")
}

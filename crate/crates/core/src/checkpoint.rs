//! Plain-text policy checkpoints.
//!
//! ```text
//! exitlab-checkpoint 1
//! game hex5
//! variant wed
//! episodes 51
//! features 1 25
//! bias
//! cell -1 0 empty
//! ...
//! theta 1
//! 0 0.25 -0.125 ...
//! features 2 25
//! ...
//! theta 2
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureSets, Pattern};
use crate::game::{GameKind, Player};
use crate::io;
use crate::policy::PolicyParams;

pub const MAGIC: &str = "exitlab-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub game: GameKind,
    pub variant: String,
    pub episodes: usize,
    pub features: FeatureSets,
    pub params: [PolicyParams; 2],
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "game {}", self.game);
        let _ = writeln!(out, "variant {}", self.variant);
        let _ = writeln!(out, "episodes {}", self.episodes);
        for player in Player::BOTH {
            let fs = self.features.get(player);
            let _ = writeln!(out, "features {} {}", player, fs.dim());
            out.push_str(&fs.describe());
            let _ = writeln!(out, "theta {player}");
            let theta = &self.params[player.index()].theta;
            let line: Vec<String> = theta.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Checkpoint> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of checkpoint, expected {what}")))
        };
        let (n, header) = next("header")?;
        if header != format!("{MAGIC} {VERSION}") {
            return Err(Error::parse(n, format!("bad header '{header}'")));
        }
        let field = |(n, line): (usize, &str), key: &str| -> Result<String> {
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::parse(n, format!("expected '{key}'")))
        };
        let game_line = next("game")?;
        let game: GameKind = field(game_line, "game")?
            .parse()
            .map_err(|e: Error| Error::parse(game_line.0, e.to_string()))?;
        let variant = field(next("variant")?, "variant")?;
        let ep_line = next("episodes")?;
        let episodes = field(ep_line, "episodes")?
            .parse()
            .map_err(|_| Error::parse(ep_line.0, "bad episode count"))?;
        let mut sets = Vec::new();
        let mut params = Vec::new();
        for player in Player::BOTH {
            let hdr = next("features")?;
            let rest = field(hdr, "features")?;
            let dim = match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                [p, d] if *p == player.to_string() => d
                    .parse::<usize>()
                    .map_err(|_| Error::parse(hdr.0, "bad feature count"))?,
                _ => return Err(Error::parse(hdr.0, format!("expected features for player {player}"))),
            };
            let mut patterns = Vec::with_capacity(dim);
            for _ in 0..dim {
                let (n, l) = next("pattern")?;
                patterns.push(l.parse::<Pattern>().map_err(|e| Error::parse(n, e))?);
            }
            sets.push(FeatureSet::from_patterns(game, player, patterns)?);
            let th = next("theta")?;
            if field(th, "theta")? != player.to_string() {
                return Err(Error::parse(th.0, format!("expected theta for player {player}")));
            }
            let (n, values) = next("weights")?;
            let theta = values
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| Error::parse(n, format!("bad weight '{v}'"))))
                .collect::<Result<Vec<f64>>>()?;
            if theta.len() != dim {
                return Err(Error::parse(n, format!("expected {dim} weights, found {}", theta.len())));
            }
            params.push(PolicyParams { theta, player });
        }
        let two = sets.pop().unwrap();
        let one = sets.pop().unwrap();
        let p2 = params.pop().unwrap();
        let p1 = params.pop().unwrap();
        Ok(Checkpoint {
            game,
            variant,
            episodes,
            features: FeatureSets::new(one, two)?,
            params: [p1, p2],
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        Checkpoint::parse(&io::read_to_string(path)?).map_err(|e| match e {
            Error::Parse { line, msg } => Error::parse(line, format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// `variant@episodes`, used as the agent name in tournaments.
    pub fn label(&self) -> String {
        format!("{}@{}", self.variant, self.episodes)
    }
}

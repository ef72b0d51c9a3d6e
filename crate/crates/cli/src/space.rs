use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use jatam_core::assembly::ContactRule;
use jatam_core::{MaskPreset, SearchSpace};
use serde::{Deserialize, Serialize};

/// Which genomes are meant: a plain `S(tiles, labels)` or a preset subspace.
#[derive(Args, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceArgs {
    /// Tile types per genome.
    #[arg(long)]
    pub tiles: Option<usize>,
    /// Bonding labels, a power of two.
    #[arg(long)]
    pub labels: Option<u32>,
    /// Named masked subspace, e.g. s32_3_8.
    #[arg(long)]
    pub mask_preset: Option<MaskPreset>,
}

impl SpaceArgs {
    pub fn space(&self) -> Result<SearchSpace> {
        match (self.mask_preset, self.tiles, self.labels) {
            (Some(p), t, l) => {
                let s = SearchSpace::preset(p);
                if t.is_some_and(|t| t != s.tiles()) || l.is_some_and(|l| l != s.labels()) {
                    bail!("--tiles/--labels contradict --mask-preset {}", p.name());
                }
                Ok(s)
            }
            (None, Some(t), Some(l)) => Ok(SearchSpace::new(t, l)?),
            _ => bail!("give --tiles and --labels, or --mask-preset"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Contact {
    #[default]
    Strict,
    Permissive,
}

impl From<Contact> for ContactRule {
    fn from(c: Contact) -> Self {
        match c {
            Contact::Strict => ContactRule::Strict,
            Contact::Permissive => ContactRule::Permissive,
        }
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &std::path::Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

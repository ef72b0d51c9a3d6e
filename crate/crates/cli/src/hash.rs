use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use jatam_core::classify::{oat_hash, rotation_invariant_hash, shape_hash, CroppedShape};

#[derive(clap::Args)]
pub struct Args {
    /// Bytes in hex, e.g. 010203 or "0x01 0x02 0x03"; may be empty.
    #[arg(long, conflicts_with = "shape", required_unless_present = "shape")]
    bytes: Option<String>,
    /// File holding a shape drawn with `#` and `.`.
    #[arg(long)]
    shape: Option<PathBuf>,
    /// Hash the shape independently of rotation.
    #[arg(long, requires = "shape")]
    rot_invariant: bool,
}

fn parse_bytes(text: &str) -> Result<Vec<u8>> {
    let mut digits = String::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        let t = token.strip_prefix("0x").or_else(|| token.strip_prefix("0X")).unwrap_or(token);
        if token.len() != t.len() && t.len() == 1 {
            digits.push('0');
        }
        digits.push_str(t);
    }
    if digits.len() % 2 != 0 {
        bail!("odd number of hex digits in {text:?}");
    }
    hex::decode(&digits).with_context(|| format!("bad hex in {text:?}"))
}

pub fn run(args: Args) -> Result<()> {
    let value = match (&args.bytes, &args.shape) {
        (Some(text), _) => oat_hash(&parse_bytes(text)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let shape = CroppedShape::parse_ascii(&text)?;
            if args.rot_invariant {
                rotation_invariant_hash(&shape).0
            } else {
                shape_hash(&shape)?.0
            }
        }
        (None, None) => bail!("give --bytes or --shape"),
    };
    println!("{value:#010x}");
    Ok(())
}

use anyhow::{bail, Result};
use geowass::line_closed_form::{color_transfer, colorize};

use super::require_seed;
use crate::cli::ColorizeArgs;
use crate::io::{read_png, write_png};

pub fn run(args: &ColorizeArgs) -> Result<()> {
    let source = read_png(&args.source)?;
    let palette = read_png(&args.palette)?;
    let out = if args.transfer {
        let seed = require_seed(args.seed, "colorize --transfer")?;
        color_transfer(&source, &palette, args.subsample, seed)?
    } else {
        if let Some(i) = source.first_non_gray() {
            bail!(
                "{} is not grayscale (pixel {i} has distinct channels); pass --transfer for general color transfer",
                args.source.display()
            );
        }
        if source.len() != palette.len() {
            bail!(
                "{} has {} pixels but {} has {}; colorization needs equal pixel counts (or --transfer)",
                args.source.display(),
                source.len(),
                args.palette.display(),
                palette.len()
            );
        }
        colorize(&source, &palette)?
    };
    write_png(&args.out, &out)
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use wavecast::codec::{self, LinkSummary};
use wavecast::pixmap::{load_pgm, save_pgm};
use wavecast::{transit, Exec, Image};

use crate::args::{check_layout, CorruptArgs, ReceiveArgs, RoundtripArgs, SendArgs, TransformArgs};
use crate::report::Report;

pub const REPORT_FILE: &str = "report.txt";
pub const RECONSTRUCTED_FILE: &str = "reconstructed.pgm";

/// Files written by a command and whether the link was clean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    /// False when a packet was lost or a word was detected uncorrectable.
    pub clean: bool,
}

pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    load_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: PathBuf, bytes: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn stage_file(i: usize) -> String {
    format!("stage_{:02}.pgm", i + 1)
}

pub fn cmd_transform(args: &TransformArgs, exec: Exec) -> Result<Outcome> {
    check_layout(args.block_size, args.levels)?;
    let img = read_image(&args.input)?;
    let snaps = codec::snapshots(&img, args.block_size, args.levels, exec)?;
    prepare_dir(&args.out_dir)?;
    let mut written = Vec::new();
    for (name, im) in [
        ("row_pass.pgm", &snaps.row_pass),
        ("col_pass.pgm", &snaps.col_pass),
        ("pyramid.pgm", &snaps.pyramid),
    ] {
        write(args.out_dir.join(name), &save_pgm(im), &mut written)?;
    }
    Ok(Outcome {
        written,
        clean: true,
    })
}

pub fn cmd_roundtrip(args: &RoundtripArgs, exec: Exec) -> Result<Outcome> {
    let cfg = args.codec.to_config()?;
    let channel = args.channel.to_model()?;
    let img = read_image(&args.input)?;
    let rt = codec::roundtrip(&img, &cfg, &channel, exec)?;
    prepare_dir(&args.out_dir)?;
    let mut written = Vec::new();
    write(
        args.out_dir.join(RECONSTRUCTED_FILE),
        &save_pgm(rt.reconstructed()),
        &mut written,
    )?;
    for (i, stage) in rt.stages.iter().enumerate() {
        write(
            args.out_dir.join(stage_file(i)),
            &save_pgm(stage),
            &mut written,
        )?;
    }
    let report = Report::from_roundtrip(&rt);
    write(
        args.out_dir.join(REPORT_FILE),
        report.render().as_bytes(),
        &mut written,
    )?;
    Ok(Outcome {
        written,
        clean: rt.link.is_clean(),
    })
}

pub fn cmd_send(args: &SendArgs, exec: Exec) -> Result<Outcome> {
    let cfg = args.codec.to_config()?;
    let img = read_image(&args.input)?;
    let stream = codec::encode_image(&img, &cfg, exec)?;
    let mut written = Vec::new();
    write(args.output.clone(), &stream.to_bytes(exec), &mut written)?;
    Ok(Outcome {
        written,
        clean: true,
    })
}

pub fn cmd_corrupt(args: &CorruptArgs) -> Result<Outcome> {
    let channel = args.channel.to_model()?;
    let bytes =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let mut written = Vec::new();
    write(
        args.output.clone(),
        &channel.transmit_bytes(&bytes),
        &mut written,
    )?;
    Ok(Outcome {
        written,
        clean: true,
    })
}

pub fn cmd_receive(args: &ReceiveArgs, exec: Exec) -> Result<Outcome> {
    let bytes =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let (parsed, progressive) = codec::decode_bytes(&bytes, exec)
        .with_context(|| format!("decoding {}", args.input.display()))?;
    let link = LinkSummary::of(&parsed);
    let reference = args.reference.as_deref().map(read_image).transpose()?;

    let mut report = Report::default();
    if let Some(reference) = &reference {
        report.add_metrics(&link.metrics(reference, progressive.reconstructed())?);
    }
    report.add_link(&link);
    report.push("stream_bytes", bytes.len());
    if let Some(reference) = &reference {
        let stage_mse = progressive
            .stages
            .iter()
            .map(|s| transit::mse(reference, s))
            .collect::<Result<Vec<_>, _>>()?;
        report.add_stage_mse(&stage_mse);
    }

    prepare_dir(&args.out_dir)?;
    let mut written = Vec::new();
    write(
        args.out_dir.join(RECONSTRUCTED_FILE),
        &save_pgm(progressive.reconstructed()),
        &mut written,
    )?;
    for (i, stage) in progressive.stages.iter().enumerate() {
        write(
            args.out_dir.join(stage_file(i)),
            &save_pgm(stage),
            &mut written,
        )?;
    }
    write(
        args.out_dir.join(REPORT_FILE),
        report.render().as_bytes(),
        &mut written,
    )?;
    Ok(Outcome {
        written,
        clean: link.is_clean(),
    })
}

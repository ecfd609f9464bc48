use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wavecast::codec::CodecConfig;
use wavecast::haar::MAX_LEVELS;
use wavecast::pixmap::BLOCK_ALIGN;
use wavecast::transit::MAX_PAYLOAD_BITS;
use wavecast::{ChannelModel, HammingCode, QTable};

#[derive(Debug, Parser)]
#[command(
    name = "wavecast",
    version,
    about = "Progressive Haar/Hamming image transmission"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write row-pass, column-pass and pyramid snapshots of the forward transform.
    Transform(TransformArgs),
    /// Encode, send through a simulated channel, and reconstruct.
    Roundtrip(RoundtripArgs),
    /// Encode an image into a packet stream file.
    Send(SendArgs),
    /// Pass a stream file through a simulated channel.
    Corrupt(CorruptArgs),
    /// Reconstruct an image from a stream file.
    Receive(ReceiveArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub block_size: usize,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
}

#[derive(Debug, Args)]
pub struct SendArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short = 'O', long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short = 'O', long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub channel: ChannelArgs,
}

#[derive(Debug, Args)]
pub struct ReceiveArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    /// Original image, for MSE/PSNR in the report.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeChoice {
    #[value(name = "secded-8-4")]
    Secded84,
    #[value(name = "hamming-7-4")]
    Hamming74,
}

impl CodeChoice {
    pub fn code(self) -> HammingCode {
        match self {
            CodeChoice::Secded84 => HammingCode::secded_8_4(),
            CodeChoice::Hamming74 => HammingCode::hamming_7_4(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    #[arg(long, default_value_t = 64)]
    pub block_size: usize,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Quantizer steps `q_LL,q_n,...,q_1`, coarsest first (all ones when omitted).
    #[arg(long, value_delimiter = ',')]
    pub qtable: Option<Vec<u16>>,
    #[arg(long, value_enum, default_value_t = CodeChoice::Secded84)]
    pub code: CodeChoice,
    #[arg(long, default_value_t = 1)]
    pub image_id: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelChoice {
    None,
    Bsc,
    Burst,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value_t = ChannelChoice::None)]
    pub channel: ChannelChoice,
    /// Bit flip probability for `bsc`.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Burst start probability per bit for `burst`.
    #[arg(long, default_value_t = 0.0)]
    pub burst_rate: f64,
    #[arg(long, default_value_t = 2)]
    pub burst_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn check_layout(block_size: usize, levels: usize) -> Result<()> {
    if !(1..=MAX_LEVELS).contains(&levels) {
        bail!("--levels must be in 1..={MAX_LEVELS}, got {levels}");
    }
    if block_size == 0 || !block_size.is_multiple_of(BLOCK_ALIGN) {
        bail!("--block-size must be a positive multiple of {BLOCK_ALIGN}, got {block_size}");
    }
    if !block_size.is_multiple_of(1 << levels) {
        bail!("--block-size {block_size} is not divisible by 2^{levels}");
    }
    Ok(())
}

impl CodecArgs {
    pub fn to_config(&self) -> Result<CodecConfig> {
        check_layout(self.block_size, self.levels)?;
        if 16 * (self.block_size / 2).pow(2) > MAX_PAYLOAD_BITS {
            bail!(
                "--block-size {} gives subbands larger than one packet can carry",
                self.block_size
            );
        }
        let qtable = match &self.qtable {
            None => QTable::lossless(self.levels),
            Some(steps) => {
                if steps.len() != self.levels + 1 {
                    bail!(
                        "--qtable needs {} values (q_LL then one per level), got {}",
                        self.levels + 1,
                        steps.len()
                    );
                }
                QTable::from_coarse_to_fine(steps).context("invalid --qtable")?
            }
        };
        Ok(CodecConfig {
            image_id: self.image_id,
            block_size: self.block_size,
            levels: self.levels,
            qtable,
            code: self.code.code(),
        })
    }
}

impl ChannelArgs {
    pub fn to_model(&self) -> Result<ChannelModel> {
        Ok(match self.channel {
            ChannelChoice::None => ChannelModel::noiseless(),
            ChannelChoice::Bsc => ChannelModel::bsc(self.p, self.seed)?,
            ChannelChoice::Burst => {
                ChannelModel::burst(self.burst_rate, self.burst_len, self.seed)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("wavecast").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults() {
        let cli = parse(&["roundtrip", "-i", "a.pgm", "-o", "out"]);
        let Command::Roundtrip(rt) = cli.command else {
            panic!()
        };
        let cfg = rt.codec.to_config().unwrap();
        assert_eq!(cfg, CodecConfig::default());
        assert_eq!(rt.channel.to_model().unwrap(), ChannelModel::noiseless());
    }

    #[test]
    fn explicit_flags() {
        let cli = parse(&[
            "roundtrip",
            "-i",
            "a.pgm",
            "-o",
            "out",
            "--block-size",
            "32",
            "--qtable",
            "1,2,3,4",
            "--code",
            "hamming-7-4",
            "--channel",
            "bsc",
            "--p",
            "0.001",
            "--seed",
            "9",
        ]);
        let Command::Roundtrip(rt) = cli.command else {
            panic!()
        };
        let cfg = rt.codec.to_config().unwrap();
        assert_eq!(cfg.block_size, 32);
        assert_eq!(cfg.code, HammingCode::hamming_7_4());
        assert_eq!(cfg.qtable.to_coarse_to_fine(3), vec![1, 2, 3, 4]);
        assert_eq!(
            rt.channel.to_model().unwrap(),
            ChannelModel::bsc(0.001, 9).unwrap()
        );
    }

    #[test]
    fn invalid_configs_fail_at_parse_time() {
        let codec = |bs: usize, levels: usize, q: Option<Vec<u16>>| CodecArgs {
            block_size: bs,
            levels,
            qtable: q,
            code: CodeChoice::Secded84,
            image_id: 1,
        };
        assert!(codec(12, 3, None).to_config().is_err());
        assert!(codec(128, 3, None).to_config().is_err());
        assert!(codec(24, 4, None).to_config().is_err());
        assert!(codec(64, 0, None).to_config().is_err());
        assert!(codec(64, 3, Some(vec![1, 1, 1])).to_config().is_err());
        assert!(codec(64, 3, Some(vec![1, 0, 1, 1])).to_config().is_err());
        assert!(codec(32, 5, None).to_config().is_ok());
        let ch = ChannelArgs {
            channel: ChannelChoice::Bsc,
            p: 2.0,
            burst_rate: 0.0,
            burst_len: 2,
            seed: 0,
        };
        assert!(ch.to_model().is_err());
    }
}

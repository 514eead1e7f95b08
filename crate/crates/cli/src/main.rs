//! `pbmstego`: hide and recover messages in black-and-white PBM images.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbmstego::{
    capacity, compare, cpt_embed_message, cpt_extract_message, decode_pbm, embed_message,
    encode_pbm, extract_message, parse_key_list, BinaryImage, CptConfig, CptError, GridError,
    KeySource, ParityError, PbmVariant,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

/// Exit status 2: input could not be read or parsed.
/// Exit status 3: the scheme itself failed (capacity, extraction, mismatch).
#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn format(path: &Path, message: impl ToString) -> Self {
        CliError::Format {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Format { .. } => 2,
            CliError::Data(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pbmstego",
    version,
    about = "Hide and recover messages in PBM images via 5x5 block parity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a message in a cover image
    Embed(EmbedArgs),
    /// Recover a hidden message from a stego image
    Extract(ExtractArgs),
    /// Report how many bytes an image can carry
    Capacity {
        /// Cover image (PBM)
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// Compare two images: similarity, neighbor averages, deviation
    Metrics {
        /// Original image (PBM)
        #[arg(short)]
        a: PathBuf,
        /// Stego image (PBM)
        #[arg(short)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// Hide a message using the weight-matrix baseline scheme
    CptEmbed(CptEmbedArgs),
    /// Recover a message embedded by cpt-embed
    CptExtract(CptExtractArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Cover image (PBM, P1 or P4)
    #[arg(short, long)]
    input: PathBuf,
    /// Where to write the stego image (same PBM variant as the input)
    #[arg(short, long)]
    output: PathBuf,
    /// File holding the message bytes
    #[arg(short, long, required_unless_present = "text", conflicts_with = "text")]
    message: Option<PathBuf>,
    /// Literal message text instead of a file
    #[arg(long)]
    text: Option<String>,
    #[command(flatten)]
    keying: KeyArgs,
    #[arg(long, value_enum, default_value_t)]
    format: ReportFormat,
}

#[derive(Args)]
struct ExtractArgs {
    /// Stego image (PBM)
    #[arg(short, long)]
    input: PathBuf,
    /// Where to write the recovered message bytes
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    keying: KeyArgs,
}

#[derive(Args)]
struct KeyArgs {
    /// Seed for per-block keys; both sides must use the same value
    #[arg(long, conflicts_with = "keys")]
    seed: Option<u64>,
    /// File with one key (1..5) per block, one per line, scan order
    #[arg(long)]
    keys: Option<PathBuf>,
}

#[derive(Args)]
struct CptEmbedArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(short, long, required_unless_present = "text", conflicts_with = "text")]
    message: Option<PathBuf>,
    #[arg(long)]
    text: Option<String>,
    /// Config file: "rows cols bits" line, key matrix rows, weight rows.
    /// Default: 5x5 blocks, 4 bits, zero key, weights cycling 1..15
    #[arg(long)]
    cpt_config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: ReportFormat,
}

#[derive(Args)]
struct CptExtractArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    cpt_config: Option<PathBuf>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum ReportFormat {
    #[default]
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Embed(args) => {
            let (cover, variant) = read_image(&args.input)?;
            let message = read_message(args.message.as_deref(), args.text.as_deref())?;
            let keys = key_source(&args.keying)?;
            let (stego, report) = embed_message(&cover, &message, &keys).map_err(parity_error)?;
            write_file(&args.output, &encode_pbm(&stego, variant))?;
            print_embed_report(
                report.blocks_used,
                report.bits_embedded,
                report.total_flips,
                args.format,
            );
            Ok(())
        }
        Command::Extract(args) => {
            let (stego, _) = read_image(&args.input)?;
            let keys = key_source(&args.keying)?;
            let message = extract_message(&stego, &keys).map_err(parity_error)?;
            write_file(&args.output, &message)
        }
        Command::Capacity { input, format } => {
            let (img, _) = read_image(&input)?;
            let cap = capacity(&img);
            match format {
                ReportFormat::Text => {
                    println!("blocks={}", cap.gross_bits / 4);
                    println!("usable_blocks={}", cap.usable_bits / 4);
                    println!("gross_bits={}", cap.gross_bits);
                    println!("gross_bytes={}", cap.gross_bits / 8);
                    println!("usable_bits={}", cap.usable_bits);
                    println!("net_payload_bytes={}", cap.net_payload_bytes);
                }
                ReportFormat::Json => {
                    let json = serde_json::json!({
                        "blocks": cap.gross_bits / 4,
                        "usable_blocks": cap.usable_bits / 4,
                        "gross_bits": cap.gross_bits,
                        "gross_bytes": cap.gross_bits / 8,
                        "usable_bits": cap.usable_bits,
                        "net_payload_bytes": cap.net_payload_bytes,
                    });
                    println!("{json}");
                }
            }
            Ok(())
        }
        Command::Metrics { a, b, format } => {
            let (img_a, _) = read_image(&a)?;
            let (img_b, _) = read_image(&b)?;
            let report = compare::<f64>(&img_a, &img_b).map_err(|e| CliError::Format {
                path: format!("{} vs {}", a.display(), b.display()),
                message: e.to_string(),
            })?;
            match format {
                ReportFormat::Text => {
                    println!("similarity={}", report.similarity);
                    println!("avg_original={}", report.avg_original);
                    println!("avg_stego={}", report.avg_stego);
                    println!("avg_delta={}", report.avg_delta);
                    println!("std_dev_delta={}", report.std_dev_delta);
                }
                ReportFormat::Json => {
                    let json = serde_json::json!({
                        "similarity": report.similarity,
                        "avg_original": report.avg_original,
                        "avg_stego": report.avg_stego,
                        "avg_delta": report.avg_delta,
                        "std_dev_delta": report.std_dev_delta,
                    });
                    println!("{json}");
                }
            }
            Ok(())
        }
        Command::CptEmbed(args) => {
            let (cover, variant) = read_image(&args.input)?;
            let message = read_message(args.message.as_deref(), args.text.as_deref())?;
            let cfg = load_cpt_config(args.cpt_config.as_deref())?;
            let (stego, report) = cpt_embed_message(&cover, &message, &cfg).map_err(cpt_error)?;
            write_file(&args.output, &encode_pbm(&stego, variant))?;
            print_embed_report(
                report.blocks_used,
                report.bits_embedded,
                report.total_flips,
                args.format,
            );
            Ok(())
        }
        Command::CptExtract(args) => {
            let (stego, _) = read_image(&args.input)?;
            let cfg = load_cpt_config(args.cpt_config.as_deref())?;
            let message = cpt_extract_message(&stego, &cfg).map_err(cpt_error)?;
            write_file(&args.output, &message)
        }
    }
}

fn read_image(path: &Path) -> Result<(BinaryImage, PbmVariant), CliError> {
    let data = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let variant = pbmstego::pbm::sniff_variant(&data).map_err(|e| CliError::format(path, e))?;
    let img = decode_pbm(&data).map_err(|e| CliError::format(path, e))?;
    Ok((img, variant))
}

fn read_message(file: Option<&Path>, text: Option<&str>) -> Result<Vec<u8>, CliError> {
    match (file, text) {
        (Some(path), None) => std::fs::read(path).map_err(|e| CliError::io(path, e)),
        (None, Some(text)) => Ok(text.as_bytes().to_vec()),
        _ => unreachable!("clap enforces exactly one message source"),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn key_source(args: &KeyArgs) -> Result<KeySource, CliError> {
    match (&args.seed, &args.keys) {
        (Some(seed), None) => Ok(KeySource::Seed(*seed)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let keys = parse_key_list(&text).map_err(|e| CliError::format(path, e))?;
            Ok(KeySource::KeyList(keys))
        }
        (None, None) => Ok(KeySource::Unkeyed),
        (Some(_), Some(_)) => unreachable!("clap rejects seed together with keys"),
    }
}

fn load_cpt_config(path: Option<&Path>) -> Result<CptConfig, CliError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            CptConfig::parse(&text).map_err(|e| CliError::format(path, e))
        }
        None => Ok(CptConfig::repeating(5, 5, 4).expect("the default config is valid")),
    }
}

fn print_embed_report(
    blocks_used: usize,
    bits_embedded: usize,
    total_flips: usize,
    format: ReportFormat,
) {
    match format {
        ReportFormat::Text => {
            println!("blocks_used={blocks_used}");
            println!("bits_embedded={bits_embedded}");
            println!("pixel_flips={total_flips}");
        }
        ReportFormat::Json => {
            let json = serde_json::json!({
                "blocks_used": blocks_used,
                "bits_embedded": bits_embedded,
                "pixel_flips": total_flips,
            });
            println!("{json}");
        }
    }
}

/// Key-file problems are format errors (exit 2); everything else the parity
/// pipeline reports is a capacity or extraction failure (exit 3).
fn parity_error(err: ParityError) -> CliError {
    match &err {
        ParityError::Grid(GridError::KeyListTooShort { .. })
        | ParityError::Grid(GridError::BadKeyList { .. }) => CliError::Format {
            path: "key list".into(),
            message: err.to_string(),
        },
        _ => CliError::Data(err.to_string()),
    }
}

fn cpt_error(err: CptError) -> CliError {
    match &err {
        CptError::InvalidConfig(_) => CliError::Format {
            path: "cpt config".into(),
            message: err.to_string(),
        },
        _ => CliError::Data(err.to_string()),
    }
}

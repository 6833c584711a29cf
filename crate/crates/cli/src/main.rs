//! `revmark`: embed, extract, score and benchmark reversible watermarks.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for data errors
//! (capacity, malformed stream, CRC, unreadable files).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revmark::bench::{run_bench, write_csv, BenchConfig, Scheme};
use revmark::codec::{bits_to_bytes, bytes_to_bits, frame_decode, frame_encode, prng_bits};
use revmark::de::{de_capacity, de_embed, de_extract};
use revmark::metrics::{psnr, ssim, SsimParams};
use revmark::rrl::{rrl_capacity, rrl_embed, rrl_extract, RestorationRecord, RestoreMode};
use revmark::{load_pgm, save_pgm};

#[derive(Parser)]
#[command(
    name = "revmark",
    version,
    about = "Reversible watermarking for 8-bit PGM images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a framed payload into a host image.
    Embed(EmbedArgs),
    /// Recover the payload and the original image.
    Extract(ExtractArgs),
    /// Compare two images.
    Quality(QualityArgs),
    /// Run the payload sweep and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    De,
    Rrl,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::De => Scheme::De,
            SchemeArg::Rrl => Scheme::Rrl,
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long)]
    host: PathBuf,
    /// File whose bytes become the payload.
    #[arg(
        long,
        conflicts_with = "random_bits",
        required_unless_present = "random_bits"
    )]
    payload: Option<PathBuf>,
    /// Generate this many pseudorandom payload bits instead.
    #[arg(long)]
    random_bits: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the RRL restoration record.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long)]
    payload_out: PathBuf,
    #[arg(long)]
    restored_out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Ssim,
    Mssim,
    Psnr,
}

#[derive(Args)]
struct QualityArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum, default_value = "ssim")]
    metric: Metric,
    /// Window size for mssim.
    #[arg(long, default_value_t = 8)]
    window: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "128,256,512,1024,2048,4096,8192,16384,32768,65536"
    )]
    payloads: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "de,rrl")]
    schemes: Vec<SchemeArg>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    csv: PathBuf,
    /// Score with windowed mean SSIM instead of global SSIM.
    #[arg(long)]
    mssim: bool,
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Embed(args) => embed(args),
        Command::Extract(args) => extract(args),
        Command::Quality(args) => quality(args),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn embed(args: EmbedArgs) -> Result<(), Failure> {
    let host = load_pgm(&args.host).map_err(data)?;
    let payload = match (&args.payload, args.random_bits) {
        (Some(path), _) => bytes_to_bits(&fs::read(path).map_err(data)?),
        (None, Some(n)) => prng_bits(args.seed, n).map_err(|e| Failure::Usage(e.to_string()))?,
        (None, None) => return Err(Failure::Usage("need --payload or --random-bits".into())),
    };
    let frame = frame_encode(&payload).map_err(data)?;
    match args.scheme {
        SchemeArg::De => {
            if args.record.is_some() {
                eprintln!("warning: --record is ignored for DE");
            }
            let marked = de_embed(&host, &frame).map_err(|e| {
                Failure::Data(format!("{e} (capacity {} framed bits)", de_capacity(&host)))
            })?;
            save_pgm(&marked, &args.out).map_err(data)?;
        }
        SchemeArg::Rrl => {
            let (marked, record) = rrl_embed(&host, &frame).map_err(data)?;
            save_pgm(&marked, &args.out).map_err(data)?;
            match &args.record {
                Some(path) => fs::write(path, record.to_bytes()).map_err(data)?,
                None => eprintln!(
                    "warning: no --record given; only literal-mode restore will be possible"
                ),
            }
        }
    }
    let capacity = match args.scheme {
        SchemeArg::De => None,
        SchemeArg::Rrl => Some(rrl_capacity(&host)),
    };
    print!(
        "embedded {} payload bits ({} framed)",
        payload.len(),
        frame.len()
    );
    match capacity {
        Some(c) => println!(", capacity {c} bits"),
        None => println!(),
    }
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<(), Failure> {
    let marked = load_pgm(&args.input).map_err(data)?;
    let (frame, restored) = match args.scheme {
        SchemeArg::De => {
            if args.record.is_some() {
                eprintln!("warning: --record is ignored for DE");
            }
            de_extract(&marked).map_err(data)?
        }
        SchemeArg::Rrl => {
            let record = match &args.record {
                Some(path) => Some(
                    RestorationRecord::from_bytes(&fs::read(path).map_err(data)?).map_err(data)?,
                ),
                None => None,
            };
            let out = rrl_extract(&marked, record.as_ref()).map_err(data)?;
            if out.mode == RestoreMode::Literal {
                eprintln!("warning: no restoration record; restored image is approximate");
            }
            (out.payload, out.restored)
        }
    };
    let payload = frame_decode(&frame).map_err(data)?;
    fs::write(&args.payload_out, bits_to_bytes(&payload)).map_err(data)?;
    save_pgm(&restored, &args.restored_out).map_err(data)?;
    println!("extracted {} payload bits", payload.len());
    Ok(())
}

fn quality(args: QualityArgs) -> Result<(), Failure> {
    let reference = load_pgm(&args.reference).map_err(data)?;
    let test = load_pgm(&args.test).map_err(data)?;
    match args.metric {
        Metric::Ssim => {
            let v = ssim(&reference, &test, &SsimParams::default()).map_err(data)?;
            println!("{v:.8}");
        }
        Metric::Mssim => {
            let v = ssim(&reference, &test, &SsimParams::windowed(args.window)).map_err(data)?;
            println!("{v:.8}");
        }
        Metric::Psnr => println!("{}", psnr(&reference, &test).map_err(data)?),
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    let host = load_pgm(&args.host).map_err(data)?;
    let config = BenchConfig {
        payloads: args.payloads,
        schemes: args.schemes.into_iter().map(Scheme::from).collect(),
        seed: args.seed,
        repeats: args.repeats,
        ssim: if args.mssim {
            SsimParams::windowed(8)
        } else {
            SsimParams::default()
        },
    };
    let rows = run_bench(&host, &config).map_err(data)?;
    write_csv(&rows, &args.csv).map_err(data)?;
    for row in &rows {
        let note = if row.capped {
            format!(" (capped from {})", row.requested_bits)
        } else {
            String::new()
        };
        println!("{}{note}", row.csv_line());
    }
    Ok(())
}

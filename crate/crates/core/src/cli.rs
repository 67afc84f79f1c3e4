//! Command-line front end shared by the `hct` binary and its tests.

use std::ffi::OsString;
use std::fs;
use std::hint::black_box;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis;
use crate::bitseq::BitSeq;
use crate::cipher::{self, BlockOrder, CipherEnvelope, KeySchedule};
use crate::error::Error;
use crate::hadamard::{spec_for_exponent, HadamardSpec, Kernel};

#[derive(Debug, Parser)]
#[command(name = "hct", version, about = "Chained modular Hadamard transform cipher")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a bit string or file into an HCT1 envelope.
    Encrypt {
        #[command(flatten)]
        cipher: CipherArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Envelope output path.
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Decrypt an HCT1 envelope.
    Decrypt {
        #[arg(long, value_name = "x1,x2,...")]
        key: String,
        /// Envelope to read.
        #[arg(long = "in")]
        input: PathBuf,
        /// Write recovered bytes here instead of printing the bit string.
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Print a digest of the input as a bit string and as hex.
    Hash {
        #[command(flatten)]
        cipher: CipherArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 256)]
        digest_bits: usize,
    },
    /// Compare plaintext with ciphertext, or with a corrupted decryption.
    Analyze {
        #[command(flatten)]
        cipher: CipherArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Flip this payload bit and compare the corrupted decryption instead.
        #[arg(long)]
        flip: Option<usize>,
        /// Also run this many seeded random single-flip trials.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
    /// Print the Hadamard matrix modulo 2^x - 1.
    Matrix {
        #[arg(long)]
        exponent: u64,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Time the naive and fast transform kernels.
    Bench {
        #[arg(long, default_value_t = 31)]
        exponent: u64,
        #[arg(long, default_value_t = 128)]
        order: usize,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
    },
}

#[derive(Debug, Args)]
pub struct CipherArgs {
    #[arg(long, value_name = "x1,x2,...")]
    pub key: String,
    #[arg(long = "block-size", default_value_t = 8)]
    pub block_size: usize,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Input as an ASCII string of '0' and '1'.
    #[arg(long)]
    pub text: Option<String>,
    /// Input file, read as bits MSB-first per byte.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("recovered {0} bits, which is not a whole number of bytes; omit --out to print bits")]
    NotByteAligned(usize),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Stable diagnostic tag and process exit code.
    pub fn code(&self) -> (&'static str, i32) {
        match self {
            CliError::Core(e) => match e {
                Error::InvalidKeyElement(_) => ("invalid-key-element", 10),
                Error::EmptyKey | Error::KeySyntax(_) | Error::KeyTooLong(_) => ("invalid-key", 11),
                Error::UnsupportedBlockOrder(_) => ("unsupported-block-order", 12),
                Error::DimensionMismatch { .. } => ("dimension-mismatch", 13),
                Error::MalformedEnvelope(_) => ("malformed-envelope", 14),
                Error::SentinelConflict { .. } => ("sentinel-conflict", 15),
                Error::NonZeroPadding { .. } => ("non-zero-padding", 16),
                Error::KeyMismatch { .. } => ("key-mismatch", 17),
                Error::InvalidBitChar { .. } => ("invalid-bit-string", 18),
                Error::LengthUnderflow { .. } => ("length-underflow", 19),
                Error::ValueOverflow { .. } => ("value-overflow", 20),
                Error::NoInverse { .. } => ("no-inverse", 21),
                Error::ZeroDigestBits => ("zero-digest-bits", 22),
                Error::FlipOutOfRange { .. } => ("flip-out-of-range", 23),
                Error::InputTooLarge { .. } => ("input-too-large", 24),
            },
            CliError::Io { .. } => ("io", 30),
            CliError::Output(_) => ("io", 30),
            CliError::NotByteAligned(_) => ("not-byte-aligned", 31),
            CliError::Usage(_) => ("usage", 2),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

impl InputArgs {
    fn load(&self) -> CliResult<BitSeq> {
        match (&self.text, &self.input) {
            (Some(text), _) => Ok(BitSeq::parse_text(text.trim())?),
            (None, Some(path)) => Ok(BitSeq::from_bytes(&read_file(path)?)),
            (None, None) => Err(CliError::Usage("one of --text or --in is required".into())),
        }
    }
}

impl CipherArgs {
    fn parse(&self) -> CliResult<(KeySchedule, BlockOrder)> {
        Ok((self.key.parse()?, BlockOrder::new(self.block_size)?))
    }
}

/// Wall-clock totals for both kernels over the same random inputs.
#[derive(Debug, Clone, Copy)]
pub struct KernelTiming {
    pub naive: Duration,
    pub fast: Duration,
    pub iterations: usize,
}

impl KernelTiming {
    pub fn per_transform_ns(d: Duration, iterations: usize) -> f64 {
        d.as_nanos() as f64 / iterations.max(1) as f64
    }
}

pub fn time_kernels(spec: &HadamardSpec, iterations: usize, seed: u64) -> KernelTiming {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<Vec<u64>> = (0..iterations.clamp(1, 64))
        .map(|_| (0..spec.order()).map(|_| rng.gen_range(0..spec.modulus())).collect())
        .collect();
    let run = |kernel: Kernel| {
        let start = Instant::now();
        for i in 0..iterations {
            let v = &inputs[i % inputs.len()];
            black_box(spec.apply(kernel, black_box(v)).expect("input has transform order"));
        }
        start.elapsed()
    };
    // warm both paths once before timing
    run(Kernel::Naive);
    run(Kernel::Fast);
    KernelTiming {
        naive: run(Kernel::Naive),
        fast: run(Kernel::Fast),
        iterations,
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Encrypt { cipher: c, input, out: path } => {
            let (key, order) = c.parse()?;
            let plain = input.load()?;
            if let Some(w) = analysis::degenerate_check(&plain) {
                writeln!(err, "hct: warning: {w}")?;
            }
            let env = cipher::encrypt(&plain, &key, order)?;
            match path {
                Some(p) => write_file(&p, &env.to_bytes())?,
                None if input.text.is_none() => {
                    return Err(CliError::Usage("--out is required when encrypting a file".into()))
                }
                None => {}
            }
            if input.text.is_some() {
                writeln!(out, "{}", env.payload)?;
            }
        }
        Command::Decrypt { key, input, out: path } => {
            let key: KeySchedule = key.parse()?;
            let env = CipherEnvelope::from_bytes(&read_file(&input)?)?;
            let plain = cipher::decrypt(&env, &key)?;
            match path {
                Some(p) => {
                    if plain.len() % 8 != 0 {
                        return Err(CliError::NotByteAligned(plain.len()));
                    }
                    write_file(&p, plain.as_bytes())?;
                }
                None => writeln!(out, "{plain}")?,
            }
        }
        Command::Hash { cipher: c, input, digest_bits } => {
            let (key, order) = c.parse()?;
            let digest = cipher::hash_digest(&input.load()?, &key, order, digest_bits)?;
            writeln!(out, "{digest}")?;
            writeln!(out, "{}", digest.to_hex())?;
        }
        Command::Analyze { cipher: c, input, flip, trials, seed, emit_csv } => {
            let (key, order) = c.parse()?;
            let plain = input.load()?;
            if let Some(w) = analysis::degenerate_check(&plain) {
                writeln!(err, "hct: warning: {w}")?;
            }
            let (other, anomalies) = match flip {
                Some(i) => {
                    let mut env = cipher::encrypt(&plain, &key, order)?;
                    if i >= env.payload.len() {
                        return Err(Error::FlipOutOfRange { index: i, len: env.payload.len() }.into());
                    }
                    env.payload.flip(i);
                    cipher::decrypt_lenient(&env, &key)?
                }
                None => (cipher::encrypt(&plain, &key, order)?.payload, Vec::new()),
            };
            let mut csv = Vec::new();
            analysis::write_difference_csv(&mut csv, &plain, &other)?;
            for a in &anomalies {
                writeln!(csv, "# anomaly {a:?}")?;
            }
            if let Some(n) = trials {
                let summary = analysis::avalanche_trials(&plain, &key, order, n, seed)?;
                writeln!(csv, "# avalanche {summary}")?;
            }
            match emit_csv {
                Some(p) => write_file(&p, &csv)?,
                None => out.write_all(&csv)?,
            }
        }
        Command::Matrix { exponent, order } => {
            write!(out, "{}", spec_for_exponent(order, exponent)?.matrix_text())?;
        }
        Command::Bench { exponent, order, iterations } => {
            let spec = spec_for_exponent(order, exponent)?;
            let t = time_kernels(&spec, iterations, 0);
            let naive = KernelTiming::per_transform_ns(t.naive, iterations);
            let fast = KernelTiming::per_transform_ns(t.fast, iterations);
            writeln!(out, "order={order} modulus={} iterations={iterations}", spec.modulus())?;
            writeln!(out, "naive_ns_per_transform={naive:.1}")?;
            writeln!(out, "fast_ns_per_transform={fast:.1}")?;
            writeln!(out, "speedup={:.2}", naive / fast.max(f64::MIN_POSITIVE))?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let (tag, code) = e.code();
            let _ = writeln!(err, "hct: error[{tag}]: {e}");
            code
        }
    }
}

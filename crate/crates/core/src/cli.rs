//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::f2::SpaceClass;
use crate::io::{self, ArtifactKind};
use crate::lattice::{Lattice, D8_GRAM};
use crate::pipeline::{self, CertifyOptions, Context};

#[derive(Debug, Parser)]
#[command(name = "e8spread", version, about = "Builds and certifies the nine-block structure on E8 and its stabilizer")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Class of isotropic 4-spaces the spread is drawn from.
    #[arg(long, global = true, default_value = "A")]
    pub class: SpaceClass,
    /// Directory for artifact files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replace the E8 Gram matrix by D8's, to exercise failure paths.
    #[arg(long, global = true, hide = true)]
    pub test_corrupt_gram: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shell sizes, mod-2 census, isotropic 4-spaces and intersection profiles.
    Enumerate,
    /// Find and certify the spread.
    Spread,
    /// Build and certify the 9 x 15 frame array.
    Frames,
    /// Build and certify the partition of the norm-4 shell.
    Partition,
    /// Compute and certify the stabilizer of the partition.
    Group,
    /// Run every stage and write all artifacts.
    Certify {
        /// Stop after the partition round trip.
        #[arg(long)]
        skip_group: bool,
    },
    /// Re-verify artifact files (kind detected from each header).
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn lattice(g: &GlobalArgs) -> Result<Lattice> {
    if g.test_corrupt_gram {
        Lattice::from_gram(D8_GRAM)
    } else {
        Ok(Lattice::e8())
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    if let Some(n) = cli.global.threads {
        // only fails if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate => enumerate(g),
        Command::Spread => stage_command(g, Stage::Spread),
        Command::Frames => stage_command(g, Stage::Frames),
        Command::Partition => stage_command(g, Stage::Partition),
        Command::Group => stage_command(g, Stage::Group),
        Command::Certify { skip_group } => certify(g, *skip_group),
        Command::Verify { files } => verify(g, files),
    }
}

fn print_certificates(certs: &[Certificate], to_stderr: bool) {
    for c in certs {
        if to_stderr {
            eprint!("{c}");
        } else {
            print!("{c}");
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    println!("{text}");
    Ok(())
}

fn enumerate(g: &GlobalArgs) -> Result<u8> {
    let (census, cert) = pipeline::census(&lattice(g)?)?;
    if g.json {
        #[derive(Serialize)]
        struct Out<'a> {
            counts: &'a pipeline::Census,
            certificate: &'a Certificate,
        }
        print_json(&Out { counts: &census, certificate: &cert })?;
    } else {
        print_certificates(std::slice::from_ref(&cert), false);
    }
    Ok(if cert.passed() { 0 } else { 1 })
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Spread,
    Frames,
    Partition,
    Group,
}

/// Runs the pipeline up to `last` and emits that stage's artifact.
fn stage_command(g: &GlobalArgs, last: Stage) -> Result<u8> {
    let ctx = Context::new(lattice(g)?)?;
    let mut certs = Vec::new();
    let (s, c) = pipeline::spread_stage(&ctx, g.class)?;
    certs.push(c);
    let (kind, text, group) = if last == Stage::Spread {
        (ArtifactKind::Spread, io::write_spread(&s), None)
    } else {
        let (arr, c) = pipeline::frames_stage(&ctx, &s)?;
        certs.push(c);
        if last == Stage::Frames {
            (ArtifactKind::Frames, io::write_frames(&arr), None)
        } else {
            let (p, c) = pipeline::partition_stage(&ctx, &arr, &s)?;
            certs.push(c);
            if last == Stage::Partition {
                (ArtifactKind::Partition, io::write_partition(&p), None)
            } else {
                let (out, c) = pipeline::group_stage(&ctx, &arr, &p, &s)?;
                certs.push(c);
                (ArtifactKind::Generators, io::write_generators(&out.records), Some(out.summary()))
            }
        }
    };
    let passed = certs.iter().all(Certificate::passed);
    if let Some(dir) = &g.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(kind.file_name()), &text)?;
    }
    if g.json {
        #[derive(Serialize)]
        struct Out<'a> {
            class: SpaceClass,
            passed: bool,
            certificates: &'a [Certificate],
            group: Option<pipeline::GroupSummary>,
            artifact: &'a str,
        }
        print_json(&Out { class: g.class, passed, certificates: &certs, group, artifact: &text })?;
    } else if g.out.is_some() {
        print_certificates(&certs, false);
    } else {
        print_certificates(&certs, true);
        print!("{text}");
    }
    Ok(if passed { 0 } else { 1 })
}

fn certify(g: &GlobalArgs, skip_group: bool) -> Result<u8> {
    let opts = CertifyOptions { class: g.class, out_dir: g.out.clone(), skip_group };
    let report = pipeline::certify(&lattice(g)?, &opts)?;
    if g.json {
        print_json(&report)?;
    } else {
        print_certificates(&report.certificates, false);
        if let Some(group) = &report.group {
            println!(
                "group order {} from {} generators; derived subgroup order {}; complement to the center found: {}",
                group.order, group.generators, group.extension.derived_subgroup_order, group.extension.complement_found
            );
        }
        for f in &report.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(0)
}

fn verify(g: &GlobalArgs, files: &[PathBuf]) -> Result<u8> {
    let ctx = Context::new(lattice(g)?)?;
    let certs = pipeline::verify_files(&ctx, files)?;
    if g.json {
        print_json(&certs)?;
    } else {
        print_certificates(&certs, false);
        let names: Vec<String> = files.iter().map(|f| display_name(f)).collect();
        println!("verified {}", names.join(" "));
    }
    Ok(0)
}

fn display_name(p: &Path) -> String {
    p.display().to_string()
}

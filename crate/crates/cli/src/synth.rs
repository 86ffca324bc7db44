use std::fs;
use std::path::PathBuf;

use clap::Args;
use conductor_core::synth::{domain_template, routing_bundle, synthesize, SynthConfig, SynthReport, DOMAINS};
use serde::Serialize;

use crate::common::print_summary;
use crate::error::CliError;
use crate::manifest::{write_json, RunManifest};

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    /// Domain to synthesize; one of finance, ecommerce, medicine, restaurant, travel.
    #[arg(long, required_unless_present = "routing", conflicts_with = "routing")]
    pub domain: Option<String>,
    /// Build the preference-routing bundle instead of a domain.
    #[arg(long)]
    pub routing: bool,
    #[arg(long, default_value_t = 40)]
    pub tasks: usize,
    #[arg(long, default_value_t = 12)]
    pub pairs: usize,
    /// Questions in the routing bundle.
    #[arg(long, default_value_t = 24)]
    pub questions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct SynthSummary {
    tasks: usize,
    tools: usize,
    preference_pairs: usize,
    dropped: usize,
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let (bundle, report) = if args.routing {
        let b = routing_bundle(args.questions, args.pairs, args.seed);
        let report = SynthReport {
            generated: b.tasks.len(),
            surviving: b.tasks.iter().map(|t| t.task_id.clone()).collect(),
            ..SynthReport::default()
        };
        (b, report)
    } else {
        let name = args.domain.as_deref().unwrap_or_default();
        let template = domain_template(name)
            .ok_or_else(|| CliError::Config(format!("unknown domain `{name}` (known: {})", DOMAINS.join(", "))))?;
        let cfg = SynthConfig {
            tasks: args.tasks,
            seed: args.seed,
            preference_pairs: args.pairs,
            ..SynthConfig::default()
        };
        synthesize(&template, &cfg)?
    };
    fs::create_dir_all(&args.out)?;
    bundle.save(&args.out)?;
    write_json(&args.out.join("synth_report.json"), &report)?;
    RunManifest::new("synth", serde_json::to_value(args)?, &[], args.seed, &args.out)?.write(&args.out)?;
    print_summary(
        &SynthSummary {
            tasks: bundle.tasks.len(),
            tools: bundle.catalog.len(),
            preference_pairs: bundle.preferences.len(),
            dropped: report.dropped(),
        },
        args.json,
    )
}

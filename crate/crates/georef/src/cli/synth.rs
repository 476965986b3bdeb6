//! Batch synthesis: per template, one common-identifier scene plus N
//! random-identifier scenes, each solved, fact-derived, rendered, and
//! serialized. A failing template is reported and skipped; the batch
//! carries on.

use crate::facts::SceneDocument;
use crate::geom::{instantiate, QualityConfig, SolverConfig};
use crate::render::{render_svg, scene_file_stem, RenderConfig};
use crate::scene::{parse_program, relabel, validate_program, IdentifierScheme, SceneProgram};
use crate::util::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthOutcome {
    pub template: String,
    pub scheme: IdentifierScheme,
    pub seed: u64,
    pub scene_file: Option<String>,
    pub image_file: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSummary {
    pub templates: usize,
    pub solved: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    pub outcomes: Vec<SynthOutcome>,
}

struct Job {
    template: String,
    program: SceneProgram,
    scheme: IdentifierScheme,
    seed: u64,
}

/// Run the synthesis batch. Produces `out/scenes/*.json`,
/// `out/images/*.svg`, and `out/synth_manifest.json`.
#[allow(clippy::too_many_arguments)]
pub fn synth_batch(
    templates_dir: &Path,
    out_dir: &Path,
    per_type_random: u32,
    base_seed: u64,
    solver: &SolverConfig,
    quality: &QualityConfig,
    jobs: usize,
    config_hash: &str,
) -> anyhow::Result<SynthSummary> {
    let mut template_files: Vec<PathBuf> = std::fs::read_dir(templates_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "scene"))
        .collect();
    template_files.sort();

    let scenes_dir = out_dir.join("scenes");
    let images_dir = out_dir.join("images");
    std::fs::create_dir_all(&scenes_dir)?;
    std::fs::create_dir_all(&images_dir)?;

    let mut work: Vec<Job> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let mut outcomes: Vec<SynthOutcome> = Vec::new();
    for file in &template_files {
        let stem = file.file_stem().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(file)?;
        let program = match parse_program(&stem, &text) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("{stem}: {e}"));
                outcomes.push(SynthOutcome {
                    template: stem,
                    scheme: IdentifierScheme::Common,
                    seed: 0,
                    scene_file: None,
                    image_file: None,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let report = validate_program(&program);
        if !report.ok() {
            failures.push(format!("{stem}: invalid template: {report}"));
            outcomes.push(SynthOutcome {
                template: stem,
                scheme: IdentifierScheme::Common,
                seed: 0,
                scene_file: None,
                image_file: None,
                error: Some(report.to_string()),
            });
            continue;
        }
        for k in 0..=per_type_random {
            let scheme = if k == 0 { IdentifierScheme::Common } else { IdentifierScheme::Random };
            // Per-scene seed: stable across runs, distinct across
            // templates and variants, short enough for file names.
            let seed = derive_seed(base_seed, &format!("{stem}/{scheme}/{k}")) & 0xFFFF_FFFF;
            work.push(Job { template: stem.clone(), program: program.clone(), scheme, seed });
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<SynthOutcome> = pool.install(|| {
        work.par_iter()
            .map(|job| run_job(job, &scenes_dir, &images_dir, solver, quality))
            .collect()
    });

    let solved = results.iter().filter(|o| o.error.is_none()).count();
    for o in &results {
        if let Some(e) = &o.error {
            failures.push(format!("{} ({} seed {}): {e}", o.template, o.scheme, o.seed));
        }
    }
    outcomes.extend(results);
    outcomes.sort_by(|a, b| (&a.template, a.seed).cmp(&(&b.template, b.seed)));

    #[derive(Serialize)]
    struct Manifest<'a> {
        v: u32,
        config_hash: &'a str,
        outcomes: &'a [SynthOutcome],
    }
    std::fs::write(
        out_dir.join("synth_manifest.json"),
        crate::util::canonical_json_pretty(&Manifest { v: 1, config_hash, outcomes: &outcomes }),
    )?;

    let failed = outcomes.iter().filter(|o| o.error.is_some()).count();
    Ok(SynthSummary {
        templates: template_files.len(),
        solved,
        failed,
        failures,
        outcomes,
    })
}

fn run_job(
    job: &Job,
    scenes_dir: &Path,
    images_dir: &Path,
    solver: &SolverConfig,
    quality: &QualityConfig,
) -> SynthOutcome {
    let stem = scene_file_stem(&job.template, job.scheme, job.seed);
    let mut outcome = SynthOutcome {
        template: job.template.clone(),
        scheme: job.scheme,
        seed: job.seed,
        scene_file: None,
        image_file: None,
        error: None,
    };
    let relabeled = match relabel(&job.program, job.scheme, job.seed) {
        Ok(p) => p,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    let scene = match instantiate(&relabeled, job.seed, solver, quality, job.scheme) {
        Ok(s) => s,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    let doc = SceneDocument::new(scene);
    let svg = render_svg(&doc.scene, &RenderConfig::default());
    let scene_path = scenes_dir.join(format!("{stem}.json"));
    let image_path = images_dir.join(format!("{stem}.svg"));
    if let Err(e) = std::fs::write(&scene_path, doc.canonical_json()) {
        outcome.error = Some(e.to_string());
        return outcome;
    }
    if let Err(e) = std::fs::write(&image_path, svg) {
        outcome.error = Some(e.to_string());
        return outcome;
    }
    outcome.scene_file = Some(format!("scenes/{stem}.json"));
    outcome.image_file = Some(format!("images/{stem}.svg"));
    outcome
}

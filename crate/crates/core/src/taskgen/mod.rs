//! Seeded generation of paired Cartesian/Polar instances with oracle
//! ground truths.

pub mod answer;
pub mod catalog;
pub mod config;
pub mod puzzle;
pub mod tasks;

pub use answer::{Answer, OptionEntry, OPTION_LABELS};
pub use catalog::{catalog, task, Alignment, AnswerType, BoundaryPolicy, Category, OptionCount, Ranges, TaskSpec};
pub use config::{ConfigError, GenConfig, TaskOverride};
pub use puzzle::{Choice, Puzzle, Solution, TaskPuzzle};
pub use tasks::{GenRng, Layout};

use crate::render::{render, RenderError, SceneSpec, SvgDoc};
use crate::topology::{Boundary, GridSpec, Topology};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use thiserror::Error;

pub const GENERATOR_VERSION: &str = concat!("polarbench-gen/", env!("CARGO_PKG_VERSION"));

/// Redraws allowed per (task, seed) before giving up.
pub const MAX_ATTEMPTS: u32 = 1000;

/// Word-search layouts emitted in addition to the Cartesian/Polar pair.
pub const TILING_VARIANTS: [Topology; 2] = [Topology::Hexagonal, Topology::Octagonal];

#[derive(Debug, Error)]
pub enum GenError {
    #[error("task `{0}` is not in the catalog")]
    UnknownTask(String),
    #[error("{task} seed {seed}: no valid instance after {attempts} attempts; last failure: {reason}")]
    Exhausted {
        task: String,
        seed: u64,
        attempts: u32,
        reason: String,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub task_id: String,
    pub category: Category,
    pub subcategory: String,
    pub topology: Topology,
    pub boundary: Boundary,
    pub alignment: Alignment,
    pub answer_type: AnswerType,
    pub seed: u64,
    /// Which redraw produced the instance.
    pub attempt: u32,
    pub grid: GridSpec,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<OptionEntry>>,
    pub ground_truth: Answer,
    /// Raw oracle output the ground truth was derived from.
    pub oracle_value: String,
    /// Size of the answer space for open formats with a finite domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_domain: Option<usize>,
    pub puzzle: Puzzle,
    pub scene: SceneSpec,
    pub generator_version: String,
}

impl Instance {
    pub fn spec(&self) -> Option<&'static TaskSpec> {
        task(&self.task_id)
    }

    pub fn render(&self) -> Result<SvgDoc, RenderError> {
        render(&self.scene)
    }

    /// Number of labelled options, zero for open answers.
    pub fn option_count(&self) -> usize {
        self.options.as_ref().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePair {
    pub cartesian: Instance,
    pub polar: Instance,
    pub alignment: Alignment,
    /// Why the two ground truths differ, when they do.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<String>,
}

impl InstancePair {
    pub fn truths_equal(&self) -> bool {
        self.cartesian.ground_truth == self.polar.ground_truth
    }
}

fn divergence_reason(task_id: &str) -> &'static str {
    match task_id {
        "minimum_flips" => "the wrapped strip admits flips across the seam, which changes the parity constraints",
        "bouncing_point" => "the angular axis wraps on the disc but reflects on the bounded grid",
        "knight_paths" => "knight moves may cross the seam on the disc",
        "random_walk" => "the wrapped layout gives seam cells extra neighbours, changing the hitting probability",
        _ => "ground truths differ between layouts",
    }
}

/// Deterministic generator stream for one attempt of one (task, seed).
pub fn attempt_rng(key: &str, seed: u64, attempt: u32) -> GenRng {
    let digest = Sha256::digest(format!("{key}:{seed}:{attempt}").as_bytes());
    GenRng::from_seed(digest.into())
}

/// Boundaries for the two sides of a pair.
pub fn layout_for(spec: &TaskSpec, ratio: f64) -> Layout {
    let (cartesian, polar) = match (spec.boundary_policy, spec.alignment) {
        (BoundaryPolicy::Wrapping, Alignment::PartiallyAligned) => (Boundary::Bounded, Boundary::Wrapping),
        (BoundaryPolicy::Wrapping, Alignment::FullyAligned) => (Boundary::Wrapping, Boundary::Wrapping),
        _ => (Boundary::Bounded, Boundary::Bounded),
    };
    Layout { cartesian, polar, ratio }
}

fn id_for(task_id: &str, topology: Topology, seed: u64) -> String {
    format!("{task_id}_{}_{seed}", topology.as_str())
}

/// Place a puzzle on a grid and derive everything an instance carries.
pub fn assemble(spec: &TaskSpec, puzzle: Puzzle, grid: GridSpec, seed: u64, attempt: u32) -> Result<Instance, String> {
    let solution = puzzle.solve(&grid).map_err(|e| format!("oracle: {e}"))?;
    let choices = puzzle.choices(&grid);
    let (options, ground_truth, oracle_value) = match (solution, choices) {
        (Solution::Choice(value), Some(choices)) => {
            if choices.len() > OPTION_LABELS.len() {
                return Err(format!("{} options exceed the label set", choices.len()));
            }
            let options: Vec<OptionEntry> = choices
                .into_iter()
                .zip(OPTION_LABELS)
                .map(|(c, l)| OptionEntry {
                    label: l.to_string(),
                    text: c.text,
                    value: c.value,
                })
                .collect();
            let hits: Vec<&OptionEntry> = options.iter().filter(|o| o.value == value).collect();
            let [hit] = hits.as_slice() else {
                return Err(format!("{} options match the oracle value {value}", hits.len()));
            };
            let truth = Answer::OptionLabel(hit.label.clone());
            (Some(options), truth, value)
        }
        (Solution::Answer(a), None) => {
            let raw = a.to_string();
            (None, a, raw)
        }
        (Solution::Choice(_), None) => return Err("choice oracle without options".into()),
        (Solution::Answer(_), Some(_)) => return Err("open answer with options".into()),
    };
    let scene = puzzle.scene(&grid);
    let question = format!("{}\n\n{}", spec.rules, puzzle.question(&grid));
    Ok(Instance {
        id: id_for(spec.id, grid.topology, seed),
        task_id: spec.id.to_string(),
        category: spec.category,
        subcategory: spec.subcategory.to_string(),
        topology: grid.topology,
        boundary: grid.boundary,
        alignment: spec.alignment,
        answer_type: spec.answer_type,
        seed,
        attempt,
        grid,
        question,
        options,
        ground_truth,
        oracle_value,
        answer_domain: puzzle.answer_candidates(&grid).map(|c| c.len()),
        puzzle,
        scene,
        generator_version: GENERATOR_VERSION.to_string(),
    })
}

fn checked(spec: &TaskSpec, puzzle: Puzzle, grid: GridSpec, seed: u64, attempt: u32) -> Result<Instance, String> {
    let inst = assemble(spec, puzzle, grid, seed, attempt)?;
    let report = validate_instance(&inst);
    match report.first_failure() {
        Some(c) => Err(format!("{}: {}", c.name, c.detail)),
        None => Ok(inst),
    }
}

fn try_pair(spec: &TaskSpec, seed: u64, attempt: u32, config: &GenConfig) -> Result<InstancePair, String> {
    let mut rng = attempt_rng(spec.id, seed, attempt);
    let layout = layout_for(spec, config.ratio(spec.id));
    let draft = tasks::build(spec.id, &mut rng, &config.ranges(spec.id, spec.ranges), &layout)?;
    let [cart_grid, polar_grid] = layout.grids(draft.major, draft.minor);
    let cartesian = checked(spec, draft.puzzle.clone(), cart_grid, seed, attempt)?;
    let polar = checked(spec, draft.puzzle, polar_grid, seed, attempt)?;
    let equal = cartesian.ground_truth == polar.ground_truth;
    if spec.alignment == Alignment::FullyAligned && !equal {
        return Err(format!(
            "fully aligned truths differ: {} vs {}",
            cartesian.ground_truth, polar.ground_truth
        ));
    }
    Ok(InstancePair {
        cartesian,
        polar,
        alignment: spec.alignment,
        divergence: (!equal).then(|| divergence_reason(spec.id).to_string()),
    })
}

/// Generate the Cartesian/Polar pair for `(task, seed)`, redrawing on any
/// validation failure.
pub fn generate_pair(spec: &TaskSpec, seed: u64, config: &GenConfig) -> Result<InstancePair, GenError> {
    let mut reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        match try_pair(spec, seed, attempt, config) {
            Ok(pair) => return Ok(pair),
            Err(e) => reason = e,
        }
    }
    Err(GenError::Exhausted {
        task: spec.id.to_string(),
        seed,
        attempts: MAX_ATTEMPTS,
        reason,
    })
}

/// Word-search instance on a hexagonal or octagonal layout.
pub fn generate_variant(seed: u64, topology: Topology) -> Result<Instance, GenError> {
    let spec = task("word_search").ok_or_else(|| GenError::UnknownTask("word_search".into()))?;
    let key = format!("word_search_{}", topology.as_str());
    let mut reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = attempt_rng(&key, seed, attempt);
        let result = tasks::build_tiling_variant(&mut rng, topology)
            .and_then(|(puzzle, grid)| checked(spec, puzzle, grid, seed, attempt));
        match result {
            Ok(inst) => return Ok(inst),
            Err(e) => reason = e,
        }
    }
    Err(GenError::Exhausted {
        task: key,
        seed,
        attempts: MAX_ATTEMPTS,
        reason,
    })
}

/// Every pair and layout variant of a generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSet {
    pub pairs: Vec<InstancePair>,
    pub variants: Vec<Instance>,
}

impl GeneratedSet {
    /// All instances ordered by task (catalog order), then seed, then
    /// topology.
    pub fn instances(&self) -> Vec<&Instance> {
        let mut all: Vec<&Instance> = self
            .pairs
            .iter()
            .flat_map(|p| [&p.cartesian, &p.polar])
            .chain(self.variants.iter())
            .collect();
        let rank = |id: &str| catalog().iter().position(|t| t.id == id).unwrap_or(usize::MAX);
        all.sort_by_key(|i| (rank(&i.task_id), i.seed, i.topology));
        all
    }
}

/// Generate `n_per_task` pairs for every selected task, with seeds
/// `base_seed..base_seed + n`, plus the word-search tiling variants.
pub fn generate_dataset(config: &GenConfig) -> Result<GeneratedSet, GenError> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.n_per_task as u64).map(|i| config.base_seed.wrapping_add(i)).collect();
    let specs = config.selected_tasks();
    let jobs: Vec<(&TaskSpec, u64)> = specs.iter().flat_map(|&s| seeds.iter().map(move |&seed| (s, seed))).collect();
    let pairs = jobs
        .par_iter()
        .map(|&(spec, seed)| generate_pair(spec, seed, config))
        .collect::<Result<Vec<_>, _>>()?;
    let variants = if specs.iter().any(|s| s.id == "word_search") {
        let jobs: Vec<(u64, Topology)> = seeds.iter().flat_map(|&s| TILING_VARIANTS.map(|t| (s, t))).collect();
        jobs.par_iter()
            .map(|&(seed, t)| generate_variant(seed, t))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    Ok(GeneratedSet { pairs, variants })
}

// ------------------------------------------------------------- validation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub id: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, result: Result<(), String>) {
        let (passed, detail) = match result {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "{} {mark} {}", self.id, c.name)?;
            if !c.passed {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const CHECK_ANSWER_TYPE: &str = "answer_type";
pub const CHECK_ORACLE: &str = "oracle_agreement";
pub const CHECK_OPTIONS: &str = "options";
pub const CHECK_CONSTRUCTION: &str = "construction_record";
pub const CHECK_SCENE: &str = "scene";
pub const CHECK_RENDER: &str = "render";

/// Re-derive the ground truth from the instance's logical content and
/// check it against everything the instance claims.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport {
        id: inst.id.clone(),
        checks: Vec::new(),
    };
    let spec = task(&inst.task_id);

    report.push(CHECK_ANSWER_TYPE, {
        let found = inst.ground_truth.answer_type();
        if found != inst.answer_type {
            Err(format!("ground truth is {found:?}, expected {:?}", inst.answer_type))
        } else if spec.is_some_and(|s| s.answer_type != inst.answer_type) {
            Err("answer type disagrees with the catalog".into())
        } else {
            inst.ground_truth.well_formed()
        }
    });

    let solution = inst.puzzle.solve(&inst.grid);
    report.push(CHECK_ORACLE, {
        match (&solution, &inst.options) {
            (Err(e), _) => Err(format!("oracle failed: {e}")),
            (Ok(Solution::Answer(a)), None) if *a == inst.ground_truth => Ok(()),
            (Ok(Solution::Answer(a)), None) => Err(format!("oracle says {a}, instance says {}", inst.ground_truth)),
            (Ok(Solution::Choice(v)), Some(opts)) => {
                let labelled = opts.iter().find(|o| Answer::OptionLabel(o.label.clone()) == inst.ground_truth);
                match labelled {
                    Some(o) if o.value == *v => Ok(()),
                    Some(o) => Err(format!("option {} holds {}, oracle says {v}", o.label, o.value)),
                    None => Err(format!("ground truth {} names no option", inst.ground_truth)),
                }
            }
            _ => Err("oracle kind does not fit the option layout".into()),
        }
    });

    report.push(CHECK_OPTIONS, {
        let want = spec.map_or(OptionCount::None, |s| s.options);
        match &inst.options {
            None if want == OptionCount::None => match inst.puzzle.answer_candidates(&inst.grid) {
                Some(c) if !c.contains(&inst.ground_truth) => Err("ground truth lies outside the answer domain".into()),
                Some(c) if inst.answer_domain != Some(c.len()) => Err("answer domain size is stale".into()),
                _ => Ok(()),
            },
            None => Err("options missing".into()),
            Some(opts) => check_options(opts, want, solution.as_ref().ok(), inst),
        }
    });

    report.push(CHECK_CONSTRUCTION, {
        match (inst.puzzle.planted(), &solution) {
            (Some(p), Ok(Solution::Answer(a))) if p != *a => Err(format!("construction planted {p}, oracle says {a}")),
            (Some(p), Ok(Solution::Choice(v))) if p.to_string() != *v => {
                Err(format!("construction planted {p}, oracle says {v}"))
            }
            _ => Ok(()),
        }
    });

    report.push(CHECK_SCENE, {
        if inst.scene.grid != inst.grid {
            Err("scene grid differs from instance grid".into())
        } else if inst.puzzle.scene(&inst.grid) != inst.scene {
            Err("scene does not match the puzzle content".into())
        } else {
            Ok(())
        }
    });

    report.push(CHECK_RENDER, render(&inst.scene).map(|_| ()).map_err(|e| e.to_string()));
    report
}

fn check_options(opts: &[OptionEntry], want: OptionCount, solution: Option<&Solution>, inst: &Instance) -> Result<(), String> {
    if !want.admits(opts.len()) {
        return Err(format!("{} options, expected {want:?}", opts.len()));
    }
    for (o, l) in opts.iter().zip(OPTION_LABELS) {
        if o.label != l {
            return Err(format!("option label {} out of sequence", o.label));
        }
    }
    let mut values: Vec<&str> = opts.iter().map(|o| o.value.as_str()).collect();
    values.sort_unstable();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return Err("two options carry the same value".into());
    }
    if let Some(Solution::Choice(v)) = solution {
        let hits = opts.iter().filter(|o| o.value == *v).count();
        if hits != 1 {
            return Err(format!("{hits} options equal the oracle value"));
        }
    }
    let expected: Option<Vec<(String, String)>> = inst
        .puzzle
        .choices(&inst.grid)
        .map(|cs| cs.into_iter().map(|c| (c.text, c.value)).collect());
    let stored: Vec<(String, String)> = opts.iter().map(|o| (o.text.clone(), o.value.clone())).collect();
    if expected.as_ref() != Some(&stored) {
        return Err("options differ from the puzzle's choice list".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> GenConfig {
        GenConfig::default()
    }

    #[test]
    fn every_task_generates_a_valid_pair() {
        for spec in catalog() {
            let pair = generate_pair(spec, 3, &cfg()).unwrap_or_else(|e| panic!("{e}"));
            for inst in [&pair.cartesian, &pair.polar] {
                let r = validate_instance(inst);
                assert!(r.passed(), "{r}");
            }
            if spec.alignment == Alignment::FullyAligned {
                assert!(pair.truths_equal(), "{}", spec.id);
            }
        }
    }

    #[test]
    fn pair_is_deterministic() {
        let spec = task("sudoku").unwrap();
        let a = serde_json::to_string(&generate_pair(spec, 7, &cfg()).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_pair(spec, 7, &cfg()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perturbed_truth_fails_oracle_check() {
        let mut inst = generate_pair(task("lattice_paths").unwrap(), 1, &cfg()).unwrap().cartesian;
        let Answer::Digit(n) = inst.ground_truth else { panic!() };
        inst.ground_truth = Answer::Digit(n + 1);
        let r = validate_instance(&inst);
        assert!(!r.check(CHECK_ORACLE).unwrap().passed);
    }

    #[test]
    fn duplicate_truth_option_fails_distractor_check() {
        let mut inst = generate_pair(task("n_queens").unwrap(), 1, &cfg()).unwrap().polar;
        let opts = inst.options.as_mut().unwrap();
        let truth = opts.iter().find(|o| Answer::OptionLabel(o.label.clone()) == inst.ground_truth).unwrap().value.clone();
        let other = opts.iter_mut().find(|o| o.value != truth).unwrap();
        other.value = truth;
        assert!(!validate_instance(&inst).check(CHECK_OPTIONS).unwrap().passed);
    }

    #[test]
    fn variants_cover_both_tilings() {
        for t in TILING_VARIANTS {
            let inst = generate_variant(2, t).unwrap();
            assert_eq!(inst.topology, t);
            assert!(validate_instance(&inst).passed());
        }
    }
}

//! The two-population cooperative coevolutionary loop.
//!
//! Representations and interpreters evolve in separate populations with the
//! same machinery: tournament selection, single-point crossover, single-gene
//! mutation and elitism. They only meet at evaluation time. An individual is
//! scored by rendering it with each *representative* of the other population
//! (that population's fittest individuals) and aggregating the resulting
//! errors. Interpreters breed on a slower cadence than representations.
//!
//! All randomness is drawn from one seeded ChaCha stream on the calling
//! thread. Evaluations are pure and run in parallel, so the thread count never
//! changes a result.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::{Fitness, FitnessError, MaeMode, Scorer};
use crate::genomes::{
    crossover, mutate, Genome, GenomeError, GenomeLimits, InterpreterGenome, RepresentationGenome, SetupKind,
};
use crate::imaging::{ImagingError, PalettedImage, MAX_PALETTE_SIZE};
use crate::rendering::{render_into, Canvas, RenderError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("population has not been evaluated")]
    Unevaluated,
    #[error("no partners to evaluate against")]
    NoPartners,
    #[error("target is {got:?}, configuration expects {expected:?}")]
    TargetMismatch { expected: (u32, u32), got: (u32, u32) },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Genome(#[from] GenomeError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}

/// How the per-partner errors of one individual combine into its fitness.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Mean,
    Best,
    Worst,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "best" => Ok(Aggregation::Best),
            "worst" => Ok(Aggregation::Worst),
            _ => Err(format!("unknown aggregation '{s}', expected mean, best or worst")),
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Mean => "mean",
            Aggregation::Best => "best",
            Aggregation::Worst => "worst",
        })
    }
}

/// Every parameter of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub setup: SetupKind,
    pub generations: u64,
    pub rep_pop_size: usize,
    pub interp_pop_size: usize,
    pub tournament_size: usize,
    pub p_mut_representations: f64,
    pub p_mut_interpreters: f64,
    pub n_representatives: usize,
    pub n_elites: usize,
    /// Interpreters breed after generation `g` when `(g + 1) % interp_evolve_every == 0`.
    pub interp_evolve_every: u64,
    /// Number of colors the inspiration image is reduced to.
    pub palette_size: usize,
    pub seed: u64,
    pub snapshot_every: u64,
    pub aggregation: Aggregation,
    pub mae_mode: MaeMode,
    pub limits: GenomeLimits,
}

impl RunConfig {
    /// Default parameters for `setup` on an image of the given size.
    pub fn new(setup: SetupKind, width: u32, height: u32) -> Self {
        RunConfig {
            setup,
            generations: match setup {
                SetupKind::Chunks => 20_000,
                SetupKind::Polygons | SetupKind::Circles => 50_000,
            },
            rep_pop_size: 20,
            interp_pop_size: 10,
            tournament_size: 4,
            p_mut_representations: 0.3,
            p_mut_interpreters: 0.3,
            n_representatives: 4,
            n_elites: 2,
            interp_evolve_every: 3,
            palette_size: 4,
            seed: 0,
            snapshot_every: 250,
            aggregation: Aggregation::Mean,
            mae_mode: MaeMode::Rgb,
            limits: GenomeLimits::for_image(width, height),
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Config(m));
        if self.generations == 0 {
            return bad("generations must be at least 1".into());
        }
        for (name, size) in [
            ("representations", self.rep_pop_size),
            ("interpreters", self.interp_pop_size),
        ] {
            if self.n_representatives == 0 || self.n_representatives > size {
                return bad(format!(
                    "n_representatives {} must be in 1..={size} ({name} population)",
                    self.n_representatives
                ));
            }
            if self.n_elites >= size {
                return bad(format!(
                    "n_elites {} must be below the {name} population size {size}",
                    self.n_elites
                ));
            }
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be at least 1".into());
        }
        for p in [self.p_mut_representations, self.p_mut_interpreters] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("mutation probability {p} outside [0, 1]"));
            }
        }
        if self.interp_evolve_every == 0 || self.snapshot_every == 0 {
            return bad("interp_evolve_every and snapshot_every must be at least 1".into());
        }
        if self.palette_size == 0 || self.palette_size > MAX_PALETTE_SIZE {
            return bad(format!("palette_size must be in 1..={MAX_PALETTE_SIZE}"));
        }
        self.limits.validate()?;
        let l = &self.limits;
        if l.representation_len(self.setup) < 2 || l.interpreter_len(self.setup) < 2 {
            return bad("genomes need at least 2 genes for crossover".into());
        }
        Ok(())
    }

    pub fn rep_breeding(&self) -> BreedParams {
        BreedParams {
            size: self.rep_pop_size,
            n_elites: self.n_elites,
            tournament_size: self.tournament_size,
            p_mut: self.p_mut_representations,
        }
    }

    pub fn interp_breeding(&self) -> BreedParams {
        BreedParams {
            size: self.interp_pop_size,
            n_elites: self.n_elites,
            tournament_size: self.tournament_size,
            p_mut: self.p_mut_interpreters,
        }
    }

    /// Whether the interpreters breed at the end of `generation`.
    pub fn interpreters_breed_after(&self, generation: u64) -> bool {
        (generation + 1) % self.interp_evolve_every == 0
    }

    /// Whether a frame is taken after `generation`; the last one always is.
    pub fn snapshot_after(&self, generation: u64) -> bool {
        generation % self.snapshot_every == 0 || generation + 1 == self.generations
    }
}

/// Breeding parameters for one population.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BreedParams {
    pub size: usize,
    pub n_elites: usize,
    pub tournament_size: usize,
    pub p_mut: f64,
}

/// A genome that is scored by pairing it with members of the other population.
pub trait Cooperator: Genome + Serialize {
    type Partner: Cooperator<Partner = Self>;

    /// Renders `self` together with `partner` into `canvas`.
    fn paint(&self, partner: &Self::Partner, canvas: &mut Canvas, palette_size: usize) -> Result<(), RenderError>;

    /// The pairing as (representation, interpreter).
    fn pair_with(&self, partner: &Self::Partner) -> (RepresentationGenome, InterpreterGenome);
}

impl Cooperator for RepresentationGenome {
    type Partner = InterpreterGenome;

    fn paint(&self, partner: &InterpreterGenome, canvas: &mut Canvas, palette_size: usize) -> Result<(), RenderError> {
        render_into(canvas, self, partner, palette_size)
    }

    fn pair_with(&self, partner: &InterpreterGenome) -> (RepresentationGenome, InterpreterGenome) {
        (self.clone(), partner.clone())
    }
}

impl Cooperator for InterpreterGenome {
    type Partner = RepresentationGenome;

    fn paint(
        &self,
        partner: &RepresentationGenome,
        canvas: &mut Canvas,
        palette_size: usize,
    ) -> Result<(), RenderError> {
        render_into(canvas, partner, self, palette_size)
    }

    fn pair_with(&self, partner: &RepresentationGenome) -> (RepresentationGenome, InterpreterGenome) {
        (partner.clone(), self.clone())
    }
}

/// Scores pairings against a fixed target.
#[derive(Clone, Debug)]
pub struct Evaluator {
    scorer: Scorer,
    width: u32,
    height: u32,
    aggregation: Aggregation,
}

/// The outcome of scoring one individual against all partners.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub fitness: Fitness,
    /// Index of the partner that produced the lowest single-pairing error
    /// (lowest index on ties), and that error.
    pub best_partner: usize,
    pub best_pairing: Fitness,
}

impl Evaluator {
    pub fn new(target: &PalettedImage, mae_mode: MaeMode, aggregation: Aggregation) -> Self {
        Evaluator {
            scorer: Scorer::new(target, mae_mode),
            width: target.width(),
            height: target.height(),
            aggregation,
        }
    }

    pub fn palette_size(&self) -> usize {
        self.scorer.palette_size()
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Error of a single pairing.
    pub fn pairing<G: Cooperator>(&self, g: &G, partner: &G::Partner) -> Result<Fitness, EngineError> {
        let mut canvas = Canvas::new(self.width, self.height);
        g.paint(partner, &mut canvas, self.palette_size())?;
        Ok(self.scorer.score(canvas.indices())?)
    }

    fn evaluate_in<G: Cooperator>(
        &self,
        canvas: &mut Canvas,
        g: &G,
        partners: &[G::Partner],
    ) -> Result<Evaluation, EngineError> {
        if partners.is_empty() {
            return Err(EngineError::NoPartners);
        }
        let mut totals = Vec::with_capacity(partners.len());
        for p in partners {
            g.paint(p, canvas, self.palette_size())?;
            totals.push(self.scorer.total_error(canvas.indices())?);
        }
        let denominator = self.scorer.denominator();
        let (best_partner, &best_total) = totals
            .iter()
            .enumerate()
            .min_by_key(|&(i, &t)| (t, i))
            .expect("partners is non-empty");
        let aggregate = match self.aggregation {
            Aggregation::Mean => totals.iter().sum::<u64>() as f64 / totals.len() as f64,
            Aggregation::Best => best_total as f64,
            Aggregation::Worst => *totals.iter().max().expect("partners is non-empty") as f64,
        };
        Ok(Evaluation {
            fitness: Fitness(aggregate / denominator),
            best_partner,
            best_pairing: Fitness(best_total as f64 / denominator),
        })
    }
}

/// Scores `g` against every partner and aggregates (mean by default).
pub fn evaluate_individual<G: Cooperator>(
    g: &G,
    partners: &[G::Partner],
    evaluator: &Evaluator,
) -> Result<Evaluation, EngineError> {
    let (w, h) = evaluator.dimensions();
    evaluator.evaluate_in(&mut Canvas::new(w, h), g, partners)
}

/// Scores a whole population in parallel. Results come back in population
/// order and do not depend on the thread count.
pub fn evaluate_population<G: Cooperator>(
    genomes: &[G],
    partners: &[G::Partner],
    evaluator: &Evaluator,
) -> Result<Vec<Evaluation>, EngineError>
where
    G::Partner: Sync,
{
    let (w, h) = evaluator.dimensions();
    genomes
        .par_iter()
        .map_init(
            || Canvas::new(w, h),
            |canvas, g| evaluator.evaluate_in(canvas, g, partners),
        )
        .collect()
}

/// Genomes with, once evaluated, one fitness per member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population<G> {
    genomes: Vec<G>,
    #[serde(skip)]
    fitness: Option<Vec<Fitness>>,
}

impl<G: Genome> Population<G> {
    pub fn new(genomes: Vec<G>) -> Self {
        Population { genomes, fitness: None }
    }

    pub fn with_fitness(genomes: Vec<G>, fitness: Vec<Fitness>) -> Self {
        assert_eq!(genomes.len(), fitness.len(), "one fitness per genome");
        Population {
            genomes,
            fitness: Some(fitness),
        }
    }

    pub fn genomes(&self) -> &[G] {
        &self.genomes
    }

    pub fn len(&self) -> usize {
        self.genomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genomes.is_empty()
    }

    pub fn fitness(&self) -> Result<&[Fitness], EngineError> {
        self.fitness.as_deref().ok_or(EngineError::Unevaluated)
    }

    pub fn set_fitness(&mut self, fitness: Vec<Fitness>) {
        assert_eq!(self.genomes.len(), fitness.len(), "one fitness per genome");
        self.fitness = Some(fitness);
    }
}

/// Indices of the `n` fittest members, best first; ties go to the lower index.
pub fn rank_best<G: Genome>(pop: &Population<G>, n: usize) -> Result<Vec<usize>, EngineError> {
    let fitness = pop.fitness()?;
    if n > fitness.len() {
        return Err(EngineError::Config(format!("cannot pick {n} of {}", fitness.len())));
    }
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by_key(|&i| (fitness[i], i));
    order.truncate(n);
    Ok(order)
}

/// The `n` fittest members, used as partners when scoring the other population.
pub fn select_representatives<G: Genome>(pop: &Population<G>, n: usize) -> Result<Vec<G>, EngineError> {
    Ok(rank_best(pop, n)?.into_iter().map(|i| pop.genomes[i].clone()).collect())
}

/// Winner among already-drawn contestants: lowest fitness, then lowest index.
pub fn tournament_winner(fitness: &[Fitness], drawn: &[usize]) -> usize {
    *drawn
        .iter()
        .min_by_key(|&&i| (fitness[i], i))
        .expect("tournament needs at least one contestant")
}

/// Draws `k` members uniformly with replacement and returns the index of the
/// fittest.
pub fn tournament_select<G: Genome, R: Rng + ?Sized>(
    pop: &Population<G>,
    k: usize,
    rng: &mut R,
) -> Result<usize, EngineError> {
    let fitness = pop.fitness()?;
    if k == 0 || fitness.is_empty() {
        return Err(EngineError::Config(
            "tournament needs k >= 1 and a non-empty population".into(),
        ));
    }
    let drawn: Vec<usize> = (0..k)
        .map(|_| rng.random_range(0..fitness.len() as u32) as usize)
        .collect();
    Ok(tournament_winner(fitness, &drawn))
}

/// Produces the next generation: clones of the `n_elites` fittest, then
/// offspring pairs from two tournaments, crossover and per-child mutation,
/// until the population is full.
pub fn breed_population<G: Genome, R: Rng + ?Sized>(
    pop: &Population<G>,
    params: &BreedParams,
    limits: &GenomeLimits,
    palette_size: usize,
    rng: &mut R,
) -> Result<Population<G>, EngineError> {
    let mut next: Vec<G> = rank_best(pop, params.n_elites.min(params.size))?
        .into_iter()
        .map(|i| pop.genomes[i].clone())
        .collect();
    while next.len() < params.size {
        let a = tournament_select(pop, params.tournament_size, rng)?;
        let b = tournament_select(pop, params.tournament_size, rng)?;
        let (c1, c2) = crossover(&pop.genomes[a], &pop.genomes[b], rng)?;
        next.push(mutate(&c1, limits, palette_size, params.p_mut, rng));
        if next.len() < params.size {
            next.push(mutate(&c2, limits, palette_size, params.p_mut, rng));
        }
    }
    Ok(Population::new(next))
}

/// The lowest-error single pairing seen so far.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestPair {
    pub representation: RepresentationGenome,
    pub interpreter: InterpreterGenome,
    pub fitness: Fitness,
}

/// One row of the fitness log.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub best_rep_fitness: Fitness,
    pub mean_rep_fitness: Fitness,
    pub best_interp_fitness: Fitness,
    pub mean_interp_fitness: Fitness,
    pub best_pair_fitness: Fitness,
}

pub const FITNESS_LOG_HEADER: &str =
    "generation,best_rep_fitness,mean_rep_fitness,best_interp_fitness,mean_interp_fitness,best_pair_fitness";

/// Renders the log as CSV with a header row.
pub fn fitness_log_csv(records: &[GenerationRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(FITNESS_LOG_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.generation,
            r.best_rep_fitness,
            r.mean_rep_fitness,
            r.best_interp_fitness,
            r.mean_interp_fitness,
            r.best_pair_fitness
        );
    }
    out
}

/// Both populations and everything needed to take the next step.
#[derive(Clone, Debug)]
pub struct EvolutionState {
    /// Index of the next generation to evaluate.
    pub generation: u64,
    pub representations: Population<RepresentationGenome>,
    pub interpreters: Population<InterpreterGenome>,
    pub rep_representatives: Vec<RepresentationGenome>,
    pub interp_representatives: Vec<InterpreterGenome>,
    pub best: Option<BestPair>,
    pub rng: ChaCha8Rng,
}

/// A frame of the run: the best pairing rendered after `generation`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub generation: u64,
    pub image: PalettedImage,
}

/// What one call to [`Evolution::step`] produced.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub record: GenerationRecord,
    pub snapshot: Option<Snapshot>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub log: Vec<GenerationRecord>,
    pub frames: Vec<Snapshot>,
    pub best: BestPair,
}

/// A run in progress.
#[derive(Clone, Debug)]
pub struct Evolution {
    config: RunConfig,
    target: PalettedImage,
    evaluator: Evaluator,
    state: EvolutionState,
    log: Vec<GenerationRecord>,
}

impl Evolution {
    /// Random initial populations. With no previous generation to rank,
    /// the first representatives are drawn uniformly without replacement.
    pub fn new(config: RunConfig, target: PalettedImage) -> Result<Self, EngineError> {
        config.validate()?;
        check_target(&config, &target)?;
        let evaluator = Evaluator::new(&target, config.mae_mode, config.aggregation);
        let colors = evaluator.palette_size();
        let limits = &config.limits;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let reps: Vec<RepresentationGenome> = (0..config.rep_pop_size)
            .map(|_| RepresentationGenome::random(config.setup, limits, colors, &mut rng))
            .collect();
        let interps: Vec<InterpreterGenome> = (0..config.interp_pop_size)
            .map(|_| InterpreterGenome::random(config.setup, limits, colors, &mut rng))
            .collect();
        let rep_representatives = index::sample(&mut rng, reps.len(), config.n_representatives)
            .into_iter()
            .map(|i| reps[i].clone())
            .collect();
        let interp_representatives = index::sample(&mut rng, interps.len(), config.n_representatives)
            .into_iter()
            .map(|i| interps[i].clone())
            .collect();

        Ok(Evolution {
            state: EvolutionState {
                generation: 0,
                representations: Population::new(reps),
                interpreters: Population::new(interps),
                rep_representatives,
                interp_representatives,
                best: None,
                rng,
            },
            config,
            target,
            evaluator,
            log: Vec::new(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn target(&self) -> &PalettedImage {
        &self.target
    }

    pub fn state(&self) -> &EvolutionState {
        &self.state
    }

    pub fn log(&self) -> &[GenerationRecord] {
        &self.log
    }

    pub fn best(&self) -> Option<&BestPair> {
        self.state.best.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.state.generation >= self.config.generations
    }

    /// Evaluates and breeds one generation.
    ///
    /// Representations are scored against the interpreter representatives and
    /// interpreters against the representation representatives. The
    /// representation representatives are then refreshed from the new scores
    /// and the representations breed. The interpreters breed, and refresh
    /// their representatives, only after every `interp_evolve_every`-th
    /// generation; in between their population and representatives carry
    /// over unchanged, so the representations see a fixed environment.
    pub fn step(&mut self) -> Result<StepOutcome, EngineError> {
        if self.is_finished() {
            return Err(EngineError::Config("run already finished".into()));
        }
        let cfg = &self.config;
        let s = &mut self.state;
        let generation = s.generation;
        let colors = self.evaluator.palette_size();

        let rep_evals = evaluate_population(s.representations.genomes(), &s.interp_representatives, &self.evaluator)?;
        let interp_evals = evaluate_population(s.interpreters.genomes(), &s.rep_representatives, &self.evaluator)?;

        for (g, e) in s.representations.genomes().iter().zip(&rep_evals) {
            offer_best(
                &mut s.best,
                g,
                &s.interp_representatives[e.best_partner],
                e.best_pairing,
            );
        }
        for (g, e) in s.interpreters.genomes().iter().zip(&interp_evals) {
            offer_best(&mut s.best, g, &s.rep_representatives[e.best_partner], e.best_pairing);
        }

        s.representations
            .set_fitness(rep_evals.iter().map(|e| e.fitness).collect());
        s.interpreters
            .set_fitness(interp_evals.iter().map(|e| e.fitness).collect());
        let record = GenerationRecord {
            generation,
            best_rep_fitness: min_fitness(s.representations.fitness()?),
            mean_rep_fitness: mean_fitness(s.representations.fitness()?),
            best_interp_fitness: min_fitness(s.interpreters.fitness()?),
            mean_interp_fitness: mean_fitness(s.interpreters.fitness()?),
            best_pair_fitness: s.best.as_ref().expect("evaluated at least one pairing").fitness,
        };

        s.rep_representatives = select_representatives(&s.representations, cfg.n_representatives)?;
        s.representations = breed_population(&s.representations, &cfg.rep_breeding(), &cfg.limits, colors, &mut s.rng)?;
        if cfg.interpreters_breed_after(generation) {
            s.interp_representatives = select_representatives(&s.interpreters, cfg.n_representatives)?;
            s.interpreters =
                breed_population(&s.interpreters, &cfg.interp_breeding(), &cfg.limits, colors, &mut s.rng)?;
        }
        s.generation += 1;
        self.log.push(record);

        let snapshot = if cfg.snapshot_after(generation) {
            Some(Snapshot {
                generation,
                image: self.render_best()?,
            })
        } else {
            None
        };
        Ok(StepOutcome { record, snapshot })
    }

    /// Renders the best pairing found so far with the target palette.
    pub fn render_best(&self) -> Result<PalettedImage, EngineError> {
        let best = self
            .state
            .best
            .as_ref()
            .ok_or_else(|| EngineError::Config("nothing evaluated yet".into()))?;
        let (w, h) = self.evaluator.dimensions();
        let mut canvas = Canvas::new(w, h);
        render_into(
            &mut canvas,
            &best.representation,
            &best.interpreter,
            self.evaluator.palette_size(),
        )?;
        Ok(canvas.into_image(self.target.palette().clone())?)
    }

    /// Steps until the configured number of generations is reached.
    pub fn run_to_end(mut self) -> Result<RunResult, EngineError> {
        let mut frames = Vec::new();
        while !self.is_finished() {
            if let Some(s) = self.step()?.snapshot {
                frames.push(s);
            }
        }
        Ok(RunResult {
            log: self.log,
            frames,
            best: self.state.best.expect("at least one generation ran"),
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let s = &self.state;
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            target: TargetFingerprint::of(&self.target),
            generation: s.generation,
            representations: s.representations.genomes().to_vec(),
            interpreters: s.interpreters.genomes().to_vec(),
            rep_representatives: s.rep_representatives.clone(),
            interp_representatives: s.interp_representatives.clone(),
            best: s.best.clone(),
            rng: RngState::capture(&s.rng),
            log: self.log.clone(),
        }
    }

    /// Continues a run from a checkpoint; the target must be the one the run
    /// started with.
    pub fn resume(checkpoint: Checkpoint, target: PalettedImage) -> Result<Self, EngineError> {
        if checkpoint.format != CHECKPOINT_FORMAT || checkpoint.version != CHECKPOINT_VERSION {
            return Err(EngineError::Checkpoint(format!(
                "unsupported format {} v{}",
                checkpoint.format, checkpoint.version
            )));
        }
        let config = checkpoint.config;
        config.validate()?;
        check_target(&config, &target)?;
        if checkpoint.target != TargetFingerprint::of(&target) {
            return Err(EngineError::Checkpoint(
                "target image differs from the one the run started with".into(),
            ));
        }
        let evaluator = Evaluator::new(&target, config.mae_mode, config.aggregation);
        let colors = evaluator.palette_size();
        for g in &checkpoint.representations {
            g.validate(&config.limits, colors)?;
        }
        for g in &checkpoint.interpreters {
            g.validate(&config.limits, colors)?;
        }
        if checkpoint.representations.len() != config.rep_pop_size
            || checkpoint.interpreters.len() != config.interp_pop_size
            || checkpoint.rep_representatives.len() != config.n_representatives
            || checkpoint.interp_representatives.len() != config.n_representatives
            || checkpoint.log.len() as u64 != checkpoint.generation
        {
            return Err(EngineError::Checkpoint(
                "population sizes or log length disagree with the config".into(),
            ));
        }
        Ok(Evolution {
            state: EvolutionState {
                generation: checkpoint.generation,
                representations: Population::new(checkpoint.representations),
                interpreters: Population::new(checkpoint.interpreters),
                rep_representatives: checkpoint.rep_representatives,
                interp_representatives: checkpoint.interp_representatives,
                best: checkpoint.best,
                rng: checkpoint.rng.restore()?,
            },
            config,
            target,
            evaluator,
            log: checkpoint.log,
        })
    }
}

/// Runs `config` on `target` from start to finish.
pub fn run(config: RunConfig, target: PalettedImage) -> Result<RunResult, EngineError> {
    Evolution::new(config, target)?.run_to_end()
}

fn check_target(config: &RunConfig, target: &PalettedImage) -> Result<(), EngineError> {
    let expected = (config.limits.width, config.limits.height);
    if target.dimensions() != expected {
        return Err(EngineError::TargetMismatch {
            expected,
            got: target.dimensions(),
        });
    }
    if target.palette().len() > config.palette_size {
        return Err(EngineError::Config(format!(
            "target has {} colors but palette_size is {}",
            target.palette().len(),
            config.palette_size
        )));
    }
    Ok(())
}

fn offer_best<G: Cooperator>(best: &mut Option<BestPair>, g: &G, partner: &G::Partner, fitness: Fitness) {
    if best.as_ref().is_some_and(|b| b.fitness <= fitness) {
        return;
    }
    let (representation, interpreter) = g.pair_with(partner);
    *best = Some(BestPair {
        representation,
        interpreter,
        fitness,
    });
}

fn min_fitness(f: &[Fitness]) -> Fitness {
    *f.iter().min().expect("non-empty population")
}

fn mean_fitness(f: &[Fitness]) -> Fitness {
    Fitness(f.iter().map(|x| x.0).sum::<f64>() / f.len() as f64)
}

pub const CHECKPOINT_FORMAT: &str = "omnirep-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to continue a run bit-identically.
///
/// Serialized as pretty-printed JSON. Field by field:
///
/// * `format`, `version`: always `"omnirep-checkpoint"` and `1`.
/// * `config`: the full [`RunConfig`].
/// * `target`: width, height, palette and an FNV-1a hash of the target's
///   indices, checked on resume.
/// * `generation`: index of the next generation to evaluate.
/// * `representations`, `interpreters`: the unevaluated populations, each
///   genome tagged with its setup (`{"kind": "circles", "genes": [...]}`).
/// * `rep_representatives`, `interp_representatives`: current partners.
/// * `best`: best pairing so far, or `null` before the first generation.
/// * `rng`: ChaCha8 seed (hex), stream and word position (decimal string).
/// * `log`: fitness records of all completed generations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: RunConfig,
    pub target: TargetFingerprint,
    pub generation: u64,
    pub representations: Vec<RepresentationGenome>,
    pub interpreters: Vec<InterpreterGenome>,
    pub rep_representatives: Vec<RepresentationGenome>,
    pub interp_representatives: Vec<InterpreterGenome>,
    pub best: Option<BestPair>,
    pub rng: RngState,
    pub log: Vec<GenerationRecord>,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, EngineError> {
        serde_json::from_str(s).map_err(|e| EngineError::Checkpoint(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetFingerprint {
    pub width: u32,
    pub height: u32,
    pub palette: crate::imaging::Palette,
    pub indices_fnv1a: String,
}

impl TargetFingerprint {
    fn of(target: &PalettedImage) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in target.indices() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        TargetFingerprint {
            width: target.width(),
            height: target.height(),
            palette: target.palette().clone(),
            indices_fnv1a: format!("{h:016x}"),
        }
    }
}

/// Position of a ChaCha8 stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: String,
    pub stream: u64,
    pub word_pos: String,
}

impl RngState {
    fn capture(rng: &ChaCha8Rng) -> Self {
        RngState {
            seed: rng.get_seed().iter().map(|b| format!("{b:02x}")).collect(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    fn restore(&self) -> Result<ChaCha8Rng, EngineError> {
        let bad = || EngineError::Checkpoint("malformed rng state".into());
        if self.seed.len() != 64 || !self.seed.is_ascii() {
            return Err(bad());
        }
        let mut seed = [0u8; 32];
        for (i, b) in seed.iter_mut().enumerate() {
            *b = u8::from_str_radix(&self.seed[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos.parse().map_err(|_| bad())?);
        Ok(rng)
    }
}

//! Deterministic genetic algorithm over fixed-length index vectors.
//!
//! Gene `g` takes values in `[0, arity_g)`. Each generation runs binary
//! tournament selection, uniform crossover, per-gene uniform resampling and
//! elitist replacement, in that order, off one ChaCha stream. Fitness calls
//! within a generation run on the rayon pool; they are pure, so the result
//! does not depend on the thread count.
//!
//! Infeasible candidates (fitness `None`) get infinite fitness and can never
//! displace the incumbent.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub max_generations: usize,
    pub seed: u64,
    pub elitism_count: usize,
    /// Per-gene resample rate used to seed generation 0 around the incumbent.
    pub seed_mutation_rate: f64,
    /// Stop once the best fitness is unchanged for this many generations.
    pub stall_generations: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            max_generations: 100,
            seed: 0,
            elitism_count: 1,
            seed_mutation_rate: 0.3,
            stall_generations: 20,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("invalid GA config: {0}")]
    Config(String),
    #[error("incumbent gene {gene} = {value} is outside arity {arity}")]
    OutOfSpace { gene: usize, value: usize, arity: usize },
    #[error("incumbent has {found} genes, space has {expected}")]
    Length { expected: usize, found: usize },
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let rate = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(GaError::Config(format!("{name} = {v} is not a probability")))
            }
        };
        if self.population_size < 2 {
            return Err(GaError::Config("population_size must be at least 2".into()));
        }
        if self.max_generations < 1 {
            return Err(GaError::Config("max_generations must be at least 1".into()));
        }
        if self.elitism_count >= self.population_size {
            return Err(GaError::Config("elitism_count must be below population_size".into()));
        }
        rate("crossover_rate", self.crossover_rate)?;
        rate("mutation_rate", self.mutation_rate)?;
        rate("seed_mutation_rate", self.seed_mutation_rate)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: Vec<usize>,
    pub best_fitness: f64,
    pub generations_used: usize,
    /// Fitness calls made, a thread-independent work measure.
    pub evaluations: u64,
    /// The incumbent was infeasible; it is returned untouched.
    pub incumbent_infeasible: bool,
    /// Best fitness after each generation, generation 0 first.
    pub history: Vec<f64>,
}

#[derive(Clone)]
struct Individual {
    genes: Vec<usize>,
    fitness: f64,
}

fn rank(a: &Individual, b: &Individual) -> Ordering {
    a.fitness.total_cmp(&b.fitness).then_with(|| a.genes.cmp(&b.genes))
}

pub fn minimize<F>(arities: &[usize], fitness: F, incumbent: &[usize], config: &GaConfig) -> Result<GaOutcome, GaError>
where
    F: Fn(&[usize]) -> Option<f64> + Sync,
{
    config.validate()?;
    if incumbent.len() != arities.len() {
        return Err(GaError::Length {
            expected: arities.len(),
            found: incumbent.len(),
        });
    }
    if let Some(gene) = incumbent.iter().zip(arities).position(|(&v, &a)| v >= a) {
        return Err(GaError::OutOfSpace {
            gene,
            value: incumbent[gene],
            arity: arities[gene],
        });
    }

    let start = fitness(incumbent);
    let Some(start) = start else {
        return Ok(GaOutcome {
            best: incumbent.to_vec(),
            best_fitness: f64::INFINITY,
            generations_used: 0,
            evaluations: 1,
            incumbent_infeasible: true,
            history: vec![f64::INFINITY],
        });
    };
    if arities.iter().all(|&a| a <= 1) {
        return Ok(GaOutcome {
            best: incumbent.to_vec(),
            best_fitness: start,
            generations_used: 0,
            evaluations: 1,
            incumbent_infeasible: false,
            history: vec![start],
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let evaluate = |batch: Vec<Vec<usize>>| -> Vec<Individual> {
        let scores: Vec<f64> = batch
            .par_iter()
            .map(|g| fitness(g).unwrap_or(f64::INFINITY))
            .collect();
        batch
            .into_iter()
            .zip(scores)
            .map(|(genes, fitness)| Individual { genes, fitness })
            .collect()
    };

    let mut seeded = Vec::with_capacity(config.population_size - 1);
    for _ in 1..config.population_size {
        let mut genes = incumbent.to_vec();
        mutate(&mut genes, arities, config.seed_mutation_rate, &mut rng);
        seeded.push(genes);
    }
    let mut evaluations = 1 + seeded.len() as u64;
    let mut population = vec![Individual {
        genes: incumbent.to_vec(),
        fitness: start,
    }];
    population.extend(evaluate(seeded));

    let mut best = population.iter().min_by(|a, b| rank(a, b)).unwrap().clone();
    if best.fitness >= start {
        // Ties never displace the incumbent.
        best = population[0].clone();
    }
    let mut history = vec![best.fitness];
    let mut generations_used = 0;
    let mut stall = 0;

    for generation in 1..=config.max_generations {
        let brood = config.population_size - config.elitism_count;
        let mut offspring: Vec<Vec<usize>> = Vec::with_capacity(brood + 1);
        while offspring.len() < brood {
            let mut a = tournament(&population, &mut rng).genes.clone();
            let mut b = tournament(&population, &mut rng).genes.clone();
            if rng.random::<f64>() < config.crossover_rate {
                for g in 0..a.len() {
                    if rng.random::<bool>() {
                        std::mem::swap(&mut a[g], &mut b[g]);
                    }
                }
            }
            mutate(&mut a, arities, config.mutation_rate, &mut rng);
            mutate(&mut b, arities, config.mutation_rate, &mut rng);
            offspring.push(a);
            if offspring.len() < brood {
                offspring.push(b);
            }
        }
        evaluations += offspring.len() as u64;

        population.sort_by(rank);
        population.truncate(config.elitism_count);
        population.extend(evaluate(offspring));

        let leader = population.iter().min_by(|a, b| rank(a, b)).unwrap();
        generations_used = generation;
        if leader.fitness < best.fitness {
            best = leader.clone();
            stall = 0;
        } else {
            stall += 1;
        }
        history.push(best.fitness);
        if stall >= config.stall_generations {
            break;
        }
    }

    Ok(GaOutcome {
        best: best.genes,
        best_fitness: best.fitness,
        generations_used,
        evaluations,
        incumbent_infeasible: false,
        history,
    })
}

fn tournament<'a>(population: &'a [Individual], rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if rank(a, b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn mutate(genes: &mut [usize], arities: &[usize], rate: f64, rng: &mut ChaCha8Rng) {
    for (g, &arity) in genes.iter_mut().zip(arities) {
        if rng.random::<f64>() < rate {
            *g = rng.random_range(0..arity);
        }
    }
}

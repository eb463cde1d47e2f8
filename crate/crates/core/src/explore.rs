//! Breadth-first exploration of mutation classes.
//!
//! Words are expanded level by level in lexicographic order; a word never
//! repeats its last letter since `μ_j μ_j` is the identity (checked
//! separately on every edge). Seeds are deduplicated by exact equality, so
//! the first word reaching a seed is the lexicographically smallest among
//! the shortest ones.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classical::{poisson_bracket, Laurent};
use crate::io::{matrix_digest, seed_digest};
use crate::matrix::{is_sign_coherent, mutate_matrix, skew_symmetrizer, skew_symmetrizer_check, Diagonal, IntMatrix, MatrixError, RationalMatrix};
use crate::seed::{recover_lambda, ExchangeData, QuantumSeed, SeedError};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum ExploreError {
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("matrix has no skew-symmetrizer")]
    NotSkewSymmetrizable,
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl ExploreError {
    pub fn is_integrity(&self) -> bool {
        matches!(self, ExploreError::Seed(e) if e.is_integrity())
    }
}

/// A sequence of mutation directions, stored 0-based and written 1-based
/// (`"1,2,1"`; the empty word is `""`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MutationWord(pub Vec<usize>);

impl MutationWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn then(&self, j: usize) -> Self {
        let mut w = self.0.clone();
        w.push(j);
        MutationWord(w)
    }

    /// Checks every letter is below `n`.
    pub fn check_range(&self, n: usize) -> Result<(), SeedError> {
        match self.0.iter().find(|&&j| j >= n) {
            Some(&index) => Err(SeedError::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for MutationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad mutation word {0:?}: expected comma-separated indices starting at 1")]
pub struct ParseWordError(pub String);

impl FromStr for MutationWord {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        s.split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(ParseWordError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MutationWord)
    }
}

impl Serialize for MutationWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MutationWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub depth: usize,
    /// Cap on processed nodes (the root plus every generated child).
    pub budget: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Specialize at `q = 1` and check the Poisson brackets of the first `n`
    /// variables.
    pub classical: bool,
    /// Also count seeds up to relabeling (quadratic in the seed count).
    pub up_to_permutation: bool,
}

impl ExploreOptions {
    pub fn new(depth: usize) -> Self {
        ExploreOptions { depth, budget: DEFAULT_BUDGET, jobs: None, classical: true, up_to_permutation: false }
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = Some(jobs);
        self
    }

    pub fn classical(mut self, on: bool) -> Self {
        self.classical = on;
        self
    }

    pub fn up_to_permutation(mut self, on: bool) -> Self {
        self.up_to_permutation = on;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Violation {
    NotIntegrable,
    NotSignCoherent,
    InvolutionFailed,
    CompatibilityChanged,
    LambdaMismatch,
    PoissonNonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub word: MutationWord,
    pub violation: Violation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Number of passed verifications of each kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeChecks {
    pub involution: usize,
    pub compatibility: usize,
    pub lambda_recovery: usize,
    pub classical: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExploreMode {
    Seed,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExplorationReport {
    pub mode: ExploreMode,
    pub root_digest: String,
    pub depth: usize,
    pub budget: usize,
    pub nodes_visited: usize,
    pub distinct_seeds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinct_up_to_permutation: Option<usize>,
    /// `None` in matrix mode, where there is no `Λ`.
    pub all_integrable: Option<bool>,
    pub all_sign_coherent: bool,
    /// Every child of the last level was already known.
    pub closed: bool,
    /// The budget was not hit.
    pub complete: bool,
    pub counterexamples: Vec<Counterexample>,
    pub edge_checks: EdgeChecks,
}

impl ExplorationReport {
    pub fn has_counterexamples(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// A report together with every distinct seed and the word reaching it.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub report: ExplorationReport,
    pub seeds: Vec<(MutationWord, QuantumSeed)>,
}

/// Checks run on a node independently of its parent.
trait Node: Clone + Eq + Hash + Send + Sync {
    /// Data determined without computing variables; equal nodes have equal shapes.
    type Shape: Eq + Hash;
    fn n(&self) -> usize;
    fn shape(&self) -> Self::Shape;
    fn step_shape(&self, j: usize) -> Result<Self::Shape, ExploreError>;
    fn step(&self, j: usize) -> Result<Self, ExploreError>;
    fn node_violations(&self, ctx: &Context, checks: &mut EdgeChecks) -> Vec<(Violation, Option<String>)>;
    fn edge_violations(&self, parent: &Self, j: usize, ctx: &Context, checks: &mut EdgeChecks)
        -> Result<Vec<(Violation, Option<String>)>, ExploreError>;
}

struct Context {
    d: Diagonal,
    classical: bool,
}

fn sign_violation(b: &IntMatrix) -> Option<(Violation, Option<String>)> {
    is_sign_coherent(b).err().map(|e| {
        let detail = format!(
            "column {} has b_{},{} > 0 and b_{},{} < 0",
            e.column + 1,
            e.positive_row + 1,
            e.column + 1,
            e.negative_row + 1,
            e.column + 1
        );
        (Violation::NotSignCoherent, Some(detail))
    })
}

impl Node for QuantumSeed {
    type Shape = ExchangeData;

    fn n(&self) -> usize {
        QuantumSeed::n(self)
    }

    fn shape(&self) -> ExchangeData {
        self.exchange().clone()
    }

    fn step_shape(&self, j: usize) -> Result<ExchangeData, ExploreError> {
        Ok(self.exchange().mutate(j)?)
    }

    fn step(&self, j: usize) -> Result<Self, ExploreError> {
        Ok(self.mutate(j)?)
    }

    fn node_violations(&self, ctx: &Context, checks: &mut EdgeChecks) -> Vec<(Violation, Option<String>)> {
        let mut out = Vec::new();
        if !self.is_integrable() {
            out.push((Violation::NotIntegrable, None));
        }
        out.extend(sign_violation(self.b()));
        if ctx.classical {
            match first_nonzero_bracket(self) {
                None => checks.classical += 1,
                Some((i, j)) => out.push((
                    Violation::PoissonNonzero,
                    Some(format!("{{x{}, x{}}} != 0 at q = 1", i + 1, j + 1)),
                )),
            }
        }
        out
    }

    fn edge_violations(
        &self,
        parent: &Self,
        j: usize,
        ctx: &Context,
        checks: &mut EdgeChecks,
    ) -> Result<Vec<(Violation, Option<String>)>, ExploreError> {
        let mut out = Vec::new();
        if self.mutate(j)? == *parent {
            checks.involution += 1;
        } else {
            out.push((Violation::InvolutionFailed, Some(format!("mu_{0} mu_{0} != id", j + 1))));
        }
        if *self.d() == ctx.d {
            checks.compatibility += 1;
        } else {
            out.push((Violation::CompatibilityChanged, Some(format!("{} != {}", self.d(), ctx.d))));
        }
        if recover_lambda(self.vars())? == *self.lambda() {
            checks.lambda_recovery += 1;
        } else {
            out.push((Violation::LambdaMismatch, None));
        }
        Ok(out)
    }
}

/// The first pair `i < j < n` with `{x_i, x_j} ≠ 0` after `q ↦ 1`.
fn first_nonzero_bracket(seed: &QuantumSeed) -> Option<(usize, usize)> {
    let lambda: RationalMatrix = seed.initial_torus().lambda().to_rational();
    let vars: Vec<Laurent<_>> = seed.vars()[..seed.n()].iter().map(|v| v.specialize_q1()).collect();
    for i in 0..vars.len() {
        for j in (i + 1)..vars.len() {
            let pb = poisson_bracket(&vars[i], &vars[j], &lambda).expect("variables share the torus rank");
            if !pb.is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

impl Node for IntMatrix {
    type Shape = IntMatrix;

    fn n(&self) -> usize {
        self.cols()
    }

    fn shape(&self) -> IntMatrix {
        self.clone()
    }

    fn step_shape(&self, j: usize) -> Result<IntMatrix, ExploreError> {
        self.step(j)
    }

    fn step(&self, j: usize) -> Result<Self, ExploreError> {
        Ok(mutate_matrix(self, j)?)
    }

    fn node_violations(&self, _ctx: &Context, _checks: &mut EdgeChecks) -> Vec<(Violation, Option<String>)> {
        sign_violation(self).into_iter().collect()
    }

    fn edge_violations(
        &self,
        parent: &Self,
        j: usize,
        ctx: &Context,
        checks: &mut EdgeChecks,
    ) -> Result<Vec<(Violation, Option<String>)>, ExploreError> {
        let mut out = Vec::new();
        if mutate_matrix(self, j)? == *parent {
            checks.involution += 1;
        } else {
            out.push((Violation::InvolutionFailed, Some(format!("mu_{0} mu_{0} != id", j + 1))));
        }
        if skew_symmetrizer_check(&self.block(0, self.cols(), 0, self.cols()), &ctx.d) {
            checks.compatibility += 1;
        } else {
            out.push((Violation::CompatibilityChanged, Some(format!("{} no longer symmetrizes B", ctx.d))));
        }
        Ok(out)
    }
}

struct Expanded<T> {
    word: MutationWord,
    node: T,
    violations: Vec<(Violation, Option<String>)>,
    checks: EdgeChecks,
}

fn expand<T: Node>(parent_word: &MutationWord, parent: &T, ctx: &Context) -> Result<Vec<Expanded<T>>, ExploreError> {
    let mut out = Vec::new();
    for j in 0..parent.n() {
        if parent_word.last() == Some(j) {
            continue;
        }
        let child = parent.step(j)?;
        let mut checks = EdgeChecks::default();
        let mut violations = child.edge_violations(parent, j, ctx, &mut checks)?;
        violations.extend(child.node_violations(ctx, &mut checks));
        out.push(Expanded { word: parent_word.then(j), node: child, violations, checks });
    }
    Ok(out)
}

struct Outcome<T> {
    nodes_visited: usize,
    seeds: Vec<(MutationWord, T)>,
    closed: bool,
    complete: bool,
    counterexamples: Vec<Counterexample>,
    checks: EdgeChecks,
}

fn add_checks(total: &mut EdgeChecks, c: &EdgeChecks) {
    total.involution += c.involution;
    total.compatibility += c.compatibility;
    total.lambda_recovery += c.lambda_recovery;
    total.classical += c.classical;
}

fn bfs<T: Node>(root: T, opts: &ExploreOptions, ctx: &Context) -> Result<Outcome<T>, ExploreError> {
    if opts.depth == 0 {
        return Err(ExploreError::InvalidDepth);
    }
    let pool = match opts.jobs {
        Some(k) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| ExploreError::Pool(e.to_string()))?,
        ),
        None => None,
    };
    let run = |frontier: &[(MutationWord, T)]| -> Result<Vec<Vec<Expanded<T>>>, ExploreError> {
        let work = || frontier.par_iter().map(|(w, s)| expand(w, s, ctx)).collect::<Result<Vec<_>, _>>();
        match &pool {
            Some(p) => p.install(work),
            None => work(),
        }
    };

    let mut checks = EdgeChecks::default();
    let mut counterexamples = Vec::new();
    for (violation, detail) in root.node_violations(ctx, &mut checks) {
        counterexamples.push(Counterexample { word: MutationWord::empty(), violation, detail });
    }
    let mut visited: HashSet<T> = HashSet::new();
    visited.insert(root.clone());
    let mut seeds = vec![(MutationWord::empty(), root)];
    let mut nodes_visited = 1;
    let mut frontier_start = 0;
    let mut complete = opts.budget >= 1;
    let mut closed = false;

    'levels: for _ in 0..opts.depth {
        let frontier_end = seeds.len();
        if frontier_start == frontier_end {
            closed = true;
            break;
        }
        let mut pos = frontier_start;
        while pos < frontier_end {
            let remaining = opts.budget.saturating_sub(nodes_visited);
            if remaining == 0 {
                complete = false;
                break 'levels;
            }
            let per_node = seeds[pos].1.n().max(1);
            let take = (remaining / per_node).clamp(1, frontier_end - pos);
            let batch = run(&seeds[pos..pos + take])?;
            pos += take;
            for child in batch.into_iter().flatten() {
                if nodes_visited >= opts.budget {
                    complete = false;
                    break 'levels;
                }
                nodes_visited += 1;
                add_checks(&mut checks, &child.checks);
                if visited.contains(&child.node) {
                    // violations of a known seed were already recorded under a smaller word
                    continue;
                }
                for (violation, detail) in child.violations {
                    counterexamples.push(Counterexample { word: child.word.clone(), violation, detail });
                }
                visited.insert(child.node.clone());
                seeds.push((child.word, child.node));
            }
        }
        frontier_start = frontier_end;
    }

    if complete && !closed {
        closed = probe_closed(&seeds[frontier_start..], &visited)?;
    }
    Ok(Outcome { nodes_visited, seeds, closed, complete, counterexamples, checks })
}

/// Whether the final frontier has only known children. Nothing is counted;
/// a child whose matrices are new is decided without computing variables.
fn probe_closed<T: Node>(frontier: &[(MutationWord, T)], visited: &HashSet<T>) -> Result<bool, ExploreError> {
    let shapes: HashSet<T::Shape> = visited.iter().map(Node::shape).collect();
    for (word, node) in frontier {
        for j in 0..node.n() {
            if word.last() == Some(j) {
                continue;
            }
            if !shapes.contains(&node.step_shape(j)?) || !visited.contains(&node.step(j)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn count_up_to_permutation(seeds: &[(MutationWord, QuantumSeed)]) -> usize {
    let mut reps: Vec<&QuantumSeed> = Vec::new();
    for (_, s) in seeds {
        if !reps.iter().any(|r| r.equivalent_up_to_permutation(s)) {
            reps.push(s);
        }
    }
    reps.len()
}

/// Explores words of length at most `opts.depth` from `root`.
///
/// Records integrability and sign coherence at every node; verifies the
/// involution, the symmetrizer and `Λ` recovery on every edge. Broken
/// internal invariants (e.g. a failed exact division) are returned as errors.
pub fn explore_seeds(root: &QuantumSeed, opts: &ExploreOptions) -> Result<Exploration, ExploreError> {
    let ctx = Context { d: root.d().clone(), classical: opts.classical };
    let out = bfs(root.clone(), opts, &ctx)?;
    let all_integrable = !out.counterexamples.iter().any(|c| c.violation == Violation::NotIntegrable);
    let all_sign_coherent = !out.counterexamples.iter().any(|c| c.violation == Violation::NotSignCoherent);
    let report = ExplorationReport {
        mode: ExploreMode::Seed,
        root_digest: seed_digest(root),
        depth: opts.depth,
        budget: opts.budget,
        nodes_visited: out.nodes_visited,
        distinct_seeds: out.seeds.len(),
        distinct_up_to_permutation: opts.up_to_permutation.then(|| count_up_to_permutation(&out.seeds)),
        all_integrable: Some(all_integrable),
        all_sign_coherent,
        closed: out.closed,
        complete: out.complete,
        counterexamples: out.counterexamples,
        edge_checks: out.checks,
    };
    Ok(Exploration { report, seeds: out.seeds })
}

/// [`explore_seeds`] without the seed list.
pub fn explore(root: &QuantumSeed, opts: &ExploreOptions) -> Result<ExplorationReport, ExploreError> {
    explore_seeds(root, opts).map(|e| e.report)
}

/// Matrix-only exploration: sign coherence at every node, involution and the
/// root symmetrizer on every edge.
pub fn check_total_sign_coherence(b: &IntMatrix, opts: &ExploreOptions) -> Result<ExplorationReport, ExploreError> {
    if b.rows() < b.cols() {
        return Err(MatrixError::DimensionMismatch(format!("B is {}x{}, need m >= n", b.rows(), b.cols())).into());
    }
    let d = skew_symmetrizer(&b.block(0, b.cols(), 0, b.cols())).ok_or(ExploreError::NotSkewSymmetrizable)?;
    let ctx = Context { d, classical: false };
    let out = bfs(b.clone(), opts, &ctx)?;
    Ok(ExplorationReport {
        mode: ExploreMode::Matrix,
        root_digest: matrix_digest(b),
        depth: opts.depth,
        budget: opts.budget,
        nodes_visited: out.nodes_visited,
        distinct_seeds: out.seeds.len(),
        distinct_up_to_permutation: None,
        all_integrable: None,
        all_sign_coherent: out.counterexamples.is_empty(),
        closed: out.closed,
        complete: out.complete,
        counterexamples: out.counterexamples,
        edge_checks: out.checks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Periodicity {
    pub returns_to_start: bool,
    pub up_to_permutation: bool,
    /// `σ` with `end.vars[i] == start.vars[σ[i]]`, 0-based.
    pub permutation: Option<Vec<usize>>,
}

/// Applies `word` and compares the result with `seed`.
pub fn periodicity_scan(seed: &QuantumSeed, word: &MutationWord) -> Result<Periodicity, SeedError> {
    word.check_range(seed.n())?;
    let end = seed.mutate_word(word.letters())?;
    let permutation = seed.permutation_to(&end);
    Ok(Periodicity { returns_to_start: end == *seed, up_to_permutation: permutation.is_some(), permutation })
}

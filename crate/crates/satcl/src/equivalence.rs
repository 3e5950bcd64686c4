//! Equivalence cells over a finite family of satisfaction regions, and
//! memory checks built on them.
//!
//! Two parameters are interchangeable when they sit inside exactly the
//! same regions of the family; a *cell* is a maximal set with one fixed
//! membership pattern (its sign vector), realized here by an explicit
//! witness point. Cells with distinct signs are disjoint by construction
//! and partition the union of the regions up to region boundaries, where
//! the exact [`sign_of`] remains the ground truth.
//!
//! Enumeration decides each candidate sign vector by LP: the In-side
//! constraints are conjoined directly, and each Out region contributes a
//! disjunction over its halfspaces (at least one must be violated),
//! explored as a depth-first branch with one violated halfspace per Out
//! region. Strictness is encoded by an exact slack of `2^-20` on the
//! violated constraint, so every returned witness has exactly the claimed
//! sign. Candidate sign vectors are independent pure LPs, so with the
//! `parallel` feature they are evaluated on a rayon pool; results are
//! canonicalized by sign-vector sort either way.
//!
//! The two memory checks close the loop: [`oracle_set_check`] compares a
//! reconstructed oracle set against the true intersection on probe
//! regions, and [`perfect_memory_check`] runs an algorithm over a stream
//! and verifies storage efficiency, information efficiency, and coverage
//! of every surviving cell.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algorithms::reconstruct_oracle_set;
use crate::cl::{ClAlgorithm, ClState};
use crate::criteria::{sat_region, Criterion, EmpiricalTask};
use crate::error::{Error, Result};
use crate::geometry::{
    ball_feasible, default_ball_tol, lp_feasible, ConvexRegion, Feasibility, Halfspace,
};
use crate::rat::{pow2_inv, rat, Rat, RatVec};

/// Enumeration caps: `2^q` candidate signs with LP branching stays at
/// desk scale below these.
pub const MAX_REGIONS: usize = 12;
pub const MAX_TOTAL_CONSTRAINTS: usize = 24;

/// Slack used to encode strict exteriors: a violated halfspace
/// `a.x <= b` becomes `a.x >= b + 2^-20`. Constructions that place all
/// constraint data on the `2^-10` grid make violations multiples of
/// `2^-20`, so grid points outside a region clear this slack exactly.
pub fn exterior_slack() -> Rat {
    pow2_inv(20)
}

/// A finite family of regions sharing one dimension.
#[derive(Debug, Clone)]
pub struct Arrangement {
    regions: Vec<ConvexRegion>,
    dim: usize,
}

impl Arrangement {
    pub fn new(regions: Vec<ConvexRegion>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidInput("arrangement needs regions".into()));
        }
        let dim = regions[0].dim();
        for r in &regions {
            r.validate()?;
            if r.dim() != dim {
                return Err(Error::InvalidInput(
                    "arrangement regions have mixed dimensions".into(),
                ));
            }
        }
        Ok(Arrangement { regions, dim })
    }

    pub fn regions(&self) -> &[ConvexRegion] {
        &self.regions
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> usize {
        self.regions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemberBit {
    In,
    Out,
}

/// Membership pattern of a point across the arrangement's regions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(Vec<MemberBit>);

impl SignVector {
    pub fn new(bits: Vec<MemberBit>) -> Self {
        SignVector(bits)
    }

    pub fn bits(&self) -> &[MemberBit] {
        &self.0
    }

    pub fn is_in(&self, i: usize) -> bool {
        self.0[i] == MemberBit::In
    }

    pub fn in_count(&self) -> usize {
        self.0.iter().filter(|&&b| b == MemberBit::In).count()
    }
}

/// Bitstring form: `1` for In, `0` for Out.
impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", if *b == MemberBit::In { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// One equivalence cell: a realized sign vector with a witness whose
/// exact membership pattern equals it. Always has at least one In bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub sign: SignVector,
    pub witness: RatVec,
}

/// The exact membership pattern of a point.
pub fn sign_of(theta: &RatVec, arr: &Arrangement) -> Result<SignVector> {
    let bits: Result<Vec<MemberBit>> = arr
        .regions
        .iter()
        .map(|r| {
            Ok(if r.contains(theta)? {
                MemberBit::In
            } else {
                MemberBit::Out
            })
        })
        .collect();
    Ok(SignVector(bits?))
}

/// The literal equivalence-set operator: the intersection of all regions
/// containing `theta` (the whole space when none does). This can strictly
/// contain the sign-vector cell of `theta` whenever the intersection
/// reaches into regions `theta` is not in; both operators are exposed so
/// tests can compare them on instances where they must agree.
pub fn equivalence_set_of(theta: &RatVec, arr: &Arrangement) -> Result<ConvexRegion> {
    let mut result = ConvexRegion::whole(arr.dim);
    for r in &arr.regions {
        if r.contains(theta)? {
            result = result.intersect(r)?;
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumStats {
    pub lp_calls: u64,
}

fn validate_for_enumeration(arr: &Arrangement) -> Result<()> {
    if arr.q() > MAX_REGIONS {
        return Err(Error::InstanceTooLarge(format!(
            "{} regions exceeds the cap of {MAX_REGIONS}",
            arr.q()
        )));
    }
    let total: usize = arr.regions.iter().map(|r| r.constraint_count()).sum();
    if total > MAX_TOTAL_CONSTRAINTS {
        return Err(Error::InstanceTooLarge(format!(
            "{total} constraints exceeds the cap of {MAX_TOTAL_CONSTRAINTS}"
        )));
    }
    for r in &arr.regions {
        if !r.balls().is_empty() {
            return Err(Error::InvalidInput(
                "exact cell enumeration needs polytope regions".into(),
            ));
        }
    }
    Ok(())
}

/// `a.x >= b + slack` as a halfspace.
fn strict_exterior(h: &Halfspace) -> Halfspace {
    Halfspace::new(h.normal.neg(), -&h.offset - exterior_slack())
}

/// Depth-first search over one violated halfspace per remaining Out
/// region. Runs one LP per visited node and prunes infeasible subtrees.
fn dfs_out_regions(
    dim: usize,
    constraints: &mut Vec<Halfspace>,
    outs: &[&ConvexRegion],
    calls: &mut u64,
) -> Option<RatVec> {
    *calls += 1;
    let region = ConvexRegion::from_halfspaces(dim, constraints.clone());
    match lp_feasible(&region).expect("constraints were validated") {
        Feasibility::Empty => None,
        Feasibility::Feasible(w) => match outs.split_first() {
            None => Some(w),
            Some((first, rest)) => {
                for h in first.halfspaces() {
                    constraints.push(strict_exterior(h));
                    let found = dfs_out_regions(dim, constraints, rest, calls);
                    constraints.pop();
                    if found.is_some() {
                        return found;
                    }
                }
                None
            }
        },
        Feasibility::Unknown => unreachable!("polytope feasibility is decided"),
    }
}

/// Decides one candidate sign vector (bit i of `mask` set = region i In).
fn explore_mask(arr: &Arrangement, mask: usize) -> (Option<Cell>, u64) {
    let mut bits = Vec::with_capacity(arr.q());
    let mut constraints: Vec<Halfspace> = Vec::new();
    let mut outs: Vec<&ConvexRegion> = Vec::new();
    for (i, r) in arr.regions.iter().enumerate() {
        if mask & (1 << i) != 0 {
            bits.push(MemberBit::In);
            if r.is_empty_tag() {
                return (None, 0); // nothing is inside an empty region
            }
            constraints.extend(r.halfspaces().iter().cloned());
        } else {
            bits.push(MemberBit::Out);
            if r.is_whole() {
                return (None, 0); // nothing is outside the whole space
            }
            if !r.is_empty_tag() {
                outs.push(r);
            }
        }
    }
    let mut calls = 0;
    let witness = dfs_out_regions(arr.dim, &mut constraints, &outs, &mut calls);
    let cell = witness.map(|w| {
        let sign = SignVector(bits);
        debug_assert_eq!(sign_of(&w, arr).unwrap(), sign);
        Cell { sign, witness: w }
    });
    (cell, calls)
}

fn assemble(results: Vec<(Option<Cell>, u64)>) -> (Vec<Cell>, EnumStats) {
    let lp_calls = results.iter().map(|(_, c)| c).sum();
    let mut cells: Vec<Cell> = results.into_iter().filter_map(|(c, _)| c).collect();
    cells.sort_by(|a, b| a.sign.cmp(&b.sign));
    (cells, EnumStats { lp_calls })
}

/// All nonempty cells of the arrangement, with the LP-call count.
/// Sequential regardless of features; used for clean timing.
pub fn enumerate_cells_sequential(arr: &Arrangement) -> Result<(Vec<Cell>, EnumStats)> {
    validate_for_enumeration(arr)?;
    let results: Vec<(Option<Cell>, u64)> = (1..(1usize << arr.q()))
        .map(|mask| explore_mask(arr, mask))
        .collect();
    Ok(assemble(results))
}

/// All nonempty cells of the arrangement, with the LP-call count.
/// Candidate signs run on the rayon pool under the `parallel` feature;
/// the result (cells and call count) is identical either way.
pub fn enumerate_cells_with_stats(arr: &Arrangement) -> Result<(Vec<Cell>, EnumStats)> {
    validate_for_enumeration(arr)?;
    #[cfg(feature = "parallel")]
    let results: Vec<(Option<Cell>, u64)> = (1..(1usize << arr.q()))
        .into_par_iter()
        .map(|mask| explore_mask(arr, mask))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Option<Cell>, u64)> = (1..(1usize << arr.q()))
        .map(|mask| explore_mask(arr, mask))
        .collect();
    Ok(assemble(results))
}

pub fn enumerate_cells(arr: &Arrangement) -> Result<Vec<Cell>> {
    enumerate_cells_with_stats(arr).map(|(cells, _)| cells)
}

/// Combinatorial upper bound on the LP calls [`enumerate_cells`] can
/// make: for each candidate sign, one call at the root plus one per node
/// of the full branching tree over its Out regions (prefix products of
/// their halfspace counts). Mirrors the search exactly: signs that die
/// before the first LP (an empty In region, a whole Out region)
/// contribute nothing, and empty Out regions do not branch.
pub fn lp_call_budget(arr: &Arrangement) -> u64 {
    let q = arr.q();
    let mut budget = 0u64;
    for mask in 1..(1usize << q) {
        let mut nodes = 1u64;
        let mut prefix = 1u64;
        let mut dead = false;
        for (i, r) in arr.regions.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if r.is_empty_tag() {
                    dead = true;
                    break;
                }
            } else {
                if r.is_whole() {
                    dead = true;
                    break;
                }
                if r.is_empty_tag() {
                    continue; // skipped by the search, no branch
                }
                prefix = prefix.saturating_mul(r.halfspaces().len() as u64);
                nodes = nodes.saturating_add(prefix);
            }
        }
        if !dead {
            budget = budget.saturating_add(nodes);
        }
    }
    budget
}

/// One witness per cell of a minimal cover: the enumeration witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalRepresentation {
    pub witnesses: Vec<RatVec>,
}

pub fn minimal_representation(cells: &[Cell]) -> MinimalRepresentation {
    MinimalRepresentation {
        witnesses: cells.iter().map(|c| c.witness.clone()).collect(),
    }
}

/// Emptiness status of an intersection query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetStatus {
    Empty,
    NonEmpty,
    /// Only possible when ball constraints are involved.
    Undecided,
}

fn intersection_status(region: &ConvexRegion, probe: &ConvexRegion) -> Result<SetStatus> {
    if let Some(point) = region.as_point() {
        return Ok(if probe.contains(point)? {
            SetStatus::NonEmpty
        } else {
            SetStatus::Empty
        });
    }
    let joint = region.intersect(probe)?;
    let feasibility = if joint.balls().is_empty() {
        lp_feasible(&joint)?
    } else {
        ball_feasible(&joint, &default_ball_tol(), 2000)?
    };
    Ok(match feasibility {
        Feasibility::Feasible(_) => SetStatus::NonEmpty,
        Feasibility::Empty => SetStatus::Empty,
        Feasibility::Unknown => SetStatus::Undecided,
    })
}

#[derive(Debug, Clone)]
pub struct OracleMismatch {
    pub probe_index: usize,
    pub oracle_side: SetStatus,
    pub truth_side: SetStatus,
}

#[derive(Debug, Clone)]
pub struct OracleCheckReport {
    pub checked: usize,
    pub agreements: usize,
    pub first_mismatch: Option<OracleMismatch>,
}

impl OracleCheckReport {
    pub fn all_agree(&self) -> bool {
        self.agreements == self.checked
    }
}

/// Compares the emptiness pattern of the reconstructed oracle set against
/// the true intersection over a list of probe regions. A perfect oracle
/// set agrees on every probe; the report carries the first disagreement.
pub fn oracle_set_check(
    state: &ClState,
    criterion: &Criterion,
    dim: usize,
    probes: &[ConvexRegion],
    truth_region: &ConvexRegion,
) -> Result<OracleCheckReport> {
    let oracle = reconstruct_oracle_set(state, criterion, dim)?;
    let mut agreements = 0;
    let mut first_mismatch = None;
    for (i, probe) in probes.iter().enumerate() {
        let oracle_side = intersection_status(&oracle, probe)?;
        let truth_side = intersection_status(truth_region, probe)?;
        let agree = matches!(
            (oracle_side, truth_side),
            (SetStatus::Empty, SetStatus::Empty) | (SetStatus::NonEmpty, SetStatus::NonEmpty)
        );
        if agree {
            agreements += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(OracleMismatch {
                probe_index: i,
                oracle_side,
                truth_side,
            });
        }
    }
    Ok(OracleCheckReport {
        checked: probes.len(),
        agreements,
        first_mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolatedCondition {
    /// (a) The oracle set leaks outside the true intersection.
    StorageEfficiency,
    /// (b) The oracle set grew between tasks.
    InformationEfficiency,
    /// (c) A surviving cell has no representative in the oracle set.
    CellCoverage,
}

impl fmt::Display for ViolatedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolatedCondition::StorageEfficiency => "storage-efficiency",
            ViolatedCondition::InformationEfficiency => "information-efficiency",
            ViolatedCondition::CellCoverage => "cell-coverage",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    PerfectMemory,
    Violation {
        t: usize,
        condition: ViolatedCondition,
        witness: RatVec,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PerfectMemory => write!(f, "PerfectMemory"),
            Verdict::Violation {
                t,
                condition,
                witness,
            } => write!(
                f,
                "Violation(t={t}, condition={condition}, witness={witness})"
            ),
        }
    }
}

const PROBE_SEED: u64 = 0x5a7c1;

/// Deterministic probe points: `probe_budget` draws from the `2^-10` grid
/// on `[-4, 4]^dim` under a fixed seed.
fn probe_points(dim: usize, probe_budget: usize) -> Vec<RatVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    (0..probe_budget)
        .map(|_| {
            RatVec::new(
                (0..dim)
                    .map(|_| rat(rng.gen_range(-4 * 1024..=4 * 1024), 1024))
                    .collect(),
            )
        })
        .collect()
}

/// Runs the algorithm over the stream and checks, after every task:
/// (a) the reconstructed oracle set stays inside the true intersection
/// (probe membership), (b) it never grows (probe membership), and (c) it
/// covers every cell whose sign is In on all tasks seen so far, via the
/// minimal representation's witnesses or, for point oracle sets, by the
/// point's own sign. Probes are the seeded grid sample plus all cell
/// witnesses.
pub fn perfect_memory_check(
    alg: &dyn ClAlgorithm,
    stream: &[EmpiricalTask],
    c: &Criterion,
    probe_budget: usize,
) -> Result<Verdict> {
    if stream.is_empty() {
        return Err(Error::InvalidInput("empty task stream".into()));
    }
    let dim = c.hypothesis_dim(&stream[0]);
    let regions: Result<Vec<ConvexRegion>> = stream.iter().map(|t| sat_region(c, t)).collect();
    let regions = regions?;
    let arr = Arrangement::new(regions.clone())?;
    let cells = enumerate_cells(&arr)?;

    let mut probes = probe_points(dim, probe_budget);
    probes.extend(cells.iter().map(|cell| cell.witness.clone()));

    let mut state = alg.init(dim);
    let mut previous_oracle = reconstruct_oracle_set(&state, c, dim)?;
    let mut truth = ConvexRegion::whole(dim);
    for (idx, task) in stream.iter().enumerate() {
        let t = idx + 1;
        state = match alg.step(&state, task, c) {
            Ok(next) => next,
            // An empty (or undecidable) intersection ends the run; the
            // verdict covers the completed prefix.
            Err(_) => break,
        };
        truth = truth.intersect(&regions[idx])?;
        let oracle = reconstruct_oracle_set(&state, c, dim)?;

        for p in &probes {
            if oracle.contains(p)? && !truth.contains(p)? {
                return Ok(Verdict::Violation {
                    t,
                    condition: ViolatedCondition::StorageEfficiency,
                    witness: p.clone(),
                });
            }
        }
        for p in &probes {
            if oracle.contains(p)? && !previous_oracle.contains(p)? {
                return Ok(Verdict::Violation {
                    t,
                    condition: ViolatedCondition::InformationEfficiency,
                    witness: p.clone(),
                });
            }
        }
        for cell in &cells {
            let survives = cell.sign.bits()[..t].iter().all(|&b| b == MemberBit::In);
            if !survives {
                continue;
            }
            let covered = if oracle.contains(&cell.witness)? {
                true
            } else if let Some(point) = oracle.as_point() {
                sign_of(point, &arr)? == cell.sign
            } else {
                false
            };
            if !covered {
                return Ok(Verdict::Violation {
                    t,
                    condition: ViolatedCondition::CellCoverage,
                    witness: cell.witness.clone(),
                });
            }
        }
        previous_oracle = oracle;
    }
    Ok(Verdict::PerfectMemory)
}

//! Iterated polynomial partitioning by sign conditions.
//!
//! Each stage bisects every current cell at once with one polynomial found by
//! a ham-sandwich cut in Veronese space. Cells are the sets of points with a
//! fixed strict sign vector over the stage polynomials; points on any stage
//! polynomial leave for the residue and take no further part.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hamsandwich::lift_and_bisect;
use crate::linalg::Echelon;
use crate::poly::{Point, PointSet, Polynomial, Sign};
use crate::rational::Rational;
use crate::schedule::{schedule_for_codim, schedule_full_space, Regime, ScheduleEntry};
use crate::variety::VarietySpec;
use crate::veronese::{hilbert_from_points, homogeneous_lift, lifted_capacity, VeroneseBasis};

/// Strict signs (`-1` or `+1`) of a point under each stage polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(pattern: Vec<i8>) -> Self {
        debug_assert!(pattern.iter().all(|s| *s == 1 || *s == -1));
        SignVector(pattern)
    }

    pub fn pattern(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, k: usize) -> SignVector {
        SignVector(self.0[..k].to_vec())
    }

    fn extended(&self, s: i8) -> SignVector {
        let mut v = self.0.clone();
        v.push(s);
        SignVector(v)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Splits `points` by strict sign vectors over `polys`; points where some
/// polynomial vanishes go to the residue.
pub fn classify(
    points: &PointSet,
    polys: &[Polynomial],
) -> Result<(BTreeMap<SignVector, PointSet>, PointSet)> {
    let d = points.dim();
    let mut cells: BTreeMap<SignVector, PointSet> = BTreeMap::new();
    let mut residue = PointSet::empty(d);
    'points: for p in points {
        let mut pattern = Vec::with_capacity(polys.len());
        for g in polys {
            match g.sign_at(p)? {
                Sign::Zero => {
                    residue.push(p.clone())?;
                    continue 'points;
                }
                s => pattern.push(s.as_i8()),
            }
        }
        cells
            .entry(SignVector(pattern))
            .or_insert_with(|| PointSet::empty(d))
            .push(p.clone())?;
    }
    Ok((cells, residue))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// Every current cell was bisected.
    Bisection,
    /// A polynomial vanishing on all remaining points was used instead.
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: u32,
    /// Degree allowed by the schedule.
    pub scheduled_degree: u32,
    pub regime: Regime,
    pub kind: StageKind,
    /// Number of nonempty cells the stage had to handle.
    pub sets: usize,
    /// Affine dimension of the lifted remaining points at the stage degree.
    pub capacity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionResult {
    pub dim: usize,
    pub input_size: usize,
    /// Degree budget `ℓ`.
    pub budget: u64,
    pub polynomials: Vec<Polynomial>,
    pub stages: Vec<StageRecord>,
    pub cells: BTreeMap<SignVector, PointSet>,
    pub residue: PointSet,
    /// Schedule stages that were not run because capacity ran out.
    pub truncated: usize,
}

impl PartitionResult {
    fn start(points: &PointSet, budget: u64) -> Self {
        let mut cells = BTreeMap::new();
        if !points.is_empty() {
            cells.insert(SignVector(Vec::new()), points.clone());
        }
        PartitionResult {
            dim: points.dim(),
            input_size: points.len(),
            budget,
            polynomials: Vec::new(),
            stages: Vec::new(),
            cells,
            residue: PointSet::empty(points.dim()),
            truncated: 0,
        }
    }

    /// Number of stage polynomials.
    pub fn stage_count(&self) -> usize {
        self.polynomials.len()
    }

    /// Sum of the stage polynomial degrees, i.e. the degree of their product.
    pub fn product_degree(&self) -> u64 {
        self.polynomials
            .iter()
            .filter_map(Polynomial::degree)
            .map(u64::from)
            .sum()
    }

    pub fn product(&self) -> Result<Polynomial> {
        crate::poly::product(self.dim, &self.polynomials)
    }

    pub fn max_cell(&self) -> usize {
        self.cells.values().map(PointSet::len).max().unwrap_or(0)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// `⌈m / 2^t⌉` for the realized number of stages `t`.
    pub fn balance_bound(&self) -> usize {
        let t = self.stage_count().min(63) as u32;
        let m = self.input_size as u128;
        let q = 1u128 << t;
        m.div_ceil(q) as usize
    }

    pub fn balance_ok(&self) -> bool {
        self.max_cell() <= self.balance_bound()
    }

    pub fn degree_ok(&self) -> bool {
        self.product_degree() <= self.budget
    }

    pub fn conservation_ok(&self) -> bool {
        self.residue.len() + self.cells.values().map(PointSet::len).sum::<usize>() == self.input_size
    }

    pub fn kernel_fallback(&self) -> bool {
        self.stages.iter().any(|s| s.kind == StageKind::Kernel)
    }

    fn all_remaining(&self) -> Vec<&Point> {
        self.cells.values().flat_map(|c| c.iter()).collect()
    }

    fn apply(&mut self, g: Polynomial) -> Result<()> {
        let d = self.dim;
        let mut next = BTreeMap::new();
        for (pattern, cell) in std::mem::take(&mut self.cells) {
            for p in &cell {
                let s = match g.sign_at(p)? {
                    Sign::Zero => {
                        self.residue.push(p.clone())?;
                        continue;
                    }
                    s => s.as_i8(),
                };
                next.entry(pattern.extended(s))
                    .or_insert_with(|| PointSet::empty(d))
                    .push(p.clone())?;
            }
        }
        self.cells = next;
        self.polynomials.push(g);
        Ok(())
    }
}

fn stage_seed(seed: u64, stage: u32) -> u64 {
    seed ^ (u64::from(stage) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Partition of `points` in `R^d` by a product of stage polynomials of total
/// degree at most `budget`.
pub fn partition(points: &PointSet, budget: u32, seed: u64) -> Result<PartitionResult> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if budget < 1 {
        return Err(Error::precondition("degree budget must be at least 1"));
    }
    let schedule = schedule_full_space(points.dim(), budget);
    let mut result = PartitionResult::start(points, budget as u64);
    for entry in &schedule {
        if result.cells.is_empty() {
            break;
        }
        if let Err(e) = run_stage(&mut result, entry, seed, None) {
            return Err(abort(entry.stage, e, result));
        }
        if result.kernel_fallback() {
            break;
        }
    }
    Ok(result)
}

fn abort(stage: u32, source: Error, partial: PartitionResult) -> Error {
    Error::PartitionAborted {
        stage: stage as usize,
        source: Box::new(source),
        partial: Box::new(partial),
    }
}

/// One stage: bisect all nonempty cells when the lifted data has room for
/// them, otherwise fall back to a polynomial vanishing on every remaining
/// point. On a variety, `samples` keeps the fallback polynomial off it.
fn run_stage(
    result: &mut PartitionResult,
    entry: &ScheduleEntry,
    seed: u64,
    samples: Option<&PointSet>,
) -> Result<()> {
    let d = result.dim;
    let sets: Vec<PointSet> = result.cells.values().cloned().collect();
    let remaining = result.all_remaining();
    let capacity = lifted_capacity(&remaining, d, entry.degree, sets.len())?;
    let kind = if capacity >= sets.len() {
        let g = lift_and_bisect(&sets, entry.degree, stage_seed(seed, entry.stage))?;
        result.apply(g)?;
        StageKind::Bisection
    } else {
        let g = kernel_polynomial(&remaining, d, entry.degree, samples)?;
        result.apply(g)?;
        StageKind::Kernel
    };
    result.stages.push(StageRecord {
        stage: entry.stage,
        scheduled_degree: entry.degree,
        regime: entry.regime,
        kind,
        sets: sets.len(),
        capacity,
    });
    Ok(())
}

/// Nonzero polynomial of degree at most `degree` vanishing on every point of
/// `points`. With `avoid`, it is also required not to vanish on all of those
/// points.
pub fn kernel_polynomial(
    points: &[&Point],
    dim: usize,
    degree: u32,
    avoid: Option<&PointSet>,
) -> Result<Polynomial> {
    let basis = VeroneseBasis::new(dim, degree);
    let mut e = Echelon::new(basis.len() + 1);
    for p in points {
        e.insert(homogeneous_lift(&basis, p));
        if e.is_full() {
            break;
        }
    }
    for free in e.free_columns() {
        let g = vector_to_polynomial(&basis, &e.null_vector(free))?;
        let keeps_off = match avoid {
            None => true,
            Some(s) => s.iter().map(|p| g.sign_at(p)).any(|r| !matches!(r, Ok(Sign::Zero))),
        };
        if keeps_off && !g.is_zero() {
            return Ok(g);
        }
    }
    Err(Error::precondition(format!(
        "no polynomial of degree {degree} vanishes on the points without vanishing on the variety"
    )))
}

pub(crate) fn vector_to_polynomial(basis: &VeroneseBasis, v: &[BigInt]) -> Result<Polynomial> {
    let dim = basis.dim();
    let mut terms = vec![(vec![0u32; dim], Rational::from_integer(v[0].clone()))];
    for (m, c) in basis.monomials().iter().zip(&v[1..]) {
        if !c.is_zero() {
            terms.push((m.exponents().to_vec(), Rational::from_integer(c.clone())));
        }
    }
    Polynomial::from_terms(dim, terms)
}

/// Options for partitioning on a variety.
#[derive(Clone, Debug, PartialEq)]
pub struct VarietyOptions {
    /// The constant `c1 ∈ (0, 2^-d]` of the schedule.
    pub c1: Rational,
    pub seed: u64,
}

impl VarietyOptions {
    pub fn new(dim: usize, seed: u64) -> Self {
        VarietyOptions {
            c1: Rational::new(BigInt::from(1), BigInt::from(1) << dim),
            seed,
        }
    }
}

/// Partition of points lying on `variety` with total degree at most `budget`.
///
/// Before each stage, the Hilbert function of the remaining points is
/// compared with that of the variety. A deficit means some polynomial of the
/// stage degree vanishes on the points but not on the variety; that polynomial
/// is returned as the last stage and every point goes to the residue.
/// Otherwise all cells are bisected while the lifted capacity allows it, and
/// the schedule is cut short when it does not.
pub fn partition_on_variety(
    points: &PointSet,
    variety: &VarietySpec,
    budget: u64,
    options: &VarietyOptions,
) -> Result<PartitionResult> {
    let d = variety.ambient();
    crate::error::check_dim(d, points.dim())?;
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    for (i, p) in points.iter().enumerate() {
        if !variety.contains(p)? {
            return Err(Error::precondition(format!(
                "point {} does not lie on the variety",
                i + 1
            )));
        }
    }
    let inv = &variety.invariants;
    let schedule = schedule_for_codim(
        d as u32,
        variety.codim(),
        inv.delta1,
        inv.delta2,
        budget,
        &options.c1,
    )?;
    let mut entries = schedule.entries.clone();
    if entries.is_empty() {
        entries.push(ScheduleEntry {
            stage: 0,
            target: 1,
            degree: 1,
            regime: Regime::Full,
            clamped: true,
        });
    }
    let mut rng_seed = options.seed;
    let mut result = PartitionResult::start(points, budget);
    for (k, entry) in entries.iter().enumerate() {
        if result.cells.is_empty() {
            break;
        }
        rng_seed = stage_seed(rng_seed, entry.stage);
        let staged = (|| -> Result<bool> {
            let remaining = PointSet::new(d, result.all_remaining().into_iter().cloned().collect())?;
            let on_points = hilbert_from_points(&remaining, entry.degree)?;
            let on_variety = variety.hilbert(entry.degree, rng_seed)?;
            if on_points.value < on_variety.value {
                let samples = variety.sample(on_variety.rank_source, &mut rand_from(rng_seed))?;
                let refs: Vec<&Point> = remaining.iter().collect();
                let g = kernel_polynomial(&refs, d, entry.degree, Some(&samples))?;
                let sets = result.cells.len();
                result.apply(g)?;
                result.stages.push(StageRecord {
                    stage: entry.stage,
                    scheduled_degree: entry.degree,
                    regime: entry.regime,
                    kind: StageKind::Kernel,
                    sets,
                    capacity: on_points.capacity(),
                });
                return Ok(false);
            }
            if on_points.capacity() < result.cells.len() {
                return Ok(false);
            }
            run_stage(&mut result, entry, options.seed, None)?;
            Ok(true)
        })();
        match staged {
            Ok(true) => {}
            Ok(false) => {
                if !result.kernel_fallback() {
                    result.truncated = entries.len() - k;
                }
                break;
            }
            Err(e) => return Err(abort(entry.stage, e, result)),
        }
    }
    Ok(result)
}

fn rand_from(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::variety::coordinate_subspace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(d: usize, m: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..m)
            .map(|_| Point::new((0..d).map(|_| frac(rng.gen_range(-1000..=1000), 97)).collect()))
            .collect();
        PointSet::new(d, pts).unwrap()
    }

    fn check_contracts(r: &PartitionResult) {
        assert!(r.conservation_ok());
        assert!(r.degree_ok());
        assert!(r.balance_ok(), "max cell {} > {}", r.max_cell(), r.balance_bound());
        assert!(r.cells.values().all(|c| !c.is_empty()));
        assert!(r.cells.keys().all(|k| k.len() == r.stage_count()));
    }

    #[test]
    fn classify_examples() {
        let polys = vec![
            Polynomial::parse("1 1 0\n-1/2 0 0", Some(2)).unwrap(),
            Polynomial::parse("1 0 1\n-3 0 0", Some(2)).unwrap(),
        ];
        let ps = PointSet::new(2, vec![Point::from_ints(&[1, 2])]).unwrap();
        let (cells, residue) = classify(&ps, &polys).unwrap();
        assert_eq!(cells.keys().next().unwrap().pattern(), &[1, -1]);
        assert!(residue.is_empty());

        let on = PointSet::new(2, vec![Point::new(vec![frac(1, 2), int(7)])]).unwrap();
        let (cells, residue) = classify(&on, &polys).unwrap();
        assert!(cells.is_empty());
        assert_eq!(residue.len(), 1);

        let many = random_points(2, 9, 1);
        let (cells, residue) = classify(&many, &[]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells.values().next().unwrap().len(), 9);
        assert!(residue.is_empty());
    }

    #[test]
    fn two_points_one_line() {
        let ps = PointSet::new(2, vec![Point::from_ints(&[0, 0]), Point::from_ints(&[1, 0])]).unwrap();
        let r = partition(&ps, 1, 0).unwrap();
        assert_eq!(r.stage_count(), 1);
        check_contracts(&r);
        assert!(r.max_cell() <= 1);
    }

    #[test]
    fn sixteen_points_three_stages() {
        let ps = random_points(2, 16, 5);
        let r = partition(&ps, 4, 7).unwrap();
        assert_eq!(r.stage_count(), 3);
        check_contracts(&r);
        assert!(r.max_cell() <= 2);
    }

    #[test]
    fn repeated_point_goes_to_residue() {
        let ps = PointSet::new(2, vec![Point::from_ints(&[3, 4]); 6]).unwrap();
        let r = partition(&ps, 3, 0).unwrap();
        check_contracts(&r);
        assert_eq!(r.residue.len(), 6);
        assert!(r.kernel_fallback());
    }

    #[test]
    fn later_cells_refine_earlier_ones() {
        let ps = random_points(2, 60, 11);
        let r = partition(&ps, 6, 3).unwrap();
        check_contracts(&r);
        for k in 0..r.stage_count() {
            let (coarse, _) = classify(&ps, &r.polynomials[..k]).unwrap();
            let (fine, _) = classify(&ps, &r.polynomials[..k + 1]).unwrap();
            for (pattern, cell) in &fine {
                let parent = &coarse[&pattern.prefix(k)];
                assert!(cell.iter().all(|p| parent.points().contains(p)));
            }
        }
    }

    #[test]
    fn kernel_fallback_on_collinear_points_in_a_plane() {
        let x = coordinate_subspace(4, 2).unwrap();
        let pts: Vec<Point> = (0..5).map(|i| Point::from_ints(&[i, 2 * i + 1, 0, 0])).collect();
        let ps = PointSet::new(4, pts).unwrap();
        let r = partition_on_variety(&ps, &x, 24, &VarietyOptions::new(4, 0)).unwrap();
        assert!(r.kernel_fallback());
        assert_eq!(r.residue.len(), 5);
        let g = r.polynomials.last().unwrap();
        assert!(!g.is_zero());
        for p in &ps {
            assert!(g.evaluate(p).unwrap().is_zero());
        }
        check_contracts(&r);
    }

    #[test]
    fn rejects_points_off_the_variety() {
        let x = coordinate_subspace(4, 2).unwrap();
        let ps = PointSet::new(4, vec![Point::from_ints(&[1, 1, 1, 0])]).unwrap();
        assert!(matches!(
            partition_on_variety(&ps, &x, 24, &VarietyOptions::new(4, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_point_on_variety() {
        let x = coordinate_subspace(4, 2).unwrap();
        let ps = PointSet::new(4, vec![Point::from_ints(&[1, 2, 0, 0])]).unwrap();
        let r = partition_on_variety(&ps, &x, 24, &VarietyOptions::new(4, 0)).unwrap();
        check_contracts(&r);
    }
}

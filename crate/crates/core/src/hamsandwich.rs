//! Simultaneous bisection of finite point sets by one hyperplane.
//!
//! The engine works on homogeneous integer coordinates `(λ, λx)` with `λ > 0`,
//! so the sign of an affine functional is the sign of an integer dot product.
//! When there are fewer sets `r` than coordinates `N`, the data is first
//! pushed through a random integer projection to `R^r`.
//!
//! Search, per restart:
//! 1. smoothed descent: drive `mean tanh(c·x / σ)` to zero for every set while
//!    `σ` is annealed towards its floor;
//! 2. rounding: try the exact hyperplane through the median points of the
//!    descent result;
//! 3. continuation: deform a random linear map vanishing at the descent
//!    result into the median-offset map, which is odd in `c`, and follow the
//!    solution curve on the unit sphere until it reaches the median map.
//!
//! Every candidate is verified with exact arithmetic. A hyperplane through the
//! median of each set is valid as soon as no other point crosses it, so
//! the contract `positive <= ⌊|Q|/2⌋`, `negative <= ⌊|Q|/2⌋` never depends on
//! float tolerances.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, Echelon};
use crate::poly::{Polynomial, PointSet, Sign};
use crate::rational::{clear_denominators, direction_to_f64, ratio_to_f64, remove_content, Rational};
use crate::veronese::{homogeneous_lift, lifted_capacity, VeroneseBasis};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingSchedule {
    pub initial_scale: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Default for SmoothingSchedule {
    fn default() -> Self {
        SmoothingSchedule {
            initial_scale: 0.5,
            decay: 0.6,
            floor: 1e-3,
        }
    }
}

pub const DEFAULT_MAX_ITERATIONS: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct BisectionProblem {
    /// Lifted dimension `N`.
    pub dimension: usize,
    pub sets: Vec<Vec<Vec<Rational>>>,
    pub max_iterations: usize,
    pub seed: u64,
    pub smoothing: SmoothingSchedule,
}

impl BisectionProblem {
    pub fn new(dimension: usize, sets: Vec<Vec<Vec<Rational>>>) -> Self {
        BisectionProblem {
            dimension,
            sets,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
            smoothing: SmoothingSchedule::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.sets.is_empty() {
            return Err(Error::precondition("need at least one set"));
        }
        if self.sets.len() > self.dimension {
            return Err(Error::precondition(format!(
                "{} sets cannot be bisected in dimension {}",
                self.sets.len(),
                self.dimension
            )));
        }
        for (j, s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::precondition(format!("set {j} is empty")));
            }
            for v in s {
                crate::error::check_dim(self.dimension, v.len())?;
            }
        }
        Ok(())
    }

    fn homogeneous_sets(&self) -> Vec<Vec<Vec<BigInt>>> {
        self.sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|v| {
                        let mut row = Vec::with_capacity(v.len() + 1);
                        row.push(Rational::from_integer(1.into()));
                        row.extend(v.iter().cloned());
                        clear_denominators(&row)
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SideCounts {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl SideCounts {
    pub fn total(&self) -> usize {
        self.negative + self.zero + self.positive
    }

    /// Points beyond `⌊n/2⌋` on either open side.
    pub fn excess(&self) -> usize {
        let half = self.total() / 2;
        self.positive.saturating_sub(half) + self.negative.saturating_sub(half)
    }

    pub fn is_bisected(&self) -> bool {
        self.excess() == 0
    }

    fn add(&mut self, s: Sign) {
        match s {
            Sign::Negative => self.negative += 1,
            Sign::Zero => self.zero += 1,
            Sign::Positive => self.positive += 1,
        }
    }
}

/// A hyperplane `c0 + c1 y1 + ... + cN yN = 0` with its per-set side counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    /// Constant term first.
    pub coefficients: Vec<Rational>,
    pub counts: Vec<SideCounts>,
}

impl Cut {
    pub fn is_valid(&self) -> bool {
        self.coefficients.iter().any(|c| !c.is_zero())
            && self.counts.iter().all(SideCounts::is_bisected)
    }

    /// Recounts sides exactly against `problem`.
    pub fn recount(coefficients: &[Rational], problem: &BisectionProblem) -> Vec<SideCounts> {
        let c = clear_denominators(coefficients);
        problem
            .homogeneous_sets()
            .iter()
            .map(|s| counts_for(&c, s))
            .collect()
    }
}

fn counts_for(c: &[BigInt], rows: &[Vec<BigInt>]) -> SideCounts {
    let mut sc = SideCounts::default();
    for r in rows {
        sc.add(sign_of(&dot(c, r)));
    }
    sc
}

fn sign_of(x: &BigInt) -> Sign {
    if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Finds a hyperplane bisecting every set of `problem`.
pub fn bisect(problem: &BisectionProblem) -> Result<Cut> {
    problem.validate()?;
    let rows = problem.homogeneous_sets();
    let hom = bisect_homogeneous(&rows, problem)?;
    let coefficients: Vec<Rational> = hom.into_iter().map(Rational::from_integer).collect();
    let counts = Cut::recount(&coefficients, problem);
    let cut = Cut {
        coefficients,
        counts,
    };
    debug_assert!(cut.is_valid());
    Ok(cut)
}

/// Core search on homogeneous integer rows (first coordinate positive).
/// Returns the integer coefficient vector of a valid cut.
pub(crate) fn bisect_homogeneous(
    sets: &[Vec<Vec<BigInt>>],
    params: &BisectionProblem,
) -> Result<Vec<BigInt>> {
    let n = params.dimension;
    let r = sets.len();
    let all: Vec<&Vec<BigInt>> = sets.iter().flatten().collect();

    if let Some(h) = interpolate(sets, n) {
        return Ok(h);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut projection: Option<Vec<Vec<BigInt>>> = None;
    let mut working: Option<Vec<Vec<Vec<BigInt>>>> = None;
    if r == n {
        if full_rank(all.iter().copied(), n + 1) {
            working = Some(sets.to_vec());
        }
    } else {
        for _ in 0..8 {
            let pi: Vec<Vec<BigInt>> = (0..r)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect())
                .collect();
            let projected: Vec<Vec<Vec<BigInt>>> = sets
                .iter()
                .map(|s| s.iter().map(|row| project(&pi, row)).collect())
                .collect();
            if full_rank(projected.iter().flatten(), r + 1) {
                projection = Some(pi);
                working = Some(projected);
                break;
            }
        }
    }

    let Some(working) = working else {
        // The data spans no more than an r-1 dimensional affine space in every
        // projection we tried; if the full data lies in a hyperplane, that
        // hyperplane is a (degenerate) valid cut.
        let mut e = Echelon::new(n + 1);
        for row in &all {
            e.insert((*row).clone());
        }
        if let Some(&f) = e.free_columns().first() {
            return Ok(e.null_vector(f));
        }
        return Err(Error::SearchExhausted {
            iterations: 0,
            best_imbalance: usize::MAX,
        });
    };

    let engine = Engine::new(&working, params);
    let h = engine.run()?;
    Ok(match projection {
        None => h,
        Some(pi) => {
            let mut full = vec![BigInt::zero(); n + 1];
            full[0] = h[0].clone();
            for (j, hj) in h.iter().enumerate().skip(1) {
                if hj.is_zero() {
                    continue;
                }
                for (k, p) in pi[j - 1].iter().enumerate() {
                    if !p.is_zero() {
                        full[k + 1] += hj * p;
                    }
                }
            }
            remove_content(&mut full);
            full
        }
    })
}

/// When the rows are linearly independent, some functional takes the values
/// `+1, -1, +1, ...` on the points of every set, with `0` on the last point
/// of an odd set.
fn interpolate(sets: &[Vec<Vec<BigInt>>], n: usize) -> Option<Vec<BigInt>> {
    let count: usize = sets.iter().map(Vec::len).sum();
    if count > n + 1 {
        return None;
    }
    let mut augmented = Echelon::new(n + 2);
    let mut plain = Echelon::new(n + 1);
    let mut any_target = false;
    for set in sets {
        for (i, row) in set.iter().enumerate() {
            let target = match (i % 2, i + 1 == set.len()) {
                (0, true) => 0,
                (0, false) => 1,
                _ => -1,
            };
            any_target |= target != 0;
            if !plain.insert(row.clone()) {
                return None;
            }
            let mut aug = row.clone();
            aug.push(BigInt::from(-target));
            augmented.insert(aug);
        }
    }
    let mut h = if any_target {
        let mut v = augmented.null_vector(n + 1);
        let scale = v.pop()?;
        if scale.is_negative() {
            v.iter_mut().for_each(|x| *x = -&*x);
        }
        v
    } else {
        plain.null_vector(*plain.free_columns().first()?)
    };
    if h.iter().all(Zero::is_zero) {
        return None;
    }
    remove_content(&mut h);
    Some(h)
}

fn project(pi: &[Vec<BigInt>], row: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(pi.len() + 1);
    out.push(row[0].clone());
    for p in pi {
        out.push(dot(p, &row[1..]));
    }
    out
}

fn full_rank<'a, I: IntoIterator<Item = &'a Vec<BigInt>>>(rows: I, ncols: usize) -> bool {
    let mut e = Echelon::new(ncols);
    for row in rows {
        e.insert(row.clone());
        if e.is_full() {
            return true;
        }
    }
    false
}

struct Engine<'a> {
    r: usize,
    /// Homogeneous integer rows in working space, grouped by set.
    rows: &'a [Vec<Vec<BigInt>>],
    /// Normalized float coordinates `(1, z)` per point, grouped by set.
    float: Vec<Vec<Vec<f64>>>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    params: &'a BisectionProblem,
}

struct Budget {
    used: usize,
    max: usize,
    best_imbalance: usize,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.max
    }
}

fn same_members(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// Point values and their rates along the tangent.
type Snapshot = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Indices of the middle point, or the two middle points, of `values`.
fn median_of(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    let n = order.len();
    let (below, mid, _) = order.select_nth_unstable_by(n / 2, cmp);
    if n % 2 == 1 {
        vec![mid.1]
    } else {
        let lower = below.iter().max_by(|a, b| cmp(a, b)).map_or(mid.1, |x| x.1);
        vec![lower, mid.1]
    }
}

/// Calls `f(gap, rate)` for every non-member against every member of its set.
fn for_gaps(members: &Members, (values, rates): &Snapshot, mut f: impl FnMut(f64, f64)) {
    for ((mem, v), w) in members.iter().zip(values).zip(rates) {
        for (k, (vk, wk)) in v.iter().zip(w).enumerate() {
            if mem.contains(&k) {
                continue;
            }
            for &m in mem {
                f(vk - v[m], wk - w[m]);
            }
        }
    }
}

/// Whether some gap may have crossed zero more often than its end values
/// show over a step of length `step`.
fn hidden_crossing(members: &Members, here: &Snapshot, there: &Snapshot, step: f64) -> bool {
    for (j, mem) in members.iter().enumerate() {
        let (v0, w0, v1, w1) = (&here.0[j], &here.1[j], &there.0[j], &there.1[j]);
        for k in 0..v0.len() {
            if mem.contains(&k) {
                continue;
            }
            for &m in mem {
                let (f0, f1) = (v0[k] - v0[m], v1[k] - v1[m]);
                let flipped = (f0 > 0.0) != (f1 > 0.0);
                if extra_crossings(f0, (w0[k] - w0[m]) * step, f1, (w1[k] - w1[m]) * step, flipped) {
                    return true;
                }
            }
        }
    }
    false
}

enum StepOutcome {
    Moved(Vec<f64>, Vec<f64>),
    Swapped(Vec<f64>, Vec<f64>, Members),
    Finished(Vec<BigInt>),
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Event {
    /// The median points of a set changed.
    Swap(usize),
    End,
    Start,
}

/// The homotopy on one region where the median points are fixed:
/// `H(c, s) = ((1 - s) M + s A) c` together with `|c| = 1`, on `y = (c, s)`.
struct Piece<'m> {
    start: &'m DMatrix<f64>,
    medians: DMatrix<f64>,
}

impl<'m> Piece<'m> {
    fn new(start: &'m DMatrix<f64>, medians: DMatrix<f64>) -> Self {
        Piece { start, medians }
    }

    /// Residual and Jacobian of the `r + 1` equations, with one spare row
    /// left for an extra constraint.
    fn system(&self, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let r = self.start.nrows();
        let s = y[r + 1];
        let c = DVector::from_column_slice(&y[..=r]);
        let k = self.start * (1.0 - s) + &self.medians * s;
        let hc = &k * &c;
        let ds = (&self.medians - self.start) * &c;
        let mut jac = DMatrix::<f64>::zeros(r + 2, r + 2);
        let mut res = DVector::<f64>::zeros(r + 2);
        jac.view_mut((0, 0), (r, r + 1)).copy_from(&k);
        for j in 0..r {
            jac[(j, r + 1)] = ds[j];
            res[j] = hc[j];
        }
        for col in 0..=r {
            jac[(r, col)] = c[col];
        }
        res[r] = 0.5 * (c.dot(&c) - 1.0);
        (res, jac)
    }

    /// Unit tangent of the solution curve at `y`, oriented along `prev`.
    fn tangent(&self, y: &[f64], prev: &[f64]) -> Option<Vec<f64>> {
        let r = self.start.nrows();
        let (_, mut jac) = self.system(y);
        for (col, v) in prev.iter().enumerate() {
            jac[(r + 1, col)] = *v;
        }
        let mut rhs = DVector::<f64>::zeros(r + 2);
        rhs[r + 1] = 1.0;
        let x = jac.lu().solve(&rhs)?;
        let n = x.norm();
        (n.is_finite() && n > 0.0).then(|| x.iter().map(|v| v / n).collect())
    }

    /// Newton correction of the predictor `base + tau t` back to the curve,
    /// within the hyperplane orthogonal to `t`.
    fn correct(&self, base: &[f64], t: &[f64], tau: f64) -> Option<Vec<f64>> {
        let r = self.start.nrows();
        let mut y: Vec<f64> = base.iter().zip(t).map(|(b, d)| b + tau * d).collect();
        let mut prev = f64::INFINITY;
        for _ in 0..NEWTON_ITERATIONS {
            let (mut res, mut jac) = self.system(&y);
            for (col, v) in t.iter().enumerate() {
                jac[(r + 1, col)] = *v;
            }
            res[r + 1] = eval(t, &y) - eval(t, base) - tau;
            let dy = jac.lu().solve(&(-res))?;
            let n = dy.norm();
            if !n.is_finite() || n > 0.5 * prev.min(1.0) && prev.is_finite() {
                return None;
            }
            y.iter_mut().zip(dy.iter()).for_each(|(a, b)| *a += b);
            if n < 1e-13 {
                return Some(y);
            }
            prev = n;
        }
        (prev < 1e-10).then_some(y)
    }
}

/// Points of a set whose average is the median: the middle point for odd
/// sizes, the two middle points for even sizes.
type Members = Vec<Vec<usize>>;

impl<'a> Engine<'a> {
    fn new(rows: &'a [Vec<Vec<BigInt>>], params: &'a BisectionProblem) -> Self {
        let r = rows.len();
        let raw: Vec<Vec<Vec<f64>>> = rows
            .iter()
            .map(|s| {
                s.iter()
                    .map(|row| row[1..].iter().map(|x| ratio_to_f64(x, &row[0])).collect())
                    .collect()
            })
            .collect();
        let count = raw.iter().map(Vec::len).sum::<usize>() as f64;
        let mut mean = vec![0.0; r];
        for p in raw.iter().flatten() {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += x / count;
            }
        }
        let mut scale = vec![0.0; r];
        for p in raw.iter().flatten() {
            for ((s, x), m) in scale.iter_mut().zip(p).zip(&mean) {
                *s += (x - m) * (x - m) / count;
            }
        }
        for s in scale.iter_mut() {
            *s = if *s > 0.0 && s.is_finite() { s.sqrt() } else { 1.0 };
        }
        let float = raw
            .iter()
            .map(|s| {
                s.iter()
                    .map(|p| {
                        let mut z = Vec::with_capacity(r + 1);
                        z.push(1.0);
                        z.extend(p.iter().zip(&mean).zip(&scale).map(|((x, m), s)| (x - m) / s));
                        z
                    })
                    .collect()
            })
            .collect();
        Engine {
            r,
            rows,
            float,
            mean,
            scale,
            params,
        }
    }

    fn run(&self) -> Result<Vec<BigInt>> {
        let mut budget = Budget {
            used: 0,
            max: self.params.max_iterations.max(1),
            best_imbalance: usize::MAX,
        };
        let mut restart = 0u64;
        while budget.used < budget.max {
            let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
            rng.set_stream(restart + 1);
            let start = self.initial(&mut rng);
            let mut c = self.smoothed_descent(start, &mut budget);
            let n = eval(&c, &c).sqrt();
            c.iter_mut().for_each(|x| *x /= n);
            let members = self.members_at(&c);
            if let Some(h) = self.hyperplane_through(&members, &c) {
                if self.check(&h, &mut budget) {
                    return Ok(h);
                }
            }
            if let Some(h) = self.follow_path(&c, &mut rng, &mut budget) {
                return Ok(h);
            }
            restart += 1;
        }
        Err(Error::SearchExhausted {
            iterations: budget.used.min(budget.max),
            best_imbalance: budget.best_imbalance,
        })
    }

    fn initial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut c: Vec<f64> = (0..=self.r).map(|_| gaussian(rng)).collect();
        c[0] = 0.0;
        normalize(&mut c);
        let mut vals: Vec<f64> = self.float.iter().flatten().map(|z| eval(&c, z)).collect();
        let mid = vals.len() / 2;
        vals.select_nth_unstable_by(mid, f64::total_cmp);
        c[0] = -vals[mid];
        c
    }

    /// Levenberg–Marquardt on the smoothed per-set imbalances.
    fn smoothed_descent(&self, mut c: Vec<f64>, budget: &mut Budget) -> Vec<f64> {
        let sched = self.params.smoothing;
        let dim = self.r + 1;
        let mut sigma = sched.initial_scale.max(sched.floor);
        let mut mu = 1e-3;
        loop {
            for _ in 0..4 {
                if !budget.tick() {
                    return c;
                }
                let (res, jac) = self.smoothed_residuals(&c, sigma);
                let cost: f64 = res.iter().map(|x| x * x).sum();
                if cost < 1e-12 {
                    break;
                }
                let j = DMatrix::from_fn(self.r, dim, |i, k| jac[i][k]);
                let rv = DVector::from_vec(res.clone());
                let jt = j.transpose();
                let mut improved = false;
                for _ in 0..6 {
                    let a = &jt * &j + DMatrix::identity(dim, dim) * mu;
                    let g = -(&jt * &rv);
                    let Some(step) = a.lu().solve(&g) else {
                        mu *= 10.0;
                        continue;
                    };
                    let mut trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                    normalize(&mut trial);
                    let (tres, _) = self.smoothed_residuals(&trial, sigma);
                    let tcost: f64 = tres.iter().map(|x| x * x).sum();
                    if tcost < cost {
                        c = trial;
                        mu = (mu * 0.3).max(1e-9);
                        improved = true;
                        break;
                    }
                    mu *= 10.0;
                }
                if !improved {
                    break;
                }
            }
            if sigma <= sched.floor {
                return c;
            }
            sigma = (sigma * sched.decay).max(sched.floor);
        }
    }

    fn smoothed_residuals(&self, c: &[f64], sigma: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut res = Vec::with_capacity(self.r);
        let mut jac = Vec::with_capacity(self.r);
        for set in &self.float {
            let inv = 1.0 / set.len() as f64;
            let mut s = 0.0;
            let mut g = vec![0.0; self.r + 1];
            for z in set {
                let t = (eval(c, z) / sigma).tanh();
                s += t * inv;
                let w = (1.0 - t * t) / sigma * inv;
                for (gk, zk) in g.iter_mut().zip(z) {
                    *gk += w * zk;
                }
            }
            res.push(s);
            jac.push(g);
        }
        (res, jac)
    }

    fn members_at(&self, c: &[f64]) -> Members {
        self.values(c).iter().map(|v| median_of(v)).collect()
    }

    /// `z·c` for every point of every set.
    fn values(&self, c: &[f64]) -> Vec<Vec<f64>> {
        self.float
            .iter()
            .map(|set| set.iter().map(|z| eval(c, z)).collect())
            .collect()
    }

    fn median_row(&self, j: usize, members: &[usize]) -> Vec<f64> {
        let w = 1.0 / members.len() as f64;
        let mut row = vec![0.0; self.r + 1];
        for &i in members {
            for (a, z) in row.iter_mut().zip(&self.float[j][i]) {
                *a += w * z;
            }
        }
        row
    }

    fn median_matrix(&self, members: &Members) -> DMatrix<f64> {
        let mut a = DMatrix::<f64>::zeros(self.r, self.r + 1);
        for (j, m) in members.iter().enumerate() {
            for (col, v) in self.median_row(j, m).into_iter().enumerate() {
                a[(j, col)] = v;
            }
        }
        a
    }

    /// Sets whose median points at `y` differ from `members`, and the
    /// homotopy parameter leaving `[0, 1]`.
    fn events(&self, members: &Members, y: &[f64]) -> Vec<Event> {
        self.events_with(members, y, &self.values(&y[..=self.r]))
    }

    fn events_with(&self, members: &Members, y: &[f64], values: &[Vec<f64>]) -> Vec<Event> {
        let r = self.r;
        let mut out: Vec<Event> = values
            .iter()
            .zip(members)
            .enumerate()
            .filter(|(_, (v, tracked))| !same_members(&median_of(v), tracked))
            .map(|(j, _)| Event::Swap(j))
            .collect();
        if y[r + 1] >= 1.0 {
            out.push(Event::End);
        }
        if y[r + 1] <= 0.0 {
            out.push(Event::Start);
        }
        out
    }

    /// Continuation along `(1 - s) M c + s F(c) = 0` on the unit sphere,
    /// where `F` is the vector of median offsets and `M` is a random linear
    /// map whose kernel is the starting point `c0`.
    ///
    /// Both terms are odd in `c`, so the solution curve leaving `(c0, 0)` can
    /// neither close up nor come back to `(-c0, 0)`: it ends at `s = 1`, where
    /// the hyperplane passes through the median of every set. Inside a region
    /// where the median points stay fixed, `F` is linear; the walk follows the
    /// curve there by pseudo-arclength steps and swaps a median point whenever
    /// another point of its set overtakes it.
    fn follow_path(&self, c0: &[f64], rng: &mut ChaCha8Rng, budget: &mut Budget) -> Option<Vec<BigInt>> {
        let r = self.r;
        let mut members = self.members_at(c0);
        // The median map's own linearization at `c0`, slightly perturbed and
        // projected to vanish at `c0`.
        let local = self.median_matrix(&members);
        let size = local.norm() / ((r * (r + 1)) as f64).sqrt();
        let mut start = DMatrix::<f64>::from_fn(r, r + 1, |i, j| local[(i, j)] + START_NOISE * size * gaussian(rng));
        let cv = DVector::from_column_slice(c0);
        let proj = &start * &cv;
        start -= proj * cv.transpose();

        let mut piece = Piece::new(&start, self.median_matrix(&members));
        let mut y: Vec<f64> = c0.iter().copied().chain([0.0]).collect();
        let mut up = vec![0.0; r + 2];
        up[r + 1] = 1.0;
        let mut t = piece.tangent(&y, &up)?;
        let mut last = MAX_ARC;
        let max_steps = 3000usize;
        for _ in 0..max_steps {
            if !budget.tick() {
                return None;
            }
            let here = (self.values(&y[..=r]), self.values(&t[..=r]));
            let mut step = (2.0 * last).min(MAX_ARC);
            for_gaps(&members, &here, |gap, rate| {
                if gap * rate < 0.0 {
                    step = step.min(1.5 * (-gap / rate) + MIN_STEP);
                }
            });
            step = step.max(MIN_STEP);
            let outcome = loop {
                if !budget.tick() {
                    return None;
                }
                match self.try_step(&piece, &members, &y, &t, &here, step, budget) {
                    Some(outcome) => break outcome,
                    None if step > MIN_STEP => step /= 2.0,
                    None => return None,
                }
            };
            last = step;
            match outcome {
                StepOutcome::Moved(y1, t1) => {
                    y = y1;
                    t = t1;
                }
                StepOutcome::Swapped(y1, t1, next) => {
                    y = y1;
                    t = t1;
                    members = next;
                    piece = Piece::new(&start, self.median_matrix(&members));
                    last = MAX_ARC;
                }
                StepOutcome::Finished(h) => return Some(h),
                StepOutcome::Failed => return None,
            }
        }
        None
    }

    /// One predictor-corrector step of length `step`, cut at the first
    /// change of median points. `None` asks for a shorter step.
    #[allow(clippy::too_many_arguments)]
    fn try_step(
        &self,
        piece: &Piece<'_>,
        members: &Members,
        y: &[f64],
        t: &[f64],
        here: &Snapshot,
        step: f64,
        budget: &mut Budget,
    ) -> Option<StepOutcome> {
        let r = self.r;
        let y1 = piece.correct(y, t, step)?;
        let t1 = piece.tangent(&y1, t)?;
        if eval(t, &t1) < MIN_ALIGNMENT && step > MIN_STEP {
            return None;
        }
        let there = (self.values(&y1[..=r]), self.values(&t1[..=r]));
        if step > MIN_STEP && hidden_crossing(members, here, &there, step) {
            return None;
        }
        let mut first = self.events_with(members, &y1, &there.0);
        if first.is_empty() {
            return Some(StepOutcome::Moved(y1, t1));
        }
        // Isolate the first event in (0, step].
        let (mut lo, mut hi) = (0.0, step);
        let mut y_hi = y1;
        while first.len() > 1 && hi - lo > 1e-15 {
            if !budget.tick() {
                return Some(StepOutcome::Failed);
            }
            let mid = 0.5 * (lo + hi);
            let y_mid = piece.correct(y, t, mid)?;
            let f = self.events(members, &y_mid);
            if f.is_empty() {
                lo = mid;
            } else {
                hi = mid;
                y_hi = y_mid;
                first = f;
            }
        }
        match first[0] {
            Event::Start => Some(StepOutcome::Failed),
            Event::End => {
                let g = |v: &[f64]| v[r + 1] - 1.0;
                let y_end = self.locate(piece, y, t, (lo, hi), &y_hi, g, 1.0, budget)?;
                if !self.events(members, &y_end).iter().all(|e| *e == Event::End) {
                    return None;
                }
                let done = self
                    .hyperplane_through(members, &y_end[..=r])
                    .filter(|h| self.check(h, budget));
                Some(done.map_or(StepOutcome::Failed, StepOutcome::Finished))
            }
            Event::Swap(j) => {
                let now = self.members_at(&y_hi[..=r]);
                let k = *now[j].iter().find(|x| !members[j].contains(x))?;
                let m = *members[j].iter().find(|x| !now[j].contains(x))?;
                let set = &self.float[j];
                let g = |v: &[f64]| eval(&v[..=r], &set[k]) - eval(&v[..=r], &set[m]);
                let want = match g(&y_hi) {
                    v if v != 0.0 => v.signum(),
                    _ => -g(y).signum(),
                };
                let at = self.locate(piece, y, t, (lo, hi), &y_hi, g, want, budget)?;
                let mut next = members.clone();
                let slot = next[j].iter().position(|&x| x == m)?;
                next[j][slot] = k;
                // Any other change before this point was missed.
                if !self.events(&next, &at).is_empty() {
                    return None;
                }
                // Walk into the region of the new order.
                let turned = Piece::new(piece.start, self.median_matrix(&next));
                let mut t_new = turned.tangent(&at, t)?;
                if g(&t_new) * want < 0.0 {
                    t_new.iter_mut().for_each(|x| *x = -*x);
                }
                Some(StepOutcome::Swapped(at, t_new, next))
            }
        }
    }

    /// Illinois root finding for `g` along the corrected step from `base` in
    /// direction `t`, where `g` reaches the sign `after` on `(lo, hi]`.
    /// Returns the first point found with `g · after > 0`.
    #[allow(clippy::too_many_arguments)]
    fn locate(
        &self,
        piece: &Piece<'_>,
        base: &[f64],
        t: &[f64],
        (mut lo, mut hi): (f64, f64),
        y_hi: &[f64],
        g: impl Fn(&[f64]) -> f64,
        after: f64,
        budget: &mut Budget,
    ) -> Option<Vec<f64>> {
        let mut y_hi = y_hi.to_vec();
        let mut f_lo = if lo > 0.0 {
            g(&piece.correct(base, t, lo)?)
        } else {
            g(base)
        };
        let mut f_hi = g(&y_hi);
        if f_hi * after <= 0.0 {
            return None;
        }
        if f_lo * after > 0.0 {
            // The walk starts on the boundary.
            f_lo = -f_hi;
        }
        let mut side = 0i8;
        for _ in 0..60 {
            if hi - lo <= 1e-15 * (1.0 + hi) {
                break;
            }
            if !budget.tick() {
                return None;
            }
            let mut mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if !mid.is_finite() || (mid - lo) * (mid - hi) >= 0.0 {
                mid = 0.5 * (lo + hi);
            }
            let y_mid = piece.correct(base, t, mid)?;
            let fm = g(&y_mid);
            if fm * after <= 0.0 {
                lo = mid;
                f_lo = fm;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                f_hi = fm;
                y_hi = y_mid;
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
        }
        Some(y_hi)
    }

    /// Exact hyperplane through the median of every set (the midpoint of
    /// the two middle points for even sizes); extra nearby points are added
    /// when these are degenerate. Oriented to agree with `c`.
    fn hyperplane_through(&self, members: &Members, c: &[f64]) -> Option<Vec<BigInt>> {
        let mut e = Echelon::new(self.r + 1);
        for (j, mem) in members.iter().enumerate() {
            let row = match mem.as_slice() {
                [m] => self.rows[j][*m].clone(),
                [a, b] => {
                    let (ra, rb) = (&self.rows[j][*a], &self.rows[j][*b]);
                    ra.iter().zip(rb).map(|(x, y)| x * &rb[0] + y * &ra[0]).collect()
                }
                _ => return None,
            };
            e.insert(row);
        }
        if e.rank() < self.r {
            let mut near: Vec<(f64, usize, usize)> = self
                .float
                .iter()
                .enumerate()
                .flat_map(|(j, s)| s.iter().enumerate().map(move |(i, z)| (j, i, z)))
                .map(|(j, i, z)| (eval(c, z).abs(), j, i))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
            for (_, j, i) in near {
                if e.rank() == self.r {
                    break;
                }
                e.insert(self.rows[j][i].clone());
            }
        }
        if e.rank() != self.r {
            return None;
        }
        let f = e.free_columns()[0];
        let mut h = e.null_vector(f);
        let hf = self.to_float(&h);
        if hf.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
            for x in h.iter_mut() {
                *x = -&*x;
            }
        }
        Some(h)
    }

    /// Normalized-coordinate float version of an exact working-space hyperplane.
    fn to_float(&self, h: &[BigInt]) -> Vec<f64> {
        let d = direction_to_f64(h);
        let mut out = vec![0.0; self.r + 1];
        out[0] = d[0] + d[1..].iter().zip(&self.mean).map(|(a, m)| a * m).sum::<f64>();
        for j in 0..self.r {
            out[j + 1] = d[j + 1] * self.scale[j];
        }
        normalize(&mut out);
        out
    }

    fn check(&self, h: &[BigInt], budget: &mut Budget) -> bool {
        // Float prefilter: skip exact work when the candidate is clearly off.
        let hf = self.to_float(h);
        let mut plausible = true;
        let mut excess = 0;
        for set in &self.float {
            let mut sc = SideCounts::default();
            for z in set {
                let v = eval(&hf, z);
                if v > 1e-9 {
                    sc.positive += 1;
                } else if v < -1e-9 {
                    sc.negative += 1;
                } else {
                    sc.zero += 1;
                }
            }
            excess += sc.excess();
            if !sc.is_bisected() {
                plausible = false;
            }
        }
        budget.best_imbalance = budget.best_imbalance.min(excess);
        if !plausible && excess > self.r {
            return false;
        }
        let mut exact_excess = 0;
        for set in self.rows {
            exact_excess += counts_for(h, set).excess();
        }
        budget.best_imbalance = budget.best_imbalance.min(exact_excess);
        exact_excess == 0
    }
}

const MIN_STEP: f64 = 1e-12;
/// Longest continuation step, measured in `(c, s)`.
const MAX_ARC: f64 = 0.05;
const NEWTON_ITERATIONS: usize = 8;
/// Relative size of the random part of the starting map.
const START_NOISE: f64 = 0.1;
/// Least cosine between consecutive tangents.
const MIN_ALIGNMENT: f64 = 0.98;
const HERMITE_SAMPLES: usize = 16;

/// Whether a function with values `f0`, `f1` and scaled slopes `m0`, `m1` at
/// the ends of a step may cross zero more often than the end signs show
/// (`flipped` says whether they differ): counts sign changes of the cubic
/// Hermite interpolant at interior points.

fn extra_crossings(f0: f64, m0: f64, f1: f64, m1: f64, flipped: bool) -> bool {
    if !flipped && f0.abs().min(f1.abs()) > m0.abs() + m1.abs() {
        return false;
    }
    let mut changes = 0;
    let mut prev = f0 > 0.0;
    for i in 1..=HERMITE_SAMPLES {
        let t = i as f64 / HERMITE_SAMPLES as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * m1;
        let cur = if i == HERMITE_SAMPLES { f1 > 0.0 } else { v > 0.0 };
        if cur != prev {
            changes += 1;
        }
        prev = cur;
    }
    changes > usize::from(flipped)
}

fn eval(c: &[f64], z: &[f64]) -> f64 {
    c.iter().zip(z).map(|(a, b)| a * b).sum()
}

/// Scales so the normal part `c[1..]` has unit length.
fn normalize(c: &mut [f64]) {
    let n = c[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        for x in c.iter_mut() {
            *x /= n;
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Exhaustive ground-truth search for small instances: hyperplanes through one
/// point of each set plus `N - r` further points.
pub fn bisect_oracle(problem: &BisectionProblem) -> Result<Cut> {
    problem.validate()?;
    let n = problem.dimension;
    let r = problem.sets.len();
    if r > 3 || n > 6 || problem.sets.iter().any(|s| s.len() > 9 || s.len() % 2 == 0) {
        return Err(Error::OracleScopeExceeded(format!(
            "r={r}, N={n}, sizes={:?}",
            problem.sets.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let sets = problem.homogeneous_sets();
    let finish = |h: Vec<BigInt>| {
        let coefficients: Vec<Rational> = h.into_iter().map(Rational::from_integer).collect();
        let counts = Cut::recount(&coefficients, problem);
        Cut {
            coefficients,
            counts,
        }
    };

    // All data inside one hyperplane: that hyperplane is a valid cut.
    let mut all = Echelon::new(n + 1);
    for row in sets.iter().flatten() {
        all.insert(row.clone());
    }
    if let Some(&f) = all.free_columns().first() {
        return Ok(finish(all.null_vector(f)));
    }

    let flat: Vec<(usize, usize)> = sets
        .iter()
        .enumerate()
        .flat_map(|(j, s)| (0..s.len()).map(move |i| (j, i)))
        .collect();
    let extra = n - r;
    let mut combo: Vec<usize> = (0..extra).collect();
    loop {
        let chosen: Vec<(usize, usize)> = combo.iter().map(|&k| flat[k]).collect();
        let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
        let mut tuple = vec![0usize; r];
        'tuples: loop {
            let ok = (0..r).all(|j| !chosen.contains(&(j, tuple[j])));
            if ok {
                let mut e = Echelon::new(n + 1);
                for j in 0..r {
                    e.insert(sets[j][tuple[j]].clone());
                }
                for &(j, i) in &chosen {
                    e.insert(sets[j][i].clone());
                }
                if e.rank() == n {
                    let h = e.null_vector(e.free_columns()[0]);
                    if sets.iter().all(|s| counts_for(&h, s).is_bisected()) {
                        return Ok(finish(h));
                    }
                }
            }
            for j in 0..r {
                tuple[j] += 1;
                if tuple[j] < sizes[j] {
                    continue 'tuples;
                }
                tuple[j] = 0;
            }
            break;
        }
        if !next_combination(&mut combo, flat.len()) {
            break;
        }
    }
    Err(Error::NoCutFound)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact affine change of coordinates `y = (x - center) / scale` taking the
/// bounding box of the data into `[-1, 1]^d`, with power-of-two scales.
/// Bisecting polynomials of the moved data pull back to bisecting
/// polynomials of the same degree, and the float search is far better
/// conditioned when all monomials have comparable size.
struct UnitBox {
    center: Vec<Rational>,
    scale: Vec<Rational>,
}

impl UnitBox {
    fn of(sets: &[PointSet], dim: usize) -> Self {
        let mut center = Vec::with_capacity(dim);
        let mut scale = Vec::with_capacity(dim);
        for i in 0..dim {
            let coords = sets.iter().flat_map(|s| s.iter()).map(|p| &p.coords()[i]);
            let lo = coords.clone().min().cloned().unwrap_or_else(Rational::zero);
            let hi = coords.max().cloned().unwrap_or_else(Rational::zero);
            let half = (&hi - &lo) / Rational::from_integer(BigInt::from(2));
            let mut s = Rational::from_integer(BigInt::from(1));
            if half.is_positive() {
                let two = Rational::from_integer(BigInt::from(2));
                while s < half {
                    s = &s * &two;
                }
                while &s / &two >= half {
                    s = &s / &two;
                }
            }
            center.push((lo + hi) / Rational::from_integer(BigInt::from(2)));
            scale.push(s);
        }
        UnitBox { center, scale }
    }

    fn apply(&self, set: &PointSet) -> Result<PointSet> {
        let pts = set
            .iter()
            .map(|p| {
                let coords = p
                    .coords()
                    .iter()
                    .zip(self.center.iter().zip(&self.scale))
                    .map(|(x, (c, s))| (x - c) / s)
                    .collect();
                crate::poly::Point::new(coords)
            })
            .collect();
        PointSet::new(set.dim(), pts)
    }

    /// `h((x - center) / scale)` as a polynomial in `x` with coprime integer
    /// coefficients.
    fn pull_back(&self, h: &Polynomial) -> Result<Polynomial> {
        let dim = h.dim();
        let linear: Vec<Polynomial> = (0..dim)
            .map(|i| {
                Polynomial::var(dim, i)
                    .sub(&Polynomial::constant(dim, self.center[i].clone()))
                    .map(|l| l.scale(&self.scale[i].recip()))
            })
            .collect::<Result<_>>()?;
        let top = h.degree().unwrap_or(0) as usize;
        let mut powers: Vec<Vec<Polynomial>> = Vec::with_capacity(dim);
        for l in &linear {
            let mut row = vec![Polynomial::one(dim)];
            for e in 1..=top {
                let next = row[e - 1].mul(l)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut g = Polynomial::zero(dim);
        for (m, c) in h.terms() {
            let mut term = Polynomial::constant(dim, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize])?;
                }
            }
            g = g.add(&term)?;
        }
        let coeffs: Vec<Rational> = g.terms().map(|(_, c)| c.clone()).collect();
        let mut ints = clear_denominators(&coeffs);
        remove_content(&mut ints);
        let terms = g
            .terms()
            .zip(ints)
            .map(|((m, _), c)| (m.exponents().to_vec(), Rational::from_integer(c)))
            .collect::<Vec<_>>();
        Polynomial::from_terms(dim, terms)
    }
}

/// Polynomial of degree at most `degree` bisecting every set (of the original
/// points), found as a hyperplane cut of the Veronese images of the data
/// moved into the unit box.
pub fn lift_and_bisect(sets: &[PointSet], degree: u32, seed: u64) -> Result<Polynomial> {
    let dim = sets
        .first()
        .map(PointSet::dim)
        .ok_or_else(|| Error::precondition("need at least one set"))?;
    for s in sets {
        crate::error::check_dim(dim, s.dim())?;
        if s.is_empty() {
            return Err(Error::precondition("sets must be nonempty"));
        }
    }
    let all: Vec<&crate::poly::Point> = sets.iter().flat_map(|s| s.iter()).collect();
    let capacity = lifted_capacity(&all, dim, degree, sets.len())?;
    if capacity < sets.len() {
        return Err(Error::CapacityTooSmall {
            capacity,
            sets: sets.len(),
        });
    }
    let unit = UnitBox::of(sets, dim);
    let moved = sets.iter().map(|s| unit.apply(s)).collect::<Result<Vec<_>>>()?;
    let basis = VeroneseBasis::new(dim, degree);
    let rows: Vec<Vec<Vec<BigInt>>> = moved
        .iter()
        .map(|s| s.iter().map(|p| homogeneous_lift(&basis, p)).collect())
        .collect();
    let params = BisectionProblem {
        dimension: basis.len(),
        sets: Vec::new(),
        max_iterations: DEFAULT_MAX_ITERATIONS,
        seed,
        smoothing: SmoothingSchedule::default(),
    };
    let h = bisect_homogeneous(&rows, &params)?;
    let mut terms = vec![(vec![0u32; dim], Rational::from_integer(h[0].clone()))];
    for (m, c) in basis.monomials().iter().zip(&h[1..]) {
        terms.push((m.exponents().to_vec(), Rational::from_integer(c.clone())));
    }
    let g = unit.pull_back(&Polynomial::from_terms(dim, terms)?)?;
    // Exact re-verification in the original coordinates.
    for s in sets {
        let mut sc = SideCounts::default();
        for p in s {
            sc.add(g.sign_at(p)?);
        }
        if !sc.is_bisected() || g.is_zero() {
            return Err(Error::SearchExhausted {
                iterations: 0,
                best_imbalance: sc.excess(),
            });
        }
    }
    Ok(g)
}

/// Side counts of each set under `g`.
pub fn side_counts(g: &Polynomial, sets: &[PointSet]) -> Result<Vec<SideCounts>> {
    sets.iter()
        .map(|s| {
            let mut sc = SideCounts::default();
            for p in s {
                sc.add(g.sign_at(p)?);
            }
            Ok(sc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Point;
    use crate::rational::{frac, int};
    use proptest::prelude::*;
    use rand::Rng;

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn points(rows: &[&[i64]]) -> PointSet {
        let pts: Vec<Point> = rows.iter().map(|r| Point::from_ints(r)).collect();
        PointSet::new(rows[0].len(), pts).unwrap()
    }

    fn assert_valid(cut: &Cut, problem: &BisectionProblem) {
        assert!(cut.is_valid(), "{cut:?}");
        assert_eq!(Cut::recount(&cut.coefficients, problem), cut.counts);
        for (counts, set) in cut.counts.iter().zip(&problem.sets) {
            assert_eq!(counts.total(), set.len());
            assert!(counts.positive <= set.len() / 2 && counts.negative <= set.len() / 2);
        }
    }

    #[test]
    fn symmetric_pair_on_a_line() {
        let problem = BisectionProblem::new(1, vec![vecs(&[&[-1], &[1]])]);
        let cut = bisect(&problem).unwrap();
        assert_valid(&cut, &problem);
    }

    #[test]
    fn two_triples_in_the_plane() {
        let problem = BisectionProblem::new(
            2,
            vec![vecs(&[&[0, 0], &[2, 0], &[4, 0]]), vecs(&[&[1, 1], &[1, 3], &[1, 5]])],
        );
        let cut = bisect(&problem).unwrap();
        assert_valid(&cut, &problem);
        let oracle = bisect_oracle(&problem).unwrap();
        assert_valid(&oracle, &problem);
    }

    #[test]
    fn single_set_reduces_to_a_median() {
        let problem = BisectionProblem::new(3, vec![vecs(&[&[5, 1, 0], &[-2, 0, 7], &[9, 9, 9], &[0, 0, 1]])]);
        assert_valid(&bisect(&problem).unwrap(), &problem);
    }

    #[test]
    fn oracle_examples() {
        let line = BisectionProblem::new(1, vec![vecs(&[&[-1], &[0], &[1]])]);
        let cut = bisect_oracle(&line).unwrap();
        assert_eq!(
            cut.counts,
            vec![SideCounts {
                negative: 1,
                zero: 1,
                positive: 1
            }]
        );
        let singletons = BisectionProblem::new(2, vec![vecs(&[&[0, 0]]), vecs(&[&[1, 2]])]);
        let cut = bisect_oracle(&singletons).unwrap();
        for c in &cut.counts {
            assert_eq!((c.negative, c.zero, c.positive), (0, 1, 0));
        }
        let too_big = BisectionProblem::new(7, vec![vecs(&[&[0, 0, 0, 0, 0, 0, 0]])]);
        assert!(matches!(bisect_oracle(&too_big), Err(Error::OracleScopeExceeded(_))));
    }

    #[test]
    fn scaling_keeps_counts() {
        let problem = BisectionProblem::new(
            2,
            vec![vecs(&[&[0, 0], &[3, 1], &[4, 0], &[1, 7], &[2, 2]]), vecs(&[&[1, 1], &[1, 3], &[6, 5]])],
        );
        let cut = bisect(&problem).unwrap();
        for factor in [frac(1, 3), int(7), frac(22, 5)] {
            let scaled: Vec<Rational> = cut.coefficients.iter().map(|c| c * &factor).collect();
            assert_eq!(Cut::recount(&scaled, &problem), cut.counts);
        }
    }

    #[test]
    fn same_seed_same_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sets: Vec<Vec<Vec<Rational>>> = (0..3)
            .map(|_| (0..7).map(|_| (0..4).map(|_| int(rng.gen_range(-50..50))).collect()).collect())
            .collect();
        let problem = BisectionProblem::new(4, sets).with_seed(5);
        assert_eq!(bisect(&problem).unwrap(), bisect(&problem).unwrap());
    }

    #[test]
    fn rejects_bad_problems() {
        let too_many = BisectionProblem::new(1, vec![vecs(&[&[0]]), vecs(&[&[1]])]);
        assert!(bisect(&too_many).is_err());
        let ragged = BisectionProblem::new(2, vec![vecs(&[&[0, 1], &[1]])]);
        assert!(bisect(&ragged).is_err());
        let empty = BisectionProblem::new(2, vec![Vec::new()]);
        assert!(bisect(&empty).is_err());
    }

    #[test]
    fn lift_examples() {
        let a = points(&[&[0, 0], &[2, 3]]);
        let b = points(&[&[1, 0]]);
        let g = lift_and_bisect(&[a.clone(), b.clone()], 1, 0).unwrap();
        assert!(g.degree().unwrap() <= 1);
        assert!(side_counts(&g, &[a, b]).unwrap().iter().all(SideCounts::is_bisected));

        let collinear = points(&[&[0, 0], &[1, 1], &[2, 2], &[3, 3]]);
        let g = lift_and_bisect(std::slice::from_ref(&collinear), 1, 0).unwrap();
        let c = side_counts(&g, std::slice::from_ref(&collinear)).unwrap()[0];
        assert!(c.positive <= 2 && c.negative <= 2);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sets: Vec<PointSet> = (0..3)
            .map(|_| {
                let rows: Vec<Point> = (0..5)
                    .map(|_| Point::from_ints(&[rng.gen_range(-30..30), rng.gen_range(-30..30)]))
                    .collect();
                PointSet::new(2, rows).unwrap()
            })
            .collect();
        let g = lift_and_bisect(&sets, 2, 9).unwrap();
        assert!(g.degree().unwrap() <= 2);
        assert!(side_counts(&g, &sets).unwrap().iter().all(SideCounts::is_bisected));
    }

    #[test]
    fn lift_needs_capacity() {
        let line = points(&[&[0, 0], &[1, 1], &[2, 2]]);
        let sets = vec![line.clone(), line.clone(), line];
        assert!(matches!(
            lift_and_bisect(&sets, 1, 0),
            Err(Error::CapacityTooSmall { capacity: 1, sets: 3 })
        ));
    }

    #[test]
    fn widely_spread_integer_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sets: Vec<PointSet> = (0..8)
            .map(|_| {
                let rows: Vec<Point> = (0..6)
                    .map(|_| Point::from_ints(&[0, 1, 2, 3].map(|_| rng.gen_range(-1000..=1000))))
                    .collect();
                PointSet::new(4, rows).unwrap()
            })
            .collect();
        let g = lift_and_bisect(&sets, 2, 1).unwrap();
        assert!(side_counts(&g, &sets).unwrap().iter().all(SideCounts::is_bisected));
    }

    #[test]
    fn unit_box_pull_back_preserves_signs() {
        let set = points(&[&[-1000, 7], &[250, 3], &[999, -40], &[17, 17]]);
        let unit = UnitBox::of(std::slice::from_ref(&set), 2);
        let moved = unit.apply(&set).unwrap();
        for p in &moved {
            assert!(p.coords().iter().all(|x| x.abs() <= int(1)));
        }
        let h = Polynomial::parse("3 0 0\n-2 1 1\n5 2 0\n1/2 0 1", Some(2)).unwrap();
        let g = unit.pull_back(&h).unwrap();
        assert!(g.terms().all(|(_, c)| c.is_integer()));
        for (x, y) in set.iter().zip(&moved) {
            assert_eq!(g.sign_at(x).unwrap(), h.sign_at(y).unwrap());
        }
    }

    fn oracle_problem() -> impl Strategy<Value = BisectionProblem> {
        (1usize..=6)
            .prop_flat_map(|n| {
                let point = prop::collection::vec(-9i64..=9, n);
                let set = (0usize..=4).prop_flat_map(move |k| prop::collection::vec(point.clone(), 2 * k + 1));
                (Just(n), prop::collection::vec(set, 1..=n.min(3)), any::<u64>())
            })
            .prop_map(|(n, sets, seed)| {
                let sets = sets
                    .into_iter()
                    .map(|s| s.into_iter().map(|p| p.into_iter().map(int).collect()).collect())
                    .collect();
                BisectionProblem::new(n, sets).with_seed(seed)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn engine_and_oracle_meet_the_same_contract(problem in oracle_problem()) {
            let oracle = bisect_oracle(&problem).unwrap();
            prop_assert!(oracle.is_valid());
            let cut = bisect(&problem).unwrap();
            prop_assert!(cut.is_valid());
            prop_assert_eq!(Cut::recount(&cut.coefficients, &problem), cut.counts);
        }
    }
}

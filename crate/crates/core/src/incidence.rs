//! Incidences between points and hypersurfaces: instance families, exact
//! counting, bound evaluators and the first level of a partitioning
//! argument.
//!
//! All bounds are evaluated with constant 1. Hypotheses on the hypersurface
//! families (bounded degree, finite four-wise intersections, at most `c`
//! hypersurfaces through any `k` points) are argued per family below; only
//! the first and the last are checked by code.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::Echelon;
use crate::partition::{partition, vector_to_polynomial};
use crate::poly::{Point, PointSet, Polynomial, Sign};
use crate::rational::{frac, int, Rational};
use crate::report::Report;
use crate::veronese::{homogeneous_lift, VeroneseBasis};

/// Lower clamp of every level degree.
pub const DEGREE_FLOOR: f64 = 24.0;

#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceInstance {
    points: PointSet,
    surfaces: Vec<Polynomial>,
    k: u32,
    degree_cap: u32,
}

impl IncidenceInstance {
    pub fn new(points: PointSet, surfaces: Vec<Polynomial>, k: u32, degree_cap: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::precondition("k must be at least 1"));
        }
        for (i, h) in surfaces.iter().enumerate() {
            check_dim(points.dim(), h.dim())?;
            match h.degree() {
                None => {
                    return Err(Error::precondition(format!("hypersurface {i} is the zero polynomial")))
                }
                Some(0) => return Err(Error::precondition(format!("hypersurface {i} is constant"))),
                Some(deg) if deg > degree_cap => {
                    return Err(Error::precondition(format!(
                        "hypersurface {i} has degree {deg} above the cap {degree_cap}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(IncidenceInstance {
            points,
            surfaces,
            k,
            degree_cap,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn surfaces(&self) -> &[Polynomial] {
        &self.surfaces
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        self.surfaces.len()
    }
}

fn lies_on(p: &Point, h: &Polynomial) -> bool {
    matches!(h.sign_at(p), Ok(Sign::Zero))
}

/// Number of pairs `(p, h)` with `h(p) = 0`.
pub fn count_incidences(inst: &IncidenceInstance) -> u64 {
    incidences_per_surface(inst).iter().map(|&c| c as u64).sum()
}

pub fn incidences_per_surface(inst: &IncidenceInstance) -> Vec<usize> {
    inst.surfaces
        .iter()
        .map(|h| inst.points.iter().filter(|p| lies_on(p, h)).count())
        .collect()
}

pub fn incidences_per_point(inst: &IncidenceInstance) -> Vec<usize> {
    inst.points
        .iter()
        .map(|p| inst.surfaces.iter().filter(|h| lies_on(p, h)).count())
        .collect()
}

/// Incidences of `points` with the hypersurfaces of `inst`.
pub fn count_for(points: &PointSet, inst: &IncidenceInstance) -> u64 {
    points
        .iter()
        .map(|p| inst.surfaces.iter().filter(|h| lies_on(p, h)).count() as u64)
        .sum()
}

/// Largest number of hypersurfaces through `k` distinct points, taken over
/// the `k`-subsets of each hypersurface's points. `None` when more than
/// `limit` subsets would have to be visited.
pub fn max_surfaces_through_k_points(inst: &IncidenceInstance, limit: usize) -> Option<usize> {
    let k = inst.k as usize;
    let on: Vec<Vec<usize>> = inst
        .surfaces
        .iter()
        .map(|h| (0..inst.m()).filter(|&i| lies_on(&inst.points.points()[i], h)).collect())
        .collect();
    let mut total = 0usize;
    for pts in &on {
        total = total.saturating_add(choose(pts.len(), k));
    }
    if total > limit {
        return None;
    }
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for pts in &on {
        if pts.len() < k {
            continue;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let key: Vec<usize> = idx.iter().map(|&i| pts[i]).collect();
            *seen.entry(key).or_default() += 1;
            if !next_subset(&mut idx, pts.len()) {
                break;
            }
        }
    }
    Some(seen.values().copied().max().unwrap_or(0))
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1usize, |acc, j| acc.saturating_mul(n - j) / (j + 1))
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A rational exponent `num / den` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub num: u64,
    pub den: u64,
}

impl Exponent {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "exponent denominator must be positive");
        let g = num.gcd(&den).max(1);
        Exponent {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `x^e` for `x >= 0`, using exact roots for denominators 1, 2 and 3 so that
/// equal exponents give bitwise equal results.
pub fn power(x: f64, e: Exponent) -> f64 {
    if x == 0.0 {
        return if e.num == 0 { 1.0 } else { 0.0 };
    }
    let num = e.num as i32;
    match e.den {
        1 => x.powi(num),
        2 => x.sqrt().powi(num),
        3 => x.cbrt().powi(num),
        _ => x.powf(e.value()),
    }
}

/// Dimension `d` and point multiplicity `k` with the level exponents
/// `α_L = k / ((5 - L) k - 1)` and `β_L = 1 / ((5 - L) k - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub d: u32,
    pub k: u32,
}

impl BoundParams {
    pub fn new(d: u32, k: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::precondition(format!("dimension {d} below 2")));
        }
        if k < 1 {
            return Err(Error::precondition("k must be at least 1"));
        }
        Ok(BoundParams { d, k })
    }

    fn level_den(&self, level: u32) -> u64 {
        assert!((1..=3).contains(&level), "levels are 1, 2 and 3");
        u64::from(5 - level) * u64::from(self.k) - 1
    }

    pub fn alpha(&self, level: u32) -> Exponent {
        Exponent::new(u64::from(self.k), self.level_den(level))
    }

    pub fn beta(&self, level: u32) -> Exponent {
        Exponent::new(1, self.level_den(level))
    }

    /// Exponents of `m` and `n` in the incidence bound.
    pub fn bound_exponents(&self) -> (Exponent, Exponent) {
        let (d, k) = (u64::from(self.d), u64::from(self.k));
        let den = d * k - 1;
        (Exponent::new(k * (d - 1), den), Exponent::new(d * (k - 1), den))
    }
}

/// `m^{2/3} n^{2/3} + m + n`.
pub fn st_bound(m: u64, n: u64) -> f64 {
    let two_thirds = Exponent::new(2, 3);
    power(m as f64, two_thirds) * power(n as f64, two_thirds) + m as f64 + n as f64
}

/// `m^{1-(k-1)/(dk-1)} n^{1-(d-1)/(dk-1)} + m + n`.
pub fn incidence_bound(m: u64, n: u64, params: &BoundParams) -> f64 {
    let (em, en) = params.bound_exponents();
    power(m as f64, em) * power(n as f64, en) + m as f64 + n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelInputs {
    pub m: f64,
    pub n: f64,
    /// Points of the current first-level cell.
    pub l_i: f64,
    /// Degree of the current first-level component.
    pub d_i: f64,
    /// Points of the current second-level cell.
    pub e_ij: f64,
    /// Degree of the current second-level component.
    pub delta_ij: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelDegrees {
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub d_clamped: bool,
    pub e_clamped: bool,
    pub f_clamped: bool,
}

/// `max(24, m^{α1} / n^{β1})` and whether the clamp was taken.
pub fn first_level_degree(m: f64, n: f64, params: &BoundParams) -> (f64, bool) {
    clamp(DEGREE_FLOOR, power(m, params.alpha(1)) / power(n, params.beta(1)))
}

fn clamp(floor: f64, value: f64) -> (f64, bool) {
    if value > floor {
        (value, false)
    } else {
        (floor, true)
    }
}

pub fn level_degrees(params: &BoundParams, x: &LevelInputs) -> Result<LevelDegrees> {
    let all = [x.m, x.n, x.l_i, x.d_i, x.e_ij, x.delta_ij];
    if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::precondition("level inputs must be positive"));
    }
    let (d, d_clamped) = first_level_degree(x.m, x.n, params);
    let (e, e_clamped) = clamp(
        DEGREE_FLOOR * x.d_i,
        power(x.l_i / x.d_i, params.alpha(2)) / power(x.n, params.beta(2)),
    );
    let (f, f_clamped) = clamp(
        DEGREE_FLOOR * e,
        power(x.e_ij / x.delta_ij, params.alpha(3)) / power(x.n, params.beta(3)),
    );
    Ok(LevelDegrees {
        d,
        e,
        f,
        d_clamped,
        e_clamped,
        f_clamped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// `{0..q-1}^2` with its `2q` axis-parallel lines; `k = 2`, `c = 1`. Two
    /// lines meet in at most one point and two points share at most one line.
    GridLines2d,
    /// Random integer points and lines through random pairs of them;
    /// `k = 2`, `c = 1`, for the same reasons as the grid.
    RandomLines2d,
    /// Unit 3-spheres in `R^4` centred at `(t, t^2, t^3, 0)` with rational
    /// points on their equators `x4 = 0`; `k = 3`, `c = 2`. Four centres on
    /// the moment curve are affinely independent, so four spheres meet in at
    /// most two points. Three points of `x4 = 0` are either collinear (on no
    /// sphere) or span a circle, which lies on at most two unit spheres.
    UnitSpheres3dEmbedded,
    /// Random integer points in `R^4`; each quadric is a random member of
    /// the linear system through `2k + 1` chosen points, and two chosen sets
    /// share fewer than `k` points. `c = 2`.
    Quadrics4d,
    /// Random integer points and random dense quadrics in `R^4`.
    RandomPoints4d,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::GridLines2d,
        Family::RandomLines2d,
        Family::UnitSpheres3dEmbedded,
        Family::Quadrics4d,
        Family::RandomPoints4d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::GridLines2d => "grid_lines_2d",
            Family::RandomLines2d => "random_lines_2d",
            Family::UnitSpheres3dEmbedded => "unit_spheres_3d_embedded",
            Family::Quadrics4d => "quadrics_4d",
            Family::RandomPoints4d => "random_points_4d",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Family::GridLines2d => &["q"],
            Family::RandomLines2d | Family::UnitSpheres3dEmbedded | Family::RandomPoints4d => &["m", "n"],
            Family::Quadrics4d => &["m", "n", "k"],
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown family `{s}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Integer family parameters written `key=value,key=value`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyParams(BTreeMap<String, u64>);

impl FamilyParams {
    pub fn new() -> Self {
        FamilyParams::default()
    }

    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<u64> {
        self.0.get(key).copied()
    }

    fn get_or(&self, key: &str, default: u64) -> u64 {
        self.get(key).unwrap_or(default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl FromStr for FamilyParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BTreeMap::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(0, format!("expected key=value, got `{item}`")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(0, format!("bad value in `{item}`")))?;
            if out.insert(k.trim().to_string(), v).is_some() {
                return Err(Error::parse(0, format!("repeated parameter `{}`", k.trim())));
            }
        }
        Ok(FamilyParams(out))
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Largest accepted point or hypersurface count.
const MAX_FAMILY_SIZE: u64 = 1 << 20;
const MAX_ATTEMPTS: usize = 1000;

pub fn generate(family: Family, params: &FamilyParams, seed: u64) -> Result<IncidenceInstance> {
    for (key, value) in params.iter() {
        if !family.keys().contains(&key) {
            return Err(Error::precondition(format!("{family} takes no parameter `{key}`")));
        }
        if value > MAX_FAMILY_SIZE {
            return Err(Error::precondition(format!("parameter {key}={value} is too large")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::GridLines2d => grid_lines_2d(params.get_or("q", 3)),
        Family::RandomLines2d => random_lines_2d(params.get_or("m", 50), params.get_or("n", 20), &mut rng),
        Family::UnitSpheres3dEmbedded => {
            unit_spheres(params.get_or("m", 50), params.get_or("n", 10), &mut rng)
        }
        Family::Quadrics4d => quadrics_4d(
            params.get_or("m", 50),
            params.get_or("n", 20),
            params.get_or("k", 2),
            &mut rng,
        ),
        Family::RandomPoints4d => {
            random_points_4d(params.get_or("m", 50), params.get_or("n", 20), &mut rng)
        }
    }
}

fn grid_lines_2d(q: u64) -> Result<IncidenceInstance> {
    if q == 0 {
        return Err(Error::precondition("grid_lines_2d needs q >= 1"));
    }
    let q = q as i64;
    let points = (0..q)
        .flat_map(|i| (0..q).map(move |j| Point::from_ints(&[i, j])))
        .collect();
    let mut surfaces = Vec::new();
    for axis in 0..2 {
        for v in 0..q {
            let x = Polynomial::var(2, axis);
            surfaces.push(x.sub(&Polynomial::constant(2, int(v)))?);
        }
    }
    IncidenceInstance::new(PointSet::new(2, points)?, surfaces, 2, 1)
}

fn distinct_points(m: u64, dim: usize, span: i64, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while (out.len() as u64) < m {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * (m as usize + 1) {
            return Err(Error::precondition("could not draw enough distinct points"));
        }
        let p = Point::from_ints(&(0..dim).map(|_| rng.gen_range(-span..=span)).collect::<Vec<_>>());
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

fn random_lines_2d(m: u64, n: u64, rng: &mut ChaCha8Rng) -> Result<IncidenceInstance> {
    if n > 0 && m < 2 {
        return Err(Error::precondition("random_lines_2d needs m >= 2 to draw lines"));
    }
    let span = (m as i64).max(8);
    let points = distinct_points(m, 2, span, rng)?;
    let mut lines: BTreeSet<[BigInt; 3]> = BTreeSet::new();
    let mut surfaces = Vec::new();
    let mut attempts = 0usize;
    while (surfaces.len() as u64) < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * (n as usize + 1) {
            return Err(Error::precondition("could not draw enough distinct lines"));
        }
        let pair = sample(rng, points.len(), 2);
        let (p, q) = (&points[pair.index(0)], &points[pair.index(1)]);
        let (px, py) = (&p.coords()[0], &p.coords()[1]);
        let (qx, qy) = (&q.coords()[0], &q.coords()[1]);
        // (qy - py) x - (qx - px) y + (qx - px) py - (qy - py) px = 0
        let a = qy - py;
        let b = px - qx;
        let c = -(&a * px) - &b * py;
        let mut key = [a.to_integer(), b.to_integer(), c.to_integer()];
        let g = key.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        key.iter_mut().for_each(|x| *x /= &g);
        if key.iter().find(|x| !x.is_zero()).is_some_and(|x| *x < BigInt::zero()) {
            key.iter_mut().for_each(|x| *x = -&*x);
        }
        if !lines.insert(key.clone()) {
            continue;
        }
        let [a, b, c] = key.map(Rational::from_integer);
        surfaces.push(Polynomial::from_terms(2, [(vec![1, 0], a), (vec![0, 1], b), (vec![0, 0], c)])?);
    }
    IncidenceInstance::new(PointSet::new(2, points)?, surfaces, 2, 1)
}

fn unit_spheres(m: u64, n: u64, rng: &mut ChaCha8Rng) -> Result<IncidenceInstance> {
    if m > 0 && n == 0 {
        return Err(Error::precondition("unit_spheres_3d_embedded places points on spheres; needs n >= 1"));
    }
    let span = 2 * n as usize + 8;
    let ts: Vec<i64> = sample(rng, 2 * span + 1, n as usize)
        .into_iter()
        .map(|i| i as i64 - span as i64)
        .collect();
    let centres: Vec<[Rational; 3]> = ts.iter().map(|&t| [int(t), int(t * t), int(t * t * t)]).collect();
    let surfaces = centres
        .iter()
        .map(|c| {
            // sum (x_i - c_i)^2 + x4^2 - 1
            let mut terms = vec![(vec![0, 0, 0, 2], int(1))];
            let mut constant = int(-1);
            for (i, ci) in c.iter().enumerate() {
                let mut sq = vec![0; 4];
                sq[i] = 2;
                terms.push((sq, int(1)));
                let mut lin = vec![0; 4];
                lin[i] = 1;
                terms.push((lin, int(-2) * ci));
                constant += ci * ci;
            }
            terms.push((vec![0; 4], constant));
            Polynomial::from_terms(4, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    let mut points = Vec::new();
    let mut attempts = 0usize;
    while (points.len() as u64) < m {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * (m as usize + 1) {
            return Err(Error::precondition("could not draw enough distinct sphere points"));
        }
        let c = &centres[rng.gen_range(0..centres.len())];
        let u = frac(rng.gen_range(-64..=64), 8);
        let v = frac(rng.gen_range(-64..=64), 8);
        let w = &u * &u + &v * &v;
        let den = &w + int(1);
        let offset = [int(2) * &u / &den, int(2) * &v / &den, (&w - int(1)) / &den];
        let coords: Vec<Rational> = c
            .iter()
            .zip(&offset)
            .map(|(a, b)| a + b)
            .chain([Rational::zero()])
            .collect();
        let p = Point::new(coords);
        if seen.insert(p.clone()) {
            points.push(p);
        }
    }
    IncidenceInstance::new(PointSet::new(4, points)?, surfaces, 3, 2)
}

fn quadrics_4d(m: u64, n: u64, k: u64, rng: &mut ChaCha8Rng) -> Result<IncidenceInstance> {
    if !(1..=6).contains(&k) {
        return Err(Error::precondition("quadrics_4d needs 1 <= k <= 6"));
    }
    let through = (2 * k + 1) as usize;
    if n > 0 && (m as usize) < through {
        return Err(Error::precondition(format!("quadrics_4d needs m >= {through}")));
    }
    let points = distinct_points(m, 4, 1000, rng)?;
    let basis = VeroneseBasis::new(4, 2);
    let mut chosen: Vec<BTreeSet<usize>> = Vec::new();
    let mut surfaces = Vec::new();
    let mut attempts = 0usize;
    while (surfaces.len() as u64) < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * (n as usize + 1) {
            return Err(Error::precondition(
                "could not choose point sets with small pairwise overlaps; lower n or raise m",
            ));
        }
        let subset: BTreeSet<usize> = sample(rng, points.len(), through).into_iter().collect();
        if chosen.iter().any(|s| s.intersection(&subset).count() >= k as usize) {
            continue;
        }
        let mut e = Echelon::new(basis.len() + 1);
        for &i in &subset {
            e.insert(homogeneous_lift(&basis, &points[i]));
        }
        let kernel = e.null_space();
        let mut combo = vec![BigInt::zero(); basis.len() + 1];
        for v in &kernel {
            let w = BigInt::from(rng.gen_range(-3i64..=3));
            combo.iter_mut().zip(v).for_each(|(a, b)| *a += &w * b);
        }
        let h = vector_to_polynomial(&basis, &combo)?;
        if h.degree() != Some(2) {
            continue;
        }
        chosen.push(subset);
        surfaces.push(h);
    }
    IncidenceInstance::new(PointSet::new(4, points)?, surfaces, k as u32, 2)
}

fn random_points_4d(m: u64, n: u64, rng: &mut ChaCha8Rng) -> Result<IncidenceInstance> {
    let points = distinct_points(m, 4, 1000, rng)?;
    let basis = VeroneseBasis::new(4, 2);
    let mut surfaces = Vec::new();
    while (surfaces.len() as u64) < n {
        let coefficients: Vec<BigInt> = (0..=basis.len()).map(|_| BigInt::from(rng.gen_range(-5i64..=5))).collect();
        let h = vector_to_polynomial(&basis, &coefficients)?;
        if h.degree() == Some(2) {
            surfaces.push(h);
        }
    }
    IncidenceInstance::new(PointSet::new(4, points)?, surfaces, 2, 2)
}

/// First-level partitioning experiment on a four-dimensional instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Level1Report {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub degree: f64,
    pub clamped: bool,
    pub budget: u32,
    pub stages: usize,
    pub cells: Vec<usize>,
    pub cell_incidences: Vec<u64>,
    pub residue: usize,
    pub residue_incidences: u64,
    pub max_cell: usize,
    pub balance_bound: usize,
    pub count: u64,
    pub bound: f64,
    pub conservation_ok: bool,
    pub degree_ok: bool,
}

impl Level1Report {
    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.bound
    }

    /// `m / 2^t`.
    pub fn cell_target(&self) -> f64 {
        self.m as f64 / 2f64.powi(self.stages as i32)
    }

    pub fn balance_ok(&self) -> bool {
        self.max_cell <= self.balance_bound
    }

    pub fn branch(&self) -> &'static str {
        if self.clamped {
            "clamped"
        } else {
            "unclamped"
        }
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.set("m", self.m)
            .set("n", self.n)
            .set("k", self.k)
            .set("count", self.count)
            .set("bound", format!("{:.6}", self.bound))
            .set("ratio", format!("{:.6}", self.ratio()))
            .set("branch", self.branch())
            .set("degree", format!("{:.6}", self.degree))
            .set("budget", self.budget)
            .set("stages", self.stages)
            .set_list("cells", &self.cells)
            .set_list("cell_incidences", &self.cell_incidences)
            .set("cell_target", format!("{:.6}", self.cell_target()))
            .set("max_cell", self.max_cell)
            .set("balance_bound", self.balance_bound)
            .set("balance_ok", self.balance_ok())
            .set("residue", self.residue)
            .set("residue_incidences", self.residue_incidences)
            .set("conservation_ok", self.conservation_ok)
            .set("degree_ok", self.degree_ok);
        r
    }
}

/// Chooses `D` by the first-level formula, partitions the points with degree
/// budget `⌊D⌋` and reports cell sizes and incidences.
pub fn run_level1(inst: &IncidenceInstance, seed: u64) -> Result<Level1Report> {
    if inst.dim() != 4 {
        return Err(Error::precondition(format!(
            "first-level runs need points in R^4, got R^{}",
            inst.dim()
        )));
    }
    let params = BoundParams::new(4, inst.k())?;
    let (m, n) = (inst.m(), inst.n());
    // With no hypersurfaces the formula is read with n = 1.
    let (degree, clamped) = first_level_degree(m as f64, n.max(1) as f64, &params);
    let budget = degree.floor().min(u32::MAX as f64) as u32;
    let result = partition(inst.points(), budget, seed)?;
    let cells: Vec<usize> = result.cells.values().map(PointSet::len).collect();
    let cell_incidences: Vec<u64> = result.cells.values().map(|c| count_for(c, inst)).collect();
    let residue_incidences = count_for(&result.residue, inst);
    Ok(Level1Report {
        m,
        n,
        k: inst.k(),
        degree,
        clamped,
        budget,
        stages: result.stage_count(),
        max_cell: result.max_cell(),
        balance_bound: result.balance_bound(),
        residue: result.residue.len(),
        count: cell_incidences.iter().sum::<u64>() + residue_incidences,
        cells,
        cell_incidences,
        residue_incidences,
        bound: incidence_bound(m as u64, n as u64, &params),
        conservation_ok: result.conservation_ok(),
        degree_ok: result.degree_ok(),
    })
}

//! Varieties given by declared invariants, optional defining equations and a
//! sampler for real points.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{chardin_upper, degree_inequalities, VarietyInvariants};
use crate::error::{check_dim, Error, Result};
use crate::poly::{parse_polynomial_list, Point, PointSet, Polynomial};
use crate::rational::Rational;
use crate::veronese::{monomial_count, HilbertEstimate, LiftedRank, SATURATION_BATCH};

/// Denominator of sampled parameter values.
const PARAM_DENOMINATOR: i64 = 1 << 12;
/// Extra points beyond the expected rank before saturation is judged.
const SAMPLE_MARGIN: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    /// Coordinates as polynomials in `params` parameters, evaluated at random
    /// rationals in `[-bound, bound]`.
    Parametrization {
        params: usize,
        coords: Vec<Polynomial>,
        bound: i64,
    },
    /// A stored list of points of the variety, consumed in order.
    Samples(PointSet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    pub invariants: VarietyInvariants,
    pub equations: Vec<Polynomial>,
    pub sampler: Sampler,
}

impl VarietySpec {
    /// Validates declared invariants, dimensions, and (when equations are
    /// given) that sampled points satisfy them.
    pub fn new(
        invariants: VarietyInvariants,
        equations: Vec<Polynomial>,
        sampler: Sampler,
    ) -> Result<Self> {
        let report = degree_inequalities(&invariants);
        if !report.all_pass() {
            let failed: Vec<String> = report.failures().map(|c| c.statement.clone()).collect();
            return Err(Error::InvalidVariety(format!(
                "declared invariants inconsistent: {}",
                failed.join("; ")
            )));
        }
        let d = invariants.ambient as usize;
        for f in &equations {
            check_dim(d, f.dim())?;
        }
        match &sampler {
            Sampler::Parametrization {
                params,
                coords,
                bound,
            } => {
                check_dim(d, coords.len())?;
                for c in coords {
                    check_dim(*params, c.dim())?;
                }
                if *bound < 1 {
                    return Err(Error::InvalidVariety("parameter bound must be >= 1".into()));
                }
            }
            Sampler::Samples(ps) => {
                check_dim(d, ps.dim())?;
                if ps.is_empty() {
                    return Err(Error::InvalidVariety("sample list is empty".into()));
                }
            }
        }
        let spec = VarietySpec {
            invariants,
            equations,
            sampler,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in spec.sample(8, &mut rng)?.iter() {
            if !spec.contains(p)? {
                return Err(Error::InvalidVariety(
                    "a sampled point does not satisfy the defining equations".into(),
                ));
            }
        }
        Ok(spec)
    }

    pub fn ambient(&self) -> usize {
        self.invariants.ambient as usize
    }

    pub fn codim(&self) -> u32 {
        self.invariants.codim() as u32
    }

    /// Every defining equation vanishes at `p` (vacuous without equations).
    pub fn contains(&self, p: &Point) -> Result<bool> {
        for f in &self.equations {
            if !f.evaluate(p)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `n` points of the variety. Stored samples are returned in order and
    /// cycle when exhausted.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<PointSet> {
        let d = self.ambient();
        let mut out = PointSet::empty(d);
        match &self.sampler {
            Sampler::Parametrization {
                params,
                coords,
                bound,
            } => {
                let span = bound * PARAM_DENOMINATOR;
                for _ in 0..n {
                    let t = Point::new(
                        (0..*params)
                            .map(|_| {
                                Rational::new(
                                    BigInt::from(rng.gen_range(-span..=span)),
                                    BigInt::from(PARAM_DENOMINATOR),
                                )
                            })
                            .collect(),
                    );
                    let x: Result<Vec<Rational>> = coords.iter().map(|c| c.evaluate(&t)).collect();
                    out.push(Point::new(x?))?;
                }
            }
            Sampler::Samples(ps) => {
                for p in ps.iter().cycle().take(n) {
                    out.push(p.clone())?;
                }
            }
        }
        Ok(out)
    }

    /// Hilbert function of the variety's real points at `degree`, estimated
    /// from samples: start with enough points to reach the a priori bound, then
    /// add batches until the rank has not moved for two of them.
    pub fn hilbert(&self, degree: u32, seed: u64) -> Result<HilbertEstimate> {
        let d = self.ambient();
        let full = monomial_count(d, degree);
        let upper = chardin_upper(self.invariants.degree, self.invariants.dim, degree as u64)
            .to_usize()
            .unwrap_or(usize::MAX);
        let initial = full.min(upper) + SAMPLE_MARGIN;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lr = LiftedRank::new(d, degree);
        let stored = match &self.sampler {
            Sampler::Samples(ps) => Some(ps),
            Sampler::Parametrization { .. } => None,
        };
        let mut feed = |lr: &mut LiftedRank, n: usize| -> Result<bool> {
            match stored {
                Some(ps) => {
                    let start = lr.seen();
                    for p in ps.points().iter().skip(start).take(n) {
                        lr.push(p);
                    }
                    Ok(lr.seen() < ps.len())
                }
                None => {
                    for p in self.sample(n, &mut rng)?.iter() {
                        lr.push(p);
                    }
                    Ok(true)
                }
            }
        };
        let mut more = feed(&mut lr, initial)?;
        let batch = SATURATION_BATCH.max(initial / 4);
        let mut stable = 0;
        while more && !lr.is_full() && stable < 2 {
            let before = lr.rank();
            more = feed(&mut lr, batch)?;
            if lr.rank() == before {
                stable += 1;
            } else {
                stable = 0;
            }
        }
        let mut est = lr.estimate();
        est.saturated = lr.is_full() || stable >= 2;
        Ok(est)
    }

    /// Parses the `key = value` variety description. File references are
    /// resolved through `load`.
    pub fn parse_with<F>(text: &str, mut load: F) -> Result<Self>
    where
        F: FnMut(&str) -> Result<String>,
    {
        let mut ambient = None;
        let mut dim = None;
        let mut degree = None;
        let mut delta1 = None;
        let mut delta2 = None;
        let mut equations = None;
        let mut parametrization = None;
        let mut params = None;
        let mut bound = 1i64;
        let mut samples = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| Error::parse(i + 1, format!("`{key}` needs a nonnegative integer")))
            };
            match key {
                "ambient" => ambient = Some(num(value)?),
                "dim" => dim = Some(num(value)?),
                "degree" => degree = Some(num(value)?),
                "delta1" => delta1 = Some(num(value)?),
                "delta2" => delta2 = Some(num(value)?),
                "params" => params = Some(num(value)? as usize),
                "param_bound" => bound = num(value)? as i64,
                "equations" => equations = Some(value.to_string()),
                "parametrization" => parametrization = Some(value.to_string()),
                "samples" => samples = Some(value.to_string()),
                other => return Err(Error::parse(i + 1, format!("unknown key `{other}`"))),
            }
        }
        let need = |v: Option<u64>, k: &str| {
            v.ok_or_else(|| Error::parse(0, format!("missing key `{k}`")))
        };
        let invariants = VarietyInvariants {
            ambient: need(ambient, "ambient")?,
            dim: need(dim, "dim")?,
            degree: need(degree, "degree")?,
            delta1: need(delta1, "delta1")?,
            delta2: need(delta2, "delta2")?,
        };
        let d = invariants.ambient as usize;
        let equations = match equations {
            Some(f) => parse_polynomial_list(&load(&f)?, Some(d))?,
            None => Vec::new(),
        };
        let sampler = match (parametrization, samples) {
            (Some(f), None) => {
                let params = params.ok_or_else(|| Error::parse(0, "missing key `params`"))?;
                Sampler::Parametrization {
                    params,
                    coords: parse_polynomial_list(&load(&f)?, Some(params))?,
                    bound,
                }
            }
            (None, Some(f)) => Sampler::Samples(PointSet::parse(&load(&f)?, Some(d))?),
            _ => {
                return Err(Error::parse(
                    0,
                    "exactly one of `parametrization` and `samples` is required",
                ))
            }
        };
        VarietySpec::new(invariants, equations, sampler)
    }

    /// Reads a description file; references are relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        VarietySpec::parse_with(&text, |name| read(&base.join(name)))
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The coordinate plane `x3 = ... = xd = 0` of dimension `k` in `R^d`, with
/// its linear equations and the identity parametrization.
pub fn coordinate_subspace(d: usize, k: usize) -> Result<VarietySpec> {
    let equations = (k..d).map(|i| Polynomial::var(d, i)).collect();
    let coords = (0..d)
        .map(|i| if i < k { Polynomial::var(k, i) } else { Polynomial::zero(k) })
        .collect();
    VarietySpec::new(
        VarietyInvariants {
            ambient: d as u64,
            dim: k as u64,
            degree: 1,
            delta1: 1,
            delta2: 1,
        },
        equations,
        Sampler::Parametrization {
            params: k,
            coords,
            bound: 1,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn parabola() -> VarietySpec {
        // x2 = x1^2 in the plane
        let eq = Polynomial::parse("1 0 1\n-1 2 0", Some(2)).unwrap();
        let coords = vec![
            Polynomial::parse("1 1", Some(1)).unwrap(),
            Polynomial::parse("1 2", Some(1)).unwrap(),
        ];
        VarietySpec::new(
            VarietyInvariants {
                ambient: 2,
                dim: 1,
                degree: 2,
                delta1: 2,
                delta2: 2,
            },
            vec![eq],
            Sampler::Parametrization {
                params: 1,
                coords,
                bound: 2,
            },
        )
        .unwrap()
    }

    #[test]
    fn samples_lie_on_variety() {
        let x = parabola();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = x.sample(30, &mut rng).unwrap();
        assert_eq!(pts.len(), 30);
        for p in &pts {
            assert!(x.contains(p).unwrap());
        }
    }

    #[test]
    fn sampled_hilbert_of_parabola_is_two_ell_plus_one() {
        let x = parabola();
        for ell in 1..=5u32 {
            let h = x.hilbert(ell, 1).unwrap();
            assert_eq!(h.value, 2 * ell as usize + 1);
            assert!(h.saturated);
        }
    }

    #[test]
    fn plane_in_four_space() {
        let x = coordinate_subspace(4, 2).unwrap();
        assert_eq!(x.codim(), 2);
        assert!(x.contains(&Point::new(vec![int(3), int(-1), int(0), int(0)])).unwrap());
        assert!(!x.contains(&Point::new(vec![int(3), int(-1), int(1), int(0)])).unwrap());
        // HF of a plane at ℓ is C(ℓ+2, 2)
        assert_eq!(x.hilbert(4, 0).unwrap().value, 15);
    }

    #[test]
    fn rejects_inconsistent_invariants() {
        let x = coordinate_subspace(4, 2).unwrap();
        let bad = VarietyInvariants {
            degree: 5,
            delta1: 2,
            delta2: 2,
            ..x.invariants.clone()
        };
        assert!(matches!(
            VarietySpec::new(bad, x.equations.clone(), x.sampler.clone()),
            Err(Error::InvalidVariety(_))
        ));
    }

    #[test]
    fn rejects_parametrization_off_the_equations() {
        let eq = Polynomial::parse("1 0 1", Some(2)).unwrap(); // x2 = 0
        let coords = vec![
            Polynomial::parse("1 1", Some(1)).unwrap(),
            Polynomial::parse("1 1", Some(1)).unwrap(),
        ];
        let r = VarietySpec::new(
            VarietyInvariants {
                ambient: 2,
                dim: 1,
                degree: 1,
                delta1: 1,
                delta2: 1,
            },
            vec![eq],
            Sampler::Parametrization {
                params: 1,
                coords,
                bound: 1,
            },
        );
        assert!(matches!(r, Err(Error::InvalidVariety(_))));
    }

    #[test]
    fn parses_description_with_references() {
        let text = "# a plane\nambient = 4\ndim = 2\ndegree = 1\ndelta1 = 1\ndelta2 = 1\n\
                    equations = eq.txt\nparametrization = par.txt\nparams = 2\n";
        let files = |name: &str| -> Result<String> {
            Ok(match name {
                "eq.txt" => "1 0 0 1 0\n---\n1 0 0 0 1\n".to_string(),
                "par.txt" => "1 1 0\n---\n1 0 1\n---\n0 0 0\n---\n0 0 0\n".to_string(),
                _ => unreachable!(),
            })
        };
        let x = VarietySpec::parse_with(text, files).unwrap();
        assert_eq!(x.equations.len(), 2);
        assert_eq!(x.hilbert(2, 0).unwrap().value, 6);

        let missing = VarietySpec::parse_with("ambient = 4\n", files);
        assert!(matches!(missing, Err(Error::Parse { .. })));
    }
}

//! Deterministic derivative-free maximization over a bounded box.
//!
//! A scan phase evaluates a regular lattice anchored at the lower corner plus
//! seeded uniform samples; the best scan points are then polished with
//! Nelder-Mead simplices that stay inside the box. Equal objective values are
//! resolved in favour of the lexicographically smaller parameter vector, so
//! the result does not depend on evaluation order.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Share of the budget spent on the scan phase, in percent.
const SCAN_SHARE: usize = 60;
/// Number of scan points that seed a simplex refinement.
const REFINE_STARTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Box `[lo, hi)` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
}

impl Bound {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(hi > lo);
        Bound { lo, hi }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Clamps into the half-open interval.
    fn clamp(&self, v: f64) -> f64 {
        let top = self.hi - self.width() * 1e-12;
        v.clamp(self.lo, top)
    }
}

fn better(a: (&[f64], f64), b: (&[f64], f64)) -> bool {
    match a.1.total_cmp(&b.1) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => lex_cmp(a.0, b.0) == Ordering::Less,
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

#[cfg(feature = "parallel")]
fn eval_all<F>(f: &F, points: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    use rayon::prelude::*;
    points.par_iter().map(|p| f(p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_all<F>(f: &F, points: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    points.iter().map(|p| f(p)).collect()
}

/// Lattice side length whose `dim`-th power fits in `n` points.
fn lattice_side(n: usize, dim: usize) -> usize {
    let mut g = 1usize;
    while (g + 1).checked_pow(dim as u32).is_some_and(|v| v <= n) {
        g += 1;
    }
    g
}

fn scan_points(bounds: &[Bound], n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if n == 0 {
        return Vec::new();
    }
    let dim = bounds.len();
    let g = lattice_side(n, dim);
    let mut pts = Vec::with_capacity(n);
    let total = g.pow(dim as u32);
    for code in 0..total {
        let mut rest = code;
        let p = bounds
            .iter()
            .map(|b| {
                let idx = rest % g;
                rest /= g;
                b.lo + b.width() * idx as f64 / g as f64
            })
            .collect();
        pts.push(p);
    }
    while pts.len() < n {
        pts.push(
            bounds
                .iter()
                .map(|b| b.lo + b.width() * rng.random::<f64>())
                .collect(),
        );
    }
    pts
}

/// Nelder-Mead from `start`, spending at most `budget` evaluations.
pub fn refine<F>(
    f: &F,
    bounds: &[Bound],
    start: &[f64],
    step: &[f64],
    budget: usize,
) -> SearchResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = bounds.len();
    let project =
        |p: Vec<f64>| -> Vec<f64> { p.into_iter().zip(bounds).map(|(v, b)| b.clamp(v)).collect() };
    let mut evals = 0usize;
    let eval = |p: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(p)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let x0 = project(start.to_vec());
    if budget == 0 {
        return SearchResult {
            x: x0,
            value: f64::NEG_INFINITY,
            evaluations: 0,
        };
    }
    let f0 = eval(&x0, &mut evals);
    simplex.push((x0.clone(), f0));
    for d in 0..dim {
        if evals >= budget {
            break;
        }
        let mut p = x0.clone();
        p[d] += step[d];
        if p[d] >= bounds[d].hi {
            p[d] = x0[d] - step[d];
        }
        let p = project(p);
        let fp = eval(&p, &mut evals);
        simplex.push((p, fp));
    }

    let sort = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| {
            if better((&a.0, a.1), (&b.0, b.1)) {
                Ordering::Less
            } else if better((&b.0, b.1), (&a.0, a.1)) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    };

    while simplex.len() == dim + 1 && evals < budget {
        sort(&mut simplex);
        let size = simplex
            .iter()
            .skip(1)
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < 1e-9 {
            break;
        }
        let worst = simplex[dim].clone();
        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..dim].iter().map(|(p, _)| p[d]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            project(
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect(),
            )
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr > simplex[0].1 {
            if evals >= budget {
                simplex[dim] = (xr, fr);
                break;
            }
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        if evals >= budget {
            break;
        }
        let (xc, fc) = if fr > worst.1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc > worst.1.max(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            if evals >= budget {
                break;
            }
            let p = project(
                best.iter()
                    .zip(&v.0)
                    .map(|(b, x)| b + 0.5 * (x - b))
                    .collect(),
            );
            let fp = eval(&p, &mut evals);
            *v = (p, fp);
        }
    }

    let (x, value) = simplex
        .into_iter()
        .reduce(|a, b| {
            if better((&b.0, b.1), (&a.0, a.1)) {
                b
            } else {
                a
            }
        })
        .expect("simplex holds the start point");
    SearchResult {
        x,
        value,
        evaluations: evals,
    }
}

/// Maximizes `f` over `bounds` with exactly `budget` evaluations or fewer.
pub fn maximize<F>(f: &F, bounds: &[Bound], budget: usize, seed: u64) -> Result<SearchResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    maximize_from(f, bounds, budget, seed, &[])
}

/// [`maximize`] with caller-supplied points that join the scan ahead of the
/// lattice.
pub fn maximize_from<F>(
    f: &F,
    bounds: &[Bound],
    budget: usize,
    seed: u64,
    hints: &[Vec<f64>],
) -> Result<SearchResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let dim = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scan_n = if budget <= dim + 2 {
        budget
    } else {
        (budget * SCAN_SHARE / 100).max(1)
    };
    let hints: Vec<Vec<f64>> = hints
        .iter()
        .take(scan_n)
        .map(|h| h.iter().zip(bounds).map(|(&v, b)| b.clamp(v)).collect())
        .collect();
    let mut points = hints.clone();
    points.extend(scan_points(bounds, scan_n - hints.len(), &mut rng));
    let values = eval_all(f, &points);
    let mut evaluations = points.len();

    let mut ranked: Vec<usize> = (0..points.len()).collect();
    ranked.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then_with(|| lex_cmp(&points[a], &points[b]))
    });
    let mut best = SearchResult {
        x: points[ranked[0]].clone(),
        value: values[ranked[0]],
        evaluations: 0,
    };

    let remaining = budget - evaluations;
    let starts = REFINE_STARTS.min(ranked.len());
    let g = lattice_side(scan_n, dim).max(2) as f64;
    let step: Vec<f64> = bounds.iter().map(|b| b.width() / g).collect();
    for (s, &idx) in ranked.iter().take(starts).enumerate() {
        let share = remaining / starts + usize::from(s < remaining % starts);
        if share == 0 {
            continue;
        }
        let r = refine(f, bounds, &points[idx], &step, share);
        evaluations += r.evaluations;
        if better((&r.x, r.value), (&best.x, best.value)) {
            best.x = r.x;
            best.value = r.value;
        }
    }
    best.evaluations = evaluations;
    Ok(best)
}
